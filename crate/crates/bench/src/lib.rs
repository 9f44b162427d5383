//! Shared fixtures for the benchmark targets.

use efimov_core::hubbard5::{model8, Example5Params};
use efimov_core::operators::ModelAssembly;

/// Assembled example model at the given truncations.
pub fn example_assembly(m: usize, n: usize, g: usize) -> ModelAssembly {
    let params = Example5Params {
        m,
        n_terms: n,
        g,
        ..Default::default()
    };
    ModelAssembly::new(&model8(&params).expect("valid params")).expect("assembly succeeds")
}
