//! Test-only eigenvalue oracle: Householder tridiagonalization followed by
//! Sturm-sequence bisection. Shares no code with the solver under test.

/// All eigenvalues of a symmetric matrix (given as rows), ascending.
pub fn sturm_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    assert!(n > 0);
    for row in a {
        assert_eq!(row.len(), n);
    }
    let (d, e) = tridiagonalize(a);

    // Gershgorin enclosure of the whole spectrum.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - left - right);
        hi = hi.max(d[i] + left + right);
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let width_tol = 1e-14 * scale;

    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            while b - a > width_tol {
                let mid = 0.5 * (a + b);
                if count_below(&d, &e, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`,
/// from the signs of the LDL^T pivots (Sturm sequence).
fn count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let n = d.len();
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = (d[i] - x) - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Householder reduction of a symmetric matrix to tridiagonal form;
/// returns (diagonal, subdiagonal).
fn tridiagonalize(a_in: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = a_in.len();
    let mut a: Vec<Vec<f64>> = a_in.to_vec();

    for k in 0..n.saturating_sub(2) {
        // Householder vector for the column below the diagonal.
        let m = n - k - 1;
        let mut x = vec![0.0; m];
        for i in 0..m {
            x[i] = a[k + 1 + i][k];
        }
        let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
        if sigma == 0.0 {
            continue;
        }
        let mu = (x[0] * x[0] + sigma).sqrt();
        let v0 = if x[0] <= 0.0 {
            x[0] - mu
        } else {
            -sigma / (x[0] + mu)
        };
        let mut v = x.clone();
        v[0] = v0;
        let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
        let inv = 1.0 / v0;
        for vi in v.iter_mut() {
            *vi *= inv;
        }
        // v[0] == 1 now; apply the similarity to the trailing block.
        let mut p = vec![0.0; m];
        for i in 0..m {
            let mut acc = 0.0;
            for j in 0..m {
                acc += a[k + 1 + i][k + 1 + j] * v[j];
            }
            p[i] = beta * acc;
        }
        let pv: f64 = p.iter().zip(&v).map(|(pi, vi)| pi * vi).sum();
        let w: Vec<f64> = p
            .iter()
            .zip(&v)
            .map(|(pi, vi)| pi - 0.5 * beta * pv * vi)
            .collect();
        for i in 0..m {
            for j in 0..m {
                a[k + 1 + i][k + 1 + j] -= v[i] * w[j] + w[i] * v[j];
            }
        }
        // New subdiagonal entry and zeros below it.
        a[k + 1][k] = mu;
        a[k][k + 1] = mu;
        for i in 1..m {
            a[k + 1 + i][k] = 0.0;
            a[k][k + 1 + i] = 0.0;
        }
    }

    let d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    let e: Vec<f64> = (0..n - 1).map(|i| a[i + 1][i]).collect();
    (d, e)
}

/// Random symmetric matrix with entries in [-1, 1], as rows.
#[allow(clippy::needless_range_loop)]
pub fn random_symmetric(n: usize, rng: &mut impl rand::Rng) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

pub fn to_mat(a: &[Vec<f64>]) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.len(), a.len(), |i, j| a[i][j])
}
