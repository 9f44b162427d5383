//! CSV tables and static SVG plots.
//!
//! CSV uses RFC-4180 quoting with a header row; floats are written with 17
//! significant digits and a `.` decimal separator, so re-parsing recovers
//! every bit. The SVG is a plain dot plot with one dashed horizontal line
//! at the essential edge and no timestamps, keeping identical runs
//! byte-identical.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};

/// Format a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A rectangular table: header plus rows of display-ready cells.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Write a table as CSV. Empty tables are an error and no file is created.
pub fn emit_csv(table: &Table, path: &Path) -> anyhow::Result<()> {
    if table.rows.is_empty() {
        bail!("refusing to write an empty table to {}", path.display());
    }
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One named series of `(x, y)` points.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Dot plot of the series with a dashed horizontal line at `hline`.
pub fn emit_svg(
    series: &[Series],
    hline: f64,
    hline_label: &str,
    x_label: &str,
    y_label: &str,
    path: &Path,
) -> anyhow::Result<()> {
    let n_points: usize = series.iter().map(|s| s.points.len()).sum();
    if n_points == 0 {
        bail!("refusing to write an empty plot to {}", path.display());
    }

    let (width, height) = (640.0, 440.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 20.0, 50.0);

    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = hline;
    let mut ymax = hline;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if xmax <= xmin {
        xmax = xmin + 1.0;
        xmin -= 1.0;
    }
    let ypad = 0.08 * (ymax - ymin).max(1e-12);
    ymin -= ypad;
    ymax += ypad;
    let xpad = 0.05 * (xmax - xmin);
    xmin -= xpad;
    xmax += xpad;

    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    let sy = |y: f64| height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes.
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        ml,
        height - mb,
        width - mr,
        height - mb
    ));
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        ml,
        mt,
        ml,
        height - mb
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        (ml + width - mr) / 2.0,
        height - 12.0,
        xml_escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
        (mt + height - mb) / 2.0,
        (mt + height - mb) / 2.0,
        xml_escape(y_label)
    ));
    // Tick labels on y.
    for k in 0..=4 {
        let y = ymin + (ymax - ymin) * k as f64 / 4.0;
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\">{:.4}</text>\n",
            ml - 6.0,
            sy(y) + 3.0,
            y
        ));
    }
    // The single dashed edge line.
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"crimson\" \
         stroke-dasharray=\"6 4\"/>\n",
        ml,
        sy(hline),
        width - mr,
        sy(hline)
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"crimson\">{}</text>\n",
        width - mr - 120.0,
        sy(hline) - 5.0,
        xml_escape(hline_label)
    ));
    let palette = [
        "steelblue",
        "darkorange",
        "seagreen",
        "mediumpurple",
        "firebrick",
    ];
    for (i, s) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        for &(x, y) in &s.points {
            out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            width - mr - 120.0,
            mt + 14.0 * (i as f64 + 1.0),
            xml_escape(&s.label)
        ));
    }
    out.push_str("</svg>\n");

    let mut f =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
