//! Plot data for scalar instances: lower and upper envelopes and an optional selection.

use std::fmt::Write as _;
use std::io::Write;

use affsel_core::svf::{AffineMap, DomainInterval, PiecewiseLinear};

pub const ROWS: usize = 101;

pub struct Series {
    pub x: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub h: Option<Vec<f64>>,
}

pub fn sample(lower: &PiecewiseLinear<f64>, upper: &PiecewiseLinear<f64>, map: Option<&AffineMap<f64>>) -> Series {
    let dom = DomainInterval {
        a: lower.xs[0],
        b: *lower.xs.last().expect("nonempty breakpoints"),
    };
    let x = dom.lattice(ROWS - 1);
    Series {
        lower: x.iter().map(|&v| lower.eval(v)).collect(),
        upper: x.iter().map(|&v| upper.eval(v)).collect(),
        h: map.map(|m| x.iter().map(|&v| m.eval(v)[0]).collect()),
        x,
    }
}

pub fn write_csv<W: Write>(series: &Series, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x", "lower", "upper"];
    if series.h.is_some() {
        header.push("h");
    }
    w.write_record(&header)?;
    for i in 0..series.x.len() {
        let mut row = vec![
            series.x[i].to_string(),
            series.lower[i].to_string(),
            series.upper[i].to_string(),
        ];
        if let Some(h) = &series.h {
            row.push(h[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Line plot of the same series, 640×400 with a fixed margin.
pub fn svg(series: &Series) -> String {
    let (w, h, m) = (640.0, 400.0, 40.0);
    let all = series
        .lower
        .iter()
        .chain(&series.upper)
        .chain(series.h.iter().flatten());
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let (x0, x1) = (series.x[0], *series.x.last().expect("samples"));
    let span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |x: f64| m + (x - x0) / span * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - lo) / (hi - lo) * (h - 2.0 * m);
    let line = |ys: &[f64], colour: &str| {
        let pts: Vec<String> = series
            .x
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        format!(
            "  <polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        )
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(
        s,
        "  <rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>",
        w - 2.0 * m,
        h - 2.0 * m
    );
    s.push_str(&line(&series.lower, "#1f77b4"));
    s.push_str(&line(&series.upper, "#d62728"));
    if let Some(hv) = &series.h {
        s.push_str(&line(hv, "#2ca02c"));
    }
    let _ = writeln!(s, "  <text x=\"{m}\" y=\"{}\" font-size=\"12\">x ∈ [{x0}, {x1}], y ∈ [{lo}, {hi}]</text>", h - 10.0);
    s.push_str("</svg>\n");
    s
}
