//! Boxplots of the loss as standalone SVG.

use std::fmt::Write as _;
use std::path::Path;

use super::Summary;
use crate::error::{Error, Result};

const BOX_WIDTH: f64 = 50.0;
const SLOT: f64 = 100.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;
const PLOT_HEIGHT: f64 = 300.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Upper end of the y axis: the maximum loss rounded up to a tenth, at least 0.1.
fn axis_max(summaries: &[Summary]) -> f64 {
    let top = summaries.iter().map(|s| s.max).fold(0.0, f64::max);
    ((top * 10.0).ceil() / 10.0).max(0.1)
}

/// One box per summary (quartiles, median line, whiskers at min and max), in input order.
pub fn render_boxplot_svg(summaries: &[Summary]) -> Result<String> {
    if summaries.is_empty() {
        return Err(Error::EmptyResults);
    }
    let ymax = axis_max(summaries);
    let y = |v: f64| TOP + PLOT_HEIGHT * (1.0 - v / ymax);
    let width = LEFT + SLOT * summaries.len() as f64 + 20.0;
    let height = TOP + PLOT_HEIGHT + 50.0;
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<line x1="{LEFT:.1}" y1="{TOP:.1}" x2="{LEFT:.1}" y2="{:.1}" stroke="black"/>"#,
        TOP + PLOT_HEIGHT
    );
    for t in 0..=5 {
        let v = ymax * t as f64 / 5.0;
        let yy = y(v);
        let _ = writeln!(w, r#"<line x1="{:.1}" y1="{yy:.1}" x2="{LEFT:.1}" y2="{yy:.1}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.2}</text>"#,
            LEFT - 8.0,
            yy + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="15" y="{:.1}" font-family="sans-serif" font-size="12" transform="rotate(-90 15 {:.1})" text-anchor="middle">misclassification proportion</text>"#,
        TOP + PLOT_HEIGHT / 2.0,
        TOP + PLOT_HEIGHT / 2.0
    );
    for (idx, sm) in summaries.iter().enumerate() {
        let cx = LEFT + SLOT * (idx as f64 + 0.5);
        let (x0, x1) = (cx - BOX_WIDTH / 2.0, cx + BOX_WIDTH / 2.0);
        let _ = writeln!(w, r#"<g class="box" data-method="{}">"#, escape(sm.method.name()));
        let _ = writeln!(
            w,
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            y(sm.max),
            y(sm.q3)
        );
        let _ = writeln!(
            w,
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            y(sm.q1),
            y(sm.min)
        );
        for v in [sm.min, sm.max] {
            let _ = writeln!(
                w,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
                cx - BOX_WIDTH / 4.0,
                y(v),
                cx + BOX_WIDTH / 4.0,
                y(v)
            );
        }
        let _ = writeln!(
            w,
            r#"<rect x="{x0:.1}" y="{:.1}" width="{BOX_WIDTH:.1}" height="{:.1}" fill="lightsteelblue" stroke="black"/>"#,
            y(sm.q3),
            y(sm.q1) - y(sm.q3)
        );
        let _ = writeln!(
            w,
            r#"<line x1="{x0:.1}" y1="{:.1}" x2="{x1:.1}" y2="{:.1}" stroke="black" stroke-width="2"/>"#,
            y(sm.median),
            y(sm.median)
        );
        let _ = writeln!(
            w,
            r#"<text x="{cx:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            TOP + PLOT_HEIGHT + 20.0,
            escape(sm.method.name())
        );
        let _ = writeln!(w, "</g>");
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

pub fn emit_boxplot_svg(summaries: &[Summary], path: &Path) -> Result<()> {
    let svg = render_boxplot_svg(summaries)?;
    Ok(std::fs::write(path, svg)?)
}
