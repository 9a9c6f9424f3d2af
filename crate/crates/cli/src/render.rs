use std::fmt::Write as _;

use pathmc_core::{FamilyConstraint, FamilySpec, LatticePath};

const MARGIN: f64 = 10.0;

/// Height range covering the origin, the path and the wall.
fn vertical_range(spec: &FamilySpec, path: &LatticePath) -> (i64, i64) {
    let mut lo = path.heights().iter().copied().min().unwrap_or(0).min(0);
    let mut hi = path.heights().iter().copied().max().unwrap_or(0).max(0);
    if let Some((h, _, _)) = visible_wall(spec) {
        lo = lo.min(h);
        hi = hi.max(h);
    }
    (lo, hi)
}

fn visible_wall(spec: &FamilySpec) -> Option<(i64, usize, usize)> {
    match *spec.constraint() {
        FamilyConstraint::Wall { h, r, s } if r <= s => Some((h, r, s)),
        _ => None,
    }
}

pub fn svg(spec: &FamilySpec, path: &LatticePath, width: u32, height: u32) -> String {
    let n = path.len().max(1) as f64;
    let (lo, hi) = vertical_range(spec, path);
    let span = (hi - lo).max(1) as f64;
    let (w, h) = (width as f64, height as f64);
    let x = |i: usize| MARGIN + i as f64 * (w - 2.0 * MARGIN) / n;
    let y = |v: i64| MARGIN + (hi - v) as f64 * (h - 2.0 * MARGIN) / span;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r##"<line class="axis" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbbbbb"/>"##,
        x(0),
        y(0),
        x(path.len()),
        y(0)
    )
    .unwrap();
    if let Some((wh, r, s)) = visible_wall(spec) {
        writeln!(
            out,
            r##"<line class="wall" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="3"/>"##,
            x(r),
            y(wh),
            x(s),
            y(wh)
        )
        .unwrap();
    }
    let heights: Vec<i64> = (0..=path.len()).map(|i| path.height(i)).collect();
    let points: Vec<String> = heights
        .iter()
        .enumerate()
        .map(|(i, &v)| format!("{:.2},{:.2}", x(i), y(v)))
        .collect();
    let data: Vec<String> = heights.iter().map(|v| v.to_string()).collect();
    writeln!(
        out,
        r#"<polyline class="path" fill="none" stroke="black" stroke-width="1.5" points="{}" data-heights="{}"/>"#,
        points.join(" "),
        data.join(" ")
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

/// One column per height `S_0..S_n`, one row per level from the top.
/// `*` marks the path, `=` the wall, `-` the zero level.
pub fn ascii(spec: &FamilySpec, path: &LatticePath) -> String {
    let (lo, hi) = vertical_range(spec, path);
    let wall = visible_wall(spec);
    let mut out = String::new();
    for level in (lo..=hi).rev() {
        for i in 0..=path.len() {
            let c = if path.height(i) == level {
                '*'
            } else if matches!(wall, Some((h, r, s)) if h == level && (r..=s).contains(&i)) {
                '='
            } else if level == 0 {
                '-'
            } else {
                '.'
            };
            out.push(c);
        }
        out.push('\n');
    }
    out
}
