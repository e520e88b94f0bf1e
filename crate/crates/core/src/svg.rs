//! Minimal deterministic SVG output: landscape scatter plots and grid
//! heat maps. Coordinates are printed with fixed precision so identical
//! inputs give identical bytes.

use std::fmt::Write as _;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Viridis-like ramp, t in [0, 1].
fn ramp(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let pos = t * (STOPS.len() - 1) as f64;
    let k = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - k as f64;
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    (lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

/// Blue-white-red for signed values, t in [-1, 1].
fn diverging(t: f64) -> (u8, u8, u8) {
    let t = if t.is_finite() { t.clamp(-1.0, 1.0) } else { 0.0 };
    let fade = |c: f64| (255.0 + (c - 255.0) * t.abs()).round() as u8;
    if t >= 0.0 {
        (fade(178.0), fade(24.0), fade(43.0))
    } else {
        (fade(33.0), fade(102.0), fade(172.0))
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    if !lo.is_finite() || hi <= lo {
        (lo.min(0.0) - 0.5, lo.max(0.0) + 0.5)
    } else {
        (lo, hi)
    }
}

/// Scatter input: one entry per point.
#[derive(Debug, Clone)]
pub struct Scatter<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// Color value per point, mapped linearly onto the ramp.
    pub color: &'a [f64],
    /// Points sharing a group id are joined by a polyline in the order given
    /// by `order`.
    pub groups: Option<(&'a [i64], &'a [f64])>,
    pub title: &'a str,
}

pub fn scatter(s: &Scatter<'_>) -> String {
    let (x0, x1) = bounds(s.x.iter().copied());
    let (y0, y1) = bounds(s.y.iter().copied());
    let (c0, c1) = bounds(s.color.iter().copied());
    let span = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * span;
    let py = |y: f64| SIZE - MARGIN - (y - y0) / (y1 - y0) * span;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(s.title)
    );

    if let Some((ids, order)) = s.groups {
        let mut keys: Vec<i64> = ids.to_vec();
        keys.sort_unstable();
        keys.dedup();
        for g in keys {
            let mut members: Vec<usize> = (0..ids.len()).filter(|&i| ids[i] == g).collect();
            if members.len() < 2 {
                continue;
            }
            members.sort_by(|&a, &b| order[a].total_cmp(&order[b]).then(a.cmp(&b)));
            let pts: Vec<String> = members
                .iter()
                .map(|&i| format!("{:.3},{:.3}", px(s.x[i]), py(s.y[i])))
                .collect();
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="#999999" stroke-width="0.6"/>"##,
                pts.join(" ")
            );
        }
    }

    for i in 0..s.x.len() {
        let (r, g, b) = ramp((s.color[i] - c0) / (c1 - c0));
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="rgb({r},{g},{b})"><title>{i}</title></circle>"#,
            px(s.x[i]),
            py(s.y[i])
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heat map of a grid vector stored row-major as `rows` × `cols`.
pub fn heat_map(values: &[f64], rows: usize, cols: usize, title: &str) -> String {
    assert_eq!(values.len(), rows * cols, "heat map shape mismatch");
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let span = SIZE - 2.0 * MARGIN;
    let cw = span / cols as f64;
    let ch = span / rows as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(title)
    );
    for r in 0..rows {
        for c in 0..cols {
            let (cr, cg, cb) = diverging(values[r * cols + c] / scale);
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="rgb({cr},{cg},{cb})"/>"#,
                MARGIN + c as f64 * cw,
                MARGIN + r as f64 * ch,
                cw,
                ch
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
