//! Hand-emitted SVG impulse-response plots: fixed 640x480 viewBox, point
//! line, shaded confidence band and a zero line. Output is plain text so
//! reruns diff cleanly.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

struct Mapper {
    h_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Mapper {
    fn x(&self, h: f64) -> f64 {
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) * h / self.h_max
    }

    fn y(&self, v: f64) -> f64 {
        let span = self.y_max - self.y_min;
        HEIGHT - MARGIN_BOTTOM - (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) * (v - self.y_min) / span
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Round outward to a tidy tick step.
fn ticks(min: f64, max: f64) -> Vec<f64> {
    let span = (max - min).max(1e-12);
    let raw = span / 4.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 5.0)
        .unwrap_or(mag * 10.0);
    let mut t = (min / step).ceil() * step;
    let mut out = Vec::new();
    while t <= max + 1e-12 {
        out.push(t);
        t += step;
    }
    out
}

/// Render one response panel. `point`, `lower`, `upper` are indexed by
/// horizon 0..=H.
pub fn render_irf_panel(
    title: &str,
    point: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> String {
    let h_max = (point.len() - 1).max(1) as f64;
    let mut y_min = 0f64;
    let mut y_max = 0f64;
    for v in point.iter().chain(lower).chain(upper) {
        y_min = y_min.min(*v);
        y_max = y_max.max(*v);
    }
    let pad = 0.08 * (y_max - y_min).max(1e-9);
    let m = Mapper {
        h_max,
        y_min: y_min - pad,
        y_max: y_max + pad,
    };

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"13\">\n"
    ));
    s.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"26\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));

    // confidence band
    let mut pts = Vec::new();
    for (h, v) in upper.iter().enumerate() {
        pts.push(format!("{},{}", fmt(m.x(h as f64)), fmt(m.y(*v))));
    }
    for (h, v) in lower.iter().enumerate().rev() {
        pts.push(format!("{},{}", fmt(m.x(h as f64)), fmt(m.y(*v))));
    }
    s.push_str(&format!(
        "  <polygon points=\"{}\" fill=\"#9ecae1\" fill-opacity=\"0.55\" stroke=\"none\"/>\n",
        pts.join(" ")
    ));

    // zero line
    if m.y_min < 0.0 && m.y_max > 0.0 {
        s.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n",
            fmt(m.x(0.0)),
            fmt(m.y(0.0)),
            fmt(m.x(h_max)),
            fmt(m.y(0.0))
        ));
    }

    // point estimate
    let line: Vec<String> = point
        .iter()
        .enumerate()
        .map(|(h, v)| format!("{},{}", fmt(m.x(h as f64)), fmt(m.y(*v))))
        .collect();
    s.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\"/>\n",
        line.join(" ")
    ));

    // axes
    s.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(HEIGHT - MARGIN_BOTTOM),
        fmt(WIDTH - MARGIN_RIGHT),
        fmt(HEIGHT - MARGIN_BOTTOM)
    ));
    s.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(MARGIN_LEFT),
        fmt(HEIGHT - MARGIN_BOTTOM)
    ));
    for h in 0..point.len() {
        let x = m.x(h as f64);
        s.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            fmt(x),
            fmt(HEIGHT - MARGIN_BOTTOM),
            fmt(HEIGHT - MARGIN_BOTTOM + 5.0)
        ));
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt(x),
            fmt(HEIGHT - MARGIN_BOTTOM + 20.0),
            h
        ));
    }
    for t in ticks(m.y_min, m.y_max) {
        let y = m.y(t);
        s.push_str(&format!(
            "  <line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
            fmt(MARGIN_LEFT - 5.0),
            fmt(y),
            fmt(MARGIN_LEFT)
        ));
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fmt(MARGIN_LEFT - 9.0),
            fmt(y + 4.0),
            format_tick(t)
        ));
    }
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">quarters</text>\n",
        WIDTH / 2.0,
        HEIGHT - 14.0
    ));
    s.push_str("</svg>\n");
    s
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 0.01 {
        format!("{v:.3}")
    } else {
        format!("{v:.1e}")
    }
}
