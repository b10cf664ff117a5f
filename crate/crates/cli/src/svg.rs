//! Minimal SVG line plots. Figures are derived artifacts: nothing parses
//! them back, the CSV bodies stay canonical.

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub struct Marker {
    pub x: f64,
    pub y: f64,
    pub color: &'static str,
}

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: f64 = 56.0;

fn bounds(series: &[Series], markers: &[Marker]) -> (f64, f64, f64, f64) {
    let mut xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let mut ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    xs.extend(markers.iter().map(|m| m.x));
    ys.extend(markers.iter().map(|m| m.y));
    let (mut x0, mut x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (mut y0, mut y1) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(x1 > x0) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if !(y1 > y0) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad_y = 0.05 * (y1 - y0);
    (x0, x1, y0 - pad_y, y1 + pad_y)
}

/// Renders a titled line plot with optional point markers.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], markers: &[Marker]) -> String {
    let (x0, x1, y0, y1) = bounds(series, markers);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        title
    ));
    // Axes.
    out.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        r = W - MARGIN,
        t = MARGIN,
        b = H - MARGIN
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        W / 2.0,
        H - 12.0,
        xlabel
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        H / 2.0,
        H / 2.0,
        ylabel
    ));
    // Tick labels at the corners of the data range.
    for (x, y, txt) in [
        (MARGIN, H - MARGIN + 16.0, format!("{x0:.3}")),
        (W - MARGIN, H - MARGIN + 16.0, format!("{x1:.3}")),
    ] {
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{txt}</text>\n"
        ));
    }
    for (y, txt) in [(H - MARGIN, format!("{y0:.3}")), (MARGIN, format!("{y1:.3}"))] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
            MARGIN - 6.0,
            y + 4.0,
            txt
        ));
    }

    for (idx, s) in series.iter().enumerate() {
        let path: Vec<String> = s
            .points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            s.color,
            path.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
            W - MARGIN + 4.0,
            MARGIN + 16.0 * idx as f64,
            s.color,
            s.label
        ));
    }
    for m in markers {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"{}\" stroke=\"black\"/>\n",
            sx(m.x),
            sy(m.y),
            m.color
        ));
    }
    out.push_str("</svg>\n");
    out
}
