//! Single-region SVG figures in mathematical orientation (imaginary axis up).

use std::fmt::Write;

use num_complex::Complex64;
use quadrange::geometry::{boundary_points, Closure, RegionDescriptor, Shape};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 0.1;

pub struct Figure<'a> {
    pub region: &'a RegionDescriptor,
    pub a: Complex64,
    pub b: Complex64,
    pub samples: &'a [Complex64],
    pub outline_points: usize,
}

struct Frame {
    min: Complex64,
    scale: f64,
    offset: (f64, f64),
}

impl Frame {
    fn fit(points: &[Complex64]) -> Self {
        let (mut lo, mut hi) = (points[0], points[0]);
        for z in points {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let extent = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
        let usable = SIZE * (1.0 - 2.0 * MARGIN);
        let scale = usable / extent;
        // Centre the shorter side.
        let offset = (
            SIZE * MARGIN + 0.5 * (usable - (hi.re - lo.re) * scale),
            SIZE * MARGIN + 0.5 * (usable - (hi.im - lo.im) * scale),
        );
        Self { min: lo, scale, offset }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let x = self.offset.0 + (z.re - self.min.re) * self.scale;
        let y = self.offset.1 + (z.im - self.min.im) * self.scale;
        (x, SIZE - y)
    }
}

pub fn render(fig: &Figure) -> String {
    let outline = boundary_points(fig.region, fig.outline_points.max(2)).expect("at least two outline points");
    let mut markers: Vec<(Complex64, &str)> = vec![(fig.a, "a"), (fig.b, "b")];
    if let Shape::Disk(e) = fig.region.shape() {
        markers.push((e.focus1, "focus"));
        markers.push((e.focus2, "focus"));
    }
    let mut extent: Vec<Complex64> = outline.clone();
    extent.extend(markers.iter().map(|m| m.0));
    extent.extend_from_slice(fig.samples);
    let frame = Frame::fit(&extent);

    let closed_outline = fig.region.is_closed();
    let mut d = String::new();
    for (i, z) in outline.iter().enumerate() {
        let (x, y) = frame.map(*z);
        let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
    }
    if matches!(fig.region.shape(), Shape::Disk(_)) {
        d.push('Z');
    }
    let dash = if closed_outline { "" } else { r#" stroke-dasharray="6 4""# };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let fill = if matches!(fig.region.shape(), Shape::Disk(_)) { "#cfe0f5" } else { "none" };
    let _ = writeln!(
        svg,
        r##"<path class="region" d="{}" fill="{fill}" stroke="#1f4e8c" stroke-width="2"{dash}/>"##,
        d.trim_end()
    );
    if !fig.samples.is_empty() {
        let _ = writeln!(svg, r##"<g class="samples" fill="#444444" fill-opacity="0.35">"##);
        for z in fig.samples {
            let (x, y) = frame.map(*z);
            let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1"/>"#);
        }
        let _ = writeln!(svg, "</g>");
    }
    let exceptional = matches!(fig.region.closure(), Closure::InteriorPlusAB { .. });
    for (z, label) in &markers {
        let (x, y) = frame.map(*z);
        let (fill, radius) = match *label {
            "focus" => ("#c0392b", 3.0),
            _ if exceptional => ("#1e8449", 5.0),
            _ => ("#7d3c98", 4.0),
        };
        let _ = writeln!(
            svg,
            r#"<circle class="{label}" cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{fill}"><title>{label} = {} {:+}i</title></circle>"#,
            z.re, z.im
        );
    }
    svg.push_str("</svg>\n");
    svg
}
