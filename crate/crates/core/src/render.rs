//! Deterministic SVG rendering of the lifted-cylinder picture: marked
//! points, the multicurve (curve stroke class), and optional surgery lines
//! (line stroke class). Byte output is a pure function of the input.

use std::fmt::Write as _;

use crate::curve_model::{build_multicurve, surgery_eta};
use crate::geom::Scalar;
use crate::knot_data::ThinKnotDescriptor;
use crate::pairing::{build_line, spin_c_representatives};
use crate::{Rat, Result};

const SCALE: f64 = 60.0;

struct Frame {
    x0: f64,
    y1: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * SCALE, (self.y1 - y) * SCALE)
    }
    fn map_pt(&self, p: &crate::geom::Point<Rat>) -> (f64, f64) {
        self.map(p.x.to_f64(), p.y.to_f64())
    }
}

fn path_from_points(frame: &Frame, pts: &[crate::geom::Point<Rat>], close: bool) -> String {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = frame.map_pt(p);
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(d, "{cmd}{x:.3} {y:.3} ").unwrap();
    }
    if close {
        d.push('Z');
    }
    d
}

/// Render the multicurve of `desc`, overlaying the `r`-surgery lines when a
/// slope is given.
pub fn render_svg(desc: &ThinKnotDescriptor, r: Option<i64>) -> Result<String> {
    let curve = build_multicurve(desc);
    let cols = -2i64..=2i64;
    let eta = match r {
        Some(slope) => surgery_eta(slope),
        None => Rat::new(1, 8),
    };
    let scene = curve.realize(cols.clone(), eta);
    let g = desc.genus.max(1) as f64;
    let (x_lo, x_hi) = (-2.6, 2.6);
    let (y_lo, y_hi) = (-g - 1.5, g + 1.5);
    let frame = Frame { x0: x_lo, y1: y_hi };
    let (w, h) = ((x_hi - x_lo) * SCALE, (y_hi - y_lo) * SCALE);

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">"
    )
    .unwrap();
    writeln!(svg, "<style>.curve{{stroke:#2c5aa0;fill:none;stroke-width:2}}.line{{stroke:#c03a3a;fill:none;stroke-width:1.5}}.peg{{fill:#222}}.ix{{fill:#0a7d32}}</style>").unwrap();

    // Marked points at half-integral heights.
    for c in cols.clone() {
        let mut n = (y_lo.floor() as i64) - 1;
        while (n as f64) + 0.5 <= y_hi {
            let (x, y) = frame.map(c as f64, n as f64 + 0.5);
            if n as f64 + 0.5 >= y_lo {
                writeln!(svg, "<circle class=\"peg\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"2.5\"/>").unwrap();
            }
            n += 1;
        }
    }

    writeln!(svg, "<path class=\"curve\" d=\"{}\"/>", path_from_points(&frame, &scene.gamma, false)).unwrap();
    for bx in &scene.boxes {
        writeln!(svg, "<path class=\"curve\" d=\"{}\"/>", path_from_points(&frame, &bx.pts, true)).unwrap();
    }

    if let Some(slope) = r {
        for s in spin_c_representatives(slope) {
            let sl = build_line(slope, s)?;
            let p0 = sl.line.at_x(&Rat::new((x_lo * 64.0) as i64, 64));
            let p1 = sl.line.at_x(&Rat::new((x_hi * 64.0) as i64, 64));
            let (x0, y0) = frame.map_pt(&p0);
            let (x1, y1) = frame.map_pt(&p1);
            writeln!(svg, "<line class=\"line\" x1=\"{x0:.3}\" y1=\"{y0:.3}\" x2=\"{x1:.3}\" y2=\"{y1:.3}\"/>").unwrap();
        }
        for s in spin_c_representatives(slope) {
            let ps = crate::pairing::enumerate_class(&curve, slope, s)?;
            for ix in &ps.ints {
                if ix.point.x.to_f64() < x_lo || ix.point.x.to_f64() > x_hi {
                    continue;
                }
                let (x, y) = frame.map_pt(&ix.point);
                writeln!(svg, "<circle class=\"ix\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\"/>").unwrap();
            }
        }
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_deterministic() {
        let d = ThinKnotDescriptor::new(2, 1, vec![0, 1], Some("6_2".into())).unwrap();
        let a = render_svg(&d, Some(4)).unwrap();
        let b = render_svg(&d, Some(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("class=\"curve\""));
        assert!(a.contains("class=\"line\""));
    }

    #[test]
    fn unknot_renders_single_curve() {
        let d = ThinKnotDescriptor::new(0, 0, vec![], Some("unknot".into())).unwrap();
        let svg = render_svg(&d, None).unwrap();
        assert_eq!(svg.matches("class=\"curve\"").count(), 1);
    }
}
