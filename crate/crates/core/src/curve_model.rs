//! The immersed multicurve invariant of a thin knot complement, as exact PL
//! data in the lifted cylinder.
//!
//! Shape of the essential component `gamma` for `tau >= 1`, per column `c`:
//!
//! ```text
//!   T_c = (c, tau - 1/4)                      local max, crossing gap A = tau
//!   hairpins through C_h = (c, h), |h| <= tau-1, with apexes at
//!       (c +- eta, h + 1/2) alternating sides (top peg hugged on the right)
//!   B_c = (c, -tau + 1/4)                     local min, crossing gap A = -tau
//!   straight bridge B_c -> T_{c+1}            slope 2 tau - 1/2
//! ```
//!
//! The quarter offsets keep every integer-intercept pairing line clear of the
//! turning points, so intersections with slope-`r` lines are transversal and
//! in minimal position by construction; the crate validates this against the
//! mapping-cone oracle rather than running any homotopy simplification. For
//! `tau = 0` the component is the horizontal line `y = 0`; for `tau < 0` the
//! whole picture is the `y`-mirror of the `|tau|` one (`epsilon` flips).
//!
//! A figure-eight at height `n` is a ten-segment lemniscate with waist at
//! `(c, n)`, lobe caps at `n +- 3/4`, and strand junctions at `n +- 1/4`;
//! nested copies get strictly increasing widths below `eta/2`. Grading
//! arrows attach each eight to the gamma vertex at its column (`C_n`, or the
//! turning point when `|n| >= |tau|`).

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_traits::{Signed, Zero};

use crate::geom::{OrientedLine, Point, Vec2};
use crate::knot_data::ThinKnotDescriptor;
use crate::{Error, Rat, Result};

/// A weighted grading arrow from `gamma` to one figure-eight component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradingArrow {
    pub height: i64,
    pub copy: usize,
    /// Integral weight; `None` until calibration.
    pub weight: Option<i64>,
    /// Calibrated transfer constant `2 Wght - 2 Rot` of the canonical bigon
    /// through this arrow; the grading engine adds it to twice the winding
    /// of any bigon from gamma to the box's distinguished generator.
    pub cross_term: Option<i64>,
}

/// The multicurve invariant: descriptor, epsilon convention and arrow data.
/// Geometry is instantiated on demand by [`Multicurve::realize`], with
/// sharpness chosen from the pairing slope (the symbolic-perturbation rule).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multicurve {
    pub desc: ThinKnotDescriptor,
    pub epsilon: i64,
    pub arrows: Vec<GradingArrow>,
    pub calibrated: bool,
}

/// Index of a realized figure-eight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCurve {
    pub col: i64,
    pub n: i64,
    pub copy: usize,
    /// Closed polyline starting (and ending) at the arrow junction
    /// `(c + w, n + 1/4)`; the waist `(c, n)` appears twice.
    pub pts: Vec<Point<Rat>>,
    pub arrow: usize,
}

/// Realized grading-arrow edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowArc {
    pub col: i64,
    pub arrow: usize,
    /// Vertex index into the gamma polyline.
    pub gamma_vertex: usize,
    pub box_idx: usize,
}

/// One PL instantiation of the multicurve over a window of columns.
#[derive(Debug, Clone)]
pub struct PlScene {
    pub desc: ThinKnotDescriptor,
    pub epsilon: i64,
    pub eta: Rat,
    pub cols: RangeInclusive<i64>,
    pub gamma: Vec<Point<Rat>>,
    pub boxes: Vec<BoxCurve>,
    pub arrow_arcs: Vec<ArrowArc>,
    pub arrows: Vec<GradingArrow>,
    /// Marked points are shifted right by this much (zero for surgery
    /// pairing; half the narrowest box width for the meridian pairing, which
    /// winds around the `w`-flavored basepoints).
    pub peg_shift: Rat,
}

impl PlScene {
    pub fn gamma_segment(&self, seg: usize) -> (&Point<Rat>, &Point<Rat>) {
        (&self.gamma[seg], &self.gamma[seg + 1])
    }

    /// Marked points whose winding can be tested against a trace loop.
    pub fn pegs_in(&self, xmin: &Rat, xmax: &Rat, ymin: &Rat, ymax: &Rat) -> Vec<Point<Rat>> {
        let mut out = Vec::new();
        let half = Rat::new(1, 2);
        for c in self.cols.clone() {
            let x = Rat::from_integer(c) + self.peg_shift.clone();
            if &x < xmin || &x > xmax {
                continue;
            }
            let mut y = ymin.floor() - Rat::from_integer(1) + half.clone();
            while &y <= ymax {
                if &y >= ymin {
                    out.push(Point::new(x.clone(), y.clone()));
                }
                y += Rat::from_integer(1);
            }
        }
        out
    }
}

/// Build the (uncalibrated) multicurve of a thin descriptor. `epsilon`
/// defaults to `sign(tau)`, the value realized by every thin knot in the
/// bundled corpus; [`build_multicurve_with_epsilon`] exposes the override.
pub fn build_multicurve(desc: &ThinKnotDescriptor) -> Multicurve {
    build_multicurve_with_epsilon(desc, desc.tau.signum()).expect("default epsilon is always valid")
}

pub fn build_multicurve_with_epsilon(desc: &ThinKnotDescriptor, epsilon: i64) -> Result<Multicurve> {
    if epsilon != desc.tau.signum() {
        return Err(Error::Invalid(format!(
            "epsilon = {epsilon} is not realized by a thin knot with tau = {}; the curve \
             would pair inconsistently with the surgery oracle",
            desc.tau
        )));
    }
    let mut arrows = Vec::new();
    for n in -(desc.genus - 1).max(0)..=(desc.genus - 1).max(0) {
        for copy in 0..desc.box_count(n) {
            if desc.genus > 0 {
                arrows.push(GradingArrow { height: n, copy: copy as usize, weight: None, cross_term: None });
            }
        }
    }
    Ok(Multicurve { desc: desc.clone(), epsilon, arrows, calibrated: false })
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

impl Multicurve {
    pub fn arrow_index(&self, height: i64, copy: usize) -> usize {
        self.arrows
            .iter()
            .position(|a| a.height == height && a.copy == copy)
            .expect("arrow exists for every box component")
    }

    /// Instantiate the PL realization over `cols` with hug half-width `eta`.
    pub fn realize(&self, cols: RangeInclusive<i64>, eta: Rat) -> PlScene {
        let desc = &self.desc;
        let ta = desc.tau.abs();
        let flip = desc.tau < 0;
        let y = |v: Rat| if flip { -v } else { v };

        let mut gamma: Vec<Point<Rat>> = Vec::new();
        let mut attach: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        if ta == 0 {
            // Horizontal essential component; attach vertices on both sides
            // of each column (negative-height boxes attach on the left, the
            // involution image of the right attach).
            for c in cols.clone() {
                if gamma.is_empty() {
                    gamma.push(Point::new(Rat::from_integer(c) - rat(1, 2), Rat::from_integer(0)));
                }
                attach.insert((c, -1), gamma.len());
                gamma.push(Point::new(Rat::from_integer(c) - eta.clone() / Rat::from_integer(2), Rat::from_integer(0)));
                attach.insert((c, 0), gamma.len());
                gamma.push(Point::new(Rat::from_integer(c) + eta.clone() / Rat::from_integer(2), Rat::from_integer(0)));
            }
            gamma.push(Point::new(
                Rat::from_integer(*cols.end()) + rat(1, 2),
                Rat::from_integer(0),
            ));
        } else {
            for c in cols.clone() {
                let cx = Rat::from_integer(c);
                // Turning point at the top gap (A = tau).
                attach.insert((c, ta), gamma.len());
                gamma.push(Point::new(cx.clone(), y(Rat::from_integer(ta) - rat(1, 4))));
                // Hairpins past the 2 tau pegs, alternating sides from +.
                // Arrows attach on the straight stretches halfway between a
                // hairpin apex and the crossing (the crossing itself
                // coincides with a box waist, and the apex is a turning
                // point): above the crossing for non-negative heights, below
                // for negative ones - involution images of each other.
                let mut side = 1i64;
                for h in (-ta + 1..=ta - 1).rev() {
                    gamma.push(Point::new(
                        cx.clone() + Rat::from_integer(side) * eta.clone(),
                        y(Rat::from_integer(h) + rat(1, 2)),
                    ));
                    if h >= 0 {
                        attach.insert((c, h), gamma.len());
                    }
                    gamma.push(Point::new(
                        cx.clone() + Rat::from_integer(side) * eta.clone() / Rat::from_integer(2),
                        y(Rat::from_integer(h) + rat(1, 4)),
                    ));
                    gamma.push(Point::new(cx.clone(), y(Rat::from_integer(h))));
                    if h < 0 {
                        attach.insert((c, h), gamma.len());
                    }
                    gamma.push(Point::new(
                        cx.clone() - Rat::from_integer(side) * eta.clone() / Rat::from_integer(2),
                        y(Rat::from_integer(h) - rat(1, 4)),
                    ));
                    side = -side;
                }
                gamma.push(Point::new(
                    cx.clone() + Rat::from_integer(side) * eta.clone(),
                    y(Rat::from_integer(-ta) + rat(1, 2)),
                ));
                attach.insert((c, -ta), gamma.len());
                gamma.push(Point::new(cx.clone(), y(Rat::from_integer(-ta) + rat(1, 4))));
                // The segment to the next column's first vertex is the bridge.
            }
        }

        let e_max = (0..desc.genus).map(|n| desc.box_count(n)).max().unwrap_or(0);
        let mut boxes = Vec::new();
        let mut arrow_arcs = Vec::new();
        for c in cols.clone() {
            let cx = Rat::from_integer(c);
            for n in -(desc.genus - 1).max(0)..=(desc.genus - 1).max(0) {
                for copy in 0..desc.box_count(n) {
                    let w = eta.clone() * Rat::new(copy + 1, 2 * (desc.box_count(n) + 1));
                    let q = |a: i64, b: i64| Rat::from_integer(n) + rat(a, b);
                    // Point-reflected parameterization for negative heights:
                    // the arrow junction of the box at -n is the involution
                    // image of the one at +n, which makes conjugation
                    // symmetry of the pairing structural.
                    let sgn = if n < 0 { -1i64 } else { 1 };
                    let sw = |k: i64| cx.clone() + Rat::from_integer(sgn * k) * w.clone();
                    let sq = |a: i64, b: i64| q(sgn * a, b);
                    let pts = vec![
                        Point::new(sw(1), sq(1, 4)), // junction (start)
                        Point::new(sw(1), sq(3, 4)),
                        Point::new(sw(-1), sq(3, 4)),
                        Point::new(sw(-1), sq(1, 4)),
                        Point::new(cx.clone(), q(0, 1)), // waist
                        Point::new(sw(1), sq(-1, 4)),
                        Point::new(sw(1), sq(-3, 4)),
                        Point::new(sw(-1), sq(-3, 4)),
                        Point::new(sw(-1), sq(-1, 4)),
                        Point::new(cx.clone(), q(0, 1)), // waist again
                    ];
                    let arrow = self.arrow_index(n, copy as usize);
                    let attach_h = if ta == 0 {
                        if n < 0 {
                            -1
                        } else {
                            0
                        }
                    } else {
                        n.clamp(-ta, ta)
                    };
                    let attach_key = if flip { -attach_h } else { attach_h };
                    let gamma_vertex = attach[&(c, attach_key)];
                    arrow_arcs.push(ArrowArc { col: c, arrow, gamma_vertex, box_idx: boxes.len() });
                    boxes.push(BoxCurve { col: c, n, copy: copy as usize, pts, arrow });
                }
            }
        }

        PlScene {
            desc: desc.clone(),
            epsilon: self.epsilon,
            eta,
            cols,
            gamma,
            boxes,
            arrow_arcs,
            arrows: self.arrows.clone(),
            peg_shift: if e_max > 0 { Rat::from_integer(0) } else { Rat::from_integer(0) },
        }
    }
}

/// Sharpness for pairing against slope-`r` lines: the line gains at most
/// `1/8` in height while crossing a hug zone, so hairpins, boxes and bridges
/// interact with it only in the designed windows.
pub fn surgery_eta(r: i64) -> Rat {
    Rat::new(1, 8 * r.max(1))
}

/// Intercept perturbation: lines are shifted up by this much, which breaks
/// every tie (integer intercepts never meet the quarter-offset vertices) and
/// routes each line above the box waists it meets.
pub fn surgery_iota(r: i64) -> Rat {
    Rat::new(1, 64 * (r.max(1) + 2))
}

/// The meridian is realized just left of the marked column, between the
/// column and the narrowest box wall, close enough that even the steep
/// wrap segments cross it inside their nominal height gaps.
pub fn meridian_offset(scene_eta: &Rat, e_max: i64, tau: i64) -> Rat {
    let steep = (tau.abs() + 1).max(2 * (e_max + 1));
    scene_eta.clone() / Rat::from_integer(8 * steep)
}

/// Setwise invariance under the elliptic involution `(x, y) -> (-x, -y)`.
///
/// Compared on segment sets fully inside the symmetric sub-window, which
/// removes the open polyline's boundary effects.
pub fn involution_invariant(curve: &Multicurve) -> bool {
    let scene = curve.realize(-3..=3, Rat::new(1, 8));
    let bound = rat(5, 2);
    let norm = |a: &Point<Rat>, b: &Point<Rat>| {
        let s = (a.clone(), b.clone());
        let t = (b.clone(), a.clone());
        if s <= t {
            s
        } else {
            t
        }
    };
    let refl = |p: &Point<Rat>| Point::new(-p.x.clone(), -p.y.clone());
    let mut segs = std::collections::BTreeSet::new();
    let mut refl_segs = std::collections::BTreeSet::new();
    let push = |a: &Point<Rat>, b: &Point<Rat>, segs: &mut std::collections::BTreeSet<_>, refl_segs: &mut std::collections::BTreeSet<_>| {
        if a.x.clone().abs() <= bound && b.x.clone().abs() <= bound {
            segs.insert(norm(a, b));
            refl_segs.insert(norm(&refl(a), &refl(b)));
        }
    };
    // Canonicalize gamma by merging collinear runs so attach-vertex
    // subdivision does not affect the geometric comparison.
    let mut core: Vec<Point<Rat>> = Vec::with_capacity(scene.gamma.len());
    for p in &scene.gamma {
        while core.len() >= 2 {
            let a = &core[core.len() - 2];
            let b = &core[core.len() - 1];
            if crate::geom::cross(&b.sub(a), &p.sub(b)).is_zero() {
                core.pop();
            } else {
                break;
            }
        }
        core.push(p.clone());
    }
    for w in core.windows(2) {
        push(&w[0], &w[1], &mut segs, &mut refl_segs);
    }
    for bx in &scene.boxes {
        for i in 0..bx.pts.len() {
            let a = &bx.pts[i];
            let b = &bx.pts[(i + 1) % bx.pts.len()];
            push(a, b, &mut segs, &mut refl_segs);
        }
    }
    segs == refl_segs
}

/// Gamma's meridian crossings at column 0, as `(A-grading, point)` pairs,
/// read from a raw vertical-line intersection of the realized scene.
pub fn gamma_meridian_heights(curve: &Multicurve) -> Vec<i64> {
    let scene = curve.realize(-2..=2, Rat::new(1, 8));
    let e_max = (0..curve.desc.genus).map(|n| curve.desc.box_count(n)).max().unwrap_or(0);
    let x = -meridian_offset(&scene.eta, e_max, curve.desc.tau);
    let line = OrientedLine { base: Point::new(x, Rat::from_integer(0)), dir: Vec2::new(Rat::from_integer(0), Rat::from_integer(1)) };
    let mut heights = Vec::new();
    for w in scene.gamma.windows(2) {
        if let Some(p) = crate::geom::segment_line_intersection(&w[0], &w[1], &line) {
            heights.push(p.y.round().to_integer());
        }
    }
    heights.sort_unstable();
    heights
}

/// Maximal height reached, counting a figure-eight at height `n` as
/// reaching `|n| + 1` (its top generator's Alexander grading).
pub fn tallest_height(curve: &Multicurve) -> i64 {
    let from_boxes = (0..curve.desc.genus)
        .filter(|&n| curve.desc.box_count(n) > 0)
        .map(|n| n + 1)
        .max()
        .unwrap_or(0);
    curve.desc.tau.abs().max(from_boxes)
}

/// Nominal wrap slope of the essential component outside the marked strip.
pub fn wrap_slope(curve: &Multicurve) -> Rat {
    let t = curve.desc.tau;
    if t == 0 {
        Rat::from_integer(0)
    } else if t > 0 {
        Rat::from_integer(2 * t) - rat(1, 2)
    } else {
        Rat::from_integer(2 * t) + rat(1, 2)
    }
}

/// Calibrate all arrow weights and attachment orientations so the meridian
/// pairing reproduces the thin relative Maslov gradings (delta-constancy:
/// grading differences equal Alexander differences). Each adjacent meridian
/// bigon pins its arrow's weight and cusp bit uniquely - integrality of the
/// weight selects the attachment orientation - and the overdetermined
/// system must be consistent; anything else signals a malformed curve.
pub fn calibrate_arrow_weights(curve: &Multicurve) -> Result<Multicurve> {
    let mut out = curve.clone();
    if curve.arrows.is_empty() {
        out.calibrated = true;
        return Ok(out);
    }
    let solved = crate::gradings::solve_arrow_weights(curve)?;
    for s in solved {
        out.arrows[s.arrow].weight = Some(s.weight);
        out.arrows[s.arrow].cross_term = Some(s.cross_term);
    }
    out.calibrated = true;
    Ok(out)
}

/// Build and calibrate in one step.
pub fn for_descriptor(desc: &ThinKnotDescriptor) -> Result<Multicurve> {
    calibrate_arrow_weights(&build_multicurve(desc))
}

/// Meridian pairing: dimensions and anchored relative Maslov gradings per
/// Alexander grading. Thin delta-constancy means the Maslov offsets must
/// track the Alexander gradings exactly; [`crate::gradings`] tests that.
pub fn pair_with_meridian(curve: &Multicurve) -> Result<BTreeMap<i64, (i64, Vec<i64>)>> {
    let pairing = crate::pairing::meridian_pairing(curve)?;
    let mut out: BTreeMap<i64, (i64, Vec<i64>)> = BTreeMap::new();
    for (ix, m_rel) in pairing {
        let entry = out.entry(ix).or_insert((0, Vec::new()));
        entry.0 += 1;
        entry.1.push(m_rel);
    }
    for (_, grades) in out.values_mut() {
        grades.sort_unstable();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(g: i64, tau: i64, boxes: &[i64]) -> ThinKnotDescriptor {
        ThinKnotDescriptor::new(g, tau, boxes.to_vec(), None).unwrap()
    }

    #[test]
    fn involution_invariance_samples() {
        for d in [
            desc(0, 0, &[]),
            desc(1, 0, &[1]),
            desc(1, 1, &[]),
            desc(2, 2, &[0, 0]),
            desc(2, -1, &[1, 1]),
            desc(3, 0, &[2, 0, 1]),
            desc(4, -4, &[0, 2, 0, 0]),
        ] {
            assert!(involution_invariant(&build_multicurve(&d)), "{d:?}");
        }
    }

    #[test]
    fn meridian_crossings_cover_tau_band_once() {
        for tau in [-3i64, -1, 0, 1, 2, 4] {
            let d = desc(tau.abs().max(1), tau, &{
                let mut b = vec![0; tau.abs().max(1) as usize];
                if tau.abs() < tau.abs().max(1) {
                    b[(tau.abs().max(1) - 1) as usize] = 1;
                }
                b
            });
            let heights = gamma_meridian_heights(&build_multicurve(&d));
            let want: Vec<i64> = (-tau.abs()..=tau.abs()).collect();
            assert_eq!(heights, want, "tau={tau}");
        }
    }

    #[test]
    fn tallest_component_reaches_genus() {
        for d in [desc(1, 0, &[1]), desc(2, 2, &[0, 1]), desc(3, 1, &[0, 0, 2]), desc(2, -2, &[1, 0])] {
            assert_eq!(tallest_height(&build_multicurve(&d)), d.genus, "{d:?}");
        }
    }

    #[test]
    fn wrap_slope_band() {
        let c = build_multicurve(&desc(2, 2, &[0, 0]));
        assert_eq!(wrap_slope(&c), Rat::new(7, 2)); // in (2 tau - 1, 2 tau)
        let c = build_multicurve(&desc(2, -2, &[0, 0]));
        assert_eq!(wrap_slope(&c), Rat::new(-7, 2));
        let c = build_multicurve(&desc(1, 0, &[1]));
        assert_eq!(wrap_slope(&c), Rat::from_integer(0));
    }

    #[test]
    fn epsilon_override_rejected_when_unrealizable() {
        assert!(build_multicurve_with_epsilon(&desc(2, 2, &[0, 0]), -1).is_err());
        assert!(build_multicurve_with_epsilon(&desc(1, 0, &[1]), 0).is_ok());
    }
}
