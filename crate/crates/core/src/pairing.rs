//! Pairing the multicurve with surgery lines and with the meridian.
//!
//! The slope-`r` line of spin^c class `[s]` crosses the marked column at
//! nominal heights `s + i r` in column `i`. Realized lines carry the fixed
//! intercept perturbation `iota`: every tie (a line through a waist or a
//! turning point) is broken upward, deterministically. Intersections are
//! computed segment-by-segment in exact rational arithmetic; the per-class
//! counts must reproduce the mapping-cone oracle exactly, and
//! [`surgery_dimensions`] enforces that on every call.

use std::collections::BTreeMap;

use crate::curve_model::{meridian_offset, surgery_eta, surgery_iota, Multicurve, PlScene};
use num_traits::Signed;

use crate::geom::{segment_line_intersection, OrientedLine, Point, Vec2};
use crate::surgery_oracle::{build_hat_cone, cone_dimensions};
use crate::{Error, Rat, Result};

/// Centered spin^c representatives of `Z/rZ`; for even `r` the range is
/// `(-r/2, r/2]` so the self-conjugate class `r/2` is available.
pub fn spin_c_representatives(r: i64) -> Vec<i64> {
    assert!(r >= 1);
    if r % 2 == 1 {
        (-(r - 1) / 2..=(r - 1) / 2).collect()
    } else {
        (-r / 2 + 1..=r / 2).collect()
    }
}

/// Reduce an integer to its centered representative.
pub fn reduce_class(r: i64, x: i64) -> i64 {
    let mut m = x.rem_euclid(r);
    let hi = if r % 2 == 1 { (r - 1) / 2 } else { r / 2 };
    if m > hi {
        m -= r;
    }
    m
}

/// The conjugate class `[-s]`.
pub fn conjugate_class(r: i64, s: i64) -> i64 {
    reduce_class(r, -s)
}

/// Slope and representative bookkeeping for one surgery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgerySpec {
    pub r: i64,
}

impl SurgerySpec {
    pub fn new(r: i64) -> Result<Self> {
        if r < 1 {
            return Err(Error::Invalid(format!("slope {r} must be a positive integer")));
        }
        Ok(SurgerySpec { r })
    }
    pub fn representatives(&self) -> Vec<i64> {
        spin_c_representatives(self.r)
    }
    pub fn conjugate(&self, s: i64) -> i64 {
        conjugate_class(self.r, s)
    }
}

/// The realized slope-`r` line for class `[s]`.
#[derive(Debug, Clone)]
pub struct SurgeryLine {
    pub r: i64,
    pub s: i64,
    pub line: OrientedLine<Rat>,
    pub iota: Rat,
}

impl SurgeryLine {
    /// Nominal crossing height of the marked column `i`.
    pub fn crossing_height(&self, i: i64) -> i64 {
        self.s + i * self.r
    }
}

/// Build `l^s_r`. Distinct representatives give disjoint realized lines.
pub fn build_line(r: i64, s: i64) -> Result<SurgeryLine> {
    let spec = SurgerySpec::new(r)?;
    if !spec.representatives().contains(&s) {
        return Err(Error::Invalid(format!(
            "{s} is not a centered representative for Z/{r}Z"
        )));
    }
    let iota = surgery_iota(r);
    Ok(SurgeryLine {
        r,
        s,
        line: OrientedLine {
            base: Point::new(Rat::from_integer(0), Rat::from_integer(s) + iota.clone()),
            dir: Vec2::new(Rat::from_integer(1), Rat::from_integer(r)),
        },
        iota,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IxKind {
    VerticalGamma,
    NonVerticalGamma,
    BoxLeft,
    BoxRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompRef {
    Gamma { seg: usize },
    Boxed { box_idx: usize, seg: usize },
}

/// One transversal intersection of a pairing line with the multicurve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionPoint {
    pub spin_c: i64,
    pub column: i64,
    pub kind: IxKind,
    pub comp: CompRef,
    pub point: Point<Rat>,
    pub box_height: Option<i64>,
    pub box_copy: Option<usize>,
}

impl IntersectionPoint {
    pub fn height(&self) -> &Rat {
        &self.point.y
    }
    pub fn is_gamma(&self) -> bool {
        matches!(self.comp, CompRef::Gamma { .. })
    }
}

/// A realized scene together with one pairing line and its sorted
/// intersection list.
#[derive(Debug, Clone)]
pub struct PairingScene {
    pub scene: PlScene,
    pub line: OrientedLine<Rat>,
    pub spin_c: i64,
    pub r: i64,
    pub ints: Vec<IntersectionPoint>,
}

fn intersect_scene(scene: &PlScene, line: &OrientedLine<Rat>, s: i64) -> Vec<IntersectionPoint> {
    let tau = scene.desc.tau;
    let eta = &scene.eta;
    let mut out: Vec<(Rat, IntersectionPoint)> = Vec::new();

    for (seg, w) in scene.gamma.windows(2).enumerate() {
        if let Some(p) = segment_line_intersection(&w[0], &w[1], line) {
            let nearest = p.x.round().to_integer();
            let off = (p.x.clone() - Rat::from_integer(nearest)).abs();
            let kind = if tau != 0 && off <= *eta {
                IxKind::VerticalGamma
            } else {
                IxKind::NonVerticalGamma
            };
            let column = if kind == IxKind::VerticalGamma || tau == 0 {
                nearest
            } else {
                p.x.floor().to_integer()
            };
            out.push((
                line.param(&p),
                IntersectionPoint {
                    spin_c: s,
                    column,
                    kind,
                    comp: CompRef::Gamma { seg },
                    point: p,
                    box_height: None,
                    box_copy: None,
                },
            ));
        }
    }
    for (bi, bx) in scene.boxes.iter().enumerate() {
        let m = bx.pts.len();
        for seg in 0..m {
            let a = &bx.pts[seg];
            let b = &bx.pts[(seg + 1) % m];
            if let Some(p) = segment_line_intersection(a, b, line) {
                let kind = if p.x < Rat::from_integer(bx.col) {
                    IxKind::BoxLeft
                } else {
                    IxKind::BoxRight
                };
                out.push((
                    line.param(&p),
                    IntersectionPoint {
                        spin_c: s,
                        column: bx.col,
                        kind,
                        comp: CompRef::Boxed { box_idx: bi, seg },
                        point: p,
                        box_height: Some(bx.n),
                        box_copy: Some(bx.copy),
                    },
                ));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, ix)| ix).collect()
}

fn column_window(curve: &Multicurve, r: i64, s: i64) -> std::ops::RangeInclusive<i64> {
    let g = curve.desc.genus;
    let reach = g + r + 2 + s.abs();
    let c = reach / r + 2;
    -c..=c
}

/// All intersections of `l^s_r` with the multicurve, in minimal position,
/// sorted along the line.
pub fn enumerate_class(curve: &Multicurve, r: i64, s: i64) -> Result<PairingScene> {
    let sl = build_line(r, s)?;
    let cols = column_window(curve, r, s);
    let scene = curve.realize(cols, surgery_eta(r));
    let ints = intersect_scene(&scene, &sl.line, s);
    Ok(PairingScene { scene, line: sl.line, spin_c: s, r, ints })
}

/// Intersections grouped by spin^c class.
pub fn enumerate_intersections(curve: &Multicurve, r: i64) -> Result<BTreeMap<i64, PairingScene>> {
    spin_c_representatives(r)
        .into_iter()
        .map(|s| enumerate_class(curve, r, s).map(|ps| (s, ps)))
        .collect()
}

/// Geometric per-class dimensions, hard-checked against the mapping cone.
pub fn surgery_dimensions(curve: &Multicurve, r: i64) -> Result<BTreeMap<i64, i64>> {
    let mut dims = BTreeMap::new();
    for s in spin_c_representatives(r) {
        let geo = enumerate_class(curve, r, s)?.ints.len() as i64;
        let cone = cone_dimensions(&build_hat_cone(&curve.desc, r, s));
        if geo != cone {
            return Err(Error::Inconsistent(format!(
                "geometry/oracle mismatch for {:?} at r={r}, [s]={s}: curve pairing gives {geo}, \
                 mapping cone gives {cone}",
                curve.desc
            )));
        }
        dims.insert(s, geo);
    }
    Ok(dims)
}

/// Geometric dimensions only (no oracle), for sweeps that cross-check at a
/// coarser granularity.
pub fn surgery_dimensions_geometric(curve: &Multicurve, r: i64) -> Result<BTreeMap<i64, i64>> {
    let mut dims = BTreeMap::new();
    for s in spin_c_representatives(r) {
        dims.insert(s, enumerate_class(curve, r, s)?.ints.len() as i64);
    }
    Ok(dims)
}

/// The meridian pairing scene: a vertical line just left of column 0, with
/// the marked points shifted to their `w`-flavored positions.
pub fn meridian_scene(curve: &Multicurve) -> PairingScene {
    let eta = Rat::new(1, 8);
    let e_max = (0..curve.desc.genus).map(|n| curve.desc.box_count(n)).max().unwrap_or(0);
    let mut scene = curve.realize(-2..=2, eta.clone());
    let offset = meridian_offset(&eta, e_max, curve.desc.tau);
    scene.peg_shift = offset.clone() / Rat::from_integer(2);
    let line = OrientedLine {
        base: Point::new(-offset, Rat::from_integer(0)),
        dir: Vec2::new(Rat::from_integer(0), Rat::from_integer(1)),
    };
    let ints = intersect_scene(&scene, &line, 0);
    PairingScene { scene, line, spin_c: 0, r: 0, ints }
}

/// Meridian pairing as `(Alexander grading, anchored relative Maslov)` pairs.
/// The anchor is the gamma crossing in the gap `A = -tau`, the last crossing
/// before the wrap.
pub fn meridian_pairing(curve: &Multicurve) -> Result<Vec<(i64, i64)>> {
    let ps = meridian_scene(curve);
    let anchor = ps
        .ints
        .iter()
        .position(|ix| ix.is_gamma() && ix.point.y.round().to_integer() == -curve.desc.tau)
        .ok_or_else(|| Error::Inconsistent("meridian reference crossing not found".into()))?;
    let m_rel = crate::gradings::m_rel_anchored(&ps, anchor)?;
    Ok(ps
        .ints
        .iter()
        .zip(m_rel)
        .map(|(ix, m)| (ix.point.y.round().to_integer(), m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_model::build_multicurve;
    use crate::knot_data::ThinKnotDescriptor;

    fn desc(g: i64, tau: i64, boxes: &[i64]) -> ThinKnotDescriptor {
        ThinKnotDescriptor::new(g, tau, boxes.to_vec(), None).unwrap()
    }

    #[test]
    fn representative_ranges() {
        assert_eq!(spin_c_representatives(1), vec![0]);
        assert_eq!(spin_c_representatives(4), vec![-1, 0, 1, 2]);
        assert_eq!(spin_c_representatives(5), vec![-2, -1, 0, 1, 2]);
        assert_eq!(reduce_class(4, -2), 2);
        assert_eq!(conjugate_class(4, 2), 2);
        assert_eq!(conjugate_class(5, 2), -2);
    }

    #[test]
    fn line_crossing_heights() {
        let l = build_line(4, 2).unwrap();
        assert_eq!(
            (l.crossing_height(-1), l.crossing_height(0), l.crossing_height(1)),
            (-2, 2, 6)
        );
        let l = build_line(1, 0).unwrap();
        assert_eq!(l.crossing_height(5), 5);
        let l = build_line(3, -1).unwrap();
        assert_eq!((l.crossing_height(0), l.crossing_height(1), l.crossing_height(2)), (-1, 2, 5));
        assert!(build_line(4, -2).is_err());
    }

    #[test]
    fn torus_2_5_four_surgery_single_intersections() {
        let curve = build_multicurve(&desc(2, 2, &[0, 0]));
        for s in spin_c_representatives(4) {
            let ps = enumerate_class(&curve, 4, s).unwrap();
            assert_eq!(ps.ints.len(), 1, "s={s}");
        }
    }

    #[test]
    fn figure_eight_one_surgery_class_zero() {
        let curve = build_multicurve(&desc(1, 0, &[1]));
        let ps = enumerate_class(&curve, 1, 0).unwrap();
        assert_eq!(ps.ints.len(), 3);
        let kinds: Vec<_> = ps.ints.iter().map(|i| i.kind).collect();
        assert_eq!(kinds.iter().filter(|k| **k == IxKind::BoxLeft).count(), 1);
        assert_eq!(kinds.iter().filter(|k| **k == IxKind::BoxRight).count(), 1);
        assert_eq!(kinds.iter().filter(|k| **k == IxKind::NonVerticalGamma).count(), 1);
    }

    #[test]
    fn unknot_every_class_single() {
        let curve = build_multicurve(&desc(0, 0, &[]));
        for r in 1..=5 {
            for s in spin_c_representatives(r) {
                assert_eq!(enumerate_class(&curve, r, s).unwrap().ints.len(), 1);
            }
        }
    }

    #[test]
    fn dimensions_match_oracle_small_corpus() {
        for d in [
            desc(0, 0, &[]),
            desc(1, 0, &[1]),
            desc(1, 1, &[]),
            desc(1, -1, &[]),
            desc(2, 1, &[0, 1]),
            desc(2, 2, &[0, 0]),
            desc(2, 0, &[1, 1]),
            desc(2, -2, &[1, 1]),
            desc(3, 3, &[0, 0, 0]),
            desc(3, -1, &[0, 1, 1]),
        ] {
            let curve = build_multicurve(&d);
            for r in 1..=(2 * d.genus + 3).max(3) {
                surgery_dimensions(&curve, r).unwrap_or_else(|e| panic!("{d:?} r={r}: {e}"));
            }
        }
    }

    #[test]
    fn vertical_intersections_iff_inside_tau_band() {
        let d = desc(3, 2, &[0, 0, 1]);
        let curve = build_multicurve(&d);
        for r in [1, 2, 3, 5] {
            for s in spin_c_representatives(r) {
                let ps = enumerate_class(&curve, r, s).unwrap();
                let has_vertical_col0 = ps
                    .ints
                    .iter()
                    .any(|ix| ix.kind == IxKind::VerticalGamma && ix.column == 0);
                assert_eq!(has_vertical_col0, s.abs() < d.tau.abs(), "r={r} s={s}");
            }
        }
    }

    #[test]
    fn large_slopes_read_off_box_counts() {
        // For r >= 2g - 1 and tau >= 0 the class dimensions are 1 + 2 e_s.
        for d in [desc(2, 1, &[0, 2]), desc(3, 3, &[1, 0, 2]), desc(3, 0, &[2, 1, 1])] {
            let curve = build_multicurve(&d);
            let formula = crate::surgery_oracle::large_surgery_dimensions(&d).unwrap();
            for r in (2 * d.genus - 1)..=(2 * d.genus + 2) {
                let dims = surgery_dimensions(&curve, r).unwrap();
                for (s, got) in dims {
                    assert_eq!(got, formula.get(&s).copied().unwrap_or(1), "{d:?} r={r} s={s}");
                }
            }
        }
    }

    #[test]
    fn box_hits_come_in_pairs() {
        let d = desc(2, 0, &[2, 1]);
        let curve = build_multicurve(&d);
        for r in 1..=5 {
            for s in spin_c_representatives(r) {
                let ps = enumerate_class(&curve, r, s).unwrap();
                let mut per_box: BTreeMap<(i64, i64, usize), Vec<IxKind>> = BTreeMap::new();
                for ix in &ps.ints {
                    if let (Some(n), Some(c)) = (ix.box_height, ix.box_copy) {
                        per_box.entry((ix.column, n, c)).or_default().push(ix.kind);
                    }
                }
                for (key, kinds) in per_box {
                    assert_eq!(kinds.len(), 2, "box {key:?} r={r} s={s}");
                    assert!(kinds.contains(&IxKind::BoxLeft) && kinds.contains(&IxKind::BoxRight));
                }
            }
        }
    }
}
