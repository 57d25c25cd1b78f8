//! Relative Maslov gradings from bigon traces.
//!
//! For intersections `x`, `y` of the multicurve with one pairing line, the
//! grading difference is
//!
//! ```text
//! M(x) - M(y) = 2 Wind(P) + 2 Wght(P) - 2 Rot(P)
//! ```
//!
//! over the bigon `P` from `y` to `x` whose boundary runs along the
//! multicurve (possibly through grading arrows) and back along the line.
//! `Wind` is the honest winding number of the closed PL boundary around the
//! marked points (exact ray casting), `Wght` sums traversed arrow weights
//! with sign, and `Rot` is the rotation of the curve-side chain with its
//! endpoint directions idealized to right corners against the line - an
//! exact quarter-turn count (see [`crate::geom::chain_rotation_quarters`]).
//!
//! Gradings of a spin^c class are assembled by chaining consecutive
//! intersections along the line and anchoring at the reference intersection
//! `a^s` (the vertical crossing when `|s| < |tau|`; the lone gamma crossing
//! when `tau >= 0` otherwise; the crossing immediately left/right of column
//! 0 by the sign of `s` when `tau < 0`).

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::curve_model::Multicurve;
use crate::geom::{chain_rotation_quarters, winding_number, Point, Vec2};
use crate::pairing::{enumerate_class, CompRef, IntersectionPoint, IxKind, PairingScene};
use crate::{Error, Rat, Result};

/// Reference direction for rotation counting; not parallel to any segment
/// or idealized corner direction the scenes produce.
fn rotation_reference() -> Vec2<Rat> {
    Vec2::new(Rat::from_integer(3), Rat::from_integer(1))
}

/// `Htilde_s`: the number of marked points enclosed by the reference region
/// at height `s` (`tau >= 0`). Inside the staircase band the count follows
/// the parity formula `ceil((s + tau)/2)`; past it the region is bounded by
/// the wrap and grows linearly, so `Htilde_s = max(0, ceil((s+tau)/2), s)`.
/// `Vtilde_s` is its reflection; for thin knots these coincide with `H_s`,
/// `V_s`.
pub fn htilde(tau: i64, s: i64) -> Result<i64> {
    if tau < 0 {
        return Err(Error::Invalid("htilde is defined for tau >= 0".into()));
    }
    let d = s + tau;
    let stair = if d >= 0 { (d + 1) / 2 } else { 0 };
    Ok(stair.max(s).max(0))
}

pub fn vtilde(tau: i64, s: i64) -> Result<i64> {
    htilde(tau, -s)
}

/// A multiset of anchored relative Maslov gradings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMultiset {
    /// Sorted ascending.
    pub entries: Vec<i64>,
}

impl GradedMultiset {
    pub fn new(mut entries: Vec<i64>) -> Self {
        entries.sort_unstable();
        GradedMultiset { entries }
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn width(&self) -> i64 {
        match (self.entries.first(), self.entries.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }
    /// Translate so the smallest element is zero.
    pub fn normalized(&self) -> GradedMultiset {
        let shift = self.entries.first().copied().unwrap_or(0);
        GradedMultiset { entries: self.entries.iter().map(|e| e - shift).collect() }
    }
}

/// True iff `b = a + t` elementwise for some integer `t`.
pub fn translation_iso(a: &GradedMultiset, b: &GradedMultiset) -> bool {
    a.len() == b.len() && a.normalized().entries == b.normalized().entries
}

// ---------------------------------------------------------------------------
// Trace construction
// ---------------------------------------------------------------------------

struct Trace {
    /// Boundary points of the curve-side path, from the source intersection
    /// to the target one. The closing edge back along the line is implicit.
    points: Vec<Point<Rat>>,
    /// Signed arrow traversals `(arrow index, +-1)`.
    arrow_uses: Vec<(usize, i64)>,
}

fn push_point(points: &mut Vec<Point<Rat>>, p: Point<Rat>) {
    if points.last() != Some(&p) {
        points.push(p);
    }
}

/// Path along gamma from `(seg_a, pt_a)` to vertex `v`.
fn gamma_to_vertex(scene_gamma: &[Point<Rat>], seg_a: usize, pt_a: &Point<Rat>, v: usize, points: &mut Vec<Point<Rat>>) {
    push_point(points, pt_a.clone());
    if v > seg_a {
        for p in &scene_gamma[seg_a + 1..=v] {
            push_point(points, p.clone());
        }
    } else {
        for p in scene_gamma[v..=seg_a].iter().rev() {
            push_point(points, p.clone());
        }
    }
}

/// Path along gamma from vertex `v` to `(seg_b, pt_b)`.
fn gamma_from_vertex(scene_gamma: &[Point<Rat>], v: usize, seg_b: usize, pt_b: &Point<Rat>, points: &mut Vec<Point<Rat>>) {
    if seg_b >= v {
        for p in &scene_gamma[v..=seg_b] {
            push_point(points, p.clone());
        }
    } else {
        for p in scene_gamma[seg_b + 1..=v].iter().rev() {
            push_point(points, p.clone());
        }
    }
    push_point(points, pt_b.clone());
}

/// Path along gamma between two vertices.
fn gamma_vertex_to_vertex(scene_gamma: &[Point<Rat>], va: usize, vb: usize, points: &mut Vec<Point<Rat>>) {
    if vb >= va {
        for p in &scene_gamma[va..=vb] {
            push_point(points, p.clone());
        }
    } else {
        for p in scene_gamma[vb..=va].iter().rev() {
            push_point(points, p.clone());
        }
    }
}

fn gamma_between(
    scene_gamma: &[Point<Rat>],
    seg_a: usize,
    pt_a: &Point<Rat>,
    seg_b: usize,
    pt_b: &Point<Rat>,
    points: &mut Vec<Point<Rat>>,
) {
    push_point(points, pt_a.clone());
    if seg_a < seg_b {
        for p in &scene_gamma[seg_a + 1..=seg_b] {
            push_point(points, p.clone());
        }
    } else if seg_a > seg_b {
        for p in scene_gamma[seg_b + 1..=seg_a].iter().rev() {
            push_point(points, p.clone());
        }
    }
    push_point(points, pt_b.clone());
}

/// Fraction of the way along box segment `seg` (for ordering two points on
/// the same segment).
fn box_seg_param(bx: &[Point<Rat>], seg: usize, p: &Point<Rat>) -> Rat {
    let a = &bx[seg];
    let b = &bx[(seg + 1) % bx.len()];
    let d = b.sub(a);
    let v = p.sub(a);
    // Segments are axis-parallel or sloped; use the dominant coordinate.
    if d.x.clone().abs() >= d.y.clone().abs() {
        v.x / d.x
    } else {
        v.y / d.y
    }
}

/// Forward walk around the closed box polyline between two interior points.
fn box_between(bx: &[Point<Rat>], seg_a: usize, pt_a: &Point<Rat>, seg_b: usize, pt_b: &Point<Rat>, points: &mut Vec<Point<Rat>>) {
    let m = bx.len();
    push_point(points, pt_a.clone());
    if seg_a == seg_b && box_seg_param(bx, seg_a, pt_a) < box_seg_param(bx, seg_b, pt_b) {
        push_point(points, pt_b.clone());
        return;
    }
    let mut seg = (seg_a + 1) % m;
    loop {
        push_point(points, bx[seg].clone());
        if seg == seg_b {
            break;
        }
        seg = (seg + 1) % m;
    }
    push_point(points, pt_b.clone());
}

/// Forward walk from an interior point to the closing vertex (`pts[0]`).
fn box_to_end(bx: &[Point<Rat>], seg_a: usize, pt_a: &Point<Rat>, points: &mut Vec<Point<Rat>>) {
    push_point(points, pt_a.clone());
    for p in bx.iter().skip(seg_a + 1) {
        push_point(points, p.clone());
    }
    push_point(points, bx[0].clone());
}

/// Forward walk from the start vertex (`pts[0]`) to an interior point.
fn box_from_start(bx: &[Point<Rat>], seg_b: usize, pt_b: &Point<Rat>, points: &mut Vec<Point<Rat>>) {
    for p in bx.iter().take(seg_b + 1) {
        push_point(points, p.clone());
    }
    push_point(points, pt_b.clone());
}

fn arrow_for_box(ps: &PairingScene, box_idx: usize) -> &crate::curve_model::ArrowArc {
    ps.scene
        .arrow_arcs
        .iter()
        .find(|a| a.box_idx == box_idx)
        .expect("every realized box has an arrow arc")
}

/// Fraction along segment `(a, b)` of a point on it, via the dominant
/// coordinate (segments are never degenerate).
fn seg_param(a: &Point<Rat>, b: &Point<Rat>, p: &Point<Rat>) -> Rat {
    let d = b.sub(a);
    let v = p.sub(a);
    if d.x.abs() >= d.y.abs() {
        v.x / d.x
    } else {
        v.y / d.y
    }
}

fn build_trace(ps: &PairingScene, from: &IntersectionPoint, to: &IntersectionPoint) -> Trace {
    let g = &ps.scene.gamma;
    let mut points = Vec::new();
    let mut arrow_uses = Vec::new();
    match (from.comp, to.comp) {
        (CompRef::Gamma { seg: sa }, CompRef::Gamma { seg: sb }) => {
            gamma_between(g, sa, &from.point, sb, &to.point, &mut points);
        }
        (CompRef::Gamma { seg: sa }, CompRef::Boxed { box_idx, seg: sb }) => {
            let arc = arrow_for_box(ps, box_idx);
            gamma_to_vertex(g, sa, &from.point, arc.gamma_vertex, &mut points);
            let bx = &ps.scene.boxes[box_idx].pts;
            push_point(&mut points, bx[0].clone());
            arrow_uses.push((arc.arrow, 1));
            box_from_start(bx, sb, &to.point, &mut points);
        }
        (CompRef::Boxed { box_idx, seg: sa }, CompRef::Gamma { seg: sb }) => {
            let arc = arrow_for_box(ps, box_idx);
            let bx = &ps.scene.boxes[box_idx].pts;
            box_to_end(bx, sa, &from.point, &mut points);
            push_point(&mut points, g[arc.gamma_vertex].clone());
            arrow_uses.push((arc.arrow, -1));
            gamma_from_vertex(g, arc.gamma_vertex, sb, &to.point, &mut points);
        }
        (CompRef::Boxed { box_idx: ba, seg: sa }, CompRef::Boxed { box_idx: bb, seg: sb }) => {
            if ba == bb {
                box_between(&ps.scene.boxes[ba].pts, sa, &from.point, sb, &to.point, &mut points);
            } else {
                let arc_a = arrow_for_box(ps, ba);
                let arc_b = arrow_for_box(ps, bb);
                box_to_end(&ps.scene.boxes[ba].pts, sa, &from.point, &mut points);
                let (va, vb) = (arc_a.gamma_vertex, arc_b.gamma_vertex);
                push_point(&mut points, g[va].clone());
                arrow_uses.push((arc_a.arrow, -1));
                gamma_vertex_to_vertex(g, va, vb, &mut points);
                arrow_uses.push((arc_b.arrow, 1));
                box_from_start(&ps.scene.boxes[bb].pts, sb, &to.point, &mut points);
            }
        }
    }
    Trace { points, arrow_uses }
}

/// The terms of the grading formula for the bigon from `ints[i]` to
/// `ints[j]`: `(wind, rot_quarters, arrow_uses)`.
fn trace_terms(ps: &PairingScene, i: usize, j: usize) -> Result<(i64, i64, Vec<(usize, i64)>)> {
    let from = &ps.ints[i];
    let to = &ps.ints[j];
    let trace = build_trace(ps, from, to);
    let pts = &trace.points;
    assert!(pts.len() >= 2, "degenerate trace");

    // Winding: close the curve path with the line chord (implicit edge).
    let (mut xmin, mut xmax) = (pts[0].x.clone(), pts[0].x.clone());
    let (mut ymin, mut ymax) = (pts[0].y.clone(), pts[0].y.clone());
    for p in pts.iter() {
        if p.x < xmin {
            xmin = p.x.clone();
        }
        if p.x > xmax {
            xmax = p.x.clone();
        }
        if p.y < ymin {
            ymin = p.y.clone();
        }
        if p.y > ymax {
            ymax = p.y.clone();
        }
    }
    let mut wind = 0i64;
    for peg in ps.scene.pegs_in(&xmin, &xmax, &ymin, &ymax) {
        wind += winding_number(pts, &peg);
    }

    // Rotation of the curve-side chain with idealized right corners.
    let dirs: Vec<Vec2<Rat>> = pts.windows(2).map(|w| w[1].sub(&w[0])).collect();
    let d_line = from.point.sub(&to.point);
    let k_line: i64 = if crate::geom::dot(&d_line, &ps.line.dir).is_positive() { 0 } else { 2 };
    let s_start = sign_or_err(crate::geom::cross(&d_line, &dirs[0]), "line tangent to curve at trace start")?;
    let s_end = sign_or_err(
        crate::geom::cross(dirs.last().unwrap(), &d_line),
        "line tangent to curve at trace end",
    )?;
    let k_start = (k_line + s_start).rem_euclid(4) as u8;
    let k_end = (k_line - s_end).rem_euclid(4) as u8;
    let rot_q =
        chain_rotation_quarters(&ps.line.dir, k_start, &dirs, k_end, &rotation_reference());
    Ok((wind, rot_q, trace.arrow_uses))
}

fn sign_or_err(v: Rat, msg: &str) -> Result<i64> {
    if v.is_positive() {
        Ok(1)
    } else if v.is_negative() {
        Ok(-1)
    } else {
        Err(Error::Inconsistent(msg.into()))
    }
}

/// `M(ints[j]) - M(ints[i])` for two intersections on the same component,
/// from the bigon trace between them.
fn same_component_value(ps: &PairingScene, i: usize, j: usize) -> Result<i64> {
    let (wind, rot_q, uses) = trace_terms(ps, i, j)?;
    if !uses.is_empty() {
        return Err(Error::Inconsistent("same-component bigon must not traverse arrows".into()));
    }
    let doubled = 4 * wind - rot_q;
    if doubled % 2 != 0 {
        return Err(Error::Inconsistent(format!(
            "half-integral grading difference: wind={wind} rot_q={rot_q}"
        )));
    }
    Ok(doubled / 2)
}

/// `M(ints[j]) - M(ints[i])` for a bigon from a gamma crossing to a box
/// crossing: `2 Wind(P) + (2 Wght - 2 Rot)(P)`, where the non-winding part
/// is the arrow's calibrated transfer constant. Bigons between a gamma
/// intersection and a fixed generator of one figure-eight all share it
/// (they traverse the same arrow and tilt onto the canonical meridian
/// bigon), so only the winding varies with the pairing line.
fn cross_component_value(ps: &PairingScene, i: usize, j: usize) -> Result<i64> {
    let (from, to) = (&ps.ints[i], &ps.ints[j]);
    let CompRef::Boxed { box_idx, .. } = to.comp else {
        return Err(Error::Inconsistent("cross edge must point from gamma to a box".into()));
    };
    let trace = build_trace(ps, from, to);
    let (mut xmin, mut xmax) = (trace.points[0].x.clone(), trace.points[0].x.clone());
    let (mut ymin, mut ymax) = (trace.points[0].y.clone(), trace.points[0].y.clone());
    for p in &trace.points {
        if p.x < xmin {
            xmin = p.x.clone();
        }
        if p.x > xmax {
            xmax = p.x.clone();
        }
        if p.y < ymin {
            ymin = p.y.clone();
        }
        if p.y > ymax {
            ymax = p.y.clone();
        }
    }
    let mut wind = 0i64;
    for peg in ps.scene.pegs_in(&xmin, &xmax, &ymin, &ymax) {
        wind += winding_number(&trace.points, &peg);
    }
    let arrow = ps.scene.boxes[box_idx].arrow;
    let k = ps.scene.arrows[arrow].cross_term.ok_or_else(|| {
        Error::Inconsistent("grading query on an uncalibrated multicurve".into())
    })?;
    Ok(2 * wind + k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GradingEdge {
    /// Consecutive crossings along one component.
    Component(usize, usize),
    /// Canonical bigon from a gamma crossing to a box generator.
    Cross(usize, usize),
}

impl GradingEdge {
    fn ends(&self) -> (usize, usize) {
        match *self {
            GradingEdge::Component(i, j) | GradingEdge::Cross(i, j) => (i, j),
        }
    }
}

fn edge_value(ps: &PairingScene, e: &GradingEdge) -> Result<i64> {
    match *e {
        GradingEdge::Component(i, j) => same_component_value(ps, i, j),
        GradingEdge::Cross(i, j) => cross_component_value(ps, i, j),
    }
}

/// Grading edges: every component contributes its consecutive-crossing arcs
/// (those bigons are clean by construction), and each figure-eight is glued
/// to the rest by one canonical cross bigon from a gamma crossing to its
/// distinguished generator - the right waist crossing when the line meets
/// the waist, the top generator on the meridian. The cyclic wrap arcs come
/// back as consistency edges: relative gradings must close over them.
fn grading_edges(ps: &PairingScene) -> Result<(Vec<GradingEdge>, Vec<GradingEdge>)> {
    let n = ps.ints.len();
    let mut spanning = Vec::new();
    let mut checks = Vec::new();

    // Order the gamma crossings along the curve.
    let mut on_gamma: Vec<usize> = (0..n).filter(|&i| ps.ints[i].is_gamma()).collect();
    on_gamma.sort_by(|&a, &b| {
        let (CompRef::Gamma { seg: sa }, CompRef::Gamma { seg: sb }) = (ps.ints[a].comp, ps.ints[b].comp)
        else {
            unreachable!()
        };
        sa.cmp(&sb).then_with(|| {
            let (pa, pb) = (ps.scene.gamma_segment(sa), ps.scene.gamma_segment(sb));
            seg_param(pa.0, pa.1, &ps.ints[a].point).cmp(&seg_param(pb.0, pb.1, &ps.ints[b].point))
        })
    });
    for w in on_gamma.windows(2) {
        spanning.push(GradingEdge::Component(w[0], w[1]));
    }
    if on_gamma.is_empty() {
        return Err(Error::Inconsistent("pairing line misses the essential component".into()));
    }

    // Each box: cyclic consecutive arcs plus the canonical bridge.
    let mut per_box: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, ix) in ps.ints.iter().enumerate() {
        if let CompRef::Boxed { box_idx, .. } = ix.comp {
            per_box.entry(box_idx).or_default().push(i);
        }
    }
    for (box_idx, mut members) in per_box {
        members.sort_by(|&a, &b| {
            let (CompRef::Boxed { seg: sa, .. }, CompRef::Boxed { seg: sb, .. }) =
                (ps.ints[a].comp, ps.ints[b].comp)
            else {
                unreachable!()
            };
            let pts = &ps.scene.boxes[box_idx].pts;
            let m = pts.len();
            sa.cmp(&sb).then_with(|| {
                seg_param(&pts[sa], &pts[(sa + 1) % m], &ps.ints[a].point)
                    .cmp(&seg_param(&pts[sb], &pts[(sb + 1) % m], &ps.ints[b].point))
            })
        });
        for w in members.windows(2) {
            spanning.push(GradingEdge::Component(w[0], w[1]));
        }
        if members.len() > 2 {
            checks.push(GradingEdge::Component(*members.last().unwrap(), members[0]));
        }
        let canon = canonical_box_generator(ps, &members)?;
        spanning.push(GradingEdge::Cross(on_gamma[0], canon));
        let _ = box_idx;
    }
    Ok((spanning, checks))
}

/// The crossing playing the role of the distinguished generator: the right
/// waist crossing (`y^n`) when present, otherwise the top generator met by
/// the meridian.
fn canonical_box_generator(ps: &PairingScene, members: &[usize]) -> Result<usize> {
    if let Some(&y) = members.iter().find(|&&i| ps.ints[i].kind == IxKind::BoxRight) {
        return Ok(y);
    }
    members
        .iter()
        .copied()
        .max_by(|&a, &b| ps.ints[a].point.y.cmp(&ps.ints[b].point.y))
        .ok_or_else(|| Error::Inconsistent("box met by the line but has no crossings".into()))
}

/// Relative gradings of every intersection, anchored so `ints[anchor] = 0`.
///
/// Assembled over the grading-edge graph and verified against every
/// consistency edge: a closure failure means the grading conventions are
/// broken, never a property of the input.
pub fn m_rel_anchored(ps: &PairingScene, anchor: usize) -> Result<Vec<i64>> {
    let n = ps.ints.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (spanning, checks) = grading_edges(ps)?;
    let mut rel: Vec<Option<i64>> = vec![None; n];
    rel[anchor] = Some(0);
    let mut progress = true;
    while progress {
        progress = false;
        for e in &spanning {
            let (i, j) = e.ends();
            match (rel[i], rel[j]) {
                (Some(vi), None) => {
                    rel[j] = Some(vi + edge_value(ps, e)?);
                    progress = true;
                }
                (None, Some(vj)) => {
                    rel[i] = Some(vj - edge_value(ps, e)?);
                    progress = true;
                }
                _ => {}
            }
        }
    }
    let rel: Vec<i64> = rel
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Inconsistent("grading graph is disconnected".into()))?;
    for e in spanning.iter().chain(&checks) {
        let (i, j) = e.ends();
        let d = edge_value(ps, e)?;
        if rel[j] - rel[i] != d {
            return Err(Error::Inconsistent(format!(
                "grading cycle fails to close between intersections {i} and {j}: edge {d}, chain {}",
                rel[j] - rel[i]
            )));
        }
    }
    Ok(rel)
}

/// `M(x) - M(y)` for two intersections of the same pairing scene.
pub fn bigon_grading(ps: &PairingScene, x: &IntersectionPoint, y: &IntersectionPoint) -> Result<i64> {
    let find = |p: &IntersectionPoint| {
        ps.ints
            .iter()
            .position(|q| q == p)
            .ok_or_else(|| Error::Invalid("intersection does not belong to this pairing".into()))
    };
    let (ix, iy) = (find(x)?, find(y)?);
    let rel = m_rel_anchored(ps, iy)?;
    Ok(rel[ix])
}

/// Index of the reference intersection `a^s` per the labeling scheme.
pub fn reference_index(ps: &PairingScene) -> Result<usize> {
    let tau = ps.scene.desc.tau;
    let s = ps.spin_c;
    let eta = &ps.scene.eta;
    if tau >= 0 {
        if tau > 0 && s.abs() < tau {
            return ps
                .ints
                .iter()
                .position(|ix| ix.kind == IxKind::VerticalGamma && ix.column == 0)
                .ok_or_else(|| Error::Inconsistent(format!("no vertical reference for [{s}]")));
        }
        let gammas: Vec<usize> =
            (0..ps.ints.len()).filter(|&i| ps.ints[i].is_gamma()).collect();
        if gammas.len() != 1 {
            return Err(Error::Inconsistent(format!(
                "expected a lone gamma crossing for tau={tau}, [s]={s}; found {}",
                gammas.len()
            )));
        }
        return Ok(gammas[0]);
    }
    // tau < 0: the non-vertical crossing immediately left (s >= 0) or right
    // (s < 0) of column 0.
    let candidates: Vec<usize> = (0..ps.ints.len())
        .filter(|&i| {
            let ix = &ps.ints[i];
            ix.is_gamma()
                && if s >= 0 {
                    ix.point.x < -eta.clone()
                } else {
                    ix.point.x > eta.clone()
                }
        })
        .collect();
    let best = if s >= 0 {
        candidates.into_iter().max_by(|&a, &b| ps.ints[a].point.x.cmp(&ps.ints[b].point.x))
    } else {
        candidates.into_iter().min_by(|&a, &b| ps.ints[a].point.x.cmp(&ps.ints[b].point.x))
    };
    best.ok_or_else(|| Error::Inconsistent(format!("no flanking reference for tau={tau}, [s]={s}")))
}

/// The multiset `MR^[s]`: anchored relative gradings of every intersection
/// in the class.
pub fn mr_multiset(curve: &Multicurve, r: i64, s: i64) -> Result<GradedMultiset> {
    let (ms, _) = mr_multiset_with_scene(curve, r, s)?;
    Ok(ms)
}

pub fn mr_multiset_with_scene(curve: &Multicurve, r: i64, s: i64) -> Result<(GradedMultiset, PairingScene)> {
    if !curve.calibrated {
        return Err(Error::Invalid("multicurve must be calibrated before grading queries".into()));
    }
    let ps = enumerate_class(curve, r, s)?;
    let anchor = reference_index(&ps)?;
    let rel = m_rel_anchored(&ps, anchor)?;
    Ok((GradedMultiset::new(rel), ps))
}

/// The column split `MR^[s]_+` / `MR^[s]_-`: entries from intersections in
/// non-negative resp. non-positive columns (column 0 is shared).
///
/// Columns are read off the unperturbed position of each crossing - the
/// intercept perturbation is divided back out - so a wrap crossing sitting
/// nominally mid-gap (the self-conjugate even-slope tie) belongs to both
/// sides. For non-self-conjugate classes `MR^[s]_- = MR^[-s]_+` exactly;
/// the self-conjugate classes are symmetric with a column shift.
pub fn mr_split(curve: &Multicurve, r: i64, s: i64) -> Result<(GradedMultiset, GradedMultiset)> {
    let ps = enumerate_class(curve, r, s)?;
    let anchor = reference_index(&ps)?;
    let rel = m_rel_anchored(&ps, anchor)?;
    let iota = crate::curve_model::surgery_iota(r);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (ix, m) in ps.ints.iter().zip(&rel) {
        let x0 = nominal_x(&ps, ix, &iota);
        let twice = x0 * Rat::from_integer(2);
        if twice.is_integer() && *twice.numer() % 2 != 0 {
            // Exactly mid-gap: shared by both sides.
            plus.push(*m);
            minus.push(*m);
        } else if x0.round().to_integer() >= 0 {
            plus.push(*m);
            if x0.round().to_integer() == 0 {
                minus.push(*m);
            }
        } else {
            minus.push(*m);
        }
    }
    Ok((GradedMultiset::new(plus), GradedMultiset::new(minus)))
}

/// The crossing's position on the unperturbed line: shifting the intercept
/// by `-iota` moves a crossing with a segment of slope `b` by
/// `iota / (r - b)` along `x` (not at all across vertical segments).
fn nominal_x(ps: &PairingScene, ix: &IntersectionPoint, iota: &Rat) -> Rat {
    let (a, b) = match ix.comp {
        CompRef::Gamma { seg } => ps.scene.gamma_segment(seg),
        CompRef::Boxed { box_idx, seg } => {
            let pts = &ps.scene.boxes[box_idx].pts;
            // Local borrow gymnastics: return endpoints by reference.
            let m = pts.len();
            (&pts[seg], &pts[(seg + 1) % m])
        }
    };
    let dx = b.x.clone() - a.x.clone();
    if dx.is_zero() {
        return ix.point.x.clone();
    }
    let slope = (b.y.clone() - a.y.clone()) / dx;
    let line_slope = ps.line.dir.y.clone() / ps.line.dir.x.clone();
    ix.point.x.clone() + iota.clone() / (line_slope - slope)
}

/// Per-class MR multisets for the whole surgery.
pub fn mr_table(curve: &Multicurve, r: i64) -> Result<BTreeMap<i64, GradedMultiset>> {
    crate::pairing::spin_c_representatives(r)
        .into_iter()
        .map(|s| mr_multiset(curve, r, s).map(|m| (s, m)))
        .collect()
}

/// One arrow's calibrated data: the transfer constant `2 Wght - 2 Rot` of
/// its canonical bigon, and the equivalent integral edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolvedArrow {
    pub arrow: usize,
    pub weight: i64,
    pub cross_term: i64,
}

/// Calibrate every arrow from the meridian pairing.
///
/// The canonical bigon runs from the reference crossing `a^{-tau}` (the
/// last crossing before the wrap) to the box's top generator (Alexander
/// grading `n + 1`). Thinness forces its grading difference to equal the
/// Alexander difference, which pins the non-winding part
/// `K = 2 Wght - 2 Rot` of the bigon; by the tilting argument the same
/// constant governs every bigon from a gamma intersection to the box's
/// distinguished generator in every pairing, with only the winding varying.
/// The integral weight is the arrow's share of `K` under the convention
/// that the canonical bigon's rotation is `0` or `-1/2`.
pub fn solve_arrow_weights(curve: &Multicurve) -> Result<Vec<SolvedArrow>> {
    let mut ps = crate::pairing::meridian_scene(curve);
    let grading = |ix: &IntersectionPoint| ix.point.y.round().to_integer();
    let a_ref = ps
        .ints
        .iter()
        .position(|ix| ix.is_gamma() && grading(ix) == -curve.desc.tau)
        .ok_or_else(|| Error::Inconsistent("calibration reference crossing not found".into()))?;

    let mut out = Vec::new();
    for arrow_idx in 0..curve.arrows.len() {
        let members: Vec<usize> = (0..ps.ints.len())
            .filter(|&i| match ps.ints[i].comp {
                CompRef::Boxed { box_idx, .. } => ps.scene.boxes[box_idx].arrow == arrow_idx,
                _ => false,
            })
            .collect();
        let top = members
            .iter()
            .copied()
            .max_by(|&a, &b| ps.ints[a].point.y.cmp(&ps.ints[b].point.y))
            .ok_or_else(|| {
                Error::Inconsistent(format!(
                    "arrow {arrow_idx}: its box is never met by the meridian"
                ))
            })?;
        let want = grading(&ps.ints[top]) - grading(&ps.ints[a_ref]);
        let trace = build_trace(&ps, &ps.ints[a_ref], &ps.ints[top]);
        if trace.arrow_uses.len() != 1 || trace.arrow_uses[0] != (arrow_idx, 1) {
            return Err(Error::Inconsistent(
                "canonical calibration bigon must traverse exactly its own arrow".into(),
            ));
        }
        let (mut xmin, mut xmax) = (trace.points[0].x.clone(), trace.points[0].x.clone());
        let (mut ymin, mut ymax) = (trace.points[0].y.clone(), trace.points[0].y.clone());
        for p in &trace.points {
            if p.x < xmin {
                xmin = p.x.clone();
            }
            if p.x > xmax {
                xmax = p.x.clone();
            }
            if p.y < ymin {
                ymin = p.y.clone();
            }
            if p.y > ymax {
                ymax = p.y.clone();
            }
        }
        let mut wind = 0i64;
        for peg in ps.scene.pegs_in(&xmin, &xmax, &ymin, &ymax) {
            wind += winding_number(&trace.points, &peg);
        }
        let cross_term = want - 2 * wind;
        let weight = cross_term.div_euclid(2);
        ps.scene.arrows[arrow_idx].cross_term = Some(cross_term);
        ps.scene.arrows[arrow_idx].weight = Some(weight);
        out.push(SolvedArrow { arrow: arrow_idx, weight, cross_term });
    }

    // Whole-scene validation: the calibrated meridian pairing must be
    // delta-constant, which exercises the component chains, every box's
    // internal gradings and the relative placement of distinct boxes.
    let rel = m_rel_anchored(&ps, 0)?;
    let base = grading(&ps.ints[0]);
    for (i, r) in rel.iter().enumerate() {
        if *r != grading(&ps.ints[i]) - base {
            return Err(Error::Inconsistent(format!(
                "calibrated meridian pairing is not delta-constant at intersection {i}: \
                 grading {r}, Alexander offset {}",
                grading(&ps.ints[i]) - base
            )));
        }
    }
    Ok(out)
}
