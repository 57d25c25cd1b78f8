//! Acceptance suite: every criterion of the build contract, each printing a
//! pass line with its measured time (run with `-- --nocapture` to see them).
//!
//! Criteria:
//! 1. figure-eight grading anchor `MR^[0] = {-1, 0, 0}` at slope 1;
//! 2. geometric = mapping-cone dimensions for every bundled knot and slope;
//! 3. lens-space d-invariant recursion vs closed form, `r <= 200`;
//! 4. thin V/H laws over `|tau| <= 20, |s| <= 40`;
//! 5. bigon gradings reproduce the closed forms on a synthetic sweep;
//! 6. involution / conjugation / meridian symmetries;
//! 7. Theorem-1.2 regression on the bundled corpus;
//! 8. lemma replay on the synthetic sweep, zero divergences.

use std::time::Instant;

use floercable::cli_io::{load_default_table, run};
use floercable::curve_model::{for_descriptor, involution_invariant, pair_with_meridian};
use floercable::dinvariants::{lens_d, lens_d_closed_form};
use floercable::gradings::{htilde, mr_multiset, mr_table, translation_iso};
use floercable::knot_data::{hfk_dimensions, thin_v, thin_vh, ThinKnotDescriptor};
use floercable::obstruction::{
    candidate_slopes, classify_slope, lemma_replay, DStage, Outcome,
};
use floercable::pairing::{
    conjugate_class, enumerate_class, spin_c_representatives, surgery_dimensions, IxKind,
};

fn bundled_descriptors() -> Vec<ThinKnotDescriptor> {
    load_default_table()
        .expect("bundled table parses")
        .iter()
        .map(|row| row.descriptor().expect("bundled rows are thin-consistent"))
        .collect()
}

/// Deterministic descriptor sweep: all staircases plus seeded box patterns.
fn synthetic_sweep(max_genus: i64, per_tau: usize) -> Vec<ThinKnotDescriptor> {
    let mut out = Vec::new();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for g in 1..=max_genus {
        for tau in -g..=g {
            if tau.abs() == g {
                if let Ok(d) = ThinKnotDescriptor::new(g, tau, vec![0; g as usize], None) {
                    out.push(d);
                }
            }
            let mut made = 0;
            let mut attempts = 0;
            while made < per_tau && attempts < 40 {
                attempts += 1;
                let mut boxes = vec![0i64; g as usize];
                let total = 1 + (next() % 4) as i64;
                for _ in 0..total {
                    let idx = (next() % g as u64) as usize;
                    boxes[idx] += 1;
                }
                if tau.abs() < g {
                    boxes[(g - 1) as usize] = boxes[(g - 1) as usize].max(1);
                }
                if let Ok(d) = ThinKnotDescriptor::new(g, tau, boxes, None) {
                    if !out.contains(&d) {
                        out.push(d);
                        made += 1;
                    }
                }
            }
        }
    }
    out
}

#[test]
fn criterion_1_figure_eight_grading_anchor() {
    let t0 = Instant::now();
    let (code, out) = run(&[
        "floercable".into(),
        "mr".into(),
        "--name".into(),
        "4_1".into(),
        "-r".into(),
        "1".into(),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[0]: {-1,0,0}"), "got {out:?}");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}");
    println!("criterion 1 PASS: 4_1 MR^[0] = {{-1,0,0}} at r=1 ({dt:?})");
}

#[test]
fn criterion_2_oracle_equivalence_bundled_corpus() {
    let t0 = Instant::now();
    let descs = bundled_descriptors();
    assert!(descs.len() >= 12, "bundled corpus has {} knots", descs.len());
    let mut pairs = 0;
    for d in &descs {
        for state in [d.clone(), d.mirror()] {
            let curve = for_descriptor(&state).unwrap();
            for r in 1..=(2 * state.genus + 3).max(2) {
                // surgery_dimensions hard-fails on any geometry/cone mismatch.
                surgery_dimensions(&curve, r)
                    .unwrap_or_else(|e| panic!("{:?} r={r}: {e}", state.name));
                pairs += 1;
            }
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    println!(
        "criterion 2 PASS: {} knots x slopes ({pairs} pairs), geometry = mapping cone ({dt:?})",
        descs.len()
    );
}

#[test]
fn criterion_3_lens_d_invariants() {
    let t0 = Instant::now();
    for r in 1..=200 {
        for s in 0..r {
            assert_eq!(
                lens_d(r, 1, s).unwrap(),
                lens_d_closed_form(r, s),
                "r={r} s={s}"
            );
        }
    }
    let dt = t0.elapsed();
    println!("criterion 3 PASS: lens recursion = closed form for r <= 200 ({dt:?})");
}

#[test]
fn criterion_4_thin_vh_laws() {
    let t0 = Instant::now();
    for tau in -20..=20 {
        for s in -40..=40 {
            let (v, h) = thin_vh(tau, s);
            assert!(v >= 0 && h >= 0);
            assert_eq!(h - v, s, "H-V law at tau={tau} s={s}");
            assert!(thin_v(tau, s) >= thin_v(tau, s + 1), "V monotone at tau={tau} s={s}");
            assert!(
                thin_vh(tau, s).1 <= thin_vh(tau, s + 1).1,
                "H monotone at tau={tau} s={s}"
            );
        }
        if tau >= 0 {
            assert_eq!(thin_v(tau, 0) + thin_v(tau, 1), tau, "tau = V0+V1 at {tau}");
        }
    }
    let dt = t0.elapsed();
    println!("criterion 4 PASS: V/H laws over |tau|<=20, |s|<=40 ({dt:?})");
}

#[test]
fn criterion_5_grading_closed_forms() {
    let t0 = Instant::now();
    let sweep = synthetic_sweep(10, 2);
    assert!(sweep.len() >= 200, "sweep has {} cases", sweep.len());
    let mut lemma_checks = 0u64;
    let mut bound_checks = 0u64;
    for d in &sweep {
        let curve = for_descriptor(d).unwrap();
        let slopes = [2, (2 * d.genus - 1).max(2), d.genus.max(2)];
        for &r in slopes.iter().take(2).chain(slopes.iter().skip(2).take(1)) {
            for s in spin_c_representatives(r) {
                let ps = enumerate_class(&curve, r, s).unwrap();
                let anchor = floercable::gradings::reference_index(&ps).unwrap();
                let rel = floercable::gradings::m_rel_anchored(&ps, anchor).unwrap();
                for (ix, m) in ps.ints.iter().zip(&rel) {
                    let (Some(n), col) = (ix.box_height, ix.column) else { continue };
                    // The winding formula indexes boxes by the natural
                    // number n = s + (col) r >= 0 in non-negative columns.
                    if d.tau >= 0 && ix.kind == IxKind::BoxRight && col >= 0 && n >= 0 {
                        // Lemma "2Wght - 2Rot = -1 - tau - |n|" combined with
                        // the winding formula Wind = Htilde_s + sum (s + ir).
                        let wind: i64 = htilde(d.tau, s).unwrap()
                            + (1..=col).map(|i| s + i * r).sum::<i64>();
                        let extracted = m - 2 * wind;
                        assert_eq!(
                            extracted,
                            -1 - d.tau - n.abs(),
                            "{d:?} r={r} s={s} col={col} n={n}"
                        );
                        lemma_checks += 1;
                    }
                    // Close-generator bounds for boxes inside the tau band.
                    if n.abs() < d.tau.abs() {
                        let a = ps
                            .ints
                            .iter()
                            .zip(&rel)
                            .find(|(jx, _)| {
                                jx.kind == IxKind::VerticalGamma
                                    && jx.column == col
                                    && jx.point.y.round().to_integer() == n
                            })
                            .map(|(_, v)| *v)
                            .expect("nearby vertical generator");
                        match ix.kind {
                            IxKind::BoxRight => {
                                assert!((-1..=0).contains(&(m - a)), "{d:?} r={r} s={s} n={n}");
                                bound_checks += 1;
                            }
                            IxKind::BoxLeft => {
                                assert!((0..=1).contains(&(m - a)), "{d:?} r={r} s={s} n={n}");
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    assert!(lemma_checks > 200, "only {lemma_checks} lemma instances");
    let dt = t0.elapsed();
    println!(
        "criterion 5 PASS: {} cases, {lemma_checks} lemma + {bound_checks} bound checks, \
         zero violations ({dt:?})",
        sweep.len()
    );
}

#[test]
fn criterion_6_symmetries() {
    let t0 = Instant::now();
    let mut sweep = synthetic_sweep(6, 1);
    sweep.extend(bundled_descriptors());
    for d in &sweep {
        assert!(
            involution_invariant(&floercable::curve_model::build_multicurve(d)),
            "involution fails for {d:?}"
        );
    }
    for d in sweep.iter().take(60) {
        let curve = for_descriptor(d).unwrap();
        for r in [2, (2 * d.genus - 1).max(2)] {
            let table = mr_table(&curve, r).unwrap();
            for (s, m) in &table {
                assert!(
                    translation_iso(m, &table[&conjugate_class(r, *s)]),
                    "conjugation fails for {d:?} r={r} s={s}"
                );
            }
        }
    }
    for d in bundled_descriptors() {
        let curve = for_descriptor(&d).unwrap();
        let pairing = pair_with_meridian(&curve).unwrap();
        let hfk = hfk_dimensions(&d);
        for (a, dim) in &hfk {
            assert_eq!(pairing[a].0, *dim, "{:?} A={a}", d.name);
        }
        let mut delta = None;
        for (a, (_, grades)) in &pairing {
            for g in grades {
                match delta {
                    None => delta = Some(a - g),
                    Some(d0) => assert_eq!(a - g, d0, "{:?}", d.name),
                }
            }
        }
    }
    let dt = t0.elapsed();
    println!("criterion 6 PASS: involution, conjugation and meridian symmetries ({dt:?})");
}

#[test]
fn criterion_7_theorem_regression() {
    let t0 = Instant::now();
    let table = load_default_table().unwrap();
    for row in &table {
        let desc = row.descriptor().unwrap();
        let state = if desc.tau < 0 { desc.mirror() } else { desc.clone() };
        let torus = matches!(
            row.name.as_str(),
            "3_1" | "5_1" | "7_1" | "T2_3" | "T2_5" | "T2_7" | "T2_9" | "T2_11"
        );
        for r in candidate_slopes(&state) {
            let v = classify_slope(&state, r).unwrap();
            if torus && r == 2 * state.genus - 1 {
                match v.outcome {
                    Outcome::Survives { lspace, .. } => {
                        assert!(lspace, "{} r={r} must be flagged L-space", row.name)
                    }
                    ref o => panic!("{} r={r}: expected survival, got {o:?}", row.name),
                }
            } else {
                assert_eq!(
                    v.outcome,
                    Outcome::Obstructed,
                    "{} r={r} must be obstructed",
                    row.name
                );
            }
        }
    }
    // T(2,7) at r = 3 dies specifically by the V_0 != V_1 stage.
    let t27 = ThinKnotDescriptor::new(3, 3, vec![0, 0, 0], None).unwrap();
    let v = classify_slope(&t27, 3).unwrap();
    assert_eq!(v.outcome, Outcome::Obstructed);
    let rep = v.reports.iter().find(|rep| rep.k == 1).unwrap();
    match rep.d_stage {
        DStage::HomologySphere { v0, v1, v_equal, .. } => {
            assert_eq!((v0, v1), (2, 1));
            assert!(!v_equal && !rep.d_pass);
        }
        ref o => panic!("expected the homology-sphere stage, got {o:?}"),
    }
    let dt = t0.elapsed();
    println!("criterion 7 PASS: bundled corpus reproduces the main theorem ({dt:?})");
}

#[test]
fn criterion_8_lemma_replay() {
    let t0 = Instant::now();
    let sweep = synthetic_sweep(8, 1);
    let mut replays = 0u64;
    for d in &sweep {
        for r in candidate_slopes(d) {
            let report = lemma_replay(d, r).unwrap_or_else(|e| panic!("{d:?} r={r}: {e}"));
            assert!(
                report.clean(),
                "{d:?} r={r} cell {:?} diverges: {:?}",
                report.cell,
                report.divergences
            );
            replays += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "took {dt:?}");
    println!("criterion 8 PASS: {replays} lemma replays, zero divergences ({dt:?})");
}
