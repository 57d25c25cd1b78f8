//! Exhaustive cross-validation sweep, broader than the test suites: every
//! descriptor with genus <= 5 and small box patterns, every slope up to
//! 2g + 3. Prints one line per violated invariant (geometry vs mapping
//! cone, meridian delta-constancy, MR conjugation/size/width/split laws,
//! box-pair gradings, closed-form bounds) and a final tally.
//!
//! Run with `cargo run --release --example consistency_sweep`.

use floercable::curve_model::{for_descriptor, pair_with_meridian};
use floercable::gradings::{mr_table, translation_iso};
use floercable::knot_data::{hfk_dimensions, ThinKnotDescriptor};

use floercable::pairing::{conjugate_class, surgery_dimensions};

fn main() {
    let mut descs = Vec::new();
    for g in 0..=5i64 {
        for tau in -g..=g {
            // box patterns with small total, must satisfy genus detection
            let heights = g.max(0) as usize;
            let patterns: Vec<Vec<i64>> = match heights {
                0 => vec![vec![]],
                _ => {
                    let mut ps = Vec::new();
                    for total in 0..=3 {
                        gen_patterns(heights, total, &mut vec![], &mut ps);
                    }
                    ps
                }
            };
            for p in patterns {
                if tau.abs() < g && p.last().copied().unwrap_or(0) == 0 { continue; }
                if let Ok(d) = ThinKnotDescriptor::new(g, tau, p, None) {
                    descs.push(d);
                }
            }
        }
    }
    eprintln!("descriptors: {}", descs.len());
    let mut count = 0u64;
    for d in &descs {
        let curve = match for_descriptor(d) {
            Ok(c) => c,
            Err(e) => { println!("CALIBRATION FAIL {d:?}: {e}"); continue; }
        };
        // meridian contract
        let hfk = hfk_dimensions(d);
        match pair_with_meridian(&curve) {
            Ok(m) => {
                for (a, dim) in &hfk {
                    let got = m.get(a).map(|x| x.0).unwrap_or(0);
                    if got != *dim { println!("MERIDIAN DIM FAIL {d:?} A={a}: {got} vs {dim}"); }
                }
                let mut anchor = None;
                for (a, (_, grades)) in &m {
                    for gr in grades {
                        let delta = a - gr;
                        if let Some(d0) = anchor {
                            if delta != d0 { println!("DELTA FAIL {d:?} A={a}"); }
                        } else { anchor = Some(delta); }
                    }
                }
            }
            Err(e) => println!("MERIDIAN FAIL {d:?}: {e}"),
        }
        for r in 1..=(2 * d.genus + 3).max(2) {
            match surgery_dimensions(&curve, r) {
                Ok(dims) => {
                    match mr_table(&curve, r) {
                        Ok(mr) => {
                            for (s, m) in &mr {
                                if m.len() as i64 != dims[s] {
                                    println!("MR SIZE FAIL {d:?} r={r} s={s}");
                                }
                                let cs = conjugate_class(r, *s);
                                if !translation_iso(m, &mr[&cs]) {
                                    println!("MR CONJ FAIL {d:?} r={r} s={s}: {:?} vs {:?}", m.entries, mr[&cs].entries);
                                }
                                // width law and split identity
                                match floercable::gradings::mr_split(&curve, r, *s) {
                                    Ok((plus, minus)) => {
                                        if m.width() != plus.width().max(minus.width()) {
                                            println!("WIDTH FAIL {d:?} r={r} s={s}");
                                        }
                                        if cs != *s {
                                            let (cplus, _) = floercable::gradings::mr_split(&curve, r, cs).unwrap();
                                            if minus.entries != cplus.entries {
                                                println!("SPLIT FAIL {d:?} r={r} s={s}: {:?} vs {:?}", minus.entries, cplus.entries);
                                            }
                                        }
                                    }
                                    Err(e) => println!("SPLIT ERR {d:?} r={r} s={s}: {e}"),
                                }
                                // four-bullet smallest-element classification
                                if let Err(msg) = check_minimizer(&curve, d, r, *s, m) {
                                    println!("MIN FAIL {d:?} r={r} s={s}: {msg}");
                                }
                            }
                            if let Err(msg) = check_box_laws(&curve, d, r) {
                                println!("BOXLAW FAIL {d:?} r={r}: {msg}");
                            }
                        }
                        Err(e) => println!("MR FAIL {d:?} r={r}: {e}"),
                    }
                    count += 1;
                }
                Err(e) => println!("DIM FAIL {d:?} r={r}: {e}"),
            }
        }
    }
    eprintln!("checked {count} (desc, r) pairs");
}

/// The four-bullet classification of the minimizer of MR^[s].
fn check_minimizer(
    _curve: &floercable::curve_model::Multicurve,
    d: &ThinKnotDescriptor,
    _r: i64,
    s: i64,
    m: &floercable::gradings::GradedMultiset,
) -> Result<(), String> {
    let tau = d.tau;
    let min = *m.entries.first().unwrap();
    let expected = if tau >= 0 && s.abs() <= tau && (s - tau).rem_euclid(2) == 0 && d.box_count(s) > 0 {
        -1
    } else {
        0
    };
    if min != expected {
        return Err(format!("expected min {expected}, multiset {:?}", m.entries));
    }
    Ok(())
}

/// Box-pair law M(x^n) - M(y^n) = 1 and close-generator bounds.
fn check_box_laws(
    curve: &floercable::curve_model::Multicurve,
    d: &ThinKnotDescriptor,
    r: i64,
) -> Result<(), String> {
    use floercable::pairing::{enumerate_class, IxKind};
    for s in floercable::pairing::spin_c_representatives(r) {
        let ps = enumerate_class(curve, r, s).map_err(|e| e.to_string())?;
        let anchor = floercable::gradings::reference_index(&ps).map_err(|e| e.to_string())?;
        let rel = floercable::gradings::m_rel_anchored(&ps, anchor).map_err(|e| e.to_string())?;
        let mut per_box: std::collections::BTreeMap<(i64, i64, usize), Vec<(IxKind, i64)>> = Default::default();
        for (ix, m) in ps.ints.iter().zip(&rel) {
            if let (Some(n), Some(c)) = (ix.box_height, ix.box_copy) {
                per_box.entry((ix.column, n, c)).or_default().push((ix.kind, *m));
            }
        }
        for ((col, n, _), kinds) in per_box {
            let x = kinds.iter().find(|(k, _)| *k == IxKind::BoxLeft).unwrap().1;
            let y = kinds.iter().find(|(k, _)| *k == IxKind::BoxRight).unwrap().1;
            if x - y != 1 {
                return Err(format!("M(x)-M(y) = {} at box (col {col}, n {n}), s={s}", x - y));
            }
            // Close-generator bounds against the nearby vertical a^n (the
            // vertical crossing at the same column), when |n| < |tau|.
            if n.abs() < d.tau.abs() {
                let a = ps
                    .ints
                    .iter()
                    .zip(&rel)
                    .find(|(ix, _)| {
                        ix.kind == IxKind::VerticalGamma
                            && ix.column == col
                            && ix.point.y.round().to_integer() == n
                    })
                    .map(|(_, m)| *m)
                    .ok_or_else(|| format!("no vertical a^{n} at col {col}"))?;
                if !(-1 <= y - a && y - a <= 0) {
                    return Err(format!("y-a = {} out of bounds at n={n} col={col}", y - a));
                }
                if !(0 <= x - a && x - a <= 1) {
                    return Err(format!("x-a = {} out of bounds at n={n} col={col}", x - a));
                }
            }
        }
    }
    Ok(())
}

fn gen_patterns(len: usize, total: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if cur.len() == len {
        if total == 0 { out.push(cur.clone()); }
        return;
    }
    for v in 0..=total {
        cur.push(v);
        gen_patterns(len, total - v, cur, out);
        cur.pop();
    }
}
