//! Command-line front end: knot-table ingestion, report serialization and
//! figure rendering.
//!
//! Subcommands: `analyze`, `surgery`, `mr`, `dinv`, `obstruct`, `scan`,
//! `render`. Knots come from the bundled table (`--name`), an external table
//! (`FLOER_CABLE_TABLE` or `scan --table`), or inline `--alex`/`--sigma`.
//! Exit codes: 1 usage, 2 validation, 3 internal consistency failure (a
//! geometry/oracle mismatch - always a bug).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dinvariants::{lens_d_table, surgery_d_table};
use crate::gradings::mr_table;
use crate::knot_data::{derive_thin_descriptor, hfk_dimensions, AlexanderData, ThinKnotDescriptor};
use crate::obstruction::{classify_all, Outcome, Verdict};
use crate::pairing::{spin_c_representatives, surgery_dimensions};
use crate::surgery_oracle::{build_hat_cone, cone_dimensions};
use crate::{Error, Rat, Result};

pub use crate::render::render_svg;

const BUNDLED_TABLE: &str = include_str!("bundled_knots.csv");

/// One row of a knot table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotTableRow {
    pub name: String,
    /// Alexander coefficients, lowest to highest degree.
    pub alexander: Vec<i64>,
    pub signature: i64,
}

impl KnotTableRow {
    pub fn alexander_data(&self) -> Result<AlexanderData> {
        AlexanderData::from_coeff_list(&self.alexander, self.signature, Some(self.name.clone()))
    }
    pub fn descriptor(&self) -> Result<ThinKnotDescriptor> {
        derive_thin_descriptor(&self.alexander_data()?)
    }
}

/// Parse a `name,alexander,signature` CSV with line diagnostics. The
/// alexander field is space-separated integers, optionally double-quoted.
pub fn parse_knot_table(input: &str) -> Result<Vec<KnotTableRow>> {
    let mut rows = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if lineno == 0 && line.eq_ignore_ascii_case("name,alexander,signature") {
            continue;
        }
        let fields = split_csv_line(line)
            .map_err(|e| Error::Invalid(format!("line {}: {e}", lineno + 1)))?;
        if fields.len() != 3 {
            return Err(Error::Invalid(format!(
                "line {}: expected 3 fields, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let name = fields[0].trim().to_string();
        if name.is_empty() {
            return Err(Error::Invalid(format!("line {}: empty knot name", lineno + 1)));
        }
        if !seen.insert(name.clone()) {
            return Err(Error::Invalid(format!("line {}: duplicate knot name {name}", lineno + 1)));
        }
        let alexander = fields[1]
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| format!("bad coefficient {t:?}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Invalid(format!("line {}: {e}", lineno + 1)))?;
        let signature = fields[2]
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Invalid(format!("line {}: bad signature {:?}", lineno + 1, fields[2])))?;
        let row = KnotTableRow { name, alexander, signature };
        // Validate eagerly so table typos surface with their line number.
        row.alexander_data().map_err(|e| Error::Invalid(format!("line {}: {e}", lineno + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

fn split_csv_line(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    for ch in line.chars() {
        match ch {
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => {
                fields.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    if in_quotes {
        return Err("unterminated quote".into());
    }
    fields.push(cur);
    Ok(fields)
}

/// The bundled table, or the `FLOER_CABLE_TABLE` override.
pub fn load_default_table() -> Result<Vec<KnotTableRow>> {
    match std::env::var("FLOER_CABLE_TABLE") {
        Ok(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Invalid(format!("cannot read table {path}: {e}")))?;
            parse_knot_table(&text)
        }
        Err(_) => parse_knot_table(BUNDLED_TABLE),
    }
}

#[derive(Parser, Debug)]
#[command(name = "floercable", version, about = "Immersed-curve surgery obstructions for thin knots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct KnotArgs {
    /// Knot name from the bundled (or overridden) table.
    #[arg(long)]
    name: Option<String>,
    /// Alexander coefficients, lowest to highest, space separated.
    #[arg(long, allow_hyphen_values = true)]
    alex: Option<String>,
    /// Signature (required with --alex).
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the thin-knot descriptor.
    Analyze {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long)]
        json: bool,
    },
    /// Per-spin^c dimensions of r-surgery (geometry and oracle side by side).
    Surgery {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(short)]
        r: i64,
        #[arg(long)]
        json: bool,
    },
    /// Relative Maslov grading multisets MR^[s] of r-surgery.
    Mr {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(short)]
        r: i64,
        #[arg(long)]
        json: bool,
    },
    /// d-invariants: of r-surgery on a knot, or of a lens space L(p, q).
    Dinv {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(short)]
        r: Option<i64>,
        /// Lens space parameters p q.
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        lens: Option<Vec<i64>>,
        #[arg(long)]
        json: bool,
    },
    /// Verdicts for every candidate reducing slope, both mirror states.
    Obstruct {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long)]
        json: bool,
    },
    /// Batch-process a CSV knot table into a JSON report.
    Scan {
        #[arg(long)]
        table: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Render the multicurve (optionally with surgery lines) as SVG.
    Render {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(short)]
        r: Option<i64>,
        #[arg(long)]
        out: Option<String>,
    },
}

fn resolve_knot(args: &KnotArgs) -> Result<ThinKnotDescriptor> {
    match (&args.name, &args.alex) {
        (Some(name), None) => {
            let table = load_default_table()?;
            let row = table
                .iter()
                .find(|r| r.name == *name)
                .ok_or_else(|| Error::Invalid(format!("unknown knot {name}")))?;
            row.descriptor()
        }
        (None, Some(alex)) => {
            let sigma = args
                .sigma
                .ok_or_else(|| Error::Invalid("--alex requires --sigma".into()))?;
            let coeffs = alex
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| Error::Invalid(format!("bad coefficient {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            derive_thin_descriptor(&AlexanderData::from_coeff_list(&coeffs, sigma, None)?)
        }
        _ => Err(Error::Invalid("give exactly one of --name or --alex/--sigma".into())),
    }
}

fn rat_str(v: &Rat) -> String {
    if v.is_integer() {
        format!("{}", v.numer())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn multiset_str(entries: &[i64]) -> String {
    let inner: Vec<String> = entries.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn descriptor_json(desc: &ThinKnotDescriptor) -> Value {
    json!({
        "name": desc.name,
        "genus": desc.genus,
        "tau": desc.tau,
        "boxes": desc.boxes,
        "lspace_knot": desc.is_lspace_knot(),
        "hfk": hfk_dimensions(desc).into_iter().map(|(a, d)| json!([a, d])).collect::<Vec<_>>(),
    })
}

/// Parse a descriptor back out of `descriptor_json` output (round-trip).
pub fn descriptor_from_json(v: &Value) -> Result<ThinKnotDescriptor> {
    let get = |k: &str| v.get(k).ok_or_else(|| Error::Invalid(format!("missing field {k}")));
    let genus = get("genus")?.as_i64().ok_or_else(|| Error::Invalid("bad genus".into()))?;
    let tau = get("tau")?.as_i64().ok_or_else(|| Error::Invalid("bad tau".into()))?;
    let boxes = get("boxes")?
        .as_array()
        .ok_or_else(|| Error::Invalid("bad boxes".into()))?
        .iter()
        .map(|b| b.as_i64().ok_or_else(|| Error::Invalid("bad box count".into())))
        .collect::<Result<Vec<_>>>()?;
    let name = v.get("name").and_then(|n| n.as_str()).map(|s| s.to_string());
    ThinKnotDescriptor::new(genus, tau, boxes, name)
}

fn verdict_json(v: &Verdict) -> Value {
    let outcome = match &v.outcome {
        Outcome::NotCandidate => json!({"kind": "not_candidate"}),
        Outcome::Obstructed => json!({"kind": "obstructed"}),
        Outcome::Survives { ks, lspace } => json!({"kind": "survives", "k": ks, "lspace": lspace}),
    };
    let reports: Vec<Value> = v
        .reports
        .iter()
        .map(|rep| {
            json!({
                "k": rep.k,
                "dim_pass": rep.dim_pass,
                "mr_pass": rep.mr_pass,
                "d_pass": rep.d_pass,
                "witnesses": rep.witnesses.len(),
            })
        })
        .collect();
    json!({"r": v.r, "outcome": outcome, "reports": reports})
}

fn verdict_line(v: &Verdict) -> String {
    match &v.outcome {
        Outcome::NotCandidate => format!("r={} NotCandidate", v.r),
        Outcome::Obstructed => format!("r={} Obstructed", v.r),
        Outcome::Survives { ks, lspace } => {
            let tag = if *lspace { ", L-space" } else { "" };
            format!("r={} Survives(k={:?}{tag})", v.r, ks)
        }
    }
}

/// Obstruction scan of one descriptor: the positive-tau state first, then
/// the mirror when the knot is chiral.
fn obstruct_states(desc: &ThinKnotDescriptor) -> Result<Vec<(bool, ThinKnotDescriptor, Vec<Verdict>)>> {
    let primary = if desc.tau < 0 { desc.mirror() } else { desc.clone() };
    let mut states = vec![(false, primary.clone(), classify_all(&primary)?)];
    if primary.tau != 0 {
        let m = primary.mirror();
        states.push((true, m.clone(), classify_all(&m)?));
    }
    Ok(states)
}

fn scan_row(row: &KnotTableRow) -> Value {
    let result = (|| -> Result<Value> {
        let desc = row.descriptor()?;
        let states: Vec<Value> = obstruct_states(&desc)?
            .into_iter()
            .map(|(mirrored, d, verdicts)| {
                json!({
                    "mirrored": mirrored,
                    "tau": d.tau,
                    "verdicts": verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        Ok(json!({
            "name": row.name,
            "descriptor": descriptor_json(&desc),
            "states": states,
        }))
    })();
    match result {
        Ok(v) => v,
        Err(e) => json!({"name": row.name, "error": e.to_string()}),
    }
}

/// Run the CLI on the given argument list; returns `(exit code, output)`.
pub fn run(args: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are successes, usage errors exit 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, e.to_string());
        }
    };
    match dispatch(cli) {
        Ok(out) => (0, out),
        Err(Error::Invalid(m)) => (2, format!("error: invalid input: {m}\n")),
        Err(Error::Inconsistent(m)) => (3, format!("error: internal consistency failure: {m}\n")),
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    let mut out = String::new();
    match cli.command {
        Command::Analyze { knot, json } => {
            let desc = resolve_knot(&knot)?;
            if json {
                let v = json!({"schema": 1, "descriptor": descriptor_json(&desc)});
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
            } else {
                writeln!(out, "{}: genus {} tau {} boxes {:?}{}",
                    desc.name.as_deref().unwrap_or("knot"),
                    desc.genus, desc.tau, desc.boxes,
                    if desc.is_lspace_knot() { " (L-space knot)" } else { "" })
                .unwrap();
                for (a, d) in hfk_dimensions(&desc) {
                    writeln!(out, "  HFK[A={a}] dim {d}").unwrap();
                }
            }
        }
        Command::Surgery { knot, r, json } => {
            let desc = resolve_knot(&knot)?;
            let curve = crate::curve_model::for_descriptor(&desc)?;
            let dims = surgery_dimensions(&curve, r)?;
            let oracle: BTreeMap<i64, i64> = spin_c_representatives(r)
                .into_iter()
                .map(|s| (s, cone_dimensions(&build_hat_cone(&desc, r, s))))
                .collect();
            if json {
                let v = json!({
                    "schema": 1,
                    "r": r,
                    "classes": dims.iter().map(|(s, d)| json!({"s": s, "geometry": d, "oracle": oracle[s]})).collect::<Vec<_>>(),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
            } else {
                writeln!(out, "r = {r}  (geometry | mapping cone)").unwrap();
                for (s, d) in &dims {
                    writeln!(out, "  [{s}]: {d} | {}", oracle[s]).unwrap();
                }
            }
        }
        Command::Mr { knot, r, json } => {
            let desc = resolve_knot(&knot)?;
            let curve = crate::curve_model::for_descriptor(&desc)?;
            let table = mr_table(&curve, r)?;
            if json {
                let v = json!({
                    "schema": 1,
                    "r": r,
                    "mr": table.iter().map(|(s, m)| json!({"s": s, "multiset": m.entries})).collect::<Vec<_>>(),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
            } else {
                for (s, m) in &table {
                    writeln!(out, "[{s}]: {}", multiset_str(&m.entries)).unwrap();
                }
            }
        }
        Command::Dinv { knot, r, lens, json } => {
            if let Some(pq) = lens {
                let (p, q) = (pq[0], pq[1]);
                let table = lens_d_table(p, q)?;
                if json {
                    let v = json!({
                        "schema": 1,
                        "lens": [p, q],
                        "d": table.values.iter().map(|(s, d)| json!({"s": s, "d": rat_str(d)})).collect::<Vec<_>>(),
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
                } else {
                    let vals: Vec<String> = table.values.values().map(rat_str).collect();
                    writeln!(out, "{}", vals.join(", ")).unwrap();
                }
            } else {
                let desc = resolve_knot(&knot)?;
                let r = r.ok_or_else(|| Error::Invalid("dinv needs -r or --lens".into()))?;
                let table = surgery_d_table(&desc, r)?;
                if json {
                    let v = json!({
                        "schema": 1,
                        "r": r,
                        "d": table.values.iter().map(|(s, d)| json!({"s": s, "d": rat_str(d)})).collect::<Vec<_>>(),
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
                } else {
                    for (s, d) in &table.values {
                        writeln!(out, "d[{s}] = {}", rat_str(d)).unwrap();
                    }
                }
            }
        }
        Command::Obstruct { knot, json } => {
            let desc = resolve_knot(&knot)?;
            let states = obstruct_states(&desc)?;
            if json {
                let v = json!({
                    "schema": 1,
                    "descriptor": descriptor_json(&desc),
                    "states": states.iter().map(|(mirrored, d, verdicts)| json!({
                        "mirrored": mirrored,
                        "tau": d.tau,
                        "verdicts": verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
            } else {
                for (mirrored, d, verdicts) in &states {
                    writeln!(out, "{}{} (tau = {}):",
                        d.name.as_deref().unwrap_or("knot"),
                        if *mirrored { " [mirror]" } else { "" },
                        d.tau)
                    .unwrap();
                    if verdicts.is_empty() {
                        writeln!(out, "  no candidate slopes (2g-1 < 2)").unwrap();
                    }
                    for v in verdicts {
                        writeln!(out, "  {}", verdict_line(v)).unwrap();
                    }
                }
            }
        }
        Command::Scan { table, out: out_path } => {
            let text = std::fs::read_to_string(&table)
                .map_err(|e| Error::Invalid(format!("cannot read table {table}: {e}")))?;
            let rows = parse_knot_table(&text)?;
            let results: Vec<Value> = rows.par_iter().map(scan_row).collect();
            let report = json!({"schema": 1, "knots": results});
            let text = serde_json::to_string_pretty(&report).unwrap();
            match out_path {
                Some(p) => {
                    std::fs::write(&p, &text)
                        .map_err(|e| Error::Invalid(format!("cannot write {p}: {e}")))?;
                    writeln!(out, "wrote {} knots to {p}", rows.len()).unwrap();
                }
                None => writeln!(out, "{text}").unwrap(),
            }
        }
        Command::Render { knot, r, out: out_path } => {
            let desc = resolve_knot(&knot)?;
            let svg = crate::render::render_svg(&desc, r)?;
            match out_path {
                Some(p) => {
                    std::fs::write(&p, &svg)
                        .map_err(|e| Error::Invalid(format!("cannot write {p}: {e}")))?;
                    writeln!(out, "wrote {p}").unwrap();
                }
                None => out.push_str(&svg),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_parses_and_derives() {
        let rows = parse_knot_table(BUNDLED_TABLE).unwrap();
        assert!(rows.len() >= 12);
        for row in &rows {
            let d = row.descriptor().unwrap_or_else(|e| panic!("{}: {e}", row.name));
            assert!(d.genus >= 0);
        }
    }

    #[test]
    fn parse_rejects_bad_rows() {
        assert!(parse_knot_table("name,alexander,signature\nbad,\"1 2\",0").is_err());
        assert!(parse_knot_table("a,\"1\",0\na,\"1\",0").is_err());
        assert!(parse_knot_table("x,\"-1 3 -1\",1").is_err());
        assert!(parse_knot_table("x,\"oops\",0").is_err());
    }

    #[test]
    fn parse_example_row() {
        let rows = parse_knot_table("4_1,\"-1 3 -1\",0").unwrap();
        assert_eq!(rows[0].alexander, vec![-1, 3, -1]);
        let d = rows[0].descriptor().unwrap();
        assert_eq!((d.genus, d.tau, d.boxes.clone()), (1, 0, vec![1]));
    }

    #[test]
    fn descriptor_json_round_trip() {
        let rows = parse_knot_table(BUNDLED_TABLE).unwrap();
        for row in rows.iter().take(6) {
            let d = row.descriptor().unwrap();
            let v = descriptor_json(&d);
            let back = descriptor_from_json(&v).unwrap();
            assert_eq!(d, back);
        }
    }

    #[test]
    fn run_analyze_smoke() {
        let (code, out) = run(&["floercable".into(), "analyze".into(), "--name".into(), "4_1".into()]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("genus 1 tau 0"));
    }

    #[test]
    fn run_usage_error_is_exit_one() {
        let (code, _) = run(&["floercable".into(), "bogus".into()]);
        assert_eq!(code, 1);
    }

    #[test]
    fn run_validation_error_is_exit_two() {
        let (code, out) = run(&[
            "floercable".into(),
            "analyze".into(),
            "--name".into(),
            "no_such_knot".into(),
        ]);
        assert_eq!(code, 2, "{out}");
    }
}
