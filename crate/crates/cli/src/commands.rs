use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qdiscord::exec::{self, Execution};
use qdiscord::families::{fixtures, Family, FamilySpec};
use qdiscord::oracle::{certify_report, minimize_grid_with, CertifyOptions, OracleOptions};
use qdiscord::sampling::ginibre_suite;
use qdiscord::{discord_d1, BlochForm, Branch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::read_entries;
use crate::range::{parse_fixed, parse_range, ParamRange};
use crate::record::{to_csv, ResultRecord};
use crate::{CliError, Format, OracleArgs};

pub const DEFAULT_SEED: u64 = 20_251_018;

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Output(e.to_string()))
}

// States already run in parallel, so each oracle call stays sequential.
fn oracle_value(b: &BlochForm, grid: usize) -> f64 {
    let opts = OracleOptions {
        n_points: grid,
        exec: Execution::Sequential,
        ..OracleOptions::default()
    };
    minimize_grid_with(b, &opts).min_value
}

pub fn compute(
    files: &[PathBuf],
    oracle: &OracleArgs,
    format: Format,
    timing: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut entries = Vec::new();
    let mut input_errors = Vec::new();
    for f in files {
        match read_entries(f) {
            Ok(e) => entries.extend(e),
            Err(e) => input_errors.push(e.to_string()),
        }
    }
    let states: Vec<(String, Result<_, String>)> = entries.into_iter().map(|(id, e)| (id, e.to_state())).collect();

    let records = exec::map(Execution::default(), states.len(), |i| {
        let (id, state) = &states[i];
        let state = state.as_ref().ok()?;
        let start = Instant::now();
        let b = state.bloch();
        let mut rec = ResultRecord::new(id.clone(), &discord_d1(&b));
        if oracle.certify {
            let o = oracle_value(&b, oracle.grid);
            rec.oracle = Some(o);
            rec.deviation = Some((rec.d1 - o).abs());
        }
        if timing {
            rec.wall_time = Some(start.elapsed().as_secs_f64());
        }
        Some(rec)
    });
    for (id, s) in &states {
        if let Err(e) = s {
            input_errors.push(format!("{id}: {e}"));
        }
    }
    let records: Vec<ResultRecord> = records.into_iter().flatten().collect();

    let text = match format {
        Format::Json => json(&records)?,
        Format::Csv => to_csv(&records).map_err(|e| CliError::Output(e.to_string()))?,
    };
    emit(&text, out)?;

    if !input_errors.is_empty() {
        return Err(CliError::Input(input_errors.join("\n")));
    }
    let failed: Vec<String> = records
        .iter()
        .filter(|r| r.deviation.is_some_and(|d| !(d <= oracle.tol)))
        .map(|r| format!("{}: |{} - {}| > {:e}", r.id, r.d1, r.oracle.unwrap_or(f64::NAN), oracle.tol))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Certification(format!("certification failed\n{}", failed.join("\n"))))
    }
}

pub struct SweepArgs {
    pub family: String,
    pub ranges: Vec<String>,
    pub fixed: Vec<String>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub oracle: OracleArgs,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    params: BTreeMap<String, f64>,
    status: String,
    d1: Option<f64>,
    d2: Option<f64>,
    lower_bound: Option<f64>,
    branch: Option<Branch>,
    oracle: Option<f64>,
    deviation: Option<f64>,
}

fn parameter_points(ranges: &[ParamRange], samples: Option<usize>, seed: u64) -> Vec<Vec<f64>> {
    match samples {
        Some(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| ranges.iter().map(|r| rng.random_range(r.lo..=r.hi)).collect())
                .collect()
        }
        None => ranges.iter().fold(vec![Vec::new()], |acc, r| {
            let pts = r.points();
            acc.into_iter()
                .flat_map(|prefix| {
                    pts.iter().map(move |p| {
                        let mut v = prefix.clone();
                        v.push(*p);
                        v
                    })
                })
                .collect()
        }),
    }
}

pub fn sweep(args: &SweepArgs, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let input = |e: String| CliError::Input(e);
    let family: Family = args.family.parse().map_err(|e: qdiscord::Error| input(e.to_string()))?;
    let mut base = FamilySpec::new(family);
    for f in &args.fixed {
        let (name, v) = parse_fixed(f).map_err(input)?;
        base.set(&name, v).map_err(|e| input(e.to_string()))?;
    }
    let ranges: Vec<ParamRange> = args.ranges.iter().map(|r| parse_range(r)).collect::<Result<_, _>>().map_err(input)?;
    for r in &ranges {
        base.set(&r.name, r.lo).map_err(|e| input(e.to_string()))?;
    }
    let points = parameter_points(&ranges, args.samples, args.seed);

    let rows = exec::map(Execution::default(), points.len(), |i| {
        let mut spec = base.clone();
        for (r, v) in ranges.iter().zip(&points[i]) {
            spec.set(&r.name, *v).expect("names checked above");
        }
        let params = ranges.iter().map(|r| r.name.clone()).zip(points[i].iter().copied()).collect();
        match spec.build() {
            Ok(s) => {
                let b = s.bloch();
                let r = discord_d1(&b);
                let o = args.oracle.certify.then(|| oracle_value(&b, args.oracle.grid));
                SweepRow {
                    params,
                    status: "ok".into(),
                    d1: Some(r.d1_value),
                    d2: Some(r.d2_value),
                    lower_bound: Some(r.lower_bound),
                    branch: Some(r.branch),
                    oracle: o,
                    deviation: o.map(|o| (r.d1_value - o).abs()),
                }
            }
            Err(e) => SweepRow {
                params,
                status: format!("skipped: {e}"),
                d1: None,
                d2: None,
                lower_bound: None,
                branch: None,
                oracle: None,
                deviation: None,
            },
        }
    });

    let text = match format {
        Format::Json => json(&rows)?,
        Format::Csv => sweep_csv(&ranges, &rows).map_err(|e| CliError::Output(e.to_string()))?,
    };
    emit(&text, out)?;

    let failures = rows
        .iter()
        .filter(|r| r.deviation.is_some_and(|d| !(d <= args.oracle.tol)))
        .count();
    if failures > 0 {
        return Err(CliError::Certification(format!(
            "{failures} sweep point(s) deviate from the oracle by more than {:e}",
            args.oracle.tol
        )));
    }
    Ok(())
}

fn sweep_csv(ranges: &[ParamRange], rows: &[SweepRow]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ranges.iter().map(|r| r.name.clone()).collect();
    header.extend(
        ["d1", "d2", "lower_bound", "branch", "oracle", "deviation", "status"]
            .iter()
            .map(|s| s.to_string()),
    );
    w.write_record(&header)?;
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        let mut rec: Vec<String> = ranges.iter().map(|r| row.params[&r.name].to_string()).collect();
        rec.extend([
            num(row.d1),
            num(row.d2),
            num(row.lower_bound),
            row.branch.map(|b| b.name().to_string()).unwrap_or_default(),
            num(row.oracle),
            num(row.deviation),
            row.status.clone(),
        ]);
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Serialize)]
struct CertifyCase {
    id: String,
    closed: f64,
    oracle: f64,
    expected: Option<f64>,
    deviation: f64,
    branch: Branch,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct CertifySummary {
    seed: u64,
    n_states: usize,
    n_fixtures: usize,
    grid: usize,
    tol: f64,
    max_deviation: f64,
    passed: bool,
    failures: Vec<CertifyCase>,
}

pub fn certify(n_states: usize, seed: u64, grid: usize, tol: f64, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let fixtures = fixtures();
    let random = ginibre_suite(seed, n_states);
    let mut inputs: Vec<(String, BlochForm, Option<f64>)> = random
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("ginibre_{i}"), s.bloch(), None))
        .collect();
    for f in &fixtures {
        let s = f.spec.build().map_err(|e| CliError::Input(format!("fixture {}: {e}", f.name)))?;
        inputs.push((f.name.clone(), s.bloch(), Some(f.expected_d1)));
    }

    let opts = CertifyOptions {
        oracle: OracleOptions {
            n_points: grid,
            exec: Execution::Sequential,
            ..OracleOptions::default()
        },
        tol,
        ..CertifyOptions::default()
    };
    let cases = exec::map(Execution::default(), inputs.len(), |i| {
        let (id, b, expected) = &inputs[i];
        let r = certify_report(b, &opts);
        let deviation = expected.map_or(r.deviation, |e| r.deviation.max((r.closed - e).abs()));
        CertifyCase {
            id: id.clone(),
            closed: r.closed,
            oracle: r.oracle,
            expected: *expected,
            deviation,
            branch: r.branch,
            passed: r.consistency_error.is_none() && deviation <= tol,
        }
    });

    let max_deviation = cases.iter().map(|c| c.deviation).fold(0.0, f64::max);
    let n_failed = cases.iter().filter(|c| !c.passed).count();
    let text = match format {
        Format::Json => json(&CertifySummary {
            seed,
            n_states,
            n_fixtures: fixtures.len(),
            grid,
            tol,
            max_deviation,
            passed: n_failed == 0,
            failures: cases.into_iter().filter(|c| !c.passed).collect(),
        })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in &cases {
                w.serialize(c).map_err(|e| CliError::Output(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Output(e.to_string()))?)
                .expect("csv output is utf-8")
        }
    };
    emit(&text, out)?;
    eprintln!(
        "certify: {} cases (seed {seed}, grid {grid}, tol {tol:e}), max deviation {max_deviation:.3e}, {n_failed} failed",
        n_states + fixtures.len()
    );
    if n_failed > 0 {
        return Err(CliError::Certification(format!("{n_failed} case(s) failed certification")));
    }
    Ok(())
}
