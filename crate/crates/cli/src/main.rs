mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use config::{Command, Format, InstanceArgs, OutputArgs, RunConfig};
use ellgenus::eisenstein::{eisenstein_g, normalized};
use ellgenus::genus::{
    anomaly_case, decompose_a0, decompose_a0_at, jacobi_numeric_check, minimal_instance, verify_anomaly_case,
    verify_anomaly_case_literal, verify_prop_expansions, verify_route_equivalence, verify_vanishing_clause,
    GenusInstance,
};
use ellgenus::report::{timed, Entry, VerificationReport};
use ellgenus::suite::{acceptance_criteria, full_suite, CriterionOutcome, JACOBI_TAUS, JACOBI_ZS, THETA_POINTS};
use ellgenus::theta::{check_lattice_shifts_numeric, check_lattice_shifts_symbolic, check_modular_transforms};
use ellgenus::{Error, Result};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

enum Outcome {
    Reports(Vec<VerificationReport>),
    /// An expansion: the coefficients are the text output.
    Expansion(VerificationReport),
    Suite(Vec<CriterionOutcome>),
}

impl Outcome {
    fn passed(&self) -> bool {
        match self {
            Outcome::Reports(rs) => rs.iter().all(|r| r.passed()),
            Outcome::Expansion(r) => r.passed(),
            Outcome::Suite(cs) => cs.iter().all(|c| c.passed()),
        }
    }

    fn clear_timing(&mut self) {
        let clear = |r: &mut VerificationReport| r.elapsed_ms = 0;
        match self {
            Outcome::Reports(rs) => rs.iter_mut().for_each(clear),
            Outcome::Expansion(r) => clear(r),
            Outcome::Suite(cs) => {
                for c in cs {
                    c.elapsed_ms = 0;
                    c.reports.iter_mut().for_each(clear);
                    if let Some(w) = &c.witness {
                        c.witness = Some(strip_ms(w));
                    }
                }
            }
        }
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => match self {
                Outcome::Reports(rs) => to_json(rs),
                Outcome::Expansion(r) => to_json(&[r]),
                Outcome::Suite(cs) => to_json(cs),
            },
            Format::Text => Ok(match self {
                Outcome::Reports(rs) => rs.iter().map(report_text).collect(),
                Outcome::Expansion(r) => format!("{}\n", r.got.clone().unwrap_or_default()),
                Outcome::Suite(cs) => cs
                    .iter()
                    .map(|c| {
                        let mut s = format!("{}\n", c.summary_line());
                        for r in c.reports.iter().filter(|r| !r.passed() || r.note.is_some()) {
                            s.push_str(&format!("    {}\n", r.summary_line()));
                        }
                        s
                    })
                    .collect(),
            }),
        }
    }
}

/// Drops the `(N ms)` stamps a witness line copies from its report.
fn strip_ms(s: &str) -> String {
    let mut out = String::new();
    let mut rest = s;
    while let Some(start) = rest.find(" (") {
        let tail = &rest[start + 2..];
        match tail.find(" ms)") {
            Some(end) if tail[..end].bytes().all(|b| b.is_ascii_digit()) => {
                out.push_str(&rest[..start]);
                rest = &tail[end + 4..];
            }
            _ => {
                out.push_str(&rest[..start + 2]);
                rest = tail;
            }
        }
    }
    out.push_str(rest);
    out
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Consistency(format!("serializing report: {e}")))
}

fn report_text(r: &VerificationReport) -> String {
    let mut s = format!("{}\n", r.summary_line());
    for e in &r.entries {
        let mut line = format!("  {} {}", e.status.label(), e.label);
        if let Some(w) = &e.witness {
            line.push_str(&format!(": {w}"));
        }
        if let Some(n) = &e.note {
            line.push_str(&format!(" [{n}]"));
        }
        s.push_str(&line);
        s.push('\n');
    }
    s
}

fn eisenstein_expand(weight: u32, order: i64) -> Result<VerificationReport> {
    if order < 0 {
        return Err(Error::Usage("--order must be non-negative".into()));
    }
    let g = normalized(&eisenstein_g(weight, order)?)?;
    let coeffs: Vec<String> = g.int_coeffs(order)?.iter().map(|c| c.to_string()).collect();
    let entry = Entry::pass(format!("G{weight} through q^{order}"));
    let mut r = VerificationReport::from_entries("eisenstein-expand", vec![entry]);
    r.got = Some(coeffs.join(" "));
    Ok(r)
}

fn theta_check(tol: Option<f64>, q_order: Option<i64>) -> Result<Vec<VerificationReport>> {
    let tol = tol.unwrap_or(1e-9);
    if !(tol > 0.0) {
        return Err(Error::Usage("--tol must be positive".into()));
    }
    let q_order = q_order.unwrap_or(4);
    if q_order < 0 {
        return Err(Error::Usage("--q-order must be non-negative".into()));
    }
    let mut out = Vec::new();
    for (tr, ti, zr, zi) in THETA_POINTS {
        let (tau, z) = (Complex64::new(tr, ti), Complex64::new(zr, zi));
        out.push(timed(|| {
            check_modular_transforms(tau, z, tol).unwrap_or_else(|e| VerificationReport::errored("theta", &e))
        }));
        out.push(timed(|| {
            check_lattice_shifts_numeric(tau, z, tol).unwrap_or_else(|e| VerificationReport::errored("theta", &e))
        }));
    }
    out.push(timed(|| check_lattice_shifts_symbolic(q_order)));
    Ok(out)
}

fn single(inst: GenusInstance, f: impl FnOnce(&GenusInstance) -> VerificationReport) -> Vec<VerificationReport> {
    vec![timed(|| f(&inst))]
}

fn anomaly(
    case: Option<i64>,
    d: Option<u32>,
    l: Option<u32>,
    gauge: ellgenus::genus::Gauge,
    q_order: Option<i64>,
    literal: bool,
) -> Result<Vec<VerificationReport>> {
    let excess = match (case, d, l) {
        (Some(k), _, _) => k,
        (None, Some(d), Some(l)) => 2 * d as i64 - l as i64,
        _ => return Err(Error::Usage("give --case, or both --d and --l".into())),
    };
    let case = anomaly_case(gauge, excess)?;
    let (d, l) = match (d, l) {
        (Some(d), Some(l)) => (d, l),
        (None, None) => minimal_instance(&case),
        _ => return Err(Error::Usage("give both --d and --l, or neither".into())),
    };
    let inst = GenusInstance::new(d, l, gauge)?.with_q_order(q_order.unwrap_or(2))?;
    if inst.excess() != case.excess {
        return Err(Error::Usage(format!("--case {} does not match 2d - l = {}", case.excess, inst.excess())));
    }
    Ok(single(inst, |i| if literal { verify_anomaly_case_literal(i, &case) } else { verify_anomaly_case(i, &case) }))
}

fn jacobi(taus: &[Complex64], zs: &[Complex64], args: &InstanceArgs) -> Result<Vec<VerificationReport>> {
    let inst = args.instance(0, 1, 1)?;
    let tol = args.tol.unwrap_or(1e-6);
    let taus: Vec<Complex64> =
        if taus.is_empty() { JACOBI_TAUS.iter().map(|&(r, i)| Complex64::new(r, i)).collect() } else { taus.to_vec() };
    let zs: Vec<Complex64> =
        if zs.is_empty() { JACOBI_ZS.iter().map(|&(r, i)| Complex64::new(r, i)).collect() } else { zs.to_vec() };
    let mut out = Vec::new();
    for &tau in &taus {
        for &z in &zs {
            out.push(timed(|| jacobi_numeric_check(&inst, tau, z, tol)));
        }
    }
    Ok(out)
}

fn run_suite(diagnostics: bool, jobs: Option<usize>) -> Result<Vec<CriterionOutcome>> {
    let criteria = if diagnostics { full_suite() } else { acceptance_criteria() };
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if jobs == 0 {
        return Err(Error::Usage("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Consistency(format!("starting worker pool: {e}")))?;
    let tasks: Vec<(usize, usize)> =
        criteria.iter().enumerate().flat_map(|(c, crit)| (0..crit.tasks.len()).map(move |t| (c, t))).collect();
    let reports: Vec<VerificationReport> =
        pool.install(|| tasks.par_iter().map(|&(c, t)| criteria[c].run_task(t)).collect());
    let mut it = reports.into_iter();
    Ok(criteria.iter().map(|c| c.finish(it.by_ref().take(c.tasks.len()).collect())).collect())
}

fn run(cfg: &RunConfig) -> Result<Outcome> {
    Ok(match &cfg.command {
        Command::EisensteinExpand { weight, order } => Outcome::Expansion(eisenstein_expand(*weight, *order)?),
        Command::ThetaCheck { tol, q_order } => Outcome::Reports(theta_check(*tol, *q_order)?),
        Command::RouteEquivalence(a) => Outcome::Reports(single(a.instance(2, 5, 1)?, verify_route_equivalence)),
        Command::PropExpansions(a) => Outcome::Reports(single(a.instance(2, 5, 5)?, verify_prop_expansions)),
        Command::Anomaly { case, d, l, gauge, q_order, literal } => {
            Outcome::Reports(anomaly(*case, *d, *l, *gauge, *q_order, *literal)?)
        }
        Command::Vanishing { clause, instance } => {
            if !(1..=5).contains(clause) {
                return Err(Error::Usage(format!("--clause must be 1..=5, got {clause}")));
            }
            let inst = instance.instance(2, 5, *clause)?;
            Outcome::Reports(single(inst, |i| verify_vanishing_clause(i, *clause).report))
        }
        Command::DecomposeA0 { weight, instance } => {
            let inst = instance.instance(3, 1, 1)?;
            Outcome::Reports(single(inst, |i| match weight {
                Some(w) => decompose_a0_at(i, *w),
                None => decompose_a0(i),
            }))
        }
        Command::JacobiNumeric { tau, z, instance } => Outcome::Reports(jacobi(tau, z, instance)?),
        Command::All { diagnostics } => Outcome::Suite(run_suite(*diagnostics, cfg.output.jobs)?),
    })
}

fn emit(out: &OutputArgs, text: &str) -> std::io::Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let mut outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e @ Error::Usage(_)) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    if cfg.output.no_timing {
        outcome.clear_timing();
    }
    let text = match outcome.render(cfg.output.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    if let Err(e) = emit(&cfg.output, &text) {
        eprintln!("writing report: {e}");
        return ExitCode::from(EXIT_FAIL);
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_timing_stamps() {
        assert_eq!(strip_ms("FAIL x [d=1] (12 ms) witness: a (b)"), "FAIL x [d=1] witness: a (b)");
        assert_eq!(strip_ms("no stamp"), "no stamp");
    }
}
