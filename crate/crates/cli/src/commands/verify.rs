//! Residual suites for the replica recursion, the Pfaff–KP equations in the
//! deformation times and the Virasoro constraints.

use std::f64::consts::PI;

use anyhow::Result;
use clap::ValueEnum;
use num_complex::Complex64;
use pfaffkp::hierarchy::{
    pfkp1_residual, pfkp2_residual, virasoro_residual, zero_free_interval, RecursionCheck, ResidualReport, VirasoroForm,
};
use pfaffkp::partition::ReplicaIndex;
use pfaffkp::quadrature::{bosonic_debruijn_kernel, eta_extrapolated_kernel};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{num, OutputDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pfkp,
    Tau,
    Virasoro,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Pfkp => "pfkp",
            Suite::Tau => "tau",
            Suite::Virasoro => "virasoro",
            Suite::All => "all",
        }
    }
}

/// Bosonic kernel entry against the damped real-axis oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelComparison {
    pub omega: f64,
    pub fast: Complex64,
    pub oracle: Complex64,
    pub oracle_error: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub label: String,
    pub pass: bool,
    /// Why the check failed; empty on success.
    pub reasons: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelComparison>,
}

impl CheckOutcome {
    fn failed(suite: &'static str, label: String, error: impl std::fmt::Display) -> Self {
        Self {
            suite,
            label,
            pass: false,
            reasons: vec![format!("error: {error}")],
            report: None,
            kernel: None,
        }
    }

    fn judged(suite: &'static str, label: String, report: ResidualReport, tolerance: f64, min_order: Option<f64>) -> Self {
        let mut reasons = Vec::new();
        if report.normalized_residual > tolerance {
            reasons.push(format!("residual {:.3e} above tolerance {tolerance:.1e}", report.normalized_residual));
        }
        if !report.pass {
            reasons.push(format!(
                "residual {:.3e} above error budget {:.3e}",
                report.normalized_residual, report.error_budget
            ));
        }
        if let Some(min) = min_order {
            match report.convergence_order {
                Some(p) if p >= min => {}
                Some(p) => reasons.push(format!("finite-difference order {p:.2} below {min}")),
                None => reasons.push("finite-difference order unavailable".into()),
            }
        }
        Self {
            suite,
            label,
            pass: reasons.is_empty(),
            reasons,
            report: Some(report),
            kernel: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
    /// Mean `rhs/lhs` over the recursion points when a gauge fault is set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_ratio: Option<Complex64>,
}

fn grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| a + (b - a) * (k as f64 + 0.5) / points as f64).collect()
}

fn recursion_checks(n: i32, interval: [f64; 2], cfg: &RunConfig) -> Vec<CheckOutcome> {
    let label = |w: f64| format!("recursion n={n} omega={w:.6}");
    let ps = &cfg.partition;
    let replica = match ReplicaIndex::new(n) {
        Ok(r) => r,
        Err(e) => return vec![CheckOutcome::failed("pfkp", format!("recursion n={n}"), e)],
    };
    let (a, b) = match zero_free_interval(replica, (interval[0], interval[1]), 0.05, ps) {
        Ok((iv, _)) => iv,
        Err(e) => return vec![CheckOutcome::failed("pfkp", format!("recursion n={n} zero search"), e)],
    };
    let check = match RecursionCheck::prepare(replica, (a, b), cfg.pfkp.gauge, &cfg.hierarchy, ps) {
        Ok(c) => c,
        Err(e) => return vec![CheckOutcome::failed("pfkp", format!("recursion n={n} on [{a}, {b}]"), e)],
    };
    grid(a, b, cfg.pfkp.points)
        .into_iter()
        .map(|w| match check.residual(w) {
            Ok(r) => CheckOutcome::judged("pfkp", label(w), r, cfg.pfkp.tolerance, None),
            Err(e) => CheckOutcome::failed("pfkp", label(w), e),
        })
        .collect()
}

fn kernel_check(cfg: &RunConfig) -> CheckOutcome {
    let w = cfg.oracle.kernel_omega;
    let label = format!("bosonic kernel K12 omega={w}");
    let fast = match bosonic_debruijn_kernel(1, 2, w, &cfg.partition.path) {
        Ok(v) => v,
        Err(e) => return CheckOutcome::failed("pfkp", label, e),
    };
    let oracle = match eta_extrapolated_kernel(1, 2, w, &cfg.oracle.eta_ladder) {
        Ok(v) => v,
        Err(e) => return CheckOutcome::failed("pfkp", label, e),
    };
    let difference = (fast - oracle.value).norm();
    let allowed = cfg.hierarchy.budget_factor * oracle.error;
    let mut reasons = Vec::new();
    if difference > allowed {
        reasons.push(format!("kernel difference {difference:.3e} above oracle budget {allowed:.3e}"));
    }
    CheckOutcome {
        suite: "pfkp",
        label,
        pass: reasons.is_empty(),
        reasons,
        report: None,
        kernel: Some(KernelComparison {
            omega: w,
            fast,
            oracle: oracle.value,
            oracle_error: oracle.error,
            difference,
        }),
    }
}

fn pfkp_suite(cfg: &RunConfig) -> Vec<CheckOutcome> {
    let jobs: Vec<(i32, [f64; 2])> = vec![
        (0, cfg.pfkp.interval_n_plus),
        (1, cfg.pfkp.interval_n_plus),
        (-1, cfg.pfkp.interval_n_minus),
    ];
    let mut out: Vec<CheckOutcome> = jobs
        .par_iter()
        .map(|&(n, iv)| {
            if n == 0 {
                let mut one = cfg.clone();
                one.pfkp.points = 1;
                recursion_checks(0, iv, &one)
            } else {
                recursion_checks(n, iv, cfg)
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    out.push(kernel_check(cfg));
    out
}

fn fermionic_s(omega: f64) -> Complex64 {
    Complex64::new(0.0, -0.5 * PI * omega)
}

fn tau_suite(cfg: &RunConfig) -> Vec<CheckOutcome> {
    let jobs: Vec<(u8, f64)> = cfg
        .tau
        .fermionic_omegas
        .iter()
        .flat_map(|&w| [(1u8, w), (2u8, w)])
        .collect();
    jobs.par_iter()
        .map(|&(which, w)| {
            let s = fermionic_s(w);
            let label = format!("PfKP{which} m=1 s={s}");
            let r = if which == 1 {
                pfkp1_residual(1, s, &cfg.hierarchy, &cfg.partition)
            } else {
                pfkp2_residual(1, s, &cfg.hierarchy, &cfg.partition)
            };
            match r {
                Ok(r) => CheckOutcome::judged("tau", label, r, cfg.tau.tolerance, None),
                Err(e) => CheckOutcome::failed("tau", label, e),
            }
        })
        .collect()
}

fn form_name(form: VirasoroForm) -> &'static str {
    match form {
        VirasoroForm::AsPrinted => "as-printed",
        VirasoroForm::Reparametrization => "reparametrization",
    }
}

fn virasoro_suite(cfg: &RunConfig) -> Vec<CheckOutcome> {
    let mut points: Vec<(i32, Complex64)> = cfg.tau.fermionic_omegas.iter().map(|&w| (1, fermionic_s(w))).collect();
    points.extend(cfg.tau.bosonic_s.iter().map(|&s| (-1, Complex64::new(s, 0.0))));
    let mut jobs = Vec::new();
    for &form in &cfg.tau.virasoro_forms {
        for &(m, s) in &points {
            for q in -1..=1 {
                jobs.push((form, m, s, q));
            }
        }
    }
    jobs.par_iter()
        .map(|&(form, m, s, q)| {
            let label = format!("virasoro {} m={m} q={q} s={s}", form_name(form));
            match virasoro_residual(m, q, s, form, &cfg.hierarchy, &cfg.partition) {
                Ok(r) => CheckOutcome::judged("virasoro", label, r, cfg.tau.tolerance, Some(cfg.tau.min_order)),
                Err(e) => CheckOutcome::failed("virasoro", label, e),
            }
        })
        .collect()
}

pub fn evaluate(suite: Suite, cfg: &RunConfig) -> VerifyReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Pfkp | Suite::All) {
        checks.extend(pfkp_suite(cfg));
    }
    if matches!(suite, Suite::Tau | Suite::All) {
        checks.extend(tau_suite(cfg));
    }
    if matches!(suite, Suite::Virasoro | Suite::All) {
        checks.extend(virasoro_suite(cfg));
    }
    let gauge_ratio = (cfg.pfkp.gauge != 1.0).then(|| {
        let ratios: Vec<Complex64> = checks
            .iter()
            .filter_map(|c| c.report.as_ref())
            .filter(|r| r.point.n.is_some_and(|n| n != 0))
            .map(|r| r.rhs_over_lhs)
            .collect();
        ratios.iter().sum::<Complex64>() / ratios.len().max(1) as f64
    });
    VerifyReport {
        suite,
        pass: checks.iter().all(|c| c.pass),
        checks,
        gauge_ratio,
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_rows(report: &VerifyReport) -> Vec<Vec<String>> {
    report
        .checks
        .iter()
        .map(|c| {
            let mut row = vec![c.suite.to_string(), format!("\"{}\"", c.label)];
            match &c.report {
                Some(r) => {
                    let s = r.point.s;
                    row.extend([
                        opt(r.point.n),
                        opt(r.point.omega.map(num)),
                        opt(r.point.m),
                        opt(r.point.q),
                        opt(s.map(|s| num(s.re))),
                        opt(s.map(|s| num(s.im))),
                        num(r.lhs.re),
                        num(r.lhs.im),
                        num(r.rhs.re),
                        num(r.rhs.im),
                        num(r.normalized_residual),
                        num(r.error_budget),
                        opt(r.convergence_order.map(num)),
                    ]);
                }
                None => row.extend(std::iter::repeat_n(String::new(), 13)),
            }
            row.push(c.pass.to_string());
            row.push(format!("\"{}\"", c.reasons.join("; ")));
            row
        })
        .collect()
}

pub const CSV_COLUMNS: [&str; 17] = [
    "suite", "label", "n", "omega", "m", "q", "s_re", "s_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual",
    "budget", "order", "pass", "reasons",
];

pub fn run(suite: Suite, cfg: &RunConfig, out: &OutputDir) -> Result<VerifyReport> {
    let report = evaluate(suite, cfg);
    let stem = format!("verify_{}", suite.name());
    out.csv(&format!("{stem}.csv"), &CSV_COLUMNS, &csv_rows(&report))?;
    out.json(&format!("{stem}.json"), cfg, &report)?;
    let failed: Vec<&CheckOutcome> = report.checks.iter().filter(|c| !c.pass).collect();
    println!(
        "verify {}: {} of {} checks passed",
        suite.name(),
        report.checks.len() - failed.len(),
        report.checks.len()
    );
    for c in &failed {
        println!("  FAIL {}: {}", c.label, c.reasons.join("; "));
    }
    if let Some(g) = report.gauge_ratio {
        println!("  gauge factor {} gives mean rhs/lhs = {:.6}", cfg.pfkp.gauge, g);
    }
    Ok(report)
}
