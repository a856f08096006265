//! Built-in verification suites.

use std::fmt::Write as _;
use std::str::FromStr;

use mdrate_core::exponents::{
    exponents_from_tail, exponents_sup_form, r_grid, TailGrid, LAMBDA_MAX,
};
use mdrate_core::rate::classify;
use mdrate_core::simulate::{
    array_tail_mc, classify_model, exponent_grid, kolmogorov_lower, kolmogorov_upper, levy_sweep,
    max_lower_bound_sweep, rate_band, Executor, TriangularArray,
};
use mdrate_core::tails::catalog;
use mdrate_core::{Regime, ScaleFunction, TailExponents, TailModel};

use crate::error::RunError;
use crate::presets::model_preset;

/// A named group of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Exact maximal-inequality sweeps.
    Inequalities,
    /// Exponent recovery, sup-form agreement and the oscillation witness.
    Exponents,
    /// Exponential envelopes of the bounded sign array.
    Envelopes,
    /// Regime classifier against the rate formulas.
    Rates,
    /// Everything above.
    All,
}

impl Suite {
    /// Suite names accepted on the command line.
    pub const NAMES: [&'static str; 5] = ["inequalities", "exponents", "envelopes", "rates", "all"];

    /// Command-line name.
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Inequalities => "inequalities",
            Suite::Exponents => "exponents",
            Suite::Envelopes => "envelopes",
            Suite::Rates => "rates",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s {
            "inequalities" => Ok(Suite::Inequalities),
            "exponents" => Ok(Suite::Exponents),
            "envelopes" => Ok(Suite::Envelopes),
            "rates" => Ok(Suite::Rates),
            "all" => Ok(Suite::All),
            _ => Err(RunError::Validation(format!(
                "unknown suite \"{s}\", expected one of {}",
                Suite::NAMES.join(", ")
            ))),
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone)]
pub struct Check {
    /// Suite the check belongs to.
    pub suite: &'static str,
    /// Short check name.
    pub name: String,
    /// Whether the check held.
    pub pass: bool,
    /// Measured values.
    pub detail: String,
}

/// All checks of a verification run.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// Checks in execution order.
    pub checks: Vec<Check>,
}

impl Report {
    fn push(
        &mut self,
        suite: &'static str,
        name: impl Into<String>,
        pass: bool,
        detail: impl Into<String>,
    ) {
        self.checks.push(Check {
            suite,
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// True when every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Number of failed checks.
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Plain-text summary table.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status}  {:<12} {:<width$}  {}",
                c.suite, c.name, c.detail
            );
        }
        let _ = writeln!(
            out,
            "{} checks, {} failed",
            self.checks.len(),
            self.failures()
        );
        out
    }
}

/// Relative closeness with exact agreement required at infinity.
fn close(got: f64, want: f64, rel: f64) -> bool {
    if want.is_infinite() {
        got == want
    } else {
        (got - want).abs() <= rel * want.abs()
    }
}

fn fmt_exps(e: &TailExponents) -> String {
    let v: Vec<String> = e.to_array().iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", v.join(", "))
}

fn inequalities(report: &mut Report) {
    const S: &str = "inequalities";
    let levy = levy_sweep();
    let detail = match &levy.first_failure {
        Some(f) => format!(
            "{} laws, {} cases, {} failures; first: {f}",
            levy.laws, levy.checks, levy.failures
        ),
        None => format!("{} laws, {} cases, 0 failures", levy.laws, levy.checks),
    };
    report.push(
        S,
        "levy_maximal",
        levy.failures == 0 && levy.laws >= 200,
        detail,
    );
    let max = max_lower_bound_sweep();
    report.push(
        S,
        "max_lower_bound",
        max.failures == 0 && max.checks == 1_000_000,
        format!(
            "{} points, {} failures, min rhs/lhs {:.6}",
            max.checks, max.failures, max.min_ratio
        ),
    );
}

fn exponents(report: &mut Report) -> Result<(), RunError> {
    const S: &str = "exponents";
    let e = std::f64::consts::E;
    let scales = [
        ("t", ScaleFunction::identity(), e),
        ("t^2", ScaleFunction::power(2.0)?, 2.0),
    ];
    let grid = TailGrid::standard();
    for (label, g, t0) in &scales {
        for lp in [0.5, 1.0, 2.0] {
            for lm in [0.5, 1.0, 2.0] {
                let m = TailModel::designed(lp, lm, *g, *t0)?;
                let want = m.design().expect("designed law");
                let got = exponents_from_tail(&m, g, &grid)?;
                let six = got
                    .to_array()
                    .iter()
                    .zip(want.to_array())
                    .all(|(a, b)| close(*a, b, 0.05));
                let identity = close(got.lam_bar, got.lam1_bar.min(got.lam2_bar), 0.02);
                report.push(
                    S,
                    format!("designed({lp},{lm}) g={label}"),
                    six && identity,
                    format!("got {} want {}", fmt_exps(&got), fmt_exps(&want)),
                );
            }
        }
    }
    let rs = r_grid(0.05, LAMBDA_MAX)?;
    for entry in catalog() {
        let grid = exponent_grid(&entry.model);
        let direct = exponents_from_tail(&entry.model, &entry.scale, &grid)?;
        let sup = exponents_sup_form(&entry.model, &entry.scale, &rs, &grid)?;
        let agree = direct.to_array().iter().zip(sup.to_array()).all(|(a, b)| {
            if a.is_infinite() || b.is_infinite() {
                *a == b
            } else {
                (a - b).abs() <= 0.05 + 1e-9
            }
        });
        report.push(
            S,
            format!("sup_form {}", entry.name),
            agree,
            format!("direct {} sup {}", fmt_exps(&direct), fmt_exps(&sup)),
        );
    }
    let g = ScaleFunction::identity();
    let osc = TailModel::oscillating(0.5, 2.0, g, 3.0)?;
    let got = exponents_from_tail(&osc, &g, &exponent_grid(&osc))?;
    let recovered = close(got.lam_bar, 0.5, 0.1) && close(got.lam_under, 2.0, 0.1);
    let (hi, lo, _, _) = rate_band(&osc, &g, 10.0)?;
    report.push(
        S,
        "oscillation",
        recovered && hi > lo,
        format!(
            "lam_bar {:.4} lam_under {:.4}; band at x=10: {hi:.4} vs {lo:.4}",
            got.lam_bar, got.lam_under
        ),
    );
    Ok(())
}

/// Replications for each envelope estimate.
const ENVELOPE_REPS: u64 = 8192;

fn envelopes<E: Executor>(report: &mut Report, exec: &E) -> Result<(), RunError> {
    const S: &str = "envelopes";
    let g = ScaleFunction::identity();
    let array = TriangularArray::Signs { sigma: 1.0 };
    let r = std::f64::consts::SQRT_2;
    let grid = [1_000u64, 10_000];
    for (k, &n) in grid.iter().enumerate() {
        let out = array_tail_mc(&array, &g, n, r, ENVELOPE_REPS, 0xE7 + k as u64, exec)?;
        let est = &out.estimate;
        let upper = kolmogorov_upper(out.b_n, out.m_n, out.x_n)?;
        let below = est.p_hat <= upper * (1.0 + 4.0 * est.rel_stderr());
        report.push(
            S,
            format!("upper n={n}"),
            below,
            format!(
                "p_hat {:.4e} (rel se {:.3}) upper {upper:.4e}",
                est.p_hat,
                est.rel_stderr()
            ),
        );
        if k + 1 == grid.len() {
            let floor =
                kolmogorov_lower(out.b_n, out.x_n, 0.01)?.ln() / g.eval((n as f64).ln()) - 0.3;
            report.push(
                S,
                format!("lower n={n}"),
                est.normalized >= floor,
                format!("normalized {:.4} floor {floor:.4}", est.normalized),
            );
        }
    }
    Ok(())
}

/// Rate of the deviation probability straight from the band formula, with
/// the degenerate cells handled first. `lambda` need not be ordered.
fn oracle_rate(sigma2: f64, matches: bool, lambda: f64, rho: f64, x: f64) -> f64 {
    if !matches {
        return 0.0;
    }
    if sigma2 == 0.0 {
        return f64::NEG_INFINITY;
    }
    -(x * x / (2.0 * sigma2)).min(lambda / 2f64.powf(rho))
}

fn rates(report: &mut Report) -> Result<(), RunError> {
    const S: &str = "rates";
    let inf = f64::INFINITY;
    let lambdas = [0.0, 0.5, inf];
    let xs = [0.01, 0.5, 1.0, 10.0, 1e3];
    let rho = 1.0;
    let mut cells = 0;
    let mut mismatched = Vec::new();
    for sigma2 in [0.0, 0.5, 1.0, 4.0] {
        for matches in [true, false] {
            for bar in lambdas {
                for under in lambdas {
                    cells += 1;
                    let exps = TailExponents::from_array([bar, under, bar, under, bar, under]);
                    let bounded = |lambda: f64| {
                        xs.iter().all(|&x| {
                            let r = oracle_rate(sigma2, matches, lambda, rho, x);
                            r < 0.0 && r.is_finite()
                        })
                    };
                    let minus_inf = xs
                        .iter()
                        .all(|&x| oracle_rate(sigma2, matches, bar, rho, x) == f64::NEG_INFINITY);
                    let expected = if minus_inf {
                        Regime::MinusInfinity
                    } else {
                        match (bounded(bar), bounded(under)) {
                            (true, true) => Regime::BoundedNonzeroLiminfToo,
                            (true, false) => Regime::BoundedNonzeroLimsup,
                            (false, true) => Regime::Mixed,
                            (false, false) => Regime::LimitZero,
                        }
                    };
                    let got = classify(sigma2, matches, &exps);
                    if got != expected {
                        mismatched.push(format!(
                            "sigma2={sigma2} match={matches} ({bar},{under}): {} vs {}",
                            got.name(),
                            expected.name()
                        ));
                    }
                }
            }
        }
    }
    let detail = if mismatched.is_empty() {
        format!("{cells} cells agree")
    } else {
        format!(
            "{} of {cells} cells disagree: {}",
            mismatched.len(),
            mismatched.join("; ")
        )
    };
    report.push(S, "classifier_grid", mismatched.is_empty(), detail);
    for (name, want) in [
        ("mean_shift", Regime::LimitZero),
        ("pareto1.5", Regime::LimitZero),
        ("constant", Regime::MinusInfinity),
    ] {
        let p = model_preset(name).expect("built-in preset");
        let got = classify_model(&p.model, &p.scale, p.eta)?;
        report.push(
            S,
            format!("preset {name}"),
            got == want,
            format!("{} (want {})", got.name(), want.name()),
        );
    }
    Ok(())
}

/// Runs `suite` and collects every check. Errors only when a check could
/// not be evaluated at all.
pub fn verify<E: Executor>(suite: Suite, exec: &E) -> Result<Report, RunError> {
    let mut report = Report::default();
    let all = suite == Suite::All;
    if all || suite == Suite::Inequalities {
        inequalities(&mut report);
    }
    if all || suite == Suite::Exponents {
        exponents(&mut report)?;
    }
    if all || suite == Suite::Envelopes {
        envelopes(&mut report, exec)?;
    }
    if all || suite == Suite::Rates {
        rates(&mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdrate_core::simulate::Sequential;

    #[test]
    fn suite_names_parse() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!(matches!(
            "bogus".parse::<Suite>(),
            Err(RunError::Validation(_))
        ));
    }

    #[test]
    fn rate_suite_passes() {
        let r = verify(Suite::Rates, &Sequential).unwrap();
        assert!(r.passed(), "{}", r.table());
        assert_eq!(r.checks.len(), 4);
    }

    #[test]
    fn oracle_handles_degenerate_cells() {
        assert_eq!(oracle_rate(1.0, false, 0.5, 1.0, 2.0), 0.0);
        assert_eq!(oracle_rate(0.0, true, 0.5, 1.0, 2.0), f64::NEG_INFINITY);
        assert_eq!(oracle_rate(1.0, true, f64::INFINITY, 1.0, 2.0), -2.0);
        assert_eq!(oracle_rate(1.0, true, 1.0, 1.0, 10.0), -0.5);
    }
}
