use serde_json::json;

use super::report::ExperimentReport;
use super::verify::{run_suite, Suite, VerifyOptions};
use crate::error::{Error, Result};
use crate::experiments::{
    blowup_curve, growth_curve, lower_bound_probe, maximal_growth, sato_checks, sato_norm_growth,
};
use crate::lpspace::{Exponent, SeqFunction};
use crate::mc::{cross_check, RngSeed};
use crate::numeric::fmt_sig17;
use crate::weights::{alpha_pow_exact, alpha_pow_log, Backend, Limits};

fn num(x: f64) -> String {
    fmt_sig17(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Exact,
    Log,
    Auto,
}

impl BackendChoice {
    pub fn label(self) -> &'static str {
        match self {
            BackendChoice::Exact => "exact",
            BackendChoice::Log => "log",
            BackendChoice::Auto => "auto",
        }
    }
}

/// Rows `j < jmax` of `alpha^n_j`.
pub fn alpha(n: u64, j_max: u64, backend: BackendChoice, limits: &Limits) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("--n must be >= 1".into()));
    }
    if j_max == 0 {
        return Err(Error::InvalidParameter("--jmax must be >= 1".into()));
    }
    limits.check_truncation(j_max)?;
    if backend == BackendChoice::Exact {
        limits.check_exact(n, j_max - 1)?;
    }
    let mut r = ExperimentReport::new("alpha", &["n", "j", "weight", "backend"]);
    r.param("n", n).param("jmax", j_max).param("backend", backend.label());
    for j in 0..j_max {
        let exact = match backend {
            BackendChoice::Exact => true,
            BackendChoice::Log => false,
            BackendChoice::Auto => limits.check_exact(n, j).is_ok(),
        };
        let (weight, used) = if exact {
            (alpha_pow_exact(n, j).to_fraction_string(), Backend::Exact)
        } else {
            (num(alpha_pow_log(n, j).value()), Backend::Log)
        };
        let label = if used == Backend::Exact { "exact" } else { "log" };
        r.push_row(vec![n.to_string(), j.to_string(), weight, label.to_string()]);
    }
    r.verdict("rows_written", !r.rows.is_empty(), format!("{} rows", r.rows.len()));
    Ok(r)
}

pub fn verify(suite: Suite, opts: &VerifyOptions) -> Result<ExperimentReport> {
    let mut r = ExperimentReport::new("verify", &["name", "pass", "detail"]);
    r.param("suite", if suite == Suite::All { "all" } else { "core" })
        .param("seed", opts.seed)
        .param("perturb", opts.perturb)
        .param("trials", opts.mc_trials)
        .param("reruns", opts.mc_reruns);
    for v in run_suite(suite, opts)? {
        r.push_row(vec![v.name.clone(), v.pass.to_string(), v.detail.clone()]);
        r.verdicts.push(v);
    }
    Ok(r)
}

pub fn growth(p: Exponent, n_max: u64, limits: &Limits) -> Result<ExperimentReport> {
    let c = growth_curve(p, n_max, limits)?;
    let mut r = ExperimentReport::new(
        "growth",
        &["n", "norm_fn", "norm_Anfn_lower", "ratio", "upper_bound"],
    );
    r.param("p", p.value()).param("nmax", n_max);
    for row in &c.rows {
        r.push_row(vec![
            row.n.to_string(),
            num(row.norm_fn),
            num(row.norm_an_fn_lower),
            num(row.ratio),
            num(row.upper_bound),
        ]);
    }
    r.summarize("slope", c.slope)
        .summarize("fitRange", json!([c.fit_range.0, c.fit_range.1]))
        .summarize("empiricalConstant", c.empirical_constant);
    r.verdict("sandwich", c.sandwich_ok, "R(n) <= (n+1)^(1/p) (1 + 1e-9)");
    r.verdict(
        "slope",
        c.slope_ok,
        format!("slope {} in [0.85/p, 1.15/p]", num(c.slope)),
    );
    Ok(r)
}

pub fn blowup(p: Exponent, beta: f64, n_max: u64, truncation: u64, limits: &Limits) -> Result<ExperimentReport> {
    limits.check_truncation(truncation)?;
    let c = blowup_curve(p, beta, n_max, truncation)?;
    let mut r = ExperimentReport::new("blowup", &["n", "E_lower", "norm_lower"]);
    r.param("p", p.value())
        .param("beta", beta)
        .param("nmax", n_max)
        .param("truncation", truncation);
    for row in &c.rows {
        r.push_row(vec![row.n.to_string(), num(row.e_lower), num(row.norm_lower)]);
    }
    r.verdict("strictly_increasing", c.strictly_increasing, "E_lower(n+1) > E_lower(n)");
    let detail: Vec<String> = c
        .growth_factors
        .iter()
        .map(|(n, g)| format!("E({})/E({n}) = {}", 4 * n, num(*g)))
        .collect();
    r.verdict("growth_4n", c.growth_ok, detail.join(", "));
    Ok(r)
}

pub fn maximal(p: Exponent, m_grid: &[u64], horizon_factor: u64) -> Result<ExperimentReport> {
    if horizon_factor < 2 {
        return Err(Error::InvalidParameter("--horizon-factor must be >= 2".into()));
    }
    let g = maximal_growth(p, m_grid, horizon_factor)?;
    let mut r = ExperimentReport::new("maximal", &["m", "ratio"]);
    r.param("p", p.value())
        .param("mgrid", m_grid.to_vec())
        .param("horizonFactor", horizon_factor);
    for row in &g.rows {
        r.push_row(vec![row.m.to_string(), num(row.ratio)]);
    }
    r.verdict("strictly_increasing", g.strictly_increasing, "ratio increases along the grid");
    let detail: Vec<String> = g
        .growth_factors
        .iter()
        .map(|(m, f)| format!("ratio({})/ratio({m}) = {}", 4 * m, num(*f)))
        .collect();
    r.verdict("growth_4m", g.growth_ok, detail.join(", "));
    Ok(r)
}

pub fn probe(c0: f64, n_max: u64, j_max: u64) -> Result<ExperimentReport> {
    let p = lower_bound_probe(c0, n_max, j_max)?;
    let mut r = ExperimentReport::new("probe", &["n", "j", "ratio"]);
    r.param("c0", c0).param("nmax", n_max).param("jmax", j_max);
    for row in &p.rows {
        r.push_row(vec![row.n.to_string(), row.j.to_string(), num(row.ratio)]);
    }
    r.summarize("minObserved", p.min_observed)
        .summarize("minHalfGrid", json!(p.min_half_grid))
        .summarize("admissiblePairs", p.admissible_pairs);
    r.verdict("positive", p.positive, format!("min {}", num(p.min_observed)));
    r.verdict("stable", p.stable, "min at nMax >= 0.5 min at nMax/2");
    Ok(r)
}

pub fn sato(a: f64, p: Exponent, n_max: u64) -> Result<ExperimentReport> {
    let g = sato_norm_growth(a, p, n_max)?;
    let c = sato_checks(a, n_max)?;
    let mut r = ExperimentReport::new("sato", &["n", "norm"]);
    r.param("a", a).param("p", p.value()).param("nmax", n_max);
    for (n, norm) in &g.rows {
        r.push_row(vec![n.to_string(), num(*norm)]);
    }
    r.verdict("closed_form", c.closed_form_ok, "A^n = [[1, na], [0, 1]]");
    r.verdict(
        "subadditivity",
        c.subadditive_ok && c.corner_equality_ok,
        "entrywise, equality in the corner",
    );
    r.verdict("norm_lower_bound", g.lower_bound_ok, "||A^n e2||_p >= na");
    r.verdict("strictly_increasing", g.strictly_increasing, "");
    Ok(r)
}

pub fn simulate(
    f: &SeqFunction,
    n: u64,
    k: u64,
    trials: u64,
    seed: u64,
    truncation: u64,
    limits: &Limits,
) -> Result<ExperimentReport> {
    limits.check_truncation(truncation)?;
    let c = cross_check(f, n, k, trials, RngSeed::new(seed), truncation)?;
    let mut r = ExperimentReport::new("simulate", &["estimate", "half_width", "exact_mid", "ok"]);
    r.param("fn", f.label())
        .param("n", n)
        .param("k", k)
        .param("trials", trials)
        .param("seed", seed)
        .param("truncation", truncation);
    r.push_row(vec![
        num(c.estimate.mean),
        num(c.estimate.half_width),
        num(c.exact.mid()),
        c.ok.to_string(),
    ]);
    r.summarize("method", json!(c.estimate.method))
        .summarize("exactLower", c.exact.lower)
        .summarize("exactUpper", c.exact.upper);
    r.verdict("agreement", c.ok, "distance to the enclosure <= 3 half-widths");
    Ok(r)
}
