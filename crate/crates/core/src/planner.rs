//! Error bounds for the truncated trapezoidal rule and the balanced choice of
//! step sizes and truncation box for a point budget `N`.
//!
//! With master step `h`, axis `j` uses step `h_j = (a_j h)^{1/b_j}` and the
//! indices `|k_j| ≤ n_j / 2`. The discretization error decays like
//! `exp(-1/h)`, the truncation error like `exp(-C h^{B/D} N^{1/D})` (or a
//! double exponential of it), and `h` is chosen to balance the two.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decay_model::{aggregates, min_of, Aggregates, DecayProfile, FunctionDecay};
use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};
use crate::wire::{self, RealText};

/// How the double-exponential planner solves its balance equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    /// Leading-order logarithmic approximation of the solution.
    #[default]
    ApproxLog,
    /// Exact solution through the Lambert-W function.
    LambertW,
}

impl FromStr for Balance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approx_log" => Ok(Balance::ApproxLog),
            "lambert_w" => Ok(Balance::LambertW),
            other => Err(Error::Malformed(format!("unknown balance mode `{other}`"))),
        }
    }
}

impl fmt::Display for Balance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Balance::ApproxLog => "approx_log",
            Balance::LambertW => "lambert_w",
        })
    }
}

/// Which balance equation [`balance_residual`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceMode {
    Exp,
    Dexp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraturePlan {
    pub h: Real,
    pub h_per_dim: Vec<Real>,
    /// Even; the box on axis `j` is `|k_j| ≤ n_j / 2`.
    pub n_per_dim: Vec<u64>,
    pub half_width_per_dim: Vec<u64>,
    pub budget: u64,
    pub lambda: Real,
    /// `Π (n_j + 1)`.
    pub points_total: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBoundReport {
    pub discretization_bound: Real,
    pub truncation_bound: Real,
    pub total_bound: Real,
    pub constant_cs_omega: Real,
    pub constant_trunc: Real,
    pub exponent_predicted: Real,
    /// Asymptotic bound `C(s) exp(-exponent) (‖f ν‖ + ‖f̂ ω‖)`.
    pub predicted_rate_bound: Real,
}

/// Largest admissible master step, `1 / ln(2e)`.
pub fn max_master_step(ctx: PrecisionContext) -> Real {
    ctx.real(ctx.real(2).ln() + 1u32).recip()
}

fn check_master_step(ctx: PrecisionContext, op: &'static str, h: &Real) -> Result<()> {
    if h.is_nan() || *h <= 0 || *h > max_master_step(ctx) {
        return Err(Error::domain(op, "h must lie in (0, 1/ln(2e)]"));
    }
    Ok(())
}

/// `C(s, ω) = 2e Σ_{∅≠u⊆{1..s}} Π_{j∈u} Γ(1/b_j)/b_j`.
pub fn discretization_constant(ctx: PrecisionContext, profile: &DecayProfile) -> Result<Real> {
    Ok(subset_gamma_sum(ctx, profile)? * ctx.e() * 2u32)
}

/// `Σ_{∅≠u} Π_{j∈u} Γ(1/b_j)/b_j`, i.e. `Π (1 + Γ(1/b_j)/b_j) - 1`.
fn subset_gamma_sum(ctx: PrecisionContext, profile: &DecayProfile) -> Result<Real> {
    let mut product = ctx.real(1);
    for f in profile.fourier_exp()? {
        let term = ctx.gamma(&ctx.real(f.b.recip_ref()))? / &f.b;
        product *= term + 1u32;
    }
    Ok(product - 1u32)
}

/// `C(s, ω) ‖f̂ ω‖ exp(-1/h)`.
pub fn discretization_bound(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    h: &Real,
) -> Result<Real> {
    check_master_step(ctx, "discretization_bound", h)?;
    let decay = ctx.real(-ctx.real(h.recip_ref())).exp();
    Ok(discretization_constant(ctx, profile)? * profile.norm_fhat_omega() * decay)
}

fn check_axes(profile: &DecayProfile, h_per_dim: &[Real], n_per_dim: Option<&[u64]>) -> Result<()> {
    let s = profile.dims();
    for found in [Some(h_per_dim.len()), n_per_dim.map(<[u64]>::len)]
        .into_iter()
        .flatten()
    {
        if found != s {
            return Err(Error::DimensionMismatch { expected: s, found });
        }
    }
    if h_per_dim.iter().any(|h| h.is_nan() || *h <= 0) {
        return Err(Error::domain(
            "truncation bound",
            "step sizes must be positive",
        ));
    }
    Ok(())
}

/// `c (h (n + 1) / 2)^d`.
fn box_exponent(ctx: PrecisionContext, c: &Real, d: &Real, h: &Real, n: u64) -> Real {
    let edge = ctx.real(h * (n + 1)) / 2u32;
    ctx.pow(&edge, d) * c
}

/// `Γ(1/d) / (d r^{1/d})`.
fn gamma_ratio(ctx: PrecisionContext, r: &Real, d: &Real) -> Result<Real> {
    let inv_d = ctx.real(d.recip_ref());
    Ok(ctx.gamma(&inv_d)? / d / ctx.pow(r, &inv_d))
}

/// `C(s, ν, h) = 2s Π_j (h_j + 2Γ(1/d_j)/(d_j c_j^{1/d_j}))`.
pub fn truncation_constant_exp(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    h_per_dim: &[Real],
) -> Result<Real> {
    let params = profile.function_exp()?;
    check_axes(profile, h_per_dim, None)?;
    let mut product = ctx.real(2 * profile.dims() as u64);
    for (p, h) in params.iter().zip(h_per_dim) {
        product *= gamma_ratio(ctx, &p.c, &p.d)? * 2u32 + h;
    }
    Ok(product)
}

/// `C(s, ν, h) ‖f ν‖ exp(-min_j c_j h_j^{d_j} ((n_j + 1)/2)^{d_j})`.
pub fn truncation_bound_exp(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    h_per_dim: &[Real],
    n_per_dim: &[u64],
) -> Result<Real> {
    let params = profile.function_exp()?;
    check_axes(profile, h_per_dim, Some(n_per_dim))?;
    let exponents: Vec<Real> = params
        .iter()
        .zip(h_per_dim.iter().zip(n_per_dim))
        .map(|(p, (h, &n))| box_exponent(ctx, &p.c, &p.d, h, n))
        .collect();
    let decay = ctx.real(-min_of(&exponents)).exp();
    Ok(truncation_constant_exp(ctx, profile, h_per_dim)? * profile.norm_f_nu() * decay)
}

/// `C'(s, ν, h) = 2s Π_j e^{-e_j} (h_j + 2Γ(1/d_j)/((e_j c_j)^{1/d_j} d_j))`.
pub fn truncation_constant_dexp(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    h_per_dim: &[Real],
) -> Result<Real> {
    let params = profile.function_dexp()?;
    check_axes(profile, h_per_dim, None)?;
    let mut product = ctx.real(2 * profile.dims() as u64);
    for (p, h) in params.iter().zip(h_per_dim) {
        let ec = ctx.real(&p.e * &p.c);
        let factor = gamma_ratio(ctx, &ec, &p.d)? * 2u32 + h;
        product *= factor * ctx.real(-p.e.clone()).exp();
    }
    Ok(product)
}

/// Truncation bound for double-exponential decay, summed direction by
/// direction:
/// `‖f ν‖ Π_j h_j · 2 Σ_i T_i Π_{j≠i} L_j` with
/// `T_i = exp(-e_i exp(c_i (h_i (n_i+1)/2)^{d_i})) (1 + 2Γ(1/d_i)/((e_i c_i)^{1/d_i} h_i d_i))`
/// and `L_j = e^{-e_j} (1 + 2Γ(1/d_j)/((e_j c_j)^{1/d_j} h_j d_j))`.
pub fn truncation_bound_dexp(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    h_per_dim: &[Real],
    n_per_dim: &[u64],
) -> Result<Real> {
    let params = profile.function_dexp()?;
    check_axes(profile, h_per_dim, Some(n_per_dim))?;

    let mut tails = Vec::with_capacity(params.len());
    let mut lines = Vec::with_capacity(params.len());
    for (p, (h, &n)) in params.iter().zip(h_per_dim.iter().zip(n_per_dim)) {
        let ec = ctx.real(&p.e * &p.c);
        let factor = gamma_ratio(ctx, &ec, &p.d)? * 2u32 / h + 1u32;
        let inner = box_exponent(ctx, &p.c, &p.d, h, n).exp();
        tails.push(ctx.real(-inner * &p.e).exp() * &factor);
        lines.push(ctx.real(-p.e.clone()).exp() * factor);
    }

    let mut sum = ctx.real(0);
    for (i, tail) in tails.iter().enumerate() {
        let mut term = tail.clone();
        for (j, line) in lines.iter().enumerate() {
            if j != i {
                term *= line;
            }
        }
        sum += term;
    }
    let mut step_product = ctx.real(1);
    for h in h_per_dim {
        step_product *= h;
    }
    Ok(sum * step_product * 2u32 * profile.norm_f_nu())
}

/// Dispatches on the function-decay class of the profile.
pub fn plan(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    budget: u64,
    lambda: &Real,
    balance: Balance,
) -> Result<(QuadraturePlan, ErrorBoundReport)> {
    match profile.function() {
        FunctionDecay::DoubleExponential(_) => {
            plan_double_exponential(ctx, profile, budget, lambda, balance)
        }
        _ => plan_exponential(ctx, profile, budget, lambda),
    }
}

/// Balanced plan for exponentially decaying integrands.
pub fn plan_exponential(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    budget: u64,
    lambda: &Real,
) -> Result<(QuadraturePlan, ErrorBoundReport)> {
    profile.function_exp()?;
    let agg = aggregates(ctx, profile, lambda)?;
    if budget == 0 {
        return Err(Error::budget(budget, "at least one point is required"));
    }
    let n = ctx.real(budget);
    let total = ctx.real(&agg.b_sum + &agg.d_sum);
    let inv_total = ctx.real(total.recip_ref());

    // h = N^{-1/(B+D)} C♯^{-D/(B+D)}
    let n_root = ctx.pow(&n, &inv_total);
    let d_share = ctx.real(&agg.d_sum / &total);
    let sharp_pow = ctx.pow(&agg.c_sharp, &d_share);
    let h = ctx.real(&n_root * &sharp_pow).recip();
    check_budget_step(ctx, budget, &h)?;

    let fourier = profile.fourier_exp()?;
    let rates = profile
        .function()
        .rates()
        .expect("exponential class has rates");
    let mut targets = Vec::with_capacity(profile.dims());
    for ((f, (_, d)), c_j) in fourier.iter().zip(&rates).zip(&agg.c_per_dim) {
        let inv_b = ctx.real(f.b.recip_ref());
        let inv_d = ctx.real(d.recip_ref());
        let sharp_exp =
            (ctx.real(&agg.d_sum * &inv_b) - ctx.real(&agg.b_sum * &inv_d)) * &inv_total;
        let n_exp = ctx.real(&inv_b + &inv_d) * &inv_total;
        let x =
            ctx.real(&agg.c_star / c_j) * ctx.pow(&agg.c_sharp, &sharp_exp) * ctx.pow(&n, &n_exp);
        targets.push(x);
    }

    let exponent = n_root * sharp_pow;
    let plan = assemble_plan(ctx, profile, h, &targets, budget, lambda);
    let report = exp_report(ctx, profile, &plan, exponent)?;
    Ok((plan, report))
}

/// Balanced plan for double-exponentially decaying integrands.
pub fn plan_double_exponential(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    budget: u64,
    lambda: &Real,
    balance: Balance,
) -> Result<(QuadraturePlan, ErrorBoundReport)> {
    profile.function_dexp()?;
    let agg = aggregates(ctx, profile, lambda)?;
    if budget == 0 {
        return Err(Error::budget(budget, "at least one point is required"));
    }
    let e_star = agg
        .e_star
        .clone()
        .expect("double-exponential class has e_*");
    let n = ctx.real(budget);
    let b = &agg.b_sum;
    let d = &agg.d_sum;
    let inv_b = ctx.real(b.recip_ref());
    let d_over_b = ctx.real(d / b);

    // ln(e_*^{-B} N)
    let log_arg = ctx.real(n.ln_ref()) - ctx.real(e_star.ln_ref()) * b;
    if log_arg <= 0 {
        return Err(Error::budget(budget, "ln(e_*^-B N) is not positive"));
    }

    let n_root = ctx.real(-&inv_b);
    let n_root = ctx.pow(&n, &n_root);
    let h = match balance {
        Balance::ApproxLog => {
            let inner = ctx.real(&log_arg / &agg.c_sharp) / b;
            n_root * ctx.pow(&inner, &d_over_b)
        }
        Balance::LambertW => {
            let b_over_d = ctx.real(b / d);
            let scaled_e = ctx.pow(&e_star, &ctx.real(-&b_over_d));
            let n_pow = ctx.pow(&n, &ctx.real(d.recip_ref()));
            let w_arg = ctx.real(&agg.c_sharp * &b_over_d) * scaled_e * n_pow;
            let w = ctx.lambert_w(&w_arg)?;
            let inner = ctx.real(w * d) / &agg.c_sharp / b;
            n_root * ctx.pow(&inner, &d_over_b)
        }
    };
    check_budget_step(ctx, budget, &h)?;

    // n_j + 1 = C_* h^{B/(D d_j)} N^{1/(D d_j)} / (C_j h^{1/b_j})
    let fourier = profile.fourier_exp()?;
    let rates = profile
        .function()
        .rates()
        .expect("double-exponential class has rates");
    let mut targets = Vec::with_capacity(profile.dims());
    for ((f, (_, d_j)), c_j) in fourier.iter().zip(&rates).zip(&agg.c_per_dim) {
        let dd = ctx.real(d * d_j);
        let h_exp = ctx.real(b / &dd) - ctx.real(f.b.recip_ref());
        let n_exp = ctx.real(dd.recip_ref());
        let x = ctx.real(&agg.c_star / c_j) * ctx.pow(&h, &h_exp) * ctx.pow(&n, &n_exp);
        targets.push(x);
    }

    // N^{1/B} (ln(e_*^{-B} N))^{-D/B} C♯^{D/B} B^{D/B}
    let exponent = ctx.pow(&n, &inv_b)
        * ctx.pow(&log_arg, &ctx.real(-&d_over_b))
        * ctx.pow(&agg.c_sharp, &d_over_b)
        * ctx.pow(b, &d_over_b);

    let plan = assemble_plan(ctx, profile, h, &targets, budget, lambda);
    let report = dexp_report(ctx, profile, &plan, exponent)?;
    Ok((plan, report))
}

fn check_budget_step(ctx: PrecisionContext, budget: u64, h: &Real) -> Result<()> {
    if *h > max_master_step(ctx) {
        return Err(Error::budget(
            budget,
            format!("balanced step h = {:.6} exceeds 1/ln(2e)", h.to_f64()),
        ));
    }
    Ok(())
}

fn assemble_plan(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    h: Real,
    targets: &[Real],
    budget: u64,
    lambda: &Real,
) -> QuadraturePlan {
    let fourier = profile.fourier_exp().expect("checked by aggregates");
    let h_per_dim = fourier
        .iter()
        .map(|f| ctx.pow(&ctx.real(&f.a * &h), &ctx.real(f.b.recip_ref())))
        .collect();
    let n_per_dim = point_counts(ctx, targets, budget);
    let half_width_per_dim = n_per_dim.iter().map(|n| n / 2).collect();
    let points_total = n_per_dim.iter().map(|n| n + 1).product();
    QuadraturePlan {
        h,
        h_per_dim,
        n_per_dim,
        half_width_per_dim,
        budget,
        lambda: ctx.real(lambda),
        points_total,
    }
}

/// Even `n_j` with `n_j + 1 ≤ max(⌊x_j⌋, 1)` and `Π (n_j + 1) ≤ budget`.
///
/// The floor is taken after a relative nudge of `10^-(digits-10)`, so
/// targets that are integers in exact arithmetic are not lost to rounding;
/// the nudge is dropped again if it would overspend the budget.
fn point_counts(ctx: PrecisionContext, targets: &[Real], budget: u64) -> Vec<u64> {
    let nudge = ctx.tolerance(10) + 1u32;
    let floors = |scale: &Real| -> Vec<u128> {
        targets
            .iter()
            .map(|x| {
                let scaled = ctx.real(x * scale).floor();
                let value = scaled
                    .to_integer()
                    .and_then(|i| i.to_u128())
                    .unwrap_or(u128::MAX);
                value.clamp(1, u128::from(budget) + 1)
            })
            .collect()
    };
    let product = |counts: &[u128]| counts.iter().fold(1u128, |acc, &m| acc.saturating_mul(m));

    let mut counts = floors(&nudge);
    if product(&counts) > u128::from(budget) {
        counts = floors(&ctx.real(1));
    }
    let mut n: Vec<u64> = counts.iter().map(|&m| even_floor(m as u64 - 1)).collect();

    // Axes clamped to one point can leave the product over budget; shrink
    // the widest axis until it fits.
    loop {
        let total: u128 = n
            .iter()
            .fold(1u128, |acc, &k| acc.saturating_mul(u128::from(k) + 1));
        if total <= u128::from(budget) {
            break;
        }
        let widest = (0..n.len())
            .max_by_key(|&j| n[j])
            .expect("at least one axis");
        let others = total / (u128::from(n[widest]) + 1);
        let room = u128::from(budget) / others;
        n[widest] = if room == 0 {
            0
        } else {
            even_floor(room as u64 - 1)
        };
    }
    n
}

fn even_floor(n: u64) -> u64 {
    n - n % 2
}

fn exp_report(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    plan: &QuadraturePlan,
    exponent: Real,
) -> Result<ErrorBoundReport> {
    let params = profile.function_exp()?;
    let fourier = profile.fourier_exp()?;
    let constant_cs_omega = discretization_constant(ctx, profile)?;
    let discretization_bound = discretization_bound(ctx, profile, &plan.h)?;
    let truncation_bound = truncation_bound_exp(ctx, profile, &plan.h_per_dim, &plan.n_per_dim)?;
    let constant_trunc = truncation_constant_exp(ctx, profile, &plan.h_per_dim)?;

    // C(s) = 4s Π (a_j^{1/b_j} + 2Γ(1/d_j)/(d_j c_j^{1/d_j})) + 4e Σ_u Π Γ(1/b_j)/b_j
    let mut product = ctx.real(4 * profile.dims() as u64);
    for (f, p) in fourier.iter().zip(params) {
        let anchor = ctx.pow(&f.a, &ctx.real(f.b.recip_ref()));
        product *= gamma_ratio(ctx, &p.c, &p.d)? * 2u32 + anchor;
    }
    let rate_constant = product + subset_gamma_sum(ctx, profile)? * ctx.e() * 4u32;

    finish_report(
        ctx,
        profile,
        discretization_bound,
        truncation_bound,
        constant_cs_omega,
        constant_trunc,
        exponent,
        rate_constant,
    )
}

fn dexp_report(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    plan: &QuadraturePlan,
    exponent: Real,
) -> Result<ErrorBoundReport> {
    let params = profile.function_dexp()?;
    let fourier = profile.fourier_exp()?;
    let constant_cs_omega = discretization_constant(ctx, profile)?;
    let discretization_bound = discretization_bound(ctx, profile, &plan.h)?;
    let truncation_bound = truncation_bound_dexp(ctx, profile, &plan.h_per_dim, &plan.n_per_dim)?;
    let constant_trunc = truncation_constant_dexp(ctx, profile, &plan.h_per_dim)?;

    // C'(s) = 4s Π e^{-e_j} (a_j^{1/b_j} + 2Γ(1/d_j)/((e_j c_j)^{1/d_j} d_j)) + 4e Σ_u Π Γ(1/b_j)/b_j
    let mut product = ctx.real(4 * profile.dims() as u64);
    for (f, p) in fourier.iter().zip(params) {
        let anchor = ctx.pow(&f.a, &ctx.real(f.b.recip_ref()));
        let ec = ctx.real(&p.e * &p.c);
        let factor = gamma_ratio(ctx, &ec, &p.d)? * 2u32 + anchor;
        product *= factor * ctx.real(-p.e.clone()).exp();
    }
    let rate_constant = product + subset_gamma_sum(ctx, profile)? * ctx.e() * 4u32;

    finish_report(
        ctx,
        profile,
        discretization_bound,
        truncation_bound,
        constant_cs_omega,
        constant_trunc,
        exponent,
        rate_constant,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    discretization_bound: Real,
    truncation_bound: Real,
    constant_cs_omega: Real,
    constant_trunc: Real,
    exponent_predicted: Real,
    rate_constant: Real,
) -> Result<ErrorBoundReport> {
    let total_bound = ctx.real(&discretization_bound + &truncation_bound);
    let norms = ctx.real(profile.norm_f_nu() + profile.norm_fhat_omega());
    let predicted_rate_bound = rate_constant * ctx.real(-exponent_predicted.clone()).exp() * norms;
    Ok(ErrorBoundReport {
        discretization_bound,
        truncation_bound,
        total_bound,
        constant_cs_omega,
        constant_trunc,
        exponent_predicted,
        predicted_rate_bound,
    })
}

/// `h^{-1}` minus the truncation-side exponent of the balance equation, in
/// absolute value.
///
/// `Exp`: `h^{-1} - C♯ h^{B/D} N^{1/D}`. `Dexp`: `h^{-1} - e_* exp(C♯ h^{B/D} N^{1/D})`.
pub fn balance_residual(
    ctx: PrecisionContext,
    plan: &QuadraturePlan,
    agg: &Aggregates,
    mode: BalanceMode,
) -> Result<Real> {
    let b_over_d = ctx.real(&agg.b_sum / &agg.d_sum);
    let inv_d = ctx.real(agg.d_sum.recip_ref());
    let side = ctx.pow(&plan.h, &b_over_d) * ctx.pow(&ctx.real(plan.budget), &inv_d) * &agg.c_sharp;
    let rhs = match mode {
        BalanceMode::Exp => side,
        BalanceMode::Dexp => {
            let e_star = agg
                .e_star
                .as_ref()
                .ok_or_else(|| Error::UnsupportedDecayClass("dexp balance without e_*".into()))?;
            side.exp() * e_star
        }
    };
    Ok((ctx.real(plan.h.recip_ref()) - rhs).abs())
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    h: RealText,
    h_per_dim: Vec<RealText>,
    n_per_dim: Vec<u64>,
    half_width_per_dim: Vec<u64>,
    budget: u64,
    lambda: RealText,
    points_total: u64,
}

#[derive(Serialize, Deserialize)]
struct ReportDoc {
    discretization_bound: RealText,
    truncation_bound: RealText,
    total_bound: RealText,
    #[serde(rename = "constant_Cs_omega")]
    constant_cs_omega: RealText,
    constant_trunc: RealText,
    exponent_predicted: RealText,
    predicted_rate_bound: RealText,
}

impl QuadraturePlan {
    pub fn to_json(&self, ctx: PrecisionContext) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc(ctx))?)
    }

    pub fn from_json(ctx: PrecisionContext, text: &str) -> Result<Self> {
        let doc: PlanDoc = serde_json::from_str(text)?;
        Self::from_doc(ctx, doc)
    }

    fn to_doc(&self, ctx: PrecisionContext) -> PlanDoc {
        PlanDoc {
            h: RealText::from_real(ctx, &self.h),
            h_per_dim: wire::texts(ctx, &self.h_per_dim),
            n_per_dim: self.n_per_dim.clone(),
            half_width_per_dim: self.half_width_per_dim.clone(),
            budget: self.budget,
            lambda: RealText::from_real(ctx, &self.lambda),
            points_total: self.points_total,
        }
    }

    fn from_doc(ctx: PrecisionContext, doc: PlanDoc) -> Result<Self> {
        Ok(QuadraturePlan {
            h: doc.h.to_real(ctx)?,
            h_per_dim: wire::reals(ctx, &doc.h_per_dim)?,
            n_per_dim: doc.n_per_dim,
            half_width_per_dim: doc.half_width_per_dim,
            budget: doc.budget,
            lambda: doc.lambda.to_real(ctx)?,
            points_total: doc.points_total,
        })
    }

    /// `(field, value)` rows in declaration order.
    pub fn fields(&self, ctx: PrecisionContext) -> Vec<(&'static str, String)> {
        let list = |xs: Vec<String>| xs.join(" ");
        vec![
            ("h", ctx.format(&self.h)),
            (
                "h_per_dim",
                list(self.h_per_dim.iter().map(|h| ctx.format(h)).collect()),
            ),
            (
                "n_per_dim",
                list(self.n_per_dim.iter().map(u64::to_string).collect()),
            ),
            (
                "half_width_per_dim",
                list(self.half_width_per_dim.iter().map(u64::to_string).collect()),
            ),
            ("budget", self.budget.to_string()),
            ("lambda", ctx.format(&self.lambda)),
            ("points_total", self.points_total.to_string()),
        ]
    }
}

impl ErrorBoundReport {
    pub fn to_json(&self, ctx: PrecisionContext) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc(ctx))?)
    }

    pub fn from_json(ctx: PrecisionContext, text: &str) -> Result<Self> {
        let doc: ReportDoc = serde_json::from_str(text)?;
        Ok(ErrorBoundReport {
            discretization_bound: doc.discretization_bound.to_real(ctx)?,
            truncation_bound: doc.truncation_bound.to_real(ctx)?,
            total_bound: doc.total_bound.to_real(ctx)?,
            constant_cs_omega: doc.constant_cs_omega.to_real(ctx)?,
            constant_trunc: doc.constant_trunc.to_real(ctx)?,
            exponent_predicted: doc.exponent_predicted.to_real(ctx)?,
            predicted_rate_bound: doc.predicted_rate_bound.to_real(ctx)?,
        })
    }

    fn to_doc(&self, ctx: PrecisionContext) -> ReportDoc {
        let t = |x: &Real| RealText::from_real(ctx, x);
        ReportDoc {
            discretization_bound: t(&self.discretization_bound),
            truncation_bound: t(&self.truncation_bound),
            total_bound: t(&self.total_bound),
            constant_cs_omega: t(&self.constant_cs_omega),
            constant_trunc: t(&self.constant_trunc),
            exponent_predicted: t(&self.exponent_predicted),
            predicted_rate_bound: t(&self.predicted_rate_bound),
        }
    }

    pub fn fields(&self, ctx: PrecisionContext) -> Vec<(&'static str, String)> {
        vec![
            (
                "discretization_bound",
                ctx.format(&self.discretization_bound),
            ),
            ("truncation_bound", ctx.format(&self.truncation_bound)),
            ("total_bound", ctx.format(&self.total_bound)),
            ("constant_Cs_omega", ctx.format(&self.constant_cs_omega)),
            ("constant_trunc", ctx.format(&self.constant_trunc)),
            ("exponent_predicted", ctx.format(&self.exponent_predicted)),
            (
                "predicted_rate_bound",
                ctx.format(&self.predicted_rate_bound),
            ),
        ]
    }
}

/// Plan and report as one JSON object with keys `plan` and `report`.
pub fn plan_report_json(
    ctx: PrecisionContext,
    plan: &QuadraturePlan,
    report: &ErrorBoundReport,
) -> Result<String> {
    #[derive(Serialize)]
    struct Both {
        plan: PlanDoc,
        report: ReportDoc,
    }
    Ok(serde_json::to_string_pretty(&Both {
        plan: plan.to_doc(ctx),
        report: report.to_doc(ctx),
    })?)
}
