//! Decay classes for an integrand and its Fourier transform, the planning
//! constants derived from them, and upper bounds for one-dimensional
//! exponential and double-exponential tail sums.
//!
//! Fourier side: polynomial `(1 + |ξ|)^-α` or exponential
//! `exp(-a |ξ|^b)`. Function side: polynomial, exponential `exp(-c |x|^d)`,
//! or double exponential `exp(-e exp(c |x|^d))`. All axes of a profile share
//! one kind.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};
use crate::wire::RealText;

#[derive(Clone, Debug, PartialEq)]
pub struct FourierExp {
    pub a: Real,
    pub b: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FourierDecay {
    Polynomial(Vec<Real>),
    Exponential(Vec<FourierExp>),
}

impl FourierDecay {
    pub fn dims(&self) -> usize {
        match self {
            FourierDecay::Polynomial(alphas) => alphas.len(),
            FourierDecay::Exponential(params) => params.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            FourierDecay::Polynomial(alphas) => alphas.iter().all(positive),
            FourierDecay::Exponential(params) => {
                params.iter().all(|p| positive(&p.a) && positive(&p.b))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProfile(
                "Fourier decay parameters must be positive".into(),
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionExp {
    pub c: Real,
    pub d: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDexp {
    pub e: Real,
    pub c: Real,
    pub d: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionDecay {
    Polynomial(Vec<Real>),
    Exponential(Vec<FunctionExp>),
    DoubleExponential(Vec<FunctionDexp>),
}

impl FunctionDecay {
    pub fn dims(&self) -> usize {
        match self {
            FunctionDecay::Polynomial(alphas) => alphas.len(),
            FunctionDecay::Exponential(params) => params.len(),
            FunctionDecay::DoubleExponential(params) => params.len(),
        }
    }

    /// `(c_j, d_j)` for the exponential and double-exponential classes.
    pub fn rates(&self) -> Option<Vec<(Real, Real)>> {
        match self {
            FunctionDecay::Polynomial(_) => None,
            FunctionDecay::Exponential(params) => {
                Some(params.iter().map(|p| (p.c.clone(), p.d.clone())).collect())
            }
            FunctionDecay::DoubleExponential(params) => {
                Some(params.iter().map(|p| (p.c.clone(), p.d.clone())).collect())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            FunctionDecay::Polynomial(alphas) => alphas.iter().all(positive),
            FunctionDecay::Exponential(params) => params.iter().all(|p| positive(&p.c) && p.d >= 1),
            FunctionDecay::DoubleExponential(params) => params
                .iter()
                .all(|p| positive(&p.e) && positive(&p.c) && p.d >= 1),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProfile(
                "function decay parameters must be positive with d >= 1".into(),
            ))
        }
    }
}

fn positive(x: &Real) -> bool {
    x.is_finite() && *x > 0
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayProfile {
    dims: usize,
    fourier: FourierDecay,
    function: FunctionDecay,
    norm_f_nu: Real,
    norm_fhat_omega: Real,
}

impl DecayProfile {
    /// Profile with both norm bounds set to 1.
    pub fn new(
        ctx: PrecisionContext,
        fourier: FourierDecay,
        function: FunctionDecay,
    ) -> Result<Self> {
        let dims = fourier.dims();
        if dims == 0 {
            return Err(Error::InvalidProfile(
                "at least one dimension is required".into(),
            ));
        }
        if function.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: function.dims(),
            });
        }
        fourier.validate()?;
        function.validate()?;
        Ok(DecayProfile {
            dims,
            fourier,
            function,
            norm_f_nu: ctx.real(1),
            norm_fhat_omega: ctx.real(1),
        })
    }

    /// Same `(a, b, c, d)` on every axis.
    pub fn isotropic_exp(
        ctx: PrecisionContext,
        dims: usize,
        a: &Real,
        b: &Real,
        c: &Real,
        d: &Real,
    ) -> Result<Self> {
        let fourier = FourierDecay::Exponential(vec![
            FourierExp {
                a: a.clone(),
                b: b.clone()
            };
            dims
        ]);
        let function = FunctionDecay::Exponential(vec![
            FunctionExp {
                c: c.clone(),
                d: d.clone()
            };
            dims
        ]);
        Self::new(ctx, fourier, function)
    }

    /// Same `(a, b, e, c, d)` on every axis.
    pub fn isotropic_dexp(
        ctx: PrecisionContext,
        dims: usize,
        a: &Real,
        b: &Real,
        e: &Real,
        c: &Real,
        d: &Real,
    ) -> Result<Self> {
        let fourier = FourierDecay::Exponential(vec![
            FourierExp {
                a: a.clone(),
                b: b.clone()
            };
            dims
        ]);
        let function = FunctionDecay::DoubleExponential(vec![
            FunctionDexp {
                e: e.clone(),
                c: c.clone(),
                d: d.clone()
            };
            dims
        ]);
        Self::new(ctx, fourier, function)
    }

    pub fn with_norms(mut self, norm_f_nu: Real, norm_fhat_omega: Real) -> Result<Self> {
        if !positive(&norm_f_nu) || !positive(&norm_fhat_omega) {
            return Err(Error::InvalidProfile("norm bounds must be positive".into()));
        }
        self.norm_f_nu = norm_f_nu;
        self.norm_fhat_omega = norm_fhat_omega;
        Ok(self)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn fourier(&self) -> &FourierDecay {
        &self.fourier
    }

    pub fn function(&self) -> &FunctionDecay {
        &self.function
    }

    pub fn norm_f_nu(&self) -> &Real {
        &self.norm_f_nu
    }

    pub fn norm_fhat_omega(&self) -> &Real {
        &self.norm_fhat_omega
    }

    pub(crate) fn fourier_exp(&self) -> Result<&[FourierExp]> {
        match &self.fourier {
            FourierDecay::Exponential(params) => Ok(params),
            FourierDecay::Polynomial(_) => Err(Error::UnsupportedDecayClass(
                "polynomial Fourier decay".into(),
            )),
        }
    }

    pub(crate) fn function_exp(&self) -> Result<&[FunctionExp]> {
        match &self.function {
            FunctionDecay::Exponential(params) => Ok(params),
            _ => Err(Error::UnsupportedDecayClass(
                "function decay other than exponential".into(),
            )),
        }
    }

    pub(crate) fn function_dexp(&self) -> Result<&[FunctionDexp]> {
        match &self.function {
            FunctionDecay::DoubleExponential(params) => Ok(params),
            _ => Err(Error::UnsupportedDecayClass(
                "function decay other than double exponential".into(),
            )),
        }
    }

    pub fn to_json(&self, ctx: PrecisionContext) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ProfileDoc::from_profile(
            ctx, self,
        ))?)
    }

    pub fn from_json(ctx: PrecisionContext, text: &str) -> Result<Self> {
        let doc: ProfileDoc = serde_json::from_str(text)?;
        doc.into_profile(ctx)
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    dims: usize,
    fourier: Vec<FourierAxisDoc>,
    function: Vec<FunctionAxisDoc>,
    #[serde(default)]
    norm_f_nu: Option<RealText>,
    #[serde(default)]
    norm_fhat_omega: Option<RealText>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FourierAxisDoc {
    Poly { alpha: RealText },
    Exp { a: RealText, b: RealText },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FunctionAxisDoc {
    Poly {
        alpha: RealText,
    },
    Exp {
        c: RealText,
        d: RealText,
    },
    Dexp {
        e: RealText,
        c: RealText,
        d: RealText,
    },
}

impl ProfileDoc {
    fn from_profile(ctx: PrecisionContext, p: &DecayProfile) -> Self {
        let t = |x: &Real| RealText::from_real(ctx, x);
        let fourier = match &p.fourier {
            FourierDecay::Polynomial(alphas) => alphas
                .iter()
                .map(|alpha| FourierAxisDoc::Poly { alpha: t(alpha) })
                .collect(),
            FourierDecay::Exponential(params) => params
                .iter()
                .map(|q| FourierAxisDoc::Exp {
                    a: t(&q.a),
                    b: t(&q.b),
                })
                .collect(),
        };
        let function = match &p.function {
            FunctionDecay::Polynomial(alphas) => alphas
                .iter()
                .map(|alpha| FunctionAxisDoc::Poly { alpha: t(alpha) })
                .collect(),
            FunctionDecay::Exponential(params) => params
                .iter()
                .map(|q| FunctionAxisDoc::Exp {
                    c: t(&q.c),
                    d: t(&q.d),
                })
                .collect(),
            FunctionDecay::DoubleExponential(params) => params
                .iter()
                .map(|q| FunctionAxisDoc::Dexp {
                    e: t(&q.e),
                    c: t(&q.c),
                    d: t(&q.d),
                })
                .collect(),
        };
        ProfileDoc {
            dims: p.dims,
            fourier,
            function,
            norm_f_nu: Some(t(&p.norm_f_nu)),
            norm_fhat_omega: Some(t(&p.norm_fhat_omega)),
        }
    }

    fn into_profile(self, ctx: PrecisionContext) -> Result<DecayProfile> {
        let mixed = || Error::InvalidProfile("all axes must share one decay kind".into());

        let fourier = match self.fourier.first() {
            None => return Err(Error::InvalidProfile("empty Fourier decay list".into())),
            Some(FourierAxisDoc::Poly { .. }) => FourierDecay::Polynomial(
                self.fourier
                    .iter()
                    .map(|axis| match axis {
                        FourierAxisDoc::Poly { alpha } => alpha.to_real(ctx),
                        _ => Err(mixed()),
                    })
                    .collect::<Result<_>>()?,
            ),
            Some(FourierAxisDoc::Exp { .. }) => FourierDecay::Exponential(
                self.fourier
                    .iter()
                    .map(|axis| match axis {
                        FourierAxisDoc::Exp { a, b } => Ok(FourierExp {
                            a: a.to_real(ctx)?,
                            b: b.to_real(ctx)?,
                        }),
                        _ => Err(mixed()),
                    })
                    .collect::<Result<_>>()?,
            ),
        };

        let function = match self.function.first() {
            None => return Err(Error::InvalidProfile("empty function decay list".into())),
            Some(FunctionAxisDoc::Poly { .. }) => FunctionDecay::Polynomial(
                self.function
                    .iter()
                    .map(|axis| match axis {
                        FunctionAxisDoc::Poly { alpha } => alpha.to_real(ctx),
                        _ => Err(mixed()),
                    })
                    .collect::<Result<_>>()?,
            ),
            Some(FunctionAxisDoc::Exp { .. }) => FunctionDecay::Exponential(
                self.function
                    .iter()
                    .map(|axis| match axis {
                        FunctionAxisDoc::Exp { c, d } => Ok(FunctionExp {
                            c: c.to_real(ctx)?,
                            d: d.to_real(ctx)?,
                        }),
                        _ => Err(mixed()),
                    })
                    .collect::<Result<_>>()?,
            ),
            Some(FunctionAxisDoc::Dexp { .. }) => FunctionDecay::DoubleExponential(
                self.function
                    .iter()
                    .map(|axis| match axis {
                        FunctionAxisDoc::Dexp { e, c, d } => Ok(FunctionDexp {
                            e: e.to_real(ctx)?,
                            c: c.to_real(ctx)?,
                            d: d.to_real(ctx)?,
                        }),
                        _ => Err(mixed()),
                    })
                    .collect::<Result<_>>()?,
            ),
        };

        let profile = DecayProfile::new(ctx, fourier, function)?;
        if profile.dims != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                found: profile.dims,
            });
        }
        let norm_f_nu = match self.norm_f_nu {
            Some(v) => v.to_real(ctx)?,
            None => ctx.real(1),
        };
        let norm_fhat_omega = match self.norm_fhat_omega {
            Some(v) => v.to_real(ctx)?,
            None => ctx.real(1),
        };
        profile.with_norms(norm_f_nu, norm_fhat_omega)
    }
}

/// Planning constants derived from a profile and the floor factor `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregates {
    /// `Σ 1/b_j`.
    pub b_sum: Real,
    /// `Σ 1/d_j`.
    pub d_sum: Real,
    /// `C_j = c_j^{1/d_j} a_j^{1/b_j} / 2`.
    pub c_per_dim: Vec<Real>,
    pub c_star: Real,
    /// `min_j (λ C_*)^{d_j}`.
    pub c_sharp: Real,
    /// `min_j e_j`, double-exponential profiles only.
    pub e_star: Option<Real>,
    pub lambda: Real,
}

pub fn aggregates(
    ctx: PrecisionContext,
    profile: &DecayProfile,
    lambda: &Real,
) -> Result<Aggregates> {
    if !positive(lambda) || *lambda > 1 {
        return Err(Error::domain("aggregates", "lambda must lie in (0, 1]"));
    }
    let fourier = profile.fourier_exp()?;
    let rates = profile
        .function
        .rates()
        .ok_or_else(|| Error::UnsupportedDecayClass("polynomial function decay".into()))?;

    let mut b_sum = ctx.real(0);
    let mut d_sum = ctx.real(0);
    let mut c_per_dim = Vec::with_capacity(profile.dims);
    for (f, (c, d)) in fourier.iter().zip(&rates) {
        b_sum += ctx.real(f.b.recip_ref());
        d_sum += ctx.real(d.recip_ref());
        let c_part = ctx.pow(c, &ctx.real(d.recip_ref()));
        let a_part = ctx.pow(&f.a, &ctx.real(f.b.recip_ref()));
        c_per_dim.push(c_part * a_part / 2u32);
    }
    let c_star = min_of(&c_per_dim);
    let scaled = ctx.real(lambda * &c_star);
    let sharp: Vec<Real> = rates.iter().map(|(_, d)| ctx.pow(&scaled, d)).collect();
    let c_sharp = min_of(&sharp);
    let e_star = profile
        .function_dexp()
        .ok()
        .map(|params| min_of(&params.iter().map(|p| p.e.clone()).collect::<Vec<_>>()));

    Ok(Aggregates {
        b_sum,
        d_sum,
        c_per_dim,
        c_star,
        c_sharp,
        e_star,
        lambda: ctx.real(lambda),
    })
}

pub(crate) fn min_of(values: &[Real]) -> Real {
    let mut best = values[0].clone();
    for v in &values[1..] {
        if *v < best {
            best = v.clone();
        }
    }
    best
}

/// Upper bound on `Σ_{k≥1} exp(-k^b / h)` for `b > 0`, `0 < h ≤ 1`.
pub fn tail_bound_exp_unit(ctx: PrecisionContext, b: &Real, h: &Real) -> Result<Real> {
    if !positive(b) {
        return Err(Error::domain("tail_bound_exp_unit", "b must be positive"));
    }
    if !positive(h) || *h > 1 {
        return Err(Error::domain("tail_bound_exp_unit", "h must lie in (0, 1]"));
    }
    let decay = ctx.real(-ctx.real(h.recip_ref())).exp();
    let inv_b = ctx.real(b.recip_ref());
    Ok(decay * ctx.e() * ctx.gamma(&inv_b)? / b)
}

/// Upper bound on `Σ_{k≥n} exp(-c k^d)` for `c > 0`, `d ≥ 1`, `n ≥ 0`.
pub fn tail_bound_exp(ctx: PrecisionContext, c: &Real, d: &Real, n: &Real) -> Result<Real> {
    check_tail_args("tail_bound_exp", c, d, n)?;
    let decay = ctx.real(-ctx.pow(n, d) * c).exp();
    Ok(decay * tail_factor(ctx, c, d)?)
}

/// Upper bound on `Σ_{k≥n} exp(-α exp(c k^d))` for `α, c > 0`, `d ≥ 1`,
/// `n ≥ 0`.
///
/// From `e^x - e^y ≥ x - y` for `x ≥ y ≥ 0` the sum is at most
/// `exp(-α e^{c n^d}) Σ_{m≥0} exp(-α c m^d)`.
pub fn tail_bound_dexp(
    ctx: PrecisionContext,
    alpha: &Real,
    c: &Real,
    d: &Real,
    n: &Real,
) -> Result<Real> {
    if !positive(alpha) {
        return Err(Error::domain("tail_bound_dexp", "alpha must be positive"));
    }
    check_tail_args("tail_bound_dexp", c, d, n)?;
    let inner = ctx.real(ctx.pow(n, d) * c).exp();
    let decay = ctx.real(-inner * alpha).exp();
    let ac = ctx.real(alpha * c);
    Ok(decay * tail_factor(ctx, &ac, d)?)
}

/// The double-exponential tail bound with an additional `e^{-α}` factor.
/// It is not an upper bound in general (it fails at `α = c = d = n = 1`);
/// kept for comparison with [`tail_bound_dexp`].
pub fn tail_bound_dexp_uncorrected(
    ctx: PrecisionContext,
    alpha: &Real,
    c: &Real,
    d: &Real,
    n: &Real,
) -> Result<Real> {
    let corrected = tail_bound_dexp(ctx, alpha, c, d, n)?;
    Ok(corrected * ctx.real(-alpha.clone()).exp())
}

fn check_tail_args(op: &'static str, c: &Real, d: &Real, n: &Real) -> Result<()> {
    if !positive(c) {
        return Err(Error::domain(op, "c must be positive"));
    }
    if !(d.is_finite() && *d >= 1) {
        return Err(Error::domain(op, "d must be at least 1"));
    }
    if n.is_nan() || *n < 0 {
        return Err(Error::domain(op, "n must be non-negative"));
    }
    Ok(())
}

/// `1 + Γ(1/d) / (c^{1/d} d)`.
fn tail_factor(ctx: PrecisionContext, c: &Real, d: &Real) -> Result<Real> {
    let inv_d = ctx.real(d.recip_ref());
    let root = ctx.pow(c, &inv_d);
    Ok(ctx.gamma(&inv_d)? / root / d + 1u32)
}

/// The one-dimensional series the tail bounds control.
#[derive(Clone, Debug)]
pub enum TailSeries {
    /// Terms `exp(-k^b / h)`.
    ExpUnit { b: Real, h: Real },
    /// Terms `exp(-c k^d)`.
    Exp { c: Real, d: Real },
    /// Terms `exp(-α exp(c k^d))`.
    Dexp { alpha: Real, c: Real, d: Real },
}

impl TailSeries {
    pub fn term(&self, ctx: PrecisionContext, k: u64) -> Real {
        let k = ctx.real(k);
        match self {
            TailSeries::ExpUnit { b, h } => ctx.real(-ctx.pow(&k, b) / h).exp(),
            TailSeries::Exp { c, d } => ctx.real(-ctx.pow(&k, d) * c).exp(),
            TailSeries::Dexp { alpha, c, d } => {
                let inner = ctx.real(ctx.pow(&k, d) * c).exp();
                ctx.real(-inner * alpha).exp()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct TailSum {
    pub sum: Real,
    pub terms: u64,
    /// The last term fell below `10^-digits` of the running sum.
    pub converged: bool,
}

/// `Σ_{k=start}^{start+terms-1}` of the series, summed directly.
pub fn brute_force_tail(
    ctx: PrecisionContext,
    series: &TailSeries,
    start: u64,
    terms: u64,
) -> TailSum {
    let eps = ctx.tolerance(0);
    let mut sum = ctx.real(0);
    let mut last = ctx.real(0);
    for k in start..start + terms {
        last = series.term(ctx, k);
        sum += &last;
    }
    let converged = last.is_zero() || last < ctx.real(&eps * &sum);
    TailSum {
        sum,
        terms,
        converged,
    }
}

/// Sums from `start` until a term drops below `10^-digits` of the running
/// sum, or `max_terms` terms have been added.
pub fn brute_force_tail_to_convergence(
    ctx: PrecisionContext,
    series: &TailSeries,
    start: u64,
    max_terms: u64,
) -> TailSum {
    let eps = ctx.tolerance(0);
    let mut sum = ctx.real(0);
    for (count, k) in (start..start + max_terms).enumerate() {
        let term = series.term(ctx, k);
        sum += &term;
        if term.is_zero() || term < ctx.real(&eps * &sum) {
            return TailSum {
                sum,
                terms: count as u64 + 1,
                converged: true,
            };
        }
    }
    TailSum {
        sum,
        terms: max_terms,
        converged: false,
    }
}
