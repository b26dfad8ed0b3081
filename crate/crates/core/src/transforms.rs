//! Changes of variables that carry an integral over `(0, ∞)` onto the whole
//! real line with double-exponential decay.
//!
//! * `de_exp`: `x = exp(u - exp(-u))`.
//! * `ooura_fourier`: `x = M φ(u)` with
//!   `φ(u) = u / (1 - exp(-2u - α(1 - e^{-u}) - β(e^u - 1)))`, which places the
//!   nodes `u = kπ/M` asymptotically on the zeros of `sin(x)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::{AxisFn, Domain, Integrand, PointFn};
use crate::numerics::{PrecisionContext, Real};
use crate::wire::RealText;

#[derive(Clone, Debug, PartialEq)]
pub struct OouraParams {
    pub m: Real,
    pub alpha: Real,
    pub beta: Real,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Transform1D {
    Identity,
    DeExp,
    OouraFourier(OouraParams),
}

impl Transform1D {
    pub fn kind(&self) -> &'static str {
        match self {
            Transform1D::Identity => "identity",
            Transform1D::DeExp => "de_exp",
            Transform1D::OouraFourier(_) => "ooura_fourier",
        }
    }

    /// Domain the base integrand must live on along this axis.
    pub fn source_domain(&self) -> Domain {
        match self {
            Transform1D::Identity => Domain::Whole,
            Transform1D::DeExp | Transform1D::OouraFourier(_) => Domain::Positive,
        }
    }

    /// `(x(u), x'(u))`.
    pub fn eval(&self, ctx: PrecisionContext, u: &Real) -> (Real, Real) {
        match self {
            Transform1D::Identity => (ctx.real(u), ctx.real(1)),
            Transform1D::DeExp => de_exp_eval(ctx, u),
            Transform1D::OouraFourier(p) => {
                let (phi, dphi) = ooura_eval(ctx, p, u);
                (phi * &p.m, dphi * &p.m)
            }
        }
    }
}

/// `x = exp(u - e^{-u})`, `dx/du = (1 + e^{-u}) x`.
pub fn de_exp_eval(ctx: PrecisionContext, u: &Real) -> (Real, Real) {
    let emu = ctx.real(-u).exp();
    let x = ctx.real(u - &emu).exp();
    if x.is_zero() {
        return (x, ctx.real(0));
    }
    let dx = ctx.real(emu + 1u32) * &x;
    (x, dx)
}

/// Parameters for node spacing `h`: `M = π/h`, `β = 1/4`,
/// `α = β / sqrt(1 + M ln(1 + M) / (4π))`.
pub fn ooura_params(ctx: PrecisionContext, h: &Real) -> Result<OouraParams> {
    if h.is_nan() || *h <= 0 || h.is_infinite() {
        return Err(Error::domain("ooura_params", "h must be positive"));
    }
    let pi = ctx.pi();
    let m = ctx.real(&pi / h);
    Ok(ooura_from_m(ctx, m))
}

pub fn ooura_from_m(ctx: PrecisionContext, m: Real) -> OouraParams {
    let beta = ctx.ratio(1, 4);
    let log_term = ctx.real(ctx.real(&m + 1u32).ln() * &m) / (ctx.pi() * 4u32);
    let alpha = ctx.real(&beta / (log_term + 1u32).sqrt());
    OouraParams { m, alpha, beta }
}

/// `(φ(u), φ'(u))`, without the factor `M`.
///
/// Near `u = 0` the quotient loses about `log2(1/|u|)` bits, so it is
/// evaluated with that many extra bits. Below `2^-prec` the linear Taylor
/// form `φ(u) ≈ 1/t_1 + (1/2 - t_2/t_1^2) u` is exact to working precision.
pub fn ooura_eval(ctx: PrecisionContext, p: &OouraParams, u: &Real) -> (Real, Real) {
    let bits = ctx.bits();
    let t1 = ctx.real(&p.alpha + &p.beta) + 2u32;
    let t2 = ctx.real(&p.beta - &p.alpha) / 2u32;
    let slope0 = ctx.ratio(1, 2) - ctx.real(&t2 / ctx.real(t1.square_ref()));

    let exponent = if u.is_zero() {
        i32::MIN
    } else {
        u.get_exp().unwrap_or(0)
    };
    if exponent < -(bits as i32) {
        let phi = ctx.real(t1.recip_ref()) + ctx.real(&slope0 * u);
        return (phi, slope0);
    }

    let extra = exponent.min(0).unsigned_abs();
    let wp = bits + extra + 16;
    let w = |x: &Real| Real::with_val(wp, x);
    let (u, alpha, beta) = (w(u), w(&p.alpha), w(&p.beta));

    // t = 2u - α expm1(-u) + β expm1(u)
    let em1_neg = Real::with_val(wp, (-u.clone()).exp_m1_ref());
    let em1_pos = Real::with_val(wp, u.exp_m1_ref());
    let t = Real::with_val(wp, &u * 2u32) - Real::with_val(wp, &alpha * &em1_neg)
        + Real::with_val(wp, &beta * &em1_pos);
    let big_e = Real::with_val(wp, (-t.clone()).exp_ref());
    if big_e.is_infinite() {
        return (ctx.real(0), ctx.real(0));
    }
    if big_e.is_zero() {
        return (ctx.real(&u), ctx.real(1));
    }
    let q = -Real::with_val(wp, (-t).exp_m1_ref());
    let phi = Real::with_val(wp, &u / &q);

    // φ' = 1/q - u E t' / q², t' = 2 + α e^{-u} + β e^{u}
    let t_prime = Real::with_val(wp, &alpha * (em1_neg + 1u32))
        + Real::with_val(wp, &beta * (em1_pos + 1u32))
        + 2u32;
    let q_sq = Real::with_val(wp, q.square_ref());
    let dphi = Real::with_val(wp, q.recip_ref()) - u * big_e * t_prime / q_sq;
    (ctx.real(phi), ctx.real(dphi))
}

/// One transform per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformChain(pub Vec<Transform1D>);

impl TransformChain {
    pub fn uniform(transform: Transform1D, dims: usize) -> Self {
        TransformChain(vec![transform; dims])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn transforms(&self) -> &[Transform1D] {
        &self.0
    }

    pub fn to_json(&self, ctx: PrecisionContext) -> Result<String> {
        Ok(serde_json::to_string(&self.to_doc(ctx))?)
    }

    pub fn from_json(ctx: PrecisionContext, text: &str) -> Result<Self> {
        let doc: ChainDoc = serde_json::from_str(text)?;
        Self::from_doc(ctx, doc)
    }

    pub(crate) fn to_doc(&self, ctx: PrecisionContext) -> ChainDoc {
        let transforms = self
            .0
            .iter()
            .map(|t| match t {
                Transform1D::Identity => TransformDoc::Identity,
                Transform1D::DeExp => TransformDoc::DeExp,
                Transform1D::OouraFourier(p) => TransformDoc::OouraFourier {
                    m: RealText::from_real(ctx, &p.m),
                    alpha: RealText::from_real(ctx, &p.alpha),
                    beta: RealText::from_real(ctx, &p.beta),
                },
            })
            .collect();
        ChainDoc { transforms }
    }

    pub(crate) fn from_doc(ctx: PrecisionContext, doc: ChainDoc) -> Result<Self> {
        let transforms = doc
            .transforms
            .into_iter()
            .map(|t| {
                Ok(match t {
                    TransformDoc::Identity => Transform1D::Identity,
                    TransformDoc::DeExp => Transform1D::DeExp,
                    TransformDoc::OouraFourier { m, alpha, beta } => {
                        Transform1D::OouraFourier(OouraParams {
                            m: m.to_real(ctx)?,
                            alpha: alpha.to_real(ctx)?,
                            beta: beta.to_real(ctx)?,
                        })
                    }
                })
            })
            .collect::<Result<_>>()?;
        Ok(TransformChain(transforms))
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ChainDoc {
    transforms: Vec<TransformDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TransformDoc {
    Identity,
    DeExp,
    OouraFourier {
        #[serde(rename = "M")]
        m: RealText,
        alpha: RealText,
        beta: RealText,
    },
}

/// `g(u) = f(x(u)) Π_j x_j'(u_j)` over `R^s`; tensor factors are transformed
/// axis by axis. The reference value carries over.
pub fn apply_chain(
    ctx: PrecisionContext,
    chain: &TransformChain,
    base: &Integrand,
) -> Result<Integrand> {
    if chain.len() != base.dims() {
        return Err(Error::DimensionMismatch {
            expected: base.dims(),
            found: chain.len(),
        });
    }
    for (axis, (t, domain)) in chain.0.iter().zip(base.domain()).enumerate() {
        let required = t.source_domain();
        if *domain != required {
            return Err(Error::DomainMismatch {
                axis,
                required: required.name(),
            });
        }
    }

    let factors = base.factors().map(|factors| {
        factors
            .iter()
            .zip(&chain.0)
            .map(|(f, t)| transform_factor(ctx, f.clone(), t.clone()))
            .collect::<Vec<_>>()
    });

    let evaluate: PointFn = match &factors {
        Some(transformed) => {
            let transformed = transformed.clone();
            Arc::new(move |u: &[Real]| {
                let mut acc = transformed[0](&u[0]);
                for (g, uj) in transformed.iter().zip(u).skip(1) {
                    acc *= g(uj);
                }
                acc
            })
        }
        None => {
            let f = base.evaluator().clone();
            let transforms = chain.0.clone();
            Arc::new(move |u: &[Real]| {
                let mut x = Vec::with_capacity(u.len());
                let mut jacobian = ctx.real(1);
                for (t, uj) in transforms.iter().zip(u) {
                    let (xj, dxj) = t.eval(ctx, uj);
                    if dxj.is_zero() {
                        return ctx.real(0);
                    }
                    x.push(xj);
                    jacobian *= dxj;
                }
                f(&x) * jacobian
            })
        }
    };

    Ok(base.replace_parts(evaluate, factors, vec![Domain::Whole; base.dims()]))
}

fn transform_factor(ctx: PrecisionContext, f: AxisFn, t: Transform1D) -> AxisFn {
    Arc::new(move |u: &Real| {
        let (x, dx) = t.eval(ctx, u);
        // x'(u) underflowed; f may be singular at the boundary point x(u).
        if dx.is_zero() {
            return ctx.real(0);
        }
        f(&x) * dx
    })
}
