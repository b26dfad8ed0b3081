//! Built-in test integrands with closed-form integrals.
//!
//! | name             | integrand                       | domain   | integral        |
//! |------------------|---------------------------------|----------|-----------------|
//! | `gaussian`       | `exp(-Σ x_j²)`                  | `R^s`    | `π^{s/2}`       |
//! | `gaussian_aniso` | `exp(-Σ σ_j x_j²)`              | `R^s`    | `Π sqrt(π/σ_j)` |
//! | `exp_moment`     | `Π x_j² e^{-x_j}`               | `R₊^s`   | `2^s`           |
//! | `sinc`           | `Π sin(x_j)/x_j`                | `R₊^s`   | `(π/2)^s`       |
//!
//! `exp_moment` is integrated after the `de_exp` map on every axis, `sinc`
//! after the oscillatory map with `M_j = π/h_j` rebuilt for each step size.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::decay_model::{DecayProfile, FourierDecay, FourierExp, FunctionDecay, FunctionExp};
use crate::error::{Error, Result};
use crate::integrand::{AxisFn, Domain, Integrand};
use crate::numerics::{PrecisionContext, Real};
use crate::transforms::{apply_chain, ooura_params, Transform1D, TransformChain};
use crate::wire::RealText;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegrandKind {
    Gaussian,
    GaussianAniso,
    ExpMoment,
    Sinc,
}

impl IntegrandKind {
    pub const ALL: [IntegrandKind; 4] = [
        IntegrandKind::Gaussian,
        IntegrandKind::GaussianAniso,
        IntegrandKind::ExpMoment,
        IntegrandKind::Sinc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntegrandKind::Gaussian => "gaussian",
            IntegrandKind::GaussianAniso => "gaussian_aniso",
            IntegrandKind::ExpMoment => "exp_moment",
            IntegrandKind::Sinc => "sinc",
        }
    }
}

impl FromStr for IntegrandKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntegrandKind::ALL
            .into_iter()
            .find(|kind| kind.name() == s)
            .ok_or_else(|| Error::UnknownIntegrand(s.to_string()))
    }
}

impl fmt::Display for IntegrandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Optional overrides for catalog entries.
#[derive(Clone, Debug, Default)]
pub struct CatalogParams {
    /// Per-axis `σ_j` for `gaussian_aniso`; a single value applies to all axes.
    pub sigma: Option<Vec<Real>>,
    /// Planning parameters of the transformed integrands (`exp_moment`,
    /// `sinc`); each defaults to 1.
    pub a: Option<Real>,
    pub b: Option<Real>,
    pub c: Option<Real>,
    pub d: Option<Real>,
    pub e: Option<Real>,
}

/// Change of variables attached to an entry.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainTemplate {
    None,
    Fixed(TransformChain),
    /// The oscillatory map, rebuilt with `M_j = π/h_j` for each step size.
    OouraPerStep,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: IntegrandKind,
    pub dims: usize,
    /// Integrand before any change of variables.
    pub base: Integrand,
    pub chain: ChainTemplate,
    /// Decay of the integrand that is actually summed.
    pub profile: DecayProfile,
    pub reference_value: Real,
}

impl CatalogEntry {
    pub fn chain_for_steps(
        &self,
        ctx: PrecisionContext,
        h_per_dim: &[Real],
    ) -> Result<Option<TransformChain>> {
        match &self.chain {
            ChainTemplate::None => Ok(None),
            ChainTemplate::Fixed(chain) => Ok(Some(chain.clone())),
            ChainTemplate::OouraPerStep => {
                if h_per_dim.len() != self.dims {
                    return Err(Error::DimensionMismatch {
                        expected: self.dims,
                        found: h_per_dim.len(),
                    });
                }
                let transforms = h_per_dim
                    .iter()
                    .map(|h| ooura_params(ctx, h).map(Transform1D::OouraFourier))
                    .collect::<Result<_>>()?;
                Ok(Some(TransformChain(transforms)))
            }
        }
    }

    /// The integrand to sum on the lattice with steps `h_per_dim`.
    pub fn integrand_for_steps(
        &self,
        ctx: PrecisionContext,
        h_per_dim: &[Real],
    ) -> Result<Integrand> {
        let transformed = match self.chain_for_steps(ctx, h_per_dim)? {
            None => self.base.clone(),
            Some(chain) => apply_chain(ctx, &chain, &self.base)?,
        };
        transformed.with_profile(self.profile.clone())
    }

    pub fn to_json(&self, ctx: PrecisionContext) -> Result<String> {
        #[derive(Serialize)]
        struct EntryDoc {
            name: String,
            dims: usize,
            reference_value: RealText,
            profile: serde_json::Value,
            #[serde(skip_serializing_if = "Option::is_none")]
            transforms: Option<serde_json::Value>,
        }
        let transforms = match &self.chain {
            ChainTemplate::None => None,
            ChainTemplate::Fixed(chain) => Some(serde_json::to_value(chain.to_doc(ctx))?),
            ChainTemplate::OouraPerStep => Some(
                serde_json::json!({ "transforms": vec![serde_json::json!({"kind": "ooura_fourier", "M": "pi/h"}); self.dims] }),
            ),
        };
        let doc = EntryDoc {
            name: self.name.clone(),
            dims: self.dims,
            reference_value: RealText::from_real(ctx, &self.reference_value),
            profile: serde_json::from_str(&self.profile.to_json(ctx)?)?,
            transforms,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

pub fn catalog_lookup(
    ctx: PrecisionContext,
    name: &str,
    dims: usize,
    params: &CatalogParams,
) -> Result<CatalogEntry> {
    let kind: IntegrandKind = name.parse()?;
    if dims == 0 {
        return Err(Error::InvalidDims(dims));
    }
    match kind {
        IntegrandKind::Gaussian => gaussian_entry(ctx, kind, vec![ctx.real(1); dims]),
        IntegrandKind::GaussianAniso => {
            let sigma = match &params.sigma {
                None => vec![ctx.real(1); dims],
                Some(values) if values.len() == 1 => vec![values[0].clone(); dims],
                Some(values) if values.len() == dims => values.clone(),
                Some(values) => {
                    return Err(Error::DimensionMismatch {
                        expected: dims,
                        found: values.len(),
                    })
                }
            };
            if sigma.iter().any(|s| s.is_nan() || *s <= 0) {
                return Err(Error::domain("gaussian_aniso", "sigma must be positive"));
            }
            gaussian_entry(ctx, kind, sigma)
        }
        IntegrandKind::ExpMoment => {
            let factor: AxisFn =
                Arc::new(move |x: &Real| ctx.real(x.square_ref()) * ctx.real(-x.clone()).exp());
            let reference = ctx.powi(&ctx.real(2), dims as i32);
            transformed_entry(
                ctx,
                kind,
                dims,
                factor,
                reference,
                ChainTemplate::Fixed(TransformChain::uniform(Transform1D::DeExp, dims)),
                params,
            )
        }
        IntegrandKind::Sinc => {
            let factor: AxisFn = Arc::new(move |x: &Real| {
                if x.is_zero() {
                    ctx.real(1)
                } else {
                    ctx.real(x.sin_ref()) / x
                }
            });
            let reference = ctx.powi(&ctx.real(ctx.pi() / 2u32), dims as i32);
            transformed_entry(
                ctx,
                kind,
                dims,
                factor,
                reference,
                ChainTemplate::OouraPerStep,
                params,
            )
        }
    }
}

fn gaussian_entry(
    ctx: PrecisionContext,
    kind: IntegrandKind,
    sigma: Vec<Real>,
) -> Result<CatalogEntry> {
    let dims = sigma.len();
    let pi = ctx.pi();
    let pi_sq = ctx.real(pi.square_ref());

    let factors: Vec<AxisFn> = sigma
        .iter()
        .map(|s| {
            let s = s.clone();
            Arc::new(move |x: &Real| ctx.real(-ctx.real(x.square_ref()) * &s).exp()) as AxisFn
        })
        .collect();
    // f̂(ξ) = Π sqrt(π/σ_j) exp(-π² ξ_j² / σ_j)
    let amplitudes: Vec<Real> = sigma.iter().map(|s| ctx.real(&pi / s).sqrt()).collect();
    let mut reference = ctx.real(1);
    for a in &amplitudes {
        reference *= a;
    }
    let rates: Vec<Real> = sigma.iter().map(|s| ctx.real(&pi_sq / s)).collect();
    let fourier_rates = rates.clone();
    let fourier_amplitudes = amplitudes.clone();

    let profile = DecayProfile::new(
        ctx,
        FourierDecay::Exponential(
            rates
                .into_iter()
                .map(|a| FourierExp { a, b: ctx.real(2) })
                .collect(),
        ),
        FunctionDecay::Exponential(
            sigma
                .iter()
                .map(|c| FunctionExp {
                    c: c.clone(),
                    d: ctx.real(2),
                })
                .collect(),
        ),
    )?
    .with_norms(ctx.real(1), reference.clone())?;

    let base = Integrand::tensor(factors)?
        .with_fourier(move |xi: &[Real]| {
            let mut acc = ctx.real(1);
            for ((x, a), amp) in xi.iter().zip(&fourier_rates).zip(&fourier_amplitudes) {
                acc *= ctx.real(-ctx.real(x.square_ref()) * a).exp() * amp;
            }
            acc
        })
        .with_reference(reference.clone())
        .with_profile(profile.clone())?;

    Ok(CatalogEntry {
        name: format!("{}_{}d", kind.name(), dims),
        kind,
        dims,
        base,
        chain: ChainTemplate::None,
        profile,
        reference_value: reference,
    })
}

fn transformed_entry(
    ctx: PrecisionContext,
    kind: IntegrandKind,
    dims: usize,
    factor: AxisFn,
    reference: Real,
    chain: ChainTemplate,
    params: &CatalogParams,
) -> Result<CatalogEntry> {
    let pick = |v: &Option<Real>| v.clone().unwrap_or_else(|| ctx.real(1));
    let profile = DecayProfile::isotropic_dexp(
        ctx,
        dims,
        &pick(&params.a),
        &pick(&params.b),
        &pick(&params.e),
        &pick(&params.c),
        &pick(&params.d),
    )?;
    let base = Integrand::tensor(vec![factor; dims])?
        .with_domain(vec![Domain::Positive; dims])?
        .with_reference(reference.clone());
    Ok(CatalogEntry {
        name: format!("{}_{}d", kind.name(), dims),
        kind,
        dims,
        base,
        chain,
        profile,
        reference_value: reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{evaluate_box, evaluate_extents, AxisExtent};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn reference_values() {
        let c = ctx();
        let p = CatalogParams::default();
        let g = catalog_lookup(c, "gaussian", 2, &p).unwrap();
        assert!(c.real(&g.reference_value - c.pi()).abs() < c.tolerance(3));
        assert_eq!(
            catalog_lookup(c, "exp_moment", 3, &p)
                .unwrap()
                .reference_value,
            8
        );
        let s = catalog_lookup(c, "sinc", 2, &p).unwrap();
        assert!((s.reference_value.to_f64() - 2.467_401_100_272_339_6).abs() < 1e-15);
        let sigma = CatalogParams {
            sigma: Some(vec![c.real(4), c.real(1)]),
            ..CatalogParams::default()
        };
        let a = catalog_lookup(c, "gaussian_aniso", 2, &sigma).unwrap();
        let expected = c.pi() / 2u32;
        assert!(c.real(&a.reference_value - &expected).abs() < c.tolerance(3));
    }

    #[test]
    fn lookup_errors() {
        let c = ctx();
        let p = CatalogParams::default();
        assert!(matches!(
            catalog_lookup(c, "cauchy", 1, &p),
            Err(Error::UnknownIntegrand(_))
        ));
        assert!(matches!(
            catalog_lookup(c, "gaussian", 0, &p),
            Err(Error::InvalidDims(0))
        ));
        let bad = CatalogParams {
            sigma: Some(vec![c.real(1); 3]),
            ..CatalogParams::default()
        };
        assert!(catalog_lookup(c, "gaussian_aniso", 2, &bad).is_err());
    }

    #[test]
    fn gaussian_profile_and_norms() {
        let c = ctx();
        let g = catalog_lookup(c, "gaussian", 3, &CatalogParams::default()).unwrap();
        assert_eq!(*g.profile.norm_f_nu(), 1);
        let expected = c.powi(&c.pi(), 3).sqrt();
        assert!(c.real(g.profile.norm_fhat_omega() - &expected).abs() < c.tolerance(3));
        let fhat = g.base.fourier().unwrap();
        let at_zero = fhat(&[c.real(0), c.real(0), c.real(0)]);
        assert!(c.real(&at_zero - &expected).abs() < c.tolerance(3));
    }

    #[test]
    fn transformed_integrals_converge() {
        let c = PrecisionContext::new(50).unwrap();
        let p = CatalogParams::default();
        let e = catalog_lookup(c, "exp_moment", 1, &p).unwrap();
        let h = [c.ratio(1, 16)];
        let g = e.integrand_for_steps(c, &h).unwrap();
        let r = evaluate_box(c, &g, &h, &[120]).unwrap();
        assert!(c.real(&r.estimate - 2u32).abs() < c.pow10_neg(30));

        let s = catalog_lookup(c, "sinc", 1, &p).unwrap();
        let h = [c.pi() / 40u32];
        let g = s.integrand_for_steps(c, &h).unwrap();
        let r = evaluate_extents(
            c,
            &g,
            &h,
            &[AxisExtent {
                below: 200,
                above: 80,
            }],
        )
        .unwrap();
        let err = c.real(&r.estimate - &s.reference_value).abs();
        assert!(err < c.pow10_neg(10), "err = {}", err.to_f64());
    }

    #[test]
    fn sinc_chain_tracks_step() {
        let c = ctx();
        let s = catalog_lookup(c, "sinc", 2, &CatalogParams::default()).unwrap();
        let chain = s
            .chain_for_steps(c, &[c.pi() / 10u32, c.pi() / 20u32])
            .unwrap()
            .unwrap();
        match &chain.transforms()[1] {
            Transform1D::OouraFourier(p) => assert!(c.real(&p.m - 20u32).abs() < c.tolerance(3)),
            other => panic!("unexpected transform {other:?}"),
        }
        assert!(s.to_json(c).unwrap().contains("ooura_fourier"));
    }
}
