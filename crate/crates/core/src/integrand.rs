//! Integrands on `R^s`, optionally in tensor-product form.

use std::fmt;
use std::sync::Arc;

use crate::decay_model::DecayProfile;
use crate::error::{Error, Result};
use crate::numerics::Real;

/// Pointwise evaluator on `R^s`.
pub type PointFn = Arc<dyn Fn(&[Real]) -> Real + Send + Sync>;
/// One-dimensional evaluator.
pub type AxisFn = Arc<dyn Fn(&Real) -> Real + Send + Sync>;

/// Where an axis of the integration domain lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// The whole real line.
    Whole,
    /// The open half-line `(0, ∞)`.
    Positive,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Whole => "whole-line",
            Domain::Positive => "positive half-line",
        }
    }
}

#[derive(Clone)]
pub struct Integrand {
    dims: usize,
    evaluate: PointFn,
    factors: Option<Vec<AxisFn>>,
    fourier: Option<PointFn>,
    domain: Vec<Domain>,
    reference_value: Option<Real>,
    profile: Option<DecayProfile>,
}

impl Integrand {
    /// General integrand over `R^dims`.
    pub fn new(
        dims: usize,
        evaluate: impl Fn(&[Real]) -> Real + Send + Sync + 'static,
    ) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidDims(dims));
        }
        Ok(Integrand {
            dims,
            evaluate: Arc::new(evaluate),
            factors: None,
            fourier: None,
            domain: vec![Domain::Whole; dims],
            reference_value: None,
            profile: None,
        })
    }

    /// `f(x) = Π_j f_j(x_j)`.
    pub fn tensor(factors: Vec<AxisFn>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDims(0));
        }
        let dims = factors.len();
        let shared = factors.clone();
        let evaluate: PointFn = Arc::new(move |x: &[Real]| {
            let mut acc = shared[0](&x[0]);
            for (f, xj) in shared.iter().zip(x).skip(1) {
                acc *= f(xj);
            }
            acc
        });
        Ok(Integrand {
            dims,
            evaluate,
            factors: Some(factors),
            fourier: None,
            domain: vec![Domain::Whole; dims],
            reference_value: None,
            profile: None,
        })
    }

    pub fn with_reference(mut self, value: Real) -> Self {
        self.reference_value = Some(value);
        self
    }

    pub fn with_profile(mut self, profile: DecayProfile) -> Result<Self> {
        if profile.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                found: profile.dims(),
            });
        }
        self.profile = Some(profile);
        Ok(self)
    }

    /// Fourier transform `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx`, real-valued.
    pub fn with_fourier(
        mut self,
        fourier: impl Fn(&[Real]) -> Real + Send + Sync + 'static,
    ) -> Self {
        self.fourier = Some(Arc::new(fourier));
        self
    }

    pub fn with_domain(mut self, domain: Vec<Domain>) -> Result<Self> {
        if domain.len() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                found: domain.len(),
            });
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn eval(&self, x: &[Real]) -> Real {
        (self.evaluate)(x)
    }

    pub fn evaluator(&self) -> &PointFn {
        &self.evaluate
    }

    pub fn factors(&self) -> Option<&[AxisFn]> {
        self.factors.as_deref()
    }

    pub fn fourier(&self) -> Option<&PointFn> {
        self.fourier.as_ref()
    }

    pub fn domain(&self) -> &[Domain] {
        &self.domain
    }

    pub fn reference_value(&self) -> Option<&Real> {
        self.reference_value.as_ref()
    }

    pub fn profile(&self) -> Option<&DecayProfile> {
        self.profile.as_ref()
    }

    pub(crate) fn replace_parts(
        &self,
        evaluate: PointFn,
        factors: Option<Vec<AxisFn>>,
        domain: Vec<Domain>,
    ) -> Integrand {
        Integrand {
            dims: self.dims,
            evaluate,
            factors,
            fourier: None,
            domain,
            reference_value: self.reference_value.clone(),
            profile: None,
        }
    }
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("dims", &self.dims)
            .field("tensor", &self.factors.is_some())
            .field("fourier", &self.fourier.is_some())
            .field("domain", &self.domain)
            .field("reference_value", &self.reference_value)
            .finish_non_exhaustive()
    }
}
