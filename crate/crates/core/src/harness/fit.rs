//! Least-squares fits of observed convergence rates.

use std::fmt;
use std::str::FromStr;

use super::study::StudyRecord;
use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateModel {
    /// `err ≈ K exp(-c N^{1/s})`.
    ExpRate,
    /// `err ≈ K exp(-c N^{1/s} / ln N)`.
    DexpRate,
}

impl RateModel {
    pub fn name(self) -> &'static str {
        match self {
            RateModel::ExpRate => "exp_rate",
            RateModel::DexpRate => "dexp_rate",
        }
    }

    /// Regressor `x(N)` for this model.
    pub fn regressor(self, ctx: PrecisionContext, n: u64, dims: usize) -> Real {
        let n = ctx.real(n);
        let root = ctx.pow(&n, &ctx.ratio(1, dims as i64));
        match self {
            RateModel::ExpRate => root,
            RateModel::DexpRate => root / n.ln(),
        }
    }
}

impl FromStr for RateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp_rate" | "exp" => Ok(RateModel::ExpRate),
            "dexp_rate" | "dexp" => Ok(RateModel::DexpRate),
            other => Err(Error::Malformed(format!("unknown rate model '{other}'"))),
        }
    }
}

impl fmt::Display for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub model: RateModel,
    pub c: Real,
    /// Intercept of the fit, `ln K`.
    pub log_k: Real,
    pub residual_rms: Real,
    /// Records that entered the regression.
    pub points_used: usize,
}

impl RateFit {
    pub fn fields(&self, ctx: PrecisionContext) -> Vec<(&'static str, String)> {
        vec![
            ("model", self.model.name().to_string()),
            ("c", ctx.format(&self.c)),
            ("logK", ctx.format(&self.log_k)),
            ("residual_rms", ctx.format(&self.residual_rms)),
            ("points_used", self.points_used.to_string()),
        ]
    }
}

/// Ordinary least squares of `ln(relative_error)` on the model regressor,
/// with `N = points_used`.
///
/// Records with zero or precision-limited error are skipped, as are records
/// with `N < 2` for the double-exponential model.
pub fn fit_rate(
    ctx: PrecisionContext,
    records: &[StudyRecord],
    model: RateModel,
    dims: usize,
) -> Result<RateFit> {
    if dims == 0 {
        return Err(Error::InvalidDims(dims));
    }
    if !records.is_empty() && records.iter().all(|r| r.relative_error.is_zero()) {
        return Err(Error::ZeroErrors);
    }
    let points: Vec<(Real, Real)> = records
        .iter()
        .filter(|r| !r.relative_error.is_zero() && !r.precision_limited(ctx))
        .filter(|r| model == RateModel::ExpRate || r.points_used >= 2)
        .map(|r| {
            let x = model.regressor(ctx, r.points_used, dims);
            let y = ctx.real(r.relative_error.ln_ref());
            (x, y)
        })
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientPoints(points.len()));
    }

    let count = ctx.real(points.len() as u64);
    let mut sum_x = ctx.real(0);
    let mut sum_y = ctx.real(0);
    for (x, y) in &points {
        sum_x += x;
        sum_y += y;
    }
    let mean_x = sum_x / &count;
    let mean_y = sum_y / &count;
    let mut sxx = ctx.real(0);
    let mut sxy = ctx.real(0);
    for (x, y) in &points {
        let dx = ctx.real(x - &mean_x);
        sxy += ctx.real(&dx * ctx.real(y - &mean_y));
        sxx += dx.square();
    }
    if sxx.is_zero() {
        return Err(Error::DegenerateFit);
    }
    let slope = sxy / &sxx;
    let intercept = ctx.real(&mean_y - ctx.real(&slope * &mean_x));

    let mut sse = ctx.real(0);
    for (x, y) in &points {
        let predicted = ctx.real(&slope * x) + &intercept;
        sse += ctx.real(y - &predicted).square();
    }
    let residual_rms = (sse / &count).sqrt();

    Ok(RateFit {
        model,
        c: -slope,
        log_k: intercept,
        residual_rms,
        points_used: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(c: PrecisionContext, n: u64, err: Real) -> StudyRecord {
        StudyRecord {
            budget_n: n,
            points_used: n,
            estimate: c.real(1),
            reference: c.real(1),
            relative_error: err,
            predicted_bound: c.real(1),
            h: c.real(1),
            lambda: c.real(1),
        }
    }

    fn close(x: &Real, expected: &Real) -> bool {
        let scale = Real::with_val(x.prec(), expected.abs_ref()).max(&Real::with_val(x.prec(), 1));
        let diff = Real::with_val(x.prec(), x - expected).abs();
        diff < scale * 1e-12
    }

    #[test]
    fn exact_exponential_data() {
        let c = PrecisionContext::default();
        let rate = c.ratio(16, 10);
        let records: Vec<_> = [10u64, 20, 40]
            .iter()
            .map(|&n| record(c, n, c.real(-c.real(&rate * n)).exp()))
            .collect();
        let fit = fit_rate(c, &records, RateModel::ExpRate, 1).unwrap();
        assert!(close(&fit.c, &rate));
        assert!(close(&fit.log_k, &c.real(0)));
        assert!(fit.residual_rms < 1e-100);
        assert_eq!(fit.points_used, 3);
    }

    #[test]
    fn exact_double_exponential_data() {
        let c = PrecisionContext::default();
        let seven = c.real(7);
        let records: Vec<_> = [16u64, 64, 256]
            .iter()
            .map(|&n| {
                let x = RateModel::DexpRate.regressor(c, n, 2);
                record(c, n, c.real(-x * 3u32).exp() * &seven)
            })
            .collect();
        let fit = fit_rate(c, &records, RateModel::DexpRate, 2).unwrap();
        assert!(close(&fit.c, &c.real(3)));
        assert!(close(&fit.log_k, &seven.ln()));
        assert!(fit.residual_rms < 1e-100);
    }

    #[test]
    fn regressor_values() {
        let c = PrecisionContext::default();
        assert_eq!(RateModel::ExpRate.regressor(c, 64, 2), 8);
        let x = RateModel::DexpRate.regressor(c, 16, 2).to_f64();
        assert!((x - 4.0 / 16f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_unusable_records() {
        let c = PrecisionContext::default();
        let zeros: Vec<_> = (1..=4).map(|n| record(c, n * 10, c.real(0))).collect();
        assert!(matches!(
            fit_rate(c, &zeros, RateModel::ExpRate, 1),
            Err(Error::ZeroErrors)
        ));

        let two: Vec<_> = (1..=2)
            .map(|n| record(c, n * 10, c.ratio(1, 1000 * n as i64)))
            .collect();
        assert!(matches!(
            fit_rate(c, &two, RateModel::ExpRate, 1),
            Err(Error::InsufficientPoints(2))
        ));

        let mut limited = two.clone();
        limited.push(record(c, 30, c.pow10_neg(115)));
        assert!(matches!(
            fit_rate(c, &limited, RateModel::ExpRate, 1),
            Err(Error::InsufficientPoints(2))
        ));

        let one_point = vec![
            record(c, 1, c.ratio(1, 2)),
            record(c, 10, c.ratio(1, 4)),
            record(c, 20, c.ratio(1, 8)),
        ];
        assert!(matches!(
            fit_rate(c, &one_point, RateModel::DexpRate, 1),
            Err(Error::InsufficientPoints(2))
        ));

        let same: Vec<_> = (1..=3).map(|n| record(c, 10, c.ratio(1, 10 * n))).collect();
        assert!(matches!(
            fit_rate(c, &same, RateModel::ExpRate, 1),
            Err(Error::DegenerateFit)
        ));
    }

    #[test]
    fn model_names_round_trip() {
        for model in [RateModel::ExpRate, RateModel::DexpRate] {
            assert_eq!(model.name().parse::<RateModel>().unwrap(), model);
        }
        assert!("power".parse::<RateModel>().is_err());
    }
}
