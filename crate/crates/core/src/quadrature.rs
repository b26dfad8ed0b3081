//! The truncated trapezoidal rule
//! `Q(f) = Π_j h_j Σ_{k ∈ box} f(k_1 h_1, …, k_s h_s)`.
//!
//! Sums run shell by shell from the outermost `|k|` inward and add the
//! mirrored pair `f(kh) + f(-kh)` before accumulating, so results do not
//! depend on the sign convention of the lattice. Shells are evaluated in
//! parallel and reduced in a fixed order, so results do not depend on the
//! number of worker threads either.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::{AxisFn, Integrand, PointFn};
use crate::numerics::{PrecisionContext, Real};

/// Index range `-below ..= above` along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisExtent {
    pub below: u64,
    pub above: u64,
}

impl AxisExtent {
    pub fn symmetric(half_width: u64) -> Self {
        AxisExtent {
            below: half_width,
            above: half_width,
        }
    }

    pub fn points(self) -> u64 {
        self.below + self.above + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    pub estimate: Real,
    pub points_evaluated: u64,
    pub truncation_box_used: Vec<AxisExtent>,
}

/// Lattice indices grouped by `|k|`, outermost first, ending with `[0]`.
fn shells(extent: AxisExtent) -> Vec<Vec<i64>> {
    let reach = extent.below.max(extent.above);
    let mut out = Vec::with_capacity(reach as usize + 1);
    for m in (1..=reach).rev() {
        let mut shell = Vec::with_capacity(2);
        if m <= extent.above {
            shell.push(m as i64);
        }
        if m <= extent.below {
            shell.push(-(m as i64));
        }
        out.push(shell);
    }
    out.push(vec![0]);
    out
}

fn ordered_total(ctx: PrecisionContext, parts: Vec<Real>) -> Real {
    let mut acc = ctx.real(0);
    for part in parts {
        acc += part;
    }
    acc
}

/// `Σ_{k=-below}^{above} f(k h)`.
fn axis_sum(ctx: PrecisionContext, f: &AxisFn, h: &Real, extent: AxisExtent) -> Real {
    let parts: Vec<Real> = shells(extent)
        .par_iter()
        .map(|shell| {
            let mut value = ctx.real(0);
            for &k in shell {
                value += f(&ctx.real(h * k));
            }
            value
        })
        .collect();
    ordered_total(ctx, parts)
}

fn nested_sum(
    ctx: PrecisionContext,
    f: &PointFn,
    steps: &[Real],
    extents: &[AxisExtent],
    point: &mut Vec<Real>,
) -> Real {
    let axis = point.len();
    if axis == steps.len() {
        return f(point);
    }
    let mut acc = ctx.real(0);
    for shell in shells(extents[axis]) {
        let mut value = ctx.real(0);
        for k in shell {
            point.push(ctx.real(&steps[axis] * k));
            value += nested_sum(ctx, f, steps, extents, point);
            point.pop();
        }
        acc += value;
    }
    acc
}

/// `Σ_{k ∈ box} f(k ∘ steps)` by direct summation, parallel over the first axis.
fn lattice_sum(ctx: PrecisionContext, f: &PointFn, steps: &[Real], extents: &[AxisExtent]) -> Real {
    let parts: Vec<Real> = shells(extents[0])
        .par_iter()
        .map(|shell| {
            let mut value = ctx.real(0);
            let mut point = Vec::with_capacity(steps.len());
            for &k in shell {
                point.push(ctx.real(&steps[0] * k));
                value += nested_sum(ctx, f, steps, extents, &mut point);
                point.pop();
            }
            value
        })
        .collect();
    ordered_total(ctx, parts)
}

/// Symmetric box `|k_j| ≤ half_widths[j]`.
pub fn evaluate_box(
    ctx: PrecisionContext,
    f: &Integrand,
    h_per_dim: &[Real],
    half_widths: &[u64],
) -> Result<QuadratureResult> {
    let extents: Vec<AxisExtent> = half_widths
        .iter()
        .map(|&k| AxisExtent::symmetric(k))
        .collect();
    evaluate_extents(ctx, f, h_per_dim, &extents)
}

/// Box `-below_j ≤ k_j ≤ above_j`. Tensor-product integrands are summed as
/// a product of one-dimensional sums.
pub fn evaluate_extents(
    ctx: PrecisionContext,
    f: &Integrand,
    h_per_dim: &[Real],
    extents: &[AxisExtent],
) -> Result<QuadratureResult> {
    let dims = f.dims();
    for found in [h_per_dim.len(), extents.len()] {
        if found != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found,
            });
        }
    }
    if h_per_dim.iter().any(|h| h.is_nan() || *h <= 0) {
        return Err(Error::domain("evaluate_box", "step sizes must be positive"));
    }

    let estimate = match f.factors() {
        Some(factors) => {
            let mut product = ctx.real(1);
            for ((g, h), &extent) in factors.iter().zip(h_per_dim).zip(extents) {
                product *= axis_sum(ctx, g, h, extent) * h;
            }
            product
        }
        None => {
            let mut volume = ctx.real(1);
            for h in h_per_dim {
                volume *= h;
            }
            lattice_sum(ctx, f.evaluator(), h_per_dim, extents) * volume
        }
    };

    let points_evaluated = extents
        .iter()
        .fold(1u64, |acc, e| acc.saturating_mul(e.points()));
    Ok(QuadratureResult {
        estimate,
        points_evaluated,
        truncation_box_used: extents.to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdaptiveOptions {
    /// Consecutive sub-threshold terms that end a ray.
    pub stop_run: u64,
    /// Longest ray scanned before giving up.
    pub max_points: u64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            stop_run: 3,
            max_points: 1_000_000,
        }
    }
}

pub fn evaluate_adaptive(
    ctx: PrecisionContext,
    f: &Integrand,
    h: &Real,
    threshold_exponent: &Real,
) -> Result<QuadratureResult> {
    evaluate_adaptive_with(ctx, f, h, threshold_exponent, AdaptiveOptions::default())
}

/// Trapezoidal rule with step `ħ` on every axis and a box found by scanning.
///
/// A lattice term is negligible when `ħ^s |Π_j f_j(k_j ħ)| < exp(-a/ħ)`.
/// Along axis `j` the other factors are bounded by their largest lattice
/// values `m_i = max_k ħ |f_i(kħ)|`, so axis `j` is cut once
/// `ħ |f_j(kħ)| < exp(-a/ħ) / Π_{i≠j} m_i` holds for `stop_run`
/// consecutive `k`. The cut is placed at the first index of that run.
pub fn evaluate_adaptive_with(
    ctx: PrecisionContext,
    f: &Integrand,
    h: &Real,
    threshold_exponent: &Real,
    options: AdaptiveOptions,
) -> Result<QuadratureResult> {
    let factors = f
        .factors()
        .ok_or(Error::MissingEvaluator("tensor factors"))?;
    if h.is_nan() || *h <= 0 {
        return Err(Error::domain("evaluate_adaptive", "h must be positive"));
    }
    let base = ctx.real(-ctx.real(threshold_exponent / h)).exp();
    let mut rays: Vec<[Ray; 2]> = factors
        .iter()
        .map(|_| [Ray::new(1), Ray::new(-1)])
        .collect();

    // First pass: the bare threshold, to locate each factor's peak.
    let peaks: Vec<Real> = rays
        .par_iter_mut()
        .zip(factors.par_iter())
        .enumerate()
        .map(|(axis, (pair, g))| {
            let mut peak = ctx.real(g(&ctx.real(0)).abs_ref()) * h;
            for ray in pair.iter_mut() {
                let cut = ray.scan(ctx, g, h, &base, options, axis)?;
                for v in &ray.values[..cut as usize] {
                    if *v > peak {
                        peak = v.clone();
                    }
                }
            }
            Ok(peak)
        })
        .collect::<Result<_>>()?;

    let extents: Vec<AxisExtent> = rays
        .par_iter_mut()
        .zip(factors.par_iter())
        .enumerate()
        .map(|(axis, (pair, g))| {
            let mut others = ctx.real(1);
            for (i, peak) in peaks.iter().enumerate() {
                if i != axis {
                    others *= peak;
                }
            }
            let threshold = ctx.real(&base / &others);
            let [up, down] = pair;
            let above = up.scan(ctx, g, h, &threshold, options, axis)?;
            let below = down.scan(ctx, g, h, &threshold, options, axis)?;
            Ok(AxisExtent { below, above })
        })
        .collect::<Result<_>>()?;

    let steps = vec![ctx.real(h); f.dims()];
    evaluate_extents(ctx, f, &steps, &extents)
}

/// Cached values `ħ |f(sign · k ħ)|` for `k = 1, 2, …`.
struct Ray {
    sign: i64,
    values: Vec<Real>,
}

impl Ray {
    fn new(sign: i64) -> Self {
        Ray {
            sign,
            values: Vec::new(),
        }
    }

    fn value(&mut self, ctx: PrecisionContext, g: &AxisFn, h: &Real, k: u64) -> &Real {
        while self.values.len() < k as usize {
            let index = self.sign * (self.values.len() as i64 + 1);
            let v = ctx.real(g(&ctx.real(h * index)).abs_ref()) * h;
            self.values.push(v);
        }
        &self.values[k as usize - 1]
    }

    /// First `k` of a run of `stop_run` values below `threshold`.
    fn scan(
        &mut self,
        ctx: PrecisionContext,
        g: &AxisFn,
        h: &Real,
        threshold: &Real,
        options: AdaptiveOptions,
        axis: usize,
    ) -> Result<u64> {
        let mut run = 0;
        for k in 1..=options.max_points {
            if self.value(ctx, g, h, k) < threshold {
                run += 1;
                if run == options.stop_run {
                    return Ok(k + 1 - options.stop_run);
                }
            } else {
                run = 0;
            }
        }
        Err(Error::NoDecayDetected {
            axis,
            direction: if self.sign > 0 {
                "positive"
            } else {
                "negative"
            },
            limit: options.max_points,
        })
    }
}

/// Both sides of the Poisson summation formula on the cube
/// `|k_j| ≤ terms`: `(h^s Σ f(kh), Σ f̂(k/h))`.
pub fn poisson_check(
    ctx: PrecisionContext,
    f: &Integrand,
    h: &Real,
    terms: u64,
) -> Result<(Real, Real)> {
    let fourier = f
        .fourier()
        .ok_or(Error::MissingEvaluator("Fourier transform"))?;
    let dims = f.dims();
    let lhs = evaluate_box(ctx, f, &vec![ctx.real(h); dims], &vec![terms; dims])?.estimate;
    let dual = vec![ctx.real(h.recip_ref()); dims];
    let rhs = lattice_sum(
        ctx,
        fourier,
        &dual,
        &vec![AxisExtent::symmetric(terms); dims],
    );
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn close(x: &Real, expected: f64, rel: f64) -> bool {
        ((x.to_f64() - expected) / expected).abs() <= rel
    }

    fn gauss_factor(c: PrecisionContext, scale: f64) -> AxisFn {
        Arc::new(move |x: &Real| c.real(-c.real(x.square_ref()) * scale).exp())
    }

    fn gaussian(c: PrecisionContext, s: usize) -> Integrand {
        let root_pi = c.pi().sqrt();
        Integrand::tensor(vec![gauss_factor(c, 1.0); s])
            .unwrap()
            .with_fourier(move |xi: &[Real]| {
                let mut acc = c.real(1);
                for x in xi {
                    acc *= c.real(-c.real(x.square_ref()) * c.pi().square()).exp() * &root_pi;
                }
                acc
            })
    }

    #[test]
    fn small_boxes() {
        let c = ctx();
        let half = c.ratio(1, 2);
        let r = evaluate_box(c, &gaussian(c, 1), std::slice::from_ref(&half), &[2]).unwrap();
        assert!(close(&r.estimate, 1.646_680_224_242_85, 1e-13));
        assert_eq!(r.points_evaluated, 5);
        let r2 = evaluate_box(c, &gaussian(c, 2), &[half.clone(), half.clone()], &[2, 2]).unwrap();
        assert!(close(&r2.estimate, 2.711_555_760_912_47, 1e-13));
        assert_eq!(r2.points_evaluated, 25);
        let single = evaluate_box(c, &gaussian(c, 3), &vec![half.clone(); 3], &[0, 0, 0]).unwrap();
        assert_eq!(single.estimate, c.ratio(1, 8));
        assert!(evaluate_box(c, &gaussian(c, 2), &[half], &[1, 1]).is_err());
    }

    #[test]
    fn tensor_matches_direct_summation() {
        let c = ctx();
        let factors = [
            gauss_factor(c, 0.7),
            gauss_factor(c, 1.3),
            gauss_factor(c, 2.0),
        ];
        for s in [2usize, 3] {
            let tensor = Integrand::tensor(factors[..s].to_vec()).unwrap();
            let fs = factors[..s].to_vec();
            let direct = Integrand::new(s, move |x: &[Real]| {
                let mut acc = fs[0](&x[0]);
                for (g, xj) in fs.iter().zip(x).skip(1) {
                    acc *= g(xj);
                }
                acc
            })
            .unwrap();
            let steps: Vec<Real> = (0..s).map(|j| c.ratio(3 + j as i64, 10)).collect();
            let extents: Vec<AxisExtent> = (0..s)
                .map(|j| AxisExtent {
                    below: 2 + j as u64,
                    above: 3,
                })
                .collect();
            let a = evaluate_extents(c, &tensor, &steps, &extents)
                .unwrap()
                .estimate;
            let b = evaluate_extents(c, &direct, &steps, &extents)
                .unwrap()
                .estimate;
            assert!(c.real(&a - &b).abs() <= c.tolerance(8) * &b);
        }
    }

    #[test]
    fn reflection_invariance_is_exact() {
        let c = ctx();
        let odd_shift: AxisFn = Arc::new(move |x: &Real| {
            let y = c.real(x - c.ratio(1, 3));
            c.real(-c.real(y.square_ref())).exp()
        });
        let mirrored: AxisFn = Arc::new(move |x: &Real| {
            let y = c.real(-x.clone() - c.ratio(1, 3));
            c.real(-c.real(y.square_ref())).exp()
        });
        let h = [c.ratio(2, 7)];
        let a = evaluate_box(c, &Integrand::tensor(vec![odd_shift]).unwrap(), &h, &[9]).unwrap();
        let b = evaluate_box(c, &Integrand::tensor(vec![mirrored]).unwrap(), &h, &[9]).unwrap();
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn refinement_is_monotone() {
        let c = ctx();
        let g = gaussian(c, 2);
        let h = [c.ratio(1, 3), c.ratio(1, 2)];
        let mut previous = c.real(0);
        for k in 0..12 {
            let r = evaluate_box(c, &g, &h, &[k, k / 2]).unwrap();
            assert!(r.estimate >= previous);
            previous = r.estimate;
        }
    }

    #[test]
    fn poisson_identity() {
        let c = ctx();
        let g = gaussian(c, 1);
        let (lhs, _) = poisson_check(c, &g, &c.real(1), 20).unwrap();
        assert!(close(&lhs, 1.772_637_204_826_65, 1e-13));
        for h in [c.ratio(1, 2), c.real(1), c.real(2)] {
            let (lhs, rhs) = poisson_check(c, &g, &h, 40).unwrap();
            assert!(
                c.real(&lhs - &rhs).abs() <= c.tolerance(10),
                "h = {}",
                h.to_f64()
            );
        }
        let plain = Integrand::tensor(vec![gauss_factor(c, 1.0)]).unwrap();
        assert!(matches!(
            poisson_check(c, &plain, &c.real(1), 3),
            Err(Error::MissingEvaluator(_))
        ));
    }

    #[test]
    fn adaptive_gaussian_box() {
        let c = ctx();
        let r = evaluate_adaptive(c, &gaussian(c, 1), &c.ratio(1, 2), &c.real(5)).unwrap();
        // ħ e^{-(kħ)^2} < e^{-10}: first at k = 7
        assert_eq!(r.truncation_box_used, vec![AxisExtent::symmetric(7)]);
        let root_pi = c.pi().sqrt();
        assert!(c.real(&r.estimate - &root_pi).abs() < c.pow10_neg(6));
    }

    #[test]
    fn adaptive_requires_decay_and_factors() {
        let c = ctx();
        let flat: AxisFn = Arc::new(move |_: &Real| c.real(1));
        let f = Integrand::tensor(vec![flat]).unwrap();
        let options = AdaptiveOptions {
            stop_run: 3,
            max_points: 2_000,
        };
        let err = evaluate_adaptive_with(c, &f, &c.ratio(1, 2), &c.real(5), options).unwrap_err();
        assert!(matches!(err, Error::NoDecayDetected { axis: 0, .. }));
        let general = Integrand::new(1, move |_: &[Real]| c.real(1)).unwrap();
        assert!(matches!(
            evaluate_adaptive(c, &general, &c.real(1), &c.real(5)),
            Err(Error::MissingEvaluator(_))
        ));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c = ctx();
        let g = gaussian(c, 1);
        let direct = Integrand::new(2, move |x: &[Real]| {
            c.real(-c.real(x[0].square_ref()) - c.real(x[1].square_ref()) * 2u32)
                .exp()
        })
        .unwrap();
        let h = [c.ratio(1, 5), c.ratio(1, 4)];
        let run = || {
            (
                evaluate_box(c, &g, &h[..1], &[40]).unwrap().estimate,
                evaluate_box(c, &direct, &h, &[15, 9]).unwrap().estimate,
            )
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(one, four);
    }
}
