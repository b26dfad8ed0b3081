//! Brute-force checks of the tail-sum bounds over fixed parameter grids.

use crate::decay_model::{
    brute_force_tail_to_convergence, tail_bound_dexp, tail_bound_dexp_uncorrected, tail_bound_exp,
    tail_bound_exp_unit, TailSeries,
};
use crate::error::Result;
use crate::numerics::{PrecisionContext, Real};

const MAX_TERMS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaCheck {
    pub label: String,
    pub brute: Real,
    pub bound: Real,
    /// `brute ≤ bound`.
    pub holds: bool,
    /// The brute-force sum reached full precision.
    pub converged: bool,
}

impl LemmaCheck {
    fn new(
        label: String,
        series: &TailSeries,
        start: u64,
        bound: Real,
        ctx: PrecisionContext,
    ) -> Self {
        let tail = brute_force_tail_to_convergence(ctx, series, start, MAX_TERMS);
        LemmaCheck {
            label,
            holds: tail.sum <= bound,
            brute: tail.sum,
            bound,
            converged: tail.converged,
        }
    }
}

fn values(ctx: PrecisionContext, list: &[(i64, i64)]) -> Vec<Real> {
    list.iter().map(|&(p, q)| ctx.ratio(p, q)).collect()
}

fn short(x: &Real) -> String {
    format!("{}", x.to_f64())
}

/// Every grid point of the three bounds, followed by the uncorrected
/// double-exponential bound at `α = c = d = n = 1`, which does not hold.
pub fn lemma_grid(ctx: PrecisionContext) -> Result<Vec<LemmaCheck>> {
    let mut out = Vec::new();

    for b in values(ctx, &[(1, 2), (1, 1), (2, 1), (4, 1)]) {
        for h in values(ctx, &[(1, 20), (1, 5), (1, 1)]) {
            let bound = tail_bound_exp_unit(ctx, &b, &h)?;
            let label = format!("exp_unit b={} h={}", short(&b), short(&h));
            let series = TailSeries::ExpUnit {
                b: b.clone(),
                h: h.clone(),
            };
            out.push(LemmaCheck::new(label, &series, 1, bound, ctx));
        }
    }

    for c in values(ctx, &[(1, 2), (1, 1), (3, 1)]) {
        for d in values(ctx, &[(1, 1), (3, 2), (2, 1)]) {
            for n in [0u64, 1, 5] {
                let bound = tail_bound_exp(ctx, &c, &d, &ctx.real(n))?;
                let label = format!("exp c={} d={} n={n}", short(&c), short(&d));
                let series = TailSeries::Exp {
                    c: c.clone(),
                    d: d.clone(),
                };
                out.push(LemmaCheck::new(label, &series, n, bound, ctx));
            }
        }
    }

    for alpha in values(ctx, &[(1, 2), (1, 1), (2, 1)]) {
        for c in values(ctx, &[(1, 2), (1, 1)]) {
            for d in values(ctx, &[(1, 1), (2, 1)]) {
                for n in [0u64, 1, 3] {
                    let bound = tail_bound_dexp(ctx, &alpha, &c, &d, &ctx.real(n))?;
                    let label = format!(
                        "dexp alpha={} c={} d={} n={n}",
                        short(&alpha),
                        short(&c),
                        short(&d)
                    );
                    let series = TailSeries::Dexp {
                        alpha: alpha.clone(),
                        c: c.clone(),
                        d: d.clone(),
                    };
                    out.push(LemmaCheck::new(label, &series, n, bound, ctx));
                }
            }
        }
    }

    let one = ctx.real(1);
    let bound = tail_bound_dexp_uncorrected(ctx, &one, &one, &one, &one)?;
    let series = TailSeries::Dexp {
        alpha: one.clone(),
        c: one.clone(),
        d: one.clone(),
    };
    out.push(LemmaCheck::new(
        "dexp_uncorrected alpha=1 c=1 d=1 n=1".to_string(),
        &series,
        1,
        bound,
        ctx,
    ));
    Ok(out)
}
