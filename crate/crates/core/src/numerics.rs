//! Extended-precision arithmetic and the two special functions the planner
//! depends on.
//!
//! Reals are MPFR floats. A [`PrecisionContext`] fixes the working precision
//! in decimal digits; every value it creates carries a few guard bits on top
//! of that, and internal evaluations of [`PrecisionContext::gamma`] and
//! [`PrecisionContext::lambert_w`] run at a further raised precision before
//! rounding back.

use std::sync::Mutex;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float, Rational};

use crate::error::{Error, Result};

/// Extended-precision real number.
pub type Real = Float;

pub const DEFAULT_DIGITS: u32 = 120;
pub const MIN_DIGITS: u32 = 30;

const GUARD_BITS: u32 = 16;
const INTERNAL_GUARD_BITS: u32 = 32;
const NEWTON_MAX_ITERATIONS: usize = 200;

/// Working precision shared by every computation in a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    decimal_digits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            decimal_digits: DEFAULT_DIGITS,
        }
    }
}

impl PrecisionContext {
    pub fn new(decimal_digits: u32) -> Result<Self> {
        if decimal_digits < MIN_DIGITS {
            return Err(Error::InvalidPrecision(decimal_digits));
        }
        Ok(PrecisionContext { decimal_digits })
    }

    pub fn digits(self) -> u32 {
        self.decimal_digits
    }

    /// Binary precision of values created by this context.
    pub fn bits(self) -> u32 {
        (f64::from(self.decimal_digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn real<T>(self, value: T) -> Real
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    /// `num / den`, correctly rounded.
    pub fn ratio(self, num: i64, den: i64) -> Real {
        self.real(Rational::from((num, den)))
    }

    pub fn pi(self) -> Real {
        self.real(Constant::Pi)
    }

    /// Euler's number.
    pub fn e(self) -> Real {
        self.real(1).exp()
    }

    /// `10^(-k)`.
    pub fn pow10_neg(self, k: u32) -> Real {
        self.powi(&self.real(10), -(k as i32))
    }

    /// `base^exponent`.
    pub fn pow(self, base: &Real, exponent: &Real) -> Real {
        self.real(base.pow(exponent))
    }

    pub fn powi(self, base: &Real, exponent: i32) -> Real {
        self.real(base.pow(exponent))
    }

    /// `10^-(digits - lost)`: the accuracy left after losing `lost` digits.
    pub fn tolerance(self, lost: u32) -> Real {
        self.pow10_neg(self.decimal_digits.saturating_sub(lost))
    }

    pub fn parse(self, text: &str) -> Result<Real> {
        let trimmed = text.trim();
        Float::parse(trimmed)
            .map(|parsed| self.real(parsed))
            .map_err(|_| Error::ParseReal {
                input: text.to_string(),
            })
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn format(self, x: &Real) -> String {
        x.to_string_radix(10, Some(self.decimal_digits as usize))
    }

    /// Gamma function for positive real arguments.
    ///
    /// The argument is shifted upward past `0.7 * digits`, the Stirling series
    /// for `ln Γ` is summed until its terms drop below the working precision,
    /// and the shift is divided back out.
    pub fn gamma(self, x: &Real) -> Result<Real> {
        if x.is_nan() || x.is_infinite() || *x <= 0 {
            return Err(Error::domain(
                "gamma",
                format!("x = {} must be positive", x.to_f64()),
            ));
        }

        // ln Γ(y) ~ y ln y; its magnitude costs that many bits of absolute accuracy.
        let size = x.to_f64().max(2.0);
        let magnitude_bits = (size * size.ln()).max(1.0).log2().ceil() as u32;
        let wp = self.bits() + INTERNAL_GUARD_BITS + magnitude_bits;

        let shift_target = (0.7 * f64::from(self.decimal_digits)).ceil().max(10.0);
        let mut y = Float::with_val(wp, x);
        let mut shift_product = Float::with_val(wp, 1);
        while y < shift_target {
            shift_product *= &y;
            y += 1u32;
        }

        let ln_gamma = stirling_ln_gamma(&y, wp);
        let value = ln_gamma.exp() / shift_product;
        Ok(self.real(value))
    }

    /// Principal branch of the Lambert-W function on `[0, ∞)`.
    ///
    /// Newton iteration on `w e^w - x`, seeded with `ln(1 + x)`. The seed lies
    /// on or above the root, where the iteration converges monotonically.
    pub fn lambert_w(self, x: &Real) -> Result<Real> {
        if x.is_nan() || x.is_infinite() || *x < 0 {
            return Err(Error::domain(
                "lambert_w",
                format!("x = {} must be >= 0", x.to_f64()),
            ));
        }
        if x.is_zero() {
            return Ok(self.real(0));
        }

        let wp = self.bits() + INTERNAL_GUARD_BITS;
        let target = Float::with_val(wp, x);
        let mut w = Float::with_val(wp, &target + 1u32).ln();
        for _ in 0..NEWTON_MAX_ITERATIONS {
            let ew = Float::with_val(wp, w.exp_ref());
            let residual = Float::with_val(wp, &w * &ew) - &target;
            let slope = ew * Float::with_val(wp, &w + 1u32);
            let step = residual / slope;
            w -= &step;
            let settled = step.is_zero()
                || step.clone().abs() <= Float::with_val(wp, w.abs_ref()) >> (wp - 8) as i32;
            if settled {
                break;
            }
        }
        Ok(self.real(w))
    }
}

/// Stirling series for `ln Γ(y)`, `y` large enough that the asymptotic
/// expansion converges well past the working precision.
fn stirling_ln_gamma(y: &Float, wp: u32) -> Float {
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let half_ln_two_pi = two_pi.ln() / 2u32;
    let ln_y = Float::with_val(wp, y.ln_ref());
    let mut sum = Float::with_val(wp, y - 0.5f64) * &ln_y - y + half_ln_two_pi;

    let y_sq = Float::with_val(wp, y.square_ref());
    let mut y_pow = Float::with_val(wp, y);
    let tolerance = Float::with_val(wp, sum.abs_ref()) >> wp as i32;
    let mut previous = Float::with_val(wp, f64::INFINITY);
    for k in 1u32.. {
        let coefficient = Float::with_val(wp, &bernoulli_even(k as usize));
        let term = coefficient / (u64::from(2 * k) * u64::from(2 * k - 1)) / &y_pow;
        let size = Float::with_val(wp, term.abs_ref());
        if size >= previous {
            // Past the smallest term of the asymptotic series.
            break;
        }
        sum += &term;
        if size < tolerance {
            break;
        }
        previous = size;
        y_pow *= &y_sq;
    }
    sum
}

struct BernoulliTable {
    work: Vec<Rational>,
    values: Vec<Rational>,
}

static BERNOULLI: Mutex<BernoulliTable> = Mutex::new(BernoulliTable {
    work: Vec::new(),
    values: Vec::new(),
});

/// `B_{2k}`, computed once with the Akiyama–Tanigawa recurrence and cached.
fn bernoulli_even(k: usize) -> Rational {
    let index = 2 * k;
    let mut table = BERNOULLI
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner());
    while table.values.len() <= index {
        let m = table.values.len();
        table.work.push(Rational::from((1u32, m as u32 + 1)));
        for j in (1..=m).rev() {
            let diff = Rational::from(&table.work[j - 1] - &table.work[j]);
            table.work[j - 1] = diff * j as u32;
        }
        let value = table.work[0].clone();
        table.values.push(value);
    }
    table.values[index].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rug::Integer;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn rel_err(a: &Real, b: &Real) -> Real {
        let c = ctx();
        c.real(a - b).abs() / c.real(b.abs_ref())
    }

    #[test]
    fn rejects_low_precision() {
        assert!(matches!(
            PrecisionContext::new(29),
            Err(Error::InvalidPrecision(29))
        ));
        assert!(PrecisionContext::new(30).is_ok());
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli_even(1), Rational::from((1, 6)));
        assert_eq!(bernoulli_even(2), Rational::from((-1, 30)));
        assert_eq!(bernoulli_even(3), Rational::from((1, 42)));
        assert_eq!(bernoulli_even(6), Rational::from((691, -2730)));
    }

    #[test]
    fn gamma_small_integers_and_half() {
        let c = ctx();
        assert_eq!(c.gamma(&c.real(1)).unwrap(), 1);
        assert_eq!(c.gamma(&c.real(3)).unwrap(), 2);
        let sqrt_pi = c.pi().sqrt();
        let g = c.gamma(&c.ratio(1, 2)).unwrap();
        assert!(rel_err(&g, &sqrt_pi) <= c.tolerance(5));
        assert!((g.to_f64() - 1.772_453_850_905_516).abs() < 1e-15);
    }

    #[test]
    fn gamma_domain_errors() {
        let c = ctx();
        assert!(matches!(c.gamma(&c.real(0)), Err(Error::Domain { .. })));
        assert!(matches!(c.gamma(&c.real(-2.5)), Err(Error::Domain { .. })));
    }

    #[test]
    fn gamma_integers_are_exact_factorials() {
        let c = ctx();
        for n in 1u32..=10 {
            let fact = c.real(Integer::from(Integer::factorial(n - 1)));
            assert_eq!(c.gamma(&c.real(n)).unwrap(), fact, "n = {n}");
        }
    }

    #[test]
    fn gamma_recurrence_on_random_points() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = c.real(rng.gen_range(0.1..10.0));
            let lhs = c.gamma(&c.real(&x + 1u32)).unwrap();
            let rhs = c.gamma(&x).unwrap() * &x;
            assert!(rel_err(&lhs, &rhs) <= c.tolerance(6));
        }
    }

    #[test]
    fn gamma_matches_mpfr() {
        // MPFR's own gamma is an independent implementation.
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = c.real(rng.gen_range(1e-3..60.0));
            let ours = c.gamma(&x).unwrap();
            let theirs = c.real(x.gamma_ref());
            assert!(rel_err(&ours, &theirs) <= c.tolerance(5));
        }
        let tiny = c.pow10_neg(40);
        let ours = c.gamma(&tiny).unwrap();
        assert!(rel_err(&ours, &c.real(tiny.gamma_ref())) <= c.tolerance(5));
    }

    #[test]
    fn gamma_at_higher_precision() {
        let c = PrecisionContext::new(300).unwrap();
        let g = c.gamma(&c.ratio(1, 3)).unwrap();
        let reference = c.real(c.ratio(1, 3).gamma_ref());
        let err = c.real(&g - &reference).abs() / &reference;
        assert!(err <= c.tolerance(5));
    }

    #[test]
    fn lambert_w_fixed_points() {
        let c = ctx();
        assert_eq!(c.lambert_w(&c.real(0)).unwrap(), 0);
        let w_e = c.lambert_w(&c.e()).unwrap();
        assert!(c.real(&w_e - 1u32).abs() <= c.tolerance(5));
        let omega = c.lambert_w(&c.real(1)).unwrap();
        let expected = c
            .parse("0.56714329040978387299996866221035554975381578718651")
            .unwrap();
        assert!(c.real(&omega - &expected).abs() < c.pow10_neg(48));
        let w25 = c.lambert_w(&c.real(25)).unwrap();
        let expected = c
            .parse("2.360150455522664176680493376603194612457")
            .unwrap();
        assert!(c.real(&w25 - &expected).abs() < c.pow10_neg(38));
    }

    #[test]
    fn lambert_w_rejects_negative() {
        let c = ctx();
        assert!(matches!(
            c.lambert_w(&c.real(-0.1)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn lambert_w_residual_on_random_points() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut points: Vec<Real> = (0..10).map(|_| c.real(rng.gen_range(1e-6..50.0))).collect();
        points.push(c.pow10_neg(100));
        points.push(c.real(1e80));
        for x in points {
            let w = c.lambert_w(&x).unwrap();
            let back = c.real(w.exp_ref()) * &w;
            assert!(rel_err(&back, &x) <= c.tolerance(5), "x = {}", x.to_f64());
        }
    }

    #[test]
    fn format_and_parse_round_trip() {
        let c = ctx();
        let x = c.pi() / 7u32;
        let text = c.format(&x);
        assert_eq!(c.format(&c.parse(&text).unwrap()), text);
        assert!(c.parse("not a number").is_err());
    }
}
