//! Working-precision plumbing shared by every numerical module.
//!
//! A [`PrecisionContext`] pins the target accuracy in decimal digits and
//! derives from it the binary working precision actually used: the target
//! plus [`GUARD_DIGITS`] guard digits, converted to bits.  Every `Float`
//! created through a context carries that working precision, so arithmetic
//! chains stay at full width and only the final reported value is judged
//! against the target.  The contract for a routine taking a context is that
//! its output is accurate to at least `digits − GUARD_DIGITS` digits; the
//! identity checks in [`crate::registry`] measure exactly that.
//!
//! The context also memoises the small set of constants that appear in the
//! closed-form side of evaluations (π, Catalan's constant, ζ(3), γ, log 2,
//! log 3) and the Bernoulli numbers used by the Euler–Maclaurin tail of the
//! Hurwitz zeta function.  Contexts are cheap to clone — the cache sits
//! behind an `Arc` — and safe to share across the check-runner's worker
//! threads.

use std::sync::{Arc, Mutex};

use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::{Complete, Complex, Float, Integer, Rational};

use crate::{Error, Result};

/// Guard digits added on top of the requested target precision.
pub const GUARD_DIGITS: u32 = 10;

/// Smallest accepted target precision.
pub const MIN_DIGITS: u32 = 10;

/// Largest accepted target precision (a generous bound; nothing in the
/// registry needs more than a few hundred digits).
pub const MAX_DIGITS: u32 = 10_000;

/// Default cap on the number of series terms before a routine reports a
/// convergence failure instead of looping forever.
pub const DEFAULT_SERIES_TERM_CAP: usize = 1_000_000;

/// Default cap on tanh-sinh / exp-sinh level doubling.
pub const DEFAULT_QUAD_LEVEL_CAP: u32 = 12;

/// log₂(10), used to convert decimal digits to bits of mantissa.
const LOG2_10: f64 = 3.321_928_094_887_362;

#[derive(Default)]
struct ConstCache {
    pi: Option<Float>,
    catalan: Option<Float>,
    zeta3: Option<Float>,
    euler: Option<Float>,
    ln2: Option<Float>,
    ln3: Option<Float>,
    /// All Bernoulli numbers B₀, B₁, B₂, … computed so far (exact).
    bernoulli: Vec<Rational>,
}

struct Inner {
    decimal_digits: u32,
    working_bits: u32,
    series_term_cap: usize,
    quadrature_level_cap: u32,
    cache: Mutex<ConstCache>,
}

/// Immutable bundle of precision settings plus memoised constants.
#[derive(Clone)]
pub struct PrecisionContext {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrecisionContext")
            .field("decimal_digits", &self.inner.decimal_digits)
            .field("working_bits", &self.inner.working_bits)
            .field("series_term_cap", &self.inner.series_term_cap)
            .field("quadrature_level_cap", &self.inner.quadrature_level_cap)
            .finish()
    }
}

impl PrecisionContext {
    /// Context targeting `decimal_digits` correct digits.
    ///
    /// Fails for targets below [`MIN_DIGITS`] or above [`MAX_DIGITS`].
    pub fn new(decimal_digits: u32) -> Result<Self> {
        Self::with_caps(
            decimal_digits,
            DEFAULT_SERIES_TERM_CAP,
            DEFAULT_QUAD_LEVEL_CAP,
        )
    }

    /// Context with explicit series/quadrature caps (tests use tighter caps
    /// to exercise the convergence-failure paths).
    pub fn with_caps(
        decimal_digits: u32,
        series_term_cap: usize,
        quadrature_level_cap: u32,
    ) -> Result<Self> {
        if !(MIN_DIGITS..=MAX_DIGITS).contains(&decimal_digits) {
            return Err(Error::Precision(format!(
                "target must be between {MIN_DIGITS} and {MAX_DIGITS} digits, got {decimal_digits}"
            )));
        }
        let working_digits = decimal_digits + GUARD_DIGITS;
        let working_bits = (working_digits as f64 * LOG2_10).ceil() as u32 + 8;
        Ok(Self {
            inner: Arc::new(Inner {
                decimal_digits,
                working_bits,
                series_term_cap,
                quadrature_level_cap,
                cache: Mutex::new(ConstCache::default()),
            }),
        })
    }

    /// Target precision in decimal digits.
    pub fn digits(&self) -> u32 {
        self.inner.decimal_digits
    }

    /// Target plus guard digits; the precision at which intermediates live.
    pub fn working_digits(&self) -> u32 {
        self.inner.decimal_digits + GUARD_DIGITS
    }

    /// Binary mantissa width corresponding to [`Self::working_digits`].
    pub fn bits(&self) -> u32 {
        self.inner.working_bits
    }

    pub fn series_term_cap(&self) -> usize {
        self.inner.series_term_cap
    }

    pub fn quadrature_level_cap(&self) -> u32 {
        self.inner.quadrature_level_cap
    }

    // ----------------------------------------------------------------
    // Float constructors
    // ----------------------------------------------------------------

    pub fn zero(&self) -> Float {
        Float::new(self.bits())
    }

    pub fn one(&self) -> Float {
        self.real(1)
    }

    pub fn real(&self, v: i64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn real_u(&self, v: u64) -> Float {
        Float::with_val(self.bits(), v)
    }

    /// Exact injection of an IEEE double (used by the Monte Carlo bridge,
    /// where samples are generated in `f64`).
    pub fn real_from_f64(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn real_from_rational(&self, r: &Rational) -> Float {
        Float::with_val(self.bits(), r)
    }

    pub fn real_from_integer(&self, n: &Integer) -> Float {
        Float::with_val(self.bits(), n)
    }

    /// `num/den` rounded once to working precision.
    pub fn fraction(&self, num: i64, den: i64) -> Float {
        debug_assert!(den != 0);
        self.real_from_rational(&Rational::from((num, den)))
    }

    /// `√v` for a small non-negative integer.
    pub fn sqrt_u(&self, v: u32) -> Float {
        Float::with_val(self.bits(), v).sqrt()
    }

    pub fn complex(&self, re: Float, im: Float) -> Complex {
        Complex::with_val(self.bits(), (re, im))
    }

    pub fn complex_zero(&self) -> Complex {
        Complex::new(self.bits())
    }

    /// The imaginary unit.
    pub fn i(&self) -> Complex {
        Complex::with_val(self.bits(), (0, 1))
    }

    /// Parse a decimal string (as emitted by [`to_decimal_string`]).
    pub fn parse_decimal(&self, s: &str) -> Result<Float> {
        let incomplete = Float::parse(s)
            .map_err(|e| Error::Domain(format!("cannot parse {s:?} as a decimal number: {e}")))?;
        Ok(Float::with_val(self.bits(), incomplete))
    }

    /// `10^{−(working_digits − 2)}`: the tolerance used as a stopping target
    /// by series summation and quadrature.  Two guard digits are kept in
    /// reserve for accumulation error on top of truncation error.
    pub fn tolerance(&self) -> Float {
        let e = -((self.working_digits() as i32) - 2);
        self.real(e as i64).exp10()
    }

    /// Like [`Self::tolerance`] but for a caller-chosen digit count.
    pub fn tol_digits(&self, digits: u32) -> Float {
        self.real(-(digits as i64)).exp10()
    }

    // ----------------------------------------------------------------
    // Memoised constants
    // ----------------------------------------------------------------

    fn cached(&self, pick: fn(&mut ConstCache) -> &mut Option<Float>, make: impl FnOnce(u32) -> Float) -> Float {
        let mut cache = self.inner.cache.lock().unwrap();
        let slot = pick(&mut cache);
        if slot.is_none() {
            *slot = Some(make(self.inner.working_bits));
        }
        slot.as_ref().unwrap().clone()
    }

    pub fn pi(&self) -> Float {
        self.cached(|c| &mut c.pi, |p| Float::with_val(p, Constant::Pi))
    }

    /// Catalan's constant G = Σ (−1)ⁿ/(2n+1)².
    pub fn catalan(&self) -> Float {
        self.cached(|c| &mut c.catalan, |p| Float::with_val(p, Constant::Catalan))
    }

    /// ζ(3), Apéry's constant.
    pub fn zeta3(&self) -> Float {
        self.cached(|c| &mut c.zeta3, |p| Float::with_val(p, 3).zeta())
    }

    /// Euler–Mascheroni γ.
    pub fn euler(&self) -> Float {
        self.cached(|c| &mut c.euler, |p| Float::with_val(p, Constant::Euler))
    }

    pub fn ln2(&self) -> Float {
        self.cached(|c| &mut c.ln2, |p| Float::with_val(p, Constant::Log2))
    }

    pub fn ln3(&self) -> Float {
        self.cached(|c| &mut c.ln3, |p| Float::with_val(p, 3).ln())
    }

    /// Γ(x) with an explicit pole error at non-positive integers.
    pub fn gamma(&self, x: &Float) -> Result<Float> {
        if x.is_integer() && !x.is_sign_positive() {
            return Err(Error::GammaPole(format!("Γ({x})")));
        }
        if x.is_zero() {
            return Err(Error::GammaPole("Γ(0)".into()));
        }
        Ok(x.clone().gamma())
    }

    /// Γ at an exact rational argument (quarter-integers and the like enter
    /// several closed forms; the rational is rounded once, then ­Γ is applied
    /// at working precision).
    pub fn gamma_rational(&self, r: &Rational) -> Result<Float> {
        if r.is_integer() && *r <= 0 {
            return Err(Error::GammaPole(format!("Γ({r})")));
        }
        Ok(self.real_from_rational(r).gamma())
    }

    /// Exact Bernoulli number B₂ₖ (B with odd index > 1 vanish and are not
    /// exposed).  Computed by the defining recurrence
    /// Σ_{j=0}^{m} C(m+1, j) B_j = 0 and memoised.
    pub fn bernoulli_2k(&self, k: u32) -> Rational {
        let m = 2 * k as usize;
        let mut cache = self.inner.cache.lock().unwrap();
        let bern = &mut cache.bernoulli;
        if bern.is_empty() {
            bern.push(Rational::from(1)); // B₀
            bern.push(Rational::from((-1, 2))); // B₁
        }
        while bern.len() <= m {
            let n = bern.len(); // computing B_n
            let mut acc = Rational::new();
            for (j, bj) in bern.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let binom = Integer::from(n as u32 + 1).binomial(j as u32);
                acc += (bj * &binom).complete();
            }
            acc /= -Rational::from(n as u32 + 1);
            bern.push(acc);
        }
        bern[m].clone()
    }
}

/// Render a float as a decimal string carrying `digits` significant digits
/// (the registry reports emit working-precision strings so that nothing is
/// lost on the way out).
pub fn to_decimal_string(x: &Float, digits: u32) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_positive() { "inf" } else { "-inf" }.into();
    }
    x.to_string_radix(10, Some(digits as usize))
}

/// Digit-agreement score between two values:
/// ⌊−log₁₀( |lhs − rhs| / max(|lhs|, 1) )⌋, clamped to `[-1, cap]`.
///
/// `cap` guards the `lhs == rhs` case (agreement beyond working precision is
/// not distinguishable and is reported as the cap).  Non-finite inputs score
/// −1.
pub fn digits_agreed(lhs: &Float, rhs: &Float, cap: i64) -> i64 {
    if !lhs.is_finite() || !rhs.is_finite() {
        return -1;
    }
    let diff = (lhs - rhs).complete(lhs.prec().max(rhs.prec())).abs();
    if diff.is_zero() {
        return cap;
    }
    let mut scale = lhs.clone().abs();
    if scale < 1u32 {
        scale = Float::with_val(lhs.prec(), 1);
    }
    let rel = diff / scale;
    let score = -rel.log10();
    let score = score.floor().to_f64();
    if !score.is_finite() {
        return -1;
    }
    (score as i64).clamp(-1, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    #[test]
    fn rejects_out_of_range_targets() {
        assert!(PrecisionContext::new(9).is_err());
        assert!(PrecisionContext::new(0).is_err());
        assert!(PrecisionContext::new(10).is_ok());
        assert!(PrecisionContext::new(MAX_DIGITS + 1).is_err());
    }

    /// Independent π oracle: Machin's formula π = 16 arctan(1/5) − 4 arctan(1/239)
    /// with the arctangents summed as explicit Taylor series.
    #[test]
    fn pi_matches_machin_oracle() {
        let c = ctx();
        let atan_inv = |den: i64| -> Float {
            let x = c.fraction(1, den);
            let x2 = x.clone() * &x;
            let mut term = x.clone();
            let mut sum = c.zero();
            let mut k = 0i64;
            let tol = c.tolerance();
            loop {
                let t = term.clone() / c.real(2 * k + 1);
                if k % 2 == 0 {
                    sum += &t;
                } else {
                    sum -= &t;
                }
                if t.abs() < tol {
                    break;
                }
                term *= &x2;
                k += 1;
            }
            sum
        };
        let machin = atan_inv(5) * 16 - atan_inv(239) * 4;
        assert!(digits_agreed(&c.pi(), &machin, 60) >= 45);
    }

    /// Independent Catalan oracle (Bradley):
    /// G = (π/8)·log(2+√3) + (3/8)·Σ_{n≥0} (n!)² / ((2n)!·(2n+1)²).
    #[test]
    fn catalan_matches_bradley_oracle() {
        let c = ctx();
        let mut sum = c.zero();
        let mut ratio = c.one(); // (n!)²/(2n)!
        let tol = c.tolerance();
        let mut n = 0i64;
        loop {
            let t = ratio.clone() / c.real((2 * n + 1).pow(2));
            sum += &t;
            if t < tol {
                break;
            }
            n += 1;
            // (n!)²/(2n)! ratio update: ×n²/((2n−1)(2n))
            ratio *= c.real(n * n) / c.real((2 * n - 1) * 2 * n);
        }
        let g = c.pi() / 8 * (c.sqrt_u(3) + 2u32).ln() + sum * c.fraction(3, 8);
        assert!(digits_agreed(&c.catalan(), &g, 60) >= 45);
    }

    /// Independent ζ(3) oracle: (5/2) Σ_{n≥1} (−1)^{n−1} / (n³ C(2n,n)).
    #[test]
    fn zeta3_matches_binomial_oracle() {
        let c = ctx();
        let mut sum = c.zero();
        let tol = c.tolerance();
        let mut binom = Integer::from(2); // C(2n,n) at n=1
        let mut n = 1i64;
        loop {
            let t = c.one() / (c.real(n.pow(3)) * c.real_from_integer(&binom));
            if n % 2 == 1 {
                sum += &t;
            } else {
                sum -= &t;
            }
            if t.abs() < tol {
                break;
            }
            n += 1;
            binom = binom * 2 * (2 * n - 1) / n; // C(2n,n) update
        }
        sum *= c.fraction(5, 2);
        assert!(digits_agreed(&c.zeta3(), &sum, 60) >= 45);
    }

    /// γ oracle via the exponential-integral series:
    /// γ = −log n + Σ_{k≥1} (−1)^{k+1} nᵏ/(k·k!) + O(e^{−n}), with the
    /// alternating sum run at boosted precision to absorb its eⁿ-scale
    /// cancellation.
    #[test]
    fn euler_gamma_matches_series_oracle() {
        let c = ctx();
        let n: i64 = 130; // e^{−130} ≈ 10^{−56}, beyond working precision
        let boosted = PrecisionContext::new(40 + 2 * 57).unwrap();
        let nf = boosted.real(n);
        let mut term = boosted.one();
        let mut sum = boosted.zero();
        let tiny = boosted.tolerance();
        let mut k = 1i64;
        loop {
            term = term.clone() * &nf / boosted.real(k); // nᵏ/k!
            let t = term.clone() / boosted.real(k);
            if k % 2 == 1 {
                sum += &t;
            } else {
                sum -= &t;
            }
            if k > n && t.abs() < tiny {
                break;
            }
            k += 1;
        }
        let gamma_est = sum - nf.ln();
        assert!(digits_agreed(&c.euler(), &Float::with_val(c.bits(), gamma_est), 60) >= 45);
    }

    #[test]
    fn gamma_quarter_integer_identities() {
        let c = ctx();
        // Γ(1/4)Γ(3/4) = π√2 (reflection), Γ(1/2) = √π.
        let g14 = c.gamma_rational(&Rational::from((1, 4))).unwrap();
        let g34 = c.gamma_rational(&Rational::from((3, 4))).unwrap();
        let lhs = g14 * g34;
        let rhs = c.pi() * c.sqrt_u(2);
        assert!(digits_agreed(&lhs, &rhs, 60) >= 45);
        let g12 = c.gamma_rational(&Rational::from((1, 2))).unwrap();
        let sqrt_pi = c.pi().sqrt();
        assert!(digits_agreed(&g12, &sqrt_pi, 60) >= 45);
    }

    #[test]
    fn gamma_pole_is_an_error() {
        let c = ctx();
        assert!(c.gamma(&c.real(0)).is_err());
        assert!(c.gamma(&c.real(-3)).is_err());
        assert!(c.gamma_rational(&Rational::from(-7)).is_err());
        assert!(c.gamma(&c.fraction(-7, 2)).is_ok());
    }

    #[test]
    fn bernoulli_values_are_exact() {
        let c = ctx();
        assert_eq!(c.bernoulli_2k(0), Rational::from(1));
        assert_eq!(c.bernoulli_2k(1), Rational::from((1, 6)));
        assert_eq!(c.bernoulli_2k(2), Rational::from((-1, 30)));
        assert_eq!(c.bernoulli_2k(3), Rational::from((1, 42)));
        assert_eq!(c.bernoulli_2k(4), Rational::from((-1, 30)));
        assert_eq!(c.bernoulli_2k(5), Rational::from((5, 66)));
        assert_eq!(c.bernoulli_2k(6), Rational::from((-691, 2730)));
    }

    #[test]
    fn decimal_round_trip_is_stable() {
        let c = ctx();
        let x = c.pi() / c.real(7);
        let s = to_decimal_string(&x, c.working_digits());
        let y = c.parse_decimal(&s).unwrap();
        // One decimal→binary→decimal cycle keeps every working digit.
        assert!(digits_agreed(&x, &y, c.working_digits() as i64) >= c.working_digits() as i64 - 2);
        // And re-emission of the parsed value reproduces the string exactly.
        assert_eq!(s, to_decimal_string(&y, c.working_digits()));
    }

    #[test]
    fn digit_agreement_scores() {
        let c = ctx();
        let a = c.real(1);
        let mut b = c.one();
        b += c.tol_digits(25) * c.real(3);
        // |Δ| = 3·10⁻²⁵ ⇒ ⌊−log₁₀|Δ|⌋ = 24 (well away from the floor boundary).
        assert_eq!(digits_agreed(&a, &b, 99), 24);
        assert_eq!(digits_agreed(&a, &a, 99), 99);
        // Tiny values are scored against scale 1, not against themselves.
        let small = c.tol_digits(30) * c.real(3);
        let zero = c.zero();
        assert_eq!(digits_agreed(&small, &zero, 99), 29);
        let nan = Float::with_val(c.bits(), rug::float::Special::Nan);
        assert_eq!(digits_agreed(&nan, &a, 99), -1);
    }

    /// Recomputation stability: the same quantity at D and D+20 digits must
    /// agree to at least D−5 digits (here with plenty to spare).
    #[test]
    fn recomputation_stability_for_constants() {
        let d = 30u32;
        let lo = PrecisionContext::new(d).unwrap();
        let hi = PrecisionContext::new(d + 20).unwrap();
        for (a, b) in [
            (lo.pi(), hi.pi()),
            (lo.catalan(), hi.catalan()),
            (lo.zeta3(), hi.zeta3()),
        ] {
            assert!(digits_agreed(&a, &b, 99) >= d as i64 - 5);
        }
    }
}
