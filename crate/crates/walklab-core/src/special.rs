//! Hypergeometric and Bessel building blocks.
//!
//! Everything here is a numerical evaluator with an explicit validity range
//! and a convergence contract; the walk-specific assembly lives in
//! [`crate::walks`].  Highlights:
//!
//! * `gauss_2f1_half` — ₂F₁(½,½;1;m) through the arithmetic-geometric mean,
//!   `1/agm(1, √(1−m))`, valid for all m < 1 and immune to the series'
//!   slowdown as m → 1⁻;
//! * `gauss_2f1_third` — ₂F₁(⅓,⅔;1;z) with the logarithmic z → 1 connection
//!   series, needed where the direct series is useless;
//! * `hyp3f2_heavy_halves` — ₃F₂(½,½,½;3/2,3/2;z) on [0,1], switching from
//!   the series to the arcsine integral representation near 1;
//! * `hyp4f3_unit` — the unit-argument ₄F₃(1,1,1,½;c,3/2,3/2;1) family via
//!   an exact reduction to a single integral plus a Catalan term;
//! * `bessel_i0` / `bessel_k0` — series with cancellation-compensating
//!   precision boost, switching to the asymptotic expansions for large t;
//! * `gamma_upper` — incomplete gamma Γ(a,x) for integer a of either sign.

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::precision::PrecisionContext;
use crate::quad::tanh_sinh;
use crate::{Error, Result};

/// Generalised hypergeometric series Σ ∏(aᵢ)ₙ/∏(bⱼ)ₙ · zⁿ/n! by direct
/// summation.  The caller is responsible for giving it an argument where the
/// series actually converges at a useful rate; the term cap turns a bad call
/// into an error instead of a hang.
pub fn pfq(ctx: &PrecisionContext, a: &[Rational], b: &[Rational], z: &Float) -> Result<Float> {
    let bits = ctx.bits();
    let tol = ctx.tolerance();
    let mut term = ctx.one();
    let mut sum = ctx.one();
    let mut small_streak = 0;
    for n in 0..ctx.series_term_cap() {
        let nf = ctx.real_u(n as u64);
        let mut ratio = Float::with_val(bits, z / (nf.clone() + 1u32));
        for ai in a {
            ratio *= Float::with_val(bits, &nf + ctx.real_from_rational(ai));
        }
        for bj in b {
            ratio /= Float::with_val(bits, &nf + ctx.real_from_rational(bj));
        }
        term *= ratio;
        sum += &term;
        let scale = if sum.clone().abs() > 1 { sum.clone().abs() } else { ctx.one() };
        if term.clone().abs() < Float::with_val(bits, &tol * &scale) {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::SeriesConvergence {
        terms: ctx.series_term_cap(),
        context: format!("pFq series at z = {}", z.to_f64()),
    })
}

fn rat(p: i64, q: i64) -> Rational {
    Rational::from((p, q))
}

/// ₂F₁(½,½;1;m) = 1/agm(1, √(1−m)) for m < 1.
///
/// The AGM route is exact on the whole half-line, including the regime
/// m → 1⁻ where the defining series crawls; no branch switching is needed.
pub fn gauss_2f1_half(ctx: &PrecisionContext, m: &Float) -> Result<Float> {
    if !(m.clone() < 1u32) {
        return Err(Error::Domain(format!(
            "2F1(1/2,1/2;1;m) via agm needs m < 1, got {}",
            m.to_f64()
        )));
    }
    let one_minus = Float::with_val(ctx.bits(), 1 - m);
    Ok(one_minus.sqrt().agm(&ctx.one()).recip())
}

/// Same function with `1−m` supplied directly (for callers sitting close to
/// m = 1 that hold the complement to full precision).
pub fn gauss_2f1_half_cm(ctx: &PrecisionContext, one_minus_m: &Float) -> Result<Float> {
    if !(one_minus_m.clone() > 0u32) {
        return Err(Error::Domain(
            "2F1(1/2,1/2;1;m) via agm needs 1−m > 0".into(),
        ));
    }
    Ok(one_minus_m.clone().sqrt().agm(&ctx.one()).recip())
}

/// ₂F₁(⅓,⅔;1;z) on [0, 1).  Direct series for z ≤ ½; for z > ½ the
/// connection series around z = 1,
///
/// ```text
/// F(z) = (√3/2π) Σₙ rₙ (1−z)ⁿ [2ψ(n+1) − ψ(n+⅓) − ψ(n+⅔) − ln(1−z)],
/// rₙ = (⅓)ₙ(⅔)ₙ/(n!)²,
/// ```
///
/// whose leading term exhibits the logarithmic divergence at z = 1.
pub fn gauss_2f1_third(ctx: &PrecisionContext, z: &Float, one_minus_z: &Float) -> Result<Float> {
    let bits = ctx.bits();
    if !(one_minus_z.clone() > 0u32) {
        return Err(Error::Domain(
            "2F1(1/3,2/3;1;z) diverges at z = 1 and is not evaluated beyond".into(),
        ));
    }
    if z.clone() <= 0.5 {
        return pfq(ctx, &[rat(1, 3), rat(2, 3)], &[rat(1, 1)], z);
    }
    let tol = ctx.tolerance();
    let ln_omz = one_minus_z.clone().ln();
    // d₀ = 2ψ(1) − ψ(1/3) − ψ(2/3); thereafter
    // dₙ₊₁ = dₙ + 2/(n+1) − 1/(n+1/3) − 1/(n+2/3).
    let psi_one = -ctx.euler();
    let psi_third = Float::with_val(bits, ctx.real_from_rational(&rat(1, 3))).digamma();
    let psi_two_thirds = Float::with_val(bits, ctx.real_from_rational(&rat(2, 3))).digamma();
    let mut d = Float::with_val(bits, 2 * &psi_one) - &psi_third - &psi_two_thirds;
    let mut r = ctx.one(); // rₙ (1−z)ⁿ
    let mut sum = ctx.zero();
    let mut small_streak = 0;
    for n in 0..ctx.series_term_cap() {
        let term = Float::with_val(bits, &d - &ln_omz) * &r;
        sum += &term;
        let scale = if sum.clone().abs() > 1 { sum.clone().abs() } else { ctx.one() };
        if term.abs() < Float::with_val(bits, &tol * &scale) {
            small_streak += 1;
            if small_streak >= 2 {
                break;
            }
        } else {
            small_streak = 0;
        }
        let n3 = Float::with_val(bits, ctx.real_u(3 * n as u64 + 1)) / 3u32;
        let n23 = Float::with_val(bits, ctx.real_u(3 * n as u64 + 2)) / 3u32;
        let np1 = ctx.real_u(n as u64 + 1);
        let ratio = Float::with_val(bits, &n3 * &n23)
            / Float::with_val(bits, &np1 * &np1)
            * one_minus_z;
        r *= ratio;
        d += Float::with_val(bits, 2u32) / &np1;
        d -= n3.recip();
        d -= n23.recip();
        if n + 1 == ctx.series_term_cap() {
            return Err(Error::SeriesConvergence {
                terms: ctx.series_term_cap(),
                context: "2F1(1/3,2/3;1;z) connection series".into(),
            });
        }
    }
    let pref = ctx.real_u(3).sqrt() / (ctx.pi() * 2u32);
    Ok(pref * sum)
}

/// ₃F₂(½,½,½;3/2,3/2;z) on [0,1]: Σₙ C(2n,n) zⁿ/(4ⁿ(2n+1)²).
///
/// Terms decay only like n^{−5/2} zⁿ, so near z = 1 the series is replaced
/// by the equivalent integral (1/√z)∫₀^{√z} arcsin(t)/t dt.
pub fn hyp3f2_heavy_halves(ctx: &PrecisionContext, z: &Float) -> Result<Float> {
    if z.clone() < 0u32 || z.clone() > 1u32 {
        return Err(Error::Domain(format!(
            "3F2(1/2,1/2,1/2;3/2,3/2;z) evaluated only on [0,1], got {}",
            z.to_f64()
        )));
    }
    let bits = ctx.bits();
    if z.clone() <= 0.9 {
        if z.is_zero() {
            return Ok(ctx.one());
        }
        let tol = ctx.tolerance();
        let mut c = ctx.one(); // C(2n,n) zⁿ/4ⁿ
        let mut sum = ctx.one(); // n = 0 term: 1/(1)² = 1
        for n in 1..ctx.series_term_cap() {
            let nn = n as u64;
            c *= Float::with_val(bits, ctx.real_u(2 * nn - 1) / ctx.real_u(2 * nn)) * z;
            let term = c.clone() / ctx.real_u((2 * nn + 1) * (2 * nn + 1));
            sum += &term;
            if term.abs() < tol {
                return Ok(sum);
            }
        }
        return Err(Error::SeriesConvergence {
            terms: ctx.series_term_cap(),
            context: "3F2(1/2,1/2,1/2;3/2,3/2;z) series".into(),
        });
    }
    let sqrt_z = z.clone().sqrt();
    let r = tanh_sinh(ctx, &ctx.zero(), &sqrt_z, |x: &Float, _: &Float, _: &Float| {
        if x.is_zero() {
            return Ok(ctx.one());
        }
        Ok(x.clone().asin() / x)
    })?;
    Ok(r.value / sqrt_z)
}

/// ₃F₂(½,½,½;5/6,7/6;w) by direct series; converges geometrically for
/// |w| < 1 and is used only well inside the disc.
pub fn hyp3f2_torus(ctx: &PrecisionContext, w: &Float) -> Result<Float> {
    if w.clone().abs() > 0.75 {
        return Err(Error::Domain(format!(
            "3F2(1/2,1/2,1/2;5/6,7/6;w) series used only for |w| ≤ 3/4, got {}",
            w.to_f64()
        )));
    }
    pfq(
        ctx,
        &[rat(1, 2), rat(1, 2), rat(1, 2)],
        &[rat(5, 6), rat(7, 6)],
        w,
    )
}

/// The w = 1 endpoint of [`hyp3f2_torus`] in closed form:
/// π·Γ(7/6) / (Γ(⅔)²·Γ(5/6)).
pub fn hyp3f2_torus_unit(ctx: &PrecisionContext) -> Result<Float> {
    let bits = ctx.bits();
    let g76 = ctx.gamma_rational(&rat(7, 6))?;
    let g23 = ctx.gamma_rational(&rat(2, 3))?;
    let g56 = ctx.gamma_rational(&rat(5, 6))?;
    Ok(ctx.pi() * g76 / (Float::with_val(bits, &g23 * &g23) * g56))
}

/// ₂F₁(1,b;3/2;z) for 0 ≤ z ≤ 1, b non-integer < 3/2 + 1: direct series for
/// z ≤ ½, and for z > ½ the two-term connection
///
/// ```text
/// ₂F₁(1,b;3/2;z) = K₁ ₂F₁(1,b;b+½;1−z) + K₂ (1−z)^{½−b} z^{−1/2},
/// K₁ = Γ(3/2)Γ(½−b)/(Γ(½)Γ(3/2−b)),   K₂ = Γ(3/2)Γ(b−½)/Γ(b),
/// ```
///
/// with `1−z` supplied by the caller so the right endpoint stays exact.
pub fn hyp2f1_1_b_32(
    ctx: &PrecisionContext,
    b: &Rational,
    z: &Float,
    one_minus_z: &Float,
) -> Result<Float> {
    let bits = ctx.bits();
    if z.clone() < 0u32 {
        return Err(Error::Domain("2F1(1,b;3/2;z) evaluated only for z ≥ 0".into()));
    }
    if z.clone() <= 0.5 {
        return pfq(ctx, &[rat(1, 1), b.clone()], &[rat(3, 2)], z);
    }
    if !(one_minus_z.clone() > 0u32) {
        return Err(Error::Domain("2F1(1,b;3/2;z) needs z < 1".into()));
    }
    if *b == rat(1, 2) {
        // Degenerate connection (Γ(1/2−b) pole); classical closed form
        // ₂F₁(1,½;3/2;z) = artanh(√z)/√z, with 1−√z = (1−z)/(1+√z) kept
        // exact near the right endpoint.
        let s = z.clone().sqrt();
        let one_plus = Float::with_val(bits, 1 + &s);
        let one_minus = Float::with_val(bits, one_minus_z / &one_plus);
        let at = Float::with_val(bits, &one_plus / &one_minus).ln() / 2u32;
        return Ok(at / s);
    }
    let g32 = ctx.gamma_rational(&rat(3, 2))?;
    let half_minus_b = rat(1, 2) - b.clone();
    let b_minus_half = b.clone() - rat(1, 2);
    let k1 = Float::with_val(bits, &g32 * &ctx.gamma_rational(&half_minus_b)?)
        / (ctx.pi().sqrt() * ctx.gamma_rational(&(rat(3, 2) - b.clone()))?);
    let k2 = Float::with_val(bits, &g32 * &ctx.gamma_rational(&b_minus_half)?)
        / ctx.gamma_rational(b)?;
    let inner = pfq(
        ctx,
        &[rat(1, 1), b.clone()],
        &[b.clone() + rat(1, 2)],
        one_minus_z,
    )?;
    let exponent = ctx.real_from_rational(&half_minus_b);
    let tail = one_minus_z.clone().pow(&exponent) / z.clone().sqrt();
    Ok(k1 * inner + k2 * tail)
}

/// ₄F₃(1,1,1,½; c,3/2,3/2; 1) for rational c > ½.
///
/// Exact reduction (beta-kernel representation of the Pochhammer ratios,
/// the substitution w² = uv, an Euler integral and a Pfaff map):
///
/// ```text
/// S(c) = −2(c−1)·I(c) + 2√π·G·Γ(c)/Γ(c−½),
/// I(c) = ∫₀¹ arcsin(w)·(1−w²)^{c−3/2}·₂F₁(1,c−½;3/2;w²) dw,
/// ```
///
/// with G Catalan's constant.  Degenerate cases with classical closed forms
/// (c = 1 → 2G, c = 3/2 → 7ζ(3)/2 − πG) pin the constants down in tests.
pub fn hyp4f3_unit(ctx: &PrecisionContext, c: &Rational) -> Result<Float> {
    if *c <= rat(1, 2) {
        return Err(Error::Domain(
            "4F3(1,1,1,1/2;c,3/2,3/2;1) reduction needs c > 1/2".into(),
        ));
    }
    let bits = ctx.bits();
    let b = c.clone() - rat(1, 2);
    let c_exp = ctx.real_from_rational(&(c.clone() - rat(3, 2)));
    let integral = tanh_sinh(ctx, &ctx.zero(), &ctx.one(), |w: &Float, _: &Float, fb: &Float| {
        // 1 − w² = (1 − w)(1 + w), with 1 − w exact from the node.
        let omw2 = Float::with_val(bits, fb * &Float::with_val(bits, 1 + w));
        let w2 = Float::with_val(bits, w * w);
        let f = hyp2f1_1_b_32(ctx, &b, &w2, &omw2)?;
        Ok(w.clone().asin() * omw2.pow(&c_exp) * f)
    })?;
    let lead = ctx.real_from_rational(&(Rational::from(-2) * (c.clone() - rat(1, 1))));
    let gamma_ratio = ctx.gamma_rational(c)? / ctx.gamma_rational(&b)?;
    let catalan_term = ctx.pi().sqrt() * 2u32 * ctx.catalan() * gamma_ratio;
    Ok(lead * integral.value + catalan_term)
}

// --------------------------------------------------------------------
// Bessel functions
// --------------------------------------------------------------------

/// Large-argument threshold: beyond it the asymptotic expansions reach the
/// working tolerance at their optimal truncation (error ~ e^{−2t}).
fn bessel_asymptotic_threshold(ctx: &PrecisionContext) -> f64 {
    let wp = ctx.working_digits() as f64;
    (wp * 10f64.ln() / 2.0).max(30.0)
}

/// Shared asymptotic core: Σₖ σₖ aₖ/tᵏ with aₖ = ∏ⱼ₌₁ᵏ (2j−1)²/(8j t)
/// (σ = +1 for I₀, alternating for K₀), truncated at its smallest term.
fn bessel_asymptotic_series(ctx: &PrecisionContext, t: &Float, alternating: bool) -> Result<Float> {
    let bits = ctx.bits();
    let tol = ctx.tolerance();
    let mut term = ctx.one();
    let mut sum = ctx.one();
    let mut prev_mag = Float::with_val(bits, f64::INFINITY);
    for k in 1u64..100_000 {
        let num = ctx.real_u((2 * k - 1) * (2 * k - 1));
        term *= num / (ctx.real_u(8 * k) * t.clone());
        let mag = term.clone().abs();
        if mag > prev_mag {
            return Err(Error::SeriesConvergence {
                terms: k as usize,
                context: format!(
                    "Bessel asymptotic series started diverging before tolerance at t = {}",
                    t.to_f64()
                ),
            });
        }
        if alternating && k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        if mag < tol {
            return Ok(sum);
        }
        prev_mag = mag;
    }
    Err(Error::SeriesConvergence {
        terms: 100_000,
        context: "Bessel asymptotic series".into(),
    })
}

/// Modified Bessel I₀(t) for t ≥ 0.
pub fn bessel_i0(ctx: &PrecisionContext, t: &Float) -> Result<Float> {
    let bits = ctx.bits();
    if t.clone() < 0u32 {
        return Err(Error::Domain("I0 evaluated only for t ≥ 0".into()));
    }
    if t.to_f64() > bessel_asymptotic_threshold(ctx) {
        let series = bessel_asymptotic_series(ctx, t, false)?;
        let pref = t.clone().exp() / (ctx.pi() * 2u32 * t.clone()).sqrt();
        return Ok(pref * series);
    }
    // Power series Σ (t²/4)ᵏ/k!²; all terms positive, no cancellation.
    let tol = ctx.tolerance();
    let q = Float::with_val(bits, t * t) / 4u32;
    let mut term = ctx.one();
    let mut sum = ctx.one();
    for k in 1u64..ctx.series_term_cap() as u64 {
        term *= q.clone() / ctx.real_u(k * k);
        sum += &term;
        if term.clone() / &sum < tol {
            return Ok(sum);
        }
    }
    Err(Error::SeriesConvergence {
        terms: ctx.series_term_cap(),
        context: "I0 power series".into(),
    })
}

/// Modified Bessel K₀(t) for t > 0.
///
/// The ascending series K₀ = −(ln(t/2)+γ)I₀ + Σ (t²/4)ᵏ Hₖ/k!² suffers
/// cancellation of order e^{2t} between its two pieces, so it runs at a
/// precision boosted by ~2t/ln 2 bits; past the asymptotic threshold the
/// descending series is both faster and exact enough.
pub fn bessel_k0(ctx: &PrecisionContext, t: &Float) -> Result<Float> {
    if !(t.clone() > 0u32) {
        return Err(Error::Domain("K0 evaluated only for t > 0".into()));
    }
    if t.to_f64() > bessel_asymptotic_threshold(ctx) {
        let series = bessel_asymptotic_series(ctx, t, true)?;
        let pref = (-t.clone()).exp() * (ctx.pi() / (t.clone() * 2u32)).sqrt();
        return Ok(pref * series);
    }
    let boost = (2.0 * t.to_f64() / 2f64.ln()).ceil() as u32 + 32;
    let bp = ctx.bits() + boost;
    let tb = Float::with_val(bp, t);
    // The result is ~e^{−2t} times the two accumulating pieces, so the
    // stopping test must absorb the same cancellation factor that the
    // precision boost does; otherwise the truncated tail dominates K₀.
    let tol = Float::with_val(bp, &ctx.tolerance()) * (tb.clone() * -2i32).exp();
    let gamma = Float::with_val(bp, rug::float::Constant::Euler);
    let q = Float::with_val(bp, &tb * &tb) / 4u32;
    // I₀ and the harmonic-weighted companion accumulated side by side.
    let mut i0 = Float::with_val(bp, 1);
    let mut companion = Float::with_val(bp, 0);
    let mut term = Float::with_val(bp, 1);
    let mut harmonic = Float::with_val(bp, 0);
    for k in 1u64..ctx.series_term_cap() as u64 {
        term *= q.clone() / Float::with_val(bp, k * k);
        harmonic += Float::with_val(bp, k).recip();
        i0 += &term;
        let contrib = Float::with_val(bp, &term * &harmonic);
        companion += &contrib;
        if term.clone() / &i0 < tol && contrib.clone().abs() / &i0 < tol {
            let log_half_t = (tb.clone() / 2u32).ln();
            let k0 = companion - (log_half_t + gamma) * i0;
            return Ok(Float::with_val(ctx.bits(), k0));
        }
    }
    Err(Error::SeriesConvergence {
        terms: ctx.series_term_cap(),
        context: "K0 ascending series".into(),
    })
}

// --------------------------------------------------------------------
// Incomplete gamma for integer order
// --------------------------------------------------------------------

/// Upper incomplete gamma Γ(a, x) for integer a and x > 0.
///
/// * a ≥ 1: Γ(a,x) = (a−1)! e^{−x} Σ_{j<a} xʲ/j!;
/// * a = 0: Γ(0,x) = E₁(x) = −Ei(−x);
/// * a < 0: downward recurrence Γ(a−1,x) = (Γ(a,x) − x^{a−1}e^{−x})/(a−1).
pub fn gamma_upper(ctx: &PrecisionContext, a: i64, x: &Float) -> Result<Float> {
    let bits = ctx.bits();
    if !(x.clone() > 0u32) {
        return Err(Error::Domain(format!(
            "Γ({a}, x) needs x > 0, got {}",
            x.to_f64()
        )));
    }
    if a >= 1 {
        // (a−1)! e^{−x} Σ_{j=0}^{a−1} xʲ/j!
        let mut sum = ctx.one();
        let mut term = ctx.one();
        let mut factorial = ctx.one();
        for j in 1..a {
            term *= Float::with_val(bits, x / ctx.real(j));
            sum += &term;
            factorial *= ctx.real(j);
        }
        return Ok(factorial * (-x.clone()).exp() * sum);
    }
    // E₁(x) = −Ei(−x)
    let mut g = -Float::with_val(bits, -x).eint();
    let e_mx = (-x.clone()).exp();
    let mut cur = 0i64;
    while cur > a {
        // Γ(cur−1, x) = (Γ(cur,x) − x^{cur−1} e^{−x}) / (cur−1)
        let power = x.clone().pow((cur - 1) as i32);
        g = (g - Float::with_val(bits, &power * &e_mx)) / ctx.real(cur - 1);
        cur -= 1;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::digits_agreed;
    use crate::quad::exp_sinh;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn assert_digits(lhs: &Float, rhs: &Float, want: i64) {
        let got = digits_agreed(lhs, rhs, 300);
        assert!(got >= want, "only {got} digits agree:\n  {lhs}\n  {rhs}");
    }

    #[test]
    fn agm_route_matches_series_and_lemniscate() {
        let c = ctx();
        for m in ["0.1", "0.4", "-0.8"] {
            let mf = c.parse_decimal(m).unwrap();
            let via_agm = gauss_2f1_half(&c, &mf).unwrap();
            let via_series = pfq(&c, &[rat(1, 2), rat(1, 2)], &[rat(1, 1)], &mf).unwrap();
            assert_digits(&via_agm, &via_series, 38);
        }
        // 2F1(1/2,1/2;1;1/2) = Γ(1/4)² / (2π^{3/2})
        let half = c.fraction(1, 2);
        let lhs = gauss_2f1_half(&c, &half).unwrap();
        let g14 = c.gamma_rational(&rat(1, 4)).unwrap();
        let rhs = Float::with_val(c.bits(), &g14 * &g14)
            / (c.pi().pow(c.fraction(3, 2)) * 2u32);
        assert_digits(&lhs, &rhs, 39);
    }

    /// Iteration aₙ₊₁ = (aₙ+2bₙ)/3, bₙ₊₁ = ∛(bₙ(aₙ²+aₙbₙ+bₙ²)/3): its limit
    /// inverts 2F1(1/3,2/3;1;1−(b/a)³) — an oracle with no series in common
    /// with the implementation under test.
    fn cubic_agm(c: &PrecisionContext, a0: &Float, b0: &Float) -> Float {
        let bits = c.bits();
        let mut a = a0.clone();
        let mut b = b0.clone();
        for _ in 0..200 {
            let a_next = (a.clone() + Float::with_val(bits, 2 * &b)) / 3u32;
            let inner = Float::with_val(bits, &a * &a)
                + Float::with_val(bits, &a * &b)
                + Float::with_val(bits, &b * &b);
            let b_next = (b.clone() * inner / 3u32).cbrt();
            let diff = Float::with_val(bits, &a_next - &b_next).abs();
            a = a_next;
            b = b_next;
            if diff < c.tolerance() {
                break;
            }
        }
        a
    }

    #[test]
    fn third_connection_agrees_with_cubic_agm() {
        let c = ctx();
        // z = 1 − x³ for x = 0.7 lands in the connection branch (z ≈ 0.657).
        for x_str in ["0.7", "0.32"] {
            let x = c.parse_decimal(x_str).unwrap();
            let x3 = x.clone().pow(3);
            let z = Float::with_val(c.bits(), 1 - &x3);
            let f = gauss_2f1_third(&c, &z, &x3).unwrap();
            let agm3 = cubic_agm(&c, &c.one(), &x);
            assert_digits(&f, &agm3.recip(), 37);
        }
        // Seam continuity: both branches at z = 1/2 ± 10⁻²⁵ agree.
        let below = c.parse_decimal("0.4999999999999999999999999").unwrap();
        let above = c.parse_decimal("0.5000000000000000000000001").unwrap();
        let f_lo = gauss_2f1_third(&c, &below, &Float::with_val(c.bits(), 1 - &below)).unwrap();
        let f_hi = gauss_2f1_third(&c, &above, &Float::with_val(c.bits(), 1 - &above)).unwrap();
        assert_digits(&f_lo, &f_hi, 24);
    }

    #[test]
    fn heavy_halves_series_and_integral_agree() {
        let c = ctx();
        // Seam: z = 0.9 exactly via series, z slightly above via integral.
        let z1 = c.parse_decimal("0.9").unwrap();
        let z2 = c.parse_decimal("0.90000000000000000001").unwrap();
        let f1 = hyp3f2_heavy_halves(&c, &z1).unwrap();
        let f2 = hyp3f2_heavy_halves(&c, &z2).unwrap();
        assert_digits(&f1, &f2, 18);
        // Closed form at z = 1: Σ C(2n,n)/(4ⁿ(2n+1)²) = (π/2) log 2.
        let f_unit = hyp3f2_heavy_halves(&c, &c.one()).unwrap();
        let exact = c.pi() / 2u32 * c.ln2();
        assert_digits(&f_unit, &exact, 37);
        // Known special value at z = 1/2: √2·3F2(...;1/2) = G + (π/4) log 2.
        let half = c.fraction(1, 2);
        let f_half = hyp3f2_heavy_halves(&c, &half).unwrap();
        let target = (c.catalan() + c.pi() / 4u32 * c.ln2()) / c.real_u(2).sqrt();
        assert_digits(&f_half, &target, 38);
    }

    #[test]
    fn torus_series_within_disc() {
        let c = ctx();
        let w = c.parse_decimal("0.22").unwrap();
        let direct = hyp3f2_torus(&c, &w).unwrap();
        let generic = pfq(
            &c,
            &[rat(1, 2), rat(1, 2), rat(1, 2)],
            &[rat(5, 6), rat(7, 6)],
            &w,
        )
        .unwrap();
        assert_digits(&direct, &generic, 39);
        assert!(hyp3f2_torus(&c, &c.parse_decimal("0.9").unwrap()).is_err());
    }

    #[test]
    fn connection_2f1_matches_arcsine_closed_form() {
        let c = ctx();
        // b = 1: 2F1(1,1;3/2;z) = arcsin(√z)/√(z(1−z)), exercised in the
        // connection branch (z = 0.8) and the series branch (z = 0.3).
        for z_str in ["0.3", "0.8"] {
            let z = c.parse_decimal(z_str).unwrap();
            let omz = Float::with_val(c.bits(), 1 - &z);
            let f = hyp2f1_1_b_32(&c, &rat(1, 1), &z, &omz).unwrap();
            let sq = z.clone().sqrt();
            let exact = sq.clone().asin() / (sq * omz.sqrt());
            assert_digits(&f, &exact, 38);
        }
        // Non-integer b across the seam.
        let below = c.parse_decimal("0.4999999").unwrap();
        let above = c.parse_decimal("0.5000001").unwrap();
        for b in [rat(1, 4), rat(3, 4), rat(5, 4)] {
            let f_lo = hyp2f1_1_b_32(&c, &b, &below, &Float::with_val(c.bits(), 1 - &below)).unwrap();
            let f_hi = hyp2f1_1_b_32(&c, &b, &above, &Float::with_val(c.bits(), 1 - &above)).unwrap();
            assert_digits(&f_lo, &f_hi, 6);
        }
    }

    #[test]
    fn unit_4f3_degenerate_closed_forms() {
        let c = ctx();
        // c = 1 collapses to Σ n!²/((3/2)ₙ² (2n+1))-type Catalan machinery: 2G.
        let s1 = hyp4f3_unit(&c, &rat(1, 1)).unwrap();
        let two_g = c.catalan() * 2u32;
        assert_digits(&s1, &two_g, 38);
        // c = 3/2: 7ζ(3)/2 − πG.
        let s32 = hyp4f3_unit(&c, &rat(3, 2)).unwrap();
        let exact = c.zeta3() * c.fraction(7, 2) - c.pi() * c.catalan();
        assert_digits(&s32, &exact, 36);
    }

    /// Partial sums of the defining series, Richardson-extrapolated in the
    /// known tail powers N^{−(c−1/2)−k}: an oracle sharing nothing with the
    /// integral reduction it validates.
    fn unit_4f3_by_extrapolation(c: &PrecisionContext, cv: &Rational, digits: i64) {
        let bits = c.bits();
        let snapshots_at = [8000u64, 16000, 32000, 64000];
        let mut snaps = Vec::new();
        let mut partial = c.zero();
        let mut term = c.one();
        let cf = c.real_from_rational(cv);
        for n in 0u64..=64000 {
            partial += &term;
            if snapshots_at.contains(&(n + 1)) {
                snaps.push(partial.clone());
            }
            let nf = c.real_u(n);
            let num = (nf.clone() + 1u32).pow(3) * (nf.clone() + c.fraction(1, 2));
            let den = (nf.clone() + &cf)
                * (nf.clone() + c.fraction(3, 2)).pow(2)
                * (nf + 1u32);
            term *= num / den;
        }
        // Tail exponent ladder: p, p+1, p+2 with p = c − 1/2.
        let mut rows = snaps;
        let p0 = c.real_from_rational(&(cv.clone() - rat(1, 2)));
        for k in 0..3u32 {
            let p = Float::with_val(bits, &p0 + c.real_u(k as u64));
            let f = c.real_u(2).pow(&p);
            rows = rows
                .windows(2)
                .map(|w| {
                    (Float::with_val(bits, &f * &w[1]) - &w[0])
                        / Float::with_val(bits, &f - &c.one())
                })
                .collect();
        }
        let s = hyp4f3_unit(c, cv).unwrap();
        let got = digits_agreed(&s, &rows[0], 60);
        assert!(
            got >= digits,
            "c = {cv}: reduction and extrapolated series agree to only {got} digits:\n  {s}\n  {}",
            rows[0]
        );
    }

    #[test]
    fn unit_4f3_matches_extrapolated_series() {
        let c = ctx();
        unit_4f3_by_extrapolation(&c, &rat(3, 4), 6);
        unit_4f3_by_extrapolation(&c, &rat(5, 4), 7);
        unit_4f3_by_extrapolation(&c, &rat(7, 4), 8);
    }

    #[test]
    fn bessel_match_integral_representations() {
        let c = ctx();
        // I₀(t) = (1/π)∫₀^π e^{t cos θ} dθ (Gauss-Legendre, entire integrand);
        // K₀(t) = ∫₀^∞ e^{−t cosh u} du (exp-sinh with natural decay).
        for t_str in ["0.75", "5", "32"] {
            let t = c.parse_decimal(t_str).unwrap();
            let i0 = bessel_i0(&c, &t).unwrap();
            let i0_int = crate::quad::gauss_legendre(&c, &c.zero(), &c.pi(), |th: &Float| {
                Ok(Float::with_val(c.bits(), &t * &th.clone().cos()).exp())
            })
            .unwrap();
            assert_digits(&i0, &(i0_int.value / c.pi()), 36);

            let k0 = bessel_k0(&c, &t).unwrap();
            let k0_int = exp_sinh(&c, &c.zero(), |u: &Float, _: &Float| {
                let e = Float::with_val(c.bits(), &t * &u.clone().cosh());
                if e.to_f64() > 4000.0 {
                    return Ok(c.zero());
                }
                Ok((-e).exp())
            })
            .unwrap();
            assert_digits(&k0, &k0_int.value, 36);
        }
    }

    #[test]
    fn bessel_branches_agree_at_threshold() {
        // At 15 digits the asymptotic threshold sits near t = 30, so t = 40
        // runs descending while a 40-digit context runs ascending: compare.
        let lo = PrecisionContext::new(15).unwrap();
        let hi = ctx();
        let t_lo = lo.real_u(40);
        let t_hi = hi.real_u(40);
        let k0_asym = bessel_k0(&lo, &t_lo).unwrap();
        let k0_series = bessel_k0(&hi, &t_hi).unwrap();
        assert_digits(&Float::with_val(hi.bits(), &k0_asym), &k0_series, 20);
        let i0_asym = bessel_i0(&lo, &t_lo).unwrap();
        let i0_series = bessel_i0(&hi, &t_hi).unwrap();
        assert_digits(&Float::with_val(hi.bits(), &i0_asym), &i0_series, 20);
    }

    #[test]
    fn bessel_k0_across_cancellation_window() {
        // Arguments where the ascending series loses ~2t/ln 10 digits to
        // cancellation sit between the small-t and asymptotic comfort zones;
        // pin them against independently computed 30-digit values.
        let c = PrecisionContext::new(25).unwrap();
        for (t_str, want) in [
            ("20", "5.74123781533652429271670206162e-10"),
            ("35", "1.33103514914294685283495547195e-16"),
            ("50", "3.41016774978949551392067551235e-23"),
        ] {
            let t = c.parse_decimal(t_str).unwrap();
            let k0 = bessel_k0(&c, &t).unwrap();
            let reference = c.parse_decimal(want).unwrap();
            let got = digits_agreed(&k0, &reference, 30);
            assert!(got >= 24, "K0({t_str}) matches only {got} digits: {k0}");
        }
    }

    #[test]
    fn incomplete_gamma_against_quadrature() {
        let c = ctx();
        for (a, x_str) in [(0i64, "1"), (-1, "1"), (-2, "2.5"), (3, "0.8"), (5, "4")] {
            let x = c.parse_decimal(x_str).unwrap();
            let g = gamma_upper(&c, a, &x).unwrap();
            let g_int = exp_sinh(&c, &x, |t: &Float, _: &Float| {
                if t.to_f64() > 4000.0 {
                    return Ok(c.zero());
                }
                let p = t.clone().pow((a - 1) as i32);
                Ok(p * (-t.clone()).exp())
            })
            .unwrap();
            assert_digits(&g, &g_int.value, 34);
        }
    }

    #[test]
    fn incomplete_gamma_recurrence_closes() {
        let c = ctx();
        // Γ(a,x) = (a−1)Γ(a−1,x) + x^{a−1}e^{−x} across the a = 1 boundary.
        let x = c.parse_decimal("1.7").unwrap();
        let lhs = gamma_upper(&c, 1, &x).unwrap();
        let rhs = c.zero() * gamma_upper(&c, 0, &x).unwrap()
            + x.clone().pow(0) * (-x.clone()).exp();
        assert_digits(&lhs, &rhs, 39);
    }
}
