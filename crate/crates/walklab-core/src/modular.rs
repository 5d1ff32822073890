//! Dedekind eta machinery: eta quotients, Eisenstein series, and the
//! level-6/12/8 parametrisations behind the walk densities.
//!
//! η(τ) = q^{1/24} Π(1−qⁿ) is summed through the pentagonal-number series
//! Σ (−1)ᵏ q^{k(3k−1)/2} after reducing τ to the fundamental domain with
//! the generators τ ↦ τ+1 (phase e^{iπ/12}) and τ ↦ −1/τ (factor
//! √(−iτ)).  On the imaginary axis a real fast path performs at most one
//! inversion.
//!
//! Derivatives of eta quotients use the logarithmic derivative
//! (log η)′ = (iπ/12)E₂, with E₂ summed directly or through its
//! quasi-modular inversion E₂(τ) = (E₂(−1/τ) + (6i/π)τ)/τ².
//!
//! Geometry of the three parametrisations, all on the imaginary axis
//! τ = iy unless said otherwise:
//!
//! * level 6 — x₃(iy) increases from 0 to 1 as y decreases from ∞ to 0;
//!   the weight-1 quotient gives the three-step density there, and the
//!   integrated weight-3 form gives the cumulative mass P₃(x₃(iy)) as a
//!   Lambert-type series.  The density argument range (1, 3) belongs to a
//!   different boundary component and is reached hypergeometrically
//!   elsewhere in the crate.
//! * level 12 — x₄(iy) increases from 0 to 2 on the lower leg
//!   y ∈ (0, 1/(2√3)]; the arc τ = e^{iπθ}/(2√3), θ ∈ [1/2, 5/6] carries
//!   x₄ from 2 to 4.  The four-step density is (12y/π)p(iy) on the leg and
//!   −Re[(2i(1+6τ+12τ²)/π)p(τ)] on the arc.
//! * level 8 — x₈(iy) decreases from 4 to 0 as y runs over (0, ∞), with
//!   companion quotients for 1 − x₈²/16 and for the complete-elliptic
//!   value F(x₈²/16).

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::precision::PrecisionContext;
use crate::{Error, Result};

// --------------------------------------------------------------------
// Eta quotient exponent tables (m, e) ≙ Π η(m τ)^e
// --------------------------------------------------------------------

/// x₃/3: the level-6 hauptmodul piece for the three-step walk.
pub const X3_ETA: &[(u32, i32)] = &[(1, 2), (6, 4), (2, -4), (3, -2)];
/// p₃·π/(2√3): the weight-1 density kernel of the three-step walk.
pub const P3_ETA: &[(u32, i32)] = &[(2, 2), (6, 2), (1, -1), (3, -1)];
/// The weight-3 cumulative-mass integrand of the three-step walk.
pub const G3_ETA: &[(u32, i32)] = &[(1, 5), (3, 1), (6, 4), (2, -4)];
/// The weight-1 square root of (1/2πi)·d(log x₃)/dτ (up to the factor ½).
pub const DX3_ETA: &[(u32, i32)] = &[(1, 2), (3, 2), (2, -1), (6, -1)];
/// x₄/8: the level-12 hauptmodul piece for the four-step walk.
pub const X4_ETA: &[(u32, i32)] = &[(1, 3), (3, 3), (4, 3), (12, 3), (2, -6), (6, -6)];
/// The weight-2 density kernel of the four-step walk.
pub const P4_ETA: &[(u32, i32)] = &[(2, 4), (6, 4), (1, -1), (3, -1), (4, -1), (12, -1)];
/// x₈/16: the level-8 hauptmodul for the squared two-step map.
pub const X8_ETA: &[(u32, i32)] = &[(1, 4), (4, 8), (2, -12)];
/// The complement 1 − x₈²/16 = (η₁²η₄/η₂³)⁸.
pub const X8_COMPLEMENT_ETA: &[(u32, i32)] = &[(1, 16), (4, 8), (2, -24)];
/// ₂F₁(½,½;1;x₈²/16) as an eta quotient.
pub const F8_ETA: &[(u32, i32)] = &[(2, 10), (1, -4), (4, -4)];
/// Weight-3 Eisenstein-type form η(3τ)⁹/η(τ)³ (leading q¹).
pub const E3_ETA: &[(u32, i32)] = &[(3, 9), (1, -3)];
/// Its companion η(τ)⁹/η(3τ)³ (constant term 1).
pub const E3_COMPANION_ETA: &[(u32, i32)] = &[(1, 9), (3, -3)];

/// The quadratic character mod 3: χ(n) = 1, −1, 0 for n ≡ 1, 2, 0.
pub fn chi3(n: u64) -> i64 {
    match n % 3 {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// Coefficients of Π_{m≥1}(1−q^m) through q^n (pentagonal-number sparse
/// expansion), used by the L-series layer to build eta-product
/// q-expansions exactly.
pub fn euler_product_coefficients(n: usize) -> Vec<i64> {
    let mut c = vec![0i64; n + 1];
    c[0] = 1;
    let mut k = 1u64;
    loop {
        let g1 = (k * (3 * k - 1) / 2) as usize;
        let g2 = (k * (3 * k + 1) / 2) as usize;
        if g1 > n {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        c[g1] += sign;
        if g2 <= n {
            c[g2] += sign;
        }
        k += 1;
    }
    c
}

// --------------------------------------------------------------------
// Dedekind eta
// --------------------------------------------------------------------

/// Pentagonal-number series at τ with Im τ large enough for the series to
/// be economical; callers reduce first.
fn eta_series_complex(ctx: &PrecisionContext, tau: &Complex) -> Result<Complex> {
    let bits = ctx.bits();
    let im = tau.imag().to_f64();
    if im < 0.28 {
        return Err(Error::Domain(format!(
            "eta series needs Im τ ≥ 0.28, got {im}"
        )));
    }
    let two_pi_i_tau = Complex::with_val(bits, (ctx.zero(), ctx.pi() * 2u32)) * tau;
    // leading factor q^{1/24} as exp(2πiτ/24), which fixes the branch
    let lead = Complex::with_val(bits, &two_pi_i_tau / ctx.real_u(24)).exp();
    let q = two_pi_i_tau.exp();
    let g_cap = ((ctx.working_digits() as f64 + 10.0) * 10f64.ln()
        / (2.0 * std::f64::consts::PI * im))
        .ceil() as u64
        + 2;
    let mut sum = Complex::with_val(bits, (1, 0));
    let mut k = 1u64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 > g_cap {
            break;
        }
        let both = q.clone().pow(g1 as u32) + q.clone().pow(g2 as u32);
        if k % 2 == 1 {
            sum -= both;
        } else {
            sum += both;
        }
        k += 1;
    }
    Ok(lead * sum)
}

/// Dedekind eta anywhere on the upper half-plane, via reduction to the
/// fundamental domain: shifts η(τ+1) = e^{iπ/12}η(τ) and inversions
/// η(−1/τ) = √(−iτ)·η(τ).
pub fn eta(ctx: &PrecisionContext, tau: &Complex) -> Result<Complex> {
    let bits = ctx.bits();
    if !(tau.imag().to_f64() > 0.0) {
        return Err(Error::Domain("eta needs Im τ > 0".into()));
    }
    let mut t = tau.clone();
    // prefactor P with η(τ) = P · η(t)
    let mut pref = Complex::with_val(bits, (1, 0));
    for _ in 0..200 {
        let n = t.real().clone().round().to_f64();
        if n != 0.0 {
            // η(t) = η((t−n) + n) = e^{iπn/12} η(t−n)
            t -= Complex::with_val(bits, (ctx.real_from_f64(n), ctx.zero()));
            let phase =
                Complex::with_val(bits, (ctx.zero(), ctx.pi() * ctx.real_from_f64(n) / 12u32))
                    .exp();
            pref *= phase;
        }
        if t.imag().to_f64() >= 0.5 || t.clone().norm().real().to_f64() >= 1.0 {
            break;
        }
        // η(t) = η(−1/t)/√(−it)
        let minus_i_t = Complex::with_val(bits, &t * &Complex::with_val(bits, (0, -1)));
        pref /= minus_i_t.sqrt();
        t = -Complex::with_val(bits, t.recip());
    }
    Ok(pref * eta_series_complex(ctx, &t)?)
}

/// Real fast path for τ = iy, y > 0.
pub fn eta_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let yf = y.to_f64();
    if !(yf > 0.0) {
        return Err(Error::Domain("eta_axis needs y > 0".into()));
    }
    if yf < 1.0 {
        // η(iy) = η(i/y)/√y
        let inv = y.clone().recip();
        return Ok(eta_axis_direct(ctx, &inv)? / y.clone().sqrt());
    }
    eta_axis_direct(ctx, y)
}

fn eta_axis_direct(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let bits = ctx.bits();
    let yf = y.to_f64();
    let minus_two_pi_y = -(ctx.pi() * 2u32 * y.clone());
    let lead = (minus_two_pi_y.clone() / 24u32).exp();
    if lead.is_zero() {
        return Err(Error::Domain(format!(
            "eta underflow at y = {yf}; clip the integrand before this point"
        )));
    }
    let q = minus_two_pi_y.exp();
    let g_cap = ((ctx.working_digits() as f64 + 10.0) * 10f64.ln()
        / (2.0 * std::f64::consts::PI * yf))
        .ceil() as u64
        + 2;
    let mut sum = ctx.one();
    let mut k = 1u64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 > g_cap {
            break;
        }
        let both = Float::with_val(bits, q.clone().pow(g1 as u32) + q.clone().pow(g2 as u32));
        if k % 2 == 1 {
            sum -= both;
        } else {
            sum += both;
        }
        k += 1;
    }
    Ok(lead * sum)
}

/// Π η(i m y)^{e} over a factor table, real arithmetic.
pub fn eta_quotient_axis(
    ctx: &PrecisionContext,
    y: &Float,
    factors: &[(u32, i32)],
) -> Result<Float> {
    let mut acc = ctx.one();
    for &(m, e) in factors {
        let arg = Float::with_val(ctx.bits(), y * m);
        let v = eta_axis(ctx, &arg)?;
        acc *= v.pow(e);
    }
    Ok(acc)
}

/// Π η(m τ)^{e} over a factor table.
pub fn eta_quotient(
    ctx: &PrecisionContext,
    tau: &Complex,
    factors: &[(u32, i32)],
) -> Result<Complex> {
    let bits = ctx.bits();
    let mut acc = Complex::with_val(bits, (1, 0));
    for &(m, e) in factors {
        let arg = Complex::with_val(bits, tau * m);
        let v = eta(ctx, &arg)?;
        acc *= v.pow(e);
    }
    Ok(acc)
}

/// Crude f64 estimate of log₁₀|Π η(imy)^e|, used by integrands to clip
/// doubly-exponentially-dead regions near y = 0 and y = ∞ before any MPFR
/// work (and before η itself underflows).
pub fn axis_log10_magnitude(factors: &[(u32, i32)], y: f64) -> f64 {
    let log10_e = std::f64::consts::LOG10_E;
    if y >= 1.0 {
        let lead: f64 = factors.iter().map(|&(m, e)| e as f64 * m as f64).sum::<f64>() / 24.0;
        -2.0 * std::f64::consts::PI * y * lead * log10_e
    } else {
        // inverted: Π (my)^{−e/2} η(i/(my))^{e}
        let lead: f64 = factors.iter().map(|&(m, e)| e as f64 / m as f64).sum::<f64>() / 24.0;
        let prefactor: f64 = factors
            .iter()
            .map(|&(m, e)| -0.5 * e as f64 * (m as f64 * y).log10())
            .sum();
        -2.0 * std::f64::consts::PI / y * lead * log10_e + prefactor
    }
}

// --------------------------------------------------------------------
// Eisenstein series
// --------------------------------------------------------------------

/// E₂(τ) = 1 − 24 Σ σ₁(n) qⁿ with the inversion
/// E₂(τ) = (E₂(−1/τ) + (6i/π)τ)/τ² when Im τ is small.
pub fn e2(ctx: &PrecisionContext, tau: &Complex) -> Result<Complex> {
    let bits = ctx.bits();
    let im = tau.imag().to_f64();
    if !(im > 0.0) {
        return Err(Error::Domain("E2 needs Im τ > 0".into()));
    }
    let abs2 = tau.clone().norm().real().to_f64();
    let im_inverted = im / abs2;
    if im >= 0.5 || im >= im_inverted {
        return e2_series(ctx, tau);
    }
    let sigma = -Complex::with_val(bits, tau.clone().recip());
    let inner = e2_series(ctx, &sigma)?;
    let correction = Complex::with_val(bits, (ctx.zero(), ctx.real_u(6) / ctx.pi())) * tau;
    let tau2 = Complex::with_val(bits, tau * tau);
    Ok((inner + correction) / tau2)
}

fn e2_series(ctx: &PrecisionContext, tau: &Complex) -> Result<Complex> {
    let bits = ctx.bits();
    let n_max = series_cutoff(ctx, tau.imag().to_f64());
    let sigma1 = sigma1_table(n_max);
    let q = (Complex::with_val(bits, (ctx.zero(), ctx.pi() * 2u32)) * tau).exp();
    let mut qn = Complex::with_val(bits, (1, 0));
    let mut sum = Complex::with_val(bits, (0, 0));
    for n in 1..=n_max {
        qn *= &q;
        sum += Complex::with_val(bits, &qn * ctx.real_u(sigma1[n]));
    }
    Ok(Complex::with_val(bits, (1, 0)) - sum * 24u32)
}

/// Real E₂(iy) with the same inversion strategy.
pub fn e2_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let bits = ctx.bits();
    let yf = y.to_f64();
    if !(yf > 0.0) {
        return Err(Error::Domain("e2_axis needs y > 0".into()));
    }
    if yf < 1.0 {
        // E₂(iy) = (6y/π − E₂(i/y))/y²
        let inner = e2_axis_direct(ctx, &y.clone().recip())?;
        let c = ctx.real_u(6) * y / ctx.pi();
        return Ok((c - inner) / Float::with_val(bits, y * y));
    }
    e2_axis_direct(ctx, y)
}

fn e2_axis_direct(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let bits = ctx.bits();
    let n_max = series_cutoff(ctx, y.to_f64());
    let sigma1 = sigma1_table(n_max);
    let q = (-(ctx.pi() * 2u32 * y.clone())).exp();
    let mut qn = ctx.one();
    let mut sum = ctx.zero();
    for n in 1..=n_max {
        qn *= &q;
        sum += Float::with_val(bits, &qn * ctx.real_u(sigma1[n]));
    }
    Ok(ctx.one() - sum * 24u32)
}

/// Number of q-powers needed at height Im τ.
fn series_cutoff(ctx: &PrecisionContext, im: f64) -> usize {
    ((ctx.working_digits() as f64 + 12.0) * 10f64.ln() / (2.0 * std::f64::consts::PI * im)).ceil()
        as usize
        + 2
}

/// σ₁(n) for n ≤ n_max by sieve.
fn sigma1_table(n_max: usize) -> Vec<u64> {
    let mut t = vec![0u64; n_max + 1];
    for d in 1..=n_max {
        let mut k = d;
        while k <= n_max {
            t[k] += d as u64;
            k += d;
        }
    }
    t
}

/// Weight-3 q-series Σ_{m,n≥1} χ₃(m) n² q^{mn} at τ = iy — the expansion
/// of η(3τ)⁹/η(τ)³, used as an identity-check target.
pub fn e3_series_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let q = (-(ctx.pi() * 2u32 * y.clone())).exp();
    let cutoff = series_cutoff(ctx, y.to_f64()) as u64;
    let mut sum = ctx.zero();
    for m in 1..=cutoff {
        let s = chi3(m);
        if s == 0 {
            continue;
        }
        let mut inner = ctx.zero();
        for n in 1..=cutoff / m {
            inner += q.clone().pow((m * n) as u32) * ctx.real_u(n * n);
        }
        if s > 0 {
            sum += inner;
        } else {
            sum -= inner;
        }
    }
    Ok(sum)
}

/// 1 − Ẽ₃(iy) = 9 Σ χ₃(n) n² q^{mn}, the deficit of the companion series
/// below 1, summed directly so no cancellation occurs when q is tiny.
pub fn e3_companion_deficit_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let q = (-(ctx.pi() * 2u32 * y.clone())).exp();
    let cutoff = series_cutoff(ctx, y.to_f64()) as u64;
    let mut sum = ctx.zero();
    for n in 1..=cutoff {
        let s = chi3(n);
        if s == 0 {
            continue;
        }
        let mut inner = ctx.zero();
        for m in 1..=cutoff / n {
            inner += q.clone().pow((m * n) as u32);
        }
        let weighted = inner * ctx.real_u(n * n);
        if s > 0 {
            sum += weighted;
        } else {
            sum -= weighted;
        }
    }
    Ok(sum * 9u32)
}

/// The companion weight-3 series 1 − 9 Σ χ₃(n) n² q^{mn} at τ = iy — the
/// expansion of η(τ)⁹/η(3τ)³ (character on the squared index).
pub fn e3_companion_series_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    Ok(ctx.one() - e3_companion_deficit_axis(ctx, y)?)
}

/// Weight-1 series 1 + 6 Σ_{m,n≥1} χ₃(m) q^{mn} at τ = iy.
pub fn e1_series_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let q = (-(ctx.pi() * 2u32 * y.clone())).exp();
    let cutoff = series_cutoff(ctx, y.to_f64()) as u64;
    let mut sum = ctx.zero();
    for m in 1..=cutoff {
        let s = chi3(m);
        if s == 0 {
            continue;
        }
        let mut inner = ctx.zero();
        for n in 1..=cutoff / m {
            inner += q.clone().pow((m * n) as u32);
        }
        if s > 0 {
            sum += inner;
        } else {
            sum -= inner;
        }
    }
    Ok(sum * 6u32 + 1u32)
}

// --------------------------------------------------------------------
// Level 6: the three-step walk on the axis leg x ∈ (0, 1)
// --------------------------------------------------------------------

/// x₃(iy) = 3 η(iy)²η(6iy)⁴ / (η(2iy)⁴η(3iy)²): increases from 0 to 1 as
/// y decreases from ∞ to 0.
pub fn x3_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    Ok(eta_quotient_axis(ctx, y, X3_ETA)? * 3u32)
}

/// The three-step density at the point x₃(iy):
/// p₃(x₃(iy)) = (2√3/π) η(2iy)²η(6iy)² / (η(iy)η(3iy)).
pub fn p3_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let pref = ctx.real_u(3).sqrt() * 2u32 / ctx.pi();
    Ok(eta_quotient_axis(ctx, y, P3_ETA)? * pref)
}

/// d x₃(iy)/dy through the logarithmic derivative of the eta quotient:
/// d log x₃/dτ = (iπ/12) Σ e_m m E₂(mτ), so on the axis
/// dx₃/dy = −(π/12) x₃(iy) Σ e_m m E₂(imy).  Negative (x₃ falls with y).
pub fn dx3_dy(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let x = x3_axis(ctx, y)?;
    let mut combo = ctx.zero();
    for &(m, e) in X3_ETA {
        let arg = Float::with_val(ctx.bits(), y * m);
        combo += e2_axis(ctx, &arg)? * ctx.real(e as i64 * m as i64);
    }
    Ok(-(ctx.pi() / 12u32) * x * combo)
}

/// Weight-3 integrand g(iy) = η(iy)⁵η(3iy)η(6iy)⁴/η(2iy)⁴ whose tail
/// integral gives the cumulative mass: P₃(x₃(iy)) = 6√3 ∫_y^∞ g.
pub fn g3_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    eta_quotient_axis(ctx, y, G3_ETA)
}

/// Cumulative mass of the three-step density along the axis leg:
///
/// ```text
/// P₃(x₃(iy)) = (3√3/π) Σ_m (χ₃(m)/m) [ qᵐ/(1−qᵐ)² − 4 q^{2m}/(1−q^{2m})² ],
/// ```
///
/// with q = e^{−2πy} — the termwise integral of the weight-3 q-expansion.
/// The series converges for every y > 0 and runs from 0 (y → ∞) up to the
/// mass P₃(1) below the singular point of the density (y → 0).
pub fn p3_cumulative_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let bits = ctx.bits();
    let yf = y.to_f64();
    if !(yf > 0.005) {
        return Err(Error::Domain(
            "cumulative-mass series wants y > 0.005; below that the value \
             is P₃(1) to hundreds of digits"
                .into(),
        ));
    }
    let tol = ctx.tolerance();
    let q = (-(ctx.pi() * 2u32 * y.clone())).exp();
    let mut sum = ctx.zero();
    let mut m = 1u64;
    loop {
        let s = chi3(m);
        if s != 0 {
            let qm = q.clone().pow(m as u32);
            let q2m = Float::with_val(bits, &qm * &qm);
            let a = qm.clone() / Float::with_val(bits, 1 - &qm).square();
            let b = q2m.clone() / Float::with_val(bits, 1 - &q2m).square();
            let term = (a - b * 4u32) / ctx.real_u(m);
            let mag = term.clone().abs();
            if s > 0 {
                sum += term;
            } else {
                sum -= term;
            }
            if mag < tol && m > 4 {
                break;
            }
        }
        m += 1;
        if m > 50_000_000 {
            return Err(Error::SeriesConvergence {
                terms: 50_000_000,
                context: "three-step cumulative-mass series".into(),
            });
        }
    }
    Ok(ctx.real_u(3).sqrt() * 3u32 / ctx.pi() * sum)
}

// --------------------------------------------------------------------
// Level 12: the four-step walk
// --------------------------------------------------------------------

/// The fixed point 1/(2√3) of τ ↦ −1/(12τ) on the imaginary axis: the top
/// of the lower leg, where x₄ reaches 2.
pub fn y_leg_top(ctx: &PrecisionContext) -> Float {
    (ctx.real_u(12)).sqrt().recip()
}

/// x₄(iy) = 8 (η₁η₃η₄η₁₂/(η₂²η₆²))³ at τ = iy: increases from 0 to 2 as y
/// runs up the lower leg (0, 1/(2√3)].
pub fn x4_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    Ok(eta_quotient_axis(ctx, y, X4_ETA)? * 8u32)
}

/// Weight-2 kernel p(iy) = η₂⁴η₆⁴/(η₁η₃η₄η₁₂) at τ = iy.
pub fn p4_kernel_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    eta_quotient_axis(ctx, y, P4_ETA)
}

/// The four-step density on (0, 2): p₄(x₄(iy)) = (12y/π)·p(iy) along the
/// lower leg.
pub fn p4_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    Ok(p4_kernel_axis(ctx, y)? * ctx.real_u(12) * y / ctx.pi())
}

/// dx₄(iy)/dy by the E₂ log-derivative; positive on the lower leg.
pub fn dx4_dy(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    let x = x4_axis(ctx, y)?;
    let mut combo = ctx.zero();
    for &(m, e) in X4_ETA {
        let arg = Float::with_val(ctx.bits(), y * m);
        combo += e2_axis(ctx, &arg)? * ctx.real(e as i64 * m as i64);
    }
    Ok(-(ctx.pi() / 12u32) * x * combo)
}

/// A point τ = e^{iπθ}/(2√3) on the arc, θ ∈ [1/2, 5/6].
pub fn arc_tau(ctx: &PrecisionContext, theta: &Float) -> Complex {
    let bits = ctx.bits();
    let angle = Float::with_val(bits, &ctx.pi() * theta);
    let (sin, cos) = angle.sin_cos(Float::new(bits));
    let r = y_leg_top(ctx);
    Complex::with_val(bits, (cos * &r, sin * &r))
}

/// Everything the arc integrals need at θ: the location x₄(τ(θ)) in
/// (2, 4), the density p₄ there, and dx/dθ.  All three are real parts of
/// complex eta data; the imaginary parts must vanish identically and are
/// checked against a near-working-precision threshold.
pub struct ArcPoint {
    pub x: Float,
    pub density: Float,
    pub dx_dtheta: Float,
}

pub fn p4_arc(ctx: &PrecisionContext, theta: &Float) -> Result<ArcPoint> {
    let bits = ctx.bits();
    let tau = arc_tau(ctx, theta);
    let x = Complex::with_val(bits, eta_quotient(ctx, &tau, X4_ETA)? * 8u32);
    let p = eta_quotient(ctx, &tau, P4_ETA)?;
    // density on the arc: −(2i/π)(1 + 6τ + 12τ²) p(τ)
    let poly = Complex::with_val(bits, 1u32)
        + Complex::with_val(bits, &tau * 6u32)
        + Complex::with_val(bits, &tau * &tau) * 12u32;
    let minus_two_i_over_pi = Complex::with_val(bits, (ctx.zero(), -(ctx.real_u(2) / ctx.pi())));
    let density = minus_two_i_over_pi * poly * &p;
    // dx/dθ = dx/dτ · dτ/dθ with dx/dτ = x·(iπ/12)Σ e_m m E₂(mτ) and
    // dτ/dθ = iπτ.
    let mut combo = Complex::with_val(bits, (0, 0));
    for &(m, e) in X4_ETA {
        let arg = Complex::with_val(bits, &tau * m);
        combo += e2(ctx, &arg)? * ctx.real(e as i64 * m as i64);
    }
    let i_pi_12 = Complex::with_val(bits, (ctx.zero(), ctx.pi() / 12u32));
    let dx_dtau = Complex::with_val(bits, &x * &i_pi_12) * combo;
    let i_pi_tau = Complex::with_val(bits, (ctx.zero(), ctx.pi())) * &tau;
    let dx_dtheta = dx_dtau * i_pi_tau;

    let guard_digits = (ctx.working_digits().saturating_sub(6)).max(4);
    for (name, v) in [("x", &x), ("density", &density), ("dx_dtheta", &dx_dtheta)] {
        let re = v.real().clone().abs();
        let im = v.imag().clone().abs();
        let scale = if re > 1 { re } else { ctx.one() };
        if im > scale * ctx.tol_digits(guard_digits) {
            return Err(Error::Domain(format!(
                "arc quantity {name} has a non-vanishing imaginary part at θ = {}",
                theta.to_f64()
            )));
        }
    }
    Ok(ArcPoint {
        x: x.real().clone(),
        density: density.real().clone(),
        dx_dtheta: dx_dtheta.real().clone(),
    })
}

// --------------------------------------------------------------------
// Level 8: the squared two-step map
// --------------------------------------------------------------------

/// x₈(iy) = 16 (η₁η₄²/η₂³)⁴: decreases from 4 to 0 as y runs over (0, ∞).
pub fn x8_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    Ok(eta_quotient_axis(ctx, y, X8_ETA)? * 16u32)
}

/// ₂F₁(½,½;1;x₈²/16) as the eta quotient η₂¹⁰/(η₁⁴η₄⁴) at τ = iy.
pub fn f8_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    eta_quotient_axis(ctx, y, F8_ETA)
}

/// 1 − x₈²/16 as the eta quotient (η₁²η₄/η₂³)⁸ at τ = iy.
pub fn x8_complement_axis(ctx: &PrecisionContext, y: &Float) -> Result<Float> {
    eta_quotient_axis(ctx, y, X8_COMPLEMENT_ETA)
}

// --------------------------------------------------------------------
// Root finding along monotone axis maps
// --------------------------------------------------------------------

/// Bisection for f(y) = target with f strictly monotone on [lo, hi], run
/// to the full working precision of the context.
pub fn invert_monotone<F>(
    ctx: &PrecisionContext,
    mut f: F,
    target: &Float,
    lo: &Float,
    hi: &Float,
) -> Result<Float>
where
    F: FnMut(&Float) -> Result<Float>,
{
    let bits = ctx.bits();
    let mut a = lo.clone();
    let mut b = hi.clone();
    let fa = f(&a)?;
    let fb = f(&b)?;
    let increasing = fb > fa;
    let below = |v: &Float| -> bool {
        if increasing {
            v < target
        } else {
            v > target
        }
    };
    if below(&fa) == below(&fb) {
        return Err(Error::RootFinding(format!(
            "target {} not bracketed by values [{}, {}]",
            target.to_f64(),
            fa.to_f64(),
            fb.to_f64()
        )));
    }
    if !below(&fa) {
        std::mem::swap(&mut a, &mut b);
    }
    // invariant: f(a) on the "below" side of the target
    for _ in 0..bits + 16 {
        let mid = Float::with_val(bits, &a + &b) / 2u32;
        if mid == a || mid == b {
            break;
        }
        if below(&f(&mid)?) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Float::with_val(bits, &a + &b) / 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::digits_agreed;
    use crate::quad::{exp_sinh, tanh_sinh};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn assert_digits(lhs: &Float, rhs: &Float, want: i64) {
        let got = digits_agreed(lhs, rhs, 300);
        assert!(got >= want, "only {got} digits agree:\n  {lhs}\n  {rhs}");
    }

    #[test]
    fn eta_matches_truncated_product() {
        let c = ctx();
        let y = c.one();
        let q = (-(c.pi() * 2u32 * y.clone())).exp();
        let mut prod = (-(c.pi() * 2u32 * y.clone()) / 24u32).exp();
        let mut qn = c.one();
        for _ in 1..=120 {
            qn *= &q;
            prod *= Float::with_val(c.bits(), 1 - &qn);
        }
        let via_series = eta_axis(&c, &y).unwrap();
        assert_digits(&via_series, &prod, 39);
    }

    #[test]
    fn eta_axis_inversion_is_consistent() {
        let c = ctx();
        // y = 0.62: the direct series and the inverted path both converge.
        let y = c.parse_decimal("0.62").unwrap();
        let direct = eta_axis_direct(&c, &y).unwrap();
        let inverted = eta_axis_direct(&c, &y.clone().recip()).unwrap() / y.clone().sqrt();
        assert_digits(&direct, &inverted, 38);
        // The complex reduction path lands on the same value.
        let tau = Complex::with_val(c.bits(), (c.zero(), y.clone()));
        let via_complex = eta(&c, &tau).unwrap();
        assert!(via_complex.imag().clone().abs() < c.tolerance());
        assert_digits(via_complex.real(), &direct, 38);
    }

    #[test]
    fn eta_reduction_handles_near_cusp_points() {
        let c = ctx();
        // τ near the cusp 1/3 takes several shift/invert steps; check the
        // one-step inversion identity η(−1/τ) = √(−iτ)·η(τ) there.
        let tau = Complex::with_val(
            c.bits(),
            (
                c.parse_decimal("0.3333").unwrap(),
                c.parse_decimal("0.008").unwrap(),
            ),
        );
        let lhs = eta(&c, &-Complex::with_val(c.bits(), tau.clone().recip())).unwrap();
        let minus_i_tau =
            Complex::with_val(c.bits(), &tau * &Complex::with_val(c.bits(), (0, -1)));
        let rhs = minus_i_tau.sqrt() * eta(&c, &tau).unwrap();
        let diff = Complex::with_val(c.bits(), &lhs - &rhs).abs().real().clone();
        let scale = lhs.abs().real().clone();
        assert!(diff < scale * c.tol_digits(34), "reduction mismatch: {diff}");
    }

    #[test]
    fn eta_shift_phase() {
        let c = ctx();
        // η(τ+1) = e^{iπ/12} η(τ) with τ in the bulk.
        let tau = Complex::with_val(c.bits(), (c.parse_decimal("0.21").unwrap(), c.one()));
        let one = Complex::with_val(c.bits(), (1, 0));
        let shifted = eta(&c, &Complex::with_val(c.bits(), &tau + &one)).unwrap();
        let phase = Complex::with_val(c.bits(), (c.zero(), c.pi() / 12u32)).exp();
        let expect = phase * eta(&c, &tau).unwrap();
        let diff = Complex::with_val(c.bits(), &shifted - &expect)
            .abs()
            .real()
            .clone();
        assert!(diff < c.tol_digits(37));
    }

    #[test]
    fn e2_inversion_and_log_derivative() {
        let c = PrecisionContext::new(50).unwrap();
        let y = c.parse_decimal("0.85").unwrap();
        let direct = e2_axis_direct(&c, &y).unwrap();
        let via_inv = {
            let inner = e2_axis_direct(&c, &y.clone().recip()).unwrap();
            (c.real_u(6) * &y / c.pi() - inner) / Float::with_val(c.bits(), &y * &y)
        };
        assert_digits(&direct, &via_inv, 47);

        // (log η(iy))′ = −(π/12) E₂(iy), probed by Richardson-extrapolated
        // central differences of log η.
        let y0 = c.parse_decimal("1.3").unwrap();
        let h1 = c.tol_digits(8);
        let d = |h: &Float| -> Float {
            let hi = eta_axis(&c, &Float::with_val(c.bits(), &y0 + h))
                .unwrap()
                .ln();
            let lo = eta_axis(&c, &Float::with_val(c.bits(), &y0 - h))
                .unwrap()
                .ln();
            (hi - lo) / (h.clone() * 2u32)
        };
        let d1 = d(&h1);
        let d2 = d(&(h1.clone() / 2u32));
        let extrap = (d2 * 4u32 - d1) / 3u32;
        let exact = -(c.pi() / 12u32) * e2_axis(&c, &y0).unwrap();
        assert_digits(&extrap, &exact, 25);
    }

    #[test]
    fn weight3_eta_identities_against_q_series() {
        let c = ctx();
        for y_str in ["0.9", "1.4"] {
            let y = c.parse_decimal(y_str).unwrap();
            let quotient = eta_quotient_axis(&c, &y, E3_ETA).unwrap();
            let series = e3_series_axis(&c, &y).unwrap();
            assert_digits(&quotient, &series, 36);
            let companion = eta_quotient_axis(&c, &y, E3_COMPANION_ETA).unwrap();
            let companion_series = e3_companion_series_axis(&c, &y).unwrap();
            assert_digits(&companion, &companion_series, 36);
        }
    }

    #[test]
    fn x3_runs_from_zero_to_one() {
        let c = ctx();
        let near_cusp = x3_axis(&c, &c.parse_decimal("0.02").unwrap()).unwrap();
        assert!(near_cusp < 1);
        assert!(Float::with_val(c.bits(), 1 - &near_cusp).abs() < 1e-20);
        let far = x3_axis(&c, &c.parse_decimal("2.5").unwrap()).unwrap();
        assert!(far < 0.01);
        let mut prev = c.real_u(2);
        for ys in ["0.1", "0.2", "0.4", "0.8", "1.6"] {
            let x = x3_axis(&c, &c.parse_decimal(ys).unwrap()).unwrap();
            assert!(x < prev);
            prev = x;
        }
    }

    #[test]
    fn p3_cumulative_matches_weight3_quadrature() {
        let c = ctx();
        // P₃(x₃(iy)) = 6√3 ∫_y^∞ g — Lambert series against exp-sinh.
        let y1 = c.parse_decimal("0.6").unwrap();
        let mass = p3_cumulative_axis(&c, &y1).unwrap();
        let quad_mass = exp_sinh(&c, &y1, |yy: &Float, _: &Float| {
            if yy.to_f64() > 300.0 {
                return Ok(c.zero());
            }
            g3_axis(&c, yy)
        })
        .unwrap();
        let scaled = quad_mass.value * c.real_u(6) * c.real_u(3).sqrt();
        assert_digits(&mass, &scaled, 36);
    }

    #[test]
    fn p3_cumulative_matches_density_route() {
        let c = PrecisionContext::new(30).unwrap();
        // ∫_y^∞ p₃(x₃(iy')) (−dx₃/dy') dy' accumulates the same mass
        // through the weight-1 density and the E₂ Jacobian.
        let y0 = c.parse_decimal("0.5").unwrap();
        let direct = p3_cumulative_axis(&c, &y0).unwrap();
        let via_density = exp_sinh(&c, &y0, |y: &Float, _: &Float| {
            if y.to_f64() > 200.0 {
                return Ok(c.zero());
            }
            Ok(-(p3_axis(&c, y)? * dx3_dy(&c, y)?))
        })
        .unwrap();
        assert_digits(&direct, &via_density.value, 25);
    }

    #[test]
    fn p3_cumulative_small_q_leading_term() {
        let c = ctx();
        let y = c.real_u(3);
        let mass = p3_cumulative_axis(&c, &y).unwrap();
        let q = (-(c.pi() * 2u32 * y.clone())).exp();
        let lead = c.real_u(3).sqrt() * 3u32 / c.pi() * &q;
        let rel = Float::with_val(c.bits(), &mass - &lead).abs() / lead;
        assert!(rel < 1e-7, "leading Lambert term off: rel = {rel}");
    }

    #[test]
    fn dx3_matches_weight1_square_identity() {
        let c = ctx();
        // (1/2πi)·(dx₃/dτ)/x₃ = ½ (η₁²η₃²/(η₂η₆))², i.e. on the axis
        // −(dx₃/dy)/(2πx₃) equals half the squared weight-1 quotient.
        for ys in ["0.35", "0.8"] {
            let y = c.parse_decimal(ys).unwrap();
            let lhs = -(dx3_dy(&c, &y).unwrap()) / (c.pi() * 2u32 * x3_axis(&c, &y).unwrap());
            let w1 = eta_quotient_axis(&c, &y, DX3_ETA).unwrap();
            let rhs = w1.square() / 2u32;
            assert_digits(&lhs, &rhs, 36);
        }
    }

    #[test]
    fn x4_hits_two_at_the_leg_top_and_one_at_the_special_point() {
        let c = ctx();
        let top = y_leg_top(&c);
        let x_top = x4_axis(&c, &top).unwrap();
        assert_digits(&x_top, &c.real_u(2), 38);
        let special = (c.real_u(60)).sqrt().recip(); // 1/(2√15)
        let x_special = x4_axis(&c, &special).unwrap();
        assert_digits(&x_special, &c.one(), 38);
    }

    #[test]
    fn arc_meets_axis_at_two() {
        let c = ctx();
        let theta = c.fraction(1, 2);
        let arc = p4_arc(&c, &theta).unwrap();
        assert_digits(&arc.x, &c.real_u(2), 30);
        // The density is continuous across the corner.
        let axis_density = p4_axis(&c, &y_leg_top(&c)).unwrap();
        assert_digits(&arc.density, &axis_density, 30);
    }

    #[test]
    fn arc_covers_two_to_four() {
        let c = ctx();
        let nearly_end = c.parse_decimal("0.833").unwrap();
        let arc = p4_arc(&c, &nearly_end).unwrap();
        assert!(arc.x > 3.99 && arc.x < 4.0);
        let mut prev = c.real_u(1);
        for th in ["0.55", "0.6", "0.7", "0.8"] {
            let a = p4_arc(&c, &c.parse_decimal(th).unwrap()).unwrap();
            assert!(a.x > prev);
            prev = a.x;
        }
    }

    #[test]
    fn p4_normalises_across_both_legs() {
        let c = PrecisionContext::new(25).unwrap();
        let top = y_leg_top(&c);
        let inner = tanh_sinh(&c, &c.zero(), &top, |y: &Float, _: &Float, _: &Float| {
            if axis_log10_magnitude(P4_ETA, y.to_f64()) < -(c.working_digits() as f64 + 30.0) {
                return Ok(c.zero());
            }
            Ok(p4_axis(&c, y)? * dx4_dy(&c, y)?)
        })
        .unwrap();
        let outer = tanh_sinh(
            &c,
            &c.fraction(1, 2),
            &c.fraction(5, 6),
            |th: &Float, _: &Float, _: &Float| {
                let a = p4_arc(&c, th)?;
                Ok(a.density * a.dx_dtheta)
            },
        )
        .unwrap();
        let total = inner.value + outer.value;
        assert_digits(&total, &c.one(), 20);
    }

    #[test]
    fn level8_map_complement_and_agm() {
        let c = ctx();
        // x₈ spans (0, 4): near 4 at the cusp, tiny far up the axis.
        let near_cusp = x8_axis(&c, &c.parse_decimal("0.05").unwrap()).unwrap();
        assert!(Float::with_val(c.bits(), 4 - &near_cusp).abs() < 1e-10);
        let y = c.parse_decimal("0.8774376613482").unwrap();
        let x = x8_axis(&c, &y).unwrap();
        // the documented root of x₈ = 1, accurate to the seed's digits
        assert!(Float::with_val(c.bits(), &x - 1u32).abs() < 1e-12);
        // complement identity 1 − (x/4)² as an eta quotient
        let comp = x8_complement_axis(&c, &y).unwrap();
        let direct = c.one() - Float::with_val(c.bits(), &x * &x) / 16u32;
        assert_digits(&comp, &direct, 36);
        // F(x²/16) quotient against the AGM evaluation
        let f_eta = f8_axis(&c, &y).unwrap();
        let m = Float::with_val(c.bits(), &x * &x) / 16u32;
        let f_agm = crate::special::gauss_2f1_half(&c, &m).unwrap();
        assert_digits(&f_eta, &f_agm, 37);
    }

    #[test]
    fn monotone_inversion_recovers_axis_points() {
        let c = ctx();
        let y_true = c.parse_decimal("0.21").unwrap();
        let target = x3_axis(&c, &y_true).unwrap();
        let y_found = invert_monotone(
            &c,
            |y: &Float| x3_axis(&c, y),
            &target,
            &c.parse_decimal("0.01").unwrap(),
            &c.real_u(5),
        )
        .unwrap();
        assert_digits(&y_found, &y_true, 38);
    }

    #[test]
    fn euler_product_coefficients_match_pentagonal_pattern() {
        let c = euler_product_coefficients(15);
        assert_eq!(c, vec![1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1, 0, 0, -1]);
    }
}
