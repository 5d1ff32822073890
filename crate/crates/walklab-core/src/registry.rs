//! The named check registry and its execution engine.
//!
//! Every identity the crate knows how to evaluate — proven closed forms,
//! conjectural L-value attributions, modular-parametrisation facts, and
//! statistical Monte-Carlo comparisons — is registered here as a
//! [`CheckDefinition`]: a stable id, a human-readable statement, a proof
//! status, and a runner that produces the two sides of the identity at a
//! requested working precision.  Running a check yields a [`CheckResult`]
//! carrying both values as decimal strings together with their digit
//! agreement, so that any number printed by the harness can be re-verified
//! by an external tool.
//!
//! Pass criteria are uniform: a proven identity must agree to within ten
//! digits of the working precision (both sides are computed from scratch, so
//! near-full agreement is expected), a conjectural one must agree to at
//! least eight digits (it is being *confirmed*, not proved), and statistical
//! checks replace the digit rule with an explicit σ-criterion.  Checks whose
//! reference value is only known to a fixed number of printed digits cap
//! their requirement at that length.
//!
//! Checks are independent: each owns a fresh context at its own precision,
//! Monte-Carlo seeds are derived from the global seed and the check id, and
//! a failure (error or panic) is recorded in the result list without
//! aborting the batch.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::lfunc::{lprime, LprimeTarget};
use crate::modular::{
    axis_log10_magnitude, dx3_dy, dx4_dy, e1_series_axis, e3_companion_series_axis,
    e3_series_axis, eta_quotient_axis, f8_axis, g3_axis, p3_axis, p3_cumulative_axis, p4_arc,
    p4_axis, p4_kernel_axis, x3_axis, x4_axis, x8_axis, x8_complement_axis, y_leg_top, DX3_ETA,
    E3_COMPANION_ETA, E3_ETA, P4_ETA,
};
use crate::precision::{digits_agreed, to_decimal_string, PrecisionContext};
use crate::quad::{exp_sinh, tanh_sinh};
use crate::series::{
    first_mismatch, moment_gf_pair, theorem_forms, variant_even_moment, w2_even_moment,
    w3_even_moment, w4_even_moment,
};
use crate::special::{gauss_2f1_half, gauss_2f1_half_cm};
use crate::walks::{
    bessel_moment_pair, catalan_3f2_pair, circle_log_mean, cumulative_p3,
    cumulative_p3_eisenstein, density, eisenstein_deficit_integral, elliptic_log_integral,
    elliptic_log_sq_integral, half_elliptic_pair, histogram_bin_masses, histogram_max_z,
    mahler_linear, mahler_six_by_parts, mahler_squared, mahler_variant, mc_walk,
    mellin_even_moment, modular_log_integral, moment_gf_numeric_pair, p3_cumulative_product_form,
    phat_log_moment, phat_moment_gamma, phat_power_moment, two_step_kernel_pair,
    unit_4f3_combination, LinearMethod, McWalk, SquaredMethod, VariantMethod, WalkId,
};
use crate::Result;

// ---------------------------------------------------------------------------
// Definitions
// ---------------------------------------------------------------------------

/// Proof status of the identity behind a check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckStatus {
    /// The identity is a theorem; both sides must agree to near-full
    /// working precision.
    Proven,
    /// The identity is conjectural; the check confirms it numerically.
    Conjectural,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Proven => "proven",
            CheckStatus::Conjectural => "conjectural",
        }
    }
}

/// Rough runtime band at default precision on commodity hardware.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CostClass {
    /// Below a second.
    Fast,
    /// Below a minute.
    Medium,
    /// Below half an hour (the heavy modular path integrals).
    Slow,
}

impl CostClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CostClass::Fast => "fast",
            CostClass::Medium => "medium",
            CostClass::Slow => "slow",
        }
    }
}

/// How the pass threshold (in agreed digits) derives from the run precision.
#[derive(Clone, Copy, Debug)]
enum DigitRule {
    /// max(8, digits − 10): both sides are computed ab initio.
    Proven,
    /// Like `Proven`, but capped: the reference value is only printed to a
    /// fixed number of digits, so agreement beyond the cap is meaningless.
    ProvenCapped(u32),
    /// Eight digits: enough to confirm a conjecture beyond plausible
    /// coincidence without demanding the unprovable.
    Conjectural,
    /// The runner decides pass/fail itself (σ-criteria); the digit count is
    /// reported for information only.
    Statistical,
}

/// Two evaluated sides of an identity, plus an optional explicit verdict
/// used by checks whose pass criterion is not a digit count.
struct CheckOutcome {
    lhs: Float,
    rhs: Float,
    pass_override: Option<bool>,
}

type Runner = fn(&PrecisionContext, u64) -> Result<CheckOutcome>;

/// A registered identity check.
#[derive(Clone)]
pub struct CheckDefinition {
    pub id: &'static str,
    pub description: &'static str,
    pub status: CheckStatus,
    pub cost: CostClass,
    rule: DigitRule,
    default_digits: u32,
    runner: Runner,
}

impl CheckDefinition {
    /// Precision (in decimal digits) this check runs at when the caller does
    /// not override it.
    pub fn default_digits(&self) -> u32 {
        self.default_digits
    }

    /// The digit-agreement threshold the check must meet at `digits` working
    /// precision to pass.
    pub fn min_digits_expected(&self, digits: u32) -> i64 {
        let proven = (digits as i64 - 10).max(8);
        match self.rule {
            DigitRule::Proven => proven,
            DigitRule::ProvenCapped(cap) => proven.min(cap as i64),
            DigitRule::Conjectural => 8,
            DigitRule::Statistical => 0,
        }
    }
}

/// Outcome of one executed check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: String,
    pub status: CheckStatus,
    pub lhs_value: String,
    pub rhs_value: String,
    pub digits_agreed: i64,
    pub min_digits_expected: i64,
    pub elapsed_seconds: f64,
    pub precision_used: u32,
    pub pass: bool,
}

// ---------------------------------------------------------------------------
// Small helpers shared by runners
// ---------------------------------------------------------------------------

fn rat(p: i64, q: i64) -> Rational {
    Rational::from((p, q))
}

fn pair(lhs: Float, rhs: Float) -> CheckOutcome {
    CheckOutcome {
        lhs,
        rhs,
        pass_override: None,
    }
}

/// Reduce a multi-point check to its worst pair, so the reported digit
/// agreement is a lower bound over every comparison made.
fn worst(ctx: &PrecisionContext, pairs: Vec<(Float, Float)>) -> CheckOutcome {
    let cap = ctx.digits() as i64 + 10;
    let mut picked: Option<(i64, Float, Float)> = None;
    for (l, r) in pairs {
        let d = digits_agreed(&l, &r, cap);
        if picked.as_ref().map_or(true, |(pd, _, _)| d < *pd) {
            picked = Some((d, l, r));
        }
    }
    let (_, lhs, rhs) = picked.expect("worst() needs at least one pair");
    pair(lhs, rhs)
}

/// FNV-1a, used to derive a per-check seed from the global one so that
/// concurrent checks never share a random stream.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Match `text` against a glob `pattern` supporting `*` (any run) and `?`
/// (any single byte).  Check ids are ASCII, so byte semantics suffice.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p = pattern.as_bytes();
    let t = text.as_bytes();
    let (mut pi, mut ti) = (0usize, 0usize);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && (p[pi] == b'?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == b'*' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == b'*' {
        pi += 1;
    }
    pi == p.len()
}

// ---------------------------------------------------------------------------
// Runners: exact generating-function identities
// ---------------------------------------------------------------------------

/// Compare formal series coefficient-by-coefficient; the outcome counts
/// verified coefficients against the requested order.
fn formal_outcome(ctx: &PrecisionContext, verified: usize, order: usize) -> CheckOutcome {
    CheckOutcome {
        lhs: ctx.real(verified as i64),
        rhs: ctx.real(order as i64),
        pass_override: Some(verified == order),
    }
}

fn rn_thm1_formal_b4(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    const ORDER: usize = 31; // coefficients of t^0 .. t^30
    let mut verified = ORDER;
    let forms = theorem_forms(&rat(4, 1), ORDER)?;
    for other in [&forms[1], &forms[2]] {
        if let Some(k) = first_mismatch(&forms[0], other) {
            verified = verified.min(k);
        }
    }
    let (lhs, rhs) = moment_gf_pair(ORDER)?;
    if let Some(k) = first_mismatch(&lhs, &rhs) {
        verified = verified.min(k);
    }
    Ok(formal_outcome(ctx, verified, ORDER))
}

fn rn_thm1_formal_b_rationals(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    const ORDER: usize = 31;
    let mut verified = ORDER;
    for b in [rat(1, 1), rat(1, 2), rat(3, 1)] {
        let forms = theorem_forms(&b, ORDER)?;
        for other in [&forms[1], &forms[2]] {
            if let Some(k) = first_mismatch(&forms[0], other) {
                verified = verified.min(k);
            }
        }
    }
    Ok(formal_outcome(ctx, verified, ORDER))
}

fn rn_thm1_numeric(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let (lhs, rhs) = moment_gf_numeric_pair(ctx)?;
    Ok(pair(lhs, rhs))
}

// ---------------------------------------------------------------------------
// Runners: Mahler measures of the linear walk polynomials
// ---------------------------------------------------------------------------

fn rn_w2_prime_zero(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let bits = ctx.bits();
    let res = tanh_sinh(ctx, &ctx.zero(), &ctx.real(2), |x: &Float, _: &Float, fb: &Float| {
        let xp2 = Float::with_val(bits, x + 2u32);
        let root = Float::with_val(bits, fb * &xp2).sqrt();
        Ok(ctx.real(2) / (root * ctx.pi()) * x.clone().ln())
    })?;
    Ok(pair(res.value, ctx.zero()))
}

fn rn_w3_prime_closed(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_linear(ctx, 3, LinearMethod::Red1)?;
    let rhs = lprime(ctx, LprimeTarget::Chi3AtMinusOne)?;
    Ok(pair(lhs, rhs))
}

fn rn_w4_prime_closed(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_linear(ctx, 4, LinearMethod::Red1)?;
    let rhs = ctx.zeta3() * 7u32 / (ctx.pi().pow(2u32) * 2u32);
    Ok(pair(lhs, rhs))
}

fn rn_w5_conjecture(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_linear(ctx, 5, LinearMethod::Modular)?;
    let rhs = -lprime(ctx, LprimeTarget::F3AtMinusOne)?;
    Ok(pair(lhs, rhs))
}

fn rn_w6_conjecture_modular(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_linear(ctx, 6, LinearMethod::Modular)?;
    let rhs = lprime(ctx, LprimeTarget::F4AtMinusOne)? * (-8i32);
    Ok(pair(lhs, rhs))
}

fn rn_w6_via_p3(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let rhs = lprime(ctx, LprimeTarget::F4AtMinusOne)? * (-8i32);
    let split = mahler_linear(ctx, 6, LinearMethod::SplitThree)?;
    let by_parts = mahler_six_by_parts(ctx)?;
    Ok(worst(
        ctx,
        vec![(split, rhs.clone()), (by_parts, rhs)],
    ))
}

fn rn_w6_cross_route(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_linear(ctx, 6, LinearMethod::SplitThree)?;
    let rhs = mahler_linear(ctx, 6, LinearMethod::Modular)?;
    Ok(pair(lhs, rhs))
}

// ---------------------------------------------------------------------------
// Runners: Bessel moments and Mellin moments
// ---------------------------------------------------------------------------

fn bessel_outcome(ctx: &PrecisionContext, n_steps: u32, n: u32) -> Result<CheckOutcome> {
    let (lhs, rhs) = bessel_moment_pair(ctx, n_steps, n)?;
    Ok(pair(lhs, rhs))
}

fn rn_bessel_w3_1(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 3, 1)
}
fn rn_bessel_w3_2(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 3, 2)
}
fn rn_bessel_w3_3(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 3, 3)
}
fn rn_bessel_w3_4(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 3, 4)
}
fn rn_bessel_w3_5(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 3, 5)
}
fn rn_bessel_w4_1(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 4, 1)
}
fn rn_bessel_w4_2(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 4, 2)
}
fn rn_bessel_w4_3(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 4, 3)
}
fn rn_bessel_w4_4(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 4, 4)
}
fn rn_bessel_w4_5(ctx: &PrecisionContext, _s: u64) -> Result<CheckOutcome> {
    bessel_outcome(ctx, 4, 5)
}

fn rn_mellin_moments(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for n in 0u32..=4 {
        pairs.push((
            mellin_even_moment(ctx, WalkId::P2, n)?,
            ctx.real_from_integer(&w2_even_moment(n)),
        ));
        pairs.push((
            mellin_even_moment(ctx, WalkId::P3, n)?,
            ctx.real_from_integer(&w3_even_moment(n)),
        ));
        pairs.push((
            mellin_even_moment(ctx, WalkId::P4, n)?,
            ctx.real_from_integer(&w4_even_moment(n)),
        ));
    }
    Ok(worst(ctx, pairs))
}

// ---------------------------------------------------------------------------
// Runners: kernels, log-max means, variant and squared-walk measures
// ---------------------------------------------------------------------------

fn rn_red2_kernel(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for x in [rat(1, 1), rat(1, 2), rat(3, 2)] {
        pairs.push(two_step_kernel_pair(ctx, &x)?);
    }
    Ok(worst(ctx, pairs))
}

fn rn_gs_logmax(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let pts = [
        (ctx.one(), ctx.one()),
        (ctx.real(2), ctx.one()),
        (ctx.fraction(1, 3), ctx.real(5)),
        (ctx.fraction(5, 4), ctx.fraction(5, 4)),
    ];
    let mut pairs = Vec::new();
    for (x, y) in pts {
        let (mean, expected) = circle_log_mean(ctx, &x, &y)?;
        pairs.push((mean, expected));
    }
    Ok(worst(ctx, pairs))
}

fn rn_thm2_boyd(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_variant(ctx, &rat(1, 1), VariantMethod::LogKernel)?;
    let rhs = lprime(ctx, LprimeTarget::F2AtMinusOne)? * (-2i32);
    Ok(pair(lhs, rhs))
}

fn rn_variant_b_wan_agree(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for b in [rat(1, 2), rat(1, 1), rat(2, 1), rat(3, 1)] {
        pairs.push((
            mahler_variant(ctx, &b, VariantMethod::LogKernel)?,
            mahler_variant(ctx, &b, VariantMethod::Arccos)?,
        ));
    }
    Ok(worst(ctx, pairs))
}

fn rn_variant_b_jensen(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    // For b = 5 the kink max(log b, log x) sits above the support, so the
    // measure collapses to log b times the total density mass.
    let bits = ctx.bits();
    let ln5 = ctx.real(5).ln();
    let res = tanh_sinh(ctx, &ctx.zero(), &ctx.real(4), |x: &Float, _: &Float, _: &Float| {
        let z = Float::with_val(bits, x * x) / 16u32;
        Ok(gauss_2f1_half_cm(ctx, &z)? * &ln5)
    })?;
    let lhs = res.value / (ctx.pi() * 2u32);
    let rhs = mahler_variant(ctx, &rat(5, 1), VariantMethod::Jensen)?;
    Ok(pair(lhs, rhs))
}

fn rn_phat_gamma(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for s in [1u32, 3] {
        pairs.push((phat_power_moment(ctx, s)?, phat_moment_gamma(ctx, s)?));
    }
    pairs.push((phat_log_moment(ctx)?, ctx.zero()));
    Ok(worst(ctx, pairs))
}

fn rn_thm3_routes(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_squared(ctx, SquaredMethod::Integral)?;
    let rhs = mahler_squared(ctx, SquaredMethod::Closed5F4)?;
    Ok(pair(lhs, rhs))
}

fn rn_thm3_lvalue(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = mahler_squared(ctx, SquaredMethod::Closed5F4)?;
    let rhs = -lprime(ctx, LprimeTarget::F2TildeAtMinusOne)?;
    Ok(pair(lhs, rhs))
}

fn rn_entry30(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let (lhs, rhs) = catalan_3f2_pair(ctx)?;
    Ok(pair(lhs, rhs))
}

// ---------------------------------------------------------------------------
// Runners: the L-value ladder and its relatives
// ---------------------------------------------------------------------------

fn rn_l15_0(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let (quad_form, series_form) = half_elliptic_pair(ctx)?;
    let lvalue = lprime(ctx, LprimeTarget::F2AtZero)? * 2u32;
    Ok(worst(
        ctx,
        vec![(quad_form.clone(), series_form), (quad_form, lvalue)],
    ))
}

fn rn_l15_1(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = elliptic_log_integral(ctx)? / (ctx.pi() * 2u32);
    let rhs = lprime(ctx, LprimeTarget::F2AtMinusOne)? * 2u32;
    Ok(pair(lhs, rhs))
}

fn rn_l15_2(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = elliptic_log_sq_integral(ctx)? * 6u32 / ctx.pi().pow(2u32);
    let rhs = lprime(ctx, LprimeTarget::F2AtMinusTwo)? * 2u32;
    Ok(pair(lhs, rhs))
}

fn rn_zu13_4f3(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = unit_4f3_combination(ctx)?;
    let rhs = -lprime(ctx, LprimeTarget::F2HatAtMinusOne)?;
    Ok(pair(lhs, rhs))
}

fn rn_bz02_eta_integral(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = eisenstein_deficit_integral(ctx)?;
    let rhs = lprime(ctx, LprimeTarget::Chi3AtMinusOne)?;
    Ok(pair(lhs, rhs))
}

// ---------------------------------------------------------------------------
// Runners: modular parametrisation of the three-step density
// ---------------------------------------------------------------------------

fn rn_p3_modular_consistency(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for y_str in ["0.15", "0.4", "0.7"] {
        let y = ctx.parse_decimal(y_str)?;
        let x = x3_axis(ctx, &y)?;
        pairs.push((p3_axis(ctx, &y)?, density(ctx, WalkId::P3, &x)?));
    }
    Ok(worst(ctx, pairs))
}

fn rn_p3_eisenstein(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let lhs = cumulative_p3(ctx, &ctx.one())?;
    let rhs = cumulative_p3_eisenstein(ctx)?;
    Ok(pair(lhs, rhs))
}

/// Eta quotient equal to dx₃/dy up to the factor −3π.
const DX3_WEIGHT3_ETA: &[(u32, i32)] = &[(1, 6), (3, 2), (6, 2), (2, -6)];

fn rn_p3_dx_identity(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for y_str in ["0.3", "0.55"] {
        let y = ctx.parse_decimal(y_str)?;
        let lhs = dx3_dy(ctx, &y)?;
        let rhs = eta_quotient_axis(ctx, &y, DX3_WEIGHT3_ETA)? * ctx.pi() * (-3i32);
        pairs.push((lhs, rhs));
    }
    Ok(worst(ctx, pairs))
}

fn rn_p3_product_formula(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for y_str in ["0.3", "0.6"] {
        let y = ctx.parse_decimal(y_str)?;
        pairs.push((
            p3_cumulative_product_form(ctx, &y)?,
            p3_cumulative_axis(ctx, &y)?,
        ));
    }
    Ok(worst(ctx, pairs))
}

// ---------------------------------------------------------------------------
// Runners: modular parametrisation of the four-step density
// ---------------------------------------------------------------------------

fn rn_p4_modular_consistency(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    let y = ctx.fraction(1, 5);
    let x = x4_axis(ctx, &y)?;
    pairs.push((p4_axis(ctx, &y)?, density(ctx, WalkId::P4, &x)?));
    let theta = ctx.fraction(7, 10);
    let arc = p4_arc(ctx, &theta)?;
    pairs.push((arc.density, density(ctx, WalkId::P4, &arc.x)?));
    Ok(worst(ctx, pairs))
}

fn rn_p4_fixed_point(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let y_unit = (ctx.sqrt_u(15) * 2u32).recip();
    let top = y_leg_top(ctx);
    Ok(worst(
        ctx,
        vec![
            (x4_axis(ctx, &y_unit)?, ctx.one()),
            (x4_axis(ctx, &top)?, ctx.real(2)),
        ],
    ))
}

fn rn_atkin_lehner(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let bits = ctx.bits();
    let mut pairs = Vec::new();
    for y_str in ["0.2", "0.35"] {
        let y = ctx.parse_decimal(y_str)?;
        let inv = Float::with_val(bits, &y * 12u32).recip();
        let lhs = p4_kernel_axis(ctx, &inv)?;
        let rhs = p4_kernel_axis(ctx, &y)? * Float::with_val(bits, &y * &y) * 12u32;
        pairs.push((lhs, rhs));
    }
    Ok(worst(ctx, pairs))
}

fn rn_reflection_integral(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let top = y_leg_top(ctx);
    let lhs = modular_log_integral(ctx, &top)?;
    let guard = ctx.working_digits() as f64 + 30.0;
    let tail = exp_sinh(ctx, &top, |y, _| {
        if axis_log10_magnitude(P4_ETA, y.to_f64()) < -guard {
            return Ok(ctx.zero());
        }
        let x = x4_axis(ctx, y)?;
        Ok(p4_axis(ctx, y)? * x.ln() * dx4_dy(ctx, y)?)
    })?;
    Ok(pair(lhs, -tail.value))
}

// ---------------------------------------------------------------------------
// Runners: level-8 parametrisation
// ---------------------------------------------------------------------------

fn rn_level8_identities(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let bits = ctx.bits();
    let mut pairs = Vec::new();
    for y_str in ["0.5", "0.9"] {
        let y = ctx.parse_decimal(y_str)?;
        let x = x8_axis(ctx, &y)?;
        let m = Float::with_val(bits, &x * &x) / 16u32;
        pairs.push((
            ctx.one() - m.clone(),
            x8_complement_axis(ctx, &y)?,
        ));
        let f = f8_axis(ctx, &y)?;
        pairs.push((gauss_2f1_half(ctx, &m)?, f.clone()));
        pairs.push((gauss_2f1_half_cm(ctx, &m)?, f * 2u32 * &y));
    }
    Ok(worst(ctx, pairs))
}

fn rn_tau0_locate(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let y0 = crate::modular::invert_monotone(
        ctx,
        |y| x8_axis(ctx, y),
        &ctx.one(),
        &ctx.fraction(1, 2),
        &ctx.real(2),
    )?;
    let printed = ctx.parse_decimal("0.8774376613482")?;
    Ok(pair(y0, printed))
}

// ---------------------------------------------------------------------------
// Runners: Eisenstein series identities
// ---------------------------------------------------------------------------

fn rn_eisenstein_eta_identities(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let mut pairs = Vec::new();
    for y_str in ["0.35", "0.6"] {
        let y = ctx.parse_decimal(y_str)?;
        pairs.push((eta_quotient_axis(ctx, &y, E3_ETA)?, e3_series_axis(ctx, &y)?));
        pairs.push((
            eta_quotient_axis(ctx, &y, E3_COMPANION_ETA)?,
            e3_companion_series_axis(ctx, &y)?,
        ));
        let twice = Float::with_val(ctx.bits(), &y * 2u32);
        pairs.push((
            g3_axis(ctx, &y)?,
            e3_series_axis(ctx, &y)? - e3_series_axis(ctx, &twice)? * 8u32,
        ));
    }
    Ok(worst(ctx, pairs))
}

fn rn_eisenstein_transform(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let bits = ctx.bits();
    let mut pairs = Vec::new();
    for y_str in ["0.4", "0.8"] {
        let y = ctx.parse_decimal(y_str)?;
        let reflected = Float::with_val(bits, &y * 3u32).recip();
        let lhs = eta_quotient_axis(ctx, &reflected, E3_ETA)?;
        let rhs = e3_companion_series_axis(ctx, &y)? * y.clone().pow(3u32)
            / (ctx.sqrt_u(3) * 3u32);
        pairs.push((lhs, rhs));
    }
    Ok(worst(ctx, pairs))
}

fn rn_logderiv_e1(ctx: &PrecisionContext, _seed: u64) -> Result<CheckOutcome> {
    let bits = ctx.bits();
    let mut pairs = Vec::new();
    for y_str in ["0.37", "0.62"] {
        let y = ctx.parse_decimal(y_str)?;
        let reference = -dx3_dy(ctx, &y)? / (ctx.pi() * 2u32 * x3_axis(ctx, &y)?);
        let quotient_form = eta_quotient_axis(ctx, &y, DX3_ETA)?.pow(2u32) / 2u32;
        let four_y = Float::with_val(bits, &y * 4u32);
        let series_form = (e1_series_axis(ctx, &y)? - e1_series_axis(ctx, &four_y)? * 4u32)
            .pow(2u32)
            / 18u32;
        let y12 = Float::with_val(bits, &y * 12u32).recip();
        let y3 = Float::with_val(bits, &y * 3u32).recip();
        let inverted_form = (e1_series_axis(ctx, &y12)? - e1_series_axis(ctx, &y3)?).pow(2u32)
            / (Float::with_val(bits, &y * &y) * 54u32);
        pairs.push((reference.clone(), quotient_form));
        pairs.push((reference.clone(), series_form));
        pairs.push((reference, inverted_form));
    }
    Ok(worst(ctx, pairs))
}

// ---------------------------------------------------------------------------
// Runners: Monte Carlo vs analytic
// ---------------------------------------------------------------------------

const MC_SAMPLES: u64 = 1_000_000;

fn rn_mc_variant_moments(ctx: &PrecisionContext, seed: u64) -> Result<CheckOutcome> {
    let out = mc_walk(McWalk::Variant { b: 1.0 }, MC_SAMPLES, seed)?;
    let mut worst_z = f64::NEG_INFINITY;
    let mut picked = None;
    for (s, n) in [(2u32, 1u32), (4, 2)] {
        let m = out
            .moments
            .iter()
            .find(|m| m.s == s)
            .expect("moment order present");
        let exact = variant_even_moment(n);
        let exact_f = exact.to_f64();
        let z = (m.estimate - exact_f).abs() / m.std_error;
        if z > worst_z {
            worst_z = z;
            picked = Some((
                ctx.real_from_f64(m.estimate),
                ctx.real_from_integer(&exact),
            ));
        }
    }
    let (lhs, rhs) = picked.expect("two moments compared");
    Ok(CheckOutcome {
        lhs,
        rhs,
        pass_override: Some(worst_z <= 4.0),
    })
}

fn mc_density_outcome(
    ctx: &PrecisionContext,
    seed: u64,
    sampler: McWalk,
    walk: WalkId,
) -> Result<CheckOutcome> {
    let out = mc_walk(sampler, MC_SAMPLES, seed)?;
    let masses = histogram_bin_masses(ctx, walk)?;
    let z = histogram_max_z(&out.histogram, &masses, out.samples);
    Ok(CheckOutcome {
        lhs: ctx.real_from_f64(z),
        rhs: ctx.real(5),
        pass_override: Some(z < 5.0),
    })
}

fn rn_mc_density_p3(ctx: &PrecisionContext, seed: u64) -> Result<CheckOutcome> {
    mc_density_outcome(ctx, seed, McWalk::Standard(3), WalkId::P3)
}

fn rn_mc_density_p4(ctx: &PrecisionContext, seed: u64) -> Result<CheckOutcome> {
    mc_density_outcome(ctx, seed, McWalk::Standard(4), WalkId::P4)
}

fn rn_mc_density_phat(ctx: &PrecisionContext, seed: u64) -> Result<CheckOutcome> {
    mc_density_outcome(ctx, seed, McWalk::Variant { b: 0.0 }, WalkId::Phat)
}

// ---------------------------------------------------------------------------
// The registry table
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn def(
    id: &'static str,
    description: &'static str,
    status: CheckStatus,
    cost: CostClass,
    rule: DigitRule,
    default_digits: u32,
    runner: Runner,
) -> CheckDefinition {
    CheckDefinition {
        id,
        description,
        status,
        cost,
        rule,
        default_digits,
        runner,
    }
}

/// Every registered check, sorted by id.
pub fn registry() -> Vec<CheckDefinition> {
    use CheckStatus::{Conjectural, Proven};
    use CostClass::{Fast, Medium, Slow};
    use DigitRule as R;

    let mut defs = vec![
        def(
            "thm1_formal_b4",
            "The three closed forms of the deformed variant-walk generating function \
             sum W~_b(2n) u^n agree coefficient-exactly through t^30 at b = 4, as does \
             the undeformed series against its hypergeometric product form.",
            Proven,
            Fast,
            R::Statistical,
            30,
            rn_thm1_formal_b4,
        ),
        def(
            "thm1_formal_b_rationals",
            "The three closed forms of the deformed generating function agree \
             coefficient-exactly through t^30 for b in {1, 1/2, 3}.",
            Proven,
            Fast,
            R::Statistical,
            30,
            rn_thm1_formal_b_rationals,
        ),
        def(
            "thm1_numeric",
            "At t = 1/100, sum W~(2n) (t/((4+t)(1+4t)))^n equals the product of two \
             complete elliptic integrals weighted by (4+t)(1+4t)/(4(1+4t+t^2)).",
            Proven,
            Medium,
            R::Proven,
            40,
            rn_thm1_numeric,
        ),
        def(
            "w2_prime_zero",
            "W_2'(0) = int_0^2 p_2(x) log x dx vanishes: the log-mean of |1 + e^{i t}| \
             over the circle is zero.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_w2_prime_zero,
        ),
        def(
            "w3_prime_closed",
            "W_3'(0) computed through the Jensen window int_1^2 p_2 log x dx equals \
             (3 sqrt(3)/4 pi) L(chi_-3; 2) = L'(chi_-3; -1).",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_w3_prime_closed,
        ),
        def(
            "w4_prime_closed",
            "W_4'(0) computed through int_1^3 p_3 log x dx equals 7 zeta(3)/(2 pi^2).",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_w4_prime_closed,
        ),
        def(
            "w5_conjecture",
            "W_5'(0) from the single modular integral over the lower axis leg equals \
             6 (sqrt(15)/(2 pi))^5 L(f_3; 4) = -L'(f_3; -1), with f_3 the eta-power \
             newform of level 15 and weight 3.",
            Conjectural,
            Slow,
            R::Conjectural,
            20,
            rn_w5_conjecture,
        ),
        def(
            "w6_conjecture_modular",
            "W_6'(0) from the two modular integrals (axis log leg plus the 3F2 kernel \
             leg) equals 3 (sqrt(6)/pi)^6 L(f_4; 5) = -8 L'(f_4; -1), with f_4 the \
             level-6 weight-4 newform.",
            Conjectural,
            Slow,
            R::Conjectural,
            20,
            rn_w6_conjecture_modular,
        ),
        def(
            "w6_via_p3",
            "W_6'(0) through the three-step decomposition 2 int p_3 log x P_3 dx — and \
             its integration-by-parts rewrite log 3 - int_0^3 P_3^2 dx/x — equals \
             -8 L'(f_4; -1).",
            Conjectural,
            Slow,
            R::Conjectural,
            20,
            rn_w6_via_p3,
        ),
        def(
            "w6_cross_route",
            "The three-step decomposition route and the modular-integral route for \
             W_6'(0) agree with each other (route consistency, independent of any \
             L-value attribution).",
            Proven,
            Slow,
            R::Proven,
            20,
            rn_w6_cross_route,
        ),
        def(
            "mellin_moments",
            "int_0^inf x^{2n} p_N(x) dx reproduces the exact integer moments W_N(2n) \
             from the constant-term recursion for N = 2, 3, 4 and n <= 4.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_mellin_moments,
        ),
        def(
            "red2_kernel",
            "Peeling two steps off a walk: the arithmetic-geometric-mean form of the \
             two-step log kernel matches its 3F2 form at x in {1, 1/2, 3/2}.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_red2_kernel,
        ),
        def(
            "gs_logmax",
            "The log-mean of |x + y e^{i t}| over the circle equals max(log|x|, log|y|), \
             including at the kink x = y.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_gs_logmax,
        ),
        def(
            "thm2_boyd",
            "m(1 + x_1 + x_2 + x_3 + x_2 x_3) from the log-kernel density integral \
             equals -2 L'(f_2; -1) = (225/(4 pi^4)) L(f_2; 3), with f_2 = \
             eta(t)eta(3t)eta(5t)eta(15t) of level 15.",
            Conjectural,
            Medium,
            R::Conjectural,
            20,
            rn_thm2_boyd,
        ),
        def(
            "variant_b_wan_agree",
            "The log-kernel form and the arccos form of m(1 + b x_1 + x_2 + x_3 + \
             x_2 x_3) agree for b in {1/2, 1, 2, 3}.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_variant_b_wan_agree,
        ),
        def(
            "variant_b_jensen",
            "For b = 5 > 4 the deformed measure collapses by Jensen's formula to \
             log b: the density integral of log b over the support equals log 5.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_variant_b_jensen,
        ),
        def(
            "phat_gamma",
            "The product-walk moments int_0^4 x^s phat(x) dx match \
             Gamma(1+s)^2/Gamma(1+s/2)^4 at s = 1, 3, and the log-moment vanishes.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_phat_gamma,
        ),
        def(
            "thm3_routes",
            "m((1+x_1)^2 + x_2 + x_3): the arcsin product integral 2G/pi + (2/pi^2) \
             int_0^1 arcsin(1-x) arcsin(x) dx/x equals its two-term 5F4 closed form.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_thm3_routes,
        ),
        def(
            "thm3_lvalue",
            "The 5F4 closed form of m((1+x_1)^2 + x_2 + x_3) equals -L'(f~_2; -1) = \
             (72/pi^4) L(f~_2; 3), with f~_2 = eta(2t)eta(4t)eta(6t)eta(12t) of \
             level 24.",
            Conjectural,
            Medium,
            R::Conjectural,
            30,
            rn_thm3_lvalue,
        ),
        def(
            "entry30",
            "G + (pi/4) log 2 = sqrt(2) 3F2(1/2,1/2,1/2; 3/2,3/2; 1/2), the classical \
             arcsin-series evaluation of Catalan's constant.",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_entry30,
        ),
        def(
            "L15_0",
            "(1/2) int_0^1 2F1(1/2,1/2;1; x^2/16) dx equals both its 3F2(1/16) form \
             and 2 L'(f_2; 0) = (15/(2 pi^2)) L(f_2; 2).",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_l15_0,
        ),
        def(
            "L15_1",
            "(1/2 pi) int_0^1 2F1(1/2,1/2;1; 1 - x^2/16) log x dx equals \
             2 L'(f_2; -1).",
            Conjectural,
            Medium,
            R::Conjectural,
            30,
            rn_l15_1,
        ),
        def(
            "L15_2",
            "(6/pi^2) int_0^1 2F1(1/2,1/2;1; x^2/16) log^2 x dx equals 2 L'(f_2; -2) \
             = (3*15^3/(8 pi^6)) L(f_2; 4).",
            Conjectural,
            Medium,
            R::Conjectural,
            30,
            rn_l15_2,
        ),
        def(
            "zu13_4f3",
            "The three-term combination of unit-argument 4F3 series with gamma-factor \
             weights equals -L'(f^_2; -1) = (128/pi^4) L(f^_2; 3), with f^_2 = \
             eta(4t)^2 eta(8t)^2 of level 32.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_zu13_4f3,
        ),
        def(
            "bz02_eta_integral",
            "int_0^1 (1/9)(1 - eta(t)^9/eta(3t)^3) dq/q equals L'(chi_-3; -1): the \
             weight-3 Eisenstein deficit integrates to the Dirichlet L-derivative.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_bz02_eta_integral,
        ),
        def(
            "p3_modular_consistency",
            "The three-step density transported along the modular parametrisation, \
             p_3(x_3(iy)) computed from eta quotients, matches the hypergeometric \
             density at the same abscissa.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_p3_modular_consistency,
        ),
        def(
            "P3_eisenstein",
            "The cumulative mass P_3(1): the hypergeometric tail route equals \
             6 sqrt(3) times the axis integral of the weight-3 Eisenstein combination \
             E_3(t) - 8 E_3(2t).",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_p3_eisenstein,
        ),
        def(
            "p3_dx_identity",
            "dx_3(iy)/dy equals -3 pi times the weight-3 eta quotient \
             eta_1^6 eta_3^2 eta_6^2 / eta_2^6 on the axis.",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_p3_dx_identity,
        ),
        def(
            "p3_product_formula",
            "The argument-sum product form of the cumulative mass P_3 (built from \
             arg(1 - w q^n) terms) matches its Lambert-series form on the axis.",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_p3_product_formula,
        ),
        def(
            "p4_modular_consistency",
            "The four-step density along both legs of the modular curve (axis leg at \
             y = 1/5, arc leg at theta = 7/10) matches the hypergeometric density at \
             the same abscissa.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_p4_modular_consistency,
        ),
        def(
            "p4_fixed_point",
            "x_4(i/(2 sqrt(15))) = 1 and x_4 at the leg top i/(2 sqrt(3)) equals 2, \
             pinning both ends of the axis leg.",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_p4_fixed_point,
        ),
        def(
            "atkin_lehner",
            "The Fricke involution y -> 1/(12y) acts on the weight-2 kernel as \
             p(i/(12y)) = 12 y^2 p(iy).",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_atkin_lehner,
        ),
        def(
            "reflection_integral",
            "Fricke antisymmetry of the axis log integral: int_0^{1/(2 sqrt 3)} \
             p_4 log x_4 dx_4 = -int_{1/(2 sqrt 3)}^inf p_4 log x_4 dx_4.",
            Proven,
            Medium,
            R::Proven,
            30,
            rn_reflection_integral,
        ),
        def(
            "level8_identities",
            "The level-8 parametrisation x = 16 (eta_1 eta_4^2 / eta_2^3)^4: the \
             complement identity 1 - x^2/16, the eta form of 2F1(1/2,1/2;1; x^2/16), \
             and the axis relation F(1 - x^2/16) = 2y F(x^2/16) all hold.",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_level8_identities,
        ),
        def(
            "tau0_locate",
            "The ordinate y_0 with x(i y_0) = 1 in the level-8 parametrisation equals \
             0.8774376613482 to all thirteen printed digits.",
            Proven,
            Fast,
            R::ProvenCapped(13),
            30,
            rn_tau0_locate,
        ),
        def(
            "eisenstein_eta_identities",
            "Weight-3 Eisenstein q-series equal their eta-quotient forms: E_3 = \
             eta(3t)^9/eta(t)^3, the companion E~_3 = eta(t)^9/eta(3t)^3, and \
             eta_1^5 eta_3 eta_6^4 / eta_2^4 = E_3(t) - 8 E_3(2t).",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_eisenstein_eta_identities,
        ),
        def(
            "eisenstein_transform",
            "The weight-3 inversion E_3 at i/(3y) equals (y^3/(3 sqrt 3)) E~_3(iy), \
             exchanging the two level-3 Eisenstein series.",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_eisenstein_transform,
        ),
        def(
            "logderiv_E1",
            "-(1/2 pi) (dx_3/dy)/x_3 equals (1/2)(eta_1^2 eta_3^2/(eta_2 eta_6))^2, \
             (1/18)(E_1(iy) - 4 E_1(4iy))^2, and (1/(54 y^2))(E_1(i/(12y)) - \
             E_1(i/(3y)))^2 on the axis.",
            Proven,
            Fast,
            R::Proven,
            30,
            rn_logderiv_e1,
        ),
        def(
            "mc_variant_moments",
            "Monte Carlo estimates of the variant-walk moments at 10^6 samples lie \
             within four standard errors of the exact values W~(2) = 5 and \
             W~(4) = 53.",
            Proven,
            Medium,
            R::Statistical,
            20,
            rn_mc_variant_moments,
        ),
        def(
            "mc_density_p3",
            "A 10^6-sample histogram of the three-step walk deviates from the \
             analytic bin masses by less than five binomial standard deviations in \
             every bin.",
            Proven,
            Medium,
            R::Statistical,
            20,
            rn_mc_density_p3,
        ),
        def(
            "mc_density_p4",
            "A 10^6-sample histogram of the four-step walk deviates from the \
             analytic bin masses by less than five binomial standard deviations in \
             every bin.",
            Proven,
            Medium,
            R::Statistical,
            20,
            rn_mc_density_p4,
        ),
        def(
            "mc_density_phat",
            "A 10^6-sample histogram of the product walk |1 + e^{i a}| |1 + e^{i b}| \
             deviates from the analytic bin masses by less than five binomial \
             standard deviations in every bin.",
            Proven,
            Medium,
            R::Statistical,
            20,
            rn_mc_density_phat,
        ),
    ];

    const BESSEL_W3_DESC: &str =
        "The Bessel-moment form 3^{2n+3/2}/(pi 4^n n!^2) int_0^inf t^{2n+1} I_0(t) \
         K_0(t)^2 dt reproduces the exact integer moment W_3(2n).";
    const BESSEL_W4_DESC: &str =
        "The Bessel-moment form 4^{2n+2}/(pi^2 n!^2) int_0^inf t^{2n+1} I_0(t) \
         K_0(t)^3 dt reproduces the exact integer moment W_4(2n).";
    for (id, three_step, runner) in [
        ("bessel_w3_1", true, rn_bessel_w3_1 as Runner),
        ("bessel_w3_2", true, rn_bessel_w3_2),
        ("bessel_w3_3", true, rn_bessel_w3_3),
        ("bessel_w3_4", true, rn_bessel_w3_4),
        ("bessel_w3_5", true, rn_bessel_w3_5),
        ("bessel_w4_1", false, rn_bessel_w4_1),
        ("bessel_w4_2", false, rn_bessel_w4_2),
        ("bessel_w4_3", false, rn_bessel_w4_3),
        ("bessel_w4_4", false, rn_bessel_w4_4),
        ("bessel_w4_5", false, rn_bessel_w4_5),
    ] {
        defs.push(def(
            id,
            if three_step { BESSEL_W3_DESC } else { BESSEL_W4_DESC },
            CheckStatus::Proven,
            CostClass::Medium,
            DigitRule::Proven,
            30,
            runner,
        ));
    }

    defs.sort_by(|a, b| a.id.cmp(b.id));
    defs
}

/// Registry entries whose id matches `filter`, in id order.
pub fn list_checks(filter: &str) -> Vec<CheckDefinition> {
    registry()
        .into_iter()
        .filter(|d| glob_match(filter, d.id))
        .collect()
}

// ---------------------------------------------------------------------------
// Execution engine
// ---------------------------------------------------------------------------

fn error_result(
    def: &CheckDefinition,
    digits: u32,
    message: String,
    started: Instant,
) -> CheckResult {
    CheckResult {
        id: def.id.to_string(),
        status: def.status,
        lhs_value: message,
        rhs_value: String::new(),
        digits_agreed: -1,
        min_digits_expected: def.min_digits_expected(digits),
        elapsed_seconds: started.elapsed().as_secs_f64(),
        precision_used: digits,
        pass: false,
    }
}

/// Run one check at the given precision.  Errors and panics become failed
/// results; they never propagate.
fn evaluate(def: &CheckDefinition, digits: u32, seed: u64) -> CheckResult {
    let started = Instant::now();
    let check_seed = seed ^ fnv1a(def.id.as_bytes());
    let attempt = catch_unwind(AssertUnwindSafe(|| -> Result<(CheckOutcome, u32)> {
        let ctx = PrecisionContext::new(digits)?;
        let outcome = (def.runner)(&ctx, check_seed)?;
        Ok((outcome, ctx.working_digits()))
    }));
    match attempt {
        Ok(Ok((outcome, working_digits))) => {
            let min_digits = def.min_digits_expected(digits);
            let agreed = digits_agreed(&outcome.lhs, &outcome.rhs, digits as i64 + 10);
            let pass = outcome.pass_override.unwrap_or(agreed >= min_digits);
            CheckResult {
                id: def.id.to_string(),
                status: def.status,
                lhs_value: to_decimal_string(&outcome.lhs, working_digits),
                rhs_value: to_decimal_string(&outcome.rhs, working_digits),
                digits_agreed: agreed,
                min_digits_expected: min_digits,
                elapsed_seconds: started.elapsed().as_secs_f64(),
                precision_used: digits,
                pass,
            }
        }
        Ok(Err(e)) => error_result(def, digits, format!("error: {e}"), started),
        Err(_) => error_result(def, digits, "error: panic during evaluation".into(), started),
    }
}

/// Run every check matching `filter` at `ctx`'s precision with a fixed seed.
/// Results come back in id order; failures are recorded, never raised.
pub fn run_checks(filter: &str, ctx: &PrecisionContext, seed: u64) -> Vec<CheckResult> {
    run_checks_configured(filter, Some(ctx.digits()), seed, 1)
}

/// Run matching checks on up to `jobs` worker threads.  With `digits: None`
/// each check runs at its own default precision (30 digits, except the slow
/// modular integrals and the statistical checks, which default to 20).
pub fn run_checks_configured(
    filter: &str,
    digits: Option<u32>,
    seed: u64,
    jobs: usize,
) -> Vec<CheckResult> {
    let defs = list_checks(filter);
    let n = defs.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = jobs.max(1).min(n);
    let slots: Mutex<Vec<Option<CheckResult>>> = Mutex::new(vec![None; n]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let d = &defs[i];
                let run_digits = digits.unwrap_or(d.default_digits);
                let result = evaluate(d, run_digits, seed);
                slots.lock().expect("result slots poisoned")[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots poisoned")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}
