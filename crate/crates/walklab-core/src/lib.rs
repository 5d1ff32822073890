//! walklab: a high-precision laboratory for short uniform random walks.
//!
//! An `n`-step uniform random walk in the plane takes `n` unit steps in
//! independent uniformly random directions.  The distance `X_n` from the
//! origin has density `p_n`, moments `W_n(s) = E[X_n^s]`, and — for small `n`
//! — a remarkable web of closed forms tying those quantities to
//! hypergeometric functions, Bessel moments, eta quotients and L-values of
//! modular forms.  This crate implements the whole toolchain at arbitrary
//! precision and ships a registry of named identity checks: every proven
//! evaluation is reproduced to (near) working precision, every conjectural
//! one is confirmed numerically with a digit-agreement report.
//!
//! Module map:
//!
//! * [`precision`] — working-precision contexts, memoised constants.
//! * [`series`] — exact rational formal power series; the generating-function
//!   identity for the variant walk, verified coefficient-by-coefficient.
//! * [`special`] — hypergeometric series, AGM evaluation of `₂F₁(½,½;1;·)`,
//!   Bessel `I₀`/`K₀`, incomplete gamma, Hurwitz zeta.
//! * [`quad`] — tanh-sinh / exp-sinh / Gauss–Legendre quadrature, path
//!   integrals along the imaginary axis and circular arcs.
//! * [`modular`] — Dedekind eta, eta quotients and their q-expansions,
//!   Eisenstein series, the modular parametrisations of the three- and
//!   four-step densities, Atkin–Lehner involutions.
//! * [`lfunc`] — eta-product cusp forms, their L-values via smoothed sums,
//!   the Dirichlet L-value `L(χ₋₃;2)`, and the printed conversion constants
//!   for `L'` at negative integers.
//! * [`walks`] — densities `p₂, p₃, p₄, p̂`, cumulative distributions, Mahler
//!   measure evaluations, Bessel-moment routes, Monte Carlo sampling.
//! * [`registry`] / [`report`] — the named checks, the run engine, and the
//!   JSON/CSV reporting used by the `walklab` binary.

pub mod lfunc;
pub mod modular;
pub mod precision;
pub mod quad;
pub mod registry;
pub mod report;
pub mod series;
pub mod special;
pub mod walks;

/// Crate-wide error type.  Numerical routines fail loudly: a result that
/// cannot be trusted to the requested precision is an `Err`, never a silently
/// degraded value.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Requested precision outside the supported range.
    #[error("precision error: {0}")]
    Precision(String),

    /// Argument outside a routine's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series hit the term cap before its tail bound dropped below target.
    #[error("series did not converge within {terms} terms ({context})")]
    SeriesConvergence { terms: usize, context: String },

    /// Quadrature hit the level cap before two levels agreed to target.
    #[error("quadrature did not converge at level cap {level_cap} (est. {achieved_digits} digits)")]
    QuadConvergence { level_cap: u32, achieved_digits: i64 },

    /// Gamma (or a gamma-ratio) evaluated at a non-positive integer.
    #[error("gamma pole at {0}")]
    GammaPole(String),

    /// Root finding could not bracket or refine a solution.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// Lookup of a check id, form id or method name failed.
    #[error("unknown identifier: {0}")]
    Unknown(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
