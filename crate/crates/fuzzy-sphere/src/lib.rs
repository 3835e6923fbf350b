//! Exact symbolic kernel for the two-parameter fuzzy-sphere algebra.
//!
//! The algebra is generated by `x`, `y`, `z` subject to
//!
//! ```text
//! [x,y] = i*k*z   (and cyclic),    x^2 + y^2 + z^2 = u        (u = R^2)
//! ```
//!
//! with `k` the deformation parameter and `R` the radius. At `k = 0` it is
//! the commutative algebra of band-limited functions on the sphere; when
//! `k^2 (N^2 - 1) = 4 u` it maps onto N x N matrices.
//!
//! Everything on the algebraic side is exact: scalars are Gaussian
//! rationals, parameters enter through Laurent polynomials in `k` and
//! polynomials in `u`. Floating point appears only in the `sphere` module,
//! which handles the commutative limit numerically.
//!
//! Module map:
//!
//! * [`coeff`]   - exact scalars, parameter polynomials, interpolation.
//! * [`freealg`] - noncommutative words, parsing, rewriting to the
//!   canonical ladder normal form `Jp^a z^b Jm^c`.
//! * [`symtf`]   - totally symmetric expressions, formal trace, adjoint
//!   actions, conversion between normal forms and symmetric form.
//! * [`basis`]   - the orthogonal T-basis, inner products, norms and signs,
//!   ladder/Laplacian actions, Hahn cross-check, omega operators, ideal
//!   membership.
//! * [`matrep`]  - exact N x N representations, trace functionals, the
//!   evaluate-and-interpolate fast decomposition, benchmark harness.
//! * [`sphere`]  - spherical harmonics, quadrature, the Poisson bracket and
//!   the commutator limit.

pub mod basis;
pub mod coeff;
pub mod freealg;
pub mod matrep;
pub mod sphere;
pub mod symtf;

use thiserror::Error;

/// Errors surfaced by the kernel operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Expression text does not conform to the grammar.
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// Both x/y and Jp/Jm generators appear in one element.
    #[error("mixed generator alphabets: x/y and Jp/Jm cannot appear together")]
    MixedAlphabet,

    /// Exact evaluation hit a zero denominator.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// Two interpolation samples share a node.
    #[error("duplicate interpolation node u = {0}")]
    DuplicateNode(String),

    /// The exact interpolant needs a higher degree than the stated bound.
    #[error("interpolant degree {got} exceeds bound {bound}")]
    DegreeExceeded { bound: usize, got: usize },

    /// Argument outside the operation's domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A basis norm vanished where a division was required.
    #[error("degenerate norm: <T,T> is zero for (n,m)=({0},{1})")]
    DegenerateNorm(u32, i32),

    /// A coefficient has a pole at k=0.
    #[error("divergent k->0 limit in component (n,m)=({0},{1})")]
    DivergentLimit(u32, i32),

    /// The commutator decomposition is not divisible by k.
    #[error("coefficient of (n,m)=({0},{1}) not divisible by k")]
    NotDivisible(u32, i32),

    /// A sphere-side operation needed the exact form of its argument.
    #[error("sphere function carries no exact component form")]
    MissingExactForm,
}

pub type Result<T> = std::result::Result<T, Error>;
