use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong while evaluating or transforming maps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet component is not finite")]
    NonFiniteJet,

    #[error("jet division by a value of modulus {modulus:e} (critical point)")]
    DivisionByZeroJet { modulus: f64 },

    #[error("stencil around {z} leaves the unit disk")]
    StencilOutsideDomain { z: Complex64 },

    #[error("invalid stencil step {step}")]
    InvalidStencil { step: f64 },

    #[error("point {z} is not inside the open unit disk")]
    PointOutsideDisk { z: Complex64 },

    #[error("critical point at {z}: derivative modulus {modulus:e}")]
    CriticalPoint { z: Complex64, modulus: f64 },

    #[error("Möbius map evaluated at its pole {w}")]
    PoleHit { w: Complex64 },

    #[error("degenerate Möbius coefficients: |ad - bc| = {det:e}")]
    DegenerateMobius { det: f64 },

    #[error("expression is not finite at {z}")]
    ExpressionNotFinite { z: Complex64 },

    #[error("maps are not Möbius-equivalent (residual {residual:e})")]
    NotEquivalent { residual: f64 },

    #[error("Jacobian vanishes at {z} (J = {jacobian:e})")]
    DegenerateJacobian { z: Complex64, jacobian: f64 },

    #[error("map is not locally univalent at grid point {z} (J = {jacobian:e})")]
    NotLocallyUnivalent { z: Complex64, jacobian: f64 },

    #[error("Jacobian changes sign on the grid; map is not locally univalent")]
    MixedOrientation,

    #[error("affine map needs |a| != |b| (got |a| = {abs_a}, |b| = {abs_b})")]
    DegenerateAffine { abs_a: f64, abs_b: f64 },

    #[error("rotation parameter must be nonzero and finite")]
    DegenerateRotation,

    #[error("pair-linear map is singular (|det| = {det:e})")]
    SingularPairMap { det: f64 },

    #[error("inner map leaves the unit disk at {z} (value {value})")]
    RangeViolation { z: Complex64, value: Complex64 },

    #[error("pair-linear map is not an affine map after a rotation (residual {residual:e})")]
    NotFactorable { residual: f64 },

    #[error("dilatation derivative vanishes at base point {w}")]
    DegenerateBasePoint { w: Complex64 },

    #[error("no admissible base point on the grid")]
    NoAdmissibleBasePoint,

    #[error("map is not normalized: {detail}")]
    NotNormalized { detail: String },

    #[error("dilatation is constant")]
    ConstantDilatation,
}

pub type Result<T> = std::result::Result<T, Error>;
