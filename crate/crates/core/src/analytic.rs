//! Closed-form analytic functions on the disk, the classical Schwarzian
//! derivative, and Möbius transformations.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{max_over, Grid};
use crate::jets::Jet3;

/// `|φ'(z)|` below this is a critical point for (pre-)Schwarzian purposes.
pub const CRITICAL_FLOOR: f64 = 1e-12;

/// `|ad - bc|` below this is rejected by [`Mobius::new`].
pub const MOBIUS_DET_FLOOR: f64 = 1e-12;

/// `|cw + d|` below this is a pole hit.
pub const POLE_FLOOR: f64 = 1e-14;

/// Tolerance for grid comparison of two Schwarzian fields.
pub const SCHWARZIAN_FIELD_TOL: f64 = 1e-8;

/// Tolerance for the pointwise check `φ1 = T ∘ φ2`.
pub const MOBIUS_RESIDUAL_TOL: f64 = 1e-8;

/// `|φ'|` needed at a base point used to recover a Möbius map.
const BASE_POINT_FLOOR: f64 = 1e-6;

/// `z ↦ (az + b)/(cz + d)`, stored with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() >= MOBIUS_DET_FLOOR) || ![a, b, c, d].iter().all(|z| z.is_finite()) {
            return Err(Error::DegenerateMobius { det: det.norm() });
        }
        // Leave already-normalized coefficients untouched so that
        // serialization round trips are exact.
        if (det - 1.0).norm() <= 4.0 * f64::EPSILON {
            return Ok(Self { a, b, c, d });
        }
        let k = det.sqrt().inv();
        Ok(Self { a: a * k, b: b * k, c: c * k, d: d * k })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, w: Complex64) -> Result<Complex64> {
        let den = self.c * w + self.d;
        if den.norm() < POLE_FLOOR {
            return Err(Error::PoleHit { w });
        }
        Ok((self.a * w + self.b) / den)
    }

    /// `self ∘ inner`, the matrix product.
    pub fn compose(&self, inner: &Mobius) -> Mobius {
        let (p, q) = (self, inner);
        Mobius::new(
            p.a * q.a + p.b * q.c,
            p.a * q.b + p.b * q.d,
            p.c * q.a + p.d * q.c,
            p.c * q.b + p.d * q.d,
        )
        .expect("product of invertible Möbius maps is invertible")
    }

    /// Inverse via the adjugate matrix.
    pub fn invert(&self) -> Mobius {
        Mobius::new(self.d, -self.b, -self.c, self.a).expect("adjugate of an invertible map")
    }

    /// The pole `-d/c`, if any.
    pub fn pole(&self) -> Option<Complex64> {
        (self.c.norm() > 0.0).then(|| -self.d / self.c)
    }

    pub fn jet_at(&self, w: Complex64) -> Result<Jet3> {
        let den = self.c * w + self.d;
        if den.norm() < POLE_FLOOR {
            return Err(Error::PoleHit { w });
        }
        // With ad - bc = 1: T' = 1/den², T'' = -2c/den³, T''' = 6c²/den⁴.
        let inv = den.inv();
        let inv2 = inv * inv;
        let v = (self.a * w + self.b) * inv;
        let d1 = inv2;
        let d2 = -2.0 * self.c * inv2 * inv;
        let d3 = 6.0 * self.c * self.c * inv2 * inv2;
        Jet3::new(v, d1, d2, d3)
    }

    /// Distance between two maps as elements of PSL(2, C): the sign of a
    /// normalized coefficient vector is not determined by the map.
    pub fn projective_distance(&self, other: &Mobius) -> f64 {
        let diff = |s: f64| {
            self.coefficients()
                .iter()
                .zip(other.coefficients())
                .map(|(x, y)| (x - s * y).norm())
                .fold(0.0, f64::max)
        };
        diff(1.0).min(diff(-1.0))
    }
}

/// The disk automorphism `φ_w(z) = (w + z)/(1 + w̄z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskAutomorphism {
    w: Complex64,
}

impl DiskAutomorphism {
    pub fn new(w: Complex64) -> Result<Self> {
        if w.norm() < 1.0 {
            Ok(Self { w })
        } else {
            Err(Error::PointOutsideDisk { z: w })
        }
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn as_mobius(&self) -> Mobius {
        let one = Complex64::new(1.0, 0.0);
        Mobius::new(one, self.w, self.w.conj(), one).expect("|w| < 1 gives det 1 - |w|² > 0")
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.w + z) / (1.0 + self.w.conj() * z)
    }

    pub fn as_expr(&self) -> AnalyticExpr {
        AnalyticExpr::Mobius(self.as_mobius())
    }
}

/// An analytic function given in closed form.
///
/// Leaves are polynomials, Möbius maps, `exp`, the identity and constants;
/// inner nodes combine them. Evaluation returns exact 3-jets.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticExpr {
    /// Coefficients in ascending powers.
    Polynomial(Vec<Complex64>),
    Mobius(Mobius),
    Exp,
    Identity,
    Constant(Complex64),
    Add(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    Mul(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    Div(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    /// `outer ∘ inner`.
    Compose(Arc<AnalyticExpr>, Arc<AnalyticExpr>),
    Scale(Complex64, Arc<AnalyticExpr>),
}

impl AnalyticExpr {
    pub fn polynomial(coeffs: impl Into<Vec<Complex64>>) -> Self {
        Self::Polynomial(coeffs.into())
    }

    /// Polynomial with real coefficients, ascending powers.
    pub fn real_polynomial(coeffs: &[f64]) -> Self {
        Self::Polynomial(coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::Constant(c)
    }

    pub fn compose(&self, inner: &AnalyticExpr) -> Self {
        Self::Compose(Arc::new(self.clone()), Arc::new(inner.clone()))
    }

    /// `k · self`, folding trivial factors.
    pub fn scaled(&self, k: Complex64) -> Self {
        if k == Complex64::new(1.0, 0.0) {
            self.clone()
        } else if k == Complex64::new(0.0, 0.0) {
            Self::Constant(k)
        } else {
            Self::Scale(k, Arc::new(self.clone()))
        }
    }

    /// `self + c`, folding a zero constant.
    pub fn shifted(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            self.clone()
        } else {
            self.clone() + Self::Constant(c)
        }
    }

    /// `ka · self + kb · other`, dropping zero terms.
    pub fn linear_combination(ka: Complex64, a: &Self, kb: Complex64, b: &Self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        match (ka == zero, kb == zero) {
            (true, true) => Self::Constant(zero),
            (false, true) => a.scaled(ka),
            (true, false) => b.scaled(kb),
            (false, false) => a.scaled(ka) + b.scaled(kb),
        }
    }

    pub fn as_polynomial(&self) -> Option<&[Complex64]> {
        match self {
            Self::Polynomial(c) => Some(c),
            _ => None,
        }
    }

    /// 3-jet at a point of the open unit disk.
    pub fn eval_jet(&self, z: Complex64) -> Result<Jet3> {
        if !(z.norm() < 1.0) {
            return Err(Error::PointOutsideDisk { z });
        }
        self.jet(z)?.ensure_finite().map_err(|_| Error::ExpressionNotFinite { z })
    }

    /// 3-jet at any point where the expression is defined. Composition
    /// nodes evaluate their outer part wherever the inner part lands, so
    /// this does not require `|z| < 1`.
    pub fn jet(&self, z: Complex64) -> Result<Jet3> {
        Ok(match self {
            Self::Polynomial(coeffs) => polynomial_jet(coeffs, z),
            Self::Mobius(t) => t.jet_at(z)?,
            Self::Exp => {
                let e = z.exp();
                Jet3::raw(e, e, e, e)
            }
            Self::Identity => Jet3::variable(z),
            Self::Constant(c) => Jet3::constant(*c),
            Self::Add(a, b) => a.jet(z)? + b.jet(z)?,
            Self::Mul(a, b) => a.jet(z)? * b.jet(z)?,
            Self::Div(a, b) => a.jet(z)?.div(b.jet(z)?)?,
            Self::Compose(outer, inner) => {
                let inner = inner.jet(z)?;
                outer.jet(inner.v())?.compose(inner)
            }
            Self::Scale(k, a) => a.jet(z)?.scale(*k),
        })
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_jet(z)?.v())
    }

    /// Checks that the expression evaluates to a finite jet at every grid point.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for z in grid.iter() {
            match self.eval_jet(z) {
                Ok(_) => {}
                Err(Error::NonFiniteJet) => return Err(Error::ExpressionNotFinite { z }),
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

fn polynomial_jet(coeffs: &[Complex64], z: Complex64) -> Jet3 {
    let zero = Complex64::new(0.0, 0.0);
    let (mut v, mut d1, mut d2, mut d3) = (zero, zero, zero, zero);
    for &a in coeffs.iter().rev() {
        d3 = d3 * z + 3.0 * d2;
        d2 = d2 * z + 2.0 * d1;
        d1 = d1 * z + v;
        v = v * z + a;
    }
    Jet3::raw(v, d1, d2, d3)
}

impl Add for AnalyticExpr {
    type Output = AnalyticExpr;

    fn add(self, rhs: AnalyticExpr) -> AnalyticExpr {
        AnalyticExpr::Add(Arc::new(self), Arc::new(rhs))
    }
}

impl Sub for AnalyticExpr {
    type Output = AnalyticExpr;

    fn sub(self, rhs: AnalyticExpr) -> AnalyticExpr {
        self + (-rhs)
    }
}

impl Neg for AnalyticExpr {
    type Output = AnalyticExpr;

    fn neg(self) -> AnalyticExpr {
        AnalyticExpr::Scale(Complex64::new(-1.0, 0.0), Arc::new(self))
    }
}

impl Mul for AnalyticExpr {
    type Output = AnalyticExpr;

    fn mul(self, rhs: AnalyticExpr) -> AnalyticExpr {
        AnalyticExpr::Mul(Arc::new(self), Arc::new(rhs))
    }
}

impl Mul<AnalyticExpr> for Complex64 {
    type Output = AnalyticExpr;

    fn mul(self, rhs: AnalyticExpr) -> AnalyticExpr {
        AnalyticExpr::Scale(self, Arc::new(rhs))
    }
}

impl Div for AnalyticExpr {
    type Output = AnalyticExpr;

    fn div(self, rhs: AnalyticExpr) -> AnalyticExpr {
        AnalyticExpr::Div(Arc::new(self), Arc::new(rhs))
    }
}

impl From<Mobius> for AnalyticExpr {
    fn from(t: Mobius) -> Self {
        AnalyticExpr::Mobius(t)
    }
}

/// `φ''/φ'` from a jet.
pub fn pre_schwarzian_of_jet(j: &Jet3, z: Complex64) -> Result<Complex64> {
    let modulus = j.d1().norm();
    if !(modulus >= CRITICAL_FLOOR) {
        return Err(Error::CriticalPoint { z, modulus });
    }
    Ok(j.d2() / j.d1())
}

/// `φ'''/φ' - (3/2)(φ''/φ')²` from a jet.
pub fn schwarzian_of_jet(j: &Jet3, z: Complex64) -> Result<Complex64> {
    let p = pre_schwarzian_of_jet(j, z)?;
    Ok(j.d3() / j.d1() - 1.5 * p * p)
}

/// Pre-Schwarzian `P(φ) = φ''/φ'`.
pub fn pre_schwarzian(f: &AnalyticExpr, z: Complex64) -> Result<Complex64> {
    pre_schwarzian_of_jet(&f.eval_jet(z)?, z)
}

/// Classical Schwarzian `S(φ) = P' - P²/2`.
pub fn schwarzian(f: &AnalyticExpr, z: Complex64) -> Result<Complex64> {
    schwarzian_of_jet(&f.eval_jet(z)?, z)
}

/// Largest `|S(φ1) - S(φ2)|` over the grid and where it occurs.
pub fn schwarzian_field_deviation(
    phi1: &AnalyticExpr,
    phi2: &AnalyticExpr,
    grid: &Grid,
) -> Result<(f64, Complex64)> {
    max_over(grid, |z| Ok((schwarzian(phi1, z)? - schwarzian(phi2, z)?).norm()))
}

/// Largest `|φ1(z) - T(φ2(z))|` over the grid.
pub fn mobius_residual(
    phi1: &AnalyticExpr,
    phi2: &AnalyticExpr,
    t: &Mobius,
    grid: &Grid,
) -> Result<f64> {
    Ok(max_over(grid, |z| Ok((phi1.value(z)? - t.apply(phi2.value(z)?)?).norm()))?.0)
}

/// The Möbius map with prescribed value, first and second derivative at `p`.
fn mobius_from_two_jet(p: Complex64, t0: Complex64, t1: Complex64, t2: Complex64) -> Result<Mobius> {
    // T(w) = t0 + t1·s/(1 - k·s), s = w - p, k = t2/(2 t1).
    let k = t2 / (2.0 * t1);
    let a = t1 - t0 * k;
    Mobius::new(a, t0 - a * p, -k, 1.0 + k * p)
}

/// Finds `T` with `φ1 = T ∘ φ2`.
///
/// The Schwarzian fields are compared on `grid` first; `T` is then read off
/// the 3-jets at `base` (default: the origin, else the first grid point where
/// both maps are locally univalent) and the identity is checked pointwise.
pub fn recover_mobius(
    phi1: &AnalyticExpr,
    phi2: &AnalyticExpr,
    base: Option<Complex64>,
    grid: &Grid,
) -> Result<Mobius> {
    let (deviation, _) = schwarzian_field_deviation(phi1, phi2, grid)?;
    if !(deviation <= SCHWARZIAN_FIELD_TOL) {
        return Err(Error::NotEquivalent { residual: deviation });
    }

    let admissible = |z: Complex64| -> Option<(Jet3, Jet3)> {
        let j1 = phi1.eval_jet(z).ok()?;
        let j2 = phi2.eval_jet(z).ok()?;
        (j1.d1().norm() >= BASE_POINT_FLOOR && j2.d1().norm() >= BASE_POINT_FLOOR).then_some((j1, j2))
    };
    let origin = Complex64::new(0.0, 0.0);
    let (j1, j2) = match base {
        Some(z) => admissible(z).ok_or(Error::CriticalPoint { z, modulus: 0.0 })?,
        None => std::iter::once(origin)
            .chain(grid.iter())
            .find_map(admissible)
            .ok_or(Error::CriticalPoint { z: origin, modulus: 0.0 })?,
    };

    // φ1 = T∘φ2 ⇒ φ1' = T'(φ2)φ2',  φ1'' = T''(φ2)φ2'² + T'(φ2)φ2''.
    let t1 = j1.d1() / j2.d1();
    let t2 = (j1.d2() - t1 * j2.d2()) / (j2.d1() * j2.d1());
    let t = mobius_from_two_jet(j2.v(), j1.v(), t1, t2)?;

    let residual = mobius_residual(phi1, phi2, &t, grid)?;
    if residual <= MOBIUS_RESIDUAL_TOL {
        Ok(t)
    } else {
        Err(Error::NotEquivalent { residual })
    }
}
