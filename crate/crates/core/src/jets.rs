//! Complex 3-jets and finite-difference Wirtinger derivatives.
//!
//! A [`Jet3`] carries `(f, f', f'', f''')` at one point. Arithmetic on jets
//! follows the Leibniz and quotient rules truncated at order three, and
//! [`Jet3::compose`] is Faà di Bruno's formula to the same order, so any
//! expression built from jets yields exact third-order derivatives.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Denominators with modulus below this are treated as zero by [`Jet3::div`].
pub const DIVISION_FLOOR: f64 = 1e-14;

/// Stencil points are kept inside `|z| < 1 - STENCIL_MARGIN`.
pub const STENCIL_MARGIN: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Value and first three complex derivatives of an analytic function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    v: Complex64,
    d1: Complex64,
    d2: Complex64,
    d3: Complex64,
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Jet3 {
    pub fn new(v: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Result<Self> {
        let jet = Self { v, d1, d2, d3 };
        if jet.is_finite() {
            Ok(jet)
        } else {
            Err(Error::NonFiniteJet)
        }
    }

    /// Builds a jet without the finiteness check. Callers check with
    /// [`Jet3::ensure_finite`] once a computation is complete.
    pub(crate) const fn raw(v: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Self {
        Self { v, d1, d2, d3 }
    }

    pub const fn constant(c: Complex64) -> Self {
        Self::raw(c, ZERO, ZERO, ZERO)
    }

    /// The jet of the identity map at `z`.
    pub const fn variable(z: Complex64) -> Self {
        Self::raw(z, ONE, ZERO, ZERO)
    }

    pub const fn zero() -> Self {
        Self::constant(ZERO)
    }

    pub const fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    pub fn d1(&self) -> Complex64 {
        self.d1
    }

    pub fn d2(&self) -> Complex64 {
        self.d2
    }

    pub fn d3(&self) -> Complex64 {
        self.d3
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.v, self.d1, self.d2, self.d3]
    }

    pub fn is_finite(&self) -> bool {
        self.components().into_iter().all(finite)
    }

    pub fn ensure_finite(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFiniteJet)
        }
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self::raw(self.v * k, self.d1 * k, self.d2 * k, self.d3 * k)
    }

    /// Quotient rule to order three with the default [`DIVISION_FLOOR`].
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Self) -> Result<Self> {
        self.div_with_floor(rhs, DIVISION_FLOOR)
    }

    pub fn div_with_floor(self, b: Self, floor: f64) -> Result<Self> {
        let modulus = b.v.norm();
        if !(modulus >= floor) {
            return Err(Error::DivisionByZeroJet { modulus });
        }
        let inv = b.v.inv();
        let v = self.v * inv;
        let d1 = (self.d1 - v * b.d1) * inv;
        let d2 = (self.d2 - 2.0 * d1 * b.d1 - v * b.d2) * inv;
        let d3 = (self.d3 - 3.0 * d2 * b.d1 - 3.0 * d1 * b.d2 - v * b.d3) * inv;
        Ok(Self::raw(v, d1, d2, d3))
    }

    /// Chain rule to order three: `self` must be the jet of `f` at
    /// `inner.v()`; the result is the jet of `f ∘ g` where `inner` is the
    /// jet of `g`.
    pub fn compose(self, inner: Self) -> Self {
        let (f1, f2, f3) = (self.d1, self.d2, self.d3);
        let (g1, g2, g3) = (inner.d1, inner.d2, inner.d3);
        Self::raw(
            self.v,
            f1 * g1,
            f2 * g1 * g1 + f1 * g2,
            f3 * g1 * g1 * g1 + 3.0 * f2 * g1 * g2 + f1 * g3,
        )
    }

    /// Jet of the derivative, with the unknown fourth derivative set to zero.
    /// Only the first three components of the result are meaningful.
    pub fn derivative_truncated(self) -> Self {
        Self::raw(self.d1, self.d2, self.d3, ZERO)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components()
            .into_iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for Jet3 {
    type Output = Jet3;

    fn add(self, b: Jet3) -> Jet3 {
        Jet3::raw(self.v + b.v, self.d1 + b.d1, self.d2 + b.d2, self.d3 + b.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;

    fn sub(self, b: Jet3) -> Jet3 {
        Jet3::raw(self.v - b.v, self.d1 - b.d1, self.d2 - b.d2, self.d3 - b.d3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;

    fn neg(self) -> Jet3 {
        Jet3::raw(-self.v, -self.d1, -self.d2, -self.d3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;

    fn mul(self, b: Jet3) -> Jet3 {
        let a = self;
        Jet3::raw(
            a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
            a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3,
        )
    }
}

impl Mul<Complex64> for Jet3 {
    type Output = Jet3;

    fn mul(self, k: Complex64) -> Jet3 {
        self.scale(k)
    }
}

/// Finite-difference scheme for [`wirtinger_dz`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Fourth-order central differences (five points per axis).
    Central4,
    /// Second-order central differences (three points per axis).
    Central2,
}

impl Scheme {
    fn reach(self) -> f64 {
        match self {
            Scheme::Central4 => 2.0,
            Scheme::Central2 => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerStencil {
    step: f64,
    scheme: Scheme,
}

impl WirtingerStencil {
    pub fn new(step: f64, scheme: Scheme) -> Result<Self> {
        if step > 0.0 && step < 1e-2 {
            Ok(Self { step, scheme })
        } else {
            Err(Error::InvalidStencil { step })
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Step actually used at `z`: shrunk so that every stencil point stays
    /// inside `|z| < 1 - STENCIL_MARGIN`.
    fn effective_step(&self, z: Complex64) -> Result<f64> {
        let room = 1.0 - STENCIL_MARGIN - z.norm();
        // Axis-aligned offsets of length reach·step; the farthest point from
        // the origin is at most |z| + reach·step away.
        let step = self.step.min(room / self.scheme.reach());
        if step > 0.0 && step.is_finite() {
            Ok(step)
        } else {
            Err(Error::StencilOutsideDomain { z })
        }
    }
}

impl Default for WirtingerStencil {
    fn default() -> Self {
        Self { step: 1e-3, scheme: Scheme::Central4 }
    }
}

/// `∂/∂z = ½(∂/∂x − i ∂/∂y)` of a plane field, by central differences.
pub fn wirtinger_dz<F>(field: F, z: Complex64, stencil: WirtingerStencil) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let h = stencil.effective_step(z)?;
    let partial = |dir: Complex64| -> Result<Complex64> {
        let at = |k: f64| {
            let p = z + dir * (k * h);
            if p.norm() >= 1.0 {
                return Err(Error::StencilOutsideDomain { z });
            }
            field(p)
        };
        Ok(match stencil.scheme {
            Scheme::Central4 => {
                (-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h)
            }
            Scheme::Central2 => (at(1.0)? - at(-1.0)?) / (2.0 * h),
        })
    };
    let dx = partial(ONE)?;
    let dy = partial(Complex64::i())?;
    Ok(0.5 * (dx - Complex64::i() * dy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Symbolic polynomial used as an independent oracle: coefficients in
    /// ascending powers, differentiated and multiplied coefficient-wise.
    #[derive(Clone, Debug)]
    struct Poly(Vec<Complex64>);

    impl Poly {
        fn eval(&self, z: Complex64) -> Complex64 {
            self.0.iter().enumerate().map(|(k, a)| a * z.powu(k as u32)).sum()
        }

        fn deriv(&self) -> Poly {
            Poly(self.0.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect())
        }

        fn mul(&self, o: &Poly) -> Poly {
            let mut out = vec![c(0.0, 0.0); self.0.len() + o.0.len()];
            for (i, a) in self.0.iter().enumerate() {
                for (j, b) in o.0.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            Poly(out)
        }

        fn compose(&self, inner: &Poly) -> Poly {
            let mut out = Poly(vec![c(0.0, 0.0)]);
            for a in self.0.iter().rev() {
                out = out.mul(inner);
                out.0[0] += a;
            }
            out
        }

        /// The oracle jet: value and three symbolic derivatives.
        fn jet(&self, z: Complex64) -> [Complex64; 4] {
            let d1 = self.deriv();
            let d2 = d1.deriv();
            let d3 = d2.deriv();
            [self.eval(z), d1.eval(z), d2.eval(z), d3.eval(z)]
        }

        /// Jet built with jet arithmetic only (Horner on jets).
        fn jet_by_arithmetic(&self, z: Complex64) -> Jet3 {
            let x = Jet3::variable(z);
            self.0
                .iter()
                .rev()
                .fold(Jet3::zero(), |acc, a| acc * x + Jet3::constant(*a))
        }
    }

    fn assert_jet(j: Jet3, expect: [Complex64; 4], tol: f64) {
        for (got, want) in j.components().into_iter().zip(expect) {
            let scale = want.norm().max(1.0);
            assert!((got - want).norm() <= tol * scale, "got {j:?}, want {expect:?}");
        }
    }

    fn complex() -> impl Strategy<Value = Complex64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(complex(), 1..=max_deg + 1).prop_map(Poly)
    }

    fn disk_point(r: f64) -> impl Strategy<Value = Complex64> {
        (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    fn jet() -> impl Strategy<Value = Jet3> {
        (complex(), complex(), complex(), complex()).prop_map(|(a, b, c, d)| Jet3::raw(a, b, c, d))
    }

    #[test]
    fn constructor_rejects_non_finite() {
        assert_eq!(Jet3::new(c(f64::NAN, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), Err(Error::NonFiniteJet));
        assert_eq!(
            Jet3::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, f64::INFINITY), c(0.0, 0.0)),
            Err(Error::NonFiniteJet)
        );
        assert!(Jet3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn add_examples() {
        let a = Jet3::constant(c(1.0, 0.0));
        let b = Jet3::raw(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_jet(a + b, [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0);
        let a = Jet3::raw(c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0));
        assert_eq!(a + Jet3::zero(), a);
    }

    #[test]
    fn mul_examples() {
        let z = Jet3::variable(c(1.0, 0.0));
        assert_jet(z * z, [c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)], 0.0);
        let a = Jet3::raw(c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0));
        assert_eq!(a * Jet3::one(), a);

        // (1 + z)(1 - z) = 1 - z² at 0.3: oracle from symbolic product.
        let z0 = c(0.3, 0.0);
        let p = Poly(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let q = Poly(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let expect = p.mul(&q).jet(z0);
        assert_jet(p.jet_by_arithmetic(z0) * q.jet_by_arithmetic(z0), expect, 1e-15);
        assert_jet(
            p.jet_by_arithmetic(z0) * q.jet_by_arithmetic(z0),
            [c(0.91, 0.0), c(-0.6, 0.0), c(-2.0, 0.0), c(0.0, 0.0)],
            1e-15,
        );
    }

    #[test]
    fn div_examples() {
        let a = Jet3::raw(c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0));
        assert_jet(a.div(a).unwrap(), [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e-14);

        // 1/(1 - z) at 0 → (1, 1, 2, 6)
        let one_minus_z = Jet3::raw(c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_jet(
            Jet3::one().div(one_minus_z).unwrap(),
            [c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(6.0, 0.0)],
            0.0,
        );

        let tiny = Jet3::constant(c(1e-15, 0.0));
        assert!(matches!(a.div(tiny), Err(Error::DivisionByZeroJet { .. })));
        assert!(matches!(a.div(Jet3::zero()), Err(Error::DivisionByZeroJet { .. })));
    }

    #[test]
    fn div_matches_quotient_rule_oracle() {
        // (z² + 2) / (z + 3): quotient derivatives by hand.
        //   q  = (z²+2)/(z+3)
        //   q' = (z² + 6z - 2)/(z+3)²
        //   q''= 22/(z+3)³
        //   q'''= -66/(z+3)⁴
        let z0 = c(0.2, -0.4);
        let num = Poly(vec![c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let den = Poly(vec![c(3.0, 0.0), c(1.0, 0.0)]);
        let s = z0 + 3.0;
        let expect = [
            (z0 * z0 + 2.0) / s,
            (z0 * z0 + 6.0 * z0 - 2.0) / (s * s),
            c(22.0, 0.0) / s.powu(3),
            c(-66.0, 0.0) / s.powu(4),
        ];
        let q = num.jet_by_arithmetic(z0).div(den.jet_by_arithmetic(z0)).unwrap();
        assert_jet(q, expect, 1e-14);
    }

    #[test]
    fn compose_examples() {
        let a = Jet3::raw(c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0));
        let z0 = c(0.7, 0.1);
        assert_eq!(a.compose(Jet3::variable(z0)), a);

        // z² after z³ at 0.5 is z⁶: (1/64, 6/32, 30/16, 120/8)
        let inner = Poly(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let outer = Poly(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let z0 = c(0.5, 0.0);
        let g = inner.jet_by_arithmetic(z0);
        let f = outer.jet_by_arithmetic(g.v());
        let expect = outer.compose(&inner).jet(z0);
        assert_jet(f.compose(g), expect, 1e-15);
        assert_jet(f.compose(g), [c(1.0 / 64.0, 0.0), c(0.1875, 0.0), c(1.875, 0.0), c(15.0, 0.0)], 1e-15);

        // exp after 2z at 0
        let exp_at_0 = Jet3::raw(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let two_z = Jet3::raw(c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_jet(exp_at_0.compose(two_z), [c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0), c(8.0, 0.0)], 0.0);
    }

    proptest! {
        #[test]
        fn polynomial_jets_match_symbolic(p in poly(6), z in disk_point(0.9)) {
            let got = p.jet_by_arithmetic(z);
            let want = p.jet(z);
            for (g, w) in got.components().into_iter().zip(want) {
                prop_assert!((g - w).norm() <= 1e-12 * w.norm().max(1.0));
            }
        }

        #[test]
        fn sum_matches_symbolic(p in poly(5), q in poly(5), z in disk_point(0.9)) {
            let got = p.jet_by_arithmetic(z) + q.jet_by_arithmetic(z);
            let mut coeffs = vec![c(0.0, 0.0); p.0.len().max(q.0.len())];
            for (k, a) in p.0.iter().enumerate() { coeffs[k] += a; }
            for (k, a) in q.0.iter().enumerate() { coeffs[k] += a; }
            let want = Poly(coeffs).jet(z);
            for (g, w) in got.components().into_iter().zip(want) {
                prop_assert!((g - w).norm() <= 1e-12 * w.norm().max(1.0));
            }
        }

        #[test]
        fn composition_matches_symbolic(p in poly(3), q in poly(3), z in disk_point(0.9)) {
            let inner = q.jet_by_arithmetic(z);
            let got = p.jet_by_arithmetic(inner.v()).compose(inner);
            let want = p.compose(&q).jet(z);
            for (g, w) in got.components().into_iter().zip(want) {
                prop_assert!((g - w).norm() <= 1e-11 * w.norm().max(1.0));
            }
        }

        #[test]
        fn mul_commutative_and_associative(a in jet(), b in jet(), d in jet()) {
            prop_assert!((a * b).max_abs_diff(&(b * a)) <= 1e-13 * (a * b).components().iter().map(|x| x.norm()).fold(1.0, f64::max));
            let left = (a * b) * d;
            let right = a * (b * d);
            let scale = left.components().iter().map(|x| x.norm()).fold(1.0, f64::max);
            prop_assert!(left.max_abs_diff(&right) <= 1e-13 * scale);
        }

        #[test]
        fn div_undoes_mul(a in jet(), b in jet(), mag in -6.0..0.0f64) {
            // Rescale b.v into [1e-6, 1]; order-k components are conditioned
            // by (|b'|/|b|)^k, so the relative error is measured on that scale.
            let b = Jet3::raw(b.v() / b.v().norm().max(1e-300) * 10f64.powf(mag), b.d1(), b.d2(), b.d3());
            prop_assume!(b.v().norm() >= 1e-6);
            let back = (a * b).div(b).unwrap();
            let a_scale = a.components().iter().map(|x| x.norm()).fold(1e-300, f64::max);
            let cond = 1.0 + [b.d1(), b.d2(), b.d3()].iter().map(|x| x.norm()).fold(0.0, f64::max) / b.v().norm();
            for (k, (got, want)) in back.components().into_iter().zip(a.components()).enumerate() {
                prop_assert!((got - want).norm() <= 1e-10 * a_scale * cond.powi(k as i32));
            }
        }
    }

    #[test]
    fn div_undoes_mul_on_moderate_denominators() {
        let b = Jet3::raw(c(0.5, -0.2), c(0.9, 0.3), c(-0.4, 0.8), c(0.1, 0.1));
        let a = Jet3::raw(c(0.3, 0.7), c(-0.6, 0.2), c(0.5, 0.5), c(-0.9, 0.4));
        assert!((a * b).div(b).unwrap().max_abs_diff(&a) <= 1e-13);
    }

    #[test]
    fn wirtinger_of_identity_and_conjugate() {
        let st = WirtingerStencil::default();
        for z in [c(0.0, 0.0), c(0.3, 0.1), c(-0.5, 0.6)] {
            let dz = wirtinger_dz(Ok, z, st).unwrap();
            assert!((dz - 1.0).norm() < 1e-12);
            let dzbar = wirtinger_dz(|w| Ok(w.conj()), z, st).unwrap();
            assert!(dzbar.norm() < 1e-10);
        }
    }

    #[test]
    fn wirtinger_of_modulus_squared() {
        let st = WirtingerStencil::default();
        for z in [c(0.3, 0.1), c(-0.2, 0.45), c(0.6, -0.6), c(0.0, 0.0)] {
            let dz = wirtinger_dz(|w| Ok(w * w.conj()), z, st).unwrap();
            assert!((dz - z.conj()).norm() < 1e-9, "{z}: {dz}");
        }
    }

    #[test]
    fn wirtinger_second_order_scheme() {
        let st = WirtingerStencil::new(1e-4, Scheme::Central2).unwrap();
        let z = c(0.2, 0.3);
        let dz = wirtinger_dz(|w| Ok(w.exp()), z, st).unwrap();
        assert!((dz - z.exp()).norm() < 1e-7);
    }

    #[test]
    fn stencil_near_boundary() {
        let st = WirtingerStencil::default();
        // Clamped: still evaluable just inside the margin.
        let z = c(0.9995, 0.0);
        let dz = wirtinger_dz(|w| Ok(w * w), z, st).unwrap();
        assert!((dz - 2.0 * z).norm() < 1e-6);
        // No room left at all.
        let z = c(1.0 - 1e-7, 0.0);
        assert!(matches!(wirtinger_dz(Ok, z, st), Err(Error::StencilOutsideDomain { .. })));
        assert!(matches!(
            wirtinger_dz(Ok, c(1.5, 0.0), st),
            Err(Error::StencilOutsideDomain { .. })
        ));
    }

    #[test]
    fn stencil_step_bounds() {
        assert!(WirtingerStencil::new(0.0, Scheme::Central4).is_err());
        assert!(WirtingerStencil::new(1e-2, Scheme::Central4).is_err());
        assert!(WirtingerStencil::new(-1e-3, Scheme::Central2).is_err());
        assert!(WirtingerStencil::new(5e-3, Scheme::Central2).is_ok());
    }
}
