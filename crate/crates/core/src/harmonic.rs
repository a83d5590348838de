//! Harmonic mappings `f = conj(g) + h` on the unit disk.
//!
//! A [`HarmonicMap`] stores the pair `(g, h)` of analytic parts. The harmonic
//! pre-Schwarzian `P_H(f) = ∂_z log J_f` and Schwarzian
//! `S_H(f) = ∂_z P_H - P_H²/2` are available through three routes:
//!
//! * [`schwarzian_h_closed`]: the closed formula in `h`, `ω` and their derivatives;
//! * [`schwarzian_h_pointwise`]: `S(h - conj(ω(z₀))·g)(z₀)`, a classical Schwarzian
//!   with the dilatation frozen at the evaluation point;
//! * [`schwarzian_h_definition`]: a finite-difference Wirtinger derivative of `P_H`.
//!
//! The transformations that preserve `S_H` act on the stored pair linearly, so
//! they are all expressed through [`PairLinearMap`]. Affine maps act on values
//! *after* `f` (`A ∘ f`); older literature calls this a "pre-composition".
//!
//! Pair convention: the anti-analytic rotation `R_μ(f) = μ·conj(g) + h` is
//! stored as `(conj(μ)·g, h)`, so both stored parts stay analytic.

use num_complex::Complex64;

use crate::analytic::{schwarzian_of_jet, AnalyticExpr, DiskAutomorphism, CRITICAL_FLOOR};
use crate::error::{Error, Result};
use crate::grid::{max_over, Grid};
use crate::jets::{wirtinger_dz, Jet3, WirtingerStencil};

/// `|J_f|` required at every grid point of a [`HarmonicMap`].
pub const UNIVALENCE_FLOOR: f64 = 1e-10;

/// `|J_f|` below this makes pointwise `P_H`/`S_H` evaluation fail.
pub const JACOBIAN_FLOOR: f64 = 1e-12;

/// Grid deviation `max |ω(z) - ω(0)|` below which the dilatation counts as constant.
pub const CONSTANT_DILATATION_TOL: f64 = 1e-9;

/// `|ω'|` at the recentred origin below which normalization is refused.
pub const BASE_POINT_FLOOR: f64 = 1e-10;

/// Tolerance on each normalization equality.
pub const NORMALIZATION_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// A locally univalent harmonic map `f = conj(g) + h`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicMap {
    g: AnalyticExpr,
    h: AnalyticExpr,
}

impl HarmonicMap {
    /// Validates both parts and local univalence on the standard grid.
    pub fn new(g: AnalyticExpr, h: AnalyticExpr) -> Result<Self> {
        Self::new_on(g, h, &Grid::standard())
    }

    pub fn new_on(g: AnalyticExpr, h: AnalyticExpr, grid: &Grid) -> Result<Self> {
        let map = Self { g, h };
        map.orientation_on(grid)?;
        Ok(map)
    }

    pub(crate) fn from_parts_unchecked(g: AnalyticExpr, h: AnalyticExpr) -> Self {
        Self { g, h }
    }

    /// Map given by its analytic part and dilatation, both polynomials:
    /// `g` is the exact antiderivative of `ω·h'` with `g(0) = 0`.
    pub fn from_dilatation(h: &[Complex64], omega: &[Complex64]) -> Result<Self> {
        let dh: Vec<Complex64> = h.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
        let mut product = vec![ZERO; (dh.len() + omega.len()).saturating_sub(1).max(1)];
        for (i, a) in omega.iter().enumerate() {
            for (j, b) in dh.iter().enumerate() {
                product[i + j] += a * b;
            }
        }
        let g: Vec<Complex64> = std::iter::once(ZERO)
            .chain(product.iter().enumerate().map(|(k, a)| a / (k + 1) as f64))
            .collect();
        Self::new(AnalyticExpr::Polynomial(g), AnalyticExpr::Polynomial(h.to_vec()))
    }

    /// The analytic map `h`, i.e. `g = 0`.
    pub fn analytic(h: AnalyticExpr) -> Result<Self> {
        Self::new(AnalyticExpr::Constant(ZERO), h)
    }

    /// Co-analytic part: `f = conj(g) + h`.
    pub fn g(&self) -> &AnalyticExpr {
        &self.g
    }

    /// Analytic part.
    pub fn h(&self) -> &AnalyticExpr {
        &self.h
    }

    pub fn into_parts(self) -> (AnalyticExpr, AnalyticExpr) {
        (self.g, self.h)
    }

    pub fn jets(&self, z: Complex64) -> Result<(Jet3, Jet3)> {
        Ok((self.g.eval_jet(z)?, self.h.eval_jet(z)?))
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.g.value(z)?.conj() + self.h.value(z)?)
    }

    /// `conj(f)`: the stored pair swaps.
    pub fn conjugate(&self) -> Self {
        Self { g: self.h.clone(), h: self.g.clone() }
    }

    /// Sign of the Jacobian on the grid; fails if it vanishes or changes sign.
    pub fn orientation_on(&self, grid: &Grid) -> Result<Orientation> {
        let mut seen: Option<Orientation> = None;
        for z in grid.iter() {
            let (jg, jh) = match self.jets(z) {
                Err(Error::NonFiniteJet) => return Err(Error::ExpressionNotFinite { z }),
                other => other?,
            };
            let j = jacobian_of_jets(&jg, &jh);
            if !(j.abs() >= UNIVALENCE_FLOOR) {
                return Err(Error::NotLocallyUnivalent { z, jacobian: j });
            }
            let here = if j > 0.0 { Orientation::Preserving } else { Orientation::Reversing };
            match seen {
                None => seen = Some(here),
                Some(o) if o != here => return Err(Error::MixedOrientation),
                _ => {}
            }
        }
        Ok(seen.unwrap_or(Orientation::Preserving))
    }

    pub fn orientation(&self) -> Result<Orientation> {
        self.orientation_on(&Grid::standard())
    }

    /// The orientation-preserving member of `{f, conj(f)}` on the standard grid.
    pub fn orientation_preserving(&self) -> Result<(Self, bool)> {
        Ok(match self.orientation()? {
            Orientation::Preserving => (self.clone(), false),
            Orientation::Reversing => (self.conjugate(), true),
        })
    }

    /// Jets of the orientation-preserving representative at `z`.
    fn oriented_jets(&self, z: Complex64) -> Result<(Jet3, Jet3)> {
        let (jg, jh) = self.jets(z)?;
        Ok(if jacobian_of_jets(&jg, &jh) < 0.0 { (jh, jg) } else { (jg, jh) })
    }
}

fn jacobian_of_jets(jg: &Jet3, jh: &Jet3) -> f64 {
    jh.d1().norm_sqr() - jg.d1().norm_sqr()
}

/// `ω`, `ω'`, `ω''` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilatationJet {
    pub w: Complex64,
    pub w1: Complex64,
    pub w2: Complex64,
}

fn dilatation_of_jets(jg: &Jet3, jh: &Jet3, z: Complex64) -> Result<DilatationJet> {
    let q = jg
        .derivative_truncated()
        .div_with_floor(jh.derivative_truncated(), CRITICAL_FLOOR)
        .map_err(|_| Error::CriticalPoint { z, modulus: jh.d1().norm() })?;
    Ok(DilatationJet { w: q.v(), w1: q.d1(), w2: q.d2() })
}

/// Second complex dilatation `ω = g'/h'` with two derivatives.
pub fn dilatation(f: &HarmonicMap, z: Complex64) -> Result<DilatationJet> {
    let (jg, jh) = f.jets(z)?;
    dilatation_of_jets(&jg, &jh, z)
}

/// `J_f = |h'|² - |g'|²`.
pub fn jacobian(f: &HarmonicMap, z: Complex64) -> Result<f64> {
    let (jg, jh) = f.jets(z)?;
    Ok(jacobian_of_jets(&jg, &jh))
}

/// Pieces shared by the closed-form routes, on the orientation-preserving
/// representative.
struct Oriented {
    jg: Jet3,
    jh: Jet3,
    dil: DilatationJet,
    /// `1 - |ω|²`
    gap: f64,
}

fn oriented(f: &HarmonicMap, z: Complex64) -> Result<Oriented> {
    let (jg, jh) = f.oriented_jets(z)?;
    let jacobian = jacobian_of_jets(&jg, &jh);
    if !(jacobian.abs() >= JACOBIAN_FLOOR) {
        return Err(Error::DegenerateJacobian { z, jacobian });
    }
    let dil = dilatation_of_jets(&jg, &jh, z)?;
    Ok(Oriented { jg, jh, dil, gap: 1.0 - dil.w.norm_sqr() })
}

/// `P_H(f) = h''/h' - conj(ω)·ω'/(1 - |ω|²)`.
pub fn pre_schwarzian_h(f: &HarmonicMap, z: Complex64) -> Result<Complex64> {
    let o = oriented(f, z)?;
    Ok(o.jh.d2() / o.jh.d1() - o.dil.w.conj() * o.dil.w1 / o.gap)
}

/// `P_H(f) = (h''·conj(h') - g''·conj(g'))/J_f`, i.e. `∂_z log J_f` expanded directly.
pub fn pre_schwarzian_h_from_jacobian(f: &HarmonicMap, z: Complex64) -> Result<Complex64> {
    let (jg, jh) = f.jets(z)?;
    let jacobian = jacobian_of_jets(&jg, &jh);
    if !(jacobian.abs() >= JACOBIAN_FLOOR) {
        return Err(Error::DegenerateJacobian { z, jacobian });
    }
    Ok((jh.d2() * jh.d1().conj() - jg.d2() * jg.d1().conj()) / jacobian)
}

/// Closed form of `S_H(f)`:
///
/// `S(h) + conj(ω)/(1-|ω|²)·(h''/h'·ω' - ω'') - (3/2)·(ω'·conj(ω)/(1-|ω|²))²`.
pub fn schwarzian_h_closed(f: &HarmonicMap, z: Complex64) -> Result<Complex64> {
    let o = oriented(f, z)?;
    let s_h = schwarzian_of_jet(&o.jh, z)?;
    let DilatationJet { w, w1, w2 } = o.dil;
    let p = o.jh.d2() / o.jh.d1();
    let k = w.conj() / o.gap;
    let t = w1 * k;
    Ok(s_h + k * (p * w1 - w2) - 1.5 * t * t)
}

/// `S_H(f)(z₀) = S(h - conj(ω(z₀))·g)(z₀)`.
pub fn schwarzian_h_pointwise(f: &HarmonicMap, z0: Complex64) -> Result<Complex64> {
    let o = oriented(f, z0)?;
    let frozen = o.jh - o.jg.scale(o.dil.w.conj());
    schwarzian_of_jet(&frozen, z0)
}

/// `S_H(f) = ∂_z P_H - P_H²/2` with `∂_z` taken by finite differences.
pub fn schwarzian_h_definition(f: &HarmonicMap, z: Complex64, stencil: WirtingerStencil) -> Result<Complex64> {
    let dp = wirtinger_dz(|w| pre_schwarzian_h(f, w), z, stencil)?;
    let p = pre_schwarzian_h(f, z)?;
    Ok(dp - 0.5 * p * p)
}

/// `S_H` by the closed route.
pub fn schwarzian_h(f: &HarmonicMap, z: Complex64) -> Result<Complex64> {
    schwarzian_h_closed(f, z)
}

/// Largest `|S_H(f1) - S_H(f2)|` over the grid, closed route, and where it occurs.
pub fn schwarzian_h_deviation(f1: &HarmonicMap, f2: &HarmonicMap, grid: &Grid) -> Result<(f64, Complex64)> {
    max_over(grid, |z| Ok((schwarzian_h_closed(f1, z)? - schwarzian_h_closed(f2, z)?).norm()))
}

/// Largest `|f1(z) - f2(z)|` over the grid.
pub fn value_deviation(f1: &HarmonicMap, f2: &HarmonicMap, grid: &Grid) -> Result<f64> {
    Ok(max_over(grid, |z| Ok((f1.value(z)? - f2.value(z)?).norm()))?.0)
}

/// Largest deviation of the stored pairs, `max(|g1 - g2|, |h1 - h2|)`.
pub fn pair_deviation(f1: &HarmonicMap, f2: &HarmonicMap, grid: &Grid) -> Result<f64> {
    Ok(max_over(grid, |z| {
        let dg = (f1.g.value(z)? - f2.g.value(z)?).norm();
        let dh = (f1.h.value(z)? - f2.h.value(z)?).norm();
        Ok(dg.max(dh))
    })?
    .0)
}

/// `max |ω(z) - ω(0)|` over the grid.
pub fn dilatation_variation(f: &HarmonicMap, grid: &Grid) -> Result<f64> {
    let w0 = dilatation(f, ZERO)?.w;
    Ok(max_over(grid, |z| Ok((dilatation(f, z)?.w - w0).norm()))?.0)
}

/// `w ↦ a·conj(w) + b·w + c` with `|a| != |b|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
}

impl AffineMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        let (abs_a, abs_b) = (a.norm(), b.norm());
        if !((abs_a - abs_b).abs() >= 1e-10) || !c.is_finite() {
            return Err(Error::DegenerateAffine { abs_a, abs_b });
        }
        Ok(Self { a, b, c })
    }

    pub fn identity() -> Self {
        Self { a: ZERO, b: ONE, c: ZERO }
    }

    /// `w ↦ conj(w)`.
    pub fn conjugation() -> Self {
        Self { a: ONE, b: ZERO, c: ZERO }
    }

    pub fn coefficients(&self) -> [Complex64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        self.a * w.conj() + self.b * w + self.c
    }

    /// `A ∘ (conj(g) + h)` has parts `(conj(a)·h + conj(b)·g, a·g + b·h + c)`.
    pub fn as_pair_linear(&self) -> PairLinearMap {
        PairLinearMap {
            m: [[self.b.conj(), self.a.conj()], [self.a, self.b]],
            t: [ZERO, self.c],
        }
    }
}

/// Anti-analytic rotation `R_μ(f) = μ·conj(g) + h`, `|μ| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMu {
    mu: Complex64,
}

impl RotationMu {
    /// Renormalizes `mu` onto the unit circle.
    pub fn new(mu: Complex64) -> Result<Self> {
        let r = mu.norm();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::DegenerateRotation);
        }
        Ok(Self { mu: mu / r })
    }

    pub fn from_angle(theta: f64) -> Self {
        Self { mu: Complex64::from_polar(1.0, theta) }
    }

    pub fn identity() -> Self {
        Self { mu: ONE }
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    pub fn inverse(&self) -> Self {
        Self { mu: self.mu.conj() }
    }

    pub fn as_pair_linear(&self) -> PairLinearMap {
        PairLinearMap { m: [[self.mu.conj(), ZERO], [ZERO, ONE]], t: [ZERO, ZERO] }
    }
}

/// `(g, h) ↦ (m11·g + m12·h + t1, m21·g + m22·h + t2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLinearMap {
    m: [[Complex64; 2]; 2],
    t: [Complex64; 2],
}

impl PairLinearMap {
    pub fn new(m: [[Complex64; 2]; 2], t: [Complex64; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.norm() >= 1e-12) {
            return Err(Error::SingularPairMap { det: det.norm() });
        }
        Ok(Self { m, t })
    }

    pub fn identity() -> Self {
        Self { m: [[ONE, ZERO], [ZERO, ONE]], t: [ZERO, ZERO] }
    }

    /// The pair swap `(g, h) ↦ (h, g)`, i.e. `f ↦ conj(f)`.
    pub fn swap() -> Self {
        Self { m: [[ZERO, ONE], [ONE, ZERO]], t: [ZERO, ZERO] }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn translation(&self) -> [Complex64; 2] {
        self.t
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Acts on a pair of values (or of any analytic quantities sharing the
    /// translation, i.e. function values).
    pub fn apply_values(&self, g: Complex64, h: Complex64) -> (Complex64, Complex64) {
        let m = &self.m;
        (m[0][0] * g + m[0][1] * h + self.t[0], m[1][0] * g + m[1][1] * h + self.t[1])
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PairLinearMap) -> PairLinearMap {
        let (p, q) = (&self.m, &inner.m);
        let m = [
            [p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]],
            [p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]],
        ];
        let (t0, t1) = self.apply_values(inner.t[0], inner.t[1]);
        PairLinearMap { m, t: [t0, t1] }
    }

    pub fn inverse(&self) -> Result<PairLinearMap> {
        let det = self.det();
        if !(det.norm() >= 1e-12) {
            return Err(Error::SingularPairMap { det: det.norm() });
        }
        let m = &self.m;
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let t = [
            -(inv[0][0] * self.t[0] + inv[0][1] * self.t[1]),
            -(inv[1][0] * self.t[0] + inv[1][1] * self.t[1]),
        ];
        Ok(PairLinearMap { m: inv, t })
    }

    /// Same action on harmonic values with the translation moved entirely
    /// into the analytic part: `conj(g + t1) + h + t2 = conj(g) + h + (conj(t1) + t2)`.
    pub fn canonical(&self) -> PairLinearMap {
        PairLinearMap { m: self.m, t: [ZERO, self.t[1] + self.t[0].conj()] }
    }

    /// Largest entry-wise difference.
    pub fn distance(&self, other: &PairLinearMap) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
            d = d.max((self.t[i] - other.t[i]).norm());
        }
        d
    }

    fn apply_exprs(&self, g: &AnalyticExpr, h: &AnalyticExpr) -> (AnalyticExpr, AnalyticExpr) {
        let m = &self.m;
        (
            AnalyticExpr::linear_combination(m[0][0], g, m[0][1], h).shifted(self.t[0]),
            AnalyticExpr::linear_combination(m[1][0], g, m[1][1], h).shifted(self.t[1]),
        )
    }
}

fn transform_unchecked(m: &PairLinearMap, f: &HarmonicMap) -> HarmonicMap {
    let (g, h) = m.apply_exprs(&f.g, &f.h);
    HarmonicMap::from_parts_unchecked(g, h)
}

/// Applies a pair-linear map and re-validates local univalence on the grid.
pub fn apply_pair_linear(m: &PairLinearMap, f: &HarmonicMap) -> Result<HarmonicMap> {
    let out = transform_unchecked(m, f);
    out.orientation()?;
    Ok(out)
}

/// `A ∘ f`.
pub fn post_affine(a: &AffineMap, f: &HarmonicMap) -> HarmonicMap {
    transform_unchecked(&a.as_pair_linear(), f)
}

/// `R_μ(f) = μ·conj(g) + h`.
pub fn rotate_antianalytic(mu: &RotationMu, f: &HarmonicMap) -> HarmonicMap {
    transform_unchecked(&mu.as_pair_linear(), f)
}

/// `f ∘ φ` for an analytic self-map `φ` of the disk.
pub fn precompose(f: &HarmonicMap, phi: &AnalyticExpr) -> Result<HarmonicMap> {
    let grid = Grid::standard();
    for z in grid.iter() {
        let j = phi.eval_jet(z)?;
        if !(j.v().norm() < 1.0) {
            return Err(Error::RangeViolation { z, value: j.v() });
        }
        if !(j.d1().norm() >= CRITICAL_FLOOR) {
            return Err(Error::CriticalPoint { z, modulus: j.d1().norm() });
        }
    }
    HarmonicMap::new(f.g.compose(phi), f.h.compose(phi))
}

/// Splits a pair-linear map as `action(A) ∘ action(R_μ)`.
///
/// Any translation in the co-analytic slot is first moved to the analytic
/// one (see [`PairLinearMap::canonical`]); the phase of `conj(μ)` is read
/// from `m21/conj(m12)` (or `m11/conj(m22)` when `m12` vanishes).
pub fn factor_pair_linear(m: &PairLinearMap) -> Result<(AffineMap, RotationMu)> {
    let m = m.canonical();
    let [[m11, m12], [m21, m22]] = m.m;
    let a = m12.conj();
    let b = m22;
    let conj_mu = if a.norm() >= b.norm() { m21 / a } else { m11 / b.conj() };
    let scale = [m11, m12, m21, m22].iter().map(|x| x.norm()).fold(1.0, f64::max);
    let modulus_error = (conj_mu.norm() - 1.0).abs();
    if !conj_mu.is_finite() || !(modulus_error <= 1e-9) {
        return Err(Error::NotFactorable { residual: modulus_error });
    }
    let conj_mu = conj_mu / conj_mu.norm();
    let residual = (m11 - b.conj() * conj_mu).norm().max((m21 - a * conj_mu).norm()) / scale;
    if !(residual <= 1e-9) {
        return Err(Error::NotFactorable { residual });
    }
    let affine = AffineMap::new(a, b, m.t[1]).map_err(|_| Error::NotFactorable { residual: f64::INFINITY })?;
    Ok((affine, RotationMu { mu: conj_mu.conj() }))
}

/// Output of [`normalize_at`].
#[derive(Debug, Clone)]
pub struct Normalization {
    /// `f_w`, satisfying `h(0) = g(0) = 0`, `h'(0) = 1`, `ω(0) = 0`, `ω'(0) > 0`.
    pub map: HarmonicMap,
    /// `pair(f_w) = pair_map · pair(f ∘ φ_w)`.
    pub pair_map: PairLinearMap,
    pub automorphism: DiskAutomorphism,
}

/// Recentres `f` at `w` and normalizes it.
///
/// Steps, each tracked in the returned [`PairLinearMap`]:
/// 1. `f ∘ φ_w`, minus `(g(w), h(w))`, divided by `h'(w)(1 - |w|²)`;
/// 2. rotation by `h'(w)/conj(h'(w))`, so `h'(0) = 1` and `ω(0) = ω(w)`;
/// 3. the affine map `ζ ↦ (ζ - conj(α)·conj(ζ))/(1 - |α|²)`, `α = ω(w)`, which sends `ω(0)` to 0;
/// 4. a rotation making `ω'(0)` real and positive.
///
/// Orientation-reversing maps are conjugated first.
pub fn normalize_at(f: &HarmonicMap, w: Complex64) -> Result<Normalization> {
    let automorphism = DiskAutomorphism::new(w)?;
    let (jg, jh) = f.jets(w)?;
    let mut total = PairLinearMap::identity();
    let (jg, jh) = if jacobian_of_jets(&jg, &jh) < 0.0 {
        total = PairLinearMap::swap();
        (jh, jg)
    } else {
        (jg, jh)
    };
    let dh = jh.d1();
    if !(dh.norm() >= BASE_POINT_FLOOR) {
        return Err(Error::CriticalPoint { z: w, modulus: dh.norm() });
    }

    let recentred = precompose(&transform_unchecked(&total, f), &automorphism.as_expr())?;

    // Step 1.
    let k = dh * (1.0 - w.norm_sqr());
    let step1 = PairLinearMap {
        m: [[k.conj().inv(), ZERO], [ZERO, k.inv()]],
        t: [-jg.v() / k.conj(), -jh.v() / k],
    };
    let mut current = transform_unchecked(&step1, &recentred);
    total = step1.compose(&total);

    // Step 2.
    let rot = RotationMu::new(dh / dh.conj())?;
    current = rotate_antianalytic(&rot, &current);
    total = rot.as_pair_linear().compose(&total);

    // Step 3.
    let alpha = dilatation(&current, ZERO)?.w;
    let gap = 1.0 - alpha.norm_sqr();
    let kill = AffineMap::new(-alpha.conj() / gap, ONE / gap, ZERO)?;
    current = post_affine(&kill, &current);
    total = kill.as_pair_linear().compose(&total);

    // Step 4: R_μ multiplies ω by conj(μ), so μ = ω'(0)/|ω'(0)|.
    let slope = dilatation(&current, ZERO)?.w1;
    if !(slope.norm() >= BASE_POINT_FLOOR) {
        return Err(Error::DegenerateBasePoint { w });
    }
    let rot = RotationMu::new(slope)?;
    current = rotate_antianalytic(&rot, &current);
    total = rot.as_pair_linear().compose(&total);

    current.orientation()?;
    Ok(Normalization { map: current, pair_map: total, automorphism })
}

/// Residuals of the five normalization equalities at the origin:
/// `|h(0)|`, `|g(0)|`, `|h'(0) - 1|`, `|ω(0)|`, `|Im ω'(0)|`, plus `Re ω'(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationCheck {
    pub h0: f64,
    pub g0: f64,
    pub dh0: f64,
    pub omega0: f64,
    pub im_domega0: f64,
    pub re_domega0: f64,
}

impl NormalizationCheck {
    pub fn of(f: &HarmonicMap) -> Result<Self> {
        let (jg, jh) = f.jets(ZERO)?;
        let d = dilatation(f, ZERO)?;
        Ok(Self {
            h0: jh.v().norm(),
            g0: jg.v().norm(),
            dh0: (jh.d1() - 1.0).norm(),
            omega0: d.w.norm(),
            im_domega0: d.w1.im.abs(),
            re_domega0: d.w1.re,
        })
    }

    pub fn max_error(&self) -> f64 {
        [self.h0, self.g0, self.dh0, self.omega0, self.im_domega0].into_iter().fold(0.0, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_error() <= tol && self.re_domega0 > 0.0
    }
}
