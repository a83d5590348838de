//! Deciding `S_H(f1) = S_H(f2)` and reconstructing the connecting transformation.
//!
//! Two locally univalent harmonic maps have the same harmonic Schwarzian
//! exactly when
//!
//! * both dilatations are non-constant and `f2 = A ∘ R_μ ∘ f1` for an affine
//!   harmonic map `A` and an anti-analytic rotation `R_μ`; or
//! * both dilatations are constant, `f_i = α_i·conj(H_i) + H_i + γ_i` and
//!   `H2 = T ∘ H1` for a Möbius map `T`.
//!
//! [`check_equal_schwarzian`] decides which case applies and returns an
//! explicit witness. The `verify_*` functions evaluate the intermediate
//! identities that hold for pairs of normalized maps with equal `S_H`; they
//! are evaluated for whatever pair is passed in, so a pair with different
//! `S_H` shows up as a failing report rather than an error.

use num_complex::Complex64;

use crate::analytic::{recover_mobius, schwarzian, schwarzian_of_jet, DiskAutomorphism, Mobius};
use crate::error::{Error, Result};
use crate::grid::{max_over, Grid};
use crate::harmonic::{
    dilatation, dilatation_variation, factor_pair_linear, normalize_at, post_affine, precompose,
    rotate_antianalytic, schwarzian_h_closed, schwarzian_h_deviation, value_deviation, AffineMap,
    HarmonicMap, Normalization, NormalizationCheck, Orientation, RotationMu, CONSTANT_DILATATION_TOL,
    NORMALIZATION_TOL,
};
use crate::jets::Jet3;

/// Default tolerance on the grid deviation of two `S_H` fields.
pub const FIELD_TOL: f64 = 1e-7;

/// Default tolerance on witness residuals.
pub const WITNESS_TOL: f64 = 1e-8;

/// Tolerance of the identity suites.
pub const IDENTITY_TOL: f64 = 1e-7;

/// Tolerance on `|ω1'(0) - ω2'(0)|` for equal normalized pairs.
pub const SLOPE_TOL: f64 = 1e-9;

/// `|ω'(w)|` needed for `w` to be used as a base point.
pub const BASE_POINT_SLOPE_FLOOR: f64 = 1e-8;

/// Tolerance of the invariance suite (chain rule uses [`CHAIN_RULE_TOL`]).
pub const INVARIANCE_TOL: f64 = 1e-10;

pub const CHAIN_RULE_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DilatationClass {
    Constant(Complex64),
    NonConstant,
}

/// Constant iff `max |ω(z) - ω(0)| < 1e-9` over the grid.
pub fn classify_dilatation(f: &HarmonicMap, grid: &Grid) -> Result<DilatationClass> {
    if dilatation_variation(f, grid)? < CONSTANT_DILATATION_TOL {
        Ok(DilatationClass::Constant(dilatation(f, ZERO)?.w))
    } else {
        Ok(DilatationClass::NonConstant)
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub tol_field: f64,
    pub tol_witness: f64,
    pub grid: Grid,
    /// Base point for the normalization step; chosen by [`select_base_point`] when `None`.
    pub base_point: Option<Complex64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { tol_field: FIELD_TOL, tol_witness: WITNESS_TOL, grid: Grid::standard(), base_point: None }
    }
}

/// Grid summary of `|S_H(f1) - S_H(f2)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDiagnostics {
    pub max_deviation: f64,
    pub worst_point: Complex64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NotEqualReason {
    /// The `S_H` fields differ on the grid.
    FieldMismatch,
    /// One dilatation is constant and the other is not.
    DilatationClassMismatch,
    /// Normalized maps differ by this much on the grid.
    NormalizedMismatch(f64),
    /// Candidate witness leaves this residual.
    WitnessResidual(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    NotEqual(NotEqualReason),
    /// `f2 = affine ∘ R_mu ∘ f1`.
    EqualNonConstant { affine: AffineMap, mu: RotationMu, base_point: Complex64, residual: f64 },
    /// `f_i = α_i·conj(H_i) + H_i + γ_i` with `H2 = mobius ∘ H1`, where `H_i`
    /// is the analytic part of the orientation-preserving representative.
    EqualConstantFamily {
        mobius: Mobius,
        alpha1: Complex64,
        alpha2: Complex64,
        gamma1: Complex64,
        gamma2: Complex64,
        residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionResult {
    pub verdict: Verdict,
    pub diagnostics: FieldDiagnostics,
    /// Whether each input was conjugated to make it orientation-preserving.
    pub conjugated: [bool; 2],
}

impl ConnectionResult {
    pub fn is_equal(&self) -> bool {
        !matches!(self.verdict, Verdict::NotEqual(_))
    }
}

fn oriented(f: &HarmonicMap, grid: &Grid) -> Result<(HarmonicMap, bool)> {
    Ok(match f.orientation_on(grid)? {
        Orientation::Preserving => (f.clone(), false),
        Orientation::Reversing => (f.conjugate(), true),
    })
}

/// First of `0` and the grid points (by radius, then angle) where both
/// orientation-preserving representatives have `|ω'| ≥ 1e-8` and `h' ≠ 0`.
pub fn select_base_point(f1: &HarmonicMap, f2: &HarmonicMap, grid: &Grid) -> Result<Complex64> {
    let (f1, _) = oriented(f1, grid)?;
    let (f2, _) = oriented(f2, grid)?;
    let admissible = |w: Complex64| {
        [&f1, &f2].iter().all(|f| {
            dilatation(f, w).is_ok_and(|d| d.w1.norm() >= BASE_POINT_SLOPE_FLOOR)
        })
    };
    std::iter::once(ZERO)
        .chain(grid.iter())
        .find(|&w| admissible(w))
        .ok_or(Error::NoAdmissibleBasePoint)
}

/// Decides whether `S_H(f1) = S_H(f2)` and, if so, how the maps are related.
pub fn check_equal_schwarzian(f1: &HarmonicMap, f2: &HarmonicMap, opts: &CheckOptions) -> Result<ConnectionResult> {
    let grid = &opts.grid;
    let (g1, s1) = oriented(f1, grid)?;
    let (g2, s2) = oriented(f2, grid)?;
    let (max_deviation, worst_point) = schwarzian_h_deviation(&g1, &g2, grid)?;
    let diagnostics = FieldDiagnostics { max_deviation, worst_point, points: grid.len() };
    let done = |verdict| Ok(ConnectionResult { verdict, diagnostics, conjugated: [s1, s2] });

    if !(max_deviation <= opts.tol_field) {
        return done(Verdict::NotEqual(NotEqualReason::FieldMismatch));
    }
    match (classify_dilatation(&g1, grid)?, classify_dilatation(&g2, grid)?) {
        (DilatationClass::Constant(w1), DilatationClass::Constant(w2)) => {
            done(constant_family(&g1, &g2, w1, w2, opts)?)
        }
        (DilatationClass::NonConstant, DilatationClass::NonConstant) => {
            let w = match opts.base_point {
                Some(w) => w,
                None => select_base_point(f1, f2, grid)?,
            };
            done(connect_at(f1, f2, w, opts)?)
        }
        _ => done(Verdict::NotEqual(NotEqualReason::DilatationClassMismatch)),
    }
}

fn constant_family(
    f1: &HarmonicMap,
    f2: &HarmonicMap,
    w1: Complex64,
    w2: Complex64,
    opts: &CheckOptions,
) -> Result<Verdict> {
    let mobius = match recover_mobius(f2.h(), f1.h(), None, &opts.grid) {
        Ok(t) => t,
        Err(Error::NotEquivalent { residual }) => {
            return Ok(Verdict::NotEqual(NotEqualReason::WitnessResidual(residual)))
        }
        Err(e) => return Err(e),
    };
    // g = ω·h + k with k = g(0) - ω·h(0), so f = conj(ω)·conj(h) + h + conj(k).
    let gamma = |f: &HarmonicMap, w: Complex64| -> Result<Complex64> {
        Ok((f.g().value(ZERO)? - w * f.h().value(ZERO)?).conj())
    };
    let (alpha1, alpha2) = (w1.conj(), w2.conj());
    let (gamma1, gamma2) = (gamma(f1, w1)?, gamma(f2, w2)?);
    let (residual, _) = max_over(&opts.grid, |z| {
        let th = mobius.apply(f1.h().value(z)?)?;
        let rebuilt2 = alpha2 * th.conj() + th + gamma2;
        let h1 = f1.h().value(z)?;
        let rebuilt1 = alpha1 * h1.conj() + h1 + gamma1;
        Ok((f2.value(z)? - rebuilt2).norm().max((f1.value(z)? - rebuilt1).norm()))
    })?;
    if !(residual <= opts.tol_witness) {
        return Ok(Verdict::NotEqual(NotEqualReason::WitnessResidual(residual)));
    }
    Ok(Verdict::EqualConstantFamily { mobius, alpha1, alpha2, gamma1, gamma2, residual })
}

/// The non-constant branch at a fixed base point: normalize both maps at `w`,
/// compare, and read the witness off the normalization bookkeeping.
pub fn connect_at(f1: &HarmonicMap, f2: &HarmonicMap, w: Complex64, opts: &CheckOptions) -> Result<Verdict> {
    let n1 = normalize_at(f1, w)?;
    let n2 = normalize_at(f2, w)?;
    let deviation = crate::harmonic::pair_deviation(&n1.map, &n2.map, &opts.grid)?;
    if !(deviation <= opts.tol_witness) {
        return Ok(Verdict::NotEqual(NotEqualReason::NormalizedMismatch(deviation)));
    }
    // pair(F) = M_i · pair(f_i ∘ φ_w) and F1 = F2, so pair(f2) = M2⁻¹ M1 · pair(f1).
    let m = n2.pair_map.inverse()?.compose(&n1.pair_map);
    let (affine, mu) = factor_pair_linear(&m)?;
    let residual = witness_residual(f1, f2, &affine, &mu, &opts.grid)?;
    if !(residual <= opts.tol_witness) {
        return Ok(Verdict::NotEqual(NotEqualReason::WitnessResidual(residual)));
    }
    Ok(Verdict::EqualNonConstant { affine, mu, base_point: w, residual })
}

/// `max |f2 - A ∘ R_μ ∘ f1|` over the grid.
pub fn witness_residual(
    f1: &HarmonicMap,
    f2: &HarmonicMap,
    affine: &AffineMap,
    mu: &RotationMu,
    grid: &Grid,
) -> Result<f64> {
    value_deviation(&apply_witness(affine, mu, f1), f2, grid)
}

/// `A ∘ R_μ ∘ f`.
pub fn apply_witness(affine: &AffineMap, mu: &RotationMu, f: &HarmonicMap) -> HarmonicMap {
    post_affine(affine, &rotate_antianalytic(mu, f))
}

/// Normalizes both maps at the same base point (chosen by [`select_base_point`]
/// unless given).
pub fn normalize_pair(
    f1: &HarmonicMap,
    f2: &HarmonicMap,
    base_point: Option<Complex64>,
    grid: &Grid,
) -> Result<(Normalization, Normalization)> {
    let w = match base_point {
        Some(w) => w,
        None => select_base_point(f1, f2, grid)?,
    };
    Ok((normalize_at(f1, w)?, normalize_at(f2, w)?))
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    pub max_residual: f64,
    pub worst_point: Complex64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, (max_residual, worst_point): (f64, Complex64), tolerance: f64) -> Self {
        Self { name: name.into(), max_residual, worst_point, tolerance, pass: max_residual <= tolerance }
    }
}

/// Quantities shared by the identity suites for a normalized pair.
#[derive(Debug, Clone)]
pub struct NormalizedPairContext {
    f1: HarmonicMap,
    f2: HarmonicMap,
    /// `(h2''(0) - h1''(0))/2`
    pub a0: Complex64,
    /// `ω1'(0)`
    pub c1: Complex64,
    /// `ω2'(0)`
    pub c2: Complex64,
    /// `Φ1(0)` with `Φ = h''/h'·ω' - ω''`.
    pub big_phi1_0: Complex64,
    pub big_phi2_0: Complex64,
}

fn ensure_normalized(f: &HarmonicMap, which: &str) -> Result<()> {
    let check = NormalizationCheck::of(f)?;
    if check.holds(NORMALIZATION_TOL) {
        Ok(())
    } else {
        Err(Error::NotNormalized { detail: format!("{which}: {check:?}") })
    }
}

/// `Φ = h''/h'·ω' - ω''` at `z`.
fn big_phi(f: &HarmonicMap, z: Complex64) -> Result<Complex64> {
    let jh = f.h().eval_jet(z)?;
    let d = dilatation(f, z)?;
    Ok(jh.d2() / jh.d1() * d.w1 - d.w2)
}

impl NormalizedPairContext {
    pub fn new(f1: &HarmonicMap, f2: &HarmonicMap) -> Result<Self> {
        ensure_normalized(f1, "first map")?;
        ensure_normalized(f2, "second map")?;
        let h1 = f1.h().eval_jet(ZERO)?;
        let h2 = f2.h().eval_jet(ZERO)?;
        Ok(Self {
            f1: f1.clone(),
            f2: f2.clone(),
            a0: (h2.d2() - h1.d2()) / 2.0,
            c1: dilatation(f1, ZERO)?.w1,
            c2: dilatation(f2, ZERO)?.w1,
            big_phi1_0: big_phi(f1, ZERO)?,
            big_phi2_0: big_phi(f2, ZERO)?,
        })
    }

    /// Replaces `a0`; used to probe the sensitivity of the suites.
    pub fn with_a0(mut self, a0: Complex64) -> Self {
        self.a0 = a0;
        self
    }

    /// `δ(z) = ω1'(0)/2·conj(ω1(z)) - ω2'(0)/2·conj(ω2(z))`.
    pub fn delta(&self, z: Complex64) -> Result<Complex64> {
        let w1 = dilatation(&self.f1, z)?.w;
        let w2 = dilatation(&self.f2, z)?.w;
        Ok(self.c1 / 2.0 * w1.conj() - self.c2 / 2.0 * w2.conj())
    }

    fn values(&self, z: Complex64) -> Result<PairValues> {
        Ok(PairValues {
            g1: self.f1.g().value(z)?,
            g2: self.f2.g().value(z)?,
            h1: self.f1.h().value(z)?,
            h2: self.f2.h().value(z)?,
            w1: dilatation(&self.f1, z)?.w,
            w2: dilatation(&self.f2, z)?.w,
        })
    }

    /// `φ1, …, φ7` at `z`.
    fn phis(&self, v: &PairValues) -> [Complex64; 7] {
        let PairValues { g1, g2, h1, h2, .. } = *v;
        let (a0, c1, c2) = (self.a0, self.c1, self.c2);
        [
            g2 - a0 * h1 * g2 - c2 / 2.0 * h1 * h2,
            c2 / 2.0 * h1 * g2,
            c1 / 2.0 * g1 * g2,
            -c2 / 2.0 * g1 * g2,
            a0 * g1 * g2 - c1 / 2.0 * h1 * g2 + c2 / 2.0 * g1 * h2,
            -c1 / 2.0 * g1 * h2,
            c1 / 2.0 * h1 * h2 - a0 * g1 * h2 - g1,
        ]
    }
}

#[derive(Debug, Clone, Copy)]
struct PairValues {
    g1: Complex64,
    g2: Complex64,
    h1: Complex64,
    h2: Complex64,
    w1: Complex64,
    w2: Complex64,
}

/// Three reports for normalized pairs with equal `S_H`:
/// `S(h1) = S(h2)`; `ω1'(0)·Φ1 = ω2'(0)·Φ2`; and
/// `conj(Φ1(0))·ω1 - (3/2)·ω1'(0)²·ω1² = conj(Φ2(0))·ω2 - (3/2)·ω2'(0)²·ω2²`.
pub fn verify_prop31(f1: &HarmonicMap, f2: &HarmonicMap, grid: &Grid) -> Result<Vec<IdentityReport>> {
    let ctx = NormalizedPairContext::new(f1, f2)?;
    let schwarzians = max_over(grid, |z| Ok((schwarzian(f1.h(), z)? - schwarzian(f2.h(), z)?).norm()))?;
    let weighted = max_over(grid, |z| Ok((ctx.c1 * big_phi(f1, z)? - ctx.c2 * big_phi(f2, z)?).norm()))?;
    let quadratic = max_over(grid, |z| {
        let side = |phi0: Complex64, c: Complex64, w: Complex64| phi0.conj() * w - 1.5 * c * c * w * w;
        let w1 = dilatation(f1, z)?.w;
        let w2 = dilatation(f2, z)?.w;
        Ok((side(ctx.big_phi1_0, ctx.c1, w1) - side(ctx.big_phi2_0, ctx.c2, w2)).norm())
    })?;
    Ok(vec![
        IdentityReport::new("analytic-schwarzians", schwarzians, IDENTITY_TOL),
        IdentityReport::new("weighted-phi", weighted, IDENTITY_TOL),
        IdentityReport::new("phi-at-origin", quadratic, IDENTITY_TOL),
    ])
}

/// `S(h1 - conj(ω1(w))·g1) = S(h2 - conj(ω2(w))·g2)` for every sampled `w`, on the grid.
pub fn verify_thm33(f1: &HarmonicMap, f2: &HarmonicMap, w_samples: &[Complex64], grid: &Grid) -> Result<IdentityReport> {
    NormalizedPairContext::new(f1, f2)?;
    let frozen = |f: &HarmonicMap, k: Complex64, z: Complex64| -> Result<Complex64> {
        let (jg, jh): (Jet3, Jet3) = f.jets(z)?;
        schwarzian_of_jet(&(jh - jg.scale(k)), z)
    };
    let mut worst = (0.0, ZERO);
    for &w in w_samples {
        let k1 = dilatation(f1, w)?.w.conj();
        let k2 = dilatation(f2, w)?.w.conj();
        let here = max_over(grid, |z| Ok((frozen(f1, k1, z)? - frozen(f2, k2, z)?).norm()))?;
        if here.0 > worst.0 || here.0.is_nan() {
            worst = here;
        }
    }
    Ok(IdentityReport::new("frozen-dilatation-schwarzians", worst, IDENTITY_TOL))
}

/// `Γ1 = Γ2/(1 + (a0 + δ)·Γ2)` with `Γ_i = h_i - conj(ω_i)·g_i`, and its
/// value at `ω = 0`: `h1 = h2/(1 + a0·h2)`.
pub fn verify_corollary(f1: &HarmonicMap, f2: &HarmonicMap, grid: &Grid) -> Result<Vec<IdentityReport>> {
    let ctx = NormalizedPairContext::new(f1, f2)?;
    verify_corollary_with(&ctx, grid)
}

pub fn verify_corollary_with(ctx: &NormalizedPairContext, grid: &Grid) -> Result<Vec<IdentityReport>> {
    let gammas = max_over(grid, |z| {
        let v = ctx.values(z)?;
        let gamma1 = v.h1 - v.w1.conj() * v.g1;
        let gamma2 = v.h2 - v.w2.conj() * v.g2;
        let k = ctx.a0 + ctx.delta(z)?;
        Ok((gamma1 - gamma2 / (1.0 + k * gamma2)).norm())
    })?;
    let analytic = max_over(grid, |z| {
        let v = ctx.values(z)?;
        Ok((v.h1 - v.h2 / (1.0 + ctx.a0 * v.h2)).norm())
    })?;
    Ok(vec![
        IdentityReport::new("frozen-mobius-relation", gammas, IDENTITY_TOL),
        IdentityReport::new("analytic-mobius-relation", analytic, IDENTITY_TOL),
    ])
}

/// `0 = Σ φ_i·conj(B_i)` over the grid.
pub fn verify_phi_identity(f1: &HarmonicMap, f2: &HarmonicMap, grid: &Grid) -> Result<IdentityReport> {
    for f in [f1, f2] {
        if let DilatationClass::Constant(_) = classify_dilatation(f, grid)? {
            return Err(Error::ConstantDilatation);
        }
    }
    let ctx = NormalizedPairContext::new(f1, f2)?;
    verify_phi_identity_with(&ctx, grid)
}

pub fn verify_phi_identity_with(ctx: &NormalizedPairContext, grid: &Grid) -> Result<IdentityReport> {
    let worst = max_over(grid, |z| {
        let v = ctx.values(z)?;
        let (w1, w2) = (v.w1, v.w2);
        let b = [w2, w2 * w2, w1 * w1 * w2, w1 * w2 * w2, w1 * w2, w1 * w1, w1];
        let phis = ctx.phis(&v);
        Ok(phis.iter().zip(b).map(|(p, b)| p * b.conj()).sum::<Complex64>().norm())
    })?;
    Ok(IdentityReport::new("phi-b-relation", worst, IDENTITY_TOL))
}

/// Radii used to extrapolate `φ1(r)/r³` to `r = 0`.
pub const LIMIT_RADII: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `g'''(0) = ω''(0) + 2ω'(0)h''(0)` for each map, and
/// `lim φ1(z)/z³ = -Φ2(0)/6` by Richardson extrapolation along the real axis.
pub fn verify_phi_lemma_limits(f1: &HarmonicMap, f2: &HarmonicMap) -> Result<Vec<IdentityReport>> {
    let ctx = NormalizedPairContext::new(f1, f2)?;
    verify_phi_lemma_limits_with(&ctx)
}

pub fn verify_phi_lemma_limits_with(ctx: &NormalizedPairContext) -> Result<Vec<IdentityReport>> {
    let mut third = (0.0, ZERO);
    for f in [&ctx.f1, &ctx.f2] {
        let jg = f.g().eval_jet(ZERO)?;
        let jh = f.h().eval_jet(ZERO)?;
        let d = dilatation(f, ZERO)?;
        third.0 = f64::max(third.0, (jg.d3() - (d.w2 + 2.0 * d.w1 * jh.d2())).norm());
    }
    let ratio = |r: f64| -> Result<Complex64> {
        let z = Complex64::new(r, 0.0);
        Ok(ctx.phis(&ctx.values(z)?)[0] / (z * z * z))
    };
    // Even part in r: E(r) = L + A·r² + B·r⁴ + …
    let even = |r: f64| -> Result<Complex64> { Ok((ratio(r)? + ratio(-r)?) / 2.0) };
    let [r0, r1, r2] = LIMIT_RADII;
    let (e0, e1, e2) = (even(r0)?, even(r1)?, even(r2)?);
    let q = (r0 / r1).powi(2);
    let first0 = (q * e1 - e0) / (q - 1.0);
    let first1 = (q * e2 - e1) / (q - 1.0);
    let limit = (q * q * first1 - first0) / (q * q - 1.0);
    let target = -ctx.big_phi2_0 / 6.0;
    Ok(vec![
        IdentityReport::new("coanalytic-third-derivative", third, IDENTITY_TOL),
        IdentityReport::new("phi1-cubic-limit", ((limit - target).norm(), ZERO), IDENTITY_TOL),
    ])
}

/// `|ω1'(0) - ω2'(0)|` for a normalized pair.
pub fn verify_slopes(f1: &HarmonicMap, f2: &HarmonicMap) -> Result<IdentityReport> {
    let ctx = NormalizedPairContext::new(f1, f2)?;
    Ok(IdentityReport::new("dilatation-slopes", ((ctx.c1 - ctx.c2).norm(), ZERO), SLOPE_TOL))
}

/// Transformations used by [`verify_invariance`].
#[derive(Debug, Clone)]
pub struct InvarianceSamples {
    pub affines: Vec<AffineMap>,
    pub rotations: Vec<RotationMu>,
    pub automorphisms: Vec<DiskAutomorphism>,
}

impl InvarianceSamples {
    /// A deterministic spread of parameters (golden-angle phases, `|a| ≤ 0.6 < |b|`).
    pub fn standard() -> Self {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let phase = |k: usize| Complex64::from_polar(1.0, golden * k as f64);
        let affines = (0..20)
            .map(|k| {
                let a = phase(k) * (0.6 * (k as f64 + 0.5) / 20.0);
                let b = phase(3 * k + 1) * (1.0 + 0.05 * k as f64);
                AffineMap::new(a, b, phase(5 * k + 2) * 0.5).expect("|a| < |b|")
            })
            .collect();
        let rotations = (0..8).map(|k| RotationMu::from_angle(golden * (k + 1) as f64)).collect();
        let automorphisms = (0..5)
            .map(|k| DiskAutomorphism::new(phase(7 * k + 3) * (0.1 * (k + 1) as f64)).expect("inside the disk"))
            .collect();
        Self { affines, rotations, automorphisms }
    }
}

/// `S_H` invariance under affine maps, rotations and conjugation, and the
/// chain rule under disk automorphisms.
pub fn verify_invariance(f: &HarmonicMap, samples: &InvarianceSamples, grid: &Grid) -> Result<Vec<IdentityReport>> {
    let base: Vec<Complex64> = grid.iter().map(|z| schwarzian_h_closed(f, z)).collect::<Result<_>>()?;
    let field_deviation = |g: &HarmonicMap| -> Result<(f64, Complex64)> {
        let mut worst = (0.0, ZERO);
        for (z, s) in grid.iter().zip(&base) {
            let d = (schwarzian_h_closed(g, z)? - s).norm();
            if d > worst.0 || d.is_nan() {
                worst = (d, z);
            }
        }
        Ok(worst)
    };
    let worst_of = |items: Vec<(f64, Complex64)>| {
        items.into_iter().fold((0.0, ZERO), |acc, x| if x.0 > acc.0 || x.0.is_nan() { x } else { acc })
    };

    let affine = worst_of(samples.affines.iter().map(|a| field_deviation(&post_affine(a, f))).collect::<Result<_>>()?);
    let rotation = worst_of(
        samples.rotations.iter().map(|m| field_deviation(&rotate_antianalytic(m, f))).collect::<Result<_>>()?,
    );
    let conjugation = field_deviation(&f.conjugate())?;
    let mut chain = Vec::new();
    for phi in &samples.automorphisms {
        let composed = precompose(f, &phi.as_expr())?;
        let mobius = phi.as_mobius();
        chain.push(max_over(grid, |z| {
            let pj = mobius.jet_at(z)?;
            let expected = schwarzian_h_closed(f, pj.v())? * pj.d1() * pj.d1() + schwarzian_of_jet(&pj, z)?;
            Ok((schwarzian_h_closed(&composed, z)? - expected).norm())
        })?);
    }
    Ok(vec![
        IdentityReport::new("affine-invariance", affine, INVARIANCE_TOL),
        IdentityReport::new("rotation-invariance", rotation, INVARIANCE_TOL),
        IdentityReport::new("conjugation-invariance", conjugation, INVARIANCE_TOL),
        IdentityReport::new("automorphism-chain-rule", worst_of(chain), CHAIN_RULE_TOL),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::AnalyticExpr;
    use crate::corpus;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> Grid {
        Grid::standard()
    }

    #[test]
    fn classify_examples() {
        let h = AnalyticExpr::real_polynomial(&[0.0, 1.0, 0.0, 0.1]);
        let f = HarmonicMap::new(h.scaled(c(0.3, 0.0)), h.clone()).unwrap();
        match classify_dilatation(&f, &grid()).unwrap() {
            DilatationClass::Constant(w) => assert!((w - c(0.3, 0.0)).norm() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(classify_dilatation(&corpus::omega_z(), &grid()).unwrap(), DilatationClass::NonConstant);
        // A 1e-12 non-constant perturbation stays below the threshold.
        let g = h.scaled(c(0.3, 0.0)) + AnalyticExpr::real_polynomial(&[0.0, 0.0, 1e-12]);
        let f = HarmonicMap::new(g, h).unwrap();
        assert!(matches!(classify_dilatation(&f, &grid()).unwrap(), DilatationClass::Constant(_)));
    }

    #[test]
    fn identical_maps_are_equal_with_identity_witness() {
        let f = corpus::omega_z();
        let r = check_equal_schwarzian(&f, &f, &CheckOptions::default()).unwrap();
        match r.verdict {
            Verdict::EqualNonConstant { affine, mu, residual, .. } => {
                let [a, b, cc] = affine.coefficients();
                assert!(a.norm() < 1e-12 && (b - 1.0).norm() < 1e-12 && cc.norm() < 1e-12);
                assert!((mu.mu() - 1.0).norm() < 1e-12);
                assert!(residual < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn witness_pair_is_recovered() {
        let f1 = corpus::omega_z();
        let f2 = corpus::by_name("witness-omega-z").unwrap();
        let r = check_equal_schwarzian(&f1, &f2, &CheckOptions::default()).unwrap();
        match r.verdict {
            Verdict::EqualNonConstant { affine, mu, residual, .. } => {
                assert!(residual <= 1e-8);
                let rebuilt = apply_witness(&affine, &mu, &f1);
                let target = apply_witness(&corpus::witness_affine(), &corpus::witness_rotation(), &f1);
                assert!(value_deviation(&rebuilt, &target, &grid()).unwrap() < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn different_dilatations_are_separated() {
        let r = check_equal_schwarzian(&corpus::omega_z(), &corpus::omega_z2(), &CheckOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NotEqual(NotEqualReason::FieldMismatch));
        assert!(r.diagnostics.max_deviation > 1e-3);
        let z = r.diagnostics.worst_point;
        let d = (schwarzian_h_closed(&corpus::omega_z(), z).unwrap()
            - schwarzian_h_closed(&corpus::omega_z2(), z).unwrap())
        .norm();
        assert_eq!(d, r.diagnostics.max_deviation);
    }

    #[test]
    fn mixed_classes_are_not_equal() {
        let f1 = HarmonicMap::analytic(AnalyticExpr::Identity).unwrap();
        let f2 = corpus::omega_z();
        let r = check_equal_schwarzian(&f1, &f2, &CheckOptions::default()).unwrap();
        assert!(!r.is_equal());
    }

    #[test]
    fn constant_family_recovers_mobius() {
        let h = AnalyticExpr::Exp;
        let t = Mobius::new(c(1.0, 0.2), c(0.1, 0.0), c(0.1, -0.05), c(1.0, 0.0)).unwrap();
        let th = AnalyticExpr::Mobius(t).compose(&h);
        let (a1, a2, g1, g2) = (c(0.2, 0.1), c(-0.3, 0.0), c(0.5, 0.5), c(-1.0, 0.2));
        let f1 = HarmonicMap::new(h.scaled(a1.conj()).shifted(g1.conj()), h).unwrap();
        let f2 = HarmonicMap::new(th.scaled(a2.conj()).shifted(g2.conj()), th).unwrap();
        let r = check_equal_schwarzian(&f1, &f2, &CheckOptions::default()).unwrap();
        match r.verdict {
            Verdict::EqualConstantFamily { mobius, alpha1, alpha2, gamma1, gamma2, residual } => {
                assert!(mobius.projective_distance(&t) < 1e-8);
                assert!((alpha1 - a1).norm() < 1e-12 && (alpha2 - a2).norm() < 1e-12);
                assert!((gamma1 - g1).norm() < 1e-12 && (gamma2 - g2).norm() < 1e-12);
                assert!(residual < 1e-8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn orientation_reversing_inputs_are_connected() {
        let f1 = corpus::omega_z();
        let f2 = f1.conjugate();
        let r = check_equal_schwarzian(&f1, &f2, &CheckOptions::default()).unwrap();
        assert_eq!(r.conjugated, [false, true]);
        match r.verdict {
            Verdict::EqualNonConstant { affine, mu, .. } => {
                assert!(witness_residual(&f1, &f2, &affine, &mu, &grid()).unwrap() < 1e-10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn base_point_selection_skips_critical_dilatation() {
        let f = corpus::omega_z2();
        let w = select_base_point(&f, &f, &grid()).unwrap();
        assert_eq!(w, grid().points()[0]);
        let f = HarmonicMap::analytic(AnalyticExpr::Exp).unwrap();
        assert_eq!(select_base_point(&f, &f, &grid()), Err(Error::NoAdmissibleBasePoint));
    }

    fn normalized_equal_pair() -> (HarmonicMap, HarmonicMap) {
        let f1 = corpus::by_name("omega-poly").unwrap();
        let f2 = apply_witness(&corpus::witness_affine(), &corpus::witness_rotation(), &f1);
        let (n1, n2) = normalize_pair(&f1, &f2, Some(c(0.2, -0.1)), &grid()).unwrap();
        (n1.map, n2.map)
    }

    fn perturbed(f: &HarmonicMap) -> HarmonicMap {
        HarmonicMap::new(f.g().clone(), f.h().clone() + AnalyticExpr::real_polynomial(&[0.0, 0.0, 1e-3])).unwrap()
    }

    #[test]
    fn identity_suites_on_equal_pairs() {
        let (f1, f2) = normalized_equal_pair();
        let samples = [c(0.0, 0.0), c(0.3, 0.1), c(-0.5, 0.2)];
        let mut reports = verify_prop31(&f1, &f2, &grid()).unwrap();
        reports.push(verify_thm33(&f1, &f2, &samples, &grid()).unwrap());
        reports.extend(verify_corollary(&f1, &f2, &grid()).unwrap());
        reports.push(verify_phi_identity(&f1, &f2, &grid()).unwrap());
        reports.extend(verify_phi_lemma_limits(&f1, &f2).unwrap());
        reports.push(verify_slopes(&f1, &f2).unwrap());
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
        assert_eq!(reports.len(), 10);
    }

    #[test]
    fn identity_suites_detect_perturbation() {
        let (f1, f2) = normalized_equal_pair();
        let p = perturbed(&f2);
        assert!(verify_prop31(&f1, &p, &grid()).unwrap().iter().any(|r| r.max_residual > 1e-5));
        assert!(!verify_thm33(&f1, &p, &[c(0.0, 0.0)], &grid()).unwrap().pass);
        assert!(verify_corollary(&f1, &p, &grid()).unwrap().iter().all(|r| !r.pass));
        assert!(verify_phi_identity(&f1, &p, &grid()).unwrap().max_residual > 1e-4);
        let ctx = NormalizedPairContext::new(&f1, &f2).unwrap();
        let shifted = ctx.clone().with_a0(ctx.a0 + 1e-3);
        assert!(verify_phi_lemma_limits_with(&shifted).unwrap().iter().any(|r| !r.pass));
    }

    #[test]
    fn identity_suites_on_self_pairs_vanish() {
        let f = normalize_at(&corpus::omega_z(), c(0.0, 0.0)).unwrap().map;
        let ctx = NormalizedPairContext::new(&f, &f).unwrap();
        assert_eq!(ctx.a0, c(0.0, 0.0));
        assert_eq!(ctx.delta(c(0.4, 0.3)).unwrap(), c(0.0, 0.0));
        for r in verify_prop31(&f, &f, &grid()).unwrap() {
            assert!(r.max_residual < 1e-15, "{r:?}");
        }
        assert!(verify_phi_identity(&f, &f, &grid()).unwrap().max_residual < 1e-15);
        // g''' = ω'' + 2ω'h'' reads 0 = 0 for h = z, g = z²/2.
        assert!(verify_phi_lemma_limits(&f, &f).unwrap()[0].max_residual < 1e-15);
    }

    #[test]
    fn limit_relation_for_polynomial_pair() {
        // h = z + z²/2, ω = z.
        let f = HarmonicMap::from_dilatation(&[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let reports = verify_phi_lemma_limits(&f, &f).unwrap();
        assert!(reports[0].max_residual < 1e-15);
        assert!(reports[1].max_residual < 1e-6, "{:?}", reports[1]);
    }

    #[test]
    fn suites_require_normalization() {
        let f = corpus::by_name("omega-poly").unwrap();
        let g = AnalyticExpr::real_polynomial(&[0.0, 0.0, 0.5]);
        let shifted = HarmonicMap::new(g, AnalyticExpr::real_polynomial(&[0.1, 1.0])).unwrap();
        assert!(matches!(verify_prop31(&shifted, &shifted, &grid()), Err(Error::NotNormalized { .. })));
        let analytic = HarmonicMap::analytic(AnalyticExpr::Identity).unwrap();
        assert_eq!(verify_phi_identity(&analytic, &f, &grid()), Err(Error::ConstantDilatation));
    }

    #[test]
    fn invariance_suite_passes_on_corpus_sample() {
        let samples = InvarianceSamples::standard();
        for name in ["omega-z", "analytic-exp"] {
            let f = corpus::by_name(name).unwrap();
            for r in verify_invariance(&f, &samples, &grid()).unwrap() {
                assert!(r.pass, "{name}: {r:?}");
            }
        }
    }
}
