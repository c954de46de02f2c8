//! Zero-curvature planes of the Wilking metric on `E_{p,q}` with
//! `p = (0, 0, q1 + q2 + q3)`.
//!
//! The metric is the quotient of `(G x G, g_t + g_t)` by the diagonal and the
//! circle. A generator `X` lifts to `(-phi^{-1} Ad_{A^{-1}} X, phi^{-1} X)`.
//! Every orbit of `U(2) x T^2` meets the two-parameter family `A(theta, alpha)`,
//! and on that family the existence of a flat plane reduces to the two scalar
//! equations `|k11|^2 = g(theta)` and `|sin(a) k11 - cos(a) conj(k12)|^2 = h(theta)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Matrix2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{zero_criterion_residuals, CurvatureEngine, TwoPlane};
use crate::error::{DomainFlag, Error, Result};
use crate::eschenburg::f_a;
use crate::su3::{
    self, adjoint, c, doubled_normal, inner0, phi, phi_inv, KElement, Mat3, Su3Point, Su3Vector,
    ZVector, C64,
};
use crate::tolerance::Tolerances;
use crate::triples::{wilking_candidate_filter, wilking_pair, CandidateReport, CandidateVerdict, PQPair, Triple};

/// Relative size below which a denominator counts as zero.
const DOMAIN_EPS: f64 = 1e-12;
/// Margin kept from the domain singularities when searching for witnesses.
const WITNESS_MARGIN: f64 = 1e-6;
/// Bisection tolerance on the `h` equation.
const HEQN_TOL: f64 = 1e-12;
/// Largest halving exponent tried by the witness search.
const MAX_HALVINGS: u32 = 40;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

// ---- doubled vectors and horizontality ----

/// The lift of a generator `X` at the base point `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubledVector {
    pub left: Su3Vector,
    pub right: Su3Vector,
}

impl DoubledVector {
    /// `(-phi^{-1}(Ad_{A^{-1}} X), phi^{-1}(X))`.
    pub fn lift(base: &Su3Point, x: &Su3Vector, t: f64) -> Result<Self> {
        let left = -phi_inv(&adjoint(&base.inverse(), x), t)?;
        Ok(DoubledVector {
            left,
            right: phi_inv(x, t)?,
        })
    }

    /// The generator, `phi(right)`.
    pub fn generator(&self, t: f64) -> Result<Su3Vector> {
        phi(&self.right, t)
    }

    /// `|Ad_{A^{-1}} phi(right) + phi(left)|_0`, zero for a genuine lift.
    pub fn reconstruction_defect(&self, base: &Su3Point, t: f64) -> Result<f64> {
        let x = phi(&self.right, t)?;
        Ok((adjoint(&base.inverse(), &x) + phi(&self.left, t)?).norm0())
    }
}

/// `<X, Ad_A(iP) - iQ>_0`; the lift of `X` at `A` is horizontal iff this vanishes.
pub fn horizontal_test(a: &Su3Point, pair: &PQPair, x: &Su3Vector) -> f64 {
    inner0(x, &doubled_normal(a, pair))
}

// ---- conditions A, B, C ----

/// `sum_j |(Ak)_j1|^2 p_j - |k11|^2 q1 - |k21|^2 q2`.
pub fn condition_a(a: &Su3Point, pair: &PQPair, k: &KElement) -> f64 {
    f_a(a, pair, k)
}

/// `<Ad_k Z, Ad_{A^{-1}}(iP) - iQ>_0`.
pub fn condition_b(a: &Su3Point, pair: &PQPair, k: &KElement, z: &ZVector) -> Result<f64> {
    if z.is_zero() {
        return Err(Error::ZeroZ);
    }
    Ok(horizontal_test(&a.inverse(), pair, &adjoint(k.point(), &z.materialize())))
}

/// `((X)_13, (X)_23)`, which determine the `p`-part of `X`.
pub fn p_entries(x: &Su3Vector) -> [C64; 2] {
    [x.entry(0, 2), x.entry(1, 2)]
}

/// `(Ad_{Ak} Y1)_p` and `(Ad_{Ak} Z)_p` as pairs of complex entries.
pub fn condition_c_parts(a: &Su3Point, k: &KElement, z: &ZVector) -> ([C64; 2], [C64; 2]) {
    let ak = a.mul(k.point());
    (
        p_entries(&adjoint(&ak, &su3::y1())),
        p_entries(&adjoint(&ak, &z.materialize())),
    )
}

/// Modulus of the complex determinant of the two `p`-parts.
pub fn condition_c(a: &Su3Point, k: &KElement, z: &ZVector) -> Result<f64> {
    if z.is_zero() {
        return Err(Error::ZeroZ);
    }
    let (u, w) = condition_c_parts(a, k, z);
    Ok((u[0] * w[1] - u[1] * w[0]).norm())
}

/// `max |(Ad_{Ak} Y1)_p - (Ad_{Ak} Z)_p|` over the two entries.
pub fn condition_c_equality(a: &Su3Point, k: &KElement, z: &ZVector) -> Result<f64> {
    if z.is_zero() {
        return Err(Error::ZeroZ);
    }
    let (u, w) = condition_c_parts(a, k, z);
    Ok((u[0] - w[0]).norm().max((u[1] - w[1]).norm()))
}

// ---- the family A(theta, alpha) ----

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FPoint {
    pub theta: f64,
    pub alpha: f64,
}

impl FPoint {
    pub fn new(theta: f64, alpha: f64) -> Self {
        FPoint { theta, alpha }
    }

    /// Rows `(ca, -sa, 0)`, `(ct sa, ct ca, -st)`, `(st sa, st ca, ct)`.
    pub fn materialize(&self) -> Su3Point {
        let (st, ct) = self.theta.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        let r = |x: f64| c(x, 0.0);
        let m = Mat3::new(
            r(ca),
            r(-sa),
            r(0.0),
            r(ct * sa),
            r(ct * ca),
            r(-st),
            r(st * sa),
            r(st * ca),
            r(ct),
        );
        Su3Point::new(m).expect("A(theta, alpha) is special orthogonal")
    }
}

/// `(|a31|, |a32|, |a33|)`, a complete invariant of the `U(2) x T^2` orbit.
pub fn orbit_invariants(a: &Su3Point) -> [f64; 3] {
    [a.entry(2, 0).norm(), a.entry(2, 1).norm(), a.entry(2, 2).norm()]
}

/// The point of the family in the orbit of `A`, with `theta, alpha` in `[0, pi/2]`.
pub fn canonical_fpoint(a: &Su3Point) -> FPoint {
    let [x, y, z] = orbit_invariants(a);
    let theta = z.min(1.0).acos();
    let alpha = if x == 0.0 && y == 0.0 { 0.0 } else { x.atan2(y) };
    FPoint { theta, alpha }
}

/// `u A t` for `u` in `U(2)` and `t` in the diagonal torus.
pub fn orbit_translate(a: &Su3Point, u: &KElement, t: &Su3Point) -> Su3Point {
    u.point().mul(a).mul(t)
}

// ---- h, g and their identities ----

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainFlags {
    pub sin_theta_zero: bool,
    pub plus_zero: bool,
    pub minus_zero: bool,
}

impl DomainFlags {
    pub fn clear(&self) -> bool {
        !(self.sin_theta_zero || self.plus_zero || self.minus_zero)
    }

    /// The first violated flag, in the order `sin`, `+`, `-`.
    pub fn first(&self) -> Option<DomainFlag> {
        if self.sin_theta_zero {
            Some(DomainFlag::SinThetaZero)
        } else if self.plus_zero {
            Some(DomainFlag::DenominatorPlusZero)
        } else if self.minus_zero {
            Some(DomainFlag::DenominatorMinusZero)
        } else {
            None
        }
    }
}

/// `h`, `g`, `beta` and the closed-form derivatives at one angle.
///
/// `h` and `h'` are absent where `sin(theta) = 0`; `g` and `beta` are
/// defined there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HGValues {
    pub theta: f64,
    pub q: Triple,
    pub h: Option<f64>,
    pub g: f64,
    pub beta: f64,
    pub dh: Option<f64>,
    pub dg: f64,
    pub flags: DomainFlags,
}

impl HGValues {
    /// Both `h` and `g` strictly inside `(0, 1)`.
    pub fn in_unit_box(&self) -> bool {
        matches!(self.h, Some(h) if h > 0.0 && h < 1.0) && self.g > 0.0 && self.g < 1.0
    }
}

fn p3_of(q: Triple) -> f64 {
    (q[0] + q[1] + q[2]) as f64
}

fn domain_scale(q: Triple) -> f64 {
    1f64.max(p3_of(q).abs() + (q[2] as f64).abs())
}

pub fn domain_flags(theta: f64, q: Triple) -> DomainFlags {
    let (s, co) = theta.sin_cos();
    let (p3, q3) = (p3_of(q), q[2] as f64);
    let scale = domain_scale(q);
    DomainFlags {
        sin_theta_zero: s.abs() < DOMAIN_EPS,
        plus_zero: (p3 * co * co + q3).abs() < DOMAIN_EPS * scale,
        minus_zero: (p3 * co * co - q3).abs() < DOMAIN_EPS * scale,
    }
}

pub fn hg_values(theta: f64, q: Triple) -> Result<HGValues> {
    if q[0] == q[1] {
        return Err(Error::Domain(DomainFlag::EqualQ1Q2));
    }
    let flags = domain_flags(theta, q);
    if flags.plus_zero {
        return Err(Error::Domain(DomainFlag::DenominatorPlusZero));
    }
    let (s, co) = theta.sin_cos();
    let (s2, c2) = (s * s, co * co);
    let (q1, q2, q3) = (q[0] as f64, q[1] as f64, q[2] as f64);
    let p3 = p3_of(q);
    let plus = p3 * c2 + q3;
    let d12 = q1 - q2;
    let g = (p3 * q1 * c2 + p3 * q3 * s2 - q2 * q3) / (d12 * plus);
    let dg = 4.0 * p3 * q3 * q3 * s * co / (d12 * plus * plus);
    let beta = -2.0 * p3 * c2 / plus;
    let (h, dh) = if flags.sin_theta_zero {
        (None, None)
    } else {
        let h = ((p3 - q3) * c2 + q3 * s2) / (s2 * plus);
        let dh = -2.0 * s * co * (p3 * p3 * c2 * c2 + 2.0 * p3 * q3 * s2 * c2 - q3 * q3)
            / (s2 * s2 * plus * plus);
        (Some(h), Some(dh))
    };
    Ok(HGValues {
        theta,
        q,
        h,
        g,
        beta,
        dh,
        dg,
        flags,
    })
}

fn hg_strict(theta: f64, q: Triple) -> Result<(f64, f64, HGValues)> {
    let v = hg_values(theta, q)?;
    if let Some(flag) = v.flags.first() {
        return Err(Error::Domain(flag));
    }
    Ok((v.h.expect("sin(theta) != 0"), v.g, v))
}

/// `h'` and `g'` by the quotient rule applied to the defining fractions.
pub fn quotient_rule_derivatives(theta: f64, q: Triple) -> (f64, f64) {
    let (s, co) = theta.sin_cos();
    let (s2, c2, sc) = (s * s, co * co, s * co);
    let (q1, q2, q3) = (q[0] as f64, q[1] as f64, q[2] as f64);
    let p3 = p3_of(q);
    let plus = p3 * c2 + q3;
    let dplus = -2.0 * p3 * sc;
    let hn = (p3 - q3) * c2 + q3 * s2;
    let dhn = -2.0 * (p3 - q3) * sc + 2.0 * q3 * sc;
    let hd = s2 * plus;
    let dhd = 2.0 * sc * plus + s2 * dplus;
    let gn = p3 * q1 * c2 + p3 * q3 * s2 - q2 * q3;
    let dgn = -2.0 * p3 * q1 * sc + 2.0 * p3 * q3 * sc;
    let gd = (q1 - q2) * plus;
    let dgd = (q1 - q2) * dplus;
    (
        (dhn * hd - hn * dhd) / (hd * hd),
        (dgn * gd - gn * dgd) / (gd * gd),
    )
}

/// Five-point central differences of `h` and `g`.
pub fn central_difference_derivatives(theta: f64, q: Triple, step: f64) -> Result<(f64, f64)> {
    let mut hs = [0.0; 4];
    let mut gs = [0.0; 4];
    for (i, m) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
        let (h, g, _) = hg_strict(theta + m * step, q)?;
        hs[i] = h;
        gs[i] = g;
    }
    let d = |f: [f64; 4]| (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * step);
    Ok((d(hs), d(gs)))
}

/// Relative residuals of the four identities at one angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub theta: f64,
    /// `g = (p3 sin^2 h - q2)/(q1 - q2)`.
    pub g_from_h: f64,
    /// `sin^2 (1 - h) = -cos^2 (p3 cos^2 - q3)/(p3 cos^2 + q3)`.
    pub one_minus_h: f64,
    /// Closed-form `h'` against the quotient rule.
    pub dh: f64,
    /// Closed-form `g'` against the quotient rule.
    pub dg: f64,
    /// Closed-form `h'` against central differences.
    pub dh_fd: f64,
    /// Closed-form `g'` against central differences.
    pub dg_fd: f64,
}

impl IdentityResiduals {
    pub fn algebraic_max(&self) -> f64 {
        self.g_from_h.max(self.one_minus_h).max(self.dh).max(self.dg)
    }

    pub fn fd_max(&self) -> f64 {
        self.dh_fd.max(self.dg_fd)
    }
}

pub const FD_STEP: f64 = 1e-3;

pub fn identity_residuals(theta: f64, q: Triple) -> Result<IdentityResiduals> {
    let (h, g, v) = hg_strict(theta, q)?;
    let (s, co) = theta.sin_cos();
    let (s2, c2) = (s * s, co * co);
    let (q1, q2, q3) = (q[0] as f64, q[1] as f64, q[2] as f64);
    let p3 = p3_of(q);
    let g1 = (p3 * s2 * h - q2) / (q1 - q2);
    let lhs2 = s2 * (1.0 - h);
    let rhs2 = -c2 * (p3 * c2 - q3) / (p3 * c2 + q3);
    let (dh_q, dg_q) = quotient_rule_derivatives(theta, q);
    let (dh_fd, dg_fd) = central_difference_derivatives(theta, q, FD_STEP * pole_distance(theta, q).min(1.0))?;
    let dh = v.dh.expect("sin(theta) != 0");
    Ok(IdentityResiduals {
        theta,
        g_from_h: rel(g, g1),
        one_minus_h: rel(lhs2, rhs2),
        dh: rel(dh, dh_q),
        dg: rel(v.dg, dg_q),
        dh_fd: rel(dh, dh_fd),
        dg_fd: rel(v.dg, dg_fd),
    })
}

/// The smallest of `|sin|` and the relative sizes of `p3 cos^2 -+ q3`.
pub fn pole_distance(theta: f64, q: Triple) -> f64 {
    let (s, co) = theta.sin_cos();
    let (p3, q3) = (p3_of(q), q[2] as f64);
    let scale = domain_scale(q);
    s.abs()
        .min((p3 * co * co + q3).abs() / scale)
        .min((p3 * co * co - q3).abs() / scale)
}

/// Whether `theta` stays at least `margin` (relative) away from every pole.
pub fn well_inside_domain(theta: f64, q: Triple, margin: f64) -> bool {
    pole_distance(theta, q) > margin
}

/// Residuals of the three expressions for `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaIdentities {
    /// `beta = 2 p3 sin^2 (1 - h)/(p3 cos^2 - q3)`.
    pub beta1: f64,
    /// `cos^2 (1 + beta) = sin^2 (1 - h)`.
    pub beta2: f64,
    /// `beta = 6 sin^2 p3 (1 - h)/((2cos^2 - sin^2) p3 + q1 + q2 - 2q3)`.
    pub beta3: f64,
}

impl BetaIdentities {
    pub fn max(&self) -> f64 {
        self.beta1.max(self.beta2).max(self.beta3)
    }
}

pub fn beta_identities(theta: f64, q: Triple) -> Result<BetaIdentities> {
    let (h, _, v) = hg_strict(theta, q)?;
    let (s, co) = theta.sin_cos();
    let (s2, c2) = (s * s, co * co);
    let (q1, q2, q3) = (q[0] as f64, q[1] as f64, q[2] as f64);
    let p3 = p3_of(q);
    let b = v.beta;
    let b1 = 2.0 * p3 * s2 * (1.0 - h) / (p3 * c2 - q3);
    let b3 = 6.0 * s2 * p3 * (1.0 - h) / ((2.0 * c2 - s2) * p3 + q1 + q2 - 2.0 * q3);
    Ok(BetaIdentities {
        beta1: rel(b, b1),
        beta2: rel(c2 * (1.0 + b), s2 * (1.0 - h)),
        beta3: rel(b, b3),
    })
}

// ---- the explicit construction ----

/// `|sin(a) k11 - cos(a) conj(k12)|^2` for `k11 = sqrt g`, `k12 = sqrt(1-g) e^{i gamma}`.
pub fn heqn_lhs(alpha: f64, g: f64, gamma: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let k12 = C64::from_polar((1.0 - g).sqrt(), gamma);
    (c(sa * g.sqrt(), 0.0) - k12.conj() * ca).norm_sqr()
}

/// The range of `heqn_lhs` over `gamma`, attained at `gamma = 0` and `gamma = pi`.
pub fn heqn_range(alpha: f64, g: f64) -> (f64, f64) {
    let (sa, ca) = alpha.sin_cos();
    let (a, b) = (sa.abs() * g.sqrt(), ca.abs() * (1.0 - g).sqrt());
    ((a - b).powi(2), (a + b).powi(2))
}

/// The element with `k11 = sqrt g`, `k12 = sqrt(1-g) e^{i gamma}`, `k33 = 1`.
pub fn construction_k(g: f64, gamma: f64) -> Result<KElement> {
    let k11 = c(g.sqrt(), 0.0);
    let k12 = C64::from_polar((1.0 - g).sqrt(), gamma);
    KElement::from_block(Matrix2::new(k11, k12, -k12.conj(), k11.conj()))
}

/// `z = 3i tan(theta)(cos(a) k11 + sin(a) conj(k12))`.
pub fn construction_z(theta: f64, alpha: f64, k: &KElement) -> C64 {
    let (sa, ca) = alpha.sin_cos();
    c(0.0, 3.0 * theta.tan()) * (k.entry(0, 0) * ca + k.entry(0, 1).conj() * sa)
}

/// Solves the `h` equation for `gamma` in `[0, pi]`, where the left side is
/// monotone.
pub fn solve_gamma(alpha: f64, g: f64, h: f64) -> Result<f64> {
    let f = |gm: f64| heqn_lhs(alpha, g, gm) - h;
    let (mut lo, mut hi) = (0.0, PI);
    let (flo, fhi) = (f(lo), f(hi));
    let (rlo, rhi) = (flo.min(fhi) + h, flo.max(fhi) + h);
    if h < rlo - HEQN_TOL || h > rhi + HEQN_TOL {
        return Err(Error::NoGammaSolution { h, lo: rlo, hi: rhi });
    }
    if flo.abs() <= HEQN_TOL {
        return Ok(lo);
    }
    if fhi.abs() <= HEQN_TOL {
        return Ok(hi);
    }
    let rising = flo < fhi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= 0.25 * HEQN_TOL || hi - lo < 1e-16 {
            return Ok(mid);
        }
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The `p`-parts of `Ad_{Ak} Y1` and `Ad_{Ak} Z` by the closed forms, for
/// `k` with `k33 = 1` and `z` as in the construction.
pub fn closed_form_p_parts(theta: f64, alpha: f64, k: &KElement, beta: f64) -> ([C64; 2], [C64; 2]) {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    let (k11, k12) = (k.entry(0, 0), k.entry(0, 1));
    let u = k12 * ca - k11.conj() * sa;
    let w = k11 * ca + k12.conj() * sa;
    let i3s = c(0.0, 3.0 * st);
    let first = i3s * u * w;
    let y1 = [first, i3s * (-ct * u.norm_sqr())];
    let z = [
        first,
        c(0.0, 3.0 * theta.tan() * (ct * ct - st * st) * w.norm_sqr() + 3.0 * ct * st * beta),
    ];
    (y1, z)
}

/// The expanded form of `(Ad_{Ak} Y1)_p` before factoring. The `cos^2(a)` term
/// of the second entry enters with a minus sign.
pub fn expanded_y1_p_part(theta: f64, alpha: f64, k: &KElement) -> [C64; 2] {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    let (k11, k12) = (k.entry(0, 0), k.entry(0, 1));
    let n11 = k11.norm_sqr();
    let i3s = c(0.0, 3.0 * st);
    [
        i3s * (k11 * k12 * ca * ca - k11.conj() * k12.conj() * sa * sa
            + c(sa * ca * (1.0 - 2.0 * n11), 0.0)),
        i3s * ct
            * (c(-ca * ca * (1.0 - 2.0 * n11) - n11, 0.0)
                + (k11 * k12 + k11.conj() * k12.conj()) * sa * ca),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilkingResiduals {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Determinant defect of the two `p`-parts.
    #[serde(rename = "C")]
    pub c: f64,
    /// `max |(Ad_{Ak} Y1)_p - (Ad_{Ak} Z)_p|`.
    pub c_equality: f64,
    /// `| |k11|^2 - g |`.
    pub geqn: f64,
    /// `| |sin(a) k11 - cos(a) conj(k12)|^2 - h |`.
    pub heqn: f64,
    /// Largest `|<X, Ad_{A^{-1}}(iP) - iQ>_0|` over the unit generators.
    pub horizontality: f64,
    /// Largest bracket norm of the zero criterion over both projections.
    pub bracket: f64,
    /// Largest of the three `beta` identity residuals.
    pub beta_identities: f64,
}

/// A flat horizontal plane at `(A^{-1}, I)` over `[A(theta, alpha)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilkingCertificate {
    pub q: Triple,
    pub theta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub t: f64,
    pub k: KElement,
    #[serde(rename = "Z")]
    pub z: ZVector,
    pub residuals: WilkingResiduals,
    pub betas: BetaIdentities,
    /// Curvatures of the two projections in the deformed metric.
    pub curvatures: [f64; 2],
}

impl WilkingCertificate {
    pub fn passes(&self, tol: &Tolerances) -> bool {
        let r = &self.residuals;
        r.a < tol.certificate
            && r.b < tol.certificate
            && r.c < tol.certificate
            && r.c_equality < tol.certificate
            && r.geqn < tol.certificate
            && r.heqn < tol.certificate
            && r.horizontality < tol.horizontality
            && r.bracket < tol.certificate
            && r.beta_identities < tol.identity
            && self.curvatures.iter().all(|k| k.abs() < tol.curvature)
    }

    pub fn point(&self) -> Su3Point {
        FPoint::new(self.theta, self.alpha).materialize()
    }

    /// The projections `sigma_1`, `sigma_2` as planes of the Eschenburg metric.
    pub fn projected_planes(&self) -> Result<[TwoPlane; 2]> {
        projected_planes(&self.point(), &self.k, &self.z, self.t)
    }
}

fn projected_planes(a: &Su3Point, k: &KElement, z: &ZVector, t: f64) -> Result<[TwoPlane; 2]> {
    let y = adjoint(k.point(), &su3::y1());
    let zz = adjoint(k.point(), &z.materialize());
    let first = TwoPlane::new(
        -phi_inv(&adjoint(a, &y), t)?,
        -phi_inv(&adjoint(a, &zz), t)?,
    );
    let second = TwoPlane::new(phi_inv(&y, t)?, phi_inv(&zz, t)?);
    Ok([first, second])
}

/// Evaluates every residual of `(theta, alpha, gamma)` without solving.
pub fn evaluate_certificate_with(
    engine: &CurvatureEngine,
    q: Triple,
    theta: f64,
    alpha: f64,
    gamma: f64,
    t: f64,
) -> Result<WilkingCertificate> {
    let (h, g, v) = hg_strict(theta, q)?;
    let pair = wilking_pair(q)?;
    let a = FPoint::new(theta, alpha).materialize();
    let k = construction_k(g, gamma)?;
    let z = ZVector::new(v.beta, construction_z(theta, alpha, &k));
    let ra = condition_a(&a, &pair, &k).abs();
    let rb = condition_b(&a, &pair, &k, &z)?.abs();
    let rc = condition_c(&a, &k, &z)?;
    let rce = condition_c_equality(&a, &k, &z)?;
    let ainv = a.inverse();
    let mut horiz: f64 = 0.0;
    for x in [adjoint(k.point(), &su3::y1()), adjoint(k.point(), &z.materialize())] {
        let unit = (1.0 / x.norm0()) * x;
        horiz = horiz.max(horizontal_test(&ainv, &pair, &unit).abs());
    }
    let planes = projected_planes(&a, &k, &z, t)?;
    let mut bracket: f64 = 0.0;
    let mut curvatures = [0.0; 2];
    for (i, plane) in planes.iter().enumerate() {
        let (full, block) = zero_criterion_residuals(plane, t)?;
        bracket = bracket.max(full).max(block);
        curvatures[i] = engine.sectional_curvature(plane)?;
    }
    let betas = beta_identities(theta, q)?;
    Ok(WilkingCertificate {
        q,
        theta,
        alpha,
        gamma,
        beta: v.beta,
        t,
        k,
        z,
        residuals: WilkingResiduals {
            a: ra,
            b: rb,
            c: rc,
            c_equality: rce,
            geqn: (k.entry(0, 0).norm_sqr() - g).abs(),
            heqn: (heqn_lhs(alpha, g, gamma) - h).abs(),
            horizontality: horiz,
            bracket,
            beta_identities: betas.max(),
        },
        betas,
        curvatures,
    })
}

fn check_construction_domain(theta: f64, q: Triple) -> Result<(f64, f64)> {
    let (h, g, _) = hg_strict(theta, q)?;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::PreconditionFailed(format!("g(theta) = {g} is not in (0, 1)")));
    }
    Ok((h, g))
}

pub fn build_wilking_certificate_with(
    engine: &CurvatureEngine,
    theta: f64,
    alpha: f64,
    q: Triple,
    t: f64,
) -> Result<WilkingCertificate> {
    if q[0] == q[1] {
        return Err(Error::Domain(DomainFlag::EqualQ1Q2));
    }
    let (h, g) = check_construction_domain(theta, q)?;
    let gamma = solve_gamma(alpha, g, h)?;
    evaluate_certificate_with(engine, q, theta, alpha, gamma, t)
}

pub fn build_wilking_certificate(theta: f64, alpha: f64, q: Triple, t: f64) -> Result<WilkingCertificate> {
    let engine = CurvatureEngine::deformed(t)?;
    build_wilking_certificate_with(&engine, theta, alpha, q, t)
}

/// Recomputes the residuals of a stored certificate.
pub fn replay_wilking_certificate(cert: &WilkingCertificate) -> Result<WilkingCertificate> {
    let engine = CurvatureEngine::deformed(cert.t)?;
    evaluate_certificate_with(&engine, cert.q, cert.theta, cert.alpha, cert.gamma, cert.t)
}

/// An `alpha` with `A(theta, alpha)` in `V`: pick `gamma0` with
/// `sin^2 gamma0 < h < cos^2 gamma0` and run the intermediate value argument
/// in `alpha` between the two bounding angles.
pub fn witness_alpha(h: f64, g: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0 && g > 0.0 && g < 1.0) {
        return Err(Error::PreconditionFailed(format!("need 0 < h, g < 1 (h = {h}, g = {g})")));
    }
    let gamma0 = 0.5 * h.sqrt().asin().min((1.0 - h).sqrt().asin());
    let a_low = (gamma0.cos() * (1.0 - g).sqrt()).atan2(g.sqrt());
    let a_high = g.sqrt().atan2(-(1.0 - g).sqrt());
    let f = |a: f64| heqn_lhs(a, g, gamma0) - h;
    let (mut lo, mut hi) = (a_low, a_high);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::WitnessSearchFailed(format!(
            "alpha bracket does not straddle h = {h} (g = {g})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---- the open set V ----

/// The region of `A(theta, alpha)` with `theta` in the window where
/// `0 < h, g < 1`, and `h` strictly between the extremes of the `gamma`-range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenSetV {
    pub q: Triple,
    pub window: (f64, f64),
    /// A point of the window with `0 < h, g < 1`.
    pub theta0: f64,
    pub description: String,
}

impl OpenSetV {
    fn theta_ok(&self, theta: f64) -> Option<(f64, f64)> {
        if !(theta > self.window.0 && theta < self.window.1) {
            return None;
        }
        if !well_inside_domain(theta, self.q, WITNESS_MARGIN) {
            return None;
        }
        let v = hg_values(theta, self.q).ok()?;
        v.in_unit_box().then(|| (v.h.unwrap(), v.g))
    }

    /// Membership of `A(theta, alpha)`.
    pub fn contains_fpoint(&self, p: &FPoint) -> bool {
        match self.theta_ok(p.theta) {
            Some((h, g)) => {
                let (lo, hi) = heqn_range(p.alpha, g);
                lo < h && h < hi
            }
            None => false,
        }
    }

    /// Membership of the orbit of `A`, through `|a31|, |a32|, |a33|`.
    pub fn contains(&self, a: &Su3Point) -> bool {
        let [x, y, z] = orbit_invariants(a);
        let st = (1.0 - z * z).max(0.0).sqrt();
        if st == 0.0 {
            return false;
        }
        let theta = z.min(1.0).acos();
        match self.theta_ok(theta) {
            Some((h, g)) => {
                let (sa, ca) = (x / st, y / st);
                let lo = (sa * g.sqrt() - ca * (1.0 - g).sqrt()).powi(2);
                let hi = (sa * g.sqrt() + ca * (1.0 - g).sqrt()).powi(2);
                lo < h && h < hi
            }
            None => false,
        }
    }

    /// Rejection sampling of `(theta, alpha)` uniform on the window times the circle.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, max_attempts: usize) -> Option<FPoint> {
        for _ in 0..max_attempts {
            let p = FPoint::new(
                rng.random_range(self.window.0..self.window.1),
                rng.random_range(0.0..TAU),
            );
            if self.contains_fpoint(&p) {
                return Some(p);
            }
        }
        None
    }
}

pub const WINDOW_GRID: usize = 4001;

/// The set `V` over a window of angles; fails if no angle has `0 < h, g < 1`.
#[allow(non_snake_case)]
pub fn open_set_V(window: (f64, f64), q: Triple) -> Result<OpenSetV> {
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("bad window ({lo}, {hi})")));
    }
    if q[0] == q[1] {
        return Err(Error::Domain(DomainFlag::EqualQ1Q2));
    }
    let mut v = OpenSetV {
        q,
        window,
        theta0: f64::NAN,
        description: String::new(),
    };
    let mid = 0.5 * (lo + hi);
    let theta0 = std::iter::once(mid)
        .chain((1..WINDOW_GRID - 1).map(|i| lo + (hi - lo) * i as f64 / (WINDOW_GRID - 1) as f64))
        .find(|&th| v.theta_ok(th).is_some())
        .ok_or(Error::EmptyWindow)?;
    v.theta0 = theta0;
    v.description = format!(
        "A(theta, alpha) with {lo} < theta < {hi}, 0 < h(theta) < 1, 0 < g(theta) < 1 and \
         (|sin a| sqrt g - |cos a| sqrt(1-g))^2 < h < (|sin a| sqrt g + |cos a| sqrt(1-g))^2; \
         orbit test uses |sin a| = |a31|/sqrt(1-|a33|^2), |cos a| = |a32|/sqrt(1-|a33|^2), cos theta = |a33|"
    );
    Ok(v)
}

// ---- the case engine ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlmposCase {
    #[serde(rename = "2a")]
    Case2a,
    #[serde(rename = "2b")]
    Case2b,
    #[serde(rename = "2b-degenerate")]
    Case2bDegenerate,
    #[serde(rename = "2c")]
    Case2c,
}

impl AlmposCase {
    pub fn name(self) -> &'static str {
        match self {
            AlmposCase::Case2a => "2a",
            AlmposCase::Case2b => "2b",
            AlmposCase::Case2bDegenerate => "2b-degenerate",
            AlmposCase::Case2c => "2c",
        }
    }
}

impl std::fmt::Display for AlmposCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The arguments applicable to a normalized candidate `q`, in priority order.
pub fn applicable_cases(q: Triple) -> Vec<AlmposCase> {
    let [q1, q2, q3] = q.map(|x| x as i128);
    let mut out = Vec::new();
    if q2 < 0 && q1 + q2 == 0 {
        out.push(AlmposCase::Case2bDegenerate);
    }
    if q2 < 0 && q1 + q2 > 0 {
        out.push(AlmposCase::Case2b);
    }
    if q1 + q3 > 0 && q2 + q3 <= 0 {
        out.push(AlmposCase::Case2c);
    }
    if q2 + q3 > 0 {
        out.push(AlmposCase::Case2a);
    }
    out
}

/// One step of the witness search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessAttempt {
    pub theta: f64,
    pub h: Option<f64>,
    pub g: Option<f64>,
    pub accepted: bool,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseAnalysis {
    pub q: Triple,
    pub case: AlmposCase,
    /// The angle singled out by the argument (`pi/2`, `0`, or the closed-form root).
    pub theta_center: f64,
    /// `h` and `g` at the centre where defined.
    pub center_values: Option<HGValues>,
    pub theta: f64,
    pub alpha: f64,
    pub hg: HGValues,
    pub certificate: WilkingCertificate,
    pub open_set: OpenSetV,
    pub attempts: Vec<WitnessAttempt>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineReport {
    pub candidate: CandidateReport,
    pub analysis: CaseAnalysis,
}

/// `(centre, direction, scale)` of the search for a case.
fn search_plan(q: Triple, case: AlmposCase) -> Result<(f64, f64, f64)> {
    let (q2, q3) = (q[1] as f64, q[2] as f64);
    let p3 = p3_of(q);
    match case {
        AlmposCase::Case2c => Ok((FRAC_PI_2, -1.0, 0.3)),
        AlmposCase::Case2bDegenerate => Ok((0.0, 1.0, 0.1)),
        AlmposCase::Case2b => {
            let theta0 = (q3 / p3).sqrt().acos();
            let dh = hg_values(theta0, q)?.dh.unwrap_or(0.0);
            if dh == 0.0 {
                return Err(Error::WitnessSearchFailed(format!("h'(theta0) = 0 at {theta0}")));
            }
            Ok((theta0, -dh.signum(), 0.1))
        }
        AlmposCase::Case2a => {
            let theta0 = (-q3 * (q2 + q3) / ((q2 - q3) * p3)).sqrt().acos();
            let dg = hg_values(theta0, q)?.dg;
            if dg == 0.0 {
                return Err(Error::WitnessSearchFailed(format!("g'(theta0) = 0 at {theta0}")));
            }
            Ok((theta0, -dg.signum(), 0.1))
        }
    }
}

/// Runs the argument of one case on a normalized candidate `q`.
pub fn analyze_case_with(
    engine: &CurvatureEngine,
    q: Triple,
    case: AlmposCase,
    t: f64,
) -> Result<CaseAnalysis> {
    if !applicable_cases(q).contains(&case) {
        return Err(Error::PreconditionFailed(format!("case {case} does not apply to {q:?}")));
    }
    let (center, dir, scale) = search_plan(q, case)?;
    let center_values = hg_values(center, q).ok();
    let mut attempts = Vec::new();
    let mut found = None;
    for j in 0..=MAX_HALVINGS {
        let offset = scale * 0.5f64.powi(j as i32);
        let theta = center + dir * offset;
        let v = hg_values(theta, q).ok();
        let (h, g) = (v.and_then(|v| v.h), v.map(|v| v.g));
        let reason = if !well_inside_domain(theta, q, WITNESS_MARGIN) {
            "too close to a pole"
        } else if !v.is_some_and(|v| v.in_unit_box()) {
            "h or g outside (0, 1)"
        } else {
            "accepted"
        };
        let accepted = reason == "accepted";
        attempts.push(WitnessAttempt {
            theta,
            h,
            g,
            accepted,
            reason: reason.to_string(),
        });
        if accepted {
            found = Some((theta, offset, v.unwrap()));
            break;
        }
    }
    let (theta, offset, hg) = found.ok_or_else(|| {
        Error::WitnessSearchFailed(format!("case {case} for {q:?}: no angle in the bracket has 0 < h, g < 1"))
    })?;
    let h = hg.h.expect("accepted witness has h");
    let alpha = witness_alpha(h, hg.g)?;
    let certificate = build_wilking_certificate_with(engine, theta, alpha, q, t)?;
    let r = 0.5 * offset;
    let window = ((theta - r).max(0.0), (theta + r).min(FRAC_PI_2));
    let open_set = open_set_V(window, q)?;
    Ok(CaseAnalysis {
        q,
        case,
        theta_center: center,
        center_values,
        theta,
        alpha,
        hg,
        certificate,
        open_set,
        attempts,
    })
}

pub fn analyze_case(q: Triple, case: AlmposCase, t: f64) -> Result<CaseAnalysis> {
    let engine = CurvatureEngine::deformed(t)?;
    analyze_case_with(&engine, q, case, t)
}

/// Filters `q`, normalizes it, and runs the highest-priority argument.
pub fn almpos_case_engine(q: Triple, t: f64) -> Result<EngineReport> {
    let candidate = wilking_candidate_filter(q)?;
    if candidate.verdict != CandidateVerdict::NewCandidate {
        return Err(Error::NotCandidate(q));
    }
    let nq = candidate.q;
    let case = *applicable_cases(nq)
        .first()
        .ok_or_else(|| Error::WitnessSearchFailed(format!("no argument applies to {nq:?}")))?;
    let analysis = analyze_case(nq, case, t)?;
    Ok(EngineReport { candidate, analysis })
}

/// Normalized new candidates with `|q_i| <= bound`, sorted and deduplicated.
pub fn candidate_catalog(bound: i64) -> Vec<Triple> {
    let mut out = std::collections::BTreeSet::new();
    for q1 in -bound..=bound {
        for q2 in -bound..=bound {
            for q3 in -bound..=bound {
                if let Ok(r) = wilking_candidate_filter([q1, q2, q3]) {
                    if r.verdict == CandidateVerdict::NewCandidate {
                        out.insert(r.q);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::su3::{haar_k, haar_su3, random_torus, random_vector};
    use nalgebra::Vector2;

    fn random_su2<R: Rng>(rng: &mut R) -> KElement {
        let v = Vector2::new(
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        KElement::from_first_column(v).unwrap()
    }

    #[test]
    fn fpoint_is_special_unitary() {
        let mut rng = seeded(1);
        for _ in 0..50 {
            let p = FPoint::new(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let a = p.materialize();
            assert!(a.drift() < 1e-12);
            assert!((a.matrix().determinant() - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn doubled_vector_reconstructs() {
        let mut rng = seeded(2);
        for t in [0.1, 1.0, 10.0] {
            let a = haar_su3(&mut rng);
            let x = random_vector(&mut rng);
            let d = DoubledVector::lift(&a, &x, t).unwrap();
            assert!((d.generator(t).unwrap() - x).norm0() < 1e-10);
            assert!(d.reconstruction_defect(&a, t).unwrap() < 1e-10);
        }
    }

    #[test]
    fn horizontal_test_trivial_cases() {
        let pair = PQPair::new([1, 2, -3], [1, 2, -3]).unwrap();
        let mut rng = seeded(3);
        let x = random_vector(&mut rng);
        assert!(horizontal_test(&Su3Point::identity(), &pair, &x).abs() < 1e-12);
        let pair = wilking_pair([3, 1, -2]).unwrap();
        let a = haar_su3(&mut rng);
        let n = doubled_normal(&a, &pair);
        let x = random_vector(&mut rng);
        let y = x - (inner0(&x, &n) / inner0(&n, &n)) * n;
        assert!(horizontal_test(&a, &pair, &y).abs() < 1e-10);
    }

    #[test]
    fn condition_a_matches_horizontality_of_adk_y1() {
        let mut rng = seeded(4);
        let pair = wilking_pair([3, 1, -2]).unwrap();
        for _ in 0..20 {
            let a = haar_su3(&mut rng);
            let k = random_su2(&mut rng);
            let x = adjoint(k.point(), &su3::y1());
            let lhs = horizontal_test(&a.inverse(), &pair, &x);
            assert!((lhs + 3.0 * condition_a(&a, &pair, &k)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_z_rejected() {
        let a = Su3Point::identity();
        let pair = wilking_pair([3, 1, -2]).unwrap();
        let z = ZVector::new(0.0, C64::default());
        let k = KElement::identity();
        assert_eq!(condition_b(&a, &pair, &k, &z), Err(Error::ZeroZ));
        assert_eq!(condition_c(&a, &k, &z), Err(Error::ZeroZ));
    }

    #[test]
    fn random_k_z_violate_conditions() {
        let mut rng = seeded(5);
        let pair = wilking_pair([3, 1, -2]).unwrap();
        let a = haar_su3(&mut rng);
        let k = random_su2(&mut rng);
        let z = ZVector::new(0.7, c(0.3, -1.1));
        assert!(condition_a(&a, &pair, &k).abs() > 1e-6);
        assert!(condition_b(&a, &pair, &k, &z).unwrap().abs() > 1e-6);
        assert!(condition_c(&a, &k, &z).unwrap() > 1e-6);
    }

    #[test]
    fn hg_examples() {
        for q in [[3, 1, -2], [2, -1, 3], [5, -2, 3], [7, 3, -4]] {
            let v = hg_values(FRAC_PI_2, q).unwrap();
            assert!((v.h.unwrap() - 1.0).abs() < 1e-12);
            let g2c = (q[0] + q[2]) as f64 / (q[0] - q[1]) as f64;
            assert!((v.g - g2c).abs() < 1e-12);
        }
        let v = hg_values(0.0, [1, -1, 2]).unwrap();
        assert!(v.flags.sin_theta_zero && v.h.is_none());
        assert!((v.g - 0.5).abs() < 1e-15);
        assert_eq!(hg_values(1.0, [2, 2, 1]), Err(Error::Domain(DomainFlag::EqualQ1Q2)));
        // p3 cos^2 + q3 = 0 at cos^2 = 1/2 for q = (3, 0, -1)
        assert_eq!(
            hg_values(std::f64::consts::FRAC_PI_4, [3, 0, -1]),
            Err(Error::Domain(DomainFlag::DenominatorPlusZero))
        );
    }

    #[test]
    fn degenerate_2b_h_simplifies() {
        let q = [1, -1, 5];
        for th in [0.1, 0.4, 0.9, 1.3] {
            let h = hg_values(th, q).unwrap().h.unwrap();
            let c2 = th.cos().powi(2);
            assert!((h - 1.0 / (c2 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn identities_hold_at_random_angles() {
        let mut rng = seeded(6);
        for q in [[3, 1, -2], [2, -1, 3], [1, -1, 2], [5, 2, -3]] {
            let mut n = 0;
            while n < 200 {
                let th = rng.random_range(0.0..PI);
                if !well_inside_domain(th, q, 0.05) {
                    continue;
                }
                let r = identity_residuals(th, q).unwrap();
                assert!(r.algebraic_max() < 1e-10, "{q:?} {r:?}");
                assert!(r.fd_max() < 1e-6, "{q:?} {r:?}");
                let b = beta_identities(th, q).unwrap();
                assert!(b.max() < 1e-10, "{q:?} {b:?}");
                n += 1;
            }
        }
    }

    #[test]
    fn stated_derivative_values() {
        // case 2c: h'(pi/2) = 0, g'(pi/2) = 0
        let v = hg_values(FRAC_PI_2, [3, 1, -2]).unwrap();
        assert!(v.dh.unwrap().abs() < 1e-12 && v.dg.abs() < 1e-12);
        let second = |f: &dyn Fn(f64) -> f64, x: f64| {
            let e = 1e-4;
            (f(x + e) - 2.0 * f(x) + f(x - e)) / (e * e)
        };
        let q = [3, 1, -2];
        let h2 = second(&|x| hg_values(x, q).unwrap().h.unwrap(), FRAC_PI_2);
        let g2 = second(&|x| hg_values(x, q).unwrap().g, FRAC_PI_2);
        assert!((h2 + 2.0).abs() < 1e-5);
        assert!((g2 + 4.0 * 2.0 / 2.0).abs() < 1e-5);
    }

    #[test]
    fn partial_isometry_identity() {
        let mut rng = seeded(7);
        for _ in 0..100 {
            let k = random_su2(&mut rng);
            let a: f64 = rng.random_range(0.0..TAU);
            let (sa, ca) = a.sin_cos();
            let (k11, k12, k21) = (k.entry(0, 0), k.entry(0, 1), k.entry(1, 0));
            let lhs = (k11 * ca + k12.conj() * sa).norm_sqr() + (k11 * sa - k12.conj() * ca).norm_sqr();
            assert!((lhs - (k11.norm_sqr() + k21.norm_sqr())).abs() < 1e-12);
            assert!((lhs - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_p_parts_match_direct() {
        let mut rng = seeded(8);
        for _ in 0..100 {
            let th = rng.random_range(0.05..1.5);
            let al = rng.random_range(0.0..TAU);
            let beta = rng.random_range(-3.0..3.0);
            let k = random_su2(&mut rng);
            let a = FPoint::new(th, al).materialize();
            let z = ZVector::new(beta, construction_z(th, al, &k));
            let (u, w) = condition_c_parts(&a, &k, &z);
            let (cu, cw) = closed_form_p_parts(th, al, &k, beta);
            let ex = expanded_y1_p_part(th, al, &k);
            for i in 0..2 {
                assert!((u[i] - cu[i]).norm() < 1e-10, "Y1 entry {i}");
                assert!((u[i] - ex[i]).norm() < 1e-10, "expanded entry {i}");
                assert!((w[i] - cw[i]).norm() < 1e-10, "Z entry {i}");
            }
        }
    }

    #[test]
    fn certificate_for_2c_example() {
        let q = [3, 1, -2];
        let th = FRAC_PI_2 - 0.3;
        let v = hg_values(th, q).unwrap();
        let alpha = witness_alpha(v.h.unwrap(), v.g).unwrap();
        let cert = build_wilking_certificate(th, alpha, q, 1.0).unwrap();
        assert!(cert.passes(&Tolerances::default()), "{:?}", cert.residuals);
        let (s2, c2) = (th.sin().powi(2), th.cos().powi(2));
        assert!((c2 * (1.0 + cert.beta) - s2 * (1.0 - v.h.unwrap())).abs() < 1e-10);
        let replay = replay_wilking_certificate(&cert).unwrap();
        assert_eq!(replay, cert);
        let json = serde_json::to_value(&cert).unwrap();
        for key in ["q", "theta", "alpha", "gamma", "beta", "k", "residuals", "curvatures"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        for key in ["A", "B", "C"] {
            assert!(json["residuals"].get(key).is_some());
        }
        let back: WilkingCertificate = serde_json::from_value(json).unwrap();
        assert_eq!(back.gamma, cert.gamma);
    }

    #[test]
    fn certificate_planes_pass_criterion() {
        let q = [3, 1, -2];
        let th = FRAC_PI_2 - 0.2;
        let v = hg_values(th, q).unwrap();
        let alpha = witness_alpha(v.h.unwrap(), v.g).unwrap();
        for t in [0.5, 1.0, 4.0] {
            let cert = build_wilking_certificate(th, alpha, q, t).unwrap();
            for plane in cert.projected_planes().unwrap() {
                assert!(crate::curvature::eschenburg_zero_criterion(&plane, t, 1e-9).unwrap());
            }
            assert!(cert.passes(&Tolerances::default()));
        }
    }

    #[test]
    fn no_gamma_outside_range() {
        let q = [3, 1, -2];
        let th = FRAC_PI_2 - 0.3;
        let v = hg_values(th, q).unwrap();
        // alpha = 0 gives the range {1 - g}
        let res = build_wilking_certificate(th, 0.0, q, 1.0);
        let (lo, hi) = heqn_range(0.0, v.g);
        assert!((hi - lo).abs() < 1e-15);
        assert!(matches!(res, Err(Error::NoGammaSolution { .. })), "{res:?}");
        // h > 1 somewhere away from pi/2
        let th2 = 0.3;
        let h2 = hg_values(th2, q).unwrap().h.unwrap();
        assert!(!(0.0..1.0).contains(&h2));
        assert!(build_wilking_certificate(th2, 0.7, q, 1.0).is_err());
        assert!(matches!(
            build_wilking_certificate(0.0, 0.7, [2, -1, 3], 1.0),
            Err(Error::Domain(DomainFlag::SinThetaZero))
        ));
    }

    #[test]
    fn invariants_and_canonical_point() {
        assert_eq!(orbit_invariants(&Su3Point::identity()), [0.0, 0.0, 1.0]);
        assert_eq!(canonical_fpoint(&Su3Point::identity()).theta, 0.0);
        let mut rng = seeded(9);
        for _ in 0..50 {
            let p = FPoint::new(rng.random_range(0.01..1.56), rng.random_range(0.01..1.56));
            let back = canonical_fpoint(&p.materialize());
            assert!((back.theta - p.theta).abs() < 1e-10 && (back.alpha - p.alpha).abs() < 1e-10);
            let a = haar_su3(&mut rng);
            let inv = orbit_invariants(&a);
            let b = orbit_translate(&a, &haar_k(&mut rng), &random_torus(&mut rng));
            let inv2 = orbit_invariants(&b);
            for i in 0..3 {
                assert!((inv[i] - inv2[i]).abs() < 1e-12);
            }
            let f = canonical_fpoint(&a).materialize();
            let inv3 = orbit_invariants(&f);
            for i in 0..3 {
                assert!((inv[i] - inv3[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn open_set_samples_certify_and_are_orbit_invariant() {
        let q = [3, 1, -2];
        let v = open_set_V((FRAC_PI_2 - 0.45, FRAC_PI_2 - 0.15), q).unwrap();
        let engine = CurvatureEngine::deformed(1.0).unwrap();
        let mut rng = seeded(10);
        for _ in 0..100 {
            let p = v.sample(&mut rng, 100_000).unwrap();
            let cert = build_wilking_certificate_with(&engine, p.theta, p.alpha, q, 1.0).unwrap();
            assert!(cert.passes(&Tolerances::default()), "{p:?} {:?}", cert.residuals);
            let a = p.materialize();
            assert!(v.contains(&a));
            for _ in 0..10 {
                let b = orbit_translate(&a, &haar_k(&mut rng), &random_torus(&mut rng));
                assert!(v.contains(&b));
            }
        }
    }

    #[test]
    fn empty_window() {
        // h > 1 near 0.3 for q = (3,1,-2)
        assert_eq!(open_set_V((0.2, 0.4), [3, 1, -2]), Err(Error::EmptyWindow));
    }

    #[test]
    fn engine_examples() {
        let r = almpos_case_engine([3, 1, -2], 1.0).unwrap();
        assert_eq!(r.analysis.case, AlmposCase::Case2c);
        assert!((r.analysis.theta - FRAC_PI_2).abs() < 0.31);
        assert!(r.analysis.certificate.passes(&Tolerances::default()));

        let r = almpos_case_engine([1, -1, 2], 1.0).unwrap();
        assert_eq!(r.analysis.case, AlmposCase::Case2bDegenerate);
        assert!(r.analysis.theta < 0.11);
        assert!((r.analysis.center_values.unwrap().g - 0.5).abs() < 1e-15);
        assert!(r.analysis.certificate.passes(&Tolerances::default()));

        let r = almpos_case_engine([2, -1, 3], 1.0).unwrap();
        assert_eq!(r.analysis.case, AlmposCase::Case2b);
        let c2 = r.analysis.theta_center.cos().powi(2);
        assert!((c2 - 0.75).abs() < 1e-12);
        let g0 = hg_values(r.analysis.theta_center, [2, -1, 3]).unwrap().g;
        assert!((g0 - 2.0 / 3.0).abs() < 1e-12);
        assert!(r.analysis.certificate.passes(&Tolerances::default()));

        assert_eq!(almpos_case_engine([1, -1, 0], 1.0).unwrap_err(), Error::NotCandidate([1, -1, 0]));
        assert_eq!(almpos_case_engine([2, 4, 1], 1.0).unwrap_err(), Error::NotPairwiseCoprime([2, 4, 1]));
    }

    #[test]
    fn case_2a_closed_forms() {
        // q2 + q3 > 0 with q2 < 0 < q3
        let q = [5, -2, 3];
        assert!(applicable_cases(q).contains(&AlmposCase::Case2a));
        let r = analyze_case(q, AlmposCase::Case2a, 1.0).unwrap();
        let v = hg_values(r.theta_center, q).unwrap();
        assert!((v.g - 1.0).abs() < 1e-12);
        let (q1, q2, q3, p3) = (5.0, -2.0, 3.0, 6.0);
        assert!((v.h.unwrap() - (q2 - q3) * q1 / (q2 * p3 - q1 * q3)).abs() < 1e-12);
        assert!(r.certificate.passes(&Tolerances::default()));
    }

    #[test]
    fn every_small_candidate_is_certified() {
        let engine = CurvatureEngine::deformed(1.0).unwrap();
        let cat = candidate_catalog(6);
        assert!(!cat.is_empty());
        for q in cat {
            for case in applicable_cases(q) {
                let r = analyze_case_with(&engine, q, case, 1.0).unwrap();
                assert!(r.certificate.passes(&Tolerances::default()), "{q:?} {case}");
            }
        }
    }
}
