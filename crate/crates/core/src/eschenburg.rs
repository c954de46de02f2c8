//! Zero-curvature planes of the Eschenburg metric on `E_{p,q}`.
//!
//! At `[A]` a flat plane exists once `Y3` or some `Ad_k Y1` is horizontal.
//! The first condition is a linear identity in `|a_j3|^2`; the second asks
//! for a zero of `f_A(k) = v* H_A v` on the unit sphere of `C^2`, where `v`
//! is the first column of the `SU(2)` block of `k`.

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{zero_criterion_residuals, CurvatureEngine, TwoPlane};
use crate::error::{Error, Result};
use crate::rng::sample_rng;
use crate::su3::{
    self, adjoint, basis, c, haar_su3, inner0, phi, random_torus, split_kp, vertical_vector,
    KElement, Su3Point, Su3Vector, C64,
};
use crate::tolerance::Tolerances;
use crate::triples::{
    classify, is_admissible, negcase_analysis, CurvatureClass, Move, NegCase, PQPair, Perm3,
};

pub const DEFAULT_SAMPLES: usize = 1000;

const STREAM_CASE: u64 = 0x4341_5345;
const STREAM_U: u64 = 0x5553_4554;
const STREAM_DIAG: u64 = 0x4449_4147;
const STREAM_NEG: u64 = 0x4e45_4743;

// ---- equation (2.3): Y3 horizontal ----

/// `sum_j |a_j3|^2 p_j - q_3`.
pub fn eq23_residual(a: &Su3Point, pair: &PQPair) -> f64 {
    let p = pair.p();
    (0..3).map(|j| a.entry(j, 2).norm_sqr() * p[j] as f64).sum::<f64>() - pair.q()[2] as f64
}

/// Whether `Y3` is horizontal at `A`, with the residual.
pub fn eq23_holds(a: &Su3Point, pair: &PQPair, tol: f64) -> (bool, f64) {
    let r = eq23_residual(a, pair);
    (r.abs() < tol, r)
}

// ---- equation (2.4): Ad_k Y1 horizontal ----

/// `H_A = C* diag(p) C - diag(q1, q2)` with `C` the first two columns of `A`.
pub fn hermitian_form(a: &Su3Point, pair: &PQPair) -> Matrix2<C64> {
    let p = pair.p();
    let q = pair.q();
    let mut h = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut s = C64::default();
            for r in 0..3 {
                s += a.entry(r, i).conj() * a.entry(r, j) * p[r] as f64;
            }
            h[(i, j)] = s;
        }
    }
    h[(0, 0)] -= c(q[0] as f64, 0.0);
    h[(1, 1)] -= c(q[1] as f64, 0.0);
    // exactly Hermitian
    (h + h.adjoint()) * c(0.5, 0.0)
}

/// `sum_j |(Ak)_j1|^2 p_j`, which always lies in `[min p, max p]`.
pub fn first_column_weight(a: &Su3Point, pair: &PQPair, k: &KElement) -> f64 {
    let ak = a.mul(k.point());
    let p = pair.p();
    (0..3).map(|j| ak.entry(j, 0).norm_sqr() * p[j] as f64).sum()
}

/// `f_A(k) = sum_j |(Ak)_j1|^2 p_j - |k11|^2 q1 - |k21|^2 q2`.
pub fn f_a(a: &Su3Point, pair: &PQPair, k: &KElement) -> f64 {
    let q = pair.q();
    first_column_weight(a, pair, k)
        - k.entry(0, 0).norm_sqr() * q[0] as f64
        - k.entry(1, 0).norm_sqr() * q[1] as f64
}

/// `v* H v`.
pub fn quadratic_form(h: &Matrix2<C64>, v: &Vector2<C64>) -> f64 {
    (v.adjoint() * h * v)[(0, 0)].re
}

/// Ascending eigenpairs of a Hermitian 2x2 matrix.
fn eigenpairs(h: &Matrix2<C64>) -> ([f64; 2], [Vector2<C64>; 2]) {
    let se = h.symmetric_eigen();
    let (lo, hi) = if se.eigenvalues[0] <= se.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    (
        [se.eigenvalues[lo], se.eigenvalues[hi]],
        [
            se.eigenvectors.column(lo).into_owned(),
            se.eigenvectors.column(hi).into_owned(),
        ],
    )
}

/// A unit `v` with `v* H v = 0` built from the eigenvectors, if one exists.
fn eigen_witness(h: &Matrix2<C64>, tol: f64) -> Option<Vector2<C64>> {
    let ([lmin, lmax], [umin, umax]) = eigenpairs(h);
    if lmin > tol || lmax < -tol {
        return None;
    }
    if lmin.abs() <= tol {
        return Some(umin);
    }
    if lmax.abs() <= tol {
        return Some(umax);
    }
    // lmin < 0 < lmax: cos^2 s lmin + sin^2 s lmax = 0
    let s = (-lmin / lmax).sqrt().atan();
    Some(umin * c(s.cos(), 0.0) + umax * c(s.sin(), 0.0))
}

/// `k` with `|f_A(k)| < tol`, decided by the eigenvalues of `H_A`.
pub fn solve_eq24(a: &Su3Point, pair: &PQPair, tol: f64) -> Option<KElement> {
    let h = hermitian_form(a, pair);
    let v = eigen_witness(&h, tol)?;
    KElement::from_first_column(v).ok()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizontalityReport {
    #[serde(rename = "A")]
    pub a: Su3Point,
    pub eq23_lhs_minus_rhs: f64,
    /// Row-major `[re, im]` entries of `H_A`.
    pub hermitian_form: [[f64; 2]; 4],
    pub eigen_min: f64,
    pub eigen_max: f64,
    pub solvable_23: bool,
    pub solvable_24: bool,
    pub witness_k: Option<KElement>,
}

pub fn horizontality_report(a: &Su3Point, pair: &PQPair, tol: f64) -> HorizontalityReport {
    let h = hermitian_form(a, pair);
    let ([lmin, lmax], _) = eigenpairs(&h);
    let (solvable_23, r23) = eq23_holds(a, pair, tol);
    let witness_k = solve_eq24(a, pair, tol);
    HorizontalityReport {
        a: *a,
        eq23_lhs_minus_rhs: r23,
        hermitian_form: [
            [h[(0, 0)].re, h[(0, 0)].im],
            [h[(0, 1)].re, h[(0, 1)].im],
            [h[(1, 0)].re, h[(1, 0)].im],
            [h[(1, 1)].re, h[(1, 1)].im],
        ],
        eigen_min: lmin,
        eigen_max: lmax,
        solvable_23,
        solvable_24: lmin <= tol && lmax >= -tol,
        witness_k,
    }
}

// ---- independent intermediate-value decision ----

/// Outcome of the path-based search for a zero of `f_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct IvtOutcome {
    pub solvable: bool,
    pub path_min: f64,
    pub path_max: f64,
    pub witness: Option<Vector2<C64>>,
}

fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a < 1e-15 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    // a sinusoid on a half period may peak inside, so compare with the ends
    [(x1, f1), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((x1, f1), |acc, c| if c.1 < acc.1 { c } else { acc })
}

/// Decides solvability without eigenvalues. Along `v(s) = (cos s, e^{i psi} sin s)`
/// the form is `H11 cos^2 s + H22 sin^2 s + Re(H12 e^{i psi}) sin 2s`; the two
/// phases aligned with `-+ H12` give the extreme values for each `|v1|`. Walk
/// from the minimum through `v = (1, 0)` to the maximum and bisect.
pub fn ivt_solve(h: &Matrix2<C64>, tol: f64) -> IvtOutcome {
    let h12 = h[(0, 1)];
    let m = h12.norm();
    let unit = if m > 0.0 { h12.conj() / m } else { c(1.0, 0.0) };
    let (h11, h22) = (h[(0, 0)].re, h[(1, 1)].re);
    let lower = |s: f64| h11 * s.cos().powi(2) + h22 * s.sin().powi(2) - m * (2.0 * s).sin();
    let upper = |s: f64| h11 * s.cos().powi(2) + h22 * s.sin().powi(2) + m * (2.0 * s).sin();
    let half = std::f64::consts::FRAC_PI_2;
    let (smin, fmin) = golden_min(lower, 0.0, half);
    let (smax, neg_fmax) = golden_min(|s| -upper(s), 0.0, half);
    let fmax = -neg_fmax;
    let phase_lo = -unit;
    let phase_hi = unit;
    let point = |tau: f64| -> Vector2<C64> {
        // tau in [-1, 0]: lower path from smin back to 0; tau in [0, 1]: upper path to smax
        if tau <= 0.0 {
            let s = -tau * smin;
            Vector2::new(c(s.cos(), 0.0), phase_lo * s.sin())
        } else {
            let s = tau * smax;
            Vector2::new(c(s.cos(), 0.0), phase_hi * s.sin())
        }
    };
    let value = |tau: f64| quadratic_form(h, &point(tau));
    let solvable = fmin <= tol && fmax >= -tol;
    let witness = if !solvable {
        None
    } else if fmin.abs() <= tol {
        Some(point(-1.0))
    } else if fmax.abs() <= tol {
        Some(point(1.0))
    } else {
        let (mut a, mut b) = (-1.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if value(mid) <= 0.0 {
                a = mid;
            } else {
                b = mid;
            }
            if b - a < 1e-16 {
                break;
            }
        }
        Some(point(0.5 * (a + b)))
    };
    IvtOutcome {
        solvable,
        path_min: fmin,
        path_max: fmax,
        witness,
    }
}

/// Sign change of `f_A` along the real rotation `(cos s, sin s)`, `s` in `[0, pi/2]`.
/// This is not a decision procedure: it misses zeros reached only through
/// complex phases.
pub fn real_rotation_sign_change(h: &Matrix2<C64>) -> bool {
    let f = |s: f64| quadratic_form(h, &Vector2::new(c(s.cos(), 0.0), c(s.sin(), 0.0)));
    let n = 256;
    let vals: Vec<f64> = (0..=n)
        .map(|i| f(i as f64 * std::f64::consts::FRAC_PI_2 / n as f64))
        .collect();
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

// ---- certificates ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    ViaY3,
    ViaAdkY1,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateResiduals {
    /// Residual of the horizontality equation that was solved.
    pub equation: f64,
    /// Largest `|<phi X, V>_0|` over the two unit spanning vectors.
    pub horizontality: f64,
    /// Largest bracket norm in the zero criterion.
    pub bracket: f64,
    /// Norm of the `k`-part of the companion (only constrained for `ViaAdkY1`).
    pub companion_k_part: f64,
    /// Oracle curvature of the plane in the deformed metric.
    pub curvature: f64,
}

impl CertificateResiduals {
    pub fn within(&self, tol: &Tolerances) -> bool {
        self.equation < tol.certificate
            && self.horizontality < tol.certificate
            && self.bracket < tol.certificate
            && self.companion_k_part < tol.certificate
            && self.curvature.abs() < tol.curvature
    }
}

/// A horizontal flat plane at `A`, replayable from `(A, k, X)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroPlaneCertificate {
    #[serde(rename = "A")]
    pub a: Su3Point,
    pub kind: CertificateKind,
    pub k: Option<KElement>,
    #[serde(rename = "X")]
    pub companion: Su3Vector,
    pub residuals: CertificateResiduals,
}

impl ZeroPlaneCertificate {
    /// `Y3` or `Ad_k Y1`.
    pub fn primary(&self) -> Su3Vector {
        match (self.kind, &self.k) {
            (CertificateKind::ViaAdkY1, Some(k)) => adjoint(k.point(), &su3::y1()),
            _ => su3::y3(),
        }
    }

    pub fn plane(&self) -> TwoPlane {
        TwoPlane::at(self.a, self.primary(), self.companion)
    }
}

pub fn adk_y1(k: &KElement) -> Su3Vector {
    adjoint(k.point(), &su3::y1())
}

/// Picks a unit vector of `span(gens)` orthogonal to `v`: the generator
/// least aligned with `v`, with its `v`-component removed.
fn orthogonal_combination(gens: &[Su3Vector], v: &Su3Vector) -> Su3Vector {
    let w: Vec<f64> = gens.iter().map(|g| inner0(g, v)).collect();
    let wn: f64 = w.iter().map(|x| x * x).sum();
    let j = (0..gens.len())
        .min_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs()))
        .expect("non-empty generator list");
    let mut x = gens[j];
    if wn > 1e-300 {
        for (g, wi) in gens.iter().zip(&w) {
            x = x - (w[j] * wi / wn) * *g;
        }
    }
    (1.0 / x.norm0()) * x
}

fn residuals_for(
    engine: &CurvatureEngine,
    a: &Su3Point,
    pair: &PQPair,
    t: f64,
    kind: CertificateKind,
    k: Option<&KElement>,
    primary: &Su3Vector,
    companion: &Su3Vector,
) -> Result<CertificateResiduals> {
    let v = vertical_vector(a, pair).value;
    let horiz = |x: &Su3Vector| -> Result<f64> {
        Ok(inner0(&phi(&((1.0 / x.norm0()) * *x), t)?, &v).abs())
    };
    let equation = match (kind, k) {
        (CertificateKind::ViaY3, _) => eq23_residual(a, pair).abs(),
        (CertificateKind::ViaAdkY1, Some(k)) => f_a(a, pair, k).abs(),
        (CertificateKind::ViaAdkY1, None) => {
            return Err(Error::PreconditionFailed("ViaAdkY1 certificate without k".into()))
        }
    };
    let plane = TwoPlane::at(*a, *primary, *companion);
    let (full, block) = zero_criterion_residuals(&plane, t)?;
    let companion_k_part = match kind {
        CertificateKind::ViaY3 => 0.0,
        CertificateKind::ViaAdkY1 => split_kp(companion).0.norm0(),
    };
    Ok(CertificateResiduals {
        equation,
        horizontality: horiz(primary)?.max(horiz(companion)?),
        bracket: full.max(block),
        companion_k_part,
        curvature: engine.sectional_curvature(&plane)?,
    })
}

/// Builds a flat horizontal plane at `A` when (2.3) or (2.4) is solvable.
pub fn build_certificate_with(
    engine: &CurvatureEngine,
    a: &Su3Point,
    pair: &PQPair,
    t: f64,
    tol: &Tolerances,
) -> Option<ZeroPlaneCertificate> {
    let v = vertical_vector(a, pair).value;
    let b = basis();
    let (kind, k, primary, companion) = if eq23_holds(a, pair, tol.horizontality).0 {
        // Y3 commutes with all of k; take X in k, orthogonal to Y3 and to V
        let x = orthogonal_combination(&b[0..3], &v);
        (CertificateKind::ViaY3, None, su3::y3(), x)
    } else {
        let k = solve_eq24(a, pair, tol.horizontality)?;
        // Ad_k of the (2,3)-block of p commutes with Ad_k Y1
        let gens = [adjoint(k.point(), &b[6]), adjoint(k.point(), &b[7])];
        let x = orthogonal_combination(&gens, &v);
        (CertificateKind::ViaAdkY1, Some(k), adk_y1(&k), x)
    };
    let residuals = residuals_for(engine, a, pair, t, kind, k.as_ref(), &primary, &companion).ok()?;
    Some(ZeroPlaneCertificate {
        a: *a,
        kind,
        k,
        companion,
        residuals,
    })
}

pub fn build_certificate(a: &Su3Point, pair: &PQPair, t: f64) -> Result<Option<ZeroPlaneCertificate>> {
    let engine = CurvatureEngine::deformed(t)?;
    Ok(build_certificate_with(&engine, a, pair, t, &Tolerances::default()))
}

/// Recomputes every residual of a certificate from `(A, k, X)`.
pub fn replay_certificate(
    engine: &CurvatureEngine,
    cert: &ZeroPlaneCertificate,
    pair: &PQPair,
    t: f64,
) -> Result<CertificateResiduals> {
    residuals_for(
        engine,
        &cert.a,
        pair,
        t,
        cert.kind,
        cert.k.as_ref(),
        &cert.primary(),
        &cert.companion,
    )
}

// ---- case verification ----

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    fn of(xs: impl Iterator<Item = f64>) -> Stats {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for x in xs {
            min = min.min(x);
            max = max.max(x);
            sum += x;
            n += 1;
        }
        if n == 0 {
            return Stats::default();
        }
        Stats {
            min,
            max,
            mean: sum / n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Check {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Counts for the open set `U` where `f_A(I) < 0 < f_A(k_(0,1))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenSetReport {
    pub normalized: PQPair,
    pub draws: usize,
    pub in_u: usize,
    pub in_u_certified: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub normalized: PQPair,
    pub samples: usize,
    pub certified: usize,
}

/// The explicit `k` choices of the flat-everywhere proof, evaluated on the
/// sub-case representative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegCaseChoices {
    pub case: NegCase,
    pub representative: PQPair,
    pub samples: usize,
    /// Points where the choice meant to give `f_A >= 0` does so.
    pub nonneg_ok: usize,
    /// Points where the choice meant to give `f_A <= 0` does so.
    pub nonpos_ok: usize,
    /// Largest gap between `f_A` and the closed form used in the proof.
    pub closed_form_defect: f64,
    /// Case 2 only: largest `|a31 k11 + a32 k21|` for the matrix built from
    /// `(conj a32, -conj a31)`, which is meant to vanish.
    pub literal_annihilator_defect: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseVerdictReport {
    pub pair: PQPair,
    pub class: CurvatureClass,
    pub theorem_case: u8,
    pub samples: usize,
    pub seed: u64,
    pub t: f64,
    pub certified: usize,
    pub via_y3: usize,
    pub via_adk_y1: usize,
    pub fraction: f64,
    pub max_residual: f64,
    pub eigen_min: Stats,
    pub eigen_max: Stats,
    pub open_set: Option<OpenSetReport>,
    pub diagonal: Option<DiagonalReport>,
    pub negcase: Option<NegCaseChoices>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Reorders `p` so that `p1 - q1 < 0 < p2 - q2`.
fn normalize_for_u(pair: &PQPair) -> Option<PQPair> {
    let (p, q) = pair.as_tuple();
    Perm3::ALL.iter().find_map(|s| {
        let pp = s.apply(p);
        (pp[0] < q[0] && pp[1] > q[1]).then(|| PQPair::new(pp, q).expect("permutation keeps sums"))
    })
}

/// Reorders `p` so that `(p1 - q1)(p2 - q2) > 0`.
fn normalize_for_diagonal(pair: &PQPair) -> Option<PQPair> {
    let (p, q) = pair.as_tuple();
    Perm3::ALL.iter().find_map(|s| {
        let pp = s.apply(p);
        ((pp[0] as i128 - q[0] as i128) * (pp[1] as i128 - q[1] as i128) > 0)
            .then(|| PQPair::new(pp, q).expect("permutation keeps sums"))
    })
}

pub fn in_open_set_u(a: &Su3Point, normalized: &PQPair) -> bool {
    let p = normalized.p();
    let q = normalized.q();
    let col = |j: usize| (0..3).map(|i| a.entry(i, j).norm_sqr() * p[i] as f64).sum::<f64>();
    col(0) < q[0] as f64 && col(1) > q[1] as f64
}

fn k_from_column(v0: C64, v1: C64) -> Option<KElement> {
    KElement::from_first_column(Vector2::new(v0, v1)).ok()
}

fn k01() -> KElement {
    k_from_column(c(0.0, 0.0), c(1.0, 0.0)).expect("unit column")
}

fn negcase_choices(
    pair: &PQPair,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<NegCaseChoices> {
    let report = negcase_analysis(pair)?;
    let mut rep = report.representative;
    if report.case == NegCase::Case1 && rep.q()[0] > rep.q()[1] {
        rep = crate::triples::apply_move(&rep, Move::PermQ(Perm3::T12))?;
    }
    let rows: Vec<(bool, bool, f64, Option<f64>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, STREAM_NEG, i as u64);
            let a = haar_su3(&mut rng);
            let e = |i: usize, j: usize| a.entry(i, j);
            match report.case {
                NegCase::Case1 => {
                    let f0 = f_a(&a, &rep, &KElement::identity());
                    let f1 = f_a(&a, &rep, &k01());
                    (f0 >= -tol, f1 <= tol, 0.0, None)
                }
                NegCase::Case2 => {
                    let closed = |k: &KElement| {
                        2.0 * (e(2, 0) * k.entry(0, 0) + e(2, 1) * k.entry(1, 0)).norm_sqr()
                            - k.entry(1, 0).norm_sqr()
                    };
                    let id = KElement::identity();
                    let f0 = f_a(&a, &rep, &id);
                    let n = (e(2, 0).norm_sqr() + e(2, 1).norm_sqr()).sqrt();
                    let corrected = k_from_column(e(2, 1) / n, -e(2, 0) / n).expect("unit");
                    let literal = k_from_column(e(2, 1).conj() / n, -e(2, 0).conj() / n).expect("unit");
                    let f1 = f_a(&a, &rep, &corrected);
                    let defect = (f0 - closed(&id))
                        .abs()
                        .max((f1 - closed(&corrected)).abs())
                        .max((f_a(&a, &rep, &literal) - closed(&literal)).abs());
                    let lit = (e(2, 0) * literal.entry(0, 0) + e(2, 1) * literal.entry(1, 0)).norm();
                    (f0 >= -tol, f1 <= tol, defect, Some(lit))
                }
                NegCase::Case3 => {
                    let closed = |k: &KElement| {
                        -(e(0, 0) * k.entry(0, 0) + e(0, 1) * k.entry(1, 0)).norm_sqr()
                            + (e(2, 0) * k.entry(0, 0) + e(2, 1) * k.entry(1, 0)).norm_sqr()
                    };
                    let n1 = (e(0, 0).norm_sqr() + e(0, 1).norm_sqr()).sqrt();
                    let n3 = (e(2, 0).norm_sqr() + e(2, 1).norm_sqr()).sqrt();
                    let kill_first = k_from_column(e(0, 1) / n1, -e(0, 0) / n1).expect("unit");
                    let kill_third = k_from_column(e(2, 1) / n3, -e(2, 0) / n3).expect("unit");
                    let f0 = f_a(&a, &rep, &kill_first);
                    let f1 = f_a(&a, &rep, &kill_third);
                    let defect = (f0 - closed(&kill_first)).abs().max((f1 - closed(&kill_third)).abs());
                    (f0 >= -tol, f1 <= tol, defect, None)
                }
            }
        })
        .collect();
    let literal = rows
        .iter()
        .filter_map(|r| r.3)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |m| m.max(x))));
    Ok(NegCaseChoices {
        case: report.case,
        representative: rep,
        samples,
        nonneg_ok: rows.iter().filter(|r| r.0).count(),
        nonpos_ok: rows.iter().filter(|r| r.1).count(),
        closed_form_defect: rows.iter().map(|r| r.2).fold(0.0, f64::max),
        literal_annihilator_defect: literal,
    })
}

/// Samples Haar points and checks the behaviour the classification predicts.
pub fn verify_case(
    pair: &PQPair,
    samples: usize,
    seed: u64,
    t: f64,
    tol: &Tolerances,
) -> Result<CaseVerdictReport> {
    if !is_admissible(pair) {
        return Err(Error::NotAdmissible {
            p: pair.p(),
            q: pair.q(),
        });
    }
    let class = classify(pair)?.class;
    let theorem_case = match class {
        CurvatureClass::PositivelyCurved => 1,
        CurvatureClass::AlmostPositive => 2,
        CurvatureClass::QuasiPositive => 3,
        CurvatureClass::FlatPlaneEverywhere => 4,
    };
    let engine = CurvatureEngine::deformed(t)?;
    let results: Vec<(Option<ZeroPlaneCertificate>, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, STREAM_CASE, i as u64);
            let a = haar_su3(&mut rng);
            let ([lmin, lmax], _) = eigenpairs(&hermitian_form(&a, pair));
            let cert = build_certificate_with(&engine, &a, pair, t, tol)
                .filter(|c| c.residuals.within(tol));
            (cert, lmin, lmax)
        })
        .collect();
    let certs: Vec<&ZeroPlaneCertificate> = results.iter().filter_map(|r| r.0.as_ref()).collect();
    let certified = certs.len();
    let via_y3 = certs.iter().filter(|c| c.kind == CertificateKind::ViaY3).count();
    let max_residual = certs
        .iter()
        .map(|c| {
            let r = c.residuals;
            r.equation.max(r.horizontality).max(r.bracket).max(r.companion_k_part).max(r.curvature.abs())
        })
        .fold(0.0, f64::max);
    let fraction = if samples == 0 { 0.0 } else { certified as f64 / samples as f64 };
    let mut checks = Vec::new();

    let diagonal = normalize_for_diagonal(pair).map(|norm| {
        let n = samples.min(200).max(1);
        let certified = (0..n)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = sample_rng(seed, STREAM_DIAG, i as u64);
                let d = random_torus(&mut rng);
                build_certificate_with(&engine, &d, &norm, t, tol).is_some()
            })
            .count();
        DiagonalReport {
            normalized: norm,
            samples: n,
            certified,
        }
    });

    let mut open_set = None;
    let mut negcase = None;
    match theorem_case {
        1 => checks.push(Check::new(
            "no flat planes",
            certified == 0,
            format!("{certified} of {samples} points certified"),
        )),
        2 => {}
        3 => {
            let norm = normalize_for_u(pair).expect("a negative product exists");
            let draws = samples * 20;
            let hits: Vec<bool> = (0..draws)
                .into_par_iter()
                .filter_map(|i| {
                    let mut rng = sample_rng(seed, STREAM_U, i as u64);
                    let a = haar_su3(&mut rng);
                    in_open_set_u(&a, &norm).then(|| {
                        build_certificate_with(&engine, &a, &norm, t, tol)
                            .is_some_and(|c| c.residuals.within(tol))
                    })
                })
                .collect();
            let hits = &hits[..hits.len().min(samples)];
            let rep = OpenSetReport {
                normalized: norm,
                draws,
                in_u: hits.len(),
                in_u_certified: hits.iter().filter(|&&b| b).count(),
            };
            checks.push(Check::new(
                "every point of U certified",
                rep.in_u > 0 && rep.in_u == rep.in_u_certified,
                format!("{} of {} points in U certified", rep.in_u_certified, rep.in_u),
            ));
            checks.push(Check::new(
                "fraction strictly between 0 and 1",
                certified > 0 && certified < samples,
                format!("fraction {fraction}"),
            ));
            open_set = Some(rep);
        }
        _ => {
            checks.push(Check::new(
                "flat plane at every point",
                certified == samples,
                format!("{certified} of {samples} points certified"),
            ));
            let choices = negcase_choices(pair, samples, seed, tol.horizontality)?;
            checks.push(Check::new(
                "explicit k choices bracket zero",
                choices.nonneg_ok == choices.samples && choices.nonpos_ok == choices.samples,
                format!(
                    "{:?}: nonneg {} nonpos {} of {}",
                    choices.case, choices.nonneg_ok, choices.nonpos_ok, choices.samples
                ),
            ));
            checks.push(Check::new(
                "closed forms of f_A",
                choices.closed_form_defect < tol.identity,
                format!("defect {:e}", choices.closed_form_defect),
            ));
            negcase = Some(choices);
        }
    }
    if theorem_case <= 3 {
        if let Some(d) = &diagonal {
            checks.push(Check::new(
                "no flat planes at diagonal points",
                d.certified == 0,
                format!("{} of {} diagonal points certified", d.certified, d.samples),
            ));
        }
    }
    checks.push(Check::new(
        "certificate residuals",
        max_residual < tol.certificate.max(tol.curvature),
        format!("max residual {max_residual:e}"),
    ));
    let passed = checks.iter().all(|c| c.passed);
    Ok(CaseVerdictReport {
        pair: *pair,
        class,
        theorem_case,
        samples,
        seed,
        t,
        certified,
        via_y3,
        via_adk_y1: certified - via_y3,
        fraction,
        max_residual,
        eigen_min: Stats::of(results.iter().map(|r| r.1)),
        eigen_max: Stats::of(results.iter().map(|r| r.2)),
        open_set,
        diagonal,
        negcase,
        checks,
        passed,
    })
}
