//! The Lie algebra su(3) and the group SU(3) as 3x3 complex matrices.
//!
//! `k` is the u(2) block (zero third row and column off the diagonal) and `p`
//! its orthogonal complement, spanned by the (1,3) and (2,3) entries.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix3, SVector, Vector2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::triples::PQPair;

pub type C64 = Complex64;
pub type Mat3 = Matrix3<C64>;
/// Coordinates in the fixed `inner0`-orthonormal basis of su(3).
pub type Coords = SVector<f64, 8>;

/// Default Cheeger parameter.
pub const DEFAULT_T: f64 = 1.0;
/// Default absolute tolerance for matrix identities.
pub const DEFAULT_TOL: f64 = 1e-10;

const ALGEBRA_TOL: f64 = 1e-12;
const GROUP_TOL: f64 = 1e-10;
/// Inputs farther than this from SU(3) are rejected instead of re-orthonormalized.
const REPAIR_LIMIT: f64 = 1e-4;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_abs(m: &Mat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// An element of su(3): traceless skew-Hermitian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su3Vector(Mat3);

impl Su3Vector {
    pub fn new(m: Mat3) -> Result<Self> {
        let skew = max_abs(&(m + m.adjoint()));
        let tr = m.trace().norm();
        if skew > ALGEBRA_TOL || tr > ALGEBRA_TOL {
            return Err(Error::NotInAlgebra(format!(
                "|X + X*| = {skew:e}, |tr X| = {tr:e}"
            )));
        }
        Ok(Su3Vector(m))
    }

    pub fn zero() -> Self {
        Su3Vector(Mat3::zeros())
    }

    /// `i * diag(d)` for a real traceless `d`.
    pub fn diag_i(d: [f64; 3]) -> Result<Self> {
        Self::new(Mat3::from_diagonal(&nalgebra::Vector3::new(
            c(0.0, d[0]),
            c(0.0, d[1]),
            c(0.0, d[2]),
        )))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn coords(&self) -> Coords {
        let b = basis();
        Coords::from_fn(|a, _| inner0(self, &b[a]))
    }

    pub fn from_coords(x: &Coords) -> Self {
        let b = basis();
        let mut m = Mat3::zeros();
        for (a, e) in b.iter().enumerate() {
            m += e.0 * c(x[a], 0.0);
        }
        Su3Vector(m)
    }

    pub fn norm0(&self) -> f64 {
        inner0(self, self).max(0.0).sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        max_abs(&self.0) <= tol
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(&self.0)
    }
}

impl Add for Su3Vector {
    type Output = Su3Vector;
    fn add(self, rhs: Su3Vector) -> Su3Vector {
        Su3Vector(self.0 + rhs.0)
    }
}

impl Sub for Su3Vector {
    type Output = Su3Vector;
    fn sub(self, rhs: Su3Vector) -> Su3Vector {
        Su3Vector(self.0 - rhs.0)
    }
}

impl Neg for Su3Vector {
    type Output = Su3Vector;
    fn neg(self) -> Su3Vector {
        Su3Vector(-self.0)
    }
}

impl Mul<Su3Vector> for f64 {
    type Output = Su3Vector;
    fn mul(self, rhs: Su3Vector) -> Su3Vector {
        Su3Vector(rhs.0 * c(self, 0.0))
    }
}

/// The basis `e_0..e_7`, orthonormal for `inner0`: four vectors spanning `k`
/// (the last proportional to `Y3`) followed by four spanning `p`.
pub fn basis() -> &'static [Su3Vector; 8] {
    static BASIS: OnceLock<[Su3Vector; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let s6 = 1.0 / 6f64.sqrt();
        let mut b = [Mat3::zeros(); 8];
        b[0][(0, 0)] = c(0.0, s2);
        b[0][(1, 1)] = c(0.0, -s2);
        b[1][(0, 1)] = c(s2, 0.0);
        b[1][(1, 0)] = c(-s2, 0.0);
        b[2][(0, 1)] = c(0.0, s2);
        b[2][(1, 0)] = c(0.0, s2);
        b[3][(0, 0)] = c(0.0, s6);
        b[3][(1, 1)] = c(0.0, s6);
        b[3][(2, 2)] = c(0.0, -2.0 * s6);
        for (slot, (i, j)) in [(4, (0, 2)), (6, (1, 2))] {
            b[slot][(i, j)] = c(s2, 0.0);
            b[slot][(j, i)] = c(-s2, 0.0);
            b[slot + 1][(i, j)] = c(0.0, s2);
            b[slot + 1][(j, i)] = c(0.0, s2);
        }
        b.map(Su3Vector)
    })
}

/// Number of basis vectors spanning `k`; the rest span `p`.
pub const K_DIM: usize = 4;

/// `<X, Y>_0 = -Re tr(XY)`.
pub fn inner0(x: &Su3Vector, y: &Su3Vector) -> f64 {
    -(x.0 * y.0).trace().re
}

/// `Y1 = i diag(-2, 1, 1)`.
pub fn y1() -> Su3Vector {
    Su3Vector::diag_i([-2.0, 1.0, 1.0]).unwrap()
}

/// `Y3 = i diag(1, 1, -2)`.
pub fn y3() -> Su3Vector {
    Su3Vector::diag_i([1.0, 1.0, -2.0]).unwrap()
}

/// Splits `X = X_k + X_p`.
pub fn split_kp(x: &Su3Vector) -> (Su3Vector, Su3Vector) {
    let mut k = x.0;
    let mut p = Mat3::zeros();
    for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
        p[(i, j)] = k[(i, j)];
        k[(i, j)] = C64::default();
    }
    (Su3Vector(k), Su3Vector(p))
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t must be positive, got {t}")))
    }
}

/// `phi(X) = t/(t+1) X_k + X_p`.
pub fn phi(x: &Su3Vector, t: f64) -> Result<Su3Vector> {
    check_t(t)?;
    let (k, p) = split_kp(x);
    Ok(t / (t + 1.0) * k + p)
}

pub fn phi_inv(x: &Su3Vector, t: f64) -> Result<Su3Vector> {
    check_t(t)?;
    let (k, p) = split_kp(x);
    Ok((t + 1.0) / t * k + p)
}

pub fn ad_bracket(x: &Su3Vector, y: &Su3Vector) -> Su3Vector {
    Su3Vector(x.0 * y.0 - y.0 * x.0)
}

/// `g X g^{-1}`.
pub fn adjoint(g: &Su3Point, x: &Su3Vector) -> Su3Vector {
    Su3Vector(g.0 * x.0 * g.0.adjoint())
}

/// A point of SU(3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su3Point(Mat3);

impl Su3Point {
    /// Accepts matrices within `1e-10` of SU(3); slightly drifted inputs are
    /// re-orthonormalized by polar decomposition, anything else is rejected.
    pub fn new(m: Mat3) -> Result<Self> {
        let drift = group_drift(&m);
        if drift <= GROUP_TOL {
            return Ok(Su3Point(m));
        }
        if drift > REPAIR_LIMIT {
            return Err(Error::NotInGroup(format!("drift {drift:e}")));
        }
        let repaired = project_to_su3(&m);
        Ok(Su3Point(repaired))
    }

    pub fn identity() -> Self {
        Su3Point(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn inverse(&self) -> Su3Point {
        Su3Point(self.0.adjoint())
    }

    pub fn mul(&self, other: &Su3Point) -> Su3Point {
        Su3Point(self.0 * other.0)
    }

    /// `diag(d)` for unit-modulus entries with product one.
    pub fn diagonal(d: [C64; 3]) -> Result<Self> {
        Self::new(Mat3::from_diagonal(&nalgebra::Vector3::new(d[0], d[1], d[2])))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.0[(i, j)].norm() <= tol))
    }

    pub fn drift(&self) -> f64 {
        group_drift(&self.0)
    }
}

/// `max(|A A* - I|, |det A - 1|)`.
pub fn group_drift(m: &Mat3) -> f64 {
    let u = max_abs(&(m * m.adjoint() - Mat3::identity()));
    let d = (m.determinant() - c(1.0, 0.0)).norm();
    u.max(d)
}

fn project_to_su3(m: &Mat3) -> Mat3 {
    let svd = m.svd(true, true);
    let u = svd.u.unwrap() * svd.v_t.unwrap();
    fix_determinant(u)
}

/// Rescales a unitary matrix by a cube root of `det^{-1}`.
fn fix_determinant(u: Mat3) -> Mat3 {
    let det = u.determinant();
    let root = C64::from_polar(1.0, -det.arg() / 3.0);
    u * root
}

/// An element of `K = U(2)` embedded as `diag(B, conj(det B))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KElement(Su3Point);

impl KElement {
    pub fn from_block(b: Matrix2<C64>) -> Result<Self> {
        let u = max_abs2(&(b * b.adjoint() - Matrix2::identity()));
        if u > GROUP_TOL {
            return Err(Error::NotInGroup(format!("2x2 block not unitary ({u:e})")));
        }
        let det = b.determinant();
        let mut m = Mat3::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = b[(i, j)];
            }
        }
        m[(2, 2)] = det.conj();
        Ok(KElement(Su3Point(m)))
    }

    /// The SU(2) element with first column `v` (normalized), `k33 = 1`.
    pub fn from_first_column(v: Vector2<C64>) -> Result<Self> {
        let n = v.norm();
        if n < 1e-300 {
            return Err(Error::InvalidParameter("zero column".into()));
        }
        let (a, b) = (v[0] / n, v[1] / n);
        Self::from_block(Matrix2::new(a, -b.conj(), b, a.conj()))
    }

    pub fn identity() -> Self {
        KElement(Su3Point::identity())
    }

    pub fn point(&self) -> &Su3Point {
        &self.0
    }

    pub fn block(&self) -> Matrix2<C64> {
        self.0 .0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// `(k11, k21)`.
    pub fn first_column(&self) -> Vector2<C64> {
        Vector2::new(self.0 .0[(0, 0)], self.0 .0[(1, 0)])
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0 .0[(i, j)]
    }

    pub fn check(m: &Su3Point, tol: f64) -> bool {
        let a = m.matrix();
        let off = [(0, 2), (1, 2), (2, 0), (2, 1)]
            .iter()
            .all(|&(i, j)| a[(i, j)].norm() <= tol);
        let det = a.fixed_view::<2, 2>(0, 0).determinant();
        off && (a[(2, 2)] - det.conj()).norm() <= tol
    }
}

fn max_abs2(m: &Matrix2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Element of the two-parameter family commuting with `Y1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZVector {
    pub beta: f64,
    pub z: C64,
}

impl ZVector {
    pub fn new(beta: f64, z: C64) -> Self {
        ZVector { beta, z }
    }

    pub fn is_zero(&self) -> bool {
        self.beta == 0.0 && self.z == C64::default()
    }

    /// `[[bi,0,0],[0,bi,z],[0,-conj z,-2bi]]`.
    pub fn materialize(&self) -> Su3Vector {
        let mut m = Mat3::zeros();
        m[(0, 0)] = c(0.0, self.beta);
        m[(1, 1)] = c(0.0, self.beta);
        m[(2, 2)] = c(0.0, -2.0 * self.beta);
        m[(1, 2)] = self.z;
        m[(2, 1)] = -self.z.conj();
        Su3Vector(m)
    }
}

/// `diag(p)` as a complex matrix times `i`.
fn i_diag(v: [i64; 3]) -> Mat3 {
    Mat3::from_diagonal(&nalgebra::Vector3::new(
        c(0.0, v[0] as f64),
        c(0.0, v[1] as f64),
        c(0.0, v[2] as f64),
    ))
}

/// The action field of the circle at `A`, left-translated to the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerticalVector {
    pub base: Su3Point,
    pub value: Su3Vector,
}

/// `Ad_{A^{-1}}(iP) - iQ`.
pub fn vertical_vector(a: &Su3Point, pair: &PQPair) -> VerticalVector {
    let m = a.0.adjoint() * i_diag(pair.p()) * a.0 - i_diag(pair.q());
    VerticalVector {
        base: *a,
        value: Su3Vector(m),
    }
}

/// `Ad_A(iP) - iQ`, the vector entering the doubled horizontal space at `(A, I)`.
pub fn doubled_normal(a: &Su3Point, pair: &PQPair) -> Su3Vector {
    Su3Vector(a.0 * i_diag(pair.p()) * a.0.adjoint() - i_diag(pair.q()))
}

/// `z * A = diag(z^p) A diag(z^q)^{-1}` for `z = e^{i angle}`.
pub fn circle_action(a: &Su3Point, pair: &PQPair, angle: f64) -> Su3Point {
    let d = |e: [i64; 3]| {
        Mat3::from_diagonal(&nalgebra::Vector3::from_fn(|i, _| {
            C64::from_polar(1.0, angle * e[i] as f64)
        }))
    };
    Su3Point(d(pair.p()) * a.0 * d(pair.q()).adjoint())
}

// ---- sampling ----

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed point of SU(3): QR of a complex Ginibre matrix with the
/// phases of `R` absorbed into `Q`, then the determinant divided out.
pub fn haar_su3<R: Rng + ?Sized>(rng: &mut R) -> Su3Point {
    loop {
        let g = Mat3::from_fn(|_, _| gaussian_c64(rng));
        if g.determinant().norm() < 1e-8 {
            continue;
        }
        let qr = g.qr();
        let (q, r) = (qr.q(), qr.r());
        let mut u = q;
        for j in 0..3 {
            let d = r[(j, j)];
            let phase = d / d.norm();
            for i in 0..3 {
                u[(i, j)] *= phase;
            }
        }
        return Su3Point(fix_determinant(u));
    }
}

/// Haar-distributed element of K = U(2).
pub fn haar_k<R: Rng + ?Sized>(rng: &mut R) -> KElement {
    loop {
        let g = Matrix2::from_fn(|_, _| gaussian_c64(rng));
        if g.determinant().norm() < 1e-8 {
            continue;
        }
        let qr = g.qr();
        let (q, r) = (qr.q(), qr.r());
        let mut u = q;
        for j in 0..2 {
            let d = r[(j, j)];
            let phase = d / d.norm();
            for i in 0..2 {
                u[(i, j)] *= phase;
            }
        }
        return KElement::from_block(u).expect("QR factor is unitary");
    }
}

/// Random element of the diagonal torus `diag(z, w, conj(zw))`.
pub fn random_torus<R: Rng + ?Sized>(rng: &mut R) -> Su3Point {
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let b = rng.random_range(0.0..std::f64::consts::TAU);
    Su3Point(Mat3::from_diagonal(&nalgebra::Vector3::new(
        C64::from_polar(1.0, a),
        C64::from_polar(1.0, b),
        C64::from_polar(1.0, -a - b),
    )))
}

/// Standard-Gaussian coordinates in the orthonormal basis.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R) -> Su3Vector {
    let x = Coords::from_fn(|_, _| rng.sample(StandardNormal));
    Su3Vector::from_coords(&x)
}

// ---- serialization: row-major list of nine [re, im] pairs ----

fn mat_to_pairs(m: &Mat3) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

fn pairs_to_mat(v: &[[f64; 2]]) -> std::result::Result<Mat3, String> {
    if v.len() != 9 {
        return Err(format!("expected 9 entries, found {}", v.len()));
    }
    Ok(Mat3::from_fn(|i, j| c(v[3 * i + j][0], v[3 * i + j][1])))
}

pub mod matrix_serde {
    //! Serde helpers for `Mat3` fields.
    use super::*;

    pub fn serialize<S: Serializer>(m: &Mat3, s: S) -> std::result::Result<S::Ok, S::Error> {
        mat_to_pairs(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Mat3, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        pairs_to_mat(&v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Su3Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_serde::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Su3Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = matrix_serde::deserialize(d)?;
        Su3Vector::new(m).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Su3Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_serde::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Su3Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = matrix_serde::deserialize(d)?;
        Su3Point::new(m).map_err(serde::de::Error::custom)
    }
}

impl Serialize for KElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for KElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = Su3Point::deserialize(d)?;
        if !KElement::check(&p, GROUP_TOL) {
            return Err(serde::de::Error::custom("matrix is not in K"));
        }
        Ok(KElement(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn e_13() -> Su3Vector {
        let mut m = Mat3::zeros();
        m[(0, 2)] = c(1.0, 0.0);
        m[(2, 0)] = c(-1.0, 0.0);
        Su3Vector::new(m).unwrap()
    }

    #[test]
    fn basis_is_orthonormal_and_adapted() {
        let b = basis();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((inner0(&b[i], &b[j]) - want).abs() < 1e-14);
            }
            let (k, p) = split_kp(&b[i]);
            if i < K_DIM {
                assert!(p.is_zero(0.0));
            } else {
                assert!(k.is_zero(0.0));
            }
        }
    }

    #[test]
    fn inner0_examples() {
        assert!((inner0(&y3(), &y3()) - 6.0).abs() < 1e-14);
        assert_eq!(inner0(&Su3Vector::zero(), &Su3Vector::zero()), 0.0);
        // -tr(diag(-2i,i,i) diag(i,i,-2i)) = -(2 - 1 + 2) = -3
        assert!((inner0(&y1(), &y3()) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_algebra_and_non_group() {
        let mut m = Mat3::zeros();
        m[(0, 0)] = c(1.0, 0.0);
        assert!(Su3Vector::new(m).is_err());
        assert!(Su3Vector::diag_i([1.0, 1.0, 1.0]).is_err());
        assert!(Su3Point::new(Mat3::identity() * c(2.0, 0.0)).is_err());
    }

    #[test]
    fn repairs_small_drift() {
        let mut rng = seeded(3);
        let a = haar_su3(&mut rng);
        let nudged = a.matrix() + Mat3::from_element(c(3e-8, -1e-8));
        let fixed = Su3Point::new(nudged).unwrap();
        assert!(fixed.drift() < 1e-12);
        assert!(max_abs(&(fixed.matrix() - a.matrix())) < 1e-6);
    }

    #[test]
    fn split_examples() {
        let (k, p) = split_kp(&y3());
        assert_eq!(k, y3());
        assert!(p.is_zero(0.0));
        let (k, p) = split_kp(&e_13());
        assert!(k.is_zero(0.0));
        assert_eq!(p, e_13());
        let (k, p) = split_kp(&(y1() + e_13()));
        assert_eq!(k, y1());
        assert_eq!(p, e_13());
    }

    #[test]
    fn phi_examples() {
        let half = phi(&y3(), 1.0).unwrap();
        assert!((half - 0.5 * y3()).is_zero(1e-15));
        assert_eq!(phi(&e_13(), 7.0).unwrap(), e_13());
        let mut rng = seeded(11);
        let x = random_vector(&mut rng);
        for t in [0.1, 1.0, 10.0] {
            let back = phi_inv(&phi(&x, t).unwrap(), t).unwrap();
            assert!((back - x).is_zero(1e-12));
        }
        assert!(phi(&x, 0.0).is_err());
        assert!(phi(&x, -1.0).is_err());
    }

    #[test]
    fn phi_is_self_adjoint() {
        let mut rng = seeded(12);
        for _ in 0..20 {
            let x = random_vector(&mut rng);
            let y = random_vector(&mut rng);
            let t = 0.3;
            let lhs = inner0(&phi(&x, t).unwrap(), &y);
            let rhs = inner0(&x, &phi(&y, t).unwrap());
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn bracket_and_adjoint_identities() {
        let mut rng = seeded(13);
        for _ in 0..50 {
            let x = random_vector(&mut rng);
            let y = random_vector(&mut rng);
            let z = random_vector(&mut rng);
            assert!(ad_bracket(&x, &x).is_zero(1e-12));
            assert!((ad_bracket(&x, &y) + ad_bracket(&y, &x)).is_zero(1e-12));
            let jacobi = ad_bracket(&x, &ad_bracket(&y, &z))
                + ad_bracket(&y, &ad_bracket(&z, &x))
                + ad_bracket(&z, &ad_bracket(&x, &y));
            assert!(jacobi.is_zero(1e-11));
            assert!(Su3Vector::new(*ad_bracket(&x, &y).matrix()).is_ok());

            let g = haar_su3(&mut rng);
            assert!(g.drift() < 1e-12);
            let (gx, gy) = (adjoint(&g, &x), adjoint(&g, &y));
            assert!((inner0(&gx, &gy) - inner0(&x, &y)).abs() < 1e-11);
            assert!((adjoint(&g, &ad_bracket(&x, &y)) - ad_bracket(&gx, &gy)).is_zero(1e-11));
        }
        let x = random_vector(&mut rng);
        assert!((adjoint(&Su3Point::identity(), &x) - x).is_zero(0.0));
    }

    #[test]
    fn split_is_orthogonal_projection() {
        let mut rng = seeded(14);
        for _ in 0..20 {
            let x = random_vector(&mut rng);
            let (k, p) = split_kp(&x);
            assert!((k + p - x).is_zero(1e-15));
            assert!(inner0(&k, &p).abs() < 1e-14);
            assert_eq!(split_kp(&k).0, k);
            assert_eq!(split_kp(&p).1, p);
        }
    }

    #[test]
    fn centralizers() {
        let mut rng = seeded(15);
        for _ in 0..20 {
            let z = ZVector::new(rng.random_range(-2.0..2.0), c(rng.random(), rng.random()));
            let zm = z.materialize();
            assert!(Su3Vector::new(*zm.matrix()).is_ok());
            assert!(ad_bracket(&y1(), &zm).is_zero(1e-12));
            let (xk, _) = split_kp(&random_vector(&mut rng));
            assert!(ad_bracket(&y3(), &xk).is_zero(1e-12));
        }
    }

    #[test]
    fn adjoint_by_k_preserves_split() {
        let mut rng = seeded(16);
        for _ in 0..20 {
            let k = haar_k(&mut rng);
            assert!(KElement::check(k.point(), 1e-12));
            assert!(k.point().drift() < 1e-12);
            let (xk, xp) = split_kp(&random_vector(&mut rng));
            let (_, leak_p) = split_kp(&adjoint(k.point(), &xk));
            let (leak_k, _) = split_kp(&adjoint(k.point(), &xp));
            assert!(leak_p.is_zero(1e-12));
            assert!(leak_k.is_zero(1e-12));
        }
    }

    #[test]
    fn vertical_vector_examples() {
        let pair = PQPair::new([0, 1, 1], [0, 0, 2]).unwrap();
        let v = vertical_vector(&Su3Point::identity(), &pair);
        assert!((v.value - Su3Vector::diag_i([0.0, 1.0, -1.0]).unwrap()).is_zero(1e-15));
        let same = PQPair::new([1, 2, 3], [1, 2, 3]).unwrap();
        assert!(vertical_vector(&Su3Point::identity(), &same).value.is_zero(0.0));
        let mut rng = seeded(17);
        let pair = PQPair::new([0, 0, 3], [1, 1, 1]).unwrap();
        for _ in 0..20 {
            let a = haar_su3(&mut rng);
            let v = vertical_vector(&a, &pair);
            assert!(v.value.matrix().trace().norm() < 1e-12);
            assert!(Su3Vector::new(*v.value.matrix()).is_ok());
            assert_eq!(vertical_vector(&v.base, &pair).value, v.value);
        }
    }

    #[test]
    fn coords_round_trip() {
        let mut rng = seeded(18);
        let x = random_vector(&mut rng);
        let back = Su3Vector::from_coords(&x.coords());
        assert!((back - x).is_zero(1e-14));
    }

    #[test]
    fn k_from_first_column() {
        let k = KElement::from_first_column(Vector2::new(c(0.0, 0.0), c(1.0, 0.0))).unwrap();
        assert_eq!(k.first_column(), Vector2::new(c(0.0, 0.0), c(1.0, 0.0)));
        assert_eq!(k.entry(2, 2), c(1.0, 0.0));
    }

    #[test]
    fn matrix_json_is_row_major_pairs() {
        let s = serde_json::to_string(&Su3Point::identity()).unwrap();
        assert_eq!(
            s,
            "[[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0],[1.0,0.0]]"
        );
        let back: Su3Point = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Su3Point::identity());
    }
}
