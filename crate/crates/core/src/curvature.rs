//! Sectional curvature of left-invariant metrics on SU(3).
//!
//! A metric is `<X, Y> = <X, phi(Y)>_0` for a positive operator `phi`, stored
//! as its matrix in the basis of [`su3::basis`]. The Levi-Civita connection
//! comes from the Koszul formula, and the full curvature tensor is
//! precomputed once per metric.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::sample_rng;
use crate::su3::{
    self, ad_bracket, basis, inner0, phi, split_kp, vertical_vector, Coords, KElement, Su3Point,
    Su3Vector, K_DIM,
};
use crate::triples::PQPair;

pub type Mat8 = SMatrix<f64, 8, 8>;

/// Zero-curvature threshold on Gram-normalized curvature.
pub const CURVATURE_TOL: f64 = 1e-8;
/// Threshold on bracket norms in the zero criterion.
pub const BRACKET_TOL: f64 = 1e-10;
/// Planes with a normalized Gram determinant below this are rejected.
pub const DEGENERACY_TOL: f64 = 1e-12;
pub const DEFAULT_RESTARTS: usize = 64;

/// `C[a][b][c] = <[e_a, e_b], e_c>_0`.
pub fn structure_constants() -> &'static [[[f64; 8]; 8]; 8] {
    static C: OnceLock<[[[f64; 8]; 8]; 8]> = OnceLock::new();
    C.get_or_init(|| {
        let b = basis();
        let mut c = [[[0.0; 8]; 8]; 8];
        for i in 0..8 {
            for j in 0..8 {
                let br = ad_bracket(&b[i], &b[j]);
                for k in 0..8 {
                    c[i][j][k] = inner0(&br, &b[k]);
                }
            }
        }
        c
    })
}

/// The bracket in coordinates.
pub fn bracket_coords(x: &Coords, y: &Coords) -> Coords {
    let c = structure_constants();
    let mut out = Coords::zeros();
    for a in 0..8 {
        if x[a] == 0.0 {
            continue;
        }
        for b in 0..8 {
            let w = x[a] * y[b];
            if w == 0.0 {
                continue;
            }
            for k in 0..8 {
                out[k] += w * c[a][b][k];
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricKind {
    /// The Cheeger deformation of the bi-invariant metric along `K = U(2)`.
    Deformed { t: f64 },
    General,
}

/// A left-invariant metric given by a positive self-adjoint operator.
#[derive(Clone, Debug, PartialEq)]
pub struct LeftInvariantMetric {
    kind: MetricKind,
    op: Mat8,
}

impl LeftInvariantMetric {
    pub fn deformed(t: f64) -> Result<Self> {
        // phi is diagonal in the adapted basis
        let probe = phi(&su3::y3(), t)?;
        let scale = inner0(&probe, &su3::y3()) / 6.0;
        let mut op = Mat8::identity();
        for a in 0..K_DIM {
            op[(a, a)] = scale;
        }
        Ok(LeftInvariantMetric {
            kind: MetricKind::Deformed { t },
            op,
        })
    }

    pub fn bi_invariant() -> Self {
        LeftInvariantMetric {
            kind: MetricKind::General,
            op: Mat8::identity(),
        }
    }

    pub fn general(op: Mat8) -> Result<Self> {
        let asym = (op - op.transpose()).amax();
        if asym > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "operator is not self-adjoint (defect {asym:e})"
            )));
        }
        let sym = 0.5 * (op + op.transpose());
        let min = SymmetricEigen::new(sym).eigenvalues.min();
        if min <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "operator is not positive (smallest eigenvalue {min:e})"
            )));
        }
        Ok(LeftInvariantMetric {
            kind: MetricKind::General,
            op: sym,
        })
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn operator(&self) -> &Mat8 {
        &self.op
    }

    pub fn inner(&self, x: &Coords, y: &Coords) -> f64 {
        x.dot(&(self.op * y))
    }
}

/// A 2-plane at a base point, spanned by two left-invariant vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPlane {
    pub x: Su3Vector,
    pub y: Su3Vector,
    pub base: Su3Point,
}

impl TwoPlane {
    pub fn new(x: Su3Vector, y: Su3Vector) -> Self {
        TwoPlane {
            x,
            y,
            base: Su3Point::identity(),
        }
    }

    pub fn at(base: Su3Point, x: Su3Vector, y: Su3Vector) -> Self {
        TwoPlane { x, y, base }
    }
}

/// Connection, curvature tensor and metric data for one metric.
pub struct CurvatureEngine {
    metric: LeftInvariantMetric,
    op_inv: Mat8,
    /// `christoffel[a][b]` = coordinates of `nabla_{e_a} e_b`.
    christoffel: [[Coords; 8]; 8],
    /// `riemann[a][b][c][d] = <R(e_a, e_b) e_c, e_d>`.
    riemann: Box<[[[[f64; 8]; 8]; 8]; 8]>,
}

impl CurvatureEngine {
    pub fn new(metric: LeftInvariantMetric) -> Self {
        let op_inv = metric
            .op
            .try_inverse()
            .expect("positive definite operator is invertible");
        let mut engine = CurvatureEngine {
            metric,
            op_inv,
            christoffel: [[Coords::zeros(); 8]; 8],
            riemann: Box::new([[[[0.0; 8]; 8]; 8]; 8]),
        };
        let e = |i: usize| Coords::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
        for a in 0..8 {
            for b in 0..8 {
                engine.christoffel[a][b] = engine.koszul(&e(a), &e(b));
            }
        }
        for a in 0..8 {
            for b in 0..8 {
                let ab = bracket_coords(&e(a), &e(b));
                for c in 0..8 {
                    let r = engine.koszul(&e(a), &engine.christoffel[b][c])
                        - engine.koszul(&e(b), &engine.christoffel[a][c])
                        - engine.connection(&ab, &e(c));
                    let lowered = engine.metric.op * r;
                    for d in 0..8 {
                        engine.riemann[a][b][c][d] = lowered[d];
                    }
                }
            }
        }
        engine
    }

    pub fn deformed(t: f64) -> Result<Self> {
        Ok(Self::new(LeftInvariantMetric::deformed(t)?))
    }

    pub fn metric(&self) -> &LeftInvariantMetric {
        &self.metric
    }

    /// `nabla_X Y` straight from the Koszul formula.
    pub fn koszul(&self, x: &Coords, y: &Coords) -> Coords {
        let c = structure_constants();
        let g = &self.metric.op;
        let gx = g * x;
        let gy = g * y;
        let mut b = g * bracket_coords(x, y);
        for k in 0..8 {
            let mut s = 0.0;
            for m in 0..8 {
                for d in 0..8 {
                    s -= y[m] * c[m][k][d] * gx[d];
                    s += c[k][m][d] * x[m] * gy[d];
                }
            }
            b[k] += s;
        }
        0.5 * self.op_inv * b
    }

    /// `nabla_X Y` through the tabulated Christoffel symbols.
    pub fn connection(&self, x: &Coords, y: &Coords) -> Coords {
        let mut out = Coords::zeros();
        for a in 0..8 {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..8 {
                let w = x[a] * y[b];
                if w != 0.0 {
                    out += w * self.christoffel[a][b];
                }
            }
        }
        out
    }

    /// `<R(X,Y)Y, X>` from the tensor.
    pub fn curvature_numerator(&self, x: &Coords, y: &Coords) -> f64 {
        y.dot(&(self.jacobi(x) * y))
    }

    /// The symmetric matrix `J` with `<R(X,Y)Y,X> = y^T J y`.
    pub fn jacobi(&self, x: &Coords) -> Mat8 {
        let mut j = Mat8::zeros();
        for a in 0..8 {
            if x[a] == 0.0 {
                continue;
            }
            for d in 0..8 {
                let w = x[a] * x[d];
                if w == 0.0 {
                    continue;
                }
                for b in 0..8 {
                    for c in 0..8 {
                        j[(b, c)] += w * self.riemann[a][b][c][d];
                    }
                }
            }
        }
        0.5 * (j + j.transpose())
    }

    /// `<R(X,Y)Y, X>` by nested covariant derivatives, without the tensor.
    pub fn curvature_numerator_direct(&self, x: &Coords, y: &Coords) -> f64 {
        let yy = self.koszul(y, y);
        let xy = self.koszul(x, y);
        let r = self.koszul(x, &yy) - self.koszul(y, &xy) - self.koszul(&bracket_coords(x, y), y);
        self.metric.inner(&r, x)
    }

    fn gram(&self, x: &Coords, y: &Coords) -> Result<f64> {
        let (xx, yy, xy) = (
            self.metric.inner(x, x),
            self.metric.inner(y, y),
            self.metric.inner(x, y),
        );
        let gram = xx * yy - xy * xy;
        if xx <= 0.0 || yy <= 0.0 || gram / (xx * yy) < DEGENERACY_TOL {
            return Err(Error::DegeneratePlane(if xx > 0.0 && yy > 0.0 {
                gram / (xx * yy)
            } else {
                0.0
            }));
        }
        Ok(gram)
    }

    pub fn sectional_curvature(&self, plane: &TwoPlane) -> Result<f64> {
        let (x, y) = (plane.x.coords(), plane.y.coords());
        let gram = self.gram(&x, &y)?;
        Ok(self.curvature_numerator(&x, &y) / gram)
    }

    pub fn sectional_curvature_direct(&self, plane: &TwoPlane) -> Result<f64> {
        let (x, y) = (plane.x.coords(), plane.y.coords());
        let gram = self.gram(&x, &y)?;
        Ok(self.curvature_numerator_direct(&x, &y) / gram)
    }

    /// Orthonormalizes `(x, y)` in this metric.
    pub fn orthonormalize(&self, x: &Coords, y: &Coords) -> Result<(Coords, Coords)> {
        self.gram(x, y)?;
        let e1 = x / self.metric.inner(x, x).sqrt();
        let y = y - self.metric.inner(y, &e1) * e1;
        let e2 = &y / self.metric.inner(&y, &y).sqrt();
        Ok((e1, e2))
    }
}

/// Convenience wrapper that builds the engine on each call.
pub fn sectional_curvature(metric: &LeftInvariantMetric, plane: &TwoPlane) -> Result<f64> {
    CurvatureEngine::new(metric.clone()).sectional_curvature(plane)
}

/// `(|[phi X, phi Y]|_0, |[X_k, Y_k]|_0)` on a metric-orthonormal basis of the plane.
pub fn zero_criterion_residuals(plane: &TwoPlane, t: f64) -> Result<(f64, f64)> {
    let metric = LeftInvariantMetric::deformed(t)?;
    let engine_free = |x: &Coords, y: &Coords| -> Result<(Coords, Coords)> {
        let inner = |u: &Coords, v: &Coords| metric.inner(u, v);
        let (xx, yy, xy) = (inner(x, x), inner(y, y), inner(x, y));
        if xx <= 0.0 || yy <= 0.0 || (xx * yy - xy * xy) / (xx * yy) < DEGENERACY_TOL {
            return Err(Error::DegeneratePlane(if xx > 0.0 && yy > 0.0 {
                (xx * yy - xy * xy) / (xx * yy)
            } else {
                0.0
            }));
        }
        let e1 = x / xx.sqrt();
        let r = y - inner(y, &e1) * e1;
        let e2 = &r / inner(&r, &r).sqrt();
        Ok((e1, e2))
    };
    let (e1, e2) = engine_free(&plane.x.coords(), &plane.y.coords())?;
    let (u, v) = (Su3Vector::from_coords(&e1), Su3Vector::from_coords(&e2));
    let full = ad_bracket(&phi(&u, t)?, &phi(&v, t)?).norm0();
    let (uk, _) = split_kp(&u);
    let (vk, _) = split_kp(&v);
    let block = ad_bracket(&uk, &vk).norm0();
    Ok((full, block))
}

/// Zero-curvature test for the deformed metric: `[phi X, phi Y] = 0` and
/// `[X_k, Y_k] = 0`. This is the statement for `span{phi^{-1} U, phi^{-1} V}`
/// rewritten with `U = phi X`, `V = phi Y`.
pub fn eschenburg_zero_criterion(plane: &TwoPlane, t: f64, tol: f64) -> Result<bool> {
    let (a, b) = zero_criterion_residuals(plane, t)?;
    Ok(a <= tol && b <= tol)
}

/// Which distinguished vector a flat plane contains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DistinguishedVector {
    ContainsY3,
    /// `scale * Ad_k Y1` lies in the plane.
    ContainsAdkY1 { k: KElement, scale: f64 },
    Neither,
}

/// Relative distance from `w` to `span{x, y}` in `inner0`.
fn distance_to_span(w: &Coords, x: &Coords, y: &Coords) -> f64 {
    let m = DMatrix::from_columns(&[DVector::from_column_slice(x.as_slice()), DVector::from_column_slice(y.as_slice())]);
    let rhs = DVector::from_column_slice(w.as_slice());
    let sol = m.clone().svd(true, true).solve(&rhs, 1e-14).expect("svd solve");
    (m * sol - &rhs).norm() / rhs.norm()
}

/// If `w` (in `k`) equals `lambda Ad_k Y1`, returns `(k, lambda)`.
fn recover_adk_y1(w: &Su3Vector, tol: f64) -> Option<(KElement, f64)> {
    let lambda = w.entry(2, 2).im;
    if lambda.abs() <= tol {
        return None;
    }
    let b = w.matrix().fixed_view::<2, 2>(0, 0).into_owned();
    // eigenvalues of B should be -2 i lambda and i lambda
    let h = b * su3::c(0.0, -1.0 / lambda);
    let se = ((h + h.adjoint()) * su3::c(0.5, 0.0)).symmetric_eigen();
    let (lo, hi) = if se.eigenvalues[0] <= se.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    if (se.eigenvalues[lo] + 2.0).abs() > 1e-6 || (se.eigenvalues[hi] - 1.0).abs() > 1e-6 {
        return None;
    }
    let u = se.eigenvectors.column(lo).into_owned();
    let k = KElement::from_first_column(u).ok()?;
    let rebuilt = lambda * su3::adjoint(k.point(), &su3::y1());
    if (rebuilt - *w).max_abs_entry() > 1e-6 * lambda.abs().max(1.0) {
        return None;
    }
    Some((k, lambda))
}

/// Finds a distinguished vector in a flat plane: `Y3`, or some `Ad_k Y1`.
pub fn zero_plane_containing_vector_check(
    plane: &TwoPlane,
    t: f64,
    tol: f64,
) -> Result<DistinguishedVector> {
    if !eschenburg_zero_criterion(plane, t, tol.max(BRACKET_TOL))? {
        return Err(Error::PreconditionFailed(
            "plane fails the zero-curvature criterion".into(),
        ));
    }
    let (x, y) = (plane.x.coords(), plane.y.coords());
    let y3 = su3::y3().coords();
    if distance_to_span(&y3, &x, &y) <= 1e-7 {
        return Ok(DistinguishedVector::ContainsY3);
    }
    // plane intersected with k: combinations a x + b y with zero p-part
    let xp = x.rows(K_DIM, 8 - K_DIM).into_owned();
    let yp = y.rows(K_DIM, 8 - K_DIM).into_owned();
    let m = nalgebra::DMatrix::from_columns(&[
        DVector::from_column_slice(xp.as_slice()),
        DVector::from_column_slice(yp.as_slice()),
    ]);
    let scale = x.norm().max(y.norm());
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let small: Vec<usize> = (0..2).filter(|&i| sv[i] <= 1e-7 * scale).collect();

    let candidates: Vec<Coords> = match small.len() {
        0 => Vec::new(),
        1 => {
            let r = vt.row(small[0]);
            vec![r[0] * x + r[1] * y]
        }
        _ => {
            // the whole plane lies in k: det(B) = 2 lambda^2 picks out Y1-type directions
            let (x, y) = (&x, &y);
            let f = |s: f64| {
                let w = Su3Vector::from_coords(&(s.cos() * x + s.sin() * y));
                let lam = w.entry(2, 2).im;
                let b = w.matrix().fixed_view::<2, 2>(0, 0).determinant();
                b.re - 2.0 * lam * lam
            };
            // f is a quadratic form in (cos s, sin s): f(s) = a0 + a1 cos 2s + a2 sin 2s
            let (f0, f1, f2) = (f(0.0), f(std::f64::consts::FRAC_PI_2), f(std::f64::consts::FRAC_PI_4));
            let a0 = 0.5 * (f0 + f1);
            let a1 = 0.5 * (f0 - f1);
            let a2 = f2 - a0;
            let r = a1.hypot(a2);
            let mut out = Vec::new();
            if r > 1e-14 && (a0 / r).abs() <= 1.0 {
                let phase = a2.atan2(a1);
                let d = (-a0 / r).acos();
                for s2 in [phase + d, phase - d] {
                    let s = 0.5 * s2;
                    out.push(s.cos() * x + s.sin() * y);
                }
            }
            out
        }
    };
    for w in candidates {
        let wv = Su3Vector::from_coords(&w);
        if let Some((k, scale)) = recover_adk_y1(&wv, 1e-9 * w.norm()) {
            return Ok(DistinguishedVector::ContainsAdkY1 { k, scale });
        }
    }
    Ok(DistinguishedVector::Neither)
}

/// Result of a horizontal-plane curvature search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinCurvatureReport {
    pub min: f64,
    pub plane: TwoPlane,
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
}

/// A metric-orthonormal basis (as columns) of the metric complement of `v`.
pub fn horizontal_basis(metric: &LeftInvariantMetric, v: &Coords) -> SMatrix<f64, 8, 7> {
    let mut frame: Vec<Coords> = Vec::with_capacity(8);
    let vn = metric.inner(v, v).sqrt();
    frame.push(v / vn);
    for i in 0..8 {
        let mut w = Coords::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for f in &frame {
                w -= metric.inner(&w, f) * f;
            }
        }
        let n = metric.inner(&w, &w).sqrt();
        if n > 1e-6 {
            frame.push(w / n);
        }
        if frame.len() == 8 {
            break;
        }
    }
    SMatrix::<f64, 8, 7>::from_columns(&frame[1..8])
}

type V7 = SMatrix<f64, 7, 1>;
type M7 = SMatrix<f64, 7, 7>;

/// The curvature tensor restricted to a 7-dimensional orthonormal frame.
struct RestrictedTensor {
    r: Vec<f64>,
}

impl RestrictedTensor {
    fn new(engine: &CurvatureEngine, frame: &SMatrix<f64, 8, 7>) -> Self {
        // contract one index at a time
        let full = &engine.riemann;
        let mut s1 = vec![0.0; 7 * 8 * 8 * 8];
        for i in 0..7 {
            for a in 0..8 {
                let w = frame[(a, i)];
                if w == 0.0 {
                    continue;
                }
                for b in 0..8 {
                    for c in 0..8 {
                        for d in 0..8 {
                            s1[((i * 8 + b) * 8 + c) * 8 + d] += w * full[a][b][c][d];
                        }
                    }
                }
            }
        }
        let mut s2 = vec![0.0; 7 * 7 * 8 * 8];
        for i in 0..7 {
            for j in 0..7 {
                for b in 0..8 {
                    let w = frame[(b, j)];
                    for c in 0..8 {
                        for d in 0..8 {
                            s2[((i * 7 + j) * 8 + c) * 8 + d] += w * s1[((i * 8 + b) * 8 + c) * 8 + d];
                        }
                    }
                }
            }
        }
        let mut s3 = vec![0.0; 7 * 7 * 7 * 8];
        for ij in 0..49 {
            for k in 0..7 {
                for c in 0..8 {
                    let w = frame[(c, k)];
                    for d in 0..8 {
                        s3[(ij * 7 + k) * 8 + d] += w * s2[(ij * 8 + c) * 8 + d];
                    }
                }
            }
        }
        let mut r = vec![0.0; 7 * 7 * 7 * 7];
        for ijk in 0..343 {
            for l in 0..7 {
                let mut s = 0.0;
                for d in 0..8 {
                    s += frame[(d, l)] * s3[ijk * 8 + d];
                }
                r[ijk * 7 + l] = s;
            }
        }
        RestrictedTensor { r }
    }

    /// `J` with `<R(X,Y)Y,X> = y^T J y`.
    fn jacobi(&self, x: &V7) -> M7 {
        let mut j = M7::zeros();
        for a in 0..7 {
            for d in 0..7 {
                let w = x[a] * x[d];
                if w == 0.0 {
                    continue;
                }
                for b in 0..7 {
                    for c in 0..7 {
                        j[(b, c)] += w * self.r[((a * 7 + b) * 7 + c) * 7 + d];
                    }
                }
            }
        }
        0.5 * (j + j.transpose())
    }

    /// Sectional curvature of `span{x, y}` (Euclidean coordinates are metric-orthonormal).
    fn sectional(&self, x: &V7, y: &V7) -> f64 {
        let gram = x.norm_squared() * y.norm_squared() - x.dot(y).powi(2);
        y.dot(&(self.jacobi(x) * y)) / gram
    }
}

/// Orthonormal basis of the Euclidean complement of a unit vector in R^7.
fn complement(u: &V7) -> SMatrix<f64, 7, 6> {
    let s = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut w = *u;
    w[0] += s;
    let h = M7::identity() - (2.0 / w.norm_squared()) * (w * w.transpose());
    h.fixed_view::<7, 6>(0, 1).into_owned()
}

fn min_over_complement(tensor: &RestrictedTensor, u: &V7) -> (f64, V7) {
    let j = tensor.jacobi(u);
    let c = complement(u);
    let eig = SymmetricEigen::new(c.transpose() * j * c);
    let (imin, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    ((val), (c * eig.eigenvectors.column(imin)).normalize())
}

fn orthonormal_pair(x: &V7, y: &V7) -> (V7, V7) {
    let e1 = x.normalize();
    let e2 = (y - y.dot(&e1) * e1).normalize();
    (e1, e2)
}

/// Alternating minimization: for fixed `x` the best `y` is an eigenvector.
fn alternate(tensor: &RestrictedTensor, x: V7, max_iter: usize) -> (f64, V7, V7, usize) {
    let mut u = x;
    let (mut val, mut w) = min_over_complement(tensor, &u);
    let mut iters = 1;
    while iters < max_iter {
        let (nv, nu) = min_over_complement(tensor, &w);
        iters += 1;
        let gain = val - nv;
        u = w;
        w = nu;
        val = val.min(nv);
        if gain <= 1e-14 * val.abs() {
            break;
        }
    }
    (val, u, w, iters)
}

/// Newton refinement in the graph chart `(x + N a, y + N b)` of the Grassmannian.
fn newton_refine(tensor: &RestrictedTensor, x: V7, y: V7, max_iter: usize) -> (f64, V7, V7, usize) {
    const H: f64 = 1e-4;
    let (mut x, mut y) = orthonormal_pair(&x, &y);
    let mut val = tensor.sectional(&x, &y);
    let mut iters = 0;
    while iters < max_iter {
        iters += 1;
        // complement of span{x, y}
        let mut basis: Vec<V7> = Vec::with_capacity(5);
        for i in 0..7 {
            let mut w = V7::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
            for _ in 0..2 {
                w -= w.dot(&x) * x + w.dot(&y) * y;
                for b in &basis {
                    w -= w.dot(b) * b;
                }
            }
            if w.norm() > 1e-3 && basis.len() < 5 {
                basis.push(w.normalize());
            }
        }
        let n = SMatrix::<f64, 7, 5>::from_columns(&basis);
        let f = |p: &SMatrix<f64, 10, 1>| {
            let a = p.fixed_rows::<5>(0).into_owned();
            let b = p.fixed_rows::<5>(5).into_owned();
            tensor.sectional(&(x + n * a), &(y + n * b))
        };
        let zero = SMatrix::<f64, 10, 1>::zeros();
        let f0 = f(&zero);
        let unit = |i: usize| SMatrix::<f64, 10, 1>::from_fn(|r, _| if r == i { H } else { 0.0 });
        let mut grad = SMatrix::<f64, 10, 1>::zeros();
        let mut hess = SMatrix::<f64, 10, 10>::zeros();
        for i in 0..10 {
            let (fp, fm) = (f(&unit(i)), f(&-unit(i)));
            grad[i] = (fp - fm) / (2.0 * H);
            hess[(i, i)] = (fp - 2.0 * f0 + fm) / (H * H);
        }
        for i in 0..10 {
            for j in (i + 1)..10 {
                let (ei, ej) = (unit(i), unit(j));
                let v = (f(&(ei + ej)) - f(&(ei - ej)) - f(&(ej - ei)) + f(&(-ei - ej))) / (4.0 * H * H);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(hess);
        let floor = 1e-8 * eig.eigenvalues.amax().max(1e-12);
        let mut step = SMatrix::<f64, 10, 1>::zeros();
        for k in 0..10 {
            let vk = eig.eigenvectors.column(k);
            let lam = eig.eigenvalues[k].abs().max(floor);
            step -= (vk.dot(&grad) / lam) * vk;
        }
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand = scale * step;
            let fv = f(&cand);
            if fv < f0 {
                let a = cand.fixed_rows::<5>(0).into_owned();
                let b = cand.fixed_rows::<5>(5).into_owned();
                (x, y) = orthonormal_pair(&(x + n * a), &(y + n * b));
                val = tensor.sectional(&x, &y);
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved || f0 - val <= 1e-15 * val.abs().max(1e-300) {
            break;
        }
    }
    (val, x, y, iters)
}

/// Minimizes the deformed-metric curvature over planes in the horizontal
/// space at `A`: alternating exact minimization of the Jacobi quadratic form
/// from seeded random starts, then Newton refinement of the best candidates.
pub fn min_horizontal_curvature(
    a: &Su3Point,
    pair: &PQPair,
    t: f64,
    restarts: usize,
    seed: u64,
) -> Result<MinCurvatureReport> {
    let engine = CurvatureEngine::deformed(t)?;
    min_horizontal_curvature_with(&engine, a, pair, restarts, seed)
}

pub fn min_horizontal_curvature_with(
    engine: &CurvatureEngine,
    a: &Su3Point,
    pair: &PQPair,
    restarts: usize,
    seed: u64,
) -> Result<MinCurvatureReport> {
    let t = match engine.metric().kind() {
        MetricKind::Deformed { t } => t,
        MetricKind::General => {
            return Err(Error::InvalidParameter(
                "horizontal search needs a deformed metric".into(),
            ))
        }
    };
    // horizontal for the deformed metric: <phi X, V>_0 = 0, i.e. g-orthogonal to phi^{-1} V
    let v = vertical_vector(a, pair).value;
    if v.is_zero(1e-14) {
        return Err(Error::PreconditionFailed("vertical vector vanishes".into()));
    }
    let normal = su3::phi_inv(&v, t)?.coords();
    let frame = horizontal_basis(engine.metric(), &normal);
    let tensor = RestrictedTensor::new(engine, &frame);
    let restarts = restarts.max(1);
    let mut runs: Vec<(f64, V7, V7, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = sample_rng(seed, 0x4d49_4e43, r as u64);
            let u0 = V7::from_fn(|_, _| rng.sample::<f64, _>(rand_distr::StandardNormal)).normalize();
            alternate(&tensor, u0, 60)
        })
        .collect();
    runs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let refined: Vec<(f64, V7, V7, usize)> = runs
        .iter()
        .take(4)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|&(_, x, y, _)| newton_refine(&tensor, x, y, 40))
        .collect();
    let iterations = runs.iter().map(|r| r.3).sum::<usize>() + refined.iter().map(|r| r.3).sum::<usize>();
    let best = refined
        .iter()
        .chain(runs.iter().take(1))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one restart");
    let x = Su3Vector::from_coords(&(frame * best.1));
    let y = Su3Vector::from_coords(&(frame * best.2));
    let plane = TwoPlane::at(*a, x, y);
    let min = engine.sectional_curvature(&plane)?;
    Ok(MinCurvatureReport {
        min,
        plane,
        seed,
        restarts,
        iterations,
    })
}

/// The three flat families used when sampling planes that satisfy the criterion.
pub mod flat_families {
    use super::*;
    use crate::su3::{adjoint, haar_k, random_vector, y1, y3, ZVector};

    /// `span{Ad_k Y1, Ad_k Z}`.
    pub fn adk_y1<R: Rng + ?Sized>(rng: &mut R) -> (Su3Vector, Su3Vector) {
        let k = haar_k(rng);
        let z = ZVector::new(
            rng.random_range(-1.0..1.0),
            su3::c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        (adjoint(k.point(), &y1()), adjoint(k.point(), &z.materialize()))
    }

    /// `span{Y3, W}` with `W` in `k`.
    pub fn y3_k<R: Rng + ?Sized>(rng: &mut R) -> (Su3Vector, Su3Vector) {
        let (w, _) = split_kp(&random_vector(rng));
        (y3(), w)
    }

    /// A plane inside a maximal torus `Ad_g t`, with `g` in `K`.
    pub fn torus<R: Rng + ?Sized>(rng: &mut R) -> (Su3Vector, Su3Vector) {
        let k = haar_k(rng);
        let d1 = Su3Vector::diag_i([1.0, -1.0, 0.0]).unwrap();
        (adjoint(k.point(), &d1), adjoint(k.point(), &y3()))
    }
}
