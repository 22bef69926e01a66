//! Adjacency spectra and the spectral certificates built on them.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, NumCast};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Floating-point type the eigensolver runs in.
pub trait Scalar: Float + Sum + Send + Sync + fmt::Debug + fmt::Display + Serialize + 'static {
    /// Allowed eigenpair residual `|Av - λv|` per vertex.
    const RESIDUAL_PER_VERTEX: f64;

    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite conversion")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }
}

impl Scalar for f64 {
    const RESIDUAL_PER_VERTEX: f64 = 1e-7;
}

impl Scalar for f32 {
    const RESIDUAL_PER_VERTEX: f64 = 1e-3;
}

/// Largest matrix handed to the dense solver.
pub const MAX_SPECTRUM_N: usize = 3000;
/// QL iterations allowed per eigenvalue.
pub const MAX_QL_ITERATIONS: usize = 60;

const PAR_THRESHOLD: usize = 192;

/// Residual of one recomputed eigenpair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpotResidual<T> {
    pub index: usize,
    pub eigenvalue: T,
    pub residual: T,
}

/// Full spectrum of a graph's adjacency matrix, descending.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralReport<T: Scalar> {
    pub n: usize,
    pub eigenvalues: Vec<T>,
    pub is_regular: bool,
    /// Common row sum when regular, average row sum otherwise.
    pub d: T,
    /// `max |λ_i|` over `i >= 2`.
    pub lambda: T,
    pub lambda_min: T,
    pub edge_count: usize,
    /// Ones placed on the diagonal.
    pub loops: usize,
    pub residuals: Vec<SpotResidual<T>>,
}

impl<T: Scalar> SpectralReport<T> {
    pub fn lambda1(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    /// `sum λ_i^k` for `k = 1, 2, 3`, accumulated in f64.
    pub fn power_sums(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for &l in &self.eigenvalues {
            let l = l.f64();
            s[0] += l;
            s[1] += l * l;
            s[2] += l * l * l;
        }
        s
    }

    fn regular_d(&self) -> Result<f64> {
        if self.is_regular {
            Ok(self.d.f64())
        } else {
            Err(Error::NotRegular)
        }
    }
}

/// Spectrum of the adjacency matrix of `g`.
pub fn spectrum<T: Scalar>(g: &Graph) -> Result<SpectralReport<T>> {
    spectrum_with_diagonal(g, &[])
}

/// Spectrum of `A + D` where `D` has ones at the listed vertices. With the
/// absolute points of a polarity graph this is the polarity matrix.
pub fn spectrum_with_diagonal<T: Scalar>(g: &Graph, diagonal: &[usize]) -> Result<SpectralReport<T>> {
    let n = g.n();
    if n > MAX_SPECTRUM_N {
        return Err(Error::InvalidParameter(format!("spectrum limited to n <= {MAX_SPECTRUM_N}")));
    }
    let mut loop_at = vec![false; n];
    for &v in diagonal {
        if v >= n {
            return Err(Error::InvalidParameter(format!("diagonal vertex {v} out of range")));
        }
        loop_at[v] = true;
    }
    let row_sum = |v: usize| g.degree(v) + loop_at[v] as usize;
    let mut a = vec![T::zero(); n * n];
    for u in 0..n {
        for v in g.neighbors(u).ones() {
            a[u * n + v] = T::one();
        }
        if loop_at[u] {
            a[u * n + u] = T::one();
        }
    }
    let eig = SymmetricEigen::new(a, n)?;
    let mut values = eig.values.clone();
    values.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));

    let mut spots: Vec<usize> = vec![0, n / 2, n.saturating_sub(1)];
    spots.dedup();
    let mut residuals = Vec::new();
    if n > 0 {
        for idx in spots {
            let lam = values[idx];
            let v = eig.eigenvector(lam);
            let mut r2 = 0.0f64;
            for u in 0..n {
                let mut av = if loop_at[u] { v[u].f64() } else { 0.0 };
                for w in g.neighbors(u).ones() {
                    av += v[w].f64();
                }
                let diff = av - lam.f64() * v[u].f64();
                r2 += diff * diff;
            }
            let residual = r2.sqrt();
            let tolerance = T::RESIDUAL_PER_VERTEX * n as f64;
            if residual > tolerance {
                return Err(Error::Residual { residual, tolerance });
            }
            residuals.push(SpotResidual { index: idx, eigenvalue: lam, residual: T::of(residual) });
        }
    }

    let regular = n > 0 && (0..n).all(|v| row_sum(v) == row_sum(0));
    let d = if regular {
        T::of(row_sum(0) as f64)
    } else if n > 0 {
        T::of((0..n).map(row_sum).sum::<usize>() as f64 / n as f64)
    } else {
        T::zero()
    };
    let lambda = values.iter().skip(1).map(|x| x.abs()).fold(T::zero(), T::max);
    Ok(SpectralReport {
        n,
        lambda_min: values.last().copied().unwrap_or_else(T::zero),
        eigenvalues: values,
        is_regular: regular,
        d,
        lambda,
        edge_count: g.edge_count(),
        loops: diagonal.len(),
        residuals,
    })
}

/// Ascending eigenvalues of a dense symmetric row-major matrix.
pub fn symmetric_eigenvalues<T: Scalar>(a: Vec<T>, n: usize) -> Result<Vec<T>> {
    let mut v = SymmetricEigen::new(a, n)?.values;
    v.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(v)
}

/// Householder reduction to tridiagonal form followed by implicit QL.
/// Keeps the reflectors so eigenvectors can be recovered on demand.
struct SymmetricEigen<T> {
    n: usize,
    diag: Vec<T>,
    off: Vec<T>,
    reflectors: Vec<Vec<T>>,
    values: Vec<T>,
}

impl<T: Scalar> SymmetricEigen<T> {
    fn new(mut a: Vec<T>, n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::InvalidParameter("matrix is not square".into()));
        }
        let reflectors = tridiagonalize(&mut a, n);
        let diag: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
        let off: Vec<T> = (0..n.saturating_sub(1)).map(|i| a[(i + 1) * n + i]).collect();
        let values = tql(diag.clone(), off.clone())?;
        Ok(SymmetricEigen { n, diag, off, reflectors, values })
    }

    /// Unit eigenvector for `lambda` by inverse iteration on the tridiagonal
    /// matrix, mapped back through the reflectors.
    fn eigenvector(&self, lambda: T) -> Vec<T> {
        let n = self.n;
        if n == 1 {
            return vec![T::one()];
        }
        let norm = self
            .diag
            .iter()
            .chain(&self.off)
            .map(|x| x.abs())
            .fold(T::zero(), T::max)
            .max(T::one());
        let tiny = T::epsilon() * norm;
        let mut x: Vec<T> = (0..n).map(|i| T::of(0.5 + ((i * 7919) % 1000) as f64 / 1000.0)).collect();
        let lu = TridiagLu::new(&self.diag, &self.off, lambda + tiny, tiny);
        for _ in 0..3 {
            lu.solve(&mut x);
            normalize(&mut x);
        }
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let tail = &mut x[k + 1..];
            let dot: T = v.iter().zip(tail.iter()).map(|(&a, &b)| a * b).sum();
            let two = T::of(2.0);
            for (t, &vi) in tail.iter_mut().zip(v) {
                *t = *t - two * dot * vi;
            }
        }
        x
    }
}

fn normalize<T: Scalar>(x: &mut [T]) {
    let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
    if norm > T::zero() {
        x.iter_mut().for_each(|v| *v = *v / norm);
    }
}

/// Reduces `a` in place; afterwards its diagonal and first subdiagonal hold
/// the tridiagonal matrix. Returns the unit reflector for each column
/// (empty when no reflection was needed).
fn tridiagonalize<T: Scalar>(a: &mut [T], n: usize) -> Vec<Vec<T>> {
    let two = T::of(2.0);
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<T> = (k + 1..n).map(|i| a[i * n + k]).collect();
        let tail_norm = x[1..].iter().map(|&v| v * v).sum::<T>();
        if tail_norm == T::zero() {
            reflectors.push(Vec::new());
            continue;
        }
        let xnorm = (x[0] * x[0] + tail_norm).sqrt();
        let alpha = if x[0] > T::zero() { -xnorm } else { xnorm };
        let mut v = x;
        v[0] = v[0] - alpha;
        normalize(&mut v);

        // p = A22 v, w = p - (v.p) v, A22 -= 2 (v w^T + w v^T)
        let row_dot = |row: &[T]| -> T { row[k + 1..].iter().zip(&v).map(|(&a, &b)| a * b).sum() };
        let p: Vec<T> = if n >= PAR_THRESHOLD {
            a.par_chunks(n).skip(k + 1).map(row_dot).collect()
        } else {
            a.chunks(n).skip(k + 1).map(row_dot).collect()
        };
        let vp: T = v.iter().zip(&p).map(|(&a, &b)| a * b).sum();
        let w: Vec<T> = p.iter().zip(&v).map(|(&pi, &vi)| pi - vp * vi).collect();
        let update = |(i, row): (usize, &mut [T])| {
            let (vi, wi) = (v[i], w[i]);
            for (j, cell) in row[k + 1..].iter_mut().enumerate() {
                *cell = *cell - two * (vi * w[j] + wi * v[j]);
            }
        };
        if n >= PAR_THRESHOLD {
            a.par_chunks_mut(n).skip(k + 1).enumerate().for_each(update);
        } else {
            a.chunks_mut(n).skip(k + 1).enumerate().for_each(update);
        }
        debug_assert_eq!(v.len(), m);
        for i in k + 2..n {
            a[i * n + k] = T::zero();
            a[k * n + i] = T::zero();
        }
        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha;
        reflectors.push(v);
    }
    reflectors
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
fn tql<T: Scalar>(mut d: Vec<T>, off: Vec<T>) -> Result<Vec<T>> {
    let n = d.len();
    let mut e = off;
    e.push(T::zero());
    let two = T::of(2.0);
    let mut scale = T::zero();
    for l in 0..n {
        scale = scale.max(d[l].abs() + e[l].abs());
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if e[m].abs() <= T::epsilon() * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NonConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(d)
}

/// LU factors with partial pivoting of `T - shift I`, `T` tridiagonal.
struct TridiagLu<T> {
    dl: Vec<T>,
    dd: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TridiagLu<T> {
    fn new(diag: &[T], off: &[T], shift: T, tiny: T) -> Self {
        let n = diag.len();
        let mut dl = off.to_vec();
        let mut dd: Vec<T> = diag.iter().map(|&x| x - shift).collect();
        let mut du = off.to_vec();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if dd[i].abs() >= dl[i].abs() {
                if dd[i] == T::zero() {
                    dd[i] = tiny;
                }
                let fact = dl[i] / dd[i];
                dl[i] = fact;
                dd[i + 1] = dd[i + 1] - fact * du[i];
            } else {
                let fact = dd[i] / dl[i];
                dd[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = dd[i + 1];
                dd[i + 1] = temp - fact * dd[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if dd[n - 1] == T::zero() {
            dd[n - 1] = tiny;
        }
        TridiagLu { dl, dd, du, du2, swapped }
    }

    fn solve(&self, b: &mut [T]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - self.dl[i] * b[i];
            }
        }
        b[n - 1] = b[n - 1] / self.dd[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.dd[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.dd[i];
        }
    }
}

/// Sides of the Alon–Boppana inequality
/// `d^{2k} + (n-1) λ^{2k} >= (n/k) C(2k-2, k-1) d (d-1)^{k-1}`.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AlonBoppana {
    pub k: u32,
    pub lhs: f64,
    pub rhs: f64,
    /// Closed walks of length `2k` from a vertex in the `d`-regular tree.
    pub tree_walks: f64,
    pub holds: bool,
}

/// `(1/k) C(2k-2, k-1) d (d-1)^{k-1}`.
pub fn tree_walk_bound(d: f64, k: u32) -> f64 {
    assert!(k >= 1);
    let mut catalan = 1.0;
    for i in 0..k - 1 {
        // C_{i+1} = C_i * 2(2i+1)/(i+2)
        catalan = catalan * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64;
    }
    catalan * d * (d - 1.0).powi(k as i32 - 1)
}

pub fn alon_boppana_check<T: Scalar>(report: &SpectralReport<T>, k: u32) -> Result<AlonBoppana> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let d = report.regular_d()?;
    let n = report.n as f64;
    let lam = report.lambda.f64();
    let lhs = d.powi(2 * k as i32) + (n - 1.0) * lam.powi(2 * k as i32);
    let tree_walks = tree_walk_bound(d, k);
    let rhs = n * tree_walks;
    let holds = lhs >= rhs * (1.0 - 1e-9);
    Ok(AlonBoppana { k, lhs, rhs, tree_walks, holds })
}

/// The mixing-lemma sandwich `λ_n |X| <= 2e(X) - (d/n)|X|^2 <= λ |X|`.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MixingCheck {
    pub size: usize,
    pub edges: usize,
    pub deviation: f64,
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

pub fn mixing_check<T: Scalar>(g: &Graph, report: &SpectralReport<T>, x: &[usize]) -> Result<MixingCheck> {
    let d = report.regular_d()?;
    if report.loops > 0 {
        return Err(Error::InvalidParameter("mixing check needs a loopless spectrum".into()));
    }
    let set = g.vertex_set(x.iter().copied());
    let size = set.count_ones(..);
    let edges = g.edges_within(&set);
    let n = g.n() as f64;
    let s = size as f64;
    let deviation = 2.0 * edges as f64 - d / n * s * s;
    let lower = report.lambda_min.f64() * s;
    let upper = report.lambda.f64() * s;
    let slack = 1e-9 * (1.0 + d * s);
    let ok = lower - slack <= deviation && deviation <= upper + slack;
    Ok(MixingCheck { size, edges, deviation, lower, upper, ok })
}

/// Hoffman–Delsarte ratio bound `-n λ_n / (d - λ_n)` on the independence
/// number of a regular graph.
pub fn hoffman_bound<T: Scalar>(report: &SpectralReport<T>) -> Result<f64> {
    let d = report.regular_d()?;
    let lmin = report.lambda_min.f64();
    if (d - lmin).abs() < 1e-9 {
        return Err(Error::InvalidParameter("d equals the least eigenvalue".into()));
    }
    Ok(-(report.n as f64) * lmin / (d - lmin))
}

/// Power-sum identities against exact counts.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceCheck {
    pub sum: f64,
    pub sum_squares: f64,
    pub sum_cubes: f64,
    pub edges: usize,
    pub triangles: u64,
    pub ok: bool,
}

/// `Σλ = 0` (tol 1e-6 n), `Σλ² = 2|E|` (tol 1e-6 |E|), `Σλ³ = 6 T` (tol 1e-5 n).
pub fn trace_check<T: Scalar>(report: &SpectralReport<T>, triangles: u64) -> TraceCheck {
    let [s1, s2, s3] = report.power_sums();
    let n = report.n as f64;
    let m = report.edge_count as f64;
    let ok = report.loops == 0
        && s1.abs() <= 1e-6 * n.max(1.0)
        && (s2 - 2.0 * m).abs() <= 1e-6 * m.max(1.0)
        && (s3 - 6.0 * triangles as f64).abs() <= 1e-5 * n.max(1.0);
    TraceCheck { sum: s1, sum_squares: s2, sum_cubes: s3, edges: report.edge_count, triangles, ok }
}

/// `tr(A³) >= d³ - λ³(n-1)`; for triangle-free graphs also `tr(A³) = 0`
/// and `d <= λ (n-1)^{1/3}`.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TriangleTrace {
    pub sum_cubes: f64,
    pub floor: f64,
    pub d: f64,
    pub degree_cap: f64,
    pub pass: bool,
}

pub fn triangle_trace_check<T: Scalar>(report: &SpectralReport<T>, triangle_free: bool) -> Result<TriangleTrace> {
    let d = report.regular_d()?;
    let n = report.n as f64;
    let lam = report.lambda.f64();
    let [_, _, s3] = report.power_sums();
    let floor = d.powi(3) - lam.powi(3) * (n - 1.0);
    let degree_cap = lam * (n - 1.0).cbrt();
    let tol = 1e-5 * n.max(1.0);
    let pass = if triangle_free {
        s3.abs() <= tol && d <= degree_cap * (1.0 + 1e-9)
    } else {
        s3 >= floor - tol
    };
    Ok(TriangleTrace { sum_cubes: s3, floor, d, degree_cap, pass })
}
