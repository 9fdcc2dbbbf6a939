//! Finite-sample certification and refutation of positive definiteness:
//! Gram matrices, kernel positivity, the domination order `K ≪ F`, the Pólya
//! criterion, and complete monotonicity via alternating differences.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Kernel, PdFunction};

/// PSD if the smallest eigenvalue clears `-1e-10 · max(1, λ_max)`.
pub const PSD_RELATIVE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdVerdict {
    Psd,
    Indefinite,
}

/// Result of eigen-testing a Hermitian sample matrix.
#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub points: Vec<f64>,
    #[serde(skip)]
    pub matrix: DMatrix<Complex64>,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub verdict: PsdVerdict,
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Complex Hermitian matrices go through the real symmetric embedding
/// `[[A, -B], [B, A]]` whose spectrum is that of `A + iB` doubled.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let herm_defect = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)] - m[(j, i)].conj()).norm())
        .fold(0.0f64, f64::max);
    debug_assert!(herm_defect < 1e-9, "matrix is not Hermitian (defect {herm_defect})");
    if m.iter().all(|v| v.im == 0.0) {
        let a = DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
        let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().cloned().collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return ev;
    }
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            big[(i, j)] = v.re;
            big[(n + i, n + j)] = v.re;
            big[(i, n + j)] = -v.im;
            big[(n + i, j)] = v.im;
        }
    }
    let mut ev: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // spectrum is doubled; keep one copy of each pair
    ev.into_iter().step_by(2).collect()
}

fn report_from_matrix(points: &[f64], matrix: DMatrix<Complex64>) -> GramReport {
    let ev = hermitian_eigenvalues(&matrix);
    let min_eigenvalue = *ev.first().unwrap();
    let max_eigenvalue = *ev.last().unwrap();
    let verdict = if min_eigenvalue >= -PSD_RELATIVE_TOL * max_eigenvalue.abs().max(1.0) {
        PsdVerdict::Psd
    } else {
        PsdVerdict::Indefinite
    };
    GramReport {
        points: points.to_vec(),
        matrix,
        eigenvalues: ev,
        min_eigenvalue,
        max_eigenvalue,
        verdict,
    }
}

/// `M_ij = F(x_i - x_j)`.
pub fn gram_matrix(f: &PdFunction, points: &[f64]) -> Result<DMatrix<Complex64>> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Argument("need at least one point".into()));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            // closed forms extend beyond the nominal interval; sampled
            // tables reject out-of-range differences inside evaluate().
            let v = f.evaluate(points[i] - points[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(m)
}

/// Eigen-test of the Gram matrix of `F` on the points.
pub fn is_pd_grid(f: &PdFunction, points: &[f64]) -> Result<GramReport> {
    Ok(report_from_matrix(points, gram_matrix(f, points)?))
}

/// Eigen-test of a two-variable kernel sample matrix `M_ij = K(x_i, x_j)`.
pub fn kernel_pd(k: &Kernel, points: &[f64]) -> Result<GramReport> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Argument("need at least one point".into()));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = k.evaluate(points[i], points[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    Ok(report_from_matrix(points, m))
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub holds: bool,
    /// Smallest constant `A` with `Gram(K) ⪯ A·Gram(F)` on the range of
    /// `Gram(F)` (present in auto mode).
    pub minimal_a: Option<f64>,
}

/// Sample test of the order `K ≪ F`: is `A·Gram(F) - Gram(K)` PSD?
///
/// With `a = None` the minimal constant is computed as the largest
/// generalized eigenvalue of the pencil on the numerically significant range
/// of `Gram(F)` (relative cutoff `1e-12`).
pub fn domination(
    k: &PdFunction,
    f: &PdFunction,
    points: &[f64],
    a: Option<f64>,
) -> Result<DominationReport> {
    let gk = gram_matrix(k, points)?;
    let gf = gram_matrix(f, points)?;
    match a {
        Some(a) => {
            let diff = &gf * Complex64::new(a, 0.0) - &gk;
            let ev = hermitian_eigenvalues(&diff);
            let max = ev.last().unwrap().abs().max(1.0);
            Ok(DominationReport { holds: ev[0] >= -PSD_RELATIVE_TOL * max, minimal_a: None })
        }
        None => {
            // project onto eigenvectors of Gram(F) above the cutoff
            let n = points.len();
            let fre = DMatrix::from_fn(n, n, |i, j| gf[(i, j)].re);
            let fim = DMatrix::from_fn(n, n, |i, j| gf[(i, j)].im);
            if fim.iter().any(|v| v.abs() > 1e-12) {
                return Err(Error::Argument(
                    "auto domination mode expects real-valued functions".into(),
                ));
            }
            let se = fre.symmetric_eigen();
            let lmax = se.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            if !(lmax > 0.0) {
                return Err(Error::Degenerate("Gram(F) is numerically zero".into()));
            }
            let cutoff = 1e-12 * lmax;
            let keep: Vec<usize> = (0..n).filter(|&i| se.eigenvalues[i] > cutoff).collect();
            if keep.is_empty() {
                return Err(Error::Degenerate("Gram(F) has no significant range".into()));
            }
            let kre = DMatrix::from_fn(n, n, |i, j| gk[(i, j)].re);
            // B = Λ^{-1/2} V^T Gram(K) V Λ^{-1/2} on the kept range
            let mut v = DMatrix::zeros(n, keep.len());
            for (c, &i) in keep.iter().enumerate() {
                let scale = se.eigenvalues[i].sqrt().recip();
                for r in 0..n {
                    v[(r, c)] = se.eigenvectors[(r, i)] * scale;
                }
            }
            let b = v.transpose() * kre * v;
            let mut ev: Vec<f64> = b.symmetric_eigen().eigenvalues.iter().cloned().collect();
            ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let minimal_a = *ev.last().unwrap();
            Ok(DominationReport { holds: minimal_a.is_finite(), minimal_a: Some(minimal_a) })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PolyaFailure {
    NotNonincreasing { index: usize },
    NotConvex { index: usize },
    NoDecayToZero,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyaReport {
    pub pass: bool,
    pub failures: Vec<PolyaFailure>,
}

/// Pólya's sufficient criterion on uniform samples of `f` over `[0, c]`:
/// nonincreasing, convex, and decaying to zero, with `f(0) = 1`.
pub fn polya_criterion(samples: &[f64]) -> Result<PolyaReport> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::Data(format!("need at least 4 samples, got {n}")));
    }
    if (samples[0] - 1.0).abs() > 1e-9 {
        return Err(Error::Data(format!("f(0) must be 1, got {}", samples[0])));
    }
    let h = 1.0 / (n as f64 - 1.0); // relative spacing; convexity tolerance scales with h^2
    let mut failures = Vec::new();
    let mono_tol = 1e-12;
    for i in 1..n {
        if samples[i] > samples[i - 1] + mono_tol {
            failures.push(PolyaFailure::NotNonincreasing { index: i });
        }
    }
    let convex_tol = 1e-9 * h * h;
    for i in 1..n - 1 {
        let second = samples[i + 1] - 2.0 * samples[i] + samples[i - 1];
        if second < -convex_tol {
            failures.push(PolyaFailure::NotConvex { index: i });
        }
    }
    if samples[n - 1].abs() > 1e-9 {
        failures.push(PolyaFailure::NoDecayToZero);
    }
    Ok(PolyaReport { pass: failures.is_empty(), failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompleteMonotoneReport {
    pub pass: bool,
    /// First (order, anchor) where the alternating difference turned negative.
    pub witness: Option<(u32, usize)>,
}

/// Alternating forward differences `(-1)^k Δ^k q ≥ 0` for `k ≤ max_order` on
/// uniform samples of `q` over `[0, R]`.
pub fn completely_monotone(samples: &[f64], max_order: u32) -> Result<CompleteMonotoneReport> {
    let n = samples.len();
    if max_order > 6 {
        return Err(Error::Argument(format!("max_order limited to 6, got {max_order}")));
    }
    if n <= max_order as usize {
        return Err(Error::Data(format!(
            "need more than {max_order} samples for order {max_order}, got {n}"
        )));
    }
    let scale = samples.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1.0);
    let tol = 1e-12 * scale;
    let mut diff: Vec<f64> = samples.to_vec();
    for order in 1..=max_order {
        for i in 0..n - order as usize {
            diff[i] = diff[i + 1] - diff[i];
        }
        diff.truncate(n - order as usize);
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        for (i, &d) in diff.iter().enumerate() {
            if sign * d < -tol {
                return Ok(CompleteMonotoneReport { pass: false, witness: Some((order, i)) });
            }
        }
    }
    Ok(CompleteMonotoneReport { pass: true, witness: None })
}
