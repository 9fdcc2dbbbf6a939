//! Gaussian process covariance kernels, exact finite-dimensional path
//! sampling through Cholesky factors, the exponential-time transform from
//! Brownian motion to a stationary process, Itô-isometry checks, and random
//! power series against their infinite-product generating function.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PdFunction;

/// Covariance kernels from the stochastic side of the catalog.
#[derive(Clone, Debug)]
pub enum CovKernel {
    /// Brownian motion: `s ∧ t` on the half line.
    Bm,
    /// Brownian bridge pinned at (0,0) and (1,1): covariance `s∧t - st`,
    /// mean `t`.
    Bridge,
    /// Stationary exponential process: `(1/α) e^{-(α/2)|s-t|}`.
    Ou { alpha: f64 },
    /// Fractional Brownian motion: `(|s|^{2H} + |t|^{2H} - |s-t|^{2H})/2`.
    Fbm { hurst: f64 },
    /// Stationary kernel from a p.d. function: `F(s-t)`.
    FromPd(Box<PdFunction>),
}

impl CovKernel {
    pub fn id(&self) -> String {
        match self {
            CovKernel::Bm => "bm".into(),
            CovKernel::Bridge => "bridge".into(),
            CovKernel::Ou { alpha } => format!("ou({alpha})"),
            CovKernel::Fbm { hurst } => format!("fbm({hurst})"),
            CovKernel::FromPd(_) => "from_pd".into(),
        }
    }

    pub fn evaluate(&self, s: f64, t: f64) -> Result<f64> {
        match self {
            CovKernel::Bm => Ok(s.min(t)),
            CovKernel::Bridge => Ok(s.min(t) - s * t),
            CovKernel::Ou { alpha } => {
                if !(*alpha > 0.0) {
                    return Err(Error::Argument(format!("ou needs alpha > 0, got {alpha}")));
                }
                Ok((1.0 / alpha) * (-(alpha / 2.0) * (s - t).abs()).exp())
            }
            CovKernel::Fbm { hurst } => {
                if !(*hurst > 0.0 && *hurst < 1.0) {
                    return Err(Error::Argument(format!("fbm needs H in (0,1), got {hurst}")));
                }
                let h2 = 2.0 * hurst;
                Ok(0.5 * (s.abs().powf(h2) + t.abs().powf(h2) - (s - t).abs().powf(h2)))
            }
            CovKernel::FromPd(f) => Ok(f.evaluate(s - t)?.re),
        }
    }

    /// Mean function of the pinned process (zero for everything else).
    pub fn mean(&self, t: f64) -> f64 {
        match self {
            CovKernel::Bridge => t,
            _ => 0.0,
        }
    }

    fn validate_times(&self, times: &[f64]) -> Result<()> {
        if times.is_empty() {
            return Err(Error::Argument("need at least one time point".into()));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Argument("times must be strictly increasing".into()));
        }
        match self {
            CovKernel::Bm | CovKernel::Ou { .. } => {
                if times[0] < 0.0 {
                    return Err(Error::Argument("times must be nonnegative".into()));
                }
            }
            CovKernel::Bridge => {
                if times[0] <= 0.0 || *times.last().unwrap() >= 1.0 {
                    return Err(Error::Argument(
                        "bridge times must lie strictly inside (0, 1)".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Covariance matrix `C_ij = k(t_i, t_j)`.
pub fn cov_matrix(kernel: &CovKernel, times: &[f64]) -> Result<DMatrix<f64>> {
    kernel.validate_times(times)?;
    let n = times.len();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.evaluate(times[i], times[j])?;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}

/// Monte-Carlo sample paths with the exact finite-dimensional Gaussian law.
#[derive(Clone, Debug, Serialize)]
pub struct PathEnsemble {
    pub times: Vec<f64>,
    /// `paths[p][i]` is path `p` at `times[i]`.
    pub paths: Vec<Vec<f64>>,
    pub seed: u64,
    pub kernel_id: String,
}

impl PathEnsemble {
    pub fn m(&self) -> usize {
        self.paths.len()
    }

    /// Sample-mean-centered empirical covariance, fixed summation order.
    pub fn empirical_cov(&self) -> DMatrix<f64> {
        let n = self.times.len();
        let m = self.paths.len();
        let mut mean = vec![0.0f64; n];
        for p in &self.paths {
            for i in 0..n {
                mean[i] += p[i];
            }
        }
        for v in &mut mean {
            *v /= m as f64;
        }
        let mut c = DMatrix::zeros(n, n);
        for p in &self.paths {
            for i in 0..n {
                let di = p[i] - mean[i];
                for j in 0..=i {
                    c[(i, j)] += di * (p[j] - mean[j]);
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                let v = c[(i, j)] / m as f64;
                c[(i, j)] = v;
                c[(j, i)] = v;
            }
        }
        c
    }
}

/// Cholesky factor with the jitter ladder `ε·trace(C)/n` for
/// `ε ∈ {0, 1e-12, 1e-10, 1e-8}`.
fn cholesky_with_jitter(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = c.nrows();
    let scale = c.trace() / n as f64;
    for eps in [0.0, 1e-12, 1e-10, 1e-8] {
        let mut trial = c.clone();
        if eps > 0.0 {
            for i in 0..n {
                trial[(i, i)] += eps * scale;
            }
        }
        if let Some(chol) = trial.cholesky() {
            return Ok(chol.l());
        }
    }
    Err(Error::Numeric(
        "covariance matrix is not positive definite within the jitter ladder".into(),
    ))
}

/// Draw `m` paths at the given times.
///
/// Each path has its own counter-based stream (`seed`, path index), so the
/// ensemble is reproducible and independent of evaluation order.
pub fn sample_paths(kernel: &CovKernel, times: &[f64], m: usize, seed: u64) -> Result<PathEnsemble> {
    let c = cov_matrix(kernel, times)?;
    let l = cholesky_with_jitter(&c)?;
    let n = times.len();
    let means: Vec<f64> = times.iter().map(|&t| kernel.mean(t)).collect();
    let mut paths = Vec::with_capacity(m);
    for p in 0..m {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(p as u64 + 1);
        let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut x = means.clone();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += l[(i, j)] * z[j];
            }
            x[i] += acc;
        }
        paths.push(x);
    }
    Ok(PathEnsemble { times: times.to_vec(), paths, seed, kernel_id: kernel.id() })
}

/// Exponential-time transform `X(x) = e^{-x} B(e^{2x})` of Brownian paths;
/// the covariance of the result is `e^{-|x-y|}`.
pub fn ou_from_bm(x_grid: &[f64], m: usize, seed: u64) -> Result<PathEnsemble> {
    if x_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("x grid must be strictly increasing".into()));
    }
    let times: Vec<f64> = x_grid.iter().map(|&x| (2.0 * x).exp()).collect();
    let bm = sample_paths(&CovKernel::Bm, &times, m, seed)?;
    let paths = bm
        .paths
        .into_iter()
        .map(|p| {
            p.into_iter()
                .zip(x_grid)
                .map(|(b, &x)| (-x).exp() * b)
                .collect::<Vec<f64>>()
        })
        .collect();
    Ok(PathEnsemble {
        times: x_grid.to_vec(),
        paths,
        seed,
        kernel_id: "ou_from_bm".into(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ItoReport {
    pub lhs: f64,
    pub rhs: f64,
    pub z_score: f64,
}

/// Itô isometry at partition scale: the empirical second moment of
/// `Σ f(t_i)(X_{t_i} - X_{t_{i-1}})` against `Σ |f(t_i)|² (t_i - t_{i-1})`.
///
/// `partition` indexes into the ensemble's time grid.
pub fn ito_isometry_check(
    f_values: &[f64],
    partition: &[usize],
    ensemble: &PathEnsemble,
) -> Result<ItoReport> {
    if partition.len() < 2 || f_values.len() != partition.len() {
        return Err(Error::Argument(
            "partition needs >= 2 indices and matching f values".into(),
        ));
    }
    let n_times = ensemble.times.len();
    if partition.iter().any(|&i| i >= n_times) || partition.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("partition must be increasing indices into times".into()));
    }
    let mut rhs = 0.0;
    for w in 1..partition.len() {
        let dt = ensemble.times[partition[w]] - ensemble.times[partition[w - 1]];
        rhs += f_values[w] * f_values[w] * dt;
    }
    let m = ensemble.paths.len();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for p in &ensemble.paths {
        let mut s = 0.0;
        for w in 1..partition.len() {
            s += f_values[w] * (p[partition[w]] - p[partition[w - 1]]);
        }
        let s2 = s * s;
        sum += s2;
        sum_sq += s2 * s2;
    }
    let lhs = sum / m as f64;
    let var = (sum_sq / m as f64 - lhs * lhs).max(0.0);
    let se = (var / m as f64).sqrt();
    let z_score = if se > 0.0 { (lhs - rhs) / se } else { 0.0 };
    Ok(ItoReport { lhs, rhs, z_score })
}

#[derive(Clone, Debug, Serialize)]
pub struct CharFnReport {
    pub sup_error: f64,
    pub lambdas: Vec<f64>,
    pub empirical_re: Vec<f64>,
    pub product: Vec<f64>,
}

/// Random power series `X_a = Σ_k ω_k a^k` with fair signs: its empirical
/// characteristic function against the product `Π_k cos(a^k λ)`.
pub fn random_power_series_charfn(
    a: f64,
    m: usize,
    lambdas: &[f64],
    seed: u64,
) -> Result<CharFnReport> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Argument(format!("need a in (0,1), got {a}")));
    }
    // truncate once a^K drops below 1e-12
    let k_max = ((12.0 * std::f64::consts::LN_10) / (1.0 / a).ln()).ceil() as usize;
    let product: Vec<f64> = lambdas
        .iter()
        .map(|&lam| {
            let mut prod = 1.0;
            let mut ak = 1.0;
            for _ in 1..=k_max {
                ak *= a;
                prod *= (ak * lam).cos();
            }
            prod
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(m);
    for _ in 0..m {
        let mut x = 0.0;
        let mut ak = 1.0;
        for _ in 1..=k_max {
            ak *= a;
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            x += sign * ak;
        }
        samples.push(x);
    }
    let mut empirical_re = Vec::with_capacity(lambdas.len());
    let mut sup_error = 0.0f64;
    for (i, &lam) in lambdas.iter().enumerate() {
        let mut re = 0.0;
        let mut im = 0.0;
        for &x in &samples {
            re += (lam * x).cos();
            im += (lam * x).sin();
        }
        re /= m as f64;
        im /= m as f64;
        empirical_re.push(re);
        let err = ((re - product[i]).powi(2) + im * im).sqrt();
        sup_error = sup_error.max(err);
    }
    Ok(CharFnReport { sup_error, lambdas: lambdas.to_vec(), empirical_re, product })
}

/// The three-component p.d. function mixing an atom, a singular infinite
/// product, and an absolutely continuous sinc part:
/// `(1/3)(e^{-ix} + Π_n cos(2πx/3^n) + e^{i3x/2} sin(x/2)/(x/2))`.
pub fn mixed_spectrum_pd(x: f64) -> num_complex::Complex64 {
    use num_complex::Complex64;
    let mut prod = 1.0;
    let mut p3 = 1.0;
    for _ in 1..=32 {
        p3 /= 3.0;
        let factor = (2.0 * std::f64::consts::PI * x * p3).cos();
        prod *= factor;
        if p3 < 1e-14 {
            break;
        }
    }
    let atom = Complex64::from_polar(1.0, -x);
    let ac = Complex64::from_polar(crate::quad::sinc(0.5 * x), 1.5 * x);
    (atom + Complex64::new(prod, 0.0) + ac) / 3.0
}
