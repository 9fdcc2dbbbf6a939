//! The Mercer operator `(T_F φ)(x) = ∫_0^a φ(y) F(x-y) dy` on `L²(0, a)`:
//! Nyström discretization, spectra, the rank-one split of the tent kernel,
//! RKHS orthonormal bases, projection bounds, Shannon sampling functions,
//! and the sampling criterion for membership in `Ext(F)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GridSpec, Interval, Kernel, PdFunction, SpectralMeasure};
use crate::quad::{integrate_complex, sinc, QuadratureSpec};

/// Discretized Mercer matrix, symmetrized as `D^{1/2} K D^{1/2}`.
pub enum MercerMatrix {
    Real(DMatrix<f64>),
    Hermitian(DMatrix<Complex64>),
}

impl MercerMatrix {
    pub fn n(&self) -> usize {
        match self {
            MercerMatrix::Real(m) => m.nrows(),
            MercerMatrix::Hermitian(m) => m.nrows(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            MercerMatrix::Real(m) => m.trace(),
            MercerMatrix::Hermitian(m) => m.trace().re,
        }
    }

    /// Max-norm of the entrywise difference.
    pub fn max_diff(&self, other: &MercerMatrix) -> f64 {
        match (self, other) {
            (MercerMatrix::Real(a), MercerMatrix::Real(b)) => {
                (a - b).iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
            _ => {
                let a = self.to_complex();
                let b = other.to_complex();
                (a - b).iter().fold(0.0f64, |m, v| m.max(v.norm()))
            }
        }
    }

    fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            MercerMatrix::Real(m) => m.map(|v| Complex64::new(v, 0.0)),
            MercerMatrix::Hermitian(m) => m.clone(),
        }
    }

    /// Linear combination `c1·self + c2·other` (entry shapes must match).
    pub fn linear_combination(&self, c1: f64, other: &MercerMatrix, c2: f64) -> MercerMatrix {
        match (self, other) {
            (MercerMatrix::Real(a), MercerMatrix::Real(b)) => {
                MercerMatrix::Real(a * c1 + b * c2)
            }
            _ => MercerMatrix::Hermitian(
                self.to_complex() * Complex64::new(c1, 0.0)
                    + other.to_complex() * Complex64::new(c2, 0.0),
            ),
        }
    }
}

/// Nyström matrix of `T_F` on `(0, a)` with `n` midpoint nodes.
pub fn discretize(f: &PdFunction, a: f64, n: usize) -> Result<(MercerMatrix, GridSpec)> {
    if n < 16 {
        return Err(Error::Argument(format!("need n >= 16 nodes, got {n}")));
    }
    if !(a > 0.0) {
        return Err(Error::Argument(format!("interval length must be positive, got {a}")));
    }
    if !f.is_closed_form() && f.half_width() + 1e-12 < a {
        return Err(Error::Domain(format!(
            "F is only known on (-{}, {}) but the Mercer kernel needs (-{a}, {a})",
            f.half_width(),
            f.half_width()
        )));
    }
    let grid = GridSpec::midpoint(Interval::new(0.0, a)?, n)?;
    let kernel = Kernel::FromPd(Box::new(f.clone()));
    let m = discretize_kernel(&kernel, &grid)?;
    Ok((m, grid))
}

/// Nyström matrix of an arbitrary Hermitian kernel on a grid.
pub fn discretize_kernel(kernel: &Kernel, grid: &GridSpec) -> Result<MercerMatrix> {
    let n = grid.n();
    let mut vals = DMatrix::<Complex64>::zeros(n, n);
    let mut max_im = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let w = (grid.weights[i] * grid.weights[j]).sqrt();
            let v = kernel.evaluate(grid.nodes[i], grid.nodes[j])? * w;
            max_im = max_im.max(v.im.abs());
            vals[(i, j)] = v;
            vals[(j, i)] = v.conj();
        }
    }
    if max_im < 1e-14 {
        Ok(MercerMatrix::Real(vals.map(|v| v.re)))
    } else {
        Ok(MercerMatrix::Hermitian(vals))
    }
}

/// Spectral data of a discretized Mercer operator.
///
/// Eigenvalues descend; eigenfunction columns hold the de-symmetrized nodal
/// values `ξ_k(x_i)`, orthonormal in the weighted `L²` inner product. The
/// sign convention makes the first extremum of each column positive.
#[derive(Clone, Debug, Serialize)]
pub struct MercerDecomposition {
    #[serde(skip)]
    pub grid: GridSpec,
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenfunctions: DMatrix<f64>,
}

impl MercerDecomposition {
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Weighted L² inner product of eigenfunction columns `j` and `k`.
    pub fn l2_inner(&self, j: usize, k: usize) -> f64 {
        (0..self.grid.n())
            .map(|i| self.grid.weights[i] * self.eigenfunctions[(i, j)] * self.eigenfunctions[(i, k)])
            .sum()
    }

    /// Max over sampled pairs of `|F(x-y) - Σ_{k<n_modes} λ_k ξ_k(x) ξ_k(y)|`.
    pub fn reconstruction_error(&self, f: &PdFunction, n_modes: usize) -> Result<f64> {
        let n = self.grid.n();
        let stride = (n / 48).max(1);
        let mut worst = 0.0f64;
        let modes = n_modes.min(self.eigenvalues.len());
        for i in (0..n).step_by(stride) {
            for j in (0..=i).step_by(stride) {
                let mut acc = 0.0;
                for k in 0..modes {
                    acc += self.eigenvalues[k]
                        * self.eigenfunctions[(i, k)]
                        * self.eigenfunctions[(j, k)];
                }
                let truth = f.evaluate(self.grid.nodes[i] - self.grid.nodes[j])?.re;
                worst = worst.max((truth - acc).abs());
            }
        }
        Ok(worst)
    }
}

/// Eigenvalues of a Hermitian Mercer matrix, descending (values only; the
/// complex case goes through the real symmetric embedding).
pub fn eigenvalues_only(m: &MercerMatrix) -> Vec<f64> {
    match m {
        MercerMatrix::Real(a) => {
            let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
            ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
            ev
        }
        MercerMatrix::Hermitian(a) => {
            let mut ev = crate::pdcheck::hermitian_eigenvalues(a);
            ev.reverse();
            ev
        }
    }
}

/// Full eigensystem of a real symmetric Mercer matrix.
pub fn eigensystem(m: &MercerMatrix, grid: &GridSpec) -> Result<MercerDecomposition> {
    let a = match m {
        MercerMatrix::Real(a) => a.clone(),
        MercerMatrix::Hermitian(_) => {
            return Err(Error::Numeric(
                "full eigensystem is provided for real symmetric kernels; \
                 use eigenvalues_only for the Hermitian case"
                    .into(),
            ))
        }
    };
    let n = grid.n();
    if a.nrows() != n {
        return Err(Error::Argument("grid size does not match the matrix".into()));
    }
    let se = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).unwrap());
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenfunctions = DMatrix::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        eigenvalues.push(se.eigenvalues[idx]);
        // de-symmetrize: function values are D^{-1/2} v
        let mut column: Vec<f64> = (0..n)
            .map(|r| se.eigenvectors[(r, idx)] / grid.weights[r].sqrt())
            .collect();
        fix_sign(&mut column);
        for r in 0..n {
            eigenfunctions[(r, col)] = column[r];
        }
    }
    Ok(MercerDecomposition { grid: grid.clone(), eigenvalues, eigenfunctions })
}

/// Flip a nodal vector so its first extremum is positive.
fn fix_sign(v: &mut [f64]) {
    let max_abs = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if max_abs == 0.0 {
        return;
    }
    let mut pivot = 0usize;
    for i in 0..v.len() {
        if v[i].abs() >= 0.5 * max_abs {
            pivot = i;
            break;
        }
    }
    if v[pivot] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rank1SplitReport {
    /// `max |M_{F2} - 2 M_E - M_L|`; the kernel identity
    /// `1 - |x-y| = 2 min(x,y) + 1 - x - y` is exact, so this is float-level.
    pub residual: f64,
    /// Positive root of the affine eigenfunction system `(3/8 - λ)a = b/24`,
    /// `-a/2 = λb` for `L` acting on `a + bx`, i.e. `(9 + √129)/48`.
    pub affine_system_eigenvalue: f64,
    /// Slope ratio `b/a = -(√129 - 9)/2` from the same system.
    pub affine_system_slope_ratio: f64,
    /// Nonzero eigenvalues of the discretized operator `L` on `L²(0, 1/2)`
    /// (its range is spanned by `1` and `x`): `1/8 ± 1/(4√3)`.
    pub discretized_l_eigenvalues: (f64, f64),
}

/// The split `T_{F2} = 2 T_E + L` on `(0, 1/2)` with `E = min(x,y)` and
/// `L(x,y) = 1 - x - y`.
pub fn rank_one_split(n: usize) -> Result<Rank1SplitReport> {
    let grid = GridSpec::midpoint(Interval::new(0.0, 0.5)?, n.max(16))?;
    let m_f2 = discretize_kernel(&Kernel::FromPd(Box::new(PdFunction::f2())), &grid)?;
    let m_e = discretize_kernel(&Kernel::MinXY, &grid)?;
    let m_l = discretize_kernel(&Kernel::OneMinusSum, &grid)?;
    let residual = m_f2.max_diff(&m_e.linear_combination(2.0, &m_l, 1.0));

    // the affine system from the rank-one remark, solved as a 2x2 eigenproblem
    let sys = DMatrix::<f64>::from_row_slice(2, 2, &[3.0 / 8.0, -1.0 / 24.0, -0.5, 0.0]);
    let tr = sys[(0, 0)] + sys[(1, 1)];
    let det = sys[(0, 0)] * sys[(1, 1)] - sys[(0, 1)] * sys[(1, 0)];
    let disc = (tr * tr - 4.0 * det).sqrt();
    let lambda = 0.5 * (tr + disc);
    let slope_ratio = (3.0 / 8.0 - lambda) * 24.0;

    // true spectrum of the discretized L (two nonzero eigenvalues)
    let ev = eigenvalues_only(&m_l);
    let top = ev[0];
    let bottom = *ev.last().unwrap();
    Ok(Rank1SplitReport {
        residual,
        affine_system_eigenvalue: lambda,
        affine_system_slope_ratio: slope_ratio,
        discretized_l_eigenvalues: (top, bottom),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OnbReport {
    pub max_deviation: f64,
    pub gram: Vec<Vec<f64>>,
}

/// Check that `{√λ_k ξ_k}` is orthonormal in `H_F` through the spectral
/// isometry. As an element of `H_F`, `ξ_k = T_F(ξ_k/λ_k)`, so
/// `⟨ξ_j, ξ_k⟩_{H_F} = ∫ conj(ξ̂_j) ξ̂_k dμ / (λ_j λ_k)` and the Gram of the
/// rescaled family is `G_{jk} = ∫ conj(ξ̂_j) ξ̂_k dμ / √(λ_j λ_k)`, which
/// should be the identity (`∫ |ξ̂_k|² dμ = ⟨ξ_k, T_F ξ_k⟩ = λ_k`).
pub fn rkhs_onb(
    d: &MercerDecomposition,
    mu: &SpectralMeasure,
    n_modes: usize,
    q: &QuadratureSpec,
) -> Result<OnbReport> {
    q.validate()?;
    let k = n_modes.min(d.eigenvalues.len());
    if k == 0 {
        return Err(Error::Argument("need at least one mode".into()));
    }
    // Fourier transforms of the eigenfunctions on the quadrature lattice
    let radius = q.truncation_radius.unwrap_or(200.0);
    let m = q.subdivisions(-radius, radius);
    let step = 2.0 * radius / m as f64;
    let lambdas: Vec<f64> = (0..=m).map(|i| -radius + i as f64 * step).collect();
    let mut transforms = vec![vec![Complex64::ZERO; lambdas.len()]; k];
    for (j, row) in transforms.iter_mut().enumerate() {
        for (li, &lam) in lambdas.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for i in 0..d.grid.n() {
                acc += Complex64::from_polar(
                    d.grid.weights[i] * d.eigenfunctions[(i, j)],
                    -lam * d.grid.nodes[i],
                );
            }
            row[li] = acc;
        }
    }
    // Simpson weights on the lattice
    let mut wq = vec![step / 3.0; lambdas.len()];
    for (i, w) in wq.iter_mut().enumerate() {
        if i == 0 || i == lambdas.len() - 1 {
            continue;
        }
        *w = if i % 2 == 1 { 4.0 * step / 3.0 } else { 2.0 * step / 3.0 };
    }
    let density: Vec<f64> = lambdas.iter().map(|&l| mu.density_value(l)).collect();

    let mut gram = vec![vec![0.0f64; k]; k];
    let mut max_dev = 0.0f64;
    for j in 0..k {
        for kk in 0..k {
            let mut acc = Complex64::ZERO;
            for li in 0..lambdas.len() {
                acc += transforms[j][li].conj() * transforms[kk][li] * (wq[li] * density[li]);
            }
            for a in mu.atoms() {
                let tj = point_transform(d, j, a.location);
                let tk = point_transform(d, kk, a.location);
                acc += tj.conj() * tk * a.weight;
            }
            let val = (acc / (d.eigenvalues[j] * d.eigenvalues[kk]).sqrt()).re;
            gram[j][kk] = val;
            let target = if j == kk { 1.0 } else { 0.0 };
            max_dev = max_dev.max((val - target).abs());
        }
    }
    Ok(OnbReport { max_deviation: max_dev, gram })
}

fn point_transform(d: &MercerDecomposition, j: usize, lam: f64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for i in 0..d.grid.n() {
        acc += Complex64::from_polar(d.grid.weights[i] * d.eigenfunctions[(i, j)], -lam * d.grid.nodes[i]);
    }
    acc
}

/// Orthonormality of `{√λ_k ξ_k}` in the energy form `∫ ξ' η'`, the native
/// inner product of the Brownian-motion kernel `min(x, y)`.
pub fn rkhs_onb_energy(d: &MercerDecomposition, n_modes: usize) -> Result<OnbReport> {
    let k = n_modes.min(d.eigenvalues.len());
    let n = d.grid.n();
    if n < 3 {
        return Err(Error::Argument("grid too small for derivatives".into()));
    }
    let h = d.grid.spacing();
    let deriv = |j: usize| -> Vec<f64> {
        let mut out = vec![0.0; n - 1];
        for i in 0..n - 1 {
            out[i] = (d.eigenfunctions[(i + 1, j)] - d.eigenfunctions[(i, j)]) / h;
        }
        out
    };
    let derivs: Vec<Vec<f64>> = (0..k).map(deriv).collect();
    let mut gram = vec![vec![0.0f64; k]; k];
    let mut max_dev = 0.0f64;
    for j in 0..k {
        for kk in 0..k {
            let dot: f64 = derivs[j].iter().zip(&derivs[kk]).map(|(a, b)| a * b * h).sum();
            let val = dot * (d.eigenvalues[j] * d.eigenvalues[kk]).sqrt();
            gram[j][kk] = val;
            let target = if j == kk { 1.0 } else { 0.0 };
            max_dev = max_dev.max((val - target).abs());
        }
    }
    Ok(OnbReport { max_deviation: max_dev, gram })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub min_eigenvalue: f64,
    pub holds: bool,
}

/// Numeric check of `Q_N ⪰ (1/λ₁) P_N` on the discretized span of the top
/// modes, where `Q_N` projects in `H_F` and `P_N` in `L²`.
///
/// In coordinates `f = Σ c_k ξ_k` (over `k < modes`), the two quadratic
/// forms are `Σ_{n<N} |⟨ξ_n, f⟩|²/λ_n` and `Σ_{n<N} |⟨ξ_n, f⟩|²` with the
/// weighted-grid inner product; the check eigendecomposes their difference.
pub fn projection_bound(d: &MercerDecomposition, n_proj: usize, tol: f64) -> Result<ProjectionReport> {
    let modes = (2 * n_proj).clamp(4, d.eigenvalues.len()).min(d.eigenvalues.len());
    let n_proj = n_proj.min(modes);
    if n_proj == 0 {
        return Err(Error::Argument("need N >= 1".into()));
    }
    let lambda1 = d.eigenvalues[0];
    if !(lambda1 > 0.0) {
        return Err(Error::Degenerate("top eigenvalue is not positive".into()));
    }
    // G[n][k] = <xi_n, xi_k>_{L^2, w} for n < n_proj, k < modes
    let mut g = DMatrix::<f64>::zeros(n_proj, modes);
    for nn in 0..n_proj {
        for kk in 0..modes {
            g[(nn, kk)] = d.l2_inner(nn, kk);
        }
    }
    let mut diff = DMatrix::<f64>::zeros(modes, modes);
    for nn in 0..n_proj {
        let coef = 1.0 / d.eigenvalues[nn] - 1.0 / lambda1;
        for i in 0..modes {
            for j in 0..modes {
                diff[(i, j)] += coef * g[(nn, i)] * g[(nn, j)];
            }
        }
    }
    let mut ev: Vec<f64> = diff.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let min_eigenvalue = ev[0];
    Ok(ProjectionReport { min_eigenvalue, holds: min_eigenvalue >= -tol })
}

/// The interpolation kernel of the sampling theorem with the phase carried
/// by interpolation on `[0, 1]`: `e^{-iξ} sin(ξ)/ξ`.
fn shannon_kernel(xi: f64) -> Complex64 {
    Complex64::from_polar(sinc(xi), -xi)
}

/// Node density for the spectral lattice quadrature: narrow compact
/// densities (rescaled band-limited pairs) need nodes that resolve their
/// support, not just the unit lattice cell.
fn spectral_nodes_per_unit(nu: &SpectralMeasure, q: &QuadratureSpec) -> u32 {
    let mut npu = q.nodes_per_unit;
    for d in nu.densities() {
        if let crate::model::TailDecay::Compact { radius } = d.kind.tail() {
            if radius > 0.0 {
                npu = npu.max(((64.0 / radius).ceil() as u32).min(4096));
            }
        }
    }
    npu
}

/// Shannon generating functions `f_n(x) = ∫ e^{i2πλx} Sha(π(λ-n)) dμ(λ)`.
///
/// `mu` is given in the `e^{iλx}` convention and is rescaled internally to
/// the `e^{i2πλx}` lattice convention. `f_n = T_F(e^{i2πn·})` when
/// `μ ∈ Ext(F)` on `(-1, 1)`.
pub fn shannon_functions(
    mu: &SpectralMeasure,
    n: i64,
    xs: &[f64],
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    q.validate()?;
    let nu = mu.rescale_to_2pi();
    let radius = q
        .truncation_radius
        .unwrap_or_else(|| 40.0 + n.unsigned_abs() as f64);
    let q = QuadratureSpec { nodes_per_unit: spectral_nodes_per_unit(&nu, q), ..*q };
    let q = &q;
    let m = q.subdivisions(-radius, radius).max(512);
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut acc = Complex64::ZERO;
        for a in nu.atoms() {
            acc += shannon_kernel(std::f64::consts::PI * (a.location - n as f64))
                * Complex64::from_polar(a.weight, 2.0 * std::f64::consts::PI * a.location * x);
        }
        if !nu.densities().is_empty() {
            acc += integrate_complex(q.rule, -radius, radius, m, |lam| {
                let k = shannon_kernel(std::f64::consts::PI * (lam - n as f64));
                k * Complex64::from_polar(
                    nu.density_value(lam),
                    2.0 * std::f64::consts::PI * lam * x,
                )
            });
        }
        out.push(acc);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShannonMembershipReport {
    pub pass: bool,
    pub sup_error: f64,
    pub n_used: i64,
}

/// Midpoint grid on `(-1, 1)` that keeps clear of the kink at `x = 0`,
/// where the truncated lattice sum converges slowest.
pub fn shannon_default_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| -1.0 + (2.0 * i as f64 + 1.0) / n as f64).collect()
}

/// Affine adapter for the sampling criterion, which is stated on `(-1, 1)`:
/// maps `(F, μ)` on `(-a, a)` to the pair `(F(a·), μ∘(·/a))` on `(-1, 1)`,
/// preserving the extension property.
pub fn rescale_pair_to_unit(
    f: &PdFunction,
    mu: &SpectralMeasure,
) -> Result<(PdFunction, SpectralMeasure)> {
    let a = f.half_width();
    let n = 4097;
    let table = PdFunction::from_fn(1.0, n, |x| f.evaluate(a * x).unwrap_or(Complex64::ZERO))?;
    let atoms = mu
        .atoms()
        .iter()
        .map(|at| (at.location * a, at.weight))
        .collect::<Vec<_>>();
    let densities = mu
        .densities()
        .iter()
        .map(|d| crate::model::Density {
            kind: crate::model::DensityKind::Scaled {
                base: Box::new(d.kind.clone()),
                scale: 1.0 / a,
            },
            weight: d.weight,
        })
        .collect();
    let scaled = SpectralMeasure::new(
        atoms
            .into_iter()
            .map(|(location, weight)| crate::model::Atom { location, weight })
            .collect(),
        densities,
    )?;
    Ok((table, scaled))
}

/// Sampling criterion for `μ ∈ Ext(F)` on `(-1, 1)`: partial lattice sums
/// `Σ_{|n|<=N} ∫ e^{i2πλx} sinc(π(λ-n)) dμ(λ)` must reproduce `F` on the
/// grid. The unphased sinc makes the lattice sum telescope to the measure's
/// transform; `N` escalates in powers of two up to `n_max`.
pub fn ext_membership_shannon(
    f: &PdFunction,
    mu: &SpectralMeasure,
    xs: &[f64],
    n_max: i64,
    tol: f64,
    q: &QuadratureSpec,
) -> Result<ShannonMembershipReport> {
    q.validate()?;
    if xs.is_empty() {
        return Err(Error::Argument("empty evaluation grid".into()));
    }
    let nu = mu.rescale_to_2pi();
    let mut n = 8i64.min(n_max.max(1));
    let mut best = ShannonMembershipReport { pass: false, sup_error: f64::INFINITY, n_used: n };
    loop {
        let sup = shannon_partial_sum_error(f, &nu, xs, n, q)?;
        if sup < best.sup_error {
            best = ShannonMembershipReport { pass: sup <= tol, sup_error: sup, n_used: n };
        }
        if sup <= tol {
            return Ok(ShannonMembershipReport { pass: true, sup_error: sup, n_used: n });
        }
        if n >= n_max {
            return Ok(best);
        }
        n = (2 * n).min(n_max);
    }
}

fn shannon_partial_sum_error(
    f: &PdFunction,
    nu: &SpectralMeasure,
    xs: &[f64],
    n: i64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let radius = q.truncation_radius.unwrap_or(n as f64 + 60.0);
    let q = QuadratureSpec { nodes_per_unit: spectral_nodes_per_unit(nu, q), ..*q };
    let m = q.subdivisions(-radius, radius).max(512);
    let step = 2.0 * radius / m as f64;
    let tau = 2.0 * std::f64::consts::PI;
    // K_N(λ) = Σ_{|k|<=N} sinc(π(λ-k)), telescoping to 1 as N grows
    let lattice_sum = |lam: f64| -> f64 {
        let mut acc = 0.0;
        for k in -n..=n {
            acc += sinc(std::f64::consts::PI * (lam - k as f64));
        }
        acc
    };
    // precompute density * K_N on the quadrature lattice
    let mut weights = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let lam = -radius + i as f64 * step;
        let simpson = if i == 0 || i == m {
            step / 3.0
        } else if i % 2 == 1 {
            4.0 * step / 3.0
        } else {
            2.0 * step / 3.0
        };
        weights.push((lam, simpson * nu.density_value(lam) * lattice_sum(lam)));
    }
    let mut sup = 0.0f64;
    for &x in xs {
        if !f.domain().contains(x) {
            return Err(Error::Domain(format!("grid point {x} outside the domain of F")));
        }
        let mut acc = Complex64::ZERO;
        for a in nu.atoms() {
            acc += Complex64::from_polar(a.weight * lattice_sum(a.location), tau * a.location * x);
        }
        for &(lam, w) in &weights {
            acc += Complex64::from_polar(w, tau * lam * x);
        }
        sup = sup.max((acc - f.evaluate(x)?).norm());
    }
    Ok(sup)
}

#[derive(Clone, Debug, Serialize)]
pub struct BesselFrameReport {
    pub holds: bool,
    /// Largest observed `Σ_n |⟨f_n, ξ⟩|² / (λ₁ ‖ξ‖²)`.
    pub max_ratio: f64,
}

/// Bessel frame bound for the Shannon system on `(-1, 1)`:
/// `Σ_n |⟨f_n, ξ⟩_{H_F}|² ≤ λ₁ ‖ξ‖²_{H_F}` for `ξ` given by coefficient
/// vectors in the Mercer eigenbasis. Uses `⟨f_n, ξ⟩_{H_F} = ⟨e_n, ξ⟩_{L²}`.
pub fn bessel_frame_bound(
    d: &MercerDecomposition,
    n_abs_max: i64,
    coefficient_sets: &[Vec<f64>],
    tol: f64,
) -> Result<BesselFrameReport> {
    if (d.grid.interval.lo(), d.grid.interval.hi()) != (0.0, 1.0) {
        return Err(Error::Argument("the lattice frame check expects the grid on (0, 1)".into()));
    }
    let lambda1 = d.eigenvalues[0];
    let n_grid = d.grid.n();
    let tau = 2.0 * std::f64::consts::PI;
    let mut max_ratio = 0.0f64;
    for coeffs in coefficient_sets {
        let k = coeffs.len().min(d.eigenvalues.len());
        if k == 0 {
            continue;
        }
        // ξ values on the grid and its H_F norm via the eigen coordinates
        let mut xi = vec![0.0f64; n_grid];
        let mut hf_norm_sq = 0.0;
        for (j, &c) in coeffs.iter().take(k).enumerate() {
            if d.eigenvalues[j] <= 0.0 {
                continue;
            }
            for i in 0..n_grid {
                xi[i] += c * d.eigenfunctions[(i, j)];
            }
            hf_norm_sq += c * c / d.eigenvalues[j];
        }
        if hf_norm_sq == 0.0 {
            continue;
        }
        let mut lhs = 0.0;
        for nn in -n_abs_max..=n_abs_max {
            let mut inner = Complex64::ZERO;
            for i in 0..n_grid {
                inner += Complex64::from_polar(
                    d.grid.weights[i] * xi[i],
                    -tau * nn as f64 * d.grid.nodes[i],
                );
            }
            lhs += inner.norm_sqr();
        }
        max_ratio = max_ratio.max(lhs / (lambda1 * hf_norm_sq));
        if lhs > lambda1 * hf_norm_sq + tol {
            return Ok(BesselFrameReport { holds: false, max_ratio });
        }
    }
    Ok(BesselFrameReport { holds: true, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn constant_kernel_has_rank_one() {
        let one = PdFunction::constant(2.0).unwrap();
        let (m, grid) = discretize(&one, 1.0, 64).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        assert_abs_diff_eq!(d.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert!(d.eigenvalues[1].abs() < 1e-12);
        assert_abs_diff_eq!(d.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cosine_kernel_has_rank_two() {
        let (m, _grid) = discretize(&PdFunction::f6(), PI / 4.0, 64).unwrap();
        let ev = eigenvalues_only(&m);
        assert!(ev[1] > 1e-6);
        assert!(ev[2].abs() < 1e-12 * ev[0]);
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), PI / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn min_kernel_spectrum_matches_closed_form() {
        // E on (0, 1/2): λ_k = 1/((2k-1)π)², eigenfunctions sin((2k-1)πx).
        let grid = GridSpec::midpoint(Interval::new(0.0, 0.5).unwrap(), 400).unwrap();
        let m = discretize_kernel(&Kernel::MinXY, &grid).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        for k in 1..=4usize {
            let want = 1.0 / (((2 * k - 1) as f64 * PI).powi(2));
            assert_abs_diff_eq!(d.eigenvalues[k - 1], want, epsilon = 1e-4 * want.max(1e-3));
            // cosine similarity against the sine profile
            let mut dot = 0.0;
            let mut n1 = 0.0;
            let mut n2 = 0.0;
            for (i, &x) in grid.nodes.iter().enumerate() {
                let s = ((2 * k - 1) as f64 * PI * x).sin();
                let v = d.eigenfunctions[(i, k - 1)];
                dot += s * v;
                n1 += s * s;
                n2 += v * v;
            }
            assert!(dot / (n1 * n2).sqrt() > 0.9999, "mode {k}");
        }
        assert_abs_diff_eq!(d.trace(), 0.125, epsilon = 1e-12);
    }

    #[test]
    fn greens_kernel_carries_the_sine_spectrum() {
        let grid = GridSpec::midpoint(Interval::new(0.0, 2.0).unwrap(), 400).unwrap();
        let m = discretize_kernel(&Kernel::GreensPolyaF3, &grid).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        for k in 1..=4usize {
            let want = 2.0 / (1.0 + (k as f64 * PI / 2.0).powi(2));
            assert_abs_diff_eq!(d.eigenvalues[k - 1], want, epsilon = 2e-4 * want);
        }
        // trace of the Green's operator is 2 coth(2) - 1
        let want_trace = 2.0 / (2.0f64).tanh() - 1.0;
        assert_abs_diff_eq!(d.trace(), want_trace, epsilon = 1e-4);
    }

    #[test]
    fn polya_extension_mercer_trace_is_interval_length() {
        // The true Mercer operator of the spline extension keeps the trace
        // identity trace(T_F) = a · F(0) = 2.
        let e = crate::polya::build_spline_extension(
            &PdFunction::f3(),
            crate::polya::ExtensionMode::AutoTangent,
            None,
        )
        .unwrap();
        let table = PdFunction::from_fn(2.1, 4097, |x| Complex64::new(e.evaluate(x), 0.0)).unwrap();
        let (m, _g) = discretize(&table, 2.0, 256).unwrap();
        let ev = eigenvalues_only(&m);
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), 2.0, epsilon = 1e-3);
        // and its top eigenvalue is NOT the Green's-operator value
        assert!((ev[0] - 0.5768).abs() > 0.3);
    }

    #[test]
    fn tent_trace_is_one_half() {
        let (m, _) = discretize(&PdFunction::f2(), 0.5, 128).unwrap();
        let ev = eigenvalues_only(&m);
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalue_convergence_is_second_order() {
        let closed = 1.0 / (PI * PI);
        let err = |n: usize| {
            let grid = GridSpec::midpoint(Interval::new(0.0, 0.5).unwrap(), n).unwrap();
            let m = discretize_kernel(&Kernel::MinXY, &grid).unwrap();
            (eigenvalues_only(&m)[0] - closed).abs()
        };
        let (e1, e2) = (err(128), err(256));
        assert!(e1 / e2 > 3.0, "ratio {} not ~4", e1 / e2);
    }

    #[test]
    fn rank_one_split_identities() {
        let r = rank_one_split(256).unwrap();
        assert!(r.residual < 1e-12, "residual {}", r.residual);
        let want = (9.0 + 129.0f64.sqrt()) / 48.0;
        assert_abs_diff_eq!(r.affine_system_eigenvalue, want, epsilon = 1e-12);
        assert_abs_diff_eq!(
            r.affine_system_slope_ratio,
            -(129.0f64.sqrt() - 9.0) / 2.0,
            epsilon = 1e-12
        );
        // independent 2x2 reduction of L on span{1, x}: eigenvalues 1/8 ± 1/(4√3)
        let s3 = 1.0 / (4.0 * 3.0f64.sqrt());
        assert_abs_diff_eq!(r.discretized_l_eigenvalues.0, 0.125 + s3, epsilon = 1e-6);
        assert_abs_diff_eq!(r.discretized_l_eigenvalues.1, 0.125 - s3, epsilon = 1e-6);
    }

    #[test]
    fn hermitian_path_keeps_trace() {
        let f7 = PdFunction::f7(2.0).unwrap();
        let (m, _) = discretize(&f7, 1.0, 64).unwrap();
        assert!(matches!(m, MercerMatrix::Hermitian(_)));
        let ev = eigenvalues_only(&m);
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
        assert!(ev[0] > 0.0);
    }

    #[test]
    fn kernel_reconstruction_improves_with_modes() {
        let (m, grid) = discretize(&PdFunction::f3(), 1.0, 129).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        let f3 = PdFunction::f3();
        let e4 = d.reconstruction_error(&f3, 4).unwrap();
        let e16 = d.reconstruction_error(&f3, 16).unwrap();
        let efull = d.reconstruction_error(&f3, 129).unwrap();
        assert!(e16 < e4);
        assert!(efull < 1e-3, "full-rank reconstruction error {efull}");
    }

    #[test]
    fn energy_onb_for_min_kernel() {
        let grid = GridSpec::midpoint(Interval::new(0.0, 0.5).unwrap(), 2000).unwrap();
        let m = discretize_kernel(&Kernel::MinXY, &grid).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        let r = rkhs_onb_energy(&d, 6).unwrap();
        assert!(r.max_deviation < 1e-3, "deviation {}", r.max_deviation);
    }

    #[test]
    fn spectral_onb_for_f3() {
        let (m, grid) = discretize(&PdFunction::f3(), 1.0, 600).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        let q = QuadratureSpec::default();
        let r = rkhs_onb(&d, &SpectralMeasure::mu3(), 4, &q).unwrap();
        assert!(r.max_deviation < 1e-2, "deviation {}", r.max_deviation);
        assert_abs_diff_eq!(r.gram[0][0], 1.0, epsilon = 1e-3);
        assert!(r.gram[0][1].abs() < 1e-3);
    }

    #[test]
    fn projection_bound_holds() {
        // E-kernel, N = 3
        let grid = GridSpec::midpoint(Interval::new(0.0, 0.5).unwrap(), 256).unwrap();
        let m = discretize_kernel(&Kernel::MinXY, &grid).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        assert!(projection_bound(&d, 3, 1e-10).unwrap().holds);
        // N = 1 reduces to the top eigenvector identity
        assert!(projection_bound(&d, 1, 1e-10).unwrap().holds);
        // Green's kernel case, N = 5
        let grid = GridSpec::midpoint(Interval::new(0.0, 2.0).unwrap(), 256).unwrap();
        let m = discretize_kernel(&Kernel::GreensPolyaF3, &grid).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        assert!(projection_bound(&d, 5, 1e-10).unwrap().holds);
    }

    #[test]
    fn shannon_functions_match_the_operator_route() {
        // f_n = T_F(e^{i2πn·}) for F = e^{-|x|} on (-1, 1), μ = μ3.
        let q = QuadratureSpec::default();
        let xs = [0.0, 0.3, 0.7];
        for n in [0i64, 1, 2] {
            let got = shannon_functions(&SpectralMeasure::mu3(), n, &xs, &q).unwrap();
            for (&x, g) in xs.iter().zip(&got) {
                let tf = integrate_complex(q.rule, 0.0, 1.0, 4096, |y| {
                    Complex64::from_polar((-(x - y).abs()).exp(), 2.0 * PI * n as f64 * y)
                });
                assert_abs_diff_eq!(g.re, tf.re, epsilon = 2e-4);
                assert_abs_diff_eq!(g.im, tf.im, epsilon = 2e-4);
            }
        }
    }

    #[test]
    fn shannon_functions_closed_form_for_f3() {
        // Re f_n(x) = (e^{x-1} + e^{-x} - 2cos(2πnx)) / (1 + (2πn)²) up to
        // the overall sign of the published table (the operator route
        // T_F e_n fixes the sign used here).
        let q = QuadratureSpec::default();
        let xs = [0.0, 0.25, 0.6];
        for n in [0i64, 1, 3] {
            let got = shannon_functions(&SpectralMeasure::mu3(), n, &xs, &q).unwrap();
            for (&x, g) in xs.iter().zip(&got) {
                let denom = 1.0 + (2.0 * PI * n as f64).powi(2);
                let re = -((x - 1.0).exp() + (-x).exp() - 2.0 * (2.0 * PI * n as f64 * x).cos()) / denom;
                assert_abs_diff_eq!(g.re, re, epsilon = 1e-5);
            }
        }
        // boundary values at x = 0: Re f_n(0) = (2 - 1 - e^{-1})/(1+(2πn)²)
        for n in [0i64, 2] {
            let got = shannon_functions(&SpectralMeasure::mu3(), n, &[0.0], &q).unwrap();
            let denom = 1.0 + (2.0 * PI * n as f64).powi(2);
            assert_abs_diff_eq!(got[0].re, (2.0 - 1.0 - (-1.0f64).exp()) / denom, epsilon = 1e-5);
        }
        // δ0 with n = 0: f ≡ Sha(0) = 1
        let got = shannon_functions(&SpectralMeasure::dirac(0.0), 0, &[0.1, 0.9], &q).unwrap();
        for g in got {
            assert_abs_diff_eq!(g.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn membership_passes_for_matching_pairs() {
        let q = QuadratureSpec::default();
        let grid = shannon_default_grid(64);
        // tent/Fejér
        let tent = PdFunction::tent(1.0).unwrap();
        let r = ext_membership_shannon(&tent, &SpectralMeasure::mu2(), &grid, 64, 1e-3, &q).unwrap();
        assert!(r.pass, "sup {}", r.sup_error);
        assert!(r.n_used <= 64);
        // F3/μ3
        let f3 = PdFunction::f3();
        let r = ext_membership_shannon(&f3, &SpectralMeasure::mu3(), &grid, 64, 1e-3, &q).unwrap();
        assert!(r.pass, "sup {}", r.sup_error);
        // mismatch: tent against the Cauchy measure
        let r = ext_membership_shannon(&tent, &SpectralMeasure::mu3(), &grid, 64, 1e-3, &q).unwrap();
        assert!(!r.pass);
        assert!(r.sup_error > 0.1);
    }

    #[test]
    fn sampling_criterion_agrees_with_direct_verification() {
        // For every catalog pair, the rescaled sampling criterion passes,
        // matching the transform-side verification.
        use crate::model::CatalogId;
        let q = QuadratureSpec::default();
        let grid = shannon_default_grid(48);
        for id in CatalogId::ALL {
            let f = if id == CatalogId::F7 {
                PdFunction::f7(2.0).unwrap()
            } else {
                PdFunction::catalog(id)
            };
            let mu = SpectralMeasure::catalog_pair(id, 2.0);
            let direct = crate::bochner::verify_ext(
                &f,
                &mu,
                &crate::bochner::symmetric_grid(f.half_width(), 21),
                1e-3,
                &q,
            )
            .unwrap();
            let (fu, mu_u) = rescale_pair_to_unit(&f, &mu).unwrap();
            let r = ext_membership_shannon(&fu, &mu_u, &grid, 64, 2e-3, &q).unwrap();
            assert_eq!(
                direct.pass,
                r.pass,
                "{}: verify {:.2e} vs sampling {:.2e}",
                id.name(),
                direct.sup_error,
                r.sup_error
            );
            assert!(r.pass, "{} sampling sup {:.2e}", id.name(), r.sup_error);
        }
    }

    #[test]
    fn bessel_frame_bound_for_f3() {
        let (m, grid) = discretize(&PdFunction::f3(), 1.0, 256).unwrap();
        let d = eigensystem(&m, &grid).unwrap();
        // ξ = √λ₁ ξ₁ and a handful of deterministic mixtures in the top-10 space
        let mut sets = vec![vec![d.eigenvalues[0].sqrt()]];
        let mut state = 0x2545f4914f6cdd1du64;
        for _ in 0..100 {
            let mut c = Vec::with_capacity(10);
            for _ in 0..10 {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                c.push(((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5);
            }
            sets.push(c);
        }
        sets.push(vec![0.0; 10]);
        let r = bessel_frame_bound(&d, 40, &sets, 1e-6).unwrap();
        assert!(r.holds, "max ratio {}", r.max_ratio);
        assert!(r.max_ratio <= 1.0 + 1e-6);
    }
}
