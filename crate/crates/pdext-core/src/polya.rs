//! Compactly supported even spline extensions of locally defined p.d.
//! functions, their classification through the Pólya criterion or grid
//! refutation, and the spectral density of an extension.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PdFunction;
use crate::pdcheck::{self, PsdVerdict};
use crate::quad::{integrate, QuadRule};

/// Cap on the support radius relative to the base half-width (knots mode).
const MAX_SUPPORT_FACTOR: f64 = 64.0;

/// An even, compactly supported continuation: the base function on
/// `[0, a)`, straight segments through the knots on `[a, c]`, zero beyond.
#[derive(Clone, Debug, Serialize)]
pub struct SplineExtension {
    #[serde(skip)]
    base: PdFunction,
    /// Knots on the positive axis, `(x, value)` with `x >= a`, ending at
    /// the zero crossing `(c, 0)`.
    pub knots: Vec<(f64, f64)>,
    pub support_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtensionMode {
    /// Continue with the tangent line at `a⁻` down to its zero crossing.
    AutoTangent,
    /// Connect user-supplied knots piecewise-linearly to a final zero knot.
    Knots,
}

impl SplineExtension {
    pub fn base(&self) -> &PdFunction {
        &self.base
    }

    /// Evaluate the extension anywhere on the line.
    pub fn evaluate(&self, x: f64) -> f64 {
        let ax = x.abs();
        let a = self.base.half_width();
        if ax < a {
            return self.base.evaluate(ax).map(|v| v.re).unwrap_or(0.0);
        }
        if ax >= self.support_radius {
            return 0.0;
        }
        // locate the segment containing ax
        let mut prev = self.knots[0];
        for &k in &self.knots[1..] {
            if ax <= k.0 {
                let t = (ax - prev.0) / (k.0 - prev.0);
                return prev.1 * (1.0 - t) + k.1 * t;
            }
            prev = k;
        }
        0.0
    }

    /// Uniform samples of the extension on `[0, c]`.
    pub fn sample_positive_axis(&self, n: usize) -> Vec<f64> {
        let n = n.max(4);
        (0..n)
            .map(|i| self.evaluate(self.support_radius * i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Estimate the one-sided slope of `F` at `a⁻` by a three-point backward
/// difference with step `a/256`.
fn one_sided_slope(f: &PdFunction) -> Result<(f64, f64)> {
    let a = f.half_width();
    let h = a / 256.0;
    let fa = f.evaluate_re(a - 1e-12 * a.max(1.0)).or_else(|_| f.evaluate_re(a))?;
    let f1 = f.evaluate_re(a - h)?;
    let f2 = f.evaluate_re(a - 2.0 * h)?;
    let slope = (3.0 * fa - 4.0 * f1 + f2) / (2.0 * h);
    Ok((fa, slope))
}

/// Build a spline continuation of `F`.
///
/// `AutoTangent` extends along the tangent at the right endpoint to its zero
/// crossing; `Knots` connects `(x, value)` pairs decreasing to zero. The
/// base must be real-valued (even by Hermitian symmetry).
pub fn build_spline_extension(
    f: &PdFunction,
    mode: ExtensionMode,
    knots: Option<&[(f64, f64)]>,
) -> Result<SplineExtension> {
    let a = f.half_width();
    for &x in &[0.25 * a, 0.6 * a, 0.9 * a] {
        if f.evaluate(x)?.im.abs() > 1e-10 {
            return Err(Error::Argument(
                "spline extensions are defined for real even functions only".into(),
            ));
        }
    }
    match mode {
        ExtensionMode::AutoTangent => {
            let (fa, slope) = one_sided_slope(f)?;
            if !(slope < 0.0) {
                return Err(Error::Argument(format!(
                    "auto tangent needs a strictly negative one-sided slope at a⁻, got {slope}"
                )));
            }
            if fa <= 0.0 {
                // the base already reaches zero: degenerate extension
                return Ok(SplineExtension {
                    base: f.clone(),
                    knots: vec![(a, 0.0)],
                    support_radius: a,
                });
            }
            let c = a - fa / slope;
            Ok(SplineExtension {
                base: f.clone(),
                knots: vec![(a, fa), (c, 0.0)],
                support_radius: c,
            })
        }
        ExtensionMode::Knots => {
            let user = knots.ok_or_else(|| Error::Argument("knots mode needs knots".into()))?;
            if user.is_empty() {
                return Err(Error::Argument("knots mode needs at least one knot".into()));
            }
            let fa = f.evaluate_re(a - 1e-12 * a.max(1.0)).or_else(|_| f.evaluate_re(a))?;
            let mut all = Vec::with_capacity(user.len() + 1);
            all.push((a, fa));
            for &(x, v) in user {
                let &(px, pv) = all.last().unwrap();
                if x < px - 1e-12 || v > pv + 1e-12 || v < 0.0 {
                    return Err(Error::Argument(format!(
                        "knots must have nondecreasing x and nonincreasing nonnegative values; \
                         ({x}, {v}) after ({px}, {pv})"
                    )));
                }
                if (x, v) != (px, pv) {
                    all.push((x, v));
                }
            }
            let last = *all.last().unwrap();
            if last.1.abs() > 1e-12 {
                return Err(Error::Argument("knots must decrease to an exact zero value".into()));
            }
            if last.0 > MAX_SUPPORT_FACTOR * a {
                return Err(Error::Argument(format!(
                    "support radius {} exceeds the cap {}",
                    last.0,
                    MAX_SUPPORT_FACTOR * a
                )));
            }
            Ok(SplineExtension { base: f.clone(), knots: all, support_radius: last.0 })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Classification {
    /// Passes the Pólya criterion on `[0, c]`, hence p.d. on the line.
    PolyaPd,
    /// An indefinite Gram matrix was found at these points.
    Refuted { witness: Vec<f64>, min_eigenvalue: f64 },
    Undecided,
}

/// Classify an extension: Pólya certificate first, then refutation search
/// over escalating grids within the point budget.
///
/// The search is deterministic: uniform grids on `[0, c]` of sizes
/// 8, 16, 32, then seeded low-discrepancy grids up to the budget.
pub fn classify_extension(e: &SplineExtension, budget: usize) -> Result<Classification> {
    let samples = e.sample_positive_axis(1025);
    if pdcheck::polya_criterion(&samples)?.pass {
        return Ok(Classification::PolyaPd);
    }
    let table = as_pd_table(e)?;
    let c = e.support_radius;
    let budget = budget.max(8);
    let mut sizes: Vec<usize> = vec![8, 16, 32, 64];
    sizes.retain(|&s| s <= budget);
    // uniform grids
    for &m in &sizes {
        let pts: Vec<f64> = (0..m).map(|i| c * i as f64 / (m - 1) as f64).collect();
        let r = pdcheck::is_pd_grid(&table, &pts)?;
        if r.verdict == PsdVerdict::Indefinite {
            return Ok(Classification::Refuted {
                witness: pts,
                min_eigenvalue: r.min_eigenvalue,
            });
        }
    }
    // golden-ratio low-discrepancy grids (deterministic)
    let phi = 0.618_033_988_749_894_9_f64;
    for &m in &sizes {
        let mut pts: Vec<f64> = (1..=m).map(|i| c * ((i as f64 * phi) % 1.0)).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let r = pdcheck::is_pd_grid(&table, &pts)?;
        if r.verdict == PsdVerdict::Indefinite {
            return Ok(Classification::Refuted {
                witness: pts,
                min_eigenvalue: r.min_eigenvalue,
            });
        }
    }
    Ok(Classification::Undecided)
}

/// Materialize the extension as a sampled `PdFunction` on `(-c', c')` with
/// `c'` slightly past the support, so Gram tests can reach every difference.
fn as_pd_table(e: &SplineExtension) -> Result<PdFunction> {
    let c = e.support_radius * 1.001 + 1e-9;
    PdFunction::from_fn(c, 8193, |x| num_complex::Complex64::new(e.evaluate(x), 0.0))
}

/// Spectral density of the extension,
/// `Φ_ex(λ) = (1/2π) ∫_{-c}^{c} e^{-iλy} F_ex(y) dy = (1/π) ∫_0^c cos(λy) F_ex(y) dy`.
///
/// The base part integrates by composite Simpson with λ-scaled resolution;
/// the straight segments integrate exactly.
pub fn extension_density(e: &SplineExtension, lambdas: &[f64]) -> Result<Vec<f64>> {
    let a = e.base.half_width();
    let base = &e.base;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let npu = (64.0 * (1.0 + lam.abs() / 4.0)).ceil() as usize;
        let n = ((a * npu as f64).ceil() as usize).max(64);
        let mut acc = integrate(QuadRule::Simpson, 0.0, a, n, |y| {
            base.evaluate(y).map(|v| v.re).unwrap_or(0.0) * (lam * y).cos()
        });
        let mut prev = e.knots[0];
        for &k in &e.knots[1..] {
            acc += line_segment_cosine_integral(prev, k, lam);
            prev = k;
        }
        out.push(acc / std::f64::consts::PI);
    }
    Ok(out)
}

/// ∫_{x0}^{x1} (p + q·y) cos(λy) dy for the line through two knots.
fn line_segment_cosine_integral(k0: (f64, f64), k1: (f64, f64), lam: f64) -> f64 {
    let (x0, v0) = k0;
    let (x1, v1) = k1;
    if x1 <= x0 {
        return 0.0;
    }
    let q = (v1 - v0) / (x1 - x0);
    let p = v0 - q * x0;
    if lam.abs() < 1e-8 {
        // ∫ (p + qy) dy with a tiny curvature correction
        let lin = p * (x1 - x0) + 0.5 * q * (x1 * x1 - x0 * x0);
        let cubic = (x1.powi(3) - x0.powi(3)) / 3.0;
        return lin - 0.5 * lam * lam * (p * cubic + 0.25 * q * (x1.powi(4) - x0.powi(4)));
    }
    let anti = |y: f64| -> f64 {
        // ∫ (p + qy) cos(λy) dy = (p + qy) sin(λy)/λ + q cos(λy)/λ²
        (p + q * y) * (lam * y).sin() / lam + q * (lam * y).cos() / (lam * lam)
    };
    anti(x1) - anti(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tangent_extension_of_exponential() {
        let e = build_spline_extension(&PdFunction::f3(), ExtensionMode::AutoTangent, None).unwrap();
        assert_abs_diff_eq!(e.support_radius, 2.0, epsilon = 1e-4);
        // e^{-1} (2 - |x|) on [1, 2)
        for &x in &[1.0f64, 1.5, -1.9] {
            let want = (-1.0f64).exp() * (2.0 - x.abs());
            assert_abs_diff_eq!(e.evaluate(x), want, epsilon = 1e-4);
        }
        assert_eq!(e.evaluate(2.3), 0.0);
        // continuity and evenness
        assert_abs_diff_eq!(e.evaluate(1.0 - 1e-9), e.evaluate(1.0 + 1e-9), epsilon = 1e-8);
        for &x in &[0.3, 1.2, 1.9] {
            assert_abs_diff_eq!(e.evaluate(x), e.evaluate(-x), epsilon = 1e-12);
        }
    }

    #[test]
    fn knot_extension_of_tent() {
        let e = build_spline_extension(
            &PdFunction::f2(),
            ExtensionMode::Knots,
            Some(&[(2.0, 0.0)]),
        )
        .unwrap();
        // (2 - |x|)/3 on [1/2, 2]
        for &x in &[0.5, 1.0, 1.7] {
            assert_abs_diff_eq!(e.evaluate(x), (2.0 - x) / 3.0, epsilon = 1e-9);
        }
        assert_eq!(classify_extension(&e, 64).unwrap(), Classification::PolyaPd);
    }

    #[test]
    fn gaussian_tangent_extension_exists_but_is_rejected() {
        let e = build_spline_extension(&PdFunction::f5(), ExtensionMode::AutoTangent, None).unwrap();
        // tangent at 1: value e^{-1/2}, slope -e^{-1/2}, zero crossing at 2
        assert_abs_diff_eq!(e.support_radius, 2.0, epsilon = 1e-4);
        match classify_extension(&e, 64).unwrap() {
            Classification::Refuted { witness, min_eigenvalue } => {
                assert!(witness.len() <= 64);
                assert!(min_eigenvalue < 0.0);
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn exponential_tangent_extension_is_polya_pd() {
        let e = build_spline_extension(&PdFunction::f3(), ExtensionMode::AutoTangent, None).unwrap();
        assert_eq!(classify_extension(&e, 64).unwrap(), Classification::PolyaPd);
    }

    #[test]
    fn cauchy_tangent_extension_is_refuted() {
        let e = build_spline_extension(&PdFunction::f1(), ExtensionMode::AutoTangent, None).unwrap();
        assert!(matches!(classify_extension(&e, 64).unwrap(), Classification::Refuted { .. }));
    }

    #[test]
    fn extension_density_of_tent_knot_extension() {
        // Spectral density of the F2 knot extension:
        // (3 - 2cos(λ/2) - cos(2λ)) / (3πλ²), and 3/(4π) at λ = 0.
        let e = build_spline_extension(
            &PdFunction::f2(),
            ExtensionMode::Knots,
            Some(&[(2.0, 0.0)]),
        )
        .unwrap();
        let lams = [0.0, 0.5, 1.0, 3.7, 10.0];
        let got = extension_density(&e, &lams).unwrap();
        for (&lam, &g) in lams.iter().zip(&got) {
            let want = if lam == 0.0 {
                3.0 / (4.0 * std::f64::consts::PI)
            } else {
                (3.0 - 2.0 * (lam / 2.0).cos() - (2.0 * lam).cos())
                    / (3.0 * std::f64::consts::PI * lam * lam)
            };
            assert_abs_diff_eq!(g, want, epsilon = 1e-8);
        }
    }

    #[test]
    fn degenerate_tent_extension_gives_fejer_density() {
        // The tent on (-1,1) already reaches zero: Φ = (1/2π)(sin(λ/2)/(λ/2))².
        let tent = PdFunction::tent(1.0).unwrap();
        let e = build_spline_extension(&tent, ExtensionMode::AutoTangent, None).unwrap();
        assert_abs_diff_eq!(e.support_radius, 1.0, epsilon = 1e-9);
        let lams = [0.0, 0.9, 2.2, 6.0];
        let got = extension_density(&e, &lams).unwrap();
        for (&lam, &g) in lams.iter().zip(&got) {
            let s = crate::quad::sinc(0.5 * lam);
            let want = s * s / (2.0 * std::f64::consts::PI);
            assert_abs_diff_eq!(g, want, epsilon = 1e-8);
        }
    }

    #[test]
    fn exponential_extension_density_nonnegative() {
        let e = build_spline_extension(&PdFunction::f3(), ExtensionMode::AutoTangent, None).unwrap();
        let lams: Vec<f64> = (0..251).map(|i| -50.0 + 0.4 * i as f64).collect();
        let phi = extension_density(&e, &lams).unwrap();
        let min = phi.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-9, "min density {min}");
    }

    #[test]
    fn extension_density_round_trips_through_the_transform() {
        // The sampled spectral density of the extension is a measure whose
        // transform reproduces the base function on (-a, a).
        use crate::bochner::{self, QuadratureSpec};
        use crate::model::{Density, DensityKind, SpectralMeasure};
        let e = build_spline_extension(&PdFunction::f3(), ExtensionMode::AutoTangent, None).unwrap();
        let l = 800.0;
        let n = 6401usize;
        let lams: Vec<f64> = (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect();
        let phi = extension_density(&e, &lams).unwrap();
        let mu = SpectralMeasure::new(
            vec![],
            vec![Density { kind: DensityKind::Table { nodes: lams, values: phi }, weight: 1.0 }],
        )
        .unwrap();
        let q = QuadratureSpec { nodes_per_unit: 8, ..QuadratureSpec::default() };
        let grid = bochner::symmetric_grid(1.0, 17);
        let r = bochner::verify_ext(&PdFunction::f3(), &mu, &grid, 1e-2, &q).unwrap();
        assert!(r.pass, "round-trip sup error {}", r.sup_error);
    }

    #[test]
    fn bad_knots_are_rejected() {
        let f2 = PdFunction::f2();
        // not decreasing to zero
        assert!(build_spline_extension(&f2, ExtensionMode::Knots, Some(&[(1.0, 0.4)])).is_err());
        // increasing value
        assert!(
            build_spline_extension(&f2, ExtensionMode::Knots, Some(&[(1.0, 0.9), (2.0, 0.0)]))
                .is_err()
        );
        // beyond the support cap
        assert!(
            build_spline_extension(&f2, ExtensionMode::Knots, Some(&[(100.0, 0.0)])).is_err()
        );
        // auto tangent on a flat function
        let one = PdFunction::constant(1.0).unwrap();
        assert!(build_spline_extension(&one, ExtensionMode::AutoTangent, None).is_err());
    }
}
