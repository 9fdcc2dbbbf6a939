//! Core domain types: intervals, grids, locally defined positive definite
//! functions, two-variable kernels, and spectral measures.
//!
//! A `PdFunction` is the continuous function `F` defined on a symmetric open
//! interval `(-a, a)`; the catalog entries `F1..F7` are the closed-form
//! family used throughout, and sampled tables cover everything else.
//! A `SpectralMeasure` is a finite positive Borel measure on the line,
//! stored as point masses plus density components; its transform
//! `∫ e^{iλx} dμ(λ)` lives in the `bochner` module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// An open interval `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Argument(format!("interval requires lo < hi, got ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    /// `(-a, a)`.
    pub fn symmetric(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Argument(format!("half width must be > 0, got {half_width}")));
        }
        Interval::new(-half_width, half_width)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_symmetric(&self) -> bool {
        (self.lo + self.hi).abs() <= SYMMETRY_TOL * self.length().max(1.0)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.length()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo + SYMMETRY_TOL && other.hi <= self.hi + SYMMETRY_TOL
    }
}

/// Nodes and quadrature weights on an interval.
///
/// The default composite rule is the midpoint rule: weights are all `h` and
/// sum exactly to the interval length.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub interval: Interval,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridSpec {
    pub fn midpoint(interval: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("grid needs at least one node".into()));
        }
        let h = interval.length() / n as f64;
        let nodes = (0..n).map(|i| interval.lo() + (i as f64 + 0.5) * h).collect();
        let weights = vec![h; n];
        Ok(GridSpec { interval, nodes, weights })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        self.interval.length() / self.n() as f64
    }
}

/// The closed-form catalog of locally defined p.d. functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatalogId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl CatalogId {
    pub const ALL: [CatalogId; 7] = [
        CatalogId::F1,
        CatalogId::F2,
        CatalogId::F3,
        CatalogId::F4,
        CatalogId::F5,
        CatalogId::F6,
        CatalogId::F7,
    ];

    /// Default half-width of the defining interval.
    pub fn default_half_width(self) -> f64 {
        match self {
            CatalogId::F1 | CatalogId::F3 | CatalogId::F5 | CatalogId::F7 => 1.0,
            CatalogId::F2 | CatalogId::F4 => 0.5,
            CatalogId::F6 => std::f64::consts::FRAC_PI_4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CatalogId::F1 => "F1",
            CatalogId::F2 => "F2",
            CatalogId::F3 => "F3",
            CatalogId::F4 => "F4",
            CatalogId::F5 => "F5",
            CatalogId::F6 => "F6",
            CatalogId::F7 => "F7",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "F1" => Ok(CatalogId::F1),
            "F2" => Ok(CatalogId::F2),
            "F3" => Ok(CatalogId::F3),
            "F4" => Ok(CatalogId::F4),
            "F5" => Ok(CatalogId::F5),
            "F6" => Ok(CatalogId::F6),
            "F7" => Ok(CatalogId::F7),
            other => Err(Error::Argument(format!("unknown catalog id {other:?}"))),
        }
    }

    fn eval(self, x: f64, p: f64) -> Complex64 {
        match self {
            CatalogId::F1 => Complex64::new(1.0 / (1.0 + x * x), 0.0),
            CatalogId::F2 => Complex64::new(1.0 - x.abs(), 0.0),
            CatalogId::F3 => Complex64::new((-x.abs()).exp(), 0.0),
            CatalogId::F4 => {
                let s = crate::quad::sinc(0.5 * x);
                Complex64::new(s * s, 0.0)
            }
            CatalogId::F5 => Complex64::new((-0.5 * x * x).exp(), 0.0),
            CatalogId::F6 => Complex64::new(x.cos(), 0.0),
            CatalogId::F7 => {
                // (1 - ix)^{-p} = (1+x^2)^{-p/2} e^{i p atan(x)}
                let r = (1.0 + x * x).powf(-0.5 * p);
                let th = p * x.atan();
                Complex64::new(r * th.cos(), r * th.sin())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum PdBody {
    Catalog { id: CatalogId, p: Option<f64> },
    Sampled { nodes: Vec<f64>, values: Vec<Complex64> },
    Constant,
    Product(Box<PdFunction>, Box<PdFunction>),
    Conjugate(Box<PdFunction>),
    RealPart(Box<PdFunction>),
    Scaled { inner: Box<PdFunction>, factor: f64 },
}

/// A continuous positive definite function on a symmetric open interval.
#[derive(Clone, Debug)]
pub struct PdFunction {
    domain: Interval,
    body: PdBody,
    normalized: bool,
}

impl PdFunction {
    pub fn catalog(id: CatalogId) -> Self {
        PdFunction {
            domain: Interval::symmetric(id.default_half_width()).unwrap(),
            body: PdBody::Catalog { id, p: None },
            normalized: true,
        }
    }

    /// Catalog entry on a non-default interval `(-a, a)`.
    pub fn catalog_on(id: CatalogId, half_width: f64) -> Result<Self> {
        Ok(PdFunction {
            domain: Interval::symmetric(half_width)?,
            body: PdBody::Catalog { id, p: None },
            normalized: true,
        })
    }

    pub fn f1() -> Self {
        Self::catalog(CatalogId::F1)
    }

    pub fn f2() -> Self {
        Self::catalog(CatalogId::F2)
    }

    pub fn f3() -> Self {
        Self::catalog(CatalogId::F3)
    }

    pub fn f4() -> Self {
        Self::catalog(CatalogId::F4)
    }

    pub fn f5() -> Self {
        Self::catalog(CatalogId::F5)
    }

    pub fn f6() -> Self {
        Self::catalog(CatalogId::F6)
    }

    pub fn f7(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Argument(format!("F7 requires p > 0, got {p}")));
        }
        Ok(PdFunction {
            domain: Interval::symmetric(1.0).unwrap(),
            body: PdBody::Catalog { id: CatalogId::F7, p: Some(p) },
            normalized: true,
        })
    }

    /// The tent `1 - |x|` on `(-a, a)` (the F2 form on a chosen interval).
    pub fn tent(half_width: f64) -> Result<Self> {
        Self::catalog_on(CatalogId::F2, half_width)
    }

    /// `F ≡ 1` on `(-a, a)`.
    pub fn constant(half_width: f64) -> Result<Self> {
        Ok(PdFunction {
            domain: Interval::symmetric(half_width)?,
            body: PdBody::Constant,
            normalized: true,
        })
    }

    /// A sampled table with linear interpolation, normalized so F(0) = 1.
    pub fn from_samples(nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        Self::from_samples_impl(nodes, values, true)
    }

    /// As [`from_samples`] but keeping the raw values (opting out of the
    /// F(0) = 1 normalization).
    pub fn from_samples_unnormalized(nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        Self::from_samples_impl(nodes, values, false)
    }

    fn from_samples_impl(nodes: Vec<f64>, mut values: Vec<Complex64>, normalize: bool) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::Data(format!(
                "sampled table needs matching nodes/values with >= 2 entries, got {}/{}",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Data("sampled nodes must be strictly increasing".into()));
        }
        let (first, last) = (nodes[0], *nodes.last().unwrap());
        if (first + last).abs() > 1e-9 * (last - first).max(1.0) {
            return Err(Error::Data(format!(
                "sampled table must cover a symmetric range, got [{first}, {last}]"
            )));
        }
        let mut normalized = false;
        if normalize {
            let f0 = interp_table(&nodes, &values, 0.0);
            if f0.im.abs() > 1e-9 || !(f0.re > 0.0) {
                return Err(Error::Data(format!("F(0) must be real and positive, got {f0}")));
            }
            let scale = 1.0 / f0.re;
            for v in &mut values {
                *v *= scale;
            }
            normalized = true;
        }
        Ok(PdFunction {
            domain: Interval::new(first, last)?,
            body: PdBody::Sampled { nodes, values },
            normalized,
        })
    }

    /// Sample an arbitrary evaluation map into a table on `(-a, a)`.
    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let n = n.max(3) | 1; // odd, so 0 is a node
        let nodes: Vec<f64> = (0..n)
            .map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
            .collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::from_samples_unnormalized(nodes, values)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn body(&self) -> &PdBody {
        &self.body
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn half_width(&self) -> f64 {
        self.domain.half_width()
    }

    /// True when the body is a closed-form expression that extends beyond
    /// the nominal domain (catalog entries and their combinations).
    pub fn is_closed_form(&self) -> bool {
        match &self.body {
            PdBody::Catalog { .. } | PdBody::Constant => true,
            PdBody::Sampled { .. } => false,
            PdBody::Product(a, b) => a.is_closed_form() && b.is_closed_form(),
            PdBody::Conjugate(inner) | PdBody::RealPart(inner) | PdBody::Scaled { inner, .. } => {
                inner.is_closed_form()
            }
        }
    }

    /// Evaluate `F(x)`.
    ///
    /// Closed-form bodies evaluate anywhere; sampled tables reject points
    /// outside their tabulated range.
    pub fn evaluate(&self, x: f64) -> Result<Complex64> {
        match &self.body {
            PdBody::Catalog { id, p } => Ok(id.eval(x, p.unwrap_or(1.0))),
            PdBody::Constant => Ok(Complex64::ONE),
            PdBody::Sampled { nodes, values } => {
                let (first, last) = (nodes[0], *nodes.last().unwrap());
                if x < first - 1e-12 || x > last + 1e-12 {
                    return Err(Error::Domain(format!(
                        "x = {x} outside sampled range [{first}, {last}]"
                    )));
                }
                Ok(interp_table(nodes, values, x.clamp(first, last)))
            }
            PdBody::Product(a, b) => Ok(a.evaluate(x)? * b.evaluate(x)?),
            PdBody::Conjugate(inner) => Ok(inner.evaluate(x)?.conj()),
            PdBody::RealPart(inner) => Ok(Complex64::new(inner.evaluate(x)?.re, 0.0)),
            PdBody::Scaled { inner, factor } => Ok(inner.evaluate(x)? * factor),
        }
    }

    /// Convenience: real part of `evaluate`.
    pub fn evaluate_re(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(x)?.re)
    }

    /// Restriction to a smaller symmetric interval.
    pub fn restrict(&self, sub: Interval) -> Result<PdFunction> {
        if !sub.is_symmetric() {
            return Err(Error::Argument(format!(
                "restriction interval must be symmetric, got ({}, {})",
                sub.lo(),
                sub.hi()
            )));
        }
        if !self.domain.contains_interval(&sub) {
            return Err(Error::Argument(format!(
                "restriction ({}, {}) not contained in domain ({}, {})",
                sub.lo(),
                sub.hi(),
                self.domain.lo(),
                self.domain.hi()
            )));
        }
        Ok(PdFunction { domain: sub, body: self.body.clone(), normalized: self.normalized })
    }

    /// Split into the even real part `K` (again p.d.) and the odd imaginary
    /// part `L`, with `F = K + iL` pointwise.
    pub fn split_real_imag(&self) -> (PdFunction, ImagPart) {
        let k = PdFunction {
            domain: self.domain,
            body: PdBody::RealPart(Box::new(self.clone())),
            normalized: self.normalized,
        };
        (k, ImagPart { inner: self.clone() })
    }

    /// Pointwise product on the intersection of the domains.
    pub fn product(&self, other: &PdFunction) -> Result<PdFunction> {
        let hw = self.half_width().min(other.half_width());
        if !(hw > 0.0) {
            return Err(Error::Argument("domains do not intersect".into()));
        }
        Ok(PdFunction {
            domain: Interval::symmetric(hw)?,
            body: PdBody::Product(Box::new(self.clone()), Box::new(other.clone())),
            normalized: self.normalized && other.normalized,
        })
    }

    /// `F̄(x) = F(-x) = conj(F(x))`; p.d. whenever `F` is.
    pub fn conjugate_reflect(&self) -> PdFunction {
        PdFunction {
            domain: self.domain,
            body: PdBody::Conjugate(Box::new(self.clone())),
            normalized: self.normalized,
        }
    }

    /// JSON in the external schema; derived bodies are materialized as a
    /// sampled table over their domain.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&PdFunctionSpec::from_function(self)).expect("serializable spec")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PdFunctionSpec =
            serde_json::from_str(text).map_err(|e| Error::Data(format!("bad function JSON: {e}")))?;
        spec.into_function()
    }
}

/// The odd imaginary part produced by [`PdFunction::split_real_imag`].
#[derive(Clone, Debug)]
pub struct ImagPart {
    inner: PdFunction,
}

impl ImagPart {
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        Ok(self.inner.evaluate(x)?.im)
    }
}

fn interp_table(nodes: &[f64], values: &[Complex64], x: f64) -> Complex64 {
    match nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
        Ok(i) => values[i],
        Err(i) => {
            if i == 0 {
                values[0]
            } else if i == nodes.len() {
                values[nodes.len() - 1]
            } else {
                let t = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
                values[i - 1] * (1.0 - t) + values[i] * t
            }
        }
    }
}

/// External JSON schema for functions.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PdFunctionSpec {
    Catalog {
        id: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
    },
    Sampled {
        nodes: Vec<f64>,
        re: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        im: Option<Vec<f64>>,
    },
}

impl PdFunctionSpec {
    fn from_function(f: &PdFunction) -> Self {
        match &f.body {
            PdBody::Catalog { id, p } => PdFunctionSpec::Catalog {
                id: id.name().to_string(),
                a: Some(f.domain.half_width()),
                p: *p,
            },
            PdBody::Sampled { nodes, values } => PdFunctionSpec::Sampled {
                nodes: nodes.clone(),
                re: values.iter().map(|v| v.re).collect(),
                im: if values.iter().any(|v| v.im != 0.0) {
                    Some(values.iter().map(|v| v.im).collect())
                } else {
                    None
                },
            },
            _ => {
                // Materialize derived bodies on a fixed grid.
                let a = f.domain.half_width();
                let n = 513usize;
                let nodes: Vec<f64> =
                    (0..n).map(|i| -a + 2.0 * a * i as f64 / (n - 1) as f64).collect();
                let values: Vec<Complex64> =
                    nodes.iter().map(|&x| f.evaluate(x).unwrap_or(Complex64::ZERO)).collect();
                PdFunctionSpec::Sampled {
                    nodes,
                    re: values.iter().map(|v| v.re).collect(),
                    im: if values.iter().any(|v| v.im != 0.0) {
                        Some(values.iter().map(|v| v.im).collect())
                    } else {
                        None
                    },
                }
            }
        }
    }

    fn into_function(self) -> Result<PdFunction> {
        match self {
            PdFunctionSpec::Catalog { id, a, p } => {
                let id = CatalogId::parse(&id)?;
                let mut f = match (id, p) {
                    (CatalogId::F7, Some(p)) => PdFunction::f7(p)?,
                    (CatalogId::F7, None) => PdFunction::f7(1.0)?,
                    (_, _) => PdFunction::catalog(id),
                };
                if let Some(a) = a {
                    f = PdFunction { domain: Interval::symmetric(a)?, ..f };
                }
                Ok(f)
            }
            PdFunctionSpec::Sampled { nodes, re, im } => {
                let im = im.unwrap_or_else(|| vec![0.0; re.len()]);
                if re.len() != im.len() {
                    return Err(Error::Data("re/im length mismatch".into()));
                }
                let values = re
                    .iter()
                    .zip(im.iter())
                    .map(|(&r, &i)| Complex64::new(r, i))
                    .collect();
                PdFunction::from_samples_unnormalized(nodes, values)
            }
        }
    }
}

/// Two-variable Hermitian kernels.
#[derive(Clone, Debug)]
pub enum Kernel {
    /// `min(x, y)`, Brownian-motion covariance on the half line.
    MinXY,
    /// `e^{-(x+y)}`, rank one on the half line.
    ExpNegSum,
    /// `1/(1 - xy)` on `(-1, 1)`.
    GeometricSeries,
    /// Dirichlet Green's kernel of `(I - d²/dx²)/2` on `(0, 2)`:
    /// `2 sinh(x∧y) sinh(2 - x∨y) / sinh 2`.
    GreensPolyaF3,
    /// `L(x, y) = 1 - x - y`, the rank-two remainder in the F2 split.
    OneMinusSum,
    /// `K(x, y) = F(x - y)`.
    FromPd(Box<PdFunction>),
}

impl Kernel {
    pub fn evaluate(&self, x: f64, y: f64) -> Result<Complex64> {
        match self {
            Kernel::MinXY => Ok(Complex64::new(x.min(y), 0.0)),
            Kernel::ExpNegSum => Ok(Complex64::new((-(x + y)).exp(), 0.0)),
            Kernel::GeometricSeries => {
                let d = 1.0 - x * y;
                if d <= 0.0 {
                    return Err(Error::Domain(format!("1/(1-xy) undefined at ({x}, {y})")));
                }
                Ok(Complex64::new(1.0 / d, 0.0))
            }
            Kernel::GreensPolyaF3 => {
                let (lo, hi) = (x.min(y), x.max(y));
                let s2 = (2.0f64).sinh();
                Ok(Complex64::new(2.0 * lo.sinh() * (2.0 - hi).sinh() / s2, 0.0))
            }
            Kernel::OneMinusSum => Ok(Complex64::new(1.0 - x - y, 0.0)),
            Kernel::FromPd(f) => f.evaluate(x - y),
        }
    }
}

/// Tail behavior of a density; drives truncation radii and analytic
/// corrections of improper integrals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum TailDecay {
    Exponential { rate: f64, amplitude: f64 },
    Gaussian { amplitude: f64 },
    /// `ρ(λ) ≈ c/λ²` for large `|λ|` (possibly oscillating below that bound).
    RationalOrderTwo { amplitude: f64 },
    Compact { radius: f64 },
}

/// Density components of a spectral measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum DensityKind {
    /// μ1: `½ e^{-|λ|}`.
    HalfExponential,
    /// μ2: `(1/2π) (sin(λ/2)/(λ/2))²`.
    Fejer,
    /// μ3: `1/(π(1+λ²))`.
    Cauchy,
    /// μ4: `(1-|λ|)_+` on `(-1, 1)`.
    Tent,
    /// μ5: standard Gaussian.
    StdGauss,
    /// μ7: `λ^{p-1} e^{-λ} / Γ(p)` on `λ ≥ 0`.
    Gamma { p: f64 },
    /// Tabulated density with linear interpolation, compact support.
    Table { nodes: Vec<f64>, values: Vec<f64> },
    /// Pushforward of `base` under `λ ↦ λ/scale`: `ρ(λ) = scale·base(scale·λ)`.
    Scaled { base: Box<DensityKind>, scale: f64 },
    /// `ρ(λ) = base(λ - shift)`.
    Shifted { base: Box<DensityKind>, shift: f64 },
    /// `ρ(λ) = base(-λ)`.
    Reflected { base: Box<DensityKind> },
}

impl DensityKind {
    pub fn value(&self, lambda: f64) -> f64 {
        match self {
            DensityKind::HalfExponential => 0.5 * (-lambda.abs()).exp(),
            DensityKind::Fejer => {
                let s = crate::quad::sinc(0.5 * lambda);
                s * s / (2.0 * std::f64::consts::PI)
            }
            DensityKind::Cauchy => 1.0 / (std::f64::consts::PI * (1.0 + lambda * lambda)),
            DensityKind::Tent => (1.0 - lambda.abs()).max(0.0),
            DensityKind::StdGauss => {
                (-0.5 * lambda * lambda).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
            DensityKind::Gamma { p } => {
                if lambda <= 0.0 {
                    0.0
                } else {
                    lambda.powf(p - 1.0) * (-lambda).exp() / libm::tgamma(*p)
                }
            }
            DensityKind::Table { nodes, values } => {
                if nodes.is_empty() || lambda < nodes[0] || lambda > *nodes.last().unwrap() {
                    return 0.0;
                }
                match nodes.binary_search_by(|n| n.partial_cmp(&lambda).unwrap()) {
                    Ok(i) => values[i],
                    Err(i) => {
                        if i == 0 || i == nodes.len() {
                            0.0
                        } else {
                            let t = (lambda - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
                            values[i - 1] * (1.0 - t) + values[i] * t
                        }
                    }
                }
            }
            DensityKind::Scaled { base, scale } => scale * base.value(scale * lambda),
            DensityKind::Shifted { base, shift } => base.value(lambda - shift),
            DensityKind::Reflected { base } => base.value(-lambda),
        }
    }

    pub fn tail(&self) -> TailDecay {
        match self {
            DensityKind::HalfExponential => TailDecay::Exponential { rate: 1.0, amplitude: 0.5 },
            DensityKind::Fejer => {
                TailDecay::RationalOrderTwo { amplitude: 2.0 / std::f64::consts::PI }
            }
            DensityKind::Cauchy => {
                TailDecay::RationalOrderTwo { amplitude: 1.0 / std::f64::consts::PI }
            }
            DensityKind::Tent => TailDecay::Compact { radius: 1.0 },
            DensityKind::StdGauss => TailDecay::Gaussian { amplitude: 0.4 },
            DensityKind::Gamma { p } => {
                // λ^{p-1} e^{-λ} ≤ amplitude · e^{-λ/2} for λ ≥ radius-ish bound
                TailDecay::Exponential { rate: 0.5, amplitude: gamma_tail_amplitude(*p) }
            }
            DensityKind::Table { nodes, .. } => TailDecay::Compact {
                radius: nodes.iter().fold(0.0f64, |m, &x| m.max(x.abs())),
            },
            DensityKind::Scaled { base, scale } => match base.tail() {
                TailDecay::Exponential { rate, amplitude } => {
                    TailDecay::Exponential { rate: rate * scale, amplitude: amplitude * scale }
                }
                TailDecay::Gaussian { amplitude } => {
                    // conservative: treat as exponential with the scaled rate
                    TailDecay::Exponential { rate: *scale, amplitude: amplitude * scale }
                }
                TailDecay::RationalOrderTwo { amplitude } => {
                    TailDecay::RationalOrderTwo { amplitude: amplitude / scale }
                }
                TailDecay::Compact { radius } => TailDecay::Compact { radius: radius / scale },
            },
            DensityKind::Shifted { base, shift } => match base.tail() {
                TailDecay::Compact { radius } => {
                    TailDecay::Compact { radius: radius + shift.abs() }
                }
                other => other,
            },
            DensityKind::Reflected { base } => base.tail(),
        }
    }

    /// Truncation radius making the raw tail bound at most `tol`.
    pub fn default_radius(&self, tol: f64) -> f64 {
        match self.tail() {
            TailDecay::Exponential { rate, amplitude } => {
                let r = (2.0 * amplitude / (rate * tol).max(1e-300)).ln() / rate;
                r.max(8.0)
            }
            TailDecay::Gaussian { .. } => 10.0,
            // Analytic corrections handle the slow tail; see `tail_transform`.
            TailDecay::RationalOrderTwo { .. } => 200.0,
            TailDecay::Compact { radius } => radius.max(1e-6),
        }
    }

    /// Analytic value of `∫_{|λ|>R} e^{iλx} ρ(λ) dλ` for the slow-tailed
    /// catalog densities; zero for tails that are already negligible at the
    /// default radius.
    pub fn tail_transform(&self, radius: f64, x: f64) -> Complex64 {
        use crate::quad::cosine_tail_over_lambda_sq as jtail;
        match self {
            // 1/(π(1+λ²)) ≈ 1/(πλ²) beyond R: 2∫_R^∞ cos(xλ)/(πλ²) dλ
            DensityKind::Cauchy => {
                let v = 2.0 / std::f64::consts::PI * jtail(radius, x.abs());
                Complex64::new(v, 0.0)
            }
            // (1/2π)(sin(λ/2)/(λ/2))² = (1 - cos λ)/(π λ²)
            DensityKind::Fejer => {
                let pi = std::f64::consts::PI;
                let b = x.abs();
                let v = (2.0 / pi)
                    * (jtail(radius, b) - 0.5 * (jtail(radius, b + 1.0) + jtail(radius, (b - 1.0).abs())));
                Complex64::new(v, 0.0)
            }
            DensityKind::Scaled { base, scale } => {
                // ∫_{|λ|>R} e^{iλx} scale·base(scale λ) dλ = ∫_{|u|>scale·R} e^{iux/scale} base(u) du
                base.tail_transform(scale * radius, x / scale)
            }
            DensityKind::Reflected { base } => base.tail_transform(radius, -x).conj(),
            _ => Complex64::ZERO,
        }
    }

    /// Total mass of the component.
    pub fn mass(&self) -> f64 {
        match self {
            DensityKind::HalfExponential
            | DensityKind::Fejer
            | DensityKind::Cauchy
            | DensityKind::Tent
            | DensityKind::StdGauss
            | DensityKind::Gamma { .. } => 1.0,
            DensityKind::Table { nodes, values } => {
                if nodes.len() < 2 {
                    return 0.0;
                }
                let mut acc = 0.0;
                for i in 1..nodes.len() {
                    acc += 0.5 * (values[i] + values[i - 1]) * (nodes[i] - nodes[i - 1]);
                }
                acc
            }
            DensityKind::Scaled { base, .. }
            | DensityKind::Shifted { base, .. }
            | DensityKind::Reflected { base } => base.mass(),
        }
    }
}

fn gamma_tail_amplitude(p: f64) -> f64 {
    // max_λ λ^{p-1} e^{-λ/2} = ((2(p-1))/e)^{p-1} for p > 1, else 1
    if p > 1.0 {
        let m = 2.0 * (p - 1.0);
        (m / std::f64::consts::E).powf(p - 1.0).max(1.0)
    } else {
        1.0
    }
}

/// A weighted density component.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Density {
    pub kind: DensityKind,
    pub weight: f64,
}

/// A point mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// A finite positive Borel measure: atoms plus density components.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
    densities: Vec<Density>,
    total_mass: f64,
}

impl SpectralMeasure {
    pub fn new(atoms: Vec<Atom>, densities: Vec<Density>) -> Result<Self> {
        for a in &atoms {
            if !(a.weight > 0.0) || !a.location.is_finite() {
                return Err(Error::Data(format!(
                    "atom weights must be positive and finite, got {a:?}"
                )));
            }
        }
        for d in &densities {
            if !(d.weight > 0.0) {
                return Err(Error::Data(format!("density weight must be positive, got {}", d.weight)));
            }
        }
        let total_mass = atoms.iter().map(|a| a.weight).sum::<f64>()
            + densities.iter().map(|d| d.weight * d.kind.mass()).sum::<f64>();
        if !total_mass.is_finite() {
            return Err(Error::Data("measure has non-finite mass".into()));
        }
        Ok(SpectralMeasure { atoms, densities, total_mass })
    }

    pub fn dirac(location: f64) -> Self {
        SpectralMeasure::new(vec![Atom { location, weight: 1.0 }], vec![]).unwrap()
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        SpectralMeasure::new(
            atoms.into_iter().map(|(location, weight)| Atom { location, weight }).collect(),
            vec![],
        )
    }

    pub fn from_density(kind: DensityKind) -> Self {
        SpectralMeasure::new(vec![], vec![Density { kind, weight: 1.0 }]).unwrap()
    }

    /// μ1 = ½ e^{-|λ|} dλ (extends F1).
    pub fn mu1() -> Self {
        Self::from_density(DensityKind::HalfExponential)
    }

    /// μ2 = (1/2π)(sin(λ/2)/(λ/2))² dλ (extends F2).
    pub fn mu2() -> Self {
        Self::from_density(DensityKind::Fejer)
    }

    /// μ3 = dλ/(π(1+λ²)) (extends F3).
    pub fn mu3() -> Self {
        Self::from_density(DensityKind::Cauchy)
    }

    /// μ4 = (1-|λ|)_+ dλ (extends F4).
    pub fn mu4() -> Self {
        Self::from_density(DensityKind::Tent)
    }

    /// μ5 = standard Gaussian (extends F5).
    pub fn mu5() -> Self {
        Self::from_density(DensityKind::StdGauss)
    }

    /// μ6 = ½(δ₁ + δ₋₁) (extends F6).
    pub fn mu6() -> Self {
        Self::from_atoms(vec![(1.0, 0.5), (-1.0, 0.5)]).unwrap()
    }

    /// μ7 = Gamma(p) (extends F7 with the same p).
    pub fn mu7(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Argument(format!("Gamma requires p > 0, got {p}")));
        }
        Ok(Self::from_density(DensityKind::Gamma { p }))
    }

    /// The extending measure paired with a catalog entry.
    pub fn catalog_pair(id: CatalogId, p: f64) -> Self {
        match id {
            CatalogId::F1 => Self::mu1(),
            CatalogId::F2 => Self::mu2(),
            CatalogId::F3 => Self::mu3(),
            CatalogId::F4 => Self::mu4(),
            CatalogId::F5 => Self::mu5(),
            CatalogId::F6 => Self::mu6(),
            CatalogId::F7 => Self::mu7(p).unwrap(),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn densities(&self) -> &[Density] {
        &self.densities
    }

    pub fn mass(&self) -> f64 {
        self.total_mass
    }

    /// Pushforward under `λ ↦ λ/(2π)`, converting `∫e^{iλx}dμ` into
    /// `∫e^{i2πλx}dν` with the same values.
    pub fn rescale_to_2pi(&self) -> SpectralMeasure {
        let tau = 2.0 * std::f64::consts::PI;
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { location: a.location / tau, weight: a.weight })
            .collect();
        let densities = self
            .densities
            .iter()
            .map(|d| Density {
                kind: DensityKind::Scaled { base: Box::new(d.kind.clone()), scale: tau },
                weight: d.weight,
            })
            .collect();
        SpectralMeasure::new(atoms, densities).expect("rescaling preserves validity")
    }

    /// The reflected measure `μ^s(E) = μ(-E)`; transforms to `conj(μ̂)`.
    pub fn reflected(&self) -> SpectralMeasure {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { location: -a.location, weight: a.weight })
            .collect();
        let densities = self
            .densities
            .iter()
            .map(|d| Density {
                kind: DensityKind::Reflected { base: Box::new(d.kind.clone()) },
                weight: d.weight,
            })
            .collect();
        SpectralMeasure::new(atoms, densities).expect("reflection preserves validity")
    }

    /// Sum of density values at a point (without atoms).
    pub fn density_value(&self, lambda: f64) -> f64 {
        self.densities.iter().map(|d| d.weight * d.kind.value(lambda)).sum()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Spec {
            atoms: Vec<[f64; 2]>,
            densities: Vec<DensitySpec>,
        }
        serde_json::to_string(&Spec {
            atoms: self.atoms.iter().map(|a| [a.location, a.weight]).collect(),
            densities: self.densities.iter().map(DensitySpec::from_density).collect(),
        })
        .expect("serializable measure")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Spec {
            #[serde(default)]
            atoms: Vec<[f64; 2]>,
            #[serde(default)]
            densities: Vec<DensitySpec>,
        }
        let spec: Spec =
            serde_json::from_str(text).map_err(|e| Error::Data(format!("bad measure JSON: {e}")))?;
        SpectralMeasure::new(
            spec.atoms.iter().map(|&[l, w]| Atom { location: l, weight: w }).collect(),
            spec.densities
                .into_iter()
                .map(DensitySpec::into_density)
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// External JSON schema for a density component:
/// `{"id": "cauchy" | "fejer" | "gauss" | "half_exp" | "tent" | "gamma" |
///   "table", ...}` with optional `p` (gamma), `nodes`/`values` (table),
/// `weight`, `scale` (pushforward λ ↦ λ/scale), `shift`, and `reflect`.
#[derive(Serialize, Deserialize)]
struct DensitySpec {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reflect: Option<bool>,
}

impl DensitySpec {
    fn from_density(d: &Density) -> Self {
        let mut spec = DensitySpec {
            id: String::new(),
            p: None,
            nodes: None,
            values: None,
            weight: if d.weight == 1.0 { None } else { Some(d.weight) },
            scale: None,
            shift: None,
            reflect: None,
        };
        fn unwrap(kind: &DensityKind, spec: &mut DensitySpec) {
            match kind {
                DensityKind::HalfExponential => spec.id = "half_exp".into(),
                DensityKind::Fejer => spec.id = "fejer".into(),
                DensityKind::Cauchy => spec.id = "cauchy".into(),
                DensityKind::Tent => spec.id = "tent".into(),
                DensityKind::StdGauss => spec.id = "gauss".into(),
                DensityKind::Gamma { p } => {
                    spec.id = "gamma".into();
                    spec.p = Some(*p);
                }
                DensityKind::Table { nodes, values } => {
                    spec.id = "table".into();
                    spec.nodes = Some(nodes.clone());
                    spec.values = Some(values.clone());
                }
                DensityKind::Scaled { base, scale } => {
                    spec.scale = Some(spec.scale.unwrap_or(1.0) * scale);
                    unwrap(base, spec);
                }
                DensityKind::Shifted { base, shift } => {
                    spec.shift = Some(spec.shift.unwrap_or(0.0) + shift);
                    unwrap(base, spec);
                }
                DensityKind::Reflected { base } => {
                    spec.reflect = Some(!spec.reflect.unwrap_or(false));
                    unwrap(base, spec);
                }
            }
        }
        unwrap(&d.kind, &mut spec);
        spec
    }

    fn into_density(self) -> Result<Density> {
        let mut kind = match self.id.as_str() {
            "half_exp" => DensityKind::HalfExponential,
            "fejer" => DensityKind::Fejer,
            "cauchy" => DensityKind::Cauchy,
            "tent" => DensityKind::Tent,
            "gauss" => DensityKind::StdGauss,
            "gamma" => DensityKind::Gamma {
                p: self.p.ok_or_else(|| Error::Data("gamma density needs p".into()))?,
            },
            "table" => {
                let nodes = self.nodes.ok_or_else(|| Error::Data("table needs nodes".into()))?;
                let values =
                    self.values.ok_or_else(|| Error::Data("table needs values".into()))?;
                if nodes.len() != values.len() || nodes.len() < 2 {
                    return Err(Error::Data("table nodes/values must match with >= 2 entries".into()));
                }
                DensityKind::Table { nodes, values }
            }
            other => return Err(Error::Data(format!("unknown density id {other:?}"))),
        };
        if self.reflect.unwrap_or(false) {
            kind = DensityKind::Reflected { base: Box::new(kind) };
        }
        if let Some(shift) = self.shift {
            if shift != 0.0 {
                kind = DensityKind::Shifted { base: Box::new(kind), shift };
            }
        }
        if let Some(scale) = self.scale {
            if scale != 1.0 {
                if !(scale > 0.0) {
                    return Err(Error::Data(format!("scale must be positive, got {scale}")));
                }
                kind = DensityKind::Scaled { base: Box::new(kind), scale };
            }
        }
        Ok(Density { kind, weight: self.weight.unwrap_or(1.0) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn catalog_evaluation_matches_closed_forms() {
        // F3(0.5) = e^{-0.5}
        let f3 = PdFunction::f3();
        assert_abs_diff_eq!(f3.evaluate(0.5).unwrap().re, (-0.5f64).exp(), epsilon = 1e-15);
        // F(0) = 1 for every catalog entry
        for id in CatalogId::ALL {
            let f = if id == CatalogId::F7 { PdFunction::f7(2.0).unwrap() } else { PdFunction::catalog(id) };
            let v = f.evaluate(0.0).unwrap();
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        }
        // F2 with a = 1/2 at -1/4
        let f2 = PdFunction::f2();
        assert_abs_diff_eq!(f2.evaluate(-0.25).unwrap().re, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn f7_splits_into_cauchy_parts() {
        let f7 = PdFunction::f7(1.0).unwrap();
        let (k, l) = f7.split_real_imag();
        for &x in &[0.0, 0.3, -0.8] {
            assert_abs_diff_eq!(k.evaluate(x).unwrap().re, 1.0 / (1.0 + x * x), epsilon = 1e-14);
            assert_abs_diff_eq!(l.evaluate(x).unwrap(), x / (1.0 + x * x), epsilon = 1e-14);
        }
    }

    #[test]
    fn split_recombines_pointwise() {
        let f = PdFunction::from_fn(1.0, 257, |x| {
            Complex64::new(0.5 * ((-x).cos() + (2.0 * x).cos()), 0.5 * ((2.0 * x).sin() - x.sin()))
        })
        .unwrap();
        let (k, l) = f.split_real_imag();
        for &x in &[-0.9, -0.2, 0.0, 0.4, 0.77] {
            let v = f.evaluate(x).unwrap();
            let kr = k.evaluate(x).unwrap().re;
            let li = l.evaluate(x).unwrap();
            assert_abs_diff_eq!(kr, v.re, epsilon = 1e-12);
            assert_abs_diff_eq!(li, v.im, epsilon = 1e-12);
            // K even, L odd
            assert_abs_diff_eq!(kr, k.evaluate(-x).unwrap().re, epsilon = 1e-12);
            assert_abs_diff_eq!(li, -l.evaluate(-x).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn restriction_keeps_values() {
        let f3 = PdFunction::catalog_on(CatalogId::F3, 2.0).unwrap();
        let sub = Interval::symmetric(1.0).unwrap();
        let r = f3.restrict(sub).unwrap();
        assert_abs_diff_eq!(r.evaluate(0.3).unwrap().re, (-0.3f64).exp(), epsilon = 1e-15);
        assert_eq!(r.domain().half_width(), 1.0);

        // sampled restriction
        let table = PdFunction::from_fn(2.0, 513, |x| Complex64::new((-x.abs()).exp(), 0.0)).unwrap();
        let rs = table.restrict(sub).unwrap();
        assert_abs_diff_eq!(rs.evaluate(0.3).unwrap().re, (-0.3f64).exp(), epsilon = 1e-5);

        // non-symmetric restriction rejected
        assert!(f3.restrict(Interval::new(-0.5, 1.0).unwrap()).is_err());
        // restriction larger than the domain rejected
        let small = PdFunction::f2();
        assert!(small.restrict(Interval::symmetric(0.75).unwrap()).is_err());
    }

    #[test]
    fn conjugate_reflect_examples() {
        let f3 = PdFunction::f3();
        let r = f3.conjugate_reflect();
        assert_abs_diff_eq!(r.evaluate(0.4).unwrap().re, f3.evaluate(0.4).unwrap().re, epsilon = 1e-15);

        let f7 = PdFunction::f7(1.0).unwrap();
        let r7 = f7.conjugate_reflect();
        for &x in &[0.2, -0.5] {
            let want = f7.evaluate(-x).unwrap();
            let got = r7.evaluate(x).unwrap();
            assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-14);
            assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn out_of_range_sampled_evaluation_is_domain_error() {
        let t = PdFunction::from_fn(1.0, 65, |x| Complex64::new(1.0 - x.abs(), 0.0)).unwrap();
        assert!(matches!(t.evaluate(1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn measure_masses() {
        assert_abs_diff_eq!(SpectralMeasure::mu6().mass(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(SpectralMeasure::mu3().mass(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(SpectralMeasure::mu7(2.0).unwrap().mass(), 1.0, epsilon = 1e-12);
        let scaled = SpectralMeasure::mu2().rescale_to_2pi();
        assert_abs_diff_eq!(scaled.mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn function_json_round_trip() {
        let f = PdFunction::f7(2.0).unwrap();
        let json = f.to_json();
        assert!(json.contains("\"kind\":\"catalog\""));
        let back = PdFunction::from_json(&json).unwrap();
        let (a, b) = (f.evaluate(0.3).unwrap(), back.evaluate(0.3).unwrap());
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);

        let m = SpectralMeasure::mu6();
        let back = SpectralMeasure::from_json(&m.to_json()).unwrap();
        assert_eq!(back.atoms().len(), 2);
    }
}
