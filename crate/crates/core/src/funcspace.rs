//! Finite-dimensional function spaces on a closed interval.
//!
//! A [`FunctionSpace`] is an ordered list of [`BasisFunction`]s with analytic
//! derivatives. The operations here build the spaces an operator must be
//! exact on: derivative spaces, direct sums, and the product-rule space
//! `{(g_i g_j)'}` a positive quadrature must integrate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{FsbpError, Result};
use crate::linalg;

/// Relative singular-value / residual threshold for linear independence.
pub const RANK_TOL: f64 = 1e-10;

/// Largest admissible `|f|`, `|f'|`, `|f''|` of a basis function.
pub const MAX_BASIS_MAGNITUDE: f64 = 1e100;

type DerivFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;
type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left < right) {
            return Err(FsbpError::InvalidInterval { left, right });
        }
        Ok(Self { left, right })
    }

    /// The reference element `[-1, 1]`.
    pub fn reference() -> Self {
        Self { left: -1.0, right: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * self.width().max(1.0);
        x >= self.left - slack && x <= self.right + slack
    }

    /// Affine image in `target` of a point of `self`.
    pub fn map_point(&self, target: &Interval, x: f64) -> f64 {
        target.left + (x - self.left) * (target.width() / self.width())
    }

    pub fn approx_eq(&self, other: &Interval) -> bool {
        let tol = 1e-12 * self.width().max(other.width()).max(1.0);
        (self.left - other.left).abs() <= tol && (self.right - other.right).abs() <= tol
    }

    /// `n` equidistant points including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.left + self.right)],
            _ => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.right
                    } else {
                        self.left + self.width() * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// A scalar basis function with analytic derivatives up to `max_order`.
#[derive(Clone)]
pub struct BasisFunction {
    label: String,
    derivative: DerivFn,
    max_order: usize,
    antiderivative: Option<ScalarFn>,
}

impl fmt::Debug for BasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisFunction")
            .field("label", &self.label)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl BasisFunction {
    /// A function whose derivatives of every order are available; `f(k, x)`
    /// returns the `k`-th derivative at `x`.
    pub fn analytic<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            derivative: Arc::new(f),
            max_order: usize::MAX,
            antiderivative: None,
        }
    }

    /// A user-supplied function with value, first and second derivative.
    pub fn custom<F0, F1, F2>(label: impl Into<String>, eval: F0, d1: F1, d2: F2) -> Self
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            derivative: Arc::new(move |k, x| match k {
                0 => eval(x),
                1 => d1(x),
                2 => d2(x),
                _ => f64::NAN,
            }),
            max_order: 2,
            antiderivative: None,
        }
    }

    pub fn with_antiderivative<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.antiderivative = Some(Arc::new(f));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `k`-th derivative; NaN beyond `max_order`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        if k > self.max_order {
            f64::NAN
        } else {
            (self.derivative)(k, x)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.derivative(1, x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.derivative(2, x)
    }

    /// Exact antiderivative, when one is known in closed form.
    pub fn antiderivative(&self, x: f64) -> Option<f64> {
        self.antiderivative.as_ref().map(|f| f(x))
    }

    pub fn has_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    /// The derivative `f'` as a basis function of its own.
    pub fn differentiated(&self) -> Result<BasisFunction> {
        if self.max_order < 1 {
            return Err(FsbpError::DerivativeUnavailable {
                label: self.label.clone(),
                order: 1,
            });
        }
        let inner = self.derivative.clone();
        let original = self.derivative.clone();
        Ok(BasisFunction {
            label: format!("d/dx[{}]", self.label),
            derivative: Arc::new(move |k, x| inner(k + 1, x)),
            max_order: self.max_order.saturating_sub(1).max(if self.max_order == usize::MAX {
                usize::MAX
            } else {
                0
            }),
            antiderivative: Some(Arc::new(move |x| original(0, x))),
        })
    }

    /// `(a b)' = a' b + a b'`, with all derivatives from the Leibniz rule.
    pub fn product_derivative(a: &BasisFunction, b: &BasisFunction) -> Result<BasisFunction> {
        let order = a.max_order.min(b.max_order);
        if order < 1 {
            let label = if a.max_order < 1 { &a.label } else { &b.label };
            return Err(FsbpError::DerivativeUnavailable {
                label: label.clone(),
                order: 1,
            });
        }
        let (fa, fb) = (a.derivative.clone(), b.derivative.clone());
        let (ga, gb) = (a.derivative.clone(), b.derivative.clone());
        Ok(BasisFunction {
            label: format!("d/dx[{}*{}]", a.label, b.label),
            derivative: Arc::new(move |k, x| {
                let n = k + 1;
                let mut binom = 1.0;
                let mut sum = 0.0;
                for m in 0..=n {
                    sum += binom * fa(m, x) * fb(n - m, x);
                    binom = binom * (n - m) as f64 / (m + 1) as f64;
                }
                sum
            }),
            max_order: if order == usize::MAX { usize::MAX } else { order - 1 },
            antiderivative: Some(Arc::new(move |x| ga(0, x) * gb(0, x))),
        })
    }

    /// `c f`.
    pub fn scaled(&self, c: f64) -> BasisFunction {
        let inner = self.derivative.clone();
        BasisFunction {
            label: self.label.clone(),
            derivative: Arc::new(move |k, x| c * inner(k, x)),
            max_order: self.max_order,
            antiderivative: self.antiderivative.clone().map(|f| {
                let g: ScalarFn = Arc::new(move |x| c * f(x));
                g
            }),
        }
    }

    /// Pull-back of this function, defined on `from`, to the interval `to`
    /// through the increasing affine map between them.
    pub fn mapped(&self, from: Interval, to: Interval) -> BasisFunction {
        let inner = self.derivative.clone();
        let scale = from.width() / to.width();
        BasisFunction {
            label: self.label.clone(),
            derivative: Arc::new(move |k, x| {
                let xi = to.map_point(&from, x);
                inner(k, xi) * scale.powi(k as i32)
            }),
            max_order: self.max_order,
            antiderivative: self.antiderivative.clone().map(|f| {
                let g: ScalarFn = Arc::new(move |x| f(to.map_point(&from, x)) / scale);
                g
            }),
        }
    }

    /// Check `d1` and `d2` against central differences of `eval` and `d1`
    /// at 10 pseudo-random interior points (step `1e-5`, rel. error `1e-6`).
    pub fn check_derivatives(&self, element: &Interval, seed: u64) -> Result<()> {
        let h = 1e-5;
        let mut rng = StdRng::seed_from_u64(seed);
        let lo = element.left + 2.0 * h;
        let hi = element.right - 2.0 * h;
        for _ in 0..10 {
            let x = if lo < hi { rng.random_range(lo..hi) } else { 0.5 * (lo + hi) };
            for (order, which) in [(1usize, "d1"), (2, "d2")] {
                if order > self.max_order {
                    continue;
                }
                let fd = (self.derivative(order - 1, x + h) - self.derivative(order - 1, x - h))
                    / (2.0 * h);
                let exact = self.derivative(order, x);
                let scale = exact
                    .abs()
                    .max(self.derivative(order - 1, x).abs())
                    .max(1.0);
                let error = (fd - exact).abs() / scale;
                if !(error <= 1e-6) {
                    return Err(FsbpError::InconsistentDerivative {
                        label: self.label.clone(),
                        which,
                        error,
                    });
                }
            }
        }
        Ok(())
    }
}

/// The built-in families. Polynomial parts are carried in the Legendre
/// basis of the element; the spans are the monomial spans.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    /// `span{x^k : k = 0..=d}`
    Polynomial(usize),
    /// `span{1, sin(kπx), cos(kπx) : k = 1..=d}`
    Trigonometric(usize),
    /// `span{1, x, .., x^(d-1), e^(αx)}`
    Exponential { degree: usize, alpha: f64 },
    /// `span{1, x, e^(∓(x/α)^2)}`: the decaying Gaussian unless `growing`.
    GaussianRbf { alpha: f64, growing: bool },
    Custom,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Polynomial(d) => write!(f, "poly:d={d}"),
            SpaceKind::Trigonometric(d) => write!(f, "trig:d={d}"),
            SpaceKind::Exponential { degree, alpha } => write!(f, "exp:d={degree},alpha={alpha}"),
            SpaceKind::GaussianRbf { alpha, growing: false } => write!(f, "rbf:alpha={alpha}"),
            SpaceKind::GaussianRbf { alpha, growing: true } => write!(f, "rbf:alpha={alpha},sign=+1"),
            SpaceKind::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for SpaceKind {
    type Err = FsbpError;

    /// Parses `poly:d=2`, `trig:d=1`, `exp:d=2,alpha=1`, `rbf:alpha=1` and
    /// `rbf:alpha=1,sign=+1` (growing Gaussian).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, params) = s.split_once(':').unwrap_or((s, ""));
        let mut degree: Option<usize> = None;
        let mut alpha: Option<f64> = None;
        let mut growing = false;
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| FsbpError::Parse(format!("space parameter `{item}`")))?;
            match key.trim() {
                "d" => {
                    degree = Some(value.trim().parse().map_err(|_| {
                        FsbpError::Parse(format!("space degree `{value}`"))
                    })?)
                }
                "alpha" => {
                    alpha = Some(value.trim().parse().map_err(|_| {
                        FsbpError::Parse(format!("space alpha `{value}`"))
                    })?)
                }
                "sign" => {
                    growing = match value.trim() {
                        "+1" | "1" | "+" => true,
                        "-1" | "-" => false,
                        v => return Err(FsbpError::Parse(format!("rbf sign must be +1 or -1, got `{v}`"))),
                    }
                }
                other => return Err(FsbpError::Parse(format!("unknown space parameter `{other}`"))),
            }
        }
        let need_d = || degree.ok_or_else(|| FsbpError::Parse(format!("`{s}` needs d=<degree>")));
        match head {
            "poly" => Ok(SpaceKind::Polynomial(need_d()?)),
            "trig" => Ok(SpaceKind::Trigonometric(need_d()?)),
            "exp" => Ok(SpaceKind::Exponential {
                degree: degree.unwrap_or(2),
                alpha: alpha.unwrap_or(1.0),
            }),
            "rbf" => Ok(SpaceKind::GaussianRbf { alpha: alpha.unwrap_or(1.0), growing }),
            "custom" => Ok(SpaceKind::Custom),
            other => Err(FsbpError::Parse(format!("unknown space kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FunctionSpace {
    basis: Vec<BasisFunction>,
    element: Interval,
    closure_flag: bool,
    kind: SpaceKind,
}

impl FunctionSpace {
    /// A space from an explicit basis. Rejects empty or dependent bases.
    pub fn new(basis: Vec<BasisFunction>, element: Interval, closure_flag: bool) -> Result<Self> {
        if basis.is_empty() {
            return Err(FsbpError::EmptySpace);
        }
        Self { basis, element, closure_flag, kind: SpaceKind::Custom }.checked()
    }

    /// Range and independence checks shared by the constructors.
    fn checked(self) -> Result<Self> {
        let grid = self.element.linspace((4 * self.dim()).max(16));
        for b in &self.basis {
            let magnitude = grid
                .iter()
                .flat_map(|&x| (0..=b.max_order().min(2)).map(move |k| b.derivative(k, x)))
                .fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) });
            // products of pairs must stay finite in the quadrature target
            if !(magnitude <= MAX_BASIS_MAGNITUDE) {
                return Err(FsbpError::BasisOutOfRange { label: b.label().to_string(), magnitude });
            }
        }
        let rank = self.sample_rank();
        if rank < self.dim() {
            return Err(FsbpError::DependentBasis { rank, dim: self.dim() });
        }
        Ok(self)
    }

    /// A user-defined space; every element's `d1`/`d2` is validated against
    /// finite differences.
    pub fn custom(basis: Vec<BasisFunction>, element: Interval, closure_flag: bool) -> Result<Self> {
        for (i, b) in basis.iter().enumerate() {
            b.check_derivatives(&element, 0x5eed + i as u64)?;
        }
        Self::new(basis, element, closure_flag)
    }

    pub(crate) fn from_parts(
        basis: Vec<BasisFunction>,
        element: Interval,
        closure_flag: bool,
        kind: SpaceKind,
    ) -> Self {
        Self { basis, element, closure_flag, kind }
    }

    /// The zero-dimensional space on `element`.
    pub fn empty(element: Interval) -> Self {
        Self { basis: Vec::new(), element, closure_flag: true, kind: SpaceKind::Custom }
    }

    pub fn from_kind(kind: &SpaceKind, element: Interval) -> Result<Self> {
        let basis = match *kind {
            SpaceKind::Polynomial(d) => legendre_basis(d, element),
            SpaceKind::Trigonometric(d) => trig_basis(d, true),
            SpaceKind::Exponential { degree, alpha } => {
                if degree == 0 || alpha == 0.0 || !alpha.is_finite() {
                    return Err(FsbpError::Config(format!(
                        "exponential space needs d >= 1 and finite alpha != 0 (got d={degree}, alpha={alpha})"
                    )));
                }
                let mut basis = legendre_basis(degree - 1, element);
                basis.push(exponential(alpha));
                basis
            }
            SpaceKind::GaussianRbf { alpha, growing } => {
                if alpha == 0.0 || !alpha.is_finite() {
                    return Err(FsbpError::Config(format!("rbf alpha must be finite and nonzero (got {alpha})")));
                }
                let mut basis = legendre_basis(1, element);
                basis.push(gaussian(alpha, growing));
                basis
            }
            SpaceKind::Custom => {
                return Err(FsbpError::Config("custom spaces need an explicit basis".into()))
            }
        };
        let closure = !matches!(kind, SpaceKind::GaussianRbf { .. });
        Self { basis, element, closure_flag: closure, kind: kind.clone() }.checked()
    }

    pub fn polynomial(degree: usize) -> Self {
        Self::from_kind(&SpaceKind::Polynomial(degree), Interval::reference())
            .expect("Legendre basis is independent")
    }

    pub fn trigonometric(degree: usize) -> Self {
        Self::from_kind(&SpaceKind::Trigonometric(degree), Interval::reference())
            .expect("trigonometric basis is independent")
    }

    pub fn exponential(degree: usize, alpha: f64) -> Result<Self> {
        Self::from_kind(&SpaceKind::Exponential { degree, alpha }, Interval::reference())
    }

    /// `span{1, x, e^(-(x/α)^2)}`.
    pub fn gaussian_rbf(alpha: f64) -> Result<Self> {
        Self::from_kind(&SpaceKind::GaussianRbf { alpha, growing: false }, Interval::reference())
    }

    /// `span{1, x, e^((x/α)^2)}`.
    pub fn growing_gaussian_rbf(alpha: f64) -> Result<Self> {
        Self::from_kind(&SpaceKind::GaussianRbf { alpha, growing: true }, Interval::reference())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisFunction] {
        &self.basis
    }

    pub fn element(&self) -> Interval {
        self.element
    }

    pub fn closure_flag(&self) -> bool {
        self.closure_flag
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// Short tag used in operator files.
    pub fn tag(&self) -> String {
        self.kind.to_string()
    }

    /// The same span pulled back to another interval.
    pub fn mapped(&self, target: Interval) -> FunctionSpace {
        FunctionSpace {
            basis: self.basis.iter().map(|b| b.mapped(self.element, target)).collect(),
            element: target,
            closure_flag: self.closure_flag,
            kind: self.kind.clone(),
        }
    }

    /// Numerical rank of the nodal values on `4 dim` equidistant points.
    pub fn sample_rank(&self) -> usize {
        if self.basis.is_empty() {
            return 0;
        }
        let grid = self.element.linspace((4 * self.dim()).max(8));
        let samples = normalized_samples(&self.basis, &grid);
        linalg::numerical_rank(&samples, RANK_TOL)
    }

    /// Least-squares membership residual of `f` in this span on a sampling grid,
    /// relative to `max |f|`.
    pub fn membership_residual(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let grid = self.element.linspace((4 * self.dim()).max(16));
        let target: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let scale = target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        if self.basis.is_empty() {
            return 1.0;
        }
        let samples = DMatrix::from_fn(grid.len(), self.dim(), |i, j| self.basis[j].eval(grid[i]));
        let rhs = nalgebra::DVector::from_vec(target.clone());
        let coeffs = linalg::min_norm_solve(&samples, &rhs, 1e-13);
        let fitted = &samples * coeffs;
        (fitted - rhs).amax() / scale
    }
}

/// `n`-th Legendre polynomial derivative table at `t`:
/// `table[m][k] = P_k^{(m)}(t)`, `k <= n`, `m <= order`.
fn legendre_table(n: usize, order: usize, t: f64) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; n + 1]; order + 1];
    table[0][0] = 1.0;
    if n >= 1 {
        table[0][1] = t;
    }
    for k in 1..n {
        let kf = k as f64;
        table[0][k + 1] = ((2.0 * kf + 1.0) * t * table[0][k] - kf * table[0][k - 1]) / (kf + 1.0);
    }
    for m in 1..=order {
        if n >= 1 {
            table[m][1] = if m == 1 { 1.0 } else { 0.0 };
        }
        for k in 1..n {
            table[m][k + 1] = table[m][k - 1] + (2.0 * k as f64 + 1.0) * table[m - 1][k];
        }
    }
    table
}

fn legendre_value(k: usize, order: usize, t: f64) -> f64 {
    if order > k {
        return 0.0;
    }
    legendre_table(k, order, t)[order][k]
}

fn legendre_basis(degree: usize, element: Interval) -> Vec<BasisFunction> {
    let (mid, half) = (0.5 * (element.left + element.right), 0.5 * element.width());
    (0..=degree)
        .map(|k| {
            let label = match k {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("P{k}(x)"),
            };
            BasisFunction::analytic(label, move |m, x| {
                let t = (x - mid) / half;
                legendre_value(k, m, t) / half.powi(m as i32)
            })
            .with_antiderivative(move |x| {
                let t = (x - mid) / half;
                let integral = if k == 0 {
                    t
                } else {
                    (legendre_value(k + 1, 0, t) - legendre_value(k - 1, 0, t)) / (2 * k + 1) as f64
                };
                integral * half
            })
        })
        .collect()
}

fn constant_one() -> BasisFunction {
    BasisFunction::analytic("1", |m, _| if m == 0 { 1.0 } else { 0.0 }).with_antiderivative(|x| x)
}

fn sine(k: usize) -> BasisFunction {
    let w = k as f64 * PI;
    BasisFunction::analytic(format!("sin({k}πx)"), move |m, x| {
        w.powi(m as i32) * (w * x + m as f64 * 0.5 * PI).sin()
    })
    .with_antiderivative(move |x| -(w * x).cos() / w)
}

fn cosine(k: usize) -> BasisFunction {
    let w = k as f64 * PI;
    BasisFunction::analytic(format!("cos({k}πx)"), move |m, x| {
        w.powi(m as i32) * (w * x + m as f64 * 0.5 * PI).cos()
    })
    .with_antiderivative(move |x| (w * x).sin() / w)
}

/// `{1?, sin(kπx), cos(kπx) : k = 1..=d}`.
fn trig_basis(degree: usize, with_constant: bool) -> Vec<BasisFunction> {
    let mut basis = Vec::with_capacity(2 * degree + 1);
    if with_constant {
        basis.push(constant_one());
    }
    for k in 1..=degree {
        basis.push(sine(k));
        basis.push(cosine(k));
    }
    basis
}

fn exponential(alpha: f64) -> BasisFunction {
    BasisFunction::analytic(format!("exp({alpha}x)"), move |m, x| {
        alpha.powi(m as i32) * (alpha * x).exp()
    })
    .with_antiderivative(move |x| (alpha * x).exp() / alpha)
}

/// `e^{c x^2}` with `c = ±1/α²`; derivatives `p_m(x) e^{c x^2}` with
/// `p_{m+1} = p_m' + 2 c x p_m`.
fn gaussian(alpha: f64, growing: bool) -> BasisFunction {
    let c = if growing { 1.0 } else { -1.0 } / (alpha * alpha);
    let label = if growing { format!("exp((x/{alpha})^2)") } else { format!("exp(-(x/{alpha})^2)") };
    BasisFunction::analytic(label, move |m, x| {
        let mut poly = vec![1.0];
        for _ in 0..m {
            let mut next = vec![0.0; poly.len() + 1];
            for (j, &a) in poly.iter().enumerate() {
                if j > 0 {
                    next[j - 1] += j as f64 * a;
                }
                next[j + 1] += 2.0 * c * a;
            }
            poly = next;
        }
        let p = poly.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        p * (c * x * x).exp()
    })
}

/// Sample matrix with each column scaled to unit max-norm (zero columns stay zero).
fn normalized_samples(basis: &[BasisFunction], grid: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(grid.len(), basis.len(), |i, j| basis[j].eval(grid[i]));
    for mut col in m.column_iter_mut() {
        let s = col.amax();
        if s > 0.0 {
            col /= s;
        }
    }
    m
}

/// Greedy rank reduction: keep candidates in order, dropping any whose
/// sampled vector lies in the span of those already kept.
fn reduce_independent(candidates: Vec<BasisFunction>, element: Interval) -> Vec<BasisFunction> {
    if candidates.is_empty() {
        return candidates;
    }
    let grid = element.linspace((4 * candidates.len()).max(8));
    let samples = normalized_samples(&candidates, &grid);
    let keep = linalg::greedy_independent_columns(&samples, RANK_TOL);
    let mut keep_iter = keep.into_iter().peekable();
    candidates
        .into_iter()
        .enumerate()
        .filter_map(|(j, c)| {
            if keep_iter.peek() == Some(&j) {
                keep_iter.next();
                Some(c)
            } else {
                None
            }
        })
        .collect()
}

/// `F' = span{f' : f ∈ F}`, with zero and dependent derivatives pruned.
pub fn derivative_space(space: &FunctionSpace) -> Result<FunctionSpace> {
    match space.kind {
        SpaceKind::Polynomial(d) => {
            if d == 0 {
                return Ok(FunctionSpace::empty(space.element));
            }
            let reference = FunctionSpace::from_kind(&SpaceKind::Polynomial(d - 1), space.element)?;
            return Ok(reference);
        }
        SpaceKind::Trigonometric(d) if space.element.approx_eq(&Interval::reference()) => {
            return Ok(FunctionSpace::from_parts(
                trig_basis(d, false),
                space.element,
                true,
                SpaceKind::Custom,
            ));
        }
        _ => {}
    }
    let candidates = space
        .basis
        .iter()
        .map(|b| b.differentiated())
        .collect::<Result<Vec<_>>>()?;
    let kept = reduce_independent(candidates, space.element);
    Ok(FunctionSpace::from_parts(kept, space.element, space.closure_flag, SpaceKind::Custom))
}

/// `A ⊕ B`: the union of both bases reduced to an independent spanning set,
/// keeping the elements of `a` first. Returns `a` itself when `B ⊆ A`.
pub fn direct_sum(a: &FunctionSpace, b: &FunctionSpace) -> Result<FunctionSpace> {
    if !a.element.approx_eq(&b.element) {
        return Err(FsbpError::ElementMismatch);
    }
    let candidates: Vec<BasisFunction> = a.basis.iter().chain(b.basis.iter()).cloned().collect();
    let kept = reduce_independent(candidates, a.element);
    if kept.len() == a.dim() {
        return Ok(a.clone());
    }
    Ok(FunctionSpace::from_parts(kept, a.element, false, SpaceKind::Custom))
}

/// `F ⊕ F'`, the space a first-derivative operator must be exact on for the
/// composed second-derivative operator to be exact on `F`.
pub fn with_derivatives(space: &FunctionSpace) -> Result<FunctionSpace> {
    direct_sum(space, &derivative_space(space)?)
}

/// `(G²)' = span{g_i' g_j + g_i g_j' : i <= j}`, rank-reduced. Each basis
/// element is scaled to unit max-norm on the element.
pub fn product_rule_space(g: &FunctionSpace) -> Result<FunctionSpace> {
    let element = g.element;
    match g.kind {
        SpaceKind::Polynomial(d) => {
            if d == 0 {
                return Ok(FunctionSpace::empty(element));
            }
            let space = FunctionSpace::from_kind(&SpaceKind::Polynomial(2 * d - 1), element)?;
            return Ok(normalize_space(space));
        }
        SpaceKind::Trigonometric(d) if element.approx_eq(&Interval::reference()) => {
            let space =
                FunctionSpace::from_parts(trig_basis(2 * d, false), element, true, SpaceKind::Custom);
            return Ok(normalize_space(space));
        }
        _ => {}
    }
    product_rule_space_generic(g)
}

/// The product-rule space built from the Leibniz rule alone, without the
/// closed forms for polynomial and trigonometric spaces.
pub fn product_rule_space_generic(g: &FunctionSpace) -> Result<FunctionSpace> {
    let mut candidates = Vec::new();
    for i in 0..g.dim() {
        for j in i..g.dim() {
            candidates.push(BasisFunction::product_derivative(&g.basis[i], &g.basis[j])?);
        }
    }
    let kept = reduce_independent(candidates, g.element);
    Ok(normalize_space(FunctionSpace::from_parts(kept, g.element, false, SpaceKind::Custom)))
}

fn normalize_space(space: FunctionSpace) -> FunctionSpace {
    let grid = space.element.linspace((4 * space.dim()).max(64));
    let basis = space
        .basis
        .iter()
        .map(|b| {
            let s = grid.iter().fold(0.0f64, |m, &x| m.max(b.eval(x).abs()));
            if s > 0.0 {
                b.scaled(1.0 / s)
            } else {
                b.clone()
            }
        })
        .collect();
    FunctionSpace { basis, ..space }
}

/// The exactness target for the norm-matrix quadrature of an operator exact
/// on `g`: `(G²)'` together with the constants.
pub fn quadrature_target(g: &FunctionSpace) -> Result<FunctionSpace> {
    let products = product_rule_space(g)?;
    let constants = FunctionSpace::from_parts(vec![constant_one()], g.element, true, SpaceKind::Polynomial(0));
    let candidates: Vec<BasisFunction> =
        products.basis.iter().chain(constants.basis.iter()).cloned().collect();
    let kept = reduce_independent(candidates, g.element);
    Ok(FunctionSpace::from_parts(kept, g.element, false, SpaceKind::Custom))
}

/// `V[i][j] = g_j(x_i)`, `V'[i][j] = g_j'(x_i)`.
pub fn vandermonde(space: &FunctionSpace, nodes: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_nodes(&space.element, nodes)?;
    let n = nodes.len();
    let l = space.dim();
    let v = DMatrix::from_fn(n, l, |i, j| space.basis[j].eval(nodes[i]));
    let dv = DMatrix::from_fn(n, l, |i, j| space.basis[j].d1(nodes[i]));
    Ok((v, dv))
}

/// Nodal values of the `order`-th derivatives, `N x dim`.
pub fn nodal_derivatives(space: &FunctionSpace, nodes: &[f64], order: usize) -> DMatrix<f64> {
    DMatrix::from_fn(nodes.len(), space.dim(), |i, j| space.basis[j].derivative(order, nodes[i]))
}

pub(crate) fn check_nodes(element: &Interval, nodes: &[f64]) -> Result<()> {
    for (index, &value) in nodes.iter().enumerate() {
        if !element.contains(value) {
            return Err(FsbpError::NodeOutsideElement {
                index,
                value,
                left: element.left,
                right: element.right,
            });
        }
        if index > 0 && !(value > nodes[index - 1]) {
            return Err(FsbpError::NodesNotIncreasing { index });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn overflowing_bases_are_rejected() {
        assert!(matches!(FunctionSpace::exponential(2, 800.0), Err(FsbpError::BasisOutOfRange { .. })));
        assert!(matches!(FunctionSpace::growing_gaussian_rbf(0.01), Err(FsbpError::BasisOutOfRange { .. })));
        assert!(FunctionSpace::exponential(2, 40.0).is_ok());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let spaces = [
            FunctionSpace::polynomial(6),
            FunctionSpace::trigonometric(3),
            FunctionSpace::exponential(3, 1.5).unwrap(),
            FunctionSpace::gaussian_rbf(0.7).unwrap(),
        ];
        for space in &spaces {
            for b in space.basis() {
                b.check_derivatives(&space.element(), 7).unwrap();
                b.differentiated().unwrap().check_derivatives(&space.element(), 8).unwrap();
            }
        }
    }

    #[test]
    fn custom_space_with_wrong_derivative_is_rejected() {
        let good = BasisFunction::custom("x^3", |x| x * x * x, |x| 3.0 * x * x, |x| 6.0 * x);
        let bad = BasisFunction::custom("sinh", f64::sinh, f64::cosh, f64::cosh);
        assert!(FunctionSpace::custom(vec![good.clone()], Interval::reference(), false).is_ok());
        let err = FunctionSpace::custom(vec![good, bad], Interval::reference(), false).unwrap_err();
        assert!(matches!(err, FsbpError::InconsistentDerivative { which: "d2", .. }));
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let a = BasisFunction::custom("x", |x| x, |_| 1.0, |_| 0.0);
        let b = BasisFunction::custom("2x", |x| 2.0 * x, |_| 2.0, |_| 0.0);
        let err = FunctionSpace::new(vec![a, b], Interval::reference(), false).unwrap_err();
        assert!(matches!(err, FsbpError::DependentBasis { rank: 1, dim: 2 }));
        assert!(matches!(
            FunctionSpace::new(vec![], Interval::reference(), true),
            Err(FsbpError::EmptySpace)
        ));
    }

    #[test]
    fn legendre_antiderivative_is_exact() {
        let space = FunctionSpace::polynomial(5);
        for b in space.basis() {
            let h = 1e-6;
            let x = 0.3;
            let fd = (b.antiderivative(x + h).unwrap() - b.antiderivative(x - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(fd, b.eval(x), epsilon = 1e-8);
        }
    }

    #[test]
    fn derivative_space_examples() {
        let poly = derivative_space(&FunctionSpace::polynomial(2)).unwrap();
        assert_eq!(poly.dim(), 2);
        assert!(poly.membership_residual(&|_| 1.0) < 1e-12);
        assert!(poly.membership_residual(&|x| x) < 1e-12);

        let trig = derivative_space(&FunctionSpace::trigonometric(1)).unwrap();
        assert_eq!(trig.dim(), 2);
        assert!(trig.membership_residual(&|x| (PI * x).sin()) < 1e-12);
        assert!(trig.membership_residual(&|x| (PI * x).cos()) < 1e-12);
        assert!(trig.membership_residual(&|_| 1.0) > 1e-3);

        let rbf = derivative_space(&FunctionSpace::growing_gaussian_rbf(1.0).unwrap()).unwrap();
        assert_eq!(rbf.dim(), 2);
        assert!(rbf.membership_residual(&|_| 1.0) < 1e-12);
        assert!(rbf.membership_residual(&|x| x * (x * x).exp()) < 1e-12);
        let decaying = derivative_space(&FunctionSpace::gaussian_rbf(1.0).unwrap()).unwrap();
        assert!(decaying.membership_residual(&|x| x * (-x * x).exp()) < 1e-12);
    }

    #[test]
    fn generic_derivative_space_prunes_constants() {
        // same span as Polynomial(2), but through the generic path
        let basis = vec![
            BasisFunction::custom("1", |_| 1.0, |_| 0.0, |_| 0.0),
            BasisFunction::custom("x", |x| x, |_| 1.0, |_| 0.0),
            BasisFunction::custom("x^2", |x| x * x, |x| 2.0 * x, |_| 2.0),
        ];
        let space = FunctionSpace::custom(basis, Interval::reference(), true).unwrap();
        let deriv = derivative_space(&space).unwrap();
        assert_eq!(deriv.dim(), 2);
        assert_eq!(deriv.basis()[0].label(), "d/dx[x]");
    }

    #[test]
    fn direct_sum_examples() {
        let rbf = FunctionSpace::growing_gaussian_rbf(1.0).unwrap();
        let g = with_derivatives(&rbf).unwrap();
        assert_eq!(g.dim(), 4);
        assert!(g.membership_residual(&|x| x * (x * x).exp()) < 1e-12);

        for d in 1..5 {
            let p = FunctionSpace::polynomial(d);
            assert_eq!(with_derivatives(&p).unwrap().dim(), d + 1);
        }
        let e = FunctionSpace::exponential(2, 1.0).unwrap();
        assert_eq!(with_derivatives(&e).unwrap().dim(), 3);
    }

    #[test]
    fn closed_spaces_are_invariant() {
        let spaces = [
            FunctionSpace::polynomial(4),
            FunctionSpace::trigonometric(3),
            FunctionSpace::exponential(3, 0.1).unwrap(),
        ];
        for space in &spaces {
            assert!(space.closure_flag());
            assert_eq!(with_derivatives(space).unwrap().dim(), space.dim());
        }
    }

    #[test]
    fn direct_sum_rejects_element_mismatch() {
        let a = FunctionSpace::polynomial(1);
        let b = a.mapped(Interval::new(0.0, 1.0).unwrap());
        assert!(matches!(direct_sum(&a, &b), Err(FsbpError::ElementMismatch)));
    }

    #[test]
    fn derivative_space_lies_in_span_of_derivative_values() {
        let spaces = [
            FunctionSpace::gaussian_rbf(1.0).unwrap(),
            FunctionSpace::exponential(3, 2.0).unwrap(),
            FunctionSpace::trigonometric(2),
        ];
        for space in &spaces {
            let deriv = derivative_space(space).unwrap();
            let grid = space.element().linspace(4 * space.dim());
            let (_, dv) = vandermonde(space, &grid).unwrap();
            let (w, _) = vandermonde(&deriv, &grid).unwrap();
            for col in w.column_iter() {
                let coeffs = linalg::min_norm_solve(&dv, &col.into_owned(), 1e-13);
                let residual = (&dv * coeffs - col).amax();
                assert!(residual <= 1e-10 * col.amax().max(1.0), "residual {residual}");
            }
        }
    }

    #[test]
    fn product_rule_space_examples() {
        let constants = FunctionSpace::polynomial(0);
        assert_eq!(product_rule_space(&constants).unwrap().dim(), 0);

        let linear = product_rule_space(&FunctionSpace::polynomial(1)).unwrap();
        assert_eq!(linear.dim(), 2);
        assert!(linear.membership_residual(&|_| 1.0) < 1e-12);
        assert!(linear.membership_residual(&|x| x) < 1e-12);

        // Symbolic expansion of (g_i g_j)' for {1, sin πx, cos πx} gives
        // {cos πx, sin πx, sin 2πx, cos 2πx}: dimension 4, no constants.
        let trig = product_rule_space(&FunctionSpace::trigonometric(1)).unwrap();
        let generic = product_rule_space_generic(&FunctionSpace::trigonometric(1)).unwrap();
        assert_eq!(trig.dim(), 4);
        assert_eq!(generic.dim(), 4);
        for f in [
            |x: f64| (PI * x).sin(),
            |x: f64| (PI * x).cos(),
            |x: f64| (2.0 * PI * x).sin(),
            |x: f64| (2.0 * PI * x).cos(),
        ] {
            assert!(trig.membership_residual(&f) < 1e-10);
            assert!(generic.membership_residual(&f) < 1e-10);
        }
        assert!(generic.membership_residual(&|_| 1.0) > 1e-3);
    }

    #[test]
    fn closed_form_product_spaces_match_generic() {
        for d in 1..4 {
            let p = FunctionSpace::polynomial(d);
            assert_eq!(product_rule_space(&p).unwrap().dim(), product_rule_space_generic(&p).unwrap().dim());
            let t = FunctionSpace::trigonometric(d);
            assert_eq!(product_rule_space(&t).unwrap().dim(), product_rule_space_generic(&t).unwrap().dim());
        }
    }

    #[test]
    fn product_rule_space_contains_squares() {
        let spaces = [
            with_derivatives(&FunctionSpace::gaussian_rbf(1.0).unwrap()).unwrap(),
            FunctionSpace::exponential(2, 1.0).unwrap(),
            FunctionSpace::trigonometric(2),
        ];
        for g in &spaces {
            let prs = product_rule_space(g).unwrap();
            for b in g.basis() {
                let b = b.clone();
                let sq = move |x: f64| 2.0 * b.eval(x) * b.d1(x);
                assert!(prs.membership_residual(&sq) <= 1e-10);
            }
        }
    }

    #[test]
    fn vandermonde_examples() {
        let (v, dv) = vandermonde(&FunctionSpace::polynomial(1), &[-1.0, 1.0]).unwrap();
        assert_eq!(v, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 1.0, 1.0]));
        assert_eq!(dv, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]));

        let (v, _) =
            vandermonde(&FunctionSpace::trigonometric(1), &[-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0]).unwrap();
        assert_abs_diff_eq!(v[(0, 0)], 1.0);
        assert_abs_diff_eq!(v[(0, 1)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[(0, 2)], -1.0);

        let g = with_derivatives(&FunctionSpace::gaussian_rbf(1.0).unwrap()).unwrap();
        let (v, _) = vandermonde(&g, &[-1.0, -0.5, 0.0, 0.5, 1.0]).unwrap();
        assert_eq!(v.shape(), (5, 4));
        assert_eq!(v[(2, 3)], 0.0);
    }

    #[test]
    fn vandermonde_rejects_bad_nodes() {
        let p = FunctionSpace::polynomial(1);
        assert!(matches!(
            vandermonde(&p, &[-1.0, 0.0, 1.5]),
            Err(FsbpError::NodeOutsideElement { index: 2, .. })
        ));
        assert!(matches!(
            vandermonde(&p, &[-1.0, 0.5, 0.5]),
            Err(FsbpError::NodesNotIncreasing { index: 2 })
        ));
    }

    #[test]
    fn kind_tags_round_trip() {
        for kind in [
            SpaceKind::Polynomial(3),
            SpaceKind::Trigonometric(30),
            SpaceKind::Exponential { degree: 2, alpha: 0.1 },
            SpaceKind::GaussianRbf { alpha: 0.2236, growing: false },
            SpaceKind::GaussianRbf { alpha: 1.0, growing: true },
        ] {
            assert_eq!(kind.to_string().parse::<SpaceKind>().unwrap(), kind);
        }
        assert!("cubic:d=1".parse::<SpaceKind>().is_err());
        assert!("poly".parse::<SpaceKind>().is_err());
    }

    #[test]
    fn mapped_space_rescales_derivatives() {
        let block = Interval::new(0.0, 0.1).unwrap();
        let p = FunctionSpace::polynomial(2).mapped(block);
        let x = p.basis()[1].clone(); // P1 on [-1,1] -> 20 x - 1 on [0, 0.1]
        assert_abs_diff_eq!(x.eval(0.05), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x.d1(0.03), 20.0, epsilon = 1e-12);
        let quad = p.basis()[2].clone();
        assert_abs_diff_eq!(quad.d2(0.07), 3.0 * 400.0, epsilon = 1e-9);
    }
}
