//! Positive quadrature rules exact on a target function space.
//!
//! The weights of a rule are the diagonal of the norm matrix `P`. They are
//! found as the minimal-norm least-squares solution of the moment system
//! `Vᵀ w = m`; a rule is accepted only if it is exact and strictly positive.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{FsbpError, Result};
use crate::funcspace::{check_nodes, BasisFunction, FunctionSpace, Interval};
use crate::linalg;

/// Pseudo-inverse cutoff relative to the largest singular value.
pub const PINV_CUTOFF: f64 = 1e-12;
/// Exactness tolerance: `|Σ w h(x) − ∫h| ≤ EXACTNESS_TOL (1 + |∫h|)`.
pub const EXACTNESS_TOL: f64 = 1e-10;
const MOMENT_REL_TOL: f64 = 1e-13;
const MAX_DEPTH: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub element: Interval,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Worst exactness defect `|Q(h) − ∫h| / (1 + |∫h|)` over the basis of `space`.
    pub fn exactness_defect(&self, space: &FunctionSpace) -> Result<f64> {
        let oracle = MomentOracle::new(space)?;
        Ok(space
            .basis()
            .iter()
            .zip(&oracle.values)
            .map(|(h, &m)| (self.integrate(|x| h.eval(x)) - m).abs() / (1.0 + m.abs()))
            .fold(0.0, f64::max))
    }
}

/// Exact integrals of every basis element of a space over its element.
#[derive(Clone, Debug)]
pub struct MomentOracle {
    pub values: Vec<f64>,
}

impl MomentOracle {
    pub fn new(space: &FunctionSpace) -> Result<Self> {
        Ok(Self { values: moments(space)? })
    }
}

/// `∫ g_j` over the element for each basis element: closed-form
/// antiderivatives where known, adaptive Gauss–Kronrod otherwise.
pub fn moments(space: &FunctionSpace) -> Result<Vec<f64>> {
    let element = space.element();
    space.basis().iter().map(|b| moment(b, element)).collect()
}

fn moment(b: &BasisFunction, element: Interval) -> Result<f64> {
    match (b.antiderivative(element.right), b.antiderivative(element.left)) {
        (Some(r), Some(l)) => Ok(r - l),
        _ => integrate_adaptive(|x| b.eval(x), element.left, element.right, MOMENT_REL_TOL)
            .map_err(|estimate| FsbpError::MomentNonConvergence {
                label: b.label().to_string(),
                estimate,
            }),
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 15-point Kronrod estimate of `∫f` and of `∫|f|` on `[a, b]`.
fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    let mut abs = 0.0;
    for (k, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        if k == 7 {
            let v = f(c);
            sum += w * v;
            abs += w * v.abs();
        } else {
            let (v1, v2) = (f(c - h * x), f(c + h * x));
            sum += w * (v1 + v2);
            abs += w * (v1.abs() + v2.abs());
        }
    }
    (sum * h, abs * h)
}

/// Adaptive bisection of the 15-point Kronrod rule. An interval is accepted
/// once the whole-interval estimate and the sum over its halves agree to
/// its share of `rel_tol · ∫|f|`. On failure returns the error estimate.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> std::result::Result<f64, f64> {
    let (whole, scale) = kronrod15(&f, a, b);
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    let value = refine(&f, a, b, whole, tol, 0, &mut worst);
    if worst > 0.0 {
        Err(worst)
    } else if value.is_finite() {
        Ok(value)
    } else {
        Err(f64::INFINITY)
    }
}

fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let (left, _) = kronrod15(f, a, m);
    let (right, _) = kronrod15(f, m, b);
    let split = left + right;
    let err = (whole - split).abs();
    // roundoff floor: agreement cannot be asked beyond a few ulps of the pieces
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if err <= tol.max(floor) {
        return split;
    }
    if depth >= MAX_DEPTH {
        *worst = worst.max(err);
        return split;
    }
    refine(f, a, m, left, 0.5 * tol, depth + 1, worst) + refine(f, m, b, right, 0.5 * tol, depth + 1, worst)
}

/// Node families a rule can be searched over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeFamily {
    Equidistant,
    GaussLobatto,
}

impl NodeFamily {
    pub fn nodes(&self, n: usize, element: Interval) -> Vec<f64> {
        match self {
            NodeFamily::Equidistant => equidistant(n, element),
            NodeFamily::GaussLobatto => gauss_lobatto(n, element).0,
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeFamily::Equidistant => write!(f, "equi"),
            NodeFamily::GaussLobatto => write!(f, "lobatto"),
        }
    }
}

/// A node family with a point count, written `equi:5` or `lobatto:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub family: NodeFamily,
    pub n: usize,
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.n)
    }
}

impl FromStr for GridSpec {
    type Err = FsbpError;

    fn from_str(s: &str) -> Result<Self> {
        let (head, count) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| FsbpError::Parse(format!("grid `{s}` is not <family>:<N>")))?;
        let family = match head {
            "equi" | "equidistant" => NodeFamily::Equidistant,
            "lobatto" | "gl" => NodeFamily::GaussLobatto,
            other => return Err(FsbpError::Parse(format!("unknown node family `{other}`"))),
        };
        let n: usize = count
            .trim()
            .parse()
            .map_err(|_| FsbpError::Parse(format!("grid size `{count}`")))?;
        if n < 2 {
            return Err(FsbpError::Parse(format!("grid needs at least 2 nodes, got {n}")));
        }
        Ok(GridSpec { family, n })
    }
}

pub fn equidistant(n: usize, element: Interval) -> Vec<f64> {
    element.linspace(n)
}

/// Gauss–Lobatto nodes and weights on `element`, `n >= 2`.
pub fn gauss_lobatto(n: usize, element: Interval) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss–Lobatto needs at least two nodes");
    let deg = n - 1;
    let mut x: Vec<f64> = (0..n).map(|i| (std::f64::consts::PI * i as f64 / deg as f64).cos()).collect();
    let mut p = vec![vec![0.0; n]; n];
    for _ in 0..100 {
        let mut change = 0.0f64;
        for (i, xi) in x.iter_mut().enumerate() {
            let t = *xi;
            p[i][0] = 1.0;
            p[i][1] = t;
            for k in 2..=deg {
                p[i][k] = ((2 * k - 1) as f64 * t * p[i][k - 1] - (k - 1) as f64 * p[i][k - 2]) / k as f64;
            }
            let step = (t * p[i][deg] - p[i][deg - 1]) / (n as f64 * p[i][deg]);
            *xi = t - step;
            change = change.max(step.abs());
        }
        if change < 1e-16 {
            break;
        }
    }
    let half = 0.5 * element.width();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let t = x[i];
        let mut pm = 1.0;
        let mut pk = t;
        for k in 2..=deg {
            let next = ((2 * k - 1) as f64 * t * pk - (k - 1) as f64 * pm) / k as f64;
            pm = pk;
            pk = next;
        }
        let pn = if deg == 0 { 1.0 } else { pk };
        nodes.push(Interval::reference().map_point(&element, t));
        weights.push(half * 2.0 / ((n * deg) as f64 * pn * pn));
    }
    nodes[0] = element.left;
    nodes[n - 1] = element.right;
    (nodes, weights)
}

/// Minimal-norm weights on `nodes` exact on `target`, accepted only if exact
/// and strictly positive.
pub fn least_squares_weights(target: &FunctionSpace, nodes: &[f64]) -> Result<QuadratureRule> {
    let element = target.element();
    check_nodes(&element, nodes)?;
    let n = nodes.len();
    let tol = 1e-12 * element.width().max(1.0);
    if n < 2 || (nodes[0] - element.left).abs() > tol || (nodes[n - 1] - element.right).abs() > tol {
        return Err(FsbpError::MissingEndpoints);
    }
    let weights = if target.dim() == 0 {
        trapezoid_weights(nodes)
    } else {
        let moments = moments(target)?;
        let l = target.dim();
        let mut a = DMatrix::from_fn(l, n, |j, i| target.basis()[j].eval(nodes[i]));
        let mut rhs = DVector::from_vec(moments.clone());
        for j in 0..l {
            let s = a.row(j).amax().max(rhs[j].abs());
            if s > 0.0 {
                a.row_mut(j).scale_mut(1.0 / s);
                rhs[j] /= s;
            }
        }
        let mut w = linalg::min_norm_solve(&a, &rhs, PINV_CUTOFF);
        // one refinement step; large targets lose digits in the first solve
        let defect = &rhs - &a * &w;
        w += linalg::min_norm_solve(&a, &defect, PINV_CUTOFF);
        for (j, h) in target.basis().iter().enumerate() {
            let q: f64 = nodes.iter().zip(w.iter()).map(|(&x, &wi)| wi * h.eval(x)).sum();
            let residual = (q - moments[j]).abs();
            if !(residual <= EXACTNESS_TOL * (1.0 + moments[j].abs())) {
                return Err(FsbpError::InexactQuadrature {
                    n,
                    label: h.label().to_string(),
                    residual,
                });
            }
        }
        w.iter().copied().collect()
    };
    let min_weight = weights.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_weight > 1e-14 * element.width()) {
        return Err(FsbpError::NonPositiveWeights { n, min_weight });
    }
    Ok(QuadratureRule { nodes: nodes.to_vec(), weights, element })
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { nodes[i] - nodes[i - 1] } else { 0.0 };
            let right = if i + 1 < n { nodes[i + 1] - nodes[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// First `N >= start_n` in `family` admitting a positive exact rule.
/// Gives up past `16 · dim(target)` nodes.
pub fn find_positive_rule(target: &FunctionSpace, family: NodeFamily, start_n: usize) -> Result<QuadratureRule> {
    let cap = (16 * target.dim()).max(start_n).max(2);
    for n in start_n.max(2)..=cap {
        let nodes = family.nodes(n, target.element());
        match least_squares_weights(target, &nodes) {
            Ok(rule) => return Ok(rule),
            Err(FsbpError::NonPositiveWeights { .. } | FsbpError::InexactQuadrature { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(FsbpError::RuleNotFound { cap })
}
