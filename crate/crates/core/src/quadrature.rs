//! Adaptive panel Gauss–Legendre quadrature.
//!
//! Every panel is integrated with an `n`-point rule both as a whole and as two
//! halves; the difference is the panel's error estimate. The panel with the largest
//! estimate is split until the summed estimate falls below
//! `max(rel_tol · |I|, abs_tol)` or the evaluation budget runs out.
//! Boxes in higher dimension are handled by iterating the one-dimensional rule.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::measure::AxisBox;

/// Evaluation cap shared by one top-level integration.
pub const DEFAULT_BUDGET: usize = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Points of the Gauss–Legendre rule on each panel.
    pub order: usize,
    /// Panels per axis before any refinement.
    pub initial_panels: usize,
    pub budget: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            order: 16,
            initial_panels: 8,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new(order: usize) -> Rule {
        let (nodes, weights) = gauss_legendre(order);
        Rule { nodes, weights }
    }

    fn apply<F: FnMut(f64) -> Result<f64>>(&self, f: &mut F, a: f64, b: f64) -> Result<f64> {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x)?;
        }
        Ok(s * half)
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            // deterministic tie-break on position
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Tracks integrand evaluations against a cap.
pub struct Budget {
    used: Cell<usize>,
    cap: usize,
}

impl Budget {
    pub fn new(cap: usize) -> Budget {
        Budget {
            used: Cell::new(0),
            cap,
        }
    }

    pub fn used(&self) -> usize {
        self.used.get()
    }

    fn spend(&self, n: usize) -> Result<()> {
        let used = self.used.get() + n;
        self.used.set(used);
        if used > self.cap {
            Err(Error::QuadratureBudgetExceeded { evaluations: used })
        } else {
            Ok(())
        }
    }
}

fn evaluate_panel<F: FnMut(f64) -> Result<f64>>(
    rule: &Rule,
    f: &mut F,
    a: f64,
    b: f64,
    budget: &Budget,
) -> Result<Panel> {
    budget.spend(3 * rule.nodes.len())?;
    let whole = rule.apply(f, a, b)?;
    let m = 0.5 * (a + b);
    let halves = rule.apply(f, a, m)? + rule.apply(f, m, b)?;
    Ok(Panel {
        a,
        b,
        value: halves,
        error: (whole - halves).abs(),
    })
}

/// `∫_a^b f` by adaptive refinement.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig, budget: &Budget) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let rule = Rule::new(cfg.order);
    let n0 = cfg.initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(4 * n0);
    for i in 0..n0 {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == n0 { b } else { lo + width };
        heap.push(evaluate_panel(&rule, &mut f, lo, hi, budget)?);
    }
    loop {
        let (total, err) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if err <= (cfg.rel_tol * total.abs()).max(cfg.abs_tol) {
            // sum in position order so the result does not depend on heap layout
            let mut panels: Vec<_> = heap.into_vec();
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        let worst = heap.pop().expect("nonempty heap");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // panel cannot be split further in floating point
            return Err(Error::NumericalInconsistency(format!(
                "quadrature stalled on [{}, {}] with error {err:e}",
                worst.a, worst.b
            )));
        }
        heap.push(evaluate_panel(&rule, &mut f, worst.a, m, budget)?);
        heap.push(evaluate_panel(&rule, &mut f, m, worst.b, budget)?);
    }
}

/// `∫_box f` by iterated one-dimensional adaptive quadrature.
pub fn integrate_box<F>(f: &F, domain: &AxisBox, cfg: &QuadratureConfig, budget: &Budget) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut point = vec![0.0; domain.dim()];
    integrate_axis(f, domain.bounds(), 0, &mut point, cfg, budget)
}

fn integrate_axis<F>(
    f: &F,
    bounds: &[(f64, f64)],
    axis: usize,
    point: &mut [f64],
    cfg: &QuadratureConfig,
    budget: &Budget,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let (a, b) = bounds[axis];
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument("quadrature box must be bounded".into()));
    }
    if axis + 1 == bounds.len() {
        return integrate(
            |t| {
                point[axis] = t;
                f(point)
            },
            a,
            b,
            cfg,
            budget,
        );
    }
    // only the innermost axis spends budget
    let free = Budget::new(usize::MAX);
    integrate(
        |t| {
            point[axis] = t;
            integrate_axis(f, bounds, axis + 1, point, cfg, budget)
        },
        a,
        b,
        cfg,
        &free,
    )
}
