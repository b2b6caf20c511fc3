//! Small-scale smooth convex solver: log-barrier Newton with backtracking
//! line search. Dense linear algebra only; the programs here stay below a
//! few hundred variables.

use nalgebra::{DMatrix, DVector};

use crate::capacity::capacity_gradients;
use crate::{Error, Result};

/// A twice-differentiable scalar function of a vector argument.
pub trait SmoothFn: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// a^T x - b; as a constraint, a^T x <= b.
pub struct LinearFn {
    pub a: DVector<f64>,
    pub b: f64,
}

impl LinearFn {
    /// Sum of the selected coordinates bounded by `limit`.
    pub fn sum_le(n: usize, idxs: &[usize], limit: f64) -> LinearFn {
        let mut a = DVector::zeros(n);
        for &i in idxs {
            a[i] = 1.0;
        }
        LinearFn { a, b: limit }
    }

    /// -x_i <= 0, i.e. nonnegativity of one coordinate.
    pub fn nonneg(n: usize, i: usize) -> LinearFn {
        let mut a = DVector::zeros(n);
        a[i] = -1.0;
        LinearFn { a, b: 0.0 }
    }
}

impl SmoothFn for LinearFn {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.a.dot(x) - self.b
    }
    fn gradient(&self, _x: &DVector<f64>) -> DVector<f64> {
        self.a.clone()
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
}

/// 0.5 x^T Q x + r^T x + s with Q symmetric PSD.
pub struct QuadraticFn {
    pub q: DMatrix<f64>,
    pub r: DVector<f64>,
    pub s: f64,
}

impl SmoothFn for QuadraticFn {
    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * (x.transpose() * &self.q * x)[(0, 0)] + self.r.dot(x) + self.s
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.q * x + &self.r
    }
    fn hessian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.q.clone()
    }
}

/// The left-hand side of a capacity constraint: either an epigraph variable
/// T_i or a fixed threshold c_i.
pub enum CapacityTarget {
    Var(usize),
    Const(f64),
}

/// target - C(x[p], x[w]) <= 0 with C the one-hop capacity law. Convex
/// because C is jointly concave.
pub struct CapacityGapFn {
    pub target: CapacityTarget,
    pub p_idx: usize,
    pub w_idx: usize,
    pub gain: f64,
    pub noise_psd: f64,
}

impl SmoothFn for CapacityGapFn {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let c = crate::capacity::cap_raw(x[self.p_idx], x[self.w_idx], self.gain / self.noise_psd);
        let target = match self.target {
            CapacityTarget::Var(i) => x[i],
            CapacityTarget::Const(v) => v,
        };
        target - c
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = capacity_gradients(x[self.p_idx], x[self.w_idx], self.gain, self.noise_psd)
            .expect("barrier keeps iterates interior");
        let mut g = DVector::zeros(x.len());
        g[self.p_idx] = -d.dp;
        g[self.w_idx] = -d.dw;
        if let CapacityTarget::Var(i) = self.target {
            g[i] = 1.0;
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = capacity_gradients(x[self.p_idx], x[self.w_idx], self.gain, self.noise_psd)
            .expect("barrier keeps iterates interior");
        let mut h = DMatrix::zeros(x.len(), x.len());
        h[(self.p_idx, self.p_idx)] = -d.dpp;
        h[(self.w_idx, self.w_idx)] = -d.dww;
        h[(self.p_idx, self.w_idx)] = -d.dpw;
        h[(self.w_idx, self.p_idx)] = -d.dpw;
        h
    }
}

/// target - C(x[p], w) <= 0 with the bandwidth held fixed; used by the
/// equal-bandwidth baseline where only powers are optimized.
pub struct FixedBandwidthCapacityGapFn {
    pub target: CapacityTarget,
    pub p_idx: usize,
    pub bandwidth: f64,
    pub gain: f64,
    pub noise_psd: f64,
}

impl SmoothFn for FixedBandwidthCapacityGapFn {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let c = crate::capacity::cap_raw(
            x[self.p_idx],
            self.bandwidth,
            self.gain / self.noise_psd,
        );
        let target = match self.target {
            CapacityTarget::Var(i) => x[i],
            CapacityTarget::Const(v) => v,
        };
        target - c
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let d = capacity_gradients(x[self.p_idx], self.bandwidth, self.gain, self.noise_psd)
            .expect("barrier keeps iterates interior");
        let mut g = DVector::zeros(x.len());
        g[self.p_idx] = -d.dp;
        if let CapacityTarget::Var(i) = self.target {
            g[i] = 1.0;
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = capacity_gradients(x[self.p_idx], self.bandwidth, self.gain, self.noise_psd)
            .expect("barrier keeps iterates interior");
        let mut h = DMatrix::zeros(x.len(), x.len());
        h[(self.p_idx, self.p_idx)] = -d.dpp;
        h
    }
}

/// An inequality-constrained convex program with an optional linear
/// equality block and a strictly feasible starting point.
pub struct ConvexProgram {
    pub n: usize,
    pub objective: Box<dyn SmoothFn>,
    /// g_k(x) <= 0 for every k.
    pub inequalities: Vec<Box<dyn SmoothFn>>,
    /// A x = b; the starting point must satisfy it.
    pub equalities: Option<(DMatrix<f64>, DVector<f64>)>,
    pub start: DVector<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub barrier_init: f64,
    pub barrier_growth: f64,
    /// Target on the duality-gap estimate m / t.
    pub tol: f64,
    pub max_newton_iters: usize,
    pub max_outer_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            barrier_init: 1.0,
            barrier_growth: 10.0,
            tol: 1e-8,
            max_newton_iters: 200,
            max_outer_iters: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    MaxIterations,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub x: DVector<f64>,
    pub objective: f64,
    /// m / t at exit: an upper bound on the suboptimality.
    pub gap: f64,
    pub outer_iterations: usize,
    pub newton_iterations: usize,
    pub status: SolverStatus,
}

/// Minimizes the program objective by the standard barrier method.
pub fn solve(program: &ConvexProgram, config: &SolverConfig) -> Result<SolverResult> {
    let m = program.inequalities.len();
    let mut x = program.start.clone();
    for g in &program.inequalities {
        if g.value(&x) >= 0.0 {
            return Err(Error::InfeasibleStart);
        }
    }
    if let Some((a, b)) = &program.equalities {
        let residual = (a * &x - b).norm();
        if residual > 1e-8 * (1.0 + b.norm()) {
            return Err(Error::InfeasibleStart);
        }
    }

    let mut t = config.barrier_init;
    let mut outer = 0;
    let mut newton_total = 0;
    let mut status = SolverStatus::Converged;

    loop {
        outer += 1;
        match center(program, &mut x, t, config, &mut newton_total) {
            Ok(()) => {}
            Err(Error::NumericalFailure(_)) => {
                return Ok(SolverResult {
                    objective: program.objective.value(&x),
                    gap: m as f64 / t,
                    outer_iterations: outer,
                    newton_iterations: newton_total,
                    status: SolverStatus::NumericalFailure,
                    x,
                });
            }
            Err(e) => return Err(e),
        }
        if m as f64 / t <= config.tol || m == 0 {
            break;
        }
        if outer >= config.max_outer_iters {
            status = SolverStatus::MaxIterations;
            break;
        }
        t *= config.barrier_growth;
    }

    Ok(SolverResult {
        objective: program.objective.value(&x),
        gap: if m == 0 { 0.0 } else { m as f64 / t },
        outer_iterations: outer,
        newton_iterations: newton_total,
        status,
        x,
    })
}

/// Newton centering of t*f(x) + phi(x) where phi is the log barrier.
fn center(
    program: &ConvexProgram,
    x: &mut DVector<f64>,
    t: f64,
    config: &SolverConfig,
    newton_total: &mut usize,
) -> Result<()> {
    let n = program.n;

    let barrier_value = |x: &DVector<f64>| -> Option<f64> {
        let mut v = t * program.objective.value(x);
        for g in &program.inequalities {
            let gv = g.value(x);
            if gv >= 0.0 {
                return None;
            }
            v -= (-gv).ln();
        }
        Some(v)
    };

    for _ in 0..config.max_newton_iters {
        *newton_total += 1;
        let mut grad = program.objective.gradient(x) * t;
        let mut hess = program.objective.hessian(x) * t;
        for g in &program.inequalities {
            let gv = g.value(x);
            let gg = g.gradient(x);
            let gh = g.hessian(x);
            let inv = -1.0 / gv; // positive
            grad += &gg * inv;
            hess += gh * inv + (&gg * gg.transpose()) * (inv * inv);
        }

        let step = newton_step(&hess, &grad, program.equalities.as_ref(), n)?;
        let decrement = grad.dot(&step).abs();
        if decrement * 0.5 <= 1e-10 {
            return Ok(());
        }

        // Backtracking: stay in the barrier domain, then Armijo decrease.
        let phi0 = barrier_value(x).expect("current iterate is interior");
        let slope = -decrement;
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = &*x + &step * s;
            if let Some(phi) = barrier_value(&candidate) {
                if phi <= phi0 + 0.25 * s * slope {
                    *x = candidate;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if !accepted {
            // No progress possible at machine precision.
            return Ok(());
        }
    }
    Ok(())
}

/// Solves the (possibly equality-constrained) Newton system, escalating a
/// diagonal regularization when factorization fails.
fn newton_step(
    hess: &DMatrix<f64>,
    grad: &DVector<f64>,
    equalities: Option<&(DMatrix<f64>, DVector<f64>)>,
    n: usize,
) -> Result<DVector<f64>> {
    let trace_scale = (hess.trace().abs() / n as f64).max(1.0);
    let mut reg = 0.0;
    for attempt in 0..4 {
        let mut h = hess.clone();
        if reg > 0.0 {
            for i in 0..n {
                h[(i, i)] += reg;
            }
        }
        let solved = match equalities {
            None => h.cholesky().map(|ch| ch.solve(&(-grad))),
            Some((a, _)) => {
                let p = a.nrows();
                let mut kkt = DMatrix::zeros(n + p, n + p);
                kkt.view_mut((0, 0), (n, n)).copy_from(&h);
                kkt.view_mut((n, 0), (p, n)).copy_from(a);
                kkt.view_mut((0, n), (n, p)).copy_from(&a.transpose());
                let mut rhs = DVector::zeros(n + p);
                rhs.rows_mut(0, n).copy_from(&(-grad));
                kkt.lu().solve(&rhs).map(|sol| sol.rows(0, n).into_owned())
            }
        };
        if let Some(step) = solved {
            if step.iter().all(|v| v.is_finite()) {
                return Ok(step);
            }
        }
        reg = if attempt == 0 {
            1e-10 * trace_scale
        } else {
            reg * 100.0
        };
    }
    Err(Error::NumericalFailure(
        "singular Newton system after regularization".into(),
    ))
}

/// Central-difference check of every gradient in the program at a point.
/// Returns the worst relative error across the objective and constraints.
pub fn gradient_check(program: &ConvexProgram, point: &DVector<f64>, step: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut check = |f: &dyn SmoothFn| {
        let grad = f.gradient(point);
        let scale = grad.amax().max(1.0);
        for i in 0..point.len() {
            let mut hi = point.clone();
            let mut lo = point.clone();
            hi[i] += step;
            lo[i] -= step;
            let fd = (f.value(&hi) - f.value(&lo)) / (2.0 * step);
            worst = worst.max((grad[i] - fd).abs() / scale);
        }
    };
    check(program.objective.as_ref());
    for g in &program.inequalities {
        check(g.as_ref());
    }
    worst
}
