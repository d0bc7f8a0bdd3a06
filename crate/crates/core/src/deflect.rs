//! Beam deflection solvers.
//!
//! Three modes of attack on `EI u'''' + phi(u, x) = w`:
//!
//! - the infinite beam with a linear foundation, solved exactly (up to the
//!   piecewise-linear load model) by convolving with the Green's kernel;
//! - plain application of the finite-interval operator to a sample vector;
//! - a Picard fixed-point iteration for nonlinear foundation laws, which is a
//!   contraction whenever the deviation of `phi` from the linear law times
//!   the operator norm stays below one.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::charfun::BeamConfig;
use crate::eigen::{operator_norm_estimate, SquareMatrix};
use crate::quad::QuadratureRule;
use crate::spectral::{discretize, eval_kernel, KernelMatrix};
use crate::{Error, Result, Scalar};

/// Sampled load `w(x)` on a uniform grid; zero outside the sampled support.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile<T> {
    xs: Vec<T>,
    values: Vec<T>,
    spacing: T,
}

impl<T: Scalar> LoadProfile<T> {
    pub fn from_vectors(xs: Vec<T>, values: Vec<T>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::GridMismatch { expected: xs.len(), got: values.len() });
        }
        if xs.len() < 2 {
            return Err(Error::GridTooCoarse { minimum: 2, got: xs.len() });
        }
        let spacing = xs[1] - xs[0];
        if !(spacing > T::zero()) {
            return Err(Error::Domain(format!("grid spacing must be > 0 (got {spacing})")));
        }
        for w in xs.windows(2) {
            let step = w[1] - w[0];
            if ((step - spacing) / spacing).abs() > T::of(1e-9) {
                return Err(Error::Domain("load grid must be uniform".to_string()));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("load values must be finite".to_string()));
        }
        Ok(Self { xs, values, spacing })
    }

    /// Parse `x,w` rows; `#` comments and a single header row are tolerated.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        let mut header_seen = false;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split(',');
            let (fx, fw) = (fields.next().unwrap_or(""), fields.next().unwrap_or(""));
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "expected exactly two columns (x,w)".to_string(),
                });
            }
            match (fx.trim().parse::<f64>(), fw.trim().parse::<f64>()) {
                (Ok(x), Ok(w)) => {
                    xs.push(T::of(x));
                    values.push(T::of(w));
                }
                _ if xs.is_empty() && !header_seen => {
                    header_seen = true;
                }
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("cannot parse '{trimmed}' as two numbers"),
                    });
                }
            }
        }
        Self::from_vectors(xs, values)
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn support(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// Piecewise-linear interpolant; identically zero outside the support.
    pub fn value_at(&self, x: T) -> T {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return T::zero();
        }
        let pos = ((x - lo) / self.spacing).to_f64().unwrap_or(0.0);
        let cell = (pos.floor() as usize).min(self.xs.len() - 2);
        let frac = (x - self.xs[cell]) / self.spacing;
        self.values[cell] + (self.values[cell + 1] - self.values[cell]) * frac
    }
}

/// Uniform evaluation grid for deflection output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformGrid<T> {
    pub start: T,
    pub step: T,
    pub len: usize,
}

impl<T: Scalar> UniformGrid<T> {
    pub fn new(start: T, step: T, len: usize) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::Domain(format!("step must be finite and > 0 (got {step})")));
        }
        if len < 2 {
            return Err(Error::GridTooCoarse { minimum: 2, got: len });
        }
        Ok(Self { start, step, len })
    }

    /// Grid spanning `[lo, hi]` with spacing at most `step`.
    pub fn covering(lo: T, hi: T, step: T) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Domain("grid must have positive extent".to_string()));
        }
        let len = ((hi - lo) / step).to_f64().unwrap_or(0.0).ceil() as usize + 1;
        let exact = (hi - lo) / T::of(len.max(2) as f64 - 1.0);
        Self::new(lo, exact, len.max(2))
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.len).map(|i| self.start + self.step * T::of(i as f64)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolverKind {
    InfiniteConvolution,
    OperatorApply,
    FixedPoint,
}

/// Provenance and convergence metadata attached to a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveMeta<T> {
    pub solver: SolverKind,
    pub iterations: usize,
    pub final_delta: T,
    pub observed_ratio: Option<T>,
    pub predicted_rho: Option<T>,
    /// Set when the evaluation grid ends while the solution still carries
    /// more than 1% of its peak: the decay margin was too small.
    pub boundary_warning: bool,
}

/// Sampled deflection `u(x)` with solver metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflectionProfile<T> {
    pub xs: Vec<T>,
    pub values: Vec<T>,
    pub meta: SolveMeta<T>,
}

impl<T: Scalar> DeflectionProfile<T> {
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }
}

/// Pointwise foundation law `phi(u, x)` with a Lipschitz estimate of its
/// deviation `u -> k*u - phi(u, x)` from the linear spring over the operating
/// range (the quantity that decides contraction).
pub struct FoundationLaw<T> {
    phi: Box<dyn Fn(T, T) -> T>,
    pub deviation_lipschitz: T,
}

impl<T: Scalar> FoundationLaw<T> {
    pub fn new(phi: impl Fn(T, T) -> T + 'static, deviation_lipschitz: T) -> Self {
        Self { phi: Box::new(phi), deviation_lipschitz }
    }

    /// The plain linear spring `phi = k*u`, whose deviation vanishes.
    pub fn linear(k: T) -> Self {
        Self::new(move |u, _| k * u, T::zero())
    }

    pub fn phi(&self, u: T, x: T) -> T {
        (self.phi)(u, x)
    }
}

/// Apply the finite-interval operator to samples on the quadrature grid:
/// `out_i = sum_j w_j K(|x_i - x_j|) u_j`.
pub fn apply_operator<T: Scalar>(u: &[T], m: &KernelMatrix<T>) -> Result<Vec<T>> {
    if u.len() != m.nodes.len() {
        return Err(Error::GridMismatch { expected: m.nodes.len(), got: u.len() });
    }
    let n = u.len();
    let mut out = vec![T::zero(); n];
    for i in 0..n {
        let mut acc = T::zero();
        for j in 0..n {
            acc = acc
                + m.weights[j]
                    * eval_kernel((m.nodes[i] - m.nodes[j]).abs(), &m.config)?
                    * u[j];
        }
        out[i] = acc;
    }
    Ok(out)
}

// Antiderivatives of the kernel against piecewise-linear loads, with
// a = alpha/sqrt(2) and phase pi/4:
//   F0(y) = int e^{-ay} sin(ay + pi/4) dy = -e^{-ay} (sin + cos)(ay + pi/4) / (2a)
//   F1(y) = int y e^{-ay} sin(ay + pi/4) dy = y F0(y) - e^{-ay} cos(ay + pi/4) / (2a^2)
fn kernel_antiderivatives<T: Scalar>(y: T, a: T) -> (T, T) {
    let phase = a * y + T::FRAC_PI_4();
    let e = (-a * y).exp();
    let f0 = -e * (phase.sin() + phase.cos()) / (T::of(2.0) * a);
    let f1 = y * f0 - e * phase.cos() / (T::of(2.0) * a * a);
    (f0, f1)
}

/// `int_{ya}^{yb} (base + slope*y) K(y) dy` for `0 <= ya <= yb`, exactly.
fn segment_integral<T: Scalar>(ya: T, yb: T, base: T, slope: T, a: T, scale: T) -> T {
    if a * ya > T::of(745.0) {
        return T::zero(); // kernel underflows; segment contributes nothing
    }
    let (f0a, f1a) = kernel_antiderivatives(ya, a);
    let (f0b, f1b) = kernel_antiderivatives(yb, a);
    scale * (base * (f0b - f0a) + slope * (f1b - f1a))
}

/// Infinite-beam deflection: the Green's convolution of the load, evaluated
/// by exact integration of the kernel against the piecewise-linear load.
///
/// Because the integration is exact, the returned samples satisfy
/// `EI u'''' + k u = w~` with `w~` the interpolated load; the only model
/// error is the interpolation of `w` itself.  The evaluation grid should
/// cover the load support plus a decay margin of at least `10/alpha`.
pub fn solve_infinite<T: Scalar>(
    w: &LoadProfile<T>,
    config: &BeamConfig<T>,
    grid: &UniformGrid<T>,
) -> Result<DeflectionProfile<T>> {
    let a = config.alpha / T::SQRT_2();
    let scale = config.alpha / (T::of(2.0) * config.k);
    let xs = grid.points();
    let n_cells = w.xs().len() - 1;
    let mut values = vec![T::zero(); xs.len()];
    for (xi, &x) in xs.iter().enumerate() {
        let mut acc = T::zero();
        for c in 0..n_cells {
            let (xl, xr) = (w.xs()[c], w.xs()[c + 1]);
            let (wl, wr) = (w.values()[c], w.values()[c + 1]);
            let slope = (wr - wl) / (xr - xl);
            if xr <= x {
                // entire cell left of x: y = x - xi runs over [x - xr, x - xl]
                let base = wl + slope * (x - xl);
                acc = acc + segment_integral(x - xr, x - xl, base, -slope, a, scale);
            } else if xl >= x {
                // entire cell right of x: y = xi - x runs over [xl - x, xr - x]
                let base = wl - slope * (xl - x);
                acc = acc + segment_integral(xl - x, xr - x, base, slope, a, scale);
            } else {
                // cell straddles x: split there; w(x) is the shared base value
                let wx = wl + slope * (x - xl);
                acc = acc + segment_integral(T::zero(), x - xl, wx, -slope, a, scale);
                acc = acc + segment_integral(T::zero(), xr - x, wx, slope, a, scale);
            }
        }
        values[xi] = acc;
    }
    let peak = values.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let edge = values[0].abs().max(values[values.len() - 1].abs());
    let boundary_warning = peak > T::zero() && edge > T::of(0.01) * peak;
    Ok(DeflectionProfile {
        xs,
        values,
        meta: SolveMeta {
            solver: SolverKind::InfiniteConvolution,
            iterations: 0,
            final_delta: T::zero(),
            observed_ratio: None,
            predicted_rho: None,
            boundary_warning,
        },
    })
}

/// Picard iteration `u_{m+1} = K_l[w - phi(u_m, .) + k u_m]` on an `n`-point
/// quadrature grid.
///
/// The linear spring part is folded into the operator, so the contraction
/// factor is `rho = deviation_lipschitz * lambda_1`; the solve refuses to run
/// when that estimate reaches 1.
pub fn solve_nonlinear_fixed_point<T: Scalar>(
    w: &LoadProfile<T>,
    law: &FoundationLaw<T>,
    config: &BeamConfig<T>,
    n: usize,
    rule: QuadratureRule,
    tol: T,
    max_iter: usize,
) -> Result<DeflectionProfile<T>> {
    solve_nonlinear_traced(w, law, config, n, rule, tol, max_iter, |_, _, _| {})
}

/// [`solve_nonlinear_fixed_point`] with a per-iteration observer
/// `(iteration, sup-norm delta, delta ratio)`.
#[allow(clippy::too_many_arguments)]
pub fn solve_nonlinear_traced<T: Scalar>(
    w: &LoadProfile<T>,
    law: &FoundationLaw<T>,
    config: &BeamConfig<T>,
    n: usize,
    rule: QuadratureRule,
    tol: T,
    max_iter: usize,
    mut on_step: impl FnMut(usize, T, Option<T>),
) -> Result<DeflectionProfile<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!("tol must be > 0 (got {tol})")));
    }
    if max_iter == 0 {
        return Err(Error::Domain("max_iter must be >= 1".to_string()));
    }
    let m = discretize(config, n, rule)?;
    let lambda1 = operator_norm_estimate(&m.entries);
    let rho = law.deviation_lipschitz * lambda1;
    if !(rho < T::one()) {
        return Err(Error::NonContraction { rho: rho.to_f64().unwrap_or(f64::NAN) });
    }
    let size = m.nodes.len();
    // dense application matrix W_ij = w_j K(|x_i - x_j|)
    let mut op = SquareMatrix::zeros(size);
    for i in 0..size {
        for j in 0..size {
            op[(i, j)] =
                m.weights[j] * eval_kernel((m.nodes[i] - m.nodes[j]).abs(), config)?;
        }
    }
    let w_samples: Vec<T> = m.nodes.iter().map(|&x| w.value_at(x)).collect();
    let mut u = vec![T::zero(); size];
    let mut diffs: Vec<T> = Vec::new();
    for iteration in 1..=max_iter {
        let rhs: Vec<T> = (0..size)
            .map(|j| w_samples[j] - law.phi(u[j], m.nodes[j]) + config.k * u[j])
            .collect();
        let next = op.mul_vec(&rhs);
        let delta = next
            .iter()
            .zip(&u)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        let ratio = diffs.last().filter(|&&p| p > T::zero()).map(|&p| delta / p);
        on_step(iteration, delta, ratio);
        diffs.push(delta);
        u = next;
        if delta <= tol {
            return Ok(DeflectionProfile {
                xs: m.nodes,
                values: u,
                meta: SolveMeta {
                    solver: SolverKind::FixedPoint,
                    iterations: iteration,
                    final_delta: delta,
                    observed_ratio: observed_ratio(&diffs),
                    predicted_rho: Some(rho),
                    boundary_warning: false,
                },
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: diffs.last().and_then(|d| d.to_f64()).unwrap_or(f64::NAN),
    })
}

/// Geometric mean of the step-to-step contraction ratios, skipping the first
/// two transient steps.
fn observed_ratio<T: Scalar>(diffs: &[T]) -> Option<T> {
    let ratios: Vec<T> = diffs
        .windows(2)
        .skip(2)
        .filter(|p| p[0] > T::zero() && p[1] > T::zero())
        .map(|p| p[1] / p[0])
        .collect();
    if ratios.is_empty() {
        return None;
    }
    let log_mean = ratios.iter().map(|r| r.ln()).sum::<T>() / T::of(ratios.len() as f64);
    Some(log_mean.exp())
}

/// Normalized ODE residual `max |EI D4 u + phi(u, x) - w| / max |w|` over the
/// interior of a uniform grid, with the fourth derivative from the 5-point
/// central stencil.
pub fn residual_ode<T: Scalar>(
    u: &DeflectionProfile<T>,
    w: &LoadProfile<T>,
    phi: impl Fn(T, T) -> T,
    config: &BeamConfig<T>,
) -> Result<T> {
    let n = u.xs.len();
    if n < 9 {
        return Err(Error::GridTooCoarse { minimum: 9, got: n });
    }
    let h = u.xs[1] - u.xs[0];
    if !(h > T::zero()) {
        return Err(Error::Domain("evaluation grid must be increasing".to_string()));
    }
    for pair in u.xs.windows(2) {
        if ((pair[1] - pair[0] - h) / h).abs() > T::of(1e-9) {
            return Err(Error::Domain("residual check needs a uniform grid".to_string()));
        }
    }
    let h4 = h * h * h * h;
    let ei = config.e * config.i;
    let mut worst = T::zero();
    for i in 2..n - 2 {
        let d4 = (u.values[i - 2] - T::of(4.0) * u.values[i - 1] + T::of(6.0) * u.values[i]
            - T::of(4.0) * u.values[i + 1]
            + u.values[i + 2])
            / h4;
        let r = ei * d4 + phi(u.values[i], u.xs[i]) - w.value_at(u.xs[i]);
        worst = worst.max(r.abs());
    }
    let denom = w.max_abs();
    Ok(if denom > T::zero() { worst / denom } else { worst })
}

/// One `x,u` row per sample.
pub fn write_deflection_csv<T: Scalar, W: Write>(
    profile: &DeflectionProfile<T>,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "x,u")?;
    for (x, v) in profile.xs.iter().zip(&profile.values) {
        writeln!(out, "{x:e},{v:e}")?;
    }
    Ok(())
}
