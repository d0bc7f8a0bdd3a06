//! Nystrom discretization and eigensolution of the finite-beam operator.
//!
//! The operator maps `u` to the convolution of `u` with the Green's kernel
//! over `[-l, l]`.  Discretizing the integral with a positive quadrature rule
//! and scaling by `sqrt(w_i)` on both sides gives a symmetric matrix
//! `A_ij = sqrt(w_i) K(|x_i - x_j|) sqrt(w_j)` whose eigenvalues approximate
//! the operator spectrum while staying exactly real.

use std::io::Write;

use serde::Serialize;

use crate::charfun::{eval_psi, eval_q, BeamConfig, SpectralPoint};
use crate::eigen::{symmetric_eigen, SquareMatrix};
use crate::quad::{nodes_weights, QuadratureRule};
use crate::{Error, Result, Scalar};

/// Parity class of a discrete eigenvector about `x = 0`.
///
/// The kernel is invariant under `x -> -x`, so operator eigenfunctions split
/// into even and odd families; discrete vectors are classified by the score
/// `<v, reverse(v)> / <v, v>` with a `0.99` threshold, everything else left
/// unclassified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    Unclassified,
}

/// Symmetrized Nystrom matrix together with its quadrature grid.
#[derive(Debug, Clone)]
pub struct KernelMatrix<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub entries: SquareMatrix<T>,
    pub rule: QuadratureRule,
    pub config: BeamConfig<T>,
}

/// Eigensolution of a [`KernelMatrix`], sorted descending.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub parities: Vec<Parity>,
    /// `max_j |A v - lambda v|_j` per eigenpair, against the original matrix.
    pub residuals: Vec<T>,
    /// Column `j` is the (weight-scaled) eigenvector of `eigenvalues[j]`.
    pub vectors: SquareMatrix<T>,
    pub n: usize,
    pub residual_bound: T,
    /// Estimated absolute quadrature error of the eigenvalues,
    /// `lambda_1 * ((1 + alpha*l)/n)^4`: the measured error of the rule on
    /// this kernel is flat across the spectrum and fourth order in the
    /// points-per-decay-length, and this overestimates it by a wide margin.
    pub disc_error_est: T,
}

/// Green's kernel `K(y) = (alpha/2k) exp(-(alpha/sqrt 2) y) sin((alpha/sqrt 2) y + pi/4)`.
pub fn eval_kernel<T: Scalar>(y: T, config: &BeamConfig<T>) -> Result<T> {
    if !(y >= T::zero()) || !y.is_finite() {
        return Err(Error::Domain(format!("y must be finite and >= 0 (got {y})")));
    }
    let a = config.alpha / T::SQRT_2();
    let phase = a * y + T::FRAC_PI_4();
    Ok(config.alpha / (T::of(2.0) * config.k) * (-a * y).exp() * phase.sin())
}

/// Assemble the symmetrized Nystrom matrix with `n` quadrature points.
pub fn discretize<T: Scalar>(
    config: &BeamConfig<T>,
    n: usize,
    rule: QuadratureRule,
) -> Result<KernelMatrix<T>> {
    if n < 4 {
        return Err(Error::Domain(format!("n must be >= 4 (got {n})")));
    }
    let (nodes, weights) = nodes_weights(rule, n, config.l)?;
    let sw: Vec<T> = weights.iter().map(|&w| w.sqrt()).collect();
    let mut entries = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let v = sw[i] * eval_kernel((nodes[i] - nodes[j]).abs(), config)? * sw[j];
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    Ok(KernelMatrix { nodes, weights, entries, rule, config: *config })
}

/// Full spectrum of the Nystrom matrix, residual-verified and classified by
/// eigenvector parity.
pub fn eigen_spectrum<T: Scalar>(m: &KernelMatrix<T>, tol: T) -> Result<Spectrum<T>> {
    let sol = symmetric_eigen(&m.entries, tol)?;
    let n = m.entries.n();
    let mut residuals = Vec::with_capacity(n);
    let mut parities = Vec::with_capacity(n);
    let mut residual_bound = T::zero();
    let weights_symmetric = {
        let mut ok = true;
        for i in 0..n / 2 {
            let rel = (m.weights[i] - m.weights[n - 1 - i]).abs()
                / m.weights[i].max(m.weights[n - 1 - i]);
            if rel > T::of(1e-12) {
                ok = false;
                break;
            }
        }
        ok
    };
    for j in 0..n {
        let v = sol.vectors.column(j);
        let av = m.entries.mul_vec(&v);
        let mut worst = T::zero();
        for i in 0..n {
            worst = worst.max((av[i] - sol.values[j] * v[i]).abs());
        }
        residuals.push(worst);
        residual_bound = residual_bound.max(worst);
        parities.push(if weights_symmetric { classify_parity(&v) } else { Parity::Unclassified });
    }
    let lambda1 = sol.values.first().copied().unwrap_or(T::zero());
    let resolution = (T::one() + m.config.alpha * m.config.l) / T::of(n as f64);
    let disc_error_est = lambda1.abs() * resolution.powi(4);
    Ok(Spectrum {
        eigenvalues: sol.values,
        parities,
        residuals,
        vectors: sol.vectors,
        n,
        residual_bound,
        disc_error_est,
    })
}

fn classify_parity<T: Scalar>(v: &[T]) -> Parity {
    let norm: T = v.iter().map(|&x| x * x).sum();
    if norm == T::zero() {
        return Parity::Unclassified;
    }
    let mirrored: T = v.iter().zip(v.iter().rev()).map(|(&a, &b)| a * b).sum();
    let score = mirrored / norm;
    if score > T::of(0.99) {
        Parity::Even
    } else if score < T::of(-0.99) {
        Parity::Odd
    } else {
        Parity::Unclassified
    }
}

/// Outcome of the confinement check, with the offending eigenvalues when it
/// fails.
#[derive(Debug, Clone, Serialize)]
pub struct ConfinementCheck<T> {
    pub confined: bool,
    pub lower_bound: T,
    pub upper_bound: T,
    /// `(index, eigenvalue)` pairs outside `(lower_bound, upper_bound)`.
    pub violations: Vec<(usize, T)>,
}

/// Check that every eigenvalue sits inside `(-tol, 1/k - floor)`, where the
/// floor keeps a safety margin of `max(tol, 10 * residual_bound)` below the
/// accumulation bound `1/k` (which itself must not be approached).
pub fn verify_confinement<T: Scalar>(
    s: &Spectrum<T>,
    config: &BeamConfig<T>,
    tol: T,
) -> Result<ConfinementCheck<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!("tol must be > 0 (got {tol})")));
    }
    let floor = tol.max(T::of(10.0) * s.residual_bound);
    let lower = -tol;
    let upper = T::one() / config.k - floor;
    let mut violations = Vec::new();
    for (i, &lambda) in s.eigenvalues.iter().enumerate() {
        if !(lambda > lower && lambda < upper) {
            violations.push((i + 1, lambda));
        }
    }
    Ok(ConfinementCheck { confined: violations.is_empty(), lower_bound: lower, upper_bound: upper, violations })
}

/// `psi_L(kappa) - q(kappa)` at the characteristic coordinate of `lambda`.
///
/// Positive for every `lambda` outside `[0, 1/k]`; a zero would certify an
/// eigenvalue there.  Saturated `psi` comes back as `+inf`, which is honest:
/// the margin exceeds any finite threshold.
pub fn characteristic_residual<T: Scalar>(lambda: T, config: &BeamConfig<T>) -> Result<T> {
    let point = SpectralPoint::from_lambda(lambda, config.k)?;
    let psi = eval_psi(point.kappa, config.big_l)?;
    Ok(psi.value - eval_q(point.kappa)?)
}

/// Least-squares slope and `r^2` of `log lambda_n` against `log n` over the
/// 1-based index window `[n_lo, n_hi]` of the descending spectrum.
///
/// Eigenvalues below ten times the noise floor (solver residual or
/// accumulated roundoff, whichever is larger) are not reliable decay data and
/// bound the window from above.
pub fn decay_fit<T: Scalar>(s: &Spectrum<T>, n_lo: usize, n_hi: usize) -> Result<(T, T)> {
    if n_lo < 2 || n_lo >= n_hi {
        return Err(Error::Domain(format!(
            "window must satisfy 2 <= n_lo < n_hi (got [{n_lo}, {n_hi}])"
        )));
    }
    let reliable = reliable_count(s);
    if n_hi > reliable {
        return Err(Error::InsufficientData(format!(
            "window end {n_hi} exceeds the {reliable} reliable eigenvalues"
        )));
    }
    let mut xs = Vec::with_capacity(n_hi - n_lo + 1);
    let mut ys = Vec::with_capacity(n_hi - n_lo + 1);
    for n in n_lo..=n_hi {
        xs.push(T::of(n as f64).ln());
        ys.push(s.eigenvalues[n - 1].ln());
    }
    let count = T::of(xs.len() as f64);
    let mx = xs.iter().copied().sum::<T>() / count;
    let my = ys.iter().copied().sum::<T>() / count;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let syy: T = ys.iter().map(|&y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > T::zero() { sxy * sxy / (sxx * syy) } else { T::one() };
    Ok((slope, r2))
}

/// Number of leading eigenvalues trustworthy for decay analysis: those above
/// ten times the discretization-plus-roundoff noise floor.
pub fn reliable_count<T: Scalar>(s: &Spectrum<T>) -> usize {
    let lambda1 = s.eigenvalues.first().copied().unwrap_or(T::zero());
    let noise = s
        .residual_bound
        .max(s.disc_error_est)
        .max(T::epsilon() * T::of(s.n as f64) * lambda1.abs());
    let floor = T::of(10.0) * noise;
    s.eigenvalues.iter().take_while(|&&v| v > floor).count()
}

/// One row per eigenpair: `index,eigenvalue,parity,residual`.
pub fn write_spectrum_csv<T: Scalar, W: Write>(s: &Spectrum<T>, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "index,eigenvalue,parity,residual")?;
    for i in 0..s.n {
        let parity = match s.parities[i] {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Unclassified => "unclassified",
        };
        writeln!(out, "{},{:e},{},{:e}", i + 1, s.eigenvalues[i], parity, s.residuals[i])?;
    }
    Ok(())
}

/// Machine-readable run summary for one discretize-and-solve pass.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary<T> {
    pub schema_version: u32,
    pub config: BeamConfig<T>,
    pub n: usize,
    pub rule: String,
    pub lambda1: T,
    pub lambda_min: T,
    pub residual_bound: T,
    pub confined: bool,
    pub verdict: String,
    pub decay_slope: Option<T>,
    pub decay_r2: Option<T>,
    pub decay_window: Option<(usize, usize)>,
}

pub fn summarize<T: Scalar>(
    s: &Spectrum<T>,
    m: &KernelMatrix<T>,
    check: &ConfinementCheck<T>,
    decay: Option<(usize, usize, T, T)>,
) -> SpectrumSummary<T> {
    SpectrumSummary {
        schema_version: 1,
        config: m.config,
        n: s.n,
        rule: m.rule.id().to_string(),
        lambda1: s.eigenvalues.first().copied().unwrap_or(T::zero()),
        lambda_min: s.eigenvalues.last().copied().unwrap_or(T::zero()),
        residual_bound: s.residual_bound,
        confined: check.confined,
        verdict: if check.confined { "CONFINED".to_string() } else { "VIOLATED".to_string() },
        decay_slope: decay.map(|d| d.2),
        decay_r2: decay.map(|d| d.3),
        decay_window: decay.map(|d| (d.0, d.1)),
    }
}
