//! Certification engine for the spectral-gap inequality `psi_L(kappa) > q(kappa)`.
//!
//! The main entry point sweeps the margin `psi_L - q` over a `(kappa, L)`
//! rectangle on a corner-plus-center grid, adaptively bisecting any cell whose
//! margin comes within an order of magnitude of its floating-point noise
//! floor, and reports the global minimum with its witness.  A battery of
//! auxiliary inequality checks (the supporting facts for the gap argument)
//! rides along in `sub_reports`.
//!
//! This is a floating-point certification, not an interval proof: every
//! reported margin carries an evaluation-error estimate so a reader can judge
//! how far above the noise the minimum sits.

use std::io::Write;

use serde::Serialize;

use crate::charfun::{
    eval_f, eval_psi, eval_q, invert_ghat, invert_gl, q_of_ghat_inverse,
};
use crate::{Error, Result, Scalar};

/// Rectangle in the `(kappa, L)` plane with its initial grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRegion<T> {
    pub kappa_min: T,
    pub kappa_max: T,
    pub l_min: T,
    pub l_max: T,
    pub n_kappa: usize,
    pub n_l: usize,
    pub refine_depth: usize,
}

impl<T: Scalar> ScanRegion<T> {
    pub fn new(
        kappa_min: T,
        kappa_max: T,
        l_min: T,
        l_max: T,
        n_kappa: usize,
        n_l: usize,
        refine_depth: usize,
    ) -> Result<Self> {
        if !(T::zero() < kappa_min && kappa_min < kappa_max) || !kappa_max.is_finite() {
            return Err(Error::Domain(format!(
                "need 0 < kappa_min < kappa_max (got [{kappa_min}, {kappa_max}])"
            )));
        }
        if !(T::zero() < l_min && l_min < l_max) || !l_max.is_finite() {
            return Err(Error::Domain(format!(
                "need 0 < L_min < L_max (got [{l_min}, {l_max}])"
            )));
        }
        if n_kappa < 2 || n_l < 2 {
            return Err(Error::Domain(format!(
                "grid must be at least 2x2 (got {n_kappa}x{n_l})"
            )));
        }
        Ok(Self { kappa_min, kappa_max, l_min, l_max, n_kappa, n_l, refine_depth })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness<T> {
    pub kappa: T,
    pub l: T,
}

/// Outcome of one auxiliary inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubReport<T> {
    pub name: String,
    pub passed: bool,
    /// Minimum of the quantity the check requires to be positive.
    pub min_margin: T,
    pub witness: Witness<T>,
    pub points: usize,
    pub note: String,
}

/// Record of one scanned cell, for the optional per-cell CSV trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellRecord<T> {
    pub kappa_lo: T,
    pub kappa_hi: T,
    pub l_lo: T,
    pub l_hi: T,
    pub depth: usize,
    pub min_margin: T,
    pub err_est: T,
}

/// Full certification record for one region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport<T> {
    pub schema_version: u32,
    pub region: ScanRegion<T>,
    /// Initial grid resolution `(n_kappa, n_l)`.
    pub grid: (usize, usize),
    pub min_margin: T,
    pub witness: Witness<T>,
    /// Floating-point error estimate of the margin at the witness.
    pub min_margin_err_est: T,
    pub cells_evaluated: u64,
    pub points_evaluated: u64,
    pub all_positive: bool,
    pub sub_reports: Vec<SubReport<T>>,
}

impl<T: Scalar + Serialize> ScanReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The coefficients of the cubic in `L*kappa` whose joint positivity rules
/// out a contact point at `kappa > 1 + sqrt(2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbcCoefficients<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

/// Inversion tolerance used by the checks, scaled to the working precision.
fn inversion_tol<T: Scalar>() -> T {
    T::epsilon() * T::of(5e3)
}

/// Validated margin `psi_L(kappa) - q(kappa)` (log-space once `psi` saturates).
pub fn psi_minus_q<T: Scalar>(kappa: T, big_l: T) -> Result<T> {
    let psi = eval_psi(kappa, big_l)?;
    let q = eval_q(kappa)?;
    Ok(if psi.saturated { psi.ln_value - q.ln() } else { psi.value - q })
}

/// Margin and a local estimate of its floating-point evaluation error.
fn margin_at<T: Scalar>(kappa: T, big_l: T) -> (T, T) {
    let psi = eval_psi(kappa, big_l).expect("scan point inside domain");
    let q = eval_q(kappa).expect("scan point inside domain");
    let amplification = (big_l * kappa).abs() + T::of(4.0);
    if psi.saturated {
        (psi.ln_value - q.ln(), T::epsilon() * amplification)
    } else {
        (psi.value - q, T::epsilon() * (psi.value * amplification + T::of(2.0)))
    }
}

struct ScanAccumulator<T> {
    min_margin: T,
    witness: Witness<T>,
    err_at_min: T,
    cells: u64,
    points: u64,
}

/// Scan the region and return the full report (auxiliary battery included).
pub fn scan_psi_minus_q<T: Scalar>(region: &ScanRegion<T>) -> ScanReport<T> {
    scan_with_cells(region, None)
}

/// Like [`scan_psi_minus_q`], optionally collecting one record per cell.
///
/// Cells are processed row-major in `kappa` then `L`, children in a fixed
/// SW, SE, NW, NE order, so reports are bit-identical across runs.
pub fn scan_with_cells<T: Scalar>(
    region: &ScanRegion<T>,
    mut cells_out: Option<&mut Vec<CellRecord<T>>>,
) -> ScanReport<T> {
    let kappas = linspace(region.kappa_min, region.kappa_max, region.n_kappa);
    let ls = linspace(region.l_min, region.l_max, region.n_l);
    let mut acc = ScanAccumulator {
        min_margin: T::infinity(),
        witness: Witness { kappa: region.kappa_min, l: region.l_min },
        err_at_min: T::zero(),
        cells: 0,
        points: 0,
    };
    for i in 0..region.n_kappa - 1 {
        for j in 0..region.n_l - 1 {
            refine_cell(
                kappas[i],
                kappas[i + 1],
                ls[j],
                ls[j + 1],
                region.refine_depth,
                0,
                &mut acc,
                &mut cells_out,
            );
        }
    }
    ScanReport {
        schema_version: 1,
        region: *region,
        grid: (region.n_kappa, region.n_l),
        min_margin: acc.min_margin,
        witness: acc.witness,
        min_margin_err_est: acc.err_at_min,
        cells_evaluated: acc.cells,
        points_evaluated: acc.points,
        all_positive: acc.min_margin > T::zero(),
        sub_reports: auxiliary_checks(region),
    }
}

#[allow(clippy::too_many_arguments)]
fn refine_cell<T: Scalar>(
    k_lo: T,
    k_hi: T,
    l_lo: T,
    l_hi: T,
    depth_left: usize,
    depth: usize,
    acc: &mut ScanAccumulator<T>,
    cells_out: &mut Option<&mut Vec<CellRecord<T>>>,
) {
    let half = T::of(0.5);
    let k_mid = half * (k_lo + k_hi);
    let l_mid = half * (l_lo + l_hi);
    let samples = [(k_lo, l_lo), (k_hi, l_lo), (k_lo, l_hi), (k_hi, l_hi), (k_mid, l_mid)];
    let mut local_min = T::infinity();
    let mut local_err = T::zero();
    for (kappa, l) in samples {
        let (m, e) = margin_at(kappa, l);
        acc.points += 1;
        if m < acc.min_margin {
            acc.min_margin = m;
            acc.witness = Witness { kappa, l };
            acc.err_at_min = e;
        }
        if m < local_min {
            local_min = m;
            local_err = e;
        }
    }
    acc.cells += 1;
    if let Some(cells) = cells_out.as_deref_mut() {
        cells.push(CellRecord {
            kappa_lo: k_lo,
            kappa_hi: k_hi,
            l_lo,
            l_hi,
            depth,
            min_margin: local_min,
            err_est: local_err,
        });
    }
    // refine where the margin is within 10x of its own noise floor
    if depth_left > 0 && local_min < T::of(10.0) * local_err {
        for (a, b, c, d) in [
            (k_lo, k_mid, l_lo, l_mid),
            (k_mid, k_hi, l_lo, l_mid),
            (k_lo, k_mid, l_mid, l_hi),
            (k_mid, k_hi, l_mid, l_hi),
        ] {
            refine_cell(a, b, c, d, depth_left - 1, depth + 1, acc, cells_out);
        }
    }
}

fn linspace<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::of((n - 1) as f64);
    let mut v: Vec<T> = (0..n).map(|i| lo + step * T::of(i as f64)).collect();
    v[n - 1] = hi;
    v
}

/// `index,kappa_lo,kappa_hi,l_lo,l_hi,depth,min_margin,err_est` per cell.
pub fn write_cells_csv<T: Scalar, W: Write>(
    cells: &[CellRecord<T>],
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "index,kappa_lo,kappa_hi,l_lo,l_hi,depth,min_margin,err_est")?;
    for (i, c) in cells.iter().enumerate() {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{},{:e},{:e}",
            i, c.kappa_lo, c.kappa_hi, c.l_lo, c.l_hi, c.depth, c.min_margin, c.err_est
        )?;
    }
    Ok(())
}

/// `(psi~_L(t), f(cos t), q~_L(t))` for `t` in `(3*pi/2, 2*pi)`: the margin
/// functions viewed in the variable `t = g_L(kappa)`.
///
/// The first component strictly exceeds the second for every positive `t`;
/// the second exceeds `q(ghat^{-1}(-t))` on the interval; and for small `L`
/// the third drops below `q(ghat^{-1}(-t))` (callers should confirm the
/// premise `g_L^{-1}(t) > 1` before leaning on that last ordering).
pub fn check_mollified_chain<T: Scalar>(t: T, big_l: T) -> Result<(T, T, T)> {
    if !(t > T::of(1.5) * T::PI() && t < T::TAU()) {
        return Err(Error::Domain(format!("t must lie in (3*pi/2, 2*pi) (got {t})")));
    }
    let kappa = invert_gl(t, big_l, inversion_tol::<T>())?;
    let f_cos = eval_f(t.cos())?;
    let psi_tilde = (big_l * kappa).exp() * f_cos;
    let q_tilde = eval_q(kappa)?;
    Ok((psi_tilde, f_cos, q_tilde))
}

/// Coefficients of the cubic in `L*kappa` at `kappa > 1 + sqrt(2)`; all three
/// are strictly positive there, which is what rules out a contact point.
pub fn check_abc_positive<T: Scalar>(kappa: T) -> Result<AbcCoefficients<T>> {
    let threshold = T::one() + T::SQRT_2();
    if !(kappa > threshold) || !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must exceed 1 + sqrt(2) (got {kappa})")));
    }
    let q = eval_q(kappa)?;
    let k2 = kappa * kappa;
    // both factors positive for kappa beyond the largest root of the quartic
    let theta = (T::of(4.0) * kappa * (k2 - T::one()) / (k2 * k2 - T::of(6.0) * k2 + T::one())).atan();
    let denom = T::of(4.0) - T::of(3.0) * q;
    let lead = (T::one() - q) / denom;
    let qd = q / denom;
    let a = T::of(12.0) * lead + T::of(9.0) * qd * theta;
    let b = T::of(24.0) * lead - qd * theta * (T::of(9.0) * theta - T::of(24.0));
    let c = T::of(24.0) * lead
        + T::of(3.0) * qd * theta * (theta * theta - T::of(4.0) * theta + T::of(8.0));
    Ok(AbcCoefficients { a, b, c })
}

/// True when `g_L^{-1}(t) < ghat^{-1}(-t)` for every listed `L`, and the
/// inverses increase monotonically toward that bound as `L` decreases.
pub fn check_g_inverse_ordering<T: Scalar>(t: T, l_list: &[T]) -> Result<bool> {
    if !(t > T::zero() && t < T::TAU()) {
        return Err(Error::Domain(format!("t must lie in (0, 2*pi) (got {t})")));
    }
    if l_list.is_empty() {
        return Err(Error::Domain("need at least one L".to_string()));
    }
    for &l in l_list {
        if !(l > T::zero()) {
            return Err(Error::Domain(format!("every L must be > 0 (got {l})")));
        }
    }
    let bound = invert_ghat(-t, inversion_tol::<T>() * T::of(0.1))?;
    let mut sorted = l_list.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite L"));
    let mut prev = T::neg_infinity();
    for &l in &sorted {
        let inv = invert_gl(t, l, inversion_tol::<T>())?;
        if !(inv < bound && inv > prev) {
            return Ok(false);
        }
        prev = inv;
    }
    Ok(true)
}

/// True when the margin is strictly positive on a dense grid of
/// `(0, 1] x l_list` (ten thousand kappa points).
pub fn check_small_kappa_margin<T: Scalar>(l_list: &[T]) -> Result<bool> {
    if l_list.is_empty() {
        return Err(Error::Domain("need at least one L".to_string()));
    }
    Ok(small_kappa_report(l_list)?.passed)
}

fn small_kappa_report<T: Scalar>(l_list: &[T]) -> Result<SubReport<T>> {
    let n = 10_000;
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa: T::one(), l: l_list[0] };
    for &l in l_list {
        if !(l > T::zero()) {
            return Err(Error::Domain(format!("every L must be > 0 (got {l})")));
        }
        for i in 1..=n {
            let kappa = T::of(i as f64 / n as f64);
            let m = psi_minus_q(kappa, l)?;
            if m < min_margin {
                min_margin = m;
                witness = Witness { kappa, l };
            }
        }
    }
    Ok(SubReport {
        name: "small_kappa_unit_interval".to_string(),
        passed: min_margin > T::zero(),
        min_margin,
        witness,
        points: n * l_list.len(),
        note: format!("kappa in (0,1], L in {l_list:?}"),
    })
}

/// The auxiliary inequality battery attached to every scan report.
pub fn auxiliary_checks<T: Scalar>(region: &ScanRegion<T>) -> Vec<SubReport<T>> {
    vec![
        small_kappa_report(&[T::of(0.01), T::one(), T::of(100.0)]).expect("valid list"),
        below_detachment_report(region),
        zero_limit_report(region),
        mollified_chain_report(),
        abc_report(),
        ordering_report(),
        cosine_tail_report(),
        divergence_report(region),
    ]
}

/// Margin positivity on `kappa <= 1 + sqrt(2)`: contact points, if any, would
/// have to sit beyond that threshold.
fn below_detachment_report<T: Scalar>(region: &ScanRegion<T>) -> SubReport<T> {
    let k_hi = (T::one() + T::SQRT_2()).min(region.kappa_max);
    let kappas = linspace(region.kappa_min, k_hi, 200);
    let ls = linspace(region.l_min, region.l_max, 50);
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa: kappas[0], l: ls[0] };
    for &kappa in &kappas {
        for &l in &ls {
            let (m, _) = margin_at(kappa, l);
            if m < min_margin {
                min_margin = m;
                witness = Witness { kappa, l };
            }
        }
    }
    SubReport {
        name: "margin_below_1_plus_sqrt2".to_string(),
        passed: min_margin > T::zero(),
        min_margin,
        witness,
        points: kappas.len() * ls.len(),
        note: "margin on the sub-threshold band of the region".to_string(),
    }
}

/// One-sided behavior toward `kappa = 0`, where both sides tend to 1: margins
/// must stay nonnegative (within noise) and grow with `kappa`.
fn zero_limit_report<T: Scalar>(region: &ScanRegion<T>) -> SubReport<T> {
    let noise = T::of(1e-12);
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa: T::of(0.1), l: region.l_min };
    let mut monotone = true;
    for l in [region.l_min, region.l_max] {
        let mut prev = T::neg_infinity();
        for j in (1..=8).rev() {
            // kappa = 1e-8 .. 1e-1 ascending
            let kappa = T::of(10f64.powi(-j));
            let (m, _) = margin_at(kappa, l);
            if m < min_margin {
                min_margin = m;
                witness = Witness { kappa, l };
            }
            if kappa >= T::of(1e-5) && m <= prev {
                monotone = false;
            }
            prev = m;
        }
    }
    SubReport {
        name: "margin_vanishes_at_zero".to_string(),
        passed: min_margin > -noise && monotone,
        min_margin,
        witness,
        points: 16,
        note: "log-spaced kappa in [1e-8, 1e-1]; increasing for kappa >= 1e-5".to_string(),
    }
}

fn mollified_chain_report<T: Scalar>() -> SubReport<T> {
    let big_l = T::of(0.05);
    let n = 200;
    let lo = T::of(1.5) * T::PI();
    let span = T::FRAC_PI_2();
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa: T::zero(), l: big_l };
    let mut premise_holds = true;
    for i in 1..=n {
        let t = lo + span * T::of(i as f64 / (n + 1) as f64);
        let (psi_tilde, f_cos, q_tilde) = check_mollified_chain(t, big_l).expect("t in range");
        let q_hat = q_of_ghat_inverse(t).expect("t in range");
        let kappa = invert_gl(t, big_l, inversion_tol::<T>()).expect("t in range");
        if kappa <= T::one() {
            premise_holds = false;
        }
        for gap in [psi_tilde - f_cos, f_cos - q_hat, q_hat - q_tilde] {
            if gap < min_margin {
                min_margin = gap;
                witness = Witness { kappa, l: big_l };
            }
        }
    }
    SubReport {
        name: "mollified_chain".to_string(),
        passed: min_margin > T::zero() && premise_holds,
        min_margin,
        witness,
        points: n,
        note: format!(
            "psi~ > f(cos t) > q(ghat^-1(-t)) > q~ at L=0.05; premise g_L^-1(t) > 1 holds: {premise_holds}"
        ),
    }
}

fn abc_report<T: Scalar>() -> SubReport<T> {
    let n = 10_000;
    let lo = (T::one() + T::SQRT_2() + T::of(1e-6)).ln();
    let hi = T::of(1e6).ln();
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa: T::zero(), l: T::zero() };
    for i in 0..n {
        let kappa = (lo + (hi - lo) * T::of(i as f64 / (n - 1) as f64)).exp();
        let abc = check_abc_positive(kappa).expect("kappa above threshold");
        for v in [abc.a, abc.b, abc.c] {
            if v < min_margin {
                min_margin = v;
                witness = Witness { kappa, l: T::zero() };
            }
        }
    }
    SubReport {
        name: "abc_coefficients_positive".to_string(),
        passed: min_margin > T::zero(),
        min_margin,
        witness,
        points: n,
        note: "cubic coefficients on log-spaced kappa in (1+sqrt2, 1e6]".to_string(),
    }
}

fn ordering_report<T: Scalar>() -> SubReport<T> {
    let ts = [T::of(0.5), T::PI(), T::of(1.5) * T::PI(), T::of(5.5)];
    let ls = [T::of(10.0), T::one(), T::of(0.1), T::of(0.01), T::of(0.001)];
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa: T::zero(), l: ls[0] };
    let mut ordered = true;
    for &t in &ts {
        let bound = invert_ghat(-t, inversion_tol::<T>() * T::of(0.1)).expect("t in range");
        let mut prev = T::neg_infinity();
        for &l in &ls {
            let inv = invert_gl(t, l, inversion_tol::<T>()).expect("valid inputs");
            if inv <= prev {
                ordered = false;
            }
            prev = inv;
            let gap = bound - inv;
            if gap < min_margin {
                min_margin = gap;
                witness = Witness { kappa: inv, l };
            }
        }
    }
    SubReport {
        name: "g_inverse_ordering".to_string(),
        passed: min_margin > T::zero() && ordered,
        min_margin,
        witness,
        points: ts.len() * ls.len(),
        note: "g_L^-1(t) increases toward ghat^-1(-t) as L decreases".to_string(),
    }
}

fn cosine_tail_report<T: Scalar>() -> SubReport<T> {
    let n = 10_000;
    let lo = T::of(1.5) * T::PI();
    let span = T::FRAC_PI_2();
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa: T::zero(), l: T::zero() };
    for i in 1..=n {
        let t = lo + span * T::of(i as f64 / (n + 1) as f64);
        let c = t.cos();
        let v = (c - T::one()) * (c - T::one());
        if v < min_margin {
            min_margin = v;
            witness = Witness { kappa: t, l: T::zero() };
        }
    }
    SubReport {
        name: "cosine_tail_positive".to_string(),
        passed: min_margin > T::zero(),
        min_margin,
        witness,
        points: n,
        note: "(cos t - 1)^2 on (3*pi/2, 2*pi); the closing inequality of the chain".to_string(),
    }
}

/// Divergence of the margin along a doubling kappa ladder at fixed `L`.
///
/// Monotone growth is only guaranteed once `exp(L*kappa)` beats the swing of
/// the bounded cosine factor, which happens from `L*kappa >= 2` on; the
/// sequence is checked for positivity everywhere and strict growth past that
/// point.
fn divergence_report<T: Scalar>(region: &ScanRegion<T>) -> SubReport<T> {
    let big_l = region.l_min;
    let mut kappa = T::of(10.0);
    let mut min_margin = T::infinity();
    let mut witness = Witness { kappa, l: big_l };
    let mut prev_ln = T::neg_infinity();
    let mut monotone = true;
    let mut final_lk = T::zero();
    for _ in 0..60 {
        let (m, _) = margin_at(kappa, big_l);
        let psi = eval_psi(kappa, big_l).expect("valid");
        if m < min_margin {
            min_margin = m;
            witness = Witness { kappa, l: big_l };
        }
        let lk = big_l * kappa;
        if lk >= T::of(2.0) && psi.ln_value <= prev_ln {
            monotone = false;
        }
        prev_ln = psi.ln_value;
        final_lk = lk;
        if lk > T::of(40.0) {
            break;
        }
        kappa = kappa + kappa;
    }
    SubReport {
        name: "psi_divergence".to_string(),
        passed: min_margin > T::zero() && monotone && final_lk > T::of(20.0),
        min_margin,
        witness,
        points: 0,
        note: format!("doubling ladder from kappa=10 at L={big_l}"),
    }
}
