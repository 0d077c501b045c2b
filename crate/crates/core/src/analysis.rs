//! LZSM time-series analysis: zero crossings, instantaneous dressed frequency,
//! Floquet-zone folding, revival detection and slow-envelope periods.
//!
//! Times are in ms and frequencies in ordinary kHz unless noted. Functions
//! that report reduced time take the drive frequency explicitly, so they work
//! on external traces as well as simulated ones.

use crate::error::{invalid, Error, Result};
use crate::propagator::{projected_signal, DetectionAxis, Trajectory};
use crate::scalar::Real;

/// Crossings closer than this many sample intervals are merged.
pub const MERGE_FRACTION: f64 = 0.25;

/// Minimum normalised autocorrelation accepted as a revival.
pub const REVIVAL_THRESHOLD: f64 = 0.5;

/// Peaks whose autocorrelation is within this margin of the best one count as
/// ties; the shortest lag among them wins.
pub const PEAK_TIE_MARGIN: f64 = 0.02;

/// Uniformly sampled real signal.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTrace<T> {
    /// Sampling rate in kHz (samples per ms).
    pub sample_rate: T,
    pub values: Vec<T>,
    /// Time of the first sample, ms.
    pub t0: T,
    pub label: String,
}

impl<T: Real> SampledTrace<T> {
    pub fn new(sample_rate: T, values: Vec<T>, t0: T, label: impl Into<String>) -> Result<Self> {
        if !(sample_rate > T::zero()) || !sample_rate.is_finite() {
            return Err(invalid("sample_rate", format!("must be > 0, got {sample_rate}")));
        }
        if values.len() < 4 {
            return Err(Error::InsufficientData(format!(
                "trace needs at least 4 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "trace contains non-finite samples".to_string()));
        }
        Ok(Self {
            sample_rate,
            values,
            t0,
            label: label.into(),
        })
    }

    /// Builds a trace from explicit sample times, which must be uniform to
    /// within 1e-6 of the mean spacing.
    pub fn from_times(times: &[T], values: Vec<T>, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("times", "length differs from values".to_string()));
        }
        if times.len() < 4 {
            return Err(Error::InsufficientData(format!(
                "trace needs at least 4 samples, got {}",
                times.len()
            )));
        }
        let n = times.len();
        let dt = (times[n - 1] - times[0]) / T::from_usize_lossy(n - 1);
        if !(dt > T::zero()) {
            return Err(invalid("times", "must be increasing".to_string()));
        }
        let tol = dt * T::lit(1e-6);
        let uniform = times
            .iter()
            .enumerate()
            .all(|(k, &t)| (t - (times[0] + dt * T::from_usize_lossy(k))).abs() <= tol.max(t.abs() * T::epsilon() * T::lit(8.0)));
        if !uniform {
            return Err(invalid("times", "sampling must be uniform".to_string()));
        }
        Self::new(T::one() / dt, values, times[0], label)
    }

    /// Transverse component of a trajectory as a polarimeter-style trace.
    pub fn from_trajectory(traj: &Trajectory<T>, axis: DetectionAxis) -> Result<Self> {
        let label = match axis {
            DetectionAxis::X => "sx",
            DetectionAxis::Y => "sy",
        };
        Self::from_times(&traj.grid, projected_signal(traj, axis), label)
    }

    /// `P₊` along a trajectory.
    pub fn occupation_from_trajectory(traj: &Trajectory<T>) -> Result<Self> {
        let v = traj.samples.iter().map(|s| s.p_plus).collect();
        Self::from_times(&traj.grid, v, "p_plus")
    }

    pub fn sample_interval(&self) -> T {
        T::one() / self.sample_rate
    }

    pub fn time(&self, k: usize) -> T {
        self.t0 + T::from_usize_lossy(k) * self.sample_interval()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.len() - 1) * self.sample_interval()
    }
}

/// Zero crossings by linear interpolation between bracketing samples.
///
/// Samples that are exactly zero count as a crossing only when the signal
/// changes sign across them. Crossings closer than a quarter sample are merged.
pub fn detect_zero_crossings<T: Real>(trace: &SampledTrace<T>) -> Vec<T> {
    let v = &trace.values;
    let dt = trace.sample_interval();
    let mut raw = Vec::new();
    let mut k = 0;
    while k + 1 < v.len() {
        let (a, b) = (v[k], v[k + 1]);
        if a == T::zero() {
            k += 1;
            continue;
        }
        if a * b < T::zero() {
            let frac = a / (a - b);
            raw.push(trace.time(k) + frac * dt);
        } else if b == T::zero() {
            // Skip over the run of zeros and compare signs on both sides.
            let mut j = k + 1;
            while j < v.len() && v[j] == T::zero() {
                j += 1;
            }
            if j < v.len() && a * v[j] < T::zero() {
                let mid = (trace.time(k + 1) + trace.time(j - 1)) * T::lit(0.5);
                raw.push(mid);
            }
            k = j;
            continue;
        }
        k += 1;
    }
    merge_close(raw, dt * T::lit(MERGE_FRACTION))
}

fn merge_close<T: Real>(raw: Vec<T>, min_gap: T) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(raw.len());
    let mut cluster: Vec<T> = Vec::new();
    for t in raw {
        if let Some(&last) = cluster.last() {
            if t - last < min_gap {
                cluster.push(t);
                continue;
            }
            out.push(mean(&cluster));
            cluster.clear();
        }
        cluster.push(t);
    }
    if !cluster.is_empty() {
        out.push(mean(&cluster));
    }
    out
}

fn mean<T: Real>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
}

/// How the interval between consecutive zeros maps to a frequency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyConvention {
    /// Consecutive zeros are half a precession apart: `f = 1/(2Δt)` kHz.
    HalfPeriod,
    /// The literal `2π/Δt`, kept for comparison (rad/ms).
    PaperVerbatim,
}

/// One dressed-frequency estimate between consecutive zero crossings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreqEstimate<T> {
    /// Midpoint of the two crossings, ms.
    pub t_mid: T,
    pub f_ld: T,
    /// One-sample timing jitter propagated to the frequency.
    pub uncertainty: T,
    /// Peak `|signal|` between the two crossings, when a trace is available.
    pub amplitude: Option<T>,
}

/// Frequency estimates from consecutive crossing pairs.
pub fn estimate_dressed_frequency<T: Real>(
    crossings: &[T],
    sample_interval: T,
    convention: FrequencyConvention,
) -> Result<Vec<FreqEstimate<T>>> {
    if crossings.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 zero crossings, found {}",
            crossings.len()
        )));
    }
    Ok(crossings
        .windows(2)
        .map(|w| {
            let gap = w[1] - w[0];
            let f_ld = match convention {
                FrequencyConvention::HalfPeriod => T::one() / (gap + gap),
                FrequencyConvention::PaperVerbatim => T::TAU() / gap,
            };
            FreqEstimate {
                t_mid: (w[0] + w[1]) * T::lit(0.5),
                f_ld,
                uncertainty: f_ld * sample_interval / gap,
                amplitude: None,
            }
        })
        .collect())
}

/// Crossings plus frequency estimates with the signal amplitude attached.
pub fn estimate_from_trace<T: Real>(
    trace: &SampledTrace<T>,
    convention: FrequencyConvention,
) -> Result<Vec<FreqEstimate<T>>> {
    let crossings = detect_zero_crossings(trace);
    let mut est = estimate_dressed_frequency(&crossings, trace.sample_interval(), convention)?;
    let dt = trace.sample_interval();
    let n = trace.len();
    for (e, w) in est.iter_mut().zip(crossings.windows(2)) {
        let lo = ((w[0] - trace.t0) / dt).ceil().to_usize().unwrap_or(0).min(n - 1);
        let hi = ((w[1] - trace.t0) / dt).floor().to_usize().unwrap_or(0).min(n - 1);
        let peak = if hi >= lo {
            trace.values[lo..=hi].iter().fold(T::zero(), |m, v| m.max(v.abs()))
        } else {
            T::zero()
        };
        e.amplitude = Some(peak);
    }
    Ok(est)
}

/// An estimate with its reduced and folded times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldedEstimate<T> {
    pub estimate: FreqEstimate<T>,
    pub tau_mid: T,
    /// `tau_mid` mapped into `[0, 1)`.
    pub tau_folded: T,
}

/// `t/period` reduced modulo 1 into `[0, 1)`.
pub fn fold_reduced_time<T: Real>(t: T, period: T) -> T {
    let x = t / period;
    let f = x - x.floor();
    if f >= T::one() {
        T::zero()
    } else {
        f
    }
}

/// Maps each estimate's midpoint into a single drive period.
pub fn fold_to_floquet_zone<T: Real>(estimates: &[FreqEstimate<T>], period: T) -> Result<Vec<FoldedEstimate<T>>> {
    if !(period > T::zero()) {
        return Err(invalid("period", format!("must be > 0, got {period}")));
    }
    Ok(estimates
        .iter()
        .map(|e| FoldedEstimate {
            estimate: *e,
            tau_mid: e.t_mid / period,
            tau_folded: fold_reduced_time(e.t_mid, period),
        })
        .collect())
}

/// Pearson correlation of the trace with itself shifted by `lag` samples.
fn lag_correlation<T: Real>(v: &[T], lag: usize) -> T {
    let n = v.len() - lag;
    let (a, b) = (&v[..n], &v[lag..]);
    let nf = T::from_usize_lossy(n);
    let ma = a.iter().copied().sum::<T>() / nf;
    let mb = b.iter().copied().sum::<T>() / nf;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    let denom = (saa * sbb).sqrt();
    if denom > T::zero() {
        sab / denom
    } else {
        T::zero()
    }
}

/// Normalised autocorrelation for lags `0..=max_lag` samples.
pub fn autocorrelation<T: Real>(values: &[T], max_lag: usize) -> Vec<T> {
    let max_lag = max_lag.min(values.len().saturating_sub(2));
    (0..=max_lag).map(|l| lag_correlation(values, l)).collect()
}

/// A local autocorrelation maximum, with the lag refined by a parabola.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Peak<T> {
    lag: T,
    value: T,
}

fn acf_peaks<T: Real>(acf: &[T]) -> Vec<Peak<T>> {
    let mut peaks = Vec::new();
    for l in 1..acf.len().saturating_sub(1) {
        let (a, b, c) = (acf[l - 1], acf[l], acf[l + 1]);
        if b > a && b >= c {
            let curv = a - b - b + c;
            let shift = if curv < T::zero() {
                (a - c) / (curv + curv)
            } else {
                T::zero()
            };
            let value = b - (a - c) * shift * T::lit(0.25);
            peaks.push(Peak {
                lag: T::from_usize_lossy(l) + shift,
                value,
            });
        }
    }
    peaks
}

/// Outcome of a revival search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuasiPeriod<T> {
    Found {
        /// Period in reduced time.
        period_tau: T,
        /// Normalised autocorrelation at that lag.
        confidence: T,
    },
    /// No secondary maximum above the threshold; carries the best value seen.
    NoRevival { best_confidence: T },
}

impl<T: Real> QuasiPeriod<T> {
    pub fn period_tau(&self) -> Option<T> {
        match self {
            QuasiPeriod::Found { period_tau, .. } => Some(*period_tau),
            QuasiPeriod::NoRevival { .. } => None,
        }
    }

    pub fn confidence(&self) -> T {
        match self {
            QuasiPeriod::Found { confidence, .. } => *confidence,
            QuasiPeriod::NoRevival { best_confidence } => *best_confidence,
        }
    }
}

/// Largest usable lag: at least a quarter of the trace must overlap.
fn lag_budget(n: usize, max_lag_samples: usize) -> usize {
    let min_overlap = (n / 4).max(8);
    max_lag_samples.min(n.saturating_sub(min_overlap))
}

fn dominant_peak<T: Real>(values: &[T], max_lag_samples: usize) -> (Option<Peak<T>>, T) {
    let acf = autocorrelation(values, lag_budget(values.len(), max_lag_samples));
    let peaks = acf_peaks(&acf);
    let best = peaks.iter().map(|p| p.value).fold(T::neg_infinity(), T::max);
    if peaks.is_empty() {
        return (None, T::zero());
    }
    let margin = T::lit(PEAK_TIE_MARGIN);
    let chosen = peaks.into_iter().find(|p| p.value >= best - margin);
    (chosen, best)
}

/// Dominant nonzero-lag autocorrelation maximum of a trace, in reduced time.
///
/// `max_lag` is in ms; `drive_khz` converts the lag to drive periods.
pub fn find_quasi_period<T: Real>(trace: &SampledTrace<T>, max_lag: T, drive_khz: T) -> Result<QuasiPeriod<T>> {
    if !(drive_khz > T::zero()) {
        return Err(invalid("drive_khz", format!("must be > 0, got {drive_khz}")));
    }
    if !(max_lag > T::zero()) {
        return Err(invalid("max_lag", format!("must be > 0, got {max_lag}")));
    }
    let max_samples = (max_lag * trace.sample_rate).floor().to_usize().unwrap_or(0);
    let (peak, best) = dominant_peak(&trace.values, max_samples);
    Ok(match peak {
        Some(p) if p.value >= T::lit(REVIVAL_THRESHOLD) => QuasiPeriod::Found {
            period_tau: p.lag / trace.sample_rate * drive_khz,
            confidence: p.value,
        },
        _ => QuasiPeriod::NoRevival {
            best_confidence: best.max(T::zero()),
        },
    })
}

/// Result of the slow-envelope period search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RabiLike<T> {
    Found {
        period_tau: T,
        /// Same units as the drive frequency passed in (kHz).
        frequency: T,
        confidence: T,
    },
    NoOscillation,
}

impl<T: Real> RabiLike<T> {
    pub fn period_tau(&self) -> Option<T> {
        match self {
            RabiLike::Found { period_tau, .. } => Some(*period_tau),
            RabiLike::NoOscillation => None,
        }
    }

    pub fn frequency(&self) -> Option<T> {
        match self {
            RabiLike::Found { frequency, .. } => Some(*frequency),
            RabiLike::NoOscillation => None,
        }
    }
}

/// Centered moving average, keeping only fully covered samples.
fn boxcar_valid<T: Real>(v: &[T], width: usize) -> Vec<T> {
    if width <= 1 || v.len() < width {
        return if width <= 1 { v.to_vec() } else { Vec::new() };
    }
    let w = T::from_usize_lossy(width);
    let mut acc: T = v[..width].iter().copied().sum();
    let mut out = Vec::with_capacity(v.len() - width + 1);
    out.push(acc / w);
    for k in width..v.len() {
        acc += v[k] - v[k - width];
        out.push(acc / w);
    }
    out
}

/// Slow envelope of a trace: mean removed, then three cascaded moving
/// averages each spanning two drive periods (first zero at `ω/2`).
///
/// Returns the envelope and the number of samples trimmed from each end.
pub fn slow_envelope<T: Real>(trace: &SampledTrace<T>, drive_khz: T) -> (Vec<T>, usize) {
    let per_period = trace.sample_rate / drive_khz;
    // An even width shifts the output by half a sample, which does not
    // matter for period estimation.
    let width = (per_period * T::lit(2.0)).round().to_usize().unwrap_or(1).max(1);
    let m = mean(&trace.values);
    let mut v: Vec<T> = trace.values.iter().map(|&x| x - m).collect();
    for _ in 0..3 {
        v = boxcar_valid(&v, width);
    }
    (v, 3 * (width - 1) / 2)
}

/// Rabi-like period of an occupation (or amplitude) trace.
///
/// The trace should span at least two slow periods; `max_lag` is in ms.
pub fn estimate_rabi_like_period<T: Real>(trace: &SampledTrace<T>, drive_khz: T, max_lag: T) -> Result<RabiLike<T>> {
    if !(drive_khz > T::zero()) {
        return Err(invalid("drive_khz", format!("must be > 0, got {drive_khz}")));
    }
    let (env, _) = slow_envelope(trace, drive_khz);
    if env.len() < 8 {
        return Err(Error::InsufficientData(
            "trace too short for the slow-envelope filter (needs > 6 drive periods)".to_string(),
        ));
    }
    let spread = env.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let scale = trace.values.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::min_positive_value());
    if spread <= scale * T::lit(1e-9) {
        return Ok(RabiLike::NoOscillation);
    }
    let max_samples = (max_lag * trace.sample_rate).floor().to_usize().unwrap_or(0);
    let (peak, _) = dominant_peak(&env, max_samples);
    Ok(match peak {
        Some(p) if p.value >= T::lit(REVIVAL_THRESHOLD) => {
            let period_tau = p.lag / trace.sample_rate * drive_khz;
            RabiLike::Found {
                period_tau,
                frequency: drive_khz / period_tau,
                confidence: p.value,
            }
        }
        _ => RabiLike::NoOscillation,
    })
}

/// Intervals (ms) where estimates are missing or the signal is faint.
///
/// An interval is reported when consecutive estimates are more than
/// `max_gap` apart, or for runs of estimates whose amplitude is below
/// `min_amplitude`.
pub fn suppressed_intervals<T: Real>(estimates: &[FreqEstimate<T>], min_amplitude: T, max_gap: T) -> Vec<(T, T)> {
    let mut out: Vec<(T, T)> = Vec::new();
    let push = |a: T, b: T, out: &mut Vec<(T, T)>| match out.last_mut() {
        Some(last) if a <= last.1 => last.1 = last.1.max(b),
        _ => out.push((a, b)),
    };
    let faint = |e: &FreqEstimate<T>| e.amplitude.is_some_and(|a| a < min_amplitude);
    let mut k = 0;
    while k < estimates.len() {
        if faint(&estimates[k]) {
            let start = k;
            while k + 1 < estimates.len() && faint(&estimates[k + 1]) {
                k += 1;
            }
            push(estimates[start].t_mid, estimates[k].t_mid, &mut out);
        }
        if k + 1 < estimates.len() && estimates[k + 1].t_mid - estimates[k].t_mid > max_gap {
            push(estimates[k].t_mid, estimates[k + 1].t_mid, &mut out);
        }
        k += 1;
    }
    out
}
