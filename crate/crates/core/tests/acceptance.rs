//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex;
use rustfft::FftPlanner;
use xz_dressing::adiabatic::adiabatic_expectations;
use xz_dressing::analysis::{
    estimate_from_trace, estimate_rabi_like_period, find_quasi_period, fold_to_floquet_zone, suppressed_intervals,
    FreqEstimate, FrequencyConvention, QuasiPeriod, RabiLike, SampledTrace,
};
use xz_dressing::floquet::{fourier_f, fourier_h, frame_angle, propagate_floquet, ExpansionOrder, FrameSpec};
use xz_dressing::presets::{self, PRESETS};
use xz_dressing::propagator::{evolve_on_grid, prepare_sigma_x_eigenstate, reduced_time_grid};
use xz_dressing::{DetectionAxis, DriveField, DriveParams, Mat2, Regime, RotatingXzParams, Tolerances, Trajectory};

type P = DriveParams<f64>;

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} {id:<4} {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn preset(name: &str) -> P {
    presets::find(name).expect("preset").params().expect("preset params")
}

fn exact(p: &P, tau: (f64, f64), spp: usize, tol: Tolerances<f64>) -> Trajectory<f64> {
    let grid = reduced_time_grid(p, tau.0, tau.1, spp).unwrap();
    evolve_on_grid(*p, prepare_sigma_x_eigenstate(), grid, tol).unwrap()
}

fn tight() -> Tolerances<f64> {
    Tolerances::new(1e-12, 1e-14).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ")
}

fn criterion_1(r: &mut Report) {
    for pr in PRESETS.iter() {
        let start = Instant::now();
        let p: P = pr.params().unwrap();
        let traj = exact(&p, (0.0, 15.0), 512, Tolerances::default());
        let secs = start.elapsed().as_secs_f64();
        let norm = traj.states.iter().map(|s| (s.norm_sqr() - 1.0).abs()).fold(0.0, f64::max);
        let purity = traj
            .samples
            .iter()
            .map(|s| (s.sx * s.sx + s.sy * s.sy + s.sz * s.sz - 1.0).abs())
            .fold(0.0, f64::max);
        r.record(
            "1",
            norm <= 1e-9 && purity <= 1e-9 && secs < 2.0,
            format!("unitarity {:<6} norm {norm:.2e} purity {purity:.2e} in {secs:.2}s", pr.name),
        );
    }
}

/// fig2c revival period (τ) and confidence on the given axis.
fn revival(p: &P, axis: DetectionAxis) -> QuasiPeriod<f64> {
    let traj = exact(p, (0.0, 9.0), 512, Tolerances::default());
    let trace = SampledTrace::from_trajectory(&traj, axis).unwrap();
    find_quasi_period(&trace, 6.0 / p.omega(), p.omega()).unwrap()
}

fn criterion_2(r: &mut Report) -> Option<f64> {
    let p = preset("fig2c");
    let start = Instant::now();
    let qx = revival(&p, DetectionAxis::X);
    let secs = start.elapsed().as_secs_f64();
    let qy = revival(&p, DetectionAxis::Y);
    let period = qx.period_tau();
    let pass = period.is_some_and(|v| (v - 3.00).abs() <= 0.05) && qx.confidence() >= 0.8 && secs < 5.0;
    r.record(
        "2",
        pass,
        format!(
            "fig2c revival x-axis {:?} conf {:.3} (y-axis {:?} conf {:.3}), target 3.00±0.05 in {secs:.2}s",
            period,
            qx.confidence(),
            qy.period_tau(),
            qy.confidence()
        ),
    );
    period
}

fn rabi_fig5(p: &P) -> RabiLike<f64> {
    let traj = exact(p, (0.0, 30.0), 256, Tolerances::default());
    let trace = SampledTrace::occupation_from_trajectory(&traj).unwrap();
    estimate_rabi_like_period(&trace, p.omega(), 10.0 / p.omega()).unwrap()
}

fn criterion_3(r: &mut Report) -> Option<(f64, f64)> {
    let p = preset("fig5");
    let start = Instant::now();
    let res = rabi_fig5(&p);
    let secs = start.elapsed().as_secs_f64();
    let out = res.period_tau().zip(res.frequency());
    let pass = out.is_some_and(|(tau, f)| (tau - 4.61).abs() <= 0.10 && (f - 0.213).abs() <= 0.010) && secs < 5.0;
    r.record(
        "3",
        pass,
        format!("fig5 Rabi-like period/frequency {out:?}, target 4.61±0.10 τ and 0.213±0.010 kHz in {secs:.2}s"),
    );
    out
}

fn criterion_4(r: &mut Report) {
    for name in ["fig4a", "fig4b", "fig4c", "fig4d"] {
        let p = preset(name);
        let traj = exact(&p, (0.0, 6.0), 256, Tolerances::default());
        let trace = SampledTrace::from_trajectory(&traj, DetectionAxis::Y).unwrap();
        let est = estimate_from_trace(&trace, FrequencyConvention::HalfPeriod).unwrap();
        let within = est
            .iter()
            .filter(|e| (e.f_ld - p.dressed_larmor(e.t_mid) / TAU).abs() <= e.uncertainty)
            .count();
        let frac = within as f64 / est.len() as f64;
        r.record(
            "4",
            frac >= 0.9,
            format!("{name} overlay {within}/{} = {frac:.3} within uncertainty (need >= 0.9)", est.len()),
        );
        if name == "fig4a" {
            let (dispersion, rms_unc) = folded_dispersion(&est, p.period());
            r.record(
                "4",
                dispersion < 2.0 * rms_unc,
                format!("fig4a fold dispersion {dispersion:.4} kHz vs 2×RMS uncertainty {:.4} kHz", 2.0 * rms_unc),
            );
        }
    }
}

/// Pooled within-bin standard deviation (bins of 1/64 drive period) and RMS uncertainty.
fn folded_dispersion(est: &[FreqEstimate<f64>], period: f64) -> (f64, f64) {
    const BINS: usize = 64;
    let folded = fold_to_floquet_zone(est, period).unwrap();
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); BINS];
    for f in &folded {
        let k = ((f.tau_folded * BINS as f64) as usize).min(BINS - 1);
        bins[k].push(f.estimate.f_ld);
    }
    let (mut ss, mut dof) = (0.0, 0usize);
    for b in bins.iter().filter(|b| b.len() > 1) {
        let m = b.iter().sum::<f64>() / b.len() as f64;
        ss += b.iter().map(|v| (v - m).powi(2)).sum::<f64>();
        dof += b.len() - 1;
    }
    let dispersion = if dof > 0 { (ss / dof as f64).sqrt() } else { 0.0 };
    let rms = (est.iter().map(|e| e.uncertainty.powi(2)).sum::<f64>() / est.len() as f64).sqrt();
    (dispersion, rms)
}

struct Fig4d {
    period_tau: Option<f64>,
    cycles: usize,
    cycles_with_gap: usize,
    coherence_period: Option<f64>,
}

fn fig4d_analysis(p: &P) -> Fig4d {
    let span = 30.0;
    let traj = exact(p, (0.0, span), 512, Tolerances::default());
    let max_lag = 10.0 / p.omega();
    let occupation = SampledTrace::occupation_from_trajectory(&traj).unwrap();
    let period_tau = estimate_rabi_like_period(&occupation, p.omega(), max_lag).unwrap().period_tau();
    let coherence: Vec<f64> = traj.samples.iter().map(|s| s.sx.hypot(s.sy)).collect();
    let coherence = SampledTrace::from_times(&traj.grid, coherence, "coherence").unwrap();
    let coherence_period = estimate_rabi_like_period(&coherence, p.omega(), max_lag).unwrap().period_tau();

    let trace = SampledTrace::from_trajectory(&traj, DetectionAxis::Y).unwrap();
    let est = estimate_from_trace(&trace, FrequencyConvention::HalfPeriod).unwrap();
    let gaps = suppressed_intervals(&est, 0.2, 0.5 * p.period());
    let (mut cycles, mut cycles_with_gap) = (0, 0);
    if let Some(slow) = period_tau {
        cycles = (span / slow).floor() as usize;
        for k in 0..cycles {
            let (a, b) = (k as f64 * slow, (k + 1) as f64 * slow);
            if gaps.iter().any(|&(s, e)| p.reduced_time(e) >= a && p.reduced_time(s) < b) {
                cycles_with_gap += 1;
            }
        }
    }
    Fig4d {
        period_tau,
        cycles,
        cycles_with_gap,
        coherence_period,
    }
}

fn criterion_5(r: &mut Report) -> Option<f64> {
    let p = preset("fig4d");
    let res = fig4d_analysis(&p);
    r.record(
        "5",
        res.cycles > 0 && res.cycles_with_gap == res.cycles,
        format!("fig4d suppressed-estimate interval in {}/{} slow cycles", res.cycles_with_gap, res.cycles),
    );
    r.record(
        "5",
        res.period_tau.is_some_and(|v| (v - 4.13).abs() <= 0.10),
        format!(
            "fig4d slow period (P+) {:?}, target 4.13±0.10 τ (coherence amplitude {:?})",
            res.period_tau, res.coherence_period
        ),
    );
    res.period_tau
}

fn criterion_6(r: &mut Report) {
    let a = preset("fig2a").classify_adiabaticity();
    let b = preset("fig3").classify_adiabaticity();
    r.record(
        "6",
        a.regime == Regime::Adiabatic && b.regime == Regime::Nonadiabatic,
        format!("classifier fig2a {:?}, fig3 {:?}", a.regime, b.regime),
    );
}

/// Max |Δsy| between closed form and exact propagation over τ ∈ [0, 1].
fn rotating_sy_error(m: f64, omega: f64) -> f64 {
    let p = RotatingXzParams::new(omega, 4.0, 4.0 / m, PI / 2.0).unwrap();
    let grid = reduced_time_grid(&p, 0.0, 1.0, 512).unwrap();
    let tau: Vec<f64> = grid.iter().map(|&t| p.reduced_time(t)).collect();
    let sol = adiabatic_expectations(&p, &tau, 1e-12).unwrap();
    let traj = evolve_on_grid(p, prepare_sigma_x_eigenstate(), grid, tight()).unwrap();
    let sy: Vec<f64> = traj.samples.iter().map(|s| s.sy).collect();
    max_abs_diff(&sol.sy, &sy)
}

/// Frozen from the exact oracle; rows are m = 3, 5, 10 and columns ω = 2, 1, 0.5, 0.25 kHz.
const ROTATING_REGRESSION: [[f64; 4]; 3] = [
    [3.526283976672008e-1, 1.364114493960518e-1, 5.402890557340617e-2, 2.234494682743034e-2],
    [1.116350525929510e-1, 3.217781154904240e-2, 1.306666356087571e-2, 6.141060826816661e-3],
    [2.306736605391524e-2, 6.403727069881654e-3, 2.950195138643197e-3, 1.445187222845395e-3],
];

fn criterion_7(r: &mut Report) {
    for (row, m) in [3.0, 5.0, 10.0].into_iter().enumerate() {
        let errs: Vec<f64> = [2.0, 1.0, 0.5, 0.25].iter().map(|&w| rotating_sy_error(m, w)).collect();
        let monotone = errs.windows(2).all(|w| w[1] < w[0]);
        let frozen = ROTATING_REGRESSION[row];
        let drift = errs.iter().zip(frozen).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        r.record(
            "7",
            monotone && drift <= 1e-8,
            format!("rotating m={m} max|Δsy| [{}] (regression drift {drift:.1e})", sci(&errs)),
        );
    }
}

fn criterion_8a(r: &mut Report) {
    const N: usize = 1024;
    let p = preset("fig3");
    let spec = FrameSpec::for_params(&p).unwrap();
    let period = p.period();
    let mut buf: Vec<Complex<f64>> = (0..N)
        .map(|k| {
            let t = period * k as f64 / N as f64;
            let chi = frame_angle(&p, &spec, t);
            Complex::from_polar(2.0 * (p.drive_angular() * t).cos(), chi)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(N).process(&mut buf);
    let n_max = spec.n_max as i64;
    let err = (-n_max..=n_max)
        .map(|n| {
            let fft = buf[n.rem_euclid(N as i64) as usize] / N as f64;
            (fourier_f(&p, &spec, n) - fft).norm()
        })
        .fold(0.0, f64::max);
    r.record("8a", err <= 1e-10, format!("fourier_f vs FFT (N={N}) max error {err:.2e}"));
}

fn criterion_8b(r: &mut Report) {
    let p = preset("fig3");
    let spec = FrameSpec::for_params(&p).unwrap();
    let fc = fourier_h(&p, &spec);
    let w = p.drive_angular();
    let z = p.omega_z() / p.omega();
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let err = (1..=64)
        .map(|k| {
            let t = (k as f64 * golden).fract() * p.period();
            let chi = frame_angle(&p, &spec, t);
            let chi_dot = spec.r as f64 * w + z * w * (w * t + p.phi0z()).cos();
            let frame = Mat2::rotation_z(chi);
            let direct = frame.adjoint() * p.hamiltonian(t) * frame - Mat2::sigma_z().scale_real(0.5 * chi_dot);
            direct.max_abs_diff(&fc.reconstruct(t))
        })
        .fold(0.0, f64::max);
    r.record("8b", err <= 1e-9, format!("Σ H_n e^(inωt) vs frame-transformed H at 64 times, max error {err:.2e}"));
}

fn criterion_8c(r: &mut Report) {
    let p = preset("fig3");
    let spec = FrameSpec::for_params(&p).unwrap();
    let grid = reduced_time_grid(&p, 0.0, 8.0, 512).unwrap();
    let reference = evolve_on_grid(p, prepare_sigma_x_eigenstate(), grid.clone(), tight()).unwrap();
    let sx_ref: Vec<f64> = reference.samples.iter().map(|s| s.sx).collect();
    let dev = |order| {
        let traj = propagate_floquet(&p, &spec, prepare_sigma_x_eigenstate(), grid.clone(), order).unwrap();
        let sx: Vec<f64> = traj.samples.iter().map(|s| s.sx).collect();
        max_abs_diff(&sx, &sx_ref)
    };
    let (d1, d2) = (dev(ExpansionOrder::First), dev(ExpansionOrder::Second));
    r.record(
        "8c",
        d2 < d1,
        format!("fig3 max|Δsx| order 1 {d1:.4e}, order 2 {d2:.4e} (δ/ω = {:.3})", spec.delta / p.omega()),
    );
}

fn criterion_8d(r: &mut Report) {
    let p = preset("fig3").with_omega_x(0.0).unwrap();
    let spec = FrameSpec::for_params(&p).unwrap();
    let grid = reduced_time_grid(&p, 0.0, 8.0, 512).unwrap();
    let reference = evolve_on_grid(p, prepare_sigma_x_eigenstate(), grid.clone(), tight()).unwrap();
    let traj = propagate_floquet(&p, &spec, prepare_sigma_x_eigenstate(), grid, ExpansionOrder::Second).unwrap();
    let err = traj
        .samples
        .iter()
        .zip(&reference.samples)
        .map(|(a, b)| (a.sx - b.sx).abs().max((a.sy - b.sy).abs()).max((a.sz - b.sz).abs()))
        .fold(0.0, f64::max);
    r.record("8d", err <= 1e-8, format!("Ωx = 0 Floquet vs exact max Bloch error {err:.2e}"));
}

/// Carlson symmetric integral R_F.
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    loop {
        let mu = (x + y + z) / 3.0;
        let (dx, dy, dz) = (1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu);
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
    }
}

/// Carlson symmetric integral R_D.
fn carlson_rd(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    let (mut sum, mut fac) = (0.0, 1.0);
    loop {
        let mu = (x + y + 3.0 * z) / 5.0;
        let (dx, dy, dz) = (1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu);
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            let s = 1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
                + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea));
            return 3.0 * sum + fac * s / (mu * mu.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac /= 4.0;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
    }
}

/// Incomplete elliptic integral of the second kind E(φ | m), any real φ.
fn ellipeinc(phi: f64, m: f64) -> f64 {
    let k = (phi / PI).round();
    let red = phi - k * PI;
    let (s, c) = red.sin_cos();
    let y = 1.0 - m * s * s;
    let partial = s * carlson_rf(c * c, y, 1.0) - m / 3.0 * s.powi(3) * carlson_rd(c * c, y, 1.0);
    let complete = carlson_rf(0.0, 1.0 - m, 1.0) - m / 3.0 * carlson_rd(0.0, 1.0 - m, 1.0);
    partial + 2.0 * k * complete
}

fn criterion_9(r: &mut Report) {
    let checks = [
        (ellipeinc(1.0, 0.5), 0.927_329_883_624_44),
        (ellipeinc(3.0, 0.8), 2.215_765_083_078_099),
    ];
    let oracle_ok = checks.iter().all(|(a, b)| (a - b).abs() < 1e-12);
    let mut worst: f64 = 0.0;
    for m in [2.0, 5.0] {
        let (omega, omega0z, phi) = (1.0, 4.0, PI / 2.0);
        let rabi = omega0z / m;
        let p = RotatingXzParams::new(omega, omega0z, rabi, phi).unwrap();
        let k2 = 4.0 * m / (1.0 + m).powi(2);
        for tau in [0.25, 0.5, 1.0] {
            let quad = p.accumulated_phase(p.time_from_reduced(tau), 1e-10);
            let (u0, u1) = (phi / 2.0, (TAU * tau + phi) / 2.0);
            let closed = 2.0 * (rabi / omega) * (1.0 + m) * (ellipeinc(u1, k2) - ellipeinc(u0, k2));
            worst = worst.max((quad - closed).abs());
        }
    }
    r.record(
        "9",
        oracle_ok && worst <= 1e-9,
        format!("phase quadrature vs elliptic closed form max error {worst:.2e} (oracle self-check {oracle_ok})"),
    );
}

fn criterion_10(r: &mut Report, base2: Option<f64>, base3: Option<(f64, f64)>, base5: Option<f64>) {
    const C: f64 = 10.0;
    let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= 1e-6 * a.abs().max(1.0),
        (None, None) => true,
        _ => false,
    };
    let p2 = preset("fig2c").scaled(C).unwrap();
    let s2 = revival(&p2, DetectionAxis::X).period_tau();
    let p3 = preset("fig5").scaled(C).unwrap();
    let res3 = rabi_fig5(&p3);
    let s3 = res3.period_tau().zip(res3.frequency().map(|f| f / C));
    let p5 = preset("fig4d").scaled(C).unwrap();
    let s5 = fig4d_analysis(&p5).period_tau;
    let ok3 = close(base3.map(|v| v.0), s3.map(|v| v.0)) && close(base3.map(|v| v.1), s3.map(|v| v.1));
    r.record(
        "10",
        close(base2, s2) && ok3 && close(base5, s5),
        format!("×{C} scaling: c2 {base2:?}→{s2:?}, c3 {base3:?}→{s3:?} (f/{C}), c5 {base5:?}→{s5:?}"),
    );
}

fn main() {
    let mut r = Report { failures: 0 };
    criterion_1(&mut r);
    let c2 = criterion_2(&mut r);
    let c3 = criterion_3(&mut r);
    criterion_4(&mut r);
    let c5 = criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8a(&mut r);
    criterion_8b(&mut r);
    criterion_8c(&mut r);
    criterion_8d(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r, c2, c3, c5);
    if r.failures > 0 {
        println!("{} acceptance check(s) failed", r.failures);
        std::process::exit(1);
    }
    println!("all acceptance checks passed");
}
