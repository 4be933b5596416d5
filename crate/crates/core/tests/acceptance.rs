//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL but do not fail
//! the run; every other FAIL does, and so does a known failure that starts
//! passing (the list must then be updated).

use std::time::{Duration, Instant};

use num_complex::Complex64;
use polariton_core::bath::{rho_3d, CouplingDensity, DiscreteBath};
use polariton_core::keldysh::TwoModeSystem;
use polariton_core::model::{coupling_coefficient_varrho, DensityConvention, LambShift, ModelParams, PhysicalParams};
use polariton_core::observables::{
    dip_metric, log_log_slope, populations, spectrum, sweep, uniform_grid, Mode, PopulationOptions, SweepOptions,
};
use polariton_core::oracle::{pv_quadrature, rho_momentum_quadrature};
use polariton_core::presets::{Figure, POPULATION_VARRHOS, SPECTRUM_RATIOS};
use polariton_core::quadrature::Tolerance;
use polariton_core::selfenergy::{hilbert_sqrt_pv, sigma_discrete, sigma_lorentzian, sigma_sharp, SelfEnergyModel};
use rand::{rngs::StdRng, Rng, SeedableRng};

/// Populations at y/y_c = 0.8 rise with ϱ instead of falling; see the
/// decisions ledger.
const KNOWN_FAILURES: &[usize] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: usize, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        if elapsed > b {
            out.pass = false;
            out.detail.push_str(&format!("; over budget {b:?}"));
        }
    }
    let tag = if out.pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id}: {} [{:.3} s]", out.detail, elapsed.as_secs_f64());
    out.pass
}

fn rel_sup(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    diff / scale
}

fn coupling_coefficient() -> Outcome {
    let phys = PhysicalParams::rubidium_87();
    let n = phys.density(DensityConvention::Peak).unwrap();
    let varrho = coupling_coefficient_varrho(n, phys.scattering_length, phys.wavelength);
    check(
        (1.33e-2..=1.47e-2).contains(&varrho),
        format!("ϱ/ω_R = {varrho:.4e} at peak density {n:.3e} m⁻³ (window [1.33e-2, 1.47e-2])"),
    )
}

fn density_oracle() -> Outcome {
    let phys = PhysicalParams::rubidium_87();
    let n = phys.density(DensityConvention::Peak).unwrap();
    let varrho = coupling_coefficient_varrho(n, phys.scattering_length, phys.wavelength);
    let mut worst: f64 = 0.0;
    for w in uniform_grid(0.5, 5.0, 200).unwrap() {
        let oracle = rho_momentum_quadrature(w, &phys, n).unwrap();
        let closed = rho_3d(w, varrho);
        let err = if closed == 0.0 { oracle.abs() } else { (oracle / closed - 1.0).abs() };
        worst = worst.max(err);
    }
    check(worst < 1e-3, format!("max relative error {worst:.2e} over 200 points (limit 1e-3)"))
}

fn self_energy_cross_validation() -> Outcome {
    // A cutoff of 5 ω_R puts 10⁴ modes 4.5e-4 apart, below the 1e-3 linewidth.
    let (varrho, cutoff, gamma, n_modes) = (0.1, 5.0, 1e-3, 10_000);
    let density = CouplingDensity::analytic(varrho).unwrap();
    let bath = DiscreteBath::from_density(|w| rho_3d(w, varrho), &[(0.5, cutoff, n_modes)], gamma).unwrap();
    let tol = Tolerance::new(1e-14, 1e-10).with_max_intervals(10_000);
    let grid = uniform_grid(0.6, 3.0, 241).unwrap();
    let mut sharp = Vec::new();
    let mut lorentz = Vec::new();
    let mut discrete = Vec::new();
    for &w in &grid {
        sharp.push(sigma_sharp(w, varrho, cutoff, LambShift::Bare, 0.0).retarded);
        lorentz.push(sigma_lorentzian(w, &density, gamma, cutoff, 0.0, tol).unwrap().retarded);
        discrete.push(sigma_discrete(w, &bath, 0.0).unwrap().retarded);
    }
    let d_s = rel_sup(&discrete, &sharp);
    let l_s = rel_sup(&lorentz, &sharp);
    let d_l = rel_sup(&discrete, &lorentz);

    let mut rng = StdRng::seed_from_u64(7);
    let pv_tol = Tolerance::new(1e-13, 1e-11).with_max_intervals(10_000);
    let density20 = CouplingDensity::analytic(varrho).unwrap();
    let mut pv_worst: f64 = 0.0;
    for _ in 0..20 {
        let w = rng.gen_range(-5.0..19.0);
        let oracle = pv_quadrature(&density20, w, 20.0, pv_tol).unwrap().value;
        let closed = hilbert_sqrt_pv(w, varrho, 20.0);
        pv_worst = pv_worst.max((oracle / closed - 1.0).abs());
    }
    check(
        d_s < 1e-2 && l_s < 1e-2 && d_l < 1e-2 && pv_worst < 1e-6,
        format!(
            "sup-norm discrete/sharp {d_s:.2e}, lorentzian/sharp {l_s:.2e}, discrete/lorentzian {d_l:.2e} (limit 1e-2); PV closed form vs quadrature {pv_worst:.2e} (limit 1e-6)"
        ),
    )
}

fn calibration_and_positivity() -> Outcome {
    let opts = PopulationOptions::default();
    let mut pass = true;
    let mut detail = String::new();
    for varrho in [0.0, 0.01] {
        let vacuum = TwoModeSystem::new(ModelParams { varrho, ..Figure::Fig3a.params() }).unwrap();
        let (a, c) = populations(&vacuum, &opts).unwrap();
        let (sum_a, sum_c) = (a.core + a.tail, c.core + c.tail);
        pass &= (sum_a - 1.0).abs() < 1e-6 && (sum_c - 1.0).abs() < 1e-6;
        detail.push_str(&format!(
            "y = 0, ϱ = {varrho}: ∫C_a dω/2π − 1 = {:.1e}, ∫C_c dω/2π − 1 = {:.1e}; ",
            sum_a - 1.0,
            sum_c - 1.0
        ));
    }

    let mut worst = f64::INFINITY;
    let mut slowest = Duration::ZERO;
    for fig in Figure::SPECTRA {
        let start = Instant::now();
        for params in fig.curves() {
            let system = TwoModeSystem::new(params).unwrap();
            let cavity = -params.detuning;
            let half = 20.0 * params.kappa.max(0.1);
            let mut grid = uniform_grid(-2.0, 2.0, 2048).unwrap();
            grid.extend(uniform_grid(cavity - half, cavity + half, 1024).unwrap());
            grid.extend(uniform_grid(-cavity - half, -cavity + half, 1024).unwrap());
            let table = spectrum(&system, &grid).unwrap();
            let min = table.c_a.iter().chain(&table.c_c).copied().fold(f64::INFINITY, f64::min);
            worst = worst.min(min);
        }
        slowest = slowest.max(start.elapsed());
    }
    pass &= worst >= -1e-10 && slowest < Duration::from_secs(10);
    detail.push_str(&format!(
        "min C over six presets × six couplings = {worst:.2e} (limit −1e-10); slowest preset {:.2} s",
        slowest.as_secs_f64()
    ));
    check(pass, detail)
}

fn mode_softening() -> Outcome {
    let base = Figure::Fig3a.params();
    let soft: Vec<f64> = SPECTRUM_RATIOS
        .iter()
        .map(|&r| TwoModeSystem::new(base.with_y_over_yc(r).unwrap()).unwrap().soft_mode().unwrap())
        .collect();
    let decreasing = soft.windows(2).all(|w| w[1] < w[0]);
    let below = soft[5] < 0.5;

    let mut crossings = Vec::new();
    for varrho in POPULATION_VARRHOS {
        let params = ModelParams { varrho, ..base };
        let y_c = params.critical_coupling().unwrap();
        let det0 = |y: f64| TwoModeSystem::new(params.with_coupling(y)).unwrap().det_retarded(0.0).unwrap().re;
        let (mut lo, mut hi) = (0.5 * y_c, 1.5 * y_c);
        let s_lo = det0(lo).signum();
        if s_lo == det0(hi).signum() {
            crossings.push(f64::INFINITY);
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if det0(mid).signum() == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crossings.push((0.5 * (lo + hi) / y_c - 1.0).abs());
    }
    let worst = crossings.iter().copied().fold(0.0, f64::max);
    check(
        decreasing && below && worst < 1e-2,
        format!(
            "ω_soft = {:?}, ω_soft(0.95) = {:.3} (< 0.5); det D^R(0) crossing off y_c by {:.1e} worst over ϱ ∈ {{0.01, 0.1, 1}} (limit 1e-2)",
            soft.iter().map(|w| (w * 1e3).round() / 1e3).collect::<Vec<_>>(),
            soft[5],
            worst
        ),
    )
}

fn hole_burning() -> Outcome {
    let grid = uniform_grid(0.4, 0.6, 801).unwrap();
    let metric = |fig: Figure| {
        let params = fig.params().with_y_over_yc(0.9).unwrap();
        let table = spectrum(&TwoModeSystem::new(params).unwrap(), &grid).unwrap();
        dip_metric(&table, Mode::Quasiparticle)
    };
    let b = metric(Figure::Fig3b);
    let c = metric(Figure::Fig3c);
    let at_threshold = b.location.is_some_and(|w| (w - 0.5).abs() <= 5e-3);
    check(
        at_threshold && b.contrast < 0.5 && c.contrast > b.contrast,
        format!(
            "κ = 0.1: dip at {:?}, contrast {:.4} (< 0.5); κ = 10: contrast {:.4} (must exceed)",
            b.location, b.contrast, c.contrast
        ),
    )
}

fn populations_criterion() -> Outcome {
    let ratios: Vec<f64> = (50..100).map(|i| i as f64 / 100.0).collect();
    let opts = SweepOptions::default();
    let mut at_08 = Vec::new();
    let mut sub = Vec::new();
    let mut detail = String::new();
    let mut slowest: f64 = 0.0;
    for varrho in POPULATION_VARRHOS {
        let params = ModelParams { varrho, ..Figure::Fig5.params() };
        let start = Instant::now();
        let table = sweep(&params, &SelfEnergyModel::sharp(&params), &ratios, &opts).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let errors = table.points.iter().filter(|p| p.error.is_some()).count();
        let point = |r: f64| table.points.iter().find(|p| (p.y_over_yc - r).abs() < 1e-9).unwrap();
        let (n08a, n08c) = (point(0.8).photon.unwrap(), point(0.8).quasiparticle.unwrap());
        at_08.push((n08a, n08c));
        let growth_c = point(0.99).quasiparticle.unwrap() / point(0.5).quasiparticle.unwrap();
        let growth_a = point(0.99).photon.unwrap() / point(0.5).photon.unwrap();
        let tail: Vec<_> = table.points.iter().filter(|p| p.y_over_yc >= 0.9 - 1e-9).collect();
        let x: Vec<f64> = tail.iter().map(|p| 1.0 - p.y_over_yc).collect();
        let slope_c = log_log_slope(&x, &tail.iter().map(|p| p.quasiparticle.unwrap()).collect::<Vec<_>>()).unwrap();
        let slope_a = log_log_slope(&x, &tail.iter().map(|p| p.photon.unwrap()).collect::<Vec<_>>()).unwrap();
        let ok = errors == 0
            && table.photon_monotone
            && table.quasiparticle_monotone
            && growth_a > 10.0
            && growth_c > 10.0
            && (slope_a + 1.0).abs() <= 0.15
            && (slope_c + 1.0).abs() <= 0.15;
        sub.push(ok);
        detail.push_str(&format!(
            "ϱ={varrho}: n_c(0.8)={n08c:.4e} n_a(0.8)={n08a:.4e} monotone={} growth c/a={growth_c:.0}/{growth_a:.0} slope c/a={slope_c:.3}/{slope_a:.3}; ",
            table.photon_monotone && table.quasiparticle_monotone
        ));
    }
    let ordered = at_08.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    detail.push_str(&format!("ordering decreasing in ϱ at 0.8: {ordered}; slowest 50-point sweep {slowest:.1} s"));
    check(ordered && sub.iter().all(|b| *b) && slowest < 120.0, detail)
}

fn structural_invariants() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let (mut sigma_conj, mut fdt, mut adjoint, mut anti) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let varrho = rng.gen_range(0.0..1.0);
        let lamb = [LambShift::Renormalized, LambShift::Resonance, LambShift::Bare][rng.gen_range(0..3)];
        let params = ModelParams::new(rng.gen_range(-200.0..-5.0), rng.gen_range(0.01..20.0), varrho)
            .with_lamb_shift(lamb)
            .with_y_over_yc(rng.gen_range(0.0..0.97))
            .unwrap();
        let w = rng.gen_range(-3.0..3.0);
        let system = TwoModeSystem::new(params).unwrap();
        let s = system.self_energy().evaluate(w).unwrap();
        let scale = s.retarded.norm().max(f64::MIN_POSITIVE);
        sigma_conj = sigma_conj.max((s.advanced - s.retarded.conj()).norm() / scale);
        fdt = fdt.max((s.keldysh - (s.retarded - s.advanced)).norm() / scale);
        let g = system.green(w).unwrap();
        let ga = g.retarded.adjoint();
        let gk_adj = g.keldysh.adjoint();
        let (gr_scale, gk_scale) = (g.retarded.max_abs(), g.keldysh.max_abs());
        for i in 0..4 {
            for j in 0..4 {
                adjoint = adjoint.max((g.advanced[(i, j)] - ga[(i, j)]).norm() / (gr_scale * g.condition));
                anti = anti.max((g.keldysh[(i, j)] + gk_adj[(i, j)]).norm() / gk_scale);
            }
        }
    }
    let limit = 1e-13;
    check(
        sigma_conj <= limit && fdt <= limit && adjoint <= limit && anti <= limit,
        format!(
            "max relative deviation over 1000 samples: Σ^A−(Σ^R)* {sigma_conj:.1e}, Σ^K−(Σ^R−Σ^A) {fdt:.1e}, G^A−(G^R)† {adjoint:.1e} (per unit condition number), G^K+(G^K)† {anti:.1e} (limit {limit:.0e})"
        ),
    )
}

fn epsilon_insensitivity() -> Outcome {
    let base = Figure::Fig3a.params().with_y_over_yc(0.8).unwrap();
    let grid = uniform_grid(-2.0, 2.0, 401).unwrap();
    let opts = PopulationOptions::default();
    let epsilons = [1e-12, 1e-10, 1e-8, 1e-6];
    let mut pops = Vec::new();
    let mut tables = Vec::new();
    for eps in epsilons {
        let system = TwoModeSystem::new(base.with_epsilon(eps)).unwrap();
        let (a, c) = populations(&system, &opts).unwrap();
        pops.push((a.value, c.value));
        tables.push(spectrum(&system, &grid).unwrap());
    }
    let (ra, rc) = (pops[0].0, pops[0].1);
    let pop_change = pops
        .iter()
        .map(|(a, c)| ((a / ra - 1.0).abs()).max((c / rc - 1.0).abs()))
        .fold(0.0, f64::max);
    let mut spec_change: f64 = 0.0;
    for t in &tables[1..] {
        for mode in [Mode::Photon, Mode::Quasiparticle] {
            let (v, r) = (t.values(mode), tables[0].values(mode));
            let scale = r.iter().copied().fold(0.0, f64::max);
            let diff = v.iter().zip(r).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            spec_change = spec_change.max(diff / scale);
        }
    }
    check(
        pop_change < 1e-4 && spec_change < 1e-4,
        format!(
            "ε ∈ [1e-12, 1e-6] at y/y_c = 0.8 (κ = 0.1, ϱ = 0.01): population change {pop_change:.2e}, spectrum sup-norm change {spec_change:.2e} (limit 1e-4)"
        ),
    )
}

fn main() {
    let results = [
        (1, run(1, Some(Duration::from_millis(1)), coupling_coefficient)),
        (2, run(2, Some(Duration::from_secs(5)), density_oracle)),
        (3, run(3, Some(Duration::from_secs(30)), self_energy_cross_validation)),
        (4, run(4, None, calibration_and_positivity)),
        (5, run(5, None, mode_softening)),
        (6, run(6, None, hole_burning)),
        (7, run(7, None, populations_criterion)),
        (8, run(8, Some(Duration::from_secs(5)), structural_invariants)),
        (9, run(9, None, epsilon_insensitivity)),
    ];
    let unexpected: Vec<usize> = results
        .iter()
        .filter(|(id, pass)| *pass == KNOWN_FAILURES.contains(id))
        .map(|(id, _)| *id)
        .collect();
    let passed = results.iter().filter(|r| r.1).count();
    println!("{passed}/{} criteria passed; known failures: {KNOWN_FAILURES:?}", results.len());
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
