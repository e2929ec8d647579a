//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsinglet::channel::{apply_to_half_pure, is_unital, kraus_from_choi, trace_orthogonality_residual, KrausChannel};
use qsinglet::entmetrics::{
    negativity_of, pt_extremes_residual, schmidt_state, singlet_fraction, singlet_fraction_oracle,
    singlet_fraction_value,
};
use qsinglet::linalg::{phi_plus, swap_conjugate};
use qsinglet::locc::{fstar, fstar_filter_oracle, DEFAULT_FILTER_RESTARTS};
use qsinglet::oneshot::{
    channel_negativity, optimal_input_state, optimal_singlet_fraction, preprocessed_fidelity_oracle, NegativitySearch,
};
use qsinglet::sampling::{random_channel, random_density_matrix, random_pure_state, random_unital_channel};
use qsinglet::tolerances::{EB_TOL, UNITAL_TOL};
use qsinglet::{choi, dual_choi, DensityMatrix};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn seeded_channels(seed: u64, count: usize) -> Vec<KrausChannel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_channel(&mut rng, 1 + i % 4)).collect()
}

fn amplitude_damping_points() -> Outcome {
    let mut worst_schmidt: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut slowest = Duration::ZERO;
    for p in [0.1, 0.3, 0.5, 0.9] {
        let t = Instant::now();
        let c = KrausChannel::amplitude_damping(p).unwrap();
        let input = optimal_input_state(&c);
        let expected = [1.0 / (2.0 - p), (1.0 - p) / (2.0 - p)];
        for k in 0..2 {
            worst_schmidt = worst_schmidt.max((input.schmidt.coefficients[k] - expected[k]).abs());
        }
        let opt = optimal_singlet_fraction(&c);
        worst_f = worst_f.max((opt.value - (1.0 - p / 2.0)).abs()).max((opt.lambda_max - (1.0 - p / 2.0)).abs());
        let oracle = preprocessed_fidelity_oracle(&c, [37, 72, 26]);
        worst_excess = worst_excess.max(oracle.grid.max(oracle.refined) - opt.lambda_max);
        slowest = slowest.max(t.elapsed());
    }
    let pass = worst_schmidt < 1e-9 && worst_f < 1e-9 && worst_excess <= 1e-6 && slowest < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "Schmidt err {worst_schmidt:.1e}, F err {worst_f:.1e}, input-search excess {worst_excess:.1e}, slowest point {:.3} s",
            slowest.as_secs_f64()
        ),
    )
}

fn amplitude_damping_negativity() -> Outcome {
    let t = Instant::now();
    let mut worst_phi: f64 = 0.0;
    let mut worst_chi: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    for k in 0..50 {
        let p = 0.05 + 0.9 * k as f64 / 49.0;
        let c = KrausChannel::amplitude_damping(p).unwrap();
        let n_phi = negativity_of(&apply_to_half_pure(&c, &phi_plus()));
        let n_chi = negativity_of(&apply_to_half_pure(&c, &schmidt_state(1.0 / (2.0 - p))));
        worst_phi = worst_phi.max((n_phi - ((p * p / 4.0 + 1.0 - p).sqrt() - p / 2.0)).abs());
        worst_chi = worst_chi.max((n_chi - (1.0 - p) / (2.0 - p) * ((p * p + 4.0).sqrt() - p)).abs());
        let n_channel = channel_negativity(&c, &NegativitySearch { seed: k, ..Default::default() }).value;
        min_margin = min_margin.min(n_channel - n_phi);
    }
    let elapsed = t.elapsed();
    let pass = worst_phi < 1e-9 && worst_chi < 1e-9 && min_margin > 1e-4 && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "maximally entangled input err {worst_phi:.1e}, Schmidt input err {worst_chi:.1e}, min N(channel) - N(Choi) {min_margin:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn pt_extremes(channels: &[KrausChannel]) -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for c in channels {
        let j = choi(c);
        let rho = DensityMatrix::new(*j.matrix()).unwrap();
        worst = worst.max(pt_extremes_residual(&rho).map(f64::abs).unwrap_or(f64::INFINITY));
    }
    let elapsed = t.elapsed();
    outcome(
        worst < 1e-10 && elapsed < Duration::from_secs(10),
        format!("{} channels, max residual {worst:.1e}, {:.2} s", channels.len(), elapsed.as_secs_f64()),
    )
}

fn dual_choi_swap(channels: &[KrausChannel]) -> Outcome {
    let mut entry: f64 = 0.0;
    let mut spectrum: f64 = 0.0;
    for c in channels {
        let j = choi(c);
        let d = dual_choi(c);
        entry = entry.max(d.matrix().max_abs_diff(&swap_conjugate(j.matrix())));
        for k in 0..4 {
            spectrum = spectrum.max((j.eig().values[k] - d.eig().values[k]).abs());
        }
    }
    outcome(entry < 1e-12 && spectrum < 1e-10, format!("entrywise {entry:.1e}, spectrum {spectrum:.1e}"))
}

fn fidelity_negativity(channels: &[KrausChannel]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for c in channels {
        let j = choi(c);
        if j.lambda_max() <= 0.5 + EB_TOL {
            continue;
        }
        n += 1;
        worst = worst.max((j.lambda_max() - 0.5 * (1.0 + negativity_of(j.matrix()))).abs());
    }
    outcome(worst < 1e-10, format!("{n} non-entanglement-breaking channels, max residual {worst:.1e}"))
}

fn optimal_input_triple() -> Outcome {
    let t = Instant::now();
    let channels: Vec<KrausChannel> = seeded_channels(6, 200)
        .into_iter()
        .filter(|c| !optimal_singlet_fraction(c).entanglement_breaking)
        .take(100)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst_eq: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for (i, c) in channels.iter().enumerate() {
        let lmax = choi(c).lambda_max();
        let out = apply_to_half_pure(c, &optimal_input_state(c).state);
        let rho = DensityMatrix::new(out).unwrap();
        let f = singlet_fraction(&rho).value;
        let oracle = fstar_filter_oracle(&rho, DEFAULT_FILTER_RESTARTS, i as u64).fstar_value;
        worst_eq = worst_eq.max((f - lmax).abs()).max((oracle - lmax).abs());
        for k in 0..20 {
            let psi = random_pure_state(&mut rng);
            let other = DensityMatrix::new(apply_to_half_pure(c, &psi)).unwrap();
            let o = fstar_filter_oracle(&other, DEFAULT_FILTER_RESTARTS, (i * 20 + k) as u64).fstar_value;
            worst_excess = worst_excess.max(o - lmax);
        }
    }
    outcome(
        channels.len() == 100 && worst_eq < 1e-5 && worst_excess <= 1e-5,
        format!(
            "{} channels, max |F - lambda_max|, |F*oracle - lambda_max| {worst_eq:.1e}; other inputs max excess {worst_excess:.1e}; {:.1} s",
            channels.len(),
            t.elapsed().as_secs_f64()
        ),
    )
}

fn unital_iff_maximally_entangled() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unital_worst: f64 = 0.0;
    let mut n_unital = 0;
    while n_unital < 100 {
        let c = random_unital_channel(&mut rng);
        let input = optimal_input_state(&c);
        if input.degenerate {
            continue;
        }
        n_unital += 1;
        unital_worst = unital_worst.max((input.schmidt.lambda() - 0.5).abs());
    }
    let mut min_excess = f64::INFINITY;
    let mut n_nonunital = 0;
    let mut i = 0;
    while n_nonunital < 100 {
        let c = random_channel(&mut rng, 1 + i % 4);
        i += 1;
        if is_unital(&c, UNITAL_TOL).deviation <= 1e-3 {
            continue;
        }
        n_nonunital += 1;
        min_excess = min_excess.min(optimal_input_state(&c).schmidt.lambda() - 0.5);
    }
    outcome(
        unital_worst < 1e-7 && min_excess > 1e-9,
        format!("unital max |lambda - 1/2| {unital_worst:.1e}; nonunital min lambda - 1/2 {min_excess:.2e}"),
    )
}

fn locc_gap() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gap =
        |c: &KrausChannel| optimal_singlet_fraction(c).value - fstar(&DensityMatrix::new(*choi(c).matrix()).unwrap());
    let mut min_gap = f64::INFINITY;
    let mut n = 0;
    let mut i = 0;
    while n < 100 {
        let c = random_channel(&mut rng, 1 + i % 4);
        i += 1;
        if is_unital(&c, UNITAL_TOL).deviation <= 1e-2 || optimal_singlet_fraction(&c).entanglement_breaking {
            continue;
        }
        n += 1;
        min_gap = min_gap.min(gap(&c));
    }
    let unital_worst = (0..100).map(|_| gap(&random_unital_channel(&mut rng)).abs()).fold(0.0, f64::max);
    outcome(
        min_gap > 1e-6 && unital_worst < 1e-6,
        format!("nonunital min gap {min_gap:.2e}; unital max |gap| {unital_worst:.1e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut fstar_worst: f64 = 0.0;
    let mut grid_worst: f64 = 0.0;
    for i in 0..200 {
        let rho = DensityMatrix::new(random_density_matrix(&mut rng, 1 + i % 4)).unwrap();
        let oracle = fstar_filter_oracle(&rho, DEFAULT_FILTER_RESTARTS, i as u64).fstar_value;
        fstar_worst = fstar_worst.max((fstar(&rho) - oracle).abs());
        let grid = singlet_fraction_oracle(&rho, 2.0, false).grid;
        grid_worst = grid_worst.max((singlet_fraction_value(rho.matrix()) - grid).abs());
    }
    let elapsed = t.elapsed();
    outcome(
        fstar_worst < 1e-4 && grid_worst < 1e-3 && elapsed < Duration::from_secs(120),
        format!("F* vs filter search {fstar_worst:.1e}; F vs grid {grid_worst:.1e}; {:.1} s", elapsed.as_secs_f64()),
    )
}

fn kraus_extraction() -> Outcome {
    let mut ortho: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for c in seeded_channels(10, 200) {
        let j = choi(&c);
        match kraus_from_choi(&j) {
            Ok(k) => {
                ortho = ortho.max(trace_orthogonality_residual(&j, &k));
                round_trip = round_trip.max(choi(&k).matrix().max_abs_diff(j.matrix()));
            }
            Err(_) => {
                ortho = f64::INFINITY;
                round_trip = f64::INFINITY;
            }
        }
    }
    outcome(ortho < 1e-9 && round_trip < 1e-9, format!("trace orthogonality {ortho:.1e}, round trip {round_trip:.1e}"))
}

fn command_line() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qsinglet");
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let audit = Command::new(bin)
        .args(["audit", "--seed", "42", "--count", "100", "--out"])
        .arg(dir.path().join("repro.json"))
        .output()
        .unwrap();
    let audit_time = t.elapsed();
    let sweep = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(bin)
            .args(["sweep", "--name", "amplitude_damping", "--param", "p", "--from", "0.05", "--to", "0.95"])
            .args(["--steps", "19", "--columns", "N_choi,N_psi0,N_channel", "--seed", "3", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        (status.success(), std::fs::read(&path).unwrap_or_default())
    };
    let (ok_a, a) = sweep("a.csv");
    let (ok_b, b) = sweep("b.csv");
    let ordered = String::from_utf8_lossy(&a).lines().skip(1).all(|l| {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        v[1] < v[2] && v[2] <= v[3] + 1e-12
    });
    let pass = audit.status.success()
        && audit_time < Duration::from_secs(60)
        && ok_a
        && ok_b
        && !a.is_empty()
        && a == b
        && ordered;
    outcome(
        pass,
        format!(
            "audit exit {:?} in {:.1} s; sweep identical {}, N(Choi) < N(chi) <= N(channel) on every row {ordered}",
            audit.status.code(),
            audit_time.as_secs_f64(),
            a == b
        ),
    )
}

fn main() -> ExitCode {
    let channels = seeded_channels(3, 1000);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("amplitude damping optimal input and fidelity", Box::new(amplitude_damping_points)),
        ("amplitude damping negativity formulas and ordering", Box::new(amplitude_damping_negativity)),
        ("lambda_min(J^PT) + lambda_max(J) = 1/2", Box::new(|| pt_extremes(&channels))),
        ("dual Choi equals swap-conjugate Choi", Box::new(|| dual_choi_swap(&channels))),
        ("lambda_max(J) = (1 + N(J))/2", Box::new(|| fidelity_negativity(&channels))),
        ("optimal input output: F = F* = lambda_max", Box::new(optimal_input_triple)),
        ("optimal input maximally entangled iff unital", Box::new(unital_iff_maximally_entangled)),
        ("TP-LOCC gap on the Choi state", Box::new(locc_gap)),
        ("F* and singlet fraction against search oracles", Box::new(oracle_equivalence)),
        ("Kraus extraction from the Choi state", Box::new(kraus_extraction)),
        ("command line audit and reproducible sweep", Box::new(command_line)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2}: {name} [{}] ({:.2} s)",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
