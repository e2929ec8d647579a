//! Randomised check of every channel identity the crate relies on.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{is_unital, kraus_from_choi, trace_orthogonality_residual, KrausChannel};
use crate::choi::{choi, dual_choi, eigenvector_correspondence_check};
use crate::entmetrics::{pt_extremes_residual_with, singlet_fraction_oracle, singlet_fraction_value, DensityMatrix};
use crate::linalg::{hermitian_eigenvalues, partial_transpose, swap_conjugate, Mat4, Subsystem};
use crate::locc::{fstar_filter_oracle, fstar_of, DEFAULT_FILTER_RESTARTS};
use crate::oneshot::{optimal_input_state, preprocessed_fidelity_oracle};
use crate::optimize::derive_seed;
use crate::sampling::{random_channel, random_unital_channel};
use crate::tolerances::{EB_TOL, MES_TOL, STRICT_GAP};

/// Deliberate defects for checking that the harness notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Negate the within-block off-diagonal entries of every partial transpose.
    PartialTransposeSign,
}

#[derive(Clone, Debug)]
pub struct AuditConfig {
    pub seed: u64,
    pub count: usize,
    /// Thread count; `None` runs serially.
    pub workers: Option<usize>,
    pub fault: Option<Fault>,
}

/// Largest residual of one identity over the audited channels.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub threshold: f64,
    pub max_residual: f64,
    pub evaluated: usize,
    pub failures: usize,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub index: usize,
    pub check: &'static str,
    pub residual: f64,
    pub channel: KrausChannel,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub checks: Vec<Check>,
    pub first_failure: Option<Failure>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Check names and thresholds, in report order.
pub const CHECKS: &[(&str, f64)] = &[
    ("dual_choi_swap_conjugate", 1e-12),
    ("dual_choi_spectrum", 1e-10),
    ("pt_min_plus_max", 1e-10),
    ("fidelity_negativity", 1e-10),
    ("optimal_input_fidelity", 1e-9),
    ("unital_input_mes", MES_TOL),
    ("nonunital_input_not_mes", 0.0),
    ("locc_gap_sign", 1e-9),
    ("locc_gap_unital", STRICT_GAP),
    ("locc_gap_nonunital_strict", 0.0),
    ("eigenvector_correspondence", 1e-9),
    ("kraus_trace_orthogonality", 1e-9),
    ("kraus_round_trip", 1e-9),
    ("singlet_fraction_grid", 1e-3),
    ("fstar_filter_oracle", 1e-4),
    ("preprocessed_fidelity_grid", 1e-6),
];

/// Channel `index` of an audit run: every fifth is a random Pauli mixture,
/// the rest are random channels of Kraus rank 1–4.
pub fn audit_channel(seed: u64, index: usize) -> KrausChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64));
    if index % 5 == 4 {
        random_unital_channel(&mut rng)
    } else {
        random_channel(&mut rng, 1 + index % 4)
    }
}

fn faulty_pt(m: &Mat4, fault: Option<Fault>) -> Mat4 {
    let mut t = partial_transpose(m, Subsystem::Second);
    if fault == Some(Fault::PartialTransposeSign) {
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            t.0[i][j] = -t.0[i][j];
        }
    }
    t
}

/// Residuals of one channel, indexed like [`CHECKS`]; `None` where a check
/// does not apply.
pub fn channel_residuals(c: &KrausChannel, seed: u64, fault: Option<Fault>) -> Vec<Option<f64>> {
    let mut r: Vec<Option<f64>> = vec![None; CHECKS.len()];
    let j = choi(c);
    let d = dual_choi(c);
    let lmax = j.lambda_max();
    let eb = lmax <= 0.5 + EB_TOL;
    let unital = is_unital(c, crate::tolerances::UNITAL_TOL);

    r[0] = Some(d.matrix().max_abs_diff(&swap_conjugate(j.matrix())));
    r[1] = Some((0..4).map(|k| (j.eig().values[k] - d.eig().values[k]).abs()).fold(0.0, f64::max));
    r[2] = pt_extremes_residual_with(j.matrix(), |m| faulty_pt(m, fault)).ok().map(f64::abs);
    if !eb {
        let n = (-2.0 * hermitian_eigenvalues(&faulty_pt(j.matrix(), fault))[3]).max(0.0);
        r[3] = Some((lmax - 0.5 * (1.0 + n)).abs());
    }

    let input = optimal_input_state(c);
    if !input.degenerate {
        let out = crate::channel::apply_to_half_pure(c, &input.state);
        r[4] = Some((singlet_fraction_value(&out) - lmax).abs());
        let lambda = input.schmidt.lambda();
        if unital.unital {
            r[5] = Some((lambda - 0.5).abs());
        } else if unital.deviation > 1e-3 {
            r[6] = Some((0.5 + 1e-9 - lambda).max(0.0));
        }
    }

    let fstar = fstar_of(j.matrix()).value;
    if !eb {
        let gap = lmax - fstar;
        r[7] = Some((-gap).max(0.0));
        if unital.unital {
            r[8] = Some(gap.abs());
        } else if unital.deviation > 1e-2 {
            r[9] = Some((STRICT_GAP - gap).max(0.0));
        }
    }

    r[10] = Some(eigenvector_correspondence_check(c).residual);
    match kraus_from_choi(&j) {
        Ok(k) => {
            r[11] = Some(trace_orthogonality_residual(&j, &k));
            r[12] = Some(choi(&k).matrix().max_abs_diff(j.matrix()));
        }
        Err(_) => {
            r[11] = Some(f64::INFINITY);
            r[12] = Some(f64::INFINITY);
        }
    }

    let rho = DensityMatrix::new(*j.matrix()).expect("Choi state is a density matrix");
    let exact = singlet_fraction_value(j.matrix());
    let grid = singlet_fraction_oracle(&rho, 2.0, false);
    // the grid is a lower bound: overshooting is as wrong as a large deficit
    r[13] = Some(if grid.grid > exact + 1e-12 { f64::INFINITY } else { exact - grid.grid });
    let oracle = fstar_filter_oracle(&rho, DEFAULT_FILTER_RESTARTS, seed);
    r[14] = Some((oracle.fstar_value - fstar).abs());
    let f1 = d.lambda_max();
    r[15] = Some((preprocessed_fidelity_oracle(c, [13, 24, 11]).refined - f1).abs());
    r
}

pub fn run_audit(cfg: &AuditConfig) -> AuditReport {
    let eval = |i: usize| {
        let c = audit_channel(cfg.seed, i);
        let r = channel_residuals(&c, derive_seed(cfg.seed ^ 0xA0D1, i as u64), cfg.fault);
        (c, r)
    };
    let rows: Vec<(KrausChannel, Vec<Option<f64>>)> = match cfg.workers {
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool");
            pool.install(|| (0..cfg.count).into_par_iter().map(eval).collect())
        }
        _ => (0..cfg.count).map(eval).collect(),
    };

    let mut checks: Vec<Check> = CHECKS
        .iter()
        .map(|&(name, threshold)| Check { name, threshold, max_residual: 0.0, evaluated: 0, failures: 0 })
        .collect();
    let mut first_failure = None;
    for (i, (c, r)) in rows.into_iter().enumerate() {
        for (check, value) in checks.iter_mut().zip(r) {
            let Some(v) = value else { continue };
            check.evaluated += 1;
            check.max_residual = check.max_residual.max(v);
            if !(v <= check.threshold) {
                check.failures += 1;
                if first_failure.is_none() {
                    first_failure = Some(Failure { index: i, check: check.name, residual: v, channel: c.clone() });
                }
            }
        }
    }
    AuditReport { checks, first_failure }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_audit_passes() {
        let r = run_audit(&AuditConfig { seed: 42, count: 5, workers: None, fault: None });
        assert!(r.passed(), "{:#?}", r.checks);
        assert!(r.checks.iter().all(|c| c.evaluated > 0 || c.name.contains("unital")));
    }

    #[test]
    fn injected_fault_is_caught() {
        let r = run_audit(&AuditConfig { seed: 42, count: 3, workers: None, fault: Some(Fault::PartialTransposeSign) });
        assert!(!r.passed());
        let pt = r.checks.iter().find(|c| c.name == "pt_min_plus_max").unwrap();
        assert!(pt.failures > 0);
    }

    #[test]
    fn workers_do_not_change_results() {
        let a = run_audit(&AuditConfig { seed: 7, count: 3, workers: None, fault: None });
        let b = run_audit(&AuditConfig { seed: 7, count: 3, workers: Some(2), fault: None });
        assert_eq!(a.checks, b.checks);
    }
}
