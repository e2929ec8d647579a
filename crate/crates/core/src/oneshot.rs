//! Optimal one-shot singlet fraction of a channel and the quantities around it.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_to_half_pure, is_unital, kraus_from_choi, trace_orthogonality_residual, KrausChannel};
use crate::choi::{choi, dual_choi, eigenvector_correspondence_check};
use crate::entmetrics::{
    keep_top, negativity_of, pt_extremes_residual_with, schmidt_of, schmidt_state, singlet_fraction_value, SchmidtData,
};
use crate::io::{matrix_to_json, JsonMatrix};
use crate::linalg::{partial_transpose, sphere_unitary, su2_euler, swap_conjugate, Mat2, Vec4, C64};
use crate::locc::fstar_of;
use crate::optimize::{multistart, CoordinateSearch};
use crate::tolerances::{DEGENERACY_GAP, EB_TOL, MES_TOL, STRICT_GAP, UNITAL_TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalFidelity {
    /// `max(½, λ_max(J))`
    pub value: f64,
    pub lambda_max: f64,
    pub entanglement_breaking: bool,
}

/// `F(Λ) = λ_max(J)`, reported as ½ in the entanglement-breaking regime.
pub fn optimal_singlet_fraction(c: &KrausChannel) -> OptimalFidelity {
    let lambda_max = choi(c).lambda_max();
    let entanglement_breaking = lambda_max <= 0.5 + EB_TOL;
    OptimalFidelity { value: lambda_max.max(0.5), lambda_max, entanglement_breaking }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalInput {
    pub state: Vec4,
    pub schmidt: SchmidtData,
    /// Top eigenvalue of the dual Choi state is not simple; `state` is the
    /// tie-broken representative.
    pub degenerate: bool,
}

/// Top eigenvector of the dual Choi state.
pub fn optimal_input_state(c: &KrausChannel) -> OptimalInput {
    let d = dual_choi(c);
    let eig = d.eig();
    let state = eig.vectors[0];
    OptimalInput { state, schmidt: schmidt_of(&state), degenerate: eig.values[0] - eig.values[1] < DEGENERACY_GAP }
}

/// `F₁(Λ) = λ_max` of the dual Choi state.
pub fn preprocessed_fidelity(c: &KrausChannel) -> f64 {
    dual_choi(c).lambda_max()
}

/// Input `(I ⊗ V)(√λ|00⟩ + √(1−λ)|11⟩)` with `V = sphere_unitary(θ, φ)`.
///
/// Local unitaries on the kept qubit and diagonal phases of `V` do not change
/// the singlet fraction of the output, so these three parameters cover every
/// input.
pub fn input_state(theta: f64, phi: f64, lambda: f64) -> Vec4 {
    let v = sphere_unitary(theta, phi);
    let phi_l = schmidt_state(lambda);
    let k = crate::linalg::tensor_product(&Mat2::identity(), &v);
    k.mul_vec(&phi_l)
}

fn output_fidelity(c: &KrausChannel, x: &[f64]) -> f64 {
    singlet_fraction_value(&apply_to_half_pure(c, &input_state(x[0], x[1], x[2])))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputOracle {
    pub grid: f64,
    pub refined: f64,
    /// `(θ, φ, λ)` of the best input found.
    pub argmax: [f64; 3],
}

/// Brute-force `max_ψ F((I⊗Λ)(|ψ⟩⟨ψ|))` over a grid of inputs, then refined.
///
/// `steps = (n_θ, n_φ, n_λ)`; `λ` runs over `[½, 1]`.
pub fn preprocessed_fidelity_oracle(c: &KrausChannel, steps: [usize; 3]) -> InputOracle {
    let [nt, np, nl] = steps.map(|n| n.max(2));
    let mut top: Vec<(f64, [f64; 3])> = Vec::new();
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            for k in 0..nl {
                let lambda = 0.5 + 0.5 * k as f64 / (nl - 1) as f64;
                let x = [theta, phi, lambda];
                keep_top(&mut top, (output_fidelity(c, &x), x), 4);
            }
        }
    }
    let grid = top[0].0;
    let search = CoordinateSearch::new(PI / nt as f64, 1e-9, 6000).with_bounds(vec![None, None, Some((0.0, 1.0))]);
    let mut best = (grid, top[0].1);
    for (_, x0) in &top {
        let r = search.maximize(|x| output_fidelity(c, x), x0);
        if r.value > best.0 {
            best = (r.value, [r.x[0], r.x[1], r.x[2]]);
        }
    }
    InputOracle { grid, refined: best.0, argmax: best.1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Falsified,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub unital: bool,
    pub unital_deviation: f64,
    pub maximally_entangled: bool,
    pub schmidt_lambda: f64,
    pub verdict: Verdict,
}

/// Checks that the optimal input is maximally entangled exactly when the
/// channel is unital.
pub fn classify(c: &KrausChannel) -> Classification {
    let u = is_unital(c, UNITAL_TOL);
    let input = optimal_input_state(c);
    let lambda = input.schmidt.lambda();
    let mes = (lambda - 0.5).abs() < MES_TOL;
    let verdict = if input.degenerate {
        Verdict::Indeterminate
    } else if mes == u.unital {
        Verdict::Consistent
    } else {
        Verdict::Falsified
    };
    Classification {
        unital: u.unital,
        unital_deviation: u.deviation,
        maximally_entangled: mes,
        schmidt_lambda: lambda,
        verdict,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativityRelation {
    /// `|λ_max(J) − ½(1 + N(J))|`
    pub residual: f64,
    /// The relation is only claimed outside this regime.
    pub entanglement_breaking: bool,
}

pub fn negativity_relation_residual(c: &KrausChannel) -> NegativityRelation {
    let j = choi(c);
    let residual = (j.lambda_max() - 0.5 * (1.0 + negativity_of(j.matrix()))).abs();
    NegativityRelation { residual, entanglement_breaking: j.lambda_max() <= 0.5 + EB_TOL }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelNegativity {
    pub value: f64,
    /// Schmidt parameter `λ` of the best input.
    pub schmidt_lambda: f64,
    /// Euler angles of `V` in the best input `(I ⊗ V)(√λ|00⟩ + √(1−λ)|11⟩)`.
    pub euler: [f64; 3],
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativitySearch {
    pub restarts: usize,
    /// Evaluation budget per restart.
    pub budget: usize,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for NegativitySearch {
    fn default() -> Self {
        NegativitySearch { restarts: 16, budget: 5000, seed: 0, parallel: false }
    }
}

fn negativity_input(x: &[f64]) -> Vec4 {
    let v = su2_euler(x[1], x[2], x[3]);
    let k = crate::linalg::tensor_product(&Mat2::identity(), &v);
    k.mul_vec(&schmidt_state(x[0]))
}

/// `N(Λ) = max_ψ N((I⊗Λ)(|ψ⟩⟨ψ|))` by multistart coordinate search.
///
/// Restart 0 starts at `|Φ⁺⟩`, so the result never falls below `N(J)`.
pub fn channel_negativity(c: &KrausChannel, opts: &NegativitySearch) -> ChannelNegativity {
    let search = CoordinateSearch::new(0.25, 1e-7, opts.budget).with_bounds(vec![Some((0.0, 1.0)), None, None, None]);
    let start = |k: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
        if k == 0 {
            return vec![0.5, 0.0, 0.0, 0.0];
        }
        vec![
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..TAU),
        ]
    };
    let objective = |x: &[f64]| negativity_of(&apply_to_half_pure(c, &negativity_input(x)));
    let best = multistart(&search, opts.restarts, opts.seed, opts.parallel, start, objective);
    let l = best.x[0];
    ChannelNegativity {
        value: best.value,
        schmidt_lambda: l.max(1.0 - l),
        euler: [best.x[1], best.x[2], best.x[3]],
        evaluations: best.evaluations,
    }
}

// ---------------------------------------------------------------------------
// Aggregate report

fn c2(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtReport {
    pub coefficients: [f64; 2],
    pub local_bases: [[[[f64; 2]; 2]; 2]; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitalReport {
    pub flag: bool,
    pub deviation: f64,
}

/// Everything computed for one channel. Complex numbers are `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub channel: String,
    /// Kraus operators as analysed, each a 2×2 array of `[re, im]`.
    pub kraus: Vec<JsonMatrix>,
    #[serde(rename = "F_lambda")]
    pub f_lambda: f64,
    pub lambda_max: f64,
    pub entanglement_breaking: bool,
    pub psi0: [[f64; 2]; 4],
    pub psi0_schmidt: SchmidtReport,
    pub psi0_degenerate: bool,
    pub unital: UnitalReport,
    pub psi0_maximally_entangled: bool,
    pub classification: Verdict,
    pub f_tel: f64,
    #[serde(rename = "N_choi")]
    pub n_choi: f64,
    #[serde(rename = "N_channel")]
    pub n_channel: f64,
    #[serde(rename = "N_channel_schmidt_lambda")]
    pub n_channel_schmidt_lambda: f64,
    #[serde(rename = "F1")]
    pub f1: f64,
    #[serde(rename = "Fstar_choi")]
    pub fstar_choi: f64,
    /// `F(Λ) − F*(J)`; absent for entanglement-breaking channels.
    pub locc_gap: Option<f64>,
    pub locc_gap_strict: bool,
    pub residuals: BTreeMap<String, f64>,
}

/// Compute every derived quantity and the identity residuals for a channel.
pub fn report(c: &KrausChannel, negativity: &NegativitySearch) -> ChannelReport {
    let j = choi(c);
    let d = dual_choi(c);
    let opt = optimal_singlet_fraction(c);
    let input = optimal_input_state(c);
    let class = classify(c);
    let n_choi = negativity_of(j.matrix());
    let n_channel = channel_negativity(c, negativity);
    let fstar_choi = fstar_of(j.matrix()).value;
    let gap = if opt.entanglement_breaking { None } else { Some(opt.lambda_max - fstar_choi) };

    let mut residuals = BTreeMap::new();
    residuals.insert("dual_choi_swap_conjugate".to_string(), d.matrix().max_abs_diff(&swap_conjugate(j.matrix())));
    let spec = (0..4).map(|k| (j.eig().values[k] - d.eig().values[k]).abs()).fold(0.0, f64::max);
    residuals.insert("dual_choi_spectrum".to_string(), spec);
    if let Ok(r) = pt_extremes_residual_with(j.matrix(), |m| partial_transpose(m, crate::linalg::Subsystem::Second)) {
        residuals.insert("pt_min_plus_max".to_string(), r.abs());
    }
    if !opt.entanglement_breaking {
        residuals.insert("fidelity_negativity".to_string(), (opt.lambda_max - 0.5 * (1.0 + n_choi)).abs());
    }
    let out = apply_to_half_pure(c, &input.state);
    residuals.insert("optimal_input_fidelity".to_string(), (singlet_fraction_value(&out) - opt.lambda_max).abs());
    residuals.insert("preprocessed_fidelity".to_string(), (d.lambda_max() - opt.lambda_max).abs());
    residuals.insert("eigenvector_correspondence".to_string(), eigenvector_correspondence_check(c).residual);
    if let Ok(k) = kraus_from_choi(&j) {
        residuals.insert("kraus_trace_orthogonality".to_string(), trace_orthogonality_residual(&j, &k));
        residuals.insert("kraus_round_trip".to_string(), choi(&k).matrix().max_abs_diff(j.matrix()));
    }
    if !opt.entanglement_breaking {
        residuals.insert("negativity_below_channel".to_string(), (n_choi - n_channel.value).max(0.0));
    }

    ChannelReport {
        channel: c.describe(),
        kraus: c.kraus().iter().map(matrix_to_json).collect(),
        f_lambda: opt.value,
        lambda_max: opt.lambda_max,
        entanglement_breaking: opt.entanglement_breaking,
        psi0: input.state.map(c2),
        psi0_schmidt: SchmidtReport {
            coefficients: input.schmidt.coefficients,
            local_bases: [matrix_to_json(&input.schmidt.local_bases[0]), matrix_to_json(&input.schmidt.local_bases[1])],
        },
        psi0_degenerate: input.degenerate,
        unital: UnitalReport { flag: class.unital, deviation: class.unital_deviation },
        psi0_maximally_entangled: class.maximally_entangled,
        classification: class.verdict,
        f_tel: (2.0 * opt.value + 1.0) / 3.0,
        n_choi,
        n_channel: n_channel.value,
        n_channel_schmidt_lambda: n_channel.schmidt_lambda,
        f1: d.lambda_max(),
        fstar_choi,
        locc_gap: gap,
        locc_gap_strict: gap.is_some_and(|g| g > STRICT_GAP),
        residuals,
    }
}
