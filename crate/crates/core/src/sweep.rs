//! Parameter sweeps rendered as CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::{apply_to_half_pure, is_unital, KrausChannel};
use crate::choi::choi;
use crate::entmetrics::negativity_of;
use crate::error::{Error, Result};
use crate::locc::fstar_of;
use crate::oneshot::{channel_negativity, optimal_input_state, optimal_singlet_fraction, NegativitySearch};
use crate::tolerances::UNITAL_TOL;

/// Columns a sweep can emit.
pub const COLUMNS: &[&str] = &[
    "F_lambda",
    "lambda_max",
    "f_tel",
    "F1",
    "N_choi",
    "N_psi0",
    "N_channel",
    "Fstar_choi",
    "locc_gap",
    "schmidt_lambda",
    "unital_deviation",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub channel_name: String,
    /// Name of the swept parameter.
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub columns: Vec<String>,
    /// Parameters held fixed.
    pub fixed: BTreeMap<String, f64>,
    /// Seed for the channel-negativity search.
    pub seed: u64,
}

impl SweepSpec {
    pub fn check(&self) -> Result<()> {
        if !(self.from <= self.to) {
            return Err(Error::InvalidInput(format!("--from {} exceeds --to {}", self.from, self.to)));
        }
        if self.steps < 2 {
            return Err(Error::InvalidInput("--steps must be at least 2".into()));
        }
        if self.columns.is_empty() {
            return Err(Error::InvalidInput("no columns requested".into()));
        }
        if let Some(bad) = self.columns.iter().find(|c| !COLUMNS.contains(&c.as_str())) {
            return Err(Error::InvalidInput(format!("unknown column `{bad}`; available: {}", COLUMNS.join(","))));
        }
        // resolves the constructor name and parameter set up front
        self.channel_at(self.from)?;
        Ok(())
    }

    pub fn value_at(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            return self.to;
        }
        self.from + (self.to - self.from) * k as f64 / (self.steps - 1) as f64
    }

    fn channel_at(&self, x: f64) -> Result<KrausChannel> {
        let mut params = self.fixed.clone();
        params.insert(self.param.clone(), x);
        KrausChannel::from_name(&self.channel_name, &params)
    }
}

fn column_value(c: &KrausChannel, name: &str, seed: u64) -> Option<f64> {
    let opt = || optimal_singlet_fraction(c);
    Some(match name {
        "F_lambda" => opt().value,
        "lambda_max" => opt().lambda_max,
        "f_tel" => (2.0 * opt().value + 1.0) / 3.0,
        "F1" => crate::choi::dual_choi(c).lambda_max(),
        "N_choi" => negativity_of(choi(c).matrix()),
        "N_psi0" => negativity_of(&apply_to_half_pure(c, &optimal_input_state(c).state)),
        "N_channel" => channel_negativity(c, &NegativitySearch { seed, ..Default::default() }).value,
        "Fstar_choi" => fstar_of(choi(c).matrix()).value,
        "locc_gap" => {
            let o = opt();
            if o.entanglement_breaking {
                return None;
            }
            o.lambda_max - fstar_of(choi(c).matrix()).value
        }
        "schmidt_lambda" => optimal_input_state(c).schmidt.lambda(),
        "unital_deviation" => is_unital(c, UNITAL_TOL).deviation,
        _ => return None,
    })
}

/// Render the sweep. Rows are computed independently (on `workers` threads if
/// given) and emitted in parameter order; undefined cells are left empty.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<String> {
    spec.check()?;
    let row = |k: usize| -> Result<String> {
        let x = spec.value_at(k);
        let c = spec.channel_at(x)?;
        let mut line = format!("{x}");
        for col in &spec.columns {
            line.push(',');
            if let Some(v) = column_value(&c, col, spec.seed) {
                write!(line, "{v}").expect("write to String");
            }
        }
        Ok(line)
    };
    let rows: Vec<Result<String>> = match workers {
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            pool.install(|| (0..spec.steps).into_par_iter().map(row).collect())
        }
        _ => (0..spec.steps).map(row).collect(),
    };
    let mut out = String::from("param");
    for col in &spec.columns {
        out.push(',');
        out.push_str(col);
    }
    out.push('\n');
    for r in rows {
        out.push_str(&r?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, steps: usize, columns: &[&str]) -> SweepSpec {
        SweepSpec {
            channel_name: name.into(),
            param: "p".into(),
            from: 0.0,
            to: 1.0,
            steps,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            fixed: BTreeMap::new(),
            seed: 0,
        }
    }

    #[test]
    fn amplitude_damping_row() {
        let csv = run_sweep(&spec("amplitude_damping", 11, &["F_lambda", "N_choi", "N_psi0"]), None).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "param,F_lambda,N_choi,N_psi0");
        assert_eq!(lines.len(), 12);
        let row: Vec<f64> = lines[6].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], 0.5);
        assert!((row[1] - 0.75).abs() < 1e-12);
        assert!((row[2] - 0.5).abs() < 1e-12);
        assert!((row[3] - 0.520518).abs() < 1e-6);
    }

    #[test]
    fn depolarizing_floor() {
        let csv = run_sweep(&spec("depolarizing", 5, &["F_lambda"]), None).unwrap();
        let vals: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        let expected = [1.0, 0.8125, 0.625, 0.5, 0.5];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12, "{v} {e}");
        }
    }

    #[test]
    fn two_steps_two_rows() {
        let csv = run_sweep(&spec("bit_flip", 2, &["F_lambda"]), None).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn bad_specs() {
        assert!(run_sweep(&spec("amplitude_damping", 3, &["nope"]), None).is_err());
        assert!(run_sweep(&spec("amplitude_damping", 1, &["F_lambda"]), None).is_err());
        assert!(run_sweep(&spec("nope", 3, &["F_lambda"]), None).is_err());
        let mut s = spec("amplitude_damping", 3, &["F_lambda"]);
        s.from = 0.9;
        s.to = 0.1;
        assert!(run_sweep(&s, None).is_err());
    }

    #[test]
    fn deterministic_and_worker_independent() {
        let s = spec("amplitude_damping", 4, &["N_channel", "locc_gap"]);
        let a = run_sweep(&s, None).unwrap();
        assert_eq!(a, run_sweep(&s, None).unwrap());
        assert_eq!(a, run_sweep(&s, Some(2)).unwrap());
    }
}
