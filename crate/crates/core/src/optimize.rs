//! Derivative-free maximisation: pattern search and seeded multistart.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Compass search with step halving.
///
/// Each coordinate is probed at `±step`; an improving move is repeated with a
/// doubled stride while it keeps improving. When a full pass fails the step is
/// halved. Stops at `min_step` or after `budget` objective evaluations.
#[derive(Clone, Debug)]
pub struct CoordinateSearch {
    pub initial_step: f64,
    pub min_step: f64,
    pub budget: usize,
    /// Per-coordinate box; `None` leaves a coordinate unbounded (angles).
    pub bounds: Vec<Option<(f64, f64)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

impl CoordinateSearch {
    pub fn new(initial_step: f64, min_step: f64, budget: usize) -> Self {
        CoordinateSearch { initial_step, min_step, budget, bounds: Vec::new() }
    }

    pub fn with_bounds(mut self, bounds: Vec<Option<(f64, f64)>>) -> Self {
        self.bounds = bounds;
        self
    }

    fn clamp(&self, i: usize, v: f64) -> f64 {
        match self.bounds.get(i).copied().flatten() {
            Some((lo, hi)) => v.clamp(lo, hi),
            None => v,
        }
    }

    pub fn maximize<F>(&self, mut f: F, x0: &[f64]) -> SearchResult
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut x: Vec<f64> = x0.iter().enumerate().map(|(i, &v)| self.clamp(i, v)).collect();
        let mut best = f(&x);
        let mut evals = 1;
        let mut step = self.initial_step;
        let mut trial = x.clone();
        'outer: while step >= self.min_step {
            let mut improved = false;
            for i in 0..x.len() {
                for dir in [1.0, -1.0] {
                    let mut stride = step;
                    loop {
                        if evals >= self.budget {
                            break 'outer;
                        }
                        let cand = self.clamp(i, x[i] + dir * stride);
                        if cand == x[i] {
                            break;
                        }
                        trial.copy_from_slice(&x);
                        trial[i] = cand;
                        let v = f(&trial);
                        evals += 1;
                        if v > best {
                            best = v;
                            x[i] = cand;
                            improved = true;
                            stride *= 2.0;
                        } else {
                            break;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        SearchResult { x, value: best, evaluations: evals }
    }
}

/// SplitMix64 step, used to derive independent per-restart seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `restarts` searches and keeps the best (lowest index wins ties).
///
/// `start` maps a restart index and its private RNG to a starting point; the
/// result is identical whether or not `parallel` is set.
pub fn multistart<S, F>(
    search: &CoordinateSearch,
    restarts: usize,
    master_seed: u64,
    parallel: bool,
    start: S,
    objective: F,
) -> SearchResult
where
    S: Fn(usize, &mut ChaCha8Rng) -> Vec<f64> + Sync,
    F: Fn(&[f64]) -> f64 + Sync,
{
    let run = |k: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, k as u64));
        let x0 = start(k, &mut rng);
        search.maximize(&objective, &x0)
    };
    let results: Vec<SearchResult> = if parallel {
        (0..restarts.max(1)).into_par_iter().map(run).collect()
    } else {
        (0..restarts.max(1)).map(run).collect()
    };
    let total: usize = results.iter().map(|r| r.evaluations).sum();
    let mut best =
        results.into_iter().reduce(|a, b| if b.value > a.value { b } else { a }).expect("at least one restart");
    best.evaluations = total;
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_peak() {
        let s = CoordinateSearch::new(0.5, 1e-9, 100_000);
        let r = s.maximize(|x| -(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 1.2).powi(2), &[0.0, 0.0]);
        assert!((r.x[0] - 0.3).abs() < 1e-8);
        assert!((r.x[1] + 1.2).abs() < 1e-8);
    }

    #[test]
    fn respects_bounds() {
        let s = CoordinateSearch::new(0.25, 1e-9, 10_000).with_bounds(vec![Some((0.0, 1.0))]);
        let r = s.maximize(|x| x[0], &[0.5]);
        assert_eq!(r.x[0], 1.0);
    }

    #[test]
    fn respects_budget() {
        let s = CoordinateSearch::new(1.0, 0.0, 50);
        let r = s.maximize(|x| -x[0].abs(), &[100.0]);
        assert!(r.evaluations <= 50);
    }

    #[test]
    fn multistart_parallel_matches_serial() {
        let s = CoordinateSearch::new(0.5, 1e-6, 2000);
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos();
        let start = |_k: usize, rng: &mut ChaCha8Rng| {
            use rand::Rng;
            vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]
        };
        let a = multistart(&s, 8, 11, false, start, f);
        let b = multistart(&s, 8, 11, true, start, f);
        assert_eq!(a, b);
        assert!(a.value > 1.0 - 1e-9);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
