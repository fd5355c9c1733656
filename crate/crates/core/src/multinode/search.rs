//! Best-effort global search for `max_{‖w‖=1} minᵢ w†Aᵢw`.

use super::WeightedInstance;
use crate::error::{Error, Result};
use crate::linalg::{max_eigenpair, sample_unit_sphere, ComplexVector, HermitianMatrix};
use crate::rng::RandomStream;

pub const DEFAULT_SEARCH_BUDGET: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Uniform samples on the unit sphere.
    pub budget: usize,
    pub restarts: usize,
    pub iterations: usize,
    /// Initial ascent step, relative to `λ_max` of the active constraint.
    pub initial_step: f64,
    /// Geometric step decay per iteration.
    pub decay: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SEARCH_BUDGET,
            restarts: 20,
            iterations: 500,
            initial_step: 0.5,
            decay: 0.99,
        }
    }
}

/// Search with the default restart schedule and `budget` sphere samples.
pub fn global_search(
    instance: &WeightedInstance,
    budget: usize,
    stream: &mut RandomStream,
) -> Result<(f64, ComplexVector)> {
    global_search_with(
        instance,
        &SearchOptions {
            budget,
            ..SearchOptions::default()
        },
        stream,
    )
}

/// Incumbent over three candidate families:
///
/// * `budget` uniform sphere samples,
/// * the top eigenvector of every `Aᵢ` (stationary points where one constraint
///   is active),
/// * projected ascent on the active constraint's gradient `2Aᵢw`, renormalized
///   each step. The first restart starts at the best eigenvector candidate,
///   the rest at random points.
///
/// Samples and restarts use separate child streams, so for a fixed stream the
/// result never gets worse as the budget grows.
pub fn global_search_with(
    instance: &WeightedInstance,
    opts: &SearchOptions,
    stream: &mut RandomStream,
) -> Result<(f64, ComplexVector)> {
    if opts.budget == 0 {
        return Err(Error::validation("search budget must be at least 1"));
    }
    let m = instance.antennas();
    let a = instance.matrices();
    let norms: Vec<f64> = a
        .iter()
        .map(|ai| max_eigenpair(ai).map(|(l, _)| l))
        .collect::<Result<_>>()?;

    let mut sampler = stream.derive(1);
    let mut best_w = sample_unit_sphere(m, &mut sampler)?;
    let mut best = instance.min_value(&best_w);
    for _ in 1..opts.budget {
        let w = sample_unit_sphere(m, &mut sampler)?;
        if let Some(v) = min_value_above(a, &w, best) {
            best = v;
            best_w = w;
        }
    }

    let mut seed_w = None;
    let mut seed_v = f64::NEG_INFINITY;
    for ai in a {
        let (_, w) = max_eigenpair(ai)?;
        let v = instance.min_value(&w);
        if v > seed_v {
            seed_v = v;
            seed_w = Some(w);
        }
    }
    let seed_w = seed_w.expect("at least one sensor");
    if seed_v > best {
        best = seed_v;
        best_w = seed_w.clone();
    }

    let mut starts = stream.derive(2);
    for r in 0..opts.restarts {
        let start = if r == 0 {
            seed_w.clone()
        } else {
            sample_unit_sphere(m, &mut starts)?
        };
        let (v, w) = ascend(instance, &norms, start, opts);
        if v > best {
            best = v;
            best_w = w;
        }
    }
    Ok((best, best_w))
}

/// `minᵢ w†Aᵢw` if it exceeds `floor`, stopping at the first term that does not.
fn min_value_above(a: &[HermitianMatrix], w: &ComplexVector, floor: f64) -> Option<f64> {
    let mut v = f64::INFINITY;
    for ai in a {
        v = v.min(ai.quadratic_form(w));
        if v <= floor {
            return None;
        }
    }
    Some(v)
}

fn ascend(
    instance: &WeightedInstance,
    norms: &[f64],
    mut w: ComplexVector,
    opts: &SearchOptions,
) -> (f64, ComplexVector) {
    let a = instance.matrices();
    let (mut k, mut v) = active(a, &w);
    let mut best_v = v;
    let mut best_w = w.clone();
    let mut step = opts.initial_step;
    for _ in 0..opts.iterations {
        if norms[k] <= 0.0 {
            break;
        }
        let grad = a[k].mul_vec(&w);
        let moved = w.add(&grad.scale((step / norms[k]).into()));
        let Some(next) = moved.normalized() else {
            break;
        };
        w = next;
        (k, v) = active(a, &w);
        if v > best_v {
            best_v = v;
            best_w = w.clone();
        }
        step *= opts.decay;
    }
    (best_v, best_w)
}

/// Index and value of the smallest quadratic form.
fn active(a: &[HermitianMatrix], w: &ComplexVector) -> (usize, f64) {
    let mut k = 0;
    let mut v = f64::INFINITY;
    for (i, ai) in a.iter().enumerate() {
        let q = ai.quadratic_form(w);
        if q < v {
            k = i;
            v = q;
        }
    }
    (k, v)
}
