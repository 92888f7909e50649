//! Seeded random markets for property sweeps.
//!
//! Scale-free quantities are drawn log-uniformly, costs as fractions of the
//! retail prices so every margin stays positive. `r0` is left at zero; place
//! it relative to a threshold with [`place_r0`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::market::{Market, MarketParams, MnoId};
use crate::solvers::{self, Region};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// A valid market with `r0 = 0`.
pub fn draw_params<R: Rng>(rng: &mut R) -> MarketParams {
    let q1 = log_uniform(rng, 10.0, 1e6);
    let q2 = log_uniform(rng, 10.0, 1e6);
    let p2 = log_uniform(rng, 5.0, 100.0);
    let p1 = p2 * rng.gen_range(1.02..1.6);
    let c1 = p1 * rng.gen_range(0.05..0.4);
    let c2 = p2 * rng.gen_range(0.05..0.4);
    let ct1 = p1 * rng.gen_range(0.02..0.3);
    let ct2 = p2 * rng.gen_range(0.02..0.3);
    MarketParams {
        q1,
        q2,
        p1,
        p2,
        c1,
        c2,
        ct1,
        ct2,
        cf1: p1 * q1 * rng.gen_range(0.0..0.05),
        cf2: p2 * q2 * rng.gen_range(0.0..0.05),
        eps: log_uniform(rng, 0.05, 1.0),
        gamma: rng.gen_range(0.0..0.95),
        r0: 0.0,
        ct0: p2 * rng.gen_range(0.0..0.2),
        cf0: p2 * (q1 + q2) * rng.gen_range(0.0..0.02),
    }
}

/// Which side of a threshold to put `r0` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
    At,
}

/// Sets `r0` to `threshold ± U(0.1, 1)·p2`, or exactly to the threshold.
/// Returns `None` when the result would be negative.
pub fn place_r0<R: Rng>(rng: &mut R, params: MarketParams, threshold: f64, side: Side) -> Option<MarketParams> {
    let gap = params.p2 * rng.gen_range(0.1..1.0);
    let r0 = match side {
        Side::Below => threshold - gap,
        Side::Above => threshold + gap,
        Side::At => threshold,
    };
    (r0 >= 0.0).then(|| params.with_r0(r0))
}

/// Whether every closed form stays in its natural domain: non-negative
/// wholesale prices, an unclamped retail price and a non-empty admissible
/// region. Property sweeps draw until they get such a market.
pub fn is_regular(m: &Market) -> bool {
    if Region::of(m).is_empty() {
        return false;
    }
    let mut solutions = vec![
        solvers::solve_part_nonpart(m, MnoId::One),
        solvers::solve_part_nonpart(m, MnoId::Two),
        solvers::solve_part_part_fs(m, MnoId::One),
        solvers::solve_part_part_fs(m, MnoId::Two),
        solvers::solve_part_part_ps(m),
    ];
    solutions.retain(|s| s.feasible);
    solutions.iter().all(|s| s.diagnostics.is_empty())
}

/// Draws regular markets until `accept` returns one, giving up after
/// `attempts` tries.
pub fn draw_until<R, F>(rng: &mut R, attempts: usize, mut accept: F) -> Option<Market>
where
    R: Rng,
    F: FnMut(&mut R, MarketParams) -> Option<MarketParams>,
{
    for _ in 0..attempts {
        let base = draw_params(rng);
        let Some(params) = accept(rng, base) else { continue };
        let Ok(m) = Market::new(params) else { continue };
        if is_regular(&m) {
            return Some(m);
        }
    }
    None
}
