//! Numerical version of the eigenbasis-configuration argument: choose
//! Hilbert-space basis angles so that quantum statistics reproduce the last
//! three PR cells exactly, then measure how far the first cell is from the
//! PR value.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::primitives::Angle;
use crate::quantum::{joint_distribution_hilbert, Parity};
use crate::settings::Slot;

use super::pr_distribution;

const GRID: usize = 3600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenbasisReport {
    pub parity: Parity,
    /// Hilbert-space basis angles `(a, a′, b, b′)`, with `a′` pinned to 0.
    pub basis_angles: [f64; 4],
    /// Largest mismatch between quantum and PR correlations over the
    /// three matched cells.
    pub residual: f64,
    pub first_cell_quantum: f64,
    pub first_cell_pr: f64,
    pub contradiction: f64,
}

fn quantum_correlation(parity: Parity, alice: f64, bob: f64) -> f64 {
    joint_distribution_hilbert(parity, Angle::from_radians(alice - bob)).correlation()
}

fn pr_correlation(a: Slot, b: Slot) -> f64 {
    pr_distribution(a, b).correlation()
}

/// Minimizes `f` over one period `[0, π)` by grid search followed by
/// golden-section refinement around the best grid point.
fn minimize_periodic(f: impl Fn(f64) -> f64) -> f64 {
    let step = PI / GRID as f64;
    let mut best = 0.0;
    let mut best_val = f(0.0);
    for i in 1..GRID {
        let x = i as f64 * step;
        let v = f(x);
        if v < best_val {
            best = x;
            best_val = v;
        }
    }
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = 0.5 * (lo + hi);
    if f(mid) <= best_val {
        mid
    } else {
        best
    }
}

pub fn pr_eigenbasis_contradiction(parity: Parity) -> EigenbasisReport {
    use Slot::{Primed, Unprimed};

    let a_prime = 0.0;
    let b_prime = minimize_periodic(|x| (quantum_correlation(parity, a_prime, x) - pr_correlation(Primed, Primed)).abs());
    let b = minimize_periodic(|x| (quantum_correlation(parity, a_prime, x) - pr_correlation(Primed, Unprimed)).abs());
    let a = minimize_periodic(|x| (quantum_correlation(parity, x, b_prime) - pr_correlation(Unprimed, Primed)).abs());

    let residual = [
        (quantum_correlation(parity, a, b_prime) - pr_correlation(Unprimed, Primed)).abs(),
        (quantum_correlation(parity, a_prime, b) - pr_correlation(Primed, Unprimed)).abs(),
        (quantum_correlation(parity, a_prime, b_prime) - pr_correlation(Primed, Primed)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let first_cell_quantum = quantum_correlation(parity, a, b);
    let first_cell_pr = pr_correlation(Unprimed, Unprimed);
    EigenbasisReport {
        parity,
        basis_angles: [a, a_prime, b, b_prime],
        residual,
        first_cell_quantum,
        first_cell_pr,
        contradiction: (first_cell_pr - first_cell_quantum).abs(),
    }
}
