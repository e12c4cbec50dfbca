use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BellLabel;

/// Two-qubit state in the σz product basis, ordered `|++⟩, |+−⟩, |−+⟩, |−−⟩`
/// (Alice first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub components: [Complex64; 4],
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn apply(&self, op: &[[Complex64; 4]; 4]) -> StateVector {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (row, o) in op.iter().zip(out.iter_mut()) {
            *o = row.iter().zip(&self.components).map(|(m, c)| m * c).sum();
        }
        StateVector { components: out }
    }
}

pub fn bell_state_vector(label: BellLabel) -> StateVector {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let components = match label {
        BellLabel::PsiMinus => [z, h, -h, z],
        BellLabel::PsiPlus => [z, h, h, z],
        BellLabel::PhiPlus => [h, z, z, h],
        BellLabel::PhiMinus => [h, z, z, -h],
    };
    StateVector { components }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn pauli(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Axis::X => [[o, one], [one, o]],
            Axis::Y => [[o, -i], [i, o]],
            Axis::Z => [[one, o], [o, -one]],
        }
    }
}

/// `exp(iθσ) = cos θ · I + i sin θ · σ`
fn su2(axis: Axis, theta: f64) -> [[Complex64; 2]; 2] {
    let s = axis.pauli();
    let c = Complex64::new(theta.cos(), 0.0);
    let is = Complex64::new(0.0, theta.sin());
    let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            let id = if r == k { c } else { Complex64::new(0.0, 0.0) };
            u[r][k] = id + is * s[r][k];
        }
    }
    u
}

fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

/// Applies `exp(iθσ) ⊗ exp(iθσ)` and returns `1 − |⟨ψ|U⊗U|ψ⟩|`, which is
/// zero exactly when the state is invariant up to a global phase.
pub fn su2_invariance_deviation(label: BellLabel, axis: Axis, theta: f64) -> f64 {
    let psi = bell_state_vector(label);
    let u = su2(axis, theta);
    let rotated = psi.apply(&kron(&u, &u));
    1.0 - psi.inner(&rotated).norm()
}
