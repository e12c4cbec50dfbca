//! Recovers the joint distribution from four linear conditions: normalization,
//! the two partition-wise conservation targets (Bob's average given each of
//! Alice's outcomes) and the exchange symmetry `P(+−) = P(−+)`.

use crate::primitives::{Angle, Outcome};

use super::{conditional_average_hilbert, JointDistribution, Parity};

/// Unknowns are ordered `(P++, P+−, P−+, P−−)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationSystem {
    pub matrix: [[f64; 4]; 4],
    pub rhs: [f64; 4],
}

pub fn conservation_system(theta: Angle, parity: Parity) -> ConservationSystem {
    // Each of Alice's outcomes occurs half the time, so
    // P(A=+)·avg(B | A=+) = P++ − P+− and P(A=−)·avg(B | A=−) = P−+ − P−−.
    let given_plus = conditional_average_hilbert(parity, theta, Outcome::Plus);
    let given_minus = conditional_average_hilbert(parity, theta, Outcome::Minus);
    ConservationSystem {
        matrix: [
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, -1.0],
            [0.0, 1.0, -1.0, 0.0],
        ],
        rhs: [1.0, 0.5 * given_plus, 0.5 * given_minus, 0.0],
    }
}

impl ConservationSystem {
    /// Gaussian elimination with partial pivoting. Returns the solution and
    /// the determinant of the coefficient matrix.
    pub fn solve(&self) -> ([f64; 4], f64) {
        let mut m = self.matrix;
        let mut b = self.rhs;
        let mut det = 1.0;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
                .unwrap();
            if pivot != col {
                m.swap(pivot, col);
                b.swap(pivot, col);
                det = -det;
            }
            let p = m[col][col];
            det *= p;
            if p == 0.0 {
                return ([f64::NAN; 4], 0.0);
            }
            for row in col + 1..4 {
                let f = m[row][col] / p;
                if f != 0.0 {
                    let pivot = m[col];
                    for (v, pk) in m[row].iter_mut().zip(pivot).skip(col) {
                        *v -= f * pk;
                    }
                    b[row] -= f * b[col];
                }
            }
        }
        let mut x = [0.0; 4];
        for row in (0..4).rev() {
            let tail: f64 = (row + 1..4).map(|k| m[row][k] * x[k]).sum();
            x[row] = (b[row] - tail) / m[row][row];
        }
        (x, det)
    }
}

/// Derives the joint distribution at Hilbert angle `theta` from the
/// conservation constraints alone.
///
/// # Panics
///
/// If the constraint matrix is singular. It is constant and has
/// determinant −4, so this indicates a construction bug.
pub fn solve_conservation_state(theta: Angle, parity: Parity) -> JointDistribution {
    let (x, det) = conservation_system(theta, parity).solve();
    assert!(det.abs() > 1e-9, "conservation system is singular (det = {det})");
    JointDistribution { pp: x[0], pm: x[1], mp: x[2], mm: x[3] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::joint_distribution_hilbert;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn determinant_is_nonzero() {
        let (_, det) = conservation_system(Angle::ZERO, Parity::Unlike).solve();
        assert!((det.abs() - 4.0).abs() < 1e-12, "det = {det}");
    }

    #[test]
    fn unlike_at_zero_is_perfectly_anticorrelated() {
        let d = solve_conservation_state(Angle::ZERO, Parity::Unlike);
        let want = [0.0, 0.5, 0.5, 0.0];
        for (got, want) in d.cells().iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn like_at_zero_is_perfectly_correlated() {
        let d = solve_conservation_state(Angle::ZERO, Parity::Like);
        let want = [0.5, 0.0, 0.0, 0.5];
        for (got, want) in d.cells().iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn unlike_at_pi_over_three() {
        let d = solve_conservation_state(Angle::from_radians(FRAC_PI_3), Parity::Unlike);
        // sin²(π/3)/2 = 3/8, cos²(π/3)/2 = 1/8
        assert!((d.pp - 0.375).abs() < 1e-12);
        assert!((d.mm - 0.375).abs() < 1e-12);
        assert!((d.pm - 0.125).abs() < 1e-12);
        assert!((d.mp - 0.125).abs() < 1e-12);
        let closed = joint_distribution_hilbert(Parity::Unlike, Angle::from_radians(FRAC_PI_3));
        assert!(d.max_abs_diff(&closed) < 1e-12);
    }

    #[test]
    fn singular_system_reports_zero_determinant() {
        let sys = ConservationSystem { matrix: [[1.0; 4]; 4], rhs: [1.0; 4] };
        assert_eq!(sys.solve().1, 0.0);
    }
}
