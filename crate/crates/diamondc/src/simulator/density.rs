//! In-place density-matrix state used by the simulator. Kept independent of
//! the oracle's dense-matrix machinery so the two can cross-check each other.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub dim: usize,
    pub data: Vec<C64>,
}

impl DensityMatrix {
    /// All qubits in |0>.
    pub fn ground(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        data[0] = C64::new(1.0, 0.0);
        DensityMatrix {
            n_qubits,
            dim,
            data,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    /// rho <- U rho U^dagger for a single-qubit unitary U on `q`.
    pub fn apply_1q(&mut self, q: usize, u: &[[C64; 2]; 2]) {
        let dim = self.dim;
        let bit = 1usize << q;
        // Left multiply.
        for j in 0..dim {
            for i0 in 0..dim {
                if i0 & bit != 0 {
                    continue;
                }
                let i1 = i0 | bit;
                let a = self.at(i0, j);
                let b = self.at(i1, j);
                self.set(i0, j, u[0][0] * a + u[0][1] * b);
                self.set(i1, j, u[1][0] * a + u[1][1] * b);
            }
        }
        // Right multiply by U^dagger.
        for i in 0..dim {
            for j0 in 0..dim {
                if j0 & bit != 0 {
                    continue;
                }
                let j1 = j0 | bit;
                let a = self.at(i, j0);
                let b = self.at(i, j1);
                self.set(i, j0, a * u[0][0].conj() + b * u[0][1].conj());
                self.set(i, j1, a * u[1][0].conj() + b * u[1][1].conj());
            }
        }
    }

    /// rho <- U rho U^dagger where U applies `u` on `target` when `control`
    /// is |1> and identity otherwise.
    pub fn apply_controlled(&mut self, control: usize, target: usize, u: &[[C64; 2]; 2]) {
        let dim = self.dim;
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for j in 0..dim {
            for i0 in 0..dim {
                if i0 & cbit == 0 || i0 & tbit != 0 {
                    continue;
                }
                let i1 = i0 | tbit;
                let a = self.at(i0, j);
                let b = self.at(i1, j);
                self.set(i0, j, u[0][0] * a + u[0][1] * b);
                self.set(i1, j, u[1][0] * a + u[1][1] * b);
            }
        }
        for i in 0..dim {
            for j0 in 0..dim {
                if j0 & cbit == 0 || j0 & tbit != 0 {
                    continue;
                }
                let j1 = j0 | tbit;
                let a = self.at(i, j0);
                let b = self.at(i, j1);
                self.set(i, j0, a * u[0][0].conj() + b * u[0][1].conj());
                self.set(i, j1, a * u[1][0].conj() + b * u[1][1].conj());
            }
        }
    }

    /// rho <- (1-lambda) rho + lambda (I/2 (x) Tr_q rho): mixing toward the
    /// maximally mixed state on `q`. This single primitive realizes both the
    /// depolarizing channel (lambda = 4p/3) and idle decoherence
    /// (lambda = 1 - exp(-dt/T)).
    pub fn mix_toward_maximal(&mut self, q: usize, lambda: f64) {
        if lambda == 0.0 {
            return;
        }
        let dim = self.dim;
        let bit = 1usize << q;
        let keep = 1.0 - lambda;
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let v = self.at(i, j) * keep;
                let idx = i * dim + j;
                if (i & bit) == (j & bit) {
                    // Traced contribution, spread evenly across both levels.
                    let s = self.at(i & !bit, j & !bit) + self.at(i | bit, j | bit);
                    out[idx] = v + s * (lambda / 2.0);
                } else {
                    out[idx] = v;
                }
            }
        }
        self.data = out;
    }

    /// Depolarizing channel with total error probability p on qubit `q`:
    /// rho <- (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z).
    pub fn depolarize(&mut self, q: usize, p: f64) {
        self.mix_toward_maximal(q, 4.0 * p / 3.0);
    }

    /// Probability of reading |0> on `q`.
    pub fn prob_zero(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        (0..self.dim)
            .filter(|i| i & bit == 0)
            .map(|i| self.at(i, i).re)
            .sum()
    }

    /// Project onto the given Z outcome of `q` and renormalize. Returns the
    /// branch probability (the caller decides whether to take the branch).
    pub fn project(&mut self, q: usize, outcome_zero: bool) -> f64 {
        let bit = 1usize << q;
        let p = if outcome_zero {
            self.prob_zero(q)
        } else {
            1.0 - self.prob_zero(q)
        };
        let dim = self.dim;
        for i in 0..dim {
            for j in 0..dim {
                let keep_i = (i & bit == 0) == outcome_zero;
                let keep_j = (j & bit == 0) == outcome_zero;
                if !(keep_i && keep_j) {
                    self.set(i, j, C64::new(0.0, 0.0));
                }
            }
        }
        if p > 1e-12 {
            let inv = 1.0 / p;
            for v in self.data.iter_mut() {
                *v *= inv;
            }
        }
        p
    }

    /// Reset `q` to |0> (trace out and re-prepare).
    pub fn reset(&mut self, q: usize) {
        let dim = self.dim;
        let bit = 1usize << q;
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            if i & bit != 0 {
                continue;
            }
            for j in 0..dim {
                if j & bit != 0 {
                    continue;
                }
                out[i * dim + j] = self.at(i, j) + self.at(i | bit, j | bit);
            }
        }
        self.data = out;
    }

    /// Discard qubits `a` and `b` and install a fresh |Phi+> Bell pair.
    pub fn bell_reset(&mut self, a: usize, b: usize) {
        let dim = self.dim;
        let mask = (1usize << a) | (1usize << b);
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            if i & mask != 0 {
                continue;
            }
            for j in 0..dim {
                if j & mask != 0 {
                    continue;
                }
                let mut acc = C64::new(0.0, 0.0);
                for add in [0usize, 1 << a, 1 << b, mask] {
                    acc += self.at(i | add, j | add);
                }
                let half = acc * 0.5;
                for &ai in &[0usize, mask] {
                    for &bj in &[0usize, mask] {
                        out[(i | ai) * dim + (j | bj)] += half;
                    }
                }
            }
        }
        self.data = out;
    }

    /// Expectation of Z on `q`.
    pub fn expect_z(&self, q: usize) -> f64 {
        2.0 * self.prob_zero(q) - 1.0
    }

    /// Copy into the shared dense-matrix type (for physicality checks and
    /// fidelity computations).
    pub fn to_cmat(&self) -> crate::linalg::CMat {
        crate::linalg::CMat {
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    /// Reduced state over `keep` (ascending re-index).
    pub fn reduced(&self, keep: &[usize]) -> crate::linalg::CMat {
        self.to_cmat().partial_trace(self.n_qubits, keep)
    }
}

pub fn rotation_matrix(axis: char, theta: f64) -> [[C64; 2]; 2] {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    match axis {
        'x' => [
            [C64::new(c, 0.0), C64::new(0.0, -s)],
            [C64::new(0.0, -s), C64::new(c, 0.0)],
        ],
        'y' => [
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)],
        ],
        'z' => [
            [C64::from_polar(1.0, -theta / 2.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::from_polar(1.0, theta / 2.0)],
        ],
        _ => panic!("unknown axis {axis}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ground_state_trace_one() {
        let rho = DensityMatrix::ground(3);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!((rho.prob_zero(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_rotation_flips() {
        let mut rho = DensityMatrix::ground(1);
        rho.apply_1q(0, &rotation_matrix('x', PI));
        assert!(rho.prob_zero(0) < 1e-12);
    }

    #[test]
    fn depolarize_zero_is_identity() {
        let mut rho = DensityMatrix::ground(2);
        rho.apply_1q(0, &rotation_matrix('y', 0.7));
        let before = rho.data.clone();
        rho.depolarize(0, 0.0);
        assert_eq!(rho.data, before);
    }

    #[test]
    fn depolarize_three_quarters_fully_mixes() {
        let mut rho = DensityMatrix::ground(1);
        rho.depolarize(0, 0.75);
        assert!((rho.at(0, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.at(1, 1).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn depolarize_shrinks_x_expectation_by_closed_form() {
        // <X> on |+> after depol(p) must be exactly 1 - 4p/3.
        let p = 1e-3;
        let mut rho = DensityMatrix::ground(1);
        rho.apply_1q(0, &rotation_matrix('y', std::f64::consts::FRAC_PI_2));
        rho.depolarize(0, p);
        // <X> = 2 Re rho01 for this state.
        let x = 2.0 * rho.at(0, 1).re;
        assert!((x - (1.0 - 4.0 * p / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn idle_decay_z_closed_form() {
        // <Z> on |0> after mixing with lambda = 1 - exp(-dt/T) at dt = T.
        let lambda = 1.0 - (-1.0f64).exp();
        let mut rho = DensityMatrix::ground(1);
        rho.mix_toward_maximal(0, lambda);
        assert!((rho.expect_z(0) - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn controlled_rotation_only_fires_on_one() {
        let mut rho = DensityMatrix::ground(2);
        rho.apply_controlled(0, 1, &rotation_matrix('x', PI));
        assert!(
            (rho.prob_zero(1) - 1.0).abs() < 1e-12,
            "control |0> must not fire"
        );
        rho.apply_1q(0, &rotation_matrix('x', PI));
        rho.apply_controlled(0, 1, &rotation_matrix('x', PI));
        assert!(rho.prob_zero(1) < 1e-12, "control |1> must fire");
    }

    #[test]
    fn projection_renormalizes() {
        let mut rho = DensityMatrix::ground(1);
        rho.apply_1q(0, &rotation_matrix('y', std::f64::consts::FRAC_PI_2));
        let p = rho.project(0, true);
        assert!((p - 0.5).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!((rho.prob_zero(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_reset_installs_pair() {
        let mut rho = DensityMatrix::ground(2);
        rho.apply_1q(0, &rotation_matrix('x', 1.1));
        rho.bell_reset(0, 1);
        assert!((rho.at(0, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.at(0, 3).re - 0.5).abs() < 1e-12);
        assert!((rho.at(3, 3).re - 0.5).abs() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reset_preserves_spectator_correlations() {
        // Entangle 0 and 1, reset 0: qubit 1 keeps its marginal.
        let mut rho = DensityMatrix::ground(2);
        rho.apply_1q(0, &rotation_matrix('y', std::f64::consts::FRAC_PI_2));
        rho.apply_controlled(0, 1, &rotation_matrix('x', PI));
        rho.reset(0);
        assert!((rho.prob_zero(0) - 1.0).abs() < 1e-12);
        assert!((rho.prob_zero(1) - 0.5).abs() < 1e-12);
    }
}
