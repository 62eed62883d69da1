//! Dense complex matrices and the small amount of numerical linear algebra
//! the oracle and simulator need: Hermitian eigenvalues (via a real-symmetric
//! embedding and cyclic Jacobi), matrix square roots, trace norms, fidelity,
//! and Cholesky-based positivity checks.
//!
//! Everything here targets matrices of dimension at most a few hundred
//! (density matrices and Choi matrices for <= 6 qubits), so the simple
//! O(n^3) algorithms are the right tool.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        let mut m = CMat::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "ragged matrix literal");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product; `self` supplies the high-order index bits.
    pub fn kron(&self, other: &CMat) -> CMat {
        let n = self.dim;
        let m = other.dim;
        let mut out = CMat::zeros(n * m);
        for ia in 0..n {
            for ja in 0..n {
                let a = self[(ia, ja)];
                if a == ZERO {
                    continue;
                }
                for ib in 0..m {
                    for jb in 0..m {
                        out[(ia * m + ib, ja * m + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.adjoint().mul(self);
        prod.max_abs_diff(&CMat::identity(self.dim)) < tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) < tol
    }

    /// True if `self` and `other` are equal up to a global phase, i.e.
    /// |tr(A† B)| = dim within `tol`. Both must be unitary for this test to
    /// mean anything.
    pub fn equal_up_to_phase(&self, other: &CMat, tol: f64) -> bool {
        assert_eq!(self.dim, other.dim);
        let t = self.adjoint().mul(other).trace();
        (t.norm() - self.dim as f64).abs() < tol
    }

    /// Partial trace over the qubits NOT listed in `keep` (little-endian bit
    /// convention: qubit k is bit k of the basis index). The kept qubits are
    /// re-indexed in ascending order of their original index.
    pub fn partial_trace(&self, n_qubits: usize, keep: &[usize]) -> CMat {
        assert_eq!(self.dim, 1 << n_qubits);
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let traced: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let expand = |small: usize, qubits: &[usize]| -> usize {
            let mut full = 0usize;
            for (pos, q) in qubits.iter().enumerate() {
                if (small >> pos) & 1 == 1 {
                    full |= 1 << q;
                }
            }
            full
        };
        let mut out = CMat::zeros(kd);
        for i in 0..kd {
            let ik = expand(i, &keep);
            for j in 0..kd {
                let jk = expand(j, &keep);
                let mut acc = ZERO;
                for t in 0..td {
                    let tf = expand(t, &traced);
                    acc += self[(ik | tf, jk | tf)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

// ── Hermitian eigenproblems via real-symmetric embedding ────────────────────
//
// A Hermitian H = A + iB embeds as the real symmetric matrix
//   E = [[A, -B], [B, A]]
// whose spectrum is that of H with every eigenvalue doubled, and matrix
// functions commute with the embedding: f(E) = embed(f(H)).

fn embed_hermitian(h: &CMat) -> Vec<f64> {
    let n = h.dim;
    let d = 2 * n;
    let mut e = vec![0.0; d * d];
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            e[i * d + j] = v.re;
            e[i * d + (j + n)] = -v.im;
            e[(i + n) * d + j] = v.im;
            e[(i + n) * d + (j + n)] = v.re;
        }
    }
    e
}

/// Cyclic Jacobi on a real symmetric matrix. Returns eigenvalues and, when
/// `want_vectors`, the orthonormal eigenvectors as columns of a d x d matrix.
fn jacobi_symmetric(mut a: Vec<f64>, d: usize, want_vectors: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut v = if want_vectors {
        let mut id = vec![0.0; d * d];
        for i in 0..d {
            id[i * d + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };
    let scale: f64 = (0..d)
        .map(|i| a[i * d + i].abs())
        .fold(1e-300, f64::max)
        .max(a.iter().cloned().map(f64::abs).fold(0.0, f64::max));
    let tol = 1e-15 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a[p * d + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                if let Some(vm) = v.as_mut() {
                    for k in 0..d {
                        let vkp = vm[k * d + p];
                        let vkq = vm[k * d + q];
                        vm[k * d + p] = c * vkp - s * vkq;
                        vm[k * d + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let eig = (0..d).map(|i| a[i * d + i]).collect();
    (eig, v)
}

/// Eigenvalues of the doubled real embedding of a Hermitian matrix
/// (each eigenvalue of `h` appears twice), ascending.
fn embedded_eigenvalues(h: &CMat) -> Vec<f64> {
    let (mut eig, _) = jacobi_symmetric(embed_hermitian(h), 2 * h.dim, false);
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    embedded_eigenvalues(h).into_iter().step_by(2).collect()
}

pub fn min_eigenvalue(h: &CMat) -> f64 {
    embedded_eigenvalues(h)[0]
}

/// Trace norm ||H||_1 = sum |eigenvalues| of a Hermitian matrix.
pub fn trace_norm_hermitian(h: &CMat) -> f64 {
    embedded_eigenvalues(h).iter().map(|e| e.abs()).sum::<f64>() / 2.0
}

/// Principal square root of a Hermitian PSD matrix (small negative
/// eigenvalues from floating error are clipped to zero).
pub fn hermitian_sqrt(h: &CMat) -> CMat {
    let n = h.dim;
    let d = 2 * n;
    let (eig, vecs) = jacobi_symmetric(embed_hermitian(h), d, true);
    let v = vecs.unwrap();
    // f(E) = V f(Λ) V^T, then un-embed the top-left/bottom-left blocks.
    let mut fe = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                let lam = eig[k].max(0.0).sqrt();
                acc += v[i * d + k] * lam * v[j * d + k];
            }
            fe[i * d + j] = acc;
        }
    }
    let mut out = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = C64::new(fe[i * d + j], fe[(i + n) * d + j]);
        }
    }
    out
}

/// Uhlmann fidelity F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
pub fn fidelity(rho: &CMat, sigma: &CMat) -> f64 {
    assert_eq!(rho.dim, sigma.dim, "dimension mismatch");
    let s = hermitian_sqrt(rho);
    let m = s.mul(sigma).mul(&s);
    let tr: f64 = embedded_eigenvalues(&m)
        .iter()
        .map(|e| e.max(0.0).sqrt())
        .sum::<f64>()
        / 2.0;
    (tr * tr).clamp(0.0, 1.0 + 1e-9)
}

/// Cholesky-based positivity check: true if all eigenvalues >= -tol.
pub fn is_positive_semidefinite(h: &CMat, tol: f64) -> bool {
    let n = h.dim;
    // Attempt Cholesky of h + tol*I; success implies min eigenvalue >= -tol.
    let mut a = h.clone();
    for i in 0..n {
        a[(i, i)] += C64::new(tol, 0.0);
    }
    let mut l = CMat::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                // Hermitian diagonal; small imaginary drift is rounding.
                if sum.re < -tol * 1e-3 {
                    return false;
                }
                let d = sum.re.max(0.0).sqrt();
                if d == 0.0 {
                    // Zero pivot: remaining column must be ~zero too.
                    l[(i, j)] = ZERO;
                } else {
                    l[(i, j)] = C64::new(d, 0.0);
                }
            } else {
                let piv = l[(j, j)];
                if piv.norm() < 1e-300 {
                    if sum.norm() > tol.max(1e-12) * 10.0 {
                        return false;
                    }
                    l[(i, j)] = ZERO;
                } else {
                    l[(i, j)] = sum / piv;
                }
            }
        }
    }
    true
}

// ── Common single-qubit matrices ─────────────────────────────────────────────

pub fn pauli_x() -> CMat {
    CMat::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> CMat {
    CMat::from_rows(&[&[ZERO, C64::new(0.0, -1.0)], &[C64::new(0.0, 1.0), ZERO]])
}

pub fn pauli_z() -> CMat {
    CMat::from_rows(&[&[ONE, ZERO], &[ZERO, C64::new(-1.0, 0.0)]])
}

pub fn hadamard() -> CMat {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMat::from_rows(&[&[h, h], &[h, -h]])
}

pub fn rot_x(theta: f64) -> CMat {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    CMat::from_rows(&[&[c, s], &[s, c]])
}

pub fn rot_y(theta: f64) -> CMat {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    CMat::from_rows(&[
        &[C64::new(c, 0.0), C64::new(-s, 0.0)],
        &[C64::new(s, 0.0), C64::new(c, 0.0)],
    ])
}

pub fn rot_z(theta: f64) -> CMat {
    CMat::from_rows(&[
        &[C64::from_polar(1.0, -theta / 2.0), ZERO],
        &[ZERO, C64::from_polar(1.0, theta / 2.0)],
    ])
}

pub fn rot_axis(axis: char, theta: f64) -> CMat {
    match axis {
        'x' => rot_x(theta),
        'y' => rot_y(theta),
        'z' => rot_z(theta),
        _ => panic!("unknown rotation axis {axis}"),
    }
}

/// ZYZ Euler angles: U = e^{i alpha} Rz(phi2) Ry(beta) Rz(phi1),
/// returned as (phi1, beta, phi2, alpha). Angles land in (-pi, pi].
pub fn zyz_decompose(u: &CMat) -> (f64, f64, f64, f64) {
    assert_eq!(u.dim, 2);
    let norm_angle = |a: f64| {
        let two_pi = std::f64::consts::TAU;
        let mut x = a % two_pi;
        if x <= -std::f64::consts::PI {
            x += two_pi;
        } else if x > std::f64::consts::PI {
            x -= two_pi;
        }
        x
    };
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha0 = det.arg() / 2.0;
    // Strip the phase so we work in SU(2). The SU(2) matrix has the form
    //   [[ c e^{-i(phi1+phi2)/2},  -s e^{ i(phi1-phi2)/2} ],
    //    [ s e^{-i(phi1-phi2)/2},   c e^{ i(phi1+phi2)/2} ]]
    // with c = cos(beta/2), s = sin(beta/2).
    let g = C64::from_polar(1.0, -alpha0);
    let a = u[(0, 0)] * g;
    let b = u[(1, 0)] * g;
    let beta = 2.0 * b.norm().atan2(a.norm());
    let (phi1, phi2) = if b.norm() < 1e-12 {
        // Diagonal: only the sum of the z angles is determined.
        (norm_angle(-2.0 * a.arg()), 0.0)
    } else if a.norm() < 1e-12 {
        // Anti-diagonal: only the difference matters.
        (norm_angle(-2.0 * b.arg()), 0.0)
    } else {
        let sum = -2.0 * a.arg();
        let diff = -2.0 * b.arg();
        (
            norm_angle((sum + diff) / 2.0),
            norm_angle((sum - diff) / 2.0),
        )
    };
    // Normalizing the z angles can flip the SU(2) sign; recover the exact
    // global phase from the residual.
    let v = rot_z(phi2).mul(&rot_y(beta)).mul(&rot_z(phi1));
    let alpha = v.adjoint().mul(u).trace().arg();
    (phi1, beta, phi2, alpha)
}
