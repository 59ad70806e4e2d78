//! Collective angular momentum: the operators `J_l = (1/2) sum_k sigma_l^(k)`,
//! first and second moments, the correlation and covariance matrices, the
//! average two-qubit state and the moment-zeroing twirl.

use crate::linalg::mat3::{self, Mat3, Vec3};
use crate::linalg::CMat;
use crate::op::{kron, partial_trace, ComplexOperator, DensityOperator};
use crate::{check_capacity, tol, Error, Result};
use alloc::format;
use alloc::vec;

use num_complex::Complex64;

/// Coordinate axis of a collective spin component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The other two axes `(k, l)` completing `self = m`, in cyclic x,y,z order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl core::fmt::Display for Axis {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// 2x2 Pauli matrix.
pub fn pauli_mat(axis: Axis) -> CMat {
    let mut m = CMat::zeros(2, 2);
    match axis {
        Axis::X => {
            *m.at_mut(0, 1) = Complex64::new(1.0, 0.0);
            *m.at_mut(1, 0) = Complex64::new(1.0, 0.0);
        }
        Axis::Y => {
            *m.at_mut(0, 1) = Complex64::new(0.0, -1.0);
            *m.at_mut(1, 0) = Complex64::new(0.0, 1.0);
        }
        Axis::Z => {
            *m.at_mut(0, 0) = Complex64::new(1.0, 0.0);
            *m.at_mut(1, 1) = Complex64::new(-1.0, 0.0);
        }
    }
    m
}

/// Collective operator `J_l = (1/2) sum_k sigma_l^(k)` on `n` qubits.
pub fn collective_operator(axis: Axis, n: usize) -> Result<ComplexOperator> {
    if n == 0 {
        return Err(Error::arg("collective operator needs at least one site"));
    }
    check_capacity(n)?;
    let d = 1usize << n;
    let mut mat = CMat::zeros(d, d);
    let sigma = pauli_mat(axis);
    for site in 1..=n {
        let bit = n - site;
        for r in 0..d {
            let rb = (r >> bit) & 1;
            for cb in 0..2usize {
                let s = sigma.at(rb, cb);
                if s != Complex64::new(0.0, 0.0) {
                    let c = (r & !(1 << bit)) | (cb << bit);
                    *mat.at_mut(r, c) += 0.5 * s;
                }
            }
        }
    }
    ComplexOperator::new(mat, vec![2; n])
}

/// `sigma_axis^(site) * m` without forming the embedded Pauli matrix.
pub(crate) fn pauli_apply_left(m: &CMat, n: usize, site: usize, axis: Axis) -> CMat {
    let d = m.rows();
    let bit = n - site;
    let mask = 1usize << bit;
    let mut out = CMat::zeros(d, m.cols());
    for r in 0..d {
        match axis {
            Axis::X => {
                let src = m.row(r ^ mask);
                out.row_mut(r).copy_from_slice(src);
            }
            Axis::Y => {
                // <r|sigma_y|r^mask>: +i when bit set in r, -i otherwise.
                let phase = if r & mask != 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
                let src = m.row(r ^ mask);
                for (o, &v) in out.row_mut(r).iter_mut().zip(src) {
                    *o = phase * v;
                }
            }
            Axis::Z => {
                let sign = if r & mask == 0 { 1.0 } else { -1.0 };
                let src = m.row(r);
                for (o, &v) in out.row_mut(r).iter_mut().zip(src) {
                    *o = sign * v;
                }
            }
        }
    }
    out
}

/// `tr(sigma_axis^(site) * m)`.
fn pauli_trace(m: &CMat, n: usize, site: usize, axis: Axis) -> Complex64 {
    let d = m.rows();
    let bit = n - site;
    let mask = 1usize << bit;
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..d {
        match axis {
            Axis::X => acc += m.at(r ^ mask, r),
            Axis::Y => {
                let phase = if r & mask != 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
                acc += phase * m.at(r ^ mask, r);
            }
            Axis::Z => {
                let sign = if r & mask == 0 { 1.0 } else { -1.0 };
                acc += sign * m.at(r, r);
            }
        }
    }
    acc
}

/// Single-qubit Bloch vector with norm at most one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<BlochVector> {
        let norm_sq = x * x + y * y + z * z;
        if !(norm_sq <= 1.0 + 1e-12) {
            return Err(Error::arg(format!(
                "Bloch vector norm^2 = {norm_sq} exceeds 1"
            )));
        }
        Ok(BlochVector { x, y, z })
    }

    pub fn component(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Density matrix `(I + r . sigma)/2`.
    pub fn density_mat(&self) -> CMat {
        let mut m = CMat::identity(2);
        m.add_assign_scaled(&pauli_mat(Axis::X), Complex64::new(self.x, 0.0));
        m.add_assign_scaled(&pauli_mat(Axis::Y), Complex64::new(self.y, 0.0));
        m.add_assign_scaled(&pauli_mat(Axis::Z), Complex64::new(self.z, 0.0));
        m.scale(Complex64::new(0.5, 0.0))
    }
}

/// First and second moments of the collective angular momentum.
///
/// Holds the mean spin, the symmetrised correlation matrix `C`, the covariance
/// matrix `gamma = C - J J^T` and the combination `chi = (N-1) gamma + C`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveMoments {
    n: usize,
    j: Vec3,
    c: Mat3,
    gamma: Mat3,
    chi: Mat3,
}

impl CollectiveMoments {
    /// Builds moments from measured data, enforcing the physicality bounds
    /// that hold for every quantum state.
    pub fn from_measurements(n: usize, j: Vec3, c: Mat3) -> Result<CollectiveMoments> {
        if n == 0 {
            return Err(Error::arg("moments need at least one qubit"));
        }
        let nf = n as f64;
        let sym_defect = mat3::symmetry_defect(&c);
        if sym_defect > 1e-9 {
            return Err(Error::arg(format!(
                "correlation matrix asymmetry {sym_defect:.3e}"
            )));
        }
        let mut c = c;
        for i in 0..3 {
            for k in i + 1..3 {
                let avg = 0.5 * (c[i][k] + c[k][i]);
                c[i][k] = avg;
                c[k][i] = avg;
            }
        }
        for l in 0..3 {
            if j[l].abs() > nf / 2.0 + tol::CRITERION {
                return Err(Error::InconsistentMoments {
                    margin: nf / 2.0 - j[l].abs(),
                });
            }
        }
        let trace_bound = nf * (nf + 2.0) / 4.0;
        let margin_8a = trace_bound - mat3::trace3(&c);
        if margin_8a < -tol::CRITERION {
            return Err(Error::InconsistentMoments { margin: margin_8a });
        }
        let mut gamma = [[0.0; 3]; 3];
        let mut chi = [[0.0; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                gamma[i][k] = c[i][k] - j[i] * j[k];
                chi[i][k] = (nf - 1.0) * gamma[i][k] + c[i][k];
            }
        }
        let gamma_min = mat3::sym3_eigvals(&gamma)[0];
        if gamma_min < -tol::CRITERION {
            return Err(Error::InconsistentMoments { margin: gamma_min });
        }
        Ok(CollectiveMoments {
            n,
            j,
            c,
            gamma,
            chi,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> Vec3 {
        self.j
    }

    pub fn j_norm_sq(&self) -> f64 {
        mat3::norm_sq3(&self.j)
    }

    pub fn c(&self) -> &Mat3 {
        &self.c
    }

    pub fn gamma(&self) -> &Mat3 {
        &self.gamma
    }

    pub fn chi(&self) -> &Mat3 {
        &self.chi
    }

    /// Second moments `<J_l^2>`, the diagonal of C.
    pub fn k2(&self) -> Vec3 {
        [self.c[0][0], self.c[1][1], self.c[2][2]]
    }

    pub fn mean(&self, axis: Axis) -> f64 {
        self.j[axis.index()]
    }

    pub fn second_moment(&self, axis: Axis) -> f64 {
        self.c[axis.index()][axis.index()]
    }

    pub fn variance(&self, axis: Axis) -> f64 {
        self.gamma[axis.index()][axis.index()]
    }

    pub fn trace_c(&self) -> f64 {
        mat3::trace3(&self.c)
    }

    pub fn trace_gamma(&self) -> f64 {
        mat3::trace3(&self.gamma)
    }

    pub fn trace_chi(&self) -> f64 {
        mat3::trace3(&self.chi)
    }

    /// Eigenvalues of chi, ascending.
    pub fn chi_eigvals(&self) -> Vec3 {
        mat3::sym3_eigvals(&self.chi)
    }

    /// Eigenvalues of C, ascending.
    pub fn c_eigvals(&self) -> Vec3 {
        mat3::sym3_eigvals(&self.c)
    }
}

/// Moments of a qubit state, computed without forming the `J_l` matrices.
pub fn moments(rho: &DensityOperator) -> Result<CollectiveMoments> {
    if !rho.op().is_qubits() {
        return Err(Error::arg("moments are defined for qubit systems"));
    }
    let n = rho.n_sites();
    let d = rho.dim();
    let mut j = [0.0; 3];
    let mut c = [[0.0; 3]; 3];
    for l in Axis::ALL {
        // b = J_l rho
        let mut b = CMat::zeros(d, d);
        for site in 1..=n {
            b.add_assign_scaled(
                &pauli_apply_left(rho.mat(), n, site, l),
                Complex64::new(0.5, 0.0),
            );
        }
        j[l.index()] = b.trace().re;
        // C_kl = Re tr(J_k J_l rho) = Re tr(J_k b)
        for k in Axis::ALL {
            let mut acc = Complex64::new(0.0, 0.0);
            for site in 1..=n {
                acc += pauli_trace(&b, n, site, k);
            }
            c[k.index()][l.index()] = 0.5 * acc.re;
        }
    }
    // Symmetrise roundoff.
    for i in 0..3 {
        for k in i + 1..3 {
            let avg = 0.5 * (c[i][k] + c[k][i]);
            c[i][k] = avg;
            c[k][i] = avg;
        }
    }
    CollectiveMoments::from_measurements(n, j, c)
}

/// Transforms moments to a rotated coordinate frame: `J -> OJ`, `C -> OCO^T`.
pub fn rotate_moments(m: &CollectiveMoments, o: &Mat3) -> Result<CollectiveMoments> {
    let defect = mat3::orthogonality_defect(o);
    if defect > tol::ORTHOGONALITY {
        return Err(Error::arg(format!("rotation matrix defect {defect:.3e}")));
    }
    let j = mat3::matvec3(o, &m.j);
    let c = mat3::congruence3(o, &m.c);
    CollectiveMoments::from_measurements(m.n, j, c)
}

/// Average two-qubit reduced state `(1/(N(N-1))) sum_{i != j} rho_ij` with the
/// pair kept in site order `(i, j)`.
pub fn reduced_av2(rho: &DensityOperator) -> Result<DensityOperator> {
    let n = rho.n_sites();
    if n < 2 {
        return Err(Error::arg(
            "average two-qubit state needs at least two sites",
        ));
    }
    let mut acc = CMat::zeros(4, 4);
    let weight = Complex64::new(1.0 / (n as f64 * (n as f64 - 1.0)), 0.0);
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let pair = partial_trace(rho, &[i, j])?;
            acc.add_assign_scaled(pair.mat(), weight);
        }
    }
    Ok(DensityOperator::trusted(ComplexOperator::new(
        acc,
        vec![2, 2],
    )?))
}

/// Moment-zeroing twirl: the mixture of the state with its conjugations by
/// `sigma_l^(x) N` for l = x, y, z.
///
/// Kills every `<J_l>` while preserving every `<J_l^2>`, and maps separable
/// states to separable states.
pub fn twirl(rho: &DensityOperator) -> Result<DensityOperator> {
    if !rho.op().is_qubits() {
        return Err(Error::arg("twirl is defined for qubit systems"));
    }
    let n = rho.n_sites();
    let d = rho.dim();
    let full = d - 1; // all-bits mask
    let mut out = CMat::zeros(d, d);
    for r in 0..d {
        let wr = (r as u64).count_ones();
        let fr = full ^ r;
        for c in 0..d {
            let wc = (c as u64).count_ones();
            let sign = if (wr + wc) % 2 == 0 { 1.0 } else { -1.0 };
            let z = rho.mat().at(r, c);
            let zf = rho.mat().at(fr, full ^ c);
            // identity + U_x + U_y + U_z contributions
            *out.at_mut(r, c) = 0.25 * (z + zf + sign * zf + sign * z);
        }
    }
    Ok(DensityOperator::trusted(ComplexOperator::new(
        out,
        vec![2; n],
    )?))
}

/// Moments of a product state from its Bloch vectors, via closed-form pair
/// sums; the N-qubit operator is never built.
pub fn product_moments(blochs: &[BlochVector]) -> Result<CollectiveMoments> {
    let n = blochs.len();
    if n == 0 {
        return Err(Error::arg("product moments need at least one qubit"));
    }
    let mut s = [0.0; 3];
    let mut sq = [[0.0; 3]; 3];
    for b in blochs {
        let r = [b.x, b.y, b.z];
        for k in 0..3 {
            s[k] += r[k];
            for l in 0..3 {
                sq[k][l] += r[k] * r[l];
            }
        }
    }
    let nf = n as f64;
    let j = [0.5 * s[0], 0.5 * s[1], 0.5 * s[2]];
    let mut c = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            c[k][l] = 0.25 * (s[k] * s[l] - sq[k][l]);
            if k == l {
                c[k][l] += 0.25 * nf;
            }
        }
    }
    CollectiveMoments::from_measurements(n, j, c)
}

/// Product state `(x)_i (I + r_i . sigma)/2`.
pub fn product_state(blochs: &[BlochVector]) -> Result<DensityOperator> {
    if blochs.is_empty() {
        return Err(Error::arg("product state needs at least one qubit"));
    }
    check_capacity(blochs.len())?;
    let mut op = ComplexOperator::new(blochs[0].density_mat(), vec![2])?;
    for b in &blochs[1..] {
        op = kron(&op, &ComplexOperator::new(b.density_mat(), vec![2])?)?;
    }
    Ok(DensityOperator::trusted(op))
}
