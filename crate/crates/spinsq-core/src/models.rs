//! Spin-model builders and thermal states.
//!
//! Couplings are written with bare Pauli matrices (not spin-1/2 operators) and
//! chains are periodic, so the two-site chain counts its single bond twice.
//! Temperatures use k = 1; the nanotube couplings are in Kelvin.

use crate::collective::{collective_operator, pauli_mat, Axis, BlochVector};
use crate::linalg::CMat;
use crate::op::{herm_eig, ComplexOperator, DensityOperator};
use crate::{check_capacity, Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Supported model families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// Periodic chain, `sum_k sigma.sigma` over nearest neighbours.
    HeisenbergChain,
    /// Periodic chain, `sum_k (sigma_x sigma_x + sigma_y sigma_y)`.
    XyChain,
    /// `J_x^2 + J_y^2 + J_z^2`: Heisenberg coupling between every pair.
    HeisenbergComplete,
    /// Lipkin-Meshkov-Glick: `-(lambda/N)(J_x^2 + gamma J_y^2) - h J_z`.
    Lmg { lambda: f64, gamma: f64, h: f64 },
    /// Periodic antiferromagnetic Ising chain in a transverse field:
    /// `sum_k sigma_z sigma_z + B sum_k sigma_x`.
    IsingTransverse { b: f64 },
    /// Nine-site Heisenberg ring with nearest and partial next-nearest
    /// couplings (Kelvin units).
    Nanotube,
    /// Collective quadratic form `sum_l q_l J_l^2 + sum_l r_l J_l`.
    Custom {
        quadratic: [f64; 3],
        linear: [f64; 3],
    },
}

/// A model kind together with its site count.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: ModelKind,
    pub n: usize,
}

impl HamiltonianSpec {
    pub fn new(kind: ModelKind, n: usize) -> Result<HamiltonianSpec> {
        let spec = HamiltonianSpec { kind, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::arg("spin models need at least two sites"));
        }
        check_capacity(self.n)?;
        if matches!(self.kind, ModelKind::Nanotube) && self.n != 9 {
            return Err(Error::arg("the nanotube ring has exactly nine sites"));
        }
        Ok(())
    }

    /// Site permutations that leave the Hamiltonian invariant, as maps
    /// `new_site[old_site - 1]`. Used to prune equivalent bipartitions.
    pub(crate) fn symmetry_generators(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let shift = |by: usize| -> Vec<usize> { (1..=n).map(|s| (s - 1 + by) % n + 1).collect() };
        let reflect = |c: usize| -> Vec<usize> {
            // site s -> (c - s) mod n, in 1-based labels
            (1..=n).map(|s| ((c + 2 * n - s - 1) % n) + 1).collect()
        };
        match self.kind {
            ModelKind::HeisenbergChain | ModelKind::XyChain | ModelKind::IsingTransverse { .. } => {
                vec![shift(1), reflect(1)]
            }
            ModelKind::HeisenbergComplete | ModelKind::Lmg { .. } | ModelKind::Custom { .. } => {
                // Fully permutation symmetric: adjacent transpositions generate
                // the whole group.
                let mut gens = Vec::new();
                for s in 1..n {
                    let mut p: Vec<usize> = (1..=n).collect();
                    p.swap(s - 1, s);
                    gens.push(p);
                }
                gens
            }
            ModelKind::Nanotube => {
                // The next-nearest coupling pattern has period three and a
                // mirror symmetry about site 2 (1 <-> 3, 4 <-> 9, ...).
                vec![shift(3), reflect(4)]
            }
        }
    }
}

/// Adds `coeff * sigma_axis^(site_a) sigma_axis^(site_b)` to a matrix.
fn add_two_site_coupling(mat: &mut CMat, n: usize, a: usize, b: usize, axis: Axis, coeff: f64) {
    let d = 1usize << n;
    let bit_a = n - a;
    let bit_b = n - b;
    let sigma = pauli_mat(axis);
    for r in 0..d {
        let ra = (r >> bit_a) & 1;
        let rb = (r >> bit_b) & 1;
        for ca in 0..2usize {
            let za = sigma.at(ra, ca);
            if za == Complex64::new(0.0, 0.0) {
                continue;
            }
            for cb in 0..2usize {
                let zb = sigma.at(rb, cb);
                if zb == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let c = (r & !(1 << bit_a) & !(1 << bit_b)) | (ca << bit_a) | (cb << bit_b);
                *mat.at_mut(r, c) += coeff * za * zb;
            }
        }
    }
}

/// Adds `coeff * sigma_axis^(site)`.
fn add_one_site_field(mat: &mut CMat, n: usize, site: usize, axis: Axis, coeff: f64) {
    let d = 1usize << n;
    let bit = n - site;
    let sigma = pauli_mat(axis);
    for r in 0..d {
        let rb = (r >> bit) & 1;
        for cb in 0..2usize {
            let z = sigma.at(rb, cb);
            if z != Complex64::new(0.0, 0.0) {
                let c = (r & !(1 << bit)) | (cb << bit);
                *mat.at_mut(r, c) += coeff * z;
            }
        }
    }
}

fn collective_quadratic(n: usize, quadratic: [f64; 3], linear: [f64; 3]) -> Result<CMat> {
    let d = 1usize << n;
    let mut mat = CMat::zeros(d, d);
    for axis in Axis::ALL {
        let q = quadratic[axis.index()];
        let r = linear[axis.index()];
        if q == 0.0 && r == 0.0 {
            continue;
        }
        let j = collective_operator(axis, n)?;
        if q != 0.0 {
            mat.add_assign_scaled(&j.mat().mul(j.mat()), Complex64::new(q, 0.0));
        }
        if r != 0.0 {
            mat.add_assign_scaled(j.mat(), Complex64::new(r, 0.0));
        }
    }
    Ok(mat)
}

/// Builds the Hamiltonian matrix of a model.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<ComplexOperator> {
    spec.validate()?;
    let n = spec.n;
    let d = 1usize << n;
    let mat = match spec.kind {
        ModelKind::HeisenbergChain => {
            let mut mat = CMat::zeros(d, d);
            for k in 1..=n {
                let next = k % n + 1;
                for axis in Axis::ALL {
                    add_two_site_coupling(&mut mat, n, k, next, axis, 1.0);
                }
            }
            mat
        }
        ModelKind::XyChain => {
            let mut mat = CMat::zeros(d, d);
            for k in 1..=n {
                let next = k % n + 1;
                add_two_site_coupling(&mut mat, n, k, next, Axis::X, 1.0);
                add_two_site_coupling(&mut mat, n, k, next, Axis::Y, 1.0);
            }
            mat
        }
        ModelKind::HeisenbergComplete => collective_quadratic(n, [1.0, 1.0, 1.0], [0.0; 3])?,
        ModelKind::Lmg { lambda, gamma, h } => {
            let nf = n as f64;
            collective_quadratic(n, [-lambda / nf, -lambda * gamma / nf, 0.0], [0.0, 0.0, -h])?
        }
        ModelKind::IsingTransverse { b } => {
            let mut mat = CMat::zeros(d, d);
            for k in 1..=n {
                let next = k % n + 1;
                add_two_site_coupling(&mut mat, n, k, next, Axis::Z, 1.0);
                add_one_site_field(&mut mat, n, k, Axis::X, b);
            }
            mat
        }
        ModelKind::Nanotube => {
            let c1 = 200.0;
            let mut mat = CMat::zeros(d, d);
            for k in 1..=9usize {
                let next = k % 9 + 1;
                for axis in Axis::ALL {
                    add_two_site_coupling(&mut mat, 9, k, next, axis, c1 / 4.0);
                }
                let c2 = if matches!(k, 2 | 3 | 5 | 6 | 8 | 9) {
                    140.0
                } else {
                    0.0
                };
                if c2 != 0.0 {
                    let nnext = (k + 1) % 9 + 1;
                    for axis in Axis::ALL {
                        add_two_site_coupling(&mut mat, 9, k, nnext, axis, c2 / 4.0);
                    }
                }
            }
            mat
        }
        ModelKind::Custom { quadratic, linear } => collective_quadratic(n, quadratic, linear)?,
    };
    ComplexOperator::new(mat, vec![2; n])
}

/// Thermal state `exp(-H/T)/Z`; at `T = 0` the normalised projector onto the
/// ground space (eigenvalues within 1e-9 of the minimum).
pub fn thermal_state(h: &ComplexOperator, t: f64) -> Result<DensityOperator> {
    if t < 0.0 {
        return Err(Error::arg("temperature must be non-negative"));
    }
    let (vals, vecs) = herm_eig(h)?;
    let d = h.dim();
    let min = vals[0];
    let weights: Vec<f64> = if t == 0.0 {
        vals.iter()
            .map(|&v| if v - min <= 1e-9 { 1.0 } else { 0.0 })
            .collect()
    } else {
        // Shift by the minimum before exponentiating to avoid overflow.
        vals.iter().map(|&v| libm::exp(-(v - min) / t)).collect()
    };
    let z: f64 = weights.iter().sum();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Numeric("thermal partition sum is not positive"));
    }
    let mut scaled = vecs.clone();
    for r in 0..d {
        for (k, zc) in scaled.row_mut(r).iter_mut().enumerate() {
            *zc *= weights[k] / z;
        }
    }
    let mat = scaled.mul(&vecs.adjoint());
    Ok(DensityOperator::trusted(ComplexOperator::new(
        mat,
        h.local_dims().to_vec(),
    )?))
}

/// Symmetric Dicke state with `m` excitations: the normalised equal
/// superposition of all basis states of Hamming weight `m`.
///
/// With the convention `sigma_z |0> = +|0>` the mean spin is
/// `(0, 0, N/2 - m)`; second moments are `N/4 + m(N-m)/2` transverse and
/// `(N/2 - m)^2` along z.
pub fn dicke_state(n: usize, m: usize) -> Result<DensityOperator> {
    if n == 0 {
        return Err(Error::arg("Dicke states need at least one qubit"));
    }
    check_capacity(n)?;
    if m > n {
        return Err(Error::arg(format!(
            "excitation number {m} exceeds {n} qubits"
        )));
    }
    let d = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); d];
    let mut count = 0usize;
    for r in 0..d {
        if (r as u64).count_ones() as usize == m {
            amps[r] = Complex64::new(1.0, 0.0);
            count += 1;
        }
    }
    let norm = 1.0 / libm::sqrt(count as f64);
    for a in &mut amps {
        *a *= norm;
    }
    DensityOperator::pure(&amps, vec![2; n])
}

/// Product state from per-site Bloch vectors (re-exported convenience).
pub fn product_state(blochs: &[BlochVector]) -> Result<DensityOperator> {
    crate::collective::product_state(blochs)
}

/// The two worked detection examples: thermal-form states that are detected
/// by a moment criterion while their average two-qubit state stays PPT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionExample {
    /// N = 8, T = 3 state of `7 J_z^2 - J_x^2 - J_y^2`.
    Sec5Spsq,
    /// N = 8, T = 0.3 state of `2 J_x^2 - J_z`.
    Sec5Orig,
}

pub fn detection_example_state(which: DetectionExample) -> Result<DensityOperator> {
    let (quadratic, linear, t) = match which {
        DetectionExample::Sec5Spsq => ([-1.0, -1.0, 7.0], [0.0, 0.0, 0.0], 3.0),
        DetectionExample::Sec5Orig => ([2.0, 0.0, 0.0], [0.0, 0.0, -1.0], 0.3),
    };
    let spec = HamiltonianSpec::new(ModelKind::Custom { quadratic, linear }, 8)?;
    thermal_state(&build_hamiltonian(&spec)?, t)
}

pub(crate) fn add_coupling_for_detect(
    mat: &mut CMat,
    n: usize,
    a: usize,
    b: usize,
    axis: Axis,
    coeff: f64,
) {
    add_two_site_coupling(mat, n, a, b, axis, coeff);
}

pub(crate) fn add_field_for_detect(mat: &mut CMat, n: usize, site: usize, axis: Axis, coeff: f64) {
    add_one_site_field(mat, n, site, axis, coeff);
}

/// Checks that conjugating sites by a permutation leaves the operator
/// unchanged within `tol_abs`.
pub(crate) fn permutation_invariant(h: &ComplexOperator, site_map: &[usize], tol_abs: f64) -> bool {
    let n = h.n_sites();
    if site_map.len() != n {
        return false;
    }
    let d = h.dim();
    // index map: basis index r -> permuted index
    let mut map = vec![0usize; d];
    for r in 0..d {
        let mut out = 0usize;
        for site in 1..=n {
            let bit = (r >> (n - site)) & 1;
            let new_site = site_map[site - 1];
            out |= bit << (n - new_site);
        }
        map[r] = out;
    }
    for r in 0..d {
        for c in 0..d {
            let diff = h.mat().at(map[r], map[c]) - h.mat().at(r, c);
            if crate::linalg::abs_c(diff) > tol_abs {
                return false;
            }
        }
    }
    true
}
