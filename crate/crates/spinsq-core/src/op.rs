//! Quantum operators on tensor products of finite-dimensional sites:
//! tensor products, partial trace and transpose, realignment, Hermitian
//! eigendecompositions and spectral functions.
//!
//! Sites are numbered from 1 and site 1 is the slowest-varying tensor index.
//! The computational basis takes |0> as spin-up (`sigma_z |0> = +|0>`).

use crate::linalg::{self, herm_eig as herm_eig_mat, CMat};
use crate::{check_capacity, tol, Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Dense operator on a tensor product of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    mat: CMat,
    local_dims: Vec<usize>,
}

impl ComplexOperator {
    /// Wraps a square matrix whose dimension is the product of `local_dims`.
    pub fn new(mat: CMat, local_dims: Vec<usize>) -> Result<ComplexOperator> {
        if !mat.is_square() {
            return Err(Error::arg("operator matrix must be square"));
        }
        let prod: usize = local_dims.iter().product();
        if local_dims.iter().any(|&d| d == 0) || prod != mat.rows() {
            return Err(Error::arg(format!(
                "local dimensions {:?} do not multiply to the matrix dimension {}",
                local_dims,
                mat.rows()
            )));
        }
        if !mat.all_finite() {
            return Err(Error::Numeric("operator entries must be finite"));
        }
        Ok(ComplexOperator { mat, local_dims })
    }

    /// Identity on `n` qubit sites.
    pub fn identity_qubits(n: usize) -> Result<ComplexOperator> {
        check_capacity(n)?;
        ComplexOperator::new(CMat::identity(1 << n), vec![2; n])
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn mat_mut(&mut self) -> &mut CMat {
        &mut self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    pub fn is_qubits(&self) -> bool {
        self.local_dims.iter().all(|&d| d == 2)
    }

    /// Stride of site `i` (1-based): the index step of one unit of that site's
    /// digit.
    fn stride(&self, site: usize) -> usize {
        self.local_dims[site..].iter().product()
    }

    /// The digit of `index` belonging to site `i` (1-based).
    fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.stride(site)) % self.local_dims[site - 1]
    }
}

/// Tensor product with the left factor varying slowest.
pub fn kron(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    let dim = a
        .dim()
        .checked_mul(b.dim())
        .ok_or(Error::Numeric("dimension overflow"))?;
    let cap_dim = 1usize << crate::qubit_cap();
    if dim > cap_dim {
        // Express the overflow in qubit-equivalents for the error message.
        let qubits = (usize::BITS - (dim - 1).leading_zeros()) as usize;
        return Err(Error::Capacity {
            qubits,
            cap: crate::qubit_cap(),
        });
    }
    let mut dims = a.local_dims.clone();
    dims.extend_from_slice(&b.local_dims);
    ComplexOperator::new(a.mat.kron(&b.mat), dims)
}

/// Bipartition of the sites into a non-empty proper subset and its complement.
///
/// The canonical form keeps the smaller side (ties broken by the side holding
/// the lowest site index) in `side_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    n_sites: usize,
}

impl Bipartition {
    pub fn new(side_a: &[usize], n_sites: usize) -> Result<Bipartition> {
        let mut a: Vec<usize> = side_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != side_a.len() {
            return Err(Error::arg("bipartition side contains duplicate sites"));
        }
        if a.is_empty() || a.len() >= n_sites {
            return Err(Error::arg(
                "bipartition side must be a non-empty proper subset",
            ));
        }
        if a[0] < 1 || *a.last().unwrap() > n_sites {
            return Err(Error::arg("bipartition site index out of range"));
        }
        let b: Vec<usize> = (1..=n_sites).filter(|s| !a.contains(s)).collect();
        let keep_a = match a.len().cmp(&b.len()) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Greater => false,
            core::cmp::Ordering::Equal => a[0] < b[0],
        };
        Ok(Bipartition {
            side_a: if keep_a { a } else { b },
            n_sites,
        })
    }

    /// All canonical bipartitions of `n` sites: `2^(n-1) - 1` of them.
    pub fn enumerate(n: usize) -> Vec<Bipartition> {
        let mut out = Vec::new();
        if n < 2 {
            return out;
        }
        // Subsets containing site 1, excluding the full set, hit every
        // bipartition exactly once.
        for mask in 0..(1usize << (n - 1)) {
            let mut side = vec![1usize];
            for s in 2..=n {
                if mask >> (s - 2) & 1 == 1 {
                    side.push(s);
                }
            }
            if side.len() == n {
                continue;
            }
            out.push(Bipartition::new(&side, n).expect("enumerated side is valid"));
        }
        out
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> Vec<usize> {
        (1..=self.n_sites)
            .filter(|s| !self.side_a.contains(s))
            .collect()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn validate_for(&self, op: &ComplexOperator) -> Result<()> {
        if self.n_sites != op.n_sites() {
            return Err(Error::arg(format!(
                "bipartition is over {} sites but the operator has {}",
                self.n_sites,
                op.n_sites()
            )));
        }
        Ok(())
    }
}

impl core::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.side_a.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}|{{")?;
        for (k, s) in self.side_b().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Density operator: Hermitian, unit trace, positive semidefinite within
/// tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: ComplexOperator,
}

impl DensityOperator {
    /// Validates all invariants. Hermitian asymmetry up to the tolerance is
    /// absorbed by symmetrisation.
    pub fn new(op: ComplexOperator) -> Result<DensityOperator> {
        let defect = op.mat.hermitian_defect();
        if defect > tol::HERMITICITY {
            return Err(Error::NonHermitian { asymmetry: defect });
        }
        let mut op = op;
        op.mat.symmetrize_hermitian();
        let trace = op.mat.trace().re;
        if (trace - 1.0).abs() > tol::UNIT_TRACE {
            return Err(Error::arg(format!(
                "density operator trace is {trace}, not 1"
            )));
        }
        if !linalg::is_psd_within(&op.mat, tol::PSD) {
            return Err(Error::arg("density operator has an eigenvalue below -1e-9"));
        }
        Ok(DensityOperator { op })
    }

    /// Wraps an operator that is positive by construction, skipping the
    /// semidefiniteness check.
    pub(crate) fn trusted(mut op: ComplexOperator) -> DensityOperator {
        op.mat.symmetrize_hermitian();
        DensityOperator { op }
    }

    /// Pure state |psi><psi| from an amplitude vector.
    pub fn pure(amplitudes: &[Complex64], local_dims: Vec<usize>) -> Result<DensityOperator> {
        let d: usize = local_dims.iter().product();
        if amplitudes.len() != d {
            return Err(Error::arg(
                "amplitude vector length does not match dimensions",
            ));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::arg("state vector must be non-zero"));
        }
        let inv = 1.0 / norm_sq;
        let mat = CMat::from_fn(d, d, |i, j| amplitudes[i] * amplitudes[j].conj() * inv);
        Ok(DensityOperator::trusted(ComplexOperator::new(
            mat, local_dims,
        )?))
    }

    pub fn op(&self) -> &ComplexOperator {
        &self.op
    }

    pub fn mat(&self) -> &CMat {
        &self.op.mat
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn n_sites(&self) -> usize {
        self.op.n_sites()
    }

    pub fn local_dims(&self) -> &[usize] {
        self.op.local_dims()
    }

    pub fn into_op(self) -> ComplexOperator {
        self.op
    }

    /// Real expectation value of a Hermitian operator.
    pub fn expect(&self, h: &ComplexOperator) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            let rr = self.op.mat.row(i);
            let hr = h.mat.row(i);
            // tr(rho H) = sum_ij rho_ij H_ji; use Hermiticity of H.
            for j in 0..d {
                let z = rr[j] * hr[j].conj();
                acc += z.re;
            }
        }
        acc
    }

    /// Trace distance to another state of the same dimension, (1/2)||a-b||_1.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        let diff = self.op.mat.sub(&other.op.mat);
        let (vals, _) = herm_eig_mat(&diff)?;
        Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
    }
}

/// Reduced state on `keep` (1-based site indices, in the order given).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let op = &rho.op;
    let n = op.n_sites();
    if keep.is_empty() {
        return Err(Error::arg("partial trace must keep at least one site"));
    }
    let mut seen = vec![false; n + 1];
    for &s in keep {
        if s < 1 || s > n {
            return Err(Error::arg(format!("site {s} out of range 1..={n}")));
        }
        if seen[s] {
            return Err(Error::arg(format!("site {s} repeated in keep set")));
        }
        seen[s] = true;
    }

    let kept_dims: Vec<usize> = keep.iter().map(|&s| op.local_dims[s - 1]).collect();
    let traced: Vec<usize> = (1..=n).filter(|s| !keep.contains(s)).collect();
    let d = op.dim();
    let dk: usize = kept_dims.iter().product();

    // Index maps: input index -> (kept compound index, traced compound index).
    let mut kept_of = vec![0usize; d];
    let mut traced_of = vec![0usize; d];
    for r in 0..d {
        let mut k_idx = 0;
        for &s in keep {
            k_idx = k_idx * op.local_dims[s - 1] + op.digit(r, s);
        }
        let mut t_idx = 0;
        for &s in &traced {
            t_idx = t_idx * op.local_dims[s - 1] + op.digit(r, s);
        }
        kept_of[r] = k_idx;
        traced_of[r] = t_idx;
    }

    let dt = d / dk;
    let mut by_traced: Vec<Vec<usize>> = vec![Vec::with_capacity(dk); dt];
    for r in 0..d {
        by_traced[traced_of[r]].push(r);
    }

    let mut out = CMat::zeros(dk, dk);
    for group in &by_traced {
        for &r in group {
            let kr = kept_of[r];
            let row = op.mat.row(r);
            for &c in group {
                *out.at_mut(kr, kept_of[c]) += row[c];
            }
        }
    }
    Ok(DensityOperator::trusted(ComplexOperator::new(
        out, kept_dims,
    )?))
}

/// Partial transpose over `side_a` of the bipartition. Hermitian and
/// trace-preserving, but in general not positive.
pub fn partial_transpose(rho: &DensityOperator, part: &Bipartition) -> Result<ComplexOperator> {
    let op = &rho.op;
    part.validate_for(op)?;
    let d = op.dim();
    // a_part(r): the contribution of side-a digits to the index r.
    let mut a_part = vec![0usize; d];
    for r in 0..d {
        let mut acc = 0;
        for &s in part.side_a() {
            acc += op.digit(r, s) * op.stride(s);
        }
        a_part[r] = acc;
    }
    let mut out = CMat::zeros(d, d);
    for r in 0..d {
        let r_rest = r - a_part[r];
        for c in 0..d {
            let src_r = r_rest + a_part[c];
            let src_c = c - a_part[c] + a_part[r];
            *out.at_mut(r, c) = op.mat.at(src_r, src_c);
        }
    }
    ComplexOperator::new(out, op.local_dims.clone())
}

/// Reorders sites so that `order[k]` (1-based original index) becomes new site
/// `k+1`.
pub fn permute_sites(op: &ComplexOperator, order: &[usize]) -> Result<ComplexOperator> {
    let n = op.n_sites();
    if order.len() != n {
        return Err(Error::arg(
            "site permutation must list every site exactly once",
        ));
    }
    let mut seen = vec![false; n + 1];
    for &s in order {
        if s < 1 || s > n || seen[s] {
            return Err(Error::arg("invalid site permutation"));
        }
        seen[s] = true;
    }
    let d = op.dim();
    let new_dims: Vec<usize> = order.iter().map(|&s| op.local_dims[s - 1]).collect();
    // map[r] = index of r in the permuted ordering
    let mut map = vec![0usize; d];
    for r in 0..d {
        let mut idx = 0;
        for (k, &s) in order.iter().enumerate() {
            idx = idx * op.local_dims[order[k] - 1] + op.digit(r, s);
        }
        map[r] = idx;
    }
    let mut out = CMat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            *out.at_mut(map[r], map[c]) = op.mat.at(r, c);
        }
    }
    ComplexOperator::new(out, new_dims)
}

/// Realignment of a state across a bipartition.
///
/// After an implicit permutation making the side-a sites contiguous, the entry
/// `((i,j),(k,l))` of the returned `(dA^2, dB^2)` matrix is `rho_{(i,k),(j,l)}`
/// in the A (x) B product basis.
pub fn realign(rho: &DensityOperator, part: &Bipartition) -> Result<CMat> {
    let op = &rho.op;
    part.validate_for(op)?;
    let mut order = part.side_a().to_vec();
    order.extend(part.side_b());
    let permuted = permute_sites(op, &order)?;
    let da: usize = part
        .side_a()
        .iter()
        .map(|&s| op.local_dims[s - 1])
        .product();
    let db = op.dim() / da;
    let mut out = CMat::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..da {
            let row = i * da + j;
            for k in 0..db {
                for l in 0..db {
                    *out.at_mut(row, k * db + l) = permuted.mat.at(i * db + k, j * db + l);
                }
            }
        }
    }
    Ok(out)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> Result<f64> {
    linalg::trace_norm_mat(m)
}

/// Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian
/// operator. Asymmetry up to 1e-10 is symmetrised away; more is an error.
pub fn herm_eig(h: &ComplexOperator) -> Result<(Vec<f64>, CMat)> {
    let defect = h.mat.hermitian_defect();
    if defect > tol::HERMITICITY {
        return Err(Error::NonHermitian { asymmetry: defect });
    }
    let mut m = h.mat.clone();
    m.symmetrize_hermitian();
    herm_eig_mat(&m)
}

/// Matrix function `V f(Lambda) V†` of a Hermitian operator.
pub fn spectral_fn(h: &ComplexOperator, f: impl FnMut(f64) -> f64) -> Result<ComplexOperator> {
    let mut f = f;
    let (vals, vecs) = herm_eig(h)?;
    let n = h.dim();
    let fv: Vec<f64> = vals.iter().map(|&l| f(l)).collect();
    if fv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(
            "spectral function produced non-finite values",
        ));
    }
    // V diag(fv) V†
    let mut scaled = vecs.clone();
    for r in 0..n {
        let row = scaled.row_mut(r);
        for (k, z) in row.iter_mut().enumerate() {
            *z *= fv[k];
        }
    }
    let mut out = scaled.mul(&vecs.adjoint());
    out.symmetrize_hermitian();
    ComplexOperator::new(out, h.local_dims.clone())
}
