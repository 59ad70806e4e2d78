//! Hermitian eigendecomposition.
//!
//! Complex Hermitian matrices are reduced to real symmetric tridiagonal form
//! by Householder reflections with a diagonal phase absorption, then solved by
//! the implicit-shift QL iteration with eigenvector accumulation.

use super::{abs_c, support_blocks, CMat, ONE, ZERO};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and a unitary matrix whose columns
/// are the matching eigenvectors. The input is taken as given; callers that
/// need a Hermiticity check perform it beforehand (see [`crate::op::herm_eig`]).
pub fn herm_eig(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    assert!(a.is_square(), "herm_eig needs a square matrix");
    let n = a.rows();
    if !a.all_finite() {
        return Err(Error::Numeric("non-finite entries in eigensolver input"));
    }
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    if n == 1 {
        return Ok((vec![a.at(0, 0).re], CMat::identity(1)));
    }

    let mut work = a.clone();
    // vt holds the conjugate transpose of the accumulated unitary so that all
    // reflector and rotation updates run along contiguous rows.
    let mut vt = CMat::identity(n);

    tridiagonalize(&mut work, &mut vt);

    // Absorb subdiagonal phases so the tridiagonal matrix becomes real.
    let mut diag = vec![0.0f64; n];
    let mut sub = vec![0.0f64; n];
    let mut phase = ONE;
    for i in 0..n {
        diag[i] = work.at(i, i).re;
        if i + 1 < n {
            let e = work.at(i + 1, i);
            let r = abs_c(e);
            let new_phase = if r > 0.0 { phase * (e / r) } else { phase };
            sub[i] = r;
            // Row i of vt is scaled by conj(phase_i).
            let conj_p = phase.conj();
            for z in vt.row_mut(i) {
                *z *= conj_p;
            }
            phase = new_phase;
        } else {
            let conj_p = phase.conj();
            for z in vt.row_mut(i) {
                *z *= conj_p;
            }
        }
    }

    ql_implicit(&mut diag, &mut sub, &mut vt)?;

    // Sort ascending, permuting rows of vt accordingly, then hand back columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            *vecs.at_mut(r, col) = vt.at(src, r).conj();
        }
    }
    Ok((vals, vecs))
}

/// Householder reduction to Hermitian tridiagonal form. `vt` accumulates the
/// conjugate transpose of the product of reflectors, built by applying the
/// stored reflectors in reverse so every update runs along contiguous rows.
fn tridiagonalize(a: &mut CMat, vt: &mut CMat) {
    let n = a.rows();
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    let mut reflectors: Vec<(usize, f64, Vec<Complex64>)> = Vec::new();
    // Columns whose below-diagonal mass is negligible against the matrix
    // scale are left alone; the QL stage only reads the tridiagonal part, so
    // the leftovers act as zeros.
    let negligible = (a.max_abs() * 1e-150).max(f64::MIN_POSITIVE);

    for k in 0..n.saturating_sub(2) {
        let mut xnorm_sq = 0.0;
        for i in k + 1..n {
            xnorm_sq += a.at(i, k).norm_sqr();
        }
        let xnorm = libm::sqrt(xnorm_sq);
        let x0 = a.at(k + 1, k);
        let below_sq = xnorm_sq - x0.norm_sqr();
        if xnorm <= negligible || below_sq <= xnorm_sq * 1e-30 {
            continue;
        }

        let x0_abs = abs_c(x0);
        let ph = if x0_abs > 0.0 { x0 / x0_abs } else { ONE };
        let alpha = -ph * xnorm;
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a.at(i, k);
        }
        let vnorm_sq = 2.0 * xnorm * (xnorm + x0_abs);
        let tau = 2.0 / vnorm_sq;

        // Hermitian rank-2 update of the trailing block:
        //   p = tau * A v,  w = p - (tau/2)(v† p) v,  A <- A - v w† - w v†.
        for i in k + 1..n {
            let mut acc = ZERO;
            let row = a.row(i);
            for j in k + 1..n {
                acc += row[j] * v[j];
            }
            p[i] = acc * tau;
        }
        let mut vtp = ZERO;
        for i in k + 1..n {
            vtp += v[i].conj() * p[i];
        }
        let kappa = 0.5 * tau * vtp;
        for i in k + 1..n {
            p[i] -= kappa * v[i];
        }
        for i in k + 1..n {
            let vi = v[i];
            let wi = p[i];
            let row = a.row_mut(i);
            for j in k + 1..n {
                row[j] -= vi * p[j].conj() + wi * v[j].conj();
            }
        }

        *a.at_mut(k + 1, k) = alpha;
        *a.at_mut(k, k + 1) = alpha.conj();
        for i in k + 2..n {
            *a.at_mut(i, k) = ZERO;
            *a.at_mut(k, i) = ZERO;
        }

        reflectors.push((k, tau, v[k + 1..n].to_vec()));
    }

    // vt = H_last ... H_1 H_0, assembled as ((I * H_last) * ...) * H_0 so each
    // reflector is a right factor acting on contiguous rows.
    for (k, tau, vk) in reflectors.iter().rev() {
        let (k, tau) = (*k, *tau);
        for r in 0..n {
            let row = vt.row_mut(r);
            let mut s = ZERO;
            for (i, vi) in vk.iter().enumerate() {
                s += row[k + 1 + i] * vi;
            }
            let s_tau = s * tau;
            for (i, vi) in vk.iter().enumerate() {
                row[k + 1 + i] -= s_tau * vi.conj();
            }
        }
    }
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix,
/// applying the rotations to the rows of `vt`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], vt: &mut CMat) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // e[i] couples d[i] and d[i+1]; e[n-1] is scratch.
    let eps = f64::EPSILON;
    // Absolute deflation floor: without it, zero diagonal neighbourhoods (as
    // in augmented singular-value matrices) never satisfy the relative test.
    let anorm = (0..n).fold(0.0f64, |a, i| {
        a.max(d[i].abs() + if i + 1 < n { e[i].abs() } else { 0.0 })
    });
    let floor = eps * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd + floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric("QL iteration did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (top, bottom) = vt_rows_pair(vt, i);
                for (ti, bi) in top.iter_mut().zip(bottom.iter_mut()) {
                    f = bi.re;
                    let fim = bi.im;
                    bi.re = s * ti.re + c * f;
                    bi.im = s * ti.im + c * fim;
                    ti.re = c * ti.re - s * f;
                    ti.im = c * ti.im - s * fim;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Mutable views of rows `i` and `i+1`.
fn vt_rows_pair(vt: &mut CMat, i: usize) -> (&mut [Complex64], &mut [Complex64]) {
    let cols = vt.cols();
    let (head, tail) = vt.data_mut().split_at_mut((i + 1) * cols);
    (&mut head[i * cols..], &mut tail[..cols])
}

impl CMat {
    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
}

/// One diagonal block of a block-split Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct EigBlock {
    /// Original indices covered by this block, ascending.
    pub idx: Vec<usize>,
    /// Eigenvalues of the block, ascending.
    pub vals: Vec<f64>,
    /// Eigenvector columns of the block in packed coordinates.
    pub vecs: CMat,
}

/// Hermitian eigendecomposition split along the support graph of the matrix.
///
/// Entries of magnitude at most `drop_tol` are treated as structural zeros
/// when the blocks are found; `off_block_max` records the largest entry that
/// was actually dropped so callers can assert it is negligible.
#[derive(Debug, Clone)]
pub struct BlockEig {
    pub n: usize,
    pub blocks: Vec<EigBlock>,
    pub off_block_max: f64,
}

impl BlockEig {
    pub fn new(h: &CMat, drop_tol: f64) -> Result<BlockEig> {
        assert!(h.is_square());
        let n = h.rows();
        let groups = support_blocks(h, drop_tol);
        let mut off_block_max = 0.0f64;
        let mut owner = vec![0usize; n];
        for (g, idx) in groups.iter().enumerate() {
            for &i in idx {
                owner[i] = g;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if owner[i] != owner[j] {
                    off_block_max = off_block_max.max(abs_c(h.at(i, j)));
                }
            }
        }
        let mut blocks = Vec::with_capacity(groups.len());
        for idx in groups {
            let b = idx.len();
            let sub = CMat::from_fn(b, b, |r, c| h.at(idx[r], idx[c]));
            let (vals, vecs) = herm_eig(&sub)?;
            blocks.push(EigBlock { idx, vals, vecs });
        }
        Ok(BlockEig {
            n,
            blocks,
            off_block_max,
        })
    }

    /// Smallest eigenvalue across all blocks.
    pub fn min_value(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.vals.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Assembles `f(H) = V f(Λ) V†` in the original coordinates.
    pub fn map_fn(&self, mut f: impl FnMut(f64) -> f64) -> CMat {
        let mut out = CMat::zeros(self.n, self.n);
        for block in &self.blocks {
            let b = block.idx.len();
            let fv: Vec<f64> = block.vals.iter().map(|&l| f(l)).collect();
            let mut scaled = block.vecs.clone();
            for r in 0..b {
                for (k, z) in scaled.row_mut(r).iter_mut().enumerate() {
                    *z *= fv[k];
                }
            }
            let sub = scaled.mul(&block.vecs.adjoint());
            for r in 0..b {
                for c in 0..b {
                    *out.at_mut(block.idx[r], block.idx[c]) = sub.at(r, c);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_reconstruction(a: &CMat) {
        let (vals, vecs) = herm_eig(a).unwrap();
        let n = a.rows();
        let mut recon = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += vecs.at(i, k) * vals[k] * vecs.at(j, k).conj();
                }
                *recon.at_mut(i, j) = acc;
            }
        }
        let scale = a.max_abs().max(1e-300);
        assert!(
            recon.sub(a).max_abs() <= 1e-9 * scale,
            "reconstruction defect {} vs scale {}",
            recon.sub(a).max_abs(),
            scale
        );
        // Orthonormality of eigenvector columns.
        let gram = vecs.adjoint().mul(&vecs);
        assert!(gram.sub(&CMat::identity(n)).max_abs() < 1e-10);
        // Ascending order.
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn pauli_matrices() {
        let sz = CMat::from_fn(2, 2, |i, j| {
            if i == j {
                c(if i == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                ZERO
            }
        });
        let (vals, _) = herm_eig(&sz).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);

        let sx = CMat::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
        let (vals, vecs) = herm_eig(&sx).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
        // Ground eigenvector of sigma_x is (|0> - |1>)/sqrt(2) up to phase.
        let overlap = (vecs.at(0, 0) - vecs.at(1, 0)).norm_sqr() / 2.0;
        assert!((overlap - 1.0).abs() < 1e-12, "overlap {overlap}");
        assert!((abs_c(vecs.at(0, 0)) - inv_sqrt2).abs() < 1e-12);
        check_reconstruction(&sx);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = crate::rng::SplitMix64::new(0x5eed);
        for &n in &[2usize, 3, 5, 8, 16, 33] {
            let mut m = CMat::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let z = c(
                        rng.next_f64() - 0.5,
                        if i == j { 0.0 } else { rng.next_f64() - 0.5 },
                    );
                    *m.at_mut(i, j) = z;
                    *m.at_mut(j, i) = z.conj();
                }
            }
            check_reconstruction(&m);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // diag(2, 2, 2) plus a tiny Hermitian perturbation.
        let mut m = CMat::identity(3).scale(c(2.0, 0.0));
        *m.at_mut(0, 1) = c(0.0, 1e-13);
        *m.at_mut(1, 0) = c(0.0, -1e-13);
        check_reconstruction(&m);
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = crate::rng::SplitMix64::new(7);
        let n = 24;
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let z = c(
                    rng.next_f64() - 0.5,
                    if i == j { 0.0 } else { rng.next_f64() - 0.5 },
                );
                *m.at_mut(i, j) = z;
                *m.at_mut(j, i) = z.conj();
            }
        }
        let (vals, _) = herm_eig(&m).unwrap();
        let sum: f64 = vals.iter().sum();
        let tr = m.trace().re;
        assert!((sum - tr).abs() <= 1e-9 * tr.abs().max(1.0));
    }

    #[test]
    fn block_eig_matches_dense() {
        // Block-diagonal matrix with two decoupled components.
        let mut m = CMat::zeros(5, 5);
        let entries = [
            (0, 0, c(1.0, 0.0)),
            (0, 2, c(0.5, 0.25)),
            (2, 2, c(-1.0, 0.0)),
            (1, 1, c(2.0, 0.0)),
            (1, 3, c(0.0, -0.75)),
            (3, 3, c(0.5, 0.0)),
            (3, 4, c(0.25, 0.0)),
            (4, 4, c(0.0, 0.0)),
        ];
        for &(i, j, z) in &entries {
            *m.at_mut(i, j) = z;
            *m.at_mut(j, i) = z.conj();
        }
        let be = BlockEig::new(&m, 1e-14).unwrap();
        assert_eq!(be.blocks.len(), 2);
        assert!(be.off_block_max <= 1e-14);
        let (dense_vals, _) = herm_eig(&m).unwrap();
        let mut all: Vec<f64> = be
            .blocks
            .iter()
            .flat_map(|b| b.vals.iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        for (a, b) in all.iter().zip(&dense_vals) {
            assert!((a - b).abs() < 1e-10);
        }
        // map_fn with the identity function reproduces the matrix.
        let recon = be.map_fn(|x| x);
        assert!(recon.sub(&m).max_abs() < 1e-10);
    }
}
