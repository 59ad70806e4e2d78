//! Positive-semidefiniteness checks via shifted Cholesky factorisation.

use super::{abs_c, CMat};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Connected components of the support graph of a Hermitian matrix.
///
/// Two indices belong to the same component when `|a_ij| > drop_tol`.
/// Components are returned as ascending index lists, ordered by smallest
/// member.
pub fn support_blocks(a: &CMat, drop_tol: f64) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if abs_c(a.at(i, j)) > drop_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Whether a Hermitian matrix has all eigenvalues at least `-tol`.
///
/// Attempts a Cholesky factorisation of `A + tol*I`, split along the support
/// graph. Entries below `tol/(16 n)` may be dropped when blocks are formed;
/// they can shift eigenvalues by at most `tol/16`, well inside the decision
/// band.
pub fn is_psd_within(a: &CMat, tol: f64) -> bool {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return true;
    }
    let drop_tol = tol / (16.0 * n as f64);
    let blocks = support_blocks(a, drop_tol);
    for idx in blocks {
        let b = idx.len();
        let mut packed = CMat::from_fn(b, b, |r, c| a.at(idx[r], idx[c]));
        for i in 0..b {
            let d = packed.at(i, i);
            *packed.at_mut(i, i) = Complex64::new(d.re + tol, 0.0);
        }
        if !cholesky_in_place(&mut packed) {
            return false;
        }
    }
    true
}

/// In-place lower Cholesky attempt; false when a pivot is non-positive.
fn cholesky_in_place(a: &mut CMat) -> bool {
    let n = a.rows();
    for j in 0..n {
        let mut pivot = a.at(j, j).re;
        {
            let row_j = a.row(j);
            for k in 0..j {
                pivot -= row_j[k].norm_sqr();
            }
        }
        if !(pivot > 0.0) {
            return false;
        }
        let ljj = libm::sqrt(pivot);
        *a.at_mut(j, j) = Complex64::new(ljj, 0.0);
        let inv = 1.0 / ljj;
        for i in j + 1..n {
            let mut acc = a.at(i, j);
            {
                // acc -= L[i][..j] · conj(L[j][..j])
                let base_i = i * n;
                let base_j = j * n;
                let data = a.data();
                for k in 0..j {
                    acc -= data[base_i + k] * data[base_j + k].conj();
                }
            }
            *a.at_mut(i, j) = acc * inv;
        }
    }
    true
}
