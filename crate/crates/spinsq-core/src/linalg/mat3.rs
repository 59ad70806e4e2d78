//! Small helpers for real symmetric 3x3 matrices and rotations, used by the
//! moment-level criteria.

use alloc::vec::Vec;

pub type Mat3 = [[f64; 3]; 3];
pub type Vec3 = [f64; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn matmul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose3(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn matvec3(a: &Mat3, v: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (0..3).map(|k| a[i][k] * v[k]).sum();
    }
    out
}

pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm_sq3(v: &Vec3) -> f64 {
    dot3(v, v)
}

pub fn trace3(a: &Mat3) -> f64 {
    a[0][0] + a[1][1] + a[2][2]
}

/// `max|A A^T - I|`, the orthogonality defect of a candidate rotation.
pub fn orthogonality_defect(a: &Mat3) -> f64 {
    let aat = matmul3(a, &transpose3(a));
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((aat[i][j] - target).abs());
        }
    }
    worst
}

pub fn symmetry_defect(a: &Mat3) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - a[j][i]).abs());
        }
    }
    worst
}

/// Conjugation `O A O^T`.
pub fn congruence3(o: &Mat3, a: &Mat3) -> Mat3 {
    matmul3(&matmul3(o, a), &transpose3(o))
}

/// Eigendecomposition of a real symmetric 3x3 matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and an orthogonal matrix whose rows
/// are the matching eigenvectors, so `rows * m * rows^T` is diagonal.
pub fn sym3_eig(m: &Mat3) -> (Vec3, Mat3) {
    let mut a = *m;
    // Rows of `rot` accumulate the eigenvectors.
    let mut rot = IDENTITY;
    let scale = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .fold(0.0f64, |s, (i, j)| s.max(a[i][j].abs()))
        .max(1e-300);

    for _sweep in 0..64 {
        let off = a[0][1].abs().max(a[0][2].abs()).max(a[1][2].abs());
        if off <= 1e-15 * scale {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq.abs() <= 1e-18 * scale {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = {
                let abs_t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                if theta >= 0.0 {
                    abs_t
                } else {
                    -abs_t
                }
            };
            let c = 1.0 / libm::sqrt(t * t + 1.0);
            let s = t * c;
            // A <- J^T A J on rows/cols p, q.
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for k in 0..3 {
                let rp = rot[p][k];
                let rq = rot[q][k];
                rot[p][k] = c * rp - s * rq;
                rot[q][k] = s * rp + c * rq;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = [
        a[order[0]][order[0]],
        a[order[1]][order[1]],
        a[order[2]][order[2]],
    ];
    let mut vecs = [[0.0; 3]; 3];
    for (r, &src) in order.iter().enumerate() {
        vecs[r] = rot[src];
    }
    (vals, vecs)
}

/// Eigenvalues only, ascending.
pub fn sym3_eigvals(m: &Mat3) -> Vec3 {
    sym3_eig(m).0
}

/// Sorted eigenvalues as a Vec, ascending (convenience for callers comparing
/// spectra).
pub fn sym3_spectrum(m: &Mat3) -> Vec<f64> {
    let (v, _) = sym3_eig(m);
    alloc::vec![v[0], v[1], v[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_known_matrix() {
        // Eigenvalues of [[2,1,0],[1,2,0],[0,0,5]] are 1, 3, 5.
        let m = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let (vals, vecs) = sym3_eig(&m);
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        assert!((vals[2] - 5.0).abs() < 1e-13);
        let d = congruence3(&vecs, &m);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { vals[i] } else { 0.0 };
                assert!((d[i][j] - expect).abs() < 1e-12);
            }
        }
        assert!(orthogonality_defect(&vecs) < 1e-13);
    }

    #[test]
    fn identity_stays_identity() {
        let (vals, vecs) = sym3_eig(&IDENTITY);
        assert_eq!(vecs, IDENTITY);
        for v in vals {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }
}
