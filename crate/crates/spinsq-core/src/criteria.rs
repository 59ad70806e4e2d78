//! Entanglement criteria evaluated on collective moments: the optimal
//! spin-squeezing family, its rotation-invariant and eigenvalue forms, the
//! original squeezing criterion, two-qubit criteria, the Dicke-state
//! criterion and the average-two-qubit forms.
//!
//! Margins are signed with the satisfied side positive; a margin below `-tol`
//! counts as a violation. The first inequality of each complete family holds
//! for every quantum state, so its violation is reported as inconsistent
//! input, never as entanglement.

use crate::collective::{Axis, CollectiveMoments};
use crate::linalg::mat3::{self, Mat3};
use crate::op::DensityOperator;
use crate::{tol, Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Default violation threshold.
pub const DEFAULT_TOL: f64 = tol::CRITERION;

/// Identifier of one inequality, including its axis choice where applicable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionId {
    Ossi8a,
    Ossi8b,
    /// Axis parameter is `m` in `<J_k^2> + <J_l^2> - N/2 <= (N-1) Var(J_m)`.
    Ossi8c(Axis),
    /// Axis parameter is `m` in `(N-1)[Var J_k + Var J_l] >= <J_m^2> + N(N-2)/4`.
    Ossi8d(Axis),
    Inv26a,
    Inv26b,
    Inv26c,
    Inv26d,
    Eig28a,
    Eig28b,
    Eig28c,
    Eig28d,
    Orig3,
    Orig31,
    /// Axis parameter is `m`.
    Kcl34(Axis),
    Kcl37,
    KclSym38,
    KclSym40,
    Dicke41,
    Dicke42,
    Av245a,
    Av245b,
    Av245c,
    Av245d,
}

impl core::fmt::Display for CriterionId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        use CriterionId::*;
        let axes = |m: Axis| {
            let (k, l) = m.others();
            (k.label(), l.label(), m.label())
        };
        match self {
            Ossi8a => write!(f, "OSSI-8a"),
            Ossi8b => write!(f, "OSSI-8b"),
            Ossi8c(m) => {
                let (k, l, mm) = axes(*m);
                write!(f, "OSSI-8c({k},{l},{mm})")
            }
            Ossi8d(m) => {
                let (k, l, mm) = axes(*m);
                write!(f, "OSSI-8d({k},{l},{mm})")
            }
            Inv26a => write!(f, "INV-26a"),
            Inv26b => write!(f, "INV-26b"),
            Inv26c => write!(f, "INV-26c"),
            Inv26d => write!(f, "INV-26d"),
            Eig28a => write!(f, "EIG-28a"),
            Eig28b => write!(f, "EIG-28b"),
            Eig28c => write!(f, "EIG-28c"),
            Eig28d => write!(f, "EIG-28d"),
            Orig3 => write!(f, "ORIG-3"),
            Orig31 => write!(f, "ORIG-31"),
            Kcl34(m) => {
                let (k, l, mm) = axes(*m);
                write!(f, "KCL-34({k},{l},{mm})")
            }
            Kcl37 => write!(f, "KCL-37"),
            KclSym38 => write!(f, "KCLSYM-38"),
            KclSym40 => write!(f, "KCLSYM-40"),
            Dicke41 => write!(f, "DICKE-41"),
            Dicke42 => write!(f, "DICKE-42"),
            Av245a => write!(f, "AV2-45a"),
            Av245b => write!(f, "AV2-45b"),
            Av245c => write!(f, "AV2-45c"),
            Av245d => write!(f, "AV2-45d"),
        }
    }
}

/// Measurement directions backing a report.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionData {
    /// Orthogonal matrix whose rows are the optimal axes.
    Rotation(Mat3),
    /// Relabeling (k, l, m) of the coordinate axes.
    AxisPermutation([Axis; 3]),
}

/// Result of evaluating one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: CriterionId,
    pub outcome: Outcome,
    pub direction: Option<DirectionData>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Evaluated {
        margin: f64,
        violated: bool,
    },
    /// The criterion cannot be applied to these moments (vanishing mean spin
    /// for the original criterion, non-symmetric support for the symmetric
    /// two-qubit forms).
    NotApplicable,
}

impl CriterionReport {
    fn evaluated(id: CriterionId, margin: f64, tol: f64) -> CriterionReport {
        CriterionReport {
            id,
            outcome: Outcome::Evaluated {
                margin,
                violated: margin < -tol,
            },
            direction: None,
        }
    }

    fn with_direction(mut self, d: DirectionData) -> CriterionReport {
        self.direction = Some(d);
        self
    }

    /// Margin when evaluated, `None` when not applicable.
    pub fn margin(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Evaluated { margin, .. } => Some(margin),
            Outcome::NotApplicable => None,
        }
    }

    pub fn violated(&self) -> bool {
        matches!(self.outcome, Outcome::Evaluated { violated: true, .. })
    }
}

/// Report for an inequality that every quantum state satisfies: violation is
/// an input-consistency error, not entanglement.
fn consistency_report(id: CriterionId, margin: f64, tol: f64) -> Result<CriterionReport> {
    if margin < -tol {
        return Err(Error::InconsistentMoments { margin });
    }
    Ok(CriterionReport {
        id,
        outcome: Outcome::Evaluated {
            margin,
            violated: false,
        },
        direction: None,
    })
}

/// The complete set of moment inequalities in fixed x, y, z coordinates
/// (eight reports).
pub fn evaluate_ossi(m: &CollectiveMoments, tol: f64) -> Result<Vec<CriterionReport>> {
    let n = m.n() as f64;
    let k2 = m.k2();
    let sum_k2: f64 = k2.iter().sum();
    let sum_var: f64 = Axis::ALL.iter().map(|&a| m.variance(a)).sum();

    let mut out = Vec::with_capacity(8);
    out.push(consistency_report(
        CriterionId::Ossi8a,
        n * (n + 2.0) / 4.0 - sum_k2,
        tol,
    )?);
    out.push(CriterionReport::evaluated(
        CriterionId::Ossi8b,
        sum_var - n / 2.0,
        tol,
    ));
    for axis_m in Axis::ALL {
        let (k, l) = axis_m.others();
        let margin =
            (n - 1.0) * m.variance(axis_m) - m.second_moment(k) - m.second_moment(l) + n / 2.0;
        out.push(CriterionReport::evaluated(
            CriterionId::Ossi8c(axis_m),
            margin,
            tol,
        ));
    }
    for axis_m in Axis::ALL {
        let (k, l) = axis_m.others();
        let margin = (n - 1.0) * (m.variance(k) + m.variance(l))
            - m.second_moment(axis_m)
            - n * (n - 2.0) / 4.0;
        out.push(CriterionReport::evaluated(
            CriterionId::Ossi8d(axis_m),
            margin,
            tol,
        ));
    }
    Ok(out)
}

/// Coordinate-independent form of the complete family, from traces and the
/// extreme eigenvalues of `chi` (four reports).
pub fn evaluate_invariant_ossi(m: &CollectiveMoments, tol: f64) -> Result<Vec<CriterionReport>> {
    let n = m.n() as f64;
    let chi = m.chi_eigvals();
    let rot = optimal_directions(m);
    let dir = DirectionData::Rotation(rot);

    let mut out = Vec::with_capacity(4);
    out.push(consistency_report(
        CriterionId::Inv26a,
        n * (n + 2.0) / 4.0 - m.trace_c(),
        tol,
    )?);
    out.push(
        CriterionReport::evaluated(CriterionId::Inv26b, m.trace_gamma() - n / 2.0, tol)
            .with_direction(dir.clone()),
    );
    out.push(
        CriterionReport::evaluated(CriterionId::Inv26c, chi[0] - m.trace_c() + n / 2.0, tol)
            .with_direction(dir.clone()),
    );
    out.push(
        CriterionReport::evaluated(
            CriterionId::Inv26d,
            (n - 1.0) * m.trace_gamma() - n * (n - 2.0) / 4.0 - chi[2],
            tol,
        )
        .with_direction(dir),
    );
    Ok(out)
}

/// The same family expressed through the eigenvalues of `chi` and `|J|^2`
/// (four reports).
pub fn evaluate_eigenspace_ossi(m: &CollectiveMoments, tol: f64) -> Result<Vec<CriterionReport>> {
    let n = m.n() as f64;
    let chi = m.chi_eigvals();
    let tr_chi: f64 = chi.iter().sum();
    let jj = m.j_norm_sq();

    let mut out = Vec::with_capacity(4);
    out.push(consistency_report(
        CriterionId::Eig28a,
        n * n * (n + 2.0) / 4.0 - (n - 1.0) * jj - tr_chi,
        tol,
    )?);
    out.push(CriterionReport::evaluated(
        CriterionId::Eig28b,
        tr_chi - n * n / 2.0 - jj,
        tol,
    ));
    out.push(CriterionReport::evaluated(
        CriterionId::Eig28c,
        chi[0] - tr_chi / n - (n - 1.0) / n * jj + n / 2.0,
        tol,
    ));
    out.push(CriterionReport::evaluated(
        CriterionId::Eig28d,
        (n - 1.0) / n * (tr_chi - jj) - n * (n - 2.0) / 4.0 - chi[2],
        tol,
    ));
    Ok(out)
}

/// The original squeezing criterion and its coordinate-independent form.
///
/// The ratio form divides by the transverse mean spin; it is evaluated for
/// every choice of squeezed axis with a non-vanishing transverse mean spin and
/// the worst margin is reported. With no admissible axis the report is
/// `NotApplicable`.
pub fn original_squeezing(
    m: &CollectiveMoments,
    tol: f64,
) -> Result<(CriterionReport, CriterionReport)> {
    let n = m.n() as f64;
    let j = m.j();

    let mut best: Option<(f64, Axis)> = None;
    for axis_m in Axis::ALL {
        let (k, l) = axis_m.others();
        let denom = j[k.index()] * j[k.index()] + j[l.index()] * j[l.index()];
        if denom <= tol::SQUEEZING_DENOMINATOR {
            continue;
        }
        let margin = m.variance(axis_m) / denom - 1.0 / n;
        if best.map_or(true, |(b, _)| margin < b) {
            best = Some((margin, axis_m));
        }
    }
    let ratio_report = match best {
        Some((margin, axis_m)) => {
            let (k, l) = axis_m.others();
            CriterionReport::evaluated(CriterionId::Orig3, margin, tol)
                .with_direction(DirectionData::AxisPermutation([k, l, axis_m]))
        }
        None => CriterionReport {
            id: CriterionId::Orig3,
            outcome: Outcome::NotApplicable,
            direction: None,
        },
    };

    let invariant =
        CriterionReport::evaluated(CriterionId::Orig31, m.chi_eigvals()[0] - m.j_norm_sq(), tol);
    Ok((ratio_report, invariant))
}

/// Whether the moments are compatible with support in the symmetric subspace,
/// which is the precondition of the symmetric two-qubit criteria.
fn symmetric_support(m: &CollectiveMoments) -> bool {
    let n = m.n() as f64;
    let defect = n * (n + 2.0) / 4.0 - m.trace_c();
    defect <= 1e-8 * n * n + 1e-10
}

/// Two-qubit entanglement criteria: the quadratic inequality per axis, its
/// invariant form, and the symmetric-state forms (six reports).
///
/// The symmetric forms hold only for states of the symmetric subspace; for
/// moments without full symmetric support they report `NotApplicable`.
pub fn kcl(m: &CollectiveMoments, tol: f64) -> Result<Vec<CriterionReport>> {
    let n = m.n() as f64;
    let j = m.j();
    let k2 = m.k2();
    let mut out = Vec::with_capacity(6);

    for axis_m in Axis::ALL {
        let (k, l) = axis_m.others();
        let lhs = k2[k.index()] + k2[l.index()] - n / 2.0;
        let rhs = k2[axis_m.index()] + n * (n - 2.0) / 4.0;
        let jm = j[axis_m.index()];
        let margin = rhs * rhs - lhs * lhs - (n - 1.0) * (n - 1.0) * jm * jm;
        out.push(CriterionReport::evaluated(
            CriterionId::Kcl34(axis_m),
            margin,
            tol,
        ));
    }

    // Invariant form: lambda_max([N^2/2 + 1 - 2 Tr C] C - (N-1)^2 gamma)
    //                 <= [N(N-2)/4]^2 - [Tr C - N/2]^2.
    let coeff = n * n / 2.0 + 1.0 - 2.0 * m.trace_c();
    let mut mat = [[0.0; 3]; 3];
    for i in 0..3 {
        for kk in 0..3 {
            mat[i][kk] = coeff * m.c()[i][kk] - (n - 1.0) * (n - 1.0) * m.gamma()[i][kk];
        }
    }
    let lam_max = mat3::sym3_eigvals(&mat)[2];
    let bound = n * (n - 2.0) / 4.0;
    let tr_shift = m.trace_c() - n / 2.0;
    out.push(CriterionReport::evaluated(
        CriterionId::Kcl37,
        bound * bound - tr_shift * tr_shift - lam_max,
        tol,
    ));

    if symmetric_support(m) {
        let mut worst = f64::INFINITY;
        let mut worst_axis = Axis::X;
        for axis in Axis::ALL {
            let margin = 4.0 * m.variance(axis) / n - 1.0
                + 4.0 * j[axis.index()] * j[axis.index()] / (n * n);
            if margin < worst {
                worst = margin;
                worst_axis = axis;
            }
        }
        let (k, l) = worst_axis.others();
        out.push(
            CriterionReport::evaluated(CriterionId::KclSym38, worst, tol)
                .with_direction(DirectionData::AxisPermutation([k, l, worst_axis])),
        );
        out.push(CriterionReport::evaluated(
            CriterionId::KclSym40,
            m.chi_eigvals()[0] - n * n / 4.0,
            tol,
        ));
    } else {
        out.push(CriterionReport {
            id: CriterionId::KclSym38,
            outcome: Outcome::NotApplicable,
            direction: None,
        });
        out.push(CriterionReport {
            id: CriterionId::KclSym40,
            outcome: Outcome::NotApplicable,
            direction: None,
        });
    }
    Ok(out)
}

/// Criterion detecting entanglement near symmetric Dicke states, as the worst
/// axis pair and in invariant form.
pub fn dicke_criterion(
    m: &CollectiveMoments,
    tol: f64,
) -> Result<(CriterionReport, CriterionReport)> {
    let n = m.n() as f64;
    let k2 = m.k2();
    let bound = n * (n + 1.0) / 4.0;
    let mut worst = f64::INFINITY;
    let mut worst_pair = [Axis::X, Axis::Y, Axis::Z];
    for excluded in Axis::ALL {
        let (k, l) = excluded.others();
        let margin = bound - k2[k.index()] - k2[l.index()];
        if margin < worst {
            worst = margin;
            worst_pair = [k, l, excluded];
        }
    }
    let per_pair = CriterionReport::evaluated(CriterionId::Dicke41, worst, tol)
        .with_direction(DirectionData::AxisPermutation(worst_pair));

    let lam_min_c = m.c_eigvals()[0];
    let invariant =
        CriterionReport::evaluated(CriterionId::Dicke42, lam_min_c - m.trace_c() + bound, tol);
    Ok((per_pair, invariant))
}

/// Pauli expectations of a two-qubit state needed by the average-two-qubit
/// forms: `(<sigma_l (x) sigma_l>, s_l)` with `s_l` the single-site mean
/// averaged over the two sides.
fn av2_pauli_data(rho: &DensityOperator) -> Result<([f64; 3], [f64; 3])> {
    if rho.n_sites() != 2 || !rho.op().is_qubits() {
        return Err(Error::arg("average two-qubit forms need a two-qubit state"));
    }
    use crate::collective::pauli_mat;
    use crate::op::{kron, ComplexOperator};
    let i2 = ComplexOperator::identity_qubits(1)?;
    let mut corr = [0.0; 3];
    let mut single = [0.0; 3];
    for axis in Axis::ALL {
        let s = ComplexOperator::new(pauli_mat(axis), vec![2])?;
        corr[axis.index()] = rho.expect(&kron(&s, &s)?);
        let left = rho.expect(&kron(&s, &i2)?);
        let right = rho.expect(&kron(&i2, &s)?);
        single[axis.index()] = 0.5 * (left + right);
    }
    Ok((corr, single))
}

fn av2_reports(
    corr: [f64; 3],
    single: [f64; 3],
    n: usize,
    tol: f64,
) -> Result<Vec<CriterionReport>> {
    let nf = n as f64;
    let sigma: f64 = corr.iter().sum();
    let mut out = Vec::with_capacity(4);
    out.push(consistency_report(CriterionId::Av245a, 1.0 - sigma, tol)?);

    let s_sq: f64 = single.iter().map(|s| s * s).sum();
    out.push(CriterionReport::evaluated(
        CriterionId::Av245b,
        sigma + 1.0 / (nf - 1.0) - nf / (nf - 1.0) * s_sq,
        tol,
    ));

    let mut worst_c = f64::INFINITY;
    let mut worst_d = f64::INFINITY;
    for m_axis in Axis::ALL {
        let (k, l) = m_axis.others();
        let mi = m_axis.index();
        let c_margin = 1.0 + nf * (corr[mi] - single[mi] * single[mi]) - sigma;
        worst_c = worst_c.min(c_margin);
        let d_margin = sigma + 1.0 / (nf - 1.0)
            - nf / (nf - 1.0)
                * (single[k.index()] * single[k.index()] + single[l.index()] * single[l.index()])
            - nf / (nf - 1.0) * corr[mi];
        worst_d = worst_d.min(d_margin);
    }
    out.push(CriterionReport::evaluated(
        CriterionId::Av245c,
        worst_c,
        tol,
    ));
    out.push(CriterionReport::evaluated(
        CriterionId::Av245d,
        worst_d,
        tol,
    ));
    Ok(out)
}

/// The complete family rewritten for an average two-qubit state of an
/// `n`-qubit system (four reports).
pub fn av2_forms(rho_av2: &DensityOperator, n: usize, tol: f64) -> Result<Vec<CriterionReport>> {
    if n < 2 {
        return Err(Error::arg("average two-qubit forms need n >= 2"));
    }
    let (corr, single) = av2_pauli_data(rho_av2)?;
    av2_reports(corr, single, n, tol)
}

/// The average-two-qubit forms computed directly from collective moments.
pub fn av2_forms_from_moments(m: &CollectiveMoments, tol: f64) -> Result<Vec<CriterionReport>> {
    let n = m.n();
    if n < 2 {
        return Err(Error::arg("average two-qubit forms need n >= 2"));
    }
    let nf = n as f64;
    let k2 = m.k2();
    let mut corr = [0.0; 3];
    let mut single = [0.0; 3];
    for l in 0..3 {
        corr[l] = (4.0 * k2[l] - nf) / (nf * (nf - 1.0));
        single[l] = 2.0 * m.j()[l] / nf;
    }
    av2_reports(corr, single, n, tol)
}

/// Bound on the number of spins that can be unentangled with the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnentangledBound {
    /// Every pure-state decomposition has a component with at least
    /// `n - m_max` spins entangled with others.
    pub m_max: usize,
    /// The variance sum is below 1/2: no decomposition contains even one
    /// unentangled spin.
    pub no_unentangled_spin: bool,
}

/// Bound from the variance sum: `Var J_x + Var J_y + Var J_z >= M/2` holds
/// whenever `M` spins are unentangled with the rest.
pub fn unentangled_bound(m: &CollectiveMoments) -> UnentangledBound {
    let sum_var: f64 = Axis::ALL.iter().map(|&a| m.variance(a)).sum();
    let raw = libm::floor(2.0 * sum_var);
    let m_max = if raw < 0.0 {
        0
    } else {
        (raw as usize).min(m.n())
    };
    UnentangledBound {
        m_max,
        no_unentangled_spin: m_max == 0,
    }
}

/// Orthogonal matrix of optimal measurement directions: its rows diagonalise
/// `chi` with eigenvalues ascending.
///
/// Degenerate eigenspaces are canonicalised against the coordinate axes, so a
/// fully degenerate `chi` yields the identity.
pub fn optimal_directions(m: &CollectiveMoments) -> Mat3 {
    let (vals, vecs) = mat3::sym3_eig(m.chi());
    canonicalize_frame(vals, vecs)
}

fn canonicalize_frame(vals: [f64; 3], vecs: Mat3) -> Mat3 {
    let scale = vals.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * scale;
    let mut out = vecs;

    // Group indices into degenerate clusters (eigenvalues ascending).
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && close(vals[end], vals[start]) {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            // Rebuild the cluster rows from coordinate axes projected onto the
            // eigenspace, taken in x, y, z order.
            let mut chosen: Vec<[f64; 3]> = Vec::new();
            for axis in 0..3 {
                if chosen.len() == size {
                    break;
                }
                let e = [
                    (axis == 0) as u8 as f64,
                    (axis == 1) as u8 as f64,
                    (axis == 2) as u8 as f64,
                ];
                // Project onto the cluster span.
                let mut w = [0.0; 3];
                for r in start..end {
                    let coef = mat3::dot3(&vecs[r], &e);
                    for i in 0..3 {
                        w[i] += coef * vecs[r][i];
                    }
                }
                for prev in &chosen {
                    let coef = mat3::dot3(prev, &w);
                    for i in 0..3 {
                        w[i] -= coef * prev[i];
                    }
                }
                let norm = libm::sqrt(mat3::norm_sq3(&w));
                if norm > 1e-6 {
                    for x in &mut w {
                        *x /= norm;
                    }
                    chosen.push(w);
                }
            }
            if chosen.len() == size {
                for (offset, row) in chosen.into_iter().enumerate() {
                    out[start + offset] = row;
                }
            }
        } else {
            // Fix the sign of isolated eigenvectors: largest component positive.
            let row = out[start];
            let mut lead = 0;
            for i in 1..3 {
                if row[i].abs() > row[lead].abs() {
                    lead = i;
                }
            }
            if row[lead] < 0.0 {
                for x in &mut out[start] {
                    *x = -*x;
                }
            }
        }
        start = end;
    }
    out
}

/// Every report derivable from a set of collective moments: the complete
/// family in all three forms, the original criterion, the two-qubit criteria,
/// the Dicke criterion and the average-two-qubit forms.
pub fn evaluate_all(m: &CollectiveMoments, tol: f64) -> Result<Vec<CriterionReport>> {
    if m.n() < 2 {
        return Err(Error::arg("entanglement criteria need at least two qubits"));
    }
    let mut out = evaluate_ossi(m, tol)?;
    out.extend(evaluate_invariant_ossi(m, tol)?);
    out.extend(evaluate_eigenspace_ossi(m, tol)?);
    let (a, b) = original_squeezing(m, tol)?;
    out.push(a);
    out.push(b);
    out.extend(kcl(m, tol)?);
    let (a, b) = dicke_criterion(m, tol)?;
    out.push(a);
    out.push(b);
    out.extend(av2_forms_from_moments(m, tol)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective::{moments, product_state, BlochVector};
    use crate::models::dicke_state;
    use crate::op::DensityOperator;
    use num_complex::Complex64;

    fn singlet2() -> DensityOperator {
        let s = 1.0 / libm::sqrt(2.0);
        DensityOperator::pure(
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            alloc::vec![2, 2],
        )
        .unwrap()
    }

    fn coherent_up(n: usize) -> CollectiveMoments {
        let blochs = alloc::vec![BlochVector::new(0.0, 0.0, 1.0).unwrap(); n];
        moments(&product_state(&blochs).unwrap()).unwrap()
    }

    fn report_for(reports: &[CriterionReport], id: CriterionId) -> &CriterionReport {
        reports.iter().find(|r| r.id == id).unwrap()
    }

    #[test]
    fn singlet_violates_8b_with_margin_minus_one() {
        let m = moments(&singlet2()).unwrap();
        let reports = evaluate_ossi(&m, DEFAULT_TOL).unwrap();
        let r = report_for(&reports, CriterionId::Ossi8b);
        assert!((r.margin().unwrap() + 1.0).abs() < 1e-12);
        assert!(r.violated());
    }

    #[test]
    fn dicke_24_margins() {
        let m = moments(&dicke_state(4, 2).unwrap()).unwrap();
        let reports = evaluate_ossi(&m, DEFAULT_TOL).unwrap();
        let r = report_for(&reports, CriterionId::Ossi8c(Axis::Z));
        assert!(
            (r.margin().unwrap() + 4.0).abs() < 1e-12,
            "margin {:?}",
            r.margin()
        );
        assert!(r.violated());

        let kcl_reports = kcl(&m, DEFAULT_TOL).unwrap();
        let r = report_for(&kcl_reports, CriterionId::Kcl34(Axis::Z));
        assert!((r.margin().unwrap() + 12.0).abs() < 1e-12);
        assert!(r.violated());

        let (d41, _) = dicke_criterion(&m, DEFAULT_TOL).unwrap();
        assert!((d41.margin().unwrap() + 1.0).abs() < 1e-12);
        assert!(d41.violated());
    }

    #[test]
    fn coherent_state_satisfies_everything() {
        let m = coherent_up(4);
        for r in evaluate_all(&m, DEFAULT_TOL).unwrap() {
            assert!(
                !r.violated(),
                "{} unexpectedly violated: {:?}",
                r.id,
                r.outcome
            );
        }
        let (d41, _) = dicke_criterion(&m, DEFAULT_TOL).unwrap();
        // Worst pair involves z and sits exactly on the bound; the (x,y) pair
        // has margin 5 - 2 = 3.
        assert!(d41.margin().unwrap().abs() < 1e-12);
        let k2 = m.k2();
        assert!((4.0 * 5.0 / 4.0 - k2[0] - k2[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn invariant_margins_match_stated_values() {
        let m = moments(&singlet2()).unwrap();
        let inv = evaluate_invariant_ossi(&m, DEFAULT_TOL).unwrap();
        assert!((report_for(&inv, CriterionId::Inv26b).margin().unwrap() + 1.0).abs() < 1e-12);
        let eig = evaluate_eigenspace_ossi(&m, DEFAULT_TOL).unwrap();
        assert!((report_for(&eig, CriterionId::Eig28b).margin().unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn original_squeezing_cases() {
        // Coherent state along z: margin 0 via a permuted frame.
        let m = coherent_up(4);
        let (r3, r31) = original_squeezing(&m, DEFAULT_TOL).unwrap();
        assert!(r3.margin().unwrap().abs() < 1e-12);
        assert!(!r3.violated());
        assert!(r31.margin().unwrap() >= -1e-12);

        // Singlet: no transverse mean spin anywhere, margin 31 is zero.
        let m = moments(&singlet2()).unwrap();
        let (r3, r31) = original_squeezing(&m, DEFAULT_TOL).unwrap();
        assert_eq!(r3.outcome, Outcome::NotApplicable);
        assert!(r31.margin().unwrap().abs() < 1e-12);
        assert!(!r31.violated());
    }

    #[test]
    fn av2_forms_of_singlet() {
        let s = singlet2();
        let reports = av2_forms(&s, 2, DEFAULT_TOL).unwrap();
        let b = report_for(&reports, CriterionId::Av245b);
        assert!((b.margin().unwrap() + 2.0).abs() < 1e-12);
        assert!(b.violated());
        // Moments route gives the same values.
        let m = moments(&s).unwrap();
        let from_m = av2_forms_from_moments(&m, DEFAULT_TOL).unwrap();
        for (a, b) in reports.iter().zip(&from_m) {
            assert_eq!(a.id, b.id);
            assert!((a.margin().unwrap() - b.margin().unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_forms_gate() {
        // Product |01> is not symmetric-supported: forms must be inapplicable
        // (they would otherwise fire on this separable state).
        let blochs = [
            BlochVector::new(0.0, 0.0, 1.0).unwrap(),
            BlochVector::new(0.0, 0.0, -1.0).unwrap(),
        ];
        let m = moments(&product_state(&blochs).unwrap()).unwrap();
        let reports = kcl(&m, DEFAULT_TOL).unwrap();
        assert_eq!(
            report_for(&reports, CriterionId::KclSym38).outcome,
            Outcome::NotApplicable
        );
        assert_eq!(
            report_for(&reports, CriterionId::KclSym40).outcome,
            Outcome::NotApplicable
        );

        // Dicke |2,4> is symmetric: both forms evaluate and fire.
        let m = moments(&dicke_state(4, 2).unwrap()).unwrap();
        let reports = kcl(&m, DEFAULT_TOL).unwrap();
        assert!(report_for(&reports, CriterionId::KclSym38).violated());
        assert!(report_for(&reports, CriterionId::KclSym40).violated());
    }

    #[test]
    fn unentangled_bound_values() {
        let m = moments(&singlet2()).unwrap();
        let b = unentangled_bound(&m);
        assert_eq!(b.m_max, 0);
        assert!(b.no_unentangled_spin);

        let m = coherent_up(4);
        let b = unentangled_bound(&m);
        assert_eq!(b.m_max, 4);
        assert!(!b.no_unentangled_spin);

        // Var sum 1.3 on 4 qubits -> floor(2.6) = 2.
        let c = [[0.6, 0.0, 0.0], [0.0, 0.4, 0.0], [0.0, 0.0, 4.3]];
        let m = CollectiveMoments::from_measurements(4, [0.0, 0.0, 2.0], c).unwrap();
        assert_eq!(unentangled_bound(&m).m_max, 2);
    }

    #[test]
    fn optimal_directions_diagonalize_chi() {
        // Already diagonal: identity comes back.
        let m = coherent_up(4);
        let o = optimal_directions(&m);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((o[i][j].abs() - want).abs() < 1e-9, "o = {o:?}");
            }
        }

        // Rotated singlet-like moments come back diagonal.
        let mut rng = crate::rng::SplitMix64::new(5);
        let amps: Vec<Complex64> = (0..16)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let rho = DensityOperator::pure(&amps, alloc::vec![2; 4]).unwrap();
        let m = moments(&rho).unwrap();
        let o = optimal_directions(&m);
        let d = mat3::congruence3(&o, m.chi());
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d[i][j].abs() < 1e-9, "off-diagonal {}", d[i][j]);
                }
            }
        }
        assert!(d[0][0] <= d[1][1] + 1e-9 && d[1][1] <= d[2][2] + 1e-9);

        // Evaluating the fixed-axis family in the rotated frame reproduces the
        // invariant verdicts with matching margins.
        let rotated = crate::collective::rotate_moments(&m, &o).unwrap();
        let fixed = evaluate_ossi(&rotated, DEFAULT_TOL).unwrap();
        let inv = evaluate_invariant_ossi(&m, DEFAULT_TOL).unwrap();
        let min8c = Axis::ALL
            .iter()
            .map(|&a| report_for(&fixed, CriterionId::Ossi8c(a)).margin().unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((min8c - report_for(&inv, CriterionId::Inv26c).margin().unwrap()).abs() < 1e-9);
        let min8d = Axis::ALL
            .iter()
            .map(|&a| report_for(&fixed, CriterionId::Ossi8d(a)).margin().unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((min8d - report_for(&inv, CriterionId::Inv26d).margin().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn inconsistent_moments_error_through_8a() {
        let c = [[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.1]];
        // n = 2: bound is 2, trace is 6.1 -> the constructor already rejects.
        assert!(matches!(
            CollectiveMoments::from_measurements(2, [0.0; 3], c),
            Err(Error::InconsistentMoments { .. })
        ));
    }

    #[test]
    fn criterion_ids_render() {
        assert_eq!(
            alloc::format!("{}", CriterionId::Ossi8c(Axis::Z)),
            "OSSI-8c(x,y,z)"
        );
        assert_eq!(
            alloc::format!("{}", CriterionId::Ossi8d(Axis::X)),
            "OSSI-8d(y,z,x)"
        );
        assert_eq!(
            alloc::format!("{}", CriterionId::Kcl34(Axis::Y)),
            "KCL-34(z,x,y)"
        );
        assert_eq!(alloc::format!("{}", CriterionId::Inv26a), "INV-26a");
    }
}
