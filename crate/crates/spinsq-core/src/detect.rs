//! State-level detectors (partial transpose and realignment over all
//! bipartitions), thermal-model caches, the critical-temperature solver and
//! bound-entanglement window scans.

use crate::collective::{moments, rotate_moments, Axis, CollectiveMoments};
use crate::criteria::{self, CriterionId};
use crate::linalg::{self, BlockEig, CMat};
use crate::models::{build_hamiltonian, permutation_invariant, HamiltonianSpec, ModelKind};
use crate::op::{
    partial_transpose, realign, trace_norm, Bipartition, ComplexOperator, DensityOperator,
};
use crate::{tol, Error, Result};
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Which detector drives a verdict or a temperature scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorId {
    /// Negative partial transpose for at least one bipartition.
    PptAny,
    /// Realigned trace norm above one for at least one bipartition.
    CcnrAny,
    /// The coordinate-sum consistency bound (never detects entanglement).
    Ossi8a,
    /// Variance-sum inequality.
    Ossi8b,
    /// Per-axis inequality of the `8c` family, any axis.
    Ossi8c,
    /// Per-axis inequality of the `8d` family, any axis.
    Ossi8d,
    /// Any of the three entanglement inequalities of the complete family.
    SsiAny,
}

impl core::fmt::Display for DetectorId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            DetectorId::PptAny => "PPT-any",
            DetectorId::CcnrAny => "CCNR-any",
            DetectorId::Ossi8a => "OSSI-8a",
            DetectorId::Ossi8b => "OSSI-8b",
            DetectorId::Ossi8c => "OSSI-8c",
            DetectorId::Ossi8d => "OSSI-8d",
            DetectorId::SsiAny => "SSI-any",
        };
        f.write_str(s)
    }
}

/// Outcome of running one detector on one state.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorVerdict {
    pub id: DetectorId,
    pub detected: bool,
    /// Minimal partial-transpose eigenvalue, maximal realigned trace norm
    /// minus one, or the (most violated) criterion margin.
    pub witness: f64,
    /// Bipartition realising the witness, for the bipartition detectors.
    pub part: Option<Bipartition>,
}

/// Smallest eigenvalue of the partial transpose across one bipartition.
pub fn min_pt_eigenvalue(rho: &DensityOperator, part: &Bipartition) -> Result<f64> {
    let pt = partial_transpose(rho, part)?;
    let scale = pt.mat().max_abs().max(1.0);
    let be = BlockEig::new(pt.mat(), 1e-13 * scale)?;
    Ok(be.min_value())
}

/// Whether the partial transpose across `part` has an eigenvalue below `-tol`.
pub fn is_npt(rho: &DensityOperator, part: &Bipartition, tol: f64) -> Result<bool> {
    let pt = partial_transpose(rho, part)?;
    Ok(!linalg::is_psd_within(pt.mat(), tol))
}

/// Partial-transpose detector over all canonical bipartitions, with the full
/// eigenvalue witness.
pub fn ppt_any(rho: &DensityOperator, tol: f64) -> Result<DetectorVerdict> {
    let parts = Bipartition::enumerate(rho.n_sites());
    if parts.is_empty() {
        return Err(Error::arg("PPT detection needs at least two sites"));
    }
    let mut witness = f64::INFINITY;
    let mut argmin = None;
    for part in parts {
        let val = min_pt_eigenvalue(rho, &part)?;
        if val < witness {
            witness = val;
            argmin = Some(part);
        }
    }
    Ok(DetectorVerdict {
        id: DetectorId::PptAny,
        detected: witness < -tol,
        witness,
        part: argmin,
    })
}

/// Realignment detector over all canonical bipartitions; witness is the
/// maximal trace norm minus one.
pub fn ccnr_any(rho: &DensityOperator, tol: f64) -> Result<DetectorVerdict> {
    let parts = Bipartition::enumerate(rho.n_sites());
    if parts.is_empty() {
        return Err(Error::arg("CCNR detection needs at least two sites"));
    }
    let mut witness = f64::NEG_INFINITY;
    let mut argmax = None;
    for part in parts {
        let r = realign(rho, &part)?;
        let val = trace_norm(&r)? - 1.0;
        if val > witness {
            witness = val;
            argmax = Some(part);
        }
    }
    Ok(DetectorVerdict {
        id: DetectorId::CcnrAny,
        detected: witness > tol,
        witness,
        part: argmax,
    })
}

fn ssi_family_margin(m: &CollectiveMoments, id: DetectorId, tol: f64) -> Result<f64> {
    let reports = criteria::evaluate_ossi(m, tol)?;
    let pick = |pred: &dyn Fn(&CriterionId) -> bool| {
        reports
            .iter()
            .filter(|r| pred(&r.id))
            .filter_map(|r| r.margin())
            .fold(f64::INFINITY, f64::min)
    };
    Ok(match id {
        DetectorId::Ossi8a => pick(&|c| matches!(c, CriterionId::Ossi8a)),
        DetectorId::Ossi8b => pick(&|c| matches!(c, CriterionId::Ossi8b)),
        DetectorId::Ossi8c => pick(&|c| matches!(c, CriterionId::Ossi8c(_))),
        DetectorId::Ossi8d => pick(&|c| matches!(c, CriterionId::Ossi8d(_))),
        DetectorId::SsiAny => pick(&|c| {
            matches!(
                c,
                CriterionId::Ossi8b | CriterionId::Ossi8c(_) | CriterionId::Ossi8d(_)
            )
        }),
        _ => return Err(Error::arg("not a moment-criterion detector")),
    })
}

/// Local frame a model is processed in. A product of identical single-qubit
/// rotations changes neither partial-transpose spectra nor separability, so
/// models may be cached in whichever frame keeps their matrices sparsest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Frame {
    Identity,
    /// All qubits rotated by the Hadamard (x <-> z, y -> -y).
    HadamardAll,
}

/// Cached eigen-data of one model: block eigendecomposition of H and the
/// symmetry-reduced list of bipartition representatives.
#[derive(Debug)]
pub struct ThermalModel {
    spec: HamiltonianSpec,
    frame: Frame,
    eig: BlockEig,
    /// Orbit representatives of the canonical bipartitions under the model's
    /// verified site symmetries.
    parts: Vec<Bipartition>,
    n: usize,
}

impl ThermalModel {
    pub fn new(spec: &HamiltonianSpec) -> Result<ThermalModel> {
        spec.validate()?;
        let n = spec.n;
        let (h, frame) = match spec.kind {
            // The transverse-field Ising chain is dense in the z basis but
            // splits into two parity blocks after a global Hadamard.
            ModelKind::IsingTransverse { b } => {
                let mut mat = CMat::zeros(1 << n, 1 << n);
                for k in 1..=n {
                    let next = k % n + 1;
                    super::models::add_coupling_for_detect(&mut mat, n, k, next, Axis::X, 1.0);
                    super::models::add_field_for_detect(&mut mat, n, k, Axis::Z, b);
                }
                (ComplexOperator::new(mat, vec![2; n])?, Frame::HadamardAll)
            }
            _ => (build_hamiltonian(spec)?, Frame::Identity),
        };

        let scale = h.mat().max_abs().max(1.0);
        let eig = BlockEig::new(h.mat(), 1e-13 * scale)?;

        // Verify the claimed site symmetries on the built matrix before using
        // them to prune bipartitions.
        let mut verified: Vec<Vec<usize>> = Vec::new();
        for gen in spec.symmetry_generators() {
            if permutation_invariant(&h, &gen, 1e-10 * scale) {
                verified.push(gen);
            }
        }
        let parts = orbit_representatives(n, &verified);
        Ok(ThermalModel {
            spec: spec.clone(),
            frame,
            eig,
            parts,
            n,
        })
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn bipartition_representatives(&self) -> &[Bipartition] {
        &self.parts
    }

    /// Thermal state at temperature `t` (ground-space projector at `t = 0`),
    /// in the model's internal frame.
    fn state_at_internal(&self, t: f64) -> Result<DensityOperator> {
        if t < 0.0 {
            return Err(Error::arg("temperature must be non-negative"));
        }
        let min = self.eig.min_value();
        let z: f64 = if t == 0.0 {
            self.eig
                .blocks
                .iter()
                .flat_map(|b| b.vals.iter())
                .filter(|&&v| v - min <= 1e-9)
                .count() as f64
        } else {
            self.eig
                .blocks
                .iter()
                .flat_map(|b| b.vals.iter())
                .map(|&v| libm::exp(-(v - min) / t))
                .sum()
        };
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::Numeric("thermal partition sum is not positive"));
        }
        let mat = if t == 0.0 {
            self.eig
                .map_fn(|v| if v - min <= 1e-9 { 1.0 / z } else { 0.0 })
        } else {
            self.eig.map_fn(|v| libm::exp(-(v - min) / t) / z)
        };
        Ok(DensityOperator::trusted(ComplexOperator::new(
            mat,
            vec![2; self.n],
        )?))
    }

    /// Thermal state in the laboratory frame. For models cached in a rotated
    /// frame this costs an extra basis change, so detector paths avoid it.
    pub fn state_at(&self, t: f64) -> Result<DensityOperator> {
        let rho = self.state_at_internal(t)?;
        match self.frame {
            Frame::Identity => Ok(rho),
            Frame::HadamardAll => {
                let h1 = hadamard_all(self.n);
                let mat = h1.mul(rho.mat()).mul(&h1);
                Ok(DensityOperator::trusted(ComplexOperator::new(
                    mat,
                    vec![2; self.n],
                )?))
            }
        }
    }

    /// Collective moments of the thermal state in the laboratory frame.
    pub fn moments_at(&self, t: f64) -> Result<CollectiveMoments> {
        let m = moments(&self.state_at_internal(t)?)?;
        match self.frame {
            Frame::Identity => Ok(m),
            // Hadamard on every site maps (x, y, z) -> (z, -y, x).
            Frame::HadamardAll => {
                rotate_moments(&m, &[[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]])
            }
        }
    }

    /// Whether `detector` fires on the thermal state at `t`. `hint` carries
    /// the index of the bipartition that fired last, which is tried first.
    pub fn detects_at(
        &self,
        detector: DetectorId,
        t: f64,
        tol: f64,
        hint: &mut usize,
    ) -> Result<bool> {
        match detector {
            DetectorId::PptAny => {
                let rho = self.state_at_internal(t)?;
                let count = self.parts.len();
                for offset in 0..count {
                    let idx = (*hint + offset) % count;
                    if is_npt(&rho, &self.parts[idx], tol)? {
                        *hint = idx;
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            DetectorId::CcnrAny => {
                let rho = self.state_at_internal(t)?;
                let count = self.parts.len();
                for offset in 0..count {
                    let idx = (*hint + offset) % count;
                    let r = realign(&rho, &self.parts[idx])?;
                    if trace_norm(&r)? - 1.0 > tol {
                        *hint = idx;
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => {
                let m = self.moments_at(t)?;
                Ok(ssi_family_margin(&m, detector, tol)? < -tol)
            }
        }
    }

    /// All bipartition representatives that are NPT at `t`.
    pub fn npt_representatives(&self, t: f64, tol: f64) -> Result<Vec<Bipartition>> {
        let rho = self.state_at_internal(t)?;
        let mut out = Vec::new();
        for part in &self.parts {
            if is_npt(&rho, part, tol)? {
                out.push(part.clone());
            }
        }
        Ok(out)
    }
}

/// Global single-qubit Hadamard as a matrix (it is its own inverse).
fn hadamard_all(n: usize) -> CMat {
    let h1 = CMat::from_fn(2, 2, |i, j| {
        let s = 1.0 / libm::sqrt(2.0);
        Complex64::new(if i == 1 && j == 1 { -s } else { s }, 0.0)
    });
    let mut out = h1.clone();
    for _ in 1..n {
        out = out.kron(&h1);
    }
    out
}

/// Orbit representatives of canonical bipartitions under a verified set of
/// site permutations. With no symmetries this is the full canonical list.
fn orbit_representatives(n: usize, generators: &[Vec<usize>]) -> Vec<Bipartition> {
    let all = Bipartition::enumerate(n);
    if generators.is_empty() {
        return all;
    }
    // Every adjacent transposition verified means full permutation symmetry:
    // only the side size matters. The group closure below would blow past its
    // cap for n! elements.
    let adjacent: Vec<Vec<usize>> = (1..n)
        .map(|s| {
            let mut p: Vec<usize> = (1..=n).collect();
            p.swap(s - 1, s);
            p
        })
        .collect();
    if adjacent.iter().all(|t| generators.contains(t)) {
        return (1..=n / 2)
            .map(|k| {
                let side: Vec<usize> = (1..=k).collect();
                Bipartition::new(&side, n).expect("size-class side is valid")
            })
            .collect();
    }
    // Close the generator set into the full group on subsets encoded as
    // bitmasks over sites 1..=n (bit s-1 for site s).
    let identity: Vec<usize> = (1..=n).collect();
    let mut group: Vec<Vec<usize>> = vec![identity];
    let mut frontier = group.clone();
    let limit = 4096;
    while !frontier.is_empty() && group.len() < limit {
        let mut next = Vec::new();
        for g in &frontier {
            for gen in generators {
                // compose: site s -> gen[g[s]-1]
                let composed: Vec<usize> = (1..=n).map(|s| gen[g[s - 1] - 1]).collect();
                if !group.contains(&composed) {
                    group.push(composed.clone());
                    next.push(composed);
                }
            }
        }
        frontier = next;
    }

    let mask_of =
        |part: &Bipartition| -> u64 { part.side_a().iter().fold(0u64, |m, &s| m | 1 << (s - 1)) };
    let full: u64 = (1 << n) - 1;
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut reps = Vec::new();
    for part in all {
        let m0 = mask_of(&part);
        // Canonical orbit key: the smallest mask among all images of both
        // sides under the group.
        let mut key = u64::MAX;
        for g in &group {
            let mut img = 0u64;
            for s in 1..=n {
                if m0 >> (s - 1) & 1 == 1 {
                    img |= 1 << (g[s - 1] - 1);
                }
            }
            key = key.min(img).min(full & !img);
        }
        if seen.insert(key) {
            reps.push(part);
        }
    }
    reps
}

/// Result of a critical-temperature search.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalTemperature {
    pub spec: HamiltonianSpec,
    pub detector: DetectorId,
    pub t_c: f64,
    /// Final bisection bracket: the detector fires at `.0` and not at `.1`.
    pub bracket: (f64, f64),
    /// The 64-point log-spaced scan showed a single firing -> silent
    /// transition.
    pub scan_validated: bool,
    /// Every firing -> silent transition seen in the scan.
    pub transitions: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TcResult {
    Found(CriticalTemperature),
    /// The detector never fired below `t_max` (or was still firing at
    /// `t_max`, reported through `detected_at_t_max`).
    NoneFound {
        detected_at_t_max: bool,
    },
}

pub const SCAN_POINTS: usize = 64;

/// Log-spaced scan grid over `(t_max/1000, t_max]`.
pub fn scan_grid(t_max: f64) -> Vec<f64> {
    let lo = t_max * 1e-3;
    let ratio = libm::pow(t_max / lo, 1.0 / (SCAN_POINTS as f64 - 1.0));
    (0..SCAN_POINTS)
        .map(|i| lo * libm::pow(ratio, i as f64))
        .collect()
}

/// Critical temperature of a detector on a model's thermal states: a 64-point
/// log-spaced scan followed by bisection of the highest firing bracket down
/// to width `tol_t`.
pub fn critical_temperature(
    spec: &HamiltonianSpec,
    detector: DetectorId,
    t_max: f64,
    tol_t: f64,
) -> Result<TcResult> {
    let model = ThermalModel::new(spec)?;
    critical_temperature_cached(&model, detector, t_max, tol_t)
}

/// Same as [`critical_temperature`] but reusing a prepared [`ThermalModel`].
pub fn critical_temperature_cached(
    model: &ThermalModel,
    detector: DetectorId,
    t_max: f64,
    tol_t: f64,
) -> Result<TcResult> {
    if !(t_max > 0.0) || !(tol_t > 0.0) {
        return Err(Error::arg("t_max and tolerance must be positive"));
    }
    let grid = scan_grid(t_max);
    let mut hint = 0usize;
    let mut fired = Vec::with_capacity(grid.len());
    for &t in &grid {
        fired.push(model.detects_at(detector, t, tol::CRITERION, &mut hint)?);
    }
    let Some(hi_fire) = (0..grid.len()).rev().find(|&i| fired[i]) else {
        return Ok(TcResult::NoneFound {
            detected_at_t_max: false,
        });
    };
    if hi_fire == grid.len() - 1 {
        return Ok(TcResult::NoneFound {
            detected_at_t_max: true,
        });
    }

    let mut transitions = Vec::new();
    for i in 0..grid.len() - 1 {
        if fired[i] && !fired[i + 1] {
            transitions.push((grid[i], grid[i + 1]));
        }
    }
    let scan_validated =
        transitions.len() == 1 && fired.iter().take_while(|&&f| f).count() == hi_fire + 1;

    let (mut lo, mut hi) = (grid[hi_fire], grid[hi_fire + 1]);
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        if model.detects_at(detector, mid, tol::CRITERION, &mut hint)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(TcResult::Found(CriticalTemperature {
        spec: model.spec().clone(),
        detector,
        t_c: 0.5 * (lo + hi),
        bracket: (lo, hi),
        scan_validated,
        transitions,
    }))
}

/// Joint PPT / moment-criterion verdicts over a temperature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundScanPoint {
    pub t: f64,
    /// Every bipartition has a positive partial transpose.
    pub fully_ppt: bool,
    /// Some inequality of the complete moment family is violated.
    pub ssi_detected: bool,
}

impl BoundScanPoint {
    /// Fully PPT yet detected: bound entanglement.
    pub fn bound_entangled(&self) -> bool {
        self.fully_ppt && self.ssi_detected
    }
}

/// Scans a temperature grid for the window where the state is fully PPT yet
/// still detected by the moment criteria.
pub fn bound_window(spec: &HamiltonianSpec, t_grid: &[f64]) -> Result<Vec<BoundScanPoint>> {
    let model = ThermalModel::new(spec)?;
    let mut hint = 0usize;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let npt = model.detects_at(DetectorId::PptAny, t, tol::CRITERION, &mut hint)?;
        let ssi = model.detects_at(DetectorId::SsiAny, t, tol::CRITERION, &mut hint)?;
        out.push(BoundScanPoint {
            t,
            fully_ppt: !npt,
            ssi_detected: ssi,
        });
    }
    Ok(out)
}

/// Critical temperatures of the nanotube ring model.
#[derive(Debug, Clone)]
pub struct NanotubeReport {
    pub tc_variance_sum: CriticalTemperature,
    pub tc_planar: CriticalTemperature,
    pub tc_ppt: CriticalTemperature,
    /// Bipartition still NPT just below the PPT critical temperature.
    pub ppt_argmax: Bipartition,
    /// The coordinate-sum bound stayed consistent on the whole scan.
    pub sum_bound_consistent: bool,
    /// The `8c` family detected nothing anywhere on the scan.
    pub no_detection_8c: bool,
    /// Temperatures between PPT and variance-sum critical points carry bound
    /// entanglement.
    pub bound_window: (f64, f64),
}

/// Runs the full nanotube analysis. `tol_t` is the bisection tolerance in
/// Kelvin.
pub fn nanotube_report(tol_t: f64) -> Result<NanotubeReport> {
    let spec = HamiltonianSpec::new(ModelKind::Nanotube, 9)?;
    let model = ThermalModel::new(&spec)?;
    let t_max = 730.0;

    let solve = |det: DetectorId| -> Result<CriticalTemperature> {
        match critical_temperature_cached(&model, det, t_max, tol_t)? {
            TcResult::Found(tc) => Ok(tc),
            TcResult::NoneFound { .. } => Err(Error::Numeric("expected detection below t_max")),
        }
    };
    let tc_variance_sum = solve(DetectorId::Ossi8b)?;
    let tc_planar = solve(DetectorId::Ossi8d)?;
    let tc_ppt = solve(DetectorId::PptAny)?;

    // Just below the PPT transition only the extremal splitting stays NPT.
    let probe_t = tc_ppt.bracket.0;
    let npt = model.npt_representatives(probe_t, tol::CRITERION)?;
    let ppt_argmax = npt.into_iter().next().ok_or(Error::Numeric(
        "no NPT bipartition at the firing bracket edge",
    ))?;

    let mut hint = 0usize;
    let mut sum_bound_consistent = true;
    let mut no_detection_8c = true;
    for &t in &scan_grid(t_max) {
        let m = model.moments_at(t)?;
        if ssi_family_margin(&m, DetectorId::Ossi8a, tol::CRITERION)? < -tol::CRITERION {
            sum_bound_consistent = false;
        }
        if model.detects_at(DetectorId::Ossi8c, t, tol::CRITERION, &mut hint)? {
            no_detection_8c = false;
        }
    }

    let bound_window = (tc_ppt.t_c, tc_variance_sum.t_c);
    Ok(NanotubeReport {
        tc_variance_sum,
        tc_planar,
        tc_ppt,
        ppt_argmax,
        sum_bound_consistent,
        no_detection_8c,
        bound_window,
    })
}
