//! Geometry of the separable region: extreme points and facets of the
//! second-moment polytope, membership tests, constructive extremal separable
//! states and random separable sampling.

use crate::collective::{Axis, BlochVector};
use crate::linalg::mat3::{Mat3, Vec3};
use crate::linalg::CMat;
use crate::op::{ComplexOperator, DensityOperator};
use crate::rng::SplitMix64;
use crate::{check_capacity, tol, Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Which three-dimensional space the polytope lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolytopeSpace {
    /// Second moments `(<J_x^2>, <J_y^2>, <J_z^2>)`.
    KSpace,
    /// The three eigenvalues of `chi`.
    EigenSpace,
}

/// Extreme-point label: an `A`-type point (maximal moment along one axis) or a
/// `B`-type point (minimal moment along one axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexLabel {
    A(Axis),
    B(Axis),
}

impl VertexLabel {
    pub const ALL: [VertexLabel; 6] = [
        VertexLabel::A(Axis::X),
        VertexLabel::A(Axis::Y),
        VertexLabel::A(Axis::Z),
        VertexLabel::B(Axis::X),
        VertexLabel::B(Axis::Y),
        VertexLabel::B(Axis::Z),
    ];

    /// Display label; lower case in eigenvalue space by convention.
    pub fn name(&self, space: PolytopeSpace) -> alloc::string::String {
        let (prefix, axis) = match self {
            VertexLabel::A(a) => ("A", a),
            VertexLabel::B(a) => ("B", a),
        };
        match space {
            PolytopeSpace::KSpace => format!("{prefix}_{}", axis.label()),
            PolytopeSpace::EigenSpace => format!("{}_{}", prefix.to_lowercase(), axis.label()),
        }
    }
}

/// Facet label mirroring the four inequality families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetLabel {
    /// Upper bound on the coordinate sum (saturated by symmetric states).
    SumUpper,
    /// Lower bound on the variance sum.
    SumLower,
    /// Per-axis bound with `m` as the singled-out axis of the `8c` family.
    CAxis(Axis),
    /// Per-axis bound with `m` as the singled-out axis of the `8d` family.
    DAxis(Axis),
}

impl FacetLabel {
    pub const ALL: [FacetLabel; 8] = [
        FacetLabel::SumUpper,
        FacetLabel::SumLower,
        FacetLabel::CAxis(Axis::X),
        FacetLabel::CAxis(Axis::Y),
        FacetLabel::CAxis(Axis::Z),
        FacetLabel::DAxis(Axis::X),
        FacetLabel::DAxis(Axis::Y),
        FacetLabel::DAxis(Axis::Z),
    ];

    pub fn name(&self, space: PolytopeSpace) -> alloc::string::String {
        let base = match space {
            PolytopeSpace::KSpace => "8",
            PolytopeSpace::EigenSpace => "28",
        };
        match self {
            FacetLabel::SumUpper => format!("{base}a"),
            FacetLabel::SumLower => format!("{base}b"),
            FacetLabel::CAxis(m) => format!("{base}c({})", m.label()),
            FacetLabel::DAxis(m) => format!("{base}d({})", m.label()),
        }
    }

    /// The three vertices lying on this facet.
    pub fn vertices(&self) -> [VertexLabel; 3] {
        match self {
            FacetLabel::SumUpper => [
                VertexLabel::A(Axis::X),
                VertexLabel::A(Axis::Y),
                VertexLabel::A(Axis::Z),
            ],
            FacetLabel::SumLower => [
                VertexLabel::B(Axis::X),
                VertexLabel::B(Axis::Y),
                VertexLabel::B(Axis::Z),
            ],
            FacetLabel::CAxis(m) => {
                let (k, l) = m.others();
                [VertexLabel::A(k), VertexLabel::A(l), VertexLabel::B(*m)]
            }
            FacetLabel::DAxis(m) => {
                let (k, l) = m.others();
                [VertexLabel::A(*m), VertexLabel::B(k), VertexLabel::B(l)]
            }
        }
    }
}

/// Half-space `normal . p + offset >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub label: FacetLabel,
    pub normal: Vec3,
    pub offset: f64,
}

impl Facet {
    pub fn margin(&self, p: &Vec3) -> f64 {
        self.normal[0] * p[0] + self.normal[1] * p[1] + self.normal[2] * p[2] + self.offset
    }
}

/// Vertices and facets of a separable polytope for fixed `n` and mean spin.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeGeometry {
    pub space: PolytopeSpace,
    pub n: usize,
    pub j: Vec3,
    pub vertices: Vec<(VertexLabel, Vec3)>,
    pub facets: Vec<Facet>,
}

fn check_mean_spin(n: usize, j: &Vec3) -> Result<()> {
    if n < 2 {
        return Err(Error::arg("polytopes need at least two qubits"));
    }
    let nf = n as f64;
    let norm = libm::sqrt(j[0] * j[0] + j[1] * j[1] + j[2] * j[2]);
    if norm > nf / 2.0 + 1e-9 {
        return Err(Error::arg(format!(
            "|J| = {norm} exceeds N/2 = {}",
            nf / 2.0
        )));
    }
    Ok(())
}

/// Extreme points and facets in second-moment space.
pub fn vertices_k_space(n: usize, j: Vec3) -> Result<PolytopeGeometry> {
    check_mean_spin(n, &j)?;
    let nf = n as f64;
    let kappa = (nf - 1.0) / nf;
    let sq = [j[0] * j[0], j[1] * j[1], j[2] * j[2]];

    let mut vertices = Vec::with_capacity(6);
    for label in VertexLabel::ALL {
        let point = match label {
            VertexLabel::A(a) => {
                let i = a.index();
                let mut p = [0.0; 3];
                for c in 0..3 {
                    p[c] = if c == i {
                        nf * nf / 4.0 - kappa * (sq[(i + 1) % 3] + sq[(i + 2) % 3])
                    } else {
                        nf / 4.0 + kappa * sq[c]
                    };
                }
                p
            }
            VertexLabel::B(a) => {
                let i = a.index();
                let mut p = [0.0; 3];
                for c in 0..3 {
                    p[c] = if c == i {
                        sq[i] + (sq[(i + 1) % 3] + sq[(i + 2) % 3]) / nf
                    } else {
                        nf / 4.0 + kappa * sq[c]
                    };
                }
                p
            }
        };
        vertices.push((label, point));
    }

    let jj = sq[0] + sq[1] + sq[2];
    let mut facets = Vec::with_capacity(8);
    facets.push(Facet {
        label: FacetLabel::SumUpper,
        normal: [-1.0, -1.0, -1.0],
        offset: nf * (nf + 2.0) / 4.0,
    });
    facets.push(Facet {
        label: FacetLabel::SumLower,
        normal: [1.0, 1.0, 1.0],
        offset: -jj - nf / 2.0,
    });
    for m in Axis::ALL {
        let i = m.index();
        let mut normal = [-1.0; 3];
        normal[i] = nf - 1.0;
        facets.push(Facet {
            label: FacetLabel::CAxis(m),
            normal,
            offset: nf / 2.0 - (nf - 1.0) * sq[i],
        });
    }
    for m in Axis::ALL {
        let i = m.index();
        let mut normal = [nf - 1.0; 3];
        normal[i] = -1.0;
        facets.push(Facet {
            label: FacetLabel::DAxis(m),
            normal,
            offset: -(nf - 1.0) * (jj - sq[i]) - nf * (nf - 2.0) / 4.0,
        });
    }
    Ok(PolytopeGeometry {
        space: PolytopeSpace::KSpace,
        n,
        j,
        vertices,
        facets,
    })
}

/// Extreme points and facets in the space of the eigenvalues of `chi`.
pub fn vertices_eigen_space(n: usize, j: Vec3) -> Result<PolytopeGeometry> {
    check_mean_spin(n, &j)?;
    let nf = n as f64;
    let jj = j[0] * j[0] + j[1] * j[1] + j[2] * j[2];

    let mut vertices = Vec::with_capacity(6);
    for label in VertexLabel::ALL {
        let point = match label {
            VertexLabel::A(a) => {
                let i = a.index();
                let mut p = [nf * nf / 4.0; 3];
                p[i] = nf * nf * nf / 4.0 - (nf - 1.0) * jj;
                p
            }
            VertexLabel::B(a) => {
                let i = a.index();
                let mut p = [nf * nf / 4.0; 3];
                p[i] = jj;
                p
            }
        };
        vertices.push((label, point));
    }

    let mut facets = Vec::with_capacity(8);
    facets.push(Facet {
        label: FacetLabel::SumUpper,
        normal: [-1.0, -1.0, -1.0],
        offset: nf * nf * (nf + 2.0) / 4.0 - (nf - 1.0) * jj,
    });
    facets.push(Facet {
        label: FacetLabel::SumLower,
        normal: [1.0, 1.0, 1.0],
        offset: -nf * nf / 2.0 - jj,
    });
    for m in Axis::ALL {
        let i = m.index();
        let mut normal = [-1.0 / nf; 3];
        normal[i] += 1.0;
        facets.push(Facet {
            label: FacetLabel::CAxis(m),
            normal,
            offset: nf / 2.0 - (nf - 1.0) / nf * jj,
        });
    }
    for m in Axis::ALL {
        let i = m.index();
        let mut normal = [(nf - 1.0) / nf; 3];
        normal[i] -= 1.0;
        facets.push(Facet {
            label: FacetLabel::DAxis(m),
            normal,
            offset: -(nf - 1.0) / nf * jj - nf * (nf - 2.0) / 4.0,
        });
    }
    Ok(PolytopeGeometry {
        space: PolytopeSpace::EigenSpace,
        n,
        j,
        vertices,
        facets,
    })
}

/// Membership verdict for one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// Facet label and margin for every facet, in [`FacetLabel::ALL`] order.
    pub margins: Vec<(FacetLabel, f64)>,
    pub violated: Vec<FacetLabel>,
}

/// Tests a point against all eight facets of the polytope for `(n, j)`.
pub fn membership(point: &Vec3, space: PolytopeSpace, n: usize, j: Vec3) -> Result<Membership> {
    let geom = match space {
        PolytopeSpace::KSpace => vertices_k_space(n, j)?,
        PolytopeSpace::EigenSpace => vertices_eigen_space(n, j)?,
    };
    Ok(geom.membership(point))
}

impl PolytopeGeometry {
    pub fn membership(&self, point: &Vec3) -> Membership {
        let mut margins = Vec::with_capacity(8);
        let mut violated = Vec::new();
        for f in &self.facets {
            let m = f.margin(point);
            if m < -tol::CRITERION {
                violated.push(f.label);
            }
            margins.push((f.label, m));
        }
        Membership {
            inside: violated.is_empty(),
            margins,
            violated,
        }
    }

    pub fn vertex(&self, label: VertexLabel) -> Vec3 {
        self.vertices
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, p)| *p)
            .unwrap()
    }
}

/// Mixing weights and Bloch data of the two coherent components behind the
/// extremal separable states.
struct VertexComponents {
    plus: Vec3,
    minus: Vec3,
    p: f64,
}

fn vertex_components(n: usize, j: Vec3, axis: Axis) -> Result<VertexComponents> {
    check_mean_spin(n, &j)?;
    let nf = n as f64;
    let big_j = nf / 2.0;
    let i = axis.index();
    let (k, l) = ((i + 1) % 3, (i + 2) % 3);
    let transverse = (j[k] * j[k] + j[l] * j[l]) / (big_j * big_j);
    if transverse > 1.0 + 1e-12 {
        return Err(Error::arg(
            "transverse mean spin exceeds N/2: no real Bloch component",
        ));
    }
    let c_axis = libm::sqrt((1.0 - transverse).max(0.0));
    let p = if c_axis <= 1e-12 {
        // Degenerate limit: the mean spin is fully transverse, any split works.
        0.5
    } else {
        0.5 * (1.0 + j[i] / (big_j * c_axis))
    };
    if !(-1e-9..=1.0 + 1e-9).contains(&p) {
        return Err(Error::arg(format!(
            "mean spin incompatible with extremal construction (p = {p})"
        )));
    }
    let mut plus = [0.0; 3];
    let mut minus = [0.0; 3];
    plus[i] = c_axis;
    minus[i] = -c_axis;
    plus[k] = j[k] / big_j;
    minus[k] = j[k] / big_j;
    plus[l] = j[l] / big_j;
    minus[l] = j[l] / big_j;
    Ok(VertexComponents {
        plus,
        minus,
        p: p.clamp(0.0, 1.0),
    })
}

fn aligned_product(n: usize, bloch: Vec3) -> Result<DensityOperator> {
    let b = BlochVector::new(bloch[0], bloch[1], bloch[2])?;
    crate::collective::product_state(&vec![b; n])
}

fn mix(states: &[(f64, DensityOperator)]) -> Result<DensityOperator> {
    let d = states[0].1.dim();
    let dims = states[0].1.local_dims().to_vec();
    let mut acc = CMat::zeros(d, d);
    for (w, s) in states {
        acc.add_assign_scaled(s.mat(), Complex64::new(*w, 0.0));
    }
    Ok(DensityOperator::trusted(ComplexOperator::new(acc, dims)?))
}

/// Separable state sitting exactly at the `A`-type extreme point: a two-term
/// mixture of oppositely tilted coherent product states.
pub fn construct_vertex_state_a(n: usize, j: Vec3, axis: Axis) -> Result<DensityOperator> {
    check_capacity(n)?;
    let comp = vertex_components(n, j, axis)?;
    let plus = aligned_product(n, comp.plus)?;
    let minus = aligned_product(n, comp.minus)?;
    mix(&[(comp.p, plus), (1.0 - comp.p, minus)])
}

/// Separable state at (or near) the `B`-type extreme point.
///
/// When `N p` is an integer the pure product of `M` tilted-up and `N - M`
/// tilted-down factors is exact. Otherwise the returned two-term mixture
/// deviates from the vertex only in the moment along `axis`, by
/// `c^2 eps(1-eps) <= 1/4`.
pub fn construct_vertex_state_b(n: usize, j: Vec3, axis: Axis) -> Result<(DensityOperator, bool)> {
    check_capacity(n)?;
    let comp = vertex_components(n, j, axis)?;
    let m_real = n as f64 * comp.p;
    let m_round = libm::round(m_real);
    let plus_b = BlochVector::new(comp.plus[0], comp.plus[1], comp.plus[2])?;
    let minus_b = BlochVector::new(comp.minus[0], comp.minus[1], comp.minus[2])?;
    let build = |m_up: usize| -> Result<DensityOperator> {
        let mut blochs = Vec::with_capacity(n);
        for _ in 0..m_up {
            blochs.push(plus_b);
        }
        for _ in m_up..n {
            blochs.push(minus_b);
        }
        crate::collective::product_state(&blochs)
    };
    if (m_real - m_round).abs() <= 1e-9 {
        Ok((build(m_round as usize)?, true))
    } else {
        let m_floor = libm::floor(m_real) as usize;
        let eps = m_real - m_floor as f64;
        let lower = build(m_floor)?;
        let upper = build(m_floor + 1)?;
        Ok((mix(&[(1.0 - eps, lower), (eps, upper)])?, false))
    }
}

/// One random separable sample: its second moments and mean spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSample {
    pub k2: Vec3,
    pub j: Vec3,
}

/// Component description of one random separable mixture: weights and per-site
/// Bloch vectors.
fn draw_components(
    rng: &mut SplitMix64,
    n: usize,
    mixing_components: usize,
) -> Vec<(f64, Vec<BlochVector>)> {
    let count = 1 + rng.below(mixing_components.max(1) as u64) as usize;
    // Flat simplex weights from normalised exponentials.
    let mut weights: Vec<f64> = (0..count)
        .map(|_| -libm::log(rng.next_f64().max(1e-300)))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut out = Vec::with_capacity(count);
    for w in weights {
        // Half the components use independent random directions per site; the
        // other half share one axis with a uniformly drawn number of flipped
        // sites, which is what reaches the extremal regions of the moment
        // polytope (fully aligned at one end, balanced anti-aligned at the
        // other).
        let blochs: Vec<BlochVector> = if rng.next_f64() < 0.5 {
            (0..n)
                .map(|_| {
                    let v = rng.unit_vector();
                    BlochVector::new(v[0], v[1], v[2]).unwrap()
                })
                .collect()
        } else {
            let u = rng.unit_vector();
            let flips = rng.below(n as u64 + 1) as usize;
            let mut signs = vec![1.0; n];
            // Random subset of `flips` sites points the other way.
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.below(i as u64 + 1) as usize;
                order.swap(i, j);
            }
            for &site in order.iter().take(flips) {
                signs[site] = -1.0;
            }
            (0..n)
                .map(|i| {
                    BlochVector::new(signs[i] * u[0], signs[i] * u[1], signs[i] * u[2]).unwrap()
                })
                .collect()
        };
        out.push((w, blochs));
    }
    out
}

/// Second-moment points of random separable mixtures of product states,
/// computed in closed form. Deterministic in `(seed, index)`: any sub-range
/// regenerates identically.
///
/// With `zero_j` each sample is twirled, which zeroes the mean spin exactly
/// while preserving all second moments and separability.
pub fn sample_separable(
    n: usize,
    count: usize,
    seed: u64,
    mixing_components: usize,
    zero_j: bool,
) -> Result<Vec<SeparableSample>> {
    if count == 0 {
        return Err(Error::arg("sample count must be at least 1"));
    }
    if n == 0 {
        return Err(Error::arg("samples need at least one qubit"));
    }
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rng = SplitMix64::for_index(seed, idx as u64);
        let comps = draw_components(&mut rng, n, mixing_components);
        let mut j = [0.0; 3];
        let mut k2 = [0.0; 3];
        for (w, blochs) in &comps {
            let m = crate::collective::product_moments(blochs)?;
            let mj = m.j();
            let mk = m.k2();
            for i in 0..3 {
                j[i] += w * mj[i];
                k2[i] += w * mk[i];
            }
        }
        if zero_j {
            j = [0.0; 3];
        }
        out.push(SeparableSample { k2, j });
    }
    Ok(out)
}

/// The same sampling law materialised as density operators (small `n`).
pub fn sample_separable_states(
    n: usize,
    count: usize,
    seed: u64,
    mixing_components: usize,
    zero_j: bool,
) -> Result<Vec<DensityOperator>> {
    if count == 0 {
        return Err(Error::arg("sample count must be at least 1"));
    }
    check_capacity(n)?;
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rng = SplitMix64::for_index(seed, idx as u64);
        let comps = draw_components(&mut rng, n, mixing_components);
        let mut mixture: Vec<(f64, DensityOperator)> = Vec::with_capacity(comps.len());
        for (w, blochs) in comps {
            mixture.push((w, crate::collective::product_state(&blochs)?));
        }
        let state = mix(&mixture)?;
        out.push(if zero_j {
            crate::collective::twirl(&state)?
        } else {
            state
        });
    }
    Ok(out)
}

/// Haar-ish random rotation from Gram-Schmidt on Gaussian vectors.
pub fn random_rotation(rng: &mut SplitMix64) -> Mat3 {
    loop {
        let mut rows = [[0.0f64; 3]; 3];
        for row in rows.iter_mut() {
            for x in row.iter_mut() {
                *x = rng.next_gaussian();
            }
        }
        let mut ok = true;
        for i in 0..3 {
            for prev in 0..i {
                let dot: f64 = (0..3).map(|k| rows[i][k] * rows[prev][k]).sum();
                for k in 0..3 {
                    rows[i][k] -= dot * rows[prev][k];
                }
            }
            let norm = libm::sqrt((0..3).map(|k| rows[i][k] * rows[i][k]).sum::<f64>());
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for k in 0..3 {
                rows[i][k] /= norm;
            }
        }
        if ok {
            return rows;
        }
    }
}
