//! On-disk formats: quantum states, moments, model descriptions, criterion
//! reports and polytope geometry.

use serde::{Deserialize, Serialize};
use spinsq_core::collective::CollectiveMoments;
use spinsq_core::criteria::{CriterionReport, DirectionData, Outcome};
use spinsq_core::linalg::CMat;
use spinsq_core::models::{HamiltonianSpec, ModelKind};
use spinsq_core::op::{ComplexOperator, DensityOperator};
use spinsq_core::polytope::{PolytopeGeometry, PolytopeSpace};
use spinsq_core::{Complex64, Error as CoreError, Result as CoreResult};

use std::collections::BTreeMap;

/// Dense state file: real and imaginary parts, row-major, site 1 slowest.
#[derive(Debug, Serialize, Deserialize)]
pub struct QStateJson {
    pub n_sites: usize,
    pub local_dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl QStateJson {
    pub fn from_state(rho: &DensityOperator) -> QStateJson {
        let d = rho.dim();
        let mut re = vec![vec![0.0; d]; d];
        let mut im = vec![vec![0.0; d]; d];
        for r in 0..d {
            for c in 0..d {
                let z = rho.mat().at(r, c);
                re[r][c] = z.re;
                im[r][c] = z.im;
            }
        }
        QStateJson {
            n_sites: rho.n_sites(),
            local_dims: rho.local_dims().to_vec(),
            re,
            im,
        }
    }

    pub fn into_state(self) -> CoreResult<DensityOperator> {
        if self.local_dims.len() != self.n_sites {
            return Err(CoreError::InvalidArgument(format!(
                "n_sites = {} but {} local dimensions given",
                self.n_sites,
                self.local_dims.len()
            )));
        }
        let qubit_equiv = self
            .local_dims
            .iter()
            .map(|&d| (usize::BITS - d.saturating_sub(1).leading_zeros()) as usize)
            .sum::<usize>();
        if qubit_equiv > spinsq_core::qubit_cap() {
            return Err(CoreError::Capacity {
                qubits: qubit_equiv,
                cap: spinsq_core::qubit_cap(),
            });
        }
        let d: usize = self.local_dims.iter().product();
        if self.re.len() != d || self.im.len() != d {
            return Err(CoreError::InvalidArgument(
                "state matrix has the wrong shape".into(),
            ));
        }
        let mut mat = CMat::zeros(d, d);
        for r in 0..d {
            if self.re[r].len() != d || self.im[r].len() != d {
                return Err(CoreError::InvalidArgument(
                    "state matrix has ragged rows".into(),
                ));
            }
            for c in 0..d {
                *mat.at_mut(r, c) = Complex64::new(self.re[r][c], self.im[r][c]);
            }
        }
        DensityOperator::new(ComplexOperator::new(mat, self.local_dims)?)
    }
}

/// Moments file: mean spin and correlation matrix; covariances are recomputed
/// on load.
#[derive(Debug, Serialize, Deserialize)]
pub struct MomentsJson {
    pub n: usize,
    pub j: [f64; 3],
    pub c: [[f64; 3]; 3],
}

impl MomentsJson {
    pub fn from_moments(m: &CollectiveMoments) -> MomentsJson {
        MomentsJson {
            n: m.n(),
            j: m.j(),
            c: *m.c(),
        }
    }

    pub fn into_moments(self) -> CoreResult<CollectiveMoments> {
        CollectiveMoments::from_measurements(self.n, self.j, self.c)
    }
}

/// Model description: kind, site count and kind-specific parameters.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelJson {
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ModelJson {
    pub fn into_spec(self) -> CoreResult<HamiltonianSpec> {
        let get = |key: &str, default: f64| self.params.get(key).copied().unwrap_or(default);
        let kind = match self.kind.replace('-', "_").as_str() {
            "heisenberg_chain" => ModelKind::HeisenbergChain,
            "xy_chain" => ModelKind::XyChain,
            "heisenberg_complete" | "heisenberg_fc" => ModelKind::HeisenbergComplete,
            "lmg" => ModelKind::Lmg {
                lambda: get("lambda", 1.0),
                gamma: get("gamma", 1.0),
                h: get("h", 0.0),
            },
            "xy_complete" | "xy_fc" => ModelKind::Lmg {
                lambda: -(self.n as f64),
                gamma: 1.0,
                h: 0.0,
            },
            "ising_transverse" | "ising" => ModelKind::IsingTransverse { b: get("b", 1.0) },
            "nanotube" => ModelKind::Nanotube,
            "custom" => ModelKind::Custom {
                quadratic: [get("xx", 0.0), get("yy", 0.0), get("zz", 0.0)],
                linear: [get("x", 0.0), get("y", 0.0), get("z", 0.0)],
            },
            other => {
                return Err(CoreError::InvalidArgument(format!(
                    "unknown model kind '{other}'"
                )))
            }
        };
        HamiltonianSpec::new(kind, self.n)
    }

    pub fn from_spec(spec: &HamiltonianSpec) -> ModelJson {
        let mut params = BTreeMap::new();
        let kind = match spec.kind {
            ModelKind::HeisenbergChain => "heisenberg_chain",
            ModelKind::XyChain => "xy_chain",
            ModelKind::HeisenbergComplete => "heisenberg_complete",
            ModelKind::Lmg { lambda, gamma, h } => {
                params.insert("lambda".into(), lambda);
                params.insert("gamma".into(), gamma);
                params.insert("h".into(), h);
                "lmg"
            }
            ModelKind::IsingTransverse { b } => {
                params.insert("b".into(), b);
                "ising_transverse"
            }
            ModelKind::Nanotube => "nanotube",
            ModelKind::Custom { quadratic, linear } => {
                for (key, v) in ["xx", "yy", "zz"].iter().zip(quadratic) {
                    params.insert((*key).into(), v);
                }
                for (key, v) in ["x", "y", "z"].iter().zip(linear) {
                    params.insert((*key).into(), v);
                }
                "custom"
            }
        };
        ModelJson {
            kind: kind.into(),
            n: spec.n,
            params,
        }
    }
}

/// One criterion entry of a report file.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportEntryJson {
    pub criterion_id: String,
    pub margin: Option<f64>,
    pub violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<ReportAxes>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportAxes {
    Permutation([String; 3]),
    Rotation([[f64; 3]; 3]),
}

/// A report file is the bare list of criterion entries.
pub type ReportJson = Vec<ReportEntryJson>;

pub fn report_entries(reports: &[CriterionReport]) -> Vec<ReportEntryJson> {
    reports
        .iter()
        .map(|r| {
            let (margin, violated) = match r.outcome {
                Outcome::Evaluated { margin, violated } => (Some(margin), violated),
                Outcome::NotApplicable => (None, false),
            };
            let axes = r.direction.as_ref().map(|d| match d {
                DirectionData::Rotation(m) => ReportAxes::Rotation(*m),
                DirectionData::AxisPermutation(p) => ReportAxes::Permutation([
                    p[0].label().to_string(),
                    p[1].label().to_string(),
                    p[2].label().to_string(),
                ]),
            });
            ReportEntryJson {
                criterion_id: r.id.to_string(),
                margin,
                violated,
                axes,
            }
        })
        .collect()
}

/// Polytope geometry file.
#[derive(Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub space: String,
    pub n: usize,
    pub j: [f64; 3],
    pub vertices: BTreeMap<String, [f64; 3]>,
    pub facets: BTreeMap<String, FacetJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FacetJson {
    pub normal: [f64; 3],
    pub offset: f64,
    pub vertices: [String; 3],
}

impl PolytopeJson {
    pub fn from_geometry(geom: &PolytopeGeometry) -> PolytopeJson {
        let space = match geom.space {
            PolytopeSpace::KSpace => "k",
            PolytopeSpace::EigenSpace => "eigen",
        };
        let mut vertices = BTreeMap::new();
        for (label, point) in &geom.vertices {
            vertices.insert(label.name(geom.space), *point);
        }
        let mut facets = BTreeMap::new();
        for f in &geom.facets {
            facets.insert(
                f.label.name(geom.space),
                FacetJson {
                    normal: f.normal,
                    offset: f.offset,
                    vertices: f.label.vertices().map(|v| v.name(geom.space)),
                },
            );
        }
        PolytopeJson {
            space: space.into(),
            n: geom.n,
            j: geom.j,
            vertices,
            facets,
        }
    }
}

/// Wavefront OBJ mesh of the polytope hull: six vertices and the eight
/// triangular facets.
pub fn polytope_obj(geom: &PolytopeGeometry) -> String {
    let mut out = String::new();
    let mut index = BTreeMap::new();
    for (k, (label, point)) in geom.vertices.iter().enumerate() {
        index.insert(label.name(geom.space), k + 1);
        out.push_str(&format!(
            "v {} {} {}\n",
            fmt_f64(point[0]),
            fmt_f64(point[1]),
            fmt_f64(point[2])
        ));
    }
    for f in &geom.facets {
        let ids: Vec<String> = f
            .label
            .vertices()
            .iter()
            .map(|v| index[&v.name(geom.space)].to_string())
            .collect();
        out.push_str(&format!("f {} {} {}\n", ids[0], ids[1], ids[2]));
    }
    out
}

/// Round-trippable float formatting: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Short human-facing float: 4 significant digits.
pub fn fmt_short(x: f64) -> String {
    format!("{x:.4}")
}
