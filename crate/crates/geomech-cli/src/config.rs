//! JSON run configuration: schema-validated (unknown keys rejected) and
//! mapped onto solver parameters.

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use geomech::beam::{BeamParams, BoundaryKind};
use geomech::lie::AlgebraElement;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum MatrixSpec {
    Diagonal([f64; 6]),
    Full([[f64; 6]; 6]),
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Matrix6<f64> {
        match self {
            MatrixSpec::Diagonal(d) => Matrix6::from_diagonal(&Vector6::from_row_slice(d)),
            MatrixSpec::Full(rows) => {
                let mut m = Matrix6::zeros();
                for (i, row) in rows.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        m[(i, j)] = *v;
                    }
                }
                m
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialField {
    /// All components zero.
    Zero,
    /// The reference strain (only meaningful for `initial_eps`).
    Reference,
    /// Constant profile.
    Uniform { value: [f64; 6] },
    /// Gaussian bump in one component plus a constant offset.
    Gaussian {
        component: usize,
        amplitude: f64,
        center: f64,
        width: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl InitialField {
    pub fn profile(&self, reference: AlgebraElement) -> impl Fn(f64) -> AlgebraElement + '_ {
        move |s: f64| match self {
            InitialField::Zero => AlgebraElement::zero(),
            InitialField::Reference => reference,
            InitialField::Uniform { value } => AlgebraElement::from_slice(value),
            InitialField::Gaussian { component, amplitude, center, width, offset } => {
                let mut c = [0.0; 6];
                c[*component] =
                    amplitude * (-((s - center) / width).powi(2)).exp() + offset;
                AlgebraElement::from_slice(&c)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySpec {
    Free,
    Clamped,
}

impl From<BoundarySpec> for BoundaryKind {
    fn from(spec: BoundarySpec) -> Self {
        match spec {
            BoundarySpec::Free => BoundaryKind::Free,
            BoundarySpec::Clamped => BoundaryKind::Clamped,
        }
    }
}

fn default_cfl_safety() -> f64 {
    0.5
}

fn default_output_every() -> usize {
    10
}

fn default_seed() -> u64 {
    42
}

fn default_true() -> bool {
    true
}

fn default_initial_eps() -> InitialField {
    InitialField::Reference
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub length: f64,
    pub n_s: usize,
    pub dt: f64,
    pub steps: usize,
    pub inertia: MatrixSpec,
    pub hooke: MatrixSpec,
    /// Reference strain `eps0`, angular components first.
    pub reference_strain: [f64; 6],
    /// Boundary condition per end, `[left, right]`.
    pub boundary: [BoundarySpec; 2],
    pub initial_chi: InitialField,
    #[serde(default = "default_initial_eps")]
    pub initial_eps: InitialField,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    /// Record every this many steps (the initial state is always recorded).
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Compute conservation/compatibility diagnostics during the run.
    #[serde(default = "default_true")]
    pub verify_invariants: bool,
}

impl RunConfig {
    pub fn beam_params(&self) -> BeamParams {
        BeamParams {
            length: self.length,
            n_s: self.n_s,
            dt: self.dt,
            inertia: self.inertia.to_matrix(),
            hooke: self.hooke.to_matrix(),
            reference_strain: AlgebraElement::from_slice(&self.reference_strain),
            bc: (self.boundary[0].into(), self.boundary[1].into()),
            cfl_safety: self.cfl_safety,
        }
    }
}
