//! Truncated Dirac operators with involution lifts on flat model geometries.
//!
//! Two models are provided: the circle with `τ(θ) = -θ` and the flat 3-torus
//! with one coordinate reflected. Spinors are expanded in plane waves under a
//! momentum cutoff `|k_j| <= K`; the reflection maps the box to itself, so the
//! lift axioms hold exactly on the truncated basis and are checked at
//! construction.

pub mod basis;
pub mod heat;
pub mod mehler;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lefschetz::{FixedComponentSpec, Locus};
use basis::{Mode, ModeBasis, SparseMatrix};

pub use heat::{
    heat_curve, heat_supertrace, integrate_density, local_density, log_spaced_grid, outside_mass,
    HeatCurve, HeatTrace,
};
pub use mehler::{hermite_heat_kernel, hermite_heat_oracle, mehler_density, mehler_density_curvature};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("cutoff must be at least 1")]
    CutoffTooSmall,
    #[error("model `{model}` needs {expected} spin-structure flags, got {got}")]
    SpinStructureArity {
        model: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("reflection axis {0} out of range")]
    ReflectionAxis(usize),
    #[error("no valid lift: axiom `{axiom}` fails ({detail})")]
    LiftAxiom { axiom: &'static str, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinStructure {
    Periodic,
    Antiperiodic,
}

/// Extra scalar applied on top of the `(sqrt(-1))^{m1+1}` normalization of
/// the Pin lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftPhase {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl LiftPhase {
    pub fn value(self) -> Complex64 {
        match self {
            LiftPhase::Plus => Complex64::new(1.0, 0.0),
            LiftPhase::Minus => Complex64::new(-1.0, 0.0),
            LiftPhase::PlusI => Complex64::new(0.0, 1.0),
            LiftPhase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Circle,
    Torus3,
}

/// JSON description of a model geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryStanza {
    pub model: ModelKind,
    pub cutoff: u32,
    pub spin_structure: Vec<SpinStructure>,
    pub lift_sign: LiftPhase,
    /// Reflected coordinate of the 3-torus (default 2, i.e. `z -> -z`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflection_axis: Option<usize>,
}

impl GeometryStanza {
    pub fn circle(spin: SpinStructure, lift_sign: LiftPhase, cutoff: u32) -> Self {
        GeometryStanza {
            model: ModelKind::Circle,
            cutoff,
            spin_structure: vec![spin],
            lift_sign,
            reflection_axis: None,
        }
    }

    pub fn torus3(
        reflection_axis: usize,
        spin: [SpinStructure; 3],
        lift_sign: LiftPhase,
        cutoff: u32,
    ) -> Self {
        GeometryStanza {
            model: ModelKind::Torus3,
            cutoff,
            spin_structure: spin.to_vec(),
            lift_sign,
            reflection_axis: Some(reflection_axis),
        }
    }

    pub fn build(&self) -> Result<ModelGeometry, GeometryError> {
        ModelGeometry::build(self)
    }
}

type SpinMatrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Clifford generators `c(e_j)` with `c(e_j)^2 = -1`.
fn clifford(model: ModelKind) -> Vec<SpinMatrix> {
    match model {
        ModelKind::Circle => vec![vec![vec![c(0.0, -1.0)]]],
        ModelKind::Torus3 => {
            // -i times the Pauli matrices
            let z = c(0.0, 0.0);
            vec![
                vec![vec![z, c(0.0, -1.0)], vec![c(0.0, -1.0), z]],
                vec![vec![z, c(-1.0, 0.0)], vec![c(1.0, 0.0), z]],
                vec![vec![c(0.0, -1.0), z], vec![z, c(0.0, 1.0)]],
            ]
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelGeometry {
    stanza: GeometryStanza,
    basis: ModeBasis,
    dirac: SparseMatrix,
    tau_lift: SparseMatrix,
    tau0_square: Complex64,
    reflection_axis: usize,
    fixed_components: Vec<FixedComponentSpec>,
    d_squared: Vec<f64>,
}

impl ModelGeometry {
    pub fn build(stanza: &GeometryStanza) -> Result<Self, GeometryError> {
        if stanza.cutoff < 1 {
            return Err(GeometryError::CutoffTooSmall);
        }
        let (name, axes, spin_rank) = match stanza.model {
            ModelKind::Circle => ("circle", 1, 1),
            ModelKind::Torus3 => ("torus3", 3, 2),
        };
        if stanza.spin_structure.len() != axes {
            return Err(GeometryError::SpinStructureArity {
                model: name,
                expected: axes,
                got: stanza.spin_structure.len(),
            });
        }
        let reflection_axis = match stanza.model {
            ModelKind::Circle => 0,
            ModelKind::Torus3 => stanza.reflection_axis.unwrap_or(2),
        };
        if reflection_axis >= axes {
            return Err(GeometryError::ReflectionAxis(reflection_axis));
        }
        let anti: Vec<bool> = stanza
            .spin_structure
            .iter()
            .map(|s| *s == SpinStructure::Antiperiodic)
            .collect();
        let basis = ModeBasis::new(&anti, spin_rank, stanza.cutoff);
        let cliff = clifford(stanza.model);
        let n = basis.len();

        // D e_{k,s} = sum_j k_j (i c_j) e_{k,s'}
        let mut dirac = SparseMatrix::zeros(n);
        for (col, mode) in basis.modes().iter().enumerate() {
            for s_out in 0..spin_rank {
                let mut v = Complex64::default();
                for (j, cj) in cliff.iter().enumerate() {
                    v += Complex64::i() * cj[s_out][mode.spin as usize] * mode.k(j);
                }
                let row = basis
                    .index_of(&Mode {
                        momentum: mode.momentum,
                        spin: s_out as u8,
                    })
                    .expect("same momentum");
                dirac.push(row, col, v);
            }
        }

        // Pin lift of the reflection: c(e_a) composed with the pullback by τ.
        let ca = &cliff[reflection_axis];
        let mut tau0 = SparseMatrix::zeros(n);
        for (col, mode) in basis.modes().iter().enumerate() {
            let mut reflected = mode.momentum;
            reflected[reflection_axis] = -reflected[reflection_axis];
            for s_out in 0..spin_rank {
                let row = basis
                    .index_of(&Mode {
                        momentum: reflected,
                        spin: s_out as u8,
                    })
                    .expect("box is reflection invariant");
                tau0.push(row, col, ca[s_out][mode.spin as usize]);
            }
        }

        let fixed_components = fixed_components(stanza, reflection_axis, &anti);
        let m1 = crate::lefschetz::m1(&fixed_components);
        let normalization = Complex64::i().powu(m1 + 1) * stanza.lift_phase_value();
        let tau_lift = tau0.scale(normalization);

        let tau0_sq = tau0.mul(&tau0);
        let tau0_square = tau0_sq.get(0, 0);
        let d_squared = basis.modes().iter().map(Mode::k_squared).collect();

        let geom = ModelGeometry {
            stanza: stanza.clone(),
            basis,
            dirac,
            tau_lift,
            tau0_square,
            reflection_axis,
            fixed_components,
            d_squared,
        };
        geom.check_axioms()?;
        if tau0_sq != SparseMatrix::identity(n).scale(tau0_square) {
            return Err(GeometryError::LiftAxiom {
                axiom: "tau0^2 is scalar",
                detail: "square of the Pin lift is not a multiple of the identity".into(),
            });
        }
        Ok(geom)
    }

    /// Re-asserts the lift axioms as exact matrix identities.
    pub fn check_axioms(&self) -> Result<(), GeometryError> {
        let n = self.basis.len();
        let id = SparseMatrix::identity(n);
        let t = &self.tau_lift;
        let d = &self.dirac;
        if d.adjoint() != *d {
            return Err(GeometryError::LiftAxiom {
                axiom: "D self-adjoint",
                detail: "D differs from its adjoint".into(),
            });
        }
        let sq = t.mul(t);
        if sq != id {
            return Err(GeometryError::LiftAxiom {
                axiom: "tau^2 = 1",
                detail: format!("tau^2 = {} * 1", sq.get(0, 0)),
            });
        }
        if t.adjoint() != *t {
            return Err(GeometryError::LiftAxiom {
                axiom: "tau self-adjoint",
                detail: "tau differs from its adjoint".into(),
            });
        }
        if t.adjoint().mul(t) != id {
            return Err(GeometryError::LiftAxiom {
                axiom: "tau unitary",
                detail: "tau^* tau != 1".into(),
            });
        }
        let anti = t.mul(d).add(&d.mul(t));
        if !anti.is_zero() {
            return Err(GeometryError::LiftAxiom {
                axiom: "tau D = -D tau",
                detail: format!("largest entry of tau D + D tau is {}", anti.max_abs()),
            });
        }
        Ok(())
    }

    /// Same geometry at a different cutoff.
    pub fn with_cutoff(&self, cutoff: u32) -> Result<Self, GeometryError> {
        let mut stanza = self.stanza.clone();
        stanza.cutoff = cutoff;
        Self::build(&stanza)
    }

    pub fn stanza(&self) -> &GeometryStanza {
        &self.stanza
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn dirac(&self) -> &SparseMatrix {
        &self.dirac
    }

    pub fn tau_lift(&self) -> &SparseMatrix {
        &self.tau_lift
    }

    /// Eigenvalue of `D^2` on each basis vector (the plane-wave basis
    /// diagonalizes `D^2` on a flat torus).
    pub fn d_squared(&self) -> &[f64] {
        &self.d_squared
    }

    pub fn cutoff(&self) -> u32 {
        self.stanza.cutoff
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.axes()
    }

    pub fn reflection_axis(&self) -> usize {
        self.reflection_axis
    }

    /// Scalar value of the square of the un-normalized Pin lift.
    pub fn tau0_square(&self) -> Complex64 {
        self.tau0_square
    }

    pub fn fixed_components(&self) -> &[FixedComponentSpec] {
        &self.fixed_components
    }

    /// Image of a frequency vector under the involution.
    pub fn reflect_frequency(&self, q: &[i32]) -> Vec<i32> {
        let mut r = q.to_vec();
        r[self.reflection_axis] = -r[self.reflection_axis];
        r
    }
}

impl GeometryStanza {
    fn lift_phase_value(&self) -> Complex64 {
        self.lift_sign.value()
    }
}

/// Fixed hyperplanes `x_a = 0` and `x_a = π`. Along an antiperiodic axis the
/// pullback picks up a sign crossing the identification, so the component at
/// `π` carries the opposite local lift sign. Tangent axes are listed in cyclic
/// order after the reflected one, which is the orientation in which the
/// chirality `c(e_a)` restricted to the fixed torus is positive.
fn fixed_components(
    stanza: &GeometryStanza,
    axis: usize,
    antiperiodic: &[bool],
) -> Vec<FixedComponentSpec> {
    let axes = antiperiodic.len();
    let sign = match stanza.lift_sign {
        LiftPhase::Minus => -1,
        _ => 1,
    };
    let far_sign = if antiperiodic[axis] { -sign } else { sign };
    let tangent: Vec<usize> = (1..axes).map(|j| (axis + j) % axes).collect();
    let dim = tangent.len() as u32;
    [(0.0, sign, "F(x=0)"), (std::f64::consts::PI, far_sign, "F(x=pi)")]
        .into_iter()
        .map(|(offset, orientation, label)| {
            let name = label.replace('x', ["x", "y", "z"][axis]);
            let locus = Locus {
                normal_axis: axis,
                offset,
                tangent_axes: tangent.clone(),
            };
            FixedComponentSpec::flat(name, dim, 1, orientation).with_locus(locus)
        })
        .collect()
}
