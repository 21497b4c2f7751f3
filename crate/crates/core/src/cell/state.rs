//! Prognostic state and its flat index map.

use serde::{Deserialize, Serialize};

use super::{CellDefinition, Mesh1D, Region};
use crate::error::{Error, Result};
use crate::properties::{self, constants::GAS_CONSTANT};

/// Kind of unknown stored at a flat index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    /// Ionomer water content.
    Lambda,
    /// Liquid saturation.
    Saturation,
    /// Water vapour concentration.
    Vapour,
    /// Hydrogen concentration.
    Hydrogen,
    /// Oxygen concentration.
    Oxygen,
    /// Nitrogen concentration.
    Nitrogen,
}

impl Field {
    /// Column prefix used in outputs.
    pub fn label(self) -> &'static str {
        match self {
            Field::Lambda => "lambda",
            Field::Saturation => "s",
            Field::Vapour => "C_v",
            Field::Hydrogen => "C_H2",
            Field::Oxygen => "C_O2",
            Field::Nitrogen => "C_N2",
        }
    }
}

/// Index map between structured fields and the flat unknown vector.
///
/// Block order: λ (ACL, MEM, CCL), s (anode electrode, cathode electrode),
/// C_v (anode electrode, cathode electrode, AGC, CGC), C_H2 (anode electrode,
/// AGC), C_O2 (cathode electrode, CGC), C_N2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateLayout {
    /// Cells in the anode electrode (AGDL then ACL).
    pub n_anode: usize,
    /// Cells in the cathode electrode (CCL then CGDL).
    pub n_cathode: usize,
    /// Cells carrying ionomer water (ACL, MEM, CCL).
    pub n_ion: usize,
    /// First interior cell of the ACL.
    pub acl_start: usize,
    /// First interior cell of the CCL.
    pub ccl_start: usize,
    /// Offset of the λ block.
    pub lambda_off: usize,
    /// Offset of the s block.
    pub s_off: usize,
    /// Offset of the C_v block.
    pub cv_off: usize,
    /// Offset of the C_H2 block.
    pub h2_off: usize,
    /// Offset of the C_O2 block.
    pub o2_off: usize,
    /// Index of C_N2.
    pub n2: usize,
    /// Total number of unknowns.
    pub len: usize,
    regions: Vec<Region>,
}

impl StateLayout {
    /// Builds the index map of `mesh`.
    pub fn new(mesh: &Mesh1D) -> Self {
        let acl = mesh.range(Region::Acl);
        let ccl = mesh.range(Region::Ccl);
        let n_anode = acl.end;
        let n_cathode = mesh.n_cells() - ccl.start;
        let n_ion = ccl.end - acl.start;
        let lambda_off = 0;
        let s_off = lambda_off + n_ion;
        let cv_off = s_off + n_anode + n_cathode;
        let h2_off = cv_off + n_anode + n_cathode + 2;
        let o2_off = h2_off + n_anode + 1;
        let n2 = o2_off + n_cathode + 1;
        Self {
            n_anode,
            n_cathode,
            n_ion,
            acl_start: acl.start,
            ccl_start: ccl.start,
            lambda_off,
            s_off,
            cv_off,
            h2_off,
            o2_off,
            n2,
            len: n2 + 1,
            regions: mesh.regions.clone(),
        }
    }

    /// λ index of interior cell `c` (must lie in ACL, MEM or CCL).
    pub fn lambda(&self, c: usize) -> usize {
        self.lambda_off + c - self.acl_start
    }

    /// Interior cell of anode electrode position `j`.
    pub fn anode_cell(&self, j: usize) -> usize {
        j
    }

    /// Interior cell of cathode electrode position `j`.
    pub fn cathode_cell(&self, j: usize) -> usize {
        self.ccl_start + j
    }

    /// s index of anode electrode position `j`.
    pub fn s_anode(&self, j: usize) -> usize {
        self.s_off + j
    }

    /// s index of cathode electrode position `j`.
    pub fn s_cathode(&self, j: usize) -> usize {
        self.s_off + self.n_anode + j
    }

    /// C_v index of anode electrode position `j`.
    pub fn cv_anode(&self, j: usize) -> usize {
        self.cv_off + j
    }

    /// C_v index of cathode electrode position `j`.
    pub fn cv_cathode(&self, j: usize) -> usize {
        self.cv_off + self.n_anode + j
    }

    /// C_v index of the anode channel.
    pub fn cv_agc(&self) -> usize {
        self.cv_off + self.n_anode + self.n_cathode
    }

    /// C_v index of the cathode channel.
    pub fn cv_cgc(&self) -> usize {
        self.cv_agc() + 1
    }

    /// C_H2 index of anode electrode position `j`.
    pub fn h2(&self, j: usize) -> usize {
        self.h2_off + j
    }

    /// C_H2 index of the anode channel.
    pub fn h2_agc(&self) -> usize {
        self.h2_off + self.n_anode
    }

    /// C_O2 index of cathode electrode position `j`.
    pub fn o2(&self, j: usize) -> usize {
        self.o2_off + j
    }

    /// C_O2 index of the cathode channel.
    pub fn o2_cgc(&self) -> usize {
        self.o2_off + self.n_cathode
    }

    /// Field stored at flat index `idx`.
    pub fn field(&self, idx: usize) -> Field {
        if idx < self.s_off {
            Field::Lambda
        } else if idx < self.cv_off {
            Field::Saturation
        } else if idx < self.h2_off {
            Field::Vapour
        } else if idx < self.o2_off {
            Field::Hydrogen
        } else if idx < self.n2 {
            Field::Oxygen
        } else {
            Field::Nitrogen
        }
    }

    /// Human-readable name of flat index `idx`, as `field:region:k`.
    pub fn label(&self, idx: usize) -> String {
        let field = self.field(idx);
        let cell_label = |c: usize| {
            let r = self.regions[c];
            let first = self.regions.iter().position(|&x| x == r).unwrap_or(0);
            format!("{}:{}", r.label(), c - first)
        };
        let electrode = |j: usize| {
            if j < self.n_anode {
                cell_label(self.anode_cell(j))
            } else {
                cell_label(self.cathode_cell(j - self.n_anode))
            }
        };
        let place = match field {
            Field::Lambda => cell_label(idx - self.lambda_off + self.acl_start),
            Field::Saturation => electrode(idx - self.s_off),
            Field::Vapour => {
                let j = idx - self.cv_off;
                match j.cmp(&(self.n_anode + self.n_cathode)) {
                    std::cmp::Ordering::Less => electrode(j),
                    std::cmp::Ordering::Equal => "agc:0".to_string(),
                    std::cmp::Ordering::Greater => "cgc:0".to_string(),
                }
            }
            Field::Hydrogen => {
                let j = idx - self.h2_off;
                if j < self.n_anode {
                    cell_label(self.anode_cell(j))
                } else {
                    "agc:0".to_string()
                }
            }
            Field::Oxygen => {
                let j = idx - self.o2_off;
                if j < self.n_cathode {
                    cell_label(self.cathode_cell(j))
                } else {
                    "cgc:0".to_string()
                }
            }
            Field::Nitrogen => "cathode:0".to_string(),
        };
        format!("{}:{}", field.label(), place)
    }
}

/// Structured prognostic state.
///
/// Electrode arrays list the anode cells (AGDL then ACL) followed by the
/// cathode cells (CCL then CGDL); channel values follow the electrode cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    /// Ionomer water content on ACL, MEM and CCL cells.
    pub lambda: Vec<f64>,
    /// Liquid saturation on electrode cells.
    pub s: Vec<f64>,
    /// Vapour concentration on electrode cells, then AGC and CGC, mol·m⁻³.
    pub c_v: Vec<f64>,
    /// Hydrogen concentration on anode cells, then AGC, mol·m⁻³.
    pub c_h2: Vec<f64>,
    /// Oxygen concentration on cathode cells, then CGC, mol·m⁻³.
    pub c_o2: Vec<f64>,
    /// Nitrogen concentration of the cathode, mol·m⁻³.
    pub c_n2: f64,
}

impl StateVector {
    /// Flattens the state following `layout`.
    pub fn pack(&self, layout: &StateLayout) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(layout.len);
        out.extend_from_slice(&self.lambda);
        out.extend_from_slice(&self.s);
        out.extend_from_slice(&self.c_v);
        out.extend_from_slice(&self.c_h2);
        out.extend_from_slice(&self.c_o2);
        out.push(self.c_n2);
        if out.len() != layout.len {
            return Err(Error::Numerical(format!(
                "state length {} does not match layout length {}",
                out.len(),
                layout.len
            )));
        }
        Ok(out)
    }

    /// Rebuilds a state from a flat vector following `layout`.
    pub fn unpack(x: &[f64], layout: &StateLayout) -> Result<Self> {
        if x.len() != layout.len {
            return Err(Error::Numerical(format!(
                "flat state length {} does not match layout length {}",
                x.len(),
                layout.len
            )));
        }
        Ok(Self {
            lambda: x[layout.lambda_off..layout.s_off].to_vec(),
            s: x[layout.s_off..layout.cv_off].to_vec(),
            c_v: x[layout.cv_off..layout.h2_off].to_vec(),
            c_h2: x[layout.h2_off..layout.o2_off].to_vec(),
            c_o2: x[layout.o2_off..layout.n2].to_vec(),
            c_n2: x[layout.n2],
        })
    }

    /// Checks the physical invariants of the state.
    pub fn check(&self) -> Result<()> {
        let ok = self.lambda.iter().all(|&v| v >= 0.0)
            && self.s.iter().all(|&v| (0.0..=1.0).contains(&v))
            && self.c_v.iter().chain(&self.c_h2).chain(&self.c_o2).all(|&v| v >= 0.0)
            && self.c_n2 >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::State("state outside its admissible set".to_string()))
        }
    }
}

/// Initial condition of a transient or the first guess of a steady solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum InitialCondition {
    /// Dry ionomer (λ = 2) and dry gas at 10 % relative humidity.
    DryStart,
    /// Ionomer, vapour and channels equilibrated at relative humidity `phi`.
    Equilibrated {
        /// Relative humidity in (0, 1].
        phi: f64,
    },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Equilibrated { phi: 0.6 }
    }
}

/// Builds the initial state of `cell` on `mesh`.
pub fn initial_state(cell: &CellDefinition, mesh: &Mesh1D, init: InitialCondition) -> Result<StateVector> {
    let layout = StateLayout::new(mesh);
    let t = cell.operating.t_fc;
    let psat = properties::p_sat(t)?;
    let csat = psat / (GAS_CONSTANT * t);
    let (phi, lambda) = match init {
        InitialCondition::DryStart => (0.1, 2.0),
        InitialCondition::Equilibrated { phi } => {
            if !(phi > 0.0 && phi <= 1.0) {
                return Err(Error::Validation("initial.phi in (0, 1]".to_string()));
            }
            (phi, properties::lambda_eq(phi, t, &cell.properties)?)
        }
    };
    let rt = GAS_CONSTANT * t;
    let op = &cell.operating;
    let c_h2 = (op.p_a_des - phi * psat) / rt;
    let c_o2 = op.y_o2_ext * (op.p_c_des - phi * psat) / rt;
    if !(c_h2 > 0.0 && c_o2 > 0.0) {
        return Err(Error::Validation(
            "initial humidity leaves no dry gas at the set pressures".to_string(),
        ));
    }
    let n_el = layout.n_anode + layout.n_cathode;
    let state = StateVector {
        lambda: vec![lambda; layout.n_ion],
        s: vec![0.0; n_el],
        c_v: vec![phi * csat; n_el + 2],
        c_h2: vec![c_h2; layout.n_anode + 1],
        c_o2: vec![c_o2; layout.n_cathode + 1],
        c_n2: (1.0 - op.y_o2_ext) / op.y_o2_ext * c_o2,
    };
    state.check()?;
    Ok(state)
}
