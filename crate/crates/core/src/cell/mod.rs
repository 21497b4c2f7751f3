//! Cell definition (geometry, materials, operating point, electrochemistry),
//! the one-dimensional mesh across the layer stack and the state vector.

mod mesh;
mod state;

pub use mesh::{build_mesh, Mesh1D, MeshResolution, Region};
pub use state::{initial_state, Field, InitialCondition, StateLayout, StateVector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarization::OverpotentialConfig;
use crate::properties::{Direction, MembraneConstants, PorousConstants, PropertyConfig};

/// Layer thicknesses and channel dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Geometry {
    /// Channel height, m.
    #[serde(rename = "H_gc")]
    pub h_gc: f64,
    /// Channel width, m.
    #[serde(rename = "W_gc")]
    pub w_gc: f64,
    /// Cumulated channel length, m.
    #[serde(rename = "L_gc")]
    pub l_gc: f64,
    /// Diffusion layer thickness, m.
    #[serde(rename = "H_gdl")]
    pub h_gdl: f64,
    /// Catalyst layer thickness, m.
    #[serde(rename = "H_cl")]
    pub h_cl: f64,
    /// Membrane thickness, m.
    #[serde(rename = "H_mem")]
    pub h_mem: f64,
    /// Active area, m².
    #[serde(rename = "A_act")]
    pub a_act: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            h_gc: 5e-4,
            w_gc: 8e-4,
            l_gc: 12.0,
            h_gdl: 2.3e-4,
            h_cl: 1e-5,
            h_mem: 2.5e-5,
            a_act: 2.91e-2,
        }
    }
}

impl Geometry {
    /// Channel cross-section, m².
    pub fn channel_section(&self) -> f64 {
        self.h_gc * self.w_gc
    }

    /// Channel volume per unit active area, m.
    pub fn channel_depth(&self) -> f64 {
        self.h_gc * self.w_gc * self.l_gc / self.a_act
    }
}

/// Porous layer and ionomer constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Materials {
    /// Anode diffusion layer.
    pub agdl: PorousConstants,
    /// Anode catalyst layer.
    pub acl: PorousConstants,
    /// Cathode catalyst layer.
    pub ccl: PorousConstants,
    /// Cathode diffusion layer.
    pub cgdl: PorousConstants,
    /// Ionomer volume fraction of the catalyst layers.
    pub eps_mc: f64,
    /// Ionomer constants.
    pub membrane: MembraneConstants,
}

impl Default for Materials {
    fn default() -> Self {
        let gdl = PorousConstants::diffusion_layer(0.7, 0.3, Direction::ThroughPlane, 110.0);
        let cl = PorousConstants::catalyst_layer(0.3, 95.0);
        Self {
            agdl: gdl,
            acl: cl,
            ccl: cl,
            cgdl: gdl,
            eps_mc: 0.25,
            membrane: MembraneConstants::default(),
        }
    }
}

/// Operating conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Operating {
    /// Cell temperature, K.
    #[serde(rename = "T_fc")]
    pub t_fc: f64,
    /// Anode outlet back-pressure set point, Pa.
    #[serde(rename = "P_a_des")]
    pub p_a_des: f64,
    /// Cathode outlet back-pressure set point, Pa.
    #[serde(rename = "P_c_des")]
    pub p_c_des: f64,
    /// Anode inlet relative humidity.
    #[serde(rename = "Phi_a_des")]
    pub phi_a_des: f64,
    /// Cathode inlet relative humidity.
    #[serde(rename = "Phi_c_des")]
    pub phi_c_des: f64,
    /// Anode stoichiometry.
    #[serde(rename = "S_a")]
    pub s_a: f64,
    /// Cathode stoichiometry.
    #[serde(rename = "S_c")]
    pub s_c: f64,
    /// Oxygen mole fraction of dry inlet air.
    #[serde(rename = "y_O2_ext")]
    pub y_o2_ext: f64,
    /// Outlet manifold flow coefficient, kg·s⁻¹·Pa⁻¹.
    pub k_em_in: f64,
}

impl Default for Operating {
    fn default() -> Self {
        Self {
            t_fc: 353.15,
            p_a_des: 1.05e5,
            p_c_des: 1.2e5,
            phi_a_des: 0.6,
            phi_c_des: 0.6,
            s_a: 2.0,
            s_c: 3.0,
            y_o2_ext: 0.2095,
            k_em_in: 5.0e-6,
        }
    }
}

/// Electrochemical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Electrochemistry {
    /// Standard reversible potential, V.
    #[serde(rename = "E0")]
    pub e0: f64,
    /// Reference pressure of the Nernst activities, Pa.
    #[serde(rename = "P_ref")]
    pub p_ref: f64,
    /// Cathode transfer coefficient.
    pub alpha_c: f64,
    /// Oxygen reaction order of the exchange current density.
    pub kappa_c: f64,
    /// Exchange current density at the reference oxygen concentration, A·m⁻².
    pub i0_c_ref: f64,
    /// Exchange current density at 353.15 K used by the extended law, A·m⁻².
    pub i0_353_ref: f64,
    /// Reference oxygen concentration, mol·m⁻³.
    #[serde(rename = "C_O2_ref")]
    pub c_o2_ref: f64,
    /// Activation energy of the exchange current density, J·mol⁻¹.
    #[serde(rename = "E_act")]
    pub e_act: f64,
    /// Electronic contact resistance, Ω·m².
    #[serde(rename = "R_e")]
    pub r_e: f64,
    /// Limiting current density for the concentration loss, A·m⁻².
    pub i_lim: Option<f64>,
    /// Electrochemically active roughness factor.
    pub r_f_electrode: f64,
    /// Proton activity equilibrium constant at 298 K.
    #[serde(rename = "K_e0")]
    pub k_e0: f64,
    /// Enthalpy of the proton activity equilibrium, J·mol⁻¹.
    #[serde(rename = "dH0")]
    pub dh0: f64,
    /// Condensation rate constant, s⁻¹.
    pub gamma_cond: f64,
    /// Evaporation rate constant, Pa⁻¹·s⁻¹.
    pub gamma_evap: f64,
}

impl Default for Electrochemistry {
    fn default() -> Self {
        Self {
            e0: 1.229,
            p_ref: 1e5,
            alpha_c: 0.5,
            kappa_c: 1.0,
            i0_c_ref: 2.0,
            i0_353_ref: 2.0,
            c_o2_ref: 3.39,
            e_act: 6.568e4,
            r_e: 5e-6,
            i_lim: None,
            r_f_electrode: 1.0,
            k_e0: 6.2,
            dh0: 5.23e4,
            gamma_cond: 5e3,
            gamma_evap: 1e-4,
        }
    }
}

/// Complete description of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellDefinition {
    /// Dimensions.
    pub geometry: Geometry,
    /// Porous layers and ionomer.
    pub materials: Materials,
    /// Operating conditions.
    pub operating: Operating,
    /// Electrochemical parameters.
    pub electro: Electrochemistry,
    /// Correlation variants.
    pub properties: PropertyConfig,
    /// Voltage model options.
    pub voltage: OverpotentialConfig,
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(what.to_string()))
    }
}

impl CellDefinition {
    /// Checks every parameter constraint, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        require(g.h_gc > 0.0, "geometry.H_gc > 0")?;
        require(g.w_gc > 0.0, "geometry.W_gc > 0")?;
        require(g.l_gc > 0.0, "geometry.L_gc > 0")?;
        require(g.h_gdl > 0.0, "geometry.H_gdl > 0")?;
        require(g.h_cl > 0.0, "geometry.H_cl > 0")?;
        require(g.h_mem > 0.0, "geometry.H_mem > 0")?;
        require(g.a_act > 0.0, "geometry.A_act > 0")?;
        let ratio = g.w_gc / g.h_gc;
        require(
            (0.2..=10.0).contains(&ratio),
            "geometry.W_gc / geometry.H_gc in [0.2, 10]",
        )?;

        let m = &self.materials;
        m.agdl.validate("materials.agdl")?;
        m.acl.validate("materials.acl")?;
        m.ccl.validate("materials.ccl")?;
        m.cgdl.validate("materials.cgdl")?;
        require(m.eps_mc > 0.0 && m.eps_mc < 1.0, "materials.eps_mc in (0, 1)")?;
        require(m.membrane.rho_mem > 0.0, "materials.membrane.rho_mem > 0")?;
        require(m.membrane.m_eq > 0.0, "materials.membrane.m_eq > 0")?;

        let o = &self.operating;
        require((273.15..373.0).contains(&o.t_fc), "operating.T_fc in [273.15, 373)")?;
        require(o.p_a_des > 0.0, "operating.P_a_des > 0")?;
        require(o.p_c_des > 0.0, "operating.P_c_des > 0")?;
        require(o.phi_a_des > 0.0 && o.phi_a_des <= 1.0, "operating.Phi_a_des in (0, 1]")?;
        require(o.phi_c_des > 0.0 && o.phi_c_des <= 1.0, "operating.Phi_c_des in (0, 1]")?;
        require(o.s_a >= 1.0, "operating.S_a >= 1")?;
        require(o.s_c >= 1.0, "operating.S_c >= 1")?;
        require(o.y_o2_ext > 0.0 && o.y_o2_ext <= 1.0, "operating.y_O2_ext in (0, 1]")?;
        require(
            (3.5e-6..=8.0e-6).contains(&o.k_em_in),
            "operating.k_em_in in [3.5e-6, 8e-6]",
        )?;
        let psat = crate::properties::p_sat(o.t_fc)?;
        require(
            o.p_a_des > o.phi_a_des * psat,
            "operating.P_a_des > Phi_a_des * p_sat(T_fc)",
        )?;
        require(
            o.p_c_des > o.phi_c_des * psat,
            "operating.P_c_des > Phi_c_des * p_sat(T_fc)",
        )?;

        let e = &self.electro;
        require(e.alpha_c > 0.0 && e.alpha_c <= 1.0, "electro.alpha_c in (0, 1]")?;
        require((0.25..=4.0).contains(&e.kappa_c), "electro.kappa_c in [0.25, 4]")?;
        require(e.i0_c_ref > 0.0, "electro.i0_c_ref > 0")?;
        require(e.i0_353_ref > 0.0, "electro.i0_353_ref > 0")?;
        require(e.c_o2_ref > 0.0, "electro.C_O2_ref > 0")?;
        require(e.p_ref > 0.0, "electro.P_ref > 0")?;
        require(e.r_e >= 0.0, "electro.R_e >= 0")?;
        require(e.r_f_electrode > 0.0, "electro.r_f_electrode > 0")?;
        require(e.k_e0 > 0.0, "electro.K_e0 > 0")?;
        require(e.gamma_cond >= 0.0, "electro.gamma_cond >= 0")?;
        require(e.gamma_evap >= 0.0, "electro.gamma_evap >= 0")?;
        if let Some(il) = e.i_lim {
            require(il > 0.0, "electro.i_lim > 0")?;
        }
        require(
            !self.voltage.concentration_loss_enabled || e.i_lim.is_some(),
            "electro.i_lim set when voltage.concentration_loss_enabled",
        )?;
        require(self.properties.k_shape > 0.0, "properties.k_shape > 0")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        CellDefinition::default().validate().unwrap();
    }

    #[test]
    fn negative_membrane_thickness_is_named() {
        let mut c = CellDefinition::default();
        c.geometry.h_mem = -1.0;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("geometry.H_mem > 0"), "{msg}");
    }
}
