//! Cell voltage: equilibrium potential, cathode activation overpotential,
//! internal currents, ohmic drops and optional concentration loss.

use serde::{Deserialize, Serialize};

use crate::cell::CellDefinition;
use crate::error::{Error, Result};
use crate::properties::constants::{self as k, FARADAY, GAS_CONSTANT};
use crate::properties::{self, PropertyConfig};

/// Exchange current density law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OverpotentialMode {
    /// Reaction-order law only.
    #[default]
    Tafel,
    /// Reaction-order law with the optional multiplicative corrections.
    Extended,
}

/// Options of the voltage model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OverpotentialConfig {
    /// Exchange current density law.
    pub mode: OverpotentialMode,
    /// Extended law: multiply by the proton activity factor.
    pub use_a_plus: bool,
    /// Extended law: multiply by the open pore fraction of the CCL.
    pub use_flooding_factor: bool,
    /// Extended law: multiply by the roughness factor.
    pub use_roughness: bool,
    /// Extended law: multiply by the Arrhenius temperature factor.
    pub use_temperature_activation: bool,
    /// Subtract the limiting-current concentration loss.
    pub concentration_loss_enabled: bool,
    /// Account for gas crossover in the internal current and in the sources.
    pub crossover_enabled: bool,
    /// Account for the electronic short circuit through the membrane.
    pub short_circuit_enabled: bool,
}

impl Default for OverpotentialConfig {
    fn default() -> Self {
        Self {
            mode: OverpotentialMode::Tafel,
            use_a_plus: true,
            use_flooding_factor: true,
            use_roughness: true,
            use_temperature_activation: true,
            concentration_loss_enabled: false,
            crossover_enabled: true,
            short_circuit_enabled: true,
        }
    }
}

/// Quantities of the electrode state that the voltage depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectrodeState {
    /// Mean hydrogen concentration of the ACL, mol·m⁻³.
    pub c_h2_acl: f64,
    /// Mean oxygen concentration of the CCL, mol·m⁻³.
    pub c_o2_ccl: f64,
    /// Mean water content of the CCL ionomer.
    pub lambda_ccl: f64,
    /// Mean liquid saturation of the CCL.
    pub s_ccl: f64,
    /// Anode channel pressure, Pa.
    pub p_agc: f64,
    /// Cathode channel pressure, Pa.
    pub p_cgc: f64,
    /// Proton resistance of the membrane and CCL, Ω·m².
    pub r_p: f64,
    /// Hydrogen permeability of the membrane, mol·m⁻¹·s⁻¹·Pa⁻¹.
    pub k_h2: f64,
    /// Oxygen permeability of the membrane, mol·m⁻¹·s⁻¹·Pa⁻¹.
    pub k_o2: f64,
}

/// Internal current densities, A·m⁻².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InternalCurrents {
    /// Total internal current density.
    pub i_n: f64,
    /// Electronic short-circuit current density.
    pub i_sc: f64,
    /// Hydrogen crossover current density.
    pub i_co_h2: f64,
    /// Oxygen crossover current density.
    pub i_co_o2: f64,
}

/// Breakdown of the cell voltage at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct VoltageReport {
    /// Equilibrium potential, V.
    pub u_eq: f64,
    /// Cathode activation overpotential, V.
    pub eta_c: f64,
    /// Protonic ohmic drop, V.
    pub dv_ohmic_p: f64,
    /// Electronic ohmic drop, V.
    pub dv_ohmic_e: f64,
    /// Concentration loss, V.
    pub dv_conc: f64,
    /// Cell voltage, V.
    pub u_cell: f64,
    /// Total internal current density, A·m⁻².
    pub i_n: f64,
    /// Short-circuit current density, A·m⁻².
    pub i_sc: f64,
    /// Hydrogen crossover current density, A·m⁻².
    pub i_co_h2: f64,
    /// Oxygen crossover current density, A·m⁻².
    pub i_co_o2: f64,
    /// Proton resistance, Ω·m².
    pub r_p: f64,
}

/// Equilibrium potential of the cell, V.
pub fn equilibrium_potential(c_h2_acl: f64, c_o2_ccl: f64, t: f64, cell: &CellDefinition) -> Result<f64> {
    if !(c_h2_acl > 0.0 && c_o2_ccl > 0.0) {
        return Err(Error::Infeasible(format!(
            "catalyst layer starved (C_H2 = {c_h2_acl:.3e}, C_O2 = {c_o2_ccl:.3e} mol/m3)"
        )));
    }
    let e = &cell.electro;
    let rt = GAS_CONSTANT * t;
    Ok(e.e0 - k::U_EQ_T_SLOPE * (t - k::U_EQ_TREF)
        + rt / (2.0 * FARADAY)
            * ((rt * c_h2_acl / e.p_ref).ln() + 0.5 * (rt * c_o2_ccl / e.p_ref).ln()))
}

/// Proton activity in the ionomer at water content `lambda`.
pub fn proton_activity(lambda: f64, t: f64, cell: &CellDefinition) -> f64 {
    let e = &cell.electro;
    let k_e = e.k_e0 * (-e.dh0 / GAS_CONSTANT * (1.0 / t - 1.0 / k::KE_TREF)).exp();
    let q = 1.0 - 1.0 / k_e;
    let b = lambda + 1.0;
    let disc = (b * b - 4.0 * lambda * q).max(0.0);
    2.0 * lambda / (b + disc.sqrt())
}

/// Exchange current density of the cathode, A·m⁻².
pub fn exchange_current(es: &ElectrodeState, t: f64, cell: &CellDefinition) -> f64 {
    let e = &cell.electro;
    let v = &cell.voltage;
    let conc = (es.c_o2_ccl.max(0.0) / e.c_o2_ref).powf(e.kappa_c);
    match v.mode {
        OverpotentialMode::Tafel => e.i0_c_ref * conc,
        OverpotentialMode::Extended => {
            let mut i0 = e.i0_353_ref * conc;
            if v.use_a_plus {
                i0 *= proton_activity(es.lambda_ccl.max(0.0), t, cell).powf(1.0 - 2.0 * e.alpha_c);
            }
            if v.use_flooding_factor {
                i0 *= (1.0 - es.s_ccl.clamp(0.0, 1.0)).powf(k::FLOODING_EXP);
            }
            if v.use_roughness {
                i0 *= e.r_f_electrode;
            }
            if v.use_temperature_activation {
                i0 *= (e.e_act / GAS_CONSTANT * (1.0 / k::I0_TREF - 1.0 / t)).exp();
            }
            i0
        }
    }
}

/// Cathode activation overpotential, V.
pub fn overpotential(i_fc: f64, i_n: f64, es: &ElectrodeState, t: f64, cell: &CellDefinition) -> Result<f64> {
    let total = i_fc + i_n;
    if !(total > 0.0) {
        return Err(Error::domain(
            "overpotential",
            format!("i_fc + i_n = {total} must be positive"),
        ));
    }
    let i0 = exchange_current(es, t, cell);
    if !(i0 > 0.0) {
        return Err(Error::Infeasible(
            "exchange current density vanished".to_string(),
        ));
    }
    Ok(GAS_CONSTANT * t / (cell.electro.alpha_c * FARADAY) * (total / i0).ln())
}

/// Short-circuit resistance of the membrane, Ω·m².
pub fn short_circuit_resistance(p_agc: f64, p_cgc: f64) -> f64 {
    k::R_SC_PREFACTOR
        * (p_agc / k::P_ATM).powf(k::R_SC_ANODE_EXP)
        * (p_cgc / k::P_ATM).powf(k::R_SC_CATHODE_EXP)
}

/// Crossover current densities `(i_co_H2, i_co_O2)`, A·m⁻².
pub fn crossover_currents(es: &ElectrodeState, t: f64, cell: &CellDefinition) -> (f64, f64) {
    if !cell.voltage.crossover_enabled {
        return (0.0, 0.0);
    }
    let rt = GAS_CONSTANT * t;
    let h = cell.geometry.h_mem;
    (
        2.0 * FARADAY * es.k_h2 * rt * es.c_h2_acl.max(0.0) / h,
        4.0 * FARADAY * es.k_o2 * rt * es.c_o2_ccl.max(0.0) / h,
    )
}

/// Internal current densities at cell voltage `u_cell`.
pub fn internal_current(es: &ElectrodeState, u_cell: f64, t: f64, cell: &CellDefinition) -> InternalCurrents {
    let (i_co_h2, i_co_o2) = crossover_currents(es, t, cell);
    let i_sc = if cell.voltage.short_circuit_enabled {
        u_cell / short_circuit_resistance(es.p_agc, es.p_cgc)
    } else {
        0.0
    };
    InternalCurrents {
        i_n: i_co_h2 + i_co_o2 + i_sc,
        i_sc,
        i_co_h2,
        i_co_o2,
    }
}

/// Proton resistance of the membrane plus the weighted CCL contribution, Ω·m².
///
/// `mem` and `ccl` hold `(λ, Δx)` pairs of the respective cells.
pub fn proton_resistance(
    mem: &[(f64, f64)],
    ccl: &[(f64, f64)],
    ionomer_fraction_over_tau: f64,
    t: f64,
    cfg: &PropertyConfig,
) -> Result<f64> {
    let mut r_mem = 0.0;
    for &(lambda, dx) in mem {
        let sigma = properties::proton_conductivity(lambda, t, cfg);
        if !(sigma > 0.0) {
            return Err(Error::State(format!(
                "proton conductivity vanished at lambda = {lambda}"
            )));
        }
        r_mem += dx / sigma;
    }
    let mut r_ccl = 0.0;
    for &(lambda, dx) in ccl {
        let sigma = properties::proton_conductivity(lambda, t, cfg);
        if !(sigma > 0.0) {
            return Err(Error::State(format!(
                "proton conductivity vanished at lambda = {lambda}"
            )));
        }
        r_ccl += dx / (ionomer_fraction_over_tau * sigma);
    }
    Ok(r_mem + k::R_P_CCL_WEIGHT * r_ccl)
}

/// Concentration loss at current density `i_fc`, V.
pub fn concentration_loss(i_fc: f64, t: f64, i_lim: f64) -> Result<f64> {
    if i_fc >= i_lim {
        return Err(Error::Infeasible(format!(
            "current density {i_fc} A/m2 reaches the limiting current {i_lim} A/m2"
        )));
    }
    Ok(GAS_CONSTANT * t / (2.0 * FARADAY) * (i_lim / (i_lim - i_fc)).ln())
}

const VOLTAGE_TOL: f64 = 1e-13;
const VOLTAGE_PROBE: f64 = 1e-7;
const VOLTAGE_MAX_ITER: usize = 50;

/// Cell voltage at current density `i_fc`, solving the voltage and
/// short-circuit current together by Newton iteration on the voltage
/// fixed point `U = g(U)`.
pub fn cell_voltage(es: &ElectrodeState, i_fc: f64, t: f64, cell: &CellDefinition) -> Result<VoltageReport> {
    if !(i_fc >= 0.0) {
        return Err(Error::domain("cell_voltage", format!("i_fc = {i_fc} < 0")));
    }
    let u_eq = equilibrium_potential(es.c_h2_acl, es.c_o2_ccl, t, cell)?;
    let dv_conc = match (cell.voltage.concentration_loss_enabled, cell.electro.i_lim) {
        (true, Some(il)) => concentration_loss(i_fc, t, il)?,
        _ => 0.0,
    };
    let dv_p = i_fc * es.r_p;
    let dv_e = i_fc * cell.electro.r_e;
    let evaluate = |u: f64| -> Result<(f64, f64, InternalCurrents)> {
        let ic = internal_current(es, u, t, cell);
        let i_n_ln = ic.i_n.max(k::I_N_FLOOR - i_fc).max(0.0);
        let eta = overpotential(i_fc, i_n_ln, es, t, cell)?;
        Ok((u_eq - eta - dv_p - dv_e - dv_conc, eta, ic))
    };
    let mut u = u_eq;
    for _ in 0..VOLTAGE_MAX_ITER {
        let (g, _, _) = evaluate(u)?;
        let (g_probe, _, _) = evaluate(u + VOLTAGE_PROBE)?;
        let slope = (g_probe - g) / VOLTAGE_PROBE - 1.0;
        let step = -(g - u) / slope.min(-0.5);
        u += step;
        if step.abs() < VOLTAGE_TOL {
            let (_, eta_c, ic) = evaluate(u)?;
            return Ok(VoltageReport {
                u_eq,
                eta_c,
                dv_ohmic_p: dv_p,
                dv_ohmic_e: dv_e,
                dv_conc,
                u_cell: u,
                i_n: ic.i_n,
                i_sc: ic.i_sc,
                i_co_h2: ic.i_co_h2,
                i_co_o2: ic.i_co_o2,
                r_p: es.r_p,
            });
        }
    }
    let (g, _, _) = evaluate(u)?;
    Err(Error::Numerical(format!(
        "cell voltage fixed point did not converge (residual {:.3e} V)",
        (g - u).abs()
    )))
}
