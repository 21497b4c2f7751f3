//! Closed-form physical correlations: water thermodynamics, ionomer water
//! uptake and transport, porous media transport coefficients, gas diffusion
//! and membrane conductivity.
//!
//! Every function here is pure. Numerical coefficients come from
//! [`constants`].

pub mod constants;

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use constants as k;

/// Dissolved water diffusivity law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiffusivityVariant {
    /// Temperature-independent tanh law fitted at 80 °C.
    #[default]
    Kulikovsky,
    /// Piecewise law with Arrhenius temperature dependence.
    Springer,
    /// Two-branch exponential law.
    Motupally,
}

/// Equilibrium water content isotherm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LambdaEqVariant {
    /// Hinatsu-based isotherm with a smooth liquid branch.
    #[default]
    HinatsuBao,
    /// Springer-based isotherm with a smooth liquid branch.
    SpringerBao,
}

/// Proton conductivity law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ConductivityVariant {
    /// Linear-in-λ law with a constant dry plateau.
    #[default]
    Springer,
    /// Cubic-in-λ law with a λ-dependent activation energy.
    Ramousse,
}

/// How liquid water contributes to the water activity seen by the ionomer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ActivityModel {
    /// Relative humidity plus twice the liquid saturation.
    #[default]
    VapourPlusLiquid,
    /// Relative humidity only, capped at one.
    RelativeHumidityOnly,
}

/// Selection of correlation variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropertyConfig {
    /// Dissolved water diffusivity law.
    pub d_lambda_variant: DiffusivityVariant,
    /// Equilibrium water content isotherm.
    pub lambda_eq_variant: LambdaEqVariant,
    /// Proton conductivity law.
    pub conductivity_variant: ConductivityVariant,
    /// Sharpness of the liquid branch of the isotherm.
    pub k_shape: f64,
    /// Water activity model.
    pub activity_model: ActivityModel,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        Self {
            d_lambda_variant: DiffusivityVariant::Kulikovsky,
            lambda_eq_variant: LambdaEqVariant::HinatsuBao,
            conductivity_variant: ConductivityVariant::Springer,
            k_shape: 2.0,
            activity_model: ActivityModel::VapourPlusLiquid,
        }
    }
}

/// Ionomer material constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MembraneConstants {
    /// Dry ionomer density, kg·m⁻³.
    pub rho_mem: f64,
    /// Equivalent weight, kg·mol⁻¹.
    pub m_eq: f64,
}

impl Default for MembraneConstants {
    fn default() -> Self {
        Self {
            rho_mem: 1980.0,
            m_eq: 1.1,
        }
    }
}

impl MembraneConstants {
    /// Partial molar volume of water, m³·mol⁻¹.
    pub fn v_w(&self) -> f64 {
        k::M_H2O / k::RHO_H2O_REF
    }

    /// Molar volume of dry ionomer per acid site, m³·mol⁻¹.
    pub fn v_mem(&self) -> f64 {
        self.m_eq / self.rho_mem
    }

    /// Acid site concentration of the dry ionomer, mol·m⁻³.
    pub fn site_density(&self) -> f64 {
        self.rho_mem / self.m_eq
    }

    /// Water volume fraction of the swollen ionomer at water content `lambda`.
    pub fn water_volume_fraction(&self, lambda: f64) -> f64 {
        let vw = lambda * self.v_w();
        vw / (self.v_mem() + vw)
    }
}

/// Measurement direction for anisotropic porous media fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Direction {
    /// Along the plane of the layer.
    InPlane,
    /// Across the layer thickness.
    #[default]
    ThroughPlane,
}

/// Kind of porous layer, selecting the effective diffusivity law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    /// Catalyst layer (Bruggeman law).
    CatalystLayer,
    /// Gas diffusion layer (fibrous medium law with compression).
    DiffusionLayer,
}

/// Structural constants of one porous layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PorousConstants {
    /// Porosity.
    pub eps: f64,
    /// Percolation threshold.
    pub eps_p: f64,
    /// Pore structure coefficient.
    pub tau: f64,
    /// Permeability and diffusivity fit exponent.
    pub alpha: f64,
    /// Compression coefficient of the permeability.
    pub beta1: f64,
    /// Compression coefficient of the diffusivity.
    pub beta2: f64,
    /// Compression ratio.
    pub eps_c: f64,
    /// Fibre radius, m.
    pub r_fiber: f64,
    /// Capillary exponent.
    pub e_cap: f64,
    /// Contact angle, degrees.
    pub theta_c: f64,
}

impl PorousConstants {
    /// Fibrous diffusion layer with compression coefficients looked up from
    /// the tabulated fits for the porosity nearest to `eps` (0.6 or 0.73).
    pub fn diffusion_layer(eps: f64, eps_c: f64, direction: Direction, theta_c: f64) -> Self {
        let (b1, b2) = if (eps - 0.6).abs() <= (eps - 0.73).abs() {
            (k::BETA1_EPS_060, k::BETA2_EPS_060)
        } else {
            (k::BETA1_EPS_073, k::BETA2_EPS_073)
        };
        let (alpha, beta1, beta2) = match direction {
            Direction::InPlane => (k::ALPHA_IN_PLANE, b1.0, b2.0),
            Direction::ThroughPlane => (k::ALPHA_THROUGH_PLANE, b1.1, b2.1),
        };
        Self {
            eps,
            eps_p: k::EPS_P_DEFAULT,
            tau: k::TAU_DEFAULT,
            alpha,
            beta1,
            beta2,
            eps_c,
            r_fiber: k::FIBER_RADIUS_DEFAULT,
            e_cap: capillary_exponent(eps),
            theta_c,
        }
    }

    /// Uncompressed catalyst layer.
    pub fn catalyst_layer(eps: f64, theta_c: f64) -> Self {
        Self {
            eps,
            eps_p: k::EPS_P_DEFAULT,
            tau: k::TAU_DEFAULT,
            alpha: k::ALPHA_THROUGH_PLANE,
            beta1: 0.0,
            beta2: 0.0,
            eps_c: 0.0,
            r_fiber: k::FIBER_RADIUS_DEFAULT,
            e_cap: capillary_exponent(eps),
            theta_c,
        }
    }

    /// Checks the structural invariants, naming offending fields with `path`.
    pub fn validate(&self, path: &str) -> Result<()> {
        let fail = |c: &str| Err(Error::Validation(format!("{path}.{c}")));
        if !(self.eps_p > 0.0 && self.eps_p < self.eps) {
            return fail("eps_p in (0, eps)");
        }
        if !(self.eps < 1.0) {
            return fail("eps < 1");
        }
        if !(self.tau > 0.0) {
            return fail("tau > 0");
        }
        if !(self.alpha > 0.0) {
            return fail("alpha > 0");
        }
        if !(0.0..=0.5).contains(&self.eps_c) {
            return fail("eps_c in [0, 0.5]");
        }
        if !(self.r_fiber > 0.0) {
            return fail("r_fiber > 0");
        }
        if !(self.e_cap > 0.0) {
            return fail("e_cap > 0");
        }
        if !(0.0..=180.0).contains(&self.theta_c) {
            return fail("theta_c in [0, 180]");
        }
        if !(self.beta1.is_finite() && self.beta2.is_finite()) {
            return fail("beta1 and beta2 finite");
        }
        Ok(())
    }
}

/// Capillary exponent for a porosity: 3 for dense media, 4.5 for open fibrous media.
pub fn capillary_exponent(eps: f64) -> f64 {
    if eps <= 0.5 {
        3.0
    } else {
        4.5
    }
}

/// Gas pair of a binary diffusivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GasPair {
    /// Water vapour in hydrogen.
    H2oH2,
    /// Water vapour in oxygen.
    H2oO2,
}

/// Gas crossing the membrane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverGas {
    /// Hydrogen.
    H2,
    /// Oxygen.
    O2,
}

static LAMBDA_RANGE_WARNED: AtomicBool = AtomicBool::new(false);

fn note_lambda_range(lambda: f64) {
    if lambda > k::LAMBDA_WARN && !LAMBDA_RANGE_WARNED.swap(true, Ordering::Relaxed) {
        log::warn!(
            "water content {lambda:.3} exceeds {}; correlations are extrapolated",
            k::LAMBDA_WARN
        );
    }
}

fn check_range(what: &'static str, t: f64, lo: f64, hi: f64) -> Result<()> {
    if t.is_finite() && t >= lo && t <= hi {
        Ok(())
    } else {
        Err(Error::domain(what, format!("T = {t} K outside [{lo}, {hi}] K")))
    }
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Saturated vapour pressure of water, Pa.
pub fn p_sat(t: f64) -> Result<f64> {
    check_range("p_sat", t, k::PSAT_T_RANGE.0, k::PSAT_T_RANGE.1)?;
    let tc = t - k::T_ZERO_CELSIUS;
    Ok(k::P_ATM * 10f64.powf(poly(&k::PSAT_COEFFS, tc)))
}

/// Saturated vapour concentration, mol·m⁻³.
pub fn c_sat(t: f64) -> Result<f64> {
    Ok(p_sat(t)? / (k::GAS_CONSTANT * t))
}

/// Water activity seen by the ionomer.
pub fn water_activity(c_v: f64, s: f64, t: f64, cfg: &PropertyConfig) -> Result<f64> {
    if !(c_v >= 0.0) || !(s >= 0.0) {
        return Err(Error::domain(
            "water_activity",
            format!("negative input C_v = {c_v}, s = {s}"),
        ));
    }
    let rh = c_v / c_sat(t)?;
    Ok(match cfg.activity_model {
        ActivityModel::VapourPlusLiquid => (rh + 2.0 * s).clamp(0.0, 3.0),
        ActivityModel::RelativeHumidityOnly => rh.clamp(0.0, 1.0),
    })
}

/// Equilibrium water content of the ionomer at water activity `a_w`.
pub fn lambda_eq(a_w: f64, _t: f64, cfg: &PropertyConfig) -> Result<f64> {
    if !(0.0..=3.0).contains(&a_w) {
        return Err(Error::domain(
            "lambda_eq",
            format!("a_w = {a_w} outside [0, 3]"),
        ));
    }
    let (cubic, sat, rise) = match cfg.lambda_eq_variant {
        LambdaEqVariant::HinatsuBao => (
            &k::LAMBDA_EQ_HINATSU_CUBIC,
            k::LAMBDA_EQ_HINATSU_SAT,
            k::LAMBDA_EQ_HINATSU_RISE,
        ),
        LambdaEqVariant::SpringerBao => (
            &k::LAMBDA_EQ_SPRINGER_CUBIC,
            k::LAMBDA_EQ_SPRINGER_SAT,
            k::LAMBDA_EQ_SPRINGER_RISE,
        ),
    };
    let blend = (k::LAMBDA_EQ_BLEND * (a_w - 1.0)).tanh();
    let vapour = poly(cubic, a_w);
    let liquid = sat + rise * (1.0 - (-cfg.k_shape * (a_w - 1.0)).exp());
    Ok(0.5 * vapour * (1.0 - blend) + 0.5 * liquid * (1.0 + blend))
}

/// Water content of a liquid-equilibrated membrane at temperature `t`.
pub fn lambda_liquid_eq(t: f64) -> f64 {
    poly(&k::LAMBDA_LIQ_COEFFS, t - k::T_ZERO_CELSIUS)
}

/// Dissolved water diffusivity in the ionomer, m²·s⁻¹.
pub fn d_lambda(lambda: f64, t: f64, cfg: &PropertyConfig) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain("d_lambda", format!("lambda = {lambda} < 0")));
    }
    note_lambda_range(lambda);
    Ok(match cfg.d_lambda_variant {
        DiffusivityVariant::Kulikovsky => {
            k::D_KULIKOVSKY_PREFACTOR
                * (lambda / k::D_KULIKOVSKY_LREF).powf(k::D_KULIKOVSKY_POWER)
                * (1.0 + ((lambda - k::D_KULIKOVSKY_CENTRE) / k::D_KULIKOVSKY_WIDTH).tanh())
        }
        DiffusivityVariant::Springer => {
            if lambda <= 2.0 {
                return Ok(k::D_SPRINGER_DRY);
            }
            let arr = (k::D_SPRINGER_ACT * (1.0 / k::D_SPRINGER_TREF - 1.0 / t)).exp();
            let [n2, n3, n4] = k::D_SPRINGER_NODES;
            let shape = if lambda <= 3.0 {
                n2 * (3.0 - lambda) + n3 * (lambda - 2.0)
            } else if lambda <= 4.0 {
                n3 * (4.0 - lambda) + n4 * (lambda - 3.0)
            } else {
                poly(&k::D_SPRINGER_CUBIC, lambda)
            };
            k::D_SPRINGER_SCALE * arr * shape
        }
        DiffusivityVariant::Motupally => {
            let arr = (-k::D_MOTUPALLY_ACT / t).exp();
            if lambda < k::D_MOTUPALLY_SWITCH {
                k::D_MOTUPALLY_LOW * lambda * ((k::D_MOTUPALLY_LOW_EXP * lambda).exp() - 1.0) * arr
            } else {
                k::D_MOTUPALLY_HIGH * lambda * (k::D_MOTUPALLY_HIGH_AMP * (-lambda).exp() + 1.0) * arr
            }
        }
    })
}

/// Sorption rate coefficient, s⁻¹: absorption when `lambda_eq ≥ lambda`, desorption otherwise.
pub fn sorption_rate(lambda: f64, lambda_eq: f64, t: f64, h_cl: f64, mc: &MembraneConstants) -> f64 {
    let coeff = if lambda_eq >= lambda {
        k::GAMMA_ABSORPTION
    } else {
        k::GAMMA_DESORPTION
    };
    let arr = (k::SORPTION_ACT * (1.0 / k::SORPTION_TREF - 1.0 / t)).exp();
    coeff * mc.water_volume_fraction(lambda.max(0.0)) / h_cl * arr
}

/// Surface tension of liquid water against its vapour, N·m⁻¹.
pub fn surface_tension(t: f64) -> Result<f64> {
    if !(t > k::T_ZERO_CELSIUS && t < k::T_CRITICAL) {
        return Err(Error::domain(
            "surface_tension",
            format!("T = {t} K outside ({}, {}) K", k::T_ZERO_CELSIUS, k::T_CRITICAL),
        ));
    }
    let tau = (k::T_CRITICAL - t) / k::T_CRITICAL;
    Ok(k::SIGMA_A * tau.powf(k::SIGMA_MU) * (1.0 - k::SIGMA_B * tau))
}

/// Intrinsic permeability of a fibrous medium with compression correction, m².
pub fn intrinsic_permeability_tsb(pc: &PorousConstants) -> Result<f64> {
    let (eps, ep, a) = (pc.eps, pc.eps_p, pc.alpha);
    if !(eps > ep && eps < 1.0) {
        return Err(Error::domain(
            "intrinsic_permeability_tsb",
            format!("porosity {eps} below percolation threshold {ep} or not below 1"),
        ));
    }
    let ln_eps = eps.ln();
    let kernel = eps / (8.0 * ln_eps * ln_eps) * (eps - ep).powf(a + 2.0) * pc.r_fiber.powi(2)
        / ((1.0 - ep).powf(a) * ((a + 1.0) * eps - ep).powi(2));
    Ok(kernel * (pc.beta1 * pc.eps_c).exp())
}

/// Porous-medium factor multiplying a free-space diffusivity at saturation `s`.
pub fn effective_diffusivity_factor(s: f64, layer: LayerKind, pc: &PorousConstants) -> f64 {
    let open = (1.0 - s).clamp(0.0, 1.0);
    match layer {
        LayerKind::CatalystLayer => pc.eps.powf(pc.tau) * open.powf(pc.tau),
        LayerKind::DiffusionLayer => {
            pc.eps
                * ((pc.eps - pc.eps_p) / (1.0 - pc.eps_p)).powf(pc.alpha)
                * open
                * open
                * (pc.beta2 * pc.eps_c).exp()
        }
    }
}

/// Effective diffusivity in a porous layer, m²·s⁻¹.
pub fn effective_diffusivity(d_ij: f64, s: f64, layer: LayerKind, pc: &PorousConstants) -> f64 {
    d_ij * effective_diffusivity_factor(s, layer, pc)
}

/// Binary diffusivity of a gas pair, m²·s⁻¹.
pub fn binary_diffusivity(pair: GasPair, t: f64, p: f64) -> f64 {
    let reference = match pair {
        GasPair::H2oH2 => k::D_H2O_H2_REF,
        GasPair::H2oO2 => k::D_H2O_O2_REF,
    };
    reference * (t / k::D_BINARY_TREF).powf(k::D_BINARY_EXP) * (k::P_ATM / p)
}

/// Sherwood number of a rectangular channel of width `w_gc` and height `h_gc`.
pub fn sherwood(w_gc: f64, h_gc: f64) -> Result<f64> {
    let ratio = w_gc / h_gc;
    let (lo, hi) = k::SHERWOOD_RANGE;
    if !(ratio >= lo && ratio <= hi) {
        return Err(Error::domain(
            "sherwood",
            format!("aspect ratio W/H = {ratio} outside [{lo}, {hi}]"),
        ));
    }
    Ok(k::SHERWOOD.0 * ratio.ln() + k::SHERWOOD.1)
}

/// Mass transfer coefficient between the channel and the diffusion layer, m·s⁻¹.
pub fn h_codi(d: f64, w_gc: f64, h_gc: f64) -> Result<f64> {
    Ok(sherwood(w_gc, h_gc)? * d / h_gc)
}

/// Leverett capillary pressure function.
pub fn leverett_j(s: f64) -> f64 {
    s * poly(&k::LEVERETT, s)
}

/// Derivative of the Leverett function with respect to saturation.
pub fn leverett_j_prime(s: f64) -> f64 {
    let [a, b, c] = k::LEVERETT;
    a + 2.0 * b * s + 3.0 * c * s * s
}

/// Saturation-independent prefactor of the capillary diffusivity, kg·m⁻¹·s⁻¹.
pub fn capillary_prefactor(pc: &PorousConstants, t: f64) -> Result<f64> {
    let k0 = intrinsic_permeability_tsb(pc)?;
    let sigma = surface_tension(t)?;
    let nu = liquid_viscosity_kinematic(t)?;
    Ok(sigma * k0 / nu * pc.theta_c.to_radians().cos().abs() * (pc.eps / k0).sqrt())
}

/// Capillary diffusivity of liquid water, kg·m⁻¹·s⁻¹.
pub fn d_cap(s: f64, pc: &PorousConstants, t: f64) -> Result<f64> {
    Ok(capillary_prefactor(pc, t)? * capillary_shape(s, pc.e_cap))
}

/// Saturation dependence of the capillary diffusivity.
pub fn capillary_shape(s: f64, e_cap: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s.powf(e_cap) * leverett_j_prime(s)
}

/// Proton conductivity of the ionomer, S·m⁻¹.
pub fn proton_conductivity(lambda: f64, t: f64, cfg: &PropertyConfig) -> f64 {
    match cfg.conductivity_variant {
        ConductivityVariant::Springer => {
            let arr = (k::SIGMA_M_ACT * (1.0 / k::SIGMA_M_TREF - 1.0 / t)).exp();
            if lambda >= 1.0 {
                (k::SIGMA_M_SLOPE * lambda - k::SIGMA_M_INTERCEPT) * arr
            } else {
                (k::SIGMA_M_SLOPE - k::SIGMA_M_INTERCEPT) * arr
            }
        }
        ConductivityVariant::Ramousse => {
            let [c3, c2, c1] = k::SIGMA_RAMOUSSE_CUBIC;
            let [amp, decay, floor] = k::SIGMA_RAMOUSSE_ACT;
            let lambda = lambda.max(0.0);
            let e_a = amp * (-decay * lambda).exp() + floor;
            (c3 * lambda.powi(3) + c2 * lambda * lambda + c1 * lambda)
                * (e_a * (1.0 / k::SIGMA_RAMOUSSE_TREF - 1.0 / t)).exp()
        }
    }
}

/// Gas permeability of the ionomer, mol·m⁻¹·s⁻¹·Pa⁻¹.
pub fn crossover_permeability(
    gas: CrossoverGas,
    lambda: f64,
    lambda_l_eq: f64,
    t: f64,
    mc: &MembraneConstants,
) -> f64 {
    let (vapour, liquid, act) = match gas {
        CrossoverGas::H2 => (k::K_H2_VAPOUR, k::K_H2_LIQUID, k::K_H2_ACT),
        CrossoverGas::O2 => (k::K_O2_VAPOUR, k::K_O2_LIQUID, k::K_O2_ACT),
    };
    let inv = 1.0 / k::CROSSOVER_TREF - 1.0 / t;
    if (lambda - lambda_l_eq).abs() < k::LIQUID_BRANCH_TOL {
        liquid * (act.1 / k::GAS_CONSTANT * inv).exp()
    } else {
        let fv = mc.water_volume_fraction(lambda.max(0.0));
        (vapour.0 + vapour.1 * fv) * (act.0 / k::GAS_CONSTANT * inv).exp()
    }
}

/// Liquid water density, kg·m⁻³.
pub fn liquid_water_density(t: f64) -> Result<f64> {
    check_range("liquid_water_density", t, k::LIQUID_T_RANGE.0, k::LIQUID_T_RANGE.1)?;
    let tc = t - k::T_ZERO_CELSIUS;
    Ok(poly(&k::RHO_L_NUM, tc) / (1.0 + k::RHO_L_DEN * tc))
}

/// Liquid water dynamic viscosity, Pa·s.
pub fn liquid_viscosity_dynamic(t: f64) -> Result<f64> {
    check_range("liquid_viscosity_dynamic", t, k::LIQUID_T_RANGE.0, k::LIQUID_T_RANGE.1)?;
    Ok(k::MU_L_PREFACTOR * 10f64.powf(k::MU_L_B / (t - k::MU_L_C)))
}

/// Liquid water kinematic viscosity, m²·s⁻¹.
pub fn liquid_viscosity_kinematic(t: f64) -> Result<f64> {
    Ok(liquid_viscosity_dynamic(t)? / liquid_water_density(t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> PropertyConfig {
        PropertyConfig::default()
    }

    #[test]
    fn p_sat_values() {
        assert_relative_eq!(p_sat(353.15).unwrap(), 4.73e4, max_relative = 0.01);
        assert_relative_eq!(p_sat(273.15).unwrap(), 101325.0 * 10f64.powf(-2.1794), max_relative = 1e-12);
        assert!(p_sat(343.15).unwrap() < p_sat(353.15).unwrap());
        assert!(matches!(p_sat(400.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn water_activity_values() {
        let t = 353.15;
        let cs = c_sat(t).unwrap();
        assert_relative_eq!(water_activity(cs, 0.0, t, &cfg()).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(water_activity(cs, 1.0, t, &cfg()).unwrap(), 3.0, epsilon = 1e-12);
        assert_relative_eq!(water_activity(0.5 * cs, 0.25, t, &cfg()).unwrap(), 1.0, epsilon = 1e-12);
        assert!(water_activity(-1.0, 0.0, t, &cfg()).is_err());
        let rh = PropertyConfig {
            activity_model: ActivityModel::RelativeHumidityOnly,
            ..cfg()
        };
        assert_relative_eq!(water_activity(cs, 0.5, t, &rh).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_eq_values() {
        assert_relative_eq!(lambda_eq(1.0, 353.15, &cfg()).unwrap(), 9.2, epsilon = 1e-6);
        assert_relative_eq!(
            lambda_eq(3.0, 353.15, &cfg()).unwrap(),
            9.2 + 8.6 * (1.0 - (-4.0f64).exp()),
            epsilon = 1e-9
        );
        let sp = PropertyConfig {
            lambda_eq_variant: LambdaEqVariant::SpringerBao,
            ..cfg()
        };
        assert_relative_eq!(lambda_eq(1.0, 353.15, &sp).unwrap(), 14.0, epsilon = 5e-3);
        assert!(lambda_eq(3.5, 353.15, &cfg()).is_err());
    }

    #[test]
    fn d_lambda_values() {
        assert_relative_eq!(d_lambda(2.5, 353.15, &cfg()).unwrap(), 4.1e-10 * 0.1f64.powf(0.15), max_relative = 1e-12);
        assert_relative_eq!(d_lambda(2.5, 353.15, &cfg()).unwrap(), 2.90e-10, max_relative = 2e-3);
        assert_relative_eq!(d_lambda(25.0, 353.15, &cfg()).unwrap(), 8.2e-10, max_relative = 1e-6);
        let sp = PropertyConfig {
            d_lambda_variant: DiffusivityVariant::Springer,
            ..cfg()
        };
        assert_eq!(d_lambda(1.0, 320.0, &sp).unwrap(), 2.692661843e-10);
        assert!(d_lambda(-0.1, 353.15, &cfg()).is_err());
    }

    #[test]
    fn springer_diffusivity_node_behaviour() {
        let sp = PropertyConfig {
            d_lambda_variant: DiffusivityVariant::Springer,
            ..cfg()
        };
        let at = |l: f64| d_lambda(l, 353.15, &sp).unwrap();
        assert_relative_eq!(at(3.0 - 1e-9), at(3.0 + 1e-9), max_relative = 1e-6);
        // The published cubic above λ = 4 starts 1.2 % below the linear segment.
        let jump = at(4.0 + 1e-9) / at(4.0 - 1e-9);
        assert_relative_eq!(jump, 1.622456 / 1.642454, max_relative = 1e-6);
    }

    #[test]
    fn sorption_values() {
        let mc = MembraneConstants::default();
        assert_eq!(sorption_rate(0.0, 9.2, 353.15, 1e-5, &mc), 0.0);
        assert_relative_eq!(mc.water_volume_fraction(7.0), 0.1848, max_relative = 1e-3);
        let ga = sorption_rate(7.0, 9.2, 353.15, 1e-5, &mc);
        assert_relative_eq!(ga, 0.654, max_relative = 2e-3);
        let ga9 = sorption_rate(9.2, 9.3, 353.15, 1e-5, &mc);
        let gd9 = sorption_rate(9.2, 7.0, 353.15, 1e-5, &mc);
        assert_relative_eq!(gd9 / ga9, 4.59 / 1.14, max_relative = 1e-12);
    }

    #[test]
    fn surface_tension_values() {
        assert_relative_eq!(surface_tension(353.15).unwrap(), 0.0627, epsilon = 2e-4);
        let s70 = surface_tension(343.15).unwrap();
        assert!(s70 > 0.0627 && s70 < 0.0700);
        assert!(surface_tension(647.15).is_err());
        assert!(surface_tension(647.0).unwrap() < 1e-3);
    }

    #[test]
    fn permeability_values() {
        let pc = PorousConstants::diffusion_layer(0.6, 0.3, Direction::ThroughPlane, 110.0);
        assert_relative_eq!(intrinsic_permeability_tsb(&pc).unwrap(), 3.4e-13, max_relative = 0.05);
        let bare = PorousConstants { eps_c: 0.0, ..pc };
        let ratio = intrinsic_permeability_tsb(&pc).unwrap() / intrinsic_permeability_tsb(&bare).unwrap();
        assert_relative_eq!(ratio, (-3.60f64 * 0.3).exp(), max_relative = 1e-12);
        let near = PorousConstants { eps: 0.11 + 1e-6, ..bare };
        assert!(intrinsic_permeability_tsb(&near).unwrap() < 1e-25);
        let below = PorousConstants { eps: 0.1, ..bare };
        assert!(intrinsic_permeability_tsb(&below).is_err());
    }

    #[test]
    fn effective_diffusivity_values() {
        let gdl = PorousConstants::diffusion_layer(0.6, 0.3, Direction::ThroughPlane, 110.0);
        assert_relative_eq!(
            effective_diffusivity_factor(0.0, LayerKind::DiffusionLayer, &gdl),
            0.6 * (0.49f64 / 0.89).powf(0.785) * (-1.59f64 * 0.3).exp(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            effective_diffusivity_factor(0.0, LayerKind::DiffusionLayer, &gdl),
            0.23309,
            max_relative = 1e-4
        );
        let cl = PorousConstants::catalyst_layer(0.3, 95.0);
        assert_relative_eq!(
            effective_diffusivity_factor(0.0, LayerKind::CatalystLayer, &cl),
            0.1643,
            max_relative = 1e-3
        );
        assert_eq!(effective_diffusivity(1e-5, 1.0, LayerKind::CatalystLayer, &cl), 0.0);
        assert_eq!(effective_diffusivity(1e-5, 1.0, LayerKind::DiffusionLayer, &gdl), 0.0);
    }

    #[test]
    fn binary_and_sherwood_values() {
        assert_eq!(binary_diffusivity(GasPair::H2oH2, 333.0, 101325.0), 1.644e-4);
        assert_eq!(binary_diffusivity(GasPair::H2oO2, 333.0, 101325.0), 3.242e-5);
        assert_relative_eq!(
            binary_diffusivity(GasPair::H2oO2, 353.0, 1.5 * 101325.0),
            2.47e-5,
            max_relative = 5e-3
        );
        assert_eq!(sherwood(1e-3, 1e-3).unwrap(), 2.3787);
        assert_relative_eq!(sherwood(1.6, 1.0).unwrap(), 2.813, max_relative = 1e-3);
        assert_relative_eq!(h_codi(3e-5, 1e-3, 1e-3).unwrap(), 0.0714, max_relative = 1e-3);
        assert!(sherwood(11.0, 1.0).is_err());
    }

    #[test]
    fn leverett_values() {
        assert_eq!(leverett_j(0.0), 0.0);
        assert_relative_eq!(leverett_j(1.0), 0.56, epsilon = 1e-12);
        assert_relative_eq!(leverett_j_prime(1.0), 0.966, epsilon = 1e-12);
        let pc = PorousConstants::diffusion_layer(0.6, 0.3, Direction::ThroughPlane, 110.0);
        assert_eq!(d_cap(0.0, &pc, 353.15).unwrap(), 0.0);
    }

    #[test]
    fn conductivity_values() {
        assert_relative_eq!(proton_conductivity(14.0, 353.15, &cfg()), 12.4, max_relative = 2e-3);
        assert_relative_eq!(proton_conductivity(0.5, 303.15, &cfg()), 0.1879, epsilon = 1e-12);
        let ra = PropertyConfig {
            conductivity_variant: ConductivityVariant::Ramousse,
            ..cfg()
        };
        assert_eq!(proton_conductivity(0.0, 353.15, &ra), 0.0);
    }

    #[test]
    fn crossover_values() {
        let mc = MembraneConstants::default();
        let t = 303.15;
        let ll = lambda_liquid_eq(t);
        assert_relative_eq!(crossover_permeability(CrossoverGas::H2, 0.0, ll, t, &mc), 0.29e-14, max_relative = 1e-12);
        assert_relative_eq!(crossover_permeability(CrossoverGas::O2, 0.0, ll, t, &mc), 0.11e-14, max_relative = 1e-12);
        assert_relative_eq!(crossover_permeability(CrossoverGas::H2, ll, ll, t, &mc), 1.8e-14, max_relative = 1e-12);
    }

    #[test]
    fn liquid_water_values() {
        assert_relative_eq!(liquid_water_density(343.15).unwrap(), 977.77, epsilon = 0.01);
        assert_relative_eq!(liquid_viscosity_dynamic(343.15).unwrap(), 4.01e-4, max_relative = 2e-3);
        assert_relative_eq!(liquid_viscosity_kinematic(343.15).unwrap(), 4.10e-7, max_relative = 0.01);
        assert!(liquid_water_density(380.0).is_err());
    }
}
