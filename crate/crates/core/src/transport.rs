//! Fluxes at mesh faces, volumetric sources in cells and channel boundary
//! flows for a given state and current density.
//!
//! Every flux is oriented along +x, from the anode channel towards the
//! cathode channel.

use crate::cell::{CellDefinition, Mesh1D, Region, StateLayout, StateVector};
use crate::error::{Error, Result};
use crate::polarization::{self, ElectrodeState, InternalCurrents, VoltageReport};
use crate::properties::constants::{FARADAY, GAS_CONSTANT, M_H2, M_H2O, M_N2, M_O2};
use crate::properties::{self, CrossoverGas, GasPair, LayerKind, MembraneConstants, PorousConstants};

/// Electro-osmotic drag coefficient per unit water content.
pub const EOD_PER_LAMBDA: f64 =
    crate::properties::constants::EOD_SAT / crate::properties::constants::EOD_LAMBDA;

/// Dissolved water flux across an ionomer face, mol·m⁻²·s⁻¹.
///
/// Uses arithmetic means of the water content and of the diffusivity of the
/// two neighbouring cells and a central difference over `distance`.
pub fn membrane_water_flux(
    i_fc: f64,
    lambda_left: f64,
    lambda_right: f64,
    d_left: f64,
    d_right: f64,
    distance: f64,
    site_density: f64,
) -> f64 {
    let lambda_face = 0.5 * (lambda_left + lambda_right);
    let d_face = 0.5 * (d_left + d_right);
    EOD_PER_LAMBDA * i_fc / FARADAY * lambda_face
        - site_density * d_face * (lambda_right - lambda_left) / distance
}

/// Sorption source towards the ionomer, mol·m⁻³·s⁻¹.
pub fn sorption_source(gamma: f64, site_density: f64, lambda: f64, lambda_eq: f64) -> f64 {
    gamma * site_density * (lambda_eq - lambda)
}

/// Width in λ over which the sorption coefficient blends from desorption to
/// absorption, keeping the source differentiable at `λ = λ_eq`.
pub const SORPTION_BLEND_WIDTH: f64 = 1e-3;

/// Sorption coefficient with a smooth switch between the absorption and
/// desorption branches, s⁻¹.
pub fn blended_sorption_rate(lambda: f64, lambda_eq: f64, t: f64, h_cl: f64, mc: &MembraneConstants) -> f64 {
    let absorb = properties::sorption_rate(lambda, f64::INFINITY, t, h_cl, mc);
    let desorb = properties::sorption_rate(lambda, f64::NEG_INFINITY, t, h_cl, mc);
    let w = 0.5 * (1.0 + ((lambda_eq - lambda) / SORPTION_BLEND_WIDTH).tanh());
    w * absorb + (1.0 - w) * desorb
}

/// Crossover source magnitude `k·(RT/H_cl)·C_cl/H_mem`, mol·m⁻³·s⁻¹.
pub fn crossover_source(permeability: f64, t: f64, c_cl: f64, h_cl: f64, h_mem: f64) -> f64 {
    permeability * GAS_CONSTANT * t / h_cl * c_cl.max(0.0) / h_mem
}

/// Crossover sources of one instant, mol·m⁻³·s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CrossoverSources {
    /// Hydrogen leaving the ACL through the membrane.
    pub h2_co: f64,
    /// Oxygen leaving the CCL through the membrane.
    pub o2_co: f64,
    /// Hydrogen burnt in the ACL by crossed oxygen (non-positive).
    pub h2_wasted: f64,
    /// Oxygen burnt in the CCL by crossed hydrogen (non-positive).
    pub o2_wasted: f64,
}

impl CrossoverSources {
    /// Crossover sources from the CL mean concentrations.
    pub fn new(es: &ElectrodeState, t: f64, h_cl: f64, h_mem: f64) -> Self {
        let h2_co = crossover_source(es.k_h2, t, es.c_h2_acl, h_cl, h_mem);
        let o2_co = crossover_source(es.k_o2, t, es.c_o2_ccl, h_cl, h_mem);
        Self {
            h2_co,
            o2_co,
            h2_wasted: -2.0 * o2_co,
            o2_wasted: -0.5 * h2_co,
        }
    }
}

/// Water production in the ionomer of the CCL, mol·m⁻³·s⁻¹.
pub fn production_source_ccl(i_fc: f64, i_sc: f64, h_cl: f64, co: &CrossoverSources) -> f64 {
    (i_fc + i_sc) / (2.0 * FARADAY * h_cl) + co.h2_co
}

/// Water production in the ionomer of the ACL, mol·m⁻³·s⁻¹.
pub fn production_source_acl(co: &CrossoverSources) -> f64 {
    2.0 * co.o2_co
}

/// Hydrogen consumption in the ACL, mol·m⁻³·s⁻¹ (non-positive).
pub fn consumption_h2(i_fc: f64, i_sc: f64, h_cl: f64, co: &CrossoverSources) -> f64 {
    -(i_fc + i_sc) / (2.0 * FARADAY * h_cl) - co.h2_co + co.h2_wasted
}

/// Oxygen consumption in the CCL, mol·m⁻³·s⁻¹ (non-positive).
pub fn consumption_o2(i_fc: f64, i_sc: f64, h_cl: f64, co: &CrossoverSources) -> f64 {
    -(i_fc + i_sc) / (4.0 * FARADAY * h_cl) - co.o2_co + co.o2_wasted
}

/// Capillary liquid flux, kg·m⁻²·s⁻¹.
pub fn capillary_flux(d_face: f64, s_left: f64, s_right: f64, distance: f64) -> f64 {
    -d_face * (s_right - s_left) / distance
}

/// Diffusive gas flux, mol·m⁻²·s⁻¹.
pub fn gas_diffusive_flux(d_face: f64, c_left: f64, c_right: f64, distance: f64) -> f64 {
    -d_face * (c_right - c_left) / distance
}

/// Distance-weighted harmonic mean of two one-sided coefficients.
pub fn harmonic_face(d_left: f64, half_left: f64, d_right: f64, half_right: f64) -> f64 {
    if d_left <= 0.0 || d_right <= 0.0 {
        return 0.0;
    }
    (half_left + half_right) / (half_left / d_left + half_right / d_right)
}

/// Convective-diffusive flux from a channel into the adjacent diffusion layer
/// cell, mol·m⁻²·s⁻¹.
///
/// The interface concentration is reconstructed so that the diffusive flux
/// over the half cell equals the convective-diffusive flux to the channel.
pub fn codi_flux_into_layer(h: f64, d_eff: f64, half_dx: f64, c_gc: f64, c_cell: f64) -> f64 {
    if d_eff <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    (c_gc - c_cell) / (1.0 / h + half_dx / d_eff)
}

/// Vapour to liquid phase change source, mol·m⁻³·s⁻¹.
#[allow(clippy::too_many_arguments)]
pub fn phase_change_source(
    c_v: f64,
    c_sat: f64,
    s: f64,
    eps: f64,
    x_v: f64,
    t: f64,
    rho_l: f64,
    gamma_cond: f64,
    gamma_evap: f64,
) -> f64 {
    if c_v > c_sat {
        gamma_cond * eps * (1.0 - s) * x_v * (c_v - c_sat)
    } else {
        -gamma_evap * eps * s * rho_l / M_H2O * GAS_CONSTANT * t * (c_sat - c_v)
    }
}

/// Inlet and outlet flows of both channels, mol·m⁻²·s⁻¹ per channel section.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryFlows {
    /// Vapour entering the anode channel.
    pub v_in_agc: f64,
    /// Vapour leaving the anode channel.
    pub v_out_agc: f64,
    /// Hydrogen entering the anode channel.
    pub h2_in: f64,
    /// Hydrogen leaving the anode channel.
    pub h2_out: f64,
    /// Vapour entering the cathode channel.
    pub v_in_cgc: f64,
    /// Vapour leaving the cathode channel.
    pub v_out_cgc: f64,
    /// Oxygen entering the cathode channel.
    pub o2_in: f64,
    /// Oxygen leaving the cathode channel.
    pub o2_out: f64,
    /// Nitrogen entering the cathode.
    pub n2_in: f64,
    /// Nitrogen leaving the cathode.
    pub n2_out: f64,
}

/// Channel gas state used by the boundary flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    /// Anode channel vapour concentration, mol·m⁻³.
    pub c_v_agc: f64,
    /// Anode channel hydrogen concentration, mol·m⁻³.
    pub c_h2_agc: f64,
    /// Cathode channel vapour concentration, mol·m⁻³.
    pub c_v_cgc: f64,
    /// Cathode channel oxygen concentration, mol·m⁻³.
    pub c_o2_cgc: f64,
    /// Nitrogen concentration, mol·m⁻³.
    pub c_n2: f64,
}

/// Pressure law of the channel outlets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutletLaw {
    /// Flow proportional to `P − P_des`, floored at zero.
    #[default]
    Floored,
    /// Flow proportional to `P − P_des` without the floor. Used for
    /// Jacobians, where the floor would hide the outlet response whenever a
    /// channel sits just below its set pressure.
    Linear,
}

fn outlet_total(k_em: f64, section: f64, molar_mass: f64, p: f64, p_des: f64, law: OutletLaw) -> f64 {
    let dp = match law {
        OutletLaw::Floored => (p - p_des).max(0.0),
        OutletLaw::Linear => p - p_des,
    };
    k_em / (section * molar_mass) * dp
}

/// Inlet and outlet flows of both channels at total current `i_fc + i_n`.
pub fn boundary_flows(ch: &ChannelState, i_fc: f64, i_n: f64, cell: &CellDefinition) -> Result<BoundaryFlows> {
    boundary_flows_with(ch, i_fc, i_n, cell, OutletLaw::Floored)
}

/// Boundary flows under an explicit outlet law.
pub fn boundary_flows_with(
    ch: &ChannelState,
    i_fc: f64,
    i_n: f64,
    cell: &CellDefinition,
    law: OutletLaw,
) -> Result<BoundaryFlows> {
    let o = &cell.operating;
    let g = &cell.geometry;
    let t = o.t_fc;
    let rt = GAS_CONSTANT * t;
    let psat = properties::p_sat(t)?;
    let section = g.channel_section();
    let area_ratio = g.a_act / section;
    let i_tot = i_fc + i_n;

    let c_v_a = ch.c_v_agc.max(0.0);
    let c_h2 = ch.c_h2_agc.max(0.0);
    let p_agc = (c_v_a + c_h2) * rt;
    let dry_a = p_agc - o.phi_a_des * psat;
    if !(dry_a > 0.0) {
        return Err(Error::State(format!(
            "anode channel fully saturated (P_agc = {p_agc:.6e} Pa)"
        )));
    }
    let h2_in = area_ratio * o.s_a * i_tot / (2.0 * FARADAY);
    let v_in_agc = o.phi_a_des * psat / dry_a * h2_in;
    let xv_a = if p_agc > 0.0 { c_v_a * rt / p_agc } else { 0.0 };
    let m_agc = xv_a * M_H2O + (1.0 - xv_a) * M_H2;
    let tot_a = outlet_total(o.k_em_in, section, m_agc, p_agc, o.p_a_des, law);

    let c_v_c = ch.c_v_cgc.max(0.0);
    let c_o2 = ch.c_o2_cgc.max(0.0);
    let c_n2 = ch.c_n2.max(0.0);
    let p_cgc = (c_v_c + c_o2 + c_n2) * rt;
    let dry_c = p_cgc - o.phi_c_des * psat;
    if !(dry_c > 0.0) {
        return Err(Error::State(format!(
            "cathode channel fully saturated (P_cgc = {p_cgc:.6e} Pa)"
        )));
    }
    let o2_in = area_ratio * o.s_c * i_tot / (4.0 * FARADAY);
    let v_in_cgc = o.phi_c_des * psat / dry_c / o.y_o2_ext * o2_in;
    let n2_in = (1.0 - o.y_o2_ext) / o.y_o2_ext * o2_in;
    let xv_c = if p_cgc > 0.0 { c_v_c * rt / p_cgc } else { 0.0 };
    let y_out = if c_o2 + c_n2 > 0.0 { c_o2 / (c_o2 + c_n2) } else { o.y_o2_ext };
    let m_cgc = xv_c * M_H2O + (1.0 - xv_c) * (y_out * M_O2 + (1.0 - y_out) * M_N2);
    let tot_c = outlet_total(o.k_em_in, section, m_cgc, p_cgc, o.p_c_des, law);

    Ok(BoundaryFlows {
        v_in_agc,
        v_out_agc: xv_a * tot_a,
        h2_in,
        h2_out: (1.0 - xv_a) * tot_a,
        v_in_cgc,
        v_out_cgc: xv_c * tot_c,
        o2_in,
        o2_out: y_out * (1.0 - xv_c) * tot_c,
        n2_in,
        n2_out: (1.0 - y_out) * (1.0 - xv_c) * tot_c,
    })
}

/// All fluxes, sources and boundary flows of one instant.
///
/// Face arrays of an electrode side hold `n + 1` entries for `n` cells. On
/// the anode side face 0 borders the channel and face `n` the membrane; on
/// the cathode side face 0 borders the membrane and face `n` the channel.
/// Ionomer faces span ACL, MEM and CCL with zero flux on both outer borders.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FluxSourceFields {
    /// Dissolved water flux, mol·m⁻²·s⁻¹.
    pub j_mem: Vec<f64>,
    /// Anode capillary flux, kg·m⁻²·s⁻¹.
    pub j_cap_anode: Vec<f64>,
    /// Cathode capillary flux, kg·m⁻²·s⁻¹.
    pub j_cap_cathode: Vec<f64>,
    /// Anode vapour flux, mol·m⁻²·s⁻¹.
    pub j_v_anode: Vec<f64>,
    /// Cathode vapour flux, mol·m⁻²·s⁻¹.
    pub j_v_cathode: Vec<f64>,
    /// Hydrogen flux, mol·m⁻²·s⁻¹.
    pub j_h2: Vec<f64>,
    /// Oxygen flux, mol·m⁻²·s⁻¹.
    pub j_o2: Vec<f64>,
    /// Sorption source per ionomer cell (zero in the membrane), mol·m⁻³·s⁻¹.
    pub s_sorp: Vec<f64>,
    /// Production source per ionomer cell (zero in the membrane), mol·m⁻³·s⁻¹.
    pub s_prod: Vec<f64>,
    /// Phase change source per electrode cell (anode then cathode), mol·m⁻³·s⁻¹.
    pub s_vl: Vec<f64>,
    /// Hydrogen consumption per anode cell, mol·m⁻³·s⁻¹.
    pub s_h2_cons: Vec<f64>,
    /// Oxygen consumption per cathode cell, mol·m⁻³·s⁻¹.
    pub s_o2_cons: Vec<f64>,
    /// Channel inlet and outlet flows.
    pub boundary: BoundaryFlows,
    /// Crossover sources.
    pub crossover: CrossoverSources,
}

impl FluxSourceFields {
    /// Convective-diffusive vapour flux into the anode diffusion layer.
    pub fn codi_v_agc(&self) -> f64 {
        self.j_v_anode[0]
    }

    /// Convective-diffusive vapour flux out of the cathode diffusion layer.
    pub fn codi_v_cgc(&self) -> f64 {
        *self.j_v_cathode.last().unwrap_or(&0.0)
    }

    /// Convective-diffusive hydrogen flux into the anode diffusion layer.
    pub fn codi_h2(&self) -> f64 {
        self.j_h2[0]
    }

    /// Convective-diffusive oxygen flux out of the cathode diffusion layer.
    pub fn codi_o2(&self) -> f64 {
        *self.j_o2.last().unwrap_or(&0.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct CellCoeffs {
    region: Region,
    kind: LayerKind,
    pc: PorousConstants,
    cap_prefactor: f64,
}

/// Transport model of one cell on one mesh with every state-independent
/// coefficient precomputed.
#[derive(Debug, Clone)]
pub struct TransportModel {
    /// Cell definition.
    pub cell: CellDefinition,
    /// Mesh.
    pub mesh: Mesh1D,
    /// Index map of the state vector.
    pub layout: StateLayout,
    /// Saturated vapour pressure, Pa.
    pub p_sat: f64,
    /// Saturated vapour concentration, mol·m⁻³.
    pub c_sat: f64,
    /// Liquid water density, kg·m⁻³.
    pub rho_l: f64,
    /// Acid site density of the dry ionomer, mol·m⁻³.
    pub site_density: f64,
    /// Binary diffusivity on the anode side, m²·s⁻¹.
    pub d_anode: f64,
    /// Binary diffusivity on the cathode side, m²·s⁻¹.
    pub d_cathode: f64,
    /// Channel mass transfer coefficient on the anode side, m·s⁻¹.
    pub h_anode: f64,
    /// Channel mass transfer coefficient on the cathode side, m·s⁻¹.
    pub h_cathode: f64,
    /// Water content of a liquid-equilibrated ionomer.
    pub lambda_liquid: f64,
    coeffs: Vec<CellCoeffs>,
}

/// Result of one full evaluation of the model at a state.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// Fluxes and sources.
    pub fields: FluxSourceFields,
    /// Voltage breakdown.
    pub voltage: VoltageReport,
    /// Electrode quantities behind the voltage.
    pub electrode: ElectrodeState,
}

fn weighted_mean(values: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (v, w) in values {
        num += v * w;
        den += w;
    }
    num / den
}

impl TransportModel {
    /// Precomputes the coefficients of `cell` on `mesh`.
    pub fn new(cell: &CellDefinition, mesh: &Mesh1D) -> Result<Self> {
        cell.validate()?;
        let t = cell.operating.t_fc;
        let g = &cell.geometry;
        let m = &cell.materials;
        let mut coeffs = Vec::with_capacity(mesh.n_cells());
        for &region in &mesh.regions {
            let (kind, pc) = match region {
                Region::Agdl => (LayerKind::DiffusionLayer, m.agdl),
                Region::Acl => (LayerKind::CatalystLayer, m.acl),
                Region::Mem => (LayerKind::CatalystLayer, m.acl),
                Region::Ccl => (LayerKind::CatalystLayer, m.ccl),
                Region::Cgdl => (LayerKind::DiffusionLayer, m.cgdl),
            };
            let cap_prefactor = if region == Region::Mem {
                0.0
            } else {
                properties::capillary_prefactor(&pc, t)?
            };
            coeffs.push(CellCoeffs {
                region,
                kind,
                pc,
                cap_prefactor,
            });
        }
        let d_anode = properties::binary_diffusivity(GasPair::H2oH2, t, cell.operating.p_a_des);
        let d_cathode = properties::binary_diffusivity(GasPair::H2oO2, t, cell.operating.p_c_des);
        Ok(Self {
            cell: *cell,
            mesh: mesh.clone(),
            layout: StateLayout::new(mesh),
            p_sat: properties::p_sat(t)?,
            c_sat: properties::c_sat(t)?,
            rho_l: properties::liquid_water_density(t)?,
            site_density: m.membrane.site_density(),
            d_anode,
            d_cathode,
            h_anode: properties::h_codi(d_anode, g.w_gc, g.h_gc)?,
            h_cathode: properties::h_codi(d_cathode, g.w_gc, g.h_gc)?,
            lambda_liquid: properties::lambda_liquid_eq(t),
            coeffs,
        })
    }

    /// Cell temperature, K.
    pub fn temperature(&self) -> f64 {
        self.cell.operating.t_fc
    }

    /// Porosity of interior cell `c`.
    pub fn porosity(&self, c: usize) -> f64 {
        self.coeffs[c].pc.eps
    }

    /// Ionomer storage coefficient of interior cell `c`, mol·m⁻³ per unit λ.
    pub fn ionomer_capacity(&self, c: usize) -> f64 {
        if self.coeffs[c].region == Region::Mem {
            self.site_density
        } else {
            self.site_density * self.cell.materials.eps_mc
        }
    }

    /// Nitrogen storage volume per unit active area, m.
    pub fn nitrogen_depth(&self) -> f64 {
        let l = &self.layout;
        self.cell.geometry.channel_depth()
            + (0..l.n_cathode)
                .map(|j| {
                    let c = l.cathode_cell(j);
                    self.porosity(c) * self.mesh.dx[c]
                })
                .sum::<f64>()
    }

    fn d_eff(&self, c: usize, s: f64, d_bin: f64) -> f64 {
        let cc = &self.coeffs[c];
        properties::effective_diffusivity(d_bin, s.clamp(0.0, 1.0), cc.kind, &cc.pc)
    }

    fn d_cap_at(&self, c: usize, s: f64) -> f64 {
        let cc = &self.coeffs[c];
        cc.cap_prefactor * properties::capillary_shape(s, cc.pc.e_cap)
    }

    fn capillary_face(&self, cl: usize, cr: usize, s_l: f64, s_r: f64) -> f64 {
        let s_bar = 0.5 * (s_l + s_r);
        let dist = self.mesh.centre_distance(cl);
        let d = if self.coeffs[cl].region == self.coeffs[cr].region {
            self.d_cap_at(cl, s_bar)
        } else {
            harmonic_face(
                self.d_cap_at(cl, s_bar),
                0.5 * self.mesh.dx[cl],
                self.d_cap_at(cr, s_bar),
                0.5 * self.mesh.dx[cr],
            )
        };
        capillary_flux(d, s_l, s_r, dist)
    }

    fn gas_face(&self, cl: usize, cr: usize, s_l: f64, s_r: f64, d_bin: f64) -> f64 {
        harmonic_face(
            self.d_eff(cl, s_l, d_bin),
            0.5 * self.mesh.dx[cl],
            self.d_eff(cr, s_r, d_bin),
            0.5 * self.mesh.dx[cr],
        )
    }

    /// Electrode quantities that the voltage depends on.
    pub fn electrode_state(&self, st: &StateVector) -> Result<ElectrodeState> {
        let l = &self.layout;
        let mesh = &self.mesh;
        let t = self.temperature();
        let rt = GAS_CONSTANT * t;
        let acl = mesh.range(Region::Acl);
        let ccl = mesh.range(Region::Ccl);
        let mem = mesh.range(Region::Mem);
        let c_h2_acl = weighted_mean(acl.clone().map(|c| (st.c_h2[c], mesh.dx[c])));
        let c_o2_ccl = weighted_mean(ccl.clone().map(|c| (st.c_o2[c - l.ccl_start], mesh.dx[c])));
        let lam = |c: usize| st.lambda[c - l.acl_start].max(0.0);
        let lambda_ccl = weighted_mean(ccl.clone().map(|c| (lam(c), mesh.dx[c])));
        let s_ccl = weighted_mean(ccl.clone().map(|c| (st.s[l.n_anode + c - l.ccl_start], mesh.dx[c])));
        let lambda_mem = weighted_mean(mem.clone().map(|c| (lam(c), mesh.dx[c])));
        let n_e = l.n_anode + l.n_cathode;
        let p_agc = (st.c_v[n_e] + st.c_h2[l.n_anode]) * rt;
        let p_cgc = (st.c_v[n_e + 1] + st.c_o2[l.n_cathode] + st.c_n2) * rt;
        let mem_pairs: Vec<_> = mem.clone().map(|c| (lam(c), mesh.dx[c])).collect();
        let ccl_pairs: Vec<_> = ccl.clone().map(|c| (lam(c), mesh.dx[c])).collect();
        let pc_ccl = &self.cell.materials.ccl;
        let r_p = polarization::proton_resistance(
            &mem_pairs,
            &ccl_pairs,
            self.cell.materials.eps_mc / pc_ccl.tau,
            t,
            &self.cell.properties,
        )?;
        let mc = &self.cell.materials.membrane;
        let (k_h2, k_o2) = if self.cell.voltage.crossover_enabled {
            (
                properties::crossover_permeability(CrossoverGas::H2, lambda_mem, self.lambda_liquid, t, mc),
                properties::crossover_permeability(CrossoverGas::O2, lambda_mem, self.lambda_liquid, t, mc),
            )
        } else {
            (0.0, 0.0)
        };
        Ok(ElectrodeState {
            c_h2_acl,
            c_o2_ccl,
            lambda_ccl,
            s_ccl,
            p_agc,
            p_cgc,
            r_p,
            k_h2,
            k_o2,
        })
    }

    /// Voltage breakdown at state `st` and current density `i_fc`.
    pub fn voltage(&self, st: &StateVector, i_fc: f64) -> Result<VoltageReport> {
        let es = self.electrode_state(st)?;
        polarization::cell_voltage(&es, i_fc, self.temperature(), &self.cell)
    }

    /// Evaluates voltage, fluxes and sources at state `st` and current
    /// density `i_fc`.
    pub fn evaluate(&self, st: &StateVector, i_fc: f64) -> Result<Evaluation> {
        self.evaluate_with(st, i_fc, OutletLaw::Floored)
    }

    /// [`Self::evaluate`] under an explicit outlet law.
    pub fn evaluate_with(&self, st: &StateVector, i_fc: f64, law: OutletLaw) -> Result<Evaluation> {
        let es = self.electrode_state(st)?;
        let voltage = polarization::cell_voltage(&es, i_fc, self.temperature(), &self.cell)?;
        let ic = InternalCurrents {
            i_n: voltage.i_n,
            i_sc: voltage.i_sc,
            i_co_h2: voltage.i_co_h2,
            i_co_o2: voltage.i_co_o2,
        };
        let fields = self.fields(st, i_fc, &es, &ic, law)?;
        Ok(Evaluation {
            fields,
            voltage,
            electrode: es,
        })
    }

    /// Fluxes and sources at state `st` given the electrode quantities and
    /// internal currents.
    pub fn fields(
        &self,
        st: &StateVector,
        i_fc: f64,
        es: &ElectrodeState,
        ic: &InternalCurrents,
        law: OutletLaw,
    ) -> Result<FluxSourceFields> {
        let l = &self.layout;
        let mesh = &self.mesh;
        let cell = &self.cell;
        let t = self.temperature();
        let h_cl = cell.geometry.h_cl;
        let h_mem = cell.geometry.h_mem;
        let na = l.n_anode;
        let nc = l.n_cathode;
        let ni = l.n_ion;
        let n_e = na + nc;
        let pcfg = &cell.properties;
        let mc = &cell.materials.membrane;
        let clamp_s = |s: f64| s.clamp(0.0, 1.0);

        // Ionomer water.
        let mut d_lam = Vec::with_capacity(ni);
        for k in 0..ni {
            d_lam.push(properties::d_lambda(st.lambda[k].max(0.0), t, pcfg)?);
        }
        let mut j_mem = vec![0.0; ni + 1];
        for k in 0..ni - 1 {
            let c = l.acl_start + k;
            j_mem[k + 1] = membrane_water_flux(
                i_fc,
                st.lambda[k],
                st.lambda[k + 1],
                d_lam[k],
                d_lam[k + 1],
                mesh.centre_distance(c),
                self.site_density,
            );
        }

        let co = CrossoverSources::new(es, t, h_cl, h_mem);
        let mut s_sorp = vec![0.0; ni];
        let mut s_prod = vec![0.0; ni];
        let prod_acl = production_source_acl(&co);
        let prod_ccl = production_source_ccl(i_fc, ic.i_sc, h_cl, &co);
        for k in 0..ni {
            let c = l.acl_start + k;
            let region = self.coeffs[c].region;
            if !region.is_cl() {
                continue;
            }
            let j = if region == Region::Acl { c } else { na + c - l.ccl_start };
            let a_w = properties::water_activity(st.c_v[j].max(0.0), clamp_s(st.s[j]), t, pcfg)?;
            let lam_eq = properties::lambda_eq(a_w, t, pcfg)?;
            let lam = st.lambda[k];
            let gamma = blended_sorption_rate(lam.max(0.0), lam_eq, t, h_cl, mc);
            s_sorp[k] = sorption_source(gamma, self.site_density, lam, lam_eq);
            s_prod[k] = if region == Region::Acl { prod_acl } else { prod_ccl };
        }

        // Electrode cells as (mesh cell, electrode index) per side.
        let anode: Vec<usize> = (0..na).map(|j| l.anode_cell(j)).collect();
        let cathode: Vec<usize> = (0..nc).map(|j| l.cathode_cell(j)).collect();
        let s_a = &st.s[..na];
        let s_c = &st.s[na..n_e];
        let cv_a = &st.c_v[..na];
        let cv_c = &st.c_v[na..n_e];
        let c_v_agc = st.c_v[n_e];
        let c_v_cgc = st.c_v[n_e + 1];
        let c_h2 = &st.c_h2[..na];
        let c_h2_agc = st.c_h2[na];
        let c_o2 = &st.c_o2[..nc];
        let c_o2_cgc = st.c_o2[nc];

        // Liquid.
        let mut j_cap_anode = vec![0.0; na + 1];
        let mut j_cap_cathode = vec![0.0; nc + 1];
        for f in 1..na {
            j_cap_anode[f] =
                self.capillary_face(anode[f - 1], anode[f], clamp_s(s_a[f - 1]), clamp_s(s_a[f]));
        }
        for f in 1..nc {
            j_cap_cathode[f] =
                self.capillary_face(cathode[f - 1], cathode[f], clamp_s(s_c[f - 1]), clamp_s(s_c[f]));
        }
        {
            let c0 = anode[0];
            let s0 = clamp_s(s_a[0]);
            j_cap_anode[0] = capillary_flux(self.d_cap_at(c0, 0.5 * s0), 0.0, s0, 0.5 * mesh.dx[c0]);
            let cn = cathode[nc - 1];
            let sn = clamp_s(s_c[nc - 1]);
            j_cap_cathode[nc] = capillary_flux(self.d_cap_at(cn, 0.5 * sn), sn, 0.0, 0.5 * mesh.dx[cn]);
        }

        // Gas diffusion.
        let mut j_v_anode = vec![0.0; na + 1];
        let mut j_h2 = vec![0.0; na + 1];
        for f in 1..na {
            let d = self.gas_face(anode[f - 1], anode[f], s_a[f - 1], s_a[f], self.d_anode);
            let dist = mesh.centre_distance(anode[f - 1]);
            j_v_anode[f] = gas_diffusive_flux(d, cv_a[f - 1], cv_a[f], dist);
            j_h2[f] = gas_diffusive_flux(d, c_h2[f - 1], c_h2[f], dist);
        }
        let mut j_v_cathode = vec![0.0; nc + 1];
        let mut j_o2 = vec![0.0; nc + 1];
        for f in 1..nc {
            let d = self.gas_face(cathode[f - 1], cathode[f], s_c[f - 1], s_c[f], self.d_cathode);
            let dist = mesh.centre_distance(cathode[f - 1]);
            j_v_cathode[f] = gas_diffusive_flux(d, cv_c[f - 1], cv_c[f], dist);
            j_o2[f] = gas_diffusive_flux(d, c_o2[f - 1], c_o2[f], dist);
        }
        {
            let c0 = anode[0];
            let d0 = self.d_eff(c0, s_a[0], self.d_anode);
            let half = 0.5 * mesh.dx[c0];
            j_v_anode[0] = codi_flux_into_layer(self.h_anode, d0, half, c_v_agc, cv_a[0]);
            j_h2[0] = codi_flux_into_layer(self.h_anode, d0, half, c_h2_agc, c_h2[0]);
            let cn = cathode[nc - 1];
            let dn = self.d_eff(cn, s_c[nc - 1], self.d_cathode);
            let half = 0.5 * mesh.dx[cn];
            j_v_cathode[nc] = -codi_flux_into_layer(self.h_cathode, dn, half, c_v_cgc, cv_c[nc - 1]);
            j_o2[nc] = -codi_flux_into_layer(self.h_cathode, dn, half, c_o2_cgc, c_o2[nc - 1]);
        }

        // Phase change.
        let g = &cell.electro;
        let mut s_vl = vec![0.0; n_e];
        for j in 0..n_e {
            let (c, gas_total) = if j < na {
                (anode[j], st.c_v[j].max(0.0) + c_h2[j].max(0.0))
            } else {
                let jc = j - na;
                (
                    cathode[jc],
                    st.c_v[j].max(0.0) + c_o2[jc].max(0.0) + st.c_n2.max(0.0),
                )
            };
            let c_v = st.c_v[j].max(0.0);
            let x_v = if gas_total > 0.0 { c_v / gas_total } else { 0.0 };
            s_vl[j] = phase_change_source(
                c_v,
                self.c_sat,
                clamp_s(st.s[j]),
                self.porosity(c),
                x_v,
                t,
                self.rho_l,
                g.gamma_cond,
                g.gamma_evap,
            );
        }

        // Reactant consumption.
        let cons_h2 = consumption_h2(i_fc, ic.i_sc, h_cl, &co);
        let cons_o2 = consumption_o2(i_fc, ic.i_sc, h_cl, &co);
        let s_h2_cons: Vec<f64> = anode
            .iter()
            .map(|&c| if self.coeffs[c].region == Region::Acl { cons_h2 } else { 0.0 })
            .collect();
        let s_o2_cons: Vec<f64> = cathode
            .iter()
            .map(|&c| if self.coeffs[c].region == Region::Ccl { cons_o2 } else { 0.0 })
            .collect();

        let boundary = boundary_flows_with(
            &ChannelState {
                c_v_agc,
                c_h2_agc,
                c_v_cgc,
                c_o2_cgc,
                c_n2: st.c_n2,
            },
            i_fc,
            ic.i_n,
            cell,
            law,
        )?;

        Ok(FluxSourceFields {
            j_mem,
            j_cap_anode,
            j_cap_cathode,
            j_v_anode,
            j_v_cathode,
            j_h2,
            j_o2,
            s_sorp,
            s_prod,
            s_vl,
            s_h2_cons,
            s_o2_cons,
            boundary,
            crossover: co,
        })
    }
}
