//! Semi-discrete system: conserved storage per unknown, storage rates from
//! the transport fields and the time derivative of the state.

use nalgebra::DMatrix;

use crate::cell::{CellDefinition, Field, Mesh1D, StateLayout, StateVector};
use crate::error::{Error, Result};
use crate::properties::constants::{FARADAY, M_H2O};
use crate::transport::{Evaluation, OutletLaw, TransportModel};

/// Conserved totals per unit active area, mol·m⁻².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Inventory {
    /// Water in the ionomer, liquid and vapour phases.
    pub water: f64,
    /// Hydrogen.
    pub h2: f64,
    /// Oxygen.
    pub o2: f64,
}

/// Rates of the conserved totals per unit active area, mol·m⁻²·s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InventoryFlows {
    /// Water entering through the channel inlets.
    pub water_in: f64,
    /// Water leaving through the channel outlets and as liquid at the channel faces.
    pub water_out: f64,
    /// Water produced in the catalyst layers.
    pub water_produced: f64,
    /// Hydrogen entering.
    pub h2_in: f64,
    /// Hydrogen leaving.
    pub h2_out: f64,
    /// Hydrogen consumed.
    pub h2_consumed: f64,
    /// Oxygen entering.
    pub o2_in: f64,
    /// Oxygen leaving.
    pub o2_out: f64,
    /// Oxygen consumed.
    pub o2_consumed: f64,
}

/// The discretised cell as a system `d q(x)/dt = r(x)`.
#[derive(Debug, Clone)]
pub struct System {
    /// Transport model with the precomputed coefficients.
    pub model: TransportModel,
    /// Storage coefficient of each unknown at zero saturation.
    base_capacity: Vec<f64>,
    /// Saturation index coupled to each gas unknown in an electrode cell.
    sat_index: Vec<Option<usize>>,
    /// Floor of the weighted norms for each unknown.
    pub floors: Vec<f64>,
}

impl System {
    /// Builds the system for `cell` on `mesh`.
    pub fn new(cell: &CellDefinition, mesh: &Mesh1D) -> Result<Self> {
        let model = TransportModel::new(cell, mesh)?;
        let l = model.layout.clone();
        let dx = &mesh.dx;
        let mut base_capacity = vec![0.0; l.len];
        let mut sat_index = vec![None; l.len];
        let mut floors = vec![0.0; l.len];
        for k in 0..l.n_ion {
            let c = l.acl_start + k;
            base_capacity[l.lambda(c)] = model.ionomer_capacity(c) * dx[c];
        }
        let depth = cell.geometry.channel_depth();
        for j in 0..l.n_anode {
            let c = l.anode_cell(j);
            let eps_dx = model.porosity(c) * dx[c];
            base_capacity[l.s_anode(j)] = model.rho_l * eps_dx;
            base_capacity[l.cv_anode(j)] = eps_dx;
            base_capacity[l.h2(j)] = eps_dx;
            sat_index[l.cv_anode(j)] = Some(l.s_anode(j));
            sat_index[l.h2(j)] = Some(l.s_anode(j));
        }
        for j in 0..l.n_cathode {
            let c = l.cathode_cell(j);
            let eps_dx = model.porosity(c) * dx[c];
            base_capacity[l.s_cathode(j)] = model.rho_l * eps_dx;
            base_capacity[l.cv_cathode(j)] = eps_dx;
            base_capacity[l.o2(j)] = eps_dx;
            sat_index[l.cv_cathode(j)] = Some(l.s_cathode(j));
            sat_index[l.o2(j)] = Some(l.s_cathode(j));
        }
        base_capacity[l.cv_agc()] = depth;
        base_capacity[l.cv_cgc()] = depth;
        base_capacity[l.h2_agc()] = depth;
        base_capacity[l.o2_cgc()] = depth;
        base_capacity[l.n2] = model.nitrogen_depth();
        for (i, f) in floors.iter_mut().enumerate() {
            *f = match l.field(i) {
                Field::Lambda => 1.0,
                Field::Saturation => 1e-3,
                _ => 1.0,
            };
        }
        Ok(Self {
            model,
            base_capacity,
            sat_index,
            floors,
        })
    }

    /// Index map of the unknowns.
    pub fn layout(&self) -> &StateLayout {
        &self.model.layout
    }

    /// Number of unknowns.
    pub fn len(&self) -> usize {
        self.base_capacity.len()
    }

    /// True when the system has no unknowns.
    pub fn is_empty(&self) -> bool {
        self.base_capacity.is_empty()
    }

    /// Conserved storage per unknown, per unit active area.
    pub fn storage(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| match self.sat_index[i] {
                Some(si) => self.base_capacity[i] * (1.0 - x[si]) * x[i],
                None => self.base_capacity[i] * x[i],
            })
            .collect()
    }

    /// Jacobian of the storage with respect to the unknowns.
    pub fn storage_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            match self.sat_index[i] {
                Some(si) => {
                    m[(i, i)] = self.base_capacity[i] * (1.0 - x[si]);
                    m[(i, si)] = -self.base_capacity[i] * x[i];
                }
                None => m[(i, i)] = self.base_capacity[i],
            }
        }
        m
    }

    /// Diagonal storage scale used to normalise residual rows.
    pub fn row_scale(&self) -> &[f64] {
        &self.base_capacity
    }

    /// Storage rates `r(x)` together with the evaluation behind them.
    pub fn rates(&self, x: &[f64], i_fc: f64) -> Result<(Vec<f64>, Evaluation)> {
        self.rates_with(x, i_fc, OutletLaw::Floored)
    }

    fn rates_with(&self, x: &[f64], i_fc: f64, law: OutletLaw) -> Result<(Vec<f64>, Evaluation)> {
        let l = &self.model.layout;
        let st = StateVector::unpack(x, l)?;
        let ev = self.model.evaluate_with(&st, i_fc, law)?;
        let r = self.assemble(&ev)?;
        Ok((r, ev))
    }

    fn assemble(&self, ev: &Evaluation) -> Result<Vec<f64>> {
        let l = &self.model.layout;
        let dx = &self.model.mesh.dx;
        let f = &ev.fields;
        let g = &self.model.cell.geometry;
        let section_ratio = g.channel_section() / g.a_act;
        let na = l.n_anode;
        let nc = l.n_cathode;
        let mut r = vec![0.0; l.len];
        for k in 0..l.n_ion {
            let c = l.acl_start + k;
            r[l.lambda(c)] = -(f.j_mem[k + 1] - f.j_mem[k]) + dx[c] * (f.s_sorp[k] + f.s_prod[k]);
        }
        let sorp_at = |c: usize| -> f64 {
            let k = c as isize - l.acl_start as isize;
            if k >= 0 && (k as usize) < l.n_ion {
                f.s_sorp[k as usize]
            } else {
                0.0
            }
        };
        for j in 0..na {
            let c = l.anode_cell(j);
            let vl = f.s_vl[j];
            r[l.s_anode(j)] = -(f.j_cap_anode[j + 1] - f.j_cap_anode[j]) + dx[c] * M_H2O * vl;
            r[l.cv_anode(j)] = -(f.j_v_anode[j + 1] - f.j_v_anode[j]) - dx[c] * (sorp_at(c) + vl);
            r[l.h2(j)] = -(f.j_h2[j + 1] - f.j_h2[j]) + dx[c] * f.s_h2_cons[j];
        }
        for j in 0..nc {
            let c = l.cathode_cell(j);
            let vl = f.s_vl[na + j];
            r[l.s_cathode(j)] = -(f.j_cap_cathode[j + 1] - f.j_cap_cathode[j]) + dx[c] * M_H2O * vl;
            r[l.cv_cathode(j)] =
                -(f.j_v_cathode[j + 1] - f.j_v_cathode[j]) - dx[c] * (sorp_at(c) + vl);
            r[l.o2(j)] = -(f.j_o2[j + 1] - f.j_o2[j]) + dx[c] * f.s_o2_cons[j];
        }
        let b = &f.boundary;
        r[l.cv_agc()] = section_ratio * (b.v_in_agc - b.v_out_agc) - f.j_v_anode[0];
        r[l.h2_agc()] = section_ratio * (b.h2_in - b.h2_out) - f.j_h2[0];
        r[l.cv_cgc()] = section_ratio * (b.v_in_cgc - b.v_out_cgc) + f.j_v_cathode[nc];
        r[l.o2_cgc()] = section_ratio * (b.o2_in - b.o2_out) + f.j_o2[nc];
        r[l.n2] = section_ratio * (b.n2_in - b.n2_out);
        if let Some(i) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite rate at {}",
                l.label(i)
            )));
        }
        Ok(r)
    }

    /// Time derivative of the state, `dx/dt`.
    pub fn rhs(&self, x: &[f64], i_fc: f64) -> Result<Vec<f64>> {
        let (r, _) = self.rates(x, i_fc)?;
        let mut dxdt = vec![0.0; x.len()];
        for i in 0..x.len() {
            if self.sat_index[i].is_none() {
                dxdt[i] = r[i] / self.base_capacity[i];
            }
        }
        for i in 0..x.len() {
            if let Some(si) = self.sat_index[i] {
                let open = 1.0 - x[si];
                dxdt[i] = (r[i] / self.base_capacity[i] + x[i] * dxdt[si]) / open;
            }
        }
        if let Some(i) = dxdt.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite derivative at {}",
                self.layout().label(i)
            )));
        }
        Ok(dxdt)
    }

    /// Forward-difference Jacobian of the storage rates, taken with the
    /// unfloored outlet law.
    pub fn rates_jacobian(&self, x: &[f64], i_fc: f64) -> Result<DMatrix<f64>> {
        let n = x.len();
        let (r0, _) = self.rates_with(x, i_fc, OutletLaw::Linear)?;
        let mut jac = DMatrix::zeros(n, n);
        let mut xp = x.to_vec();
        let sqrt_eps = f64::EPSILON.sqrt();
        for j in 0..n {
            let h = sqrt_eps * x[j].abs().max(self.floors[j]);
            xp[j] = x[j] + h;
            let h = xp[j] - x[j];
            let (rp, _) = self.rates_with(&xp, i_fc, OutletLaw::Linear)?;
            for i in 0..n {
                jac[(i, j)] = (rp[i] - r0[i]) / h;
            }
            xp[j] = x[j];
        }
        Ok(jac)
    }

    /// Weighted maximum norm `max |v_i| / (floor_i + |x_i|)`.
    pub fn weighted_norm(&self, v: &[f64], x: &[f64]) -> f64 {
        v.iter()
            .zip(x)
            .zip(&self.floors)
            .map(|((vi, xi), fl)| vi.abs() / (fl + xi.abs()))
            .fold(0.0, f64::max)
    }

    /// Weighted root-mean-square norm, the smooth counterpart of
    /// [`Self::weighted_norm`] used as a line-search merit.
    pub fn weighted_rms(&self, v: &[f64], x: &[f64]) -> f64 {
        let sum: f64 = v
            .iter()
            .zip(x)
            .zip(&self.floors)
            .map(|((vi, xi), fl)| (vi / (fl + xi.abs())).powi(2))
            .sum();
        (sum / v.len().max(1) as f64).sqrt()
    }

    /// Scaled steady residual `max |r_i| / F_ref`, with saturation rows
    /// converted from mass to moles.
    pub fn steady_residual(&self, r: &[f64], i_fc: f64) -> f64 {
        let f_ref = i_fc.max(1000.0) / (2.0 * FARADAY);
        let l = self.layout();
        r.iter()
            .enumerate()
            .map(|(i, v)| {
                let v = if l.field(i) == Field::Saturation { v / M_H2O } else { *v };
                v.abs() / f_ref
            })
            .fold(0.0, f64::max)
    }

    /// Conserved totals of state `x`.
    pub fn inventory(&self, x: &[f64]) -> Inventory {
        let l = self.layout();
        let q = self.storage(x);
        let mut inv = Inventory::default();
        for (i, qi) in q.iter().enumerate() {
            match l.field(i) {
                Field::Lambda | Field::Vapour => inv.water += qi,
                Field::Saturation => inv.water += qi / M_H2O,
                Field::Hydrogen => inv.h2 += qi,
                Field::Oxygen => inv.o2 += qi,
                Field::Nitrogen => {}
            }
        }
        inv
    }

    /// Rates of the conserved totals at an evaluation.
    pub fn inventory_flows(&self, ev: &Evaluation) -> InventoryFlows {
        let l = self.layout();
        let dx = &self.model.mesh.dx;
        let g = &self.model.cell.geometry;
        let ratio = g.channel_section() / g.a_act;
        let f = &ev.fields;
        let b = &f.boundary;
        let nc = l.n_cathode;
        let liquid_out = (-f.j_cap_anode[0] + f.j_cap_cathode[nc]) / M_H2O;
        let produced: f64 = (0..l.n_ion)
            .map(|k| dx[l.acl_start + k] * f.s_prod[k])
            .sum();
        let h2_consumed: f64 = (0..l.n_anode)
            .map(|j| -dx[l.anode_cell(j)] * f.s_h2_cons[j])
            .sum();
        let o2_consumed: f64 = (0..nc)
            .map(|j| -dx[l.cathode_cell(j)] * f.s_o2_cons[j])
            .sum();
        InventoryFlows {
            water_in: ratio * (b.v_in_agc + b.v_in_cgc),
            water_out: ratio * (b.v_out_agc + b.v_out_cgc) + liquid_out,
            water_produced: produced,
            h2_in: ratio * b.h2_in,
            h2_out: ratio * b.h2_out,
            h2_consumed,
            o2_in: ratio * b.o2_in,
            o2_out: ratio * b.o2_out,
            o2_consumed,
        }
    }

    /// Clips `x` to admissible values and returns the added amounts.
    pub fn clip(&self, x: &mut [f64], s_clip: f64) -> Inventory {
        let before = self.inventory(x);
        let l = self.layout();
        for i in 0..x.len() {
            x[i] = match l.field(i) {
                Field::Saturation => x[i].clamp(0.0, 1.0 - s_clip),
                _ => x[i].max(0.0),
            };
        }
        let after = self.inventory(x);
        Inventory {
            water: after.water - before.water,
            h2: after.h2 - before.h2,
            o2: after.o2 - before.o2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{build_mesh, initial_state, InitialCondition, MeshResolution};
    use approx::assert_relative_eq;

    fn system() -> (System, Vec<f64>) {
        let cell = CellDefinition::default();
        let mesh = build_mesh(&cell, MeshResolution::default()).unwrap();
        let sys = System::new(&cell, &mesh).unwrap();
        let st = initial_state(&cell, &mesh, InitialCondition::default()).unwrap();
        let x = st.pack(sys.layout()).unwrap();
        (sys, x)
    }

    #[test]
    fn rhs_matches_storage_rates() {
        let (sys, mut x) = system();
        let l = sys.layout().clone();
        x[l.s_cathode(2)] = 0.2;
        x[l.cv_cathode(2)] *= 1.3;
        let dxdt = sys.rhs(&x, 5e3).unwrap();
        let (r, _) = sys.rates(&x, 5e3).unwrap();
        let m = sys.storage_jacobian(&x);
        let v = nalgebra::DVector::from_vec(dxdt);
        let back = &m * &v;
        for i in 0..x.len() {
            assert_relative_eq!(back[i], r[i], epsilon = 1e-12 * (1.0 + r[i].abs()), max_relative = 1e-9);
        }
    }

    #[test]
    fn isolated_condensation_rate() {
        let (sys, mut x) = system();
        let l = sys.layout().clone();
        let j = 7;
        let c = l.cathode_cell(j);
        x[l.cv_cathode(j)] = sys.model.c_sat * 1.1;
        let (r, ev) = sys.rates(&x, 0.0).unwrap();
        let s_vl = ev.fields.s_vl[l.n_anode + j];
        assert!(s_vl > 0.0);
        let eps = sys.model.porosity(c);
        let rho = sys.model.rho_l;
        // Uniform zero saturation keeps the capillary fluxes at zero.
        let dsdt = r[l.s_cathode(j)] / (rho * eps * sys.model.mesh.dx[c]);
        assert_relative_eq!(dsdt, M_H2O * s_vl / (rho * eps), max_relative = 1e-12);
    }

    #[test]
    fn nitrogen_rate_is_net_boundary_flow() {
        let (sys, x) = system();
        let l = sys.layout().clone();
        let (r, ev) = sys.rates(&x, 1e4).unwrap();
        let b = ev.fields.boundary;
        let g = sys.model.cell.geometry;
        assert_relative_eq!(
            r[l.n2],
            (b.n2_in - b.n2_out) * g.channel_section() / g.a_act,
            max_relative = 1e-14
        );
    }

    #[test]
    fn water_rates_telescope_to_boundary_flows() {
        let (sys, mut x) = system();
        let l = sys.layout().clone();
        for j in 0..l.n_cathode {
            x[l.s_cathode(j)] = 0.05 + 0.01 * j as f64;
            x[l.cv_cathode(j)] = sys.model.c_sat * (0.9 + 0.02 * j as f64);
        }
        for k in 0..l.n_ion {
            x[l.lambda_off + k] += 0.2 * k as f64;
        }
        let (r, ev) = sys.rates(&x, 8e3).unwrap();
        let mut total = 0.0;
        for (i, ri) in r.iter().enumerate() {
            match l.field(i) {
                Field::Lambda | Field::Vapour => total += ri,
                Field::Saturation => total += ri / M_H2O,
                _ => {}
            }
        }
        let fl = sys.inventory_flows(&ev);
        let expected = fl.water_in - fl.water_out + fl.water_produced;
        assert_relative_eq!(total, expected, epsilon = 1e-12 * fl.water_produced);
        let h2: f64 = (0..x.len()).filter(|&i| l.field(i) == Field::Hydrogen).map(|i| r[i]).sum();
        assert_relative_eq!(h2, fl.h2_in - fl.h2_out - fl.h2_consumed, epsilon = 1e-12 * fl.h2_consumed);
    }
}
