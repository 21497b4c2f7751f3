//! Uniform-per-layer finite-volume mesh across the layer stack.

use serde::{Deserialize, Serialize};

use super::CellDefinition;
use crate::error::{Error, Result};

/// Layer holding a finite-volume cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Anode gas diffusion layer.
    Agdl,
    /// Anode catalyst layer.
    Acl,
    /// Membrane.
    Mem,
    /// Cathode catalyst layer.
    Ccl,
    /// Cathode gas diffusion layer.
    Cgdl,
}

impl Region {
    /// Short lowercase label.
    pub fn label(self) -> &'static str {
        match self {
            Region::Agdl => "agdl",
            Region::Acl => "acl",
            Region::Mem => "mem",
            Region::Ccl => "ccl",
            Region::Cgdl => "cgdl",
        }
    }

    /// True for catalyst layers.
    pub fn is_cl(self) -> bool {
        matches!(self, Region::Acl | Region::Ccl)
    }

    /// True for diffusion layers.
    pub fn is_gdl(self) -> bool {
        matches!(self, Region::Agdl | Region::Cgdl)
    }
}

/// Number of cells per layer, shared by the anode and cathode sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshResolution {
    /// Cells in each diffusion layer.
    pub gdl: usize,
    /// Cells in each catalyst layer.
    pub cl: usize,
    /// Cells in the membrane.
    pub mem: usize,
}

impl Default for MeshResolution {
    fn default() -> Self {
        Self {
            gdl: 10,
            cl: 5,
            mem: 5,
        }
    }
}

impl MeshResolution {
    /// Resolution with every count multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Self {
        Self {
            gdl: self.gdl * factor,
            cl: self.cl * factor,
            mem: self.mem * factor,
        }
    }
}

/// Finite-volume mesh of the interior layers; the two channels are lumped.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    /// Resolution the mesh was built from.
    pub resolution: MeshResolution,
    /// Face positions, m, starting at the anode channel interface.
    pub faces: Vec<f64>,
    /// Cell widths, m.
    pub dx: Vec<f64>,
    /// Cell centres, m.
    pub centres: Vec<f64>,
    /// Layer of each cell.
    pub regions: Vec<Region>,
}

impl Mesh1D {
    /// Number of interior cells.
    pub fn n_cells(&self) -> usize {
        self.dx.len()
    }

    /// Half-open index range of the cells of `region`.
    pub fn range(&self, region: Region) -> std::ops::Range<usize> {
        let r = &self.resolution;
        let bounds = [r.gdl, r.cl, r.mem, r.cl, r.gdl];
        let idx = match region {
            Region::Agdl => 0,
            Region::Acl => 1,
            Region::Mem => 2,
            Region::Ccl => 3,
            Region::Cgdl => 4,
        };
        let start: usize = bounds[..idx].iter().sum();
        start..start + bounds[idx]
    }

    /// Distance between the centres of cells `i` and `i + 1`, m.
    pub fn centre_distance(&self, i: usize) -> f64 {
        0.5 * (self.dx[i] + self.dx[i + 1])
    }
}

/// Builds the mesh for `cell` at the given resolution.
pub fn build_mesh(cell: &CellDefinition, resolution: MeshResolution) -> Result<Mesh1D> {
    let g = &cell.geometry;
    if resolution.gdl < 2 || resolution.cl < 2 {
        return Err(Error::Validation(
            "mesh.gdl >= 2 and mesh.cl >= 2".to_string(),
        ));
    }
    if resolution.mem < 3 {
        return Err(Error::Validation("mesh.mem >= 3".to_string()));
    }
    let layers = [
        (Region::Agdl, g.h_gdl, resolution.gdl),
        (Region::Acl, g.h_cl, resolution.cl),
        (Region::Mem, g.h_mem, resolution.mem),
        (Region::Ccl, g.h_cl, resolution.cl),
        (Region::Cgdl, g.h_gdl, resolution.gdl),
    ];
    let mut faces = vec![0.0];
    let mut dx = Vec::new();
    let mut centres = Vec::new();
    let mut regions = Vec::new();
    let mut origin = 0.0;
    for (region, thickness, n) in layers {
        if !(thickness > 0.0) {
            return Err(Error::Validation(format!(
                "geometry thickness of {} > 0",
                region.label()
            )));
        }
        let w = thickness / n as f64;
        for j in 0..n {
            let left = origin + w * j as f64;
            let right = if j + 1 == n {
                origin + thickness
            } else {
                origin + w * (j + 1) as f64
            };
            dx.push(right - left);
            centres.push(0.5 * (left + right));
            faces.push(right);
            regions.push(region);
        }
        origin += thickness;
    }
    Ok(Mesh1D {
        resolution,
        faces,
        dx,
        centres,
        regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_mesh_counts() {
        let cell = CellDefinition::default();
        let m = build_mesh(&cell, MeshResolution::default()).unwrap();
        assert_eq!(m.n_cells(), 35);
        assert_eq!(m.range(Region::Mem), 15..20);
        let g = cell.geometry;
        assert_relative_eq!(
            *m.faces.last().unwrap(),
            2.0 * g.h_gdl + 2.0 * g.h_cl + g.h_mem,
            max_relative = 1e-14
        );
        for i in m.range(Region::Mem) {
            assert_relative_eq!(m.dx[i], 5e-6, max_relative = 1e-9);
        }
        assert!(m.faces.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn too_few_cells_rejected() {
        let cell = CellDefinition::default();
        let r = MeshResolution { gdl: 10, cl: 5, mem: 2 };
        assert!(build_mesh(&cell, r).is_err());
        let r = MeshResolution { gdl: 1, cl: 5, mem: 5 };
        assert!(build_mesh(&cell, r).is_err());
    }
}
