//! Invariants of the mesh and of the initial states.

use proptest::prelude::*;

use pemfc_core::cell::{build_mesh, initial_state, CellDefinition, InitialCondition, MeshResolution, Region};

const REGIONS: [Region; 5] = [Region::Agdl, Region::Acl, Region::Mem, Region::Ccl, Region::Cgdl];

fn resolution() -> impl Strategy<Value = MeshResolution> {
    (2usize..30, 2usize..15, 3usize..20).prop_map(|(gdl, cl, mem)| MeshResolution { gdl, cl, mem })
}

proptest! {
    #[test]
    fn faces_increase_and_layer_interfaces_are_faces(res in resolution(), h_mem in 5e-6f64..2e-4) {
        let mut cell = CellDefinition::default();
        cell.geometry.h_mem = h_mem;
        let mesh = build_mesh(&cell, res).unwrap();
        prop_assert_eq!(mesh.faces.len(), mesh.n_cells() + 1);
        prop_assert!(mesh.faces.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(mesh.dx.iter().all(|&d| d > 0.0));

        let g = cell.geometry;
        let thickness = [g.h_gdl, g.h_cl, g.h_mem, g.h_cl, g.h_gdl];
        let mut interface = 0.0;
        for (region, h) in REGIONS.iter().zip(thickness) {
            let range = mesh.range(*region);
            prop_assert!(mesh.regions[range.clone()].iter().all(|r| r == region));
            let width: f64 = mesh.dx[range.clone()].iter().sum();
            prop_assert!((width - h).abs() <= 1e-12 * h);
            interface += h;
            prop_assert!((mesh.faces[range.end] - mesh.faces[0] - interface).abs() <= 1e-12 * interface);
        }
    }

    #[test]
    fn initial_states_are_admissible(
        res in resolution(),
        phi in 0.01f64..=1.0,
        t_fc in 330.0f64..360.0,
        dry in any::<bool>(),
    ) {
        let mut cell = CellDefinition::default();
        cell.operating.t_fc = t_fc;
        let mesh = build_mesh(&cell, res).unwrap();
        let init = if dry { InitialCondition::DryStart } else { InitialCondition::Equilibrated { phi } };
        let st = initial_state(&cell, &mesh, init).unwrap();
        prop_assert!(st.check().is_ok());
        prop_assert!(st.lambda.iter().all(|&l| l > 0.0));
    }
}
