//! Invariants of the closed-form correlations.

use proptest::prelude::*;

use pemfc_core::properties::{
    self, constants as k, ConductivityVariant, Direction, DiffusivityVariant, GasPair, LambdaEqVariant,
    LayerKind, MembraneConstants, PorousConstants, PropertyConfig,
};

const T: f64 = 353.15;

fn layer_constants(layer: LayerKind, eps: f64, eps_c: f64, direction: Direction) -> PorousConstants {
    match layer {
        LayerKind::DiffusionLayer => PorousConstants::diffusion_layer(eps, eps_c, direction, 120.0),
        LayerKind::CatalystLayer => PorousConstants::catalyst_layer(eps, 120.0),
    }
}

#[test]
fn kulikovsky_diffusivity_is_non_decreasing() {
    let cfg = PropertyConfig {
        d_lambda_variant: DiffusivityVariant::Kulikovsky,
        ..PropertyConfig::default()
    };
    let mut prev = properties::d_lambda(0.0, T, &cfg).unwrap();
    for n in 1..=3000 {
        let d = properties::d_lambda(n as f64 * 0.01, T, &cfg).unwrap();
        assert!(d >= prev, "D decreases at lambda = {}", n as f64 * 0.01);
        prev = d;
    }
}

#[test]
fn hinatsu_isotherm_is_continuous_at_unit_activity() {
    let cfg = PropertyConfig {
        lambda_eq_variant: LambdaEqVariant::HinatsuBao,
        ..PropertyConfig::default()
    };
    let delta = 1e-6;
    let below = properties::lambda_eq(1.0 - delta, T, &cfg).unwrap();
    let above = properties::lambda_eq(1.0 + delta, T, &cfg).unwrap();
    assert!((above - below).abs() < 1e-3, "gap {}", (above - below).abs());
}

#[test]
fn effective_diffusivity_equals_free_value_only_for_open_dry_medium() {
    for layer in [LayerKind::DiffusionLayer, LayerKind::CatalystLayer] {
        for direction in [Direction::InPlane, Direction::ThroughPlane] {
            let pc = layer_constants(layer, 1.0, 0.0, direction);
            assert_eq!(properties::effective_diffusivity(3e-5, 0.0, layer, &pc), 3e-5);
        }
    }
}

#[test]
fn springer_conductivity_keeps_the_dry_floor() {
    let cfg = PropertyConfig {
        conductivity_variant: ConductivityVariant::Springer,
        ..PropertyConfig::default()
    };
    for t in [303.15, 333.15, 353.15, 363.15] {
        let floor = (k::SIGMA_M_SLOPE - k::SIGMA_M_INTERCEPT) * (k::SIGMA_M_ACT * (1.0 / k::SIGMA_M_TREF - 1.0 / t)).exp();
        for n in 0..=3000 {
            let sigma = properties::proton_conductivity(n as f64 * 0.01, t, &cfg);
            assert!(sigma >= floor && sigma > 0.0, "sigma {sigma} at lambda {}", n as f64 * 0.01);
        }
    }
}

#[test]
fn saturation_pressure_increases_over_its_domain() {
    let mut prev = properties::p_sat(223.0).unwrap();
    for n in 1..=1500 {
        let p = properties::p_sat(223.0 + n as f64 * 0.1).unwrap();
        assert!(p > prev);
        prev = p;
    }
}

#[test]
fn surface_tension_decreases_over_its_domain() {
    let mut prev = properties::surface_tension(273.16).unwrap();
    for n in 1..3739 {
        let s = properties::surface_tension(273.16 + n as f64 * 0.1).unwrap();
        assert!(s < prev, "not decreasing at {} K", 273.16 + n as f64 * 0.1);
        prev = s;
    }
}

#[test]
fn liquid_density_decreases_above_four_celsius() {
    let mut prev = properties::liquid_water_density(277.2).unwrap();
    for n in 1..=958 {
        let rho = properties::liquid_water_density(277.2 + n as f64 * 0.1).unwrap();
        assert!(rho < prev);
        prev = rho;
    }
}

fn correlation_bits(lambda: f64, s: f64, t: f64) -> Vec<u64> {
    let cfg = PropertyConfig::default();
    let mc = MembraneConstants::default();
    let pc = PorousConstants::diffusion_layer(0.6, 0.1, Direction::ThroughPlane, 120.0);
    [
        properties::p_sat(t).unwrap(),
        properties::c_sat(t).unwrap(),
        properties::surface_tension(t).unwrap(),
        properties::liquid_water_density(t).unwrap(),
        properties::liquid_viscosity_kinematic(t).unwrap(),
        properties::binary_diffusivity(GasPair::H2oO2, t, 1.5e5),
        properties::lambda_eq(s * 3.0, t, &cfg).unwrap(),
        properties::d_lambda(lambda, t, &cfg).unwrap(),
        properties::proton_conductivity(lambda, t, &cfg),
        properties::sorption_rate(lambda, 10.0, t, 1e-5, &mc),
        properties::leverett_j(s),
        properties::d_cap(s, &pc, t).unwrap(),
        properties::effective_diffusivity(3e-5, s, LayerKind::DiffusionLayer, &pc),
        properties::intrinsic_permeability_tsb(&pc).unwrap(),
    ]
    .iter()
    .map(|v| v.to_bits())
    .collect()
}

#[test]
fn correlations_agree_bitwise_across_threads() {
    let reference = correlation_bits(7.3, 0.21, 345.0);
    let handles: Vec<_> = (0..4)
        .map(|_| std::thread::spawn(|| correlation_bits(7.3, 0.21, 345.0)))
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), reference);
    }
}

fn any_layer() -> impl Strategy<Value = LayerKind> {
    prop_oneof![Just(LayerKind::DiffusionLayer), Just(LayerKind::CatalystLayer)]
}

fn any_direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::InPlane), Just(Direction::ThroughPlane)]
}

proptest! {
    #[test]
    fn effective_diffusivity_never_exceeds_free_value(
        d_ij in 1e-6f64..1e-3,
        s in 0.0f64..=1.0,
        eps in 0.2f64..1.0,
        eps_c in 0.0f64..=0.5,
        layer in any_layer(),
        direction in any_direction(),
    ) {
        let pc = layer_constants(layer, eps, eps_c, direction);
        let d = properties::effective_diffusivity(d_ij, s, layer, &pc);
        prop_assert!(d >= 0.0);
        prop_assert!(d < d_ij);
    }

    #[test]
    fn sorption_rate_vanishes_only_for_dry_ionomer(
        lambda in 0.0f64..30.0,
        lambda_eq in 0.0f64..20.0,
        t in 300.0f64..370.0,
        h_cl in 1e-6f64..2e-5,
    ) {
        let mc = MembraneConstants::default();
        let rate = properties::sorption_rate(lambda, lambda_eq, t, h_cl, &mc);
        prop_assert!(rate >= 0.0);
        prop_assert_eq!(rate == 0.0, lambda == 0.0);
        prop_assert_eq!(properties::sorption_rate(0.0, lambda_eq, t, h_cl, &mc), 0.0);
    }

    #[test]
    fn correlations_are_pure(
        lambda in 0.0f64..25.0,
        s in 0.0f64..1.0,
        t in 300.0f64..370.0,
    ) {
        prop_assert_eq!(correlation_bits(lambda, s, t), correlation_bits(lambda, s, t));
    }
}
