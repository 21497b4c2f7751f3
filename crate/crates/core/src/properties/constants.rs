//! Empirical and physical constants used by the correlations.
//!
//! Every numeric coefficient of a correlation lives here and nowhere else.
//! Correlations in the sibling modules refer to these names.

/// Faraday constant, C·mol⁻¹.
pub const FARADAY: f64 = 96485.0;
/// Universal gas constant, J·mol⁻¹·K⁻¹.
pub const GAS_CONSTANT: f64 = 8.314;
/// Molar mass of water, kg·mol⁻¹.
pub const M_H2O: f64 = 0.018;
/// Molar mass of hydrogen, kg·mol⁻¹.
pub const M_H2: f64 = 2.0e-3;
/// Molar mass of oxygen, kg·mol⁻¹.
pub const M_O2: f64 = 32.0e-3;
/// Molar mass of nitrogen, kg·mol⁻¹.
pub const M_N2: f64 = 28.0e-3;
/// Reference liquid water density used for the partial molar volume of water in the ionomer, kg·m⁻³.
pub const RHO_H2O_REF: f64 = 1000.0;
/// Standard atmosphere, Pa.
pub const P_ATM: f64 = 101325.0;
/// Zero of the Celsius scale, K.
pub const T_ZERO_CELSIUS: f64 = 273.15;

/// Saturated vapour pressure: polynomial exponent coefficients in °C.
pub const PSAT_COEFFS: [f64; 4] = [-2.1794, 0.02953, -9.1837e-5, 1.4454e-7];
/// Saturated vapour pressure: validity interval, K.
pub const PSAT_T_RANGE: (f64, f64) = (223.0, 373.0);

/// Liquid water density numerator coefficients (°C powers 0 to 5), kg·m⁻³.
pub const RHO_L_NUM: [f64; 6] = [
    999.83952,
    16.945176,
    -7.9870401e-3,
    -46.170461e-6,
    105.56302e-9,
    -280.54253e-12,
];
/// Liquid water density denominator coefficient, °C⁻¹.
pub const RHO_L_DEN: f64 = 16.879850e-3;
/// Liquid water correlations: validity interval, K.
pub const LIQUID_T_RANGE: (f64, f64) = (273.0, 373.0);
/// Liquid water dynamic viscosity prefactor, Pa·s.
pub const MU_L_PREFACTOR: f64 = 2.414e-5;
/// Liquid water dynamic viscosity exponent numerator, K.
pub const MU_L_B: f64 = 247.8;
/// Liquid water dynamic viscosity exponent offset, K.
pub const MU_L_C: f64 = 140.0;

/// Surface tension prefactor, N·m⁻¹.
pub const SIGMA_A: f64 = 0.2358;
/// Surface tension reduced-temperature exponent.
pub const SIGMA_MU: f64 = 1.256;
/// Surface tension linear correction coefficient.
pub const SIGMA_B: f64 = 0.625;
/// Critical temperature of water used by the surface tension law, K.
pub const T_CRITICAL: f64 = 647.15;

/// Equilibrium water content (Hinatsu-based) vapour cubic, powers 0 to 3.
pub const LAMBDA_EQ_HINATSU_CUBIC: [f64; 4] = [0.300, 10.8, -16.0, 14.1];
/// Equilibrium water content (Hinatsu-based) value at unit activity.
pub const LAMBDA_EQ_HINATSU_SAT: f64 = 9.2;
/// Equilibrium water content (Hinatsu-based) liquid rise amplitude.
pub const LAMBDA_EQ_HINATSU_RISE: f64 = 8.6;
/// Equilibrium water content (Springer-based) vapour cubic, powers 0 to 3.
pub const LAMBDA_EQ_SPRINGER_CUBIC: [f64; 4] = [0.043, 17.81, -39.85, 36.0];
/// Equilibrium water content (Springer-based) value at unit activity.
pub const LAMBDA_EQ_SPRINGER_SAT: f64 = 14.0;
/// Equilibrium water content (Springer-based) liquid rise amplitude.
pub const LAMBDA_EQ_SPRINGER_RISE: f64 = 2.8;
/// Steepness of the tanh blend between vapour and liquid branches.
pub const LAMBDA_EQ_BLEND: f64 = 100.0;
/// Liquid-equilibrated water content, coefficients of the °C quadratic.
pub const LAMBDA_LIQ_COEFFS: [f64; 3] = [10.0, 1.84e-2, 9.90e-4];
/// Water content above which the diffusion and sorption laws extrapolate.
pub const LAMBDA_WARN: f64 = 17.0;

/// Dissolved water diffusivity (Kulikovsky): prefactor, m²·s⁻¹.
pub const D_KULIKOVSKY_PREFACTOR: f64 = 4.1e-10;
/// Dissolved water diffusivity (Kulikovsky): reference water content.
pub const D_KULIKOVSKY_LREF: f64 = 25.0;
/// Dissolved water diffusivity (Kulikovsky): power.
pub const D_KULIKOVSKY_POWER: f64 = 0.15;
/// Dissolved water diffusivity (Kulikovsky): tanh centre.
pub const D_KULIKOVSKY_CENTRE: f64 = 2.5;
/// Dissolved water diffusivity (Kulikovsky): tanh width.
pub const D_KULIKOVSKY_WIDTH: f64 = 1.4;
/// Dissolved water diffusivity (Springer): dry plateau, m²·s⁻¹.
pub const D_SPRINGER_DRY: f64 = 2.692661843e-10;
/// Dissolved water diffusivity (Springer): scale, m²·s⁻¹.
pub const D_SPRINGER_SCALE: f64 = 1.0e-10;
/// Dissolved water diffusivity (Springer): activation temperature, K.
pub const D_SPRINGER_ACT: f64 = 2416.0;
/// Dissolved water diffusivity (Springer): reference temperature, K.
pub const D_SPRINGER_TREF: f64 = 303.0;
/// Dissolved water diffusivity (Springer): node values at λ = 2, 3, 4.
pub const D_SPRINGER_NODES: [f64; 3] = [0.87, 2.95, 1.642454];
/// Dissolved water diffusivity (Springer): cubic above λ = 4.
pub const D_SPRINGER_CUBIC: [f64; 4] = [2.563, -0.33, 0.0264, -0.000671];
/// Dissolved water diffusivity (Motupally): low-content prefactor, m²·s⁻¹.
pub const D_MOTUPALLY_LOW: f64 = 3.1e-7;
/// Dissolved water diffusivity (Motupally): low-content exponent.
pub const D_MOTUPALLY_LOW_EXP: f64 = 0.28;
/// Dissolved water diffusivity (Motupally): high-content prefactor, m²·s⁻¹.
pub const D_MOTUPALLY_HIGH: f64 = 4.17e-8;
/// Dissolved water diffusivity (Motupally): high-content amplitude.
pub const D_MOTUPALLY_HIGH_AMP: f64 = 161.0;
/// Dissolved water diffusivity (Motupally): activation temperature, K.
pub const D_MOTUPALLY_ACT: f64 = 2436.0;
/// Dissolved water diffusivity (Motupally): branch switch.
pub const D_MOTUPALLY_SWITCH: f64 = 3.0;

/// Sorption: absorption rate coefficient, m·s⁻¹.
pub const GAMMA_ABSORPTION: f64 = 1.14e-5;
/// Sorption: desorption rate coefficient, m·s⁻¹.
pub const GAMMA_DESORPTION: f64 = 4.59e-5;
/// Sorption: activation temperature, K.
pub const SORPTION_ACT: f64 = 2416.0;
/// Sorption: reference temperature, K.
pub const SORPTION_TREF: f64 = 303.0;

/// Electro-osmotic drag coefficient at the fully hydrated state.
pub const EOD_SAT: f64 = 2.5;
/// Water content at which the drag coefficient saturates.
pub const EOD_LAMBDA: f64 = 22.0;

/// Proton conductivity (Springer): slope, S·m⁻¹.
pub const SIGMA_M_SLOPE: f64 = 0.5139;
/// Proton conductivity (Springer): intercept, S·m⁻¹.
pub const SIGMA_M_INTERCEPT: f64 = 0.326;
/// Proton conductivity (Springer): activation temperature, K.
pub const SIGMA_M_ACT: f64 = 1268.0;
/// Proton conductivity (Springer): reference temperature, K.
pub const SIGMA_M_TREF: f64 = 303.15;
/// Proton conductivity (Ramousse): cubic coefficients of λ³, λ², λ.
pub const SIGMA_RAMOUSSE_CUBIC: [f64; 3] = [0.0013, 0.0298, 0.2658];
/// Proton conductivity (Ramousse): activation parameters (amplitude, decay, floor) in K.
pub const SIGMA_RAMOUSSE_ACT: [f64; 3] = [2640.0, 0.6, 1183.0];
/// Proton conductivity (Ramousse): reference temperature, K.
pub const SIGMA_RAMOUSSE_TREF: f64 = 353.0;

/// Crossover permeability reference temperature, K.
pub const CROSSOVER_TREF: f64 = 303.15;
/// Hydrogen permeability, vapour branch: (base, volume-fraction slope), mol·m⁻¹·s⁻¹·Pa⁻¹.
pub const K_H2_VAPOUR: (f64, f64) = (0.29e-14, 2.2e-14);
/// Hydrogen permeability, liquid branch, mol·m⁻¹·s⁻¹·Pa⁻¹.
pub const K_H2_LIQUID: f64 = 1.8e-14;
/// Hydrogen permeability activation energies (vapour, liquid), J·mol⁻¹.
pub const K_H2_ACT: (f64, f64) = (2.1e4, 1.8e4);
/// Oxygen permeability, vapour branch: (base, volume-fraction slope), mol·m⁻¹·s⁻¹·Pa⁻¹.
pub const K_O2_VAPOUR: (f64, f64) = (0.11e-14, 1.9e-14);
/// Oxygen permeability, liquid branch, mol·m⁻¹·s⁻¹·Pa⁻¹.
pub const K_O2_LIQUID: f64 = 1.2e-14;
/// Oxygen permeability activation energies (vapour, liquid), J·mol⁻¹.
pub const K_O2_ACT: (f64, f64) = (2.2e4, 2.0e4);
/// Tolerance deciding that the membrane is liquid-equilibrated.
pub const LIQUID_BRANCH_TOL: f64 = 1e-9;

/// Binary diffusivity of water vapour in hydrogen at the reference point, m²·s⁻¹.
pub const D_H2O_H2_REF: f64 = 1.644e-4;
/// Binary diffusivity of water vapour in oxygen at the reference point, m²·s⁻¹.
pub const D_H2O_O2_REF: f64 = 3.242e-5;
/// Reference temperature of the binary diffusivities, K.
pub const D_BINARY_TREF: f64 = 333.0;
/// Temperature exponent of the binary diffusivities.
pub const D_BINARY_EXP: f64 = 2.334;

/// Sherwood correlation: (log slope, intercept).
pub const SHERWOOD: (f64, f64) = (0.9247, 2.3787);
/// Sherwood correlation: admissible channel aspect ratios.
pub const SHERWOOD_RANGE: (f64, f64) = (0.2, 10.0);

/// Leverett function cubic coefficients of s, s², s³.
pub const LEVERETT: [f64; 3] = [1.417, -2.12, 1.263];

/// Open-circuit reference potential temperature slope, V·K⁻¹.
pub const U_EQ_T_SLOPE: f64 = 8.5e-4;
/// Open-circuit reference potential reference temperature, K.
pub const U_EQ_TREF: f64 = 298.15;
/// Reference temperature of the exchange current density activation, K.
pub const I0_TREF: f64 = 353.15;
/// Reference temperature of the proton-activity equilibrium constant, K.
pub const KE_TREF: f64 = 298.0;
/// Flooding factor exponent on the catalyst layer pore fraction.
pub const FLOODING_EXP: f64 = 1.5;

/// Short-circuit resistance prefactor, Ω·m².
pub const R_SC_PREFACTOR: f64 = 1.79e-2;
/// Short-circuit resistance anode pressure exponent.
pub const R_SC_ANODE_EXP: f64 = -9.63;
/// Short-circuit resistance cathode pressure exponent.
pub const R_SC_CATHODE_EXP: f64 = 0.38;
/// Weight of the cathode catalyst layer in the proton resistance.
pub const R_P_CCL_WEIGHT: f64 = 1.0 / 3.0;
/// Floor on the internal current density inside the overpotential logarithm, A·m⁻².
pub const I_N_FLOOR: f64 = 1e-3;

/// Percolation threshold default.
pub const EPS_P_DEFAULT: f64 = 0.11;
/// Pore structure coefficient default.
pub const TAU_DEFAULT: f64 = 1.5;
/// Permeability fit exponent for through-plane transport.
pub const ALPHA_THROUGH_PLANE: f64 = 0.785;
/// Permeability fit exponent for in-plane transport.
pub const ALPHA_IN_PLANE: f64 = 0.521;
/// Fibre radius default, m.
pub const FIBER_RADIUS_DEFAULT: f64 = 4.6e-6;
/// Compression fit values for permeability at porosity 0.6: (in-plane, through-plane).
pub const BETA1_EPS_060: (f64, f64) = (-5.07, -3.60);
/// Compression fit values for permeability at porosity 0.73: (in-plane, through-plane).
pub const BETA1_EPS_073: (f64, f64) = (-3.51, -2.60);
/// Compression fit values for diffusivity at porosity 0.6: (in-plane, through-plane).
pub const BETA2_EPS_060: (f64, f64) = (-2.05, -1.59);
/// Compression fit values for diffusivity at porosity 0.73: (in-plane, through-plane).
pub const BETA2_EPS_073: (f64, f64) = (-1.04, -0.90);
