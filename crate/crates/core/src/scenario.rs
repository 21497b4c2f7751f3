//! Scenario files, run orchestration and result serialization.
//!
//! A scenario is a TOML document whose tables override an all-defaults tree:
//! `[cell.geometry]`, `[cell.operating]`, `[mesh]`, `[solver]`, `[initial]`,
//! `[run]` and `[output]`. Tables carrying a `kind` key (the run and the
//! initial condition) replace their default instead of merging into it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::{self, CalibrationProblem, CalibrationSettings, ParameterSpec};
use crate::cell::{build_mesh, initial_state, CellDefinition, InitialCondition, MeshResolution, StateLayout};
use crate::error::{Error, Result};
use crate::polarization::VoltageReport;
use crate::properties::{self, Direction, GasPair, LayerKind, PorousConstants, PropertyConfig};
use crate::solver::{CurrentProfile, Integrator, LedgerRow, PolarizationRow, SolverConfig, TransientResult};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "PEMFC_OUT_DIR";

/// File name of the resolved scenario echo.
pub const RESOLVED_FILE: &str = "resolved_scenario.toml";

/// Closed-form correlation tabulated by a props-table run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlation {
    /// Saturation pressure against temperature.
    SaturationPressure,
    /// Saturation vapour concentration against temperature.
    SaturationConcentration,
    /// Surface tension of water against temperature.
    SurfaceTension,
    /// Liquid water density against temperature.
    LiquidDensity,
    /// Dynamic and kinematic liquid viscosity against temperature.
    LiquidViscosity,
    /// Binary vapour diffusivities against temperature.
    BinaryDiffusivity,
    /// Equilibrium water content isotherms against water activity.
    LambdaEq,
    /// Dissolved water diffusivity laws against water content.
    DLambda,
    /// Proton conductivity laws against water content.
    ProtonConductivity,
    /// Leverett function against saturation.
    LeverettJ,
    /// Capillary diffusivity of the default layers against saturation.
    CapillaryDiffusivity,
    /// Effective diffusivity factors against saturation.
    DiffusivityFactor,
    /// Intrinsic permeability of a compressed fibrous layer against porosity.
    Permeability,
}

impl Correlation {
    /// Every correlation, in a fixed order.
    pub const ALL: [Correlation; 13] = [
        Correlation::SaturationPressure,
        Correlation::SaturationConcentration,
        Correlation::SurfaceTension,
        Correlation::LiquidDensity,
        Correlation::LiquidViscosity,
        Correlation::BinaryDiffusivity,
        Correlation::LambdaEq,
        Correlation::DLambda,
        Correlation::ProtonConductivity,
        Correlation::LeverettJ,
        Correlation::CapillaryDiffusivity,
        Correlation::DiffusivityFactor,
        Correlation::Permeability,
    ];

    /// Name used on the command line and in file names.
    pub fn name(self) -> &'static str {
        match self {
            Correlation::SaturationPressure => "saturation_pressure",
            Correlation::SaturationConcentration => "saturation_concentration",
            Correlation::SurfaceTension => "surface_tension",
            Correlation::LiquidDensity => "liquid_density",
            Correlation::LiquidViscosity => "liquid_viscosity",
            Correlation::BinaryDiffusivity => "binary_diffusivity",
            Correlation::LambdaEq => "lambda_eq",
            Correlation::DLambda => "d_lambda",
            Correlation::ProtonConductivity => "proton_conductivity",
            Correlation::LeverettJ => "leverett_j",
            Correlation::CapillaryDiffusivity => "capillary_diffusivity",
            Correlation::DiffusivityFactor => "diffusivity_factor",
            Correlation::Permeability => "permeability",
        }
    }
}

impl std::str::FromStr for Correlation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Correlation::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Correlation::ALL.iter().map(|c| c.name()).collect();
            Error::Validation(format!(
                "correlation `{s}` is one of {}",
                names.join(", ")
            ))
        })
    }
}

fn default_true() -> bool {
    true
}

fn default_temperature() -> f64 {
    353.15
}

fn default_pressure() -> f64 {
    101_325.0
}

/// What a scenario computes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunKind {
    /// Time integration under a piecewise-constant current.
    Transient {
        /// `[start time s, current density A·m⁻²]` segments.
        profile: Vec<(f64, f64)>,
        /// End time, s.
        t_end: f64,
        /// Start from the steady state at the first segment's current.
        #[serde(default = "default_true")]
        steady_start: bool,
    },
    /// Single steady state.
    Steady {
        /// Current density, A·m⁻².
        i_fc: f64,
    },
    /// Steady polarization curve.
    Sweep {
        /// Strictly increasing current densities, A·m⁻².
        currents: Vec<f64>,
    },
    /// Parameter fit to a polarization CSV.
    Fit {
        /// CSV with columns `i_A_per_m2`, `U_V` and optional `weight`,
        /// relative to the scenario file.
        data: PathBuf,
        /// Free parameters.
        free: Vec<ParameterSpec>,
        /// Optimiser settings.
        #[serde(default)]
        settings: CalibrationSettings,
    },
    /// Table of one correlation over a range.
    PropsTable {
        /// Correlation to tabulate.
        correlation: Correlation,
        /// First abscissa.
        from: f64,
        /// Last abscissa.
        to: f64,
        /// Number of rows.
        points: usize,
        /// Temperature of correlations that are not tabulated against it, K.
        #[serde(default = "default_temperature")]
        temperature: f64,
        /// Pressure of the binary diffusivities, Pa.
        #[serde(default = "default_pressure")]
        pressure: f64,
    },
}

impl Default for RunKind {
    fn default() -> Self {
        RunKind::Steady { i_fc: 1e4 }
    }
}

impl RunKind {
    /// Name of the run kind.
    pub fn name(&self) -> &'static str {
        match self {
            RunKind::Transient { .. } => "transient",
            RunKind::Steady { .. } => "steady",
            RunKind::Sweep { .. } => "sweep",
            RunKind::Fit { .. } => "fit",
            RunKind::PropsTable { .. } => "props_table",
        }
    }
}

/// Output settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Time between transient output rows, s.
    pub interval: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            interval: 1.0,
        }
    }
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Cell definition.
    pub cell: CellDefinition,
    /// Cells per layer.
    pub mesh: MeshResolution,
    /// Solver settings.
    pub solver: SolverConfig,
    /// Initial state of transients and first guess of steady solves.
    pub initial: InitialCondition,
    /// What to compute.
    pub run: RunKind,
    /// Output settings.
    pub output: OutputConfig,
}

fn merge(base: &mut toml::Table, overrides: toml::Table) {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if !o.contains_key("kind") => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

impl Scenario {
    /// Resolves a scenario from TOML text; relative paths are taken against
    /// `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let overrides: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Validation(format!("scenario syntax: {e}")))?;
        let mut tree = toml::Table::try_from(Scenario::default())
            .map_err(|e| Error::Validation(format!("default scenario: {e}")))?;
        merge(&mut tree, overrides);
        let mut scenario: Scenario = serde_path_to_error::deserialize(toml::Value::Table(tree))
            .map_err(|e| {
                let path = e.path().to_string();
                Error::Validation(format!("{path}: {}", e.into_inner()))
            })?;
        if let RunKind::Fit { data, .. } = &mut scenario.run {
            if data.is_relative() {
                *data = base_dir.join(&*data);
            }
        }
        if let Some(dir) = &mut scenario.output.dir {
            if dir.is_relative() {
                *dir = base_dir.join(&*dir);
            }
        }
        scenario.validate()?;
        Ok(scenario)
    }

    /// Reads and resolves a scenario file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::from_toml_str(&text, base)
    }

    /// Resolved scenario as TOML.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Validation(format!("scenario echo: {e}")))
    }

    /// Checks every constraint of the scenario.
    pub fn validate(&self) -> Result<()> {
        self.cell.validate()?;
        self.solver.validate()?;
        let m = &self.mesh;
        if m.gdl == 0 || m.cl == 0 || m.mem == 0 {
            return Err(Error::Validation("mesh.gdl, mesh.cl and mesh.mem >= 1".to_string()));
        }
        if let InitialCondition::Equilibrated { phi } = self.initial {
            if !(phi > 0.0 && phi <= 1.0) {
                return Err(Error::Validation("initial.phi in (0, 1]".to_string()));
            }
        }
        if !(self.output.interval > 0.0 && self.output.interval.is_finite()) {
            return Err(Error::Validation("output.interval > 0".to_string()));
        }
        match &self.run {
            RunKind::Transient { profile, t_end, .. } => {
                CurrentProfile {
                    segments: profile.clone(),
                }
                .validate()?;
                if !(*t_end > 0.0 && t_end.is_finite()) {
                    return Err(Error::Validation("run.t_end > 0".to_string()));
                }
            }
            RunKind::Steady { i_fc } => {
                if !(*i_fc >= 0.0 && i_fc.is_finite()) {
                    return Err(Error::Validation("run.i_fc >= 0".to_string()));
                }
            }
            RunKind::Sweep { currents } => {
                if currents.is_empty() {
                    return Err(Error::Validation("run.currents not empty".to_string()));
                }
                if currents.iter().any(|i| !(*i >= 0.0 && i.is_finite())) {
                    return Err(Error::Validation("run.currents >= 0".to_string()));
                }
                if currents.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Validation(
                        "run.currents strictly increasing".to_string(),
                    ));
                }
            }
            RunKind::Fit { data, free, settings } => {
                if !data.is_file() {
                    return Err(Error::Validation(format!(
                        "run.data: file {} exists",
                        data.display()
                    )));
                }
                if free.is_empty() {
                    return Err(Error::Validation("run.free not empty".to_string()));
                }
                if !(settings.max_iter > 0 && settings.fd_step > 0.0 && settings.penalty > 0.0) {
                    return Err(Error::Validation(
                        "run.settings: max_iter, fd_step and penalty > 0".to_string(),
                    ));
                }
            }
            RunKind::PropsTable { from, to, points, temperature, pressure, .. } => {
                table_abscissae(*from, *to, *points)?;
                if !(*temperature > 0.0 && *pressure > 0.0) {
                    return Err(Error::Validation(
                        "run.temperature > 0 and run.pressure > 0".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Column names.
    pub header: Vec<String>,
    /// Rows of values, one per abscissa.
    pub rows: Vec<Vec<f64>>,
}

fn table_abscissae(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && from < to && points >= 2) {
        return Err(Error::Validation(
            "props table: finite from < to and points >= 2".to_string(),
        ));
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points)
        .map(|k| if k + 1 == points { to } else { from + step * k as f64 })
        .collect())
}

/// Tabulates `correlation` over `points` evenly spaced abscissae.
pub fn props_table(correlation: Correlation, from: f64, to: f64, points: usize, temperature: f64, pressure: f64) -> Result<Table> {
    let xs = table_abscissae(from, to, points)?;
    let cell = CellDefinition::default();
    let with = |f: fn(&mut PropertyConfig)| {
        let mut cfg = PropertyConfig::default();
        f(&mut cfg);
        cfg
    };
    let header: &[&str] = match correlation {
        Correlation::SaturationPressure => &["T_K", "p_sat_Pa"],
        Correlation::SaturationConcentration => &["T_K", "c_sat_mol_per_m3"],
        Correlation::SurfaceTension => &["T_K", "sigma_N_per_m"],
        Correlation::LiquidDensity => &["T_K", "rho_kg_per_m3"],
        Correlation::LiquidViscosity => &["T_K", "mu_Pa_s", "nu_m2_per_s"],
        Correlation::BinaryDiffusivity => &["T_K", "D_H2O_H2_m2_per_s", "D_H2O_O2_m2_per_s"],
        Correlation::LambdaEq => &["a_w", "hinatsu_bao", "springer_bao"],
        Correlation::DLambda => &["lambda", "kulikovsky_m2_per_s", "springer_m2_per_s", "motupally_m2_per_s"],
        Correlation::ProtonConductivity => &["lambda", "springer_S_per_m", "ramousse_S_per_m"],
        Correlation::LeverettJ => &["s", "J", "dJ_ds"],
        Correlation::CapillaryDiffusivity => &["s", "gdl_kg_per_m_s", "cl_kg_per_m_s"],
        Correlation::DiffusivityFactor => &["s", "gdl", "cl"],
        Correlation::Permeability => &["eps", "through_plane_m2", "in_plane_m2"],
    };
    let gdl = cell.materials.cgdl;
    let cl = cell.materials.ccl;
    let eps_c = gdl.eps_c;
    let theta_c = gdl.theta_c;
    let mut rows = Vec::with_capacity(xs.len());
    for x in xs {
        let values: Vec<f64> = match correlation {
            Correlation::SaturationPressure => vec![properties::p_sat(x)?],
            Correlation::SaturationConcentration => vec![properties::c_sat(x)?],
            Correlation::SurfaceTension => vec![properties::surface_tension(x)?],
            Correlation::LiquidDensity => vec![properties::liquid_water_density(x)?],
            Correlation::LiquidViscosity => vec![
                properties::liquid_viscosity_dynamic(x)?,
                properties::liquid_viscosity_kinematic(x)?,
            ],
            Correlation::BinaryDiffusivity => vec![
                properties::binary_diffusivity(GasPair::H2oH2, x, pressure),
                properties::binary_diffusivity(GasPair::H2oO2, x, pressure),
            ],
            Correlation::LambdaEq => vec![
                properties::lambda_eq(x, temperature, &with(|c| c.lambda_eq_variant = properties::LambdaEqVariant::HinatsuBao))?,
                properties::lambda_eq(x, temperature, &with(|c| c.lambda_eq_variant = properties::LambdaEqVariant::SpringerBao))?,
            ],
            Correlation::DLambda => vec![
                properties::d_lambda(x, temperature, &with(|c| c.d_lambda_variant = properties::DiffusivityVariant::Kulikovsky))?,
                properties::d_lambda(x, temperature, &with(|c| c.d_lambda_variant = properties::DiffusivityVariant::Springer))?,
                properties::d_lambda(x, temperature, &with(|c| c.d_lambda_variant = properties::DiffusivityVariant::Motupally))?,
            ],
            Correlation::ProtonConductivity => vec![
                properties::proton_conductivity(x, temperature, &with(|c| c.conductivity_variant = properties::ConductivityVariant::Springer)),
                properties::proton_conductivity(x, temperature, &with(|c| c.conductivity_variant = properties::ConductivityVariant::Ramousse)),
            ],
            Correlation::LeverettJ => vec![properties::leverett_j(x), properties::leverett_j_prime(x)],
            Correlation::CapillaryDiffusivity => vec![
                properties::d_cap(x, &gdl, temperature)?,
                properties::d_cap(x, &cl, temperature)?,
            ],
            Correlation::DiffusivityFactor => vec![
                properties::effective_diffusivity_factor(x, LayerKind::DiffusionLayer, &gdl),
                properties::effective_diffusivity_factor(x, LayerKind::CatalystLayer, &cl),
            ],
            Correlation::Permeability => vec![
                properties::intrinsic_permeability_tsb(&PorousConstants::diffusion_layer(x, eps_c, Direction::ThroughPlane, theta_c))?,
                properties::intrinsic_permeability_tsb(&PorousConstants::diffusion_layer(x, eps_c, Direction::InPlane, theta_c))?,
            ],
        };
        let mut row = Vec::with_capacity(values.len() + 1);
        row.push(x);
        row.extend(values);
        rows.push(row);
    }
    Ok(Table {
        header: header.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io(format!("{}: {e}", path.display()))
}

/// Writes a numeric table as CSV.
pub fn write_table(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(&table.header).map_err(io_err(path))?;
    for row in &table.rows {
        w.serialize(row).map_err(io_err(path))?;
    }
    w.flush()?;
    Ok(())
}

const VOLTAGE_COLUMNS: [&str; 12] = [
    "i_A_per_m2",
    "U_V",
    "U_eq_V",
    "eta_c_V",
    "dV_ohmic_p_V",
    "dV_ohmic_e_V",
    "dV_conc_V",
    "i_n_A_per_m2",
    "i_sc_A_per_m2",
    "i_co_H2_A_per_m2",
    "i_co_O2_A_per_m2",
    "R_p_ohm_m2",
];

fn voltage_values(i_fc: f64, v: &VoltageReport) -> [f64; 12] {
    [
        i_fc,
        v.u_cell,
        v.u_eq,
        v.eta_c,
        v.dv_ohmic_p,
        v.dv_ohmic_e,
        v.dv_conc,
        v.i_n,
        v.i_sc,
        v.i_co_h2,
        v.i_co_o2,
        v.r_p,
    ]
}

/// Writes `timeseries.csv`: time, every state entry labelled
/// `field:region:index`, then the applied current and voltage breakdown.
pub fn write_timeseries(path: &Path, layout: &StateLayout, result: &TransientResult) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["t_s".to_string()];
    header.extend((0..layout.len).map(|k| layout.label(k)));
    header.extend(VOLTAGE_COLUMNS.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(io_err(path))?;
    for k in 0..result.times.len() {
        let mut row = vec![result.times[k]];
        row.extend(result.states[k].pack(layout)?);
        row.extend(voltage_values(result.currents[k], &result.voltages[k]));
        w.serialize(&row).map_err(io_err(path))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PolarizationRecord {
    #[serde(rename = "i_A_per_m2")]
    i: f64,
    #[serde(rename = "U_V")]
    u: f64,
    #[serde(rename = "U_eq_V")]
    u_eq: f64,
    #[serde(rename = "eta_c_V")]
    eta_c: f64,
    #[serde(rename = "R_p_ohm_m2")]
    r_p: f64,
    #[serde(rename = "i_n_A_per_m2")]
    i_n: f64,
    #[serde(rename = "dV_conc_V")]
    dv_conc: f64,
    feasible: bool,
}

/// Writes `polarization.csv` with one row per current; infeasible rows carry
/// empty-valued NaN fields and `feasible = false`.
pub fn write_polarization(path: &Path, rows: &[PolarizationRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        let nan = |v: f64| if r.feasible { v } else { f64::NAN };
        w.serialize(PolarizationRecord {
            i: r.i_fc,
            u: nan(r.voltage.u_cell),
            u_eq: nan(r.voltage.u_eq),
            eta_c: nan(r.voltage.eta_c),
            r_p: nan(r.voltage.r_p),
            i_n: nan(r.voltage.i_n),
            dv_conc: nan(r.voltage.dv_conc),
            feasible: r.feasible,
        })
        .map_err(io_err(path))?;
    }
    if rows.is_empty() {
        w.write_record(["i_A_per_m2", "U_V", "U_eq_V", "eta_c_V", "R_p_ohm_m2", "i_n_A_per_m2", "dV_conc_V", "feasible"])
            .map_err(io_err(path))?;
    }
    w.flush()?;
    Ok(())
}

const LEDGER_COLUMNS: [&str; 19] = [
    "t_s",
    "water_in",
    "water_out",
    "water_produced",
    "water_clipped",
    "water_stored_delta",
    "water_closure",
    "h2_in",
    "h2_out",
    "h2_consumed",
    "h2_clipped",
    "h2_stored_delta",
    "h2_closure",
    "o2_in",
    "o2_out",
    "o2_consumed",
    "o2_clipped",
    "o2_stored_delta",
    "o2_closure",
];

/// Writes `ledger.csv` with cumulative amounts in mol·m⁻² and the closure
/// `stored_delta − in + out − produced − clipped` of each species (consumed
/// species enter with the opposite sign of produced ones).
pub fn write_ledger(path: &Path, ledger: &[LedgerRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(LEDGER_COLUMNS).map_err(io_err(path))?;
    for r in ledger {
        let row = [
            r.t,
            r.water_in,
            r.water_out,
            r.water_produced,
            r.water_clipped,
            r.water_stored_delta,
            r.water_closure(),
            r.h2_in,
            r.h2_out,
            r.h2_consumed,
            r.h2_clipped,
            r.h2_stored_delta,
            r.h2_closure(),
            r.o2_in,
            r.o2_out,
            r.o2_consumed,
            r.o2_clipped,
            r.o2_stored_delta,
            r.o2_closure(),
        ];
        w.serialize(row).map_err(io_err(path))?;
    }
    w.flush()?;
    Ok(())
}

/// Files written by a run and a short human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Written files, in writing order.
    pub files: Vec<PathBuf>,
    /// Summary text.
    pub summary: String,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn row_from_steady(s: crate::solver::SteadyResult) -> PolarizationRow {
    PolarizationRow {
        i_fc: s.i_fc,
        voltage: s.voltage,
        feasible: true,
        residual: s.residual,
        pseudo_steps: s.pseudo_steps,
        message: String::new(),
    }
}

/// Runs `scenario`, writing every output file into `out_dir`.
pub fn execute(scenario: &Scenario, out_dir: &Path) -> Result<RunReport> {
    scenario.validate()?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let mut files = Vec::new();
    let mut summary = String::new();
    let resolved = out_dir.join(RESOLVED_FILE);
    write_text(&resolved, &scenario.to_toml_string()?)?;
    files.push(resolved);

    if let RunKind::PropsTable { correlation, from, to, points, temperature, pressure } = &scenario.run {
        let table = props_table(*correlation, *from, *to, *points, *temperature, *pressure)?;
        let path = out_dir.join(format!("props_{}.csv", correlation.name()));
        write_table(&path, &table)?;
        let _ = writeln!(summary, "{} rows of {}", table.rows.len(), correlation.name());
        files.push(path);
        return Ok(RunReport { files, summary });
    }

    let cell = &scenario.cell;
    let mesh = build_mesh(cell, scenario.mesh)?;
    let integ = Integrator::new(cell, &mesh, scenario.solver)?;
    let start = initial_state(cell, &mesh, scenario.initial)?;
    match &scenario.run {
        RunKind::Transient { profile, t_end, steady_start } => {
            let profile = CurrentProfile {
                segments: profile.clone(),
            };
            let state0 = if *steady_start {
                integ.solve_steady(&start, profile.at(0.0))?.state
            } else {
                start
            };
            let result = integ.run_transient(&state0, &profile, *t_end, scenario.output.interval)?;
            let ts = out_dir.join("timeseries.csv");
            write_timeseries(&ts, integ.system.layout(), &result)?;
            files.push(ts);
            let ledger = out_dir.join("ledger.csv");
            write_ledger(&ledger, &result.ledger)?;
            files.push(ledger);
            let last = result.ledger.last().copied().unwrap_or_default();
            let _ = writeln!(
                summary,
                "transient to t = {} s: {} steps ({} rejected), final U = {:.6} V",
                t_end,
                result.stats.steps,
                result.stats.rejected,
                result.voltages.last().map(|v| v.u_cell).unwrap_or(f64::NAN)
            );
            let _ = writeln!(
                summary,
                "relative ledger closure: water {:.3e}, H2 {:.3e}, O2 {:.3e}",
                last.water_relative_closure(),
                last.h2_relative_closure(),
                last.o2_relative_closure()
            );
        }
        RunKind::Steady { i_fc } => {
            let ocv = integ.solve_steady(&start, 0.0)?;
            let s = integ.solve_steady(&ocv.state, *i_fc)?;
            let layout = integ.system.layout();
            let x = s.state.pack(layout)?;
            let profile = out_dir.join("steady_state.csv");
            let mut w = csv_writer(&profile)?;
            w.write_record(["variable", "value"]).map_err(io_err(&profile))?;
            for (k, v) in x.iter().enumerate() {
                w.serialize((layout.label(k), v)).map_err(io_err(&profile))?;
            }
            w.flush()?;
            let _ = writeln!(summary, "steady U({i_fc} A/m2) = {:.6} V", s.voltage.u_cell);
            let pol = out_dir.join("polarization.csv");
            write_polarization(&pol, &[row_from_steady(s)])?;
            files.push(pol);
            files.push(profile);
        }
        RunKind::Sweep { currents } => {
            let warm = match integ.solve_steady(&start, 0.0) {
                Ok(s) => s.state,
                Err(_) => start,
            };
            let rows = integ.polarization_sweep(&warm, currents)?;
            let feasible = rows.iter().filter(|r| r.feasible).count();
            let _ = writeln!(summary, "sweep: {feasible} of {} points feasible", rows.len());
            for r in rows.iter().filter(|r| !r.feasible) {
                let _ = writeln!(summary, "  {} A/m2: {}", r.i_fc, r.message);
            }
            let pol = out_dir.join("polarization.csv");
            write_polarization(&pol, &rows)?;
            files.push(pol);
        }
        RunKind::Fit { data, free, settings } => {
            let points = calibration::read_polarization_data(data)?;
            let problem = CalibrationProblem {
                cell: *cell,
                resolution: scenario.mesh,
                solver: scenario.solver,
                data: points,
                free: free.clone(),
                settings: *settings,
            };
            let result = calibration::fit(&problem)?;
            files.extend(write_fit(out_dir, &result)?);
            summary.push_str(&fit_summary(&result));
        }
        RunKind::PropsTable { .. } => unreachable!("handled above"),
    }
    Ok(RunReport { files, summary })
}

fn fit_summary(result: &calibration::CalibrationResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "fit {}: {} ({} accepted iterations)",
        if result.converged { "converged" } else { "stopped" },
        result.reason,
        result.iterations.len().saturating_sub(1)
    );
    let _ = writeln!(s, "residual RMS {:.4e} V (initial {:.4e} V)", result.rms, result.initial_rms);
    for p in &result.parameters {
        let _ = writeln!(
            s,
            "  {:<22} {:>14.6e}  start {:>12.4e}  bounds [{:.3e}, {:.3e}]{}  sensitivity {:.3e}",
            p.parameter.name(),
            p.value,
            p.initial,
            p.lower,
            p.upper,
            if p.at_bound { "  AT BOUND" } else { "" },
            p.sensitivity
        );
    }
    s
}

fn write_fit(out_dir: &Path, result: &calibration::CalibrationResult) -> Result<Vec<PathBuf>> {
    let params = out_dir.join("fit_parameters.csv");
    let mut w = csv_writer(&params)?;
    w.write_record(["parameter", "value", "initial", "lower", "upper", "at_bound", "sensitivity"])
        .map_err(io_err(&params))?;
    for p in &result.parameters {
        w.serialize((p.parameter.name(), p.value, p.initial, p.lower, p.upper, p.at_bound, p.sensitivity))
            .map_err(io_err(&params))?;
    }
    w.flush()?;

    let points = out_dir.join("fit_points.csv");
    let mut w = csv_writer(&points)?;
    w.write_record(["i_A_per_m2", "U_meas_V", "U_model_V", "weight"])
        .map_err(io_err(&points))?;
    for (d, u) in result.data.iter().zip(&result.model_voltages) {
        w.serialize((d.i_fc, d.u_meas, u, d.weight)).map_err(io_err(&points))?;
    }
    w.flush()?;

    let trace = out_dir.join("fit_trace.csv");
    let mut w = csv_writer(&trace)?;
    let mut header = vec!["iteration".to_string(), "cost".to_string(), "rms_V".to_string(), "damping".to_string()];
    header.extend(result.parameters.iter().map(|p| p.parameter.name().to_string()));
    w.write_record(&header).map_err(io_err(&trace))?;
    for it in &result.iterations {
        let mut row = vec![it.iteration as f64, it.cost, it.rms, it.damping];
        row.extend(&it.values);
        w.serialize(row).map_err(io_err(&trace))?;
    }
    w.flush()?;

    let summary = out_dir.join("fit_summary.txt");
    write_text(&summary, &fit_summary(result))?;
    Ok(vec![params, points, trace, summary])
}

/// Output directory of a run: the explicit override, else the scenario's
/// `output.dir`, else `$PEMFC_OUT_DIR/<scenario stem>`, else
/// `pemfc_out/<scenario stem>`.
pub fn output_dir(explicit: Option<&Path>, scenario: &Scenario, scenario_path: &Path) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &scenario.output.dir {
        return p.clone();
    }
    let stem = scenario_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    let root = std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("pemfc_out"));
    root.join(stem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        Scenario::from_toml_str(text, Path::new("."))
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse("").unwrap(), Scenario::default());
    }

    #[test]
    fn negative_membrane_thickness_names_key() {
        let err = parse("[cell.geometry]\nH_mem = -1.0\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("geometry.H_mem > 0"), "{err}");
    }

    #[test]
    fn unknown_key_names_path() {
        let err = parse("[cell.operating]\nT_cell = 350.0\n").unwrap_err();
        assert!(err.to_string().contains("cell.operating"), "{err}");
        assert!(err.to_string().contains("T_cell"), "{err}");
    }

    #[test]
    fn partial_nested_override_keeps_siblings() {
        let s = parse("[cell.materials.cgdl]\neps = 0.6\n").unwrap();
        assert_eq!(s.cell.materials.cgdl.eps, 0.6);
        assert_eq!(s.cell.materials.cgdl.eps_c, CellDefinition::default().materials.cgdl.eps_c);
        assert_eq!(s.cell.materials.agdl, CellDefinition::default().materials.agdl);
    }

    #[test]
    fn override_is_echoed() {
        let s = parse("[cell.operating]\nPhi_c_des = 0.6\nS_c = 2.5\n").unwrap();
        let echo = s.to_toml_string().unwrap();
        assert!(echo.contains("Phi_c_des = 0.6"), "{echo}");
        assert!(echo.contains("S_c = 2.5"), "{echo}");
    }

    #[test]
    fn resolved_echo_parses_to_itself() {
        let s = parse(
            "[run]\nkind = \"transient\"\nprofile = [[0.0, 0.0], [1.0, 1e4]]\nt_end = 5.0\n\
             [initial]\nkind = \"DryStart\"\n[output]\ninterval = 0.5\n",
        )
        .unwrap();
        let echo = s.to_toml_string().unwrap();
        let again = parse(&echo).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_toml_string().unwrap(), echo);
    }

    #[test]
    fn run_table_replaces_default_kind() {
        let s = parse("[run]\nkind = \"sweep\"\ncurrents = [1e3, 2e3]\n").unwrap();
        assert_eq!(
            s.run,
            RunKind::Sweep {
                currents: vec![1e3, 2e3]
            }
        );
        assert!(parse("[run]\nkind = \"sweep\"\ncurrents = [2e3, 1e3]\n").is_err());
        assert!(parse("[run]\nkind = \"sweep\"\ncurrents = [1e3]\ni_fc = 3.0\n").is_err());
    }

    #[test]
    fn missing_fit_data_is_rejected() {
        let err = parse(
            "[run]\nkind = \"fit\"\ndata = \"no_such_file.csv\"\n\
             free = [{ parameter = \"contact_resistance\", lower = 0.0, upper = 1e-4 }]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("run.data"), "{err}");
    }

    #[test]
    fn correlation_names_round_trip() {
        for c in Correlation::ALL {
            assert_eq!(c.name().parse::<Correlation>().unwrap(), c);
        }
        assert!("nope".parse::<Correlation>().is_err());
    }

    #[test]
    fn props_table_has_requested_rows_and_end_points() {
        let t = props_table(Correlation::SaturationPressure, 300.0, 360.0, 7, 353.15, 101_325.0).unwrap();
        assert_eq!(t.rows.len(), 7);
        assert_eq!(t.rows[0][0], 300.0);
        assert_eq!(t.rows[6][0], 360.0);
        assert_eq!(t.header, vec!["T_K", "p_sat_Pa"]);
        for c in Correlation::ALL {
            let (from, to) = match c {
                Correlation::SaturationPressure
                | Correlation::SaturationConcentration
                | Correlation::SurfaceTension
                | Correlation::LiquidDensity
                | Correlation::LiquidViscosity
                | Correlation::BinaryDiffusivity => (300.0, 360.0),
                Correlation::LambdaEq => (0.0, 1.0),
                Correlation::DLambda | Correlation::ProtonConductivity => (0.5, 16.0),
                Correlation::LeverettJ | Correlation::CapillaryDiffusivity | Correlation::DiffusivityFactor => (0.0, 1.0),
                Correlation::Permeability => (0.5, 0.9),
            };
            let t = props_table(c, from, to, 5, 353.15, 101_325.0).unwrap();
            assert!(t.rows.iter().flatten().all(|v| v.is_finite()), "{}", c.name());
            assert!(t.rows.iter().all(|r| r.len() == t.header.len()));
        }
    }
}
