//! Identification of the kinetic and contact parameters from measured
//! polarization data by bounded Levenberg-Marquardt over steady states.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cell::{
    build_mesh, initial_state, CellDefinition, InitialCondition, Mesh1D, MeshResolution, StateVector,
};
use crate::error::{Error, Result};
use crate::polarization::OverpotentialMode;
use crate::solver::{Integrator, SolverConfig};

/// Parameter that a fit may adjust.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeParameter {
    /// Reference exchange current density of the active overpotential law, A·m⁻².
    ExchangeCurrent,
    /// Oxygen reaction order.
    ReactionOrder,
    /// Cathode transfer coefficient.
    TransferCoefficient,
    /// Electronic contact resistance, Ω·m².
    ContactResistance,
    /// Limiting current density, A·m⁻². Freeing it enables the
    /// concentration loss.
    LimitingCurrent,
}

impl FreeParameter {
    /// Name used in reports and configuration files.
    pub fn name(self) -> &'static str {
        match self {
            FreeParameter::ExchangeCurrent => "exchange_current",
            FreeParameter::ReactionOrder => "reaction_order",
            FreeParameter::TransferCoefficient => "transfer_coefficient",
            FreeParameter::ContactResistance => "contact_resistance",
            FreeParameter::LimitingCurrent => "limiting_current",
        }
    }

    /// Default search interval.
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            FreeParameter::ExchangeCurrent => (1e-3, 1e3),
            FreeParameter::ReactionOrder => (0.25, 4.0),
            FreeParameter::TransferCoefficient => (1e-3, 1.0),
            FreeParameter::ContactResistance => (0.0, 1e-4),
            FreeParameter::LimitingCurrent => (1e3, 1e5),
        }
    }

    fn is_logarithmic(self) -> bool {
        matches!(self, FreeParameter::ExchangeCurrent | FreeParameter::LimitingCurrent)
    }

    /// Current value in `cell`.
    pub fn get(self, cell: &CellDefinition) -> f64 {
        let e = &cell.electro;
        match self {
            FreeParameter::ExchangeCurrent => match cell.voltage.mode {
                OverpotentialMode::Tafel => e.i0_c_ref,
                OverpotentialMode::Extended => e.i0_353_ref,
            },
            FreeParameter::ReactionOrder => e.kappa_c,
            FreeParameter::TransferCoefficient => e.alpha_c,
            FreeParameter::ContactResistance => e.r_e,
            FreeParameter::LimitingCurrent => e.i_lim.unwrap_or(f64::NAN),
        }
    }

    /// Writes `value` into `cell`.
    pub fn set(self, cell: &mut CellDefinition, value: f64) {
        let e = &mut cell.electro;
        match self {
            FreeParameter::ExchangeCurrent => match cell.voltage.mode {
                OverpotentialMode::Tafel => e.i0_c_ref = value,
                OverpotentialMode::Extended => e.i0_353_ref = value,
            },
            FreeParameter::ReactionOrder => e.kappa_c = value,
            FreeParameter::TransferCoefficient => e.alpha_c = value,
            FreeParameter::ContactResistance => e.r_e = value,
            FreeParameter::LimitingCurrent => {
                e.i_lim = Some(value);
                cell.voltage.concentration_loss_enabled = true;
            }
        }
    }
}

/// A free parameter with its search interval and optional starting value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    /// Parameter to adjust.
    pub parameter: FreeParameter,
    /// Lower bound.
    pub lower: f64,
    /// Upper bound.
    pub upper: f64,
    /// Starting value; the cell's value when absent.
    #[serde(default)]
    pub initial: Option<f64>,
}

impl ParameterSpec {
    /// Spec with the default bounds and the cell's value as start.
    pub fn new(parameter: FreeParameter) -> Self {
        let (lower, upper) = parameter.default_bounds();
        Self {
            parameter,
            lower,
            upper,
            initial: None,
        }
    }

    /// Same spec starting from `value`.
    pub fn starting_at(mut self, value: f64) -> Self {
        self.initial = Some(value);
        self
    }

    fn to_internal(&self, value: f64) -> f64 {
        if self.parameter.is_logarithmic() {
            value.ln()
        } else {
            value / (self.upper - self.lower)
        }
    }

    fn to_physical(&self, theta: f64) -> f64 {
        if self.parameter.is_logarithmic() {
            theta.exp()
        } else {
            theta * (self.upper - self.lower)
        }
    }

    fn internal_bounds(&self) -> (f64, f64) {
        (self.to_internal(self.lower), self.to_internal(self.upper))
    }
}

/// One measured point of a polarization curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    /// Current density, A·m⁻².
    pub i_fc: f64,
    /// Measured cell voltage, V.
    pub u_meas: f64,
    /// Least-squares weight.
    pub weight: f64,
}

/// Optimiser settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationSettings {
    /// Iteration budget.
    pub max_iter: usize,
    /// Convergence bound on the infinity norm of the gradient.
    pub gradient_tol: f64,
    /// Convergence bound on the internal step length.
    pub step_tol: f64,
    /// Relative finite-difference step on internal coordinates.
    pub fd_step: f64,
    /// Residual assigned to a point without a steady state, V.
    pub penalty: f64,
    /// Initial damping factor.
    pub damping_init: f64,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            max_iter: 100,
            gradient_tol: 1e-8,
            step_tol: 1e-10,
            fd_step: 1e-6,
            penalty: 1.0,
            damping_init: 1e-3,
        }
    }
}

/// Complete fitting task.
#[derive(Debug, Clone)]
pub struct CalibrationProblem {
    /// Cell whose non-free parameters stay fixed.
    pub cell: CellDefinition,
    /// Mesh resolution of the steady solves.
    pub resolution: MeshResolution,
    /// Solver settings of the steady solves.
    pub solver: SolverConfig,
    /// Measured points.
    pub data: Vec<DataPoint>,
    /// Parameters to adjust.
    pub free: Vec<ParameterSpec>,
    /// Optimiser settings.
    pub settings: CalibrationSettings,
}

impl CalibrationProblem {
    /// Problem with default mesh, solver and optimiser settings.
    pub fn new(cell: CellDefinition, data: Vec<DataPoint>, free: Vec<ParameterSpec>) -> Self {
        Self {
            cell,
            resolution: MeshResolution::default(),
            solver: SolverConfig::default(),
            data,
            free,
            settings: CalibrationSettings::default(),
        }
    }

    /// Checks data size, bounds and starting values.
    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::Validation("fit.free has at least one parameter".to_string()));
        }
        if self.data.len() < 2 * self.free.len() {
            return Err(Error::Validation(format!(
                "fit.data has at least {} points (twice the free parameters), found {}",
                2 * self.free.len(),
                self.data.len()
            )));
        }
        for (k, spec) in self.free.iter().enumerate() {
            if self.free[..k].iter().any(|s| s.parameter == spec.parameter) {
                return Err(Error::Validation(format!(
                    "fit.free lists {} once",
                    spec.parameter.name()
                )));
            }
            let name = spec.parameter.name();
            if !(spec.lower.is_finite() && spec.upper.is_finite() && spec.lower < spec.upper) {
                return Err(Error::Validation(format!(
                    "fit.{name}: finite bounds with lower < upper"
                )));
            }
            let (lo, hi) = spec.parameter.default_bounds();
            if spec.lower < lo || spec.upper > hi {
                return Err(Error::Validation(format!(
                    "fit.{name}: bounds within [{lo:e}, {hi:e}]"
                )));
            }
            if spec.parameter == FreeParameter::TransferCoefficient && !(spec.lower > 0.0) {
                return Err(Error::Validation(format!("fit.{name}: lower > 0")));
            }
            let start = self.start_value(spec);
            if !(start >= spec.lower && start <= spec.upper) {
                return Err(Error::Validation(format!(
                    "fit.{name}: start {start:e} within [{:e}, {:e}]",
                    spec.lower, spec.upper
                )));
            }
        }
        for d in &self.data {
            if !(d.i_fc >= 0.0 && d.i_fc.is_finite() && d.u_meas.is_finite() && d.weight > 0.0) {
                return Err(Error::Validation(
                    "fit.data: i >= 0, finite U and weight > 0 on every row".to_string(),
                ));
            }
        }
        self.solver.validate()?;
        self.cell.validate()
    }

    fn start_value(&self, spec: &ParameterSpec) -> f64 {
        spec.initial.unwrap_or_else(|| spec.parameter.get(&self.cell))
    }
}

/// Fitted value of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedParameter {
    /// Parameter.
    pub parameter: FreeParameter,
    /// Fitted value.
    pub value: f64,
    /// Starting value.
    pub initial: f64,
    /// Lower bound.
    pub lower: f64,
    /// Upper bound.
    pub upper: f64,
    /// True when the value sits on a bound.
    pub at_bound: bool,
    /// Norm of the residual Jacobian column in internal coordinates, V.
    pub sensitivity: f64,
}

/// One optimiser iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    /// Iteration number.
    pub iteration: usize,
    /// Half the weighted sum of squared residuals, V².
    pub cost: f64,
    /// Weighted residual RMS, V.
    pub rms: f64,
    /// Damping factor after the iteration.
    pub damping: f64,
    /// Parameter values after the iteration.
    pub values: Vec<f64>,
}

/// Outcome of a fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    /// Fitted parameters in the order of the problem.
    pub parameters: Vec<FittedParameter>,
    /// Weighted residual RMS at the start, V.
    pub initial_rms: f64,
    /// Weighted residual RMS at the end, V.
    pub rms: f64,
    /// True when a convergence test was met.
    pub converged: bool,
    /// Why the optimiser stopped.
    pub reason: String,
    /// Accepted iterations, starting with the initial point.
    pub iterations: Vec<IterationRecord>,
    /// Data sorted by current.
    pub data: Vec<DataPoint>,
    /// Model voltage at each sorted data point, NaN where infeasible.
    pub model_voltages: Vec<f64>,
}

impl CalibrationResult {
    /// Fitted value of `parameter`, if it was free.
    pub fn value(&self, parameter: FreeParameter) -> Option<f64> {
        self.parameters.iter().find(|p| p.parameter == parameter).map(|p| p.value)
    }
}

/// Steady model evaluated over the data currents.
struct Model<'a> {
    problem: &'a CalibrationProblem,
    mesh: Mesh1D,
    data: Vec<DataPoint>,
    start: StateVector,
}

struct ModelOutput {
    residuals: Vec<f64>,
    voltages: Vec<f64>,
    states: Vec<Option<StateVector>>,
    feasible: usize,
}

impl ModelOutput {
    fn cost(&self) -> f64 {
        0.5 * self.residuals.iter().map(|r| r * r).sum::<f64>()
    }
}

impl<'a> Model<'a> {
    fn new(problem: &'a CalibrationProblem) -> Result<Self> {
        let mesh = build_mesh(&problem.cell, problem.resolution)?;
        let start = initial_state(&problem.cell, &mesh, InitialCondition::default())?;
        let mut data = problem.data.clone();
        data.sort_by(|a, b| {
            a.i_fc
                .total_cmp(&b.i_fc)
                .then(a.u_meas.total_cmp(&b.u_meas))
                .then(a.weight.total_cmp(&b.weight))
        });
        Ok(Self {
            problem,
            mesh,
            data,
            start,
        })
    }

    fn cell_at(&self, theta: &[f64]) -> CellDefinition {
        let mut cell = self.problem.cell;
        for (spec, &t) in self.problem.free.iter().zip(theta) {
            spec.parameter.set(&mut cell, spec.to_physical(t));
        }
        cell
    }

    fn integrator(&self, theta: &[f64]) -> Result<Integrator> {
        Integrator::new(&self.cell_at(theta), &self.mesh, self.problem.solver)
    }

    fn residual(&self, point: &DataPoint, voltage: Option<f64>) -> f64 {
        let w = point.weight.sqrt();
        match voltage {
            Some(u) => w * (u - point.u_meas),
            None => w * self.problem.settings.penalty,
        }
    }

    fn collect(&self, solved: Vec<Option<(f64, StateVector)>>) -> ModelOutput {
        let mut out = ModelOutput {
            residuals: Vec::with_capacity(solved.len()),
            voltages: Vec::with_capacity(solved.len()),
            states: Vec::with_capacity(solved.len()),
            feasible: 0,
        };
        for (point, s) in self.data.iter().zip(solved) {
            let u = s.as_ref().map(|(u, _)| *u);
            out.residuals.push(self.residual(point, u));
            out.voltages.push(u.unwrap_or(f64::NAN));
            out.feasible += usize::from(u.is_some());
            out.states.push(s.map(|(_, st)| st));
        }
        out
    }

    /// Sequential continuation in current from the open-circuit state.
    fn sweep(&self, theta: &[f64]) -> Result<ModelOutput> {
        let integ = self.integrator(theta)?;
        let mut warm = match integ.solve_steady(&self.start, 0.0) {
            Ok(s) => s.state,
            Err(_) => self.start.clone(),
        };
        let mut solved = Vec::with_capacity(self.data.len());
        for point in &self.data {
            match integ.solve_steady(&warm, point.i_fc) {
                Ok(s) => {
                    warm = s.state.clone();
                    solved.push(Some((s.voltage.u_cell, s.state)));
                }
                Err(_) => solved.push(None),
            }
        }
        Ok(self.collect(solved))
    }

    /// Independent solves per point, each warm-started from `warm`.
    fn evaluate(&self, theta: &[f64], warm: &[Option<StateVector>]) -> Result<ModelOutput> {
        let integ = self.integrator(theta)?;
        let solved: Vec<Option<(f64, StateVector)>> = self
            .data
            .par_iter()
            .zip(warm.par_iter())
            .map(|(point, w)| {
                let guess = w.as_ref().unwrap_or(&self.start);
                let attempt = integ.solve_steady(guess, point.i_fc).or_else(|e| match e {
                    Error::Numerical(_) if w.is_some() => integ.solve_steady(&self.start, point.i_fc),
                    other => Err(other),
                });
                attempt.ok().map(|s| (s.voltage.u_cell, s.state))
            })
            .collect();
        Ok(self.collect(solved))
    }
}

fn clamp_internal(problem: &CalibrationProblem, theta: &mut [f64]) {
    for (spec, t) in problem.free.iter().zip(theta.iter_mut()) {
        let (lo, hi) = spec.internal_bounds();
        *t = t.clamp(lo, hi);
    }
}

fn weighted_rms(output: &ModelOutput, data: &[DataPoint]) -> f64 {
    let w: f64 = data.iter().map(|d| d.weight).sum();
    (2.0 * output.cost() / w).sqrt()
}

/// Fits the free parameters of `problem` to its data.
pub fn fit(problem: &CalibrationProblem) -> Result<CalibrationResult> {
    problem.validate()?;
    let model = Model::new(problem)?;
    let settings = &problem.settings;
    let np = problem.free.len();
    let nd = model.data.len();
    let initial: Vec<f64> = problem.free.iter().map(|s| problem.start_value(s)).collect();
    let mut theta: Vec<f64> = problem
        .free
        .iter()
        .zip(&initial)
        .map(|(s, &v)| s.to_internal(v))
        .collect();
    clamp_internal(problem, &mut theta);

    let mut current = model.sweep(&theta)?;
    if current.feasible == 0 {
        return Err(Error::Validation(
            "fit: the model has no steady state at any data current with the initial parameters"
                .to_string(),
        ));
    }
    let physical = |theta: &[f64]| -> Vec<f64> {
        problem.free.iter().zip(theta).map(|(s, &t)| s.to_physical(t)).collect()
    };
    let initial_rms = weighted_rms(&current, &model.data);
    let mut iterations = vec![IterationRecord {
        iteration: 0,
        cost: current.cost(),
        rms: initial_rms,
        damping: settings.damping_init,
        values: physical(&theta),
    }];
    let mut damping = settings.damping_init;
    let mut jac = DMatrix::<f64>::zeros(nd, np);
    let mut converged = false;
    let mut reason = format!("iteration budget of {} exhausted", settings.max_iter);

    'outer: for iteration in 1..=settings.max_iter {
        // Forward-difference Jacobian of the residuals, stepping inward at
        // the upper bound.
        let columns: Vec<Result<(Vec<f64>, f64)>> = (0..np)
            .map(|j| {
                let (_, hi) = problem.free[j].internal_bounds();
                let mut h = settings.fd_step * theta[j].abs().max(1.0);
                if theta[j] + h > hi {
                    h = -h;
                }
                let mut tp = theta.clone();
                tp[j] += h;
                let out = model.evaluate(&tp, &current.states)?;
                Ok((out.residuals, h))
            })
            .collect();
        for (j, col) in columns.into_iter().enumerate() {
            let (rp, h) = col?;
            for i in 0..nd {
                jac[(i, j)] = (rp[i] - current.residuals[i]) / h;
            }
        }
        let r = DVector::from_column_slice(&current.residuals);
        let grad = jac.transpose() * &r;
        if grad.amax() < settings.gradient_tol {
            converged = true;
            reason = format!("gradient norm {:.3e} below tolerance", grad.amax());
            break;
        }
        let jtj = jac.transpose() * &jac;
        loop {
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += damping * jtj[(k, k)].max(f64::EPSILON);
            }
            let delta = match a.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    damping *= 4.0;
                    if damping > 1e12 {
                        reason = "damped normal equations singular".to_string();
                        break 'outer;
                    }
                    continue;
                }
            };
            let mut trial: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t + d).collect();
            clamp_internal(problem, &mut trial);
            let step = trial
                .iter()
                .zip(&theta)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if step < settings.step_tol {
                converged = true;
                reason = format!("step {step:.3e} below tolerance");
                break 'outer;
            }
            let out = model.evaluate(&trial, &current.states)?;
            if out.cost() < current.cost() {
                theta = trial;
                current = out;
                damping = (damping / 3.0).max(1e-12);
                iterations.push(IterationRecord {
                    iteration,
                    cost: current.cost(),
                    rms: weighted_rms(&current, &model.data),
                    damping,
                    values: physical(&theta),
                });
                break;
            }
            damping *= 4.0;
            if damping > 1e12 {
                converged = true;
                reason = "no further decrease of the objective".to_string();
                break 'outer;
            }
        }
    }

    let values = physical(&theta);
    let parameters = problem
        .free
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(j, (spec, &value))| {
            let (lo, hi) = spec.internal_bounds();
            let t = theta[j];
            let tol = 1e-9 * (hi - lo);
            FittedParameter {
                parameter: spec.parameter,
                value,
                initial: initial[j],
                lower: spec.lower,
                upper: spec.upper,
                at_bound: t <= lo + tol || t >= hi - tol,
                sensitivity: jac.column(j).norm(),
            }
        })
        .collect();
    Ok(CalibrationResult {
        parameters,
        initial_rms,
        rms: weighted_rms(&current, &model.data),
        converged,
        reason,
        iterations,
        model_voltages: current.voltages,
        data: model.data,
    })
}

/// Model voltages of `cell` at the given currents, solved in increasing
/// current order by continuation from open circuit. Infeasible points are
/// `None`.
pub fn model_voltages(cell: &CellDefinition, resolution: MeshResolution, solver: SolverConfig, currents: &[f64]) -> Result<Vec<Option<f64>>> {
    let data: Vec<DataPoint> = currents
        .iter()
        .map(|&i_fc| DataPoint {
            i_fc,
            u_meas: 0.0,
            weight: 1.0,
        })
        .collect();
    let problem = CalibrationProblem {
        cell: *cell,
        resolution,
        solver,
        data,
        free: Vec::new(),
        settings: CalibrationSettings::default(),
    };
    let model = Model::new(&problem)?;
    let out = model.sweep(&[])?;
    let mut by_sorted: Vec<(f64, Option<f64>)> = model
        .data
        .iter()
        .zip(&out.voltages)
        .map(|(d, &u)| (d.i_fc, u.is_finite().then_some(u)))
        .collect();
    Ok(currents
        .iter()
        .map(|&i| {
            let k = by_sorted.iter().position(|(c, _)| *c == i).expect("current present");
            by_sorted.swap_remove(k).1
        })
        .collect())
}

/// Reads polarization data with columns `i_A_per_m2`, `U_V` and an optional
/// `weight` (default 1).
pub fn read_polarization_data(path: &Path) -> Result<Vec<DataPoint>> {
    #[derive(Deserialize)]
    struct Row {
        #[serde(rename = "i_A_per_m2")]
        i: f64,
        #[serde(rename = "U_V")]
        u: f64,
        #[serde(default)]
        weight: Option<f64>,
    }
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut data = Vec::new();
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| {
            Error::Validation(format!("{} row {}: {e}", path.display(), line + 1))
        })?;
        data.push(DataPoint {
            i_fc: row.i,
            u_meas: row.u,
            weight: row.weight.unwrap_or(1.0),
        });
    }
    Ok(data)
}
