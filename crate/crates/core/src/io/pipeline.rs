use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::report::{
    BlockReport, ClassReport, ConfigEcho, DutyEntry, FcpClasses, GroupReport, InstanceSummary, OptimumReport, Report,
    SbcReport, SymmetryReport, UtilityReport,
};
use super::{PipelineError, StageError};
use crate::lp::{min_utility, UtilityDuty};
use crate::milp::{
    build_fixed_interval_model, build_full_model_from_intervals, enumerate_optima, instance_intervals, solve_bnb,
    BnbConfig, MilpError, ModelScope, ObjectiveScope,
};
use crate::model::{build_intervals, MatchSolution, Side};
use crate::scalar::Scalar;
use crate::symmetry::{
    canonical_form, fcp_classes, model_group, orbit_decomposition, symmetry_breaking_constraints, verify_group_action,
    KeyMatch, StreamClass, DEFAULT_ELEMENT_BOUND,
};
use crate::{Instance, Model, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Last stage to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// One optimal solution per block.
    Solve,
    /// All optima up to the cap.
    Enumerate,
    /// Classes, group, action checks and orbits.
    Symmetry,
    /// Everything, symmetry breaking included when requested.
    #[default]
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: ModelScope,
    /// Defaults by mode when unset.
    pub objective_scope: Option<ObjectiveScope>,
    /// Overrides the instance value; 10 when both are unset.
    pub dt_min: Option<Rational>,
    pub cap: usize,
    pub sbc: bool,
    pub key_match: KeyMatch,
    pub format: Format,
    /// Echoed in the report; the pipeline itself draws no random numbers.
    pub seed: u64,
    pub node_limit: usize,
    pub element_bound: u64,
    pub stop_after: Stage,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: ModelScope::FixedInterval,
            objective_scope: None,
            dt_min: None,
            cap: 1000,
            sbc: false,
            key_match: KeyMatch::Exact,
            format: Format::Text,
            seed: 0,
            node_limit: BnbConfig::default().node_limit,
            element_bound: DEFAULT_ELEMENT_BOUND,
            stop_after: Stage::Full,
        }
    }
}

impl RunConfig {
    pub fn objective_scope(&self) -> ObjectiveScope {
        self.objective_scope.unwrap_or_else(|| ObjectiveScope::default_for(self.mode))
    }
}

/// Report plus the models it was computed from.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: Report,
    pub models: Vec<(String, Model)>,
}

fn fail(stage: &'static str, error: impl Into<StageError>) -> PipelineError {
    PipelineError {
        stage,
        error: error.into(),
    }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn s(v: &Rational) -> String {
    v.to_exact_string()
}

fn class_reports(classes: &[StreamClass<Rational>]) -> Vec<ClassReport> {
    classes
        .iter()
        .map(|c| ClassReport {
            members: c.members.clone(),
            key: s(&c.key),
        })
        .collect()
}

fn optimum_report(x: &MatchSolution<Rational>) -> OptimumReport {
    OptimumReport {
        pattern: x.pattern_string(),
        matches: x.matched().map(ToString::to_string).collect(),
        q: x.q.iter().map(|(k, v)| (k.to_string(), s(v))).collect(),
        residuals: x.residuals.iter().map(|((h, t), v)| (format!("{h}@{t}"), s(v))).collect(),
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

fn summary(instance: &Instance) -> InstanceSummary {
    let (supply, demand) = instance.supply_and_demand();
    InstanceSummary {
        name: instance.name.clone(),
        hot_streams: instance.streams_on(Side::Hot).count(),
        cold_streams: instance.streams_on(Side::Cold).count(),
        hot_utilities: instance.utilities_on(Side::Hot).count(),
        cold_utilities: instance.utilities_on(Side::Cold).count(),
        explicit_intervals: instance.intervals.len(),
        imbalance: s(&(supply.clone() - demand.clone())),
        supply: s(&supply),
        demand: s(&demand),
    }
}

fn fixed_duties(instance: &Instance, side: Side) -> Vec<DutyEntry> {
    instance
        .utilities_on(side)
        .filter_map(|u| {
            u.duty.as_ref().map(|d| DutyEntry {
                id: u.id.clone(),
                duty: s(d),
            })
        })
        .collect()
}

fn utility_stage(instance: &Instance, dt: &Rational) -> Result<(UtilityReport, Option<UtilityDuty<Rational>>), PipelineError> {
    let all_fixed = instance.utilities.iter().all(|u| u.duty.is_some());
    if !instance.intervals.is_empty() || all_fixed {
        let report = UtilityReport {
            skipped: true,
            hot: fixed_duties(instance, Side::Hot),
            cold: fixed_duties(instance, Side::Cold),
            residuals: Vec::new(),
            cost: None,
        };
        return Ok((report, None));
    }
    let intervals = build_intervals(&instance.streams, &instance.utilities, dt).map_err(|e| fail("intervals", e))?;
    let duty = min_utility(&intervals, &instance.utilities).map_err(|e| fail("utility", e))?;
    let entries = |v: &[(String, Rational)]| v.iter().map(|(id, d)| DutyEntry { id: id.clone(), duty: s(d) }).collect();
    let report = UtilityReport {
        skipped: false,
        hot: entries(&duty.hot),
        cold: entries(&duty.cold),
        residuals: duty.residuals.iter().map(s).collect(),
        cost: Some(s(&duty.cost)),
    };
    Ok((report, Some(duty)))
}

fn block_models(
    instance: &Instance,
    dt: &Rational,
    duties: Option<&UtilityDuty<Rational>>,
    config: &RunConfig,
) -> Result<Vec<(String, Model)>, PipelineError> {
    let scope = config.objective_scope();
    let carriers = config.mode == ModelScope::FixedInterval;
    let problems = instance_intervals(instance, dt, duties, carriers).map_err(|e| fail("model", e))?;
    match config.mode {
        ModelScope::FixedInterval => problems
            .iter()
            .map(|p| {
                build_fixed_interval_model(p, scope)
                    .map(|m| (p.name.clone(), m))
                    .map_err(|e| fail("model", e))
            })
            .collect(),
        ModelScope::Full => {
            let m = build_full_model_from_intervals(&problems, scope).map_err(|e| fail("model", e))?;
            Ok(vec![("full".to_string(), m)])
        }
    }
}

fn solve_block(
    name: &str,
    model: &Model,
    config: &RunConfig,
    timings: &mut BTreeMap<String, f64>,
) -> Result<(BlockReport, Vec<MatchSolution<Rational>>), PipelineError> {
    let bnb = BnbConfig {
        node_limit: config.node_limit,
        target: None,
    };
    let start = Instant::now();
    let (solutions, first, complete, enumeration_nodes) = if config.stop_after == Stage::Solve {
        let res = solve_bnb(model, &bnb).map_err(|e| fail("solve", e))?;
        let x = res.solution().cloned().ok_or_else(|| fail("solve", MilpError::Infeasible))?;
        (vec![x], res.stats, None, None)
    } else {
        let set = enumerate_optima(model, config.cap, &bnb).map_err(|e| fail("enumerate", e))?;
        let total = set.total_nodes();
        (set.solutions, set.solves[0].clone(), Some(set.complete), Some(total))
    };
    *timings.entry("solve".into()).or_default() += elapsed_ms(start);
    let report = BlockReport {
        name: name.to_string(),
        scope: kebab(&model.scope),
        objective_scope: kebab(&model.objective_scope),
        variables: model.lp.num_vars(),
        rows: model.lp.constraints.len(),
        binaries: model.num_binaries(),
        delta_r: delta_r(model),
        objective: solutions[0].objective,
        root_bound: first.root_bound,
        nodes: first.nodes,
        optimum_count: solutions.len(),
        optima: solutions.iter().map(optimum_report).collect(),
        optima_complete: complete,
        enumeration_nodes,
        symmetry: None,
    };
    Ok((report, solutions))
}

/// Residual change each interval of the model must produce.
fn delta_r(model: &Model) -> Vec<String> {
    (0..model.intervals.len())
        .map(|k| {
            let hot = model.hot.iter().fold(Rational::zero(), |a, h| a + h.loads[k].clone());
            let cold = model.cold.iter().fold(Rational::zero(), |a, c| a + c.loads[k].clone());
            s(&(hot - cold))
        })
        .collect()
}

fn symmetry_stage(
    model: &Model,
    solutions: &[MatchSolution<Rational>],
    complete: bool,
    enumeration_nodes: Option<usize>,
    config: &RunConfig,
    timings: &mut BTreeMap<String, f64>,
) -> Result<SymmetryReport, PipelineError> {
    let start = Instant::now();
    let group = model_group(model, config.key_match);
    let action = verify_group_action(model, &group, solutions);
    let orbits = orbit_decomposition(solutions, &group);
    let failures = action
        .checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| {
            format!(
                "solution {} generator {}: feasible {} objective {} delta_r {} {}",
                c.solution,
                c.generator,
                c.feasible,
                c.same_objective,
                c.same_delta_r,
                c.violations.join("; ")
            )
        })
        .collect();
    let mut report = SymmetryReport {
        hot_classes: class_reports(&group.hot_classes),
        cold_classes: class_reports(&group.cold_classes),
        group: GroupReport {
            order: group.order.to_string(),
            generators: group.generators.iter().map(|t| format!("{}{}", t.side, t)).collect(),
        },
        checks: action.checks.len(),
        all_pass: action.all_pass,
        closed: action.closed,
        failures,
        orbits: orbits.clone(),
        sbc: None,
    };
    *timings.entry("symmetry".into()).or_default() += elapsed_ms(start);

    if config.sbc {
        let start = Instant::now();
        let set = symmetry_breaking_constraints(&group, model, config.element_bound).map_err(|e| fail("sbc", e))?;
        // Without rows the re-solve would repeat the enumeration node for node.
        let (kept, kept_complete, nodes) = match (set.rows.is_empty(), enumeration_nodes) {
            (true, Some(nodes)) => (solutions.to_vec(), complete, nodes),
            _ => {
                let broken = model.with_constraints(set.rows.iter().cloned());
                let bnb = BnbConfig {
                    node_limit: config.node_limit,
                    target: None,
                };
                let kept = enumerate_optima(&broken, config.cap, &bnb).map_err(|e| fail("sbc", e))?;
                let nodes = kept.total_nodes();
                (kept.solutions, kept.complete, nodes)
            }
        };
        let survivors: Vec<String> = kept.iter().map(MatchSolution::pattern_string).collect();
        let survivors_canonical = kept
            .iter()
            .all(|x| canonical_form(x, &group).pattern_string() == x.pattern_string());
        let leaders: BTreeSet<String> = orbits
            .iter()
            .map(|o| canonical_form(&solutions[o[0]], &group).pattern_string())
            .collect();
        let kept_set: BTreeSet<String> = survivors.iter().cloned().collect();
        let one_per_orbit = complete && kept_complete && kept_set.len() == survivors.len() && kept_set == leaders;
        report.sbc = Some(SbcReport {
            kind: kebab(&set.kind),
            exact: set.exact,
            rows: set.rows.len(),
            objective: kept[0].objective,
            survivors,
            complete: kept_complete,
            nodes,
            survivors_canonical,
            one_per_orbit,
        });
        *timings.entry("sbc".into()).or_default() += elapsed_ms(start);
    }
    Ok(report)
}

fn notes(instance: &Instance, summary: &InstanceSummary) -> Vec<String> {
    let mut out = Vec::new();
    if summary.imbalance != "0" && (!instance.intervals.is_empty() || instance.utilities.iter().all(|u| u.duty.is_some()))
    {
        out.push(format!(
            "declared supply {} kW and demand {} kW differ by {} kW",
            summary.supply, summary.demand, summary.imbalance
        ));
    }
    let entering: Rational = instance
        .intervals
        .iter()
        .flat_map(|iv| iv.entering.iter())
        .fold(Rational::zero(), |a, (_, r)| a + r.clone());
    if entering != Rational::zero() {
        out.push(format!("explicit entering residuals total {} kW", s(&entering)));
    }
    out
}

/// Runs utility targeting, model construction, solving or enumeration,
/// symmetry analysis and optional symmetry breaking, stopping after
/// `config.stop_after`.
pub fn run_pipeline(instance: &Instance, config: &RunConfig) -> Result<PipelineRun, PipelineError> {
    if config.cap == 0 {
        return Err(fail("config", StageError::Config("cap must be at least 1".into())));
    }
    let dt = config
        .dt_min
        .clone()
        .or_else(|| instance.dt_min.clone())
        .unwrap_or_else(|| Rational::from_int(10));
    if dt < Rational::zero() {
        return Err(fail("config", StageError::Config("dt_min must not be negative".into())));
    }
    instance.validate().map_err(|e| fail("instance", e))?;

    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let (utility, duties) = utility_stage(instance, &dt)?;
    timings.insert("utility".to_string(), elapsed_ms(start));

    let start = Instant::now();
    let models = block_models(instance, &dt, duties.as_ref(), config)?;
    timings.insert("model".to_string(), elapsed_ms(start));

    let with_symmetry = config.stop_after >= Stage::Symmetry || config.sbc;
    let mut blocks = Vec::with_capacity(models.len());
    for (name, model) in &models {
        let (mut block, solutions) = solve_block(name, model, config, &mut timings)?;
        if with_symmetry {
            let complete = block.optima_complete.unwrap_or(false);
            let nodes = block.enumeration_nodes;
            block.symmetry = Some(symmetry_stage(model, &solutions, complete, nodes, config, &mut timings)?);
        }
        blocks.push(block);
    }

    let fcp = with_symmetry.then(|| FcpClasses {
        hot: class_reports(&fcp_classes(instance, Side::Hot, config.key_match)),
        cold: class_reports(&fcp_classes(instance, Side::Cold, config.key_match)),
    });
    let instance_summary = summary(instance);
    let report = Report {
        notes: notes(instance, &instance_summary),
        instance: instance_summary,
        config: ConfigEcho {
            mode: kebab(&config.mode),
            objective_scope: kebab(&config.objective_scope()),
            dt_min: s(&dt),
            cap: config.cap,
            sbc: config.sbc,
            key_match: kebab(&config.key_match),
            seed: config.seed,
            node_limit: config.node_limit,
            stop_after: kebab(&config.stop_after),
        },
        utility: Some(utility),
        fcp_classes: fcp,
        total_objective: blocks.iter().map(|b| b.objective).sum(),
        blocks,
        timings_ms: timings,
    };
    Ok(PipelineRun { report, models })
}
