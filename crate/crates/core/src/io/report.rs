//! The run report: one serializable structure, rendered as JSON or text.
//! Exact numbers are carried as strings.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub instance: InstanceSummary,
    pub config: ConfigEcho,
    pub notes: Vec<String>,
    pub utility: Option<UtilityReport>,
    /// Process streams grouped by flow-rate heat capacity over the whole instance.
    pub fcp_classes: Option<FcpClasses>,
    pub blocks: Vec<BlockReport>,
    pub total_objective: usize,
    /// Wall time per stage; excluded from determinism comparisons.
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub name: Option<String>,
    pub hot_streams: usize,
    pub cold_streams: usize,
    pub hot_utilities: usize,
    pub cold_utilities: usize,
    pub explicit_intervals: usize,
    /// Declared hot loads plus fixed hot utility duties.
    pub supply: String,
    /// Declared cold loads plus fixed cold utility duties.
    pub demand: String,
    pub imbalance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub mode: String,
    pub objective_scope: String,
    pub dt_min: String,
    pub cap: usize,
    pub sbc: bool,
    pub key_match: String,
    pub seed: u64,
    pub node_limit: usize,
    pub stop_after: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DutyEntry {
    pub id: String,
    pub duty: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityReport {
    /// Duties came from the input instead of the minimum-utility LP.
    pub skipped: bool,
    pub hot: Vec<DutyEntry>,
    pub cold: Vec<DutyEntry>,
    /// Cascade residuals `R_0 … R_T`; empty when skipped.
    pub residuals: Vec<String>,
    pub cost: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub members: Vec<String>,
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FcpClasses {
    pub hot: Vec<ClassReport>,
    pub cold: Vec<ClassReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumReport {
    pub pattern: String,
    pub matches: Vec<String>,
    pub q: BTreeMap<String, String>,
    pub residuals: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub order: String,
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbcReport {
    pub kind: String,
    pub exact: bool,
    pub rows: usize,
    pub objective: usize,
    pub survivors: Vec<String>,
    pub complete: bool,
    pub nodes: usize,
    /// Every survivor is the smallest pattern of its orbit.
    pub survivors_canonical: bool,
    /// Survivors and orbits of the unbroken optima correspond one to one.
    pub one_per_orbit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub hot_classes: Vec<ClassReport>,
    pub cold_classes: Vec<ClassReport>,
    pub group: GroupReport,
    pub checks: usize,
    pub all_pass: bool,
    pub closed: bool,
    pub failures: Vec<String>,
    /// Indices into the block's optima, one list per orbit.
    pub orbits: Vec<Vec<usize>>,
    pub sbc: Option<SbcReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub name: String,
    pub scope: String,
    pub objective_scope: String,
    pub variables: usize,
    pub rows: usize,
    pub binaries: usize,
    pub delta_r: Vec<String>,
    pub objective: usize,
    pub root_bound: Option<usize>,
    /// Nodes of the first solve.
    pub nodes: usize,
    pub optimum_count: usize,
    pub optima: Vec<OptimumReport>,
    /// `None` when enumeration did not run.
    pub optima_complete: Option<bool>,
    /// Nodes over all solves of the enumeration.
    pub enumeration_nodes: Option<usize>,
    pub symmetry: Option<SymmetryReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Copy without wall times, for comparing runs.
    pub fn without_timings(&self) -> Self {
        Self {
            timings_ms: BTreeMap::new(),
            ..self.clone()
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn classes_text(classes: &[ClassReport]) -> String {
    classes
        .iter()
        .map(|c| format!("{{{}}}:{}", c.members.join(","), c.key))
        .collect::<Vec<_>>()
        .join(" ")
}

fn map_text(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn duties_text(duties: &[DutyEntry]) -> String {
    if duties.is_empty() {
        return "none".into();
    }
    duties.iter().map(|d| format!("{}={}", d.id, d.duty)).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = &self.instance;
        writeln!(f, "instance {}", i.name.as_deref().unwrap_or("(unnamed)"))?;
        writeln!(
            f,
            "  streams hot {} cold {}; utilities hot {} cold {}; explicit intervals {}",
            i.hot_streams, i.cold_streams, i.hot_utilities, i.cold_utilities, i.explicit_intervals
        )?;
        writeln!(f, "  supply {} kW, demand {} kW, imbalance {} kW", i.supply, i.demand, i.imbalance)?;
        let c = &self.config;
        writeln!(
            f,
            "config mode {} objective {} dt_min {} cap {} sbc {} keys {} seed {} node_limit {} stop_after {}",
            c.mode, c.objective_scope, c.dt_min, c.cap, yes(c.sbc), c.key_match, c.seed, c.node_limit, c.stop_after
        )?;
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        if let Some(u) = &self.utility {
            let source = if u.skipped { "from input" } else { "minimum utility" };
            writeln!(f, "utility ({source})")?;
            writeln!(f, "  hot {}", duties_text(&u.hot))?;
            writeln!(f, "  cold {}", duties_text(&u.cold))?;
            if !u.residuals.is_empty() {
                writeln!(f, "  residuals {}", u.residuals.join(" "))?;
            }
            if let Some(cost) = &u.cost {
                writeln!(f, "  cost {cost}")?;
            }
        }
        if let Some(fc) = &self.fcp_classes {
            writeln!(f, "fcp classes hot {}", classes_text(&fc.hot))?;
            writeln!(f, "fcp classes cold {}", classes_text(&fc.cold))?;
        }
        for b in &self.blocks {
            writeln!(
                f,
                "block {} [{} / {}]: {} variables, {} rows, {} binaries, delta_r {}",
                b.name,
                b.scope,
                b.objective_scope,
                b.variables,
                b.rows,
                b.binaries,
                b.delta_r.join(" ")
            )?;
            let root = b.root_bound.map_or_else(|| "-".to_string(), |r| r.to_string());
            writeln!(f, "  objective {} (root bound {}, nodes {})", b.objective, root, b.nodes)?;
            if let Some(complete) = b.optima_complete {
                let nodes = b.enumeration_nodes.unwrap_or(0);
                writeln!(f, "  optima {} complete {} enumeration nodes {}", b.optimum_count, yes(complete), nodes)?;
            }
            for (k, o) in b.optima.iter().enumerate() {
                let mut line = format!("    #{k} {} matches {}", o.pattern, o.matches.join(" "));
                if !o.q.is_empty() {
                    write!(line, " | q {}", map_text(&o.q))?;
                }
                if !o.residuals.is_empty() {
                    write!(line, " | R {}", map_text(&o.residuals))?;
                }
                writeln!(f, "{line}")?;
            }
            if let Some(s) = &b.symmetry {
                writeln!(f, "  classes hot {}", classes_text(&s.hot_classes))?;
                writeln!(f, "  classes cold {}", classes_text(&s.cold_classes))?;
                let gens = if s.group.generators.is_empty() {
                    "none".to_string()
                } else {
                    s.group.generators.join(" ")
                };
                writeln!(f, "  group order {} generators {}", s.group.order, gens)?;
                writeln!(f, "  action checks {} all pass {} closed {}", s.checks, yes(s.all_pass), yes(s.closed))?;
                for failure in &s.failures {
                    writeln!(f, "    failure {failure}")?;
                }
                let orbits: Vec<String> = s
                    .orbits
                    .iter()
                    .map(|o| format!("[{}]", o.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
                    .collect();
                writeln!(f, "  orbits {}", orbits.join(" "))?;
                if let Some(sbc) = &s.sbc {
                    writeln!(
                        f,
                        "  sbc {} exact {} rows {}: objective {}, survivors {} complete {}, nodes {}, canonical {}, one per orbit {}",
                        sbc.kind,
                        yes(sbc.exact),
                        sbc.rows,
                        sbc.objective,
                        sbc.survivors.join(" "),
                        yes(sbc.complete),
                        sbc.nodes,
                        yes(sbc.survivors_canonical),
                        yes(sbc.one_per_orbit)
                    )?;
                }
            }
        }
        writeln!(f, "total objective {}", self.total_objective)?;
        if !self.timings_ms.is_empty() {
            let t: Vec<String> = self.timings_ms.iter().map(|(k, v)| format!("{k}={v:.3}")).collect();
            writeln!(f, "timings ms {}", t.join(" "))?;
        }
        Ok(())
    }
}
