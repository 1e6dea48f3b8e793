//! Experiment harness: configuration, verification suites and JSON reports.
//!
//! Everything the command-line tool does goes through here, so a sweep can be
//! scripted from Rust as well. Reports echo their configuration and contain no
//! wall-clock data unless `timings` is set, which keeps them byte-identical
//! across runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{big, AnalyticCounts};
use crate::budget::{parse_ops, Budget};
use crate::ccls::{load_ccls, save_ccls};
use crate::concept::ConceptClass;
use crate::error::{Error, Result};
use crate::greedy::{greedy_teach, GreedyConfig, GreedyTrace};
use crate::headtail::{
    build_headtail, check_f_and, check_prefix_rows, ht_analytic_sizes, validate_ht_widths, HtLayout,
    HtParams,
};
use crate::oracles::{crosscheck_subclasses, verify_greedy_dynamics, vc_dimension, VcMode};
use crate::rectangles::{
    build_rectangles, default_rect_widths, realize_all, rect_analytic_sizes, validate_rect_widths,
    RectGeometry, RectWidthSchedule,
};

pub const SUITES: [&str; 9] = [
    "domination",
    "fand",
    "realizable",
    "disjoint",
    "prefix",
    "sizes",
    "dynamics",
    "crosscheck",
    "vc-sample",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Rectangles,
    Headtail,
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rectangles" => Ok(Construction::Rectangles),
            "headtail" => Ok(Construction::Headtail),
            _ => Err(Error::Usage(format!("unknown construction {s:?}"))),
        }
    }
}

/// Parameters of one run. Loaded from JSON; command-line flags override fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Head/tail parameter; also the greedy parameter unless `greedy_k` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "big::ser_opt_vec",
        deserialize_with = "big::de_opt_vec"
    )]
    pub widths: Option<Vec<BigUint>>,
    /// `"paper"` selects the default widths for `levels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub greedy_k: Option<usize>,
    #[serde(default)]
    pub suites: Vec<String>,
    /// Bit-operation budget such as `"1e11"`; `TEACHLAB_BUDGET` applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub force: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vc_size: Option<usize>,
    #[serde(default = "default_samples")]
    pub vc_samples: usize,
    #[serde(default = "default_trials")]
    pub crosscheck_trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_out: Option<PathBuf>,
    #[serde(default)]
    pub timings: bool,
}

fn default_seed() -> u64 {
    7
}

fn default_samples() -> usize {
    1000
}

fn default_trials() -> usize {
    100
}

impl ExperimentConfig {
    pub fn new(construction: Construction) -> Self {
        ExperimentConfig {
            construction,
            levels: None,
            k: None,
            widths: None,
            schedule: None,
            greedy_k: None,
            suites: Vec::new(),
            budget: None,
            seed: default_seed(),
            force: false,
            vc_size: None,
            vc_samples: default_samples(),
            crosscheck_trials: default_trials(),
            class_out: None,
            trace_out: None,
            report_out: None,
            timings: false,
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn budget(&self) -> Result<Budget> {
        match &self.budget {
            Some(b) => parse_ops(b).map(Budget),
            None => Budget::from_env(),
        }
    }

    fn widths(&self) -> Result<Vec<BigUint>> {
        let paper = match self.schedule.as_deref() {
            None => false,
            Some("paper") => true,
            Some(other) => return Err(Error::Usage(format!("unknown schedule {other:?}"))),
        };
        match (&self.widths, paper) {
            (Some(_), true) => Err(Error::Usage("give either widths or the paper schedule".into())),
            (Some(w), false) => {
                if self.levels.is_some_and(|n| n != w.len()) {
                    return Err(Error::Usage(format!(
                        "{} widths given for {} levels",
                        w.len(),
                        self.levels.unwrap()
                    )));
                }
                Ok(w.clone())
            }
            (None, true) => {
                let n = self.levels.ok_or_else(|| Error::Usage("the paper schedule needs levels".into()))?;
                match self.construction {
                    Construction::Rectangles => Ok(default_rect_widths(n)?.widths().to_vec()),
                    Construction::Headtail => Ok(HtParams::paper(n, self.ht_k()?)?.widths().to_vec()),
                }
            }
            (None, false) => Err(Error::Usage("widths or the paper schedule are required".into())),
        }
    }

    fn ht_k(&self) -> Result<usize> {
        self.k.ok_or_else(|| Error::Usage("head/tail classes need -k".into()))
    }

    pub fn rect_schedule(&self) -> Result<RectWidthSchedule> {
        RectWidthSchedule::new(self.widths()?)
    }

    pub fn ht_params(&self) -> Result<HtParams> {
        HtParams::new(self.ht_k()?, self.widths()?)
    }

    pub fn analytic(&self) -> Result<AnalyticCounts> {
        Ok(match self.construction {
            Construction::Rectangles => rect_analytic_sizes(&self.rect_schedule()?),
            Construction::Headtail => ht_analytic_sizes(&self.ht_params()?),
        })
    }

    /// Validates the schedule (unless forced) and materializes the class.
    pub fn build(&self) -> Result<ConceptClass> {
        let budget = self.budget()?;
        match self.construction {
            Construction::Rectangles => {
                let s = self.rect_schedule()?;
                if !self.force {
                    validate_rect_widths(&s).map_err(|v| Error::Schedule(v.to_string()))?;
                }
                build_rectangles(&s, &budget)
            }
            Construction::Headtail => build_headtail(&self.ht_params()?, self.force, &budget),
        }
    }

    pub fn greedy_k(&self) -> usize {
        self.greedy_k.unwrap_or(match self.construction {
            Construction::Rectangles => 1,
            Construction::Headtail => self.k.unwrap_or(2),
        })
    }
}

/// Options for [`run_suites`].
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub k: Option<usize>,
    pub seed: u64,
    pub vc_size: Option<usize>,
    pub vc_samples: usize,
    pub crosscheck_trials: usize,
    pub budget: Budget,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            k: None,
            seed: default_seed(),
            vc_size: None,
            vc_samples: default_samples(),
            crosscheck_trials: default_trials(),
            budget: Budget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreedySummary {
    pub k: usize,
    pub teaching_set_size: usize,
    pub iterations: usize,
    pub final_iteration_growth: usize,
    pub concept_index: usize,
    pub concept_hex: String,
    pub teaching_set: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub analytic: AnalyticCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub materialized: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub greedy: Option<GreedySummary>,
    pub suites: Vec<SuiteOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

enum Kind {
    Rect(RectGeometry),
    Ht(HtLayout),
}

fn kind(class: &ConceptClass) -> Result<Kind> {
    match class.domain().construction() {
        Some("rectangles") => Ok(Kind::Rect(RectGeometry::from_domain(class.domain())?)),
        Some("headtail") => Ok(Kind::Ht(HtLayout::from_domain(class.domain())?)),
        _ => Err(Error::Usage("verification suites need a constructed class".into())),
    }
}

fn not_applicable(suite: &str, construction: &str) -> Error {
    Error::Usage(format!("suite {suite} does not apply to {construction} classes"))
}

fn outcome(name: &str, passed: bool, detail: Value) -> SuiteOutcome {
    SuiteOutcome { name: name.into(), passed, detail }
}

/// Materialized concepts per level (by origin tag) and concepts tagged by more than one level.
fn level_census(class: &ConceptClass, levels: usize) -> (Vec<usize>, usize) {
    let mut per_level = vec![0usize; levels];
    let mut mixed = 0;
    for i in 0..class.len() {
        let tags = class.origins(i);
        let first = tags.first().map_or(0, |t| t.level());
        if tags.iter().any(|t| t.level() != first) {
            mixed += 1;
        } else if (1..=levels).contains(&first) {
            per_level[first - 1] += 1;
        }
    }
    (per_level, mixed)
}

fn analytic_of(kind: &Kind) -> Result<AnalyticCounts> {
    Ok(match kind {
        Kind::Rect(g) => rect_analytic_sizes(&RectWidthSchedule::from_u64s(
            &g.widths().iter().map(|&w| w as u64).collect::<Vec<_>>(),
        )?),
        Kind::Ht(l) => ht_analytic_sizes(&HtParams::from_u64s(
            l.k(),
            &l.widths().iter().map(|&w| w as u64).collect::<Vec<_>>(),
        )?),
    })
}

fn run_suite(class: &ConceptClass, kind: &Kind, name: &str, opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let construction = match kind {
        Kind::Rect(_) => "rectangles",
        Kind::Ht(_) => "headtail",
    };
    let default_k = match kind {
        Kind::Rect(_) => 1,
        Kind::Ht(l) => l.k(),
    };
    let k = opts.k.unwrap_or(default_k);
    Ok(match (name, kind) {
        ("domination", Kind::Rect(g)) => {
            let s = RectWidthSchedule::from_u64s(&g.widths().iter().map(|&w| w as u64).collect::<Vec<_>>())?;
            match validate_rect_widths(&s) {
                Ok(()) => outcome(name, true, json!("ok")),
                Err(v) => outcome(name, false, json!(v.to_string())),
            }
        }
        ("domination", Kind::Ht(l)) => {
            let p = HtParams::from_u64s(l.k(), &l.widths().iter().map(|&w| w as u64).collect::<Vec<_>>())?;
            match validate_ht_widths(&p) {
                Ok(()) => outcome(name, true, json!("ok")),
                Err(v) => outcome(name, false, json!(v.to_string())),
            }
        }
        ("fand", Kind::Ht(_)) => match check_f_and(class)? {
            None => outcome(name, true, json!("ok")),
            Some(v) => outcome(
                name,
                false,
                json!({
                    "concept": v.concept, "i": v.i, "j": v.j, "row": v.row, "col": v.col,
                    "message": v.to_string(),
                }),
            ),
        },
        ("prefix", Kind::Ht(_)) => match check_prefix_rows(class)? {
            None => outcome(name, true, json!("ok")),
            Some((c, level, row)) => outcome(
                name,
                false,
                json!(format!("concept {c}: row {row} of level {level} is not a prefix")),
            ),
        },
        ("realizable", Kind::Rect(_)) => match realize_all(class) {
            Ok(()) => outcome(name, true, json!("ok")),
            Err((i, e)) => outcome(name, false, json!(format!("concept {i}: {e}"))),
        },
        ("disjoint", _) => {
            let levels = match kind {
                Kind::Rect(g) => g.levels(),
                Kind::Ht(l) => l.levels(),
            };
            let (per_level, mixed) = level_census(class, levels);
            outcome(name, mixed == 0, json!({ "cross_level_duplicates": mixed, "per_level": per_level }))
        }
        ("sizes", _) => {
            let analytic = analytic_of(kind)?;
            let (per_level, mixed) = level_census(class, analytic.levels);
            let expected: Vec<String> = analytic.level_concepts().iter().map(|c| c.to_string()).collect();
            let got: Vec<String> = per_level.iter().map(|c| c.to_string()).collect();
            let total_ok = analytic.class_size == BigUint::from(class.len());
            outcome(
                name,
                mixed == 0 && got == expected && total_ok,
                json!({ "expected_per_level": expected, "materialized_per_level": got,
                        "expected_total": analytic.class_size.to_string(), "materialized_total": class.len() }),
            )
        }
        ("dynamics", _) => {
            let r = verify_greedy_dynamics(class, k)?;
            outcome(name, r.passed(), serde_json::to_value(&r)?)
        }
        ("crosscheck", _) => {
            let r = crosscheck_subclasses(class, k, opts.crosscheck_trials, opts.seed, 200, &opts.budget)?;
            outcome(name, r.passed(), serde_json::to_value(&r)?)
        }
        ("vc-sample", _) => {
            let size = opts.vc_size.unwrap_or(match kind {
                Kind::Rect(_) => 5,
                Kind::Ht(l) => 4 * l.k() + 2,
            });
            let mode = VcMode::Sample { size, samples: opts.vc_samples, seed: opts.seed };
            let r = vc_dimension(class, mode, &opts.budget)?;
            let clean = r.sample.as_ref().is_some_and(|s| s.shattered_found == 0);
            outcome(name, clean, serde_json::to_value(&r)?)
        }
        (s, _) if SUITES.contains(&s) => return Err(not_applicable(s, construction)),
        (s, _) => return Err(Error::Usage(format!("unknown suite {s:?}; known: {}", SUITES.join(", ")))),
    })
}

/// Runs the named suites in order. Unknown or inapplicable suites are usage errors.
pub fn run_suites(class: &ConceptClass, suites: &[String], opts: &SuiteOptions) -> Result<Vec<SuiteOutcome>> {
    let kind = kind(class)?;
    suites.iter().map(|s| run_suite(class, &kind, s, opts)).collect()
}

pub fn summarize(class: &ConceptClass, k: usize, trace: &GreedyTrace, set: &[usize]) -> GreedySummary {
    GreedySummary {
        k,
        teaching_set_size: trace.teaching_set_size(),
        iterations: trace.steps.len(),
        final_iteration_growth: trace.final_iteration_growth(),
        concept_index: trace.final_concept_index,
        concept_hex: class.concept(trace.final_concept_index).to_hex(),
        teaching_set: set.to_vec(),
    }
}

/// Greedy on a class, with the run refused if the restriction scan is over budget.
pub fn run_greedy(class: &ConceptClass, k: usize, budget: &Budget) -> Result<(GreedySummary, GreedyTrace)> {
    budget.check(crate::budget::restriction_scan_ops(class.domain_size(), class.len(), k))?;
    let (cert, trace) = greedy_teach(class, GreedyConfig::new(k)?)?;
    Ok((summarize(class, k, &trace, &cert.set), trace))
}

/// `greedy --class f -k K --trace path`.
pub fn cmd_greedy(class_path: &Path, k: usize, trace_path: Option<&Path>, budget: &Budget) -> Result<GreedySummary> {
    let class = load_ccls(class_path)?;
    let (summary, trace) = run_greedy(&class, k, budget)?;
    if let Some(p) = trace_path {
        fs::write(p, trace.to_csv(&class))?;
    }
    Ok(summary)
}

/// `verify --suite ... --class f`.
pub fn cmd_verify(class_path: &Path, suites: &[String], opts: &SuiteOptions) -> Result<Vec<SuiteOutcome>> {
    run_suites(&load_ccls(class_path)?, suites, opts)
}

/// Outcome of `gen`: analytic counts always, the class when materialized.
pub struct Generated {
    pub analytic: AnalyticCounts,
    pub class: Option<ConceptClass>,
}

/// `gen`: analytic counts, then (unless `analytic_only`) the materialized class,
/// written to `config.class_out` when set.
pub fn cmd_gen(config: &ExperimentConfig, analytic_only: bool) -> Result<Generated> {
    let analytic = config.analytic()?;
    if analytic_only {
        return Ok(Generated { analytic, class: None });
    }
    let class = config.build()?;
    if let Some(p) = &config.class_out {
        save_ccls(&class, p)?;
    }
    Ok(Generated { analytic, class: Some(class) })
}

/// Full run: build, greedy with trace, suites, report.
pub fn cmd_experiment(config: &ExperimentConfig) -> Result<Report> {
    let budget = config.budget()?;
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    let generated = cmd_gen(config, false)?;
    let class = generated.class.expect("materialized");
    lap("generate", &mut timings);

    let k = config.greedy_k();
    let (summary, trace) = run_greedy(&class, k, &budget)?;
    if let Some(p) = &config.trace_out {
        fs::write(p, trace.to_csv(&class))?;
    }
    lap("greedy", &mut timings);

    let opts = SuiteOptions {
        k: Some(k),
        seed: config.seed,
        vc_size: config.vc_size,
        vc_samples: config.vc_samples,
        crosscheck_trials: config.crosscheck_trials,
        budget,
    };
    let suites = run_suites(&class, &config.suites, &opts)?;
    lap("suites", &mut timings);

    let report = Report {
        config: config.clone(),
        analytic: generated.analytic,
        materialized: Some(json!({ "points": class.domain_size(), "concepts": class.len() })),
        greedy: Some(summary),
        suites,
        timings: config.timings.then_some(timings),
    };
    if let Some(p) = &config.report_out {
        fs::write(p, report.to_json())?;
    }
    Ok(report)
}

/// Process exit code for an error: 3 for budget refusals, 2 for usage and
/// input errors, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded { .. } => 3,
        Error::Usage(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
        _ => 1,
    }
}
