//! Scripted scenarios: counterexamples, thresholds and scaling checks on
//! finite grids. Every valued row stores the set it was computed from, so
//! values can be recomputed from the frames.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::energy::{functional, EnergyMode};
use crate::error::Result;
use crate::grid::CellSet;
use crate::io::svg;
use crate::measure::SignedPair;
use crate::Rational;

mod scenarios;

pub use scenarios::{
    run_capacity_scaling, run_convex_threshold, run_interval_clusters, run_pseudoconvex,
    run_refinement, run_runaway_slab, run_tentacle, RefinedScenario,
};

/// A set drawn together with the measure pair it was evaluated against.
#[derive(Clone, Debug)]
pub struct Frame {
    pub name: String,
    pub set: CellSet,
    pub pair: SignedPair,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub k: i64,
    pub grid: String,
    /// `P(A) + μ₊(A¹) − μ₋(A⁺)` of the frame's set.
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub value: Option<Rational>,
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub perimeter: Option<Rational>,
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub mu_plus: Option<Rational>,
    #[serde(serialize_with = "crate::io::ser_opt_rational")]
    pub mu_minus: Option<Rational>,
    pub extra: BTreeMap<String, String>,
    pub frame: Option<usize>,
}

impl Row {
    fn new(k: i64, grid: String) -> Self {
        Row {
            k,
            grid,
            value: None,
            perimeter: None,
            mu_plus: None,
            mu_minus: None,
            extra: BTreeMap::new(),
            frame: None,
        }
    }

    fn col(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub params: BTreeMap<String, String>,
    pub rows: Vec<Row>,
    pub verdicts: BTreeMap<String, bool>,
    /// How the finite-grid rows relate to the limit statement they illustrate.
    pub notes: Vec<String>,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub frames: Vec<Frame>,
}

impl ScenarioReport {
    fn new(scenario: &str) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            params: BTreeMap::new(),
            rows: Vec::new(),
            verdicts: BTreeMap::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
            frames: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    /// Adds a row valued by the functional of `set` under `pair`, with its frame.
    fn push_valued(&mut self, mut row: Row, name: String, set: CellSet, pair: &SignedPair) -> Result<()> {
        let f = functional(pair, &EnergyMode::FullSpace, &set)?;
        row.value = Some(f.value);
        row.perimeter = Some(f.perimeter);
        row.mu_plus = Some(f.mu_plus);
        row.mu_minus = Some(f.mu_minus);
        row.frame = Some(self.frames.len());
        self.frames.push(Frame {
            name,
            set,
            pair: pair.clone(),
        });
        self.rows.push(row);
        Ok(())
    }

    /// Recomputes every valued row from its frame.
    pub fn rows_consistent(&self) -> Result<bool> {
        for row in &self.rows {
            if let (Some(v), Some(i)) = (&row.value, row.frame) {
                let fr = &self.frames[i];
                if functional(&fr.pair, &EnergyMode::FullSpace, &fr.set)?.value != *v {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Column names of `series.csv`.
    pub fn csv_header(&self) -> Vec<String> {
        let mut keys: Vec<String> = self
            .rows
            .iter()
            .flat_map(|r| r.extra.keys().cloned())
            .collect();
        keys.sort();
        keys.dedup();
        let mut header: Vec<String> = ["k", "grid", "value", "perimeter", "mu_plus", "mu_minus"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(keys);
        header
    }
}

fn opt(r: &Option<Rational>) -> String {
    r.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

/// Writes `report.json`, `series.csv` and one SVG per frame into `dir`.
pub fn write_scenario(report: &mut ScenarioReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for (i, frame) in report.frames.iter().enumerate() {
        let name = format!("frame_{i:03}.svg");
        let svg = svg::render(Some(&frame.set), &frame.pair, &frame.name);
        let p = dir.join(&name);
        fs::write(&p, svg)?;
        paths.push(p);
        names.push(name);
    }
    let header = report.csv_header();
    let csv_path = dir.join("series.csv");
    {
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(&header)?;
        for r in &report.rows {
            let mut rec = vec![
                r.k.to_string(),
                r.grid.clone(),
                opt(&r.value),
                opt(&r.perimeter),
                opt(&r.mu_plus),
                opt(&r.mu_minus),
            ];
            for key in &header[6..] {
                rec.push(r.extra.get(key).cloned().unwrap_or_default());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    paths.push(csv_path);
    names.push("series.csv".into());
    names.push("report.json".into());
    report.artifacts = names;
    let json_path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&*report)?;
    text.push('\n');
    fs::write(&json_path, text)?;
    paths.push(json_path);
    Ok(paths)
}

/// Scenario names accepted by [`run_named`].
pub const SCENARIOS: &[&str] = &[
    "tentacle",
    "runaway_slab",
    "convex_threshold",
    "capacity_scaling",
    "pseudoconvex",
    "interval_clusters",
    "refinement",
];

/// Runs a scenario by name with `key=value` parameters; unknown keys are rejected.
pub fn run_named(name: &str, params: &BTreeMap<String, String>) -> Result<ScenarioReport> {
    use crate::error::Error;
    use crate::parse_rational;

    let allowed: &[&str] = match name {
        "tentacle" => &["w", "lengths", "widths"],
        "runaway_slab" => &["l", "shifts", "weight"],
        "convex_threshold" => &["size", "thetas"],
        "capacity_scaling" => &["ks"],
        "pseudoconvex" => &["rects"],
        "interval_clusters" => &["ls", "w", "cap"],
        "refinement" => &["of", "sizes"],
        _ => {
            return Err(Error::Validation(format!(
                "unknown scenario {name:?}; expected one of {}",
                SCENARIOS.join(", ")
            )))
        }
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Validation(format!("unknown parameter {k:?} for {name}")));
    }
    let get = |k: &str| params.get(k).map(String::as_str);
    let list = |k: &str, default: &str| -> Result<Vec<usize>> {
        get(k)
            .unwrap_or(default)
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Validation(format!("{k}: not an integer: {s:?}")))
            })
            .collect()
    };
    let rational = |k: &str, default: &str| parse_rational(get(k).unwrap_or(default));
    match name {
        "tentacle" => run_tentacle(&rational("w", "2")?, &list("lengths", "1,2,4,8")?, &list("widths", "1")?),
        "runaway_slab" => run_runaway_slab(
            list("l", "3")?[0],
            &list("shifts", "0,4,8,16")?,
            &rational("weight", "2")?,
        ),
        "convex_threshold" => {
            let thetas = get("thetas")
                .unwrap_or("1/2,1,2")
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            run_convex_threshold(list("size", "2")?[0], &thetas)
        }
        "capacity_scaling" => run_capacity_scaling(&list("ks", "1,2,3,4,5,6,7,8,9,10,11,12")?),
        "pseudoconvex" => {
            let rects = get("rects")
                .unwrap_or("1x1,2x1,2x2,3x2,4x3")
                .split(',')
                .map(|s| {
                    let (a, b) = s
                        .split_once('x')
                        .ok_or_else(|| Error::Validation(format!("rects: expected AxB, got {s:?}")))?;
                    let p = |t: &str| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Validation(format!("rects: bad size {s:?}")))
                    };
                    Ok((p(a)?, p(b)?))
                })
                .collect::<Result<Vec<_>>>()?;
            run_pseudoconvex(&rects)
        }
        "interval_clusters" => run_interval_clusters(
            &list("ls", "1,2,3,4")?,
            &rational("w", "1")?,
            list("cap", "24")?[0],
        ),
        "refinement" => {
            let of = match get("of").unwrap_or("tentacle") {
                "tentacle" => RefinedScenario::Tentacle,
                "runaway_slab" => RefinedScenario::RunawaySlab,
                "convex" => RefinedScenario::Convex,
                other => {
                    return Err(Error::Validation(format!(
                        "refinement: unknown scenario {other:?}"
                    )))
                }
            };
            run_refinement(of, &list("sizes", "1,2,3,4")?)
        }
        _ => unreachable!("validated above"),
    }
}
