use std::path::PathBuf;

use serde_json::{json, Value};
use tgc_core::capacity::VERDICT_SIGMAS;
use tgc_core::measures::factorial;
use tgc_core::{
    check_volume_bm, covolume, equality_margin, reinhardt_volume, sweep, GeodesicSpec, SweepReport,
    TGrid,
};

use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{Cell, Report};
use crate::spec::{ParsedSet, SpecFile};

/// Interior parameter used for the equality check of `check-bm`.
pub const EQUALITY_T: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Capacity {
        spec: PathBuf,
        set: String,
    },
    Volume {
        spec: PathBuf,
        set: String,
    },
    Sweep {
        spec: PathBuf,
        set0: String,
        set1: String,
    },
    CheckBm {
        spec: PathBuf,
        set0: String,
        set1: String,
    },
    Geodesic {
        spec: PathBuf,
        set0: String,
        set1: String,
        t: f64,
        point: Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Capacity { .. } => "capacity",
            Command::Volume { .. } => "volume",
            Command::Sweep { .. } => "sweep",
            Command::CheckBm { .. } => "check-bm",
            Command::Geodesic { .. } => "geodesic",
        }
    }

    fn spec_path(&self) -> &PathBuf {
        match self {
            Command::Capacity { spec, .. }
            | Command::Volume { spec, .. }
            | Command::Sweep { spec, .. }
            | Command::CheckBm { spec, .. }
            | Command::Geodesic { spec, .. } => spec,
        }
    }

    fn set_names(&self) -> Vec<&str> {
        match self {
            Command::Capacity { set, .. } | Command::Volume { set, .. } => vec![set],
            Command::Sweep { set0, set1, .. }
            | Command::CheckBm { set0, set1, .. }
            | Command::Geodesic { set0, set1, .. } => vec![set0, set1],
        }
    }

    fn uses_grid(&self) -> bool {
        matches!(self, Command::Sweep { .. } | Command::CheckBm { .. })
    }
}

/// Result of a successful run: the rendered document plus any verdict that
/// failed beyond tolerance.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub rendered: String,
    pub failures: Vec<String>,
    /// The sets and configuration, for triage of failures.
    pub instance: Value,
}

fn config_header(command: &Command, config: &RunConfig, grid: Option<&TGrid>) -> Value {
    let mut header = json!({
        "command": command.name(),
        "spec": command.spec_path().display().to_string(),
        "sets": command.set_names(),
        "method": config.method,
        "tolerance": config.tolerance,
        "mc_samples": config.mc_samples,
        "seed": config.seed,
        "format": config.format,
    });
    if let Some(grid) = grid {
        header["t_grid"] = json!(grid.points());
    }
    if let Command::Geodesic { t, point, .. } = command {
        header["t"] = json!(t);
        header["point"] = json!(point);
    }
    header
}

fn instance(command: &Command, config: &Value, sets: &[&ParsedSet]) -> Value {
    let sets: serde_json::Map<String, Value> = sets
        .iter()
        .map(|s| {
            (
                s.spec.name.clone(),
                json!({
                    "kind": s.spec.kind,
                    "data": s.spec.data,
                    "log_generators": s.body.generators(),
                }),
            )
        })
        .collect();
    json!({"command": command.name(), "config": config, "sets": sets})
}

pub fn run(command: &Command, config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let file = SpecFile::load(command.spec_path())?;
    let sets = command
        .set_names()
        .iter()
        .map(|name| file.get(name))
        .collect::<Result<Vec<_>>>()?;
    let grid = if command.uses_grid() {
        Some(config.t_grid.resolve()?)
    } else {
        None
    };
    let header = config_header(command, config, grid.as_ref());
    let (report, failures) = match command {
        Command::Capacity { .. } => (capacity_report(sets[0], config, header.clone())?, vec![]),
        Command::Volume { .. } => (volume_report(sets[0], config, header.clone())?, vec![]),
        Command::Sweep { .. } => sweep_report(
            sets[0],
            sets[1],
            grid.as_ref().unwrap(),
            config,
            header.clone(),
        )?,
        Command::CheckBm { .. } => check_bm_report(
            sets[0],
            sets[1],
            grid.as_ref().unwrap(),
            config,
            header.clone(),
        )?,
        Command::Geodesic { t, point, .. } => {
            geodesic_report(sets[0], sets[1], *t, point, header.clone())?
        }
    };
    Ok(Outcome {
        rendered: report.render(config.format),
        failures,
        instance: instance(command, &header, &sets),
    })
}

fn capacity_report(set: &ParsedSet, config: &RunConfig, header: Value) -> Result<Report> {
    let covol = covolume(&set.body, config.method, &config.budget())?;
    let cap = covol.scaled(factorial(set.body.dim()));
    Ok(Report {
        command: "capacity",
        config: header,
        notes: vec![],
        columns: [
            "set",
            "method",
            "cap",
            "cap_err",
            "log_cap",
            "covolume",
            "evaluations",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![vec![
            Cell::Text(set.spec.name.clone()),
            Cell::Text(cap.method.as_str().into()),
            Cell::Num(cap.value),
            Cell::Num(cap.error),
            Cell::Num(cap.value.ln()),
            Cell::Num(covol.value),
            Cell::Num(cap.evaluations as f64),
        ]],
        result: json!({
            "set": set.spec.name,
            "cap": cap.value,
            "cap_err": cap.error,
            "log_cap": cap.value.ln(),
            "covolume": covol.value,
            "covolume_err": covol.error,
            "method": cap.method,
            "evaluations": cap.evaluations,
        }),
    })
}

fn volume_report(set: &ParsedSet, config: &RunConfig, header: Value) -> Result<Report> {
    let vol = reinhardt_volume(&set.body, config.method, &config.budget())?;
    Ok(Report {
        command: "volume",
        config: header,
        notes: vec![],
        columns: ["set", "method", "vol", "vol_err", "log_vol", "evaluations"]
            .map(String::from)
            .to_vec(),
        rows: vec![vec![
            Cell::Text(set.spec.name.clone()),
            Cell::Text(vol.method.as_str().into()),
            Cell::Num(vol.value),
            Cell::Num(vol.error),
            Cell::Num(vol.value.ln()),
            Cell::Num(vol.evaluations as f64),
        ]],
        result: json!({
            "set": set.spec.name,
            "vol": vol.value,
            "vol_err": vol.error,
            "log_vol": vol.value.ln(),
            "method": vol.method,
            "evaluations": vol.evaluations,
        }),
    })
}

pub const SWEEP_COLUMNS: [&str; 7] = [
    "t",
    "cap",
    "cap_err",
    "log_cap",
    "linear_bound",
    "geometric_bound",
    "margin_log",
];

fn sweep_failures(report: &SweepReport) -> Vec<String> {
    let v = &report.verdicts;
    let mut failures = Vec::new();
    if !v.dual_bm_holds {
        failures.push(format!(
            "dual Brunn-Minkowski violated (worst margin_log {})",
            report.worst_margins.margin_log
        ));
    }
    if !v.linear_bound_holds {
        failures.push(format!(
            "linear bound violated (worst margin {})",
            report.worst_margins.linear
        ));
    }
    if !v.equality_consistent {
        failures.push("equal bodies with nonzero margins".into());
    }
    failures
}

fn sweep_rows(report: &SweepReport) -> Vec<Vec<Cell>> {
    report
        .records
        .iter()
        .map(|r| {
            vec![
                Cell::Num(r.t),
                Cell::Num(r.cap),
                Cell::Num(r.cap_err),
                Cell::Num(r.log_cap),
                Cell::Num(r.linear_bound),
                Cell::Num(r.geometric_bound),
                Cell::Num(r.margin_log),
            ]
        })
        .collect()
}

fn sweep_report(
    a: &ParsedSet,
    b: &ParsedSet,
    grid: &TGrid,
    config: &RunConfig,
    header: Value,
) -> Result<(Report, Vec<String>)> {
    let report = sweep(&a.body, &b.body, grid, config.method, &config.budget())?;
    let failures = sweep_failures(&report);
    Ok((
        Report {
            command: "sweep",
            config: header,
            notes: vec![("verdicts", json!(report.verdicts))],
            columns: SWEEP_COLUMNS.map(String::from).to_vec(),
            rows: sweep_rows(&report),
            result: json!(report),
        },
        failures,
    ))
}

fn check_bm_report(
    a: &ParsedSet,
    b: &ParsedSet,
    grid: &TGrid,
    config: &RunConfig,
    header: Value,
) -> Result<(Report, Vec<String>)> {
    let budget = config.budget();
    let caps = sweep(&a.body, &b.body, grid, config.method, &budget)?;
    let vols = check_volume_bm(&a.body, &b.body, grid, config.method, &budget)?;
    let margin = equality_margin(&a.body, &b.body, EQUALITY_T, config.method, &budget)?;

    let equal = caps.verdicts.equality_case;
    let tolerance = VERDICT_SIGMAS * margin.error;
    // Strict positivity for distinct bodies is reported, but only a margin
    // below -tolerance (or a nonzero one for equal bodies) is a violation.
    let equality = json!({
        "t": EQUALITY_T,
        "value": margin.value,
        "error": margin.error,
        "equal_bodies": equal,
        "strictly_positive": margin.value > tolerance,
        "consistent": if equal { margin.value.abs() <= tolerance } else { margin.value >= -tolerance },
    });

    let mut failures = sweep_failures(&caps);
    if !vols.log_concave_holds {
        failures.push(format!(
            "volume log-concavity violated (worst margin_log {})",
            vols.worst_margin_log
        ));
    }
    if equal && margin.value.abs() > tolerance {
        failures.push(format!(
            "equality margin {} nonzero for equal bodies",
            margin.value
        ));
    }
    if !equal && margin.value < -tolerance {
        failures.push(format!("equality margin {} negative", margin.value));
    }

    let mut columns = SWEEP_COLUMNS.map(String::from).to_vec();
    columns.extend(["vol", "vol_err", "log_vol", "vol_margin_log"].map(String::from));
    let rows = sweep_rows(&caps)
        .into_iter()
        .zip(&vols.records)
        .map(|(mut row, v)| {
            row.extend([
                Cell::Num(v.vol),
                Cell::Num(v.vol_err),
                Cell::Num(v.log_vol),
                Cell::Num(v.margin_log),
            ]);
            row
        })
        .collect();
    let volume_verdict = json!({
        "log_concave_holds": vols.log_concave_holds,
        "worst_margin_log": vols.worst_margin_log,
    });
    Ok((
        Report {
            command: "check-bm",
            config: header,
            notes: vec![
                ("verdicts", json!(caps.verdicts)),
                ("volume", volume_verdict),
                ("equality_margin", equality.clone()),
            ],
            columns,
            rows,
            result: json!({"sweep": caps, "volume": vols, "equality_margin": equality}),
        },
        failures,
    ))
}

fn geodesic_report(
    a: &ParsedSet,
    b: &ParsedSet,
    t: f64,
    point: &[f64],
    header: Value,
) -> Result<(Report, Vec<String>)> {
    let spec = GeodesicSpec::new(a.body.clone(), b.body.clone(), t)?;
    let value = spec.geodesic_value(point)?;
    let in_level = spec.level_contains(point)?;
    let lower = spec.subgeodesic_bound(point)?;
    let mut failures = Vec::new();
    if lower > value.value + tgc_core::transform::LEVEL_TOLERANCE {
        failures.push(format!(
            "subgeodesic bound {lower} exceeds geodesic {}",
            value.value
        ));
    }

    let n = point.len();
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=n).map(|l| format!("s_{l}")));
    columns.push("value".into());
    columns.extend((1..=n).map(|l| format!("a_{l}")));
    columns.extend(["level_contains", "subgeodesic_bound"].map(String::from));
    let mut row = vec![Cell::Num(t)];
    row.extend(point.iter().map(|&s| Cell::Num(s)));
    row.push(Cell::Num(value.value));
    row.extend(value.maximizer.as_slice().iter().map(|&x| Cell::Num(x)));
    row.push(Cell::Bool(in_level));
    row.push(Cell::Num(lower));

    Ok((
        Report {
            command: "geodesic",
            config: header,
            notes: vec![],
            columns,
            rows: vec![row],
            result: json!({
                "t": t,
                "point": point,
                "value": value.value,
                "maximizer": value.maximizer,
                "level_contains": in_level,
                "subgeodesic_bound": lower,
            }),
        },
        failures,
    ))
}

/// Writes the rendered output to `--out`, or stdout when unset.
pub fn emit(outcome: &Outcome, config: &RunConfig) -> Result<()> {
    use std::io::Write;
    match &config.output {
        Some(path) => std::fs::write(path, &outcome.rendered).map_err(|source| {
            crate::error::CliError::Write {
                path: path.clone(),
                source,
            }
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth an error exit.
            let _ = stdout.write_all(outcome.rendered.as_bytes());
            let _ = stdout.flush();
            Ok(())
        }
    }
}
