//! Scenario configs, run reports, and the pipeline behind the CLI.
//!
//! A config is one JSON document; a run produces one deterministic report
//! plus optional CSV/plot attachments. Reports are byte-identical across
//! runs of the same config and tool version (timings go to the log, not
//! the report).

use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::chaincore::{disjoint_union, CellComplex, CoefficientSpec};
use crate::homology::{homology, subadditivity_quotient, HomologySummary};
use crate::levelset::{
    grid::sweep_grid, sweep_pl, PLScalarField, PlCriticalVertex, SweepKind, SweepTable,
};
use crate::mechanics::{
    circle_bundle, circle_bundle_fiber, collapsed_circle_bundle, genus2_with_height,
    pendulum_scenario, reference_complex_by_name, rtbp_scenario, surfaces, nbody_query,
};
use crate::morserules::{
    check_conformance, declared_from_pl, verdict, ConformanceReport, CriticalPointRecord,
    LevelPassQuery, Verdict,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            ScenarioError::Internal(_) => 3,
        }
    }
}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Config(msg.into()))
}

/// Exact rational from `p/q`, integer, or decimal notation.
pub fn parse_rational(s: &str) -> Result<BigRational, ScenarioError> {
    let t = s.trim();
    if t.is_empty() {
        return cfg_err("empty rational");
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: num_bigint::BigInt = num
            .trim()
            .parse()
            .map_err(|_| ScenarioError::Config(format!("bad numerator in {s:?}")))?;
        let d: num_bigint::BigInt = den
            .trim()
            .parse()
            .map_err(|_| ScenarioError::Config(format!("bad denominator in {s:?}")))?;
        if d == 0.into() {
            return cfg_err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let digits = format!(
            "{}{}",
            int_part.trim_start_matches(['+', '-']),
            frac_part
        );
        if frac_part.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return cfg_err(format!("bad decimal {s:?}"));
        }
        let n: num_bigint::BigInt = digits
            .parse()
            .map_err(|_| ScenarioError::Config(format!("bad decimal {s:?}")))?;
        let d = num_bigint::BigInt::from(10u32).pow(frac_part.len() as u32);
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: num_bigint::BigInt = t
        .parse()
        .map_err(|_| ScenarioError::Config(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(n))
}

/// A numeric scenario input: exact rational string or a JSON number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NumberParam {
    Text(String),
    Int(i64),
    Float(f64),
}

impl NumberParam {
    pub fn to_rational(&self) -> Result<BigRational, ScenarioError> {
        match self {
            NumberParam::Text(s) => parse_rational(s),
            NumberParam::Int(n) => Ok(BigRational::from_integer((*n).into())),
            NumberParam::Float(x) => BigRational::from_float(*x)
                .ok_or_else(|| ScenarioError::Config(format!("non-finite number {x}"))),
        }
    }

    pub fn to_f64(&self) -> Result<f64, ScenarioError> {
        match self {
            NumberParam::Text(s) => Ok(crate::levelset::rational_to_f64(&parse_rational(s)?)),
            NumberParam::Int(n) => Ok(*n as f64),
            NumberParam::Float(x) => Ok(*x),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LevelsSpec {
    Auto(String),
    List(Vec<NumberParam>),
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// One scenario: kind plus kind-specific parameters.
#[derive(Debug, Clone, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(flatten)]
    pub kind: ScenarioKind,
    /// Coefficient systems, parsed as `Q | Fp:<p> | Z | Zk:<k>`.
    #[serde(default)]
    pub coefficients: Vec<String>,
    #[serde(default)]
    pub levels: Option<LevelsSpec>,
    /// Also emit CSV / plot series attachments.
    #[serde(default)]
    pub csv: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// A named reference complex, optionally compared with a second one.
    Reference {
        name: String,
        #[serde(default)]
        compare_with: Option<String>,
    },
    /// A built-in PL field model: `sphere:<m>`, `torus[:PxQ]`, `genus2`,
    /// or `rp2-perfect`.
    PlField {
        model: String,
        #[serde(default)]
        sublevel: bool,
    },
    /// Explicit grid samples (row-major, `nx * ny` values).
    Grid {
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        spacing: (f64, f64),
        values: Vec<f64>,
        #[serde(default)]
        mask: Option<Vec<bool>>,
    },
    /// Circle bundle over a closed surface with a given Euler number.
    Bundle {
        base: String,
        euler: i64,
    },
    /// Quadratic spherical pendulum at energy `h`.
    Pendulum { h: NumberParam },
    /// Restricted 3-body problem at mass ratio `mu`.
    Rtbp {
        mu: f64,
        #[serde(default)]
        window: Option<[f64; 4]>,
        #[serde(default)]
        resolution: Option<usize>,
    },
    /// Planar n-body verdict query.
    Nbody {
        n: usize,
        #[serde(default)]
        symmetric_pair: bool,
    },
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
        if cfg.schema != SCHEMA_VERSION {
            return cfg_err(format!(
                "unsupported schema {} (tool supports {SCHEMA_VERSION})",
                cfg.schema
            ));
        }
        Ok(cfg)
    }

    pub fn coefficient_specs(&self) -> Result<Vec<CoefficientSpec>, ScenarioError> {
        if self.coefficients.is_empty() {
            return Ok(vec![CoefficientSpec::Rationals, CoefficientSpec::Integers]);
        }
        self.coefficients
            .iter()
            .map(|s| {
                CoefficientSpec::parse(s).map_err(|e| ScenarioError::Config(e.to_string()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunCommand {
    Sweep,
    Verdict,
    Conformance,
    Example,
}

impl RunCommand {
    pub fn name(&self) -> &'static str {
        match self {
            RunCommand::Sweep => "sweep",
            RunCommand::Verdict => "verdict",
            RunCommand::Conformance => "conformance",
            RunCommand::Example => "example",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct NamedSummary {
    pub name: String,
    pub summary: HomologySummary,
}

#[derive(Debug, Serialize)]
pub struct NamedVerdict {
    pub name: String,
    pub query: LevelPassQuery,
    pub verdict: Verdict,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Default, Serialize)]
pub struct ReportBody {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub summaries: Vec<NamedSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<(String, SweepTable)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<NamedVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conformance: Option<ConformanceReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub equilibria: Vec<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: ToolInfo,
    pub subcommand: &'static str,
    pub config: Value,
    pub results: ReportBody,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// A run's full output: the report plus named file attachments.
#[derive(Debug)]
pub struct RunOutputs {
    pub report: RunReport,
    pub attachments: Vec<(String, String)>,
}

impl RunOutputs {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }

    /// True when every check in the report passed.
    pub fn all_checks_pass(&self) -> bool {
        self.report.results.checks.iter().all(|c| c.passed)
    }
}

fn tool_info() -> ToolInfo {
    ToolInfo {
        name: "morse-levels",
        version: env!("CARGO_PKG_VERSION"),
    }
}

fn config_echo(cfg: &ScenarioConfig, raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(format!("{cfg:?}")))
}

fn validated(c: CellComplex, what: &str) -> Result<CellComplex, ScenarioError> {
    let report = c.validate();
    if !report.is_valid() {
        return Err(ScenarioError::Internal(format!(
            "{what} failed chain validation: {report}"
        )));
    }
    Ok(c)
}

/// Builds a built-in PL field model by name.
pub fn pl_field_model(model: &str) -> Result<PLScalarField, ScenarioError> {
    if let Some(m) = model.strip_prefix("sphere:") {
        let m: usize = m
            .parse()
            .map_err(|_| ScenarioError::Config(format!("bad sphere dimension in {model:?}")))?;
        if m == 0 || m > 4 {
            return cfg_err("sphere model supports dimensions 1..=4");
        }
        let base = crate::chaincore::SimplicialComplex::simplex_boundary(m + 1);
        let values = (0..base.n_vertices())
            .map(|i| BigRational::from_integer((i as i64).into()))
            .collect();
        return PLScalarField::new(base, values)
            .map_err(|e| ScenarioError::Config(e.to_string()));
    }
    if model == "torus" || model.starts_with("torus:") {
        let (p, q) = match model.strip_prefix("torus:") {
            None => (8, 8),
            Some(spec) => {
                let (p, q) = spec
                    .split_once('x')
                    .ok_or_else(|| ScenarioError::Config(format!("bad torus size {spec:?}")))?;
                (
                    p.parse()
                        .map_err(|_| ScenarioError::Config("bad torus size".into()))?,
                    q.parse()
                        .map_err(|_| ScenarioError::Config("bad torus size".into()))?,
                )
            }
        };
        if p < 4 || q < 4 {
            return cfg_err("torus grid needs at least 4x4");
        }
        return Ok(surfaces::torus_height_field(p, q));
    }
    if model == "genus2" {
        let (surface, values) =
            genus2_with_height(6, 8).map_err(|e| ScenarioError::Config(e.to_string()))?;
        return PLScalarField::new(surface.complex, values)
            .map_err(|e| ScenarioError::Config(e.to_string()));
    }
    if model == "rp2-perfect" {
        let base = surfaces::rp2_six_vertex();
        let values = [1i64, 1, 2, 2, 3, 3]
            .into_iter()
            .map(|v| BigRational::from_integer(v.into()))
            .collect();
        return PLScalarField::new(base, values)
            .map_err(|e| ScenarioError::Config(e.to_string()));
    }
    cfg_err(format!("unknown pl_field model {model:?}"))
}

fn pl_levels(
    field: &PLScalarField,
    spec: &Option<LevelsSpec>,
) -> Result<Vec<BigRational>, ScenarioError> {
    match spec {
        None | Some(LevelsSpec::Auto(_)) => {
            if let Some(LevelsSpec::Auto(word)) = spec {
                if word != "auto" {
                    return cfg_err(format!("levels must be a list or \"auto\", got {word:?}"));
                }
            }
            field
                .auto_levels()
                .map_err(|e| ScenarioError::Internal(e.to_string()))
        }
        Some(LevelsSpec::List(list)) => {
            let mut levels: Vec<BigRational> = list
                .iter()
                .map(|n| n.to_rational())
                .collect::<Result<_, _>>()?;
            levels.sort();
            Ok(levels)
        }
    }
}

/// Declared critical records from PL lower-link analysis.
fn pl_declared(field: &PLScalarField) -> Result<Vec<(f64, Vec<CriticalPointRecord>)>, ScenarioError> {
    let crits = field
        .critical_vertices()
        .map_err(|e| ScenarioError::Internal(e.to_string()))?;
    let records: Vec<(BigRational, CriticalPointRecord)> = crits
        .iter()
        .filter(|c| c.is_critical())
        .map(|c: &PlCriticalVertex| {
            let value = crate::levelset::rational_to_f64(&c.value);
            let rec = match c.index() {
                Some(k) => CriticalPointRecord::new(value, k),
                None => {
                    let mut r = CriticalPointRecord::new(value, 0);
                    r.non_degenerate = false;
                    r
                }
            };
            (c.value.clone(), rec)
        })
        .collect();
    Ok(declared_from_pl(&records))
}

/// Runs one scenario. `raw_config` is echoed into the report.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    raw_config: &str,
    command: RunCommand,
) -> Result<RunOutputs, ScenarioError> {
    let compatible = matches!(
        (&cfg.kind, command),
        (ScenarioKind::Reference { .. }, RunCommand::Sweep)
            | (ScenarioKind::PlField { .. }, RunCommand::Sweep | RunCommand::Conformance)
            | (ScenarioKind::Grid { .. }, RunCommand::Sweep)
            | (ScenarioKind::Rtbp { .. }, RunCommand::Sweep)
            | (ScenarioKind::Bundle { .. }, RunCommand::Verdict)
            | (ScenarioKind::Pendulum { .. }, RunCommand::Verdict)
            | (ScenarioKind::Nbody { .. }, RunCommand::Verdict)
    );
    if !compatible {
        return cfg_err(format!(
            "subcommand {:?} does not apply to scenario kind {:?}",
            command.name(),
            kind_name(&cfg.kind)
        ));
    }
    let coeffs = cfg.coefficient_specs()?;
    let mut body = ReportBody::default();
    let mut warnings = Vec::new();
    let mut attachments = Vec::new();

    match (&cfg.kind, command) {
        (ScenarioKind::Reference { name, compare_with }, _) => {
            let c = validated(
                reference_complex_by_name(name)
                    .map_err(|e| ScenarioError::Config(e.to_string()))?,
                name,
            )?;
            for coeff in &coeffs {
                body.summaries.push(NamedSummary {
                    name: format!("{name}[{coeff}]"),
                    summary: homology(&c, coeff)
                        .map_err(|e| ScenarioError::Config(e.to_string()))?,
                });
            }
            if let Some(other) = compare_with {
                let oc = validated(
                    reference_complex_by_name(other)
                        .map_err(|e| ScenarioError::Config(e.to_string()))?,
                    other,
                )?;
                for coeff in &coeffs {
                    let a = homology(&c, coeff)
                        .map_err(|e| ScenarioError::Config(e.to_string()))?;
                    let b = homology(&oc, coeff)
                        .map_err(|e| ScenarioError::Config(e.to_string()))?;
                    let equal = a.dims == b.dims;
                    body.summaries.push(NamedSummary {
                        name: format!("{other}[{coeff}]"),
                        summary: b,
                    });
                    body.checks.push(Check {
                        name: format!("{name} vs {other} over {coeff}"),
                        passed: true,
                        detail: if equal { "equal".into() } else { "different".into() },
                    });
                }
            }
        }
        (ScenarioKind::PlField { model, sublevel }, RunCommand::Sweep) => {
            let field = pl_field_model(model)?;
            let levels = pl_levels(&field, &cfg.levels)?;
            let kind = if *sublevel {
                SweepKind::Sublevel
            } else {
                SweepKind::LevelSet
            };
            for coeff in &coeffs {
                let table = sweep_pl(&field, &levels, coeff, kind)
                    .map_err(|e| ScenarioError::Internal(e.to_string()))?;
                if cfg.csv {
                    attachments.push((format!("sweep_{coeff}.csv"), table.to_csv()));
                    let max_dim = table
                        .entries
                        .iter()
                        .map(|e| e.summary.dims.len())
                        .max()
                        .unwrap_or(0);
                    for l in 0..max_dim {
                        attachments
                            .push((format!("betti_{l}_{coeff}.dat"), table.gnuplot_series(l)));
                    }
                }
                body.sweeps.push((coeff.to_string(), table));
            }
        }
        (ScenarioKind::PlField { model, .. }, RunCommand::Conformance) => {
            let field = pl_field_model(model)?;
            let levels = pl_levels(&field, &cfg.levels)?;
            let m = field.base().dim();
            let coeff = coeffs
                .iter()
                .find(|c| c.is_field())
                .cloned()
                .unwrap_or(CoefficientSpec::Rationals);
            let table = sweep_pl(&field, &levels, &coeff, SweepKind::LevelSet)
                .map_err(|e| ScenarioError::Internal(e.to_string()))?;
            let declared = pl_declared(&field)?;
            let report = check_conformance(&table, &declared, m)
                .map_err(|e| ScenarioError::Config(e.to_string()))?;
            body.checks.push(Check {
                name: format!("conformance of {model}"),
                passed: report.is_conformant(),
                detail: format!("{} violations", report.violations()),
            });
            // subadditivity of consecutive sublevel pairs
            let sub_ok = subadditivity_over_levels(&field, &levels, &coeff)?;
            body.checks.push(Check {
                name: "sublevel subadditivity (1+t)Q(t)".into(),
                passed: sub_ok,
                detail: format!("{} level pairs", levels.len().saturating_sub(1)),
            });
            body.sweeps.push((coeff.to_string(), table));
            body.conformance = Some(report);
        }
        (ScenarioKind::Grid { nx, ny, origin, spacing, values, mask }, _) => {
            if values.len() != nx * ny {
                return cfg_err(format!(
                    "grid needs {} values, got {}",
                    nx * ny,
                    values.len()
                ));
            }
            if let Some(m) = mask {
                if m.len() != nx * ny {
                    return cfg_err("mask length mismatch".to_string());
                }
            }
            let masked = mask.clone().unwrap_or_else(|| vec![false; nx * ny]);
            let grid = crate::levelset::grid::GridField::from_values(
                *nx, *ny, *origin, *spacing, values.clone(), masked,
            );
            let crits = grid.critical_points();
            body.equilibria = crits
                .iter()
                .map(|c| serde_json::to_value(c).expect("serializable"))
                .collect();
            let levels = grid_levels(cfg, &crits)?;
            for coeff in &coeffs {
                let table = sweep_grid(&grid, &levels, coeff)
                    .map_err(|e| ScenarioError::Internal(e.to_string()))?;
                if cfg.csv {
                    attachments.push((format!("sweep_{coeff}.csv"), table.to_csv()));
                }
                body.sweeps.push((coeff.to_string(), table));
            }
        }
        (ScenarioKind::Bundle { base, euler }, _) => {
            let surface = bundle_base(base)?;
            let bundle = validated(
                circle_bundle(&surface, *euler)
                    .map_err(|e| ScenarioError::Config(e.to_string()))?,
                "circle bundle",
            )?;
            for coeff in &coeffs {
                body.summaries.push(NamedSummary {
                    name: format!("bundle(e={euler})[{coeff}]"),
                    summary: homology(&bundle, coeff)
                        .map_err(|e| ScenarioError::Config(e.to_string()))?,
                });
            }
            let fiber = circle_bundle_fiber(&surface);
            let order = crate::homology::cycle_class_order(&bundle, &fiber)
                .map_err(|e| ScenarioError::Internal(e.to_string()))?;
            body.notes.push(format!("fiber class order: {order}"));
            let q = LevelPassQuery::new(
                4,
                vec![CriticalPointRecord::new(0.0, 2).global_max(true)],
            )
            .with_bundle(crate::morserules::BundleContext {
                rank: 2,
                base_closed: true,
                base_orientable: true,
                bundle_orientable: true,
                euler_number: Some(*euler),
                trivial_outside_disk: true,
                is_cotangent: false,
            });
            let v = verdict(&q).map_err(|e| ScenarioError::Config(e.to_string()))?;
            body.verdicts.push(NamedVerdict {
                name: "global-max pass".into(),
                query: q,
                verdict: v,
            });
        }
        (ScenarioKind::Pendulum { h }, _) => {
            let h = h.to_rational()?;
            let scenario =
                pendulum_scenario(&h).map_err(|e| ScenarioError::Config(e.to_string()))?;
            let model = validated(scenario.level_model.clone(), "pendulum level model")?;
            for coeff in &coeffs {
                body.summaries.push(NamedSummary {
                    name: format!("level(h={h})[{coeff}]"),
                    summary: homology(&model, coeff)
                        .map_err(|e| ScenarioError::Config(e.to_string()))?,
                });
            }
            for (name, q) in [
                ("lower maximum", &scenario.lower_max_query),
                ("global maximum", &scenario.upper_max_query),
            ] {
                let v = verdict(q).map_err(|e| ScenarioError::Config(e.to_string()))?;
                body.verdicts.push(NamedVerdict {
                    name: name.into(),
                    query: q.clone(),
                    verdict: v,
                });
            }
            body.notes.push(format!("regime: {:?}", scenario.regime));
        }
        (ScenarioKind::Rtbp { mu, window, resolution }, _) => {
            let w = window.unwrap_or([-2.0, 2.0, -2.0, 2.0]);
            let res = resolution.unwrap_or(400);
            let scenario = rtbp_scenario(*mu, ((w[0], w[1]), (w[2], w[3])), res)
                .map_err(|e| ScenarioError::Config(e.to_string()))?;
            warnings.extend(scenario.warnings.clone());
            body.notes.push(format!(
                "collision mask: points within {:.6} of either primary are excluded; \
                 Hill-region homology is relative to these punctures",
                scenario.mask_radius
            ));
            body.equilibria = scenario
                .equilibria
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "name": e.name,
                        "location": [e.location.0, e.location.1],
                        "value": e.value,
                        "index": e.index,
                    })
                })
                .collect();
            let levels = match &cfg.levels {
                Some(LevelsSpec::List(list)) => {
                    let mut v: Vec<f64> =
                        list.iter().map(|n| n.to_f64()).collect::<Result<_, _>>()?;
                    v.sort_by(f64::total_cmp);
                    v
                }
                _ => scenario.suggested_levels(),
            };
            for coeff in &coeffs {
                let table = sweep_grid(&scenario.grid, &levels, coeff)
                    .map_err(|e| ScenarioError::Internal(e.to_string()))?;
                if cfg.csv {
                    attachments.push((format!("sweep_{coeff}.csv"), table.to_csv()));
                }
                body.sweeps.push((coeff.to_string(), table));
            }
        }
        (ScenarioKind::Nbody { n, symmetric_pair }, _) => {
            let q = nbody_query(*n, *symmetric_pair)
                .map_err(|e| ScenarioError::Config(e.to_string()))?;
            let v = verdict(&q).map_err(|e| ScenarioError::Config(e.to_string()))?;
            body.notes.push(format!(
                "verdict-only scenario: the reduced manifold has dimension {}, no complex model is built",
                q.m
            ));
            body.verdicts.push(NamedVerdict {
                name: format!("n={n} reduced level pass"),
                query: q,
                verdict: v,
            });
        }
        (kind, cmd) => {
            // unreachable behind the compatibility gate
            return Err(ScenarioError::Internal(format!(
                "unhandled scenario dispatch {:?}/{:?}",
                cmd.name(),
                kind_name(kind)
            )));
        }
    }

    Ok(RunOutputs {
        report: RunReport {
            schema: SCHEMA_VERSION,
            tool: tool_info(),
            subcommand: command.name(),
            config: config_echo(cfg, raw_config),
            results: body,
            warnings,
        },
        attachments,
    })
}

fn kind_name(kind: &ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Reference { .. } => "reference",
        ScenarioKind::PlField { .. } => "pl_field",
        ScenarioKind::Grid { .. } => "grid",
        ScenarioKind::Bundle { .. } => "bundle",
        ScenarioKind::Pendulum { .. } => "pendulum",
        ScenarioKind::Rtbp { .. } => "rtbp",
        ScenarioKind::Nbody { .. } => "nbody",
    }
}

fn bundle_base(name: &str) -> Result<crate::mechanics::SurfaceModel, ScenarioError> {
    if name == "sphere" {
        return Ok(surfaces::sphere_octahedron());
    }
    if let Some(g) = name.strip_prefix("genus:") {
        let g: usize = g
            .parse()
            .map_err(|_| ScenarioError::Config(format!("bad genus in {name:?}")))?;
        if g == 2 {
            let (surface, _) =
                genus2_with_height(6, 8).map_err(|e| ScenarioError::Internal(e.to_string()))?;
            return Ok(surface);
        }
        return cfg_err("only genus:2 bases are built");
    }
    cfg_err(format!("unknown bundle base {name:?} (sphere, genus:2)"))
}

fn grid_levels(
    cfg: &ScenarioConfig,
    crits: &[crate::levelset::grid::GridCriticalPoint],
) -> Result<Vec<f64>, ScenarioError> {
    match &cfg.levels {
        Some(LevelsSpec::List(list)) => {
            let mut v: Vec<f64> = list.iter().map(|n| n.to_f64()).collect::<Result<_, _>>()?;
            v.sort_by(f64::total_cmp);
            Ok(v)
        }
        _ => {
            let mut values: Vec<f64> = crits.iter().map(|c| c.value).collect();
            values.sort_by(f64::total_cmp);
            values.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            if values.is_empty() {
                return cfg_err("no critical values detected; pass explicit levels");
            }
            let mut levels = vec![values[0] - 1.0];
            for w in values.windows(2) {
                levels.push(0.5 * (w[0] + w[1]));
            }
            levels.push(values[values.len() - 1] + 1.0);
            Ok(levels)
        }
    }
}

/// Checks Poincare-polynomial subadditivity for each consecutive sublevel
/// pair through the excision pair (band, lower cap).
pub fn subadditivity_over_levels(
    field: &PLScalarField,
    levels: &[BigRational],
    coeff: &CoefficientSpec,
) -> Result<bool, ScenarioError> {
    for w in levels.windows(2) {
        if !subadditivity_holds(field, &w[0], &w[1], coeff)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn subadditivity_holds(
    field: &PLScalarField,
    a: &BigRational,
    b: &BigRational,
    coeff: &CoefficientSpec,
) -> Result<bool, ScenarioError> {
    let internal = |e: crate::levelset::LevelsetError| ScenarioError::Internal(e.to_string());
    let sub_a = field.sublevel(a).map_err(internal)?;
    let sub_b = field.sublevel(b).map_err(internal)?;
    let p_a = homology(&sub_a.complex, coeff)
        .map_err(|e| ScenarioError::Internal(e.to_string()))?
        .poincare();
    let p_b = homology(&sub_b.complex, coeff)
        .map_err(|e| ScenarioError::Internal(e.to_string()))?
        .poincare();
    // H(M^b, M^a) by excision: the band rel its lower cap
    let band = field.region(Some(a), Some(b)).map_err(internal)?;
    let cap: BTreeSet<crate::chaincore::CellId> = band.lower_cap.iter().copied().collect();
    let p_rel = crate::homology::relative_homology(&band.complex, &cap, coeff)
        .map_err(|e| ScenarioError::Internal(e.to_string()))?
        .poincare();
    Ok(subadditivity_quotient(&p_a, &p_rel, &p_b).is_some())
}

/// Named example runs (`morse-levels example <name>`): worked examples
/// wired to computed complexes and the rule engine.
pub fn named_example(name: &str) -> Result<RunOutputs, ScenarioError> {
    let mut body = ReportBody::default();
    match name {
        "rp2-no-change" => {
            let field = pl_field_model("rp2-perfect")?;
            let below = parse_rational("3/2")?;
            let above = parse_rational("5/2")?;
            let internal = |e: crate::levelset::LevelsetError| ScenarioError::Internal(e.to_string());
            let s_below = validated(field.slice(&below).map_err(internal)?, "slice below")?;
            let s_above = validated(field.slice(&above).map_err(internal)?, "slice above")?;
            for coeff in [CoefficientSpec::PrimeField(2), CoefficientSpec::Integers] {
                let hb = homology(&s_below, &coeff)
                    .map_err(|e| ScenarioError::Internal(e.to_string()))?;
                let ha = homology(&s_above, &coeff)
                    .map_err(|e| ScenarioError::Internal(e.to_string()))?;
                body.checks.push(Check {
                    name: format!("level summaries equal across the middle value over {coeff}"),
                    passed: hb.dims == ha.dims,
                    detail: format!("below {hb}, above {ha}"),
                });
                body.summaries.push(NamedSummary {
                    name: format!("below[{coeff}]"),
                    summary: hb,
                });
                body.summaries.push(NamedSummary {
                    name: format!("above[{coeff}]"),
                    summary: ha,
                });
            }
            let q = LevelPassQuery::new(2, vec![CriticalPointRecord::new(2.0, 1)]);
            let v = verdict(&q).map_err(|e| ScenarioError::Config(e.to_string()))?;
            body.checks.push(Check {
                name: "engine verdict MAY_NOT_CHANGE".into(),
                passed: v.outcome == crate::morserules::Outcome::MayNotChange,
                detail: v.rule.clone(),
            });
            body.verdicts.push(NamedVerdict {
                name: "middle critical value".into(),
                query: q,
                verdict: v,
            });
        }
        "handle-deltas" => {
            handle_delta_example(&mut body)?;
        }
        "pendulum-trichotomy" => {
            pendulum_example(&mut body)?;
        }
        "euler-trichotomy" => {
            euler_example(&mut body)?;
        }
        "lens-41" => {
            lens_example(&mut body)?;
        }
        other => {
            return cfg_err(format!(
                "unknown example {other:?} (rp2-no-change, handle-deltas, pendulum-trichotomy, euler-trichotomy, lens-41)"
            ));
        }
    }
    Ok(RunOutputs {
        report: RunReport {
            schema: SCHEMA_VERSION,
            tool: tool_info(),
            subcommand: "example",
            config: serde_json::json!({ "example": name }),
            results: body,
            warnings: Vec::new(),
        },
        attachments: Vec::new(),
    })
}

fn summarize(
    body: &mut ReportBody,
    name: &str,
    c: &CellComplex,
    coeff: &CoefficientSpec,
) -> Result<HomologySummary, ScenarioError> {
    let h = homology(c, coeff).map_err(|e| ScenarioError::Internal(e.to_string()))?;
    body.summaries.push(NamedSummary {
        name: format!("{name}[{coeff}]"),
        summary: h.clone(),
    });
    Ok(h)
}

/// The three handle examples: deltas realized by computed homology and
/// checked against the admissible sets.
fn handle_delta_example(body: &mut ReportBody) -> Result<(), ScenarioError> {
    use crate::morserules::allowed_deltas;
    let q = CoefficientSpec::Rationals;
    let sphere2 = reference_complex_by_name("sphere:2").unwrap();
    let torus = reference_complex_by_name("torus2").unwrap();
    let s3 = reference_complex_by_name("sphere:3").unwrap();
    let s2s1 = reference_complex_by_name("s2xs1").unwrap();
    let two_spheres = disjoint_union(&sphere2, &sphere2);

    let cases: [(&str, &CellComplex, &CellComplex, usize, usize, Vec<i64>); 3] = [
        ("T^3 saddle: S^2 -> T^2", &sphere2, &torus, 1, 3, vec![0, 2, 0]),
        ("4-manifold: S^3 -> S^2 x S^1", &s3, &s2s1, 1, 4, vec![0, 1, 1, 0]),
        ("merge: S^2 | S^2 -> S^2", &two_spheres, &sphere2, 1, 3, vec![-1, 0, -1]),
    ];
    for (name, before, after, k, m, expected) in cases {
        let hb = summarize(body, &format!("{name} (before)"), before, &q)?;
        let ha = summarize(body, &format!("{name} (after)"), after, &q)?;
        let n = m; // level sets have dimension m-1; pad to m entries
        let deltas: Vec<i64> = (0..n)
            .map(|l| ha.betti(l) as i64 - hb.betti(l) as i64)
            .collect();
        let exact = deltas == expected;
        let rule = allowed_deltas(k, m).map_err(|e| ScenarioError::Config(e.to_string()))?;
        let admissible = rule.check(&deltas).is_empty();
        body.checks.push(Check {
            name: format!("{name}: deltas {deltas:?}"),
            passed: exact && admissible,
            detail: format!("expected {expected:?}, admissible: {admissible}"),
        });
    }
    Ok(())
}

fn pendulum_example(body: &mut ReportBody) -> Result<(), ScenarioError> {
    let band = pendulum_scenario(&parse_rational("0")?)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let disk = pendulum_scenario(&parse_rational("1")?)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let full = pendulum_scenario(&parse_rational("2")?)
        .map_err(|e| ScenarioError::Config(e.to_string()))?;
    let z = CoefficientSpec::Integers;
    let hb = summarize(body, "band level (S^2 x S^1)", &band.level_model, &z)?;
    let hd = summarize(body, "disk level (S^3)", &disk.level_model, &z)?;
    let hf = summarize(body, "full level (RP^3)", &full.level_model, &z)?;
    body.checks.push(Check {
        name: "integral H_1 trichotomy Z / 0 / Z_2".into(),
        passed: hb.betti(1) == 1
            && hb.torsion(1).is_empty()
            && hd.betti(1) == 0
            && hd.torsion(1).is_empty()
            && hf.betti(1) == 0
            && hf.torsion(1) == [2],
        detail: format!("{hb} | {hd} | {hf}"),
    });
    // the three models pairwise differ integrally
    body.checks.push(Check {
        name: "levels pairwise distinguished".into(),
        passed: hb.dims != hd.dims && hb.dims != hf.dims && hd.dims != hf.dims,
        detail: "integral summaries".into(),
    });
    for (name, q) in [
        ("lower maximum", band.lower_max_query.clone()),
        ("global maximum", band.upper_max_query.clone()),
    ] {
        let v = verdict(&q).map_err(|e| ScenarioError::Config(e.to_string()))?;
        body.checks.push(Check {
            name: format!("{name} pass must change"),
            passed: v.outcome == crate::morserules::Outcome::MustChange,
            detail: format!("rule {}, witness {:?}", v.rule, v.witness),
        });
        body.verdicts.push(NamedVerdict {
            name: name.into(),
            query: q,
            verdict: v,
        });
    }
    // witness check: the Z_2 witness distinguishes disk and full levels
    let k2 = CoefficientSpec::IntegersMod(2);
    let d2 = homology(&disk.level_model, &k2)
        .map_err(|e| ScenarioError::Internal(e.to_string()))?;
    let f2 = homology(&full.level_model, &k2)
        .map_err(|e| ScenarioError::Internal(e.to_string()))?;
    body.checks.push(Check {
        name: "Z_2 witness distinguishes the top pass".into(),
        passed: d2.dims != f2.dims,
        detail: format!("{d2} vs {f2}"),
    });
    Ok(())
}

fn euler_example(body: &mut ReportBody) -> Result<(), ScenarioError> {
    let base = surfaces::sphere_octahedron();
    let q = CoefficientSpec::Integers;
    for e in 0..=3i64 {
        let bundle = validated(
            circle_bundle(&base, e).map_err(|e| ScenarioError::Internal(e.to_string()))?,
            "bundle",
        )?;
        let fiber = circle_bundle_fiber(&base);
        let order = crate::homology::cycle_class_order(&bundle, &fiber)
            .map_err(|e| ScenarioError::Internal(e.to_string()))?;
        let expected = match e {
            0 => "inf".to_string(),
            e => e.to_string(),
        };
        body.checks.push(Check {
            name: format!("fiber order for e={e}"),
            passed: order.to_string() == expected,
            detail: format!("order {order}"),
        });
        summarize(body, &format!("bundle e={e}"), &bundle, &q)?;
    }
    // hopf: e=1 matches S^3 on both sides
    let hopf = circle_bundle(&base, 1).map_err(|e| ScenarioError::Internal(e.to_string()))?;
    let below = collapsed_circle_bundle(&surfaces::disk(6))
        .map_err(|e| ScenarioError::Internal(e.to_string()))?;
    let ha = homology(&hopf, &q).map_err(|e| ScenarioError::Internal(e.to_string()))?;
    let hb = homology(&below, &q).map_err(|e| ScenarioError::Internal(e.to_string()))?;
    body.checks.push(Check {
        name: "e=1 reproduces S^3 on both sides".into(),
        passed: ha.dims == hb.dims && ha.betti_vector(4) == vec![1, 0, 0, 1],
        detail: format!("above {ha}, below {hb}"),
    });
    // e=0 matches the product
    let product = crate::chaincore::product_complex(
        &base.complex.to_cell_complex(),
        &crate::mechanics::circle_cw(),
    );
    let b0 = circle_bundle(&base, 0).map_err(|e| ScenarioError::Internal(e.to_string()))?;
    let h0 = homology(&b0, &q).map_err(|e| ScenarioError::Internal(e.to_string()))?;
    let hp = homology(&product, &q).map_err(|e| ScenarioError::Internal(e.to_string()))?;
    body.checks.push(Check {
        name: "e=0 reproduces the product homology".into(),
        passed: h0.dims == hp.dims,
        detail: format!("{h0} vs {hp}"),
    });
    Ok(())
}

fn lens_example(body: &mut ReportBody) -> Result<(), ScenarioError> {
    let l4 = reference_complex_by_name("lens:4").unwrap();
    let s2s1 = reference_complex_by_name("s2xs1").unwrap();
    let z = CoefficientSpec::Integers;
    let f2 = CoefficientSpec::PrimeField(2);
    let hz_l = summarize(body, "L(4,1)", &l4, &z)?;
    let hz_s = summarize(body, "S^2 x S^1", &s2s1, &z)?;
    let h2_l = summarize(body, "L(4,1)", &l4, &f2)?;
    let h2_s = summarize(body, "S^2 x S^1", &s2s1, &f2)?;
    body.checks.push(Check {
        name: "integral H_1 distinguishes (Z_4 vs Z)".into(),
        passed: hz_l.dims != hz_s.dims
            && hz_l.torsion(1) == [4]
            && hz_s.betti(1) == 1,
        detail: format!("{hz_l} vs {hz_s}"),
    });
    body.checks.push(Check {
        name: "F_2 Betti numbers do not distinguish".into(),
        passed: h2_l.dims == h2_s.dims,
        detail: format!("{h2_l} vs {h2_s}"),
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-3").unwrap(), BigRational::from_integer((-3).into()));
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-1.5").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn config_parsing_and_unknown_kinds() {
        let cfg = ScenarioConfig::from_json(
            r#"{"kind": "pendulum", "h": "7/4", "coefficients": ["Q", "Z"]}"#,
        )
        .unwrap();
        assert!(matches!(cfg.kind, ScenarioKind::Pendulum { .. }));
        assert!(ScenarioConfig::from_json(r#"{"kind": "nope"}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"kind": "pendulum", "h": "1/4", "schema": 9}"#).is_err());
        assert!(ScenarioConfig::from_json("not json").is_err());
    }

    #[test]
    fn sweep_run_on_torus_is_deterministic() {
        let raw = r#"{"kind": "pl_field", "model": "torus:6x6", "coefficients": ["Q"], "csv": true}"#;
        let cfg = ScenarioConfig::from_json(raw).unwrap();
        let out1 = run_scenario(&cfg, raw, RunCommand::Sweep).unwrap();
        let out2 = run_scenario(&cfg, raw, RunCommand::Sweep).unwrap();
        assert_eq!(out1.report_json(), out2.report_json());
        assert!(!out1.attachments.is_empty());
        let (_, table) = &out1.report.results.sweeps[0];
        // auto levels bracket the critical range, so the end slices are empty
        assert_eq!(table.betti_series(0), vec![0, 1, 2, 1, 0]);
    }

    #[test]
    fn verdict_run_on_pendulum_names_the_rule() {
        let raw = r#"{"kind": "pendulum", "h": "7/4"}"#;
        let cfg = ScenarioConfig::from_json(raw).unwrap();
        let out = run_scenario(&cfg, raw, RunCommand::Verdict).unwrap();
        let top = &out.report.results.verdicts[1];
        assert_eq!(top.verdict.rule, "thm:closed_manifold(1)");
        assert_eq!(
            top.verdict.witness,
            Some(crate::morserules::Witness::Coefficients(
                CoefficientSpec::IntegersMod(2)
            ))
        );
    }

    #[test]
    fn named_examples_all_pass_their_checks() {
        for name in [
            "rp2-no-change",
            "handle-deltas",
            "pendulum-trichotomy",
            "euler-trichotomy",
            "lens-41",
        ] {
            let out = named_example(name).unwrap();
            assert!(
                out.all_checks_pass(),
                "{name}: {:?}",
                out.report.results.checks
            );
        }
        assert!(named_example("nope").is_err());
    }

    #[test]
    fn grid_kind_accepts_inline_values() {
        let raw = r#"{
            "kind": "grid", "nx": 9, "ny": 9,
            "origin": [-1.0, -1.0], "spacing": [0.25, 0.25],
            "values": [0,0,0,0,0,0,0,0,0,
                       0,1,1,1,1,1,1,1,0,
                       0,1,2,2,2,2,2,1,0,
                       0,1,2,3,3,3,2,1,0,
                       0,1,2,3,4,3,2,1,0,
                       0,1,2,3,3,3,2,1,0,
                       0,1,2,2,2,2,2,1,0,
                       0,1,1,1,1,1,1,1,0,
                       0,0,0,0,0,0,0,0,0],
            "levels": [0.5, 3.5],
            "coefficients": ["Q"]
        }"#;
        let cfg = ScenarioConfig::from_json(raw).unwrap();
        let out = run_scenario(&cfg, raw, RunCommand::Sweep).unwrap();
        let (_, table) = &out.report.results.sweeps[0];
        // below 0.5: the frame ring (an annulus); below 3.5: all but the peak
        assert_eq!(table.betti_series(1), vec![1, 1]);
    }

    #[test]
    fn wrong_subcommand_is_a_config_error() {
        let raw = r#"{"kind": "nbody", "n": 3}"#;
        let cfg = ScenarioConfig::from_json(raw).unwrap();
        let err = run_scenario(&cfg, raw, RunCommand::Conformance).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
