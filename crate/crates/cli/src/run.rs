//! Command execution: spec resolution, the level-order cap, report
//! assembly, and exit-code mapping.
//!
//! Exit codes: 0 on a completed analysis, 2 on an invalid spec (parse,
//! file, build, or capacity problems), 3 when a precision contract runs
//! out.

use std::fmt;

use profdyn::analysis::{analyze, equivalence_report, orbit, pushforward_uniform};
use profdyn::metric::{build_metric, verify_isometry};
use profdyn::product::product_ergodicity;
use profdyn::schema::{build_system, BuiltMap, MapSpec, TowerSpec};
use profdyn::shift_factor::cylinder_frequencies;
use profdyn::{Dynamics, Tower};

use crate::parser::{parse_spec, MapAst, ParseError, SpecAst, TowerAst};
use crate::report::{
    CylinderReport, FamilyReport, IsometryReport, PrecisionLevel, PrecisionReport, ProductReport,
    rational_string, SCHEMA_VERSION,
};

/// Environment variable capping the largest admissible level order.
pub const MAX_ORDER_ENV: &str = "PROFDYN_MAX_ORDER";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("cannot read {path}: {message}")]
    File { path: String, message: String },
    #[error("invalid {MAX_ORDER_ENV}: {0}")]
    Env(String),
    #[error("level order {order} exceeds {MAX_ORDER_ENV} = {cap}")]
    OrderCap { order: u64, cap: u64 },
    #[error("{0}")]
    Core(#[from] profdyn::Error),
}

impl CliError {
    /// 3 for precision exhaustion, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                profdyn::Error::PrecisionExhausted { .. }
                | profdyn::Error::InsufficientPrecision { .. },
            ) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub metric: bool,
    pub depth_override: Option<usize>,
    pub format: OutputFormat,
    pub cylinders: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            metric: false,
            depth_override: None,
            format: OutputFormat::Json,
            cylinders: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitOptions {
    pub x: u64,
    pub level: usize,
    pub length: usize,
    /// Precision level of `x`; the tower depth when absent.
    pub input_level: Option<usize>,
    pub depth_override: Option<usize>,
}

fn override_depths(tower: &mut TowerAst, depth: usize) {
    match tower {
        TowerAst::Zp { depth: d, .. } => *d = depth,
        TowerAst::Prod(items) => items.iter_mut().for_each(|t| override_depths(t, depth)),
        TowerAst::TableFile(_) => {}
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::File {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::File {
        path: path.to_string(),
        message: e.to_string(),
    })
}

fn signed(v: u64) -> Result<i64, CliError> {
    i64::try_from(v).map_err(|_| {
        CliError::Core(profdyn::Error::InvalidInput(format!(
            "integer {v} is too large"
        )))
    })
}

fn resolve_tower(ast: &TowerAst) -> Result<TowerSpec, CliError> {
    Ok(match ast {
        TowerAst::Zp { p, depth } => TowerSpec::Cyclic {
            p: *p,
            depth: *depth,
        },
        TowerAst::Prod(items) => TowerSpec::Product {
            components: items.iter().map(resolve_tower).collect::<Result<_, _>>()?,
        },
        TowerAst::TableFile(path) => read_json(path)?,
    })
}

fn resolve_map(ast: &MapAst) -> Result<MapSpec, CliError> {
    Ok(match ast {
        MapAst::Poly(coeffs) => MapSpec::Polynomial {
            coeffs: coeffs.iter().map(|&c| signed(c)).collect::<Result<_, _>>()?,
        },
        MapAst::Matrix(rows) => MapSpec::Matrix {
            entries: rows
                .iter()
                .map(|r| r.iter().map(|&c| signed(c)).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()?,
        },
        MapAst::Shift => MapSpec::Shift,
        MapAst::Binom => MapSpec::Binomial,
        MapAst::Prod(items) => MapSpec::Product {
            components: items.iter().map(resolve_map).collect::<Result<_, _>>()?,
        },
        MapAst::TablesFile(path) => read_json(path)?,
    })
}

fn enforce_order_cap(tower: &Tower) -> Result<(), CliError> {
    let Ok(raw) = std::env::var(MAX_ORDER_ENV) else {
        return Ok(());
    };
    let cap: u64 = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Env(format!("'{raw}' is not a positive integer")))?;
    for q in tower.levels() {
        if q.order() > cap {
            return Err(CliError::OrderCap {
                order: q.order(),
                cap,
            });
        }
    }
    Ok(())
}

fn build(spec_text: &str, depth_override: Option<usize>) -> Result<(SpecAst, BuiltMap), CliError> {
    let mut ast = parse_spec(spec_text)?;
    if let Some(depth) = depth_override {
        override_depths(&mut ast.tower, depth);
    }
    let tower_spec = resolve_tower(&ast.tower)?;
    let map_spec = resolve_map(&ast.map)?;
    let built = build_system(&tower_spec, &map_spec)?;
    enforce_order_cap(built.tower())?;
    Ok((ast, built))
}

fn cylinder_report<D: Dynamics + ?Sized>(
    d: &D,
    word_length: usize,
) -> Result<CylinderReport, CliError> {
    let depth = d.tower().depth();
    let level = 1usize.min(depth);
    let table = cylinder_frequencies(d, level, word_length, depth)?;
    Ok(CylinderReport::from(&table))
}

/// Run the full analysis for a spec and render the report.
pub fn analyze_command(spec_text: &str, opts: &AnalyzeOptions) -> Result<String, CliError> {
    let (ast, built) = build(spec_text, opts.depth_override)?;
    let spec = ast.to_string();
    match built {
        BuiltMap::Family { family, components } => {
            let metric_isometry = if opts.metric {
                let metric = build_metric(family.tower().clone());
                Some(IsometryReport::from(verify_isometry(&family, &metric)?))
            } else {
                None
            };
            let product = if components.is_empty() {
                None
            } else {
                Some(ProductReport::from(product_ergodicity(&components)?))
            };
            let cylinders = match opts.cylinders {
                Some(w) => Some(cylinder_report(&family, w)?),
                None => None,
            };
            let report = FamilyReport {
                schema: SCHEMA_VERSION,
                spec,
                kind: "family",
                analysis: analyze(&family),
                equivalence: equivalence_report(&family),
                metric_isometry,
                product_ergodicity: product,
                cylinders,
            };
            Ok(match opts.format {
                OutputFormat::Json => serde_json::to_string_pretty(&report)
                    .expect("reports serialize infallibly"),
                OutputFormat::Text => report.to_text(),
            })
        }
        BuiltMap::Precision(map) => {
            let mut levels = Vec::new();
            let mut measure_preserving = true;
            for level in 0..=map.max_output_level() {
                let push = pushforward_uniform(&map, level)?;
                measure_preserving &= push.uniform;
                levels.push(PrecisionLevel {
                    level,
                    order: map.tower().level(level).order(),
                    input_level: push.input_level,
                    uniform_pushforward: push.uniform,
                    weights: push.weights.iter().map(|&w| rational_string(w)).collect(),
                });
            }
            let cylinders = match opts.cylinders {
                Some(w) => Some(cylinder_report(&map, w)?),
                None => None,
            };
            let report = PrecisionReport {
                schema: SCHEMA_VERSION,
                spec,
                kind: "precision",
                measure_preserving,
                max_output_level: map.max_output_level(),
                depth: map.tower().depth(),
                levels,
                cylinders,
            };
            Ok(match opts.format {
                OutputFormat::Json => serde_json::to_string_pretty(&report)
                    .expect("reports serialize infallibly"),
                OutputFormat::Text => report.to_text(),
            })
        }
    }
}

/// Emit the orbit as CSV rows `step,symbol`, header included.
pub fn orbit_command(spec_text: &str, opts: &OrbitOptions) -> Result<String, CliError> {
    let (_, built) = build(spec_text, opts.depth_override)?;
    let symbols = match &built {
        BuiltMap::Family { family, .. } => {
            let x_level = opts.input_level.unwrap_or(family.tower().depth());
            orbit(family, opts.x, x_level, opts.level, opts.length)?
        }
        BuiltMap::Precision(map) => {
            let x_level = opts.input_level.unwrap_or(map.tower().depth());
            orbit(map, opts.x, x_level, opts.level, opts.length)?
        }
    };
    let mut out = String::from("step,symbol\n");
    for (step, s) in symbols.iter().enumerate() {
        out.push_str(&format!("{step},{s}\n"));
    }
    Ok(out)
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputFormat::Json => write!(f, "json"),
            OutputFormat::Text => write!(f, "text"),
        }
    }
}
