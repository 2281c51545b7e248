//! Case and sweep configuration files.
//!
//! A config is TOML. Top-level keys select what to run:
//!
//! ```toml
//! mode = "sweep"          # or "case"
//! axis = "voltage"        # electrode_width | gap | frequency | voltage
//! values = [0, 5, 10]
//!
//! [drive]
//! v_rms = 25.0
//! ```
//!
//! Every other section maps onto [`CaseConfig`]; anything omitted keeps its
//! default. `[reaction] units = "molar"` reads `k_a` in 1/(M s) and
//! `a_inlet` in M instead of SI.

use etstir_core::driver::SweepAxis;
use etstir_core::CaseConfig;
use toml::{Table, Value};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Case,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub axis: Option<SweepAxis>,
    pub values: Vec<f64>,
    pub case: CaseConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Case,
            axis: None,
            values: Vec::new(),
            case: CaseConfig::default(),
        }
    }
}

/// Keys accepted besides the fields of [`CaseConfig`].
const EXTRA_KEYS: &[&str] = &["mode", "axis", "values", "reaction.units"];

fn case_table(case: &CaseConfig) -> Table {
    Table::try_from(case).expect("case config serializes to a table")
}

fn lookup<'a>(table: &'a Table, path: &[&str]) -> Option<&'a Value> {
    let (first, rest) = path.split_first()?;
    let v = table.get(*first)?;
    if rest.is_empty() {
        Some(v)
    } else {
        lookup(v.as_table()?, rest)
    }
}

/// Parses the right-hand side of `--set key=value` the way TOML would,
/// falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_owned())),
        Err(_) => Value::String(raw.to_owned()),
    }
}

/// Applies one `key=value` override in place, rejecting keys that no
/// configuration field answers to.
pub fn apply_override(table: &mut Table, spec: &str) -> AppResult<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| AppError::Config(format!("override `{spec}` is not of the form key=value")))?;
    let key = key.trim();
    let path: Vec<&str> = key.split('.').collect();
    let defaults = case_table(&CaseConfig::default());
    let template = lookup(&defaults, &path);
    if template.is_none() && !EXTRA_KEYS.contains(&key) {
        return Err(AppError::UnknownKey(key.to_owned()));
    }
    if matches!(template, Some(Value::Table(_))) {
        return Err(AppError::Config(format!("`{key}` is a section, not a value")));
    }
    let mut value = parse_value(raw.trim());
    if let (Some(Value::Float(_)), Value::Integer(i)) = (template, &value) {
        value = Value::Float(*i as f64);
    }
    if key == "values" {
        if let Value::String(s) = &value {
            value = Value::Array(s.split(',').map(|v| parse_value(v.trim())).collect());
        }
    }
    let (last, parents) = path.split_last().expect("split yields at least one part");
    let mut cursor = table;
    for part in parents {
        let entry = cursor.entry((*part).to_owned()).or_insert_with(|| Value::Table(Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| AppError::Config(format!("`{part}` in `{key}` is not a section")))?;
    }
    cursor.insert((*last).to_owned(), value);
    Ok(())
}

fn as_number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

/// Parses config text after applying `overrides` in order.
pub fn parse_config(text: &str, overrides: &[String]) -> AppResult<RunConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| AppError::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }

    let mode = match table.remove("mode") {
        None => Mode::Case,
        Some(Value::String(s)) if s == "case" => Mode::Case,
        Some(Value::String(s)) if s == "sweep" => Mode::Sweep,
        Some(other) => return Err(AppError::Config(format!("mode must be \"case\" or \"sweep\", got {other}"))),
    };
    let axis = match table.remove("axis") {
        None => None,
        Some(Value::String(s)) => {
            Some(SweepAxis::parse(&s).ok_or_else(|| AppError::Config(format!("unknown sweep axis `{s}`")))?)
        }
        Some(other) => return Err(AppError::Config(format!("axis must be a string, got {other}"))),
    };
    let values = match table.remove("values") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| as_number(v).ok_or_else(|| AppError::Config(format!("sweep value {v} is not a number"))))
            .collect::<AppResult<Vec<f64>>>()?,
        Some(other) => return Err(AppError::Config(format!("values must be an array, got {other}"))),
    };

    if let Some(Value::Table(reaction)) = table.get_mut("reaction") {
        match reaction.remove("units") {
            None => {}
            Some(Value::String(u)) if u == "si" => {}
            Some(Value::String(u)) if u == "molar" => {
                // 1 M = 1000 mol/m^3.
                if let Some(k) = reaction.get("k_a").and_then(as_number) {
                    reaction.insert("k_a".into(), Value::Float(k * 1e-3));
                }
                if let Some(a) = reaction.get("a_inlet").and_then(as_number) {
                    reaction.insert("a_inlet".into(), Value::Float(a * 1e3));
                }
            }
            Some(other) => {
                return Err(AppError::Config(format!("reaction.units must be \"si\" or \"molar\", got {other}")))
            }
        }
    }

    let case: CaseConfig = table.try_into().map_err(|e: toml::de::Error| AppError::Config(e.to_string()))?;
    let cfg = RunConfig { mode, axis, values, case };
    if cfg.mode == Mode::Sweep {
        if cfg.axis.is_none() {
            return Err(AppError::Config("sweep mode needs an axis".into()));
        }
        if cfg.values.is_empty() {
            return Err(AppError::Config("sweep mode needs at least one value".into()));
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path, overrides: &[String]) -> AppResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_config(&text, overrides).map_err(|e| match e {
        AppError::Config(msg) => AppError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// The resolved configuration as a config file that reproduces the run.
pub fn echo(cfg: &RunConfig) -> String {
    let mut head = Table::new();
    head.insert(
        "mode".into(),
        Value::String(match cfg.mode {
            Mode::Case => "case".into(),
            Mode::Sweep => "sweep".into(),
        }),
    );
    if let Some(axis) = cfg.axis {
        head.insert("axis".into(), Value::String(axis.name().into()));
    }
    if !cfg.values.is_empty() {
        head.insert("values".into(), Value::Array(cfg.values.iter().map(|v| Value::Float(*v)).collect()));
    }
    let mut out = String::new();
    out.push_str("# Resolved configuration. Feed this file back with --config to repeat the run.\n");
    out.push_str("# Units are SI throughout: concentrations in mol/m^3, k_a in m^3/(mol s).\n");
    out.push_str("# drive.v_rms is the rms potential difference; the electrodes sit at +v_rms/2 and -v_rms/2.\n");
    out.push_str("# Channel size and cantilever placement are configurable defaults, not measured values.\n\n");
    out.push_str(&toml::to_string(&head).expect("header serializes"));
    out.push('\n');
    out.push_str(&toml::to_string(&cfg.case).expect("case config serializes"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default_case() {
        let cfg = parse_config("", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn overrides_use_dot_paths() {
        let cfg = parse_config("", &["drive.v_rms=10".into(), "grid.nx=128".into()]).unwrap();
        assert_eq!(cfg.case.drive.v_rms, 10.0);
        assert_eq!(cfg.case.grid.nx, 128);
    }

    #[test]
    fn unknown_override_is_rejected() {
        let err = parse_config("", &["drive.volts=10".into()]).unwrap_err();
        assert!(matches!(err, AppError::UnknownKey(k) if k == "drive.volts"));
    }

    #[test]
    fn unknown_file_key_is_rejected() {
        assert!(parse_config("[drive]\nvolts = 3\n", &[]).is_err());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_config("mode = \"case\"\n[drive\n", &[]).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn molar_units_convert() {
        let cfg = parse_config("[reaction]\nunits = \"molar\"\nk_a = 2600\na_inlet = 1e-5\n", &[]).unwrap();
        assert!((cfg.case.reaction.k_a - 2.6).abs() < 1e-12);
        assert!((cfg.case.reaction.a_inlet - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn sweep_values_from_override_list() {
        let cfg = parse_config("mode = \"sweep\"\naxis = \"frequency\"\n", &["values=1e5,1e6,1e7".into()]).unwrap();
        assert_eq!(cfg.values, vec![1e5, 1e6, 1e7]);
        assert_eq!(cfg.axis, Some(SweepAxis::Frequency));
    }

    #[test]
    fn sweep_without_values_is_an_error() {
        assert!(parse_config("mode = \"sweep\"\naxis = \"gap\"\n", &[]).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = parse_config("mode = \"sweep\"\naxis = \"voltage\"\nvalues = [0, 12.5]\n", &[]).unwrap();
        cfg.case.geometry.electrode_gap = 1.7e-5;
        cfg.case.reaction.k_a = 2.6;
        let again = parse_config(&echo(&cfg), &[]).unwrap();
        assert_eq!(again, cfg);
    }
}
