//! Flat `section.key` parameters and their resolution into run configs.
//!
//! Parameters come from built-in defaults, an optional TOML file and the
//! command line, later sources overriding earlier ones. Resolution fills
//! every default in, so the resolved map alone reproduces the run.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    run_scheme1, run_scheme2, run_single_target, DelayMode, Scheme1Config, Scheme2Config, SpectrumResult,
};
use crate::field::{PolVector, TimeGrid};
use crate::kernel::TargetConfig;
use crate::nuclear::{matching_field, HyperfineConfig, IsotopeConstants, MatchingCase};

pub type ParamMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Single,
    Scheme1,
    Scheme2,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Single => "single",
            Command::Scheme1 => "scheme1",
            Command::Scheme2 => "scheme2",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Command::Single),
            "scheme1" => Ok(Command::Scheme1),
            "scheme2" => Ok(Command::Scheme2),
            _ => Err(Error::Parse(format!("unknown command '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    None,
    Peak,
}

/// Keys accepted by each command with their defaults. An empty default
/// means the key is optional and unset unless given.
fn schema(cmd: Command) -> &'static [(&'static str, &'static str)] {
    match cmd {
        Command::Single => &[
            ("grid.end", "3.55"),
            ("grid.step", "0.001"),
            ("input.pol", "sigma"),
            ("output.normalize", "none"),
            ("target.b", ""),
            ("target.direction", "z"),
            ("target.eps_e", ""),
            ("target.eps_g", ""),
            ("target.f_lm", "0.8"),
            ("target.omega2", ""),
            ("target.p_max", "19"),
            ("target.xi", "1"),
        ],
        Command::Scheme1 => &[
            ("grid.end", "3.55"),
            ("grid.step", "0.001"),
            ("input.pol", "sigma"),
            ("output.normalize", "none"),
            ("scheme1.enforce_matching", ""),
            ("scheme1.match_case", "2"),
            ("scheme1.no_marking", "false"),
            ("scheme1.scale_splitting", "1"),
            ("scheme1.shutter", "7:74"),
            ("scheme1.window", ""),
            ("target1.b", ""),
            ("target1.eps_e", ""),
            ("target1.eps_g", ""),
            ("target1.f_lm", "0.8"),
            ("target1.p_max", "19"),
            ("target1.xi", "7"),
            ("target2.b", ""),
            ("target2.eps_e", ""),
            ("target2.eps_g", ""),
            ("target2.f_lm", "0.8"),
            ("target2.p_max", "19"),
            ("target2.xi", "7"),
        ],
        Command::Scheme2 => &[
            ("grid.end", "3.55"),
            ("grid.step", "0.001"),
            ("input.alpha", ""),
            ("input.auto_alpha", "false"),
            ("input.beta", ""),
            ("output.normalize", "none"),
            ("scheme2.delta_tau", ""),
            ("scheme2.mode", "external"),
            ("scheme2.phi", ""),
            ("scheme2.window", ""),
            ("storage.cycles", "1"),
            ("storage.off", "quarter"),
            ("storage.tau0", "auto"),
            ("target.b", ""),
            ("target.f_lm", "0.8"),
            ("target.omega2", ""),
            ("target.p_max", "14"),
            ("target.xi", "1"),
        ],
    }
}

pub fn known_keys(cmd: Command) -> impl Iterator<Item = &'static str> {
    schema(cmd).iter().map(|(k, _)| *k)
}

/// Reads a TOML file into `section.key` pairs.
pub fn load_config_file(path: &Path) -> Result<ParamMap> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ParamMap> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut out = ParamMap::new();
    flatten("", &table, &mut out)?;
    Ok(out)
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut ParamMap) -> Result<()> {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        let text = match v {
            toml::Value::Table(t) => {
                flatten(&key, t, out)?;
                continue;
            }
            toml::Value::String(s) => s.clone(),
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(x) => x.to_string(),
            toml::Value::Boolean(b) => b.to_string(),
            other => return Err(Error::Parse(format!("{key}: unsupported value {other}"))),
        };
        out.insert(key, text);
    }
    Ok(())
}

/// Merges parameter layers, later layers winning.
pub fn merge<'a>(layers: impl IntoIterator<Item = &'a ParamMap>) -> ParamMap {
    let mut out = ParamMap::new();
    for layer in layers {
        out.extend(layer.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    out
}

/// Parses a real number, also accepting multiples and fractions of π such
/// as `pi/2`, `3pi/4` or `0.5*pi`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("'{s}' is not a number"));
    if let Some(pos) = t.find("pi") {
        let (num, rest) = (&t[..pos], &t[pos + 2..]);
        let num = num.strip_suffix('*').unwrap_or(num);
        let k = match num {
            "" | "+" => 1.0,
            "-" => -1.0,
            n => n.parse::<f64>().map_err(|_| bad())?,
        };
        let d = match rest {
            "" => 1.0,
            r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        return Ok(k * PI / d);
    }
    let x = t.parse::<f64>().map_err(|_| bad())?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad())
    }
}

/// Parses `a:b`.
pub fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("'{s}' should look like a:b")))?;
    Ok((parse_real(a)?, parse_real(b)?))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Parse(format!("'{s}' is not a boolean"))),
    }
}

fn parse_direction(s: &str) -> Result<[f64; 3]> {
    match s {
        "x" => Ok([1.0, 0.0, 0.0]),
        "y" | "beam" => Ok([0.0, 1.0, 0.0]),
        "z" => Ok([0.0, 0.0, 1.0]),
        _ => {
            let v: Vec<f64> = s.split(',').map(parse_real).collect::<Result<_>>()?;
            <[f64; 3]>::try_from(v).map_err(|_| Error::Parse(format!("direction '{s}' needs x, y, z or three components")))
        }
    }
}

fn parse_pol(s: &str) -> Result<PolVector> {
    match s {
        "sigma" => Ok(PolVector::sigma()),
        "pi" => Ok(PolVector::pi()),
        "plus" => Ok(PolVector::circular_plus()),
        "minus" => Ok(PolVector::circular_minus()),
        _ => {
            let (a, b) = parse_pair(s)?;
            let n = (a * a + b * b).sqrt();
            if !(n > 0.0) {
                return Err(Error::InvalidConfig("input polarization is zero".into()));
            }
            Ok(PolVector::real(a / n, b / n))
        }
    }
}

/// Typed access to a resolved parameter map.
struct Params<'a> {
    map: &'a ParamMap,
}

impl Params<'_> {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn with<T>(&self, key: &str, f: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        self.get(key)
            .map(|v| f(v).map_err(|e| Error::Parse(format!("{key}: {e}"))))
            .transpose()
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        self.with(key, parse_real)
    }

    fn req_real(&self, key: &str) -> Result<f64> {
        self.real(key)?.ok_or_else(|| Error::InvalidConfig(format!("{key} is required")))
    }

    fn count(&self, key: &str) -> Result<usize> {
        self.with(key, |v| v.parse::<usize>().map_err(|_| Error::Parse(format!("'{v}' is not a count"))))?
            .ok_or_else(|| Error::InvalidConfig(format!("{key} is required")))
    }

    fn flag(&self, key: &str) -> Result<bool> {
        Ok(self.with(key, parse_bool)?.unwrap_or(false))
    }
}

/// A fully specified run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RunConfig {
    Single { target: TargetConfig, input_pol: PolVector },
    Scheme1(Scheme1Config),
    Scheme2(Scheme2Config),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRun {
    pub command: Command,
    /// Every parameter that took part, defaults included.
    pub params: ParamMap,
    pub config: RunConfig,
    pub grid: TimeGrid,
    pub normalize: Normalize,
}

impl ResolvedRun {
    pub fn run(&self) -> Result<SpectrumResult> {
        let mut r = match &self.config {
            RunConfig::Single { target, input_pol } => run_single_target(target, *input_pol, &self.grid)?,
            RunConfig::Scheme1(c) => run_scheme1(c, &self.grid)?,
            RunConfig::Scheme2(c) => run_scheme2(c, &self.grid)?,
        };
        if self.normalize == Normalize::Peak {
            r.normalize_peak();
        }
        Ok(r)
    }
}

/// Checks keys, fills in defaults and builds the run configuration.
pub fn resolve(cmd: Command, given: &ParamMap) -> Result<ResolvedRun> {
    let schema = schema(cmd);
    if let Some(k) = given.keys().find(|k| !schema.iter().any(|(s, _)| s == k)) {
        return Err(Error::InvalidConfig(format!("unknown parameter '{k}' for {cmd}")));
    }
    let mut map: ParamMap = schema
        .iter()
        .filter(|(_, d)| !d.is_empty())
        .map(|(k, d)| (k.to_string(), d.to_string()))
        .collect();
    map.extend(given.iter().filter(|(_, v)| !v.is_empty()).map(|(k, v)| (k.clone(), v.clone())));

    let iso = IsotopeConstants::FE57;
    let config = match cmd {
        Command::Single => resolve_single(&mut map, &iso)?,
        Command::Scheme1 => resolve_scheme1(&mut map, &iso)?,
        Command::Scheme2 => resolve_scheme2(&mut map, &iso)?,
    };
    let p = Params { map: &map };
    let (end, step) = (p.req_real("grid.end")?, p.req_real("grid.step")?);
    let grid = match &config {
        RunConfig::Scheme2(c) => c.grid(end, step, iso.mean_lifetime_ns)?,
        _ => TimeGrid::with_lifetime(0.0, end, step, iso.mean_lifetime_ns)?,
    };
    let normalize = match p.get("output.normalize") {
        Some("peak") => Normalize::Peak,
        Some("none") | None => Normalize::None,
        Some(other) => return Err(Error::Parse(format!("output.normalize: '{other}' is not none or peak"))),
    };
    Ok(ResolvedRun { command: cmd, params: map, config, grid, normalize })
}

/// Hyperfine setup from `b`, `omega2` or the pair `eps_g`/`eps_e` under
/// `prefix`, or `None` when none is given.
fn hyperfine(
    p: &Params,
    prefix: &str,
    direction: [f64; 3],
    iso: &IsotopeConstants,
) -> Result<Option<HyperfineConfig>> {
    let b = p.real(&format!("{prefix}.b"))?;
    let omega2 = p.real(&format!("{prefix}.omega2"))?;
    let eg = p.real(&format!("{prefix}.eps_g"))?;
    let ee = p.real(&format!("{prefix}.eps_e"))?;
    let given = [b.is_some(), omega2.is_some(), eg.is_some() || ee.is_some()];
    if given.iter().filter(|g| **g).count() > 1 {
        return Err(Error::InvalidConfig(format!(
            "{prefix}: give only one of b, omega2 or eps_g/eps_e"
        )));
    }
    if let Some(b) = b {
        return HyperfineConfig::from_field(b, direction, iso).map(Some);
    }
    if let Some(w) = omega2 {
        return HyperfineConfig::from_line_offset(w, direction, iso).map(Some);
    }
    match (eg, ee) {
        (Some(g), Some(e)) => HyperfineConfig::from_splittings(g, e, direction).map(Some),
        (None, None) => Ok(None),
        _ => Err(Error::InvalidConfig(format!("{prefix}: eps_g and eps_e go together"))),
    }
}

fn target(p: &Params, prefix: &str, hf: HyperfineConfig) -> Result<TargetConfig> {
    Ok(TargetConfig::new(p.req_real(&format!("{prefix}.xi"))?, hf)
        .with_f_lm(p.req_real(&format!("{prefix}.f_lm"))?)
        .with_p_max(p.count(&format!("{prefix}.p_max"))?))
}

fn resolve_single(map: &mut ParamMap, iso: &IsotopeConstants) -> Result<RunConfig> {
    let has_source = ["target.b", "target.omega2", "target.eps_g", "target.eps_e"]
        .iter()
        .any(|k| map.contains_key(*k));
    if !has_source {
        map.insert("target.omega2".into(), "28".into());
    }
    let p = Params { map };
    let dir = p.with("target.direction", parse_direction)?.unwrap_or([0.0, 0.0, 1.0]);
    let hf = hyperfine(&p, "target", dir, iso)?.expect("source inserted above");
    let t = target(&p, "target", hf)?;
    t.validate()?;
    let input_pol = p.with("input.pol", parse_pol)?.unwrap_or_else(PolVector::sigma);
    Ok(RunConfig::Single { target: t, input_pol })
}

fn resolve_scheme1(map: &mut ParamMap, iso: &IsotopeConstants) -> Result<RunConfig> {
    let t1_source = ["target1.b", "target1.eps_g", "target1.eps_e"].iter().any(|k| map.contains_key(*k));
    if !t1_source {
        map.insert("target1.b".into(), "39".into());
    }
    let p = Params { map };
    let case = MatchingCase::from_number(p.count("scheme1.match_case")? as u32)?;
    let z = [0.0, 0.0, 1.0];
    let beam = [0.0, 1.0, 0.0];
    let hf1 = hyperfine(&p, "target1", z, iso)?.expect("source inserted above");
    let hf2 = match hyperfine(&p, "target2", beam, iso)? {
        Some(h) => h,
        None => {
            let b1 = hf1.implied_field(iso);
            HyperfineConfig::from_field(matching_field(b1, case, iso)?, beam, iso)?
        }
    };
    let by_field = hf1.field_magnitude.is_some() && hf2.field_magnitude.is_some();
    let enforce = p.with("scheme1.enforce_matching", parse_bool)?.unwrap_or(by_field);
    let mut cfg = Scheme1Config::from_splittings(
        (hf1.eps_ground, hf1.eps_excited),
        (hf2.eps_ground, hf2.eps_excited),
        case,
        p.req_real("target1.xi")?,
        p.req_real("target2.xi")?,
    )?;
    cfg.target1 = target(&p, "target1", hf1)?;
    cfg.target2 = target(&p, "target2", hf2)?;
    cfg.enforce_matching = enforce;
    cfg.shutter_ns = parse_pair(p.get("scheme1.shutter").unwrap_or("7:74"))?;
    cfg.window_ns = p.with("scheme1.window", parse_pair)?;
    if let Some(pol) = p.with("input.pol", parse_pol)? {
        cfg.input_pol = pol;
    }
    let scale = p.req_real("scheme1.scale_splitting")?;
    if scale != 1.0 {
        cfg = cfg.scale_splitting(scale);
    }
    if p.flag("scheme1.no_marking")? {
        cfg = cfg.without_marking();
    }
    map.insert("scheme1.enforce_matching".into(), cfg.enforce_matching.to_string());
    cfg.validate()?;
    Ok(RunConfig::Scheme1(cfg))
}

fn resolve_scheme2(map: &mut ParamMap, iso: &IsotopeConstants) -> Result<RunConfig> {
    let mode = match map.get("scheme2.mode").map(String::as_str) {
        Some("external") | None => DelayMode::External,
        Some("storage") => DelayMode::Storage,
        Some(other) => return Err(Error::Parse(format!("scheme2.mode: '{other}' is not external or storage"))),
    };
    if !map.contains_key("target.b") && !map.contains_key("target.omega2") {
        map.insert("target.omega2".into(), "28".into());
    }
    if mode == DelayMode::External && !map.contains_key("scheme2.phi") && !map.contains_key("scheme2.delta_tau") {
        map.insert("scheme2.phi".into(), "pi/2".into());
    }
    let p = Params { map };
    let omega2 = match hyperfine(&p, "target", [0.0, 0.0, 1.0], iso)? {
        Some(h) => 0.5 * h.delta_e(),
        None => unreachable!("source inserted above"),
    };
    let xi = p.req_real("target.xi")?;
    let auto = p.flag("input.auto_alpha")?;
    let (alpha, beta) = match (p.real("input.alpha")?, p.real("input.beta")?) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, (1.0 - a * a).max(0.0).sqrt()),
        (None, Some(b)) => ((1.0 - b * b).max(0.0).sqrt(), b),
        (None, None) => (0.5f64.sqrt(), 0.5f64.sqrt()),
    };
    let mut cfg = match mode {
        DelayMode::External => {
            let (phi, dt) = (p.real("scheme2.phi")?, p.real("scheme2.delta_tau")?);
            match (phi, dt) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidConfig("give either scheme2.phi or scheme2.delta_tau".into()))
                }
                (Some(phi), None) => Scheme2Config::external_phase(omega2, xi, phi, alpha, beta)?,
                (None, Some(dt)) => Scheme2Config::external(omega2, xi, dt, alpha, beta)?,
                (None, None) => unreachable!("phase inserted above"),
            }
        }
        DelayMode::Storage => {
            if p.get("scheme2.phi").is_some() || p.get("scheme2.delta_tau").is_some() {
                return Err(Error::InvalidConfig("storage mode takes storage.* settings, not a phase or delay".into()));
            }
            let q = if omega2 > 0.0 { PI / (2.0 * omega2) } else { 0.0 };
            let tau0 = match p.get("storage.tau0") {
                Some("auto") | None => q,
                Some(v) => parse_real(v)?,
            };
            let off = match p.get("storage.off") {
                Some("quarter") | None => q,
                Some(v) => parse_real(v)?,
            };
            Scheme2Config::storage_periodic(omega2, xi, tau0, off, p.count("storage.cycles")?, alpha, beta)?
        }
    };
    // the hyperfine setup came from omega2; a given field is kept for the record
    if let Some(b) = p.real("target.b")? {
        cfg.target1.hyperfine.field_magnitude = Some(b);
        cfg.target2.hyperfine.field_magnitude = Some(b);
    }
    let f_lm = p.req_real("target.f_lm")?;
    let p_max = p.count("target.p_max")?;
    cfg.target1 = cfg.target1.clone().with_f_lm(f_lm);
    cfg.target2 = cfg.target2.clone().with_f_lm(f_lm);
    cfg = cfg.with_p_max(p_max);
    if auto {
        cfg = cfg.with_auto_alpha();
    }
    cfg.window = p.with("scheme2.window", parse_pair)?;
    cfg.validate()?;
    Ok(RunConfig::Scheme2(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> ParamMap {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn reals_with_pi() {
        assert_eq!(parse_real("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_real("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real(" 2.5 ").unwrap(), 2.5);
        assert!(parse_real("pie").is_err());
        assert!(parse_real("nan").is_err());
    }

    #[test]
    fn toml_flattens_to_section_keys() {
        let m = parse_config("[target1]\nxi = 7\nb = 39.5\n[scheme1]\nshutter = \"7:74\"\nno_marking = true\n").unwrap();
        assert_eq!(m["target1.xi"], "7");
        assert_eq!(m["target1.b"], "39.5");
        assert_eq!(m["scheme1.shutter"], "7:74");
        assert_eq!(m["scheme1.no_marking"], "true");
        assert!(parse_config("[a]\nx = [1, 2]\n").is_err());
    }

    #[test]
    fn later_layers_win() {
        let file = params(&[("target.xi", "2"), ("target.p_max", "5")]);
        let cli = params(&[("target.xi", "3")]);
        let m = merge([&file, &cli]);
        assert_eq!(m["target.xi"], "3");
        assert_eq!(m["target.p_max"], "5");
    }

    #[test]
    fn defaults_are_materialized() {
        let r = resolve(Command::Single, &ParamMap::new()).unwrap();
        assert_eq!(r.params["target.omega2"], "28");
        assert_eq!(r.params["target.xi"], "1");
        assert_eq!(resolve(Command::Single, &r.params).unwrap(), r);
    }

    #[test]
    fn unknown_and_conflicting_keys_fail() {
        assert!(matches!(
            resolve(Command::Single, &params(&[("target.xii", "1")])),
            Err(Error::InvalidConfig(_))
        ));
        assert!(resolve(Command::Single, &params(&[("target.b", "1"), ("target.omega2", "2")])).is_err());
        assert!(resolve(Command::Scheme2, &params(&[("scheme2.phi", "1"), ("scheme2.delta_tau", "1")])).is_err());
    }

    #[test]
    fn scheme1_matches_target2_by_default() {
        let r = resolve(Command::Scheme1, &ParamMap::new()).unwrap();
        let RunConfig::Scheme1(c) = &r.config else { panic!() };
        let b2 = c.target2.hyperfine.field_magnitude.unwrap();
        assert!((b2 - 22.584).abs() < 1e-3, "{b2}");
        assert_eq!(r.params["scheme1.enforce_matching"], "true");
        let off = params(&[("target2.b", "30")]);
        assert!(resolve(Command::Scheme1, &off).is_err());
    }

    #[test]
    fn scheme1_splittings_turn_matching_off() {
        let r = resolve(
            Command::Scheme1,
            &params(&[
                ("target1.eps_g", "48"),
                ("target1.eps_e", "-27"),
                ("target2.eps_g", "28"),
                ("target2.eps_e", "-16"),
            ]),
        )
        .unwrap();
        let RunConfig::Scheme1(c) = &r.config else { panic!() };
        assert!(!c.enforce_matching);
        assert_eq!(c.target2.hyperfine.eps_excited, -16.0);
    }

    #[test]
    fn scheme2_storage_quarter_defaults() {
        let r = resolve(Command::Scheme2, &params(&[("scheme2.mode", "storage"), ("storage.cycles", "2")])).unwrap();
        let RunConfig::Scheme2(c) = &r.config else { panic!() };
        let q = PI / 56.0;
        assert_eq!(c.target2.schedule.events.len(), 2);
        assert!((c.target2.schedule.events[0].0 - q).abs() < 1e-9);
        assert!((c.target2.schedule.events[1].0 - 4.0 * q).abs() < 1e-9);
        assert!((c.omega2() - 28.0).abs() < 1e-9);
    }

    #[test]
    fn scheme2_auto_alpha() {
        let r = resolve(Command::Scheme2, &params(&[("input.auto_alpha", "true")])).unwrap();
        let RunConfig::Scheme2(c) = &r.config else { panic!() };
        assert!((c.alpha - 0.716953).abs() < 1e-5);
        assert!((c.beta - 0.697122).abs() < 1e-5);
    }
}
