use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use nfs_eraser::io::{
    known_keys, load_config_file, merge, resolve, write_outputs, Command, ConstantsTable, Manifest, ParamMap,
};
use nfs_eraser::nuclear::{matching_field, matching_ratio, zeeman_splitting, IsotopeConstants, Level, MatchingCase};
use nfs_eraser::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

/// Nuclear forward scattering simulator for x-ray quantum-eraser setups.
#[derive(Parser, Debug)]
#[command(name = "nfs-eraser", version)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "NFS_ERASER_OUT", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Time spectrum behind one target.
    Single(SingleArgs),
    /// Two collinear targets with a shutter and σ/π polarizers.
    Scheme1(Scheme1Args),
    /// Two-arm interferometer with an external delay or a storage sequence.
    Scheme2(Scheme2Args),
    /// Print the physical constants.
    Constants {
        #[arg(long)]
        json: bool,
    },
    /// Print the target-2 field that matches a target-1 field.
    Match {
        /// Target-1 field in tesla.
        #[arg(long)]
        b1: f64,
        /// Matching case (1: inner lines, 2: outer lines); both if omitted.
        #[arg(long = "case", alias = "match-case")]
        case: Option<u32>,
    },
    /// Run again from a manifest written by an earlier run.
    Rerun { manifest: PathBuf },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with `[section] key = value` settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Any parameter as section.key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Run once per value: KEY=v1,v2,... (repeat for a product).
    #[arg(long, value_name = "KEY=V1,V2")]
    sweep: Vec<String>,
    /// Intensity scaling: none or peak.
    #[arg(long)]
    normalize: Option<String>,
    /// End of the time grid (dimensionless).
    #[arg(long)]
    grid_end: Option<String>,
    /// Grid step (dimensionless; an upper bound in scheme2).
    #[arg(long)]
    grid_step: Option<String>,
}

#[derive(Args, Debug)]
struct SingleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    xi: Option<String>,
    /// Offset Ω₂ of the upper ΔM = 0 line in Γ₀.
    #[arg(long)]
    omega2: Option<String>,
    /// Field in tesla.
    #[arg(long)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps_g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps_e: Option<String>,
    /// Field direction: x, y, z or three components.
    #[arg(long)]
    direction: Option<String>,
    #[arg(long)]
    pmax: Option<String>,
    #[arg(long)]
    f_lm: Option<String>,
    /// Incident polarization: sigma, pi, plus, minus or a:b.
    #[arg(long)]
    pol: Option<String>,
}

#[derive(Args, Debug)]
struct Scheme1Args {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    xi1: Option<String>,
    #[arg(long)]
    xi2: Option<String>,
    /// Maximum scattering order of both targets.
    #[arg(long)]
    pmax: Option<String>,
    #[arg(long)]
    f_lm: Option<String>,
    /// Target-1 field in tesla.
    #[arg(long)]
    b1: Option<String>,
    /// Target-2 field in tesla; the matched field if omitted.
    #[arg(long)]
    b2: Option<String>,
    /// Target-1 splittings ε_g:ε_e in Γ₀.
    #[arg(long, allow_hyphen_values = true)]
    eps1: Option<String>,
    /// Target-2 splittings ε_g:ε_e in Γ₀.
    #[arg(long, allow_hyphen_values = true)]
    eps2: Option<String>,
    #[arg(long)]
    match_case: Option<String>,
    /// Shutter opening t0:t1 in ns.
    #[arg(long)]
    shutter: Option<String>,
    /// Control run: target 2 gets target 1's field along z.
    #[arg(long)]
    b2_parallel_z: bool,
    /// Scale both targets' splittings.
    #[arg(long)]
    scale_splitting: Option<String>,
    /// Skip the check that B2 matches B1.
    #[arg(long)]
    no_enforce_matching: bool,
    /// Analysis window a:b in ns.
    #[arg(long)]
    fit_window: Option<String>,
    #[arg(long)]
    pol: Option<String>,
}

#[derive(Args, Debug)]
struct Scheme2Args {
    #[command(flatten)]
    common: Common,
    /// external or storage.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    xi: Option<String>,
    #[arg(long)]
    omega2: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    pmax: Option<String>,
    #[arg(long)]
    f_lm: Option<String>,
    /// Phase Φ = Ω₂Δτ of the external delay, e.g. pi/2.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long)]
    delta_tau: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Choose α, β so that both arms carry equal amplitude after the delay.
    #[arg(long)]
    auto_alpha: bool,
    /// First switch-off time, or auto for π/(2Ω₂).
    #[arg(long)]
    tau0: Option<String>,
    /// Storage window length, or quarter for π/(2Ω₂).
    #[arg(long)]
    window: Option<String>,
    /// Number of storage windows.
    #[arg(long)]
    cycles: Option<String>,
    /// Analysis window a:b (dimensionless).
    #[arg(long)]
    fit_window: Option<String>,
}

/// Flag name (as in --flag) to parameter keys, per command.
fn aliases(cmd: Command) -> &'static [(&'static str, &'static [&'static str])] {
    match cmd {
        Command::Single => &[
            ("xi", &["target.xi"]),
            ("omega2", &["target.omega2"]),
            ("b", &["target.b"]),
            ("eps-g", &["target.eps_g"]),
            ("eps-e", &["target.eps_e"]),
            ("direction", &["target.direction"]),
            ("pmax", &["target.p_max"]),
            ("f-lm", &["target.f_lm"]),
            ("pol", &["input.pol"]),
        ],
        Command::Scheme1 => &[
            ("xi1", &["target1.xi"]),
            ("xi2", &["target2.xi"]),
            ("pmax", &["target1.p_max", "target2.p_max"]),
            ("f-lm", &["target1.f_lm", "target2.f_lm"]),
            ("b1", &["target1.b"]),
            ("b2", &["target2.b"]),
            ("match-case", &["scheme1.match_case"]),
            ("shutter", &["scheme1.shutter"]),
            ("scale-splitting", &["scheme1.scale_splitting"]),
            ("fit-window", &["scheme1.window"]),
            ("pol", &["input.pol"]),
        ],
        Command::Scheme2 => &[
            ("mode", &["scheme2.mode"]),
            ("xi", &["target.xi"]),
            ("omega2", &["target.omega2"]),
            ("b", &["target.b"]),
            ("pmax", &["target.p_max"]),
            ("f-lm", &["target.f_lm"]),
            ("phi", &["scheme2.phi"]),
            ("delta-tau", &["scheme2.delta_tau"]),
            ("alpha", &["input.alpha"]),
            ("beta", &["input.beta"]),
            ("tau0", &["storage.tau0"]),
            ("window", &["storage.off"]),
            ("cycles", &["storage.cycles"]),
            ("fit-window", &["scheme2.window"]),
        ],
    }
}

fn keys_for(cmd: Command, name: &str) -> anyhow::Result<Vec<String>> {
    if known_keys(cmd).any(|k| k == name) {
        return Ok(vec![name.to_string()]);
    }
    let flag = name.trim_start_matches("--");
    aliases(cmd)
        .iter()
        .find(|(a, _)| *a == flag)
        .map(|(_, keys)| keys.iter().map(|k| k.to_string()).collect())
        .ok_or_else(|| anyhow!(Error::InvalidConfig(format!("unknown parameter '{name}' for {cmd}"))))
}

fn put(map: &mut ParamMap, cmd: Command, flag: &str, value: &Option<String>) {
    if let Some(v) = value {
        for k in keys_for(cmd, flag).expect("alias table covers every flag") {
            map.insert(k, v.clone());
        }
    }
}

fn split_pair(s: &str, what: &str) -> anyhow::Result<(String, String)> {
    s.split_once(':')
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .ok_or_else(|| anyhow!(Error::Parse(format!("{what} should look like a:b, got '{s}'"))))
}

impl Common {
    fn layer(&self, cmd: Command, map: &mut ParamMap) -> anyhow::Result<()> {
        if let Some(v) = &self.normalize {
            map.insert("output.normalize".into(), v.clone());
        }
        if let Some(v) = &self.grid_end {
            map.insert("grid.end".into(), v.clone());
        }
        if let Some(v) = &self.grid_step {
            map.insert("grid.step".into(), v.clone());
        }
        for s in &self.set {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| anyhow!(Error::Parse(format!("--set expects KEY=VALUE, got '{s}'"))))?;
            for key in keys_for(cmd, k)? {
                map.insert(key, v.to_string());
            }
        }
        Ok(())
    }

    fn sweeps(&self, cmd: Command) -> anyhow::Result<Vec<(Vec<String>, Vec<String>)>> {
        self.sweep
            .iter()
            .map(|s| {
                let (k, vs) = s
                    .split_once('=')
                    .ok_or_else(|| anyhow!(Error::Parse(format!("--sweep expects KEY=v1,v2, got '{s}'"))))?;
                let values: Vec<String> = vs.split(',').map(|v| v.trim().to_string()).collect();
                if values.iter().any(String::is_empty) {
                    return Err(anyhow!(Error::Parse(format!("--sweep {k}: empty value"))));
                }
                Ok((keys_for(cmd, k)?, values))
            })
            .collect()
    }
}

fn single_layer(a: &SingleArgs) -> ParamMap {
    let c = Command::Single;
    let mut m = ParamMap::new();
    put(&mut m, c, "xi", &a.xi);
    put(&mut m, c, "omega2", &a.omega2);
    put(&mut m, c, "b", &a.b);
    put(&mut m, c, "eps-g", &a.eps_g);
    put(&mut m, c, "eps-e", &a.eps_e);
    put(&mut m, c, "direction", &a.direction);
    put(&mut m, c, "pmax", &a.pmax);
    put(&mut m, c, "f-lm", &a.f_lm);
    put(&mut m, c, "pol", &a.pol);
    m
}

fn scheme1_layer(a: &Scheme1Args) -> anyhow::Result<ParamMap> {
    let c = Command::Scheme1;
    let mut m = ParamMap::new();
    put(&mut m, c, "xi1", &a.xi1);
    put(&mut m, c, "xi2", &a.xi2);
    put(&mut m, c, "pmax", &a.pmax);
    put(&mut m, c, "f-lm", &a.f_lm);
    put(&mut m, c, "b1", &a.b1);
    put(&mut m, c, "b2", &a.b2);
    put(&mut m, c, "match-case", &a.match_case);
    put(&mut m, c, "shutter", &a.shutter);
    put(&mut m, c, "scale-splitting", &a.scale_splitting);
    put(&mut m, c, "fit-window", &a.fit_window);
    put(&mut m, c, "pol", &a.pol);
    for (n, eps) in [(1, &a.eps1), (2, &a.eps2)] {
        if let Some(s) = eps {
            let (g, e) = split_pair(s, &format!("--eps{n}"))?;
            m.insert(format!("target{n}.eps_g"), g);
            m.insert(format!("target{n}.eps_e"), e);
        }
    }
    if a.b2_parallel_z {
        m.insert("scheme1.no_marking".into(), "true".into());
    }
    if a.no_enforce_matching {
        m.insert("scheme1.enforce_matching".into(), "false".into());
    }
    Ok(m)
}

fn scheme2_layer(a: &Scheme2Args) -> ParamMap {
    let c = Command::Scheme2;
    let mut m = ParamMap::new();
    put(&mut m, c, "mode", &a.mode);
    put(&mut m, c, "xi", &a.xi);
    put(&mut m, c, "omega2", &a.omega2);
    put(&mut m, c, "b", &a.b);
    put(&mut m, c, "pmax", &a.pmax);
    put(&mut m, c, "f-lm", &a.f_lm);
    put(&mut m, c, "phi", &a.phi);
    put(&mut m, c, "delta-tau", &a.delta_tau);
    put(&mut m, c, "alpha", &a.alpha);
    put(&mut m, c, "beta", &a.beta);
    put(&mut m, c, "tau0", &a.tau0);
    put(&mut m, c, "window", &a.window);
    put(&mut m, c, "cycles", &a.cycles);
    put(&mut m, c, "fit-window", &a.fit_window);
    if a.auto_alpha {
        m.insert("input.auto_alpha".into(), "true".into());
    }
    m
}

/// Cartesian product of the sweep values, first sweep varying slowest.
fn expand(sweeps: &[(Vec<String>, Vec<String>)]) -> Vec<ParamMap> {
    let mut runs = vec![ParamMap::new()];
    for (keys, values) in sweeps {
        runs = runs
            .into_iter()
            .flat_map(|base| {
                values.iter().map(move |v| {
                    let mut m = base.clone();
                    for k in keys {
                        m.insert(k.clone(), v.clone());
                    }
                    m
                })
            })
            .collect();
    }
    runs
}

struct Outcome {
    dir: PathBuf,
    manifest: Manifest,
}

fn execute(cmd: Command, params: &ParamMap, dir: &Path) -> anyhow::Result<Outcome> {
    let run = resolve(cmd, params)?;
    let result = run.run()?;
    let manifest = write_outputs(dir, &run, &result)?;
    Ok(Outcome { dir: dir.to_path_buf(), manifest })
}

fn report(o: &Outcome) {
    println!("{}:", o.dir.display());
    for f in &o.manifest.outputs {
        println!("  wrote {f}");
    }
    println!("  wrote {}", Manifest::file_name(o.manifest.command));
    for (k, v) in &o.manifest.diagnostics.metrics {
        println!("  {k} = {v:.6}");
    }
    for (k, c) in &o.manifest.diagnostics.convergence {
        let state = if c.converged { "converged" } else { "NOT converged" };
        println!("  series {k}: {state} after {} orders (last/sum {:.2e})", c.orders, c.ratio);
    }
    for n in &o.manifest.diagnostics.notes {
        println!("  note: {n}");
    }
}

fn simulate(cmd: Command, common: &Common, flags: ParamMap, out: &Path) -> anyhow::Result<bool> {
    let file = match &common.config {
        Some(p) => load_config_file(p).with_context(|| format!("reading {}", p.display()))?,
        None => ParamMap::new(),
    };
    let mut cli = flags;
    common.layer(cmd, &mut cli)?;
    let base = merge([&file, &cli]);
    let sweeps = common.sweeps(cmd)?;
    let outcomes: Vec<Outcome> = if sweeps.is_empty() {
        vec![execute(cmd, &base, out)?]
    } else {
        let runs = expand(&sweeps);
        runs.par_iter()
            .enumerate()
            .map(|(i, over)| execute(cmd, &merge([&base, over]), &out.join(format!("run_{i:03}"))))
            .collect::<anyhow::Result<_>>()?
    };
    outcomes.iter().for_each(report);
    Ok(outcomes.iter().all(|o| o.manifest.diagnostics.converged()))
}

fn print_constants(json: bool) -> anyhow::Result<()> {
    let t = ConstantsTable::new(&IsotopeConstants::FE57)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&t)?);
        return Ok(());
    }
    let i = &t.isotope;
    println!("57Fe");
    println!("  transition energy      {} keV", i.transition_energy_kev);
    println!("  mean lifetime          {} ns", i.mean_lifetime_ns);
    println!("  spins (ground, exc.)   {}, {}", i.spin_ground, i.spin_excited);
    println!("  moments (ground, exc.) {}, {} nuclear magnetons", i.mu_ground, i.mu_excited);
    println!("  natural width          {:.6e} eV", t.natural_width_ev);
    println!("  nuclear magneton       {:e} eV/T", t.nuclear_magneton_ev_per_t);
    println!("  hbar                   {:e} eV s", t.hbar_ev_s);
    println!("  splitting per tesla    ground {:.6}, excited {:.6} (units of natural width)", t.eps_ground_per_t, t.eps_excited_per_t);
    Ok(())
}

fn print_match(b1: f64, case: Option<u32>) -> anyhow::Result<()> {
    let iso = IsotopeConstants::FE57;
    let eg = zeeman_splitting(b1, Level::Ground, &iso)?;
    let ee = zeeman_splitting(b1, Level::Excited, &iso)?;
    println!("B1 = {b1} T: eps_g = {eg:.4}, eps_e = {ee:.4}");
    if b1 == 0.0 {
        println!("zero field: all lines coincide, nothing to match");
        return Ok(());
    }
    let cases = match case {
        Some(n) => vec![MatchingCase::from_number(n)?],
        None => vec![MatchingCase::Inner, MatchingCase::Outer],
    };
    for c in cases {
        let b2 = matching_field(b1, c, &iso)?;
        let ratio = matching_ratio(c, &iso)?;
        let eg2 = zeeman_splitting(b2, Level::Ground, &iso)?;
        let ee2 = zeeman_splitting(b2, Level::Excited, &iso)?;
        println!(
            "case {}: B2 = {b2:.4} T (B1/B2 = {ratio:.6}), eps_g = {eg2:.4}, eps_e = {ee2:.4}",
            c as u32
        );
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Io(_)) | Some(Error::Json(_)) | None => 1,
        Some(_) => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Single(a) => simulate(Command::Single, &a.common, single_layer(a), &cli.out),
        Cmd::Scheme1(a) => scheme1_layer(a).and_then(|m| simulate(Command::Scheme1, &a.common, m, &cli.out)),
        Cmd::Scheme2(a) => simulate(Command::Scheme2, &a.common, scheme2_layer(a), &cli.out),
        Cmd::Constants { json } => print_constants(*json).map(|_| true),
        Cmd::Match { b1, case } => print_match(*b1, *case).map(|_| true),
        Cmd::Rerun { manifest } => Manifest::read(manifest)
            .with_context(|| format!("reading {}", manifest.display()))
            .and_then(|m| {
                let run = m.to_run()?;
                let result = run.run()?;
                let written = write_outputs(&cli.out, &run, &result)?;
                let o = Outcome { dir: cli.out.clone(), manifest: written };
                report(&o);
                Ok(o.manifest.diagnostics.converged())
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: power series did not converge; raise the maximum order");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
