//! CSV spectra and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{resolve, Command, Normalize, ParamMap, ResolvedRun, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{Diagnostics, Spectrum, SpectrumResult};
use crate::field::TimeGrid;
use crate::nuclear::{zeeman_splitting, IsotopeConstants, Level, HBAR_EV_S, NUCLEAR_MAGNETON_EV_PER_T};

pub const CSV_COLUMNS: [&str; 11] = [
    "t_ns", "tau", "I_total", "I_sigma", "I_pi", "I_det1", "I_det2", "Re_Esigma", "Im_Esigma", "Re_Epi", "Im_Epi",
];

pub const TOOL_NAME: &str = "nfs-eraser";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest text that parses back to the same f64.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// File name of a spectrum: `<command>_<name>.csv`, or `<command>.csv` when
/// the spectrum carries the command's name.
pub fn csv_name(command: Command, spectrum: &str) -> String {
    if spectrum == command.name() {
        format!("{spectrum}.csv")
    } else {
        format!("{}_{spectrum}.csv", command.name())
    }
}

pub fn write_spectrum_csv<W: std::io::Write>(out: W, grid: &TimeGrid, s: &Spectrum) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    let cell = |t: &Option<Vec<f64>>, n: usize| t.as_ref().map_or(String::new(), |v| format_real(v[n]));
    for n in 0..grid.samples {
        let mut row = vec![format_real(grid.t_ns(n)), format_real(grid.tau(n))];
        for t in [&s.total, &s.sigma, &s.pi, &s.det1, &s.det2] {
            row.push(cell(t, n));
        }
        match &s.field {
            Some(f) => {
                let e = f[n];
                row.extend([e.sigma.re, e.sigma.im, e.pi.re, e.pi.im].map(format_real));
            }
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Physical constants a run used, for the manifest and `constants`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub isotope: IsotopeConstants,
    pub nuclear_magneton_ev_per_t: f64,
    pub hbar_ev_s: f64,
    /// Natural line width Γ₀ = ħ/τ₀ in eV.
    pub natural_width_ev: f64,
    /// Zeeman splittings per tesla in units of Γ₀.
    pub eps_ground_per_t: f64,
    pub eps_excited_per_t: f64,
}

impl ConstantsTable {
    pub fn new(isotope: &IsotopeConstants) -> Result<Self> {
        Ok(Self {
            isotope: *isotope,
            nuclear_magneton_ev_per_t: NUCLEAR_MAGNETON_EV_PER_T,
            hbar_ev_s: HBAR_EV_S,
            natural_width_ev: isotope.natural_width_ev(),
            eps_ground_per_t: zeeman_splitting(1.0, Level::Ground, isotope)?,
            eps_excited_per_t: zeeman_splitting(1.0, Level::Excited, isotope)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    /// Resolved flat parameters; resolving them again rebuilds `config`.
    pub params: ParamMap,
    pub config: RunConfig,
    pub grid: TimeGrid,
    pub normalize: Normalize,
    pub constants: ConstantsTable,
    pub outputs: Vec<String>,
    pub diagnostics: Diagnostics,
}

impl Manifest {
    pub fn file_name(command: Command) -> String {
        format!("{}.json", command.name())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Resolves the stored parameters again and checks that they rebuild
    /// the stored configuration.
    pub fn to_run(&self) -> Result<ResolvedRun> {
        let run = resolve(self.command, &self.params)?;
        if run.config != self.config || run.grid != self.grid {
            return Err(Error::InvalidConfig(format!(
                "manifest parameters no longer resolve to the recorded configuration (written by version {})",
                self.version
            )));
        }
        Ok(run)
    }
}

/// Writes one CSV per spectrum and the manifest into `dir`.
pub fn write_outputs(dir: &Path, run: &ResolvedRun, result: &SpectrumResult) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for s in &result.spectra {
        let name = csv_name(run.command, &s.name);
        let file = fs::File::create(dir.join(&name))?;
        write_spectrum_csv(std::io::BufWriter::new(file), &result.grid, s)?;
        outputs.push(name);
    }
    let isotope = match &run.config {
        RunConfig::Single { target, .. } => target.isotope,
        RunConfig::Scheme1(c) => c.target1.isotope,
        RunConfig::Scheme2(c) => c.target1.isotope,
    };
    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: VERSION.into(),
        command: run.command,
        params: run.params.clone(),
        config: run.config.clone(),
        grid: result.grid,
        normalize: run.normalize,
        constants: ConstantsTable::new(&isotope)?,
        outputs,
        diagnostics: result.diagnostics.clone(),
    };
    fs::write(dir.join(Manifest::file_name(run.command)), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn manifest_path(dir: &Path, command: Command) -> PathBuf {
    dir.join(Manifest::file_name(command))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.0, 1.0, -2.5, 1e-300, 3.3e-7, 0.1 + 0.2, 1e20, f64::MIN_POSITIVE, 141.0 * 0.001] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_real(0.5), "0.5");
        assert_eq!(format_real(2e-9), "2e-9");
    }

    #[test]
    fn file_names() {
        assert_eq!(csv_name(Command::Single, "single"), "single.csv");
        assert_eq!(csv_name(Command::Scheme1, "target2"), "scheme1_target2.csv");
        assert_eq!(csv_name(Command::Scheme2, "arm1"), "scheme2_arm1.csv");
    }

    #[test]
    fn absent_traces_are_empty_fields() {
        let grid = TimeGrid::new(0.0, 0.002, 0.001).unwrap();
        let s = Spectrum { name: "x".into(), total: Some(vec![1.0, 0.5, 0.25]), ..Default::default() };
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &grid, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_COLUMNS.join(","));
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], format!("{},0.001,0.5,,,,,,,,", format_real(grid.t_ns(1))));
    }
}
