//! Result envelopes, CSV encoding and atomic file emission.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;
pub const SCHEMA: &str = include_str!("../schema/envelope.schema.json");

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub command: &'static str,
    pub generator: String,
    pub config: RunConfig,
    pub results: Value,
    pub diagnostics: Value,
    pub timing: Timing,
}

/// Deterministic work counters. Wall-clock time is reported on stderr only,
/// so that files stay byte-identical between runs.
#[derive(Debug, Serialize)]
pub struct Timing {
    pub clock: &'static str,
    pub counters: BTreeMap<&'static str, u64>,
}

impl Timing {
    pub fn counters<const N: usize>(items: [(&'static str, u64); N]) -> Self {
        Timing {
            clock: "work-counters",
            counters: items.into_iter().collect(),
        }
    }
}

impl Envelope {
    pub fn new(command: &'static str, config: RunConfig, results: Value, diagnostics: Value, timing: Timing) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            generator: format!("geophase {}", env!("CARGO_PKG_VERSION")),
            config,
            results,
            diagnostics,
            timing,
        }
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self)?;
        v.push(b'\n');
        Ok(v)
    }
}

/// Seventeen significant digits in scientific notation; `NaN` and `inf` are
/// spelled the way Rust parses them back.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds a CSV document with LF line endings.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> CliResult<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| crate::error::CliError::Failed(format!("csv: {e}")))
}

/// An output file waiting to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Artifact {
            name: name.into(),
            bytes,
        }
    }
}

/// Writes every artifact through a temporary file in `dir` followed by a
/// rename, so a reader never sees a partial file.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&a.bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(dir.join(&a.name)).map_err(|e| e.error)?;
    }
    Ok(())
}

pub fn sweep_plot(csv: &str) -> String {
    format!(
        r#"# Heatmaps of the interference phase and contrast over (m, theta).
set datafile separator ','
set key autotitle columnhead
set terminal pngcairo size 1400,600
set output 'sweep.png'
set multiplot layout 1,2
set xlabel 'm = exp(-gamma tau)'
set ylabel 'theta [rad]'
set title 'chi (wrapped)'
set palette defined (-3.1416 'blue', 0 'white', 3.1416 'red')
set cbrange [-pi:pi]
plot '{csv}' using 3:1:4 with points pt 5 ps 0.6 palette notitle
set title 'contrast'
set palette defined (0 'black', 1 'yellow')
set cbrange [0:1]
plot '{csv}' using 3:1:6 with points pt 5 ps 0.6 palette notitle
unset multiplot
"#
    )
}

pub fn surface_plot(csv: &str, degree: i32) -> String {
    format!(
        r#"# Bloch paths of all polar angles; degree {degree}.
set datafile separator ','
set terminal pngcairo size 800,800
set output 'surface.png'
set view equal xyz
set xyplane 0
set parametric
set urange [0:2*pi]
set vrange [0:pi]
set isosamples 24,12
set title 'trajectory surface (degree {degree})'
splot cos(u)*sin(v), sin(u)*sin(v), cos(v) with lines lc rgb '#cccccc' notitle, \
      '{csv}' using 3:4:5:1 every ::1 with points pt 7 ps 0.4 palette notitle
"#
    )
}
