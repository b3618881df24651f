//! Gnuplot script emission for log-log mean-f₀ curves. Nothing is drawn
//! in-process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};
use crate::record::{format_float, RunRecord};

pub const SCRIPT_NAME: &str = "plot.gp";

fn label(record: &RunRecord) -> String {
    let dims: Vec<String> = record.config.block_dims.iter().map(|d| d.to_string()).collect();
    format!("({})", dims.join(","))
}

fn data_name(i: usize, record: &RunRecord) -> String {
    let dims: Vec<String> = record.config.block_dims.iter().map(|d| d.to_string()).collect();
    format!("curve{i}_{}.dat", dims.join("-"))
}

/// Writes one `.dat` file per record (`n mean se`) and a script drawing each
/// curve with a guide line `C n^e (ln n)^p` through its first point.
pub fn write_plot(records: &[RunRecord], out: &Path) -> Result<PathBuf> {
    if records.is_empty() {
        return Err(CliError::Usage("nothing to plot".into()));
    }
    for r in records {
        if r.aggregates.is_empty() {
            return Err(CliError::Record {
                path: out.to_path_buf(),
                message: format!("record {} has no data", label(r)),
            });
        }
    }
    fs::create_dir_all(out).map_err(CliError::io(out))?;

    let mut script = String::new();
    writeln!(script, "# mean vertex count against n, with predicted growth guides").unwrap();
    writeln!(script, "set logscale xy").unwrap();
    writeln!(script, "set xlabel 'n'").unwrap();
    writeln!(script, "set ylabel 'mean f_0'").unwrap();
    writeln!(script, "set key left top").unwrap();
    let mut plots = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let name = data_name(i, r);
        let mut data = String::from("# n mean_f0 se_f0\n");
        for a in &r.aggregates {
            writeln!(data, "{} {} {}", a.n, format_float(a.f0_mean), format_float(a.f0_se)).unwrap();
        }
        let path = out.join(&name);
        fs::write(&path, data).map_err(CliError::io(&path))?;
        let lt = i + 1;
        plots.push(format!("'{name}' using 1:2:3 with yerrorlines lt {lt} title '{}'", label(r)));
        if let Some(p) = &r.predicted {
            let first = &r.aggregates[0];
            let n0 = first.n as f64;
            let scale = first.f0_mean / (n0.powf(p.exponent) * n0.ln().powi(p.log_power as i32));
            writeln!(
                script,
                "g{i}(x) = {} * x**{} * log(x)**{}",
                format_float(scale),
                format_float(p.exponent),
                p.log_power
            )
            .unwrap();
            plots.push(format!("g{i}(x) with lines dt 2 lt {lt} title '{} {}'", label(r), p.formula));
        }
    }
    writeln!(script, "plot \\\n    {}", plots.join(", \\\n    ")).unwrap();
    let path = out.join(SCRIPT_NAME);
    fs::write(&path, script).map_err(CliError::io(&path))?;
    Ok(path)
}
