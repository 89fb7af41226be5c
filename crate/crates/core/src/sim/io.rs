//! CSV readers and writers.
//!
//! Comma separated, header row, LF line endings, numbers with nine
//! significant digits.

use std::path::Path;

use num_complex::Complex64;

use super::profile::{DisturbanceProfile, SampledSeries};
use super::simulate::SimulationResult;
use crate::error::{Error, Result};
use crate::lti::StateSpace;
use crate::numerics::Matrix;

/// Nine significant digits, shortest form.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let dec = (8 - exp).max(0) as usize;
        let s = format!("{v:.dec$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{v:.8e}");
        let (m, e) = s.split_once('e').unwrap_or((&s, "0"));
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        format!("{m}e{e}")
    }
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io { path: path.display().to_string(), source: std::io::Error::other(e.to_string()) }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    }
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(false)
        .from_path(path)
        .map_err(io_err(path))
}

/// Writes a header and numeric rows.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(io_err(path))?;
    for r in rows {
        w.write_record(r).map_err(io_err(path))?;
    }
    w.flush().map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// `t` followed by every simulated channel.
pub fn write_timeseries(path: &Path, res: &SimulationResult) -> Result<()> {
    let header: Vec<String> = std::iter::once("t".to_string()).chain(res.columns.iter().cloned()).collect();
    let rows: Vec<Vec<String>> = (0..res.t.len())
        .map(|l| std::iter::once(fmt_num(res.t[l])).chain(res.series.iter().map(|s| fmt_num(s[l]))).collect())
        .collect();
    write_table(path, &header, &rows)
}

/// Reads a `t,dPL1..,dVw` series with a uniform time step.
pub fn read_disturbance_csv(path: &Path, n_grids: usize) -> Result<DisturbanceProfile> {
    let cfg = |reason: String| Error::Config { path: path.display().to_string(), reason };
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let mut rdr = csv::Reader::from_reader(file);
    let header = rdr.headers().map_err(|e| cfg(e.to_string()))?.clone();
    let mut expected = vec!["t".to_string()];
    expected.extend((1..=n_grids).map(|k| format!("dPL{k}")));
    expected.push("dVw".into());
    let got: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    if got != expected {
        return Err(cfg(format!("header must be `{}`", expected.join(","))));
    }
    let mut t = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| cfg(e.to_string()))?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| cfg(format!("row {}: `{s}` is not a number", i + 1))))
            .collect::<Result<_>>()?;
        t.push(nums[0]);
        values.push(nums[1..].to_vec());
    }
    if t.len() < 2 {
        return Err(cfg("need at least two samples".into()));
    }
    let period = t[1] - t[0];
    if !(period > 0.0) || t[0].abs() > 1e-9 * period {
        return Err(cfg("samples must start at t = 0 and increase".into()));
    }
    for (i, w) in t.windows(2).enumerate() {
        if ((w[1] - w[0]) - period).abs() > 1e-6 * period {
            return Err(cfg(format!("non-uniform step at row {}", i + 2)));
        }
    }
    Ok(DisturbanceProfile::SampledSeries(SampledSeries { period, values }))
}

/// Writes a profile sampled at `period` in the layout read back by
/// [`read_disturbance_csv`].
pub fn write_disturbance_csv(path: &Path, p: &DisturbanceProfile, n_grids: usize, duration: f64, period: f64) -> Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=n_grids).map(|k| format!("dPL{k}")));
    header.push("dVw".into());
    let n = (duration / period).round() as usize;
    let rows: Vec<Vec<String>> = (0..=n)
        .map(|l| {
            let t = l as f64 * period;
            std::iter::once(fmt_num(t)).chain(p.value_at(t, n_grids).into_iter().map(fmt_num)).collect()
        })
        .collect();
    write_table(path, &header, &rows)
}

/// Dense `A`, `B`, `C`, `D` blocks, one matrix row per line, padded to
/// the widest block. Channel names follow in `names` rows.
pub fn write_state_space(path: &Path, ss: &StateSpace) -> Result<()> {
    let width = ss.n_states().max(ss.n_inputs()).max(1);
    let mut header = vec!["block".to_string(), "row".to_string()];
    header.extend((0..width).map(|j| format!("c{j}")));
    let mut rows = Vec::new();
    let mut push = |name: &str, m: &Matrix| {
        for i in 0..m.nrows() {
            let mut r = vec![name.to_string(), i.to_string()];
            r.extend((0..width).map(|j| if j < m.ncols() { fmt_num(m[(i, j)]) } else { String::new() }));
            rows.push(r);
        }
    };
    push("A", &ss.a);
    push("B", &ss.b);
    push("C", &ss.c);
    push("D", &ss.d);
    for (name, list) in [("inputs", &ss.inputs), ("states", &ss.states), ("outputs", &ss.outputs)] {
        for chunk in list.chunks(width) {
            let mut r = vec![name.to_string(), String::new()];
            r.extend((0..width).map(|j| chunk.get(j).cloned().unwrap_or_default()));
            rows.push(r);
        }
    }
    write_table(path, &header, &rows)
}

/// `index, hsv, cumulative_energy`, index from 1.
pub fn write_hsv(path: &Path, hsv: &[f64], energy: &[f64]) -> Result<()> {
    let header: Vec<String> = ["index", "hsv", "cumulative_energy"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> =
        hsv.iter().zip(energy).enumerate().map(|(i, (h, e))| vec![(i + 1).to_string(), fmt_num(*h), fmt_num(*e)]).collect();
    write_table(path, &header, &rows)
}

/// `value, eig_real, eig_imag`, one row per eigenvalue.
pub fn write_eigenlocus(path: &Path, values: &[f64], spectra: &[Vec<Complex64>]) -> Result<()> {
    let header: Vec<String> = ["value", "eig_real", "eig_imag"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = values
        .iter()
        .zip(spectra)
        .flat_map(|(v, s)| s.iter().map(move |l| vec![fmt_num(*v), fmt_num(l.re), fmt_num(l.im)]))
        .collect();
    write_table(path, &header, &rows)
}
