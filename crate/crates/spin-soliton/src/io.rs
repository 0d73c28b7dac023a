//! Configuration ingestion and persistence: the `key = value` config format,
//! CSV trajectories with JSON metadata sidecars, report files, directory
//! locks, and optional grayscale heatmaps.
//!
//! All numeric serialization uses 17 significant digits (`{:.16e}`), which
//! round-trips every finite f64 exactly.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use crate::continuum::{Field, Trajectory, TrajectoryMeta};
use crate::harness::{
    default_snapshot_times, resolve_preset, ExperimentConfig, Preset, RunReport,
};
use crate::model::ModelParams;
use crate::analytic::SolitonParams;
use crate::{C64, Error, Result};

/// Exact header line of every trajectory CSV.
pub const CSV_HEADER: &str = "t,x,re,im,abs2";

/// Name of the per-directory lock file.
pub const LOCK_FILE_NAME: &str = ".spin-soliton.lock";

const CONFIG_KEYS: [&str; 18] = [
    "preset", "J", "delta", "theta", "B", "S", "hbar", "A", "v1", "x0", "model", "bc",
    "n_points", "x_min", "x_max", "dt", "t_end", "snapshots",
];

/// `snapshots` accepts either a bare count or an explicit comma list.
enum SnapshotSpec {
    /// Evenly spaced times from 0 to `t_end`, endpoints included.
    Count(usize),
    Times(Vec<f64>),
}

struct Entries<'a> {
    by_key: HashMap<&'a str, (usize, &'a str)>,
}

impl<'a> Entries<'a> {
    fn parse(text: &'a str) -> Result<Self> {
        let mut by_key = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "unknown key `{key}` (known keys: {})",
                        CONFIG_KEYS.join(", ")
                    ),
                });
            }
            if value.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("key `{key}` has an empty value"),
                });
            }
            if let Some((first_line, _)) = by_key.insert(key, (line_no, value)) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}` (first set on line {first_line})"),
                });
            }
        }
        Ok(Self { by_key })
    }

    fn raw(&self, key: &str) -> Option<(usize, &'a str)> {
        self.by_key.get(key).copied()
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                line,
                message: format!("key `{key}`: `{value}` is not a number"),
            }),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<usize>().map(Some).map_err(|_| Error::Parse {
                line,
                message: format!("key `{key}`: `{value}` is not a nonnegative integer"),
            }),
        }
    }

    fn parse_with<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: std::str::FromStr<Err = Error>,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<T>().map(Some).map_err(|e| Error::Parse {
                line,
                message: format!("key `{key}`: {e}"),
            }),
        }
    }

    fn snapshots(&self) -> Result<Option<SnapshotSpec>> {
        let Some((line, value)) = self.raw("snapshots") else {
            return Ok(None);
        };
        if value.bytes().all(|b| b.is_ascii_digit()) {
            let count: usize = value.parse().map_err(|_| Error::Parse {
                line,
                message: format!("key `snapshots`: `{value}` is not a count"),
            })?;
            if count < 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("key `snapshots`: a count needs at least 2, got {count}"),
                });
            }
            return Ok(Some(SnapshotSpec::Count(count)));
        }
        let times = value
            .split(',')
            .map(|part| {
                part.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("key `snapshots`: `{}` is not a time", part.trim()),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Some(SnapshotSpec::Times(times)))
    }
}

fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| {
        Error::Validation(format!("a custom configuration requires the key `{key}`"))
    })
}

/// Parse the documented `key = value` schema into a resolved configuration.
///
/// Known keys: `preset, J, delta, theta, B, S, hbar, A, v1, x0, model, bc,
/// n_points, x_min, x_max, dt, t_end, snapshots`. Lines starting with `#`
/// and blank lines are skipped; unknown or duplicate keys are rejected with
/// their line number. A named preset provides the base values and every
/// other key overrides it; without a preset (or with `preset = custom`) the
/// physical keys are all required while `hbar` (1), `x_min`/`x_max`/`dt`
/// (derived) and `snapshots` (13, evenly spaced) have defaults. `snapshots`
/// takes a count (evenly spaced over `[0, t_end]`) or a comma-separated list
/// of times.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with_overrides(text, &[])
}

/// [`parse_config`] with command-line overrides layered on top: each
/// `(key, value)` pair replaces the file's entry for that key (or adds it).
/// Overrides carry line 0 internally; their errors are reported as
/// `command-line override: …` instead of a file line.
pub fn parse_config_with_overrides(
    text: &str,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig> {
    let mut entries = Entries::parse(text)?;
    for (key, value) in overrides {
        let known = CONFIG_KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| Error::Validation(format!("unknown config key `{key}`")))?;
        entries.by_key.insert(known, (0, value.as_str()));
    }
    resolve_entries(&entries).map_err(|e| match e {
        Error::Parse { line: 0, message } => {
            Error::Validation(format!("command-line override: {message}"))
        }
        other => other,
    })
}

fn resolve_entries(entries: &Entries) -> Result<ExperimentConfig> {
    let preset = entries
        .parse_with::<Preset>("preset")?
        .unwrap_or(Preset::Custom);
    let base = match preset {
        Preset::Custom => None,
        named => Some(resolve_preset(named)?),
    };

    let field = |over: Option<f64>, base_val: Option<f64>, key: &str| -> Result<f64> {
        match over.or(base_val) {
            Some(v) => Ok(v),
            None => require(None, key),
        }
    };
    let bp = base.as_ref().map(|b| b.params);
    let bs = base.as_ref().map(|b| b.soliton);

    let j = field(entries.f64("J")?, bp.map(|p| p.j), "J")?;
    let delta = field(entries.f64("delta")?, bp.map(|p| p.delta), "delta")?;
    let theta = field(entries.f64("theta")?, bp.map(|p| p.theta), "theta")?;
    let b_field = field(entries.f64("B")?, bp.map(|p| p.b), "B")?;
    let spin = field(entries.f64("S")?, bp.map(|p| p.spin), "S")?;
    let hbar = entries
        .f64("hbar")?
        .or(bp.map(|p| p.hbar))
        .unwrap_or(1.0);
    let params = ModelParams::new(j, delta, theta, b_field, spin)?.with_hbar(hbar)?;

    let amplitude = field(entries.f64("A")?, bs.map(|s| s.amplitude), "A")?;
    let v1 = field(entries.f64("v1")?, bs.map(|s| s.velocity_coeff), "v1")?;
    let x0 = field(entries.f64("x0")?, bs.map(|s| s.center), "x0")?;
    let soliton = SolitonParams::new(amplitude, v1, x0)?;

    let model = match entries.parse_with("model")? {
        Some(m) => m,
        None => require(base.as_ref().map(|b| b.model), "model")?,
    };
    let boundary = match entries.parse_with("bc")? {
        Some(bc) => bc,
        None => require(base.as_ref().map(|b| b.boundary), "bc")?,
    };
    let n_points = match entries.usize("n_points")? {
        Some(n) => n,
        None => require(base.as_ref().map(|b| b.n_points), "n_points")?,
    };
    let t_end = field(entries.f64("t_end")?, base.as_ref().map(|b| b.t_end), "t_end")?;

    let x_min = entries.f64("x_min")?.or(base.as_ref().and_then(|b| b.x_min));
    let x_max = entries.f64("x_max")?.or(base.as_ref().and_then(|b| b.x_max));
    let dt = entries.f64("dt")?.or(base.as_ref().and_then(|b| b.dt));

    // Snapshot times: an explicit key wins; otherwise the preset's times are
    // kept only while `t_end` is untouched, so overrides stay consistent.
    let snapshot_times = match entries.snapshots()? {
        Some(SnapshotSpec::Times(times)) => times,
        Some(SnapshotSpec::Count(count)) => (0..count)
            .map(|i| t_end * i as f64 / (count - 1) as f64)
            .collect(),
        None => match (&base, entries.raw("t_end")) {
            (Some(b), None) => b.snapshot_times.clone(),
            _ => default_snapshot_times(t_end),
        },
    };

    Ok(ExperimentConfig {
        preset,
        params,
        soliton,
        model,
        boundary,
        n_points,
        x_min,
        x_max,
        dt,
        t_end,
        snapshot_times,
    })
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

/// Write a trajectory as CSV (`t,x,re,im,abs2`, one sample per row, snapshot
/// by snapshot) plus a `<stem>.meta.json` sidecar holding the full
/// [`TrajectoryMeta`].
pub fn write_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{CSV_HEADER}")?;
    for snapshot in &traj.snapshots {
        for (i, value) in snapshot.values.iter().enumerate() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                snapshot.time,
                snapshot.grid.x(i),
                value.re,
                value.im,
                value.norm_sqr(),
            )?;
        }
    }
    out.flush()?;
    let meta = serde_json::to_string_pretty(&traj.meta)?;
    fs::write(sidecar_path(path), meta + "\n")?;
    Ok(())
}

fn schema_error(path: &Path, message: String) -> Error {
    Error::SchemaMismatch {
        path: path.display().to_string(),
        message,
    }
}

/// Read back a trajectory written by [`write_trajectory`].
///
/// Validates the header, the column count, the grid coordinates against the
/// sidecar metadata, and the `abs2 = re² + im²` redundancy; field values
/// round-trip bitwise thanks to the 17-digit serialization.
pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let meta_text = fs::read_to_string(sidecar_path(path))?;
    let meta: TrajectoryMeta = serde_json::from_str(&meta_text)?;
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(schema_error(
                path,
                format!("bad header {other:?}, expected `{CSV_HEADER}`"),
            ));
        }
    }

    let n = meta.grid.n_points;
    let mut snapshots: Vec<Field> = Vec::new();
    let mut current: Vec<C64> = Vec::with_capacity(n);
    let mut current_time = f64::NAN;
    for (idx, line) in lines.enumerate() {
        let row_no = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(schema_error(
                path,
                format!("row {row_no}: expected 5 columns, got {}", fields.len()),
            ));
        }
        let mut nums = [0.0f64; 5];
        for (slot, raw) in nums.iter_mut().zip(&fields) {
            *slot = raw.parse().map_err(|_| {
                schema_error(path, format!("row {row_no}: `{raw}` is not a number"))
            })?;
        }
        let [t, x, re, im, abs2] = nums;
        let value = C64::new(re, im);
        let expected_abs2 = value.norm_sqr();
        if (abs2 - expected_abs2).abs() > 1e-12 * expected_abs2.max(1e-300) {
            return Err(schema_error(
                path,
                format!(
                    "row {row_no}: abs2 = {abs2:e} is inconsistent with re² + im² = {expected_abs2:e}"
                ),
            ));
        }
        if current.is_empty() {
            current_time = t;
        } else if t != current_time {
            return Err(schema_error(
                path,
                format!(
                    "row {row_no}: time changed mid-snapshot ({t} after {current_time}); \
                     each snapshot must span exactly {n} rows"
                ),
            ));
        }
        let expected_x = meta.grid.x(current.len());
        if (x - expected_x).abs() > 1e-9 * expected_x.abs().max(1.0) {
            return Err(schema_error(
                path,
                format!("row {row_no}: x = {x} does not match the grid point {expected_x}"),
            ));
        }
        current.push(value);
        if current.len() == n {
            snapshots.push(Field {
                grid: meta.grid,
                values: std::mem::take(&mut current),
                time: current_time,
            });
        }
    }
    if !current.is_empty() {
        return Err(schema_error(
            path,
            format!(
                "trailing partial snapshot of {} rows (grid has {n} points)",
                current.len()
            ),
        ));
    }
    if snapshots.is_empty() {
        return Err(schema_error(path, "no data rows".into()));
    }
    Trajectory::new(meta, snapshots)
}

/// Exclusive advisory lock on an output directory, held for the lifetime of
/// the value. Creates the directory if needed. Concurrent runs must target
/// distinct directories; a stale lock (e.g. after a crash) must be removed
/// by hand and the error says so.
#[derive(Debug)]
pub struct DirLock {
    lock_path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let lock_path = dir.join(LOCK_FILE_NAME);
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&lock_path)
        {
            Ok(_) => Ok(Self { lock_path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::DirectoryLocked(format!(
                    "{} is locked: {LOCK_FILE_NAME} already present \
                     (delete the file if the owning run is gone)",
                    dir.display()
                )))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.lock_path);
    }
}

/// Render |φ(x, t)| as a binary PGM (P5) image: one row per snapshot, one
/// column per grid point, 8-bit grayscale normalized to the trajectory-wide
/// modulus maximum.
pub fn write_heatmap_pgm(traj: &Trajectory, path: &Path) -> Result<()> {
    let width = traj.meta.grid.n_points;
    let height = traj.snapshots.len();
    let max = traj
        .snapshots
        .iter()
        .map(|s| s.max_modulus())
        .fold(0.0f64, f64::max);
    let mut bytes = Vec::with_capacity(32 + width * height);
    bytes.extend_from_slice(format!("P5\n{width} {height}\n255\n").as_bytes());
    for snapshot in &traj.snapshots {
        for value in &snapshot.values {
            let level = if max > 0.0 {
                (value.norm() / max * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            bytes.push(level);
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Write a run report as pretty-printed JSON.
pub fn write_report_json(report: &RunReport, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    fs::write(path, json + "\n")?;
    Ok(())
}
