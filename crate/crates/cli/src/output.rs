//! File outputs: line profiles, legacy structured-points volume snapshots,
//! binary checkpoints. Every file is written to a temporary sibling and
//! renamed into place, so readers never observe partial content.

use cuboid_lbm::solver::{ConvergenceSnapshot, SimulationConfig, SimulationState};
use cuboid_lbm::Error;
use std::io::Read;
use std::path::Path;

type Result<T> = std::result::Result<T, Error>;

const CHECKPOINT_MAGIC: &[u8; 4] = b"CLBM";
const CHECKPOINT_VERSION: u32 = 1;

/// Writes `content` atomically (temp file + rename).
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
    ));
    std::fs::write(&tmp, content).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Writes a line profile: `# header`, then `coordinate value` per sample
/// in the given (already ordered) sequence.
pub fn write_profile(path: &Path, header: &str, samples: &[(f64, f64)]) -> Result<()> {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for (coord, value) in samples {
        out.push_str(&format!("{coord:.9e} {value:.9e}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Writes a legacy structured-points snapshot with density and velocity,
/// spacing `(1, r, s)` so viewers render the physical cuboid geometry.
pub fn write_vtk(path: &Path, state: &SimulationState, title: &str) -> Result<()> {
    let (nx, ny, nz) = state.field.dims();
    let n = nx * ny * nz;
    let (r, s) = (state.spec.r, state.spec.s);
    let mut out = String::with_capacity(n * 60);
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(title);
    out.push('\n');
    out.push_str("ASCII\nDATASET STRUCTURED_POINTS\n");
    out.push_str(&format!("DIMENSIONS {nx} {ny} {nz}\n"));
    out.push_str(&format!("ORIGIN {:.9e} {:.9e} {:.9e}\n", 0.5, 0.5 * r, 0.5 * s));
    out.push_str(&format!("SPACING {:.9e} {:.9e} {:.9e}\n", 1.0, r, s));
    out.push_str(&format!("POINT_DATA {n}\n"));
    out.push_str("SCALARS rho double 1\nLOOKUP_TABLE default\n");
    for v in &state.hydro.rho {
        out.push_str(&format!("{v:.9e}\n"));
    }
    out.push_str("VECTORS u double\n");
    for i in 0..n {
        out.push_str(&format!(
            "{:.9e} {:.9e} {:.9e}\n",
            state.hydro.ux[i], state.hydro.uy[i], state.hydro.uz[i]
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Serializes both population buffers, the step counter, the convergence
/// snapshot and the full configuration into a versioned binary checkpoint.
pub fn write_checkpoint(
    path: &Path,
    state: &SimulationState,
    config: &SimulationConfig,
) -> Result<()> {
    let (nx, ny, nz) = state.field.dims();
    let config_text = crate::config::render_config(config);
    let n = state.field.n_nodes();
    let mut buf = Vec::with_capacity(64 + config_text.len() + (54 * n + 3 * n) * 8);
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    for v in [nx as u64, ny as u64, nz as u64, state.step, state.snapshot.step] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(config_text.len() as u64).to_le_bytes());
    buf.extend_from_slice(config_text.as_bytes());
    for value in state
        .field
        .current()
        .iter()
        .chain(state.field.next_buffer())
        .chain(&state.snapshot.ux)
        .chain(&state.snapshot.uy)
        .chain(&state.snapshot.uz)
    {
        buf.extend_from_slice(&value.to_le_bytes());
    }
    write_atomic(path, &buf)
}

struct Reader<'a> {
    path: &'a str,
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.buf.len() {
            return Err(Error::Parse {
                path: self.path.into(),
                line: 0,
                message: "checkpoint truncated".into(),
            });
        }
        let slice = &self.buf[self.at..self.at + n];
        self.at += n;
        Ok(slice)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64_vec(&mut self, count: usize) -> Result<Vec<f64>> {
        let bytes = self.take(count * 8)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Loads a checkpoint: the embedded configuration plus a state that
/// continues bit-exactly.
pub fn read_checkpoint(path: &Path) -> Result<(SimulationConfig, SimulationState)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let path_str = path.display().to_string();
    let mut r = Reader {
        path: &path_str,
        buf: &bytes,
        at: 0,
    };
    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err(Error::Parse {
            path: path_str.clone(),
            line: 0,
            message: "not a checkpoint file".into(),
        });
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(Error::Parse {
            path: path_str.clone(),
            line: 0,
            message: format!("unsupported checkpoint version {version}"),
        });
    }
    let nx = r.u64()? as usize;
    let ny = r.u64()? as usize;
    let nz = r.u64()? as usize;
    let step = r.u64()?;
    let snapshot_step = r.u64()?;
    let config_len = r.u64()? as usize;
    let config_text = std::str::from_utf8(r.take(config_len)?)
        .map_err(|_| Error::Parse {
            path: path_str.clone(),
            line: 0,
            message: "embedded config is not UTF-8".into(),
        })?
        .to_string();
    let config = crate::config::parse_config_text(&config_text, &path_str)?;
    if (config.nx, config.ny, config.nz) != (nx, ny, nz) {
        return Err(Error::Parse {
            path: path_str.clone(),
            line: 0,
            message: "checkpoint grid does not match its embedded config".into(),
        });
    }
    let n = nx * ny * nz;
    let cur = r.f64_vec(27 * n)?;
    let next = r.f64_vec(27 * n)?;
    let snapshot = ConvergenceSnapshot {
        step: snapshot_step,
        ux: r.f64_vec(n)?,
        uy: r.f64_vec(n)?,
        uz: r.f64_vec(n)?,
    };
    let state = cuboid_lbm::solver::resume(&config, cur, next, step, snapshot)?;
    Ok((config, state))
}

/// Convenience sink writing a volume snapshot and refreshing the
/// checkpoint at the output cadence.
pub struct OutputSink<'a> {
    pub dir: &'a Path,
    pub config: &'a SimulationConfig,
}

impl OutputSink<'_> {
    pub fn emit(&self, state: &SimulationState) {
        let vtk = self.dir.join(format!("snapshot_{:08}.vtk", state.step));
        if let Err(e) = write_vtk(&vtk, state, &format!("step {}", state.step)) {
            eprintln!("warning: {e}");
        }
        let ckpt = self.dir.join("checkpoint.bin");
        if let Err(e) = write_checkpoint(&ckpt, state, self.config) {
            eprintln!("warning: {e}");
        }
    }
}
