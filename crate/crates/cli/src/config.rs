//! Flat INI-style run configuration: `[section]` headers, `key = value`
//! lines, `#` comments. All values are in lattice units (dx = dt = 1).
//! Unknown keys are errors so typos cannot silently change a run.

use cuboid_lbm::domain::{BoundarySpec, Face, FaceCondition};
use cuboid_lbm::solver::{Forcing, RateSpec, SimulationConfig};
use cuboid_lbm::{CollisionVariant, CorrectionMode, Error};
use std::collections::BTreeMap;

type Result<T> = std::result::Result<T, Error>;

/// Raw parsed file: section -> key -> (line, value).
struct Ini {
    path: String,
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

impl Ini {
    fn parse(text: &str, path: &str) -> Result<Ini> {
        let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: path.into(),
                    line: lineno + 1,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            if current.is_empty() {
                return Err(Error::Parse {
                    path: path.into(),
                    line: lineno + 1,
                    message: "key outside any [section]".into(),
                });
            }
            let prev = sections.get_mut(&current).unwrap().insert(
                key.trim().to_string(),
                (lineno + 1, value.trim().to_string()),
            );
            if prev.is_some() {
                return Err(Error::Parse {
                    path: path.into(),
                    line: lineno + 1,
                    message: format!("duplicate key `{}`", key.trim()),
                });
            }
        }
        Ok(Ini {
            path: path.into(),
            sections,
        })
    }
}

/// Typed view over one section that tracks which keys were consumed.
struct Section<'a> {
    path: &'a str,
    name: &'a str,
    keys: Option<&'a BTreeMap<String, (usize, String)>>,
    used: Vec<String>,
}

impl<'a> Section<'a> {
    fn get(&mut self, key: &str) -> Option<&'a str> {
        self.used.push(key.to_string());
        self.keys
            .and_then(|m| m.get(key))
            .map(|(_, v)| v.as_str())
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| {
                let line = self.keys.and_then(|m| m.get(key)).map(|(l, _)| *l).unwrap_or(0);
                Error::Parse {
                    path: self.path.into(),
                    line,
                    message: format!("[{}] {key}: cannot parse `{v}`", self.name),
                }
            }),
        }
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.parse(key)?.ok_or_else(|| {
            Error::Configuration(format!("[{}] missing required key `{key}`", self.name))
        })
    }

    fn finish(self) -> Result<()> {
        if let Some(keys) = self.keys {
            for (key, (line, _)) in keys {
                if !self.used.iter().any(|u| u == key) {
                    return Err(Error::Parse {
                        path: self.path.into(),
                        line: *line,
                        message: format!("unknown key `{key}` in [{}]", self.name),
                    });
                }
            }
        }
        Ok(())
    }
}

const KNOWN_SECTIONS: [&str; 6] = ["lattice", "grid", "relaxation", "boundary", "force", "run"];

/// Parses and validates a configuration file body.
pub fn parse_config_text(text: &str, path: &str) -> Result<SimulationConfig> {
    let ini = Ini::parse(text, path)?;
    for name in ini.sections.keys() {
        if !KNOWN_SECTIONS.contains(&name.as_str()) {
            return Err(Error::Configuration(format!("unknown section [{name}]")));
        }
    }
    let section = |name: &'static str| Section {
        path: &ini.path,
        name,
        keys: ini.sections.get(name),
        used: Vec::new(),
    };

    let mut s = section("lattice");
    let r: f64 = s.require("r")?;
    let sr: f64 = s.require("s")?;
    let cs2 = match s.get("cs2") {
        None | Some("auto") => None,
        Some(v) => Some(v.parse::<f64>().map_err(|_| {
            Error::Configuration(format!("[lattice] cs2: expected a number or `auto`, got `{v}`"))
        })?),
    };
    s.finish()?;

    let mut s = section("grid");
    let nx: usize = s.require("nx")?;
    let ny: usize = s.require("ny")?;
    let nz: usize = s.require("nz")?;
    s.finish()?;

    let mut s = section("relaxation");
    let omega_nu: Option<f64> = s.parse("omega_nu")?;
    let nu: Option<f64> = s.parse("nu")?;
    let shear = match (omega_nu, nu) {
        (Some(w), None) => RateSpec::Omega(w),
        (None, Some(v)) => RateSpec::Transport(v),
        (Some(_), Some(_)) => {
            return Err(Error::Configuration(
                "[relaxation] give exactly one of omega_nu / nu, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Configuration(
                "[relaxation] one of omega_nu / nu is required".into(),
            ))
        }
    };
    let omega_xi: Option<f64> = s.parse("omega_xi")?;
    let xi: Option<f64> = s.parse("xi")?;
    let bulk = match (omega_xi, xi) {
        (Some(w), None) => Some(RateSpec::Omega(w)),
        (None, Some(v)) => Some(RateSpec::Transport(v)),
        (None, None) => None,
        (Some(_), Some(_)) => {
            return Err(Error::Configuration(
                "[relaxation] give at most one of omega_xi / xi".into(),
            ))
        }
    };
    let omega_1 = s.parse("omega_1")?.unwrap_or(1.0);
    let omega_high = s.parse("omega_high")?.unwrap_or(1.0);
    s.finish()?;

    let mut s = section("boundary");
    let mut faces = [FaceCondition::Periodic; 6];
    for (axis, key) in ["x", "y", "z"].iter().enumerate() {
        let cond = match s.get(key).unwrap_or("periodic") {
            "periodic" => FaceCondition::Periodic,
            "wall" => FaceCondition::WallRest,
            other => {
                return Err(Error::Configuration(format!(
                    "[boundary] {key}: expected `periodic` or `wall`, got `{other}`"
                )))
            }
        };
        faces[2 * axis] = cond;
        faces[2 * axis + 1] = cond;
    }
    let lid: f64 = s.parse("lid")?.unwrap_or(0.0);
    if lid != 0.0 {
        if !matches!(faces[Face::YMax as usize], FaceCondition::WallRest) {
            return Err(Error::Configuration(
                "[boundary] lid requires y = wall".into(),
            ));
        }
        faces[Face::YMax as usize] = FaceCondition::WallMoving { u_lid: lid };
    }
    s.finish()?;
    let boundary = BoundarySpec { faces };

    let mut s = section("force");
    let fx: f64 = s.parse("fx")?.unwrap_or(0.0);
    let fy: f64 = s.parse("fy")?.unwrap_or(0.0);
    let fz: f64 = s.parse("fz")?.unwrap_or(0.0);
    let period: Option<f64> = s.parse("period")?;
    s.finish()?;
    let forcing = match period {
        Some(t) if t > 0.0 => Forcing::Periodic {
            amplitude: [fx, fy, fz],
            period: t,
        },
        Some(t) => {
            return Err(Error::Configuration(format!(
                "[force] period must be positive, got {t}"
            )))
        }
        None if fx == 0.0 && fy == 0.0 && fz == 0.0 => Forcing::None,
        None => Forcing::Constant([fx, fy, fz]),
    };

    let mut s = section("run");
    let variant = match s.get("variant").unwrap_or("central") {
        "central" => CollisionVariant::Central,
        "raw" => CollisionVariant::Raw,
        other => {
            return Err(Error::Configuration(format!(
                "[run] variant: expected `central` or `raw`, got `{other}`"
            )))
        }
    };
    let corrections = match s.get("corrections").unwrap_or("full") {
        "full" => CorrectionMode::Full,
        "low-mach" => CorrectionMode::LowMach,
        "off" => CorrectionMode::Off,
        other => {
            return Err(Error::Configuration(format!(
                "[run] corrections: expected full | low-mach | off, got `{other}`"
            )))
        }
    };
    let max_steps: u64 = s.require("max_steps")?;
    let convergence_tol: Option<f64> = s.parse("tolerance")?;
    let output_every: Option<u64> = s.parse("output_every")?;
    s.finish()?;

    let config = SimulationConfig {
        r,
        s: sr,
        cs2,
        nx,
        ny,
        nz,
        shear,
        bulk,
        omega_1,
        omega_high,
        boundary,
        forcing,
        variant,
        corrections,
        max_steps,
        convergence_tol,
        output_every,
    };
    config.validate()?;
    Ok(config)
}

/// Reads and parses a configuration file.
pub fn parse_config(path: &std::path::Path) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_config_text(&text, &path.display().to_string())
}

/// Renders a configuration back to the file format; `parse_config_text`
/// of the result reproduces the configuration.
pub fn render_config(config: &SimulationConfig) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    out.push_str("# all values in lattice units, dx = dt = 1\n");
    writeln!(out, "[lattice]").unwrap();
    writeln!(out, "r = {:?}", config.r).unwrap();
    writeln!(out, "s = {:?}", config.s).unwrap();
    match config.cs2 {
        Some(v) => writeln!(out, "cs2 = {v:?}").unwrap(),
        None => writeln!(out, "cs2 = auto").unwrap(),
    }
    writeln!(out, "\n[grid]").unwrap();
    writeln!(out, "nx = {}", config.nx).unwrap();
    writeln!(out, "ny = {}", config.ny).unwrap();
    writeln!(out, "nz = {}", config.nz).unwrap();
    writeln!(out, "\n[relaxation]").unwrap();
    match config.shear {
        RateSpec::Omega(w) => writeln!(out, "omega_nu = {w:?}").unwrap(),
        RateSpec::Transport(v) => writeln!(out, "nu = {v:?}").unwrap(),
    }
    match config.bulk {
        Some(RateSpec::Omega(w)) => writeln!(out, "omega_xi = {w:?}").unwrap(),
        Some(RateSpec::Transport(v)) => writeln!(out, "xi = {v:?}").unwrap(),
        None => {}
    }
    writeln!(out, "omega_1 = {:?}", config.omega_1).unwrap();
    writeln!(out, "omega_high = {:?}", config.omega_high).unwrap();
    writeln!(out, "\n[boundary]").unwrap();
    for (axis, key) in ["x", "y", "z"].iter().enumerate() {
        let word = match config.boundary.faces[2 * axis] {
            FaceCondition::Periodic => "periodic",
            _ => "wall",
        };
        writeln!(out, "{key} = {word}").unwrap();
    }
    if let Some(u) = config.boundary.has_moving_lid() {
        writeln!(out, "lid = {u:?}").unwrap();
    }
    writeln!(out, "\n[force]").unwrap();
    match &config.forcing {
        Forcing::None => {}
        Forcing::Constant(f) => {
            writeln!(out, "fx = {:?}", f[0]).unwrap();
            writeln!(out, "fy = {:?}", f[1]).unwrap();
            writeln!(out, "fz = {:?}", f[2]).unwrap();
        }
        Forcing::Periodic { amplitude, period } => {
            writeln!(out, "fx = {:?}", amplitude[0]).unwrap();
            writeln!(out, "fy = {:?}", amplitude[1]).unwrap();
            writeln!(out, "fz = {:?}", amplitude[2]).unwrap();
            writeln!(out, "period = {period:?}").unwrap();
        }
    }
    writeln!(out, "\n[run]").unwrap();
    let variant = match config.variant {
        CollisionVariant::Central => "central",
        CollisionVariant::Raw => "raw",
    };
    writeln!(out, "variant = {variant}").unwrap();
    let corrections = match config.corrections {
        CorrectionMode::Full => "full",
        CorrectionMode::LowMach => "low-mach",
        CorrectionMode::Off => "off",
    };
    writeln!(out, "corrections = {corrections}").unwrap();
    writeln!(out, "max_steps = {}", config.max_steps).unwrap();
    if let Some(tol) = config.convergence_tol {
        writeln!(out, "tolerance = {tol:?}").unwrap();
    }
    if let Some(every) = config.output_every {
        writeln!(out, "output_every = {every}").unwrap();
    }
    out
}

/// Applies `section.key=value` overrides by rewriting the rendered config.
pub fn apply_overrides(config: &SimulationConfig, sets: &[String]) -> Result<SimulationConfig> {
    let mut ini = Ini::parse(&render_config(config), "<preset>")?;
    for set in sets {
        let (path, value) = set.split_once('=').ok_or_else(|| {
            Error::Configuration(format!("--set expects section.key=value, got `{set}`"))
        })?;
        let (section, key) = path.split_once('.').ok_or_else(|| {
            Error::Configuration(format!("--set expects section.key=value, got `{set}`"))
        })?;
        ini.sections
            .entry(section.trim().to_string())
            .or_default()
            .insert(key.trim().to_string(), (0, value.trim().to_string()));
        // conflicting pair members are replaced, not duplicated
        if section == "relaxation" {
            let sec = ini.sections.get_mut("relaxation").unwrap();
            match key.trim() {
                "omega_nu" => {
                    sec.remove("nu");
                }
                "nu" => {
                    sec.remove("omega_nu");
                }
                "omega_xi" => {
                    sec.remove("xi");
                }
                "xi" => {
                    sec.remove("omega_xi");
                }
                _ => {}
            }
        }
    }
    let mut text = String::new();
    for (name, keys) in &ini.sections {
        text.push_str(&format!("[{name}]\n"));
        for (key, (_, value)) in keys {
            text.push_str(&format!("{key} = {value}\n"));
        }
    }
    parse_config_text(&text, "<overrides>")
}
