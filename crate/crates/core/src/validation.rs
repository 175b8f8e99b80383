//! Analytical reference solutions, reference-data comparison, error norms,
//! benchmark presets and the stability-sweep harness.

use crate::collision::CollisionVariant;
use crate::domain::BoundarySpec;
use crate::error::Error;
use crate::solver::{self, Forcing, RateSpec, RunOutcome, SimulationConfig, SimulationState};
use crate::Result;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Steady velocity of pressure- or force-driven flow through a square duct
/// of side `l`, evaluated at `(y, z)` with both coordinates centered
/// (walls at +-l/2).
///
/// The textbook Fourier series is summed with its pure-cosine part folded
/// into the exact parabolic channel profile, leaving only the
/// exponentially convergent wall-correction terms truncated at odd
/// `n <= n_max`; away from the z-walls the result is insensitive to
/// doubling `n_max`.
pub fn duct_velocity(
    y: f64,
    z: f64,
    l: f64,
    f_x: f64,
    rho: f64,
    nu: f64,
    n_max: u32,
) -> f64 {
    let yh = y / l + 0.5; // 0 at one wall, 1 at the other
    let parabola = PI.powi(3) / 8.0 * yh * (1.0 - yh);
    let mut series = 0.0;
    let mut sign = 1.0;
    let mut n = 1u32;
    while n <= n_max {
        let k = n as f64 * PI;
        // cosh(k z / l) / cosh(k / 2), overflow-safe
        let zh = 2.0 * z / l;
        let half_k = 0.5 * k;
        let ratio = ((half_k * (zh - 1.0)).exp() + (-half_k * (zh + 1.0)).exp())
            / (1.0 + (-2.0 * half_k).exp());
        series += sign * ratio * (k * y / l).cos() / (n as f64).powi(3);
        sign = -sign;
        n += 2;
    }
    4.0 * l * l * f_x / (PI.powi(3) * rho * nu) * (parabola - series)
}

/// Dimensionless center velocity coefficient `u(0,0) rho nu / (F l^2)` of
/// the square duct.
pub fn duct_center_coefficient(n_max: u32) -> f64 {
    duct_velocity(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, n_max)
}

/// Velocity of pulsatile flow through a square duct of half-width `a`
/// driven by `F_x = f_m cos(omega t)`, evaluated at `(y, z)` centered on
/// the axis (walls at +-a).
///
/// Complex series solution: `u = Re[(f_m / (i omega)) (1 - v) e^{i omega t}]`
/// where `v` sums `2 (-1)^n / p_n * [cosh(g_n y/a) cos(p_n z/a) +
/// cosh(g_n z/a) cos(p_n y/a)] / cosh(g_n)` with `p_n = (2n+1) pi / 2` and
/// `g_n = sqrt(p_n^2 + i Wo^2)`, `Wo = a sqrt(omega / nu)`.
pub fn womersley_velocity(
    y: f64,
    z: f64,
    t: f64,
    a: f64,
    f_m: f64,
    omega: f64,
    nu: f64,
    n_max: u32,
) -> f64 {
    // no-slip walls exactly; the truncated series only converges as
    // 1/n_max at the walls themselves
    if y.abs() >= a || z.abs() >= a {
        return 0.0;
    }
    let wo2 = a * a * omega / nu;
    let yh = y / a;
    let zh = z / a;
    // cosh(g x)/cosh(g) without overflow for Re(g) >= 0, |x| <= 1
    let cosh_ratio = |g: Complex64, x: f64| -> Complex64 {
        ((g * (x - 1.0)).exp() + (-g * (x + 1.0)).exp()) / (1.0 + (-2.0 * g).exp())
    };
    let mut v = Complex64::new(0.0, 0.0);
    let mut sign = 1.0;
    for n in 0..n_max {
        let p = (2 * n + 1) as f64 * PI / 2.0;
        let g = Complex64::new(p * p, wo2).sqrt();
        let term = cosh_ratio(g, yh) * (p * zh).cos() + cosh_ratio(g, zh) * (p * yh).cos();
        v += sign / p * term;
        sign = -sign;
    }
    v *= 2.0;
    let amplitude = Complex64::new(0.0, -f_m / omega) * (Complex64::new(1.0, 0.0) - v);
    (amplitude * Complex64::new(0.0, omega * t).exp()).re
}

/// Relative L2 norm of the difference between computed and reference
/// samples: `sqrt(sum (c - r)^2) / sqrt(sum r^2)`.
pub fn relative_l2_error(computed: &[f64], reference: &[f64]) -> Result<f64> {
    if computed.len() != reference.len() {
        return Err(Error::InvalidParameter(format!(
            "sample counts differ: {} vs {}",
            computed.len(),
            reference.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (c, r) in computed.iter().zip(reference) {
        num += (c - r) * (c - r);
        den += r * r;
    }
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((num / den).sqrt())
}

/// Where a reference profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    ExternalDataset,
}

/// A sampled reference curve: monotone coordinates with values.
#[derive(Debug, Clone)]
pub struct ReferenceProfile {
    pub coord: Vec<f64>,
    pub value: Vec<f64>,
    pub provenance: Provenance,
}

impl ReferenceProfile {
    /// Linear interpolation at `x`; clamps to the end values outside the
    /// sampled range.
    pub fn interpolate(&self, x: f64) -> f64 {
        let c = &self.coord;
        if x <= c[0] {
            return self.value[0];
        }
        if x >= c[c.len() - 1] {
            return self.value[c.len() - 1];
        }
        let i = c.partition_point(|&ci| ci <= x) - 1;
        let t = (x - c[i]) / (c[i + 1] - c[i]);
        self.value[i] * (1.0 - t) + self.value[i + 1] * t
    }
}

/// Parses `coordinate value` lines with `#` comments into a profile.
pub fn parse_reference_profile(
    text: &str,
    path: &str,
    provenance: Provenance,
) -> Result<ReferenceProfile> {
    let mut coord = Vec::new();
    let mut value = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut it = body.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.ok_or_else(|| Error::Parse {
                path: path.into(),
                line: lineno + 1,
                message: "expected `coordinate value`".into(),
            })?
            .parse()
            .map_err(|e| Error::Parse {
                path: path.into(),
                line: lineno + 1,
                message: format!("{e}"),
            })
        };
        coord.push(parse(it.next())?);
        value.push(parse(it.next())?);
    }
    if coord.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse {
            path: path.into(),
            line: 0,
            message: "profile coordinates must increase strictly".into(),
        });
    }
    if coord.is_empty() {
        return Err(Error::Parse {
            path: path.into(),
            line: 0,
            message: "empty profile".into(),
        });
    }
    Ok(ReferenceProfile {
        coord,
        value,
        provenance,
    })
}

/// Loads a reference profile from a tabular text file.
pub fn load_reference_profile(path: &std::path::Path) -> Result<ReferenceProfile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_reference_profile(&text, &path.display().to_string(), Provenance::ExternalDataset)
}

/// Checked-in reference centerline `u/U(y/H)` for the Re=100 cubic cavity.
pub fn cavity_reference_u() -> ReferenceProfile {
    parse_reference_profile(
        include_str!("../data/cavity_re100_u.txt"),
        "data/cavity_re100_u.txt",
        Provenance::ExternalDataset,
    )
    .expect("embedded cavity reference is well-formed")
}

/// Checked-in reference centerline `v/U(x/H)` for the Re=100 cubic cavity.
pub fn cavity_reference_v() -> ReferenceProfile {
    parse_reference_profile(
        include_str!("../data/cavity_re100_v.txt"),
        "data/cavity_re100_v.txt",
        Provenance::ExternalDataset,
    )
    .expect("embedded cavity reference is well-formed")
}

// ---------------------------------------------------------------------
// profile extraction helpers
// ---------------------------------------------------------------------

/// Computed `u_x` over the duct cross-section at mid-x, with centered
/// physical coordinates, flattened in (y, z) node order.
pub fn duct_cross_section(state: &SimulationState) -> (Vec<(f64, f64)>, Vec<f64>) {
    let (nx, ny, nz) = state.field.dims();
    let (r, s) = (state.spec.r, state.spec.s);
    let ly = ny as f64 * r;
    let lz = nz as f64 * s;
    let x = nx / 2;
    let mut coords = Vec::with_capacity(ny * nz);
    let mut values = Vec::with_capacity(ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            let idx = state.field.idx(x, j, k);
            coords.push((
                (j as f64 + 0.5) * r - 0.5 * ly,
                (k as f64 + 0.5) * s - 0.5 * lz,
            ));
            values.push(state.hydro.ux[idx]);
        }
    }
    (coords, values)
}

/// Relative L2 error of the computed duct cross-section against the
/// analytic series.
pub fn duct_l2_error(
    state: &SimulationState,
    l: f64,
    f_x: f64,
    nu: f64,
    n_max: u32,
) -> Result<f64> {
    let (coords, computed) = duct_cross_section(state);
    let reference: Vec<f64> = coords
        .iter()
        .map(|&(y, z)| duct_velocity(y, z, l, f_x, 1.0, nu, n_max))
        .collect();
    relative_l2_error(&computed, &reference)
}

/// Relative L2 error of the computed cross-section against the Womersley
/// series at time `t`.
pub fn womersley_l2_error(
    state: &SimulationState,
    a: f64,
    f_m: f64,
    omega: f64,
    nu: f64,
    t: f64,
    n_max: u32,
) -> Result<f64> {
    let (coords, computed) = duct_cross_section(state);
    let reference: Vec<f64> = coords
        .iter()
        .map(|&(y, z)| womersley_velocity(y, z, t, a, f_m, omega, nu, n_max))
        .collect();
    relative_l2_error(&computed, &reference)
}

/// Centerline `u_x / U` along y at the (x, z) midplane intersection,
/// averaged over the two middle columns of even-sized axes. Returns
/// `(y/H, u/U)` pairs, wall points included.
pub fn cavity_u_centerline(state: &SimulationState, u_lid: f64) -> Vec<(f64, f64)> {
    let (nx, ny, nz) = state.field.dims();
    let r = state.spec.r;
    let h = ny as f64 * r;
    let xs = mid_indices(nx);
    let zs = mid_indices(nz);
    let mut out = Vec::with_capacity(ny + 2);
    out.push((0.0, 0.0));
    for j in 0..ny {
        let mut acc = 0.0;
        for &x in &xs {
            for &z in &zs {
                acc += state.hydro.ux[state.field.idx(x, j, z)];
            }
        }
        let u = acc / (xs.len() * zs.len()) as f64;
        out.push(((j as f64 + 0.5) * r / h, u / u_lid));
    }
    out.push((1.0, 1.0));
    out
}

/// Centerline `u_y / U` along x at the (y, z) midplane intersection.
/// Returns `(x/L, v/U)` pairs, wall points included.
pub fn cavity_v_centerline(state: &SimulationState, u_lid: f64) -> Vec<(f64, f64)> {
    let (nx, ny, nz) = state.field.dims();
    let l = nx as f64;
    let ys = mid_indices(ny);
    let zs = mid_indices(nz);
    let mut out = Vec::with_capacity(nx + 2);
    out.push((0.0, 0.0));
    for i in 0..nx {
        let mut acc = 0.0;
        for &y in &ys {
            for &z in &zs {
                acc += state.hydro.uy[state.field.idx(i, y, z)];
            }
        }
        let v = acc / (ys.len() * zs.len()) as f64;
        out.push(((i as f64 + 0.5) / l, v / u_lid));
    }
    out.push((1.0, 0.0));
    out
}

fn mid_indices(n: usize) -> Vec<usize> {
    if n % 2 == 0 {
        vec![n / 2 - 1, n / 2]
    } else {
        vec![n / 2]
    }
}

// ---------------------------------------------------------------------
// benchmark presets
// ---------------------------------------------------------------------

/// One square-duct benchmark row: grid, aspect ratios and driving force
/// at Re = 50, L = 30.
#[derive(Debug, Clone)]
pub struct DuctCase {
    pub name: &'static str,
    pub config: SimulationConfig,
    pub l: f64,
    pub f_x: f64,
    pub nu: f64,
}

/// The four duct-flow parameter rows. The side length is 30 and Re = 50;
/// the force of the `r0.5_s1.0` row is recomputed from Re, nu and the
/// center-velocity coefficient (its printed value is inconsistent with
/// the other rows by three orders of magnitude).
pub fn duct_cases() -> Vec<DuctCase> {
    let l = 30.0;
    let rows: [(&'static str, usize, usize, f64, f64, Option<f64>); 4] = [
        ("duct_r1.0_s0.5", 30, 60, 0.10, 0.6, Some(3.82e-6)),
        ("duct_r1.0_s0.33", 30, 90, 0.04, 0.8, Some(5.50e-6)),
        ("duct_r0.5_s1.0", 60, 30, 0.04, 1.0, None),
        ("duct_r0.5_s0.33", 60, 90, 0.04, 1.0, Some(5.09e-6)),
    ];
    rows.iter()
        .map(|&(name, ny, nz, cs2, tau, f_x)| {
            let r = l / ny as f64;
            let s = l / nz as f64;
            let nu = cs2 * (tau - 0.5);
            let f_x = f_x.unwrap_or_else(|| {
                // F = Re nu^2 / (C L^3) so that u(0,0) = Re nu / L
                let c = duct_center_coefficient(199);
                50.0 * nu * nu / (c * l.powi(3))
            });
            let mut config = SimulationConfig::new(r, s, 3, ny, nz);
            config.cs2 = Some(cs2);
            config.shear = RateSpec::Omega(1.0 / tau);
            config.boundary = BoundarySpec::duct();
            config.forcing = Forcing::Constant([f_x, 0.0, 0.0]);
            config.max_steps = 400_000;
            config.convergence_tol = Some(1e-9);
            DuctCase {
                name,
                config,
                l,
                f_x,
                nu,
            }
        })
        .collect()
}

/// Pulsatile duct benchmark: side `2a = 40`, `F_m = 1e-5`, `T = 10000`,
/// grid 40x80x40 with `(r, s) = (0.5, 1.0)`.
#[derive(Debug, Clone)]
pub struct PulsatileCase {
    pub config: SimulationConfig,
    pub a: f64,
    pub f_m: f64,
    pub period: f64,
    pub omega: f64,
    pub nu: f64,
    pub wo: f64,
}

pub fn pulsatile_case(wo: f64) -> PulsatileCase {
    let a = 20.0;
    let f_m = 1e-5;
    let period = 10_000.0;
    let omega = 2.0 * PI / period;
    let nu = a * a * omega / (wo * wo);
    let mut config = SimulationConfig::new(0.5, 1.0, 40, 80, 40);
    config.shear = RateSpec::Transport(nu);
    config.boundary = BoundarySpec::duct();
    config.forcing = Forcing::Periodic {
        amplitude: [f_m, 0.0, 0.0],
        period,
    };
    config.max_steps = 4 * period as u64;
    config.convergence_tol = None;
    PulsatileCase {
        config,
        a,
        f_m,
        period,
        omega,
        nu,
        wo,
    }
}

/// Reduced-scale Re=100 lid-driven cubic cavity on a 40x80x40 cuboid grid
/// with `(r, s) = (0.5, 1.0)`.
#[derive(Debug, Clone)]
pub struct CavityCase {
    pub config: SimulationConfig,
    pub u_lid: f64,
    pub h: f64,
    pub nu: f64,
}

pub fn cavity_case() -> CavityCase {
    let u_lid = 0.1;
    let h = 40.0;
    let nu = u_lid * h / 100.0;
    let mut config = SimulationConfig::new(0.5, 1.0, 40, 80, 40);
    config.cs2 = Some(0.14);
    config.shear = RateSpec::Transport(nu);
    config.boundary = BoundarySpec::lid_driven_cavity(u_lid);
    config.max_steps = 200_000;
    config.convergence_tol = Some(1e-7);
    CavityCase {
        config,
        u_lid,
        h,
        nu,
    }
}

/// Shallow-cavity pair: the same L/H = 4, W/H = 2, Re = 100 flow resolved
/// once on a cuboid grid and once on the cubic grid it replaces.
#[derive(Debug, Clone)]
pub struct ShallowCavityCase {
    pub name: &'static str,
    pub config: SimulationConfig,
    pub u_lid: f64,
    pub span: f64,
    pub height: f64,
}

pub fn shallow_cavity_cases() -> (ShallowCavityCase, ShallowCavityCase) {
    // cuboid: (r, s) = (0.406, 1.3), N_y = 32 -> 52 x 32 x 20
    let (r, s) = (0.406, 1.3);
    let u = 0.04;
    let (nx, ny, nz) = (52usize, 32usize, 20usize);
    let span = nx as f64;
    let mut config = SimulationConfig::new(r, s, nx, ny, nz);
    config.cs2 = Some(0.04);
    config.shear = RateSpec::Transport(u * span / 100.0);
    config.boundary = BoundarySpec::lid_driven_cavity(u);
    config.max_steps = 100_000;
    config.convergence_tol = Some(1e-8);
    let cuboid = ShallowCavityCase {
        name: "shallow_cuboid",
        config,
        u_lid: u,
        span,
        height: ny as f64 * r,
    };

    // cubic reference: 128 x 32 x 64 at r = s = 1
    let u = 0.1;
    let (nx, ny, nz) = (128usize, 32usize, 64usize);
    let span = nx as f64;
    let mut config = SimulationConfig::new(1.0, 1.0, nx, ny, nz);
    config.shear = RateSpec::Transport(u * span / 100.0);
    config.boundary = BoundarySpec::lid_driven_cavity(u);
    config.max_steps = 100_000;
    config.convergence_tol = Some(1e-8);
    let cubic = ShallowCavityCase {
        name: "shallow_cubic",
        config,
        u_lid: u,
        span,
        height: ny as f64,
    };
    (cuboid, cubic)
}

/// Base configuration of the lid-speed stability sweep: 30x60x30 cavity,
/// `(r, s) = (0.5, 1.0)`, `cs2 = 0.08`, every rate but the shear one at
/// unity.
pub fn stability_base() -> SimulationConfig {
    let mut config = SimulationConfig::new(0.5, 1.0, 30, 60, 30);
    config.cs2 = Some(0.08);
    config.shear = RateSpec::Omega(1.25);
    config.bulk = Some(RateSpec::Omega(1.0));
    config.boundary = BoundarySpec::lid_driven_cavity(0.1);
    config.convergence_tol = Some(1e-9);
    config
}

// ---------------------------------------------------------------------
// stability sweep
// ---------------------------------------------------------------------

/// Which quantity the bisection drives toward the stability edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Bisect the lid speed; sweep points are `omega_nu` values.
    LidSpeed,
    /// Bisect `omega_nu`; sweep points are lid speeds.
    Omega,
    /// Bisect the Reynolds number at fixed lid speed (sweep points),
    /// adjusting the viscosity.
    Reynolds,
}

/// Protocol of a stability sweep.
#[derive(Debug, Clone)]
pub struct SweepProtocol {
    pub axis: SweepAxis,
    /// Parameter points at which the bisection runs (meaning depends on
    /// the axis).
    pub points: Vec<f64>,
    /// `(known_stable, known_unstable)` initial bracket of the bisected
    /// value.
    pub bracket: (f64, f64),
    /// Step budget of each probe (desk scale: 20 000).
    pub budget_steps: u64,
    pub bisection_iters: u32,
}

/// One sweep result: the largest probed-stable value of the bisected
/// quantity at this parameter point.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub point: f64,
    pub variant: CollisionVariant,
    pub max_stable: f64,
    /// Count of probe pairs violating verdict monotonicity (a stable
    /// probe above an unstable one). Logged, never hidden.
    pub anomalies: usize,
}

fn apply_axis(config: &mut SimulationConfig, axis: SweepAxis, point: f64, value: f64) {
    match axis {
        SweepAxis::LidSpeed => {
            config.shear = RateSpec::Omega(point);
            config.boundary = BoundarySpec::lid_driven_cavity(value);
        }
        SweepAxis::Omega => {
            config.shear = RateSpec::Omega(value);
            config.boundary = BoundarySpec::lid_driven_cavity(point);
        }
        SweepAxis::Reynolds => {
            let h = config.ny as f64 * config.r;
            config.shear = RateSpec::Transport(point * h / value);
            config.boundary = BoundarySpec::lid_driven_cavity(point);
        }
    }
}

/// Runs one probe; stable means the budget (or steady convergence)
/// was reached without a blow-up verdict.
pub fn probe_stability(config: &SimulationConfig) -> Result<bool> {
    let report = solver::run(config)?;
    Ok(!matches!(report.outcome, RunOutcome::BlowUp { .. }))
}

/// Bisects the stability edge for each parameter point and variant.
pub fn stability_sweep(
    base: &SimulationConfig,
    protocol: &SweepProtocol,
    variants: &[CollisionVariant],
) -> Result<Vec<SweepEntry>> {
    let mut table = Vec::new();
    for &variant in variants {
        for &point in &protocol.points {
            let probe = |value: f64| -> Result<bool> {
                let mut config = base.clone();
                config.variant = variant;
                config.max_steps = protocol.budget_steps;
                apply_axis(&mut config, protocol.axis, point, value);
                probe_stability(&config)
            };
            let (lo0, hi0) = protocol.bracket;
            let lo_stable = probe(lo0)?;
            let hi_stable = probe(hi0)?;
            if !lo_stable || hi_stable {
                return Err(Error::BracketNotFound(format!(
                    "point {point} ({variant:?}): bracket ({lo0}, {hi0}) is {} / {}",
                    if lo_stable { "stable" } else { "unstable" },
                    if hi_stable { "stable" } else { "unstable" },
                )));
            }
            let mut verdicts = vec![(lo0, true), (hi0, false)];
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..protocol.bisection_iters {
                let mid = 0.5 * (lo + hi);
                let stable = probe(mid)?;
                verdicts.push((mid, stable));
                if stable {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut anomalies = 0;
            for &(v1, s1) in &verdicts {
                for &(v2, s2) in &verdicts {
                    if s1 && !s2 && v1 > v2 {
                        anomalies += 1;
                    }
                }
            }
            table.push(SweepEntry {
                point,
                variant,
                max_stable: lo,
                anomalies,
            });
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duct_profile_vanishes_on_walls_and_is_symmetric() {
        let l = 2.0;
        let (f, nu) = (1e-5, 0.05);
        for z in [-0.9, -0.3, 0.0, 0.7] {
            let u = duct_velocity(l / 2.0, z, l, f, 1.0, nu, 199);
            assert!(u.abs() < 1e-14, "wall value {u:e}");
            let u = duct_velocity(-l / 2.0, z, l, f, 1.0, nu, 199);
            assert!(u.abs() < 1e-14);
        }
        let center = duct_velocity(0.0, 0.0, l, f, 1.0, nu, 199);
        for &(y, z) in &[(0.3, 0.5), (-0.2, 0.8), (0.11, -0.37)] {
            let a = duct_velocity(y, z, l, f, 1.0, nu, 199);
            let b = duct_velocity(z, y, l, f, 1.0, nu, 199);
            assert!((a - b).abs() <= 1e-4 * center.abs(), "asymmetry {:e}", a - b);
        }
    }

    #[test]
    fn duct_series_truncation_is_converged() {
        for &(y, z) in &[(0.0, 0.0), (3.2, -1.1), (-7.0, 7.0), (14.75, 0.0)] {
            let base = duct_velocity(y, z, 30.0, 1e-5, 1.0, 0.01, 199);
            let fine = duct_velocity(y, z, 30.0, 1e-5, 1.0, 0.01, 398);
            assert!(
                (base - fine).abs() <= 1e-10 * fine.abs().max(1e-300),
                "({y},{z}): {:e}",
                base - fine
            );
        }
    }

    #[test]
    fn duct_center_coefficient_value() {
        // classical square-duct value, cross-checked by the Poisson oracle
        // in the integration suite
        let c = duct_center_coefficient(199);
        assert!((c - 0.0736713).abs() < 1e-6, "{c}");
    }

    #[test]
    fn womersley_no_slip_and_symmetry() {
        let (a, f_m, omega, nu) = (20.0, 1e-5, 2.0 * PI / 1e4, 0.0263);
        for t in [0.0, 2500.0, 7100.0] {
            for q in [-0.99, -0.2, 0.5, 0.99] {
                assert!(womersley_velocity(a, q * a, t, a, f_m, omega, nu, 400).abs() < 1e-12);
                assert!(womersley_velocity(q * a, -a, t, a, f_m, omega, nu, 400).abs() < 1e-12);
            }
            let u1 = womersley_velocity(5.0, -3.0, t, a, f_m, omega, nu, 400);
            let u2 = womersley_velocity(-3.0, 5.0, t, a, f_m, omega, nu, 400);
            assert!((u1 - u2).abs() < 1e-12);
        }
    }

    #[test]
    fn womersley_truncation_is_converged() {
        let (a, f_m, omega, nu) = (20.0, 1e-5, 2.0 * PI / 1e4, 0.0263);
        // includes a wall-adjacent point, the slowest-converging case
        for &(y, z) in &[(0.0, 0.0), (10.0, 5.0), (19.75, 0.25)] {
            let base = womersley_velocity(y, z, 1250.0, a, f_m, omega, nu, 2000);
            let fine = womersley_velocity(y, z, 1250.0, a, f_m, omega, nu, 4000);
            assert!((base - fine).abs() <= 1e-10 * fine.abs().max(1e-300));
        }
    }

    #[test]
    fn womersley_low_frequency_limit_is_quasi_steady() {
        // at Wo = 0.3 the t = 0 profile matches the steady duct profile
        // driven by the peak force to within 1%
        let a = 20.0;
        let nu = 0.05;
        let wo: f64 = 0.3;
        let omega = wo * wo * nu / (a * a);
        let f_m = 1e-5;
        for &(y, z) in &[(0.0, 0.0), (8.0, -4.0), (-12.0, 12.0)] {
            let pulsatile = womersley_velocity(y, z, 0.0, a, f_m, omega, nu, 2000);
            let steady = duct_velocity(y, z, 2.0 * a, f_m, 1.0, nu, 199);
            assert!(
                (pulsatile - steady).abs() <= 0.01 * steady.abs().max(1e-12),
                "({y},{z}): {pulsatile:e} vs {steady:e}"
            );
        }
    }

    #[test]
    fn l2_error_basics() {
        let r = [1.0, 2.0, -3.0];
        assert_eq!(relative_l2_error(&r, &r).unwrap(), 0.0);
        let c = [1.01, 2.02, -3.03];
        assert!((relative_l2_error(&c, &r).unwrap() - 0.01).abs() < 1e-12);
        assert!(relative_l2_error(&[0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(relative_l2_error(&[1.0], &[1.0, 2.0]).is_err());

        // scale covariance
        let c = [1.4, -0.3, 0.9];
        let e1 = relative_l2_error(&c, &r).unwrap();
        let scaled_c: Vec<f64> = c.iter().map(|v| v * -7.5).collect();
        let scaled_r: Vec<f64> = r.iter().map(|v| v * -7.5).collect();
        let e2 = relative_l2_error(&scaled_c, &scaled_r).unwrap();
        assert!((e1 - e2).abs() < 1e-14);
    }

    #[test]
    fn profile_parsing_and_interpolation() {
        let text = "# comment\n0.0 0.0\n0.5 1.0 # inline\n\n1.0 0.5\n";
        let p = parse_reference_profile(text, "test", Provenance::ExternalDataset).unwrap();
        assert_eq!(p.coord.len(), 3);
        assert!((p.interpolate(0.25) - 0.5).abs() < 1e-15);
        assert_eq!(p.interpolate(-1.0), 0.0);
        assert_eq!(p.interpolate(2.0), 0.5);

        assert!(parse_reference_profile("0.5 1\n0.5 2\n", "t", Provenance::Analytic).is_err());
        assert!(parse_reference_profile("0.5\n", "t", Provenance::Analytic).is_err());
        assert!(parse_reference_profile("# only comments\n", "t", Provenance::Analytic).is_err());
    }

    #[test]
    fn duct_case_force_recomputation() {
        let cases = duct_cases();
        let row3 = &cases[2];
        // u(0,0) = Re nu / L must hold with the recomputed force
        let u_center = duct_velocity(0.0, 0.0, row3.l, row3.f_x, 1.0, row3.nu, 199);
        let re = u_center * row3.l / row3.nu;
        assert!((re - 50.0).abs() < 0.01, "Re = {re}");
        // rows keep the printed parameters
        assert_eq!(cases[0].config.cs2, Some(0.10));
        assert!((cases[1].nu - 0.012).abs() < 1e-15);
    }
}
