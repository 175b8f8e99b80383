//! Named benchmark presets: duct, pulsatile, cavity, shallow-cavity and
//! the stability sweep. Each writes plot-ready artifacts, an error
//! summary and a run manifest; the returned flag is false when an
//! acceptance tolerance was exceeded.

use crate::config::apply_overrides;
use crate::manifest::RunManifest;
use crate::output::{write_atomic, write_profile, write_vtk};
use cuboid_lbm::solver::{self, RunOutcome, SimulationConfig};
use cuboid_lbm::validation::{
    self, cavity_u_centerline, cavity_v_centerline, duct_cross_section, duct_l2_error,
    womersley_l2_error, stability_sweep, SweepAxis, SweepProtocol,
};
use cuboid_lbm::{CollisionVariant, Error};
use std::path::Path;
use std::time::Instant;

type Result<T> = std::result::Result<T, Error>;

pub struct BenchmarkOptions {
    pub sets: Vec<String>,
    pub womersley: f64,
    pub budget: u64,
    pub omega_points: Vec<f64>,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions {
            sets: Vec::new(),
            womersley: 3.09,
            budget: 20_000,
            omega_points: vec![1.25, 1.0 / 0.6],
        }
    }
}

pub fn run_benchmark(name: &str, out: &Path, opts: &BenchmarkOptions) -> Result<bool> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out.display().to_string(), e))?;
    match name {
        "duct" => duct(out, opts),
        "pulsatile" => pulsatile(out, opts),
        "cavity" => cavity(out, opts),
        "shallow-cavity" => shallow_cavity(out, opts),
        "stability" => stability(out, opts),
        other => Err(Error::Configuration(format!(
            "unknown benchmark `{other}` (expected duct, pulsatile, cavity, shallow-cavity or stability)"
        ))),
    }
}

fn patched(config: &SimulationConfig, opts: &BenchmarkOptions) -> Result<SimulationConfig> {
    if opts.sets.is_empty() {
        Ok(config.clone())
    } else {
        apply_overrides(config, &opts.sets)
    }
}

fn duct(out: &Path, opts: &BenchmarkOptions) -> Result<bool> {
    let tol = 0.02;
    let mut summary = String::from("# case  rel_l2  tolerance  verdict\n");
    let mut pass = true;
    for case in validation::duct_cases() {
        let config = patched(&case.config, opts)?;
        let t0 = Instant::now();
        let report = solver::run(&config)?;
        let manifest = RunManifest::new(&config, &report, t0.elapsed());
        let state = &report.state;

        let l2 = duct_l2_error(state, case.l, case.f_x, case.nu, 199)?;
        let ok = l2 <= tol && !report.blew_up();
        pass &= ok;
        summary.push_str(&format!(
            "{} {l2:.6} {tol} {}\n",
            case.name,
            if ok { "pass" } else { "FAIL" }
        ));

        // full cross-section slice: y z u per line, z-major then y
        let (coords, values) = duct_cross_section(state);
        let mut slice = String::from("# y z u_x\n");
        for ((y, z), u) in coords.iter().zip(&values) {
            slice.push_str(&format!("{y:.9e} {z:.9e} {u:.9e}\n"));
        }
        write_atomic(&out.join(format!("{}_slice.txt", case.name)), slice.as_bytes())?;

        // midline profile u(y) at the z-column nearest the center
        let (nx, ny, nz) = state.field.dims();
        let k = nz / 2;
        let mut midline = Vec::with_capacity(ny);
        for j in 0..ny {
            let idx = state.field.idx(nx / 2, j, k);
            let y = (j as f64 + 0.5) * state.spec.r - 0.5 * case.l;
            midline.push((y, state.hydro.ux[idx]));
        }
        write_profile(
            &out.join(format!("{}_midline.txt", case.name)),
            &format!("duct midline u_x(y) at z nearest 0; rel L2 of slice = {l2:.6}"),
            &midline,
        )?;
        write_atomic(
            &out.join(format!("{}_manifest.txt", case.name)),
            manifest.render(state.n_nodes()).as_bytes(),
        )?;
        write_vtk(&out.join(format!("{}.vtk", case.name)), state, case.name)?;
    }
    write_atomic(&out.join("duct_summary.txt"), summary.as_bytes())?;
    println!("{summary}");
    Ok(pass)
}

fn pulsatile(out: &Path, opts: &BenchmarkOptions) -> Result<bool> {
    let tol = 0.03;
    let case = validation::pulsatile_case(opts.womersley);
    let config = patched(&case.config, opts)?;
    let period = case.period as u64;
    let last_period_start = config.max_steps - period;

    let t0 = Instant::now();
    let mut state = solver::initialize(&config)?;
    let mut errors: Vec<(u64, f64)> = Vec::new();
    let mut pass = true;
    while state.step < config.max_steps {
        solver::step(&mut state, &config)?;
        let in_last = state.step > last_period_start;
        let phase = state.step - last_period_start;
        if in_last && phase % (period / 8) == 0 {
            // profile along y at the z-column nearest the axis
            let (nx, ny, nz) = state.field.dims();
            let k = nz / 2;
            let mut profile = Vec::with_capacity(ny);
            for j in 0..ny {
                let idx = state.field.idx(nx / 2, j, k);
                let y = (j as f64 + 0.5) * state.spec.r - case.a;
                profile.push((y, state.hydro.ux[idx]));
            }
            write_profile(
                &out.join(format!("pulsatile_wo{:.2}_t{}T8.txt", case.wo, phase / (period / 8))),
                &format!(
                    "pulsatile duct profile at t = {}/8 T, Wo = {}",
                    phase / (period / 8),
                    case.wo
                ),
                &profile,
            )?;
        }
        if in_last && phase % (period / 4) == 0 {
            let l2 = womersley_l2_error(
                &state,
                case.a,
                case.f_m,
                case.omega,
                case.nu,
                state.step as f64,
                2000,
            )?;
            pass &= l2 <= tol;
            errors.push((state.step, l2));
        }
    }
    let report = solver::RunReport {
        outcome: RunOutcome::MaxStepsReached,
        state,
    };
    let manifest = RunManifest::new(&config, &report, t0.elapsed());
    write_atomic(
        &out.join("pulsatile_manifest.txt"),
        manifest.render(report.state.n_nodes()).as_bytes(),
    )?;
    let mut summary = format!("# Wo = {}; quarter-period rel L2 vs series (tol {tol})\n", case.wo);
    for (step, l2) in &errors {
        summary.push_str(&format!("t={step} {l2:.6} {}\n", if *l2 <= tol { "pass" } else { "FAIL" }));
    }
    write_atomic(&out.join("pulsatile_summary.txt"), summary.as_bytes())?;
    println!("{summary}");
    Ok(pass)
}

fn cavity(out: &Path, opts: &BenchmarkOptions) -> Result<bool> {
    let band = 0.03;
    let case = validation::cavity_case();
    let config = patched(&case.config, opts)?;
    let t0 = Instant::now();
    let report = solver::run(&config)?;
    let manifest = RunManifest::new(&config, &report, t0.elapsed());
    let state = &report.state;

    let u_profile = cavity_u_centerline(state, case.u_lid);
    let v_profile = cavity_v_centerline(state, case.u_lid);
    write_profile(
        &out.join("cavity_u_centerline.txt"),
        "u/U along y/H at the vertical centerline",
        &u_profile,
    )?;
    write_profile(
        &out.join("cavity_v_centerline.txt"),
        "v/U along x/H at the horizontal centerline",
        &v_profile,
    )?;
    write_vtk(&out.join("cavity.vtk"), state, "cavity")?;
    write_atomic(
        &out.join("cavity_manifest.txt"),
        manifest.render(state.n_nodes()).as_bytes(),
    )?;

    let reference_u = validation::cavity_reference_u();
    let reference_v = validation::cavity_reference_v();
    let dev_u = u_profile
        .iter()
        .map(|&(y, u)| (u - reference_u.interpolate(y)).abs())
        .fold(0.0f64, f64::max);
    let dev_v = v_profile
        .iter()
        .map(|&(x, v)| (v - reference_v.interpolate(x)).abs())
        .fold(0.0f64, f64::max);
    let pass = dev_u <= band && dev_v <= band && !report.blew_up();
    let summary = format!(
        "# max |computed - reference| / U (band {band})\nu_centerline {dev_u:.5} {}\nv_centerline {dev_v:.5} {}\n",
        if dev_u <= band { "pass" } else { "FAIL" },
        if dev_v <= band { "pass" } else { "FAIL" },
    );
    write_atomic(&out.join("cavity_summary.txt"), summary.as_bytes())?;
    println!("{summary}");
    Ok(pass)
}

fn shallow_cavity(out: &Path, opts: &BenchmarkOptions) -> Result<bool> {
    let band = 0.02;
    let (cuboid, cubic) = validation::shallow_cavity_cases();
    let mut manifests = Vec::new();
    let mut profiles = Vec::new();
    for case in [&cuboid, &cubic] {
        let config = patched(&case.config, opts)?;
        let t0 = Instant::now();
        let report = solver::run(&config)?;
        let manifest = RunManifest::new(&config, &report, t0.elapsed());
        let state = &report.state;
        let u_profile = cavity_u_centerline(state, case.u_lid);
        let v_profile = cavity_v_centerline(state, case.u_lid);
        write_profile(
            &out.join(format!("{}_u_centerline.txt", case.name)),
            &format!("u/U along y/H; {}", case.name),
            &u_profile,
        )?;
        write_profile(
            &out.join(format!("{}_v_centerline.txt", case.name)),
            &format!("v/U along x/L; {}", case.name),
            &v_profile,
        )?;
        write_atomic(
            &out.join(format!("{}_manifest.txt", case.name)),
            manifest.render(state.n_nodes()).as_bytes(),
        )?;
        manifests.push(manifest);
        profiles.push((u_profile, v_profile));
    }

    let dev = |a: &[(f64, f64)], b: &[(f64, f64)]| -> f64 {
        // compare on the first curve's interior stations, interpolating
        // the second one there
        a.iter()
            .filter(|(x, _)| *x > 0.02 && *x < 0.98)
            .map(|&(x, v)| {
                let interp = interp_profile(b, x).unwrap_or(b[b.len() - 1].1);
                (v - interp).abs()
            })
            .fold(0.0, f64::max)
    };
    let dev_u = dev(&profiles[0].0, &profiles[1].0);
    let dev_v = dev(&profiles[0].1, &profiles[1].1);
    let mem_ratio =
        manifests[1].memory_estimate_bytes as f64 / manifests[0].memory_estimate_bytes as f64;
    let pass = dev_u <= band && dev_v <= band && mem_ratio >= 5.0;
    let summary = format!(
        "# cuboid (r,s)=(0.406,1.3) vs cubic; band {band}, memory ratio >= 5\n\
         u_centerline_dev {dev_u:.5} {}\nv_centerline_dev {dev_v:.5} {}\nmemory_ratio {mem_ratio:.2} {}\n",
        if dev_u <= band { "pass" } else { "FAIL" },
        if dev_v <= band { "pass" } else { "FAIL" },
        if mem_ratio >= 5.0 { "pass" } else { "FAIL" },
    );
    write_atomic(&out.join("shallow_cavity_summary.txt"), summary.as_bytes())?;
    println!("{summary}");
    Ok(pass)
}

fn interp_profile(profile: &[(f64, f64)], x: f64) -> Option<f64> {
    let i = profile.iter().position(|&(xi, _)| xi > x)?;
    if i == 0 {
        return Some(profile[0].1);
    }
    let (x0, v0) = profile[i - 1];
    let (x1, v1) = profile[i];
    Some(v0 + (v1 - v0) * (x - x0) / (x1 - x0))
}

fn stability(out: &Path, opts: &BenchmarkOptions) -> Result<bool> {
    let base = validation::stability_base();
    let protocol = SweepProtocol {
        axis: SweepAxis::LidSpeed,
        points: opts.omega_points.clone(),
        bracket: (0.05, 1.6),
        budget_steps: opts.budget,
        bisection_iters: 8,
    };
    let table = stability_sweep(
        &base,
        &protocol,
        &[CollisionVariant::Central, CollisionVariant::Raw],
    )?;

    let mut pass = true;
    let mut text = String::from("# omega_nu  variant  U_max  anomalies\n");
    for entry in &table {
        text.push_str(&format!(
            "{:.4} {:?} {:.5} {}\n",
            entry.point, entry.variant, entry.max_stable, entry.anomalies
        ));
    }
    for &point in &protocol.points {
        let central = table
            .iter()
            .find(|e| e.point == point && e.variant == CollisionVariant::Central)
            .unwrap();
        let raw = table
            .iter()
            .find(|e| e.point == point && e.variant == CollisionVariant::Raw)
            .unwrap();
        let ok = central.max_stable >= raw.max_stable;
        pass &= ok;
        text.push_str(&format!(
            "# ordering at omega={:.4}: central {:.5} >= raw {:.5}: {}\n",
            point,
            central.max_stable,
            raw.max_stable,
            if ok { "pass" } else { "FAIL" }
        ));
    }

    // bulk-viscosity study: lowering omega_xi must not hurt stability
    for &point in &protocol.points[..1] {
        let mut u_max = Vec::new();
        for omega_xi in [0.5, 1.4] {
            let mut config = base.clone();
            config.bulk = Some(cuboid_lbm::solver::RateSpec::Omega(omega_xi));
            let entries = stability_sweep(
                &config,
                &SweepProtocol {
                    points: vec![point],
                    ..protocol.clone()
                },
                &[CollisionVariant::Central],
            )?;
            u_max.push(entries[0].max_stable);
        }
        let ok = u_max[0] >= u_max[1];
        pass &= ok;
        text.push_str(&format!(
            "# omega_xi study at omega={point:.4}: U_max(0.5) = {:.5} >= U_max(1.4) = {:.5}: {}\n",
            u_max[0],
            u_max[1],
            if ok { "pass" } else { "FAIL" }
        ));
    }
    write_atomic(&out.join("stability_table.txt"), text.as_bytes())?;
    println!("{text}");
    Ok(pass)
}
