use cuboid_lbm::central_moments::{raw_to_central, FrameVelocity};
use cuboid_lbm::collision::{diagonal_velocity_gradients, NodeState};
use cuboid_lbm::domain::BoundarySpec;
use cuboid_lbm::lattice::{distributions_to_raw_cubic, scale_raw};
use cuboid_lbm::solver::{self, Forcing, RateSpec, SimulationConfig};

fn probe(ny: usize, f_x: f64) {
    let mut config = SimulationConfig::new(1.0, 0.5, 3, ny, 2 * ny);
    config.shear = RateSpec::Omega(1.25);
    config.boundary = BoundarySpec::duct();
    config.forcing = Forcing::Constant([f_x, 0.0, 0.0]);
    config.max_steps = 400_000;
    config.convergence_tol = Some(1e-12);
    let report = solver::run(&config).unwrap();
    let state = &report.state;
    let (nx, ny, nz) = state.field.dims();
    let mut worst = 0.0f64;
    for k in 2..nz - 2 {
        for j in 2..ny - 2 {
            let idx = state.field.idx(nx / 2, j, k);
            let f = state.field.gather(idx);
            let m = scale_raw(&distributions_to_raw_cubic(&f), &state.spec, true);
            let u = FrameVelocity::new(
                state.hydro.ux[idx],
                state.hydro.uy[idx],
                state.hydro.uz[idx],
            );
            let mc = raw_to_central(&m, u);
            let node = NodeState {
                rho: state.hydro.rho[idx],
                u,
                grad_rho: [
                    state.hydro.grad_rho_x[idx],
                    state.hydro.grad_rho_y[idx],
                    state.hydro.grad_rho_z[idx],
                ],
                force: state.hydro.force.at(idx),
            };
            let g = diagonal_velocity_gradients(&mc, &node, &state.sched, &state.spec).unwrap();
            worst = worst.max(g[0].abs());
        }
    }
    println!(
        "ny={ny} F={f_x:.1e}: u_max={:.3e} max|dudx|={:.3e} ratio={:.3e} outcome={:?}",
        state.max_velocity,
        worst,
        worst / state.max_velocity,
        report.outcome
    );
}

fn main() {
    for (ny, f) in [(10, 1e-6), (10, 4e-6), (20, 1e-6), (40, 1e-6)] {
        probe(ny, f);
    }
}
