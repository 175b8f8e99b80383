//! Shared fixtures for the kernel benchmarks.

use cuboid_lbm::central_moments::FrameVelocity;
use cuboid_lbm::collision::{raw_equilibria, NodeState, RelaxationSchedule};
use cuboid_lbm::domain::BoundarySpec;
use cuboid_lbm::lattice::{build_lattice, raw_to_distributions, scale_raw, LatticeSpec, Q};
use cuboid_lbm::solver::{Forcing, RateSpec, SimulationConfig};

/// A representative cuboid lattice for kernel benchmarks.
pub fn bench_lattice() -> LatticeSpec {
    build_lattice(0.5, 1.0, Some(0.08)).unwrap()
}

pub fn bench_schedule() -> RelaxationSchedule {
    RelaxationSchedule::new(1.4, 0.9)
}

/// A perturbed near-equilibrium population set plus its node state.
pub fn bench_populations(spec: &LatticeSpec) -> ([f64; Q], NodeState) {
    let u = FrameVelocity::new(0.03, -0.01, 0.02);
    let m = scale_raw(&raw_equilibria(1.0, u, spec.cs2), spec, false);
    let mut f = raw_to_distributions(&m);
    for (a, v) in f.iter_mut().enumerate() {
        *v *= 1.0 + 1e-3 * (a as f64 * 0.61).sin();
    }
    let mut rho = 0.0;
    let mut mom = [0.0; 3];
    for a in 0..Q {
        rho += f[a];
        for c in 0..3 {
            mom[c] += f[a] * spec.velocities[a][c];
        }
    }
    let node = NodeState {
        rho,
        u: FrameVelocity::new(mom[0] / rho, mom[1] / rho, mom[2] / rho),
        grad_rho: [1e-6, -2e-6, 3e-6],
        force: [1e-6, 0.0, 0.0],
    };
    (f, node)
}

/// A small lid-driven cavity configuration for whole-step benchmarks.
pub fn bench_config() -> SimulationConfig {
    let mut config = SimulationConfig::new(0.5, 1.0, 32, 64, 32);
    config.cs2 = Some(0.08);
    config.shear = RateSpec::Omega(1.4);
    config.boundary = BoundarySpec::lid_driven_cavity(0.05);
    config.forcing = Forcing::None;
    config.max_steps = u64::MAX;
    config
}
