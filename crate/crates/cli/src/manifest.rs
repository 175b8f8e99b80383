//! Run manifest: configuration echo, timings, memory accounting and the
//! outcome, written next to the other run artifacts.

use crate::config::render_config;
use cuboid_lbm::solver::{RunOutcome, RunReport, SimulationConfig};
use std::time::Duration;

/// Provenance and cost record of one run.
pub struct RunManifest {
    pub code_version: &'static str,
    pub outcome: String,
    pub steps: u64,
    pub wall_clock: Duration,
    pub phase_gradient: Duration,
    pub phase_collide: Duration,
    pub phase_stream_bc: Duration,
    pub phase_hydro: Duration,
    /// `nodes * 27 * 2 * 8` plus derived fields, from the configuration.
    pub memory_estimate_bytes: usize,
    /// Actually allocated field bytes.
    pub memory_allocated_bytes: usize,
    pub config_echo: String,
}

impl RunManifest {
    pub fn new(config: &SimulationConfig, report: &RunReport, wall_clock: Duration) -> Self {
        let outcome = match report.outcome {
            RunOutcome::Converged { step } => format!("converged@{step}"),
            RunOutcome::MaxStepsReached => "max_steps".to_string(),
            RunOutcome::BlowUp { step } => format!("blowup@{step}"),
        };
        let t = &report.state.timings;
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION"),
            outcome,
            steps: t.steps,
            wall_clock,
            phase_gradient: t.gradient,
            phase_collide: t.collide,
            phase_stream_bc: t.stream_bc,
            phase_hydro: t.hydro,
            memory_estimate_bytes: config.memory_estimate_bytes(),
            memory_allocated_bytes: report.state.memory_bytes(),
            config_echo: render_config(config),
        }
    }

    pub fn mlups(&self, nodes: usize) -> f64 {
        let s = self.wall_clock.as_secs_f64();
        if s > 0.0 {
            self.steps as f64 * nodes as f64 / s / 1e6
        } else {
            0.0
        }
    }

    pub fn render(&self, nodes: usize) -> String {
        let mut out = String::new();
        out.push_str(&format!("code_version = {}\n", self.code_version));
        out.push_str(&format!("outcome = {}\n", self.outcome));
        out.push_str(&format!("steps = {}\n", self.steps));
        out.push_str(&format!(
            "wall_clock_s = {:.3}\n",
            self.wall_clock.as_secs_f64()
        ));
        out.push_str(&format!(
            "phase_gradient_s = {:.3}\n",
            self.phase_gradient.as_secs_f64()
        ));
        out.push_str(&format!(
            "phase_collide_s = {:.3}\n",
            self.phase_collide.as_secs_f64()
        ));
        out.push_str(&format!(
            "phase_stream_bc_s = {:.3}\n",
            self.phase_stream_bc.as_secs_f64()
        ));
        out.push_str(&format!(
            "phase_hydro_s = {:.3}\n",
            self.phase_hydro.as_secs_f64()
        ));
        out.push_str(&format!(
            "memory_estimate_bytes = {}\n",
            self.memory_estimate_bytes
        ));
        out.push_str(&format!(
            "memory_allocated_bytes = {}\n",
            self.memory_allocated_bytes
        ));
        out.push_str(&format!("mlups = {:.3}\n", self.mlups(nodes)));
        out.push_str("\n# configuration echo\n");
        for line in self.config_echo.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cuboid_lbm::solver::{self, SimulationConfig};

    #[test]
    fn memory_estimate_matches_allocation_within_ten_percent() {
        let mut config = SimulationConfig::new(0.5, 1.0, 12, 10, 8);
        config.max_steps = 1;
        let t0 = std::time::Instant::now();
        let report = solver::run(&config).unwrap();
        let manifest = RunManifest::new(&config, &report, t0.elapsed());
        let est = manifest.memory_estimate_bytes as f64;
        let actual = manifest.memory_allocated_bytes as f64;
        assert!(
            (est - actual).abs() <= 0.10 * actual,
            "estimate {est} vs allocated {actual}"
        );
    }
}
