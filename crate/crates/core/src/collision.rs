//! Per-node collision: central-moment (3DCCM) and raw-moment (3DCRM)
//! relaxation on the cuboid lattice, with the grid-anisotropy and cubic
//! velocity corrections folded into the second-order equilibria, local
//! strain-rate recovery from non-equilibrium moments, and body-force
//! source terms.
//!
//! The trace of the second-order moments relaxes with its own rate
//! (bulk viscosity) while the two deviatoric combinations and the
//! off-diagonal components relax with the shear rate; the combine and
//! segregate steps that isolate those groups live only inside the
//! relaxation, never in the moment mappings.

use crate::central_moments::{central_to_raw, raw_to_central, FrameVelocity};
use crate::error::Error;
use crate::lattice::{
    distributions_to_raw_cubic, raw_to_distributions, scale_raw, Frame, LatticeSpec, MomentVector,
    Q,
};
use crate::lattice::{
    K000, K001, K002, K010, K011, K012, K020, K021, K022, K100, K101, K102, K110, K111, K112,
    K120, K121, K122, K200, K201, K202, K210, K211, K212, K220, K221, K222,
};
use crate::Result;

/// Relaxation rates per moment group. `omega_nu` drives the shear
/// viscosity (off-diagonal and deviatoric second order), `omega_xi` the
/// bulk viscosity (second-order trace), `omega_1` the first-order moments
/// and `omega_high` every third-, fourth- and sixth-order group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationSchedule {
    pub omega_nu: f64,
    pub omega_xi: f64,
    pub omega_1: f64,
    pub omega_high: f64,
}

impl RelaxationSchedule {
    /// Schedule with the higher-order and first-order rates at their
    /// default of unity.
    pub fn new(omega_nu: f64, omega_xi: f64) -> Self {
        RelaxationSchedule {
            omega_nu,
            omega_xi,
            omega_1: 1.0,
            omega_high: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("omega_nu", self.omega_nu),
            ("omega_xi", self.omega_xi),
            ("omega_1", self.omega_1),
            ("omega_high", self.omega_high),
        ] {
            if !(w > 0.0 && w < 2.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 2), got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Kinematic shear viscosity `nu = cs2 (1/omega_nu - 1/2) dt`.
    pub fn shear_viscosity(&self, cs2: f64, dt: f64) -> f64 {
        cs2 * (1.0 / self.omega_nu - 0.5) * dt
    }

    /// Bulk viscosity `xi = (2 cs2 / 3) (1/omega_xi - 1/2) dt`.
    pub fn bulk_viscosity(&self, cs2: f64, dt: f64) -> f64 {
        2.0 * cs2 / 3.0 * (1.0 / self.omega_xi - 0.5) * dt
    }

    /// Rate that produces shear viscosity `nu` at sound speed `cs2`.
    pub fn omega_for_viscosity(nu: f64, cs2: f64, dt: f64) -> f64 {
        1.0 / (nu / (cs2 * dt) + 0.5)
    }
}

/// Which moment frame the relaxation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionVariant {
    /// 3DCCM: relax central moments (frame shifts around collision).
    Central,
    /// 3DCRM: relax raw moments directly.
    Raw,
}

/// How the second-order equilibria corrections are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionMode {
    /// Full velocity- and density-gradient coefficients.
    Full,
    /// Low-Mach simplification: cubic velocity terms and all density
    /// gradient weights dropped.
    LowMach,
    /// No corrections (exposes the grid-anisotropy defect; used by the
    /// ablation benchmark).
    Off,
}

/// Hydrodynamic state a node carries into collision.
#[derive(Debug, Clone, Copy)]
pub struct NodeState {
    pub rho: f64,
    pub u: FrameVelocity,
    pub grad_rho: [f64; 3],
    pub force: [f64; 3],
}

impl NodeState {
    pub fn resting(rho: f64) -> Self {
        NodeState {
            rho,
            u: FrameVelocity::default(),
            grad_rho: [0.0; 3],
            force: [0.0; 3],
        }
    }
}

/// Velocity- and density-gradient weights entering the extended
/// second-order equilibria. Subscript `s` marks the shear (deviatoric)
/// coefficients built on `omega_nu`, `b` the bulk (trace) ones built on
/// `omega_xi`. All twelve vanish on the cubic lattice at `cs2 = 1/3`
/// and `u = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CorrectionCoefficients {
    pub theta_sx: f64,
    pub theta_sy: f64,
    pub theta_sz: f64,
    pub theta_bx: f64,
    pub theta_by: f64,
    pub theta_bz: f64,
    pub lambda_sx: f64,
    pub lambda_sy: f64,
    pub lambda_sz: f64,
    pub lambda_bx: f64,
    pub lambda_by: f64,
    pub lambda_bz: f64,
}

/// Central-moment equilibria of the Maxwell distribution: only the even
/// diagonal products survive, `k_200 = cs2 rho`, `k_220 = cs2^2 rho`,
/// `k_222 = cs2^3 rho`.
pub fn central_equilibria(rho: f64, cs2: f64) -> MomentVector {
    let mut k = [0.0; Q];
    k[K000] = rho;
    k[K200] = cs2 * rho;
    k[K020] = cs2 * rho;
    k[K002] = cs2 * rho;
    k[K220] = cs2 * cs2 * rho;
    k[K202] = cs2 * cs2 * rho;
    k[K022] = cs2 * cs2 * rho;
    k[K222] = cs2 * cs2 * cs2 * rho;
    MomentVector {
        k,
        frame: Frame::Central,
    }
}

/// Raw-moment equilibria: the binomial transform of [`central_equilibria`]
/// written out as velocity polynomials.
pub fn raw_equilibria(rho: f64, u: FrameVelocity, cs2: f64) -> MomentVector {
    let (ux, uy, uz) = (u.x, u.y, u.z);
    let (ux2, uy2, uz2) = (ux * ux, uy * uy, uz * uz);
    let cs4 = cs2 * cs2;
    let mut k = [0.0; Q];
    k[K000] = rho;
    k[K100] = rho * ux;
    k[K010] = rho * uy;
    k[K001] = rho * uz;
    k[K110] = rho * ux * uy;
    k[K101] = rho * ux * uz;
    k[K011] = rho * uy * uz;
    k[K200] = cs2 * rho + rho * ux2;
    k[K020] = cs2 * rho + rho * uy2;
    k[K002] = cs2 * rho + rho * uz2;
    k[K120] = cs2 * rho * ux + rho * ux * uy2;
    k[K102] = cs2 * rho * ux + rho * ux * uz2;
    k[K210] = cs2 * rho * uy + rho * ux2 * uy;
    k[K012] = cs2 * rho * uy + rho * uy * uz2;
    k[K201] = cs2 * rho * uz + rho * ux2 * uz;
    k[K021] = cs2 * rho * uz + rho * uy2 * uz;
    k[K111] = rho * ux * uy * uz;
    k[K220] = cs4 * rho + cs2 * rho * (ux2 + uy2) + rho * ux2 * uy2;
    k[K202] = cs4 * rho + cs2 * rho * (ux2 + uz2) + rho * ux2 * uz2;
    k[K022] = cs4 * rho + cs2 * rho * (uy2 + uz2) + rho * uy2 * uz2;
    k[K211] = rho * (cs2 + ux2) * uy * uz;
    k[K121] = rho * (cs2 + uy2) * ux * uz;
    k[K112] = rho * (cs2 + uz2) * ux * uy;
    k[K122] = cs4 * rho * ux + cs2 * rho * ux * (uy2 + uz2) + rho * ux * uy2 * uz2;
    k[K212] = cs4 * rho * uy + cs2 * rho * uy * (ux2 + uz2) + rho * ux2 * uy * uz2;
    k[K221] = cs4 * rho * uz + cs2 * rho * uz * (ux2 + uy2) + rho * ux2 * uy2 * uz;
    k[K222] = cs4 * cs2 * rho
        + cs4 * rho * (ux2 + uy2 + uz2)
        + cs2 * rho * (ux2 * uy2 + uy2 * uz2 + ux2 * uz2)
        + rho * ux2 * uy2 * uz2;
    MomentVector {
        k,
        frame: Frame::Raw,
    }
}

/// Central-moment source terms of a body force: the three first-order
/// components carry the force, everything of order >= 2 is exactly zero.
pub fn source_central_moments(force: [f64; 3]) -> MomentVector {
    let mut k = [0.0; Q];
    k[K100] = force[0];
    k[K010] = force[1];
    k[K001] = force[2];
    MomentVector {
        k,
        frame: Frame::Central,
    }
}

/// Evaluates the twelve correction weights for the given node state.
pub fn correction_coefficients(
    node: &NodeState,
    sched: &RelaxationSchedule,
    spec: &LatticeSpec,
    mode: CorrectionMode,
) -> CorrectionCoefficients {
    if matches!(mode, CorrectionMode::Off) {
        return CorrectionCoefficients::default();
    }
    let rho = node.rho;
    let (ux, uy, uz) = (node.u.x, node.u.y, node.u.z);
    let cs2 = spec.cs2;
    let (r2, s2) = (spec.r * spec.r, spec.s * spec.s);
    let fac_nu = 1.0 / sched.omega_nu - 0.5;
    let fac_xi = 1.0 / sched.omega_xi - 0.5;

    let (gx, gy, gz) = (3.0 * cs2 - 1.0, 3.0 * cs2 - r2, 3.0 * cs2 - s2);
    let (vx, vy, vz) = match mode {
        CorrectionMode::Full => (3.0 * ux * ux, 3.0 * uy * uy, 3.0 * uz * uz),
        CorrectionMode::LowMach => (0.0, 0.0, 0.0),
        CorrectionMode::Off => unreachable!(),
    };

    let mut c = CorrectionCoefficients {
        theta_sx: -rho * (vx + gx) * fac_nu,
        theta_sy: -rho * (vy + gy) * fac_nu,
        theta_sz: -rho * (vz + gz) * fac_nu,
        theta_bx: -rho * (vx + gx) * fac_xi,
        theta_by: -rho * (vy + gy) * fac_xi,
        theta_bz: -rho * (vz + gz) * fac_xi,
        lambda_sx: -gx * fac_nu * ux,
        lambda_sy: gy * fac_nu * uy,
        lambda_sz: gz * fac_nu * uz,
        lambda_bx: -gx * fac_xi * ux,
        lambda_by: -gy * fac_xi * uy,
        lambda_bz: -gz * fac_xi * uz,
    };
    if matches!(mode, CorrectionMode::LowMach) {
        c.lambda_sx = 0.0;
        c.lambda_sy = 0.0;
        c.lambda_sz = 0.0;
        c.lambda_bx = 0.0;
        c.lambda_by = 0.0;
        c.lambda_bz = 0.0;
    }
    c
}

/// Shared kernel of the local strain-rate recovery: solves the 3x3 system
/// for the diagonal velocity gradients given the three combined
/// second-order non-equilibrium moments.
fn solve_diagonal_gradients(
    n2d1: f64,
    n2d2: f64,
    n2s: f64,
    node: &NodeState,
    sched: &RelaxationSchedule,
    spec: &LatticeSpec,
) -> Result<[f64; 3]> {
    let rho = node.rho;
    let (ux, uy, uz) = (node.u.x, node.u.y, node.u.z);
    let cs2 = spec.cs2;
    let (r2, s2) = (spec.r * spec.r, spec.s * spec.s);

    let a = 0.5 * (3.0 * cs2 - 1.0) * ux;
    let b = 0.5 * (3.0 * cs2 - r2) * uy;
    let c = 0.5 * (3.0 * cs2 - s2) * uz;
    let [dx_rho, dy_rho, dz_rho] = node.grad_rho;
    let e_sr1 = -a * dx_rho + b * dy_rho;
    let e_sr2 = -a * dx_rho + c * dz_rho;
    let e_br = -a * dx_rho - b * dy_rho - c * dz_rho;

    let r_s1 = n2d1 + e_sr1;
    let r_s2 = n2d2 + e_sr2;
    let r_b = n2s + e_br;

    let two_cs2_nu = 2.0 * cs2 / sched.omega_nu;
    let two_cs2_xi = 2.0 * cs2 / sched.omega_xi;
    let c_sx = (-two_cs2_nu + 0.5 * (3.0 * cs2 - 1.0) + 1.5 * ux * ux) * rho;
    let c_sy = (two_cs2_nu - 0.5 * (3.0 * cs2 - r2) - 1.5 * uy * uy) * rho;
    let c_sz = (two_cs2_nu - 0.5 * (3.0 * cs2 - s2) - 1.5 * uz * uz) * rho;
    let c_bx = (-two_cs2_xi + 0.5 * (3.0 * cs2 - 1.0) + 1.5 * ux * ux) * rho;
    let c_by = (-two_cs2_xi + 0.5 * (3.0 * cs2 - r2) + 1.5 * uy * uy) * rho;
    let c_bz = (-two_cs2_xi + 0.5 * (3.0 * cs2 - s2) + 1.5 * uz * uz) * rho;

    let denom = -c_sx * c_sz * c_by - c_sy * (c_sx * c_bz - c_sz * c_bx);
    let threshold = 1e-12 * rho * cs2;
    if denom.abs() < threshold || c_sy.abs() < threshold || c_sz.abs() < threshold {
        return Err(Error::SingularGradient {
            denominator: denom.abs().min(c_sy.abs()).min(c_sz.abs()),
            threshold,
        });
    }

    let dudx = (-c_sz * c_by * r_s1 - c_sy * (c_bz * r_s2 - c_sz * r_b)) / denom;
    let dvdy = (r_s1 - c_sx * dudx) / c_sy;
    let dwdz = (r_s2 - c_sx * dudx) / c_sz;
    Ok([dudx, dvdy, dwdz])
}

/// Recovers `(du_x/dx, du_y/dy, du_z/dz)` locally from the pre-collision
/// central moments.
pub fn diagonal_velocity_gradients(
    mc: &MomentVector,
    node: &NodeState,
    sched: &RelaxationSchedule,
    spec: &LatticeSpec,
) -> Result<[f64; 3]> {
    debug_assert_eq!(mc.frame, Frame::Central);
    let n2d1 = mc.k[K200] - mc.k[K020];
    let n2d2 = mc.k[K200] - mc.k[K002];
    let n2s = mc.k[K200] + mc.k[K020] + mc.k[K002] - 3.0 * spec.cs2 * node.rho;
    solve_diagonal_gradients(n2d1, n2d2, n2s, node, sched, spec)
}

/// Off-diagonal strain-rate components from the off-diagonal second-order
/// central moments: `S_xy = -omega_nu k_110 / (2 rho cs2)` and cyclic.
pub fn off_diagonal_strain(mc: &MomentVector, rho: f64, omega_nu: f64, cs2: f64) -> [f64; 3] {
    debug_assert_eq!(mc.frame, Frame::Central);
    let w = -omega_nu / (2.0 * rho * cs2);
    [w * mc.k[K110], w * mc.k[K101], w * mc.k[K011]]
}

/// The three combined second-order equilibria `(k_2s, k_2d1, k_2d2)` with
/// their dt-scaled corrections.
pub fn extended_second_order_equilibria(
    node: &NodeState,
    gradients: [f64; 3],
    coeffs: &CorrectionCoefficients,
    spec: &LatticeSpec,
    dt: f64,
) -> (f64, f64, f64) {
    let [gx, gy, gz] = gradients;
    let [dx_rho, dy_rho, dz_rho] = node.grad_rho;
    let k2s = 3.0 * spec.cs2 * node.rho
        + (coeffs.theta_bx * gx
            + coeffs.theta_by * gy
            + coeffs.theta_bz * gz
            + coeffs.lambda_bx * dx_rho
            + coeffs.lambda_by * dy_rho
            + coeffs.lambda_bz * dz_rho)
            * dt;
    let k2d1 = (coeffs.theta_sx * gx - coeffs.theta_sy * gy
        + coeffs.lambda_sx * dx_rho
        + coeffs.lambda_sy * dy_rho)
        * dt;
    let k2d2 = (coeffs.theta_sx * gx - coeffs.theta_sz * gz
        + coeffs.lambda_sx * dx_rho
        + coeffs.lambda_sz * dz_rho)
        * dt;
    (k2s, k2d1, k2d2)
}

/// Relaxes central moments to their (extended) equilibria with the
/// combine/segregate step isolating the trace. `k_000` passes through
/// untouched.
pub fn relax_central(
    mc: &MomentVector,
    node: &NodeState,
    sched: &RelaxationSchedule,
    spec: &LatticeSpec,
    mode: CorrectionMode,
    dt: f64,
) -> Result<MomentVector> {
    debug_assert_eq!(mc.frame, Frame::Central);
    let k = &mc.k;
    let rho = node.rho;
    let cs2 = spec.cs2;
    let (w1, wnu, wxi, wh) = (sched.omega_1, sched.omega_nu, sched.omega_xi, sched.omega_high);

    // combine (B): trace and deviatoric parts of order 2, symmetric and
    // antisymmetric pairs of order 3, and the order-4 diagonal products
    let k2s = k[K200] + k[K020] + k[K002];
    let k2d1 = k[K200] - k[K020];
    let k2d2 = k[K200] - k[K002];
    let k3s1 = k[K120] + k[K102];
    let k3m1 = k[K120] - k[K102];
    let k3s2 = k[K210] + k[K012];
    let k3m2 = k[K210] - k[K012];
    let k3s3 = k[K201] + k[K021];
    let k3m3 = k[K201] - k[K021];
    let k4s = k[K220] + k[K202] + k[K022];
    let k4d1 = k[K220] + k[K202] - k[K022];
    let k4d2 = k[K220] - k[K202];

    let (k2s_eq, k2d1_eq, k2d2_eq) = if matches!(mode, CorrectionMode::Off) {
        (3.0 * cs2 * rho, 0.0, 0.0)
    } else {
        let grads = diagonal_velocity_gradients(mc, node, sched, spec)?;
        let coeffs = correction_coefficients(node, sched, spec, mode);
        extended_second_order_equilibria(node, grads, &coeffs, spec, dt)
    };

    let [fx, fy, fz] = node.force;
    let src = (1.0 - 0.5 * w1) * dt;

    let mut out = [0.0; Q];
    out[K000] = k[K000];
    out[K100] = (1.0 - w1) * k[K100] + src * fx;
    out[K010] = (1.0 - w1) * k[K010] + src * fy;
    out[K001] = (1.0 - w1) * k[K001] + src * fz;
    out[K110] = (1.0 - wnu) * k[K110];
    out[K101] = (1.0 - wnu) * k[K101];
    out[K011] = (1.0 - wnu) * k[K011];

    let t2s = k2s + wxi * (k2s_eq - k2s);
    let t2d1 = k2d1 + wnu * (k2d1_eq - k2d1);
    let t2d2 = k2d2 + wnu * (k2d2_eq - k2d2);
    let t3s1 = (1.0 - wh) * k3s1;
    let t3m1 = (1.0 - wh) * k3m1;
    let t3s2 = (1.0 - wh) * k3s2;
    let t3m2 = (1.0 - wh) * k3m2;
    let t3s3 = (1.0 - wh) * k3s3;
    let t3m3 = (1.0 - wh) * k3m3;
    out[K111] = (1.0 - wh) * k[K111];
    let t4s = k4s + wh * (3.0 * cs2 * cs2 * rho - k4s);
    let t4d1 = k4d1 + wh * (cs2 * cs2 * rho - k4d1);
    let t4d2 = (1.0 - wh) * k4d2;
    out[K211] = (1.0 - wh) * k[K211];
    out[K121] = (1.0 - wh) * k[K121];
    out[K112] = (1.0 - wh) * k[K112];
    out[K122] = (1.0 - wh) * k[K122];
    out[K212] = (1.0 - wh) * k[K212];
    out[K221] = (1.0 - wh) * k[K221];
    out[K222] = k[K222] + wh * (cs2 * cs2 * cs2 * rho - k[K222]);

    // segregate (B^-1)
    out[K200] = (t2s + t2d1 + t2d2) / 3.0;
    out[K020] = (t2s - 2.0 * t2d1 + t2d2) / 3.0;
    out[K002] = (t2s + t2d1 - 2.0 * t2d2) / 3.0;
    out[K120] = 0.5 * (t3s1 + t3m1);
    out[K102] = 0.5 * (t3s1 - t3m1);
    out[K210] = 0.5 * (t3s2 + t3m2);
    out[K012] = 0.5 * (t3s2 - t3m2);
    out[K201] = 0.5 * (t3s3 + t3m3);
    out[K021] = 0.5 * (t3s3 - t3m3);
    out[K220] = 0.25 * (t4s + t4d1 + 2.0 * t4d2);
    out[K202] = 0.25 * (t4s + t4d1 - 2.0 * t4d2);
    out[K022] = 0.5 * (t4s - t4d1);

    Ok(MomentVector {
        k: out,
        frame: Frame::Central,
    })
}

/// Raw-moment counterpart of [`relax_central`]: identical group structure
/// and corrections, with the equilibria and source moments carrying their
/// velocity-polynomial raw forms.
pub fn relax_raw(
    m: &MomentVector,
    node: &NodeState,
    sched: &RelaxationSchedule,
    spec: &LatticeSpec,
    mode: CorrectionMode,
    dt: f64,
) -> Result<MomentVector> {
    debug_assert_eq!(m.frame, Frame::Raw);
    let k = &m.k;
    let rho = node.rho;
    let (ux, uy, uz) = (node.u.x, node.u.y, node.u.z);
    let cs2 = spec.cs2;
    let (w1, wnu, wxi, wh) = (sched.omega_1, sched.omega_nu, sched.omega_xi, sched.omega_high);
    let eq = raw_equilibria(rho, node.u, cs2);

    let k2s = k[K200] + k[K020] + k[K002];
    let k2d1 = k[K200] - k[K020];
    let k2d2 = k[K200] - k[K002];
    let k3s1 = k[K120] + k[K102];
    let k3m1 = k[K120] - k[K102];
    let k3s2 = k[K210] + k[K012];
    let k3m2 = k[K210] - k[K012];
    let k3s3 = k[K201] + k[K021];
    let k3m3 = k[K201] - k[K021];
    let k4s = k[K220] + k[K202] + k[K022];
    let k4d1 = k[K220] + k[K202] - k[K022];
    let k4d2 = k[K220] - k[K202];

    // second-order equilibria: raw forms plus the same corrections, since
    // the second-order non-equilibrium moments coincide across frames
    let (corr_2s, corr_2d1, corr_2d2) = if matches!(mode, CorrectionMode::Off) {
        (0.0, 0.0, 0.0)
    } else {
        let n2d1 = k2d1 - (eq.k[K200] - eq.k[K020]);
        let n2d2 = k2d2 - (eq.k[K200] - eq.k[K002]);
        let n2s = k2s - (eq.k[K200] + eq.k[K020] + eq.k[K002]);
        let grads = solve_diagonal_gradients(n2d1, n2d2, n2s, node, sched, spec)?;
        let coeffs = correction_coefficients(node, sched, spec, mode);
        let (c2s, c2d1, c2d2) = extended_second_order_equilibria(node, grads, &coeffs, spec, dt);
        (c2s - 3.0 * cs2 * rho, c2d1, c2d2)
    };
    let k2s_eq = (eq.k[K200] + eq.k[K020] + eq.k[K002]) + corr_2s;
    let k2d1_eq = (eq.k[K200] - eq.k[K020]) + corr_2d1;
    let k2d2_eq = (eq.k[K200] - eq.k[K002]) + corr_2d2;

    // raw source moments of the body force (orders 1 and 2 only)
    let [fx, fy, fz] = node.force;
    let src1 = (1.0 - 0.5 * w1) * dt;
    let src_nu = (1.0 - 0.5 * wnu) * dt;
    let src_xi = (1.0 - 0.5 * wxi) * dt;
    let p2s = 2.0 * (fx * ux + fy * uy + fz * uz);
    let p2d1 = 2.0 * (fx * ux - fy * uy);
    let p2d2 = 2.0 * (fx * ux - fz * uz);

    let mut out = [0.0; Q];
    out[K000] = k[K000];
    out[K100] = k[K100] + w1 * (eq.k[K100] - k[K100]) + src1 * fx;
    out[K010] = k[K010] + w1 * (eq.k[K010] - k[K010]) + src1 * fy;
    out[K001] = k[K001] + w1 * (eq.k[K001] - k[K001]) + src1 * fz;
    out[K110] = k[K110] + wnu * (eq.k[K110] - k[K110]) + src_nu * (fx * uy + fy * ux);
    out[K101] = k[K101] + wnu * (eq.k[K101] - k[K101]) + src_nu * (fx * uz + fz * ux);
    out[K011] = k[K011] + wnu * (eq.k[K011] - k[K011]) + src_nu * (fy * uz + fz * uy);

    let t2s = k2s + wxi * (k2s_eq - k2s) + src_xi * p2s;
    let t2d1 = k2d1 + wnu * (k2d1_eq - k2d1) + src_nu * p2d1;
    let t2d2 = k2d2 + wnu * (k2d2_eq - k2d2) + src_nu * p2d2;
    let t3s1 = k3s1 + wh * ((eq.k[K120] + eq.k[K102]) - k3s1);
    let t3m1 = k3m1 + wh * ((eq.k[K120] - eq.k[K102]) - k3m1);
    let t3s2 = k3s2 + wh * ((eq.k[K210] + eq.k[K012]) - k3s2);
    let t3m2 = k3m2 + wh * ((eq.k[K210] - eq.k[K012]) - k3m2);
    let t3s3 = k3s3 + wh * ((eq.k[K201] + eq.k[K021]) - k3s3);
    let t3m3 = k3m3 + wh * ((eq.k[K201] - eq.k[K021]) - k3m3);
    out[K111] = k[K111] + wh * (eq.k[K111] - k[K111]);
    let t4s = k4s + wh * ((eq.k[K220] + eq.k[K202] + eq.k[K022]) - k4s);
    let t4d1 = k4d1 + wh * ((eq.k[K220] + eq.k[K202] - eq.k[K022]) - k4d1);
    let t4d2 = k4d2 + wh * ((eq.k[K220] - eq.k[K202]) - k4d2);
    out[K211] = k[K211] + wh * (eq.k[K211] - k[K211]);
    out[K121] = k[K121] + wh * (eq.k[K121] - k[K121]);
    out[K112] = k[K112] + wh * (eq.k[K112] - k[K112]);
    out[K122] = k[K122] + wh * (eq.k[K122] - k[K122]);
    out[K212] = k[K212] + wh * (eq.k[K212] - k[K212]);
    out[K221] = k[K221] + wh * (eq.k[K221] - k[K221]);
    out[K222] = k[K222] + wh * (eq.k[K222] - k[K222]);

    out[K200] = (t2s + t2d1 + t2d2) / 3.0;
    out[K020] = (t2s - 2.0 * t2d1 + t2d2) / 3.0;
    out[K002] = (t2s + t2d1 - 2.0 * t2d2) / 3.0;
    out[K120] = 0.5 * (t3s1 + t3m1);
    out[K102] = 0.5 * (t3s1 - t3m1);
    out[K210] = 0.5 * (t3s2 + t3m2);
    out[K012] = 0.5 * (t3s2 - t3m2);
    out[K201] = 0.5 * (t3s3 + t3m3);
    out[K021] = 0.5 * (t3s3 - t3m3);
    out[K220] = 0.25 * (t4s + t4d1 + 2.0 * t4d2);
    out[K202] = 0.25 * (t4s + t4d1 - 2.0 * t4d2);
    out[K022] = 0.5 * (t4s - t4d1);

    Ok(MomentVector {
        k: out,
        frame: Frame::Raw,
    })
}

/// Full per-node collision: maps populations to moments, relaxes them in
/// the requested frame and maps back.
///
/// The central chain is `P -> S -> F(u) -> relax -> F(-u) -> S^-1 -> P^-1`;
/// the raw chain omits the two frame shifts.
pub fn collide_node(
    f: &[f64; Q],
    node: &NodeState,
    sched: &RelaxationSchedule,
    spec: &LatticeSpec,
    variant: CollisionVariant,
    mode: CorrectionMode,
    dt: f64,
) -> Result<[f64; Q]> {
    let m = distributions_to_raw_cubic(f);
    let m = scale_raw(&m, spec, true);
    let post = match variant {
        CollisionVariant::Central => {
            let mc = raw_to_central(&m, node.u);
            let mc_post = relax_central(&mc, node, sched, spec, mode, dt)?;
            central_to_raw(&mc_post, node.u)
        }
        CollisionVariant::Raw => relax_raw(&m, node, sched, spec, mode, dt)?,
    };
    let post = scale_raw(&post, spec, false);
    Ok(raw_to_distributions(&post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    fn cubic() -> LatticeSpec {
        build_lattice(1.0, 1.0, None).unwrap()
    }

    #[test]
    fn central_equilibria_match_maxwellian_products() {
        let eq = central_equilibria(1.0, 1.0 / 3.0);
        assert!((eq.k[K200] - 1.0 / 3.0).abs() < 1e-15);
        assert!((eq.k[K220] - 1.0 / 9.0).abs() < 1e-15);
        assert!((eq.k[K222] - 1.0 / 27.0).abs() < 1e-15);

        assert_eq!(central_equilibria(0.0, 0.2).k, [0.0; Q]);

        let eq = central_equilibria(2.0, 0.04);
        assert!((eq.k[K222] - 1.28e-4).abs() < 1e-18);
    }

    #[test]
    fn raw_equilibria_reduce_to_central_at_rest() {
        let eq = raw_equilibria(1.3, FrameVelocity::default(), 0.1);
        assert_eq!(eq.k, central_equilibria(1.3, 0.1).k);
    }

    #[test]
    fn raw_equilibria_third_order_velocity_terms() {
        let eq = raw_equilibria(1.0, FrameVelocity::new(0.1, 0.0, 0.0), 1.0 / 3.0);
        assert!((eq.k[K120] - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn raw_equilibria_equal_frame_shifted_central_equilibria() {
        let u = FrameVelocity::new(0.12, -0.07, 0.04);
        let eq = raw_equilibria(1.1, u, 0.09);
        let via_transform = central_to_raw(&central_equilibria(1.1, 0.09), u);
        for i in 0..Q {
            assert!(
                (eq.k[i] - via_transform.k[i]).abs() < 1e-14,
                "component {i}: {} vs {}",
                eq.k[i],
                via_transform.k[i]
            );
        }
    }

    #[test]
    fn source_moments_carry_only_first_order() {
        assert_eq!(source_central_moments([0.0; 3]).k, [0.0; Q]);
        let s = source_central_moments([1e-5, 0.0, 0.0]);
        assert_eq!(s.k[K100], 1e-5);
        let nonzero: usize = s.k.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn corrections_vanish_on_cubic_lattice() {
        let spec = cubic();
        let sched = RelaxationSchedule::new(1.3, 0.9);
        let node = NodeState::resting(1.0);
        let c = correction_coefficients(&node, &sched, &spec, CorrectionMode::Full);
        assert_eq!(c, CorrectionCoefficients::default());
    }

    #[test]
    fn correction_substitution_examples() {
        // cs2 = r^2/3 kills the y-anisotropy term
        let spec = build_lattice(0.5, 1.0, Some(1.0 / 12.0)).unwrap();
        let sched = RelaxationSchedule::new(1.0, 1.0);
        let node = NodeState::resting(1.0);
        let c = correction_coefficients(&node, &sched, &spec, CorrectionMode::Full);
        assert!(c.theta_sy.abs() < 1e-15);
        assert!((c.theta_sx - 0.375).abs() < 1e-15);
    }

    #[test]
    fn low_mach_mode_drops_density_weights_and_cubic_terms() {
        let spec = build_lattice(0.5, 1.0, Some(0.05)).unwrap();
        let sched = RelaxationSchedule::new(1.2, 0.8);
        let mut node = NodeState::resting(1.0);
        node.u = FrameVelocity::new(0.1, -0.05, 0.02);
        let c = correction_coefficients(&node, &sched, &spec, CorrectionMode::LowMach);
        assert_eq!(c.lambda_sx, 0.0);
        assert_eq!(c.lambda_bz, 0.0);
        let full = correction_coefficients(&node, &sched, &spec, CorrectionMode::Full);
        assert!((full.theta_sx - c.theta_sx).abs() > 1e-6); // 3 u_x^2 term present
    }

    #[test]
    fn gradients_vanish_at_equilibrium() {
        let spec = build_lattice(0.5, 1.0, None).unwrap();
        let sched = RelaxationSchedule::new(1.4, 0.7);
        let node = NodeState::resting(1.0);
        let mc = central_equilibria(1.0, spec.cs2);
        let g = diagonal_velocity_gradients(&mc, &node, &sched, &spec).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn gradients_recover_manufactured_values() {
        // build central moments whose second-order diagonals encode known
        // gradients through the forward relations, then invert
        let spec = build_lattice(0.5, 0.8, Some(0.06)).unwrap();
        let sched = RelaxationSchedule::new(1.3, 0.7);
        let node = NodeState {
            rho: 1.02,
            u: FrameVelocity::new(0.05, -0.03, 0.02),
            grad_rho: [1e-4, -2e-4, 5e-5],
            force: [0.0; 3],
        };
        let target = [3.1e-4, -1.7e-4, 2.3e-4];
        let (ux, uy, uz) = (node.u.x, node.u.y, node.u.z);
        let cs2 = spec.cs2;
        let (r2, s2) = (spec.r * spec.r, spec.s * spec.s);
        let a = 0.5 * (3.0 * cs2 - 1.0) * ux;
        let b = 0.5 * (3.0 * cs2 - r2) * uy;
        let c = 0.5 * (3.0 * cs2 - s2) * uz;
        let e_sr1 = -a * node.grad_rho[0] + b * node.grad_rho[1];
        let e_sr2 = -a * node.grad_rho[0] + c * node.grad_rho[2];
        let e_br = -a * node.grad_rho[0] - b * node.grad_rho[1] - c * node.grad_rho[2];
        let rho = node.rho;
        let c_sx = (-2.0 * cs2 / sched.omega_nu + 0.5 * (3.0 * cs2 - 1.0) + 1.5 * ux * ux) * rho;
        let c_sy = (2.0 * cs2 / sched.omega_nu - 0.5 * (3.0 * cs2 - r2) - 1.5 * uy * uy) * rho;
        let c_sz = (2.0 * cs2 / sched.omega_nu - 0.5 * (3.0 * cs2 - s2) - 1.5 * uz * uz) * rho;
        let c_bx = (-2.0 * cs2 / sched.omega_xi + 0.5 * (3.0 * cs2 - 1.0) + 1.5 * ux * ux) * rho;
        let c_by = (-2.0 * cs2 / sched.omega_xi + 0.5 * (3.0 * cs2 - r2) + 1.5 * uy * uy) * rho;
        let c_bz = (-2.0 * cs2 / sched.omega_xi + 0.5 * (3.0 * cs2 - s2) + 1.5 * uz * uz) * rho;
        let n2d1 = c_sx * target[0] + c_sy * target[1] - e_sr1;
        let n2d2 = c_sx * target[0] + c_sz * target[2] - e_sr2;
        let n2s = c_bx * target[0] + c_by * target[1] + c_bz * target[2] - e_br;

        let mut mc = central_equilibria(rho, cs2);
        let k200 = (n2s + n2d1 + n2d2) / 3.0;
        let k020 = (n2s - 2.0 * n2d1 + n2d2) / 3.0;
        let k002 = (n2s + n2d1 - 2.0 * n2d2) / 3.0;
        mc.k[K200] += k200;
        mc.k[K020] += k020;
        mc.k[K002] += k002;

        let g = diagonal_velocity_gradients(&mc, &node, &sched, &spec).unwrap();
        for i in 0..3 {
            assert!((g[i] - target[i]).abs() < 1e-10, "component {i}: {}", g[i]);
        }
    }

    #[test]
    fn off_diagonal_strain_inverts_shear_moment() {
        let spec = cubic();
        let mc = central_equilibria(1.0, spec.cs2);
        assert_eq!(off_diagonal_strain(&mc, 1.0, 1.2, spec.cs2), [0.0; 3]);

        let g = 7.3e-4;
        let omega = 1.4;
        let mut mc = central_equilibria(1.0, spec.cs2);
        mc.k[K110] = -2.0 * spec.cs2 / omega * g;
        let s = off_diagonal_strain(&mc, 1.0, omega, spec.cs2);
        assert!((s[0] - g).abs() < 1e-16);
        assert_eq!(s[1], 0.0);
    }

    #[test]
    fn extended_equilibria_reduce_without_gradients() {
        let spec = build_lattice(0.6, 1.2, Some(0.1)).unwrap();
        let node = NodeState::resting(1.0);
        let sched = RelaxationSchedule::new(1.1, 0.9);
        let coeffs = correction_coefficients(&node, &sched, &spec, CorrectionMode::Full);
        let (k2s, k2d1, k2d2) =
            extended_second_order_equilibria(&node, [0.0; 3], &coeffs, &spec, 1.0);
        assert!((k2s - 3.0 * spec.cs2).abs() < 1e-15);
        assert_eq!(k2d1, 0.0);
        assert_eq!(k2d2, 0.0);
    }

    #[test]
    fn relax_central_equilibrium_is_fixed_point() {
        let spec = build_lattice(0.5, 1.0, None).unwrap();
        let sched = RelaxationSchedule::new(1.7, 0.6);
        let node = NodeState::resting(1.0);
        let mc = central_equilibria(1.0, spec.cs2);
        let out = relax_central(&mc, &node, &sched, &spec, CorrectionMode::Full, 1.0).unwrap();
        for i in 0..Q {
            assert!((out.k[i] - mc.k[i]).abs() < 1e-15, "component {i}");
        }
    }

    #[test]
    fn relax_central_shear_moment_decays_at_omega_nu() {
        let spec = cubic();
        let sched = RelaxationSchedule::new(1.3, 0.8);
        let node = NodeState::resting(1.0);
        let mut mc = central_equilibria(1.0, spec.cs2);
        mc.k[K110] = 0.01;
        let out = relax_central(&mc, &node, &sched, &spec, CorrectionMode::Full, 1.0).unwrap();
        assert!((out.k[K110] - (1.0 - 1.3) * 0.01).abs() < 1e-16);
    }

    #[test]
    fn relax_central_flips_half_force_first_moment() {
        let spec = build_lattice(0.5, 0.33, None).unwrap();
        for w1 in [0.6, 1.0, 1.7] {
            let mut sched = RelaxationSchedule::new(1.2, 1.2);
            sched.omega_1 = w1;
            let fx = 1e-5;
            let node = NodeState {
                rho: 1.0,
                u: FrameVelocity::default(),
                grad_rho: [0.0; 3],
                force: [fx, 0.0, 0.0],
            };
            let mut mc = central_equilibria(1.0, spec.cs2);
            mc.k[K100] = -0.5 * fx;
            let out = relax_central(&mc, &node, &sched, &spec, CorrectionMode::Full, 1.0).unwrap();
            assert!(
                (out.k[K100] - 0.5 * fx).abs() < 1e-18,
                "omega_1 = {w1}: {}",
                out.k[K100]
            );
        }
    }

    #[test]
    fn collide_node_preserves_equilibrium() {
        for variant in [CollisionVariant::Central, CollisionVariant::Raw] {
            let spec = build_lattice(0.5, 1.0, None).unwrap();
            let sched = RelaxationSchedule::new(1.6, 0.7);
            let node = NodeState::resting(1.0);
            let m_eq = scale_raw(&raw_equilibria(1.0, node.u, spec.cs2), &spec, false);
            let f = raw_to_distributions(&m_eq);
            let out =
                collide_node(&f, &node, &sched, &spec, variant, CorrectionMode::Full, 1.0).unwrap();
            for a in 0..Q {
                assert!((out[a] - f[a]).abs() < 1e-14, "{variant:?} direction {a}");
            }
        }
    }

    #[test]
    fn collide_node_conserves_mass_and_gains_momentum() {
        let spec = build_lattice(0.5, 0.33, Some(0.03)).unwrap();
        let sched = RelaxationSchedule::new(1.4, 0.9);
        let force = [2e-5, -1e-5, 3e-5];
        // populations: equilibrium plus a fixed perturbation
        let u = FrameVelocity::new(0.03, -0.02, 0.01);
        let m_eq = scale_raw(&raw_equilibria(1.0, u, spec.cs2), &spec, false);
        let mut f = raw_to_distributions(&m_eq);
        for (a, v) in f.iter_mut().enumerate() {
            *v += 1e-3 * ((a as f64 * 0.83).sin());
        }
        // node state consistent with f and the half-force rule
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
            u: FrameVelocity::new(
                (mom[0] + 0.5 * force[0]) / rho,
                (mom[1] + 0.5 * force[1]) / rho,
                (mom[2] + 0.5 * force[2]) / rho,
            ),
            grad_rho: [0.0; 3],
            force,
        };
        for variant in [CollisionVariant::Central, CollisionVariant::Raw] {
            let out =
                collide_node(&f, &node, &sched, &spec, variant, CorrectionMode::Full, 1.0).unwrap();
            let mass: f64 = out.iter().sum::<f64>() - rho;
            assert!(mass.abs() < 1e-14, "{variant:?} mass drift {mass:.2e}");
            for c in 0..3 {
                let before = mom[c];
                let after: f64 = (0..Q).map(|a| out[a] * spec.velocities[a][c]).sum();
                assert!(
                    (after - before - force[c]).abs() < 1e-13,
                    "{variant:?} momentum axis {c}: {:.2e}",
                    after - before - force[c]
                );
            }
        }
    }

    #[test]
    fn singular_gradient_error_is_reported() {
        // omega -> 2 with an extreme velocity zeroes the C_sy elimination
        // denominator: 1.5 u_y^2 = 2 cs2 / omega - (3 cs2 - r^2) / 2
        let spec = build_lattice(1.0, 1.0, Some(0.05)).unwrap();
        let sched = RelaxationSchedule::new(1.99, 1.0);
        let uy =
            ((2.0 * spec.cs2 / sched.omega_nu - 0.5 * (3.0 * spec.cs2 - 1.0)) / 1.5).sqrt();
        let mut node = NodeState::resting(1.0);
        node.u = FrameVelocity::new(0.0, uy, 0.0);
        let mc = central_equilibria(1.0, spec.cs2);
        assert!(matches!(
            diagonal_velocity_gradients(&mc, &node, &sched, &spec),
            Err(Error::SingularGradient { .. })
        ));
    }
}
