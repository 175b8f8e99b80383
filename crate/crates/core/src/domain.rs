//! Grid storage, lock-step streaming, boundary closures and the
//! hydrodynamic field updates.
//!
//! Populations are stored structure-of-arrays by direction in two buffers;
//! collision writes in place into the current buffer, the streaming and
//! boundary passes read the current buffer and write only the next one,
//! and a swap finishes the step. Streaming moves every population exactly
//! one node along its direction offsets regardless of `r` and `s` - the
//! aspect ratios are carried by the physical node spacing `(1, r, s)`,
//! not by the stencil.

use crate::error::Error;
use crate::lattice::{LatticeSpec, DIRECTIONS, OPPOSITE, Q};
use crate::Result;
use rayon::prelude::*;

/// Storage layout of [`PopulationField`]; only the direction-major
/// structure-of-arrays variant exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldLayout {
    SoaByDirection,
}

/// Double-buffered 27-populations-per-node grid storage.
#[derive(Debug, Clone)]
pub struct PopulationField {
    nx: usize,
    ny: usize,
    nz: usize,
    n: usize,
    cur: Vec<f64>,
    next: Vec<f64>,
}

impl PopulationField {
    pub const LAYOUT: FieldLayout = FieldLayout::SoaByDirection;

    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        let n = nx * ny * nz;
        PopulationField {
            nx,
            ny,
            nz,
            n,
            cur: vec![0.0; Q * n],
            next: vec![0.0; Q * n],
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.nx * (y + self.ny * z)
    }

    /// Current-buffer slice of one direction.
    #[inline]
    pub fn dir(&self, a: usize) -> &[f64] {
        &self.cur[a * self.n..(a + 1) * self.n]
    }

    #[inline]
    pub fn dir_mut(&mut self, a: usize) -> &mut [f64] {
        &mut self.cur[a * self.n..(a + 1) * self.n]
    }

    #[inline]
    pub fn next_dir_mut(&mut self, a: usize) -> &mut [f64] {
        &mut self.next[a * self.n..(a + 1) * self.n]
    }

    pub fn current(&self) -> &[f64] {
        &self.cur
    }

    pub fn current_mut(&mut self) -> &mut [f64] {
        &mut self.cur
    }

    pub fn next_buffer(&self) -> &[f64] {
        &self.next
    }

    pub fn next_buffer_mut(&mut self) -> &mut [f64] {
        &mut self.next
    }

    pub fn swap_buffers(&mut self) {
        std::mem::swap(&mut self.cur, &mut self.next);
    }

    /// Allocated bytes of both population buffers.
    pub fn bytes(&self) -> usize {
        (self.cur.len() + self.next.len()) * std::mem::size_of::<f64>()
    }

    /// Gathers the 27 populations of one node from the current buffer.
    #[inline]
    pub fn gather(&self, idx: usize) -> [f64; Q] {
        let mut f = [0.0; Q];
        for a in 0..Q {
            f[a] = self.cur[a * self.n + idx];
        }
        f
    }
}

/// Condition on one face of the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceCondition {
    Periodic,
    WallRest,
    /// Wall moving along +x with the given speed; supported on the face
    /// with outward normal +y only.
    WallMoving { u_lid: f64 },
}

/// Face indices of [`BoundarySpec::faces`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    XMin = 0,
    XMax = 1,
    YMin = 2,
    YMax = 3,
    ZMin = 4,
    ZMax = 5,
}

/// Per-face boundary conditions for the box domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub faces: [FaceCondition; 6],
}

impl BoundarySpec {
    pub fn fully_periodic() -> Self {
        BoundarySpec {
            faces: [FaceCondition::Periodic; 6],
        }
    }

    /// Periodic along x, resting walls on the four side faces.
    pub fn duct() -> Self {
        let mut faces = [FaceCondition::WallRest; 6];
        faces[Face::XMin as usize] = FaceCondition::Periodic;
        faces[Face::XMax as usize] = FaceCondition::Periodic;
        BoundarySpec { faces }
    }

    /// Closed box with the +y face sliding along +x at `u_lid`.
    pub fn lid_driven_cavity(u_lid: f64) -> Self {
        let mut faces = [FaceCondition::WallRest; 6];
        faces[Face::YMax as usize] = FaceCondition::WallMoving { u_lid };
        BoundarySpec { faces }
    }

    pub fn is_periodic_axis(&self, axis: usize) -> bool {
        matches!(self.faces[2 * axis], FaceCondition::Periodic)
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            let lo = matches!(self.faces[2 * axis], FaceCondition::Periodic);
            let hi = matches!(self.faces[2 * axis + 1], FaceCondition::Periodic);
            if lo != hi {
                return Err(Error::Configuration(format!(
                    "opposite faces of axis {axis} must both be periodic or both walls"
                )));
            }
        }
        for (i, face) in self.faces.iter().enumerate() {
            if matches!(face, FaceCondition::WallMoving { .. }) && i != Face::YMax as usize {
                return Err(Error::Configuration(
                    "moving walls are derived for the +y-normal face only".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn has_moving_lid(&self) -> Option<f64> {
        match self.faces[Face::YMax as usize] {
            FaceCondition::WallMoving { u_lid } => Some(u_lid),
            _ => None,
        }
    }
}

/// Streams the post-collision populations of the current buffer one node
/// along each direction into the next buffer. Interior and periodic links
/// only; wall-crossing links are left to the bounce-back passes.
pub fn stream(field: &mut PopulationField, bc: &BoundarySpec) {
    let (nx, ny, nz) = field.dims();
    let n = field.n;
    let px = bc.is_periodic_axis(0);
    let py = bc.is_periodic_axis(1);
    let pz = bc.is_periodic_axis(2);
    let (cur, next) = (&field.cur, &mut field.next);

    next.par_chunks_mut(n).enumerate().for_each(|(a, out)| {
        let src = &cur[a * n..(a + 1) * n];
        let [dx, dy, dz] = DIRECTIONS[a];
        for tz in 0..nz {
            let sz = tz as i64 - dz as i64;
            let sz = if sz < 0 || sz >= nz as i64 {
                if !pz {
                    continue;
                }
                (sz + nz as i64) % nz as i64
            } else {
                sz
            } as usize;
            for ty in 0..ny {
                let sy = ty as i64 - dy as i64;
                let sy = if sy < 0 || sy >= ny as i64 {
                    if !py {
                        continue;
                    }
                    (sy + ny as i64) % ny as i64
                } else {
                    sy
                } as usize;
                let trow = nx * (ty + ny * tz);
                let srow = nx * (sy + ny * sz);
                match dx {
                    0 => out[trow..trow + nx].copy_from_slice(&src[srow..srow + nx]),
                    1 => {
                        out[trow + 1..trow + nx].copy_from_slice(&src[srow..srow + nx - 1]);
                        if px {
                            out[trow] = src[srow + nx - 1];
                        }
                    }
                    _ => {
                        out[trow..trow + nx - 1].copy_from_slice(&src[srow + 1..srow + nx]);
                        if px {
                            out[trow + nx - 1] = src[srow];
                        }
                    }
                }
            }
        }
    });
}

/// Half-way bounce back on every resting wall face: populations that would
/// stream out of the fluid return reversed at their own node, placing the
/// wall mid-link.
pub fn apply_halfway_bounce_back(field: &mut PopulationField, bc: &BoundarySpec) {
    let (nx, ny, nz) = field.dims();
    let n = field.n;
    let faces = bc.faces;
    let (cur, next) = (&field.cur, &mut field.next);

    let mut bounce = |pred: &dyn Fn(usize, usize, usize) -> bool, axis: usize, side: i32| {
        for a in 0..Q {
            if DIRECTIONS[a][axis] != side {
                continue;
            }
            let opp = OPPOSITE[a];
            for z in 0..nz {
                for y in 0..ny {
                    for x in 0..nx {
                        if pred(x, y, z) {
                            let idx = x + nx * (y + ny * z);
                            next[opp * n + idx] = cur[a * n + idx];
                        }
                    }
                }
            }
        }
    };

    if matches!(faces[Face::XMin as usize], FaceCondition::WallRest) {
        bounce(&|x, _, _| x == 0, 0, -1);
    }
    if matches!(faces[Face::XMax as usize], FaceCondition::WallRest) {
        bounce(&move |x, _, _| x == nx - 1, 0, 1);
    }
    if matches!(faces[Face::YMin as usize], FaceCondition::WallRest) {
        bounce(&|_, y, _| y == 0, 1, -1);
    }
    if matches!(faces[Face::YMax as usize], FaceCondition::WallRest) {
        bounce(&move |_, y, _| y == ny - 1, 1, 1);
    }
    if matches!(faces[Face::ZMin as usize], FaceCondition::WallRest) {
        bounce(&|_, _, z| z == 0, 2, -1);
    }
    if matches!(faces[Face::ZMax as usize], FaceCondition::WallRest) {
        bounce(&move |_, _, z| z == nz - 1, 2, 1);
    }
}

/// The nine directions leaving through the +y face, paired with the
/// incoming opposites they feed.
const LID_OUTGOING: [usize; 9] = [3, 7, 8, 15, 17, 19, 20, 23, 24];

/// Momentum-augmented half-way bounce back for the +y-normal face sliding
/// along +x at `u_lid`. The edge links in the x-y plane pick up
/// `(cs2 - s^2) cs2 / (2 r^2 s^2) rho U`, the corner links
/// `cs2^2 / (4 r^2 s^2) rho U`, both signed by the x-orientation of the
/// incoming direction; the three links without x-component are plain
/// bounce back. The augmentation terms cancel in the mass balance for any
/// parameter choice.
///
/// Must run after [`apply_halfway_bounce_back`] so that edge- and
/// corner-adjacent lid links keep the lid treatment.
pub fn apply_moving_wall(
    field: &mut PopulationField,
    rho: &[f64],
    u_lid: f64,
    spec: &LatticeSpec,
) {
    let (nx, ny, nz) = field.dims();
    let n = field.n;
    let (r2, s2) = (spec.r * spec.r, spec.s * spec.s);
    let cs2 = spec.cs2;
    let edge = (cs2 - s2) * cs2 / (2.0 * r2 * s2);
    let corner = cs2 * cs2 / (4.0 * r2 * s2);
    // augmentation weight per incoming direction, times rho * U
    let weight = |incoming: usize| -> f64 {
        match incoming {
            9 => -edge,
            10 => edge,
            21 | 25 => corner,
            22 | 26 => -corner,
            _ => 0.0,
        }
    };
    let (cur, next) = (&field.cur, &mut field.next);
    let y = ny - 1;
    for a in LID_OUTGOING {
        let opp = OPPOSITE[a];
        let w = weight(opp);
        for z in 0..nz {
            for x in 0..nx {
                let idx = x + nx * (y + ny * z);
                next[opp * n + idx] = cur[a * n + idx] + w * rho[idx] * u_lid;
            }
        }
    }
}

/// How the body force enters the momentum update.
#[derive(Debug, Clone, PartialEq)]
pub enum ForceField {
    Uniform([f64; 3]),
    PerNode(Vec<[f64; 3]>),
}

impl ForceField {
    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        match self {
            ForceField::Uniform(f) => *f,
            ForceField::PerNode(v) => v[idx],
        }
    }
}

/// Per-node hydrodynamic fields derived from the populations.
#[derive(Debug, Clone)]
pub struct HydroFieldSet {
    pub rho: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub uz: Vec<f64>,
    pub grad_rho_x: Vec<f64>,
    pub grad_rho_y: Vec<f64>,
    pub grad_rho_z: Vec<f64>,
    pub force: ForceField,
}

impl HydroFieldSet {
    pub fn new(n: usize, force: ForceField) -> Self {
        HydroFieldSet {
            rho: vec![1.0; n],
            ux: vec![0.0; n],
            uy: vec![0.0; n],
            uz: vec![0.0; n],
            grad_rho_x: vec![0.0; n],
            grad_rho_y: vec![0.0; n],
            grad_rho_z: vec![0.0; n],
            force,
        }
    }

    pub fn bytes(&self) -> usize {
        let per_node = self.rho.len() * std::mem::size_of::<f64>();
        let force = match &self.force {
            ForceField::Uniform(_) => std::mem::size_of::<[f64; 3]>(),
            ForceField::PerNode(v) => v.len() * std::mem::size_of::<[f64; 3]>(),
        };
        7 * per_node + force
    }
}

/// Density and velocity from the streamed populations: `rho = sum f_a`,
/// `rho u = sum f_a e_a + F dt / 2` with the cuboid velocities.
pub fn update_hydrodynamics(
    field: &PopulationField,
    spec: &LatticeSpec,
    hydro: &mut HydroFieldSet,
    step: u64,
) -> Result<()> {
    let n = field.n;
    let cur = &field.cur;
    let (r, s) = (spec.r, spec.s);
    let force = hydro.force.clone();
    let bad = std::sync::atomic::AtomicUsize::new(usize::MAX);

    (
        hydro.rho.par_chunks_mut(4096),
        hydro.ux.par_chunks_mut(4096),
        hydro.uy.par_chunks_mut(4096),
        hydro.uz.par_chunks_mut(4096),
    )
        .into_par_iter()
        .enumerate()
        .for_each(|(chunk, (rho_c, ux_c, uy_c, uz_c))| {
            let base = chunk * 4096;
            for i in 0..rho_c.len() {
                let idx = base + i;
                let mut density = 0.0;
                let mut mx = 0.0;
                let mut my = 0.0;
                let mut mz = 0.0;
                for a in 0..Q {
                    let f = cur[a * n + idx];
                    density += f;
                    let [dx, dy, dz] = DIRECTIONS[a];
                    mx += f * dx as f64;
                    my += f * dy as f64;
                    mz += f * dz as f64;
                }
                my *= r;
                mz *= s;
                if !(density > 0.0) || !density.is_finite() {
                    bad.store(idx, std::sync::atomic::Ordering::Relaxed);
                    return;
                }
                let f = force.at(idx);
                rho_c[i] = density;
                ux_c[i] = (mx + 0.5 * f[0]) / density;
                uy_c[i] = (my + 0.5 * f[1]) / density;
                uz_c[i] = (mz + 0.5 * f[2]) / density;
            }
        });

    let idx = bad.load(std::sync::atomic::Ordering::Relaxed);
    if idx != usize::MAX {
        let mut rho = 0.0;
        for a in 0..Q {
            rho += cur[a * n + idx];
        }
        return Err(Error::NonPositiveDensity {
            rho,
            node: idx,
            step,
        });
    }
    Ok(())
}

/// Second-order density gradient with physical spacings `(1, r, s)`:
/// central differences in the interior and across periodic wraps,
/// one-sided second-order stencils at walls.
pub fn density_gradient(
    rho: &[f64],
    dims: (usize, usize, usize),
    spec: &LatticeSpec,
    bc: &BoundarySpec,
    gx: &mut [f64],
    gy: &mut [f64],
    gz: &mut [f64],
) {
    let (nx, ny, nz) = dims;
    let periodic = [
        bc.is_periodic_axis(0),
        bc.is_periodic_axis(1),
        bc.is_periodic_axis(2),
    ];
    let inv2h = [0.5, 0.5 / spec.r, 0.5 / spec.s];

    // one-dimensional second-order difference along `axis` at position i,
    // with stride and extent of that axis
    #[inline]
    fn diff(
        rho: &[f64],
        base: usize,
        i: usize,
        extent: usize,
        stride: usize,
        periodic: bool,
        inv2h: f64,
    ) -> f64 {
        let at = |j: usize| rho[base + j * stride];
        if periodic {
            let prev = if i == 0 { extent - 1 } else { i - 1 };
            let nxt = if i + 1 == extent { 0 } else { i + 1 };
            (at(nxt) - at(prev)) * inv2h
        } else if i == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h
        } else if i + 1 == extent {
            (3.0 * at(extent - 1) - 4.0 * at(extent - 2) + at(extent - 3)) * inv2h
        } else {
            (at(i + 1) - at(i - 1)) * inv2h
        }
    }

    let plane = nx * ny;
    (
        gx.par_chunks_mut(plane),
        gy.par_chunks_mut(plane),
        gz.par_chunks_mut(plane),
    )
        .into_par_iter()
        .enumerate()
        .for_each(|(z, (gx_p, gy_p, gz_p))| {
            for y in 0..ny {
                for x in 0..nx {
                    let i = x + nx * y;
                    let idx = i + plane * z;
                    gx_p[i] = diff(rho, idx - x, x, nx, 1, periodic[0], inv2h[0]);
                    gy_p[i] = diff(rho, idx - y * nx, y, ny, nx, periodic[1], inv2h[1]);
                    gz_p[i] = diff(rho, idx - z * plane, z, nz, plane, periodic[2], inv2h[2]);
                }
            }
        });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    #[test]
    fn stream_advects_one_node() {
        let mut field = PopulationField::new(4, 3, 3);
        let idx = field.idx(1, 1, 1);
        field.dir_mut(1)[idx] = 1.0; // direction (1, 0, 0)
        stream(&mut field, &BoundarySpec::fully_periodic());
        field.swap_buffers();
        assert_eq!(field.dir(1)[field.idx(2, 1, 1)], 1.0);
        assert_eq!(field.dir(1)[idx], 0.0);
    }

    #[test]
    fn periodic_streaming_is_a_permutation() {
        let mut field = PopulationField::new(3, 4, 5);
        for a in 0..Q {
            for (i, v) in field.dir_mut(a).iter_mut().enumerate() {
                // power-of-two scale keeps the checksum exact
                *v = (a * 61 + i) as f64 * 0.015625;
            }
        }
        let before: f64 = field.current().iter().sum();
        stream(&mut field, &BoundarySpec::fully_periodic());
        field.swap_buffers();
        let after: f64 = field.current().iter().sum();
        assert_eq!(before, after);
    }

    #[test]
    fn uniform_field_is_stream_fixed_point() {
        let mut field = PopulationField::new(3, 3, 3);
        for a in 0..Q {
            field.dir_mut(a).fill(0.3 + a as f64);
        }
        let before = field.current().to_vec();
        stream(&mut field, &BoundarySpec::fully_periodic());
        field.swap_buffers();
        assert_eq!(field.current(), &before[..]);
    }

    #[test]
    fn wall_population_returns_reversed() {
        let mut field = PopulationField::new(3, 3, 3);
        let top = field.idx(1, 2, 1);
        field.dir_mut(3)[top] = 0.7; // (0, +1, 0) into the y-max wall
        let bc = BoundarySpec::duct();
        stream(&mut field, &bc);
        apply_halfway_bounce_back(&mut field, &bc);
        field.swap_buffers();
        assert_eq!(field.dir(4)[top], 0.7); // reversed at the same node
    }

    #[test]
    fn moving_wall_with_zero_speed_equals_plain_bounce_back() {
        let spec = build_lattice(0.5, 1.0, None).unwrap();
        let mut field = PopulationField::new(3, 3, 3);
        for a in 0..Q {
            for (i, v) in field.dir_mut(a).iter_mut().enumerate() {
                *v = 0.1 + (a as f64) * 0.01 + (i as f64) * 1e-3;
            }
        }
        let rho = vec![1.0; field.n_nodes()];
        let mut plain = field.clone();
        let bc = BoundarySpec::duct();
        apply_halfway_bounce_back(&mut plain, &bc);
        apply_moving_wall(&mut field, &rho, 0.0, &spec);

        let (nx, ny, nz) = field.dims();
        for z in 0..nz {
            for x in 0..nx {
                let idx = x + nx * ((ny - 1) + ny * z);
                for a in LID_OUTGOING {
                    let opp = OPPOSITE[a];
                    let i = opp * field.n_nodes() + idx;
                    assert_eq!(field.next_buffer()[i], plain.next_buffer()[i]);
                }
            }
        }
    }

    #[test]
    fn moving_wall_cubic_coefficients() {
        // r = s = 1, cs2 = 1/3: corner augmentation U/36, edge U/9
        let spec = build_lattice(1.0, 1.0, None).unwrap();
        let mut field = PopulationField::new(1, 2, 1);
        let u = 0.06;
        let rho = vec![1.0; 2];
        apply_moving_wall(&mut field, &rho, u, &spec);
        let idx = field.idx(0, 1, 0);
        let n = field.n_nodes();
        let get = |a: usize| field.next_buffer()[a * n + idx];
        assert!((get(21) - u / 36.0).abs() < 1e-16); // from ftilde_24 = 0
        assert!((get(9) - u / 9.0).abs() < 1e-16); // from ftilde_8 = 0
        assert!((get(22) + u / 36.0).abs() < 1e-16);
        assert_eq!(get(4), 0.0);
    }

    #[test]
    fn moving_wall_augmentation_is_mass_neutral() {
        for (r, s, cs2, rho, u) in [
            (0.5, 1.0, 0.08, 1.1, 0.2),
            (0.33, 0.75, 0.03, 0.9, -0.4),
            (1.3, 0.406, 0.05, 1.0, 1.7),
        ] {
            let spec = build_lattice(r, s, Some(cs2)).unwrap();
            let mut field = PopulationField::new(1, 2, 1);
            let rho_field = vec![rho; 2];
            apply_moving_wall(&mut field, &rho_field, u, &spec);
            let idx = field.idx(0, 1, 0);
            let n = field.n_nodes();
            let sum: f64 = (0..Q).map(|a| field.next_buffer()[a * n + idx]).sum();
            assert!(sum.abs() < 1e-15, "({r},{s}): residual {sum:.2e}");
        }
    }

    #[test]
    fn hydrodynamics_reads_cuboid_velocities_and_half_force() {
        let spec = build_lattice(0.5, 1.0, None).unwrap();
        let mut field = PopulationField::new(2, 2, 2);
        field.dir_mut(3).fill(1.0); // single population along (0, +r, 0)
        let mut hydro = HydroFieldSet::new(8, ForceField::Uniform([0.0; 3]));
        update_hydrodynamics(&field, &spec, &mut hydro, 0).unwrap();
        assert_eq!(hydro.rho[0], 1.0);
        assert_eq!(hydro.uy[0], 0.5);
        assert_eq!(hydro.ux[0], 0.0);

        // equilibrium at rest with a force picks up the half-force velocity
        let cubic = build_lattice(1.0, 1.0, None).unwrap();
        let eq = crate::collision::raw_equilibria(
            1.0,
            crate::central_moments::FrameVelocity::default(),
            cubic.cs2,
        );
        let f = crate::lattice::raw_to_distributions(&eq);
        let mut field = PopulationField::new(1, 1, 1);
        for a in 0..Q {
            field.dir_mut(a)[0] = f[a];
        }
        let mut hydro = HydroFieldSet::new(1, ForceField::Uniform([1e-5, 0.0, 0.0]));
        update_hydrodynamics(&field, &cubic, &mut hydro, 0).unwrap();
        assert!((hydro.ux[0] - 5e-6).abs() < 1e-18);
    }

    #[test]
    fn nonpositive_density_is_an_error() {
        let spec = build_lattice(1.0, 1.0, None).unwrap();
        let field = PopulationField::new(2, 1, 1); // all-zero populations
        let mut hydro = HydroFieldSet::new(2, ForceField::Uniform([0.0; 3]));
        assert!(matches!(
            update_hydrodynamics(&field, &spec, &mut hydro, 3),
            Err(Error::NonPositiveDensity { .. })
        ));
    }

    #[test]
    fn gradient_exact_on_linear_fields() {
        let spec = build_lattice(0.5, 1.0, None).unwrap();
        let (nx, ny, nz) = (4, 6, 5);
        let bc = BoundarySpec::duct();
        let eps = 1e-3;
        let mut rho = vec![0.0; nx * ny * nz];
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    rho[x + nx * (y + ny * z)] = 1.0 + eps * (y as f64 * spec.r);
                }
            }
        }
        let mut gx = vec![0.0; rho.len()];
        let mut gy = vec![0.0; rho.len()];
        let mut gz = vec![0.0; rho.len()];
        density_gradient(&rho, (nx, ny, nz), &spec, &bc, &mut gx, &mut gy, &mut gz);
        for (i, g) in gy.iter().enumerate() {
            assert!((g - eps).abs() < 1e-12, "node {i}: {g}");
        }
        assert!(gx.iter().all(|g| g.abs() < 1e-12));
        assert!(gz.iter().all(|g| g.abs() < 1e-12));
    }

    #[test]
    fn gradient_converges_at_second_order() {
        let spec = build_lattice(1.0, 1.0, None).unwrap();
        let bc = BoundarySpec::fully_periodic();
        let mut errors = Vec::new();
        for ny in [16usize, 32] {
            let nx = 2;
            let nz = 2;
            let l = ny as f64;
            let mut rho = vec![0.0; nx * ny * nz];
            for z in 0..nz {
                for y in 0..ny {
                    for x in 0..nx {
                        rho[x + nx * (y + ny * z)] =
                            1.0 + 1e-3 * (2.0 * std::f64::consts::PI * y as f64 / l).sin();
                    }
                }
            }
            let mut gx = vec![0.0; rho.len()];
            let mut gy = vec![0.0; rho.len()];
            let mut gz = vec![0.0; rho.len()];
            density_gradient(&rho, (nx, ny, nz), &spec, &bc, &mut gx, &mut gy, &mut gz);
            let mut max_err: f64 = 0.0;
            for y in 0..ny {
                let exact = 1e-3 * 2.0 * std::f64::consts::PI / l
                    * (2.0 * std::f64::consts::PI * y as f64 / l).cos();
                max_err = max_err.max((gy[nx * y] - exact).abs());
            }
            errors.push(max_err);
        }
        let order = (errors[0] / errors[1]).log2();
        assert!(order > 1.8, "observed order {order:.2}");
    }

    #[test]
    fn boundary_spec_validation() {
        let mut bc = BoundarySpec::duct();
        bc.faces[Face::XMax as usize] = FaceCondition::WallRest;
        assert!(bc.validate().is_err());

        let mut bc = BoundarySpec::duct();
        bc.faces[Face::ZMin as usize] = FaceCondition::WallMoving { u_lid: 0.1 };
        assert!(bc.validate().is_err());

        assert!(BoundarySpec::lid_driven_cavity(0.1).validate().is_ok());
    }
}
