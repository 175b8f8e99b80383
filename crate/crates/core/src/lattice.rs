//! D3Q27 cuboid velocity set, the canonical bare-moment ordering, and the
//! linear maps that bracket collision: distribution functions to and from
//! cubic-basis raw moments (`P`, `P^-1`) and the diagonal grid-aspect-ratio
//! scalings (`S`, `S^-1`).
//!
//! Directions are frozen to the ordering below: index 0 is the rest
//! population, 1..=6 the face neighbours, 7..=18 the edge neighbours and
//! 19..=26 the corner neighbours. Every mapping in this module and every
//! unrolled formula downstream assumes that ordering.

use crate::error::Error;
use crate::Result;

/// Number of discrete velocities.
pub const Q: usize = 27;

/// Index offsets of the 27 directions; components are drawn from {0, +1, -1}.
/// The physical velocity components follow by scaling y by `r` and z by `s`.
pub const DIRECTIONS: [[i32; 3]; Q] = [
    [0, 0, 0],
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
    [1, 1, 0],
    [-1, 1, 0],
    [1, -1, 0],
    [-1, -1, 0],
    [1, 0, 1],
    [-1, 0, 1],
    [1, 0, -1],
    [-1, 0, -1],
    [0, 1, 1],
    [0, -1, 1],
    [0, 1, -1],
    [0, -1, -1],
    [1, 1, 1],
    [-1, 1, 1],
    [1, -1, 1],
    [-1, -1, 1],
    [1, 1, -1],
    [-1, 1, -1],
    [1, -1, -1],
    [-1, -1, -1],
];

/// `OPPOSITE[a]` is the direction with the negated velocity of `a`.
pub const OPPOSITE: [usize; Q] = [
    0, 2, 1, 4, 3, 6, 5, 10, 9, 8, 7, 14, 13, 12, 11, 18, 17, 16, 15, 26, 25, 24, 23, 22, 21, 20,
    19,
];

/// Exponents `(m, n, p)` of each bare moment `k_mnp` in the canonical
/// ordering; also the source of the scaling factors `r^n s^p`.
pub const MOMENT_EXPONENTS: [[u32; 3]; Q] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
    [2, 0, 0],
    [0, 2, 0],
    [0, 0, 2],
    [1, 2, 0],
    [1, 0, 2],
    [2, 1, 0],
    [0, 1, 2],
    [2, 0, 1],
    [0, 2, 1],
    [1, 1, 1],
    [2, 2, 0],
    [2, 0, 2],
    [0, 2, 2],
    [2, 1, 1],
    [1, 2, 1],
    [1, 1, 2],
    [1, 2, 2],
    [2, 1, 2],
    [2, 2, 1],
    [2, 2, 2],
];

// Moment indices in the canonical ordering, named after the exponents.
pub const K000: usize = 0;
pub const K100: usize = 1;
pub const K010: usize = 2;
pub const K001: usize = 3;
pub const K110: usize = 4;
pub const K101: usize = 5;
pub const K011: usize = 6;
pub const K200: usize = 7;
pub const K020: usize = 8;
pub const K002: usize = 9;
pub const K120: usize = 10;
pub const K102: usize = 11;
pub const K210: usize = 12;
pub const K012: usize = 13;
pub const K201: usize = 14;
pub const K021: usize = 15;
pub const K111: usize = 16;
pub const K220: usize = 17;
pub const K202: usize = 18;
pub const K022: usize = 19;
pub const K211: usize = 20;
pub const K121: usize = 21;
pub const K112: usize = 22;
pub const K122: usize = 23;
pub const K212: usize = 24;
pub const K221: usize = 25;
pub const K222: usize = 26;

/// Which frame a [`MomentVector`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Moments weighted by the bare particle velocities.
    Raw,
    /// Moments weighted by the velocities shifted into the local fluid frame.
    Central,
}

/// A 27-vector of bare moments in the canonical ordering, tagged with the
/// frame it was produced in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentVector {
    pub k: [f64; Q],
    pub frame: Frame,
}

impl MomentVector {
    pub fn zeros(frame: Frame) -> Self {
        MomentVector {
            k: [0.0; Q],
            frame,
        }
    }
}

/// Geometry and parameters of the cuboid D3Q27 lattice.
///
/// `r = dy/dx` and `s = dz/dx` are the grid aspect ratios; `cs2` is the
/// squared lattice sound speed, which must stay below the squared particle
/// speed of every axis, i.e. `0 < cs2 < min(1, r^2, s^2)`.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    pub r: f64,
    pub s: f64,
    pub cs2: f64,
    /// Physical velocity triples `(e_x, e_y, e_z)`, y/z components carrying
    /// the factors `r` and `s`.
    pub velocities: [[f64; 3]; Q],
    pub opposite: [usize; Q],
    scale: [f64; Q],
    scale_inv: [f64; Q],
}

impl LatticeSpec {
    /// Forward scaling factors `r^n s^p` per moment.
    pub fn scale_factors(&self) -> &[f64; Q] {
        &self.scale
    }

    /// Inverse scaling factors `r^-n s^-p` per moment.
    pub fn scale_factors_inv(&self) -> &[f64; Q] {
        &self.scale_inv
    }
}

/// Builds the lattice for aspect ratios `(r, s)`. With `cs2 = None` the
/// sound speed defaults to `cs2 = min(r^2, s^2) / 3`, the optimal choice
/// that degenerates to 1/3 on the cubic lattice.
pub fn build_lattice(r: f64, s: f64, cs2: Option<f64>) -> Result<LatticeSpec> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "grid aspect ratio r must satisfy r > 0, got {r}"
        )));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "grid aspect ratio s must satisfy s > 0, got {s}"
        )));
    }
    let cs2 = cs2.unwrap_or_else(|| (r * r).min(s * s) / 3.0);
    let cs2_max = 1.0f64.min(r * r).min(s * s);
    if !(cs2 > 0.0 && cs2 < cs2_max) {
        return Err(Error::InvalidParameter(format!(
            "sound speed must satisfy 0 < cs2 < min(1, r^2, s^2) = {cs2_max}, got {cs2}"
        )));
    }

    let mut velocities = [[0.0; 3]; Q];
    for (a, d) in DIRECTIONS.iter().enumerate() {
        velocities[a] = [d[0] as f64, r * d[1] as f64, s * d[2] as f64];
    }
    let mut scale = [1.0; Q];
    let mut scale_inv = [1.0; Q];
    for (i, [_, n, p]) in MOMENT_EXPONENTS.iter().enumerate() {
        scale[i] = r.powi(*n as i32) * s.powi(*p as i32);
        scale_inv[i] = 1.0 / scale[i];
    }
    Ok(LatticeSpec {
        r,
        s,
        cs2,
        velocities,
        opposite: OPPOSITE,
        scale,
        scale_inv,
    })
}

/// Maps distribution functions to raw moments of the **cubic** basis,
/// i.e. `m = P f` with the unit-velocity monomials as weights.
pub fn distributions_to_raw_cubic(f: &[f64; Q]) -> MomentVector {
    let mut k = [0.0; Q];
    k[K000] = f[0] + f[1] + f[2] + f[3] + f[4] + f[5] + f[6] + f[7] + f[8] + f[9] + f[10] + f[11] + f[12] + f[13] + f[14] + f[15] + f[16] + f[17] + f[18] + f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    k[K100] = f[1] - f[2] + f[7] - f[8] + f[9] - f[10] + f[11] - f[12] + f[13] - f[14] + f[19] - f[20] + f[21] - f[22] + f[23] - f[24] + f[25] - f[26];
    k[K010] = f[3] - f[4] + f[7] + f[8] - f[9] - f[10] + f[15] - f[16] + f[17] - f[18] + f[19] + f[20] - f[21] - f[22] + f[23] + f[24] - f[25] - f[26];
    k[K001] = f[5] - f[6] + f[11] + f[12] - f[13] - f[14] + f[15] + f[16] - f[17] - f[18] + f[19] + f[20] + f[21] + f[22] - f[23] - f[24] - f[25] - f[26];
    k[K110] = f[7] - f[8] - f[9] + f[10] + f[19] - f[20] - f[21] + f[22] + f[23] - f[24] - f[25] + f[26];
    k[K101] = f[11] - f[12] - f[13] + f[14] + f[19] - f[20] + f[21] - f[22] - f[23] + f[24] - f[25] + f[26];
    k[K011] = f[15] - f[16] - f[17] + f[18] + f[19] + f[20] - f[21] - f[22] - f[23] - f[24] + f[25] + f[26];
    k[K200] = f[1] + f[2] + f[7] + f[8] + f[9] + f[10] + f[11] + f[12] + f[13] + f[14] + f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    k[K020] = f[3] + f[4] + f[7] + f[8] + f[9] + f[10] + f[15] + f[16] + f[17] + f[18] + f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    k[K002] = f[5] + f[6] + f[11] + f[12] + f[13] + f[14] + f[15] + f[16] + f[17] + f[18] + f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    k[K120] = f[7] - f[8] + f[9] - f[10] + f[19] - f[20] + f[21] - f[22] + f[23] - f[24] + f[25] - f[26];
    k[K102] = f[11] - f[12] + f[13] - f[14] + f[19] - f[20] + f[21] - f[22] + f[23] - f[24] + f[25] - f[26];
    k[K210] = f[7] + f[8] - f[9] - f[10] + f[19] + f[20] - f[21] - f[22] + f[23] + f[24] - f[25] - f[26];
    k[K012] = f[15] - f[16] + f[17] - f[18] + f[19] + f[20] - f[21] - f[22] + f[23] + f[24] - f[25] - f[26];
    k[K201] = f[11] + f[12] - f[13] - f[14] + f[19] + f[20] + f[21] + f[22] - f[23] - f[24] - f[25] - f[26];
    k[K021] = f[15] + f[16] - f[17] - f[18] + f[19] + f[20] + f[21] + f[22] - f[23] - f[24] - f[25] - f[26];
    k[K111] = f[19] - f[20] - f[21] + f[22] - f[23] + f[24] + f[25] - f[26];
    k[K220] = f[7] + f[8] + f[9] + f[10] + f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    k[K202] = f[11] + f[12] + f[13] + f[14] + f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    k[K022] = f[15] + f[16] + f[17] + f[18] + f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    k[K211] = f[19] + f[20] - f[21] - f[22] - f[23] - f[24] + f[25] + f[26];
    k[K121] = f[19] - f[20] + f[21] - f[22] - f[23] + f[24] - f[25] + f[26];
    k[K112] = f[19] - f[20] - f[21] + f[22] + f[23] - f[24] - f[25] + f[26];
    k[K122] = f[19] - f[20] + f[21] - f[22] + f[23] - f[24] + f[25] - f[26];
    k[K212] = f[19] + f[20] - f[21] - f[22] + f[23] + f[24] - f[25] - f[26];
    k[K221] = f[19] + f[20] + f[21] + f[22] - f[23] - f[24] - f[25] - f[26];
    k[K222] = f[19] + f[20] + f[21] + f[22] + f[23] + f[24] + f[25] + f[26];
    MomentVector { k, frame: Frame::Raw }
}

/// Maps cubic-basis raw moments back to distribution functions, `f = P^-1 m`.
/// The input must already be inverse-scaled to the cubic basis.
pub fn raw_to_distributions(m: &MomentVector) -> [f64; Q] {
    debug_assert_eq!(m.frame, Frame::Raw);
    let k = &m.k;
    let mut f = [0.0; Q];
    f[0] = k[K000] - k[K200] - k[K020] - k[K002] + k[K220] + k[K202] + k[K022] - k[K222];
    f[1] = 0.5 * (k[K100] + k[K200] - k[K120] - k[K102] - k[K220] - k[K202] + k[K122] + k[K222]);
    f[2] = 0.5 * (-k[K100] + k[K200] + k[K120] + k[K102] - k[K220] - k[K202] - k[K122] + k[K222]);
    f[3] = 0.5 * (k[K010] + k[K020] - k[K210] - k[K012] - k[K220] - k[K022] + k[K212] + k[K222]);
    f[4] = 0.5 * (-k[K010] + k[K020] + k[K210] + k[K012] - k[K220] - k[K022] - k[K212] + k[K222]);
    f[5] = 0.5 * (k[K001] + k[K002] - k[K201] - k[K021] - k[K202] - k[K022] + k[K221] + k[K222]);
    f[6] = 0.5 * (-k[K001] + k[K002] + k[K201] + k[K021] - k[K202] - k[K022] - k[K221] + k[K222]);
    f[7] = 0.25 * (k[K110] + k[K120] + k[K210] + k[K220] - k[K112] - k[K122] - k[K212] - k[K222]);
    f[8] = 0.25 * (-k[K110] - k[K120] + k[K210] + k[K220] + k[K112] + k[K122] - k[K212] - k[K222]);
    f[9] = 0.25 * (-k[K110] + k[K120] - k[K210] + k[K220] + k[K112] - k[K122] + k[K212] - k[K222]);
    f[10] = 0.25 * (k[K110] - k[K120] - k[K210] + k[K220] - k[K112] + k[K122] + k[K212] - k[K222]);
    f[11] = 0.25 * (k[K101] + k[K102] + k[K201] + k[K202] - k[K121] - k[K122] - k[K221] - k[K222]);
    f[12] = 0.25 * (-k[K101] - k[K102] + k[K201] + k[K202] + k[K121] + k[K122] - k[K221] - k[K222]);
    f[13] = 0.25 * (-k[K101] + k[K102] - k[K201] + k[K202] + k[K121] - k[K122] + k[K221] - k[K222]);
    f[14] = 0.25 * (k[K101] - k[K102] - k[K201] + k[K202] - k[K121] + k[K122] + k[K221] - k[K222]);
    f[15] = 0.25 * (k[K011] + k[K012] + k[K021] + k[K022] - k[K211] - k[K212] - k[K221] - k[K222]);
    f[16] = 0.25 * (-k[K011] - k[K012] + k[K021] + k[K022] + k[K211] + k[K212] - k[K221] - k[K222]);
    f[17] = 0.25 * (-k[K011] + k[K012] - k[K021] + k[K022] + k[K211] - k[K212] + k[K221] - k[K222]);
    f[18] = 0.25 * (k[K011] - k[K012] - k[K021] + k[K022] - k[K211] + k[K212] + k[K221] - k[K222]);
    f[19] = 0.125 * (k[K111] + k[K211] + k[K121] + k[K112] + k[K122] + k[K212] + k[K221] + k[K222]);
    f[20] = 0.125 * (-k[K111] + k[K211] - k[K121] - k[K112] - k[K122] + k[K212] + k[K221] + k[K222]);
    f[21] = 0.125 * (-k[K111] - k[K211] + k[K121] - k[K112] + k[K122] - k[K212] + k[K221] + k[K222]);
    f[22] = 0.125 * (k[K111] - k[K211] - k[K121] + k[K112] - k[K122] - k[K212] + k[K221] + k[K222]);
    f[23] = 0.125 * (-k[K111] - k[K211] - k[K121] + k[K112] + k[K122] + k[K212] - k[K221] + k[K222]);
    f[24] = 0.125 * (k[K111] - k[K211] + k[K121] - k[K112] - k[K122] + k[K212] - k[K221] + k[K222]);
    f[25] = 0.125 * (k[K111] + k[K211] - k[K121] - k[K112] + k[K122] - k[K212] - k[K221] + k[K222]);
    f[26] = 0.125 * (-k[K111] + k[K211] + k[K121] + k[K112] - k[K122] - k[K212] - k[K221] + k[K222]);
    f
}

/// Applies the diagonal scaling `S` (forward) or `S^-1` (inverse): the
/// component of order `(m, n, p)` is multiplied or divided by `r^n s^p`.
/// Forward turns cubic-basis raw moments into cuboid raw moments.
pub fn scale_raw(m: &MomentVector, spec: &LatticeSpec, forward: bool) -> MomentVector {
    debug_assert_eq!(m.frame, Frame::Raw);
    let factors = if forward {
        &spec.scale
    } else {
        &spec.scale_inv
    };
    let mut k = [0.0; Q];
    for i in 0..Q {
        k[i] = m.k[i] * factors[i];
    }
    MomentVector { k, frame: Frame::Raw }
}
