//! Frame transformations between raw and central moments: the binomial
//! shift by the local fluid velocity and its inverse, obtained by negating
//! the velocity components.
//!
//! The expression lists below are the unrolled binomial expansions; the
//! dense-matrix form of the transform exists only as a test oracle.

use crate::lattice::{Frame, MomentVector, Q};
use crate::lattice::{
    K000, K001, K002, K010, K011, K012, K020, K021, K022, K100, K101, K102, K110, K111, K112,
    K120, K121, K122, K200, K201, K202, K210, K211, K212, K220, K221, K222,
};

/// Local fluid velocity defining the moving frame (lattice units).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVelocity {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FrameVelocity {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        FrameVelocity { x, y, z }
    }

    pub fn magnitude(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Shifts raw (cuboid-scaled) moments into the frame moving with `u`.
pub fn raw_to_central(m: &MomentVector, u: FrameVelocity) -> MomentVector {
    debug_assert_eq!(m.frame, Frame::Raw);
    let k = &m.k;
    let (ux, uy, uz) = (u.x, u.y, u.z);
    let (ux2, uy2, uz2) = (ux * ux, uy * uy, uz * uz);
    let mut c = [0.0; Q];
    c[K000] = k[K000];
    c[K100] = k[K100] - ux * k[K000];
    c[K010] = k[K010] - uy * k[K000];
    c[K001] = k[K001] - uz * k[K000];
    c[K110] = k[K110] - ux * k[K010] - uy * k[K100] + ux * uy * k[K000];
    c[K101] = k[K101] - ux * k[K001] - uz * k[K100] + ux * uz * k[K000];
    c[K011] = k[K011] - uy * k[K001] - uz * k[K010] + uy * uz * k[K000];
    c[K200] = k[K200] - 2.0 * ux * k[K100] + ux2 * k[K000];
    c[K020] = k[K020] - 2.0 * uy * k[K010] + uy2 * k[K000];
    c[K002] = k[K002] - 2.0 * uz * k[K001] + uz2 * k[K000];
    c[K120] = k[K120] - ux * k[K020] - 2.0 * uy * k[K110] + 2.0 * ux * uy * k[K010] + uy2 * k[K100] - ux * uy2 * k[K000];
    c[K102] = k[K102] - ux * k[K002] - 2.0 * uz * k[K101] + 2.0 * ux * uz * k[K001] + uz2 * k[K100] - ux * uz2 * k[K000];
    c[K210] = k[K210] - uy * k[K200] - 2.0 * ux * k[K110] + ux2 * k[K010] + 2.0 * ux * uy * k[K100] - ux2 * uy * k[K000];
    c[K012] = k[K012] - uy * k[K002] - 2.0 * uz * k[K011] + 2.0 * uy * uz * k[K001] + uz2 * k[K010] - uy * uz2 * k[K000];
    c[K201] = k[K201] - uz * k[K200] - 2.0 * ux * k[K101] + ux2 * k[K001] + 2.0 * ux * uz * k[K100] - ux2 * uz * k[K000];
    c[K021] = k[K021] - uz * k[K020] - 2.0 * uy * k[K011] + uy2 * k[K001] + 2.0 * uy * uz * k[K010] - uy2 * uz * k[K000];
    c[K111] = k[K111] - ux * k[K011] - uy * k[K101] - uz * k[K110] + ux * uy * k[K001] + ux * uz * k[K010] + uy * uz * k[K100] - ux * uy * uz * k[K000];
    c[K220] = k[K220] - 2.0 * uy * k[K210] - 2.0 * ux * k[K120] + ux2 * k[K020] + uy2 * k[K200] + 4.0 * ux * uy * k[K110] - 2.0 * ux2 * uy * k[K010] - 2.0 * ux * uy2 * k[K100] + ux2 * uy2 * k[K000];
    c[K202] = k[K202] - 2.0 * uz * k[K201] - 2.0 * ux * k[K102] + ux2 * k[K002] + uz2 * k[K200] + 4.0 * ux * uz * k[K101] - 2.0 * ux2 * uz * k[K001] - 2.0 * ux * uz2 * k[K100] + ux2 * uz2 * k[K000];
    c[K022] = k[K022] - 2.0 * uz * k[K021] - 2.0 * uy * k[K012] + uy2 * k[K002] + uz2 * k[K020] + 4.0 * uy * uz * k[K011] - 2.0 * uy2 * uz * k[K001] - 2.0 * uy * uz2 * k[K010] + uy2 * uz2 * k[K000];
    c[K211] = k[K211] - 2.0 * ux * k[K111] - uy * k[K201] - uz * k[K210] + uy * uz * k[K200] + ux2 * k[K011] + 2.0 * ux * uy * k[K101] + 2.0 * ux * uz * k[K110] - ux2 * uy * k[K001] - ux2 * uz * k[K010] - 2.0 * ux * uy * uz * k[K100] + ux2 * uy * uz * k[K000];
    c[K121] = k[K121] - 2.0 * uy * k[K111] - ux * k[K021] - uz * k[K120] + ux * uz * k[K020] + 2.0 * ux * uy * k[K011] + uy2 * k[K101] + 2.0 * uy * uz * k[K110] - ux * uy2 * k[K001] - 2.0 * ux * uy * uz * k[K010] - uy2 * uz * k[K100] + ux * uy2 * uz * k[K000];
    c[K112] = k[K112] - 2.0 * uz * k[K111] - ux * k[K012] - uy * k[K102] + ux * uy * k[K002] + 2.0 * ux * uz * k[K011] + 2.0 * uy * uz * k[K101] + uz2 * k[K110] - 2.0 * ux * uy * uz * k[K001] - ux * uz2 * k[K010] - uy * uz2 * k[K100] + ux * uy * uz2 * k[K000];
    c[K122] = k[K122] - 2.0 * uy * k[K112] - 2.0 * uz * k[K121] - ux * k[K022] + 4.0 * uy * uz * k[K111] + 2.0 * ux * uz * k[K021] + 2.0 * ux * uy * k[K012] + uy2 * k[K102] + uz2 * k[K120] - ux * uy2 * k[K002] - ux * uz2 * k[K020] - 4.0 * ux * uy * uz * k[K011] - 2.0 * uy2 * uz * k[K101] - 2.0 * uy * uz2 * k[K110] + 2.0 * ux * uy2 * uz * k[K001] + 2.0 * ux * uy * uz2 * k[K010] + uy2 * uz2 * k[K100] - ux * uy2 * uz2 * k[K000];
    c[K212] = k[K212] - 2.0 * ux * k[K112] - 2.0 * uz * k[K211] - uy * k[K202] + 4.0 * ux * uz * k[K111] + 2.0 * uy * uz * k[K201] + ux2 * k[K012] + uz2 * k[K210] + 2.0 * ux * uy * k[K102] - ux2 * uy * k[K002] - uy * uz2 * k[K200] - 2.0 * ux2 * uz * k[K011] - 4.0 * ux * uy * uz * k[K101] - 2.0 * ux * uz2 * k[K110] + 2.0 * ux2 * uy * uz * k[K001] + ux2 * uz2 * k[K010] + 2.0 * ux * uy * uz2 * k[K100] - ux2 * uy * uz2 * k[K000];
    c[K221] = k[K221] - 2.0 * ux * k[K121] - 2.0 * uy * k[K211] - uz * k[K220] + 4.0 * ux * uy * k[K111] + ux2 * k[K021] + uy2 * k[K201] + 2.0 * uy * uz * k[K210] + 2.0 * ux * uz * k[K120] - ux2 * uz * k[K020] - uy2 * uz * k[K200] - 2.0 * ux2 * uy * k[K011] - 2.0 * ux * uy2 * k[K101] - 4.0 * ux * uy * uz * k[K110] + ux2 * uy2 * k[K001] + 2.0 * ux2 * uy * uz * k[K010] + 2.0 * ux * uy2 * uz * k[K100] - ux2 * uy2 * uz * k[K000];
    c[K222] = k[K222] - 2.0 * uz * k[K221] - 2.0 * uy * k[K212] - 2.0 * ux * k[K122] + 4.0 * ux * uy * k[K112] + 4.0 * ux * uz * k[K121] + 4.0 * uy * uz * k[K211] + ux2 * k[K022] + uy2 * k[K202] + uz2 * k[K220] - 8.0 * ux * uy * uz * k[K111] - 2.0 * ux2 * uz * k[K021] - 2.0 * uy2 * uz * k[K201] - 2.0 * ux2 * uy * k[K012] - 2.0 * uy * uz2 * k[K210] - 2.0 * ux * uy2 * k[K102] - 2.0 * ux * uz2 * k[K120] + ux2 * uy2 * k[K002] + ux2 * uz2 * k[K020] + uy2 * uz2 * k[K200] + 4.0 * ux2 * uy * uz * k[K011] + 4.0 * ux * uy2 * uz * k[K101] + 4.0 * ux * uy * uz2 * k[K110] - 2.0 * ux2 * uy2 * uz * k[K001] - 2.0 * ux2 * uy * uz2 * k[K010] - 2.0 * ux * uy2 * uz2 * k[K100] + ux2 * uy2 * uz2 * k[K000];
    MomentVector {
        k: c,
        frame: Frame::Central,
    }
}

/// Shifts central moments back to the rest frame; this is the same binomial
/// map evaluated at `-u`.
pub fn central_to_raw(mc: &MomentVector, u: FrameVelocity) -> MomentVector {
    debug_assert_eq!(mc.frame, Frame::Central);
    let q = &mc.k;
    let (ux, uy, uz) = (u.x, u.y, u.z);
    let (ux2, uy2, uz2) = (ux * ux, uy * uy, uz * uz);
    let mut k = [0.0; Q];
    k[K000] = q[K000];
    k[K100] = q[K100] + ux * q[K000];
    k[K010] = q[K010] + uy * q[K000];
    k[K001] = q[K001] + uz * q[K000];
    k[K110] = q[K110] + ux * q[K010] + uy * q[K100] + ux * uy * q[K000];
    k[K101] = q[K101] + ux * q[K001] + uz * q[K100] + ux * uz * q[K000];
    k[K011] = q[K011] + uy * q[K001] + uz * q[K010] + uy * uz * q[K000];
    k[K200] = q[K200] + 2.0 * ux * q[K100] + ux2 * q[K000];
    k[K020] = q[K020] + 2.0 * uy * q[K010] + uy2 * q[K000];
    k[K002] = q[K002] + 2.0 * uz * q[K001] + uz2 * q[K000];
    k[K120] = q[K120] + ux * q[K020] + 2.0 * uy * q[K110] + 2.0 * ux * uy * q[K010] + uy2 * q[K100] + ux * uy2 * q[K000];
    k[K102] = q[K102] + ux * q[K002] + 2.0 * uz * q[K101] + 2.0 * ux * uz * q[K001] + uz2 * q[K100] + ux * uz2 * q[K000];
    k[K210] = q[K210] + uy * q[K200] + 2.0 * ux * q[K110] + ux2 * q[K010] + 2.0 * ux * uy * q[K100] + ux2 * uy * q[K000];
    k[K012] = q[K012] + uy * q[K002] + 2.0 * uz * q[K011] + 2.0 * uy * uz * q[K001] + uz2 * q[K010] + uy * uz2 * q[K000];
    k[K201] = q[K201] + uz * q[K200] + 2.0 * ux * q[K101] + ux2 * q[K001] + 2.0 * ux * uz * q[K100] + ux2 * uz * q[K000];
    k[K021] = q[K021] + uz * q[K020] + 2.0 * uy * q[K011] + uy2 * q[K001] + 2.0 * uy * uz * q[K010] + uy2 * uz * q[K000];
    k[K111] = q[K111] + ux * q[K011] + uy * q[K101] + uz * q[K110] + ux * uy * q[K001] + ux * uz * q[K010] + uy * uz * q[K100] + ux * uy * uz * q[K000];
    k[K220] = q[K220] + 2.0 * uy * q[K210] + 2.0 * ux * q[K120] + ux2 * q[K020] + uy2 * q[K200] + 4.0 * ux * uy * q[K110] + 2.0 * ux2 * uy * q[K010] + 2.0 * ux * uy2 * q[K100] + ux2 * uy2 * q[K000];
    k[K202] = q[K202] + 2.0 * uz * q[K201] + 2.0 * ux * q[K102] + ux2 * q[K002] + uz2 * q[K200] + 4.0 * ux * uz * q[K101] + 2.0 * ux2 * uz * q[K001] + 2.0 * ux * uz2 * q[K100] + ux2 * uz2 * q[K000];
    k[K022] = q[K022] + 2.0 * uz * q[K021] + 2.0 * uy * q[K012] + uy2 * q[K002] + uz2 * q[K020] + 4.0 * uy * uz * q[K011] + 2.0 * uy2 * uz * q[K001] + 2.0 * uy * uz2 * q[K010] + uy2 * uz2 * q[K000];
    k[K211] = q[K211] + 2.0 * ux * q[K111] + uy * q[K201] + uz * q[K210] + uy * uz * q[K200] + ux2 * q[K011] + 2.0 * ux * uy * q[K101] + 2.0 * ux * uz * q[K110] + ux2 * uy * q[K001] + ux2 * uz * q[K010] + 2.0 * ux * uy * uz * q[K100] + ux2 * uy * uz * q[K000];
    k[K121] = q[K121] + 2.0 * uy * q[K111] + ux * q[K021] + uz * q[K120] + ux * uz * q[K020] + 2.0 * ux * uy * q[K011] + uy2 * q[K101] + 2.0 * uy * uz * q[K110] + ux * uy2 * q[K001] + 2.0 * ux * uy * uz * q[K010] + uy2 * uz * q[K100] + ux * uy2 * uz * q[K000];
    k[K112] = q[K112] + 2.0 * uz * q[K111] + ux * q[K012] + uy * q[K102] + ux * uy * q[K002] + 2.0 * ux * uz * q[K011] + 2.0 * uy * uz * q[K101] + uz2 * q[K110] + 2.0 * ux * uy * uz * q[K001] + ux * uz2 * q[K010] + uy * uz2 * q[K100] + ux * uy * uz2 * q[K000];
    k[K122] = q[K122] + 2.0 * uy * q[K112] + 2.0 * uz * q[K121] + ux * q[K022] + 4.0 * uy * uz * q[K111] + 2.0 * ux * uz * q[K021] + 2.0 * ux * uy * q[K012] + uy2 * q[K102] + uz2 * q[K120] + ux * uy2 * q[K002] + ux * uz2 * q[K020] + 4.0 * ux * uy * uz * q[K011] + 2.0 * uy2 * uz * q[K101] + 2.0 * uy * uz2 * q[K110] + 2.0 * ux * uy2 * uz * q[K001] + 2.0 * ux * uy * uz2 * q[K010] + uy2 * uz2 * q[K100] + ux * uy2 * uz2 * q[K000];
    k[K212] = q[K212] + 2.0 * ux * q[K112] + 2.0 * uz * q[K211] + uy * q[K202] + 4.0 * ux * uz * q[K111] + 2.0 * uy * uz * q[K201] + ux2 * q[K012] + uz2 * q[K210] + 2.0 * ux * uy * q[K102] + ux2 * uy * q[K002] + uy * uz2 * q[K200] + 2.0 * ux2 * uz * q[K011] + 4.0 * ux * uy * uz * q[K101] + 2.0 * ux * uz2 * q[K110] + 2.0 * ux2 * uy * uz * q[K001] + ux2 * uz2 * q[K010] + 2.0 * ux * uy * uz2 * q[K100] + ux2 * uy * uz2 * q[K000];
    k[K221] = q[K221] + 2.0 * ux * q[K121] + 2.0 * uy * q[K211] + uz * q[K220] + 4.0 * ux * uy * q[K111] + ux2 * q[K021] + uy2 * q[K201] + 2.0 * uy * uz * q[K210] + 2.0 * ux * uz * q[K120] + ux2 * uz * q[K020] + uy2 * uz * q[K200] + 2.0 * ux2 * uy * q[K011] + 2.0 * ux * uy2 * q[K101] + 4.0 * ux * uy * uz * q[K110] + ux2 * uy2 * q[K001] + 2.0 * ux2 * uy * uz * q[K010] + 2.0 * ux * uy2 * uz * q[K100] + ux2 * uy2 * uz * q[K000];
    k[K222] = q[K222] + 2.0 * uz * q[K221] + 2.0 * uy * q[K212] + 2.0 * ux * q[K122] + 4.0 * ux * uy * q[K112] + 4.0 * ux * uz * q[K121] + 4.0 * uy * uz * q[K211] + ux2 * q[K022] + uy2 * q[K202] + uz2 * q[K220] + 8.0 * ux * uy * uz * q[K111] + 2.0 * ux2 * uz * q[K021] + 2.0 * uy2 * uz * q[K201] + 2.0 * ux2 * uy * q[K012] + 2.0 * uy * uz2 * q[K210] + 2.0 * ux * uy2 * q[K102] + 2.0 * ux * uz2 * q[K120] + ux2 * uy2 * q[K002] + ux2 * uz2 * q[K020] + uy2 * uz2 * q[K200] + 4.0 * ux2 * uy * uz * q[K011] + 4.0 * ux * uy2 * uz * q[K101] + 4.0 * ux * uy * uz2 * q[K110] + 2.0 * ux2 * uy2 * uz * q[K001] + 2.0 * ux2 * uy * uz2 * q[K010] + 2.0 * ux * uy2 * uz2 * q[K100] + ux2 * uy2 * uz2 * q[K000];
    MomentVector {
        k,
        frame: Frame::Raw,
    }
}
