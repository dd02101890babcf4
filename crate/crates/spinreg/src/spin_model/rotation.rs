//! Single-qubit rotations stored as unit quaternions.
//!
//! A [`Rotation`] `(w, v)` is the SU(2) element `w·I − i v·σ`, so that
//! `R_n(φ) = exp(−iφ/2 n·σ)` has `w = cos(φ/2)` and `v = sin(φ/2)·n`.
//! The sign of the quaternion is physical (it is the SU(2) element, not the
//! SO(3) rotation); the folded `φ ∈ [0, π]` view lives in [`AxisAngle`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Vec3 = [f64; 3];
pub type Mat2 = [[Complex64; 2]; 2];

/// Below this value of `sin(φ/2)` the axis is treated as undefined.
pub const NEAR_IDENTITY: f64 = 1e-12;

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Unit quaternion representation of an SU(2) rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub w: f64,
    pub v: Vec3,
}

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub const fn identity() -> Self {
        Self {
            w: 1.0,
            v: [0.0; 3],
        }
    }

    /// `R_n(φ)`; the axis is normalized, a zero axis yields the identity.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let n = norm(axis);
        if n == 0.0 {
            return Self::identity();
        }
        let (s, c) = (angle / 2.0).sin_cos();
        Self {
            w: c,
            v: scale(axis, s / n),
        }
    }

    pub fn about_x(angle: f64) -> Self {
        Self::from_axis_angle([1.0, 0.0, 0.0], angle)
    }

    pub fn about_y(angle: f64) -> Self {
        Self::from_axis_angle([0.0, 1.0, 0.0], angle)
    }

    pub fn about_z(angle: f64) -> Self {
        Self::from_axis_angle([0.0, 0.0, 1.0], angle)
    }

    /// Free evolution `exp(−i dt (hz σz + hx σx)/2)`.
    pub fn precession(hz: f64, hx: f64, dt: f64) -> Self {
        let omega = hz.hypot(hx);
        if omega == 0.0 {
            return Self::identity();
        }
        Self::from_axis_angle([hx / omega, 0.0, hz / omega], omega * dt)
    }

    /// Matrix product `self · rhs` (Rodrigues composition).
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Rotation) -> Rotation {
        let w = self.w * rhs.w - dot(self.v, rhs.v);
        let v = add(
            add(scale(rhs.v, self.w), scale(self.v, rhs.w)),
            cross(self.v, rhs.v),
        );
        Rotation { w, v }
    }

    /// Apply `self` first, then `next`.
    pub fn then(self, next: Rotation) -> Rotation {
        next.mul(self)
    }

    pub fn inverse(self) -> Rotation {
        Rotation {
            w: self.w,
            v: scale(self.v, -1.0),
        }
    }

    /// Half of the rotation angle, in `[0, π]`.
    pub fn half_angle(self) -> f64 {
        norm(self.v).atan2(self.w)
    }

    /// Exact `N`-fold power, computed on the angle rather than by repeated products.
    pub fn pow(self, n: u64) -> Rotation {
        let s = norm(self.v);
        if s == 0.0 {
            return if self.w >= 0.0 || n.is_multiple_of(2) {
                Rotation::identity()
            } else {
                Rotation {
                    w: -1.0,
                    v: [0.0; 3],
                }
            };
        }
        let half = s.atan2(self.w) * n as f64;
        let (sn, cn) = half.sin_cos();
        Rotation {
            w: cn,
            v: scale(self.v, sn / s),
        }
    }

    /// Rotate by a fraction of the full angle about the same axis.
    pub fn fraction(self, f: f64) -> Rotation {
        let s = norm(self.v);
        if s == 0.0 {
            return Rotation::identity();
        }
        let half = s.atan2(self.w) * f;
        let (sn, cn) = half.sin_cos();
        Rotation {
            w: cn,
            v: scale(self.v, sn / s),
        }
    }

    pub fn renormalized(self) -> Rotation {
        let n = (self.w * self.w + dot(self.v, self.v)).sqrt();
        Rotation {
            w: self.w / n,
            v: scale(self.v, 1.0 / n),
        }
    }

    /// Folded axis/angle with `φ ∈ [0, π]`.
    pub fn axis_angle(self) -> AxisAngle {
        let s = norm(self.v);
        let mut angle = 2.0 * s.atan2(self.w);
        let near_identity = s < NEAR_IDENTITY;
        let mut axis = if near_identity {
            [0.0, 0.0, 1.0]
        } else {
            scale(self.v, 1.0 / s)
        };
        if angle > PI {
            angle = 2.0 * PI - angle;
            if !near_identity {
                axis = scale(axis, -1.0);
            }
        }
        AxisAngle {
            axis,
            angle,
            near_identity,
        }
    }

    pub fn to_matrix(self) -> Mat2 {
        let c = Complex64::new;
        let [x, y, z] = self.v;
        [[c(self.w, -z), c(-y, -x)], [c(y, -x), c(self.w, z)]]
    }

    /// Project a 2×2 unitary with unit determinant onto the quaternion form.
    pub fn from_matrix(m: &Mat2) -> Rotation {
        let w = (m[0][0].re + m[1][1].re) / 2.0;
        let z = (m[1][1].im - m[0][0].im) / 2.0;
        let x = -(m[0][1].im + m[1][0].im) / 2.0;
        let y = (m[1][0].re - m[0][1].re) / 2.0;
        Rotation { w, v: [x, y, z] }.renormalized()
    }

    /// `U|ψ⟩` for a single-qubit state.
    pub fn apply(self, psi: [Complex64; 2]) -> [Complex64; 2] {
        let m = self.to_matrix();
        [
            m[0][0] * psi[0] + m[0][1] * psi[1],
            m[1][0] * psi[0] + m[1][1] * psi[1],
        ]
    }

    /// First column of the matrix: `(⟨0|U|0⟩, ⟨1|U|0⟩)`.
    pub fn column0(self) -> [Complex64; 2] {
        [
            Complex64::new(self.w, -self.v[2]),
            Complex64::new(self.v[1], -self.v[0]),
        ]
    }

    /// Bloch vector of `U|ψ⟩` for the basis state `|bit⟩`.
    pub fn bloch_of_basis(self, bit: u8) -> Vec3 {
        let psi = if bit == 0 {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        };
        bloch(self.apply(psi))
    }
}

/// Bloch vector of a normalized single-qubit state.
pub fn bloch(psi: [Complex64; 2]) -> Vec3 {
    let r = psi[0].conj() * psi[1];
    [
        2.0 * r.re,
        2.0 * r.im,
        psi[0].norm_sqr() - psi[1].norm_sqr(),
    ]
}

/// Axis/angle view of a rotation under the `φ ∈ [0, π]` convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisAngle {
    pub axis: Vec3,
    pub angle: f64,
    pub near_identity: bool,
}

impl AxisAngle {
    pub fn new(axis: Vec3, angle: f64) -> Self {
        Rotation::from_axis_angle(axis, angle).axis_angle()
    }

    pub fn to_rotation(self) -> Rotation {
        Rotation::from_axis_angle(self.axis, self.angle)
    }

    /// Axis overlap; defined as 1 when either axis is undefined.
    pub fn axis_dot(self, other: AxisAngle) -> f64 {
        if self.near_identity || other.near_identity {
            1.0
        } else {
            dot(self.axis, other.axis)
        }
    }
}

/// Rodrigues composition: apply `a`, then `b`.
pub fn compose_rotations(a: AxisAngle, b: AxisAngle) -> AxisAngle {
    let (sa, ca) = (a.angle / 2.0).sin_cos();
    let (sb, cb) = (b.angle / 2.0).sin_cos();
    let cos_g = cb * ca - sb * sa * dot(b.axis, a.axis);
    let sin_n = add(
        add(scale(a.axis, sa * cb), scale(b.axis, sb * ca)),
        scale(cross(b.axis, a.axis), sb * sa),
    );
    Rotation { w: cos_g, v: sin_n }.axis_angle()
}
