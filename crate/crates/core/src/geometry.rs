//! Ray parameterizations and source-geometry transforms.
//!
//! A 2D parallel ray (s, phi) travels along (cos phi, sin phi) at signed
//! distance s from the origin measured along the normal (-sin phi, cos phi).
//! A 3D parallel ray (s1, s2, phi1, phi2) travels along the direction given
//! by the two rotation angles, offset by s1 and s2 along the detector-plane
//! basis. Constructors canonicalize angles into the fundamental ranges
//! [0, pi) and [0, 2*pi) x [0, pi/2] using the exact equivalences of the
//! parameterization, so every distinct line has one representative.
//!
//! Divergent geometries (fan, cone, helical) are described by [`BeamSpec`]
//! and converted to raw parallel parameters by the `*_to_parallel`
//! functions. The raw pairs are deliberately not canonicalized here; callers
//! compose with the ray constructors.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Wraps an angle into [0, 2*pi). `rem_euclid` alone can round up to 2*pi
/// for tiny negative inputs, hence the fixup.
fn wrap_tau(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a >= TAU {
        a -= TAU;
    }
    a
}

/// Canonical 2D parallel ray. phi is always in [0, pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelRay2D {
    s: f64,
    phi: f64,
}

impl ParallelRay2D {
    /// Builds the canonical representative of (s, phi), applying the
    /// equivalences (s, phi + 2*pi) == (s, phi) and (s, phi + pi) == (-s, phi)
    /// until phi lands in [0, pi). The subtraction phi - pi is exact for
    /// phi in [pi, 2*pi), so the range is strict.
    pub fn new(s: f64, phi: f64) -> Result<Self> {
        if !(s.is_finite() && phi.is_finite()) {
            return Err(Error::Ray(format!("non-finite parameters (s={s}, phi={phi})")));
        }
        let mut phi = wrap_tau(phi);
        let mut s = s;
        if phi >= PI {
            phi -= PI;
            s = -s;
        }
        Ok(Self { s, phi })
    }

    /// Signed distance from the origin along the normal.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Direction angle in [0, pi).
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit direction (cos phi, sin phi).
    pub fn direction(&self) -> [f64; 2] {
        [self.phi.cos(), self.phi.sin()]
    }

    /// Unit normal (-sin phi, cos phi); the ray passes through s * normal.
    pub fn normal(&self) -> [f64; 2] {
        [-self.phi.sin(), self.phi.cos()]
    }

    /// Point at parameter t: t * direction + s * normal.
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        let d = self.direction();
        let n = self.normal();
        [t * d[0] + self.s * n[0], t * d[1] + self.s * n[1]]
    }
}

/// Canonical 3D parallel ray. phi1 is in [0, 2*pi), phi2 in [0, pi/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelRay3D {
    s1: f64,
    s2: f64,
    phi1: f64,
    phi2: f64,
}

impl ParallelRay3D {
    /// Builds the canonical representative, applying 2*pi periodicity in
    /// both angles plus the equivalences
    /// (s1, s2, phi1, phi2 + pi) == (s1, -s2, phi1, phi2) and
    /// (-s1, s2, phi1 + pi, -phi2) == (s1, s2, phi1, phi2)
    /// until phi1 is in [0, 2*pi) and phi2 in [0, pi/2].
    pub fn new(s1: f64, s2: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if ![s1, s2, phi1, phi2].iter().all(|v| v.is_finite()) {
            return Err(Error::Ray(format!(
                "non-finite parameters (s1={s1}, s2={s2}, phi1={phi1}, phi2={phi2})"
            )));
        }
        let (mut s1, mut s2, mut phi1) = (s1, s2, phi1);
        let mut phi2 = wrap_tau(phi2);
        if phi2 >= PI {
            // (.., phi2) == (.., s2 -> -s2, phi2 - pi); subtraction exact
            phi2 -= PI;
            s2 = -s2;
        }
        if phi2 > FRAC_PI_2 {
            // composite of the two sign equivalences; pi - phi2 exact
            s1 = -s1;
            s2 = -s2;
            phi1 += PI;
            phi2 = PI - phi2;
        }
        let phi1 = wrap_tau(phi1);
        Ok(Self { s1, s2, phi1, phi2 })
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// Azimuthal angle in [0, 2*pi).
    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    /// Elevation angle in [0, pi/2].
    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    /// Direction and detector-plane basis for this ray's angles.
    pub fn basis(&self) -> DirectionBasis {
        direction_basis(self.phi1, self.phi2)
    }

    /// Point at parameter t: t * dir + s1 * e1 + s2 * e2.
    pub fn point_at(&self, t: f64) -> [f64; 3] {
        let b = self.basis();
        let mut p = [0.0; 3];
        for a in 0..3 {
            p[a] = t * b.dir[a] + self.s1 * b.e1[a] + self.s2 * b.e2[a];
        }
        p
    }
}

/// Right-handed orthonormal frame of a 3D ray: `dir` is the ray direction,
/// `e1` and `e2` span the orthogonal detector plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionBasis {
    pub dir: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
}

/// Frame for direction angles (phi1, phi2):
/// dir = (cos phi2 cos phi1, cos phi2 sin phi1, sin phi2),
/// e1 = (-sin phi1, cos phi1, 0),
/// e2 = (-sin phi2 cos phi1, -sin phi2 sin phi1, cos phi2).
pub fn direction_basis(phi1: f64, phi2: f64) -> DirectionBasis {
    let (sin1, cos1) = phi1.sin_cos();
    let (sin2, cos2) = phi2.sin_cos();
    DirectionBasis {
        dir: [cos2 * cos1, cos2 * sin1, sin2],
        e1: [-sin1, cos1, 0.0],
        e2: [-sin2 * cos1, -sin2 * sin1, cos2],
    }
}

/// One ray in its source geometry's native parameters.
///
/// Angles are radians. `d` is the source-to-origin distance. Detector field
/// limits (`gamma_max`, `t_max`) are optional; when present, rays outside
/// the field are rejected at validation rather than clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamSpec {
    /// 2D parallel ray, native (s, phi).
    Parallel2D { s: f64, phi: f64 },
    /// 2D fan beam, curved detector: source angle alpha, ray angle gamma.
    FanEquiangular {
        d: f64,
        alpha: f64,
        gamma: f64,
        gamma_max: Option<f64>,
    },
    /// 2D fan beam, flat detector: source angle alpha, detector offset t.
    FanEquispaced {
        d: f64,
        alpha: f64,
        t: f64,
        t_max: Option<f64>,
    },
    /// 3D parallel ray, native (s1, s2, phi1, phi2).
    Parallel3D { s1: f64, s2: f64, phi1: f64, phi2: f64 },
    /// Circular cone beam, curved detector: center-line angle phi1p, in-plane
    /// ray angle alpha, elevation beta.
    ConeEquiangular { d: f64, phi1p: f64, alpha: f64, beta: f64 },
    /// Circular cone beam, flat detector: horizontal offset t, vertical
    /// offset h.
    ConeEquispaced { d: f64, phi1p: f64, t: f64, h: f64 },
    /// Helical cone beam, curved detector: adds the signed vertical source
    /// offset h_offset.
    HelicalEquiangular {
        d: f64,
        phi1p: f64,
        alpha: f64,
        beta: f64,
        h_offset: f64,
    },
    /// Helical cone beam, flat detector.
    HelicalEquispaced {
        d: f64,
        phi1p: f64,
        t: f64,
        h: f64,
        h_offset: f64,
    },
}

impl BeamSpec {
    /// Grid dimensionality this spec projects onto: 2 or 3.
    pub fn dim(&self) -> usize {
        match self {
            BeamSpec::Parallel2D { .. }
            | BeamSpec::FanEquiangular { .. }
            | BeamSpec::FanEquispaced { .. } => 2,
            _ => 3,
        }
    }

    /// Checks finiteness, source distance positivity, angular domains, and
    /// declared field limits.
    pub fn validate(&self) -> Result<()> {
        let finite = |vals: &[f64]| -> Result<()> {
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Beam(format!("non-finite parameter in {self:?}")));
            }
            Ok(())
        };
        let positive_d = |d: f64| -> Result<()> {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Beam(format!("source distance must be positive, got {d}")));
            }
            Ok(())
        };
        let cone_angle = |name: &str, v: f64| -> Result<()> {
            if !(v > -FRAC_PI_2 && v < FRAC_PI_2) {
                return Err(Error::Beam(format!("{name} must lie in (-pi/2, pi/2), got {v}")));
            }
            Ok(())
        };
        let within = |name: &str, v: f64, limit: Option<f64>| -> Result<()> {
            if let Some(m) = limit {
                if !(m.is_finite() && m >= 0.0) {
                    return Err(Error::Beam(format!("{name} limit must be nonnegative, got {m}")));
                }
                if v.abs() > m {
                    return Err(Error::Beam(format!("{name}={v} outside declared field [-{m}, {m}]")));
                }
            }
            Ok(())
        };
        match *self {
            BeamSpec::Parallel2D { s, phi } => finite(&[s, phi]),
            BeamSpec::FanEquiangular { d, alpha, gamma, gamma_max } => {
                finite(&[alpha, gamma])?;
                positive_d(d)?;
                if let Some(m) = gamma_max {
                    if !(m < FRAC_PI_2) {
                        return Err(Error::Beam(format!("gamma_max must be below pi/2, got {m}")));
                    }
                }
                within("gamma", gamma, gamma_max)
            }
            BeamSpec::FanEquispaced { d, alpha, t, t_max } => {
                finite(&[alpha, t])?;
                positive_d(d)?;
                within("t", t, t_max)
            }
            BeamSpec::Parallel3D { s1, s2, phi1, phi2 } => finite(&[s1, s2, phi1, phi2]),
            BeamSpec::ConeEquiangular { d, phi1p, alpha, beta } => {
                finite(&[phi1p, alpha, beta])?;
                positive_d(d)?;
                cone_angle("alpha", alpha)?;
                cone_angle("beta", beta)
            }
            BeamSpec::ConeEquispaced { d, phi1p, t, h } => {
                finite(&[phi1p, t, h])?;
                positive_d(d)
            }
            BeamSpec::HelicalEquiangular { d, phi1p, alpha, beta, h_offset } => {
                finite(&[phi1p, alpha, beta, h_offset])?;
                positive_d(d)?;
                cone_angle("alpha", alpha)?;
                cone_angle("beta", beta)
            }
            BeamSpec::HelicalEquispaced { d, phi1p, t, h, h_offset } => {
                finite(&[phi1p, t, h, h_offset])?;
                positive_d(d)
            }
        }
    }
}

/// Fan beam, curved detector: s = d sin gamma, phi = gamma + alpha - pi/2.
/// Raw pair; compose with [`ParallelRay2D::new`].
pub fn fan_equiangular_to_parallel(d: f64, alpha: f64, gamma: f64) -> Result<(f64, f64)> {
    check_source_distance(d)?;
    Ok((d * gamma.sin(), gamma + alpha - FRAC_PI_2))
}

/// Fan beam, flat detector: s = d t / sqrt(d^2 + t^2),
/// phi = arctan(t/d) + alpha - pi/2. Raw pair.
pub fn fan_equispaced_to_parallel(d: f64, alpha: f64, t: f64) -> Result<(f64, f64)> {
    check_source_distance(d)?;
    Ok((d * t / (d * d + t * t).sqrt(), (t / d).atan() + alpha - FRAC_PI_2))
}

/// Circular cone beam, curved detector: phi1 = phi1p + alpha, phi2 = beta,
/// s1 = d sin alpha, s2 = d cos alpha sin beta. Raw quadruple.
pub fn cone_equiangular_to_parallel(
    d: f64,
    phi1p: f64,
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64, f64, f64)> {
    // the helical expression with zero source offset, so that a helical ray
    // with h_offset = 0 is bit-identical by construction
    helical_equiangular_to_parallel(d, phi1p, alpha, beta, 0.0)
}

/// Circular cone beam, flat detector: alpha = arctan(t/d),
/// beta = arctan(h / sqrt(d^2 + t^2)), s1 = d sin alpha,
/// s2 = h cos^2(alpha) cos beta. Raw quadruple.
pub fn cone_equispaced_to_parallel(
    d: f64,
    phi1p: f64,
    t: f64,
    h: f64,
) -> Result<(f64, f64, f64, f64)> {
    helical_equispaced_to_parallel(d, phi1p, t, h, 0.0)
}

/// Helical cone beam, curved detector: as the circular transform with
/// s2 = d cos alpha sin beta + h_offset cos beta.
pub fn helical_equiangular_to_parallel(
    d: f64,
    phi1p: f64,
    alpha: f64,
    beta: f64,
    h_offset: f64,
) -> Result<(f64, f64, f64, f64)> {
    check_source_distance(d)?;
    let s1 = d * alpha.sin();
    let s2 = d * alpha.cos() * beta.sin() + h_offset * beta.cos();
    Ok((s1, s2, phi1p + alpha, beta))
}

/// Helical cone beam, flat detector: as the circular transform with
/// s2 = h cos^2(alpha) cos beta + h_offset cos beta.
pub fn helical_equispaced_to_parallel(
    d: f64,
    phi1p: f64,
    t: f64,
    h: f64,
    h_offset: f64,
) -> Result<(f64, f64, f64, f64)> {
    check_source_distance(d)?;
    let alpha = (t / d).atan();
    let beta = (h / (d * d + t * t).sqrt()).atan();
    let cos_a = alpha.cos();
    let s1 = d * alpha.sin();
    let s2 = h * cos_a * cos_a * beta.cos() + h_offset * beta.cos();
    Ok((s1, s2, phi1p + alpha, beta))
}

fn check_source_distance(d: f64) -> Result<()> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Beam(format!("source distance must be positive, got {d}")));
    }
    Ok(())
}
