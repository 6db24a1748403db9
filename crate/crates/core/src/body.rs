//! Smooth convex bodies of revolution about the `x3` axis.
//!
//! A body is described by its radial profile `rho(theta)`: the boundary point
//! at polar angle `theta` (measured from the positive `x3` axis) and azimuth
//! `phi` is `rho(theta) * (sin theta cos phi, sin theta sin phi, cos theta)`.
//! Every profile kind offered here is even and `pi`-symmetric
//! (`rho(pi - theta) = rho(theta)`), so the bodies are also symmetric under
//! `x3 -> -x3`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_section_max, integrate};

/// Radial profile generating the body.
///
/// Serialized as a flat table `{ kind = "sphere" | "spheroid" | "fourier", ... }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSpec", into = "ProfileSpec")]
pub enum RevolutionProfile {
    /// Unit ball.
    Sphere,
    /// Ellipsoid with equatorial semi-axis `a` and polar semi-axis `b`.
    Spheroid { a: f64, b: f64 },
    /// `rho(theta) = c0 + c1 cos(2 theta) + c2 cos(4 theta) + ...`;
    /// `coeffs[j]` multiplies `cos(2 j theta)`.
    FourierCosine { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ProfileKind {
    Sphere,
    Spheroid,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSpec {
    kind: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<f64>>,
}

impl TryFrom<ProfileSpec> for RevolutionProfile {
    type Error = String;

    fn try_from(spec: ProfileSpec) -> std::result::Result<Self, String> {
        match (spec.kind, spec.a, spec.b, spec.coeffs) {
            (ProfileKind::Sphere, None, None, None) => Ok(RevolutionProfile::Sphere),
            (ProfileKind::Spheroid, Some(a), Some(b), None) => Ok(RevolutionProfile::Spheroid { a, b }),
            (ProfileKind::Fourier, None, None, Some(coeffs)) => Ok(RevolutionProfile::FourierCosine { coeffs }),
            (ProfileKind::Sphere, ..) => Err("a sphere takes no parameters".into()),
            (ProfileKind::Spheroid, ..) => Err("a spheroid takes exactly the keys a and b".into()),
            (ProfileKind::Fourier, ..) => Err("a fourier profile takes exactly the key coeffs".into()),
        }
    }
}

impl From<RevolutionProfile> for ProfileSpec {
    fn from(p: RevolutionProfile) -> Self {
        let empty = ProfileSpec { kind: ProfileKind::Sphere, a: None, b: None, coeffs: None };
        match p {
            RevolutionProfile::Sphere => empty,
            RevolutionProfile::Spheroid { a, b } => ProfileSpec { kind: ProfileKind::Spheroid, a: Some(a), b: Some(b), ..empty },
            RevolutionProfile::FourierCosine { coeffs } => {
                ProfileSpec { kind: ProfileKind::Fourier, coeffs: Some(coeffs), ..empty }
            }
        }
    }
}

/// `rho` and its first two derivatives at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub rho: f64,
    pub d1: f64,
    pub d2: f64,
}

impl ProfilePoint {
    /// `rho rho'' - 2 rho'^2 - rho^2`; vanishes exactly where the meridian is flat.
    pub fn curvature_expr(&self) -> f64 {
        self.rho * self.d2 - 2.0 * self.d1 * self.d1 - self.rho * self.rho
    }
}

impl RevolutionProfile {
    pub fn spheroid(a: f64, b: f64) -> Self {
        RevolutionProfile::Spheroid { a, b }
    }

    pub fn fourier(coeffs: impl Into<Vec<f64>>) -> Self {
        RevolutionProfile::FourierCosine { coeffs: coeffs.into() }
    }

    /// Parameter sanity independent of the curvature condition.
    pub fn check_parameters(&self) -> Result<()> {
        match self {
            RevolutionProfile::Sphere => Ok(()),
            RevolutionProfile::Spheroid { a, b } => {
                if a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidProfile(format!("spheroid semi-axes must be positive, got a={a}, b={b}")))
                }
            }
            RevolutionProfile::FourierCosine { coeffs } => {
                if coeffs.is_empty() {
                    Err(Error::InvalidProfile("fourier profile needs at least c0".into()))
                } else if coeffs.iter().any(|c| !c.is_finite()) {
                    Err(Error::InvalidProfile("fourier coefficients must be finite".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn eval(&self, theta: f64) -> ProfilePoint {
        match self {
            RevolutionProfile::Sphere => ProfilePoint { rho: 1.0, d1: 0.0, d2: 0.0 },
            RevolutionProfile::Spheroid { a, b } => {
                // rho = q^{-1/2} with q = sin^2/a^2 + cos^2/b^2
                let k = 1.0 / (a * a) - 1.0 / (b * b);
                let (s, c) = theta.sin_cos();
                let q = s * s / (a * a) + c * c / (b * b);
                let q1 = k * (2.0 * theta).sin();
                let q2 = 2.0 * k * (2.0 * theta).cos();
                let rho = q.powf(-0.5);
                let d1 = -0.5 * q.powf(-1.5) * q1;
                let d2 = 0.75 * q.powf(-2.5) * q1 * q1 - 0.5 * q.powf(-1.5) * q2;
                ProfilePoint { rho, d1, d2 }
            }
            RevolutionProfile::FourierCosine { coeffs } => {
                let mut p = ProfilePoint { rho: 0.0, d1: 0.0, d2: 0.0 };
                for (j, c) in coeffs.iter().enumerate() {
                    let freq = 2.0 * j as f64;
                    let (s, co) = (freq * theta).sin_cos();
                    p.rho += c * co;
                    p.d1 -= c * freq * s;
                    p.d2 -= c * freq * freq * co;
                }
                p
            }
        }
    }

    #[inline]
    pub fn rho(&self, theta: f64) -> f64 {
        match self {
            RevolutionProfile::Sphere => 1.0,
            RevolutionProfile::Spheroid { a, b } => {
                let (s, c) = theta.sin_cos();
                (s * s / (a * a) + c * c / (b * b)).powf(-0.5)
            }
            RevolutionProfile::FourierCosine { coeffs } => {
                coeffs.iter().enumerate().map(|(j, c)| c * (2.0 * j as f64 * theta).cos()).sum()
            }
        }
    }

    /// Smallest dilation `t` with the point at squared cylinder radius `r2` and
    /// height `z` inside `sqrt(t) B`.
    ///
    /// Lattice membership everywhere in the crate is decided by `gauge_sq <= t`,
    /// so counts and jump locations agree by construction. For the closed-form
    /// kinds this is the implicit equation; it is exact on integer input
    /// whenever the semi-axes are powers of two.
    #[inline]
    pub fn gauge_sq(&self, r2: f64, z: f64) -> f64 {
        match self {
            RevolutionProfile::Sphere => r2 + z * z,
            RevolutionProfile::Spheroid { a, b } => r2 / (a * a) + z * z / (b * b),
            RevolutionProfile::FourierCosine { .. } => {
                let n2 = r2 + z * z;
                if n2 == 0.0 {
                    return 0.0;
                }
                // profiles are symmetric under theta -> pi - theta; |z| keeps mirror points bit-identical
                let rho = self.rho(r2.sqrt().atan2(z.abs()));
                n2 / (rho * rho)
            }
        }
    }

    /// Axial extent `(z_min, z_max)` of the undilated body.
    pub fn z_range(&self) -> (f64, f64) {
        (-self.rho(PI), self.rho(0.0))
    }
}

/// Result of scanning `rho` and the curvature expression on a grid over `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub grid_size: usize,
    pub tolerance: f64,
    pub min_abs_curvature_expr: f64,
    pub theta_min_curvature_expr: f64,
    pub min_rho: f64,
    pub theta_min_rho: f64,
    /// Sign of `rho rho'' - 2 rho'^2 - rho^2` when constant, otherwise 0.
    pub sign: i8,
    pub accepted: bool,
    pub reason: Option<String>,
    pub offending_theta: Option<f64>,
}

impl ValidationReport {
    pub fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("grid_size".into(), self.grid_size.to_string()),
            ("tolerance".into(), self.tolerance.to_string()),
            ("min_abs_curvature_expr".into(), self.min_abs_curvature_expr.to_string()),
            ("theta_min_curvature_expr".into(), self.theta_min_curvature_expr.to_string()),
            ("min_rho".into(), self.min_rho.to_string()),
            ("theta_min_rho".into(), self.theta_min_rho.to_string()),
            ("sign".into(), self.sign.to_string()),
            ("accepted".into(), self.accepted.to_string()),
            ("reason".into(), self.reason.clone().unwrap_or_else(|| "none".into())),
        ]
    }
}

/// Grid scan of a profile; never fails, rejection is recorded in the report.
pub fn inspect_profile(p: &RevolutionProfile, grid_size: usize, tolerance: f64) -> Result<ValidationReport> {
    if grid_size < 64 {
        return Err(Error::InvalidArgument(format!("validation grid needs at least 64 points, got {grid_size}")));
    }
    p.check_parameters()?;
    let mut min_expr = (f64::INFINITY, 0.0);
    let mut min_rho = (f64::INFINITY, 0.0);
    let (mut saw_pos, mut saw_neg) = (false, false);
    let mut first_flip = None;
    for i in 0..grid_size {
        let theta = PI * i as f64 / (grid_size - 1) as f64;
        let pt = p.eval(theta);
        let e = pt.curvature_expr();
        if e.abs() < min_expr.0 {
            min_expr = (e.abs(), theta);
        }
        if pt.rho < min_rho.0 {
            min_rho = (pt.rho, theta);
        }
        if e > 0.0 {
            saw_pos = true;
        } else if e < 0.0 {
            saw_neg = true;
        }
        if saw_pos && saw_neg && first_flip.is_none() {
            first_flip = Some(theta);
        }
    }
    let sign = match (saw_pos, saw_neg) {
        (true, false) => 1,
        (false, true) => -1,
        _ => 0,
    };
    let (reason, offending) = if min_rho.0 < tolerance {
        (Some(format!("rho={} below tolerance", min_rho.0)), Some(min_rho.1))
    } else if let Some(theta) = first_flip {
        (Some("curvature expression changes sign".to_string()), Some(theta))
    } else if min_expr.0 < tolerance {
        (Some(format!("|rho rho'' - 2 rho'^2 - rho^2|={} below tolerance", min_expr.0)), Some(min_expr.1))
    } else {
        (None, None)
    };
    Ok(ValidationReport {
        grid_size,
        tolerance,
        min_abs_curvature_expr: min_expr.0,
        theta_min_curvature_expr: min_expr.1,
        min_rho: min_rho.0,
        theta_min_rho: min_rho.1,
        sign,
        accepted: reason.is_none(),
        reason,
        offending_theta: offending,
    })
}

/// Grid validation of the curvature condition; rejects with the offending angle.
pub fn validate_profile(p: &RevolutionProfile, grid_size: usize, tolerance: f64) -> Result<ValidationReport> {
    let report = inspect_profile(p, grid_size, tolerance)?;
    match (&report.reason, report.offending_theta) {
        (Some(reason), Some(theta)) => Err(Error::ProfileRejected { theta, reason: reason.clone() }),
        _ => Ok(report),
    }
}

const SUPPORT_BRACKET: f64 = 1e-6;
const SUPPORT_NEWTON_STEPS: usize = 10;

/// Support function value and the polar angle of the touching boundary point.
///
/// `w_r >= 0` is the radial (cylindrical) component of the direction and
/// `w_3` its axial component. On `[0, pi]` the objective has a single
/// maximum, so a golden-section bracket followed by Newton steps on its
/// derivative converges to the global maximizer.
pub fn support_point(p: &RevolutionProfile, w_r: f64, w_3: f64) -> (f64, f64) {
    assert!(w_r >= 0.0, "radial component must be non-negative");
    assert!(w_r != 0.0 || w_3 != 0.0, "support direction must be nonzero");
    let objective = |theta: f64| {
        let (s, c) = theta.sin_cos();
        p.rho(theta) * (w_r * s + w_3 * c)
    };
    let (mut theta, mut best) = golden_section_max(objective, 0.0, PI, SUPPORT_BRACKET);
    for _ in 0..SUPPORT_NEWTON_STEPS {
        let pt = p.eval(theta);
        let (s, c) = theta.sin_cos();
        let along = w_r * s + w_3 * c;
        let across = w_r * c - w_3 * s;
        let g1 = pt.d1 * along + pt.rho * across;
        let g2 = pt.d2 * along + 2.0 * pt.d1 * across - pt.rho * along;
        if g2 >= 0.0 {
            break;
        }
        let next = (theta - g1 / g2).clamp(0.0, PI);
        let val = objective(next);
        if val < best {
            break;
        }
        let moved = (next - theta).abs();
        theta = next;
        best = val;
        if moved < 1e-15 {
            break;
        }
    }
    for end in [0.0, PI] {
        let v = objective(end);
        if v > best {
            best = v;
            theta = end;
        }
    }
    (best, theta)
}

/// Support function `H(w_r, 0, w_3)`.
pub fn support(p: &RevolutionProfile, w_r: f64, w_3: f64) -> f64 {
    support_point(p, w_r, w_3).0
}

/// Support function of a full 3-vector through rotation invariance.
pub fn support3(p: &RevolutionProfile, w: [f64; 3]) -> f64 {
    support(p, w[0].hypot(w[1]), w[2])
}

/// Radius of the horizontal cross-section at height `z` (undilated body).
pub fn slice_radius(p: &RevolutionProfile, z: f64, pole_eps: f64) -> Result<f64> {
    let (z_min, z_max) = p.z_range();
    if z > z_max + pole_eps || z < z_min - pole_eps {
        return Err(Error::OutOfRange { z, z_min, z_max });
    }
    if (z - z_max).abs() <= pole_eps || (z - z_min).abs() <= pole_eps {
        return Ok(0.0);
    }
    // the axial coordinate rho(theta) cos(theta) decreases from z_max to z_min
    let theta = bisect(|th| p.rho(th) * th.cos() - z, 0.0, PI);
    Ok(p.rho(theta) * theta.sin())
}

/// Volume `(2 pi / 3) int_0^pi rho^3 sin(theta) d theta`.
pub fn volume(p: &RevolutionProfile) -> f64 {
    2.0 * PI / 3.0 * integrate(|th| p.rho(th).powi(3) * th.sin(), 0.0, PI, 1e-12)
}

/// Meridian curvature magnitude and Gaussian curvature at an interior angle.
pub fn curvatures(p: &RevolutionProfile, theta: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Pole(theta));
    }
    let pt = p.eval(theta);
    let e = pt.curvature_expr();
    let arc2 = pt.rho * pt.rho + pt.d1 * pt.d1;
    let kappa2 = e.abs() / arc2.powf(1.5);
    let (s, c) = theta.sin_cos();
    let dx3 = pt.d1 * c - pt.rho * s;
    let kappa3 = dx3 / (pt.rho * s) * e / (arc2 * arc2);
    Ok((kappa2, kappa3))
}

/// Gaussian curvature on the closed meridian, using the umbilic limit
/// `kappa3 = kappa2^2` at the poles.
pub fn gaussian_curvature(p: &RevolutionProfile, theta: f64) -> f64 {
    if theta.sin() < 1e-7 {
        let pole = if theta < 1.0 { 0.0 } else { PI };
        let pt = p.eval(pole);
        let k2 = pt.curvature_expr().abs() / (pt.rho * pt.rho + pt.d1 * pt.d1).powf(1.5);
        return k2 * k2;
    }
    curvatures(p, theta).map(|(_, k3)| k3).unwrap_or(f64::NAN)
}

/// Tunable thresholds of the geometry and counting code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub validation_grid: usize,
    pub curvature_tol: f64,
    /// Relative width of the band around a slice radius inside which lattice
    /// membership is re-decided by the gauge test.
    pub guard_band: f64,
    pub pole_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { validation_grid: 4096, curvature_tol: 1e-6, guard_band: 1e-9, pole_eps: 1e-12 }
    }
}

/// Rectangle `[a1, a2] x [a3, a4]` in the `(w1, w3)` quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl Rect {
    pub fn corners(&self) -> [(f64, f64); 4] {
        [(self.a1, self.a3), (self.a1, self.a4), (self.a2, self.a3), (self.a2, self.a4)]
    }

    /// Shrink about the center by `factor`.
    pub fn scaled(&self, factor: f64) -> Rect {
        let (c1, c3) = (0.5 * (self.a1 + self.a2), 0.5 * (self.a3 + self.a4));
        let (h1, h3) = (0.5 * (self.a2 - self.a1) * factor, 0.5 * (self.a4 - self.a3) * factor);
        Rect { a1: c1 - h1, a2: c1 + h1, a3: c3 - h3, a4: c3 + h3 }
    }
}

/// A validated body with its derived constants. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyGeometry {
    pub profile: RevolutionProfile,
    pub tolerances: Tolerances,
    pub validation: ValidationReport,
    pub volume: f64,
    /// `min H(w) / |w|`, equal to the minimum of `rho`.
    pub c1: f64,
    /// `max H(w) / |w|`, equal to the maximum of `rho`.
    pub c2: f64,
    pub rect: Rect,
    pub z_range: (f64, f64),
}

impl BodyGeometry {
    pub fn new(profile: RevolutionProfile) -> Result<Self> {
        Self::with_tolerances(profile, Tolerances::default())
    }

    pub fn with_tolerances(profile: RevolutionProfile, tolerances: Tolerances) -> Result<Self> {
        let validation = validate_profile(&profile, tolerances.validation_grid, tolerances.curvature_tol)?;
        let (c1, c2) = rho_extremes(&profile, tolerances.validation_grid);
        let mut g = BodyGeometry {
            volume: volume(&profile),
            z_range: profile.z_range(),
            profile,
            tolerances,
            validation,
            c1,
            c2,
            rect: Rect { a1: 0.0, a2: 0.0, a3: 0.0, a4: 0.0 },
        };
        g.rect = find_rect(&g)?;
        Ok(g)
    }

    pub fn support(&self, w_r: f64, w_3: f64) -> f64 {
        support(&self.profile, w_r, w_3)
    }

    pub fn slice_radius(&self, z: f64) -> Result<f64> {
        slice_radius(&self.profile, z, self.tolerances.pole_eps)
    }

    /// Point membership in the undilated body.
    pub fn contains(&self, x: [f64; 3]) -> bool {
        self.profile.gauge_sq(x[0] * x[0] + x[1] * x[1], x[2]) <= 1.0
    }
}

fn rho_extremes(p: &RevolutionProfile, grid: usize) -> (f64, f64) {
    let step = PI / (grid - 1) as f64;
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    for i in 0..grid {
        let th = i as f64 * step;
        let r = p.rho(th);
        if r < lo.0 {
            lo = (r, th);
        }
        if r > hi.0 {
            hi = (r, th);
        }
    }
    let refine = |center: f64, sign: f64| {
        let a = (center - step).max(0.0);
        let b = (center + step).min(PI);
        let (x, _) = golden_section_max(|th| sign * p.rho(th), a, b, 1e-12);
        p.rho(x)
    };
    (refine(lo.1, -1.0).min(lo.0), refine(hi.1, 1.0).max(hi.0))
}

const RECT_EDGE_SAMPLES: usize = 33;
const RECT_MAX_SHRINKS: usize = 200;

fn rect_fits(p: &RevolutionProfile, r: &Rect) -> bool {
    if !(r.a1 > 0.0 && r.a3 > 0.0 && r.a2 > r.a1 && r.a4 > r.a3) {
        return false;
    }
    let ok = |w1: f64, w3: f64| {
        let h = support(p, w1, w3);
        (0.5..=1.5).contains(&h)
    };
    let n = RECT_EDGE_SAMPLES;
    (0..n).all(|i| {
        let s = i as f64 / (n - 1) as f64;
        let w1 = r.a1 + s * (r.a2 - r.a1);
        let w3 = r.a3 + s * (r.a4 - r.a3);
        ok(w1, r.a3) && ok(w1, r.a4) && ok(r.a1, w3) && ok(r.a2, w3)
    })
}

/// Check that the whole boundary of `r` lies between the level sets `H = 1/2`
/// and `H = 3/2` (corners plus sampled edges).
pub fn rect_is_valid(g: &BodyGeometry, r: &Rect) -> bool {
    rect_fits(&g.profile, r)
}

/// Rectangle around the diagonal direction whose image under `H(w1, 0, w3)`
/// stays in `[1/2, 3/2]`.
///
/// Starts from `[0.55, 1.45]` times the point `u / H(u)`, `u = (1, 1) / sqrt 2`,
/// and shrinks about the center until the boundary check passes.
pub fn find_rect(g: &BodyGeometry) -> Result<Rect> {
    let h_unit = support(&g.profile, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let c = FRAC_1_SQRT_2 / h_unit;
    let mut rect = Rect { a1: 0.55 * c, a2: 1.45 * c, a3: 0.55 * c, a4: 1.45 * c };
    for _ in 0..RECT_MAX_SHRINKS {
        if rect_fits(&g.profile, &rect) {
            return Ok(rect);
        }
        rect = rect.scaled(0.9);
    }
    Err(Error::RectNotFound(RECT_MAX_SHRINKS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spheroid() -> RevolutionProfile {
        RevolutionProfile::spheroid(2.0, 1.0)
    }

    /// Dense-grid maximization used as an independent oracle for `support`.
    fn grid_support(p: &RevolutionProfile, w_r: f64, w_3: f64) -> f64 {
        let n = 200_000;
        (0..=n)
            .map(|i| {
                let th = PI * i as f64 / n as f64;
                p.rho(th) * (w_r * th.sin() + w_3 * th.cos())
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn sphere_validation_reports_constant_minus_one() {
        let r = validate_profile(&RevolutionProfile::Sphere, 4096, 1e-6).unwrap();
        assert_eq!(r.min_abs_curvature_expr, 1.0);
        assert_eq!(r.sign, -1);
        assert!(r.accepted);
    }

    #[test]
    fn mild_fourier_profile_is_accepted() {
        let p = RevolutionProfile::fourier([1.0, 0.05]);
        let r = validate_profile(&p, 4096, 1e-6).unwrap();
        // by hand: E(theta) = rho rho'' - 2 rho'^2 - rho^2 with rho = 1 + 0.05 cos 2t
        let oracle = (0..4096)
            .map(|i| {
                let t = PI * i as f64 / 4095.0;
                let rho = 1.0 + 0.05 * (2.0 * t).cos();
                let d1 = -0.1 * (2.0 * t).sin();
                let d2 = -0.2 * (2.0 * t).cos();
                (rho * d2 - 2.0 * d1 * d1 - rho * rho).abs()
            })
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(r.min_abs_curvature_expr, oracle, max_relative = 1e-12);
        assert_eq!(r.sign, -1);
    }

    #[test]
    fn strongly_dented_profile_is_rejected_with_theta() {
        let p = RevolutionProfile::fourier([1.0, 0.9]);
        match validate_profile(&p, 4096, 1e-6) {
            Err(Error::ProfileRejected { theta, .. }) => assert!(theta > 0.0 && theta < PI),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn small_grid_is_refused() {
        assert!(inspect_profile(&RevolutionProfile::Sphere, 32, 1e-6).is_err());
    }

    #[test]
    fn bad_parameters_are_refused() {
        assert!(BodyGeometry::new(RevolutionProfile::spheroid(-1.0, 1.0)).is_err());
        assert!(BodyGeometry::new(RevolutionProfile::fourier(Vec::<f64>::new())).is_err());
    }

    #[test]
    fn sphere_support_is_the_norm() {
        let p = RevolutionProfile::Sphere;
        assert!((support(&p, 3.0, 4.0) - 5.0).abs() < 1e-10);
        assert!((support(&p, 0.0, 1.0) - 1.0).abs() < 1e-12);
        assert!((support(&p, 0.0, -2.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spheroid_support_matches_semi_axis_and_grid() {
        let p = spheroid();
        assert!((support(&p, 1.0, 0.0) - 2.0).abs() < 1e-10);
        assert!((support(&p, 1.0, 0.0) - grid_support(&p, 1.0, 0.0)).abs() < 1e-8);
        for (wr, w3) in [(0.3f64, 0.9f64), (1.0, -0.2), (0.01, 1.0)] {
            let closed = (4.0 * wr * wr + w3 * w3).sqrt();
            assert!((support(&p, wr, w3) - closed).abs() < 1e-10, "{wr} {w3}");
            assert!((support(&p, wr, w3) - grid_support(&p, wr, w3)).abs() < 1e-8);
        }
    }

    #[test]
    fn slice_radius_examples() {
        let s = RevolutionProfile::Sphere;
        assert!((slice_radius(&s, 0.0, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        assert!((slice_radius(&s, 0.6, 1e-12).unwrap() - 0.8).abs() < 1e-14);
        assert_eq!(slice_radius(&s, 1.0, 1e-12).unwrap(), 0.0);
        let e = spheroid();
        assert!((slice_radius(&e, 0.5, 1e-12).unwrap() - 3f64.sqrt()).abs() < 1e-13);
        assert!(matches!(slice_radius(&s, 1.5, 1e-12), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn volumes_match_closed_forms_and_slice_integrals() {
        assert!((volume(&RevolutionProfile::Sphere) - 4.0 * PI / 3.0).abs() < 1e-9);
        assert!((volume(&spheroid()) - 16.0 * PI / 3.0).abs() < 1e-8);
        for p in [spheroid(), RevolutionProfile::fourier([1.0, 0.05])] {
            let (lo, hi) = p.z_range();
            let slices = PI * integrate(|z| slice_radius(&p, z, 1e-12).unwrap().powi(2), lo, hi, 1e-12);
            assert!((slices - volume(&p)).abs() < 1e-8 * volume(&p), "{p:?}");
        }
    }

    #[test]
    fn curvature_of_unit_sphere_is_one_everywhere() {
        let p = RevolutionProfile::Sphere;
        let (k2, k3) = curvatures(&p, PI / 2.0).unwrap();
        assert!((k2 - 1.0).abs() < 1e-14 && (k3 - 1.0).abs() < 1e-14);
        for i in 1..50 {
            let th = PI * i as f64 / 50.0;
            assert!((curvatures(&p, th).unwrap().1 - 1.0).abs() < 1e-10);
        }
        assert!(curvatures(&p, 0.0).is_err());
        assert!(curvatures(&p, PI).is_err());
    }

    #[test]
    fn spheroid_curvatures_match_ellipsoid_formulas() {
        // semi-axes (a, a, b); Gaussian curvature 1 / (a^2 a^2 b^2 (x^2/a^4 + y^2/a^4 + z^2/b^4)^2);
        // meridian ellipse curvature a b / (a^2 sin^2 psi + b^2 cos^2 psi)^{3/2}
        let (a, b) = (2.0f64, 1.0f64);
        let p = spheroid();
        for i in 1..40 {
            let th = PI * i as f64 / 40.0;
            let r = p.rho(th);
            let (x, z) = (r * th.sin(), r * th.cos());
            let gauss = 1.0 / (a.powi(4) * b * b * (x * x / a.powi(4) + z * z / b.powi(4)).powi(2));
            // eccentric anomaly psi: x = a sin psi, z = b cos psi
            let psi = (x / a).atan2(z / b);
            let merid = a * b / (a * a * psi.cos().powi(2) + b * b * psi.sin().powi(2)).powf(1.5);
            let (k2, k3) = curvatures(&p, th).unwrap();
            assert_relative_eq!(k3, gauss, max_relative = 1e-10);
            assert_relative_eq!(k2, merid, max_relative = 1e-10);
        }
        let (k2, k3) = curvatures(&p, PI / 2.0).unwrap();
        assert_relative_eq!(k2, 2.0, max_relative = 1e-12);
        assert_relative_eq!(k3, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn pole_curvature_limit_is_continuous() {
        let p = RevolutionProfile::fourier([1.0, 0.05, 0.01]);
        let near = curvatures(&p, 1e-4).unwrap().1;
        assert_relative_eq!(gaussian_curvature(&p, 0.0), near, max_relative = 1e-6);
    }

    #[test]
    fn geometry_constants_and_rect() {
        let g = BodyGeometry::new(spheroid()).unwrap();
        assert_relative_eq!(g.c1, 1.0, max_relative = 1e-12);
        assert_relative_eq!(g.c2, 2.0, max_relative = 1e-12);
        assert_eq!(g.z_range, (-1.0, 1.0));
        for (w1, w3) in g.rect.corners() {
            let h = g.support(w1, w3);
            assert!((0.5..=1.5).contains(&h), "corner ({w1}, {w3}) has H={h}");
        }
        assert!(rect_is_valid(&g, &g.rect.scaled(0.9)));
    }

    #[test]
    fn sphere_rect_sits_in_annulus() {
        let g = BodyGeometry::new(RevolutionProfile::Sphere).unwrap();
        let r = g.rect;
        assert!(r.a1 > 0.0 && r.a2 > r.a1 && r.a3 > 0.0 && r.a4 > r.a3);
        for (w1, w3) in r.corners() {
            let n = w1.hypot(w3);
            assert!((0.5..=1.5).contains(&n));
        }
    }
}
