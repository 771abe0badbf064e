//! The Lorentz-Minkowski plane: metric, causal character, Frenet frame,
//! isometries and the coordinate systems used by the solvers.
//!
//! The metric is `g = -dx^2 + dy^2`. Wherever a quantity is a product of
//! two Lorentzian norms it is evaluated in the null coordinates
//! `u = y + x`, `v = y - x`, where `g(a, a) = a_u * a_v` needs no
//! cancellation between large squares.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or vector of the plane in rectangular coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type PlanePoint = Vec2;
pub type PlaneVector = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// First null coordinate `u = y + x`.
    pub fn u(self) -> f64 {
        self.y + self.x
    }

    /// Second null coordinate `v = y - x`.
    pub fn v(self) -> f64 {
        self.y - self.x
    }

    pub fn from_uv(u: f64, v: f64) -> Self {
        xy_from_uv(u, v)
    }

    /// `(x, y) -> (y, x)`; exchanges spacelike and timelike.
    pub fn swap(self) -> Self {
        Vec2::new(self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn euclidean_norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// The causal sign ε of a unit-speed curve: `g(T, T) = ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalSign {
    Spacelike,
    Timelike,
}

impl CausalSign {
    pub fn value(self) -> f64 {
        match self {
            CausalSign::Spacelike => 1.0,
            CausalSign::Timelike => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            CausalSign::Spacelike => CausalSign::Timelike,
            CausalSign::Timelike => CausalSign::Spacelike,
        }
    }

    /// Accepts `+1` / `-1`.
    pub fn from_value(eps: i32) -> Option<Self> {
        match eps {
            1 => Some(CausalSign::Spacelike),
            -1 => Some(CausalSign::Timelike),
            _ => None,
        }
    }

    pub fn as_int(self) -> i32 {
        match self {
            CausalSign::Spacelike => 1,
            CausalSign::Timelike => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

/// `g(a, b) = -a.x b.x + a.y b.y`.
pub fn metric(a: PlaneVector, b: PlaneVector) -> f64 {
    // (a_u b_v + a_v b_u) / 2 equals -a.x b.x + a.y b.y exactly in real arithmetic
    0.5 * (a.u() * b.v() + a.v() * b.u())
}

/// Default light-cone tolerance `1e-10 (1 + |w|^2)`.
pub fn light_cone_tolerance(w: PlaneVector) -> f64 {
    1e-10 * (1.0 + w.euclidean_norm_sq())
}

pub fn causal_character(w: PlaneVector) -> Result<CausalCharacter> {
    causal_character_with_tolerance(w, light_cone_tolerance(w))
}

pub fn causal_character_with_tolerance(w: PlaneVector, tol: f64) -> Result<CausalCharacter> {
    if w.x == 0.0 && w.y == 0.0 {
        return Err(Error::ZeroVector);
    }
    let q = metric(w, w);
    Ok(if q > tol {
        CausalCharacter::Spacelike
    } else if q < -tol {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    })
}

/// Lorentzian pseudodistance from the origin, `sqrt|-x^2 + y^2|`.
pub fn pseudodistance_origin(p: PlanePoint) -> f64 {
    (p.u() * p.v()).abs().sqrt()
}

/// Lorentzian pseudodistance between two points.
pub fn pseudodistance(p: PlanePoint, q: PlanePoint) -> f64 {
    pseudodistance_origin(q - p)
}

/// First and second derivatives of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub xd: f64,
    pub yd: f64,
    pub xdd: f64,
    pub ydd: f64,
}

impl Jet {
    pub fn new(xd: f64, yd: f64, xdd: f64, ydd: f64) -> Self {
        Jet { xd, yd, xdd, ydd }
    }
}

/// Signed curvature `ε (ẍ ẏ − ẋ ÿ)` of a unit-speed jet.
///
/// Rejects jets whose speed differs from ε by more than `tol`.
pub fn signed_curvature_from_jet(jet: Jet, epsilon: CausalSign, tol: f64) -> Result<f64> {
    let (ud, vd) = (jet.yd + jet.xd, jet.yd - jet.xd);
    let residual = (ud * vd - epsilon.value()).abs();
    if !(residual <= tol) {
        return Err(Error::NotUnitSpeed { residual });
    }
    let (udd, vdd) = (jet.ydd + jet.xdd, jet.ydd - jet.xdd);
    Ok(curvature_null(epsilon.value(), ud, vd, udd, vdd))
}

/// `ε (ẍ ẏ − ẋ ÿ)` written in null coordinates: `ε (ü v̇ − u̇ v̈) / 2`.
pub(crate) fn curvature_null(eps: f64, ud: f64, vd: f64, udd: f64, vdd: f64) -> f64 {
    0.5 * eps * (udd * vd - ud * vdd)
}

/// Tangent and normal `N = (ẏ, ẋ)` of a unit-speed curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub tangent: PlaneVector,
    pub normal: PlaneVector,
    pub epsilon: CausalSign,
}

impl FrenetFrame {
    pub fn new(tangent: PlaneVector, epsilon: CausalSign, tol: f64) -> Result<Self> {
        let residual = (metric(tangent, tangent) - epsilon.value()).abs();
        if !(residual <= tol) {
            return Err(Error::NotUnitSpeed { residual });
        }
        Ok(FrenetFrame {
            tangent,
            normal: tangent.swap(),
            epsilon,
        })
    }
}

/// The ν-orthochrone transformation (a boost).
pub fn orthochrone(nu: f64, p: PlanePoint) -> PlanePoint {
    let (sh, ch) = (nu.sinh(), nu.cosh());
    Vec2::new(ch * p.x + sh * p.y, sh * p.x + ch * p.y)
}

/// Which pair of opposite wedges of the light cone a point lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `|y| >= |x|`: `x = ρ sinh ν, y = ρ cosh ν`.
    Plus,
    /// `|x| >= |y|`: `x = ρ cosh ν, y = ρ sinh ν`.
    Minus,
}

impl Branch {
    pub fn value(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Sign of the dominant coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Pos,
    Neg,
}

impl Side {
    pub fn value(self) -> f64 {
        match self {
            Side::Pos => 1.0,
            Side::Neg => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudopolarPoint {
    pub rho: f64,
    pub nu: f64,
    pub branch: Branch,
    pub sign: Side,
    /// Set for points on the light cone, where ν is undefined and reported as 0.
    pub indeterminate: bool,
}

impl PseudopolarPoint {
    pub fn new(rho: f64, nu: f64, branch: Branch, sign: Side) -> Self {
        PseudopolarPoint {
            rho,
            nu,
            branch,
            sign,
            indeterminate: false,
        }
    }
}

pub fn to_pseudopolar(p: PlanePoint) -> PseudopolarPoint {
    let branch = if p.y.abs() >= p.x.abs() {
        Branch::Plus
    } else {
        Branch::Minus
    };
    let dominant = match branch {
        Branch::Plus => p.y,
        Branch::Minus => p.x,
    };
    let sign = if dominant >= 0.0 { Side::Pos } else { Side::Neg };
    let (u, v) = (p.u(), p.v());
    if (u * v).abs() <= light_cone_tolerance(p) {
        return PseudopolarPoint {
            rho: 0.0,
            nu: 0.0,
            branch,
            sign,
            indeterminate: true,
        };
    }
    // |u| = ρ e^ν and |v| = ρ e^-ν on all four wedges
    PseudopolarPoint {
        rho: (u * v).abs().sqrt(),
        nu: 0.5 * (u / v).abs().ln(),
        branch,
        sign,
        indeterminate: false,
    }
}

pub fn from_pseudopolar(q: PseudopolarPoint) -> PlanePoint {
    let (sh, ch) = (q.nu.sinh(), q.nu.cosh());
    let r = q.rho * q.sign.value();
    match q.branch {
        Branch::Plus => Vec2::new(r * sh, r * ch),
        Branch::Minus => Vec2::new(r * ch, r * sh),
    }
}

pub fn uv_coords(p: PlanePoint) -> (f64, f64) {
    (p.u(), p.v())
}

pub fn xy_from_uv(u: f64, v: f64) -> PlanePoint {
    Vec2::new(0.5 * (u - v), 0.5 * (u + v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn metric_on_axes_and_light_cone() {
        assert_eq!(metric(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)), -1.0);
        assert_eq!(metric(Vec2::new(0.0, 1.0), Vec2::new(0.0, 1.0)), 1.0);
        assert_eq!(metric(Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)), 0.0);
    }

    #[test]
    fn causal_characters() {
        assert_eq!(
            causal_character(Vec2::new(0.0, 1.0)).unwrap(),
            CausalCharacter::Spacelike
        );
        assert_eq!(
            causal_character(Vec2::new(1.0, 0.0)).unwrap(),
            CausalCharacter::Timelike
        );
        assert_eq!(
            causal_character(Vec2::new(2.0, 2.0)).unwrap(),
            CausalCharacter::Lightlike
        );
        assert_eq!(causal_character(Vec2::ZERO), Err(Error::ZeroVector));
    }

    #[test]
    fn pseudodistances() {
        assert_eq!(pseudodistance_origin(Vec2::new(0.0, 3.0)), 3.0);
        assert_eq!(pseudodistance_origin(Vec2::new(5.0, 5.0)), 0.0);
        assert_abs_diff_eq!(pseudodistance_origin(Vec2::new(3.0, 5.0)), 4.0, epsilon = 1e-15);
        let p = Vec2::new(1.0, 0.0);
        assert_eq!(pseudodistance(p, p), 0.0);
        assert_eq!(pseudodistance(Vec2::ZERO, Vec2::new(0.0, 2.0)), 2.0);
        assert_abs_diff_eq!(
            pseudodistance(p, Vec2::new(4.0, 4.0)),
            7f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn geodesic_jet_has_zero_curvature() {
        let phi: f64 = 0.7;
        let jet = Jet::new(phi.sinh(), phi.cosh(), 0.0, 0.0);
        let k = signed_curvature_from_jet(jet, CausalSign::Spacelike, 1e-12).unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn pseudocircle_jet_has_unit_curvature() {
        // ρ = 2 sinh(s/2), ν = s/2 on the PLUS wedge: x = 2 sinh²(s/2), y = sinh s
        for &s in &[-1.3f64, 0.2, 2.5] {
            let jet = Jet::new(s.sinh(), s.cosh(), s.cosh(), s.sinh());
            let k = signed_curvature_from_jet(jet, CausalSign::Spacelike, 1e-12).unwrap();
            assert_abs_diff_eq!(k, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn grim_reaper_jet_at_one() {
        // u = -s²/2, v = -ln s (spacelike): κ(1) = 1
        let s = 1.0f64;
        let (ud, vd, udd, vdd) = (-s, -1.0 / s, -1.0, 1.0 / (s * s));
        let jet = Jet::new(0.5 * (ud - vd), 0.5 * (ud + vd), 0.5 * (udd - vdd), 0.5 * (udd + vdd));
        let k = signed_curvature_from_jet(jet, CausalSign::Spacelike, 1e-12).unwrap();
        assert_abs_diff_eq!(k, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_unit_jet() {
        let jet = Jet::new(0.0, 2.0, 0.0, 0.0);
        assert!(matches!(
            signed_curvature_from_jet(jet, CausalSign::Spacelike, 1e-9),
            Err(Error::NotUnitSpeed { .. })
        ));
    }

    #[test]
    fn orthochrone_examples() {
        let p = Vec2::new(0.3, -1.7);
        assert_eq!(orthochrone(0.0, p), p);
        let q = orthochrone(2f64.ln(), Vec2::new(1.0, 0.0));
        assert_abs_diff_eq!(q.x, 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(q.y, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn orthochrone_composes_geodesics() {
        let (phi0, nu) = (0.4f64, -1.1f64);
        for &s in &[-2.0, 0.5, 3.0] {
            let a = orthochrone(nu, Vec2::new(phi0.sinh() * s, phi0.cosh() * s));
            let b = Vec2::new((phi0 + nu).sinh() * s, (phi0 + nu).cosh() * s);
            assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-13);
            assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-13);
        }
    }

    #[test]
    fn pseudopolar_examples() {
        let a = to_pseudopolar(Vec2::new(0.0, 2.0));
        assert_eq!((a.rho, a.nu, a.branch, a.sign), (2.0, 0.0, Branch::Plus, Side::Pos));
        let b = to_pseudopolar(Vec2::new(2.0, 0.0));
        assert_eq!((b.rho, b.nu, b.branch, b.sign), (2.0, 0.0, Branch::Minus, Side::Pos));
        let c = from_pseudopolar(PseudopolarPoint::new(1.0, 2f64.ln(), Branch::Plus, Side::Pos));
        assert_abs_diff_eq!(c.x, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(c.y, 1.25, epsilon = 1e-15);
    }

    #[test]
    fn light_cone_is_flagged() {
        let q = to_pseudopolar(Vec2::new(-3.0, 3.0));
        assert!(q.indeterminate);
        assert_eq!(q.rho, 0.0);
    }

    #[test]
    fn minus_wedge_sign_follows_x() {
        let q = to_pseudopolar(Vec2::new(2.0, -1.0));
        assert_eq!((q.branch, q.sign), (Branch::Minus, Side::Pos));
        assert!(q.nu < 0.0);
        let r = to_pseudopolar(Vec2::new(-2.0, 1.0));
        assert_eq!((r.branch, r.sign), (Branch::Minus, Side::Neg));
    }

    #[test]
    fn uv_examples() {
        assert_eq!(uv_coords(Vec2::ZERO), (0.0, 0.0));
        assert_eq!(uv_coords(Vec2::new(1.0, 3.0)), (4.0, 2.0));
        assert_eq!(xy_from_uv(4.0, 2.0), Vec2::new(1.0, 3.0));
    }

    #[test]
    fn frenet_frame_is_orthogonal() {
        let phi: f64 = -0.8;
        let t = Vec2::new(phi.cosh(), phi.sinh());
        let f = FrenetFrame::new(t, CausalSign::Timelike, 1e-12).unwrap();
        assert_abs_diff_eq!(metric(f.tangent, f.normal), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(metric(f.normal, f.normal), 1.0, epsilon = 1e-14);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -100.0f64..100.0
    }

    proptest! {
        #[test]
        fn metric_is_symmetric_bilinear(ax in coord(), ay in coord(), bx in coord(), by in coord(),
                                        cx in coord(), cy in coord(), k in -5.0f64..5.0) {
            let (a, b, c) = (Vec2::new(ax, ay), Vec2::new(bx, by), Vec2::new(cx, cy));
            let scale = 1.0 + a.euclidean_norm_sq() + b.euclidean_norm_sq() + c.euclidean_norm_sq();
            prop_assert!((metric(a, b) - metric(b, a)).abs() <= 1e-14 * scale);
            let lhs = metric(a * k + b, c);
            let rhs = k * metric(a, c) + metric(b, c);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * (1.0 + k.abs()));
        }

        #[test]
        fn swap_flips_causal_character(x in coord(), y in coord()) {
            let w = Vec2::new(x, y);
            prop_assume!((x.abs() - y.abs()).abs() > 1e-3);
            let a = causal_character(w).unwrap();
            let b = causal_character(w.swap()).unwrap();
            match a {
                CausalCharacter::Spacelike => prop_assert_eq!(b, CausalCharacter::Timelike),
                CausalCharacter::Timelike => prop_assert_eq!(b, CausalCharacter::Spacelike),
                CausalCharacter::Lightlike => prop_assert!(false),
            }
        }

        #[test]
        fn pseudopolar_round_trip(x in coord(), y in coord()) {
            prop_assume!((x.abs() - y.abs()).abs() > 1e-3);
            let p = Vec2::new(x, y);
            let back = from_pseudopolar(to_pseudopolar(p));
            let scale = 1.0 + x.abs().max(y.abs());
            prop_assert!((back.x - x).abs() <= 1e-12 * scale);
            prop_assert!((back.y - y).abs() <= 1e-12 * scale);
        }

        #[test]
        fn pseudopolar_inverse_round_trip(rho in 1e-3f64..50.0, nu in -3.0f64..3.0,
                                          plus in any::<bool>(), pos in any::<bool>()) {
            let q = PseudopolarPoint::new(
                rho, nu,
                if plus { Branch::Plus } else { Branch::Minus },
                if pos { Side::Pos } else { Side::Neg },
            );
            let back = to_pseudopolar(from_pseudopolar(q));
            prop_assert_eq!(back.branch, q.branch);
            prop_assert_eq!(back.sign, q.sign);
            prop_assert!((back.rho - rho).abs() <= 1e-12 * rho.max(1.0));
            prop_assert!((back.nu - nu).abs() <= 1e-12);
        }

        #[test]
        fn orthochrone_is_an_isometry(ax in coord(), ay in coord(), bx in coord(), by in coord(),
                                      nu in -2.0f64..2.0) {
            let (a, b) = (Vec2::new(ax, ay), Vec2::new(bx, by));
            let d = b - a;
            let d2 = orthochrone(nu, b) - orthochrone(nu, a);
            let scale = (1.0 + d.euclidean_norm_sq()) * (2.0 * nu.abs()).exp();
            prop_assert!((metric(d, d) - metric(d2, d2)).abs() <= 1e-12 * scale);
        }
    }
}
