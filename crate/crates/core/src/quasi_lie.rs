//! The 3-bracket `μ = Σ_k μ³_k`, the Jacobiator of `[−,−]`, the quasi-Jacobi
//! check, the fully symmetric bracket `s`, and the `P`/`u_ω` diagnostics.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::algebra::{ConjClass, LoopCombination};
use crate::error::Result;
use crate::homotopy::{bullet_lc, gate_brace_lc, second_bracket_lc};
use crate::surface::{GateOrientation, QuasiSurface};

/// `μ(x,y,z) = Σ_k μ³_k(x,y,z)`.
pub fn mu_total(qs: &QuasiSurface, x: &LoopCombination, y: &LoopCombination, z: &LoopCombination) -> Result<LoopCombination> {
    let mut out = LoopCombination::zero();
    for k in 0..qs.gate_count() {
        out += &gate_brace_lc(qs, k, &[x, y, z])?;
    }
    Ok(out)
}

pub fn mu_classes(qs: &QuasiSurface, x: &ConjClass, y: &ConjClass, z: &ConjClass) -> Result<LoopCombination> {
    let wrap = |c: &ConjClass| LoopCombination::from_class(c.clone());
    mu_total(qs, &wrap(x), &wrap(y), &wrap(z))
}

/// `[[x,y],z] + [[y,z],x] + [[z,x],y]`.
pub fn jacobiator(qs: &QuasiSurface, x: &LoopCombination, y: &LoopCombination, z: &LoopCombination) -> Result<LoopCombination> {
    let br = |a: &LoopCombination, b: &LoopCombination| second_bracket_lc(qs, a, b);
    Ok(br(&br(x, y)?, z)? + br(&br(y, z)?, x)? + br(&br(z, x)?, y)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport {
    /// The Jacobiator.
    pub lhs: LoopCombination,
    /// `μ(x,y,z) − μ(y,x,z)`.
    pub rhs: LoopCombination,
    pub difference: LoopCombination,
    pub equal: bool,
}

impl JacobiReport {
    pub fn to_json(&self) -> Value {
        json!({
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "difference": self.difference.to_json(),
            "equal": self.equal,
        })
    }
}

/// Both sides of the quasi-Jacobi identity
/// `[[x,y],z] + [[y,z],x] + [[z,x],y] = μ(x,y,z) − μ(y,x,z)`.
pub fn verify_quasi_jacobi(
    qs: &QuasiSurface,
    x: &LoopCombination,
    y: &LoopCombination,
    z: &LoopCombination,
) -> Result<JacobiReport> {
    let lhs = jacobiator(qs, x, y, z)?;
    let rhs = mu_total(qs, x, y, z)? - mu_total(qs, y, x, z)?;
    let difference = &lhs - &rhs;
    Ok(JacobiReport {
        equal: difference.is_zero(),
        lhs,
        rhs,
        difference,
    })
}

/// `s(x,y,z) = 2μ(x,y,z) − [[x,y],z] − [[y,z],x] − [[z,x],y]`.
pub fn s_bracket(qs: &QuasiSurface, x: &LoopCombination, y: &LoopCombination, z: &LoopCombination) -> Result<LoopCombination> {
    Ok(mu_total(qs, x, y, z)?.scaled(&BigInt::from(2)) - jacobiator(qs, x, y, z)?)
}

/// `P(x,y,z) = (xy)z + (yz)x + (zx)y + z(yx) + x(zy) + y(xz)` for a bilinear
/// product.
pub fn p_polynomial(
    x: &LoopCombination,
    y: &LoopCombination,
    z: &LoopCombination,
    mul: &dyn Fn(&LoopCombination, &LoopCombination) -> Result<LoopCombination>,
) -> Result<LoopCombination> {
    Ok(mul(&mul(x, y)?, z)?
        + mul(&mul(y, z)?, x)?
        + mul(&mul(z, x)?, y)?
        + mul(z, &mul(y, x)?)?
        + mul(x, &mul(z, y)?)?
        + mul(y, &mul(x, z)?)?)
}

/// `u(x,y,z) = (xy)z + (yz)x + (zx)y`.
pub fn u_polynomial(
    x: &LoopCombination,
    y: &LoopCombination,
    z: &LoopCombination,
    mul: &dyn Fn(&LoopCombination, &LoopCombination) -> Result<LoopCombination>,
) -> Result<LoopCombination> {
    Ok(mul(&mul(x, y)?, z)? + mul(&mul(y, z)?, x)? + mul(&mul(z, x)?, y)?)
}

/// Jacobiator of the commutator bracket of a bilinear product.
pub fn commutator_jacobiator(
    x: &LoopCombination,
    y: &LoopCombination,
    z: &LoopCombination,
    mul: &dyn Fn(&LoopCombination, &LoopCombination) -> Result<LoopCombination>,
) -> Result<LoopCombination> {
    let br = |a: &LoopCombination, b: &LoopCombination| -> Result<LoopCombination> { Ok(mul(a, b)? - mul(b, a)?) };
    Ok(br(&br(x, y)?, z)? + br(&br(y, z)?, x)? + br(&br(z, x)?, y)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub omega: GateOrientation,
    pub p: LoopCombination,
    pub p_swapped: LoopCombination,
    pub u_omega: LoopCombination,
    pub u_reversed: LoopCombination,
    pub jacobiator: LoopCombination,
    pub mu_difference: LoopCombination,
    /// `P = u_ω + u_ω̄`.
    pub p_splits: bool,
    /// Jacobiator `= P(x,y,z) − P(y,x,z)`.
    pub jacobiator_matches_p: bool,
    /// `P(x,y,z) − P(y,x,z) = μ(x,y,z) − μ(y,x,z)`.
    pub p_matches_mu: bool,
}

impl Diagnostics {
    pub fn to_json(&self) -> Value {
        json!({
            "omega": self.omega.to_string(),
            "P": self.p.to_json(),
            "P_swapped": self.p_swapped.to_json(),
            "u_omega": self.u_omega.to_json(),
            "u_omega_bar": self.u_reversed.to_json(),
            "jacobiator": self.jacobiator.to_json(),
            "mu_difference": self.mu_difference.to_json(),
            "P_equals_u_sum": self.p_splits,
            "jacobiator_equals_P_difference": self.jacobiator_matches_p,
            "P_difference_equals_mu_difference": self.p_matches_mu,
        })
    }

    pub fn all_hold(&self) -> bool {
        self.p_splits && self.jacobiator_matches_p && self.p_matches_mu
    }
}

/// `P`, `u_ω`, `u_ω̄` with product `•_ω`, and the identities relating them to
/// the Jacobiator and to `μ`.
pub fn p_and_u_diagnostics(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    x: &LoopCombination,
    y: &LoopCombination,
    z: &LoopCombination,
) -> Result<Diagnostics> {
    omega.check(qs)?;
    let reversed = omega.reversed();
    let mul = |a: &LoopCombination, b: &LoopCombination| bullet_lc(qs, omega, a, b);
    let mul_rev = |a: &LoopCombination, b: &LoopCombination| bullet_lc(qs, &reversed, a, b);
    let p = p_polynomial(x, y, z, &mul)?;
    let p_swapped = p_polynomial(y, x, z, &mul)?;
    let u_omega = u_polynomial(x, y, z, &mul)?;
    let u_reversed = u_polynomial(x, y, z, &mul_rev)?;
    let jac = jacobiator(qs, x, y, z)?;
    let mu_difference = mu_total(qs, x, y, z)? - mu_total(qs, y, x, z)?;
    let p_diff = &p - &p_swapped;
    Ok(Diagnostics {
        omega: omega.clone(),
        p_splits: p == &u_omega + &u_reversed,
        jacobiator_matches_p: jac == p_diff,
        p_matches_mu: p_diff == mu_difference,
        p,
        p_swapped,
        u_omega,
        u_reversed,
        jacobiator: jac,
        mu_difference,
    })
}

/// `δ(1) = 1`, `δ(−1) = 0`.
pub fn delta1(e: i64) -> i64 {
    (e + 1) / 2
}

/// `δ(ε,ε′,ε″) = εε′δ(ε″) + εε″δ(ε′) + ε′ε″(1 − δ(ε))`.
pub fn delta3(e: [i64; 3]) -> i64 {
    let [a, b, c] = e;
    a * b * delta1(c) + a * c * delta1(b) + b * c * (1 - delta1(a))
}

/// Right side of `δ(ε,ε′,ε″) − εε′ε″ = εε′δ(ε″) + εε″(1 − δ(ε′)) + ε′ε″(1 − δ(ε))`.
pub fn delta3_shifted(e: [i64; 3]) -> i64 {
    let [a, b, c] = e;
    a * b * delta1(c) + a * c * (1 - delta1(b)) + b * c * (1 - delta1(a))
}

/// All eight sign triples.
pub fn sign_triples() -> impl Iterator<Item = [i64; 3]> {
    (0..8).map(|m| [0, 1, 2].map(|i| if m >> i & 1 == 1 { -1 } else { 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lc(s: &str) -> LoopCombination {
        LoopCombination::from_class(s.parse().unwrap())
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta3([1, 1, 1]), 2);
        for t in sign_triples() {
            let [a, b, c] = t;
            for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                assert_eq!(delta3(p), delta3(t));
            }
            assert_eq!(delta3(t) - a * b * c, delta3_shifted(t));
        }
    }

    #[test]
    fn qt2_mu_vanishes() {
        let qs = fixtures::qt2();
        let z = lc("g1");
        assert!(mu_total(&qs, &z, &z, &z).unwrap().is_zero());
        assert!(s_bracket(&qs, &z, &z, &z).unwrap().is_zero());
        let r = verify_quasi_jacobi(&qs, &z, &z, &z).unwrap();
        assert!(r.equal && r.lhs.is_zero());
    }

    #[test]
    fn trivial_arguments() {
        let qs = fixtures::qg1();
        let e = LoopCombination::from_class(ConjClass::trivial());
        let x = lc("g1 g2");
        assert!(mu_total(&qs, &x, &e, &x).unwrap().is_zero());
        let zero = LoopCombination::zero();
        let d = p_and_u_diagnostics(&qs, &GateOrientation::ccw(4), &zero, &zero, &zero).unwrap();
        assert!(d.p.is_zero() && d.u_omega.is_zero() && d.u_reversed.is_zero() && d.all_hold());
    }

    #[test]
    fn p_identity_is_pure_algebra() {
        // the identity holds for any bilinear product; use concatenation of classes
        let mul = |a: &LoopCombination, b: &LoopCombination| -> Result<LoopCombination> {
            let mut out = LoopCombination::zero();
            for (x, i) in a.iter() {
                for (y, j) in b.iter() {
                    let c = ConjClass::from_letters(x.letters().iter().chain(y.letters()).copied());
                    out.add_term(c, i * j);
                }
            }
            Ok(out)
        };
        let (x, y, z) = (lc("g1"), lc("g2 g1"), lc("g2^-1"));
        let lhs = commutator_jacobiator(&x, &y, &z, &mul).unwrap();
        let rhs = p_polynomial(&x, &y, &z, &mul).unwrap() - p_polynomial(&y, &x, &z, &mul).unwrap();
        assert_eq!(lhs, rhs);
    }
}
