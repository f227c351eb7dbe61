//! The homological intersection forms `x ·_ω y` and `i_X` on `H₁(X)`.

use crate::algebra::{abelianize, ConjClass, GroupWord, Letter};
use crate::diagram::{combine_generic, word_to_diagram, ExplicitDiagram, GenericFamily, LaneDiagram};
use crate::error::{Error, Result};
use crate::surface::{GateOrientation, QuasiSurface};

/// A homology class as its coordinate vector on the free generators.
pub type H1Class = Vec<i64>;

/// `Σ_r ε_r(a,b) + Σ_{T_ω(a,b)} ε(ω,k) ε_p(a) ε_q(b)` for loops `a`, `b` of a
/// family in generic position. `T_ω(a,b)` holds the gate points `p ∈ a`,
/// `q ∈ b` on a common gate with `q` before `p` in the `ω` direction.
pub fn first_form_generic(g: &GenericFamily, omega: &GateOrientation, a: usize, b: usize) -> i64 {
    let surface: i64 = g
        .surface
        .iter()
        .filter_map(|r| r.oriented(a, b))
        .map(|(s, _, _)| s)
        .sum();
    let mut gates = 0;
    for (pi, p) in g.traces[a].crossings.iter().enumerate() {
        let pos_p = g.position(crate::diagram::PointRef { loop_index: a, crossing: pi });
        let k = p.gate;
        for (qi, q) in g.crossings_at(b, k) {
            let pos_q = g.position(crate::diagram::PointRef { loop_index: b, crossing: qi });
            if before(omega.sign(k), pos_q, pos_p) {
                gates += omega.sign(k) * p.sign * q.sign;
            }
        }
    }
    surface + gates
}

/// Whether position `q` precedes `p` along a gate traversed counterclockwise
/// (`sign = +1`) or clockwise (`sign = -1`).
pub(crate) fn before(sign: i64, q: usize, p: usize) -> bool {
    if sign > 0 {
        q < p
    } else {
        q > p
    }
}

/// `a ·_ω b` for loops `a`, `b` of a combined lane diagram.
pub fn first_form(qs: &QuasiSurface, omega: &GateOrientation, d: &LaneDiagram, a: usize, b: usize) -> i64 {
    first_form_generic(&d.generic(qs), omega, a, b)
}

pub fn first_form_explicit(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    d: &ExplicitDiagram,
    a: usize,
    b: usize,
) -> i64 {
    first_form_generic(&d.generic(qs), omega, a, b)
}

/// `x ·_ω y` on classes, through their combined lane diagrams.
pub fn first_form_classes(qs: &QuasiSurface, omega: &GateOrientation, x: &ConjClass, y: &ConjClass) -> Result<i64> {
    omega.check(qs)?;
    let d = combine_generic(&[word_to_diagram(qs, x)?, word_to_diagram(qs, y)?]);
    Ok(first_form(qs, omega, &d, 0, 1))
}

pub fn h1_class(qs: &QuasiSurface, c: &ConjClass) -> H1Class {
    abelianize(&c.word(), qs.rank())
}

/// The loop `g₁^{x₁} ⋯ g_r^{x_r}`.
pub fn representative(x: &H1Class) -> ConjClass {
    let letters = x.iter().enumerate().flat_map(|(g, &e)| {
        std::iter::repeat_n(Letter::new(g, e >= 0), e.unsigned_abs() as usize)
    });
    crate::algebra::canonical_conjugacy(&GroupWord::new(letters.collect()))
}

fn check_class(qs: &QuasiSurface, x: &H1Class) -> Result<()> {
    if x.len() != qs.rank() {
        return Err(Error::Arity {
            expected: qs.rank(),
            found: x.len(),
        });
    }
    Ok(())
}

/// `x ·_ω y` on homology classes.
pub fn first_form_h1(qs: &QuasiSurface, omega: &GateOrientation, x: &H1Class, y: &H1Class) -> Result<i64> {
    check_class(qs, x)?;
    check_class(qs, y)?;
    first_form_classes(qs, omega, &representative(x), &representative(y))
}

/// `i_X(x,y) = x ·_ω y − y ·_ω x`, computed with the given orientation.
pub fn second_form_with(qs: &QuasiSurface, omega: &GateOrientation, x: &H1Class, y: &H1Class) -> Result<i64> {
    Ok(first_form_h1(qs, omega, x, y)? - first_form_h1(qs, omega, y, x)?)
}

/// `i_X(x,y)`, computed with the all-counterclockwise orientation.
pub fn second_form(qs: &QuasiSurface, x: &H1Class, y: &H1Class) -> Result<i64> {
    second_form_with(qs, &GateOrientation::ccw(qs.gate_count()), x, y)
}

fn unit(rank: usize, i: usize) -> H1Class {
    let mut v = vec![0; rank];
    v[i] = 1;
    v
}

/// Gram matrix of `i_X` on the generator basis.
pub fn second_form_gram(qs: &QuasiSurface) -> Result<Vec<Vec<i64>>> {
    let r = qs.rank();
    (0..r)
        .map(|i| (0..r).map(|j| second_form(qs, &unit(r, i), &unit(r, j))).collect())
        .collect()
}

/// Gram matrix of `·_ω` on the generator basis.
pub fn first_form_gram(qs: &QuasiSurface, omega: &GateOrientation) -> Result<Vec<Vec<i64>>> {
    let r = qs.rank();
    (0..r)
        .map(|i| (0..r).map(|j| first_form_h1(qs, omega, &unit(r, i), &unit(r, j))).collect())
        .collect()
}

/// `v_k` on homology: the signed number of crossings with gate `k`.
pub fn v_h1(qs: &QuasiSurface, k: usize, x: &H1Class) -> i64 {
    // exponent of the gate edge in each generator path, entries counted +1
    let e = qs.gate_edge(k);
    (0..qs.rank())
        .map(|g| {
            let through: i64 = qs
                .generator_path(g)
                .iter()
                .filter(|s| s.edge == e)
                .map(|s| if s.forward { -1 } else { 1 })
                .sum();
            through * x[g]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(s: &str) -> ConjClass {
        s.parse().unwrap()
    }

    #[test]
    fn qt2_values() {
        let qs = fixtures::qt2();
        let ccw = GateOrientation::ccw(2);
        assert_eq!(first_form_classes(&qs, &ccw, &c("g1"), &c("g1")).unwrap(), 1);
        assert_eq!(first_form_classes(&qs, &ccw.flip(0), &c("g1"), &c("g1")).unwrap(), 0);
        assert_eq!(second_form_gram(&qs).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn y_loops_pair_trivially() {
        let qs = fixtures::qy2();
        let p = c("g1");
        assert_eq!(v_h1(&qs, 0, &h1_class(&qs, &p)), 0);
        for omega in GateOrientation::all(2) {
            for y in ["g1", "g2", "g2 g1^-1 g2"] {
                assert_eq!(first_form_classes(&qs, &omega, &p, &c(y)).unwrap(), 0);
                assert_eq!(first_form_classes(&qs, &omega, &c(y), &p).unwrap(), 0);
            }
        }
    }

    #[test]
    fn qg1_is_skew() {
        let qs = fixtures::qg1();
        let gram = second_form_gram(&qs).unwrap();
        assert_eq!(gram[0][1], -gram[1][0]);
        assert_eq!(gram[0][0], 0);
        assert_eq!(gram[1][1], 0);
    }

    #[test]
    fn arity_is_checked() {
        let qs = fixtures::qg1();
        assert!(second_form(&qs, &vec![1], &vec![0, 1]).is_err());
    }
}
