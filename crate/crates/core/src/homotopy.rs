//! The homotopy intersection forms `x •_ω y` and `[x,y]`, the geometric gate
//! braces `μ^m_k`, and the based pairing `x •_ω y ∈ A` for a based loop `y`.
//!
//! Grafts are computed on generator words: `⟨a_p b_q⟩` is the class of the
//! rotation of `a` at `p` followed by the rotation of `b` at `q`.

use crate::algebra::{
    reduce_word, ConjClass, GroupRingElement, GroupWord, Letter, LoopCombination, Tally,
};
use crate::diagram::{
    based_loop_from_word, combine_generic, loop_from_word, word_to_diagram, ExplicitDiagram,
    GenericFamily, LaneDiagram, LoopTrace, PointRef,
};
use crate::error::{Error, Result};
use crate::homology::before;
use crate::surface::{GateOrientation, QuasiSurface};

fn graft(a: &LoopTrace, ra: usize, b: &LoopTrace, rb: usize) -> ConjClass {
    ConjClass::from_letters(a.rotation(ra).chain(b.rotation(rb)))
}

/// `a •_ω b` for loops of a family in generic position: surface crossings
/// contribute `ε_r ⟨a_r b_r⟩`, gate pairs in `T_ω(a,b)` contribute
/// `ε(ω,k) ε_p ε_q ⟨a_p b_q⟩`.
pub fn bullet_generic(g: &GenericFamily, omega: &GateOrientation, a: usize, b: usize) -> LoopCombination {
    let (ta, tb) = (&g.traces[a], &g.traces[b]);
    let mut out = Tally::new();
    for r in &g.surface {
        if let Some((sign, ra, rb)) = r.oriented(a, b) {
            let pa = ta.arc_at(ra.segment).expect("crossing on an arc").rot;
            let pb = tb.arc_at(rb.segment).expect("crossing on an arc").rot;
            out.add(graft(ta, pa, tb, pb), sign);
        }
    }
    for (pi, p) in ta.crossings.iter().enumerate() {
        let k = p.gate;
        let pos_p = g.position(PointRef { loop_index: a, crossing: pi });
        for (qi, q) in g.crossings_at(b, k) {
            let pos_q = g.position(PointRef { loop_index: b, crossing: qi });
            if before(omega.sign(k), pos_q, pos_p) {
                out.add(graft(ta, p.rot, tb, q.rot), omega.sign(k) * p.sign * q.sign);
            }
        }
    }
    out.finish()
}

pub fn bullet_diagram(qs: &QuasiSurface, omega: &GateOrientation, d: &LaneDiagram, a: usize, b: usize) -> LoopCombination {
    bullet_generic(&d.generic(qs), omega, a, b)
}

pub fn bullet_explicit(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    d: &ExplicitDiagram,
    a: usize,
    b: usize,
) -> LoopCombination {
    bullet_generic(&d.generic(qs), omega, a, b)
}

/// `x •_ω y` on classes.
pub fn bullet(qs: &QuasiSurface, omega: &GateOrientation, x: &ConjClass, y: &ConjClass) -> Result<LoopCombination> {
    omega.check(qs)?;
    let d = combine_generic(&[word_to_diagram(qs, x)?, word_to_diagram(qs, y)?]);
    Ok(bullet_diagram(qs, omega, &d, 0, 1))
}

/// Bilinear extension of [`bullet`].
pub fn bullet_lc(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    x: &LoopCombination,
    y: &LoopCombination,
) -> Result<LoopCombination> {
    let mut out = LoopCombination::zero();
    for (cx, kx) in x.iter() {
        for (cy, ky) in y.iter() {
            out.add_assign_scaled(&bullet(qs, omega, cx, cy)?, &(kx * ky));
        }
    }
    Ok(out)
}

/// `[x,y] = x •_ω y − y •_ω x` for a given orientation.
pub fn second_bracket_with(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    x: &ConjClass,
    y: &ConjClass,
) -> Result<LoopCombination> {
    Ok(bullet(qs, omega, x, y)? - bullet(qs, omega, y, x)?)
}

/// `[x,y]`, computed with the all-counterclockwise orientation.
pub fn second_bracket(qs: &QuasiSurface, x: &ConjClass, y: &ConjClass) -> Result<LoopCombination> {
    second_bracket_with(qs, &GateOrientation::ccw(qs.gate_count()), x, y)
}

/// Bilinear extension of [`second_bracket`].
pub fn second_bracket_lc(qs: &QuasiSurface, x: &LoopCombination, y: &LoopCombination) -> Result<LoopCombination> {
    let mut out = LoopCombination::zero();
    for (cx, kx) in x.iter() {
        for (cy, ky) in y.iter() {
            out.add_assign_scaled(&second_bracket(qs, cx, cy)?, &(kx * ky));
        }
    }
    Ok(out)
}

/// `Σ Π ε_{t_i} ⟨u₁ ⋯ u_m⟩` over all choices of one gate-`k` crossing `t_i` on
/// each loop.
pub fn gate_brace_traces(k: usize, traces: &[LoopTrace]) -> LoopCombination {
    let choices: Vec<Vec<(i64, usize)>> = traces
        .iter()
        .map(|t| {
            t.crossings
                .iter()
                .filter(|c| c.gate == k)
                .map(|c| (c.sign, c.rot))
                .collect()
        })
        .collect();
    let mut out = Tally::new();
    if choices.iter().any(Vec::is_empty) {
        return out.finish();
    }
    let mut index = vec![0usize; traces.len()];
    let mut letters: Vec<Letter> = Vec::new();
    loop {
        letters.clear();
        let mut sign = 1;
        for (i, t) in traces.iter().enumerate() {
            let (s, rot) = choices[i][index[i]];
            sign *= s;
            letters.extend(t.rotation(rot));
        }
        out.add(ConjClass::from_letters(letters.iter().copied()), sign);
        let mut i = traces.len();
        loop {
            if i == 0 {
                return out.finish();
            }
            i -= 1;
            index[i] += 1;
            if index[i] < choices[i].len() {
                break;
            }
            index[i] = 0;
        }
    }
}

/// The geometric gate brace `μ^m_k(x₁, …, x_m)`.
pub fn gate_brace_geometric(qs: &QuasiSurface, k: usize, xs: &[&ConjClass]) -> Result<LoopCombination> {
    if k >= qs.gate_count() {
        return Err(Error::UnknownGate(format!("#{k}")));
    }
    if xs.is_empty() {
        return Err(Error::Arity { expected: 1, found: 0 });
    }
    let traces = xs
        .iter()
        .map(|x| Ok(loop_from_word(qs, &x.word())?.trace(qs)))
        .collect::<Result<Vec<_>>>()?;
    Ok(gate_brace_traces(k, &traces))
}

/// Multilinear extension of [`gate_brace_geometric`].
pub fn gate_brace_lc(qs: &QuasiSurface, k: usize, xs: &[&LoopCombination]) -> Result<LoopCombination> {
    let mut out = LoopCombination::zero();
    multilinear(xs, &mut Vec::new(), &num_bigint::BigInt::from(1), &mut |classes, coeff| {
        out.add_assign_scaled(&gate_brace_geometric(qs, k, classes)?, coeff);
        Ok(())
    })?;
    Ok(out)
}

pub(crate) fn multilinear<'a>(
    xs: &[&'a LoopCombination],
    chosen: &mut Vec<&'a ConjClass>,
    coeff: &num_bigint::BigInt,
    f: &mut dyn FnMut(&[&ConjClass], &num_bigint::BigInt) -> Result<()>,
) -> Result<()> {
    match xs.split_first() {
        None => f(chosen, coeff),
        Some((first, rest)) => {
            for (c, k) in first.iter() {
                chosen.push(c);
                multilinear(rest, chosen, &(coeff * k), f)?;
                chosen.pop();
            }
            Ok(())
        }
    }
}

/// The based pairing for loop `a` and the based loop `y` of a family in
/// generic position: each term of `T_ω(a,y)` splices the rotation of `a` into
/// `y` at the crossing point.
pub fn kk_pairing_generic(g: &GenericFamily, omega: &GateOrientation, a: usize, y: usize) -> GroupRingElement {
    let (ta, ty) = (&g.traces[a], &g.traces[y]);
    let mut out = Tally::new();
    for (pi, p) in ta.crossings.iter().enumerate() {
        let k = p.gate;
        let pos_p = g.position(PointRef { loop_index: a, crossing: pi });
        for (qi, q) in g.crossings_at(y, k) {
            let pos_q = g.position(PointRef { loop_index: y, crossing: qi });
            if before(omega.sign(k), pos_q, pos_p) {
                let letters: Vec<Letter> = ty.gens[..q.rot]
                    .iter()
                    .copied()
                    .chain(ta.rotation(p.rot))
                    .chain(ty.gens[q.rot..].iter().copied())
                    .collect();
                out.add(reduce_word(&GroupWord::new(letters)), omega.sign(k) * p.sign * q.sign);
            }
        }
    }
    out.finish()
}

/// `x •_ω y ∈ A` for a class `x` and a based loop `y`.
pub fn kk_pairing(qs: &QuasiSurface, omega: &GateOrientation, x: &ConjClass, y: &GroupWord) -> Result<GroupRingElement> {
    omega.check(qs)?;
    qs.check_word(y)?;
    let d = combine_generic(&[
        word_to_diagram(qs, x)?,
        LaneDiagram::single(based_loop_from_word(qs, &reduce_word(y))?),
    ]);
    Ok(kk_pairing_generic(&d.generic(qs), omega, 0, 1))
}

/// Linear extension of [`kk_pairing`] in both variables.
pub fn kk_pairing_lc(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    x: &LoopCombination,
    y: &GroupRingElement,
) -> Result<GroupRingElement> {
    let mut out = GroupRingElement::zero();
    for (cx, kx) in x.iter() {
        for (w, ky) in y.iter() {
            out.add_assign_scaled(&kk_pairing(qs, omega, cx, w)?, &(kx * ky));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(s: &str) -> ConjClass {
        s.parse().unwrap()
    }

    fn lc(terms: &[(&str, i64)]) -> LoopCombination {
        LoopCombination::from_i64_terms(terms.iter().map(|(s, k)| (c(s), *k)))
    }

    #[test]
    fn qt2_braces() {
        let qs = fixtures::qt2();
        let z = c("g1");
        assert_eq!(gate_brace_geometric(&qs, 0, &[&z]).unwrap(), lc(&[("g1", 1)]));
        assert_eq!(gate_brace_geometric(&qs, 1, &[&z]).unwrap(), lc(&[("g1", -1)]));
        assert_eq!(gate_brace_geometric(&qs, 0, &[&z, &z]).unwrap(), lc(&[("g1 g1", 1)]));
        assert_eq!(gate_brace_geometric(&qs, 1, &[&z, &z, &z]).unwrap(), lc(&[("g1 g1 g1", -1)]));
        let trivial = ConjClass::trivial();
        assert!(gate_brace_geometric(&qs, 0, &[&z, &trivial]).unwrap().is_zero());
    }

    #[test]
    fn qt2_bullet() {
        let qs = fixtures::qt2();
        let z = c("g1");
        let ccw = GateOrientation::ccw(2);
        assert_eq!(bullet(&qs, &ccw, &z, &z).unwrap(), lc(&[("g1 g1", 1)]));
        assert!(bullet(&qs, &ccw.flip(0), &z, &z).unwrap().is_zero());
        assert!(second_bracket(&qs, &z, &c("g1 g1")).unwrap().is_zero());
        assert!(second_bracket(&qs, &z, &ConjClass::trivial()).unwrap().is_zero());
    }

    #[test]
    fn qt2_kk() {
        let qs = fixtures::qt2();
        let ccw = GateOrientation::ccw(2);
        let z: GroupWord = "g1".parse().unwrap();
        assert_eq!(
            kk_pairing(&qs, &ccw, &c("g1"), &z).unwrap(),
            GroupRingElement::from_word("g1 g1".parse().unwrap())
        );
        assert!(kk_pairing(&qs, &ccw, &ConjClass::trivial(), &z).unwrap().is_zero());
    }

    #[test]
    fn y_loops_have_zero_bullet() {
        let qs = fixtures::qy2();
        let p = c("g1");
        for omega in GateOrientation::all(2) {
            for y in ["g2", "g2 g1^-1 g2", "g1"] {
                assert!(bullet(&qs, &omega, &p, &c(y)).unwrap().is_zero());
                assert!(bullet(&qs, &omega, &c(y), &p).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn errors() {
        let qs = fixtures::qt2();
        let z = c("g1");
        assert!(gate_brace_geometric(&qs, 5, &[&z]).is_err());
        assert!(gate_brace_geometric(&qs, 0, &[]).is_err());
        assert!(bullet(&qs, &GateOrientation::ccw(3), &z, &z).is_err());
    }
}
