//! Fox derivatives of a free group ring, the maps `Δ_∂`, and the algebraic
//! m-braces they induce on `Ǎ`.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::algebra::{
    project_p, ring_multiply, Basis, GroupRingElement, GroupWord, Letter, LoopCombination,
};
use crate::error::{Error, Result};

/// A Fox derivative `∂` on `Z[F]`, determined by the images of the free
/// generators.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FoxDerivative {
    images: BTreeMap<usize, GroupRingElement>,
}

impl FoxDerivative {
    pub fn new(images: BTreeMap<usize, GroupRingElement>) -> Self {
        FoxDerivative { images }
    }

    /// The standard partial derivative `∂/∂g_k` on a free group of the given rank.
    pub fn partial(k: usize, rank: usize) -> Self {
        let images = (0..rank)
            .map(|g| {
                let image = if g == k {
                    GroupRingElement::one()
                } else {
                    GroupRingElement::zero()
                };
                (g, image)
            })
            .collect();
        FoxDerivative { images }
    }

    pub fn image(&self, generator: usize) -> Result<&GroupRingElement> {
        self.images
            .get(&generator)
            .ok_or(Error::MissingImage(generator))
    }

    pub fn images(&self) -> &BTreeMap<usize, GroupRingElement> {
        &self.images
    }

    /// `∂` evaluated on a single word.
    pub fn apply_word(&self, w: &GroupWord) -> Result<GroupRingElement> {
        let mut out = GroupRingElement::zero();
        let mut prefix: Vec<Letter> = Vec::with_capacity(w.len());
        for &l in w.letters() {
            let image = self.image(l.generator())?;
            if l.is_positive() {
                let left = GroupRingElement::from_word(GroupWord::new(prefix.clone()));
                out += &ring_multiply(&left, image);
                prefix.push(l);
            } else {
                // ∂(g⁻¹) = −g⁻¹∂(g)
                prefix.push(l);
                let left = GroupRingElement::from_word(GroupWord::new(prefix.clone()));
                out -= &ring_multiply(&left, image);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .images
            .iter()
            .map(|(g, v)| (Letter::pos(*g).to_string(), v.to_json()))
            .collect();
        Value::Object(map)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Json("fox derivative must be an object".into()))?;
        let mut images = BTreeMap::new();
        for (token, value) in obj {
            let w = GroupWord::parse_basis(token)?;
            let g = match w.letters() {
                [l] if l.is_positive() => l.generator(),
                _ => return Err(Error::Json(format!("`{token}` is not a generator"))),
            };
            images.insert(g, GroupRingElement::from_json(value)?);
        }
        Ok(FoxDerivative { images })
    }
}

/// Linear extension of the Fox recursion `∂(xy) = ∂(x) + x∂(y)`.
pub fn fox_apply(d: &FoxDerivative, x: &GroupRingElement) -> Result<GroupRingElement> {
    let mut out = GroupRingElement::zero();
    for (w, c) in x.iter() {
        out.add_assign_scaled(&d.apply_word(w)?, c);
    }
    Ok(out)
}

/// `Δ_∂(x) = Σ (x/a) a⁻¹ x a`, where `∂(x) = Σ (x/a) a`.
pub fn delta_apply(d: &FoxDerivative, x: &GroupRingElement) -> Result<GroupRingElement> {
    let mut out = GroupRingElement::zero();
    for (w, c) in x.iter() {
        for (a, k) in d.apply_word(w)?.iter() {
            out.add_term(a.inverse().mul(w).mul(a), k * c);
        }
    }
    Ok(out)
}

/// `μ(x₁,…,x_m) = p(Δ_{∂₁}(x₁)···Δ_{∂m}(x_m))`, each class lifted to its
/// canonical representative.
pub fn algebraic_brace(ds: &[FoxDerivative], xs: &[LoopCombination]) -> Result<LoopCombination> {
    if ds.len() != xs.len() {
        return Err(Error::Arity {
            expected: ds.len(),
            found: xs.len(),
        });
    }
    if ds.is_empty() {
        return Err(Error::Arity {
            expected: 1,
            found: 0,
        });
    }
    let mut product = GroupRingElement::one();
    for (d, x) in ds.iter().zip(xs) {
        let factor = delta_apply(d, &x.lift())?;
        if factor.is_zero() {
            return Ok(LoopCombination::zero());
        }
        product = ring_multiply(&product, &factor);
    }
    Ok(project_p(&product))
}

/// The Fox derivative `x ↦ ∂(x)g`.
pub fn shift_derivative(d: &FoxDerivative, g: &GroupWord) -> FoxDerivative {
    let right = GroupRingElement::from_word(g.clone());
    FoxDerivative {
        images: d
            .images
            .iter()
            .map(|(k, v)| (*k, ring_multiply(v, &right)))
            .collect(),
    }
}

/// `x ↦ Σ (x/a) a F a⁻¹ x` on words, extended linearly. A derivation of `A`
/// for every `F`.
pub fn fox_derivation(
    d: &FoxDerivative,
    f: &GroupRingElement,
    x: &GroupRingElement,
) -> Result<GroupRingElement> {
    let mut out = GroupRingElement::zero();
    for (w, c) in x.iter() {
        for (a, k) in d.apply_word(w)?.iter() {
            let left = GroupRingElement::from_word(a.clone());
            let right = GroupRingElement::from_word(a.inverse().mul(w));
            let term = ring_multiply(&ring_multiply(&left, f), &right);
            out.add_assign_scaled(&term, &(k * c));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ConjClass, GroupRingElement as G};
    use proptest::prelude::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    fn el(terms: &[(&str, i64)]) -> G {
        G::from_i64_terms(terms.iter().map(|(s, c)| (w(s), *c)))
    }

    fn lc(terms: &[(&str, i64)]) -> LoopCombination {
        LoopCombination::from_i64_terms(terms.iter().map(|(s, c)| (s.parse::<ConjClass>().unwrap(), *c)))
    }

    fn d1() -> FoxDerivative {
        FoxDerivative::partial(0, 2)
    }

    #[test]
    fn fox_examples() {
        assert_eq!(fox_apply(&d1(), &el(&[("g1", 1)])).unwrap(), G::one());
        assert_eq!(fox_apply(&d1(), &el(&[("g1^-1", 1)])).unwrap(), el(&[("g1^-1", -1)]));
        assert_eq!(fox_apply(&d1(), &el(&[("g1 g1", 1)])).unwrap(), el(&[("", 1), ("g1", 1)]));
    }

    #[test]
    fn missing_image_is_an_error() {
        let d = FoxDerivative::partial(0, 1);
        assert_eq!(fox_apply(&d, &el(&[("g2", 1)])), Err(Error::MissingImage(1)));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_apply(&d1(), &el(&[("g1 g1", 1)])).unwrap(), el(&[("g1 g1", 2)]));
        assert!(delta_apply(&d1(), &el(&[("g1 g2 g1^-1", 1), ("g2", -1)])).unwrap().is_zero());
        assert!(delta_apply(&d1(), &el(&[("g2", 1)])).unwrap().is_zero());
    }

    #[test]
    fn brace_examples() {
        let d = d1();
        assert_eq!(
            algebraic_brace(std::slice::from_ref(&d), &[lc(&[("g1 g1", 1)])]).unwrap(),
            lc(&[("g1 g1", 2)])
        );
        assert_eq!(
            algebraic_brace(&[d.clone(), d.clone()], &[lc(&[("g1", 1)]), lc(&[("g1", 1)])]).unwrap(),
            lc(&[("g1 g1", 1)])
        );
        let trivial = lc(&[("", 1)]);
        assert!(algebraic_brace(&[d.clone(), d.clone()], &[lc(&[("g1", 1)]), trivial]).unwrap().is_zero());
        assert!(algebraic_brace(&[d], &[]).is_err());
    }

    #[test]
    fn shift_examples() {
        let d = d1();
        assert_eq!(shift_derivative(&d, &GroupWord::identity()), d);
        let s = shift_derivative(&d, &w("g2"));
        assert_eq!(s.image(0).unwrap(), &el(&[("g2", 1)]));
        assert!(s.image(1).unwrap().is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let d = shift_derivative(&d1(), &w("g2 g1^-1"));
        assert_eq!(FoxDerivative::from_json(&d.to_json()).unwrap(), d);
    }

    /// `aug(∂(x))x` on words; it need not vanish on commutators.
    fn d_aug(d: &FoxDerivative, x: &G) -> G {
        let mut out = G::zero();
        for (word, c) in x.iter() {
            let aug = d.apply_word(word).unwrap().augmentation();
            out.add_term(word.clone(), aug * c);
        }
        out
    }

    #[test]
    fn augmented_map_differs_from_delta_on_commutators() {
        let d = FoxDerivative::partial(0, 2);
        let x = el(&[("g1 g2", 1), ("g2 g1", -1)]);
        assert!(delta_apply(&d, &x).unwrap().is_zero());
        assert!(!d_aug(&d, &x).is_zero());
    }

    fn word_strategy(rank: usize, max_len: usize) -> impl Strategy<Value = GroupWord> {
        prop::collection::vec((0..rank, any::<bool>()), 0..=max_len).prop_map(|v| {
            crate::algebra::reduce_word(&GroupWord::new(
                v.into_iter().map(|(g, s)| Letter::new(g, s)).collect(),
            ))
        })
    }

    fn derivative_strategy() -> impl Strategy<Value = FoxDerivative> {
        prop::collection::vec(prop::collection::vec((word_strategy(2, 3), -2i64..=2), 0..3), 2)
            .prop_map(|imgs| {
                FoxDerivative::new(
                    imgs.into_iter()
                        .enumerate()
                        .map(|(g, terms)| (g, G::from_i64_terms(terms)))
                        .collect(),
                )
            })
    }

    fn class_strategy() -> impl Strategy<Value = LoopCombination> {
        word_strategy(2, 5).prop_map(|x| LoopCombination::from_class(crate::algebra::canonical_conjugacy(&x)))
    }

    proptest! {
        #[test]
        fn fox_axiom(d in derivative_strategy(), x in word_strategy(2, 6), y in word_strategy(2, 6)) {
            let lhs = d.apply_word(&x.mul(&y)).unwrap();
            let rhs = &d.apply_word(&x).unwrap()
                + &ring_multiply(&G::from_word(x.clone()), &d.apply_word(&y).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn delta_kills_commutators(d in derivative_strategy(), u in word_strategy(2, 5), v in word_strategy(2, 5)) {
            let c = &G::from_word(u.mul(&v)) - &G::from_word(v.mul(&u));
            prop_assert!(delta_apply(&d, &c).unwrap().is_zero());
        }

        #[test]
        fn brace_ignores_representative(d in derivative_strategy(), u in word_strategy(2, 4), x in word_strategy(2, 5)) {
            let conj = G::from_word(u.mul(&x).mul(&u.inverse()));
            let canonical = G::from_word(x.clone());
            let a = project_p(&delta_apply(&d, &conj).unwrap());
            let b = project_p(&delta_apply(&d, &canonical).unwrap());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn brace_cyclic_symmetry(d in derivative_strategy(), x in class_strategy(), y in class_strategy(), z in class_strategy()) {
            let ds = vec![d.clone(), d.clone(), d];
            let a = algebraic_brace(&ds, &[x.clone(), y.clone(), z.clone()]).unwrap();
            let b = algebraic_brace(&ds, &[z, x, y]).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn shift_gives_same_brace(d in derivative_strategy(), e in derivative_strategy(), g in word_strategy(2, 3), x in class_strategy(), y in class_strategy()) {
            // every derivative in the brace shifted by the same g
            let a = algebraic_brace(&[d.clone(), e.clone()], &[x.clone(), y.clone()]).unwrap();
            let b = algebraic_brace(&[shift_derivative(&d, &g), shift_derivative(&e, &g)], &[x.clone(), y]).unwrap();
            prop_assert_eq!(a, b);
            let a1 = algebraic_brace(std::slice::from_ref(&d), std::slice::from_ref(&x)).unwrap();
            let b1 = algebraic_brace(&[shift_derivative(&d, &g)], &[x]).unwrap();
            prop_assert_eq!(a1, b1);
        }

        #[test]
        fn weak_derivation_certificate(
            d in derivative_strategy(),
            f in prop::collection::vec((word_strategy(2, 3), -2i64..=2), 0..3),
            x in word_strategy(2, 5),
            y in word_strategy(2, 5),
        ) {
            let f = G::from_i64_terms(f);
            let xe = G::from_word(x.clone());
            let ye = G::from_word(y.clone());
            let lhs = fox_derivation(&d, &f, &G::from_word(x.mul(&y))).unwrap();
            let rhs = &ring_multiply(&fox_derivation(&d, &f, &xe).unwrap(), &ye)
                + &ring_multiply(&xe, &fox_derivation(&d, &f, &ye).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
