//! Free groups, their group rings, and the module of conjugacy classes.
//!
//! Words are sequences of [`Letter`]s over numbered free generators. A
//! [`GroupRingElement`] is an element of the integral group ring `Z[F]`, and a
//! [`LoopCombination`] is an element of its quotient by the commutator
//! submodule, which is free on the set of conjugacy classes ([`ConjClass`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// A signed generator. Encoded as `2 * generator + (inverse as u32)`, so the
/// derived order sorts by generator index and puts the positive letter first.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, positive: bool) -> Self {
        Letter((generator as u32) << 1 | (!positive) as u32)
    }

    pub fn pos(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    pub fn neg(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn exponent(self) -> i64 {
        if self.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "g{}", self.generator() + 1)
        } else {
            write!(f, "g{}^-1", self.generator() + 1)
        }
    }
}

/// Freely reduce a letter sequence with a stack.
pub(crate) fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Index of the lexicographically least rotation (two-pointer method).
pub(crate) fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = &s[(i + k) % n];
        let b = &s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A word in the free generators. Not necessarily reduced; see [`reduce_word`].
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        GroupWord { letters }
    }

    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn generator(g: usize) -> Self {
        GroupWord::new(vec![Letter::pos(g)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn inverse(&self) -> Self {
        GroupWord::new(self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product.
    pub fn mul(&self, other: &GroupWord) -> Self {
        GroupWord::new(free_reduce(
            self.letters.iter().chain(other.letters.iter()).copied(),
        ))
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        (0..e.unsigned_abs()).fold(GroupWord::identity(), |acc, _| acc.mul(&base))
    }

    /// Highest generator index used, plus one.
    pub fn rank_needed(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.generator() + 1)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Letter]) -> fmt::Result {
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{}", l)?;
    }
    Ok(())
}

impl FromStr for GroupWord {
    type Err = Error;

    /// Parses whitespace separated tokens `g<k>` and `g<k>^-1` (k >= 1).
    /// The empty string and `1` denote the identity.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(GroupWord::identity());
        }
        let mut letters = Vec::new();
        let mut offset = 0;
        for token in s.split_whitespace() {
            let position = s[offset..].find(token).map(|i| i + offset).unwrap_or(offset);
            offset = position + token.len();
            let (body, positive) = match token.strip_suffix("^-1") {
                Some(b) => (b, false),
                None => (token, true),
            };
            let index = body
                .strip_prefix('g')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    Error::parse(position, format!("expected `g<k>` or `g<k>^-1`, got `{token}`"))
                })?;
            letters.push(Letter::new(index - 1, positive));
        }
        Ok(GroupWord::new(letters))
    }
}

/// The unique reduced word representing the same group element.
pub fn reduce_word(w: &GroupWord) -> GroupWord {
    GroupWord::new(free_reduce(w.letters.iter().copied()))
}

/// Exponent-sum vector of `w` with `rank` entries.
pub fn abelianize(w: &GroupWord, rank: usize) -> Vec<i64> {
    let mut v = vec![0i64; rank.max(w.rank_needed())];
    for l in &w.letters {
        v[l.generator()] += l.exponent();
    }
    v.truncate(rank.max(w.rank_needed()));
    v
}

/// A conjugacy class of the free group, stored as its canonical cyclic word:
/// cyclically reduced and rotated to the lexicographically least rotation.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConjClass {
    letters: Vec<Letter>,
}

impl ConjClass {
    pub fn trivial() -> Self {
        ConjClass::default()
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let w = free_reduce(letters);
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        let core = &w[lo..hi];
        let r = least_rotation(core);
        let mut out = Vec::with_capacity(core.len());
        out.extend_from_slice(&core[r..]);
        out.extend_from_slice(&core[..r]);
        ConjClass { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// The canonical representative word.
    pub fn word(&self) -> GroupWord {
        GroupWord::new(self.letters.clone())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn abelianize(&self, rank: usize) -> Vec<i64> {
        abelianize(&self.word(), rank)
    }
}

impl fmt::Debug for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self)
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

impl FromStr for ConjClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(canonical_conjugacy(&s.parse()?))
    }
}

pub fn canonical_conjugacy(w: &GroupWord) -> ConjClass {
    ConjClass::from_letters(w.letters.iter().copied())
}

/// Integer-coefficient finite sums over a totally ordered basis, with no
/// stored zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Combination<K: Ord> {
    terms: BTreeMap<K, BigInt>,
}

pub type GroupRingElement = Combination<GroupWord>;
pub type LoopCombination = Combination<ConjClass>;

impl<K: Ord> Default for Combination<K> {
    fn default() -> Self {
        Combination {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Combination<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: K, coeff: impl Into<BigInt>) {
        let c: BigInt = coeff.into();
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, key: &K) -> BigInt {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigInt)> {
        self.terms.iter()
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Combination {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &BigInt) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    /// Sum of all coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn from_i64_terms(terms: impl IntoIterator<Item = (K, i64)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, BigInt)> for Combination<K> {
    fn from_iter<I: IntoIterator<Item = (K, BigInt)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

impl<K: Ord + Clone> std::ops::Add for &Combination<K> {
    type Output = Combination<K>;
    fn add(self, rhs: Self) -> Combination<K> {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &BigInt::one());
        out
    }
}

impl<K: Ord + Clone> std::ops::Sub for &Combination<K> {
    type Output = Combination<K>;
    fn sub(self, rhs: Self) -> Combination<K> {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-BigInt::one());
        out
    }
}

impl<K: Ord + Clone> std::ops::Add for Combination<K> {
    type Output = Combination<K>;
    fn add(self, rhs: Self) -> Combination<K> {
        &self + &rhs
    }
}

impl<K: Ord + Clone> std::ops::Sub for Combination<K> {
    type Output = Combination<K>;
    fn sub(self, rhs: Self) -> Combination<K> {
        &self - &rhs
    }
}

impl<K: Ord + Clone> std::ops::Neg for Combination<K> {
    type Output = Combination<K>;
    fn neg(self) -> Combination<K> {
        self.scaled(&-BigInt::one())
    }
}

impl<K: Ord + Clone> std::ops::AddAssign<&Combination<K>> for Combination<K> {
    fn add_assign(&mut self, rhs: &Combination<K>) {
        self.add_assign_scaled(rhs, &BigInt::one());
    }
}

impl<K: Ord + Clone> std::ops::SubAssign<&Combination<K>> for Combination<K> {
    fn sub_assign(&mut self, rhs: &Combination<K>) {
        self.add_assign_scaled(rhs, &-BigInt::one());
    }
}

impl<K: Ord + fmt::Display> fmt::Display for Combination<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 || c.is_negative() {
                write!(f, "{}{}", if i > 0 { " " } else { "" }, sign)?;
                if i > 0 {
                    f.write_str(" ")?;
                }
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{}·", a)?;
            }
            write!(f, "<{}>", k)?;
        }
        Ok(())
    }
}

impl<K: Ord + fmt::Display> fmt::Debug for Combination<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<K: Ord + Clone + fmt::Display> Combination<K> {
    /// Serialized as a JSON list of `[coefficient, word]` pairs in canonical order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| Value::Array(vec![bigint_json(c), Value::String(k.to_string())]))
                .collect(),
        )
    }
}

/// Basis elements that can be read back from their printed form.
pub trait Basis: Ord + Clone + fmt::Display {
    fn parse_basis(s: &str) -> Result<Self>;
}

impl Basis for GroupWord {
    fn parse_basis(s: &str) -> Result<Self> {
        Ok(reduce_word(&s.parse()?))
    }
}

impl Basis for ConjClass {
    fn parse_basis(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl<K: Basis> Combination<K> {
    pub fn from_json(v: &Value) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Json("expected a list of [coefficient, word] pairs".into()))?;
        let mut out = Self::zero();
        for (i, item) in items.iter().enumerate() {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Json(format!("entry {i}: expected [coefficient, word]")))?;
            let c = json_bigint(&pair[0])
                .ok_or_else(|| Error::Json(format!("entry {i}: bad coefficient")))?;
            let w = pair[1]
                .as_str()
                .ok_or_else(|| Error::Json(format!("entry {i}: word must be a string")))?;
            out.add_term(K::parse_basis(w)?, c);
        }
        Ok(out)
    }
}

pub(crate) fn bigint_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(i) => Value::from(i),
        None => Value::String(c.to_string()),
    }
}

fn json_bigint(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Machine-integer accumulator for hot loops, converted to a [`Combination`]
/// at the end.
pub(crate) struct Tally<K> {
    terms: std::collections::HashMap<K, i64>,
}

impl<K: Ord + Clone + std::hash::Hash> Tally<K> {
    pub(crate) fn new() -> Self {
        Tally {
            terms: std::collections::HashMap::new(),
        }
    }

    pub(crate) fn add(&mut self, key: K, c: i64) {
        if c != 0 {
            *self.terms.entry(key).or_insert(0) += c;
        }
    }

    pub(crate) fn finish(self) -> Combination<K> {
        Combination::from_i64_terms(self.terms)
    }
}

impl GroupRingElement {
    pub fn from_word(w: GroupWord) -> Self {
        let mut out = Self::zero();
        out.add_term(reduce_word(&w), 1);
        out
    }

    pub fn one() -> Self {
        Self::from_word(GroupWord::identity())
    }
}

/// Bilinear extension of reduced concatenation.
pub fn ring_multiply(x: &GroupRingElement, y: &GroupRingElement) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    for (u, a) in x.iter() {
        for (v, b) in y.iter() {
            out.add_term(u.mul(v), a * b);
        }
    }
    out
}

impl std::ops::Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: Self) -> GroupRingElement {
        ring_multiply(self, rhs)
    }
}

/// The projection `A -> A/[A,A]`.
pub fn project_p(x: &GroupRingElement) -> LoopCombination {
    x.iter()
        .map(|(w, c)| (canonical_conjugacy(w), c.clone()))
        .collect()
}

impl LoopCombination {
    pub fn from_class(c: ConjClass) -> Self {
        let mut out = Self::zero();
        out.add_term(c, 1);
        out
    }

    /// Lift to `A` through canonical representatives.
    pub fn lift(&self) -> GroupRingElement {
        self.iter().map(|(c, k)| (c.word(), k.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    fn c(s: &str) -> ConjClass {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_word(&w("g1 g1^-1")), GroupWord::identity());
        assert_eq!(reduce_word(&w("g1 g2 g2^-1 g1")), w("g1 g1"));
        assert_eq!(reduce_word(&GroupWord::identity()), GroupWord::identity());
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_conjugacy(&w("g1 g2 g1^-1")), c("g2"));
        assert_eq!(canonical_conjugacy(&w("g2 g1")).word(), w("g1 g2"));
        assert!(canonical_conjugacy(&GroupWord::identity()).is_trivial());
        // positive letters sort before inverses of the same generator
        assert_eq!(c("g1^-1 g2 g1 g2").word(), w("g1 g2 g1^-1 g2"));
    }

    #[test]
    fn multiply_examples() {
        let g1 = GroupRingElement::from_word(w("g1"));
        let g1i = GroupRingElement::from_word(w("g1^-1"));
        let g2 = GroupRingElement::from_word(w("g2"));
        assert_eq!(&g1 * &g1i, GroupRingElement::one());
        let sum = &g1 + &g2;
        let expected = GroupRingElement::from_i64_terms([(w("g1 g1"), 1), (w("g2 g1"), 1)]);
        assert_eq!(&sum * &g1, expected);
        assert!((&GroupRingElement::zero() * &sum).is_zero());
    }

    #[test]
    fn projection_examples() {
        let x = GroupRingElement::from_i64_terms([(w("g1 g2"), 1), (w("g2 g1"), 1)]);
        assert_eq!(project_p(&x), LoopCombination::from_i64_terms([(c("g1 g2"), 2)]));
        let y = GroupRingElement::from_i64_terms([(w("g1 g2 g1^-1"), 1), (w("g2"), -1)]);
        assert!(project_p(&y).is_zero());
        let z = GroupRingElement::from_i64_terms([(w("g1"), 3)]);
        assert_eq!(project_p(&z), LoopCombination::from_i64_terms([(c("g1"), 3)]));
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(abelianize(&w("g1 g2 g1^-1 g2^-1"), 2), vec![0, 0]);
        assert_eq!(abelianize(&w("g1 g1 g2^-1"), 2), vec![2, -1]);
        assert_eq!(abelianize(&GroupWord::identity(), 2), vec![0, 0]);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = "g1 h2".parse::<GroupWord>().unwrap_err();
        assert_eq!(err, Error::parse(3, "expected `g<k>` or `g<k>^-1`, got `h2`"));
        assert!("g0".parse::<GroupWord>().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let x = LoopCombination::from_i64_terms([(c("g1 g2"), 2), (c("g2^-1"), -1)]);
        assert_eq!(LoopCombination::from_json(&x.to_json()).unwrap(), x);
    }

    fn word_strategy(rank: usize, max_len: usize) -> impl Strategy<Value = GroupWord> {
        prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
            .prop_map(|v| GroupWord::new(v.into_iter().map(|(g, s)| Letter::new(g, s)).collect()))
    }

    fn element_strategy() -> impl Strategy<Value = GroupRingElement> {
        prop::collection::vec((word_strategy(3, 5), -3i64..=3), 0..4)
            .prop_map(GroupRingElement::from_i64_terms)
            .prop_map(|e| e.iter().map(|(k, c)| (reduce_word(k), c.clone())).collect())
    }

    proptest! {
        #[test]
        fn conjugation_invariance(u in word_strategy(3, 6), x in word_strategy(3, 6)) {
            let conj = u.mul(&x).mul(&u.inverse());
            prop_assert_eq!(canonical_conjugacy(&conj), canonical_conjugacy(&x));
            prop_assert_eq!(abelianize(&conj, 3), abelianize(&x, 3));
        }

        #[test]
        fn rotation_invariance(x in word_strategy(3, 8), k in 0usize..8) {
            let l = x.letters();
            let k = if l.is_empty() { 0 } else { k % l.len() };
            let rotated = GroupWord::new(l[k..].iter().chain(&l[..k]).copied().collect());
            prop_assert_eq!(canonical_conjugacy(&rotated), canonical_conjugacy(&x));
        }

        #[test]
        fn canonical_is_idempotent(x in word_strategy(3, 8)) {
            let c = canonical_conjugacy(&x);
            prop_assert_eq!(canonical_conjugacy(&c.word()), c.clone());
            prop_assert!(c.word().is_reduced());
        }

        #[test]
        fn trace_property(x in element_strategy(), y in element_strategy()) {
            prop_assert_eq!(project_p(&(&x * &y)), project_p(&(&y * &x)));
        }

        #[test]
        fn ring_axioms(x in element_strategy(), y in element_strategy(), z in element_strategy()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        }
    }
}
