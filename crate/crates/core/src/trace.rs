//! Exact evaluation of traces at representation points: generators mapped to
//! invertible rational matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::algebra::{ConjClass, GroupRingElement, GroupWord, Letter, LoopCombination};
use crate::error::{Error, Result};
use crate::homotopy::{gate_brace_lc, kk_pairing, second_bracket_lc};
use crate::quasi_lie::mu_total;
use crate::sample::Rng64;
use crate::surface::{GateOrientation, QuasiSurface};

pub type Rational = BigRational;

/// Square matrix over the rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    a: Vec<Rational>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![Rational::zero(); n * n];
        for i in 0..n {
            a[i * n + i] = Rational::one();
        }
        Matrix { n, a }
    }

    pub fn zero(n: usize) -> Self {
        Matrix {
            n,
            a: vec![Rational::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Representation("matrix must be square and nonempty".into()));
        }
        Ok(Matrix {
            n,
            a: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.a[i * self.n + j]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let x = &self.a[i * n + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * &other.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Matrix, c: &Rational) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += y * c;
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.a[i * self.n + i].clone()).sum()
    }

    /// Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let mut m = self.a.clone();
        let mut inv = Matrix::identity(n).a;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r * n + col].is_zero())?;
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = m[col * n + col].clone();
            for j in 0..n {
                m[col * n + j] /= &p;
                inv[col * n + j] /= &p;
            }
            for r in 0..n {
                if r == col || m[r * n + col].is_zero() {
                    continue;
                }
                let f = m[r * n + col].clone();
                for j in 0..n {
                    let (mv, iv) = (m[col * n + j].clone(), inv[col * n + j].clone());
                    m[r * n + j] -= &f * mv;
                    inv[r * n + j] -= &f * iv;
                }
            }
        }
        Some(Matrix { n, a: inv })
    }

    /// Determinant by fraction-exact elimination.
    pub fn det(&self) -> Rational {
        let n = self.n;
        let mut m = self.a.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = m[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                let f = &m[r * n + col] / &p;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m[col * n + j].clone();
                    m[r * n + j] -= &f * v;
                }
            }
        }
        det
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.n)
                .map(|i| {
                    Value::Array(
                        (0..self.n)
                            .map(|j| Value::String(rational_string(self.get(i, j))))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Representation("matrix must be a list of rows".into()))?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Representation("row must be a list".into()))?
                    .iter()
                    .map(parse_rational_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }
}

pub fn rational_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Representation(format!("cannot read `{s}` as p/q"));
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

fn parse_rational_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(i.into()))
            .ok_or_else(|| Error::Representation(format!("`{n}` is not an integer"))),
        _ => Err(Error::Representation("matrix entries must be strings p/q".into())),
    }
}

/// Invertible rational matrices assigned to the free generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationPoint {
    n: usize,
    images: Vec<Matrix>,
    inverses: Vec<Matrix>,
}

impl RepresentationPoint {
    pub fn new(images: Vec<Matrix>) -> Result<Self> {
        let n = images.first().map_or(1, Matrix::size);
        let mut inverses = Vec::with_capacity(images.len());
        for (g, m) in images.iter().enumerate() {
            if m.size() != n {
                return Err(Error::Representation(format!(
                    "image of {} is {}x{}, expected {n}x{n}",
                    Letter::pos(g),
                    m.size(),
                    m.size()
                )));
            }
            inverses.push(m.inverse().ok_or_else(|| {
                Error::Representation(format!("image of {} is singular", Letter::pos(g)))
            })?);
        }
        Ok(RepresentationPoint { n, images, inverses })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, g: usize) -> &Matrix {
        &self.images[g]
    }

    pub fn word_matrix(&self, w: &GroupWord) -> Result<Matrix> {
        let mut out = Matrix::identity(self.n);
        for l in w.letters() {
            let g = l.generator();
            if g >= self.images.len() {
                return Err(Error::UnknownGenerator(g, self.images.len()));
            }
            let m = if l.is_positive() { &self.images[g] } else { &self.inverses[g] };
            out = out.mul(m);
        }
        Ok(out)
    }

    /// Image of an element of `A`.
    pub fn ring_matrix(&self, x: &GroupRingElement) -> Result<Matrix> {
        let mut out = Matrix::zero(self.n);
        for (w, c) in x.iter() {
            out.add_scaled(&self.word_matrix(w)?, &Rational::from_integer(c.clone()));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .images
            .iter()
            .enumerate()
            .map(|(g, m)| (Letter::pos(g).to_string(), m.to_json()))
            .collect();
        Value::Object(map)
    }

    /// Reads `{"g1": [["p/q", ...], ...], ...}`; every generator up to the
    /// largest one named must be present.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Representation("expected an object mapping generators to matrices".into()))?;
        let mut images: Vec<Option<Matrix>> = Vec::new();
        for (token, m) in obj {
            let w: GroupWord = token.parse()?;
            let g = match w.letters() {
                [l] if l.is_positive() => l.generator(),
                _ => return Err(Error::Representation(format!("`{token}` is not a generator"))),
            };
            if images.len() <= g {
                images.resize(g + 1, None);
            }
            images[g] = Some(Matrix::from_json(m)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(g, m)| m.ok_or_else(|| Error::Representation(format!("no image for {}", Letter::pos(g)))))
            .collect::<Result<Vec<_>>>()?;
        RepresentationPoint::new(images)
    }
}

/// `Σ c · tr(ρ(w))`.
pub fn eval_trace(rho: &RepresentationPoint, x: &LoopCombination) -> Result<Rational> {
    let mut out = Rational::zero();
    for (c, k) in x.iter() {
        out += rho.word_matrix(&c.word())?.trace() * Rational::from_integer(k.clone());
    }
    Ok(out)
}

/// `tr(ρ(x))` for `x ∈ A`.
pub fn eval_trace_ring(rho: &RepresentationPoint, x: &GroupRingElement) -> Result<Rational> {
    Ok(rho.ring_matrix(x)?.trace())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum InducedForm {
    SecondBracket,
    MuTotal,
    GateBrace(usize),
}

/// Trace of a bracket's output, which is the value of the induced bracket on
/// the trace functions of its arguments.
pub fn eval_induced_bracket(
    qs: &QuasiSurface,
    rho: &RepresentationPoint,
    form: InducedForm,
    args: &[&LoopCombination],
) -> Result<Rational> {
    let arity = |m: usize| -> Result<()> {
        if args.len() != m {
            return Err(Error::Arity { expected: m, found: args.len() });
        }
        Ok(())
    };
    let value = match form {
        InducedForm::SecondBracket => {
            arity(2)?;
            second_bracket_lc(qs, args[0], args[1])?
        }
        InducedForm::MuTotal => {
            arity(3)?;
            mu_total(qs, args[0], args[1], args[2])?
        }
        InducedForm::GateBrace(k) => gate_brace_lc(qs, k, args)?,
    };
    eval_trace(rho, &value)
}

/// Deterministic integer matrix of determinant ±1, a product of random
/// elementary matrices, a permutation and a diagonal sign matrix.
pub fn random_unimodular(n: usize, seed: u64) -> Matrix {
    let mut rng = crate::sample::case_rng(seed, 0);
    let mut m = random_special(n, &mut rng);
    if n > 0 && rng.gen() {
        for j in 0..n {
            let x = -m.a[j].clone();
            m.a[j] = x;
        }
    }
    m
}

/// Random integer matrix of determinant 1.
pub fn random_special(n: usize, rng: &mut Rng64) -> Matrix {
    let mut m = Matrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = Rational::from_integer(BigInt::from(rng.gen_range(-2i64..=2)));
        // add c times row j to row i
        for col in 0..n {
            let v = &m.a[j * n + col] * &c;
            m.a[i * n + col] += v;
        }
    }
    m
}

/// Random nonzero rational with small numerator and denominator.
pub fn random_nonzero_rational(rng: &mut Rng64) -> Rational {
    let p: i64 = rng.gen_range(1..=5) * if rng.gen() { 1 } else { -1 };
    let q: i64 = rng.gen_range(1..=3);
    Rational::new(p.into(), q.into())
}

/// Random representation point: nonzero rationals for `n = 1`, integer
/// matrices of determinant 1 for `n = 2`, of determinant ±1 otherwise.
pub fn random_point(rank: usize, n: usize, rng: &mut Rng64) -> RepresentationPoint {
    let images = (0..rank)
        .map(|_| match n {
            1 => Matrix {
                n: 1,
                a: vec![random_nonzero_rational(rng)],
            },
            2 => random_special(2, rng),
            _ => random_unimodular(n, rng.gen()),
        })
        .collect();
    RepresentationPoint::new(images).expect("unimodular images are invertible")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationReport {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

impl DerivationReport {
    fn new(lhs: Rational, rhs: Rational) -> Self {
        DerivationReport { equal: lhs == rhs, lhs, rhs }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lhs": rational_string(&self.lhs),
            "rhs": rational_string(&self.rhs),
            "equal": self.equal,
        })
    }
}

fn require_dim(rho: &RepresentationPoint, n: usize) -> Result<()> {
    if rho.dim() != n {
        return Err(Error::Representation(format!(
            "expected {n}x{n} matrices, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    Ok(())
}

/// At `n = 1`: `tr μ(x, p(uv)) = tr μ(x, p(u)) tr(v) + tr(u) tr μ(x, p(v))`,
/// with `μ(x, −)` the based pairing `y ↦ x •_ω y`.
pub fn verify_derivation_n1(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    rho: &RepresentationPoint,
    x: &ConjClass,
    u: &GroupWord,
    v: &GroupWord,
) -> Result<DerivationReport> {
    require_dim(rho, 1)?;
    let d = |w: &GroupWord| -> Result<Rational> { eval_trace_ring(rho, &kk_pairing(qs, omega, x, w)?) };
    let tr = |w: &GroupWord| -> Result<Rational> { Ok(rho.word_matrix(w)?.trace()) };
    let lhs = d(&u.mul(v))?;
    let rhs = d(u)? * tr(v)? + tr(u)? * d(v)?;
    Ok(DerivationReport::new(lhs, rhs))
}

/// The same identity through the bracket: at `n = 1`,
/// `tr [x, ⟨uv⟩] = tr [x, ⟨u⟩] tr(v) + tr(u) tr [x, ⟨v⟩]`.
pub fn verify_bracket_derivation_n1(
    qs: &QuasiSurface,
    rho: &RepresentationPoint,
    x: &ConjClass,
    u: &GroupWord,
    v: &GroupWord,
) -> Result<DerivationReport> {
    require_dim(rho, 1)?;
    let xl = LoopCombination::from_class(x.clone());
    let d = |w: &GroupWord| -> Result<Rational> {
        let y = LoopCombination::from_class(crate::algebra::canonical_conjugacy(w));
        eval_trace(rho, &second_bracket_lc(qs, &xl, &y)?)
    };
    let tr = |w: &GroupWord| -> Result<Rational> { Ok(rho.word_matrix(w)?.trace()) };
    let lhs = d(&u.mul(v))?;
    let rhs = d(u)? * tr(v)? + tr(u)? * d(v)?;
    Ok(DerivationReport::new(lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Report {
    /// `tr d(uv) + tr d(uv⁻¹)`.
    pub lhs: Rational,
    /// `tr d(u) tr(v) + tr(u) tr d(v)`.
    pub rhs: Rational,
    pub equal: bool,
    /// `lhs − rhs`.
    pub defect: Rational,
    /// `−tr(d(v) v⁻¹) · tr(u v⁻¹)`, the defect forced by `d` not preserving
    /// determinant 1.
    pub predicted_defect: Rational,
    /// Both sides for the trace-free part `d'(w) = d(w) − ½ tr(d(w) w⁻¹) w`
    /// of `d` on generators, extended as a derivation.
    pub corrected_lhs: Rational,
    pub corrected_rhs: Rational,
    pub corrected_equal: bool,
}

impl Sl2Report {
    pub fn to_json(&self) -> Value {
        json!({
            "lhs": rational_string(&self.lhs),
            "rhs": rational_string(&self.rhs),
            "equal": self.equal,
            "defect": rational_string(&self.defect),
            "predicted_defect": rational_string(&self.predicted_defect),
            "corrected_lhs": rational_string(&self.corrected_lhs),
            "corrected_rhs": rational_string(&self.corrected_rhs),
            "corrected_equal": self.corrected_equal,
        })
    }
}

/// Matrix of `d(w)` for the derivation `d = x •_ω −` of `A`.
fn kk_matrix(qs: &QuasiSurface, omega: &GateOrientation, rho: &RepresentationPoint, x: &ConjClass, w: &GroupWord) -> Result<Matrix> {
    rho.ring_matrix(&kk_pairing(qs, omega, x, w)?)
}

/// Matrix of `d'(w)`: the derivation whose value on each generator `g` is
/// `d(g) − ½ tr(d(g) g⁻¹) g`.
fn trace_free_matrix(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    rho: &RepresentationPoint,
    x: &ConjClass,
    w: &GroupWord,
) -> Result<Matrix> {
    let half = Rational::new(1.into(), 2.into());
    let mut gens = Vec::with_capacity(rho.rank());
    for g in 0..rho.rank() {
        let gw = GroupWord::generator(g);
        let dg = kk_matrix(qs, omega, rho, x, &gw)?;
        let t = dg.mul(&rho.inverses[g]).trace();
        let mut m = dg;
        m.add_scaled(&rho.images[g], &-(t * &half));
        gens.push(m);
    }
    // Leibniz along the word: d'(l₁⋯l_n) = Σ l₁⋯l_{i−1} d'(l_i) l_{i+1}⋯l_n
    let n = rho.dim();
    let mut out = Matrix::zero(n);
    let letters = w.letters();
    for (i, l) in letters.iter().enumerate() {
        let g = l.generator();
        let dl = if l.is_positive() {
            gens[g].clone()
        } else {
            // d'(g⁻¹) = −g⁻¹ d'(g) g⁻¹
            let mut m = Matrix::zero(n);
            m.add_scaled(&rho.inverses[g].mul(&gens[g]).mul(&rho.inverses[g]), &-Rational::one());
            m
        };
        let left = rho.word_matrix(&GroupWord::new(letters[..i].to_vec()))?;
        let right = rho.word_matrix(&GroupWord::new(letters[i + 1..].to_vec()))?;
        out.add_scaled(&left.mul(&dl).mul(&right), &Rational::one());
    }
    Ok(out)
}

/// For determinant-1 points in dimension 2, compares
/// `tr d(uv) + tr d(uv⁻¹)` with `tr d(u) tr(v) + tr(u) tr d(v)` for
/// `d = x •_ω −`, and the same for its trace-free part.
pub fn verify_sl2_consistency(
    qs: &QuasiSurface,
    omega: &GateOrientation,
    rho: &RepresentationPoint,
    x: &ConjClass,
    u: &GroupWord,
    v: &GroupWord,
) -> Result<Sl2Report> {
    require_dim(rho, 2)?;
    for g in 0..rho.rank() {
        if rho.images[g].det() != Rational::one() {
            return Err(Error::Representation(format!(
                "image of {} has determinant {}, expected 1",
                Letter::pos(g),
                rational_string(&rho.images[g].det())
            )));
        }
    }
    let uv = u.mul(v);
    let uvi = u.mul(&v.inverse());
    let tr = |w: &GroupWord| -> Result<Rational> { Ok(rho.word_matrix(w)?.trace()) };
    let d = |w: &GroupWord| -> Result<Rational> { Ok(kk_matrix(qs, omega, rho, x, w)?.trace()) };
    let lhs = d(&uv)? + d(&uvi)?;
    let rhs = d(u)? * tr(v)? + tr(u)? * d(v)?;
    let dv = kk_matrix(qs, omega, rho, x, v)?;
    let v_inv = rho.word_matrix(&v.inverse())?;
    let predicted_defect = -(dv.mul(&v_inv).trace() * tr(&uvi)?);
    let dc = |w: &GroupWord| -> Result<Rational> { Ok(trace_free_matrix(qs, omega, rho, x, w)?.trace()) };
    let corrected_lhs = dc(&uv)? + dc(&uvi)?;
    let corrected_rhs = dc(u)? * tr(v)? + tr(u)? * dc(v)?;
    Ok(Sl2Report {
        equal: lhs == rhs,
        defect: &lhs - &rhs,
        lhs,
        rhs,
        predicted_defect,
        corrected_equal: corrected_lhs == corrected_rhs,
        corrected_lhs,
        corrected_rhs,
    })
}

/// `|det| = 1` check used by tests.
pub fn is_unimodular(m: &Matrix) -> bool {
    m.det().abs() == Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(p: i64) -> Rational {
        Rational::from_integer(p.into())
    }

    fn lc(s: &str) -> LoopCombination {
        LoopCombination::from_class(s.parse().unwrap())
    }

    #[test]
    fn trace_examples() {
        let rho = RepresentationPoint::new(vec![Matrix::from_ints(&[&[3]]).unwrap()]).unwrap();
        assert_eq!(eval_trace(&rho, &lc("g1 g1")).unwrap(), q(9));
        let uni = RepresentationPoint::new(vec![Matrix::from_ints(&[&[1, 1], &[0, 1]]).unwrap()]).unwrap();
        assert_eq!(eval_trace(&uni, &lc("g1 g1 g1")).unwrap(), q(2));
        assert_eq!(eval_trace(&uni, &LoopCombination::from_class(ConjClass::trivial())).unwrap(), q(2));
    }

    #[test]
    fn induced_bracket_example() {
        let qs = fixtures::qt2();
        let rho = RepresentationPoint::new(vec![Matrix::from_ints(&[&[3]]).unwrap()]).unwrap();
        let z = lc("g1");
        assert_eq!(eval_induced_bracket(&qs, &rho, InducedForm::GateBrace(0), &[&z, &z]).unwrap(), q(9));
        assert_eq!(eval_induced_bracket(&qs, &rho, InducedForm::SecondBracket, &[&z, &z]).unwrap(), q(0));
        assert!(eval_induced_bracket(&qs, &rho, InducedForm::MuTotal, &[&z]).is_err());
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_ints(&[&[2, 1, 0], &[0, 1, 4], &[1, 0, 1]]).unwrap();
        assert_eq!(m.det(), q(6));
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(3));
        let s = Matrix::from_ints(&[&[1, 2], &[2, 4]]).unwrap();
        assert!(s.inverse().is_none());
        assert_eq!(s.det(), q(0));
        assert!(RepresentationPoint::new(vec![s]).is_err());
    }

    #[test]
    fn unimodular_is_deterministic() {
        for n in 1..=3 {
            for seed in 0..20 {
                let m = random_unimodular(n, seed);
                assert_eq!(m, random_unimodular(n, seed));
                assert!(is_unimodular(&m));
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = crate::sample::case_rng(4, 0);
        for n in 1..=3 {
            let rho = random_point(2, n, &mut rng);
            assert_eq!(RepresentationPoint::from_json(&rho.to_json()).unwrap(), rho);
        }
        let v: Value = serde_json::from_str(r#"{"g1": [["1/2"]], "g2": [["-3"]]}"#).unwrap();
        let rho = RepresentationPoint::from_json(&v).unwrap();
        assert_eq!(rho.image(0).get(0, 0), &Rational::new(1.into(), 2.into()));
        let gap: Value = serde_json::from_str(r#"{"g2": [["1"]]}"#).unwrap();
        assert!(RepresentationPoint::from_json(&gap).is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn conjugation_invariance() {
        let mut rng = crate::sample::case_rng(5, 0);
        for n in 1..=3 {
            let rho = random_point(2, n, &mut rng);
            let w: GroupWord = "g1 g2 g2 g1^-1 g2".parse().unwrap();
            let u: GroupWord = "g2 g1^-1".parse().unwrap();
            let a = rho.word_matrix(&w).unwrap().trace();
            let b = rho.word_matrix(&u.mul(&w).mul(&u.inverse())).unwrap().trace();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn derivation_n1_examples() {
        let qs = fixtures::qt2();
        let omega = GateOrientation::ccw(2);
        let rho = RepresentationPoint::new(vec![Matrix::from_ints(&[&[3]]).unwrap()]).unwrap();
        let z: GroupWord = "g1".parse().unwrap();
        let x: ConjClass = "g1".parse().unwrap();
        let r = verify_derivation_n1(&qs, &omega, &rho, &x, &z, &z).unwrap();
        assert!(r.equal);
        // tr(x • z) = tr(z²) = 9, so both sides are 2·3·9
        assert_eq!(r.lhs, q(54));
        let e = GroupWord::identity();
        assert!(verify_derivation_n1(&qs, &omega, &rho, &x, &z, &e).unwrap().equal);
        assert!(verify_bracket_derivation_n1(&qs, &rho, &x, &z, &z).unwrap().equal);
    }

    #[test]
    fn sl2_rejects_non_unit_determinant() {
        let qs = fixtures::qt2();
        let rho = RepresentationPoint::new(vec![Matrix::from_ints(&[&[2, 0], &[0, 1]]).unwrap()]).unwrap();
        let z: GroupWord = "g1".parse().unwrap();
        let x: ConjClass = "g1".parse().unwrap();
        assert!(verify_sl2_consistency(&qs, &GateOrientation::ccw(2), &rho, &x, &z, &z).is_err());
    }
}
