//! Randomized and exhaustive verification suites for the identities relating
//! the operations of this crate. Shared by the acceptance tests and the CLI
//! self-test; every suite is deterministic given its seed.

use num_bigint::BigInt;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::{canonical_conjugacy, project_p, ConjClass, GroupRingElement, LoopCombination};
use crate::diagram::{combine_generic, combine_in_order, family_of, loop_from_word, word_to_diagram, LaneDiagram};
use crate::error::Result;
use crate::fixtures;
use crate::fox::{algebraic_brace, shift_derivative};
use crate::homology::{first_form, first_form_classes, first_form_explicit, h1_class, second_form, second_form_with, v_h1};
use crate::homotopy::{bullet, bullet_diagram, bullet_explicit, gate_brace_geometric, gate_brace_lc, kk_pairing, second_bracket, second_bracket_lc, second_bracket_with};
use crate::quasi_lie::{delta3, delta3_shifted, jacobiator, mu_total, s_bracket, sign_triples, verify_quasi_jacobi};
use crate::sample::{
    case_rng, insert_random_detour, perturb, random_class, random_omega, random_surface, random_word, redepth, Rng64,
};
use crate::surface::{GateOrientation, QuasiSurface};
use crate::trace::{
    eval_induced_bracket, eval_trace, random_point, rational_string, verify_bracket_derivation_n1, verify_derivation_n1,
    verify_sl2_consistency, InducedForm,
};

pub const DEFAULT_SEED: u64 = 20240917;

/// Number of counterexamples kept per suite.
const KEEP: usize = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Oracle,
    QuasiJacobiQt2,
    QuasiJacobiQg1,
    QuasiJacobiQd2,
    OmegaChangeFirstForm,
    OmegaChangeBullet,
    SymmetrizationFirstForm,
    SymmetrizationBullet,
    InvarianceConjugation,
    InvarianceRedepth,
    InvarianceDetour,
    InvarianceInterleaving,
    PerturbationCalibration,
    OmegaIndependence,
    Symmetries,
    Derivation,
    TraceSymmetries,
    TraceQuasiJacobi,
    TraceDerivationN1,
    TraceSl2,
    TraceSl2Defect,
    Qt2Table,
}

impl Suite {
    pub const ALL: [Suite; 22] = [
        Suite::Oracle,
        Suite::QuasiJacobiQt2,
        Suite::QuasiJacobiQg1,
        Suite::QuasiJacobiQd2,
        Suite::OmegaChangeFirstForm,
        Suite::OmegaChangeBullet,
        Suite::SymmetrizationFirstForm,
        Suite::SymmetrizationBullet,
        Suite::InvarianceConjugation,
        Suite::InvarianceRedepth,
        Suite::InvarianceDetour,
        Suite::InvarianceInterleaving,
        Suite::PerturbationCalibration,
        Suite::OmegaIndependence,
        Suite::Symmetries,
        Suite::Derivation,
        Suite::TraceSymmetries,
        Suite::TraceQuasiJacobi,
        Suite::TraceDerivationN1,
        Suite::TraceSl2,
        Suite::TraceSl2Defect,
        Suite::Qt2Table,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::QuasiJacobiQt2 => "quasi_jacobi_qt2",
            Suite::QuasiJacobiQg1 => "quasi_jacobi_qg1",
            Suite::QuasiJacobiQd2 => "quasi_jacobi_qd2",
            Suite::OmegaChangeFirstForm => "omega_change_first_form",
            Suite::OmegaChangeBullet => "omega_change_bullet",
            Suite::SymmetrizationFirstForm => "symmetrization_first_form",
            Suite::SymmetrizationBullet => "symmetrization_bullet",
            Suite::InvarianceConjugation => "invariance_conjugation",
            Suite::InvarianceRedepth => "invariance_redepth",
            Suite::InvarianceDetour => "invariance_detour",
            Suite::InvarianceInterleaving => "invariance_interleaving",
            Suite::PerturbationCalibration => "perturbation_calibration",
            Suite::OmegaIndependence => "omega_independence",
            Suite::Symmetries => "symmetries",
            Suite::Derivation => "derivation",
            Suite::TraceSymmetries => "trace_symmetries",
            Suite::TraceQuasiJacobi => "trace_quasi_jacobi",
            Suite::TraceDerivationN1 => "trace_derivation_n1",
            Suite::TraceSl2 => "trace_sl2",
            Suite::TraceSl2Defect => "trace_sl2_defect",
            Suite::Qt2Table => "qt2_table",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Acceptance criterion the suite belongs to; `None` for diagnostics.
    pub fn criterion(self) -> Option<u32> {
        Some(match self {
            Suite::Oracle => 1,
            Suite::QuasiJacobiQt2 | Suite::QuasiJacobiQg1 | Suite::QuasiJacobiQd2 => 2,
            Suite::OmegaChangeFirstForm | Suite::OmegaChangeBullet => 3,
            Suite::SymmetrizationFirstForm | Suite::SymmetrizationBullet => 4,
            Suite::InvarianceConjugation
            | Suite::InvarianceRedepth
            | Suite::InvarianceDetour
            | Suite::InvarianceInterleaving
            | Suite::PerturbationCalibration => 5,
            Suite::OmegaIndependence => 6,
            Suite::Symmetries => 7,
            Suite::Derivation => 8,
            Suite::TraceSymmetries | Suite::TraceQuasiJacobi | Suite::TraceDerivationN1 | Suite::TraceSl2 => 9,
            Suite::TraceSl2Defect => return None,
            Suite::Qt2Table => 10,
        })
    }

    pub fn default_cases(self) -> usize {
        match self {
            Suite::Oracle | Suite::QuasiJacobiQt2 | Suite::QuasiJacobiQg1 | Suite::QuasiJacobiQd2 => 1000,
            // 5 fixtures × 3 dimensions × 50 points
            Suite::TraceSymmetries | Suite::TraceQuasiJacobi => 750,
            // 5 fixtures × 50 points at a single dimension
            Suite::TraceDerivationN1 | Suite::TraceSl2 | Suite::TraceSl2Defect => 250,
            Suite::Qt2Table => 1,
            _ => 500,
        }
    }

    fn salt(self) -> u64 {
        let i = Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64;
        i.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub checks: usize,
    pub failures: usize,
    pub counterexamples: Vec<Value>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn summary(&self) -> String {
        let crit = self.suite.criterion().map_or("diagnostic".to_string(), |c| format!("criterion {c}"));
        format!(
            "{} {} [{}]: {} cases, {} checks, {} failures",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite.name(),
            crit,
            self.cases,
            self.checks,
            self.failures
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "criterion": self.suite.criterion(),
            "passed": self.passed(),
            "cases": self.cases,
            "checks": self.checks,
            "failures": self.failures,
            "counterexamples": self.counterexamples,
            "warnings": self.warnings,
        })
    }
}

/// Outcome of one case: number of checks made and the failed ones.
#[derive(Default)]
struct Case {
    checks: usize,
    failures: Vec<Value>,
}

impl Case {
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.checks += 1;
        if !ok {
            self.failures.push(detail());
        }
    }
}

fn lc(c: &ConjClass) -> LoopCombination {
    LoopCombination::from_class(c.clone())
}

fn lcs(cs: &[&ConjClass]) -> Vec<LoopCombination> {
    cs.iter().map(|c| lc(c)).collect()
}

fn show(c: &ConjClass) -> String {
    c.to_string()
}

fn fixture(i: usize) -> (&'static str, QuasiSurface) {
    let name = fixtures::NAMES[i % fixtures::NAMES.len()];
    (name, fixtures::by_name(name).expect("fixture"))
}

pub fn run_suite(suite: Suite, seed: u64, cases: Option<usize>) -> SuiteReport {
    let cases = cases.unwrap_or_else(|| suite.default_cases());
    let seed = seed ^ suite.salt();
    let outcomes: Vec<Case> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i as u64);
            let mut case = Case::default();
            if let Err(e) = run_case(suite, i, &mut rng, &mut case) {
                case.failures.push(json!({"case": i, "error": e.to_string()}));
            }
            case
        })
        .collect();
    let mut report = SuiteReport {
        suite,
        cases,
        checks: 0,
        failures: 0,
        counterexamples: Vec::new(),
        warnings: Vec::new(),
    };
    if cases == 0 {
        report.warnings.push("no cases run; the pass is vacuous".to_string());
    }
    for (i, c) in outcomes.into_iter().enumerate() {
        report.checks += c.checks;
        report.failures += c.failures.len();
        for f in c.failures {
            if report.counterexamples.len() < KEEP {
                report.counterexamples.push(json!({"case": i, "detail": f}));
            }
        }
    }
    report
}

pub fn run_all(seed: u64, cases: Option<usize>) -> Vec<SuiteReport> {
    Suite::ALL.iter().map(|&s| run_suite(s, seed, cases)).collect()
}

fn run_case(suite: Suite, i: usize, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    match suite {
        Suite::Oracle => oracle_case(rng, case),
        Suite::QuasiJacobiQt2 => quasi_jacobi_case(&fixtures::qt2(), rng, case),
        Suite::QuasiJacobiQg1 => quasi_jacobi_case(&fixtures::qg1(), rng, case),
        Suite::QuasiJacobiQd2 => quasi_jacobi_case(&fixtures::qd2(), rng, case),
        Suite::OmegaChangeFirstForm => omega_change_first_case(rng, case),
        Suite::OmegaChangeBullet => omega_change_bullet_case(rng, case),
        Suite::SymmetrizationFirstForm => symmetrization_first_case(rng, case),
        Suite::SymmetrizationBullet => symmetrization_bullet_case(rng, case),
        Suite::InvarianceConjugation
        | Suite::InvarianceRedepth
        | Suite::InvarianceDetour
        | Suite::InvarianceInterleaving
        | Suite::PerturbationCalibration => invariance_case(suite, rng, case),
        Suite::OmegaIndependence => omega_independence_case(i, rng, case),
        Suite::Symmetries => symmetries_case(i, rng, case),
        Suite::Derivation => derivation_case(rng, case),
        Suite::TraceSymmetries => trace_symmetries_case(i, rng, case),
        Suite::TraceQuasiJacobi => trace_jacobi_case(i, rng, case),
        Suite::TraceDerivationN1 => trace_derivation_case(i, rng, case),
        Suite::TraceSl2 => trace_sl2_case(i, rng, case, false),
        Suite::TraceSl2Defect => trace_sl2_case(i, rng, case, true),
        Suite::Qt2Table => qt2_table_case(case),
    }
}

/// Geometric gate braces against algebraic Fox braces of the gate derivative,
/// for m = 1, 2, 3 on a random quasi-surface.
fn oracle_case(rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let qs = random_surface(rng);
    let k = rng.gen_range(0..qs.gate_count());
    let d = qs.gate_derivative(k)?;
    for m in 1..=3 {
        let xs: Vec<ConjClass> = (0..m).map(|_| random_class(rng, qs.rank(), 8)).collect();
        let refs: Vec<&ConjClass> = xs.iter().collect();
        let geometric = gate_brace_geometric(&qs, k, &refs)?;
        let algebraic = algebraic_brace(&vec![d.clone(); m], &lcs(&refs))?;
        case.check(geometric == algebraic, || {
            json!({
                "surface": serde_json::to_value(qs.spec()).unwrap_or(Value::Null),
                "gate": qs.gate(k).name,
                "loops": xs.iter().map(show).collect::<Vec<_>>(),
                "geometric": geometric.to_json(),
                "algebraic": algebraic.to_json(),
            })
        });
    }
    Ok(())
}

fn quasi_jacobi_case(qs: &QuasiSurface, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let [x, y, z] = [0; 3].map(|_| random_class(rng, qs.rank(), 8));
    let r = verify_quasi_jacobi(qs, &lc(&x), &lc(&y), &lc(&z))?;
    case.check(r.equal, || json!({"x": show(&x), "y": show(&y), "z": show(&z), "report": r.to_json()}));
    Ok(())
}

fn surface_pair(rng: &mut Rng64) -> (QuasiSurface, GateOrientation, ConjClass, ConjClass) {
    let qs = random_surface(rng);
    let omega = random_omega(rng, qs.gate_count());
    let x = random_class(rng, qs.rank(), 8);
    let y = random_class(rng, qs.rank(), 8);
    (qs, omega, x, y)
}

fn pair_detail(qs: &QuasiSurface, omega: &GateOrientation, x: &ConjClass, y: &ConjClass) -> Value {
    json!({
        "surface": serde_json::to_value(qs.spec()).unwrap_or(Value::Null),
        "omega": omega.to_string(),
        "x": show(x),
        "y": show(y),
    })
}

/// `x ·_{kω} y = x ·_ω y − ε(ω,k) v_k(x) v_k(y)` for every gate `k`.
fn omega_change_first_case(rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (qs, omega, x, y) = surface_pair(rng);
    let base = first_form_classes(&qs, &omega, &x, &y)?;
    let (hx, hy) = (h1_class(&qs, &x), h1_class(&qs, &y));
    for k in 0..qs.gate_count() {
        let flipped = first_form_classes(&qs, &omega.flip(k), &x, &y)?;
        let expected = base - omega.sign(k) * v_h1(&qs, k, &hx) * v_h1(&qs, k, &hy);
        case.check(flipped == expected, || {
            json!({"case": pair_detail(&qs, &omega, &x, &y), "gate": k, "flipped": flipped, "expected": expected})
        });
    }
    Ok(())
}

/// `x •_{kω} y = x •_ω y − ε(ω,k) μ²_k(x,y)` for every gate `k`.
fn omega_change_bullet_case(rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (qs, omega, x, y) = surface_pair(rng);
    let base = bullet(&qs, &omega, &x, &y)?;
    for k in 0..qs.gate_count() {
        let flipped = bullet(&qs, &omega.flip(k), &x, &y)?;
        let mu2 = gate_brace_geometric(&qs, k, &[&x, &y])?;
        let expected = &base - &mu2.scaled(&BigInt::from(omega.sign(k)));
        case.check(flipped == expected, || {
            json!({
                "case": pair_detail(&qs, &omega, &x, &y),
                "gate": k,
                "flipped": flipped.to_json(),
                "expected": expected.to_json(),
            })
        });
    }
    Ok(())
}

/// `2 x ·_ω y = i_X(x,y) + Σ_k ε(ω,k) v_k(x) v_k(y)`.
fn symmetrization_first_case(rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (qs, omega, x, y) = surface_pair(rng);
    let (hx, hy) = (h1_class(&qs, &x), h1_class(&qs, &y));
    let lhs = 2 * first_form_classes(&qs, &omega, &x, &y)?;
    let gates: i64 = (0..qs.gate_count())
        .map(|k| omega.sign(k) * v_h1(&qs, k, &hx) * v_h1(&qs, k, &hy))
        .sum();
    let rhs = second_form(&qs, &hx, &hy)? + gates;
    case.check(lhs == rhs, || json!({"case": pair_detail(&qs, &omega, &x, &y), "lhs": lhs, "rhs": rhs}));
    Ok(())
}

/// `x •_ω y + y •_ω x = Σ_k ε(ω,k) μ²_k(x,y)` and
/// `2 x •_ω y = [x,y] + Σ_k ε(ω,k) μ²_k(x,y)`.
fn symmetrization_bullet_case(rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (qs, omega, x, y) = surface_pair(rng);
    let mut gates = LoopCombination::zero();
    for k in 0..qs.gate_count() {
        gates.add_assign_scaled(&gate_brace_geometric(&qs, k, &[&x, &y])?, &BigInt::from(omega.sign(k)));
    }
    let xy = bullet(&qs, &omega, &x, &y)?;
    let sum = &xy + &bullet(&qs, &omega, &y, &x)?;
    case.check(sum == gates, || {
        json!({"case": pair_detail(&qs, &omega, &x, &y), "sum": sum.to_json(), "gates": gates.to_json()})
    });
    let twice = xy.scaled(&BigInt::from(2));
    let rhs = &second_bracket(&qs, &x, &y)? + &gates;
    case.check(twice == rhs, || {
        json!({"case": pair_detail(&qs, &omega, &x, &y), "twice": twice.to_json(), "rhs": rhs.to_json()})
    });
    Ok(())
}

/// Bullet, bracket and first form of the pair computed from another
/// representative diagram agree with the normal-form values.
fn invariance_case(suite: Suite, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (qs, omega, x, y) = surface_pair(rng);
    let reference = (
        bullet(&qs, &omega, &x, &y)?,
        second_bracket_with(&qs, &omega, &x, &y)?,
        first_form_classes(&qs, &omega, &x, &y)?,
    );
    let base = family_of(&qs, &[&x, &y])?;
    let (values, shape) = match suite {
        Suite::PerturbationCalibration => {
            let swaps = rng.gen_range(1..=6);
            let e = perturb(rng, &qs, &base, swaps)?;
            let values = (
                bullet_explicit(&qs, &omega, &e, 0, 1),
                bullet_explicit(&qs, &omega, &e, 0, 1) - bullet_explicit(&qs, &omega, &e, 1, 0),
                first_form_explicit(&qs, &omega, &e, 0, 1),
            );
            (values, json!({"swaps": swaps, "surface_crossings": e.generic(&qs).surface.len()}))
        }
        _ => {
            let (d, shape) = alternative(suite, rng, &qs, &x, &y, &base)?;
            d.validate(&qs)?;
            let classes = d.classes(&qs);
            case.check(classes == vec![x.clone(), y.clone()], || {
                json!({"case": pair_detail(&qs, &omega, &x, &y), "classes": classes.iter().map(show).collect::<Vec<_>>()})
            });
            let values = (
                bullet_diagram(&qs, &omega, &d, 0, 1),
                bullet_diagram(&qs, &omega, &d, 0, 1) - bullet_diagram(&qs, &omega, &d, 1, 0),
                first_form(&qs, &omega, &d, 0, 1),
            );
            (values, shape)
        }
    };
    case.check(values == reference, || {
        json!({
            "case": pair_detail(&qs, &omega, &x, &y),
            "representative": shape,
            "bullet": [reference.0.to_json(), values.0.to_json()],
            "bracket": [reference.1.to_json(), values.1.to_json()],
            "first_form": [reference.2, values.2],
        })
    });
    Ok(())
}

fn alternative(
    suite: Suite,
    rng: &mut Rng64,
    qs: &QuasiSurface,
    x: &ConjClass,
    y: &ConjClass,
    base: &LaneDiagram,
) -> Result<(LaneDiagram, Value)> {
    Ok(match suite {
        Suite::InvarianceConjugation => {
            let conj = |rng: &mut Rng64, c: &ConjClass| {
                let u = random_word(rng, qs.rank(), 4);
                (u.mul(&c.word()).mul(&u.inverse()), u)
            };
            let (wx, ux) = conj(rng, x);
            let (wy, uy) = conj(rng, y);
            let d = combine_generic(&[
                LaneDiagram::single(loop_from_word(qs, &wx)?),
                LaneDiagram::single(loop_from_word(qs, &wy)?),
            ]);
            (d, json!({"conjugators": [ux.to_string(), uy.to_string()]}))
        }
        Suite::InvarianceRedepth => (redepth(rng, base), json!("redepth")),
        Suite::InvarianceDetour => {
            let mut d = base.clone();
            let n = rng.gen_range(1..=3);
            for _ in 0..n {
                insert_random_detour(rng, qs, &mut d);
            }
            (d, json!({"detours": n}))
        }
        Suite::InvarianceInterleaving => {
            let ds = [word_to_diagram(qs, x)?, word_to_diagram(qs, y)?];
            (combine_in_order(&ds, &[1, 0]), json!("second argument on top"))
        }
        _ => unreachable!("not a lane-diagram invariance suite"),
    })
}

/// The bracket and `i_X` computed with every gate orientation of a fixture.
fn omega_independence_case(i: usize, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (name, qs) = fixture(i);
    let x = random_class(rng, qs.rank(), 6);
    let y = random_class(rng, qs.rank(), 6);
    let (hx, hy) = (h1_class(&qs, &x), h1_class(&qs, &y));
    let ccw = GateOrientation::ccw(qs.gate_count());
    let bracket = second_bracket_with(&qs, &ccw, &x, &y)?;
    let form = second_form_with(&qs, &ccw, &hx, &hy)?;
    for omega in GateOrientation::all(qs.gate_count()) {
        let b = second_bracket_with(&qs, &omega, &x, &y)?;
        case.check(b == bracket, || {
            json!({"fixture": name, "omega": omega.to_string(), "x": show(&x), "y": show(&y), "bracket": [bracket.to_json(), b.to_json()]})
        });
        let f = second_form_with(&qs, &omega, &hx, &hy)?;
        case.check(f == form, || {
            json!({"fixture": name, "omega": omega.to_string(), "x": hx, "y": hy, "i_X": [form, f]})
        });
    }
    Ok(())
}

fn permutations3<T: Clone>(a: &T, b: &T, c: &T) -> [[T; 3]; 6] {
    [
        [a.clone(), b.clone(), c.clone()],
        [a.clone(), c.clone(), b.clone()],
        [b.clone(), a.clone(), c.clone()],
        [b.clone(), c.clone(), a.clone()],
        [c.clone(), a.clone(), b.clone()],
        [c.clone(), b.clone(), a.clone()],
    ]
}

fn symmetries_case(i: usize, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    if i == 0 {
        for t in sign_triples() {
            let [a, b, c] = t;
            for p in permutations3(&a, &b, &c) {
                case.check(delta3(p) == delta3(t), || json!({"delta": t, "permuted": p}));
            }
            case.check(delta3(t) - a * b * c == delta3_shifted(t), || json!({"delta_shift": t}));
        }
    }
    let (qs, omega, x, y) = surface_pair(rng);
    let z = random_class(rng, qs.rank(), 5);
    let detail = || json!({"case": pair_detail(&qs, &omega, &x, &y), "z": show(&z)});
    let xy = second_bracket(&qs, &x, &y)?;
    let yx = second_bracket(&qs, &y, &x)?;
    case.check(xy == -yx.clone(), || json!({"skew": detail(), "xy": xy.to_json(), "yx": yx.to_json()}));
    let b = bullet(&qs, &omega, &x, &y)?;
    let rb = bullet(&qs, &omega.reversed(), &y, &x)?;
    case.check(b == -rb.clone(), || json!({"reversal": detail(), "x_y": b.to_json(), "y_x_reversed": rb.to_json()}));
    let (lx, ly, lz) = (lc(&x), lc(&y), lc(&z));
    for k in 0..qs.gate_count() {
        let a = gate_brace_lc(&qs, k, &[&lx, &ly, &lz])?;
        let b = gate_brace_lc(&qs, k, &[&ly, &lz, &lx])?;
        let c = gate_brace_lc(&qs, k, &[&lz, &lx, &ly])?;
        case.check(a == b && b == c, || json!({"cyclic": detail(), "gate": k, "values": [a.to_json(), b.to_json(), c.to_json()]}));
    }
    // the six arguments orders of a short triple
    let [x5, y5, z5] = [0; 3].map(|_| random_class(rng, qs.rank(), 4));
    let (lx, ly, lz) = (lc(&x5), lc(&y5), lc(&z5));
    let s = s_bracket(&qs, &lx, &ly, &lz)?;
    for [a, b, c] in permutations3(&lx, &ly, &lz) {
        let p = s_bracket(&qs, &a, &b, &c)?;
        case.check(p == s, || {
            json!({"s_symmetry": {"x": show(&x5), "y": show(&y5), "z": show(&z5)}, "s": s.to_json(), "permuted": p.to_json()})
        });
    }
    Ok(())
}

/// `x •_ω (uv) = (x •_ω u) v + u (x •_ω v)` and `p(x •_ω u) = x •_ω p(u)`.
fn derivation_case(rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let qs = random_surface(rng);
    let omega = random_omega(rng, qs.gate_count());
    let x = random_class(rng, qs.rank(), 6);
    let u = random_word(rng, qs.rank(), 6);
    let v = random_word(rng, qs.rank(), 6);
    let detail = || {
        json!({
            "surface": serde_json::to_value(qs.spec()).unwrap_or(Value::Null),
            "omega": omega.to_string(),
            "x": show(&x),
            "u": u.to_string(),
            "v": v.to_string(),
        })
    };
    let du = kk_pairing(&qs, &omega, &x, &u)?;
    let dv = kk_pairing(&qs, &omega, &x, &v)?;
    let duv = kk_pairing(&qs, &omega, &x, &u.mul(&v))?;
    let leibniz = &(&du * &GroupRingElement::from_word(v.clone())) + &(&GroupRingElement::from_word(u.clone()) * &dv);
    case.check(duv == leibniz, || json!({"leibniz": detail(), "d_uv": duv.to_json(), "expected": leibniz.to_json()}));
    let projected = project_p(&du);
    let on_classes = bullet(&qs, &omega, &x, &canonical_conjugacy(&u))?;
    case.check(projected == on_classes, || {
        json!({"projection": detail(), "p_kk": projected.to_json(), "bullet": on_classes.to_json()})
    });
    Ok(())
}

/// Fixture and dimension for case `i` of a trace suite: the fixture cycles
/// fastest, then the dimension through 1, 2, 3.
fn trace_setting(i: usize) -> (&'static str, QuasiSurface, usize) {
    let (name, qs) = fixture(i);
    (name, qs, (i / fixtures::NAMES.len()) % 3 + 1)
}

fn trace_symmetries_case(i: usize, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (name, qs, n) = trace_setting(i);
    let rho = random_point(qs.rank(), n, rng);
    let [x, y, z] = [0; 3].map(|_| lc(&random_class(rng, qs.rank(), 5)));
    let detail = || json!({"fixture": name, "rep": rho.to_json(), "x": x.to_json(), "y": y.to_json(), "z": z.to_json()});
    let xy = eval_induced_bracket(&qs, &rho, InducedForm::SecondBracket, &[&x, &y])?;
    let yx = eval_induced_bracket(&qs, &rho, InducedForm::SecondBracket, &[&y, &x])?;
    case.check(xy == -yx.clone(), || json!({"skew": detail(), "values": [rational_string(&xy), rational_string(&yx)]}));
    for k in 0..qs.gate_count() {
        let a = eval_induced_bracket(&qs, &rho, InducedForm::GateBrace(k), &[&x, &y, &z])?;
        let b = eval_induced_bracket(&qs, &rho, InducedForm::GateBrace(k), &[&y, &z, &x])?;
        case.check(a == b, || json!({"cyclic": detail(), "gate": k, "values": [rational_string(&a), rational_string(&b)]}));
        // equivalent Fox derivatives give the same evaluated brace
        let d = qs.gate_derivative(k)?;
        let g = random_word(rng, qs.rank(), 3);
        let shifted = shift_derivative(&d, &g);
        let plain = eval_trace(&rho, &algebraic_brace(&[d.clone(), d], &[x.clone(), y.clone()])?)?;
        let moved = eval_trace(&rho, &algebraic_brace(&[shifted.clone(), shifted], &[x.clone(), y.clone()])?)?;
        case.check(plain == moved, || {
            json!({"shift": detail(), "gate": k, "g": g.to_string(), "values": [rational_string(&plain), rational_string(&moved)]})
        });
    }
    Ok(())
}

fn trace_jacobi_case(i: usize, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (name, qs, n) = trace_setting(i);
    let rho = random_point(qs.rank(), n, rng);
    let [x, y, z] = [0; 3].map(|_| lc(&random_class(rng, qs.rank(), 4)));
    let lhs = eval_trace(&rho, &jacobiator(&qs, &x, &y, &z)?)?;
    let rhs = eval_induced_bracket(&qs, &rho, InducedForm::MuTotal, &[&x, &y, &z])?
        - eval_induced_bracket(&qs, &rho, InducedForm::MuTotal, &[&y, &x, &z])?;
    // the evaluated bracket of evaluated brackets, through a second route
    let nested = eval_trace(&rho, &second_bracket_lc(&qs, &second_bracket_lc(&qs, &x, &y)?, &z)?)?
        + eval_trace(&rho, &second_bracket_lc(&qs, &second_bracket_lc(&qs, &y, &z)?, &x)?)?
        + eval_trace(&rho, &second_bracket_lc(&qs, &second_bracket_lc(&qs, &z, &x)?, &y)?)?;
    case.check(lhs == rhs && nested == lhs, || {
        json!({
            "fixture": name,
            "rep": rho.to_json(),
            "x": x.to_json(), "y": y.to_json(), "z": z.to_json(),
            "jacobiator": rational_string(&lhs),
            "mu_difference": rational_string(&rhs),
        })
    });
    let mu = mu_total(&qs, &x, &y, &z)?;
    let cyc = mu_total(&qs, &y, &z, &x)?;
    let (a, b) = (eval_trace(&rho, &mu)?, eval_trace(&rho, &cyc)?);
    case.check(a == b, || json!({"fixture": name, "mu_cyclic": [rational_string(&a), rational_string(&b)]}));
    Ok(())
}

fn trace_derivation_case(i: usize, rng: &mut Rng64, case: &mut Case) -> Result<()> {
    let (name, qs) = fixture(i);
    let rho = random_point(qs.rank(), 1, rng);
    let omega = random_omega(rng, qs.gate_count());
    let x = random_class(rng, qs.rank(), 5);
    let u = random_word(rng, qs.rank(), 5);
    let v = random_word(rng, qs.rank(), 5);
    let detail = || json!({"fixture": name, "rep": rho.to_json(), "omega": omega.to_string(), "x": show(&x), "u": u.to_string(), "v": v.to_string()});
    let r = verify_derivation_n1(&qs, &omega, &rho, &x, &u, &v)?;
    case.check(r.equal, || json!({"kk": detail(), "report": r.to_json()}));
    let b = verify_bracket_derivation_n1(&qs, &rho, &x, &u, &v)?;
    case.check(b.equal, || json!({"bracket": detail(), "report": b.to_json()}));
    Ok(())
}

/// `diagnostic = false`: the trace relation itself. `diagnostic = true`: the
/// defect against its closed form, and the relation for the trace-free part.
fn trace_sl2_case(i: usize, rng: &mut Rng64, case: &mut Case, diagnostic: bool) -> Result<()> {
    let (name, qs) = fixture(i);
    let rho = random_point(qs.rank(), 2, rng);
    let omega = random_omega(rng, qs.gate_count());
    let x = random_class(rng, qs.rank(), 5);
    let u = random_word(rng, qs.rank(), 5);
    let v = random_word(rng, qs.rank(), 5);
    let r = verify_sl2_consistency(&qs, &omega, &rho, &x, &u, &v)?;
    let detail = || {
        json!({
            "fixture": name,
            "rep": rho.to_json(),
            "omega": omega.to_string(),
            "x": show(&x),
            "u": u.to_string(),
            "v": v.to_string(),
            "report": r.to_json(),
        })
    };
    if diagnostic {
        case.check(r.defect == r.predicted_defect, detail);
        case.check(r.corrected_equal, detail);
    } else {
        case.check(r.equal, detail);
    }
    Ok(())
}

/// Pinned values on the one-gate-pair torus fixture with `z = g1`.
pub fn qt2_table() -> Result<Vec<(&'static str, Value, Value)>> {
    let qs = fixtures::qt2();
    let z: ConjClass = "g1".parse()?;
    let zz: ConjClass = "g1 g1".parse()?;
    let lz = lc(&z);
    let ccw = GateOrientation::ccw(2);
    let hz = h1_class(&qs, &z);
    let mut rows = vec![
        ("v_1(z)", json!(v_h1(&qs, 0, &hz)), json!(1)),
        ("v_2(z)", json!(v_h1(&qs, 1, &hz)), json!(-1)),
    ];
    let m1 = |k| gate_brace_lc(&qs, k, &[&lz]);
    rows.push(("mu1_g1(z)", m1(0)?.to_json(), lz.to_json()));
    rows.push(("mu1_g2(z)", m1(1)?.to_json(), (-lz.clone()).to_json()));
    rows.push(("mu2_g1(z,z)", gate_brace_lc(&qs, 0, &[&lz, &lz])?.to_json(), lc(&zz).to_json()));
    rows.push(("z bullet_ccw z", bullet(&qs, &ccw, &z, &z)?.to_json(), lc(&zz).to_json()));
    rows.push(("[z] dot_ccw [z]", json!(first_form_classes(&qs, &ccw, &z, &z)?), json!(1)));
    rows.push(("mu(z,z,z)", mu_total(&qs, &lz, &lz, &lz)?.to_json(), LoopCombination::zero().to_json()));
    Ok(rows)
}

fn qt2_table_case(case: &mut Case) -> Result<()> {
    for (name, got, expected) in qt2_table()? {
        case.check(got == expected, || json!({"entry": name, "got": got, "expected": expected}));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
    }

    #[test]
    fn small_runs_pass_and_repeat() {
        for s in [Suite::Oracle, Suite::QuasiJacobiQg1, Suite::Symmetries, Suite::InvarianceDetour, Suite::Qt2Table] {
            let a = run_suite(s, 3, Some(8));
            assert!(a.passed(), "{}", a.summary());
            assert_eq!(a, run_suite(s, 3, Some(8)));
        }
    }

    #[test]
    fn zero_cases_warn() {
        let r = run_suite(Suite::Derivation, 1, Some(0));
        assert!(r.passed());
        assert_eq!(r.warnings.len(), 1);
    }
}
