//! Brute-force checkers used to test the decision procedure: leaf
//! satisfiability by enumerating integer levels, random valuations and
//! formulas, and a fuzzer for soundness and invertibility of the rules.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::calculus::{rhbl_premises, rwbl_premises_with, Occurrence, PremiseTuple, Side};
use crate::formula::Formula;
use crate::hypersequent::{Hypersequent, RelKind, RelationalSequent};
use crate::linfeas::{solve, Feasibility, LinConstraint};
use crate::semantics::{satisfies, OmegaValue, Valuation};

/// Largest variable count the level enumeration accepts.
pub const MAX_ORACLE_VARS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} variables exceed the enumeration budget")]
    TooManyVariables(usize),
    #[error("`{0}` is not an irreducible sequent with a satisfaction clause")]
    Malformed(String),
}

/// Level of an atom: `None` is `+∞`.
type Level = Option<u64>;

#[derive(Clone, Copy)]
enum Atom {
    Bottom,
    Var(u32),
    Top,
}

fn atom(f: &Formula, s: &RelationalSequent) -> Result<Atom, OracleError> {
    match f {
        Formula::Bottom => Ok(Atom::Bottom),
        Formula::Var(i) => Ok(Atom::Var(*i)),
        _ if f.is_top() => Ok(Atom::Top),
        _ => Err(OracleError::Malformed(s.to_string())),
    }
}

/// What the negation of one sequent demands once levels are fixed.
enum Demand {
    Holds,
    Fails,
    /// `Σ coeff·frac ◁ bound` over finite-level variables.
    Linear(LinConstraint),
}

fn level(a: Atom, levels: &BTreeMap<u32, Level>) -> Level {
    match a {
        Atom::Bottom => Some(0),
        Atom::Var(i) => levels[&i],
        Atom::Top => None,
    }
}

fn cmp_levels(x: Level, y: Level) -> std::cmp::Ordering {
    match (x, y) {
        (Some(a), Some(b)) => a.cmp(&b),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    }
}

/// `Σ sign·frac(atom)` as coefficients; `⊥` has fractional part 0.
fn frac_terms(atoms: &[(Atom, i64)]) -> Vec<(u32, i64)> {
    atoms
        .iter()
        .filter_map(|(a, c)| match a {
            Atom::Var(i) => Some((*i, *c)),
            _ => None,
        })
        .collect()
}

/// The negation of `s` under fixed levels, read directly off the
/// satisfaction clauses.
fn negation_demand(s: &RelationalSequent, levels: &BTreeMap<u32, Level>) -> Result<Demand, OracleError> {
    let malformed = || OracleError::Malformed(s.to_string());
    let left = s.left().iter().map(|f| atom(f, s)).collect::<Result<Vec<_>, _>>()?;
    let right = s.right().iter().map(|f| atom(f, s)).collect::<Result<Vec<_>, _>>()?;
    let ok = |b: bool| if b { Demand::Holds } else { Demand::Fails };
    match s.kind() {
        RelKind::Ll => {
            let ([q], [r]) = (left.as_slice(), right.as_slice()) else { return Err(malformed()) };
            // not ⌊q⌋ < ⌊r⌋
            Ok(ok(cmp_levels(level(*q, levels), level(*r, levels)).is_ge()))
        }
        RelKind::PrecEq(z) | RelKind::Prec(z) => {
            let strict = matches!(s.kind(), RelKind::Prec(_));
            if left.len() + right.len() == 2 && z == 0 {
                let ([q], [r]) = (left.as_slice(), right.as_slice()) else { return Err(malformed()) };
                let (lq, lr) = (level(*q, levels), level(*r, levels));
                if lq != lr {
                    return Ok(Demand::Holds);
                }
                if lq.is_none() {
                    // ∞ ≤ ∞ holds, ∞ < ∞ does not; negate that.
                    return Ok(ok(strict));
                }
                // Not v(q) < v(r) is v(r) ≤ v(q); not v(q) ≤ v(r) is v(r) < v(q).
                let coeffs = frac_terms(&[(*r, 1), (*q, -1)]);
                return Ok(Demand::Linear(LinConstraint::new(coeffs, 0, !strict)));
            }
            if left.len() + right.len() < 2 {
                return Err(malformed());
            }
            let all: Vec<Level> = left.iter().chain(&right).map(|a| level(*a, levels)).collect();
            let shared = all[0].is_some() && all.iter().all(|l| *l == all[0]);
            if !shared {
                return Ok(Demand::Holds);
            }
            // not (Σ left − n ◁ Σ right − m + z)  ⇔  Σ right − Σ left ◁' m − n − z
            let atoms: Vec<(Atom, i64)> =
                right.iter().map(|a| (*a, 1)).chain(left.iter().map(|a| (*a, -1))).collect();
            let bound = right.len() as i64 - left.len() as i64 - z;
            Ok(Demand::Linear(LinConstraint::new(frac_terms(&atoms), bound, !strict)))
        }
    }
}

fn level_assignments(vars: &[u32], top_level: u64) -> impl Iterator<Item = BTreeMap<u32, Level>> + '_ {
    let choices = top_level as usize + 2;
    let total = choices.pow(vars.len() as u32);
    (0..total).map(move |mut code| {
        vars.iter()
            .map(|&v| {
                let c = code % choices;
                code /= choices;
                (v, if c as u64 > top_level { None } else { Some(c as u64) })
            })
            .collect()
    })
}

/// A valuation falsifying the irreducible hypersequent `h`, if one exists.
/// Integer parts are enumerated over `{0, …, |vars|} ∪ {∞}` with `⊥` pinned
/// at level 0; the fractional parts are then a linear system.
pub fn oracle_leaf_satisfiable(h: &Hypersequent) -> Result<Option<Valuation>, OracleError> {
    let vars: Vec<u32> = h.variables().into_iter().collect();
    if vars.len() > MAX_ORACLE_VARS {
        return Err(OracleError::TooManyVariables(vars.len()));
    }
    'levels: for levels in level_assignments(&vars, vars.len() as u64) {
        let mut rows = Vec::new();
        for s in h.iter() {
            match negation_demand(s, &levels)? {
                Demand::Holds => {}
                Demand::Fails => continue 'levels,
                Demand::Linear(c) => rows.push(c),
            }
        }
        let finite: BTreeSet<u32> = levels.iter().filter(|(_, l)| l.is_some()).map(|(v, _)| *v).collect();
        if let Feasibility::Feasible(w) = solve(&rows, &finite) {
            let v: Valuation = levels
                .iter()
                .map(|(&var, l)| {
                    let value = match l {
                        None => OmegaValue::Infinite,
                        Some(k) => OmegaValue::finite(*k, w[&var].clone()),
                    };
                    (var, value)
                })
                .collect();
            assert_eq!(satisfies(&v, h), Ok(false), "oracle countermodel {v} satisfies {h}");
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Like [`oracle_leaf_satisfiable`] but searching fractional parts on the
/// grid `{0, 1/den, …}` and deciding with the semantics alone, without the
/// linear solver.
pub fn oracle_leaf_satisfiable_grid(h: &Hypersequent, den: u32) -> Result<Option<Valuation>, OracleError> {
    let vars: Vec<u32> = h.variables().into_iter().collect();
    if vars.len() > 3 {
        return Err(OracleError::TooManyVariables(vars.len()));
    }
    let top_level = vars.len() as u64;
    let per_var = (top_level as usize + 1) * den as usize + 1;
    let total = per_var.pow(vars.len() as u32);
    for mut code in 0..total {
        let mut v = Valuation::new();
        for &var in &vars {
            let c = code % per_var;
            code /= per_var;
            let value = if c == per_var - 1 {
                OmegaValue::Infinite
            } else {
                let (k, j) = (c / den as usize, c % den as usize);
                OmegaValue::finite(k as u64, BigRational::new((j as i64).into(), (den as i64).into()))
            };
            v.set(var, value);
        }
        match satisfies(&v, h) {
            Ok(false) => return Ok(Some(v)),
            Ok(true) => {}
            Err(_) => return Err(OracleError::Malformed(h.to_string())),
        }
    }
    Ok(None)
}

/// Each variable is `+∞` with probability `1/(max_int+2)`, otherwise
/// `k + j/denominator` with `k ≤ max_int` and `j < denominator` uniform.
pub fn random_valuation(seed: u64, vars: &BTreeSet<u32>, max_int: u64, denominator: u32) -> Valuation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_valuation_with(&mut rng, vars, max_int, denominator)
}

pub fn random_valuation_with<R: Rng>(rng: &mut R, vars: &BTreeSet<u32>, max_int: u64, denominator: u32) -> Valuation {
    assert!(denominator >= 1, "denominator must be positive");
    vars.iter()
        .map(|&v| {
            let value = if rng.random_range(0..max_int + 2) == 0 {
                OmegaValue::Infinite
            } else {
                let k = rng.random_range(0..=max_int);
                let j = rng.random_range(0..denominator);
                OmegaValue::finite(k, BigRational::new(i64::from(j).into(), i64::from(denominator).into()))
            };
            (v, value)
        })
        .collect()
}

/// A random formula with exactly `complexity` connectives over
/// `p1..=p{vars}`; `⊥` appears at leaves with low probability.
pub fn random_formula<R: Rng>(rng: &mut R, complexity: usize, vars: u32) -> Formula {
    if complexity == 0 {
        return if rng.random_range(0..8) == 0 { Formula::Bottom } else { Formula::Var(rng.random_range(1..=vars)) };
    }
    let left = rng.random_range(0..complexity);
    let l = random_formula(rng, left, vars);
    let r = random_formula(rng, complexity - 1 - left, vars);
    if rng.random_bool(0.5) {
        Formula::conj(l, r)
    } else {
        Formula::imp(l, r)
    }
}

/// Which rule family a fuzz violation came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleFamily {
    Rewriting,
    Logical,
}

/// Deliberate rule corruptions used to check that the fuzzer has teeth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// The fourth conjunction premise of the rewriting rule without its
    /// index update.
    Conj4NoIndexBump,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub family: RuleFamily,
    pub trial: usize,
    pub conclusion: String,
    pub valuation: String,
    pub conclusion_holds: bool,
    pub failing_premises: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub trials: usize,
    pub rewriting_checks: usize,
    pub logical_checks: usize,
    pub violations: Vec<Violation>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A reducible hypersequent reached by a short random walk down the
/// reduction tree of a random formula.
fn random_conclusion<R: Rng>(rng: &mut R) -> Hypersequent {
    loop {
        let complexity = rng.random_range(1..=6);
        let vars = rng.random_range(1..=3);
        let a = random_formula(rng, complexity, vars);
        let mut g = Hypersequent::root(&a);
        let steps = rng.random_range(0..=a.complexity());
        for _ in 0..steps {
            let Ok(t) = crate::calculus::rwbl_premises(&g) else { break };
            let p = &t.premises[rng.random_range(0..t.len())];
            let next = p.hypersequent();
            if next.is_irreducible() {
                break;
            }
            g = next;
        }
        if !g.is_irreducible() {
            return g;
        }
    }
}

fn check(
    family: RuleFamily,
    trial: usize,
    g: &Hypersequent,
    t: &PremiseTuple,
    v: &Valuation,
) -> Option<Violation> {
    let holds = satisfies(v, g).expect("well-formed conclusion");
    let failing: Vec<String> = t
        .premises
        .iter()
        .filter(|p| !satisfies(v, &p.hypersequent()).expect("well-formed premise"))
        .map(|p| p.tag.to_string())
        .collect();
    (holds != failing.is_empty()).then(|| Violation {
        family,
        trial,
        conclusion: g.to_string(),
        valuation: v.to_string(),
        conclusion_holds: holds,
        failing_premises: failing,
    })
}

/// Random conclusions and valuations; each conclusion must hold exactly
/// when all premises do, for both rule families.
pub fn fuzz_rules(trials: usize, seed: u64, mutation: Mutation) -> FuzzReport {
    let mut report = FuzzReport { trials, ..FuzzReport::default() };
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let g = random_conclusion(&mut rng);
        let den = [2, 3, 4, 6, 8][rng.random_range(0..5)];
        let v = random_valuation_with(&mut rng, &g.variables(), 2, den);

        let t = rwbl_premises_with(&g, mutation != Mutation::Conj4NoIndexBump).expect("reducible");
        report.rewriting_checks += 1;
        report.violations.extend(check(RuleFamily::Rewriting, trial, &g, &t, &v));

        // Any occurrence of the pivot, not only the default one.
        let pivot = g.most_complex().expect("reducible").clone();
        let occurrences: Vec<Occurrence> = g
            .iter()
            .flat_map(|s| {
                let mut out = Vec::new();
                if s.left().contains(&pivot) {
                    out.push(Occurrence { sequent: s.clone(), side: Side::Left });
                }
                if s.right().contains(&pivot) {
                    out.push(Occurrence { sequent: s.clone(), side: Side::Right });
                }
                out
            })
            .collect();
        let occ = &occurrences[rng.random_range(0..occurrences.len())];
        let t = rhbl_premises(&g, occ).expect("occurrence holds the pivot");
        report.logical_checks += 1;
        report.violations.extend(check(RuleFamily::Logical, trial, &g, &t, &v));
    }
    report
}
