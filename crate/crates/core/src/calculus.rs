//! Rules of the calculus. Given a conclusion, produce its ordered premises.
//!
//! Each premise is an antecedent, which is a negated comparison that singles
//! out one valuation type, together with a consequent, which is the
//! conclusion with the pivot rewritten as it behaves under that type.
//! Two rule families are provided. The rewriting rules eliminate every
//! occurrence of the pivot at once. The logical rules eliminate one
//! occurrence at a time.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::hypersequent::{
    balanced_conj, decompose, expand_abbreviation, subst_all, subst_impl, subst_pair, Abbreviation,
    Hypersequent, HypersequentError, RelKind, RelationalSequent,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    Conj,
    Impl,
}

impl Connective {
    pub fn arity(self) -> usize {
        match self {
            Connective::Conj => 5,
            Connective::Impl => 3,
        }
    }
}

/// Which valuation type a premise covers: `⊙1..⊙5` or `→1..→3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PremiseTag {
    pub connective: Connective,
    /// 1-based.
    pub index: u8,
}

impl fmt::Display for PremiseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.connective {
            Connective::Conj => write!(f, "*{}", self.index),
            Connective::Impl => write!(f, "->{}", self.index),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub tag: PremiseTag,
    pub antecedent: Hypersequent,
    pub consequent: Hypersequent,
}

impl Premise {
    /// The premise as a single hypersequent.
    pub fn hypersequent(&self) -> Hypersequent {
        self.antecedent.clone().union(self.consequent.clone())
    }

    pub fn into_hypersequent(self) -> Hypersequent {
        self.antecedent.union(self.consequent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PremiseTuple {
    pub pivot: Formula,
    pub premises: Vec<Premise>,
}

impl PremiseTuple {
    pub fn connective(&self) -> Connective {
        self.premises[0].tag.connective
    }

    pub fn len(&self) -> usize {
        self.premises.len()
    }

    pub fn is_empty(&self) -> bool {
        self.premises.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("hypersequent is irreducible")]
    Irreducible,
    #[error("the selected occurrence does not hold the pivot")]
    OccurrenceMismatch,
    #[error(transparent)]
    Hypersequent(#[from] HypersequentError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One occurrence of the pivot, named by its sequent and side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub sequent: RelationalSequent,
    pub side: Side,
}

/// The pivot and the antecedents shared by both rule families.
fn antecedents(pivot: &Formula) -> Result<(Connective, Formula, Formula, Vec<Hypersequent>), CalculusError> {
    use Abbreviation::*;
    let top = Formula::top();
    match pivot {
        Formula::Conj(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let list = vec![
                expand_abbreviation(NegLl, &a, &b),
                expand_abbreviation(NegLl, &b, &a),
                expand_abbreviation(NegPrecEq1Pair, &a, &b),
                expand_abbreviation(NegPairPrecMinus1, &a, &b),
                expand_abbreviation(NegPrecEq, &top, &a).union(expand_abbreviation(NegPrecEq, &top, &b)),
            ];
            Ok((Connective::Conj, a, b, list))
        }
        Formula::Impl(a, b) if !pivot.is_top() => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let list = vec![
                expand_abbreviation(NegLl, &b, &a),
                expand_abbreviation(NegPrec, &b, &a),
                expand_abbreviation(NegLeq, &a, &b),
            ];
            Ok((Connective::Impl, a, b, list))
        }
        _ => Err(CalculusError::Irreducible),
    }
}

fn assemble(pivot: Formula, connective: Connective, ants: Vec<Hypersequent>, cons: Vec<Hypersequent>) -> PremiseTuple {
    let premises = ants
        .into_iter()
        .zip(cons)
        .enumerate()
        .map(|(i, (antecedent, consequent))| Premise {
            tag: PremiseTag { connective, index: i as u8 + 1 },
            antecedent,
            consequent,
        })
        .collect();
    PremiseTuple { pivot, premises }
}

/// Premises of the rewriting rule for the most complex formula of `g`.
pub fn rwbl_premises(g: &Hypersequent) -> Result<PremiseTuple, CalculusError> {
    rwbl_premises_with(g, true)
}

/// `shift = false` drops the index update from the fourth conjunction
/// premise, giving an unsound rule for fuzzer power checks.
pub(crate) fn rwbl_premises_with(g: &Hypersequent, shift: bool) -> Result<PremiseTuple, CalculusError> {
    let pivot = g.most_complex().map_err(|_| CalculusError::Irreducible)?.clone();
    let (connective, a, b, ants) = antecedents(&pivot)?;
    let d = decompose(g, &pivot)?;
    let smaller = a.clone().min(b.clone());
    let top = Formula::top();
    let ll_smaller = subst_all(&d.ll, &pivot, &smaller);
    let at_top = subst_all(&d.ll, &pivot, &top)
        .union(subst_all(&d.simple, &pivot, &top))
        .union(d.rest.clone());
    let cons = match connective {
        Connective::Conj => vec![
            subst_all(g, &pivot, &a),
            subst_all(g, &pivot, &b),
            ll_smaller.clone().union(subst_pair(&d.prec, &pivot, (&a, &b))?).union(d.rest.clone()),
            ll_smaller.union(balanced_conj(&d.prec, &pivot, shift)).union(d.rest.clone()),
            at_top,
        ],
        Connective::Impl => vec![
            subst_all(g, &pivot, &b),
            ll_smaller.union(subst_impl(&d.prec, &pivot)).union(d.rest.clone()),
            at_top,
        ],
    };
    Ok(assemble(pivot, connective, ants, cons))
}

/// The occurrence the logical rules use by default: the first sequent in
/// canonical order holding the most complex formula, left side first.
pub fn default_occurrence(g: &Hypersequent) -> Option<Occurrence> {
    let pivot = g.most_complex().ok()?;
    g.iter().find(|s| s.contains(pivot)).map(|s| Occurrence {
        sequent: s.clone(),
        side: if s.left().contains(pivot) { Side::Left } else { Side::Right },
    })
}

fn without_one(side: &[Formula], f: &Formula) -> Vec<Formula> {
    let mut out = side.to_vec();
    let at = out.iter().position(|g| g == f).expect("occurrence present");
    out.remove(at);
    out
}

/// Premises of the logical rule acting on one occurrence of the most
/// complex formula of `g`.
pub fn rhbl_premises(g: &Hypersequent, occ: &Occurrence) -> Result<PremiseTuple, CalculusError> {
    let pivot = g.most_complex().map_err(|_| CalculusError::Irreducible)?.clone();
    let s = &occ.sequent;
    let held = match occ.side {
        Side::Left => s.left().contains(&pivot),
        Side::Right => s.right().contains(&pivot),
    };
    if !g.contains(s) || !held {
        return Err(CalculusError::OccurrenceMismatch);
    }
    let (connective, a, b, ants) = antecedents(&pivot)?;
    let rest = g.filtered(|t| t != s);
    let top = Formula::top();

    // Consequent sequents, before adding the untouched part.
    let cons: Vec<Vec<RelationalSequent>> = if s.kind() == RelKind::Ll {
        let ll = RelationalSequent::ll;
        match occ.side {
            Side::Left => {
                let c = s.right().first().cloned().ok_or(CalculusError::OccurrenceMismatch)?;
                match connective {
                    Connective::Conj => vec![
                        vec![ll(a.clone(), c.clone())],
                        vec![ll(b.clone(), c.clone())],
                        vec![ll(a.clone(), c.clone())],
                        vec![ll(a.clone(), c)],
                        vec![],
                    ],
                    Connective::Impl => vec![vec![ll(b.clone(), c.clone())], vec![ll(a.clone(), c)], vec![]],
                }
            }
            Side::Right => {
                let c = s.left().first().cloned().ok_or(CalculusError::OccurrenceMismatch)?;
                match connective {
                    Connective::Conj => vec![
                        vec![ll(c.clone(), a.clone())],
                        vec![ll(c.clone(), b.clone())],
                        vec![ll(c.clone(), a.clone())],
                        vec![ll(c.clone(), a.clone())],
                        vec![ll(c, top.clone())],
                    ],
                    Connective::Impl => {
                        vec![vec![ll(c.clone(), b.clone())], vec![ll(c.clone(), a.clone())], vec![ll(c, top.clone())]]
                    }
                }
            }
        }
    } else {
        let kind = s.kind();
        let z = kind.index();
        let (gamma, delta) = match occ.side {
            Side::Left => (without_one(s.left(), &pivot), s.right().to_vec()),
            Side::Right => (without_one(s.right(), &pivot), s.left().to_vec()),
        };
        let cat = |xs: &[&Formula], ys: &[Formula]| xs.iter().map(|f| (*f).clone()).chain(ys.iter().cloned()).collect::<Vec<_>>();
        // Pivot side first, the opposite side second; oriented below.
        let mk = |pivot_side: Vec<Formula>, other: Vec<Formula>, k: RelKind| match occ.side {
            Side::Left => RelationalSequent::new(pivot_side, k, other),
            Side::Right => RelationalSequent::new(other, k, pivot_side),
        };
        let exception = kind == RelKind::PrecEq(0) && gamma.is_empty() && delta.len() == 1;
        let last = if exception {
            vec![RelationalSequent::prec_eq(vec![top.clone()], delta.clone(), 0)]
        } else {
            vec![]
        };
        let shift = match occ.side {
            Side::Left => 1,
            Side::Right => -1,
        };
        match connective {
            Connective::Conj => vec![
                vec![mk(cat(&[&a], &gamma), delta.clone(), kind)?],
                vec![mk(cat(&[&b], &gamma), delta.clone(), kind)?],
                vec![mk(cat(&[&a, &b], &gamma), delta.clone(), kind)?],
                vec![mk(cat(&[&a, &b], &gamma), cat(&[&a, &b], &delta), kind.with_index(z + shift))?],
                last,
            ],
            Connective::Impl => {
                // Γ, B ◁ A, Δ on the left; Δ, A ◁ B, Γ on the right.
                let second = mk(cat(&[&b], &gamma), cat(&[&a], &delta), kind)?;
                vec![vec![mk(cat(&[&b], &gamma), delta.clone(), kind)?], vec![second], last]
            }
        }
    };
    let cons = cons
        .into_iter()
        .map(|ss| ss.into_iter().collect::<Hypersequent>().union(rest.clone()))
        .collect();
    Ok(assemble(pivot, connective, ants, cons))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::semantics::{satisfies, Valuation};

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn h(s: &str) -> Hypersequent {
        s.parse().unwrap()
    }

    fn neg(name: Abbreviation, a: &str, b: &str) -> Hypersequent {
        expand_abbreviation(name, &f(a), &f(b))
    }

    #[test]
    fn conjunction_rewrite_bumps_index() {
        let a = "p1 -> p2";
        let b = "p3 -> p1";
        let g = h(&format!("({a}) * ({b}), ({a}) * ({b}) <=_2 ({a}) * ({b})"));
        let t = rwbl_premises(&g).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.premises[3].antecedent, neg(Abbreviation::NegPairPrecMinus1, a, b));
        assert_eq!(t.premises[3].consequent, h(&format!("({a}), ({b}) <=_3 ({a}), ({b})")));
    }

    #[test]
    fn implication_rewrite_second_premise() {
        // A → B ≪ Δ1 | Δ2 ≺ A → B, Γ2 | H
        let g = h("(p1 -> p2) << p3 | p4 < (p1 -> p2), p5 | p6 << p7");
        let t = rwbl_premises(&g).unwrap();
        assert_eq!(t.connective(), Connective::Impl);
        assert_eq!(t.premises[1].antecedent, neg(Abbreviation::NegPrec, "p2", "p1"));
        assert_eq!(t.premises[1].consequent, h("p1 << p3 | p4, p1 < p2, p5 | p6 << p7"));
    }

    #[test]
    fn implication_rewrite_at_root() {
        let t = rwbl_premises(&h("top <= (p1 -> p2)")).unwrap();
        assert_eq!(t.premises[0].hypersequent(), neg(Abbreviation::NegLl, "p2", "p1").union(h("top <= p2")));
        assert_eq!(t.premises[2].hypersequent(), neg(Abbreviation::NegLeq, "p1", "p2").union(h("top <= top")));
        assert_eq!(t.premises[2].tag.to_string(), "->3");
    }

    #[test]
    fn fifth_conjunction_premise_sends_pivot_to_top() {
        let g = h("(p1 * p2) << p3 | (p1 * p2), p3 <=_1 p4");
        let t = rwbl_premises(&g).unwrap();
        let expected = neg(Abbreviation::NegPrecEq, "top", "p1")
            .union(neg(Abbreviation::NegPrecEq, "top", "p2"))
            .union(h("top << p3"));
        assert_eq!(t.premises[4].hypersequent(), expected);
    }

    #[test]
    fn logical_rules_on_ll() {
        let g = h("(p1 * p2) << p3");
        let occ = default_occurrence(&g).unwrap();
        assert_eq!(occ.side, Side::Left);
        let t = rhbl_premises(&g, &occ).unwrap();
        assert_eq!(t.premises[1].hypersequent(), neg(Abbreviation::NegLl, "p2", "p1").union(h("p2 << p3")));
        assert!(t.premises[4].consequent.is_empty());

        let g = h("p3 << (p1 * p2)");
        let t = rhbl_premises(&g, &default_occurrence(&g).unwrap()).unwrap();
        let ant = neg(Abbreviation::NegPrecEq, "top", "p1").union(neg(Abbreviation::NegPrecEq, "top", "p2"));
        assert_eq!(t.premises[4].hypersequent(), ant.union(h("p3 << top")));
    }

    #[test]
    fn logical_rule_exception_at_root() {
        let g = h("top <= (p1 -> p2)");
        let t = rhbl_premises(&g, &default_occurrence(&g).unwrap()).unwrap();
        assert_eq!(t.premises[2].hypersequent(), neg(Abbreviation::NegLeq, "p1", "p2").union(h("top <= top")));
        assert_eq!(t.premises[1].consequent, h("top, p1 <= p2"));
    }

    #[test]
    fn logical_rule_strict_keeps_empty_fifth() {
        let g = h("(p1 * p2) < p3");
        let t = rhbl_premises(&g, &default_occurrence(&g).unwrap()).unwrap();
        assert!(t.premises[4].consequent.is_empty());
        assert_eq!(t.premises[3].consequent, h("p1, p2 <_1 p1, p2, p3"));
    }

    #[test]
    fn logical_rule_removes_one_occurrence() {
        let g = h("(p1 -> p2), (p1 -> p2) <=_1 p3");
        let t = rhbl_premises(&g, &default_occurrence(&g).unwrap()).unwrap();
        assert_eq!(t.premises[1].consequent, h("p2, (p1 -> p2) <=_1 p1, p3"));
    }

    #[test]
    fn mismatched_occurrence_is_rejected() {
        let g = h("(p1 * p2) << p3 | p4 <= p5");
        let occ = Occurrence { sequent: h("p4 <= p5").iter().next().unwrap().clone(), side: Side::Left };
        assert_eq!(rhbl_premises(&g, &occ), Err(CalculusError::OccurrenceMismatch));
        assert_eq!(rwbl_premises(&h("p1 << p2")), Err(CalculusError::Irreducible));
    }

    #[test]
    fn rewriting_is_invertible_on_an_instance() {
        use crate::semantics::OmegaValue;
        let g = h("top <= (p1 * p2 -> p1)");
        let t = rwbl_premises(&g).unwrap();
        let v = Valuation::new().with(1, OmegaValue::from_parts(0, 1, 2)).with(2, OmegaValue::Infinite);
        let all = t.premises.iter().all(|p| satisfies(&v, &p.hypersequent()).unwrap());
        assert_eq!(all, satisfies(&v, &g).unwrap());
    }
}
