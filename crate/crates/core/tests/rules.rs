//! Valuation types against rule premises, and properties of trees, leaves
//! and the prover.

mod common;

use std::ops::ControlFlow;

use proptest::prelude::*;
use rwbl_core::axiom_check::{analyze, AxiomVerdict, Term};
use rwbl_core::calculus::{default_occurrence, rhbl_premises, rwbl_premises, Connective, PremiseTuple};
use rwbl_core::oracle::oracle_leaf_satisfiable;
use rwbl_core::prover::{check_no_tautology, check_tautology, check_tautology_with, ProveResult};
use rwbl_core::reduction::{walk, Mode, Visit};
use rwbl_core::semantics::{imp_type, odot_type};
use rwbl_core::{satisfies, Formula, Hypersequent, Valuation};

use common::{compound, descend, formula, reducible, valuation};

/// Checks both directions of the type/premise correspondence for one tuple.
fn premises_match_type(g: &Hypersequent, t: &PremiseTuple, v: &Valuation) -> Result<(), TestCaseError> {
    let (Formula::Conj(a, b) | Formula::Impl(a, b)) = &t.pivot else { unreachable!() };
    let kind = match t.connective() {
        Connective::Conj => odot_type(v, a, b).unwrap(),
        Connective::Impl => imp_type(v, a, b).unwrap(),
    };
    let conclusion = satisfies(v, g).unwrap();
    for p in &t.premises {
        let j = p.tag.index;
        prop_assert_eq!(satisfies(v, &p.antecedent).unwrap(), j != kind, "antecedent {} under type {}", p.tag, kind);
        if j == kind {
            prop_assert_eq!(satisfies(v, &p.consequent).unwrap(), conclusion, "consequent {}", p.tag);
        }
    }
    Ok(())
}

fn leaves(a: &Formula) -> Vec<Hypersequent> {
    let mut out = vec![];
    let _ = walk(&Hypersequent::root(a), Mode::Rwbl, Some(a.complexity()), &mut |v: &Visit| {
        if v.is_leaf {
            out.push(v.label.clone());
        }
        ControlFlow::Continue(())
    });
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rewriting_premises_follow_valuation_types(g in reducible(), v in valuation()) {
        premises_match_type(&g, &rwbl_premises(&g).unwrap(), &v)?;
    }

    #[test]
    fn logical_premises_follow_valuation_types(g in reducible(), v in valuation()) {
        let occ = default_occurrence(&g).unwrap();
        premises_match_type(&g, &rhbl_premises(&g, &occ).unwrap(), &v)?;
    }

    #[test]
    fn rewriting_removes_a_subformula(g in reducible()) {
        let before = g.reducible_subformulas().len();
        for p in rwbl_premises(&g).unwrap().premises {
            prop_assert!(p.hypersequent().reducible_subformulas().len() < before, "{}", p.tag);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trees_are_shallow_and_keep_variables(a in formula(3)) {
        let mut height = 0;
        let mut ok = true;
        let flow = walk(&Hypersequent::root(&a), Mode::Rwbl, Some(a.complexity()), &mut |v: &Visit| {
            height = height.max(v.depth);
            ok &= !v.is_leaf || v.label.variables() == a.variables();
            ControlFlow::Continue(())
        });
        prop_assert!(flow.is_ok());
        prop_assert!(height <= a.complexity());
        prop_assert!(ok);
    }

    #[test]
    fn refutations_come_with_working_certificates(a in formula(3)) {
        let first = check_tautology(&a).unwrap();
        prop_assert_eq!(&first, &check_tautology(&a).unwrap());
        if let ProveResult::NotProvable(r) = first {
            let cert = r.certificate.clone().unwrap();
            prop_assert_eq!(cert.moves.len(), a.complexity());
            let v = check_no_tautology(&a, &cert).unwrap();
            prop_assert!(!rwbl_core::eval(&v, &a).unwrap().is_infinite());
        }
    }

    // logical trees grow past 10^5 nodes already at complexity 2
    #[test]
    fn logical_and_rewriting_trees_agree(a in formula(1)) {
        prop_assert!(a.complexity() <= 1);
        let rw = check_tautology(&a).unwrap().is_provable();
        let lg = check_tautology_with(&a, Mode::Rhbl, Some(200)).unwrap().is_provable();
        prop_assert_eq!(rw, lg);
    }

    #[test]
    fn descending_never_reaches_an_unreducible_label(a in compound(4), path in proptest::collection::vec(any::<u8>(), 0..6)) {
        prop_assert!(!descend(&a, &path).is_irreducible());
    }
}

proptest! {
    // the oracle enumerates orderings of all leaf terms
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn leaf_verdicts_and_countermodels(a in compound(3)) {
        for leaf in leaves(&a) {
            let analysis = analyze(&leaf).unwrap();
            let mut terms: Vec<Term> = analysis.clustering.clusters.iter().flatten().copied().collect();
            let n = terms.len();
            terms.sort();
            terms.dedup();
            prop_assert_eq!(terms.len(), n, "clusters overlap");
            for i in leaf.variables() {
                prop_assert!(terms.contains(&Term::Var(i)));
            }
            prop_assert!(terms.contains(&Term::Top));
            let slow = oracle_leaf_satisfiable(&leaf).unwrap();
            if let Some(w) = &slow {
                prop_assert!(!satisfies(w, &leaf).unwrap());
            }
            match analysis.verdict {
                AxiomVerdict::Axiom => prop_assert!(slow.is_none(), "{}", leaf),
                AxiomVerdict::NotAxiom(w) => {
                    prop_assert!(slow.is_some(), "{}", leaf);
                    prop_assert!(!satisfies(&w, &leaf).unwrap());
                }
            }
        }
    }
}

#[test]
fn logical_and_rewriting_trees_agree_on_small_cases() {
    for (text, provable) in [
        ("p1 -> p1", true),
        ("p1 * p2 -> p1", true),
        ("p1 -> p1 * p1", false),
        ("(p1 -> p2) -> (p1 -> p2)", true),
        ("p1 -> p2 -> p1", true),
        ("p1 * 0 -> 0", true),
        ("p1 * p1 -> p1", true),
        ("(p1 -> 0) -> 0", false),
    ] {
        let a = rwbl_core::parse(text).unwrap();
        assert_eq!(check_tautology(&a).unwrap().is_provable(), provable, "{text}");
        assert_eq!(check_tautology_with(&a, Mode::Rhbl, Some(200)).unwrap().is_provable(), provable, "{text}");
    }
}
