#![allow(dead_code)]

use proptest::prelude::*;
use rwbl_core::calculus::rwbl_premises;
use rwbl_core::{Formula, Hypersequent, OmegaValue, Valuation};

pub const VARS: u32 = 3;

pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![1 => Just(Formula::Bottom), 6 => (1..=VARS).prop_map(Formula::var)];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::conj(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
        ]
    })
}

pub fn compound(depth: u32) -> impl Strategy<Value = Formula> {
    formula(depth).prop_filter("compound", |a| !a.is_atomic())
}

pub fn value() -> impl Strategy<Value = OmegaValue> {
    let finite = (0u64..3, 1i64..=8)
        .prop_flat_map(|(i, d)| (Just(i), 0..d, Just(d)))
        .prop_map(|(i, n, d)| OmegaValue::from_parts(i, n, d));
    prop_oneof![1 => Just(OmegaValue::Infinite), 5 => finite]
}

pub fn valuation() -> impl Strategy<Value = Valuation> {
    proptest::collection::vec(value(), VARS as usize)
        .prop_map(|xs| xs.into_iter().enumerate().map(|(i, x)| (i as u32 + 1, x)).collect())
}

/// A reducible label reached from the root of `a` by following `choices`.
pub fn descend(a: &Formula, choices: &[u8]) -> Hypersequent {
    let mut g = Hypersequent::root(a);
    for &c in choices {
        let Ok(t) = rwbl_premises(&g) else { break };
        let next = t.premises[usize::from(c) % t.len()].hypersequent();
        if next.is_irreducible() {
            break;
        }
        g = next;
    }
    g
}

pub fn reducible() -> impl Strategy<Value = Hypersequent> {
    (compound(4), proptest::collection::vec(any::<u8>(), 0..5)).prop_map(|(a, path)| descend(&a, &path))
}
