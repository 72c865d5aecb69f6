//! Relational sequents `Γ ◁ Δ`, hypersequents as canonical sets of them,
//! the negated-comparison abbreviations and the substitution operators the
//! rules are written with.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{self, Formula, ParseError};

/// The relation symbol of a sequent.
///
/// Declaration order fixes the canonical order of sequents inside a
/// hypersequent: `≪` first, then `≼_z`, then `≺_z`, each by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelKind {
    Ll,
    PrecEq(i64),
    Prec(i64),
}

impl RelKind {
    pub fn index(self) -> i64 {
        match self {
            RelKind::Ll => 0,
            RelKind::PrecEq(z) | RelKind::Prec(z) => z,
        }
    }

    pub fn with_index(self, z: i64) -> RelKind {
        match self {
            RelKind::Ll => RelKind::Ll,
            RelKind::PrecEq(_) => RelKind::PrecEq(z),
            RelKind::Prec(_) => RelKind::Prec(z),
        }
    }
}

impl fmt::Display for RelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sym, z) = match self {
            RelKind::Ll => return f.write_str("<<"),
            RelKind::PrecEq(z) => ("<=", *z),
            RelKind::Prec(z) => ("<", *z),
        };
        if z == 0 {
            f.write_str(sym)
        } else {
            write!(f, "{sym}_{z}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypersequentError {
    #[error("a `<<` sequent has at most one formula per side")]
    LlArity,
    #[error("`{0}` occurs inside a `<<` sequent")]
    PairInLl(String),
    #[error("`{0}` does not occur in the hypersequent")]
    PivotAbsent(String),
    #[error("hypersequent is irreducible")]
    Irreducible,
    #[error("unknown abbreviation {0:?}")]
    UnknownAbbreviation(String),
    #[error("no relation symbol in {0:?}")]
    MissingRelation(String),
    #[error("bad index in {0:?}")]
    BadIndex(String),
    #[error("formula {text:?}: {source}")]
    Formula { text: String, source: ParseError },
}

/// `Γ ◁ Δ` with both sides kept sorted, so equal multisets compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationalSequent {
    kind: RelKind,
    left: Vec<Formula>,
    right: Vec<Formula>,
}

impl RelationalSequent {
    pub fn new(
        mut left: Vec<Formula>,
        kind: RelKind,
        mut right: Vec<Formula>,
    ) -> Result<RelationalSequent, HypersequentError> {
        if kind == RelKind::Ll && (left.len() > 1 || right.len() > 1) {
            return Err(HypersequentError::LlArity);
        }
        left.sort();
        right.sort();
        Ok(RelationalSequent { kind, left, right })
    }

    /// `a ≪ b`.
    pub fn ll(a: Formula, b: Formula) -> RelationalSequent {
        RelationalSequent { kind: RelKind::Ll, left: vec![a], right: vec![b] }
    }

    /// `Γ ≼_z Δ`.
    pub fn prec_eq(left: Vec<Formula>, right: Vec<Formula>, z: i64) -> RelationalSequent {
        RelationalSequent::new(left, RelKind::PrecEq(z), right).expect("no arity limit")
    }

    /// `Γ ≺_z Δ`.
    pub fn prec(left: Vec<Formula>, right: Vec<Formula>, z: i64) -> RelationalSequent {
        RelationalSequent::new(left, RelKind::Prec(z), right).expect("no arity limit")
    }

    pub fn kind(&self) -> RelKind {
        self.kind
    }

    pub fn left(&self) -> &[Formula] {
        &self.left
    }

    pub fn right(&self) -> &[Formula] {
        &self.right
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(&self.right)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas().any(|g| g == f)
    }

    /// Occurrences of `f` on the left and on the right.
    pub fn occurrences(&self, f: &Formula) -> (usize, usize) {
        let count = |side: &[Formula]| side.iter().filter(|g| *g == f).count();
        (count(&self.left), count(&self.right))
    }

    pub fn is_atomic(&self) -> bool {
        self.formulas().all(Formula::is_atomic)
    }

    /// Copy with every pivot occurrence removed, the given formulas added to
    /// each side and the index shifted.
    fn rebuilt(&self, pivot: &Formula, add_left: &[Formula], add_right: &[Formula], dz: i64) -> RelationalSequent {
        let keep = |side: &[Formula], extra: &[Formula]| {
            side.iter().filter(|g| *g != pivot).chain(extra).cloned().collect::<Vec<_>>()
        };
        let left = keep(&self.left, add_left);
        let right = keep(&self.right, add_right);
        let kind = self.kind.with_index(self.kind.index() + dz);
        RelationalSequent::new(left, kind, right).expect("caller excludes `<<` sequents")
    }

    fn map_sides(&self, f: impl Fn(&Formula) -> Vec<Formula>) -> Result<RelationalSequent, HypersequentError> {
        let map = |side: &[Formula]| side.iter().flat_map(&f).collect::<Vec<_>>();
        RelationalSequent::new(map(&self.left), self.kind, map(&self.right))
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &[Formula]) -> fmt::Result {
    for (i, a) in side.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        if a.is_atomic() {
            write!(f, "{a}")?;
        } else {
            write!(f, "({a})")?;
        }
    }
    Ok(())
}

impl fmt::Display for RelationalSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(f, &self.left)?;
        if !self.left.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "{}", self.kind)?;
        if !self.right.is_empty() {
            f.write_str(" ")?;
        }
        write_side(f, &self.right)
    }
}

/// A finite set of relational sequents, read disjunctively.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypersequent {
    sequents: BTreeSet<Arc<RelationalSequent>>,
}

impl Hypersequent {
    pub fn new() -> Hypersequent {
        Hypersequent::default()
    }

    /// The root label `⊤ ≼ A`.
    pub fn root(a: &Formula) -> Hypersequent {
        Hypersequent::from_iter([RelationalSequent::prec_eq(vec![Formula::top()], vec![a.clone()], 0)])
    }

    pub fn insert(&mut self, s: RelationalSequent) {
        self.sequents.insert(Arc::new(s));
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationalSequent> {
        self.sequents.iter().map(|s| &**s)
    }

    /// Rebuilds every sequent `f` changes and shares the rest.
    pub(crate) fn map_changed(&self, f: impl Fn(&RelationalSequent) -> Option<RelationalSequent>) -> Hypersequent {
        let sequents = self.sequents.iter().map(|s| f(s).map_or_else(|| Arc::clone(s), Arc::new)).collect();
        Hypersequent { sequents }
    }

    /// The sequents `keep` selects, shared.
    pub(crate) fn filtered(&self, keep: impl Fn(&RelationalSequent) -> bool) -> Hypersequent {
        Hypersequent { sequents: self.sequents.iter().filter(|s| keep(s)).cloned().collect() }
    }

    pub fn len(&self) -> usize {
        self.sequents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequents.is_empty()
    }

    pub fn contains(&self, s: &RelationalSequent) -> bool {
        self.sequents.contains(s)
    }

    pub fn union(mut self, mut other: Hypersequent) -> Hypersequent {
        if self.sequents.len() < other.sequents.len() {
            std::mem::swap(&mut self, &mut other);
        }
        self.sequents.extend(other.sequents);
        self
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.iter().flat_map(RelationalSequent::formulas)
    }

    /// Every formula is `⊥`, a variable or `⊤`.
    pub fn is_irreducible(&self) -> bool {
        self.formulas().all(Formula::is_atomic)
    }

    /// The `<_c`-largest formula that can still be decomposed. A proper
    /// subformula is always smaller than its parent, so it suffices to look
    /// at the side formulas themselves.
    pub fn most_complex(&self) -> Result<&Formula, HypersequentError> {
        self.formulas().filter(|f| !f.is_atomic()).max().ok_or(HypersequentError::Irreducible)
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.collect_variables(&mut out);
        }
        out
    }

    /// Distinct subformulas the calculus can still decompose.
    pub fn reducible_subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.collect_compound(&mut out, true);
        }
        out
    }

    /// Connectives plus atom occurrences plus relation symbols. `⊤` counts
    /// as a single atom.
    pub fn weight(&self) -> usize {
        fn size(f: &Formula) -> usize {
            match f {
                _ if f.is_top() => 1,
                Formula::Bottom | Formula::Var(_) => 1,
                Formula::Conj(l, r) | Formula::Impl(l, r) => 1 + size(l) + size(r),
            }
        }
        self.sequents.iter().map(|s| 1 + s.formulas().map(size).sum::<usize>()).sum()
    }
}

impl FromIterator<RelationalSequent> for Hypersequent {
    fn from_iter<T: IntoIterator<Item = RelationalSequent>>(iter: T) -> Self {
        Hypersequent { sequents: iter.into_iter().map(Arc::new).collect() }
    }
}

impl<'a> IntoIterator for &'a Hypersequent {
    type Item = &'a RelationalSequent;
    type IntoIter = std::iter::Map<
        std::collections::btree_set::Iter<'a, Arc<RelationalSequent>>,
        fn(&'a Arc<RelationalSequent>) -> &'a RelationalSequent,
    >;

    fn into_iter(self) -> Self::IntoIter {
        self.sequents.iter().map(|s| &**s)
    }
}

impl fmt::Display for Hypersequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sequents.is_empty() {
            return f.write_str("empty");
        }
        for (i, s) in self.sequents.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parses the rendering produced by `Display`, e.g.
/// `top <= p1 | p1, p2 <_-1 | p1 << top`. Side formulas may be wrapped in
/// parentheses; `empty` is the empty hypersequent.
impl FromStr for Hypersequent {
    type Err = HypersequentError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        if text == "empty" {
            return Ok(Hypersequent::new());
        }
        text.split('|').map(parse_sequent).collect()
    }
}

pub fn parse_hypersequent(text: &str) -> Result<Hypersequent, HypersequentError> {
    text.parse()
}

fn parse_sequent(text: &str) -> Result<RelationalSequent, HypersequentError> {
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    let mut found = None;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'<' if depth == 0 && bytes.get(i + 1) != Some(&b'-') => {
                found = Some(i);
                break;
            }
            _ => {}
        }
    }
    let at = found.ok_or_else(|| HypersequentError::MissingRelation(text.to_string()))?;
    let (mut end, strict_kind): (usize, fn(i64) -> RelKind) = match bytes.get(at + 1) {
        Some(b'<') => (at + 2, |_| RelKind::Ll),
        Some(b'=') => (at + 2, RelKind::PrecEq),
        _ => (at + 1, RelKind::Prec),
    };
    let mut z = 0i64;
    if bytes.get(end) == Some(&b'_') {
        let start = end + 1;
        let mut stop = start;
        while stop < bytes.len() && (bytes[stop] == b'-' || bytes[stop].is_ascii_digit()) {
            stop += 1;
        }
        z = text[start..stop].parse().map_err(|_| HypersequentError::BadIndex(text.to_string()))?;
        end = stop;
    }
    let side = |s: &str| -> Result<Vec<Formula>, HypersequentError> {
        split_top_level(s)
            .into_iter()
            .map(|part| {
                formula::parse(part)
                    .map_err(|source| HypersequentError::Formula { text: part.to_string(), source })
            })
            .collect()
    };
    RelationalSequent::new(side(&text[..at])?, strict_kind(z), side(&text[end..])?)
}

fn split_top_level(s: &str) -> Vec<&str> {
    if s.trim().is_empty() {
        return Vec::new();
    }
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// Named negated comparisons. Each expands to a hypersequent satisfied by
/// exactly the valuations where the described comparison holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Abbreviation {
    /// `v(A) ≤ v(B)`
    Leq,
    /// `⌊v(A)⌋ = ⌊v(B)⌋`
    Sim,
    /// `⌊v(B)⌋ ≤ ⌊v(A)⌋`
    NegLl,
    /// `v(B) < v(A)`
    NegLeq,
    /// floors differ or `v(B) < v(A)`
    NegPrecEq,
    /// floors differ or `v(B) ≤ v(A)`
    NegPrec,
    /// floors differ
    NegSim,
    /// floors differ, either side infinite, or fractional parts sum below 1
    NegPrecEq1Pair,
    /// floors differ, either side infinite, or fractional parts sum to at least 1
    NegPairPrecMinus1,
}

impl FromStr for Abbreviation {
    type Err = HypersequentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "leq" => Abbreviation::Leq,
            "sim" => Abbreviation::Sim,
            "neg_ll" => Abbreviation::NegLl,
            "neg_leq" => Abbreviation::NegLeq,
            "neg_preceq" => Abbreviation::NegPrecEq,
            "neg_prec" => Abbreviation::NegPrec,
            "neg_sim" => Abbreviation::NegSim,
            "neg_preceq1_pair" => Abbreviation::NegPrecEq1Pair,
            "neg_pair_prec_minus1" => Abbreviation::NegPairPrecMinus1,
            other => return Err(HypersequentError::UnknownAbbreviation(other.to_string())),
        })
    }
}

pub fn expand_abbreviation(name: Abbreviation, a: &Formula, b: &Formula) -> Hypersequent {
    let (a, b) = (a.clone(), b.clone());
    let ll = RelationalSequent::ll;
    let pe = |x: &Formula, y: &Formula| RelationalSequent::prec_eq(vec![x.clone()], vec![y.clone()], 0);
    let pr = |x: &Formula, y: &Formula| RelationalSequent::prec(vec![x.clone()], vec![y.clone()], 0);
    let set = |v: Vec<RelationalSequent>| v.into_iter().collect::<Hypersequent>();
    match name {
        Abbreviation::Leq => set(vec![ll(a.clone(), b.clone()), pe(&a, &b)]),
        Abbreviation::Sim => set(vec![pe(&a, &b), pe(&b, &a)]),
        Abbreviation::NegLl => set(vec![pe(&a, &b), pe(&b, &a), ll(b, a)]),
        Abbreviation::NegLeq => set(vec![pr(&b, &a), ll(b, a)]),
        Abbreviation::NegPrecEq => set(vec![ll(a.clone(), b.clone()), pr(&b, &a), ll(b, a)]),
        Abbreviation::NegPrec => set(vec![ll(a.clone(), b.clone()), pe(&b, &a), ll(b, a)]),
        Abbreviation::NegSim => set(vec![ll(a.clone(), b.clone()), ll(b, a)]),
        Abbreviation::NegPrecEq1Pair | Abbreviation::NegPairPrecMinus1 => {
            let top = Formula::top();
            let pair = vec![a.clone(), b.clone()];
            let last = if name == Abbreviation::NegPrecEq1Pair {
                RelationalSequent::prec(pair, vec![], -1)
            } else {
                RelationalSequent::prec_eq(vec![], pair, 1)
            };
            expand_abbreviation(Abbreviation::NegSim, &a, &b)
                .union(expand_abbreviation(Abbreviation::NegLl, &a, &top))
                .union(expand_abbreviation(Abbreviation::NegLl, &b, &top))
                .union(set(vec![last]))
        }
    }
}

/// Replaces every side occurrence of `target` by `replacement`.
pub fn subst_all(g: &Hypersequent, target: &Formula, replacement: &Formula) -> Hypersequent {
    g.map_changed(|s| {
        s.contains(target).then(|| {
            s.map_sides(|f| vec![if f == target { replacement.clone() } else { f.clone() }])
                .expect("arity unchanged")
        })
    })
}

/// Replaces every side occurrence of `target` by both formulas of `pair`.
pub fn subst_pair(
    g: &Hypersequent,
    target: &Formula,
    pair: (&Formula, &Formula),
) -> Result<Hypersequent, HypersequentError> {
    g.iter()
        .map(|s| {
            if s.kind() == RelKind::Ll && s.contains(target) {
                return Err(HypersequentError::PairInLl(target.to_string()));
            }
            s.map_sides(|f| {
                if f == target {
                    vec![pair.0.clone(), pair.1.clone()]
                } else {
                    vec![f.clone()]
                }
            })
        })
        .collect()
}

/// For a pivot `A ⊙ B`: in each sequent with `l` left and `r` right pivot
/// occurrences, drop them, add one `A` and one `B` to each side and add
/// `l − r` to the index. Sequents without the pivot are left alone.
pub fn subst_balanced_conj(g: &Hypersequent, pivot: &Formula) -> Hypersequent {
    balanced_conj(g, pivot, true)
}

/// [`subst_balanced_conj`], optionally without the index shift. The unshifted
/// variant is unsound and exists to check that the rule fuzzer notices.
pub(crate) fn balanced_conj(g: &Hypersequent, pivot: &Formula, shift: bool) -> Hypersequent {
    let Formula::Conj(a, b) = pivot else { panic!("pivot {pivot} is not a conjunction") };
    let both = [(**a).clone(), (**b).clone()];
    g.map_changed(|s| {
        let (l, r) = s.occurrences(pivot);
        let dz = if shift { l as i64 - r as i64 } else { 0 };
        (l + r > 0).then(|| s.rebuilt(pivot, &both, &both, dz))
    })
}

/// For a pivot `A → B`: in each sequent with `l` left and `r` right pivot
/// occurrences, drop them, add `r` copies of `A` and `l` of `B` to the left
/// and `l` copies of `A` and `r` of `B` to the right.
pub fn subst_impl(g: &Hypersequent, pivot: &Formula) -> Hypersequent {
    let Formula::Impl(a, b) = pivot else { panic!("pivot {pivot} is not an implication") };
    let copies = |n: usize, m: usize| {
        std::iter::repeat_n((**a).clone(), n)
            .chain(std::iter::repeat_n((**b).clone(), m))
            .collect::<Vec<_>>()
    };
    g.map_changed(|s| {
        let (l, r) = s.occurrences(pivot);
        (l + r > 0).then(|| s.rebuilt(pivot, &copies(r, l), &copies(l, r), 0))
    })
}

/// The parts of a hypersequent a rewriting rule treats differently.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    /// Sequents without the pivot.
    pub rest: Hypersequent,
    /// `≪` sequents containing the pivot.
    pub ll: Hypersequent,
    /// `≼_z`/`≺_z` sequents containing the pivot.
    pub prec: Hypersequent,
    /// Those of `prec` that are `≼_0` with at most one formula per side.
    pub simple: Hypersequent,
}

pub fn decompose(g: &Hypersequent, pivot: &Formula) -> Result<Decomposition, HypersequentError> {
    let d = Decomposition {
        rest: g.filtered(|s| !s.contains(pivot)),
        ll: g.filtered(|s| s.kind() == RelKind::Ll && s.contains(pivot)),
        prec: g.filtered(|s| s.kind() != RelKind::Ll && s.contains(pivot)),
        simple: g.filtered(|s| {
            s.kind() == RelKind::PrecEq(0) && s.left().len() <= 1 && s.right().len() <= 1 && s.contains(pivot)
        }),
    };
    if d.ll.is_empty() && d.prec.is_empty() {
        return Err(HypersequentError::PivotAbsent(pivot.to_string()));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn h(s: &str) -> Hypersequent {
        s.parse().unwrap()
    }

    #[test]
    fn abbreviations_expand_as_listed() {
        let (a, b) = (f("p1"), f("p2"));
        assert_eq!(expand_abbreviation(Abbreviation::NegLl, &a, &b), h("p1 <= p2 | p2 <= p1 | p2 << p1"));
        assert_eq!(expand_abbreviation(Abbreviation::NegLeq, &a, &b), h("p2 < p1 | p2 << p1"));
        assert_eq!(
            expand_abbreviation(Abbreviation::NegPrecEq1Pair, &a, &b),
            h("p1 << p2 | p2 << p1 | p1 <= top | top <= p1 | top << p1 \
               | p2 <= top | top <= p2 | top << p2 | p1, p2 <_-1")
        );
        assert_eq!(
            expand_abbreviation(Abbreviation::NegPairPrecMinus1, &a, &b),
            h("p1 << p2 | p2 << p1 | p1 <= top | top <= p1 | top << p1 \
               | p2 <= top | top <= p2 | top << p2 | <=_1 p1, p2")
        );
        assert!("neg_foo".parse::<Abbreviation>().is_err());
        assert_eq!("neg_sim".parse::<Abbreviation>().unwrap(), Abbreviation::NegSim);
    }

    #[test]
    fn substitution_examples() {
        let g = h("(p1 * p2) << p3");
        assert_eq!(subst_all(&g, &f("p1 * p2"), &f("p1")), h("p1 << p3"));
        assert_eq!(subst_all(&g, &f("p3"), &f("p3")), g);

        let g = h("p3, (p1 * p2) <= p4");
        assert_eq!(subst_pair(&g, &f("p1 * p2"), (&f("p1"), &f("p2"))).unwrap(), h("p3, p1, p2 <= p4"));
        let g = h("(p1 * p2), (p1 * p2) <=_2");
        assert_eq!(subst_pair(&g, &f("p1 * p2"), (&f("p1"), &f("p2"))).unwrap(), h("p1, p2, p1, p2 <=_2"));
        assert!(subst_pair(&h("(p1 * p2) << p3"), &f("p1 * p2"), (&f("p1"), &f("p2"))).is_err());
    }

    #[test]
    fn balanced_conjunction_shifts_index() {
        let pivot = f("p1 * p2");
        let g = h("(p1 * p2), (p1 * p2) <=_3 (p1 * p2)");
        assert_eq!(subst_balanced_conj(&g, &pivot), h("p1, p2 <=_4 p1, p2"));
        let g = h("(p1 * p2) <= p3");
        assert_eq!(subst_balanced_conj(&g, &pivot), h("p1, p2 <=_1 p1, p2, p3"));
        let g = h("p3 < (p1 * p2)");
        assert_eq!(subst_balanced_conj(&g, &pivot), h("p3, p1, p2 <_-1 p1, p2"));
        assert_eq!(balanced_conj(&g, &pivot, false), h("p3, p1, p2 < p1, p2"));
    }

    #[test]
    fn implication_substitution() {
        let pivot = f("p1 -> p2");
        assert_eq!(subst_impl(&h("p4 < (p1 -> p2), p5"), &pivot), h("p4, p1 < p2, p5"));
        assert_eq!(subst_impl(&h("p3, (p1 -> p2) <= p4"), &pivot), h("p3, p2 <= p1, p4"));
        assert_eq!(subst_impl(&h("(p1 -> p2) <= (p1 -> p2)"), &pivot), h("p1, p2 <= p1, p2"));
    }

    #[test]
    fn decomposition_parts() {
        let pivot = f("p1 -> p2");
        let d = decompose(&h("top <= (p1 -> p2)"), &pivot).unwrap();
        assert!(d.rest.is_empty() && d.ll.is_empty());
        assert_eq!(d.prec, h("top <= (p1 -> p2)"));
        assert_eq!(d.simple, d.prec);

        let pivot = f("p1 * p2");
        let d = decompose(&h("(p1 * p2) << p3 | p4 <= p5"), &pivot).unwrap();
        assert_eq!(d.rest, h("p4 <= p5"));
        assert_eq!(d.ll, h("(p1 * p2) << p3"));
        assert!(d.prec.is_empty() && d.simple.is_empty());

        let d = decompose(&h("(p1 * p2), p3 <= p4"), &pivot).unwrap();
        assert_eq!(d.prec.len(), 1);
        assert!(d.simple.is_empty());
        assert!(decompose(&h("p4 <= p5"), &pivot).is_err());
    }

    #[test]
    fn reducibility() {
        assert!(h("p1 << p2").is_irreducible());
        assert!(h("top <= p1 | 0 << top").is_irreducible());
        assert_eq!(h("top <= (p1 -> p1)").most_complex().unwrap(), &f("p1 -> p1"));
        assert_eq!(h("(p1 * p2) << (p1 -> p1 * p2)").most_complex().unwrap(), &f("p1 -> p1 * p2"));
        assert_eq!(h("p1 << p2").most_complex(), Err(HypersequentError::Irreducible));
    }

    #[test]
    fn rendering_and_order() {
        let g = h("p2 <_1 p1 | top <= p1 | p1 << p2");
        assert_eq!(g.to_string(), "p1 << p2 | top <= p1 | p2 <_1 p1");
        assert_eq!(h(&g.to_string()), g);
        let g = h("(p1 -> p2), p3 <=_-2");
        assert_eq!(g.to_string(), "p3, (p1 -> p2) <=_-2");
        assert_eq!(h("empty"), Hypersequent::new());
        assert!(RelationalSequent::new(vec![f("p1"), f("p2")], RelKind::Ll, vec![]).is_err());
    }

    #[test]
    fn set_semantics_and_weight() {
        let mut g = Hypersequent::root(&f("p1"));
        g.insert(RelationalSequent::prec_eq(vec![Formula::top()], vec![f("p1")], 0));
        assert_eq!(g.len(), 1);
        assert_eq!(g.weight(), 3);
        assert_eq!(Hypersequent::root(&f("p1 -> p1")).weight(), 5);
    }
}
