//! Deciding whether an irreducible hypersequent is valid.
//!
//! The negation of each sequent is a condition on integer parts (which
//! terms share a level, which lie below which) plus a linear condition on
//! fractional parts inside a shared level. Integer parts come from a graph
//! of forced `≤` relations between levels. Its strongly connected
//! components are the levels that must coincide, and a topological order of
//! the components assigns the levels. Fractional parts come from a linear
//! program over the components. The hypersequent is valid exactly when that
//! program is infeasible.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use num_rational::BigRational;
use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;
use thiserror::Error;

use crate::formula::Formula;
use crate::hypersequent::{Hypersequent, RelKind, RelationalSequent};
use crate::linfeas::{solve, Feasibility, LinConstraint};
use crate::semantics::{satisfies, OmegaValue, Valuation};

/// An atom of an irreducible hypersequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Bottom,
    Var(u32),
    Top,
}

impl Term {
    pub fn of(f: &Formula) -> Option<Term> {
        match f {
            Formula::Bottom => Some(Term::Bottom),
            Formula::Var(i) => Some(Term::Var(*i)),
            _ if f.is_top() => Some(Term::Top),
            _ => None,
        }
    }

    /// Column in the linear program; `⊥` uses column 0.
    fn column(self) -> Option<u32> {
        match self {
            Term::Bottom => Some(0),
            Term::Var(i) => Some(i),
            Term::Top => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Bottom => f.write_str("0"),
            Term::Var(i) => write!(f, "p{i}"),
            Term::Top => f.write_str("top"),
        }
    }
}

/// The negation of one leaf sequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NegatedSequent {
    /// not `q ≪ r`: `⌊r⌋ ≤ ⌊q⌋`
    NegLl(Term, Term),
    /// not `q ≺ r`
    NegPrec(Term, Term),
    /// not `q ≼ r`
    NegPrecEq(Term, Term),
    /// not `Γ ≺_z Δ`
    NegMultiPrec(Vec<Term>, Vec<Term>, i64),
    /// not `Γ ≼_z Δ`
    NegMultiPrecEq(Vec<Term>, Vec<Term>, i64),
    /// A multi-formula sequent mentioning `⊤` is never satisfied, so its
    /// negation always holds.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("`{0}` is not a leaf sequent")]
    Malformed(String),
    #[error("countermodel {valuation} satisfies the leaf {leaf}")]
    BadCountermodel { valuation: String, leaf: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomVerdict {
    Axiom,
    NotAxiom(Valuation),
}

impl AxiomVerdict {
    pub fn is_axiom(&self) -> bool {
        matches!(self, AxiomVerdict::Axiom)
    }
}

fn terms(side: &[Formula], s: &RelationalSequent) -> Result<Vec<Term>, AxiomError> {
    side.iter().map(|f| Term::of(f).ok_or_else(|| AxiomError::Malformed(s.to_string()))).collect()
}

pub fn negate_leaf(h: &Hypersequent) -> Result<Vec<NegatedSequent>, AxiomError> {
    h.iter()
        .map(|s| {
            let left = terms(s.left(), s)?;
            let right = terms(s.right(), s)?;
            let malformed = || AxiomError::Malformed(s.to_string());
            Ok(match s.kind() {
                RelKind::Ll => match (left.as_slice(), right.as_slice()) {
                    ([q], [r]) => NegatedSequent::NegLl(*q, *r),
                    _ => return Err(malformed()),
                },
                RelKind::Prec(0) | RelKind::PrecEq(0) if left.len() + right.len() == 2 => {
                    let ([q], [r]) = (left.as_slice(), right.as_slice()) else { return Err(malformed()) };
                    if s.kind() == RelKind::Prec(0) {
                        NegatedSequent::NegPrec(*q, *r)
                    } else {
                        NegatedSequent::NegPrecEq(*q, *r)
                    }
                }
                kind => {
                    if left.len() + right.len() < 2 {
                        return Err(malformed());
                    }
                    if left.iter().chain(&right).any(|t| *t == Term::Top) {
                        NegatedSequent::Trivial
                    } else if let RelKind::Prec(z) = kind {
                        NegatedSequent::NegMultiPrec(left, right, z)
                    } else {
                        NegatedSequent::NegMultiPrecEq(left, right, kind.index())
                    }
                }
            })
        })
        .collect()
}

/// Vertices are terms; an edge `(r, q)` says `⌊r⌋ ≤ ⌊q⌋` is forced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterGraph {
    pub vertices: BTreeSet<Term>,
    pub edges: BTreeSet<(Term, Term)>,
}

/// One vertex per given term plus `⊤`, and an edge `(r, q)` for every
/// negated `q ≪ r`.
pub fn build_graph(negs: &[NegatedSequent], vertices: &BTreeSet<Term>) -> ClusterGraph {
    let mut vertices = vertices.clone();
    vertices.insert(Term::Top);
    let mut edges = BTreeSet::new();
    for n in negs {
        if let NegatedSequent::NegLl(q, r) = n {
            vertices.insert(*q);
            vertices.insert(*r);
            edges.insert((*r, *q));
        }
    }
    ClusterGraph { vertices, edges }
}

impl ClusterGraph {
    /// Adds the order facts that hold under every valuation: `⊥` is at the
    /// lowest level and `⊤` at the highest.
    pub fn with_extremes(mut self) -> ClusterGraph {
        for &t in &self.vertices {
            if t != Term::Top {
                self.edges.insert((t, Term::Top));
            }
            if self.vertices.contains(&Term::Bottom) && t != Term::Bottom {
                self.edges.insert((Term::Bottom, t));
            }
        }
        self
    }
}

/// Strongly connected components in topological order, with the edges
/// between distinct components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<BTreeSet<Term>>,
    pub edges: BTreeSet<(usize, usize)>,
    index: BTreeMap<Term, usize>,
}

impl Clustering {
    pub fn cluster_of(&self, t: Term) -> usize {
        self.index[&t]
    }

    pub fn top_cluster(&self) -> usize {
        self.index[&Term::Top]
    }
}

/// Condenses cycles and orders the components so that every edge runs
/// forward. Incomparable components are ordered by their smallest term.
pub fn contract_and_sort(g: &ClusterGraph) -> Clustering {
    let mut graph = DiGraphMap::<Term, ()>::new();
    for &v in &g.vertices {
        graph.add_node(v);
    }
    for &(a, b) in &g.edges {
        graph.add_edge(a, b, ());
    }
    let components: Vec<BTreeSet<Term>> =
        tarjan_scc(&graph).into_iter().map(|c| c.into_iter().collect()).collect();
    let mut comp_of = BTreeMap::new();
    for (i, c) in components.iter().enumerate() {
        for &t in c {
            comp_of.insert(t, i);
        }
    }
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); components.len()];
    let mut indegree = vec![0usize; components.len()];
    for &(a, b) in &g.edges {
        let (x, y) = (comp_of[&a], comp_of[&b]);
        if x != y && succ[x].insert(y) {
            indegree[y] += 1;
        }
    }
    let least = |i: usize| *components[i].iter().next().expect("non-empty component");
    let mut ready: BinaryHeap<Reverse<(Term, usize)>> = (0..components.len())
        .filter(|&i| indegree[i] == 0)
        .map(|i| Reverse((least(i), i)))
        .collect();
    let mut order = Vec::with_capacity(components.len());
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(i);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(Reverse((least(j), j)));
            }
        }
    }
    let mut position = vec![0; components.len()];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }
    let clusters = order.iter().map(|&i| components[i].clone()).collect();
    let edges = succ
        .iter()
        .enumerate()
        .flat_map(|(i, js)| js.iter().map(move |&j| (i, j)))
        .map(|(i, j)| (position[i], position[j]))
        .collect();
    let index = comp_of.into_iter().map(|(t, i)| (t, position[i])).collect();
    Clustering { clusters, edges, index }
}

/// The fractional-part constraints, without the `[0, 1)` bounds. `None`
/// means a constraint is unsatisfiable on its face.
pub fn build_lp(negs: &[NegatedSequent], c: &Clustering) -> Option<Vec<LinConstraint>> {
    let top = c.top_cluster();
    let mut rows = Vec::new();
    for n in negs {
        match n {
            NegatedSequent::NegLl(..) | NegatedSequent::Trivial => {}
            NegatedSequent::NegPrec(q, r) | NegatedSequent::NegPrecEq(q, r) => {
                let strict = matches!(n, NegatedSequent::NegPrecEq(..));
                let cluster = c.cluster_of(*q);
                if cluster != c.cluster_of(*r) {
                    continue;
                }
                if cluster == top {
                    // Both sides are +∞: `v(r) ≤ v(q)` holds, `v(r) < v(q)` cannot.
                    if strict {
                        return None;
                    }
                    continue;
                }
                let (Some(xq), Some(xr)) = (q.column(), r.column()) else {
                    unreachable!("only ⊤ lacks a column and it lives in the top cluster")
                };
                rows.push(LinConstraint::le_var(xr, xq, strict));
            }
            NegatedSequent::NegMultiPrec(left, right, z) | NegatedSequent::NegMultiPrecEq(left, right, z) => {
                let strict = matches!(n, NegatedSequent::NegMultiPrecEq(..));
                let cluster = c.cluster_of(left.iter().chain(right).next().copied().expect("two terms"));
                let shared = left.iter().chain(right).all(|t| c.cluster_of(*t) == cluster);
                if !shared || cluster == top || !c.edges.contains(&(cluster, top)) {
                    continue;
                }
                // −Σ x(left) + Σ x(right) ◁ |right| − |left| − z
                let coeffs = left
                    .iter()
                    .map(|t| (t.column().expect("finite term"), -1))
                    .chain(right.iter().map(|t| (t.column().expect("finite term"), 1)));
                let bound = right.len() as i64 - left.len() as i64 - z;
                rows.push(LinConstraint::new(coeffs, bound, strict));
            }
        }
    }
    Some(rows)
}

/// Level `j` plus the witness for variables in the `j`-th cluster, `+∞`
/// for variables sharing a cluster with `⊤`.
pub fn build_countermodel(
    vars: &BTreeSet<u32>,
    c: &Clustering,
    witness: &BTreeMap<u32, BigRational>,
) -> Valuation {
    let top = c.top_cluster();
    vars.iter()
        .map(|&i| {
            let j = c.cluster_of(Term::Var(i));
            let value = if j == top {
                OmegaValue::Infinite
            } else {
                OmegaValue::finite(j as u64, witness[&i].clone())
            };
            (i, value)
        })
        .collect()
}

/// Every intermediate artifact of one run, for reporting.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub negations: Vec<NegatedSequent>,
    pub clustering: Clustering,
    pub constraints: Option<Vec<LinConstraint>>,
    pub verdict: AxiomVerdict,
}

pub fn analyze(h: &Hypersequent) -> Result<Analysis, AxiomError> {
    let negations = negate_leaf(h)?;
    let vars = h.variables();
    let mut vertices: BTreeSet<Term> = vars.iter().map(|&i| Term::Var(i)).collect();
    let has_bottom = h.formulas().any(|f| *f == Formula::Bottom);
    if has_bottom {
        vertices.insert(Term::Bottom);
    }
    let clustering = contract_and_sort(&build_graph(&negations, &vertices).with_extremes());
    let bottom_at_top = has_bottom && clustering.cluster_of(Term::Bottom) == clustering.top_cluster();
    let mut constraints = if bottom_at_top { None } else { build_lp(&negations, &clustering) };
    if has_bottom {
        if let Some(rows) = constraints.as_mut() {
            rows.push(LinConstraint::new([(0, 1)], 0, false));
        }
    }
    let verdict = match &constraints {
        None => AxiomVerdict::Axiom,
        Some(rows) => {
            let mut columns = vars.clone();
            if has_bottom {
                columns.insert(0);
            }
            match solve(rows, &columns) {
                Feasibility::Infeasible => AxiomVerdict::Axiom,
                Feasibility::Feasible(w) => {
                    let v = build_countermodel(&vars, &clustering, &w);
                    if satisfies(&v, h).map_err(|_| AxiomError::Malformed(h.to_string()))? {
                        return Err(AxiomError::BadCountermodel { valuation: v.to_string(), leaf: h.to_string() });
                    }
                    AxiomVerdict::NotAxiom(v)
                }
            }
        }
    };
    Ok(Analysis { negations, clustering, constraints, verdict })
}

/// Decides validity of an irreducible hypersequent. A countermodel is
/// re-checked against the leaf before it is returned.
pub fn check_axiom(h: &Hypersequent) -> Result<AxiomVerdict, AxiomError> {
    analyze(h).map(|a| a.verdict)
}

/// True when `v` falsifies every label on the branch and gives `a` a
/// finite value.
pub fn verify_branch_countermodel(v: &Valuation, branch: &[Hypersequent], a: &Formula) -> bool {
    let finite = matches!(crate::semantics::eval(v, a), Ok(x) if !x.is_infinite());
    finite && branch.iter().all(|g| matches!(satisfies(v, g), Ok(false)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::ratio;

    fn h(s: &str) -> Hypersequent {
        s.parse().unwrap()
    }

    /// A leaf whose fractional constraints clash: `x1 < 0` against `0 <= x1`.
    fn worked_leaf() -> Hypersequent {
        h("p1 << p2 | p2 << p1 | p1 <= top | top <= p1 | top << p1 | p2 <= top | top <= p2 \
           | top << p2 | <=_1 p1, p2 | p1 << p1 | p1, p1, p2 <_-1 p1, p2 \
           | p1, p1, p2 <=_-1 p1, p2 | p1, p2 <_1 p1, p1, p2 | p1, p2 <=_1 p1, p1, p2")
    }

    #[test]
    fn negation_forms() {
        assert_eq!(negate_leaf(&h("p1 << p2")).unwrap(), vec![NegatedSequent::NegLl(Term::Var(1), Term::Var(2))]);
        assert_eq!(negate_leaf(&h("top <= p1")).unwrap(), vec![NegatedSequent::NegPrecEq(Term::Top, Term::Var(1))]);
        let (p1, p2) = (Term::Var(1), Term::Var(2));
        assert_eq!(
            negate_leaf(&h("p1, p1, p2 <_-1 p1, p2")).unwrap(),
            vec![NegatedSequent::NegMultiPrec(vec![p1, p1, p2], vec![p1, p2], -1)]
        );
        assert_eq!(negate_leaf(&h("top, p1 <=_1 p2")).unwrap(), vec![NegatedSequent::Trivial]);
        assert!(negate_leaf(&h("(p1 -> p2) << p3")).is_err());
        assert!(negate_leaf(&h("p1, p2 <=")).is_err());
    }

    #[test]
    fn worked_leaf_graph_and_clusters() {
        let leaf = worked_leaf();
        let negs = negate_leaf(&leaf).unwrap();
        let vertices = [Term::Var(1), Term::Var(2)].into_iter().collect();
        let g = build_graph(&negs, &vertices);
        let (p1, p2, top) = (Term::Var(1), Term::Var(2), Term::Top);
        let expected: BTreeSet<_> = [(p1, p1), (p1, p2), (p2, p1), (p1, top), (p2, top)].into_iter().collect();
        assert_eq!(g.edges, expected);
        let c = contract_and_sort(&g);
        assert_eq!(c.clusters, vec![[p1, p2].into_iter().collect(), [top].into_iter().collect()]);
        assert_eq!(c.edges, [(0, 1)].into_iter().collect());
        assert_eq!(contract_and_sort(&g.with_extremes()).clusters, c.clusters);
    }

    #[test]
    fn worked_leaf_program() {
        let leaf = worked_leaf();
        let a = analyze(&leaf).unwrap();
        assert!(a.verdict.is_axiom());
        let rows = a.constraints.unwrap();
        let strict: BTreeSet<String> = rows.iter().filter(|r| r.strict).map(|r| r.to_string()).collect();
        let loose: BTreeSet<String> = rows.iter().filter(|r| !r.strict).map(|r| r.to_string()).collect();
        let want_strict: BTreeSet<String> =
            ["x1 + x2 < 1", "x1 < 0", "-x1 < 0"].iter().map(|s| s.to_string()).collect();
        let want_loose: BTreeSet<String> = ["x1 <= 0", "-x1 <= 0"].iter().map(|s| s.to_string()).collect();
        assert_eq!(strict, want_strict);
        assert_eq!(loose, want_loose);
    }

    #[test]
    fn small_verdicts() {
        assert!(check_axiom(&h("p1 <= p1")).unwrap().is_axiom());
        assert!(check_axiom(&h("p1 < p1")).unwrap() != AxiomVerdict::Axiom);
        let AxiomVerdict::NotAxiom(v) = check_axiom(&h("p1 << p2")).unwrap() else { panic!() };
        assert!(v.get(2).unwrap().floor() <= v.get(1).unwrap().floor() || v.get(1).unwrap().is_infinite());
        assert!(check_axiom(&h("top <= top")).unwrap().is_axiom());
        assert!(check_axiom(&h("0 << p1 | 0 <= p1")).unwrap().is_axiom());
        assert!(!check_axiom(&h("0 << p1 | p1 <= 0")).unwrap().is_axiom());
        assert!(!check_axiom(&h("top <= p1")).unwrap().is_axiom());
    }

    #[test]
    fn top_cluster_pairs() {
        // p1 forced to +∞ by `p1 << top` failing; then `top <= p1` holds.
        assert!(check_axiom(&h("p1 << top | top <= p1")).unwrap().is_axiom());
        assert!(!check_axiom(&h("p1 << top | top < p1")).unwrap().is_axiom());
    }

    #[test]
    fn bottom_is_lowest() {
        assert!(!check_axiom(&h("0 <= p1")).unwrap().is_axiom());
        assert!(check_axiom(&h("0 < p1 | p1 <= 0 | 0 << p1")).unwrap().is_axiom());
        assert!(check_axiom(&h("top << 0 | 0 << top")).unwrap().is_axiom());
        assert!(!check_axiom(&h("p1 <= 0")).unwrap().is_axiom());
    }

    #[test]
    fn countermodel_levels() {
        let (p1, p2, top) = (Term::Var(1), Term::Var(2), Term::Top);
        let mut g = build_graph(&[], &[p1, p2].into_iter().collect());
        g.edges.insert((p2, p1));
        g.edges.insert((p1, top));
        let c = contract_and_sort(&g);
        let w = [(1, ratio(0, 1)), (2, ratio(0, 1))].into_iter().collect();
        let v = build_countermodel(&[1, 2].into_iter().collect(), &c, &w);
        assert_eq!(v.get(1), Some(&OmegaValue::from_parts(1, 0, 1)));
        assert_eq!(v.get(2), Some(&OmegaValue::from_parts(0, 0, 1)));

        let mut g = build_graph(&[], &[p1].into_iter().collect());
        g.edges.insert((p1, top));
        g.edges.insert((top, p1));
        let c = contract_and_sort(&g);
        let v = build_countermodel(&[1].into_iter().collect(), &c, &BTreeMap::new());
        assert_eq!(v.get(1), Some(&OmegaValue::Infinite));
    }

    #[test]
    fn edgeless_graph_orders_by_least_term() {
        let g = build_graph(&[], &[Term::Var(2), Term::Var(1)].into_iter().collect());
        assert!(g.edges.is_empty());
        let c = contract_and_sort(&g);
        let flat: Vec<Term> = c.clusters.iter().map(|s| *s.iter().next().unwrap()).collect();
        assert_eq!(flat, vec![Term::Var(1), Term::Var(2), Term::Top]);
    }

    #[test]
    fn branch_countermodel_check() {
        let a = Formula::Var(1);
        let branch = [Hypersequent::root(&a)];
        let v = Valuation::new().with(1, OmegaValue::from_parts(0, 1, 2));
        assert!(verify_branch_countermodel(&v, &branch, &a));
        let v = Valuation::new().with(1, OmegaValue::Infinite);
        assert!(!verify_branch_countermodel(&v, &branch, &a));
    }
}
