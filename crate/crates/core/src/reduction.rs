//! Reduction trees: the root `⊤ ≼ A` is expanded by the rules until every
//! label is irreducible.
//!
//! Trees can have up to `5^n` leaves, so besides the materialized
//! [`ReductionTree`] there is a depth-first [`walk`] that never holds more
//! than one branch, and [`follow_certificate`] which builds a single branch.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::ControlFlow;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::{default_occurrence, rhbl_premises, rwbl_premises, CalculusError, PremiseTag, PremiseTuple};
use crate::formula::Formula;
use crate::hypersequent::{Hypersequent, RelKind, RelationalSequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Rewriting rules: every occurrence of the pivot at once.
    #[default]
    Rwbl,
    /// Logical rules: one occurrence at a time.
    Rhbl,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("branch deeper than {0}")]
    DepthLimit(usize),
    #[error("sequent without a satisfaction clause produced: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Premises of `g`, or `None` at a leaf.
pub fn expand(g: &Hypersequent, mode: Mode) -> Result<Option<PremiseTuple>, ReductionError> {
    if g.is_irreducible() {
        return Ok(None);
    }
    let tuple = match mode {
        Mode::Rwbl => rwbl_premises(g)?,
        Mode::Rhbl => {
            let occ = default_occurrence(g).ok_or(CalculusError::Irreducible)?;
            rhbl_premises(g, &occ)?
        }
    };
    for p in &tuple.premises {
        check_shapes(&p.consequent)?;
    }
    Ok(Some(tuple))
}

/// Every sequent must fall under one of the satisfaction clauses.
fn check_shapes(g: &Hypersequent) -> Result<(), ReductionError> {
    for s in g.iter() {
        let (n, m) = (s.left().len(), s.right().len());
        let ok = match s.kind() {
            RelKind::Ll => n == 1 && m == 1,
            RelKind::PrecEq(z) | RelKind::Prec(z) => {
                if n + m == 2 && z == 0 {
                    n == 1 && m == 1
                } else {
                    n + m >= 2
                }
            }
        };
        if !ok {
            return Err(ReductionError::Degenerate(s.to_string()));
        }
    }
    Ok(())
}

/// A node as seen by [`walk`].
#[derive(Debug)]
pub struct Visit<'a> {
    pub label: &'a Hypersequent,
    pub tag: Option<PremiseTag>,
    pub depth: usize,
    /// 1-based premise indices from the start node.
    pub path: &'a [u8],
    /// Sum of label weights from the start node down to this one.
    pub branch_weight: usize,
    pub is_leaf: bool,
}

/// Depth-first traversal in premise order. The visitor can stop the walk
/// by returning `Break`, and the walk then returns `Break` too.
pub fn walk<F>(
    start: &Hypersequent,
    mode: Mode,
    depth_limit: Option<usize>,
    visit: &mut F,
) -> Result<ControlFlow<()>, ReductionError>
where
    F: FnMut(&Visit) -> ControlFlow<()>,
{
    let mut path = Vec::new();
    walk_from(start, None, 0, 0, &mut path, mode, depth_limit, visit)
}

#[allow(clippy::too_many_arguments)]
fn walk_from<F>(
    label: &Hypersequent,
    tag: Option<PremiseTag>,
    depth: usize,
    weight_above: usize,
    path: &mut Vec<u8>,
    mode: Mode,
    depth_limit: Option<usize>,
    visit: &mut F,
) -> Result<ControlFlow<()>, ReductionError>
where
    F: FnMut(&Visit) -> ControlFlow<()>,
{
    if depth_limit.is_some_and(|d| depth > d) {
        return Err(ReductionError::DepthLimit(depth_limit.unwrap_or_default()));
    }
    let premises = expand(label, mode)?;
    let branch_weight = weight_above + label.weight();
    let v = Visit { label, tag, depth, path, branch_weight, is_leaf: premises.is_none() };
    if visit(&v).is_break() {
        return Ok(ControlFlow::Break(()));
    }
    if let Some(tuple) = premises {
        for p in tuple.premises {
            path.push(p.tag.index);
            let tag = p.tag;
            let flow = walk_from(
                &p.into_hypersequent(),
                Some(tag),
                depth + 1,
                branch_weight,
                path,
                mode,
                depth_limit,
                visit,
            )?;
            path.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: Hypersequent,
    pub tag: Option<PremiseTag>,
    pub depth: usize,
    pub children: Vec<usize>,
}

/// A fully built tree; `nodes[0]` is the root and children are listed in
/// premise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTree {
    pub formula: Formula,
    pub nodes: Vec<TreeNode>,
}

pub fn build_tree(a: &Formula, mode: Mode, depth_limit: Option<usize>) -> Result<ReductionTree, ReductionError> {
    let mut nodes: Vec<TreeNode> = Vec::new();
    // Parent of each node, by depth, while the walk is inside it.
    let mut open: Vec<usize> = Vec::new();
    let _ = walk(&Hypersequent::root(a), mode, depth_limit, &mut |v: &Visit| {
        let id = nodes.len();
        open.truncate(v.depth);
        if let Some(&parent) = open.last() {
            nodes[parent].children.push(id);
        }
        nodes.push(TreeNode { label: v.label.clone(), tag: v.tag, depth: v.depth, children: Vec::new() });
        open.push(id);
        ControlFlow::Continue(())
    })?;
    Ok(ReductionTree { formula: a.clone(), nodes })
}

pub fn build_rwbl_tree(a: &Formula, depth_limit: Option<usize>) -> Result<ReductionTree, ReductionError> {
    build_tree(a, Mode::Rwbl, depth_limit)
}

pub fn build_rhbl_tree(a: &Formula, depth_limit: usize) -> Result<ReductionTree, ReductionError> {
    build_tree(a, Mode::Rhbl, Some(depth_limit))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub height: usize,
    pub node_count: usize,
    pub leaf_count: usize,
    pub max_branch_weight: usize,
    /// Distinct decomposable subformulas at the root, a sharper height
    /// bound than the connective count.
    pub root_reducible: usize,
}

impl TreeStats {
    pub fn record(&mut self, v: &Visit) {
        self.node_count += 1;
        self.height = self.height.max(v.depth);
        if v.is_leaf {
            self.leaf_count += 1;
            self.max_branch_weight = self.max_branch_weight.max(v.branch_weight);
        }
    }

    pub fn merge(&mut self, other: &TreeStats) {
        self.node_count += other.node_count;
        self.leaf_count += other.leaf_count;
        self.height = self.height.max(other.height);
        self.max_branch_weight = self.max_branch_weight.max(other.max_branch_weight);
    }
}

/// Metrics of the whole tree of `a`, computed without materializing it.
pub fn tree_stats(a: &Formula, mode: Mode, depth_limit: Option<usize>) -> Result<TreeStats, ReductionError> {
    let root = Hypersequent::root(a);
    let mut stats = TreeStats { root_reducible: root.reducible_subformulas().len(), ..TreeStats::default() };
    let _ = walk(&root, mode, depth_limit, &mut |v: &Visit| {
        stats.record(v);
        ControlFlow::Continue(())
    })?;
    Ok(stats)
}

impl ReductionTree {
    pub fn stats(&self) -> TreeStats {
        let mut stats = TreeStats {
            node_count: self.nodes.len(),
            root_reducible: self.nodes[0].label.reducible_subformulas().len(),
            ..TreeStats::default()
        };
        let mut weight = vec![0; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            weight[id] += node.label.weight();
            for &c in &node.children {
                weight[c] = weight[id];
            }
            stats.height = stats.height.max(node.depth);
            if node.children.is_empty() {
                stats.leaf_count += 1;
                stats.max_branch_weight = stats.max_branch_weight.max(weight[id]);
            }
        }
        stats
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.children.is_empty())
    }

    /// One line per node: `nK [depth=D tag="T" label="L"]; nK -> {nI nJ};`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph reduction {\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let tag = n.tag.map(|t| t.to_string()).unwrap_or_else(|| "root".to_string());
            let _ = write!(out, "  n{id} [depth={} tag=\"{tag}\" label=\"{}\"];", n.depth, n.label);
            if !n.children.is_empty() {
                let kids: Vec<String> = n.children.iter().map(|c| format!("n{c}")).collect();
                let _ = write!(out, " n{id} -> {{{}}};", kids.join(" "));
            }
            out.push('\n');
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| {
                serde_json::json!({
                    "id": id,
                    "depth": n.depth,
                    "tag": n.tag.map(|t| t.to_string()),
                    "label": n.label.to_string(),
                    "children": n.children,
                })
            })
            .collect();
        serde_json::json!({ "formula": self.formula.to_string(), "nodes": nodes })
    }
}

/// Premise choices along one branch, zero-padded to the complexity of the
/// formula. `0` means the branch has already ended.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub moves: Vec<u8>,
}

impl Certificate {
    /// Pads a root-to-leaf path to length `len`.
    pub fn from_path(path: &[u8], len: usize) -> Certificate {
        let mut moves = path.to_vec();
        moves.resize(len.max(path.len()), 0);
        Certificate { moves }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("certificate has {found} moves, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("move {index} at depth {depth} is out of range 1..={arity}")]
    OutOfRange { depth: usize, index: u8, arity: usize },
    #[error("move 0 at depth {depth} but the node is reducible")]
    StopAtReducible { depth: usize },
    #[error("move {index} at depth {depth} continues past a leaf")]
    MoveAfterLeaf { depth: usize, index: u8 },
    #[error("the selected leaf is valid")]
    ValidLeaf,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// One node of a branch built by [`follow_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchNode {
    pub label: Hypersequent,
    pub tag: Option<PremiseTag>,
}

/// Builds only the branch the certificate selects, root first.
pub fn follow_certificate(a: &Formula, cert: &Certificate) -> Result<Vec<BranchNode>, Rejection> {
    let expected = a.complexity();
    if cert.moves.len() != expected {
        return Err(Rejection::WrongLength { expected, found: cert.moves.len() });
    }
    let mut branch = vec![BranchNode { label: Hypersequent::root(a), tag: None }];
    let mut ended = false;
    for (depth, &m) in cert.moves.iter().enumerate() {
        if ended {
            if m != 0 {
                return Err(Rejection::MoveAfterLeaf { depth, index: m });
            }
            continue;
        }
        let current = &branch.last().expect("root present").label;
        match expand(current, Mode::Rwbl)? {
            None if m == 0 => ended = true,
            None => return Err(Rejection::MoveAfterLeaf { depth, index: m }),
            Some(_) if m == 0 => return Err(Rejection::StopAtReducible { depth }),
            Some(tuple) => {
                let arity = tuple.len();
                let p = tuple
                    .premises
                    .into_iter()
                    .nth(usize::from(m) - 1)
                    .ok_or(Rejection::OutOfRange { depth, index: m, arity })?;
                let tag = Some(p.tag);
                branch.push(BranchNode { label: p.into_hypersequent(), tag });
            }
        }
    }
    if !ended && !branch.last().expect("root present").label.is_irreducible() {
        // All moves used and still reducible: height exceeded the bound.
        return Err(Rejection::StopAtReducible { depth: expected });
    }
    Ok(branch)
}

/// A way a leaf can fail the shape every rewriting-rule leaf has.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LeafDefect {
    #[error("leaf variables {found:?} differ from the formula's {expected:?}")]
    Variables { found: BTreeSet<u32>, expected: BTreeSet<u32> },
    #[error("variables of `{0}` are not on a `<<` cycle of top-bounded terms")]
    NoCycle(String),
}

/// Checks a rewriting-rule leaf of `a`: its variables are those of `a`, and
/// the variables of every relation with three or more formulas, or two and
/// a nonzero index, lie on one `<<` cycle whose members `r` each come with
/// `top << r` and `r <= top`.
pub fn leaf_structure(leaf: &Hypersequent, a: &Formula) -> Result<(), LeafDefect> {
    let (found, expected) = (leaf.variables(), a.variables());
    if found != expected {
        return Err(LeafDefect::Variables { found, expected });
    }
    let top = Formula::top();
    let bounded = |r: &Formula| {
        leaf.contains(&RelationalSequent::ll(top.clone(), r.clone()))
            && leaf.contains(&RelationalSequent::prec_eq(vec![r.clone()], vec![top.clone()], 0))
    };
    let mut graph: DiGraph<Formula, ()> = DiGraph::new();
    let mut node = BTreeMap::new();
    for f in leaf.formulas() {
        if !f.is_top() && !node.contains_key(f) && bounded(f) {
            node.insert(f.clone(), graph.add_node(f.clone()));
        }
    }
    for s in leaf.iter().filter(|s| s.kind() == RelKind::Ll) {
        if let (Some(&x), Some(&y)) = (node.get(&s.left()[0]), node.get(&s.right()[0])) {
            graph.add_edge(x, y, ());
        }
    }
    let mut component = BTreeMap::new();
    for (i, scc) in tarjan_scc(&graph).into_iter().enumerate() {
        let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        for v in scc {
            component.insert(v, cyclic.then_some(i));
        }
    }
    for s in leaf.iter().filter(|s| s.kind() != RelKind::Ll) {
        let t = s.left().len() + s.right().len();
        if t < 2 || (t == 2 && s.kind().index() == 0) {
            continue;
        }
        let cycles: Vec<Option<usize>> = s
            .formulas()
            .filter(|f| matches!(f, Formula::Var(_)))
            .map(|f| node.get(f).and_then(|v| component[v]))
            .collect();
        if cycles.iter().any(|c| c.is_none() || *c != cycles[0]) {
            return Err(LeafDefect::NoCycle(s.to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn atom_tree_is_a_single_node() {
        let t = build_rwbl_tree(&f("p1"), Some(0)).unwrap();
        assert_eq!(t.nodes.len(), 1);
        let s = t.stats();
        assert_eq!((s.height, s.node_count, s.leaf_count, s.max_branch_weight), (0, 1, 1, 3));
        assert_eq!(build_rhbl_tree(&f("p1"), 4).unwrap().nodes.len(), 1);
    }

    #[test]
    fn self_implication_tree() {
        let t = build_rwbl_tree(&f("p1 -> p1"), Some(1)).unwrap();
        assert_eq!(t.nodes.len(), 4);
        assert_eq!(t.nodes[0].children, vec![1, 2, 3]);
        assert_eq!(t.stats().height, 1);
        assert!(t.nodes[3].label.to_string().contains("top <= top"));
        assert_eq!(tree_stats(&f("p1 -> p1"), Mode::Rwbl, None).unwrap(), t.stats());
    }

    #[test]
    fn depth_limit_is_enforced() {
        assert_eq!(
            build_rwbl_tree(&f("p1 -> p2 * p3"), Some(1)).unwrap_err(),
            ReductionError::DepthLimit(1)
        );
    }

    #[test]
    fn certificates() {
        let a = f("p1 -> p1");
        let b = follow_certificate(&a, &Certificate { moves: vec![3] }).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[1].tag.unwrap().to_string(), "->3");
        assert!(matches!(
            follow_certificate(&a, &Certificate { moves: vec![5] }),
            Err(Rejection::OutOfRange { index: 5, arity: 3, .. })
        ));
        assert!(matches!(
            follow_certificate(&a, &Certificate { moves: vec![0] }),
            Err(Rejection::StopAtReducible { depth: 0 })
        ));
        assert_eq!(follow_certificate(&f("p1"), &Certificate { moves: vec![] }).unwrap().len(), 1);
        assert!(matches!(
            follow_certificate(&a, &Certificate { moves: vec![1, 0] }),
            Err(Rejection::WrongLength { expected: 1, found: 2 })
        ));
        assert!(matches!(
            follow_certificate(&f("p1"), &Certificate { moves: vec![] }),
            Ok(ref b) if b.len() == 1
        ));
    }

    #[test]
    fn dumps() {
        let t = build_rwbl_tree(&f("p1 -> p1"), None).unwrap();
        let dot = t.to_dot();
        assert!(dot.lines().nth(1).unwrap().starts_with("  n0 [depth=0 tag=\"root\" label=\"top <= (p1 -> p1)\"]; n0 -> {n1 n2 n3};"));
        let json = t.to_json();
        assert_eq!(json["nodes"].as_array().unwrap().len(), 4);
        assert_eq!(json["nodes"][2]["tag"], "->2");
    }

    #[test]
    fn logical_rules_take_extra_steps() {
        // Two occurrences of the pivot need two logical steps but one rewrite.
        let a = f("(p1 -> p2) -> (p1 -> p2)");
        let rw = build_rwbl_tree(&a, None).unwrap().stats();
        let lg = build_rhbl_tree(&a, 16).unwrap().stats();
        assert!(lg.height > rw.height);
    }

    #[test]
    fn leaf_structure_checks() {
        let a = f("p1 * p2");
        let t = build_rwbl_tree(&a, None).unwrap();
        for n in t.leaves() {
            assert!(leaf_structure(&n.label, &a).is_ok(), "{}", n.label);
        }
        assert!(matches!(
            leaf_structure(&"top <= p1".parse().unwrap(), &f("p1 * p2")),
            Err(LeafDefect::Variables { .. })
        ));
        // The second premise of an implication puts both sides into one
        // relation with no `<<` cycle around them.
        let a = f("p1 -> p2");
        let t = build_rwbl_tree(&a, None).unwrap();
        let leaf = &t.nodes[t.nodes[0].children[1]].label;
        assert!(leaf.contains(&"p1, top <= p2".parse::<Hypersequent>().unwrap().iter().next().unwrap().clone()));
        assert!(matches!(leaf_structure(leaf, &a), Err(LeafDefect::NoCycle(_))));
    }
}
