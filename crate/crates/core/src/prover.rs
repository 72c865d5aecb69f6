//! Provability: every leaf of the reduction tree of `A` must be valid.
//! Otherwise the first invalid leaf gives a countermodel and a certificate
//! naming its branch, which can be rechecked by building that branch alone.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::axiom_check::{check_axiom, verify_branch_countermodel, AxiomError, AxiomVerdict};
use crate::formula::{parse, Formula};
use crate::hypersequent::Hypersequent;
use crate::reduction::{follow_certificate, walk, BranchNode, Certificate, Mode, ReductionError, Rejection, Visit};
use crate::semantics::{OmegaValue, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Axiom(#[from] AxiomError),
    #[error("countermodel {0} does not refute the branch")]
    BadCountermodel(String),
}

/// What a failed proof attempt leaves behind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    /// Premise indices from the root to the invalid leaf.
    pub path: Vec<u8>,
    /// The padded certificate. Only rewriting-rule branches have one.
    pub certificate: Option<Certificate>,
    pub countermodel: Valuation,
    /// Labels from the root to the leaf.
    pub branch: Vec<BranchNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProveResult {
    Provable,
    NotProvable(Box<Refutation>),
}

impl ProveResult {
    pub fn is_provable(&self) -> bool {
        matches!(self, ProveResult::Provable)
    }
}

/// Leaf countermodels only mention the leaf's variables; the rest get `0`.
fn complete(mut v: Valuation, a: &Formula) -> Valuation {
    for i in a.variables() {
        if v.get(i).is_none() {
            v.set(i, OmegaValue::zero());
        }
    }
    v
}

pub fn check_tautology(a: &Formula) -> Result<ProveResult, ProverError> {
    check_tautology_with(a, Mode::Rwbl, Some(a.complexity()))
}

/// Explores branches in premise order and stops at the first invalid leaf.
/// The countermodel is checked against every label on its branch.
pub fn check_tautology_with(a: &Formula, mode: Mode, depth_limit: Option<usize>) -> Result<ProveResult, ProverError> {
    let mut stack: Vec<BranchNode> = Vec::new();
    let mut found: Option<(Vec<u8>, Valuation, Vec<BranchNode>)> = None;
    let mut failure: Option<AxiomError> = None;
    let _ = walk(&Hypersequent::root(a), mode, depth_limit, &mut |v: &Visit| {
        stack.truncate(v.depth);
        stack.push(BranchNode { label: v.label.clone(), tag: v.tag });
        if !v.is_leaf {
            return ControlFlow::Continue(());
        }
        match check_axiom(v.label) {
            Ok(AxiomVerdict::Axiom) => ControlFlow::Continue(()),
            Ok(AxiomVerdict::NotAxiom(model)) => {
                found = Some((v.path.to_vec(), model, stack.clone()));
                ControlFlow::Break(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let Some((path, model, branch)) = found else { return Ok(ProveResult::Provable) };
    let countermodel = complete(model, a);
    let labels: Vec<Hypersequent> = branch.iter().map(|n| n.label.clone()).collect();
    if !verify_branch_countermodel(&countermodel, &labels, a) {
        return Err(ProverError::BadCountermodel(countermodel.to_string()));
    }
    let certificate = (mode == Mode::Rwbl).then(|| Certificate::from_path(&path, a.complexity()));
    Ok(ProveResult::NotProvable(Box::new(Refutation { path, certificate, countermodel, branch })))
}

/// Accepts when the certificate selects a complete branch whose leaf is
/// invalid, returning the countermodel lifted to the root.
pub fn check_no_tautology(a: &Formula, cert: &Certificate) -> Result<Valuation, Rejection> {
    let branch = follow_certificate(a, cert)?;
    let leaf = &branch.last().expect("branch has a root").label;
    match check_axiom(leaf) {
        Ok(AxiomVerdict::Axiom) => Err(Rejection::ValidLeaf),
        Ok(AxiomVerdict::NotAxiom(model)) => {
            let v = complete(model, a);
            let labels: Vec<Hypersequent> = branch.iter().map(|n| n.label.clone()).collect();
            if verify_branch_countermodel(&v, &labels, a) {
                Ok(v)
            } else {
                Err(Rejection::ValidLeaf)
            }
        }
        Err(_) => Err(Rejection::ValidLeaf),
    }
}

/// `{"formula": "...", "moves": [..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub formula: String,
    pub moves: Vec<u8>,
}

impl CertificateJson {
    pub fn new(a: &Formula, cert: &Certificate) -> CertificateJson {
        CertificateJson { formula: a.to_string(), moves: cert.moves.clone() }
    }

    pub fn formula(&self) -> Result<Formula, crate::formula::ParseError> {
        parse(&self.formula)
    }

    pub fn certificate(&self) -> Certificate {
        Certificate { moves: self.moves.clone() }
    }
}
