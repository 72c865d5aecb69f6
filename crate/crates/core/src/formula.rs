//! Formulas over `⊥`, propositional variables, strong conjunction and
//! implication, together with the surface grammar, the canonical printer and
//! the complexity order used to pick pivots.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! iff   := imp ( "<->" imp )?
//! imp   := conj ( "->" imp )?          right associative
//! conj  := unary ( "*" unary )*        left associative
//! unary := "~" unary | atom
//! atom  := "0" | "bot" | "1" | "top" | "p" digits | "(" iff ")"
//! ```
//!
//! `~A` is `A -> 0`, `top`/`1` is `0 -> 0` and `A <-> B` is
//! `(A -> B) * (B -> A)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A formula. Children are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Bottom,
    Var(u32),
    Conj(Arc<Formula>, Arc<Formula>),
    Impl(Arc<Formula>, Arc<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected end of input at {pos}")]
    UnexpectedEnd { pos: usize },
    #[error("unexpected {found:?} at {pos}")]
    Unexpected { found: String, pos: usize },
    #[error("unknown token {token:?} at {pos}")]
    UnknownToken { token: String, pos: usize },
    #[error("variable index must be a positive 32-bit integer at {pos}")]
    BadVariable { pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::UnexpectedEnd { pos }
            | ParseError::Unexpected { pos, .. }
            | ParseError::UnknownToken { pos, .. }
            | ParseError::BadVariable { pos } => *pos,
        }
    }
}

impl Formula {
    pub fn var(index: u32) -> Formula {
        Formula::Var(index)
    }

    pub fn conj(left: Formula, right: Formula) -> Formula {
        Formula::Conj(Arc::new(left), Arc::new(right))
    }

    pub fn imp(left: Formula, right: Formula) -> Formula {
        Formula::Impl(Arc::new(left), Arc::new(right))
    }

    /// `⊤ ≡ ⊥ → ⊥`.
    pub fn top() -> Formula {
        Formula::imp(Formula::Bottom, Formula::Bottom)
    }

    /// `¬A ≡ A → ⊥`.
    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bottom)
    }

    /// `A ↔ B ≡ (A → B) ⊙ (B → A)`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::conj(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Impl(l, r) if **l == Formula::Bottom && **r == Formula::Bottom)
    }

    /// `⊥`, a variable, or the literal `⊤`. The calculus never decomposes `⊤`.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Bottom | Formula::Var(_)) || self.is_top()
    }

    /// Number of `⊙` and `→` nodes.
    pub fn complexity(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Var(_) => 0,
            Formula::Conj(l, r) | Formula::Impl(l, r) => 1 + l.complexity() + r.complexity(),
        }
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    pub(crate) fn collect_variables(&self, out: &mut BTreeSet<u32>) {
        match self {
            Formula::Bottom => {}
            Formula::Var(i) => {
                out.insert(*i);
            }
            Formula::Conj(l, r) | Formula::Impl(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    /// Distinct subformulas with at least one connective, `self` included.
    pub fn compound_subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_compound(&mut out, false);
        out
    }

    /// Like [`Formula::compound_subformulas`] but skipping `⊤`, i.e. the
    /// subformulas the calculus can still pick as a pivot.
    pub fn reducible_subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_compound(&mut out, true);
        out
    }

    pub(crate) fn collect_compound(&self, out: &mut BTreeSet<Formula>, skip_top: bool) {
        if let Formula::Conj(l, r) | Formula::Impl(l, r) = self {
            if skip_top && self.is_top() {
                return;
            }
            if out.insert(self.clone()) {
                l.collect_compound(out, skip_top);
                r.collect_compound(out, skip_top);
            }
        }
    }

    /// Prefix serialization with a fixed symbol table: `*` conjunction,
    /// `>` implication, `0` bottom, `p` + digit count + digits for variables.
    /// The code is prefix free, and byte order on it coincides with
    /// [`Formula::structural_cmp`].
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_canonical(&mut out);
        out
    }

    fn write_canonical(&self, out: &mut Vec<u8>) {
        match self {
            Formula::Bottom => out.push(b'0'),
            Formula::Var(i) => {
                let digits = i.to_string();
                out.push(b'p');
                // ':' follows '9' in ASCII, so ten-digit indices sort last.
                out.push(b'0' + digits.len() as u8);
                out.extend_from_slice(digits.as_bytes());
            }
            Formula::Conj(l, r) => {
                out.push(b'*');
                l.write_canonical(out);
                r.write_canonical(out);
            }
            Formula::Impl(l, r) => {
                out.push(b'>');
                l.write_canonical(out);
                r.write_canonical(out);
            }
        }
    }

    /// Structural comparison agreeing with byte order on
    /// [`Formula::canonical_bytes`].
    pub fn structural_cmp(&self, other: &Formula) -> Ordering {
        fn tag(f: &Formula) -> u8 {
            match f {
                Formula::Conj(..) => b'*',
                Formula::Bottom => b'0',
                Formula::Impl(..) => b'>',
                Formula::Var(_) => b'p',
            }
        }
        match (self, other) {
            (Formula::Var(a), Formula::Var(b)) => a.cmp(b),
            (Formula::Conj(a1, a2), Formula::Conj(b1, b2))
            | (Formula::Impl(a1, a2), Formula::Impl(b1, b2)) => {
                let side = |x: &Arc<Formula>, y: &Arc<Formula>| {
                    if Arc::ptr_eq(x, y) {
                        Ordering::Equal
                    } else {
                        x.structural_cmp(y)
                    }
                };
                side(a1, b1).then_with(|| side(a2, b2))
            }
            _ => tag(self).cmp(&tag(other)),
        }
    }

    /// The complexity order `<_c`: connective count first, then the
    /// canonical serialization.
    pub fn cmp_complexity(&self, other: &Formula) -> Ordering {
        self.complexity()
            .cmp(&other.complexity())
            .then_with(|| self.structural_cmp(other))
    }

    /// Appends the canonical rendering of `self` to `out`.
    fn render_into(&self, out: &mut String) {
        use std::fmt::Write;
        match self {
            Formula::Bottom => out.push('0'),
            Formula::Var(i) => {
                let _ = write!(out, "p{i}");
            }
            _ if self.is_top() => out.push_str("top"),
            Formula::Impl(l, r) => {
                render_operand(l, out, l.is_plain_impl());
                out.push_str(" -> ");
                r.render_into(out);
            }
            Formula::Conj(l, r) => {
                render_operand(l, out, l.is_plain_impl());
                out.push_str(" * ");
                render_operand(r, out, r.is_plain_impl() || matches!(**r, Formula::Conj(..)));
            }
        }
    }

    fn is_plain_impl(&self) -> bool {
        matches!(self, Formula::Impl(..)) && !self.is_top()
    }
}

fn render_operand(f: &Formula, out: &mut String, parens: bool) {
    if parens {
        out.push('(');
        f.render_into(out);
        out.push(')');
    } else {
        f.render_into(out);
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_complexity(other)
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical printer with minimal parentheses; `parse(render(A)) == A`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render_into(&mut s);
        f.write_str(&s)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let f = parser.iff()?;
    match parser.peek() {
        None => Ok(f),
        Some((tok, pos)) => Err(ParseError::Unexpected { found: tok.to_string(), pos }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Bottom,
    Top,
    Var(u32),
    Star,
    Arrow,
    Iff,
    Tilde,
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Bottom => f.write_str("0"),
            Token::Top => f.write_str("top"),
            Token::Var(i) => write!(f, "p{i}"),
            Token::Star => f.write_str("*"),
            Token::Arrow => f.write_str("->"),
            Token::Iff => f.write_str("<->"),
            Token::Tilde => f.write_str("~"),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'*' => {
                out.push((Token::Star, start));
                i += 1;
            }
            b'~' => {
                out.push((Token::Tilde, start));
                i += 1;
            }
            b'(' => {
                out.push((Token::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Token::RParen, start));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Token::Arrow, start));
                i += 2;
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                out.push((Token::Iff, start));
                i += 3;
            }
            b'0'..=b'9' | b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "0" | "bot" => Token::Bottom,
                    "1" | "top" => Token::Top,
                    _ if word.len() > 1
                        && word.starts_with('p')
                        && word[1..].bytes().all(|b| b.is_ascii_digit()) =>
                    {
                        match word[1..].parse::<u32>() {
                            Ok(n) if n > 0 => Token::Var(n),
                            _ => return Err(ParseError::BadVariable { pos: start }),
                        }
                    }
                    _ => {
                        return Err(ParseError::UnknownToken { token: word.to_string(), pos: start })
                    }
                };
                out.push((tok, start));
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::UnknownToken { token: ch.to_string(), pos: start });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(&Token, usize)> {
        self.tokens.get(self.pos).map(|(t, p)| (t, *p))
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek().map(|(t, _)| t) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let left = self.imp()?;
        if self.eat(&Token::Iff) {
            let right = self.imp()?;
            return Ok(Formula::iff(left, right));
        }
        Ok(left)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.conj()?;
        if self.eat(&Token::Arrow) {
            let right = self.imp()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Token::Star) {
            let right = self.unary()?;
            acc = Formula::conj(acc, right);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Token::Tilde) {
            return Ok(Formula::neg(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let Some((tok, pos)) = self.peek() else {
            return Err(ParseError::UnexpectedEnd { pos: self.end });
        };
        let tok = tok.clone();
        self.pos += 1;
        match tok {
            Token::Bottom => Ok(Formula::Bottom),
            Token::Top => Ok(Formula::top()),
            Token::Var(i) => Ok(Formula::Var(i)),
            Token::LParen => {
                let inner = self.iff()?;
                match self.peek() {
                    Some((Token::RParen, _)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some((t, p)) => Err(ParseError::Unexpected { found: t.to_string(), pos: p }),
                    None => Err(ParseError::UnexpectedEnd { pos: self.end }),
                }
            }
            other => Err(ParseError::Unexpected { found: other.to_string(), pos }),
        }
    }
}

/// Axiom schemata A1–A7 instantiated on the given formulas.
pub mod axioms {
    use super::Formula;

    pub fn a1(a: &Formula, b: &Formula, c: &Formula) -> Formula {
        Formula::imp(
            Formula::imp(a.clone(), b.clone()),
            Formula::imp(
                Formula::imp(b.clone(), c.clone()),
                Formula::imp(a.clone(), c.clone()),
            ),
        )
    }

    pub fn a2(a: &Formula, b: &Formula) -> Formula {
        Formula::imp(Formula::conj(a.clone(), b.clone()), a.clone())
    }

    pub fn a3(a: &Formula, b: &Formula) -> Formula {
        Formula::imp(
            Formula::conj(a.clone(), b.clone()),
            Formula::conj(b.clone(), a.clone()),
        )
    }

    pub fn a4(a: &Formula, b: &Formula) -> Formula {
        Formula::imp(
            Formula::conj(a.clone(), Formula::imp(a.clone(), b.clone())),
            Formula::conj(b.clone(), Formula::imp(b.clone(), a.clone())),
        )
    }

    pub fn a5(a: &Formula, b: &Formula, c: &Formula) -> Formula {
        Formula::iff(
            Formula::imp(a.clone(), Formula::imp(b.clone(), c.clone())),
            Formula::imp(Formula::conj(a.clone(), b.clone()), c.clone()),
        )
    }

    pub fn a6(a: &Formula, b: &Formula, c: &Formula) -> Formula {
        Formula::imp(
            Formula::imp(Formula::imp(a.clone(), b.clone()), c.clone()),
            Formula::imp(
                Formula::imp(Formula::imp(b.clone(), a.clone()), c.clone()),
                c.clone(),
            ),
        )
    }

    pub fn a7(a: &Formula) -> Formula {
        Formula::imp(Formula::Bottom, a.clone())
    }

    /// A1–A7 over the atoms `p1`, `p2`, `p3`, in order.
    pub fn all_on_atoms() -> Vec<(&'static str, Formula)> {
        let (p, q, r) = (Formula::Var(1), Formula::Var(2), Formula::Var(3));
        vec![
            ("A1", a1(&p, &q, &r)),
            ("A2", a2(&p, &q)),
            ("A3", a3(&p, &q)),
            ("A4", a4(&p, &q)),
            ("A5", a5(&p, &q, &r)),
            ("A6", a6(&p, &q, &r)),
            ("A7", a7(&p)),
        ]
    }
}
