//! Exact feasibility of mixed strict / non-strict linear inequality systems
//! over variables confined to `[0, 1)`, by Fourier–Motzkin elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `Σ coeffs[i]·x_i < bound` when `strict`, otherwise `≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinConstraint {
    pub coeffs: BTreeMap<u32, i64>,
    pub bound: i64,
    pub strict: bool,
}

impl LinConstraint {
    pub fn new(coeffs: impl IntoIterator<Item = (u32, i64)>, bound: i64, strict: bool) -> LinConstraint {
        let mut map = BTreeMap::new();
        for (var, c) in coeffs {
            *map.entry(var).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        LinConstraint { coeffs: map, bound, strict }
    }

    /// `x_a − x_b ≤ 0` (or `< 0`).
    pub fn le_var(a: u32, b: u32, strict: bool) -> LinConstraint {
        LinConstraint::new([(a, 1), (b, -1)], 0, strict)
    }

    pub fn holds(&self, point: &BTreeMap<u32, BigRational>) -> bool {
        let lhs = self.coeffs.iter().fold(BigRational::zero(), |acc, (v, c)| {
            acc + point.get(v).cloned().unwrap_or_else(BigRational::zero) * BigRational::from_integer((*c).into())
        });
        let bound = BigRational::from_integer(self.bound.into());
        if self.strict {
            lhs < bound
        } else {
            lhs <= bound
        }
    }
}

impl fmt::Display for LinConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            f.write_str("0")?;
        }
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sep}{sign}{sep}x{v}")?;
            } else {
                write!(f, "{sep}{sign}{sep}{mag}*x{v}")?;
            }
        }
        write!(f, " {} {}", if self.strict { "<" } else { "<=" }, self.bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(BTreeMap<u32, BigRational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coeffs: BTreeMap<u32, BigRational>,
    bound: BigRational,
    strict: bool,
}

impl Row {
    /// Scales so the first coefficient is `±1`.
    fn normalized(mut self) -> Row {
        if let Some(first) = self.coeffs.values().next().map(|c| c.abs()) {
            for c in self.coeffs.values_mut() {
                *c = &*c / &first;
            }
            self.bound = &self.bound / &first;
        }
        self
    }

    fn scaled(&self, k: &BigRational) -> Row {
        Row {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * k)).collect(),
            bound: &self.bound * k,
            strict: self.strict,
        }
    }

    fn plus(&self, other: &Row) -> Row {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let e = coeffs.entry(*v).or_insert_with(BigRational::zero);
            *e += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Row { coeffs, bound: &self.bound + &other.bound, strict: self.strict || other.strict }
    }
}

/// Keeps the tightest row per coefficient vector. Returns `None` when some
/// constant row is violated.
fn tidy(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut best: BTreeMap<BTreeMap<u32, BigRational>, (BigRational, bool)> = BTreeMap::new();
    for row in rows {
        let row = row.normalized();
        if row.coeffs.is_empty() {
            let ok = if row.strict { row.bound.is_positive() } else { !row.bound.is_negative() };
            if !ok {
                return None;
            }
            continue;
        }
        match best.get_mut(&row.coeffs) {
            Some((b, s)) => {
                if row.bound < *b {
                    *b = row.bound;
                    *s = row.strict;
                } else if row.bound == *b {
                    *s |= row.strict;
                }
            }
            None => {
                best.insert(row.coeffs, (row.bound, row.strict));
            }
        }
    }
    Some(best.into_iter().map(|(coeffs, (bound, strict))| Row { coeffs, bound, strict }).collect())
}

/// Decides whether some rational point with every `x_i ∈ [0, 1)` satisfies
/// all constraints, returning one if so. Every witness is checked against
/// the input before it is returned.
pub fn solve(constraints: &[LinConstraint], variables: &BTreeSet<u32>) -> Feasibility {
    let mut rows: Vec<Row> = constraints
        .iter()
        .map(|c| Row {
            coeffs: c
                .coeffs
                .iter()
                .filter(|(_, k)| **k != 0)
                .map(|(v, k)| (*v, BigRational::from_integer((*k).into())))
                .collect(),
            bound: BigRational::from_integer(c.bound.into()),
            strict: c.strict,
        })
        .collect();
    let mut all_vars = variables.clone();
    all_vars.extend(constraints.iter().flat_map(|c| c.coeffs.keys().copied()));
    for &v in &all_vars {
        let one = BigRational::one();
        rows.push(Row { coeffs: BTreeMap::from([(v, -one.clone())]), bound: BigRational::zero(), strict: false });
        rows.push(Row { coeffs: BTreeMap::from([(v, one.clone())]), bound: one, strict: true });
    }

    // Rows still mentioning each variable at the moment it is eliminated.
    let mut stages: Vec<(u32, Vec<Row>)> = Vec::new();
    let Some(mut current) = tidy(rows) else { return Feasibility::Infeasible };
    for &v in &all_vars {
        let (with, without): (Vec<Row>, Vec<Row>) =
            current.into_iter().partition(|r| r.coeffs.contains_key(&v));
        let (pos, neg): (Vec<&Row>, Vec<&Row>) = with.iter().partition(|r| r.coeffs[&v].is_positive());
        let mut next = without;
        for p in &pos {
            let p = p.scaled(&p.coeffs[&v].recip());
            for n in &neg {
                let n = n.scaled(&(-n.coeffs[&v].recip()));
                next.push(p.plus(&n));
            }
        }
        stages.push((v, with));
        match tidy(next) {
            Some(rows) => current = rows,
            None => return Feasibility::Infeasible,
        }
    }

    let mut point: BTreeMap<u32, BigRational> = BTreeMap::new();
    for (v, rows) in stages.iter().rev() {
        let value = pick(*v, rows, &point);
        point.insert(*v, value);
    }
    assert!(
        constraints.iter().all(|c| c.holds(&point))
            && point.values().all(|x| !x.is_negative() && x < &BigRational::one()),
        "elimination produced a bad witness"
    );
    Feasibility::Feasible(point.into_iter().filter(|(v, _)| variables.contains(v)).collect())
}

/// A value for `v` inside the interval the stage rows leave open, given
/// values for all variables eliminated later.
fn pick(v: u32, rows: &[Row], point: &BTreeMap<u32, BigRational>) -> BigRational {
    let mut lower: Option<(BigRational, bool)> = None;
    let mut upper: Option<(BigRational, bool)> = None;
    for r in rows {
        let c = &r.coeffs[&v];
        let rest = r
            .coeffs
            .iter()
            .filter(|(w, _)| **w != v)
            .fold(BigRational::zero(), |acc, (w, k)| acc + k * &point[w]);
        let limit = (&r.bound - rest) / c;
        if c.is_positive() {
            if upper.as_ref().is_none_or(|(u, s)| limit < *u || (limit == *u && r.strict && !s)) {
                upper = Some((limit, r.strict));
            }
        } else if lower.as_ref().is_none_or(|(l, s)| limit > *l || (limit == *l && r.strict && !s)) {
            lower = Some((limit, r.strict));
        }
    }
    let (lo, _) = lower.expect("every variable has a lower bound");
    let (hi, _) = upper.expect("every variable has an upper bound");
    if lo == hi {
        lo
    } else {
        (lo + hi) / BigRational::from_integer(BigInt::from(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vars(vs: &[u32]) -> BTreeSet<u32> {
        vs.iter().copied().collect()
    }

    #[test]
    fn strict_against_bound() {
        let cs = [LinConstraint::new([(1, 1)], 0, true)];
        assert_eq!(solve(&cs, &vars(&[1])), Feasibility::Infeasible);
    }

    #[test]
    fn empty_system_takes_midpoint() {
        let Feasibility::Feasible(w) = solve(&[], &vars(&[1])) else { panic!() };
        assert_eq!(w[&1], BigRational::new(1.into(), 2.into()));
        assert_eq!(solve(&[], &BTreeSet::new()), Feasibility::Feasible(BTreeMap::new()));
    }

    #[test]
    fn sum_both_at_least_and_below_one() {
        let cs = [
            LinConstraint::new([(1, -1), (2, -1)], -1, false),
            LinConstraint::new([(1, 1), (2, 1)], 1, true),
        ];
        assert_eq!(solve(&cs, &vars(&[1, 2])), Feasibility::Infeasible);
    }

    #[test]
    fn degenerate_rows() {
        assert_eq!(solve(&[LinConstraint::new([], 0, true)], &vars(&[])), Feasibility::Infeasible);
        assert!(solve(&[LinConstraint::new([], 0, false)], &vars(&[])).is_feasible());
        assert!(solve(&[LinConstraint::le_var(1, 1, false)], &vars(&[1])).is_feasible());
        assert_eq!(solve(&[LinConstraint::le_var(1, 1, true)], &vars(&[1])), Feasibility::Infeasible);
    }

    #[test]
    fn tight_point_is_found() {
        // x1 = x2 = 0 forced by x1 + x2 <= 0.
        let cs = [LinConstraint::new([(1, 1), (2, 1)], 0, false)];
        let Feasibility::Feasible(w) = solve(&cs, &vars(&[1, 2])) else { panic!() };
        assert!(w.values().all(Zero::is_zero));
    }

    #[test]
    fn rendering() {
        let c = LinConstraint::new([(1, -1), (2, 3)], 2, true);
        assert_eq!(c.to_string(), "-x1 + 3*x2 < 2");
    }

    fn grid_feasible(cs: &[LinConstraint], n: u32) -> bool {
        let den = 16i64;
        let total = (den as usize).pow(n);
        (0..total).any(|mut idx| {
            let mut point = BTreeMap::new();
            for v in 1..=n {
                point.insert(v, BigRational::new(((idx % den as usize) as i64).into(), den.into()));
                idx /= den as usize;
            }
            cs.iter().all(|c| c.holds(&point))
        })
    }

    fn constraint(n: u32) -> impl Strategy<Value = LinConstraint> {
        (prop::collection::vec(-4i64..=4, n as usize), -4i64..=4, any::<bool>())
            .prop_map(|(cs, b, s)| LinConstraint::new((1..).zip(cs), b, s))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn agrees_with_grid(
            (n, cs) in (1u32..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(constraint(n), 0..5)))
        ) {
            let vs: BTreeSet<u32> = (1..=n).collect();
            let result = solve(&cs, &vs);
            if grid_feasible(&cs, n) {
                prop_assert!(result.is_feasible());
            }
            if let Feasibility::Feasible(w) = &result {
                for c in &cs {
                    prop_assert!(c.holds(w));
                }
            }
        }
    }
}
