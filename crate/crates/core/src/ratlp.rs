//! Exact linear programming over arbitrary-precision rationals.
//!
//! A dense two-phase tableau simplex with Bland's anti-cycling rule. No
//! floating point anywhere: statuses and optima are exact, so downstream
//! feasibility decisions are proofs rather than numerics. The problems
//! solved here are small (at most a few hundred variables), which makes
//! exactness affordable.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
pub type Rational = num::BigRational;

/// Shorthand for `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Shorthand for an integer [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// Objective sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// One linear constraint `coeffs · x  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    coeffs: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

impl Constraint {
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }
}

/// A linear program. Variables are implicitly bounded below by zero
/// unless marked free; free variables are split into positive and
/// negative parts when the problem is put in standard form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    n_vars: usize,
    sense: Sense,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    free: Vec<bool>,
}

impl LpProblem {
    pub fn new(n_vars: usize, sense: Sense, objective: Vec<Rational>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidParameter("a linear program needs at least one variable".into()));
        }
        if objective.len() != n_vars {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} coefficients for {} variables",
                objective.len(),
                n_vars
            )));
        }
        Ok(LpProblem { n_vars, sense, objective, constraints: Vec::new(), free: vec![false; n_vars] })
    }

    pub fn push_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.n_vars {
            return Err(Error::DimensionMismatch(format!(
                "constraint {} has {} coefficients for {} variables",
                self.constraints.len() + 1,
                coeffs.len(),
                self.n_vars
            )));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Remove the implicit `>= 0` bound from variable `var` (0-based).
    pub fn mark_free(&mut self, var: usize) -> Result<()> {
        if var >= self.n_vars {
            return Err(Error::DimensionMismatch(format!(
                "variable index {var} out of range for {} variables",
                self.n_vars
            )));
        }
        self.free[var] = true;
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_free(&self, var: usize) -> bool {
        self.free[var]
    }
}

/// Result of [`solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, assignment: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// Result of [`solve_feasibility`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

/// The first constraint or sign bound an assignment violates.
/// Constraint indices are 1-based to match the dump output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: Option<usize>,
    pub variable: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Verify an assignment against every sign bound and constraint, in
/// order, with exact arithmetic. Returns the first violation found.
pub fn check_assignment(p: &LpProblem, x: &[Rational]) -> std::result::Result<(), Violation> {
    if x.len() != p.n_vars {
        return Err(Violation {
            constraint: None,
            variable: None,
            message: format!("assignment has {} entries for {} variables", x.len(), p.n_vars),
        });
    }
    for (i, v) in x.iter().enumerate() {
        if !p.free[i] && v.is_negative() {
            return Err(Violation {
                constraint: None,
                variable: Some(i),
                message: format!("variable x{i} = {v} violates its >= 0 bound"),
            });
        }
    }
    for (idx, c) in p.constraints.iter().enumerate() {
        let lhs: Rational = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs,
            Relation::Eq => lhs == c.rhs,
            Relation::Ge => lhs >= c.rhs,
        };
        if !ok {
            return Err(Violation {
                constraint: Some(idx + 1),
                variable: None,
                message: format!(
                    "constraint {}: lhs {} fails '{} {}'",
                    idx + 1,
                    lhs,
                    c.relation,
                    c.rhs
                ),
            });
        }
    }
    Ok(())
}

/// Plain-text dump of a problem (exact rationals, one constraint per
/// line) for external cross-checks.
pub fn dump_standard_form(p: &LpProblem) -> String {
    fn terms(coeffs: &[Rational]) -> String {
        let mut parts = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("{c} x{i}"));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
    let mut out = String::new();
    out.push_str(match p.sense {
        Sense::Maximize => "maximize ",
        Sense::Minimize => "minimize ",
    });
    out.push_str(&terms(&p.objective));
    out.push_str("\nsubject to\n");
    for (idx, c) in p.constraints.iter().enumerate() {
        out.push_str(&format!("  c{}: {} {} {}\n", idx + 1, terms(&c.coeffs), c.relation, c.rhs));
    }
    out.push_str("bounds\n");
    for i in 0..p.n_vars {
        if p.free[i] {
            out.push_str(&format!("  x{i} free\n"));
        } else {
            out.push_str(&format!("  x{i} >= 0\n"));
        }
    }
    out
}

/// The problem in computational standard form: nonnegative variables,
/// rows with nonnegative right-hand sides, slack columns assigned, and
/// the set of rows still needing an artificial variable.
struct Standard {
    n_struct: usize,
    neg_col: Vec<Option<usize>>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    seed: Vec<Option<usize>>,
    total_real: usize,
}

fn standardize(p: &LpProblem) -> Standard {
    let n = p.n_vars;
    let mut neg_col = vec![None; n];
    let mut n_struct = n;
    for i in 0..n {
        if p.free[i] {
            neg_col[i] = Some(n_struct);
            n_struct += 1;
        }
    }

    let m = p.constraints.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut relations = Vec::with_capacity(m);
    for c in &p.constraints {
        let mut row = vec![Rational::zero(); n_struct];
        for (i, a) in c.coeffs.iter().enumerate() {
            row[i] = a.clone();
            if let Some(nc) = neg_col[i] {
                row[nc] = -a.clone();
            }
        }
        let mut r = c.rhs.clone();
        let mut rel = c.relation;
        if r.is_negative() {
            for e in row.iter_mut() {
                *e = -std::mem::take(e);
            }
            r = -r;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
                Relation::Ge => Relation::Le,
            };
        }
        // A `>= 0` row can be flipped to `<= 0`, letting its slack seed
        // the starting basis instead of an artificial variable.
        if rel == Relation::Ge && r.is_zero() {
            for e in row.iter_mut() {
                *e = -std::mem::take(e);
            }
            rel = Relation::Le;
        }
        rows.push(row);
        rhs.push(r);
        relations.push(rel);
    }

    // Slack / surplus columns, one per inequality row.
    let n_slack = relations.iter().filter(|&&r| r != Relation::Eq).count();
    let total_real = n_struct + n_slack;
    let mut seed = vec![None; m];
    let mut next = n_struct;
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(total_real, Rational::zero());
        match relations[i] {
            Relation::Le => {
                row[next] = rat_int(1);
                seed[i] = Some(next);
                next += 1;
            }
            Relation::Ge => {
                row[next] = rat_int(-1);
                next += 1;
            }
            Relation::Eq => {}
        }
    }

    Standard { n_struct, neg_col, rows, rhs, seed, total_real }
}

/// Simplex tableau with an incrementally maintained reduced-cost row.
/// `z_rhs` holds the negated objective value of the current basis.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    z: Vec<Rational>,
    z_rhs: Rational,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    /// Install a minimization cost vector and reduce it against the
    /// current basis (whose columns are unit vectors by invariant).
    fn set_cost(&mut self, cost: &[Rational]) {
        self.z = cost.to_vec();
        self.z_rhs = Rational::zero();
        for i in 0..self.rows.len() {
            let cb = cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for (zj, tj) in self.z.iter_mut().zip(&self.rows[i]) {
                if !tj.is_zero() {
                    *zj -= &cb * tj;
                }
            }
            self.z_rhs -= &cb * &self.rhs[i];
        }
    }

    fn pivot(&mut self, p: usize, e: usize) {
        let inv = self.rows[p][e].recip();
        for x in self.rows[p].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[p] *= &inv;
        let (pivot_row, pivot_rhs) = (self.rows[p].clone(), self.rhs[p].clone());
        for i in 0..self.rows.len() {
            if i == p {
                continue;
            }
            let factor = self.rows[i][e].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *x -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        let factor = self.z[e].clone();
        if !factor.is_zero() {
            for (zj, pv) in self.z.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *zj -= &factor * pv;
                }
            }
            self.z_rhs -= &factor * &pivot_rhs;
        }
        self.basis[p] = e;
    }

    /// Run simplex iterations under Bland's rule: entering column is the
    /// lowest index with negative reduced cost; the ratio-test tie break
    /// is the lowest basis column index.
    fn simplex(&mut self) -> Step {
        loop {
            let Some(enter) = self.z.iter().position(|zj| zj.is_negative()) else {
                return Step::Optimal;
            };
            let mut leave: Option<(Rational, usize)> = None; // (ratio, row)
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &leave {
                        None => true,
                        Some((best, row)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < self.basis[*row])
                        }
                    };
                    if better {
                        leave = Some((ratio, i));
                    }
                }
            }
            match leave {
                Some((_, row)) => self.pivot(row, enter),
                None => return Step::Unbounded,
            }
        }
    }
}

/// Outcome of phase 1: a tableau holding a basic feasible solution with
/// all artificial columns removed, or proof of infeasibility.
enum Phase1 {
    Feasible(Tableau, Standard),
    Infeasible,
}

fn phase1(p: &LpProblem) -> Phase1 {
    let std_form = standardize(p);
    let m = std_form.rows.len();
    let n_art = std_form.seed.iter().filter(|s| s.is_none()).count();
    let total = std_form.total_real + n_art;

    let mut rows = std_form.rows.clone();
    let mut basis = Vec::with_capacity(m);
    let mut next_art = std_form.total_real;
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(total, Rational::zero());
        match std_form.seed[i] {
            Some(col) => basis.push(col),
            None => {
                row[next_art] = rat_int(1);
                basis.push(next_art);
                next_art += 1;
            }
        }
    }

    let mut t = Tableau { rows, rhs: std_form.rhs.clone(), basis, z: Vec::new(), z_rhs: Rational::zero() };

    if n_art > 0 {
        let mut cost = vec![Rational::zero(); total];
        for c in cost.iter_mut().skip(std_form.total_real) {
            *c = rat_int(1);
        }
        t.set_cost(&cost);
        match t.simplex() {
            Step::Optimal => {}
            Step::Unbounded => unreachable!("phase-1 objective is bounded below by zero"),
        }
        if (-&t.z_rhs).is_positive() {
            return Phase1::Infeasible;
        }
        // Drive artificial variables out of the basis; rows that cannot
        // pivot are redundant and are dropped.
        let mut drop_rows = Vec::new();
        for i in 0..t.rows.len() {
            if t.basis[i] < std_form.total_real {
                continue;
            }
            match (0..std_form.total_real).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => drop_rows.push(i),
            }
        }
        for &i in drop_rows.iter().rev() {
            t.rows.remove(i);
            t.rhs.remove(i);
            t.basis.remove(i);
        }
        for row in t.rows.iter_mut() {
            row.truncate(std_form.total_real);
        }
    }

    Phase1::Feasible(t, std_form)
}

fn extract(t: &Tableau, std_form: &Standard, p: &LpProblem) -> Vec<Rational> {
    let mut x_std = vec![Rational::zero(); std_form.n_struct];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < std_form.n_struct {
            x_std[b] = t.rhs[i].clone();
        }
    }
    (0..p.n_vars)
        .map(|i| match std_form.neg_col[i] {
            Some(nc) => &x_std[i] - &x_std[nc],
            None => x_std[i].clone(),
        })
        .collect()
}

/// Solve a linear program exactly with two-phase simplex.
///
/// `Optimal` assignments satisfy every constraint exactly and the value
/// is the true optimum; `Infeasible` and `Unbounded` are likewise exact.
pub fn solve(p: &LpProblem) -> Result<LpOutcome> {
    let (mut t, std_form) = match phase1(p) {
        Phase1::Infeasible => return Ok(LpOutcome::Infeasible),
        Phase1::Feasible(t, s) => (t, s),
    };

    let mut cost = vec![Rational::zero(); std_form.total_real];
    for i in 0..p.n_vars {
        let c = match p.sense {
            Sense::Minimize => p.objective[i].clone(),
            Sense::Maximize => -p.objective[i].clone(),
        };
        if let Some(nc) = std_form.neg_col[i] {
            cost[nc] = -c.clone();
        }
        cost[i] = c;
    }
    t.set_cost(&cost);
    match t.simplex() {
        Step::Unbounded => Ok(LpOutcome::Unbounded),
        Step::Optimal => {
            let assignment = extract(&t, &std_form, p);
            let value: Rational = p.objective.iter().zip(&assignment).map(|(c, x)| c * x).sum();
            debug_assert!(check_assignment(p, &assignment).is_ok());
            Ok(LpOutcome::Optimal { value, assignment })
        }
    }
}

/// Decide feasibility only (phase 1), returning an exact witness when
/// the constraint system is satisfiable.
pub fn solve_feasibility(p: &LpProblem) -> Result<Feasibility> {
    match phase1(p) {
        Phase1::Infeasible => Ok(Feasibility::Infeasible),
        Phase1::Feasible(t, std_form) => {
            let witness = extract(&t, &std_form, p);
            if let Err(v) = check_assignment(p, &witness) {
                return Err(Error::Lp(format!("phase-1 witness fails verification: {v}")));
            }
            Ok(Feasibility::Feasible(witness))
        }
    }
}
