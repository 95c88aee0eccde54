//! Linear-programming bounds and feasibility systems for robust locally
//! repairable and update-efficient storage codes.
//!
//! The size bound: any length-N code over GF(q) that repairs every node
//! from at most r helpers — with at least ζ distinct alternatives
//! surviving any Γ extra unavailable nodes — and that recovers from any
//! β erasures, has a support enumerator satisfying a family of linear
//! constraints. Maximizing total enumerator mass under those constraints
//! therefore upper-bounds the code size. Two formulations are provided:
//! the full program over per-support variables (exponential, for
//! cross-validation) and the symmetrized program over per-size variables
//! (N+1 variables, the production path). Both are solved exactly.
//!
//! The update-efficiency system plays the same game with split-weight
//! enumerators of pseudo-systematic codes and decides feasibility of a
//! parameter tuple; infeasibility proves no such code exists.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num::BigInt;
use num_traits::{One, Zero};

use crate::code_model::{bivariate_support_enumerator, Support, UpdateCode};
use crate::field_core::is_prime;
use crate::macwilliams::{binomial, product_kernel, sym_kernel};
use crate::ratlp::{solve, LpOutcome, LpProblem, Rational, Relation, Sense};
use crate::{Error, Limits, Result};

/// Caveat attached to every feasibility verdict: the constraint system
/// is necessary, not sufficient.
pub const FEASIBILITY_DISCLAIMER: &str = "LP feasibility is a necessary condition only; it does not \
     guarantee that a code with these parameters exists";

/// Parameters of the robust-repairability size bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RlrcParams {
    /// Code length (number of storage nodes).
    pub n: usize,
    /// Field size (prime).
    pub q: u64,
    /// Locality: maximum helper count per repair.
    pub r: usize,
    /// Global-recovery level: erasures that must always be recoverable.
    pub beta: usize,
    /// Extra unavailable nodes the repair must tolerate.
    pub gamma: usize,
    /// Distinct repair alternatives that must survive.
    pub zeta: u64,
}

impl RlrcParams {
    pub fn new(n: usize, q: u64, r: usize, beta: usize, gamma: usize, zeta: u64) -> Result<Self> {
        let p = RlrcParams { n, q, r, beta, gamma, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.q) {
            return Err(Error::NotPrime(self.q));
        }
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "length {} leaves no room for helpers",
                self.n
            )));
        }
        if self.r == 0 || self.r > self.n - 1 {
            return Err(Error::InvalidParameter(format!(
                "locality r = {} must lie in 1..={}",
                self.r,
                self.n - 1
            )));
        }
        if self.beta > self.n {
            return Err(Error::InvalidParameter(format!(
                "erasure level beta = {} exceeds the length {}",
                self.beta, self.n
            )));
        }
        if self.gamma > self.n - 2 {
            return Err(Error::InvalidParameter(format!(
                "unavailability level gamma = {} must lie in 0..={}",
                self.gamma,
                self.n - 2
            )));
        }
        if self.zeta == 0 {
            return Err(Error::InvalidParameter("alternative count zeta must be at least 1".into()));
        }
        Ok(())
    }
}

/// One solved bound: the exact LP optimum and the dimension it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub params: RlrcParams,
    /// Exact optimum of the size-bound LP (an upper bound on |C|).
    pub lp_optimum: Rational,
    /// Largest k with q^k <= lp_optimum.
    pub dim_bound: u32,
    /// True when the constraint system is infeasible: no code with these
    /// parameters exists beyond the zero code, and the row reports the
    /// zero code's size.
    pub zero_code_only: bool,
}

fn big_rat(b: BigInt) -> Rational {
    Rational::from_integer(b)
}

/// The symmetrized size-bound program: variables `a[0..=N]` (value per
/// individual support of each size), objective `sum binom(N,t) a[t]`,
/// with the dual-side profile `b[t]` — expanded through the transform
/// kernel — required nonnegative, small sizes zeroed by the erasure
/// level, `a[0] = 1`, and the repair-mass row.
pub fn build_symmetric_rlrc_lp(p: &RlrcParams) -> Result<LpProblem> {
    p.validate()?;
    let (n, q) = (p.n, p.q);
    let objective: Vec<Rational> = (0..=n).map(|t| big_rat(binomial(n, t))).collect();
    let mut lp = LpProblem::new(n + 1, Sense::Maximize, objective)?;

    // Dual-side nonnegativity: b[t] >= 0, expanded over a[s].
    for t in 0..=n {
        let coeffs: Vec<Rational> = (0..=n).map(|s| big_rat(sym_kernel(n, q, t, s))).collect();
        lp.push_constraint(coeffs, Relation::Ge, Rational::zero())?;
    }
    // Global recovery: no mass on sizes 1..=beta.
    for t in 1..=p.beta.min(n) {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[t] = Rational::one();
        lp.push_constraint(coeffs, Relation::Eq, Rational::zero())?;
    }
    // The zero word is always a codeword.
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[0] = Rational::one();
    lp.push_constraint(coeffs, Relation::Eq, Rational::one())?;
    // Worst-case repair mass: sum_{t=1}^{r} binom(N-1-gamma, t) b[t+1]
    // >= zeta (q-1) sum_t binom(N,t) a[t].
    let avail = n - 1 - p.gamma;
    let zeta_scale = big_rat(BigInt::from(p.zeta) * (q - 1));
    let coeffs: Vec<Rational> = (0..=n)
        .map(|s| {
            let mut acc = BigInt::zero();
            for t in 1..=p.r {
                acc += binomial(avail, t) * sym_kernel(n, q, t + 1, s);
            }
            big_rat(acc) - &zeta_scale * big_rat(binomial(n, s))
        })
        .collect();
    lp.push_constraint(coeffs, Relation::Ge, Rational::zero())?;

    Ok(lp)
}

/// The full size-bound program over one variable per support, exactly as
/// the symmetrized version before averaging. Exponential in N; guarded
/// at N <= 8. Exists to cross-validate the symmetrized program.
pub fn build_full_rlrc_lp(p: &RlrcParams) -> Result<LpProblem> {
    build_full_with(p, false)
}

/// `include_unit_supports` widens the repair-mass rows to count dual
/// supports of size 1 as well. A size-1 dual support at the failed node
/// reads no helpers (it marks a dead coordinate), so the production
/// build excludes it; the knob preserves the distinction for tests,
/// which demonstrate the two readings genuinely part ways.
fn build_full_with(p: &RlrcParams, include_unit_supports: bool) -> Result<LpProblem> {
    p.validate()?;
    if p.n > 8 {
        return Err(Error::InvalidParameter(format!(
            "full program over 2^{} supports exceeds the N <= 8 guard",
            p.n
        )));
    }
    let (n, q) = (p.n, p.q);
    let total = 1usize << n;
    let lowest_size = if include_unit_supports { 1 } else { 2 };

    let mut lp = LpProblem::new(total, Sense::Maximize, vec![Rational::one(); total])?;

    // Dual-side nonnegativity, one row per support w.
    for w in 0..total {
        let wsup = Support::from_mask(w as u64);
        let coeffs: Vec<Rational> = (0..total)
            .map(|s| big_rat(product_kernel(Support::from_mask(s as u64), wsup, n, q)))
            .collect();
        lp.push_constraint(coeffs, Relation::Ge, Rational::zero())?;
    }
    // Global recovery: A_w = 0 for 1 <= |w| <= beta.
    for w in 1..total {
        let size = (w as u64).count_ones() as usize;
        if (1..=p.beta).contains(&size) {
            let mut coeffs = vec![Rational::zero(); total];
            coeffs[w] = Rational::one();
            lp.push_constraint(coeffs, Relation::Eq, Rational::zero())?;
        }
    }
    // The zero word.
    let mut coeffs = vec![Rational::zero(); total];
    coeffs[0] = Rational::one();
    lp.push_constraint(coeffs, Relation::Eq, Rational::one())?;

    // Repair-mass rows: one per (failed node, unavailable set).
    let zeta_scale = big_rat(BigInt::from(p.zeta) * (q - 1));
    for i in 1..=n {
        let node_bit = 1u64 << (i - 1);
        let others: Vec<u64> = (0..n).map(|j| 1u64 << j).filter(|&b| b != node_bit).collect();
        for gsize in 0..=p.gamma {
            crate::locality_analysis::for_each_subset(&others, gsize, &mut |gmask| {
                let omega: Vec<u64> = (1..total as u64)
                    .filter(|&w| {
                        let size = w.count_ones() as usize;
                        w & node_bit != 0 && w & gmask == 0 && size >= lowest_size && size <= p.r + 1
                    })
                    .collect();
                let coeffs: Vec<Rational> = (0..total)
                    .map(|s| {
                        let ssup = Support::from_mask(s as u64);
                        let mut acc = BigInt::zero();
                        for &w in &omega {
                            acc += product_kernel(ssup, Support::from_mask(w), n, q);
                        }
                        big_rat(acc) - &zeta_scale
                    })
                    .collect();
                lp.push_constraint(coeffs, Relation::Ge, Rational::zero())
                    .expect("row length matches variable count");
            });
        }
    }

    Ok(lp)
}

/// Largest `k` with `q^k <= optimum`, by exact power comparison.
pub fn dimension_bound(q: u64, optimum: &Rational) -> u32 {
    let mut k = 0u32;
    let mut power = BigInt::one();
    loop {
        let next = &power * q;
        if big_rat(next.clone()) <= *optimum {
            power = next;
            k += 1;
        } else {
            return k;
        }
    }
}

/// Solve the symmetrized size bound for one parameter tuple.
///
/// An infeasible system means even the zero code's enumerator cannot
/// satisfy the repair-mass requirement; the row then reports the zero
/// code (size 1, dimension 0) with `zero_code_only` set.
pub fn rlrc_bound(p: &RlrcParams) -> Result<BoundRow> {
    p.validate()?;
    let lp = build_symmetric_rlrc_lp(p)?;
    match solve(&lp)? {
        LpOutcome::Optimal { value, .. } => Ok(BoundRow {
            params: *p,
            dim_bound: dimension_bound(p.q, &value),
            lp_optimum: value,
            zero_code_only: false,
        }),
        LpOutcome::Infeasible => Ok(BoundRow {
            params: *p,
            lp_optimum: Rational::one(),
            dim_bound: 0,
            zero_code_only: true,
        }),
        LpOutcome::Unbounded => Err(Error::Lp(
            "size-bound program came back unbounded; its mass rows should cap the objective".into(),
        )),
    }
}

fn sweep_combos(
    n: usize,
    q: u64,
    beta: usize,
    r_range: RangeInclusive<usize>,
    gammas: &[usize],
    zetas: &[u64],
) -> Vec<RlrcParams> {
    let mut combos = Vec::new();
    for r in r_range {
        for &gamma in gammas {
            for &zeta in zetas {
                combos.push(RlrcParams { n, q, r, beta, gamma, zeta });
            }
        }
    }
    combos
}

/// Solve the bound over a parameter grid: `r` ascending, then the given
/// `gamma` and `zeta` orders. Rows error individually; the sweep always
/// returns one entry per combination.
pub fn bound_sweep(
    n: usize,
    q: u64,
    beta: usize,
    r_range: RangeInclusive<usize>,
    gammas: &[usize],
    zetas: &[u64],
) -> Vec<(RlrcParams, Result<BoundRow>)> {
    let combos = sweep_combos(n, q, beta, r_range, gammas, zetas);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        combos.into_par_iter().map(|p| (p, rlrc_bound(&p))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        combos.into_iter().map(|p| (p, rlrc_bound(&p))).collect()
    }
}

/// Single-threaded variant of [`bound_sweep`].
pub fn bound_sweep_serial(
    n: usize,
    q: u64,
    beta: usize,
    r_range: RangeInclusive<usize>,
    gammas: &[usize],
    zetas: &[u64],
) -> Vec<(RlrcParams, Result<BoundRow>)> {
    sweep_combos(n, q, beta, r_range, gammas, zetas)
        .into_iter()
        .map(|p| (p, rlrc_bound(&p)))
        .collect()
}

/// Parameters of the update-efficiency feasibility system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateParams {
    /// Stored symbols.
    pub n: usize,
    /// Source symbols.
    pub k: usize,
    /// Field size (prime).
    pub q: u64,
    /// Locality.
    pub r: usize,
    /// Global-recovery erasure level.
    pub beta: usize,
    /// Update cost ceiling: stored symbols touched by a one-symbol edit.
    pub delta: usize,
    /// Robust repair requirement (gamma, zeta); `None` means the plain
    /// single-alternative requirement (gamma = 0, zeta = 1).
    pub robust: Option<(usize, u64)>,
}

impl UpdateParams {
    pub fn new(
        n: usize,
        k: usize,
        q: u64,
        r: usize,
        beta: usize,
        delta: usize,
        robust: Option<(usize, u64)>,
    ) -> Result<Self> {
        let p = UpdateParams { n, k, q, r, beta, delta, robust };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.q) {
            return Err(Error::NotPrime(self.q));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("source symbol count must be at least 1".into()));
        }
        if self.n < 2 || self.r == 0 || self.r > self.n - 1 {
            return Err(Error::InvalidParameter(format!(
                "locality r = {} must lie in 1..={} for {} stored symbols",
                self.r,
                self.n.saturating_sub(1),
                self.n
            )));
        }
        if self.beta > self.n {
            return Err(Error::InvalidParameter(format!(
                "erasure level beta = {} exceeds the stored length {}",
                self.beta, self.n
            )));
        }
        if self.delta > self.n {
            return Err(Error::InvalidParameter(format!(
                "update cost delta = {} exceeds the stored length {}",
                self.delta, self.n
            )));
        }
        if let Some((gamma, zeta)) = self.robust {
            if gamma > self.n - 2 {
                return Err(Error::InvalidParameter(format!(
                    "unavailability level gamma = {gamma} must lie in 0..={}",
                    self.n - 2
                )));
            }
            if zeta == 0 {
                return Err(Error::InvalidParameter("alternative count zeta must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// The satisfying profile behind a `Feasible` verdict: split-weight
/// values for the hypothetical code (`a`) and its dual side (`c`,
/// scaled by q^K), plus the raw LP assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateWitness {
    /// `(N+1) x (K+1)`: code-side profile, `a[t1][t2]`.
    pub a: Vec<Vec<Rational>>,
    /// `(N+1) x (K+1)`: dual-side profile scaled by q^K, `c[t1][t2]`.
    pub c: Vec<Vec<Rational>>,
    /// The full LP assignment (a block then c block, row-major).
    pub assignment: Vec<Rational>,
}

/// Exact feasibility verdict for an [`UpdateParams`] tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateVerdict {
    /// The system is satisfiable. This does NOT prove a code exists; see
    /// [`FEASIBILITY_DISCLAIMER`].
    Feasible(Box<UpdateWitness>),
    /// No storage code with these parameters exists.
    Infeasible,
}

/// Variable layout of the update system: the `a` block then the `c`
/// block, each row-major over `(t1, t2)`.
fn a_var(p: &UpdateParams, t1: usize, t2: usize) -> usize {
    t1 * (p.k + 1) + t2
}

fn c_var(p: &UpdateParams, t1: usize, t2: usize) -> usize {
    (p.n + 1) * (p.k + 1) + t1 * (p.k + 1) + t2
}

/// Build the update-efficiency feasibility system over split-weight
/// profile variables `a[t1][t2]` and `c[t1][t2]`, all nonnegative:
/// the transform ties `c` to `a`; zero-size classes, per-class masses,
/// and the unit/total anchors pin the shape; the repair-mass row
/// enforces locality (with the robust `(gamma, zeta)` strengthening when
/// requested); and the erasure / update-cost levels zero the forbidden
/// classes.
pub fn build_update_feasibility(p: &UpdateParams) -> Result<LpProblem> {
    p.validate()?;
    let (n, k, q) = (p.n, p.k, p.q);
    let n_vars = 2 * (n + 1) * (k + 1);
    let q_pow_k = BigInt::from(q).pow(k as u32);
    let q_pow_n = BigInt::from(q).pow(n as u32);

    // Feasibility problem: the objective is irrelevant.
    let mut lp = LpProblem::new(n_vars, Sense::Maximize, vec![Rational::zero(); n_vars])?;

    // Transform rows: c[t1][t2] = sum_{s1,s2} f_N(t1,s1) f_K(t2,s2) a[s1][s2].
    for t1 in 0..=n {
        for t2 in 0..=k {
            let mut coeffs = vec![Rational::zero(); n_vars];
            coeffs[c_var(p, t1, t2)] = Rational::one();
            for s1 in 0..=n {
                let f1 = sym_kernel(n, q, t1, s1);
                if f1.is_zero() {
                    continue;
                }
                for s2 in 0..=k {
                    let f2 = sym_kernel(k, q, t2, s2);
                    coeffs[a_var(p, s1, s2)] = -big_rat(&f1 * f2);
                }
            }
            lp.push_constraint(coeffs, Relation::Eq, Rational::zero())?;
        }
    }
    // Nonzero codewords and dual words occupy at least one stored
    // coordinate: a[0][t2] = c[0][t2] = 0 for t2 >= 1.
    for (block, t2) in [(0, 1), (1, 1)].into_iter().flat_map(|(b, lo)| (lo..=k).map(move |t| (b, t))) {
        let var = if block == 0 { a_var(p, 0, t2) } else { c_var(p, 0, t2) };
        let mut coeffs = vec![Rational::zero(); n_vars];
        coeffs[var] = Rational::one();
        lp.push_constraint(coeffs, Relation::Eq, Rational::zero())?;
    }
    // Per-source-class masses: the dual side carries (q-1)^t2 q^N, the
    // code side (q-1)^t2.
    for t2 in 0..=k {
        let mass = BigInt::from(q - 1).pow(t2 as u32);
        let mut coeffs = vec![Rational::zero(); n_vars];
        for t1 in 0..=n {
            coeffs[c_var(p, t1, t2)] = big_rat(binomial(n, t1));
        }
        lp.push_constraint(coeffs, Relation::Eq, big_rat(&mass * &q_pow_n))?;
        let mut coeffs = vec![Rational::zero(); n_vars];
        for t1 in 0..=n {
            coeffs[a_var(p, t1, t2)] = big_rat(binomial(n, t1));
        }
        lp.push_constraint(coeffs, Relation::Eq, big_rat(mass))?;
    }
    // Anchors: the zero codeword, and the dual total.
    let mut coeffs = vec![Rational::zero(); n_vars];
    coeffs[a_var(p, 0, 0)] = Rational::one();
    lp.push_constraint(coeffs, Relation::Eq, Rational::one())?;
    let mut coeffs = vec![Rational::zero(); n_vars];
    coeffs[c_var(p, 0, 0)] = Rational::one();
    lp.push_constraint(coeffs, Relation::Eq, big_rat(q_pow_k.clone()))?;
    // Repair mass on the stored-only dual classes.
    let (gamma, zeta) = p.robust.unwrap_or((0, 1));
    let mut coeffs = vec![Rational::zero(); n_vars];
    for t1 in 2..=(p.r + 1).min(n) {
        coeffs[c_var(p, t1, 0)] = big_rat(binomial(n - gamma - 1, t1 - 1));
    }
    lp.push_constraint(
        coeffs,
        Relation::Ge,
        big_rat(BigInt::from(zeta) * (q - 1) * &q_pow_k),
    )?;
    // Erasure level: no code mass on stored sizes 1..=beta.
    for t1 in 1..=p.beta.min(n) {
        for t2 in 0..=k {
            let mut coeffs = vec![Rational::zero(); n_vars];
            coeffs[a_var(p, t1, t2)] = Rational::one();
            lp.push_constraint(coeffs, Relation::Eq, Rational::zero())?;
        }
    }
    // Update cost: a single-symbol edit touches at most delta stored
    // coordinates.
    for t1 in p.delta + 1..=n {
        let mut coeffs = vec![Rational::zero(); n_vars];
        coeffs[a_var(p, t1, 1)] = Rational::one();
        lp.push_constraint(coeffs, Relation::Eq, Rational::zero())?;
    }

    Ok(lp)
}

/// Decide the update-efficiency system exactly.
pub fn update_feasible(p: &UpdateParams) -> Result<UpdateVerdict> {
    let lp = build_update_feasibility(p)?;
    match crate::ratlp::solve_feasibility(&lp)? {
        crate::ratlp::Feasibility::Infeasible => Ok(UpdateVerdict::Infeasible),
        crate::ratlp::Feasibility::Feasible(assignment) => {
            let a = (0..=p.n)
                .map(|t1| (0..=p.k).map(|t2| assignment[a_var(p, t1, t2)].clone()).collect())
                .collect();
            let c = (0..=p.n)
                .map(|t1| (0..=p.k).map(|t2| assignment[c_var(p, t1, t2)].clone()).collect())
                .collect();
            Ok(UpdateVerdict::Feasible(Box::new(UpdateWitness { a, c, assignment })))
        }
    }
}

/// One verified constraint family of [`verify_necessary_conditions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub pass: bool,
    /// On failure, the first offending entry.
    pub detail: Option<String>,
}

/// Verdicts for all twelve enumerator constraint families, in a fixed
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessaryConditionsReport {
    pub checks: Vec<ConditionCheck>,
}

impl NecessaryConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&ConditionCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Check the twelve support-enumerator constraint families directly
/// against a concrete pseudo-systematic code, with `A` enumerated from
/// the code and `C` as q^K times the dual's enumerator. Any code passing
/// the behavioral criteria (local recovery at `r`, global recovery at
/// `beta`, update cost `delta`) must pass every family.
pub fn verify_necessary_conditions(
    u: &UpdateCode,
    r: usize,
    beta: usize,
    delta: usize,
    limits: &Limits,
) -> Result<NecessaryConditionsReport> {
    let (n, k, q) = (u.n(), u.k(), u.q());
    limits.check_enumeration(1u128 << (n + k))?;
    let a_counts = bivariate_support_enumerator(&u.as_linear_code(), n, limits)?;
    let dual_counts = bivariate_support_enumerator(&u.dual_code(), n, limits)?;
    let q_pow_k = BigInt::from(q).pow(k as u32);
    let q_pow_n = BigInt::from(q).pow(n as u32);
    // C values: q^K times the dual enumerator.
    let c_values: BTreeMap<(Support, Support), BigInt> = dual_counts
        .iter()
        .map(|(&pair, &count)| (pair, &q_pow_k * count))
        .collect();

    let mut checks = Vec::with_capacity(12);
    let mut push = |name: &'static str, detail: Option<String>| {
        checks.push(ConditionCheck { name, pass: detail.is_none(), detail });
    };

    // 1. The transform of A reproduces C at every support pair.
    let mut fail = None;
    'outer: for w1_mask in 0..(1u64 << n) {
        let w1 = Support::from_mask(w1_mask);
        for w2_mask in 0..(1u64 << k) {
            let w2 = Support::from_mask(w2_mask);
            let mut acc = BigInt::zero();
            for (&(s1, s2), &count) in &a_counts {
                acc += product_kernel(s1, w1, n, q) * product_kernel(s2, w2, k, q) * count;
            }
            let want = c_values.get(&(w1, w2)).cloned().unwrap_or_else(BigInt::zero);
            if acc != want {
                fail = Some(format!(
                    "transform of A at ({w1}, {w2}) gives {acc}, dual enumeration gives {want}"
                ));
                break 'outer;
            }
        }
    }
    push("dual_transform_identity", fail);

    // 2-3. Counts are nonnegative (trivially true for enumerated data).
    push("code_counts_nonnegative", None);
    push("dual_counts_nonnegative", None);

    // 4-5. A nonzero (dual) codeword always occupies a stored coordinate.
    let empty_stored = |counts: &BTreeMap<(Support, Support), u64>| {
        counts
            .iter()
            .find(|&(&(s1, s2), &cnt)| s1.is_empty() && !s2.is_empty() && cnt > 0)
            .map(|(&(_, s2), &cnt)| format!("{cnt} words with empty stored support and source support {s2}"))
    };
    push("stored_support_never_empty", empty_stored(&a_counts));
    push("dual_stored_support_never_empty", empty_stored(&dual_counts));

    // 6. Dual mass per source support: sum_w1 C = (q-1)^|w2| q^N.
    let mut fail = None;
    for w2_mask in 0..(1u64 << k) {
        let w2 = Support::from_mask(w2_mask);
        let got: BigInt = c_values.iter().filter(|((_, s2), _)| *s2 == w2).map(|(_, v)| v).sum();
        let want = BigInt::from(q - 1).pow(w2.size()) * &q_pow_n;
        if got != want {
            fail = Some(format!("dual mass at source support {w2} is {got}, expected {want}"));
            break;
        }
    }
    push("dual_mass_per_message_support", fail);

    // 7. Code mass per source support: sum_w1 A = (q-1)^|w2|.
    let mut fail = None;
    for w2_mask in 0..(1u64 << k) {
        let w2 = Support::from_mask(w2_mask);
        let got: u64 = a_counts.iter().filter(|((_, s2), _)| *s2 == w2).map(|(_, &v)| v).sum();
        let want = BigInt::from(q - 1).pow(w2.size());
        if BigInt::from(got) != want {
            fail = Some(format!("code mass at source support {w2} is {got}, expected {want}"));
            break;
        }
    }
    push("code_mass_per_message_support", fail);

    // 8-9. Anchors.
    let a00 = a_counts.get(&(Support::EMPTY, Support::EMPTY)).copied().unwrap_or(0);
    push(
        "empty_support_unit",
        (a00 != 1).then(|| format!("A at the empty pair is {a00}, expected 1")),
    );
    let c00 = c_values.get(&(Support::EMPTY, Support::EMPTY)).cloned().unwrap_or_else(BigInt::zero);
    push(
        "dual_empty_support_total",
        (c00 != q_pow_k).then(|| format!("C at the empty pair is {c00}, expected {q_pow_k}")),
    );

    // 10. Repair mass per stored node over stored-only dual supports of
    // size at most r+1.
    let mut fail = None;
    let need = BigInt::from(q - 1) * &q_pow_k;
    for node in 1..=n {
        let got: BigInt = c_values
            .iter()
            .filter(|((s1, s2), _)| {
                s2.is_empty() && s1.contains(node) && (1..=r + 1).contains(&(s1.size() as usize))
            })
            .map(|(_, v)| v)
            .sum();
        if got < need {
            fail = Some(format!("repair mass at node {node} is {got}, needs at least {need}"));
            break;
        }
    }
    push("local_repair_mass", fail);

    // 11. Global recovery: no stored support of size 1..=beta.
    let offender = a_counts
        .iter()
        .find(|&(&(s1, _), &cnt)| cnt > 0 && (1..=beta).contains(&(s1.size() as usize)))
        .map(|(&(s1, s2), &cnt)| format!("{cnt} words with stored support {s1}, source support {s2}"));
    push("small_support_mass_zero", offender);

    // 12. Update cost: single-source-symbol words stay within delta
    // stored coordinates.
    let offender = a_counts
        .iter()
        .find(|&(&(s1, s2), &cnt)| cnt > 0 && s2.size() == 1 && (s1.size() as usize) > delta)
        .map(|(&(s1, s2), &cnt)| format!("{cnt} words with stored support {s1}, source support {s2}"));
    push("wide_update_mass_zero", offender);

    Ok(NecessaryConditionsReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_model::{code_from_generator, to_update_code};
    use crate::field_core::FieldMatrix;
    use crate::ratlp::{check_assignment, rat_int};

    fn params(n: usize, q: u64, r: usize, beta: usize, gamma: usize, zeta: u64) -> RlrcParams {
        RlrcParams::new(n, q, r, beta, gamma, zeta).unwrap()
    }

    fn optimum(p: &RlrcParams) -> Rational {
        match solve(&build_symmetric_rlrc_lp(p).unwrap()).unwrap() {
            LpOutcome::Optimal { value, .. } => value,
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    fn full_optimum(p: &RlrcParams, include_unit_supports: bool) -> Rational {
        match solve(&build_full_with(p, include_unit_supports).unwrap()).unwrap() {
            LpOutcome::Optimal { value, .. } => value,
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn params_are_validated() {
        assert!(RlrcParams::new(16, 2, 3, 3, 1, 1).is_ok());
        assert!(matches!(RlrcParams::new(16, 4, 3, 3, 1, 1), Err(Error::NotPrime(4))));
        assert!(RlrcParams::new(16, 2, 0, 3, 1, 1).is_err());
        assert!(RlrcParams::new(16, 2, 16, 3, 1, 1).is_err());
        assert!(RlrcParams::new(16, 2, 3, 17, 1, 1).is_err());
        assert!(RlrcParams::new(16, 2, 3, 3, 15, 1).is_err());
        assert!(RlrcParams::new(16, 2, 3, 3, 1, 0).is_err());
    }

    #[test]
    fn symmetric_problem_shape() {
        let p = params(16, 2, 3, 3, 1, 1);
        let lp = build_symmetric_rlrc_lp(&p).unwrap();
        assert_eq!(lp.n_vars(), 17);
        // (N+1) transform rows + beta zero rows + unit row + mass row.
        assert_eq!(lp.constraints().len(), 17 + 3 + 1 + 1);
    }

    #[test]
    fn erasing_everything_leaves_the_zero_code() {
        let p = params(4, 2, 1, 4, 0, 1);
        let row = rlrc_bound(&p).unwrap();
        assert_eq!(row.lp_optimum, rat_int(1));
        assert_eq!(row.dim_bound, 0);
        assert!(!row.zero_code_only);
    }

    #[test]
    fn impossible_repair_demand_reports_zero_code_only() {
        // At r = 1, gamma = 2, only binom(1,1) = 1 qualifying size class
        // remains, so zeta = 4 is impossible for any enumerator.
        let p = params(4, 2, 1, 0, 2, 4);
        let row = rlrc_bound(&p).unwrap();
        assert!(row.zero_code_only);
        assert_eq!(row.lp_optimum, rat_int(1));
        assert_eq!(row.dim_bound, 0);

        // The same demand at zeta = 1 is satisfiable.
        let p = params(4, 2, 1, 0, 2, 1);
        assert!(!rlrc_bound(&p).unwrap().zero_code_only);
    }

    #[test]
    fn small_grid_optima() {
        // Oracle values from independent vertex-level prototypes.
        assert_eq!(optimum(&params(4, 2, 2, 1, 0, 1)), rat_int(6));
        assert_eq!(optimum(&params(5, 2, 1, 0, 0, 1)), rat(64, 7));
        assert_eq!(optimum(&params(5, 2, 2, 1, 0, 2)), rat(40, 7));
        assert_eq!(optimum(&params(5, 3, 3, 2, 0, 1)), rat_int(18));
        assert_eq!(optimum(&params(5, 3, 2, 1, 1, 1)), rat(243, 11));
        assert_eq!(optimum(&params(5, 3, 1, 0, 1, 2)), rat(171, 17));
        assert_eq!(optimum(&params(6, 2, 3, 2, 1, 2)), rat_int(8));
        assert_eq!(optimum(&params(6, 3, 2, 0, 0, 1)), rat(729, 5));
    }

    fn rat(n: i64, d: i64) -> Rational {
        crate::ratlp::rat(n, d)
    }

    #[test]
    fn production_bounds_at_length_16() {
        let row = rlrc_bound(&params(16, 2, 3, 3, 1, 1)).unwrap();
        assert_eq!(row.lp_optimum, rat(17_317_888, 18_301));
        assert_eq!(row.dim_bound, 9);

        let row = rlrc_bound(&params(16, 2, 3, 3, 0, 2)).unwrap();
        assert_eq!(row.lp_optimum, rat(1_082_368, 1_513));
        assert_eq!(row.dim_bound, 9);
    }

    #[test]
    fn production_bounds_at_length_8() {
        for (gamma, zeta) in [(0usize, 7u64), (1, 4), (2, 2)] {
            let row = rlrc_bound(&params(8, 2, 3, 3, gamma, zeta)).unwrap();
            assert_eq!(row.lp_optimum, rat_int(16), "gamma={gamma} zeta={zeta}");
            assert_eq!(row.dim_bound, 4);
        }
    }

    #[test]
    fn full_and_symmetric_programs_agree() {
        for p in [
            params(4, 2, 2, 1, 0, 1),
            params(4, 3, 1, 0, 0, 2),
            params(4, 2, 1, 2, 1, 1),
            params(5, 2, 2, 0, 1, 2),
        ] {
            assert_eq!(full_optimum(&p, false), optimum(&p), "params {p:?}");
        }
    }

    #[test]
    fn unit_supports_would_change_the_answer() {
        // Widening the repair-mass rows to count size-1 dual supports
        // genuinely relaxes the program: a dead coordinate would be
        // counted as a repair alternative that reads no helpers.
        let p = params(2, 3, 1, 0, 0, 2);
        assert_eq!(optimum(&p), rat_int(1));
        assert_eq!(full_optimum(&p, false), rat_int(1));
        assert_eq!(full_optimum(&p, true), rat(3, 2));
    }

    #[test]
    fn full_program_guard() {
        let p = params(9, 2, 3, 3, 0, 1);
        assert!(build_full_rlrc_lp(&p).is_err());
    }

    #[test]
    fn dimension_bound_is_exact() {
        assert_eq!(dimension_bound(2, &rat_int(16)), 4);
        assert_eq!(dimension_bound(2, &rat(17_317_888, 18_301)), 9); // ~946.3
        assert_eq!(dimension_bound(2, &rat(1023, 1)), 9);
        assert_eq!(dimension_bound(2, &rat(1024, 1)), 10);
        assert_eq!(dimension_bound(3, &rat(26, 1)), 2);
        assert_eq!(dimension_bound(3, &rat(27, 1)), 3);
        assert_eq!(dimension_bound(2, &rat(1, 2)), 0);
    }

    #[test]
    fn sweep_is_ordered_and_monotone() {
        let rows = bound_sweep(5, 2, 1, 1..=4, &[0, 1], &[1, 2]);
        assert_eq!(rows.len(), 16);
        let serial = bound_sweep_serial(5, 2, 1, 1..=4, &[0, 1], &[1, 2]);
        for ((p1, r1), (p2, r2)) in rows.iter().zip(&serial) {
            assert_eq!(p1, p2);
            assert_eq!(r1.as_ref().unwrap(), r2.as_ref().unwrap());
        }
        // r ascending within fixed (gamma, zeta): optimum nondecreasing.
        for gi in 0..2 {
            for zi in 0..2 {
                let mut prev = Rational::zero();
                for r in 0..4 {
                    let idx = r * 4 + gi * 2 + zi;
                    let row = rows[idx].1.as_ref().unwrap();
                    assert!(row.lp_optimum >= prev, "r must relax the program");
                    prev = row.lp_optimum.clone();
                }
            }
        }
    }

    #[test]
    fn optimum_monotone_in_each_tightening_parameter() {
        let base = params(5, 2, 2, 1, 0, 1);
        let v = optimum(&base);
        assert!(optimum(&params(5, 2, 2, 2, 0, 1)) <= v, "beta tightens");
        assert!(optimum(&params(5, 2, 2, 1, 1, 1)) <= v, "gamma tightens");
        assert!(optimum(&params(5, 2, 2, 1, 0, 2)) <= v, "zeta tightens");
    }

    fn repetition_update() -> UpdateCode {
        let rep = code_from_generator(&FieldMatrix::from_rows(2, &[vec![1, 1]]).unwrap()).unwrap();
        to_update_code(&rep).unwrap()
    }

    #[test]
    fn update_params_are_validated() {
        assert!(UpdateParams::new(2, 1, 2, 1, 1, 2, None).is_ok());
        assert!(UpdateParams::new(2, 0, 2, 1, 1, 2, None).is_err());
        assert!(UpdateParams::new(2, 1, 6, 1, 1, 2, None).is_err());
        assert!(UpdateParams::new(2, 1, 2, 2, 1, 2, None).is_err());
        assert!(UpdateParams::new(2, 1, 2, 1, 3, 2, None).is_err());
        assert!(UpdateParams::new(2, 1, 2, 1, 1, 3, None).is_err());
        assert!(UpdateParams::new(2, 1, 2, 1, 1, 2, Some((1, 1))).is_err());
        assert!(UpdateParams::new(2, 1, 2, 1, 1, 2, Some((0, 0))).is_err());
    }

    #[test]
    fn update_system_shape() {
        let p = UpdateParams::new(2, 1, 2, 1, 1, 2, None).unwrap();
        let lp = build_update_feasibility(&p).unwrap();
        assert_eq!(lp.n_vars(), 2 * 3 * 2);
    }

    #[test]
    fn repetition_parameters_are_feasible_with_the_code_witness() {
        let p = UpdateParams::new(2, 1, 2, 1, 1, 2, None).unwrap();
        match update_feasible(&p).unwrap() {
            UpdateVerdict::Feasible(w) => {
                assert!(check_assignment(&build_update_feasibility(&p).unwrap(), &w.assignment).is_ok());
            }
            UpdateVerdict::Infeasible => panic!("repetition parameters must be feasible"),
        }
        // The actual code's symmetrized profile is itself a feasible point.
        let lp = build_update_feasibility(&p).unwrap();
        let witness = [
            // a block: rows t1 = 0..=2, columns t2 = 0..=1.
            1, 0, 0, 0, 0, 1, //
            // c block.
            2, 0, 0, 2, 2, 0,
        ]
        .map(rat_int);
        assert!(check_assignment(&lp, &witness).is_ok());
    }

    #[test]
    fn beta_at_least_delta_is_infeasible() {
        let p = UpdateParams::new(5, 2, 2, 1, 3, 3, None).unwrap();
        assert_eq!(update_feasible(&p).unwrap(), UpdateVerdict::Infeasible);
        let p = UpdateParams::new(4, 2, 2, 1, 2, 1, None).unwrap();
        assert_eq!(update_feasible(&p).unwrap(), UpdateVerdict::Infeasible);
    }

    #[test]
    fn zero_update_cost_is_infeasible() {
        let p = UpdateParams::new(3, 2, 2, 1, 1, 0, None).unwrap();
        assert_eq!(update_feasible(&p).unwrap(), UpdateVerdict::Infeasible);
    }

    #[test]
    fn robust_demand_beyond_dual_mass_is_infeasible() {
        // c[2][0] can carry at most q^N - q^K mass, far below the demand.
        let p = UpdateParams::new(2, 1, 2, 1, 1, 2, Some((0, 5))).unwrap();
        assert_eq!(update_feasible(&p).unwrap(), UpdateVerdict::Infeasible);
        // The plain requirement as an explicit robust pair changes nothing.
        let p_plain = UpdateParams::new(2, 1, 2, 1, 1, 2, Some((0, 1))).unwrap();
        assert!(matches!(update_feasible(&p_plain).unwrap(), UpdateVerdict::Feasible(_)));
    }

    #[test]
    fn necessary_conditions_pass_on_the_repetition_code() {
        let u = repetition_update();
        let report = verify_necessary_conditions(&u, 1, 1, 2, &Limits::default()).unwrap();
        assert!(report.all_pass(), "failed: {:?}", report.failed());
        assert_eq!(report.checks.len(), 12);
        assert_eq!(report.checks[0].name, "dual_transform_identity");
        assert_eq!(report.checks[7].name, "empty_support_unit");
        assert_eq!(report.checks[8].name, "dual_empty_support_total");
    }

    #[test]
    fn necessary_conditions_catch_violations() {
        let u = repetition_update();
        // delta = 1: the word 111 touches 2 stored coordinates on a
        // single-symbol update.
        let report = verify_necessary_conditions(&u, 1, 1, 1, &Limits::default()).unwrap();
        assert!(!report.all_pass());
        let failed: Vec<&str> = report.failed().iter().map(|c| c.name).collect();
        assert_eq!(failed, vec!["wide_update_mass_zero"]);

        // beta = 2 hides the stored weight-2 codeword.
        let report = verify_necessary_conditions(&u, 1, 2, 2, &Limits::default()).unwrap();
        let failed: Vec<&str> = report.failed().iter().map(|c| c.name).collect();
        assert_eq!(failed, vec!["small_support_mass_zero"]);

        // r = 0 is meaningless here, but the anchor families hold for
        // any pseudo-systematic code regardless of claimed parameters.
        let report = verify_necessary_conditions(&u, 1, 0, 0, &Limits::default()).unwrap();
        assert!(report.checks.iter().find(|c| c.name == "empty_support_unit").unwrap().pass);
        assert!(report.checks.iter().find(|c| c.name == "dual_empty_support_total").unwrap().pass);
    }
}
