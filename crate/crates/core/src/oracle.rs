//! Brute-force ground truth for Pareto efficiency.
//!
//! Every function here takes the valuation matrix explicitly. Pass
//! `instance.utilities()` to audit outcomes against true utilities, or
//! `bids.matrix()` to reason the way a mechanism does, from reports only.

use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{Allocation, BidProfile, Instance, Limits, Matrix, Rational};
use crate::simplex::{self, LinearProgram, LpOutcome};

/// `u_i(π)` for every agent.
pub type UtilityVector = Vec<Rational>;

/// `a` weakly better for everyone and strictly better for someone.
pub fn vector_dominates<T: Ord>(a: &[T], b: &[T]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// The undominated vectors of `vectors`, deduplicated, in descending
/// lexicographic order.
pub fn maximal_vectors<T: Ord>(mut vectors: Vec<Vec<T>>) -> Vec<Vec<T>> {
    vectors.sort_unstable_by(|a, b| b.cmp(a));
    vectors.dedup();
    // A dominator is lexicographically larger, so it was seen earlier.
    let mut kept: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        if !kept.iter().any(|w| vector_dominates(w, &v)) {
            kept.push(v);
        }
    }
    kept
}

/// All non-wasteful allocations under `values`: each item goes to an agent
/// with a positive entry, or is discarded when its column is all zero.
/// Lexicographic by owner vector.
pub fn enumerate_by(values: &Matrix, limits: &Limits) -> Result<Vec<Allocation>> {
    let options: Vec<Vec<Option<usize>>> = (0..values.items())
        .map(|h| {
            let bidders = values.positive_agents(h);
            if bidders.is_empty() {
                vec![None]
            } else {
                bidders.into_iter().map(Some).collect()
            }
        })
        .collect();
    let count = options
        .iter()
        .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128))
        .unwrap_or(u128::MAX);
    limits.check("allocation enumeration", count)?;
    if options.is_empty() {
        return Ok(vec![Allocation::empty()]);
    }
    Ok(options
        .into_iter()
        .multi_cartesian_product()
        .map(Allocation::new)
        .collect())
}

/// Non-wasteful allocations of `instance` with respect to `bids`.
pub fn enumerate_allocations(
    instance: &Instance,
    bids: &BidProfile,
    limits: &Limits,
) -> Result<Vec<Allocation>> {
    crate::mechanisms::check_shape(instance, bids)?;
    enumerate_by(bids.matrix(), limits)
}

pub fn pareto_dominates(a: &Allocation, b: &Allocation, values: &Matrix) -> bool {
    vector_dominates(&a.utility_vector(values), &b.utility_vector(values))
}

/// An allocation that Pareto dominates `alloc`, if any; the one with the
/// largest total gain, first in canonical order among ties.
pub fn dominating_allocation(
    alloc: &Allocation,
    values: &Matrix,
    limits: &Limits,
) -> Result<Option<Allocation>> {
    let own = alloc.utility_vector(values);
    let mut best: Option<(Rational, Allocation)> = None;
    for other in enumerate_by(values, limits)? {
        let v = other.utility_vector(values);
        if vector_dominates(&v, &own) {
            let gain: Rational = v.iter().zip(&own).map(|(x, y)| x - y).sum();
            if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                best = Some((gain, other));
            }
        }
    }
    Ok(best.map(|(_, a)| a))
}

pub fn is_pep(alloc: &Allocation, values: &Matrix, limits: &Limits) -> Result<bool> {
    Ok(dominating_allocation(alloc, values, limits)?.is_none())
}

/// Every non-wasteful allocation that no other allocation Pareto dominates.
pub fn pareto_frontier(values: &Matrix, limits: &Limits) -> Result<Vec<Allocation>> {
    let allocations = enumerate_by(values, limits)?;
    match scaled_integers(values) {
        Some(rows) => Ok(frontier_of(allocations, |a| {
            let mut v = vec![0i64; rows.len()];
            for (h, owner) in a.owners().iter().enumerate() {
                if let Some(i) = owner {
                    v[*i] += rows[*i][h];
                }
            }
            v
        })),
        None => Ok(frontier_of(allocations, |a| a.utility_vector(values))),
    }
}

fn frontier_of<T, F>(allocations: Vec<Allocation>, vector: F) -> Vec<Allocation>
where
    T: Ord + Clone + std::hash::Hash,
    F: Fn(&Allocation) -> Vec<T>,
{
    let vectors: Vec<Vec<T>> = allocations.iter().map(vector).collect();
    let maxima: HashSet<Vec<T>> = maximal_vectors(vectors.clone()).into_iter().collect();
    allocations
        .into_iter()
        .zip(vectors)
        .filter(|(_, v)| maxima.contains(v))
        .map(|(a, _)| a)
        .collect()
}

/// `values` times the lcm of its denominators, when every utility sum fits
/// in an `i64`.
fn scaled_integers(values: &Matrix) -> Option<Vec<Vec<i64>>> {
    let mut lcm = BigInt::one();
    for i in 0..values.agents() {
        for v in values.row(i) {
            lcm = lcm.lcm(v.denom());
        }
    }
    let limit = BigInt::from(i64::MAX / (values.items().max(1) as i64));
    (0..values.agents())
        .map(|i| {
            values
                .row(i)
                .iter()
                .map(|v| {
                    let x = v.numer() * (&lcm / v.denom());
                    if x > limit {
                        None
                    } else {
                        x.to_i64()
                    }
                })
                .collect()
        })
        .collect()
}

/// Optimum of the ex ante improvement LP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    /// `Σ_i ε_i`: total improvement over the target.
    pub objective: Rational,
    /// Positive weights of the improving lottery, canonical order.
    pub weights: Vec<(Allocation, Rational)>,
    /// Expected own utilities under that lottery.
    pub utilities: UtilityVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeaOutcome {
    pub efficient: bool,
    pub solution: LpSolution,
}

/// Decides whether the expected utility vector `target` is Pareto efficient
/// among all lotteries over non-wasteful allocations.
///
/// Solves `max Σ ε_i` s.t. `Σ_π q_π u_i(π) - ε_i >= target_i`, `Σ q = 1`,
/// `q, ε >= 0`. The target is efficient iff the optimum is zero.
pub fn is_pea(target: &[Rational], values: &Matrix, limits: &Limits) -> Result<PeaOutcome> {
    let n = values.agents();
    if target.len() != n {
        return Err(Error::ShapeMismatch {
            expected_agents: n,
            expected_items: values.items(),
            agents: target.len(),
            items: values.items(),
        });
    }
    let allocations = enumerate_by(values, limits)?;
    let vectors: Vec<UtilityVector> = allocations
        .iter()
        .map(|a| a.utility_vector(values))
        .collect();
    let k = allocations.len();
    // columns: q_0..q_{k-1}, ε_0..ε_{n-1}, s_0..s_{n-1}
    let width = k + 2 * n;
    let mut constraints = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut row = vec![Rational::zero(); width];
        for (col, v) in vectors.iter().enumerate() {
            row[col] = v[i].clone();
        }
        row[k + i] = -Rational::one();
        row[k + n + i] = -Rational::one();
        constraints.push(row);
    }
    let mut simplex_row = vec![Rational::zero(); width];
    for entry in simplex_row.iter_mut().take(k) {
        *entry = Rational::one();
    }
    constraints.push(simplex_row);
    let mut rhs = target.to_vec();
    rhs.push(Rational::one());
    let mut objective = vec![Rational::zero(); width];
    for entry in objective.iter_mut().skip(k).take(n) {
        *entry = Rational::one();
    }
    let lp = LinearProgram {
        constraints,
        rhs,
        objective,
    };
    match simplex::solve(&lp) {
        LpOutcome::Optimal { value, point } => {
            let weights: Vec<(Allocation, Rational)> = allocations
                .into_iter()
                .zip(&point)
                .filter(|(_, q)| q.is_positive())
                .map(|(a, q)| (a, q.clone()))
                .collect();
            let mut utilities = vec![Rational::zero(); n];
            for (v, q) in vectors.iter().zip(&point) {
                if q.is_positive() {
                    for (u, x) in utilities.iter_mut().zip(v) {
                        *u += q * x;
                    }
                }
            }
            Ok(PeaOutcome {
                efficient: value.is_zero(),
                solution: LpSolution {
                    objective: value,
                    weights,
                    utilities,
                },
            })
        }
        LpOutcome::Infeasible => Err(Error::Infeasible(
            "target utilities are not achievable by any lottery over allocations".into(),
        )),
        LpOutcome::Unbounded => unreachable!("improvements are bounded by total utility"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    fn pi(owners: &[usize]) -> Allocation {
        Allocation::from_owners(owners)
    }

    fn ex1() -> Instance {
        Instance::from_integers(&[vec![1, 2], vec![2, 1]]).unwrap()
    }

    #[test]
    fn integer_and_rational_frontiers_agree() {
        let huge = Rational::from_integer(BigInt::from(i64::MAX)) * int(4);
        let matrices = [
            Matrix::new(vec![
                vec![ratio(1, 3), ratio(1, 2), int(0)],
                vec![ratio(1, 6), ratio(2, 3), ratio(5, 7)],
                vec![int(0), ratio(1, 2), ratio(1, 7)],
            ])
            .unwrap(),
            Matrix::new(vec![vec![huge.clone(), int(1)], vec![int(1), huge]]).unwrap(),
        ];
        for values in &matrices {
            let all = enumerate_by(values, &Limits::default()).unwrap();
            let exact = frontier_of(all, |a| a.utility_vector(values));
            assert_eq!(pareto_frontier(values, &Limits::default()).unwrap(), exact);
        }
        assert!(scaled_integers(&matrices[0]).is_some());
        assert!(scaled_integers(&matrices[1]).is_none());
    }

    fn ex3() -> Instance {
        Instance::from_integers(&[vec![1, 4], vec![2, 3]]).unwrap()
    }

    #[test]
    fn enumeration() {
        let inst = ex1();
        let all = enumerate_allocations(&inst, &inst.sincere_bids(), &Limits::default()).unwrap();
        assert_eq!(
            all,
            vec![pi(&[0, 0]), pi(&[0, 1]), pi(&[1, 0]), pi(&[1, 1])]
        );

        let empty = Instance::from_integers(&[vec![], vec![]]).unwrap();
        assert_eq!(
            enumerate_by(empty.utilities(), &Limits::default()).unwrap(),
            vec![Allocation::empty()]
        );

        let ex2 = Instance::from_integers(&[vec![1, 1], vec![0, 1]]).unwrap();
        let all = enumerate_by(ex2.utilities(), &Limits::default()).unwrap();
        assert_eq!(all, vec![pi(&[0, 0]), pi(&[0, 1])]);

        let zero = Matrix::from_integers(&[vec![0, 1], vec![0, 1]]).unwrap();
        let all = enumerate_by(&zero, &Limits::default()).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|a| a.owner(0).is_none()));

        assert!(enumerate_by(ex1().utilities(), &Limits::new(3)).is_err());
    }

    #[test]
    fn dominance() {
        let u = ex1();
        assert!(pareto_dominates(&pi(&[1, 0]), &pi(&[0, 1]), u.utilities()));
        assert!(!pareto_dominates(&pi(&[1, 0]), &pi(&[1, 0]), u.utilities()));
        let u3 = ex3();
        assert!(!pareto_dominates(
            &pi(&[1, 0]),
            &pi(&[0, 1]),
            u3.utilities()
        ));
    }

    #[test]
    fn pep_and_frontier() {
        let limits = Limits::default();
        let u = ex1();
        assert!(!is_pep(&pi(&[0, 1]), u.utilities(), &limits).unwrap());
        assert_eq!(
            dominating_allocation(&pi(&[0, 1]), u.utilities(), &limits).unwrap(),
            Some(pi(&[1, 0]))
        );
        assert!(is_pep(&pi(&[0, 0]), u.utilities(), &limits).unwrap());
        assert_eq!(
            pareto_frontier(u.utilities(), &limits).unwrap(),
            vec![pi(&[0, 0]), pi(&[1, 0]), pi(&[1, 1])]
        );

        let u3 = ex3();
        assert!(is_pep(&pi(&[0, 1]), u3.utilities(), &limits).unwrap());
        // (5,0), (1,3), (4,2), (0,5): nothing dominates anything
        assert_eq!(pareto_frontier(u3.utilities(), &limits).unwrap().len(), 4);

        let same = Instance::from_integers(&[vec![1, 2, 3], vec![1, 2, 3]]).unwrap();
        assert_eq!(pareto_frontier(same.utilities(), &limits).unwrap().len(), 8);
    }

    #[test]
    fn maximal_vectors_keeps_ties() {
        let v = |xs: &[i64]| xs.iter().map(|&x| int(x)).collect::<Vec<_>>();
        let out = maximal_vectors(vec![
            v(&[1, 1]),
            v(&[2, 2]),
            v(&[3, 0]),
            v(&[2, 2]),
            v(&[0, 3]),
        ]);
        assert_eq!(out, vec![v(&[3, 0]), v(&[2, 2]), v(&[0, 3])]);
    }

    #[test]
    fn pea_examples() {
        let limits = Limits::default();
        let u = ex1();
        let half = ratio(3, 2);
        let out = is_pea(&[half.clone(), half], u.utilities(), &limits).unwrap();
        assert!(!out.efficient);
        assert_eq!(out.solution.objective, int(1));
        assert_eq!(out.solution.utilities, vec![int(2), int(2)]);
        assert_eq!(out.solution.weights, vec![(pi(&[1, 0]), int(1))]);

        assert!(
            is_pea(&[int(3), int(0)], u.utilities(), &limits)
                .unwrap()
                .efficient
        );
        assert!(
            is_pea(&[int(2), int(2)], u.utilities(), &limits)
                .unwrap()
                .efficient
        );

        let single = Instance::from_integers(&[vec![2, 5]]).unwrap();
        assert!(
            is_pea(&[int(7)], single.utilities(), &limits)
                .unwrap()
                .efficient
        );

        assert!(matches!(
            is_pea(&[int(3), int(3)], u.utilities(), &limits),
            Err(Error::Infeasible(_))
        ));
    }
}
