//! The covering integer program
//!
//! ```text
//! minimize   w·x
//! subject to x(U) >= |∩_{i∈E\U} B_i|   for every nonempty proper U ⊂ E
//! ```
//!
//! solved exactly through submodular minimization. For a fixed total
//! `x(E) = M` the program is solved by fixing coordinates one at a time in
//! order of decreasing weight, each by one minimization, followed by one
//! feasibility check. The optimal cost is convex in `M`, which lets the
//! unconstrained program be solved by binary search over `M`.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lp::{rational, ExactLp};
use crate::sfm::{sfm_min, FnSetFunction};
use crate::subset::{Subset, MAX_GROUND};

/// Ground sets up to this size get a full table of intersection sizes.
const TABLE_LIMIT: usize = 16;

/// Constraint data `B_1..B_n` and weights `w`.
///
/// Elements of the `B_i` are summarized by signature: the set of indices
/// `i` with the element in `B_i`. Then `|∩_{i∈U} B_i|` is the number of
/// elements whose signature contains `U`.
#[derive(Clone, Debug)]
pub struct CoveringProblem {
    n: usize,
    weights: Vec<u64>,
    /// (signature, element count), signatures distinct and nonempty.
    signatures: Vec<(Subset, u64)>,
    universe: u64,
    /// `table[U] = |∩_{i∈U} B_i|` for small ground sets.
    table: Option<Vec<u64>>,
}

impl CoveringProblem {
    /// Builds the problem from explicit sets of element ids.
    pub fn new(sets: &[Vec<usize>], weights: Vec<u64>) -> Result<Self> {
        let mut sig: BTreeMap<usize, Subset> = BTreeMap::new();
        for (i, set) in sets.iter().enumerate() {
            if i >= MAX_GROUND {
                return Err(Error::TooLarge {
                    what: "ground set size",
                    value: sets.len(),
                    limit: MAX_GROUND,
                });
            }
            for &e in set {
                let s = sig.entry(e).or_default();
                *s = s.with(i);
            }
        }
        let mut counts: BTreeMap<Subset, u64> = BTreeMap::new();
        for s in sig.into_values() {
            *counts.entry(s).or_default() += 1;
        }
        Self::from_signatures(sets.len(), counts.into_iter().collect(), weights)
    }

    pub fn unweighted(sets: &[Vec<usize>]) -> Result<Self> {
        Self::new(sets, vec![1; sets.len()])
    }

    /// Builds the problem from element signatures and their multiplicities.
    pub fn from_signatures(n: usize, signatures: Vec<(Subset, u64)>, weights: Vec<u64>) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::TooLarge {
                what: "ground set size",
                value: n,
                limit: MAX_GROUND,
            });
        }
        if weights.len() != n {
            return Err(Error::Dimension(format!(
                "{} weights for {n} sets",
                weights.len()
            )));
        }
        let full = Subset::full(n);
        let mut merged: BTreeMap<Subset, u64> = BTreeMap::new();
        for (s, c) in signatures {
            if !s.is_subset_of(full) {
                return Err(Error::InvalidParameter(format!(
                    "signature {s:?} outside ground set of size {n}"
                )));
            }
            if !s.is_empty() && c > 0 {
                *merged.entry(s).or_default() += c;
            }
        }
        let signatures: Vec<(Subset, u64)> = merged.into_iter().collect();
        let universe = signatures.iter().map(|&(_, c)| c).sum();
        let table = (n <= TABLE_LIMIT).then(|| {
            // superset sums over the subset lattice
            let mut t = vec![0u64; 1 << n];
            for &(s, c) in &signatures {
                t[s.bits() as usize] += c;
            }
            for bit in 0..n {
                for mask in 0..1usize << n {
                    if mask >> bit & 1 == 0 {
                        t[mask] += t[mask | 1 << bit];
                    }
                }
            }
            t
        });
        Ok(CoveringProblem {
            n,
            weights,
            signatures,
            universe,
            table,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn signatures(&self) -> &[(Subset, u64)] {
        &self.signatures
    }

    /// `|∪_i B_i|`.
    pub fn universe(&self) -> u64 {
        self.universe
    }

    /// `|∩_{i∈U} B_i|`; the empty intersection is taken as the union.
    pub fn common(&self, u: Subset) -> u64 {
        match &self.table {
            Some(t) => t[u.bits() as usize],
            None => self
                .signatures
                .iter()
                .filter(|(s, _)| u.is_subset_of(*s))
                .map(|&(_, c)| c)
                .sum(),
        }
    }

    /// `|∩_{i∈E} B_i|`.
    pub fn shared(&self) -> u64 {
        if self.n == 0 {
            0
        } else {
            self.common(Subset::full(self.n))
        }
    }

    pub fn set_size(&self, i: usize) -> u64 {
        self.common(Subset::singleton(i))
    }

    /// Right-hand side of the constraint for `U`: `|∩_{i∈E\U} B_i|`.
    pub fn demand(&self, u: Subset) -> u64 {
        self.common(u.complement(self.n))
    }

    pub fn cost(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.weights).map(|(a, b)| a * b).sum()
    }

    /// Checks every constraint directly.
    pub fn is_feasible_point(&self, x: &[u64]) -> Result<bool> {
        if self.n > 20 {
            return Err(Error::TooLarge {
                what: "ground set size for direct constraint check",
                value: self.n,
                limit: 20,
            });
        }
        let full = Subset::full(self.n);
        Ok(full.subsets().all(|u| {
            u.is_empty() || u == full || u.iter().map(|i| x[i]).sum::<u64>() >= self.demand(u)
        }))
    }

    /// Elements sorted by descending weight, ties by ascending index.
    pub fn weight_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| self.weights[b].cmp(&self.weights[a]).then(a.cmp(&b)));
        order
    }
}

/// `f(U) = M - |∩_{i∈U} B_i| - x(U)`, with `f(E) = 0`.
pub struct CrossingOracle<'a> {
    problem: &'a CoveringProblem,
    x: &'a [i64],
    m: i64,
}

impl<'a> CrossingOracle<'a> {
    pub fn new(problem: &'a CoveringProblem, x: &'a [i64], m: i64) -> Self {
        assert_eq!(x.len(), problem.n);
        CrossingOracle { problem, x, m }
    }

    pub fn eval(&self, u: Subset) -> i64 {
        if u == Subset::full(self.problem.n) {
            return 0;
        }
        self.m - self.problem.common(u) as i64 - u.iter().map(|i| self.x[i]).sum::<i64>()
    }
}

/// Minimum of `f(U + anchor)` over `U ⊆ ground` (`ground` given as a list).
fn anchored_min(problem: &CoveringProblem, x: &[i64], m: i64, anchor: usize, ground: &[usize]) -> Result<i64> {
    let f = CrossingOracle::new(problem, x, m);
    let g = FnSetFunction::new(ground.len(), |local: Subset| {
        let u = local
            .iter()
            .fold(Subset::singleton(anchor), |acc, l| acc.with(ground[l]));
        f.eval(u)
    });
    Ok(sfm_min(&g)?.value)
}

/// Fixes `x` coordinate by coordinate from the lightest element up; the
/// heaviest element takes the slack `M - Σ others`.
pub fn compute_potential_x(problem: &CoveringProblem, m: u64) -> Result<Vec<i64>> {
    let n = problem.n;
    let mut x = vec![0i64; n];
    if n == 0 {
        return Ok(x);
    }
    let order = problem.weight_order();
    for p in (1..n).rev() {
        x[order[p]] = anchored_min(problem, &x, m as i64, order[p], &order[p..])?;
    }
    let rest: i64 = x.iter().sum();
    x[order[0]] = m as i64 - rest;
    Ok(x)
}

/// Whether `f(U) >= 0` for every proper `U` containing the heaviest element.
///
/// With `f(E) = 0` a single minimization over all sets containing the
/// anchor suffices, but that value keeps `f` submodular only when no element
/// lies in every `B_i`. Otherwise each proper superset of the anchor misses
/// some `j`, and one minimization per excluded `j` covers them all.
pub fn check_feasible(problem: &CoveringProblem, x: &[i64], m: u64) -> Result<bool> {
    if problem.n == 0 {
        return Ok(m == 0);
    }
    let order = problem.weight_order();
    let anchor = order[0];
    if problem.common(Subset::full(problem.n)) == 0 {
        return Ok(anchored_min(problem, x, m as i64, anchor, &order)? >= 0);
    }
    for &j in &order[1..] {
        let ground: Vec<usize> = order.iter().copied().filter(|&e| e != j).collect();
        if anchored_min(problem, x, m as i64, anchor, &ground)? < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Optimal `x` with `x(E) = M`, or `None` when no feasible `x` sums to `M`.
///
/// The coordinate-wise construction needs `∩_{i∈E} B_i = ∅`, which always
/// holds for data exchange since every packet is held somewhere. Problems
/// with shared elements are solved as exact linear programs instead; their
/// constraint systems are integral, so the optimal vertex is integral.
pub fn solve_ilp_equality(problem: &CoveringProblem, m: u64) -> Result<Option<Vec<u64>>> {
    if problem.n <= 1 {
        // no constraints apply
        return Ok(match problem.n {
            0 => (m == 0).then(Vec::new),
            _ => Some(vec![m]),
        });
    }
    if problem.shared() > 0 {
        return solve_equality_lp(problem, m);
    }
    let x = compute_potential_x(problem, m)?;
    if !check_feasible(problem, &x, m)? {
        return Ok(None);
    }
    // feasibility forces x_i >= |∩_{j≠i} B_j| >= 0
    Ok(Some(x.into_iter().map(|v| v as u64).collect()))
}

fn solve_equality_lp(problem: &CoveringProblem, m: u64) -> Result<Option<Vec<u64>>> {
    let objective = problem.weights.iter().map(|&w| rational(w as i64)).collect();
    let mut lp = constraint_system(problem, ExactLp::new(objective)?)?;
    let all = 0..problem.n;
    lp.add_covering_row(all.clone(), m as i64)?;
    lp.add_row(all.map(|i| (i, rational(-1))).collect(), rational(-(m as i64)))?;
    let sol = match lp.solve() {
        Ok(sol) => sol,
        Err(Error::LpInfeasible) => return Ok(None),
        Err(e) => return Err(e),
    };
    sol.x
        .iter()
        .map(|v| {
            if v.is_integer() {
                v.to_integer().to_u64().ok_or_else(|| Error::Lp("entry out of range".into()))
            } else {
                Err(Error::PropertyViolation(format!("optimal vertex has fractional entry {v}")))
            }
        })
        .collect::<Result<Vec<u64>>>()
        .map(Some)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpSolution {
    pub x: Vec<u64>,
    /// `x(E)`.
    pub total: u64,
    /// `w·x`.
    pub cost: u64,
}

/// Optimal solution of the program without an equality constraint.
pub fn solve_ilp(problem: &CoveringProblem) -> Result<IlpSolution> {
    let n = problem.n;
    if n <= 1 {
        return Ok(IlpSolution {
            x: vec![0; n],
            total: 0,
            cost: 0,
        });
    }
    let mut cache: HashMap<u64, Option<Vec<u64>>> = HashMap::new();
    let mut eval = |m: u64| -> Result<Option<Vec<u64>>> {
        if let Some(v) = cache.get(&m) {
            return Ok(v.clone());
        }
        let v = solve_ilp_equality(problem, m)?;
        cache.insert(m, v.clone());
        Ok(v)
    };

    let mut lo = (0..n).map(|i| problem.set_size(i)).max().unwrap_or(0);
    // every x_i = |∪B| is feasible
    let top = n as u64 * problem.universe();
    let mut hi = top;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if eval(mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let least = lo;
    let uniform = problem.weights.windows(2).all(|w| w[0] == w[1]);
    let best_m = if uniform {
        least
    } else {
        // smallest M whose forward difference is nonnegative
        let cost_at = |x: Option<Vec<u64>>| x.map(|x| problem.cost(&x)).expect("feasible above least M");
        let (mut a, mut b) = (least, top);
        while a < b {
            let mid = a + (b - a) / 2;
            let here = cost_at(eval(mid)?);
            let next = cost_at(eval(mid + 1)?);
            if next >= here {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        a
    };
    let x = eval(best_m)?.expect("feasible above least M");
    Ok(IlpSolution {
        total: x.iter().sum(),
        cost: problem.cost(&x),
        x,
    })
}

/// The linear relaxation with unit costs over the same constraints.
pub fn relaxation(problem: &CoveringProblem) -> Result<ExactLp> {
    constraint_system(problem, ExactLp::unit_cost(problem.n))
}

/// Adds one row per nonempty proper `U` with positive demand.
fn constraint_system(problem: &CoveringProblem, mut lp: ExactLp) -> Result<ExactLp> {
    let n = problem.n;
    if n > TABLE_LIMIT {
        return Err(Error::TooLarge {
            what: "ground set size for the linear relaxation",
            value: n,
            limit: TABLE_LIMIT,
        });
    }
    let full = Subset::full(n);
    for u in full.subsets() {
        if u.is_empty() || u == full {
            continue;
        }
        let demand = problem.demand(u);
        if demand > 0 {
            lp.add_covering_row(u.iter(), demand as i64)?;
        }
    }
    Ok(lp)
}

/// Unit-cost integer optimum and linear-relaxation optimum; fails if they
/// differ by 1 or more, which the theory rules out.
pub fn lp_gap_check(problem: &CoveringProblem) -> Result<(u64, BigRational)> {
    let unit = CoveringProblem {
        weights: vec![1; problem.n],
        ..problem.clone()
    };
    let ilp = solve_ilp(&unit)?.total;
    let lp = relaxation(problem)?.solve()?.value;
    if rational(ilp as i64) - &lp >= rational(1) {
        return Err(Error::PropertyViolation(format!(
            "integer optimum {ilp} exceeds relaxation {} by 1 or more",
            lp.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok((ilp, lp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_ilp, brute_force_ilp_equality, random_covering_problem};
    use num_bigint::BigInt;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// B_i = {p_i}: each of three nodes misses one distinct packet.
    fn triangle() -> CoveringProblem {
        CoveringProblem::unweighted(&[vec![0], vec![1], vec![2]]).unwrap()
    }

    #[test]
    fn potential_for_triangle() {
        let p = triangle();
        assert_eq!(compute_potential_x(&p, 2).unwrap(), vec![0, 1, 1]);
        assert!(check_feasible(&p, &[0, 1, 1], 2).unwrap());
        assert!(!check_feasible(&p, &[2, 0, 0], 2).unwrap());
    }

    #[test]
    fn heavy_anchor_violation() {
        // f({1}) = 2 - 1 - 2 = -1
        let p = triangle();
        let f = CrossingOracle::new(&p, &[2, 0, 0], 2);
        assert_eq!(f.eval(Subset::singleton(0)), -1);
    }

    #[test]
    fn triangle_equality_levels() {
        let p = triangle();
        assert_eq!(solve_ilp_equality(&p, 1).unwrap(), None);
        let x = solve_ilp_equality(&p, 2).unwrap().unwrap();
        assert_eq!(x.iter().sum::<u64>(), 2);
        assert!(p.is_feasible_point(&x).unwrap());
        assert_eq!(solve_ilp(&p).unwrap().total, 2);
    }

    #[test]
    fn empty_sets_need_nothing() {
        let p = CoveringProblem::unweighted(&[vec![], vec![], vec![]]).unwrap();
        assert_eq!(compute_potential_x(&p, 0).unwrap(), vec![0, 0, 0]);
        assert_eq!(solve_ilp(&p).unwrap().total, 0);
        let (ilp, lp) = lp_gap_check(&p).unwrap();
        assert_eq!(ilp, 0);
        assert!(lp.is_zero());
    }

    #[test]
    fn two_elements_sharing_one_item() {
        let p = CoveringProblem::unweighted(&[vec![7], vec![7]]).unwrap();
        assert_eq!(compute_potential_x(&p, 1).unwrap(), vec![1, 0]);
        // x_2 >= |B_1| and x_1 >= |B_2| force M >= 2
        assert!(!check_feasible(&p, &[1, 0], 1).unwrap());
        assert_eq!(solve_ilp(&p).unwrap().total, 2);
    }

    #[test]
    fn level_below_largest_set_is_infeasible() {
        let p = CoveringProblem::unweighted(&[vec![0, 1, 2], vec![], vec![0]]).unwrap();
        for m in 0..3 {
            assert_eq!(solve_ilp_equality(&p, m).unwrap(), None);
        }
    }

    #[test]
    fn line_holdings_on_a_clique() {
        // Holdings of the 3-node line with every pair adjacent: the two end
        // nodes each send their packet once.
        let p = CoveringProblem::unweighted(&[vec![2], vec![1, 2], vec![1]]).unwrap();
        let sol = solve_ilp(&p).unwrap();
        assert_eq!(sol.total, 2);
        assert_eq!(sol.x, vec![1, 0, 1]);
        assert_eq!(brute_force_ilp(&p).0, 2);
    }

    #[test]
    fn potential_misses_feasible_points_when_an_element_is_shared() {
        // x_i >= 1 for every i is the whole story, so M = 3 is feasible, but
        // the coordinate-wise construction never finds it.
        let p = CoveringProblem::unweighted(&[vec![0], vec![0], vec![0]]).unwrap();
        for m in 3..8 {
            let x = compute_potential_x(&p, m).unwrap();
            assert!(!check_feasible(&p, &x, m).unwrap());
        }
        assert_eq!(solve_ilp(&p).unwrap().x, vec![1, 1, 1]);
    }

    #[test]
    fn element_in_every_set() {
        let p = CoveringProblem::new(&[vec![2], vec![0, 1, 2], vec![1, 3], vec![1, 2, 3]], vec![4, 6, 2, 6])
            .unwrap();
        for m in 0..=8 {
            let got = solve_ilp_equality(&p, m).unwrap().map(|x| p.cost(&x));
            assert_eq!(got, brute_force_ilp_equality(&p, m).map(|(c, _)| c), "M={m}");
        }
    }

    #[test]
    fn weights_move_transmissions_off_expensive_node() {
        let p = CoveringProblem::new(&[vec![0], vec![1], vec![2]], vec![10, 1, 1]).unwrap();
        let sol = solve_ilp(&p).unwrap();
        assert_eq!(sol.x[0], 0);
        assert_eq!(sol.cost, brute_force_ilp(&p).0);
    }

    #[test]
    fn triangle_relaxation_gap() {
        let (ilp, lp) = lp_gap_check(&triangle()).unwrap();
        assert_eq!(ilp, 2);
        assert_eq!(lp, BigRational::new(BigInt::from(3), BigInt::from(2)));
    }

    #[test]
    fn equality_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..150 {
            let weighted = rng.gen_bool(0.5);
            let p = random_covering_problem(&mut rng, 5, 4, weighted);
            for m in 0..=8 {
                let got = solve_ilp_equality(&p, m).unwrap();
                let want = brute_force_ilp_equality(&p, m);
                match (&got, &want) {
                    (None, None) => {}
                    (Some(x), Some((cost, _))) => {
                        assert!(p.is_feasible_point(x).unwrap());
                        assert_eq!(x.iter().sum::<u64>(), m);
                        assert_eq!(p.cost(x), *cost, "{p:?} M={m}");
                    }
                    _ => panic!("{p:?} M={m}: got {got:?}, want {want:?}"),
                }
            }
        }
    }

    #[test]
    fn crossing_submodularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let p = random_covering_problem(&mut rng, 6, 4, false);
            let n = p.n();
            if n < 3 {
                continue;
            }
            let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=5)).collect();
            let f = CrossingOracle::new(&p, &x, rng.gen_range(0..10));
            let full = Subset::full(n);
            let mut checked = 0;
            while checked < 500 {
                let a = Subset::from_bits(rng.gen::<u64>() & full.bits());
                let b = Subset::from_bits(rng.gen::<u64>() & full.bits());
                if !a.intersects(b) || a | b == full {
                    continue;
                }
                assert!(f.eval(a) + f.eval(b) >= f.eval(a & b) + f.eval(a | b));
                checked += 1;
            }
        }
    }

    #[test]
    fn cost_is_convex_in_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let p = random_covering_problem(&mut rng, 5, 4, true);
            let costs: Vec<Option<u64>> = (0..=12)
                .map(|m| solve_ilp_equality(&p, m).unwrap().map(|x| p.cost(&x)))
                .collect();
            for w in costs.windows(3) {
                if let [Some(a), Some(b), Some(c)] = w {
                    assert!(a + c >= 2 * b, "{p:?}: {costs:?}");
                }
            }
        }
    }

    #[test]
    fn signature_table_matches_scan() {
        let sets: Vec<Vec<usize>> = (0..18).map(|i| (0..30).filter(|e| (e * 7 + i) % 5 < 2).collect()).collect();
        let big = CoveringProblem::unweighted(&sets).unwrap();
        let small = CoveringProblem::unweighted(&sets[..6]).unwrap();
        for u in Subset::full(6).subsets() {
            let scan = (0..30)
                .filter(|e| u.iter().all(|i| sets[i].contains(e)))
                .count() as u64;
            if !u.is_empty() {
                assert_eq!(small.common(u), scan);
                assert_eq!(big.common(u), scan);
            }
        }
    }
}
