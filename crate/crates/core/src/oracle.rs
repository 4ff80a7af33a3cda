//! Exhaustive reference solvers used to validate the fast algorithms, both
//! in tests and in validation campaigns.

use rand::Rng;

use crate::ilp::CoveringProblem;
use crate::sfm::SetFunction;
use crate::subset::Subset;

/// Minimum over all `2^n` subsets; ties keep the first set in increasing
/// bit order.
pub fn brute_force_min<G: SetFunction + ?Sized>(g: &G) -> (i64, Subset) {
    let mut best = (g.eval(Subset::EMPTY), Subset::EMPTY);
    for s in Subset::full(g.ground_size()).subsets().skip(1) {
        let v = g.eval(s);
        if v < best.0 {
            best = (v, s);
        }
    }
    best
}

/// Calls `visit` on every vector of `n` entries in `0..=cap`.
fn for_each_vector(n: usize, cap: u64, mut visit: impl FnMut(&[u64])) {
    let mut x = vec![0u64; n];
    loop {
        visit(&x);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if x[i] < cap {
                x[i] += 1;
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Cheapest feasible `x` with `x(E) = M`, by enumerating every nonnegative
/// integer vector with entries at most `M`.
pub fn brute_force_ilp_equality(problem: &CoveringProblem, m: u64) -> Option<(u64, Vec<u64>)> {
    let mut best: Option<(u64, Vec<u64>)> = None;
    for_each_vector(problem.n(), m, |x| {
        if x.iter().sum::<u64>() != m {
            return;
        }
        if !problem.is_feasible_point(x).expect("small problem") {
            return;
        }
        let c = problem.cost(x);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, x.to_vec()));
        }
    });
    best
}

/// Cheapest feasible `x`; entries above `|∪B|` never help, so they are
/// the enumeration bound.
pub fn brute_force_ilp(problem: &CoveringProblem) -> (u64, Vec<u64>) {
    let cap = problem.universe();
    let mut best: Option<(u64, Vec<u64>)> = None;
    for_each_vector(problem.n(), cap, |x| {
        if problem.n() >= 2 && !problem.is_feasible_point(x).expect("small problem") {
            return;
        }
        let c = problem.cost(x);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, x.to_vec()));
        }
    });
    best.expect("x_i = |∪B| is always feasible")
}

/// `n` in `1..=max_n` sets, each a random subset of size at most
/// `max_set` drawn from a pool of `max_set + 2` elements. Weights are in
/// `0..=10` when `weighted`, else all 1.
pub fn random_covering_problem<R: Rng + ?Sized>(
    rng: &mut R,
    max_n: usize,
    max_set: usize,
    weighted: bool,
) -> CoveringProblem {
    let n = rng.gen_range(1..=max_n);
    let pool = max_set + 2;
    let sets: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let size = rng.gen_range(0..=max_set);
            let mut elems: Vec<usize> = (0..pool).collect();
            rand::seq::SliceRandom::shuffle(elems.as_mut_slice(), rng);
            elems.truncate(size);
            elems.sort_unstable();
            elems
        })
        .collect();
    let weights = (0..n)
        .map(|_| if weighted { rng.gen_range(0..=10) } else { 1 })
        .collect();
    CoveringProblem::new(&sets, weights).expect("valid random problem")
}
