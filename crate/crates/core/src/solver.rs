//! Problem-level solvers: the exact optimum on fully connected networks,
//! exhaustive search on tiny general networks, LP lower bounds, and the
//! normalized optimum when packets split into chunks.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityChecker, ScheduleFile, TransmissionSchedule};
use crate::ilp::{solve_ilp, CoveringProblem};
use crate::instance::{boundary, NetworkInstance};
use crate::lp::{rational, ExactLp, LpSolution};
use crate::subset::Subset;

pub const EXHAUSTIVE_NODE_LIMIT: usize = 4;
pub const EXHAUSTIVE_PACKET_LIMIT: usize = 4;
pub const EXHAUSTIVE_ROUND_LIMIT: usize = 3;
pub const EXHAUSTIVE_CAP_LIMIT: u64 = 3;
/// The cut-set LP has `2^n - 2` rows.
pub const CUTSET_NODE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Clique,
    WeightedClique,
    Exhaustive,
    LpCutset,
    LpDregular,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Bounds {
    pub clique_estimate: Option<u64>,
    #[serde(serialize_with = "opt_ratio")]
    pub lp_cutset: Option<BigRational>,
    #[serde(serialize_with = "opt_ratio")]
    pub lp_dregular: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: Method,
    /// Transmissions per packet: `total / chunks`.
    #[serde(serialize_with = "ratio")]
    pub value: BigRational,
    /// Chunks per packet; 1 unless solved through a chunked instance.
    pub chunks: usize,
    /// Chunk transmissions in `schedule`.
    pub total: Option<u64>,
    /// `Σ w_i · (transmissions of i)` for weighted solves.
    pub weighted_cost: Option<u64>,
    #[serde(serialize_with = "opt_schedule")]
    pub schedule: Option<TransmissionSchedule>,
    pub bounds: Bounds,
    pub elapsed_ms: f64,
}

impl SolveReport {
    fn new(method: Method, value: BigRational, start: Instant) -> Self {
        SolveReport {
            method,
            value,
            chunks: 1,
            total: None,
            weighted_cost: None,
            schedule: None,
            bounds: Bounds::default(),
            elapsed_ms: 0.0,
        }
        .finish(start)
    }

    fn finish(mut self, start: Instant) -> Self {
        self.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    /// Fills whichever bounds apply to `inst` and are cheap enough.
    pub fn with_bounds(mut self, inst: &NetworkInstance) -> Result<Self> {
        if inst.is_complete() {
            self.bounds.clique_estimate = Some(clique_estimate(inst));
        }
        if inst.n() <= 10 {
            self.bounds.lp_cutset = Some(lp_cutset(inst)?.value);
        }
        self.bounds.lp_dregular = Some(lp_dregular(inst)?.value);
        Ok(self)
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

fn ratio<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn opt_ratio<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ratio(v, s),
        None => s.serialize_none(),
    }
}

fn opt_schedule<S: Serializer>(
    v: &Option<TransmissionSchedule>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(ScheduleFile::from).serialize(s)
}

fn require_complete(inst: &NetworkInstance) -> Result<()> {
    if inst.is_complete() {
        Ok(())
    } else {
        Err(Error::NotFullyConnected)
    }
}

/// The covering program of a fully connected network: `B_i` is the set of
/// packets node `i` misses, so each packet's signature is the complement of
/// its holder set.
pub fn clique_problem(inst: &NetworkInstance, weights: Vec<u64>) -> Result<CoveringProblem> {
    let n = inst.n();
    let signatures = inst
        .holder_profile()
        .into_iter()
        .map(|(holders, count)| (holders.complement(n), count as u64))
        .collect();
    CoveringProblem::from_signatures(n, signatures, weights)
}

fn certify(inst: &NetworkInstance, sched: &TransmissionSchedule) -> Result<()> {
    if FeasibilityChecker::new(inst, sched.rounds())?.is_feasible(sched)? {
        Ok(())
    } else {
        Err(Error::PropertyViolation(format!(
            "solver produced a schedule that does not permit recovery: {:?}",
            sched.rows()
        )))
    }
}

fn clique_report(inst: &NetworkInstance, weights: Vec<u64>, method: Method) -> Result<SolveReport> {
    require_complete(inst)?;
    let start = Instant::now();
    let problem = clique_problem(inst, weights)?;
    let sol = solve_ilp(&problem)?;
    let sched = TransmissionSchedule::single_round(&sol.x);
    certify(inst, &sched)?;
    let mut report = SolveReport::new(method, rational(sol.total as i64), start);
    report.total = Some(sol.total);
    if method == Method::WeightedClique {
        report.weighted_cost = Some(sol.cost);
    }
    report.schedule = Some(sched);
    report.bounds.clique_estimate = Some(clique_estimate(inst));
    Ok(report.finish(start))
}

/// Minimum number of transmissions on a fully connected network, with a
/// certified single-round schedule.
pub fn solve_clique(inst: &NetworkInstance) -> Result<SolveReport> {
    clique_report(inst, vec![1; inst.n()], Method::Clique)
}

/// Minimizes `Σ w_i · (transmissions of i)` on a fully connected network.
pub fn solve_weighted_clique(inst: &NetworkInstance, weights: &[u64]) -> Result<SolveReport> {
    if weights.len() != inst.n() {
        return Err(Error::Dimension(format!(
            "{} weights for {} nodes",
            weights.len(),
            inst.n()
        )));
    }
    clique_report(inst, weights.to_vec(), Method::WeightedClique)
}

/// `⌈Σ_i |P_i^c| / (n - 1)⌉`. Exact with high probability on large random
/// instances, but only an estimate in general.
pub fn clique_estimate(inst: &NetworkInstance) -> u64 {
    let n = inst.n() as u64;
    if n < 2 {
        return 0;
    }
    let missing: u64 = (0..inst.n()).map(|i| inst.missing_count(i) as u64).sum();
    missing.div_ceil(n - 1)
}

fn guard(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value > limit {
        Err(Error::TooLarge { what, value, limit })
    } else {
        Ok(())
    }
}

/// Visits vectors of `len` entries in `0..=cap` summing to `total`, in
/// lexicographic order, until `visit` returns `Some`.
fn find_composition<T>(
    len: usize,
    total: u64,
    cap: u64,
    visit: &mut impl FnMut(&[u64]) -> Result<Option<T>>,
) -> Result<Option<T>> {
    fn go<T>(
        v: &mut Vec<u64>,
        len: usize,
        left: u64,
        cap: u64,
        visit: &mut impl FnMut(&[u64]) -> Result<Option<T>>,
    ) -> Result<Option<T>> {
        let slots = (len - v.len()) as u64;
        if slots == 0 {
            return if left == 0 { visit(v) } else { Ok(None) };
        }
        if left > slots * cap {
            return Ok(None);
        }
        for e in 0..=cap.min(left) {
            v.push(e);
            let found = go(v, len, left - e, cap, visit)?;
            v.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
    go(&mut Vec::with_capacity(len), len, total, cap, visit)
}

/// Least total over schedules with `r` rounds and entries at most `cap`,
/// found by certifying schedules in order of increasing total. Fails with
/// [`Error::InfeasibleSchedule`] when no such schedule permits recovery.
pub fn solve_exhaustive(inst: &NetworkInstance, r: usize, cap: u64) -> Result<SolveReport> {
    guard("node count for exhaustive search", inst.n(), EXHAUSTIVE_NODE_LIMIT)?;
    guard("packet count for exhaustive search", inst.k(), EXHAUSTIVE_PACKET_LIMIT)?;
    guard("round count for exhaustive search", r, EXHAUSTIVE_ROUND_LIMIT)?;
    guard("per-entry cap for exhaustive search", cap as usize, EXHAUSTIVE_CAP_LIMIT as usize)?;
    if r == 0 {
        return Err(Error::InvalidParameter("exhaustive search needs r >= 1".into()));
    }
    let start = Instant::now();
    let n = inst.n();
    let mut checker = FeasibilityChecker::new(inst, r)?;
    let mut check = |flat: &[u64]| -> Result<Option<TransmissionSchedule>> {
        let sched = TransmissionSchedule::new(flat.chunks(r).map(<[u64]>::to_vec).collect())?;
        Ok(checker.is_feasible(&sched)?.then_some(sched))
    };
    for total in 0..=(n * r) as u64 * cap {
        if let Some(sched) = find_composition(n * r, total, cap, &mut check)? {
            let mut report = SolveReport::new(Method::Exhaustive, rational(total as i64), start);
            report.total = Some(total);
            report.schedule = Some(sched);
            return Ok(report.finish(start));
        }
    }
    Err(Error::InfeasibleSchedule)
}

/// `min Σ x_i` subject to `Σ_{i∈∂(j)} x_i >= |P_j^c|` for every node `j`.
pub fn lp_dregular(inst: &NetworkInstance) -> Result<LpSolution> {
    let mut lp = ExactLp::unit_cost(inst.n());
    for j in 0..inst.n() {
        let missing = inst.missing_count(j);
        if missing > 0 {
            lp.add_covering_row(inst.adjacent(j).iter(), missing as i64)?;
        }
    }
    lp.solve()
}

/// `min Σ x_i` subject to `Σ_{i∈∂(S)} x_i >= |∩_{i∈S} P_i^c|` for every
/// nonempty proper `S`.
pub fn lp_cutset(inst: &NetworkInstance) -> Result<LpSolution> {
    let n = inst.n();
    guard("node count for the cut-set LP", n, CUTSET_NODE_LIMIT)?;
    let mut lp = ExactLp::unit_cost(n);
    let full = Subset::full(n);
    for s in full.subsets() {
        if s.is_empty() || s == full {
            continue;
        }
        let rhs = inst.common_missing(s);
        if rhs > 0 {
            lp.add_covering_row(boundary(inst, s).iter(), rhs as i64)?;
        }
    }
    lp.solve()
}

/// Normalized optimum when every packet splits into `t` chunks: the
/// chunked instance is solved exactly and the total divided by `t`.
/// Fully connected networks use the covering program; other networks fall
/// back to exhaustive search with the largest allowed rounds and cap.
pub fn solve_t_divisible(inst: &NetworkInstance, t: usize) -> Result<SolveReport> {
    let start = Instant::now();
    let chunked = inst.chunked(t)?;
    let mut report = if inst.is_complete() {
        solve_clique(&chunked)?
    } else {
        solve_exhaustive(&chunked, EXHAUSTIVE_ROUND_LIMIT, EXHAUSTIVE_CAP_LIMIT)?
    };
    let total = report.total.expect("both routes report a total");
    report.value = BigRational::new(BigInt::from(total), BigInt::from(t));
    report.chunks = t;
    report.bounds.clique_estimate = None;
    Ok(report.finish(start))
}

/// The constants `(c_q, δ_q)` of the random packet model on `n` nodes:
/// with `a_s = (1-q)^s - (1-q)^n`,
/// `c_q = min_{2<=s<n} a_1/a_s - 1` and
/// `δ_q = min_{2<=s<n} (n-s)/(n-1) - a_s/a_1`.
/// Both are infinite when `n <= 2`.
pub fn dregular_constants(n: usize, q: f64) -> (f64, f64) {
    let a = |s: usize| (1.0 - q).powi(s as i32) - (1.0 - q).powi(n as i32);
    let mut c = f64::INFINITY;
    let mut delta = f64::INFINITY;
    for s in 2..n {
        c = c.min(a(1) / a(s) - 1.0);
        delta = delta.min((n - s) as f64 / (n - 1) as f64 - a(s) / a(1));
    }
    (c, delta)
}

/// Rounds for the rounded LP schedule on a `d`-regular network:
/// `max{2d/(n δ_q), 2n(1+c_q)/(d c_q)}`, rounded up and at least 1.
pub fn dregular_rounds(n: usize, d: usize, q: f64) -> usize {
    let (c, delta) = dregular_constants(n, q);
    let (n, d) = (n as f64, d as f64);
    let first = 2.0 * d / (n * delta);
    let second = if c.is_infinite() { 0.0 } else { 2.0 * n * (1.0 + c) / (d * c) };
    let r = first.max(second);
    ((r - 1e-9).ceil() as usize).max(1)
}

/// Sends `⌈x_i⌉` transmissions from node `i` over `r` rounds, each round
/// getting `⌊⌈x_i⌉/r⌋` or one more; the extras go to the earliest rounds.
pub fn rounded_schedule(x: &[BigRational], r: usize) -> Result<TransmissionSchedule> {
    if r == 0 {
        return Err(Error::InvalidParameter("rounded schedule needs r >= 1".into()));
    }
    let rows = x
        .iter()
        .map(|v| {
            let total = v
                .ceil()
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::InvalidParameter(format!("entry {v} is not a count")))?;
            let (base, extra) = (total / r as u64, (total % r as u64) as usize);
            Ok((0..r).map(|j| base + u64::from(j < extra)).collect())
        })
        .collect::<Result<Vec<Vec<u64>>>>()?;
    TransmissionSchedule::new(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundedLp {
    pub lp_value: BigRational,
    pub schedule: TransmissionSchedule,
    pub feasible: bool,
}

impl RoundedLp {
    pub fn total(&self) -> u64 {
        self.schedule.total()
    }

    /// `total - M_LP`; always below `n`.
    pub fn gap(&self) -> BigRational {
        rational(self.total() as i64) - &self.lp_value
    }
}

/// Solves the node-constraint LP, rounds it over `r` rounds and certifies
/// the result.
pub fn rounded_lp_schedule(inst: &NetworkInstance, r: usize) -> Result<RoundedLp> {
    let lp = lp_dregular(inst)?;
    let schedule = rounded_schedule(&lp.x, r)?;
    let feasible = FeasibilityChecker::new(inst, r)?.is_feasible(&schedule)?;
    Ok(RoundedLp {
        lp_value: lp.value,
        schedule,
        feasible,
    })
}

/// `a/b` as an exact rational.
pub fn fraction(a: i64, b: i64) -> BigRational {
    assert!(b != 0, "zero denominator");
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::is_feasible;
    use crate::topology::Topology;

    /// Line 1-2-3; node 1 holds p1, node 3 holds p2, node 2 holds nothing.
    fn line_example() -> NetworkInstance {
        NetworkInstance::new(3, 2, &[(0, 1), (1, 2)], vec![vec![0], vec![], vec![1]]).unwrap()
    }

    /// K_3; node i misses only packet i.
    fn clique_example() -> NetworkInstance {
        NetworkInstance::new(
            3,
            3,
            &Topology::Complete.edges(3).unwrap(),
            vec![vec![1, 2], vec![0, 2], vec![0, 1]],
        )
        .unwrap()
    }

    fn complete(n: usize, k: usize, holdings: Vec<Vec<usize>>) -> NetworkInstance {
        NetworkInstance::new(n, k, &Topology::Complete.edges(n).unwrap(), holdings).unwrap()
    }

    /// Smallest total over single-round schedules with entries up to `k`.
    fn brute_force_clique(inst: &NetworkInstance, w: &[u64]) -> u64 {
        let n = inst.n();
        let k = inst.k() as u64;
        let mut best = u64::MAX;
        let mut b = vec![0u64; n];
        loop {
            let sched = TransmissionSchedule::single_round(&b);
            if is_feasible(inst, &sched).unwrap().feasible {
                best = best.min(b.iter().zip(w).map(|(x, w)| x * w).sum());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                if b[i] < k {
                    b[i] += 1;
                    break;
                }
                b[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn clique_example_needs_two() {
        let r = solve_clique(&clique_example()).unwrap();
        assert_eq!(r.value, rational(2));
        assert_eq!(r.schedule.as_ref().unwrap().rounds(), 1);
        assert_eq!(r.bounds.clique_estimate, Some(2));
    }

    #[test]
    fn one_holder_sends_everything() {
        let inst = complete(3, 3, vec![vec![0, 1, 2], vec![], vec![]]);
        let r = solve_clique(&inst).unwrap();
        assert_eq!(r.value, rational(3));
        assert_eq!(r.schedule.unwrap().rows(), &[vec![3], vec![0], vec![0]]);
    }

    #[test]
    fn nothing_to_send() {
        let inst = complete(3, 2, vec![vec![0, 1]; 3]);
        assert_eq!(solve_clique(&inst).unwrap().value, rational(0));
        assert_eq!(clique_estimate(&inst), 0);
    }

    #[test]
    fn clique_solver_rejects_line() {
        assert!(matches!(solve_clique(&line_example()), Err(Error::NotFullyConnected)));
    }

    #[test]
    fn estimate_can_undershoot() {
        // Both holders must send something: 1 = ⌈(0 + 0 + 2)/2⌉ < M* = 2.
        let inst = complete(3, 2, vec![vec![0, 1], vec![0, 1], vec![]]);
        assert_eq!(clique_estimate(&inst), 1);
        assert_eq!(solve_clique(&inst).unwrap().value, rational(2));
    }

    #[test]
    fn weighted_expensive_node_stays_silent() {
        let inst = clique_example();
        let w = [1_000_000, 1, 1];
        let r = solve_weighted_clique(&inst, &w).unwrap();
        assert_eq!(r.schedule.as_ref().unwrap().node_total(0), 0);
        assert_eq!(r.weighted_cost, Some(brute_force_clique(&inst, &w)));
        let unit = solve_weighted_clique(&inst, &[1, 1, 1]).unwrap();
        assert_eq!(unit.value, rational(2));
    }

    #[test]
    fn weighted_disjoint_halves_match_brute_force() {
        let inst = complete(3, 4, vec![vec![], vec![0, 1], vec![2, 3]]);
        for w in [[1, 1, 5], [1, 5, 1], [0, 2, 3], [4, 4, 4]] {
            let r = solve_weighted_clique(&inst, &w).unwrap();
            assert_eq!(r.weighted_cost, Some(brute_force_clique(&inst, &w)), "w = {w:?}");
        }
    }

    #[test]
    fn exhaustive_worked_examples() {
        assert_eq!(solve_exhaustive(&line_example(), 2, 2).unwrap().value, rational(3));
        assert_eq!(solve_exhaustive(&clique_example(), 1, 2).unwrap().value, rational(2));
        // one round is not enough on the line
        assert!(matches!(
            solve_exhaustive(&line_example(), 1, 3),
            Err(Error::InfeasibleSchedule)
        ));
    }

    #[test]
    fn four_node_line_with_packets_at_the_ends() {
        // Nodes 1 and 4 each send once. A single transmission by node 2 can
        // only serve both neighbours once node 2 knows p2, which needs an
        // earlier transmission by node 3, and symmetrically; so one of the
        // middle nodes sends twice (5). With three rounds the coded relay
        // reaches the far end one round too late, giving 6; four rounds
        // allow 5.
        let inst = NetworkInstance::new(
            4,
            2,
            &Topology::Line.edges(4).unwrap(),
            vec![vec![0], vec![], vec![], vec![1]],
        )
        .unwrap();
        let three = solve_exhaustive(&inst, 3, 2).unwrap();
        assert!(is_feasible(&inst, three.schedule.as_ref().unwrap()).unwrap().feasible);
        assert_eq!(three.total, Some(6));
        let five = TransmissionSchedule::new(vec![
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 0],
            vec![1, 0, 0, 0],
        ])
        .unwrap();
        assert!(is_feasible(&inst, &five).unwrap().feasible);
        let lp = lp_cutset(&inst).unwrap().value;
        assert!(lp <= rational(5));
    }

    #[test]
    fn exhaustive_guards() {
        let big = complete(5, 1, vec![vec![0], vec![], vec![], vec![], vec![]]);
        assert!(matches!(solve_exhaustive(&big, 1, 1), Err(Error::TooLarge { .. })));
        assert!(matches!(solve_exhaustive(&clique_example(), 4, 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn lp_values() {
        assert_eq!(lp_dregular(&clique_example()).unwrap().value, fraction(3, 2));
        assert_eq!(lp_cutset(&clique_example()).unwrap().value, fraction(3, 2));
        let everywhere = complete(3, 2, vec![vec![0, 1]; 3]);
        assert_eq!(lp_dregular(&everywhere).unwrap().value, rational(0));
        assert_eq!(lp_cutset(&everywhere).unwrap().value, rational(0));
        // S = {2} needs both of its neighbours to send: at least 2
        let line = lp_cutset(&line_example()).unwrap();
        assert!(line.value >= rational(2));
    }

    #[test]
    fn cycle_lp_matches_vertex_enumeration() {
        // C_4 with every node missing two packets; each node's boundary is
        // its two neighbours, so the LP is x_{j-1} + x_{j+1} >= 2.
        let inst = NetworkInstance::new(
            4,
            4,
            &Topology::Cycle.edges(4).unwrap(),
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap();
        let lp = lp_dregular(&inst).unwrap();
        // Any optimal vertex has two tight constraints per pair, and an
        // enumeration over half-integral points finds the same optimum.
        let mut best: Option<BigRational> = None;
        for a in 0..=8 {
            for b in 0..=8 {
                for c in 0..=8 {
                    for d in 0..=8 {
                        let x = [a, b, c, d].map(|v| fraction(v, 2));
                        let ok = (0..4).all(|j| {
                            inst.adjacent(j).iter().map(|i| x[i].clone()).sum::<BigRational>()
                                >= rational(inst.missing_count(j) as i64)
                        });
                        if ok {
                            let s: BigRational = x.iter().cloned().sum();
                            if best.as_ref().is_none_or(|b| s < *b) {
                                best = Some(s);
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(Some(lp.value.clone()), best);
        assert_eq!(lp.value, rational(4));
    }

    #[test]
    fn chunking_the_clique_example() {
        let inst = clique_example();
        assert_eq!(solve_t_divisible(&inst, 1).unwrap().value, rational(2));
        let half = solve_t_divisible(&inst, 2).unwrap();
        assert_eq!(half.value, fraction(3, 2));
        assert_eq!(half.total, Some(3));
        assert_eq!(half.value, lp_cutset(&inst).unwrap().value);
    }

    #[test]
    fn chunking_a_line_uses_exhaustive_search() {
        let inst = line_example();
        let r = solve_t_divisible(&inst, 1).unwrap();
        assert_eq!(r.value, rational(3));
        assert_eq!(r.method, Method::Exhaustive);
    }

    #[test]
    fn round_count_for_six_cycle() {
        let (c, delta) = dregular_constants(6, 0.5);
        assert!((c - (0.484375 / 0.234375 - 1.0)).abs() < 1e-12);
        // s = 5 attains the minimum: 1/5 - (1/32 - 1/64)/(1/2 - 1/64)
        assert!((delta - (0.2 - 0.015625 / 0.484375)).abs() < 1e-12);
        assert_eq!(dregular_rounds(6, 2, 0.5), 12);
        assert_eq!(dregular_rounds(2, 1, 0.5), 1);
    }

    #[test]
    fn rounding_spreads_evenly() {
        let x = [fraction(7, 2), rational(0), rational(3)];
        let s = rounded_schedule(&x, 3).unwrap();
        assert_eq!(s.rows(), &[vec![2, 1, 1], vec![0, 0, 0], vec![1, 1, 1]]);
        for (row, v) in s.rows().iter().zip(&x) {
            let per = v / rational(3);
            for &b in row {
                assert!(rational(b as i64) >= per.floor() && rational(b as i64) <= per.ceil());
            }
        }
    }

    #[test]
    fn report_serializes_rationals_as_strings() {
        let r = solve_t_divisible(&clique_example(), 2).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["value"], "3/2");
        assert_eq!(v["method"], "clique");
        assert_eq!(v["schedule"]["rounds"], 1);
    }
}
