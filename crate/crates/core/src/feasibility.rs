//! Transmission schedules and their certification.
//!
//! A schedule permits universal recovery in `r` rounds iff every terminal
//! `v_i^r` of the layered graph built by [`build_gnc`] receives `k` units of
//! flow from the source. Failed checks are mapped back to a violated member
//! of the inequality family indexed by nested set sequences, which
//! [`check_rr_membership`] also evaluates directly on small instances.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{enumerate_sequences, neighborhood, NetworkInstance, SetSequence};
use crate::maxflow::{Capacity, Dinic, FlowNetwork};
use crate::subset::Subset;

/// `b[i][j]`: transmissions by node `i` in round `j` (both 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransmissionSchedule {
    b: Vec<Vec<u64>>,
    rounds: usize,
}

impl TransmissionSchedule {
    pub fn new(b: Vec<Vec<u64>>) -> Result<Self> {
        let rounds = b.first().map_or(0, Vec::len);
        if rounds == 0 {
            return Err(Error::InvalidSchedule("schedule needs at least one round".into()));
        }
        if let Some(i) = b.iter().position(|row| row.len() != rounds) {
            return Err(Error::InvalidSchedule(format!(
                "node {} has {} rounds, expected {rounds}",
                i + 1,
                b[i].len()
            )));
        }
        Ok(TransmissionSchedule { b, rounds })
    }

    pub fn zeros(n: usize, rounds: usize) -> Self {
        assert!(rounds >= 1);
        TransmissionSchedule {
            b: vec![vec![0; rounds]; n],
            rounds,
        }
    }

    /// One round in which node `i` sends `totals[i]` times.
    pub fn single_round(totals: &[u64]) -> Self {
        TransmissionSchedule {
            b: totals.iter().map(|&t| vec![t]).collect(),
            rounds: 1,
        }
    }

    pub fn nodes(&self) -> usize {
        self.b.len()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn get(&self, node: usize, round: usize) -> u64 {
        self.b[node][round]
    }

    pub fn set(&mut self, node: usize, round: usize, count: u64) {
        self.b[node][round] = count;
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.b
    }

    pub fn total(&self) -> u64 {
        self.b.iter().flatten().sum()
    }

    pub fn node_total(&self, node: usize) -> u64 {
        self.b[node].iter().sum()
    }

    /// The same schedule preceded by a silent round.
    pub fn with_leading_silent_round(&self) -> Self {
        TransmissionSchedule {
            b: self
                .b
                .iter()
                .map(|row| std::iter::once(0).chain(row.iter().copied()).collect())
                .collect(),
            rounds: self.rounds + 1,
        }
    }

    fn check_dimensions(&self, inst: &NetworkInstance) -> Result<()> {
        if self.nodes() != inst.n() {
            return Err(Error::Dimension(format!(
                "schedule covers {} nodes, instance has {}",
                self.nodes(),
                inst.n()
            )));
        }
        Ok(())
    }
}

/// On-disk schedule layout: `b[i][j]` for node `i + 1`, round `j + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub rounds: usize,
    pub b: Vec<Vec<u64>>,
}

impl From<&TransmissionSchedule> for ScheduleFile {
    fn from(s: &TransmissionSchedule) -> Self {
        ScheduleFile {
            rounds: s.rounds,
            b: s.b.clone(),
        }
    }
}

impl TryFrom<ScheduleFile> for TransmissionSchedule {
    type Error = Error;

    fn try_from(file: ScheduleFile) -> Result<Self> {
        let sched = TransmissionSchedule::new(file.b)?;
        if sched.rounds != file.rounds {
            return Err(Error::InvalidSchedule(format!(
                "\"rounds\" is {} but rows have {} entries",
                file.rounds, sched.rounds
            )));
        }
        Ok(sched)
    }
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<TransmissionSchedule> {
    let file: ScheduleFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    TransmissionSchedule::try_from(file)
}

pub fn save_schedule(sched: &TransmissionSchedule, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&ScheduleFile::from(sched))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Node and arc indices of the layered flow graph.
#[derive(Clone, Debug)]
pub struct GncLayout {
    n: usize,
    k: usize,
    rounds: usize,
    /// `b_arcs[i][j]` is the arc `v_i^j -> w_i^{j+1}`.
    b_arcs: Vec<Vec<usize>>,
}

impl GncLayout {
    pub fn source(&self) -> usize {
        0
    }

    pub fn packet(&self, p: usize) -> usize {
        1 + p
    }

    /// `v_i^j` for `j` in `0..=r`.
    pub fn state(&self, i: usize, j: usize) -> usize {
        1 + self.k + j * self.n + i
    }

    /// `w_i^j` for `j` in `1..=r`.
    pub fn broadcast(&self, i: usize, j: usize) -> usize {
        debug_assert!(j >= 1);
        1 + self.k + self.n * (self.rounds + 1) + (j - 1) * self.n + i
    }

    pub fn terminal(&self, i: usize) -> usize {
        self.state(i, self.rounds)
    }

    /// Arc carrying node `i`'s transmissions in 0-based round `j`.
    pub fn schedule_arc(&self, i: usize, j: usize) -> usize {
        self.b_arcs[i][j]
    }
}

/// Builds the layered flow graph with one source arc per packet group.
/// `groups` lists (holder set, packet count); `build_gnc` uses one group per
/// packet.
fn build_layered(
    inst: &NetworkInstance,
    rounds: usize,
    groups: &[(Subset, u64)],
    capacity: impl Fn(usize, usize) -> u64,
) -> (FlowNetwork, GncLayout) {
    let n = inst.n();
    let mut layout = GncLayout {
        n,
        k: groups.len(),
        rounds,
        b_arcs: vec![vec![0; rounds]; n],
    };
    let mut net = FlowNetwork::new();
    net.add_node("s");
    for p in 0..groups.len() {
        net.add_node(format!("u{}", p + 1));
    }
    for j in 0..=rounds {
        for i in 0..n {
            net.add_node(format!("v{}^{j}", i + 1));
        }
    }
    for j in 1..=rounds {
        for i in 0..n {
            net.add_node(format!("w{}^{j}", i + 1));
        }
    }

    for (p, &(_, count)) in groups.iter().enumerate() {
        net.add_arc(layout.source(), layout.packet(p), Capacity::Finite(count));
    }
    for (p, &(holders, _)) in groups.iter().enumerate() {
        for i in holders.iter() {
            net.add_arc(layout.packet(p), layout.state(i, 0), Capacity::Infinite);
        }
    }
    for j in 1..=rounds {
        for i in 0..n {
            net.add_arc(layout.state(i, j - 1), layout.state(i, j), Capacity::Infinite);
        }
    }
    for j in 1..=rounds {
        for i in 0..n {
            layout.b_arcs[i][j - 1] = net.add_arc(
                layout.state(i, j - 1),
                layout.broadcast(i, j),
                Capacity::Finite(capacity(i, j - 1)),
            );
        }
    }
    for j in 1..=rounds {
        for i in 0..n {
            for h in inst.closed_neighborhood(i).iter() {
                net.add_arc(layout.broadcast(i, j), layout.state(h, j), Capacity::Infinite);
            }
        }
    }
    (net, layout)
}

/// The network-coding graph: source `s`, one node `u_p` per packet, node
/// states `v_i^j` for rounds `0..=r` and broadcasts `w_i^j` for rounds
/// `1..=r`. It has `1 + k + n(r+1) + nr` nodes and
/// `k + Σ|P_i| + 2nr + rΣ|Γ(i)|` arcs.
pub fn build_gnc(
    inst: &NetworkInstance,
    sched: &TransmissionSchedule,
) -> Result<(FlowNetwork, GncLayout)> {
    sched.check_dimensions(inst)?;
    let groups: Vec<(Subset, u64)> = (0..inst.k()).map(|p| (inst.holders(p), 1)).collect();
    Ok(build_layered(inst, sched.rounds(), &groups, |i, j| sched.get(i, j)))
}

/// A violated inequality recovered from a minimum cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Node whose final state receives less than `k` units.
    pub terminal: usize,
    pub flow: u64,
    pub sequence: SetSequence,
    /// Transmissions crossing the normalized cut.
    pub lhs: u64,
    /// Packets missing from every node of the final set.
    pub rhs: usize,
}

impl Witness {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "terminal": self.terminal + 1,
            "flow": self.flow,
            "sequence": self.sequence.sets.iter().map(|s| s.to_one_based()).collect::<Vec<_>>(),
            "lhs": self.lhs,
            "rhs": self.rhs,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Max-flow into each terminal, capped at `k`.
    pub flows: Vec<u64>,
    pub witness: Option<Witness>,
}

/// Left-hand side of the inequality for `seq` under `sched`; the round index
/// is reversed, so `S_j` pairs with round `r + 1 - j`.
pub fn sequence_lhs(inst: &NetworkInstance, sched: &TransmissionSchedule, seq: &SetSequence) -> u64 {
    let r = seq.rounds();
    (1..=r)
        .map(|j| {
            let senders = neighborhood(inst, seq.sets[j - 1]).difference(seq.sets[j]);
            senders.iter().map(|i| sched.get(i, r - j)).sum::<u64>()
        })
        .sum()
}

/// Reusable certifier for a fixed instance and round count. Packets with
/// identical holder sets share one source arc, which leaves every cut value
/// unchanged.
pub struct FeasibilityChecker<'a> {
    inst: &'a NetworkInstance,
    rounds: usize,
    layout: GncLayout,
    dinic: Dinic,
}

impl<'a> FeasibilityChecker<'a> {
    pub fn new(inst: &'a NetworkInstance, rounds: usize) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidSchedule("schedule needs at least one round".into()));
        }
        let groups: Vec<(Subset, u64)> = inst
            .holder_profile()
            .into_iter()
            .map(|(h, c)| (h, c as u64))
            .collect();
        let (net, layout) = build_layered(inst, rounds, &groups, |_, _| 0);
        let dinic = Dinic::new(&net, inst.k() as u64 + 1);
        Ok(FeasibilityChecker {
            inst,
            rounds,
            layout,
            dinic,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn load(&mut self, sched: &TransmissionSchedule) -> Result<()> {
        sched.check_dimensions(self.inst)?;
        if sched.rounds() != self.rounds {
            return Err(Error::Dimension(format!(
                "schedule has {} rounds, checker was built for {}",
                sched.rounds(),
                self.rounds
            )));
        }
        for i in 0..self.inst.n() {
            for j in 0..self.rounds {
                let cap = sched.get(i, j).min(self.inst.k() as u64 + 1);
                self.dinic.set_capacity(self.layout.schedule_arc(i, j), cap);
            }
        }
        Ok(())
    }

    /// Whether every terminal can receive all `k` packets; stops at the
    /// first terminal that cannot.
    pub fn is_feasible(&mut self, sched: &TransmissionSchedule) -> Result<bool> {
        self.load(sched)?;
        let k = self.inst.k() as u64;
        for i in 0..self.inst.n() {
            let t = self.layout.terminal(i);
            if self.dinic.max_flow_limited(self.layout.source(), t, k) < k {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Full report: one flow per terminal and, when infeasible, a witness for
    /// the first terminal short of `k`.
    pub fn check(&mut self, sched: &TransmissionSchedule) -> Result<FeasibilityReport> {
        self.load(sched)?;
        let k = self.inst.k() as u64;
        let mut flows = Vec::with_capacity(self.inst.n());
        let mut witness = None;
        for i in 0..self.inst.n() {
            let t = self.layout.terminal(i);
            let flow = self.dinic.max_flow_limited(self.layout.source(), t, k);
            if flow < k && witness.is_none() {
                let source_side = self.dinic.source_side(self.layout.source());
                witness = Some(self.normalize_cut(sched, i, flow, &source_side));
            }
            flows.push(flow);
        }
        Ok(FeasibilityReport {
            feasible: witness.is_none(),
            flows,
            witness,
        })
    }

    /// Moves an arbitrary minimum cut into sequence form, layer by layer
    /// from the terminals back to round 0, never increasing its capacity.
    fn normalize_cut(
        &self,
        sched: &TransmissionSchedule,
        terminal: usize,
        flow: u64,
        source_side: &[bool],
    ) -> Witness {
        let n = self.inst.n();
        let r = self.rounds;
        let sink_side = |v: usize| !source_side[v];
        let first: Subset = (0..n).filter(|&i| sink_side(self.layout.state(i, r))).collect();
        let mut sets = vec![first];
        for layer in (1..=r).rev() {
            let prev = *sets.last().expect("nonempty");
            let grown = neighborhood(self.inst, prev);
            let next: Subset = (0..n)
                .filter(|&i| {
                    prev.contains(i)
                        || (grown.contains(i) && sink_side(self.layout.state(i, layer - 1)))
                })
                .collect();
            sets.push(next);
        }
        let sequence = SetSequence { sets };
        let lhs = sequence_lhs(self.inst, sched, &sequence);
        let rhs = self.inst.common_missing(sequence.last());
        debug_assert_eq!(
            self.inst.k() as u64 - rhs as u64 + lhs,
            flow,
            "normalized cut must stay minimal"
        );
        Witness {
            terminal,
            flow,
            sequence,
            lhs,
            rhs,
        }
    }
}

/// Certifies `sched` by one max-flow per terminal.
pub fn is_feasible(inst: &NetworkInstance, sched: &TransmissionSchedule) -> Result<FeasibilityReport> {
    FeasibilityChecker::new(inst, sched.rounds())?.check(sched)
}

/// The inequality family for a fixed instance and round count, with
/// sequences that have the same left-hand side merged (keeping the largest
/// right-hand side).
pub struct RrConstraints {
    rounds: usize,
    /// (flattened `node * r + round` indices, rhs, a sequence attaining rhs)
    rows: Vec<(Vec<usize>, usize, SetSequence)>,
}

impl RrConstraints {
    pub fn new(inst: &NetworkInstance, rounds: usize) -> Result<Self> {
        let mut merged: HashMap<Vec<usize>, (usize, SetSequence)> = HashMap::new();
        for seq in enumerate_sequences(inst, rounds, false)? {
            let rhs = inst.common_missing(seq.last());
            if rhs == 0 {
                continue;
            }
            let mut support = Vec::new();
            for j in 1..=rounds {
                let senders = neighborhood(inst, seq.sets[j - 1]).difference(seq.sets[j]);
                support.extend(senders.iter().map(|i| i * rounds + (rounds - j)));
            }
            support.sort_unstable();
            merged
                .entry(support)
                .and_modify(|e| {
                    if rhs > e.0 {
                        *e = (rhs, seq.clone());
                    }
                })
                .or_insert((rhs, seq));
        }
        let mut rows: Vec<_> = merged.into_iter().map(|(s, (rhs, seq))| (s, rhs, seq)).collect();
        rows.sort();
        Ok(RrConstraints { rounds, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// First violated sequence, if any.
    pub fn violation(&self, sched: &TransmissionSchedule) -> Option<&SetSequence> {
        assert_eq!(sched.rounds(), self.rounds);
        let flat: Vec<u64> = sched.rows().iter().flatten().copied().collect();
        self.rows
            .iter()
            .find(|(support, rhs, _)| {
                support.iter().map(|&e| flat[e]).sum::<u64>() < *rhs as u64
            })
            .map(|(_, _, seq)| seq)
    }

    pub fn contains(&self, sched: &TransmissionSchedule) -> bool {
        self.violation(sched).is_none()
    }
}

/// Evaluates every inequality of the family directly (small `n` only).
pub fn check_rr_membership(inst: &NetworkInstance, sched: &TransmissionSchedule) -> Result<bool> {
    sched.check_dimensions(inst)?;
    Ok(RrConstraints::new(inst, sched.rounds())?.contains(sched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Topology;

    fn example_line() -> NetworkInstance {
        NetworkInstance::new(3, 2, &[(0, 1), (1, 2)], vec![vec![0], vec![], vec![1]]).unwrap()
    }

    fn example_triangle() -> NetworkInstance {
        NetworkInstance::new(
            3,
            3,
            &Topology::Complete.edges(3).unwrap(),
            vec![vec![1, 2], vec![0, 2], vec![0, 1]],
        )
        .unwrap()
    }

    fn line_schedule() -> TransmissionSchedule {
        TransmissionSchedule::new(vec![vec![1, 0], vec![0, 1], vec![1, 0]]).unwrap()
    }

    #[test]
    fn gnc_size_for_line_example() {
        let inst = example_line();
        let (net, layout) = build_gnc(&inst, &line_schedule()).unwrap();
        assert_eq!(net.node_count(), 1 + 2 + 3 * 3 + 3 * 2);
        // k + Σ|P_i| + 2nr + rΣ|Γ(i)| = 2 + 2 + 12 + 2*7
        assert_eq!(net.arc_count(), 30);
        let unit_source_arcs = net
            .arcs()
            .iter()
            .filter(|a| a.tail == layout.source() && a.capacity == Capacity::Finite(1))
            .count();
        assert_eq!(unit_source_arcs, 2);
        let finite: Vec<u64> = net
            .arcs()
            .iter()
            .filter(|a| a.tail != layout.source())
            .filter_map(|a| match a.capacity {
                Capacity::Finite(c) => Some(c),
                Capacity::Infinite => None,
            })
            .collect();
        assert_eq!(finite.len(), 6);
        assert_eq!(finite.iter().sum::<u64>(), 3);
        assert_eq!(net.arcs()[layout.schedule_arc(1, 1)].capacity, Capacity::Finite(1));
    }

    #[test]
    fn zero_schedule_has_zero_broadcast_arcs() {
        let inst = example_line();
        let sched = TransmissionSchedule::zeros(3, 2);
        let (net, layout) = build_gnc(&inst, &sched).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(net.arcs()[layout.schedule_arc(i, j)].capacity, Capacity::Finite(0));
            }
        }
    }

    #[test]
    fn line_example_schedule_is_feasible() {
        let inst = example_line();
        let report = is_feasible(&inst, &line_schedule()).unwrap();
        assert!(report.feasible);
        assert_eq!(report.flows, vec![2, 2, 2]);
    }

    #[test]
    fn silent_node_makes_line_infeasible() {
        let inst = example_line();
        for silent in 0..3 {
            let mut sched = TransmissionSchedule::new(vec![vec![2, 2]; 3]).unwrap();
            sched.set(silent, 0, 0);
            sched.set(silent, 1, 0);
            let report = is_feasible(&inst, &sched).unwrap();
            assert!(!report.feasible, "node {silent} silent");
            let w = report.witness.unwrap();
            assert!(w.sequence.is_valid(&inst));
            assert!(w.lhs < w.rhs as u64);
        }
    }

    #[test]
    fn triangle_two_transmissions() {
        let inst = example_triangle();
        let sched = TransmissionSchedule::single_round(&[1, 1, 0]);
        assert!(is_feasible(&inst, &sched).unwrap().feasible);
        let one = TransmissionSchedule::single_round(&[1, 0, 0]);
        assert!(!is_feasible(&inst, &one).unwrap().feasible);
    }

    #[test]
    fn witness_matches_cut_value() {
        let inst = example_line();
        let sched = TransmissionSchedule::new(vec![vec![1, 0], vec![0, 0], vec![1, 0]]).unwrap();
        let report = is_feasible(&inst, &sched).unwrap();
        let w = report.witness.unwrap();
        assert_eq!(inst.k() as u64 - w.rhs as u64 + w.lhs, w.flow);
        assert_eq!(sequence_lhs(&inst, &sched, &w.sequence), w.lhs);
    }

    #[test]
    fn constant_sequence_is_the_cut_set_bound() {
        // S = {2} on the line: b_1 + b_3 summed over rounds must reach 2.
        let inst = example_line();
        let seq = SetSequence {
            sets: vec![Subset::singleton(1); 3],
        };
        let sched = line_schedule();
        assert_eq!(sequence_lhs(&inst, &sched, &seq), 2);
        assert_eq!(inst.common_missing(seq.last()), 2);
        let short = TransmissionSchedule::new(vec![vec![1, 0], vec![5, 5], vec![0, 0]]).unwrap();
        assert!(!check_rr_membership(&inst, &short).unwrap());
    }

    #[test]
    fn zero_schedule_fails_both_checks() {
        let inst = example_line();
        let sched = TransmissionSchedule::zeros(3, 2);
        assert!(!check_rr_membership(&inst, &sched).unwrap());
        assert!(!is_feasible(&inst, &sched).unwrap().feasible);
    }

    #[test]
    fn max_flow_agrees_with_inequalities_on_line_example() {
        let inst = example_line();
        for r in 1..=2 {
            let constraints = RrConstraints::new(&inst, r).unwrap();
            let mut checker = FeasibilityChecker::new(&inst, r).unwrap();
            let cells = 3 * r;
            for code in 0..3usize.pow(cells as u32) {
                let mut c = code;
                let mut sched = TransmissionSchedule::zeros(3, r);
                for e in 0..cells {
                    sched.set(e / r, e % r, (c % 3) as u64);
                    c /= 3;
                }
                assert_eq!(
                    checker.is_feasible(&sched).unwrap(),
                    constraints.contains(&sched),
                    "{sched:?}"
                );
            }
        }
    }

    #[test]
    fn grouped_checker_agrees_with_literal_graph() {
        let inst = example_triangle();
        let sched = TransmissionSchedule::single_round(&[1, 1, 0]);
        let (net, layout) = build_gnc(&inst, &sched).unwrap();
        let mut literal = Dinic::new(&net, inst.k() as u64 + 1);
        let report = is_feasible(&inst, &sched).unwrap();
        for i in 0..3 {
            let f = literal.max_flow(layout.source(), layout.terminal(i));
            assert_eq!(f.min(3), report.flows[i]);
        }
    }

    #[test]
    fn schedule_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        save_schedule(&line_schedule(), &path).unwrap();
        assert_eq!(load_schedule(&path).unwrap(), line_schedule());
        let bad = ScheduleFile {
            rounds: 3,
            b: vec![vec![1, 0]],
        };
        assert!(TransmissionSchedule::try_from(bad).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let inst = example_line();
        let sched = TransmissionSchedule::zeros(2, 1);
        assert!(matches!(is_feasible(&inst, &sched), Err(Error::Dimension(_))));
    }
}
