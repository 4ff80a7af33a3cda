//! Random linear coding schemes that realize a feasible schedule.
//!
//! Every node keeps the coefficient vectors it knows, starting from the unit
//! vectors of its own packets. In round `j` each sender broadcasts random
//! combinations of what it knew at the start of the round; receptions become
//! usable from round `j + 1` on.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityChecker, TransmissionSchedule};
use crate::galois::{Elem, FieldMatrix, GaloisField};
use crate::instance::{derive_seed, NetworkInstance};

/// Attempts before [`generate_scheme`] gives up.
pub const RETRY_CAP: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transmission {
    pub node: usize,
    pub round: usize,
    /// Coefficients over the `k` packets.
    pub coeffs: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingScheme {
    pub field: GaloisField,
    pub k: usize,
    /// Ordered by round.
    pub transmissions: Vec<Transmission>,
}

/// A row space kept in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Knowledge {
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Knowledge {
    pub fn from_packets(k: usize, packets: &[usize]) -> Self {
        let mut sorted = packets.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let rows = sorted
            .iter()
            .map(|&p| {
                let mut v = vec![0; k];
                v[p] = 1;
                v
            })
            .collect();
        Knowledge { rows, pivots: sorted }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    /// `v` minus its projection onto the pivots; zero iff `v` is in the span.
    fn residual(&self, field: &GaloisField, v: &[Elem]) -> Vec<Elem> {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = r[p];
            if c != 0 {
                field.axpy(&mut r, c, row);
            }
        }
        r
    }

    pub fn contains(&self, field: &GaloisField, v: &[Elem]) -> bool {
        self.residual(field, v).iter().all(|&c| c == 0)
    }

    /// Adds rows and re-reduces once.
    pub fn absorb(&mut self, field: &GaloisField, incoming: &[Vec<Elem>]) {
        if incoming.is_empty() {
            return;
        }
        let k = incoming[0].len();
        let mut all = self.rows.clone();
        all.extend(incoming.iter().cloned());
        let m = FieldMatrix::from_rows(k, &all).expect("rows share a length");
        let (red, pivots) = m.rref(field);
        self.rows = (0..pivots.len()).map(|r| red.row(r).to_vec()).collect();
        self.pivots = pivots;
    }

    /// Uniform combination of the known rows.
    fn random_combination(&self, field: &GaloisField, k: usize, rng: &mut ChaCha8Rng) -> Vec<Elem> {
        let mut v = vec![0; k];
        for row in &self.rows {
            let c = field.random(rng);
            field.axpy(&mut v, c, row);
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveryReport {
    pub recovered: bool,
    /// Final rank per node.
    pub ranks: Vec<usize>,
    /// `ranks_by_round[j][i]`: rank of node `i` after round `j`.
    pub ranks_by_round: Vec<Vec<usize>>,
}

impl CodingScheme {
    pub fn rounds(&self) -> usize {
        self.transmissions.last().map_or(0, |t| t.round + 1)
    }

    /// Transmission counts per node and round.
    pub fn schedule(&self, n: usize, rounds: usize) -> Result<TransmissionSchedule> {
        let mut sched = TransmissionSchedule::zeros(n, rounds.max(1));
        for t in &self.transmissions {
            if t.node >= n || t.round >= rounds.max(1) {
                return Err(Error::InvalidScheme(format!(
                    "transmission by node {} in round {} is outside {n} nodes x {rounds} rounds",
                    t.node + 1,
                    t.round + 1
                )));
            }
            sched.set(t.node, t.round, sched.get(t.node, t.round) + 1);
        }
        Ok(sched)
    }

    /// The transcript map: one row per transmission.
    pub fn transcript(&self) -> FieldMatrix {
        let rows: Vec<Vec<Elem>> = self.transmissions.iter().map(|t| t.coeffs.clone()).collect();
        FieldMatrix::from_rows(self.k, &rows).expect("coefficients have k entries")
    }
}

/// Builds a scheme for `sched` by random linear coding over `field`,
/// retrying with a fresh stream per attempt. Returns the scheme and the
/// number of attempts used.
pub fn generate_scheme_counted(
    inst: &NetworkInstance,
    sched: &TransmissionSchedule,
    field: &GaloisField,
    seed: u64,
) -> Result<(CodingScheme, usize)> {
    let n = inst.n();
    if field.order() < 2 * n {
        return Err(Error::InvalidField(format!(
            "field of order {} is smaller than 2n = {}",
            field.order(),
            2 * n
        )));
    }
    if !FeasibilityChecker::new(inst, sched.rounds())?.is_feasible(sched)? {
        return Err(Error::InfeasibleSchedule);
    }
    let mut last_ranks = Vec::new();
    for attempt in 0..RETRY_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        let (scheme, ranks) = simulate(inst, sched, field, &mut rng);
        if ranks.iter().all(|&r| r == inst.k()) {
            return Ok((scheme, attempt + 1));
        }
        last_ranks = ranks;
    }
    Err(Error::CodingFailed {
        attempts: RETRY_CAP,
        ranks: last_ranks,
        k: inst.k(),
    })
}

/// As [`generate_scheme_counted`], without the attempt count.
pub fn generate_scheme(
    inst: &NetworkInstance,
    sched: &TransmissionSchedule,
    field: &GaloisField,
    seed: u64,
) -> Result<CodingScheme> {
    generate_scheme_counted(inst, sched, field, seed).map(|(s, _)| s)
}

fn simulate(
    inst: &NetworkInstance,
    sched: &TransmissionSchedule,
    field: &GaloisField,
    rng: &mut ChaCha8Rng,
) -> (CodingScheme, Vec<usize>) {
    let (n, k) = (inst.n(), inst.k());
    let mut know: Vec<Knowledge> = (0..n).map(|i| Knowledge::from_packets(k, inst.holdings(i))).collect();
    let mut transmissions = Vec::with_capacity(sched.total() as usize);
    for j in 0..sched.rounds() {
        let mut inbox: Vec<Vec<Vec<Elem>>> = vec![Vec::new(); n];
        for i in 0..n {
            for _ in 0..sched.get(i, j) {
                let coeffs = know[i].random_combination(field, k, rng);
                for nb in inst.adjacent(i).iter() {
                    inbox[nb].push(coeffs.clone());
                }
                transmissions.push(Transmission {
                    node: i,
                    round: j,
                    coeffs,
                });
            }
        }
        for (i, rows) in inbox.iter().enumerate() {
            know[i].absorb(field, rows);
        }
    }
    let ranks = know.iter().map(Knowledge::rank).collect();
    let scheme = CodingScheme {
        field: field.clone(),
        k,
        transmissions,
    };
    (scheme, ranks)
}

/// Replays `scheme`, checking that every transmission lies in its sender's
/// span at the start of its round, and reports the resulting ranks.
pub fn verify_recovery(inst: &NetworkInstance, scheme: &CodingScheme) -> Result<RecoveryReport> {
    let (n, k) = (inst.n(), inst.k());
    if scheme.k != k {
        return Err(Error::InvalidScheme(format!(
            "scheme has {} packets, instance has {k}",
            scheme.k
        )));
    }
    let field = &scheme.field;
    let mut know: Vec<Knowledge> = (0..n).map(|i| Knowledge::from_packets(k, inst.holdings(i))).collect();
    let mut ranks_by_round = Vec::new();
    let mut pending: Vec<Vec<Vec<Elem>>> = vec![Vec::new(); n];
    let mut current = 0;
    for (index, t) in scheme.transmissions.iter().enumerate() {
        if t.node >= n {
            return Err(Error::InvalidScheme(format!("transmission {index} names node {}", t.node + 1)));
        }
        if t.coeffs.len() != k || t.coeffs.iter().any(|&c| !field.contains(c)) {
            return Err(Error::InvalidScheme(format!(
                "transmission {index} needs {k} coefficients in the field"
            )));
        }
        if t.round < current {
            return Err(Error::InvalidScheme(format!(
                "transmission {index} is out of round order"
            )));
        }
        while current < t.round {
            close_round(field, &mut know, &mut pending, &mut ranks_by_round);
            current += 1;
        }
        if !know[t.node].contains(field, &t.coeffs) {
            return Err(Error::CausalityViolation {
                index,
                node: t.node + 1,
                round: t.round + 1,
            });
        }
        for nb in inst.adjacent(t.node).iter() {
            pending[nb].push(t.coeffs.clone());
        }
    }
    if !scheme.transmissions.is_empty() {
        close_round(field, &mut know, &mut pending, &mut ranks_by_round);
    }
    let ranks: Vec<usize> = know.iter().map(Knowledge::rank).collect();
    Ok(RecoveryReport {
        recovered: ranks.iter().all(|&r| r == k),
        ranks,
        ranks_by_round,
    })
}

fn close_round(
    field: &GaloisField,
    know: &mut [Knowledge],
    pending: &mut [Vec<Vec<Elem>>],
    ranks_by_round: &mut Vec<Vec<usize>>,
) {
    for (kn, rows) in know.iter_mut().zip(pending.iter_mut()) {
        kn.absorb(field, rows);
        rows.clear();
    }
    ranks_by_round.push(know.iter().map(Knowledge::rank).collect());
}

/// Runs the scheme on actual packet contents (`packets[p]` is a vector of
/// symbols) and decodes at every node. Returns each node's recovered
/// packets.
pub fn decode_payloads(
    inst: &NetworkInstance,
    scheme: &CodingScheme,
    packets: &[Vec<Elem>],
) -> Result<Vec<Vec<Vec<Elem>>>> {
    let report = verify_recovery(inst, scheme)?;
    if !report.recovered {
        return Err(Error::NoRecovery(report.ranks));
    }
    let (n, k) = (inst.n(), inst.k());
    if packets.len() != k {
        return Err(Error::Dimension(format!("{} packets for k = {k}", packets.len())));
    }
    let len = packets.first().map_or(0, Vec::len);
    if packets.iter().any(|p| p.len() != len) {
        return Err(Error::Dimension("packets differ in length".into()));
    }
    let field = &scheme.field;
    // [coefficients | payload] rows known to each node
    let mut rows: Vec<Vec<Vec<Elem>>> = (0..n)
        .map(|i| {
            inst.holdings(i)
                .iter()
                .map(|&p| {
                    let mut r = vec![0; k];
                    r[p] = 1;
                    r.extend_from_slice(&packets[p]);
                    r
                })
                .collect()
        })
        .collect();
    for t in &scheme.transmissions {
        let mut row = t.coeffs.clone();
        let mut payload = vec![0; len];
        for (p, &c) in t.coeffs.iter().enumerate() {
            field.axpy(&mut payload, c, &packets[p]);
        }
        row.extend(payload);
        for nb in inst.adjacent(t.node).iter() {
            rows[nb].push(row.clone());
        }
    }
    rows.iter()
        .map(|known| {
            let (red, pivots) = FieldMatrix::from_rows(k + len, known)?.rref(field);
            if pivots.len() < k || pivots[k - 1] != k - 1 {
                return Err(Error::PropertyViolation("decoding matrix lost rank".into()));
            }
            Ok((0..k).map(|p| red.row(p)[k..].to_vec()).collect())
        })
        .collect()
}

/// On-disk scheme: node and round are 1-based, coefficients are hex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub field: FieldSpec,
    pub k: usize,
    pub transmissions: Vec<TransmissionFile>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub m: u32,
    pub poly: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmissionFile {
    pub node: usize,
    pub round: usize,
    pub coeffs: Vec<String>,
}

impl From<&CodingScheme> for SchemeFile {
    fn from(s: &CodingScheme) -> Self {
        let width = if s.field.exponent() <= 8 { 2 } else { 4 };
        SchemeFile {
            field: FieldSpec {
                m: s.field.exponent(),
                poly: s.field.poly(),
            },
            k: s.k,
            transmissions: s
                .transmissions
                .iter()
                .map(|t| TransmissionFile {
                    node: t.node + 1,
                    round: t.round + 1,
                    coeffs: t.coeffs.iter().map(|c| format!("{c:0width$x}")).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<SchemeFile> for CodingScheme {
    type Error = Error;

    fn try_from(file: SchemeFile) -> Result<Self> {
        let field = GaloisField::new(file.field.m, file.field.poly)?;
        let transmissions = file
            .transmissions
            .into_iter()
            .enumerate()
            .map(|(index, t)| {
                if t.node == 0 || t.round == 0 {
                    return Err(Error::InvalidScheme(format!(
                        "transmission {index}: node and round are 1-based"
                    )));
                }
                let coeffs = t
                    .coeffs
                    .iter()
                    .map(|c| {
                        Elem::from_str_radix(c, 16)
                            .ok()
                            .filter(|&e| field.contains(e))
                            .ok_or_else(|| {
                                Error::InvalidScheme(format!("transmission {index}: bad coefficient {c:?}"))
                            })
                    })
                    .collect::<Result<Vec<Elem>>>()?;
                if coeffs.len() != file.k {
                    return Err(Error::InvalidScheme(format!(
                        "transmission {index} has {} coefficients, expected {}",
                        coeffs.len(),
                        file.k
                    )));
                }
                Ok(Transmission {
                    node: t.node - 1,
                    round: t.round - 1,
                    coeffs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CodingScheme {
            field,
            k: file.k,
            transmissions,
        })
    }
}

pub fn scheme_to_json(scheme: &CodingScheme) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SchemeFile::from(scheme))?)
}

pub fn scheme_from_json(text: &str) -> Result<CodingScheme> {
    serde_json::from_str::<SchemeFile>(text)?.try_into()
}

pub fn load_scheme(path: impl AsRef<Path>) -> Result<CodingScheme> {
    scheme_from_json(&fs::read_to_string(path)?)
}

pub fn save_scheme(scheme: &CodingScheme, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, scheme_to_json(scheme)?)?;
    Ok(())
}
