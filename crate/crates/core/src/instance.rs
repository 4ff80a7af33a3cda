//! Problem instances: topology, packet holdings, neighborhoods and the nested
//! set sequences that index the universal-recovery constraints.
//!
//! Nodes and packets are 0-based in memory. Instance files use 1-based
//! indices for both; [`InstanceFile`] performs the shift in each direction.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_GROUND};

/// Largest `n` accepted by [`enumerate_sequences`].
pub const SEQUENCE_NODE_LIMIT: usize = 12;

/// Resamples allowed per packet before [`random_instance`] gives up.
pub const RESAMPLE_CAP: u64 = 1_000_000;

/// A network `T = {G, P_1, .., P_n}`: an undirected connected graph on `n`
/// nodes and the packets each node initially holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkInstance {
    n: usize,
    k: usize,
    /// Open neighborhoods (self excluded).
    adjacency: Vec<Subset>,
    holdings: Vec<Vec<usize>>,
    /// For each packet, the nodes holding it.
    holders: Vec<Subset>,
}

impl NetworkInstance {
    /// Builds and validates an instance from 0-based edges and holdings.
    pub fn new(
        n: usize,
        k: usize,
        edges: &[(usize, usize)],
        holdings: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("network has no nodes".into()));
        }
        if n > MAX_GROUND {
            return Err(Error::TooLarge {
                what: "node count",
                value: n,
                limit: MAX_GROUND,
            });
        }
        if holdings.len() != n {
            return Err(Error::InvalidInstance(format!(
                "expected holdings for {n} nodes, found {}",
                holdings.len()
            )));
        }
        let mut adjacency = vec![Subset::EMPTY; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInstance(format!(
                    "edge ({}, {}) references a node outside 1..={n}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::InvalidInstance(format!("self-loop at node {}", a + 1)));
            }
            adjacency[a] = adjacency[a].with(b);
            adjacency[b] = adjacency[b].with(a);
        }

        let mut holders = vec![Subset::EMPTY; k];
        let mut normalized = Vec::with_capacity(n);
        for (i, held) in holdings.into_iter().enumerate() {
            let set: BTreeSet<usize> = held.into_iter().collect();
            if let Some(&p) = set.iter().find(|&&p| p >= k) {
                return Err(Error::InvalidInstance(format!(
                    "node {} holds packet {} but k = {k}",
                    i + 1,
                    p + 1
                )));
            }
            for &p in &set {
                holders[p] = holders[p].with(i);
            }
            normalized.push(set.into_iter().collect());
        }
        if let Some(p) = holders.iter().position(|h| h.is_empty()) {
            return Err(Error::InvalidInstance(format!(
                "packet {} is held by no node",
                p + 1
            )));
        }

        let inst = NetworkInstance {
            n,
            k,
            adjacency,
            holdings: normalized,
            holders,
        };
        if !inst.is_connected() {
            return Err(Error::InvalidInstance("graph is not connected".into()));
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nodes(&self) -> Subset {
        Subset::full(self.n)
    }

    /// Sorted packet indices initially held by node `i` (`P_i`).
    pub fn holdings(&self, i: usize) -> &[usize] {
        &self.holdings[i]
    }

    /// Nodes holding packet `p`.
    pub fn holders(&self, p: usize) -> Subset {
        self.holders[p]
    }

    /// `|P_i^c|`.
    pub fn missing_count(&self, i: usize) -> usize {
        self.k - self.holdings[i].len()
    }

    /// Packets node `i` lacks (`P_i^c`), ascending.
    pub fn missing(&self, i: usize) -> Vec<usize> {
        (0..self.k).filter(|&p| !self.holders[p].contains(i)).collect()
    }

    /// `|∩_{i∈S} P_i^c|`: packets held by no node of `S`.
    pub fn common_missing(&self, s: Subset) -> usize {
        self.holders.iter().filter(|h| !h.intersects(s)).count()
    }

    /// Open neighborhood of `i`.
    pub fn adjacent(&self, i: usize) -> Subset {
        self.adjacency[i]
    }

    /// `Γ(i)`, which contains `i`.
    pub fn closed_neighborhood(&self, i: usize) -> Subset {
        self.adjacency[i].with(i)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in self.adjacency[a].iter().filter(|&b| b > a) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        (0..self.n).all(|i| self.degree(i) == self.n - 1)
    }

    fn is_connected(&self) -> bool {
        let mut seen = Subset::singleton(0);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let grown = neighborhood(self, frontier);
            frontier = grown.difference(seen);
            seen |= grown;
        }
        seen == self.nodes()
    }

    /// Number of packets per holder set. Packets with identical holder sets
    /// are interchangeable, so many computations only need these counts.
    pub fn holder_profile(&self) -> BTreeMap<Subset, usize> {
        let mut profile = BTreeMap::new();
        for &h in &self.holders {
            *profile.entry(h).or_insert(0) += 1;
        }
        profile
    }

    /// The same holdings on the complete graph.
    pub fn as_complete(&self) -> NetworkInstance {
        let mut inst = self.clone();
        for i in 0..self.n {
            inst.adjacency[i] = self.nodes().without(i);
        }
        inst
    }

    /// Splits every packet into `t` chunks; a node holds all chunks of each
    /// packet it held. Chunk `c` of packet `p` gets index `p * t + c`.
    pub fn chunked(&self, t: usize) -> Result<NetworkInstance> {
        if t == 0 {
            return Err(Error::InvalidParameter("chunk count t must be >= 1".into()));
        }
        let holdings = self
            .holdings
            .iter()
            .map(|held| {
                held.iter()
                    .flat_map(|&p| (0..t).map(move |c| p * t + c))
                    .collect()
            })
            .collect();
        NetworkInstance::new(self.n, self.k * t, &self.edges(), holdings)
    }
}

/// `Γ(S) = ∪_{i∈S} Γ(i)`; always contains `S`.
pub fn neighborhood(inst: &NetworkInstance, s: Subset) -> Subset {
    s.iter()
        .fold(Subset::EMPTY, |acc, i| acc | inst.closed_neighborhood(i))
}

/// `∂(S) = Γ(S) \ S`.
pub fn boundary(inst: &NetworkInstance, s: Subset) -> Subset {
    neighborhood(inst, s).difference(s)
}

/// A nested sequence `(S_0, .., S_r)` of node sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetSequence {
    pub sets: Vec<Subset>,
}

impl SetSequence {
    pub fn rounds(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn last(&self) -> Subset {
        *self.sets.last().expect("sequence has at least one set")
    }

    /// Checks both defining conditions directly.
    pub fn is_valid(&self, inst: &NetworkInstance) -> bool {
        let all = inst.nodes();
        let proper = |s: Subset| !s.is_empty() && s != all;
        self.sets.iter().all(|&s| proper(s))
            && self
                .sets
                .windows(2)
                .all(|w| w[0].is_subset_of(w[1]) && w[1].is_subset_of(neighborhood(inst, w[0])))
    }
}

/// Streams every sequence `(S_0, .., S_r)` with `∅ ⊂ S_i ⊂ V` and
/// `S_{i-1} ⊆ S_i ⊆ Γ(S_{i-1})`, each exactly once.
///
/// With `allow_full_last`, the final set may also equal `V`; those
/// constraints have a zero right-hand side and are normally skipped.
pub fn enumerate_sequences(
    inst: &NetworkInstance,
    r: usize,
    allow_full_last: bool,
) -> Result<Sequences<'_>> {
    if inst.n() > SEQUENCE_NODE_LIMIT {
        return Err(Error::TooLarge {
            what: "node count for sequence enumeration",
            value: inst.n(),
            limit: SEQUENCE_NODE_LIMIT,
        });
    }
    if r == 0 {
        return Err(Error::InvalidParameter("round count must be >= 1".into()));
    }
    Ok(Sequences::new(inst, r, allow_full_last))
}

pub struct Sequences<'a> {
    inst: &'a NetworkInstance,
    r: usize,
    allow_full_last: bool,
    sets: Vec<Subset>,
    /// Submask cursor per level: the elements added on top of the previous set.
    cursors: Vec<Subset>,
    started: bool,
    done: bool,
}

impl<'a> Sequences<'a> {
    fn new(inst: &'a NetworkInstance, r: usize, allow_full_last: bool) -> Self {
        Sequences {
            inst,
            r,
            allow_full_last,
            sets: vec![Subset::EMPTY; r + 1],
            cursors: vec![Subset::EMPTY; r + 1],
            started: false,
            done: false,
        }
    }

    fn base(&self, level: usize) -> Subset {
        if level == 0 {
            Subset::EMPTY
        } else {
            self.sets[level - 1]
        }
    }

    fn free(&self, level: usize) -> Subset {
        if level == 0 {
            self.inst.nodes()
        } else {
            neighborhood(self.inst, self.sets[level - 1]).difference(self.sets[level - 1])
        }
    }

    fn admissible(&self, level: usize, set: Subset) -> bool {
        if set.is_empty() {
            return false;
        }
        set != self.inst.nodes() || (self.allow_full_last && level == self.r)
    }

    /// Moves the cursor at `level` to its next admissible value.
    fn advance(&mut self, level: usize) -> bool {
        let free = self.free(level).bits();
        let base = self.base(level);
        let mut cur = self.cursors[level].bits();
        loop {
            cur = (cur | !free).wrapping_add(1) & free;
            if cur == 0 {
                return false;
            }
            let set = base | Subset::from_bits(cur);
            if self.admissible(level, set) {
                self.cursors[level] = Subset::from_bits(cur);
                self.sets[level] = set;
                return true;
            }
        }
    }

    /// Levels above `level` restart at the empty increment, which is always
    /// admissible because the previous set is already nonempty and proper.
    fn reset_above(&mut self, level: usize) {
        for l in level + 1..=self.r {
            self.cursors[l] = Subset::EMPTY;
            self.sets[l] = self.sets[l - 1];
        }
    }
}

impl Iterator for Sequences<'_> {
    type Item = SetSequence;

    fn next(&mut self) -> Option<SetSequence> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.advance(0) {
                self.done = true;
                return None;
            }
            self.reset_above(0);
            return Some(SetSequence {
                sets: self.sets.clone(),
            });
        }
        let mut level = self.r;
        loop {
            if self.advance(level) {
                self.reset_above(level);
                return Some(SetSequence {
                    sets: self.sets.clone(),
                });
            }
            if level == 0 {
                self.done = true;
                return None;
            }
            level -= 1;
        }
    }
}

/// Parameters of the random packet model: each packet is available at each
/// node independently with probability `q`, conditioned on being available
/// somewhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModel {
    pub q: f64,
    pub seed: u64,
}

impl RandomModel {
    pub fn new(q: f64, seed: u64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
        }
        Ok(RandomModel { q, seed })
    }
}

/// Derives an independent stream seed from `(seed, stream)` with the
/// splitmix64 finalizer, so that nearby inputs give unrelated outputs.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws an instance from the random packet model with a seeded generator.
pub fn random_instance(
    n: usize,
    k: usize,
    model: RandomModel,
    edges: &[(usize, usize)],
) -> Result<NetworkInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    random_instance_with_rng(n, k, model.q, edges, &mut rng)
}

/// As [`random_instance`], drawing from a caller-supplied generator.
///
/// Each packet's holder set is resampled until nonempty, which realizes the
/// conditioning exactly.
pub fn random_instance_with_rng<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    q: f64,
    edges: &[(usize, usize)],
    rng: &mut R,
) -> Result<NetworkInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter("random instances need n >= 2".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("random instances need k >= 1".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
    }
    let mut holdings = vec![Vec::new(); n];
    for p in 0..k {
        let mut attempts = 0u64;
        let holders = loop {
            attempts += 1;
            if attempts > RESAMPLE_CAP {
                return Err(Error::SamplingCap(RESAMPLE_CAP));
            }
            let h: Subset = (0..n).filter(|_| rng.gen_bool(q)).collect();
            if !h.is_empty() {
                break h;
            }
        };
        for i in holders.iter() {
            holdings[i].push(p);
        }
    }
    NetworkInstance::new(n, k, edges, holdings)
}

/// On-disk instance layout. All indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
    pub holdings: Vec<Vec<usize>>,
}

impl From<&NetworkInstance> for InstanceFile {
    fn from(inst: &NetworkInstance) -> Self {
        InstanceFile {
            n: inst.n,
            k: inst.k,
            edges: inst.edges().into_iter().map(|(a, b)| [a + 1, b + 1]).collect(),
            holdings: inst
                .holdings
                .iter()
                .map(|h| h.iter().map(|p| p + 1).collect())
                .collect(),
        }
    }
}

impl TryFrom<InstanceFile> for NetworkInstance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let shift = |v: usize, what: &str| {
            v.checked_sub(1).ok_or_else(|| {
                Error::InvalidInstance(format!("{what} index 0 found; indices are 1-based"))
            })
        };
        let mut edges = Vec::with_capacity(file.edges.len());
        for [a, b] in file.edges {
            edges.push((shift(a, "node")?, shift(b, "node")?));
        }
        let mut holdings = Vec::with_capacity(file.holdings.len());
        for held in file.holdings {
            holdings.push(
                held.into_iter()
                    .map(|p| shift(p, "packet"))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        NetworkInstance::new(file.n, file.k, &edges, holdings)
    }
}

pub fn instance_from_json(text: &str) -> Result<NetworkInstance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    NetworkInstance::try_from(file)
}

pub fn instance_to_json(inst: &NetworkInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceFile::from(inst))?)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<NetworkInstance> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub fn save_instance(inst: &NetworkInstance, path: impl AsRef<Path>) -> Result<()> {
    let mut text = instance_to_json(inst)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
