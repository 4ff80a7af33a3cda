//! Secret and private keys from a data exchange transcript.
//!
//! With uniform independent packets and linear maps, secrecy reduces to rank
//! conditions: a key map `K` is uniform iff it has full row rank, hidden from
//! an eavesdropper who sees the transcript `L` iff the row spaces of `K` and
//! `L` meet only in zero, and recoverable by a node iff `K` lies in the row
//! space of that node's packets together with `L`.

use std::collections::HashMap;

use serde::Serialize;

use crate::coding::{generate_scheme, verify_recovery, CodingScheme};
use crate::error::{Error, Result};
use crate::galois::{Elem, FieldMatrix, GaloisField};
use crate::instance::NetworkInstance;
use crate::solver::solve_clique;
use crate::subset::Subset;
use crate::topology::Topology;

/// Largest `|F|^k` accepted by [`enumerate_key_distribution`].
pub const ENUMERATION_LIMIT: usize = 4096;

/// A fully connected network and the nodes whose packets the eavesdropper
/// also holds; an empty set asks for a secret key, otherwise a private key.
#[derive(Clone, Debug)]
pub struct SecrecySetup {
    inst: NetworkInstance,
    compromised: Subset,
}

/// `T_D`: the surviving nodes and the packets outside `P_D`, with maps back
/// to the original indices.
#[derive(Clone, Debug)]
pub struct ReducedInstance {
    pub inst: NetworkInstance,
    pub nodes: Vec<usize>,
    pub packets: Vec<usize>,
}

impl SecrecySetup {
    pub fn new(inst: NetworkInstance, compromised: Subset) -> Result<Self> {
        if !inst.is_complete() {
            return Err(Error::NotFullyConnected);
        }
        if !compromised.is_subset_of(inst.nodes()) {
            return Err(Error::InvalidParameter(format!(
                "compromised set {compromised:?} names nodes outside the network"
            )));
        }
        if compromised == inst.nodes() {
            return Err(Error::InvalidParameter("every node is compromised".into()));
        }
        Ok(SecrecySetup { inst, compromised })
    }

    pub fn instance(&self) -> &NetworkInstance {
        &self.inst
    }

    pub fn compromised(&self) -> Subset {
        self.compromised
    }

    pub fn is_private(&self) -> bool {
        !self.compromised.is_empty()
    }

    /// `P_D`, sorted.
    pub fn compromised_packets(&self) -> Vec<usize> {
        (0..self.inst.k())
            .filter(|&p| self.inst.holders(p).intersects(self.compromised))
            .collect()
    }

    /// Nodes that must recover the key.
    pub fn trusted(&self) -> Vec<usize> {
        self.compromised.complement(self.inst.n()).iter().collect()
    }

    pub fn reduced(&self) -> Result<ReducedInstance> {
        let nodes = self.trusted();
        let leaked = self.compromised_packets();
        let packets: Vec<usize> = (0..self.inst.k()).filter(|p| leaked.binary_search(p).is_err()).collect();
        let index: HashMap<usize, usize> = packets.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let holdings = nodes
            .iter()
            .map(|&i| {
                self.inst
                    .holdings(i)
                    .iter()
                    .filter_map(|p| index.get(p).copied())
                    .collect()
            })
            .collect();
        let m = nodes.len();
        let inst = NetworkInstance::new(m, packets.len(), &Topology::Complete.edges(m)?, holdings)?;
        Ok(ReducedInstance { inst, nodes, packets })
    }

    /// `C_SK = k - M*(T)` when nothing is compromised, otherwise
    /// `C_PK = (k - |P_D|) - M*(T_D)`.
    pub fn capacity(&self) -> Result<usize> {
        let reduced = self.reduced()?;
        let m = solve_clique(&reduced.inst)?.total.expect("clique solves report a total");
        Ok(reduced.inst.k() - m as usize)
    }
}

/// `C_SK = k - M*(T)` for a fully connected network.
pub fn sk_capacity(inst: &NetworkInstance) -> Result<usize> {
    SecrecySetup::new(inst.clone(), Subset::EMPTY)?.capacity()
}

/// `C_PK = (k - |P_D|) - M*(T_D)`.
pub fn pk_capacity(setup: &SecrecySetup) -> Result<usize> {
    if !setup.is_private() {
        return Err(Error::InvalidParameter("private key needs a compromised node".into()));
    }
    setup.capacity()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyMap {
    pub field: GaloisField,
    /// `C x k`: the key is `key * p`.
    pub key: FieldMatrix,
    /// Everything the eavesdropper sees as linear functions of the packets.
    pub transcript: FieldMatrix,
    /// The capacity the key should reach; more rows than the key has means
    /// the scheme revealed more than necessary.
    pub capacity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificates {
    /// `rank K = C`.
    pub uniform: bool,
    /// `rank [L; K] = rank L + C`.
    pub secret: bool,
    /// Per trusted node: `K` lies in the row space of its packets and `L`.
    pub recoverable: Vec<bool>,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.uniform && self.secret && self.recoverable.iter().all(|&r| r)
    }
}

impl KeyMap {
    pub fn len(&self) -> usize {
        self.key.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.key.rows() == 0
    }

    pub fn shortfall(&self) -> bool {
        self.len() < self.capacity
    }
}

/// Unit rows for `packets` in a `k`-column matrix.
pub fn indicator_rows(k: usize, packets: &[usize]) -> FieldMatrix {
    let mut m = FieldMatrix::zeros(packets.len(), k);
    for (r, &p) in packets.iter().enumerate() {
        m.set(r, p, 1);
    }
    m
}

/// Each trusted node's own packets as indicator rows.
pub fn node_views(setup: &SecrecySetup) -> Vec<FieldMatrix> {
    let k = setup.inst.k();
    setup
        .trusted()
        .into_iter()
        .map(|i| indicator_rows(k, setup.inst.holdings(i)))
        .collect()
}

/// Checks the three rank conditions.
pub fn verify_secrecy(keymap: &KeyMap, views: &[FieldMatrix]) -> Result<Certificates> {
    let f = &keymap.field;
    let c = keymap.key.rows();
    let l_rank = keymap.transcript.rank(f);
    let uniform = keymap.key.rank(f) == c;
    let secret = keymap.transcript.stack(&keymap.key)?.rank(f) == l_rank + c;
    let recoverable = views
        .iter()
        .map(|v| v.stack(&keymap.transcript)?.row_space_contains(f, &keymap.key))
        .collect::<Result<Vec<bool>>>()?;
    Ok(Certificates {
        uniform,
        secret,
        recoverable,
    })
}

/// Builds a key from a recovery-achieving scheme. For a secret key the
/// scheme runs on the whole network; for a private key it runs on `T_D`
/// (packet indices of the reduced instance) and `P_D` joins the transcript
/// as unit rows. The key takes the unit vectors of the non-pivot columns of
/// the reduced transcript, lowest index first, which completes its row
/// space to the whole space. All certificates are checked before return.
pub fn extract_key(setup: &SecrecySetup, scheme: &CodingScheme) -> Result<KeyMap> {
    let k = setup.inst.k();
    let field = scheme.field.clone();
    let reduced = setup.reduced()?;
    let report = verify_recovery(&reduced.inst, scheme)?;
    if !report.recovered {
        return Err(Error::NoRecovery(report.ranks));
    }
    let leaked = setup.compromised_packets();
    let mut transcript = indicator_rows(k, &leaked);
    for t in &scheme.transmissions {
        let mut row = vec![0; k];
        for (j, &c) in t.coeffs.iter().enumerate() {
            row[reduced.packets[j]] = c;
        }
        transcript.push_row(&row)?;
    }
    let (_, pivots) = transcript.rref(&field);
    let free: Vec<usize> = (0..k).filter(|c| pivots.binary_search(c).is_err()).collect();
    let keymap = KeyMap {
        field,
        key: indicator_rows(k, &free),
        transcript,
        capacity: setup.capacity()?,
    };
    if keymap.len() > keymap.capacity {
        return Err(Error::PropertyViolation(format!(
            "key of {} symbols exceeds capacity {}",
            keymap.len(),
            keymap.capacity
        )));
    }
    let certs = verify_secrecy(&keymap, &node_views(setup))?;
    if !certs.all() {
        return Err(Error::PropertyViolation(format!("key certificates failed: {certs:?}")));
    }
    Ok(keymap)
}

/// Solves `T_D` (or `T`), codes an optimal schedule over `field` and
/// extracts the key.
pub fn generate_key(setup: &SecrecySetup, field: &GaloisField, seed: u64) -> Result<KeyMap> {
    let reduced = setup.reduced()?;
    let sched = solve_clique(&reduced.inst)?
        .schedule
        .expect("clique solves report a schedule");
    let scheme = generate_scheme(&reduced.inst, &sched, field, seed)?;
    extract_key(setup, &scheme)
}

/// Joint counts of (transcript value, key value) over every packet
/// realization.
#[derive(Clone, Debug)]
pub struct KeyDistribution {
    pub realizations: usize,
    pub key_values: usize,
    pub counts: HashMap<Vec<Elem>, HashMap<Vec<Elem>, usize>>,
}

impl KeyDistribution {
    /// Every key value is equally likely given every transcript value, which
    /// is `I(K; F) = 0` together with a uniform key.
    pub fn uniform_given_transcript(&self) -> bool {
        self.counts.values().all(|by_key| {
            let total: usize = by_key.values().sum();
            by_key.len() == self.key_values
                && by_key.values().all(|&c| c * self.key_values == total)
        })
    }
}

/// Enumerates all `|F|^k` packet vectors.
pub fn enumerate_key_distribution(keymap: &KeyMap) -> Result<KeyDistribution> {
    let f = &keymap.field;
    let k = keymap.key.cols();
    let q = f.order();
    let total = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(q).filter(|&v| v <= ENUMERATION_LIMIT));
    let Some(realizations) = total else {
        return Err(Error::TooLarge {
            what: "packet realizations |F|^k",
            value: q.saturating_pow(k as u32),
            limit: ENUMERATION_LIMIT,
        });
    };
    let key_values = q.pow(keymap.key.rows() as u32);
    let mut counts: HashMap<Vec<Elem>, HashMap<Vec<Elem>, usize>> = HashMap::new();
    let mut p = vec![0 as Elem; k];
    for _ in 0..realizations {
        let seen = keymap.transcript.mul_vec(f, &p)?;
        let key = keymap.key.mul_vec(f, &p)?;
        *counts.entry(seen).or_default().entry(key).or_default() += 1;
        for e in p.iter_mut() {
            *e += 1;
            if (*e as usize) < q {
                break;
            }
            *e = 0;
        }
    }
    Ok(KeyDistribution {
        realizations,
        key_values,
        counts,
    })
}
