//! Solvers for coded cooperative data exchange: minimum-transmission
//! schedules, schedule certification by max-flow, random linear coding
//! schemes over GF(2^m), and secret-key extraction.

pub mod coding;
pub mod error;
pub mod experiments;
pub mod feasibility;
pub mod galois;
pub mod ilp;
pub mod instance;
pub mod lp;
pub mod maxflow;
pub mod oracle;
pub mod secrecy;
pub mod sfm;
pub mod solver;
pub mod subset;
pub mod topology;

pub use coding::{generate_scheme, verify_recovery, CodingScheme};
pub use error::{Error, Result};
pub use experiments::{run_campaign, Campaign, CampaignKind};
pub use feasibility::{is_feasible, TransmissionSchedule};
pub use galois::{FieldMatrix, GaloisField};
pub use instance::NetworkInstance;
pub use secrecy::SecrecySetup;
pub use solver::{solve_clique, SolveReport};
pub use subset::Subset;
pub use topology::Topology;
