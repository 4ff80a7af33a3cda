use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use coopex::coding::{decode_payloads, generate_scheme, load_scheme, save_scheme, verify_recovery};
use coopex::feasibility::{is_feasible, load_schedule, save_schedule, sequence_lhs, RrConstraints};
use coopex::instance::{load_instance, random_instance_with_rng, save_instance};
use coopex::secrecy::{generate_key, node_views, verify_secrecy, SecrecySetup};
use coopex::solver::{clique_estimate, lp_cutset, solve_clique, solve_t_divisible};
use coopex::{GaloisField, NetworkInstance, Subset, Topology, TransmissionSchedule};

fn random_clique(n: usize, k: usize, seed: u64) -> NetworkInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance_with_rng(n, k, 0.5, &Topology::Complete.edges(n).unwrap(), &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clique_solve_code_decode(n in 2usize..=6, k in 1usize..=12, seed in any::<u64>()) {
        let inst = random_clique(n, k, seed);
        let report = solve_clique(&inst).unwrap();
        let total = report.total.unwrap();
        let sched = report.schedule.unwrap();
        prop_assert_eq!(sched.total(), total);
        prop_assert!(is_feasible(&inst, &sched).unwrap().feasible);
        // both lower bounds hold
        prop_assert!(BigRational::from_integer(total.into()) >= lp_cutset(&inst).unwrap().value);
        prop_assert!(total >= clique_estimate(&inst));

        let field = GaloisField::gf256();
        let scheme = generate_scheme(&inst, &sched, &field, seed).unwrap();
        prop_assert!(verify_recovery(&inst, &scheme).unwrap().recovered);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let packets: Vec<Vec<u16>> = (0..k).map(|_| (0..3).map(|_| field.random(&mut rng)).collect()).collect();
        let decoded = decode_payloads(&inst, &scheme, &packets).unwrap();
        for node in decoded {
            prop_assert_eq!(&node, &packets);
        }
    }

    #[test]
    fn flow_verdict_matches_inequalities_with_witness(
        n in 3usize..=5,
        k in 1usize..=3,
        line in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let topo = if line { Topology::Line } else { Topology::Cycle };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance_with_rng(n, k, 0.4, &topo.edges(n).unwrap(), &mut rng).unwrap();
        let r = rng.gen_range(1..=3);
        let b = (0..n).map(|_| (0..r).map(|_| rng.gen_range(0..=2)).collect()).collect();
        let sched = TransmissionSchedule::new(b).unwrap();
        let report = is_feasible(&inst, &sched).unwrap();
        let family = RrConstraints::new(&inst, r).unwrap();
        prop_assert_eq!(report.feasible, family.contains(&sched));
        if let Some(w) = report.witness {
            prop_assert!(w.sequence.is_valid(&inst));
            prop_assert_eq!(sequence_lhs(&inst, &sched, &w.sequence), w.lhs);
            prop_assert!(w.lhs < w.rhs as u64);
            prop_assert_eq!(k as u64 - w.rhs as u64 + w.lhs, w.flow);
        }
    }

    #[test]
    fn divisible_values_sit_above_cutset(n in 2usize..=5, k in 1usize..=10, seed in any::<u64>()) {
        let inst = random_clique(n, k, seed);
        let cut = lp_cutset(&inst).unwrap().value;
        let one = solve_t_divisible(&inst, 1).unwrap().value;
        let two = solve_t_divisible(&inst, 2).unwrap().value;
        prop_assert!(two >= cut && two <= one);
        prop_assert!(&one - &cut < BigRational::from_integer(1.into()));
    }

    #[test]
    fn generated_keys_meet_capacity(n in 2usize..=5, k in 1usize..=10, d in 0usize..5, seed in any::<u64>()) {
        let inst = random_clique(n, k, seed);
        let compromised = if d < n - 1 { Subset::singleton(d) } else { Subset::EMPTY };
        let setup = SecrecySetup::new(inst, compromised).unwrap();
        let capacity = setup.capacity().unwrap();
        let key = generate_key(&setup, &GaloisField::gf256(), seed).unwrap();
        prop_assert_eq!(key.len(), capacity);
        prop_assert!(!key.shortfall());
        prop_assert!(verify_secrecy(&key, &node_views(&setup)).unwrap().all());
    }
}

#[test]
fn sk_capacity_is_k_minus_optimum() {
    for seed in 0..20 {
        let inst = random_clique(4, 15, seed);
        let m = solve_clique(&inst).unwrap().total.unwrap() as usize;
        let setup = SecrecySetup::new(inst, Subset::EMPTY).unwrap();
        assert_eq!(setup.capacity().unwrap(), 15 - m);
    }
}

#[test]
fn files_round_trip() {
    let dir = TempDir::new().unwrap();
    let inst = random_clique(4, 6, 3);
    let sched = solve_clique(&inst).unwrap().schedule.unwrap();
    let scheme = generate_scheme(&inst, &sched, &GaloisField::gf256(), 3).unwrap();

    let (ip, sp, cp) = (dir.path().join("i.json"), dir.path().join("s.json"), dir.path().join("c.json"));
    save_instance(&inst, &ip).unwrap();
    save_schedule(&sched, &sp).unwrap();
    save_scheme(&scheme, &cp).unwrap();

    let inst2 = load_instance(&ip).unwrap();
    assert_eq!(inst2, inst);
    assert_eq!(load_schedule(&sp).unwrap(), sched);
    let scheme2 = load_scheme(&cp).unwrap();
    assert_eq!(scheme2, scheme);
    assert!(verify_recovery(&inst2, &scheme2).unwrap().recovered);
}
