use std::time::Instant;

use etaprove::ranktheorems::*;
use etaprove::upalgebra::{pb_series, reduce_to_tpoly};
use etaprove::TPoly;
use num_bigint::BigInt;

/// `N_e(n) - N_o(n)` by enumerating partitions and their ranks.
fn rank_parity_by_enumeration(n: usize) -> i64 {
    fn walk(rest: usize, max: usize, largest: usize, parts: usize, acc: &mut i64) {
        if rest == 0 {
            let rank = largest as i64 - parts as i64;
            *acc += if rank % 2 == 0 { 1 } else { -1 };
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            walk(rest - p, p, if largest == 0 { p } else { largest }, parts + 1, acc);
        }
    }
    if n == 0 {
        return 1;
    }
    let mut acc = 0;
    walk(n, n, 0, 0, &mut acc);
    acc
}

#[test]
fn table_matches_rank_enumeration() {
    let t = af_table(40);
    for n in 0..=40 {
        assert_eq!(t.values()[n], BigInt::from(rank_parity_by_enumeration(n)), "n = {n}");
    }
}

#[test]
fn leading_coefficients() {
    let t = af_table(12);
    let want = [1, 1, -2, 3, -3, 3, -5, 7, -6, 6, -10, 12, -11];
    assert_eq!(t.values(), want.map(BigInt::from).as_slice());
}

#[test]
fn eulerian_and_bilateral_agree() {
    let t = af_table(300);
    assert_eq!(t.values(), af_eulerian(300).as_slice());
}

#[test]
fn generating_functions() {
    let t = af_table(1400);
    assert!(verify_af5id(200, &t).unwrap());
    assert!(verify_af7id(200, &t).unwrap());
}

#[test]
fn classical_anchors() {
    assert!(verify_j1_dissection(500));
    assert!(verify_quintic_b(500));
}

#[test]
fn mod5_congruences() {
    let start = Instant::now();
    let t = af_table(25_600);
    eprintln!("table: {:?}", start.elapsed());
    let r = check_congruence(CongruenceFamily::Mod5, 3, (0, 100), &t).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.modulus, 5);
    let r = check_congruence(CongruenceFamily::Mod5, 4, (0, 40), &t).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.modulus, 25);
    for a in 2..=4 {
        let r = check_cf_congruence(a, &t);
        assert!(r.passed() && r.n_range.1 >= 1, "{r:?}");
    }
    let r = check_congruence(CongruenceFamily::Mod7, 3, (0, 50), &t).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.modulus, 7);
    // a_f(99) + a_f(4) = 0 mod 5.
    let s: BigInt = t.get(99).unwrap() + t.get(4).unwrap();
    assert_eq!(s % 5, BigInt::from(0));
    eprintln!("total: {:?}", start.elapsed());
}

#[test]
fn residues_detect_congruence() {
    let r = af_residues(25_600, 25);
    for n in 0..=40 {
        assert_eq!((r[625 * n + 599] + r[25 * n + 24]) % 25, 0);
    }
}

#[test]
fn l_sequence_matches_cf() {
    let t = af_table(3000);
    let ls = l_sequence(2, 600).unwrap();
    assert!(check_l_coefficients(&ls, &t).unwrap().is_empty());
    let l1 = reduce_to_tpoly(&ls[1], &pb_series(ls[1].prec_numerator()), 1).unwrap();
    assert_eq!(l1, TPoly::from_i64s(&[(1, 1), (2, -50), (3, 350), (4, -875), (5, 625)]));
}

#[test]
fn l_valuations() {
    let start = Instant::now();
    let r = verify_l_valuations(4, L_FULL_DEPTH).unwrap();
    for e in &r.entries {
        eprintln!(
            "L_{}: {:?} deg {:?} ord {:?} viol {} mism {}",
            e.index,
            e.route,
            e.degree,
            e.ord_t,
            e.violations.len(),
            e.mismatches.len()
        );
    }
    assert!(r.passed());
    eprintln!("total: {:?}", start.elapsed());
}
