use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::lrs::Lrs;
use crate::pexp::{pexp_solve, PexpInstance};
use crate::psets::pset_enumerate;
use crate::torus::{return_set, return_set_dense, selfmap_iterate, TorusInstance};
use crate::textfmt::Document;

fn pm(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `{sum_j c_j p^(n_j)} ∩ [0, bound]` by looping over exponents.
fn oracle(p: u64, c: &[u64], bound: u64) -> Vec<BigInt> {
    let mut powers = vec![1u64];
    while powers.last().unwrap() * p <= bound {
        powers.push(powers.last().unwrap() * p);
    }
    let mut sums = BTreeSet::from([0u64]);
    for &cj in c {
        sums = sums.iter().flat_map(|s| powers.iter().map(move |q| s + cj * q)).filter(|&s| s <= bound).collect();
    }
    sums.into_iter().map(BigInt::from).collect()
}

#[test]
fn vandermonde_examples() {
    assert_eq!(vandermonde_inverse(pm(3)).unwrap(), vec![vec![2, 2], vec![2, 1]]);
    for q in [3u64, 5, 7, 11] {
        let p = pm(q);
        let a = vandermonde_inverse(p).unwrap();
        for (k, row) in a.iter().enumerate() {
            for j in 0..=2 * (q - 1) {
                let s = row.iter().enumerate().fold(0, |acc, (i, &v)| p.add(acc, p.mul(v, p.pow(i as u64 + 1, j))));
                assert_eq!(s, ((j % (q - 1)) as usize == k) as u64, "p={q} k={k} j={j}");
            }
        }
    }
    assert!(vandermonde_inverse(pm(2)).is_err());
}

#[test]
fn build_rejects_large_multiplicities() {
    assert!(matches!(build_pset_variety(pm(5), &[2, 2]), Err(Error::Domain(_))));
    assert!(matches!(build_pset_variety(pm(5), &[4]), Err(Error::Domain(_))));
}

#[test]
fn membership_examples() {
    let pv = build_pset_variety(pm(5), &[1, 1]).unwrap();
    assert_eq!(pv.unit_row, 2);
    assert_eq!(pv.zero_rows, vec![3]);
    assert!(pv.contains_multiple(&BigInt::from(6)).unwrap());
    assert!(!pv.contains_multiple(&BigInt::from(7)).unwrap());
    assert!(!pv.contains_multiple(&BigInt::from(-1)).unwrap());
    assert!(pv.contains_multiple(&(BigInt::from(5).pow(30) + 1)).unwrap());

    let pv = build_pset_variety(pm(7), &[1, 2]).unwrap();
    assert!(pv.contains_multiple(&BigInt::from(15)).unwrap());
    assert!(pv.contains_multiple(&BigInt::from(21)).unwrap()); // 7 + 2*7
    assert!(!pv.contains_multiple(&BigInt::from(57)).unwrap()); // 1 + 7 + 49 has the wrong pattern
    assert!(pv.contains_multiple(&BigInt::from(3)).unwrap());
    assert!(!pv.contains_multiple(&BigInt::from(-1)).unwrap());
}

#[test]
fn exponent_set_examples() {
    let pv = build_pset_variety(pm(5), &[1, 1]).unwrap();
    assert_eq!(exponent_set(&pv, &BigInt::from(30)).unwrap(), big(&[2, 6, 10, 26, 30]));
    assert!(exponent_set(&pv, &BigInt::from(1)).unwrap().is_empty());
    assert!(exponent_set(&pv, &BigInt::from(-4)).unwrap().is_empty());
    let pv = build_pset_variety(pm(7), &[1, 2]).unwrap();
    assert_eq!(exponent_set(&pv, &BigInt::from(25)).unwrap(), big(&[3, 9, 15, 21]));
}

#[test]
fn exponent_set_matches_enumeration_and_factored_membership() {
    for (q, c) in [(5u64, vec![1u64]), (5, vec![1, 1]), (7, vec![1, 2]), (7, vec![3]), (7, vec![2, 2]), (11, vec![1, 1, 2])] {
        let p = pm(q);
        let pv = build_pset_variety(p, &c).unwrap();
        let bound = 200u64;
        let got = exponent_set(&pv, &BigInt::from(bound)).unwrap();
        assert_eq!(got, oracle(q, &c, bound), "p={q} c={c:?}");
        assert_eq!(got, pset_enumerate(&pv.target(), p, &BigInt::from(bound)).unwrap());
        for m in 0..(if q == 11 { 30 } else { 60 }) {
            assert_eq!(pv.contains_multiple(&BigInt::from(m)).unwrap(), got.contains(&BigInt::from(m)), "m={m}");
        }
    }
}

#[test]
fn encoding_examples() {
    let p = pm(5);
    let base = RatFunc::from_poly(FpPoly::from_i64s(&[1, 1], p));
    let fib = Lrs::from_i64s(&[-1, -1], &[0, 1]).unwrap();
    let enc = encode_lrs(&fib, &base, p).unwrap();
    let x6 = selfmap_iterate(&enc.map(), &enc.q, 6).unwrap();
    assert_eq!(enc.project(&x6).unwrap(), base.int_pow(&BigInt::from(8)).unwrap());
    assert!(enc.verify(25).unwrap());

    let seven = Lrs::constant(BigInt::from(7));
    let enc = encode_lrs(&seven, &base, p).unwrap();
    assert_eq!(enc.dim(), 1);
    assert!(enc.phi_matrix.get(0, 0) == &BigInt::from(1));
    assert_eq!(enc.q.coords()[0], base.int_pow(&BigInt::from(7)).unwrap());

    let u = Lrs::from_i64s(&[3, -4], &[-1, 1]).unwrap();
    let enc = encode_lrs(&u, &base, p).unwrap();
    let x3 = selfmap_iterate(&enc.map(), &enc.q, 3).unwrap();
    assert_eq!(enc.project(&x3).unwrap(), base.int_pow(&BigInt::from(25)).unwrap());
    assert!(enc.verify(25).unwrap());
}

#[test]
fn corrupted_encoding_fails_verification() {
    let p = pm(3);
    let base = RatFunc::from_poly(FpPoly::from_i64s(&[0, 1, 1], p));
    let u = Lrs::from_i64s(&[-1, -1], &[2, -3]).unwrap();
    let mut enc = encode_lrs(&u, &base, p).unwrap();
    enc.phi_matrix.set(1, 1, BigInt::from(2));
    assert!(!enc.verify(10).unwrap());
}

fn check_instance(u: &Lrs, q: u64, c: &[u64], n_max: u64) -> Vec<u64> {
    let p = pm(q);
    let inst = dml_instance(u, p, c).unwrap();
    let hits = return_set(&inst.map, &inst.start, &inst.variety, n_max).unwrap();
    let terms = c.iter().map(|&x| (BigInt::from(x), 1)).collect();
    let solved: Vec<u64> = pexp_solve(&PexpInstance::new(u.clone(), p, terms), n_max).unwrap().iter().map(|s| s.n).collect();
    assert_eq!(hits, solved, "{u}");
    hits
}

#[test]
fn instance_examples() {
    let fib = Lrs::from_i64s(&[-1, -1], &[0, 1]).unwrap();
    assert!(check_instance(&fib, 5, &[1, 1], 40).contains(&3));
    let ident = Lrs::from_i64s(&[1, -2], &[0, 1]).unwrap();
    assert_eq!(check_instance(&ident, 5, &[1, 1], 40), vec![2, 6, 10, 26, 30]);
    let two = Lrs::constant(BigInt::from(2));
    assert_eq!(check_instance(&two, 5, &[1, 1], 12), (0..=12).collect::<Vec<_>>());
    let u = Lrs::from_i64s(&[3, -4], &[-1, 1]).unwrap();
    check_instance(&u, 7, &[1, 2], 20);
}

#[test]
fn small_instance_agrees_with_dense_orbit() {
    let ident = Lrs::from_i64s(&[1, -2], &[0, 1]).unwrap();
    let inst = dml_instance(&ident, pm(5), &[1, 1]).unwrap();
    assert_eq!(return_set_dense(&inst.map, &inst.start, &inst.variety, 27).unwrap(), vec![2, 6, 10, 26]);
}

#[test]
fn instances_serialize_to_the_torus_format() {
    let fib = Lrs::from_i64s(&[-1, -1], &[0, 1]).unwrap();
    let inst = dml_instance(&fib, pm(5), &[1, 1]).unwrap().to_torus_instance(40).unwrap();
    let text = inst.to_document().render();
    let back = TorusInstance::from_document(&Document::parse(&text).unwrap()).unwrap();
    assert_eq!(back, inst);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn encoding_identity(
        q in prop_oneof![Just(3u64), Just(5u64)],
        (coeffs, initial) in (1usize..=4).prop_flat_map(|d| (
            proptest::collection::vec(-3i64..=3, d),
            proptest::collection::vec(-5i64..=5, d),
        )),
        base_kind in 0u8..3,
    ) {
        let p = pm(q);
        let u = Lrs::from_i64s(&coeffs, &initial).unwrap();
        let base = match base_kind {
            0 => RatFunc::from_poly(FpPoly::from_i64s(&[1, 1], p)),
            1 => RatFunc::from_poly(FpPoly::from_i64s(&[1, 0, 1], p)).inv().unwrap(),
            _ => RatFunc::constant(2, p),
        };
        let enc = encode_lrs(&u, &base, p).unwrap();
        prop_assert!(enc.verify(25).unwrap());
    }
}

