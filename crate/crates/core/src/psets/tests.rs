use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;

fn p(v: u64) -> PrimeModulus {
    PrimeModulus::new(v).unwrap()
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Every value of `s` with all exponents below `max_exp`, as non-negative integers.
fn brute_values(s: &PSet, p: PrimeModulus, max_exp: u64) -> BTreeSet<BigInt> {
    let m = s.len();
    let mut out = BTreeSet::new();
    let mut exps = vec![0u64; m];
    loop {
        let v = s.value_at(p, &exps).unwrap();
        if v.is_integer() && !v.is_negative() {
            out.insert(v.to_integer());
        }
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            exps[i] += 1;
            if exps[i] < max_exp && (s.terms()[i].step > 0 || exps[i] == 0) {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn membership_examples() {
    let s = PSet::from_ints(&[(1, 1), (1, 1)]).unwrap();
    assert_eq!(pset_membership(&big(4), &s, p(3)).unwrap(), Some(vec![0, 1]));
    assert_eq!(pset_membership(&big(5), &s, p(3)).unwrap(), None);
    let s = PSet::from_ints(&[(2, 0), (1, 1)]).unwrap();
    assert_eq!(pset_membership(&big(3), &s, p(5)).unwrap(), Some(vec![0, 0]));
}

#[test]
fn enumerate_examples() {
    let s = PSet::from_ints(&[(1, 1), (1, 1)]).unwrap();
    let got: Vec<i64> = pset_enumerate(&s, p(5), &big(30)).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
    assert_eq!(got, vec![2, 6, 10, 26, 30]);
    assert!(pset_enumerate(&s, p(5), &big(1)).unwrap().is_empty());
    let s = PSet::from_ints(&[(3, 2)]).unwrap();
    let got: Vec<i64> = pset_enumerate(&s, p(5), &big(100)).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
    assert_eq!(got, vec![3, 75]);
}

#[test]
fn enumerate_with_cancellation_matches_brute_force() {
    let s = PSet::from_ints(&[(2, 1), (-1, 1)]).unwrap();
    let got: BTreeSet<BigInt> = pset_enumerate(&s, p(3), &big(200)).unwrap().into_iter().collect();
    let want: BTreeSet<BigInt> = brute_values(&s, p(3), 12).into_iter().filter(|x| *x <= big(200)).collect();
    assert_eq!(got, want);
}

#[test]
fn rational_coefficients() {
    // (1/2)(3^a + 3^b) hits 1, 2, 3, 5, 6, 9, ...
    let s: PSet = "1/2*p^(1*n_1)+1/2*p^(1*n_2)".parse().unwrap();
    let got: Vec<i64> = pset_enumerate(&s, p(3), &big(15)).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
    assert_eq!(got, vec![1, 2, 3, 5, 6, 9, 14, 15]);
    assert_eq!(pset_membership(&big(5), &s, p(3)).unwrap(), Some(vec![0, 2]));
    assert_eq!(pset_membership(&big(4), &s, p(3)).unwrap(), None);
}

#[test]
fn text_round_trip() {
    let s: PSet = "3*p^(2*n_1) + -1/4*p^(1*n_2)+7*p^(0*n_3)".parse().unwrap();
    assert_eq!(s.to_string(), "3*p^(2*n_1)+-1/4*p^(1*n_2)+7*p^(0*n_3)");
    assert_eq!(s.to_string().parse::<PSet>().unwrap(), s);
    assert!("".parse::<PSet>().is_err());
    assert!("1*p^(x*n_1)".parse::<PSet>().is_err());
    let a: ArithProg = "4*k+3".parse().unwrap();
    assert_eq!(a, ArithProg::new(4, 3));
    assert_eq!(a.to_string().parse::<ArithProg>().unwrap(), a);
}

#[test]
fn ap_intersection_examples() {
    let s = PSet::from_ints(&[(1, 1)]).unwrap();
    assert!(ap_intersect_pset(&ArithProg::new(2, 0), &s, p(3)).unwrap().is_empty());
    let odd = ap_intersect_pset(&ArithProg::new(2, 1), &s, p(3)).unwrap();
    assert_eq!(odd, vec![s.clone()]);
    assert_eq!(
        ap_intersect_pset(&ArithProg::singleton(9), &s, p(3)).unwrap(),
        vec![PSet::constant(BigRational::from_integer(big(9)))]
    );
    assert!(ap_intersect_pset(&ArithProg::singleton(10), &s, p(3)).unwrap().is_empty());
}

#[test]
fn ap_offset_beyond_modulus() {
    let s = PSet::from_ints(&[(1, 1)]).unwrap();
    // 1 and 4 are 1 mod 3 but below 7
    assert!(ap_intersect_pset(&ArithProg::new(3, 7), &s, p(2)).is_err());
    // 1 is 1 mod 4 but below 9
    assert!(ap_intersect_pset(&ArithProg::new(4, 9), &s, p(3)).is_err());
    // powers of 3 are 1 or 3 mod 8, so nothing below 13 is 5 mod 8
    let parts = ap_intersect_pset(&ArithProg::new(8, 13), &s, p(3)).unwrap();
    assert!(parts.is_empty());
}

#[test]
fn bounded_intersection_examples() {
    let s1 = PSet::from_ints(&[(1, 1)]).unwrap();
    let same = pset_intersect_bounded(&s1, &s1, p(3), &big(500)).unwrap();
    assert_eq!(same.candidate, Some(vec![s1.clone()]));

    let s2 = PSet::from_ints(&[(2, 1), (-1, 1)]).unwrap();
    let r = pset_intersect_bounded(&s1, &s2, p(3), &big(100)).unwrap();
    let els: Vec<i64> = r.elements.iter().map(|x| x.to_i64().unwrap()).collect();
    assert_eq!(els, vec![1, 3, 9, 27, 81]);
    assert_eq!(r.candidate, Some(vec![s1.clone()]));

    let one = PSet::from_ints(&[(1, 0)]).unwrap();
    let two = PSet::from_ints(&[(2, 0)]).unwrap();
    let r = pset_intersect_bounded(&one, &two, p(3), &big(10)).unwrap();
    assert!(r.elements.is_empty());
    assert_eq!(r.candidate, Some(vec![]));
}

#[test]
fn bounded_intersection_fits_a_new_pset() {
    // {5^a + 5^b} ∩ {1 + 5^c}: elements 2, 6, 26, ... = {1 + 5^c}
    let s1 = PSet::from_ints(&[(1, 1), (1, 1)]).unwrap();
    let s2 = PSet::from_ints(&[(1, 1), (1, 0)]).unwrap();
    let r = pset_intersect_bounded(&s1, &s2, p(5), &big(100_000)).unwrap();
    let cand = r.candidate.expect("fits");
    assert!(cand.iter().all(|c| c.len() <= 2));
}

#[test]
fn desc_verify_examples() {
    let evens = |n: u64| n % 2 == 0;
    let mut d = ReturnSetDesc::new(p(3), vec![ArithProg::new(2, 0)], vec![], vec![]);
    assert!(desc_verify(&mut d, evens, 10_000).unwrap());
    assert_eq!(d.verified_bound, Some(10_000));

    let hits = [1u64, 4, 9];
    let mut d = ReturnSetDesc::new(p(3), vec![], vec![], hits.to_vec());
    assert!(desc_verify(&mut d, |n| hits.contains(&n), 20).unwrap());
    let mut d = ReturnSetDesc::new(p(3), vec![], vec![], vec![1, 4]);
    assert!(!desc_verify(&mut d, |n| hits.contains(&n), 20).unwrap());
    assert_eq!(d.verified_bound, None);
}

#[test]
fn desc_document_round_trip() {
    let mut d = ReturnSetDesc::new(
        p(5),
        vec![ArithProg::new(6, 2), ArithProg::singleton(1)],
        vec![PSet::from_ints(&[(1, 1), (1, 1)]).unwrap()],
        vec![3, 17],
    );
    d.verified_bound = Some(40);
    let text = d.to_string();
    let back = ReturnSetDesc::from_document(&crate::textfmt::Document::parse(&text).unwrap()).unwrap();
    assert_eq!(back, d);
    let empty = ReturnSetDesc::new(p(2), vec![], vec![], vec![]);
    let back = ReturnSetDesc::from_document(&crate::textfmt::Document::parse(&empty.to_string()).unwrap()).unwrap();
    assert_eq!(back, empty);
}

#[test]
fn fitting_finds_structures() {
    // powers of 3 and all multiples of 7 from 14
    let n_max = 3000;
    let sols: Vec<u64> = (0..=n_max).filter(|&n| (n % 7 == 0 && n >= 14) || [1, 3, 9, 27, 81, 243, 729, 2187].contains(&n)).collect();
    let mut d = fit::fit_description(&sols, n_max, p(3), fit::FitShape::ApAndPsets).unwrap();
    assert_eq!(d.aps, vec![ArithProg::new(7, 14)]);
    assert_eq!(d.psets, vec![PSet::from_ints(&[(1, 1)]).unwrap()]);
    assert!(d.exceptional.is_empty());
    let set: BTreeSet<u64> = sols.iter().copied().collect();
    assert!(desc_verify(&mut d, |n| set.contains(&n), n_max).unwrap());

    let sums: Vec<u64> = vec![2, 6, 10, 26, 30, 50, 126, 130, 150, 250, 626, 630, 650, 750, 1250];
    let d = fit::fit_description(&sums, 1300, p(5), fit::FitShape::ApAndPsets).unwrap();
    assert_eq!(d.psets, vec![PSet::from_ints(&[(1, 1), (1, 1)]).unwrap()]);
    let d = fit::fit_description(&sums, 1300, p(5), fit::FitShape::ApOnly).unwrap();
    assert!(d.is_ap_only());
    assert_eq!(d.exceptional, sums);
}

fn arb_pset() -> impl Strategy<Value = PSet> {
    prop::collection::vec((-6i64..=6, 0u32..=3), 1..=3).prop_map(|t| PSet::from_ints(&t).unwrap())
}

fn arb_prime() -> impl Strategy<Value = PrimeModulus> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn membership_agrees_with_enumeration(s in arb_pset(), q in arb_prime(), probes in prop::collection::vec(0i64..3000, 8)) {
        let bound = big(3000);
        let listed: BTreeSet<BigInt> = pset_enumerate(&s, q, &bound).unwrap().into_iter().collect();
        for m in probes {
            let w = pset_membership(&big(m), &s, q).unwrap();
            prop_assert_eq!(w.is_some(), listed.contains(&big(m)), "m = {} s = {}", m, s);
            if let Some(w) = w {
                prop_assert_eq!(s.value_at(q, &w).unwrap(), BigRational::from_integer(big(m)));
            }
        }
        for x in &listed {
            prop_assert!(pset_membership(x, &s, q).unwrap().is_some());
        }
    }

    #[test]
    fn positive_enumeration_matches_brute_force(
        t in prop::collection::vec((1i64..=6, 0u32..=3), 1..=3),
        c in -6i64..=6,
        q in arb_prime(),
    ) {
        let mut terms = t;
        terms.push((c, 0));
        let s = PSet::from_ints(&terms).unwrap();
        let bound = big(2000);
        let got: BTreeSet<BigInt> = pset_enumerate(&s, q, &bound).unwrap().into_iter().collect();
        let want: BTreeSet<BigInt> = brute_values(&s, q, 12).into_iter().filter(|x| *x <= bound).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn signed_enumeration_matches_brute_force(s in arb_pset(), q in prop::sample::select(vec![2u64, 3, 5]).prop_map(p)) {
        // with cancellation, witnesses for values <= 300 can use exponents up to
        // roughly log_p(300 * 7) + a few, so the brute force needs headroom
        let bound = big(300);
        let got: BTreeSet<BigInt> = pset_enumerate(&s, q, &bound).unwrap().into_iter().collect();
        let want: BTreeSet<BigInt> = brute_values(&s, q, 16).into_iter().filter(|x| *x <= bound).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn least_witness_is_least(s in arb_pset(), q in prop::sample::select(vec![2u64, 3]).prop_map(p), m in 0i64..200) {
        if let Some(w) = pset_membership(&big(m), &s, q).unwrap() {
            // no lexicographically smaller exponent vector in the searched box
            let len = s.len();
            let mut exps = vec![0u64; len];
            'outer: loop {
                if exps < w && s.value_at(q, &exps).unwrap() == BigRational::from_integer(big(m)) {
                    let trivial_ok = exps.iter().zip(s.terms()).all(|(e, t)| t.step > 0 && !t.coeff.is_zero() || *e == 0);
                    prop_assert!(!trivial_ok, "smaller witness {:?} than {:?}", exps, w);
                }
                let mut i = 0;
                loop {
                    if i == len { break 'outer; }
                    exps[i] += 1;
                    if exps[i] <= 12 { break; }
                    exps[i] = 0;
                    i += 1;
                }
            }
        }
    }

    #[test]
    fn ap_intersection_is_exact(
        t in prop::collection::vec((-4i64..=6, 0u32..=2), 1..=2),
        a in 1u64..12,
        b in 0u64..12,
        q in prop::sample::select(vec![2u64, 3, 5]).prop_map(p),
    ) {
        let s = PSet::from_ints(&t).unwrap();
        let ap = ArithProg::new(a, b % a);
        let parts = ap_intersect_pset(&ap, &s, q).unwrap();
        let bound = big(20_000);
        let mut got = BTreeSet::new();
        for part in &parts {
            got.extend(pset_enumerate(part, q, &bound).unwrap());
        }
        let want: BTreeSet<BigInt> = pset_enumerate(&s, q, &bound).unwrap().into_iter().filter(|x| ap.contains_big(x)).collect();
        prop_assert_eq!(got, want);
    }
}
