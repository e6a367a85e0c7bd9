mod common;

use markov_surface::markov::{enumerate_ordered, first_markov_numbers, zagier_fit_window};
use markov_surface::num::rat;
use markov_surface::singular::d4_sign_analysis;
use markov_surface::tame::{build_tame_automorphism, verify_solution, TameProblem};
use num_bigint::BigInt;

#[test]
fn tree_matches_discriminant_search() {
    let tree: Vec<(u64, u64, u64)> = enumerate_ordered(&BigInt::from(100_000))
        .iter()
        .map(|t| {
            let c: [u64; 3] = t.coords().map(|v| v.try_into().unwrap());
            (c[0], c[1], c[2])
        })
        .collect();
    assert_eq!(tree, common::brute_force_triples(100_000));
}

#[test]
fn frozen_markov_numbers() {
    let m = first_markov_numbers(200);
    let head: Vec<String> = m[..12].iter().map(|v| v.to_string()).collect();
    assert_eq!(head, ["1", "2", "5", "13", "29", "34", "89", "169", "194", "233", "433", "610"]);
    assert_eq!(m[199].to_string(), "93139301545921");
}

#[test]
fn frozen_zagier_slopes() {
    // reference values from an independent double-precision least-squares fit
    let m = first_markov_numbers(200);
    let a = zagier_fit_window(&m, 50, 125).unwrap().slope;
    let b = zagier_fit_window(&m, 125, 200).unwrap().slope;
    assert!((a - 2.409).abs() < 5e-4, "{a}");
    assert!((b - 2.432).abs() < 5e-4, "{b}");
}

#[test]
fn corank_two_only_at_d_minus_28() {
    for r in d4_sign_analysis(8, 128).unwrap() {
        let negatives = r.signs.iter().filter(|s| **s < 0).count();
        assert_eq!(r.corank2.is_empty(), negatives % 2 == 1, "{:?}", r.signs);
        for (p, d) in &r.corank2 {
            assert_eq!(*d, rat::int(-28));
            // (2,2,2) with the signs of (A,B,C) applied
            let expect: [_; 3] = std::array::from_fn(|i| rat::int(2 * r.signs[i] as i64));
            assert_eq!(*p, expect);
        }
    }
}

#[test]
fn tame_cyclic_shift_replays() {
    let pairs = TameProblem::parse_map("1:2,2:3,3:4,4:5,5:6").unwrap();
    let pb = TameProblem::first_n(5, &pairs, 512, 20).unwrap();
    let sol = build_tame_automorphism(&pb).unwrap();
    assert_eq!(sol.images.last().unwrap().to_string(), "(1,13,34)");
    assert!(verify_solution(&sol).iter().all(|r| *r < 1e-15));
}
