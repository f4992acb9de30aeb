//! Acceptance checks, one line per criterion. Run with
//! `cargo test --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, ExitCode};

use common::{naive_closure, random_op, random_seeds, to_set};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subpowers::criteria::{
    check_d_generation, decide_egp_idempotent, growth_profile, is_ab_projective, GrowthMode, SubsetPair,
};
use subpowers::witnesses::{
    egp_lower_bound, evenize_nice, lemma2_sigma, nice_relation_from_nonswitchability, power_of_two,
    preserves_relation, projectivity_counterexample, sigma_n_relation, verify_nice, verify_sigma, NiceRelation,
};
use subpowers::{closure, corpus, Algebra, Element, Limits, OperationTable, TupleSet};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn closure_matches_reference() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (name, alg) in corpus::named() {
        let k = alg.universe();
        for case in 0..200 {
            let n = rng.gen_range(1..=if k == 2 { 5 } else { 3 });
            let seeds = random_seeds(&mut rng, k, n);
            let expected: Vec<Vec<Element>> = naive_closure(&alg, &seeds).into_iter().collect();
            let got: Vec<Vec<Element>> = closure(&alg, &to_set(k, n, &seeds))
                .map_err(|e| e.to_string())?
                .tuples()
                .collect();
            ensure(got == expected, || format!("{name} case {case}: seeds {seeds:?}"))?;
        }
    }
    Ok(())
}

fn binary_idempotent_classification() -> Check {
    let l = Limits::default();
    let target = SubsetPair::from_elements(2, &[0], &[1]).unwrap();
    for code in 0..4u8 {
        let table = vec![0, code >> 1, code & 1, 1];
        let op = OperationTable::new("g", 2, 2, table.clone()).unwrap();
        let alg = Algebra::new(2, vec![op.clone()]).unwrap();
        let decision = decide_egp_idempotent(&alg).map_err(|e| e.to_string())?;
        let projection = table == [0, 0, 1, 1] || table == [0, 1, 0, 1];
        if projection {
            ensure(decision.witness() == Some(&target), || format!("{table:?}: {decision}"))?;
            ensure(is_ab_projective(&op, &target).is_some(), || format!("{table:?} not projective"))?;
        } else {
            ensure(!decision.is_egp(), || format!("{table:?}: {decision}"))?;
            ensure(is_ab_projective(&op, &target).is_none(), || format!("{table:?} projective"))?;
        }
        ensure(decision.verify(&alg, &l).map_err(|e| e.to_string())?, || format!("{table:?} unverified"))?;
    }
    Ok(())
}

fn d_generation_cross_check() -> Check {
    let l = Limits::default();
    for (name, alg) in corpus::named() {
        let k = alg.universe();
        let decision = decide_egp_idempotent(&alg).map_err(|e| e.to_string())?;
        let check = |m: usize| check_d_generation(&alg, m, &l).map_err(|e| e.to_string());
        if decision.is_egp() {
            for m in 1..=k + 1 {
                ensure(!check(m)?, || format!("{name}: EGP yet D generates at m={m}"))?;
            }
        } else {
            let first = (1..=k + 2)
                .find_map(|m| match check(m) {
                    Ok(true) => Some(Ok(m)),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                })
                .transpose()?
                .ok_or_else(|| format!("{name}: PGP without D-generation up to k+2"))?;
            // Once D generates, it keeps generating at the next size.
            ensure(check(first + 1)?, || format!("{name}: D-generation at m={first} but not m={}", first + 1))?;
        }
    }
    Ok(())
}

fn projectivity_vs_preservation() -> Check {
    let l = Limits::default();
    let pairs = SubsetPair::enumerate(3).unwrap();
    let sigmas: Vec<(TupleSet, TupleSet)> = pairs
        .iter()
        .map(|p| (sigma_n_relation(p, 1, &l).unwrap(), sigma_n_relation(p, 2, &l).unwrap()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let op = random_op(&mut rng, "g", 3, 2, true);
        for (pair, (s1, s2)) in pairs.iter().zip(&sigmas) {
            let projective = is_ab_projective(&op, pair).is_some();
            let preserves = preserves_relation(&op, s1, &l).map_err(|e| e.to_string())?
                && preserves_relation(&op, s2, &l).map_err(|e| e.to_string())?;
            ensure(projective == preserves, || format!("op {i} {:?} pair {pair}", op.table()))?;
            if !projective {
                let cx = projectivity_counterexample(&op, pair).map_err(|e| e.to_string())?;
                let cols_ok = cx.columns().iter().all(|c| s2.contains_tuple(c));
                ensure(cols_ok && !s2.contains_tuple(&cx.image), || format!("op {i} pair {pair}: bad counterexample"))?;
            }
        }
    }
    Ok(())
}

// Smallest generating set by brute force over subsets, using the naive closure.
fn brute_force_min_generators(alg: &Algebra, n: usize) -> usize {
    let all = common::all_tuples(alg.universe(), n);
    let target: BTreeSet<Vec<Element>> = all.iter().cloned().collect();
    for size in 1..=all.len() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let seeds: Vec<Vec<Element>> = idx.iter().map(|&i| all[i].clone()).collect();
            if naive_closure(alg, &seeds) == target {
                return size;
            }
            let mut j = size;
            while j > 0 && idx[j - 1] == all.len() - size + j - 1 {
                j -= 1;
            }
            if j == 0 {
                break;
            }
            idx[j - 1] += 1;
            for t in j..size {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
    all.len()
}

fn growth_examples() -> Check {
    let l = Limits::default();
    for (alg, expected) in [(corpus::projections(2), vec![2, 4, 8, 16]), (corpus::xor3(), vec![2, 3, 4, 5])] {
        let profile = growth_profile(&alg, 4, GrowthMode::Exact, &l).map_err(|e| e.to_string())?;
        ensure(profile.sizes() == expected, || format!("got {:?}, want {expected:?}", profile.sizes()))?;
        for n in 1..=3 {
            let oracle = brute_force_min_generators(&alg, n);
            ensure(oracle == expected[n - 1], || format!("brute force n={n}: {oracle}"))?;
        }
    }
    Ok(())
}

fn witness_pipeline() -> Check {
    let l = Limits::default();
    let err = |e: subpowers::Error| e.to_string();
    let alg = corpus::projections(2);
    let rel = nice_relation_from_nonswitchability(&alg, 1, 3, &l).map_err(err)?;
    ensure(rel.excluded() == [0, 1, 0], || format!("excluded {:?}", rel.excluded()))?;
    ensure(verify_nice(&rel, &l).map_err(err)?, || "nice relation failed verification".into())?;

    let base = TupleSet::from_predicate(3, 5, &l, |t| t != [0, 1, 0, 2, 1]).map_err(err)?;
    let odd = NiceRelation::from_relation(base, vec![0, 1, 0, 2, 1]).map_err(err)?;
    let even = evenize_nice(&odd).map_err(err)?;
    ensure(even.arity() % 2 == 0, || format!("odd arity {}", even.arity()))?;
    ensure(verify_nice(&even, &l).map_err(err)?, || "evenized relation is not nice".into())?;

    let big = nice_relation_from_nonswitchability(&alg, 7, 9, &l).map_err(err)?;
    let w = lemma2_sigma(&big, 1, &l).map_err(err)?;
    ensure(verify_sigma(&w), || "sigma clauses fail".into())?;
    for t in common::all_tuples(2, w.arity()) {
        let member = w.relation.contains_tuple(&t);
        ensure(!(t[0] == t[1] && !member), || format!("{t:?} missing"))?;
        ensure(!(t == w.excluded && member), || "excluded tuple present".into())?;
    }
    Ok(())
}

fn bound_arithmetic() -> Check {
    for n in 1..=20u32 {
        for k in 1..=20u32 {
            let bound = egp_lower_bound(n, k);
            let mut binom = BigInt::one();
            for i in 0..n {
                binom = binom * BigInt::from(2 * n - i) / BigInt::from(i + 1);
            }
            ensure(bound == BigRational::new(binom, BigInt::from(2).pow(k)), || format!("n={n} k={k} value"))?;
            let reference = power_of_two(n as i64 - k as i64);
            let ok = if n == 1 { bound == reference } else { bound > reference };
            ensure(ok, || format!("n={n} k={k} comparison"))?;
        }
    }
    Ok(())
}

fn cli_determinism() -> Check {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let invocations: &[&[&str]] = &[
        &["validate"],
        &["decide", "--evidence"],
        &["d-check", "--m", "2"],
        &["switchable", "--r", "1", "--n", "3"],
        &["growth", "--n-max", "3"],
        &["growth", "--n-max", "3", "--mode", "greedy"],
        &["witness", "nice", "--r", "1", "--n", "3"],
        &["witness", "sigma", "--r", "7", "--n", "9", "--sigma-n", "1"],
        &["witness", "counterexample", "--alpha", "0", "--beta", "1"],
        &["witness", "blocker", "--b", "0", "--n-max", "3"],
        &["dump", "d", "--m", "2", "--closed"],
        &["dump", "switch", "--n", "3", "--r", "1"],
        &["dump", "sigma", "--n", "1", "--alpha", "0", "--beta", "1"],
    ];
    let mut names: Vec<&str> = corpus::named().into_iter().map(|(n, _)| n).collect();
    names.push("constant_zero");
    for name in names {
        let path = dir.join(format!("{name}.json"));
        for args in invocations {
            let mut full: Vec<&str> = args.to_vec();
            full.push(path.to_str().unwrap());
            let run = |threads: &str| {
                Command::new(env!("CARGO_BIN_EXE_subpowers"))
                    .args(&full)
                    .env("RAYON_NUM_THREADS", threads)
                    .output()
                    .map(|o| (o.status.code(), o.stdout, o.stderr))
                    .map_err(|e| e.to_string())
            };
            let first = run("4")?;
            ensure(first == run("4")?, || format!("{name} {args:?}: repeated runs differ"))?;
            ensure(first == run("1")?, || format!("{name} {args:?}: thread count changes output"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closure agrees with naive reference on 200 seed sets per algebra", closure_matches_reference),
        ("idempotent binary operations on {0,1} classified", binary_idempotent_classification),
        ("D-generation agrees with the EGP/PGP verdict", d_generation_cross_check),
        ("projectivity iff sigma preservation on 100 random operations", projectivity_vs_preservation),
        ("exact growth profiles of projections and xor3", growth_examples),
        ("nice, evenized and sigma witnesses verify", witness_pipeline),
        ("EGP lower bound arithmetic for n, k <= 20", bound_arithmetic),
        ("CLI output is deterministic", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        match check() {
            Ok(()) => println!("[PASS] {}. {label} ({:.2?})", i + 1, start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {}. {label}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
