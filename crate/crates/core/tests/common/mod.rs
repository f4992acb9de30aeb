#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use subpowers::{Algebra, Element, OperationTable, TupleSet};

/// Reference closure: rescan every argument combination until nothing new
/// appears. Quadratic in the number of rounds, but obviously correct.
pub fn naive_closure(algebra: &Algebra, seeds: &[Vec<Element>]) -> BTreeSet<Vec<Element>> {
    let k = algebra.universe();
    let mut set: BTreeSet<Vec<Element>> = seeds.iter().cloned().collect();
    loop {
        let members: Vec<Vec<Element>> = set.iter().cloned().collect();
        let mut grew = false;
        for op in algebra.operations() {
            let s = op.arity();
            let mut idx = vec![0usize; s];
            if members.is_empty() {
                continue;
            }
            loop {
                let n = members[0].len();
                let image: Vec<Element> = (0..n)
                    .map(|c| {
                        let pos = idx.iter().fold(0usize, |acc, &i| acc * k + members[i][c] as usize);
                        op.table()[pos]
                    })
                    .collect();
                grew |= set.insert(image);
                let mut level = s;
                let mut done = true;
                while level > 0 {
                    level -= 1;
                    idx[level] += 1;
                    if idx[level] < members.len() {
                        done = false;
                        break;
                    }
                    idx[level] = 0;
                }
                if done {
                    break;
                }
            }
        }
        if !grew {
            return set;
        }
    }
}

pub fn all_tuples(k: usize, n: usize) -> Vec<Vec<Element>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..k as Element).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn to_set(k: usize, n: usize, tuples: &[Vec<Element>]) -> TupleSet {
    TupleSet::from_tuples(k, n, tuples.iter().map(|t| t.as_slice())).unwrap()
}

pub fn random_seeds(rng: &mut impl Rng, k: usize, n: usize) -> Vec<Vec<Element>> {
    let all = all_tuples(k, n);
    let density = rng.gen_range(0.0..0.5);
    let mut seeds: Vec<Vec<Element>> = all.into_iter().filter(|_| rng.gen_bool(density)).collect();
    if seeds.is_empty() {
        seeds.push((0..n).map(|_| rng.gen_range(0..k as Element)).collect());
    }
    seeds
}

/// A random operation; idempotent if requested.
pub fn random_op(rng: &mut impl Rng, name: &str, k: usize, arity: usize, idempotent: bool) -> OperationTable {
    OperationTable::from_fn(name, k, arity, |args| {
        if idempotent && args.iter().all(|&a| a == args[0]) {
            args[0]
        } else {
            rng.gen_range(0..k as Element)
        }
    })
}
