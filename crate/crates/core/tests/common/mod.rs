//! Seeded generators and independent oracles shared by the integration tests.
//!
//! The oracles here re-derive rule semantics and value weights from their
//! definitions without going through library code paths.

#![allow(dead_code)]

use exshap::{
    BoolExpr, Coalition, EmbeddedRule, Graph, HybridRule, McRule, Partition, PartitionGame, Rational, Rule, ValueKind,
    WeightedRule,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn coal(ps: &[usize]) -> Coalition {
    ps.iter().copied().collect()
}

pub fn random_weight(rng: &mut impl Rng) -> Rational {
    let mut num = rng.gen_range(-6i64..=6);
    if num == 0 {
        num = 1;
    }
    q(num, rng.gen_range(1i64..=3))
}

/// Random conjunction over players `1..=n` with at least one positive literal.
pub fn random_expr(rng: &mut impl Rng, n: usize) -> BoolExpr {
    loop {
        let mut pos = Coalition::empty();
        let mut neg = Coalition::empty();
        for p in 1..=n {
            match rng.gen_range(0..6) {
                0 | 1 => pos = pos.with(p),
                2 => neg = neg.with(p),
                _ => {}
            }
        }
        if !pos.is_empty() {
            return BoolExpr::new(pos, neg).unwrap();
        }
    }
}

pub fn random_mc(rng: &mut impl Rng, n: usize) -> McRule {
    McRule::new(random_expr(rng, n), random_weight(rng))
}

pub fn random_weighted(rng: &mut impl Rng, n: usize) -> WeightedRule {
    let blocks = rng.gen_range(1..=3);
    WeightedRule::new(
        (0..blocks)
            .map(|_| (0..rng.gen_range(1..=2)).map(|_| random_mc(rng, n)).collect())
            .collect(),
    )
    .unwrap()
}

pub fn random_embedded(rng: &mut impl Rng, n: usize) -> EmbeddedRule {
    let others = (0..rng.gen_range(0..=2)).map(|_| random_expr(rng, n)).collect();
    EmbeddedRule::new(random_expr(rng, n), others, random_weight(rng))
}

/// Random hybrid rule over exactly `n` players: positives split the player
/// set, negatives are drawn from the other expressions' positives.
pub fn random_hybrid(rng: &mut impl Rng, n: usize) -> HybridRule {
    let blocks = rng.gen_range(1..=n);
    let mut players: Vec<usize> = (1..=n).collect();
    players.shuffle(rng);
    let mut positives = vec![Coalition::empty(); blocks];
    for (idx, &p) in players.iter().enumerate() {
        let b = if idx < blocks { idx } else { rng.gen_range(0..blocks) };
        positives[b] = positives[b].with(p);
    }
    let all = Coalition::full(n);
    let exprs = positives
        .iter()
        .map(|&pos| {
            let neg: Coalition = (all - pos).players().filter(|_| rng.gen_bool(0.3)).collect();
            BoolExpr::new(pos, neg).unwrap()
        })
        .collect();
    let weight = if rng.gen_bool(0.1) {
        Rational::zero()
    } else {
        random_weight(rng)
    };
    HybridRule::new(exprs, weight).unwrap()
}

pub fn random_rule(rng: &mut impl Rng, n: usize) -> Rule {
    match rng.gen_range(0..4) {
        0 => random_mc(rng, n).into(),
        1 => random_embedded(rng, n).into(),
        2 => random_weighted(rng, n).into(),
        _ => random_hybrid(rng, n).into(),
    }
}

pub fn random_graph(rng: &mut impl Rng, k: usize, density: f64) -> Graph {
    let mut g = Graph::new(k);
    for a in 0..k {
        for b in a + 1..k {
            if rng.gen_bool(density) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    g
}

pub fn random_bipartite(rng: &mut impl Rng, k: usize, density: f64) -> Graph {
    let side: Vec<bool> = (0..k).map(|_| rng.gen_bool(0.5)).collect();
    let mut g = Graph::new(k);
    for a in 0..k {
        for b in a + 1..k {
            if side[a] != side[b] && rng.gen_bool(density) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    g
}

/// Every graph on `k` nodes, one per edge subset.
pub fn all_graphs(k: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let m = pairs.len();
    (0u64..1 << m).map(move |mask| {
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(idx, _)| mask >> idx & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::from_edges(k, &edges).unwrap()
    })
}

// ---- independent oracles ----

/// All set partitions of `1..=n`, built recursively by inserting each player
/// into an existing block or a new one.
pub fn oracle_partitions(n: usize) -> Vec<Vec<Coalition>> {
    let mut out = vec![Vec::new()];
    for p in 1..=n {
        let mut next = Vec::new();
        for blocks in &out {
            for idx in 0..blocks.len() {
                let mut b: Vec<Coalition> = blocks.clone();
                b[idx] = b[idx].with(p);
                next.push(b);
            }
            let mut b = blocks.clone();
            b.push(Coalition::singleton(p));
            next.push(b);
        }
        out = next;
    }
    out
}

fn fact(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, x| acc * x)
}

fn sat(s: Coalition, a: &BoolExpr) -> bool {
    a.positives().is_subset(s) && a.negatives().is_disjoint(s)
}

/// A partition satisfies a weighted rule when its blocks can be split among
/// the rule's groups so that every inner rule of a group is met by some
/// coalition assigned to that group. Tries every assignment.
fn oracle_weighted_satisfied(p: &[Coalition], rule: &WeightedRule) -> bool {
    let m = rule.blocks().len();
    let total = m.pow(p.len() as u32);
    (0..total).any(|mut code| {
        let mut owner = vec![0; p.len()];
        for o in owner.iter_mut() {
            *o = code % m;
            code /= m;
        }
        rule.blocks().iter().enumerate().all(|(g, inner)| {
            inner
                .iter()
                .all(|r| p.iter().zip(&owner).any(|(t, &o)| o == g && sat(*t, &r.expr)))
        })
    })
}

/// Value of `(s, p)` under `rule`, read directly from the rule semantics.
pub fn oracle_rule_value(rule: &Rule, s: Coalition, p: &[Coalition]) -> Rational {
    match rule {
        Rule::Mc(r) => {
            if sat(s, &r.expr) {
                r.weight.clone()
            } else {
                Rational::zero()
            }
        }
        Rule::Embedded(r) => {
            let others_met = r.others.iter().all(|a| p.iter().any(|t| *t != s && sat(*t, a)));
            if sat(s, &r.head) && others_met {
                r.weight.clone()
            } else {
                Rational::zero()
            }
        }
        Rule::Weighted(r) => {
            if !oracle_weighted_satisfied(p, r) {
                return Rational::zero();
            }
            r.mc_rules().filter(|m| sat(s, &m.expr)).map(|m| m.weight.clone()).sum()
        }
        Rule::Hybrid(h) => oracle_rule_value(&Rule::Weighted(h.as_weighted()), s, p),
    }
}

/// The game of a rule list, by direct evaluation on every embedded coalition.
pub fn oracle_game(rules: &[Rule], n: usize) -> PartitionGame {
    let mut g = PartitionGame::zero(n);
    for blocks in oracle_partitions(n) {
        let part = Partition::new(blocks.clone(), n).unwrap();
        for &s in &blocks {
            let v: Rational = rules.iter().map(|r| oracle_rule_value(r, s, &blocks)).sum();
            let ec = exshap::EmbeddedCoalition::new(s, part.clone()).unwrap();
            g.set(ec, v).unwrap();
        }
    }
    g
}

/// Partitions of `n + r` elements with the first `r` in distinct blocks,
/// counted by enumeration.
pub fn oracle_r_bell(n: usize, r: usize) -> BigInt {
    let firsts = Coalition::full(r);
    BigInt::from(
        oracle_partitions(n + r)
            .iter()
            .filter(|blocks| blocks.iter().all(|b| (*b & firsts).len() <= 1))
            .count(),
    )
}

/// Weight of `(s, p)` in player `i`'s value, from the definitions.
pub fn oracle_weight(kind: ValueKind, s: Coalition, p: &[Coalition], i: usize, n: usize) -> Rational {
    let size = s.len();
    let blocks = p.len();
    let inside = s.contains(i);
    let zeta = if inside {
        Rational::new(fact(size - 1) * fact(n - size), fact(n))
    } else {
        -Rational::new(fact(size) * fact(n - size - 1), fact(n))
    };
    let others = || p.iter().filter(move |t| **t != s);
    match kind {
        ValueKind::MQ => {
            if blocks <= 2 {
                zeta
            } else {
                Rational::zero()
            }
        }
        ValueKind::EF => {
            if blocks - 1 == n - size {
                zeta
            } else {
                Rational::zero()
            }
        }
        ValueKind::HY => zeta * Rational::new(oracle_r_bell(size, blocks - 1), oracle_r_bell(n, 0)),
        ValueKind::SS => {
            let num: BigInt = others().map(|t| fact(t.len() - 1)).product();
            zeta * Rational::new(num, fact(n - size))
        }
        ValueKind::MY => {
            let tail = Rational::new(fact(blocks - 1), n.into());
            let sum: Rational = if blocks >= 2 {
                others()
                    .filter(|t| !t.contains(i))
                    .map(|t| Rational::new(fact(blocks - 2), (n - t.len()).into()))
                    .sum()
            } else {
                Rational::zero()
            };
            let sign = if blocks % 2 == 0 { 1 } else { -1 };
            Rational::from_integer(sign.into()) * (sum - tail)
        }
    }
}

/// Value of player `i` by summing oracle weights over every embedded
/// coalition.
pub fn oracle_value(g: &PartitionGame, kind: ValueKind, i: usize) -> Rational {
    let n = g.n();
    let mut total = Rational::zero();
    for blocks in oracle_partitions(n) {
        let part = Partition::new(blocks.clone(), n).unwrap();
        for &s in &blocks {
            let ec = exshap::EmbeddedCoalition::new(s, part.clone()).unwrap();
            let v = g.get(&ec);
            if !v.is_zero() {
                total += oracle_weight(kind, s, &blocks, i, n) * v;
            }
        }
    }
    total
}

/// Classic Shapley value by averaging marginal contributions over all
/// player orders.
pub fn oracle_shapley(n: usize, f: &dyn Fn(Coalition) -> Rational) -> Vec<Rational> {
    let mut order: Vec<usize> = (1..=n).collect();
    let mut out = vec![Rational::zero(); n];
    let mut count = 0u64;
    permute(&mut order, 0, &mut |perm| {
        count += 1;
        let mut s = Coalition::empty();
        for &p in perm {
            let before = f(s);
            s = s.with(p);
            out[p - 1] += f(s) - before;
        }
    });
    out.into_iter()
        .map(|v| v / Rational::from_integer(count.into()))
        .collect()
}

fn permute(v: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

/// Random characteristic function on coalitions of `1..=n` (empty set 0).
pub fn random_char_fn(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0u64..1 << n)
        .map(|bits| {
            if bits == 0 {
                Rational::zero()
            } else {
                random_weight(rng)
            }
        })
        .collect()
}

/// Random partition game with about a third of embedded coalitions nonzero.
pub fn random_partition_game(rng: &mut impl Rng, n: usize) -> PartitionGame {
    let mut g = PartitionGame::zero(n);
    for blocks in oracle_partitions(n) {
        let part = Partition::new(blocks.clone(), n).unwrap();
        for &s in &blocks {
            if rng.gen_bool(0.35) {
                let ec = exshap::EmbeddedCoalition::new(s, part.clone()).unwrap();
                g.set(ec, random_weight(rng)).unwrap();
            }
        }
    }
    g
}

/// Matchings counted by brute force over edge subsets.
pub fn oracle_matchings_by_size(g: &Graph) -> Vec<BigInt> {
    let edges = g.edges();
    let mut counts = vec![BigInt::zero(); g.len() / 2 + 1];
    for mask in 0u64..1 << edges.len() {
        let chosen: Vec<_> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).collect();
        let mut used = 0u64;
        let ok = chosen.iter().all(|&e| {
            let (a, b) = edges[e];
            let bits = 1 << a | 1 << b;
            let free = used & bits == 0;
            used |= bits;
            free
        });
        if ok {
            counts[chosen.len()] += 1;
        }
    }
    counts
}

/// Independent sets counted by brute force over node subsets.
pub fn oracle_independent_sets(g: &Graph) -> Vec<BigInt> {
    let k = g.len();
    let mut counts = vec![BigInt::zero(); k + 1];
    for mask in 0u64..1 << k {
        let ok = g.edges().iter().all(|&(a, b)| mask >> a & 1 == 0 || mask >> b & 1 == 0);
        if ok {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    counts
}

/// Proper colorings with `k = |V|` colors using exactly `m` colors, for
/// `m = 1..=k`, by trying every color assignment.
pub fn oracle_exact_colorings(g: &Graph) -> Vec<BigInt> {
    let k = g.len();
    let mut counts = vec![BigInt::zero(); k];
    let total = k.pow(k as u32);
    for mut code in 0..total {
        let mut colors = vec![0; k];
        for c in colors.iter_mut() {
            *c = code % k;
            code /= k;
        }
        if g.edges().iter().all(|&(a, b)| colors[a] != colors[b]) {
            let mut used = colors.clone();
            used.sort_unstable();
            used.dedup();
            counts[used.len() - 1] += 1;
        }
    }
    counts
}
