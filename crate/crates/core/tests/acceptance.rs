//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use exshap::combinatorics::{bell, determinant, r_bell, stirling2, RationalMatrix};
use exshap::game::{embedded, esv_bruteforce, esv_weight, externality_free_lift, shapley};
use exshap::graphs::{build_graph, enumerate_colorings};
use exshap::hardness::{chromatic_counts_via_hy, hosoya_via_ss, independent_sets_via_ef, matchings_by_size_via_my};
use exshap::rules::{game_of_rules, parse_rule_file};
use exshap::transforms::{check_star, embedded_to_hybrid, hybrid_to_embedded, weighted_to_hybrid};
use exshap::values::{ef_poly, esv_colorings_all, mq_poly};
use exshap::{Caps, Coalition, Graph, Integer, LabeledGraph, Rational, Rule, ValueKind};
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn criterion_1() -> Outcome {
    // rows: kind, cells for shapes [4] [3,1] [2,2] [2,1,1] [1,1,1,1], multiplier
    let grid: [(ValueKind, [i64; 5], i64); 5] = [
        (ValueKind::MQ, [1, 0, 0, 0, 0], 30),
        (ValueKind::EF, [0, 0, 0, 0, 1], 30),
        (ValueKind::HY, [5, 10, 10, 17, 26], 6090),
        (ValueKind::SS, [6, 2, 1, 1, 1], 720),
        (ValueKind::MY, [10, -6, -5, 9, -24], 30),
    ];
    let shapes: [&[&[usize]]; 5] = [
        &[&[1, 2], &[3, 4, 5, 6]],
        &[&[1, 2], &[3, 4, 5], &[6]],
        &[&[1, 2], &[3, 4], &[5, 6]],
        &[&[1, 2], &[3, 4], &[5], &[6]],
        &[&[1, 2], &[3], &[4], &[5], &[6]],
    ];
    for (kind, cells, mult) in grid {
        for (shape, cell) in shapes.iter().zip(cells) {
            let ec = embedded(6, shape, 0).map_err(|e| e.to_string())?;
            let got = esv_weight(kind, &ec, 1, 6);
            ensure!(got == q(cell, mult), "{kind} {ec}: got {got}, expected {cell}/{mult}");
        }
    }
    Ok("25 weights for n=6, |S|=2, i in S".into())
}

fn criterion_2() -> Outcome {
    // one row per node partition of the two-path graph:
    // |P|, theta, coalition, other blocks, MQ EF HY SS MY numerators
    type Row = (usize, i64, &'static [usize], &'static [&'static [usize]], [i64; 5]);
    let rows: [Row; 19] = [
        (2, 20, &[1, 3, 4, 6], &[&[2, 5]], [1, 0, 52, 6, 5]),
        (2, 20, &[1, 3, 5], &[&[2, 4, 6]], [1, 0, 15, 4, 10]),
        (3, 60, &[1, 3, 4, 6], &[&[2], &[5]], [0, 1, 151, 6, -4]),
        (3, 60, &[1, 3, 5], &[&[2], &[4, 6]], [0, 0, 37, 2, -7]),
        (3, 60, &[1, 4, 6], &[&[2, 5], &[3]], [0, 0, 37, 2, -7]),
        (3, 60, &[1, 4, 6], &[&[2], &[3, 5]], [0, 0, 37, 2, -7]),
        (3, 60, &[1, 3], &[&[2, 5], &[4, 6]], [0, 0, 20, 1, -10]),
        (3, 60, &[1, 3], &[&[2, 4, 6], &[5]], [0, 0, 20, 2, -12]),
        (3, 60, &[1, 5], &[&[2, 4, 6], &[3]], [0, 0, 20, 2, -12]),
        (3, 60, &[1, 5], &[&[2], &[3, 4, 6]], [0, 0, 20, 2, -12]),
        (3, 60, &[1], &[&[2, 4, 6], &[3, 5]], [0, 0, 30, 2, -15]),
        (3, 60, &[1], &[&[2, 5], &[3, 4, 6]], [0, 0, 30, 2, -15]),
        (4, 120, &[1, 4, 6], &[&[2], &[3], &[5]], [0, 1, 77, 2, 12]),
        (4, 120, &[1, 3], &[&[2], &[4, 6], &[5]], [0, 0, 34, 1, 18]),
        (4, 120, &[1, 5], &[&[2], &[3], &[4, 6]], [0, 0, 34, 1, 18]),
        (4, 120, &[1], &[&[2, 5], &[3], &[4, 6]], [0, 0, 40, 1, 24]),
        (4, 120, &[1], &[&[2], &[3, 5], &[4, 6]], [0, 0, 40, 1, 24]),
        (4, 120, &[1], &[&[2, 4, 6], &[3], &[5]], [0, 0, 40, 2, 28]),
        (4, 120, &[1], &[&[2], &[3, 4, 6], &[5]], [0, 0, 40, 2, 28]),
        // HY: B_{1,4} = 5, so the numerator is 50 here, not 40
    ];
    let last: Row = (5, 120, &[1], &[&[2], &[3], &[4, 6], &[5]], [0, 0, 50, 1, -66]);
    // SS multiplier is 1/720, not 1/7200
    let multipliers = [60, 60, 12180, 720, 60];

    let lg = LabeledGraph::new(
        Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap(),
        vec![coal(&[1]), coal(&[2]), coal(&[3]), coal(&[4, 6]), coal(&[5])],
    )
    .map_err(|e| e.to_string())?;
    let parts: Vec<_> = enumerate_colorings(&lg, 12).map_err(|e| e.to_string())?.collect();
    let expected: Vec<Row> = rows.iter().copied().chain([last]).collect();
    ensure!(
        parts.len() == expected.len(),
        "{} partitions, expected {}",
        parts.len(),
        expected.len()
    );
    let mut matched = 0;
    for p in &parts {
        let s = lg.label_of(p.blocks[0]);
        let mut others: Vec<Coalition> = p.blocks[1..].iter().map(|&b| lg.label_of(b)).collect();
        others.sort();
        let row = expected.iter().find(|(_, _, rs, ro, _)| {
            let mut ro: Vec<Coalition> = ro.iter().map(|b| coal(b)).collect();
            ro.sort();
            coal(rs) == s && ro == others
        });
        let Some(&(size, theta, _, _, weights)) = row else {
            return Err(format!("partition with coalition {s} has no table row"));
        };
        ensure!(p.len() == size, "block count {} vs {size} for {s}", p.len());
        ensure!(p.theta == Integer::from(theta), "theta {} vs {theta} for {s}", p.theta);
        let ec = exshap::graphs::embedded_of(&lg, p);
        for ((kind, w), mult) in ValueKind::ALL.into_iter().zip(weights).zip(multipliers) {
            let got = esv_weight(kind, &ec, 1, 6);
            ensure!(got == q(w, mult), "{kind} for {ec}: got {got}, expected {w}/{mult}");
        }
        matched += 1;
    }
    Ok(format!("{matched} coloring classes, 5 weights each"))
}

fn criterion_3() -> Outcome {
    let set = parse_rule_file("players: 6\nhybrid: (1 2 !3 -> 1) (3 5 -> 0) (4 !1 !3 !6 -> 0) (6 !5 -> 0)\n")
        .map_err(|e| e.to_string())?;
    let Rule::Hybrid(h) = &set.rules()[0] else {
        return Err("expected a hybrid rule".into());
    };
    let game = set.game(&Caps::default()).map_err(|e| e.to_string())?;
    let a = embedded(6, &[&[1, 2, 6], &[3, 5], &[4]], 0).unwrap();
    let b = embedded(6, &[&[1, 2], &[3, 5], &[4], &[6]], 0).unwrap();
    ensure!(game.support_len() == 2, "support has {} entries", game.support_len());
    ensure!(
        game.get(&a).is_one() && game.get(&b).is_one(),
        "unit coalitions missing"
    );
    let lg = build_graph(h);
    let mut by_colors = [0i64; 5];
    for p in enumerate_colorings(&lg, 12).map_err(|e| e.to_string())? {
        by_colors[p.len()] += i64::try_from(&p.theta).unwrap();
    }
    ensure!(by_colors == [0, 0, 0, 24, 24], "colorings by count {by_colors:?}");
    ensure!(
        lg.graph().count_colorings_direct(4) == Integer::from(48),
        "direct count"
    );
    Ok("2 unit embedded coalitions; 24 + 24 = 48 colorings".into())
}

fn criterion_4() -> Outcome {
    let mut r = rng(4004);
    let caps = Caps::default();
    let (mut poly_mq, mut poly_ef) = (0, 0);
    let total = 240;
    for case in 0..total {
        let n = r.gen_range(1..=6);
        let h = random_hybrid(&mut r, n);
        let rules = [Rule::from(h.clone())];
        let game = game_of_rules(&rules, n, &caps).map_err(|e| e.to_string())?;
        for kind in ValueKind::ALL {
            let colorings = esv_colorings_all(&h, kind, &caps).map_err(|e| e.to_string())?;
            for i in 1..=n {
                let brute = esv_bruteforce(&game, kind, i, &caps).map_err(|e| e.to_string())?;
                ensure!(brute == colorings[i - 1], "case {case} {kind} player {i}: {h}");
                if kind == ValueKind::MQ {
                    ensure!(mq_poly(&rules, n, i).unwrap() == brute, "mq case {case}: {h}");
                    poly_mq += 1;
                }
                if kind == ValueKind::EF && check_star(&h) {
                    ensure!(ef_poly(&rules, n, i).unwrap() == brute, "ef case {case}: {h}");
                    poly_ef += 1;
                }
            }
        }
    }
    ensure!(poly_ef > 0, "no star-condition rules were drawn");
    Ok(format!(
        "{total} rules, 5 kinds; {poly_mq} MQ and {poly_ef} EF polynomial checks"
    ))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5005);
    let caps = Caps::default();
    let total = 220;
    for case in 0..total {
        let n = r.gen_range(1..=6);
        let w = random_weighted(&mut r, n);
        let expected = game_of_rules(&[w.clone().into()], n, &caps).unwrap();
        ensure!(
            expected == oracle_game(&[w.clone().into()], n),
            "weighted semantics case {case}"
        );
        let hybrids: Vec<Rule> = weighted_to_hybrid(&w, n)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(Rule::from)
            .collect();
        ensure!(
            game_of_rules(&hybrids, n, &caps).unwrap() == expected,
            "weighted case {case}: {w}"
        );

        let e = random_embedded(&mut r, n);
        let expected = oracle_game(&[e.clone().into()], n);
        let h = embedded_to_hybrid(&e, n).map_err(|e| e.to_string())?;
        ensure!(check_star(&h), "star condition fails after converting {e}");
        ensure!(
            game_of_rules(&[h.clone().into()], n, &caps).unwrap() == expected,
            "embedded case {case}: {e}"
        );
        let back = hybrid_to_embedded(&h).map_err(|e| e.to_string())?;
        ensure!(
            game_of_rules(&[back.into()], n, &caps).unwrap() == expected,
            "round trip case {case}: {h}"
        );
    }
    Ok(format!("{total} weighted and {total} embedded rules"))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6006);
    let caps = Caps::default();
    let total = 120;
    for case in 0..total {
        let n = r.gen_range(1..=5);
        let table = random_char_fn(&mut r, n);
        let f = |s: Coalition| table[s.bits() as usize >> 1].clone();
        let sv = shapley(n, f);
        ensure!(sv == oracle_shapley(n, &f), "classic Shapley case {case}");
        let g = externality_free_lift(n, f, &caps).unwrap();
        for kind in ValueKind::ALL {
            for i in 1..=n {
                let v = esv_bruteforce(&g, kind, i, &caps).unwrap();
                ensure!(v == sv[i - 1], "{kind} extension case {case} player {i}");
            }
        }
    }
    for case in 0..total {
        let n = r.gen_range(1..=5);
        let g = random_partition_game(&mut r, n);
        for kind in ValueKind::ALL {
            let sum: Rational = (1..=n).map(|i| esv_bruteforce(&g, kind, i, &caps).unwrap()).sum();
            ensure!(sum == g.grand_value(), "{kind} efficiency case {case}");
        }
    }
    Ok(format!("{total} externality-free and {total} general games"))
}

fn criterion_7() -> Outcome {
    for n in 0..=8 {
        for rr in 0..=8 {
            let lhs: Integer = (0..=rr).map(|i| stirling2(rr, i) * r_bell(n, i)).sum();
            ensure!(lhs == bell(n + rr), "r-Bell recursion at n={n}, r={rr}");
        }
    }
    let fact = |i: usize| -> Integer { (1..=i).map(Integer::from).product() };
    for k in 1..=6 {
        let b = RationalMatrix::from_fn(k, k, |i, j| Rational::from_integer(r_bell(i + 1, j + 1)));
        let prod: Integer = (0..=k).map(fact).product();
        let euler: Rational = (0..=k).map(|i| Rational::new(Integer::one(), fact(i))).sum();
        let expected = Rational::from_integer(prod) * euler;
        ensure!(determinant(&b).unwrap() == expected, "r-Bell determinant k={k}");
        let hankel = RationalMatrix::from_fn(k, k, |i, j| Rational::from_integer(bell(i + j + 2)));
        ensure!(
            determinant(&hankel).unwrap() == expected,
            "Bell Hankel determinant k={k}"
        );
    }
    for k in 0..=5 {
        let a = RationalMatrix::from_fn(k + 1, k + 1, |i, j| Rational::from_integer(fact(i + j)));
        let expected: Integer = (0..=k).map(|i| fact(i) * fact(i)).product();
        ensure!(
            determinant(&a).unwrap() == Rational::from_integer(expected),
            "factorial Hankel determinant k={k}"
        );
    }
    Ok("r-Bell recursion n,r<=8; determinants k<=6 and k<=5".into())
}

fn criterion_8() -> Outcome {
    let caps = Caps::default();
    let mut graphs = 0;
    for k in 1..=5 {
        for g in all_graphs(k) {
            let ef = independent_sets_via_ef(&g, &caps).map_err(|e| e.to_string())?;
            ensure!(ef.is_consistent(), "independent sets on {:?}", g.edges());
            ensure!(
                ef.recovered == oracle_independent_sets(&g),
                "independent sets oracle {:?}",
                g.edges()
            );
            let hy = chromatic_counts_via_hy(&g, &caps).map_err(|e| e.to_string())?;
            ensure!(hy.is_consistent(), "colorings on {:?}", g.edges());
            ensure!(
                hy.recovered == oracle_exact_colorings(&g),
                "colorings oracle {:?}",
                g.edges()
            );
            graphs += 1;
        }
    }
    let mut bipartite = 0;
    for k in 1..=6 {
        for g in all_graphs(k).filter(Graph::is_bipartite) {
            let by_size = oracle_matchings_by_size(&g);
            let ss = hosoya_via_ss(&g, &caps).map_err(|e| e.to_string())?;
            ensure!(ss.is_consistent(), "hosoya on {:?}", g.edges());
            ensure!(
                ss.recovered[0] == by_size.iter().sum::<Integer>(),
                "hosoya oracle {:?}",
                g.edges()
            );
            let my = matchings_by_size_via_my(&g, &caps).map_err(|e| e.to_string())?;
            ensure!(my.is_consistent(), "matchings on {:?}", g.edges());
            let by_blocks: Vec<Integer> = (1..=k)
                .map(|m| by_size.get(k - m).cloned().unwrap_or_else(Integer::zero))
                .collect();
            ensure!(my.recovered == by_blocks, "matchings oracle {:?}", g.edges());
            bipartite += 1;
        }
    }
    Ok(format!(
        "{graphs} graphs (EF, HY) and {bipartite} bipartite graphs (SS, MY)"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("weight grid n=6", criterion_1, Duration::from_secs(1)),
        ("two-path coloring table", criterion_2, Duration::from_secs(1)),
        ("example rule game and colorings", criterion_3, Duration::from_secs(1)),
        ("cross-method agreement", criterion_4, Duration::from_secs(120)),
        ("transform soundness", criterion_5, Duration::from_secs(120)),
        ("extension and efficiency", criterion_6, Duration::from_secs(60)),
        ("combinatorial identities", criterion_7, Duration::from_secs(5)),
        ("reduction round-trips", criterion_8, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (idx, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()))
            .and_then(|detail| {
                let took = start.elapsed();
                if took > budget {
                    Err(format!("{detail}; took {took:.2?}, budget {budget:?}"))
                } else {
                    Ok(detail)
                }
            });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {took:.2?})", idx + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", idx + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
