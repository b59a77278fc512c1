//! Rewritings between weighted, embedded and hybrid rules that preserve
//! the induced game.

use num_traits::Zero;

use crate::combinatorics::Rational;
use crate::error::{Error, Result};
use crate::game::Coalition;
use crate::rules::{compatible, BoolExpr, EmbeddedRule, HybridRule, Rule, WeightedRule};

/// Upper bound on the total size of `weighted_to_hybrid` output for an
/// input of size `s` over `n` players.
pub fn weighted_size_bound(s: usize, n: usize) -> usize {
    s.pow(3) + 2 * s * s + 2 * n * s
}

/// Upper bound on the size of `embedded_to_hybrid` output.
pub fn embedded_size_bound(s: usize, n: usize) -> usize {
    3 * s + 2 * n
}

/// Total size of a rule collection: literals plus weights.
pub fn total_size(rules: &[HybridRule]) -> usize {
    rules.iter().map(HybridRule::size).sum()
}

fn padding(covered: Coalition, n: usize) -> impl Iterator<Item = BoolExpr> {
    (Coalition::full(n) - covered).players().map(BoolExpr::player)
}

fn union_positives<'a>(exprs: impl IntoIterator<Item = &'a BoolExpr>) -> Coalition {
    exprs.into_iter().fold(Coalition::empty(), |acc, a| acc | a.positives())
}

fn check_range(players: Coalition, n: usize) -> Result<()> {
    players.check_within(n)
}

/// Splits a weighted rule into hybrid rules inducing the same game.
///
/// Overlapping positive sets are resolved first: within one block,
/// compatible expressions are conjoined (weights added) until no overlap
/// remains, scanning pairs in index order; any cross-block or incompatible
/// overlap makes the rule unsatisfiable, giving an empty result. Each
/// expression then excludes the positives of the other blocks, and one
/// hybrid rule is emitted per nonzero weight, padded with `(p -> 0)` for
/// players no expression mentions positively.
pub fn weighted_to_hybrid(rule: &WeightedRule, n: usize) -> Result<Vec<HybridRule>> {
    check_range(rule.players(), n)?;
    let mut items: Vec<(usize, BoolExpr, Rational)> = rule
        .blocks()
        .iter()
        .enumerate()
        .flat_map(|(b, rs)| rs.iter().map(move |r| (b, r.expr, r.weight.clone())))
        .collect();

    'merge: loop {
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                if items[i].1.positives().is_disjoint(items[j].1.positives()) {
                    continue;
                }
                if items[i].0 != items[j].0 {
                    return Ok(Vec::new());
                }
                let Some(joined) = items[i].1.and(&items[j].1) else {
                    return Ok(Vec::new());
                };
                let (_, _, w) = items.remove(j);
                items[i].1 = joined;
                items[i].2 += w;
                continue 'merge;
            }
        }
        break;
    }

    let blocks = rule.blocks().len();
    let mut block_positives = vec![Coalition::empty(); blocks];
    for (b, e, _) in &items {
        block_positives[*b] = block_positives[*b] | e.positives();
    }
    let all_positives = union_positives(items.iter().map(|t| &t.1));
    let betas: Vec<BoolExpr> = items
        .iter()
        .map(|(b, e, _)| e.with_negatives(all_positives - block_positives[*b]))
        .collect();
    let pads: Vec<BoolExpr> = padding(all_positives, n).collect();

    let mut out = Vec::new();
    for (idx, (_, _, w)) in items.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let mut exprs = Vec::with_capacity(betas.len() + pads.len());
        exprs.push(betas[idx]);
        exprs.extend(betas.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, e)| *e));
        exprs.extend(pads.iter().copied());
        out.push(HybridRule::new(exprs, w.clone())?);
    }
    debug_assert!(total_size(&out) <= weighted_size_bound(rule.size(), n));
    Ok(out)
}

/// The canonical weight-zero hybrid rule `(1 -> 0) (2 -> 0) ... (n -> 0)`.
pub fn zero_hybrid(n: usize) -> HybridRule {
    HybridRule::new((1..=n).map(BoolExpr::player).collect(), Rational::zero())
        .expect("singletons partition the players")
}

/// Rewrites an embedded rule as a hybrid rule satisfying the star
/// condition (see [`check_star`]).
pub fn embedded_to_hybrid(rule: &EmbeddedRule, n: usize) -> Result<HybridRule> {
    check_range(rule.players(), n)?;
    let mut exprs: Vec<BoolExpr> = std::iter::once(rule.head).chain(rule.others.iter().copied()).collect();

    'merge: loop {
        for i in 0..exprs.len() {
            for j in i + 1..exprs.len() {
                if exprs[i].positives().is_disjoint(exprs[j].positives()) {
                    continue;
                }
                // the head cannot share players with a coalition other than S
                let joined = if i == 0 { None } else { exprs[i].and(&exprs[j]) };
                let Some(joined) = joined else {
                    return Ok(zero_hybrid(n));
                };
                exprs.remove(j);
                exprs[i] = joined;
                continue 'merge;
            }
        }
        break;
    }

    let others_positives = union_positives(&exprs[1..]);
    exprs[0] = exprs[0].with_negatives(others_positives);
    let covered = union_positives(&exprs);
    exprs.extend(padding(covered, n));
    let out = HybridRule::new(exprs, rule.weight.clone())?;
    debug_assert!(out.size() <= embedded_size_bound(rule.size(), n));
    Ok(out)
}

/// First violation of the star condition, as 1-based expression indices.
///
/// The condition: every tail expression compatible with the head has a
/// single positive literal, and all such expressions are pairwise
/// compatible.
pub fn star_violation(rule: &HybridRule) -> Option<Error> {
    let exprs = rule.exprs();
    let tail: Vec<usize> = (1..exprs.len()).filter(|&i| compatible(&exprs[0], &exprs[i])).collect();
    for (pos, &i) in tail.iter().enumerate() {
        if exprs[i].positives().len() != 1 {
            return Some(Error::StarViolation {
                first: i + 1,
                second: None,
                detail: format!(
                    "expression {} is compatible with the first expression but has several positive literals",
                    i + 1
                ),
            });
        }
        for &j in &tail[pos + 1..] {
            if !compatible(&exprs[i], &exprs[j]) {
                return Some(Error::StarViolation {
                    first: i + 1,
                    second: Some(j + 1),
                    detail: format!(
                        "expressions {} and {} are both compatible with the first expression but not with each other",
                        i + 1,
                        j + 1
                    ),
                });
            }
        }
    }
    None
}

pub fn check_star(rule: &HybridRule) -> bool {
    star_violation(rule).is_none()
}

/// Rewrites a hybrid rule satisfying the star condition as an embedded
/// rule.
///
/// Negative literals of head-compatible tail expressions are moved onto
/// the expressions owning those players, after which the compatible tail
/// expressions are bare singletons that always hold and are dropped.
/// Literals implied by disjointness of the head's coalition from the
/// others are then pruned.
pub fn hybrid_to_embedded(rule: &HybridRule) -> Result<EmbeddedRule> {
    if let Some(e) = star_violation(rule) {
        return Err(e);
    }
    let mut exprs = rule.exprs().to_vec();
    let head_compatible: Vec<bool> = exprs
        .iter()
        .enumerate()
        .map(|(i, a)| i > 0 && compatible(&exprs[0], a))
        .collect();
    let owner_of = |exprs: &[BoolExpr], p: usize| {
        exprs
            .iter()
            .position(|a| a.positives().contains(p))
            .expect("positives cover every player")
    };
    for i in 1..exprs.len() {
        if !head_compatible[i] {
            continue;
        }
        for p in exprs[i].negatives().players().collect::<Vec<_>>() {
            let j = owner_of(&exprs, p);
            debug_assert!(j != 0 && !head_compatible[j]);
            exprs[j] = exprs[j].with_negatives(exprs[i].positives());
            exprs[i] = exprs[i].without_negatives(Coalition::singleton(p));
        }
    }
    let others: Vec<BoolExpr> = (1..exprs.len())
        .filter(|&i| !head_compatible[i])
        .map(|i| exprs[i])
        .collect();
    let head = exprs[0].without_negatives(union_positives(&others));
    let others = others.iter().map(|a| a.without_negatives(head.positives())).collect();
    Ok(EmbeddedRule::new(head, others, rule.weight().clone()))
}

/// Normalizes any rule to hybrid rules over `n` players.
pub fn to_hybrid(rule: &Rule, n: usize) -> Result<Vec<HybridRule>> {
    match rule {
        Rule::Hybrid(h) => Ok(vec![h.clone()]),
        Rule::Embedded(e) => Ok(vec![embedded_to_hybrid(e, n)?]),
        Rule::Weighted(w) => weighted_to_hybrid(w, n),
        Rule::Mc(m) => {
            let w = WeightedRule::new(vec![vec![m.clone()]])?;
            weighted_to_hybrid(&w, n)
        }
    }
}

/// An MC-rule as an embedded rule with no conditions on other coalitions.
pub fn mc_to_embedded(rule: &crate::rules::McRule) -> EmbeddedRule {
    EmbeddedRule::new(rule.expr, Vec::new(), rule.weight.clone())
}
