//! MC-nets rule families and their game semantics.

mod parse;

use std::fmt;

use num_traits::Zero;

pub use parse::{parse_rule_file, parse_rules};

use crate::combinatorics::{enumerate_set_partitions, Caps, Rational};
use crate::error::{Error, Result};
use crate::game::{Coalition, EmbeddedCoalition, Partition, PartitionGame};

/// A conjunction of positive and negative player literals.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BoolExpr {
    positives: Coalition,
    negatives: Coalition,
}

impl BoolExpr {
    pub fn new(positives: Coalition, negatives: Coalition) -> Result<Self> {
        if positives.is_empty() {
            return Err(Error::InvalidRule(
                "expression needs at least one positive literal".into(),
            ));
        }
        if positives.intersects(negatives) {
            return Err(Error::InvalidRule(format!(
                "players {} appear both positively and negatively",
                positives & negatives
            )));
        }
        Ok(BoolExpr { positives, negatives })
    }

    /// Builds from signed literals: `3` is player 3, `-3` its negation.
    pub fn from_literals(lits: &[i64]) -> Result<Self> {
        let mut pos = Coalition::empty();
        let mut neg = Coalition::empty();
        for &l in lits {
            let p = l.unsigned_abs() as usize;
            if p == 0 || p > crate::game::MAX_PLAYERS {
                return Err(Error::InvalidRule(format!("bad literal {l}")));
            }
            if pos.contains(p) || neg.contains(p) {
                return Err(Error::InvalidRule(format!("duplicate literal for player {p}")));
            }
            if l > 0 {
                pos = pos.with(p);
            } else {
                neg = neg.with(p);
            }
        }
        BoolExpr::new(pos, neg)
    }

    /// The expression satisfied exactly by coalitions containing `p`.
    pub fn player(p: usize) -> Self {
        BoolExpr {
            positives: Coalition::singleton(p),
            negatives: Coalition::empty(),
        }
    }

    pub fn positives(&self) -> Coalition {
        self.positives
    }

    pub fn negatives(&self) -> Coalition {
        self.negatives
    }

    /// Every player mentioned.
    pub fn players(&self) -> Coalition {
        self.positives | self.negatives
    }

    /// Number of literals.
    pub fn size(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    /// Conjunction of two compatible expressions.
    pub fn and(&self, other: &BoolExpr) -> Option<BoolExpr> {
        compatible(self, other).then(|| BoolExpr {
            positives: self.positives | other.positives,
            negatives: self.negatives | other.negatives,
        })
    }

    /// Adds negative literals, skipping any that are positive here.
    pub fn with_negatives(&self, extra: Coalition) -> BoolExpr {
        BoolExpr {
            positives: self.positives,
            negatives: self.negatives | (extra - self.positives),
        }
    }

    pub fn without_negatives(&self, drop: Coalition) -> BoolExpr {
        BoolExpr {
            positives: self.positives,
            negatives: self.negatives - drop,
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self
            .positives
            .players()
            .map(|p| p.to_string())
            .chain(self.negatives.players().map(|p| format!("!{p}")))
            .collect();
        f.write_str(&lits.join(" "))
    }
}

pub fn satisfies_expr(s: Coalition, a: &BoolExpr) -> bool {
    a.positives.is_subset(s) && a.negatives.is_disjoint(s)
}

/// Whether some coalition satisfies both expressions.
pub fn compatible(a: &BoolExpr, b: &BoolExpr) -> bool {
    (a.positives | b.positives).is_disjoint(a.negatives | b.negatives)
}

/// `expr -> weight`: a rule for games without externalities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct McRule {
    pub expr: BoolExpr,
    pub weight: Rational,
}

impl McRule {
    pub fn new(expr: BoolExpr, weight: Rational) -> Self {
        McRule { expr, weight }
    }

    pub fn value(&self, s: Coalition) -> Rational {
        if satisfies_expr(s, &self.expr) {
            self.weight.clone()
        } else {
            Rational::zero()
        }
    }

    pub fn size(&self) -> usize {
        self.expr.size() + 1
    }
}

impl fmt::Display for McRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.expr, self.weight)
    }
}

/// `(head | others...) -> weight`: the coalition must satisfy the head and
/// every other expression must hold in some other coalition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EmbeddedRule {
    pub head: BoolExpr,
    pub others: Vec<BoolExpr>,
    pub weight: Rational,
}

impl EmbeddedRule {
    pub fn new(head: BoolExpr, others: Vec<BoolExpr>, weight: Rational) -> Self {
        EmbeddedRule { head, others, weight }
    }

    pub fn is_satisfied(&self, s: Coalition, p: &Partition) -> bool {
        satisfies_expr(s, &self.head)
            && self
                .others
                .iter()
                .all(|a| p.blocks().iter().any(|&t| t != s && satisfies_expr(t, a)))
    }

    pub fn value(&self, s: Coalition, p: &Partition) -> Rational {
        if self.is_satisfied(s, p) {
            self.weight.clone()
        } else {
            Rational::zero()
        }
    }

    pub fn size(&self) -> usize {
        self.head.size() + self.others.iter().map(BoolExpr::size).sum::<usize>() + 1
    }

    pub fn players(&self) -> Coalition {
        self.others.iter().fold(self.head.players(), |acc, a| acc | a.players())
    }
}

impl fmt::Display for EmbeddedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.others.is_empty() {
            let others: Vec<String> = self.others.iter().map(|a| a.to_string()).collect();
            write!(f, " | {}", others.join(" , "))?;
        }
        write!(f, " -> {}", self.weight)
    }
}

/// Bar-separated blocks of MC-rules; a partition satisfies the rule when it
/// splits into sub-partitions, one per block, each satisfying every MC-rule
/// of its block with one of its coalitions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightedRule {
    blocks: Vec<Vec<McRule>>,
}

/// Outcome of matching a partition against a weighted rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightedSatisfaction {
    pub satisfied: bool,
    /// When satisfied, the sub-partition assigned to each block.
    pub witness: Option<Vec<Vec<Coalition>>>,
}

impl WeightedRule {
    pub fn new(blocks: Vec<Vec<McRule>>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidRule(
                "weighted rule needs at least one block and no empty blocks".into(),
            ));
        }
        Ok(WeightedRule { blocks })
    }

    pub fn blocks(&self) -> &[Vec<McRule>] {
        &self.blocks
    }

    pub fn mc_rules(&self) -> impl Iterator<Item = &McRule> {
        self.blocks.iter().flatten()
    }

    pub fn size(&self) -> usize {
        self.mc_rules().map(McRule::size).sum()
    }

    pub fn players(&self) -> Coalition {
        self.mc_rules()
            .fold(Coalition::empty(), |acc, r| acc | r.expr.players())
    }

    /// Sum of weights of inner rules `s` satisfies, ignoring the partition.
    fn inner_value(&self, s: Coalition) -> Rational {
        self.mc_rules().map(|r| r.value(s)).sum()
    }

    pub fn value(&self, s: Coalition, p: &Partition) -> Rational {
        if satisfies_weighted(p, self).satisfied {
            self.inner_value(s)
        } else {
            Rational::zero()
        }
    }
}

impl fmt::Display for WeightedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, block) in self.blocks.iter().enumerate() {
            if idx > 0 {
                f.write_str(" | ")?;
            }
            let parts: Vec<String> = block.iter().map(|r| format!("({r})")).collect();
            f.write_str(&parts.join(" "))?;
        }
        Ok(())
    }
}

/// Exhaustive backtracking: each inner rule picks a satisfying coalition
/// that is either unowned or already owned by the same block. Coalitions
/// left unowned are dumped into the first block of the witness.
pub fn satisfies_weighted(p: &Partition, rule: &WeightedRule) -> WeightedSatisfaction {
    let coalitions = p.blocks();
    let tasks: Vec<(usize, &BoolExpr)> = rule
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(b, rules)| rules.iter().map(move |r| (b, &r.expr)))
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; coalitions.len()];

    fn search(
        task: usize,
        tasks: &[(usize, &BoolExpr)],
        coalitions: &[Coalition],
        owner: &mut [Option<usize>],
    ) -> bool {
        let Some(&(block, expr)) = tasks.get(task) else {
            return true;
        };
        for (idx, &t) in coalitions.iter().enumerate() {
            if !satisfies_expr(t, expr) {
                continue;
            }
            match owner[idx] {
                Some(b) if b == block => {
                    if search(task + 1, tasks, coalitions, owner) {
                        return true;
                    }
                }
                Some(_) => {}
                None => {
                    owner[idx] = Some(block);
                    if search(task + 1, tasks, coalitions, owner) {
                        return true;
                    }
                    owner[idx] = None;
                }
            }
        }
        false
    }

    if !search(0, &tasks, coalitions, &mut owner) {
        return WeightedSatisfaction {
            satisfied: false,
            witness: None,
        };
    }
    let mut witness = vec![Vec::new(); rule.blocks.len()];
    for (idx, &t) in coalitions.iter().enumerate() {
        witness[owner[idx].unwrap_or(0)].push(t);
    }
    WeightedSatisfaction {
        satisfied: true,
        witness: Some(witness),
    }
}

/// `(a1 -> c) (a2 -> 0) ... (ak -> 0)` with the positive sets of the
/// expressions partitioning the player set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HybridRule {
    exprs: Vec<BoolExpr>,
    weight: Rational,
}

impl HybridRule {
    pub fn new(exprs: Vec<BoolExpr>, weight: Rational) -> Result<Self> {
        if exprs.is_empty() {
            return Err(Error::InvalidRule("hybrid rule needs an expression".into()));
        }
        let mut seen = Coalition::empty();
        for a in &exprs {
            if a.positives.intersects(seen) {
                return Err(Error::InvalidRule(format!(
                    "positive literals {} repeat across expressions",
                    a.positives & seen
                )));
            }
            seen = seen | a.positives;
        }
        let n = seen.max_player().unwrap_or(0);
        if seen != Coalition::full(n) {
            return Err(Error::InvalidRule(format!(
                "positive literals {seen} do not cover players 1..={n}"
            )));
        }
        if let Some(a) = exprs.iter().find(|a| !a.negatives.is_subset(seen)) {
            return Err(Error::InvalidRule(format!(
                "expression '{a}' mentions players outside 1..={n}"
            )));
        }
        Ok(HybridRule { exprs, weight })
    }

    pub fn n(&self) -> usize {
        self.players().len()
    }

    pub fn players(&self) -> Coalition {
        self.exprs.iter().fold(Coalition::empty(), |acc, a| acc | a.positives)
    }

    pub fn exprs(&self) -> &[BoolExpr] {
        &self.exprs
    }

    pub fn head(&self) -> &BoolExpr {
        &self.exprs[0]
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn with_weight(&self, weight: Rational) -> HybridRule {
        HybridRule {
            exprs: self.exprs.clone(),
            weight,
        }
    }

    pub fn size(&self) -> usize {
        self.exprs.iter().map(BoolExpr::size).sum::<usize>() + self.exprs.len()
    }

    /// `S` satisfies the head and every later expression holds in some
    /// coalition of `P` (possibly `S` itself).
    pub fn is_satisfied(&self, s: Coalition, p: &Partition) -> bool {
        satisfies_expr(s, &self.exprs[0])
            && self.exprs[1..]
                .iter()
                .all(|a| p.blocks().iter().any(|&t| satisfies_expr(t, a)))
    }

    pub fn value(&self, s: Coalition, p: &Partition) -> Rational {
        if self.is_satisfied(s, p) {
            self.weight.clone()
        } else {
            Rational::zero()
        }
    }

    /// The same rule viewed as a one-block weighted rule.
    pub fn as_weighted(&self) -> WeightedRule {
        let block = self
            .exprs
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let w = if idx == 0 {
                    self.weight.clone()
                } else {
                    Rational::zero()
                };
                McRule::new(*a, w)
            })
            .collect();
        WeightedRule { blocks: vec![block] }
    }
}

impl fmt::Display for HybridRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, a) in self.exprs.iter().enumerate() {
            if idx > 0 {
                f.write_str(" ")?;
                write!(f, "({a} -> 0)")?;
            } else {
                write!(f, "({a} -> {})", self.weight)?;
            }
        }
        Ok(())
    }
}

/// Any rule of the supported families.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    Mc(McRule),
    Embedded(EmbeddedRule),
    Weighted(WeightedRule),
    Hybrid(HybridRule),
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Mc(_) => "mc",
            Rule::Embedded(_) => "embedded",
            Rule::Weighted(_) => "weighted",
            Rule::Hybrid(_) => "hybrid",
        }
    }

    pub fn players(&self) -> Coalition {
        match self {
            Rule::Mc(r) => r.expr.players(),
            Rule::Embedded(r) => r.players(),
            Rule::Weighted(r) => r.players(),
            Rule::Hybrid(r) => r.players(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Rule::Mc(r) => r.size(),
            Rule::Embedded(r) => r.size(),
            Rule::Weighted(r) => r.size(),
            Rule::Hybrid(r) => r.size(),
        }
    }

    /// Value of `(s, p)`; weighted rules recompute partition satisfaction,
    /// so prefer [`game_of_rules`] for whole games.
    pub fn value(&self, s: Coalition, p: &Partition) -> Rational {
        match self {
            Rule::Mc(r) => r.value(s),
            Rule::Embedded(r) => r.value(s, p),
            Rule::Weighted(r) => r.value(s, p),
            Rule::Hybrid(r) => r.value(s, p),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Mc(r) => write!(f, "mc: {r}"),
            Rule::Embedded(r) => write!(f, "embedded: {r}"),
            Rule::Weighted(r) => write!(f, "weighted: {r}"),
            Rule::Hybrid(r) => write!(f, "hybrid: {r}"),
        }
    }
}

impl From<McRule> for Rule {
    fn from(r: McRule) -> Self {
        Rule::Mc(r)
    }
}

impl From<EmbeddedRule> for Rule {
    fn from(r: EmbeddedRule) -> Self {
        Rule::Embedded(r)
    }
}

impl From<WeightedRule> for Rule {
    fn from(r: WeightedRule) -> Self {
        Rule::Weighted(r)
    }
}

impl From<HybridRule> for Rule {
    fn from(r: HybridRule) -> Self {
        Rule::Hybrid(r)
    }
}

/// A multiset of rules over players `1..=n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RuleSet {
    n: usize,
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(n: usize, rules: Vec<Rule>) -> Result<Self> {
        if n == 0 || n > crate::game::MAX_PLAYERS {
            return Err(Error::InvalidRule(format!("player count {n} unsupported")));
        }
        for r in &rules {
            r.players().check_within(n)?;
            if let Rule::Hybrid(h) = r {
                if h.n() != n {
                    return Err(Error::InvalidRule(format!(
                        "hybrid rule covers {} players, rule set has {n}",
                        h.n()
                    )));
                }
            }
        }
        Ok(RuleSet { n, rules })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn into_rules(self) -> Vec<Rule> {
        self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn game(&self, caps: &Caps) -> Result<PartitionGame> {
        game_of_rules(&self.rules, self.n, caps)
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "players: {}", self.n)?;
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Explicit game induced by a rule multiset: values add across rules.
pub fn game_of_rules(rules: &[Rule], n: usize, caps: &Caps) -> Result<PartitionGame> {
    for r in rules {
        r.players().check_within(n)?;
    }
    let mut game = PartitionGame::zero(n);
    for p in enumerate_set_partitions(n, caps.players)? {
        // partition-level satisfaction, computed once per partition
        let weighted_ok: Vec<bool> = rules
            .iter()
            .map(|r| match r {
                Rule::Weighted(w) => satisfies_weighted(&p, w).satisfied,
                _ => true,
            })
            .collect();
        for &s in p.blocks() {
            let mut total = Rational::zero();
            for (r, ok) in rules.iter().zip(&weighted_ok) {
                total += match r {
                    Rule::Weighted(w) if *ok => w.inner_value(s),
                    Rule::Weighted(_) => Rational::zero(),
                    other => other.value(s, &p),
                };
            }
            if !total.is_zero() {
                game.set(EmbeddedCoalition::new(s, p.clone())?, total)?;
            }
        }
    }
    Ok(game)
}
