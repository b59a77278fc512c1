//! Coalitions, partitions, partition-function games and the five weight
//! schemes of the extended Shapley values.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{bell, enumerate_set_partitions, factorial, r_bell, rat, Caps, Rational};
use crate::error::{Error, Result};

/// Largest supported player count (one bit per player).
pub const MAX_PLAYERS: usize = 64;

/// A set of players, bit `p - 1` standing for player `p`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub const fn empty() -> Self {
        Coalition(0)
    }

    pub const fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The grand coalition `1..=n`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_PLAYERS, "at most {MAX_PLAYERS} players");
        if n == MAX_PLAYERS {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        Coalition::empty().with(p)
    }

    pub fn with(self, p: usize) -> Self {
        assert!((1..=MAX_PLAYERS).contains(&p), "player index {p} out of range");
        Coalition(self.0 | 1u64 << (p - 1))
    }

    pub fn without(self, p: usize) -> Self {
        assert!((1..=MAX_PLAYERS).contains(&p), "player index {p} out of range");
        Coalition(self.0 & !(1u64 << (p - 1)))
    }

    pub fn contains(self, p: usize) -> bool {
        (1..=MAX_PLAYERS).contains(&p) && self.0 >> (p - 1) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn intersects(self, other: Coalition) -> bool {
        !self.is_disjoint(other)
    }

    /// Smallest member, if any.
    pub fn min_player(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Largest member, if any.
    pub fn max_player(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn players(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let p = bits.trailing_zeros() as usize + 1;
            bits &= bits - 1;
            Some(p)
        })
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Coalition> {
        let mask = self.0;
        let mut sub = 0u64;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = Coalition(sub);
            sub = sub.wrapping_sub(mask) & mask;
            done = sub == 0;
            Some(out)
        })
    }

    /// Fails unless every member lies in `1..=n`.
    pub fn check_within(self, n: usize) -> Result<()> {
        match self.max_player() {
            Some(p) if p > n => Err(Error::PlayerOutOfRange { player: p, n }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Coalition::empty(), Coalition::with)
    }
}

impl BitOr for Coalition {
    type Output = Coalition;
    fn bitor(self, rhs: Coalition) -> Coalition {
        Coalition(self.0 | rhs.0)
    }
}

impl BitAnd for Coalition {
    type Output = Coalition;
    fn bitand(self, rhs: Coalition) -> Coalition {
        Coalition(self.0 & rhs.0)
    }
}

impl Sub for Coalition {
    type Output = Coalition;
    fn sub(self, rhs: Coalition) -> Coalition {
        Coalition(self.0 & !rhs.0)
    }
}

impl Not for Coalition {
    type Output = Coalition;
    fn not(self) -> Coalition {
        Coalition(!self.0)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, p) in self.players().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Disjoint nonempty coalitions, ordered by smallest member.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<Coalition>);

impl Partition {
    /// Validates that `blocks` partition `1..=n`, then sorts them.
    pub fn new(mut blocks: Vec<Coalition>, n: usize) -> Result<Self> {
        let mut seen = Coalition::empty();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if b.intersects(seen) {
                return Err(Error::InvalidPartition(format!("block {b} overlaps another block")));
            }
            seen = seen | *b;
        }
        if seen != Coalition::full(n) {
            return Err(Error::InvalidPartition(format!(
                "blocks cover {seen}, expected players 1..={n}"
            )));
        }
        blocks.sort_by_key(|b| b.min_player());
        Ok(Partition(blocks))
    }

    pub(crate) fn from_sorted_blocks(blocks: Vec<Coalition>) -> Self {
        debug_assert!(blocks.windows(2).all(|w| w[0].min_player() < w[1].min_player()));
        Partition(blocks)
    }

    /// Sorts unchecked blocks into canonical order.
    pub(crate) fn from_blocks_unchecked(mut blocks: Vec<Coalition>) -> Self {
        blocks.sort_by_key(|b| b.min_player());
        Partition(blocks)
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ground(&self) -> Coalition {
        self.0.iter().fold(Coalition::empty(), |acc, b| acc | *b)
    }

    pub fn contains_block(&self, c: Coalition) -> bool {
        self.0.contains(&c)
    }

    /// The block holding player `p`.
    pub fn block_of(&self, p: usize) -> Option<Coalition> {
        self.0.iter().copied().find(|b| b.contains(p))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, b) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A coalition together with a partition it is a block of.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EmbeddedCoalition {
    coalition: Coalition,
    partition: Partition,
}

impl EmbeddedCoalition {
    pub fn new(coalition: Coalition, partition: Partition) -> Result<Self> {
        if !partition.contains_block(coalition) {
            return Err(Error::InvalidPartition(format!(
                "{coalition} is not a block of {partition}"
            )));
        }
        Ok(EmbeddedCoalition { coalition, partition })
    }

    pub fn coalition(&self) -> Coalition {
        self.coalition
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Sizes of the blocks other than the coalition.
    pub fn other_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.partition
            .blocks()
            .iter()
            .filter(move |b| **b != self.coalition)
            .map(|b| b.len())
    }
}

impl fmt::Display for EmbeddedCoalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.coalition, self.partition)
    }
}

/// A game in partition function form, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionGame {
    n: usize,
    values: BTreeMap<EmbeddedCoalition, Rational>,
}

impl PartitionGame {
    pub fn zero(n: usize) -> Self {
        PartitionGame {
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_ground(&self, ec: &EmbeddedCoalition) -> Result<()> {
        if ec.partition.ground() != Coalition::full(self.n) {
            return Err(Error::InvalidPartition(format!(
                "{} does not partition players 1..={}",
                ec.partition, self.n
            )));
        }
        Ok(())
    }

    pub fn get(&self, ec: &EmbeddedCoalition) -> Rational {
        self.values.get(ec).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, ec: EmbeddedCoalition, value: Rational) -> Result<()> {
        self.check_ground(&ec)?;
        if value.is_zero() {
            self.values.remove(&ec);
        } else {
            self.values.insert(ec, value);
        }
        Ok(())
    }

    pub fn add(&mut self, ec: EmbeddedCoalition, value: &Rational) -> Result<()> {
        self.check_ground(&ec)?;
        let sum = self.get(&ec) + value;
        self.set(ec, sum)
    }

    /// Nonzero entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&EmbeddedCoalition, &Rational)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: &Rational) -> PartitionGame {
        let mut out = PartitionGame::zero(self.n);
        if !factor.is_zero() {
            out.values = self.values.iter().map(|(k, v)| (k.clone(), v * factor)).collect();
        }
        out
    }

    pub fn sum(&self, other: &PartitionGame) -> Result<PartitionGame> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "games over {} and {} players",
                self.n, other.n
            )));
        }
        let mut out = self.clone();
        for (k, v) in &other.values {
            out.add(k.clone(), v)?;
        }
        Ok(out)
    }

    /// Value of the grand coalition in the one-block partition.
    pub fn grand_value(&self) -> Rational {
        let full = Coalition::full(self.n);
        let ec = EmbeddedCoalition {
            coalition: full,
            partition: Partition(vec![full]),
        };
        self.get(&ec)
    }
}

/// The five extensions of the Shapley value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ValueKind {
    /// McQuillin
    MQ,
    /// externality-free
    EF,
    /// Hu-Yang
    HY,
    /// stochastic Shapley
    SS,
    /// Myerson
    MY,
}

impl ValueKind {
    pub const ALL: [ValueKind; 5] = [
        ValueKind::MQ,
        ValueKind::EF,
        ValueKind::HY,
        ValueKind::SS,
        ValueKind::MY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValueKind::MQ => "MQ",
            ValueKind::EF => "EF",
            ValueKind::HY => "HY",
            ValueKind::SS => "SS",
            ValueKind::MY => "MY",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ValueKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ValueKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown value kind '{s}' (expected MQ, EF, HY, SS or MY)"))
    }
}

/// Signed probability that, in a uniformly random order of `n` players,
/// exactly `S` minus `i` precedes `i`, with the sign recording membership.
pub fn zeta(s: Coalition, i: usize, n: usize) -> Result<Rational> {
    if s.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    s.check_within(n)?;
    if !(1..=n).contains(&i) {
        return Err(Error::PlayerOutOfRange { player: i, n });
    }
    Ok(zeta_by_size(s.len(), s.contains(i), n))
}

pub(crate) fn zeta_by_size(size: usize, member: bool, n: usize) -> Rational {
    if member {
        Rational::new(factorial(size - 1) * factorial(n - size), factorial(n))
    } else {
        -Rational::new(factorial(size) * factorial(n - size - 1), factorial(n))
    }
}

/// The shape of an embedded coalition as seen by one player: everything a
/// weight depends on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightShape {
    pub n: usize,
    pub coalition_size: usize,
    pub player_inside: bool,
    /// Sizes of the other blocks. When the player is outside the coalition
    /// the block holding the player comes first.
    pub other_sizes: Vec<usize>,
}

impl WeightShape {
    pub fn of(ec: &EmbeddedCoalition, i: usize, n: usize) -> Self {
        let s = ec.coalition();
        let inside = s.contains(i);
        let mut other_sizes = Vec::with_capacity(ec.partition().len());
        if !inside {
            if let Some(b) = ec.partition().block_of(i) {
                other_sizes.push(b.len());
            }
        }
        for b in ec.partition().blocks() {
            if *b != s && !b.contains(i) {
                other_sizes.push(b.len());
            }
        }
        WeightShape {
            n,
            coalition_size: s.len(),
            player_inside: inside,
            other_sizes,
        }
    }

    pub fn blocks(&self) -> usize {
        self.other_sizes.len() + 1
    }

    pub fn weight(&self, kind: ValueKind) -> Rational {
        let n = self.n;
        let s = self.coalition_size;
        let p = self.blocks();
        let zeta = || zeta_by_size(s, self.player_inside, n);
        match kind {
            ValueKind::MQ => {
                if p <= 2 {
                    zeta()
                } else {
                    Rational::zero()
                }
            }
            ValueKind::EF => {
                if p - 1 == n - s {
                    zeta()
                } else {
                    Rational::zero()
                }
            }
            ValueKind::HY => zeta() * Rational::new(r_bell(s, p - 1), bell(n)),
            ValueKind::SS => {
                let num = self
                    .other_sizes
                    .iter()
                    .fold(num_bigint::BigInt::one(), |acc, t| acc * factorial(t - 1));
                zeta() * Rational::new(num, factorial(n - s))
            }
            ValueKind::MY => {
                // the block holding i (when outside S) is skipped
                let skip = usize::from(!self.player_inside);
                let sum: Rational = if p >= 2 {
                    let inner = factorial(p - 2);
                    self.other_sizes
                        .iter()
                        .skip(skip)
                        .map(|t| Rational::new(inner.clone(), (n - t).into()))
                        .sum()
                } else {
                    Rational::zero()
                };
                let tail = Rational::new(factorial(p - 1), n.into());
                let sign = if p % 2 == 0 { rat(1) } else { rat(-1) };
                sign * (sum - tail)
            }
        }
    }
}

/// Weight of `ec` in the value of player `i` for an `n`-player game.
pub fn esv_weight(kind: ValueKind, ec: &EmbeddedCoalition, i: usize, n: usize) -> Rational {
    WeightShape::of(ec, i, n).weight(kind)
}

/// Extended value of player `i`, summing weight times value over every
/// embedded coalition.
pub fn esv_bruteforce(g: &PartitionGame, kind: ValueKind, i: usize, caps: &Caps) -> Result<Rational> {
    let n = g.n();
    if !(1..=n).contains(&i) {
        return Err(Error::PlayerOutOfRange { player: i, n });
    }
    let mut total = Rational::zero();
    if g.is_zero() {
        // still honour the cap so refusals are consistent
        Caps::check(caps.players, "player set", n)?;
        return Ok(total);
    }
    for partition in enumerate_set_partitions(n, caps.players)? {
        for &s in partition.blocks() {
            let ec = EmbeddedCoalition {
                coalition: s,
                partition: partition.clone(),
            };
            if let Some(v) = g.values.get(&ec) {
                total += esv_weight(kind, &ec, i, n) * v;
            }
        }
    }
    Ok(total)
}

/// Classic Shapley value of every player.
pub fn shapley(n: usize, char_fn: impl Fn(Coalition) -> Rational) -> Vec<Rational> {
    let full = Coalition::full(n);
    let mut out = vec![Rational::zero(); n];
    for s in full.subsets().filter(|s| !s.is_empty()) {
        let v = char_fn(s);
        if v.is_zero() {
            continue;
        }
        for (idx, slot) in out.iter_mut().enumerate() {
            *slot += zeta_by_size(s.len(), s.contains(idx + 1), n) * &v;
        }
    }
    out
}

/// Partition game ignoring the partition: `g(S, P) = f(S)`.
pub fn externality_free_lift(n: usize, char_fn: impl Fn(Coalition) -> Rational, caps: &Caps) -> Result<PartitionGame> {
    let mut g = PartitionGame::zero(n);
    for partition in enumerate_set_partitions(n, caps.players)? {
        for &s in partition.blocks() {
            let v = char_fn(s);
            if !v.is_zero() {
                g.values.insert(
                    EmbeddedCoalition {
                        coalition: s,
                        partition: partition.clone(),
                    },
                    v,
                );
            }
        }
    }
    Ok(g)
}

/// Embedded coalition builder for tests and fixtures: blocks given as
/// player lists, the coalition being `blocks[coalition_idx]`.
pub fn embedded(n: usize, blocks: &[&[usize]], coalition_idx: usize) -> Result<EmbeddedCoalition> {
    let coalitions: Vec<Coalition> = blocks.iter().map(|b| b.iter().copied().collect()).collect();
    for c in &coalitions {
        c.check_within(n)?;
    }
    let s = *coalitions
        .get(coalition_idx)
        .ok_or_else(|| Error::InvalidPartition("coalition index out of range".into()))?;
    EmbeddedCoalition::new(s, Partition::new(coalitions, n)?)
}
