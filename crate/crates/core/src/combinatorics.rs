//! Exact integer and rational primitives: factorials, Stirling and Bell
//! numbers, restricted-growth-string enumeration of set partitions, and
//! Gaussian elimination over the rationals.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Coalition, Partition};

/// Arbitrary-precision exact rational. Always kept in lowest terms.
pub type Rational = BigRational;

/// Arbitrary-precision integer.
pub type Integer = BigInt;

pub const DEFAULT_PARTITION_CAP: usize = 12;
pub const DEFAULT_NODE_CAP: usize = 12;
pub const DEFAULT_SUBGRAPH_CAP: usize = 20;

/// Size bounds for every exhaustive enumeration in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest player count for set-partition enumeration over players.
    pub players: usize,
    /// Largest node count for enumerating independent-set partitions.
    pub nodes: usize,
    /// Largest node count for independent-set and matching enumeration.
    pub subgraph: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            players: DEFAULT_PARTITION_CAP,
            nodes: DEFAULT_NODE_CAP,
            subgraph: DEFAULT_SUBGRAPH_CAP,
        }
    }
}

impl Caps {
    /// Every cap set to the same bound.
    pub fn uniform(cap: usize) -> Self {
        Caps {
            players: cap,
            nodes: cap,
            subgraph: cap,
        }
    }

    /// Defaults, overridden by the `EXSHAP_CAP` environment variable when it
    /// holds a valid count.
    pub fn from_env() -> Self {
        std::env::var("EXSHAP_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Caps::uniform)
            .unwrap_or_default()
    }

    pub(crate) fn check(cap: usize, what: &'static str, size: usize) -> Result<()> {
        if size > cap {
            Err(Error::CapExceeded { what, size, cap })
        } else {
            Ok(())
        }
    }
}

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![BigInt::one()];
        for i in 1..=64u32 {
            let next = &t[t.len() - 1] * BigInt::from(i);
            t.push(next);
        }
        t
    })
}

pub fn factorial(n: usize) -> Integer {
    let table = factorial_table();
    if n < table.len() {
        return table[n].clone();
    }
    (table.len()..=n).fold(table[table.len() - 1].clone(), |acc, i| acc * BigInt::from(i))
}

/// `n (n-1) ... (n-p+1)`; zero when `p > n`.
pub fn falling_factorial(n: usize, p: usize) -> Integer {
    if p > n {
        return BigInt::zero();
    }
    ((n - p + 1)..=n).fold(BigInt::one(), |acc, x| acc * BigInt::from(x))
}

pub fn binomial(n: usize, k: usize) -> Integer {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Stirling number of the second kind `{r, i}`; zero when `i > r`.
pub fn stirling2(r: usize, i: usize) -> Integer {
    if i > r {
        return BigInt::zero();
    }
    // row[j] = {m, j} for the current m
    let mut row = vec![BigInt::zero(); i + 1];
    row[0] = BigInt::one();
    for m in 1..=r {
        for j in (1..=i.min(m)).rev() {
            row[j] = BigInt::from(j) * &row[j] + &row[j - 1];
        }
        row[0] = BigInt::zero();
    }
    row[i].clone()
}

fn bell_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Bell triangle.
        let mut bells = vec![BigInt::one()];
        let mut row = vec![BigInt::one()];
        for _ in 1..=64 {
            let mut next = Vec::with_capacity(row.len() + 1);
            next.push(row[row.len() - 1].clone());
            for x in &row {
                let v = &next[next.len() - 1] + x;
                next.push(v);
            }
            bells.push(next[0].clone());
            row = next;
        }
        bells
    })
}

/// Bell number `B_n`.
pub fn bell(n: usize) -> Integer {
    let table = bell_table();
    if n < table.len() {
        return table[n].clone();
    }
    (0..=n).map(|i| stirling2(n, i)).sum()
}

/// r-Bell number `B_{n,r}`: partitions of `n + r` elements whose first `r`
/// elements lie in pairwise distinct blocks.
pub fn r_bell(n: usize, r: usize) -> Integer {
    // B_{n,r} = sum_k C(n,k) r^(n-k) B_k
    let r_big = BigInt::from(r);
    (0..=n)
        .map(|k| binomial(n, k) * num_traits::pow(r_big.clone(), n - k) * bell(k))
        .sum()
}

/// Restricted growth strings of length `n` in lexicographic order.
///
/// Position `i` holds the block index of element `i`; block indices appear
/// in order of first use, so blocks come out sorted by minimal element.
#[derive(Debug, Clone)]
pub struct RestrictedGrowthStrings {
    rgs: Vec<usize>,
    // prefix_max[i] = max(rgs[0..=i])
    prefix_max: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl RestrictedGrowthStrings {
    pub fn new(n: usize) -> Self {
        RestrictedGrowthStrings {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            fresh: true,
            done: false,
        }
    }
}

impl Iterator for RestrictedGrowthStrings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.rgs.clone());
        }
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return Some(self.rgs.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Every partition of players `1..=ground_size`, each exactly once, in
/// restricted-growth-string order.
pub fn enumerate_set_partitions(ground_size: usize, cap: usize) -> Result<impl Iterator<Item = Partition>> {
    if ground_size == 0 {
        return Err(Error::Precondition("set partitions need a nonempty ground set".into()));
    }
    Caps::check(cap, "player set", ground_size)?;
    Ok(RestrictedGrowthStrings::new(ground_size).map(|rgs| {
        let blocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut coalitions = vec![Coalition::empty(); blocks];
        for (idx, b) in rgs.iter().enumerate() {
            coalitions[*b] = coalitions[*b].with(idx + 1);
        }
        Partition::from_sorted_blocks(coalitions)
    }))
}

/// Dense rectangular matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n_rows = rows.len();
        Ok(RationalMatrix {
            rows: n_rows,
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|t| self.get(i, t) * other.get(t, j)).sum()
        }))
    }

    fn require_square(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn determinant(&self) -> Result<Rational> {
        determinant(self)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Exact solution of `a x = b` by Gauss-Jordan elimination.
pub fn solve_linear(a: &RationalMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    a.require_square()?;
    let n = a.rows;
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n}x{n} system with right-hand side of length {}",
            b.len()
        )));
    }
    // augmented rows
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut().skip(col) {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}

pub fn determinant(a: &RationalMatrix) -> Result<Rational> {
    a.require_square()?;
    let n = a.rows;
    let mut m: Vec<Vec<Rational>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Ok(Rational::zero());
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &m[col][col];
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    Ok(det)
}

/// Converts an exact rational known to be integral.
pub fn to_integer(x: &Rational) -> Option<Integer> {
    x.is_integer().then(|| x.to_integer())
}

pub(crate) fn rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

#[cfg(test)]
pub(crate) fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub(crate) fn sign(negative: bool) -> Rational {
    if negative {
        -Rational::one()
    } else {
        Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partitions of `0..n` as block-label vectors, by recursive insertion.
    fn brute_partitions(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in brute_partitions(n - 1) {
            let blocks = p.iter().copied().max().map_or(0, |m| m + 1);
            for b in 0..=blocks {
                let mut q = p.clone();
                q.push(b);
                out.push(q);
            }
        }
        out
    }

    fn brute_r_bell(n: usize, r: usize) -> usize {
        brute_partitions(n + r)
            .into_iter()
            .filter(|p| {
                let firsts = &p[..r];
                (0..r).all(|a| (a + 1..r).all(|b| firsts[a] != firsts[b]))
            })
            .count()
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(6), BigInt::from(720));
        assert_eq!(factorial(12), BigInt::from(479_001_600u64));
        assert_eq!(factorial(70), (1..=70u32).map(BigInt::from).product::<BigInt>());
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(2, 2), BigInt::from(1));
        assert_eq!(stirling2(4, 2), BigInt::from(7));
        assert_eq!(stirling2(3, 2), BigInt::from(3));
        assert_eq!(stirling2(2, 3), BigInt::from(0));
        assert_eq!(stirling2(0, 0), BigInt::from(1));
        assert_eq!(stirling2(3, 0), BigInt::from(0));
        // by enumeration
        for r in 0..=7 {
            for i in 0..=r {
                let count = brute_partitions(r)
                    .iter()
                    .filter(|p| p.iter().copied().max().map_or(0, |m| m + 1) == i)
                    .count();
                assert_eq!(stirling2(r, i), BigInt::from(count), "{{{r},{i}}}");
            }
        }
    }

    #[test]
    fn bell_values() {
        assert_eq!(bell(0), BigInt::from(1));
        assert_eq!(bell(4), BigInt::from(15));
        assert_eq!(bell(6), BigInt::from(203));
        assert_eq!(bell(12), BigInt::from(4_213_597));
        for n in 0..=8 {
            assert_eq!(bell(n), BigInt::from(brute_partitions(n).len()));
        }
        assert_eq!(bell(70), (0..=70).map(|i| stirling2(70, i)).sum::<BigInt>());
    }

    #[test]
    fn r_bell_values() {
        assert_eq!(r_bell(2, 3), BigInt::from(17));
        assert_eq!(r_bell(2, 2), BigInt::from(10));
        assert_eq!(r_bell(1, 2), BigInt::from(3));
        for n in 0..=4 {
            for r in 0..=4 {
                assert_eq!(r_bell(n, r), BigInt::from(brute_r_bell(n, r)), "B_{{{n},{r}}}");
            }
        }
        for n in 0..=10 {
            assert_eq!(r_bell(n, 0), bell(n));
            assert_eq!(r_bell(n, 1), bell(n + 1));
        }
    }

    #[test]
    fn rgs_enumeration_counts() {
        assert_eq!(enumerate_set_partitions(1, 12).unwrap().count(), 1);
        assert_eq!(enumerate_set_partitions(3, 12).unwrap().count(), 5);
        assert_eq!(enumerate_set_partitions(6, 12).unwrap().count(), 203);
        assert_eq!(RestrictedGrowthStrings::new(0).count(), 1);
    }

    #[test]
    fn rgs_order_is_lexicographic_and_unique() {
        let all: Vec<_> = RestrictedGrowthStrings::new(5).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let mut brute = brute_partitions(5);
        brute.sort();
        assert_eq!(all, brute);
    }

    #[test]
    fn partition_cap_refuses() {
        let err = enumerate_set_partitions(13, 12).err().unwrap();
        assert!(matches!(err, Error::CapExceeded { size: 13, cap: 12, .. }));
        assert!(enumerate_set_partitions(0, 12).is_err());
    }

    #[test]
    fn solve_small_systems() {
        let id = RationalMatrix::identity(3);
        let b = vec![rat(4), ratio(1, 3), rat(-2)];
        assert_eq!(solve_linear(&id, &b).unwrap(), b);

        let a = RationalMatrix::from_ints(&[&[2, 3], &[5, 10]]).unwrap();
        assert_eq!(solve_linear(&a, &[rat(2), rat(5)]).unwrap(), vec![rat(1), rat(0)]);
    }

    #[test]
    fn singular_and_shape_errors_differ() {
        let s = RationalMatrix::from_ints(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(solve_linear(&s, &[rat(1), rat(2)]), Err(Error::Singular));
        let a = RationalMatrix::identity(2);
        assert!(matches!(solve_linear(&a, &[rat(1)]), Err(Error::DimensionMismatch(_))));
        let r = RationalMatrix::zeros(2, 3);
        assert!(matches!(determinant(&r), Err(Error::NotSquare { rows: 2, cols: 3 })));
        assert!(matches!(
            solve_linear(&r, &[rat(1), rat(1)]),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn determinant_values() {
        let a = RationalMatrix::from_ints(&[&[1, 1], &[1, 2]]).unwrap();
        assert_eq!(determinant(&a).unwrap(), rat(1));
        let b = RationalMatrix::from_ints(&[&[2, 3], &[5, 10]]).unwrap();
        assert_eq!(determinant(&b).unwrap(), rat(5));
        let c = RationalMatrix::from_rows(vec![vec![ratio(-7, 3)]]).unwrap();
        assert_eq!(determinant(&c).unwrap(), ratio(-7, 3));
        // row swap needed
        let d = RationalMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(determinant(&d).unwrap(), rat(-1));
    }

    #[test]
    fn binomial_and_falling() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 5), BigInt::from(0));
        assert_eq!(falling_factorial(4, 3), BigInt::from(24));
        assert_eq!(falling_factorial(4, 0), BigInt::from(1));
        assert_eq!(falling_factorial(2, 3), BigInt::from(0));
    }

    #[test]
    fn caps_uniform() {
        let c = Caps::uniform(7);
        assert_eq!((c.players, c.nodes, c.subgraph), (7, 7, 7));
        assert_eq!(Caps::default().players, 12);
    }
}
