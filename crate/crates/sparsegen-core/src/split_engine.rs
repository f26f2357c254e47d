//! Column splitting for G₂^{⊗n}: the naive run-based split, the recursive
//! decoder-respecting split (DRS), split markers for the augmented scheme,
//! and exact rate-loss (γ) accounting.
//!
//! Columns of G₂^{⊗n} are indexed by sign sequences s₁…sₙ written as the bits
//! of the column index, MSB first, with − = 0 and + = 1. Column `c` has
//! support {r : r has a 1 wherever c has a 1} and weight 2^{#minus}.

use crate::combin::{binomial_row, pow2};
use crate::error::{bail, Result};
use crate::kernel_lab::BinaryMatrix;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Largest n accepted by matrix-materializing operations.
pub const MAX_MATRIX_N: usize = 20;
/// Bound on total nonzeros of a materialized split matrix.
pub const MAX_MATRIX_NNZ: u64 = 1 << 27;

/// A 0/1 column stored by its support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseColumn {
    length: usize,
    support: Vec<usize>,
}

impl SparseColumn {
    pub fn new(length: usize, support: Vec<usize>) -> Result<Self> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            bail!(Argument, "support indices must be strictly increasing");
        }
        if support.last().is_some_and(|&r| r >= length) {
            bail!(Dimension, "support index beyond column length {length}");
        }
        Ok(Self { length, support })
    }

    pub fn from_dense(bits: &[u8]) -> Self {
        let support = bits.iter().enumerate().filter(|(_, &b)| b & 1 == 1).map(|(i, _)| i).collect();
        Self { length: bits.len(), support }
    }

    pub fn to_dense(&self) -> Vec<u8> {
        let mut v = vec![0u8; self.length];
        for &r in &self.support {
            v[r] = 1;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Column `c` of G₂^{⊗n}.
    pub fn polar_column(n: usize, c: usize) -> Self {
        let len = 1usize << n;
        let mask = c & (len - 1);
        let support = (0..len).filter(|r| r & mask == mask).collect();
        Self { length: len, support }
    }
}

/// A split generator matrix with a record of where each column came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseGenerator {
    pub n_rows: usize,
    pub columns: Vec<SparseColumn>,
    /// `provenance[k]` is the unsplit column that column `k` was cut from.
    pub provenance: Vec<usize>,
}

impl SparseGenerator {
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn max_weight(&self) -> usize {
        self.columns.iter().map(SparseColumn::weight).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.n_rows, self.columns.len());
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col.support() {
                m.set(r, c, 1);
            }
        }
        m
    }

    /// Text form: `n_rows n_cols`, then `weight r₁ r₂ …` per column.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_rows, self.columns.len());
        for col in &self.columns {
            out.push_str(&col.weight().to_string());
            for r in col.support() {
                out.push(' ');
                out.push_str(&r.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Provenance is not stored in the file and comes
    /// back as the identity.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| crate::Error::Parse("empty generator file".into()))?;
        let dims = parse_uints(head)?;
        if dims.len() != 2 {
            bail!(Parse, "header must be `n_rows n_cols`");
        }
        let (rows, cols) = (dims[0], dims[1]);
        let mut columns = Vec::with_capacity(cols);
        for (k, line) in lines.enumerate() {
            let v = parse_uints(line)?;
            if v.is_empty() || v[0] != v.len() - 1 {
                bail!(Parse, "column {k}: weight does not match the number of row indices");
            }
            columns.push(SparseColumn::new(rows, v[1..].to_vec()).map_err(|e| crate::Error::Parse(e.to_string()))?);
        }
        if columns.len() != cols {
            bail!(Parse, "header announces {cols} columns, found {}", columns.len());
        }
        Ok(Self { n_rows: rows, provenance: (0..cols).collect(), columns })
    }
}

fn parse_uints(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|e| crate::Error::Parse(format!("`{t}`: {e}"))))
        .collect()
}

/// ⌊log₂ w⌋ for w ≥ 1.
pub fn n_lub_of(w_ub: &BigUint) -> Result<usize> {
    if w_ub.is_zero() {
        bail!(Argument, "weight bound must be at least 1");
    }
    Ok(w_ub.bits() as usize - 1)
}

/// Naive split: consecutive runs of `w_ub` support entries in row order.
pub fn simple_split_column(v: &SparseColumn, w_ub: usize) -> Result<Vec<SparseColumn>> {
    if w_ub == 0 {
        bail!(Argument, "weight bound must be at least 1");
    }
    if v.weight() <= w_ub {
        return Ok(vec![v.clone()]);
    }
    Ok(v.support
        .chunks(w_ub)
        .map(|c| SparseColumn { length: v.length, support: c.to_vec() })
        .collect())
}

/// Recursive halving split. Pieces come out head before tail, so they are
/// ordered by their lowest row index.
pub fn drs_split(v: &SparseColumn, w_ub: usize) -> Result<Vec<SparseColumn>> {
    if w_ub == 0 {
        bail!(Argument, "weight bound must be at least 1");
    }
    if !v.length.is_power_of_two() {
        bail!(Argument, "column length {} is not a power of two", v.length);
    }
    let mut out = Vec::new();
    drs_rec(&v.support, 0, v.length, w_ub, &mut |piece| {
        out.push(SparseColumn { length: v.length, support: piece.to_vec() })
    });
    Ok(out)
}

/// `support` holds the entries of `v` inside [lo, lo + len).
fn drs_rec(support: &[usize], lo: usize, len: usize, w_ub: usize, emit: &mut impl FnMut(&[usize])) {
    if support.is_empty() {
        return;
    }
    if support.len() <= w_ub {
        emit(support);
        return;
    }
    let half = len / 2;
    let cut = support.partition_point(|&r| r < lo + half);
    drs_rec(&support[..cut], lo, half, w_ub, emit);
    drs_rec(&support[cut..], lo + half, half, w_ub, emit);
}

fn guard_matrix(n: usize) -> Result<()> {
    if n > MAX_MATRIX_N {
        bail!(Capability, "n = {n} exceeds the matrix limit of {MAX_MATRIX_N}");
    }
    let nnz = 3u64.pow(n as u32);
    if nnz > MAX_MATRIX_NNZ {
        bail!(Capability, "G2^(x{n}) has {nnz} nonzeros, above the materialization limit of {MAX_MATRIX_NNZ}");
    }
    Ok(())
}

fn split_matrix(n: usize, split: impl Fn(&SparseColumn) -> Result<Vec<SparseColumn>>) -> Result<SparseGenerator> {
    guard_matrix(n)?;
    let len = 1usize << n;
    let mut columns = Vec::new();
    let mut provenance = Vec::new();
    for c in 0..len {
        for piece in split(&SparseColumn::polar_column(n, c))? {
            columns.push(piece);
            provenance.push(c);
        }
    }
    Ok(SparseGenerator { n_rows: len, columns, provenance })
}

/// DRS applied to every column of G₂^{⊗n}; pieces of a column are contiguous.
pub fn drs_matrix(n: usize, w_ub: usize) -> Result<SparseGenerator> {
    split_matrix(n, |c| drs_split(c, w_ub))
}

/// Naive split applied to every column of G₂^{⊗n}.
pub fn simple_split_matrix(n: usize, w_ub: usize) -> Result<SparseGenerator> {
    split_matrix(n, |c| simple_split_column(c, w_ub))
}

/// Number of DRS pieces of a column built from `n_minus` ⊗[1,1] and
/// `n_plus` ⊗[0,1] steps, for w_ub = 2^{n_lub}. Independent of the order.
pub fn drs_piece_count(n_minus: usize, _n_plus: usize, n_lub: usize) -> BigUint {
    pow2(n_minus.saturating_sub(n_lub))
}

/// Exact rate-loss record for the naive split of G₂^{⊗n}.
#[derive(Clone, Debug, PartialEq)]
pub struct RateLossLedger {
    pub n: usize,
    pub w_ub: BigUint,
    pub n_lub: usize,
    pub gamma: BigRational,
    /// (k, number of columns with weight in (k·w_ub, (k+1)·w_ub]), k ≥ 1.
    pub band_counts: Vec<(BigUint, BigUint)>,
    pub a_terms: Vec<BigRational>,
    pub k_max: BigUint,
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// γ from the exact weight census: each weight-w column adds ⌈w/w_ub⌉ − 1.
pub fn simple_split_gamma_census(n: usize, w_ub: &BigUint) -> Result<RateLossLedger> {
    let n_lub = n_lub_of(w_ub)?;
    let binom = binomial_row(n);
    let mut bands: Vec<(BigUint, BigUint)> = Vec::new();
    let mut extra = BigUint::zero();
    for (m, count) in binom.iter().enumerate() {
        let w = pow2(m);
        let k = (&w - 1u32) / w_ub;
        if k.is_zero() {
            continue;
        }
        extra += &k * count;
        match bands.iter_mut().find(|(kk, _)| *kk == k) {
            Some((_, c)) => *c += count,
            None => bands.push((k, count.clone())),
        }
    }
    bands.sort();
    Ok(RateLossLedger {
        n,
        w_ub: w_ub.clone(),
        n_lub,
        gamma: ratio(extra, pow2(n)),
        band_counts: bands,
        a_terms: a_term_decomposition(n, n_lub),
        k_max: pow2(n) / w_ub,
    })
}

/// Pr(X ≥ t) · 2^n for X ~ Binomial(n, ½), as an integer count.
fn tail_count(binom: &[BigUint], t: usize) -> BigUint {
    binom.iter().skip(t).fold(BigUint::zero(), |a, b| a + b)
}

/// γ = Σ_{k=1}^{k_max} Pr(X > log₂(k·w_ub)), X ~ Binomial(n, ½).
///
/// k is grouped by t = ⌊log₂(k·w_ub)⌋, on which the summand Pr(X ≥ t+1) is
/// constant.
pub fn simple_split_gamma_tail(n: usize, w_ub: &BigUint) -> Result<BigRational> {
    n_lub_of(w_ub)?;
    let binom = binomial_row(n);
    let k_max = pow2(n) / w_ub;
    let mut total = BigUint::zero();
    if k_max.is_zero() {
        return Ok(BigRational::zero());
    }
    let t_lo = w_ub.bits() as usize - 1;
    let t_hi = (&k_max * w_ub).bits() as usize - 1;
    for t in t_lo..=t_hi {
        // k·w_ub ∈ [2^t, 2^{t+1})
        let k_first = Integer::div_ceil(&pow2(t), w_ub).max(BigUint::one());
        let k_last = ((pow2(t + 1) - 1u32) / w_ub).min(k_max.clone());
        if k_last < k_first {
            continue;
        }
        let count = k_last - k_first + 1u32;
        total += count * tail_count(&binom, t + 1);
    }
    Ok(ratio(total, pow2(n)))
}

/// aᵢ = 2^i · Pr(X ≥ n_lub + i + 1) for i = 0 … n − n_lub − 1.
pub fn a_term_decomposition(n: usize, n_lub: usize) -> Vec<BigRational> {
    let binom = binomial_row(n);
    (0..n.saturating_sub(n_lub))
        .map(|i| ratio(pow2(i) * tail_count(&binom, n_lub + i + 1), pow2(n)))
        .collect()
}

/// Σ_{i>n_lub} C(n,i)(2^{i−n_lub} − 1) / 2^n: the DRS rate loss on G₂^{⊗n}.
pub fn drs_gamma_closed(n: usize, n_lub: usize) -> BigRational {
    let binom = binomial_row(n);
    let extra = (n_lub + 1..=n).fold(BigUint::zero(), |a, i| a + &binom[i] * (pow2(i - n_lub) - 1u32));
    ratio(extra, pow2(n))
}

/// DRS rate loss by running the split on every column (n ≤ 20).
pub fn drs_gamma_bruteforce(n: usize, w_ub: usize) -> Result<BigRational> {
    if n > MAX_MATRIX_N {
        bail!(Capability, "n = {n} exceeds the enumeration limit of {MAX_MATRIX_N}");
    }
    let len = 1usize << n;
    let mut extra = 0u64;
    for c in 0..len {
        let col = SparseColumn::polar_column(n, c);
        let mut pieces = 0u64;
        drs_rec(&col.support, 0, len, w_ub.max(1), &mut |_| pieces += 1);
        extra += pieces - 1;
    }
    Ok(ratio(BigUint::from(extra), pow2(n)))
}

/// Sign of one Kronecker step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_bit(b: usize) -> Self {
        if b & 1 == 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

/// Sign sequence s₁…sₙ of index `i`, MSB first.
pub fn signs_of(n: usize, i: usize) -> Vec<Sign> {
    (1..=n).map(|j| Sign::from_bit(i >> (n - j))).collect()
}

/// XORs replaced by the augmented scheme: (s, j) is marked iff s_j = − and
/// s_j … s_n holds more than n_lub minus signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitMarkerSet {
    pub n: usize,
    pub n_lub: usize,
}

pub fn split_markers(n: usize, n_lub: usize) -> SplitMarkerSet {
    SplitMarkerSet { n, n_lub }
}

impl SplitMarkerSet {
    /// Marker test on a sign sequence, `j` counted from 1.
    pub fn is_marked_signs(&self, s: &[Sign], j: usize) -> bool {
        s[j - 1] == Sign::Minus && s[j - 1..].iter().filter(|&&x| x == Sign::Minus).count() > self.n_lub
    }

    /// Marker test on the XOR at stage `j` whose upper operand is node `i`.
    #[inline]
    pub fn is_marked(&self, i: usize, j: usize) -> bool {
        let shift = self.n - j;
        if (i >> shift) & 1 == 1 {
            return false;
        }
        let low = i & ((1usize << (shift + 1)) - 1);
        (shift + 1 - low.count_ones() as usize) > self.n_lub
    }

    /// Stages marked for sign sequence `s`.
    pub fn marked_levels(&self, s: &[Sign]) -> Vec<usize> {
        (1..=self.n).filter(|&j| self.is_marked_signs(s, j)).collect()
    }

    /// Σ over all sign sequences of the number of marked levels.
    pub fn marker_count(&self) -> BigUint {
        let binom = binomial_row(self.n);
        (self.n_lub + 1..=self.n).fold(BigUint::zero(), |a, i| a + &binom[i] * BigUint::from(i - self.n_lub))
    }
}

/// Extra channel uses of the augmented scheme: Σ over marked (s, j) of 2^j,
/// in closed form Σ_j 2^{2j−1} Σ_{k ≥ n_lub} C(n−j, k).
pub fn adrs_extra_uses(n: usize, n_lub: usize) -> BigUint {
    let mut total = BigUint::zero();
    for j in 1..=n {
        let binom = binomial_row(n - j);
        let tail = tail_count(&binom, n_lub);
        total += pow2(2 * j - 1) * tail;
    }
    total
}

/// The same count by walking every (s, j) pair (n ≤ 20).
pub fn adrs_extra_uses_enumerated(n: usize, n_lub: usize) -> Result<BigUint> {
    if n > MAX_MATRIX_N {
        bail!(Capability, "n = {n} exceeds the enumeration limit of {MAX_MATRIX_N}");
    }
    let m = split_markers(n, n_lub);
    let mut total = 0u128;
    for i in 0..1usize << n {
        for j in 1..=n {
            if m.is_marked(i, j) {
                total += 1u128 << j;
            }
        }
    }
    Ok(BigUint::from(total))
}

/// Lossy float view of an exact ratio, for presentation.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// n_lub = ⌈nλ⌉ with a small guard against representation error.
pub fn n_lub_from_lambda(n: usize, lambda: f64) -> usize {
    ((n as f64 * lambda - 1e-9).ceil().max(0.0) as usize).min(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(bits: &[u8]) -> SparseColumn {
        SparseColumn::from_dense(bits)
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn assert_reassembles(v: &SparseColumn, pieces: &[SparseColumn], w_ub: usize) {
        let mut sum = vec![0u32; v.len()];
        for p in pieces {
            assert!(p.weight() <= w_ub);
            assert!(p.weight() > 0 || v.weight() == 0);
            for &r in p.support() {
                sum[r] += 1;
            }
        }
        let dense: Vec<u32> = v.to_dense().iter().map(|&b| b as u32).collect();
        assert_eq!(sum, dense);
    }

    #[test]
    fn simple_split_examples() {
        let p = simple_split_column(&col(&[1, 1, 0, 0]), 1).unwrap();
        assert_eq!(p, vec![col(&[1, 0, 0, 0]), col(&[0, 1, 0, 0])]);
        let four = col(&[1, 1, 1, 1]);
        assert_eq!(simple_split_column(&four, 2).unwrap().len(), 2);
        assert_eq!(simple_split_column(&col(&[1, 0, 1, 1, 1, 0, 1, 1]), 2).unwrap().len(), 3);
        let zero = col(&[0, 0, 0, 0]);
        assert_eq!(simple_split_column(&zero, 2).unwrap(), vec![zero]);
    }

    #[test]
    fn drs_split_examples() {
        let p = drs_split(&col(&[0, 0, 0, 0, 1, 1, 1, 1]), 2).unwrap();
        assert_eq!(p, vec![col(&[0, 0, 0, 0, 1, 1, 0, 0]), col(&[0, 0, 0, 0, 0, 0, 1, 1])]);
        assert_eq!(drs_split(&col(&[1, 0, 1, 1, 1, 0, 1, 1]), 2).unwrap().len(), 4);
        let light = col(&[0, 1, 0, 1]);
        assert_eq!(drs_split(&light, 2).unwrap(), vec![light]);
        assert!(drs_split(&col(&[1, 1, 1]), 1).is_err());
        assert!(drs_split(&col(&[1, 1]), 0).is_err());
    }

    #[test]
    fn drs_matrix_examples() {
        let m = drs_matrix(1, 1).unwrap();
        let expect = BinaryMatrix::from_rows(&[[1u8, 0, 0], [0, 1, 1]]).unwrap();
        assert_eq!(m.to_dense(), expect);
        // weights 8, 4, 4, 4 split into 4, 2, 2, 2 pieces for w_ub = 2
        assert_eq!(drs_matrix(3, 2).unwrap().n_cols(), 14);
        assert_eq!(drs_matrix(3, 4).unwrap().n_cols(), 9);
        let full = drs_matrix(4, 16).unwrap();
        assert_eq!(full.to_dense(), BinaryMatrix::from_rows(&[[1u8, 0], [1, 1]]).unwrap().kron_power(4));
        assert!(matches!(drs_matrix(21, 2), Err(crate::Error::Capability(_))));
    }

    #[test]
    fn generator_text_round_trip() {
        let m = drs_matrix(3, 2).unwrap();
        let back = SparseGenerator::parse(&m.to_text()).unwrap();
        assert_eq!(back.columns, m.columns);
        assert!(SparseGenerator::parse("2 1\n2 0\n").is_err());
        assert!(SparseGenerator::parse("2 2\n1 0\n").is_err());
    }

    #[test]
    fn census_examples() {
        let l = simple_split_gamma_census(2, &big(2)).unwrap();
        assert_eq!(l.gamma, q(1, 4));
        assert_eq!(simple_split_gamma_census(5, &big(32)).unwrap().gamma, q(0, 1));
        // the weight-16 column adds 3, each of the four weight-8 columns adds 1
        let l = simple_split_gamma_census(4, &big(4)).unwrap();
        assert_eq!(l.gamma, q(7, 16));
        assert_eq!(l.k_max, big(4));
        assert_eq!(l.band_counts, vec![(big(1), big(4)), (big(3), big(1))]);
    }

    #[test]
    fn tail_examples() {
        assert_eq!(simple_split_gamma_tail(2, &big(2)).unwrap(), q(1, 4));
        assert_eq!(simple_split_gamma_tail(4, &big(4)).unwrap(), q(7, 16));
        let w = pow2(10);
        assert_eq!(
            simple_split_gamma_tail(20, &w).unwrap(),
            simple_split_gamma_census(20, &w).unwrap().gamma
        );
    }

    #[test]
    fn census_equals_tail_for_all_small_cases() {
        for n in 0..=24 {
            for e in 0..=n {
                let w = pow2(e);
                let census = simple_split_gamma_census(n, &w).unwrap();
                assert_eq!(census.gamma, simple_split_gamma_tail(n, &w).unwrap(), "n={n} w=2^{e}");
                let a_sum = census.a_terms.iter().fold(BigRational::zero(), |a, b| a + b);
                assert_eq!(a_sum, census.gamma, "a-terms n={n} w=2^{e}");
            }
        }
        for n in 1..=12 {
            for w in 1..=(1u64 << n) + 3 {
                let w = big(w);
                assert_eq!(
                    simple_split_gamma_census(n, &w).unwrap().gamma,
                    simple_split_gamma_tail(n, &w).unwrap(),
                    "n={n} w={w}"
                );
            }
        }
    }

    #[test]
    fn a_term_examples() {
        assert_eq!(a_term_decomposition(4, 2), vec![q(5, 16), q(2, 16)]);
        assert!(a_term_decomposition(7, 7).is_empty());
        let a = a_term_decomposition(30, 15);
        let sum = a.iter().fold(BigRational::zero(), |x, y| x + y);
        assert_eq!(sum, simple_split_gamma_tail(30, &pow2(15)).unwrap());
    }

    #[test]
    fn drs_closed_form_examples() {
        assert_eq!(drs_gamma_closed(4, 2), q(7, 16));
        assert_eq!(drs_gamma_closed(3, 2), q(1, 8));
        assert_eq!(drs_gamma_closed(9, 9), q(0, 1));
    }

    #[test]
    fn drs_closed_form_matches_bruteforce() {
        for n in 0..=12 {
            for e in 0..=n {
                assert_eq!(drs_gamma_closed(n, e), drs_gamma_bruteforce(n, 1 << e).unwrap(), "n={n} e={e}");
            }
        }
    }

    #[test]
    fn non_power_bound_uses_floor_log() {
        for n in 2..=9 {
            for w in 1..(1usize << n) {
                let e = n_lub_of(&BigUint::from(w)).unwrap();
                assert_eq!(drs_gamma_bruteforce(n, w).unwrap(), drs_gamma_closed(n, e));
            }
        }
    }

    #[test]
    fn drs_pieces_have_exact_weight() {
        for n in 1..=8 {
            for e in 0..=n {
                let m = drs_matrix(n, 1 << e).unwrap();
                for (c, col) in m.columns.iter().enumerate() {
                    let orig = SparseColumn::polar_column(n, m.provenance[c]);
                    if orig.weight() > 1 << e {
                        assert_eq!(col.weight(), 1 << e);
                    } else {
                        assert_eq!(col, &orig);
                    }
                }
            }
        }
    }

    #[test]
    fn piece_count_examples() {
        assert_eq!(drs_piece_count(3, 0, 2), big(2));
        assert_eq!(drs_piece_count(2, 5, 3), big(1));
        assert_eq!(drs_split(&col(&[0, 0, 0, 0, 1, 1, 1, 1]), 2).unwrap().len(), 2);
    }

    #[test]
    fn marker_examples() {
        let m = split_markers(3, 2);
        let s = [Sign::Minus; 3];
        assert_eq!(m.marked_levels(&s), vec![1]);
        assert!(m.is_marked(0, 1));
        assert!(!m.is_marked(0, 2));
        let none = split_markers(4, 4);
        assert_eq!(none.marker_count(), big(0));
        for n in 0..=10 {
            for l in 0..=n {
                let m = split_markers(n, l);
                let mut brute = 0u64;
                for i in 0..1usize << n {
                    let s = signs_of(n, i);
                    for j in 1..=n {
                        assert_eq!(m.is_marked(i, j), m.is_marked_signs(&s, j));
                        brute += m.is_marked(i, j) as u64;
                    }
                }
                assert_eq!(big(brute), m.marker_count());
            }
        }
    }

    #[test]
    fn adrs_extra_examples() {
        assert_eq!(adrs_extra_uses(3, 2), big(2));
        assert_eq!(adrs_extra_uses(6, 6), big(0));
        for n in 0..=14 {
            for l in 0..=n {
                assert_eq!(adrs_extra_uses(n, l), adrs_extra_uses_enumerated(n, l).unwrap());
            }
        }
        let r = |n: usize, l: usize| ratio(adrs_extra_uses(n, l), pow2(n));
        assert!(r(20, 13) < r(20, 12));
    }

    #[test]
    fn adrs_overhead_obeys_its_exponential_bound() {
        let lambda_dagger = 1.0 / 3f64.log2();
        for n in 1..=40 {
            for l in 0..=n {
                let lambda = l as f64 / n as f64;
                if lambda <= lambda_dagger {
                    continue;
                }
                let g = ratio_to_f64(&ratio(adrs_extra_uses(n, l), pow2(n)));
                let bound = n as f64 * 2f64.powf(n as f64 * (1.0 - lambda * 3f64.log2()));
                assert!(g <= bound * (1.0 + 1e-12), "n={n} l={l}: {g} > {bound}");
            }
        }
    }

    #[test]
    fn drs_loss_trend_flips_at_threshold() {
        // ⌈nλ⌉ jitters between neighbouring n, so compare only n with nλ integral
        let g = |n: usize, lambda: f64| ratio_to_f64(&drs_gamma_closed(n, n_lub_from_lambda(n, lambda)));
        let trend = |lambda: f64, step: usize| -> Vec<f64> {
            (16..=48).filter(|n| n % step == 0).map(|n| g(n, lambda)).collect()
        };
        for (lambda, step) in [(0.7, 10), (0.75, 4), (0.8, 5)] {
            let t = trend(lambda, step);
            assert!(t.windows(2).all(|w| w[1] < w[0]), "λ={lambda}: {t:?}");
        }
        for (lambda, step) in [(0.45, 20), (0.5, 2), (0.4, 5)] {
            let t = trend(lambda, step);
            assert!(t.windows(2).all(|w| w[1] > w[0]), "λ={lambda}: {t:?}");
        }
    }

    proptest! {
        #[test]
        fn splits_reassemble(bits in proptest::collection::vec(0u8..2, 16), w in 1usize..9) {
            let v = col(&bits);
            for pieces in [simple_split_column(&v, w).unwrap(), drs_split(&v, w).unwrap()] {
                assert_reassembles(&v, &pieces, w);
                if v.weight() > 0 {
                    prop_assert!(pieces.iter().all(|p| p.weight() <= w.max(1) && p.weight() > 0));
                }
            }
        }

        #[test]
        fn piece_count_ignores_sign_order(
            signs in proptest::collection::vec(0u8..2, 1..11),
            seed in any::<u64>(),
            l in 0usize..6,
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let n = signs.len();
            let minus = signs.iter().filter(|&&b| b == 0).count();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut perm = signs.clone();
            for _ in 0..4 {
                perm.shuffle(&mut rng);
                let c = perm.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
                let pieces = drs_split(&SparseColumn::polar_column(n, c), 1 << l).unwrap().len();
                prop_assert_eq!(BigUint::from(pieces), drs_piece_count(minus, n - minus, l));
            }
        }
    }
}
