//! Binary polarization kernels and their figures of merit.

use crate::combin::{binomial_row, pow2};
use crate::error::{bail, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Largest kernel size accepted by the exhaustive partial-distance search.
pub const MAX_EXHAUSTIVE_L: usize = 24;

/// Dense GF(2) matrix stored row-major, one byte per entry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, bits: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.as_ref().len()).unwrap_or(0);
        let mut bits = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                bail!(Dimension, "row {i} has {} entries, expected {c}", row.len());
            }
            for &b in row {
                if b > 1 {
                    bail!(Argument, "entry {b} in row {i} is not a bit");
                }
                bits.push(b);
            }
        }
        Ok(Self { rows: r, cols: c, bits })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.bits[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.bits[r * self.cols + c] = v & 1;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|c| (0..self.rows).filter(|&r| self.get(r, c) == 1).count())
            .collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).iter().filter(|&&b| b == 1).count()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                if self.get(r1, c1) == 0 {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.set(r1 * other.rows + r2, c1 * other.cols + c2, other.get(r2, c2));
                    }
                }
            }
        }
        out
    }

    /// `n`-fold Kronecker power; `n = 0` gives the 1×1 identity.
    pub fn kron_power(&self, n: usize) -> Self {
        let mut acc = Self::identity(1);
        for _ in 0..n {
            acc = acc.kron(self);
        }
        acc
    }

    /// Row vector times matrix over GF(2).
    pub fn vec_mul(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            bail!(Dimension, "vector length {} vs {} rows", v.len(), self.rows);
        }
        let mut out = vec![0u8; self.cols];
        for (r, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                for (o, &m) in out.iter_mut().zip(self.row(r)) {
                    *o ^= m;
                }
            }
        }
        Ok(out)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols.min(r)).all(|c| self.get(r, c) == 0))
    }

    /// Whether some column permutation makes the matrix upper triangular.
    /// Peels rows bottom-up: each row may add at most one unused column.
    pub fn is_column_permutable_upper_triangular(&self) -> bool {
        let mut used = vec![false; self.cols];
        for r in (0..self.rows).rev() {
            let fresh: Vec<usize> = (0..self.cols).filter(|&c| self.get(r, c) == 1 && !used[c]).collect();
            match fresh.len() {
                0 => {}
                1 => used[fresh[0]] = true,
                _ => return false,
            }
        }
        true
    }

    /// Rank over GF(2) by elimination on packed rows.
    pub fn rank(&self) -> usize {
        let words = self.cols.div_ceil(64).max(1);
        let mut packed: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| {
                let mut w = vec![0u64; words];
                for c in 0..self.cols {
                    if self.get(r, c) == 1 {
                        w[c / 64] |= 1 << (c % 64);
                    }
                }
                w
            })
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let (wi, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..packed.len()).find(|&r| packed[r][wi] & bit != 0) else {
                continue;
            };
            packed.swap(rank, p);
            let pivot = packed[rank].clone();
            for (r, row) in packed.iter_mut().enumerate() {
                if r != rank && row[wi] & bit != 0 {
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.cols {
            bail!(Dimension, "permutation length {} vs {} columns", perm.len(), self.cols);
        }
        let mut out = Self::zeros(self.rows, self.cols);
        for (new_c, &old_c) in perm.iter().enumerate() {
            for r in 0..self.rows {
                out.set(r, new_c, self.get(r, old_c));
            }
        }
        Ok(out)
    }

    fn row_mask(&self, r: usize) -> u32 {
        self.row(r).iter().enumerate().fold(0u32, |m, (c, &b)| m | ((b as u32) << c))
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = self.row(r).iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// True iff `m` is invertible over GF(2) and not upper triangular.
pub fn is_polarizing(m: &BinaryMatrix) -> Result<bool> {
    if !m.is_square() {
        bail!(Dimension, "kernel must be square, got {}x{}", m.rows(), m.cols());
    }
    Ok(m.is_invertible() && !m.is_column_permutable_upper_triangular())
}

/// Partial distances D_1..D_l: distance from row i to the span of the rows below it.
pub fn partial_distances(m: &BinaryMatrix) -> Result<Vec<u32>> {
    if !m.is_square() {
        bail!(Dimension, "kernel must be square, got {}x{}", m.rows(), m.cols());
    }
    let l = m.rows();
    if l > MAX_EXHAUSTIVE_L {
        bail!(
            Capability,
            "exhaustive partial distances support l <= {MAX_EXHAUSTIVE_L}, got {l}; use a sampling estimate instead"
        );
    }
    let masks: Vec<u32> = (0..l).map(|r| m.row_mask(r)).collect();
    let mut out = Vec::with_capacity(l);
    for i in 0..l {
        let below = &masks[i + 1..];
        // Gray-code walk over span(below).
        let mut acc = 0u32;
        let mut best = masks[i].count_ones();
        for step in 1u64..(1u64 << below.len()) {
            acc ^= below[step.trailing_zeros() as usize];
            best = best.min((masks[i] ^ acc).count_ones());
        }
        out.push(best);
    }
    Ok(out)
}

/// A polarizing kernel with its partial-distance profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    matrix: BinaryMatrix,
    partial_distances: Vec<u32>,
    rate_of_polarization: f64,
}

impl Kernel {
    pub fn new(matrix: BinaryMatrix) -> Result<Self> {
        if !is_polarizing(&matrix)? {
            bail!(Argument, "matrix is singular or upper triangular, so it does not polarize");
        }
        let partial_distances = partial_distances(&matrix)?;
        Ok(Self::with_distances(matrix, partial_distances))
    }

    /// Trusts `partial_distances`; used by families with known profiles.
    fn with_distances(matrix: BinaryMatrix, partial_distances: Vec<u32>) -> Self {
        let l = matrix.rows() as f64;
        let e = partial_distances.iter().map(|&d| (d as f64).ln() / l.ln()).sum::<f64>() / l;
        Self { matrix, partial_distances, rate_of_polarization: e }
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        Self::new(BinaryMatrix::from_rows(rows)?)
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    pub fn partial_distances(&self) -> &[u32] {
        &self.partial_distances
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.matrix.col_weights()
    }

    pub fn g2() -> Self {
        Self::from_rows(&[[1, 0], [1, 1]]).expect("G2 polarizes")
    }

    pub fn g3_star() -> Self {
        Self::from_rows(&[[0, 1, 0], [1, 1, 0], [1, 0, 1]]).expect("G3* polarizes")
    }

    pub fn g4_star() -> Self {
        Self::from_rows(&[[1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1], [1, 1, 1, 1]])
            .expect("G4* polarizes")
    }

    pub fn g3_prime() -> Self {
        Self::from_rows(&[[1, 0, 0], [1, 1, 0], [1, 0, 1]]).expect("G3' polarizes")
    }

    pub fn g4_prime() -> Self {
        Self::from_rows(&[[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1]])
            .expect("G4' polarizes")
    }

    /// Kernel text: first line `l`, then `l` lines of `l` space-separated bits.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|s| !s.is_empty() && !s.starts_with('#'));
        let l: usize = lines
            .next()
            .ok_or_else(|| crate::Error::Parse("empty kernel file".into()))?
            .parse()
            .map_err(|e| crate::Error::Parse(format!("kernel size: {e}")))?;
        let mut rows = Vec::with_capacity(l);
        for i in 0..l {
            let line = lines
                .next()
                .ok_or_else(|| crate::Error::Parse(format!("missing kernel row {i}")))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<u8>().map_err(|e| crate::Error::Parse(format!("row {i}: {e}"))))
                .collect::<Result<Vec<u8>>>()?;
            if row.len() != l {
                bail!(Parse, "row {i} has {} entries, expected {l}", row.len());
            }
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.size());
        for r in 0..self.size() {
            let row: Vec<String> = self.matrix.row(r).iter().map(|b| b.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// E(G) = (1/l) Σ log_l D_i.
pub fn rate_of_polarization(k: &Kernel) -> f64 {
    k.rate_of_polarization
}

/// Kernel [[I, 0], [I, I]] of even size `l`; every column weight is at most 2.
pub fn block_identity_kernel(l: usize) -> Result<Kernel> {
    if l < 2 || l % 2 == 1 {
        bail!(Argument, "block kernel needs an even size >= 2, got {l}");
    }
    let h = l / 2;
    let mut m = BinaryMatrix::zeros(l, l);
    for i in 0..h {
        m.set(i, i, 1);
        m.set(h + i, i, 1);
        m.set(h + i, h + i, 1);
    }
    let mut d = vec![1u32; h];
    d.resize(l, 2);
    Ok(Kernel::with_distances(m, d))
}

/// Kernel with an all-ones first column, first row (1, 0, …, 0) and an identity block.
pub fn identity_lower_kernel(l: usize) -> Result<Kernel> {
    if l < 2 {
        bail!(Argument, "kernel size must be at least 2, got {l}");
    }
    let mut m = BinaryMatrix::identity(l);
    for r in 0..l {
        m.set(r, 0, 1);
    }
    let mut d = vec![2u32; l];
    d[0] = 1;
    Ok(Kernel::with_distances(m, d))
}

/// Multiset of column weights of the `n`-th Kronecker power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightCensus {
    pub n: usize,
    pub l: usize,
    pub entries: BTreeMap<BigUint, BigUint>,
}

impl WeightCensus {
    pub fn total(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn max_weight(&self) -> BigUint {
        self.entries.keys().next_back().cloned().unwrap_or_default()
    }

    pub fn multiplicity(&self, w: u64) -> BigUint {
        self.entries.get(&BigUint::from(w)).cloned().unwrap_or_default()
    }

    /// Mean of log_base(w) over all columns, i.e. log of the geometric mean.
    pub fn mean_log(&self, base: f64) -> f64 {
        let total = BigRational::from_integer(self.total().into());
        let mut acc = 0.0;
        for (w, m) in &self.entries {
            let frac = (BigRational::from_integer(m.clone().into()) / &total).to_f64().unwrap_or(0.0);
            acc += frac * biguint_ln(w) / base.ln();
        }
        acc
    }

    /// Exact mean of log2(w) when every weight is a power of two.
    pub fn mean_log2_exact(&self) -> Option<BigRational> {
        let total = BigRational::from_integer(self.total().into());
        let mut acc = BigRational::zero();
        for (w, m) in &self.entries {
            if w.is_zero() || (w & (w - 1u32)) != BigUint::zero() {
                return None;
            }
            let e = w.bits() - 1;
            acc += BigRational::from_integer((m * BigUint::from(e)).into());
        }
        Some(acc / total)
    }
}

fn biguint_ln(w: &BigUint) -> f64 {
    let bits = w.bits();
    if bits <= 1000 {
        w.to_f64().map(f64::ln).unwrap_or(f64::INFINITY)
    } else {
        let shift = bits - 64;
        (w >> shift).to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Column-weight census of `k^{⊗n}` by multiplicative convolution of the base weights.
pub fn kron_power_census(k: &Kernel, n: usize) -> Result<WeightCensus> {
    if n == 0 {
        bail!(Argument, "Kronecker power must be at least 1");
    }
    let mut base: BTreeMap<BigUint, BigUint> = BTreeMap::new();
    for w in k.column_weights() {
        *base.entry(BigUint::from(w)).or_default() += 1u32;
    }
    let mut acc = base.clone();
    for _ in 1..n {
        let mut next: BTreeMap<BigUint, BigUint> = BTreeMap::new();
        for (w1, m1) in &acc {
            for (w2, m2) in &base {
                *next.entry(w1 * w2).or_default() += m1 * m2;
            }
        }
        acc = next;
    }
    Ok(WeightCensus { n, l: k.size(), entries: acc })
}

/// Polarization and sparsity figures of a kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsityReport {
    pub e_of_g: f64,
    /// Geometric mean of the base column weights.
    pub w_gm: f64,
    pub w_max: usize,
    /// Lower bound on λ_GM (the δ → 0 limit).
    pub lambda_gm_limit: f64,
    /// Upper bound on λ_GM, the limit scaled by 1/(1−δ).
    pub lambda_gm_upper: f64,
    pub lambda_max_limit: f64,
    pub lambda_max_upper: f64,
    pub delta: f64,
    pub delta_prime: f64,
}

pub fn sparsity_orders(k: &Kernel, delta: f64) -> Result<SparsityReport> {
    if !(0.0..1.0).contains(&delta) {
        bail!(Argument, "delta must lie in [0, 1), got {delta}");
    }
    let l = k.size() as f64;
    let logl = |x: f64| x.ln() / l.ln();
    let weights = k.column_weights();
    let sum_log_w: f64 = weights.iter().map(|&w| logl(w as f64)).sum();
    let sum_log_d: f64 = k.partial_distances().iter().map(|&d| logl(d as f64)).sum();
    let w_max = weights.iter().copied().max().unwrap_or(0);
    let gm = (sum_log_w / l * l.ln()).exp();
    let scale = 1.0 / (1.0 - delta);
    let lambda_gm = sum_log_w / sum_log_d;
    let lambda_max = l * logl(w_max as f64) / sum_log_d;
    Ok(SparsityReport {
        e_of_g: rate_of_polarization(k),
        w_gm: gm,
        w_max,
        lambda_gm_limit: lambda_gm,
        lambda_gm_upper: lambda_gm * scale,
        lambda_max_limit: lambda_max,
        lambda_max_upper: lambda_max * scale,
        delta,
        delta_prime: delta / (1.0 - delta),
    })
}

/// Fraction of columns of G₂^{⊗n} whose weight exceeds `threshold`, exactly.
pub fn heavy_column_fraction(n: usize, threshold: &BigUint) -> BigRational {
    let row = binomial_row(n);
    let mut count = BigUint::zero();
    for (k, c) in row.iter().enumerate() {
        if pow2(k) > *threshold {
            count += c;
        }
    }
    BigRational::new(count.into(), pow2(n).into())
}

/// Total mass check used by tests and the CLI: Σ multiplicities = l^n.
pub fn census_mass_ok(c: &WeightCensus) -> bool {
    c.total() == BigUint::from(c.l).pow(c.n as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn brute_census(k: &Kernel, n: usize) -> BTreeMap<BigUint, BigUint> {
        let big = k.matrix().kron_power(n);
        let mut out: BTreeMap<BigUint, BigUint> = BTreeMap::new();
        for w in big.col_weights() {
            *out.entry(BigUint::from(w)).or_default() += 1u32;
        }
        out
    }

    #[test]
    fn polarizing_examples() {
        assert!(is_polarizing(&Kernel::g2().matrix().clone()).unwrap());
        assert!(!is_polarizing(&BinaryMatrix::identity(2)).unwrap());
        let ones = BinaryMatrix::from_rows(&[[1, 1], [1, 1]]).unwrap();
        assert!(!is_polarizing(&ones).unwrap());
        let rect = BinaryMatrix::zeros(2, 3);
        assert!(matches!(is_polarizing(&rect), Err(crate::Error::Dimension(_))));
    }

    #[test]
    fn partial_distance_examples() {
        assert_eq!(Kernel::g2().partial_distances(), &[1, 2]);
        assert_eq!(Kernel::g3_star().partial_distances(), &[1, 2, 2]);
        assert_eq!(Kernel::g4_prime().partial_distances(), &[1, 2, 2, 2]);
        let e3 = (2.0 / 3.0) * 2f64.ln() / 3f64.ln();
        assert!((rate_of_polarization(&Kernel::g3_star()) - e3).abs() < 1e-12);
        assert!((rate_of_polarization(&Kernel::g4_prime()) - 0.375).abs() < 1e-12);
        assert!((rate_of_polarization(&Kernel::g2()) - 0.5).abs() < 1e-12);
        assert!((rate_of_polarization(&Kernel::g4_star()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn last_partial_distance_is_last_row_weight() {
        for k in [Kernel::g2(), Kernel::g3_star(), Kernel::g4_star(), Kernel::g3_prime()] {
            let l = k.size();
            assert_eq!(k.partial_distances()[l - 1] as usize, k.matrix().row_weight(l - 1));
        }
    }

    #[test]
    fn oversized_kernel_is_a_capability_error() {
        let m = BinaryMatrix::identity(25);
        assert!(matches!(partial_distances(&m), Err(crate::Error::Capability(_))));
    }

    #[test]
    fn family_profiles_match_exhaustive_distances() {
        for l in 2..=16 {
            let k = identity_lower_kernel(l).unwrap();
            assert_eq!(k.partial_distances(), &partial_distances(k.matrix()).unwrap()[..]);
            if l % 2 == 0 {
                let k = block_identity_kernel(l).unwrap();
                assert_eq!(k.partial_distances(), &partial_distances(k.matrix()).unwrap()[..]);
            }
        }
    }

    #[test]
    fn permuted_triangular_kernels_do_not_polarize() {
        let swap = BinaryMatrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        assert!(!is_polarizing(&swap).unwrap());
        let g2 = Kernel::g2();
        let flipped = g2.matrix().permute_columns(&[1, 0]).unwrap();
        assert!(is_polarizing(&flipped).unwrap());
    }

    #[test]
    fn block_kernel_family() {
        assert_eq!(block_identity_kernel(2).unwrap().matrix(), Kernel::g2().matrix());
        let k4 = block_identity_kernel(4).unwrap();
        assert_eq!(k4.partial_distances(), &[1, 1, 2, 2]);
        assert!((rate_of_polarization(&k4) - 0.25).abs() < 1e-12);
        for l in [2, 4, 6, 8, 16] {
            let k = block_identity_kernel(l).unwrap();
            assert!(k.column_weights().iter().all(|&w| w <= 2));
            let e = 0.5 * 2f64.ln() / (l as f64).ln();
            assert!((rate_of_polarization(&k) - e).abs() < 1e-12);
        }
        // max weight of the n-th power is 2^n = N^{1/4} when l = 16
        let c = kron_power_census(&block_identity_kernel(16).unwrap(), 3).unwrap();
        assert_eq!(c.max_weight(), BigUint::from(8u32));
        assert!(matches!(block_identity_kernel(5), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn identity_lower_kernel_family() {
        let k3 = identity_lower_kernel(3).unwrap();
        assert_eq!(k3.column_weights(), vec![3, 1, 1]);
        assert_eq!(k3.partial_distances(), &[1, 2, 2]);
        for l in 2..=12 {
            let k = identity_lower_kernel(l).unwrap();
            let mut expect = vec![2u32; l];
            expect[0] = 1;
            assert_eq!(k.partial_distances(), &expect[..]);
        }
        let r = sparsity_orders(&identity_lower_kernel(16).unwrap(), 0.0).unwrap();
        assert!((r.lambda_gm_limit - 1.0 / 3.75).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for l in 4..=64 {
            let k = identity_lower_kernel(l).unwrap();
            let lam = sparsity_orders(&k, 0.0).unwrap().lambda_gm_limit;
            let closed = 1.0 / ((l as f64 - 1.0) * 2f64.ln() / (l as f64).ln());
            assert!((lam - closed).abs() < 1e-12);
            assert!(lam < prev);
            prev = lam;
        }
    }

    #[test]
    fn census_examples() {
        let c = kron_power_census(&Kernel::g2(), 1).unwrap();
        assert_eq!(c.multiplicity(1), BigUint::from(1u32));
        assert_eq!(c.multiplicity(2), BigUint::from(1u32));
        let c = kron_power_census(&identity_lower_kernel(3).unwrap(), 2).unwrap();
        let expect: BTreeMap<BigUint, BigUint> =
            [(1u32, 4u32), (3, 4), (9, 1)].iter().map(|&(w, m)| (w.into(), m.into())).collect();
        assert_eq!(c.entries, expect);
    }

    #[test]
    fn census_matches_materialized_power() {
        let kernels = [Kernel::g2(), Kernel::g3_star(), Kernel::g4_star(), Kernel::g3_prime(), Kernel::g4_prime()];
        for k in &kernels {
            let max_n = match k.size() {
                2 => 10,
                3 => 6,
                _ => 5,
            };
            for n in 1..=max_n {
                assert_eq!(kron_power_census(k, n).unwrap().entries, brute_census(k, n), "l={} n={n}", k.size());
            }
        }
    }

    #[test]
    fn census_of_g2_is_binomial_and_mass_is_exact() {
        for n in 1..=40 {
            let c = kron_power_census(&Kernel::g2(), n).unwrap();
            assert!(census_mass_ok(&c));
            let row = binomial_row(n);
            for (j, m) in row.iter().enumerate() {
                assert_eq!(c.entries.get(&pow2(j)), Some(m));
            }
            let half = BigRational::new((n as i64).into(), 2.into());
            assert_eq!(c.mean_log2_exact().unwrap(), half);
        }
        for k in [Kernel::g3_star(), Kernel::g4_star(), identity_lower_kernel(5).unwrap()] {
            for n in [1, 7, 20, 40] {
                assert!(census_mass_ok(&kron_power_census(&k, n).unwrap()));
            }
        }
    }

    #[test]
    fn sparsity_examples() {
        let r = sparsity_orders(&Kernel::g3_prime(), 0.0).unwrap();
        assert!((r.lambda_gm_limit - 0.7925).abs() < 1e-4);
        assert!((r.lambda_max_limit - 2.3774).abs() < 1e-4);
        let r = sparsity_orders(&Kernel::g4_star(), 0.0).unwrap();
        assert!((r.lambda_gm_limit - 1.1462).abs() < 1e-4);
        assert!((r.lambda_max_limit - 3f64.log2()).abs() < 1e-12);
        let r = sparsity_orders(&Kernel::g2(), 0.0).unwrap();
        assert!((r.lambda_gm_limit - 1.0).abs() < 1e-12);
        assert!((r.lambda_max_limit - 2.0).abs() < 1e-12);
        let r = sparsity_orders(&Kernel::g2(), 0.2).unwrap();
        assert!((r.lambda_gm_upper - 1.25).abs() < 1e-12);
        assert!((r.delta_prime - 0.25).abs() < 1e-12);
        assert!(sparsity_orders(&Kernel::g2(), 1.0).is_err());
    }

    #[test]
    fn heavy_fraction_examples() {
        assert_eq!(heavy_column_fraction(10, &BigUint::from(32u32)), BigRational::new(386.into(), 1024.into()));
        assert_eq!(heavy_column_fraction(7, &pow2(7)), BigRational::zero());
        assert_eq!(heavy_column_fraction(7, &BigUint::zero()), BigRational::one());
    }

    #[test]
    fn kernel_text_round_trip() {
        let k = Kernel::g4_star();
        let back = Kernel::parse(&k.to_text()).unwrap();
        assert_eq!(back, k);
        assert!(matches!(Kernel::parse("2\n1 0\n1"), Err(crate::Error::Parse(_))));
    }

    proptest! {
        #[test]
        fn column_permutation_keeps_census_and_rate(perm_seed in 0u64..10_000, which in 0usize..4) {
            let k = [Kernel::g3_star(), Kernel::g4_star(), Kernel::g3_prime(), Kernel::g4_prime()][which].clone();
            let l = k.size();
            let mut perm: Vec<usize> = (0..l).collect();
            let mut s = perm_seed;
            for i in (1..l).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let pm = k.matrix().permute_columns(&perm).unwrap();
            prop_assume!(is_polarizing(&pm).unwrap());
            let pk = Kernel::new(pm).unwrap();
            prop_assert_eq!(kron_power_census(&pk, 3).unwrap(), kron_power_census(&k, 3).unwrap());
            prop_assert!((rate_of_polarization(&pk) - rate_of_polarization(&k)).abs() < 1e-12);
        }

        #[test]
        fn polarizing_kernels_have_rate_in_unit_interval(bits in proptest::collection::vec(0u8..2, 16)) {
            let rows: Vec<Vec<u8>> = bits.chunks(4).map(|c| c.to_vec()).collect();
            let m = BinaryMatrix::from_rows(&rows).unwrap();
            if is_polarizing(&m).unwrap() {
                let k = Kernel::new(m).unwrap();
                let e = rate_of_polarization(&k);
                prop_assert!(e > 0.0 && e <= 1.0);
                prop_assert!(k.partial_distances().iter().all(|&d| d >= 1 && d as usize <= 4));
            }
        }
    }
}
