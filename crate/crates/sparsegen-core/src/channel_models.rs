//! Binary erasure channels, finite-alphabet binary-input symmetric channels,
//! and the single-step polar transforms W⁻ / W⁺.

use crate::error::{bail, Result};
use crate::scalar::Real;
use std::collections::BTreeMap;

/// Default bound on transformed output alphabets.
pub const DEFAULT_ALPHABET_CAP: usize = 1 << 20;

/// Binary erasure channel with erasure probability ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bec<T> {
    erasure: T,
}

impl<T: Real> Bec<T> {
    pub fn new(erasure: T) -> Result<Self> {
        if !(erasure >= T::zero() && erasure <= T::one()) {
            bail!(Argument, "erasure probability {erasure} outside [0, 1]");
        }
        Ok(Self { erasure })
    }

    pub fn erasure(&self) -> T {
        self.erasure
    }

    pub fn bhattacharyya(&self) -> T {
        self.erasure
    }

    pub fn capacity(&self) -> T {
        T::one() - self.erasure
    }
}

/// Binary-input symmetric channel with a finite output alphabet.
///
/// Only W(·|0) is stored; W(y|1) = W(φ(y)|0) by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Bms<T> {
    probs: Vec<T>,
    pairing: Vec<usize>,
}

impl<T: Real> Bms<T> {
    pub fn new(probs: Vec<T>, pairing: Vec<usize>) -> Result<Self> {
        if probs.is_empty() || probs.len() != pairing.len() {
            bail!(Dimension, "{} probabilities vs {} pairing entries", probs.len(), pairing.len());
        }
        if probs.iter().any(|&p| p.is_nan() || p < T::zero()) {
            bail!(Argument, "probabilities must be non-negative");
        }
        let sum = probs.iter().fold(T::zero(), |a, &b| a + b);
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(probs.len() as f64 * 4.0));
        if (sum - T::one()).abs() > tol {
            bail!(Argument, "probabilities sum to {sum}, not 1");
        }
        for (y, &p) in pairing.iter().enumerate() {
            if p >= pairing.len() || pairing[p] != y {
                bail!(Argument, "pairing is not an involution at output {y}");
            }
        }
        Ok(Self { probs, pairing })
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: T) -> Result<Self> {
        Self::new(vec![T::one() - p, p], vec![1, 0])
    }

    /// BEC as a three-symbol channel: outputs (0, erased, 1).
    pub fn from_bec(eps: T) -> Result<Self> {
        Self::new(vec![T::one() - eps, eps, T::zero()], vec![2, 1, 0])
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn probs_given_zero(&self) -> &[T] {
        &self.probs
    }

    #[inline]
    pub fn w0(&self, y: usize) -> T {
        self.probs[y]
    }

    #[inline]
    pub fn w1(&self, y: usize) -> T {
        self.probs[self.pairing[y]]
    }

    #[inline]
    pub fn w(&self, y: usize, x: u8) -> T {
        if x == 0 {
            self.w0(y)
        } else {
            self.w1(y)
        }
    }

    pub fn bhattacharyya(&self) -> T {
        (0..self.probs.len()).fold(T::zero(), |a, y| a + (self.w0(y) * self.w1(y)).sqrt())
    }

    /// Mutual information (bits) under uniform input.
    pub fn capacity(&self) -> T {
        let half = T::lit(0.5);
        let mut acc = T::zero();
        for y in 0..self.probs.len() {
            let (a, b) = (self.w0(y), self.w1(y));
            let py = half * (a + b);
            for w in [a, b] {
                if w > T::zero() {
                    acc = acc + half * w * (w / py).log2();
                }
            }
        }
        acc
    }

    /// Log-likelihood ratio ln W(y|0)/W(y|1), clamped to ±`clamp`.
    pub fn llr(&self, y: usize, clamp: T) -> T {
        let (a, b) = (self.w0(y), self.w1(y));
        if a == b {
            return T::zero();
        }
        let v = if b == T::zero() {
            clamp
        } else if a == T::zero() {
            -clamp
        } else {
            (a / b).ln()
        };
        v.max(-clamp).min(clamp)
    }

    /// Two independent looks at the same input bit.
    pub fn looks(&self, other: &Self) -> Result<Self> {
        self.looks_capped(other, DEFAULT_ALPHABET_CAP)
    }

    pub fn looks_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let (ja, jb) = (self.alphabet_size(), other.alphabet_size());
        guard(ja * jb, cap)?;
        let mut probs = Vec::with_capacity(ja * jb);
        let mut pairing = Vec::with_capacity(ja * jb);
        for y1 in 0..ja {
            for y2 in 0..jb {
                probs.push(self.w0(y1) * other.w0(y2));
                pairing.push(self.pairing[y1] * jb + other.pairing[y2]);
            }
        }
        Ok(Self { probs, pairing })
    }

    /// Merges outputs with identical likelihood ratios. Lossless: Z and
    /// capacity are unchanged.
    pub fn merge_equivalent(&self) -> Self {
        const Q: i64 = 1 << 40;
        let mut keys = vec![0i64; self.probs.len()];
        let mut seen = vec![false; self.probs.len()];
        for y in 0..self.probs.len() {
            if seen[y] {
                continue;
            }
            let py = self.pairing[y];
            seen[y] = true;
            seen[py] = true;
            if py == y {
                keys[y] = Q / 2;
                continue;
            }
            let (a, b) = (self.w0(y), self.w1(y));
            let t = if a + b > T::zero() { (a / (a + b)).to_f64().unwrap_or(0.5) } else { 0.5 };
            let k = (t * Q as f64).round() as i64;
            keys[y] = k;
            keys[py] = Q - k;
        }
        let mut groups: BTreeMap<i64, T> = BTreeMap::new();
        for (y, &k) in keys.iter().enumerate() {
            let e = groups.entry(k).or_insert(T::zero());
            *e = *e + self.probs[y];
        }
        let index: BTreeMap<i64, usize> = groups.keys().enumerate().map(|(i, &k)| (k, i)).collect();
        let probs: Vec<T> = groups.values().copied().collect();
        let pairing: Vec<usize> = groups.keys().map(|&k| index[&(Q - k)]).collect();
        Self { probs, pairing }
    }

    /// Text form: alphabet size, W(·|0), then φ.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|s| !s.is_empty() && !s.starts_with('#'));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| crate::Error::Parse(format!("missing {what} line")))
        };
        let j: usize = next("alphabet size")?
            .parse()
            .map_err(|e| crate::Error::Parse(format!("alphabet size: {e}")))?;
        let probs = next("probability")?
            .split_whitespace()
            .map(|t| t.parse::<f64>().map(T::lit).map_err(|e| crate::Error::Parse(format!("probability: {e}"))))
            .collect::<Result<Vec<T>>>()?;
        let pairing = next("pairing")?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| crate::Error::Parse(format!("pairing: {e}"))))
            .collect::<Result<Vec<usize>>>()?;
        if probs.len() != j || pairing.len() != j {
            bail!(Parse, "expected {j} probabilities and {j} pairing indices");
        }
        Self::new(probs, pairing)
    }

    pub fn to_text(&self) -> String {
        let p: Vec<String> = self.probs.iter().map(|x| format!("{x}")).collect();
        let f: Vec<String> = self.pairing.iter().map(|x| x.to_string()).collect();
        format!("{}\n{}\n{}\n", self.probs.len(), p.join(" "), f.join(" "))
    }
}

fn guard(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        bail!(
            Capability,
            "transformed alphabet of {size} symbols exceeds the cap of {cap}; use BEC mode or merge equivalent outputs first"
        );
    }
    Ok(())
}

/// Either channel family.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel<T> {
    Bec(Bec<T>),
    Bms(Bms<T>),
}

impl<T: Real> Channel<T> {
    pub fn bhattacharyya(&self) -> T {
        bhattacharyya(self)
    }

    pub fn capacity(&self) -> T {
        capacity(self)
    }
}

/// Output of a single polar transform.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelPair<C> {
    pub minus: C,
    pub plus: C,
}

pub fn bhattacharyya<T: Real>(w: &Channel<T>) -> T {
    match w {
        Channel::Bec(b) => b.bhattacharyya(),
        Channel::Bms(b) => b.bhattacharyya(),
    }
}

pub fn capacity<T: Real>(w: &Channel<T>) -> T {
    match w {
        Channel::Bec(b) => b.capacity(),
        Channel::Bms(b) => b.capacity(),
    }
}

pub fn bec_transform<T: Real>(a: Bec<T>, b: Bec<T>) -> ChannelPair<Bec<T>> {
    let (e1, e2) = (a.erasure, b.erasure);
    ChannelPair {
        minus: Bec { erasure: e1 + e2 - e1 * e2 },
        plus: Bec { erasure: e1 * e2 },
    }
}

/// W⁻(y₁,y₂|x₁) = Σ_{x₂} ½ a(y₁|x₁⊕x₂) b(y₂|x₂) and
/// W⁺(y₁,y₂,x₁|x₂) = ½ a(y₁|x₁⊕x₂) b(y₂|x₂), on exact product alphabets.
pub fn bms_transform<T: Real>(a: &Bms<T>, b: &Bms<T>) -> Result<ChannelPair<Bms<T>>> {
    bms_transform_capped(a, b, DEFAULT_ALPHABET_CAP)
}

pub fn bms_transform_capped<T: Real>(a: &Bms<T>, b: &Bms<T>, cap: usize) -> Result<ChannelPair<Bms<T>>> {
    Ok(ChannelPair { minus: bms_minus(a, b, cap)?, plus: bms_plus(a, b, cap)? })
}

pub(crate) fn bms_minus<T: Real>(a: &Bms<T>, b: &Bms<T>, cap: usize) -> Result<Bms<T>> {
    let (ja, jb) = (a.alphabet_size(), b.alphabet_size());
    guard(ja * jb, cap)?;
    let half = T::lit(0.5);
    let mut probs = Vec::with_capacity(ja * jb);
    let mut pairing = Vec::with_capacity(ja * jb);
    for y1 in 0..ja {
        for y2 in 0..jb {
            probs.push(half * (a.w0(y1) * b.w0(y2) + a.w1(y1) * b.w1(y2)));
            // flipping the first component flips x1
            pairing.push(a.pairing[y1] * jb + y2);
        }
    }
    Ok(Bms { probs, pairing })
}

pub(crate) fn bms_plus<T: Real>(a: &Bms<T>, b: &Bms<T>, cap: usize) -> Result<Bms<T>> {
    let (ja, jb) = (a.alphabet_size(), b.alphabet_size());
    guard(2 * ja * jb, cap)?;
    let half = T::lit(0.5);
    let mut probs = Vec::with_capacity(2 * ja * jb);
    let mut pairing = Vec::with_capacity(2 * ja * jb);
    for y1 in 0..ja {
        for y2 in 0..jb {
            for x1 in 0..2u8 {
                probs.push(half * a.w(y1, x1) * b.w0(y2));
                // (y1, y2, x1) -> (y1, φ(y2), x1 ⊕ 1)
                pairing.push((y1 * jb + b.pairing[y2]) * 2 + (1 - x1 as usize));
            }
        }
    }
    Ok(Bms { probs, pairing })
}
