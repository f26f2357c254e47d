//! Encoder graphs for plain, DRS-split and augmented (A-DRS) polar codes,
//! frozen-set selection, encoding, and exact bit-channel evaluation.
//!
//! Node U_i^{(L)} sits on layer L (0 = source, n = channel). Stage j maps
//! layer n−j to n−j+1 and XORs node i (bit j of i clear, bits MSB first)
//! with node i + 2^{n−j}. Stage 1 is on the channel side.

use crate::channel_models::{bms_minus, Bms};
use crate::error::{bail, Result};
use crate::kernel_lab::Kernel;
use crate::sc_engine::{ScEngine, SoftOps};
use crate::scalar::Real;
use crate::split_engine::{
    adrs_extra_uses, drs_gamma_closed, simple_split_gamma_census, split_markers, SparseGenerator, SplitMarkerSet,
};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use std::fmt;
use std::ops::Range;

/// Largest recursion depth accepted for graphs.
pub const MAX_GRAPH_N: usize = 20;
/// Bound on channel slots of a materialized graph.
pub const MAX_SLOTS: usize = 1 << 26;

/// Construction mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Plain,
    SimpleSplit,
    Drs,
    Adrs,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "plain" => Mode::Plain,
            "simple" | "simple-split" => Mode::SimpleSplit,
            "drs" => Mode::Drs,
            "adrs" => Mode::Adrs,
            _ => bail!(Argument, "unknown mode `{s}` (plain, simple, drs, adrs)"),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::SimpleSplit => "simple",
            Mode::Drs => "drs",
            Mode::Adrs => "adrs",
        })
    }
}

/// A node U_index^{(layer)}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRef {
    pub layer: usize,
    pub index: usize,
}

/// One XOR of the butterfly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XorOp {
    pub stage: usize,
    pub top: usize,
    pub bottom: usize,
    pub split: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplicaKind {
    /// Carries the fresh noise bit that masks the replaced XOR.
    Noise,
    /// Carries a copy of the lower operand of the replaced XOR.
    Copy,
}

/// A plain 2^{stage−1} polar block attached to a replaced XOR. Its input at
/// `position` is the carried value; earlier inputs are zero and later ones
/// are filler noise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replica {
    pub stage: usize,
    pub top: usize,
    pub kind: ReplicaKind,
    pub position: usize,
    pub first_slot: usize,
    pub len: usize,
    /// Index of the first filler bit in the noise vector.
    pub first_filler: usize,
}

/// Immutable encoder graph.
#[derive(Clone, Debug)]
pub struct EncoderGraph {
    n: usize,
    mode: Mode,
    markers: Option<SplitMarkerSet>,
    slot_nodes: Vec<NodeRef>,
    replicas: Vec<Replica>,
    noise_nodes: usize,
    layout: Vec<Vec<u32>>,
    stage_rank: Vec<Vec<u32>>,
    stage_count: Vec<usize>,
    stage_first: Vec<usize>,
}

/// Builds the encoder graph. Without markers the result is the plain polar
/// encoder; with markers marked XORs are split (DRS) or replaced by a noise
/// mask plus replicas (A-DRS).
pub fn build_graph(n: usize, markers: Option<&SplitMarkerSet>, adrs: bool) -> Result<EncoderGraph> {
    if n > MAX_GRAPH_N {
        bail!(Capability, "n = {n} exceeds the graph limit of {MAX_GRAPH_N}");
    }
    if adrs && markers.is_none() {
        bail!(Argument, "the augmented scheme needs split markers");
    }
    if let Some(m) = markers {
        if m.n != n {
            bail!(Dimension, "markers built for n = {}, graph has n = {n}", m.n);
        }
    }
    let mode = match (markers, adrs) {
        (None, _) => Mode::Plain,
        (Some(_), false) => Mode::Drs,
        (Some(_), true) => Mode::Adrs,
    };
    let markers = markers.copied();
    let big_n = 1usize << n;
    let extra = match (mode, markers) {
        (Mode::Drs, Some(m)) => drs_gamma_closed(n, m.n_lub) * num_rational::BigRational::from_integer(BigUint::from(big_n).into()),
        (Mode::Adrs, Some(m)) => num_rational::BigRational::from_integer(adrs_extra_uses(n, m.n_lub).into()),
        _ => num_rational::BigRational::from_integer(0.into()),
    };
    let total = extra.to_integer().to_usize().unwrap_or(usize::MAX).saturating_add(big_n);
    if total > MAX_SLOTS {
        bail!(Capability, "graph would have {total} channel slots, above the limit of {MAX_SLOTS}");
    }

    let drs_lub = match (mode, markers) {
        (Mode::Drs, Some(m)) => m.n_lub,
        _ => n,
    };
    let layout = (0..=n)
        .map(|d| {
            let bits = n - d;
            let mut off = Vec::with_capacity((1 << bits) + 1);
            let mut acc = 0u32;
            off.push(0);
            for e in 0..1usize << bits {
                let zeros = bits - e.count_ones() as usize;
                acc += 1u32 << zeros.saturating_sub(drs_lub);
                off.push(acc);
            }
            off
        })
        .collect();

    let mut g = EncoderGraph {
        n,
        mode,
        markers,
        slot_nodes: Vec::new(),
        replicas: Vec::new(),
        noise_nodes: 0,
        layout,
        stage_rank: Vec::new(),
        stage_count: Vec::new(),
        stage_first: Vec::new(),
    };
    match mode {
        Mode::Drs => {
            for i in 0..big_n {
                g.push_leaves(1, i);
            }
        }
        _ => g.slot_nodes = (0..big_n).map(|i| NodeRef { layer: n, index: i }).collect(),
    }
    if mode == Mode::Adrs {
        g.build_replicas();
    }
    Ok(g)
}

impl EncoderGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn markers(&self) -> Option<&SplitMarkerSet> {
        self.markers.as_ref()
    }

    pub fn slot_count(&self) -> usize {
        self.slot_nodes.len() + self.replicas.iter().map(|r| r.len).sum::<usize>()
    }

    /// Nodes transmitted directly, in slot order (replica slots follow).
    pub fn slot_nodes(&self) -> &[NodeRef] {
        &self.slot_nodes
    }

    pub fn replicas(&self) -> &[Replica] {
        &self.replicas
    }

    /// Fresh masking bits, one per replaced XOR.
    pub fn noise_nodes(&self) -> usize {
        self.noise_nodes
    }

    /// Length of the noise vector taken by [`encode_with_noise`]: masking
    /// bits first, then replica fillers.
    pub fn noise_len(&self) -> usize {
        self.noise_nodes + self.replicas.iter().map(|r| r.len - 1 - r.position).sum::<usize>()
    }

    fn is_split(&self, top: usize, stage: usize) -> bool {
        self.mode != Mode::Plain && self.markers.is_some_and(|m| m.is_marked(top, stage))
    }

    pub fn xor_ops(&self) -> impl Iterator<Item = XorOp> + '_ {
        let n = self.n;
        (1..=n).flat_map(move |j| {
            let step = 1usize << (n - j);
            (0..1usize << n).filter(move |i| i & step == 0).map(move |i| XorOp {
                stage: j,
                top: i,
                bottom: i + step,
                split: self.is_split(i, j),
            })
        })
    }

    fn push_leaves(&mut self, j: usize, i: usize) {
        let n = self.n;
        if j > n {
            self.slot_nodes.push(NodeRef { layer: 0, index: i });
            return;
        }
        let step = 1usize << (n - j);
        if i & step != 0 {
            self.push_leaves(j + 1, i);
        } else if self.is_split(i, j) {
            self.push_leaves(j + 1, i);
            self.push_leaves(j + 1, i + step);
        } else {
            self.slot_nodes.push(NodeRef { layer: n - j + 1, index: i });
        }
    }

    fn build_replicas(&mut self) {
        let n = self.n;
        let m = self.markers.expect("replicas need markers");
        let mut slot = 1usize << n;
        let mut noise = 0usize;
        self.stage_rank = vec![Vec::new()];
        self.stage_count = vec![0];
        self.stage_first = vec![0];
        for j in 1..=n {
            let suffixes = 1usize << (n - j);
            let mut rank = vec![u32::MAX; suffixes];
            let mut q = 0u32;
            for (s, r) in rank.iter_mut().enumerate() {
                if m.is_marked(s, j) {
                    *r = q;
                    q += 1;
                }
            }
            self.stage_rank.push(rank);
            self.stage_count.push(q as usize);
            self.stage_first.push(self.replicas.len() / 2);
            let len = 1usize << (j - 1);
            for p in 0..len {
                for s in 0..suffixes {
                    if self.stage_rank[j][s] == u32::MAX {
                        continue;
                    }
                    let top = (p << (n - j + 1)) | s;
                    for kind in [ReplicaKind::Noise, ReplicaKind::Copy] {
                        self.replicas.push(Replica { stage: j, top, kind, position: p, first_slot: slot, len, first_filler: 0 });
                        slot += len;
                    }
                    noise += 1;
                }
            }
        }
        self.noise_nodes = noise;
        let mut filler = noise;
        for r in &mut self.replicas {
            r.first_filler = filler;
            filler += r.len - 1 - r.position;
        }
    }

    /// Index of the replaced XOR (stage j, top node with prefix p and
    /// suffix e) in replica order.
    #[inline]
    fn replaced_index(&self, j: usize, p: usize, e: usize) -> Option<usize> {
        if self.mode != Mode::Adrs {
            return None;
        }
        let r = self.stage_rank[j][e];
        (r != u32::MAX).then(|| self.stage_first[j] + p * self.stage_count[j] + r as usize)
    }

    /// Slot ranges of the noise and copy replicas of a replaced XOR.
    #[inline]
    pub(crate) fn replica_slots(&self, j: usize, p: usize, e: usize) -> Option<(Range<usize>, Range<usize>)> {
        let k = self.replaced_index(j, p, e)?;
        let (a, b) = (&self.replicas[2 * k], &self.replicas[2 * k + 1]);
        Some((a.first_slot..a.first_slot + a.len, b.first_slot..b.first_slot + b.len))
    }

    pub(crate) fn layout(&self, d: usize) -> &[u32] {
        &self.layout[d]
    }

    /// Observations held by a depth-d sub-problem.
    pub(crate) fn leaf_total(&self, d: usize) -> usize {
        *self.layout[d].last().expect("layout is never empty") as usize
    }
}

/// Rate description of a code. `log2_n_prime` is log₂ of the identity
/// factor; it may be huge, so it is kept in the log domain.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeSpec {
    pub kernel: Kernel,
    pub n: usize,
    pub log2_n_prime: f64,
    pub w_ub: u64,
    pub mode: Mode,
    /// `true` marks a frozen position.
    pub frozen: Vec<bool>,
}

impl CodeSpec {
    pub fn new(n: usize, w_ub: u64, mode: Mode, frozen: Vec<bool>) -> Result<Self> {
        if frozen.len() != 1 << n {
            bail!(Dimension, "frozen mask has {} entries, expected {}", frozen.len(), 1usize << n);
        }
        if w_ub == 0 {
            bail!(Argument, "weight bound must be at least 1");
        }
        Ok(Self { kernel: Kernel::g2(), n, log2_n_prime: 0.0, w_ub, mode, frozen })
    }

    pub fn k(&self) -> usize {
        self.frozen.iter().filter(|&&f| !f).count()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.frozen.len() as f64
    }

    pub fn n_lub(&self) -> usize {
        63 - self.w_ub.leading_zeros() as usize
    }

    pub fn markers(&self) -> SplitMarkerSet {
        split_markers(self.n, self.n_lub().min(self.n))
    }

    pub fn graph(&self) -> Result<EncoderGraph> {
        match self.mode {
            Mode::Plain | Mode::SimpleSplit => build_graph(self.n, None, false),
            Mode::Drs => build_graph(self.n, Some(&self.markers()), false),
            Mode::Adrs => build_graph(self.n, Some(&self.markers()), true),
        }
    }

    /// Channel uses per identity copy.
    pub fn slot_count(&self) -> Result<usize> {
        match self.mode {
            Mode::SimpleSplit => {
                let l = simple_split_gamma_census(self.n, &BigUint::from(self.w_ub))?;
                let extra = l.gamma * num_rational::BigRational::from_integer(BigUint::from(1usize << self.n).into());
                Ok(extra.to_integer().to_usize().unwrap_or(usize::MAX) + (1 << self.n))
            }
            _ => Ok(self.graph()?.slot_count()),
        }
    }
}

/// log₂ n′ = N^{(1−δ)·E} for N = lⁿ.
pub fn log2_n_prime(kernel_size: usize, n: usize, exponent: f64, delta: f64) -> f64 {
    (kernel_size as f64).powf(n as f64 * (1.0 - delta) * exponent)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Erasure,
    Bhattacharyya,
}

/// Per-source-index reliability: erasure probability or Bhattacharyya value.
#[derive(Clone, Debug, PartialEq)]
pub struct BitChannelProfile<T> {
    pub kind: ProfileKind,
    pub values: Vec<T>,
}

impl<T: Real> BitChannelProfile<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

struct ErasureDe<T> {
    out: Vec<T>,
}

impl<T: Real> SoftOps for ErasureDe<T> {
    type Soft = T;

    fn check(&mut self, a: &T, b: &T) -> Result<T> {
        Ok(*a + *b - *a * *b)
    }

    fn combine(&mut self, a: &T, b: &T, _top: u8) -> Result<T> {
        Ok(*a * *b)
    }

    fn decide(&mut self, index: usize, s: &T) -> Result<u8> {
        self.out[index] = *s;
        Ok(0)
    }
}

/// Exact BEC density evolution through any graph.
pub fn bec_density_evolution<T: Real>(g: &EncoderGraph, eps: T) -> Result<BitChannelProfile<T>> {
    if !(eps >= T::zero() && eps <= T::one()) {
        bail!(Argument, "erasure probability {eps} outside [0, 1]");
    }
    let input = vec![eps; g.slot_count()];
    let mut ops = ErasureDe { out: vec![T::zero(); 1 << g.n()] };
    ScEngine::new(g, eps).run(g, &input, &mut ops)?;
    Ok(BitChannelProfile { kind: ProfileKind::Erasure, values: ops.out })
}

struct BmsEval<T> {
    cap: usize,
    out: Vec<T>,
}

impl<T: Real> SoftOps for BmsEval<T> {
    type Soft = Bms<T>;

    fn check(&mut self, a: &Bms<T>, b: &Bms<T>) -> Result<Bms<T>> {
        Ok(bms_minus(a, b, self.cap)?.merge_equivalent())
    }

    // W⁺ with its revealed input is equivalent to two looks at the lower bit.
    fn combine(&mut self, a: &Bms<T>, b: &Bms<T>, _top: u8) -> Result<Bms<T>> {
        Ok(a.looks_capped(b, self.cap)?.merge_equivalent())
    }

    fn decide(&mut self, index: usize, s: &Bms<T>) -> Result<u8> {
        self.out[index] = s.bhattacharyya();
        Ok(0)
    }
}

/// Exact Bhattacharyya values of the source bit-channels for a finite
/// symmetric channel. Outputs with equal likelihood ratio are merged after
/// every step, which is lossless; the alphabet cap still applies.
pub fn bms_bit_channels<T: Real>(g: &EncoderGraph, w: &Bms<T>, cap: usize) -> Result<BitChannelProfile<T>> {
    let input = vec![w.clone(); g.slot_count()];
    let mut ops = BmsEval { cap, out: vec![T::zero(); 1 << g.n()] };
    ScEngine::new(g, w.clone()).run(g, &input, &mut ops)?;
    Ok(BitChannelProfile { kind: ProfileKind::Bhattacharyya, values: ops.out })
}

/// Freezes all but the `k` most reliable positions; ties go to the smaller
/// index.
pub fn select_frozen<T: Real>(profile: &BitChannelProfile<T>, k: usize) -> Result<Vec<bool>> {
    let len = profile.values.len();
    if k > len {
        bail!(Argument, "k = {k} exceeds block length {len}");
    }
    let mut idx: Vec<usize> = (0..len).collect();
    idx.sort_by(|&a, &b| {
        profile.values[a].partial_cmp(&profile.values[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let mut frozen = vec![true; len];
    for &i in &idx[..k] {
        frozen[i] = false;
    }
    Ok(frozen)
}

/// log₂(n′ · Σ_{unfrozen} Z_i); −∞ when every position is frozen.
pub fn union_bound_pe<T: Real>(profile: &BitChannelProfile<T>, frozen: &[bool], log2_n_prime: f64) -> Result<f64> {
    if frozen.len() != profile.values.len() {
        bail!(Dimension, "mask length {} vs profile length {}", frozen.len(), profile.values.len());
    }
    let logs: Vec<f64> = profile
        .values
        .iter()
        .zip(frozen)
        .filter(|(_, &f)| !f)
        .map(|(z, _)| z.to_f64().unwrap_or(f64::NAN).log2())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = logs.iter().map(|l| (l - top).exp2()).sum();
    Ok(log2_n_prime + top + sum.log2())
}

/// Spreads a K-bit message over the unfrozen positions in index order.
pub fn place_message(frozen: &[bool], message: &[u8]) -> Result<Vec<u8>> {
    let k = frozen.iter().filter(|&&f| !f).count();
    if message.len() != k {
        bail!(Dimension, "message has {} bits, code dimension is {k}", message.len());
    }
    let mut u = vec![0u8; frozen.len()];
    let mut it = message.iter();
    for (slot, &f) in u.iter_mut().zip(frozen) {
        if !f {
            *slot = *it.next().expect("counted above") & 1;
        }
    }
    Ok(u)
}

/// In-place plain polar transform x = u·G₂^{⊗m}.
pub fn polar_transform(x: &mut [u8]) {
    let len = x.len();
    let mut step = len / 2;
    while step >= 1 {
        for i in 0..len {
            if i & step == 0 {
                x[i] ^= x[i + step];
            }
        }
        step /= 2;
    }
}

/// Encodes one chunk: the message goes to the unfrozen positions and the
/// codeword is read off the graph's channel slots. A-DRS masks are zero.
pub fn encode(spec: &CodeSpec, g: &EncoderGraph, message: &[u8]) -> Result<Vec<u8>> {
    let noise = vec![0u8; g.noise_len()];
    encode_with_noise(spec, g, message, &noise)
}

/// As [`encode`], with the A-DRS noise vector given explicitly.
pub fn encode_with_noise(spec: &CodeSpec, g: &EncoderGraph, message: &[u8], noise: &[u8]) -> Result<Vec<u8>> {
    if spec.n != g.n() {
        bail!(Dimension, "code has n = {}, graph has n = {}", spec.n, g.n());
    }
    if noise.len() != g.noise_len() {
        bail!(Dimension, "noise vector has {} bits, graph needs {}", noise.len(), g.noise_len());
    }
    let u = place_message(&spec.frozen, message)?;
    Ok(encode_source(g, &u, noise))
}

/// Encodes a full source vector u (length 2^n) through the graph.
pub fn encode_source(g: &EncoderGraph, u: &[u8], noise: &[u8]) -> Vec<u8> {
    let n = g.n();
    let big_n = 1usize << n;
    match g.mode() {
        Mode::Plain | Mode::SimpleSplit => {
            let mut x = u.to_vec();
            polar_transform(&mut x);
            x
        }
        Mode::Drs => {
            let mut layers = vec![u.to_vec()];
            for layer in 1..=n {
                let mut x = layers[layer - 1].clone();
                let step = 1usize << (layer - 1);
                for i in 0..big_n {
                    if i & step == 0 {
                        x[i] ^= x[i + step];
                    }
                }
                layers.push(x);
            }
            g.slot_nodes().iter().map(|s| layers[s.layer][s.index]).collect()
        }
        Mode::Adrs => {
            let mut out = vec![0u8; g.slot_count()];
            let mut x = u.to_vec();
            for j in (1..=n).rev() {
                let step = 1usize << (n - j);
                for i in 0..big_n {
                    if i & step != 0 {
                        continue;
                    }
                    let (p, e) = (i >> (n - j + 1), i & (step - 1));
                    match g.replaced_index(j, p, e) {
                        None => x[i] ^= x[i + step],
                        Some(k) => {
                            let mask = noise[k];
                            let lower = x[i + step];
                            x[i] ^= mask;
                            write_replica(&g.replicas[2 * k], mask, noise, &mut out);
                            write_replica(&g.replicas[2 * k + 1], lower, noise, &mut out);
                        }
                    }
                }
            }
            out[..big_n].copy_from_slice(&x);
            out
        }
    }
}

fn write_replica(r: &Replica, value: u8, noise: &[u8], out: &mut [u8]) {
    let block = &mut out[r.first_slot..r.first_slot + r.len];
    block.fill(0);
    block[r.position] = value;
    let fillers = r.len - 1 - r.position;
    block[r.position + 1..].copy_from_slice(&noise[r.first_filler..r.first_filler + fillers]);
    polar_transform(block);
}

/// Codeword u·M for a split generator matrix.
pub fn encode_matrix(m: &SparseGenerator, u: &[u8]) -> Result<Vec<u8>> {
    if u.len() != m.n_rows {
        bail!(Dimension, "source has {} bits, matrix has {} rows", u.len(), m.n_rows);
    }
    Ok(m.columns.iter().map(|c| c.support().iter().fold(0u8, |a, &r| a ^ u[r])).collect())
}

/// Key-value description of a built code, as written by the CLI.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeFile {
    pub spec: CodeSpec,
    pub channel: String,
    pub slots: usize,
    pub union_bound_log2: f64,
}

pub fn mask_to_hex(mask: &[bool]) -> String {
    let nibbles = mask.len().div_ceil(4);
    (0..nibbles)
        .map(|k| {
            let v = (0..4).fold(0u32, |a, b| (a << 1) | mask.get(4 * k + b).copied().unwrap_or(false) as u32);
            char::from_digit(v, 16).expect("nibble")
        })
        .collect()
}

pub fn mask_from_hex(hex: &str, len: usize) -> Result<Vec<bool>> {
    if hex.len() != len.div_ceil(4) {
        bail!(Parse, "mask of {} hex digits cannot hold {len} bits", hex.len());
    }
    let mut mask = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let v = c.to_digit(16).ok_or_else(|| crate::Error::Parse(format!("bad hex digit `{c}`")))?;
        for b in (0..4).rev() {
            mask.push((v >> b) & 1 == 1);
        }
    }
    if mask[len..].iter().any(|&b| b) {
        bail!(Parse, "mask padding bits must be zero");
    }
    mask.truncate(len);
    Ok(mask)
}

impl CodeFile {
    pub fn to_text(&self) -> String {
        let s = &self.spec;
        format!(
            "# sparsegen code\nmode = {}\nn = {}\nw_ub = {}\nk = {}\nlog2_n_prime = {}\nchannel = {}\nslots = {}\nunion_bound_log2 = {}\nfrozen = {}\n",
            s.mode,
            s.n,
            s.w_ub,
            s.k(),
            s.log2_n_prime,
            self.channel,
            self.slots,
            self.union_bound_log2,
            mask_to_hex(&s.frozen)
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = std::collections::HashMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| crate::Error::Parse(format!("expected `key = value`, got `{line}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).ok_or_else(|| crate::Error::Parse(format!("missing key `{k}`")));
        fn num<X: std::str::FromStr>(k: &str, v: &str) -> Result<X> {
            v.parse().map_err(|_| crate::Error::Parse(format!("bad value `{v}` for `{k}`")))
        }
        let n: usize = num("n", get("n")?)?;
        if n > MAX_GRAPH_N {
            bail!(Parse, "n = {n} out of range");
        }
        let frozen = mask_from_hex(get("frozen")?, 1 << n)?;
        let mut spec = CodeSpec::new(n, num("w_ub", get("w_ub")?)?, Mode::parse(get("mode")?)?, frozen)
            .map_err(|e| crate::Error::Parse(e.to_string()))?;
        spec.log2_n_prime = num("log2_n_prime", get("log2_n_prime")?)?;
        let k: usize = num("k", get("k")?)?;
        if k != spec.k() {
            bail!(Parse, "k = {k} does not match the frozen mask ({} unfrozen)", spec.k());
        }
        Ok(Self {
            spec,
            channel: get("channel")?.clone(),
            slots: num("slots", get("slots")?)?,
            union_bound_log2: num("union_bound_log2", get("union_bound_log2")?)?,
        })
    }
}
