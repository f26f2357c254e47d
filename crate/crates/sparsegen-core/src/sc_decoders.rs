//! Successive-cancellation decoders over plain, DRS and A-DRS graphs, chunked
//! decoding across identity copies, and Monte-Carlo block-error estimation.

use crate::channel_models::Bms;
use crate::code_builder::{encode_source, place_message, CodeSpec, EncoderGraph, Mode};
use crate::error::{bail, Result};
use crate::sc_engine::{ScEngine, SoftOps};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// LLR magnitude cap.
pub const LLR_CLAMP: f64 = 40.0;

/// One received symbol of an erasure channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErasureSymbol {
    Zero,
    One,
    Erased,
}

impl ErasureSymbol {
    pub fn from_bit(b: u8) -> Self {
        if b & 1 == 0 {
            ErasureSymbol::Zero
        } else {
            ErasureSymbol::One
        }
    }

    pub fn bit(self) -> Option<u8> {
        match self {
            ErasureSymbol::Zero => Some(0),
            ErasureSymbol::One => Some(1),
            ErasureSymbol::Erased => None,
        }
    }

    /// XOR with erasure absorbing.
    pub fn xor(self, other: Self) -> Self {
        match (self.bit(), other.bit()) {
            (Some(a), Some(b)) => Self::from_bit(a ^ b),
            _ => ErasureSymbol::Erased,
        }
    }

    /// Two observations of one bit: erased only if both are erased or they
    /// disagree.
    pub fn merge(self, other: Self) -> Self {
        match (self.bit(), other.bit()) {
            (Some(a), Some(b)) if a == b => self,
            (Some(_), Some(_)) => ErasureSymbol::Erased,
            (Some(_), None) => self,
            (None, _) => other,
        }
    }
}

/// Per-bit trace entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BitDecision {
    pub index: usize,
    pub frozen: bool,
    pub value: u8,
    pub undecided: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Source estimates, length 2^n; frozen positions hold zero.
    pub estimates: Vec<u8>,
    /// Some information bit was erased or tied and resolved to zero.
    pub failed: bool,
    pub decisions_log: Option<Vec<BitDecision>>,
    /// Check and combine operations performed.
    pub ops: u64,
}

impl DecodeResult {
    /// Information bits in index order.
    pub fn message(&self, frozen: &[bool]) -> Vec<u8> {
        self.estimates.iter().zip(frozen).filter(|(_, &f)| !f).map(|(&b, _)| b).collect()
    }
}

struct Decisions<'a> {
    frozen: &'a [bool],
    out: Vec<u8>,
    failed: bool,
    log: Option<Vec<BitDecision>>,
}

impl<'a> Decisions<'a> {
    fn new(frozen: &'a [bool], trace: bool) -> Self {
        Self { frozen, out: vec![0; frozen.len()], failed: false, log: trace.then(Vec::new) }
    }

    fn record(&mut self, index: usize, value: Option<u8>) -> u8 {
        let frozen = self.frozen[index];
        let undecided = !frozen && value.is_none();
        let v = if frozen { 0 } else { value.unwrap_or(0) };
        self.failed |= undecided;
        self.out[index] = v;
        if let Some(log) = &mut self.log {
            log.push(BitDecision { index, frozen, value: v, undecided });
        }
        v
    }
}

struct ErasureOps<'a>(Decisions<'a>);

impl SoftOps for ErasureOps<'_> {
    type Soft = ErasureSymbol;

    fn check(&mut self, a: &ErasureSymbol, b: &ErasureSymbol) -> Result<ErasureSymbol> {
        Ok(a.xor(*b))
    }

    fn combine(&mut self, a: &ErasureSymbol, b: &ErasureSymbol, top: u8) -> Result<ErasureSymbol> {
        Ok(a.xor(ErasureSymbol::from_bit(top)).merge(*b))
    }

    fn decide(&mut self, index: usize, s: &ErasureSymbol) -> Result<u8> {
        Ok(self.0.record(index, s.bit()))
    }
}

/// Check-node rule 2·atanh(tanh(a/2)·tanh(b/2)) in a form stable for large inputs.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let s = a.signum() * b.signum() * a.abs().min(b.abs());
    let v = s + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    v.clamp(-LLR_CLAMP, LLR_CLAMP)
}

struct LlrOps<'a>(Decisions<'a>);

impl SoftOps for LlrOps<'_> {
    type Soft = f64;

    fn check(&mut self, a: &f64, b: &f64) -> Result<f64> {
        Ok(boxplus(*a, *b))
    }

    fn combine(&mut self, a: &f64, b: &f64, top: u8) -> Result<f64> {
        let a = if top == 0 { *a } else { -*a };
        Ok((a + *b).clamp(-LLR_CLAMP, LLR_CLAMP))
    }

    fn decide(&mut self, index: usize, s: &f64) -> Result<u8> {
        let v = if *s > 0.0 {
            Some(0)
        } else if *s < 0.0 {
            Some(1)
        } else {
            None
        };
        Ok(self.0.record(index, v))
    }
}

fn check_lengths(g: &EncoderGraph, received: usize, frozen: &[bool]) -> Result<()> {
    if received != g.slot_count() {
        bail!(Dimension, "received {received} symbols, graph has {} channel slots", g.slot_count());
    }
    if frozen.len() != 1 << g.n() {
        bail!(Dimension, "frozen mask has {} entries, expected {}", frozen.len(), 1usize << g.n());
    }
    Ok(())
}

/// Reusable erasure decoder over any graph.
pub struct ErasureDecoder<'g> {
    g: &'g EncoderGraph,
    engine: ScEngine<ErasureSymbol>,
    pub trace: bool,
}

impl<'g> ErasureDecoder<'g> {
    pub fn new(g: &'g EncoderGraph) -> Self {
        Self { g, engine: ScEngine::new(g, ErasureSymbol::Erased), trace: false }
    }

    pub fn decode(&mut self, received: &[ErasureSymbol], frozen: &[bool]) -> Result<DecodeResult> {
        check_lengths(self.g, received.len(), frozen)?;
        let mut ops = ErasureOps(Decisions::new(frozen, self.trace));
        self.engine.ops = 0;
        self.engine.run(self.g, received, &mut ops)?;
        let d = ops.0;
        Ok(DecodeResult { estimates: d.out, failed: d.failed, decisions_log: d.log, ops: self.engine.ops })
    }
}

/// Reusable LLR decoder over any graph.
pub struct LlrDecoder<'g> {
    g: &'g EncoderGraph,
    engine: ScEngine<f64>,
    pub trace: bool,
}

impl<'g> LlrDecoder<'g> {
    pub fn new(g: &'g EncoderGraph) -> Self {
        Self { g, engine: ScEngine::new(g, 0.0), trace: false }
    }

    pub fn decode(&mut self, llrs: &[f64], frozen: &[bool]) -> Result<DecodeResult> {
        check_lengths(self.g, llrs.len(), frozen)?;
        let mut ops = LlrOps(Decisions::new(frozen, self.trace));
        self.engine.ops = 0;
        self.engine.run(self.g, llrs, &mut ops)?;
        let d = ops.0;
        Ok(DecodeResult { estimates: d.out, failed: d.failed, decisions_log: d.log, ops: self.engine.ops })
    }
}

fn require_mode(g: &EncoderGraph, mode: Mode) -> Result<()> {
    if g.mode() != mode {
        bail!(Capability, "decoder expects a {mode} graph, got {}", g.mode());
    }
    Ok(())
}

/// Standard SC over erasures for a length-2^n polar code.
pub fn sc_polar_bec(received: &[ErasureSymbol], frozen: &[bool]) -> Result<DecodeResult> {
    if !received.len().is_power_of_two() {
        bail!(Dimension, "received length {} is not a power of two", received.len());
    }
    let g = crate::code_builder::build_graph(received.len().trailing_zeros() as usize, None, false)?;
    ErasureDecoder::new(&g).decode(received, frozen)
}

/// SC over erasures through a DRS graph; split XORs pass the upper operand
/// through and give the lower operand two looks.
pub fn sc_drs_bec(received: &[ErasureSymbol], frozen: &[bool], g: &EncoderGraph) -> Result<DecodeResult> {
    require_mode(g, Mode::Drs)?;
    ErasureDecoder::new(g).decode(received, frozen)
}

/// LLR SC for a plain polar code.
pub fn sc_polar_llr(llrs: &[f64], frozen: &[bool]) -> Result<DecodeResult> {
    if !llrs.len().is_power_of_two() {
        bail!(Dimension, "received length {} is not a power of two", llrs.len());
    }
    let g = crate::code_builder::build_graph(llrs.len().trailing_zeros() as usize, None, false)?;
    LlrDecoder::new(&g).decode(llrs, frozen)
}

/// LLR SC through an A-DRS graph. Replaced XORs read the masking bit and
/// the copied operand from their replica blocks.
pub fn sc_adrs(llrs: &[f64], frozen: &[bool], g: &EncoderGraph) -> Result<DecodeResult> {
    require_mode(g, Mode::Adrs)?;
    LlrDecoder::new(g).decode(llrs, frozen)
}

/// Chunk outcomes across the identity factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ChunkedResult {
    pub chunks: Vec<DecodeResult>,
    pub failed: bool,
}

/// Decodes every chunk independently (in parallel); the block fails if any
/// chunk fails.
pub fn chunked_decode<S, F>(chunks: &[Vec<S>], decode: F) -> Result<ChunkedResult>
where
    S: Sync,
    F: Fn(&[S]) -> Result<DecodeResult> + Sync,
{
    if let Some(first) = chunks.first() {
        if let Some(bad) = chunks.iter().position(|c| c.len() != first.len()) {
            bail!(Dimension, "chunk {bad} has {} symbols, chunk 0 has {}", chunks[bad].len(), first.len());
        }
    }
    let results: Vec<DecodeResult> = chunks.par_iter().map(|c| decode(c)).collect::<Result<_>>()?;
    let failed = results.iter().any(|r| r.failed);
    Ok(ChunkedResult { chunks: results, failed })
}

/// Channel used by the simulator.
#[derive(Clone, Debug, PartialEq)]
pub enum SimChannel {
    Bec(f64),
    Bms(Bms<f64>),
}

impl SimChannel {
    /// `bec:<ε>` or `bsc:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, v) = s.split_once(':').ok_or_else(|| crate::Error::Argument(format!("channel `{s}`: expected kind:value")))?;
        let x: f64 = v.parse().map_err(|_| crate::Error::Argument(format!("channel `{s}`: bad parameter")))?;
        if !(0.0..=1.0).contains(&x) {
            bail!(Argument, "channel parameter {x} outside [0, 1]");
        }
        match kind {
            "bec" => Ok(SimChannel::Bec(x)),
            "bsc" => Ok(SimChannel::Bms(Bms::bsc(x)?)),
            _ => bail!(Argument, "unknown channel kind `{kind}` (bec, bsc)"),
        }
    }
}

struct BmsSampler {
    cdf: Vec<f64>,
    pairing: Vec<usize>,
    llr: Vec<f64>,
}

impl BmsSampler {
    fn new(w: &Bms<f64>) -> Self {
        let mut acc = 0.0;
        let cdf = w.probs_given_zero().iter().map(|p| {
            acc += p;
            acc
        });
        let cdf: Vec<f64> = cdf.collect();
        let llr = (0..w.alphabet_size()).map(|y| w.llr(y, LLR_CLAMP)).collect();
        Self { cdf, pairing: w.pairing().to_vec(), llr }
    }

    fn sample(&self, x: u8, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        let y = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let y = if x == 0 { y } else { self.pairing[y] };
        self.llr[y]
    }
}

/// Monte-Carlo block-error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimResult {
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

/// 95% Wilson score interval.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054f64;
    let n = trials as f64;
    let p = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

enum Workspace<'g> {
    Erasure(ErasureDecoder<'g>, Vec<ErasureSymbol>),
    Llr(LlrDecoder<'g>, Vec<f64>),
}

/// Runs `trials` independent encode/transmit/decode rounds. Trial t draws
/// from ChaCha8 seeded with `seed` on stream t, so results do not depend on
/// the thread count. Erased or tied information bits count as failures.
pub fn simulate(spec: &CodeSpec, g: &EncoderGraph, channel: &SimChannel, trials: u64, seed: u64) -> Result<SimResult> {
    if spec.mode == Mode::SimpleSplit {
        bail!(Capability, "no successive-cancellation decoder for the naive split; use plain, drs or adrs");
    }
    if spec.n != g.n() || spec.mode != g.mode() {
        bail!(Dimension, "code and graph disagree on n or mode");
    }
    let use_erasure = matches!(channel, SimChannel::Bec(_)) && g.mode() != Mode::Adrs;
    let sampler = match channel {
        SimChannel::Bms(w) => Some(BmsSampler::new(w)),
        SimChannel::Bec(_) => None,
    };
    let slots = g.slot_count();
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map_init(
            || {
                if use_erasure {
                    Workspace::Erasure(ErasureDecoder::new(g), vec![ErasureSymbol::Erased; slots])
                } else {
                    Workspace::Llr(LlrDecoder::new(g), vec![0.0; slots])
                }
            },
            |ws, t| -> Result<u64> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let message: Vec<u8> = (0..spec.k()).map(|_| rng.gen_range(0..2u8)).collect();
                let noise: Vec<u8> = (0..g.noise_len()).map(|_| rng.gen_range(0..2u8)).collect();
                let u = place_message(&spec.frozen, &message)?;
                let x = encode_source(g, &u, &noise);
                let r = match ws {
                    Workspace::Erasure(dec, buf) => {
                        let eps = match channel {
                            SimChannel::Bec(e) => *e,
                            SimChannel::Bms(_) => unreachable!("erasure path only for BEC"),
                        };
                        for (b, &xi) in buf.iter_mut().zip(&x) {
                            *b = if rng.gen::<f64>() < eps { ErasureSymbol::Erased } else { ErasureSymbol::from_bit(xi) };
                        }
                        dec.decode(buf, &spec.frozen)?
                    }
                    Workspace::Llr(dec, buf) => {
                        for (b, &xi) in buf.iter_mut().zip(&x) {
                            *b = match (channel, &sampler) {
                                (SimChannel::Bec(e), _) => {
                                    if rng.gen::<f64>() < *e {
                                        0.0
                                    } else if xi == 0 {
                                        LLR_CLAMP
                                    } else {
                                        -LLR_CLAMP
                                    }
                                }
                                (SimChannel::Bms(_), Some(s)) => s.sample(xi, &mut rng),
                                (SimChannel::Bms(_), None) => unreachable!("sampler built for BMS"),
                            };
                        }
                        dec.decode(buf, &spec.frozen)?
                    }
                };
                Ok((r.failed || r.estimates != u) as u64)
            },
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (lo, hi) = wilson_interval(failures, trials);
    Ok(SimResult { trials, failures, rate: failures as f64 / trials.max(1) as f64, wilson_lo: lo, wilson_hi: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_builder::{bec_density_evolution, build_graph, encode, select_frozen};
    use crate::split_engine::split_markers;
    use approx::assert_abs_diff_eq;

    fn plain(n: usize) -> EncoderGraph {
        build_graph(n, None, false).unwrap()
    }

    fn drs(n: usize, l: usize) -> EncoderGraph {
        build_graph(n, Some(&split_markers(n, l)), false).unwrap()
    }

    fn adrs(n: usize, l: usize) -> EncoderGraph {
        build_graph(n, Some(&split_markers(n, l)), true).unwrap()
    }

    fn sym(x: &[u8]) -> Vec<ErasureSymbol> {
        x.iter().map(|&b| ErasureSymbol::from_bit(b)).collect()
    }

    fn code(g: &EncoderGraph, eps: f64, k: usize) -> CodeSpec {
        let p = bec_density_evolution(&plain(g.n()), eps).unwrap();
        let n_lub = g.markers().map_or(g.n(), |m| m.n_lub);
        CodeSpec::new(g.n(), 1 << n_lub, g.mode(), select_frozen(&p, k).unwrap()).unwrap()
    }

    #[test]
    fn erasure_symbol_rules() {
        use ErasureSymbol::*;
        assert_eq!(One.xor(One), Zero);
        assert_eq!(Erased.xor(Zero), Erased);
        assert_eq!(Erased.merge(One), One);
        assert_eq!(Zero.merge(One), Erased);
        assert_eq!(Erased.merge(Erased), Erased);
    }

    #[test]
    fn boxplus_matches_tanh_rule() {
        for &(a, b) in &[(0.3, -1.2), (5.0, 7.0), (-2.0, -0.1), (20.0, 0.0)] {
            let exact = 2.0 * ((a / 2.0f64).tanh() * (b / 2.0f64).tanh()).atanh();
            assert_abs_diff_eq!(boxplus(a, b), exact, epsilon = 1e-9);
        }
        assert_eq!(boxplus(LLR_CLAMP, 0.0), 0.0);
    }

    #[test]
    fn noiseless_recovery_all_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            for l in 0..n {
                for g in [plain(n), drs(n, l), adrs(n, l)] {
                    let spec = code(&g, 0.4, (1 << n) / 2);
                    for _ in 0..5 {
                        let m: Vec<u8> = (0..spec.k()).map(|_| rng.gen_range(0..2)).collect();
                        let noise: Vec<u8> = (0..g.noise_len()).map(|_| rng.gen_range(0..2)).collect();
                        let u = place_message(&spec.frozen, &m).unwrap();
                        let x = encode_source(&g, &u, &noise);
                        let llr: Vec<f64> = x.iter().map(|&b| if b == 0 { 9.0 } else { -9.0 }).collect();
                        let r = LlrDecoder::new(&g).decode(&llr, &spec.frozen).unwrap();
                        assert!(!r.failed);
                        assert_eq!(r.message(&spec.frozen), m);
                        if g.mode() != Mode::Adrs {
                            let r = ErasureDecoder::new(&g).decode(&sym(&x), &spec.frozen).unwrap();
                            assert_eq!(r.estimates, u);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn all_erased_fails() {
        let frozen = vec![true, true, true, false];
        let r = sc_polar_bec(&[ErasureSymbol::Erased; 4], &frozen).unwrap();
        assert!(r.failed);
        assert_eq!(r.estimates, vec![0; 4]);
    }

    #[test]
    fn single_split_decoding() {
        let g = drs(1, 0);
        // u0 frozen, u1 = 1: slots carry u0 ⊕ u1 split into (u0, u1) and u1
        let frozen = vec![true, false];
        let r = sc_drs_bec(&[ErasureSymbol::Zero, ErasureSymbol::Erased, ErasureSymbol::One], &frozen, &g).unwrap();
        assert_eq!(r.estimates, vec![0, 1]);
        let r = sc_drs_bec(&[ErasureSymbol::Zero, ErasureSymbol::Erased, ErasureSymbol::Erased], &frozen, &g).unwrap();
        assert!(r.failed);
        let spec = CodeSpec::new(3, 2, Mode::Drs, vec![false; 8]).unwrap();
        let g = drs(3, 1);
        let x = encode(&spec, &g, &[0; 8]).unwrap();
        assert_eq!(sc_drs_bec(&sym(&x), &spec.frozen, &g).unwrap().estimates, vec![0; 8]);
        assert!(sc_drs_bec(&sym(&x), &spec.frozen, &plain(3)).is_err());
    }

    /// Exhaustive failure probability over all erasure patterns.
    fn exact_failure(g: &EncoderGraph, frozen: &[bool], eps: f64) -> f64 {
        let slots = g.slot_count();
        let x = vec![0u8; slots];
        let mut dec = ErasureDecoder::new(g);
        let mut total = 0.0;
        for mask in 0u32..1 << slots {
            let rx: Vec<ErasureSymbol> =
                (0..slots).map(|s| if mask >> s & 1 == 1 { ErasureSymbol::Erased } else { ErasureSymbol::from_bit(x[s]) }).collect();
            let k = mask.count_ones() as i32;
            if dec.decode(&rx, frozen).unwrap().failed {
                total += eps.powi(k) * (1.0 - eps).powi(slots as i32 - k);
            }
        }
        total
    }

    #[test]
    fn exhaustive_failure_matches_density_evolution() {
        for g in [plain(2), plain(3), drs(3, 1), drs(3, 2), drs(2, 0)] {
            for eps in [0.2, 0.5, 0.7] {
                let de = bec_density_evolution(&g, eps).unwrap();
                let size = 1 << g.n();
                for i in 0..size {
                    let mut frozen = vec![true; size];
                    frozen[i] = false;
                    assert_abs_diff_eq!(exact_failure(&g, &frozen, eps), de.values[i], epsilon = 1e-12);
                }
                let frozen = select_frozen(&de, size / 2).unwrap();
                let p = exact_failure(&g, &frozen, eps);
                let sum: f64 = de.values.iter().zip(&frozen).filter(|(_, &f)| !f).map(|(z, _)| z).sum();
                let max = de.values.iter().zip(&frozen).filter(|(_, &f)| !f).map(|(z, _)| *z).fold(0.0, f64::max);
                assert!(p <= sum + 1e-12 && p >= max - 1e-12);
            }
        }
    }

    #[test]
    fn erasures_never_cause_wrong_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for g in [plain(2), plain(3), drs(3, 1)] {
            let size = 1 << g.n();
            let slots = g.slot_count();
            let frozen: Vec<bool> = (0..size).map(|i| i < size / 4).collect();
            let u: Vec<u8> = (0..size).map(|i| if frozen[i] { 0 } else { rng.gen_range(0..2) }).collect();
            let x = encode_source(&g, &u, &[]);
            let mut dec = ErasureDecoder::new(&g);
            for mask in 0u32..1 << slots {
                let rx: Vec<ErasureSymbol> =
                    (0..slots).map(|s| if mask >> s & 1 == 1 { ErasureSymbol::Erased } else { ErasureSymbol::from_bit(x[s]) }).collect();
                dec.trace = true;
                let r = dec.decode(&rx, &frozen).unwrap();
                // after the first undecided bit, feedback may be wrong
                for d in r.decisions_log.unwrap().into_iter().take_while(|d| !d.undecided) {
                    assert_eq!(d.value, u[d.index]);
                }
            }
        }
    }

    #[test]
    fn llr_and_erasure_decoders_agree_on_bec() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for g in [plain(6), drs(6, 3)] {
            let spec = code(&g, 0.4, 30);
            for _ in 0..200 {
                let m: Vec<u8> = (0..spec.k()).map(|_| rng.gen_range(0..2)).collect();
                let x = encode(&spec, &g, &m).unwrap();
                let rx: Vec<ErasureSymbol> =
                    x.iter().map(|&b| if rng.gen::<f64>() < 0.4 { ErasureSymbol::Erased } else { ErasureSymbol::from_bit(b) }).collect();
                let llr: Vec<f64> = rx.iter().map(|s| match s.bit() { None => 0.0, Some(0) => LLR_CLAMP, Some(_) => -LLR_CLAMP }).collect();
                let a = ErasureDecoder::new(&g).decode(&rx, &spec.frozen).unwrap();
                let b = LlrDecoder::new(&g).decode(&llr, &spec.frozen).unwrap();
                assert_eq!(a.failed, b.failed);
                if !a.failed {
                    assert_eq!(a.estimates, b.estimates);
                }
            }
        }
    }

    #[test]
    fn chunked_decoding() {
        let g = plain(3);
        let frozen = vec![true, true, true, false, true, false, false, false];
        let good = sym(&[0; 8]);
        let bad = vec![ErasureSymbol::Erased; 8];
        let dec = |c: &[ErasureSymbol]| sc_polar_bec(c, &frozen);
        let one = chunked_decode(std::slice::from_ref(&good), dec).unwrap();
        assert_eq!(one.chunks[0], sc_polar_bec(&good, &frozen).unwrap());
        let four = chunked_decode(&[good.clone(), good.clone(), bad, good.clone()], dec).unwrap();
        assert!(four.failed);
        assert!(chunked_decode(&[good.clone(), vec![ErasureSymbol::Zero; 4]], dec).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let chunks: Vec<Vec<ErasureSymbol>> = (0..16)
            .map(|_| (0..8).map(|_| if rng.gen::<f64>() < 0.3 { ErasureSymbol::Erased } else { ErasureSymbol::Zero }).collect())
            .collect();
        let par = chunked_decode(&chunks, dec).unwrap();
        let ser: Vec<DecodeResult> = chunks.iter().map(|c| ErasureDecoder::new(&g).decode(c, &frozen).unwrap()).collect();
        assert_eq!(par.chunks, ser);
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5);
    }

    #[test]
    fn simulation_is_thread_count_independent() {
        let g = drs(6, 3);
        let spec = code(&g, 0.4, 24);
        let ch = SimChannel::Bec(0.4);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| simulate(&spec, &g, &ch, 2000, 5).unwrap());
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| simulate(&spec, &g, &ch, 2000, 5).unwrap());
        assert_eq!(one, many);
    }

    #[test]
    fn single_split_column_does_not_hurt() {
        // only the weight-8 column of G2^(x3) splits when w_ub = 4
        let (p, d) = (plain(3), drs(3, 2));
        assert_eq!(d.slot_count(), 9);
        for eps in [0.3, 0.5] {
            let sp = code(&p, eps, 4);
            let mut sd = sp.clone();
            sd.mode = Mode::Drs;
            sd.w_ub = 4;
            let trials = 100_000;
            let a = simulate(&sp, &p, &SimChannel::Bec(eps), trials, 11).unwrap();
            let b = simulate(&sd, &d, &SimChannel::Bec(eps), trials, 11).unwrap();
            let sigma = ((a.rate * (1.0 - a.rate) + b.rate * (1.0 - b.rate)) / trials as f64).sqrt();
            assert!(b.rate <= a.rate + 3.0 * sigma, "eps={eps}: {} vs {}", b.rate, a.rate);
        }
    }

    #[test]
    fn adrs_matches_plain_on_bsc() {
        let n = 6;
        let l = 5; // λ ≈ 0.7
        let w = Bms::bsc(0.05).unwrap();
        let (p, a) = (plain(n), adrs(n, l));
        let prof = crate::code_builder::bms_bit_channels(&p, &w, 1 << 16).unwrap();
        let frozen = select_frozen(&prof, 19).unwrap();
        let sp = CodeSpec::new(n, 1 << l, Mode::Plain, frozen.clone()).unwrap();
        let sa = CodeSpec::new(n, 1 << l, Mode::Adrs, frozen).unwrap();
        let trials = 20_000;
        let x = simulate(&sp, &p, &SimChannel::Bms(w.clone()), trials, 3).unwrap();
        let y = simulate(&sa, &a, &SimChannel::Bms(w), trials, 3).unwrap();
        let sigma = ((x.rate * (1.0 - x.rate) + y.rate * (1.0 - y.rate)) / trials as f64).sqrt().max(1e-4);
        assert!((x.rate - y.rate).abs() <= 3.0 * sigma, "{} vs {}", x.rate, y.rate);
    }

    #[test]
    fn mode_guards() {
        let g = plain(2);
        assert!(sc_adrs(&[0.0; 4], &[false; 4], &g).is_err());
        assert!(sc_polar_bec(&[ErasureSymbol::Zero; 3], &[false; 3]).is_err());
        let spec = CodeSpec::new(2, 1, Mode::SimpleSplit, vec![false; 4]).unwrap();
        assert!(matches!(simulate(&spec, &g, &SimChannel::Bec(0.1), 10, 0), Err(crate::Error::Capability(_))));
        assert!(SimChannel::parse("awgn:1").is_err());
        assert_eq!(SimChannel::parse("bec:0.4").unwrap(), SimChannel::Bec(0.4));
    }
}
