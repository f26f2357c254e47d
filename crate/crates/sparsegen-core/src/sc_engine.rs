//! Successive-cancellation recursion shared by density evolution, exact
//! channel evaluation and the decoders.
//!
//! A sub-problem at depth d holds one element per node of the 2^{n−d} block;
//! an element is the list of observations of that node (one for plain nodes,
//! several when split XORs sit downstream). Leaf counts per element are
//! fixed by the graph layout, so all buffers are flat.

use crate::code_builder::EncoderGraph;
use crate::error::Result;

/// Soft-value algebra driven by the recursion.
pub(crate) trait SoftOps {
    type Soft: Clone;
    /// Observation of a ⊕ b.
    fn check(&mut self, a: &Self::Soft, b: &Self::Soft) -> Result<Self::Soft>;
    /// Observation of the lower operand from `a` (of lower ⊕ `top`) and `b`
    /// (of lower). With `top = 0` this is the two-look combination.
    fn combine(&mut self, a: &Self::Soft, b: &Self::Soft, top: u8) -> Result<Self::Soft>;
    /// Final decision on source bit `index`.
    fn decide(&mut self, index: usize, s: &Self::Soft) -> Result<u8>;
}

pub(crate) struct ScEngine<S> {
    buf: Vec<Vec<S>>,
    bits: Vec<Vec<u8>>,
    pub(crate) ops: u64,
}

impl<S: Clone> ScEngine<S> {
    pub(crate) fn new(g: &EncoderGraph, fill: S) -> Self {
        let n = g.n();
        let buf = (0..=n).map(|d| vec![fill.clone(); g.leaf_total(d)]).collect();
        let bits = (0..=n).map(|d| vec![0u8; 1 << (n - d)]).collect();
        Self { buf, bits, ops: 0 }
    }

    /// Runs the recursion over channel-slot observations `input`.
    pub(crate) fn run<O: SoftOps<Soft = S>>(&mut self, g: &EncoderGraph, input: &[S], ops: &mut O) -> Result<()> {
        let main = g.leaf_total(0);
        self.buf[0].clone_from_slice(&input[..main]);
        self.rec(g, input, 0, 0, ops)
    }

    fn rec<O: SoftOps<Soft = S>>(&mut self, g: &EncoderGraph, input: &[S], d: usize, prefix: usize, ops: &mut O) -> Result<()> {
        let n = g.n();
        if d == n {
            self.bits[n][0] = ops.decide(prefix, &self.buf[n][0])?;
            return Ok(());
        }
        let half = 1usize << (n - d - 1);
        for e in 0..half {
            self.top_element(g, input, d, prefix, e, half, ops)?;
        }
        self.rec(g, input, d + 1, prefix << 1, ops)?;
        {
            let (lo, hi) = self.bits.split_at_mut(d + 1);
            lo[d][..half].copy_from_slice(&hi[0][..half]);
        }
        for e in 0..half {
            let top = self.bits[d][e];
            self.bottom_element(g, input, d, prefix, e, half, top, ops)?;
        }
        self.rec(g, input, d + 1, (prefix << 1) | 1, ops)?;
        let (lo, hi) = self.bits.split_at_mut(d + 1);
        for e in 0..half {
            let b = hi[0][e];
            lo[d][e] ^= b;
            lo[d][e + half] = b;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn top_element<O: SoftOps<Soft = S>>(
        &mut self,
        g: &EncoderGraph,
        input: &[S],
        d: usize,
        prefix: usize,
        e: usize,
        half: usize,
        ops: &mut O,
    ) -> Result<()> {
        let off = g.layout(d);
        let (t0, t1, b0) = (off[e] as usize, off[e + 1] as usize, off[e + half] as usize);
        let dst = g.layout(d + 1)[e] as usize;
        let (cur, next) = self.buf.split_at_mut(d + 1);
        let (cur, next) = (&cur[d], &mut next[0]);
        if t1 - t0 == 1 {
            next[dst] = match g.replica_slots(d + 1, prefix, e) {
                Some((noise, _)) => {
                    let r = plain_position(ops, &input[noise], prefix, &mut self.ops)?;
                    self.ops += 1;
                    ops.check(&cur[t0], &r)?
                }
                None => {
                    self.ops += 1;
                    ops.check(&cur[t0], &cur[b0])?
                }
            };
        } else {
            let c = (t1 - t0) / 2;
            next[dst..dst + c].clone_from_slice(&cur[t0..t0 + c]);
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn bottom_element<O: SoftOps<Soft = S>>(
        &mut self,
        g: &EncoderGraph,
        input: &[S],
        d: usize,
        prefix: usize,
        e: usize,
        half: usize,
        top: u8,
        ops: &mut O,
    ) -> Result<()> {
        let off = g.layout(d);
        let (t0, t1, b0) = (off[e] as usize, off[e + 1] as usize, off[e + half] as usize);
        let dst = g.layout(d + 1)[e] as usize;
        let (cur, next) = self.buf.split_at_mut(d + 1);
        let (cur, next) = (&cur[d], &mut next[0]);
        if t1 - t0 == 1 {
            next[dst] = match g.replica_slots(d + 1, prefix, e) {
                Some((_, copy)) => {
                    let r = plain_position(ops, &input[copy], prefix, &mut self.ops)?;
                    self.ops += 1;
                    ops.combine(&r, &cur[b0], 0)?
                }
                None => {
                    self.ops += 1;
                    ops.combine(&cur[t0], &cur[b0], top)?
                }
            };
        } else {
            let c = (t1 - t0) / 2;
            for k in 0..c {
                next[dst + k] = ops.combine(&cur[t0 + c + k], &cur[b0 + k], 0)?;
            }
            self.ops += c as u64;
        }
        Ok(())
    }
}

/// Observation of input `p` of a plain polar block whose earlier inputs are
/// zero and later inputs are uniform, from the block's channel outputs.
pub(crate) fn plain_position<O: SoftOps>(ops: &mut O, vals: &[O::Soft], p: usize, count: &mut u64) -> Result<O::Soft> {
    if vals.len() == 1 {
        return Ok(vals[0].clone());
    }
    let h = vals.len() / 2;
    let mut next = Vec::with_capacity(h);
    if p < h {
        for k in 0..h {
            next.push(ops.check(&vals[k], &vals[k + h])?);
        }
    } else {
        for k in 0..h {
            next.push(ops.combine(&vals[k], &vals[k + h], 0)?);
        }
    }
    *count += h as u64;
    plain_position(ops, &next, p % h, count)
}
