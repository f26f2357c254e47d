//! Threshold constants, moderate-deviation exponent curves, the random
//! coding exponent, and the min-split inequality check.
//!
//! Entropies are in bits except the random coding exponent, which is in nats.

use crate::channel_models::Bms;
use crate::error::{bail, Result};
use crate::scalar::Real;
use rayon::prelude::*;

/// Splitting thresholds ε*, λ*, λ†.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConstants {
    pub eps_star: f64,
    pub lambda_star: f64,
    pub lambda_dagger: f64,
}

/// Constants found numerically: ε* = max_α λ(0, α), λ* = max_α f(α, 0).
/// λ† = 1/log₂3 is where n(1 − λ·log₂3) changes sign.
pub fn threshold_constants() -> ThresholdConstants {
    let (_, eps_star) = concave_max(|a| lambda_xy(0.0, a).unwrap_or(f64::NEG_INFINITY), 0.0, 0.5);
    let (_, lambda_star) = concave_max(|a| f_alpha_lambda(a, 0.0), 0.0, 1.0);
    ThresholdConstants { eps_star, lambda_star, lambda_dagger: 1.0 / 3f64.log2() }
}

/// Closed forms: log₂3 − 3/2, log₂3 − 1, 1/log₂3.
pub fn threshold_closed_forms() -> ThresholdConstants {
    let l3 = 3f64.log2();
    ThresholdConstants { eps_star: l3 - 1.5, lambda_star: l3 - 1.0, lambda_dagger: 1.0 / l3 }
}

/// λ(x, y) = −D(½+x+y ‖ ½) + y = h(½+x+y) − 1 + y.
pub fn lambda_xy<T: Real>(eps_prime: T, alpha: T) -> Result<T> {
    let half = T::lit(0.5);
    if eps_prime < T::zero() || alpha < T::zero() || eps_prime + alpha > half {
        bail!(Argument, "λ(x, y) needs x, y ≥ 0 and x + y ≤ 1/2, got ({eps_prime}, {alpha})");
    }
    Ok((half + eps_prime + alpha).h2() - T::one() + alpha)
}

/// f(α, λ) = h(α) + α − λ − 1.
pub fn f_alpha_lambda<T: Real>(alpha: T, lam: T) -> T {
    alpha.h2() + alpha - lam - T::one()
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
pub fn golden_section_max<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> (T, T) {
    let g = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..400 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}

/// Maximum of a concave function on [a, b], located by bisection on the
/// sign of a central difference. Golden-section search on values alone
/// stalls near √ε in the argmax; this resolves it to ~1e-12.
pub fn concave_max<T: Real>(f: impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let h = T::lit(1e-5).min((b - a) * T::lit(1e-3));
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let x = (lo + hi) / T::lit(2.0);
        let up = f((x + h).min(b)) - f((x - h).max(a));
        if up > T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    let x = (lo + hi) / T::lit(2.0);
    (x, f(x))
}

/// Inverse binary entropy on [0, ½] by bisection.
pub fn h2_inv<T: Real>(y: T) -> Result<T> {
    if !(y >= T::zero() && y <= T::one()) {
        bail!(Argument, "h₂⁻¹ needs y in [0, 1], got {y}");
    }
    let (mut lo, mut hi) = (T::zero(), T::lit(0.5));
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid.h2() < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::lit(1e-15) {
            break;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family<T> {
    Rle { alpha: T },
    Polar { lambda: T, mu: T },
}

/// Exponents of the gap to capacity, decoding complexity and average
/// column weight, each in powers of log N′.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentProfile<T> {
    pub exp_gap: T,
    pub exp_comp: T,
    pub exp_wcol: T,
    pub family: Family<T>,
}

/// Random-linear-ensemble family: α/(1−2α), 1/(1−2α), 1/(1−2α).
pub fn rle_exponents<T: Real>(alpha: T) -> Result<ExponentProfile<T>> {
    if !(alpha > T::zero() && alpha < T::lit(0.5)) {
        bail!(Argument, "α must lie in (0, 1/2), got {alpha}");
    }
    let d = T::one() - T::lit(2.0) * alpha;
    Ok(ExponentProfile { exp_gap: alpha / d, exp_comp: T::one() / d, exp_wcol: T::one() / d, family: Family::Rle { alpha } })
}

/// Average column-weight exponent of G₂ kernels: log₂3 − 1, rounded as
/// stated for the polar family.
pub const POLAR_WCOL_CONSTANT: f64 = 0.585;

/// Polar family with scaling exponent μ.
pub fn polar_exponents<T: Real>(lam: T, mu: T) -> Result<ExponentProfile<T>> {
    if !(lam > T::zero() && lam < T::one() / (T::one() + mu)) {
        bail!(Argument, "λ must lie in (0, 1/(1+μ)), got {lam}");
    }
    let s = T::one() - lam * mu;
    let denom = s * h2_inv(T::one() - lam / s)?;
    Ok(ExponentProfile {
        exp_gap: lam / denom,
        exp_comp: T::one(),
        exp_wcol: T::lit(POLAR_WCOL_CONSTANT) / denom,
        family: Family::Polar { lambda: lam, mu },
    })
}

/// α whose RLE gap exponent equals `gap`: α/(1−2α) = gap.
pub fn alpha_for_gap<T: Real>(gap: T) -> Result<T> {
    if gap.is_nan() || gap <= T::zero() {
        bail!(Argument, "gap exponent must be positive");
    }
    Ok(gap / (T::one() + T::lit(2.0) * gap))
}

/// One row of the family comparison at equal gap exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedExponents<T> {
    pub lambda: T,
    pub alpha: T,
    pub exp_gap: T,
    pub rle: ExponentProfile<T>,
    pub polar: ExponentProfile<T>,
}

/// For each λ, the polar profile and the RLE profile with the same gap
/// exponent.
pub fn pair_families<T: Real>(lambdas: &[T], mu: T) -> Result<Vec<PairedExponents<T>>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let polar = polar_exponents(lambda, mu)?;
            let alpha = alpha_for_gap(polar.exp_gap)?;
            let rle = rle_exponents(alpha)?;
            Ok(PairedExponents { lambda, alpha, exp_gap: polar.exp_gap, rle, polar })
        })
        .collect()
}

/// E₀(ρ) with uniform input, in nats.
pub fn gallager_e0<T: Real>(w: &Bms<T>, rho: T) -> T {
    let e = T::one() / (T::one() + rho);
    let half = T::lit(0.5);
    let s = (0..w.alphabet_size()).fold(T::zero(), |acc, y| {
        acc + (half * w.w0(y).powf(e) + half * w.w1(y).powf(e)).powf(T::one() + rho)
    });
    -s.ln()
}

/// Random coding exponent E_r(R) = max_{ρ∈[0,1]} E₀(ρ) − ρR, R in nats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomCoding<T> {
    pub exponent: T,
    pub rho: T,
    /// R ≥ C: the exponent is reported as zero.
    pub above_capacity: bool,
}

pub fn random_coding_exponent<T: Real>(w: &Bms<T>, rate_nats: T) -> Result<RandomCoding<T>> {
    if rate_nats < T::zero() {
        bail!(Argument, "rate must be non-negative");
    }
    let cap = w.capacity() * T::LN_2();
    if rate_nats >= cap {
        return Ok(RandomCoding { exponent: T::zero(), rho: T::zero(), above_capacity: true });
    }
    let obj = |r: T| gallager_e0(w, r) - r * rate_nats;
    // coarse grid, then golden refinement around the best cell (E₀ is concave)
    let steps: usize = 64;
    let mut best = 0;
    for i in 1..=steps {
        if obj(T::lit(i as f64 / steps as f64)) > obj(T::lit(best as f64 / steps as f64)) {
            best = i;
        }
    }
    let lo = T::lit(best.saturating_sub(1) as f64 / steps as f64);
    let hi = T::lit((best + 1).min(steps) as f64 / steps as f64);
    let (rho, val) = golden_section_max(obj, lo, hi, T::lit(1e-10));
    Ok(RandomCoding { exponent: val.max(T::zero()), rho, above_capacity: false })
}

/// Left and right sides of the min-split inequality at one point.
pub fn min_split_sides(pa: f64, pb: f64, b: [f64; 4]) -> (f64, f64) {
    let [b00, b01, b10, b11] = b;
    let (qa, qb) = (1.0 - pa, 1.0 - pb);
    let lhs = (pa * (pb * b00 + qb * b01)).min(qa * (pb * b10 + qb * b11))
        + (pa * (pb * b01 + qb * b00)).min(qa * (pb * b11 + qb * b10))
        + (qa * (pb * b00 + qb * b01)).min(pa * (pb * b10 + qb * b11))
        + (qa * (pb * b01 + qb * b00)).min(pa * (pb * b11 + qb * b10));
    let rhs = (pa * b00 + qa * b01).min(qa * b10 + pa * b11) + (qa * b00 + pa * b01).min(pa * b10 + qa * b11);
    (lhs, rhs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub points: u64,
    pub corners: u64,
    /// Largest LHS − RHS seen (negative when the inequality is strict).
    pub max_excess: f64,
    pub violations: u64,
    pub worst: [f64; 6],
}

/// Violation threshold for the inequality check.
pub const INEQUALITY_TOL: f64 = 1e-12;

const SOBOL_BLOCK: u64 = 1 << 16;

/// Evaluates LHS ≤ RHS on `samples` scrambled Sobol points of
/// (P_a, P_b) ∈ [½,1]², B ∈ [0,1]⁴, plus the 64 corners. Points are drawn
/// in blocks of 2^16 with per-block scrambling seeds.
pub fn min_split_inequality_check(samples: u64, seed: u32) -> InequalityReport {
    let eval = |x: [f64; 6]| {
        let (l, r) = min_split_sides(x[0], x[1], [x[2], x[3], x[4], x[5]]);
        (l - r, x)
    };
    let point = |i: u64| -> [f64; 6] {
        let block = (i / SOBOL_BLOCK) as u32;
        let idx = (i % SOBOL_BLOCK) as u32;
        let s = seed.wrapping_mul(0x9E37_79B9).wrapping_add(block);
        let u: Vec<f64> = (0..6).map(|d| sobol_burley::sample(idx, d, s) as f64).collect();
        [0.5 + 0.5 * u[0], 0.5 + 0.5 * u[1], u[2], u[3], u[4], u[5]]
    };
    let corner = |c: u64| -> [f64; 6] {
        let bit = |k: u64| ((c >> k) & 1) as f64;
        [0.5 + 0.5 * bit(0), 0.5 + 0.5 * bit(1), bit(2), bit(3), bit(4), bit(5)]
    };
    let fold = |(m, v, w): (f64, u64, [f64; 6]), (e, x): (f64, [f64; 6])| {
        let v = v + (e > INEQUALITY_TOL) as u64;
        if e > m {
            (e, v, x)
        } else {
            (m, v, w)
        }
    };
    let merge = |a: (f64, u64, [f64; 6]), b: (f64, u64, [f64; 6])| {
        let v = a.1 + b.1;
        if b.0 > a.0 {
            (b.0, v, b.2)
        } else {
            (a.0, v, a.2)
        }
    };
    let init = || (f64::NEG_INFINITY, 0u64, [0.0; 6]);
    let sampled = (0..samples).into_par_iter().map(|i| eval(point(i))).fold(init, fold).reduce(init, merge);
    let corners = (0..64).map(|c| eval(corner(c))).fold(init(), fold);
    let (max_excess, violations, worst) = merge(sampled, corners);
    InequalityReport { points: samples, corners: 64, max_excess, violations, worst }
}
