use num_bigint::BigUint;
use num_traits::One;

/// Row `n` of Pascal's triangle: C(n, 0..=n).
pub(crate) fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::one());
        row = next;
    }
    row
}

pub(crate) fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}
