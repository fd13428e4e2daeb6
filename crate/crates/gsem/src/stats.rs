//! Statistical helpers: normal tail probabilities and midranks.

use statrs::function::erf::erfc;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Upper tail `P(Z >= z)` of the standard normal distribution.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Natural log of the upper tail, accurate far beyond where the tail
/// itself underflows to zero.
///
/// Below `z = 20` the direct formula is exact to double precision. Above,
/// `erfc` is close to underflow, so the asymptotic expansion
/// `sf(z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - 945/z^10)`
/// takes over; at the crossover its truncation error is below 1e-13
/// relative.
pub fn normal_ln_sf(z: f64) -> f64 {
    if z < 20.0 {
        normal_sf(z).ln()
    } else {
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / z2.powi(2) - 15.0 / z2.powi(3) + 105.0 / z2.powi(4)
            - 945.0 / z2.powi(5);
        -0.5 * z2 - LN_SQRT_2PI - z.ln() + series.ln()
    }
}

/// Base-10 log of the upper tail.
pub fn normal_log10_sf(z: f64) -> f64 {
    normal_ln_sf(z) / std::f64::consts::LN_10
}

/// Midranks of the pooled values plus the tie term `sum(t^3 - t)` over
/// tied groups, as used by the tie-corrected rank-sum variance.
///
/// Ranks are 1-based; every member of a tied group receives the group's
/// average rank. Values must be finite and are compared exactly.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end hold the same value; share their mean rank.
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = midrank;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    (ranks, tie_term)
}
