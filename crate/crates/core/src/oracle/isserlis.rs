use crate::error::{domain, Result};

/// Largest `p + q` accepted by the pairing enumeration.
pub const MAX_PAIRING_ORDER: u32 = 6;

/// Number of perfect matchings of `2p` copies of `X1` and `2q` copies of `X2`,
/// bucketed by how many pairs join an `X1` with an `X2`. Entry `k` is the
/// coefficient of `rho^k` in `E[X1^(2p) X2^(2q)]` at unit variances.
pub fn isserlis_pairing_counts(p: u32, q: u32) -> Result<Vec<u64>> {
    if p + q > MAX_PAIRING_ORDER {
        return domain(format!(
            "pairing enumeration limited to p + q <= {MAX_PAIRING_ORDER}, got {}",
            p + q
        ));
    }
    let labels: Vec<bool> = (0..2 * p)
        .map(|_| false)
        .chain((0..2 * q).map(|_| true))
        .collect();
    let mut counts = vec![0u64; labels.len() / 2 + 1];
    let mut used = vec![false; labels.len()];
    enumerate(&labels, &mut used, 0, &mut counts);
    Ok(counts)
}

fn enumerate(labels: &[bool], used: &mut [bool], crossed: usize, counts: &mut [u64]) {
    let Some(first) = used.iter().position(|u| !u) else {
        counts[crossed] += 1;
        return;
    };
    used[first] = true;
    for partner in first + 1..labels.len() {
        if used[partner] {
            continue;
        }
        used[partner] = true;
        let cross = usize::from(labels[first] != labels[partner]);
        enumerate(labels, used, crossed + cross, counts);
        used[partner] = false;
    }
    used[first] = false;
}

/// `E[X1^(2p) X2^(2q)]` for unit-variance Gaussians with correlation `rho`,
/// summed over all Wick pairings, each weighted by `rho^(cross pairs)`.
pub fn isserlis_even_moment(p: u32, q: u32, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return domain(format!("correlation must lie in [-1, 1], got {rho}"));
    }
    let counts = isserlis_pairing_counts(p, q)?;
    Ok(counts.iter().rev().fold(0.0, |acc, &c| acc * rho + c as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(isserlis_pairing_counts(0, 0).unwrap(), vec![1]);
        assert_eq!(isserlis_pairing_counts(1, 1).unwrap(), vec![1, 0, 2]);
        assert_eq!(isserlis_pairing_counts(1, 2).unwrap(), vec![3, 0, 12, 0]);
        assert_eq!(isserlis_even_moment(0, 0, 0.3).unwrap(), 1.0);
        let r = 0.4;
        assert!((isserlis_even_moment(1, 1, r).unwrap() - (1.0 + 2.0 * r * r)).abs() < 1e-15);
        assert!((isserlis_even_moment(1, 2, r).unwrap() - (3.0 + 12.0 * r * r)).abs() < 1e-14);
    }

    #[test]
    fn total_count_is_double_factorial() {
        // (2n - 1)!! perfect matchings of 2n symbols.
        let mut expected = 1u64;
        for n in 1..=6u32 {
            expected *= u64::from(2 * n - 1);
            let total: u64 = isserlis_pairing_counts(n, 0).unwrap().iter().sum();
            assert_eq!(total, expected);
            let total: u64 = isserlis_pairing_counts(n / 2, n - n / 2).unwrap().iter().sum();
            assert_eq!(total, expected);
        }
    }

    #[test]
    fn rho_one_collapses_to_single_variable() {
        // X1 = X2: E[X^10] = 9!!
        assert_eq!(isserlis_even_moment(2, 3, 1.0).unwrap(), 945.0);
    }

    #[test]
    fn rejects_large_orders() {
        assert!(isserlis_pairing_counts(4, 3).is_err());
        assert!(isserlis_even_moment(1, 1, 1.5).is_err());
    }
}
