//! Log-likelihood ratio of a 2x2 table from the textbook definition.

/// `2 * sum O * ln(O / E)` with expected counts from the marginals.
/// Cells with `O = 0` contribute nothing; an empty row or column gives 0.
pub fn g2(n11: u64, n10: u64, n01: u64, n00: u64) -> f64 {
    let observed = [[n11 as f64, n10 as f64], [n01 as f64, n00 as f64]];
    let n: f64 = observed.iter().flatten().sum();
    let row = [observed[0][0] + observed[0][1], observed[1][0] + observed[1][1]];
    let col = [observed[0][0] + observed[1][0], observed[0][1] + observed[1][1]];
    if n == 0.0 || row.contains(&0.0) || col.contains(&0.0) {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let o = observed[i][j];
            if o > 0.0 {
                let e = row[i] * col[j] / n;
                sum += o * (o / e).ln();
            }
        }
    }
    2.0 * sum
}

/// [`g2`] negated when `n11` is below its expected count.
pub fn signed_g2(n11: u64, n10: u64, n01: u64, n00: u64) -> f64 {
    let n = (n11 + n10 + n01 + n00) as f64;
    let value = g2(n11, n10, n01, n00);
    if n > 0.0 && (n11 as f64) < (n11 + n10) as f64 * (n11 + n01) as f64 / n {
        -value
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(g2(1, 1, 1, 1), 0.0);
        assert!((g2(5, 0, 0, 5) - 20.0 * 2f64.ln()).abs() < 1e-12);
        assert!(signed_g2(0, 5, 5, 0) < 0.0);
    }
}
