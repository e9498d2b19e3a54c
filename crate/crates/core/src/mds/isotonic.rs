//! Weighted isotonic regression by pool-adjacent-violators.

struct Block {
    weighted_sum: f64,
    weight: f64,
    len: usize,
}

impl Block {
    fn mean(&self) -> f64 {
        self.weighted_sum / self.weight
    }
}

/// Least-squares non-decreasing fit to `values` in the given order.
///
/// Panics if the slices differ in length or a weight is not positive.
pub fn pava(values: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(values.len(), weights.len(), "values and weights must align");
    let mut blocks: Vec<Block> = Vec::with_capacity(values.len());
    for (&y, &w) in values.iter().zip(weights) {
        assert!(w > 0.0, "weights must be positive");
        let mut cur = Block { weighted_sum: w * y, weight: w, len: 1 };
        while let Some(prev) = blocks.last() {
            if prev.mean() > cur.mean() {
                let prev = blocks.pop().expect("non-empty");
                cur = Block {
                    weighted_sum: prev.weighted_sum + cur.weighted_sum,
                    weight: prev.weight + cur.weight,
                    len: prev.len + cur.len,
                };
            } else {
                break;
            }
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(values.len());
    for b in &blocks {
        let m = b.mean();
        out.extend(std::iter::repeat(m).take(b.len));
    }
    out
}

/// Monotone regression of `targets` on the ordering given by `keys`.
///
/// Entries are sorted by key ascending. Ties in the key are untied: within a
/// tied block entries are ordered by their current target, so tied
/// proximities may receive distinct fitted values. The result is returned in
/// the original positions and is non-decreasing along the sorted key order.
/// Entries with zero weight are left out of the fit and returned as 0.
pub fn monotone_regression(targets: &[f64], keys: &[f64], weights: &[f64]) -> Vec<f64> {
    assert_eq!(targets.len(), keys.len());
    assert_eq!(targets.len(), weights.len());
    let mut order: Vec<usize> = (0..targets.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(targets[a].total_cmp(&targets[b])).then(a.cmp(&b)));
    let y: Vec<f64> = order.iter().map(|&i| targets[i]).collect();
    let w: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
    let fitted = pava(&y, &w);
    let mut out = vec![0.0; targets.len()];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = fitted[pos];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_monotone() {
        let v = [0.5, 1.0, 1.0, 2.5];
        assert_eq!(pava(&v, &[1.0; 4]), v.to_vec());
    }

    #[test]
    fn hand_traces() {
        assert_eq!(pava(&[3.0, 1.0], &[1.0, 1.0]), vec![2.0, 2.0]);
        assert_eq!(pava(&[1.0, 3.0, 2.0, 4.0], &[1.0; 4]), vec![1.0, 2.5, 2.5, 4.0]);
        // cascade back through two earlier blocks
        assert_eq!(pava(&[1.0, 4.0, 5.0, 0.0], &[1.0; 4]), vec![1.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn weights_shift_the_pool() {
        let out = pava(&[3.0, 1.0], &[3.0, 1.0]);
        assert_eq!(out, vec![2.5, 2.5]);
    }

    #[test]
    fn ties_are_untied() {
        // keys tied: targets may stay distinct, ordered by target
        let out = monotone_regression(&[5.0, 1.0, 3.0], &[1.0, 1.0, 2.0], &[1.0; 3]);
        assert_eq!(out, vec![4.0, 1.0, 4.0]);
        let same = monotone_regression(&[2.0, 1.0], &[1.0, 1.0], &[1.0; 2]);
        assert_eq!(same, vec![2.0, 1.0]);
    }

    #[test]
    fn zero_weight_entries_are_skipped() {
        let out = monotone_regression(&[3.0, 9.0, 1.0], &[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]);
        assert_eq!(out, vec![2.0, 0.0, 2.0]);
    }
}
