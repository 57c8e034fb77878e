//! Misclassification losses minimized over relabelings.
//!
//! Estimated labels equal to 0 (unassigned) are errors under every
//! relabeling.

use crate::assignment::lexicographic_min_assignment;
use crate::error::{Error, Result};
use crate::graph::LabelVector;

/// Largest `k` accepted by [`brute_force_misclassification`].
pub const BRUTE_FORCE_MAX_K: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct LossValue {
    /// Proportion in `[0, 1]` for the unweighted loss; weighted error sum otherwise.
    pub value: f64,
    /// `permutation[u - 1]` is the estimate label matched to truth label `u`.
    pub permutation: Vec<usize>,
}

pub fn hamming(z1: &LabelVector, z2: &LabelVector) -> Result<usize> {
    check_lengths(z1, z2)?;
    Ok(z1.labels().iter().zip(z2.labels()).filter(|(a, b)| a != b).count())
}

fn check_lengths(a: &LabelVector, b: &LabelVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// `gain[u][v]` = total weight of nodes with truth `u + 1` and estimate `v + 1`.
fn agreement(zhat: &LabelVector, z: &LabelVector, weights: Option<&[f64]>) -> Vec<Vec<f64>> {
    let k = z.k().max(zhat.k()).max(1);
    let mut gain = vec![vec![0.0; k]; k];
    for (i, (&t, &e)) in z.labels().iter().zip(zhat.labels()).enumerate() {
        if t > 0 && e > 0 {
            gain[t - 1][e - 1] += weights.map_or(1.0, |w| w[i]);
        }
    }
    gain
}

fn relabeling_loss(
    zhat: &LabelVector,
    z: &LabelVector,
    weights: Option<&[f64]>,
) -> (f64, Vec<usize>) {
    let gain = agreement(zhat, z, weights);
    let cost: Vec<Vec<f64>> = gain.iter().map(|r| r.iter().map(|g| -g).collect()).collect();
    let tol = match weights {
        None => 0.0,
        Some(w) => 1e-12 * w.iter().map(|x| x.abs()).sum::<f64>().max(1.0),
    };
    let (_, assignment) = lexicographic_min_assignment(&cost, tol);
    let permutation: Vec<usize> = assignment.iter().map(|&c| c + 1).collect();
    let errors = match weights {
        None => count_errors(zhat, z, &permutation) as f64,
        Some(w) => weighted_errors(zhat, z, &permutation, w),
    };
    (errors, permutation)
}

fn count_errors(zhat: &LabelVector, z: &LabelVector, permutation: &[usize]) -> usize {
    z.labels()
        .iter()
        .zip(zhat.labels())
        .filter(|&(&t, &e)| e == 0 || t == 0 || permutation[t - 1] != e)
        .count()
}

fn weighted_errors(zhat: &LabelVector, z: &LabelVector, permutation: &[usize], w: &[f64]) -> f64 {
    z.labels()
        .iter()
        .zip(zhat.labels())
        .zip(w)
        .filter(|&((&t, &e), _)| e == 0 || t == 0 || permutation[t - 1] != e)
        .fold(0.0, |acc, (_, &wi)| acc + wi)
}

/// `(1/n) min_pi H(zhat, pi(z))`, solved as an assignment on the confusion matrix.
pub fn misclassification(zhat: &LabelVector, z: &LabelVector) -> Result<LossValue> {
    check_lengths(zhat, z)?;
    if z.is_empty() {
        return Ok(LossValue { value: 0.0, permutation: (1..=z.k().max(zhat.k())).collect() });
    }
    let (errors, permutation) = relabeling_loss(zhat, z, None);
    Ok(LossValue { value: errors / z.len() as f64, permutation })
}

/// `min_pi sum_{i : zhat(i) != pi(z(i))} theta_i`.
pub fn weighted_misclassification(
    zhat: &LabelVector,
    z: &LabelVector,
    theta: &[f64],
) -> Result<LossValue> {
    check_lengths(zhat, z)?;
    if theta.len() != z.len() {
        return Err(Error::LengthMismatch { left: theta.len(), right: z.len() });
    }
    let (value, permutation) = relabeling_loss(zhat, z, Some(theta));
    Ok(LossValue { value, permutation })
}

/// Same quantity as [`misclassification`], by enumerating all `k!` relabelings
/// in lexicographic order.
pub fn brute_force_misclassification(zhat: &LabelVector, z: &LabelVector) -> Result<LossValue> {
    check_lengths(zhat, z)?;
    let k = z.k().max(zhat.k()).max(1);
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::KTooLarge { k, max: BRUTE_FORCE_MAX_K });
    }
    let mut perm: Vec<usize> = (1..=k).collect();
    let mut best = (usize::MAX, perm.clone());
    loop {
        let e = count_errors(zhat, z, &perm);
        if e < best.0 {
            best = (e, perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let n = z.len().max(1) as f64;
    Ok(LossValue { value: best.0 as f64 / n, permutation: best.1 })
}

/// Advances to the next permutation in lexicographic order; false at the last one.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn lv(v: &[usize], k: usize) -> LabelVector {
        LabelVector::new(v.to_vec(), k).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&lv(&[1, 2, 1], 2), &lv(&[1, 2, 1], 2)).unwrap(), 0);
        assert_eq!(hamming(&lv(&[1, 1, 2, 2], 2), &lv(&[2, 2, 1, 1], 2)).unwrap(), 4);
        assert_eq!(hamming(&lv(&[1, 2, 1], 2), &lv(&[1, 2, 2], 2)).unwrap(), 1);
        assert!(matches!(
            hamming(&lv(&[1], 1), &lv(&[1, 1], 1)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn misclassification_examples() {
        let z = lv(&[1, 1, 2, 2], 2);
        assert_eq!(misclassification(&z, &z).unwrap().value, 0.0);
        let swapped = misclassification(&lv(&[2, 2, 1, 1], 2), &z).unwrap();
        assert_eq!(swapped.value, 0.0);
        assert_eq!(swapped.permutation, vec![2, 1]);
        let half = misclassification(&lv(&[1, 2, 1, 2], 2), &z).unwrap();
        assert_eq!(half.value, 0.5);
        // Both relabelings give H = 2; the identity is lexicographically first.
        assert_eq!(half.permutation, vec![1, 2]);
    }

    #[test]
    fn unassigned_always_errs() {
        let z = lv(&[1, 2, 1, 2], 2);
        assert_eq!(misclassification(&lv(&[0, 0, 0, 0], 2), &z).unwrap().value, 1.0);
        assert_eq!(brute_force_misclassification(&lv(&[0, 0, 0, 0], 2), &z).unwrap().value, 1.0);
        assert_eq!(misclassification(&lv(&[0, 2, 1, 2], 2), &z).unwrap().value, 0.25);
    }

    #[test]
    fn k_one_counts_mismatches() {
        let z = lv(&[1, 1, 1, 1], 1);
        let zh = lv(&[1, 0, 1, 0], 1);
        assert_eq!(brute_force_misclassification(&zh, &z).unwrap().value, 0.5);
        assert_eq!(misclassification(&zh, &z).unwrap().value, 0.5);
    }

    #[test]
    fn weighted_examples() {
        let z = lv(&[1, 2], 2);
        let zh = lv(&[2, 1], 2);
        assert_eq!(weighted_misclassification(&z, &z, &[3.0, 1.0]).unwrap().value, 0.0);
        let w = weighted_misclassification(&zh, &z, &[3.0, 1.0]).unwrap();
        assert_eq!(w.value, 0.0);
        assert_eq!(w.permutation, vec![2, 1]);
    }

    #[test]
    fn brute_force_rejects_large_k() {
        let z = lv(&[7], 7);
        assert_eq!(
            brute_force_misclassification(&z, &z),
            Err(Error::KTooLarge { k: 7, max: 6 })
        );
    }

    #[test]
    fn oracle_agreement_random() {
        let mut r = rng::rng_from(99);
        for _ in 0..1000 {
            let z = LabelVector::new((0..30).map(|_| r.random_range(1..=4)).collect(), 4).unwrap();
            let zh = LabelVector::new((0..30).map(|_| r.random_range(0..=4)).collect(), 4).unwrap();
            let a = misclassification(&zh, &z).unwrap();
            let b = brute_force_misclassification(&zh, &z).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn next_permutation_enumerates_all() {
        let mut p = vec![1, 2, 3, 4];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(p, vec![4, 3, 2, 1]);
    }

    fn labels(k: usize, n: usize) -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(1..=k, n)
    }

    proptest! {
        #[test]
        fn invariant_under_relabeling(z in labels(4, 25), zh in labels(4, 25), seed in any::<u64>()) {
            let z = LabelVector::new(z, 4).unwrap();
            let zh = LabelVector::new(zh, 4).unwrap();
            let mut sigma = vec![1, 2, 3, 4];
            let mut r = rng::rng_from(seed);
            for i in (1..4).rev() {
                sigma.swap(i, r.random_range(0..=i));
            }
            let base = misclassification(&zh, &z).unwrap().value;
            let moved = misclassification(&zh.relabel(&sigma).unwrap(), &z).unwrap().value;
            prop_assert_eq!(base, moved);
            prop_assert_eq!(base, misclassification(&z, &zh).unwrap().value);
            prop_assert!(base <= hamming(&zh, &z).unwrap() as f64 / 25.0);
        }

        #[test]
        fn unit_weights_reduce_to_count(z in labels(3, 20), zh in labels(3, 20)) {
            let z = LabelVector::new(z, 3).unwrap();
            let zh = LabelVector::new(zh, 3).unwrap();
            let w = weighted_misclassification(&zh, &z, &[1.0; 20]).unwrap().value;
            prop_assert_eq!(w / 20.0, misclassification(&zh, &z).unwrap().value);
        }
    }
}
