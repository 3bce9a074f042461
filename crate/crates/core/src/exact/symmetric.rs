use crate::scalar::{binomial, Scalar};

/// Normalized elementary symmetric means `S_k = e_k(x) / C(K, k)`, `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMeans<S> {
    pub x: Vec<S>,
    /// `s[k - 1] = S_k`.
    pub s: Vec<S>,
}

impl<S: Scalar> SymmetricMeans<S> {
    pub fn k(&self) -> usize {
        self.x.len()
    }

    /// `S_k` for `1 <= k <= K`; `S_0 = 1`.
    pub fn mean(&self, k: usize) -> S {
        if k == 0 {
            S::one()
        } else {
            self.s[k - 1].clone()
        }
    }

    /// `S_k^{1/k}` for `k = 1..=K`, in floating point.
    pub fn root_chain(&self) -> Vec<f64> {
        self.s
            .iter()
            .enumerate()
            .map(|(k, s)| s.to_real().max(0.0).powf(1.0 / (k + 1) as f64))
            .collect()
    }

    /// Whether `S_1 >= S_2^{1/2} >= ... >= S_K^{1/K}` holds up to `tol`.
    pub fn maclaurin_holds(&self, tol: f64) -> bool {
        self.root_chain().windows(2).all(|w| w[0] + tol >= w[1])
    }
}

/// Evaluates the symmetric means with the prefix recurrence
/// `e_k <- e_k + x_t e_{k-1}` (O(K²), no subset expansion).
pub fn symmetric_means<S: Scalar>(x: &[S]) -> SymmetricMeans<S> {
    let k = x.len();
    let mut e = vec![S::zero(); k + 1];
    e[0] = S::one();
    for (t, xt) in x.iter().enumerate() {
        for j in (1..=t + 1).rev() {
            e[j] = e[j].clone() + xt.clone() * e[j - 1].clone();
        }
    }
    let s = (1..=k)
        .map(|j| e[j].clone() / binomial::<S>(k, j))
        .collect();
    SymmetricMeans { x: x.to_vec(), s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;
    use proptest::prelude::*;

    /// 2^K subset enumeration.
    fn brute_force(x: &[f64]) -> Vec<f64> {
        let k = x.len();
        let mut e = vec![0.0; k + 1];
        for mask in 0u32..(1 << k) {
            let prod: f64 = (0..k)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| x[b])
                .product();
            e[mask.count_ones() as usize] += prod;
        }
        (1..=k).map(|j| e[j] / binomial::<f64>(k, j)).collect()
    }

    #[test]
    fn constant_vector() {
        let sm = symmetric_means(&[0.3; 5]);
        for k in 1..=5 {
            assert!((sm.mean(k) - 0.3f64.powi(k as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn one_zero() {
        let sm = symmetric_means(&[Exact::ratio(1, 1), Exact::ratio(0, 1)]);
        assert_eq!(sm.s, vec![Exact::ratio(1, 2), Exact::ratio(0, 1)]);
    }

    #[test]
    fn fixed_k6_against_enumeration() {
        let x = [0.12, 0.93, 0.45, 0.0, 0.77, 0.31];
        let sm = symmetric_means(&x);
        for (a, b) in sm.s.iter().zip(brute_force(&x)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn matches_enumeration(x in prop::collection::vec(0.0f64..=1.0, 1..=12)) {
            let sm = symmetric_means(&x);
            for (a, b) in sm.s.iter().zip(brute_force(&x)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            prop_assert!(sm.maclaurin_holds(1e-12));
        }

        #[test]
        fn maclaurin_strict_unless_constant(x in prop::collection::vec(0.05f64..=1.0, 2..=12)) {
            let sm = symmetric_means(&x);
            let chain = sm.root_chain();
            let spread = x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min);
            if spread > 1e-3 {
                prop_assert!(chain.windows(2).all(|w| w[0] > w[1]));
            }
        }

        #[test]
        fn equal_coordinates_give_equal_chain(c in 0.0f64..=1.0, k in 2usize..=12) {
            let sm = symmetric_means(&vec![c; k]);
            let chain = sm.root_chain();
            prop_assert!(chain.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12));
        }
    }
}
