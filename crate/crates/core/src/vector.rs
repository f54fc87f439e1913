//! Dense vector helpers shared by the embedding, recall and ranking stages.
//!
//! Vectors are plain `f64` slices. Every helper accumulates left to right so
//! results are bit-reproducible for identical inputs.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// L2-normalizes `a`. A zero (or non-finite norm) vector comes back as all zeros.
pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        a.iter().map(|x| x / n).collect()
    } else {
        vec![0.0; a.len()]
    }
}

pub fn is_zero(a: &[f64]) -> bool {
    a.iter().all(|x| *x == 0.0)
}

/// Cosine similarity; 0 when either side is the zero vector.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}

/// `acc += scale * v`
pub fn add_scaled(acc: &mut [f64], v: &[f64], scale: f64) {
    debug_assert_eq!(acc.len(), v.len());
    for (a, x) in acc.iter_mut().zip(v) {
        *a += scale * x;
    }
}

/// Weighted sum of `(weight, vector)` terms in the given order.
pub fn weighted_sum<'a>(dim: usize, terms: impl IntoIterator<Item = (f64, &'a [f64])>) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for (w, v) in terms {
        add_scaled(&mut acc, v, w);
    }
    acc
}

/// Arithmetic mean of the given vectors; zero vector for an empty input.
pub fn mean<'a>(dim: usize, vectors: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    let mut count = 0usize;
    for v in vectors {
        add_scaled(&mut acc, v, 1.0);
        count += 1;
    }
    if count > 0 {
        let inv = count as f64;
        acc.iter_mut().for_each(|a| *a /= inv);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_zero_stays_zero() {
        assert_eq!(normalize(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert!(is_zero(&normalize(&[0.0; 4])));
    }

    #[test]
    fn cosine_of_parallel_vectors_is_one() {
        let c = cosine(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((c - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn mean_of_nothing_is_zero() {
        assert_eq!(mean(3, std::iter::empty()), vec![0.0; 3]);
        let a = [1.0, 0.0];
        let b = [0.0, 1.0];
        assert_eq!(mean(2, [&a[..], &b[..]]), vec![0.5, 0.5]);
    }
}
