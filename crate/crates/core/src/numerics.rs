//! Deterministic summation and combinatorial enumeration helpers.

use num_complex::Complex64;

/// Pairwise (cascade) summation; the split points depend only on the
/// length, so the result is independent of how the terms were produced.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().fold(Complex64::default(), |a, b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_real(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_real(&xs[..mid]) + pairwise_sum_real(&xs[mid..])
}

/// Sign of a permutation given in one-line notation.
pub fn permutation_sign(perm: &[usize]) -> f64 {
    let mut p = perm.to_vec();
    let mut sign = 1.0;
    for i in 0..p.len() {
        while p[i] != i {
            let j = p[i];
            p.swap(i, j);
            sign = -sign;
        }
    }
    sign
}

/// All permutations of `0..n` in lexicographic order, each with its sign.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let s = permutation_sign(&p);
            (p, s)
        })
        .collect()
}

/// Perfect matchings of `0..2m` as ordered pair lists `(a, b)` with `a < b`,
/// paired with the sign of the permutation `(a_1 b_1 a_2 b_2 …)`.
pub fn signed_matchings(size: usize) -> Vec<(Vec<(usize, usize)>, f64)> {
    fn rec(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = rest[0];
        for k in 1..rest.len() {
            let b = rest[k];
            let remaining: Vec<usize> = rest[1..k].iter().chain(&rest[k + 1..]).copied().collect();
            acc.push((a, b));
            rec(&remaining, acc, out);
            acc.pop();
        }
    }
    assert!(size.is_multiple_of(2), "matchings need an even number of slots");
    let idx: Vec<usize> = (0..size).collect();
    let mut out = Vec::new();
    rec(&idx, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|m| {
            let flat: Vec<usize> = m.iter().flat_map(|&(a, b)| [a, b]).collect();
            let s = permutation_sign(&flat);
            (m, s)
        })
        .collect()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// 64-bit FNV-1a hash, used to derive per-check seeds from names.
pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<Complex64> = (0..1000).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let s = pairwise_sum(&xs);
        assert_eq!(s, Complex64::new(499500.0, -499500.0));
    }

    #[test]
    fn permutation_counts_and_signs() {
        let perms = signed_permutations(4);
        assert_eq!(perms.len(), 24);
        assert_eq!(perms.iter().map(|(_, s)| s).sum::<f64>(), 0.0);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1.0);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1.0);
    }

    #[test]
    fn matching_counts() {
        assert_eq!(signed_matchings(4).len(), 3);
        assert_eq!(signed_matchings(6).len(), 15);
        let m4 = signed_matchings(4);
        // (01)(23) +, (02)(13) -, (03)(12) +
        let signs: Vec<f64> = m4.iter().map(|(_, s)| *s).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0]);
    }
}
