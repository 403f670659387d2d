//! Exact cyclic convolution over `Z/nZ` for nonnegative integer tables.
//!
//! Dense inputs go through a three-modulus NTT with Garner reconstruction;
//! sparse inputs use a direct double loop over the supports. Both routes are
//! exact as long as every linear-convolution coefficient stays below
//! `2^85`, which is checked before the NTT route is taken.

const MODS: [u64; 3] = [998_244_353, 167_772_161, 469_762_049];
const ROOT: u64 = 3;
/// Largest transform length every modulus above supports.
const MAX_NTT_LEN: usize = 1 << 23;
const NTT_VALUE_LIMIT: u128 = 1 << 85;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn ntt(a: &mut [u64], invert: bool, m: u64) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(ROOT, (m - 1) / len as u64, m);
        if invert {
            w = pow_mod(w, m - 2, m);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut t = 1u64;
        for _ in 0..half {
            twiddles.push(t);
            t = t * w % m;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * twiddles[k] % m;
                lo[k] = if u + v >= m { u + v - m } else { u + v };
                hi[k] = if u >= v { u - v } else { u + m - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = pow_mod(n as u64, m - 2, m);
        for x in a.iter_mut() {
            *x = *x * n_inv % m;
        }
    }
}

fn linear_mod(a: &[u128], b: &[u128], m: u64, size: usize) -> Vec<u64> {
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    for (d, &s) in fa.iter_mut().zip(a) {
        *d = (s % m as u128) as u64;
    }
    for (d, &s) in fb.iter_mut().zip(b) {
        *d = (s % m as u128) as u64;
    }
    ntt(&mut fa, false, m);
    ntt(&mut fb, false, m);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % m;
    }
    ntt(&mut fa, true, m);
    fa
}

fn garner(r: [u64; 3]) -> u128 {
    let [m0, m1, m2] = MODS;
    let x0 = r[0];
    let inv_m0_m1 = pow_mod(m0 % m1, m1 - 2, m1);
    let x1 = (r[1] + m1 - x0 % m1) % m1 * inv_m0_m1 % m1;
    let m01_mod_m2 = m0 % m2 * (m1 % m2) % m2;
    let inv_m01_m2 = pow_mod(m01_mod_m2, m2 - 2, m2);
    let partial = (x0 % m2 + x1 % m2 * (m0 % m2)) % m2;
    let x2 = (r[2] + m2 - partial) % m2 * inv_m01_m2 % m2;
    x0 as u128 + x1 as u128 * m0 as u128 + x2 as u128 * m0 as u128 * m1 as u128
}

fn direct(a: &[u128], b: &[u128], n: usize) -> Vec<u128> {
    let sa: Vec<(usize, u128)> = a.iter().copied().enumerate().filter(|e| e.1 != 0).collect();
    let sb: Vec<(usize, u128)> = b.iter().copied().enumerate().filter(|e| e.1 != 0).collect();
    let mut out = vec![0u128; n];
    for &(i, x) in &sa {
        for &(j, y) in &sb {
            let k = i + j;
            out[if k >= n { k - n } else { k }] += x * y;
        }
    }
    out
}

fn via_ntt(a: &[u128], b: &[u128], n: usize) -> Vec<u128> {
    let size = (2 * n - 1).next_power_of_two();
    let parts: Vec<Vec<u64>> = MODS.iter().map(|&m| linear_mod(a, b, m, size)).collect();
    let mut out = vec![0u128; n];
    for k in 0..2 * n - 1 {
        let v = garner([parts[0][k], parts[1][k], parts[2][k]]);
        out[k % n] += v;
    }
    out
}

/// `c[k] = sum_{i + j = k mod n} a[i] b[j]`, exact; `a` and `b` must have the
/// same length `n`.
pub fn cyclic_convolve(a: &[u128], b: &[u128]) -> Vec<u128> {
    assert_eq!(a.len(), b.len(), "cyclic convolution needs equal lengths");
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let nnz_a = a.iter().filter(|&&x| x != 0).count();
    let nnz_b = b.iter().filter(|&&x| x != 0).count();
    let max_a = a.iter().copied().max().unwrap_or(0);
    let max_b = b.iter().copied().max().unwrap_or(0);
    let direct_cost = nnz_a as f64 * nnz_b as f64;
    let size = (2 * n - 1).next_power_of_two();
    let ntt_cost = 9.0 * size as f64 * (size as f64).log2().max(1.0);
    let bound = max_a
        .checked_mul(max_b)
        .and_then(|v| v.checked_mul(nnz_a.min(nnz_b).max(1) as u128));
    let ntt_ok = size <= MAX_NTT_LEN && matches!(bound, Some(v) if v < NTT_VALUE_LIMIT);
    if ntt_ok && ntt_cost < direct_cost {
        via_ntt(a, b, n)
    } else {
        direct(a, b, n)
    }
}

/// Cyclic correlation `c[k] = sum_i a[i + k] b[i]`, i.e. convolution of `a`
/// with the reflection of `b`.
pub fn cyclic_correlate(a: &[u128], b: &[u128]) -> Vec<u128> {
    let n = b.len();
    let mut rb = vec![0u128; n];
    for (i, &x) in b.iter().enumerate() {
        rb[(n - i) % n] = x;
    }
    cyclic_convolve(a, &rb)
}
