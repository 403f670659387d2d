//! Prime-field arithmetic, primitive roots, discrete-log tables and
//! multiplicative characters.
//!
//! A [`PrimeField`] owns the full index table of `F_p^*` with respect to the
//! least primitive root, so every character value can be kept as an exact
//! exponent modulo `p - 1` until a sum is finally evaluated.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

/// Largest modulus accepted by [`PrimeField::new`].
pub const DEFAULT_FIELD_CAP: u32 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("modulus {p} exceeds the configured cap {cap}")]
    TooLarge { p: u64, cap: u64 },
    #[error("character index {m} out of range [0, {max}]")]
    IndexOutOfRange { m: u64, max: u64 },
}

/// Deterministic primality test by trial division; adequate for the moduli
/// handled here (at most a few million).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Sieve of Eratosthenes: all primes `q <= bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

struct Tables {
    p: u32,
    g: u32,
    /// `ind[x]` for `x` in `1..p`; `ind[0]` is unused.
    ind: Vec<u32>,
    /// `exp[k] = g^k mod p` for `k` in `0..p-1`.
    exp: Vec<u32>,
    inv: Vec<u32>,
}

/// The field `F_p` for an odd prime `p`, with its least primitive root and
/// full discrete-log table. Cloning is cheap (shared tables).
#[derive(Clone)]
pub struct PrimeField {
    tables: Arc<Tables>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeField")
            .field("p", &self.p())
            .field("g", &self.generator())
            .finish()
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p()
    }
}

impl Eq for PrimeField {}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        Self::with_cap(p, DEFAULT_FIELD_CAP as u64)
    }

    pub fn with_cap(p: u64, cap: u64) -> Result<Self, FieldError> {
        if p < 3 || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p > cap {
            return Err(FieldError::TooLarge { p, cap });
        }
        let order = p - 1;
        let factors = distinct_prime_factors(order);
        let g = (2..p)
            .find(|&c| factors.iter().all(|&q| pow_mod(c, order / q, p) != 1))
            .expect("a primitive root exists for every odd prime");

        let n = p as usize;
        let mut ind = vec![u32::MAX; n];
        let mut exp = vec![0u32; n - 1];
        let mut x = 1u64;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = x as u32;
            ind[x as usize] = k as u32;
            x = x * g % p;
        }
        let mut inv = vec![0u32; n];
        for x in 1..n {
            let k = ind[x] as usize;
            inv[x] = exp[(n - 1 - k) % (n - 1)];
        }
        Ok(Self {
            tables: Arc::new(Tables {
                p: p as u32,
                g: g as u32,
                ind,
                exp,
                inv,
            }),
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.tables.p
    }

    /// Order of the multiplicative group, `p - 1`.
    #[inline]
    pub fn group_order(&self) -> u32 {
        self.tables.p - 1
    }

    #[inline]
    pub fn generator(&self) -> u32 {
        self.tables.g
    }

    /// Discrete logarithm of `x` to base `g`; `None` for `x = 0`.
    #[inline]
    pub fn ind(&self, x: u32) -> Option<u32> {
        if x == 0 {
            None
        } else {
            Some(self.tables.ind[x as usize])
        }
    }

    /// `g^k mod p`, with `k` taken modulo `p - 1`.
    #[inline]
    pub fn pow_g(&self, k: u64) -> u32 {
        self.tables.exp[(k % self.group_order() as u64) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, x: u32) -> Option<u32> {
        if x == 0 {
            None
        } else {
            Some(self.tables.inv[x as usize])
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p() as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        let p = self.p() as u64;
        ((a as u64 + p - b as u64) % p) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a as u64 * b as u64 % self.p() as u64) as u32
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// Reduce an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p() as i64) as u32
    }

    /// Character of index `m`, i.e. `x -> e(m ind(x) / (p-1))`.
    pub fn character(&self, m: u64) -> Result<Character, FieldError> {
        Character::new(self.clone(), m)
    }
}

/// A multiplicative character of `F_p^*`, extended by `chi(0) = 0`.
///
/// Values are held as exact exponents `m ind(x) mod (p-1)`; the unit-circle
/// table is only consulted when a value is turned into a complex number.
#[derive(Clone)]
pub struct Character {
    field: PrimeField,
    m: u32,
    roots: Arc<Vec<Complex64>>,
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Character")
            .field("p", &self.field.p())
            .field("m", &self.m)
            .finish()
    }
}

impl Character {
    pub fn new(field: PrimeField, m: u64) -> Result<Self, FieldError> {
        let n = field.group_order() as u64;
        if m >= n {
            return Err(FieldError::IndexOutOfRange { m, max: n - 1 });
        }
        let roots = (0..n)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect();
        Ok(Self {
            field,
            m: m as u32,
            roots: Arc::new(roots),
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn index(&self) -> u32 {
        self.m
    }

    pub fn is_principal(&self) -> bool {
        self.m == 0
    }

    /// Order of the character in the dual group: `(p-1) / gcd(m, p-1)`.
    pub fn order(&self) -> u32 {
        let n = self.field.group_order() as u64;
        (n / gcd(self.m as u64, n)) as u32
    }

    /// The complex-conjugate character, of index `(p-1-m) mod (p-1)`.
    pub fn conjugate(&self) -> Character {
        let n = self.field.group_order();
        Character {
            field: self.field.clone(),
            m: (n - self.m) % n,
            roots: Arc::clone(&self.roots),
        }
    }

    /// Exact exponent `k` with `chi(x) = e(k / (p-1))`; `None` when `x = 0`.
    #[inline]
    pub fn exponent(&self, x: u32) -> Option<u32> {
        let n = self.field.group_order() as u64;
        self.field
            .ind(x)
            .map(|i| (self.m as u64 * i as u64 % n) as u32)
    }

    /// Unit root `e(k / (p-1))` for an exponent produced by [`Self::exponent`].
    #[inline]
    pub fn root(&self, k: u32) -> Complex64 {
        self.roots[k as usize]
    }

    #[inline]
    pub fn value(&self, x: u32) -> Complex64 {
        match self.exponent(x % self.field.p()) {
            Some(k) => self.roots[k as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_primitive_roots() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.generator(), 2);
        assert_eq!(f5.ind(4), Some(2));
        // 2 has order 3 mod 7, so the least generator is 3.
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(pow_mod(2, 3, 7), 1);
        assert_eq!(f7.generator(), 3);
    }

    #[test]
    fn rejects_composites_small_and_oversize() {
        assert_eq!(PrimeField::new(4).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(PrimeField::new(2).unwrap_err(), FieldError::NotPrime(2));
        assert_eq!(PrimeField::new(1).unwrap_err(), FieldError::NotPrime(1));
        assert!(matches!(
            PrimeField::with_cap(101, 100),
            Err(FieldError::TooLarge { .. })
        ));
        assert!(matches!(
            PrimeField::new((1 << 20) + 7),
            Err(FieldError::TooLarge { .. })
        ));
    }

    #[test]
    fn index_round_trip_and_generation() {
        for p in [3u64, 5, 7, 11, 101, 257, 65537] {
            let f = PrimeField::new(p).unwrap();
            let mut seen = vec![false; p as usize];
            for x in 1..p as u32 {
                let k = f.ind(x).unwrap();
                assert_eq!(pow_mod(f.generator() as u64, k as u64, p) as u32, x);
                assert!(!seen[f.pow_g(k as u64) as usize]);
                seen[f.pow_g(k as u64) as usize] = true;
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
            }
        }
    }

    #[test]
    fn character_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let chi0 = f5.character(0).unwrap();
        assert!(chi0.is_principal());
        for x in 1..5 {
            assert!((chi0.value(x) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert_eq!(chi0.value(0), Complex64::new(0.0, 0.0));

        // Squares mod 5 are {1, 4}, so (2|5) = -1.
        let quad = f5.character(2).unwrap();
        assert!((quad.value(2) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((quad.value(4) - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let f7 = PrimeField::new(7).unwrap();
        let chi = f7.character(3).unwrap();
        assert_eq!(chi.order(), 2);
        assert_eq!(chi.conjugate().index(), 3);
        assert_eq!(f7.character(1).unwrap().conjugate().index(), 5);
        assert_eq!(chi0.conjugate().index(), 0);

        assert!(matches!(
            f5.character(4),
            Err(FieldError::IndexOutOfRange { m: 4, max: 3 })
        ));
    }

    #[test]
    fn orthogonality() {
        for p in [5u64, 13, 31, 101] {
            let f = PrimeField::new(p).unwrap();
            for m in 0..p - 1 {
                let chi = f.character(m).unwrap();
                let s: Complex64 = (1..p as u32).map(|x| chi.value(x)).sum();
                let expected = if m == 0 { (p - 1) as f64 } else { 0.0 };
                assert!((s - Complex64::new(expected, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn primes_sieve() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(13), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(primes_up_to(1000).len(), 168);
        assert!(primes_up_to(1000).iter().all(|&q| is_prime(q)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn multiplicativity(pi in 0usize..6, m in 0u64..1000, pairs in proptest::collection::vec((1u32..u32::MAX, 1u32..u32::MAX), 1..200)) {
                let p = [3u64, 7, 31, 257, 7919, 65537][pi];
                let f = PrimeField::new(p).unwrap();
                let chi = f.character(m % (p - 1)).unwrap();
                for (a, b) in pairs {
                    let x = a % f.p();
                    let y = b % f.p();
                    if x == 0 || y == 0 {
                        continue;
                    }
                    let lhs = chi.value(f.mul(x, y));
                    let rhs = chi.value(x) * chi.value(y);
                    prop_assert!((lhs - rhs).norm() < 1e-9);
                    prop_assert!((chi.value(x).norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
