//! Bilinear character sums `W_chi(I, S; alpha, beta)`, the amplification
//! transform `(s, t, x, y) -> ((s + x)/y, (t + x)/y)`, the count
//! `N(S, X, Y)`, and complete product sums with their Weil-bound checks.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::energy::{diff_multiplicity, e3, EnergyError};
use crate::field::{primes_up_to, Character, PrimeField};
use crate::numeric::{ComplexSum, NeumaierSum};
use crate::sets::{poly_image, symmetric_interval, FpSet, Polynomial, SetError, SetTag};

/// Slack allowed on `|w| <= 1`.
pub const UNIT_DISK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharsumError {
    #[error("weights do not match the support of the set")]
    SupportMismatch,
    #[error("weight {index} has modulus {modulus} > 1")]
    OutsideUnitDisk { index: usize, modulus: f64 },
    #[error("no primes in [{y}, {}]", 2 * .y)]
    EmptyPrimeWindow { y: u32 },
    #[error("inadmissible amplification parameters: Y = {y}, Z = {z}, X = {x}")]
    InadmissibleYZ { y: u32, z: u32, x: u32 },
    #[error("denominator set contains 0 mod p")]
    ZeroDenominator,
    #[error("{what} too large for exact evaluation")]
    TooLarge { what: &'static str },
    #[error("characters and sets live in different fields")]
    FieldMismatch,
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Complex weights indexed by the elements of a set, each in the closed
/// unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    support: Vec<u32>,
    values: Vec<Complex64>,
}

impl WeightVector {
    pub fn new(support: &FpSet, values: Vec<Complex64>) -> Result<Self, CharsumError> {
        if values.len() != support.len() {
            return Err(CharsumError::SupportMismatch);
        }
        if let Some((index, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.norm() <= 1.0 + UNIT_DISK_TOL))
        {
            return Err(CharsumError::OutsideUnitDisk {
                index,
                modulus: v.norm(),
            });
        }
        Ok(Self {
            support: support.elems().to_vec(),
            values,
        })
    }

    pub fn ones(support: &FpSet) -> Self {
        Self {
            support: support.elems().to_vec(),
            values: vec![Complex64::new(1.0, 0.0); support.len()],
        }
    }

    /// Unimodular weights `e(theta_i)` with `theta_i` drawn from `seed`.
    pub fn random_phases(support: &FpSet, seed: u64) -> Self {
        use rand_chacha::ChaCha8Rng;
        use rand_core::{RngCore, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..support.len())
            .map(|_| {
                let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
                Complex64::from_polar(1.0, std::f64::consts::TAU * u)
            })
            .collect();
        Self {
            support: support.elems().to_vec(),
            values,
        }
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn check(&self, set: &FpSet) -> Result<(), CharsumError> {
        if self.support == set.elems() {
            Ok(())
        } else {
            Err(CharsumError::SupportMismatch)
        }
    }
}

fn check_field(chi: &Character, sets: &[&FpSet]) -> Result<(), CharsumError> {
    if sets.iter().all(|s| s.field() == chi.field()) {
        Ok(())
    } else {
        Err(CharsumError::FieldMismatch)
    }
}

/// `sum_s sum_x alpha_s beta_x chi(s + x)`.
pub fn bilinear_sum(
    chi: &Character,
    s: &FpSet,
    i: &FpSet,
    alpha: &WeightVector,
    beta: &WeightVector,
) -> Result<Complex64, CharsumError> {
    check_field(chi, &[s, i])?;
    alpha.check(s)?;
    beta.check(i)?;
    let rows = inner_sums(chi, s, i, beta);
    Ok(rows
        .iter()
        .zip(&alpha.values)
        .map(|(r, a)| r * a)
        .collect::<ComplexSum>()
        .value())
}

/// `sum_x beta_x chi(s + x)` for each `s`, in order.
fn inner_sums(chi: &Character, s: &FpSet, i: &FpSet, beta: &WeightVector) -> Vec<Complex64> {
    let f = chi.field();
    s.elems()
        .par_iter()
        .map(|&sv| {
            i.elems()
                .iter()
                .zip(&beta.values)
                .map(|(&x, b)| b * chi.value(f.add(sv, x)))
                .collect::<ComplexSum>()
                .value()
        })
        .collect()
}

/// `sum_s |sum_x beta_x chi(s + x)|`.
pub fn modulus_sum(
    chi: &Character,
    s: &FpSet,
    i: &FpSet,
    beta: &WeightVector,
) -> Result<f64, CharsumError> {
    check_field(chi, &[s, i])?;
    beta.check(i)?;
    let mut acc = NeumaierSum::default();
    for r in inner_sums(chi, s, i, beta) {
        acc.add(r.norm());
    }
    Ok(acc.value())
}

/// `sum_x |sum_s alpha_s chi(s + x)|`.
pub fn modulus_sum_transposed(
    chi: &Character,
    s: &FpSet,
    i: &FpSet,
    alpha: &WeightVector,
) -> Result<f64, CharsumError> {
    modulus_sum(chi, i, s, alpha)
}

/// The unimodular `alpha` for which `W = modulus_sum`.
pub fn optimal_alpha(
    chi: &Character,
    s: &FpSet,
    i: &FpSet,
    beta: &WeightVector,
) -> Result<WeightVector, CharsumError> {
    check_field(chi, &[s, i])?;
    beta.check(i)?;
    let values = inner_sums(chi, s, i, beta)
        .into_iter()
        .map(|r| {
            if r.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                r.conj() / r.norm()
            }
        })
        .collect();
    Ok(WeightVector {
        support: s.elems().to_vec(),
        values,
    })
}

/// Both sides of `|W|^2 <= #I sum_x |sum_s alpha_s chi(s + x)|^2`.
pub fn cauchy_check(
    chi: &Character,
    s: &FpSet,
    i: &FpSet,
    alpha: &WeightVector,
    beta: &WeightVector,
) -> Result<(f64, f64), CharsumError> {
    let w = bilinear_sum(chi, s, i, alpha, beta)?;
    let mut acc = NeumaierSum::default();
    for r in inner_sums(chi, i, s, alpha) {
        acc.add(r.norm_sqr());
    }
    Ok((w.norm_sqr(), i.len() as f64 * acc.value()))
}

/// `sum_{q <= Q prime} |sum_{1 <= r <= R} chi(f(q) + r)|` computed twice:
/// straight over the primes, and over the image set weighted by how many
/// primes land on each residue.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimePolySum {
    pub direct: f64,
    pub via_image: f64,
    /// Unweighted `sum_{s in f(P)} |sum_r chi(s + r)|`.
    pub image_modulus_sum: f64,
    /// Largest number of primes sharing one residue of `f`.
    pub max_weight: u32,
    pub primes: usize,
}

pub fn prime_poly_sum(
    chi: &Character,
    f: &Polynomial,
    q_bound: u64,
    r_len: u32,
) -> Result<PrimePolySum, CharsumError> {
    let field = chi.field();
    let p = field.p() as u64;
    let primes = primes_up_to(q_bound);
    let inner_i = crate::sets::interval(field, 1, r_len)?;
    let ones = WeightVector::ones(&inner_i);
    let inner = |s: u32| -> f64 {
        inner_i
            .elems()
            .iter()
            .map(|&x| chi.value(field.add(s, x)))
            .collect::<ComplexSum>()
            .value()
            .norm()
    };
    let mut direct = NeumaierSum::default();
    let mut weights: HashMap<u32, u32> = HashMap::new();
    for &q in &primes {
        let v = f.eval((q % p) as u32);
        direct.add(inner(v));
        *weights.entry(v).or_insert(0) += 1;
    }
    let residues = FpSet::from_residues(field, primes.iter().map(|&q| (q % p) as u32), SetTag::Primes)?;
    let image = poly_image(f, &residues)?;
    let mut via_image = NeumaierSum::default();
    for &s in image.set.elems() {
        via_image.add(weights[&s] as f64 * inner(s));
    }
    Ok(PrimePolySum {
        direct: direct.value(),
        via_image: via_image.value(),
        image_modulus_sum: modulus_sum(chi, &image.set, &inner_i, &ones)?,
        max_weight: weights.values().copied().max().unwrap_or(0),
        primes: primes.len(),
    })
}

/// Parameters of one amplification step.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationParams {
    pub r: u32,
    /// Primes are taken from `[Y, 2Y]`.
    pub y: u32,
    /// Shifts run over `(Z, 2Z]`.
    pub z: u32,
    /// `eta_z` for `z = Z + 1, ..., 2Z`.
    pub eta: Vec<Complex64>,
}

/// Largest `v >= 0` with `v^r <= n` (as `u128`).
fn int_root(n: u128, r: u32) -> u128 {
    let mut lo = 0u128;
    let mut hi = 1u128;
    while hi.checked_pow(r).is_some_and(|v| v <= n) {
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if mid.checked_pow(r).is_some_and(|v| v <= n) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

impl AmplificationParams {
    /// `Z = floor(p^{1/r})` and
    /// `Y = min(floor(2X p^{-1/r}), floor(X / 4Z), floor(p^{1/2} / 2))`,
    /// with `eta = 1`.
    pub fn defaults(p: u32, x: u32, r: u32) -> Result<Self, CharsumError> {
        assert!(r >= 1);
        let z = int_root(p as u128, r) as u32;
        // floor(2X / p^{1/r}) is the largest y with y^r p <= (2X)^r.
        let two_x = 2 * x as u128;
        let mut y_main = 0u128;
        while (y_main + 1)
            .checked_pow(r)
            .zip(two_x.checked_pow(r))
            .is_some_and(|(l, rhs)| l.saturating_mul(p as u128) <= rhs)
        {
            y_main += 1;
        }
        let y_adm = if z == 0 { 0 } else { x as u128 / (4 * z as u128) };
        let y_wrap = int_root(p as u128, 2) / 2;
        let y = y_main.min(y_adm).min(y_wrap) as u32;
        if y == 0 || z == 0 {
            return Err(CharsumError::InadmissibleYZ { y, z, x });
        }
        Ok(Self {
            r,
            y,
            z,
            eta: vec![Complex64::new(1.0, 0.0); z as usize],
        })
    }

    pub fn validate(&self, x: u32) -> Result<(), CharsumError> {
        if self.y == 0 || self.z == 0 || 4 * self.y as u64 * self.z as u64 > x as u64 {
            return Err(CharsumError::InadmissibleYZ {
                y: self.y,
                z: self.z,
                x,
            });
        }
        if self.eta.len() != self.z as usize {
            return Err(CharsumError::SupportMismatch);
        }
        if let Some((index, v)) = self
            .eta
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.norm() <= 1.0 + UNIT_DISK_TOL))
        {
            return Err(CharsumError::OutsideUnitDisk {
                index,
                modulus: v.norm(),
            });
        }
        Ok(())
    }

    /// `y1 = lambda y2` has at most one prime solution only while
    /// `2Y <= p^{1/2}`; larger windows are flagged.
    pub fn wraps_around(&self, p: u32) -> bool {
        4 * (self.y as u64).pow(2) > p as u64
    }

    /// The primes of `[Y, 2Y]` as a set of residues.
    pub fn prime_window(&self, field: &PrimeField) -> Result<FpSet, CharsumError> {
        let primes: Vec<u64> = primes_up_to(2 * self.y as u64)
            .into_iter()
            .filter(|&q| q >= self.y as u64)
            .collect();
        if primes.is_empty() {
            return Err(CharsumError::EmptyPrimeWindow { y: self.y });
        }
        let p = field.p() as u64;
        if primes.iter().any(|&q| q % p == 0) {
            return Err(CharsumError::ZeroDenominator);
        }
        Ok(FpSet::from_residues(
            field,
            primes.iter().map(|&q| (q % p) as u32),
            SetTag::Primes,
        )?)
    }
}

/// Sparse `nu(lambda, mu)`, sorted by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityMap {
    pub entries: Vec<((u32, u32), u64)>,
    pub s_len: usize,
    pub x_len: usize,
    pub y_len: usize,
}

impl MultiplicityMap {
    pub fn total(&self) -> u128 {
        self.entries.iter().map(|e| e.1 as u128).sum()
    }

    pub fn second_moment(&self) -> u128 {
        self.entries.iter().map(|e| (e.1 as u128).pow(2)).sum()
    }

    /// `#S (#S - 1) #X #Y`.
    pub fn expected_total(&self) -> u128 {
        let s = self.s_len as u128;
        s * s.saturating_sub(1) * self.x_len as u128 * self.y_len as u128
    }

    pub fn get(&self, key: (u32, u32)) -> u64 {
        self.entries
            .binary_search_by_key(&key, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }
}

/// `nu(lambda, mu) = #{(s, t, x, y) : s != t, (s + x)/y = lambda, (t + x)/y = mu}`.
pub fn nu_map(s: &FpSet, x: &FpSet, y: &FpSet) -> Result<MultiplicityMap, CharsumError> {
    if s.field() != x.field() || s.field() != y.field() {
        return Err(CharsumError::FieldMismatch);
    }
    if y.contains(0) {
        return Err(CharsumError::ZeroDenominator);
    }
    let f = s.field();
    let invs: Vec<u32> = y.elems().iter().map(|&v| f.inv(v).expect("nonzero")).collect();
    let mut map: HashMap<(u32, u32), u64> = HashMap::new();
    for &sv in s.elems() {
        for &tv in s.elems() {
            if sv == tv {
                continue;
            }
            for &xv in x.elems() {
                let (a, b) = (f.add(sv, xv), f.add(tv, xv));
                for &iv in &invs {
                    *map.entry((f.mul(a, iv), f.mul(b, iv))).or_insert(0) += 1;
                }
            }
        }
    }
    let mut entries: Vec<_> = map.into_iter().collect();
    entries.sort_unstable();
    Ok(MultiplicityMap {
        entries,
        s_len: s.len(),
        x_len: x.len(),
        y_len: y.len(),
    })
}

/// The amplification map over `I = [-X, X]` and the primes of `[Y, 2Y]`.
pub fn amplification_map(
    s: &FpSet,
    x: u32,
    params: &AmplificationParams,
) -> Result<MultiplicityMap, CharsumError> {
    params.validate(x)?;
    let window = params.prime_window(s.field())?;
    let interval = symmetric_interval(s.field(), x)?;
    nu_map(s, &interval, &window)
}

/// `N(S, X, Y) = sum nu^2`, via the `(lambda, mu)` fibration.
pub fn count_n(s: &FpSet, x: &FpSet, y: &FpSet) -> Result<u128, CharsumError> {
    Ok(nu_map(s, x, y)?.second_moment())
}

/// The `y1 = y2` part of `N(S, X, Y)`, measured and predicted as
/// `#Y (E3(S, S, X) - sum_d r_S(d) r_X(d))`.
pub fn count_n_equal_y_split(
    s: &FpSet,
    x: &FpSet,
    y: &FpSet,
) -> Result<(u128, u128), CharsumError> {
    let mut measured = 0u128;
    for &yv in y.elems() {
        let single = FpSet::from_residues(y.field(), [yv], SetTag::Derived)?;
        measured += count_n(s, x, &single)?;
    }
    let rs = diff_multiplicity(s);
    let rx = diff_multiplicity(x);
    let coincide: u128 = rs.nonzero().map(|(d, c)| c * rx.get(d)).sum();
    let predicted = y.len() as u128 * (e3(s, s, x)? - coincide);
    Ok((measured, predicted))
}

/// `sum_lambda prod_{i<r} chi(lambda + z_i) conj(chi(lambda + z_{r+i}))`
/// held as a histogram of exact exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSum {
    /// `hist[k]` counts the `lambda` whose summand is `e(k / (p-1))`.
    pub hist: Vec<u64>,
    pub value: Complex64,
}

impl ProductSum {
    /// `true` when the histogram, with `c` removed from the exponent-0 bin, is
    /// constant on the exponents the character can reach. That makes the sum
    /// exactly `c`, with no rounding involved.
    pub fn certifies_integer(&self, c: i64, chi: &Character) -> bool {
        let n = self.hist.len() as u32;
        let step = n / chi.order();
        if chi.order() == 1 {
            return self.hist[0] as i64 == c;
        }
        let adj = |k: u32| self.hist[k as usize] as i64 - if k == 0 { c } else { 0 };
        let first = adj(0);
        (0..n).all(|k| {
            if k % step == 0 {
                adj(k) == first
            } else {
                self.hist[k as usize] == 0
            }
        })
    }
}

pub fn complete_product_sum(chi: &Character, shifts: &[u32]) -> ProductSum {
    assert!(shifts.len() % 2 == 0, "need 2r shifts");
    let f = chi.field();
    let n = f.group_order();
    let r = shifts.len() / 2;
    let mut hist = vec![0u64; n as usize];
    'lambda: for lambda in 0..f.p() {
        let mut k = 0u64;
        for (i, &z) in shifts.iter().enumerate() {
            let Some(e) = chi.exponent(f.add(lambda, z % f.p())) else {
                continue 'lambda;
            };
            k += if i < r { e as u64 } else { (n - e) as u64 };
        }
        hist[(k % n as u64) as usize] += 1;
    }
    let value = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| chi.root(k as u32) * c as f64)
        .collect::<ComplexSum>()
        .value();
    ProductSum { hist, value }
}

/// `true` when every shift occurs as often in the first half as in the
/// second, up to a multiple of `order`. The product is then an `order`-th
/// power and the sum is trivial, so no square-root bound applies.
pub fn is_degenerate(shifts: &[u32], order: u32, p: u32) -> bool {
    let r = shifts.len() / 2;
    let mut diff: HashMap<u32, i64> = HashMap::new();
    for (i, &z) in shifts.iter().enumerate() {
        *diff.entry(z % p).or_insert(0) += if i < r { 1 } else { -1 };
    }
    diff.values().all(|&d| d.rem_euclid(order as i64) == 0)
}

/// `true` when the two halves are the same multiset.
pub fn is_permutation_pair(shifts: &[u32], p: u32) -> bool {
    let r = shifts.len() / 2;
    let mut a: Vec<u32> = shifts[..r].iter().map(|z| z % p).collect();
    let mut b: Vec<u32> = shifts[r..].iter().map(|z| z % p).collect();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// `(2r - 1) sqrt(p)`.
pub fn weil_bound(r: usize, p: u32) -> f64 {
    (2.0 * r as f64 - 1.0) * (p as f64).sqrt()
}

/// Cap on `p^2 Z` for the direct evaluation of `sigma`.
pub const SIGMA_DIRECT_CAP: u64 = 1 << 32;
/// Largest `r` and `Z` accepted by the expansion over shift multisets.
pub const SIGMA_EXPANDED_MAX_R: u32 = 3;
pub const SIGMA_EXPANDED_MAX_Z: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaReport {
    pub direct: f64,
    /// Present when `r` and `Z` are within the expansion caps.
    pub expanded: Option<f64>,
    /// `Z^{2r} p + Z^r p^2`.
    pub skeleton: f64,
    pub ratio: f64,
}

/// `sigma = sum_{lambda, mu} |sum_z eta_z chi(lambda + z) conj(chi(mu + z))|^{2r}`.
pub fn sigma_direct(chi: &Character, params: &AmplificationParams) -> Result<f64, CharsumError> {
    let f = chi.field();
    let p = f.p() as u64;
    if p * p * params.z as u64 > SIGMA_DIRECT_CAP {
        return Err(CharsumError::TooLarge { what: "p^2 Z" });
    }
    let zs: Vec<u32> = (params.z + 1..=2 * params.z).map(|z| z % f.p()).collect();
    let chis: Vec<Vec<Complex64>> = (0..f.p())
        .map(|l| zs.iter().map(|&z| chi.value(f.add(l, z))).collect())
        .collect();
    let rows: Vec<f64> = (0..f.p() as usize)
        .into_par_iter()
        .map(|l| {
            let mut acc = NeumaierSum::default();
            for m in 0..f.p() as usize {
                let s: Complex64 = (0..zs.len())
                    .map(|j| params.eta[j] * chis[l][j] * chis[m][j].conj())
                    .sum();
                acc.add(s.norm_sqr().powi(params.r as i32));
            }
            acc.value()
        })
        .collect();
    let mut acc = NeumaierSum::default();
    rows.iter().for_each(|&v| acc.add(v));
    Ok(acc.value())
}

/// Multisets of size `r` from `0..z`, as nondecreasing index vectors.
fn multisets(z: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(z: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..z {
            cur.push(i);
            rec(z, r, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(z, r, 0, &mut Vec::new(), &mut out);
    out
}

/// `sigma` by expanding the `2r`-th power: the ordered shift tuples with the
/// same pair of multisets share one complete product sum `P`, so
/// `sigma = sum_{M1, M2} c(M1) conj(c(M2)) |P(M1, M2)|^2` where `c(M)` is the
/// multinomial count of `M` times `prod eta`.
pub fn sigma_expanded(chi: &Character, params: &AmplificationParams) -> Result<f64, CharsumError> {
    if params.r > SIGMA_EXPANDED_MAX_R || params.z > SIGMA_EXPANDED_MAX_Z {
        return Err(CharsumError::TooLarge { what: "Z^{2r} expansion" });
    }
    let f = chi.field();
    let n = f.group_order();
    let r = params.r as usize;
    let z = params.z as usize;
    let shifts: Vec<u32> = (params.z + 1..=2 * params.z).map(|v| v % f.p()).collect();
    let sets = multisets(z, r);
    let fact = |k: usize| (1..=k).product::<usize>() as f64;
    let coeff: Vec<Complex64> = sets
        .iter()
        .map(|m| {
            let mut denom = 1.0;
            let mut run = 1;
            for w in 1..=m.len() {
                if w < m.len() && m[w] == m[w - 1] {
                    run += 1;
                } else {
                    denom *= fact(run);
                    run = 1;
                }
            }
            let eta: Complex64 = m.iter().map(|&i| params.eta[i]).product();
            eta * (fact(r) / denom)
        })
        .collect();
    // Exponent of prod_{i in M} chi(lambda + z_i), or None at a pole.
    let expo: Vec<Vec<Option<u32>>> = sets
        .iter()
        .map(|m| {
            (0..f.p())
                .map(|l| {
                    m.iter().try_fold(0u32, |acc, &i| {
                        chi.exponent(f.add(l, shifts[i])).map(|e| (acc + e) % n)
                    })
                })
                .collect()
        })
        .collect();
    let total: ComplexSum = (0..sets.len())
        .into_par_iter()
        .map(|a| {
            let mut acc = ComplexSum::default();
            for b in 0..sets.len() {
                let mut hist = vec![0u64; n as usize];
                for l in 0..f.p() as usize {
                    if let (Some(x), Some(y)) = (expo[a][l], expo[b][l]) {
                        hist[((x + n - y) % n) as usize] += 1;
                    }
                }
                let pv: Complex64 = hist
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(k, &c)| chi.root(k as u32) * c as f64)
                    .sum();
                acc.add(coeff[a] * coeff[b].conj() * pv.norm_sqr());
            }
            acc.value()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(total.value().re)
}

pub fn sigma_skeleton(p: u32, params: &AmplificationParams) -> f64 {
    let z = params.z as f64;
    let r = params.r as i32;
    let p = p as f64;
    z.powi(2 * r) * p + z.powi(r) * p * p
}

pub fn sigma_total(chi: &Character, params: &AmplificationParams) -> Result<SigmaReport, CharsumError> {
    let direct = sigma_direct(chi, params)?;
    let expanded = match sigma_expanded(chi, params) {
        Ok(v) => Some(v),
        Err(CharsumError::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let skeleton = sigma_skeleton(chi.field().p(), params);
    Ok(SigmaReport {
        direct,
        expanded,
        skeleton,
        ratio: direct / skeleton,
    })
}
