//! Exact additive energies: `E+`, the third moment `E3+`, the generalised
//! `T_k+`, representation functions `r_-` and `r_/`, and the coset
//! statistics of a multiplicative subgroup against a symmetric interval.
//!
//! Every count is an exact integer obtained from cyclic convolutions over
//! `Z/p`. The only floating-point quantity is the Fourier evaluation of
//! `T_k+`, kept as an independent cross-check.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::conv::{cyclic_convolve, cyclic_correlate};
use crate::numeric::NeumaierSum;
use crate::sets::{symmetric_interval, FpSet, SetError, SetTag};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnergyError {
    #[error("sets live in different fields")]
    FieldMismatch,
    #[error("expected k = {expected} sets with k >= 2, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("set is not tagged as a multiplicative subgroup")]
    NotASubgroup,
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplicityKind {
    /// `r_-(A; x) = #{(a, b) : a - b = x}`.
    Difference,
    /// `r_/(A; x) = #{(a, b) : a / b = x, b != 0}`.
    Ratio,
    /// Number of `k`-tuples with prescribed sum.
    KFoldSum(usize),
}

/// Dense representation function over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityFn {
    pub kind: MultiplicityKind,
    pub table: Vec<u128>,
    /// Source tuples that were not counted (pairs with a zero denominator).
    pub excluded: u128,
}

impl MultiplicityFn {
    pub fn get(&self, x: u32) -> u128 {
        self.table[x as usize]
    }

    pub fn total(&self) -> u128 {
        self.table.iter().sum()
    }

    /// `sum_x r(x)^2`.
    pub fn second_moment(&self) -> u128 {
        self.table.iter().map(|&r| r * r).sum()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (u32, u128)> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != 0)
            .map(|(x, &r)| (x as u32, r))
    }
}

fn indicator(a: &FpSet) -> Vec<u128> {
    let mut v = vec![0u128; a.p() as usize];
    for &e in a.elems() {
        v[e as usize] = 1;
    }
    v
}

fn check_fields(sets: &[&FpSet]) -> Result<(), EnergyError> {
    match sets.split_first() {
        Some((first, rest)) if rest.iter().any(|s| s.field() != first.field()) => {
            Err(EnergyError::FieldMismatch)
        }
        _ => Ok(()),
    }
}

pub fn diff_multiplicity(a: &FpSet) -> MultiplicityFn {
    let ind = indicator(a);
    MultiplicityFn {
        kind: MultiplicityKind::Difference,
        table: cyclic_correlate(&ind, &ind),
        excluded: 0,
    }
}

/// `E+(A) = sum_x r_-(A; x)^2`.
pub fn additive_energy(a: &FpSet) -> u128 {
    diff_multiplicity(a).second_moment()
}

/// Mixed energy `sum_x r_-(A; x) r_-(B; x)`.
pub fn mixed_energy(a: &FpSet, b: &FpSet) -> Result<u128, EnergyError> {
    check_fields(&[a, b])?;
    let ra = diff_multiplicity(a);
    let rb = diff_multiplicity(b);
    Ok(ra.table.iter().zip(&rb.table).map(|(x, y)| x * y).sum())
}

/// `E3+(U, V, W) = sum_x r_-(U; x) r_-(V; x) r_-(W; x)`.
pub fn e3(u: &FpSet, v: &FpSet, w: &FpSet) -> Result<u128, EnergyError> {
    check_fields(&[u, v, w])?;
    let ru = diff_multiplicity(u);
    let rv = diff_multiplicity(v);
    let rw = diff_multiplicity(w);
    Ok(ru
        .table
        .iter()
        .zip(&rv.table)
        .zip(&rw.table)
        .map(|((a, b), c)| a * b * c)
        .sum())
}

/// Representation function of `S_1 + ... + S_k` by iterated convolution.
pub fn k_fold_representation(sets: &[&FpSet]) -> Result<MultiplicityFn, EnergyError> {
    check_fields(sets)?;
    let (first, rest) = sets.split_first().ok_or(EnergyError::Arity {
        expected: 1,
        got: 0,
    })?;
    let mut acc = indicator(first);
    for s in rest {
        acc = cyclic_convolve(&acc, &indicator(s));
    }
    Ok(MultiplicityFn {
        kind: MultiplicityKind::KFoldSum(sets.len()),
        table: acc,
        excluded: 0,
    })
}

/// `T_k+(S_1, ..., S_k)`: solutions of `u_1 + ... + u_k = v_1 + ... + v_k`.
pub fn t_k(sets: &[&FpSet], k: usize) -> Result<u128, EnergyError> {
    if k < 2 || sets.len() != k {
        return Err(EnergyError::Arity {
            expected: k,
            got: sets.len(),
        });
    }
    Ok(k_fold_representation(sets)?.second_moment())
}

/// `T_k+(S, ..., S)`.
pub fn t_k_uniform(s: &FpSet, k: usize) -> Result<u128, EnergyError> {
    let sets = vec![s; k];
    t_k(&sets, k)
}

/// `(1/p) sum_lambda prod_j |sum_{v in S_j} e_p(lambda v)|^2`.
pub fn t_k_fourier(sets: &[&FpSet]) -> Result<f64, EnergyError> {
    check_fields(sets)?;
    let Some(first) = sets.first() else {
        return Ok(0.0);
    };
    let p = first.p() as u64;
    let (cos, sin): (Vec<f64>, Vec<f64>) = (0..p)
        .map(|k| {
            let t = TAU * k as f64 / p as f64;
            (t.cos(), t.sin())
        })
        .unzip();
    let mut total = NeumaierSum::default();
    for lambda in 0..p {
        let mut prod = 1.0f64;
        for s in sets {
            let mut re = NeumaierSum::default();
            let mut im = NeumaierSum::default();
            for &v in s.elems() {
                let idx = (lambda * v as u64 % p) as usize;
                re.add(cos[idx]);
                im.add(sin[idx]);
            }
            let (re, im) = (re.value(), im.value());
            prod *= re * re + im * im;
        }
        total.add(prod);
    }
    Ok(total.value() / p as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierCheck {
    pub exact: u128,
    pub fourier: f64,
    pub residual: f64,
}

impl FourierCheck {
    /// Residual relative to the exact count (absolute when the count is 0).
    pub fn relative(&self) -> f64 {
        self.residual / (self.exact as f64).max(1.0)
    }
}

pub fn t_k_fourier_check(sets: &[&FpSet], k: usize) -> Result<FourierCheck, EnergyError> {
    let exact = t_k(sets, k)?;
    let fourier = t_k_fourier(sets)?;
    Ok(FourierCheck {
        exact,
        fourier,
        residual: (exact as f64 - fourier).abs(),
    })
}

/// `r_/(A; x)`; pairs with `b = 0` are skipped and tallied in `excluded`.
pub fn ratio_multiplicity(a: &FpSet) -> MultiplicityFn {
    let f = a.field();
    let p = f.p() as usize;
    let n = f.group_order() as usize;
    let has_zero = a.contains(0);
    let nonzero = a.len() - has_zero as usize;

    // Nonzero ratios through the index map: ind(a/b) = ind a - ind b mod p-1.
    let mut logs = vec![0u128; n];
    for &e in a.elems().iter().filter(|&&e| e != 0) {
        logs[f.ind(e).unwrap() as usize] = 1;
    }
    let by_log = cyclic_correlate(&logs, &logs);
    let mut table = vec![0u128; p];
    for (k, &c) in by_log.iter().enumerate() {
        table[f.pow_g(k as u64) as usize] += c;
    }
    if has_zero {
        table[0] += nonzero as u128;
    }
    MultiplicityFn {
        kind: MultiplicityKind::Ratio,
        table,
        excluded: if has_zero { a.len() as u128 } else { 0 },
    }
}

/// Coset statistics of a subgroup `G` of order `T` against `[-X, X]`.
///
/// Cosets are `C_j = g^j G` for `j < h = (p-1)/T`, re-ordered so that
/// `t_j = r_-(G; x_j)` is nonincreasing; `c_j = #(C_j cap [-X, X])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetStats {
    pub order: u32,
    pub h: u32,
    pub half_width: u32,
    /// Coset labels `j` (with `C_j = g^j G`) in sorted order.
    pub cosets: Vec<u32>,
    pub c: Vec<u64>,
    pub t: Vec<u128>,
    /// `sum_{x in [-X, X], x != 0} r_-(G; x)^2`.
    pub r: u128,
    /// `N(I*, G) = #{(x, y) in ([-X, X] \ {0})^2 : x / y in G}`.
    pub n_ig: u128,
}

impl CosetStats {
    pub fn sum_c_squared(&self) -> u128 {
        self.c.iter().map(|&c| (c as u128) * (c as u128)).sum()
    }

    pub fn sum_t_fourth(&self) -> u128 {
        self.t.iter().map(|&t| t * t * t * t).sum()
    }

    /// `sum c_j^2 <= N(I*, G)`.
    pub fn nig_holds(&self) -> bool {
        self.sum_c_squared() <= self.n_ig
    }

    /// `R^2 <= (sum t_j^4)(sum c_j^2)`.
    pub fn cauchy_holds(&self) -> bool {
        self.r * self.r <= self.sum_t_fourth() * self.sum_c_squared()
    }
}

pub fn coset_interval_stats(g: &FpSet, half_width: u32) -> Result<CosetStats, EnergyError> {
    let SetTag::Subgroup { order } = g.tag() else {
        return Err(EnergyError::NotASubgroup);
    };
    let f = g.field();
    let h = f.group_order() / order;
    let ibar = symmetric_interval(f, half_width)?;
    let istar: Vec<u32> = ibar.elems().iter().copied().filter(|&x| x != 0).collect();
    let diffs = diff_multiplicity(g);

    let mut c = vec![0u64; h as usize];
    for &x in &istar {
        c[(f.ind(x).unwrap() % h) as usize] += 1;
    }
    let t: Vec<u128> = (0..h).map(|j| diffs.get(f.pow_g(j as u64))).collect();

    let mut cosets: Vec<u32> = (0..h).collect();
    cosets.sort_by(|&a, &b| t[b as usize].cmp(&t[a as usize]).then(a.cmp(&b)));

    let r = istar.iter().map(|&x| diffs.get(x).pow(2)).sum();

    let member = ibar.indicator();
    let mut n_ig = 0u128;
    for &y in &istar {
        for &s in g.elems() {
            let x = f.mul(s, y);
            if x != 0 && member[x as usize] {
                n_ig += 1;
            }
        }
    }

    Ok(CosetStats {
        order,
        h,
        half_width,
        c: cosets.iter().map(|&j| c[j as usize]).collect(),
        t: cosets.iter().map(|&j| t[j as usize]).collect(),
        cosets,
        r,
        n_ig,
    })
}

/// `#U #V #W min(#U, #V, #W)`.
pub fn e3_trivial_bound(u: &FpSet, v: &FpSet, w: &FpSet) -> u128 {
    let (a, b, c) = (u.len() as u128, v.len() as u128, w.len() as u128);
    a * b * c * a.min(b).min(c)
}
