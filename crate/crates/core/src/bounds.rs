//! Bound skeletons (explicit right-hand sides with implied constants
//! dropped), exponent-region predicates, and log-log slope fitting.

use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("k = floor(1/zeta) = {k} makes 6k - 8 nonpositive")]
    DegenerateK { k: u64 },
    #[error("outside the domain: {0}")]
    DomainViolation(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("need at least 4 positive rows spanning a decade, got {rows} rows spanning {span:.3}x")]
    InsufficientData { rows: usize, span: f64 },
}

/// `X = p^zeta` and `S = p^xi` (or `T = p^xi`), with an optional degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPoint {
    pub zeta: f64,
    pub xi: f64,
    pub d: Option<u32>,
}

impl ExponentPoint {
    pub fn new(zeta: f64, xi: f64) -> Self {
        Self { zeta, xi, d: None }
    }

    pub fn with_degree(zeta: f64, xi: f64, d: u32) -> Self {
        Self { zeta, xi, d: Some(d) }
    }

    fn in_unit_square(&self) -> Result<(), BoundsError> {
        if self.zeta > 0.0 && self.zeta < 1.0 && self.xi > 0.0 && self.xi < 1.0 {
            Ok(())
        } else {
            Err(BoundsError::DomainViolation(format!(
                "(zeta, xi) = ({}, {}) not in (0,1)^2",
                self.zeta, self.xi
            )))
        }
    }
}

/// A measured quantity against a skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub p: u64,
    pub params: String,
    pub lhs: f64,
    pub skeleton: f64,
    pub ratio: f64,
    pub epsilon: f64,
}

impl BoundReport {
    pub fn new(p: u64, params: impl Into<String>, lhs: f64, skeleton: f64, epsilon: f64) -> Self {
        Self {
            p,
            params: params.into(),
            lhs,
            skeleton,
            ratio: lhs / skeleton,
            epsilon,
        }
    }
}

/// `xi > (3k - 2 - 4k zeta) / (6k - 8)` with `k = floor(1/zeta)`.
pub fn chang_region(pt: ExponentPoint) -> Result<bool, BoundsError> {
    pt.in_unit_square()?;
    let k = (1.0 / pt.zeta).floor();
    if 6.0 * k - 8.0 <= 0.0 {
        return Err(BoundsError::DegenerateK { k: k as u64 });
    }
    Ok(pt.xi > (3.0 * k - 2.0 - 4.0 * k * pt.zeta) / (6.0 * k - 8.0))
}

/// `xi > (1 - zeta) / 2`.
pub fn karatsuba_region(pt: ExponentPoint) -> bool {
    pt.xi > (1.0 - pt.zeta) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionClass {
    Inside,
    Outside,
    OutOfDomain,
}

/// Outcome of the subgroup-region test, with both evaluations kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgroupVerdict {
    pub class: RegionClass,
    /// Threshold on `xi` from the three-piece formula, when defined.
    pub threshold: Option<f64>,
    /// Result of the raw linear conditions.
    pub raw: bool,
    /// `false` when the piecewise and raw answers differ.
    pub agrees: bool,
}

pub const SUBGROUP_BREAKS: [f64; 4] = [6.0 / 25.0, 10.0 / 31.0, 134.0 / 361.0, 0.5];

/// The three-piece threshold for `xi`, defined for `6/25 < zeta < 1/2`.
pub fn subgroup_threshold(zeta: f64) -> Option<f64> {
    let [b0, b1, b2, b3] = SUBGROUP_BREAKS;
    if zeta > b0 && zeta < b1 {
        Some(1.0 - 2.5 * zeta)
    } else if zeta >= b1 && zeta < b2 {
        Some((6.0 - 9.0 * zeta) / 16.0)
    } else if zeta >= b2 && zeta < b3 {
        Some((20.0 - 40.0 * zeta) / 31.0)
    } else {
        None
    }
}

/// `(5z + 2x > 2 and z + x > 1/2)` and
/// `(40z + 31x > 20 or (9z + 16x > 6 and 36z + 55x > 21))`.
pub fn subgroup_raw_conditions(zeta: f64, xi: f64) -> bool {
    let c1 = 5.0 * zeta + 2.0 * xi > 2.0 && zeta + xi > 0.5;
    let c2 = 40.0 * zeta + 31.0 * xi > 20.0;
    let c3 = 9.0 * zeta + 16.0 * xi > 6.0 && 36.0 * zeta + 55.0 * xi > 21.0;
    c1 && (c2 || c3)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Exact piecewise threshold at the exact binary value of `zeta`.
fn subgroup_threshold_exact(zeta: &BigRational) -> Option<BigRational> {
    if *zeta > q(6, 25) && *zeta < q(10, 31) {
        Some(q(1, 1) - q(5, 2) * zeta)
    } else if *zeta >= q(10, 31) && *zeta < q(134, 361) {
        Some((q(6, 1) - q(9, 1) * zeta) / q(16, 1))
    } else if *zeta >= q(134, 361) && *zeta < q(1, 2) {
        Some((q(20, 1) - q(40, 1) * zeta) / q(31, 1))
    } else {
        None
    }
}

fn subgroup_raw_exact(z: &BigRational, x: &BigRational) -> bool {
    let lin = |a: i64, b: i64, c: i64| q(a, 1) * z + q(b, 1) * x > q(c, 1);
    let c1 = lin(5, 2, 2) && z + x > q(1, 2);
    let c2 = lin(40, 31, 20);
    let c3 = lin(9, 16, 6) && lin(36, 55, 21);
    c1 && (c2 || c3)
}

/// Classify against the three-piece threshold and cross-check with the raw
/// conditions. Both are evaluated exactly on the binary values of the
/// inputs, so points on a boundary line are not reported as disagreements
/// through rounding.
pub fn subgroup_region(pt: ExponentPoint) -> Result<SubgroupVerdict, BoundsError> {
    if !(pt.zeta > 0.0 && pt.zeta < 0.5 && pt.xi > 0.0 && pt.xi < 0.4) {
        return Err(BoundsError::DomainViolation(format!(
            "need 0 < zeta < 1/2 and 0 < xi < 2/5, got ({}, {})",
            pt.zeta, pt.xi
        )));
    }
    let z = BigRational::from_float(pt.zeta).expect("finite");
    let x = BigRational::from_float(pt.xi).expect("finite");
    let threshold = subgroup_threshold(pt.zeta);
    let raw = subgroup_raw_exact(&z, &x);
    Ok(match subgroup_threshold_exact(&z) {
        None => SubgroupVerdict {
            class: RegionClass::OutOfDomain,
            threshold,
            raw,
            agrees: true,
        },
        Some(t) => {
            let inside = x > t;
            SubgroupVerdict {
                class: if inside {
                    RegionClass::Inside
                } else {
                    RegionClass::Outside
                },
                threshold,
                raw,
                agrees: inside == raw,
            }
        }
    })
}

/// Region for sums over polynomial images of primes:
/// `(1 + c_d) zeta + 2 xi > 1` and `zeta + 5 xi / 2 > 1`, where `c_2 = 1/4`
/// and `c_d = 2^{1-d}` for `d >= 3`.
pub fn primes_region(pt: ExponentPoint) -> Result<bool, BoundsError> {
    let d = pt.d.unwrap_or(2);
    if d < 2 {
        return Err(BoundsError::DomainViolation(format!("degree {d} < 2")));
    }
    let cap = 0.5f64.min(2.0 - 2.0 * pt.zeta);
    if !(pt.zeta > 0.0 && pt.xi > 0.0 && pt.xi <= cap) {
        return Err(BoundsError::DomainViolation(format!(
            "need 0 < xi <= min(1/2, 2 - 2 zeta) = {cap}, got ({}, {})",
            pt.zeta, pt.xi
        )));
    }
    let c = if d == 2 { 0.25 } else { 2f64.powi(1 - d as i32) };
    Ok((1.0 + c) * pt.zeta + 2.0 * pt.xi > 1.0 && pt.zeta + 2.5 * pt.xi > 1.0)
}

/// Inputs to the main bilinear-sum bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainBoundInput {
    pub p: u64,
    pub s: u64,
    pub x: u64,
    pub r: u32,
    pub epsilon: f64,
}

impl MainBoundInput {
    /// `S^2 X <= p^2`, `X < p^{1/2}`, `X >= p^{1/r}`, checked in integers.
    pub fn check(&self) -> Result<(), BoundsError> {
        let (p, s, x) = (self.p as u128, self.s as u128, self.x as u128);
        if self.r == 0 || self.s == 0 || self.x == 0 {
            return Err(BoundsError::PreconditionViolated("S, X, r >= 1"));
        }
        if s * s * x > p * p {
            return Err(BoundsError::PreconditionViolated("S^2 X <= p^2"));
        }
        if x * x >= p {
            return Err(BoundsError::PreconditionViolated("X < p^{1/2}"));
        }
        if x.checked_pow(self.r).is_some_and(|v| v < p) {
            return Err(BoundsError::PreconditionViolated("X >= p^{1/r}"));
        }
        Ok(())
    }

    fn assemble(&self, first: f64) -> f64 {
        let p = self.p as f64;
        let s = self.s as f64;
        let x = self.x as f64;
        let r = self.r as f64;
        let pr2 = p.powf((r + 2.0) / r);
        let inner = first + pr2 / (s * x.powf(2.5)) + pr2 / (s * s * x * x);
        s * x * inner.powf(1.0 / (4.0 * r)) * p.powf(self.epsilon) + s.sqrt() * x
    }

    fn pr1(&self) -> f64 {
        let r = self.r as f64;
        (self.p as f64).powf((r + 1.0) / r)
    }
}

/// `SX (E3 p^{(r+1)/r} / (S^4 X^3) + p^{(r+2)/r} / (S X^{5/2})
///  + p^{(r+2)/r} / (S^2 X^2))^{1/4r} p^eps + S^{1/2} X`.
pub fn main_bound_rhs(input: &MainBoundInput, e3: f64) -> Result<f64, BoundsError> {
    input.check()?;
    let (s, x) = (input.s as f64, input.x as f64);
    Ok(input.assemble(e3 * input.pr1() / (s.powi(4) * x.powi(3))))
}

/// The same bound with `E3` replaced by `S^2 X min(S, X)`.
pub fn trivial_energy_rhs(input: &MainBoundInput) -> Result<f64, BoundsError> {
    input.check()?;
    let (s, x) = (input.s as f64, input.x as f64);
    let m = s.min(x);
    Ok(input.assemble(m * input.pr1() / (s * s * x * x)))
}

/// The same bound with `E3` replaced by `X E(S)`.
pub fn additive_energy_rhs(input: &MainBoundInput, energy: f64) -> Result<f64, BoundsError> {
    input.check()?;
    let (s, x) = (input.s as f64, input.x as f64);
    Ok(input.assemble(energy * input.pr1() / (s.powi(4) * x * x)))
}

/// The three collinear-triple skeletons and their minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSkeletons {
    pub first: f64,
    pub second: f64,
    pub third: f64,
    pub min: f64,
}

/// With `P = abc` and `Z = max(a, b, c)`:
/// `pP`, `P^{3/2} + PZ`, `p^{1/2} P^{7/6} + Z^4`.
pub fn triple_skeletons(p: u64, a: u64, b: u64, c: u64) -> TripleSkeletons {
    let prod = (a * b * c) as f64;
    let z = a.max(b).max(c) as f64;
    let p = p as f64;
    let first = p * prod;
    let second = prod.powf(1.5) + prod * z;
    let third = p.sqrt() * prod.powf(7.0 / 6.0) + z.powi(4);
    TripleSkeletons {
        first,
        second,
        third,
        min: first.min(second).min(third),
    }
}

/// `Y E3 + S^3 X^{3/2} + S^2 X^2`.
pub fn count_n_skeleton(y: u64, e3: f64, s: u64, x: u64) -> f64 {
    let (s, x) = (s as f64, x as f64);
    y as f64 * e3 + s.powi(3) * x.powf(1.5) + s * s * x * x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgroupSkeletons {
    /// `T^{49/20} X`.
    pub first: f64,
    /// `T^2 X + T^{4/3} X^{3/2} + T^{11/6} X^2 p^{-1/2} + T^{41/24} X^{3/2} p^{-1/8}`.
    pub second: f64,
    /// `T > p^{2/5}`.
    pub flagged: bool,
}

pub fn subgroup_e3_skeletons(p: u64, t: u64, x: u64) -> SubgroupSkeletons {
    let (pf, tf, xf) = (p as f64, t as f64, x as f64);
    let first = tf.powf(49.0 / 20.0) * xf;
    let second = tf * tf * xf
        + tf.powf(4.0 / 3.0) * xf.powf(1.5)
        + tf.powf(11.0 / 6.0) * xf * xf / pf.sqrt()
        + tf.powf(41.0 / 24.0) * xf.powf(1.5) / pf.powf(0.125);
    let flagged = (t as u128).pow(5) > (p as u128).pow(2);
    SubgroupSkeletons {
        first,
        second,
        flagged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolySkeletons {
    /// `k` in the `T_k` energy the first skeleton controls.
    pub t_index: usize,
    pub t_skeleton: f64,
    pub energy_skeleton: f64,
}

/// Energy skeletons for `f([1, X])` with `deg f = d`: `X^{9/2}` and
/// `X^{11/4}` for `d = 2`; `X^{2^{d-1}+1/2}` and `X^{3-2^{1-d}}` otherwise.
pub fn poly_energy_skeletons(p: u64, x: u64, d: u32) -> Result<PolySkeletons, BoundsError> {
    if d < 2 {
        return Err(BoundsError::DomainViolation(format!("degree {d} < 2")));
    }
    if (x as u128).pow(3) > (p as u128).pow(2) {
        return Err(BoundsError::DomainViolation(format!(
            "X = {x} exceeds p^(2/3) for p = {p}"
        )));
    }
    let xf = x as f64;
    Ok(if d == 2 {
        PolySkeletons {
            t_index: 3,
            t_skeleton: xf.powf(4.5),
            energy_skeleton: xf.powf(2.75),
        }
    } else {
        PolySkeletons {
            t_index: (1usize << (d - 2)) + 1,
            t_skeleton: xf.powf(2f64.powi(d as i32 - 1) + 0.5),
            energy_skeleton: xf.powf(3.0 - 2f64.powi(1 - d as i32)),
        }
    })
}

/// `T_k(f(A))` skeleton in terms of `n = #A`, `#(A+A)` and `#(A-A)`:
/// `(n^2 #(A+A))^2 / p + (n^2 #(A+A))^{3/2}` for `d = 2`, and
/// `D^{2^{d-1}-2} (n #(A+A))^2 / p + D^{2^{d-1}-5/2} (n #(A+A))^{3/2}`
/// with `D = #(A-A)` for `d >= 3`.
pub fn poly_image_t_skeleton(p: u64, d: u32, n: u64, sum: u64, diff: u64) -> f64 {
    let p = p as f64;
    let (n, sum, diff) = (n as f64, sum as f64, diff as f64);
    if d <= 2 {
        let q = n * n * sum;
        q * q / p + q.powf(1.5)
    } else {
        let e = 2f64.powi(d as i32 - 1);
        let q = n * sum;
        diff.powf(e - 2.0) * q * q / p + diff.powf(e - 2.5) * q.powf(1.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub rows: usize,
}

/// Least-squares slope of `ln(quantity)` against `ln(driver)`.
///
/// Rows with a nonpositive coordinate are dropped before the size checks.
pub fn exponent_fit(rows: &[(f64, f64)]) -> Result<SlopeFit, BoundsError> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(d, q)| *d > 0.0 && *q > 0.0 && d.is_finite() && q.is_finite())
        .map(|(d, q)| (d.ln(), q.ln()))
        .collect();
    let lo = pts.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let span = if pts.is_empty() { 1.0 } else { (hi - lo).exp() };
    if pts.len() < 4 || span < 10.0 {
        return Err(BoundsError::InsufficientData {
            rows: pts.len(),
            span,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|t| t.0).sum::<f64>() / n;
    let my = pts.iter().map(|t| t.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|t| (t.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|t| (t.0 - mx) * (t.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|t| (t.1 - intercept - slope * t.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        rows: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = 1e-9;

    #[test]
    fn chang_diagonal_flip() {
        let t = 7.0 / 22.0;
        assert!(chang_region(ExponentPoint::new(t + H, t + H)).unwrap());
        assert!(!chang_region(ExponentPoint::new(t - H, t - H)).unwrap());
        assert_eq!(
            chang_region(ExponentPoint::new(0.9, 0.5)),
            Err(BoundsError::DegenerateK { k: 1 })
        );
        // k = 3: threshold (7 - 12 * 0.26) / 10 = 0.388.
        assert!(chang_region(ExponentPoint::new(0.26, 0.4)).unwrap());
        assert!(!chang_region(ExponentPoint::new(0.26, 0.388 - 1e-6)).unwrap());
    }

    #[test]
    fn karatsuba_diagonal_flip() {
        let t = 1.0 / 3.0;
        assert!(karatsuba_region(ExponentPoint::new(t + H, t + H)));
        assert!(!karatsuba_region(ExponentPoint::new(t - H, t - H)));
        assert!(karatsuba_region(ExponentPoint::new(1.0, 1e-6)));
    }

    #[test]
    fn karatsuba_wins_in_window() {
        for i in 1..200 {
            let zeta = 0.25 + (2.0 / 7.0 - 0.25) * i as f64 / 200.0;
            for j in 1..200 {
                let xi = j as f64 / 200.0;
                let pt = ExponentPoint::new(zeta, xi);
                if chang_region(pt).unwrap() {
                    assert!(karatsuba_region(pt), "{zeta} {xi}");
                }
            }
        }
    }

    #[test]
    fn subgroup_examples() {
        let t = 2.0 / 7.0 + 1e-6;
        let v = subgroup_region(ExponentPoint::new(t, t)).unwrap();
        assert_eq!(v.class, RegionClass::Inside);
        assert!(v.agrees);
        let v = subgroup_region(ExponentPoint::new(0.23, 0.3)).unwrap();
        assert_eq!(v.class, RegionClass::OutOfDomain);
        let b: f64 = 10.0 / 31.0;
        assert!((1.0 - 2.5 * b - (6.0 - 9.0 * b) / 16.0).abs() < 1e-12);
        let b: f64 = 134.0 / 361.0;
        assert!(((6.0 - 9.0 * b) / 16.0 - (20.0 - 40.0 * b) / 31.0).abs() < 1e-12);
        assert!(matches!(
            subgroup_region(ExponentPoint::new(0.3, 0.45)),
            Err(BoundsError::DomainViolation(_))
        ));
    }

    #[test]
    fn subgroup_grid_agrees() {
        let mut disagreements = 0;
        for i in 1..200 {
            for j in 1..200 {
                let pt = ExponentPoint::new(0.5 * i as f64 / 200.0, 0.4 * j as f64 / 200.0);
                let v = subgroup_region(pt).unwrap();
                if !v.agrees {
                    disagreements += 1;
                }
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn primes_examples() {
        assert!(primes_region(ExponentPoint::with_degree(0.4, 0.4, 2)).unwrap());
        assert!(primes_region(ExponentPoint::with_degree(0.4, 0.35, 3)).unwrap());
        assert!(matches!(
            primes_region(ExponentPoint::with_degree(0.4, 0.6, 2)),
            Err(BoundsError::DomainViolation(_))
        ));
        assert!(matches!(
            primes_region(ExponentPoint::with_degree(0.4, 0.3, 1)),
            Err(BoundsError::DomainViolation(_))
        ));
    }

    #[test]
    fn main_bound_preconditions() {
        let ok = MainBoundInput { p: 4093, s: 40, x: 20, r: 3, epsilon: 0.0 };
        assert!(ok.check().is_ok());
        let bad = MainBoundInput { x: 64, ..ok };
        assert_eq!(bad.check(), Err(BoundsError::PreconditionViolated("X < p^{1/2}")));
        let bad = MainBoundInput { x: 15, ..ok };
        assert_eq!(bad.check(), Err(BoundsError::PreconditionViolated("X >= p^{1/r}")));
        let bad = MainBoundInput { s: 1000, ..ok };
        assert_eq!(bad.check(), Err(BoundsError::PreconditionViolated("S^2 X <= p^2")));
    }

    #[test]
    fn trivial_energy_matches_substitution() {
        let input = MainBoundInput { p: 4093, s: 40, x: 20, r: 3, epsilon: 0.0 };
        let trivial = (40.0 * 40.0 * 20.0 * 20.0) as f64;
        let a = main_bound_rhs(&input, trivial).unwrap();
        let b = trivial_energy_rhs(&input).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        assert!(main_bound_rhs(&input, trivial / 3.0).unwrap() <= b);
        // E3 = X E(S) turns the main bound into the additive-energy form.
        let e = 12345.0;
        let c = main_bound_rhs(&input, 20.0 * e).unwrap();
        let d = additive_energy_rhs(&input, e).unwrap();
        assert!((c - d).abs() <= 1e-12 * c);
    }

    #[test]
    fn triple_skeleton_examples() {
        let t = triple_skeletons(5, 1, 1, 1);
        assert_eq!((t.first, t.second), (5.0, 2.0));
        assert!((t.third - (5f64.sqrt() + 1.0)).abs() < 1e-12);
        assert_eq!(t.min, 2.0);
        let t = triple_skeletons(11, 5, 5, 5);
        assert!(t.first <= t.second);
    }

    #[test]
    fn subgroup_skeletons() {
        let s = subgroup_e3_skeletons(61, 1, 7);
        assert_eq!(s.first, 7.0);
        assert!(!s.flagged);
        assert!(subgroup_e3_skeletons(61, 6, 7).flagged);
    }

    #[test]
    fn poly_skeletons() {
        let s = poly_energy_skeletons(1_000_003, 16, 2).unwrap();
        assert_eq!(s.t_index, 3);
        assert!((s.t_skeleton - 16f64.powf(4.5)).abs() < 1e-6);
        assert!((s.energy_skeleton - 16f64.powf(2.75)).abs() < 1e-9);
        let s = poly_energy_skeletons(1_000_003, 16, 3).unwrap();
        assert_eq!(s.t_index, 3);
        assert!((s.t_skeleton - 16f64.powf(4.5)).abs() < 1e-6);
        assert!((s.energy_skeleton - 16f64.powf(2.75)).abs() < 1e-9);
        assert_eq!(poly_energy_skeletons(1_000_003, 16, 4).unwrap().t_index, 5);
        assert!(matches!(
            poly_energy_skeletons(61, 16, 2),
            Err(BoundsError::DomainViolation(_))
        ));
    }

    #[test]
    fn fits() {
        let rows: Vec<(f64, f64)> = (4..10).map(|k| (2f64.powi(k), 7.0)).collect();
        assert!(exponent_fit(&rows).unwrap().slope.abs() < 1e-12);
        let rows: Vec<(f64, f64)> = (4..10).map(|k| (2f64.powi(k), 4f64.powi(k))).collect();
        assert!((exponent_fit(&rows).unwrap().slope - 2.0).abs() < 1e-9);
        assert!(matches!(
            exponent_fit(&rows[..3]),
            Err(BoundsError::InsufficientData { rows: 3, .. })
        ));
        let narrow: Vec<(f64, f64)> = (0..6).map(|k| (10.0 + k as f64, 1.0)).collect();
        assert!(matches!(exponent_fit(&narrow), Err(BoundsError::InsufficientData { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn skeletons_monotone(p in 5u64..10_000, a in 1u64..50, b in 1u64..50, c in 1u64..50, bump in 1u64..10) {
                let t0 = triple_skeletons(p, a, b, c);
                let t1 = triple_skeletons(p, a + bump, b, c);
                prop_assert!(t1.first >= t0.first && t1.second >= t0.second && t1.third >= t0.third);
                let s0 = subgroup_e3_skeletons(p, a, b);
                let s1 = subgroup_e3_skeletons(p, a + bump, b + bump);
                prop_assert!(s1.first >= s0.first && s1.second >= s0.second);
                prop_assert!(count_n_skeleton(a + bump, 10.0, b, c) >= count_n_skeleton(a, 10.0, b, c));
            }

            #[test]
            fn regions_total(z in 0.001f64..0.999, x in 0.001f64..0.999) {
                let pt = ExponentPoint::new(z, x);
                let _ = karatsuba_region(pt);
                if (1.0 / z).floor() >= 2.0 {
                    prop_assert!(chang_region(pt).is_ok());
                }
            }
        }
    }
}
