//! Lines of `F_p^2` and their multiplicity spectra on Cartesian squares
//! `A x A`, collinear-triple counts `T(A, B, C)`, and point-plane incidences
//! in `F_p^3`.

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{is_prime, pow_mod, PrimeField};
use crate::sets::FpSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("sets live in different fields")]
    FieldMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} is too large for a dense computation (max {max})")]
    TooLarge { p: u64, max: u64 },
    #[error("duplicate {0} in input")]
    Duplicates(&'static str),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// An affine line of `F_p^2`: `y = slope * x + intercept` or `x = c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line {
    Sloped { slope: u32, intercept: u32 },
    Vertical { c: u32 },
}

impl Line {
    /// Number of lines in `F_p^2`.
    pub fn count(p: u32) -> u64 {
        p as u64 * p as u64 + p as u64
    }

    /// Bijection onto `0..p^2 + p`.
    pub fn index(&self, p: u32) -> u64 {
        match *self {
            Line::Sloped { slope, intercept } => slope as u64 * p as u64 + intercept as u64,
            Line::Vertical { c } => p as u64 * p as u64 + c as u64,
        }
    }

    pub fn from_index(idx: u64, p: u32) -> Line {
        let pp = p as u64 * p as u64;
        if idx < pp {
            Line::Sloped {
                slope: (idx / p as u64) as u32,
                intercept: (idx % p as u64) as u32,
            }
        } else {
            Line::Vertical {
                c: (idx - pp) as u32,
            }
        }
    }

    pub fn all(p: u32) -> impl Iterator<Item = Line> {
        (0..Line::count(p)).map(move |i| Line::from_index(i, p))
    }

    /// The line through `q` in direction class `dir` (`dir = p` is
    /// vertical, otherwise `dir` is the slope).
    fn through(field: &PrimeField, q: (u32, u32), dir: u32) -> Line {
        if dir == field.p() {
            Line::Vertical { c: q.0 }
        } else {
            Line::Sloped {
                slope: dir,
                intercept: field.sub(q.1, field.mul(dir, q.0)),
            }
        }
    }

    /// The unique line through two distinct points.
    pub fn joining(field: &PrimeField, q: (u32, u32), r: (u32, u32)) -> Option<Line> {
        (q != r).then(|| Line::through(field, q, direction(field, q, r)))
    }

    pub fn contains(&self, field: &PrimeField, pt: (u32, u32)) -> bool {
        match *self {
            Line::Sloped { slope, intercept } => {
                field.add(field.mul(slope, pt.0), intercept) == pt.1
            }
            Line::Vertical { c } => pt.0 == c,
        }
    }

    /// Slope neither `0` nor infinite.
    pub fn is_axis_parallel(&self) -> bool {
        matches!(self, Line::Vertical { .. } | Line::Sloped { slope: 0, .. })
    }

    /// `#(line cap S^2)` given the membership table of `S`.
    fn iota(&self, field: &PrimeField, s: &FpSet, member: &[bool]) -> u32 {
        match *self {
            Line::Vertical { c } => {
                if member[c as usize] {
                    s.len() as u32
                } else {
                    0
                }
            }
            Line::Sloped { slope, intercept } => s
                .elems()
                .iter()
                .filter(|&&x| member[field.add(field.mul(slope, x), intercept) as usize])
                .count() as u32,
        }
    }
}

#[inline]
fn direction(field: &PrimeField, q: (u32, u32), r: (u32, u32)) -> u32 {
    let dx = field.sub(r.0, q.0);
    let dy = field.sub(r.1, q.1);
    match field.inv(dx) {
        Some(inv) => field.mul(dy, inv),
        None => field.p(),
    }
}

/// Multiplicities `iota_A(l) = #(l cap A^2)`.
///
/// Lines with at least two points are listed explicitly; the full
/// distribution (including the many lines with 0 or 1 points) is kept as a
/// histogram indexed by multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSpectrum {
    pub p: u32,
    pub size: usize,
    /// Lines with `iota >= 2`, sorted.
    pub rich: Vec<(Line, u32)>,
    /// `hist[k]` = number of lines with `iota = k`, for `k = 0..=#A`.
    pub hist: Vec<u64>,
}

impl LineSpectrum {
    /// `sum_l iota_A(l)`.
    pub fn total_mass(&self) -> u128 {
        self.hist
            .iter()
            .enumerate()
            .map(|(k, &c)| k as u128 * c as u128)
            .sum()
    }

    pub fn line_count(&self) -> u64 {
        self.hist.iter().sum()
    }

    /// `p^2 sum_l |f_A(l)|^2 = sum_l (p iota_A(l) - #A^2)^2`, exact.
    pub fn scaled_f_square_sum(&self) -> u128 {
        let n2 = (self.size * self.size) as i128;
        self.hist
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let d = self.p as i128 * k as i128 - n2;
                (d * d) as u128 * c as u128
            })
            .sum()
    }

    /// `f_A(l) = iota_A(l) - #A^2 / p` as an exact rational.
    pub fn f_value(&self, iota: u32) -> Ratio<i128> {
        Ratio::new(
            self.p as i128 * iota as i128 - (self.size * self.size) as i128,
            self.p as i128,
        )
    }
}

fn square_points(a: &FpSet) -> Vec<(u32, u32)> {
    let e = a.elems();
    e.iter()
        .flat_map(|&x| e.iter().map(move |&y| (x, y)))
        .collect()
}

/// Spectrum by pair hashing over `A^2`, `O(#A^4)`: for every point `q`, the
/// other points are bucketed by direction; a bucket with `c` points is the
/// line through `q` with multiplicity `c + 1`, recorded only when `q` is its
/// smallest point.
pub fn line_spectrum_pairs(a: &FpSet) -> LineSpectrum {
    let f = a.field();
    let p = f.p();
    let pts = square_points(a);
    let n = a.len();
    let mut hist = vec![0u64; n + 1];

    let per_point: Vec<(Vec<(Line, u32)>, u64)> = (0..pts.len())
        .into_par_iter()
        .map_init(
            || (vec![0u32; p as usize + 1], vec![false; p as usize + 1], Vec::new()),
            |(cnt, smaller, touched), i| {
                let q = pts[i];
                for (j, &r) in pts.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let d = direction(f, q, r) as usize;
                    if cnt[d] == 0 {
                        touched.push(d);
                    }
                    cnt[d] += 1;
                    if j < i {
                        smaller[d] = true;
                    }
                }
                let mut lines = Vec::new();
                for &d in touched.iter() {
                    if !smaller[d] {
                        lines.push((Line::through(f, q, d as u32), cnt[d] + 1));
                    }
                }
                let singles = (p as u64 + 1) - touched.len() as u64;
                for &d in touched.iter() {
                    cnt[d] = 0;
                    smaller[d] = false;
                }
                touched.clear();
                (lines, singles)
            },
        )
        .collect();

    let mut rich = Vec::new();
    for (lines, singles) in per_point {
        if n >= 1 {
            hist[1] += singles;
        }
        for (l, k) in lines {
            hist[k as usize] += 1;
            rich.push((l, k));
        }
    }
    rich.sort_unstable();
    hist[0] = Line::count(p) - hist.iter().skip(1).sum::<u64>();
    LineSpectrum {
        p,
        size: n,
        rich,
        hist,
    }
}

/// `iota_A(l)` for every line, indexed by [`Line::index`].
pub fn dense_iota(a: &FpSet) -> Vec<u32> {
    let f = a.field();
    let p = f.p();
    let member = a.indicator();
    (0..Line::count(p))
        .into_par_iter()
        .map(|i| Line::from_index(i, p).iota(f, a, &member))
        .collect()
}

/// Spectrum by visiting all `p^2 + p` lines, `O(p^2 #A)`.
pub fn line_spectrum_dense(a: &FpSet) -> LineSpectrum {
    let p = a.p();
    let iota = dense_iota(a);
    let mut hist = vec![0u64; a.len() + 1];
    let mut rich = Vec::new();
    for (i, &k) in iota.iter().enumerate() {
        hist[k as usize] += 1;
        if k >= 2 {
            rich.push((Line::from_index(i as u64, p), k));
        }
    }
    rich.sort_unstable();
    LineSpectrum {
        p,
        size: a.len(),
        rich,
        hist,
    }
}

/// Line spectrum by whichever of the two routes is cheaper.
pub fn line_spectrum(a: &FpSet) -> LineSpectrum {
    let n = a.len() as f64;
    let p = a.p() as f64;
    if n.powi(3) <= p * p {
        line_spectrum_pairs(a)
    } else {
        line_spectrum_dense(a)
    }
}

/// Both sides of `sum_l iota_A iota_B = (#A #B)^2 + p #(A^2 cap B^2)`.
pub fn pair_spectrum_identity(a: &FpSet, b: &FpSet) -> Result<(u128, u128), GeometryError> {
    if a.field() != b.field() {
        return Err(GeometryError::FieldMismatch);
    }
    let ia = dense_iota(a);
    let ib = dense_iota(b);
    let lhs = ia
        .iter()
        .zip(&ib)
        .map(|(&x, &y)| x as u128 * y as u128)
        .sum();
    let common = a.intersection(b).expect("same field").len() as u128;
    let na = a.len() as u128;
    let nb = b.len() as u128;
    let rhs = (na * nb).pow(2) + a.p() as u128 * common * common;
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSets {
    /// `#{l : M < iota_A(l) <= 2M}`.
    pub l_count: u64,
    /// `#{l : |f_A(l)| > M}`.
    pub k_count: u64,
    /// `min(p #A^2 / M^2, #A^5 / M^4)`.
    pub skeleton: f64,
}

pub fn level_set_counts(spec: &LineSpectrum, m: f64) -> LevelSets {
    let p = spec.p as f64;
    let n2 = (spec.size * spec.size) as i128;
    let mut l_count = 0;
    let mut k_count = 0;
    for (k, &c) in spec.hist.iter().enumerate() {
        let kf = k as f64;
        if m < kf && kf <= 2.0 * m {
            l_count += c;
        }
        let dev = (spec.p as i128 * k as i128 - n2).unsigned_abs() as f64;
        if dev > m * p {
            k_count += c;
        }
    }
    let n = spec.size as f64;
    LevelSets {
        l_count,
        k_count,
        skeleton: (p * n * n / (m * m)).min(n.powi(5) / m.powi(4)),
    }
}

/// Which 6-tuples `T(A, B, C)` counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TripleConvention {
    /// `(a1 - c1)(b2 - c2) = (a2 - c2)(b1 - c1)` with `b1 != c1`, `b2 != c2`.
    #[default]
    CrossMultiplied,
    /// Every triple of points of `A^2 x B^2 x C^2` on a common line,
    /// coincident points included.
    Geometric,
}

/// `T(A, B, C)` under the default (cross-multiplied) convention.
pub fn collinear_triples(a: &FpSet, b: &FpSet, c: &FpSet) -> Result<u128, GeometryError> {
    collinear_triples_with(a, b, c, TripleConvention::CrossMultiplied)
}

/// Which enumeration strategy the fast path uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleRoute {
    /// Candidate lines from pairs `(b, c)`, `O(#B^2 #C^2)`.
    Pairs,
    /// All lines, `O(p^2 (#A + #B + #C))`.
    Dense,
}

pub fn collinear_triples_with(
    a: &FpSet,
    b: &FpSet,
    c: &FpSet,
    conv: TripleConvention,
) -> Result<u128, GeometryError> {
    let nb = b.len() as f64;
    let nc = c.len() as f64;
    let p = a.p() as f64;
    let sum = (a.len() + b.len() + c.len()) as f64;
    let route = if nb * nb * nc * nc <= p * p * sum {
        TripleRoute::Pairs
    } else {
        TripleRoute::Dense
    };
    collinear_triples_via(a, b, c, conv, route)
}

/// Fast `T(A, B, C)`.
///
/// A tuple with `b != c` puts `a` on the line `l = bc`, so with `D = B cap C`
/// the count is `sum_l iota_A (iota_B iota_C - iota_D)` over the admissible
/// lines; the subtracted term removes the coincident pairs `b = c`, which lie
/// on every line through that point. The cross-multiplied form admits only
/// lines that are neither horizontal nor vertical (`b1 != c1`, `b2 != c2`);
/// the geometric form admits every line and adds the `#A^2 #D^2` tuples with
/// `b = c`, which are collinear with any `a`.
pub fn collinear_triples_via(
    a: &FpSet,
    b: &FpSet,
    c: &FpSet,
    conv: TripleConvention,
    route: TripleRoute,
) -> Result<u128, GeometryError> {
    if a.field() != b.field() || a.field() != c.field() {
        return Err(GeometryError::FieldMismatch);
    }
    let f = a.field();
    let p = f.p();
    let d = b.intersection(c).expect("same field");
    let (ma, mb, mc, md) = (a.indicator(), b.indicator(), c.indicator(), d.indicator());
    let admissible = |l: &Line| conv == TripleConvention::Geometric || !l.is_axis_parallel();
    let weight = |l: &Line| -> u128 {
        let ia = l.iota(f, a, &ma) as u128;
        if ia == 0 {
            return 0;
        }
        let ib = l.iota(f, b, &mb) as u128;
        let ic = l.iota(f, c, &mc) as u128;
        let id = l.iota(f, &d, &md) as u128;
        ia * (ib * ic - id)
    };

    let main: u128 = match route {
        TripleRoute::Dense => (0..Line::count(p))
            .into_par_iter()
            .map(|i| Line::from_index(i, p))
            .filter(|l| admissible(l))
            .map(|l| weight(&l))
            .sum(),
        TripleRoute::Pairs => {
            let pb = square_points(b);
            let pc = square_points(c);
            let mut lines: Vec<u64> = pb
                .par_iter()
                .flat_map_iter(|&q| {
                    pc.iter()
                        .filter_map(move |&r| Line::joining(f, q, r))
                        .filter(|l| admissible(l))
                        .map(|l| l.index(p))
                        .collect::<Vec<_>>()
                })
                .collect();
            lines.par_sort_unstable();
            lines.dedup();
            lines
                .par_iter()
                .map(|&i| weight(&Line::from_index(i, p)))
                .sum()
        }
    };
    let extra = match conv {
        TripleConvention::CrossMultiplied => 0,
        TripleConvention::Geometric => (a.len() as u128).pow(2) * (d.len() as u128).pow(2),
    };
    Ok(main + extra)
}

/// A point of `F_p^3`.
pub type Point3 = [u32; 3];

/// Plane `n . z = c` with the first nonzero coordinate of `n` equal to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane {
    pub normal: [u32; 3],
    pub c: u32,
}

fn inv_mod(x: u64, p: u64) -> u64 {
    pow_mod(x, p - 2, p)
}

impl Plane {
    /// Normalise `n . z = c`; `None` when `n = 0`.
    pub fn new(p: u32, normal: [u32; 3], c: u32) -> Option<Plane> {
        let p64 = p as u64;
        let lead = normal.iter().copied().find(|&v| v % p != 0)? as u64 % p64;
        let s = inv_mod(lead, p64);
        let scale = |v: u32| (v as u64 % p64 * s % p64) as u32;
        Some(Plane {
            normal: normal.map(scale),
            c: scale(c),
        })
    }

    pub fn contains(&self, p: u32, q: &Point3) -> bool {
        let p = p as u64;
        let lhs = (0..3).fold(0u64, |acc, i| (acc + self.normal[i] as u64 * q[i] as u64) % p);
        lhs == self.c as u64 % p
    }

    /// All `p (p^2 + p + 1)` planes, in a fixed order.
    pub fn all(p: u32) -> Vec<Plane> {
        let mut normals = Vec::new();
        for b in 0..p {
            for c in 0..p {
                normals.push([1, b, c]);
            }
        }
        for c in 0..p {
            normals.push([0, 1, c]);
        }
        normals.push([0, 0, 1]);
        normals
            .into_iter()
            .flat_map(|normal| (0..p).map(move |c| Plane { normal, c }))
            .collect()
    }
}

/// All `p^3` points, `x + p y + p^2 z` order.
pub fn all_points(p: u32) -> Vec<Point3> {
    let mut out = Vec::with_capacity((p as usize).pow(3));
    for z in 0..p {
        for y in 0..p {
            for x in 0..p {
                out.push([x, y, z]);
            }
        }
    }
    out
}

fn require_prime(p: u32) -> Result<(), GeometryError> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(GeometryError::NotPrime(p as u64))
    }
}

fn require_distinct<T: Ord + Clone>(items: &[T], what: &'static str) -> Result<(), GeometryError> {
    let mut v = items.to_vec();
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        Err(GeometryError::Duplicates(what))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidences {
    pub count: u128,
    /// `count - #Q #Pi / p`, exact.
    pub residual: Ratio<i128>,
}

pub fn incidence_count(
    p: u32,
    points: &[Point3],
    planes: &[Plane],
) -> Result<Incidences, GeometryError> {
    require_prime(p)?;
    require_distinct(points, "points")?;
    require_distinct(planes, "planes")?;
    let count: u128 = planes
        .par_iter()
        .map(|pl| points.iter().filter(|q| pl.contains(p, q)).count() as u128)
        .sum();
    let residual = Ratio::new(
        count as i128 * p as i128 - points.len() as i128 * planes.len() as i128,
        p as i128,
    );
    Ok(Incidences { count, residual })
}

/// Largest value of `p` accepted by [`gram_structure_check`].
pub const GRAM_MAX_P: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GramCheck {
    pub p: u32,
    pub diagonal: u64,
    pub off_diagonal: u64,
    /// `max |(G G^t)_{q q'} - (p^2 [q = q'] + p + 1)|`.
    pub max_deviation: u64,
}

/// Build the full `p^3 x p(p^2+p+1)` incidence matrix `G` and compare
/// `G G^t` with `p^2 Id + (p + 1) J`.
pub fn gram_structure_check(p: u32) -> Result<GramCheck, GeometryError> {
    require_prime(p)?;
    if p > GRAM_MAX_P {
        return Err(GeometryError::TooLarge {
            p: p as u64,
            max: GRAM_MAX_P as u64,
        });
    }
    let points = all_points(p);
    let planes = Plane::all(p);
    let rows = points.len();
    let cols = planes.len();
    let mut g = vec![0u8; rows * cols];
    for (i, q) in points.iter().enumerate() {
        for (j, pl) in planes.iter().enumerate() {
            g[i * cols + j] = pl.contains(p, q) as u8;
        }
    }
    let mut gram = vec![0u64; rows * rows];
    for j in 0..cols {
        let on: Vec<usize> = (0..rows).filter(|&i| g[i * cols + j] == 1).collect();
        for &i in &on {
            for &k in &on {
                gram[i * rows + k] += 1;
            }
        }
    }
    let pp = p as u64;
    let mut max_deviation = 0u64;
    for i in 0..rows {
        for k in 0..rows {
            let want = pp + 1 + if i == k { pp * pp } else { 0 };
            max_deviation = max_deviation.max(gram[i * rows + k].abs_diff(want));
        }
    }
    Ok(GramCheck {
        p,
        diagonal: gram[0],
        off_diagonal: if rows > 1 { gram[1] } else { 0 },
        max_deviation,
    })
}

/// Maximum number of collinear points of a point set in `F_p^3`.
pub fn max_collinear(p: u32, points: &[Point3]) -> usize {
    if points.len() <= 2 {
        return points.len();
    }
    let p64 = p as u64;
    let mut best = 2;
    for (i, q) in points.iter().enumerate() {
        let mut by_dir: HashMap<[u32; 3], usize> = HashMap::new();
        for (j, r) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d: [u64; 3] = [0, 1, 2].map(|k| (r[k] as u64 + p64 - q[k] as u64) % p64);
            let lead = *d.iter().find(|&&v| v != 0).expect("points are distinct");
            let s = inv_mod(lead, p64);
            let key = d.map(|v| (v * s % p64) as u32);
            *by_dir.entry(key).or_insert(0) += 1;
        }
        best = best.max(1 + by_dir.values().copied().max().unwrap_or(0));
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceReport {
    pub points: usize,
    pub planes: usize,
    /// Maximum number of collinear points.
    pub k: usize,
    pub incidences: Incidences,
    /// `sqrt(#Q) #Pi + k #Q`.
    pub skeleton: f64,
    /// `|residual| / skeleton`.
    pub ratio: f64,
}

pub fn incidence_residual_report(
    p: u32,
    points: &[Point3],
    planes: &[Plane],
) -> Result<IncidenceReport, GeometryError> {
    if points.len() > planes.len() {
        return Err(GeometryError::PreconditionViolated(format!(
            "#Q = {} exceeds #Pi = {}",
            points.len(),
            planes.len()
        )));
    }
    let incidences = incidence_count(p, points, planes)?;
    let k = max_collinear(p, points);
    let q = points.len() as f64;
    let skeleton = q.sqrt() * planes.len() as f64 + k as f64 * q;
    let res = *incidences.residual.numer() as f64 / *incidences.residual.denom() as f64;
    let ratio = if res == 0.0 { 0.0 } else { res.abs() / skeleton };
    Ok(IncidenceReport {
        points: points.len(),
        planes: planes.len(),
        k,
        incidences,
        skeleton,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::collinear_triples_brute;
    use crate::sets::{random_set, SetTag};

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn set(p: u64, e: &[u32]) -> FpSet {
        FpSet::from_residues(&fp(p), e.iter().copied(), SetTag::Derived).unwrap()
    }

    #[test]
    fn line_census() {
        for p in [3u64, 5, 7, 11] {
            let f = fp(p);
            let p32 = p as u32;
            let lines: Vec<Line> = Line::all(p32).collect();
            assert_eq!(lines.len() as u64, p * p + p);
            for (i, l) in lines.iter().enumerate() {
                assert_eq!(l.index(p32), i as u64);
            }
            for x in 0..p32 {
                for y in 0..p32 {
                    let through = lines.iter().filter(|l| l.contains(&f, (x, y))).count();
                    assert_eq!(through as u64, p + 1);
                }
            }
            for l in &lines {
                let pts = (0..p32)
                    .flat_map(|x| (0..p32).map(move |y| (x, y)))
                    .filter(|&q| l.contains(&f, q))
                    .count();
                assert_eq!(pts as u64, p);
            }
        }
    }

    #[test]
    fn spectrum_examples() {
        let s = line_spectrum_pairs(&set(3, &[0]));
        assert_eq!(s.hist, vec![8, 4]);
        assert!(s.rich.is_empty());
        assert_eq!(line_spectrum_dense(&set(3, &[0])), s);

        let full = set(7, &[0, 1, 2, 3, 4, 5, 6]);
        let s = line_spectrum(&full);
        assert_eq!(s.hist[7], 56);
        assert_eq!(s.line_count(), 56);
    }

    #[test]
    fn level_sets() {
        let s = line_spectrum(&set(3, &[0]));
        let ls = level_set_counts(&s, 0.5);
        assert_eq!(ls.l_count, 4);
        let a = random_set(&fp(31), 9, 3).unwrap();
        let s = line_spectrum(&a);
        assert_eq!(level_set_counts(&s, 9.0).l_count, 0);
        // Dyadic shells (M, 2M] for M = 1/2, 1, 2, ... cover every iota >= 1.
        let mut mass = 0u128;
        let mut m = 0.5;
        while m < a.len() as f64 {
            let lo = m;
            mass += s
                .hist
                .iter()
                .enumerate()
                .filter(|(k, _)| lo < *k as f64 && *k as f64 <= 2.0 * lo)
                .map(|(k, &c)| k as u128 * c as u128)
                .sum::<u128>();
            m *= 2.0;
        }
        assert_eq!(mass, 32 * 81);
        assert_eq!(s.f_value(0), Ratio::new(-81, 31));
    }

    #[test]
    fn pair_identity_examples() {
        let z = set(3, &[0]);
        assert_eq!(pair_spectrum_identity(&z, &z).unwrap(), (4, 4));
        let full = set(5, &[0, 1, 2, 3, 4]);
        let (l, r) = pair_spectrum_identity(&full, &full).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, 625 + 125);
    }

    #[test]
    fn triple_examples() {
        let a = set(7, &[0]);
        let b = set(7, &[1]);
        let c = set(7, &[2]);
        assert_eq!(collinear_triples(&a, &b, &c).unwrap(), 1);
        assert_eq!(collinear_triples(&a, &a, &a).unwrap(), 0);
        let f3 = set(3, &[0, 1, 2]);
        let brute = collinear_triples_brute(&f3, &f3, &f3, TripleConvention::CrossMultiplied);
        for route in [TripleRoute::Pairs, TripleRoute::Dense] {
            assert_eq!(
                collinear_triples_via(&f3, &f3, &f3, TripleConvention::CrossMultiplied, route).unwrap(),
                brute
            );
        }
        // Over F_3, b - c ranges over the 4 vectors with both coordinates
        // nonzero for each c (9 choices); a then runs over the 3 points of
        // the line: 9 * 4 * 3.
        assert_eq!(brute, 108);
        assert_eq!(
            collinear_triples(&a, &a, &set(5, &[0])),
            Err(GeometryError::FieldMismatch)
        );
    }

    #[test]
    fn plane_census() {
        for p in [2u32, 3, 5] {
            let planes = Plane::all(p);
            let n = (p * (p * p + p + 1)) as usize;
            assert_eq!(planes.len(), n);
            let mut sorted = planes.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), n);
            for q in all_points(p) {
                let through = planes.iter().filter(|pl| pl.contains(p, &q)).count();
                assert_eq!(through as u32, p * p + p + 1);
            }
            for pl in &planes {
                assert_eq!(Plane::new(p, pl.normal, pl.c), Some(*pl));
            }
        }
        assert_eq!(Plane::new(5, [0, 2, 4], 1), Some(Plane { normal: [0, 1, 2], c: 3 }));
        assert_eq!(Plane::new(5, [0, 5, 10], 1), None);
    }

    #[test]
    fn incidences() {
        let pts = all_points(2);
        let planes = Plane::all(2);
        let inc = incidence_count(2, &pts, &planes).unwrap();
        assert_eq!(inc.count, 56);
        assert_eq!(inc.residual, Ratio::from_integer(0));
        assert_eq!(incidence_count(2, &[], &planes).unwrap().count, 0);
        let through = incidence_count(3, &[[1, 2, 0]], &Plane::all(3)).unwrap();
        assert_eq!(through.count, 13);
        assert!(matches!(
            incidence_count(3, &[[0, 0, 0], [0, 0, 0]], &[]),
            Err(GeometryError::Duplicates(_))
        ));
    }

    #[test]
    fn gram() {
        let g = gram_structure_check(2).unwrap();
        assert_eq!((g.diagonal, g.off_diagonal, g.max_deviation), (7, 3, 0));
        let g = gram_structure_check(3).unwrap();
        assert_eq!((g.diagonal, g.off_diagonal, g.max_deviation), (13, 4, 0));
        assert!(matches!(gram_structure_check(11), Err(GeometryError::TooLarge { .. })));
        assert!(matches!(gram_structure_check(4), Err(GeometryError::NotPrime(4))));
    }

    #[test]
    fn incidence_report_small_field() {
        let pts = all_points(2);
        let planes = Plane::all(2);
        let r = incidence_residual_report(2, &pts, &planes).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert_eq!(r.k, 2);
        let planes3 = Plane::all(3);
        let r = incidence_residual_report(3, &[[0, 0, 0]], &planes3).unwrap();
        assert_eq!(r.incidences.residual, Ratio::new(13 * 3 - 39, 3));
        assert_eq!(r.k, 1);
        assert!(matches!(
            incidence_residual_report(2, &pts, &planes[..3]),
            Err(GeometryError::PreconditionViolated(_))
        ));
        let line: Vec<Point3> = (0..5).map(|t| [t, 2 * t % 5, 1]).collect();
        assert_eq!(max_collinear(5, &line), 5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn spectrum_routes_and_identities(pi in 0usize..5, n in 1u32..14, seed in any::<u64>()) {
                let p = [5u64, 7, 13, 31, 61][pi];
                let a = random_set(&fp(p), n.min(p as u32), seed).unwrap();
                let sp = line_spectrum_pairs(&a);
                let sd = line_spectrum_dense(&a);
                prop_assert_eq!(&sp, &sd);
                let na = a.len() as u128;
                prop_assert_eq!(sd.total_mass(), (p as u128 + 1) * na * na);
                prop_assert_eq!(sd.line_count(), p * p + p);
                let p3 = (p as u128).pow(3);
                prop_assert!(sd.scaled_f_square_sum() <= p3 * na * na);
            }

            #[test]
            fn fast_triples_match_brute(pi in 0usize..4, sizes in (1u32..7, 1u32..7, 1u32..7), seed in any::<u64>(), geo in any::<bool>()) {
                let p = [7u64, 11, 13, 31][pi];
                let f = fp(p);
                let a = random_set(&f, sizes.0, seed).unwrap();
                let b = random_set(&f, sizes.1, seed ^ 0xabc).unwrap();
                let c = random_set(&f, sizes.2, seed ^ 0xdef).unwrap();
                let conv = if geo { TripleConvention::Geometric } else { TripleConvention::CrossMultiplied };
                let want = collinear_triples_brute(&a, &b, &c, conv);
                prop_assert_eq!(collinear_triples_via(&a, &b, &c, conv, TripleRoute::Pairs).unwrap(), want);
                prop_assert_eq!(collinear_triples_via(&a, &b, &c, conv, TripleRoute::Dense).unwrap(), want);
            }
        }
    }
}
