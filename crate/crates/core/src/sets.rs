//! Subsets of `F_p` of every species used in the experiments: intervals,
//! multiplicative subgroups, polynomial images, reduced primes and seeded
//! random samples, plus sumset and difference-set operations.

use std::collections::BTreeMap;
use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::field::{primes_up_to, FieldError, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("interval length {len} not admissible for p = {p}")]
    LengthOutOfRange { len: u64, p: u32 },
    #[error("subgroup order {order} does not divide p - 1 = {group}")]
    NotADivisor { order: u64, group: u32 },
    #[error("sample size {n} exceeds p = {p}")]
    SizeOutOfRange { n: u64, p: u32 },
    #[error("sets live in different fields (p = {0} vs p = {1})")]
    FieldMismatch(u32, u32),
    #[error("polynomial has degree < 1 after reduction mod p")]
    ConstantPolynomial,
    #[error("element {0} is not a residue mod p")]
    NotAResidue(u64),
    #[error("malformed set line: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How a set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetTag {
    Interval,
    /// Multiplicative subgroup of the given order.
    Subgroup { order: u32 },
    PolyImage,
    Primes,
    Random { seed: u64 },
    Derived,
}

/// A finite subset of `F_p`: sorted, duplicate-free residues.
#[derive(Clone, PartialEq, Eq)]
pub struct FpSet {
    field: PrimeField,
    elems: Vec<u32>,
    tag: SetTag,
}

impl fmt::Debug for FpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpSet(p={}, {:?}, {:?})", self.p(), self.tag, self.elems)
    }
}

impl FpSet {
    /// Build a set from arbitrary residues; duplicates collapse.
    pub fn from_residues(
        field: &PrimeField,
        elems: impl IntoIterator<Item = u32>,
        tag: SetTag,
    ) -> Result<Self, SetError> {
        let p = field.p();
        let mut v: Vec<u32> = Vec::new();
        for e in elems {
            if e >= p {
                return Err(SetError::NotAResidue(e as u64));
            }
            v.push(e);
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self {
            field: field.clone(),
            elems: v,
            tag,
        })
    }

    /// Build a set from integers, reducing each modulo `p`.
    pub fn from_integers(field: &PrimeField, elems: impl IntoIterator<Item = i64>) -> Self {
        let mut v: Vec<u32> = elems.into_iter().map(|e| field.reduce(e)).collect();
        v.sort_unstable();
        v.dedup();
        Self {
            field: field.clone(),
            elems: v,
            tag: SetTag::Derived,
        }
    }

    pub fn empty(field: &PrimeField) -> Self {
        Self {
            field: field.clone(),
            elems: Vec::new(),
            tag: SetTag::Derived,
        }
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    pub fn tag(&self) -> SetTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// Dense membership table of length `p`.
    pub fn indicator(&self) -> Vec<bool> {
        let mut out = vec![false; self.p() as usize];
        for &e in &self.elems {
            out[e as usize] = true;
        }
        out
    }

    /// Index `h = (p-1)/T` of a subgroup-tagged set.
    pub fn cofactor(&self) -> Option<u32> {
        match self.tag {
            SetTag::Subgroup { order } => Some(self.field.group_order() / order),
            _ => None,
        }
    }

    pub fn same_field(&self, other: &FpSet) -> Result<(), SetError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(SetError::FieldMismatch(self.p(), other.p()))
        }
    }

    /// `S + a`.
    pub fn translate(&self, a: i64) -> FpSet {
        let shift = self.field.reduce(a);
        let f = &self.field;
        Self::from_residues(f, self.elems.iter().map(|&e| f.add(e, shift)), SetTag::Derived)
            .expect("residues stay in range")
    }

    /// `lambda * S`.
    pub fn dilate(&self, lambda: u32) -> FpSet {
        let f = &self.field;
        let l = lambda % f.p();
        Self::from_residues(f, self.elems.iter().map(|&e| f.mul(e, l)), SetTag::Derived)
            .expect("residues stay in range")
    }

    pub fn intersection(&self, other: &FpSet) -> Result<FpSet, SetError> {
        self.same_field(other)?;
        let elems = self
            .elems
            .iter()
            .copied()
            .filter(|&e| other.contains(e))
            .collect();
        Ok(FpSet {
            field: self.field.clone(),
            elems,
            tag: SetTag::Derived,
        })
    }

    /// Product set `A * B = {ab}`.
    pub fn product_set(&self, other: &FpSet) -> Result<FpSet, SetError> {
        self.same_field(other)?;
        let f = &self.field;
        let mut hit = vec![false; f.p() as usize];
        for &a in &self.elems {
            for &b in &other.elems {
                hit[f.mul(a, b) as usize] = true;
            }
        }
        Ok(from_hits(f, &hit))
    }

    /// Line-oriented text form `p n e1 e2 ... en`.
    pub fn to_line(&self) -> String {
        let mut s = format!("{} {}", self.p(), self.len());
        for e in &self.elems {
            s.push(' ');
            s.push_str(&e.to_string());
        }
        s
    }

    /// Parse the form written by [`Self::to_line`]; the result is tagged
    /// `Derived`.
    pub fn parse_line(line: &str) -> Result<FpSet, SetError> {
        let mut it = line.split_whitespace();
        let mut next_num = |what: &str| -> Result<u64, SetError> {
            it.next()
                .ok_or_else(|| SetError::Parse(format!("missing {what}")))?
                .parse::<u64>()
                .map_err(|e| SetError::Parse(format!("{what}: {e}")))
        };
        let p = next_num("p")?;
        let n = next_num("n")?;
        let field = PrimeField::new(p)?;
        let mut elems = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let e = next_num("element")?;
            if e >= p {
                return Err(SetError::NotAResidue(e));
            }
            elems.push(e as u32);
        }
        if it.next().is_some() {
            return Err(SetError::Parse("trailing tokens".into()));
        }
        let set = FpSet::from_residues(&field, elems, SetTag::Derived)?;
        if set.len() as u64 != n {
            return Err(SetError::Parse("duplicate elements".into()));
        }
        Ok(set)
    }
}

fn from_hits(field: &PrimeField, hit: &[bool]) -> FpSet {
    FpSet {
        field: field.clone(),
        elems: hit
            .iter()
            .enumerate()
            .filter_map(|(i, &h)| h.then_some(i as u32))
            .collect(),
        tag: SetTag::Derived,
    }
}

/// Interval selector used by the energy relations: `[a+1, a+X]` or the
/// symmetric `[-X, X]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSpec {
    Shifted { start: i64, len: u32 },
    Symmetric { half_width: u32 },
}

impl IntervalSpec {
    pub fn initial(len: u32) -> Self {
        IntervalSpec::Shifted { start: 0, len }
    }

    pub fn build(&self, field: &PrimeField) -> Result<FpSet, SetError> {
        match *self {
            IntervalSpec::Shifted { start, len } => interval(field, start, len),
            IntervalSpec::Symmetric { half_width } => symmetric_interval(field, half_width),
        }
    }
}

/// `{a+1, ..., a+X}` reduced mod `p`; requires `1 <= X < p`.
pub fn interval(field: &PrimeField, a: i64, len: u32) -> Result<FpSet, SetError> {
    if len == 0 || len >= field.p() {
        return Err(SetError::LengthOutOfRange {
            len: len as u64,
            p: field.p(),
        });
    }
    let mut set = FpSet::from_integers(field, (1..=len as i64).map(|i| a + i));
    set.tag = SetTag::Interval;
    Ok(set)
}

/// Residues of `{-X, ..., X}`; requires `2X + 1 <= p`.
pub fn symmetric_interval(field: &PrimeField, half_width: u32) -> Result<FpSet, SetError> {
    if 2 * half_width as u64 + 1 > field.p() as u64 {
        return Err(SetError::LengthOutOfRange {
            len: 2 * half_width as u64 + 1,
            p: field.p(),
        });
    }
    let x = half_width as i64;
    let mut set = FpSet::from_integers(field, -x..=x);
    set.tag = SetTag::Interval;
    Ok(set)
}

/// The unique subgroup of `F_p^*` of order `T`, namely `{g^(k h)}` with
/// `h = (p-1)/T`.
pub fn subgroup(field: &PrimeField, order: u32) -> Result<FpSet, SetError> {
    let n = field.group_order();
    if order == 0 || n % order != 0 {
        return Err(SetError::NotADivisor {
            order: order as u64,
            group: n,
        });
    }
    let h = (n / order) as u64;
    let mut set = FpSet::from_residues(
        field,
        (0..order as u64).map(|k| field.pow_g(k * h)),
        SetTag::Subgroup { order },
    )?;
    set.tag = SetTag::Subgroup { order };
    Ok(set)
}

/// Polynomial over `F_p`, coefficients listed from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<u32>,
    p: u32,
}

impl Polynomial {
    pub fn new(field: &PrimeField, coeffs: &[i64]) -> Result<Self, SetError> {
        let mut c: Vec<u32> = coeffs.iter().map(|&a| field.reduce(a)).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        if c.len() < 2 {
            return Err(SetError::ConstantPolynomial);
        }
        Ok(Self {
            coeffs: c,
            p: field.p(),
        })
    }

    /// `Z^d`.
    pub fn monomial(field: &PrimeField, degree: usize) -> Result<Self, SetError> {
        let mut c = vec![0i64; degree + 1];
        c[degree] = 1;
        Self::new(field, &c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn eval(&self, x: u32) -> u32 {
        let p = self.p as u64;
        let x = x as u64 % p;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * x + c as u64) % p) as u32
    }
}

/// `f(A)` together with the fibre sizes `#{a in A : f(a) = s}`.
#[derive(Debug, Clone)]
pub struct PolyImage {
    pub set: FpSet,
    pub fibers: BTreeMap<u32, u32>,
}

impl PolyImage {
    pub fn max_fiber(&self) -> u32 {
        self.fibers.values().copied().max().unwrap_or(0)
    }
}

pub fn poly_image(f: &Polynomial, a: &FpSet) -> Result<PolyImage, SetError> {
    if f.p != a.p() {
        return Err(SetError::FieldMismatch(f.p, a.p()));
    }
    let mut fibers = BTreeMap::new();
    for &x in a.elems() {
        *fibers.entry(f.eval(x)).or_insert(0u32) += 1;
    }
    let mut set = FpSet::from_residues(a.field(), fibers.keys().copied(), SetTag::PolyImage)?;
    set.tag = SetTag::PolyImage;
    Ok(PolyImage { set, fibers })
}

/// Primes `q <= Q` reduced mod `p`.
#[derive(Debug, Clone)]
pub struct PrimeResidues {
    pub set: FpSet,
    /// The primes themselves, in increasing order.
    pub primes: Vec<u64>,
    /// Number of primes whose residue coincided with a smaller prime's.
    pub collisions: usize,
}

pub fn primes_set(field: &PrimeField, bound: u64) -> PrimeResidues {
    let primes = primes_up_to(bound);
    let p = field.p() as u64;
    let mut set = FpSet::from_residues(field, primes.iter().map(|&q| (q % p) as u32), SetTag::Primes)
        .expect("reduced residues are in range");
    set.tag = SetTag::Primes;
    let collisions = primes.len() - set.len();
    PrimeResidues {
        set,
        primes,
        collisions,
    }
}

/// Uniform draw from `[0, bound)` by rejection on 64-bit words: a word `w` is
/// accepted iff `w < 2^64 - (2^64 mod bound)`, and maps to `w mod bound`.
pub fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
    loop {
        let w = rng.next_u64();
        if w <= zone {
            return w % bound;
        }
    }
}

/// Uniform `n`-subset of `F_p`, sampled without replacement.
///
/// The stream is `ChaCha8Rng::seed_from_u64(seed)`; the sample is the first
/// `n` slots of a partial Fisher-Yates shuffle of `0..p`, where slot `i` is
/// swapped with `i + uniform_below(p - i)`.
pub fn random_set(field: &PrimeField, n: u32, seed: u64) -> Result<FpSet, SetError> {
    let p = field.p();
    if n > p {
        return Err(SetError::SizeOutOfRange { n: n as u64, p });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<u32> = (0..p).collect();
    for i in 0..n as usize {
        let j = i + uniform_below(&mut rng, (p as usize - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(n as usize);
    let mut set = FpSet::from_residues(field, pool, SetTag::Random { seed })?;
    set.tag = SetTag::Random { seed };
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `A + B` or `A - B`.
pub fn sumset(a: &FpSet, b: &FpSet, sign: Sign) -> Result<FpSet, SetError> {
    a.same_field(b)?;
    let f = a.field();
    let mut hit = vec![false; f.p() as usize];
    for &x in a.elems() {
        for &y in b.elems() {
            let v = match sign {
                Sign::Plus => f.add(x, y),
                Sign::Minus => f.sub(x, y),
            };
            hit[v as usize] = true;
        }
    }
    Ok(from_hits(f, &hit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn intervals() {
        let f = fp(7);
        assert_eq!(interval(&f, 0, 3).unwrap().elems(), &[1, 2, 3]);
        assert_eq!(interval(&f, -4, 3).unwrap().elems(), &[4, 5, 6]);
        assert!(matches!(
            interval(&fp(5), 0, 5),
            Err(SetError::LengthOutOfRange { .. })
        ));
        assert_eq!(symmetric_interval(&f, 1).unwrap().elems(), &[0, 1, 6]);
        assert_eq!(symmetric_interval(&fp(11), 2).unwrap().elems(), &[0, 1, 2, 9, 10]);
        assert!(symmetric_interval(&fp(5), 3).is_err());
        assert_eq!(symmetric_interval(&fp(5), 2).unwrap().len(), 5);
        let spec = IntervalSpec::Symmetric { half_width: 2 };
        assert_eq!(spec.build(&fp(11)).unwrap().len(), 5);
    }

    #[test]
    fn subgroups() {
        let f = fp(7);
        let g = subgroup(&f, 3).unwrap();
        assert_eq!(g.elems(), &[1, 2, 4]);
        assert_eq!(g.cofactor(), Some(2));
        // cubes mod 7
        let cubes = FpSet::from_residues(&f, (1..7u32).map(|x| x * x * x % 7), SetTag::Derived).unwrap();
        assert_eq!(cubes.elems(), &[1, 6]);
        assert_eq!(subgroup(&f, 2).unwrap().elems(), cubes.elems());
        assert_eq!(subgroup(&f, 1).unwrap().elems(), &[1]);
        assert!(matches!(subgroup(&f, 4), Err(SetError::NotADivisor { .. })));
    }

    #[test]
    fn subgroup_closure() {
        for p in [7u64, 13, 31, 61, 101] {
            let f = fp(p);
            for t in 1..p as u32 {
                if (p as u32 - 1) % t != 0 {
                    continue;
                }
                let g = subgroup(&f, t).unwrap();
                assert_eq!(g.len(), t as usize);
                assert_eq!(g.product_set(&g).unwrap().elems(), g.elems());
            }
        }
    }

    #[test]
    fn polynomial_images() {
        let f = fp(7);
        let sq = Polynomial::monomial(&f, 2).unwrap();
        let a = FpSet::from_residues(&f, [1, 2, 3], SetTag::Derived).unwrap();
        let img = poly_image(&sq, &a).unwrap();
        assert_eq!(img.set.elems(), &[1, 2, 4]);

        let id = Polynomial::new(&f, &[0, 1]).unwrap();
        assert_eq!(poly_image(&id, &a).unwrap().set.elems(), a.elems());

        let b = FpSet::from_residues(&f, [1, 6], SetTag::Derived).unwrap();
        let img = poly_image(&sq, &b).unwrap();
        assert_eq!(img.set.elems(), &[1]);
        assert_eq!(img.fibers[&1], 2);

        assert_eq!(Polynomial::new(&f, &[3, 7, 14]), Err(SetError::ConstantPolynomial));
        assert_eq!(Polynomial::new(&f, &[1, 2, -1]).unwrap().eval(3), (1 + 6 + 7 * 7 - 9) % 7);
    }

    #[test]
    fn prime_residues() {
        assert_eq!(primes_set(&fp(101), 10).set.elems(), &[2, 3, 5, 7]);
        assert!(primes_set(&fp(101), 1).set.is_empty());
        let r = primes_set(&fp(13), 12);
        assert_eq!(r.set.elems(), &[2, 3, 5, 7, 11]);
        assert_eq!(r.collisions, 0);
        // mod 5: 7 lands on 2 and 13 lands on 3.
        let r = primes_set(&fp(5), 13);
        assert_eq!(r.primes.len(), 6);
        assert_eq!(r.set.elems(), &[0, 1, 2, 3]);
        assert_eq!(r.collisions, 2);
    }

    #[test]
    fn random_sets() {
        let f = fp(7);
        assert_eq!(random_set(&f, 7, 99).unwrap().elems(), &[0, 1, 2, 3, 4, 5, 6]);
        assert!(random_set(&f, 0, 1).unwrap().is_empty());
        assert!(random_set(&f, 8, 1).is_err());
        let f = fp(1009);
        let a = random_set(&f, 40, 12345).unwrap();
        let b = random_set(&f, 40, 12345).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        assert_ne!(a, random_set(&f, 40, 12346).unwrap());
    }

    #[test]
    fn sumsets() {
        let f = fp(5);
        let a = FpSet::from_residues(&f, [0, 1], SetTag::Derived).unwrap();
        assert_eq!(sumset(&a, &a, Sign::Plus).unwrap().elems(), &[0, 1, 2]);
        let zero = FpSet::from_residues(&f, [0], SetTag::Derived).unwrap();
        assert_eq!(sumset(&a, &zero, Sign::Plus).unwrap().elems(), a.elems());

        let f7 = fp(7);
        let g = subgroup(&f7, 3).unwrap();
        // Differences of {1,2,4}: 0 and every x - y with x != y.
        let mut expect = vec![];
        for &x in g.elems() {
            for &y in g.elems() {
                expect.push((x + 7 - y) % 7);
            }
        }
        expect.sort();
        expect.dedup();
        assert_eq!(sumset(&g, &g, Sign::Minus).unwrap().elems(), &expect[..]);
        assert_eq!(expect, vec![0, 1, 2, 3, 4, 5, 6]);

        assert_eq!(
            sumset(&a, &g, Sign::Plus),
            Err(SetError::FieldMismatch(5, 7))
        );
    }

    #[test]
    fn text_form() {
        let f = fp(11);
        let s = FpSet::from_residues(&f, [3, 1, 9], SetTag::Derived).unwrap();
        assert_eq!(s.to_line(), "11 3 1 3 9");
        assert_eq!(FpSet::parse_line("11 3 1 3 9").unwrap(), s);
        assert!(FpSet::parse_line("11 3 1 3").is_err());
        assert!(FpSet::parse_line("11 2 1 13").is_err());
        assert!(FpSet::parse_line("12 1 1").is_err());
        assert!(FpSet::parse_line("11 2 1 1").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ruzsa_triangle_and_sumset_size(pi in 0usize..5, n in 1u32..30, seed in any::<u64>()) {
                let p = [5u64, 13, 31, 61, 127][pi];
                let f = fp(p);
                let a = random_set(&f, n.min(p as u32), seed).unwrap();
                let plus = sumset(&a, &a, Sign::Plus).unwrap().len() as u64;
                let minus = sumset(&a, &a, Sign::Minus).unwrap().len() as u64;
                let k = a.len() as u64;
                prop_assert!(minus * k <= plus * plus);
                prop_assert!(plus <= (p).min(k * k));
                prop_assert!(minus <= (p).min(k * k));
            }

            #[test]
            fn text_round_trip(n in 0u32..50, seed in any::<u64>()) {
                let f = fp(101);
                let a = random_set(&f, n, seed).unwrap();
                let b = FpSet::parse_line(&a.to_line()).unwrap();
                prop_assert_eq!(a.elems(), b.elems());
            }
        }
    }
}
