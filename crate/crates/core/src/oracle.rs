//! Brute-force reference counts.
//!
//! Each function here enumerates the raw tuples of its defining equation and
//! shares no code path with the fast counters it is compared against.

use std::collections::HashMap;

use crate::field::PrimeField;
use crate::geometry::TripleConvention;
use crate::sets::FpSet;

/// `T(A, B, C)` by looping over all 6-tuples.
pub fn collinear_triples_brute(a: &FpSet, b: &FpSet, c: &FpSet, conv: TripleConvention) -> u128 {
    let p = a.p() as i64;
    let (a, b, c) = (a.elems(), b.elems(), c.elems());
    let m = |v: i64| v.rem_euclid(p);
    let mut count = 0u128;
    for &a1 in a {
        for &a2 in a {
            for &b1 in b {
                for &b2 in b {
                    for &c1 in c {
                        for &c2 in c {
                            let (a1, a2, b1, b2, c1, c2) =
                                (a1 as i64, a2 as i64, b1 as i64, b2 as i64, c1 as i64, c2 as i64);
                            let on_line =
                                m((a1 - c1) * (b2 - c2)) == m((a2 - c2) * (b1 - c1));
                            let admitted = match conv {
                                TripleConvention::CrossMultiplied => b1 != c1 && b2 != c2,
                                TripleConvention::Geometric => true,
                            };
                            if on_line && admitted {
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    count
}

/// `E3(U, V, W)`: 6-tuples with `u1 - u2 = v1 - v2 = w1 - w2`.
pub fn e3_brute(u: &FpSet, v: &FpSet, w: &FpSet) -> u128 {
    let f = u.field();
    let mut count = 0u128;
    for &u1 in u.elems() {
        for &u2 in u.elems() {
            let d = f.sub(u1, u2);
            for &v1 in v.elems() {
                for &v2 in v.elems() {
                    if f.sub(v1, v2) != d {
                        continue;
                    }
                    for &w1 in w.elems() {
                        for &w2 in w.elems() {
                            if f.sub(w1, w2) == d {
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    count
}

/// `N(S, X, Y)` from the cross-multiplied system
/// `(x1 + s1) y2 = (x2 + s2) y1`, `(x1 + t1) y2 = (x2 + t2) y1`
/// with `s1 != t1`, `s2 != t2`.
pub fn count_n_brute(s: &FpSet, x: &FpSet, y: &FpSet) -> u128 {
    let f: &PrimeField = s.field();
    let mut count = 0u128;
    for &s1 in s.elems() {
        for &t1 in s.elems() {
            if s1 == t1 {
                continue;
            }
            for &s2 in s.elems() {
                for &t2 in s.elems() {
                    if s2 == t2 {
                        continue;
                    }
                    for &x1 in x.elems() {
                        for &x2 in x.elems() {
                            for &y1 in y.elems() {
                                for &y2 in y.elems() {
                                    let first = f.mul(f.add(x1, s1), y2) == f.mul(f.add(x2, s2), y1);
                                    let second =
                                        f.mul(f.add(x1, t1), y2) == f.mul(f.add(x2, t2), y1);
                                    if first && second {
                                        count += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    count
}

/// `nu(lambda, mu)` by enumerating `(s, t, x, y)`.
pub fn nu_map_brute(s: &FpSet, x: &FpSet, y: &FpSet) -> HashMap<(u32, u32), u64> {
    let f = s.field();
    let mut out = HashMap::new();
    for &s1 in s.elems() {
        for &t1 in s.elems() {
            if s1 == t1 {
                continue;
            }
            for &xv in x.elems() {
                for &yv in y.elems() {
                    let inv = f.inv(yv).expect("nonzero denominator");
                    let key = (f.mul(f.add(s1, xv), inv), f.mul(f.add(t1, xv), inv));
                    *out.entry(key).or_insert(0) += 1;
                }
            }
        }
    }
    out
}
