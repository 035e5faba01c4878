use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses "p/q" or "p".
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let parse = |t: &str| -> Result<BigInt> {
        t.trim().parse::<BigInt>().map_err(|_| Error::InvalidInput(format!("bad rational '{s}'")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse(q)?;
            if q.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in '{s}'")));
            }
            Ok(Rat::new(parse(p)?, q))
        }
        None => Ok(Rat::from_integer(parse(s)?)),
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    pub fn of_ints(x: i64, y: i64) -> Self {
        Point { x: rat_int(x), y: rat_int(y) }
    }
}

fn cross(ax: &Rat, ay: &Rat, bx: &Rat, by: &Rat) -> Rat {
    ax * by - ay * bx
}

/// Sign of the cross product (b - a) x (c - a): +1 left turn, -1 right, 0 collinear.
pub fn orient(a: &Point, b: &Point, c: &Point) -> i8 {
    let v = cross(&(&b.x - &a.x), &(&b.y - &a.y), &(&c.x - &a.x), &(&c.y - &a.y));
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact intersection of two closed segments.
#[derive(Debug, Clone, PartialEq)]
pub enum SegCross {
    None,
    /// Transversal crossing interior to both segments; s, t in (0, 1).
    Proper { point: Point, s: Rat, t: Rat },
    /// Exactly one common point, on the boundary of at least one segment.
    Touch(Point),
    /// Collinear segments sharing more than one point.
    Overlap,
}

pub fn segment_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> SegCross {
    let d1 = (&b.x - &a.x, &b.y - &a.y);
    let d2 = (&d.x - &c.x, &d.y - &c.y);
    let denom = cross(&d1.0, &d1.1, &d2.0, &d2.1);
    let ca = (&c.x - &a.x, &c.y - &a.y);
    if !denom.is_zero() {
        let s = cross(&ca.0, &ca.1, &d2.0, &d2.1) / &denom;
        let t = cross(&ca.0, &ca.1, &d1.0, &d1.1) / &denom;
        let zero = Rat::zero();
        let one = Rat::one();
        if s < zero || s > one || t < zero || t > one {
            return SegCross::None;
        }
        let point = Point::new(&a.x + &s * &d1.0, &a.y + &s * &d1.1);
        if s > zero && s < one && t > zero && t < one {
            SegCross::Proper { point, s, t }
        } else {
            SegCross::Touch(point)
        }
    } else {
        if !cross(&ca.0, &ca.1, &d1.0, &d1.1).is_zero() {
            return SegCross::None; // parallel, different lines
        }
        // Collinear: compare parameters of c and d along ab.
        let len2 = &d1.0 * &d1.0 + &d1.1 * &d1.1;
        if len2.is_zero() {
            // Degenerate zero-length input; callers reject these earlier.
            return if a == c || a == d { SegCross::Touch(a.clone()) } else { SegCross::None };
        }
        let param = |p: &Point| (&(&p.x - &a.x) * &d1.0 + &(&p.y - &a.y) * &d1.1) / &len2;
        let (mut tc, mut td) = (param(c), param(d));
        let (mut pc, mut pd) = (c.clone(), d.clone());
        if tc > td {
            std::mem::swap(&mut tc, &mut td);
            std::mem::swap(&mut pc, &mut pd);
        }
        let zero = Rat::zero();
        let one = Rat::one();
        if td < zero || tc > one {
            return SegCross::None;
        }
        let lo = if tc > zero { tc.clone() } else { zero.clone() };
        let hi = if td < one { td.clone() } else { one.clone() };
        if lo == hi {
            let point = if lo == zero {
                a.clone()
            } else if lo == one {
                b.clone()
            } else {
                pc
            };
            SegCross::Touch(point)
        } else {
            SegCross::Overlap
        }
    }
}

/// True when p lies on the closed segment ab.
pub fn point_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    let within = |x: &Rat, lo: &Rat, hi: &Rat| {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        x >= lo && x <= hi
    };
    within(&p.x, &a.x, &b.x) && within(&p.y, &a.y, &b.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proper_crossing_with_rational_point() {
        let (a, b) = (Point::of_ints(0, 0), Point::of_ints(2, 2));
        let (c, d) = (Point::of_ints(0, 2), Point::of_ints(2, 0));
        match segment_intersection(&a, &b, &c, &d) {
            SegCross::Proper { point, s, t } => {
                assert_eq!(point, Point::of_ints(1, 1));
                assert_eq!(s, rat(1, 2));
                assert_eq!(t, rat(1, 2));
            }
            other => panic!("expected proper crossing, got {other:?}"),
        }
    }

    #[test]
    fn touch_and_overlap() {
        let (a, b) = (Point::of_ints(0, 0), Point::of_ints(2, 0));
        assert!(matches!(
            segment_intersection(&a, &b, &Point::of_ints(1, 0), &Point::of_ints(1, 5)),
            SegCross::Touch(_)
        ));
        assert!(matches!(
            segment_intersection(&a, &b, &Point::of_ints(2, 0), &Point::of_ints(3, 1)),
            SegCross::Touch(_)
        ));
        assert_eq!(
            segment_intersection(&a, &b, &Point::of_ints(1, 0), &Point::of_ints(3, 0)),
            SegCross::Overlap
        );
        assert_eq!(
            segment_intersection(&a, &b, &Point::of_ints(3, 0), &Point::of_ints(4, 0)),
            SegCross::None
        );
    }

    #[test]
    fn rational_string_roundtrip() {
        for s in ["3/4", "-7/2", "5", "0"] {
            let r = rat_from_str(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x").is_err());
    }
}
