//! Exact sign of the 2-D orientation determinant.
//!
//! A floating-point evaluation with a forward error bound settles almost every
//! call; the rest fall back to exact big-integer arithmetic. Exactness keeps
//! the visibility relation a strict geometric predicate, which the divide and
//! conquer builder relies on to agree with the all-pairs scan bit for bit.

use std::cmp::Ordering;

use num_bigint::BigInt;

// (3 + 16u) u with u = 2^-53, the static bound for the orientation filter.
const CCW_ERRBOUND_A: f64 = (3.0 + 16.0 * f64::EPSILON / 2.0) * f64::EPSILON / 2.0;

/// Sign of `(ax - cx)(by - cy) - (ay - cy)(bx - cx)`.
///
/// `Greater` when `a, b, c` turn counterclockwise, `Less` when clockwise and
/// `Equal` when collinear. All inputs must be finite.
pub fn orient2d(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Ordering {
    let detleft = (a.0 - c.0) * (b.1 - c.1);
    let detright = (a.1 - c.1) * (b.0 - c.0);
    let det = detleft - detright;

    let detsum = if detleft > 0.0 {
        if detright <= 0.0 {
            return sign(det);
        }
        detleft + detright
    } else if detleft < 0.0 {
        if detright >= 0.0 {
            return sign(det);
        }
        -detleft - detright
    } else {
        return sign(det);
    };

    let errbound = CCW_ERRBOUND_A * detsum;
    if det >= errbound || -det >= errbound {
        return sign(det);
    }
    orient2d_exact(a, b, c)
}

fn sign(x: f64) -> Ordering {
    x.partial_cmp(&0.0).expect("finite determinant")
}

fn orient2d_exact(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Ordering {
    let parts = [a.0, a.1, b.0, b.1, c.0, c.1].map(decompose);
    let min_exp = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
    let [ax, ay, bx, by, cx, cy] =
        parts.map(|(m, e)| if m == 0 { BigInt::from(0) } else { BigInt::from(m) << (e - min_exp) as usize });
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    det.sign().cmp_zero()
}

trait SignCmp {
    fn cmp_zero(self) -> Ordering;
}

impl SignCmp for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

/// Splits a finite double into `mantissa * 2^exponent` with an integer mantissa.
fn decompose(x: f64) -> (i64, i32) {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let fraction = (bits & ((1u64 << 52) - 1)) as i64;
    let (mantissa, exponent) = if biased == 0 { (fraction, -1074) } else { (fraction | (1i64 << 52), biased - 1075) };
    (if negative { -mantissa } else { mantissa }, exponent)
}
