//! Exact rational arithmetic used by the statistics and estimators.
//!
//! All counts at supported scales fit comfortably in i128, so no bignum
//! is needed; equalities asserted by the test suite are exact, never
//! toleranced.

pub type Rat = num::rational::Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rat {
    Rat::new(num, den)
}

pub fn rat_int(n: i128) -> Rat {
    Rat::from_integer(n)
}

pub fn to_f64(r: &Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The exact rational value of a finite f64 (every finite double is
/// m/2^e). None for non-finite inputs or exponents past i128 range —
/// in practice only values far outside [-1, 1] or denormals near the
/// 2^-126 floor, neither of which arise from probabilities or weights.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(rat_int(0));
    }
    let bits = x.to_bits();
    let sign: i128 = if bits >> 63 == 1 { -1 } else { 1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut exp2) = if raw_exp == 0 {
        (frac as i128, -1074i64)
    } else {
        ((frac | 1 << 52) as i128, raw_exp - 1075)
    };
    while mant & 1 == 0 && exp2 < 0 {
        mant >>= 1;
        exp2 += 1;
    }
    if exp2 >= 0 {
        if exp2 > 70 {
            return None;
        }
        Some(rat_int(sign * (mant << exp2)))
    } else {
        if exp2 < -120 {
            return None;
        }
        Some(rat(sign * mant, 1i128 << -exp2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trips_exactly() {
        for r in [rat(1, 2), rat(3, 8), rat(-7, 64), rat_int(5), rat(1, 3), rat(355, 113)] {
            let back = rat_from_f64(to_f64(&r)).unwrap();
            // Dyadic rationals survive unchanged; others land on the
            // nearest double, which still converts back bit-exactly.
            assert_eq!(to_f64(&back), to_f64(&r));
        }
        assert_eq!(rat_from_f64(0.5), Some(rat(1, 2)));
        assert_eq!(rat_from_f64(0.0), Some(rat_int(0)));
        assert_eq!(rat_from_f64(1.0), Some(rat_int(1)));
        assert_eq!(rat_from_f64(f64::NAN), None);
        assert_eq!(rat_from_f64(f64::INFINITY), None);
    }
}
