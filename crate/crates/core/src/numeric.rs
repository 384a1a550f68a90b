//! Summation and exact-ratio helpers shared by the density estimators.

use std::ops::AddAssign;

/// Kahan–Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

/// Number of fractional bits used by fixed-point weight accumulators for a
/// window of the given horizon.
///
/// Every quantized weight is at most `2^scale`, and at most `horizon` of them
/// are added, so the totals stay below `2^125`.
pub fn fixed_point_scale(horizon: u64) -> i32 {
    125 - ceil_log2(horizon.max(1)) as i32
}

pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Quantizes a weight in `[0, 1]` to an integer multiple of `2^-scale`.
#[inline]
pub fn quantize(w: f64, scale: i32) -> u128 {
    debug_assert!((0.0..=1.0).contains(&w), "weight {w} outside [0,1]");
    (w * pow2(scale)).round() as u128
}

/// `2^e` for exponents in the normal range.
#[inline]
pub fn pow2(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// Correctly rounded (round-to-nearest, ties-to-even) value of `num / den`.
///
/// Produces the same bits as IEEE division whenever both operands are
/// exactly representable, and stays exact for 128-bit fixed-point sums.
pub fn ratio_to_f64(num: u128, den: u128) -> f64 {
    assert!(den > 0, "zero denominator");
    if num == 0 {
        return 0.0;
    }
    // Integer part first, then fractional quotient bits by long division.
    let int_part = num / den;
    let mut rem = num % den;

    // Collect 55 significant bits (53 + guard + round), tracking the binary
    // exponent of the last collected bit.
    let mut mant: u128;
    let mut exp: i32;
    if int_part > 0 {
        let bits = 128 - int_part.leading_zeros() as i32;
        if bits >= 55 {
            let drop = bits - 55;
            let sticky = (int_part & ((1u128 << drop) - 1)) != 0 || rem != 0;
            mant = int_part >> drop;
            exp = drop;
            return assemble(mant, exp, sticky);
        }
        mant = int_part;
        exp = 0;
        while 128 - (mant.leading_zeros() as i32) < 55 {
            rem <<= 1;
            mant <<= 1;
            exp -= 1;
            if rem >= den {
                rem -= den;
                mant |= 1;
            }
        }
    } else {
        mant = 0;
        exp = 0;
        // Skip leading zero bits.
        while mant == 0 {
            rem <<= 1;
            exp -= 1;
            if rem >= den {
                rem -= den;
                mant = 1;
            }
        }
        while 128 - (mant.leading_zeros() as i32) < 55 {
            rem <<= 1;
            mant <<= 1;
            exp -= 1;
            if rem >= den {
                rem -= den;
                mant |= 1;
            }
        }
    }
    assemble(mant, exp, rem != 0)
}

/// Rounds a 55-bit mantissa (value `mant * 2^exp`) to 53 bits.
fn assemble(mant: u128, exp: i32, sticky: bool) -> f64 {
    let low = mant & 0b11;
    let mut m = mant >> 2;
    let e = exp + 2;
    let round_up = match low {
        0b10 => sticky || (m & 1) == 1,
        0b11 => true,
        _ => false,
    };
    if round_up {
        m += 1;
    }
    // m may have become 2^53; the conversion below is still exact.
    (m as f64) * pow2(e)
}
