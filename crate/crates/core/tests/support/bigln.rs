//! Arbitrary-precision natural logarithm on fixed-point big integers.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Fractional bits carried by every fixed-point value.
pub const PREC: u32 = 256;

fn one() -> BigInt {
    BigInt::from(1) << PREC
}

/// atanh(num/den) in fixed point, by the odd power series.
fn atanh_ratio(num: &BigInt, den: &BigInt) -> BigInt {
    let y = (num << PREC) / den;
    let y2 = (&y * &y) >> PREC;
    let mut power = y.clone();
    let mut sum = BigInt::from(0);
    let mut k = 1u32;
    while power != BigInt::from(0) {
        sum += &power / BigInt::from(k);
        power = (&power * &y2) >> PREC;
        k += 2;
    }
    sum
}

/// ln(m) for a positive integer: m = 2^k * f with f in [1, 2), and
/// ln f = 2 atanh((f - 1) / (f + 1)).
pub fn ln_int(m: u64) -> BigInt {
    assert!(m > 0);
    let k = 63 - m.leading_zeros();
    let pow = BigInt::from(1u64) << k;
    let m = BigInt::from(m);
    let ln2 = 2 * atanh_ratio(&BigInt::from(1), &BigInt::from(3));
    let frac = 2 * atanh_ratio(&(&m - &pow), &(&m + &pow));
    ln2 * BigInt::from(k) + frac
}

/// Exact fixed-point image of a finite f64.
pub fn from_f64(x: f64) -> BigInt {
    assert!(x.is_finite());
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let m = BigInt::from(mantissa) * sign;
    let shift = e + PREC as i64;
    if shift >= 0 {
        m << shift as u32
    } else {
        m >> (-shift) as u32
    }
}

pub fn to_f64(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits > 900 {
        let drop = bits - 900;
        (x >> drop).to_f64().unwrap() * 2f64.powi(drop as i32 - PREC as i32)
    } else {
        x.to_f64().unwrap() * 2f64.powi(-(PREC as i32))
    }
}

/// `score * (1/|c|) * Σ ln(n / w)` with every step in fixed point.
pub fn idf_score(score: f64, n: u64, freqs: &[u64]) -> f64 {
    let ln_n = ln_int(n);
    let sum: BigInt = freqs.iter().map(|&w| &ln_n - ln_int(w)).sum();
    let product = (from_f64(score) * sum) >> PREC;
    to_f64(&(product / BigInt::from(freqs.len())))
}
