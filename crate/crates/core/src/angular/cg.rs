use std::io::{self, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{AngularError, SpinJ};
use crate::exact::{binomial_int, factorial, Rational, SignedSqrtRational};

/// `C^2(j, m_A, j_B, j - m_A, j, j)` from the closed binomial form
///
/// ```text
/// C(j - m_A + j_B, j - m_A) C(j + m_A, j_B - j + m_A) / C(2j + j_B + 1, 2j + 1)
/// ```
///
/// with binomials outside their range read as zero. The form is exact for every
/// `m_A` in `-j..=j` and for half-integer `j`, which the Racah cross-check in the
/// tests confirms.
pub fn cg_squared(j: SpinJ, twice_m_a: i32, j_b: u32) -> Result<Rational, AngularError> {
    j.check_projection(twice_m_a)?;
    j.check_token(j_b)?;
    let tj = j.twice() as i64;
    let tm = twice_m_a as i64;
    let jb = j_b as i64;
    let down = (tj - tm) / 2; // j - m_A
    let up = (tj + tm) / 2; // j + m_A
    let num = binomial_int(down + jb, down) * binomial_int(up, jb - down);
    let den = binomial_int(tj + jb + 1, tj + 1);
    Ok(Rational::new(num, den))
}

/// Signed `C(j, m_A, j_B, j - m_A, j, j)` in the Condon-Shortley convention.
pub fn cg_signed(j: SpinJ, twice_m_a: i32, j_b: u32) -> Result<SignedSqrtRational, AngularError> {
    j.check_projection(twice_m_a)?;
    j.check_token(j_b)?;
    let tj = j.twice() as i64;
    let tm = twice_m_a as i64;
    let tjb = 2 * j_b as i64;
    Ok(clebsch_gordan(tj, tm, tjb, tj - tm, tj, tj))
}

/// General `<j1 m1; j2 m2 | J M>` by the Racah sum formula, all arguments doubled.
///
/// Returns zero when the selection rules fail (projection mismatch, triangle
/// inequality, parity, or `|m| > j`).
pub fn clebsch_gordan(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tjj: i64, tmm: i64) -> SignedSqrtRational {
    let zero = SignedSqrtRational::zero();
    if tm1 + tm2 != tmm || tm1.abs() > tj1 || tm2.abs() > tj2 || tmm.abs() > tjj {
        return zero;
    }
    if tjj < (tj1 - tj2).abs() || tjj > tj1 + tj2 {
        return zero;
    }
    let halves = [tj1 + tm1, tj2 + tm2, tjj + tmm, tj1 + tj2 + tjj];
    if halves.iter().any(|h| h % 2 != 0) {
        return zero;
    }
    // all of the following are nonnegative integers once the checks above pass
    let h = |x: i64| -> u64 { (x / 2) as u64 };
    let f = |x: i64| -> BigInt { factorial(h(x)) };

    let pre_num = BigInt::from(tjj + 1)
        * f(tjj + tj1 - tj2)
        * f(tjj - tj1 + tj2)
        * f(tj1 + tj2 - tjj)
        * f(tjj + tmm)
        * f(tjj - tmm)
        * f(tj1 - tm1)
        * f(tj1 + tm1)
        * f(tj2 - tm2)
        * f(tj2 + tm2);
    let pre_den = factorial(h(tj1 + tj2 + tjj) + 1);
    let prefactor = Rational::new(pre_num, pre_den);

    let a = [tj1 + tj2 - tjj, tj1 - tm1, tj2 + tm2];
    let b = [tjj - tj2 + tm1, tjj - tj1 - tm2];
    let k_max = a.iter().map(|&x| x / 2).min().unwrap();
    let k_min = b.iter().map(|&x| (-x / 2).max(0)).max().unwrap();
    let mut sum = Rational::zero();
    for k in k_min..=k_max {
        let tk = 2 * k;
        let den = factorial(k as u64) * f(a[0] - tk) * f(a[1] - tk) * f(a[2] - tk) * f(b[0] + tk) * f(b[1] + tk);
        let term = Rational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return zero;
    }
    let square = prefactor * &sum * &sum;
    let signed = if sum.is_negative() { -square } else { square };
    SignedSqrtRational::from_signed_square(signed)
}

/// CSV table of `C^2` for one `j`: `twice_j,twice_m_a,twice_j_b,numerator,denominator,sign`.
pub fn write_cg_table<W: Write>(j: SpinJ, mut w: W) -> io::Result<()> {
    writeln!(w, "twice_j,twice_m_a,twice_j_b,numerator,denominator,sign")?;
    for tm in j.twice_projections() {
        for j_b in 0..=j.twice() {
            let c = cg_signed(j, tm, j_b).expect("indices enumerated in range");
            let sq = c.square();
            writeln!(w, "{},{},{},{},{},{}", j.twice(), tm, 2 * j_b, sq.numer(), sq.denom(), c.sign().as_i8())?;
        }
    }
    Ok(())
}
