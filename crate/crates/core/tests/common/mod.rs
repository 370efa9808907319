//! Independent exact oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls the library's Racah sum, binomial form or simplex.
#![allow(dead_code)]

use afbc_core::exact::{rat, Rational, Sign};
use num_traits::{One, Signed, Zero};

/// Signed squares `c(m_A)^2 * sign` of the highest-weight state `|J=j, M=j>` in
/// `j (x) j_B`, from the recursion `J_+ |j j> = 0`:
///
/// `c(m+1) sqrt((j_B - m_B)(j_B + m_B + 1)) = -c(m) sqrt((j - m)(j + m + 1))`,
/// with `m_B = j - m - 1`, fixed by normalization and `c(j) > 0`.
///
/// Returns `(twice_m_a, sign, square)` for every `m_A` in `-j..=j`.
pub fn ladder_cg(twice_j: i64, j_b: i64) -> Vec<(i64, Sign, Rational)> {
    let tj = twice_j;
    let tjb = 2 * j_b;
    // lowest m_A with |m_B| <= j_B
    let tm_min = (tj - tjb).max(-tj);
    let mut out: Vec<(i64, Rational)> = Vec::new();
    if j_b > tj {
        return (-tj..=tj).step_by(2).map(|tm| (tm, Sign::Zero, Rational::zero())).collect();
    }
    let mut sq = Rational::one();
    let mut tm = tm_min;
    out.push((tm, sq.clone()));
    while tm < tj {
        let tmb_next = tj - tm - 2; // 2 m_B after raising m_A
        let num = rat((tj - tm) * (tj + tm + 2), 4);
        let den = rat((tjb - tmb_next) * (tjb + tmb_next + 2), 4);
        sq = sq * num / den;
        tm += 2;
        out.push((tm, sq.clone()));
    }
    let norm: Rational = out.iter().map(|(_, s)| s.clone()).sum();
    (-tj..=tj)
        .step_by(2)
        .map(|tm| match out.iter().find(|(m, _)| *m == tm) {
            Some((_, s)) => {
                let sign = if ((tj - tm) / 2) % 2 == 0 { Sign::Positive } else { Sign::Negative };
                (tm, sign, s / &norm)
            }
            None => (tm, Sign::Zero, Rational::zero()),
        })
        .collect()
}

/// `K_m` coefficient rows over `beta`, built from the ladder squares.
pub fn kernel_rows(twice_j: i64) -> Vec<Vec<Rational>> {
    let width = (twice_j + 1) as usize;
    let cols: Vec<Vec<(i64, Sign, Rational)>> = (0..width as i64).map(|jb| ladder_cg(twice_j, jb)).collect();
    (0..width)
        .map(|row| {
            (0..width)
                .map(|jb| {
                    let c = &cols[jb][row].2;
                    if jb % 2 == 0 {
                        c.clone()
                    } else {
                        -c.clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// Unique solution of the square system `a x = b`, if nonsingular.
pub fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            let pivot_row = a[col].clone();
            for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &f * p;
            }
            let d = &f * &b[col];
            b[r] -= d;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Minimum of `sum |K_m|` over feasible `beta`, by enumerating every vertex of
/// the arrangement cut by `beta_k = 0` and `K_m = 0` inside the feasible plane.
/// A convex piecewise-linear function on a polytope attains its minimum at one
/// of these points.
pub fn vertex_minimum(twice_j: i64) -> (Rational, Vec<Rational>) {
    let n = (twice_j + 1) as usize;
    let k = kernel_rows(twice_j);
    let unit = |i: usize| -> Vec<Rational> {
        (0..n).map(|c| if c == i { Rational::one() } else { Rational::zero() }).collect()
    };
    let mut hyper: Vec<Vec<Rational>> = (0..n).map(unit).collect();
    hyper.extend(k.iter().cloned());
    let norm: Vec<Rational> = vec![Rational::one(); n];
    let alt: Vec<Rational> = (0..n).map(|i| if i % 2 == 0 { Rational::one() } else { -Rational::one() }).collect();
    let eval = |x: &[Rational]| -> Rational {
        k.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>().abs()).sum()
    };
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut chosen = Vec::new();
    combinations(hyper.len(), n - 2, 0, &mut chosen, &mut |idx| {
        let mut a = vec![norm.clone(), alt.clone()];
        let mut b = vec![Rational::one(), Rational::zero()];
        for &i in idx {
            a.push(hyper[i].clone());
            b.push(Rational::zero());
        }
        if let Some(x) = solve_exact(a, b) {
            if x.iter().all(|v| !v.is_negative()) {
                let f = eval(&x);
                if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                    best = Some((f, x));
                }
            }
        }
    });
    best.expect("feasible set is nonempty")
}

fn combinations(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        combinations(n, k, i + 1, cur, f);
        cur.pop();
    }
}

/// `C(n, k)` by the multiplicative formula.
pub fn choose(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
