//! Exact rational and integer linear algebra for the combinatorial side.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::scalar::Real;

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"p/q"`, integers, and plain decimals such as `"-2.5"`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let bad = || ParseRationalError::Malformed(t.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(ParseRationalError::ZeroDenominator(t.to_string()));
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 30 {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let denom = 10i128.pow(frac_part.len() as u32);
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Best rational approximation of an `f64` with a bounded denominator, used
/// when configuration files carry floats for quantities that must be exact.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    parse_rational(&format!("{x}")).ok().or_else(|| {
        let denom = 1i128 << 40;
        Some(Rational::new((x * denom as f64).round() as i128, denom))
    })
}

#[inline]
pub fn to_real<T: Real>(r: &Rational) -> T {
    T::lit(*r.numer() as f64) / T::lit(*r.denom() as f64)
}

pub fn vec_to_real<T: Real>(v: &[Rational]) -> Vec<T> {
    v.iter().map(to_real).collect()
}

pub fn int_vec_to_real<T: Real>(v: &[i64]) -> Vec<T> {
    v.iter().map(|&a| T::lit(a as f64)).collect()
}

pub fn rdot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn idot(a: &[i64], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (&x, y)| acc + Rational::from(x as i128) * y)
}

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col];
        for k in col..=n {
            m[col][k] /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for k in col..=n {
                    let delta = f * m[col][k];
                    m[r][k] -= delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

/// Row-reduces a copy of `rows` and returns its rank.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m = rows.to_vec();
    let ncols = m[0].len();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c];
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c] / pv;
                for k in c..ncols {
                    let d = f * m[r][k];
                    m[i][k] -= d;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of a point set.
pub fn affine_dim(points: &[Vec<Rational>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

/// Basis of the null space `{t : rows · t = 0}`.
pub fn null_space(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c];
        for k in 0..ncols {
            m[r][k] /= pv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for k in 0..ncols {
                    let d = f * m[r][k];
                    m[i][k] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f];
            }
            v
        })
        .collect()
}

/// Determinant of a square integer matrix (Bareiss fraction-free elimination).
pub fn det_i64(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray. Returns the vector and the positive scale factor used.
pub fn primitive_integer(v: &[Rational]) -> Option<(Vec<i64>, Rational)> {
    if v.iter().all(|x| x.is_zero()) {
        return None;
    }
    let lcm = v.iter().fold(1i128, |l, x| l.lcm(x.denom()));
    let ints: Vec<i128> = v.iter().map(|x| (x * Rational::from(lcm)).to_integer()).collect();
    let g = ints.iter().fold(0i128, |g, x| g.gcd(x));
    let out: Vec<i64> = ints.iter().map(|x| i64::try_from(x / g).ok()).collect::<Option<_>>()?;
    Some((out, Rational::new(lcm, g)))
}

pub fn rational_abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("-5/2").unwrap(), Rational::new(-5, 2));
        assert_eq!(parse_rational("-2.5").unwrap(), Rational::new(-5, 2));
        assert_eq!(parse_rational("3").unwrap(), Rational::from(3));
        assert_eq!(parse_rational(".25").unwrap(), Rational::new(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn bareiss_determinant() {
        assert_eq!(det_i64(&[vec![1, 1], vec![0, 1]]), 1);
        assert_eq!(det_i64(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det_i64(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]), 6);
        assert_eq!(det_i64(&[vec![1, 2], vec![2, 4]]), 0);
    }

    #[test]
    fn solve_and_rank() {
        let a = vec![
            vec![Rational::from(1), Rational::from(0)],
            vec![Rational::from(-1), Rational::from(-1)],
        ];
        let x = solve(&a, &[Rational::from(0), Rational::from(-3)]).unwrap();
        assert_eq!(x, vec![Rational::from(0), Rational::from(3)]);
        assert_eq!(rank(&a), 2);
        let ns = null_space(&[vec![Rational::from(1), Rational::from(-1)]], 2);
        assert_eq!(ns, vec![vec![Rational::from(1), Rational::from(1)]]);
    }

    #[test]
    fn primitive_scaling() {
        let (v, k) = primitive_integer(&[Rational::new(1, 2), Rational::new(-3, 4)]).unwrap();
        assert_eq!(v, vec![2, -3]);
        assert_eq!(k, Rational::from(4));
    }
}
