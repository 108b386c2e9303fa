use super::{padic::padic_val, reduce_mod, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense univariate polynomial over Q, coefficients stored from degree 0 upwards.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// c * t^n
    pub fn monomial(c: Rational, n: usize) -> Self {
        let mut v = vec![Rational::zero(); n + 1];
        v[n] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// t^n f(1/t); requires n >= deg f.
    pub fn reversed(&self, n: usize) -> Self {
        let mut v = vec![Rational::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Self::new(v)
    }

    /// f(t0 + mu z) as a polynomial in z.
    pub fn substitute_linear(&self, t0: &Rational, mu: &Rational) -> Self {
        let lin = Polynomial::new(vec![t0.clone(), mu.clone()]);
        let mut acc = Polynomial::default();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Polynomial::constant(c.clone());
        }
        acc
    }

    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Polynomial::default(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = &r[i] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = &r[i - dd + j] - &c * dc;
            }
            q[i - dd] = c;
        }
        (Polynomial::new(q), Polynomial::new(r))
    }

    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.leading();
        a.scale(&(Rational::one() / lc))
    }

    /// Resultant via the Sylvester matrix.
    pub fn resultant(&self, other: &Polynomial) -> Rational {
        let (Some(m), Some(n)) = (self.degree(), other.degree()) else {
            return Rational::zero();
        };
        let size = m + n;
        if size == 0 {
            return Rational::one();
        }
        let mut mat = vec![vec![Rational::zero(); size]; size];
        for i in 0..n {
            for j in 0..=m {
                mat[i][i + j] = self.coeffs[m - j].clone();
            }
        }
        for i in 0..m {
            for j in 0..=n {
                mat[n + i][i + j] = other.coeffs[n - j].clone();
            }
        }
        determinant(mat)
    }

    pub fn discriminant(&self) -> Rational {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return Rational::one();
        }
        let r = self.resultant(&self.derivative()) / self.leading();
        if (n * (n - 1) / 2) % 2 == 1 {
            -r
        } else {
            r
        }
    }

    /// Minimum p-adic valuation of the coefficients.
    pub fn content_val(&self, p: &BigInt) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| padic_val(c, p)).min()
    }

    /// Lowest common denominator L, so that L * f has integer coefficients.
    pub fn common_denominator(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Coefficients reduced modulo m; None when a denominator is not invertible.
    pub fn residues(&self, m: &BigInt) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| reduce_mod(c, m)).collect()
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let seq = self.sturm_sequence();
        let sign_at = |pos: bool| -> Vec<i8> {
            seq.iter()
                .map(|p| {
                    let s = sign(&p.leading());
                    let d = p.degree().unwrap_or(0);
                    if pos || d % 2 == 0 {
                        s
                    } else {
                        -s
                    }
                })
                .collect()
        };
        variations(&sign_at(false)) - variations(&sign_at(true))
    }

    /// Distinct real roots in the half-open interval (lo, hi].
    pub fn count_roots_in(&self, lo: &Rational, hi: &Rational) -> usize {
        let seq = self.sturm_sequence();
        let at = |x: &Rational| variations(&seq.iter().map(|p| sign(&p.eval(x))).collect::<Vec<_>>());
        at(lo).saturating_sub(at(hi))
    }

    fn sturm_sequence(&self) -> Vec<Polynomial> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(-&r);
        }
        seq.pop();
        seq
    }

    /// Every real root has absolute value below this bound.
    pub fn root_bound(&self) -> Rational {
        let lc = self.leading().abs();
        let mut m = Rational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let r = c.abs() / &lc;
            if r > m {
                m = r;
            }
        }
        m + Rational::one()
    }
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(signs: &[i8]) -> usize {
    let nz: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let d = &f * &m[col][c];
                m[r][c] -= d;
            }
        }
    }
    det
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::default();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Polynomial::new(v)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn arithmetic_and_reversal() {
        let f = Polynomial::from_ints(&[-1, 0, 1]);
        let g = Polynomial::from_ints(&[-4, 0, 1]);
        let fg = &f * &g;
        assert_eq!(fg, Polynomial::from_ints(&[4, 0, -5, 0, 1]));
        assert_eq!(fg.eval(&rat(2)), rat(0));
        assert_eq!(fg.reversed(4), Polynomial::from_ints(&[1, 0, -5, 0, 4]));
        assert_eq!(f.substitute_linear(&rat(1), &rat(5)), Polynomial::from_ints(&[0, 10, 25]));
        let (q, r) = fg.div_rem(&f);
        assert_eq!(q, g);
        assert!(r.is_zero());
    }

    #[test]
    fn discriminants() {
        assert_eq!(Polynomial::from_ints(&[-1, 0, 1]).discriminant(), rat(4));
        assert_eq!(Polynomial::from_ints(&[1, 2, 1]).discriminant(), rat(0));
        assert_eq!(Polynomial::from_ints(&[1, 0, 0, 0, 1]).discriminant(), rat(256));
        assert_eq!(Polynomial::from_ints(&[1, 0, 1]).scale(&ratio(1, 2)).discriminant(), rat(-1));
    }

    #[test]
    fn sturm_counts() {
        let f = Polynomial::from_ints(&[4, 0, -5, 0, 1]);
        assert_eq!(f.count_real_roots(), 4);
        assert_eq!(f.count_roots_in(&rat(0), &rat(3)), 2);
        let g = Polynomial::from_ints(&[-2, 0, -2, 0, -1]);
        assert_eq!(g.count_real_roots(), 0);
        let h = Polynomial::from_ints(&[-1, 0, 2, 0, -1]);
        assert_eq!(h.count_real_roots(), 2);
    }
}
