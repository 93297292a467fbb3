//! Exact univariate polynomials over the rationals, used to decide the sign
//! of an even trigonometric polynomial `Σ c_k cos(kθ)` on the whole circle
//! through the substitution `t = cos θ`, `cos kθ = T_k(t)`.

use num_traits::{One, Signed, Zero};

use crate::scalar::{Rational, Scalar};

/// Coefficients from low to high degree, without trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `t - root`.
    pub fn linear(root: Rational) -> Self {
        Self::from_coeffs(vec![-root, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        let inv_lead = divisor.lead().recip();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv_lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    let t = &c * d;
                    rem[k + j] -= t;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Divides by `|lead|`; keeps the sign pattern.
    fn normalized(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().abs();
        self.scale(&l.recip())
    }

    fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().clone();
        self.scale(&l.recip())
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Chebyshev polynomials `T_0, …, T_n`.
    pub fn chebyshev_up_to(n: usize) -> Vec<Poly> {
        let mut out = vec![Poly::constant(Rational::one())];
        if n >= 1 {
            out.push(Poly::from_coeffs(vec![Rational::zero(), Rational::one()]));
        }
        let two_t = Poly::from_coeffs(vec![Rational::zero(), Rational::from_int(2)]);
        for k in 2..=n {
            let next = two_t.mul(&out[k - 1]).sub(&out[k - 2]);
            out.push(next);
        }
        out
    }

    /// `Σ_k c_k cos(kθ)` written as a polynomial in `t = cos θ`.
    pub fn from_cosine_series(terms: &[(usize, Rational)]) -> Poly {
        let n = terms.iter().map(|(k, _)| *k).max().unwrap_or(0);
        let cheb = Self::chebyshev_up_to(n);
        terms
            .iter()
            .fold(Poly::zero(), |acc, (k, c)| acc.add(&cheb[*k].scale(c)))
    }

    /// Yun square-free factorisation: `self = c · Π a_i^i`; returns the
    /// `a_i` with their multiplicities.
    fn squarefree_factors(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative();
        let g = self.gcd(&d);
        let mut c = self.div_rem(&g).0;
        let mut w = d.div_rem(&g).0.sub(&c.derivative());
        let mut i = 1;
        while c.degree().unwrap_or(0) > 0 {
            let a = c.gcd(&w);
            c = c.div_rem(&a).0;
            w = w.div_rem(&a).0.sub(&c.derivative());
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Product of the square-free factors of odd multiplicity; the
    /// polynomial changes sign exactly at the real roots of this factor.
    fn odd_part(&self) -> Poly {
        self.squarefree_factors()
            .into_iter()
            .filter(|(_, m)| m % 2 == 1)
            .fold(Poly::constant(Rational::one()), |acc, (a, _)| acc.mul(&a))
    }

    fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return Poly::constant(Rational::one());
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.normalized(), self.derivative().normalized()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()).normalized());
        }
        seq
    }

    fn sign_variations(seq: &[Poly], t: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for p in seq {
            let v = p.eval(t);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct roots in the open interval `(-1, 1)`.
    fn roots_in_open_unit_interval(&self) -> usize {
        let mut p = self.squarefree_part();
        let one = Rational::one();
        for end in [one.clone(), -one.clone()] {
            if p.eval(&end).is_zero() {
                p = p.div_rem(&Poly::linear(end)).0;
            }
        }
        if p.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let seq = p.sturm_sequence();
        Self::sign_variations(&seq, &-one.clone()) - Self::sign_variations(&seq, &one)
    }

    /// A value of the polynomial at a point where it does not vanish, or
    /// zero if it is the zero polynomial.
    fn nonvanishing_sample(&self) -> Rational {
        let n = self.degree().unwrap_or(0) as i64;
        (0..=n + 1)
            .map(|j| Rational::from_ratio(j, n + 2))
            .map(|t| self.eval(&t))
            .find(|v| !v.is_zero())
            .unwrap_or_else(Rational::zero)
    }

    /// Exact test of `p(t) ≥ 0` for all `t ∈ [-1, 1]`.
    pub fn nonnegative_on_unit_interval(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.odd_part().roots_in_open_unit_interval() > 0 {
            return false;
        }
        // no sign change inside; sign at the endpoints follows by continuity
        !self.nonvanishing_sample().is_negative()
    }

    /// Exact test of `p(t) > 0` for all `t ∈ [-1, 1]`.
    pub fn positive_on_unit_interval(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let one = Rational::one();
        if self.eval(&one).is_zero() || self.eval(&-one).is_zero() {
            return false;
        }
        self.roots_in_open_unit_interval() == 0 && self.eval(&Rational::zero()).is_positive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn p(c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&v| q(v, 1)).collect())
    }

    #[test]
    fn chebyshev_values() {
        let t = Poly::chebyshev_up_to(5);
        assert_eq!(t[2], p(&[-1, 0, 2]));
        assert_eq!(t[3], p(&[0, -3, 0, 4]));
        for (k, tk) in t.iter().enumerate() {
            let x = 0.3f64;
            let exact = tk.eval(&q(3, 10)).to_f64();
            assert!((exact - (k as f64 * x.acos()).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn division() {
        let a = p(&[-1, 0, 1]);
        let (qq, r) = a.div_rem(&p(&[1, 1]));
        assert_eq!(qq, p(&[-1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn nonnegativity_cases() {
        // 1 + t: touches zero at the endpoint
        assert!(p(&[1, 1]).nonnegative_on_unit_interval());
        assert!(!p(&[1, 1]).positive_on_unit_interval());
        // (t - 1/2)^2: interior double root
        let sq = Poly::linear(q(1, 2)).mul(&Poly::linear(q(1, 2)));
        assert!(sq.nonnegative_on_unit_interval());
        // t - 1/2 changes sign
        assert!(!Poly::linear(q(1, 2)).nonnegative_on_unit_interval());
        // (t-1/2)^3 (t+2): triple root, changes sign
        let cube = sq.mul(&Poly::linear(q(1, 2))).mul(&p(&[2, 1]));
        assert!(!cube.nonnegative_on_unit_interval());
        // negative constant
        assert!(!p(&[-1]).nonnegative_on_unit_interval());
        assert!(p(&[3]).positive_on_unit_interval());
        // t^2 + 1/100 strictly positive
        assert!(p(&[0, 0, 1]).add(&Poly::constant(q(1, 100))).positive_on_unit_interval());
        // t - 2 negative on the whole interval, no roots inside
        assert!(!p(&[-2, 1]).nonnegative_on_unit_interval());
    }

    #[test]
    fn cosine_series_of_fejer_like() {
        // 2 - 2cos(2θ) = 4 - 4t^2 ≥ 0, zeros at both endpoints
        let poly = Poly::from_cosine_series(&[(0, q(2, 1)), (2, q(-2, 1))]);
        assert_eq!(poly, p(&[4, 0, -4]));
        assert!(poly.nonnegative_on_unit_interval());
        // 2 - 2cos(3θ) has an interior double root at t = -1/2
        let poly = Poly::from_cosine_series(&[(0, q(2, 1)), (3, q(-2, 1))]);
        assert!(poly.nonnegative_on_unit_interval());
        assert!(!poly.positive_on_unit_interval());
        // 1 - 2cos(3θ) dips below zero
        let poly = Poly::from_cosine_series(&[(0, q(1, 1)), (3, q(-2, 1))]);
        assert!(!poly.nonnegative_on_unit_interval());
    }
}
