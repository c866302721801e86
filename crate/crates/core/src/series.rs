//! Truncated formal Laurent series in fractional powers of `q`.
//!
//! A series lives on a grid `q^(1/D)`: every exponent is `n / D` for an
//! integer numerator `n`. Coefficients are stored densely from the lowest
//! nonzero exponent up to (but excluding) the precision bound, so every
//! stored coefficient is guaranteed and everything at or past the bound is
//! unknown.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Exponent;

/// Exact truncated series `sum c_n q^(n/grid)`, known for `n < prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactSeries {
    grid: i64,
    lo: i64,
    coeffs: Vec<BigInt>,
}

impl ExactSeries {
    /// Builds a series from coefficients starting at exponent `lo / grid`.
    /// The precision bound is `(lo + coeffs.len()) / grid`.
    pub fn from_parts(grid: i64, lo: i64, coeffs: Vec<BigInt>) -> Self {
        assert!(grid > 0, "grid must be positive");
        let mut s = ExactSeries { grid, lo, coeffs };
        s.normalize();
        s
    }

    /// Integer-grid series from machine integers; `coeffs[i]` multiplies `q^(lo+i)`.
    pub fn from_i64s(lo: i64, coeffs: &[i64]) -> Self {
        Self::from_parts(1, lo, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The zero series known to vanish below `q^prec`.
    pub fn zero(prec: i64) -> Self {
        ExactSeries { grid: 1, lo: prec, coeffs: Vec::new() }
    }

    /// `1 + O(q^prec)`.
    pub fn one(prec: i64) -> Self {
        Self::monomial(BigInt::one(), Exponent::zero(), prec)
    }

    /// `c q^e + O(q^prec)`.
    pub fn monomial(c: BigInt, e: Exponent, prec: i64) -> Self {
        let grid = *e.denom();
        let lo = *e.numer();
        let end = prec * grid;
        if end <= lo {
            return Self::zero(prec);
        }
        let mut coeffs = vec![BigInt::zero(); (end - lo) as usize];
        coeffs[0] = c;
        Self::from_parts(grid, lo, coeffs)
    }

    pub fn grid(&self) -> i64 {
        self.grid
    }

    /// Numerator of the lowest stored exponent (equals the precision
    /// numerator for a zero series).
    pub fn lo_numerator(&self) -> i64 {
        self.lo
    }

    pub fn prec_numerator(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    /// Precision bound as a rational exponent.
    pub fn prec(&self) -> Exponent {
        Exponent::new(self.prec_numerator(), self.grid)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// True when every guaranteed coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the first nonzero coefficient.
    pub fn order(&self) -> Result<Exponent> {
        if self.is_zero() {
            return Err(Error::ZeroUpToPrecision { prec: self.prec() });
        }
        Ok(Exponent::new(self.lo, self.grid))
    }

    /// Leading coefficient, if any.
    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.first()
    }

    /// Coefficient of `q^e`. Exponents off the grid have coefficient zero.
    pub fn coefficient(&self, e: Exponent) -> Result<BigInt> {
        if e >= self.prec() {
            return Err(Error::PrecisionExceeded { requested: e, available: self.prec() });
        }
        let scaled = e * Exponent::from_integer(self.grid);
        if !scaled.is_integer() {
            return Ok(BigInt::zero());
        }
        let n = scaled.to_integer();
        if n < self.lo {
            return Ok(BigInt::zero());
        }
        Ok(self.coeffs[(n - self.lo) as usize].clone())
    }

    /// Coefficient of `q^n` for an integer exponent.
    pub fn coeff_at(&self, n: i64) -> Result<BigInt> {
        self.coefficient(Exponent::from_integer(n))
    }

    /// Iterates `(exponent, coefficient)` over the nonzero guaranteed terms.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (Exponent::new(self.lo + i as i64, self.grid), c))
    }

    /// Same series on the finer grid `q^(1/d)`; `d` must be a multiple of the
    /// current grid.
    pub fn to_grid(&self, d: i64) -> Self {
        assert!(d % self.grid == 0, "grid {d} does not refine {}", self.grid);
        let k = d / self.grid;
        if k == 1 {
            return self.clone();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() * k as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        ExactSeries { grid: d, lo: self.lo * k, coeffs }
    }

    /// Drops everything at or beyond `q^prec`.
    pub fn truncate(&self, prec: Exponent) -> Self {
        if prec >= self.prec() {
            return self.clone();
        }
        let g = self.grid.lcm(prec.denom());
        let s = self.to_grid(g);
        let end = (prec * Exponent::from_integer(g)).to_integer();
        if end <= s.lo {
            return ExactSeries { grid: g, lo: end, coeffs: Vec::new() }.canonical();
        }
        let mut coeffs = s.coeffs;
        coeffs.truncate((end - s.lo) as usize);
        ExactSeries::from_parts(g, s.lo, coeffs)
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: Exponent) -> Self {
        let g = self.grid.lcm(e.denom());
        let s = self.to_grid(g);
        let offset = (e * Exponent::from_integer(g)).to_integer();
        ExactSeries { grid: g, lo: s.lo + offset, coeffs: s.coeffs }.canonical()
    }

    /// Substitutes `q -> q^k` for a positive integer `k`.
    pub fn dilate(&self, k: i64) -> Self {
        assert!(k > 0);
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() * k as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        ExactSeries::from_parts(self.grid, self.lo * k, coeffs)
    }

    /// `U_p`: keeps the coefficients at exponents divisible by `p`,
    /// `sum a(pm) q^m`. Known for `m < ceil(prec / p)`.
    pub fn u_p(&self, p: i64) -> Result<Self> {
        assert!(p > 0);
        let s = if self.grid == 1 { self.clone() } else { self.clone().canonical() };
        if s.grid != 1 {
            return Err(Error::GridError { grid: s.grid });
        }
        let lo = Integer::div_ceil(&s.lo, &p);
        let hi = Integer::div_ceil(&s.prec_numerator(), &p);
        let coeffs = (lo..hi).map(|m| s.coeffs[(p * m - s.lo) as usize].clone()).collect();
        Ok(ExactSeries::from_parts(1, lo, coeffs))
    }

    pub fn neg(&self) -> Self {
        ExactSeries { grid: self.grid, lo: self.lo, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero_like(self.grid, self.prec_numerator());
        }
        ExactSeries { grid: self.grid, lo: self.lo, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let g = self.grid.lcm(&other.grid);
        let a = self.to_grid(g);
        let b = other.to_grid(g);
        let lo = a.lo.min(b.lo);
        let prec = a.prec_numerator().min(b.prec_numerator());
        if prec <= lo {
            return Self::zero_like(g, prec);
        }
        let mut coeffs = vec![BigInt::zero(); (prec - lo) as usize];
        for (i, c) in a.coeffs.iter().enumerate() {
            let n = a.lo + i as i64;
            if n >= prec {
                break;
            }
            coeffs[(n - lo) as usize] += c;
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            let n = b.lo + i as i64;
            if n >= prec {
                break;
            }
            if negate {
                coeffs[(n - lo) as usize] -= c;
            } else {
                coeffs[(n - lo) as usize] += c;
            }
        }
        ExactSeries::from_parts(g, lo, coeffs)
    }

    /// Exact product. The result is known up to
    /// `min(a.prec + ord(b), b.prec + ord(a))`.
    pub fn mul(&self, other: &Self) -> Self {
        let g = self.grid.lcm(&other.grid);
        let a = self.to_grid(g);
        let b = other.to_grid(g);
        let lo = a.lo + b.lo;
        let n = a.coeffs.len().min(b.coeffs.len());
        if n == 0 {
            let prec = (a.prec_numerator() + b.lo).min(b.prec_numerator() + a.lo);
            return Self::zero_like(g, prec);
        }
        ExactSeries::from_parts(g, lo, convolve(&a.coeffs, &b.coeffs, n))
    }

    /// Solves `other * x = self`. The divisor's leading coefficient must be a unit.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let lead = other.leading().ok_or(Error::ZeroUpToPrecision { prec: other.prec() })?;
        if !is_unit(lead) {
            return Err(Error::NonUnitLeading { leading: lead.clone() });
        }
        let g = self.grid.lcm(&other.grid);
        let a = self.to_grid(g);
        let b = other.to_grid(g);
        let lo = a.lo - b.lo;
        let n = a.coeffs.len().min(b.coeffs.len());
        if n == 0 {
            return Ok(Self::zero_like(g, a.prec_numerator() - b.lo));
        }
        Ok(ExactSeries::from_parts(g, lo, solve(&a.coeffs, &b.coeffs, n)))
    }

    /// Multiplicative inverse; the leading coefficient must be `1` or `-1`.
    pub fn invert(&self) -> Result<Self> {
        let lead = self.leading().ok_or(Error::ZeroUpToPrecision { prec: self.prec() })?;
        if !is_unit(lead) {
            return Err(Error::NonUnitLeading { leading: lead.clone() });
        }
        let n = self.coeffs.len();
        let mut one = vec![BigInt::zero(); n];
        one[0] = BigInt::one();
        Ok(ExactSeries::from_parts(self.grid, -self.lo, solve(&one, &self.coeffs, n)))
    }

    /// `k`-th power; negative `k` goes through [`ExactSeries::invert`].
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            let rel = self.coeffs.len() as i64;
            // Relative precision carries over to the constant 1.
            return Ok(ExactSeries::from_parts(self.grid, 0, one_vec(rel as usize)));
        }
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc: Option<ExactSeries> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.expect("k != 0"))
    }

    /// Reduces the grid to the coarsest one carrying every nonzero term.
    /// The precision bound is rounded down when it does not sit on the new grid.
    pub fn canonical(mut self) -> Self {
        let mut g = self.grid;
        for (i, c) in self.coeffs.iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&(self.lo + i as i64));
            }
        }
        if self.coeffs.is_empty() {
            g = g.gcd(&self.lo);
        }
        if g <= 1 {
            return self;
        }
        let prec = Integer::div_floor(&self.prec_numerator(), &g);
        let lo = self.lo / g;
        let keep = (prec - lo).max(0) as usize;
        let coeffs: Vec<BigInt> = self.coeffs.drain(..).step_by(g as usize).take(keep).collect();
        if coeffs.is_empty() {
            return ExactSeries { grid: self.grid / g, lo: prec, coeffs };
        }
        ExactSeries { grid: self.grid / g, lo, coeffs }
    }

    fn zero_like(grid: i64, prec: i64) -> Self {
        ExactSeries { grid, lo: prec, coeffs: Vec::new() }.canonical()
    }

    fn normalize(&mut self) {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if skip > 0 {
            self.coeffs.drain(..skip);
            self.lo += skip as i64;
        }
        let s = std::mem::replace(self, ExactSeries { grid: 1, lo: 0, coeffs: Vec::new() });
        *self = s.canonical();
    }
}

fn one_vec(n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    if n > 0 {
        v[0] = BigInt::one();
    }
    v
}

pub(crate) fn is_unit(c: &BigInt) -> bool {
    c.abs().is_one()
}

/// First `n` coefficients of the product of two dense coefficient vectors.
/// Zero coefficients are skipped and `+-1` multiplications become additions,
/// so a sparse factor (eta products, theta series) costs `O(n * nnz)`.
pub(crate) fn convolve(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let nz_a: Vec<usize> = (0..a.len().min(n)).filter(|&i| !a[i].is_zero()).collect();
    let nz_b: Vec<usize> = (0..b.len().min(n)).filter(|&i| !b[i].is_zero()).collect();
    let (outer, outer_c, inner, inner_c) =
        if nz_a.len() <= nz_b.len() { (&nz_a, a, &nz_b, b) } else { (&nz_b, b, &nz_a, a) };
    let mut out = vec![BigInt::zero(); n];
    for &i in outer {
        let x = &outer_c[i];
        let plus_one = x.is_one();
        let minus_one = !plus_one && (-x).is_one();
        for &j in inner {
            let k = i + j;
            if k >= n {
                break;
            }
            let y = &inner_c[j];
            if plus_one {
                out[k] += y;
            } else if minus_one {
                out[k] -= y;
            } else {
                out[k] += x * y;
            }
        }
    }
    out
}

/// First `n` coefficients of `x` with `b * x = a`, where `b[0]` is `+-1`.
pub(crate) fn solve(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let negate = b[0].is_negative();
    let nz_b: Vec<(usize, &BigInt)> = (1..b.len().min(n)).filter(|&i| !b[i].is_zero()).map(|i| (i, &b[i])).collect();
    let mut x: Vec<BigInt> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = a.get(k).cloned().unwrap_or_default();
        for &(i, bi) in &nz_b {
            if i > k {
                break;
            }
            let prev = &x[k - i];
            if prev.is_zero() {
                continue;
            }
            if bi.is_one() {
                acc -= prev;
            } else if (-bi).is_one() {
                acc += prev;
            } else {
                acc -= bi * prev;
            }
        }
        if negate {
            acc = -acc;
        }
        x.push(acc);
    }
    x
}

impl fmt::Display for ExactSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if mag.is_one() && !e.is_zero() { String::new() } else { mag.to_string() };
            if e.is_zero() {
                write!(f, "{coef}")?;
            } else if e.is_one() {
                write!(f, "{coef}q")?;
            } else {
                write!(f, "{coef}q^({e})")?;
            }
        }
        if first {
            write!(f, "O(q^({}))", self.prec())
        } else {
            write!(f, " + O(q^({}))", self.prec())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(lo: i64, c: &[i64]) -> ExactSeries {
        ExactSeries::from_i64s(lo, c)
    }

    fn geometric(prec: i64) -> ExactSeries {
        s(0, &vec![1; prec as usize])
    }

    #[test]
    fn add_small_polynomials() {
        let a = s(0, &[1, 1, 0, 0, 0]);
        let b = s(0, &[-1, 0, 1, 0, 0]);
        assert_eq!(a.add(&b), s(1, &[1, 1, 0, 0]));
    }

    #[test]
    fn additive_inverse_keeps_precision() {
        let f = s(-2, &[3, 0, -7, 1, 9]);
        let z = f.add(&f.neg());
        assert!(z.is_zero());
        assert_eq!(z.prec(), f.prec());
    }

    #[test]
    fn product_with_geometric_series() {
        let a = s(0, &[1, -1, 0, 0, 0, 0, 0, 0]);
        let p = a.mul(&geometric(8));
        assert_eq!(p, ExactSeries::one(8));
    }

    #[test]
    fn product_precision_rule() {
        let a = s(2, &[1, 5, 5]); // q^2 + ..., prec 5
        let b = s(-1, &[1, 1, 1, 1, 1, 1]); // prec 5
        let p = a.mul(&b);
        // min(5 + (-1), 5 + 2) = 4
        assert_eq!(p.prec(), Exponent::from_integer(4));
        assert_eq!(p.order().unwrap(), Exponent::from_integer(1));
    }

    #[test]
    fn invert_one_minus_q() {
        let a = s(0, &[1, -1, 0, 0, 0, 0]);
        assert_eq!(a.invert().unwrap(), geometric(6));
    }

    #[test]
    fn invert_rejects_non_unit() {
        let a = s(0, &[2, 1, 0]);
        assert!(matches!(a.invert(), Err(Error::NonUnitLeading { .. })));
    }

    #[test]
    fn invert_is_an_involution() {
        let a = s(-3, &[-1, 4, 0, 2, -5, 7, 1, 1]);
        assert_eq!(a.invert().unwrap().invert().unwrap(), a);
    }

    #[test]
    fn pow_basics() {
        let a = s(0, &[1, -1, 0, 0, 0]);
        assert_eq!(a.pow(0).unwrap(), ExactSeries::one(5));
        assert_eq!(a.pow(2).unwrap(), s(0, &[1, -2, 1, 0, 0]));
        let q = s(1, &[1, 3, 0, 0]);
        assert_eq!(q.pow(3).unwrap().order().unwrap(), Exponent::from_integer(3));
        assert_eq!(q.pow(-2).unwrap().order().unwrap(), Exponent::from_integer(-2));
    }

    #[test]
    fn coefficient_and_errors() {
        let a = s(1, &[1, -2, 3]);
        assert_eq!(a.coeff_at(0).unwrap(), BigInt::zero());
        assert_eq!(a.coeff_at(-5).unwrap(), BigInt::zero());
        assert_eq!(a.coeff_at(2).unwrap(), BigInt::from(-2));
        assert!(matches!(a.coeff_at(4), Err(Error::PrecisionExceeded { .. })));
        assert!(matches!(ExactSeries::zero(3).order(), Err(Error::ZeroUpToPrecision { .. })));
    }

    #[test]
    fn fractional_grid_shift_and_canonical() {
        let a = s(0, &[1, 1, 1, 1]).shift(Exponent::new(1, 24));
        assert_eq!(a.grid(), 24);
        assert_eq!(a.order().unwrap(), Exponent::new(1, 24));
        let b = a.shift(Exponent::new(23, 24));
        assert_eq!(b.grid(), 1);
        assert_eq!(b, s(1, &[1, 1, 1, 1]));
        // Off-grid exponents read as zero.
        assert_eq!(a.coefficient(Exponent::new(1, 2)).unwrap(), BigInt::zero());
    }

    #[test]
    fn mixed_grid_arithmetic() {
        let a = s(0, &[1, 2, 3]).shift(Exponent::new(1, 2));
        let b = s(0, &[1, 1, 1]).shift(Exponent::new(1, 3));
        let p = a.mul(&b);
        assert_eq!(p.grid(), 6);
        assert_eq!(p.order().unwrap(), Exponent::new(5, 6));
        assert_eq!(p.coefficient(Exponent::new(11, 6)).unwrap(), BigInt::from(3));
    }

    #[test]
    fn dilate_substitutes_powers() {
        let a = s(0, &[1, -1, -1]);
        let d = a.dilate(3);
        assert_eq!(d, s(0, &[1, 0, 0, -1, 0, 0, -1, 0, 0]));
    }

    #[test]
    fn div_matches_mul() {
        let a = s(0, &[2, 3, 5, 7, 11, 13]);
        let b = s(1, &[-1, 2, 0, 4, 1, 1]);
        let x = a.div(&b).unwrap();
        assert_eq!(x.mul(&b), a);
    }

    #[test]
    fn display_is_readable() {
        let a = s(0, &[1, -2, 0, 3]);
        assert_eq!(a.to_string(), "1 - 2q + 3q^(3) + O(q^(4))");
    }
}
