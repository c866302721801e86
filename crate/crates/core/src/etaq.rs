//! Eta quotients, generalized eta quotients and their exact q-expansions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::p2;
use crate::error::{Error, Result};
use crate::series::ExactSeries;
use crate::Exponent;

/// `prod_{d | N} eta(d tau)^{m_d}`. Absent divisors have exponent 0; the
/// empty product is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaQuotient {
    level: i64,
    exps: BTreeMap<i64, i64>,
}

impl EtaQuotient {
    pub fn new(level: i64, exps: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidQuotient(format!("level {level} is not positive")));
        }
        let mut map = BTreeMap::new();
        for (d, m) in exps {
            if d < 1 || level % d != 0 {
                return Err(Error::InvalidQuotient(format!("{d} does not divide level {level}")));
            }
            *map.entry(d).or_insert(0) += m;
        }
        map.retain(|_, m| *m != 0);
        Ok(EtaQuotient { level, exps: map })
    }

    /// The constant function 1 at the given level.
    pub fn one(level: i64) -> Self {
        EtaQuotient { level, exps: BTreeMap::new() }
    }

    /// Builds the eta quotient matching `prod J_d^{m_d}`, where
    /// `J_d = (q^d; q^d)_inf`. Returns the quotient and the exponent `s` with
    /// `prod J_d^{m_d} = q^s * quotient`.
    pub fn from_j(level: i64, exps: &[(i64, i64)]) -> Result<(Self, Exponent)> {
        let f = Self::new(level, exps.iter().copied())?;
        let s = -f.order_at_infinity();
        Ok((f, s))
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn exps(&self) -> &BTreeMap<i64, i64> {
        &self.exps
    }

    pub fn exponent(&self, d: i64) -> i64 {
        self.exps.get(&d).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Same product viewed at a level that is a multiple of the current one.
    pub fn at_level(&self, level: i64) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::InvalidQuotient(format!("level {level} is not a multiple of {}", self.level)));
        }
        Ok(EtaQuotient { level, exps: self.exps.clone() })
    }

    /// Product of two quotients; the level becomes the lcm.
    pub fn mul(&self, other: &Self) -> Self {
        let level = num_integer::lcm(self.level, other.level);
        let exps = self.exps.iter().chain(other.exps.iter()).map(|(&d, &m)| (d, m));
        Self::new(level, exps).expect("divisors of both levels divide the lcm")
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.level, self.exps.iter().map(|(&d, &m)| (d, m * k))).expect("same divisors")
    }

    /// `f(k tau)`: every `eta(d tau)` becomes `eta(k d tau)`.
    pub fn dilate(&self, k: i64) -> Self {
        Self::new(self.level * k, self.exps.iter().map(|(&d, &m)| (d * k, m))).expect("scaled divisors")
    }

    /// `sum m_d`.
    pub fn weight_sum(&self) -> i64 {
        self.exps.values().sum()
    }

    /// `sum d m_d / 24`, the leading exponent of the q-expansion.
    pub fn order_at_infinity(&self) -> Exponent {
        Exponent::new(self.exps.iter().map(|(d, m)| d * m).sum(), 24)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.exps.iter().map(|(d, m)| format!("{d}^{m}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `prod eta_{delta,g}^{r_{delta,g}}` with `0 < g < delta`, `delta | N`.
/// Exponents are half-integers when `g = delta / 2` and integers otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenEtaQuotient {
    level: i64,
    exps: BTreeMap<(i64, i64), Exponent>,
}

impl GenEtaQuotient {
    pub fn new(level: i64, exps: impl IntoIterator<Item = ((i64, i64), Exponent)>) -> Result<Self> {
        if level < 1 {
            return Err(Error::InvalidQuotient(format!("level {level} is not positive")));
        }
        let mut map: BTreeMap<(i64, i64), Exponent> = BTreeMap::new();
        for ((delta, g), r) in exps {
            if delta < 1 || level % delta != 0 {
                return Err(Error::InvalidQuotient(format!("{delta} does not divide level {level}")));
            }
            if g <= 0 || g >= delta {
                return Err(Error::InvalidQuotient(format!("need 0 < g < delta, got ({delta},{g})")));
            }
            let entry = map.entry((delta, g)).or_insert_with(Exponent::zero);
            *entry += r;
        }
        map.retain(|_, r| !r.is_zero());
        for (&(delta, g), r) in &map {
            let half_ok = 2 * g == delta && (*r * Exponent::from_integer(2)).is_integer();
            if !r.is_integer() && !half_ok {
                return Err(Error::InvalidQuotient(format!("exponent {r} of eta_({delta},{g}) must be an integer")));
            }
        }
        Ok(GenEtaQuotient { level, exps: map })
    }

    pub fn one(level: i64) -> Self {
        GenEtaQuotient { level, exps: BTreeMap::new() }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn exps(&self) -> &BTreeMap<(i64, i64), Exponent> {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn at_level(&self, level: i64) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::InvalidQuotient(format!("level {level} is not a multiple of {}", self.level)));
        }
        Ok(GenEtaQuotient { level, exps: self.exps.clone() })
    }

    /// Product; the level becomes the lcm.
    pub fn mul(&self, other: &Self) -> Self {
        let level = num_integer::lcm(self.level, other.level);
        let exps = self.exps.iter().chain(other.exps.iter()).map(|(&k, &r)| (k, r));
        Self::new(level, exps).expect("keys of both factors are valid at the lcm")
    }

    pub fn pow(&self, k: i64) -> Self {
        let exps = self.exps.iter().map(|(&key, &r)| (key, r * k));
        Self::new(self.level, exps).expect("same keys")
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.pow(-1))
    }

    /// Leading exponent `sum r (delta/2) P_2(g/delta)`.
    pub fn order_at_infinity(&self) -> Exponent {
        self.exps.iter().map(|(&(delta, g), r)| *r * gen_prefactor(delta, g)).fold(Exponent::zero(), |a, b| a + b)
    }
}

impl fmt::Display for GenEtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.exps.iter().map(|((d, g), r)| format!("{d},{g}^{r}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// One product in a linear combination.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Eta(EtaQuotient),
    Gen(GenEtaQuotient),
}

impl Term {
    pub fn level(&self) -> i64 {
        match self {
            Term::Eta(f) => f.level(),
            Term::Gen(f) => f.level(),
        }
    }

    pub fn order_at_infinity(&self) -> Exponent {
        match self {
            Term::Eta(f) => f.order_at_infinity(),
            Term::Gen(f) => f.order_at_infinity(),
        }
    }

    /// The empty product, i.e. the constant 1.
    pub fn is_one(&self) -> bool {
        match self {
            Term::Eta(f) => f.is_one(),
            Term::Gen(f) => f.is_one(),
        }
    }

    fn at_level(&self, level: i64) -> Result<Self> {
        Ok(match self {
            Term::Eta(f) => Term::Eta(f.at_level(level)?),
            Term::Gen(f) => Term::Gen(f.at_level(level)?),
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Eta(e) => write!(f, "{e}"),
            Term::Gen(g) => write!(f, "{g}"),
        }
    }
}

impl fmt::Display for LinearCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", t.coef)?;
            if !t.shift.is_zero() {
                write!(f, " q^({})", t.shift)?;
            }
            write!(f, " [{}]", t.term)?;
        }
        Ok(())
    }
}

/// `coef * q^shift * term`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombTerm {
    pub coef: BigRational,
    pub shift: Exponent,
    pub term: Term,
}

/// `sum coef_i q^{e_i} term_i` with every term at one ambient level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearCombination {
    level: i64,
    terms: Vec<CombTerm>,
}

impl LinearCombination {
    /// An empty combination is allowed and means 0.
    pub fn new(level: i64, terms: Vec<CombTerm>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|t| Ok(CombTerm { term: t.term.at_level(level)?, ..t }))
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearCombination { level, terms })
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn terms(&self) -> &[CombTerm] {
        &self.terms
    }

    pub fn push(&mut self, coef: impl Into<BigRational>, term: Term) -> Result<()> {
        let term = term.at_level(self.level)?;
        self.terms.push(CombTerm { coef: coef.into(), shift: Exponent::zero(), term });
        Ok(())
    }

    /// Adds `coef * prod J_d^{m_d} * q^e` as an eta-quotient term.
    pub fn push_j(&mut self, coef: i64, q_power: i64, jexps: &[(i64, i64)]) -> Result<()> {
        let (f, s) = EtaQuotient::from_j(self.level, jexps)?;
        self.terms.push(CombTerm {
            coef: BigRational::from_integer(coef.into()),
            shift: s + Exponent::from_integer(q_power),
            term: Term::Eta(f),
        });
        Ok(())
    }

    /// Multiplies every eta-quotient term by `c * f` and moves the result to
    /// `level`, which must be a multiple of both levels.
    pub fn mul_eta(&self, c: &BigRational, f: &EtaQuotient, level: i64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| match &t.term {
                Term::Eta(g) => {
                    Ok(CombTerm { coef: &t.coef * c, shift: t.shift, term: Term::Eta(g.mul(f).at_level(level)?) })
                }
                Term::Gen(_) => {
                    Err(Error::InvalidQuotient("cannot multiply a generalized term by an eta quotient".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        LinearCombination::new(level, terms)
    }

    /// Appends the terms of `other`, moved to this level.
    pub fn extend(&mut self, other: &LinearCombination) -> Result<()> {
        for t in &other.terms {
            self.terms.push(CombTerm { term: t.term.at_level(self.level)?, ..t.clone() });
        }
        Ok(())
    }

    /// Multiplies through by the lcm of the coefficient denominators.
    /// Returns the integral combination and the factor used.
    pub fn clear_denominators(&self) -> (LinearCombination, BigInt) {
        let lcm = self.terms.iter().fold(BigInt::one(), |acc, t| num_integer::lcm(acc, t.coef.denom().clone()));
        let terms = self
            .terms
            .iter()
            .map(|t| CombTerm { coef: &t.coef * BigRational::from_integer(lcm.clone()), ..t.clone() })
            .collect();
        (LinearCombination { level: self.level, terms }, lcm)
    }

    /// Negated copy.
    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|t| CombTerm { coef: -t.coef.clone(), ..t.clone() }).collect();
        LinearCombination { level: self.level, terms }
    }
}

/// `(q^b; q^b)_inf` below `q^prec`, from Euler's pentagonal number theorem.
pub fn jb(b: i64, prec: i64) -> ExactSeries {
    assert!(b > 0);
    let n = prec.max(0) as usize;
    let mut c = vec![BigInt::zero(); n];
    if n > 0 {
        c[0] = BigInt::one();
    }
    let mut k: i64 = 1;
    loop {
        let mut any = false;
        for e in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            let idx = b * e;
            if idx < prec {
                c[idx as usize] = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                any = true;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    ExactSeries::from_parts(1, 0, c)
}

/// `J_{a,b} = (q^a, q^{b-a}, q^b; q^b)_inf` below `q^prec`, via the triple
/// product `sum_n (-1)^n q^{b n(n-1)/2 + a n}`.
pub fn jab(a: i64, b: i64, prec: i64) -> ExactSeries {
    assert!(0 < a && a < b, "need 0 < a < b");
    let n = prec.max(0) as usize;
    let mut c = vec![BigInt::zero(); n];
    let exp = |k: i64| b * k * (k - 1) / 2 + a * k;
    for dir in [1i64, -1] {
        let mut k = if dir == 1 { 0 } else { -1 };
        loop {
            let e = exp(k);
            if e >= prec {
                break;
            }
            if k % 2 == 0 {
                c[e as usize] += 1;
            } else {
                c[e as usize] -= 1;
            }
            k += dir;
        }
    }
    ExactSeries::from_parts(1, 0, c)
}

/// `prod J_d^{m_d}` on the integer grid below `q^prec`. Each factor is applied
/// as repeated multiplication or division by the sparse series `J_d`.
pub fn jprod(exps: &[(i64, i64)], prec: i64) -> ExactSeries {
    let mut acc = ExactSeries::one(prec);
    for &(d, m) in exps {
        if m == 0 {
            continue;
        }
        let base = jb(d, prec);
        for _ in 0..m.unsigned_abs() {
            acc = if m > 0 { acc.mul(&base) } else { acc.div(&base).expect("J_d is monic") };
        }
    }
    acc
}

/// `eta(d tau) = q^{d/24} (q^d; q^d)_inf` below `q^prec`.
pub fn eta_expand(d: i64, prec: i64) -> ExactSeries {
    let (f, _) = EtaQuotient::from_j(d, &[(d, 1)]).expect("d divides d");
    expand(&f, prec)
}

/// q-expansion of an eta quotient below `q^prec`.
pub fn expand(f: &EtaQuotient, prec: i64) -> ExactSeries {
    let s = f.order_at_infinity();
    let depth = (Exponent::from_integer(prec) - s).ceil().to_integer().max(0);
    let exps: Vec<(i64, i64)> = f.exps().iter().map(|(&d, &m)| (d, m)).collect();
    jprod(&exps, depth).shift(s).truncate(Exponent::from_integer(prec))
}

/// `q^{(delta/2) P_2(g/delta)}`, the prefactor exponent of `eta_{delta,g}`.
pub fn gen_prefactor(delta: i64, g: i64) -> Exponent {
    Exponent::new(delta, 2) * p2(Exponent::new(g, delta))
}

/// Multiplies (`power > 0`) or divides (`power < 0`) the dense integer-grid
/// coefficient vector by `(1 - q^m)` `|power|` times, in place.
fn apply_binomial(c: &mut [BigInt], m: usize, power: i64) {
    for _ in 0..power.unsigned_abs() {
        if power > 0 {
            for i in (m..c.len()).rev() {
                let (lo, hi) = c.split_at_mut(i);
                hi[0] -= &lo[i - m];
            }
        } else {
            for i in m..c.len() {
                let (lo, hi) = c.split_at_mut(i);
                hi[0] += &lo[i - m];
            }
        }
    }
}

/// q-expansion of a generalized eta quotient below `q^prec`.
///
/// For `g = delta/2` both residue classes `+-g` coincide, so the product runs
/// over `m = g mod delta` twice and the exponent may be a half-integer.
pub fn gen_expand(f: &GenEtaQuotient, prec: i64) -> ExactSeries {
    let s = f.order_at_infinity();
    let depth = (Exponent::from_integer(prec) - s).ceil().to_integer().max(0);
    let mut c = vec![BigInt::zero(); depth as usize];
    if depth > 0 {
        c[0] = BigInt::one();
    }
    for (&(delta, g), r) in f.exps() {
        let (residues, power) = if 2 * g == delta {
            (vec![g], (*r * Exponent::from_integer(2)).to_integer())
        } else {
            (vec![g, delta - g], r.to_integer())
        };
        for res in residues {
            let mut m = res;
            while m < depth {
                apply_binomial(&mut c, m as usize, power);
                m += delta;
            }
        }
    }
    ExactSeries::from_parts(1, 0, c).shift(s).truncate(Exponent::from_integer(prec))
}

pub fn expand_term(t: &Term, prec: i64) -> ExactSeries {
    match t {
        Term::Eta(f) => expand(f, prec),
        Term::Gen(f) => gen_expand(f, prec),
    }
}

/// `sum coef_i q^{e_i} term_i` below `q^prec`. Coefficients must be integers;
/// use [`LinearCombination::clear_denominators`] first otherwise.
pub fn expand_combination(l: &LinearCombination, prec: i64) -> Result<ExactSeries> {
    for t in l.terms() {
        if !t.coef.is_integer() {
            return Err(Error::InvalidQuotient(format!("coefficient {} is not an integer", t.coef)));
        }
    }
    let target = Exponent::from_integer(prec);
    let parts: Vec<ExactSeries> = l
        .terms()
        .par_iter()
        .filter(|t| !t.coef.is_zero())
        .map(|t| {
            // The shift may be negative; expand deep enough that q^shift * term reaches prec.
            let inner = (target - t.shift).ceil().to_integer();
            expand_term(&t.term, inner).shift(t.shift).scale(&t.coef.to_integer()).truncate(target)
        })
        .collect();
    Ok(parts.iter().fold(ExactSeries::zero(prec), |acc, s| acc.add(s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &ExactSeries, from: i64, to: i64) -> Vec<i64> {
        (from..to).map(|n| i64::try_from(s.coeff_at(n).unwrap()).unwrap()).collect()
    }

    /// Direct truncated product `prod_{n>=1} (1 - q^n)`, independent of the
    /// pentagonal-number code path.
    fn naive_euler(prec: usize) -> Vec<i64> {
        let mut c = vec![0i64; prec];
        c[0] = 1;
        for n in 1..prec {
            for i in (n..prec).rev() {
                c[i] -= c[i - n];
            }
        }
        c
    }

    #[test]
    fn eta_matches_direct_product() {
        let e = eta_expand(1, 60);
        assert_eq!(e.order().unwrap(), Exponent::new(1, 24));
        let j = e.shift(Exponent::new(-1, 24));
        assert_eq!(ints(&j, 0, 59), naive_euler(59));
        assert_eq!(ints(&j, 0, 13), vec![1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn eta_dilation_consistency() {
        for d in [2, 5, 7] {
            let direct = eta_expand(d, 40);
            let via = eta_expand(1, 40).dilate(d).truncate(Exponent::from_integer(40));
            assert_eq!(direct, via);
            assert_eq!(direct.order().unwrap(), Exponent::new(d, 24));
            assert_eq!(direct.coefficient(Exponent::new(d, 24)).unwrap(), BigInt::one());
        }
    }

    #[test]
    fn hauptmodul_t_expansion() {
        let t = EtaQuotient::new(10, [(1, 2), (10, 4), (2, -4), (5, -2)]).unwrap();
        let s = expand(&t, 12);
        assert_eq!(ints(&s, 0, 12), vec![0, 1, -2, 3, -6, 11, -16, 24, -38, 57, -82, 117]);
    }

    #[test]
    fn trivial_quotient_is_one() {
        let f = EtaQuotient::new(1, [(1, 1), (1, -1)]).unwrap();
        assert!(f.is_one());
        assert_eq!(expand(&f, 10), ExactSeries::one(10));
        assert_eq!(gen_expand(&GenEtaQuotient::one(5), 10), ExactSeries::one(10));
    }

    #[test]
    fn gen_eta_prefactor() {
        let f = GenEtaQuotient::new(5, [((5, 1), Exponent::one())]).unwrap();
        assert_eq!(f.order_at_infinity(), Exponent::new(1, 60));
        assert_eq!(gen_expand(&f, 5).order().unwrap(), Exponent::new(1, 60));
        assert_eq!(gen_prefactor(10, 3), gen_prefactor(10, 7));
    }

    #[test]
    fn half_integer_only_on_midpoint() {
        assert!(GenEtaQuotient::new(10, [((10, 5), Exponent::new(1, 2))]).is_ok());
        assert!(GenEtaQuotient::new(10, [((10, 3), Exponent::new(1, 2))]).is_err());
        assert!(GenEtaQuotient::new(10, [((10, 10), Exponent::one())]).is_err());
    }

    #[test]
    fn jab_is_gen_eta_times_jb() {
        for (a, b) in [(1, 5), (2, 5), (3, 10), (1, 4)] {
            let g = GenEtaQuotient::new(b, [((b, a), Exponent::one())]).unwrap();
            let lhs = jab(a, b, 80);
            let rhs = gen_expand(&g, 81).shift(-gen_prefactor(b, a)).truncate(Exponent::from_integer(80));
            assert_eq!(lhs, rhs.mul(&jb(b, 80)));
        }
    }

    #[test]
    fn product_of_quotients_is_product_of_series() {
        let f1 = EtaQuotient::new(10, [(10, 8), (1, 4), (5, -4), (2, -8)]).unwrap();
        let f2 = EtaQuotient::new(20, [(10, 5), (1, 2), (20, -3), (5, -2), (4, -1), (2, -1)]).unwrap();
        let lhs = expand(&f1.mul(&f2), 30);
        let rhs = expand(&f1, 30).mul(&expand(&f2, 30));
        // ord f2 = -1, so the product is only known below q^29.
        assert_eq!(rhs.prec(), Exponent::from_integer(29));
        assert_eq!(lhs.truncate(rhs.prec()), rhs);
    }

    #[test]
    fn combination_difference_vanishes() {
        let t = EtaQuotient::new(10, [(1, 2), (10, 4), (2, -4), (5, -2)]).unwrap();
        let mut l = LinearCombination::new(10, vec![]).unwrap();
        l.push(BigInt::from(1), Term::Eta(t.clone())).unwrap();
        l.push(BigInt::from(-1), Term::Eta(t)).unwrap();
        let s = expand_combination(&l, 20).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.prec(), Exponent::from_integer(20));
    }
}
