//! The `U_5` calculus at level 10: the Hauptmodul `t`, the modular equation
//! coefficients, the `U_A` / `U_B` operators, reduction of series to
//! Laurent polynomials in `t`, and the recursion with 5-adic bookkeeping.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::etaq::{expand, expand_combination, jb};
use crate::identities::{self, SeedGroup};
use crate::prover::{prove_eta_identity, prove_up_identity, ProofCertificate, ProverOptions};
use crate::series::ExactSeries;
use crate::Exponent;

/// Laurent polynomial in `t` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl TPoly {
    pub fn zero() -> Self {
        TPoly::default()
    }

    pub fn monomial(n: i64, c: impl Into<BigInt>) -> Self {
        let mut p = TPoly::zero();
        p.add_term(n, c.into());
        p
    }

    pub fn from_i64s(terms: &[(i64, i64)]) -> Self {
        let mut p = TPoly::zero();
        for &(n, c) in terms {
            p.add_term(n, BigInt::from(c));
        }
        p
    }

    pub fn from_map(coeffs: BTreeMap<i64, BigInt>) -> Self {
        let mut p = TPoly { coeffs };
        p.coeffs.retain(|_, c| !c.is_zero());
        p
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, BigInt> {
        &self.coeffs
    }

    pub fn coeff(&self, n: i64) -> BigInt {
        self.coeffs.get(&n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest power of `t` present; `None` for the zero polynomial.
    pub fn ord_t(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, n: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(n).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (&n, c) in &other.coeffs {
            p.add_term(n, c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TPoly { coeffs: self.coeffs.iter().map(|(&n, c)| (n, -c)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return TPoly::zero();
        }
        TPoly { coeffs: self.coeffs.iter().map(|(&n, c)| (n, c * k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = TPoly::zero();
        for (&n, a) in &self.coeffs {
            for (&m, b) in &other.coeffs {
                p.add_term(n + m, a * b);
            }
        }
        p
    }

    /// Evaluates at a series for `t` (its inverse is needed only for
    /// negative powers).
    pub fn eval(&self, t: &ExactSeries) -> Result<ExactSeries> {
        let prec = t.prec_numerator() / t.grid();
        let mut acc: Option<ExactSeries> = None;
        let mut powers = TPowers::new(t.clone());
        for (&n, c) in &self.coeffs {
            let term = powers.get(n)?.scale(c);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        Ok(acc.unwrap_or_else(|| ExactSeries::zero(prec)))
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().rev() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match *n {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*t")?,
                _ => write!(f, "{a}*t^{n}")?,
            }
        }
        Ok(())
    }
}

/// Cache of `t^n`, built by repeated multiplication from `t` and `1/t`.
struct TPowers {
    pos: Vec<ExactSeries>,
    neg: Vec<ExactSeries>,
}

impl TPowers {
    fn new(t: ExactSeries) -> Self {
        let one = ExactSeries::one(t.prec_numerator() / t.grid());
        TPowers { pos: vec![one, t], neg: vec![] }
    }

    fn get(&mut self, n: i64) -> Result<&ExactSeries> {
        if n >= 0 {
            while self.pos.len() as i64 <= n {
                let next = self.pos.last().expect("nonempty").mul(&self.pos[1]);
                self.pos.push(next);
            }
            Ok(&self.pos[n as usize])
        } else {
            if self.neg.is_empty() {
                self.neg.push(self.pos[1].invert()?);
            }
            while (self.neg.len() as i64) < -n {
                let next = self.neg.last().expect("nonempty").mul(&self.neg[0]);
                self.neg.push(next);
            }
            Ok(&self.neg[(-n - 1) as usize])
        }
    }
}

/// The five coefficient polynomials of the level-10 modular equation
/// `t(tau)^5 + sum_j sigma_j(5 tau) t(tau)^j = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSet {
    sigmas: [TPoly; 5],
}

impl SigmaSet {
    pub fn standard() -> Self {
        SigmaSet {
            sigmas: [
                TPoly::from_i64s(&[(1, -1)]),
                TPoly::from_i64s(&[(2, -5), (1, 10)]),
                TPoly::from_i64s(&[(3, -25), (2, 50), (1, -35)]),
                TPoly::from_i64s(&[(4, -125), (3, 250), (2, -175), (1, 60)]),
                TPoly::from_i64s(&[(5, -625), (4, 1250), (3, -875), (2, 300), (1, -55)]),
            ],
        }
    }

    pub fn from_polys(sigmas: [TPoly; 5]) -> Self {
        SigmaSet { sigmas }
    }

    pub fn sigma(&self, j: usize) -> &TPoly {
        &self.sigmas[j]
    }

    /// `s(j, l)`, the coefficient of `t^l` in `sigma_j`.
    pub fn s(&self, j: usize, l: i64) -> BigInt {
        self.sigmas[j].coeff(l)
    }

    /// Copy with `s(j, l)` replaced.
    pub fn with_coefficient(&self, j: usize, l: i64, c: i64) -> Self {
        let mut out = self.clone();
        let old = out.sigmas[j].coeff(l);
        out.sigmas[j].add_term(l, BigInt::from(c) - old);
        out
    }

    /// Every `s(j, l)` with `1 <= l <= j + 1` has `nu_5 >= floor((3l + j)/4)`.
    pub fn valuation_bounds_hold(&self) -> bool {
        (0..5).all(|j| {
            (1..=j as i64 + 1).all(|l| {
                let need = Integer::div_floor(&(3 * l + j as i64), &4);
                nu5(&self.s(j, l)).is_none_or(|v| v as i64 >= need)
            })
        })
    }
}

/// 5-adic valuation; `None` stands for `+infinity` (the zero coefficient).
pub fn nu5(c: &BigInt) -> Option<u32> {
    if c.is_zero() {
        return None;
    }
    let five = BigInt::from(5);
    let mut x = c.clone();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&five);
        if !r.is_zero() {
            return Some(k);
        }
        x = q;
        k += 1;
    }
}

/// `(k, n) -> nu_5(c(k, n))` for a family `k -> p_k(t) = sum_n c(k, n) t^n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValuationLedger {
    pub entries: BTreeMap<(i64, i64), Option<u32>>,
}

impl ValuationLedger {
    pub fn from_family(family: &BTreeMap<i64, TPoly>) -> Self {
        let mut entries = BTreeMap::new();
        for (&k, p) in family {
            for (&n, c) in p.coeffs() {
                entries.insert((k, n), nu5(c));
            }
        }
        ValuationLedger { entries }
    }

    /// Entries violating `bound`, as `(k, n, valuation, bound)`.
    pub fn violations(&self, bound: impl Fn(i64, i64) -> i64) -> Vec<(i64, i64, u32, i64)> {
        self.entries
            .iter()
            .filter_map(|(&(k, n), v)| {
                let b = bound(k, n);
                match v {
                    Some(v) if (*v as i64) < b => Some((k, n, *v, b)),
                    _ => None,
                }
            })
            .collect()
    }
}

/// True iff every ledger entry meets its bound; `+infinity` always passes.
pub fn check_valuation_bounds(ledger: &ValuationLedger, bound: impl Fn(i64, i64) -> i64) -> bool {
    ledger.violations(bound).is_empty()
}

/// `sum a(pm) q^m`.
pub fn u_p_series(f: &ExactSeries, p: i64) -> Result<ExactSeries> {
    f.u_p(p)
}

/// `p_k = -sum_{j=0}^{4} sigma_j p_{k+j-5}` from `[p_{k-5}, ..., p_{k-1}]`.
pub fn fundamental_step(prev: &[TPoly; 5], sigmas: &SigmaSet) -> TPoly {
    let mut acc = TPoly::zero();
    for (j, p) in prev.iter().enumerate() {
        acc = acc.sub(&sigmas.sigma(j).mul(p));
    }
    acc
}

/// Extends a family given on five consecutive indices `k0 .. k0+4` upwards
/// to `kmax` with [`fundamental_step`]. Downward stepping is not provided.
pub fn extend_family(seeds: &BTreeMap<i64, TPoly>, kmax: i64) -> BTreeMap<i64, TPoly> {
    let sigmas = SigmaSet::standard();
    let mut fam = seeds.clone();
    let k0 = *fam.keys().next().expect("five seeds");
    assert!((k0..k0 + 5).all(|k| fam.contains_key(&k)), "seeds must be five consecutive indices");
    for k in k0 + 5..=kmax {
        let prev: [TPoly; 5] = std::array::from_fn(|i| fam[&(k - 5 + i as i64)].clone());
        fam.insert(k, fundamental_step(&prev, &sigmas));
    }
    fam
}

/// Series for the level-10 building blocks.
pub fn t_series(prec: i64) -> ExactSeries {
    expand(&identities::t(), prec)
}

pub fn pa_series(prec: i64) -> ExactSeries {
    expand_combination(&identities::pa(), prec).expect("integral coefficients")
}

pub fn pb_series(prec: i64) -> ExactSeries {
    expand_combination(&identities::pb(), prec).expect("integral coefficients")
}

/// `phi(-q) = J_1^2 / J_2 = sum_n (-1)^n q^{n^2}`, sparse.
fn phi_minus(prec: i64) -> ExactSeries {
    let mut c = vec![BigInt::zero(); prec.max(0) as usize];
    let mut n: i64 = 0;
    while n * n < prec {
        let v = if n == 0 {
            1
        } else if n % 2 == 0 {
            2
        } else {
            -2
        };
        c[(n * n) as usize] = BigInt::from(v);
        n += 1;
    }
    ExactSeries::from_parts(1, 0, c)
}

/// Multiplies by `prod J_d^{m_d}` factor by factor with sparse kernels.
fn times_j(mut s: ExactSeries, exps: &[(i64, i64)]) -> ExactSeries {
    let width = s.prec_numerator() - s.lo_numerator().min(0) + 1;
    for &(d, m) in exps {
        let base = jb(d, width.max(1));
        for _ in 0..m.unsigned_abs() {
            s = if m > 0 { s.mul(&base) } else { s.div(&base).expect("J_d is monic") };
        }
    }
    s
}

/// `U_A(f) = U_5(A f)`, evaluated as `(J_10^2 / J_5^4) U_5(phi(-q)^2 f)`
/// because `A = (J_50^2 / J_25^4) phi(-q)^2`.
pub fn u_a(f: &ExactSeries) -> Result<ExactSeries> {
    if f.grid() != 1 {
        return Err(Error::GridError { grid: f.grid() });
    }
    let phi = phi_minus(f.prec_numerator() - f.lo_numerator().min(0) + 1);
    let inner = f.mul(&phi).mul(&phi);
    Ok(times_j(inner.u_p(5)?, &[(10, 2), (5, -4)]))
}

/// `U_B(f) = U_5(B f)`, evaluated as `J_5 U_5(q f / J_1)`.
pub fn u_b(f: &ExactSeries) -> Result<ExactSeries> {
    if f.grid() != 1 {
        return Err(Error::GridError { grid: f.grid() });
    }
    let inner = times_j(f.shift(Exponent::from_integer(1)), &[(1, -1)]);
    Ok(times_j(inner.u_p(5)?, &[(5, 1)]))
}

/// `U_A` straight from the definition, multiplying by the expansion of `A`.
pub fn u_a_naive(f: &ExactSeries) -> Result<ExactSeries> {
    let a = expand(&identities::a_quotient(), f.prec_numerator().max(1));
    f.mul(&a).u_p(5)
}

/// `U_B` straight from the definition.
pub fn u_b_naive(f: &ExactSeries) -> Result<ExactSeries> {
    let b = expand(&identities::b_quotient(), f.prec_numerator().max(1) + 1);
    f.mul(&b).u_p(5)
}

/// Outcome of a triangular reduction: `p` and the bound below which its
/// coefficients are certain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub poly: TPoly,
    /// Coefficients of `t^n` for `n < exact_below` are determined by the
    /// input; higher ones are invisible at this precision.
    pub exact_below: i64,
}

/// Finds `p` with `s = v p(t)` by leading-term elimination, as far as the
/// precision of `s / v` allows. Powers below `floor_t_order` signal that the
/// hypothesis is wrong.
pub fn reduce_partial(s: &ExactSeries, v: &ExactSeries, floor_t_order: i64) -> Result<Reduction> {
    let mut w = s.div(v)?.canonical();
    if w.is_zero() {
        return Ok(Reduction { poly: TPoly::zero(), exact_below: w.prec().floor().to_integer() });
    }
    if w.grid() != 1 {
        return Err(Error::ResidualNonzero { exponent: w.order()? });
    }
    let prec = w.prec_numerator();
    let t = t_series(prec - floor_t_order.min(0) + 2);
    let mut powers = TPowers::new(t);
    let mut p = TPoly::zero();
    while let Ok(e) = w.order() {
        let n = e.to_integer();
        if n < floor_t_order {
            return Err(Error::ResidualNonzero { exponent: e });
        }
        let c = w.leading().expect("nonzero").clone();
        let tn = powers.get(n)?.truncate(w.prec());
        w = w.sub(&tn.scale(&c));
        p.add_term(n, c);
    }
    Ok(Reduction { poly: p, exact_below: prec })
}

/// Margin (in powers of `q`) required between the top degree found and the
/// precision before a reduction is accepted as complete.
pub const REDUCTION_MARGIN: i64 = 10;

/// The unique `p` with `s = v p(t)` and `ord_t(p) >= floor_t_order`. Fails
/// with `NonTerminating` when the support reaches within
/// [`REDUCTION_MARGIN`] of the precision, since higher terms could then be
/// hidden.
pub fn reduce_to_tpoly(s: &ExactSeries, v: &ExactSeries, floor_t_order: i64) -> Result<TPoly> {
    let r = reduce_partial(s, v, floor_t_order)?;
    if let Some(d) = r.poly.degree() {
        if d + REDUCTION_MARGIN > r.exact_below {
            return Err(Error::NonTerminating { degree: d, prec: r.exact_below });
        }
    }
    Ok(r.poly)
}

/// The ten seed identities with both certificates.
#[derive(Clone, Debug)]
pub struct SeedCertificate {
    pub group: SeedGroup,
    pub k: i64,
    pub poly: TPoly,
    pub certificate: ProofCertificate,
    /// Number of `q`-coefficients on which the two sides were compared.
    pub series_terms: i64,
}

#[derive(Clone, Debug)]
pub struct InitialTables {
    pub group_i: BTreeMap<i64, TPoly>,
    pub group_ii: BTreeMap<i64, TPoly>,
    pub certificates: Vec<SeedCertificate>,
}

/// Number of coefficients compared in the series check of each seed.
pub const SEED_SERIES_TERMS: i64 = 60;

/// Certifies one seed `U(src t^k) = dst p(t)` by the valence formula and by
/// direct series comparison.
pub fn certify_seed(group: SeedGroup, k: i64, p: &TPoly) -> Result<SeedCertificate> {
    let name = format!("group {group:?}, k = {k}");
    let (g, f) = identities::lemma_identity(group, k, p);
    let cert = prove_up_identity(5, &g, &f, ProverOptions::default())?;
    if !cert.is_proven() {
        return Err(Error::CertificationFailed { name, reason: format!("{:?}", cert.verdict) });
    }
    let n = SEED_SERIES_TERMS;
    // U_5 divides the precision by 5; t^k with k < 0 costs a little more.
    let depth = 5 * (n + 2) - 5 * k.min(0);
    let t = t_series(depth);
    let tk = TPoly::monomial(k, 1).eval(&t)?;
    let (src, dst) = match group {
        SeedGroup::I => (pa_series(depth), pb_series(depth)),
        SeedGroup::II => (pb_series(depth), pa_series(depth)),
    };
    let lhs = match group {
        SeedGroup::I => u_a(&src.mul(&tk))?,
        SeedGroup::II => u_b(&src.mul(&tk))?,
    };
    let rhs = dst.mul(&p.eval(&t)?);
    let h = lhs.sub(&rhs);
    let bound = Exponent::from_integer(n);
    if h.prec() < bound {
        return Err(Error::CertificationFailed { name, reason: format!("series known only below q^{}", h.prec()) });
    }
    if let Some((e, c)) = h.terms().find(|(e, c)| *e < bound && !c.is_zero()) {
        return Err(Error::CertificationFailed { name, reason: format!("series differ at q^{e} by {c}") });
    }
    Ok(SeedCertificate { group, k, poly: p.clone(), certificate: cert, series_terms: n })
}

/// The seed tables `k = -4..=0` for both groups, each certified.
pub fn initial_tables() -> Result<InitialTables> {
    let jobs: Vec<(SeedGroup, i64)> =
        [SeedGroup::I, SeedGroup::II].iter().flat_map(|&g| (-4..=0).map(move |k| (g, k))).collect();
    let certificates = jobs
        .par_iter()
        .map(|&(g, k)| certify_seed(g, k, &identities::seed(g, k).expect("seed exists")))
        .collect::<Result<Vec<_>>>()?;
    let pick = |g| certificates.iter().filter(|c| c.group == g).map(|c| (c.k, c.poly.clone())).collect();
    Ok(InitialTables { group_i: pick(SeedGroup::I), group_ii: pick(SeedGroup::II), certificates })
}

/// The uncertified seed tables.
pub fn seed_tables() -> (BTreeMap<i64, TPoly>, BTreeMap<i64, TPoly>) {
    let table = |g| (-4..=0).map(|k| (k, identities::seed(g, k).expect("seed exists"))).collect();
    (table(SeedGroup::I), table(SeedGroup::II))
}

/// Proves the modular equation by the valence formula and checks it as a
/// series identity below `q^series_terms`.
pub fn verify_modular_equation_with(sigmas: &SigmaSet, series_terms: i64) -> Result<ProofCertificate> {
    let mut cert = prove_eta_identity(&identities::modular_equation_with(sigmas), ProverOptions::default())?;
    let t = t_series(series_terms);
    let t5 = t.dilate(5).truncate(Exponent::from_integer(series_terms));
    let mut residual = TPoly::monomial(5, 1).eval(&t)?;
    for j in 0..5 {
        let sj = sigmas.sigma(j).eval(&t5)?;
        residual = residual.add(&sj.mul(&TPoly::monomial(j as i64, 1).eval(&t)?));
    }
    let bound = Exponent::from_integer(series_terms).min(residual.prec());
    match residual.terms().find(|(e, c)| *e < bound && !c.is_zero()) {
        None => cert.notes.push(format!("series residual vanishes below q^{bound}")),
        Some((e, c)) => {
            cert.notes.push(format!("series residual has coefficient {c} at q^{e}"));
            if cert.is_proven() {
                return Err(Error::CertificationFailed {
                    name: "modular equation".into(),
                    reason: "valence certificate and series residual disagree".into(),
                });
            }
        }
    }
    Ok(cert)
}

pub fn verify_modular_equation() -> Result<ProofCertificate> {
    verify_modular_equation_with(&SigmaSet::standard(), 200)
}

/// `t`-power cache keyed by exponent, shared across several reductions at
/// one precision.
pub fn t_power_table(prec: i64, range: std::ops::RangeInclusive<i64>) -> Result<HashMap<i64, ExactSeries>> {
    let mut powers = TPowers::new(t_series(prec));
    range.map(|n| Ok((n, powers.get(n)?.clone()))).collect()
}
