//! Rank parity harness: the coefficients `a_f(n)` of Ramanujan's mock theta
//! function `f(q)`, their dissection generating functions, the `L_alpha`
//! iteration with its 5-adic structure, and congruence scans.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::etaq::{expand_combination, jab, jb, jprod};
use crate::identities;
use crate::series::ExactSeries;
use crate::upalgebra::{
    extend_family, nu5, pa_series, pb_series, reduce_partial, reduce_to_tpoly, seed_tables, u_a, u_b, TPoly,
};

/// `a_f(0..=nmax)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankParityTable {
    values: Vec<BigInt>,
}

impl RankParityTable {
    pub fn nmax(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// `a_f(n)`, zero for negative `n`.
    pub fn get(&self, n: i64) -> Result<BigInt> {
        if n < 0 {
            return Ok(BigInt::zero());
        }
        self.values
            .get(n as usize)
            .cloned()
            .ok_or(Error::TableTooSmall { need: n as u64, have: self.values.len() as u64 })
    }

    /// `a_f(n/d)`: zero unless `d | n` and `n >= 0`.
    pub fn get_frac(&self, n: i64, d: i64) -> Result<BigInt> {
        if n.rem_euclid(d) != 0 {
            return Ok(BigInt::zero());
        }
        self.get(n / d)
    }

    /// `c_f(n) = a_f(5n - 1) + a_f(n/5)`.
    pub fn c_f(&self, n: i64) -> Result<BigInt> {
        Ok(self.get(5 * n - 1)? + self.get_frac(n, 5)?)
    }
}

/// Number of coefficients on which the bilateral and Eulerian routes are
/// compared inside [`af_table`].
pub const CROSS_CHECK_TERMS: usize = 300;

/// Numerator `1 + 4 sum_{n>=1} (-1)^n q^{n(3n+1)/2} / (1 + q^n)` of the
/// bilateral representation; the `n = 0` term contributes `2 * 1/2 = 1` and
/// the terms `n` and `-n` coincide.
fn bilateral_numerator(nmax: usize) -> Vec<i64> {
    let len = nmax + 1;
    let mut c = vec![0i64; len];
    c[0] = 1;
    let mut n = 1usize;
    while n * (3 * n + 1) / 2 < len {
        let sign = if n.is_multiple_of(2) { 4 } else { -4 };
        let mut e = n * (3 * n + 1) / 2;
        let mut s = sign;
        while e < len {
            c[e] += s;
            s = -s;
            e += n;
        }
        n += 1;
    }
    c
}

/// `a_f(0..=nmax)` from the bilateral series divided by `(q;q)_inf`,
/// cross-checked against the Eulerian definition on the first
/// [`CROSS_CHECK_TERMS`] coefficients. A mismatch is a hard failure.
pub fn af_table(nmax: usize) -> RankParityTable {
    let len = nmax + 1;
    let num: Vec<BigInt> = bilateral_numerator(nmax).into_iter().map(BigInt::from).collect();
    let f = ExactSeries::from_parts(1, 0, num).div(&jb(1, len as i64)).expect("J_1 is monic");
    let values: Vec<BigInt> = (0..len as i64).map(|n| f.coeff_at(n).expect("within precision")).collect();
    let m = len.min(CROSS_CHECK_TERMS);
    let euler = af_eulerian(m - 1);
    assert_eq!(&values[..m], &euler[..], "bilateral and Eulerian routes disagree");
    RankParityTable { values }
}

/// `a_f(0..=nmax)` from `sum_n q^{n^2} / (-q;q)_n^2`.
pub fn af_eulerian(nmax: usize) -> Vec<BigInt> {
    let len = nmax + 1;
    let mut acc = vec![BigInt::zero(); len];
    // term_n = q^{n^2} / (-q;q)_n^2, updated by q^{2n+1} / (1 + q^{n+1})^2.
    let mut term = vec![BigInt::zero(); len];
    term[0] = BigInt::one();
    let mut n = 0usize;
    while n * n < len {
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += t;
        }
        let shift = 2 * n + 1;
        let mut next = vec![BigInt::zero(); len];
        if shift < len {
            next[shift..].clone_from_slice(&term[..len - shift]);
        }
        let k = n + 1;
        for _ in 0..2 {
            for i in k..len {
                let prev = next[i - k].clone();
                next[i] -= prev;
            }
        }
        term = next;
        n += 1;
    }
    acc
}

/// `a_f(n) mod m` for `0 <= n <= nmax`, in machine integers.
pub fn af_residues(nmax: usize, m: i64) -> Vec<i64> {
    assert!(m > 1);
    let len = nmax + 1;
    let mut c: Vec<i64> = bilateral_numerator(nmax).into_iter().map(|x| x.rem_euclid(m)).collect();
    // Solve f * (q;q)_inf = numerator with the pentagonal recurrence.
    let mut pent: Vec<(usize, i64)> = Vec::new();
    let mut k = 1usize;
    while k * (3 * k - 1) / 2 < len {
        let s = if k % 2 == 1 { 1 } else { m - 1 };
        pent.push((k * (3 * k - 1) / 2, s));
        if k * (3 * k + 1) / 2 < len {
            pent.push((k * (3 * k + 1) / 2, s));
        }
        k += 1;
    }
    for n in 0..len {
        let mut v = c[n];
        for &(e, s) in &pent {
            if e > n {
                break;
            }
            v = (v + s * c[n - e]) % m;
        }
        c[n] = v;
    }
    c
}

fn compare_below(lhs: &ExactSeries, rhs: &ExactSeries, depth: i64) -> bool {
    (0..depth).all(|n| lhs.coeff_at(n).ok() == rhs.coeff_at(n).ok() && lhs.coeff_at(n).is_ok())
}

/// `sum (a_f(5n - 1) + a_f(n/5)) q^n` against its two-term `J`-quotient form
/// below `q^depth`.
pub fn verify_af5id(depth: i64, table: &RankParityTable) -> Result<bool> {
    let lhs: Vec<BigInt> = (0..depth).map(|n| table.c_f(n)).collect::<Result<_>>()?;
    let lhs = ExactSeries::from_parts(1, 0, lhs);
    let rhs = expand_combination(&identities::j_combination(20, &identities::AF5_RHS_J)?, depth)?;
    Ok(compare_below(&lhs, &rhs, depth))
}

/// `sum (a_f(n/7) - a_f(7n - 2)) q^n` against its two-term `J`-quotient form
/// below `q^depth`.
pub fn verify_af7id(depth: i64, table: &RankParityTable) -> Result<bool> {
    let lhs: Vec<BigInt> =
        (0..depth).map(|n| Ok(table.get_frac(n, 7)? - table.get(7 * n - 2)?)).collect::<Result<_>>()?;
    let lhs = ExactSeries::from_parts(1, 0, lhs);
    let rhs = expand_combination(&identities::j_combination(14, &identities::AF7_RHS_J)?, depth)?;
    Ok(compare_below(&lhs, &rhs, depth))
}

/// `J_1 = J_25 (B(q^5) - q - q^2 / B(q^5))` with `B = J_{2,5} / J_{1,5}`.
pub fn verify_j1_dissection(depth: i64) -> bool {
    let inner = depth / 5 + 2;
    let b = jab(2, 5, inner).div(&jab(1, 5, inner)).expect("J_{1,5} is monic");
    let b5 = b.dilate(5);
    let binv5 = b.invert().expect("B is a unit").dilate(5);
    let q = ExactSeries::monomial(BigInt::one(), 1.into(), depth);
    let q2 = ExactSeries::monomial(BigInt::one(), 2.into(), depth);
    let bracket = b5.sub(&q).sub(&q2.mul(&binv5));
    let rhs = jb(25, depth).mul(&bracket);
    compare_below(&jb(1, depth), &rhs, depth)
}

/// `J_1^6 / J_5^6 = B^5 - 11 q - q^2 / B^5`.
pub fn verify_quintic_b(depth: i64) -> bool {
    let b = jab(2, 5, depth).div(&jab(1, 5, depth)).expect("J_{1,5} is monic");
    let b5 = b.pow(5).expect("power");
    let lhs = jprod(&[(1, 6), (5, -6)], depth);
    let rhs = b5
        .sub(&ExactSeries::monomial(BigInt::from(11), 1.into(), depth))
        .sub(&ExactSeries::monomial(BigInt::one(), 2.into(), depth).mul(&b5.invert().expect("unit")));
    compare_below(&lhs, &rhs, depth)
}

/// `24^{-1} mod p^alpha` in `(0, p^alpha)`; needs `p` prime to 6.
pub fn delta_p(p: i64, alpha: u32) -> i64 {
    let m = p.pow(alpha);
    let e = 24i64.extended_gcd(&m);
    assert_eq!(e.gcd, 1, "24 is not invertible mod {m}");
    e.x.rem_euclid(m)
}

/// `delta_alpha` for the prime 5.
pub fn delta(alpha: u32) -> i64 {
    delta_p(5, alpha)
}

/// `lambda_{2a} = lambda_{2a+1} = 5 (1 - 25^a) / 24`.
pub fn lambda(alpha: u32) -> i64 {
    5 * (1 - 25i64.pow(alpha / 2)) / 24
}

/// Which congruence family to scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CongruenceFamily {
    /// `a_f(5^a n + d_a) + a_f(5^{a-2} n + d_{a-2}) = 0 mod 5^{floor(a/2)}`.
    Mod5,
    /// `a_f(7^a n + d_a) - a_f(7^{a-2} n + d_{a-2}) = 0 mod 7^{floor((a-1)/2)}`.
    Mod7,
}

impl FromStr for CongruenceFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1.2" | "mod5" | "5" => Ok(CongruenceFamily::Mod5),
            "4.1" | "mod7" | "7" => Ok(CongruenceFamily::Mod7),
            _ => Err(format!("unknown congruence family {s:?} (expected mod5 or mod7)")),
        }
    }
}

impl fmt::Display for CongruenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CongruenceFamily::Mod5 => "mod5",
            CongruenceFamily::Mod7 => "mod7",
        })
    }
}

/// Outcome of a congruence scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub check: String,
    pub alpha: u32,
    pub modulus: i64,
    pub n_range: (i64, i64),
    /// `n` values where the congruence fails, with the offending residue.
    pub failures: Vec<(i64, i64)>,
    pub runtime_ms: u128,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Table size needed to scan `family` at `alpha` for `n <= nmax`.
pub fn required_table_size(family: CongruenceFamily, alpha: u32, nmax: i64) -> i64 {
    let p: i64 = match family {
        CongruenceFamily::Mod5 => 5,
        CongruenceFamily::Mod7 => 7,
    };
    p.pow(alpha) * nmax + delta_p(p, alpha)
}

/// Checks one congruence family on `n_range` against a table.
pub fn check_congruence(
    family: CongruenceFamily,
    alpha: u32,
    n_range: (i64, i64),
    table: &RankParityTable,
) -> Result<CongruenceReport> {
    assert!(alpha >= 3, "alpha must be at least 3");
    let start = Instant::now();
    let need = required_table_size(family, alpha, n_range.1);
    if need as u64 > table.nmax() {
        return Err(Error::TableTooSmall { need: need as u64, have: table.nmax() + 1 });
    }
    let (p, sign, modulus) = match family {
        CongruenceFamily::Mod5 => (5i64, 1, 5i64.pow(alpha / 2)),
        CongruenceFamily::Mod7 => (7i64, -1, 7i64.pow((alpha - 1) / 2)),
    };
    let (d_hi, d_lo) = (delta_p(p, alpha), delta_p(p, alpha - 2));
    let (s_hi, s_lo) = (p.pow(alpha), p.pow(alpha - 2));
    let m = BigInt::from(modulus);
    let failures: Vec<(i64, i64)> = (n_range.0..=n_range.1)
        .into_par_iter()
        .filter_map(|n| {
            let v: BigInt = table.get(s_hi * n + d_hi).expect("size checked")
                + sign * table.get(s_lo * n + d_lo).expect("size checked");
            let r = v.mod_floor(&m);
            (!r.is_zero()).then(|| (n, r.to_i64().expect("small residue")))
        })
        .collect();
    Ok(CongruenceReport {
        check: format!("{family}"),
        alpha,
        modulus,
        n_range,
        failures,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// `c_f(5^a n + lambda_a) = 0 mod 5^{ceil(a/2)}` for every `n` the table
/// covers; `a >= 2`.
pub fn check_cf_congruence(a: u32, table: &RankParityTable) -> CongruenceReport {
    assert!(a >= 2, "the c_f congruences start at 5^2");
    let start = Instant::now();
    let modulus = 5i64.pow(a.div_ceil(2));
    let step = 5i64.pow(a);
    let lam = lambda(a);
    let nmax = (table.nmax() as i64 + 1) / 5 - lam;
    let hi = Integer::div_floor(&nmax, &step);
    let m = BigInt::from(modulus);
    let failures = (0..=hi)
        .filter_map(|n| {
            let v = table.c_f(step * n + lam).ok()?;
            let r = v.mod_floor(&m);
            (!r.is_zero()).then(|| (n, r.to_i64().expect("small residue")))
        })
        .collect();
    CongruenceReport {
        check: format!("c_f mod 5^{}", a.div_ceil(2)),
        alpha: a,
        modulus,
        n_range: (0, hi),
        failures,
        runtime_ms: start.elapsed().as_millis(),
    }
}

/// `L_0 = P_A`, `L_{2a+1} = U_A(L_{2a})`, `L_{2a+2} = U_B(L_{2a+1})`, from
/// `P_A` expanded below `q^depth`.
pub fn l_sequence(alpha_max: u32, depth: i64) -> Result<Vec<ExactSeries>> {
    let mut out = vec![pa_series(depth)];
    for i in 1..=alpha_max {
        let prev = out.last().expect("nonempty");
        let next = if i % 2 == 1 { u_a(prev)? } else { u_b(prev)? };
        if next.prec_numerator() < 1 {
            return Err(Error::PrecisionExhausted(format!("L_{i} has no known coefficients at depth {depth}")));
        }
        out.push(next);
    }
    Ok(out)
}

/// Prefactor series for `L_i` against `c_f`: `J_5 J_2^2 / J_1^4` for even
/// `i`, `J_10^2 J_1 / J_5^4` for odd `i`.
fn cf_prefactor(i: u32, prec: i64) -> ExactSeries {
    if i.is_multiple_of(2) {
        jprod(&[(5, 1), (2, 2), (1, -4)], prec)
    } else {
        jprod(&[(10, 2), (1, 1), (5, -4)], prec)
    }
}

/// Compares `L_i` divided by its prefactor with
/// `sum c_f(5^i n + lambda_i) q^n`; returns mismatching `(i, n)`.
pub fn check_l_coefficients(ls: &[ExactSeries], table: &RankParityTable) -> Result<Vec<(u32, i64)>> {
    let mut bad = Vec::new();
    for (i, l) in ls.iter().enumerate() {
        let i = i as u32;
        let prec = l.prec_numerator();
        let s = l.div(&cf_prefactor(i, prec))?;
        let step = 5i64.pow(i);
        for n in 0..prec {
            let idx = 5 * (step * n + lambda(i));
            if idx as u64 > table.nmax() {
                break;
            }
            if s.coeff_at(n)? != table.c_f(step * n + lambda(i))? {
                bad.push((i, n));
            }
        }
    }
    Ok(bad)
}

/// How the `t`-polynomial of one `L_i` was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "route")]
pub enum LRoute {
    /// Complete reduction of the series.
    Series,
    /// Recursion through the seed families; the coefficients of `t^n` for
    /// `n < confirmed_below` were also read off the series.
    Recursion { confirmed_below: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LEntry {
    pub index: u32,
    pub route: LRoute,
    pub degree: Option<i64>,
    pub ord_t: Option<i64>,
    pub min_ord_t: i64,
    /// `(n, nu_5, bound)` for every coefficient below its bound.
    pub violations: Vec<(i64, u32, i64)>,
    /// Low coefficients where recursion and series disagree.
    pub mismatches: Vec<i64>,
    #[serde(skip)]
    pub poly: TPoly,
}

impl LEntry {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.mismatches.is_empty() && self.ord_t.is_none_or(|o| o >= self.min_ord_t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LValuationReport {
    pub depth: i64,
    pub entries: Vec<LEntry>,
    pub runtime_ms: u128,
}

impl LValuationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(LEntry::passed)
    }
}

/// Lower bound for `nu_5` of the coefficient of `t^n` in `L_i`:
/// `a + floor((3n-3)/4)` for `i = 2a`, `a + 1 + floor((3n-6)/4)` for `i = 2a+1`.
pub fn l_bound(i: u32, n: i64) -> i64 {
    let a = (i / 2) as i64;
    if i.is_multiple_of(2) {
        a + Integer::div_floor(&(3 * n - 3), &4)
    } else {
        a + 1 + Integer::div_floor(&(3 * n - 6), &4)
    }
}

/// Minimal `t`-order of `L_i`'s polynomial.
pub fn l_min_ord_t(i: u32) -> i64 {
    if i % 2 == 1 && i >= 3 {
        2
    } else {
        1
    }
}

/// `sum_k l(k) p_k` for the family `fam`.
fn apply_family(l: &TPoly, fam: &BTreeMap<i64, TPoly>) -> TPoly {
    l.coeffs().iter().fold(TPoly::zero(), |acc, (k, c)| acc.add(&fam[k].scale(c)))
}

/// Computes `L_1 .. L_{alpha_max}` as `P_A p(t)` (even) or `P_B p(t)` (odd)
/// and checks the 5-adic lower bounds. Each polynomial comes from complete
/// series reduction when the precision suffices; otherwise from the seed
/// recursion applied to its predecessor, with the low coefficients confirmed
/// against the series.
pub fn verify_l_valuations(alpha_max: u32, depth: i64) -> Result<LValuationReport> {
    let start = Instant::now();
    let ls = l_sequence(alpha_max, depth)?;
    let (gi, gii) = seed_tables();
    let mut fam_i: BTreeMap<i64, TPoly> = gi;
    let mut fam_ii: BTreeMap<i64, TPoly> = gii;
    let mut entries: Vec<LEntry> = Vec::new();
    for i in 1..=alpha_max {
        let l = &ls[i as usize];
        let prec = l.prec_numerator();
        let v = if i % 2 == 1 { pb_series(prec) } else { pa_series(prec) };
        let floor = l_min_ord_t(i);
        let (poly, route, mismatches) = match reduce_to_tpoly(l, &v, floor) {
            Ok(p) => (p, LRoute::Series, vec![]),
            Err(Error::NonTerminating { .. }) => {
                let prev = &entries
                    .last()
                    .ok_or_else(|| Error::PrecisionExhausted(format!("L_{i} does not reduce at depth {depth}")))?
                    .poly;
                let kmax = prev.degree().unwrap_or(0);
                let fam = if i % 2 == 1 { &mut fam_i } else { &mut fam_ii };
                if fam.keys().next_back().copied().unwrap_or(0) < kmax {
                    *fam = extend_family(fam, kmax);
                }
                let p = apply_family(prev, fam);
                let partial = reduce_partial(l, &v, floor)?;
                let mism = (floor..partial.exact_below).filter(|&n| partial.poly.coeff(n) != p.coeff(n)).collect();
                (p, LRoute::Recursion { confirmed_below: partial.exact_below }, mism)
            }
            Err(e) => return Err(e),
        };
        let violations = poly
            .coeffs()
            .iter()
            .filter_map(|(&n, c)| {
                let b = l_bound(i, n);
                nu5(c).filter(|&v| (v as i64) < b).map(|v| (n, v, b))
            })
            .collect();
        entries.push(LEntry {
            index: i,
            route,
            degree: poly.degree(),
            ord_t: poly.ord_t(),
            min_ord_t: floor,
            violations,
            mismatches,
            poly,
        });
    }
    Ok(LValuationReport { depth, entries, runtime_ms: start.elapsed().as_millis() })
}

/// Depth at which `L_1 .. L_3` reduce completely.
pub const L_FULL_DEPTH: i64 = 17_625;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deltas() {
        assert_eq!([delta(1), delta(2), delta(3), delta(4)], [4, 24, 99, 599]);
        for a in 1..=6 {
            let d = delta(a);
            assert_eq!((24 * d).rem_euclid(5i64.pow(a)), 1);
            let closed = if a % 2 == 0 { (23 * 5i64.pow(a) + 1) / 24 } else { (19 * 5i64.pow(a) + 1) / 24 };
            assert_eq!(d, closed);
        }
        assert_eq!(delta_p(7, 3), 243);
    }

    #[test]
    fn lambdas() {
        assert_eq!([lambda(0), lambda(1), lambda(2), lambda(3), lambda(4)], [0, 0, -5, -5, -130]);
    }

    #[test]
    fn residues_match_table() {
        let t = af_table(400);
        let r = af_residues(400, 25);
        for (a, b) in t.values().iter().zip(&r) {
            assert_eq!(a.mod_floor(&BigInt::from(25)), BigInt::from(*b));
        }
    }

    #[test]
    fn negative_and_fractional_indices_vanish() {
        let t = af_table(20);
        assert!(t.get(-3).unwrap().is_zero());
        assert!(t.get_frac(7, 5).unwrap().is_zero());
        assert_eq!(t.get_frac(10, 5).unwrap(), t.get(2).unwrap());
        assert!(matches!(t.get(21), Err(Error::TableTooSmall { .. })));
    }

    #[test]
    fn congruence_needs_large_table() {
        let t = af_table(100);
        assert!(matches!(check_congruence(CongruenceFamily::Mod5, 3, (0, 1), &t), Err(Error::TableTooSmall { .. })));
    }

    #[test]
    fn family_parsing() {
        assert_eq!("mod5".parse::<CongruenceFamily>().unwrap(), CongruenceFamily::Mod5);
        assert_eq!("4.1".parse::<CongruenceFamily>().unwrap(), CongruenceFamily::Mod7);
        assert!("3".parse::<CongruenceFamily>().is_err());
    }
}
