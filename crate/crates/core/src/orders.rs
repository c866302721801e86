//! Modularity criteria and exact orders at cusps.

use serde::Serialize;

use crate::arith::{gcd, is_zero_mod, p2};
use crate::cusps::{Cusp, CuspTable, Group};
use crate::error::{Error, Result};
use crate::etaq::{EtaQuotient, GenEtaQuotient, Term};
use crate::Exponent;

/// The four conditions of Newman's criterion for `Gamma_0(N)`; returns the
/// list of violated ones (empty means modular).
pub fn newman_violations(f: &EtaQuotient) -> Vec<String> {
    let n = f.level();
    let mut out = Vec::new();
    let sum: i64 = f.weight_sum();
    if sum != 0 {
        out.push(format!("sum of exponents is {sum}, not 0"));
    }
    let s1: i64 = f.exps().iter().map(|(d, m)| d * m).sum();
    if s1 % 24 != 0 {
        out.push(format!("sum d*m_d = {s1} is not divisible by 24"));
    }
    let s2: i64 = f.exps().iter().map(|(d, m)| (n / d) * m).sum();
    if s2 % 24 != 0 {
        out.push(format!("sum (N/d)*m_d = {s2} is not divisible by 24"));
    }
    if !is_square_product(f) {
        out.push("prod d^|m_d| is not a square".to_string());
    }
    out
}

pub fn newman_is_modular(f: &EtaQuotient) -> bool {
    newman_violations(f).is_empty()
}

/// `prod d^{|m_d|}` is a perfect square iff every prime occurs to an even power.
fn is_square_product(f: &EtaQuotient) -> bool {
    let mut powers: std::collections::BTreeMap<i64, u64> = Default::default();
    for (&d, &m) in f.exps() {
        for (p, k) in crate::arith::factorize(d) {
            *powers.entry(p).or_default() += k as u64 * m.unsigned_abs();
        }
    }
    powers.values().all(|k| k % 2 == 0)
}

/// Invariant order `sum gcd(d, c)^2 m_d / (24 d)` at `a/c`.
pub fn ligozat_ord(f: &EtaQuotient, z: Cusp) -> Result<Exponent> {
    let v = newman_violations(f);
    if !v.is_empty() {
        return Err(Error::NotModular { term: 0, group: Group::Gamma0(f.level()).to_string(), reason: v.join("; ") });
    }
    Ok(eta_ord_unchecked(f, z))
}

/// The order formula without the modularity gate.
pub(crate) fn eta_ord_unchecked(f: &EtaQuotient, z: Cusp) -> Exponent {
    // At infinity (c = 0) gcd(d, 0) = d and the sum is sum d m_d / 24.
    f.exps()
        .iter()
        .map(|(&d, &m)| {
            let g = gcd(d, z.c());
            Exponent::new(g * g * m, 24 * d)
        })
        .fold(Exponent::from_integer(0), |a, b| a + b)
}

/// Sufficient conditions of Robins' criterion for `Gamma_1(N)`:
/// `sum delta P_2(g/delta) r = 0 mod 2` and `sum (N/delta) P_2(0) r = 0 mod 2`.
/// Failure means modularity is unknown, not refuted.
pub fn robins_violations(f: &GenEtaQuotient) -> Vec<String> {
    let n = f.level();
    let mut c1 = Exponent::from_integer(0);
    let mut c2 = Exponent::from_integer(0);
    for (&(delta, g), &r) in f.exps() {
        c1 += Exponent::from_integer(delta) * p2(Exponent::new(g, delta)) * r;
        c2 += Exponent::from_integer(n / delta) * p2(Exponent::from_integer(0)) * r;
    }
    let mut out = Vec::new();
    if !is_zero_mod(c1, 2) {
        out.push(format!("sum delta P2(g/delta) r = {c1} is not 0 mod 2"));
    }
    if !is_zero_mod(c2, 2) {
        out.push(format!("sum (N/delta) P2(0) r = {c2} is not 0 mod 2"));
    }
    out
}

pub fn robins_is_modular(f: &GenEtaQuotient) -> bool {
    robins_violations(f).is_empty()
}

/// Order of `eta_{delta,g}` at `a/c`: `eps^2/(2 delta) P_2(a g / eps)` with
/// `eps = gcd(delta, c)`.
pub fn robins_ord(delta: i64, g: i64, z: Cusp) -> Exponent {
    assert!(0 < g && g < delta);
    let eps = gcd(delta, z.c());
    Exponent::new(eps * eps, 2 * delta) * p2(Exponent::new(z.a() * g, eps))
}

pub fn gen_ord(f: &GenEtaQuotient, z: Cusp) -> Exponent {
    f.exps().iter().map(|(&(delta, g), &r)| r * robins_ord(delta, g, z)).fold(Exponent::from_integer(0), |a, b| a + b)
}

/// Invariant order of a term at a cusp, with the modularity gate of the
/// group it is checked on.
pub fn term_ord(t: &Term, z: Cusp) -> Exponent {
    match t {
        Term::Eta(f) => eta_ord_unchecked(f, z),
        Term::Gen(f) => gen_ord(f, z),
    }
}

/// Modularity violations of a term on `group`.
pub fn term_violations(t: &Term, group: Group) -> Vec<String> {
    match (t, group) {
        (Term::Eta(f), Group::Gamma0(_)) => newman_violations(f),
        (Term::Gen(f), Group::Gamma1(_)) => robins_violations(f),
        // An eta quotient modular on Gamma_0(N) is modular on Gamma_1(N).
        (Term::Eta(f), Group::Gamma1(_)) => newman_violations(f),
        (Term::Gen(_), Group::Gamma0(_)) => {
            vec!["generalized eta quotients are only certified on Gamma1(N)".to_string()]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRow {
    pub cusp: Cusp,
    pub width: i64,
    #[serde(serialize_with = "crate::ser::ratio")]
    pub ord: Exponent,
    #[serde(rename = "ORD", serialize_with = "crate::ser::ratio")]
    pub big_ord: Exponent,
}

/// Orders of one term at every cusp of a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub term: String,
    pub group: Group,
    pub rows: Vec<OrderRow>,
}

impl OrderReport {
    pub fn new(name: impl Into<String>, t: &Term, table: &CuspTable) -> Self {
        let rows = table
            .entries
            .iter()
            .map(|e| {
                let ord = term_ord(t, e.cusp);
                OrderRow { cusp: e.cusp, width: e.width, ord, big_ord: ord * e.width }
            })
            .collect();
        OrderReport { term: name.into(), group: table.group, rows }
    }

    pub fn big_ords(&self) -> Vec<Exponent> {
        self.rows.iter().map(|r| r.big_ord).collect()
    }

    /// Valence sum `sum ORD` over the table.
    pub fn total(&self) -> Exponent {
        self.rows.iter().map(|r| r.big_ord).fold(Exponent::from_integer(0), |a, b| a + b)
    }
}
