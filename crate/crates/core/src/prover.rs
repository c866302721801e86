//! Valence-formula certificates for eta-quotient, generalized eta-quotient
//! and `U_p` identities.
//!
//! Every algorithm follows the same shape: check modularity of each term,
//! bound the order of the combination at every cusp other than infinity,
//! add the bounds into `B`, and expand at infinity far enough to see that the
//! order there exceeds `-B`. The valence formula then forces the combination
//! to vanish identically.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, nu};
use crate::cusps::{width, Cusp, CuspTable, Group};
use crate::error::{Error, Result};
use crate::etaq::{expand_combination, CombTerm, EtaQuotient, LinearCombination, Term};
use crate::orders::{eta_ord_unchecked, term_ord, term_violations};
use crate::series::ExactSeries;
use crate::Exponent;

/// Version of the certificate JSON layout.
pub const CERTIFICATE_FORMAT: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Proven,
    Counterexample {
        #[serde(serialize_with = "crate::ser::ratio")]
        exponent: Exponent,
        #[serde(serialize_with = "crate::ser::bigint")]
        coefficient: BigInt,
    },
    InsufficientPrecision {
        needed: i64,
        available: i64,
    },
}

impl Verdict {
    pub fn is_proven(&self) -> bool {
        matches!(self, Verdict::Proven)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    /// `ORD` computed exactly from the order formula.
    Exact,
    /// Lower bound for the order of a `U_p` image.
    LowerBound,
}

/// Orders (or lower bounds) of one term at every cusp of the table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermOrders {
    pub term: String,
    #[serde(serialize_with = "crate::ser::bigrational")]
    pub coef: BigRational,
    pub kind: OrderKind,
    #[serde(serialize_with = "crate::ser::ratios")]
    pub values: Vec<Exponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofCertificate {
    pub format_version: u32,
    pub kind: String,
    pub group: Group,
    pub prime: Option<i64>,
    pub identity: String,
    pub cusps: CuspTable,
    pub infinity_cusp: Cusp,
    pub orders: Vec<TermOrders>,
    /// Per-cusp minimum entering `B`; `None` at the infinity class.
    #[serde(serialize_with = "crate::ser::opt_ratios")]
    pub minima: Vec<Option<Exponent>>,
    #[serde(rename = "B", serialize_with = "crate::ser::ratio")]
    pub b: Exponent,
    /// The combination must vanish below `q^required_depth`, i.e. at every
    /// exponent up to `floor(-B)`.
    pub required_depth: i64,
    pub verified_depth: i64,
    pub notes: Vec<String>,
    pub assumptions: Vec<String>,
    pub verdict: Verdict,
}

impl ProofCertificate {
    pub fn is_proven(&self) -> bool {
        self.verdict.is_proven()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

/// Expansion controls shared by the three provers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ProverOptions {
    /// Expand at least this deep (in `q` at infinity) even if `B` needs less.
    pub depth: Option<i64>,
    /// Refuse to expand past this depth.
    pub cap: Option<i64>,
}

const NO_INTERIOR: &str =
    "eta quotients have no zeros or poles in the upper half-plane; elliptic points contribute nothing";

/// `floor(-B) + 1`.
pub fn required_depth(b: Exponent) -> i64 {
    (-b).floor().to_integer() + 1
}

fn depth_for(b: Exponent, opts: ProverOptions) -> Result<(i64, i64)> {
    let required = required_depth(b);
    if let Some(cap) = opts.cap {
        if cap < required {
            return Err(Error::PrecisionExceeded {
                requested: Exponent::from_integer(required),
                available: Exponent::from_integer(cap),
            });
        }
    }
    let mut verified = required.max(opts.depth.unwrap_or(required));
    if let Some(cap) = opts.cap {
        verified = verified.min(cap);
    }
    Ok((required, verified))
}

/// First nonzero coefficient below `q^depth`, or a precision shortfall.
fn vanishing_verdict(h: &ExactSeries, depth: i64) -> Verdict {
    let bound = Exponent::from_integer(depth);
    if let Some((e, c)) = h.terms().find(|(e, c)| *e < bound && !c.is_zero()) {
        return Verdict::Counterexample { exponent: e, coefficient: c.clone() };
    }
    if h.prec() < bound {
        return Verdict::InsufficientPrecision { needed: depth, available: h.prec().floor().to_integer() };
    }
    Verdict::Proven
}

fn check_terms(l: &LinearCombination, group: Group) -> Result<()> {
    for (i, t) in l.terms().iter().enumerate() {
        if !t.shift.is_zero() {
            return Err(Error::InvalidQuotient(format!(
                "term {i} carries a factor q^({}) and is not a modular function",
                t.shift
            )));
        }
        let v = term_violations(&t.term, group);
        if !v.is_empty() {
            return Err(Error::NotModular { term: i, group: group.to_string(), reason: v.join("; ") });
        }
    }
    Ok(())
}

fn exact_orders(l: &LinearCombination, table: &CuspTable) -> Vec<TermOrders> {
    l.terms()
        .par_iter()
        .map(|t| TermOrders {
            term: t.term.to_string(),
            coef: t.coef.clone(),
            kind: OrderKind::Exact,
            values: table.entries.iter().map(|e| term_ord(&t.term, e.cusp) * e.width).collect(),
        })
        .collect()
}

/// Per-cusp minima over all order rows (plus `extra` if given), and their
/// sum over the cusps other than infinity.
fn b_constant(table: &CuspTable, orders: &[TermOrders], extra: Option<Exponent>) -> (Vec<Option<Exponent>>, Exponent) {
    let inf = table.infinity_index();
    let minima: Vec<Option<Exponent>> = (0..table.len())
        .map(|i| {
            if i == inf {
                return None;
            }
            let m = orders.iter().map(|o| o.values[i]).chain(extra).min();
            Some(m.unwrap_or_else(Exponent::zero))
        })
        .collect();
    let b = minima.iter().flatten().fold(Exponent::zero(), |a, &x| a + x);
    (minima, b)
}

/// Multiplies a combination through by `k`.
fn scaled(l: &LinearCombination, k: &BigInt) -> LinearCombination {
    let k = BigRational::from_integer(k.clone());
    let terms = l.terms().iter().map(|t| CombTerm { coef: &t.coef * &k, ..t.clone() }).collect();
    LinearCombination::new(l.level(), terms).expect("same level")
}

/// Certifies `sum alpha_j f_j = 0` for eta quotients on `Gamma_0(N)`.
pub fn prove_eta_identity(l: &LinearCombination, opts: ProverOptions) -> Result<ProofCertificate> {
    let group = Group::Gamma0(l.level());
    check_terms(l, group)?;
    let table = CuspTable::for_group(group);
    let orders = exact_orders(l, &table);
    let (minima, b) = b_constant(&table, &orders, None);
    let (required, verified) = depth_for(b, opts)?;
    let (integral, _) = l.clear_denominators();
    let h = expand_combination(&integral, verified)?;
    Ok(ProofCertificate {
        format_version: CERTIFICATE_FORMAT,
        kind: "eta".into(),
        group,
        prime: None,
        identity: format!("{l} = 0"),
        infinity_cusp: table.entries[table.infinity_index()].cusp,
        cusps: table,
        orders,
        minima,
        b,
        required_depth: required,
        verified_depth: verified,
        notes: vec![],
        assumptions: vec![NO_INTERIOR.into()],
        verdict: vanishing_verdict(&h, verified),
    })
}

/// Rewrites `sum alpha_j f_j = 0` as `sum (alpha_j / alpha_p) (f_j / f_p) = 0`
/// where `f_p` has the smallest order at infinity, so that a constant term 1
/// appears.
fn normalize_gen(l: &LinearCombination) -> Result<(LinearCombination, Option<String>)> {
    let has_const = l.terms().iter().any(|t| t.term.is_one() && !t.coef.is_zero());
    if has_const {
        return Ok((l.clone(), None));
    }
    let pivot = l
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.coef.is_zero())
        .min_by_key(|(_, t)| t.term.order_at_infinity())
        .map(|(i, _)| i)
        .ok_or(Error::NormalizationRequired)?;
    let p = &l.terms()[pivot];
    let Term::Gen(pf) = &p.term else {
        return Err(Error::NormalizationRequired);
    };
    let mut terms = Vec::new();
    for t in l.terms() {
        let Term::Gen(f) = &t.term else {
            return Err(Error::NormalizationRequired);
        };
        terms.push(CombTerm {
            coef: &t.coef / &p.coef,
            shift: Exponent::zero(),
            term: Term::Gen(f.div(pf).at_level(l.level())?),
        });
    }
    let note = format!("normalized by dividing through by term {pivot} ({})", p.term);
    Ok((LinearCombination::new(l.level(), terms)?, Some(note)))
}

/// Certifies `sum alpha_j f_j + 1 = 0` for generalized eta quotients on
/// `Gamma_1(N)`. Inputs without a constant term are normalized first.
pub fn prove_gen_identity(l: &LinearCombination, opts: ProverOptions) -> Result<ProofCertificate> {
    let group = Group::Gamma1(l.level());
    let (l, note) = normalize_gen(l)?;
    check_terms(&l, group)?;
    let table = CuspTable::for_group(group);
    let orders = exact_orders(&l, &table);
    let (minima, b) = b_constant(&table, &orders, Some(Exponent::zero()));
    let (required, verified) = depth_for(b, opts)?;
    let (integral, _) = l.clear_denominators();
    let h = expand_combination(&integral, verified)?;
    Ok(ProofCertificate {
        format_version: CERTIFICATE_FORMAT,
        kind: "gen".into(),
        group,
        prime: None,
        identity: format!("{l} = 0"),
        infinity_cusp: table.entries[table.infinity_index()].cusp,
        cusps: table,
        orders,
        minima,
        b,
        required_depth: required,
        verified_depth: verified,
        notes: note.into_iter().collect(),
        assumptions: vec![NO_INTERIOR.into(), "orders at cusps are evaluated at the listed representative a/c".into()],
        verdict: vanishing_verdict(&h, verified),
    })
}

/// Which branch of the Gordon-Hughes bound applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GhCase {
    /// `2 nu_p(delta) >= nu_p(N)`; `boundary` when equality holds.
    Scaled { boundary: bool },
    /// `0 < nu_p(delta) < nu_p(N) / 2`.
    Direct,
    /// `nu_p(delta) = 0`: minimum over the `p` translates.
    Translates,
}

/// `ORD(f, a/c, Gamma_0(M))`.
fn ord0(f: &EtaQuotient, m: i64, z: Cusp) -> Exponent {
    eta_ord_unchecked(f, z) * width(Group::Gamma0(m), z)
}

/// Lower bound for `ORD(U_p f, r, Gamma_0(N))` where `f` is modular on
/// `Gamma_0(pN)`, `p | N` and `r = beta/delta` with `delta | N`.
pub fn gordon_hughes_bound(p: i64, n: i64, f: &EtaQuotient, r: Cusp) -> Result<(Exponent, GhCase)> {
    if !is_prime(p) {
        return Err(Error::CaseError(format!("{p} is not prime")));
    }
    if n % p != 0 {
        return Err(Error::CaseError(format!("{p} does not divide {n}")));
    }
    let pn = p * n;
    if f.level() != pn && pn % f.level() != 0 {
        return Err(Error::CaseError(format!("term of level {} is not on Gamma0({pn})", f.level())));
    }
    // Infinity is represented by 1/N in the Chua-Lang table.
    let (beta, delta) = if r.is_infinity() { (1, n) } else { (r.a(), r.c()) };
    if n % delta != 0 {
        return Err(Error::CaseError(format!("cusp {r} has denominator not dividing {n}")));
    }
    let (vd, vn) = (nu(p, delta), nu(p, n));
    if 2 * vd >= vn {
        let bound = ord0(f, pn, Cusp::new(beta, p * delta)) / p;
        Ok((bound, GhCase::Scaled { boundary: 2 * vd == vn }))
    } else if vd > 0 {
        Ok((ord0(f, pn, Cusp::new(beta, p * delta)), GhCase::Direct))
    } else {
        let m = (0..p).map(|k| ord0(f, pn, Cusp::new(beta + k * delta, p * delta))).min().expect("p >= 2");
        Ok((m, GhCase::Translates))
    }
}

/// Certifies `U_p(sum alpha_j g_j) = sum beta_j f_j` with `g_j` modular on
/// `Gamma_0(pN)` and `f_j` modular on `Gamma_0(N)`.
pub fn prove_up_identity(
    p: i64,
    g: &LinearCombination,
    f: &LinearCombination,
    opts: ProverOptions,
) -> Result<ProofCertificate> {
    let n = f.level();
    if !is_prime(p) || n % p != 0 {
        return Err(Error::CaseError(format!("need a prime p dividing N, got p = {p}, N = {n}")));
    }
    if g.level() != p * n {
        return Err(Error::CaseError(format!("left block has level {} but U_{p} needs level {}", g.level(), p * n)));
    }
    check_terms(g, Group::Gamma0(p * n))?;
    check_terms(f, Group::Gamma0(n))?;
    let table = CuspTable::for_group(Group::Gamma0(n));
    let mut orders = exact_orders(f, &table);
    let mut notes = Vec::new();
    for t in g.terms() {
        let Term::Eta(q) = &t.term else {
            return Err(Error::CaseError("U_p identities take eta quotients only".into()));
        };
        let mut values = Vec::new();
        for e in &table.entries {
            let (v, case) = gordon_hughes_bound(p, n, q, e.cusp)?;
            if case == (GhCase::Scaled { boundary: true }) {
                let note = format!("cusp {}: nu_p(delta) = nu_p(N)/2, first case taken", e.cusp);
                if !notes.contains(&note) {
                    notes.push(note);
                }
            }
            values.push(v);
        }
        orders.push(TermOrders {
            term: format!("U_{p}({})", t.term),
            coef: t.coef.clone(),
            kind: OrderKind::LowerBound,
            values,
        });
    }
    let (minima, b) = b_constant(&table, &orders, None);
    let (required, verified) = depth_for(b, opts)?;

    // Clear denominators on both sides with one common factor.
    let lcm =
        g.terms().iter().chain(f.terms()).fold(BigInt::one(), |acc, t| num_integer::lcm(acc, t.coef.denom().clone()));
    let (gs, fs) = (scaled(g, &lcm), scaled(f, &lcm));
    let (left, right) = rayon::join(|| expand_combination(&gs, p * verified), || expand_combination(&fs, verified));
    let h = left?.u_p(p)?.sub(&right?);
    Ok(ProofCertificate {
        format_version: CERTIFICATE_FORMAT,
        kind: "up".into(),
        group: Group::Gamma0(n),
        prime: Some(p),
        identity: format!("U_{p}({g}) = {f}"),
        infinity_cusp: table.entries[table.infinity_index()].cusp,
        cusps: table,
        orders,
        minima,
        b,
        required_depth: required,
        verified_depth: verified,
        notes,
        assumptions: vec![
            NO_INTERIOR.into(),
            "orders of U_p images are Gordon-Hughes lower bounds, not exact values".into(),
        ],
        verdict: vanishing_verdict(&h, verified),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etaq::GenEtaQuotient;

    fn eta(level: i64, e: &[(i64, i64)]) -> Term {
        Term::Eta(EtaQuotient::new(level, e.iter().copied()).unwrap())
    }

    fn comb(level: i64, terms: Vec<(i64, Term)>) -> LinearCombination {
        let mut l = LinearCombination::new(level, vec![]).unwrap();
        for (c, t) in terms {
            l.push(BigInt::from(c), t).unwrap();
        }
        l
    }

    #[test]
    fn f_minus_f_is_proven() {
        let t = eta(10, &[(1, 2), (10, 4), (2, -4), (5, -2)]);
        let cert = prove_eta_identity(&comb(10, vec![(1, t.clone()), (-1, t)]), Default::default()).unwrap();
        assert!(cert.is_proven());
    }

    #[test]
    fn nonidentity_gives_counterexample() {
        let t = eta(10, &[(1, 2), (10, 4), (2, -4), (5, -2)]);
        let one = Term::Eta(EtaQuotient::one(10));
        let cert = prove_eta_identity(&comb(10, vec![(1, t), (-1, one)]), Default::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::Counterexample { exponent: Exponent::zero(), coefficient: BigInt::from(-1) });
    }

    #[test]
    fn non_modular_term_is_rejected() {
        let l = comb(1, vec![(1, eta(1, &[(1, 1)]))]);
        assert!(matches!(prove_eta_identity(&l, Default::default()), Err(Error::NotModular { term: 0, .. })));
    }

    #[test]
    fn shifted_term_is_rejected() {
        let mut l = LinearCombination::new(10, vec![]).unwrap();
        l.push_j(1, 0, &[(1, 1)]).unwrap();
        assert!(matches!(prove_eta_identity(&l, Default::default()), Err(Error::InvalidQuotient(_))));
    }

    #[test]
    fn cap_below_requirement_errors() {
        let t = eta(10, &[(1, 2), (10, 4), (2, -4), (5, -2)]);
        let l = comb(10, vec![(1, t.clone()), (-1, t)]);
        let opts = ProverOptions { depth: None, cap: Some(-100) };
        assert!(matches!(prove_eta_identity(&l, opts), Err(Error::PrecisionExceeded { .. })));
    }

    #[test]
    fn trivial_gen_identity() {
        let one = Term::Gen(GenEtaQuotient::one(5));
        let cert = prove_gen_identity(&comb(5, vec![(1, one.clone()), (-1, one)]), Default::default()).unwrap();
        assert!(cert.is_proven());
        assert_eq!(cert.b, Exponent::zero());
    }

    #[test]
    fn zero_up_identity() {
        let g = LinearCombination::new(100, vec![]).unwrap();
        let f = LinearCombination::new(20, vec![]).unwrap();
        let cert = prove_up_identity(5, &g, &f, Default::default()).unwrap();
        assert!(cert.is_proven());
    }

    #[test]
    fn gordon_hughes_dispatch() {
        let f = EtaQuotient::one(100);
        assert_eq!(gordon_hughes_bound(5, 20, &f, Cusp::new(0, 1)).unwrap().1, GhCase::Translates);
        assert_eq!(gordon_hughes_bound(5, 20, &f, Cusp::new(1, 10)).unwrap().1, GhCase::Scaled { boundary: false });
        let f250 = EtaQuotient::one(250);
        assert_eq!(gordon_hughes_bound(5, 50, &f250, Cusp::new(1, 5)).unwrap().1, GhCase::Scaled { boundary: true });
        assert!(gordon_hughes_bound(4, 20, &f, Cusp::new(0, 1)).is_err());
        assert!(gordon_hughes_bound(3, 20, &f, Cusp::new(0, 1)).is_err());
    }
}
