//! Oracles, property bodies and the mutation battery shared by the
//! integration targets.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use etaprove::etaq::Term;
use etaprove::identities::*;
use etaprove::prover::ProverOptions;
use etaprove::specfile::{parse_spec, IdentitySpec};
use etaprove::upalgebra::{pa_series, pb_series, reduce_to_tpoly, t_series, verify_modular_equation_with, SigmaSet};
use etaprove::{CuspTable, EtaQuotient, ExactSeries, GenEtaQuotient, Group, LinearCombination, OrderReport, TPoly};

// ---------------------------------------------------------------- oracles

pub fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Totient by direct count.
pub fn euler_phi(n: i64) -> i64 {
    (1..=n).filter(|k| gcd(*k, n) == 1).count() as i64
}

/// `[SL_2(Z) : Gamma_0(N)] = N prod_{p | N} (1 + 1/p)`.
pub fn gamma0_index(n: i64) -> i64 {
    let mut m = n;
    let mut idx = n;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            idx = idx / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    idx
}

/// Number of cusps of `Gamma_0(N)`: `sum_{d | N} phi(gcd(d, N/d))`.
pub fn gamma0_cusp_count(n: i64) -> usize {
    divisors(n).iter().map(|&d| euler_phi(gcd(d, n / d))).sum::<i64>() as usize
}

// ------------------------------------------------------------- properties

pub fn arb_series() -> impl Strategy<Value = ExactSeries> {
    (-3i64..3, prop::collection::vec(-50i64..50, 1..24)).prop_map(|(lo, c)| ExactSeries::from_i64s(lo, &c))
}

/// Series with a unit leading coefficient, so exact division stays integral.
pub fn arb_unit_series() -> impl Strategy<Value = ExactSeries> {
    (-3i64..3, prop::bool::ANY, prop::collection::vec(-50i64..50, 0..24)).prop_map(|(lo, neg, rest)| {
        let mut c = vec![if neg { -1 } else { 1 }];
        c.extend(rest);
        ExactSeries::from_i64s(lo, &c)
    })
}

fn same(a: &ExactSeries, b: &ExactSeries) -> bool {
    a.sub(b).is_zero()
}

pub fn ring_axioms(a: &ExactSeries, b: &ExactSeries, c: &ExactSeries, u: &ExactSeries) -> Result<(), TestCaseError> {
    prop_assert!(same(&a.add(b), &b.add(a)));
    prop_assert!(same(&a.mul(b), &b.mul(a)));
    prop_assert!(same(&a.add(b).add(c), &a.add(&b.add(c))));
    prop_assert!(same(&a.mul(b).mul(c), &a.mul(&b.mul(c))));
    prop_assert!(same(&a.mul(&b.add(c)), &a.mul(b).add(&a.mul(c))));
    prop_assert!(a.sub(a).is_zero());
    prop_assert!(same(&a.mul(u).div(u).unwrap(), a));
    Ok(())
}

pub const VALENCE_LEVELS: [i64; 4] = [10, 20, 50, 100];

/// A Newman-modular quotient on `Gamma_0(N)`: exponents `24 s_d` with
/// `sum s_d = 0`, times powers of known modular quotients when their level
/// divides `N`.
pub fn arb_modular_quotient() -> impl Strategy<Value = EtaQuotient> {
    (prop::sample::select(VALENCE_LEVELS.to_vec()), prop::collection::vec(-2i64..=2, 12), -3i64..=3, -3i64..=3)
        .prop_map(|(n, s, kt, kf)| {
            let ds = divisors(n);
            let mut exps: Vec<(i64, i64)> = ds.iter().skip(1).zip(&s).map(|(&d, &e)| (d, 24 * e)).collect();
            let total: i64 = exps.iter().map(|e| e.1).sum();
            exps.push((1, -total));
            let mut f = EtaQuotient::new(n, exps).expect("valid");
            if n % 50 == 0 {
                f = f.mul(&t().pow(kt).at_level(n).expect("level"));
            }
            if n % 20 == 0 {
                let f1 = EtaQuotient::new(20, [(10, 8), (1, 4), (5, -4), (2, -8)]).expect("valid");
                f = f.mul(&f1.pow(kf).at_level(n).expect("level"));
            }
            f
        })
}

pub fn valence_sum_zero(f: &EtaQuotient) -> Result<(), TestCaseError> {
    let n = f.level();
    prop_assert!(etaprove::orders::newman_is_modular(f));
    let table = CuspTable::for_group(Group::Gamma0(n));
    prop_assert_eq!(table.len(), gamma0_cusp_count(n));
    prop_assert_eq!(table.widths().sum::<i64>(), gamma0_index(n));
    let r = OrderReport::new("f", &Term::Eta(f.clone()), &table);
    prop_assert_eq!(r.total(), etaprove::Exponent::from_integer(0));
    Ok(())
}

pub fn arb_tpoly() -> impl Strategy<Value = TPoly> {
    prop::collection::vec((0i64..=8, -1000i64..1000), 0..6).prop_map(|terms| TPoly::from_i64s(&terms))
}

/// `p` is recovered from `P p(t)` for both prefactors.
pub fn reduction_round_trip(p: &TPoly) -> Result<(), TestCaseError> {
    const PREC: i64 = 40;
    let t = t_series(PREC);
    let pt = p.eval(&t).unwrap();
    for v in [pa_series(PREC), pb_series(PREC)] {
        let s = v.mul(&pt);
        prop_assert_eq!(&reduce_to_tpoly(&s, &v, 0).unwrap(), p);
    }
    Ok(())
}

fn arb_eta(level: i64) -> impl Strategy<Value = EtaQuotient> {
    prop::collection::vec((prop::sample::select(divisors(level)), -30i64..30), 0..5)
        .prop_map(move |e| EtaQuotient::new(level, e).expect("valid"))
}

fn arb_gen(level: i64) -> impl Strategy<Value = GenEtaQuotient> {
    let keys: Vec<(i64, i64)> = divisors(level).into_iter().flat_map(|d| (1..=d / 2).map(move |g| (d, g))).collect();
    prop::collection::vec((prop::sample::select(keys), -12i64..12), 0..4).prop_map(move |e| {
        GenEtaQuotient::new(level, e.into_iter().map(|(k, r)| (k, etaprove::Exponent::from_integer(r)))).expect("valid")
    })
}

fn arb_coef() -> impl Strategy<Value = BigRational> {
    (-10_000i64..10_000, 1i64..50).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn arb_eta_combination(level: i64) -> impl Strategy<Value = LinearCombination> {
    prop::collection::vec((arb_coef(), arb_eta(level)), 0..5).prop_map(move |ts| {
        let mut l = LinearCombination::new(level, vec![]).expect("level");
        for (c, f) in ts {
            l.push(c, Term::Eta(f)).expect("level");
        }
        l
    })
}

pub fn arb_spec() -> impl Strategy<Value = IdentitySpec> {
    let name = "[a-z][a-z0-9_-]{0,12}";
    prop_oneof![
        (name, prop::sample::select(vec![10i64, 20, 50])).prop_flat_map(move |(s, n)| {
            arb_eta_combination(n).prop_map(move |l| IdentitySpec::zero(s.clone(), Group::Gamma0(n), l))
        }),
        (name, prop::collection::vec((arb_coef(), arb_gen(20)), 0..4)).prop_map(|(s, ts)| {
            let mut l = LinearCombination::new(20, vec![]).expect("level");
            for (c, f) in ts {
                l.push(c, Term::Gen(f)).expect("level");
            }
            IdentitySpec::zero(s, Group::Gamma1(20), l)
        }),
        (name, arb_eta_combination(100), arb_eta_combination(20)).prop_map(|(s, g, f)| IdentitySpec::up(s, 5, g, f)),
    ]
}

pub fn spec_round_trip(s: &IdentitySpec) -> Result<(), TestCaseError> {
    let text = s.to_string();
    let back = parse_spec(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(&back, s);
    Ok(())
}

/// Runs every property suite with `cases` cases each; returns failures.
pub fn run_property_suites(cases: u32) -> Vec<String> {
    let mut failures = Vec::new();
    let runner = || TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    if let Err(e) = runner()
        .run(&(arb_series(), arb_series(), arb_series(), arb_unit_series()), |(a, b, c, u)| ring_axioms(&a, &b, &c, &u))
    {
        failures.push(format!("ring axioms: {e}"));
    }
    if let Err(e) = runner().run(&arb_modular_quotient(), |f| valence_sum_zero(&f)) {
        failures.push(format!("valence sum: {e}"));
    }
    if let Err(e) = runner().run(&arb_tpoly(), |p| reduction_round_trip(&p)) {
        failures.push(format!("reduction round trip: {e}"));
    }
    if let Err(e) = runner().run(&arb_spec(), |s| spec_round_trip(&s)) {
        failures.push(format!("identity-file round trip: {e}"));
    }
    failures
}

// -------------------------------------------------------------- mutations

/// Outcome of one corrupted identity: refuted when the prover does not
/// certify it and the two sides differ in the expansion.
pub struct Mutation {
    pub name: String,
    pub refuted: bool,
    pub detail: String,
}

fn judge(name: String, spec: &IdentitySpec) -> Mutation {
    let cert = spec.prove(ProverOptions::default());
    let mismatch = spec.series_mismatch(60);
    let refuted = !matches!(&cert, Ok(c) if c.is_proven()) && matches!(mismatch, Ok(Some(_)));
    let detail = match (&cert, &mismatch) {
        (Ok(c), Ok(m)) => format!("verdict {:?}, first residual {:?}", c.verdict, m),
        (Err(e), _) | (_, Err(e)) => e.to_string(),
    };
    Mutation { name, refuted, detail }
}

pub fn mutation_battery() -> Vec<Mutation> {
    let mut out = Vec::new();
    for (j, l, c) in [(2, 1, -36), (1, 1, 11)] {
        let sigmas = SigmaSet::standard().with_coefficient(j, l, c);
        let name = format!("modeq s({j},{l}) -> {c}");
        let cert = verify_modular_equation_with(&sigmas, 200);
        let spec = IdentitySpec::zero("m", Group::Gamma0(50), modular_equation_with(&sigmas));
        let mut m = judge(name, &spec);
        m.refuted &= matches!(cert, Ok(c) if !c.is_proven());
        out.push(m);
    }
    let (g, f) = upalgeg_with(6, 2);
    out.push(judge("upalgeg 5 -> 6".into(), &IdentitySpec::up("m", 5, g, f)));
    let mut coefs: [i64; 9] = BIGTHETA_TERMS.map(|t| t.0);
    let i = coefs.iter().position(|&c| c == 4).expect("a coefficient 4");
    coefs[i] = 3;
    out.push(judge(
        format!("bigtheta term {i}: 4 -> 3"),
        &IdentitySpec::zero("m", Group::Gamma1(20), bigtheta_with(&coefs)),
    ));
    for (grp, tag) in [(SeedGroup::I, "i"), (SeedGroup::II, "ii")] {
        for j in 0..5 {
            let p = seed(grp, -j).expect("seed");
            let (&n, _) = p.coeffs().iter().next().expect("nonzero seed");
            let bumped = p.add(&TPoly::from_i64s(&[(n, 1)]));
            let (l, r) = lemma_identity(grp, -j, &bumped);
            out.push(judge(format!("seed-{tag}-{j} t^{n} + 1"), &IdentitySpec::up("m", 5, l, r)));
        }
    }
    out
}
