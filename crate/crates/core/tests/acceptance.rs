//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach the terminal.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use etaprove::etaq::{expand, Term};
use etaprove::identities;
use etaprove::prover::ProverOptions;
use etaprove::ranktheorems::*;
use etaprove::specfile::{bundled, BUNDLED};
use etaprove::upalgebra::{check_valuation_bounds, seed_tables, SigmaSet, ValuationLedger};
use etaprove::{CuspTable, EtaQuotient, Exponent, Group, OrderReport};

struct Line {
    ok: bool,
    detail: String,
    /// Sub-checks that fail for a documented reason and do not fail the run.
    known: Vec<String>,
}

impl Line {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Line { ok, detail: detail.into(), known: Vec::new() }
    }
}

fn timed(f: impl FnOnce() -> Line) -> (Line, Duration) {
    let s = Instant::now();
    let l = f();
    (l, s.elapsed())
}

const GAMMA0_50: &[(&str, i64)] = &[
    ("0", 50),
    ("1/2", 25),
    ("1/5", 2),
    ("2/5", 2),
    ("3/5", 2),
    ("4/5", 2),
    ("1/10", 1),
    ("3/10", 1),
    ("7/10", 1),
    ("9/10", 1),
    ("1/25", 2),
    ("1/50", 1),
];

const GAMMA0_20: &[(&str, i64)] = &[("0", 20), ("1/2", 5), ("1/4", 5), ("1/5", 4), ("1/10", 1), ("1/20", 1)];

fn cusp_tables() -> Line {
    let mut bad = Vec::new();
    for (n, want) in [(50, GAMMA0_50), (20, GAMMA0_20)] {
        let t = CuspTable::for_group(Group::Gamma0(n));
        let mut got: Vec<(String, i64)> = t.entries.iter().map(|e| (e.cusp.to_string(), e.width)).collect();
        let mut want: Vec<(String, i64)> = want.iter().map(|(c, w)| (c.to_string(), *w)).collect();
        got.sort();
        want.sort();
        if got != want {
            bad.push(format!("Gamma0({n}): {got:?}"));
        }
    }
    Line::new(
        bad.is_empty(),
        if bad.is_empty() { "12 cusps on Gamma0(50), 6 on Gamma0(20)".into() } else { bad.join("; ") },
    )
}

type OrdTable = &'static [(&'static str, i64)];

const ORD_T: OrdTable = &[("0", 0), ("1/2", -5), ("1/5", 0), ("1/10", 1), ("3/10", 1), ("1/25", 0), ("1/50", 1)];
const ORD_T5: OrdTable = &[("0", 0), ("1/2", -1), ("2/5", 0), ("1/10", -1), ("9/10", -1), ("1/25", 0), ("1/50", 5)];
const ORD_F1: OrdTable = &[("0", 0), ("1/2", -2), ("1/4", -2), ("1/5", 0), ("1/10", 2), ("1/20", 2)];
const ORD_F2: OrdTable = &[("0", 1), ("1/2", 0), ("1/4", -1), ("1/5", 0), ("1/10", 1), ("1/20", -1)];

fn order_tables() -> Line {
    let f1 = EtaQuotient::new(20, [(10, 8), (1, 4), (5, -4), (2, -8)]).unwrap();
    let f2 = EtaQuotient::new(20, [(10, 5), (1, 2), (20, -3), (5, -2), (4, -1), (2, -1)]).unwrap();
    let cases = [
        ("t", 50, identities::t(), ORD_T),
        ("t(5tau)", 50, identities::t().dilate(5), ORD_T5),
        ("f1", 20, f1, ORD_F1),
        ("f2", 20, f2, ORD_F2),
    ];
    let mut bad = Vec::new();
    for (name, n, f, want) in cases {
        let term = Term::Eta(f.at_level(n).unwrap());
        let r = OrderReport::new(name, &term, &CuspTable::for_group(Group::Gamma0(n)));
        for (c, v) in want {
            match r.rows.iter().find(|row| row.cusp.to_string() == *c) {
                Some(row) if row.big_ord == Exponent::from_integer(*v) => {}
                Some(row) => bad.push(format!("ORD({name}, {c}) = {}", row.big_ord)),
                None => bad.push(format!("{name}: no cusp {c}")),
            }
        }
    }
    Line::new(bad.is_empty(), if bad.is_empty() { "t, t(5tau), f1, f2 match".into() } else { bad.join(", ") })
}

fn b_values() -> Line {
    let b = |n: &str| bundled(n).unwrap().prove(ProverOptions::default()).unwrap().b;
    let (modeq, up, theta) = (b("modeq"), b("upalgeg"), b("bigthetaid"));
    // The Gamma_1(20) bound is often quoted as 24, the depth -B.
    let ok =
        modeq == Exponent::from_integer(-24) && up == Exponent::new(-18, 5) && theta == Exponent::from_integer(-24);
    let min = BUNDLED.iter().filter(|(n, _)| n.starts_with("seed-")).map(|(n, _)| b(n)).min().unwrap();
    let mut line = Line::new(ok, format!("modeq {modeq}, upalgeg {up}, bigthetaid {theta}, seed minimum {min}"));
    if min != Exponent::from_integer(-14) {
        line.known.push(format!("seed battery minimum is {min}, expected -14"));
    }
    line
}

fn proofs() -> Line {
    let mut bad = Vec::new();
    for (name, _) in BUNDLED {
        let s = bundled(name).unwrap();
        let proven = s.prove(ProverOptions::default()).map(|c| c.is_proven()).unwrap_or(false);
        let series = s.series_mismatch(50);
        if !proven || !matches!(series, Ok(None)) {
            bad.push(format!("{name}: proven {proven}, series {series:?}"));
        }
    }
    Line::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} certificates, series equal below q^50", BUNDLED.len())
        } else {
            bad.join("; ")
        },
    )
}

fn mutations() -> Line {
    let m = common::mutation_battery();
    let missed: Vec<&str> = m.iter().filter(|m| !m.refuted).map(|m| m.name.as_str()).collect();
    Line::new(
        missed.is_empty(),
        format!("{}/{} corruptions refuted {}", m.len() - missed.len(), m.len(), missed.join(", ")),
    )
}

fn anchors() -> Line {
    let af: Vec<i64> = vec![1, 1, -2, 3, -3, 3, -5, 7, -6, 6, -10, 12, -11];
    let af_ok = af_table(12).values().iter().zip(&af).all(|(a, w)| *a == (*w).into());
    let tw = [1, -2, 3, -6, 11, -16, 24, -38, 57, -82, 117];
    let ts = expand(&identities::t(), 12);
    let t_ok = (1..=11).zip(tw).all(|(n, w)| ts.coeff_at(n).map(|c| c == w.into()).unwrap_or(false));
    let gq3 = verify_j1_dissection(500);
    let idb = verify_quintic_b(500);
    let eul = af_table(300).values() == af_eulerian(300).as_slice();
    Line::new(
        af_ok && t_ok && gq3 && idb && eul,
        format!("a_f {af_ok}, t {t_ok}, J1 dissection {gq3}, quintic B {idb}, Eulerian {eul}"),
    )
}

fn generating_functions() -> Line {
    let t = af_table(1400);
    let a5 = verify_af5id(200, &t).unwrap_or(false);
    let a7 = verify_af7id(200, &t).unwrap_or(false);
    Line::new(a5 && a7, format!("mod 5 {a5}, mod 7 {a7} at depth 200"))
}

fn congruences() -> Line {
    let t = af_table(25_600);
    let mut parts = Vec::new();
    let mut ok = true;
    for (fam, alpha, nmax) in
        [(CongruenceFamily::Mod5, 3, 100), (CongruenceFamily::Mod5, 4, 40), (CongruenceFamily::Mod7, 3, 50)]
    {
        let r = check_congruence(fam, alpha, (0, nmax), &t).unwrap();
        ok &= r.passed();
        parts.push(format!("{fam} a={alpha} n<={nmax} mod {}: {} failures", r.modulus, r.failures.len()));
    }
    for a in 2..=5 {
        let r = check_cf_congruence(a, &t);
        ok &= r.passed();
        parts.push(format!("c_f 5^{a} mod {} n<={}: {} failures", r.modulus, r.n_range.1, r.failures.len()));
    }
    Line::new(ok, parts.join("; "))
}

fn valuations() -> Line {
    let l = verify_l_valuations(4, L_FULL_DEPTH).map(|r| r.passed()).unwrap_or(false);
    let sigma = SigmaSet::standard().valuation_bounds_hold();
    let (gi, gii) = seed_tables();
    let seeds = check_valuation_bounds(&ValuationLedger::from_family(&gi), |k, n| (3 * n - k - 2).div_euclid(4))
        && check_valuation_bounds(&ValuationLedger::from_family(&gii), |k, n| (3 * n - k).div_euclid(4));
    Line::new(l && sigma && seeds, format!("L_1..L_4 {l}, sigma set {sigma}, seeds {seeds}"))
}

fn properties() -> Line {
    let f = common::run_property_suites(128);
    Line::new(
        f.is_empty(),
        if f.is_empty() {
            "ring axioms, valence sum, reduction and identity-file round trips: 128 cases each".into()
        } else {
            f.join("; ")
        },
    )
}

type Criterion = (&'static str, fn() -> Line, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("cusp tables", cusp_tables, Some(Duration::from_secs(1))),
        ("order tables", order_tables, None),
        ("B values", b_values, None),
        ("proof battery", proofs, Some(Duration::from_secs(120))),
        ("mutation soundness", mutations, None),
        ("series anchors", anchors, None),
        ("generating functions", generating_functions, Some(Duration::from_secs(60))),
        ("congruences", congruences, Some(Duration::from_secs(600))),
        ("valuation structure", valuations, None),
        ("property suites", properties, None),
    ];
    let mut unexpected = 0;
    for (i, (name, f, limit)) in criteria.into_iter().enumerate() {
        let (line, took) = timed(f);
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = line.ok && in_time && line.known.is_empty();
        if !(line.ok && in_time) {
            unexpected += 1;
        }
        println!(
            "criterion {:>2} {:<22} {} ({:.2?}) {}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            took,
            line.detail
        );
        for k in &line.known {
            println!("             known failure: {k}");
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
