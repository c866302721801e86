//! The reproduction battery behind `etaprove suite`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use etaprove::cusps::CuspTable;
use etaprove::etaq::{expand, Term};
use etaprove::identities;
use etaprove::prover::ProverOptions;
use etaprove::ranktheorems::{
    af_table, check_cf_congruence, check_congruence, verify_af5id, verify_af7id, verify_j1_dissection,
    verify_l_valuations, verify_quintic_b, CongruenceFamily, L_FULL_DEPTH,
};
use etaprove::specfile::{bundled, BUNDLED};
use etaprove::upalgebra::{check_valuation_bounds, seed_tables, SigmaSet, ValuationLedger};
use etaprove::{EtaQuotient, Exponent, Group, OrderReport};

pub const DEFAULT_SERIES_DEPTH: i64 = 50;

/// `a_f` table size covering every congruence scan in the battery.
const TABLE_SIZE: usize = 25_600;

#[derive(Serialize)]
struct CheckResult {
    id: String,
    verdict: &'static str,
    depth: Option<i64>,
    runtime_ms: u128,
    detail: String,
}

type Check = Box<dyn Fn() -> (bool, Option<i64>, String) + Send + Sync>;

fn cusp_table_check(n: i64, want: &'static [(&'static str, i64)]) -> Check {
    Box::new(move || {
        let t = CuspTable::for_group(Group::Gamma0(n));
        let got: Vec<(String, i64)> = t.entries.iter().map(|e| (e.cusp.to_string(), e.width)).collect();
        let mut a = got.clone();
        let mut b: Vec<(String, i64)> = want.iter().map(|(c, w)| (c.to_string(), *w)).collect();
        a.sort();
        b.sort();
        (a == b, None, format!("{} cusps", got.len()))
    })
}

fn orders_check(n: i64, f: fn() -> EtaQuotient, want: &'static [(&'static str, (i64, i64))]) -> Check {
    Box::new(move || {
        let term = Term::Eta(f().at_level(n).expect("level"));
        let r = OrderReport::new("f", &term, &CuspTable::for_group(Group::Gamma0(n)));
        let bad: Vec<String> = want
            .iter()
            .filter_map(|(c, (num, den))| {
                let row = r.rows.iter().find(|row| row.cusp.to_string() == *c)?;
                (row.big_ord != Exponent::new(*num, *den)).then(|| format!("{c}: {}", row.big_ord))
            })
            .collect();
        let missing = want.iter().filter(|(c, _)| !r.rows.iter().any(|row| row.cusp.to_string() == *c)).count();
        (bad.is_empty() && missing == 0, None, if bad.is_empty() { "match".into() } else { bad.join(", ") })
    })
}

fn f1() -> EtaQuotient {
    EtaQuotient::new(20, [(10, 8), (1, 4), (5, -4), (2, -8)]).expect("valid")
}

fn f2() -> EtaQuotient {
    EtaQuotient::new(20, [(10, 5), (1, 2), (20, -3), (5, -2), (4, -1), (2, -1)]).expect("valid")
}

fn t5() -> EtaQuotient {
    identities::t().dilate(5)
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

const ORD_T: &[(&str, (i64, i64))] = &[
    ("0", (0, 1)),
    ("1/2", (-5, 1)),
    ("1/5", (0, 1)),
    ("1/10", (1, 1)),
    ("3/10", (1, 1)),
    ("1/25", (0, 1)),
    ("1/50", (1, 1)),
];

const ORD_T5: &[(&str, (i64, i64))] = &[
    ("0", (0, 1)),
    ("1/2", (-1, 1)),
    ("2/5", (0, 1)),
    ("1/10", (-1, 1)),
    ("9/10", (-1, 1)),
    ("1/25", (0, 1)),
    ("1/50", (5, 1)),
];

const ORD_F1: &[(&str, (i64, i64))] =
    &[("0", (0, 1)), ("1/2", (-2, 1)), ("1/4", (-2, 1)), ("1/5", (0, 1)), ("1/10", (2, 1)), ("1/20", (2, 1))];

const ORD_F2: &[(&str, (i64, i64))] =
    &[("0", (1, 1)), ("1/2", (0, 1)), ("1/4", (-1, 1)), ("1/5", (0, 1)), ("1/10", (1, 1)), ("1/20", (-1, 1))];

fn checks(series_depth: i64) -> Vec<(String, Check)> {
    let mut v: Vec<(String, Check)> = vec![
        ("cusps.gamma0-50".into(), cusp_table_check(50, GAMMA0_50)),
        ("cusps.gamma0-20".into(), cusp_table_check(20, GAMMA0_20)),
        ("orders.t".into(), orders_check(50, identities::t, ORD_T)),
        ("orders.t5".into(), orders_check(50, t5, ORD_T5)),
        ("orders.f1".into(), orders_check(20, f1, ORD_F1)),
        ("orders.f2".into(), orders_check(20, f2, ORD_F2)),
    ];
    for (name, _) in BUNDLED {
        let name = name.to_string();
        v.push((
            format!("prove.{name}"),
            Box::new(move || {
                let spec = bundled(&name).expect("bundled");
                match spec.prove(ProverOptions::default()) {
                    Ok(c) => {
                        let series = spec.series_mismatch(series_depth);
                        let ok = c.is_proven() && matches!(series, Ok(None));
                        let detail = format!(
                            "B = {}, verdict {:?}, series below q^{series_depth}: {}",
                            c.b,
                            c.verdict,
                            match series {
                                Ok(None) => "equal".to_string(),
                                Ok(Some((e, k))) => format!("differ at q^{e} by {k}"),
                                Err(e) => e.to_string(),
                            }
                        );
                        (ok, Some(c.verified_depth), detail)
                    }
                    Err(e) => (false, None, e.to_string()),
                }
            }),
        ));
    }
    v.push((
        "b.seed-battery-minimum".into(),
        Box::new(|| {
            let mut min: Option<Exponent> = None;
            for (name, _) in BUNDLED.iter().filter(|(n, _)| n.starts_with("seed-")) {
                if let Ok(c) = bundled(name).expect("bundled").prove(ProverOptions::default()) {
                    min = Some(min.map_or(c.b, |m: Exponent| m.min(c.b)));
                }
            }
            let want = Exponent::from_integer(-14);
            match min {
                Some(m) => (m == want, None, format!("minimum B = {m}, expected {want}")),
                None => (false, None, "no certificates".into()),
            }
        }),
    ));
    v.push((
        "series.t-expansion".into(),
        Box::new(|| {
            let want = [1, -2, 3, -6, 11, -16, 24, -38, 57, -82, 117];
            let s = expand(&identities::t(), 12);
            let got: Vec<String> = (1..=11).map(|n| s.coeff_at(n).map(|c| c.to_string()).unwrap_or_default()).collect();
            let ok = got.iter().zip(want).all(|(g, w)| *g == w.to_string());
            (ok, Some(12), got.join(" "))
        }),
    ));
    v.push((
        "series.af-leading".into(),
        Box::new(|| {
            let want = [1, 1, -2, 3, -3, 3, -5, 7, -6, 6, -10, 12, -11];
            let t = af_table(12);
            let ok = t.values().iter().zip(want).all(|(a, w)| *a == w.into());
            (ok, Some(13), t.values().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "))
        }),
    ));
    v.push((
        "series.af-eulerian".into(),
        Box::new(|| {
            let t = af_table(300);
            let ok = t.values() == etaprove::ranktheorems::af_eulerian(300).as_slice();
            (ok, Some(300), "bilateral vs Eulerian".into())
        }),
    ));
    v.push(("series.j1-dissection".into(), Box::new(|| (verify_j1_dissection(500), Some(500), String::new()))));
    v.push(("series.quintic-b".into(), Box::new(|| (verify_quintic_b(500), Some(500), String::new()))));
    v.push((
        "genfn.af5".into(),
        Box::new(|| {
            let t = af_table(1000);
            (verify_af5id(200, &t).unwrap_or(false), Some(200), String::new())
        }),
    ));
    v.push((
        "genfn.af7".into(),
        Box::new(|| {
            let t = af_table(1400);
            (verify_af7id(200, &t).unwrap_or(false), Some(200), String::new())
        }),
    ));
    let scans: [(&str, CongruenceFamily, u32, i64); 3] = [
        ("congruence.mod5-alpha3", CongruenceFamily::Mod5, 3, 100),
        ("congruence.mod5-alpha4", CongruenceFamily::Mod5, 4, 40),
        ("congruence.mod7-alpha3", CongruenceFamily::Mod7, 3, 50),
    ];
    for (id, fam, alpha, nmax) in scans {
        v.push((
            id.into(),
            Box::new(move || {
                let t = af_table(TABLE_SIZE);
                match check_congruence(fam, alpha, (0, nmax), &t) {
                    Ok(r) => (r.passed(), Some(nmax), format!("mod {}, {} failures", r.modulus, r.failures.len())),
                    Err(e) => (false, None, e.to_string()),
                }
            }),
        ));
    }
    for a in 2..=5u32 {
        v.push((
            format!("congruence.cf-5pow{a}"),
            Box::new(move || {
                let r = check_cf_congruence(a, &af_table(TABLE_SIZE));
                (r.passed(), Some(r.n_range.1), format!("mod {}, n <= {}", r.modulus, r.n_range.1))
            }),
        ));
    }
    v.push((
        "valuation.sigma".into(),
        Box::new(|| (SigmaSet::standard().valuation_bounds_hold(), None, String::new())),
    ));
    v.push((
        "valuation.seeds".into(),
        Box::new(|| {
            let (gi, gii) = seed_tables();
            let a = check_valuation_bounds(&ValuationLedger::from_family(&gi), |k, n| (3 * n - k - 2).div_euclid(4));
            let b = check_valuation_bounds(&ValuationLedger::from_family(&gii), |k, n| (3 * n - k).div_euclid(4));
            (a && b, None, String::new())
        }),
    ));
    v.push((
        "valuation.l-sequence".into(),
        Box::new(|| match verify_l_valuations(4, L_FULL_DEPTH) {
            Ok(r) => {
                let d: Vec<String> =
                    r.entries.iter().map(|e| format!("L_{}: degree {:?}, {:?}", e.index, e.degree, e.route)).collect();
                (r.passed(), Some(L_FULL_DEPTH), d.join("; "))
            }
            Err(e) => (false, None, e.to_string()),
        }),
    ));
    v
}

pub fn run(series_depth: i64) -> (Value, String, crate::Outcome) {
    let mut results: Vec<CheckResult> = checks(series_depth)
        .into_par_iter()
        .map(|(id, f)| {
            let start = Instant::now();
            let (ok, depth, detail) = f();
            CheckResult {
                id,
                verdict: if ok { "pass" } else { "fail" },
                depth,
                runtime_ms: start.elapsed().as_millis(),
                detail,
            }
        })
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    let failed = results.iter().filter(|r| r.verdict == "fail").count();
    let text: String = results.iter().map(|r| format!("{:<32} {} {}\n", r.id, r.verdict, r.detail)).collect();
    let value = json!({
        "passed": results.len() - failed,
        "failed": failed,
        "checks": results,
    });
    (value, text, if failed == 0 { crate::Outcome::Ok } else { crate::Outcome::CheckFailed })
}
