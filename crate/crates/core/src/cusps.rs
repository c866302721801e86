//! Inequivalent cusps and fan widths for `Gamma_0(N)` and `Gamma_1(N)`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith::{divisors, gcd};

/// A reduced fraction `a/c` with `c >= 0`; infinity is `1/0`, shown as `oo`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    a: i64,
    c: i64,
}

impl Cusp {
    /// Reduces `a/c` and moves the sign onto the numerator.
    pub fn new(a: i64, c: i64) -> Cusp {
        assert!(a != 0 || c != 0, "0/0 is not a cusp");
        let g = gcd(a, c);
        let (mut a, mut c) = (a / g, c / g);
        if c < 0 || (c == 0 && a < 0) {
            a = -a;
            c = -c;
        }
        Cusp { a, c }
    }

    pub fn infinity() -> Cusp {
        Cusp { a: 1, c: 0 }
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn is_infinity(&self) -> bool {
        self.c == 0
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.c {
            0 => write!(f, "oo"),
            1 => write!(f, "{}", self.a),
            c => write!(f, "{}/{}", self.a, c),
        }
    }
}

impl Serialize for Cusp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for Cusp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "inf" || s == "oo" {
            return Ok(Cusp::infinity());
        }
        let (a, c) = match s.split_once('/') {
            Some((a, c)) => (a.trim(), c.trim()),
            None => (s, "1"),
        };
        let a: i64 = a.parse().map_err(|_| format!("bad cusp numerator in {s:?}"))?;
        let c: i64 = c.parse().map_err(|_| format!("bad cusp denominator in {s:?}"))?;
        if a == 0 && c == 0 {
            return Err("0/0 is not a cusp".into());
        }
        Ok(Cusp::new(a, c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Gamma0(i64),
    Gamma1(i64),
}

impl Group {
    pub fn level(&self) -> i64 {
        match *self {
            Group::Gamma0(n) | Group::Gamma1(n) => n,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Gamma0(n) => write!(f, "Gamma0({n})"),
            Group::Gamma1(n) => write!(f, "Gamma1({n})"),
        }
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspEntry {
    pub cusp: Cusp,
    pub width: i64,
}

/// A complete set of inequivalent cusps with their widths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuspTable {
    pub group: Group,
    pub entries: Vec<CuspEntry>,
}

impl CuspTable {
    pub fn for_group(group: Group) -> CuspTable {
        match group {
            Group::Gamma0(n) => cusps_gamma0(n),
            Group::Gamma1(n) => cusps_gamma1(n),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cusps(&self) -> impl Iterator<Item = Cusp> + '_ {
        self.entries.iter().map(|e| e.cusp)
    }

    pub fn widths(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.iter().map(|e| e.width)
    }

    /// Position of the representative equivalent to infinity.
    pub fn infinity_index(&self) -> usize {
        let inf = Cusp::infinity();
        self.entries
            .iter()
            .position(|e| equivalent(self.group, e.cusp, inf))
            .expect("every table contains a cusp equivalent to infinity")
    }

    /// Position of the representative equivalent to `z`.
    pub fn find(&self, z: Cusp) -> Option<usize> {
        self.entries.iter().position(|e| equivalent(self.group, e.cusp, z))
    }

    /// Entries other than the infinity class, in table order.
    pub fn finite_entries(&self) -> impl Iterator<Item = &CuspEntry> + '_ {
        let skip = self.infinity_index();
        self.entries.iter().enumerate().filter(move |(i, _)| *i != skip).map(|(_, e)| e)
    }
}

/// Chua-Lang representatives `x/d`, `d | N`, `x` coprime to `d` and distinct
/// modulo `gcd(d, N/d)`; the smallest admissible `x` is kept in each class.
pub fn cusps_gamma0(n: i64) -> CuspTable {
    assert!(n >= 1);
    let mut entries = Vec::new();
    for d in divisors(n) {
        let e = gcd(d, n / d);
        let mut seen = BTreeSet::new();
        for x in 0..d {
            if gcd(x, d) == 1 && seen.insert(x.mod_floor(&e)) {
                let cusp = Cusp::new(x, d);
                entries.push(CuspEntry { cusp, width: width(Group::Gamma0(n), cusp) });
            }
        }
    }
    CuspTable { group: Group::Gamma0(n), entries }
}

/// Orbit key of `(a, c)` under `(a, c) -> +-(a + nc, c) mod N`. Two reduced
/// cusps are `Gamma_1(N)`-equivalent exactly when their keys agree.
fn gamma1_key(n: i64, z: Cusp) -> (i64, i64) {
    let g = gcd(z.c, n);
    let plus = (z.c.mod_floor(&n), z.a.mod_floor(&g));
    let minus = ((-z.c).mod_floor(&n), (-z.a).mod_floor(&g));
    plus.min(minus)
}

/// Representatives found by orbit enumeration: fractions `a/c` are scanned in
/// lexicographic `(c, a)` order and the first member of each class is kept.
pub fn cusps_gamma1(n: i64) -> CuspTable {
    assert!(n >= 1);
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    let mut push = |cusp: Cusp, entries: &mut Vec<CuspEntry>| {
        if seen.insert(gamma1_key(n, cusp)) {
            entries.push(CuspEntry { cusp, width: width(Group::Gamma1(n), cusp) });
        }
    };
    push(Cusp::infinity(), &mut entries);
    for c in 1..=n {
        // For a fixed c the class depends on a modulo gcd(c, N) and the sign,
        // so scanning a below c * N reaches every class.
        for a in 0..c * n {
            if gcd(a, c) == 1 {
                push(Cusp::new(a, c), &mut entries);
            }
        }
    }
    CuspTable { group: Group::Gamma1(n), entries }
}

/// `(a', c') = +-(a + nc, c) mod N` for some `n`.
pub fn equivalent_gamma1(n: i64, z1: Cusp, z2: Cusp) -> bool {
    gamma1_key(n, z1) == gamma1_key(n, z2)
}

/// Equivalence under `Gamma_0(N)`: the same `d = gcd(c, N)` and
/// `a y' = a' y mod gcd(d, N/d)` where `c = d y`, `c' = d y'`.
pub fn equivalent_gamma0(n: i64, z1: Cusp, z2: Cusp) -> bool {
    let d1 = gcd(z1.c, n);
    let d2 = gcd(z2.c, n);
    if d1 != d2 {
        return false;
    }
    let e = gcd(d1, n / d1);
    let (y1, y2) = (z1.c / d1, z2.c / d1);
    (z1.a * y2 - z2.a * y1).mod_floor(&e) == 0
}

pub fn equivalent(group: Group, z1: Cusp, z2: Cusp) -> bool {
    match group {
        Group::Gamma0(n) => equivalent_gamma0(n, z1, z2),
        Group::Gamma1(n) => equivalent_gamma1(n, z1, z2),
    }
}

/// `N / gcd(N, c^2)` on `Gamma_0(N)`; `N / gcd(c, N)` on `Gamma_1(N)`, except
/// width 1 when `N = 4` and `gcd(c, 4) = 2`. `gcd(N, 0) = N`.
pub fn width(group: Group, z: Cusp) -> i64 {
    match group {
        Group::Gamma0(n) => {
            let d = gcd(z.c, n);
            n / gcd(n, d * d)
        }
        Group::Gamma1(n) => {
            let d = gcd(z.c, n);
            if n == 4 && d == 2 {
                1
            } else {
                n / d
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(t: &CuspTable) -> Vec<String> {
        t.cusps().map(|c| c.to_string()).collect()
    }

    #[test]
    fn gamma0_small_levels() {
        let t = cusps_gamma0(1);
        assert_eq!(t.len(), 1);
        assert_eq!(t.entries[0].width, 1);
        assert_eq!(names(&cusps_gamma0(20)), ["0", "1/2", "1/4", "1/5", "1/10", "1/20"]);
    }

    #[test]
    fn gamma0_infinity_class() {
        let t = cusps_gamma0(50);
        assert_eq!(t.entries[t.infinity_index()].cusp, Cusp::new(1, 50));
        assert_eq!(width(Group::Gamma0(50), Cusp::infinity()), 1);
        assert_eq!(width(Group::Gamma0(50), Cusp::new(0, 1)), 50);
    }

    #[test]
    fn gamma1_level_two() {
        assert_eq!(names(&cusps_gamma1(2)), ["oo", "0"]);
    }

    #[test]
    fn gamma1_infinity_class() {
        for n in [5, 7, 20] {
            assert!(equivalent_gamma1(n, Cusp::infinity(), Cusp::new(1, n)));
            assert!(equivalent_gamma1(n, Cusp::infinity(), Cusp::new(n - 1, n)));
            assert!(!equivalent_gamma1(n, Cusp::infinity(), Cusp::new(2, n)));
        }
    }

    #[test]
    fn cusp_parsing() {
        assert_eq!("3/10".parse::<Cusp>().unwrap(), Cusp::new(3, 10));
        assert_eq!("inf".parse::<Cusp>().unwrap(), Cusp::infinity());
        assert_eq!("-2/-4".parse::<Cusp>().unwrap(), Cusp::new(1, 2));
        assert!("0/0".parse::<Cusp>().is_err());
    }
}
