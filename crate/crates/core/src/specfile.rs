//! Plain-text identity specifications.
//!
//! ```text
//! # comment
//! name upalgeg
//! group up 5 20          # or: gamma0 N | gamma1 N
//! left                   # up only; terms below sit at level p*N
//! term 1 eta 50^5 5^4 4^3 2^3 100^-3 25^-2 10^-8 1^-2
//! right                  # up only; terms below sit at level N
//! term 5 eta 10^8 1^4 5^-4 2^-8
//! term 2 eta 10^5 1^2 20^-3 5^-2 4^-1 2^-1
//! ```
//!
//! A term is `term <coef> [q^<e>] <kind> <factor>...` where `coef` and `e`
//! are exact rationals and `kind` is `eta` (factors `d^m`), `gen` (factors
//! `delta,g^r`) or `j` (factors `d^m` of `J_d = (q^d;q^d)_inf`, converted to
//! an eta quotient times a power of `q`). No factors means the constant 1.
//! Zero identities (`gamma0`, `gamma1`) assert that the sum of terms is 0;
//! `up p N` asserts `U_p(left) = right`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cusps::Group;
use crate::error::{Error, Result};
use crate::etaq::{expand_combination, CombTerm, EtaQuotient, GenEtaQuotient, LinearCombination, Term};
use crate::prover::{prove_eta_identity, prove_gen_identity, prove_up_identity, ProofCertificate, ProverOptions};
use crate::series::ExactSeries;
use crate::Exponent;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentityBody {
    /// `sum terms = 0` on the group.
    Zero { group: Group, terms: LinearCombination },
    /// `U_p(left) = right` with `left` at level `p N`, `right` at level `N`.
    Up { p: i64, left: LinearCombination, right: LinearCombination },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySpec {
    pub name: String,
    pub body: IdentityBody,
}

impl IdentitySpec {
    pub fn zero(name: impl Into<String>, group: Group, terms: LinearCombination) -> Self {
        IdentitySpec { name: name.into(), body: IdentityBody::Zero { group, terms } }
    }

    pub fn up(name: impl Into<String>, p: i64, left: LinearCombination, right: LinearCombination) -> Self {
        IdentitySpec { name: name.into(), body: IdentityBody::Up { p, left, right } }
    }

    /// Runs the prover matching the identity's group.
    pub fn prove(&self, opts: ProverOptions) -> Result<ProofCertificate> {
        match &self.body {
            IdentityBody::Zero { group: Group::Gamma0(_), terms } => prove_eta_identity(terms, opts),
            IdentityBody::Zero { group: Group::Gamma1(_), terms } => prove_gen_identity(terms, opts),
            IdentityBody::Up { p, left, right } => prove_up_identity(*p, left, right, opts),
        }
    }

    /// The difference of the two sides as a series below `q^depth`.
    pub fn residual(&self, depth: i64) -> Result<ExactSeries> {
        match &self.body {
            IdentityBody::Zero { terms, .. } => expand_combination(terms, depth),
            IdentityBody::Up { p, left, right } => {
                let (g, f) = rayon::join(|| expand_combination(left, p * depth), || expand_combination(right, depth));
                Ok(g?.u_p(*p)?.sub(&f?))
            }
        }
    }

    /// First exponent below `q^depth` where the residual is nonzero, or an
    /// error if the expansion does not reach `depth`.
    pub fn series_mismatch(&self, depth: i64) -> Result<Option<(Exponent, BigInt)>> {
        let r = self.residual(depth)?;
        let bound = Exponent::from_integer(depth);
        if r.prec() < bound {
            return Err(Error::PrecisionExceeded { requested: bound, available: r.prec() });
        }
        let first = r.terms().find(|(e, c)| *e < bound && !num_traits::Zero::is_zero(*c)).map(|(e, c)| (e, c.clone()));
        Ok(first)
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, l: &LinearCombination) -> fmt::Result {
    for t in l.terms() {
        write!(f, "term {}", t.coef)?;
        if t.shift != Exponent::from_integer(0) {
            write!(f, " q^{}", t.shift)?;
        }
        match &t.term {
            Term::Eta(e) => {
                write!(f, " eta")?;
                for (d, m) in e.exps() {
                    write!(f, " {d}^{m}")?;
                }
            }
            Term::Gen(g) => {
                write!(f, " gen")?;
                for ((d, k), r) in g.exps() {
                    write!(f, " {d},{k}^{r}")?;
                }
            }
        }
        writeln!(f)?;
    }
    Ok(())
}

/// Canonical text form; parsing it returns an equal spec.
impl fmt::Display for IdentitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name {}", self.name)?;
        match &self.body {
            IdentityBody::Zero { group, terms } => {
                match group {
                    Group::Gamma0(n) => writeln!(f, "group gamma0 {n}")?,
                    Group::Gamma1(n) => writeln!(f, "group gamma1 {n}")?,
                }
                write_terms(f, terms)
            }
            IdentityBody::Up { p, left, right } => {
                writeln!(f, "group up {p} {}", right.level())?;
                writeln!(f, "left")?;
                write_terms(f, left)?;
                writeln!(f, "right")?;
                write_terms(f, right)
            }
        }
    }
}

impl FromStr for IdentitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s)
    }
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

impl Tok<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line, column: self.col, message: message.into() }
    }
}

fn tokens(line: &str, lineno: usize) -> Vec<Tok<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Tok { text: &code[s..i], line: lineno, col: code[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn int(t: Tok<'_>, what: &str) -> Result<i64> {
    t.text.parse().map_err(|_| t.err(format!("expected an integer {what}, found {:?}", t.text)))
}

/// Integer at a column offset inside a token.
fn sub_int(t: Tok<'_>, s: &str, offset: usize, what: &str) -> Result<i64> {
    s.parse().map_err(|_| Error::Parse {
        line: t.line,
        column: t.col + offset,
        message: format!("expected an integer {what}, found {s:?}"),
    })
}

fn sub_ratio(t: Tok<'_>, s: &str, offset: usize, what: &str) -> Result<Exponent> {
    let err = || Error::Parse {
        line: t.line,
        column: t.col + offset,
        message: format!("expected a rational {what}, found {s:?}"),
    };
    let r: Exponent = s.parse().map_err(|_| err())?;
    Ok(r)
}

fn big_ratio(t: Tok<'_>) -> Result<BigRational> {
    let bad = || t.err(format!("expected a rational coefficient, found {:?}", t.text));
    let (n, d) = match t.text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t.text, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(t.err("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// `base^exp` or `base` (exponent 1); returns the pieces and the column
/// offset of the exponent.
fn split_power(t: Tok<'_>) -> (&str, &str, usize) {
    match t.text.split_once('^') {
        Some((b, e)) => (b, e, b.len() + 1),
        None => (t.text, "1", 0),
    }
}

fn parse_term(toks: &[Tok<'_>], level: i64, kw: Tok<'_>) -> Result<(BigRational, Exponent, Term)> {
    let mut it = toks.iter().copied().peekable();
    let coef_tok = it.next().ok_or_else(|| kw.err("term needs a coefficient"))?;
    let coef = big_ratio(coef_tok)?;
    let mut shift = Exponent::from_integer(0);
    if let Some(t) = it.peek().copied() {
        if let Some(e) = t.text.strip_prefix("q^") {
            shift = sub_ratio(t, e, 2, "q exponent")?;
            it.next();
        }
    }
    let kind = it.next().ok_or_else(|| coef_tok.err("term needs a kind: eta, gen or j"))?;
    let factors: Vec<Tok<'_>> = it.collect();
    let term = match kind.text {
        "eta" | "j" => {
            let mut exps = Vec::new();
            for t in &factors {
                let (b, e, off) = split_power(*t);
                let d = sub_int(*t, b, 0, "divisor")?;
                let m = sub_int(*t, e, off, "exponent")?;
                if d < 1 || level % d != 0 {
                    return Err(t.err(format!("{d} does not divide the level {level}")));
                }
                exps.push((d, m));
            }
            if kind.text == "j" {
                let (f, s) = EtaQuotient::from_j(level, &exps).map_err(|e| kind.err(e.to_string()))?;
                shift += s;
                Term::Eta(f)
            } else {
                Term::Eta(EtaQuotient::new(level, exps).map_err(|e| kind.err(e.to_string()))?)
            }
        }
        "gen" => {
            let mut exps = Vec::new();
            for t in &factors {
                let (b, e, off) = split_power(*t);
                let (d, g) = b.split_once(',').ok_or_else(|| t.err("generalized factor must be delta,g^r"))?;
                let d_i = sub_int(*t, d, 0, "delta")?;
                let g_i = sub_int(*t, g, d.len() + 1, "g")?;
                let r = sub_ratio(*t, e, off, "exponent")?;
                if d_i < 1 || level % d_i != 0 {
                    return Err(t.err(format!("{d_i} does not divide the level {level}")));
                }
                if g_i <= 0 || g_i >= d_i {
                    return Err(t.err(format!("need 0 < g < delta, got ({d_i},{g_i})")));
                }
                exps.push(((d_i, g_i), r));
            }
            Term::Gen(GenEtaQuotient::new(level, exps).map_err(|e| kind.err(e.to_string()))?)
        }
        other => return Err(kind.err(format!("unknown term kind {other:?} (expected eta, gen or j)"))),
    };
    Ok((coef, shift, term))
}

enum Section {
    Main,
    Left,
    Right,
}

/// Parses the text format described in the module documentation.
pub fn parse_spec(text: &str) -> Result<IdentitySpec> {
    let mut name: Option<String> = None;
    let mut group: Option<(Tok<'_>, Option<i64>, Group)> = None;
    let mut section = Section::Main;
    let mut main: Vec<CombTerm> = Vec::new();
    let mut left: Vec<CombTerm> = Vec::new();
    let mut right: Vec<CombTerm> = Vec::new();
    let mut last_line = 1;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let toks = tokens(line, lineno);
        let Some(&kw) = toks.first() else { continue };
        let rest = &toks[1..];
        match kw.text {
            "name" => {
                if rest.is_empty() {
                    return Err(kw.err("name needs a value"));
                }
                name = Some(rest.iter().map(|t| t.text).collect::<Vec<_>>().join(" "));
            }
            "group" => {
                if group.is_some() {
                    return Err(kw.err("group given twice"));
                }
                let tag = rest.first().ok_or_else(|| kw.err("group needs a tag: gamma0, gamma1 or up"))?;
                let g = match tag.text {
                    "gamma0" | "gamma1" => {
                        let n_tok = rest.get(1).ok_or_else(|| tag.err("missing level"))?;
                        let n = int(*n_tok, "level")?;
                        if n < 1 {
                            return Err(n_tok.err("level must be positive"));
                        }
                        if rest.len() > 2 {
                            return Err(rest[2].err("unexpected token"));
                        }
                        let g = if tag.text == "gamma0" { Group::Gamma0(n) } else { Group::Gamma1(n) };
                        (kw, None, g)
                    }
                    "up" => {
                        let p_tok = rest.get(1).ok_or_else(|| tag.err("missing prime"))?;
                        let n_tok = rest.get(2).ok_or_else(|| p_tok.err("missing level"))?;
                        let p = int(*p_tok, "prime")?;
                        let n = int(*n_tok, "level")?;
                        if p < 2 || n < 1 {
                            return Err(p_tok.err("need p >= 2 and N >= 1"));
                        }
                        if rest.len() > 3 {
                            return Err(rest[3].err("unexpected token"));
                        }
                        (kw, Some(p), Group::Gamma0(n))
                    }
                    other => return Err(tag.err(format!("unknown group {other:?}"))),
                };
                group = Some(g);
            }
            "left" | "right" => {
                match group {
                    Some((_, Some(_), _)) => {}
                    _ => return Err(kw.err("left/right sections need `group up p N` first")),
                }
                if let Some(t) = rest.first() {
                    return Err(t.err("unexpected token"));
                }
                section = if kw.text == "left" { Section::Left } else { Section::Right };
            }
            "term" => {
                let (_, p, g) = group.ok_or_else(|| kw.err("term before group"))?;
                let level = match (&section, p) {
                    (Section::Main, Some(_)) => return Err(kw.err("terms of an up identity go under left or right")),
                    (Section::Main, None) | (Section::Right, _) => g.level(),
                    (Section::Left, Some(p)) => p * g.level(),
                    (Section::Left, None) => unreachable!("left needs an up group"),
                };
                let (coef, shift, term) = parse_term(rest, level, kw)?;
                let t = CombTerm { coef, shift, term };
                match section {
                    Section::Main => main.push(t),
                    Section::Left => left.push(t),
                    Section::Right => right.push(t),
                }
            }
            other => return Err(kw.err(format!("unknown keyword {other:?}"))),
        }
    }
    let eof = Error::Parse { line: last_line, column: 1, message: String::new() };
    let at_eof = |m: &str| match &eof {
        Error::Parse { line, column, .. } => Error::Parse { line: *line, column: *column, message: m.into() },
        _ => unreachable!(),
    };
    let (gtok, p, g) = group.ok_or_else(|| at_eof("missing group line"))?;
    let name = name.unwrap_or_else(|| "unnamed".into());
    let body = match p {
        None => IdentityBody::Zero {
            group: g,
            terms: LinearCombination::new(g.level(), main).map_err(|e| gtok.err(e.to_string()))?,
        },
        Some(p) => IdentityBody::Up {
            p,
            left: LinearCombination::new(p * g.level(), left).map_err(|e| gtok.err(e.to_string()))?,
            right: LinearCombination::new(g.level(), right).map_err(|e| gtok.err(e.to_string()))?,
        },
    };
    Ok(IdentitySpec { name, body })
}

/// Specs shipped with the crate, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("modeq", include_str!("../../../identities/modeq.spec")),
    ("upalgeg", include_str!("../../../identities/upalgeg.spec")),
    ("bigthetaid", include_str!("../../../identities/bigthetaid.spec")),
    ("seed-i-0", include_str!("../../../identities/seed-i-0.spec")),
    ("seed-i-1", include_str!("../../../identities/seed-i-1.spec")),
    ("seed-i-2", include_str!("../../../identities/seed-i-2.spec")),
    ("seed-i-3", include_str!("../../../identities/seed-i-3.spec")),
    ("seed-i-4", include_str!("../../../identities/seed-i-4.spec")),
    ("seed-ii-0", include_str!("../../../identities/seed-ii-0.spec")),
    ("seed-ii-1", include_str!("../../../identities/seed-ii-1.spec")),
    ("seed-ii-2", include_str!("../../../identities/seed-ii-2.spec")),
    ("seed-ii-3", include_str!("../../../identities/seed-ii-3.spec")),
    ("seed-ii-4", include_str!("../../../identities/seed-ii-4.spec")),
];

pub fn bundled(name: &str) -> Option<IdentitySpec> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_spec(text).expect("bundled specs parse"))
}
