//! The concrete identities of the level-10 rank parity theory, built as
//! symbolic objects ready for the provers.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Result;
use crate::etaq::{EtaQuotient, GenEtaQuotient, LinearCombination, Term};
use crate::upalgebra::{SigmaSet, TPoly};
use crate::Exponent;

/// `J`-quotient term `coef * q^qpow * prod J_d^{m_d}`.
pub type JTerm = (i64, i64, &'static [(i64, i64)]);

/// `P_A`, two `J`-quotient terms at level 20.
pub const PA_J: [JTerm; 2] = [
    (1, 0, &[(10, 2), (5, 1), (2, 6), (20, -1), (4, -3), (1, -5)]),
    (-4, 1, &[(20, 1), (5, 2), (4, 3), (10, -1), (2, -3), (1, -2)]),
];

/// `P_B`, two `J`-quotient terms at level 20.
pub const PB_J: [JTerm; 2] = [
    (1, -1, &[(10, 6), (2, 2), (1, 1), (20, -3), (5, -5), (4, -1)]),
    (4, 1, &[(20, 3), (4, 1), (1, 2), (10, -3), (5, -2), (2, -1)]),
];

/// Right side of the 5-dissection generating function for
/// `a_f(5n-1) + a_f(n/5)`.
pub const AF5_RHS_J: [JTerm; 2] = [
    (1, 0, &[(2, 4), (10, 2), (1, -1), (4, -3), (20, -1)]),
    (-4, 1, &[(1, 2), (4, 3), (5, 1), (20, 1), (2, -5), (10, -1)]),
];

/// Right side of the 7-dissection generating function for
/// `a_f(n/7) - a_f(7n-2)`.
pub const AF7_RHS_J: [JTerm; 2] =
    [(1, 0, &[(1, 3), (7, 6), (2, -5), (14, -3)]), (6, 2, &[(14, 4), (1, 4), (2, -6), (7, -1)])];

/// Group I seeds: `U_A(P_A t^k) = P_B p_k(t)` for `k = 0, -1, ..., -4`.
pub const GROUP_I: [(i64, &[(i64, i64)]); 5] = [
    (0, &[(1, 1), (2, -50), (3, 350), (4, -875), (5, 625)]),
    (-1, &[(1, -1)]),
    (-2, &[(2, -5)]),
    (-3, &[(3, -25)]),
    (-4, &[(4, -125)]),
];

/// Group II seeds: `U_B(P_B t^k) = P_A p_k(t)` for `k = 0, -1, ..., -4`.
pub const GROUP_II: [(i64, &[(i64, i64)]); 5] = [
    (0, &[(0, 1)]),
    (-1, &[(0, 2), (1, -5)]),
    (-2, &[(0, 8), (1, -40), (2, 25)]),
    (-3, &[(0, 34), (1, -170), (3, 125)]),
    (-4, &[(0, 150), (1, -640), (2, -900), (3, 2000), (4, -625)]),
];

fn rat(c: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(c))
}

fn eta(level: i64, e: &[(i64, i64)]) -> EtaQuotient {
    EtaQuotient::new(level, e.iter().copied()).expect("valid exponent map")
}

/// Combination of `J`-quotient terms at `level`.
pub fn j_combination(level: i64, terms: &[JTerm]) -> Result<LinearCombination> {
    let mut l = LinearCombination::new(level, vec![])?;
    for &(c, q, e) in terms {
        l.push_j(c, q, e)?;
    }
    Ok(l)
}

/// The Hauptmodul `t = eta(tau)^2 eta(10 tau)^4 / (eta(2 tau)^4 eta(5 tau)^2)`.
pub fn t() -> EtaQuotient {
    eta(10, &[(1, 2), (10, 4), (2, -4), (5, -2)])
}

/// `A = eta(50 tau)^2 eta(tau)^4 / (eta(25 tau)^4 eta(2 tau)^2)`.
pub fn a_quotient() -> EtaQuotient {
    eta(50, &[(50, 2), (1, 4), (25, -4), (2, -2)])
}

/// `B = q J_25 / J_1 = eta(25 tau) / eta(tau)`.
pub fn b_quotient() -> EtaQuotient {
    eta(25, &[(25, 1), (1, -1)])
}

pub fn pa() -> LinearCombination {
    j_combination(20, &PA_J).expect("P_A is well formed")
}

pub fn pb() -> LinearCombination {
    j_combination(20, &PB_J).expect("P_B is well formed")
}

/// `1 + sum_j sigma_j(5 tau) t^{j-5}` on `Gamma_0(50)`, the modular equation
/// divided by `t^5`. `sigmas` allows corrupted coefficient sets.
pub fn modular_equation_with(sigmas: &SigmaSet) -> LinearCombination {
    let t = t();
    let t5 = t.dilate(5);
    let mut l = LinearCombination::new(50, vec![]).expect("level 50");
    l.push(rat(1), Term::Eta(EtaQuotient::one(50))).expect("level 50");
    for j in 0..5 {
        for (&k, c) in sigmas.sigma(j).coeffs() {
            let term = t5.pow(k).mul(&t.pow(j as i64 - 5));
            l.push(BigRational::from_integer(c.clone()), Term::Eta(term)).expect("level 50");
        }
    }
    l
}

pub fn modular_equation() -> LinearCombination {
    modular_equation_with(&SigmaSet::standard())
}

/// `U_5(g) = 5 f_1 + 2 f_2` with `g` at level 100 and `f_j` at level 20.
pub fn upalgeg() -> (LinearCombination, LinearCombination) {
    upalgeg_with(5, 2)
}

pub fn upalgeg_with(c1: i64, c2: i64) -> (LinearCombination, LinearCombination) {
    let g = eta(100, &[(50, 5), (5, 4), (4, 3), (2, 3), (100, -3), (25, -2), (10, -8), (1, -2)]);
    let f1 = eta(20, &[(10, 8), (1, 4), (5, -4), (2, -8)]);
    let f2 = eta(20, &[(10, 5), (1, 2), (20, -3), (5, -2), (4, -1), (2, -1)]);
    let mut gl = LinearCombination::new(100, vec![]).expect("level 100");
    gl.push(rat(1), Term::Eta(g)).expect("level 100");
    let mut fl = LinearCombination::new(20, vec![]).expect("level 20");
    fl.push(rat(c1), Term::Eta(f1)).expect("level 20");
    fl.push(rat(c2), Term::Eta(f2)).expect("level 20");
    (gl, fl)
}

type GenTerm = (i64, &'static [((i64, i64), i64)]);

/// The nine generalized eta products, with coefficients, of the
/// generalized identity `1 + sum c_j f_j = 0` on `Gamma_1(20)`.
pub const BIGTHETA_TERMS: [GenTerm; 9] = [
    (-1, &[((10, 1), 6), ((10, 4), 4), ((10, 2), -4), ((10, 3), -6)]),
    (4, &[((10, 2), 2), ((10, 3), 1), ((10, 4), -2), ((10, 5), -1)]),
    (4, &[((10, 1), 7), ((10, 4), 6), ((10, 2), -6), ((10, 3), -6), ((10, 5), -1)]),
    (-8, &[((10, 1), 2), ((10, 4), 1), ((10, 2), -1), ((10, 3), -1), ((10, 5), -1)]),
    (8, &[((10, 1), 5), ((10, 4), 3), ((10, 2), -3), ((10, 3), -4), ((10, 5), -1)]),
    (-3, &[((10, 1), 1), ((10, 2), 1), ((10, 3), -1), ((10, 4), -1)]),
    (-3, &[((5, 1), 5), ((5, 2), -5)]),
    (
        4,
        &[
            ((20, 1), 9),
            ((20, 3), 3),
            ((20, 4), 7),
            ((20, 6), 4),
            ((20, 7), 3),
            ((20, 8), 3),
            ((20, 9), 9),
            ((20, 10), -2),
        ],
    ),
    (
        -1,
        &[
            ((20, 1), 6),
            ((20, 2), 6),
            ((20, 4), 7),
            ((20, 6), 10),
            ((20, 8), 3),
            ((20, 9), 6),
            ((20, 10), 2),
            ((20, 5), -4),
        ],
    ),
];

/// `1 + sum c_j f_j` with the listed coefficients (index-aligned with
/// [`BIGTHETA_TERMS`]).
pub fn bigtheta_with(coefs: &[i64; 9]) -> LinearCombination {
    let mut l = LinearCombination::new(20, vec![]).expect("level 20");
    l.push(rat(1), Term::Gen(GenEtaQuotient::one(20))).expect("level 20");
    for ((_, e), &c) in BIGTHETA_TERMS.iter().zip(coefs) {
        let f = GenEtaQuotient::new(20, e.iter().map(|&(k, r)| (k, Exponent::from_integer(r))))
            .expect("valid generalized quotient");
        l.push(rat(c), Term::Gen(f)).expect("level 20");
    }
    l
}

pub fn bigtheta() -> LinearCombination {
    let coefs: Vec<i64> = BIGTHETA_TERMS.iter().map(|t| t.0).collect();
    bigtheta_with(&coefs.try_into().expect("nine terms"))
}

/// Which of the two seed families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeedGroup {
    /// `U_A(P_A t^k) = P_B p(t)`.
    I,
    /// `U_B(P_B t^k) = P_A p(t)`.
    II,
}

pub fn seed(group: SeedGroup, k: i64) -> Option<TPoly> {
    let table: &[(i64, &[(i64, i64)])] = match group {
        SeedGroup::I => &GROUP_I,
        SeedGroup::II => &GROUP_II,
    };
    table.iter().find(|(kk, _)| *kk == k).map(|(_, p)| TPoly::from_i64s(p))
}

/// `U_5(U * src * t^k) = dst * p(t)` as a pair of combinations: the left
/// block at level 100 and the right block at level 20.
pub fn lemma_identity(group: SeedGroup, k: i64, p: &TPoly) -> (LinearCombination, LinearCombination) {
    let (u, src, dst) = match group {
        SeedGroup::I => (a_quotient(), pa(), pb()),
        SeedGroup::II => (b_quotient(), pb(), pa()),
    };
    let g = src.mul_eta(&rat(1), &u.mul(&t().pow(k)), 100).expect("level 100");
    let mut f = LinearCombination::new(20, vec![]).expect("level 20");
    for (&j, c) in p.coeffs() {
        let part = dst.mul_eta(&BigRational::from_integer(c.clone()), &t().pow(j), 20).expect("level 20");
        f.extend(&part).expect("level 20");
    }
    (g, f)
}
