//! Serde helpers: every exact number is written as a decimal string.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serializer;

use crate::Exponent;

pub(crate) fn ratio<S: Serializer>(x: &Exponent, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn opt_ratios<S: Serializer>(xs: &[Option<Exponent>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.map(|x| x.to_string())))
}

pub(crate) fn ratios<S: Serializer>(xs: &[Exponent], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

pub(crate) fn bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub(crate) fn bigrational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}
