//! Truncated power series in `u` whose coefficients are rational polynomials
//! in `t`, and expansions of the generating functions of the fan, wheel and
//! whirl KL and Z-polynomials.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::graph::{self, Family};
use crate::kl::{self, KlError, MatroidFamily};
use crate::matroid::{self, ElementLabel, RankOracleMatroid};
use crate::poly::{IntPoly, RatPoly};

pub const MAX_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("truncation order {0} is outside 1..={MAX_ORDER}")]
    BadOrder(usize),
    #[error("constant coefficient {0} is not a unit")]
    NotUnit(String),
    #[error("square root needs constant coefficient 1, found {0}")]
    SqrtConstant(String),
    #[error("coefficient of u^{0} has non-integer coefficients")]
    NonInteger(usize),
    #[error(transparent)]
    Kl(#[from] KlError),
}

/// `sum_{i <= order} c_i(t) u^i`, exact up to `u^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    order: usize,
    coeffs: Vec<RatPoly>,
}

impl TruncSeries {
    /// Series from leading coefficients; missing ones are zero, extra ones
    /// beyond `order` are dropped.
    pub fn new(order: usize, coeffs: Vec<RatPoly>) -> Self {
        let mut coeffs = coeffs;
        coeffs.resize(order + 1, RatPoly::zero());
        TruncSeries { order, coeffs }
    }

    /// Series with integer-polynomial coefficients.
    pub fn from_int(order: usize, coeffs: &[IntPoly]) -> Self {
        Self::new(order, coeffs.iter().map(IntPoly::to_rat).collect())
    }

    pub fn constant(order: usize, c: RatPoly) -> Self {
        Self::new(order, vec![c])
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, RatPoly::one())
    }

    /// The series `u`.
    pub fn u(order: usize) -> Self {
        Self::new(order, vec![RatPoly::zero(), RatPoly::one()])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[RatPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &RatPoly {
        &self.coeffs[i]
    }

    /// The coefficient of `u^i` as an integer polynomial.
    pub fn int_coeff(&self, i: usize) -> Result<IntPoly, SeriesError> {
        self.coeffs[i].to_int().ok_or(SeriesError::NonInteger(i))
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(SeriesError::OrderMismatch(self.order, other.order))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        Ok(Self::new(self.order, self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.scalar(&RatPoly::constant(-BigRational::one())))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let n = self.order;
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k).fold(RatPoly::zero(), |acc, i| {
                    if self.coeffs[i].is_zero() || other.coeffs[k - i].is_zero() {
                        acc
                    } else {
                        &acc + &(&self.coeffs[i] * &other.coeffs[k - i])
                    }
                })
            })
            .collect();
        Ok(Self::new(n, coeffs))
    }

    /// Multiply every coefficient by a polynomial in `t`.
    pub fn scalar(&self, c: &RatPoly) -> Self {
        Self::new(self.order, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplicative inverse; the constant coefficient must be a nonzero
    /// rational.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() || !c0.is_constant() {
            return Err(SeriesError::NotUnit(c0.to_string()));
        }
        let inv0 = BigRational::one() / c0.coeff(0);
        let mut out: Vec<RatPoly> = vec![RatPoly::constant(inv0.clone())];
        for k in 1..=self.order {
            let s = (1..=k).fold(RatPoly::zero(), |acc, i| &acc + &(&self.coeffs[i] * &out[k - i]));
            out.push(s.scale(&-inv0.clone()));
        }
        Ok(Self::new(self.order, out))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.mul(&other.inverse()?)
    }

    /// Principal square root, with constant coefficient 1.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != RatPoly::one() {
            return Err(SeriesError::SqrtConstant(self.coeffs[0].to_string()));
        }
        let half = BigRational::new(1.into(), 2.into());
        let mut s: Vec<RatPoly> = vec![RatPoly::one()];
        for n in 1..=self.order {
            let cross = (1..n).fold(RatPoly::zero(), |acc, i| &acc + &(&s[i] * &s[n - i]));
            s.push((&self.coeffs[n] - &cross).scale(&half));
        }
        Ok(Self::new(self.order, s))
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c}) u^{i}")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(u^{})", self.order + 1)
    }
}

/// The six generating functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GfKind {
    KlFan,
    KlWheel,
    KlWhirl,
    ZFan,
    ZWheel,
    ZWhirl,
}

impl GfKind {
    pub const ALL: [GfKind; 6] =
        [GfKind::KlFan, GfKind::KlWheel, GfKind::KlWhirl, GfKind::ZFan, GfKind::ZWheel, GfKind::ZWhirl];

    pub fn family(self) -> MatroidFamily {
        match self {
            GfKind::KlFan | GfKind::ZFan => MatroidFamily::Fan,
            GfKind::KlWheel | GfKind::ZWheel => MatroidFamily::Wheel,
            GfKind::KlWhirl | GfKind::ZWhirl => MatroidFamily::Whirl,
        }
    }

    /// First index the generating function sums over.
    pub fn start(self) -> usize {
        match self.family() {
            MatroidFamily::Wheel => 2,
            MatroidFamily::Whirl => 1,
            _ => 0,
        }
    }

    pub fn is_z(self) -> bool {
        matches!(self, GfKind::ZFan | GfKind::ZWheel | GfKind::ZWhirl)
    }

    pub fn name(self) -> &'static str {
        match self {
            GfKind::KlFan => "kl_fan",
            GfKind::KlWheel => "kl_wheel",
            GfKind::KlWhirl => "kl_whirl",
            GfKind::ZFan => "z_fan",
            GfKind::ZWheel => "z_wheel",
            GfKind::ZWhirl => "z_whirl",
        }
    }
}

impl fmt::Display for GfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GfKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GfKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown generating function `{s}`"))
    }
}

/// Polynomial in `u` with integer coefficients in `t`, given as rows of
/// `(u power, [t coefficients])`.
fn poly_series(order: usize, terms: &[(usize, &[i64])]) -> TruncSeries {
    let mut coeffs = vec![RatPoly::zero(); order + 1];
    for &(i, c) in terms {
        if i <= order {
            coeffs[i] = &coeffs[i] + &IntPoly::from_i64s(c).to_rat();
        }
    }
    TruncSeries::new(order, coeffs)
}

/// Expand a generating function to `u^order`.
pub fn gf_expand(which: GfKind, order: usize) -> Result<TruncSeries, SeriesError> {
    if order == 0 || order > MAX_ORDER {
        return Err(SeriesError::BadOrder(order));
    }
    let n = order;
    let one = TruncSeries::one(n);
    let two = TruncSeries::constant(n, RatPoly::constant(BigRational::from_integer(2.into())));
    let u = TruncSeries::u(n);
    let s = |terms: &[(usize, &[i64])]| poly_series(n, terms);
    // (u-1)^2 - 4 t u^2 and (1-(t+1)u)^2 - 4 t u^2
    let r = s(&[(0, &[1]), (1, &[-2]), (2, &[1, -4])]).sqrt()?;
    let q = s(&[(0, &[1]), (1, &[-2, -2]), (2, &[1, -2, 1])]).sqrt()?;
    Ok(match which {
        GfKind::KlFan => {
            // 1 + 2u / (1 - u + R)
            let den = s(&[(0, &[1]), (1, &[-1])]).add(&r)?;
            one.add(&u.mul(&two)?.div(&den)?)?
        }
        GfKind::KlWheel => {
            // 2(u-1)/(R-u+1) - 2(u^2+u-1)/((u+1)(R+u+1)) + 2u/((u+1)R)
            let up1 = s(&[(0, &[1]), (1, &[1])]);
            let a = s(&[(0, &[-2]), (1, &[2])]).div(&r.sub(&u)?.add(&one)?)?;
            let b = s(&[(0, &[-2]), (1, &[2]), (2, &[2])]).div(&up1.mul(&r.add(&up1)?)?)?;
            let c = s(&[(1, &[2])]).div(&up1.mul(&r)?)?;
            a.sub(&b)?.add(&c)?
        }
        GfKind::KlWhirl => {
            // (u+1)/(2(tu+1)R) - 1/(2(tu+1))
            let tu1 = s(&[(0, &[2]), (1, &[0, 2])]);
            let a = s(&[(0, &[1]), (1, &[1])]).div(&tu1.mul(&r)?)?;
            a.sub(&tu1.inverse()?)?
        }
        GfKind::ZFan => {
            // 2 / (Q - (t+1)u + 1)
            two.div(&q.add(&s(&[(0, &[1]), (1, &[-1, -1])]))?)?
        }
        GfKind::ZWheel => {
            // -2u(1-(t+1)u)(t(u+1)+1) / (1-(t+1)u-2tu^2+Q) + 1/Q - 1
            let num = s(&[(1, &[-2])])
                .mul(&s(&[(0, &[1]), (1, &[-1, -1])]))?
                .mul(&s(&[(0, &[1, 1]), (1, &[0, 1])]))?;
            let den = s(&[(0, &[1]), (1, &[-1, -1]), (2, &[0, -2])]).add(&q)?;
            num.div(&den)?.add(&q.inverse()?)?.sub(&one)?
        }
        GfKind::ZWhirl => q.inverse()?.sub(&one)?,
    })
}

/// Uniform matroid `U_{r,m}`.
fn uniform(r: usize, m: usize) -> Result<RankOracleMatroid, KlError> {
    Ok(RankOracleMatroid::from_rank_fn((0..m).map(ElementLabel::Index).collect(), move |x| {
        (x.count_ones() as usize).min(r)
    })?)
}

/// The polynomial each generating function should have at `u^n`, from
/// sources independent of the series code: closed forms where they apply,
/// recurrence seeds and brute force below that. `W_2` is the triangle,
/// `W^1` a single edge and `W^2` the uniform matroid `U_{2,4}`.
pub fn reference_coefficient(which: GfKind, n: usize) -> Result<IntPoly, SeriesError> {
    let family = which.family();
    if n < which.start() {
        return Ok(IntPoly::zero());
    }
    if n == 0 {
        return Ok(IntPoly::one());
    }
    if n >= family.min_index() {
        return Ok(if which.is_z() { kl::z_closed(family, n)? } else { kl::kl_closed(family, n)? });
    }
    if !which.is_z() {
        return Ok(kl::kl_recurrence(family, n)?);
    }
    let m = match (family, n) {
        (MatroidFamily::Wheel, 2) => {
            matroid::graphic_matroid(&graph::make_family(Family::Cycle, 3).map_err(KlError::from)?)
                .map_err(KlError::from)?
        }
        (MatroidFamily::Whirl, 1) => uniform(1, 1)?,
        _ => uniform(2, 4)?,
    };
    Ok(kl::z_poly(&m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ip(v: &[i64]) -> IntPoly {
        IntPoly::from_i64s(v)
    }

    fn series(order: usize, rows: &[&[i64]]) -> TruncSeries {
        TruncSeries::from_int(order, &rows.iter().map(|r| ip(r)).collect::<Vec<_>>())
    }

    #[test]
    fn arithmetic() {
        let a = series(5, &[&[1], &[1]]);
        let b = series(5, &[&[1], &[-1]]);
        assert_eq!(a.mul(&b).unwrap(), series(5, &[&[1], &[], &[-1]]));
        assert_eq!(a.mul(&TruncSeries::one(5)).unwrap(), a);
        let u = TruncSeries::u(5);
        assert_eq!(u.mul(&u).unwrap(), series(5, &[&[], &[], &[1]]));
        assert_eq!(a.mul(&TruncSeries::one(4)), Err(SeriesError::OrderMismatch(5, 4)));
    }

    #[test]
    fn inverse() {
        let geometric = series(6, &[&[1], &[1], &[1], &[1], &[1], &[1], &[1]]);
        assert_eq!(series(6, &[&[1], &[-1]]).inverse().unwrap(), geometric);
        assert_eq!(TruncSeries::one(3).inverse().unwrap(), TruncSeries::one(3));
        // 1 - (t-1)u has inverse sum (t-1)^n u^n
        let inv = series(6, &[&[1], &[1, -1]]).inverse().unwrap();
        for n in 0..=6u32 {
            assert_eq!(inv.int_coeff(n as usize).unwrap(), ip(&[-1, 1]).pow(n));
        }
        assert!(matches!(series(3, &[&[0], &[1]]).inverse(), Err(SeriesError::NotUnit(_))));
        assert!(matches!(series(3, &[&[1, 1]]).inverse(), Err(SeriesError::NotUnit(_))));
        let two = series(3, &[&[2], &[1]]);
        assert_eq!(two.mul(&two.inverse().unwrap()).unwrap(), TruncSeries::one(3));
    }

    #[test]
    fn square_root() {
        assert_eq!(TruncSeries::one(4).sqrt().unwrap(), TruncSeries::one(4));
        assert_eq!(series(6, &[&[1], &[-2], &[1]]).sqrt().unwrap(), series(6, &[&[1], &[-1]]));
        let radicand = series(12, &[&[1], &[-2], &[1, -4]]);
        let r = radicand.sqrt().unwrap();
        assert_eq!(r.mul(&r).unwrap(), radicand);
        assert!(matches!(series(3, &[&[4]]).sqrt(), Err(SeriesError::SqrtConstant(_))));
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(rows in proptest::collection::vec(proptest::collection::vec(-5i64..5, 0..4), 1..8)) {
            let order = 8;
            let mut polys: Vec<IntPoly> = rows.iter().map(|r| IntPoly::from_i64s(r)).collect();
            polys[0] = IntPoly::one();
            let a = TruncSeries::from_int(order, &polys);
            let s = a.sqrt().unwrap();
            prop_assert_eq!(s.mul(&s).unwrap(), a.clone());
            prop_assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), TruncSeries::one(order));
        }
    }

    #[test]
    fn order_guard() {
        assert_eq!(gf_expand(GfKind::KlFan, 0), Err(SeriesError::BadOrder(0)));
        assert_eq!(gf_expand(GfKind::KlFan, 65), Err(SeriesError::BadOrder(65)));
    }

    #[test]
    fn expansion_examples() {
        let fan = gf_expand(GfKind::KlFan, 6).unwrap();
        assert_eq!(fan.int_coeff(5).unwrap(), ip(&[1, 6, 2]));
        let whirl = gf_expand(GfKind::KlWhirl, 4).unwrap();
        assert_eq!(whirl.int_coeff(3).unwrap(), ip(&[1, 3]));
        let zw = gf_expand(GfKind::ZWhirl, 4).unwrap();
        assert_eq!(zw.int_coeff(3).unwrap(), ip(&[1, 9, 9, 1]));
    }

    #[test]
    fn expansions_match_references() {
        for which in GfKind::ALL {
            let order = if which == GfKind::KlWheel { 10 } else { 12 };
            let s = gf_expand(which, order).unwrap();
            for n in 0..=order {
                assert_eq!(s.int_coeff(n).unwrap(), reference_coefficient(which, n).unwrap(), "{which} u^{n}");
            }
        }
    }

    #[test]
    fn whirl_z_is_squared_binomials() {
        let s = gf_expand(GfKind::ZWhirl, 12).unwrap();
        for n in 1..=12i64 {
            let expected = IntPoly::new((0..=n).map(|k| crate::poly::binomial(n, k).pow(2)).collect());
            assert_eq!(s.int_coeff(n as usize).unwrap(), expected);
        }
    }

    #[test]
    fn low_index_references() {
        assert_eq!(reference_coefficient(GfKind::KlWheel, 2).unwrap(), IntPoly::one());
        assert_eq!(reference_coefficient(GfKind::ZWheel, 2).unwrap(), ip(&[1, 3, 1]));
        assert_eq!(reference_coefficient(GfKind::ZWhirl, 1).unwrap(), ip(&[1, 1]));
        assert_eq!(reference_coefficient(GfKind::ZWhirl, 2).unwrap(), ip(&[1, 4, 1]));
        assert_eq!(reference_coefficient(GfKind::KlWhirl, 0).unwrap(), IntPoly::zero());
        // low-index values agree with the closed-form formulas evaluated out of range
        assert_eq!(kl::z_closed_formula(MatroidFamily::Wheel, 2).unwrap(), ip(&[1, 3, 1]));
        assert_eq!(kl::z_closed_formula(MatroidFamily::Whirl, 2).unwrap(), ip(&[1, 4, 1]));
    }
}
