//! Kazhdan-Lusztig and Z-polynomials: the defining recursion on an arbitrary
//! rank oracle, closed forms and P-recursive recurrences for the fan,
//! square-of-path, wheel and whirl families.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{self, Family, GraphError, SimpleGraph};
use crate::matroid::{
    self, characteristic_polynomial, contraction, localization, FlatLattice, MatroidError,
    RankOracleMatroid,
};
use crate::poly::{binomial, factorial, IntPoly, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KlError {
    #[error("defining identity is inconsistent at a flat of rank {rank} (coefficient {degree})")]
    Inconsistent { rank: usize, degree: usize },
    #[error("{family} with n = {n} is outside the supported range (n >= {min})")]
    Index { family: MatroidFamily, n: usize, min: usize },
    #[error("{0} has no recurrence")]
    NoRecurrence(MatroidFamily),
    #[error("closed form for {family} at n = {n} has a non-integer coefficient")]
    NonInteger { family: MatroidFamily, n: usize },
    #[error("recurrence for {family} does not divide exactly at n = {n}")]
    Recurrence { family: MatroidFamily, n: usize },
    #[error("defining identity fails for a matroid of rank {0}")]
    IdentityFails(usize),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The four matroid families with known closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatroidFamily {
    Fan,
    #[serde(rename = "square")]
    SquareOfPath,
    Wheel,
    Whirl,
}

impl MatroidFamily {
    pub const ALL: [MatroidFamily; 4] =
        [MatroidFamily::Fan, MatroidFamily::SquareOfPath, MatroidFamily::Wheel, MatroidFamily::Whirl];

    pub fn name(self) -> &'static str {
        match self {
            MatroidFamily::Fan => "fan",
            MatroidFamily::SquareOfPath => "square",
            MatroidFamily::Wheel => "wheel",
            MatroidFamily::Whirl => "whirl",
        }
    }

    /// Smallest n for which the family is defined as a graph or whirl oracle.
    pub fn min_index(self) -> usize {
        match self {
            MatroidFamily::Fan | MatroidFamily::SquareOfPath => 1,
            MatroidFamily::Wheel | MatroidFamily::Whirl => 3,
        }
    }

    /// Rank of the n-th member.
    pub fn rank(self, n: usize) -> usize {
        n
    }
}

impl fmt::Display for MatroidFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatroidFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fan" => Ok(MatroidFamily::Fan),
            "square" | "square_of_path" => Ok(MatroidFamily::SquareOfPath),
            "wheel" => Ok(MatroidFamily::Wheel),
            "whirl" => Ok(MatroidFamily::Whirl),
            _ => Err(format!("unknown family `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Closed,
    Recurrence,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Closed => "closed",
            Method::Recurrence => "recurrence",
        })
    }
}

/// A KL polynomial together with where it came from. `family` is `None` for
/// matroids outside the four families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlResult {
    pub family: Option<MatroidFamily>,
    pub n: usize,
    pub method: Method,
    pub poly: IntPoly,
}

/// A Z-polynomial, shaped like [`KlResult`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZResult {
    pub family: Option<MatroidFamily>,
    pub n: usize,
    pub method: Method,
    pub poly: IntPoly,
}

/// KL polynomials of every contraction `M^F`, indexed like the flats of
/// `lattice`. Since `L(M^F)` is the upper interval `[F, E]`, the table is
/// filled from the top flat downwards and each entry is computed once.
#[derive(Clone, Debug)]
pub struct KlTable {
    lattice: FlatLattice,
    kl: Vec<IntPoly>,
}

impl KlTable {
    pub fn new(m: &RankOracleMatroid) -> Result<Self, KlError> {
        Self::from_lattice(m.lattice())
    }

    pub fn from_lattice(lattice: FlatLattice) -> Result<Self, KlError> {
        let flats = lattice.flats().to_vec();
        let top_rank = lattice.rank();
        let mut kl = vec![IntPoly::zero(); flats.len()];
        for g in (0..flats.len()).rev() {
            let r = top_rank - flats[g].rank;
            if r == 0 {
                kl[g] = IntPoly::one();
                continue;
            }
            let mu = lattice.mobius_from(g);
            let mut s = IntPoly::zero();
            for &(k, _) in mu.iter().skip(1) {
                let chi = lattice.interval_characteristic(&mu, k);
                s = &s + &(&chi * &kl[k]);
            }
            kl[g] = extract(&s, r)?;
        }
        Ok(KlTable { lattice, kl })
    }

    pub fn lattice(&self) -> &FlatLattice {
        &self.lattice
    }

    /// `P_{M^F}` for the flat at `index`.
    pub fn kl_at(&self, index: usize) -> &IntPoly {
        &self.kl[index]
    }

    pub fn kl(&self) -> &IntPoly {
        &self.kl[self.lattice.bottom()]
    }

    /// `Z_M = sum over F of t^{rk F} P_{M^F}`.
    pub fn z(&self) -> IntPoly {
        self.lattice
            .flats()
            .iter()
            .zip(&self.kl)
            .fold(IntPoly::zero(), |acc, (f, p)| &acc + &p.shift(f.rank))
    }
}

/// Solve `t^r P(1/t) - P(t) = s` for `P` with `deg P < r/2`. The high half of
/// `s` determines `P`; the low half and the middle coefficient must agree.
fn extract(s: &IntPoly, r: usize) -> Result<IntPoly, KlError> {
    let inconsistent = |degree| KlError::Inconsistent { rank: r, degree };
    if s.degree().finite().is_some_and(|d| d > r) {
        return Err(inconsistent(r + 1));
    }
    let half = r.div_ceil(2);
    let p = IntPoly::new((0..half).map(|i| s.coeff(r - i)).collect());
    for j in 0..half {
        if s.coeff(j) != -p.coeff(j) {
            return Err(inconsistent(j));
        }
    }
    if r.is_multiple_of(2) && !s.coeff(r / 2).is_zero() {
        return Err(inconsistent(r / 2));
    }
    if !p.coeff(0).is_one() {
        return Err(inconsistent(0));
    }
    Ok(p)
}

/// KL polynomial by the defining recursion.
pub fn kl_poly(m: &RankOracleMatroid) -> Result<IntPoly, KlError> {
    Ok(KlTable::new(m)?.kl().clone())
}

/// Z-polynomial as a sum over flats of contraction KL polynomials.
pub fn z_poly(m: &RankOracleMatroid) -> Result<IntPoly, KlError> {
    Ok(KlTable::new(m)?.z())
}

/// Re-check `t^{rk M} P_M(1/t) = sum over F of chi_{M_F}(t) P_{M^F}(t)`
/// using freshly built localizations and contractions rather than lattice
/// intervals. `p` is the candidate `P_M`.
pub fn verify_defining_identity(m: &RankOracleMatroid, p: &IntPoly) -> Result<(), KlError> {
    let r = m.full_rank();
    let bottom = m.closure(0);
    let mut rhs = IntPoly::zero();
    for f in m.flats() {
        let chi = characteristic_polynomial(&localization(m, &f)?);
        let pf = if f.elements == bottom { p.clone() } else { kl_poly(&contraction(m, &f)?)? };
        rhs = &rhs + &(&chi * &pf);
    }
    if p.reverse_scaled(r)? == rhs {
        Ok(())
    } else {
        Err(KlError::IdentityFails(r))
    }
}

/// Oracle for the n-th member of a family.
pub fn family_matroid(family: MatroidFamily, n: usize) -> Result<RankOracleMatroid, KlError> {
    if n < family.min_index() {
        return Err(KlError::Index { family, n, min: family.min_index() });
    }
    Ok(match family {
        MatroidFamily::Fan => matroid::graphic_matroid(&graph::make_family(Family::Fan, n)?)?,
        MatroidFamily::SquareOfPath => {
            matroid::graphic_matroid(&graph::make_family(Family::SquareOfPath, n)?)?
        }
        MatroidFamily::Wheel => matroid::graphic_matroid(&graph::make_family(Family::Wheel, n)?)?,
        MatroidFamily::Whirl => matroid::whirl_matroid(n)?,
    })
}

/// Brute-force KL and Z polynomials of a family member.
pub fn brute(family: MatroidFamily, n: usize) -> Result<(KlResult, ZResult), KlError> {
    let table = KlTable::new(&family_matroid(family, n)?)?;
    let family = Some(family);
    Ok((
        KlResult { family, n, method: Method::Brute, poly: table.kl().clone() },
        ZResult { family, n, method: Method::Brute, poly: table.z() },
    ))
}

fn integral(sum: Vec<BigRational>, family: MatroidFamily, n: usize) -> Result<IntPoly, KlError> {
    sum.into_iter()
        .map(|c| c.is_integer().then(|| c.to_integer()))
        .collect::<Option<Vec<_>>>()
        .map(IntPoly::new)
        .ok_or(KlError::NonInteger { family, n })
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn fact(n: i64) -> BigRational {
    BigRational::from_integer(factorial(n as u64))
}

fn binom(n: i64, k: i64) -> BigRational {
    BigRational::from_integer(binomial(n, k))
}

/// `(n-1)! / (k! k! (n-2k-1)!)`
fn fan_multinomial(n: i64, k: i64) -> BigRational {
    fact(n - 1) / (fact(k) * fact(k) * fact(n - 2 * k - 1))
}

/// Evaluate the KL closed form of `family` at `n` without range checks.
/// The fan formula serves the square of a path as well.
pub fn kl_closed_formula(family: MatroidFamily, n: usize) -> Result<IntPoly, KlError> {
    let ni = n as i64;
    let top = if n == 0 { -1 } else { (ni - 1) / 2 };
    let coeffs = (0..=top)
        .map(|k| match family {
            MatroidFamily::Fan | MatroidFamily::SquareOfPath => {
                fan_multinomial(ni, k) / q(k + 1)
            }
            MatroidFamily::Wheel => {
                let mut w = q(k + 1) / q(ni - k) + q(k) / q(ni - k + 1);
                if k != 0 {
                    w -= q(k) / q(ni - k - 1);
                }
                w * fact(ni) / (fact(k) * fact(k + 1) * fact(ni - 2 * k - 1))
            }
            MatroidFamily::Whirl => q(ni) / q(ni - k) * fan_multinomial(ni, k),
        })
        .collect();
    integral(coeffs, family, n)
}

/// Closed-form KL polynomial. Wheels and whirls need n >= 3, fans and
/// squares of paths n >= 1.
pub fn kl_closed(family: MatroidFamily, n: usize) -> Result<IntPoly, KlError> {
    if n < family.min_index() {
        return Err(KlError::Index { family, n, min: family.min_index() });
    }
    kl_closed_formula(family, n)
}

/// Evaluate the Z closed form without range checks (the fan formula also
/// covers squares of paths).
pub fn z_closed_formula(family: MatroidFamily, n: usize) -> Result<IntPoly, KlError> {
    let ni = n as i64;
    let coeffs = (0..=ni)
        .map(|k| match family {
            MatroidFamily::Fan | MatroidFamily::SquareOfPath => {
                binom(ni + 1, k + 1) * binom(ni + 1, k) / q(ni + 1)
            }
            MatroidFamily::Wheel => {
                binom(ni, k) * binom(ni, k) - q(2) / q(ni) * binom(ni, k + 1) * binom(ni, k - 1)
            }
            MatroidFamily::Whirl => binom(ni, k) * binom(ni, k),
        })
        .collect();
    integral(coeffs, family, n)
}

pub fn z_closed(family: MatroidFamily, n: usize) -> Result<IntPoly, KlError> {
    if n < family.min_index() {
        return Err(KlError::Index { family, n, min: family.min_index() });
    }
    z_closed_formula(family, n)
}

/// One monomial `coef * n^n_pow * t^t_pow` of a recurrence coefficient.
type Term = (i64, u32, usize);

/// A recurrence relation `sum lhs c(n,t) a[n+s] == sum rhs c(n,t) a[n+s]`,
/// each coefficient a product of factors given as monomial lists in `n`, `t`.
pub struct RecurrenceTable {
    pub family: MatroidFamily,
    /// Family index of `a[0]`.
    pub offset: usize,
    pub seeds: &'static [&'static [i64]],
    pub lhs: &'static [(usize, &'static [&'static [Term]])],
    pub rhs: &'static [(usize, &'static [&'static [Term]])],
}

pub const FAN_RECURRENCE: RecurrenceTable = RecurrenceTable {
    family: MatroidFamily::Fan,
    offset: 0,
    seeds: &[&[1], &[1]],
    lhs: &[(0, &[&[(1, 1, 0)], &[(-1, 0, 0), (4, 0, 1)]]), (1, &[&[(3, 0, 0), (2, 1, 0)]])],
    rhs: &[(2, &[&[(3, 0, 0), (1, 1, 0)]])],
};

pub const WHEEL_RECURRENCE: RecurrenceTable = RecurrenceTable {
    family: MatroidFamily::Wheel,
    offset: 2,
    seeds: &[&[1], &[1, 1], &[1, 5]],
    lhs: &[
        (
            2,
            &[&[
                (-60, 0, 0), (-12, 1, 0),
                (1758, 0, 1), (1372, 1, 1), (446, 2, 1), (68, 3, 1), (4, 4, 1),
                (-738, 0, 2), (-881, 1, 2), (-426, 2, 2), (-85, 3, 2), (-6, 4, 2),
                (84, 0, 3), (166, 1, 3), (106, 2, 3), (26, 3, 3), (2, 4, 3),
            ]],
        ),
        (
            3,
            &[
                &[(7, 0, 0), (1, 1, 0)],
                &[
                    (6, 0, 0),
                    (-150, 0, 1), (-85, 1, 1), (-21, 2, 1), (-2, 3, 1),
                    (12, 0, 2), (22, 1, 2), (12, 2, 2), (2, 3, 2),
                ],
            ],
        ),
    ],
    rhs: &[
        (
            0,
            &[
                &[(3, 0, 0), (1, 1, 0)],
                &[(1, 0, 1)],
                &[(-1, 0, 0), (4, 0, 1)],
                &[
                    (6, 0, 0),
                    (-258, 0, 1), (-133, 1, 1), (-27, 2, 1), (-2, 3, 1),
                    (48, 0, 2), (52, 1, 2), (18, 2, 2), (2, 3, 2),
                ],
            ],
        ),
        (
            1,
            &[&[
                (-18, 0, 0), (-6, 1, 0),
                (906, 0, 1), (693, 1, 1), (214, 2, 1), (33, 3, 1), (2, 4, 1),
                (-4956, 0, 2), (-4198, 1, 2), (-1408, 2, 2), (-224, 3, 2), (-14, 4, 2),
                (264, 0, 3), (952, 1, 3), (618, 2, 3), (146, 3, 3), (12, 4, 3),
            ]],
        ),
    ],
};

pub const WHIRL_RECURRENCE: RecurrenceTable = RecurrenceTable {
    family: MatroidFamily::Whirl,
    offset: 1,
    seeds: &[&[1], &[1], &[1, 3]],
    lhs: &[
        (
            2,
            &[&[
                (34, 0, 0), (24, 1, 0), (4, 2, 0),
                (-46, 0, 1), (-35, 1, 1), (-6, 2, 1),
                (16, 0, 2), (12, 1, 2), (2, 2, 2),
            ]],
        ),
        (3, &[&[(4, 0, 0), (1, 1, 0)], &[(-5, 0, 0), (-2, 1, 0), (4, 0, 1), (2, 1, 1)]]),
    ],
    rhs: &[
        (
            0,
            &[
                &[(2, 0, 0), (1, 1, 0)],
                &[(1, 0, 1)],
                &[(-1, 0, 0), (4, 0, 1)],
                &[(-7, 0, 0), (-2, 1, 0), (6, 0, 1), (2, 1, 1)],
            ],
        ),
        (
            1,
            &[&[
                (14, 0, 0), (11, 1, 0), (2, 2, 0),
                (-102, 0, 1), (-78, 1, 1), (-14, 2, 1),
                (74, 0, 2), (62, 1, 2), (12, 2, 2),
            ]],
        ),
    ],
};

impl RecurrenceTable {
    pub fn for_family(family: MatroidFamily) -> Result<&'static RecurrenceTable, KlError> {
        match family {
            MatroidFamily::Fan => Ok(&FAN_RECURRENCE),
            MatroidFamily::Wheel => Ok(&WHEEL_RECURRENCE),
            MatroidFamily::Whirl => Ok(&WHIRL_RECURRENCE),
            MatroidFamily::SquareOfPath => Err(KlError::NoRecurrence(family)),
        }
    }

    /// Coefficient polynomial in `t` of a product of factors at index `n`.
    pub fn coefficient_at(factors: &[&[Term]], n: i64) -> IntPoly {
        factors.iter().fold(IntPoly::one(), |acc, factor| {
            let f = factor.iter().fold(IntPoly::zero(), |p, &(c, np, tp)| {
                &p + &IntPoly::monomial(BigInt::from(c) * BigInt::from(n).pow(np), tp)
            });
            &acc * &f
        })
    }

    fn order(&self) -> usize {
        self.lhs.iter().chain(self.rhs).map(|&(s, _)| s).max().unwrap_or(0)
    }

    /// `a[0..count]`.
    pub fn sequence(&self, count: usize) -> Result<Vec<IntPoly>, KlError> {
        let order = self.order();
        let mut a: Vec<IntPoly> =
            self.seeds.iter().take(count).map(|s| IntPoly::from_i64s(s)).collect();
        while a.len() < count {
            let n = a.len() - order;
            let ni = n as i64;
            // move every known term to the side opposite the top shift
            let mut lead = None;
            let mut known = IntPoly::zero();
            for (side, sign) in [(self.lhs, 1i64), (self.rhs, -1)] {
                for &(s, factors) in side {
                    let c = Self::coefficient_at(factors, ni).scale(&BigInt::from(sign));
                    if s == order {
                        lead = Some(c);
                    } else {
                        known = &known + &(&c * &a[n + s]);
                    }
                }
            }
            let lead = lead.expect("recurrence has a top-shift term");
            let err = KlError::Recurrence { family: self.family, n: n + order + self.offset };
            let next = (-known).div_exact(&lead).map_err(|_| err)?;
            a.push(next);
        }
        Ok(a)
    }
}

/// KL polynomials of a family for indices `lo..=hi` from its recurrence.
pub fn kl_recurrence_range(
    family: MatroidFamily,
    lo: usize,
    hi: usize,
) -> Result<Vec<IntPoly>, KlError> {
    let table = RecurrenceTable::for_family(family)?;
    if lo < table.offset {
        return Err(KlError::Index { family, n: lo, min: table.offset });
    }
    if hi < lo {
        return Ok(Vec::new());
    }
    let seq = table.sequence(hi - table.offset + 1)?;
    Ok(seq[lo - table.offset..].to_vec())
}

/// KL polynomial of the n-th member from the recurrence. Valid from the
/// first seed: fans from n = 0, wheels from n = 2, whirls from n = 1.
pub fn kl_recurrence(family: MatroidFamily, n: usize) -> Result<IntPoly, KlError> {
    Ok(kl_recurrence_range(family, n, n)?.remove(0))
}

/// The factors `(a_k, b_k, c_k)` whose product is `[t^k] P_{W_n}`.
pub fn hadamard_wheel_coeff(n: usize, k: usize) -> (BigInt, BigRational, BigRational) {
    let (n, k) = (n as i64, k as i64);
    let a = (k + 1) * n * n - (2 * k * k + 4 * k) * n + k * k * k + 3 * k * k - k - 1;
    let b = fact(n) / (q(n - 1) * fact(k + 1) * fact(n + 1 - k));
    let c = q(n - 1) * fact(n - 2 - k) / (fact(k) * fact(n - 1 - 2 * k));
    (BigInt::from(a), b, c)
}

/// KL polynomial of a graph as the product over its blocks.
pub fn multiplicative_kl(g: &SimpleGraph) -> Result<IntPoly, KlError> {
    graph::biconnected_components(g).iter().try_fold(IntPoly::one(), |acc, block| {
        let p = if block.n_edges() <= 1 {
            IntPoly::one()
        } else {
            kl_poly(&matroid::graphic_matroid(block)?)?
        };
        Ok(&acc * &p)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::ElementLabel;
    use std::collections::HashMap;

    fn ip(v: &[i64]) -> IntPoly {
        IntPoly::from_i64s(v)
    }

    fn graphic(g: &SimpleGraph) -> RankOracleMatroid {
        matroid::graphic_matroid(g).unwrap()
    }

    #[test]
    fn small_brute_force_values() {
        let empty = RankOracleMatroid::from_rank_fn(vec![], |_| 0).unwrap();
        assert_eq!(kl_poly(&empty).unwrap(), IntPoly::one());
        assert_eq!(z_poly(&empty).unwrap(), IntPoly::one());
        let tree = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(kl_poly(&graphic(&tree)).unwrap(), IntPoly::one());
        let w3 = family_matroid(MatroidFamily::Wheel, 3).unwrap();
        assert_eq!(kl_poly(&w3).unwrap(), ip(&[1, 1]));
        let f1 = family_matroid(MatroidFamily::Fan, 1).unwrap();
        assert_eq!(z_poly(&f1).unwrap(), ip(&[1, 1]));
        let h3 = family_matroid(MatroidFamily::Whirl, 3).unwrap();
        assert_eq!(z_poly(&h3).unwrap(), ip(&[1, 9, 9, 1]));
        // uniform U_{2,4}: rank min(|X|, 2)
        let u24 = RankOracleMatroid::from_rank_fn(
            (0..4).map(ElementLabel::Index).collect(),
            |x| (x.count_ones() as usize).min(2),
        )
        .unwrap();
        assert_eq!(kl_poly(&u24).unwrap(), IntPoly::one());
        assert_eq!(z_poly(&u24).unwrap(), ip(&[1, 4, 1]));
    }

    #[test]
    fn cycles_match_the_corank_one_uniform_formula() {
        // M(C_n) = U_{n-1,n}; [t^i] = C(d-i-1, i) C(d+1, i) / (i+1) with d = n-1
        for n in 3..=9usize {
            let d = n as i64 - 1;
            let coeffs: Vec<BigInt> = (0..=(d - 1) / 2)
                .map(|i| binomial(d - i - 1, i) * binomial(d + 1, i) / BigInt::from(i + 1))
                .collect();
            let c = graphic(&graph::make_family(Family::Cycle, n).unwrap());
            assert_eq!(kl_poly(&c).unwrap(), IntPoly::new(coeffs), "C_{n}");
        }
        let c4 = graphic(&graph::make_family(Family::Cycle, 4).unwrap());
        assert_eq!(kl_poly(&c4).unwrap(), ip(&[1, 2]));
        let c6 = graphic(&graph::make_family(Family::Cycle, 6).unwrap());
        assert_eq!(kl_poly(&c6).unwrap(), ip(&[1, 9, 5]));
    }

    #[test]
    fn extraction_rejects_inconsistent_sums() {
        assert!(extract(&ip(&[-1, 0, 1]), 2).is_ok());
        assert_eq!(extract(&ip(&[-1, 0, 1]), 2).unwrap(), IntPoly::one());
        assert!(matches!(extract(&ip(&[-1, 1, 1]), 2), Err(KlError::Inconsistent { .. })));
        assert!(matches!(extract(&ip(&[0, 0, 1]), 2), Err(KlError::Inconsistent { .. })));
        assert!(matches!(extract(&ip(&[-1, 0, 0, 1]), 2), Err(KlError::Inconsistent { .. })));
    }

    #[test]
    fn brute_force_matches_closed_forms() {
        for family in MatroidFamily::ALL {
            let hi = match family {
                MatroidFamily::Fan | MatroidFamily::SquareOfPath => 7,
                _ => 6,
            };
            for n in family.min_index()..=hi {
                let (p, z) = brute(family, n).unwrap();
                assert_eq!(p.poly, kl_closed(family, n).unwrap(), "{family} {n}");
                assert_eq!(z.poly, z_closed(family, n).unwrap(), "{family} {n}");
            }
        }
    }

    #[test]
    fn defining_identity_rechecked_independently() {
        for family in MatroidFamily::ALL {
            for n in family.min_index()..=5 {
                let m = family_matroid(family, n).unwrap();
                let p = kl_poly(&m).unwrap();
                verify_defining_identity(&m, &p).unwrap();
                let wrong = &p + &IntPoly::one();
                assert!(verify_defining_identity(&m, &wrong).is_err());
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(kl_closed(MatroidFamily::Fan, 5).unwrap(), ip(&[1, 6, 2]));
        assert_eq!(kl_closed(MatroidFamily::Wheel, 4).unwrap(), ip(&[1, 5]));
        assert_eq!(kl_closed(MatroidFamily::Whirl, 3).unwrap(), ip(&[1, 3]));
        assert_eq!(z_closed(MatroidFamily::Fan, 2).unwrap(), ip(&[1, 3, 1]));
        assert_eq!(z_closed(MatroidFamily::Whirl, 3).unwrap(), ip(&[1, 9, 9, 1]));
        assert_eq!(z_closed(MatroidFamily::Wheel, 3).unwrap(), ip(&[1, 7, 7, 1]));
        let expected_wheel = [ip(&[1, 11, 5]), ip(&[1, 19, 29]), ip(&[1, 29, 91, 21])];
        for (n, p) in (5..=7).zip(expected_wheel) {
            assert_eq!(kl_closed(MatroidFamily::Wheel, n).unwrap(), p);
        }
        let expected_whirl = [ip(&[1, 8]), ip(&[1, 15, 10]), ip(&[1, 24, 45]), ip(&[1, 35, 126, 35])];
        for (n, p) in (4..=7).zip(expected_whirl) {
            assert_eq!(kl_closed(MatroidFamily::Whirl, n).unwrap(), p);
        }
        assert!(matches!(kl_closed(MatroidFamily::Wheel, 2), Err(KlError::Index { .. })));
        assert!(matches!(z_closed(MatroidFamily::Whirl, 2), Err(KlError::Index { .. })));
        // informational only: the wheel formula at n = 2 gives the triangle's value
        assert_eq!(kl_closed_formula(MatroidFamily::Wheel, 2).unwrap(), IntPoly::one());
    }

    #[test]
    fn closed_forms_have_expected_shape() {
        for family in MatroidFamily::ALL {
            for n in family.min_index()..=30 {
                let p = kl_closed(family, n).unwrap();
                assert_eq!(p.coeff(0), BigInt::one());
                assert!(2 * p.degree().finite().unwrap() < n);
                let z = z_closed(family, n).unwrap();
                assert_eq!(z.degree().finite(), Some(n));
                if family != MatroidFamily::Wheel {
                    assert!(z.is_palindromic());
                }
            }
        }
    }

    #[test]
    fn fan_values_are_motzkin_and_catalan() {
        // Motzkin by its own three-term recurrence, Catalan by C(2n, n)/(n+1)
        let mut motzkin = vec![BigInt::one(), BigInt::one()];
        for n in 2..30i64 {
            let next = (BigInt::from(2 * n + 1) * &motzkin[n as usize - 1]
                + BigInt::from(3 * n - 3) * &motzkin[n as usize - 2])
                / BigInt::from(n + 2);
            motzkin.push(next);
        }
        for n in 1..29usize {
            let one = BigRational::one();
            let p = kl_closed(MatroidFamily::Fan, n).unwrap();
            assert_eq!(p.eval_at(&one), BigRational::from_integer(motzkin[n - 1].clone()));
            let z = z_closed(MatroidFamily::Fan, n).unwrap();
            let catalan = binomial(2 * (n as i64 + 1), n as i64 + 1) / BigInt::from(n + 2);
            assert_eq!(z.eval_at(&one), BigRational::from_integer(catalan));
        }
    }

    #[test]
    fn square_of_path_equals_fan() {
        for n in 1..=7 {
            let (ps, zs) = brute(MatroidFamily::SquareOfPath, n).unwrap();
            let (pf, zf) = brute(MatroidFamily::Fan, n).unwrap();
            assert_eq!(ps.poly, pf.poly);
            assert_eq!(zs.poly, zf.poly);
        }
    }

    /// Expand a product of factors into a bivariate monomial map.
    fn expand(factors: &[&[Term]]) -> HashMap<(u32, usize), i64> {
        let mut acc = HashMap::from([((0u32, 0usize), 1i64)]);
        for factor in factors {
            let mut next = HashMap::new();
            for (&(a, b), &c) in &acc {
                for &(d, np, tp) in *factor {
                    *next.entry((a + np, b + tp)).or_insert(0) += c * d;
                }
            }
            acc = next;
            acc.retain(|_, v| *v != 0);
        }
        acc
    }

    fn checksum(factors: &[&[Term]]) -> (i64, i64, i64) {
        let e = expand(factors);
        let abs = e.values().map(|v| v.abs()).sum();
        let at = |n: i64, t: i64| e.iter().map(|(&(a, b), &c)| c * n.pow(a) * t.pow(b as u32)).sum();
        (abs, at(1, 1), at(2, 3))
    }

    #[test]
    fn recurrence_tables_match_transcription_checksums() {
        // (sum of |coefficients| after expansion, value at (n,t)=(1,1), at (2,3))
        let find = |side: &[(usize, &'static [&'static [Term]])], s: usize| {
            side.iter().find(|&&(k, _)| k == s).unwrap().1
        };
        let w = &WHEEL_RECURRENCE;
        assert_eq!(checksum(find(w.rhs, 0)), (10920, -3528, 36630));
        assert_eq!(checksum(find(w.rhs, 1)), (14664, -6984, -16698));
        assert_eq!(checksum(find(w.lhs, 2)), (6240, 1824, 4938));
        assert_eq!(checksum(find(w.lhs, 3)), (2496, -1632, -1566));
        let h = &WHIRL_RECURRENCE;
        assert_eq!(checksum(find(h.rhs, 0)), (255, -9, 2508));
        assert_eq!(checksum(find(h.rhs, 1)), (369, -19, 1316));
        assert_eq!(checksum(find(h.lhs, 2)), (179, 5, 110));
        assert_eq!(checksum(find(h.lhs, 3)), (65, -5, 90));
        let f = &FAN_RECURRENCE;
        assert_eq!(checksum(find(f.lhs, 0)), (5, 3, 22));
        assert_eq!(checksum(find(f.lhs, 1)), (5, 5, 7));
        assert_eq!(checksum(find(f.rhs, 2)), (4, 4, 5));
    }

    #[test]
    fn recurrences_reproduce_seeds_and_closed_forms() {
        assert_eq!(kl_recurrence_range(MatroidFamily::Fan, 0, 1).unwrap(), vec![ip(&[1]), ip(&[1])]);
        assert_eq!(
            kl_recurrence_range(MatroidFamily::Wheel, 2, 4).unwrap(),
            vec![ip(&[1]), ip(&[1, 1]), ip(&[1, 5])]
        );
        assert_eq!(
            kl_recurrence_range(MatroidFamily::Whirl, 1, 3).unwrap(),
            vec![ip(&[1]), ip(&[1]), ip(&[1, 3])]
        );
        for family in [MatroidFamily::Fan, MatroidFamily::Wheel, MatroidFamily::Whirl] {
            let lo = family.min_index();
            let seq = kl_recurrence_range(family, lo, 40).unwrap();
            for (n, p) in (lo..=40).zip(seq) {
                assert_eq!(p, kl_closed(family, n).unwrap(), "{family} {n}");
            }
        }
        assert!(matches!(
            kl_recurrence(MatroidFamily::SquareOfPath, 3),
            Err(KlError::NoRecurrence(_))
        ));
        assert!(matches!(kl_recurrence(MatroidFamily::Wheel, 1), Err(KlError::Index { .. })));
    }

    #[test]
    fn corrupted_recurrence_is_detected() {
        const BROKEN: RecurrenceTable = RecurrenceTable {
            family: MatroidFamily::Fan,
            offset: 0,
            seeds: &[&[1], &[1]],
            lhs: &[(0, &[&[(1, 1, 0)], &[(-1, 0, 0), (4, 0, 1)]]), (1, &[&[(3, 0, 0), (2, 1, 0)]])],
            rhs: &[(2, &[&[(5, 0, 0), (1, 1, 0)]])],
        };
        assert!(matches!(BROKEN.sequence(12), Err(KlError::Recurrence { .. })));
    }

    #[test]
    fn hadamard_factorization() {
        let product = |n, k| {
            let (a, b, c) = hadamard_wheel_coeff(n, k);
            BigRational::from_integer(a) * b * c
        };
        assert_eq!(product(3, 0), BigRational::one());
        assert_eq!(product(4, 1), q(5));
        assert_eq!(product(3, 1), BigRational::one());
        for n in 3..=30 {
            let p = kl_closed(MatroidFamily::Wheel, n).unwrap();
            for k in 0..=(n - 1) / 2 {
                assert_eq!(product(n, k), BigRational::from_integer(p.coeff(k)), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn multiplicativity_over_blocks() {
        let forest = SimpleGraph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(multiplicative_kl(&forest).unwrap(), IntPoly::one());
        let bowtie = SimpleGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(multiplicative_kl(&bowtie).unwrap(), IntPoly::one());
        assert_eq!(kl_poly(&graphic(&bowtie)).unwrap(), IntPoly::one());
        let f3 = graph::make_family(Family::Fan, 3).unwrap();
        let two = f3.disjoint_union(&f3).unwrap();
        assert_eq!(multiplicative_kl(&two).unwrap(), ip(&[1, 2, 1]));
        assert_eq!(kl_poly(&graphic(&two)).unwrap(), ip(&[1, 2, 1]));
        let w4 = graph::make_family(Family::Wheel, 4).unwrap();
        let c5 = graph::make_family(Family::Cycle, 5).unwrap();
        let mixed = w4.disjoint_union(&c5).unwrap();
        assert_eq!(multiplicative_kl(&mixed).unwrap(), kl_poly(&graphic(&mixed)).unwrap());
        assert_eq!(multiplicative_kl(&mixed).unwrap(), &ip(&[1, 5]) * &ip(&[1, 5]));
    }

    #[test]
    fn direct_sum_is_multiplicative() {
        let a = family_matroid(MatroidFamily::Whirl, 4).unwrap();
        let b = family_matroid(MatroidFamily::Wheel, 3).unwrap();
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(kl_poly(&s).unwrap(), &kl_poly(&a).unwrap() * &kl_poly(&b).unwrap());
        assert_eq!(z_poly(&s).unwrap(), &z_poly(&a).unwrap() * &z_poly(&b).unwrap());
    }
}
