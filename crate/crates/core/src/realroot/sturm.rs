use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{binomial, IntPoly, RatPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("the zero polynomial has no root structure")]
    ZeroPolynomial,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("expected {expected} terms, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// An endpoint of the real line, possibly infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInfinity,
    Finite(BigRational),
    PosInfinity,
}

impl Bound {
    pub fn int(v: i64) -> Self {
        Bound::Finite(BigRational::from_integer(v.into()))
    }

    fn rank(&self) -> u8 {
        match self {
            Bound::NegInfinity => 0,
            Bound::Finite(_) => 1,
            Bound::PosInfinity => 2,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        })
    }
}

fn signum(x: &BigInt) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sign of an integer polynomial at a point, evaluated as the integer
/// `den^d p(num/den)`.
fn sign_at(p: &IntPoly, at: &Bound) -> i8 {
    let lead = || p.leading().map_or(0, signum);
    match at {
        Bound::Finite(x) => {
            let (num, den) = (x.numer(), x.denom());
            let mut acc = BigInt::zero();
            let mut den_pow = BigInt::one();
            for c in p.coeffs().iter().rev() {
                acc = acc * num + c * &den_pow;
                den_pow *= den;
            }
            signum(&acc)
        }
        Bound::PosInfinity => lead(),
        Bound::NegInfinity => {
            let odd = p.degree().finite().is_some_and(|d| d % 2 == 1);
            if odd {
                -lead()
            } else {
                lead()
            }
        }
    }
}

/// Sturm sequence of the squarefree part of a polynomial: `s0`, `s0'`, then
/// negated remainders, each divided by a positive constant so that every
/// element is a primitive integer polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    polys: Vec<IntPoly>,
    squarefree_part: IntPoly,
}

/// `p / gcd(p, p')`, scaled to a primitive integer polynomial with
/// positive leading coefficient.
pub fn squarefree_part(p: &RatPoly) -> Result<IntPoly, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let g = p.gcd(&p.derivative());
    let (q, _) = p.div_rem(&g).expect("gcd of a nonzero polynomial is nonzero");
    Ok(q.primitive_part())
}

/// Divide by a positive constant to make the coefficients coprime integers;
/// signs at every point are unchanged.
fn positive_primitive(p: &RatPoly) -> IntPoly {
    let q = p.primitive_part();
    if p.leading().is_some_and(Signed::is_negative) {
        -q
    } else {
        q
    }
}

impl SturmChain {
    pub fn new(p: &RatPoly) -> Result<Self, RootError> {
        let sf = squarefree_part(p)?;
        let mut polys = vec![sf.clone()];
        let mut prev = sf.to_rat();
        let mut cur = sf.derivative().to_rat();
        while !cur.is_zero() {
            let c = positive_primitive(&cur);
            polys.push(c.clone());
            let r = prev.rem(&c.to_rat()).expect("nonzero divisor");
            prev = c.to_rat();
            cur = -r;
        }
        Ok(SturmChain { polys, squarefree_part: sf })
    }

    pub fn polys(&self) -> &[IntPoly] {
        &self.polys
    }

    pub fn squarefree_part(&self) -> &IntPoly {
        &self.squarefree_part
    }

    /// Sign changes along the chain at `at`, zeros dropped.
    pub fn variations(&self, at: &Bound) -> usize {
        let signs: Vec<i8> = self.polys.iter().map(|p| sign_at(p, at)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &Bound, hi: &Bound) -> usize {
        if lo >= hi {
            return 0;
        }
        self.variations(lo) - self.variations(hi)
    }
}

/// Distinct real roots of `p` in `(lo, hi]`.
pub fn count_real_roots(p: &IntPoly, lo: &Bound, hi: &Bound) -> Result<usize, RootError> {
    Ok(SturmChain::new(&p.to_rat())?.count(lo, hi))
}

/// Disjoint half-open intervals `(lo, hi]`, sorted, each holding exactly one
/// distinct real root, with the root's multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootIsolation {
    pub intervals: Vec<(BigRational, BigRational)>,
    pub multiplicities: Vec<usize>,
}

impl RootIsolation {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Real roots counted with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }
}

/// `1 + max |a_i / a_d|`; every root lies strictly inside `(-B, B)`.
fn cauchy_bound(p: &IntPoly) -> BigRational {
    let lead = p.leading().expect("nonzero").abs();
    let m = p.coeffs().iter().map(|c| BigRational::new(c.abs(), lead.clone())).max().unwrap_or_else(BigRational::zero);
    m + BigRational::one()
}

/// Isolating intervals for the distinct real roots of the chain's
/// polynomial. Zero is always an interval endpoint, so no interval
/// straddles it.
pub fn isolate_intervals(chain: &SturmChain) -> Vec<(BigRational, BigRational)> {
    let b = cauchy_bound(chain.squarefree_part());
    let mut todo = vec![(-b.clone(), BigRational::zero()), (BigRational::zero(), b)];
    let mut out = Vec::new();
    let two = BigRational::from_integer(2.into());
    while let Some((lo, hi)) = todo.pop() {
        match chain.count(&Bound::Finite(lo.clone()), &Bound::Finite(hi.clone())) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / &two;
                todo.push((lo, mid.clone()));
                todo.push((mid, hi));
            }
        }
    }
    out.sort();
    out
}

/// Multiplicity of `p` at the root in each interval (zero when `p` has no
/// root there), from the chain `p, gcd(p, p'), ...`.
pub fn multiplicities_in(p: &RatPoly, intervals: &[(BigRational, BigRational)]) -> Result<Vec<usize>, RootError> {
    let mut mult = vec![0; intervals.len()];
    let mut g = p.clone();
    while !g.is_constant() {
        let chain = SturmChain::new(&g)?;
        for (m, (lo, hi)) in mult.iter_mut().zip(intervals) {
            if chain.count(&Bound::Finite(lo.clone()), &Bound::Finite(hi.clone())) > 0 {
                *m += 1;
            }
        }
        g = g.gcd(&g.derivative());
    }
    Ok(mult)
}

pub fn isolate_roots(p: &IntPoly) -> Result<RootIsolation, RootError> {
    let rp = p.to_rat();
    let intervals = isolate_intervals(&SturmChain::new(&rp)?);
    let multiplicities = multiplicities_in(&rp, &intervals)?;
    Ok(RootIsolation { intervals, multiplicities })
}

/// All roots real, counted with multiplicity. Nonzero constants qualify.
pub fn is_real_rooted(p: &IntPoly) -> Result<bool, RootError> {
    let deg = p.degree().finite().ok_or(RootError::ZeroPolynomial)?;
    Ok(isolate_roots(p)?.total_multiplicity() == deg)
}

/// Outcome of [`all_zeros_negative`] with the isolation that decides it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativityCertificate {
    pub holds: bool,
    pub isolation: RootIsolation,
}

/// Whether every root of `p` is real and strictly negative.
pub fn all_zeros_negative(p: &IntPoly) -> Result<NegativityCertificate, RootError> {
    let deg = p.degree().finite().ok_or(RootError::ZeroPolynomial)?;
    let isolation = isolate_roots(p)?;
    let negative: usize = isolation
        .intervals
        .iter()
        .zip(&isolation.multiplicities)
        .filter(|((_, hi), _)| hi.is_negative() || (hi.is_zero() && !p.coeff(0).is_zero()))
        .map(|(_, m)| m)
        .sum();
    Ok(NegativityCertificate { holds: negative == deg, isolation })
}

/// `g ⪯ f`: both real-rooted with positive leading coefficients, and the
/// roots alternate, `g`'s smallest first when the degrees agree and `f`'s
/// smallest first when `deg f = deg g + 1`. Shared roots are allowed.
pub fn interleaves(g: &IntPoly, f: &IntPoly) -> Result<bool, RootError> {
    let (Some(dg), Some(df)) = (g.degree().finite(), f.degree().finite()) else {
        return Err(RootError::ZeroPolynomial);
    };
    if !(df == dg || df == dg + 1) {
        return Err(RootError::Precondition(format!("degrees {dg} and {df} differ by more than one")));
    }
    if g.leading().is_some_and(Signed::is_negative) || f.leading().is_some_and(Signed::is_negative) {
        return Err(RootError::Precondition("leading coefficients must be positive".into()));
    }
    let product = (f * g).to_rat();
    let intervals = isolate_intervals(&SturmChain::new(&product)?);
    let mf = multiplicities_in(&f.to_rat(), &intervals)?;
    let mg = multiplicities_in(&g.to_rat(), &intervals)?;
    if mf.iter().sum::<usize>() != df || mg.iter().sum::<usize>() != dg {
        return Err(RootError::Precondition("both polynomials must be real-rooted".into()));
    }
    // roots as increasing lists of interval indices; equal index means equal root
    let expand = |m: &[usize]| -> Vec<usize> {
        m.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k)).collect()
    };
    let (u, v) = (expand(&mf), expand(&mg));
    let mut merged = Vec::with_capacity(u.len() + v.len());
    if df == dg {
        for (a, b) in v.iter().zip(&u) {
            merged.extend([*a, *b]);
        }
    } else {
        for i in 0..u.len() {
            merged.push(u[i]);
            if i < v.len() {
                merged.push(v[i]);
            }
        }
    }
    Ok(merged.windows(2).all(|w| w[0] <= w[1]))
}

/// Whether `sum gamma_k C(n, k) t^k` is real-rooted with all zeros of one
/// sign. Zero and constant polynomials pass vacuously; a root at zero is
/// compatible with either sign.
pub fn n_sequence_check(gamma: &[BigRational], n: usize) -> Result<bool, RootError> {
    if gamma.len() != n + 1 {
        return Err(RootError::LengthMismatch { expected: n + 1, got: gamma.len() });
    }
    let poly = RatPoly::new(
        gamma
            .iter()
            .enumerate()
            .map(|(k, g)| g * BigRational::from_integer(binomial(n as i64, k as i64)))
            .collect(),
    );
    if poly.is_constant() {
        return Ok(true);
    }
    let p = poly.primitive_part();
    let deg = p.degree().finite().expect("nonconstant");
    let iso = isolate_roots(&p)?;
    if iso.total_multiplicity() != deg {
        return Ok(false);
    }
    let nonpositive = iso.intervals.iter().all(|(_, hi)| !hi.is_positive());
    let nonnegative = iso.intervals.iter().all(|(lo, _)| !lo.is_negative());
    Ok(nonpositive || nonnegative)
}

/// Coefficients positive up to the degree with `a_k^2 >= a_{k-1} a_{k+1}`.
pub fn is_log_concave_without_internal_zeros(p: &IntPoly) -> bool {
    let c = p.coeffs();
    let first = c.iter().position(|x| !x.is_zero()).unwrap_or(c.len());
    let body = &c[first..];
    let same_sign = body.iter().all(Signed::is_positive) || body.iter().all(Signed::is_negative);
    same_sign && body.windows(3).all(|w| &w[1] * &w[1] >= &w[0] * &w[2])
}

pub(crate) fn rat_int(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}
