use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::sturm::{all_zeros_negative, n_sequence_check, rat_int, RootError};
use crate::kl::{self, KlError, MatroidFamily};
use crate::poly::{binomial, factorial, IntPoly, RatPoly};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("identity needs n >= {min}, got {n}")]
    Index { n: usize, min: usize },
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

fn need(n: usize, min: usize) -> Result<(), IdentityError> {
    if n < min {
        Err(IdentityError::Index { n, min })
    } else {
        Ok(())
    }
}

/// `N_n(t) = sum_{k<n} (1/n) C(n,k) C(n,k+1) t^k`.
pub fn narayana(n: usize) -> IntPoly {
    let n = n as i64;
    IntPoly::new((0..n).map(|k| binomial(n, k) * binomial(n, k + 1) / BigInt::from(n)).collect())
}

/// `N_n(t) = (1+t)^{n-1} P_{F_n}(t/(1+t)^2)`, and `Z_{F_{n-1}} = N_n`.
pub fn verify_narayana_identity(n: usize) -> Result<bool, IdentityError> {
    need(n, 1)?;
    let p = kl::kl_closed(MatroidFamily::Fan, n)?;
    let d = p.degree().finite().unwrap_or(0);
    let one_plus_t = RatPoly::from_i64s(&[1, 1]);
    let composed = p.to_rat().compose_rational(&RatPoly::t(), &one_plus_t.pow(2), d)?;
    let lhs = &composed * &one_plus_t.pow((n - 1 - 2 * d) as u32);
    let nar = narayana(n);
    let z = kl::z_closed_formula(MatroidFamily::Fan, n - 1)?;
    Ok(lhs == nar.to_rat() && z == nar)
}

/// Lucas polynomials `L_0 = 2`, `L_1 = t`, `L_n = t L_{n-1} + L_{n-2}`.
pub fn lucas(n: usize) -> IntPoly {
    let (mut a, mut b) = (IntPoly::from_i64s(&[2]), IntPoly::t());
    for _ in 0..n {
        let next = &(&IntPoly::t() * &b) + &a;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Fibonacci polynomials `F_1 = 1`, `F_2 = t`, `F_n = t F_{n-1} + F_{n-2}`.
pub fn fibonacci(n: usize) -> IntPoly {
    let (mut a, mut b) = (IntPoly::zero(), IntPoly::one());
    for _ in 1..n {
        let next = &(&IntPoly::t() * &b) + &a;
        a = std::mem::replace(&mut b, next);
    }
    if n == 0 {
        IntPoly::zero()
    } else {
        b
    }
}

/// `c_k = (n-1)(n-2-k)! / (k! (n-1-2k)!)` for `k <= (n-1)/2`.
pub fn lucas_sequence_term(n: usize, k: usize) -> BigRational {
    let (n, k) = (n as u64, k as u64);
    rat_int(&(BigInt::from(n - 1) * factorial(n - 2 - k)))
        / rat_int(&(factorial(k) * factorial(n - 1 - 2 * k)))
}

/// `f_n(t) = sum_k c_k t^k` must be the coefficient reversal of
/// `L_{n-1}` (`t^{(n-1)/2} L_{n-1}(t^{-1/2})`), and `g_n(t) = sum_k
/// C(n-k-1, k) t^k` that of `F_n`; both must have only negative zeros.
pub fn verify_lucas_fibonacci(n: usize) -> Result<bool, IdentityError> {
    need(n, 3)?;
    let m = (n - 1) / 2;
    let f_terms: Vec<BigRational> = (0..=m).map(|k| lucas_sequence_term(n, k)).collect();
    let l = lucas(n - 1);
    let lucas_ok = f_terms.iter().enumerate().all(|(k, c)| rat_int(&l.coeff(n - 1 - 2 * k)) == *c)
        && (0..=n - 1).filter(|j| (n - 1 - j) % 2 == 1).all(|j| l.coeff(j).is_zero())
        && l.degree().finite() == Some(n - 1);
    let fib = fibonacci(n);
    let g = IntPoly::new((0..=m).map(|k| binomial((n - k - 1) as i64, k as i64)).collect());
    let fib_ok = (0..=m).all(|k| fib.coeff(n - 1 - 2 * k) == g.coeff(k))
        && (0..n).filter(|j| (n - 1 - j) % 2 == 1).all(|j| fib.coeff(j).is_zero())
        && fib.degree().finite() == Some(n - 1);
    let f = RatPoly::new(f_terms).to_int().expect("c_k are integers");
    Ok(lucas_ok && fib_ok && all_zeros_negative(&f)?.holds && all_zeros_negative(&g)?.holds)
}

/// `sum_k ((1+k)n^2 + (1-2k-k^2)n + 2k^2) C(n,k) t^k`.
pub fn wheel_z_h(n: usize) -> IntPoly {
    let ni = n as i64;
    IntPoly::new(
        (0..=ni)
            .map(|k| BigInt::from((1 + k) * ni * ni + (1 - 2 * k - k * k) * ni + 2 * k * k) * binomial(ni, k))
            .collect(),
    )
}

/// `(n^2-n+4)^2 - 4(n+1)^2`.
pub fn wheel_z_discriminant(n: usize) -> BigInt {
    let n = BigInt::from(n);
    let b: BigInt = &n * &n - &n + 4;
    let c: BigInt = &n + 1;
    &b * &b - BigInt::from(4) * &c * &c
}

/// `h_n = n((n+1)t^2 + (n^2-n+4)t + n+1)(1+t)^{n-2}`, the quadratic's
/// discriminant is `(n-1)(n-2)(n^2+n+6) > 0`, and
/// `[t^k] Z_{W_n} = [t^k] h_n * (n-1)! / ((k+1)! (n+1-k)!)`.
pub fn verify_wheel_z_quadratic(n: usize) -> Result<bool, IdentityError> {
    need(n, 3)?;
    let ni = n as i64;
    let quad = IntPoly::from_i64s(&[ni + 1, ni * ni - ni + 4, ni + 1]);
    let rhs = (&quad * &IntPoly::from_i64s(&[1, 1]).pow((n - 2) as u32)).scale(&BigInt::from(ni));
    let h = wheel_z_h(n);
    let disc = wheel_z_discriminant(n);
    let disc_ok = disc == BigInt::from((ni - 1) * (ni - 2) * (ni * ni + ni + 6)) && disc.is_positive();
    let z = kl::z_closed(MatroidFamily::Wheel, n)?;
    let weights_ok = (0..=n as u64).all(|k| {
        let w = rat_int(&factorial(n as u64 - 1)) / rat_int(&(factorial(k + 1) * factorial(n as u64 + 1 - k)));
        rat_int(&h.coeff(k as usize)) * w == rat_int(&z.coeff(k as usize))
    });
    Ok(h == rhs && disc_ok && weights_ok)
}

/// `a_k = (k+1)n^2 - (2k^2+4k)n + k^3 + 3k^2 - k - 1`.
pub fn wheel_a_sequence(n: usize, k: usize) -> BigInt {
    kl::hadamard_wheel_coeff(n, k).0
}

/// `sum_{k<=m} a_k C(m,k) t^k` with `m = (n-1)/2` (integer division).
pub fn wheel_a_transform(n: usize) -> IntPoly {
    let m = ((n - 1) / 2) as i64;
    IntPoly::new((0..=m).map(|k| wheel_a_sequence(n, k as usize) * binomial(m, k)).collect())
}

/// Whether `(a_0, ..., a_m)` passes the n-sequence criterion at `m = (n-1)/2`.
pub fn wheel_a_is_n_sequence(n: usize) -> Result<bool, IdentityError> {
    need(n, 3)?;
    let m = (n - 1) / 2;
    let gamma: Vec<BigRational> = (0..=m).map(|k| rat_int(&wheel_a_sequence(n, k))).collect();
    Ok(n_sequence_check(&gamma, m)?)
}
