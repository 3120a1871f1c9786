//! Exact integer arithmetic on `u64` values. Products are formed in `u128`
//! before reduction, so nothing here wraps silently.

use crate::error::{domain, Error, Result};

/// Nonnegative integer.
pub type Natural = u64;

/// Continued-fraction convergent `p/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub p: Natural,
    pub q: Natural,
}

impl Convergent {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl std::fmt::Display for Convergent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

pub fn mod_mul(a: Natural, b: Natural, n: Natural) -> Natural {
    ((a as u128 * b as u128) % n as u128) as Natural
}

/// `a^e mod n` by square-and-multiply.
pub fn mod_pow(a: Natural, e: Natural, n: Natural) -> Result<Natural> {
    if n == 0 {
        return domain("modulus must be at least 1");
    }
    let mut result = 1 % n;
    let mut base = a % n;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = mod_mul(result, base, n);
        }
        base = mod_mul(base, base, n);
        e >>= 1;
    }
    Ok(result)
}

pub fn gcd(mut a: Natural, mut b: Natural) -> Natural {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Euclid's algorithm, recording every remainder pair `(r_j, r_{j+1})` down
/// to and including the pair whose second entry is zero.
pub fn gcd_trace(x: Natural, y: Natural) -> Result<(Natural, Vec<(Natural, Natural)>)> {
    if x == 0 && y == 0 {
        return domain("gcd(0, 0) is undefined");
    }
    let mut trace = Vec::new();
    let (mut a, mut b) = (x, y);
    loop {
        trace.push((a, b));
        if b == 0 {
            return Ok((a, trace));
        }
        (a, b) = (b, a % b);
    }
}

/// Extended Euclid: returns `(g, s, t)` with `a s + b t = g`.
pub fn extended_gcd(a: Natural, b: Natural) -> (Natural, i128, i128) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 as Natural, s0, t0)
}

/// The unique `d` in `0..n` with `a d = 1 (mod n)`.
pub fn mod_inverse(a: Natural, n: Natural) -> Result<Natural> {
    if n == 0 {
        return domain("modulus must be at least 1");
    }
    let (g, s, _) = extended_gcd(a % n, n);
    if g != 1 {
        return Err(Error::NotInvertible { a, n });
    }
    Ok(s.rem_euclid(n as i128) as Natural)
}

/// All convergents of `x / denom`, ending with the fraction itself in lowest
/// terms.
pub fn convergents(x: Natural, denom: Natural) -> Result<Vec<Convergent>> {
    if denom == 0 {
        return domain("denominator must be at least 1");
    }
    if x > denom {
        return domain(format!("{x}/{denom} exceeds 1"));
    }
    // p_k = a_k p_{k-1} + p_{k-2}, q_k likewise, seeded with p_{-1}/q_{-1} = 1/0.
    let (mut p_prev, mut p) = (0u128, 1u128);
    let (mut q_prev, mut q) = (1u128, 0u128);
    let (mut num, mut den) = (x as u128, denom as u128);
    let mut out = Vec::new();
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num - a * den);
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, q) = (q, a * q + q_prev);
        out.push(Convergent {
            p: p as Natural,
            q: q as Natural,
        });
    }
    Ok(out)
}

/// Deterministic trial division.
pub fn is_prime(n: Natural) -> Result<bool> {
    if n < 2 {
        return domain(format!("primality of {n} is not defined here (need n >= 2)"));
    }
    if n < 4 {
        return Ok(true);
    }
    if n.is_multiple_of(2) {
        return Ok(false);
    }
    let mut d = 3u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            return Ok(false);
        }
        d += 2;
    }
    Ok(true)
}

/// Smallest prime divisor by trial division.
pub fn smallest_factor(n: Natural) -> Result<Natural> {
    if n < 2 {
        return domain(format!("{n} has no prime factor"));
    }
    if n.is_multiple_of(2) {
        return Ok(2);
    }
    let mut d = 3u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            return Ok(d);
        }
        d += 2;
    }
    Ok(n)
}

/// Largest `r` with `r^k <= n`.
pub fn integer_root(n: Natural, k: u32) -> Natural {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as Natural;
    let fits = |r: Natural| r.checked_pow(k).is_some_and(|v| v <= n);
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

/// `Some((p, alpha))` when `n = p^alpha` with `p` prime and `alpha >= 1`.
pub fn prime_power(n: Natural) -> Result<Option<(Natural, u32)>> {
    if n < 2 {
        return domain(format!("prime power test needs n >= 2, got {n}"));
    }
    let max_exp = 64 - n.leading_zeros();
    for alpha in (1..=max_exp).rev() {
        let r = integer_root(n, alpha);
        if r >= 2 && r.pow(alpha) == n && is_prime(r)? {
            return Ok(Some((r, alpha)));
        }
    }
    Ok(None)
}

/// Least `r > 0` with `a^r = 1 (mod n)`, by iterated multiplication.
pub fn order_classical(a: Natural, n: Natural) -> Result<Natural> {
    if n < 2 {
        return domain(format!("order needs a modulus >= 2, got {n}"));
    }
    if gcd(a, n) != 1 {
        return domain(format!("{a} is not coprime to {n}"));
    }
    let base = a % n;
    let mut value = base;
    let mut r = 1;
    while value != 1 {
        value = mod_mul(value, base, n);
        r += 1;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(3, 8, 7).unwrap(), 2);
        assert_eq!(mod_pow(12, 0, 5).unwrap(), 1);
        assert_eq!(mod_pow(12, 0, 1).unwrap(), 0);
        assert_eq!(mod_pow(180_700, 179, 571_247).unwrap(), 141_072);
        assert_eq!(mod_pow(141_072, 515_627, 571_247).unwrap(), 180_700);
        assert!(mod_pow(2, 3, 0).is_err());
        // Needs 128-bit intermediates.
        let big = (1u64 << 63) - 25;
        assert_eq!(mod_pow(big - 1, 2, big).unwrap(), 1);
    }

    #[test]
    fn euclid_trace_example() {
        let (g, trace) = gcd_trace(12_378, 3_054).unwrap();
        assert_eq!(g, 6);
        assert_eq!(
            trace,
            vec![(12378, 3054), (3054, 162), (162, 138), (138, 24), (24, 18), (18, 6), (6, 0)]
        );
        assert_eq!(gcd_trace(9, 0).unwrap().0, 9);
        assert_eq!(gcd_trace(0, 9).unwrap().0, 9);
        assert_eq!(gcd_trace(35, 12).unwrap().0, 1);
        assert!(gcd_trace(0, 0).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 10).unwrap(), 1);
        assert_eq!(mod_inverse(179, 772 * 738).unwrap(), 515_627);
        assert_eq!(mod_inverse(6, 15), Err(Error::NotInvertible { a: 6, n: 15 }));
    }

    #[test]
    fn convergent_examples() {
        let cv = |p, q| Convergent { p, q };
        assert_eq!(convergents(11, 32).unwrap(), vec![cv(0, 1), cv(1, 2), cv(1, 3), cv(11, 32)]);
        assert_eq!(convergents(0, 16).unwrap(), vec![cv(0, 1)]);
        assert_eq!(convergents(1, 2).unwrap(), vec![cv(0, 1), cv(1, 2)]);
        assert_eq!(convergents(16, 16).unwrap(), vec![cv(1, 1)]);
        assert_eq!(convergents(4, 16).unwrap().last(), Some(&cv(1, 4)));
        assert!(convergents(3, 0).is_err());
        assert!(convergents(5, 4).is_err());
    }

    #[test]
    fn primes_and_powers() {
        assert!(is_prime(7).unwrap());
        assert!(is_prime(2).unwrap());
        assert!(!is_prime(9).unwrap());
        assert!(is_prime(773).unwrap() && is_prime(739).unwrap());
        assert!(!is_prime(571_247).unwrap());
        assert!(is_prime(1).is_err());
        assert_eq!(prime_power(8).unwrap(), Some((2, 3)));
        assert_eq!(prime_power(7).unwrap(), Some((7, 1)));
        assert_eq!(prime_power(3u64.pow(10)).unwrap(), Some((3, 10)));
        assert_eq!(prime_power(36).unwrap(), None);
        assert_eq!(prime_power(571_247).unwrap(), None);
        assert_eq!(smallest_factor(571_247).unwrap(), 739);
        assert!(prime_power(0).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(order_classical(2, 15).unwrap(), 4);
        assert_eq!(order_classical(1, 15).unwrap(), 1);
        assert_eq!(order_classical(7, 15).unwrap(), 4);
        assert_eq!(order_classical(14, 15).unwrap(), 2);
        assert!(order_classical(3, 15).is_err());
    }

    #[test]
    fn integer_roots() {
        assert_eq!(integer_root(26, 3), 2);
        assert_eq!(integer_root(27, 3), 3);
        assert_eq!(integer_root(u64::MAX, 2), 4_294_967_295);
    }
}
