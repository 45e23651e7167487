//! Exact scalars: rationals, and elements of cyclotomic fields `Q(ζ_n)` for
//! gerbe-weighted sums.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `x` as a big rational.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Reduce a rotation number into `[0, 1)`.
pub fn mod_one(r: &BigRational) -> BigRational {
    r - r.floor()
}

fn cyclotomic_poly(n: u64) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache poisoned").get(&n) {
        return p.clone();
    }
    // x^n - 1 = prod_{d | n} Φ_d(x)
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            p = div_monic(&p, &cyclotomic_poly(d));
        }
    }
    cache.lock().expect("cache poisoned").insert(n, p.clone());
    p
}

/// Exact quotient of integer polynomials by a monic divisor.
fn div_monic(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut quo = vec![0i64; a.len() - db];
    for i in (0..quo.len()).rev() {
        let c = r[i + db];
        quo[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] -= c * bj;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    quo
}

fn reduce(mut p: Vec<BigRational>, n: u64) -> Vec<BigRational> {
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    while p.len() > d {
        let c = p.pop().expect("nonempty");
        if c.is_zero() {
            continue;
        }
        let k = p.len() - d;
        for (j, &pj) in phi.iter().take(d).enumerate() {
            if pj != 0 {
                p[k + j] -= &c * BigRational::from_integer(BigInt::from(pj));
            }
        }
    }
    p.resize(d, BigRational::zero());
    p
}

/// An element of `Q(ζ_n)` in the power basis `1, ζ, …, ζ^{φ(n)-1}`.
///
/// Elements that happen to be rational are kept with `n = 1`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    n: u64,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn rational(r: BigRational) -> Self {
        Cyclotomic {
            n: 1,
            coeffs: vec![r],
        }
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    /// `e^{2πi r}` for a rational rotation number `r`.
    pub fn root_of_unity(r: &BigRational) -> Self {
        let r = mod_one(r);
        let n = r.denom().to_u64().expect("denominator fits in u64");
        let k = r.numer().to_usize().expect("numerator fits");
        let mut p = vec![BigRational::zero(); k + 1];
        p[k] = BigRational::one();
        Cyclotomic {
            n,
            coeffs: reduce(p, n),
        }
        .normalized()
    }

    /// Build from a table of multiplicities: `Σ count[j] · ζ_n^j`.
    pub fn from_rotation_counts(n: u64, counts: &[BigInt]) -> Self {
        let p = counts
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        Cyclotomic {
            n,
            coeffs: reduce(p, n),
        }
        .normalized()
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn from_parts(n: u64, coeffs: Vec<BigRational>) -> Self {
        Cyclotomic {
            n,
            coeffs: reduce(coeffs, n.max(1)),
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        if self.n != 1 && self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            let c0 = self.coeffs.swap_remove(0);
            return Self::rational(c0);
        }
        self
    }

    fn lift(&self, m: u64) -> Vec<BigRational> {
        if m == self.n {
            return self.coeffs.clone();
        }
        let s = (m / self.n) as usize;
        let mut p = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * s + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            p[i * s] = c.clone();
        }
        reduce(p, m)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.n == 1 {
            self.coeffs.first()
        } else {
            None
        }
    }

    /// Complex conjugate, `ζ ↦ ζ⁻¹`.
    pub fn conj(&self) -> Self {
        if self.n == 1 {
            return self.clone();
        }
        let n = self.n as usize;
        let mut p = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            p[(n - i) % n] += c;
        }
        Cyclotomic {
            n: self.n,
            coeffs: reduce(p, self.n),
        }
        .normalized()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
        .normalized()
    }

    /// Floating point value, for display only.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let a = std::f64::consts::TAU * i as f64 / self.n as f64;
            re += v * a.cos();
            im += v * a.sin();
        }
        (re, im)
    }

    fn binop(
        &self,
        other: &Self,
        f: impl Fn(&[BigRational], &[BigRational], u64) -> Vec<BigRational>,
    ) -> Self {
        let m = self.n.lcm(&other.n);
        let a = self.lift(m);
        let b = other.lift(m);
        Cyclotomic {
            n: m,
            coeffs: reduce(f(&a, &b, m), m),
        }
        .normalized()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let m = self.n.lcm(&other.n);
        self.lift(m) == other.lift(m)
    }
}

impl Eq for Cyclotomic {}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: &Cyclotomic) -> Cyclotomic {
        self.binop(o, |a, b, _| a.iter().zip(b).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: &Cyclotomic) -> Cyclotomic {
        self.binop(o, |a, b, _| a.iter().zip(b).map(|(x, y)| x - y).collect())
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: &Cyclotomic) -> Cyclotomic {
        self.binop(o, |a, b, _| {
            let mut p = vec![BigRational::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    p[i + j] += x * y;
                }
            }
            p
        })
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl From<BigRational> for Cyclotomic {
    fn from(r: BigRational) -> Self {
        Self::rational(r)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "z{}^{i}", self.n)?,
                _ => write!(f, "{a}*z{}^{i}", self.n)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_multiply() {
        let a = Cyclotomic::root_of_unity(&q(1, 3));
        let b = Cyclotomic::root_of_unity(&q(2, 3));
        assert_eq!(&a * &b, Cyclotomic::one());
        let h = Cyclotomic::root_of_unity(&q(1, 2));
        assert_eq!(h, Cyclotomic::rational(qi(-1)));
        let s = Cyclotomic::root_of_unity(&q(1, 4));
        assert_eq!(&s * &s, h);
        assert_eq!(&s * &a, Cyclotomic::root_of_unity(&q(7, 12)));
        // 1 + ζ3 + ζ3² = 0
        let sum = &(&Cyclotomic::one() + &a) + &b;
        assert!(sum.is_zero());
        assert_eq!(a.conj(), b);
    }
}
