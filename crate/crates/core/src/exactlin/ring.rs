use crate::error::{Error, Result};

/// The residue ring Z/p^N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ring {
    p: u64,
    exp: u32,
    modulus: u64,
}

/// Largest exponent N with p^N below 2^62, so that sums of two residues never
/// overflow and products fit in u128.
pub fn max_exponent(p: u64) -> u32 {
    let mut e = 0;
    let mut m: u128 = 1;
    while m * (p as u128) < (1u128 << 62) {
        m *= p as u128;
        e += 1;
    }
    e
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Ring {
    pub fn new(p: u64, exp: u32) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if exp == 0 {
            return Err(Error::Invalid("exponent must be at least 1".into()));
        }
        if exp > max_exponent(p) {
            return Err(Error::Invalid(format!(
                "{p}^{exp} exceeds the 62-bit residue range"
            )));
        }
        Ok(Ring { p, exp, modulus: p.pow(exp) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn exp(&self) -> u32 {
        self.exp
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same prime, different exponent.
    pub fn with_exp(&self, exp: u32) -> Result<Ring> {
        Ring::new(self.p, exp)
    }

    pub fn pow_p(&self, k: u32) -> u64 {
        if k >= self.exp {
            0
        } else {
            self.p.pow(k)
        }
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        let m = self.modulus as i128;
        (((x as i128) % m + m) % m) as u64
    }

    pub fn from_i128(&self, x: i128) -> u64 {
        let m = self.modulus as i128;
        ((x % m + m) % m) as u64
    }

    /// Representative in (-m/2, m/2], handy for printing lifts.
    pub fn to_signed(&self, x: u64) -> i64 {
        if x > self.modulus / 2 {
            x as i64 - self.modulus as i64
        } else {
            x as i64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// p-adic valuation; `exp` for zero.
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.exp;
        }
        let mut v = 0;
        let mut x = a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let (mut t, mut new_t) = (0i128, 1i128);
        let (mut r, mut new_r) = (self.modulus as i128, a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        Some(self.from_i128(t))
    }

    /// Splits a nonzero `a` as p^v * u with u a unit; returns (v, u).
    pub fn split(&self, a: u64) -> (u32, u64) {
        let v = self.val(a);
        let pv = self.p.pow(v);
        // a / p^v is only determined modulo p^(N-v); any lift is a unit.
        (v, a / pv)
    }

    pub fn reduce_from(&self, x: u64, other: &Ring) -> u64 {
        debug_assert_eq!(self.p, other.p);
        x % self.modulus
    }

    /// Number of elements as a power of p: |Z/p^N| = p^N.
    pub fn order_log(&self) -> u32 {
        self.exp
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.exp)
    }
}
