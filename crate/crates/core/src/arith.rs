//! Elementary multiplicative functions.

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::error::{precondition, Result};

/// Largest input accepted by the trial-division routines.
pub const TRIAL_LIMIT: u64 = 1_000_000_000_000;

fn check(n: u64) -> Result<()> {
    if n == 0 {
        return Err(precondition("input must be positive"));
    }
    if n > TRIAL_LIMIT {
        return Err(precondition(format!("input {n} exceeds the trial-division limit {TRIAL_LIMIT}")));
    }
    Ok(())
}

/// Prime factorization `[(p, e)]` in increasing order.
pub fn factorize(mut n: u64) -> Result<Vec<(u64, u32)>> {
    check(n)?;
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5;
    while p * p <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.len() as u32)
}

/// Number of positive divisors.
pub fn num_divisors(n: u64) -> Result<u64> {
    Ok(factorize(n)?.iter().map(|&(_, e)| e as u64 + 1).product())
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factorize(n)?.iter().all(|&(_, e)| e == 1))
}

/// `σ_s(m) = Σ_{d | m} d^s`.
pub fn sigma_power(s: u32, m: u64) -> Result<BigInt> {
    let mut acc = BigInt::one();
    for (p, e) in factorize(m)? {
        let ps: BigInt = BigInt::from(p).pow(s);
        let mut term = BigInt::one();
        let mut pow = BigInt::one();
        for _ in 0..e {
            pow *= &ps;
            term += &pow;
        }
        acc *= term;
    }
    Ok(acc)
}

/// Smallest-prime-factor table on `[0, limit]`.
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Sieve { spf }
    }

    pub fn limit(&self) -> u32 {
        (self.spf.len() - 1) as u32
    }

    /// Exponents of the prime factorization of `n ≥ 1`.
    pub fn exponents(&self, mut n: u32) -> Vec<u32> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize];
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push(e);
        }
        out
    }

    pub fn omega(&self, n: u32) -> u32 {
        self.exponents(n).len() as u32
    }

    pub fn num_divisors(&self, n: u32) -> u64 {
        self.exponents(n).iter().map(|&e| e as u64 + 1).product()
    }

    pub fn is_squarefree(&self, n: u32) -> bool {
        self.exponents(n).iter().all(|&e| e == 1)
    }
}
