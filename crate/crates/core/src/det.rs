//! Exact integer determinants.
//!
//! Two routes: fraction-free Bareiss elimination over big integers, and
//! elimination modulo word-sized primes recombined by CRT. The modular route
//! only applies when the caller knows `0 <= det <= bound`; it is what makes
//! Monte Carlo runs with one determinant per sample affordable, and it is
//! checked against Bareiss in the tests below.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// Dense square matrix of small integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let dim = rows.len();
        let mut m = IntMatrix::zeros(dim);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), dim, "matrix must be square");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(r);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.dim + j] += v;
    }
}

/// Bareiss fraction-free elimination. Every division is exact.
pub fn bareiss_det(m: &IntMatrix) -> BigInt {
    let n = m.dim;
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(m.get(i, j))).collect())
        .collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let v = &row[j] * pivot - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Montgomery arithmetic modulo an odd prime below 2^62.
#[derive(Debug, Clone, Copy)]
struct Montgomery {
    p: u64,
    neg_inv: u64,
    r2: u64,
}

impl Montgomery {
    fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < 1 << 62);
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        Montgomery {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let q = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + q as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn encode(&self, x: i64) -> u64 {
        let r = x.unsigned_abs() % self.p;
        let r = if x < 0 && r != 0 { self.p - r } else { r };
        self.mul(r, self.r2)
    }

    fn decode(&self, x: u64) -> u64 {
        self.mul(x, 1)
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = self.encode(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Determinant modulo `p`, as a residue in `[0, p)`.
fn det_mod(m: &IntMatrix, p: u64) -> u64 {
    let n = m.dim;
    let mt = Montgomery::new(p);
    let mut a: Vec<u64> = m.data.iter().map(|&x| mt.encode(x)).collect();
    let mut det = mt.encode(1);
    let mut negate = false;
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i * n + k] != 0) else {
            return 0;
        };
        if piv != k {
            for j in 0..n {
                a.swap(piv * n + j, k * n + j);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k];
        det = mt.mul(det, pivot);
        let inv = mt.pow(pivot, p - 2);
        cols.clear();
        cols.extend((k + 1..n).filter(|&j| a[k * n + j] != 0));
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..];
        for row in tail.chunks_exact_mut(n) {
            if row[k] == 0 {
                continue;
            }
            let f = mt.mul(row[k], inv);
            for &j in &cols {
                row[j] = mt.sub(row[j], mt.mul(f, pivot_row[j]));
            }
            row[k] = 0;
        }
    }
    let d = mt.decode(det);
    if negate && d != 0 {
        p - d
    } else {
        d
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const PRIME_COUNT: usize = 40;

/// The largest primes below 2^62, descending.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut c = (1u64 << 62) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime_u64(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

/// Garner recombination of residues into the unique value below the product.
fn crt(residues: &[u64], moduli: &[u64]) -> BigUint {
    let mut x = BigUint::from(residues[0]);
    let mut modulus = BigUint::from(moduli[0]);
    for (&r, &p) in residues.iter().zip(moduli).skip(1) {
        let x_mod = (&x % p).iter_u64_digits().next().unwrap_or(0);
        let m_mod = (&modulus % p).iter_u64_digits().next().unwrap_or(0);
        let diff = (r + p - x_mod) % p;
        let t = mul_mod(diff, pow_mod(m_mod, p - 2, p), p);
        x += &modulus * t;
        modulus *= p;
    }
    x
}

/// Determinant of a matrix known to satisfy `0 <= det <= bound`.
///
/// Uses as many primes as needed to exceed `bound`; falls back to Bareiss
/// when the bound is beyond the prime table.
pub fn det_nonneg_bounded(m: &IntMatrix, bound: &BigUint) -> BigUint {
    if m.dim == 0 {
        return BigUint::one();
    }
    if bound.is_zero() {
        return BigUint::zero();
    }
    let table = primes();
    let mut product = BigUint::one();
    let mut used = 0;
    while &product <= bound {
        if used == table.len() {
            let d = bareiss_det(m);
            debug_assert!(!d.is_negative());
            return d.to_biguint().unwrap_or_default();
        }
        product *= table[used];
        used += 1;
    }
    let moduli = &table[..used];
    let residues: Vec<u64> = moduli.iter().map(|&p| det_mod(m, p)).collect();
    crt(&residues, moduli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Leibniz expansion, the independent reference for tiny matrices.
    fn leibniz(m: &IntMatrix) -> BigInt {
        fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
            if n == 0 {
                return vec![(vec![], false)];
            }
            let mut out = Vec::new();
            for (p, odd) in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    let swaps = p.len() - pos;
                    out.push((q, odd ^ (swaps % 2 == 1)));
                }
            }
            out
        }
        let n = m.dim();
        let mut total = BigInt::zero();
        for (p, odd) in perms(n) {
            let term = (0..n).fold(BigInt::one(), |acc, i| acc * m.get(i, p[i]));
            if odd {
                total -= term;
            } else {
                total += term;
            }
        }
        total
    }

    #[test]
    fn bareiss_small_cases() {
        assert_eq!(bareiss_det(&IntMatrix::zeros(0)), BigInt::one());
        assert_eq!(bareiss_det(&mat(&[&[7]])), BigInt::from(7));
        assert_eq!(bareiss_det(&mat(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(bareiss_det(&mat(&[&[2, -1], &[-1, 2]])), BigInt::from(3));
        assert_eq!(
            bareiss_det(&mat(&[&[0, 2, 1], &[0, 1, 3], &[4, 0, 0]])),
            BigInt::from(20)
        );
        assert_eq!(bareiss_det(&mat(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn prime_table_is_prime() {
        let table = primes();
        assert_eq!(table[0], (1u64 << 62) - 57);
        for &p in table {
            assert!(is_prime_u64(p));
        }
        assert!(!is_prime_u64((1u64 << 62) - 1));
        assert!(is_prime_u64(2_147_483_647));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn modular_route_handles_large_values() {
        // tridiagonal 2,-1 has det n+1; scale rows to push past one prime
        let n = 40;
        let mut m = IntMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 2 * 1000);
            if i + 1 < n {
                m.set(i, i + 1, -1000);
                m.set(i + 1, i, -1);
            }
        }
        let exact = bareiss_det(&m).to_biguint().unwrap();
        let bound = BigUint::from(3000u32).pow(n as u32);
        assert_eq!(det_nonneg_bounded(&m, &bound), exact);
    }

    proptest! {
        #[test]
        fn bareiss_matches_leibniz(dim in 0usize..6, seed in prop::collection::vec(-5i64..6, 36)) {
            let mut m = IntMatrix::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    m.set(i, j, seed[i * 6 + j]);
                }
            }
            prop_assert_eq!(bareiss_det(&m), leibniz(&m));
        }

        #[test]
        fn modular_residue_matches_bareiss(dim in 1usize..9, seed in prop::collection::vec(-50i64..51, 64)) {
            let mut m = IntMatrix::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    m.set(i, j, seed[i * 8 + j]);
                }
            }
            let exact = bareiss_det(&m);
            for &p in &primes()[..3] {
                let want = ((exact.clone() % p as i64 + p as i64) % p as i64).to_string();
                prop_assert_eq!(det_mod(&m, p).to_string(), want);
            }
        }
    }
}
