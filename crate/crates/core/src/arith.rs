//! Small integer helpers used across the crate.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Returns `(p, e)` when `q = p^e` for a prime `p` and `e >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Largest power of `p` that does not exceed `n` (`1` when `n < p`).
pub fn largest_power_at_most(p: u64, n: u64) -> u64 {
    let mut q = 1u64;
    while let Some(next) = q.checked_mul(p) {
        if next > n {
            break;
        }
        q = next;
    }
    q
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn checked_lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// `x mod n` into `[0, n)` for a signed value.
pub fn reduce_i128(x: i128, n: u64) -> u64 {
    x.rem_euclid(n as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_below_thirty() {
        let got: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(got, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn largest_power() {
        assert_eq!(largest_power_at_most(3, 1), 1);
        assert_eq!(largest_power_at_most(3, 3), 3);
        assert_eq!(largest_power_at_most(3, 8), 3);
        assert_eq!(largest_power_at_most(3, 9), 9);
        assert_eq!(largest_power_at_most(2, 7), 4);
    }
}
