//! Segmented prime sieve with an on-disk cache.
//!
//! The sieve stores one bit per odd number: bit set means composite. The
//! cache file layout is a little-endian header (magic "QNSV", version u32,
//! bound u64, FNV-1a checksum u64) followed by the bit words. A cache whose
//! bound covers the request is reused; anything unreadable, corrupt, or too
//! small is regenerated, and I/O failures silently fall back to an
//! in-memory sieve.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"QNSV";
const VERSION: u32 = 1;
const SEGMENT_ODDS: usize = 1 << 18;

/// Primes up to a fixed bound, odd composites materialised as a bitset.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    bound: u64,
    /// bit i stands for the odd number 2i+1; set means composite (bit 0,
    /// the number 1, is set)
    words: Vec<u64>,
}

/// Keep primes congruent to one of `residues` mod `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceFilter {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl CongruenceFilter {
    pub fn accepts(&self, n: u64) -> bool {
        self.residues
            .iter()
            .any(|&r| n % self.modulus == r % self.modulus)
    }
}

impl PrimeSieve {
    /// Sieve up to `bound`, consulting and refreshing the cache file if a
    /// path is given.
    pub fn new(bound: u64, cache_path: Option<&Path>) -> PrimeSieve {
        let bound = bound.max(2);
        if let Some(path) = cache_path {
            if let Some(sieve) = load_cache(path, bound) {
                return sieve;
            }
            let sieve = PrimeSieve::compute(bound);
            let _ = store_cache(path, &sieve); // best effort
            return sieve;
        }
        PrimeSieve::compute(bound)
    }

    /// Resolve the cache path from the environment when none is given:
    /// QUARTIC_NORMS_CACHE, else ~/.cache/quartic-norms/sieve.bin.
    pub fn with_default_cache(bound: u64) -> PrimeSieve {
        PrimeSieve::new(bound, default_cache_path().as_deref())
    }

    fn compute(bound: u64) -> PrimeSieve {
        let odd_count = (bound as usize).div_ceil(2);
        let mut words = vec![0u64; odd_count.div_ceil(64).max(1)];
        set_bit(&mut words, 0); // 1 is not prime

        // base primes up to sqrt(bound), by a plain odd sieve
        let root = (bound as f64).sqrt() as u64 + 1;
        let base_count = (root as usize).div_ceil(2);
        let mut base = vec![false; base_count.max(1)];
        let mut base_primes = Vec::new();
        for i in 1..base_count {
            if base[i] {
                continue;
            }
            let p = 2 * i as u64 + 1;
            base_primes.push(p);
            let mut m = (p * p - 1) / 2;
            while m < base_count as u64 {
                base[m as usize] = true;
                m += p;
            }
        }

        // cross off odd composites segment by segment; the odd multiples
        // of p sit at indices congruent to (p-1)/2 mod p
        let mut segment_start = 0u64;
        while segment_start < odd_count as u64 {
            let segment_end = (segment_start + SEGMENT_ODDS as u64).min(odd_count as u64);
            for &p in &base_primes {
                let target = (p - 1) / 2;
                let mut m = segment_start + (target + p - segment_start % p) % p;
                if m == target {
                    m += p; // the number p itself, not a composite
                }
                while m < segment_end {
                    set_bit(&mut words, m as usize);
                    m += p;
                }
            }
            segment_start = segment_end;
        }
        PrimeSieve { bound, words }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n == 2 {
            return true;
        }
        if n < 2 || n > self.bound || n.is_multiple_of(2) {
            return false;
        }
        !get_bit(&self.words, ((n - 1) / 2) as usize)
    }

    /// All primes up to the bound, ascending, optionally filtered by a
    /// congruence condition.
    pub fn primes(&self, filter: Option<CongruenceFilter>) -> PrimeStream<'_> {
        PrimeStream {
            sieve: self,
            next: 2,
            filter,
        }
    }
}

/// Ascending iterator over sieved primes.
pub struct PrimeStream<'a> {
    sieve: &'a PrimeSieve,
    next: u64,
    filter: Option<CongruenceFilter>,
}

impl Iterator for PrimeStream<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next <= self.sieve.bound {
            let n = self.next;
            self.next = if n == 2 { 3 } else { n + 2 };
            if self.sieve.is_prime(n) && self.filter.as_ref().is_none_or(|f| f.accepts(n)) {
                return Some(n);
            }
        }
        None
    }
}

#[inline]
fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

#[inline]
fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] & (1 << (i % 64)) != 0
}

fn checksum(words: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

fn load_cache(path: &Path, bound: u64) -> Option<PrimeSieve> {
    let mut file = fs::File::open(path).ok()?;
    let mut header = [0u8; 24];
    file.read_exact(&mut header).ok()?;
    if &header[0..4] != MAGIC {
        return None;
    }
    if u32::from_le_bytes(header[4..8].try_into().unwrap()) != VERSION {
        return None;
    }
    let stored_bound = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let stored_sum = u64::from_le_bytes(header[16..24].try_into().unwrap());
    if stored_bound < bound {
        return None;
    }
    let mut raw = Vec::new();
    file.read_to_end(&mut raw).ok()?;
    if raw.len() % 8 != 0 {
        return None;
    }
    let words: Vec<u64> = raw
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let odd_count = (stored_bound as usize).div_ceil(2);
    if words.len() != odd_count.div_ceil(64).max(1) || checksum(&words) != stored_sum {
        return None;
    }
    // the cache may cover more than requested; serve exactly the request
    Some(PrimeSieve { bound, words })
}

fn store_cache(path: &Path, sieve: &PrimeSieve) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = Vec::with_capacity(24 + sieve.words.len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&sieve.bound.to_le_bytes());
    out.extend_from_slice(&checksum(&sieve.words).to_le_bytes());
    for w in &sieve.words {
        out.extend_from_slice(&w.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    let mut file = fs::File::create(&tmp)?;
    file.write_all(&out)?;
    file.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Cache location from QUARTIC_NORMS_CACHE, else ~/.cache/quartic-norms/.
pub fn default_cache_path() -> Option<PathBuf> {
    if let Ok(path) = std::env::var("QUARTIC_NORMS_CACHE") {
        if path.is_empty() {
            return None; // explicit opt-out
        }
        return Some(PathBuf::from(path));
    }
    let home = std::env::var_os("HOME")?;
    Some(
        PathBuf::from(home)
            .join(".cache")
            .join("quartic-norms")
            .join("sieve.bin"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let sieve = PrimeSieve::new(20, None);
        let primes: Vec<u64> = sieve.primes(None).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn congruence_filters() {
        let sieve = PrimeSieve::new(50, None);
        let one_mod_8: Vec<u64> = PrimeSieve::new(20, None)
            .primes(Some(CongruenceFilter {
                modulus: 8,
                residues: vec![1],
            }))
            .collect();
        assert_eq!(one_mod_8, [17]);
        let pm3_mod_8: Vec<u64> = sieve
            .primes(Some(CongruenceFilter {
                modulus: 8,
                residues: vec![3, 5],
            }))
            .collect();
        assert_eq!(pm3_mod_8, [3, 5, 11, 13, 19, 29, 37, 43]);
    }

    #[test]
    fn agrees_with_miller_rabin() {
        let sieve = PrimeSieve::new(10_000, None);
        for n in 0..=10_000u64 {
            assert_eq!(sieve.is_prime(n), crate::arith::is_prime(n), "{n}");
        }
        assert_eq!(sieve.primes(None).count(), 1229);
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sieve.bin");

        let first = PrimeSieve::new(1000, Some(&path));
        assert!(path.exists());
        let reloaded = PrimeSieve::new(1000, Some(&path));
        assert_eq!(first.words, reloaded.words);

        // a larger request regenerates; a smaller one reuses the file but
        // serves exactly the requested bound
        let bigger = PrimeSieve::new(5000, Some(&path));
        assert_eq!(bigger.bound(), 5000);
        let reused = PrimeSieve::new(100, Some(&path));
        assert_eq!(reused.bound(), 100);
        assert_eq!(reused.primes(None).last(), Some(97));
        assert!(!reused.is_prime(4999)); // beyond the requested bound

        // flip a payload byte: checksum must reject, sieve still correct
        let mut bytes = fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0xff;
        fs::write(&path, &bytes).unwrap();
        let recovered = PrimeSieve::new(1000, Some(&path));
        assert_eq!(
            recovered.primes(None).collect::<Vec<_>>(),
            PrimeSieve::new(1000, None).primes(None).collect::<Vec<_>>()
        );

        // unreadable path: falls back to recomputation
        let missing = dir.path().join("no-such-dir-x/y/z.bin");
        let fallback = PrimeSieve::new(200, Some(&missing));
        assert!(fallback.is_prime(199));
    }
}
