//! Pairing functions and the finite-set coding shared by every module.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Cantor pairing `(a+b)(a+b+1)/2 + b`.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a + b;
    s * (s + 1) / 2 + b
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    // w = floor((sqrt(8z+1)-1)/2), corrected for float error
    let mut w = ((((8 * z as u128 + 1) as f64).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let t = w * (w + 1) / 2;
    let b = z - t;
    (w - b, b)
}

pub(crate) fn pair128(a: u128, b: u128) -> u128 {
    let s = a.checked_add(b).expect("pairing overflow");
    s.checked_mul(s + 1).expect("pairing overflow") / 2 + b
}

/// Length-prefixed iterated pairing of a tuple: `pair(len, fold)` where the
/// fold pairs the head with the code of the tail.
pub fn seq_code(items: &[u64]) -> u128 {
    fn fold(items: &[u64]) -> u128 {
        match items {
            [] => 0,
            [a] => *a as u128,
            [a, rest @ ..] => pair128(*a as u128, fold(rest)),
        }
    }
    pair128(items.len() as u128, fold(items))
}

/// Bijection `ω → ω^k` by iterated unpairing. Returns `None` for `k = 0`
/// unless `code = 0`.
pub fn decode_tuple(code: u64, k: usize) -> Option<Vec<u64>> {
    match k {
        0 => (code == 0).then(Vec::new),
        1 => Some(vec![code]),
        _ => {
            let (a, rest) = unpair(code);
            let mut out = vec![a];
            out.extend(decode_tuple(rest, k - 1)?);
            Some(out)
        }
    }
}

/// Inverse of [`decode_tuple`].
pub fn encode_tuple(items: &[u64]) -> u64 {
    match items {
        [] => 0,
        [a] => *a,
        [a, rest @ ..] => pair(*a, encode_tuple(rest)),
    }
}

/// A finite subset of ω, `D_v` for the code `v = Σ 2^i`.
///
/// Stored as a sorted set so codes above 64 bits stay representable; the
/// binary code is available whenever it fits.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "FiniteSetRepr", into = "FiniteSetRepr")]
pub struct FiniteSet(BTreeSet<u64>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FiniteSetRepr {
    Code(u64),
    Elements(Vec<u64>),
}

impl From<FiniteSetRepr> for FiniteSet {
    fn from(r: FiniteSetRepr) -> Self {
        match r {
            FiniteSetRepr::Code(v) => FiniteSet::from_code(v),
            FiniteSetRepr::Elements(xs) => xs.into_iter().collect(),
        }
    }
}

impl From<FiniteSet> for FiniteSetRepr {
    fn from(s: FiniteSet) -> Self {
        FiniteSetRepr::Elements(s.0.into_iter().collect())
    }
}

impl FiniteSet {
    pub fn empty() -> Self {
        FiniteSet(BTreeSet::new())
    }

    pub fn from_code(v: u64) -> Self {
        (0..64).filter(|i| v >> i & 1 == 1).collect()
    }

    /// The canonical code, if every element is below 64.
    pub fn code(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, &i| (i < 64).then(|| acc | 1 << i))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.contains(&x)
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<u64> for FiniteSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        FiniteSet(iter.into_iter().collect())
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// FNV-1a, used for short deterministic stream labels and fingerprints.
#[derive(Clone, Copy)]
pub struct Fnv(u64);

impl Fnv {
    pub fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    pub fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
    pub fn write_u64(&mut self, x: u64) {
        self.write(&x.to_le_bytes());
    }
    pub fn finish(self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pairing_small_values() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 1);
        assert_eq!(pair(0, 1), 2);
        assert_eq!(pair(2, 0), 3);
        assert_eq!(unpair(4), (1, 1));
    }

    #[test]
    fn finite_set_code() {
        let s = FiniteSet::from_code(0b1010);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(s.code(), Some(10));
        assert_eq!(FiniteSet::from_iter([70]).code(), None);
    }

    #[test]
    fn tuple_decoding_is_a_bijection_on_prefix() {
        for k in 1..4 {
            for c in 0..500 {
                let t = decode_tuple(c, k).unwrap();
                assert_eq!(t.len(), k);
                assert_eq!(encode_tuple(&t), c);
            }
        }
        assert_eq!(decode_tuple(0, 0), Some(vec![]));
        assert_eq!(decode_tuple(3, 0), None);
    }

    proptest! {
        #[test]
        fn unpair_inverts_pair(a in 0u64..1_000_000, b in 0u64..1_000_000) {
            prop_assert_eq!(unpair(pair(a, b)), (a, b));
        }
    }
}
