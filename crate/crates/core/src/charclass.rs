//! Mod-2 characteristic classes of `kγ ⊕ εˡ` over RPⁿ and the
//! Radon–Hurwitz function.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Element of `Z/2[a] / (a^(n+1))`, coefficients packed 64 per word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedZ2Poly {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    n / 64 + 1
}

impl TruncatedZ2Poly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn one(n: usize) -> Self {
        let mut p = Self::zero(n);
        p.words[0] = 1;
        p
    }

    /// `1 + a`.
    pub fn one_plus_a(n: usize) -> Self {
        let mut p = Self::one(n);
        p.set(1, true);
        p
    }

    /// From coefficients `c_0, c_1, …`; anything past degree `n` is dropped.
    pub fn from_bits(n: usize, bits: &[bool]) -> Self {
        let mut p = Self::zero(n);
        for (i, &b) in bits.iter().enumerate().take(n + 1) {
            p.set(i, b);
        }
        p
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, i: usize) -> bool {
        i <= self.n && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, value: bool) {
        if i > self.n {
            return;
        }
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..=self.n).map(|i| self.coeff(i)).collect()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.n)
    }

    /// Clears bits above degree `n` in the last word.
    fn mask_top(&mut self) {
        let used = self.n % 64 + 1;
        if used < 64 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << used) - 1;
        }
    }

    /// XORs `other << shift` into `self`, truncating.
    fn xor_shifted(&mut self, other: &Self, shift: usize) {
        let (ws, bs) = (shift / 64, shift % 64);
        for (k, &w) in other.words.iter().enumerate() {
            let lo = k + ws;
            if lo >= self.words.len() {
                break;
            }
            self.words[lo] ^= w << bs;
            if bs > 0 && lo + 1 < self.words.len() {
                self.words[lo + 1] ^= w >> (64 - bs);
            }
        }
        self.mask_top();
    }
}

impl fmt::Debug for TruncatedZ2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} mod a^{}", self.n + 1)
    }
}

impl fmt::Display for TruncatedZ2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = (0..=self.n)
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Carryless product, truncated at degree `n`.
pub fn z2_multiply(p: &TruncatedZ2Poly, q: &TruncatedZ2Poly) -> Result<TruncatedZ2Poly> {
    if p.n != q.n {
        return Err(Error::Dimension(format!(
            "truncations a^{} and a^{} differ",
            p.n + 1,
            q.n + 1
        )));
    }
    let mut out = TruncatedZ2Poly::zero(p.n);
    for i in (0..=p.n).filter(|&i| p.coeff(i)) {
        out.xor_shifted(q, i);
    }
    Ok(out)
}

/// Total Stiefel–Whitney class `(1 + a)^k` of `kγ ⊕ εˡ` over RPⁿ; the
/// trivial summands contribute 1 whatever `l` is.
pub fn total_sw_class(k: u64, _l: u64, n: usize) -> Result<TruncatedZ2Poly> {
    if n < 1 {
        return Err(Error::Parameter("RP^n needs n >= 1".into()));
    }
    let mut base = TruncatedZ2Poly::one_plus_a(n);
    let mut acc = TruncatedZ2Poly::one(n);
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = z2_multiply(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = z2_multiply(&base, &base)?;
        }
    }
    Ok(acc)
}

/// Whether `w(kγ) = 1` over RPⁿ.
pub fn is_sw_trivial(k: u64, n: usize) -> Result<bool> {
    Ok(total_sw_class(k, 0, n)?.is_one())
}

/// `n = 2^b (2m + 1)` with `b = c + 4d` and `0 <= c < 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RadonHurwitzDecomposition {
    pub n: u64,
    pub b: u32,
    pub m: u64,
    pub c: u32,
    pub d: u32,
}

/// `ρ(n) = 2^c + 8d`.
pub fn radon_hurwitz(n: u64) -> Result<(u64, RadonHurwitzDecomposition)> {
    if n < 1 {
        return Err(Error::Parameter("Radon-Hurwitz needs n >= 1".into()));
    }
    let b = n.trailing_zeros();
    let m = (n >> b) / 2;
    let (c, d) = (b % 4, b / 4);
    let rho = (1u64 << c) + 8 * u64::from(d);
    Ok((rho, RadonHurwitzDecomposition { n, b, m, c, d }))
}

/// Writes the triviality table: rows `k = 1..=max_k`, columns `n = 1..=max_n`.
pub fn write_sw_table<W: Write>(out: W, max_k: u64, max_n: usize) -> Result<()> {
    let io = |e: csv::Error| Error::Input(format!("csv output: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_string()];
    header.extend((1..=max_n).map(|n| format!("n={n}")));
    w.write_record(&header).map_err(io)?;
    for k in 1..=max_k {
        let mut row = vec![k.to_string()];
        for n in 1..=max_n {
            row.push(
                if is_sw_trivial(k, n)? {
                    "trivial"
                } else {
                    "obstructed"
                }
                .to_string(),
            );
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Input(format!("csv output: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(n: usize, bits: &[u8]) -> TruncatedZ2Poly {
        TruncatedZ2Poly::from_bits(n, &bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn squares_of_one_plus_a() {
        let p = TruncatedZ2Poly::one_plus_a(1);
        assert!(z2_multiply(&p, &p).unwrap().is_one());
        let p = TruncatedZ2Poly::one_plus_a(2);
        assert_eq!(z2_multiply(&p, &p).unwrap(), poly(2, &[1, 0, 1]));
        assert!(z2_multiply(&p, &TruncatedZ2Poly::one(3)).is_err());
    }

    #[test]
    fn stiefel_whitney_examples() {
        for k in [1, 3, 5, 7, 99] {
            assert_eq!(
                total_sw_class(k, 0, 1).unwrap(),
                TruncatedZ2Poly::one_plus_a(1)
            );
            assert!(!is_sw_trivial(k, 1).unwrap());
        }
        for k in [2, 6, 10, 14] {
            assert_eq!(total_sw_class(k, 3, 2).unwrap(), poly(2, &[1, 0, 1]));
        }
        assert!(total_sw_class(4, 0, 2).unwrap().is_one());
        assert!(!is_sw_trivial(3, 1).unwrap());
        assert!(!is_sw_trivial(6, 2).unwrap());
        assert!(is_sw_trivial(4, 2).unwrap());
        assert!(total_sw_class(1, 0, 0).is_err());
    }

    #[test]
    fn large_exponent_and_wide_truncation() {
        // (1 + a)^(2^31) = 1 + a^(2^31), invisible below that degree
        assert!(is_sw_trivial(1 << 31, 200).unwrap());
        // (1 + a)^128 = 1 + a^128 crosses a word boundary
        assert_eq!(
            total_sw_class(128, 0, 130)
                .unwrap()
                .bits()
                .iter()
                .filter(|&&b| b)
                .count(),
            2
        );
        assert!(total_sw_class(128, 0, 130).unwrap().coeff(128));
    }

    #[test]
    fn radon_hurwitz_examples() {
        for n in [1, 3, 5, 7, 101] {
            assert_eq!(radon_hurwitz(n).unwrap().0, 1);
        }
        for n in [2, 6, 10, 14] {
            let (rho, dec) = radon_hurwitz(n).unwrap();
            assert_eq!(rho, 2);
            assert_eq!((dec.b, dec.c, dec.d), (1, 1, 0));
        }
        let (rho, dec) = radon_hurwitz(16).unwrap();
        assert_eq!(rho, 9);
        assert_eq!((dec.b, dec.m, dec.c, dec.d), (4, 0, 0, 1));
        assert_eq!(radon_hurwitz(4).unwrap().0, 4);
        assert_eq!(radon_hurwitz(8).unwrap().0, 8);
        assert!(radon_hurwitz(0).is_err());
    }

    #[test]
    fn table_csv() {
        let mut buf = Vec::new();
        write_sw_table(&mut buf, 4, 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,n=1,n=2");
        assert_eq!(lines[2], "2,trivial,obstructed");
        assert_eq!(lines[4], "4,trivial,trivial");
    }

    #[test]
    fn display() {
        assert_eq!(poly(3, &[1, 0, 1, 1]).to_string(), "1 + a^2 + a^3");
        assert_eq!(TruncatedZ2Poly::zero(2).to_string(), "0");
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = TruncatedZ2Poly> {
        proptest::collection::vec(any::<bool>(), n + 1)
            .prop_map(move |b| TruncatedZ2Poly::from_bits(n, &b))
    }

    proptest! {
        #[test]
        fn ring_axioms((p, q, r) in (1usize..150).prop_flat_map(|n| (arb_poly(n), arb_poly(n), arb_poly(n)))) {
            let n = p.truncation();
            prop_assert_eq!(z2_multiply(&p, &q).unwrap(), z2_multiply(&q, &p).unwrap());
            let left = z2_multiply(&z2_multiply(&p, &q).unwrap(), &r).unwrap();
            let right = z2_multiply(&p, &z2_multiply(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(z2_multiply(&p, &TruncatedZ2Poly::one(n)).unwrap(), p);
        }

        #[test]
        fn product_matches_naive_convolution((p, q) in (1usize..150).prop_flat_map(|n| (arb_poly(n), arb_poly(n)))) {
            let n = p.truncation();
            let expected: Vec<bool> = (0..=n)
                .map(|d| (0..=d).filter(|&i| p.coeff(i) && q.coeff(d - i)).count() % 2 == 1)
                .collect();
            prop_assert_eq!(z2_multiply(&p, &q).unwrap().bits(), expected);
        }
    }
}
