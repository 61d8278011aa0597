//! Arithmetic in `F_2[z]` and in the binary fields `GF(2^W)`.
//!
//! Polynomials store the coefficient of `z^i` at bit `i`. Field elements of
//! `GF(2^W)` are `W`-bit words holding the coefficients of their canonical
//! representative modulo an irreducible degree-`W` modulus.

use std::fmt;
use std::str::FromStr;

use crate::cost::OpCounts;
use crate::error::{Error, Result};

/// A polynomial over `F_2`, stored little-endian in 64-bit limbs with no
/// trailing zero limbs.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    limbs: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly::from_u64(1)
    }

    pub fn from_u64(v: u64) -> Self {
        Gf2Poly::from_limbs(vec![v])
    }

    pub fn from_u128(v: u128) -> Self {
        Gf2Poly::from_limbs(vec![v as u64, (v >> 64) as u64])
    }

    pub fn from_limbs(mut limbs: Vec<u64>) -> Self {
        while limbs.last() == Some(&0) {
            limbs.pop();
        }
        Gf2Poly { limbs }
    }

    /// Builds `sum z^e` over the given exponents.
    pub fn from_exponents(exps: &[u32]) -> Self {
        let top = exps
            .iter()
            .copied()
            .max()
            .map_or(0, |e| e as usize / 64 + 1);
        let mut limbs = vec![0u64; top];
        for &e in exps {
            limbs[e as usize / 64] ^= 1 << (e % 64);
        }
        Gf2Poly::from_limbs(limbs)
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        let top = *self.limbs.last()?;
        Some((self.limbs.len() as u32 - 1) * 64 + 63 - top.leading_zeros())
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.limbs
            .get(i / 64)
            .is_some_and(|l| (l >> (i % 64)) & 1 == 1)
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0]),
            _ => None,
        }
    }

    pub fn to_u128(&self) -> Option<u128> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0] as u128),
            2 => Some(self.limbs[0] as u128 | (self.limbs[1] as u128) << 64),
            _ => None,
        }
    }

    /// Sum in `F_2[z]` (coefficient-wise XOR).
    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let n = self.limbs.len().max(other.limbs.len());
        let limbs = (0..n)
            .map(|i| self.limbs.get(i).unwrap_or(&0) ^ other.limbs.get(i).unwrap_or(&0))
            .collect();
        Gf2Poly::from_limbs(limbs)
    }

    pub fn to_hex(&self) -> String {
        if self.limbs.is_empty() {
            return "0".to_string();
        }
        let mut s = format!("{:x}", self.limbs[self.limbs.len() - 1]);
        for l in self.limbs.iter().rev().skip(1) {
            s.push_str(&format!("{l:016x}"));
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<Gf2Poly> {
        let s = s.trim().trim_start_matches("0x");
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Parse(format!("bad hex polynomial {s:?}")));
        }
        let bytes = s.as_bytes();
        let mut limbs = Vec::new();
        let mut end = bytes.len();
        while end > 0 {
            let start = end.saturating_sub(16);
            let chunk = std::str::from_utf8(&bytes[start..end]).expect("ascii");
            limbs.push(u64::from_str_radix(chunk, 16).expect("validated hex"));
            end = start;
        }
        Ok(Gf2Poly::from_limbs(limbs))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly(0x{})", self.to_hex())
    }
}

/// Carry-less product of two words, by shift-and-XOR.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    let b = b as u128;
    let mut acc = 0u128;
    let mut a = a;
    let mut i = 0;
    while a != 0 {
        let tz = a.trailing_zeros();
        i += tz;
        acc ^= b << i;
        a >>= tz;
        a >>= 1;
        i += 1;
    }
    acc
}

/// Product in `F_2[z]`.
pub fn clmul(a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
    if a.is_zero() || b.is_zero() {
        return Gf2Poly::zero();
    }
    let mut out = vec![0u64; a.limbs.len() + b.limbs.len()];
    for (i, &x) in a.limbs.iter().enumerate() {
        for (j, &y) in b.limbs.iter().enumerate() {
            let p = clmul64(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
    Gf2Poly::from_limbs(out)
}

fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (w, b) = (shift / 64, shift % 64);
    for (i, &s) in src.iter().enumerate() {
        dst[i + w] ^= s << b;
        if b != 0 && i + w + 1 < dst.len() {
            dst[i + w + 1] ^= s >> (64 - b);
        }
    }
}

fn degree_of(limbs: &[u64]) -> Option<usize> {
    limbs
        .iter()
        .rposition(|&l| l != 0)
        .map(|i| i * 64 + 63 - limbs[i].leading_zeros() as usize)
}

/// Remainder of `a` modulo `m` in `F_2[z]`.
pub fn poly_mod(a: &Gf2Poly, m: &Gf2Poly) -> Result<Gf2Poly> {
    let dm = m.degree().ok_or(Error::ZeroModulus)? as usize;
    let mut r = a.limbs.clone();
    while let Some(dr) = degree_of(&r) {
        if dr < dm {
            break;
        }
        xor_shifted(&mut r, &m.limbs, dr - dm);
    }
    Ok(Gf2Poly::from_limbs(r))
}

pub fn poly_gcd(a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = poly_mod(&a, &b).expect("b is nonzero");
        a = b;
        b = r;
    }
    a
}

fn mul_mod(a: &Gf2Poly, b: &Gf2Poly, m: &Gf2Poly) -> Gf2Poly {
    poly_mod(&clmul(a, b), m).expect("modulus is nonzero")
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test: a degree-`d` polynomial `m` is irreducible
/// iff `z^(2^d) = z (mod m)` and `gcd(z^(2^(d/p)) - z, m) = 1` for every
/// prime `p | d`.
pub fn is_irreducible(m: &Gf2Poly) -> bool {
    let d = match m.degree() {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    let z = Gf2Poly::from_u64(2);
    let z_red = poly_mod(&z, m).expect("nonzero");
    // frob[i] = z^(2^i) mod m
    let mut frob = Vec::with_capacity(d as usize + 1);
    frob.push(z_red.clone());
    for i in 0..d as usize {
        let sq = mul_mod(&frob[i], &frob[i], m);
        frob.push(sq);
    }
    if frob[d as usize] != z_red {
        return false;
    }
    prime_factors(d).into_iter().all(|p| {
        let diff = frob[(d / p) as usize].add(&z_red);
        poly_gcd(&diff, m).degree() == Some(0)
    })
}

/// Word size and irreducible modulus of a binary field `GF(2^W)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    width: u32,
    modulus: Gf2Poly,
    modulus_word: u128,
}

/// Word sizes with a shipped modulus.
pub const SUPPORTED_WIDTHS: [u32; 4] = [8, 16, 32, 64];

impl FieldSpec {
    /// Validates that `modulus` has degree exactly `width` and is irreducible.
    pub fn new(width: u32, modulus: Gf2Poly) -> Result<FieldSpec> {
        if !(1..=64).contains(&width) {
            return Err(Error::InvalidField(format!("width {width} not in 1..=64")));
        }
        match modulus.degree() {
            None => return Err(Error::ZeroModulus),
            Some(d) if d != width => {
                return Err(Error::InvalidField(format!(
                    "modulus degree {d} does not match width {width}"
                )))
            }
            _ => {}
        }
        if !is_irreducible(&modulus) {
            return Err(Error::InvalidField(format!(
                "modulus 0x{} is reducible",
                modulus.to_hex()
            )));
        }
        let modulus_word = modulus.to_u128().expect("degree <= 64");
        Ok(FieldSpec {
            width,
            modulus,
            modulus_word,
        })
    }

    /// The shipped field for a supported word size:
    /// `z^8+z^4+z^3+z+1`, `z^16+z^5+z^3+z+1`, `z^32+z^7+z^3+z^2+1`,
    /// `z^64+z^4+z^3+z+1`.
    pub fn standard(width: u32) -> Result<FieldSpec> {
        let exps: &[u32] = match width {
            8 => &[8, 4, 3, 1, 0],
            16 => &[16, 5, 3, 1, 0],
            32 => &[32, 7, 3, 2, 0],
            64 => &[64, 4, 3, 1, 0],
            _ => {
                return Err(Error::InvalidField(format!(
                    "no shipped modulus for width {width}; supported: {SUPPORTED_WIDTHS:?}"
                )))
            }
        };
        FieldSpec::new(width, Gf2Poly::from_exponents(exps))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn modulus(&self) -> &Gf2Poly {
        &self.modulus
    }

    pub fn mask(&self) -> u64 {
        word_mask(self.width)
    }

    /// Product of two reduced words.
    #[inline]
    pub fn mul_words(&self, a: u64, b: u64) -> u64 {
        let w = self.width;
        let mut p = clmul64(a, b);
        let mut i = 127 - p.leading_zeros() as i32;
        while i >= w as i32 {
            if (p >> i) & 1 == 1 {
                p ^= self.modulus_word << (i as u32 - w);
            }
            i -= 1;
        }
        p as u64
    }

    /// Counted cost of one `mul_words`: a `W`-step shift-and-XOR product and a
    /// `W-1`-step reduction, each step a shift, mask and xor.
    pub fn mul_cost(&self) -> OpCounts {
        OpCounts::new(0, 3 * (2 * self.width as u64 - 1), 0)
    }

    pub fn elem(&self, word: u64) -> Result<GfElem<'_>> {
        GfElem::new(word, self)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({self})")
    }
}

/// Textual form `W:hex-modulus`, e.g. `8:11b`.
impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.width, self.modulus.to_hex())
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FieldSpec> {
        let (w, m) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("field spec {s:?} is not W:hex")))?;
        let width: u32 = w
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad field width {w:?}")))?;
        FieldSpec::new(width, Gf2Poly::from_hex(m)?)
    }
}

pub(crate) fn word_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// An element of `GF(2^W)` tied to its field.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GfElem<'f> {
    word: u64,
    field: &'f FieldSpec,
}

impl<'f> GfElem<'f> {
    pub fn new(word: u64, field: &'f FieldSpec) -> Result<GfElem<'f>> {
        if word & !field.mask() != 0 {
            return Err(Error::InvalidField(format!(
                "word {word:#x} exceeds {} bits",
                field.width
            )));
        }
        Ok(GfElem { word, field })
    }

    pub fn one(field: &'f FieldSpec) -> GfElem<'f> {
        GfElem { word: 1, field }
    }

    pub fn word(&self) -> u64 {
        self.word
    }

    pub fn field(&self) -> &'f FieldSpec {
        self.field
    }

    pub fn to_poly(&self) -> Gf2Poly {
        Gf2Poly::from_u64(self.word)
    }
}

impl fmt::Debug for GfElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GfElem({:#x} in GF(2^{}))", self.word, self.field.width)
    }
}

fn same_field(a: &FieldSpec, b: &FieldSpec) -> bool {
    std::ptr::eq(a, b) || a == b
}

/// Field product: carry-less multiply, then reduce by the modulus.
pub fn field_mul<'f>(a: GfElem<'f>, b: GfElem<'f>) -> Result<GfElem<'f>> {
    if !same_field(a.field, b.field) {
        return Err(Error::FieldMismatch);
    }
    Ok(GfElem {
        word: a.field.mul_words(a.word, b.word),
        field: a.field,
    })
}

/// `a^e` by square-and-multiply; `a^0 = 1`.
pub fn field_pow<'f>(a: GfElem<'f>, e: u64) -> GfElem<'f> {
    let field = a.field;
    let mut acc = 1u64;
    let mut base = a.word;
    let mut e = e;
    while e != 0 {
        if e & 1 == 1 {
            acc = field.mul_words(acc, base);
        }
        base = field.mul_words(base, base);
        e >>= 1;
    }
    GfElem { word: acc, field }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Oracles operate on plain coefficient vectors.
    fn bools(p: &Gf2Poly) -> Vec<bool> {
        let n = p.degree().map_or(0, |d| d as usize + 1);
        (0..n).map(|i| p.coeff(i)).collect()
    }

    fn from_bools(v: &[bool]) -> Gf2Poly {
        let exps: Vec<u32> = v
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect();
        Gf2Poly::from_exponents(&exps)
    }

    fn schoolbook_mul(a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
        let (x, y) = (bools(a), bools(b));
        let mut out = vec![false; x.len() + y.len()];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                out[i + j] ^= xi & yj;
            }
        }
        from_bools(&out)
    }

    fn long_division_rem(a: &Gf2Poly, m: &Gf2Poly) -> Gf2Poly {
        let mut r = bools(a);
        let mb = bools(m);
        let dm = mb.len() - 1;
        for top in (dm..r.len()).rev() {
            if r[top] {
                for (k, &c) in mb.iter().enumerate() {
                    r[top - dm + k] ^= c;
                }
            }
        }
        from_bools(&r)
    }

    fn brute_irreducible(m: &Gf2Poly) -> bool {
        let d = m.degree().unwrap();
        // any factor has degree <= d/2
        for f in 2u64..(1u64 << (d / 2 + 1)) {
            let f = Gf2Poly::from_u64(f);
            if long_division_rem(m, &f).is_zero() && f.degree().unwrap() < d {
                return false;
            }
        }
        true
    }

    fn rand_poly(rng: &mut ChaCha8Rng, max_deg: u32) -> Gf2Poly {
        let mut limbs: Vec<u64> = (0..(max_deg as usize / 64 + 1))
            .map(|_| rng.random())
            .collect();
        let top = max_deg as usize % 64;
        let last = limbs.len() - 1;
        if top < 63 {
            limbs[last] &= (1u64 << (top + 1)) - 1;
        }
        Gf2Poly::from_limbs(limbs)
    }

    #[test]
    fn clmul_examples() {
        let p = |v| Gf2Poly::from_u64(v);
        assert_eq!(clmul(&p(0b11), &p(0b11)), p(0b101));
        assert_eq!(clmul(&p(0b1), &p(0b1011)), p(0b1011));
        assert_eq!(clmul(&p(0), &p(0b1011)), Gf2Poly::zero());
    }

    #[test]
    fn clmul_matches_schoolbook_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let a = rand_poly(&mut rng, 64);
            let b = rand_poly(&mut rng, 64);
            let c = clmul(&a, &b);
            assert_eq!(c, schoolbook_mul(&a, &b));
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                assert_eq!(c.degree(), Some(da + db));
            }
        }
    }

    #[test]
    fn poly_mod_examples() {
        let p = |v| Gf2Poly::from_u64(v);
        assert_eq!(poly_mod(&p(0b101), &p(0b111)).unwrap(), p(0b010));
        assert_eq!(poly_mod(&p(0b011), &p(0b111)).unwrap(), p(0b011));
        assert_eq!(
            poly_mod(&p(0b011), &Gf2Poly::zero()),
            Err(Error::ZeroModulus)
        );
    }

    #[test]
    fn poly_mod_matches_long_division_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..300 {
            let a = rand_poly(&mut rng, 128);
            let bits = rng.random_range(1..=70);
            let m = rand_poly(&mut rng, bits);
            if m.is_zero() {
                continue;
            }
            let r = poly_mod(&a, &m).unwrap();
            assert_eq!(r, long_division_rem(&a, &m));
            assert!(r.degree().is_none_or(|d| d < m.degree().unwrap()));
        }
    }

    proptest! {
        #[test]
        fn clmul_ring_laws(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let (a, b, c) = (Gf2Poly::from_u64(a), Gf2Poly::from_u64(b), Gf2Poly::from_u64(c));
            prop_assert_eq!(clmul(&a, &b), clmul(&b, &a));
            prop_assert_eq!(clmul(&clmul(&a, &b), &c), clmul(&a, &clmul(&b, &c)));
            prop_assert_eq!(clmul(&a, &b.add(&c)), clmul(&a, &b).add(&clmul(&a, &c)));
        }

        #[test]
        fn hex_roundtrip(limbs in proptest::collection::vec(any::<u64>(), 0..4)) {
            let p = Gf2Poly::from_limbs(limbs);
            prop_assert_eq!(Gf2Poly::from_hex(&p.to_hex()).unwrap(), p);
        }
    }

    #[test]
    fn field_mul_examples() {
        let f2 = FieldSpec::new(2, Gf2Poly::from_u64(0b111)).unwrap();
        let z = f2.elem(0b10).unwrap();
        assert_eq!(field_mul(z, z).unwrap().word(), 0b11);
        let f8 = FieldSpec::standard(8).unwrap();
        let a = f8.elem(0x53).unwrap();
        assert_eq!(field_mul(a, GfElem::one(&f8)).unwrap(), a);
        // classic AES pair: 0x53 * 0xca = 1 in GF(2^8) mod 0x11b
        assert_eq!(field_mul(a, f8.elem(0xca).unwrap()).unwrap().word(), 1);
    }

    #[test]
    fn field_mul_mismatch() {
        let f8 = FieldSpec::standard(8).unwrap();
        let f16 = FieldSpec::standard(16).unwrap();
        assert_eq!(
            field_mul(f8.elem(3).unwrap(), f16.elem(3).unwrap()),
            Err(Error::FieldMismatch)
        );
        assert!(f8.elem(0x100).is_err());
    }

    #[test]
    fn gf256_full_table_matches_oracle() {
        let f8 = FieldSpec::standard(8).unwrap();
        let m = f8.modulus().clone();
        for a in 0..256u64 {
            for b in 0..256u64 {
                let want = long_division_rem(
                    &schoolbook_mul(&Gf2Poly::from_u64(a), &Gf2Poly::from_u64(b)),
                    &m,
                )
                .to_u64()
                .unwrap();
                let got = field_mul(f8.elem(a).unwrap(), f8.elem(b).unwrap()).unwrap();
                assert_eq!(got.word(), want, "{a} * {b}");
            }
        }
    }

    #[test]
    fn wide_fields_match_generic_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for w in SUPPORTED_WIDTHS {
            let f = FieldSpec::standard(w).unwrap();
            for _ in 0..200 {
                let a = rng.random::<u64>() & f.mask();
                let b = rng.random::<u64>() & f.mask();
                let want = poly_mod(
                    &clmul(&Gf2Poly::from_u64(a), &Gf2Poly::from_u64(b)),
                    f.modulus(),
                )
                .unwrap()
                .to_u64()
                .unwrap();
                assert_eq!(f.mul_words(a, b), want);
            }
        }
    }

    #[test]
    fn field_pow_examples() {
        let f2 = FieldSpec::new(2, Gf2Poly::from_u64(0b111)).unwrap();
        let z = f2.elem(0b10).unwrap();
        assert_eq!(field_pow(z, 0).word(), 1);
        assert_eq!(field_pow(z, 1), z);
        assert_eq!(field_pow(z, 3).word(), 1);
        // oracle: repeated multiplication
        let mut acc = GfElem::one(&f2);
        for e in 0..10 {
            assert_eq!(field_pow(z, e), acc);
            acc = field_mul(acc, z).unwrap();
        }
    }

    #[test]
    fn gf256_inverses_exhaustive() {
        let f8 = FieldSpec::standard(8).unwrap();
        for a in 1..256u64 {
            let a = f8.elem(a).unwrap();
            let inv = field_pow(a, (1 << 8) - 2);
            assert_eq!(field_mul(a, inv).unwrap().word(), 1);
        }
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&Gf2Poly::from_u64(0b111)));
        assert!(!is_irreducible(&Gf2Poly::from_u64(0b100)));
        assert!(is_irreducible(&Gf2Poly::from_u64(0b10)));
        assert!(is_irreducible(&Gf2Poly::from_u64(0b11)));
        assert!(!is_irreducible(&Gf2Poly::from_u64(1)));
        for w in SUPPORTED_WIDTHS {
            let f = FieldSpec::standard(w).unwrap();
            assert!(is_irreducible(f.modulus()), "width {w}");
        }
        assert!(FieldSpec::new(8, Gf2Poly::from_u64(0x101)).is_err());
    }

    #[test]
    fn irreducibility_matches_trial_division() {
        for m in 2u64..(1 << 11) {
            let p = Gf2Poly::from_u64(m);
            assert_eq!(is_irreducible(&p), brute_irreducible(&p), "{m:#b}");
        }
        for w in [8u32, 16] {
            let f = FieldSpec::standard(w).unwrap();
            assert!(brute_irreducible(f.modulus()));
        }
    }

    #[test]
    fn field_spec_text_form() {
        let f8 = FieldSpec::standard(8).unwrap();
        assert_eq!(f8.to_string(), "8:11b");
        assert_eq!("8:11b".parse::<FieldSpec>().unwrap(), f8);
        let f64 = FieldSpec::standard(64).unwrap();
        assert_eq!(f64.to_string(), "64:1000000000000001b");
        assert_eq!(f64.to_string().parse::<FieldSpec>().unwrap(), f64);
        assert!("8:101".parse::<FieldSpec>().is_err());
        assert!("x:11b".parse::<FieldSpec>().is_err());
        assert!("811b".parse::<FieldSpec>().is_err());
    }
}
