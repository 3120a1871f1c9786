//! Classical cryptography: a 30-symbol alphabet, the one-time pad, textbook
//! RSA, and recovering an RSA private key by factoring the modulus.
//!
//! None of this is secure. Keys are tiny and nothing is randomised.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::numtheory::{self, mod_pow, Natural};
use crate::shor;

/// Number of symbols in the alphabet.
pub const ALPHABET_SIZE: u8 = 30;

/// `A..Z` map to `0..=25`, then space, `?`, `,` and `.` take `26..=29`.
pub fn encode_char(c: char) -> Result<u8> {
    match c {
        'A'..='Z' => Ok(c as u8 - b'A'),
        ' ' => Ok(26),
        '?' => Ok(27),
        ',' => Ok(28),
        '.' => Ok(29),
        _ => Err(Error::UnsupportedCharacter(c)),
    }
}

pub fn decode_char(code: u8) -> Result<char> {
    match code {
        0..=25 => Ok((b'A' + code) as char),
        26 => Ok(' '),
        27 => Ok('?'),
        28 => Ok(','),
        29 => Ok('.'),
        _ => domain(format!("code {code} is outside the alphabet")),
    }
}

pub fn encode_text(text: &str) -> Result<Vec<u8>> {
    text.chars().map(encode_char).collect()
}

pub fn decode_text(codes: &[u8]) -> Result<String> {
    codes.iter().map(|&c| decode_char(c)).collect()
}

/// Two-digit rendering, space separated: `"18 07 00"`.
pub fn format_codes(codes: &[u8]) -> String {
    codes
        .iter()
        .map(|c| format!("{c:02}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses whitespace-separated codes.
pub fn parse_codes(s: &str) -> Result<Vec<u8>> {
    s.split_whitespace()
        .map(|tok| {
            let code: u8 = tok
                .parse()
                .map_err(|_| Error::Domain(format!("{tok:?} is not a symbol code")))?;
            decode_char(code)?;
            Ok(code)
        })
        .collect()
}

fn vernam(plain: &[u8], key: &[u8], combine: impl Fn(u8, u8) -> u8) -> Result<Vec<u8>> {
    if plain.len() != key.len() {
        return Err(Error::LengthMismatch {
            message: plain.len(),
            key: key.len(),
        });
    }
    plain
        .iter()
        .zip(key)
        .map(|(&p, &k)| {
            if p >= ALPHABET_SIZE || k >= ALPHABET_SIZE {
                return domain(format!("codes must be below {ALPHABET_SIZE}, got {p} and {k}"));
            }
            Ok(combine(p, k))
        })
        .collect()
}

/// `C_i = (P_i + k_i) mod 30`.
pub fn vernam_encrypt(plain: &[u8], key: &[u8]) -> Result<Vec<u8>> {
    vernam(plain, key, |p, k| (p + k) % ALPHABET_SIZE)
}

/// `P_i = (C_i - k_i) mod 30`.
pub fn vernam_decrypt(cipher: &[u8], key: &[u8]) -> Result<Vec<u8>> {
    vernam(cipher, key, |c, k| (c + ALPHABET_SIZE - k) % ALPHABET_SIZE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsaKeyPair {
    pub p: Natural,
    pub q: Natural,
    pub n: Natural,
    pub e: Natural,
    pub d: Natural,
}

impl RsaKeyPair {
    pub fn public(&self) -> (Natural, Natural) {
        (self.e, self.n)
    }

    pub fn phi(&self) -> Natural {
        (self.p - 1) * (self.q - 1)
    }
}

pub fn rsa_keygen(p: Natural, q: Natural, e: Natural) -> Result<RsaKeyPair> {
    for x in [p, q] {
        if x < 2 || !numtheory::is_prime(x)? {
            return Err(Error::NotPrime(x));
        }
    }
    if p == q {
        return Err(Error::PrimesNotDistinct(p));
    }
    let n = p
        .checked_mul(q)
        .ok_or_else(|| Error::Domain(format!("{p} * {q} overflows")))?;
    let phi = (p - 1) * (q - 1);
    if e < 2 || e >= phi.max(3) {
        return domain(format!("e = {e} must satisfy 1 < e < {phi}"));
    }
    let d = numtheory::mod_inverse(e, phi)?;
    Ok(RsaKeyPair { p, q, n, e, d })
}

/// Decimal digits per block for modulus `n`.
///
/// Whole symbols are packed when possible: the widest `2k` digits such that
/// the largest `k`-symbol block (`2929...29`) is still below `n`. Below that
/// (`n <= 29`) blocks are single digits.
pub fn block_digits(n: Natural) -> Result<usize> {
    let mut symbols = 0;
    let mut largest: u128 = 0;
    loop {
        let next = largest * 100 + 29;
        if next >= n as u128 {
            break;
        }
        largest = next;
        symbols += 1;
    }
    if symbols > 0 {
        return Ok(2 * symbols);
    }
    if n >= 10 {
        Ok(1)
    } else {
        domain(format!("modulus {n} is too small to carry a decimal digit"))
    }
}

/// Splits a message into plaintext blocks, padding with spaces to fill the
/// last one.
pub fn text_to_blocks(text: &str, n: Natural) -> Result<Vec<Natural>> {
    let width = block_digits(n)?;
    let mut codes = encode_text(text)?;
    let per_block = (width / 2).max(1);
    while codes.len() % per_block != 0 {
        codes.push(26);
    }
    let digits: Vec<u8> = codes.iter().flat_map(|c| [c / 10, c % 10]).collect();
    Ok(digits
        .chunks(width)
        .map(|chunk| chunk.iter().fold(0, |acc, &d| acc * 10 + d as Natural))
        .collect())
}

/// Inverse of [`text_to_blocks`]; trailing spaces are dropped.
pub fn blocks_to_text(blocks: &[Natural], n: Natural) -> Result<String> {
    let width = block_digits(n)?;
    let mut digits = String::with_capacity(blocks.len() * width);
    for &b in blocks {
        let s = format!("{b:0width$}");
        if s.len() != width {
            return domain(format!("block {b} has more than {width} digits"));
        }
        digits.push_str(&s);
    }
    if !digits.len().is_multiple_of(2) {
        return domain("odd number of digits in the decrypted message");
    }
    let codes = digits
        .as_bytes()
        .chunks(2)
        .map(|pair| (pair[0] - b'0') * 10 + (pair[1] - b'0'))
        .collect::<Vec<_>>();
    Ok(decode_text(&codes)?.trim_end_matches(' ').to_string())
}

/// `C = P^e mod n`, requiring `P < n`.
pub fn rsa_apply(block: Natural, exponent: Natural, n: Natural) -> Result<Natural> {
    if block >= n {
        return Err(Error::BlockOutOfRange { block, n });
    }
    mod_pow(block, exponent, n)
}

/// Encrypted blocks, rendered zero-padded to the block width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cryptogram {
    pub blocks: Vec<Natural>,
    pub width: usize,
}

impl fmt::Display for Cryptogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.width;
        let parts: Vec<String> = self.blocks.iter().map(|b| format!("{b:0w$}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Width used when rendering ciphertext blocks, which range over `0..n`.
pub fn cipher_width(n: Natural) -> usize {
    (n - 1).max(1).to_string().len()
}

pub fn rsa_encrypt(public: (Natural, Natural), text: &str) -> Result<Cryptogram> {
    let (e, n) = public;
    let blocks = text_to_blocks(text, n)?
        .into_iter()
        .map(|p| rsa_apply(p, e, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cryptogram {
        blocks,
        width: cipher_width(n),
    })
}

pub fn rsa_decrypt(d: Natural, n: Natural, blocks: &[Natural]) -> Result<String> {
    let plain = blocks
        .iter()
        .map(|&c| rsa_apply(c, d, n))
        .collect::<Result<Vec<_>>>()?;
    blocks_to_text(&plain, n)
}

/// Parses space-separated decimal blocks such as `"141072 087175"`.
pub fn parse_blocks(s: &str) -> Result<Vec<Natural>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse()
                .map_err(|_| Error::Domain(format!("{tok:?} is not a decimal block")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorBackend {
    QuantumSim { seed: u64, max_attempts: usize },
    Classical,
}

const PROBE: &str = "PROBE.";

/// Recovers the private exponent from a public key by factoring `n`, then
/// checks the result on a probe message.
pub fn break_rsa(public: (Natural, Natural), backend: FactorBackend) -> Result<RsaKeyPair> {
    let (e, n) = public;
    if n < 4 || numtheory::is_prime(n)? {
        return Err(Error::NotComposite(n));
    }
    let p = match backend {
        FactorBackend::Classical => numtheory::smallest_factor(n)?,
        FactorBackend::QuantumSim { seed, max_attempts } => {
            match shor::shor_factor(n, seed, max_attempts) {
                Ok(report) => report.factor,
                Err(Error::Capacity { requested, max }) => {
                    return domain(format!(
                        "factoring {n} needs {requested} qubits but the simulator holds {max}; \
                         use the classical backend"
                    ))
                }
                Err(err) => return Err(err),
            }
        }
    };
    let key = rsa_keygen(p, n / p, e)?;
    let probe = rsa_encrypt(key.public(), PROBE)?;
    if rsa_decrypt(key.d, n, &probe.blocks)? != PROBE {
        return domain(format!("recovered d = {} fails the probe", key.d));
    }
    Ok(key)
}
