//! Pauli strings in the symplectic bit representation.
//!
//! A string on `n` qubits is a pair of bit vectors `(x, z)` plus a phase
//! exponent `k` (mod 4), representing `i^k * prod_q P_q` where the per-qubit
//! factor is `I` for bits `(0,0)`, `X` for `(1,0)`, `Y` for `(1,1)` and `Z`
//! for `(0,1)`. The project-wide convention is `Y = i * X * Z`, which makes
//! every phase-0 string Hermitian with eigenvalues +/-1.
//!
//! Products and commutation checks are pure bit arithmetic:
//! two strings commute exactly when `popcount((x1 & z2) ^ (z1 & x2))` is even.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix used by all oracle-side checks.
pub type DenseOperator<R> = DMatrix<Complex<R>>;

/// Default cap on dense expansion width; 2^12 x 2^12 is the largest matrix
/// the verification oracle will build.
pub const DEFAULT_DENSE_CAP: usize = 12;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(n_qubits: usize) -> usize {
    n_qubits.div_ceil(WORD_BITS)
}

#[inline]
fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Bit-pattern key (x, z) of a string with the phase stripped; used as the
/// map key in symbolic expansions, where phases fold into the coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliKey {
    pub x_bits: Vec<u64>,
    pub z_bits: Vec<u64>,
}

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Pauli string with phase tracking.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_bits: Vec<u64>,
    z_bits: Vec<u64>,
    phase_exp: u8,
}

impl PauliString {
    /// Identity on `n_qubits` qubits (all bits clear, phase 0).
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1, "a Pauli string needs at least one qubit");
        let w = words_for(n_qubits);
        PauliString { n_qubits, x_bits: vec![0; w], z_bits: vec![0; w], phase_exp: 0 }
    }

    /// String with the given single-qubit factors; duplicate qubits are rejected.
    pub fn from_factors(n_qubits: usize, factors: &[(Axis, usize)]) -> Result<Self> {
        let mut p = PauliString::identity(n_qubits);
        for &(axis, q) in factors {
            if q >= n_qubits {
                return Err(Error::Domain(format!(
                    "qubit index {q} out of range for {n_qubits} qubits"
                )));
            }
            if p.x_bit(q) || p.z_bit(q) {
                return Err(Error::Domain(format!("duplicate factor on qubit {q}")));
            }
            let (x, z) = match axis {
                Axis::X => (true, false),
                Axis::Y => (true, true),
                Axis::Z => (false, true),
            };
            p.set_bits(q, x, z);
        }
        Ok(p)
    }

    /// Raw constructor from bit patterns (phase 0).
    pub fn from_key(n_qubits: usize, key: &PauliKey) -> Self {
        debug_assert_eq!(key.x_bits.len(), words_for(n_qubits));
        PauliString {
            n_qubits,
            x_bits: key.x_bits.clone(),
            z_bits: key.z_bits.clone(),
            phase_exp: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    /// Same operator with the phase exponent forced to zero.
    pub fn with_phase_zero(&self) -> Self {
        let mut p = self.clone();
        p.phase_exp = 0;
        p
    }

    #[inline]
    fn x_bit(&self, q: usize) -> bool {
        self.x_bits[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
    }

    #[inline]
    fn z_bit(&self, q: usize) -> bool {
        self.z_bits[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
    }

    fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / WORD_BITS, q % WORD_BITS);
        if x {
            self.x_bits[w] |= 1 << b;
        } else {
            self.x_bits[w] &= !(1 << b);
        }
        if z {
            self.z_bits[w] |= 1 << b;
        } else {
            self.z_bits[w] &= !(1 << b);
        }
    }

    /// Per-qubit factor.
    pub fn factor(&self, q: usize) -> Option<Axis> {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    /// Number of non-identity single-qubit factors.
    pub fn weight(&self) -> usize {
        self.x_bits
            .iter()
            .zip(&self.z_bits)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// True when the bit patterns are all-identity and the phase is 0.
    pub fn is_identity(&self) -> bool {
        self.phase_exp == 0 && self.is_identity_pattern()
    }

    /// True when the bit patterns are all-identity (any phase).
    pub fn is_identity_pattern(&self) -> bool {
        self.x_bits.iter().all(|&w| w == 0) && self.z_bits.iter().all(|&w| w == 0)
    }

    pub fn key(&self) -> PauliKey {
        PauliKey { x_bits: self.x_bits.clone(), z_bits: self.z_bits.clone() }
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::WidthMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(())
    }

    /// Exact product with phase bookkeeping.
    ///
    /// Writing each phase-0 string as `i^{|x & z|} X^x Z^z`, the product picks
    /// up `(-1)^{|z1 & x2|}` from commuting `Z^{z1}` past `X^{x2}`, and the
    /// result is renormalized to the phase-0 form of `(x1^x2, z1^z2)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let w = self.x_bits.len();
        let mut x3 = vec![0u64; w];
        let mut z3 = vec![0u64; w];
        for i in 0..w {
            x3[i] = self.x_bits[i] ^ other.x_bits[i];
            z3[i] = self.z_bits[i] ^ other.z_bits[i];
        }
        let y1 = and_popcount(&self.x_bits, &self.z_bits) as i64;
        let y2 = and_popcount(&other.x_bits, &other.z_bits) as i64;
        let anti = 2 * and_popcount(&self.z_bits, &other.x_bits) as i64;
        let y3 = and_popcount(&x3, &z3) as i64;
        let phase = (self.phase_exp as i64 + other.phase_exp as i64 + y1 + y2 + anti - y3)
            .rem_euclid(4) as u8;
        Ok(PauliString { n_qubits: self.n_qubits, x_bits: x3, z_bits: z3, phase_exp: phase })
    }

    /// Commutation test via the symplectic form; phases are irrelevant.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_width(other)?;
        let s = and_popcount(&self.x_bits, &other.z_bits)
            + and_popcount(&self.z_bits, &other.x_bits);
        Ok(s.is_multiple_of(2))
    }

    /// Dense matrix. Basis convention: qubit 0 is the most significant index
    /// bit, so a string `P0 P1 ... P_{n-1}` maps to `kron(P0, P1, ..., P_{n-1})`.
    pub fn to_dense<R: Real>(&self, cap: usize) -> Result<DenseOperator<R>> {
        if self.n_qubits > cap {
            return Err(Error::DenseCap { n: self.n_qubits, cap });
        }
        let n = self.n_qubits;
        let dim = 1usize << n;
        // Remap qubit bits onto index bits (qubit q -> index bit n-1-q).
        let mut xmask = 0usize;
        let mut zmask = 0usize;
        for q in 0..n {
            if self.x_bit(q) {
                xmask |= 1 << (n - 1 - q);
            }
            if self.z_bit(q) {
                zmask |= 1 << (n - 1 - q);
            }
        }
        let y_count = and_popcount(&self.x_bits, &self.z_bits);
        let base = i_power::<R>((self.phase_exp as u32 + y_count) % 4);
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let row = col ^ xmask;
            let sign_flips = (col & zmask).count_ones() % 2;
            let amp = if sign_flips == 1 { -base } else { base };
            m[(row, col)] = amp;
        }
        Ok(m)
    }
}

/// `i^k` as a complex scalar.
pub fn i_power<R: Real>(k: u32) -> Complex<R> {
    match k % 4 {
        0 => Complex::new(R::one(), R::zero()),
        1 => Complex::new(R::zero(), R::one()),
        2 => Complex::new(-R::one(), R::zero()),
        _ => Complex::new(R::zero(), -R::one()),
    }
}

impl fmt::Display for PauliString {
    /// Factor form, e.g. `"X0 Z2"`; the identity prints as an empty string.
    /// A nonzero phase is rendered as a leading `i^k` marker.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.phase_exp != 0 {
            write!(f, "i^{}", self.phase_exp)?;
            first = false;
        }
        for q in 0..self.n_qubits {
            if let Some(axis) = self.factor(q) {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                let c = match axis {
                    Axis::X => 'X',
                    Axis::Y => 'Y',
                    Axis::Z => 'Z',
                };
                write!(f, "{c}{q}")?;
            }
        }
        Ok(())
    }
}

/// Parse a whitespace-separated factor list like `"X0 Y3 Z12"`. The width is
/// `1 + max index` (at least 1); use [`PauliString::from_factors`] to widen.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = parse_factors(s, 0)?;
        let n = factors.iter().map(|&(_, q)| q + 1).max().unwrap_or(1);
        PauliString::from_factors(n, &factors)
    }
}

/// Parse factor tokens, reporting `line` in errors.
pub(crate) fn parse_factors(s: &str, line: usize) -> Result<Vec<(Axis, usize)>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let mut chars = tok.chars();
        let axis = match chars.next() {
            Some('X') => Axis::X,
            Some('Y') => Axis::Y,
            Some('Z') => Axis::Z,
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("bad factor '{tok}': expected X|Y|Z followed by a qubit index"),
                })
            }
        };
        let idx: usize = chars.as_str().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad qubit index in factor '{tok}'"),
        })?;
        out.push((axis, idx));
    }
    Ok(out)
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
