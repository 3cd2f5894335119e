//! Pauli-sum Hamiltonians and the term-list text format.
//!
//! A Hamiltonian is `H = sum_l c_l P_l` with real nonzero `c_l` and pairwise
//! distinct phase-0 Pauli strings `P_l`. Internally each term stores the
//! magnitude `|c_l|` plus a sign bit: all bound formulas consume magnitudes
//! only, while operator-level constructions (dense oracles, plan unitaries)
//! reapply the sign.
//!
//! Text format, one term per line:
//!
//! ```text
//! # qubits: 4        (optional width header)
//! 0.25 X0 Z2         (coefficient then factors; empty factor list = identity)
//! -1.5e-3 Y1 Y3
//! ```
//!
//! `#` starts a comment. Duplicate operators merge by coefficient addition;
//! merged coefficients with |c| < 1e-14 are dropped.

use crate::error::{Error, Result};
use crate::pauli::{DenseOperator, PauliKey, PauliString};
use crate::scalar::{r64, Real};
use crate::summation::KahanSum;

/// Magnitude below which a merged coefficient is treated as zero.
pub const COEFF_DROP_TOL: f64 = 1e-14;

/// One Pauli term: positive magnitude, sign bit, phase-0 operator.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Term<R: Real> {
    pub coefficient: R,
    pub negated: bool,
    pub operator: PauliString,
}

impl<R: Real> Term<R> {
    /// Signed coefficient `c_l`.
    pub fn signed(&self) -> R {
        if self.negated {
            -self.coefficient
        } else {
            self.coefficient
        }
    }
}

/// Pauli-sum Hamiltonian with a sign ledger.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Hamiltonian<R: Real> {
    label: String,
    n_qubits: usize,
    terms: Vec<Term<R>>,
}

impl<R: Real> Hamiltonian<R> {
    /// Build from signed `(coefficient, operator)` pairs. Duplicate operators
    /// merge in input order; terms keep first-appearance order.
    pub fn from_terms(
        label: impl Into<String>,
        n_qubits: usize,
        entries: impl IntoIterator<Item = (R, PauliString)>,
    ) -> Result<Self> {
        let mut order: Vec<(PauliKey, PauliString)> = Vec::new();
        let mut sums: std::collections::HashMap<PauliKey, KahanSum<R>> =
            std::collections::HashMap::new();
        for (c, op) in entries {
            if op.n_qubits() != n_qubits {
                return Err(Error::WidthMismatch(op.n_qubits(), n_qubits));
            }
            if op.phase_exp() != 0 {
                return Err(Error::Domain(format!(
                    "term '{op}' carries a nonzero phase exponent"
                )));
            }
            let key = op.key();
            match sums.entry(key.clone()) {
                std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().add(c),
                std::collections::hash_map::Entry::Vacant(e) => {
                    let mut acc = KahanSum::new();
                    acc.add(c);
                    e.insert(acc);
                    order.push((key, op));
                }
            }
        }
        let drop = r64::<R>(COEFF_DROP_TOL);
        let mut terms = Vec::with_capacity(order.len());
        for (key, op) in order {
            let c = sums[&key].value();
            if c.abs() < drop {
                continue;
            }
            terms.push(Term { coefficient: c.abs(), negated: c < R::zero(), operator: op });
        }
        if terms.is_empty() {
            return Err(Error::EmptyHamiltonian);
        }
        Ok(Hamiltonian { label: label.into(), n_qubits, terms })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term<R>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient 1-norm `alpha = sum_l |c_l|`.
    pub fn alpha(&self) -> R {
        KahanSum::sum_iter(self.terms.iter().map(|t| t.coefficient))
    }

    /// `sqrt(sum_l c_l^2)`.
    pub fn beta_s(&self) -> R {
        KahanSum::sum_iter(self.terms.iter().map(|t| t.coefficient * t.coefficient)).sqrt()
    }

    /// Largest single-term magnitude.
    pub fn max_coefficient(&self) -> R {
        self.terms
            .iter()
            .map(|t| t.coefficient)
            .fold(R::zero(), |a, b| if b > a { b } else { a })
    }

    /// Largest Pauli weight over the terms.
    pub fn max_weight(&self) -> usize {
        self.terms.iter().map(|t| t.operator.weight()).max().unwrap_or(0)
    }

    /// Dense matrix `sum_l c_l P_l` (signed).
    pub fn to_dense(&self, cap: usize) -> Result<DenseOperator<R>> {
        if self.n_qubits > cap {
            return Err(Error::DenseCap { n: self.n_qubits, cap });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DenseOperator::<R>::zeros(dim, dim);
        for t in &self.terms {
            let p = t.operator.to_dense::<R>(cap)?;
            let c = num_complex::Complex::new(t.signed(), R::zero());
            m += p * c;
        }
        Ok(m)
    }

    /// Parse the term-list text format.
    pub fn parse(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut header_qubits: Option<usize> = None;
        let mut entries: Vec<(R, PauliString)> = Vec::new();
        let mut raw: Vec<(R, Vec<(crate::pauli::Axis, usize)>)> = Vec::new();
        let mut max_index: Option<usize> = None;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("qubits:") {
                    let n: usize = v.trim().parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad qubit count '{}'", v.trim()),
                    })?;
                    if n == 0 {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: "qubit count must be at least 1".into(),
                        });
                    }
                    header_qubits = Some(n);
                }
                continue;
            }
            let mut parts = trimmed.splitn(2, char::is_whitespace);
            let coeff_tok = parts.next().unwrap();
            let coeff: f64 = coeff_tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad coefficient '{coeff_tok}'"),
            })?;
            if !coeff.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("non-finite coefficient '{coeff_tok}'"),
                });
            }
            let factors = crate::pauli::parse_factors(parts.next().unwrap_or(""), lineno)?;
            let mut seen = std::collections::HashSet::new();
            for &(_, q) in &factors {
                if !seen.insert(q) {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("duplicate qubit {q} in term"),
                    });
                }
                max_index = Some(max_index.map_or(q, |m: usize| m.max(q)));
            }
            raw.push((r64(coeff), factors));
        }
        let needed = max_index.map_or(1, |m| m + 1);
        let n_qubits = match header_qubits {
            Some(n) if n < needed => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("header says {n} qubits but a factor uses qubit {}", needed - 1),
                })
            }
            Some(n) => n,
            None => needed,
        };
        for (c, factors) in raw {
            entries.push((c, PauliString::from_factors(n_qubits, &factors)?));
        }
        Self::from_terms(label, n_qubits, entries)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "hamiltonian".into());
        Self::parse(&text, label)
    }

    /// Emit the text format. Coefficients use the shortest round-trip float
    /// representation, so `parse(serialize(h))` reproduces the term multiset.
    pub fn serialize_text(&self) -> String {
        let mut out = format!("# qubits: {}\n", self.n_qubits);
        for t in &self.terms {
            let factors = t.operator.to_string();
            if factors.is_empty() {
                out.push_str(&format!("{}\n", t.signed()));
            } else {
                out.push_str(&format!("{} {}\n", t.signed(), factors));
            }
        }
        out
    }
}
