//! Jordan-Wigner encoding of second-quantized fermionic integrals.
//!
//! Mode `p` maps to qubit `p` (occupied = `|1>`), with
//! `a_p = Z_0 .. Z_{p-1} (X_p + i Y_p)/2`. The Hamiltonian is
//!
//! `H = sum_{pq} h_pq a_p^ a_q + sum_{pqrs} h_pqrs a_p^ a_q^ a_r a_s`
//!
//! with real integrals satisfying `h_pq = h_qp` and `h_pqrs = h_srqp`.
//! Missing symmetry partners are implied; explicitly provided ones must agree
//! to 1e-12. The resulting Pauli expansion must come out real (Hermitian) to
//! within 1e-10 of its accumulated mass or the input is rejected.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::{Axis, PauliString};
use crate::scalar::{r64, Real};
use crate::symbolic::{PauliMap, SymbolicBudget, SYMBOLIC_DROP_TOL};

/// Plain-data integral tables.
///
/// `one_body` rows are `[p, q, value]` for `h_pq`; `two_body` rows are
/// `[p, q, r, s, value]` for `h_pqrs`. Repeated index tuples must agree (they
/// are not summed).
#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct FermionIntegrals {
    pub n_modes: usize,
    #[serde(default)]
    pub one_body: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub two_body: Vec<(usize, usize, usize, usize, f64)>,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// `a_p` (or `a_p^` with `dagger`) as a two-string coefficient map.
pub fn ladder<R: Real>(n_modes: usize, p: usize, dagger: bool) -> Result<PauliMap<R>> {
    if p >= n_modes {
        return Err(Error::Domain(format!("mode {p} out of range for {n_modes} modes")));
    }
    let mut factors: Vec<(Axis, usize)> = (0..p).map(|j| (Axis::Z, j)).collect();
    factors.push((Axis::X, p));
    let x_string = PauliString::from_factors(n_modes, &factors)?;
    *factors.last_mut().unwrap() = (Axis::Y, p);
    let y_string = PauliString::from_factors(n_modes, &factors)?;
    let half = r64::<R>(0.5);
    let mut m = PauliMap::new(n_modes);
    m.accumulate(&x_string, Complex::new(half, R::zero()));
    let im = if dagger { -half } else { half };
    m.accumulate(&y_string, Complex::new(R::zero(), im));
    Ok(m)
}

fn insert_checked<K: Ord + std::fmt::Debug>(
    map: &mut BTreeMap<K, f64>,
    key: K,
    value: f64,
) -> Result<()> {
    if let Some(existing) = map.get(&key) {
        if (existing - value).abs() > SYMMETRY_TOL {
            return Err(Error::Domain(format!(
                "integral {key:?} given twice with conflicting values {existing} and {value}"
            )));
        }
        return Ok(());
    }
    map.insert(key, value);
    Ok(())
}

pub fn jordan_wigner<R: Real>(
    ints: &FermionIntegrals,
    label: impl Into<String>,
) -> Result<Hamiltonian<R>> {
    let n = ints.n_modes;
    if n == 0 {
        return Err(Error::Domain("integrals need at least one mode".into()));
    }
    let mut one: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(p, q, v) in &ints.one_body {
        if p >= n || q >= n {
            return Err(Error::Domain(format!("one-body index ({p},{q}) out of range")));
        }
        insert_checked(&mut one, (p, q), v)?;
    }
    for (p, q) in one.keys().copied().collect::<Vec<_>>() {
        let v = one[&(p, q)];
        match one.get(&(q, p)) {
            Some(w) if (w - v).abs() > SYMMETRY_TOL => {
                return Err(Error::Domain(format!(
                    "one-body symmetry violated: h[{p},{q}] = {v} but h[{q},{p}] = {w}"
                )));
            }
            Some(_) => {}
            None => {
                one.insert((q, p), v);
            }
        }
    }
    let mut two: BTreeMap<(usize, usize, usize, usize), f64> = BTreeMap::new();
    for &(p, q, s, t, v) in &ints.two_body {
        if p >= n || q >= n || s >= n || t >= n {
            return Err(Error::Domain(format!(
                "two-body index ({p},{q},{s},{t}) out of range"
            )));
        }
        insert_checked(&mut two, (p, q, s, t), v)?;
    }
    for key in two.keys().copied().collect::<Vec<_>>() {
        let (p, q, s, t) = key;
        let v = two[&key];
        let partner = (t, s, q, p);
        match two.get(&partner) {
            Some(w) if (w - v).abs() > SYMMETRY_TOL => {
                return Err(Error::Domain(format!(
                    "two-body symmetry violated: h[{p},{q},{s},{t}] = {v} but h[{t},{s},{q},{p}] = {w}"
                )));
            }
            Some(_) => {}
            None => {
                two.insert(partner, v);
            }
        }
    }

    let budget = SymbolicBudget::default();
    let mut acc = PauliMap::new(n);
    for (&(p, q), &v) in &one {
        let m = ladder::<R>(n, p, true)?.mul_map(&ladder(n, q, false)?, &budget)?;
        acc.add_scaled(&m, Complex::new(r64(v), R::zero()));
    }
    for (&(p, q, s, t), &v) in &two {
        let m = ladder::<R>(n, p, true)?
            .mul_map(&ladder(n, q, true)?, &budget)?
            .mul_map(&ladder(n, s, false)?, &budget)?
            .mul_map(&ladder(n, t, false)?, &budget)?;
        acc.add_scaled(&m, Complex::new(r64(v), R::zero()));
    }
    let mass = acc.l1().max(R::one());
    acc.prune(r64::<R>(1e-14) * mass);
    let op = acc.into_real(r64::<R>(1e-10) * mass, r64(SYMBOLIC_DROP_TOL))?;
    Hamiltonian::from_terms(
        label,
        n,
        op.iter()
            .map(|(k, v)| (*v, PauliString::from_key(n, k)))
            .collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::kron;
    use crate::pauli::DenseOperator;

    fn dense_ladder(n: usize, p: usize, dagger: bool) -> DenseOperator<f64> {
        // annihilation |0><1| on qubit p, Z on earlier (higher-order) qubits
        let a = DenseOperator::<f64>::from_row_slice(2, 2, &[
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ]);
        let z = DenseOperator::<f64>::from_row_slice(2, 2, &[
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(-1.0, 0.0),
        ]);
        let id = DenseOperator::<f64>::identity(2, 2);
        let mut m = DenseOperator::<f64>::identity(1, 1);
        for j in 0..n {
            let factor = if j < p {
                &z
            } else if j == p {
                &a
            } else {
                &id
            };
            m = kron(&m, factor);
        }
        if dagger {
            m.adjoint()
        } else {
            m
        }
    }

    #[test]
    fn number_operator() {
        let ints = FermionIntegrals { n_modes: 1, one_body: vec![(0, 0, 1.0)], two_body: vec![] };
        let h: Hamiltonian<f64> = jordan_wigner(&ints, "n0").unwrap();
        // a^ a = (I - Z)/2
        assert_eq!(h.len(), 2);
        let dense = h.to_dense(4).unwrap();
        assert!((dense[(0, 0)].re - 0.0).abs() < 1e-14);
        assert!((dense[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hopping_term() {
        let ints = FermionIntegrals { n_modes: 2, one_body: vec![(0, 1, 1.0)], two_body: vec![] };
        let h: Hamiltonian<f64> = jordan_wigner(&ints, "hop").unwrap();
        // a0^ a1 + a1^ a0 = (X0 X1 + Y0 Y1)/2
        assert_eq!(h.len(), 2);
        for t in h.terms() {
            assert!((t.coefficient - 0.5).abs() < 1e-14);
            assert!(!t.negated);
            assert_eq!(t.operator.weight(), 2);
        }
    }

    #[test]
    fn density_density_interaction() {
        let ints = FermionIntegrals {
            n_modes: 2,
            one_body: vec![],
            two_body: vec![(0, 1, 1, 0, 1.0)],
        };
        let h: Hamiltonian<f64> = jordan_wigner(&ints, "nn").unwrap();
        // a0^ a1^ a1 a0 = n0 n1 = (I - Z0 - Z1 + Z0Z1)/4
        assert_eq!(h.len(), 4);
        let dense = h.to_dense(4).unwrap();
        for idx in 0..4 {
            let expect = if idx == 3 { 1.0 } else { 0.0 }; // both occupied
            assert!((dense[(idx, idx)].re - expect).abs() < 1e-13, "diag {idx}");
        }
    }

    #[test]
    fn matches_dense_ladder_oracle() {
        let ints = FermionIntegrals {
            n_modes: 3,
            one_body: vec![(0, 0, 0.7), (1, 1, -0.4), (0, 1, 0.3), (1, 2, -0.2), (2, 2, 0.9)],
            two_body: vec![(0, 1, 1, 0, 0.5), (0, 2, 2, 0, -0.25)],
        };
        let h: Hamiltonian<f64> = jordan_wigner(&ints, "rand").unwrap();
        let got = h.to_dense(8).unwrap();

        let mut expect = DenseOperator::<f64>::zeros(8, 8);
        let mut one = std::collections::BTreeMap::new();
        for &(p, q, v) in &ints.one_body {
            one.insert((p, q), v);
            one.entry((q, p)).or_insert(v);
        }
        for (&(p, q), &v) in &one {
            expect += dense_ladder(3, p, true) * dense_ladder(3, q, false) * Complex::new(v, 0.0);
        }
        let mut two = std::collections::BTreeMap::new();
        for &(p, q, s, t, v) in &ints.two_body {
            two.insert((p, q, s, t), v);
            two.entry((t, s, q, p)).or_insert(v);
        }
        for (&(p, q, s, t), &v) in &two {
            expect += dense_ladder(3, p, true)
                * dense_ladder(3, q, true)
                * dense_ladder(3, s, false)
                * dense_ladder(3, t, false)
                * Complex::new(v, 0.0);
        }
        assert!((got - expect).norm() < 1e-12);
    }

    #[test]
    fn symmetry_violations_rejected() {
        let bad = FermionIntegrals {
            n_modes: 2,
            one_body: vec![(0, 1, 1.0), (1, 0, 0.5)],
            two_body: vec![],
        };
        assert!(jordan_wigner::<f64>(&bad, "bad").is_err());
        let out_of_range = FermionIntegrals {
            n_modes: 2,
            one_body: vec![(0, 3, 1.0)],
            two_body: vec![],
        };
        assert!(jordan_wigner::<f64>(&out_of_range, "oor").is_err());
    }

    #[test]
    fn integrals_deserialize_with_defaults() {
        let ints: FermionIntegrals =
            serde_json::from_str(r#"{"n_modes":2,"one_body":[[0,1,1.0]]}"#).unwrap();
        assert_eq!(ints.n_modes, 2);
        assert_eq!(ints.one_body.len(), 1);
        assert!(ints.two_body.is_empty());
        let h: Hamiltonian<f64> = jordan_wigner(&ints, "json").unwrap();
        assert_eq!(h.len(), 2);
    }
}
