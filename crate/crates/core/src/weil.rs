//! Weil representation of `SL2(Z)` on the group algebra `C[D(M)]`.
//!
//! For a lattice of signature `(m, 2)`:
//!
//! ```text
//! ρ(T) v_γ = e(q(γ)) v_γ
//! ρ(S) v_γ = (√i)^(2−m) / √|D| · Σ_δ e(−b(γ, δ)) v_δ
//! ```
//!
//! with `e(x) = exp(2πi x)` and `√i = exp(iπ/4)`. Entries are double
//! precision; relations are checked entrywise against a tolerance.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::discriminant::DiscriminantGroup;
use crate::error::{precondition, Result};
use crate::lattice::IntegerLattice;

pub const DEFAULT_WEIL_CAP: u64 = 2000;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        ComplexMatrix { n, data }
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::identity(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { n, data: out }
    }

    /// `self · diag(d)`.
    pub fn mul_diag(&self, d: &[Complex64]) -> ComplexMatrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] *= d[j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_deviation(&self, other: &ComplexMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Rows of `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| {
                let z = self.get(i, j);
                [z.re, z.im]
            }).collect())
            .collect()
    }
}

/// `e(num / den)` with the fraction reduced mod 1 before conversion.
fn unit(num: u64, den: u64) -> Complex64 {
    let x = (num % den) as f64 / den as f64;
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

#[derive(Clone, Debug)]
pub struct WeilRepresentation {
    basis: Vec<String>,
    m: i64,
    s_matrix: ComplexMatrix,
    t_diag: Vec<Complex64>,
    level: u64,
    weight: BigRational,
}

/// `1 + m/2`, the weight of the Heegner generating series.
pub fn weight_of(m: i64) -> Result<BigRational> {
    if m < 2 || m % 2 != 0 {
        return Err(precondition(format!("weight requires an even m ≥ 2, got {m}")));
    }
    Ok(BigRational::from_integer(BigInt::from(1 + m / 2)))
}

/// The `m` of signature `(m, 2)` carried by a lattice of signature `(p, q)`:
/// `p − q + 2`, which only enters the Weil representation mod 8.
pub fn signature_parameter(lattice: &IntegerLattice) -> Result<i64> {
    let sig = lattice.signature();
    let m = sig.positive() as i64 - sig.negative() as i64 + 2;
    if m % 2 != 0 {
        return Err(precondition(format!(
            "signature ({}, {}) has odd difference; the Weil representation is then metaplectic",
            sig.positive(),
            sig.negative()
        )));
    }
    Ok(m)
}

pub fn build_weil_rep(group: &DiscriminantGroup, m: i64) -> Result<WeilRepresentation> {
    build_weil_rep_with_cap(group, m, DEFAULT_WEIL_CAP)
}

pub fn build_weil_rep_with_cap(group: &DiscriminantGroup, m: i64, cap: u64) -> Result<WeilRepresentation> {
    if m % 2 != 0 {
        return Err(precondition(format!("m must be even, got {m}")));
    }
    if group.order() > cap {
        return Err(crate::Error::CapExceeded {
            order: group.order().to_string(),
            cap,
        });
    }
    let weight = weight_of(m.max(2))?;
    let elements: Vec<_> = group.elements().collect();
    let n = elements.len();
    let level = group.level();

    let t_diag: Vec<Complex64> = elements.iter().map(|e| unit(group.q_num(e), level)).collect();

    let prefactor = Complex64::from_polar(1.0, PI * (2 - m) as f64 / 4.0) / (n as f64).sqrt();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for (col, gamma) in elements.iter().enumerate() {
        for (row, delta) in elements.iter().enumerate() {
            let b = group.b_num(gamma, delta);
            data[row * n + col] = prefactor * unit((level - b % level) % level, level);
        }
    }

    Ok(WeilRepresentation {
        basis: elements.iter().map(|e| e.key()).collect(),
        m,
        s_matrix: ComplexMatrix { n, data },
        t_diag,
        level,
        weight,
    })
}

/// Weil representation of a named or ad-hoc even lattice with even signature difference.
pub fn weil_rep_for_lattice(lattice: &IntegerLattice) -> Result<WeilRepresentation> {
    let m = signature_parameter(lattice)?;
    let group = DiscriminantGroup::new(lattice)?;
    build_weil_rep(&group, m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub relation: String,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub tolerance: f64,
    pub level: u64,
    pub checks: Vec<RelationCheck>,
    pub pass: bool,
}

impl WeilRepresentation {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn s_matrix(&self) -> &ComplexMatrix {
        &self.s_matrix
    }

    pub fn t_diagonal(&self) -> &[Complex64] {
        &self.t_diag
    }

    pub fn t_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::diagonal(&self.t_diag)
    }

    /// Deviation of `T^k` from the identity.
    pub fn t_power_deviation(&self, k: u64) -> f64 {
        self.t_diag
            .iter()
            .map(|z| (z.powu(k as u32) - Complex64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Smallest `k ≥ 1` with `T^k = Id` to tolerance.
    pub fn t_order(&self, tol: f64) -> u64 {
        (1..=self.level)
            .find(|&k| self.t_power_deviation(k) <= tol)
            .unwrap_or(self.level)
    }

    pub fn verify_sl2_relations(&self, tol: f64) -> RelationReport {
        let id = ComplexMatrix::identity(self.dim());
        let s = &self.s_matrix;
        let s2 = s.mul(s);
        let s4 = s2.mul(&s2);
        let st = s.mul_diag(&self.t_diag);
        let st3 = st.mul(&st).mul(&st);
        let unitary = s.mul(&s.adjoint());

        let mk = |relation: &str, dev: f64| RelationCheck {
            relation: relation.to_string(),
            max_deviation: dev,
            pass: dev <= tol,
        };
        let checks = vec![
            mk("S^4 = I", s4.max_deviation(&id)),
            mk("(ST)^3 = S^2", st3.max_deviation(&s2)),
            mk(&format!("T^{} = I", self.level), self.t_power_deviation(self.level)),
            mk("S S^* = I", unitary.max_deviation(&id)),
        ];
        let pass = checks.iter().all(|c| c.pass);
        RelationReport {
            tolerance: tol,
            level: self.level,
            checks,
            pass,
        }
    }
}

#[derive(Serialize)]
struct WeilDump<'a> {
    dim: usize,
    m: i64,
    level: u64,
    weight: String,
    basis: &'a [String],
    s_matrix: Vec<Vec<[f64; 2]>>,
    t_matrix: Vec<Vec<[f64; 2]>>,
}

impl Serialize for WeilRepresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeilDump {
            dim: self.dim(),
            m: self.m,
            level: self.level,
            weight: crate::matrix::rat_string(&self.weight),
            basis: &self.basis,
            s_matrix: self.s_matrix.to_pairs(),
            t_matrix: self.t_matrix().to_pairs(),
        }
        .serialize(s)
    }
}
