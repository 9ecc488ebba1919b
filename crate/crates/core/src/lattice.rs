//! Even integral lattices given by Gram matrices.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::matrix::{IntMatrix, RatMatrix};
use crate::snf::smith_normal_form;

/// Symmetric nondegenerate integer matrix of intersection numbers.
///
/// Evenness is not required here: labelling lattices of Gushel-Mukai
/// fourfolds have odd diagonal entries. [`IntegerLattice`] enforces it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GramMatrix(IntMatrix);

impl GramMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if m.determinant().is_zero() {
            return Err(Error::Singular);
        }
        Ok(GramMatrix(m))
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64_rows(rows)?)
    }

    pub fn rank(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.0[(i, j)]
    }

    pub fn determinant(&self) -> BigInt {
        self.0.determinant()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.0[(i, i)].is_even())
    }

    /// `x^T G y` for rational coordinate vectors.
    pub fn pair(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let n = self.rank();
        let mut acc = BigRational::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let mut row = BigRational::zero();
            for j in 0..n {
                let g = &self.0[(i, j)];
                if !g.is_zero() && !y[j].is_zero() {
                    row += &y[j] * g;
                }
            }
            acc += &x[i] * row;
        }
        acc
    }

    pub fn pair_int(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let n = self.rank();
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !y[j].is_zero() {
                    acc += &x[i] * &self.0[(i, j)] * &y[j];
                }
            }
        }
        acc
    }
}

impl fmt::Debug for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Identity of an ambient lattice, carried by dual vectors so that
/// mixing vectors from different lattices is detectable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeId(u64);

/// Signature as (positive, negative) inertia.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature(pub usize, pub usize);

impl Signature {
    pub fn positive(&self) -> usize {
        self.0
    }
    pub fn negative(&self) -> usize {
        self.1
    }
    pub fn swapped(self) -> Self {
        Signature(self.1, self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    name: Option<String>,
    gram: GramMatrix,
    signature: Signature,
}

impl IntegerLattice {
    /// An even lattice from its Gram matrix; the signature is computed.
    pub fn new(gram: GramMatrix) -> Result<Self> {
        if let Some(i) = (0..gram.rank()).find(|&i| gram.entry(i, i).is_odd()) {
            return Err(Error::NotEven(i));
        }
        let (p, q, z) = gram.matrix().to_rational().inertia();
        debug_assert_eq!(z, 0);
        Ok(IntegerLattice {
            name: None,
            gram,
            signature: Signature(p, q),
        })
    }

    /// Rebuild from a stored signature, rejecting it if it disagrees with the Gram matrix.
    pub fn with_signature(gram: GramMatrix, signature: Signature) -> Result<Self> {
        let l = Self::new(gram)?;
        if l.signature != signature {
            return Err(precondition(format!(
                "stored signature ({}, {}) does not match computed ({}, {})",
                signature.0, signature.1, l.signature.0, l.signature.1
            )));
        }
        Ok(l)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(GramMatrix::from_i64_rows(rows)?)
    }

    /// The rank-zero lattice.
    pub fn zero() -> Self {
        IntegerLattice {
            name: None,
            gram: GramMatrix(IntMatrix::zeros(0, 0)),
            signature: Signature(0, 0),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rank()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn id(&self) -> LatticeId {
        let mut h = DefaultHasher::new();
        self.gram.hash(&mut h);
        LatticeId(h.finish())
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    /// `|det|`, the order of the discriminant group.
    pub fn disc(&self) -> BigInt {
        self.determinant().abs()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn is_unimodular(&self) -> bool {
        self.disc().is_one()
    }

    pub fn direct_sum(&self, other: &IntegerLattice) -> IntegerLattice {
        let name = match (&self.name, &other.name) {
            (Some(a), Some(b)) => Some(format!("{a}+{b}")),
            _ => None,
        };
        IntegerLattice {
            name,
            gram: GramMatrix(self.gram.0.block_diag(&other.gram.0)),
            signature: Signature(
                self.signature.0 + other.signature.0,
                self.signature.1 + other.signature.1,
            ),
        }
    }

    /// `L(-1)`: negated form, swapped signature.
    pub fn twist(&self) -> IntegerLattice {
        IntegerLattice {
            name: self.name.as_ref().map(|n| format!("{n}(-1)")),
            gram: GramMatrix(self.gram.0.map(|x| -x)),
            signature: self.signature.swapped(),
        }
    }

    pub fn vector(&self, coords: Vec<BigRational>) -> Result<DualVector> {
        if coords.len() != self.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                found: coords.len(),
            });
        }
        Ok(DualVector {
            coords,
            lattice: self.id(),
        })
    }

    pub fn lattice_vector(&self, coords: &[BigInt]) -> Result<DualVector> {
        self.vector(
            coords
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    fn check_member(&self, v: &DualVector) -> Result<()> {
        if v.lattice != self.id() {
            return Err(Error::MixedLattices);
        }
        Ok(())
    }

    pub fn pair(&self, v: &DualVector, w: &DualVector) -> Result<BigRational> {
        self.check_member(v)?;
        self.check_member(w)?;
        Ok(self.gram.pair(&v.coords, &w.coords))
    }

    pub fn norm(&self, v: &DualVector) -> Result<BigRational> {
        self.pair(v, v)
    }

    /// Pairings of `v` against every basis vector: `G v`.
    pub fn pairing_vector(&self, v: &DualVector) -> Result<Vec<BigRational>> {
        self.check_member(v)?;
        self.gram.matrix().to_rational().mul_vec(&v.coords)
    }

    /// `v` lies in `M^∨` iff all its pairings with the basis are integral.
    pub fn in_dual(&self, v: &DualVector) -> Result<bool> {
        Ok(self.pairing_vector(v)?.iter().all(|x| x.is_integer()))
    }

    pub fn inverse_gram(&self) -> RatMatrix {
        self.gram
            .matrix()
            .to_rational()
            .inverse()
            .expect("Gram matrix is nondegenerate by construction")
    }

    /// Dual basis: rows of the inverse Gram matrix.
    pub fn dual_basis(&self) -> Vec<DualVector> {
        let inv = self.inverse_gram();
        (0..self.rank())
            .map(|i| DualVector {
                coords: inv.row(i).to_vec(),
                lattice: self.id(),
            })
            .collect()
    }

    /// Primitivity of a single nonzero lattice vector.
    pub fn is_primitive(&self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                found: v.len(),
            });
        }
        let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return Err(precondition("primitivity of the zero vector"));
        }
        Ok(g.is_one())
    }

    /// Whether the span of `basis` is a primitive sublattice (torsion-free quotient).
    pub fn is_primitive_sublattice(&self, basis: &[Vec<BigInt>]) -> Result<bool> {
        if basis.is_empty() {
            return Ok(true);
        }
        let m = IntMatrix::from_rows(basis.to_vec())?;
        if m.cols() != self.rank() {
            return Err(Error::Dimension {
                expected: self.rank(),
                found: m.cols(),
            });
        }
        let s = smith_normal_form(&m);
        Ok(s.rank() == basis.len() && s.diagonal.iter().all(|d| d.is_one()))
    }

    /// Orthogonal complement of the span of integer vectors.
    ///
    /// Computed as the integer kernel of `v ↦ (⟨v, w_k⟩)_k` via Smith normal
    /// form; the kernel basis is the tail of the right transform, so the result
    /// is primitive in the ambient lattice.
    pub fn orthogonal_complement(&self, vectors: &[Vec<BigInt>]) -> Result<OrthogonalComplement> {
        let n = self.rank();
        if vectors.is_empty() {
            let basis = (0..n)
                .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
                .collect();
            return Ok(OrthogonalComplement {
                lattice: self.clone(),
                basis,
            });
        }
        for v in vectors {
            if v.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let a = IntMatrix::from_rows(vectors.to_vec())?.mul(self.gram.matrix())?;
        let s = smith_normal_form(&a);
        let r = s.rank();
        let basis: Vec<Vec<BigInt>> = (r..n).map(|j| s.right.column(j)).collect();
        let k = basis.len();
        let gram = IntMatrix::from_fn(k, k, |i, j| self.gram.pair_int(&basis[i], &basis[j]));
        let lattice = if k == 0 {
            IntegerLattice::zero()
        } else {
            IntegerLattice::new(GramMatrix::new(gram)?)?
        };
        Ok(OrthogonalComplement { lattice, basis })
    }
}

#[derive(Clone, Debug)]
pub struct OrthogonalComplement {
    /// The complement with its induced Gram matrix.
    pub lattice: IntegerLattice,
    /// Basis of the complement in ambient coordinates.
    pub basis: Vec<Vec<BigInt>>,
}

/// A vector of `M ⊗ Q` in coordinates of the lattice basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DualVector {
    coords: Vec<BigRational>,
    lattice: LatticeId,
}

impl DualVector {
    pub(crate) fn from_parts(coords: Vec<BigRational>, lattice: LatticeId) -> Self {
        DualVector { coords, lattice }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn lattice_id(&self) -> LatticeId {
        self.lattice
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(BigRational::is_integer)
    }

    pub fn add(&self, other: &DualVector) -> Result<DualVector> {
        if self.lattice != other.lattice {
            return Err(Error::MixedLattices);
        }
        Ok(DualVector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
            lattice: self.lattice,
        })
    }

    pub fn scale(&self, k: &BigRational) -> DualVector {
        DualVector {
            coords: self.coords.iter().map(|a| a * k).collect(),
            lattice: self.lattice,
        }
    }

    pub fn into_coords(self) -> Vec<BigRational> {
        self.coords
    }
}

impl PartialOrd for DualVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DualVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl fmt::Debug for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
pub(crate) fn one_hot(n: usize, i: usize) -> Vec<BigInt> {
    (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()
}
