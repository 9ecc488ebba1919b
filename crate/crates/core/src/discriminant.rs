//! Discriminant groups `D(M) = M^∨ / M` with their `Q/Z`-valued forms.
//!
//! The group is read off the Smith normal form `U G V = diag(d_i)` of the
//! Gram matrix: `y ↦ U y mod d` identifies `Z^n / G Z^n` with `⊕ Z/d_i`, and
//! the dual vector `V e_i / d_i` lifts the i-th generator. Elements are residue
//! tuples against the nontrivial elementary divisors, ordered lexicographically.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{DualVector, GramMatrix, IntegerLattice, LatticeId};
use crate::matrix::{frac, rat_string, IntMatrix};
use crate::snf::smith_normal_form;

pub const DEFAULT_TABLE_CAP: u64 = 1_000_000;
pub const HARD_CAP: u64 = 1_000_000_000;
pub const CAP_ENV: &str = "HEEGNER_LAB_CAP";

/// Size limits for discriminant groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest order for which every q-value is tabulated.
    pub table: u64,
    /// Largest order accepted at all.
    pub hard: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            table: DEFAULT_TABLE_CAP,
            hard: HARD_CAP,
        }
    }
}

impl Caps {
    /// Defaults, with the table cap overridden by `HEEGNER_LAB_CAP` when set.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = std::env::var(CAP_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            caps.table = v;
            caps.hard = caps.hard.max(v);
        }
        caps
    }
}

/// Residues against the elementary divisors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscElement(Vec<u64>);

impl DiscElement {
    pub fn residues(&self) -> &[u64] {
        &self.0
    }

    /// Comma-joined residues; the identity of the trivial group is `"0"`.
    pub fn key(&self) -> String {
        if self.0.is_empty() {
            return "0".to_string();
        }
        self.0
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for DiscElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.key())
    }
}

impl fmt::Display for DiscElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

#[derive(Clone)]
pub struct DiscriminantGroup {
    divisors: Vec<u64>,
    generators: Vec<DualVector>,
    gram: GramMatrix,
    lattice: LatticeId,
    /// Rows of the left Smith transform for the nontrivial divisors.
    reduction: IntMatrix,
    level: u64,
    /// Numerators of q(g_i) over `level`.
    q_gen: Vec<u64>,
    /// Numerators of b(g_i, g_j) over `level`.
    b_gen: Vec<Vec<u64>>,
    /// Numerators of q over `level` for every element, in canonical order.
    q_table: Option<Vec<u64>>,
    order: u64,
}

impl DiscriminantGroup {
    pub fn new(lattice: &IntegerLattice) -> Result<Self> {
        Self::with_caps(lattice, Caps::from_env())
    }

    pub fn with_caps(lattice: &IntegerLattice, caps: Caps) -> Result<Self> {
        let disc = lattice.disc();
        if disc > BigInt::from(caps.hard) {
            return Err(Error::CapExceeded {
                order: disc.to_string(),
                cap: caps.hard,
            });
        }
        let order = disc.to_u64().expect("order bounded by the hard cap");
        let gram = lattice.gram().clone();
        let snf = smith_normal_form(gram.matrix());
        let n = lattice.rank();

        let nontrivial: Vec<usize> = (0..n).filter(|&i| !snf.diagonal[i].is_one()).collect();
        let divisors: Vec<u64> = nontrivial
            .iter()
            .map(|&i| snf.diagonal[i].to_u64().expect("divisor bounded by the order"))
            .collect();
        debug_assert_eq!(divisors.iter().product::<u64>(), order);

        let generators: Vec<DualVector> = nontrivial
            .iter()
            .map(|&i| {
                let d = snf.diagonal[i].clone();
                let coords = snf
                    .right
                    .column(i)
                    .into_iter()
                    .map(|c| BigRational::new(c, d.clone()))
                    .collect();
                lattice.vector(coords).expect("dimension matches")
            })
            .collect();
        let reduction = IntMatrix::from_fn(nontrivial.len(), n, |r, j| {
            snf.left[(nontrivial[r], j)].clone()
        });

        let k = generators.len();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let q_rat: Vec<BigRational> = generators
            .iter()
            .map(|g| frac(&(gram.pair(g.coords(), g.coords()) * &half)))
            .collect();
        let b_rat: Vec<Vec<BigRational>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| frac(&gram.pair(generators[i].coords(), generators[j].coords())))
                    .collect()
            })
            .collect();

        // level: lcm of denominators of q(g_i) and q(g_i + g_j)
        let mut level = BigInt::one();
        for i in 0..k {
            level = level.lcm(q_rat[i].denom());
            for j in i + 1..k {
                let sum = generators[i].add(&generators[j]).expect("same lattice");
                let q = frac(&(gram.pair(sum.coords(), sum.coords()) * &half));
                level = level.lcm(q.denom());
            }
        }
        let level_u = level.to_u64().expect("level divides 2|D|");
        let over_level = |x: &BigRational| -> u64 {
            let scaled = x * BigRational::from_integer(level.clone());
            assert!(scaled.is_integer(), "value {x} not in (1/{level})Z");
            scaled.to_integer().to_u64().expect("in [0, level)")
        };
        let q_gen: Vec<u64> = q_rat.iter().map(over_level).collect();
        let b_gen: Vec<Vec<u64>> = b_rat
            .iter()
            .map(|row| row.iter().map(over_level).collect())
            .collect();

        let mut group = DiscriminantGroup {
            divisors,
            generators,
            gram,
            lattice: lattice.id(),
            reduction,
            level: level_u,
            q_gen,
            b_gen,
            q_table: None,
            order,
        };
        if order <= caps.table {
            let table = (0..order)
                .map(|idx| group.q_numerator(&group.element_at(idx)))
                .collect();
            group.q_table = Some(table);
        }
        Ok(group)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn generators(&self) -> &[DualVector] {
        &self.generators
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn has_table(&self) -> bool {
        self.q_table.is_some()
    }

    pub fn identity(&self) -> DiscElement {
        DiscElement(vec![0; self.divisors.len()])
    }

    pub fn element_at(&self, mut idx: u64) -> DiscElement {
        let mut res = vec![0; self.divisors.len()];
        for (slot, &d) in res.iter_mut().zip(&self.divisors).rev() {
            *slot = idx % d;
            idx /= d;
        }
        DiscElement(res)
    }

    pub fn index_of(&self, el: &DiscElement) -> u64 {
        el.0.iter()
            .zip(&self.divisors)
            .fold(0, |acc, (&a, &d)| acc * d + a)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = DiscElement> + '_ {
        (0..self.order).map(|i| self.element_at(i))
    }

    pub fn element(&self, residues: &[i64]) -> Result<DiscElement> {
        if residues.len() != self.divisors.len() {
            return Err(Error::Dimension {
                expected: self.divisors.len(),
                found: residues.len(),
            });
        }
        Ok(DiscElement(
            residues
                .iter()
                .zip(&self.divisors)
                .map(|(&a, &d)| a.rem_euclid(d as i64) as u64)
                .collect(),
        ))
    }

    pub fn parse_key(&self, key: &str) -> Result<DiscElement> {
        if self.divisors.is_empty() {
            return match key.trim() {
                "0" | "" => Ok(self.identity()),
                _ => Err(Error::Parse(format!("bad element key `{key}` for the trivial group"))),
            };
        }
        let residues = key
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse(format!("bad element key `{key}`")))?;
        self.element(&residues)
    }

    pub fn add(&self, a: &DiscElement, b: &DiscElement) -> DiscElement {
        DiscElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.divisors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        )
    }

    pub fn neg(&self, a: &DiscElement) -> DiscElement {
        DiscElement(
            a.0.iter()
                .zip(&self.divisors)
                .map(|(x, d)| (d - x) % d)
                .collect(),
        )
    }

    /// A dual vector representing the class.
    pub fn lift(&self, el: &DiscElement) -> DualVector {
        let n = self.gram.rank();
        let mut coords = vec![BigRational::zero(); n];
        for (a, g) in el.0.iter().zip(&self.generators) {
            if *a == 0 {
                continue;
            }
            let a = BigRational::from_integer(BigInt::from(*a));
            for (c, x) in coords.iter_mut().zip(g.coords()) {
                *c += &a * x;
            }
        }
        DualVector::from_parts(coords, self.lattice)
    }

    /// Class of a dual vector.
    pub fn reduce(&self, v: &DualVector) -> Result<DiscElement> {
        if v.lattice_id() != self.lattice {
            return Err(Error::MixedLattices);
        }
        let y = self.gram.matrix().to_rational().mul_vec(v.coords())?;
        if !y.iter().all(BigRational::is_integer) {
            return Err(Error::NotInDual);
        }
        let y: Vec<BigInt> = y.into_iter().map(|x| x.to_integer()).collect();
        let r = self.reduction.mul_vec(&y)?;
        Ok(DiscElement(
            r.iter()
                .zip(&self.divisors)
                .map(|(x, &d)| x.mod_floor(&BigInt::from(d)).to_u64().unwrap())
                .collect(),
        ))
    }

    fn q_numerator(&self, el: &DiscElement) -> u64 {
        let m = self.level as u128;
        let a: Vec<u128> = el.0.iter().map(|&x| x as u128 % m).collect();
        let mut acc: u128 = 0;
        for i in 0..a.len() {
            acc = (acc + a[i] * a[i] % m * self.q_gen[i] as u128) % m;
            for j in i + 1..a.len() {
                acc = (acc + a[i] * a[j] % m * self.b_gen[i][j] as u128) % m;
            }
        }
        acc as u64
    }

    /// Numerator of `q(γ)` over the level.
    pub fn q_num(&self, el: &DiscElement) -> u64 {
        match &self.q_table {
            Some(t) => t[self.index_of(el) as usize],
            None => self.q_numerator(el),
        }
    }

    /// Numerator of `b(γ, δ)` over the level.
    pub fn b_num(&self, x: &DiscElement, y: &DiscElement) -> u64 {
        let m = self.level as u128;
        let mut acc: u128 = 0;
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &c) in y.0.iter().enumerate() {
                acc = (acc + (a as u128 % m) * (c as u128 % m) % m * self.b_gen[i][j] as u128) % m;
            }
        }
        acc as u64
    }

    /// `q(γ) = ½⟨γ, γ⟩ mod 1`.
    pub fn q(&self, el: &DiscElement) -> BigRational {
        BigRational::new(BigInt::from(self.q_num(el)), BigInt::from(self.level))
    }

    /// `b(γ, δ) = ⟨γ, δ⟩ mod 1`.
    pub fn b(&self, x: &DiscElement, y: &DiscElement) -> BigRational {
        BigRational::new(BigInt::from(self.b_num(x, y)), BigInt::from(self.level))
    }

    /// Element with the given dual-vector representative, if it lies in `M^∨`.
    pub fn class_of_coords(&self, coords: Vec<BigRational>) -> Result<DiscElement> {
        self.reduce(&DualVector::from_parts(coords, self.lattice))
    }
}

/// `q(γ)` for a group element.
pub fn disc_quadratic_value(group: &DiscriminantGroup, el: &DiscElement) -> BigRational {
    group.q(el)
}

pub fn discriminant_group(lattice: &IntegerLattice) -> Result<DiscriminantGroup> {
    DiscriminantGroup::new(lattice)
}

/// Smallest `N` with `N · q(γ) ∈ Z` on all of `D(L)`.
pub fn level(lattice: &IntegerLattice) -> Result<u64> {
    Ok(DiscriminantGroup::new(lattice)?.level())
}

impl fmt::Debug for DiscriminantGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscriminantGroup")
            .field("divisors", &self.divisors)
            .field("level", &self.level)
            .finish()
    }
}

struct QMap<'a>(&'a DiscriminantGroup, Vec<DiscElement>);

impl Serialize for QMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.1.len()))?;
        for el in &self.1 {
            map.serialize_entry(&el.key(), &rat_string(&self.0.q(el)))?;
        }
        map.end()
    }
}

/// `{divisors, q}`; `q` covers every element when tabulated, else the generators.
impl Serialize for DiscriminantGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let elements: Vec<DiscElement> = if self.has_table() {
            self.elements().collect()
        } else {
            (0..self.divisors.len())
                .map(|i| {
                    let mut r = vec![0; self.divisors.len()];
                    r[i] = 1;
                    DiscElement(r)
                })
                .collect()
        };
        let mut st = s.serialize_struct("DiscriminantGroup", 3)?;
        st.serialize_field("divisors", &self.divisors)?;
        st.serialize_field("q", &QMap(self, elements))?;
        st.serialize_field("q_scope", if self.has_table() { "all" } else { "generators" })?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;
    use crate::named::*;

    fn q_values(g: &DiscriminantGroup) -> Vec<BigRational> {
        g.elements().map(|e| g.q(&e)).collect()
    }

    #[test]
    fn cubic_group_is_cyclic_of_order_three() {
        let g = discriminant_group(&lambda_cubic()).unwrap();
        assert_eq!(g.divisors(), &[3]);
        let mut q = q_values(&g);
        q.sort();
        assert_eq!(q, vec![rat(0, 1), rat(1, 3), rat(1, 3)]);
        assert_eq!(g.level(), 3);
    }

    #[test]
    fn gm_group_and_named_duals() {
        let l = lambda_gm();
        let g = discriminant_group(&l).unwrap();
        assert_eq!(g.divisors(), &[2, 2]);
        assert_eq!(g.level(), 4);
        let mut e = vec![BigRational::zero(); l.rank()];
        e[0] = rat(1, 2);
        let e_star = g.class_of_coords(e).unwrap();
        assert_eq!(g.q(&e_star), rat(1, 4));
        let mut q = q_values(&g);
        q.sort();
        assert_eq!(q, vec![rat(0, 1), rat(1, 4), rat(1, 4), rat(1, 2)]);
    }

    #[test]
    fn trivial_group_of_unimodular_lattice() {
        let g = discriminant_group(&lambda_sharp()).unwrap();
        assert!(g.is_trivial());
        assert_eq!(g.level(), 1);
        assert_eq!(g.identity().key(), "0");
        assert_eq!(g.q(&g.identity()), rat(0, 1));
        assert_eq!(g.parse_key("0").unwrap(), g.identity());
    }

    #[test]
    fn hk_groups() {
        assert_eq!(discriminant_group(&lambda_hk()).unwrap().divisors(), &[2]);
        let g = discriminant_group(&lambda_hk_prim(3, 1).unwrap()).unwrap();
        assert_eq!(g.divisors(), &[2, 6]);
        assert_eq!(g.level(), 12);
        let g = discriminant_group(&lambda_hk_prim(7, 2).unwrap()).unwrap();
        assert_eq!(g.divisors(), &[7]);
    }

    #[test]
    fn lift_and_reduce_are_inverse() {
        let l = lambda_hk_prim(4, 1).unwrap();
        let g = discriminant_group(&l).unwrap();
        for el in g.elements() {
            let v = g.lift(&el);
            assert!(l.in_dual(&v).unwrap());
            assert_eq!(g.reduce(&v).unwrap(), el);
        }
        let mut bad = vec![BigRational::zero(); l.rank()];
        bad[0] = rat(1, 3);
        assert_eq!(g.class_of_coords(bad), Err(Error::NotInDual));
    }

    #[test]
    fn generator_only_mode_above_the_cap() {
        let l = lambda_hk_prim(10, 1).unwrap();
        let caps = Caps { table: 10, hard: 100 };
        let g = DiscriminantGroup::with_caps(&l, caps).unwrap();
        assert!(!g.has_table());
        let full = discriminant_group(&l).unwrap();
        for el in full.elements() {
            assert_eq!(g.q(&el), full.q(&el));
        }
        let json = serde_json::to_value(&g).unwrap();
        assert_eq!(json["q_scope"], "generators");
        let tight = Caps { table: 10, hard: 20 };
        assert!(matches!(
            DiscriminantGroup::with_caps(&l, tight),
            Err(Error::CapExceeded { cap: 20, .. })
        ));
    }

    #[test]
    fn json_shape() {
        let g = discriminant_group(&lambda_cubic()).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with(r#"{"divisors":[3],"q":{"0":"0/1","1":"1/3","2":"1/3"}"#), "{s}");
    }
}
