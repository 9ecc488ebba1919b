//! Heegner divisor indices and Kudla cycle witnesses.
//!
//! A Heegner divisor `Y_{n,γ}` on the period domain of `M` is indexed by a
//! rational `n ≥ 0` and a class `γ ∈ D(M)`. This module computes the indices
//! attached to special cubic fourfolds, Gushel-Mukai fourfolds, hyperkähler
//! fourfolds of K3^[2] type, and the rank-7 Kudla data for polarized K3
//! surfaces embedded in `E8³ ⊕ U²`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::discriminant::DiscriminantGroup;
use crate::enumerate::first_in_box;
use crate::error::{invalid, precondition, Error, Result};
use crate::lattice::{DualVector, GramMatrix, IntegerLattice};
use crate::matrix::{int, rat, rat_serde, rat_string, IntMatrix, RatMatrix};
use crate::named::{e8, lambda_cubic, lambda_gm, lambda_hk_prim, lambda_k3, lambda_sharp};

/// Index `(n, γ)` of a Heegner divisor on the period domain of `lattice`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeegnerIndex {
    #[serde(with = "rat_serde")]
    pub n: BigRational,
    /// Element key in `D(M)`, or `"all"` for a union over every class.
    pub gamma: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_label: Option<String>,
    pub lattice: String,
}

pub const ALL_CLASSES: &str = "all";

fn class_index(group: &DiscriminantGroup, coords: Vec<BigRational>, label: &str, n: BigRational, lattice: &str) -> HeegnerIndex {
    let el = group
        .class_of_coords(coords)
        .expect("labelled class lies in the dual lattice");
    HeegnerIndex {
        n,
        gamma: el.key(),
        gamma_label: Some(label.to_string()),
        lattice: lattice.to_string(),
    }
}

fn half_at(rank: usize, idx: &[usize]) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); rank];
    for &i in idx {
        c[i] = rat(1, 2);
    }
    c
}

/// Index of the divisor of special cubic fourfolds of discriminant `d`.
pub fn cubic_heegner_index(d: i64) -> Result<HeegnerIndex> {
    let r = d.rem_euclid(6);
    if d <= 0 || (r != 0 && r != 2) {
        return Err(invalid(
            "cubic_heegner_index",
            format!("special cubic fourfolds of discriminant d exist only for d > 0, d ≡ 0 or 2 (mod 6); got d = {d}"),
        ));
    }
    let l = lambda_cubic();
    let group = DiscriminantGroup::new(&l)?;
    let n = rat(d, 6);
    let mut coords = vec![BigRational::zero(); l.rank()];
    let label = if r == 0 {
        "gamma0"
    } else {
        // class of the A2 dual vector of norm 2/3
        coords[0] = rat(2, 3);
        coords[1] = rat(1, 3);
        "gamma1"
    };
    Ok(class_index(&group, coords, label, n, "Lambda_C"))
}

fn gm_residue(d: i64) -> Result<i64> {
    let r = d.rem_euclid(8);
    if d <= 0 || !matches!(r, 0 | 2 | 4) {
        return Err(invalid(
            "gm",
            format!("Gushel-Mukai labellings require d > 0, d ≡ 0, 2 or 4 (mod 8); got d = {d}"),
        ));
    }
    Ok(r)
}

/// Gram matrices of the rank-3 labelling lattices `⟨h₁, h₂, ζ⟩`.
///
/// Two matrices `K'`, `K''` are returned when `d ≡ 2 (mod 8)`. The corner
/// `(d + 2)/4` is odd in that branch, so these are integral but not even.
pub fn gm_labelling_gram(d: i64) -> Result<Vec<GramMatrix>> {
    let rows: Vec<[[i64; 3]; 3]> = match gm_residue(d)? {
        0 => vec![[[2, 0, 0], [0, 2, 0], [0, 0, d / 4]]],
        4 => vec![[[2, 0, 1], [0, 2, 1], [1, 1, (d + 4) / 4]]],
        _ => {
            let c = (d + 2) / 4;
            vec![
                [[2, 0, 1], [0, 2, 0], [1, 0, c]],
                [[2, 0, 0], [0, 2, 1], [0, 1, c]],
            ]
        }
    };
    rows.iter()
        .map(|m| GramMatrix::from_i64_rows(&[&m[0], &m[1], &m[2]]))
        .collect()
}

/// Identities checked for a residue vector `v` in a labelling `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabellingChecks {
    #[serde(with = "rat_serde")]
    pub pair_h1: BigRational,
    #[serde(with = "rat_serde")]
    pub pair_h2: BigRational,
    #[serde(with = "rat_serde")]
    pub half_norm: BigRational,
    #[serde(with = "rat_serde")]
    pub expected_half_norm: BigRational,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct LabellingWitness {
    pub gram: GramMatrix,
    pub residue_vector: Vec<BigRational>,
    pub checks: LabellingChecks,
}

impl Serialize for LabellingWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            gram: Vec<Vec<String>>,
            residue_vector: Vec<String>,
            checks: &'a LabellingChecks,
        }
        Out {
            gram: self.gram.matrix().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            residue_vector: self.residue_vector.iter().map(rat_string).collect(),
            checks: &self.checks,
        }
        .serialize(s)
    }
}

/// Residue vectors `v ∈ K ⊗ Q` orthogonal to `h₁, h₂` with `½⟨v, v⟩ = d/8`.
pub fn gm_residue_vector(d: i64) -> Result<Vec<LabellingWitness>> {
    let h = rat(-1, 2);
    let o = BigRational::zero;
    let coords: Vec<Vec<BigRational>> = match gm_residue(d)? {
        0 => vec![vec![o(), o(), int(1)]],
        4 => vec![vec![h.clone(), h, int(1)]],
        _ => vec![vec![h.clone(), o(), int(1)], vec![o(), h, int(1)]],
    };
    let h1 = [int(1), o(), o()];
    let h2 = [o(), int(1), o()];
    let expected = rat(d, 8);
    gm_labelling_gram(d)?
        .into_iter()
        .zip(coords)
        .map(|(gram, v)| {
            let pair_h1 = gram.pair(&v, &h1);
            let pair_h2 = gram.pair(&v, &h2);
            let half_norm = gram.pair(&v, &v) / int(2);
            let pass = pair_h1.is_zero() && pair_h2.is_zero() && half_norm == expected;
            Ok(LabellingWitness {
                gram,
                residue_vector: v,
                checks: LabellingChecks {
                    pair_h1,
                    pair_h2,
                    half_norm,
                    expected_half_norm: expected.clone(),
                    pass,
                },
            })
        })
        .collect()
}

/// Heegner indices containing the Gushel-Mukai divisors of discriminant `d`.
pub fn gm_heegner_index(d: i64) -> Result<Vec<HeegnerIndex>> {
    let r = gm_residue(d)?;
    let l = lambda_gm();
    let group = DiscriminantGroup::new(&l)?;
    let n = rat(d, 8);
    let rank = l.rank();
    let mk = |idx: &[usize], label: &str| class_index(&group, half_at(rank, idx), label, n.clone(), "Lambda_GM");
    Ok(match r {
        0 => vec![mk(&[], "0")],
        4 => vec![mk(&[0, 1], "e*+f*")],
        _ => vec![mk(&[0], "e*"), mk(&[1], "f*")],
    })
}

/// Index bound for Noether-Lefschetz divisors of K3^[2]-type fourfolds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HkIndex {
    pub n: i64,
    pub delta: i64,
    pub d: i64,
    /// `4n` for `δ = 1`, `n` for `δ = 2`.
    pub level: i64,
    pub disc: i64,
    /// `⟨v, v⟩ = d / disc`.
    #[serde(with = "rat_serde")]
    pub vector_norm: BigRational,
    pub index: HeegnerIndex,
}

pub fn hk_heegner_index(n: i64, delta: i64, d: i64) -> Result<HkIndex> {
    let l = lambda_hk_prim(n, delta)?;
    if d <= 0 {
        return Err(precondition(format!("d must be positive, got {d}")));
    }
    let level = if delta == 1 { 4 * n } else { n };
    let disc: i64 = l.disc().try_into().map_err(|_| precondition("discriminant out of range"))?;
    Ok(HkIndex {
        n,
        delta,
        d,
        level,
        disc,
        vector_norm: rat(d, disc),
        index: HeegnerIndex {
            n: rat(d, 2 * level),
            gamma: ALL_CLASSES.to_string(),
            gamma_label: None,
            lattice: format!("Lambda_HK_prim(n={n},delta={delta})"),
        },
    })
}

/// Route through `(S^[2], H₂ − (m/2)Δ)` for a K3 of genus `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbSquareRoute {
    pub g: i64,
    pub d: i64,
    pub n: i64,
    pub m: i64,
    /// Target `(⟨h,h⟩, div h) = (2n, 1)`.
    pub target: (i64, i64),
    pub heegner_index: HeegnerIndex,
}

pub fn hilb_square_route(g: i64, n: i64) -> Result<HilbSquareRoute> {
    if g < 2 || n < 1 {
        return Err(precondition(format!("need g ≥ 2 and n ≥ 1, got g = {g}, n = {n}")));
    }
    let d = 2 * g - 2;
    let rest = d / 2 - n;
    let m = crate::matrix::exact_isqrt(&BigInt::from(rest))
        .ok_or_else(|| precondition(format!("d/2 − n = {rest} is not a nonnegative square")))?;
    let m: i64 = m.try_into().expect("small square root");
    let hk = hk_heegner_index(n, 1, d)?;
    Ok(HilbSquareRoute {
        g,
        d,
        n,
        m,
        target: (2 * n, 1),
        heegner_index: hk.index,
    })
}

/// Half-Gram matrix `Q(v) = ½(⟨vᵢ, vⱼ⟩)` of a tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMatrix {
    pub entries: RatMatrix,
    pub rank: usize,
}

impl MomentMatrix {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn determinant(&self) -> BigRational {
        self.entries.determinant()
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.entries.inertia().1 == 0
    }
}

impl Serialize for MomentMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            entries: Vec<Vec<String>>,
            rank: usize,
            det: String,
        }
        Out {
            entries: self.entries.to_rows().iter().map(|r| r.iter().map(rat_string).collect()).collect(),
            rank: self.rank,
            det: rat_string(&self.determinant()),
        }
        .serialize(s)
    }
}

pub fn moment_matrix(lattice: &IntegerLattice, vectors: &[DualVector]) -> Result<MomentMatrix> {
    let r = vectors.len();
    let mut entries = RatMatrix::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let x = lattice.pair(&vectors[i], &vectors[j])? / int(2);
            entries[(j, i)] = x.clone();
            entries[(i, j)] = x;
        }
    }
    let rank = entries.rank();
    Ok(MomentMatrix { entries, rank })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetCheck {
    #[serde(with = "rat_serde")]
    pub lhs: BigRational,
    #[serde(with = "rat_serde")]
    pub rhs: BigRational,
    pub pass: bool,
}

/// `Λ_d ↪ Λ_#` with the orthogonal complement `w₁..w₇` and its moment matrix.
#[derive(Clone, Debug)]
pub struct EmbeddingWitness {
    pub d: i64,
    /// Images of the basis of `Λ_d` in coordinates of `Λ_#`.
    pub image_basis: Vec<Vec<BigInt>>,
    /// The norm-`d` vector in the third `E8`, in `E8` coordinates.
    pub polarization: Vec<BigInt>,
    /// Box radius at which the polarization vector was found.
    pub radius: i64,
    pub complement_basis: Vec<Vec<BigInt>>,
    pub complement_gram: IntMatrix,
    pub moment: MomentMatrix,
    pub primitive: bool,
    pub orthogonal: bool,
    pub det_check: DetCheck,
}

impl EmbeddingWitness {
    pub fn pass(&self) -> bool {
        self.primitive && self.orthogonal && self.det_check.pass && self.complement_basis.len() == 7
    }
}

fn int_rows(m: &IntMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

impl Serialize for EmbeddingWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            d: i64,
            image_basis: Vec<Vec<String>>,
            complement_basis: Vec<Vec<String>>,
            complement_gram: Vec<Vec<String>>,
            moment: &'a MomentMatrix,
            primitive: bool,
            orthogonal: bool,
            det_check: &'a DetCheck,
        }
        let strs = |v: &[Vec<BigInt>]| -> Vec<Vec<String>> {
            v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
        };
        Out {
            d: self.d,
            image_basis: strs(&self.image_basis),
            complement_basis: strs(&self.complement_basis),
            complement_gram: int_rows(&self.complement_gram),
            moment: &self.moment,
            primitive: self.primitive,
            orthogonal: self.orthogonal,
            det_check: &self.det_check,
        }
        .serialize(s)
    }
}

/// Largest box radius tried when searching `E8` for the polarization vector.
pub const EMBED_MAX_RADIUS: i64 = 64;

/// Canonical primitive vector of norm `d` in `E8`: the lexicographically least
/// one inside the smallest coordinate box `[-R, R]⁸` that contains any.
pub fn canonical_e8_vector(d: i64) -> Result<(Vec<BigInt>, i64)> {
    let l = e8();
    let norm = int(d);
    for radius in 1..=EMBED_MAX_RADIUS {
        let hit = first_in_box(&l, &norm, radius, |x| {
            x.iter().fold(BigInt::zero(), |g, c| g.gcd(c)).is_one()
        })?;
        if let Some(v) = hit {
            return Ok((v, radius));
        }
    }
    Err(Error::NoPrimitiveVector {
        norm: d.to_string(),
        radius: EMBED_MAX_RADIUS,
    })
}

pub fn embed_k3_lattice(d: i64) -> Result<EmbeddingWitness> {
    if d < 2 || d % 2 != 0 {
        return Err(precondition(format!("Λ_d is even, so d must be even and ≥ 2; got d = {d}")));
    }
    let source = lambda_k3(d)?;
    let target = lambda_sharp();
    let n = target.rank();
    let unit = |i: usize| -> Vec<BigInt> { (0..n).map(|j| BigInt::from((i == j) as i64)).collect() };

    // source: E8 E8 U U <d>; target: E8 E8 E8 U U
    let (pol, radius) = canonical_e8_vector(d)?;
    let mut image: Vec<Vec<BigInt>> = (0..16).map(unit).collect();
    image.extend((24..28).map(unit));
    let mut p = vec![BigInt::zero(); n];
    p[16..24].clone_from_slice(&pol);
    image.push(p);

    let tg = target.gram();
    let k = image.len();
    let induced = IntMatrix::from_fn(k, k, |i, j| tg.pair_int(&image[i], &image[j]));
    if &induced != source.gram().matrix() {
        return Err(precondition("embedding does not preserve the form"));
    }
    let primitive = target.is_primitive_sublattice(&image)?;
    let comp = target.orthogonal_complement(&image)?;
    let orthogonal = comp
        .basis
        .iter()
        .all(|w| image.iter().all(|v| tg.pair_int(v, w).is_zero()));

    let ws: Vec<DualVector> = comp
        .basis
        .iter()
        .map(|w| target.lattice_vector(w))
        .collect::<Result<_>>()?;
    let moment = moment_matrix(&target, &ws)?;
    let lhs = moment.determinant();
    let rhs = rat(d, 128);
    let det_check = DetCheck {
        pass: lhs == rhs,
        lhs,
        rhs,
    };
    Ok(EmbeddingWitness {
        d,
        image_basis: image,
        polarization: pol,
        radius,
        complement_basis: comp.basis,
        complement_gram: comp.lattice.gram().matrix().clone(),
        moment,
        primitive,
        orthogonal,
        det_check,
    })
}

/// `n ≡ q(γ) (mod 1)`: the divisor `Y_{n,γ}` can be nonempty only then.
pub fn index_is_compatible(group: &DiscriminantGroup, idx: &HeegnerIndex) -> Result<bool> {
    if idx.gamma == ALL_CLASSES {
        return Ok(true);
    }
    let el = group.parse_key(&idx.gamma)?;
    let diff = &idx.n - group.q(&el);
    Ok(diff.is_integer() && !idx.n.is_negative())
}
