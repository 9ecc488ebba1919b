//! Standard lattices and the period lattices of the K3 and fourfold families.
//!
//! Summands are laid out block-diagonally in the order they are listed in
//! each lattice's name.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::lattice::IntegerLattice;

/// Symbols accepted by [`build_named_lattice`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeSymbol {
    U,
    A1,
    A2,
    E8,
    Rank1,
    LambdaC,
    LambdaGm,
    LambdaHk,
    LambdaHkPrim,
    LambdaD,
    LambdaSharp,
}

impl LatticeSymbol {
    pub const ALL: [LatticeSymbol; 11] = [
        LatticeSymbol::U,
        LatticeSymbol::A1,
        LatticeSymbol::A2,
        LatticeSymbol::E8,
        LatticeSymbol::Rank1,
        LatticeSymbol::LambdaC,
        LatticeSymbol::LambdaGm,
        LatticeSymbol::LambdaHk,
        LatticeSymbol::LambdaHkPrim,
        LatticeSymbol::LambdaD,
        LatticeSymbol::LambdaSharp,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LatticeSymbol::U => "U",
            LatticeSymbol::A1 => "A1",
            LatticeSymbol::A2 => "A2",
            LatticeSymbol::E8 => "E8",
            LatticeSymbol::Rank1 => "rank1",
            LatticeSymbol::LambdaC => "Lambda_C",
            LatticeSymbol::LambdaGm => "Lambda_GM",
            LatticeSymbol::LambdaHk => "Lambda_HK",
            LatticeSymbol::LambdaHkPrim => "Lambda_HK_prim",
            LatticeSymbol::LambdaD => "Lambda_d",
            LatticeSymbol::LambdaSharp => "Lambda_sharp",
        }
    }
}

impl fmt::Display for LatticeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LatticeSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LatticeSymbol::ALL
            .into_iter()
            .find(|sym| sym.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLattice(s.to_string()))
    }
}

/// Parameters for the parametrised families.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LatticeParams {
    /// Half the polarisation degree for `Lambda_HK_prim`.
    pub n: Option<i64>,
    /// Divisibility for `Lambda_HK_prim`.
    pub delta: Option<i64>,
    /// Degree for `rank1` and `Lambda_d`.
    pub d: Option<i64>,
}

impl LatticeParams {
    pub fn d(d: i64) -> Self {
        LatticeParams {
            d: Some(d),
            ..Default::default()
        }
    }

    pub fn hk(n: i64, delta: i64) -> Self {
        LatticeParams {
            n: Some(n),
            delta: Some(delta),
            d: None,
        }
    }
}

pub fn build_named_lattice(name: &str, params: LatticeParams) -> Result<IntegerLattice> {
    build_symbol(name.parse()?, params)
}

pub fn build_symbol(sym: LatticeSymbol, params: LatticeParams) -> Result<IntegerLattice> {
    let need = |v: Option<i64>, p: &str| {
        v.ok_or_else(|| invalid(sym.as_str(), format!("parameter `{p}` is required")))
    };
    let lattice = match sym {
        LatticeSymbol::U => hyperbolic_plane(),
        LatticeSymbol::A1 => root_a1(),
        LatticeSymbol::A2 => root_a2(),
        LatticeSymbol::E8 => e8(),
        LatticeSymbol::Rank1 => {
            let d = need(params.d, "d")?;
            rank_one(d)?
        }
        LatticeSymbol::LambdaC => lambda_cubic(),
        LatticeSymbol::LambdaGm => lambda_gm(),
        LatticeSymbol::LambdaHk => lambda_hk(),
        LatticeSymbol::LambdaHkPrim => {
            let n = need(params.n, "n")?;
            let delta = need(params.delta, "delta")?;
            lambda_hk_prim(n, delta)?
        }
        LatticeSymbol::LambdaD => lambda_k3(need(params.d, "d")?)?,
        LatticeSymbol::LambdaSharp => lambda_sharp(),
    };
    Ok(lattice)
}

pub fn hyperbolic_plane() -> IntegerLattice {
    IntegerLattice::from_i64_rows(&[&[0, 1], &[1, 0]])
        .unwrap()
        .named("U")
}

pub fn root_a1() -> IntegerLattice {
    IntegerLattice::from_i64_rows(&[&[2]]).unwrap().named("A1")
}

pub fn root_a2() -> IntegerLattice {
    IntegerLattice::from_i64_rows(&[&[2, -1], &[-1, 2]])
        .unwrap()
        .named("A2")
}

/// Cartan matrix of E8, Bourbaki labelling (branch node 4 joined to node 2).
pub fn e8() -> IntegerLattice {
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut g = [[0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    let rows: Vec<&[i64]> = g.iter().map(|r| r.as_slice()).collect();
    IntegerLattice::from_i64_rows(&rows).unwrap().named("E8")
}

/// `⟨d⟩` for even positive `d`.
pub fn rank_one(d: i64) -> Result<IntegerLattice> {
    if d <= 0 || d % 2 != 0 {
        return Err(invalid("rank1", format!("d must be even and positive, got {d}")));
    }
    Ok(IntegerLattice::from_i64_rows(&[&[d]])?.named(format!("<{d}>")))
}

fn sum(parts: &[IntegerLattice]) -> IntegerLattice {
    parts
        .iter()
        .fold(IntegerLattice::zero(), |acc, p| acc.direct_sum(p))
}

/// `A2 ⊕ U² ⊕ E8²`, signature (20, 2).
pub fn lambda_cubic() -> IntegerLattice {
    let u = hyperbolic_plane();
    let e = e8();
    sum(&[root_a2(), u.clone(), u, e.clone(), e]).named("Lambda_C")
}

/// `A1² ⊕ E8² ⊕ U²`, signature (20, 2).
pub fn lambda_gm() -> IntegerLattice {
    let u = hyperbolic_plane();
    let e = e8();
    sum(&[root_a1(), root_a1(), e.clone(), e, u.clone(), u]).named("Lambda_GM")
}

/// `A1 ⊕ U³ ⊕ E8²`, signature (20, 3).
pub fn lambda_hk() -> IntegerLattice {
    let u = hyperbolic_plane();
    let e = e8();
    sum(&[root_a1(), u.clone(), u.clone(), u, e.clone(), e]).named("Lambda_HK")
}

/// Primitive lattice of a hyperkähler fourfold with `⟨h,h⟩ = 2n`, `div(h) = δ`:
/// `U² ⊕ E8² ⊕ B` with `B = [[2,0],[0,2n]]` (δ = 1) or `[[2,1],[1,(n+1)/2]]` (δ = 2).
pub fn lambda_hk_prim(n: i64, delta: i64) -> Result<IntegerLattice> {
    const WHAT: &str = "Lambda_HK_prim";
    if n < 1 {
        return Err(invalid(WHAT, format!("n must be positive, got {n}")));
    }
    let tail = match delta {
        1 => IntegerLattice::from_i64_rows(&[&[2, 0], &[0, 2 * n]])?,
        2 => {
            if n % 4 != 3 {
                return Err(invalid(WHAT, format!("delta = 2 requires n ≡ 3 (mod 4), got n = {n}")));
            }
            IntegerLattice::from_i64_rows(&[&[2, 1], &[1, (n + 1) / 2]])?
        }
        _ => return Err(invalid(WHAT, format!("delta must be 1 or 2, got {delta}"))),
    };
    let u = hyperbolic_plane();
    let e = e8();
    Ok(sum(&[u.clone(), u, e.clone(), e, tail]).named(format!("Lambda_HK_prim(n={n},delta={delta})")))
}

/// Primitive K3 lattice of degree `d`: `E8² ⊕ U² ⊕ ⟨d⟩`, signature (19, 2).
pub fn lambda_k3(d: i64) -> Result<IntegerLattice> {
    let tail = rank_one(d).map_err(|_| invalid("Lambda_d", format!("d must be even and positive, got {d}")))?;
    let u = hyperbolic_plane();
    let e = e8();
    Ok(sum(&[e.clone(), e, u.clone(), u, tail]).named(format!("Lambda_d(d={d})")))
}

/// `E8³ ⊕ U²`, even unimodular of signature (26, 2).
pub fn lambda_sharp() -> IntegerLattice {
    let u = hyperbolic_plane();
    let e = e8();
    sum(&[e.clone(), e.clone(), e, u.clone(), u]).named("Lambda_sharp")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Signature;
    use num_bigint::BigInt;

    #[test]
    fn hyperbolic_plane_gram() {
        let u = build_named_lattice("U", LatticeParams::default()).unwrap();
        assert_eq!(u.gram().entry(0, 1), &BigInt::from(1));
        assert_eq!(u.gram().entry(0, 0), &BigInt::from(0));
        assert_eq!(u.signature(), Signature(1, 1));
    }

    #[test]
    fn period_lattice_signatures() {
        assert_eq!(lambda_cubic().signature(), Signature(20, 2));
        assert_eq!(lambda_cubic().rank(), 22);
        assert_eq!(lambda_gm().signature(), Signature(20, 2));
        assert_eq!(lambda_hk().signature(), Signature(20, 3));
        assert_eq!(lambda_k3(14).unwrap().signature(), Signature(19, 2));
        assert_eq!(lambda_sharp().signature(), Signature(26, 2));
        assert_eq!(lambda_hk_prim(5, 1).unwrap().signature(), Signature(20, 2));
    }

    #[test]
    fn determinants() {
        assert_eq!(e8().determinant(), BigInt::from(1));
        assert!(lambda_sharp().is_unimodular());
        for d in [2, 14, 100] {
            assert_eq!(lambda_k3(d).unwrap().disc(), BigInt::from(d));
            assert_eq!(rank_one(d).unwrap().determinant(), BigInt::from(d));
        }
        assert_eq!(lambda_cubic().disc(), BigInt::from(3));
        assert_eq!(lambda_gm().disc(), BigInt::from(4));
        assert_eq!(lambda_hk().disc(), BigInt::from(2));
        assert_eq!(lambda_hk_prim(4, 1).unwrap().disc(), BigInt::from(16));
        assert_eq!(lambda_hk_prim(7, 2).unwrap().disc(), BigInt::from(7));
    }

    #[test]
    fn hk_prim_delta_two_tail() {
        let l = build_named_lattice("Lambda_HK_prim", LatticeParams::hk(3, 2)).unwrap();
        assert_eq!(l.rank(), 22);
        assert_eq!(l.signature(), Signature(20, 2));
        assert_eq!(l.gram().entry(20, 20), &BigInt::from(2));
        assert_eq!(l.gram().entry(20, 21), &BigInt::from(1));
        assert_eq!(l.gram().entry(21, 21), &BigInt::from(2));
    }

    #[test]
    fn invalid_parameters_name_the_condition() {
        let err = build_named_lattice("Lambda_HK_prim", LatticeParams::hk(2, 2)).unwrap_err();
        assert!(err.to_string().contains("n ≡ 3 (mod 4)"), "{err}");
        let err = build_named_lattice("Lambda_d", LatticeParams::d(7)).unwrap_err();
        assert!(err.to_string().contains("even"), "{err}");
        assert!(build_named_lattice("rank1", LatticeParams::default()).is_err());
        assert_eq!(
            build_named_lattice("Lambda_X", LatticeParams::default()),
            Err(Error::UnknownLattice("Lambda_X".into()))
        );
        assert!(build_named_lattice("lambda_c", LatticeParams::default()).is_ok());
    }
}
