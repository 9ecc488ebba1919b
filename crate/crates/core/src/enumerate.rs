//! Lattice points of prescribed norm in definite lattices.
//!
//! Fincke-Pohst enumeration over an exact rational decomposition
//! `Q(y) = Σ_k a_k (y_k − c_k(y_0..y_{k-1}))²`. Coordinate intervals are
//! located with a floating-point guess and then corrected with exact
//! comparisons, so no boundary vector is accepted or rejected by rounding.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{precondition, Error, Result};
use crate::lattice::{DualVector, IntegerLattice};
use crate::matrix::RatMatrix;

/// Prefix-ordered square completion of a positive definite form.
struct Completion {
    /// Leading coefficients `a_k > 0`.
    diag: Vec<BigRational>,
    /// `mix[k][j]` for `j < k`: `y_k + Σ_j mix[k][j] y_j` is the k-th square.
    mix: Vec<Vec<BigRational>>,
}

impl Completion {
    fn new(gram: &RatMatrix) -> Self {
        let n = gram.rows();
        // Cohen's decomposition on the reversed form, read back in forward order.
        let mut q = RatMatrix::from_fn(n, n, |i, j| gram[(n - 1 - i, n - 1 - j)].clone());
        for i in 0..n {
            for j in i + 1..n {
                let v = q[(i, j)].clone();
                q[(j, i)] = v.clone();
                q[(i, j)] = v / &q[(i, i)];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &q[(k, i)] * &q[(i, l)];
                    q[(k, l)] -= t;
                }
            }
        }
        let diag = (0..n).map(|k| q[(n - 1 - k, n - 1 - k)].clone()).collect();
        let mix = (0..n)
            .map(|k| {
                (0..k)
                    .map(|j| q[(n - 1 - k, n - 1 - j)].clone())
                    .collect()
            })
            .collect();
        Completion { diag, mix }
    }
}

/// Integer range `{x : a (x + shift − c)² ≤ budget}` clipped to `[-bound, bound]`.
fn interval(
    a: &BigRational,
    center: &BigRational,
    shift: &BigRational,
    budget: &BigRational,
    bound: Option<i64>,
) -> Option<(BigInt, BigInt)> {
    if budget.is_negative() {
        return None;
    }
    let t = center - shift;
    let s = budget / a;
    let fits = |x: &BigInt| {
        let d = BigRational::from_integer(x.clone()) - &t;
        &d * &d <= s
    };
    let tf = t.to_f64().unwrap_or(0.0);
    let rf = s.to_f64().unwrap_or(0.0).max(0.0).sqrt();
    let mut lo = BigInt::from((tf - rf).floor() as i64 - 1);
    while fits(&(&lo - 1)) {
        lo -= 1;
    }
    let t_floor = t.floor().to_integer();
    while !fits(&lo) && lo <= t_floor {
        lo += 1;
    }
    let mut hi = BigInt::from((tf + rf).ceil() as i64 + 1);
    while fits(&(&hi + 1)) {
        hi += 1;
    }
    let t_ceil = t.ceil().to_integer();
    while !fits(&hi) && hi >= t_ceil {
        hi -= 1;
    }
    if let Some(b) = bound {
        lo = lo.max(BigInt::from(-b));
        hi = hi.min(BigInt::from(b));
    }
    (lo <= hi && fits(&lo) && fits(&hi)).then_some((lo, hi))
}

struct Search<'a> {
    comp: &'a Completion,
    target: &'a BigRational,
    shift: &'a [BigRational],
    bound: Option<i64>,
    x: Vec<BigInt>,
    y: Vec<BigRational>,
}

impl Search<'_> {
    fn run<F>(&mut self, k: usize, partial: BigRational, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[BigInt]) -> ControlFlow<()>,
    {
        let n = self.comp.diag.len();
        if k == n {
            if partial == *self.target {
                return visit(&self.x);
            }
            return ControlFlow::Continue(());
        }
        let mut center = BigRational::zero();
        for (m, y) in self.comp.mix[k].iter().zip(&self.y) {
            if !m.is_zero() && !y.is_zero() {
                center -= m * y;
            }
        }
        let a = &self.comp.diag[k];
        let budget = self.target - &partial;
        let Some((lo, hi)) = interval(a, &center, &self.shift[k], &budget, self.bound) else {
            return ControlFlow::Continue(());
        };
        let mut x = lo;
        while x <= hi {
            let y = BigRational::from_integer(x.clone()) + &self.shift[k];
            let d = &y - &center;
            let next = &partial + a * &d * &d;
            self.x[k] = x.clone();
            self.y[k] = y;
            self.run(k + 1, next, visit)?;
            x += 1;
        }
        ControlFlow::Continue(())
    }
}

fn definite_form(l: &IntegerLattice, norm: &BigRational) -> Result<(RatMatrix, BigRational)> {
    let sig = l.signature();
    let gram = l.gram().matrix().to_rational();
    if sig.negative() == 0 {
        Ok((gram, norm.clone()))
    } else if sig.positive() == 0 {
        Ok((gram.map(|x| -x), -norm))
    } else {
        Err(Error::Indefinite)
    }
}

fn walk<F>(
    l: &IntegerLattice,
    norm: &BigRational,
    shift: &[BigRational],
    bound: Option<i64>,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[BigInt]) -> ControlFlow<()>,
{
    let (gram, target) = definite_form(l, norm)?;
    if target.is_negative() {
        return Ok(());
    }
    let n = l.rank();
    let comp = Completion::new(&gram);
    let mut search = Search {
        comp: &comp,
        target: &target,
        shift,
        bound,
        x: vec![BigInt::zero(); n],
        y: vec![BigRational::zero(); n],
    };
    let _ = search.run(0, BigRational::zero(), &mut visit);
    Ok(())
}

/// All `v ∈ coset + L` with `⟨v, v⟩ = norm`, sorted lexicographically.
pub fn enumerate_by_norm(
    l: &IntegerLattice,
    norm: &BigRational,
    coset: Option<&DualVector>,
) -> Result<Vec<DualVector>> {
    let n = l.rank();
    let shift: Vec<BigRational> = match coset {
        Some(c) => {
            if c.lattice_id() != l.id() {
                return Err(Error::MixedLattices);
            }
            c.coords().to_vec()
        }
        None => vec![BigRational::zero(); n],
    };
    if norm.is_negative() && l.is_positive_definite() {
        return Err(precondition("norm must be nonnegative"));
    }
    let mut out = Vec::new();
    walk(l, norm, &shift, None, |x| {
        let coords = x
            .iter()
            .zip(&shift)
            .map(|(xi, s)| BigRational::from_integer(xi.clone()) + s)
            .collect();
        out.push(DualVector::from_parts(coords, l.id()));
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

/// Float-guided walk over integer vectors in a box.
///
/// Intervals come from an `f64` copy of the completion widened by a margin,
/// and every leaf is confirmed by an exact integer norm, so the float error
/// can only cost extra nodes, never change the result.
struct BoxWalk {
    diag: Vec<f64>,
    mix: Vec<Vec<f64>>,
    gram: Vec<Vec<i128>>,
    target_f: f64,
    target: i128,
    radius: i64,
    x: Vec<i64>,
}

const MARGIN: f64 = 1e-6;

impl BoxWalk {
    fn new(l: &IntegerLattice, norm: &BigRational, radius: i64) -> Result<Option<Self>> {
        let (gram, target) = definite_form(l, norm)?;
        if target.is_negative() || !target.is_integer() {
            return Ok(None);
        }
        let comp = Completion::new(&gram);
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::INFINITY);
        let n = l.rank();
        let to_i128 = |x: &BigRational| -> Result<i128> {
            x.to_integer()
                .to_i128()
                .ok_or_else(|| precondition("Gram entries too large for box search"))
        };
        let mut g = vec![vec![0i128; n]; n];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = to_i128(&gram[(i, j)])?;
            }
        }
        Ok(Some(BoxWalk {
            diag: comp.diag.iter().map(f).collect(),
            mix: comp.mix.iter().map(|r| r.iter().map(f).collect()).collect(),
            gram: g,
            target_f: f(&target),
            target: to_i128(&target)?,
            radius,
            x: vec![0; n],
        }))
    }

    fn exact_norm(&self) -> i128 {
        let x = &self.x;
        let mut acc = 0i128;
        for (i, row) in self.gram.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let r: i128 = row.iter().zip(x).map(|(g, &v)| g * v as i128).sum();
            acc += x[i] as i128 * r;
        }
        acc
    }

    fn run<F>(&mut self, k: usize, partial: f64, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[i64]) -> ControlFlow<()>,
    {
        let n = self.diag.len();
        if k == n {
            if self.exact_norm() == self.target {
                return visit(&self.x);
            }
            return ControlFlow::Continue(());
        }
        let center: f64 = -self.mix[k].iter().zip(&self.x).map(|(m, &y)| m * y as f64).sum::<f64>();
        let budget = self.target_f - partial;
        let tol = MARGIN * (1.0 + self.target_f.abs());
        if budget < -tol {
            return ControlFlow::Continue(());
        }
        let half = (budget.max(0.0) / self.diag[k]).sqrt();
        let lo = ((center - half - tol).ceil() as i64).max(-self.radius);
        let hi = ((center + half + tol).floor() as i64).min(self.radius);
        for x in lo..=hi {
            let d = x as f64 - center;
            self.x[k] = x;
            self.run(k + 1, partial + self.diag[k] * d * d, visit)?;
        }
        self.x[k] = 0;
        ControlFlow::Continue(())
    }
}

fn walk_box<F>(l: &IntegerLattice, norm: &BigRational, radius: i64, mut visit: F) -> Result<()>
where
    F: FnMut(&[i64]) -> ControlFlow<()>,
{
    if let Some(mut w) = BoxWalk::new(l, norm, radius)? {
        let _ = w.run(0, 0.0, &mut visit);
    }
    Ok(())
}

fn big(x: &[i64]) -> Vec<BigInt> {
    x.iter().map(|&v| BigInt::from(v)).collect()
}

/// Lattice vectors of the given norm with all coordinates in `[-radius, radius]`.
pub fn enumerate_in_box(l: &IntegerLattice, norm: &BigRational, radius: i64) -> Result<Vec<Vec<BigInt>>> {
    let mut out = Vec::new();
    walk_box(l, norm, radius, |x| {
        out.push(big(x));
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}

/// Lexicographically least lattice vector in the box satisfying `accept`.
///
/// Coordinates are tried in increasing order from the first one, so the
/// first hit is the least; the search stops there.
pub fn first_in_box(
    l: &IntegerLattice,
    norm: &BigRational,
    radius: i64,
    mut accept: impl FnMut(&[BigInt]) -> bool,
) -> Result<Option<Vec<BigInt>>> {
    let mut found = None;
    walk_box(l, norm, radius, |x| {
        let v = big(x);
        if accept(&v) {
            found = Some(v);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discriminant::discriminant_group;
    use crate::matrix::{int, rat};
    use crate::named::{e8, hyperbolic_plane, lambda_cubic, root_a2};

    #[test]
    fn e8_roots() {
        let v = enumerate_by_norm(&e8(), &int(2), None).unwrap();
        assert_eq!(v.len(), 240);
        let v4 = enumerate_by_norm(&e8(), &int(4), None).unwrap();
        assert_eq!(v4.len(), 2160);
    }

    #[test]
    fn a2_norm_two_and_shifted_coset() {
        let a2 = root_a2();
        assert_eq!(enumerate_by_norm(&a2, &int(2), None).unwrap().len(), 6);
        let g = discriminant_group(&a2).unwrap();
        let gamma = g.elements().find(|e| !e.residues().iter().all(|&r| r == 0)).unwrap();
        let lift = g.lift(&gamma);
        let v = enumerate_by_norm(&a2, &rat(2, 3), Some(&lift)).unwrap();
        assert_eq!(v.len(), 3);
        for w in &v {
            assert_eq!(a2.norm(w).unwrap(), rat(2, 3));
            assert_eq!(g.reduce(w).unwrap(), gamma);
        }
        assert!(v.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn zero_norm_and_negative_definite() {
        let a2 = root_a2();
        assert_eq!(enumerate_by_norm(&a2, &int(0), None).unwrap().len(), 1);
        assert_eq!(enumerate_by_norm(&a2.twist(), &int(-2), None).unwrap().len(), 6);
    }

    #[test]
    fn indefinite_is_rejected() {
        assert_eq!(
            enumerate_by_norm(&hyperbolic_plane(), &int(2), None),
            Err(Error::Indefinite)
        );
        assert_eq!(
            enumerate_by_norm(&lambda_cubic(), &int(2), None),
            Err(Error::Indefinite)
        );
    }

    #[test]
    fn box_search_agrees_with_filtered_enumeration() {
        let l = e8();
        let all = enumerate_by_norm(&l, &int(6), None).unwrap();
        let boxed = enumerate_in_box(&l, &int(6), 1).unwrap();
        let filtered: Vec<Vec<BigInt>> = all
            .iter()
            .filter(|v| v.coords().iter().all(|c| c.abs() <= int(1)))
            .map(|v| v.coords().iter().map(|c| c.to_integer()).collect())
            .collect();
        assert_eq!(boxed, filtered);
        let first = first_in_box(&l, &int(6), 1, |_| true).unwrap();
        assert_eq!(first.as_ref(), boxed.first());
    }
}
