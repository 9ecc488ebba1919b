//! Smith normal form over the integers with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// `left * input * right == diagonal form`, with `left` and `right` unimodular.
///
/// The diagonal entries `d_0 | d_1 | ... ` are nonnegative; zero entries
/// (if any) come last.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(input: &IntMatrix) -> SmithForm {
    let m = input.rows();
    let n = input.cols();
    let mut a = input.clone();
    let mut left = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        let Some((pr, pc)) = smallest_nonzero(&a, t) else {
            break;
        };
        a.swap_rows(t, pr);
        left.swap_rows(t, pr);
        a.swap_cols(t, pc);
        right.swap_cols(t, pc);

        loop {
            let mut dirty = false;

            // clear column t below the pivot
            for i in t + 1..m {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut left, i, t, &q);
                if !a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..n {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut right, j, t, &q);
                if !a[(t, j)].is_zero() {
                    dirty = true;
                }
            }

            if dirty {
                // a remainder is now smaller than the pivot; move it into place
                let (pr, pc) = smallest_in_cross(&a, t);
                a.swap_rows(t, pr);
                left.swap_rows(t, pr);
                a.swap_cols(t, pc);
                right.swap_cols(t, pc);
                continue;
            }

            // divisibility: pivot must divide the rest of the block
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[(i, j)] % &a[(t, t)]).is_zero());
            match offender {
                Some((i, _)) => {
                    let one = -BigInt::one();
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut left, t, i, &one);
                }
                None => break,
            }
        }

        if a[(t, t)].is_negative() {
            negate_row(&mut a, t);
            negate_row(&mut left, t);
        }
    }

    let k = m.min(n);
    let diagonal = (0..k).map(|i| a[(i, i)].clone()).collect();
    SmithForm {
        diagonal,
        left,
        right,
    }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn smallest_in_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut consider = |i: usize, j: usize| {
        let v = &a[(i, j)];
        if !v.is_zero() && (a[best].is_zero() || v.abs() < a[best].abs()) {
            best = (i, j);
        }
    };
    for i in t..a.rows() {
        consider(i, t);
    }
    for j in t..a.cols() {
        consider(t, j);
    }
    best
}

/// row[dst] -= q * row[src]
fn row_axpy(a: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for j in 0..a.cols() {
        let t = q * &a[(src, j)];
        a[(dst, j)] -= t;
    }
}

/// col[dst] -= q * col[src]
fn col_axpy(a: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for i in 0..a.rows() {
        let t = q * &a[(i, src)];
        a[(i, dst)] -= t;
    }
}

fn negate_row(a: &mut IntMatrix, r: usize) {
    for j in 0..a.cols() {
        let v = -std::mem::take(&mut a[(r, j)]);
        a[(r, j)] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        let d = s.left.mul(m).unwrap().mul(&s.right).unwrap();
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expect = if i == j {
                    s.diagonal[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(d[(i, j)], expect, "entry ({i},{j}) of {d:?}");
            }
        }
        assert_eq!(s.left.determinant().abs(), BigInt::one());
        assert_eq!(s.right.determinant().abs(), BigInt::one());
        for w in s.diagonal.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
        s
    }

    #[test]
    fn diag_2_2n() {
        let m = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 6]]).unwrap();
        let s = check(&m);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6)]);
        let m = IntMatrix::from_i64_rows(&[&[4, 0], &[0, 6]]).unwrap();
        let s = check(&m);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn rectangular_and_rank_deficient() {
        let m = IntMatrix::from_i64_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]).unwrap();
        let s = check(&m);
        assert_eq!(
            s.diagonal,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        let m = IntMatrix::from_i64_rows(&[&[1, 2, 3, 4], &[2, 4, 6, 8]]).unwrap();
        let s = check(&m);
        assert_eq!(s.rank(), 1);
    }
}
