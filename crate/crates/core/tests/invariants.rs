use heegner_lab::arith::{num_divisors, omega, sigma_power, Sieve};
use heegner_lab::bounds::{case_a, case_b, case_c, irr_bound_certificate, BoundCertificate};
use heegner_lab::discriminant::DiscriminantGroup;
use heegner_lab::enumerate::enumerate_by_norm;
use heegner_lab::heegner::{cubic_heegner_index, gm_heegner_index, gm_residue_vector, moment_matrix};
use heegner_lab::lattice::{GramMatrix, IntegerLattice};
use heegner_lab::matrix::IntMatrix;
use heegner_lab::named::{e8, lambda_cubic};
use heegner_lab::snf::smith_normal_form;
use heegner_lab::weil::{build_weil_rep, signature_parameter};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn lattice(rows: &[Vec<i64>]) -> Option<IntegerLattice> {
    let m = IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()).ok()?;
    IntegerLattice::new(GramMatrix::new(m).ok()?).ok()
}

/// Symmetric even matrices of rank 1..=4 with small entries.
fn even_gram(max_rank: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rank).prop_flat_map(|n| {
        proptest::collection::vec(-3i64..=3, n * n).prop_map(move |raw| {
            let mut g = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let v = raw[i.min(j) * n + i.max(j)];
                    g[i][j] = if i == j { 2 * v.abs().max(1) + 2 } else { v };
                }
            }
            g
        })
    })
}

/// Naive oracle: scan the box `|x_i| ≤ sqrt(norm · (G⁻¹)_ii)` around a coset.
fn box_scan(l: &IntegerLattice, norm: &BigRational, shift: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = l.rank();
    let inv = l.inverse_gram();
    let bounds: Vec<i64> = (0..n)
        .map(|i| {
            let b = (norm * &inv[(i, i)]).to_f64().unwrap().max(0.0).sqrt();
            b.ceil() as i64 + 1
        })
        .collect();
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(
        k: usize,
        x: &mut Vec<i64>,
        bounds: &[i64],
        shift: &[BigRational],
        l: &IntegerLattice,
        norm: &BigRational,
        out: &mut Vec<Vec<BigRational>>,
    ) {
        if k == x.len() {
            let v: Vec<BigRational> = x.iter().zip(shift).map(|(&a, s)| BigRational::from_integer(a.into()) + s).collect();
            if &l.gram().pair(&v, &v) == norm {
                out.push(v);
            }
            return;
        }
        let c = shift[k].round().to_integer().to_i64().unwrap();
        for a in -bounds[k] - c..=bounds[k] - c {
            x[k] = a;
            rec(k + 1, x, bounds, shift, l, norm, out);
        }
    }
    rec(0, &mut x, &bounds, shift, l, norm, &mut out);
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_box_scan(g in even_gram(3), norm in 0i64..=5) {
        let Some(l) = lattice(&g) else { return Ok(()); };
        prop_assume!(l.is_positive_definite());
        let group = DiscriminantGroup::new(&l).unwrap();
        prop_assume!(group.order() <= 64);
        for el in group.elements() {
            let lift = group.lift(&el);
            // coset norms lie in 2q(γ) + 2Z
            let target = BigRational::from_integer((2 * norm).into()) + group.q(&el) * r(2, 1);
            let fast: Vec<Vec<BigRational>> = enumerate_by_norm(&l, &target, Some(&lift))
                .unwrap()
                .into_iter()
                .map(|v| v.into_coords())
                .collect();
            let slow = box_scan(&l, &target, lift.coords());
            prop_assert_eq!(fast, slow);
        }
    }

    #[test]
    fn discriminant_order_is_abs_det(g in even_gram(4)) {
        let Some(l) = lattice(&g) else { return Ok(()); };
        let group = DiscriminantGroup::new(&l).unwrap();
        prop_assert_eq!(BigInt::from(group.order()), l.determinant().abs());
        let snf = smith_normal_form(l.gram().matrix());
        let prod: BigInt = snf.diagonal.iter().product();
        prop_assert_eq!(prod.abs(), l.determinant().abs());
    }

    #[test]
    fn q_values_agree_with_lifted_norms(g in even_gram(4)) {
        let Some(l) = lattice(&g) else { return Ok(()); };
        let group = DiscriminantGroup::new(&l).unwrap();
        prop_assume!(group.order() <= 400);
        let mut level = 1u64;
        for el in group.elements() {
            let lift = group.lift(&el);
            let half = l.norm(&lift).unwrap() / BigRational::from_integer(2.into());
            let q = &half - BigRational::from_integer(half.floor().to_integer());
            prop_assert_eq!(&q, &group.q(&el));
            prop_assert_eq!(group.reduce(&lift).unwrap(), el.clone());
            level = level.lcm(&q.denom().to_u64().unwrap());
        }
        prop_assert_eq!(level, group.level());
    }

    #[test]
    fn weil_relations_hold(g in even_gram(4)) {
        let Some(l) = lattice(&g) else { return Ok(()); };
        let Ok(m) = signature_parameter(&l) else { return Ok(()); };
        let group = DiscriminantGroup::new(&l).unwrap();
        prop_assume!(group.order() <= 120);
        let w = build_weil_rep(&group, m).unwrap();
        let report = w.verify_sl2_relations(1e-9);
        prop_assert!(report.pass, "{:?}", report);
        prop_assert_eq!(w.t_order(1e-9), group.level());
        for z in w.t_diagonal() {
            prop_assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_matches_divisor_sum(s in 0u32..6, m in 1u64..5000) {
        let naive: BigInt = (1..=m).filter(|d| m % d == 0).map(|d| num_traits::pow(BigInt::from(d), s as usize)).sum();
        prop_assert_eq!(sigma_power(s, m).unwrap(), naive);
    }

    #[test]
    fn moment_submatrices_are_principal(idx in proptest::collection::vec(0usize..8, 0..6)) {
        let l = e8();
        let vs: Vec<_> = (0..8)
            .map(|i| {
                let mut c = vec![BigInt::zero(); 8];
                c[i] = BigInt::from(1);
                c[(i + 3) % 8] += BigInt::from(-1);
                l.lattice_vector(&c).unwrap()
            })
            .collect();
        let full = moment_matrix(&l, &vs).unwrap();
        let sub: Vec<_> = idx.iter().map(|&i| vs[i].clone()).collect();
        let part = moment_matrix(&l, &sub).unwrap();
        prop_assert_eq!(part.entries, full.entries.principal(&idx));
        prop_assert!(full.is_positive_semidefinite());
    }

    #[test]
    fn case_c_witnesses_are_squares(half in 1i64..5000, n_max in 1i64..200) {
        let d = 2 * half;
        let w = case_c(d, n_max).unwrap();
        for &(n, m) in &w {
            prop_assert!(n >= 1 && n <= n_max && m >= 0);
            prop_assert_eq!(d / 2 - n, m * m);
        }
        let naive = (1..=n_max.min(half)).filter(|n| {
            let t = half - n;
            let s = (t as f64).sqrt() as i64;
            (s - 1..=s + 1).any(|x| x >= 0 && x * x == t)
        }).count();
        prop_assert_eq!(w.len(), naive);
    }
}

#[test]
fn predicates_imply_congruences() {
    for d in (2..=10_000i64).step_by(2) {
        if case_a(d).unwrap().pass {
            assert!(matches!(d % 6, 0 | 2), "{d}");
        }
        if case_b(d).unwrap().pass {
            assert!(matches!(d % 8, 2 | 4), "{d}");
        }
    }
}

#[test]
fn index_lattices() {
    let three = BigRational::from_integer(3.into());
    let four = BigRational::from_integer(4.into());
    for d in (6..=600).filter(|d| matches!(d % 6, 0 | 2)) {
        assert!((cubic_heegner_index(d).unwrap().n * &three).is_integer());
    }
    for d in (8..=600).filter(|d| matches!(d % 8, 0 | 2 | 4)) {
        let idx = gm_heegner_index(d).unwrap();
        let expect = match d % 8 {
            0 => 1,
            2 => 2,
            _ => 1,
        };
        assert_eq!(idx.len(), expect);
        for i in &idx {
            assert!((&i.n * &four).is_integer());
            let eight_n = (&i.n * BigRational::from_integer(8.into())).to_integer();
            assert_eq!(eight_n.mod_floor(&BigInt::from(8)), BigInt::from(d % 8));
        }
    }
}

/// Independent Gram arithmetic on the 3×3 matrices, scaled by 4 to stay integral.
#[test]
fn gm_residue_identities_by_hand() {
    for d in (1..=1000i64).filter(|d| matches!(d % 8, 0 | 2 | 4)) {
        let ws = gm_residue_vector(d).unwrap();
        for w in &ws {
            let k: Vec<Vec<i64>> = w
                .gram
                .matrix()
                .to_rows()
                .iter()
                .map(|row| row.iter().map(|x| x.to_i64().unwrap()).collect())
                .collect();
            let v2: Vec<i64> = w.residue_vector.iter().map(|x| (x * r(2, 1)).to_integer().to_i64().unwrap()).collect();
            let pair = |a: &[i64], b: &[i64]| -> i64 {
                (0..3).map(|i| (0..3).map(|j| a[i] * k[i][j] * b[j]).sum::<i64>()).sum()
            };
            assert_eq!(pair(&v2, &[1, 0, 0]), 0, "d={d}");
            assert_eq!(pair(&v2, &[0, 1, 0]), 0, "d={d}");
            // ½⟨v,v⟩ = d/8  ⇔  ⟨2v,2v⟩ = d
            assert_eq!(pair(&v2, &v2), d, "d={d}");
            assert!(w.checks.pass);
        }
        if ws.len() == 2 {
            let diff: Vec<BigRational> = ws[0].residue_vector.iter().zip(&ws[1].residue_vector).map(|(a, b)| a - b).collect();
            assert!(diff.iter().any(|x| !x.is_integer()));
            assert_eq!(diff, vec![r(-1, 2), r(1, 2), r(0, 1)]);
        }
    }
}

#[test]
fn sieve_agrees_with_trial_division() {
    let s = Sieve::new(20_000);
    for n in (1..=20_000u32).step_by(7) {
        assert_eq!(s.omega(n), omega(n as u64).unwrap());
        assert_eq!(s.num_divisors(n), num_divisors(n as u64).unwrap());
    }
}

#[test]
fn cubic_q_table() {
    let g = DiscriminantGroup::new(&lambda_cubic()).unwrap();
    let mut qs: Vec<BigRational> = g.elements().map(|e| g.q(&e)).collect();
    qs.sort();
    assert_eq!(qs, vec![r(0, 1), r(1, 3), r(1, 3)]);
}

#[test]
fn certificates_round_trip_over_a_range() {
    for g in 2..=40 {
        let c = irr_bound_certificate(g, 20).unwrap();
        let uniform = c.route("uniform").unwrap();
        assert_eq!(uniform.exponent, 14);
        let w = omega((g - 1) as u64).unwrap();
        assert_eq!(uniform.multiplier.value, 1 << w);
        if w >= 1 {
            assert_eq!(uniform.multiplier.value, 2 * c.fm_partner_count);
        }
        for route in &c.routes {
            if route.route != "uniform" {
                assert_eq!(route.exponent, 10);
            }
        }
        let s = serde_json::to_string(&c).unwrap();
        let back: BoundCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}

#[test]
fn negative_definite_enumeration_mirrors_positive() {
    let l = e8();
    let t = l.twist();
    let pos = enumerate_by_norm(&l, &r(4, 1), None).unwrap().len();
    let neg = enumerate_by_norm(&t, &r(-4, 1), None).unwrap().len();
    assert_eq!(pos, neg);
    assert!(!l.twist().determinant().is_negative());
}
