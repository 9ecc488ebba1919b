//! Admissibility of genera, growth inequalities and bound certificates.
//!
//! A certificate for the moduli space `F_g` of polarized K3 surfaces of
//! genus `g` lists every route that bounds `irr(F_g)` polynomially in `g`,
//! with its exponent, multiplier and the lattice data that produced it.
//! Multiplicative constants are kept symbolic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, omega, sigma_power, Sieve};
use crate::error::{precondition, Result};
use crate::heegner::{
    cubic_heegner_index, embed_k3_lattice, gm_heegner_index, hilb_square_route, HeegnerIndex, HilbSquareRoute,
};
use crate::matrix::rat_serde;

/// Range where the special routes apply: `d = 2g − 2 > 6`.
pub const SPECIAL_ROUTE_MIN_D: i64 = 7;

/// Outcome of an admissibility predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicate {
    pub pass: bool,
    /// First clause that fails, if any.
    pub failing: Option<String>,
    /// Whether `d > 6`, where the routes apply.
    pub in_range: bool,
}

fn even_d(d: i64) -> Result<()> {
    if d <= 0 || d % 2 != 0 {
        return Err(precondition(format!("d must be even and positive, got {d}")));
    }
    Ok(())
}

fn predicate(d: i64, clauses: &[(&str, bool)]) -> Predicate {
    let failing = clauses.iter().find(|(_, ok)| !ok).map(|(c, _)| c.to_string());
    Predicate {
        pass: failing.is_none(),
        failing,
        in_range: d >= SPECIAL_ROUTE_MIN_D,
    }
}

fn odd_primes(d: i64) -> Vec<u64> {
    factorize(d as u64)
        .expect("positive even d")
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p != 2)
        .collect()
}

/// Cubic-fourfold condition: `d ≡ 0, 2 (mod 6)`, `4 ∤ d`, `9 ∤ d`, and no odd
/// prime `p ≡ 2 (mod 3)` divides `d`.
pub fn case_a(d: i64) -> Result<Predicate> {
    even_d(d)?;
    let primes = odd_primes(d);
    Ok(predicate(
        d,
        &[
            ("d ≡ 0 or 2 (mod 6)", matches!(d % 6, 0 | 2)),
            ("d not divisible by 4", d % 4 != 0),
            ("d not divisible by 9", d % 9 != 0),
            ("no odd prime p ≡ 2 (mod 3) divides d", primes.iter().all(|p| p % 3 != 2)),
        ],
    ))
}

/// Gushel-Mukai condition: `d ≡ 2, 4 (mod 8)` and no prime `p ≡ 3 (mod 4)`
/// divides `d`.
pub fn case_b(d: i64) -> Result<Predicate> {
    even_d(d)?;
    let primes = odd_primes(d);
    Ok(predicate(
        d,
        &[
            ("d ≡ 2 or 4 (mod 8)", matches!(d % 8, 2 | 4)),
            ("no prime p ≡ 3 (mod 4) divides d", primes.iter().all(|p| p % 4 != 3)),
        ],
    ))
}

/// Witnesses `(n, m)` with `d/2 − n = m²`, `1 ≤ n ≤ min(n_max, d/2)`, by decreasing `n`.
pub fn case_c(d: i64, n_max: i64) -> Result<Vec<(i64, i64)>> {
    if d < 2 {
        return Err(precondition(format!("d must be at least 2, got {d}")));
    }
    let half = d / 2;
    let mut out = Vec::new();
    let mut m = 0i64;
    while m * m < half {
        let n = half - m * m;
        if n <= n_max {
            out.push((n, m));
        }
        m += 1;
    }
    Ok(out)
}

/// Degree of the map from cubic fourfolds to K3 surfaces: 2 if `d ≡ 0 (mod 6)`, else 1.
pub fn cubic_map_degree(d: i64) -> Result<u32> {
    let a = case_a(d)?;
    if !a.pass {
        return Err(precondition(format!(
            "d = {d} is not admissible for cubic fourfolds: {}",
            a.failing.unwrap_or_default()
        )));
    }
    Ok(if d % 6 == 0 { 2 } else { 1 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub d: i64,
    pub g: i64,
    pub case_a: Predicate,
    pub case_b: Predicate,
    pub case_c_witnesses: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub input: String,
    pub clause: String,
    pub pass: bool,
}

fn clause_label(case: &str, p: &Predicate) -> String {
    let base = match &p.failing {
        None => case.to_string(),
        Some(c) => format!("{case}: {c}"),
    };
    if p.in_range {
        base
    } else {
        format!("{base} (d ≤ 6, route not applicable)")
    }
}

impl AdmissibilityReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let input = self.d.to_string();
        let c = if self.case_c_witnesses.is_empty() {
            "C: no n with d/2 − n a square".to_string()
        } else {
            let ns: Vec<String> = self.case_c_witnesses.iter().map(|(n, _)| n.to_string()).collect();
            format!("C: n ∈ {{{}}}", ns.join(" "))
        };
        let c = if self.d >= SPECIAL_ROUTE_MIN_D {
            c
        } else {
            format!("{c} (d ≤ 6, route not applicable)")
        };
        vec![
            CsvRow { input: input.clone(), clause: clause_label("A", &self.case_a), pass: self.case_a.pass },
            CsvRow { input: input.clone(), clause: clause_label("B", &self.case_b), pass: self.case_b.pass },
            CsvRow { input, clause: c, pass: !self.case_c_witnesses.is_empty() },
        ]
    }
}

pub fn admissibility(d: i64, n_max: i64) -> Result<AdmissibilityReport> {
    Ok(AdmissibilityReport {
        d,
        g: d / 2 + 1,
        case_a: case_a(d)?,
        case_b: case_b(d)?,
        case_c_witnesses: case_c(d, n_max)?,
    })
}

/// Number of Fourier-Mukai partners `2^{max(ω(g−1) − 1, 0)}` of a general K3 of genus `g`.
pub fn fm_partner_count(g: i64) -> Result<u64> {
    if g < 2 {
        return Err(precondition(format!("g must be at least 2, got {g}")));
    }
    let w = omega((g - 1) as u64)?;
    Ok(1u64 << w.saturating_sub(1))
}

/// Exponent `m/2` of the degree of irrationality of Heegner divisors.
pub fn heegner_irr_exponent(m: i64) -> Result<u32> {
    if m < 4 || m % 2 != 0 {
        return Err(precondition(format!("Heegner bound needs an even m ≥ 4, got {m}")));
    }
    Ok((m / 2) as u32)
}

/// Exponent `1 + m/2` for Kudla cycles of codimension `r`, `1 ≤ r ≤ m − 2`.
pub fn kudla_irr_exponent(m: i64, r: i64) -> Result<u32> {
    if m % 2 != 0 || m < 3 {
        return Err(precondition(format!("Kudla bound needs an even m ≥ 4, got {m}")));
    }
    if r < 1 || r > m - 2 {
        return Err(precondition(format!("Kudla bound needs 1 ≤ r ≤ m − 2, got r = {r}, m = {m}")));
    }
    Ok((1 + m / 2) as u32)
}

/// Digits of precision in the `ζ` upper bound.
pub const ZETA_DIGITS: u32 = 40;
/// Terms summed before the integral-test tail.
pub const ZETA_TERMS: u64 = 2000;

/// `Z` with `ζ(s) ≤ Z / 10^ZETA_DIGITS`, rigorously, for integer `s ≥ 2`.
///
/// Every partial-sum term is rounded up, and the tail beyond `M` terms is
/// bounded by `∫_M^∞ x^{−s} dx = M^{1−s} / (s − 1)`, also rounded up.
pub fn zeta_upper_scaled(s: u32) -> Result<BigInt> {
    if s < 2 {
        return Err(precondition("ζ(s) diverges for s ≤ 1"));
    }
    let scale: BigInt = BigInt::from(10u32).pow(ZETA_DIGITS);
    let mut total = BigInt::zero();
    for n in 1..=ZETA_TERMS {
        let denom: BigInt = BigInt::from(n).pow(s);
        total += Integer::div_ceil(&scale, &denom);
    }
    let tail_den = BigInt::from(s - 1) * BigInt::from(ZETA_TERMS).pow(s - 1);
    total += Integer::div_ceil(&scale, &tail_den);
    Ok(total)
}

pub fn zeta_upper(s: u32) -> Result<BigRational> {
    let scale: BigInt = BigInt::from(10u32).pow(ZETA_DIGITS);
    Ok(BigRational::new(zeta_upper_scaled(s)?, scale))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub k: u32,
    pub m_lo: u64,
    pub m_hi: u64,
    #[serde(with = "rat_serde")]
    pub zeta_upper: BigRational,
    pub checked: u64,
    pub lower_failures: Vec<u64>,
    pub upper_failures: Vec<u64>,
    pub pass: bool,
}

impl SandwichReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let clause = format!("m^{s} <= sigma_{s}(m) <= zeta({s}) m^{s}", s = self.k - 1);
        (self.m_lo..=self.m_hi)
            .map(|m| CsvRow {
                input: m.to_string(),
                clause: clause.clone(),
                pass: !self.lower_failures.contains(&m) && !self.upper_failures.contains(&m),
            })
            .collect()
    }
}

/// `m^{k−1} ≤ σ_{k−1}(m) ≤ ζ(k−1) m^{k−1}` for every `m` in `[m_lo, m_hi]`.
pub fn sandwich_check(k: u32, m_lo: u64, m_hi: u64) -> Result<SandwichReport> {
    if k < 3 {
        return Err(precondition(format!("weight k must be at least 3, got {k}")));
    }
    if m_lo == 0 || m_lo > m_hi {
        return Err(precondition(format!("invalid range {m_lo}:{m_hi}")));
    }
    let s = k - 1;
    let z = zeta_upper_scaled(s)?;
    let scale: BigInt = BigInt::from(10u32).pow(ZETA_DIGITS);
    let mut lower_failures = Vec::new();
    let mut upper_failures = Vec::new();
    for m in m_lo..=m_hi {
        let sigma = sigma_power(s, m)?;
        let ms: BigInt = BigInt::from(m).pow(s);
        if sigma < ms {
            lower_failures.push(m);
        }
        if &sigma * &scale > &z * &ms {
            upper_failures.push(m);
        }
    }
    let pass = lower_failures.is_empty() && upper_failures.is_empty();
    Ok(SandwichReport {
        k,
        m_lo,
        m_hi,
        zeta_upper: BigRational::new(z, scale),
        checked: m_hi - m_lo + 1,
        lower_failures,
        upper_failures,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorReport {
    pub n_lo: u32,
    pub n_hi: u32,
    pub checked: u64,
    /// `n` with `2^{ω(n)} > d(n)`.
    pub failures: Vec<u32>,
    /// Squarefree `n` with `2^{ω(n)} ≠ d(n)`, or non-squarefree `n` with equality.
    pub equality_mismatches: Vec<u32>,
    pub squarefree_count: u64,
    pub pass: bool,
}

/// `2^{ω(n)} ≤ d(n)` on `[n_lo, n_hi]`, with equality exactly on squarefree `n`.
pub fn divisor_bound_check(n_lo: u32, n_hi: u32) -> Result<DivisorReport> {
    if n_lo == 0 || n_lo > n_hi {
        return Err(precondition(format!("invalid range {n_lo}:{n_hi}")));
    }
    let sieve = Sieve::new(n_hi);
    let mut failures = Vec::new();
    let mut equality_mismatches = Vec::new();
    let mut squarefree_count = 0;
    for n in n_lo..=n_hi {
        let e = sieve.exponents(n);
        let lhs = 1u64 << e.len();
        let rhs: u64 = e.iter().map(|&x| x as u64 + 1).product();
        let sf = e.iter().all(|&x| x == 1);
        squarefree_count += sf as u64;
        if lhs > rhs {
            failures.push(n);
        }
        if sf != (lhs == rhs) {
            equality_mismatches.push(n);
        }
    }
    let pass = failures.is_empty() && equality_mismatches.is_empty();
    Ok(DivisorReport {
        n_lo,
        n_hi,
        checked: (n_hi - n_lo + 1) as u64,
        failures,
        equality_mismatches,
        squarefree_count,
        pass,
    })
}

/// Least-squares slope of `log value` against `log index`, zero values dropped.
pub fn growth_exponent_estimate(series: &[(BigRational, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(i, v)| *v > 0.0 && i > &BigRational::zero())
        .map(|(i, v)| (i.to_f64().unwrap_or(f64::NAN).ln(), v.ln()))
        .collect();
    if pts.len() < 8 {
        return Err(precondition(format!("need at least 8 nonzero points, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(precondition("indices must not all coincide"));
    }
    Ok(sxy / sxx)
}

/// Integer multiplier with the expression that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplier {
    pub expr: String,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteIndex {
    Heegner(Vec<HeegnerIndex>),
    HilbertSquare(HilbSquareRoute),
    Kudla {
        rank: usize,
        #[serde(with = "rat_serde")]
        det: BigRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub route: String,
    pub exponent: u32,
    pub multiplier: Multiplier,
    /// Symbolic constant of the bound `irr ≤ multiplier · constant · g^exponent`.
    pub constant: String,
    pub index: RouteIndex,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub g: i64,
    pub d: i64,
    pub omega_g_minus_1: u32,
    pub fm_partner_count: u64,
    /// True when `ω(g − 1) = 0` and the partner count was clamped to 1.
    pub fm_clamped: bool,
    pub routes: Vec<Route>,
    /// Covering gonality is bounded by the same routes.
    pub covgon: String,
}

impl BoundCertificate {
    pub fn route(&self, name: &str) -> Option<&Route> {
        self.routes.iter().find(|r| r.route == name)
    }

    /// Smallest exponent among the routes.
    pub fn best_exponent(&self) -> u32 {
        self.routes.iter().map(|r| r.exponent).min().unwrap_or(0)
    }
}

const HEEGNER_M: i64 = 20;
const KUDLA_M: i64 = 26;
const KUDLA_R: i64 = 7;

pub fn irr_bound_certificate(g: i64, n_max: i64) -> Result<BoundCertificate> {
    if g < 2 {
        return Err(precondition(format!("g must be at least 2, got {g}")));
    }
    let d = 2 * g - 2;
    let w = omega((g - 1) as u64)?;
    let special = d >= SPECIAL_ROUTE_MIN_D;
    let heegner_exp = heegner_irr_exponent(HEEGNER_M)?;
    let mut routes = Vec::new();

    if special && case_a(d)?.pass {
        let deg = cubic_map_degree(d)? as u64;
        routes.push(Route {
            route: "A".into(),
            exponent: heegner_exp,
            multiplier: Multiplier { expr: "deg(C_d ⇢ F_g)".into(), value: deg },
            constant: "C".into(),
            index: RouteIndex::Heegner(vec![cubic_heegner_index(d)?]),
            source: "special cubic fourfolds C_d with associated K3 surfaces; irr(F_g) ≤ deg · irr(C_d)".into(),
        });
    }
    if special && case_b(d)?.pass {
        routes.push(Route {
            route: "B".into(),
            exponent: heegner_exp,
            multiplier: Multiplier { expr: "1".into(), value: 1 },
            constant: "C".into(),
            index: RouteIndex::Heegner(gm_heegner_index(d)?),
            source: "Gushel-Mukai fourfolds D_d with associated K3 surfaces; irr(F_g) = irr(D_d)".into(),
        });
    }
    if special {
        for (n, _) in case_c(d, n_max)? {
            routes.push(Route {
                route: format!("C({n})"),
                exponent: heegner_exp,
                multiplier: Multiplier { expr: "1".into(), value: 1 },
                constant: format!("C_{n}"),
                index: RouteIndex::HilbertSquare(hilb_square_route(g, n)?),
                source: "Hilbert squares (S^[2], H_2 − (m/2)Δ) in K3^[2]-type moduli of degree 2n, divisibility 1".into(),
            });
        }
    }
    let emb = embed_k3_lattice(d)?;
    if !emb.pass() {
        return Err(precondition(format!("embedding witness for d = {d} failed its checks")));
    }
    routes.push(Route {
        route: "uniform".into(),
        exponent: kudla_irr_exponent(KUDLA_M, KUDLA_R)?,
        multiplier: Multiplier { expr: "2^omega(g-1)".into(), value: 1u64 << w },
        constant: "C_eps".into(),
        index: RouteIndex::Kudla { rank: emb.complement_basis.len(), det: emb.det_check.lhs.clone() },
        source: "Kudla special cycle of rank 7 in the period space of E8^3 ⊕ U^2; multiplier covers Fourier-Mukai partners".into(),
    });

    Ok(BoundCertificate {
        g,
        d,
        omega_g_minus_1: w,
        fm_partner_count: fm_partner_count(g)?,
        fm_clamped: w == 0,
        routes,
        covgon: "covgon(F_g) ≤ irr(F_g), same bound".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{int, rat};

    #[test]
    fn case_a_examples() {
        assert!(case_a(26).unwrap().pass);
        let p = case_a(8).unwrap();
        assert_eq!(p.failing.as_deref(), Some("d not divisible by 4"));
        let p = case_a(18).unwrap();
        assert_eq!(p.failing.as_deref(), Some("d not divisible by 9"));
        assert!(case_a(7).is_err());
        assert!(!case_a(2).unwrap().in_range);
    }

    #[test]
    fn case_b_examples() {
        assert!(case_b(10).unwrap().pass);
        assert_eq!(case_b(12).unwrap().failing.as_deref(), Some("no prime p ≡ 3 (mod 4) divides d"));
        assert!(case_b(26).unwrap().pass);
    }

    #[test]
    fn case_c_examples() {
        assert_eq!(case_c(18, 9).unwrap(), vec![(9, 0), (8, 1), (5, 2)]);
        assert_eq!(case_c(4, 10).unwrap(), vec![(2, 0), (1, 1)]);
        assert_eq!(case_c(2, 1).unwrap(), vec![(1, 0)]);
    }

    #[test]
    fn map_degree() {
        assert_eq!(cubic_map_degree(26).unwrap(), 1);
        assert_eq!(cubic_map_degree(42).unwrap(), 2);
        assert!(cubic_map_degree(8).is_err());
    }

    #[test]
    fn fm_counts() {
        assert_eq!(fm_partner_count(13).unwrap(), 2);
        assert_eq!(fm_partner_count(8).unwrap(), 1);
        assert_eq!(fm_partner_count(2).unwrap(), 1);
        assert!(fm_partner_count(1).is_err());
    }

    #[test]
    fn exponents() {
        assert_eq!(heegner_irr_exponent(20).unwrap(), 10);
        assert_eq!(heegner_irr_exponent(4).unwrap(), 2);
        assert!(heegner_irr_exponent(2).is_err());
        assert_eq!(kudla_irr_exponent(26, 7).unwrap(), 14);
        assert!(kudla_irr_exponent(26, 25).is_err());
    }

    #[test]
    fn zeta_bounds_bracket_known_values() {
        // ζ(2) = π²/6
        let z2 = zeta_upper(2).unwrap().to_f64().unwrap();
        let pi2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(z2 >= pi2 && z2 - pi2 < 1e-6);
        assert!(zeta_upper(1).is_err());
    }

    #[test]
    fn sandwich_examples() {
        let r = sandwich_check(3, 2, 2).unwrap();
        assert!(r.pass);
        assert_eq!(sigma_power(2, 2).unwrap(), BigInt::from(5));
        assert!(sandwich_check(11, 1, 2000).unwrap().pass);
        assert!(sandwich_check(2, 1, 10).is_err());
    }

    #[test]
    fn divisor_bound() {
        let r = divisor_bound_check(1, 100_000).unwrap();
        assert!(r.pass);
        assert_eq!(r.checked, 100_000);
    }

    #[test]
    fn growth_fits() {
        let exact: Vec<_> = (1..=20).map(|i| (int(i), (i as f64).powi(10))).collect();
        assert!((growth_exponent_estimate(&exact).unwrap() - 10.0).abs() < 1e-9);
        let flat: Vec<_> = (1..=20).map(|i| (int(i), 3.0)).collect();
        assert!(growth_exponent_estimate(&flat).unwrap().abs() < 1e-12);
        let sig: Vec<_> = (1..=1000u64)
            .map(|m| (int(m as i64), sigma_power(10, m).unwrap().to_f64().unwrap()))
            .collect();
        let slope = growth_exponent_estimate(&sig).unwrap();
        assert!((10.0..=10.1).contains(&slope), "{slope}");
        assert!(growth_exponent_estimate(&exact[..7]).is_err());
    }

    #[test]
    fn certificate_g8() {
        let c = irr_bound_certificate(8, 10).unwrap();
        let a = c.route("A").unwrap();
        assert_eq!(a.multiplier.value, 1);
        match &a.index {
            RouteIndex::Heegner(v) => {
                assert_eq!(v[0].n, rat(7, 3));
                assert_eq!(v[0].gamma_label.as_deref(), Some("gamma1"));
            }
            other => panic!("{other:?}"),
        }
        assert!(c.route("B").is_none());
        let names: Vec<&str> = c.routes.iter().map(|r| r.route.as_str()).collect();
        assert_eq!(names, vec!["A", "C(7)", "C(6)", "C(3)", "uniform"]);
        match &c.route("C(3)").unwrap().index {
            RouteIndex::HilbertSquare(h) => assert_eq!(h.m, 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(c.route("uniform").unwrap().multiplier.value, 2);
    }

    #[test]
    fn certificate_g14_and_g2() {
        let c = irr_bound_certificate(14, 1).unwrap();
        assert_eq!(c.route("A").unwrap().multiplier.value, 1);
        match &c.route("B").unwrap().index {
            RouteIndex::Heegner(v) => {
                assert_eq!(v.len(), 2);
                assert!(v.iter().all(|i| i.n == rat(13, 4)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.route("uniform").unwrap().multiplier.value, 2);
        let c2 = irr_bound_certificate(2, 10).unwrap();
        assert_eq!(c2.routes.len(), 1);
        assert_eq!(c2.routes[0].multiplier.value, 1);
        assert!(c2.fm_clamped);
        assert_eq!(c2.routes[0].exponent, 14);
    }

    #[test]
    fn certificate_round_trip() {
        let c = irr_bound_certificate(14, 10).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: BoundCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
