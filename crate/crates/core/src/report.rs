//! Serializable summaries shared by the command line and the browser demo.

use serde::Serialize;
use serde_json::{json, Value};

use crate::discriminant::DiscriminantGroup;
use crate::error::Result;
use crate::lattice::IntegerLattice;
use crate::matrix::rat_string;
use crate::weil::{build_weil_rep, signature_parameter, RelationReport};

fn gram_rows(l: &IntegerLattice) -> Vec<Vec<String>> {
    l.gram()
        .matrix()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

/// Gram matrix, signature, determinant, discriminant form and level.
pub fn lattice_info(l: &IntegerLattice) -> Result<Value> {
    let group = DiscriminantGroup::new(l)?;
    let sig = l.signature();
    Ok(json!({
        "name": l.name(),
        "rank": l.rank(),
        "signature": [sig.positive(), sig.negative()],
        "gram": gram_rows(l),
        "det": l.determinant().to_string(),
        "order": group.order(),
        "discriminant": group,
        "level": group.level(),
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilCheck {
    pub lattice: Option<String>,
    pub m: i64,
    pub dim: usize,
    pub level: u64,
    pub t_order: u64,
    pub weight: String,
    pub relations: RelationReport,
}

impl WeilCheck {
    pub fn pass(&self) -> bool {
        self.relations.pass && self.t_order == self.level
    }
}

/// Builds the Weil representation of `l` and checks the `SL2(Z)` relations.
pub fn weil_check(l: &IntegerLattice, tol: f64) -> Result<WeilCheck> {
    let m = signature_parameter(l)?;
    let group = DiscriminantGroup::new(l)?;
    let w = build_weil_rep(&group, m)?;
    Ok(WeilCheck {
        lattice: l.name().map(str::to_string),
        m,
        dim: w.dim(),
        level: w.level(),
        t_order: w.t_order(tol),
        weight: rat_string(w.weight()),
        relations: w.verify_sl2_relations(tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::{lambda_cubic, lambda_gm, lambda_sharp};

    #[test]
    fn info_for_cubic() {
        let v = lattice_info(&lambda_cubic()).unwrap();
        assert_eq!(v["level"], 3);
        assert_eq!(v["discriminant"]["divisors"], json!([3]));
        assert_eq!(v["signature"], json!([20, 2]));
        let s = lattice_info(&lambda_sharp()).unwrap();
        assert_eq!(s["order"], 1);
    }

    #[test]
    fn weil_checks() {
        assert!(weil_check(&lambda_gm(), 1e-9).unwrap().pass());
        let tight = weil_check(&lambda_cubic(), 1e-18).unwrap();
        assert!(!tight.relations.pass);
    }
}
