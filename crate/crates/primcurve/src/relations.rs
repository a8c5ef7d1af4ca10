//! Dual pairs and the binary relations between curve/disk configurations
//! that the sequence constructions certify.
//!
//! All relations here are statements about isotopy classes, so every
//! clause is checked through exact geometric intersection numbers of the
//! drawn representatives (pairwise minimal position via bigon removal).

use crate::chart::SurfaceChart;
use crate::curve::EmbeddedCurve;
use crate::disks::DiskRep;
use crate::error::{Error, Result};
use crate::freegroup::is_primitive_word;
use crate::tighten::geometric_intersection;
use serde_json::{json, Value};

/// A primitive curve together with a dual disk: the curve crosses the disk
/// boundary exactly once.  Such a curve is automatically primitive, and
/// the disk is automatically nonseparating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPair {
    pub curve: EmbeddedCurve,
    pub disk: DiskRep,
}

impl DualPair {
    pub fn validate(chart: &SurfaceChart, curve: EmbeddedCurve, disk: DiskRep) -> Result<DualPair> {
        curve.validate(chart)?;
        if !curve.is_closed() {
            return Err(Error::Precondition("a dual pair needs a closed curve".into()));
        }
        let n = geometric_intersection(chart, &curve, disk.boundary())?;
        if n != 1 {
            return Err(Error::Precondition(format!(
                "curve meets the disk boundary {n} times, expected 1"
            )));
        }
        // Consistency checks implied by duality.
        disk.require_nonseparating()?;
        let w = curve.word(chart)?;
        if !is_primitive_word(&w, chart.genus()) {
            return Err(Error::ModelDefect(format!(
                "curve dual to a disk has non-primitive word {:?}",
                w.letters()
            )));
        }
        Ok(DualPair { curve, disk })
    }

    pub fn to_json(&self, chart: &SurfaceChart) -> Value {
        json!({
            "curve": self.curve.to_json(chart),
            "disk": self.disk.to_json(chart),
        })
    }

    pub fn from_json(chart: &SurfaceChart, v: &Value) -> Result<DualPair> {
        let curve = EmbeddedCurve::from_json(
            v.get("curve").ok_or_else(|| Error::Parse("dual pair: missing curve".into()))?,
        )?;
        let disk = DiskRep::from_json(
            chart,
            v.get("disk").ok_or_else(|| Error::Parse("dual pair: missing disk".into()))?,
        )?;
        DualPair::validate(chart, curve, disk)
    }
}

/// Outcome of a relation check: every violated clause is reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

impl RelationReport {
    fn from_failures(failures: Vec<String>) -> RelationReport {
        RelationReport { ok: failures.is_empty(), failures }
    }
}

fn check_count(
    chart: &SurfaceChart,
    a: &EmbeddedCurve,
    b: &EmbeddedCurve,
    want: usize,
    clause: &str,
    failures: &mut Vec<String>,
) -> Result<()> {
    let got = geometric_intersection(chart, a, b)?;
    if got != want {
        failures.push(format!("{clause}: intersection number {got}, expected {want}"));
    }
    Ok(())
}

/// Checks that `disk` is a dual disk of `curve`.
pub fn verify_dual_pair(
    chart: &SurfaceChart,
    curve: &EmbeddedCurve,
    disk: &DiskRep,
) -> Result<RelationReport> {
    curve.validate(chart)?;
    let mut failures = Vec::new();
    if !curve.is_closed() {
        failures.push("dual pair: curve is not closed".into());
    }
    if !disk.nonseparating() {
        failures.push("dual pair: disk is separating".into());
    }
    check_count(chart, curve, disk.boundary(), 1, "curve vs disk boundary", &mut failures)?;
    Ok(RelationReport::from_failures(failures))
}

/// Checks that `c1` and `c2` are disjoint and share the dual disk `disk`
/// (the c-adjacency relation).
pub fn verify_common_dual(
    chart: &SurfaceChart,
    c1: &EmbeddedCurve,
    c2: &EmbeddedCurve,
    disk: &DiskRep,
) -> Result<RelationReport> {
    let mut failures = Vec::new();
    for r in [verify_dual_pair(chart, c1, disk)?, verify_dual_pair(chart, c2, disk)?] {
        failures.extend(r.failures);
    }
    check_count(chart, c1, c2, 0, "curve vs curve", &mut failures)?;
    Ok(RelationReport::from_failures(failures))
}

/// Checks that the configurations C1 (with dual disk D1) and C2 (with dual
/// disk D2) are separated: every piece of one is disjoint from every piece
/// of the other.  This is the s-adjacency relation in genus 2 and the
/// p-adjacency relation in higher genus.
pub fn verify_separated(
    chart: &SurfaceChart,
    p1: &DualPair,
    p2: &DualPair,
) -> Result<RelationReport> {
    let mut failures = Vec::new();
    for r in [
        verify_dual_pair(chart, &p1.curve, &p1.disk)?,
        verify_dual_pair(chart, &p2.curve, &p2.disk)?,
    ] {
        failures.extend(r.failures);
    }
    check_count(chart, &p1.curve, &p2.curve, 0, "C1 vs C2", &mut failures)?;
    check_count(chart, &p1.curve, p2.disk.boundary(), 0, "C1 vs D2 boundary", &mut failures)?;
    check_count(chart, p1.disk.boundary(), &p2.curve, 0, "D1 boundary vs C2", &mut failures)?;
    check_count(
        chart,
        p1.disk.boundary(),
        p2.disk.boundary(),
        0,
        "D1 boundary vs D2 boundary",
        &mut failures,
    )?;
    Ok(RelationReport::from_failures(failures))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disks::meridian_disk;
    use crate::geom::{q, Pt};

    fn handle_one_curve(chart: &SurfaceChart) -> EmbeddedCurve {
        let t = q(1, 5);
        let exit = chart.circle(1).point_at(&t);
        let entry = chart.circle(0).point_at(&t);
        EmbeddedCurve::closed(vec![vec![entry, Pt::of(0, 1, 3, 1), exit]])
    }

    fn handle_two_curve(chart: &SurfaceChart) -> EmbeddedCurve {
        // Through handle 2 (circles 2 and 3 in genus 2): exit circle 2 at
        // raw -1/2, re-enter circle 3 at raw 1/2, returning below the pair.
        let exit = chart.circle(2).point_at(&q(-1, 2));
        let entry = chart.circle(3).point_at(&q(1, 2));
        EmbeddedCurve::closed(vec![vec![
            entry,
            Pt::of(13, 2, 0, 1),
            Pt::of(4, 1, -2, 1),
            exit,
        ]])
    }

    #[test]
    fn handle_curve_with_meridian_is_dual_pair() {
        let chart = SurfaceChart::standard(2);
        let c = handle_one_curve(&chart);
        let d = meridian_disk(&chart, 0, &q(1, 4)).unwrap();
        let pair = DualPair::validate(&chart, c.clone(), d.clone()).unwrap();
        let rep = verify_dual_pair(&chart, &pair.curve, &pair.disk).unwrap();
        assert!(rep.ok, "{:?}", rep.failures);
        // The wrong meridian is rejected.
        let d2 = meridian_disk(&chart, 1, &q(1, 4)).unwrap();
        assert!(DualPair::validate(&chart, c, d2).is_err());
    }

    #[test]
    fn separated_handle_configurations() {
        let chart = SurfaceChart::standard(2);
        let p1 = DualPair::validate(
            &chart,
            handle_one_curve(&chart),
            meridian_disk(&chart, 0, &q(1, 4)).unwrap(),
        )
        .unwrap();
        let p2 = DualPair::validate(
            &chart,
            handle_two_curve(&chart),
            meridian_disk(&chart, 1, &q(1, 4)).unwrap(),
        )
        .unwrap();
        let rep = verify_separated(&chart, &p1, &p2).unwrap();
        assert!(rep.ok, "{:?}", rep.failures);
    }

    #[test]
    fn common_dual_violation_reported() {
        let chart = SurfaceChart::standard(2);
        let c1 = handle_one_curve(&chart);
        let c2 = handle_two_curve(&chart);
        let d = meridian_disk(&chart, 0, &q(1, 4)).unwrap();
        let rep = verify_common_dual(&chart, &c1, &c2, &d).unwrap();
        assert!(!rep.ok);
        assert!(rep.failures.iter().any(|f| f.contains("curve vs disk boundary")));
    }

    #[test]
    fn dual_pair_json_roundtrip() {
        let chart = SurfaceChart::standard(2);
        let pair = DualPair::validate(
            &chart,
            handle_one_curve(&chart),
            meridian_disk(&chart, 0, &q(1, 4)).unwrap(),
        )
        .unwrap();
        let v = pair.to_json(&chart);
        let back = DualPair::from_json(&chart, &v).unwrap();
        assert_eq!(back, pair);
    }
}
