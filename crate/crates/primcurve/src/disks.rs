//! Disk representatives: simple closed curves on the surface bounding
//! disks in the handlebody.
//!
//! By Dehn's lemma a simple closed curve bounds a disk in the handlebody
//! exactly when it is nullhomotopic there, i.e. when its portal transit
//! word is trivial.  A disk representative therefore stores its boundary
//! curve together with the (empty) reduced word as the certificate, plus
//! the separation status of the boundary on the surface.

use crate::chart::SurfaceChart;
use crate::curve::EmbeddedCurve;
use crate::error::{Error, Result};
use crate::freegroup::Word;
use crate::geom::Q;
use crate::homology::is_nonseparating;
use crate::offset::{arc_parallel, ArcSpan};
use num::Zero;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiskFlags {
    pub disk_bounding: bool,
    pub nonseparating: bool,
}

/// Whether a closed curve bounds a disk in the handlebody, and whether it
/// separates the surface.
pub fn classify_disk(chart: &SurfaceChart, c: &EmbeddedCurve) -> Result<DiskFlags> {
    c.validate(chart)?;
    if !c.is_closed() {
        return Err(Error::Precondition("disk classification requires a closed curve".into()));
    }
    Ok(DiskFlags {
        disk_bounding: c.word(chart)?.is_empty(),
        nonseparating: is_nonseparating(chart, c)?,
    })
}

/// A certified disk in the handlebody, presented by its boundary curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskRep {
    boundary: EmbeddedCurve,
    word_certificate: Word,
    nonseparating: bool,
}

impl DiskRep {
    /// Validates the boundary curve and certifies that it bounds a disk.
    pub fn validate(chart: &SurfaceChart, boundary: EmbeddedCurve) -> Result<DiskRep> {
        let flags = classify_disk(chart, &boundary)?;
        if !flags.disk_bounding {
            let letters = boundary.word(chart)?.letters().to_vec();
            return Err(Error::NotADisk(letters));
        }
        Ok(DiskRep {
            boundary,
            word_certificate: Word::empty(),
            nonseparating: flags.nonseparating,
        })
    }

    pub fn boundary(&self) -> &EmbeddedCurve {
        &self.boundary
    }

    pub fn word_certificate(&self) -> &Word {
        &self.word_certificate
    }

    pub fn nonseparating(&self) -> bool {
        self.nonseparating
    }

    pub fn require_nonseparating(&self) -> Result<()> {
        if self.nonseparating {
            Ok(())
        } else {
            Err(Error::SeparatingDisk)
        }
    }

    pub fn to_json(&self, chart: &SurfaceChart) -> Value {
        json!({
            "boundary": self.boundary.to_json(chart),
            "word_certificate": self.word_certificate,
            "nonseparating": self.nonseparating,
        })
    }

    /// Parses and fully revalidates a disk representative.
    pub fn from_json(chart: &SurfaceChart, v: &Value) -> Result<DiskRep> {
        let bv = v
            .get("boundary")
            .ok_or_else(|| Error::Parse("disk: missing boundary".into()))?;
        let boundary = EmbeddedCurve::from_json(bv)?;
        let disk = DiskRep::validate(chart, boundary)?;
        if let Some(w) = v.get("word_certificate") {
            let claimed: Word = serde_json::from_value(w.clone())
                .map_err(|e| Error::Parse(format!("disk: bad word certificate: {e}")))?;
            if !claimed.is_empty() {
                return Err(Error::CertificateRejected(
                    "disk word certificate must be the empty word".into(),
                ));
            }
        }
        if let Some(ns) = v.get("nonseparating").and_then(Value::as_bool) {
            if ns != disk.nonseparating {
                return Err(Error::CertificateRejected(format!(
                    "disk separation flag claims {ns}, recomputed {}",
                    disk.nonseparating
                )));
            }
        }
        Ok(disk)
    }
}

/// The meridian disk of a handle: its boundary hugs one portal circle of
/// the handle at a small radial clearance, crossing nothing and reading
/// the empty word.  This is the standard cut-system disk E_h.
pub fn meridian_disk(chart: &SurfaceChart, handle: usize, eps: &Q) -> Result<DiskRep> {
    let &(plus, minus) = chart
        .handles()
        .get(handle)
        .ok_or_else(|| Error::Precondition(format!("no handle {handle}")))?;
    // Hug a hole circle of the pair (every handle has at least one hole).
    let portal = if plus != 0 { plus } else { minus };
    let span = ArcSpan { from: Q::zero(), to: Q::zero(), wrap: true };
    let pts = arc_parallel(chart, portal, &[(span, true)], eps)?;
    let boundary = EmbeddedCurve::closed(vec![pts]);
    DiskRep::validate(chart, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{q, Pt};

    #[test]
    fn meridian_disks_validate_nonseparating() {
        for g in 2..=3u32 {
            let chart = SurfaceChart::standard(g);
            for h in 0..g as usize {
                let d = meridian_disk(&chart, h, &q(1, 4)).unwrap();
                assert!(d.nonseparating(), "handle {h} meridian separates");
                assert!(d.word_certificate().is_empty());
                assert_eq!(d.boundary().num_transits(), 0);
            }
        }
    }

    #[test]
    fn small_square_bounds_separating_disk() {
        let chart = SurfaceChart::standard(2);
        let c = EmbeddedCurve::closed(vec![vec![
            Pt::of(1, 1, 1, 1),
            Pt::of(2, 1, 1, 1),
            Pt::of(2, 1, 2, 1),
            Pt::of(1, 1, 2, 1),
            Pt::of(1, 1, 1, 1),
        ]]);
        let d = DiskRep::validate(&chart, c).unwrap();
        assert!(!d.nonseparating());
        assert!(matches!(d.require_nonseparating(), Err(Error::SeparatingDisk)));
    }

    #[test]
    fn handle_curve_is_not_a_disk() {
        let chart = SurfaceChart::standard(2);
        let t = q(1, 5);
        let exit = chart.circle(1).point_at(&t);
        let entry = chart.circle(0).point_at(&t);
        let c = EmbeddedCurve::closed(vec![vec![entry, Pt::of(0, 1, 3, 1), exit]]);
        match DiskRep::validate(&chart, c) {
            Err(Error::NotADisk(letters)) => assert_eq!(letters, vec![1]),
            other => panic!("expected NotADisk, got {other:?}"),
        }
    }

    #[test]
    fn json_roundtrip_revalidates() {
        let chart = SurfaceChart::standard(2);
        let d = meridian_disk(&chart, 1, &q(1, 4)).unwrap();
        let v = d.to_json(&chart);
        let back = DiskRep::from_json(&chart, &v).unwrap();
        assert_eq!(back, d);
        // Tampering with the separation flag is caught.
        let mut bad = v.clone();
        bad["nonseparating"] = json!(false);
        assert!(matches!(
            DiskRep::from_json(&chart, &bad),
            Err(Error::CertificateRejected(_))
        ));
    }
}
