//! Separation tests via complement topology.
//!
//! A simple closed curve on the glued surface separates it exactly when its
//! complement is disconnected, which the arrangement engine reports
//! directly as the number of glued regions.  The mod-2 class read from the
//! transit word gives a cheap one-way check: a nonzero class forces the
//! curve to be nonseparating.

use crate::arrangement::Arrangement;
use crate::chart::SurfaceChart;
use crate::curve::EmbeddedCurve;
use crate::error::Result;

/// Number of connected components of the complement of the system on the
/// glued surface.
pub fn complement_components(chart: &SurfaceChart, curves: &[EmbeddedCurve]) -> Result<usize> {
    Ok(Arrangement::build(chart, curves)?.regions().len())
}

/// Whether a single closed curve leaves the surface connected when cut.
pub fn is_nonseparating(chart: &SurfaceChart, curve: &EmbeddedCurve) -> Result<bool> {
    Ok(complement_components(chart, std::slice::from_ref(curve))? == 1)
}

/// The mod-2 vector of handle-crossing counts.  This is the image of the
/// curve's class in the "handle half" of H_1 of the surface with Z/2
/// coefficients; it does not see meridian classes, so a zero vector is
/// inconclusive while a nonzero vector certifies a nonseparating curve.
pub fn z2_handle_class(chart: &SurfaceChart, curve: &EmbeddedCurve) -> Result<Vec<u8>> {
    let w = curve.word(chart)?;
    Ok(w
        .abelianize(chart.genus() as usize)
        .into_iter()
        .map(|x| (x.rem_euclid(2)) as u8)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{q, Pt};

    fn handle_curve(chart: &SurfaceChart) -> EmbeddedCurve {
        let t = q(1, 5);
        let exit = chart.circle(1).point_at(&t);
        let entry = chart.circle(0).point_at(&t);
        EmbeddedCurve::closed(vec![vec![entry, Pt::of(0, 1, 3, 1), exit]])
    }

    #[test]
    fn handle_curve_is_nonseparating_with_nonzero_class() {
        let chart = SurfaceChart::standard(2);
        let c = handle_curve(&chart);
        assert!(is_nonseparating(&chart, &c).unwrap());
        assert_eq!(z2_handle_class(&chart, &c).unwrap(), vec![1, 0]);
    }

    #[test]
    fn small_planar_loop_separates() {
        let chart = SurfaceChart::standard(2);
        let c = EmbeddedCurve::closed(vec![vec![
            Pt::of(1, 1, 1, 1),
            Pt::of(2, 1, 1, 1),
            Pt::of(2, 1, 2, 1),
            Pt::of(1, 1, 2, 1),
            Pt::of(1, 1, 1, 1),
        ]]);
        assert!(!is_nonseparating(&chart, &c).unwrap());
        assert_eq!(z2_handle_class(&chart, &c).unwrap(), vec![0, 0]);
    }
}
