//! The surface chart: a genus-g handlebody boundary presented as a planar
//! disk with 2g-1 round holes whose 2g boundary circles (the outer circle
//! and the holes) are glued in pairs.
//!
//! Each glued pair of circles is a "portal": a curve leaving through one
//! circle at parameter t re-enters through the partner circle at parameter
//! -t.  Cutting the handlebody along the g portal disks gives a ball, so
//! the portal transit sequence of a closed curve reads off its free-group
//! word in pi_1 of the handlebody.

use crate::error::{Error, Result};
use crate::geom::{qi, Circle, Pt, Q};
use crate::jsonq;
use num::{Signed, Zero};
use serde_json::{json, Value};

/// Index of a portal circle; portal 0 is always the outer circle.
pub type PortalId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceChart {
    genus: u32,
    circles: Vec<Circle>,
    /// One (plus, minus) portal pair per handle, in generator order.
    handles: Vec<(PortalId, PortalId)>,
    /// partner[p] is the portal glued to p.
    partner: Vec<PortalId>,
}

impl SurfaceChart {
    /// Builds and validates a chart.  `circles[0]` must be the outer
    /// circle; `handles[i]` names the (plus, minus) circles of generator
    /// x_{i+1}.
    pub fn new(genus: u32, circles: Vec<Circle>, handles: Vec<(PortalId, PortalId)>) -> Result<SurfaceChart> {
        if genus < 2 {
            return Err(Error::BadChart(format!("genus must be >= 2, got {genus}")));
        }
        let n = 2 * genus as usize;
        if circles.len() != n {
            return Err(Error::BadChart(format!(
                "need {n} portal circles for genus {genus}, got {}",
                circles.len()
            )));
        }
        if handles.len() != genus as usize {
            return Err(Error::BadChart("one portal pair per handle required".into()));
        }
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in &handles {
            if a >= n || b >= n || a == b {
                return Err(Error::BadChart(format!("invalid portal pair ({a}, {b})")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::BadChart("pairing is not a matching".into()));
            }
            partner[a] = b;
            partner[b] = a;
        }
        // The matching covers all portals and is fixed-point-free by
        // construction above.
        for c in &circles {
            if !c.radius.is_positive() {
                return Err(Error::BadChart("circle radius must be positive".into()));
            }
        }
        let outer = &circles[0];
        for (i, c) in circles.iter().enumerate().skip(1) {
            // Strictly inside the outer circle: |center - outer.center| + r < R.
            let d2 = c.center.sub(&outer.center).norm2();
            let margin = &outer.radius - &c.radius;
            if !(margin.is_positive() && d2 < &margin * &margin) {
                return Err(Error::BadChart(format!("circle {i} is not strictly inside the outer circle")));
            }
            for (j, c2) in circles.iter().enumerate().skip(i + 1) {
                let d2 = c.center.sub(&c2.center).norm2();
                let sum = &c.radius + &c2.radius;
                if d2 <= &sum * &sum {
                    return Err(Error::BadChart(format!("circles {i} and {j} are not disjoint")));
                }
            }
        }
        Ok(SurfaceChart { genus, circles, handles, partner })
    }

    /// The standard chart: outer circle of radius 4g at the origin, and
    /// 2g-1 unit circles along the x axis at x = 4j - 4g for j = 1..2g-1.
    /// Handle 1 is (circle 1, outer); handle i >= 2 is (circle 2i-2,
    /// circle 2i-1).
    pub fn standard(genus: u32) -> SurfaceChart {
        assert!(genus >= 2);
        let g = genus as i64;
        let mut circles = vec![Circle::new(Pt::of(0, 1, 0, 1), qi(4 * g))];
        for j in 1..(2 * g) {
            circles.push(Circle::new(Pt::of(4 * j - 4 * g, 1, 0, 1), qi(1)));
        }
        let mut handles = vec![(1, 0)];
        for i in 2..=genus as usize {
            handles.push((2 * i - 2, 2 * i - 1));
        }
        SurfaceChart::new(genus, circles, handles).expect("standard chart is valid")
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_portals(&self) -> usize {
        self.circles.len()
    }

    pub fn circle(&self, p: PortalId) -> &Circle {
        &self.circles[p]
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn partner(&self, p: PortalId) -> PortalId {
        self.partner[p]
    }

    pub fn handles(&self) -> &[(PortalId, PortalId)] {
        &self.handles
    }

    /// Portal angles are measured along the domain-induced boundary
    /// orientation: counterclockwise on the outer circle, clockwise on the
    /// holes.  In this adapted parameter the gluing map is always u -> -u,
    /// and it reverses induced boundary orientations on every pair, which
    /// is exactly the orientability condition for the glued surface.
    pub fn adapted_param(&self, p: PortalId, raw: &Q) -> Q {
        if p == 0 {
            raw.clone()
        } else {
            -raw.clone()
        }
    }

    /// Inverse of `adapted_param` (the conversion is an involution).
    pub fn raw_param(&self, p: PortalId, u: &Q) -> Q {
        self.adapted_param(p, u)
    }

    /// The glued adapted parameter on the partner circle.
    pub fn paired_param(&self, u: &Q) -> Q {
        -u.clone()
    }

    /// The raw tangent-half-angle parameter of the glued point on the
    /// partner circle, given a raw parameter on portal p.  Between two
    /// holes this is t -> -t; between the outer circle and a hole it is
    /// the identity.
    pub fn glued_raw(&self, p: PortalId, raw: &Q) -> Q {
        let u = self.adapted_param(p, raw);
        self.raw_param(self.partner(p), &-u)
    }

    /// Free-group letter contributed by a crossing that disappears into
    /// portal p (and re-emerges from its partner).
    pub fn generator_of(&self, p: PortalId) -> i32 {
        for (i, &(plus, minus)) in self.handles.iter().enumerate() {
            if p == plus {
                return (i + 1) as i32;
            }
            if p == minus {
                return -((i + 1) as i32);
            }
        }
        unreachable!("portal {p} not in any handle")
    }

    /// True if the point lies strictly inside the planar domain (inside the
    /// outer circle, outside every hole).
    pub fn point_strictly_in_domain(&self, p: &Pt) -> bool {
        if !self.circles[0].clearance2(p).is_negative() {
            return false;
        }
        self.circles.iter().skip(1).all(|c| c.clearance2(p).is_positive())
    }

    /// True if the point is on one of the portal circles; returns its id.
    pub fn portal_of_point(&self, p: &Pt) -> Option<PortalId> {
        self.circles.iter().position(|c| c.clearance2(p).is_zero())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "genus": self.genus,
            "circles": self.circles.iter().map(|c| json!({
                "cx": jsonq::q_to_value(&c.center.x),
                "cy": jsonq::q_to_value(&c.center.y),
                "r": jsonq::q_to_value(&c.radius),
            })).collect::<Vec<_>>(),
            "pairing": self.handles.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<SurfaceChart> {
        let genus = v
            .get("genus")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("chart: missing genus".into()))? as u32;
        let circles_v = v
            .get("circles")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("chart: missing circles".into()))?;
        let mut circles = Vec::new();
        for cv in circles_v {
            let cx = jsonq::value_to_q(cv.get("cx").ok_or_else(|| Error::Parse("circle: missing cx".into()))?)?;
            let cy = jsonq::value_to_q(cv.get("cy").ok_or_else(|| Error::Parse("circle: missing cy".into()))?)?;
            let r = jsonq::value_to_q(cv.get("r").ok_or_else(|| Error::Parse("circle: missing r".into()))?)?;
            circles.push(Circle::new(Pt::new(cx, cy), r));
        }
        let pairing_v = v
            .get("pairing")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("chart: missing pairing".into()))?;
        let mut handles = Vec::new();
        for pv in pairing_v {
            let pair = pv.as_array().ok_or_else(|| Error::Parse("pairing entry must be [i, j]".into()))?;
            if pair.len() != 2 {
                return Err(Error::Parse("pairing entry must be [i, j]".into()));
            }
            let a = pair[0].as_u64().ok_or_else(|| Error::Parse("portal index".into()))? as usize;
            let b = pair[1].as_u64().ok_or_else(|| Error::Parse("portal index".into()))? as usize;
            handles.push((a, b));
        }
        SurfaceChart::new(genus, circles, handles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::q;

    #[test]
    fn standard_charts_validate() {
        for g in 2..=4 {
            let chart = SurfaceChart::standard(g);
            assert_eq!(chart.genus(), g);
            assert_eq!(chart.num_portals(), 2 * g as usize);
        }
    }

    #[test]
    fn generator_signs() {
        let chart = SurfaceChart::standard(2);
        assert_eq!(chart.generator_of(1), 1);
        assert_eq!(chart.generator_of(0), -1);
        assert_eq!(chart.generator_of(2), 2);
        assert_eq!(chart.generator_of(3), -2);
        assert_eq!(chart.partner(0), 1);
        assert_eq!(chart.partner(2), 3);
    }

    #[test]
    fn overlapping_circles_rejected() {
        let circles = vec![
            Circle::new(Pt::of(0, 1, 0, 1), qi(8)),
            Circle::new(Pt::of(-2, 1, 0, 1), qi(1)),
            Circle::new(Pt::of(-1, 1, 0, 1), qi(1)),
            Circle::new(Pt::of(3, 1, 0, 1), qi(1)),
        ];
        assert!(SurfaceChart::new(2, circles, vec![(1, 0), (2, 3)]).is_err());
    }

    #[test]
    fn genus_one_rejected() {
        let circles = vec![
            Circle::new(Pt::of(0, 1, 0, 1), qi(4)),
            Circle::new(Pt::of(0, 1, 0, 1), qi(1)),
        ];
        assert!(SurfaceChart::new(1, circles, vec![(1, 0)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let chart = SurfaceChart::standard(3);
        let v = chart.to_json();
        let back = SurfaceChart::from_json(&v).unwrap();
        assert_eq!(back, chart);
        let _ = q(1, 2);
    }
}
