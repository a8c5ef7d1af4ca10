//! Embedded curves and arcs on a surface chart.
//!
//! A curve is stored as a list of *strands*: polylines drawn in the planar
//! domain.  Consecutive strands are joined through a portal: the last
//! vertex of one strand lies on a portal circle at parameter t and the
//! first vertex of the next strand lies on the partner circle at
//! parameter -t.  A closed curve with no transits is a single strand whose
//! last vertex explicitly repeats the first.

use crate::chart::{PortalId, SurfaceChart};
use crate::error::{Error, Result};
use crate::freegroup::Word;
use crate::geom::{seg_intersect, seg_vs_circle, Pt, Q, Seg, SegCirclePosition, SegCrossing};
use crate::jsonq;
use num::Zero;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Closed,
    Arc,
}

/// A portal crossing event: the curve leaves the domain through `portal`
/// at adapted angle `param` and re-enters through the partner circle at
/// adapted angle `-param`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transit {
    pub portal: PortalId,
    pub param: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedCurve {
    kind: PathKind,
    strands: Vec<Vec<Pt>>,
}

/// A position strictly inside a drawn segment of a curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveCursor {
    pub strand: usize,
    pub seg: usize,
    pub t: Q,
}

impl EmbeddedCurve {
    pub fn closed(strands: Vec<Vec<Pt>>) -> EmbeddedCurve {
        EmbeddedCurve { kind: PathKind::Closed, strands }
    }

    pub fn arc(strands: Vec<Vec<Pt>>) -> EmbeddedCurve {
        EmbeddedCurve { kind: PathKind::Arc, strands }
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn is_closed(&self) -> bool {
        self.kind == PathKind::Closed
    }

    pub fn strands(&self) -> &[Vec<Pt>] {
        &self.strands
    }

    /// A closed curve with one strand either closes through a portal (both
    /// strand ends on distinct portal points) or closes in the plane.  The
    /// planar closure repeats the first vertex at the end of the strand,
    /// so the two cases are distinguished without consulting the chart.
    pub fn is_planar_closed(&self) -> bool {
        self.kind == PathKind::Closed
            && self.strands.len() == 1
            && self.strands[0].first() == self.strands[0].last()
    }

    pub fn num_transits(&self) -> usize {
        match self.kind {
            PathKind::Closed => {
                if self.is_planar_closed() {
                    0
                } else {
                    self.strands.len()
                }
            }
            PathKind::Arc => self.strands.len().saturating_sub(1),
        }
    }

    /// Endpoints of an arc (first vertex of first strand, last of last).
    pub fn endpoints(&self) -> Option<(&Pt, &Pt)> {
        if self.kind != PathKind::Arc {
            return None;
        }
        Some((
            self.strands.first()?.first()?,
            self.strands.last()?.last()?,
        ))
    }

    /// All drawn segments with their (strand, index) ids.  A planar closed
    /// strand repeats its first vertex, so its closing segment is included.
    pub fn segments(&self) -> Vec<(Seg, (usize, usize))> {
        let mut out = Vec::new();
        for (si, strand) in self.strands.iter().enumerate() {
            for i in 0..strand.len().saturating_sub(1) {
                out.push((Seg::new(strand[i].clone(), strand[i + 1].clone()), (si, i)));
            }
        }
        out
    }

    /// The transit events in traversal order.  For a closed curve, transit
    /// i joins strand i to strand (i+1) mod k.
    pub fn transits(&self, chart: &SurfaceChart) -> Result<Vec<Transit>> {
        let k = self.strands.len();
        let joins: Vec<(usize, usize)> = match self.kind {
            PathKind::Closed => {
                if self.num_transits() == 0 {
                    Vec::new()
                } else {
                    (0..k).map(|i| (i, (i + 1) % k)).collect()
                }
            }
            PathKind::Arc => (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        };
        let mut out = Vec::new();
        for (i, j) in joins {
            let exit = self.strands[i].last().ok_or_else(|| Error::NotEmbedded("empty strand".into()))?;
            let entry = self.strands[j].first().ok_or_else(|| Error::NotEmbedded("empty strand".into()))?;
            let p_exit = chart
                .portal_of_point(exit)
                .ok_or_else(|| Error::PortalMismatch(format!("strand end not on a portal circle: {exit:?}")))?;
            let p_entry = chart
                .portal_of_point(entry)
                .ok_or_else(|| Error::PortalMismatch(format!("strand start not on a portal circle: {entry:?}")))?;
            if chart.partner(p_exit) != p_entry {
                return Err(Error::PortalMismatch(format!(
                    "strand jumps from portal {p_exit} to non-partner {p_entry}"
                )));
            }
            let t_exit = chart
                .circle(p_exit)
                .param_of(exit)
                .ok_or_else(|| Error::PortalMismatch("transit at excluded parameter".into()))?;
            let t_entry = chart
                .circle(p_entry)
                .param_of(entry)
                .ok_or_else(|| Error::PortalMismatch("transit at excluded parameter".into()))?;
            if t_entry != chart.glued_raw(p_exit, &t_exit) {
                return Err(Error::PortalMismatch(format!(
                    "transit angles not pairing-matched on portals {p_exit}/{p_entry}"
                )));
            }
            out.push(Transit { portal: p_exit, param: chart.adapted_param(p_exit, &t_exit) });
        }
        Ok(out)
    }

    /// The free-group word read from the transit sequence: disappearing
    /// into the plus circle of handle i contributes x_i.  Freely reduced;
    /// canonical cyclic rotation for closed curves.
    pub fn word(&self, chart: &SurfaceChart) -> Result<Word> {
        let letters: Vec<i32> = self
            .transits(chart)?
            .iter()
            .map(|t| chart.generator_of(t.portal))
            .collect();
        let w = Word::new(&letters);
        Ok(if self.is_closed() { w.canonical_rotation() } else { w })
    }

    /// Validates the curve against the chart: strands in the domain,
    /// transversal pairing-matched transits, and embeddedness.
    pub fn validate(&self, chart: &SurfaceChart) -> Result<()> {
        if self.strands.is_empty() {
            return Err(Error::NotEmbedded("curve has no strands".into()));
        }
        for strand in &self.strands {
            if strand.len() < 2 {
                return Err(Error::NotEmbedded("strand with fewer than two vertices".into()));
            }
        }
        if self.is_planar_closed() && self.strands[0].len() < 4 {
            return Err(Error::NotEmbedded("planar closed curve needs at least three vertices".into()));
        }
        // Transit structure (also checks pairing match).  Arcs may have
        // free endpoints anywhere in the closed domain.
        let _ = self.transits(chart)?;

        // Interior vertices strictly inside the domain; endpoints of
        // strands may lie on circles.
        let planar_closed = self.is_planar_closed();
        for (si, strand) in self.strands.iter().enumerate() {
            for (vi, p) in strand.iter().enumerate() {
                let endpoint = !planar_closed && (vi == 0 || vi + 1 == strand.len());
                let on_portal = chart.portal_of_point(p).is_some();
                if endpoint {
                    if !on_portal && !chart.point_strictly_in_domain(p) {
                        return Err(Error::NotEmbedded(format!(
                            "strand {si} endpoint outside domain: {p:?}"
                        )));
                    }
                } else if !chart.point_strictly_in_domain(p) {
                    return Err(Error::NotEmbedded(format!(
                        "strand {si} interior vertex not strictly inside domain"
                    )));
                }
            }
        }

        // Every drawn segment stays inside the outer circle and outside
        // each hole, touching circles only at its endpoints.
        for (seg, id) in self.segments() {
            match seg_vs_circle(&seg, chart.circle(0)) {
                SegCirclePosition::Inside => {}
                _ => {
                    return Err(Error::NotEmbedded(format!(
                        "segment {id:?} leaves the outer circle or touches it tangentially"
                    )))
                }
            }
            for pid in 1..chart.num_portals() {
                match seg_vs_circle(&seg, chart.circle(pid)) {
                    SegCirclePosition::Outside => {}
                    _ => {
                        return Err(Error::NotEmbedded(format!(
                            "segment {id:?} enters or touches portal circle {pid}"
                        )))
                    }
                }
            }
        }

        self.check_self_embedded()?;
        Ok(())
    }

    /// No self-crossings: vertices pairwise distinct and segments disjoint
    /// except at shared consecutive vertices.
    fn check_self_embedded(&self) -> Result<()> {
        let mut vertices: Vec<&Pt> = Vec::new();
        let planar_closed = self.is_planar_closed();
        for strand in &self.strands {
            // Skip the explicit repeat of the first vertex.
            let upto = if planar_closed { strand.len() - 1 } else { strand.len() };
            for p in &strand[..upto] {
                vertices.push(p);
            }
        }
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                if vertices[i] == vertices[j] {
                    return Err(Error::NotEmbedded("repeated vertex".into()));
                }
            }
        }
        let segs = self.segments();
        for i in 0..segs.len() {
            for j in (i + 1)..segs.len() {
                let (s1, id1) = &segs[i];
                let (s2, id2) = &segs[j];
                let adjacent = self.segments_adjacent(id1, id2, segs.len());
                match seg_intersect(s1, s2) {
                    SegCrossing::None => {}
                    SegCrossing::Proper { .. } => {
                        return Err(Error::NotEmbedded(format!(
                            "segments {id1:?} and {id2:?} cross"
                        )))
                    }
                    SegCrossing::Degenerate => {
                        if !adjacent {
                            return Err(Error::NotEmbedded(format!(
                                "segments {id1:?} and {id2:?} touch degenerately"
                            )));
                        }
                        // Adjacent segments share exactly one vertex, which
                        // vertex-distinctness already guarantees; forbid
                        // collinear backtracking.
                        if self.adjacent_overlap(s1, s2) {
                            return Err(Error::NotEmbedded("backtracking at a vertex".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn segments_adjacent(&self, id1: &(usize, usize), id2: &(usize, usize), _total: usize) -> bool {
        let (s1, i1) = *id1;
        let (s2, i2) = *id2;
        if s1 == s2 && (i1 + 1 == i2 || i2 + 1 == i1) {
            return true;
        }
        // The last segment of a planar closed strand ends at the (repeated)
        // first vertex, so it is adjacent to the first segment.
        if self.is_planar_closed() && s1 == s2 {
            let last = self.strands[0].len() - 2;
            let (a, b) = if i1 < i2 { (i1, i2) } else { (i2, i1) };
            if b == last && a == 0 {
                return true;
            }
        }
        false
    }

    fn adjacent_overlap(&self, s1: &Seg, s2: &Seg) -> bool {
        // Shared vertex v: the other endpoints must not lie on the opposite
        // closed segment.
        let ends = [(&s1.a, s2), (&s1.b, s2), (&s2.a, s1), (&s2.b, s1)];
        for (p, s) in ends {
            if p != &s.a && p != &s.b && crate::geom::dist2_point_seg(p, s).is_zero() {
                return true;
            }
        }
        false
    }

    /// A position strictly inside one drawn segment: strand index, segment
    /// index within the strand, and interpolation parameter in (0, 1).
    pub fn cursor_point(&self, cur: &CurveCursor) -> Pt {
        let s = &self.strands[cur.strand];
        s[cur.seg].lerp(&s[cur.seg + 1], &cur.t)
    }

    /// Finds the cursor of a point lying strictly inside some drawn
    /// segment.
    pub fn locate(&self, p: &Pt) -> Option<CurveCursor> {
        use num::Signed;
        for (seg, (si, i)) in self.segments() {
            let d = seg.dir();
            if seg.b.sub(&seg.a).cross(&p.sub(&seg.a)) != Q::zero() {
                continue;
            }
            let n2 = d.norm2();
            let t = p.sub(&seg.a).dot(&d) / n2;
            if t.is_positive() && t < num::One::one() {
                return Some(CurveCursor { strand: si, seg: i, t });
            }
        }
        None
    }

    /// Walks the closed curve forward from cursor `a` to cursor `b`,
    /// collecting the traversed path as planar pieces separated by portal
    /// jumps.  If `a` and `b` sit on the same segment with `a` before `b`,
    /// the walk is the short one; otherwise it goes all the way around.
    fn walk_forward(&self, a: &CurveCursor, b: &CurveCursor) -> Vec<Vec<Pt>> {
        let segs = self.segments();
        let n = segs.len();
        let slot_of = |c: &CurveCursor| segs.iter().position(|(_, id)| *id == (c.strand, c.seg)).unwrap();
        let sa = slot_of(a);
        let sb = slot_of(b);
        let mut d = (sb + n - sa) % n;
        if d == 0 && a.t >= b.t {
            d = n;
        }
        let planar_closed = self.is_planar_closed();
        let mut pieces: Vec<Vec<Pt>> = Vec::new();
        let mut cur = vec![self.cursor_point(a)];
        let mut s = sa;
        for _ in 0..d {
            let (si, i) = segs[s].1;
            let strand = &self.strands[si];
            cur.push(strand[i + 1].clone());
            let strand_ends = i + 2 == strand.len();
            if strand_ends && !planar_closed {
                pieces.push(std::mem::take(&mut cur));
                let next = &self.strands[(si + 1) % self.strands.len()];
                cur.push(next[0].clone());
            }
            s = (s + 1) % n;
        }
        cur.push(self.cursor_point(b));
        pieces.push(cur);
        pieces
    }

    /// Replaces the forward portion of a closed curve from cursor `from` to
    /// cursor `to` by the path `insert`, given as strands whose first point
    /// is the `from` point and whose last point is the `to` point, with
    /// portal transits at the strand breaks.
    pub fn replace_span(
        &self,
        from: &CurveCursor,
        to: &CurveCursor,
        insert: Vec<Vec<Pt>>,
    ) -> Result<EmbeddedCurve> {
        if self.kind != PathKind::Closed {
            return Err(Error::NotEmbedded("span replacement requires a closed curve".into()));
        }
        if insert.is_empty()
            || insert.first().and_then(|s| s.first()) != Some(&self.cursor_point(from))
            || insert.last().and_then(|s| s.last()) != Some(&self.cursor_point(to))
        {
            return Err(Error::NotEmbedded("replacement path does not join the cut points".into()));
        }
        // Kept path runs from `to` forward to `from`; the insert continues
        // from `from` back to `to`, planar at both seams.
        let mut pieces = self.walk_forward(to, from);
        let mut it = insert.into_iter();
        let first_ins = it.next().unwrap();
        pieces.last_mut().unwrap().extend(first_ins.into_iter().skip(1));
        pieces.extend(it);
        if pieces.len() == 1 {
            // Fully planar: the piece already starts and ends at the `to`
            // point, which is the planar-closed convention.
            return Ok(EmbeddedCurve::closed(pieces));
        }
        // Merge the seam between the last piece and the first.
        let last = pieces.pop().unwrap();
        let first = pieces.remove(0);
        debug_assert_eq!(last.last(), first.first());
        let mut merged = last;
        merged.extend(first.into_iter().skip(1));
        pieces.insert(0, merged);
        Ok(EmbeddedCurve::closed(pieces))
    }

    /// Traversal-reversed copy.
    pub fn reversed(&self) -> EmbeddedCurve {
        let mut strands: Vec<Vec<Pt>> = self
            .strands
            .iter()
            .rev()
            .map(|s| s.iter().rev().cloned().collect())
            .collect();
        if self.kind == PathKind::Closed && strands.len() > 1 {
            // Keep the convention that transit i joins strand i to i+1:
            // after reversal the strand list is already consistent.
            strands.rotate_left(0);
        }
        EmbeddedCurve { kind: self.kind, strands }
    }

    pub fn to_json(&self, chart: &SurfaceChart) -> Value {
        let points: Vec<Value> = self
            .strands
            .iter()
            .flat_map(|s| s.iter().map(jsonq::pt_to_value))
            .collect();
        let transits: Vec<Value> = self
            .transits(chart)
            .map(|ts| {
                ts.iter()
                    .flat_map(|t| {
                        let partner = chart.partner(t.portal);
                        vec![
                            json!({"portal": t.portal, "angle": jsonq::q_to_value(&t.param), "dir": "out"}),
                            json!({
                                "portal": partner,
                                "angle": jsonq::q_to_value(&chart.paired_param(&t.param)),
                                "dir": "in"
                            }),
                        ]
                    })
                    .collect()
            })
            .unwrap_or_default();
        json!({
            "kind": match self.kind { PathKind::Closed => "closed", PathKind::Arc => "arc" },
            "strand_lengths": self.strands.iter().map(|s| s.len()).collect::<Vec<_>>(),
            "points": points,
            "transits": transits,
        })
    }

    pub fn from_json(v: &Value) -> Result<EmbeddedCurve> {
        let kind = match v.get("kind").and_then(Value::as_str) {
            Some("closed") => PathKind::Closed,
            Some("arc") => PathKind::Arc,
            _ => return Err(Error::Parse("curve: kind must be \"closed\" or \"arc\"".into())),
        };
        let lengths: Vec<usize> = v
            .get("strand_lengths")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("curve: missing strand_lengths".into()))?
            .iter()
            .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| Error::Parse("bad strand length".into())))
            .collect::<Result<_>>()?;
        let points_v = v
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("curve: missing points".into()))?;
        let mut points = Vec::new();
        for pv in points_v {
            points.push(jsonq::value_to_pt(pv)?);
        }
        if lengths.iter().sum::<usize>() != points.len() {
            return Err(Error::Parse("curve: strand_lengths do not sum to point count".into()));
        }
        let mut strands = Vec::new();
        let mut it = points.into_iter();
        for len in lengths {
            strands.push((&mut it).take(len).collect());
        }
        Ok(EmbeddedCurve { kind, strands })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::q;

    /// A curve through handle 1 of the standard genus-2 chart: one strand
    /// from the outer circle (portal 0) to circle 1.
    pub fn handle_one_curve(chart: &SurfaceChart) -> EmbeddedCurve {
        // Exits into portal 1 at parameter t, so the word is x1.  The
        // strand runs from the entry point on portal 0 (param -t after
        // exiting portal 1... traversal: strand from entry on partner(1)=0
        // at -t to the exit point on portal 1 at t).
        // Handle 1 pairs circle 1 with the outer circle, so the raw gluing
        // map is the identity: exit circle 1 at raw t, re-enter the outer
        // circle at raw t.
        let t = q(1, 5);
        let exit = chart.circle(1).point_at(&t);
        let entry = chart.circle(0).point_at(&t);
        // Detour above the middle hole.
        EmbeddedCurve::closed(vec![vec![entry, Pt::of(0, 1, 3, 1), exit]])
    }

    #[test]
    fn handle_curve_is_valid_with_word_x1() {
        let chart = SurfaceChart::standard(2);
        let c = handle_one_curve(&chart);
        c.validate(&chart).unwrap();
        assert_eq!(c.word(&chart).unwrap().letters(), &[1]);
        assert_eq!(c.num_transits(), 1);
    }

    #[test]
    fn mismatched_angles_rejected() {
        let chart = SurfaceChart::standard(2);
        let t = q(1, 5);
        let exit = chart.circle(1).point_at(&t);
        // Raw -t is wrong for the hole/outer pair (the raw map is identity).
        let entry = chart.circle(0).point_at(&(-t.clone()));
        let c = EmbeddedCurve::closed(vec![vec![entry, Pt::of(0, 1, -3, 1), exit]]);
        assert!(matches!(c.validate(&chart), Err(Error::PortalMismatch(_))));
    }

    #[test]
    fn self_crossing_rejected() {
        let chart = SurfaceChart::standard(2);
        // A planar bowtie around no holes: crossing at the origin region.
        let c = EmbeddedCurve::closed(vec![vec![
            Pt::of(1, 1, 2, 1),
            Pt::of(3, 1, -2, 1),
            Pt::of(3, 1, 2, 1),
            Pt::of(1, 1, -2, 1),
            Pt::of(1, 1, 2, 1),
        ]]);
        assert!(matches!(c.validate(&chart), Err(Error::NotEmbedded(_))));
    }

    #[test]
    fn small_planar_circle_is_valid_closed() {
        let chart = SurfaceChart::standard(2);
        let c = EmbeddedCurve::closed(vec![vec![
            Pt::of(1, 1, 1, 1),
            Pt::of(2, 1, 1, 1),
            Pt::of(2, 1, 2, 1),
            Pt::of(1, 1, 2, 1),
            Pt::of(1, 1, 1, 1),
        ]]);
        c.validate(&chart).unwrap();
        assert_eq!(c.num_transits(), 0);
        assert!(c.word(&chart).unwrap().is_empty());
    }

    #[test]
    fn replace_span_rerolls_a_planar_detour() {
        let chart = SurfaceChart::standard(2);
        // Square around nothing; replace its top edge with a taller detour.
        let c = EmbeddedCurve::closed(vec![vec![
            Pt::of(1, 1, 1, 1),
            Pt::of(2, 1, 1, 1),
            Pt::of(2, 1, 2, 1),
            Pt::of(1, 1, 2, 1),
            Pt::of(1, 1, 1, 1),
        ]]);
        // Span across the top edge (seg 2), entered from its first quarter
        // to its last quarter going forward.
        let from = CurveCursor { strand: 0, seg: 2, t: q(1, 4) };
        let to = CurveCursor { strand: 0, seg: 2, t: q(3, 4) };
        let pa = c.cursor_point(&from);
        let pb = c.cursor_point(&to);
        let detour = vec![vec![pa.clone(), Pt::of(7, 4, 5, 2), Pt::of(5, 4, 5, 2), pb.clone()]];
        let out = c.replace_span(&from, &to, detour).unwrap();
        out.validate(&chart).unwrap();
        assert!(out.is_planar_closed());
        assert_eq!(out.num_transits(), 0);
        // Wrapping span: keep only the top-edge middle, reroute the rest.
        let detour2 = vec![vec![pb.clone(), Pt::of(3, 2, 11, 4), pa.clone()]];
        let out2 = c.replace_span(&to, &from, detour2).unwrap();
        out2.validate(&chart).unwrap();
        assert_eq!(out2.strands()[0].len(), 4);
    }

    #[test]
    fn replace_span_through_a_portal() {
        let chart = SurfaceChart::standard(2);
        let c = handle_one_curve(&chart);
        // Cut out a piece of the single strand around its middle vertex and
        // reroute through a slightly different waypoint.
        let from = CurveCursor { strand: 0, seg: 0, t: q(1, 2) };
        let to = CurveCursor { strand: 0, seg: 1, t: q(1, 2) };
        let pa = c.cursor_point(&from);
        let pb = c.cursor_point(&to);
        let out = c
            .replace_span(&from, &to, vec![vec![pa, Pt::of(0, 1, 7, 2), pb]])
            .unwrap();
        out.validate(&chart).unwrap();
        assert_eq!(out.word(&chart).unwrap().letters(), &[1]);
        // The kept path crosses the portal, so the result has one transit.
        assert_eq!(out.num_transits(), 1);
    }

    #[test]
    fn locate_and_cursor_roundtrip() {
        let chart = SurfaceChart::standard(2);
        let c = handle_one_curve(&chart);
        let cur = CurveCursor { strand: 0, seg: 1, t: q(2, 7) };
        let p = c.cursor_point(&cur);
        assert_eq!(c.locate(&p), Some(cur));
        let _ = chart;
    }

    #[test]
    fn json_roundtrip() {
        let chart = SurfaceChart::standard(2);
        let c = handle_one_curve(&chart);
        let v = c.to_json(&chart);
        let back = EmbeddedCurve::from_json(&v).unwrap();
        assert_eq!(back, c);
        back.validate(&chart).unwrap();
    }
}
