//! Exact arrangement of curves on the glued surface.
//!
//! The planar input (curve polylines plus the portal circles) is cut into a
//! combinatorial map: vertices at polyline corners, transit points, proper
//! crossings and arc attachments; edges are sub-segments and portal circle
//! arcs.  Planar faces are extracted by half-edge rotation, and faces are
//! then glued across portal arcs into the connected regions of the curves'
//! complement on the surface, with exact Euler characteristics and boundary
//! walks.

use crate::chart::{PortalId, SurfaceChart};
use crate::curve::{EmbeddedCurve, PathKind};
use crate::error::{Error, Result};
use crate::geom::{
    angle_cmp, in_ccw_wedge, q, qi, seg_intersect, Pt, Q, QuadVal, Seg, SegCrossing,
};
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub type VertId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;
pub type RegionId = usize;
/// Half-edge id: 2 * edge + direction (0 = forward, 1 = backward).
pub type HalfId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexKind {
    /// Interior polyline vertex of a curve.
    Corner { curve: usize },
    /// Proper crossing of two different curves.
    Crossing { curves: (usize, usize) },
    /// Point on a portal circle (transit, arc endpoint on the circle, or a
    /// synthetic anchor on an otherwise empty circle).
    OnCircle { portal: PortalId, raw: Q },
    /// Free endpoint of an open arc in the open domain.
    Free { curve: usize },
    /// Endpoint of an open arc lying on another curve's segment.
    Attach { curve: usize, host: usize },
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub pt: Pt,
    pub kind: VertexKind,
    /// The glued partner for on-circle vertices.
    pub twin: Option<VertId>,
    /// Outgoing half-edges in counterclockwise angular order.
    pub out: Vec<HalfId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeKind {
    /// Piece of curve segment (curve, strand, segment index).
    Seg { curve: usize, strand: usize, seg: usize },
    /// Portal circle arc from raw parameter t_from counterclockwise to
    /// t_to; `wrap` marks arcs through the excluded angle-pi point.
    Arc { portal: PortalId, t_from: Q, t_to: Q, wrap: bool },
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub kind: EdgeKind,
    pub v: [VertId; 2],
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Boundary cycles as lists of half-edges with this face on the left;
    /// `outer` indexes the counterclockwise one (None for the unbounded
    /// face).
    pub cycles: Vec<Vec<HalfId>>,
    pub outer: Option<usize>,
    /// Inside the planar domain (not a hole interior, not unbounded).
    pub is_domain: bool,
}

#[derive(Debug, Clone)]
pub struct Region {
    pub faces: Vec<FaceId>,
    pub euler: i64,
    /// Boundary cycles on the glued surface: cyclic lists of curve
    /// half-edges with the region on the left.
    pub boundary: Vec<Vec<HalfId>>,
}

#[derive(Debug, Clone)]
pub struct Crossing {
    pub vert: VertId,
    pub curves: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    chart: SurfaceChart,
    curves: Vec<EmbeddedCurve>,
    verts: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    regions: Vec<Region>,
    crossings: Vec<Crossing>,
    cycle_of_half: Vec<usize>,
    face_of_cycle: Vec<Option<FaceId>>,
    region_of_face: Vec<Option<RegionId>>,
    /// Ordered sub-edges of each original curve segment.
    seg_parts: BTreeMap<(usize, usize, usize), Vec<EdgeId>>,
    /// Arcs of each circle in counterclockwise order.
    circle_arcs: Vec<Vec<EdgeId>>,
}

pub fn half(e: EdgeId, backward: bool) -> HalfId {
    2 * e + backward as usize
}

pub fn edge_of(h: HalfId) -> EdgeId {
    h / 2
}

pub fn is_backward(h: HalfId) -> bool {
    h & 1 == 1
}

pub fn twin_half(h: HalfId) -> HalfId {
    h ^ 1
}

impl Arrangement {
    pub fn build(chart: &SurfaceChart, curves: &[EmbeddedCurve]) -> Result<Arrangement> {
        for c in curves {
            c.validate(chart)?;
        }
        let mut b = Builder::new(chart.clone(), curves.to_vec());
        b.collect_curve_vertices()?;
        b.collect_crossings()?;
        b.build_circle_arcs()?;
        b.build_curve_edges()?;
        b.sort_outgoing();
        b.extract_cycles();
        b.classify_and_group_cycles()?;
        b.glue_regions()?;
        b.finish()
    }

    pub fn chart(&self) -> &SurfaceChart {
        &self.chart
    }

    pub fn curves(&self) -> &[EmbeddedCurve] {
        &self.curves
    }

    pub fn verts(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self, i: usize, j: usize) -> usize {
        self.crossings
            .iter()
            .filter(|c| c.curves == (i, j) || c.curves == (j, i))
            .count()
    }

    pub fn tail(&self, h: HalfId) -> VertId {
        let e = &self.edges[edge_of(h)];
        e.v[is_backward(h) as usize]
    }

    pub fn head(&self, h: HalfId) -> VertId {
        self.tail(twin_half(h))
    }

    pub fn face_left(&self, h: HalfId) -> Option<FaceId> {
        self.face_of_cycle[self.cycle_of_half[h]]
    }

    pub fn region_of_face(&self, f: FaceId) -> Option<RegionId> {
        self.region_of_face[f]
    }

    /// The curve a half-edge belongs to, if it is a curve edge.
    pub fn curve_of_half(&self, h: HalfId) -> Option<usize> {
        match &self.edges[edge_of(h)].kind {
            EdgeKind::Seg { curve, .. } => Some(*curve),
            EdgeKind::Arc { .. } => None,
        }
    }

    pub fn seg_parts(&self) -> &BTreeMap<(usize, usize, usize), Vec<EdgeId>> {
        &self.seg_parts
    }

    pub fn circle_arcs(&self) -> &[Vec<EdgeId>] {
        &self.circle_arcs
    }

    /// The partner of a portal arc edge under the gluing.
    pub fn partner_arc(&self, e: EdgeId) -> EdgeId {
        partner_arc_impl(&self.chart, &self.edges, &self.circle_arcs, e)
    }

    /// The half-edge of a portal arc whose left face is inside the domain.
    pub fn domain_half(&self, e: EdgeId) -> HalfId {
        domain_half_impl(&self.edges, e)
    }
}

fn domain_half_impl(edges: &[Edge], e: EdgeId) -> HalfId {
    match &edges[e].kind {
        // The domain is inside the outer circle (left of the forward,
        // counterclockwise traversal) and outside the holes (left of the
        // backward traversal).
        EdgeKind::Arc { portal: 0, .. } => half(e, false),
        EdgeKind::Arc { .. } => half(e, true),
        EdgeKind::Seg { .. } => panic!("domain_half of a curve edge"),
    }
}

fn partner_arc_impl(
    chart: &SurfaceChart,
    edges: &[Edge],
    circle_arcs: &[Vec<EdgeId>],
    e: EdgeId,
) -> EdgeId {
    let (portal, t_from, t_to) = match &edges[e].kind {
        EdgeKind::Arc { portal, t_from, t_to, .. } => (*portal, t_from, t_to),
        EdgeKind::Seg { .. } => panic!("partner_arc of a curve edge"),
    };
    let p2 = chart.partner(portal);
    // Between two holes the raw gluing map is t -> -t (reverses the arc);
    // with the outer circle involved it is the identity.
    let (want_from, want_to) = if portal != 0 && p2 != 0 {
        (-t_to.clone(), -t_from.clone())
    } else {
        (t_from.clone(), t_to.clone())
    };
    for &a in &circle_arcs[p2] {
        if let EdgeKind::Arc { t_from: f, t_to: t, .. } = &edges[a].kind {
            if *f == want_from && *t == want_to {
                return a;
            }
        }
    }
    panic!("portal arc without a glued partner");
}

struct Builder {
    chart: SurfaceChart,
    curves: Vec<EmbeddedCurve>,
    verts: Vec<Vertex>,
    vert_at: BTreeMap<Pt, VertId>,
    edges: Vec<Edge>,
    crossings: Vec<Crossing>,
    /// Interior subdivision points of each original curve segment.
    splits: BTreeMap<(usize, usize, usize), Vec<(Q, VertId)>>,
    /// Strand-end vertices: ids of (curve, strand) first/last points.
    strand_ends: BTreeMap<(usize, usize), (VertId, VertId)>,
    circle_arcs: Vec<Vec<EdgeId>>,
    seg_parts: BTreeMap<(usize, usize, usize), Vec<EdgeId>>,
    cycles: Vec<Vec<HalfId>>,
    cycle_of_half: Vec<usize>,
    cycle_is_hole: Vec<bool>,
    face_of_cycle: Vec<Option<FaceId>>,
    faces: Vec<Face>,
    region_of_face: Vec<Option<RegionId>>,
    regions: Vec<Region>,
}

impl Builder {
    fn new(chart: SurfaceChart, curves: Vec<EmbeddedCurve>) -> Builder {
        let n = chart.num_portals();
        Builder {
            chart,
            curves,
            verts: Vec::new(),
            vert_at: BTreeMap::new(),
            edges: Vec::new(),
            crossings: Vec::new(),
            splits: BTreeMap::new(),
            strand_ends: BTreeMap::new(),
            circle_arcs: vec![Vec::new(); n],
            seg_parts: BTreeMap::new(),
            cycles: Vec::new(),
            cycle_of_half: Vec::new(),
            cycle_is_hole: Vec::new(),
            face_of_cycle: Vec::new(),
            faces: Vec::new(),
            region_of_face: Vec::new(),
            regions: Vec::new(),
        }
    }

    fn new_vertex(&mut self, pt: Pt, kind: VertexKind) -> Result<VertId> {
        if self.vert_at.contains_key(&pt) {
            return Err(Error::NonTransversal(format!(
                "coincident special points at {pt:?}"
            )));
        }
        let id = self.verts.len();
        self.vert_at.insert(pt.clone(), id);
        self.verts.push(Vertex { pt, kind, twin: None, out: Vec::new() });
        Ok(id)
    }

    /// Creates an on-circle vertex together with its glued twin on the
    /// partner circle.
    fn new_circle_vertex_pair(&mut self, portal: PortalId, raw: &Q) -> Result<(VertId, VertId)> {
        let p2 = self.chart.partner(portal);
        let raw2 = self.chart.glued_raw(portal, raw);
        let pt1 = self.chart.circle(portal).point_at(raw);
        let pt2 = self.chart.circle(p2).point_at(&raw2);
        let v1 = self.new_vertex(pt1, VertexKind::OnCircle { portal, raw: raw.clone() })?;
        let v2 = self.new_vertex(pt2, VertexKind::OnCircle { portal: p2, raw: raw2 })?;
        self.verts[v1].twin = Some(v2);
        self.verts[v2].twin = Some(v1);
        Ok((v1, v2))
    }

    fn collect_curve_vertices(&mut self) -> Result<()> {
        for ci in 0..self.curves.len() {
            let curve = self.curves[ci].clone();
            let strands = curve.strands();
            let k = strands.len();
            let planar_closed = curve.is_planar_closed();
            // Junctions between strands: exit on one circle, entry on the
            // partner.  For closed curves the junction after the last
            // strand wraps to the first.
            let joins: Vec<(usize, usize)> = match curve.kind() {
                PathKind::Closed if planar_closed => Vec::new(),
                PathKind::Closed => (0..k).map(|i| (i, (i + 1) % k)).collect(),
                PathKind::Arc => (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            };
            let mut end_ids: BTreeMap<(usize, bool), VertId> = BTreeMap::new();
            for &(i, j) in &joins {
                let exit = strands[i].last().unwrap();
                let portal = self
                    .chart
                    .portal_of_point(exit)
                    .ok_or_else(|| Error::PortalMismatch("junction off circle".into()))?;
                let raw = self.chart.circle(portal).param_of(exit).unwrap();
                let (v_exit, v_entry) = self.new_circle_vertex_pair(portal, &raw)?;
                debug_assert_eq!(self.verts[v_entry].pt, strands[j][0]);
                end_ids.insert((i, true), v_exit);
                end_ids.insert((j, false), v_entry);
            }
            // Remaining strand ends: arc free ends (possibly on a circle)
            // or the shared vertex of a planar closed strand.
            for si in 0..k {
                for last in [false, true] {
                    if end_ids.contains_key(&(si, last)) {
                        continue;
                    }
                    let strand = &strands[si];
                    let pt = if last { strand.last().unwrap() } else { &strand[0] };
                    if planar_closed && last {
                        // Repeated closure vertex: reuse the first one.
                        let v0 = end_ids[&(si, false)];
                        end_ids.insert((si, true), v0);
                        continue;
                    }
                    let v = if planar_closed {
                        self.new_vertex(pt.clone(), VertexKind::Corner { curve: ci })?
                    } else if let Some(portal) = self.chart.portal_of_point(pt) {
                        let raw = self.chart.circle(portal).param_of(pt).unwrap();
                        self.new_circle_vertex_pair(portal, &raw)?.0
                    } else if let Some(&v) = self.vert_at.get(pt) {
                        // Coincides with something already built; only legal
                        // as an attachment resolved in the crossing phase.
                        return Err(Error::NonTransversal(format!(
                            "curve endpoint collides with existing vertex {v}"
                        )));
                    } else {
                        self.new_vertex(pt.clone(), VertexKind::Free { curve: ci })?
                    };
                    end_ids.insert((si, last), v);
                }
            }
            for si in 0..k {
                let first = end_ids[&(si, false)];
                let last = end_ids[&(si, true)];
                self.strand_ends.insert((ci, si), (first, last));
                // Interior corners.
                for vi in 1..strands[si].len() - 1 {
                    let pt = strands[si][vi].clone();
                    self.new_vertex(pt, VertexKind::Corner { curve: ci })?;
                }
            }
        }
        Ok(())
    }

    fn collect_crossings(&mut self) -> Result<()> {
        let n = self.curves.len();
        let all_segs: Vec<Vec<(Seg, (usize, usize))>> =
            self.curves.iter().map(|c| c.segments()).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                for (s1, id1) in &all_segs[i] {
                    for (s2, id2) in &all_segs[j] {
                        match seg_intersect(s1, s2) {
                            SegCrossing::None => {}
                            SegCrossing::Proper { p, t1, t2 } => {
                                let v = self
                                    .new_vertex(p, VertexKind::Crossing { curves: (i, j) })
                                    .map_err(|_| {
                                        Error::NonTransversal(format!(
                                            "crossing of curves {i},{j} at an existing vertex"
                                        ))
                                    })?;
                                self.crossings.push(Crossing { vert: v, curves: (i, j) });
                                self.splits
                                    .entry((i, id1.0, id1.1))
                                    .or_default()
                                    .push((t1, v));
                                self.splits
                                    .entry((j, id2.0, id2.1))
                                    .or_default()
                                    .push((t2, v));
                            }
                            SegCrossing::Degenerate => {
                                self.resolve_degenerate(i, *id1, s1, j, *id2, s2)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// A degenerate contact between segments of two curves is only legal
    /// when an arc endpoint of one lies in the interior of the other.
    fn resolve_degenerate(
        &mut self,
        i: usize,
        id1: (usize, usize),
        s1: &Seg,
        j: usize,
        id2: (usize, usize),
        s2: &Seg,
    ) -> Result<()> {
        // An endpoint of an open curve, incident to this very segment,
        // lying strictly inside the other segment.
        let attach_of = |b: &Builder, owner: usize, seg: &Seg, other: &Seg| -> Option<Pt> {
            let (first, last) = b.curves[owner].endpoints()?;
            for (pt, seg_end) in [(first, &seg.a), (last, &seg.b)] {
                if pt == seg_end
                    && crate::geom::dist2_point_seg(pt, other).is_zero()
                    && *pt != other.a
                    && *pt != other.b
                {
                    return Some(pt.clone());
                }
            }
            None
        };
        let a1 = attach_of(self, i, s1, s2);
        let a2 = attach_of(self, j, s2, s1);
        let (owner, host, pt, host_id) = match (a1, a2) {
            (Some(p), None) => (i, j, p, id2),
            (None, Some(p)) => (j, i, p, id1),
            _ => {
                return Err(Error::NonTransversal(format!(
                    "degenerate contact between curves {i} and {j}"
                )))
            }
        };
        // The endpoint vertex may already exist (created as Free).
        let v = match self.vert_at.get(&pt) {
            Some(&v) => {
                match self.verts[v].kind.clone() {
                    VertexKind::Free { curve } if curve == owner => {
                        self.verts[v].kind = VertexKind::Attach { curve: owner, host };
                        v
                    }
                    VertexKind::Attach { curve, host: h0 } if curve == owner && h0 == host => v,
                    _ => {
                        return Err(Error::NonTransversal(format!(
                            "illegal contact between curves {i} and {j}"
                        )))
                    }
                }
            }
            None => self.new_vertex(pt.clone(), VertexKind::Attach { curve: owner, host })?,
        };
        // Subdivide the host segment at the attachment parameter.
        let host_seg = if host == i { s1 } else { s2 };
        let d = host_seg.dir();
        let t = if !d.x.is_zero() {
            (&pt.x - &host_seg.a.x) / &d.x
        } else {
            (&pt.y - &host_seg.a.y) / &d.y
        };
        let entry = self.splits.entry((host, host_id.0, host_id.1)).or_default();
        if !entry.iter().any(|(_, vv)| *vv == v) {
            entry.push((t, v));
        }
        Ok(())
    }

    fn build_circle_arcs(&mut self) -> Result<()> {
        // Anchor vertices on circles that carry no curve points: paired
        // circles are both empty (on-circle vertices come in glued pairs),
        // and the anchors are placed at glued parameters (raw 0 on both).
        for p in 0..self.chart.num_portals() {
            if p < self.chart.partner(p) {
                continue;
            }
            let p2 = self.chart.partner(p);
            let empty = !self
                .verts
                .iter()
                .any(|v| matches!(&v.kind, VertexKind::OnCircle { portal, .. } if *portal == p || *portal == p2));
            if empty {
                self.new_circle_vertex_pair(p, &Q::zero())?;
            }
        }
        for p in 0..self.chart.num_portals() {
            let mut on: Vec<(Q, VertId)> = self
                .verts
                .iter()
                .enumerate()
                .filter_map(|(i, v)| match &v.kind {
                    VertexKind::OnCircle { portal, raw } if *portal == p => {
                        Some((raw.clone(), i))
                    }
                    _ => None,
                })
                .collect();
            on.sort_by(|a, b| a.0.cmp(&b.0));
            let k = on.len();
            for idx in 0..k {
                let (t_from, v_from) = on[idx].clone();
                let (t_to, v_to) = on[(idx + 1) % k].clone();
                let wrap = idx + 1 == k; // through the excluded point
                let e = self.edges.len();
                self.edges.push(Edge {
                    kind: EdgeKind::Arc { portal: p, t_from, t_to, wrap },
                    v: [v_from, v_to],
                });
                self.circle_arcs[p].push(e);
            }
        }
        Ok(())
    }

    fn build_curve_edges(&mut self) -> Result<()> {
        for ci in 0..self.curves.len() {
            let curve = self.curves[ci].clone();
            let planar_closed = curve.is_planar_closed();
            for (si, strand) in curve.strands().iter().enumerate() {
                let (v_first, v_last) = self.strand_ends[&(ci, si)];
                let last_pt = strand.len() - 1;
                let vert_of = |b: &Builder, vi: usize| -> VertId {
                    if vi == 0 {
                        v_first
                    } else if vi == last_pt {
                        v_last
                    } else {
                        b.vert_at[&strand[vi]]
                    }
                };
                let _ = planar_closed;
                for segi in 0..last_pt {
                    let va = vert_of(self, segi);
                    let vb = vert_of(self, segi + 1);
                    let mut interior = self
                        .splits
                        .remove(&(ci, si, segi))
                        .unwrap_or_default();
                    interior.sort_by(|a, b| a.0.cmp(&b.0));
                    let mut chain = vec![va];
                    chain.extend(interior.iter().map(|(_, v)| *v));
                    chain.push(vb);
                    let mut parts = Vec::new();
                    for w in chain.windows(2) {
                        let e = self.edges.len();
                        self.edges.push(Edge {
                            kind: EdgeKind::Seg { curve: ci, strand: si, seg: segi },
                            v: [w[0], w[1]],
                        });
                        parts.push(e);
                    }
                    self.seg_parts.insert((ci, si, segi), parts);
                }
            }
        }
        Ok(())
    }

    fn half_dir_at_tail(&self, h: HalfId) -> Pt {
        let e = &self.edges[edge_of(h)];
        match &e.kind {
            EdgeKind::Seg { .. } => {
                let a = &self.verts[e.v[is_backward(h) as usize]].pt;
                let b = &self.verts[e.v[!is_backward(h) as usize]].pt;
                b.sub(a)
            }
            EdgeKind::Arc { portal, t_from, t_to, .. } => {
                let c = self.chart.circle(*portal);
                if is_backward(h) {
                    c.tangent_at(t_to).scale(&qi(-1))
                } else {
                    c.tangent_at(t_from)
                }
            }
        }
    }

    fn sort_outgoing(&mut self) {
        let mut outs: Vec<Vec<HalfId>> = vec![Vec::new(); self.verts.len()];
        for e in 0..self.edges.len() {
            let ev = self.edges[e].v;
            outs[ev[0]].push(half(e, false));
            outs[ev[1]].push(half(e, true));
        }
        for (vi, mut list) in outs.into_iter().enumerate() {
            let dirs: Vec<(HalfId, Pt)> =
                list.iter().map(|&h| (h, self.half_dir_at_tail(h))).collect();
            list.sort_by(|&a, &b| {
                let da = &dirs.iter().find(|(h, _)| *h == a).unwrap().1;
                let db = &dirs.iter().find(|(h, _)| *h == b).unwrap().1;
                angle_cmp(da, db)
            });
            self.verts[vi].out = list;
        }
    }

    /// The face-on-left successor: at the head of h, the outgoing half-edge
    /// immediately clockwise from the reversal of h.
    fn next_half(&self, h: HalfId) -> HalfId {
        let v = {
            let e = &self.edges[edge_of(h)];
            e.v[!is_backward(h) as usize]
        };
        let rev = twin_half(h);
        let out = &self.verts[v].out;
        let idx = out.iter().position(|&x| x == rev).expect("rev registered");
        out[(idx + out.len() - 1) % out.len()]
    }

    fn extract_cycles(&mut self) {
        let nh = 2 * self.edges.len();
        self.cycle_of_half = vec![usize::MAX; nh];
        for h0 in 0..nh {
            if self.cycle_of_half[h0] != usize::MAX {
                continue;
            }
            let cid = self.cycles.len();
            let mut cyc = Vec::new();
            let mut h = h0;
            loop {
                self.cycle_of_half[h] = cid;
                cyc.push(h);
                h = self.next_half(h);
                if h == h0 {
                    break;
                }
            }
            self.cycles.push(cyc);
        }
    }

    /// The extreme point of a cycle under the symbolically rotated
    /// direction (-1, -eps): the lexicographically least (x, then y) point
    /// among vertices and leftmost circle points of wrap arcs.
    fn cycle_min(&self, cid: usize) -> (Pt, MinSite) {
        let mut best: Option<(Pt, MinSite)> = None;
        for &h in &self.cycles[cid] {
            let tv = {
                let e = &self.edges[edge_of(h)];
                e.v[is_backward(h) as usize]
            };
            let cand = (self.verts[tv].pt.clone(), MinSite::Vertex(tv));
            best = Some(match best {
                None => cand,
                Some(b) => {
                    if cand.0 < b.0 {
                        cand
                    } else {
                        b
                    }
                }
            });
            if let EdgeKind::Arc { portal, wrap: true, .. } = &self.edges[edge_of(h)].kind {
                let c = self.chart.circle(*portal);
                let pt = Pt::new(&c.center.x - &c.radius, c.center.y.clone());
                let cand = (pt, MinSite::ArcLeft(h));
                best = Some(match best {
                    None => cand,
                    Some(b) => {
                        if cand.0 < b.0 {
                            cand
                        } else {
                            b
                        }
                    }
                });
            }
        }
        best.expect("nonempty cycle")
    }

    /// Classifies a cycle: true if it is a hole cycle (the face it bounds
    /// extends to the left of the cycle's extreme point).
    fn cycle_is_hole_cycle(&self, cid: usize) -> bool {
        let (_, site) = self.cycle_min(cid);
        match site {
            MinSite::ArcLeft(h) => is_backward(h),
            MinSite::Vertex(v) => {
                // The wedge containing direction (-1, 0-) belongs to the
                // face left of the angular predecessor of (-1, 0) among the
                // outgoing half-edges.
                let target = Pt::of(-1, 1, 0, 1);
                let out = &self.verts[v].out;
                let mut pred = None;
                for &oh in out {
                    let d = self.half_dir_at_tail(oh);
                    if angle_cmp(&d, &target) == Ordering::Less {
                        pred = Some(oh);
                    }
                }
                let pred = pred.unwrap_or_else(|| *out.last().unwrap());
                self.cycle_of_half[pred] == cid
            }
        }
    }

    fn classify_and_group_cycles(&mut self) -> Result<()> {
        let ncyc = self.cycles.len();
        self.cycle_is_hole = (0..ncyc).map(|c| self.cycle_is_hole_cycle(c)).collect();
        // Union-find over cycles: each hole cycle joins the cycle found by
        // probing outward from its extreme point.
        let mut uf = UnionFind::new(ncyc);
        for cid in 0..ncyc {
            if !self.cycle_is_hole[cid] {
                continue;
            }
            match self.probe_containing_half(cid)? {
                Some(h) => uf.union(cid, self.cycle_of_half[h]),
                None => {} // unbounded face
            }
        }
        // Build faces from groups.
        let mut group_face: BTreeMap<usize, FaceId> = BTreeMap::new();
        self.face_of_cycle = vec![None; ncyc];
        for cid in 0..ncyc {
            let root = uf.find(cid);
            if !self.cycle_is_hole[cid] {
                let f = self.faces.len();
                if group_face.insert(root, f).is_some() {
                    return Err(Error::ModelDefect(
                        "two outer cycles in one face group".into(),
                    ));
                }
                self.faces.push(Face { cycles: Vec::new(), outer: None, is_domain: true });
            }
        }
        for cid in 0..ncyc {
            let root = uf.find(cid);
            if let Some(&f) = group_face.get(&root) {
                self.face_of_cycle[cid] = Some(f);
                let face = &mut self.faces[f];
                if !self.cycle_is_hole[cid] {
                    face.outer = Some(face.cycles.len());
                }
                face.cycles.push(self.cycles[cid].clone());
            }
            // Groups without an outer cycle are unbounded: left as None.
        }
        // Mark hole interiors as non-domain: the face left of the forward
        // half of any inner-circle arc.
        for p in 1..self.chart.num_portals() {
            let e = self.circle_arcs[p][0];
            let f = self.face_of_cycle[self.cycle_of_half[half(e, false)]]
                .ok_or_else(|| Error::ModelDefect("hole interior unbounded".into()))?;
            self.faces[f].is_domain = false;
        }
        Ok(())
    }

    /// Shoots a ray from the extreme point of a hole cycle toward (-1,-d)
    /// and returns the half-edge (face side toward the ray) of the nearest
    /// hit, or None if the ray escapes.
    fn probe_containing_half(&self, cid: usize) -> Result<Option<HalfId>> {
        let (base, site) = self.cycle_min(cid);
        // Wedge constraint at a vertex base: direction must stay in the
        // face wedge around (-1, 0-).
        let wedge = match site {
            MinSite::Vertex(v) => {
                let target = Pt::of(-1, 1, 0, 1);
                let out = &self.verts[v].out;
                let mut pred_idx = None;
                for (i, &oh) in out.iter().enumerate() {
                    let d = self.half_dir_at_tail(oh);
                    if angle_cmp(&d, &target) == Ordering::Less {
                        pred_idx = Some(i);
                    }
                }
                let pi = pred_idx.unwrap_or(out.len() - 1);
                let from = self.half_dir_at_tail(out[pi]);
                let to = self.half_dir_at_tail(out[(pi + 1) % out.len()]);
                Some((from, to))
            }
            MinSite::ArcLeft(_) => None,
        };
        let mut denom: i64 = 2;
        for _ in 0..200 {
            let d = Pt::new(qi(-1), -q(1, denom));
            denom = denom.saturating_mul(2);
            if let Some((from, to)) = &wedge {
                if angle_cmp(from, to) != Ordering::Equal && !in_ccw_wedge(from, to, &d) {
                    continue;
                }
            }
            if !self.ray_is_generic(&base, &d) {
                continue;
            }
            return Ok(self.cast_ray(&base, &d));
        }
        Err(Error::ModelDefect("no generic probe direction found".into()))
    }

    fn ray_is_generic(&self, base: &Pt, d: &Pt) -> bool {
        for v in &self.verts {
            if v.pt != *base && v.pt.sub(base).cross(d).is_zero() {
                return false;
            }
        }
        for c in self.chart.circles() {
            let w = base.sub(&c.center);
            let a = d.norm2();
            let b = qi(2) * w.dot(d);
            let c0 = w.norm2() - &c.radius * &c.radius;
            let disc = &b * &b - qi(4) * &a * &c0;
            if disc.is_zero() {
                return false;
            }
            if c0.is_zero() && w.dot(d).is_zero() {
                return false;
            }
        }
        true
    }

    fn cast_ray(&self, base: &Pt, d: &Pt) -> Option<HalfId> {
        let mut best: Option<(QuadVal, HalfId)> = None;
        let consider = |s: QuadVal, h: HalfId, best: &mut Option<(QuadVal, HalfId)>| {
            if s.sign() <= 0 {
                return;
            }
            match best {
                None => *best = Some((s, h)),
                Some((bs, _)) => {
                    if s.cmp_quad(bs) == Ordering::Less {
                        *best = Some((s, h));
                    }
                }
            }
        };
        // Segment edges: rational hit parameters.
        for (e, edge) in self.edges.iter().enumerate() {
            if let EdgeKind::Seg { .. } = edge.kind {
                let a = &self.verts[edge.v[0]].pt;
                let b = &self.verts[edge.v[1]].pt;
                let ed = b.sub(a);
                let den = d.cross(&ed);
                if den.is_zero() {
                    continue;
                }
                let w = a.sub(base);
                let s = w.cross(&ed) / &den;
                let u = w.cross(d) / &den;
                if u <= Q::zero() || u >= Q::one() || !s.is_positive() {
                    continue;
                }
                // Face toward the base: left of the traversal whose left
                // side contains -d.
                let back = !(ed.cross(&d.scale(&qi(-1))).is_positive());
                consider(QuadVal::rational(s), half(e, back), &mut best);
            }
        }
        // Circle arcs: quadratic hit parameters.
        for (p, c) in self.chart.circles().iter().enumerate() {
            let w = base.sub(&c.center);
            let a2 = d.norm2();
            let b = qi(2) * w.dot(d);
            let c0 = w.norm2() - &c.radius * &c.radius;
            let disc = &b * &b - qi(4) * &a2 * &c0;
            if !disc.is_positive() {
                continue;
            }
            for sgn in [1i64, -1] {
                let s = QuadVal::new(
                    -&b / (qi(2) * &a2),
                    q(sgn, 1) / (qi(2) * &a2),
                    disc.clone(),
                )
                .normalized();
                if s.sign() <= 0 {
                    continue;
                }
                // Which arc of this circle contains the hit point?
                for &e in &self.circle_arcs[p] {
                    if let EdgeKind::Arc { t_from, t_to, wrap, .. } = &self.edges[e].kind {
                        if !self.hit_on_arc(&s, base, d, c, t_from, t_to, *wrap) {
                            continue;
                        }
                        // Side: forward (ccw) half faces the base when the
                        // radial direction at the hit has positive dot with d.
                        let rx = QuadVal::new(
                            &base.x + &s.a * &d.x - &c.center.x,
                            &s.b * &d.x,
                            s.c.clone(),
                        );
                        let ry = QuadVal::new(
                            &base.y + &s.a * &d.y - &c.center.y,
                            &s.b * &d.y,
                            s.c.clone(),
                        );
                        let dot = QuadVal::new(
                            &rx.a * &d.x + &ry.a * &d.y,
                            &rx.b * &d.x + &ry.b * &d.y,
                            s.c.clone(),
                        );
                        let back = dot.sign() < 0;
                        consider(s.clone(), half(e, back), &mut best);
                    }
                }
            }
        }
        best.map(|(_, h)| h)
    }

    /// Whether the ray hit at parameter s lies on the open circle arc
    /// (t_from, t_to) counterclockwise.
    #[allow(clippy::too_many_arguments)]
    fn hit_on_arc(
        &self,
        s: &QuadVal,
        base: &Pt,
        d: &Pt,
        c: &crate::geom::Circle,
        t_from: &Q,
        t_to: &Q,
        wrap: bool,
    ) -> bool {
        // Hit point coordinates relative to the circle.
        let vx = QuadVal::new(&base.x + &s.a * &d.x - &c.center.x, &s.b * &d.x, s.c.clone());
        let vy = QuadVal::new(&base.y + &s.a * &d.y - &c.center.y, &s.b * &d.y, s.c.clone());
        // Parameter t = vy / (vx + r); the denominator vanishes exactly at
        // the excluded angle-pi point.
        let den = QuadVal::new(&vx.a + &c.radius, vx.b.clone(), vx.c.clone());
        if den.sign() == 0 {
            return wrap;
        }
        // t = num/den with shared radical: rationalize.
        // num * conj(den) / (den * conj(den)); conj flips the radical sign.
        let dd = &den.a * &den.a - &den.b * &den.b * &den.c; // rational
        let t = QuadVal::new(
            (&vy.a * &den.a - &vy.b * &den.b * &den.c) / &dd,
            (&vy.b * &den.a - &vy.a * &den.b) / &dd,
            vy.c.clone(),
        );
        let after_from = t.cmp_q(t_from) == Ordering::Greater;
        let before_to = t.cmp_q(t_to) == Ordering::Less;
        if t_from == t_to {
            // Full circle (anchor): everything except the anchor itself.
            t.cmp_q(t_from) != Ordering::Equal
        } else if !wrap {
            after_from && before_to
        } else {
            after_from || before_to
        }
    }

    fn glue_regions(&mut self) -> Result<()> {
        let nf = self.faces.len();
        let mut uf = UnionFind::new(nf);
        for p in 0..self.chart.num_portals() {
            if p > self.chart.partner(p) {
                continue;
            }
            for &e in &self.circle_arcs[p] {
                let e2 = partner_arc_impl(&self.chart, &self.edges, &self.circle_arcs, e);
                let f1 = self.face_of_cycle[self.cycle_of_half[domain_half_impl(&self.edges, e)]]
                    .ok_or_else(|| Error::ModelDefect("portal arc on unbounded face".into()))?;
                let f2 = self.face_of_cycle[self.cycle_of_half[domain_half_impl(&self.edges, e2)]]
                    .ok_or_else(|| Error::ModelDefect("portal arc on unbounded face".into()))?;
                if !self.faces[f1].is_domain || !self.faces[f2].is_domain {
                    return Err(Error::ModelDefect("portal glued to a non-domain face".into()));
                }
                uf.union(f1, f2);
            }
        }
        self.region_of_face = vec![None; nf];
        let mut region_ids: BTreeMap<usize, RegionId> = BTreeMap::new();
        for f in 0..nf {
            if !self.faces[f].is_domain {
                continue;
            }
            let root = uf.find(f);
            let rid = *region_ids.entry(root).or_insert_with(|| {
                self.regions.push(Region { faces: Vec::new(), euler: 0, boundary: Vec::new() });
                self.regions.len() - 1
            });
            self.region_of_face[f] = Some(rid);
            self.regions[rid].faces.push(f);
        }
        self.compute_region_invariants()
    }

    /// The glued-boundary successor of a curve half-edge: face-cycle next,
    /// teleporting across portal arcs.
    fn glued_succ(&self, h0: HalfId) -> Result<HalfId> {
        let mut n = self.next_half(h0);
        for _ in 0..2 * self.edges.len() + 2 {
            match self.edges[edge_of(n)].kind {
                EdgeKind::Seg { .. } => return Ok(n),
                EdgeKind::Arc { .. } => {
                    let e = edge_of(n);
                    if n != domain_half_impl(&self.edges, e) {
                        return Err(Error::ModelDefect(
                            "boundary walk reached a non-domain arc side".into(),
                        ));
                    }
                    let e2 = partner_arc_impl(&self.chart, &self.edges, &self.circle_arcs, e);
                    n = self.next_half(domain_half_impl(&self.edges, e2));
                }
            }
        }
        Err(Error::ModelDefect("glued boundary walk did not terminate".into()))
    }

    fn compute_region_invariants(&mut self) -> Result<()> {
        // Boundary cycles.
        let mut visited = vec![false; 2 * self.edges.len()];
        let mut cycles_per_region: Vec<Vec<Vec<HalfId>>> = vec![Vec::new(); self.regions.len()];
        for h0 in 0..2 * self.edges.len() {
            if visited[h0] {
                continue;
            }
            if !matches!(self.edges[edge_of(h0)].kind, EdgeKind::Seg { .. }) {
                continue;
            }
            let f = match self.face_of_cycle[self.cycle_of_half[h0]] {
                Some(f) => f,
                None => continue,
            };
            let rid = match self.region_of_face[f] {
                Some(r) => r,
                None => continue,
            };
            let mut cyc = Vec::new();
            let mut h = h0;
            loop {
                visited[h] = true;
                cyc.push(h);
                h = self.glued_succ(h)?;
                if h == h0 {
                    break;
                }
            }
            cycles_per_region[rid].push(cyc);
        }
        for (rid, cycles) in cycles_per_region.into_iter().enumerate() {
            self.regions[rid].boundary = cycles;
        }
        // Euler characteristics via the glued cell counts.
        for rid in 0..self.regions.len() {
            let mut vset: std::collections::BTreeSet<VertId> = Default::default();
            let mut eset: std::collections::BTreeSet<EdgeId> = Default::default();
            let mut fsum: i64 = 0;
            for &f in &self.regions[rid].faces {
                fsum += 2 - self.faces[f].cycles.len() as i64;
                for cyc in &self.faces[f].cycles {
                    for &h in cyc {
                        let e = edge_of(h);
                        let ekey = match self.edges[e].kind {
                            EdgeKind::Seg { .. } => e,
                            EdgeKind::Arc { .. } => e.min(partner_arc_impl(
                                &self.chart,
                                &self.edges,
                                &self.circle_arcs,
                                e,
                            )),
                        };
                        eset.insert(ekey);
                        let tv = self.edges[e].v[is_backward(h) as usize];
                        let vkey = match self.verts[tv].twin {
                            Some(tw) => tv.min(tw),
                            None => tv,
                        };
                        vset.insert(vkey);
                    }
                }
            }
            self.regions[rid].euler = vset.len() as i64 - eset.len() as i64 + fsum;
        }
        Ok(())
    }

    fn finish(self) -> Result<Arrangement> {
        Ok(Arrangement {
            chart: self.chart,
            curves: self.curves,
            verts: self.verts,
            edges: self.edges,
            faces: self.faces,
            regions: self.regions,
            crossings: self.crossings,
            cycle_of_half: self.cycle_of_half,
            face_of_cycle: self.face_of_cycle,
            region_of_face: self.region_of_face,
            seg_parts: self.seg_parts,
            circle_arcs: self.circle_arcs,
        })
    }
}

#[derive(Debug, Clone)]
enum MinSite {
    Vertex(VertId),
    /// Leftmost point of the circle, interior to this (wrap) arc half-edge.
    ArcLeft(HalfId),
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Validates the glued cell structure of a bare chart: one region with
/// Euler characteristic 2 - 2g.
pub fn validate_chart_topology(chart: &SurfaceChart) -> Result<()> {
    let arr = Arrangement::build(chart, &[])?;
    if arr.regions().len() != 1 {
        return Err(Error::BadChart(format!(
            "glued chart has {} components, expected 1",
            arr.regions().len()
        )));
    }
    let want = 2 - 2 * chart.genus() as i64;
    let got = arr.regions()[0].euler;
    if got != want {
        return Err(Error::BadChart(format!(
            "glued chart has Euler characteristic {got}, expected {want}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::q;

    #[test]
    fn bare_chart_topology() {
        for g in 2..=4 {
            let chart = SurfaceChart::standard(g);
            validate_chart_topology(&chart).unwrap();
        }
    }

    #[test]
    fn planar_circle_splits_off_disk() {
        let chart = SurfaceChart::standard(2);
        let square = EmbeddedCurve::closed(vec![vec![
            Pt::of(1, 1, 1, 1),
            Pt::of(2, 1, 1, 1),
            Pt::of(2, 1, 2, 1),
            Pt::of(1, 1, 2, 1),
            Pt::of(1, 1, 1, 1),
        ]]);
        let arr = Arrangement::build(&chart, &[square]).unwrap();
        assert_eq!(arr.regions().len(), 2);
        let mut eulers: Vec<i64> = arr.regions().iter().map(|r| r.euler).collect();
        eulers.sort();
        assert_eq!(eulers, vec![-3, 1]); // disk and genus-2 complement
        let disk = arr.regions().iter().find(|r| r.euler == 1).unwrap();
        assert_eq!(disk.boundary.len(), 1);
        assert_eq!(disk.boundary[0].len(), 4);
    }

    #[test]
    fn nonseparating_curve_complement_connected() {
        let chart = SurfaceChart::standard(2);
        let t = q(1, 5);
        let exit = chart.circle(1).point_at(&t);
        let entry = chart.circle(0).point_at(&t);
        let c = EmbeddedCurve::closed(vec![vec![entry, Pt::of(0, 1, 3, 1), exit]]);
        let arr = Arrangement::build(&chart, &[c]).unwrap();
        assert_eq!(arr.regions().len(), 1);
        // Cutting along a curve does not change the Euler characteristic.
        assert_eq!(arr.regions()[0].euler, -2);
        // Two boundary cycles: one for each side of the curve.
        assert_eq!(arr.regions()[0].boundary.len(), 2);
    }

    #[test]
    fn crossing_curves_counted() {
        let chart = SurfaceChart::standard(2);
        let sq1 = EmbeddedCurve::closed(vec![vec![
            Pt::of(1, 1, 1, 1),
            Pt::of(3, 1, 1, 1),
            Pt::of(3, 1, 3, 1),
            Pt::of(1, 1, 3, 1),
            Pt::of(1, 1, 1, 1),
        ]]);
        let sq2 = EmbeddedCurve::closed(vec![vec![
            Pt::of(2, 1, 2, 1),
            Pt::of(17, 4, 2, 1),
            Pt::of(17, 4, 7, 2),
            Pt::of(2, 1, 7, 2),
            Pt::of(2, 1, 2, 1),
        ]]);
        let arr = Arrangement::build(&chart, &[sq1, sq2]).unwrap();
        assert_eq!(arr.crossing_count(0, 1), 2);
        // Regions: lens, two crescents, outside: 4 total.
        assert_eq!(arr.regions().len(), 4);
        // The lens (inside both squares) is the unique disk whose boundary
        // is two pieces of each curve meeting at the two crossings.
        let lens = arr
            .regions()
            .iter()
            .filter(|r| {
                r.euler == 1
                    && r.boundary.len() == 1
                    && r.boundary[0].len() == 4
            })
            .count();
        assert_eq!(lens, 1);
    }
}
