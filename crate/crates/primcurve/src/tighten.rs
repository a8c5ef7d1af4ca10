//! Minimal position: removes innermost bigons between curves and between a
//! curve and a portal circle until none remain, by explicit polyline
//! isotopies.  Every move is re-validated exactly and retried with smaller
//! clearances on failure, so the output is always a valid embedded family.

use crate::arrangement::{edge_of, Arrangement, EdgeKind, HalfId, VertexKind};
use crate::chart::{PortalId, SurfaceChart};
use crate::curve::{CurveCursor, EmbeddedCurve};
use crate::error::{Error, Result};
use crate::geom::{q, Pt, Q};
use crate::offset::{arc_parallel, parallel_run, ArcSpan};
use num::One;

/// One recorded isotopy move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TightenMove {
    /// A strand entering and leaving the same portal circle was pulled
    /// through the portal, cancelling two transits.
    PortalBigon { curve: usize, portal: PortalId },
    /// A curve was rerouted alongside another across an empty bigon,
    /// cancelling two crossings.
    CurveBigon { rerouted: usize, along: usize },
}

#[derive(Debug, Clone)]
pub struct Tightened {
    pub curves: Vec<EmbeddedCurve>,
    pub moves: Vec<TightenMove>,
}

/// Total complexity the moves decrease: transits plus crossings.
fn measure(arr: &Arrangement) -> usize {
    let transits: usize = arr.curves().iter().map(|c| c.num_transits()).sum();
    transits + arr.crossings().len()
}

struct PortalBigon {
    curve: usize,
    strand: usize,
    portal: PortalId,
    /// The circle arc edges of the bigon face, unordered.
    arc_edges: Vec<usize>,
}

struct CurveBigon {
    rerouted: usize,
    along: usize,
    run_along: Vec<HalfId>,
    run_rer: Vec<HalfId>,
}

/// Splits a cyclic key sequence into its maximal runs of equal keys,
/// returned as (start, length) in cycle order beginning at a run boundary.
fn cyclic_runs<K: PartialEq>(keys: &[K]) -> Vec<(usize, usize)> {
    let n = keys.len();
    let start = (0..n).find(|&i| keys[i] != keys[(i + n - 1) % n]);
    let Some(start) = start else {
        return vec![(0, n)];
    };
    let mut runs = Vec::new();
    let mut i = start;
    loop {
        let mut len = 1;
        while len < n && keys[(i + len) % n] == keys[i] {
            len += 1;
        }
        runs.push((i, len));
        i = (i + len) % n;
        if i == start {
            break;
        }
    }
    runs
}

fn find_portal_bigon(arr: &Arrangement) -> Option<PortalBigon> {
    #[derive(PartialEq)]
    enum Cat {
        Strand(usize, usize),
        Circle(PortalId),
    }
    for face in arr.faces() {
        if !face.is_domain || face.outer.is_none() || face.cycles.len() != 1 {
            continue;
        }
        let cycle = &face.cycles[0];
        let cats: Vec<Cat> = cycle
            .iter()
            .map(|&h| match &arr.edges()[edge_of(h)].kind {
                EdgeKind::Seg { curve, strand, .. } => Cat::Strand(*curve, *strand),
                EdgeKind::Arc { portal, .. } => Cat::Circle(*portal),
            })
            .collect();
        let runs = cyclic_runs(&cats);
        if runs.len() != 2 {
            continue;
        }
        let (seg_run, arc_run) = match (&cats[runs[0].0], &cats[runs[1].0]) {
            (Cat::Strand(..), Cat::Circle(..)) => (runs[0], runs[1]),
            (Cat::Circle(..), Cat::Strand(..)) => (runs[1], runs[0]),
            _ => continue,
        };
        let Cat::Strand(curve, strand) = cats[seg_run.0] else { unreachable!() };
        let Cat::Circle(portal) = cats[arc_run.0] else { unreachable!() };
        if !arr.curves()[curve].is_closed() {
            continue;
        }
        // Both corners must be transit vertices of the strand on this
        // circle; the run then covers the whole strand.
        let n = cycle.len();
        let first_seg = cycle[seg_run.0];
        let last_seg = cycle[(seg_run.0 + seg_run.1 - 1) % n];
        let corner_ok = |v: usize| {
            matches!(&arr.verts()[v].kind, VertexKind::OnCircle { portal: p, .. } if *p == portal)
                && arr.verts()[v].twin.is_some()
        };
        if !corner_ok(arr.tail(first_seg)) || !corner_ok(arr.head(last_seg)) {
            continue;
        }
        // Interior vertices of the arc run must be passive: their glued
        // twins carry no curve edges, so the swept corridor is clear.
        let passive = (1..arc_run.1).all(|k| {
            let v = arr.tail(cycle[(arc_run.0 + k) % n]);
            arr.verts()[v].twin.is_some_and(|tw| {
                !arr.verts()[tw]
                    .out
                    .iter()
                    .any(|&h| matches!(arr.edges()[edge_of(h)].kind, EdgeKind::Seg { .. }))
            })
        });
        if !passive {
            continue;
        }
        let arc_edges = (0..arc_run.1)
            .map(|k| edge_of(cycle[(arc_run.0 + k) % n]))
            .collect();
        return Some(PortalBigon { curve, strand, portal, arc_edges });
    }
    None
}

fn find_curve_bigon(arr: &Arrangement) -> Option<CurveBigon> {
    for region in arr.regions() {
        if region.euler != 1 || region.boundary.len() != 1 {
            continue;
        }
        let cycle = &region.boundary[0];
        let keys: Vec<usize> = cycle.iter().map(|&h| arr.curve_of_half(h).unwrap()).collect();
        let runs = cyclic_runs(&keys);
        if runs.len() != 2 {
            continue;
        }
        let n = cycle.len();
        // Corners (run boundaries) must be proper crossings.
        let corners_ok = runs.iter().all(|&(i, _)| {
            let v = arr.tail(cycle[i]);
            matches!(arr.verts()[v].kind, VertexKind::Crossing { .. })
        });
        if !corners_ok {
            continue;
        }
        let collect =
            |(i, len): (usize, usize)| -> Vec<HalfId> { (0..len).map(|k| cycle[(i + k) % n]).collect() };
        // Reroute a closed curve; either assignment removes the bigon.
        for (a, r) in [(0usize, 1usize), (1, 0)] {
            let rerouted = keys[runs[r].0];
            if !arr.curves()[rerouted].is_closed() {
                continue;
            }
            return Some(CurveBigon {
                rerouted,
                along: keys[runs[a].0],
                run_along: collect(runs[a]),
                run_rer: collect(runs[r]),
            });
        }
    }
    None
}

/// Chains spans of one circle from the `start` parameter to the `end`
/// parameter, orienting each piece as the chain requires.
fn chain_spans(mut spans: Vec<ArcSpan>, start: &Q, end: &Q) -> Result<Vec<(ArcSpan, bool)>> {
    let mut out = Vec::new();
    let mut cur = start.clone();
    while !spans.is_empty() {
        let idx = spans
            .iter()
            .position(|s| s.from == cur || s.to == cur)
            .ok_or_else(|| Error::ModelDefect("portal bigon arcs do not chain".into()))?;
        let s = spans.remove(idx);
        let ccw = s.from == cur;
        cur = if ccw { s.to.clone() } else { s.from.clone() };
        out.push((s, ccw));
    }
    if &cur != end {
        return Err(Error::ModelDefect("portal bigon arcs end at the wrong parameter".into()));
    }
    Ok(out)
}

fn apply_portal_bigon(
    arr: &Arrangement,
    info: &PortalBigon,
    attempt: usize,
) -> Result<EmbeddedCurve> {
    let chart = arr.chart();
    let c = &arr.curves()[info.curve];
    let k = c.strands().len();
    if k < 2 {
        return Err(Error::ModelDefect("portal bigon on a single-strand curve".into()));
    }
    let s = info.strand;
    let ps = (s + k - 1) % k;
    let ns = (s + 1) % k;
    let shift = attempt.min(20) as i64;
    let frac = q(1, 4 << shift);

    let prev_len = c.strands()[ps].len();
    let from = CurveCursor { strand: ps, seg: prev_len - 2, t: Q::one() - &frac };
    let to = CurveCursor { strand: ns, seg: 0, t: frac.clone() };
    let pa = c.cursor_point(&from);
    let pb = c.cursor_point(&to);

    // Corridor on the partner circle, hugging the glued image of the bigon
    // arcs from the previous strand's exit to the next strand's entry.
    let p = info.portal;
    let p2 = chart.partner(p);
    let raw_of = |pt: &Pt| {
        chart
            .circle(p)
            .param_of(pt)
            .ok_or_else(|| Error::ModelDefect("bigon strand end off its circle".into()))
    };
    let u_a = chart.glued_raw(p, &raw_of(c.strands()[s].first().unwrap())?);
    let u_b = chart.glued_raw(p, &raw_of(c.strands()[s].last().unwrap())?);
    let spans: Vec<ArcSpan> = info
        .arc_edges
        .iter()
        .map(|&e| match &arr.edges()[arr.partner_arc(e)].kind {
            EdgeKind::Arc { t_from, t_to, wrap, .. } => {
                Ok(ArcSpan { from: t_from.clone(), to: t_to.clone(), wrap: *wrap })
            }
            _ => Err(Error::ModelDefect("partner of an arc is not an arc".into())),
        })
        .collect::<Result<_>>()?;
    let pieces = chain_spans(spans, &u_a, &u_b)?;
    let eps = q(1, 8 << shift);
    let corridor = arc_parallel(chart, p2, &pieces, &eps)?;

    let mut strand_pts = vec![pa];
    strand_pts.extend(corridor);
    strand_pts.push(pb);
    c.replace_span(&from, &to, vec![strand_pts])
}

fn apply_curve_bigon(arr: &Arrangement, info: &CurveBigon, attempt: usize) -> Result<EmbeddedCurve> {
    let y = &arr.curves()[info.rerouted];
    let shift = attempt.min(20) as i64;
    let frac = q(1, 4 << shift);

    // Forward orientation of the removed span along the rerouted curve.
    let forward = !crate::arrangement::is_backward(info.run_rer[0]);
    let v_start = arr.tail(info.run_rer[0]);
    let v_end = arr.head(*info.run_rer.last().unwrap());
    let (v_from, v_to) = if forward { (v_start, v_end) } else { (v_end, v_start) };

    // Cut points on the retained side: just before v_from and just after
    // v_to along the curve's own orientation.
    let find_edge = |head: bool, v: usize| -> Result<usize> {
        arr.edges()
            .iter()
            .position(|ed| {
                matches!(ed.kind, EdgeKind::Seg { curve, .. } if curve == info.rerouted)
                    && ed.v[head as usize] == v
            })
            .ok_or_else(|| Error::ModelDefect("bigon corner misses its curve edge".into()))
    };
    let e_in = find_edge(true, v_from)?;
    let e_out = find_edge(false, v_to)?;
    let pa = arr.verts()[arr.edges()[e_in].v[0]]
        .pt
        .lerp(&arr.verts()[v_from].pt, &(Q::one() - &frac));
    let pb = arr.verts()[arr.edges()[e_out].v[1]]
        .pt
        .lerp(&arr.verts()[v_to].pt, &(Q::one() - &frac));
    let from = y
        .locate(&pa)
        .ok_or_else(|| Error::ModelDefect("cut point not on the rerouted curve".into()))?;
    let to = y
        .locate(&pb)
        .ok_or_else(|| Error::ModelDefect("cut point not on the rerouted curve".into()))?;

    // Parallel of the other side, displaced away from the bigon (which
    // lies to the left of the boundary halves).
    let min_l1 = info
        .run_along
        .iter()
        .map(|&h| {
            let ed = &arr.edges()[edge_of(h)];
            arr.verts()[ed.v[1]].pt.sub(&arr.verts()[ed.v[0]].pt).l1()
        })
        .min()
        .unwrap();
    let eps = min_l1 / q(8 << shift, 1);
    let par = parallel_run(arr, &info.run_along, false, &eps)?;
    // In cycle order the along-run goes from (near v_end) to (near
    // v_start); the insert must go from the `from` corner to the `to` one.
    let par = if forward { par.reversed() } else { par };
    let mut strands = par.strands;
    strands.first_mut().unwrap().insert(0, pa);
    strands.last_mut().unwrap().push(pb);
    y.replace_span(&from, &to, strands)
}

/// Validates a replacement and checks that the family's measure dropped by
/// exactly two.
fn check_replacement(
    chart: &SurfaceChart,
    curves: &[EmbeddedCurve],
    idx: usize,
    cand: &EmbeddedCurve,
    expect: usize,
) -> Result<Vec<EmbeddedCurve>> {
    cand.validate(chart)?;
    let mut next = curves.to_vec();
    next[idx] = cand.clone();
    let arr = Arrangement::build(chart, &next)?;
    let got = measure(&arr);
    if got != expect {
        return Err(Error::ModelDefect(format!(
            "bigon removal changed measure to {got}, expected {expect}"
        )));
    }
    Ok(next)
}

const MAX_ATTEMPTS: usize = 14;

fn retry<T>(mut f: impl FnMut(usize) -> Result<T>) -> Result<T> {
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        match f(attempt) {
            Ok(v) => return Ok(v),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// Isotopes the family until no empty bigon remains between any two curves
/// or between a curve and a portal circle.  Crossing counts are then
/// minimal and the transit words of closed curves are cyclically reduced.
pub fn tighten(chart: &SurfaceChart, input: &[EmbeddedCurve]) -> Result<Tightened> {
    let mut curves = input.to_vec();
    let mut moves = Vec::new();
    loop {
        let arr = Arrangement::build(chart, &curves)?;
        let total = measure(&arr);
        if let Some(pb) = find_portal_bigon(&arr) {
            let idx = pb.curve;
            curves = retry(|attempt| {
                let cand = apply_portal_bigon(&arr, &pb, attempt)?;
                check_replacement(chart, &curves, idx, &cand, total - 2)
            })?;
            moves.push(TightenMove::PortalBigon { curve: idx, portal: pb.portal });
            continue;
        }
        if let Some(cb) = find_curve_bigon(&arr) {
            let idx = cb.rerouted;
            curves = retry(|attempt| {
                let cand = apply_curve_bigon(&arr, &cb, attempt)?;
                check_replacement(chart, &curves, idx, &cand, total - 2)
            })?;
            moves.push(TightenMove::CurveBigon { rerouted: idx, along: cb.along });
            continue;
        }
        return Ok(Tightened { curves, moves });
    }
}

/// The geometric intersection number of two curves: crossings remaining
/// after isotoping the pair to minimal position.
pub fn geometric_intersection(
    chart: &SurfaceChart,
    a: &EmbeddedCurve,
    b: &EmbeddedCurve,
) -> Result<usize> {
    let t = tighten(chart, &[a.clone(), b.clone()])?;
    let arr = Arrangement::build(chart, &t.curves)?;
    Ok(arr.crossing_count(0, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pt;

    /// A genus-2 curve with word x2 x2^{-1}: out through circle 2, back in
    /// through circle 3, and home again, with a removable bigon against
    /// each circle of the pair.
    fn cancelling_pair_curve() -> EmbeddedCurve {
        // Strand near circle 2 (center 0): entry at raw -1/2, exit at raw 1/2.
        let b = vec![Pt::of(3, 5, -4, 5), Pt::of(2, 1, 0, 1), Pt::of(3, 5, 4, 5)];
        // Strand near circle 3 (center (4,0)): entry raw -1/2, exit raw 1/2.
        let a = vec![Pt::of(23, 5, -4, 5), Pt::of(6, 1, 0, 1), Pt::of(23, 5, 4, 5)];
        EmbeddedCurve::closed(vec![b, a])
    }

    #[test]
    fn portal_bigon_removal_reduces_word() {
        let chart = SurfaceChart::standard(2);
        let c = cancelling_pair_curve();
        c.validate(&chart).unwrap();
        assert_eq!(c.num_transits(), 2);
        assert!(c.word(&chart).unwrap().is_empty());

        let out = tighten(&chart, &[c]).unwrap();
        assert_eq!(out.moves.len(), 1);
        assert!(matches!(out.moves[0], TightenMove::PortalBigon { curve: 0, .. }));
        let tightened = &out.curves[0];
        tightened.validate(&chart).unwrap();
        assert_eq!(tightened.num_transits(), 0);
        assert!(tightened.word(&chart).unwrap().is_empty());
    }

    fn square(x0: i64, y0: i64, x1: i64, y1: i64) -> EmbeddedCurve {
        EmbeddedCurve::closed(vec![vec![
            Pt::of(x0, 1, y0, 1),
            Pt::of(x1, 1, y0, 1),
            Pt::of(x1, 1, y1, 1),
            Pt::of(x0, 1, y1, 1),
            Pt::of(x0, 1, y0, 1),
        ]])
    }

    #[test]
    fn crossing_squares_pull_apart() {
        let chart = SurfaceChart::standard(2);
        let c1 = square(1, 1, 3, 3);
        let c2 = square(2, 2, 5, 5);
        let arr = Arrangement::build(&chart, &[c1.clone(), c2.clone()]).unwrap();
        assert_eq!(arr.crossing_count(0, 1), 2);

        let out = tighten(&chart, &[c1.clone(), c2.clone()]).unwrap();
        assert_eq!(out.moves.len(), 1);
        assert!(matches!(out.moves[0], TightenMove::CurveBigon { .. }));
        let arr2 = Arrangement::build(&chart, &out.curves).unwrap();
        assert_eq!(arr2.crossing_count(0, 1), 0);

        assert_eq!(geometric_intersection(&chart, &c1, &c2).unwrap(), 0);
    }

    #[test]
    fn essential_single_crossing_is_stable() {
        let chart = SurfaceChart::standard(2);
        // A curve through handle 1 and a ring around circle 1: they must
        // intersect, and one transversal crossing is already minimal.
        let t = q(1, 5);
        let entry = chart.circle(0).point_at(&t);
        let exit = chart.circle(1).point_at(&t);
        let through = EmbeddedCurve::closed(vec![vec![entry, Pt::of(0, 1, 3, 1), exit]]);
        let ring = square(-6, -2, -2, 2);
        assert_eq!(geometric_intersection(&chart, &through, &ring).unwrap(), 1);
    }

    #[test]
    fn disjoint_family_is_already_tight() {
        let chart = SurfaceChart::standard(2);
        let c1 = square(1, 1, 3, 3);
        let c2 = square(-6, -2, -2, 2);
        let out = tighten(&chart, &[c1.clone(), c2.clone()]).unwrap();
        assert!(out.moves.is_empty());
        assert_eq!(out.curves, vec![c1, c2]);
    }
}
