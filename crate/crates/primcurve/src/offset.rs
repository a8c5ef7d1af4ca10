//! Sideways displacement of paths: polylines hugging a circle arc at a
//! small radial clearance, and parallels of curve runs on the glued
//! surface.  All constructions are exact-rational; they guarantee only the
//! local clearances they check themselves, so callers re-validate the
//! resulting curves and retry with a smaller clearance on failure.

use crate::arrangement::{Arrangement, HalfId, VertexKind};
use crate::chart::{PortalId, SurfaceChart};
use crate::error::{Error, Result};
use crate::geom::{qi, seg_vs_circle, Circle, Pt, Q, Seg, SegCirclePosition};
use num::{One, Signed, Zero};

/// A position on a circle parameter line, including the excluded point at
/// angle pi (parameter infinity); offset points may sit there even though
/// transits may not.
#[derive(Debug, Clone, PartialEq, Eq)]
enum ArcPos {
    At(Q),
    Far,
}

/// An arc of one circle, counterclockwise from `from` to `to`; `wrap`
/// marks arcs through the excluded angle-pi point.
#[derive(Debug, Clone)]
pub struct ArcSpan {
    pub from: Q,
    pub to: Q,
    pub wrap: bool,
}

/// The radial scale factor that pushes a circle point to the domain side:
/// outward for holes, inward for the outer circle.
fn domain_factor(portal: PortalId, eps: &Q) -> Q {
    if portal == 0 {
        Q::one() - eps
    } else {
        Q::one() + eps
    }
}

fn scaled_circle_point(c: &Circle, pos: &ArcPos, factor: &Q) -> Pt {
    let on = match pos {
        ArcPos::At(t) => c.point_at(t),
        ArcPos::Far => Pt::new(&c.center.x - &c.radius, c.center.y.clone()),
    };
    c.center.add(&on.sub(&c.center).scale(factor))
}

/// A parameter strictly between a and b in counterclockwise order, where
/// either end may be the excluded point.
fn between(a: &ArcPos, b: &ArcPos) -> Q {
    match (a, b) {
        (ArcPos::At(x), ArcPos::At(y)) => (x + y) / qi(2),
        (ArcPos::At(x), ArcPos::Far) => {
            if x.is_negative() {
                Q::zero()
            } else {
                qi(2) * x + Q::one()
            }
        }
        (ArcPos::Far, ArcPos::At(y)) => {
            if y.is_positive() {
                Q::zero()
            } else {
                qi(2) * y - Q::one()
            }
        }
        (ArcPos::Far, ArcPos::Far) => unreachable!("arc piece with both ends excluded"),
    }
}

/// Chord admissibility against the circle being hugged: the offset chord
/// must stay on the domain side.
fn chord_ok(c: &Circle, portal: PortalId, a: &Pt, b: &Pt) -> bool {
    let want = if portal == 0 {
        SegCirclePosition::Inside
    } else {
        SegCirclePosition::Outside
    };
    seg_vs_circle(&Seg::new(a.clone(), b.clone()), c) == want
}

fn sample_ccw(
    c: &Circle,
    portal: PortalId,
    factor: &Q,
    a: &ArcPos,
    b: &ArcPos,
    out: &mut Vec<Pt>,
    depth: usize,
) -> Result<()> {
    if depth > 64 {
        return Err(Error::ModelDefect("arc offset subdivision diverged".into()));
    }
    let pa = scaled_circle_point(c, a, factor);
    let pb = scaled_circle_point(c, b, factor);
    if pa != pb && chord_ok(c, portal, &pa, &pb) {
        out.push(pb);
        return Ok(());
    }
    let m = ArcPos::At(between(a, b));
    sample_ccw(c, portal, factor, a, &m, out, depth + 1)?;
    sample_ccw(c, portal, factor, &m, b, out, depth + 1)
}

/// An offset polyline hugging a chain of arcs of one circle on its domain
/// side.  `pieces` lists the arcs in path order; each is traversed from
/// `from` to `to` if `ccw`, else from `to` to `from`.  Consecutive pieces
/// must share their junction parameter.
pub fn arc_parallel(
    chart: &SurfaceChart,
    portal: PortalId,
    pieces: &[(ArcSpan, bool)],
    eps: &Q,
) -> Result<Vec<Pt>> {
    let c = chart.circle(portal);
    let factor = domain_factor(portal, eps);
    let mut pts: Vec<Pt> = Vec::new();
    for (span, ccw) in pieces {
        let mut piece = vec![scaled_circle_point(c, &ArcPos::At(span.from.clone()), &factor)];
        if span.wrap {
            sample_ccw(c, portal, &factor, &ArcPos::At(span.from.clone()), &ArcPos::Far, &mut piece, 0)?;
            sample_ccw(c, portal, &factor, &ArcPos::Far, &ArcPos::At(span.to.clone()), &mut piece, 0)?;
        } else {
            sample_ccw(
                c,
                portal,
                &factor,
                &ArcPos::At(span.from.clone()),
                &ArcPos::At(span.to.clone()),
                &mut piece,
                0,
            )?;
        }
        if !*ccw {
            piece.reverse();
        }
        if !pts.is_empty() {
            // Consecutive pieces share the junction point.
            if pts.last() != piece.first() {
                return Err(Error::ModelDefect("arc chain is not contiguous".into()));
            }
            piece.remove(0);
        }
        pts.extend(piece);
    }
    Ok(pts)
}

/// A parallel of a run of curve half-edges on the glued surface: open
/// strands displaced to one side, with fresh transits alongside the run's
/// own transits.
#[derive(Debug, Clone)]
pub struct ParallelPath {
    pub strands: Vec<Vec<Pt>>,
}

impl ParallelPath {
    pub fn reversed(&self) -> ParallelPath {
        ParallelPath {
            strands: self
                .strands
                .iter()
                .rev()
                .map(|s| s.iter().rev().cloned().collect())
                .collect(),
        }
    }

    pub fn first_point(&self) -> &Pt {
        self.strands.first().unwrap().first().unwrap()
    }

    pub fn last_point(&self) -> &Pt {
        self.strands.last().unwrap().last().unwrap()
    }
}

pub(crate) fn displacement(d: &Pt, left: bool, eps: &Q) -> Pt {
    let sigma = if left { qi(1) } else { qi(-1) };
    let n = d.rot90();
    let l1 = n.l1();
    n.scale(&(sigma * eps / l1))
}

/// Displaces one planar polyline sideways: per-segment normal offset with
/// miter joints where the displaced segments cross and bevels elsewhere.
fn displaced_polyline(points: &[Pt], left: bool, eps: &Q) -> Vec<Pt> {
    let mut segs: Vec<Seg> = Vec::new();
    for w in points.windows(2) {
        let disp = displacement(&w[1].sub(&w[0]), left, eps);
        segs.push(Seg::new(w[0].add(&disp), w[1].add(&disp)));
    }
    let mut out = vec![segs[0].a.clone()];
    for i in 0..segs.len() - 1 {
        let (s1, s2) = (&segs[i], &segs[i + 1]);
        if s1.b == s2.a {
            out.push(s1.b.clone());
            continue;
        }
        // Reflex-side corner: the offset copies meet (possibly exactly at
        // an endpoint); join at the line intersection.  An endpoint-touch
        // handled as a bevel would leave two segments in degenerate
        // contact, so the closed interval is essential here.
        let d1 = s1.dir();
        let d2 = s2.dir();
        let denom = d1.cross(&d2);
        let mut joined = false;
        if !denom.is_zero() {
            let w = s2.a.sub(&s1.a);
            let t1 = w.cross(&d2) / &denom;
            let t2 = w.cross(&d1) / &denom;
            let (zero, one) = (Q::zero(), Q::one());
            if t1 >= zero && t1 <= one && t2 >= zero && t2 <= one {
                out.push(s1.a.lerp(&s1.b, &t1));
                joined = true;
            }
        }
        if !joined {
            out.push(s1.b.clone());
            out.push(s2.a.clone());
        }
    }
    out.push(segs.last().unwrap().b.clone());
    out
}

/// A planar group of a run plus the transit ending it, if any.
struct RunGroup {
    points: Vec<Pt>,
    exit: Option<(PortalId, Q)>,
}

/// Splits a run of half-edges into planar polylines separated by portal
/// jumps.
fn run_groups(arr: &Arrangement, run: &[HalfId]) -> Result<Vec<RunGroup>> {
    let mut groups = Vec::new();
    let mut cur: Vec<Pt> = Vec::new();
    for (i, &h) in run.iter().enumerate() {
        let tv = arr.tail(h);
        let hv = arr.head(h);
        if cur.is_empty() {
            cur.push(arr.verts()[tv].pt.clone());
        }
        cur.push(arr.verts()[hv].pt.clone());
        if i + 1 < run.len() && arr.tail(run[i + 1]) != hv {
            match &arr.verts()[hv].kind {
                VertexKind::OnCircle { portal, raw }
                    if arr.verts()[hv].twin == Some(arr.tail(run[i + 1])) =>
                {
                    groups.push(RunGroup {
                        points: std::mem::take(&mut cur),
                        exit: Some((*portal, raw.clone())),
                    });
                }
                _ => return Err(Error::ModelDefect("run breaks at a non-transit vertex".into())),
            }
        }
    }
    groups.push(RunGroup { points: cur, exit: None });
    Ok(groups)
}

/// Replaces the end point of a displaced polyline with a point further
/// along its end segment so that the chord from `anchor` to that point
/// clears the circle.  Starts from a scale-local fraction and grows it
/// geometrically.
fn shave_to_clear(
    poly: &mut [Pt],
    anchor: &Pt,
    c: &Circle,
    portal: PortalId,
    from_start: bool,
) -> Result<()> {
    let n = poly.len();
    let (p0, p1) = if from_start {
        (poly[0].clone(), poly[1].clone())
    } else {
        (poly[n - 1].clone(), poly[n - 2].clone())
    };
    let mut s = Q::zero();
    loop {
        let cand = p0.lerp(&p1, &s);
        if &cand != anchor && chord_ok(c, portal, anchor, &cand) {
            if from_start {
                poly[0] = cand;
            } else {
                poly[n - 1] = cand;
            }
            return Ok(());
        }
        s = if s.is_zero() { Q::new(1.into(), 64.into()) } else { s * qi(2) };
        if s > Q::one() {
            return Err(Error::ModelDefect("cannot clear the portal circle near a transit".into()));
        }
    }
}

/// Builds a parallel of a contiguous run of curve half-edges (consecutive
/// under the glued boundary successor), displaced to the left or right of
/// the traversal by roughly eps.  The path starts and ends at displaced
/// copies of the run's end vertices and crosses each portal the run
/// crosses, at a parameter offset on the displaced side.
pub fn parallel_run(
    arr: &Arrangement,
    run: &[HalfId],
    left: bool,
    eps: &Q,
) -> Result<ParallelPath> {
    let chart = arr.chart();
    let groups = run_groups(arr, run)?;
    let mut displaced: Vec<Vec<Pt>> = groups
        .iter()
        .map(|g| displaced_polyline(&g.points, left, eps))
        .collect();

    for gi in 0..groups.len() - 1 {
        let (p_exit, t_exit) = groups[gi].exit.clone().unwrap();
        let p_entry = chart.partner(p_exit);
        let c_exit = chart.circle(p_exit);
        let c_entry = chart.circle(p_entry);

        // Side of the fresh transit along the circle: the sideways
        // displacement of the last exit edge, projected on the tangent.
        let last = &groups[gi].points;
        let d = last[last.len() - 1].sub(&last[last.len() - 2]);
        let disp = displacement(&d, left, eps);
        let s = disp.dot(&c_exit.tangent_at(&t_exit));
        if s.is_zero() {
            return Err(Error::ModelDefect("displacement tangent to portal circle".into()));
        }
        let sign = if s.is_positive() { qi(1) } else { qi(-1) };

        let mut eta = eps.clone();
        let mut done = false;
        for _ in 0..32 {
            let t_exit_hat = &t_exit + &sign * &eta;
            let t_entry_hat = chart.glued_raw(p_exit, &t_exit_hat);
            let exit_on = c_exit.point_at(&t_exit_hat);
            let entry_on = c_entry.point_at(&t_entry_hat);
            let exit_lift = scaled_circle_point(
                c_exit,
                &ArcPos::At(t_exit_hat.clone()),
                &domain_factor(p_exit, eps),
            );
            let entry_lift = scaled_circle_point(
                c_entry,
                &ArcPos::At(t_entry_hat.clone()),
                &domain_factor(p_entry, eps),
            );
            let mut exit_poly = displaced[gi].clone();
            let mut entry_poly = displaced[gi + 1].clone();
            if shave_to_clear(&mut exit_poly, &exit_lift, c_exit, p_exit, false).is_ok()
                && shave_to_clear(&mut entry_poly, &entry_lift, c_entry, p_entry, true).is_ok()
            {
                exit_poly.push(exit_lift);
                exit_poly.push(exit_on);
                let mut with = vec![entry_on, entry_lift];
                with.extend(entry_poly);
                displaced[gi] = exit_poly;
                displaced[gi + 1] = with;
                done = true;
                break;
            }
            eta = eta / qi(2);
        }
        if !done {
            return Err(Error::ModelDefect("no admissible transit offset".into()));
        }
    }
    Ok(ParallelPath { strands: displaced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::SurfaceChart;
    use crate::geom::q;

    #[test]
    fn displaced_polyline_sides() {
        let pts = vec![Pt::of(0, 1, 0, 1), Pt::of(4, 1, 0, 1), Pt::of(4, 1, 4, 1)];
        let l = displaced_polyline(&pts, true, &q(1, 10));
        let r = displaced_polyline(&pts, false, &q(1, 10));
        // Left of +x travel is +y; left of +y travel is -x.
        assert!(l[0].y.is_positive());
        assert!(r[0].y.is_negative());
        assert!(l.last().unwrap().x < qi(4));
        assert!(r.last().unwrap().x > qi(4));
    }

    #[test]
    fn arc_offset_chords_clear_circle() {
        let chart = SurfaceChart::standard(2);
        let span = ArcSpan { from: q(-1, 1), to: q(1, 1), wrap: false };
        let pts = arc_parallel(&chart, 2, &[(span, true)], &q(1, 8)).unwrap();
        assert!(pts.len() >= 2);
        let c = chart.circle(2);
        for w in pts.windows(2) {
            assert!(chord_ok(c, 2, &w[0], &w[1]));
        }
    }

    #[test]
    fn wrap_arc_offset_passes_excluded_point() {
        let chart = SurfaceChart::standard(2);
        let span = ArcSpan { from: q(1, 1), to: q(-1, 1), wrap: true };
        let pts = arc_parallel(&chart, 2, &[(span, true)], &q(1, 8)).unwrap();
        let c = chart.circle(2);
        for w in pts.windows(2) {
            assert!(chord_ok(c, 2, &w[0], &w[1]));
        }
        assert!(pts.iter().any(|p| p.x < &c.center.x - &c.radius));
    }

    #[test]
    fn outer_circle_offset_goes_inward() {
        let chart = SurfaceChart::standard(2);
        let span = ArcSpan { from: q(0, 1), to: q(1, 1), wrap: false };
        let pts = arc_parallel(&chart, 0, &[(span, true)], &q(1, 8)).unwrap();
        let c = chart.circle(0);
        for p in &pts {
            assert!(c.clearance2(p).is_negative());
        }
    }
}
