//! Cut-and-paste constructions on drawn curves: dual curves of disks,
//! splicing two curves along complementary runs, band sums of disks, and
//! fresh dual pairs drawn in an untouched handle.
//!
//! Every constructor here is generate-and-verify: candidates are drawn
//! from a small deterministic family (side, parameter, clearance, route
//! variant) and accepted only after the kernel predicates — embedding
//! validation and exact geometric intersection numbers — confirm the
//! required properties.  When the whole family is exhausted the failure is
//! surfaced as an error rather than papered over.

use crate::arrangement::{is_backward, twin_half, Arrangement, HalfId, VertexKind};
use crate::chart::SurfaceChart;
use crate::curve::EmbeddedCurve;
use crate::disks::{meridian_disk, DiskRep};
use crate::error::{Error, Result};
use crate::geom::{q, Q};
use crate::offset::parallel_run;
use crate::relations::DualPair;
use crate::router::{
    assemble_arc, assemble_closed, complement_route, curve_cycle, neighborhood_boundary,
    region_of_half, Anchor,
};
use crate::tighten::geometric_intersection;
use num::{One, Signed};

/// Clearance scales tried by the constructors, largest first.
pub(crate) fn eps_scales() -> [Q; 3] {
    [q(1, 8), q(1, 16), q(1, 64)]
}

/// A simple closed curve crossing the boundary of `disk` exactly once and
/// with zero geometric intersection with every curve in `avoid`.
///
/// The curve is drawn as a short segment piercing one sub-edge of the disk
/// boundary, closed up through the complement of the whole configuration
/// by the region router.
pub fn constrained_dual_curve(
    chart: &SurfaceChart,
    disk: &DiskRep,
    avoid: &[EmbeddedCurve],
) -> Result<EmbeddedCurve> {
    disk.require_nonseparating()?;
    let mut curves = vec![disk.boundary().clone()];
    curves.extend_from_slice(avoid);
    let arr = Arrangement::build(chart, &curves)?;
    let cyc = curve_cycle(&arr, 0);
    let dbg = std::env::var("PRIMDBG").is_ok();
    for eps in eps_scales() {
        for &h in &cyc {
            for tf in [q(1, 2), q(1, 3), q(2, 3)] {
                let la = Anchor::new(h, tf.clone(), eps.clone());
                let ra = Anchor::new(twin_half(h), Q::one() - &tf, eps.clone());
                for variant in 0..6 {
                    let route = match complement_route(&arr, &ra, &la, variant) {
                        Ok(r) => r,
                        Err(e) => {
                            if dbg {
                                eprintln!("DCDBG h={h} tf={tf} v={variant} route: {e:?}");
                            }
                            break;
                        }
                    };
                    let mut pieces = vec![vec![la.point(&arr), ra.point(&arr)]];
                    pieces.extend(route);
                    let Ok(m) = assemble_closed(pieces) else { continue };
                    if let Err(e) = m.validate(chart) {
                        if dbg {
                            eprintln!("DCDBG h={h} tf={tf} v={variant} validate: {e:?}");
                        }
                        continue;
                    }
                    if !matches!(geometric_intersection(chart, &m, disk.boundary()), Ok(1)) {
                        if dbg {
                            eprintln!("DCDBG h={h} tf={tf} v={variant} disk-count bad");
                        }
                        continue;
                    }
                    if avoid
                        .iter()
                        .all(|a| matches!(geometric_intersection(chart, &m, a), Ok(0)))
                    {
                        return Ok(m);
                    }
                    if dbg {
                        eprintln!("DCDBG h={h} tf={tf} v={variant} hits avoid");
                    }
                }
            }
        }
    }
    Err(Error::ModelDefect(
        "dual-curve search exhausted its candidate family".into(),
    ))
}

/// A simple closed curve crossing the disk boundary exactly once.
pub fn dual_curve_of_disk(chart: &SurfaceChart, disk: &DiskRep) -> Result<EmbeddedCurve> {
    constrained_dual_curve(chart, disk, &[])
}

/// Simple closed curves crossing the boundary of `disk` exactly once,
/// crossing `through` exactly once, and with zero geometric intersection
/// with every curve in `avoid`.  Up to a handful of verified candidates
/// are returned, in the deterministic search order.
///
/// Each candidate pierces one sub-edge of the disk boundary and one
/// sub-edge of `through` with short transversal stitches, closed up
/// through the complement by the region router.
pub fn piercing_dual_curve(
    chart: &SurfaceChart,
    disk: &DiskRep,
    through: &EmbeddedCurve,
    avoid: &[EmbeddedCurve],
) -> Result<Vec<EmbeddedCurve>> {
    disk.require_nonseparating()?;
    let mut curves = vec![disk.boundary().clone(), through.clone()];
    curves.extend_from_slice(avoid);
    let arr = Arrangement::build(chart, &curves)?;
    let dcyc = curve_cycle(&arr, 0);
    let pcyc = curve_cycle(&arr, 1);
    let mut out: Vec<EmbeddedCurve> = Vec::new();
    // A route never crosses the configuration and each stitch pierces its
    // sub-edge once, so the drawn crossing counts of a candidate are the
    // intended ones except when a stitch clips a nearby curve.  Since a
    // drawn count and the geometric intersection number agree modulo 2 and
    // drawn counts of 1/1/0 are already minimal, checking drawn counts on
    // one arrangement build certifies the candidate exactly.
    let accept = |m: &EmbeddedCurve| -> bool {
        let mut probe = vec![m.clone()];
        probe.extend_from_slice(&curves);
        let Ok(pa) = Arrangement::build(chart, &probe) else {
            return false;
        };
        pa.crossing_count(0, 1) == 1
            && pa.crossing_count(0, 2) == 1
            && (3..probe.len()).all(|j| pa.crossing_count(0, j) == 0)
    };
    'tiers: for eps in eps_scales() {
        for &h in &dcyc {
            let la = Anchor::new(h, q(1, 2), eps.clone());
            let ra = Anchor::new(twin_half(h), q(1, 2), eps.clone());
            'pair: for &hp in &pcyc {
                let pa = Anchor::new(hp, q(1, 2), eps.clone());
                let pb = Anchor::new(twin_half(hp), q(1, 2), eps.clone());
                for (s1, s2) in [(&pa, &pb), (&pb, &pa)] {
                    for v1 in 0..3 {
                        let Ok(r1) = complement_route(&arr, &ra, s1, v1) else { break };
                        for v2 in 0..3 {
                            let Ok(r2) = complement_route(&arr, s2, &la, v2) else { break };
                            let mut pieces = vec![vec![la.point(&arr), ra.point(&arr)]];
                            pieces.extend(r1.clone());
                            pieces.push(vec![s1.point(&arr), s2.point(&arr)]);
                            pieces.extend(r2);
                            let Ok(m) = assemble_closed(pieces) else { continue };
                            if m.validate(chart).is_err() {
                                continue;
                            }
                            if accept(&m) && !out.contains(&m) {
                                out.push(m);
                                if out.len() >= 24 {
                                    break 'tiers;
                                }
                                continue 'pair;
                            }
                        }
                    }
                }
            }
        }
        if !out.is_empty() {
            break;
        }
    }
    if out.is_empty() {
        Err(Error::ModelDefect(
            "piercing dual-curve search exhausted its candidate family".into(),
        ))
    } else {
        Ok(out)
    }
}

/// A dual pair (curve crossing its disk boundary once) whose both members
/// have zero geometric intersection with every curve in `avoid`.  The disk
/// is the meridian of a handle none of the avoided curves passes through;
/// handles are tried from the last one down.
pub fn fresh_dual_pair(chart: &SurfaceChart, avoid: &[EmbeddedCurve]) -> Result<DualPair> {
    'handles: for hidx in (0..chart.handles().len()).rev() {
        let (plus, minus) = chart.handles()[hidx];
        for a in avoid {
            for tr in a.transits(chart)? {
                if tr.portal == plus
                    || tr.portal == minus
                    || chart.partner(tr.portal) == plus
                    || chart.partner(tr.portal) == minus
                {
                    continue 'handles;
                }
            }
        }
        for eps in eps_scales() {
            let Ok(d) = meridian_disk(chart, hidx, &eps) else { continue };
            if !avoid
                .iter()
                .all(|a| matches!(geometric_intersection(chart, d.boundary(), a), Ok(0)))
            {
                continue;
            }
            let Ok(c) = constrained_dual_curve(chart, &d, avoid) else { continue };
            if let Ok(pair) = DualPair::validate(chart, c, d) {
                return Ok(pair);
            }
        }
    }
    Err(Error::NoHandleAvailable)
}

/// The same half-edge path traversed backwards.
pub fn reversed_run(run: &[HalfId]) -> Vec<HalfId> {
    run.iter().rev().map(|&h| twin_half(h)).collect()
}

/// Splits the traversal cycle of curve `ci` at its crossing vertices with
/// curve `cj`.  Each returned run starts and ends at a crossing; with no
/// crossings the whole cycle is returned as a single run.
pub fn runs_between_crossings(arr: &Arrangement, ci: usize, cj: usize) -> Vec<Vec<HalfId>> {
    let cyc = curve_cycle(arr, ci);
    let key = (ci.min(cj), ci.max(cj));
    let cuts: Vec<usize> = (0..cyc.len())
        .filter(|&p| {
            matches!(
                arr.verts()[arr.tail(cyc[p])].kind,
                VertexKind::Crossing { curves } if (curves.0.min(curves.1), curves.0.max(curves.1)) == key
            )
        })
        .collect();
    if cuts.is_empty() {
        return vec![cyc];
    }
    let n = cyc.len();
    let mut runs = Vec::new();
    for (k, &start) in cuts.iter().enumerate() {
        let end = cuts[(k + 1) % cuts.len()];
        let len = (end + n - start - 1) % n + 1;
        runs.push((0..len).map(|i| cyc[(start + i) % n]).collect());
    }
    runs
}

/// A closed curve made of a parallel of `run_a` followed by a parallel of
/// `run_b`, joined by short straight connectors at the two corners.  The
/// runs must form a cycle: `run_b` starts at the vertex `run_a` ends at
/// and vice versa.  Side choices are the caller's; the result is not
/// validated here.
pub fn splice_closed(
    arr: &Arrangement,
    run_a: &[HalfId],
    run_b: &[HalfId],
    left_a: bool,
    left_b: bool,
    eps: &Q,
) -> Result<EmbeddedCurve> {
    splice_cycle(
        arr,
        &[(run_a.to_vec(), left_a), (run_b.to_vec(), left_b)],
        eps,
    )
}

/// A closed curve made of parallels of the given runs in order, each on
/// its own side, joined by short straight connectors at the corners.
/// Consecutive runs must share their corner vertex.  The result is not
/// validated here; a corner connector may deliberately cross a curve
/// passing through the corner vertex.
pub fn splice_cycle(
    arr: &Arrangement,
    parts: &[(Vec<HalfId>, bool)],
    eps: &Q,
) -> Result<EmbeddedCurve> {
    let mut spliced: Vec<Vec<Vec<crate::geom::Pt>>> = Vec::new();
    for (run, left) in parts {
        let p = parallel_run(arr, run, *left, eps)?;
        // The displaced run ends sit distance eps past the corner vertex,
        // exactly on another curve when the crossing is perpendicular.
        // Pull both ends back so the connectors cut the corner clear of it.
        let mut strands = p.strands;
        {
            let first = strands.first_mut().unwrap();
            first[0] = pull_back(&first[1].clone(), &first[0], eps);
        }
        {
            let last = strands.last_mut().unwrap();
            let n = last.len();
            last[n - 1] = pull_back(&last[n - 2].clone(), &last[n - 1], eps);
        }
        spliced.push(strands);
    }
    let mut pieces = Vec::new();
    for (i, strands) in spliced.iter().enumerate() {
        let next = &spliced[(i + 1) % spliced.len()];
        let tail = strands.last().unwrap().last().unwrap().clone();
        let head = next.first().unwrap().first().unwrap().clone();
        pieces.extend(strands.clone());
        pieces.push(vec![tail, head]);
    }
    assemble_closed(pieces)
}

/// A point at roughly distance `eps` from `end` back toward `toward`,
/// never past the midpoint.
fn pull_back(toward: &crate::geom::Pt, end: &crate::geom::Pt, eps: &Q) -> crate::geom::Pt {
    let d = toward.sub(end);
    let l1 = d.x.abs() + d.y.abs();
    let t = if &l1 <= eps { q(1, 2) } else { (eps / &l1).min(q(1, 2)) };
    end.add(&d.scale(&t))
}

/// The boundary of a band sum of two disks with disjoint drawn
/// boundaries: a disk-bounding curve following both boundaries and the
/// two sides of a connecting band.  The band core is routed through the
/// complement, and the result is certified disjoint from both inputs.
pub fn band_sum(
    chart: &SurfaceChart,
    d1: &DiskRep,
    d2: &DiskRep,
    avoid: &[EmbeddedCurve],
    eps: &Q,
) -> Result<DiskRep> {
    let mut curves = vec![d1.boundary().clone(), d2.boundary().clone()];
    curves.extend_from_slice(avoid);
    let arr = Arrangement::build(chart, &curves)?;
    if arr.crossing_count(0, 1) != 0 {
        return Err(Error::Precondition(
            "band sum needs disjoint drawn disk boundaries".into(),
        ));
    }
    let mut sides1 = curve_cycle(&arr, 0);
    sides1.extend(sides1.clone().iter().map(|&h| twin_half(h)));
    let mut sides2 = curve_cycle(&arr, 1);
    sides2.extend(sides2.clone().iter().map(|&h| twin_half(h)));
    for &h1 in &sides1 {
        for &h2 in &sides2 {
            if region_of_half(&arr, h1).is_none()
                || region_of_half(&arr, h1) != region_of_half(&arr, h2)
            {
                continue;
            }
            let from = Anchor::new(h1, q(1, 2), eps.clone());
            let to = Anchor::new(h2, q(1, 2), eps.clone());
            for variant in 0..4 {
                let Ok(mut pieces) = complement_route(&arr, &from, &to, variant) else { break };
                // Attach the band core to the two boundaries by short
                // perpendicular stubs so it leaves them transversally.
                pieces.first_mut().unwrap().insert(0, from.base_point(&arr));
                pieces.last_mut().unwrap().push(to.base_point(&arr));
                let Ok(kappa) = assemble_arc(pieces) else { continue };
                if kappa.validate(chart).is_err() {
                    continue;
                }
                if let Ok(d) = band_of_core(chart, d1, d2, &kappa, eps) {
                    return Ok(d);
                }
            }
        }
    }
    Err(Error::ModelDefect("band-sum search exhausted its candidate family".into()))
}

/// Completes a band sum given the band core `kappa`, an embedded arc from
/// one drawn boundary to the other: the result hugs the boundary cycle of
/// the regular neighborhood of boundary-1 ∪ core ∪ boundary-2 that walks
/// both sides of the core.
fn band_of_core(
    chart: &SurfaceChart,
    d1: &DiskRep,
    d2: &DiskRep,
    kappa: &EmbeddedCurve,
    eps: &Q,
) -> Result<DiskRep> {
    let curves = vec![d1.boundary().clone(), d2.boundary().clone(), kappa.clone()];
    let arr = Arrangement::build(chart, &curves)?;
    let mut chosen: Option<Vec<HalfId>> = None;
    'regions: for r in arr.regions() {
        for cyc in &r.boundary {
            let fwd = cyc
                .iter()
                .any(|&h| arr.curve_of_half(h) == Some(2) && !is_backward(h));
            let bwd = cyc
                .iter()
                .any(|&h| arr.curve_of_half(h) == Some(2) && is_backward(h));
            if fwd && bwd {
                chosen = Some(cyc.clone());
                break 'regions;
            }
        }
    }
    let cyc = chosen.ok_or_else(|| {
        Error::ModelDefect("band core has no two-sided neighborhood cycle".into())
    })?;
    let hug_eps = eps / q(4, 1);
    let e = neighborhood_boundary(&arr, &cyc, &hug_eps)?;
    e.validate(chart)?;
    let disk = DiskRep::validate(chart, e)?;
    disk.require_nonseparating()?;
    for b in [d1.boundary(), d2.boundary()] {
        if !matches!(geometric_intersection(chart, disk.boundary(), b), Ok(0)) {
            return Err(Error::ModelDefect("band sum is not disjoint from its inputs".into()));
        }
    }
    Ok(disk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pt;
    use crate::homology::z2_handle_class;

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
    fn dual_curve_of_a_meridian() {
        let chart = SurfaceChart::standard(2);
        for h in 0..2 {
            let d = meridian_disk(&chart, h, &q(1, 4)).unwrap();
            let m = dual_curve_of_disk(&chart, &d).unwrap();
            let pair = DualPair::validate(&chart, m, d).unwrap();
            let mut class = vec![0u8; 2];
            class[h] = 1;
            assert_eq!(z2_handle_class(&chart, &pair.curve).unwrap(), class);
        }
    }

    #[test]
    fn constrained_dual_avoids_given_curves() {
        let chart = SurfaceChart::standard(2);
        let t = q(1, 5);
        let avoid = EmbeddedCurve::closed(vec![vec![
            chart.circle(0).point_at(&t),
            Pt::of(0, 1, 3, 1),
            chart.circle(1).point_at(&t),
        ]]);
        let d = meridian_disk(&chart, 1, &q(1, 4)).unwrap();
        let m = constrained_dual_curve(&chart, &d, std::slice::from_ref(&avoid)).unwrap();
        assert_eq!(geometric_intersection(&chart, &m, d.boundary()).unwrap(), 1);
        assert_eq!(geometric_intersection(&chart, &m, &avoid).unwrap(), 0);
    }

    #[test]
    fn fresh_pair_picks_an_untouched_handle() {
        let chart = SurfaceChart::standard(3);
        let t = q(1, 5);
        let avoid = EmbeddedCurve::closed(vec![vec![
            chart.circle(0).point_at(&t),
            Pt::of(0, 1, 3, 1),
            chart.circle(1).point_at(&t),
        ]]);
        let pair = fresh_dual_pair(&chart, std::slice::from_ref(&avoid)).unwrap();
        assert_eq!(geometric_intersection(&chart, &pair.curve, &avoid).unwrap(), 0);
        assert_eq!(
            geometric_intersection(&chart, pair.disk.boundary(), &avoid).unwrap(),
            0
        );
    }

    #[test]
    fn splice_rounds_a_crossing_pair() {
        let chart = SurfaceChart::standard(2);
        let c1 = square(-3, 2, 1, 6);
        let c2 = square(-1, 4, 3, 7);
        let arr = Arrangement::build(&chart, &[c1, c2]).unwrap();
        assert_eq!(arr.crossing_count(0, 1), 2);
        let runs1 = runs_between_crossings(&arr, 0, 1);
        let runs2 = runs_between_crossings(&arr, 1, 0);
        assert_eq!(runs1.len(), 2);
        assert_eq!(runs2.len(), 2);
        let eps = q(1, 8);
        let mut found = false;
        'search: for ra in &runs1 {
            for rb in &runs2 {
                let candidates = [rb.clone(), reversed_run(rb)];
                for rbo in &candidates {
                    if arr.tail(rbo[0]) != arr.head(*ra.last().unwrap())
                        || arr.head(*rbo.last().unwrap()) != arr.tail(ra[0])
                    {
                        continue;
                    }
                    for (la, lb) in [(true, true), (true, false), (false, true), (false, false)] {
                        let Ok(s) = splice_closed(&arr, ra, rbo, la, lb, &eps) else {
                            continue;
                        };
                        if s.validate(&chart).is_err() {
                            continue;
                        }
                        let all =
                            vec![arr.curves()[0].clone(), arr.curves()[1].clone(), s.clone()];
                        let Ok(a2) = Arrangement::build(&chart, &all) else { continue };
                        if a2.crossing_count(0, 2) == 0 && a2.crossing_count(1, 2) == 0 {
                            found = true;
                            break 'search;
                        }
                    }
                }
            }
        }
        assert!(found, "no crossing-free splice among the side choices");
    }

    #[test]
    fn band_sum_of_two_meridians() {
        let chart = SurfaceChart::standard(2);
        let d1 = meridian_disk(&chart, 0, &q(1, 4)).unwrap();
        let d2 = meridian_disk(&chart, 1, &q(1, 4)).unwrap();
        let e = band_sum(&chart, &d1, &d2, &[], &q(1, 8)).unwrap();
        assert!(e.word_certificate().is_empty());
        assert!(e.nonseparating());
        assert_eq!(geometric_intersection(&chart, e.boundary(), d1.boundary()).unwrap(), 0);
        assert_eq!(geometric_intersection(&chart, e.boundary(), d2.boundary()).unwrap(), 0);
    }
}
