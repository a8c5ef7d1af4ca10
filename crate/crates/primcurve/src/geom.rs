//! Exact rational plane geometry: points, segments, circles with rational
//! parametrization, and the predicates the arrangement engine needs.
//!
//! No floating point anywhere.  Circle points use the tangent half-angle
//! parameter t: the point at parameter t on a circle with center c and
//! radius r is c + r * ((1-t^2)/(1+t^2), 2t/(1+t^2)).  The single point at
//! t = infinity (angle pi) is excluded from the parametrization; transits
//! are never placed there.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pt {
    pub x: Q,
    pub y: Q,
}

impl Pt {
    pub fn new(x: Q, y: Q) -> Pt {
        Pt { x, y }
    }

    pub fn of(xn: i64, xd: i64, yn: i64, yd: i64) -> Pt {
        Pt::new(q(xn, xd), q(yn, yd))
    }

    pub fn sub(&self, o: &Pt) -> Pt {
        Pt::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &Pt) -> Pt {
        Pt::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn scale(&self, s: &Q) -> Pt {
        Pt::new(&self.x * s, &self.y * s)
    }

    /// Counterclockwise quarter turn.
    pub fn rot90(&self) -> Pt {
        Pt::new(-self.y.clone(), self.x.clone())
    }

    pub fn dot(&self, o: &Pt) -> Q {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Pt) -> Q {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Q {
        self.dot(self)
    }

    /// |x| + |y|, an exact upper/lower bound proxy for the euclidean norm:
    /// norm <= l1 <= sqrt(2) * norm.
    pub fn l1(&self) -> Q {
        self.x.abs() + self.y.abs()
    }

    /// Affine interpolation self + t * (o - self).
    pub fn lerp(&self, o: &Pt, t: &Q) -> Pt {
        self.add(&o.sub(self).scale(t))
    }
}

/// Sign of the signed area of triangle (a, b, c): >0 for counterclockwise.
pub fn orient(a: &Pt, b: &Pt, c: &Pt) -> i32 {
    let v = b.sub(a).cross(&c.sub(a));
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seg {
    pub a: Pt,
    pub b: Pt,
}

impl Seg {
    pub fn new(a: Pt, b: Pt) -> Seg {
        Seg { a, b }
    }

    pub fn dir(&self) -> Pt {
        self.b.sub(&self.a)
    }
}

/// Result of intersecting two closed segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegCrossing {
    None,
    /// Transversal crossing of the two open segments, with the point and
    /// the interpolation parameters on each segment.
    Proper { p: Pt, t1: Q, t2: Q },
    /// Any degenerate contact: shared endpoint, endpoint on interior,
    /// collinear overlap.  Callers treat this as a general-position failure.
    Degenerate,
}

pub fn seg_intersect(s1: &Seg, s2: &Seg) -> SegCrossing {
    let d1 = s1.dir();
    let d2 = s2.dir();
    let denom = d1.cross(&d2);
    let w = s2.a.sub(&s1.a);
    if denom.is_zero() {
        // Parallel: overlap iff collinear and ranges intersect.
        if w.cross(&d1).is_zero() {
            // Collinear; check 1D range overlap.
            let (lo1, hi1, lo2, hi2) = if !d1.x.is_zero() || !d2.x.is_zero() {
                (&s1.a.x, &s1.b.x, &s2.a.x, &s2.b.x)
            } else {
                (&s1.a.y, &s1.b.y, &s2.a.y, &s2.b.y)
            };
            let (lo1, hi1) = if lo1 <= hi1 { (lo1, hi1) } else { (hi1, lo1) };
            let (lo2, hi2) = if lo2 <= hi2 { (lo2, hi2) } else { (hi2, lo2) };
            if lo1 <= hi2 && lo2 <= hi1 {
                return SegCrossing::Degenerate;
            }
        }
        return SegCrossing::None;
    }
    let t1 = w.cross(&d2) / &denom;
    let t2 = w.cross(&d1) / &denom;
    let zero = Q::zero();
    let one = Q::one();
    if t1 < zero || t1 > one || t2 < zero || t2 > one {
        return SegCrossing::None;
    }
    let interior1 = t1 > zero && t1 < one;
    let interior2 = t2 > zero && t2 < one;
    if interior1 && interior2 {
        let p = s1.a.lerp(&s1.b, &t1);
        SegCrossing::Proper { p, t1, t2 }
    } else {
        SegCrossing::Degenerate
    }
}

/// Squared distance from a point to a closed segment.
pub fn dist2_point_seg(p: &Pt, s: &Seg) -> Q {
    let d = s.dir();
    let n2 = d.norm2();
    if n2.is_zero() {
        return p.sub(&s.a).norm2();
    }
    let t = p.sub(&s.a).dot(&d) / &n2;
    let t = t.max(Q::zero()).min(Q::one());
    p.sub(&s.a.lerp(&s.b, &t)).norm2()
}

/// Squared distance between two closed segments (0 if they meet).
pub fn dist2_seg_seg(s1: &Seg, s2: &Seg) -> Q {
    match seg_intersect(s1, s2) {
        SegCrossing::None => {}
        _ => return Q::zero(),
    }
    let mut best = dist2_point_seg(&s1.a, s2);
    for d in [
        dist2_point_seg(&s1.b, s2),
        dist2_point_seg(&s2.a, s1),
        dist2_point_seg(&s2.b, s1),
    ] {
        if d < best {
            best = d;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    pub center: Pt,
    pub radius: Q,
}

impl Circle {
    pub fn new(center: Pt, radius: Q) -> Circle {
        Circle { center, radius }
    }

    /// Point at tangent half-angle parameter t.
    pub fn point_at(&self, t: &Q) -> Pt {
        let t2 = t * t;
        let denom = &t2 + Q::one();
        let cx = (Q::one() - &t2) / &denom;
        let sy = (qi(2) * t) / &denom;
        Pt::new(
            &self.center.x + &self.radius * cx,
            &self.center.y + &self.radius * sy,
        )
    }

    /// Tangent direction at parameter t, pointing in the direction of
    /// increasing t (counterclockwise).
    pub fn tangent_at(&self, t: &Q) -> Pt {
        Pt::new(qi(-2) * t, Q::one() - t * t)
    }

    /// Recovers the parameter of a rational point on the circle, if it is
    /// exactly on the circle and not at the excluded parameter.
    pub fn param_of(&self, p: &Pt) -> Option<Q> {
        let v = p.sub(&self.center);
        if v.norm2() != &self.radius * &self.radius {
            return None;
        }
        let denom = &v.x + &self.radius;
        if denom.is_zero() {
            return None; // angle pi, excluded
        }
        Some(v.y / denom)
    }

    pub fn contains_on_boundary(&self, p: &Pt) -> bool {
        p.sub(&self.center).norm2() == &self.radius * &self.radius
    }

    /// Signed squared clearance of a point: |p-c|^2 - r^2.
    pub fn clearance2(&self, p: &Pt) -> Q {
        p.sub(&self.center).norm2() - &self.radius * &self.radius
    }
}

/// Where a closed segment sits relative to a circle, with segment endpoints
/// that lie exactly on the circle tolerated (and required transversal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegCirclePosition {
    /// Open segment strictly outside the circle; endpoints may touch it.
    Outside,
    /// Open segment strictly inside; endpoints may touch.
    Inside,
    /// Crosses, is tangent, or otherwise violates general position.
    Violates,
}

/// Classifies a segment against a circle.  f(t) = |a + t d - c|^2 - r^2 is
/// convex in t, which makes both the inside and the outside test a matter
/// of endpoint values plus the interior minimum.
pub fn seg_vs_circle(s: &Seg, c: &Circle) -> SegCirclePosition {
    let d = s.dir();
    let va = s.a.sub(&c.center);
    let aa = d.norm2();
    let b = qi(2) * va.dot(&d);
    let f0 = c.clearance2(&s.a);
    let f1 = c.clearance2(&s.b);
    let zero = Q::zero();

    if aa.is_zero() {
        return if f0 > zero {
            SegCirclePosition::Outside
        } else if f0 < zero {
            SegCirclePosition::Inside
        } else {
            SegCirclePosition::Violates
        };
    }
    let deriv1 = qi(2) * &aa + &b; // f'(1)

    // Inside test: convex f attains its max at the endpoints; an on-circle
    // endpoint additionally needs a transversal (strictly entering) slope.
    if f0 <= zero && f1 <= zero {
        if f0.is_zero() && b >= zero {
            return SegCirclePosition::Violates;
        }
        if f1.is_zero() && deriv1 <= zero {
            return SegCirclePosition::Violates;
        }
        return SegCirclePosition::Inside;
    }

    // Outside test.  With an on-circle start the slope b > 0 already puts
    // the convex minimum left of 0, so no interior dip is possible; the
    // symmetric statement holds at the end.  Only the interior-endpoint
    // case needs the explicit minimum check.
    if f0 >= zero && f1 >= zero {
        if f0.is_zero() {
            return if b > zero {
                SegCirclePosition::Outside
            } else {
                SegCirclePosition::Violates
            };
        }
        if f1.is_zero() {
            return if deriv1 < zero {
                SegCirclePosition::Outside
            } else {
                SegCirclePosition::Violates
            };
        }
        let tstar_num = -&b;
        let two_a = qi(2) * &aa;
        if tstar_num > zero && tstar_num < two_a {
            let fmin = &f0 - &b * &b / (qi(4) * &aa);
            if fmin <= zero {
                return SegCirclePosition::Violates;
            }
        }
        return SegCirclePosition::Outside;
    }

    SegCirclePosition::Violates
}

/// Half-plane class of a nonzero direction: 0 for angles in [0, pi), 1 for
/// [pi, 2pi).
fn dir_class(d: &Pt) -> u8 {
    if d.y.is_positive() || (d.y.is_zero() && d.x.is_positive()) {
        0
    } else {
        1
    }
}

/// Counterclockwise angular order of nonzero directions, starting at the
/// positive x axis.  Equal only for positive multiples of each other.
pub fn angle_cmp(a: &Pt, b: &Pt) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match dir_class(a).cmp(&dir_class(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    let cr = a.cross(b);
    if cr.is_positive() {
        Ordering::Less
    } else if cr.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// True if direction d lies strictly inside the counterclockwise wedge from
/// `from` to `to` (exclusive).  A zero wedge (`to` parallel positive to
/// `from`) is treated as the full circle.
pub fn in_ccw_wedge(from: &Pt, to: &Pt, d: &Pt) -> bool {
    use std::cmp::Ordering;
    let a = angle_cmp(from, d);
    let b = angle_cmp(d, to);
    if angle_cmp(from, to) == Ordering::Equal {
        // Full wedge: everything except the boundary direction.
        return a != Ordering::Equal;
    }
    match angle_cmp(from, to) {
        Ordering::Less => a == Ordering::Less && b == Ordering::Less,
        Ordering::Greater => a == Ordering::Less || b == Ordering::Less,
        Ordering::Equal => unreachable!(),
    }
}

/// An exact value a + b * sqrt(c) with rational a, b and c >= 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadVal {
    pub a: Q,
    pub b: Q,
    pub c: Q,
}

impl QuadVal {
    pub fn rational(a: Q) -> QuadVal {
        QuadVal { a, b: Q::zero(), c: Q::zero() }
    }

    pub fn new(a: Q, b: Q, c: Q) -> QuadVal {
        assert!(!c.is_negative());
        QuadVal { a, b, c }
    }

    /// Folds a perfect-square radicand into the rational part, so later
    /// rationalization never divides by a vanishing conjugate norm.
    pub fn normalized(self) -> QuadVal {
        if self.b.is_zero() || self.c.is_zero() {
            return QuadVal::rational(self.a);
        }
        if let Some(r) = rational_sqrt(&self.c) {
            return QuadVal::rational(self.a + self.b * r);
        }
        self
    }

    /// Exact sign of a + b sqrt(c).
    pub fn sign(&self) -> i32 {
        let sa = rational_sign(&self.a);
        let sb = if self.c.is_zero() { 0 } else { rational_sign(&self.b) };
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare a^2 against b^2 c.
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.c;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    /// Exact sign of (self - other), allowing different radicands.
    pub fn cmp_quad(&self, other: &QuadVal) -> std::cmp::Ordering {
        // diff = p + q sqrt(c1) + r sqrt(c2)
        let p = &self.a - &other.a;
        let lhs = QuadVal::new(p, self.b.clone(), self.c.clone());
        let rhs = QuadVal::new(Q::zero(), other.b.clone(), other.c.clone());
        let s1 = lhs.sign();
        let s2 = rhs.sign();
        use std::cmp::Ordering;
        if s1 != s2 {
            return s1.cmp(&s2);
        }
        if s1 == 0 {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare squares; for negatives the order flips.
        // lhs^2 - rhs^2 = (a^2 + b^2 c1 - r^2 c2) + 2ab sqrt(c1)
        let sq = QuadVal::new(
            &lhs.a * &lhs.a + &lhs.b * &lhs.b * &lhs.c - &rhs.b * &rhs.b * &rhs.c,
            qi(2) * &lhs.a * &lhs.b,
            lhs.c.clone(),
        );
        let s = sq.sign() * s1;
        s.cmp(&0)
    }

    pub fn cmp_q(&self, x: &Q) -> std::cmp::Ordering {
        self.cmp_quad(&QuadVal::rational(x.clone()))
    }
}

/// The exact rational square root of a non-negative rational, if it has one.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

fn rational_sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Min squared distance from a segment to a circle, assuming the segment is
/// strictly outside (used for feature-size bounds).  Returns a positive
/// lower bound, not necessarily tight: the bound is computed via rational
/// comparisons only.
pub fn clearance2_seg_circle_lower(s: &Seg, c: &Circle) -> Q {
    // distance(seg, circle) = |distance(seg, center) - r| for an outside
    // segment; we need (d - r)^2 where d^2 = d2.  Using
    // (d - r)^2 = d^2 - 2 d r + r^2 >= d^2 - 2 r sqrt(d2) + r^2, bound
    // sqrt(d2) <= l1 proxy is messy; instead return
    // (d2 - r^2)^2 / (4 * d2) which is a valid lower bound:
    // (d-r)^2 = (d2 - r^2)^2 / (d + r)^2 >= (d2 - r^2)^2 / (4 d^2) when d >= r.
    let d2 = dist2_point_seg(&c.center, s);
    let r2 = &c.radius * &c.radius;
    let diff = &d2 - &r2;
    if diff <= Q::zero() {
        return Q::zero();
    }
    &diff * &diff / (qi(4) * &d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Pt {
        Pt::of(x, 1, y, 1)
    }

    #[test]
    fn proper_crossing() {
        let s1 = Seg::new(p(0, 0), p(2, 2));
        let s2 = Seg::new(p(0, 2), p(2, 0));
        match seg_intersect(&s1, &s2) {
            SegCrossing::Proper { p: pt, .. } => assert_eq!(pt, p(1, 1)),
            other => panic!("expected proper crossing, got {other:?}"),
        }
    }

    #[test]
    fn shared_endpoint_is_degenerate() {
        let s1 = Seg::new(p(0, 0), p(1, 1));
        let s2 = Seg::new(p(1, 1), p(2, 0));
        assert_eq!(seg_intersect(&s1, &s2), SegCrossing::Degenerate);
    }

    #[test]
    fn disjoint_segments() {
        let s1 = Seg::new(p(0, 0), p(1, 0));
        let s2 = Seg::new(p(0, 1), p(1, 1));
        assert_eq!(seg_intersect(&s1, &s2), SegCrossing::None);
        assert_eq!(dist2_seg_seg(&s1, &s2), qi(1));
    }

    #[test]
    fn circle_parametrization_roundtrip() {
        let c = Circle::new(p(3, 1), qi(2));
        for t in [q(0, 1), q(1, 2), q(-3, 4), qi(5)] {
            let pt = c.point_at(&t);
            assert!(c.contains_on_boundary(&pt));
            assert_eq!(c.param_of(&pt), Some(t));
        }
    }

    #[test]
    fn tangent_perpendicular_to_radius() {
        let c = Circle::new(p(0, 0), qi(1));
        let t = q(1, 3);
        let pt = c.point_at(&t);
        let tan = c.tangent_at(&t);
        assert!(pt.sub(&c.center).dot(&tan).is_zero());
    }

    #[test]
    fn seg_outside_circle() {
        let c = Circle::new(p(0, 0), qi(1));
        let s = Seg::new(p(2, -3), p(2, 3));
        assert_eq!(seg_vs_circle(&s, &c), SegCirclePosition::Outside);
        let crossing = Seg::new(p(-2, 0), p(2, 0));
        assert_eq!(seg_vs_circle(&crossing, &c), SegCirclePosition::Violates);
    }

    #[test]
    fn seg_from_circle_point_outward() {
        let c = Circle::new(p(0, 0), qi(1));
        // Endpoint on circle at t=0 -> (1,0); goes outward.
        let s = Seg::new(p(1, 0), p(3, 0));
        assert_eq!(seg_vs_circle(&s, &c), SegCirclePosition::Outside);
        // Tangent segment from the same point violates.
        let tangent = Seg::new(p(1, 0), p(1, 2));
        assert_eq!(seg_vs_circle(&tangent, &c), SegCirclePosition::Violates);
    }

    #[test]
    fn angular_order() {
        let dirs = [p(1, 0), p(2, 1), p(0, 1), p(-1, 1), p(-1, 0), p(-1, -2), p(0, -1), p(1, -1)];
        for w in dirs.windows(2) {
            assert_eq!(angle_cmp(&w[0], &w[1]), std::cmp::Ordering::Less);
        }
        assert_eq!(angle_cmp(&p(2, 2), &p(5, 5)), std::cmp::Ordering::Equal);
        assert!(in_ccw_wedge(&p(1, 0), &p(0, 1), &p(1, 1)));
        assert!(!in_ccw_wedge(&p(0, 1), &p(1, 0), &p(1, 1)));
        assert!(in_ccw_wedge(&p(0, 1), &p(1, 0), &p(-1, -1)));
    }

    #[test]
    fn quadval_signs() {
        // 3 - 2 sqrt(2) > 0, 1 - sqrt(2) < 0, 2 - sqrt(4) = 0.
        assert_eq!(QuadVal::new(qi(3), qi(-2), qi(2)).sign(), 1);
        assert_eq!(QuadVal::new(qi(1), qi(-1), qi(2)).sign(), -1);
        assert_eq!(QuadVal::new(qi(2), qi(-1), qi(4)).sign(), 0);
        // sqrt(2) + sqrt(3) vs sqrt(10): 5 + 2 sqrt(6) < 10.
        let lhs = QuadVal::new(qi(0), qi(1), qi(2));
        let rhs = QuadVal::new(qi(0), qi(1), qi(3));
        let sum_sq = QuadVal::new(qi(5), qi(2), qi(6));
        assert_eq!(sum_sq.cmp_q(&qi(10)), std::cmp::Ordering::Less);
        assert_eq!(lhs.cmp_quad(&rhs), std::cmp::Ordering::Less);
        // 1 + sqrt(2) vs sqrt(6): squares 3 + 2 sqrt(2) vs 6 -> less.
        let a = QuadVal::new(qi(1), qi(1), qi(2));
        let b = QuadVal::new(qi(0), qi(1), qi(6));
        assert_eq!(a.cmp_quad(&b), std::cmp::Ordering::Less);
        assert_eq!(b.cmp_quad(&a), std::cmp::Ordering::Greater);
    }

    #[test]
    fn chord_inside_circle() {
        let c = Circle::new(p(0, 0), qi(5));
        let s = Seg::new(c.point_at(&q(1, 2)), c.point_at(&q(-1, 2)));
        assert_eq!(seg_vs_circle(&s, &c), SegCirclePosition::Inside);
    }
}
