//! Numeric referee for the exact census.
//!
//! Isolates the real solutions of `J = F1 = F2 = 0` in a square box by
//! interval subdivision and the Krawczyk operator, then reads off the sign of
//! `det DF` and of the region polynomial on each isolating box. A point
//! classifier in exact arithmetic decides fold/cusp at rational points.

use serde::Serialize;
use thiserror::Error;

use crate::interval::{Interval, IntervalPoly};
use crate::pipeline::DerivedSystem;
use crate::poly::{Polynomial, Rational, Var};

/// Smallest box width the subdivision will produce.
pub const MIN_BOX_WIDTH: f64 = 1.0 / (1u64 << 40) as f64;
/// Certified boxes are contracted until at least this narrow.
pub const TARGET_WIDTH: f64 = 1e-9;
pub const DEFAULT_RADIUS: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("box radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("point ({x}, {y}) is unclassifiable: J, F1, F2 and both minors vanish there")]
    Unclassifiable { x: String, y: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Cusp,
    Fold,
    Unresolved,
}

/// Membership of a box in `{u > 0}`. Serializes as `true`, `false` or `null`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionFlag {
    Inside,
    Outside,
    Unknown,
}

impl Serialize for RegionFlag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RegionFlag::Inside => s.serialize_bool(true),
            RegionFlag::Outside => s.serialize_bool(false),
            RegionFlag::Unknown => s.serialize_none(),
        }
    }
}

/// Exact classification of a point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    NotCritical,
    Fold,
    Cusp,
}

/// An axis-aligned box `x × y`. Serializes as `[[xlo, xhi], [ylo, yhi]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2 {
    pub x: Interval,
    pub y: Interval,
}

impl Serialize for Box2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ((self.x.lo, self.x.hi), (self.y.lo, self.y.hi)).serialize(s)
    }
}

impl Box2 {
    pub fn square(radius: f64) -> Self {
        Box2 {
            x: Interval::new(-radius, radius),
            y: Interval::new(-radius, radius),
        }
    }

    pub fn width(&self) -> f64 {
        self.x.width().max(self.y.width())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }

    fn intersect(&self, other: &Box2) -> Option<Box2> {
        Some(Box2 {
            x: self.x.intersect(&other.x)?,
            y: self.y.intersect(&other.y)?,
        })
    }

    fn hull(&self, other: &Box2) -> Box2 {
        Box2 {
            x: self.x.hull(&other.x),
            y: self.y.hull(&other.y),
        }
    }

    fn interior_of(&self, other: &Box2) -> bool {
        self.x.interior_of(&other.x) && self.y.interior_of(&other.y)
    }

    fn quarters(&self) -> [Box2; 4] {
        let (x0, x1) = self.x.split();
        let (y0, y1) = self.y.split();
        [
            Box2 { x: x0, y: y0 },
            Box2 { x: x0, y: y1 },
            Box2 { x: x1, y: y0 },
            Box2 { x: x1, y: y1 },
        ]
    }

    fn inflate(&self, amount: f64) -> Box2 {
        Box2 {
            x: self.x.inflate(amount),
            y: self.y.inflate(amount),
        }
    }
}

/// A box found by the oracle, with what could be decided about it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedPoint {
    #[serde(rename = "box")]
    pub bx: Box2,
    pub kind: PointKind,
    /// Sign of `det DF` over the box, when it excludes zero.
    pub degree_sign: Option<i8>,
    /// Whether the box lies in `{u > 0}`; `None` when no region was given.
    pub in_region: Option<RegionFlag>,
}

struct Equation {
    f: IntervalPoly,
    dx: IntervalPoly,
    dy: IntervalPoly,
}

impl Equation {
    fn new(p: &Polynomial) -> Self {
        Equation {
            f: IntervalPoly::new(p),
            dx: IntervalPoly::new(&p.partial(Var::X)),
            dy: IntervalPoly::new(&p.partial(Var::Y)),
        }
    }

    fn gradient_at(&self, x: f64, y: f64) -> (f64, f64) {
        (self.dx.eval_point(x, y).mid(), self.dy.eval_point(x, y).mid())
    }
}

enum Verdict {
    NoRoot,
    Unique,
    Undecided,
}

/// Krawczyk test for the square system `(g, h)` on `bx`.
fn krawczyk(g: &Equation, h: &Equation, bx: &Box2) -> (Verdict, Option<Box2>) {
    let (cx, cy) = (bx.x.mid(), bx.y.mid());
    let (a, b) = g.gradient_at(cx, cy);
    let (c, d) = h.gradient_at(cx, cy);
    let det = a * d - b * c;
    if !det.is_finite() || det == 0.0 {
        return (Verdict::Undecided, None);
    }
    // Approximate inverse of the Jacobian at the center.
    let y = [[d / det, -b / det], [-c / det, a / det]];
    let yi = |i: usize, j: usize| Interval::point(y[i][j]);

    let fc = [g.f.eval_point(cx, cy), h.f.eval_point(cx, cy)];
    let jac = [
        [g.dx.eval(bx.x, bx.y), g.dy.eval(bx.x, bx.y)],
        [h.dx.eval(bx.x, bx.y), h.dy.eval(bx.x, bx.y)],
    ];
    let dxc = [bx.x - Interval::point(cx), bx.y - Interval::point(cy)];

    let mut k = [Interval::point(0.0); 2];
    for i in 0..2 {
        let yf = yi(i, 0) * fc[0] + yi(i, 1) * fc[1];
        let mut acc = Interval::point([cx, cy][i]) - yf;
        for j in 0..2 {
            let ident = Interval::point(if i == j { 1.0 } else { 0.0 });
            let m = ident - (yi(i, 0) * jac[0][j] + yi(i, 1) * jac[1][j]);
            acc = acc + m * dxc[j];
        }
        k[i] = acc;
    }
    let kbox = Box2 { x: k[0], y: k[1] };
    if kbox.interior_of(bx) {
        return (Verdict::Unique, Some(kbox));
    }
    match kbox.intersect(bx) {
        None => (Verdict::NoRoot, None),
        Some(narrowed) => (Verdict::Undecided, Some(narrowed)),
    }
}

/// Referee for the exact census on a bounded square.
pub struct Oracle {
    eqs: [Equation; 3],
    det_df: IntervalPoly,
}

impl Oracle {
    pub fn new(d: &DerivedSystem) -> Self {
        Oracle {
            eqs: [Equation::new(&d.j), Equation::new(&d.f1), Equation::new(&d.f2)],
            det_df: IntervalPoly::new(&d.det_df),
        }
    }

    fn excluded(&self, bx: &Box2) -> bool {
        self.eqs
            .iter()
            .any(|e| !e.f.eval(bx.x, bx.y).contains_zero())
    }

    /// Square subsystems ordered by how well conditioned they are at the
    /// box center (sine of the angle between the gradients).
    fn ranked_pairs(&self, bx: &Box2) -> Vec<(usize, usize, usize)> {
        let (cx, cy) = (bx.x.mid(), bx.y.mid());
        let grads: Vec<(f64, f64)> = self.eqs.iter().map(|e| e.gradient_at(cx, cy)).collect();
        let mut pairs: Vec<((usize, usize, usize), f64)> = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
            .into_iter()
            .map(|(i, j, k)| {
                let (a, b) = grads[i];
                let (c, d) = grads[j];
                let norm = a.hypot(b) * c.hypot(d);
                let score = if norm > 0.0 { (a * d - b * c).abs() / norm } else { 0.0 };
                ((i, j, k), if score.is_finite() { score } else { 0.0 })
            })
            .collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
        pairs.into_iter().map(|(p, _)| p).collect()
    }

    /// Contracts a box known to hold a unique root of the pair `(i, j)`.
    fn contract(&self, i: usize, j: usize, mut bx: Box2) -> Box2 {
        for _ in 0..200 {
            if bx.width() <= TARGET_WIDTH {
                break;
            }
            let (_, next) = krawczyk(&self.eqs[i], &self.eqs[j], &bx);
            match next.and_then(|n| n.intersect(&bx)) {
                Some(n) if n.width() < 0.99 * bx.width() => bx = n,
                Some(n) => {
                    bx = n;
                    break;
                }
                None => break,
            }
        }
        bx
    }

    /// Result of examining one box: `Ok(Some(b))` certified root of the full
    /// system in `b`, `Ok(None)` no root, `Err(())` undecided.
    fn examine(&self, bx: &Box2) -> Result<Option<Box2>, ()> {
        let small = bx.width() < 1e-2;
        for (i, j, k) in self.ranked_pairs(bx) {
            let mut candidates = vec![*bx];
            if small {
                candidates.push(bx.inflate(0.25 * bx.width()));
            }
            for cand in candidates {
                match krawczyk(&self.eqs[i], &self.eqs[j], &cand).0 {
                    Verdict::NoRoot => return Ok(None),
                    Verdict::Unique => {
                        let tight = self.contract(i, j, cand);
                        return Ok(self.eqs[k]
                            .f
                            .eval(tight.x, tight.y)
                            .contains_zero()
                            .then_some(tight));
                    }
                    _ => {}
                }
            }
        }
        Err(())
    }

    /// All solutions of `J = F1 = F2 = 0` in `[-radius, radius]²`.
    pub fn isolate(&self, radius: f64) -> Result<Vec<CertifiedPoint>, OracleError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(OracleError::InvalidRadius(radius));
        }
        let mut stack = vec![Box2::square(radius)];
        let mut roots: Vec<Box2> = Vec::new();
        let mut unresolved: Vec<Box2> = Vec::new();
        while let Some(bx) = stack.pop() {
            if self.excluded(&bx) {
                continue;
            }
            match self.examine(&bx) {
                Ok(Some(root)) => roots.push(root),
                Ok(None) => {}
                Err(()) if bx.width() <= MIN_BOX_WIDTH => unresolved.push(bx),
                Err(()) => stack.extend(bx.quarters()),
            }
        }

        let mut out: Vec<CertifiedPoint> = merge_overlapping(roots, |a, b| a.intersect(b))
            .into_iter()
            .map(|bx| CertifiedPoint {
                bx,
                kind: PointKind::Cusp,
                degree_sign: self.det_df.eval(bx.x, bx.y).sign(),
                in_region: None,
            })
            .collect();
        out.extend(
            merge_overlapping(unresolved, |a, b| Some(a.hull(b))).into_iter().map(|bx| {
                CertifiedPoint {
                    bx,
                    kind: PointKind::Unresolved,
                    degree_sign: None,
                    in_region: None,
                }
            }),
        );
        out.sort_by(|a, b| {
            a.bx.x
                .lo
                .total_cmp(&b.bx.x.lo)
                .then(a.bx.y.lo.total_cmp(&b.bx.y.lo))
        });
        Ok(out)
    }
}

/// Repeatedly merges touching boxes with `merge` until none touch.
fn merge_overlapping(mut boxes: Vec<Box2>, merge: impl Fn(&Box2, &Box2) -> Option<Box2>) -> Vec<Box2> {
    let mut changed = true;
    while changed {
        changed = false;
        'outer: for i in 0..boxes.len() {
            for j in (i + 1)..boxes.len() {
                if boxes[i].intersect(&boxes[j]).is_some() {
                    if let Some(m) = merge(&boxes[i], &boxes[j]) {
                        boxes[i] = m;
                        boxes.swap_remove(j);
                        changed = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    boxes
}

/// Isolates cusps of the derived system in `[-radius, radius]²`.
pub fn isolate_cusps(d: &DerivedSystem, radius: f64) -> Result<Vec<CertifiedPoint>, OracleError> {
    Oracle::new(d).isolate(radius)
}

/// Sign of `u` over the point's box.
pub fn region_membership(u: &Polynomial, pt: &CertifiedPoint) -> RegionFlag {
    let v = IntervalPoly::new(u).eval(pt.bx.x, pt.bx.y);
    if v.lo > 0.0 {
        RegionFlag::Inside
    } else if v.hi < 0.0 {
        RegionFlag::Outside
    } else {
        RegionFlag::Unknown
    }
}

/// Runs the oracle and tags each point with its region membership.
pub fn run_oracle(
    d: &DerivedSystem,
    u: Option<&Polynomial>,
    radius: f64,
) -> Result<Vec<CertifiedPoint>, OracleError> {
    let mut pts = isolate_cusps(d, radius)?;
    if let Some(u) = u {
        for p in pts.iter_mut() {
            p.in_region = Some(if p.kind == PointKind::Cusp {
                region_membership(u, p)
            } else {
                RegionFlag::Unknown
            });
        }
    }
    Ok(pts)
}

/// Exact fold/cusp classification at a rational point.
pub fn classify_critical_point(
    d: &DerivedSystem,
    x: &Rational,
    y: &Rational,
) -> Result<CriticalKind, OracleError> {
    use num_traits::Zero;
    if !d.j.evaluate(x, y).is_zero() {
        return Ok(CriticalKind::NotCritical);
    }
    if !d.f1.evaluate(x, y).is_zero() || !d.f2.evaluate(x, y).is_zero() {
        return Ok(CriticalKind::Fold);
    }
    if !d.minor1.evaluate(x, y).is_zero() || !d.minor2.evaluate(x, y).is_zero() {
        return Ok(CriticalKind::Cusp);
    }
    Err(OracleError::Unclassifiable {
        x: x.to_string(),
        y: y.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_polynomial;
    use crate::pipeline::derive_system;
    use crate::poly::rat;

    fn system(f1: &str, f2: &str) -> DerivedSystem {
        derive_system(&parse_polynomial(f1).unwrap(), &parse_polynomial(f2).unwrap())
    }

    fn example_one() -> DerivedSystem {
        system("x*y^2 - x^2 + y^2 + x - y", "x - y")
    }

    #[test]
    fn example_one_cusps() {
        let d = example_one();
        let u = parse_polynomial("1 - x^2 - y^2").unwrap();
        let pts = run_oracle(&d, Some(&u), 10.0).unwrap();
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!(pts[0].bx.contains(-4.0, 2.0));
        assert!(pts[1].bx.contains(0.0, 0.0));
        for p in &pts {
            assert_eq!(p.kind, PointKind::Cusp);
            assert_eq!(p.degree_sign, Some(-1));
            assert!(p.bx.width() <= 1e-6);
        }
        assert_eq!(pts[0].in_region, Some(RegionFlag::Outside));
        assert_eq!(pts[1].in_region, Some(RegionFlag::Inside));
    }

    #[test]
    fn whitney_cusp() {
        let pts = isolate_cusps(&system("x", "x*y + y^3"), 2.0).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].bx.contains(0.0, 0.0));
        assert_eq!(pts[0].degree_sign, Some(1));
    }

    #[test]
    fn immersion_has_none() {
        assert!(isolate_cusps(&system("x", "y"), 5.0).unwrap().is_empty());
        assert!(matches!(
            isolate_cusps(&system("x", "y"), 0.0),
            Err(OracleError::InvalidRadius(_))
        ));
    }

    #[test]
    fn exact_classification() {
        let d = example_one();
        assert_eq!(classify_critical_point(&d, &rat(0), &rat(0)).unwrap(), CriticalKind::Cusp);
        assert_eq!(classify_critical_point(&d, &rat(-4), &rat(2)).unwrap(), CriticalKind::Cusp);
        assert_eq!(
            classify_critical_point(&d, &rat(1), &rat(0)).unwrap(),
            CriticalKind::NotCritical
        );
        let folds = system("x^2", "y");
        assert_eq!(classify_critical_point(&folds, &rat(0), &rat(0)).unwrap(), CriticalKind::Fold);
        let bad = system("x^2", "y^2");
        assert!(matches!(
            classify_critical_point(&bad, &rat(0), &rat(0)),
            Err(OracleError::Unclassifiable { .. })
        ));
    }

    #[test]
    fn region_flags() {
        let u = parse_polynomial("1 - x^2 - y^2").unwrap();
        let at = |x: f64, y: f64, w: f64| CertifiedPoint {
            bx: Box2 {
                x: Interval::new(x - w, x + w),
                y: Interval::new(y - w, y + w),
            },
            kind: PointKind::Cusp,
            degree_sign: None,
            in_region: None,
        };
        assert_eq!(region_membership(&u, &at(0.0, 0.0, 1e-9)), RegionFlag::Inside);
        assert_eq!(region_membership(&u, &at(-4.0, 2.0, 1e-9)), RegionFlag::Outside);
        let x = parse_polynomial("x").unwrap();
        assert_eq!(region_membership(&x, &at(0.0, 3.0, 0.1)), RegionFlag::Unknown);
    }
}
