//! Polygonal links in R^3: validation, framings, projections, and the
//! combinatorial invariants read off a diagram.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Rotates `v` about the unit axis `k` by `angle` (right-hand rule).
pub fn rotate(v: Vec3, k: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    add(add(scale(v, c), scale(cross(k, v), s)), scale(k, dot(k, v) * (1.0 - c)))
}

/// Smallest distance between the segments `[p1, q1]` and `[p2, q2]`.
pub fn segment_distance(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> f64 {
    let d1 = sub(q1, p1);
    let d2 = sub(q2, p2);
    let r = sub(p1, p2);
    let a = dot(d1, d1);
    let e = dot(d2, d2);
    let f = dot(d2, r);
    let c = dot(d1, r);
    let b = dot(d1, d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    norm(sub(add(p1, scale(d1, s)), add(p2, scale(d2, t))))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub points: Vec<Vec3>,
    pub framing: Option<Vec<Vec3>>,
}

impl Component {
    pub fn new(points: Vec<Vec3>) -> Self {
        Component { points, framing: None }
    }

    pub fn framed(points: Vec<Vec3>, framing: Vec<Vec3>) -> Self {
        Component { points, framing: Some(framing) }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segment(&self, k: usize) -> (Vec3, Vec3) {
        (self.points[k], self.points[(k + 1) % self.points.len()])
    }

    pub fn length(&self) -> f64 {
        (0..self.len()).map(|k| {
            let (a, b) = self.segment(k);
            norm(sub(b, a))
        }).sum()
    }

    /// Unit tangent at vertex `k`: the normalised sum of the unit directions
    /// of the two segments meeting there.
    pub fn vertex_tangent(&self, k: usize) -> Vec3 {
        let n = self.len();
        let (a, b) = self.segment((k + n - 1) % n);
        let (c, d) = self.segment(k);
        normalize(add(normalize(sub(b, a)), normalize(sub(d, c))))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalLink {
    components: Vec<Component>,
}

impl PolygonalLink {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let link = PolygonalLink { components };
        link.validate()?;
        Ok(link)
    }

    pub fn knot(points: Vec<Vec3>) -> Result<Self> {
        PolygonalLink::new(vec![Component::new(points)])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&Component> {
        self.components.get(i).ok_or_else(|| Error::InvalidLink(format!("no component {i}")))
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn bounding_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in self.components.iter().flat_map(|c| &c.points) {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        norm(sub(hi, lo))
    }

    /// Embedding tolerance, proportional to the bounding-box diameter.
    pub fn tau_embed(&self) -> f64 {
        1e-6 * self.bounding_diameter()
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidLink("no components".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.len() < 3 {
                return Err(Error::InvalidLink(format!("component {i} has fewer than 3 vertices")));
            }
            if c.points.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::InvalidLink(format!("component {i} has a non-finite coordinate")));
            }
        }
        let tau = self.tau_embed();
        for (i, c) in self.components.iter().enumerate() {
            let n = c.len();
            for k in 0..n {
                let (a, b) = c.segment(k);
                if norm(sub(b, a)) <= tau {
                    return Err(Error::NotEmbedded(format!("component {i}: vertices {k} and {} coincide", (k + 1) % n)));
                }
                let (_, d) = c.segment((k + 1) % n);
                let turn = dot(normalize(sub(b, a)), normalize(sub(d, b)));
                if turn < -1.0 + 1e-12 {
                    return Err(Error::NotEmbedded(format!("component {i}: segment {k} folds back")));
                }
            }
            if let Some(fr) = &c.framing {
                if fr.len() != n {
                    return Err(Error::InvalidLink(format!("component {i}: framing length {} != {n}", fr.len())));
                }
                for (k, v) in fr.iter().enumerate() {
                    if (norm(*v) - 1.0).abs() > 1e-9 {
                        return Err(Error::InvalidLink(format!("component {i}: framing vector {k} is not unit")));
                    }
                    if dot(*v, c.vertex_tangent(k)).abs() > 1.0 - 1e-9 {
                        return Err(Error::InvalidLink(format!("component {i}: framing vector {k} is tangent")));
                    }
                }
            }
        }
        let segs: Vec<(usize, usize, Vec3, Vec3)> = self
            .components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| (0..c.len()).map(move |k| (i, k, c.segment(k).0, c.segment(k).1)))
            .collect();
        for x in 0..segs.len() {
            for y in x + 1..segs.len() {
                let (ci, ki, a, b) = segs[x];
                let (cj, kj, c, d) = segs[y];
                if ci == cj {
                    let n = self.components[ci].len();
                    if (ki + 1) % n == kj || (kj + 1) % n == ki {
                        continue;
                    }
                }
                if segment_distance(a, b, c, d) <= tau {
                    return Err(Error::NotEmbedded(format!(
                        "segment {ki} of component {ci} meets segment {kj} of component {cj}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Replaces the framing of component `i`.
    pub fn with_framing(&self, i: usize, framing: Option<Vec<Vec3>>) -> Result<Self> {
        let mut comps = self.components.clone();
        comps.get_mut(i).ok_or_else(|| Error::InvalidLink(format!("no component {i}")))?.framing = framing;
        PolygonalLink::new(comps)
    }

    /// Applies `p -> s R p + c` to the points and `R` to the framings.
    pub fn transformed(&self, rotation: [[f64; 3]; 3], s: f64, c: Vec3) -> Result<Self> {
        let apply = |p: Vec3| -> Vec3 { [dot(rotation[0], p), dot(rotation[1], p), dot(rotation[2], p)] };
        let comps = self
            .components
            .iter()
            .map(|comp| Component {
                points: comp.points.iter().map(|&p| add(scale(apply(p), s), c)).collect(),
                framing: comp.framing.as_ref().map(|f| f.iter().map(|&v| normalize(apply(v))).collect()),
            })
            .collect();
        PolygonalLink::new(comps)
    }

    /// `{"components": [{"points": [[x,y,z],...], "framing": [[nx,ny,nz],...]?}]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let comps = v["components"]
            .as_array()
            .ok_or_else(|| Error::Parse("link: missing \"components\"".into()))?;
        let parse_pts = |x: &Value| -> Result<Vec<Vec3>> {
            x.as_array()
                .ok_or_else(|| Error::Parse("link: expected a list of points".into()))?
                .iter()
                .map(|p| match p.as_array().map(|a| a.as_slice()) {
                    Some([a, b, c]) => match (a.as_f64(), b.as_f64(), c.as_f64()) {
                        (Some(a), Some(b), Some(c)) => Ok([a, b, c]),
                        _ => Err(Error::Parse("link: non-numeric coordinate".into())),
                    },
                    _ => Err(Error::Parse("link: points must have 3 coordinates".into())),
                })
                .collect()
        };
        let components = comps
            .iter()
            .map(|c| {
                let points = parse_pts(&c["points"])?;
                let framing = match c.get("framing") {
                    Some(Value::Null) | None => None,
                    Some(f) => Some(parse_pts(f)?),
                };
                Ok(Component { points, framing })
            })
            .collect::<Result<Vec<_>>>()?;
        PolygonalLink::new(components)
    }

    pub fn to_json(&self) -> Value {
        let comps: Vec<Value> = self
            .components
            .iter()
            .map(|c| match &c.framing {
                Some(f) => json!({"points": c.points, "framing": f}),
                None => json!({"points": c.points}),
            })
            .collect();
        json!({ "components": comps })
    }
}

fn sample_curve<F: Fn(f64) -> Vec3>(n: usize, f: F) -> Vec<Vec3> {
    (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect()
}

/// Round circle in the plane `z = c_z`, counter-clockwise seen from `+z`.
pub fn round_circle(n: usize, radius: f64, center: Vec3) -> Vec<Vec3> {
    sample_curve(n, |t| [center[0] + radius * t.cos(), center[1] + radius * t.sin(), center[2]])
}

/// Unit circle whose framing turns `twists` times around it, right-handed about
/// the tangent, so its self-linking number is `twists`.
pub fn twisted_circle(n: usize, twists: i32) -> Result<PolygonalLink> {
    let points = round_circle(n, 1.0, [0.0; 3]);
    let framing = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            let a = -f64::from(twists) * t;
            [a.cos() * t.cos(), a.cos() * t.sin(), a.sin()]
        })
        .collect();
    PolygonalLink::new(vec![Component::framed(points, framing)])
}

/// Two unit circles, each through the other's centre.
pub fn hopf_link(n: usize) -> Result<PolygonalLink> {
    let a = round_circle(n, 1.0, [0.0; 3]);
    let b = sample_curve(n, |t| [1.0 + t.cos(), 0.0, t.sin()]);
    PolygonalLink::new(vec![Component::new(a), Component::new(b)])
}

/// Two unit circles far apart.
pub fn split_link(n: usize) -> Result<PolygonalLink> {
    PolygonalLink::new(vec![
        Component::new(round_circle(n, 1.0, [0.0; 3])),
        Component::new(round_circle(n, 1.0, [5.0, 1.0, 0.5])),
    ])
}

/// The `(p, q)` torus link on the torus with radii 2 and 1, one component for
/// each unit of `gcd(p, q)`, winding `p` times around the `z`-axis.
pub fn torus_link(p: u32, q: u32, n_per_component: usize) -> Result<PolygonalLink> {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(p, q).max(1);
    let (pp, qq) = (f64::from(p / g), f64::from(q / g));
    let comps = (0..g)
        .map(|k| {
            let shift = 2.0 * PI * f64::from(k) / f64::from(p.max(1));
            Component::new(sample_curve(n_per_component, |t| {
                let (phi, psi) = (pp * t, qq * t + shift);
                let r = 2.0 + psi.cos();
                [r * phi.cos(), r * phi.sin(), psi.sin()]
            }))
        })
        .collect();
    PolygonalLink::new(comps)
}

/// Trefoil traced by `(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)`.
pub fn trefoil(n: usize) -> Result<PolygonalLink> {
    PolygonalLink::knot(sample_curve(n, |t| {
        [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()]
    }))
}

/// Figure-eight knot traced by `((2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t, sin 4t)`.
pub fn figure_eight(n: usize) -> Result<PolygonalLink> {
    PolygonalLink::knot(sample_curve(n, |t| {
        let r = 2.0 + (2.0 * t).cos();
        [r * (3.0 * t).cos(), r * (3.0 * t).sin(), (4.0 * t).sin()]
    }))
}

/// Resolves a built-in name: `circle`, `circle-twist:K`, `hopf`, `split`,
/// `trefoil`, `trefoil-torus`, `figure-eight`, `unknot-torus`, `torus:P,Q`.
pub fn builtin(name: &str) -> Result<PolygonalLink> {
    let bad = || Error::Parse(format!("unknown built-in link {name:?}"));
    match name {
        "circle" => PolygonalLink::knot(round_circle(96, 1.0, [0.0; 3])),
        "hopf" => hopf_link(96),
        "split" => split_link(96),
        "trefoil" => trefoil(180),
        "trefoil-torus" => torus_link(2, 3, 180),
        "figure-eight" => figure_eight(240),
        "unknot-torus" => torus_link(1, 3, 180),
        _ => {
            if let Some(k) = name.strip_prefix("circle-twist:") {
                return twisted_circle(96, k.parse().map_err(|_| bad())?);
            }
            if let Some(pq) = name.strip_prefix("torus:") {
                let (p, q) = pq.split_once(',').ok_or_else(bad)?;
                let (p, q): (u32, u32) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
                return torus_link(p, q, 60 * (p + q) as usize);
            }
            Err(bad())
        }
    }
}

/// A point on a component: segment index plus position in `[0, 1)` along it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Strand {
    pub component: usize,
    pub segment: usize,
    pub param: f64,
}

impl Strand {
    fn position(&self) -> f64 {
        self.segment as f64 + self.param
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    pub over: Strand,
    pub under: Strand,
    pub sign: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingData {
    /// Unit vector pointing towards the viewer.
    pub direction: Vec3,
    pub crossings: Vec<Crossing>,
}

/// Unit vectors `e1, e2` completing `v` to a right-handed frame.
fn plane_basis(v: Vec3) -> (Vec3, Vec3) {
    let helper = if v[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(cross(helper, v));
    let e2 = cross(v, e1);
    (e1, e2)
}

/// Crossings of the projection along `v`, with the viewer on the `+v` side.
///
/// The over strand is the one with the larger `v` coordinate; the sign is
/// that of `(T_over x T_under) . v`. Tangencies, crossings at vertices,
/// coincident heights and repeated crossing points are rejected.
pub fn crossings_along(link: &PolygonalLink, v: Vec3) -> Result<CrossingData> {
    let v = normalize(v);
    let (e1, e2) = plane_basis(v);
    let diam = link.bounding_diameter();
    let tau = link.tau_embed();
    let segs: Vec<(usize, usize, Vec3, Vec3)> = link
        .components()
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.len()).map(move |k| (i, k, c.segment(k).0, c.segment(k).1)))
        .collect();
    let proj = |p: Vec3| [dot(p, e1), dot(p, e2)];
    let nongeneric = || Error::NonGenericProjection(0);
    let mut crossings = Vec::new();
    let mut points2d: Vec<[f64; 2]> = Vec::new();
    for x in 0..segs.len() {
        for y in x + 1..segs.len() {
            let (ci, ki, a, b) = segs[x];
            let (cj, kj, c, d) = segs[y];
            let adjacent = ci == cj && {
                let n = link.components()[ci].len();
                (ki + 1) % n == kj || (kj + 1) % n == ki
            };
            let (pa, pb, pc, pd) = (proj(a), proj(b), proj(c), proj(d));
            let r = [pb[0] - pa[0], pb[1] - pa[1]];
            let s = [pd[0] - pc[0], pd[1] - pc[1]];
            let denom = r[0] * s[1] - r[1] * s[0];
            let qp = [pc[0] - pa[0], pc[1] - pa[1]];
            let rl = r[0].hypot(r[1]);
            let sl = s[0].hypot(s[1]);
            if rl < 1e-12 * diam || sl < 1e-12 * diam {
                return Err(nongeneric());
            }
            if denom.abs() <= 1e-12 * rl * sl {
                if adjacent {
                    continue;
                }
                // parallel projections: reject if collinear and overlapping
                let off = (qp[0] * r[1] - qp[1] * r[0]).abs() / rl;
                if off < 1e-9 * diam {
                    let t0 = (qp[0] * r[0] + qp[1] * r[1]) / (rl * rl);
                    let t1 = t0 + (s[0] * r[0] + s[1] * r[1]) / (rl * rl);
                    if t0.max(t1) >= 0.0 && t0.min(t1) <= 1.0 {
                        return Err(nongeneric());
                    }
                }
                continue;
            }
            let t = (qp[0] * s[1] - qp[1] * s[0]) / denom;
            let u = (qp[0] * r[1] - qp[1] * r[0]) / denom;
            let eps = 1e-9;
            if adjacent {
                // the shared vertex is not a crossing; anything else is a fold
                let interior = t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps;
                if interior {
                    return Err(nongeneric());
                }
                continue;
            }
            if t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps {
                continue;
            }
            if t < eps || t > 1.0 - eps || u < eps || u > 1.0 - eps {
                return Err(nongeneric());
            }
            let p = add(a, scale(sub(b, a), t));
            let q = add(c, scale(sub(d, c), u));
            let (hp, hq) = (dot(p, v), dot(q, v));
            if (hp - hq).abs() <= tau {
                return Err(nongeneric());
            }
            let sx = Strand { component: ci, segment: ki, param: t };
            let sy = Strand { component: cj, segment: kj, param: u };
            let (over, under, t_over, t_under) =
                if hp > hq { (sx, sy, sub(b, a), sub(d, c)) } else { (sy, sx, sub(d, c), sub(b, a)) };
            let sign = if dot(cross(t_over, t_under), v) > 0.0 { 1 } else { -1 };
            let pt = [pa[0] + t * r[0], pa[1] + t * r[1]];
            if points2d.iter().any(|o| (o[0] - pt[0]).hypot(o[1] - pt[1]) < 1e-9 * diam) {
                return Err(nongeneric());
            }
            points2d.push(pt);
            crossings.push(Crossing { over, under, sign });
        }
    }
    Ok(CrossingData { direction: v, crossings })
}

/// Number of projection directions tried before giving up.
pub const PROJECTION_RETRIES: usize = 20;

pub fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v: Vec3 = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = norm(v);
        if n > 1e-6 {
            return scale(v, 1.0 / n);
        }
    }
}

/// Crossing data for the first generic direction drawn from `seed`.
pub fn generic_projection(link: &PolygonalLink, seed: u64) -> Result<CrossingData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PROJECTION_RETRIES {
        match crossings_along(link, random_direction(&mut rng)) {
            Err(Error::NonGenericProjection(_)) => continue,
            other => return other,
        }
    }
    Err(Error::NonGenericProjection(PROJECTION_RETRIES))
}

/// Signed count of crossings where component `i` passes over component `j`.
pub fn over_crossing_count(data: &CrossingData, i: usize, j: usize) -> i64 {
    data.crossings
        .iter()
        .filter(|c| c.over.component == i && c.under.component == j)
        .map(|c| i64::from(c.sign))
        .sum()
}

fn check_pair(link: &PolygonalLink, i: usize, j: usize) -> Result<()> {
    link.component(i)?;
    link.component(j)?;
    if i == j {
        return Err(Error::InvalidLink("linking number needs two distinct components".into()));
    }
    Ok(())
}

/// `lk(L_i, L_j)` from a randomly chosen generic projection.
pub fn combinatorial_linking(link: &PolygonalLink, i: usize, j: usize, seed: u64) -> Result<i64> {
    check_pair(link, i, j)?;
    Ok(over_crossing_count(&generic_projection(link, seed)?, i, j))
}

/// Writhe of the diagram of component `i`.
pub fn diagram_writhe(data: &CrossingData, i: usize) -> i64 {
    over_crossing_count(data, i, i)
}

/// Component `i` together with its push-off along the framing by `eps`.
pub fn pushoff(link: &PolygonalLink, i: usize, eps: f64) -> Result<PolygonalLink> {
    let c = link.component(i)?;
    let fr = c.framing.as_ref().ok_or(Error::MissingFraming(i))?;
    let shifted: Vec<Vec3> = c.points.iter().zip(fr).map(|(&p, &n)| add(p, scale(n, eps))).collect();
    PolygonalLink::new(vec![Component::new(c.points.clone()), Component::new(shifted)])
}

/// A push-off distance well inside the embedding margin of component `i`.
pub fn default_pushoff_eps(link: &PolygonalLink, i: usize) -> Result<f64> {
    let c = link.component(i)?;
    let n = c.len();
    let mut min_seg = f64::INFINITY;
    let mut min_gap = f64::INFINITY;
    for k in 0..n {
        let (a, b) = c.segment(k);
        min_seg = min_seg.min(norm(sub(b, a)));
        for m in k + 2..n {
            if (m + 1) % n == k {
                continue;
            }
            let (p, q) = c.segment(m);
            min_gap = min_gap.min(segment_distance(a, b, p, q));
        }
    }
    Ok(0.25 * min_seg.min(min_gap))
}

/// `lk(K_i, K_i + eps n)` using the framing `n`, checked to be unchanged when
/// `eps` is halved.
pub fn writhe_pushoff_selflinking(link: &PolygonalLink, i: usize) -> Result<i64> {
    let eps = default_pushoff_eps(link, i)?;
    let a = combinatorial_linking(&pushoff(link, i, eps)?, 0, 1, 0x5e1f)?;
    let b = combinatorial_linking(&pushoff(link, i, eps / 2.0)?, 0, 1, 0x5e1f)?;
    if a != b {
        return Err(Error::NotEmbedded(format!("push-off linking changed from {a} to {b} when halving ε")));
    }
    Ok(a)
}

/// Framing of component `i` by the projection of a fixed direction `v` onto
/// the normal planes; for a projection along `v` its self-linking is the
/// diagram writhe.
pub fn blackboard_framing(link: &PolygonalLink, i: usize, v: Vec3) -> Result<PolygonalLink> {
    let c = link.component(i)?;
    let v = normalize(v);
    let framing = (0..c.len())
        .map(|k| {
            let t = c.vertex_tangent(k);
            let w = sub(v, scale(t, dot(v, t)));
            if norm(w) < 1e-6 {
                return Err(Error::InvalidLink(format!("blackboard direction tangent at vertex {k}")));
            }
            Ok(normalize(w))
        })
        .collect::<Result<Vec<_>>>()?;
    link.with_framing(i, Some(framing))
}

/// Rotates the framing of component `i` about the tangent by `turns` full
/// turns spread evenly in arclength.
pub fn twist_framing(link: &PolygonalLink, i: usize, turns: i64) -> Result<PolygonalLink> {
    let c = link.component(i)?;
    let fr = c.framing.as_ref().ok_or(Error::MissingFraming(i))?;
    let total = c.length();
    let mut arc = 0.0;
    let mut framing = Vec::with_capacity(c.len());
    for k in 0..c.len() {
        let t = c.vertex_tangent(k);
        let perp = normalize(sub(fr[k], scale(t, dot(fr[k], t))));
        framing.push(rotate(perp, t, 2.0 * PI * turns as f64 * arc / total));
        let (a, b) = c.segment(k);
        arc += norm(sub(b, a));
    }
    link.with_framing(i, Some(framing))
}

/// Adds the integer number of twists that brings the self-linking to zero.
pub fn normalize_framing_to_zero(link: &PolygonalLink, i: usize) -> Result<PolygonalLink> {
    let sl = writhe_pushoff_selflinking(link, i)?;
    if sl == 0 {
        return Ok(link.clone());
    }
    let out = twist_framing(link, i, -sl)?;
    let after = writhe_pushoff_selflinking(&out, i)?;
    if after != 0 {
        return Err(Error::InvalidLink(format!("framing still has self-linking {after} after {} twists", -sl)));
    }
    Ok(out)
}

/// One passage through a crossing along a knot diagram.
#[derive(Clone, Copy, Debug)]
struct Passage {
    position: f64,
    crossing: usize,
    over: bool,
}

fn gauss_word(data: &CrossingData, comp: usize) -> Vec<Passage> {
    let mut word: Vec<Passage> = Vec::new();
    for (idx, c) in data.crossings.iter().enumerate() {
        if c.over.component != comp || c.under.component != comp {
            continue;
        }
        word.push(Passage { position: c.over.position(), crossing: idx, over: true });
        word.push(Passage { position: c.under.position(), crossing: idx, over: false });
    }
    word.sort_by(|a, b| a.position.total_cmp(&b.position));
    word
}

/// Second Conway coefficient from a knot diagram, counting pairs of
/// self-crossings `A, B` met from the base point as
/// `over(A) < under(B) < under(A) < over(B)`, weighted by the product of
/// signs. `base` rotates the base point to the given passage.
pub fn conway_a2_from_diagram(data: &CrossingData, comp: usize, base: usize) -> i64 {
    let mut word = gauss_word(data, comp);
    if word.is_empty() {
        return 0;
    }
    let shift = base % word.len();
    word.rotate_left(shift);
    let n_cross = data.crossings.len();
    let mut over_at = vec![usize::MAX; n_cross];
    let mut under_at = vec![usize::MAX; n_cross];
    for (pos, p) in word.iter().enumerate() {
        if p.over {
            over_at[p.crossing] = pos;
        } else {
            under_at[p.crossing] = pos;
        }
    }
    let ids: Vec<usize> = (0..n_cross).filter(|&c| over_at[c] != usize::MAX).collect();
    let mut total = 0i64;
    for &a in &ids {
        if over_at[a] > under_at[a] {
            continue;
        }
        for &b in &ids {
            if under_at[b] > over_at[b] {
                continue;
            }
            if over_at[a] < under_at[b] && under_at[b] < under_at[a] && under_at[a] < over_at[b] {
                total += i64::from(data.crossings[a].sign * data.crossings[b].sign);
            }
        }
    }
    total
}

/// Second Conway coefficient of component `comp` from a random projection.
pub fn conway_a2(link: &PolygonalLink, comp: usize, seed: u64) -> Result<i64> {
    link.component(comp)?;
    Ok(conway_a2_from_diagram(&generic_projection(link, seed)?, comp, 0))
}
