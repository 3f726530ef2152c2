//! Configuration-space integrals of pulled-back Gauss forms: the linking
//! number, framed self-linking, the writhe, and the degree-two knot
//! invariant `v2 = W_X/4 + W_Y/3`.

use std::f64::consts::PI;

use num::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::knot::{cross, dot, norm, pushoff, scale, sub, add, Component, PolygonalLink, Vec3};
use crate::mc::{self, Accumulator, IntegralEstimate, McConfig};
use crate::rational::Rational;

/// The rotation-invariant area form on `S^2` normalised to total area 1:
/// `ω_u(a, b) = u·(a × b) / (4π |u|^3)` at a non-zero point `u` of `R^3`.
#[derive(Clone, Copy, Debug, Default)]
pub struct GaussForm;

impl GaussForm {
    pub const TOTAL_AREA: f64 = 4.0 * PI;

    pub fn eval(&self, u: Vec3, a: Vec3, b: Vec3) -> f64 {
        let r = norm(u);
        dot(u, cross(a, b)) / (Self::TOTAL_AREA * r * r * r)
    }
}

/// Density of `φ^*ω` for the edge map `φ(x, y) = (y - x)/|y - x|` at a point
/// of a two-parameter family with velocities `tx` and `ty`, in the
/// orientation `(s_x, s_y)`.
pub fn gauss_map_pullback(x: Vec3, tx: Vec3, y: Vec3, ty: Vec3) -> Result<f64> {
    let u = sub(y, x);
    if norm(u) == 0.0 {
        return Err(Error::Divergent("coincident edge endpoints".into()));
    }
    // ∂u/∂s_x = -tx, ∂u/∂s_y = ty
    Ok(GaussForm.eval(u, scale(tx, -1.0), ty))
}

fn chord_density(x: Vec3, tx: Vec3, y: Vec3, ty: Vec3) -> f64 {
    let d = sub(x, y);
    let r2 = dot(d, d);
    if r2 == 0.0 {
        return 0.0;
    }
    dot(d, cross(tx, ty)) / (GaussForm::TOTAL_AREA * r2 * r2.sqrt())
}

/// Arclength parametrisation of a closed polygon by `t ∈ [0, 1)`.
#[derive(Clone, Debug)]
pub struct ArcParam {
    points: Vec<Vec3>,
    cum: Vec<f64>,
    length: f64,
}

impl ArcParam {
    pub fn new(c: &Component) -> Self {
        let n = c.len();
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for k in 0..n {
            let (a, b) = c.segment(k);
            acc += norm(sub(b, a));
            cum.push(acc);
        }
        let length = acc;
        for v in &mut cum {
            *v /= length;
        }
        ArcParam { points: c.points.clone(), cum, length }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Position, velocity `dx/dt` and segment index at parameter `t`.
    pub fn at(&self, t: f64) -> (Vec3, Vec3, usize) {
        let t = t.rem_euclid(1.0);
        let n = self.points.len();
        let k = match self.cum.binary_search_by(|c| c.total_cmp(&t)) {
            Ok(k) => k.min(n - 1),
            Err(k) => k - 1,
        };
        let a = self.points[k];
        let b = self.points[(k + 1) % n];
        let dir = sub(b, a);
        let seg = self.cum[k + 1] - self.cum[k];
        let f = (t - self.cum[k]) / seg;
        (add(a, scale(dir, f)), scale(dir, 1.0 / seg), k)
    }
}

/// Signed solid angle subtended by segment `[c, d]` seen along segment
/// `[a, b]`, divided by `4π`: the exact Gauss integral over the segment pair.
pub fn segment_pair_gauss(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    let r13 = sub(c, a);
    let r14 = sub(d, a);
    let r23 = sub(c, b);
    let r24 = sub(d, b);
    let faces = [cross(r13, r14), cross(r14, r24), cross(r24, r23), cross(r23, r13)];
    let mut unit = [[0.0; 3]; 4];
    for (u, f) in unit.iter_mut().zip(&faces) {
        let n = norm(*f);
        if n < 1e-300 {
            return 0.0;
        }
        *u = scale(*f, 1.0 / n);
    }
    let omega: f64 = (0..4).map(|k| dot(unit[k], unit[(k + 1) % 4]).clamp(-1.0, 1.0).asin()).sum();
    let orient = dot(cross(sub(d, c), sub(b, a)), r13);
    omega * orient.signum() / (4.0 * PI)
}

/// Exact Gauss linking integral of two components, summed over segment pairs.
pub fn linking_integral_exact(link: &PolygonalLink, i: usize, j: usize) -> Result<f64> {
    let (ci, cj) = (link.component(i)?, link.component(j)?);
    if i == j {
        return Err(Error::InvalidLink("linking integral needs two distinct components".into()));
    }
    let mut total = 0.0;
    for k in 0..ci.len() {
        let (a, b) = ci.segment(k);
        for m in 0..cj.len() {
            let (c, d) = cj.segment(m);
            total += segment_pair_gauss(a, b, c, d);
        }
    }
    Ok(total)
}

/// Exact writhe `∫∫_{K×K} φ^*ω` of a polygonal component; pairs of adjacent
/// or equal segments contribute nothing.
pub fn writhe_exact(link: &PolygonalLink, i: usize) -> Result<f64> {
    let c = link.component(i)?;
    let n = c.len();
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = c.segment(k);
        for m in k + 2..n {
            if k == 0 && m == n - 1 {
                continue;
            }
            let (p, q) = c.segment(m);
            total += segment_pair_gauss(a, b, p, q);
        }
    }
    Ok(2.0 * total)
}

/// Monte Carlo Gauss integral `∫_{K_i × K_j} φ^*ω` with uniform parameters.
pub fn linking_integral(link: &PolygonalLink, i: usize, j: usize, cfg: &McConfig) -> Result<IntegralEstimate> {
    let (ci, cj) = (link.component(i)?, link.component(j)?);
    if i == j {
        return Err(Error::InvalidLink("linking integral needs two distinct components".into()));
    }
    let (pi, pj) = (ArcParam::new(ci), ArcParam::new(cj));
    let acc = mc::run(cfg, |rng, acc| {
        let (x, tx, _) = pi.at(rng.random());
        let (y, ty, _) = pj.at(rng.random());
        acc.push(chord_density(x, tx, y, ty));
    })?;
    Ok(IntegralEstimate::from_accumulator(&acc, cfg.seed))
}

/// Monte Carlo of the undeformed chord integral over `K × K`: the writhe,
/// which is not an isotopy invariant.
pub fn writhe_integral(link: &PolygonalLink, i: usize, cfg: &McConfig) -> Result<IntegralEstimate> {
    let p = ArcParam::new(link.component(i)?);
    let acc = mc::run(cfg, |rng, acc| {
        let (x, tx, kx) = p.at(rng.random());
        let (y, ty, ky) = p.at(rng.random());
        acc.push(if kx == ky { 0.0 } else { chord_density(x, tx, y, ty) });
    })?;
    Ok(IntegralEstimate::from_accumulator(&acc, cfg.seed))
}

/// Parametrisation by vertex index, `t = (k + f)/n` on segment `k`, shared by
/// a component and its push-off.
struct IndexParam<'a> {
    c: &'a Component,
}

impl IndexParam<'_> {
    fn at(&self, t: f64) -> (Vec3, Vec3) {
        let n = self.c.len();
        let s = t.rem_euclid(1.0) * n as f64;
        let k = (s.floor() as usize).min(n - 1);
        let f = s - k as f64;
        let (a, b) = self.c.segment(k);
        let dir = sub(b, a);
        (add(a, scale(dir, f)), scale(dir, n as f64))
    }
}

/// Framed self-linking: the Gauss integral of `K_i` against `K_i + ε n`.
///
/// The second parameter is drawn as the first plus an offset from a mixture
/// of the uniform law and a wrapped Cauchy law of width comparable to `ε`,
/// which follows the concentration of the integrand along the diagonal.
pub fn self_linking_integral(link: &PolygonalLink, i: usize, eps: f64, cfg: &McConfig) -> Result<IntegralEstimate> {
    let two = pushoff(link, i, eps)?;
    let (k, kp) = (&two.components()[0], &two.components()[1]);
    let (p, q) = (IndexParam { c: k }, IndexParam { c: kp });
    let gamma = (eps / k.length()).max(1e-6);
    let w_uniform = 0.3;
    let two_pi_g = 2.0 * PI * gamma;
    let wrapped_cauchy = |u: f64| two_pi_g.sinh() / (two_pi_g.cosh() - (2.0 * PI * u).cos());
    let acc = mc::run(cfg, |rng, acc| {
        let s: f64 = rng.random();
        let u: f64 = if rng.random::<f64>() < w_uniform {
            rng.random()
        } else {
            (gamma * (PI * (rng.random::<f64>() - 0.5)).tan()).rem_euclid(1.0)
        };
        let density = w_uniform + (1.0 - w_uniform) * wrapped_cauchy(u);
        let (x, tx) = p.at(s);
        let (y, ty) = q.at(s + u);
        acc.push(chord_density(x, tx, y, ty) / density);
    })?;
    Ok(IntegralEstimate::from_accumulator(&acc, cfg.seed))
}

/// Graph topologies whose configuration spaces are integrated here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Topology {
    /// One edge between two different components.
    ChordTwoComponents,
    /// One edge with both ends on the same component.
    ChordOneComponent,
    /// Four legs on a knot, chords joining the first to the third and the
    /// second to the fourth.
    X,
    /// Three legs on a knot joined to one free vertex in `R^3`.
    Y,
    /// Two legs joined through two free vertices linked by a double edge.
    DoubleEdge,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigurationDomain {
    pub topology: Topology,
    pub legs: usize,
    pub free_vertices: usize,
    pub edges: usize,
    pub dimension: usize,
}

impl ConfigurationDomain {
    pub fn new(topology: Topology) -> Self {
        let (legs, free_vertices, edges) = match topology {
            Topology::ChordTwoComponents | Topology::ChordOneComponent => (2, 0, 1),
            Topology::X => (4, 0, 2),
            Topology::Y => (3, 1, 3),
            Topology::DoubleEdge => (2, 2, 4),
        };
        ConfigurationDomain { topology, legs, free_vertices, edges, dimension: legs + 3 * free_vertices }
    }

    /// Legs move on curves and free vertices in space; the Gauss maps land
    /// in a product of one sphere per edge.
    pub fn dimension_matches(&self) -> bool {
        self.dimension == 2 * self.edges
    }
}

/// Coefficient of the top form in `Ω_1 ∧ ... ∧ Ω_k` for 2-forms given as
/// antisymmetric `2k × 2k` matrices, summing over ordered pair assignments.
pub fn wedge_top<T>(forms: &[Vec<Vec<T>>]) -> T
where
    T: Clone + Zero + One + std::ops::Neg<Output = T> + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    let dim = 2 * forms.len();
    let mut used = vec![false; dim];
    let mut slots: Vec<usize> = Vec::with_capacity(dim);
    fn parity(p: &[usize]) -> bool {
        let mut odd = false;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    odd = !odd;
                }
            }
        }
        odd
    }
    fn rec<T>(forms: &[Vec<Vec<T>>], e: usize, used: &mut [bool], slots: &mut Vec<usize>, acc: &mut T, term: T)
    where
        T: Clone + Zero + One + std::ops::Neg<Output = T> + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
    {
        if e == forms.len() {
            let t = if parity(slots) { -term } else { term };
            *acc = acc.clone() + t;
            return;
        }
        let dim = used.len();
        for a in 0..dim {
            if used[a] {
                continue;
            }
            for b in a + 1..dim {
                if used[b] {
                    continue;
                }
                let w = forms[e][a][b].clone();
                if w.is_zero() {
                    continue;
                }
                used[a] = true;
                used[b] = true;
                slots.push(a);
                slots.push(b);
                rec(forms, e + 1, used, slots, acc, term.clone() * w);
                slots.truncate(slots.len() - 2);
                used[a] = false;
                used[b] = false;
            }
        }
    }
    let mut acc = T::zero();
    rec(forms, 0, &mut used, &mut slots, &mut acc, T::one());
    acc
}

/// The 2-form `u·(J_a × J_b)` (numerator of `φ^*ω`) for an edge whose
/// difference vector `u` has Jacobian columns `jac[a]`.
fn edge_form_numerator<T>(u: &[T; 3], jac: &[[T; 3]]) -> Vec<Vec<T>>
where
    T: Clone + Zero + std::ops::Neg<Output = T> + std::ops::Mul<Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let n = jac.len();
    let mut m = vec![vec![T::zero(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let ja = &jac[a];
            let jb = &jac[b];
            let c = [
                ja[1].clone() * jb[2].clone() - ja[2].clone() * jb[1].clone(),
                ja[2].clone() * jb[0].clone() - ja[0].clone() * jb[2].clone(),
                ja[0].clone() * jb[1].clone() - ja[1].clone() * jb[0].clone(),
            ];
            m[a][b] = u[0].clone() * c[0].clone() + u[1].clone() * c[1].clone() + u[2].clone() * c[2].clone();
        }
    }
    m
}

/// Jacobian columns of `u = head - tail` for an edge, in a configuration
/// space with the given number of leg parameters followed by free vertices.
fn edge_jacobian<T: Clone + Zero + One + std::ops::Neg<Output = T>>(
    dim: usize,
    legs: usize,
    tail: Vertex,
    head: Vertex,
    leg_velocity: &dyn Fn(usize) -> [T; 3],
) -> Vec<[T; 3]> {
    let mut jac = vec![[T::zero(), T::zero(), T::zero()]; dim];
    let mut put = |v: Vertex, sign: bool| match v {
        Vertex::Leg(k) => {
            let t = leg_velocity(k);
            jac[k] = if sign { t } else { [-t[0].clone(), -t[1].clone(), -t[2].clone()] };
        }
        Vertex::Free(f) => {
            for a in 0..3 {
                let mut e = [T::zero(), T::zero(), T::zero()];
                e[a] = if sign { T::one() } else { -T::one() };
                jac[legs + 3 * f + a] = e;
            }
        }
    };
    put(head, true);
    put(tail, false);
    jac
}

#[derive(Clone, Copy, Debug)]
enum Vertex {
    Leg(usize),
    Free(usize),
}

/// Density of `φ_Γ^*(ω ∧ ... ∧ ω)` at a configuration, with coordinates
/// ordered as the leg parameters followed by the free vertex coordinates.
fn graph_density_f64(legs: &[(Vec3, Vec3)], free: &[Vec3], edges: &[(Vertex, Vertex)]) -> f64 {
    let dim = legs.len() + 3 * free.len();
    let pos = |v: Vertex| match v {
        Vertex::Leg(k) => legs[k].0,
        Vertex::Free(f) => free[f],
    };
    let vel = |k: usize| legs[k].1;
    let mut forms = Vec::with_capacity(edges.len());
    let mut denom = 1.0;
    for &(tail, head) in edges {
        let u = sub(pos(head), pos(tail));
        let r = norm(u);
        denom *= GaussForm::TOTAL_AREA * r * r * r;
        let jac = edge_jacobian::<f64>(dim, legs.len(), tail, head, &vel);
        forms.push(edge_form_numerator(&u, &jac));
    }
    wedge_top(&forms) / denom
}

const X_EDGES: [(Vertex, Vertex); 2] = [(Vertex::Leg(0), Vertex::Leg(1)), (Vertex::Leg(2), Vertex::Leg(3))];
const Y_EDGES: [(Vertex, Vertex); 3] =
    [(Vertex::Leg(0), Vertex::Free(0)), (Vertex::Leg(1), Vertex::Free(0)), (Vertex::Leg(2), Vertex::Free(0))];
const DOUBLE_EDGES: [(Vertex, Vertex); 4] = [
    (Vertex::Leg(0), Vertex::Free(0)),
    (Vertex::Free(0), Vertex::Free(1)),
    (Vertex::Free(0), Vertex::Free(1)),
    (Vertex::Free(1), Vertex::Leg(1)),
];

/// The `X` integrand. Coordinates are ordered edge by edge, `(t_1, t_3, t_2, t_4)`.
pub fn x_density(legs: &[(Vec3, Vec3); 4]) -> f64 {
    let g13 = chord_density(legs[0].0, legs[0].1, legs[2].0, legs[2].1);
    let g24 = chord_density(legs[1].0, legs[1].1, legs[3].0, legs[3].1);
    g13 * g24
}

/// The `Y` integrand in the orientation `dt_1 dt_2 dt_3 d^3z`.
pub fn y_density(legs: &[(Vec3, Vec3); 3], z: Vec3) -> f64 {
    let mut w = [[0.0; 3]; 3];
    let mut denom = 1.0;
    for (wi, (x, t)) in w.iter_mut().zip(legs) {
        let v = sub(z, *x);
        let r = norm(v);
        denom *= GaussForm::TOTAL_AREA * r * r * r;
        *wi = cross(*t, v);
    }
    -dot(w[0], cross(w[1], w[2])) / denom
}

/// Same densities through the general wedge evaluator.
pub fn x_density_generic(legs: &[(Vec3, Vec3); 4]) -> f64 {
    graph_density_f64(&[legs[0], legs[2], legs[1], legs[3]], &[], &X_EDGES)
}

pub fn y_density_generic(legs: &[(Vec3, Vec3); 3], z: Vec3) -> f64 {
    graph_density_f64(legs, &[z], &Y_EDGES)
}

pub fn double_edge_density(legs: &[(Vec3, Vec3); 2], u: Vec3, v: Vec3) -> f64 {
    graph_density_f64(legs, &[u, v], &DOUBLE_EDGES)
}

fn to_rational(x: f64) -> Rational {
    Rational::from_float(x).expect("finite coordinate")
}

/// Exact numerator of the double-edge density at a configuration whose
/// coordinates are read as exact binary rationals.
pub fn double_edge_numerator_exact(legs: &[(Vec3, Vec3); 2], u: Vec3, v: Vec3) -> Rational {
    let q = |p: Vec3| [to_rational(p[0]), to_rational(p[1]), to_rational(p[2])];
    let leg_q: Vec<([Rational; 3], [Rational; 3])> = legs.iter().map(|(x, t)| (q(*x), q(*t))).collect();
    let free = [q(u), q(v)];
    let dim = 2 + 6;
    let pos = |w: Vertex| match w {
        Vertex::Leg(k) => leg_q[k].0.clone(),
        Vertex::Free(f) => free[f].clone(),
    };
    let vel = |k: usize| leg_q[k].1.clone();
    let forms: Vec<Vec<Vec<Rational>>> = DOUBLE_EDGES
        .iter()
        .map(|&(tail, head)| {
            let (h, t) = (pos(head), pos(tail));
            let d = [&h[0] - &t[0], &h[1] - &t[1], &h[2] - &t[2]];
            let jac = edge_jacobian::<Rational>(dim, 2, tail, head, &vel);
            edge_form_numerator(&d, &jac)
        })
        .collect();
    wedge_top(&forms)
}

/// Sampling law for a free vertex: a heavy-tailed far part centred on the
/// knot plus `1/r^2` clouds around each leg.
#[derive(Clone, Copy, Debug)]
struct SpaceSampler {
    center: Vec3,
    far_scale: f64,
    near_radius: f64,
    far_weight: f64,
}

impl SpaceSampler {
    fn for_knot(c: &Component) -> Self {
        let n = c.len() as f64;
        let center = scale(c.points.iter().fold([0.0; 3], |a, &p| add(a, p)), 1.0 / n);
        let radius = c.points.iter().map(|&p| norm(sub(p, center))).fold(0.0, f64::max);
        SpaceSampler { center, far_scale: radius, near_radius: 0.5 * radius, far_weight: 0.4 }
    }

    fn unit_ball(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let y = [rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0];
            if dot(y, y) < 1.0 {
                return y;
            }
        }
    }

    fn unit_sphere(rng: &mut ChaCha8Rng) -> Vec3 {
        let y = Self::unit_ball(rng);
        let n = norm(y);
        if n < 1e-12 {
            [0.0, 0.0, 1.0]
        } else {
            scale(y, 1.0 / n)
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng, anchors: &[Vec3]) -> Vec3 {
        if rng.random::<f64>() < self.far_weight {
            let y = Self::unit_ball(rng);
            let rho = norm(y);
            add(self.center, scale(y, self.far_scale / (1.0 - rho)))
        } else {
            let j = ((rng.random::<f64>() * anchors.len() as f64) as usize).min(anchors.len() - 1);
            let r = self.near_radius * rng.random::<f64>();
            add(anchors[j], scale(Self::unit_sphere(rng), r))
        }
    }

    fn density(&self, z: Vec3, anchors: &[Vec3]) -> f64 {
        let r = norm(sub(z, self.center));
        let far = 3.0 / (4.0 * PI) * self.far_scale / (self.far_scale + r).powi(4);
        let near: f64 = anchors
            .iter()
            .map(|&a| {
                let d = norm(sub(z, a));
                if d < self.near_radius {
                    1.0 / (4.0 * PI * self.near_radius * d * d)
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            / anchors.len() as f64;
        self.far_weight * far + (1.0 - self.far_weight) * near
    }
}

fn sorted_uniforms<const K: usize>(rng: &mut ChaCha8Rng) -> [f64; K] {
    let mut t = [0.0; K];
    for x in t.iter_mut() {
        *x = rng.random();
    }
    t.sort_by(f64::total_cmp);
    t
}

/// Smallest cyclic gap between sorted parameters in `[0, 1)`.
fn min_cyclic_gap(t: &[f64]) -> f64 {
    let n = t.len();
    let mut g = t[0] + 1.0 - t[n - 1];
    for w in t.windows(2) {
        g = g.min(w[1] - w[0]);
    }
    g
}

/// An estimate with its collar-free and collar-halved versions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CollarEstimate {
    /// Extrapolated to a vanishing collar from `δ` and `δ/2`.
    pub value: IntegralEstimate,
    /// Collar of width `δ` removed.
    pub raw: IntegralEstimate,
    /// Collar of width `δ/2` removed.
    pub half: IntegralEstimate,
    pub delta_cut: f64,
}

fn collar_estimate(accs: &[Accumulator], seed: u64, delta: f64, factor: f64) -> CollarEstimate {
    let est = |a: &Accumulator| IntegralEstimate::from_accumulator(a, seed).scaled(factor);
    CollarEstimate { raw: est(&accs[0]), half: est(&accs[1]), value: est(&accs[2]), delta_cut: delta }
}

fn push_collared(accs: &mut [Accumulator], f: f64, gap: f64, delta: f64) {
    let raw = if gap < delta { 0.0 } else { f };
    let half = if gap < delta / 2.0 { 0.0 } else { f };
    accs[0].push(raw);
    accs[1].push(half);
    accs[2].push(2.0 * half - raw);
}

fn single_knot(link: &PolygonalLink) -> Result<&Component> {
    if link.len() != 1 {
        return Err(Error::InvalidLink(format!("expected a knot, got {} components", link.len())));
    }
    link.component(0)
}

/// `W_X / 4 = ∫_{t_1<t_2<t_3<t_4} φ_13^*ω ∧ φ_24^*ω`.
pub fn wx_quarter(link: &PolygonalLink, cfg: &McConfig, delta_cut: f64) -> Result<CollarEstimate> {
    let p = ArcParam::new(single_knot(link)?);
    let accs = mc::run_vec(cfg, 3, |rng, accs| {
        let t: [f64; 4] = sorted_uniforms(rng);
        let legs = t.map(|ti| {
            let (x, v, _) = p.at(ti);
            (x, v)
        });
        push_collared(accs, x_density(&legs), min_cyclic_gap(&t), delta_cut);
    })?;
    Ok(collar_estimate(&accs, cfg.seed, delta_cut, 1.0 / 24.0))
}

/// `W_Y / 3 = ∫_{t_1<t_2<t_3} ∫_{R^3} φ_Y^*(ω ∧ ω ∧ ω)`.
pub fn wy_third(link: &PolygonalLink, cfg: &McConfig, delta_cut: f64) -> Result<CollarEstimate> {
    let knot = single_knot(link)?;
    let p = ArcParam::new(knot);
    let sampler = SpaceSampler::for_knot(knot);
    let accs = mc::run_vec(cfg, 3, |rng, accs| {
        let t: [f64; 3] = sorted_uniforms(rng);
        let legs = t.map(|ti| {
            let (x, v, _) = p.at(ti);
            (x, v)
        });
        let anchors = [legs[0].0, legs[1].0, legs[2].0];
        let z = sampler.sample(rng, &anchors);
        let q = sampler.density(z, &anchors);
        let f = if q > 0.0 { y_density(&legs, z) / q } else { 0.0 };
        push_collared(accs, if f.is_finite() { f } else { 0.0 }, min_cyclic_gap(&t), delta_cut);
    })?;
    Ok(collar_estimate(&accs, cfg.seed, delta_cut, 1.0 / 6.0))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct V2Estimate {
    pub v2: IntegralEstimate,
    pub wx_quarter: CollarEstimate,
    pub wy_third: CollarEstimate,
}

/// `v2 = W_X/4 + W_Y/3` with independent sample streams for the two terms.
pub fn v2_integral(link: &PolygonalLink, cfg: &McConfig, delta_cut: f64) -> Result<V2Estimate> {
    let knot = single_knot(link)?;
    if knot.framing.is_some() {
        let sl = crate::knot::writhe_pushoff_selflinking(link, 0)?;
        if sl != 0 {
            return Err(Error::InvalidLink(format!("framing has self-linking {sl}; normalise it to zero first")));
        }
    }
    let x = wx_quarter(link, cfg, delta_cut)?;
    let ycfg = McConfig { seed: cfg.seed ^ 0x9e37_79b9_7f4a_7c15, ..cfg.clone() };
    let y = wy_third(link, &ycfg, delta_cut)?;
    let value = x.value.value + y.value.value;
    let std_error = x.value.std_error.hypot(y.value.std_error);
    Ok(V2Estimate {
        v2: IntegralEstimate { value, std_error, samples: x.value.samples + y.value.samples, seed: cfg.seed },
        wx_quarter: x,
        wy_third: y,
    })
}

/// Weight of the graph with two legs joined through a double edge, sampled
/// like the `Y` graph with both free vertices near the legs or far away.
pub fn double_edge_weight(link: &PolygonalLink, cfg: &McConfig) -> Result<IntegralEstimate> {
    let knot = single_knot(link)?;
    let p = ArcParam::new(knot);
    let sampler = SpaceSampler::for_knot(knot);
    let acc = mc::run(cfg, |rng, acc| {
        let t: [f64; 2] = sorted_uniforms(rng);
        let legs = t.map(|ti| {
            let (x, v, _) = p.at(ti);
            (x, v)
        });
        let anchors = [legs[0].0, legs[1].0];
        let u = sampler.sample(rng, &anchors);
        let v = sampler.sample(rng, &anchors);
        let q = sampler.density(u, &anchors) * sampler.density(v, &anchors) * 2.0;
        let f = double_edge_density(&legs, u, v) / q;
        acc.push(if f.is_finite() { f } else { 0.0 });
    })?;
    Ok(IntegralEstimate::from_accumulator(&acc, cfg.seed))
}

/// Draws configurations of the double-edge graph and checks that the
/// numerator of its density vanishes in exact arithmetic at each of them.
pub fn double_edge_vanishes_exactly(link: &PolygonalLink, samples: usize, seed: u64) -> Result<bool> {
    use rand::SeedableRng;
    let knot = single_knot(link)?;
    let p = ArcParam::new(knot);
    let sampler = SpaceSampler::for_knot(knot);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let t: [f64; 2] = sorted_uniforms(&mut rng);
        let legs = t.map(|ti| {
            let (x, v, _) = p.at(ti);
            (x, v)
        });
        let anchors = [legs[0].0, legs[1].0];
        let u = sampler.sample(&mut rng, &anchors);
        let v = sampler.sample(&mut rng, &anchors);
        if !double_edge_numerator_exact(&legs, u, v).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Monte Carlo of `∫ ψ^*ω` over a star-shaped deformed sphere
/// `ψ(θ, φ) = r(θ, φ)(sin θ cos φ, sin θ sin φ, cos θ)` around the origin.
/// The exact value is its degree, 1.
pub fn sphere_normalization(cfg: &McConfig, wobble: f64) -> Result<IntegralEstimate> {
    let r = |th: f64, ph: f64| 1.0 + wobble * (3.0 * th).sin() * (2.0 * ph).cos();
    let point = |th: f64, ph: f64| {
        let rr = r(th, ph);
        [rr * th.sin() * ph.cos(), rr * th.sin() * ph.sin(), rr * th.cos()]
    };
    let h = 1e-6;
    let acc = mc::run(cfg, |rng, acc| {
        let (th, ph) = (PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let p = point(th, ph);
        let pt = scale(sub(point(th + h, ph), point(th - h, ph)), 0.5 / h);
        let pp = scale(sub(point(th, ph + h), point(th, ph - h)), 0.5 / h);
        acc.push(2.0 * PI * PI * GaussForm.eval(p, pt, pp));
    })?;
    Ok(IntegralEstimate::from_accumulator(&acc, cfg.seed))
}
