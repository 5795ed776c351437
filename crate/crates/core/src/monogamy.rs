//! Numerical re-verification of the monogamy relation on the Schmidt family
//! `x|000⟩ + y|100⟩ + z|101⟩ + h|110⟩`, x, y, z, h ≥ 0, x² + y² + z² + h² = 1.
//!
//! The quantity of interest is
//!
//! ```text
//! f(x, y, z, h) = H(A→BC) − (H(A→B) + H(A→C) + H(B→C))
//! ```
//!
//! evaluated through the full steering pipeline ([`f_pipeline`]). Everything
//! else here is cross-checking machinery:
//!
//! * [`closed_form_f`]: an independent closed form of f for this family.
//! * [`printed_closed_form_f`], [`fgwv`], [`printed_boundary_f`]: the
//!   published closed forms, kept verbatim so that their disagreement with
//!   the pipeline can be measured rather than assumed.
//! * [`minimize_f`]: multi-start search for local minima and for Lagrange
//!   critical points (stationary points of f on the sphere, which include
//!   saddles) in the open octant, on each face and on each edge.
//! * [`verify_monogamy`]: dense quasi-random sampling of the octant.
//!
//! A Z gate on any single qubit flips the sign of some of the amplitudes
//! without changing any H value, so f is even in every coordinate. The
//! numerical routines use this freely: they work on arbitrary real 4-vectors
//! and fold back into the octant with absolute values.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::state::{schmidt_amplitudes, SchmidtParams};
use crate::steering::MonogamyTerms;
use crate::tolerance::RADICAND_CLAMP;

type Point = [f64; 4];

/// Coordinate names in parameter order.
pub const COORDINATES: [&str; 4] = ["x", "y", "z", "h"];

/// Values of the sign-region quantities within this distance of zero put a
/// point on an internal boundary.
pub const REGION_ZERO: f64 = 1e-12;

/// Monogamy holds numerically when every f value is at least this.
pub const NONNEGATIVITY: f64 = -1e-9;

// ---------------------------------------------------------------------------
// f and its closed forms
// ---------------------------------------------------------------------------

/// f through the steering pipeline: build the state, take its Pauli tensor,
/// and evaluate the four H values (see [`MonogamyTerms::from_pure`]).
pub fn f_pipeline(p: &SchmidtParams) -> f64 {
    f_signed(p.to_array())
}

/// f at the normalization of an arbitrary nonzero real vector.
pub fn f_signed(c: Point) -> f64 {
    let t =
        MonogamyTerms::from_pure(&schmidt_amplitudes(c)).expect("Schmidt states have three qubits");
    t.h_a_bc - t.h_tot()
}

/// Closed form of f for this family.
///
/// With `D_a = x²(z²+h²)`, `D_b = h²(x²+z²)`, `D_c = z²(x²+h²)` the
/// single-qubit purities are `1 − 2D` and the A|BC correlation matrix has
/// trace norm `2√D_a + 2D_a`. Each pair correlation matrix splits into a
/// 2×2 block and a 1×1 block; the trace norm of a 2×2 block `[[a,b],[c,d]]`
/// is `√(a²+b²+c²+d²+2|ad−bc|)`, which yields the `pn` terms below.
pub fn closed_form_f(p: &SchmidtParams) -> f64 {
    let [x, y, z, h] = p.to_array();
    let (x2, y2, z2, h2) = (x * x, y * y, z * z, h * h);
    let da = x2 * (z2 + h2);
    let db = h2 * (x2 + z2);
    let dc = z2 * (x2 + h2);
    let u = 1.0 - 2.0 * y2;
    let pn = |p: f64, q: f64| {
        let r = u * u + 4.0 * y2 * (p * p + q * q) + 4.0 * p * p * q * q + 4.0 * p * q;
        p * q * (1.0 + r.max(0.0).sqrt())
    };
    let h_a_bc = 2.0 * da.sqrt() + 2.0 * da - (2.0 * da * (1.0 + 2.0 * da)).sqrt();
    let h_ab = pn(x, h) - ((1.0 + 2.0 * da) * 2.0 * db).sqrt();
    let h_ac = pn(x, z) - ((1.0 + 2.0 * da) * 2.0 * dc).sqrt();
    let h_bc = pn(z, h) - ((1.0 + 2.0 * db) * 2.0 * dc).sqrt();
    h_a_bc - (h_ab + h_ac + h_bc)
}

/// The four auxiliary quantities of the published closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fgwv {
    pub f: f64,
    pub g: f64,
    pub w: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FgwvError {
    #[error("radicand of {which} is {value:e}, below the clamp threshold")]
    NegativeRadicand { which: &'static str, value: f64 },
}

fn printed_radicands(x: f64, y: f64, z: f64, h: f64) -> (f64, f64) {
    let (y2, y4) = (y * y, y.powi(4));
    let rg = h
        * h
        * (1.0 + 4.0 * y4
            - 4.0 * y2 * (1.0 + 2.0 * x * h + h * h)
            - 4.0 * h * (x + (-1.0 + z * z) * h + h.powi(3)));
    let rv = z
        * z
        * (1.0 + 4.0 * y4
            - 4.0 * y2 * (1.0 + 2.0 * x * z + z * z)
            - 4.0 * z * (x + (-1.0 + h * h) * z + z.powi(3)));
    (rg, rv)
}

fn printed_fw(x: f64, y: f64, z: f64, h: f64) -> (f64, f64) {
    let y2 = y * y;
    (
        x * (h - 2.0 * y2 * h + 2.0 * x * x * h),
        x * (z - 2.0 * y2 * z + 2.0 * x * x * z),
    )
}

/// `f, g, w, v` exactly as published. Radicands in `[−1e-12, 0)` are clamped
/// to zero; anything more negative is reported.
pub fn fgwv(p: &SchmidtParams) -> Result<Fgwv, FgwvError> {
    let [x, y, z, h] = p.to_array();
    let (rg, rv) = printed_radicands(x, y, z, h);
    for (which, value) in [("g", rg), ("v", rv)] {
        if value < RADICAND_CLAMP {
            return Err(FgwvError::NegativeRadicand { which, value });
        }
    }
    let (f, w) = printed_fw(x, y, z, h);
    Ok(Fgwv {
        f,
        g: x * rg.max(0.0).sqrt(),
        w,
        v: x * rv.max(0.0).sqrt(),
    })
}

/// The published long closed form of f, with every radicand clamped at zero
/// so that it can be evaluated anywhere.
pub fn printed_closed_form_f(p: &SchmidtParams) -> f64 {
    let [x, y, z, h] = p.to_array();
    let s = |v: f64| v.max(0.0).sqrt();
    let (rg, rv) = printed_radicands(x, y, z, h);
    let (f, w) = printed_fw(x, y, z, h);
    let (g, v) = (x * s(rg), x * s(rv));
    let a = 1.0 + 2.0 * x * x * (z * z + h * h);
    SQRT_2 * z * s(a * (x * x + h * h)) - x * h - z * (x + h)
        + SQRT_2 * h * s(a * (x * x + z * z))
        + 2.0 * x * s(z * z + h * h)
        + 2.0 * x * x * (z * z + h * h)
        - z * h * s(8.0 * z * h + (-1.0 + 2.0 * y * y + 2.0 * z * h).powi(2))
        + SQRT_2 * z * s((1.0 + 2.0 * h * h * (z * z + x * x)) * (x * x + h * h))
        - SQRT_2 * x * s(a * (z * z + h * h))
        - 0.5 * ((f + g).abs() + (f - g).abs() + (w + v).abs() + (w - v).abs())
}

// ---------------------------------------------------------------------------
// sign regions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Signs of `(f+g, f−g, w+v, w−v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignRegion(pub [Sign; 4]);

impl SignRegion {
    pub const ALL_PLUS: SignRegion = SignRegion([Sign::Plus; 4]);

    /// All 16 regions, `(+,+,+,+)` first.
    pub fn all() -> Vec<SignRegion> {
        (0..16u8)
            .map(|bits| {
                SignRegion(std::array::from_fn(|i| {
                    if bits >> (3 - i) & 1 == 0 {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    }
                }))
            })
            .collect()
    }
}

impl fmt::Display for SignRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0.map(Sign::symbol);
        write!(f, "({a},{b},{c},{d})")
    }
}

impl Serialize for SignRegion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Where a point sits relative to the 16 sign regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionMembership {
    Region(SignRegion),
    /// One of the four quantities is within [`REGION_ZERO`] of zero.
    Boundary,
    /// A published radicand is negative beyond rounding.
    Undefined,
}

impl fmt::Display for RegionMembership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionMembership::Region(r) => r.fmt(f),
            RegionMembership::Boundary => f.write_str("boundary"),
            RegionMembership::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for RegionMembership {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn sign_region(p: &SchmidtParams) -> RegionMembership {
    let Ok(q) = fgwv(p) else {
        return RegionMembership::Undefined;
    };
    let vals = [q.f + q.g, q.f - q.g, q.w + q.v, q.w - q.v];
    if vals.iter().any(|v| v.abs() <= REGION_ZERO) {
        return RegionMembership::Boundary;
    }
    RegionMembership::Region(SignRegion(vals.map(Sign::of)))
}

// ---------------------------------------------------------------------------
// faces of the octant
// ---------------------------------------------------------------------------

/// An external face of the octant: one coordinate pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    X,
    Y,
    Z,
    H,
}

impl Boundary {
    pub const ALL: [Boundary; 4] = [Boundary::X, Boundary::Y, Boundary::Z, Boundary::H];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Boundary> {
        Boundary::ALL.get(i).copied()
    }

    pub fn parse(s: &str) -> Option<Boundary> {
        match s.trim_end_matches("=0") {
            "x" => Some(Boundary::X),
            "y" => Some(Boundary::Y),
            "z" => Some(Boundary::Z),
            "h" => Some(Boundary::H),
            _ => None,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}=0", COORDINATES[self.index()])
    }
}

impl Serialize for Boundary {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BoundaryError {
    #[error("{boundary} form evaluated at a point with {coordinate} = {value:e}")]
    OffBoundary {
        boundary: Boundary,
        coordinate: &'static str,
        value: f64,
    },
}

/// How far a coordinate may be from zero for a boundary form to apply.
const ON_BOUNDARY: f64 = 1e-12;

fn check_on(p: &SchmidtParams, b: Boundary) -> Result<Point, BoundaryError> {
    let c = p.to_array();
    let value = c[b.index()];
    if value.abs() > ON_BOUNDARY {
        return Err(BoundaryError::OffBoundary {
            boundary: b,
            coordinate: COORDINATES[b.index()],
            value,
        });
    }
    Ok(c)
}

/// f restricted to a face, in closed form.
///
/// * x = 0: `√2(2zh + zh√(1+2z²h²)) − 2zh − 2z²h²` (no y dependence).
/// * y = 0: the general closed form with `y = 0`.
/// * z = 0: identically zero.
/// * h = 0: `√2·xz`.
pub fn boundary_f(p: &SchmidtParams, b: Boundary) -> Result<f64, BoundaryError> {
    let [x, _, z, h] = check_on(p, b)?;
    Ok(match b {
        Boundary::X => {
            let zh = z * h;
            SQRT_2 * (2.0 * zh + zh * (1.0 + 2.0 * zh * zh).sqrt()) - 2.0 * zh - 2.0 * zh * zh
        }
        Boundary::Y => closed_form_f(p),
        Boundary::Z => 0.0,
        Boundary::H => SQRT_2 * x * z,
    })
}

/// The published face formulas, verbatim (radicands clamped at zero).
pub fn printed_boundary_f(p: &SchmidtParams, b: Boundary) -> Result<f64, BoundaryError> {
    let [x, y, z, h] = check_on(p, b)?;
    let s = |v: f64| v.max(0.0).sqrt();
    Ok(match b {
        Boundary::X => {
            SQRT_2 * (2.0 * z * h + z * h * s(1.0 + 2.0 * z * z * h * h))
                - h * z
                    * (1.0
                        + s(4.0 * y.powi(4)
                            + (1.0 + 2.0 * h * z).powi(2)
                            + y * y * (-4.0 + 8.0 * h * z)))
        }
        Boundary::Y => {
            let (x2, h2) = (x * x, h * h);
            -4.0 * x2
                + 4.0 * x.powi(4)
                + SQRT_2
                    * z
                    * (s((-1.0 - 2.0 * h2 + 2.0 * h2 * h2) * (-1.0 + z * z))
                        + s((-1.0 - 2.0 * x2 + 2.0 * x2 * x2) * (-1.0 + z * z)))
                + x * (2.0 * s(1.0 - x2)
                    - SQRT_2 * s(1.0 + x2 - 4.0 * x.powi(4) + 2.0 * x.powi(6))
                    - 2.0 * z)
                + h * (-2.0 * x + SQRT_2 * s((-1.0 + h2) * (-1.0 - 2.0 * x2 + 2.0 * x2 * x2))
                    - z * (1.0 + s((1.0 + 2.0 * h * z).powi(2))))
        }
        Boundary::Z => {
            let f1 = x * (h + 2.0 * h * h * x - 2.0 * h * y * y);
            let g1 = x * s(h
                * h
                * (1.0
                    - 4.0 * h * (-h + h.powi(3) + x)
                    - 4.0 * (1.0 + h * h + 2.0 * h * x) * y * y
                    + 4.0 * y.powi(4)));
            h * x + 2.0 * h * h * x * x - 0.5 * ((f1 + g1).abs() + (f1 - g1).abs())
        }
        Boundary::H => {
            let w1 = 2.0 * x * x * z * z + x * (z - 2.0 * y * y * z);
            let v1 = x * s(z
                * z
                * (1.0 + 4.0 * y.powi(4)
                    - 4.0 * y * y * (1.0 + 2.0 * x * z + z * z)
                    - 4.0 * z * (x - z + z.powi(3))));
            (SQRT_2 + 1.0) * z * x + 2.0 * z * z * x * x - 0.5 * ((w1 + v1).abs() + (w1 - v1).abs())
        }
    })
}

// ---------------------------------------------------------------------------
// quasi-random points on the octant
// ---------------------------------------------------------------------------

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut scale = inv;
    while n > 0 {
        out += (n % base) as f64 * scale;
        n /= base;
        scale *= inv;
    }
    inv = out;
    inv
}

/// Halton sequence with a seeded Cranley–Patterson rotation.
#[derive(Debug, Clone)]
pub struct OctantSampler {
    shift: [f64; 3],
}

const HALTON_BASES: [u64; 3] = [2, 3, 5];

impl OctantSampler {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        OctantSampler {
            shift: std::array::from_fn(|_| rng.gen::<f64>()),
        }
    }

    fn unit(&self, index: u64, dims: usize) -> [f64; 3] {
        std::array::from_fn(|d| {
            if d < dims {
                (radical_inverse(index + 1, HALTON_BASES[d]) + self.shift[d]).fract()
            } else {
                0.0
            }
        })
    }

    /// Point `index`, uniformly distributed on the nonnegative octant of S³.
    pub fn point(&self, index: u64) -> Point {
        let [u1, u2, u3] = self.unit(index, 3);
        let (r1, r2) = ((1.0 - u1).sqrt(), u1.sqrt());
        let (a, b) = (FRAC_PI_2 * u2, FRAC_PI_2 * u3);
        [r1 * a.cos(), r1 * a.sin(), r2 * b.cos(), r2 * b.sin()]
    }

    /// Point `index`, uniformly distributed on the octant of the given face.
    pub fn face_point(&self, index: u64, face: Boundary) -> Point {
        let [w, u, _] = self.unit(index, 2);
        let r = (1.0 - w * w).max(0.0).sqrt();
        let a = FRAC_PI_2 * u;
        let vals = [r * a.cos(), r * a.sin(), w];
        let mut p = [0.0; 4];
        let mut it = vals.into_iter();
        for (k, slot) in p.iter_mut().enumerate() {
            if k != face.index() {
                *slot = it.next().unwrap();
            }
        }
        p
    }
}

// ---------------------------------------------------------------------------
// local search on the sphere
// ---------------------------------------------------------------------------

/// Step of the central-difference gradient.
const GRADIENT_STEP: f64 = 1e-6;
/// Step of the second-difference Hessian.
const HESSIAN_STEP: f64 = 1e-4;
/// A search that can no longer make progress is accepted as converged if
/// its gradient norm is below this (the finite-difference noise floor is
/// around 1e-10).
const STALL_GRADIENT: f64 = 1e-6;
/// Coordinates below this are snapped to zero.
const SNAP: f64 = 1e-9;
/// Longest step in the tangent space.
const MAX_STEP: f64 = 0.2;
/// One-sided inward slopes below this count as zero when deciding whether a
/// point with a vanishing coordinate is a genuine boundary point.
pub const STATIONARITY: f64 = 1e-5;
/// Distance below which two critical points are the same point.
pub const DEDUP_RADIUS: f64 = 1e-6;

fn norm(p: &Point) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn normalize(p: Point) -> Point {
    let n = norm(&p);
    p.map(|v| v / n)
}

fn distance(a: &Point, b: &Point) -> f64 {
    (0..4).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

/// Folds into the octant, snaps tiny coordinates to zero and normalizes.
fn canonical(p: Point) -> Point {
    let mut q = normalize(p.map(f64::abs));
    for v in &mut q {
        if *v < SNAP {
            *v = 0.0;
        }
    }
    normalize(q)
}

fn axpy(p: &Point, t: f64, d: &Point) -> Point {
    std::array::from_fn(|k| p[k] + t * d[k])
}

/// Orthonormal basis of the tangent space at `p` of the sphere restricted to
/// the `free` coordinates.
fn tangent_basis(p: &Point, free: &[usize]) -> Vec<Point> {
    let mut basis: Vec<Point> = Vec::with_capacity(free.len());
    let mut all = vec![*p];
    for &k in free {
        if basis.len() + 1 == free.len() {
            break;
        }
        let mut v = [0.0; 4];
        v[k] = 1.0;
        for b in &all {
            let dot: f64 = (0..4).map(|i| v[i] * b[i]).sum();
            v = axpy(&v, -dot, b);
        }
        let n = norm(&v);
        if n > 1e-8 {
            let v = v.map(|c| c / n);
            basis.push(v);
            all.push(v);
        }
    }
    basis
}

fn chart_gradient(p: &Point, basis: &[Point]) -> Vec<f64> {
    basis
        .iter()
        .map(|b| {
            (f_signed(axpy(p, GRADIENT_STEP, b)) - f_signed(axpy(p, -GRADIENT_STEP, b)))
                / (2.0 * GRADIENT_STEP)
        })
        .collect()
}

fn chart_hessian(p: &Point, basis: &[Point]) -> DMatrix<f64> {
    let m = basis.len();
    let e = HESSIAN_STEP;
    let f0 = f_signed(*p);
    let mut hess = DMatrix::zeros(m, m);
    for i in 0..m {
        let plus = f_signed(axpy(p, e, &basis[i]));
        let minus = f_signed(axpy(p, -e, &basis[i]));
        hess[(i, i)] = (plus - 2.0 * f0 + minus) / (e * e);
        for j in 0..i {
            let d_pp = axpy(&axpy(p, e, &basis[i]), e, &basis[j]);
            let d_pm = axpy(&axpy(p, e, &basis[i]), -e, &basis[j]);
            let d_mp = axpy(&axpy(p, -e, &basis[i]), e, &basis[j]);
            let d_mm = axpy(&axpy(p, -e, &basis[i]), -e, &basis[j]);
            let v =
                (f_signed(d_pp) - f_signed(d_pm) - f_signed(d_mp) + f_signed(d_mm)) / (4.0 * e * e);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

fn vnorm(g: &[f64]) -> f64 {
    g.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn free_coordinates(p: &Point) -> Vec<usize> {
    (0..4).filter(|&k| p[k] != 0.0).collect()
}

#[derive(Debug, Clone, Copy)]
struct Converged {
    point: Point,
    gradient_norm: f64,
}

/// Damped Newton iteration on the tangent gradient: converges to
/// stationary points of any index, not only minima.
fn newton_stationary(start: Point, tol: f64, max_iter: usize) -> Option<Converged> {
    let mut p = canonical(start);
    let free = free_coordinates(&p);
    if free.len() < 2 {
        return Some(Converged {
            point: p,
            gradient_norm: 0.0,
        });
    }
    let mut basis = tangent_basis(&p, &free);
    let mut g = chart_gradient(&p, &basis);
    let mut gn = vnorm(&g);
    for _ in 0..max_iter {
        if gn <= tol {
            return Some(Converged {
                point: p,
                gradient_norm: gn,
            });
        }
        let eig = SymmetricEigen::new(chart_hessian(&p, &basis));
        let mut step = vec![0.0; basis.len()];
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            let lambda = if lambda.abs() < 1e-8 {
                1e-8f64.copysign(lambda)
            } else {
                lambda
            };
            let coef = -(0..g.len()).map(|i| v[i] * g[i]).sum::<f64>() / lambda;
            for i in 0..step.len() {
                step[i] += coef * v[i];
            }
        }
        let sn = vnorm(&step);
        if sn > MAX_STEP {
            step.iter_mut().for_each(|s| *s *= MAX_STEP / sn);
        }
        let mut dir = [0.0; 4];
        for (s, b) in step.iter().zip(&basis) {
            dir = axpy(&dir, *s, b);
        }
        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..12 {
            let q = normalize(axpy(&p, t, &dir)).map(f64::abs);
            if q.iter().zip(&p).any(|(a, b)| (*a == 0.0) != (*b == 0.0)) {
                t *= 0.5;
                continue;
            }
            let qb = tangent_basis(&q, &free);
            let qg = chart_gradient(&q, &qb);
            let qn = vnorm(&qg);
            if qn < gn {
                p = q;
                basis = qb;
                g = qg;
                gn = qn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (gn <= tol.max(STALL_GRADIENT)).then_some(Converged {
        point: p,
        gradient_norm: gn,
    })
}

/// One-sided slope of f when coordinate `k` (currently zero) is moved
/// into the octant.
fn inward_slope(p: &Point, k: usize) -> f64 {
    let mut q = *p;
    q[k] += GRADIENT_STEP;
    (f_signed(q) - f_signed(*p)) / GRADIENT_STEP
}

/// Projected gradient descent on the octant with an active set of zero
/// coordinates. Returns a local minimum.
fn projected_descent(start: Point, tol: f64, max_iter: usize) -> Option<Converged> {
    let mut p = canonical(start);
    let mut fp = f_signed(p);
    let mut t: f64 = 1.0;
    let mut releases = 0;
    for _ in 0..max_iter {
        // free a pinned coordinate if f decreases when moving inward
        let mut released = false;
        if releases < 8 {
            for k in 0..4 {
                if p[k] == 0.0 && inward_slope(&p, k) < -STATIONARITY {
                    p[k] = 1e-6;
                    p = normalize(p);
                    fp = f_signed(p);
                    released = true;
                    releases += 1;
                    break;
                }
            }
        }
        let free = free_coordinates(&p);
        if free.len() < 2 {
            return Some(Converged {
                point: p,
                gradient_norm: 0.0,
            });
        }
        let basis = tangent_basis(&p, &free);
        let g = chart_gradient(&p, &basis);
        let gn = vnorm(&g);
        if gn <= tol && !released {
            return Some(Converged {
                point: p,
                gradient_norm: gn,
            });
        }
        let mut dir = [0.0; 4];
        for (gi, b) in g.iter().zip(&basis) {
            dir = axpy(&dir, -gi, b);
        }
        t = (2.0 * t).min(MAX_STEP / gn.max(1e-300));
        let mut accepted = false;
        for _ in 0..40 {
            let mut q = axpy(&p, t, &dir);
            for v in &mut q {
                if *v < SNAP {
                    *v = 0.0;
                }
            }
            let q = normalize(q);
            let fq = f_signed(q);
            if fq <= fp - 1e-4 * gn * distance(&p, &q) && q != p {
                p = q;
                fp = fq;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return (gn <= tol.max(STALL_GRADIENT)).then_some(Converged {
                point: p,
                gradient_norm: gn,
            });
        }
    }
    None
}

// ---------------------------------------------------------------------------
// critical points
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Interior,
    InternalBoundary,
    Face(Boundary),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Interior => f.write_str("interior"),
            Location::InternalBoundary => f.write_str("internal-boundary"),
            Location::Face(b) => b.fmt(f),
        }
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// How a critical point was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    /// End point of a descent: a local minimum on its face.
    LocalMinimum,
    /// Zero of the tangent gradient (minimum, maximum or saddle).
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub params: SchmidtParams,
    pub f_value: f64,
    pub location: Location,
    pub region: RegionMembership,
    pub kind: CriticalKind,
    pub gradient_norm: f64,
    /// Number of converged searches that landed on this point.
    pub multiplicity: usize,
    /// The point stands for a whole face or edge on which f is constant.
    pub flat: Option<Stratum>,
}

impl CriticalPoint {
    pub fn coordinates(&self) -> Point {
        self.params.to_array()
    }
}

/// Labels a point. Points with two or more vanishing coordinates sit on an
/// edge or vertex of the octant and are labeled by their first vanishing
/// coordinate. A point with a single vanishing coordinate is a face point
/// only if f has a nonzero one-sided slope across that face; otherwise f is
/// smooth and even there and the zero is an artefact of the
/// parametrization, so the point counts as interior.
pub fn classify_location(p: &SchmidtParams) -> Location {
    let c = p.to_array();
    let zeros: Vec<Boundary> = Boundary::ALL
        .into_iter()
        .filter(|b| c[b.index()] == 0.0)
        .collect();
    match zeros.as_slice() {
        [] => {}
        [b] => {
            if inward_slope(&c, b.index()).abs() > STATIONARITY {
                return Location::Face(*b);
            }
        }
        [b, ..] => return Location::Face(*b),
    }
    if sign_region(p) == RegionMembership::Boundary && c[0] > 0.0 {
        return Location::InternalBoundary;
    }
    Location::Interior
}

/// A face or edge of the octant, as the set of coordinates pinned to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stratum(u8);

impl Stratum {
    pub fn face(b: Boundary) -> Self {
        Stratum(1 << b.index())
    }

    pub fn edge(a: Boundary, b: Boundary) -> Self {
        Stratum(1 << a.index() | 1 << b.index())
    }

    /// The four faces followed by the six edges.
    pub fn all() -> Vec<Stratum> {
        let mut out: Vec<Stratum> = Boundary::ALL.into_iter().map(Stratum::face).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                out.push(Stratum(1 << i | 1 << j));
            }
        }
        out
    }

    fn pinned(self) -> impl Iterator<Item = usize> {
        (0..4).filter(move |k| self.0 >> k & 1 == 1)
    }

    fn contains(self, p: &Point) -> bool {
        self.pinned().all(|k| p[k] == 0.0)
    }

    fn is_within(self, other: Stratum) -> bool {
        self.0 & other.0 == other.0
    }

    /// Point `index` of a quasi-random cover of the stratum.
    fn sample(self, sampler: &OctantSampler, index: u64) -> Point {
        let pinned: Vec<usize> = self.pinned().collect();
        match pinned.as_slice() {
            [k] => sampler.face_point(index, Boundary::from_index(*k).unwrap()),
            _ => {
                let a = FRAC_PI_2 * (radical_inverse(index + 1, 2) + sampler.shift[0]).fract();
                let mut p = [0.0; 4];
                let free: Vec<usize> = (0..4).filter(|k| !pinned.contains(k)).collect();
                p[free[0]] = a.cos();
                p[free[1]] = a.sin();
                p
            }
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self
            .pinned()
            .map(|k| format!("{}=0", COORDINATES[k]))
            .collect();
        f.write_str(&names.join(","))
    }
}

impl Serialize for Stratum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizeConfig {
    /// Start points in the open octant.
    pub starts: usize,
    /// Convergence tolerance on the tangent gradient norm.
    pub grad_tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    /// Starts per face (capped at `starts`).
    pub boundary_starts: usize,
    /// Starts per edge (capped at `starts`).
    pub edge_starts: usize,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            starts: 2000,
            grad_tol: 1e-10,
            seed: 1,
            max_iter: 200,
            boundary_starts: 400,
            edge_starts: 32,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeResult {
    pub points: Vec<CriticalPoint>,
    /// Searches that neither reached the tolerance nor stalled close to it.
    pub dropped: usize,
    pub searches: usize,
    /// Faces and edges on which f is constant; each is represented by one
    /// point.
    pub flat: Vec<Stratum>,
}

impl MinimizeResult {
    pub fn minimum(&self) -> Option<&CriticalPoint> {
        self.points
            .iter()
            .min_by(|a, b| a.f_value.total_cmp(&b.f_value))
    }
}

/// Samples a face or edge and reports whether f is constant on it.
fn is_flat(stratum: Stratum, sampler: &OctantSampler) -> bool {
    let vals: Vec<f64> = (0..128)
        .map(|i| f_signed(stratum.sample(sampler, i)))
        .collect();
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    hi - lo <= 1e-12
}

struct Candidate {
    point: Point,
    kind: CriticalKind,
    gradient_norm: f64,
}

/// Multi-start search for local minima and Lagrange critical points of f on
/// the octant: descent and Newton stationarity searches from quasi-random
/// starts in the open octant, Newton searches on every non-flat face and
/// edge, then deduplication, refinement and labeling.
pub fn minimize_f(config: &MinimizeConfig) -> MinimizeResult {
    let sampler = OctantSampler::new(config.seed);
    let starts: Vec<Point> = (0..config.starts as u64)
        .map(|i| sampler.point(i))
        .collect();
    let mut flat: Vec<Stratum> = Vec::new();
    for st in Stratum::all() {
        if !flat.iter().any(|f| st.is_within(*f)) && is_flat(st, &sampler) {
            flat.push(st);
        }
    }
    let searchable = |st: Stratum| !flat.iter().any(|f| st.is_within(*f));

    // (start, kind) jobs in a fixed order
    let mut jobs: Vec<(Point, CriticalKind)> = Vec::new();
    for s in &starts {
        jobs.push((*s, CriticalKind::LocalMinimum));
        jobs.push((*s, CriticalKind::Stationary));
    }
    let face_count = config.boundary_starts.min(config.starts);
    let edge_count = config.edge_starts.min(config.starts);
    for st in Stratum::all() {
        if !searchable(st) {
            continue;
        }
        let count = if st.pinned().count() == 1 {
            face_count
        } else {
            edge_count
        };
        for i in 0..count as u64 {
            jobs.push((st.sample(&sampler, i), CriticalKind::Stationary));
        }
    }

    let results: Vec<Option<Candidate>> = jobs
        .par_iter()
        .map(|&(start, kind)| {
            let c = match kind {
                CriticalKind::LocalMinimum => {
                    projected_descent(start, config.grad_tol, config.max_iter)
                }
                CriticalKind::Stationary => {
                    newton_stationary(start, config.grad_tol, config.max_iter)
                }
            }?;
            Some(Candidate {
                point: canonical(c.point),
                kind,
                gradient_norm: c.gradient_norm,
            })
        })
        .collect();
    let searches = results.len();
    let dropped = results.iter().filter(|r| r.is_none()).count();

    // collapse flat faces, then deduplicate in job order
    let mut kept: Vec<(Candidate, usize, Option<Stratum>)> = Vec::new();
    for cand in results.into_iter().flatten() {
        let zeros = cand.point.iter().filter(|v| **v == 0.0).count();
        let on_flat = flat
            .iter()
            .copied()
            .find(|f| f.contains(&cand.point) && zeros < 3);
        let existing = kept.iter_mut().find(|(k, _, kf)| match (on_flat, kf) {
            (Some(a), Some(b)) => a == *b,
            (None, None) => distance(&k.point, &cand.point) <= DEDUP_RADIUS,
            _ => false,
        });
        match existing {
            Some(entry) => {
                entry.1 += 1;
                if cand.gradient_norm < entry.0.gradient_norm && on_flat.is_none() {
                    entry.0 = cand;
                }
            }
            None => kept.push((cand, 1, on_flat)),
        }
    }

    let mut points: Vec<CriticalPoint> = kept
        .into_par_iter()
        .map(|(cand, multiplicity, on_flat)| {
            let (point, gradient_norm) = match (on_flat, cand.kind) {
                (None, CriticalKind::Stationary) => {
                    match newton_stationary(cand.point, config.grad_tol.min(1e-12), 20) {
                        Some(r) if r.gradient_norm <= cand.gradient_norm => {
                            (canonical(r.point), r.gradient_norm)
                        }
                        _ => (cand.point, cand.gradient_norm),
                    }
                }
                _ => (cand.point, cand.gradient_norm),
            };
            let params = SchmidtParams::project(point).expect("canonical points are nonzero");
            CriticalPoint {
                f_value: f_pipeline(&params),
                location: classify_location(&params),
                region: sign_region(&params),
                kind: cand.kind,
                gradient_norm,
                multiplicity,
                flat: on_flat,
                params,
            }
        })
        .collect();
    // refinement can merge points that were just outside the radius
    let mut merged: Vec<CriticalPoint> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        match merged.iter_mut().find(|q| {
            q.flat == p.flat
                && (p.flat.is_some()
                    || distance(&q.coordinates(), &p.coordinates()) <= DEDUP_RADIUS)
        }) {
            Some(q) => q.multiplicity += p.multiplicity,
            None => merged.push(p),
        }
    }
    merged.sort_by(|a, b| {
        a.f_value.total_cmp(&b.f_value).then_with(|| {
            a.coordinates()
                .partial_cmp(&b.coordinates())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    MinimizeResult {
        points: merged,
        dropped,
        searches,
        flat,
    }
}

// ---------------------------------------------------------------------------
// published critical values
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub f: f64,
    pub f_tol: f64,
    pub at: Point,
    pub at_tol: f64,
}

/// The three critical values quoted for the Schmidt family.
pub const FIXTURES: [Fixture; 3] = [
    Fixture {
        name: "interior",
        f: 0.361084,
        f_tol: 1e-4,
        at: [0.390368, 0.0, 0.788618, 0.475073],
        at_tol: 1e-3,
    },
    Fixture {
        name: "x=0,y=0 edge",
        f: 0.780239,
        f_tol: 1e-5,
        at: [0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        at_tol: 1e-3,
    },
    Fixture {
        name: "vertex (0,1,0,0)",
        f: 0.0,
        f_tol: 1e-9,
        at: [0.0, 1.0, 0.0, 0.0],
        at_tol: 1e-3,
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureMatch {
    pub fixture: Fixture,
    /// f through the pipeline at the quoted coordinates.
    pub value_at_fixture: f64,
    /// Closest critical point within the coordinate tolerance whose value
    /// is within the value tolerance.
    pub matched: Option<CriticalPoint>,
    pub pass: bool,
}

pub fn match_fixtures(points: &[CriticalPoint]) -> Vec<FixtureMatch> {
    FIXTURES
        .iter()
        .map(|fx| {
            let at = SchmidtParams::project(fx.at).expect("fixture coordinates are nonzero");
            let value_at_fixture = f_pipeline(&at);
            let matched = points
                .iter()
                .filter(|p| {
                    distance(&p.coordinates(), &fx.at) <= fx.at_tol
                        && (p.f_value - fx.f).abs() <= fx.f_tol
                })
                .min_by(|a, b| {
                    distance(&a.coordinates(), &fx.at)
                        .total_cmp(&distance(&b.coordinates(), &fx.at))
                })
                .cloned();
            let pass = matched.is_some() && (value_at_fixture - fx.f).abs() <= fx.f_tol;
            FixtureMatch {
                fixture: *fx,
                value_at_fixture,
                matched,
                pass,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// dense verification
// ---------------------------------------------------------------------------

/// Part of the octant a verification run is restricted to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Restriction {
    #[default]
    None,
    Region(SignRegion),
    Boundary(Boundary),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Quasi-random sample count.
    pub samples: usize,
    pub seed: u64,
    pub restriction: Restriction,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 1_000_000,
            seed: 1,
            restriction: Restriction::None,
        }
    }
}

/// One row of the per-region table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRow {
    pub region: RegionMembership,
    pub samples: usize,
    pub sampled_min: Option<f64>,
    pub sampled_argmin: Option<SchmidtParams>,
    pub critical_points: usize,
    pub critical_min: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimumSource {
    Sample,
    CriticalPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub samples: usize,
    pub seed: u64,
    pub restriction: Restriction,
    pub min: f64,
    pub argmin: SchmidtParams,
    pub min_source: MinimumSource,
    /// Smallest f over the critical points inside the restriction.
    pub critical_min: Option<f64>,
    pub critical_argmin: Option<SchmidtParams>,
    pub critical_points: usize,
    pub regions: Vec<RegionRow>,
    pub pass: bool,
}

fn in_restriction(p: &Point, r: &Restriction, membership: RegionMembership) -> bool {
    match r {
        Restriction::None => true,
        Restriction::Region(reg) => membership == RegionMembership::Region(*reg),
        Restriction::Boundary(b) => p[b.index()] == 0.0,
    }
}

struct Sample {
    index: usize,
    point: Point,
    f: f64,
    region: RegionMembership,
}

fn better(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Evaluates f on `samples` quasi-random points of the restricted domain and
/// on the supplied critical points, and reports the minimum. Critical points
/// win ties, so exact zeros such as (0,1,0,0) are reported over nearby
/// samples.
pub fn verify_monogamy(config: &VerifyConfig, critical: &[CriticalPoint]) -> VerificationReport {
    let sampler = OctantSampler::new(config.seed);
    let samples: Vec<Sample> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let point = match config.restriction {
                Restriction::Boundary(b) => sampler.face_point(i as u64, b),
                _ => sampler.point(i as u64),
            };
            let params = SchmidtParams::project(point).expect("sampler points are nonzero");
            Sample {
                index: i,
                point,
                f: f_pipeline(&params),
                region: sign_region(&params),
            }
        })
        .collect();

    let mut rows: Vec<RegionRow> = SignRegion::all()
        .into_iter()
        .map(RegionMembership::Region)
        .chain([RegionMembership::Boundary, RegionMembership::Undefined])
        .map(|region| RegionRow {
            region,
            samples: 0,
            sampled_min: None,
            sampled_argmin: None,
            critical_points: 0,
            critical_min: None,
        })
        .collect();
    let row_of = |rows: &mut Vec<RegionRow>, m: RegionMembership| -> usize {
        rows.iter()
            .position(|r| r.region == m)
            .expect("every membership has a row")
    };

    let mut best: Option<(f64, usize, Point)> = None;
    let mut counted = 0;
    for s in &samples {
        let r = row_of(&mut rows, s.region);
        let row = &mut rows[r];
        row.samples += 1;
        if row.sampled_min.is_none_or(|m| s.f < m) {
            row.sampled_min = Some(s.f);
            row.sampled_argmin = SchmidtParams::project(s.point);
        }
        if in_restriction(&s.point, &config.restriction, s.region) {
            counted += 1;
            if best.is_none_or(|(f, i, _)| better((s.f, s.index), (f, i))) {
                best = Some((s.f, s.index, s.point));
            }
        }
    }

    let mut crit_best: Option<&CriticalPoint> = None;
    let mut crit_count = 0;
    for c in critical {
        let r = row_of(&mut rows, c.region);
        let row = &mut rows[r];
        row.critical_points += 1;
        row.critical_min = Some(
            row.critical_min
                .map_or(c.f_value, |m: f64| m.min(c.f_value)),
        );
        if in_restriction(&c.coordinates(), &config.restriction, c.region) {
            crit_count += 1;
            if crit_best.is_none_or(|b| c.f_value < b.f_value) {
                crit_best = Some(c);
            }
        }
    }

    let sampled = best.map(|(f, _, p)| (f, SchmidtParams::project(p).unwrap()));
    let (min, argmin, min_source) = match (sampled, crit_best) {
        (Some((f, p)), Some(c)) if f < c.f_value => (f, p, MinimumSource::Sample),
        (_, Some(c)) => (c.f_value, c.params, MinimumSource::CriticalPoint),
        (Some((f, p)), None) => (f, p, MinimumSource::Sample),
        (None, None) => (
            f64::NAN,
            SchmidtParams {
                x: f64::NAN,
                y: f64::NAN,
                z: f64::NAN,
                h: f64::NAN,
            },
            MinimumSource::Sample,
        ),
    };
    VerificationReport {
        samples: counted,
        seed: config.seed,
        restriction: config.restriction,
        min,
        argmin,
        min_source,
        critical_min: crit_best.map(|c| c.f_value),
        critical_argmin: crit_best.map(|c| c.params),
        critical_points: crit_count,
        regions: rows,
        pass: min >= NONNEGATIVITY,
    }
}
