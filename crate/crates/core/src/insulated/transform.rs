//! Rescaling and flattening of the gap onto the strip
//! `𝒬₀ = {|z₁| ≤ δ, |z′| ≤ 1}`, pushforward of the coefficients and the even
//! reflection of strip solutions across the faces `z₁ = ±δ`.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GapRegion;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::lab::report::Criterion;

/// Default lateral half-width `r̃` of the rescaled region.
pub const DEFAULT_RTILDE: f64 = 0.5;
/// Constant of the two-sided comparisons checked on the transforms.
pub const COMPARISON_CONSTANT: f64 = 10.0;

/// `y = (x₁/δ, (x′ − x′₀)/δ)` with `δ = √(f(x′₀) + g(x′₀) + ε)`; points
/// are `(x₁, x′)` pairs stored as `Vec2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaleMap {
    pub x0p: f64,
    pub delta: f64,
}

impl RescaleMap {
    pub fn forward(&self, x: Vec2) -> Vec2 {
        Vec2::new(x.x / self.delta, (x.y - self.x0p) / self.delta)
    }

    pub fn inverse(&self, y: Vec2) -> Vec2 {
        Vec2::new(y.x * self.delta, self.x0p + y.y * self.delta)
    }

    /// Whether `δ/C < √(|x′₀|² + ε) < Cδ`.
    pub fn comparable(&self, eps: f64, c: f64) -> bool {
        let s = (self.x0p * self.x0p + eps).sqrt();
        self.delta > s / c && self.delta < c * s
    }
}

pub fn rescale_map(gap: &GapRegion, x0p: f64) -> Result<RescaleMap> {
    if !(x0p.abs() < 0.5 * gap.r) {
        return Err(Error::OffsetOutOfRange(x0p, 0.5 * gap.r));
    }
    Ok(RescaleMap {
        x0p,
        delta: gap.width(x0p).sqrt(),
    })
}

/// A diffeomorphism from a rescaled gap onto the strip.
pub trait StripMap: Send + Sync {
    /// Strip half-width `δ`.
    fn delta(&self) -> f64;
    fn forward(&self, y: Vec2) -> Vec2;
    fn inverse(&self, z: Vec2) -> Vec2;
    /// `∂z/∂y` at `y`.
    fn jacobian(&self, y: Vec2) -> Matrix2<f64>;
}

/// Identity onto a strip of half-width `δ`.
#[derive(Clone, Copy, Debug)]
pub struct IdentityMap {
    pub delta: f64,
}

impl StripMap for IdentityMap {
    fn delta(&self) -> f64 {
        self.delta
    }
    fn forward(&self, y: Vec2) -> Vec2 {
        y
    }
    fn inverse(&self, z: Vec2) -> Vec2 {
        z
    }
    fn jacobian(&self, _: Vec2) -> Matrix2<f64> {
        Matrix2::identity()
    }
}

/// `z = (y₁, y′/r̃)`.
#[derive(Clone, Copy, Debug)]
pub struct ScalingMap {
    pub delta: f64,
    pub rtilde: f64,
}

impl StripMap for ScalingMap {
    fn delta(&self) -> f64 {
        self.delta
    }
    fn forward(&self, y: Vec2) -> Vec2 {
        Vec2::new(y.x, y.y / self.rtilde)
    }
    fn inverse(&self, z: Vec2) -> Vec2 {
        Vec2::new(z.x, z.y * self.rtilde)
    }
    fn jacobian(&self, _: Vec2) -> Matrix2<f64> {
        Matrix2::new(1.0, 0.0, 0.0, 1.0 / self.rtilde)
    }
}

/// `z₁ = 2δ(δy₁ + g(x′) + ε/2)/(f(x′) + g(x′) + ε) − δ`, `z′ = y′/r̃` with
/// `x′ = x′₀ + δy′`: the lower face goes to `z₁ = −δ`, the upper face to
/// `z₁ = +δ`.
#[derive(Clone, Debug)]
pub struct FlattenMap {
    pub gap: GapRegion,
    pub rescale: RescaleMap,
    pub rtilde: f64,
}

impl FlattenMap {
    fn xp(&self, y: Vec2) -> f64 {
        self.rescale.x0p + self.rescale.delta * y.y
    }

    /// `∂z₁/∂y₁ = 2δ²/(f + g + ε)`.
    pub fn normal_stretch(&self, y: Vec2) -> f64 {
        let d = self.rescale.delta;
        2.0 * d * d / self.gap.width(self.xp(y))
    }

    /// Rescaled lower and upper faces `y₁` at lateral `y′`.
    pub fn faces(&self, yp: f64) -> (f64, f64) {
        let d = self.rescale.delta;
        let xp = self.rescale.x0p + d * yp;
        (
            (-self.gap.g(xp) - 0.5 * self.gap.eps) / d,
            (self.gap.f(xp) + 0.5 * self.gap.eps) / d,
        )
    }

    /// Full map from gap coordinates `(x₁, x′)` to the strip.
    pub fn from_gap(&self, x: Vec2) -> Vec2 {
        self.forward(self.rescale.forward(x))
    }
}

impl StripMap for FlattenMap {
    fn delta(&self) -> f64 {
        self.rescale.delta
    }

    fn forward(&self, y: Vec2) -> Vec2 {
        let d = self.rescale.delta;
        let xp = self.xp(y);
        let t = d * y.x + self.gap.g(xp) + 0.5 * self.gap.eps;
        Vec2::new(2.0 * d * t / self.gap.width(xp) - d, y.y / self.rtilde)
    }

    fn inverse(&self, z: Vec2) -> Vec2 {
        let d = self.rescale.delta;
        let yp = z.y * self.rtilde;
        let xp = self.rescale.x0p + d * yp;
        let t = (z.x + d) * self.gap.width(xp) / (2.0 * d);
        Vec2::new((t - self.gap.g(xp) - 0.5 * self.gap.eps) / d, yp)
    }

    fn jacobian(&self, y: Vec2) -> Matrix2<f64> {
        let d = self.rescale.delta;
        let xp = self.xp(y);
        let s = self.gap.width(xp);
        let t = d * y.x + self.gap.g(xp) + 0.5 * self.gap.eps;
        let (fs, gs) = (self.gap.upper.slope(xp), self.gap.lower.slope(xp));
        let dz1_dyp = 2.0 * d * (d * gs * s - t * d * (fs + gs)) / (s * s);
        Matrix2::new(2.0 * d * d / s, dz1_dyp, 0.0, 1.0 / self.rtilde)
    }
}

/// Builds the flattening map; fails if the Jacobian degenerates at the
/// center of the strip.
pub fn flatten_map(gap: &GapRegion, rescale: &RescaleMap, rtilde: f64) -> Result<FlattenMap> {
    let m = FlattenMap {
        gap: gap.clone(),
        rescale: rescale.clone(),
        rtilde,
    };
    let det = m.jacobian(m.inverse(Vec2::ZERO)).determinant();
    if !(det.abs() >= 1e-10) {
        return Err(Error::DegenerateJacobian(det));
    }
    Ok(m)
}

/// Coefficient field `a(y)`.
pub type Coefficient = Arc<dyn Fn(Vec2) -> Matrix2<f64> + Send + Sync>;

pub fn constant_coefficient(a: Matrix2<f64>) -> Coefficient {
    Arc::new(move |_| a)
}

/// Eigenvalues `(min, max)` of a symmetric 2×2 matrix.
pub fn sym_eigen(b: &Matrix2<f64>) -> (f64, f64) {
    let m = 0.5 * (b[(0, 0)] + b[(1, 1)]);
    let r = (0.25 * (b[(0, 0)] - b[(1, 1)]).powi(2) + b[(0, 1)] * b[(0, 1)]).sqrt();
    (m - r, m + r)
}

/// Pushforward `b(z) = J a(y) Jᵀ / |det J|` on the strip, with the
/// ellipticity constants found by a grid scan.
#[derive(Clone)]
pub struct StripCoefficients {
    pub map: Arc<dyn StripMap>,
    pub a: Coefficient,
    pub delta: f64,
    /// Smallest eigenvalue over the scan grid.
    pub lambda: f64,
    /// Largest eigenvalue over the scan grid.
    pub big_lambda: f64,
}

impl std::fmt::Debug for StripCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StripCoefficients")
            .field("delta", &self.delta)
            .field("lambda", &self.lambda)
            .field("big_lambda", &self.big_lambda)
            .finish()
    }
}

/// Sample grid `n × n` over the closed strip.
pub fn strip_grid(delta: f64, n: usize) -> Vec<Vec2> {
    let n = n.max(2);
    let mut v = Vec::with_capacity(n * n);
    for i in 0..n {
        let z1 = -delta + 2.0 * delta * i as f64 / (n - 1) as f64;
        for j in 0..n {
            v.push(Vec2::new(z1, -1.0 + 2.0 * j as f64 / (n - 1) as f64));
        }
    }
    v
}

impl StripCoefficients {
    /// `b` at a strip point; the lower triangle mirrors the upper one, so
    /// the result is exactly symmetric.
    pub fn eval(&self, z: Vec2) -> Matrix2<f64> {
        let y = self.map.inverse(z);
        let j = self.map.jacobian(y);
        let a = (self.a)(y);
        let det = j.determinant().abs();
        let full = j * a * j.transpose() / det;
        Matrix2::new(full[(0, 0)], full[(0, 1)], full[(0, 1)], full[(1, 1)])
    }

    /// `(min, max)` eigenvalue of `b` over an `n × n` grid.
    pub fn scan(&self, n: usize) -> (f64, f64) {
        strip_grid(self.delta, n)
            .into_iter()
            .map(|z| sym_eigen(&self.eval(z)))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }
}

/// Pushes `a` forward through `map`, verifying symmetry of the input and
/// ellipticity of the output on a `grid × grid` scan.
pub fn pushforward_coefficients(a: Coefficient, map: Arc<dyn StripMap>, grid: usize) -> Result<StripCoefficients> {
    let delta = map.delta();
    for z in strip_grid(delta, grid) {
        let m = a(map.inverse(z));
        let (x, y) = (m[(0, 1)], m[(1, 0)]);
        if (x - y).abs() > 1e-14 * m.norm() {
            return Err(Error::NonSymmetric(x, y));
        }
        let lo = sym_eigen(&m).0;
        if lo <= 0.0 {
            return Err(Error::NotElliptic(lo));
        }
    }
    let mut b = StripCoefficients {
        map,
        a,
        delta,
        lambda: 0.0,
        big_lambda: 0.0,
    };
    let (lo, hi) = b.scan(grid);
    if !(lo > 0.0) {
        return Err(Error::NotElliptic(lo));
    }
    b.lambda = lo;
    b.big_lambda = hi;
    Ok(b)
}

/// Scalar field on the strip.
pub type ScalarField = Arc<dyn Fn(Vec2) -> f64 + Send + Sync>;

/// Tile `𝒬_l = {|z₁ − 2lδ| ≤ δ}` of `𝒬 = [−1, 1]²`, clipped at `|z₁| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tile {
    pub l: i64,
    pub lo: f64,
    pub hi: f64,
}

/// Even reflection `w̃(z) = w((−1)^l (z₁ − 2lδ), z′)` on each tile, with
/// `b̃` reflected and its off-diagonal entries sign-flipped on odd tiles.
#[derive(Clone)]
pub struct FlipExtension {
    pub w: ScalarField,
    pub b: StripCoefficients,
    pub delta: f64,
    pub tiles: Vec<Tile>,
}

fn parity(l: i64) -> f64 {
    if l.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Tiles `𝒬` by reflected copies of the strip; tiles overhanging `|z₁| = 1`
/// are clipped.
pub fn flip_extend(w: ScalarField, b: &StripCoefficients) -> FlipExtension {
    let delta = b.delta;
    let lmax = ((1.0 - delta) / (2.0 * delta)).ceil().max(0.0) as i64;
    let tiles = (-lmax..=lmax)
        .map(|l| {
            let c = 2.0 * l as f64 * delta;
            Tile {
                l,
                lo: (c - delta).max(-1.0),
                hi: (c + delta).min(1.0),
            }
        })
        .collect();
    FlipExtension {
        w,
        b: b.clone(),
        delta,
        tiles,
    }
}

impl FlipExtension {
    /// Index of the tile containing `z₁`.
    pub fn tile_of(&self, z1: f64) -> i64 {
        (z1 / (2.0 * self.delta)).round() as i64
    }

    /// Point of `𝒬₀` that tile `l` reflects `z` onto.
    pub fn local(&self, z: Vec2, l: i64) -> Vec2 {
        let s = parity(l);
        Vec2::new((s * (z.x - 2.0 * l as f64 * self.delta)).clamp(-self.delta, self.delta), z.y)
    }

    pub fn w_tilde(&self, z: Vec2) -> f64 {
        (self.w)(self.local(z, self.tile_of(z.x)))
    }

    pub fn w_in_tile(&self, z: Vec2, l: i64) -> f64 {
        (self.w)(self.local(z, l))
    }

    pub fn b_tilde(&self, z: Vec2) -> Matrix2<f64> {
        self.b_in_tile(z, self.tile_of(z.x))
    }

    pub fn b_in_tile(&self, z: Vec2, l: i64) -> Matrix2<f64> {
        let mut b = self.b.eval(self.local(z, l));
        let s = parity(l);
        b[(0, 1)] *= s;
        b[(1, 0)] *= s;
        b
    }

    /// Traces of `w̃` on the plane `z₁ = (2l + 1)δ` from tile `l` and from
    /// tile `l + 1`; both faces reflect onto the same point of `∂𝒬₀`.
    pub fn interface_traces(&self, l: i64, zp: f64) -> (f64, f64) {
        let from_left = parity(l) * self.delta;
        let from_right = parity(l + 1) * -self.delta;
        ((self.w)(Vec2::new(from_left, zp)), (self.w)(Vec2::new(from_right, zp)))
    }

    /// Interior interface indices `l` (planes `(2l+1)δ` strictly inside `𝒬`).
    pub fn interfaces(&self) -> Vec<i64> {
        self.tiles
            .iter()
            .filter(|t| (2 * t.l + 1) as f64 * self.delta < 1.0 && t.hi < 1.0)
            .map(|t| t.l)
            .collect()
    }
}

/// Smooth bump `exp(1 − 1/(1 − ρ²))`, `ρ = |z − c|/s`, supported in `B(c, s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: Vec2,
    pub radius: f64,
}

impl Bump {
    pub fn grad(&self, z: Vec2) -> Vec2 {
        let d = z - self.center;
        let rho2 = d.norm_sq() / (self.radius * self.radius);
        if rho2 >= 1.0 {
            return Vec2::ZERO;
        }
        let q = 1.0 - rho2;
        let psi = (1.0 - 1.0 / q).exp();
        d * (-2.0 * psi / (q * q * self.radius * self.radius))
    }
}

/// Random bumps with radii in `[0.3δ, 0.9δ]` supported inside
/// `[z1_lo, z1_hi] × [−1, 1]`.
pub fn random_bumps(seed: u64, count: usize, delta: f64, z1_lo: f64, z1_hi: f64) -> Vec<Bump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.gen_range(0.3 * delta..0.9 * delta);
            let c1 = rng.gen_range(z1_lo + s..z1_hi - s);
            let c2 = rng.gen_range(-1.0 + s..1.0 - s);
            Bump {
                center: Vec2::new(c1, c2),
                radius: s,
            }
        })
        .collect()
}

const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Largest normalized weak residual `|∫ b∇w·∇ψ| / ‖∇ψ‖` over the bumps,
/// with a tensor 3-point Gauss rule on cells of width about `h` that never
/// straddle a break of `z₁`. `field(z, piece)` returns `(b, ∇w)` on the
/// piece between `breaks[piece]` and `breaks[piece + 1]`.
pub fn weak_residual(
    breaks: &[f64],
    h: f64,
    bumps: &[Bump],
    field: impl Fn(Vec2, usize) -> (Matrix2<f64>, Vec2),
) -> f64 {
    let ny = (2.0 / h).ceil() as usize;
    let mut nodes: Vec<(Vec2, f64, Vec2)> = Vec::new();
    for (piece, w) in breaks.windows(2).enumerate() {
        let nx = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
        let hx = (w[1] - w[0]) / nx as f64;
        let hy = 2.0 / ny as f64;
        for i in 0..nx {
            for j in 0..ny {
                for (sx, wx) in GL3 {
                    for (sy, wy) in GL3 {
                        let z = Vec2::new(
                            w[0] + hx * (i as f64 + 0.5 + 0.5 * sx),
                            -1.0 + hy * (j as f64 + 0.5 + 0.5 * sy),
                        );
                        let (b, gw) = field(z, piece);
                        let flux = Vec2::new(b[(0, 0)] * gw.x + b[(0, 1)] * gw.y, b[(1, 0)] * gw.x + b[(1, 1)] * gw.y);
                        nodes.push((z, 0.25 * hx * hy * wx * wy, flux));
                    }
                }
            }
        }
    }
    bumps
        .iter()
        .map(|bump| {
            let (mut r, mut n2) = (0.0, 0.0);
            for (z, wq, flux) in &nodes {
                let gp = bump.grad(*z);
                r += wq * flux.dot(gp);
                n2 += wq * gp.norm_sq();
            }
            r.abs() / n2.sqrt()
        })
        .fold(0.0, f64::max)
}

/// Central-difference gradient of `w`.
pub fn numeric_grad(w: &ScalarField, z: Vec2) -> Vec2 {
    let h = 1e-6;
    let dx = (w(z + Vec2::new(h, 0.0)) - w(z - Vec2::new(h, 0.0))) / (2.0 * h);
    let dy = (w(z + Vec2::new(0.0, h)) - w(z - Vec2::new(0.0, h))) / (2.0 * h);
    Vec2::new(dx, dy)
}

/// Weak residuals `(extended on 𝒬, baseline on 𝒬₀)` against `count` random
/// bumps each, at cell width `δ/4`. With `flip_signs = false` the
/// off-diagonal sign rule is skipped (a negative control).
pub fn flip_residuals(ext: &FlipExtension, seed: u64, count: usize, flip_signs: bool) -> (f64, f64) {
    let d = ext.delta;
    let h = d / 4.0;
    let base_bumps = random_bumps(seed, count, d, -d, d);
    let base = weak_residual(&[-d, d], h, &base_bumps, |z, _| (ext.b.eval(z), numeric_grad(&ext.w, z)));
    let mut breaks: Vec<f64> = ext.tiles.iter().map(|t| t.lo).collect();
    breaks.push(ext.tiles.last().map(|t| t.hi).unwrap_or(d));
    let bumps = random_bumps(seed ^ 0x5eed, count, d, -1.0, 1.0);
    let extended = weak_residual(&breaks, h, &bumps, |z, piece| {
        let l = ext.tiles[piece].l;
        let s = parity(l);
        let loc = ext.local(z, l);
        let g = numeric_grad(&ext.w, loc);
        let mut b = ext.b.eval(loc);
        if flip_signs {
            b[(0, 1)] *= s;
            b[(1, 0)] *= s;
        }
        (b, Vec2::new(s * g.x, g.y))
    });
    (extended, base)
}

/// Solution of `div(b∇w) = 0` in `𝒬₀` for constant `b` with zero conormal
/// derivative on `z₁ = ±δ`:
/// `w = cos(kz₁)·cosh(k(z′−βz₁)/μ)/cosh(k/μ) + (z′ − βz₁)`, `k = π/δ`,
/// `β = b₁₂/b₁₁`, `μ² = det b / b₁₁²`.
pub fn strip_solution(b: Matrix2<f64>, delta: f64) -> ScalarField {
    let beta = b[(0, 1)] / b[(0, 0)];
    let mu = (b.determinant()).sqrt() / b[(0, 0)];
    let k = std::f64::consts::PI / delta;
    let norm = (k / mu).cosh();
    Arc::new(move |z: Vec2| {
        let s = z.y - beta * z.x;
        (k * z.x).cos() * (k * s / mu).cosh() / norm + s
    })
}

/// Outcome of the transform self-test on a gap.
#[derive(Clone, Debug)]
pub struct TransformSelfTest {
    pub criteria: Vec<Criterion>,
    /// Measured value behind each criterion.
    pub values: Vec<f64>,
    pub table: String,
}

impl TransformSelfTest {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

/// Checks the transform pipeline on a gap: comparability of `δ`, the
/// normal stretch `2δ²/(f+g+ε)` on a probe grid, round trips, the
/// ellipticity of the pushed-forward identity, and the flip extension
/// (exact interface traces, weak residual within 5× the strip baseline)
/// for a constant anisotropic coefficient on a strip of half-width `flip_delta`.
pub fn transform_self_test(gap: &GapRegion, flip_delta: f64, seed: u64) -> Result<TransformSelfTest> {
    let c = COMPARISON_CONSTANT;
    let mut table = String::new();
    let _ = writeln!(table, "{:<40} {:>14} {:>14} {:>6}", "check", "value", "bound", "ok");
    let mut criteria = Vec::new();
    let mut values = Vec::new();
    let mut row = |name: &str, value: f64, bound: &str, ok: bool, criteria: &mut Vec<Criterion>| {
        let _ = writeln!(table, "{:<40} {:>14.6e} {:>14} {:>6}", name, value, bound, ok);
        criteria.push(Criterion::new(name, ok, format!("{value:.6e} {bound}")));
        values.push(value);
    };

    let offsets: Vec<f64> = (0..9).map(|k| (k as f64 - 4.0) / 4.0 * 0.45 * gap.r).collect();
    let (mut smin, mut smax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut comparable = true;
    let mut round_trip: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &x0p in &offsets {
        let rs = rescale_map(gap, x0p)?;
        comparable &= rs.comparable(gap.eps, c);
        let fl = flatten_map(gap, &rs, DEFAULT_RTILDE)?;
        for i in 0..21 {
            let yp = -DEFAULT_RTILDE + 2.0 * DEFAULT_RTILDE * i as f64 / 20.0;
            let (lo, hi) = fl.faces(yp);
            for j in 0..11 {
                let y = Vec2::new(lo + (hi - lo) * j as f64 / 10.0, yp);
                let s = fl.normal_stretch(y);
                smin = smin.min(s);
                smax = smax.max(s);
            }
        }
        for _ in 0..100 {
            let xp = x0p + rs.delta * rng.gen_range(-DEFAULT_RTILDE..DEFAULT_RTILDE);
            let x1 = rng.gen_range(-gap.g(xp) - 0.5 * gap.eps..gap.f(xp) + 0.5 * gap.eps);
            let x = Vec2::new(x1, xp);
            let y = rs.forward(x);
            round_trip = round_trip.max(rs.inverse(y).dist(x)).max(fl.inverse(fl.forward(y)).dist(y));
        }
    }
    row("delta comparable to sqrt(|x0'|^2+eps)", 0.0, "C = 10", comparable, &mut criteria);
    row("min normal stretch 2d^2/(f+g+eps)", smin, "> 0.1", smin > 1.0 / c, &mut criteria);
    row("max normal stretch 2d^2/(f+g+eps)", smax, "< 10", smax < c, &mut criteria);
    row("transform round trip", round_trip, "<= 1e-10", round_trip <= 1e-10, &mut criteria);

    let rs = rescale_map(gap, 0.0)?;
    let fl: Arc<dyn StripMap> = Arc::new(flatten_map(gap, &rs, DEFAULT_RTILDE)?);
    let b = pushforward_coefficients(constant_coefficient(Matrix2::identity()), fl, 50)?;
    row("pushforward min eigenvalue (50x50)", b.lambda, "> 0.05", b.lambda > 0.05, &mut criteria);

    let aniso = Matrix2::new(2.0, 0.6, 0.6, 1.0);
    let strip = pushforward_coefficients(
        constant_coefficient(aniso),
        Arc::new(IdentityMap { delta: flip_delta }),
        50,
    )?;
    let ext = flip_extend(strip_solution(aniso, flip_delta), &strip);
    let mut exact = true;
    for l in ext.interfaces() {
        for k in 0..41 {
            let zp = -1.0 + 2.0 * k as f64 / 40.0;
            let (a, b) = ext.interface_traces(l, zp);
            exact &= a.to_bits() == b.to_bits();
        }
    }
    row("interface traces bit-equal", ext.interfaces().len() as f64, "exact", exact, &mut criteria);
    let (res, base) = flip_residuals(&ext, seed, 200, true);
    let ratio = res / base;
    row("weak residual ratio (extended/strip)", ratio, "<= 5", ratio <= 5.0, &mut criteria);
    Ok(TransformSelfTest { criteria, values, table })
}
