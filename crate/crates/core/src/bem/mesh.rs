use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeometryConfig, ShapeSpec, Vec2};

/// Hard cap on the number of panels emitted for one contour.
pub const MAX_PANELS_PER_CONTOUR: usize = 2000;
/// Parameter samples used to integrate the panel density.
const FINE_GRID: usize = 1 << 15;

/// Discretization parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshParams {
    /// Panels per contour in the absence of gaps (at least 16).
    pub coarse_n: usize,
    /// Panel size is at most `grading_constant · √d`, `d` the local gap width.
    pub grading_constant: f64,
    /// Panel size is at most `aspect · d`, so that targets inside a gap see
    /// panels no longer than the gap is wide.
    pub aspect: f64,
}

impl Default for MeshParams {
    fn default() -> Self {
        MeshParams {
            coarse_n: 64,
            grading_constant: 0.5,
            aspect: 1.0,
        }
    }
}

impl MeshParams {
    pub fn with_coarse(coarse_n: usize) -> Self {
        MeshParams {
            coarse_n,
            ..MeshParams::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.coarse_n < 16 {
            return Err(Error::CoarseTooSmall(self.coarse_n));
        }
        if self.coarse_n > MAX_PANELS_PER_CONTOUR {
            return Err(Error::Config(format!(
                "coarse_n {} exceeds the per-contour cap {MAX_PANELS_PER_CONTOUR}",
                self.coarse_n
            )));
        }
        if !(self.grading_constant > 0.0 && self.aspect > 0.0) {
            return Err(Error::Config(
                "grading constant and aspect must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourRole {
    Outer,
    Inclusion(usize),
}

/// Straight boundary element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    pub a: Vec2,
    pub b: Vec2,
    pub mid: Vec2,
    /// Unit normal: out of the inclusion on inclusion contours, out of the
    /// domain on the outer contour.
    pub normal: Vec2,
    pub length: f64,
    pub contour: usize,
}

impl Panel {
    fn new(a: Vec2, b: Vec2, contour: usize) -> Self {
        let d = b - a;
        let length = d.norm();
        Panel {
            a,
            b,
            mid: a.lerp(b, 0.5),
            normal: Vec2::new(d.y, -d.x) * (1.0 / length),
            length,
            contour,
        }
    }

    pub fn tangent(&self) -> Vec2 {
        (self.b - self.a) * (1.0 / self.length)
    }

    /// Distance from `p` to the closed segment.
    pub fn distance(&self, p: Vec2) -> f64 {
        let t = ((p - self.a).dot(self.b - self.a) / (self.length * self.length)).clamp(0.0, 1.0);
        self.a.lerp(self.b, t).dist(p)
    }
}

/// A closed chain of panels.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub role: ContourRole,
    /// Panel index range `start..end` in the mesh.
    pub start: usize,
    pub end: usize,
    /// Local target size at each panel midpoint.
    pub target: Vec<f64>,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// `+1` on the outer contour, `−1` on inclusions: converts the stored
    /// normal into the normal pointing out of the computational domain.
    pub fn sigma(&self) -> f64 {
        match self.role {
            ContourRole::Outer => 1.0,
            ContourRole::Inclusion(_) => -1.0,
        }
    }
}

/// Oriented, graded panel discretization of all contours. Contour `0` is the
/// outer boundary and contour `k ≥ 1` is inclusion `k − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMesh {
    panels: Vec<Panel>,
    contours: Vec<Contour>,
    params: MeshParams,
}

impl BoundaryMesh {
    /// Graded discretization of an admissible configuration.
    pub fn discretize(g: &GeometryConfig, params: MeshParams) -> Result<Self> {
        params.validate()?;
        g.validate()?;
        let shapes: Vec<&ShapeSpec> = std::iter::once(&g.outer).chain(g.inclusions.iter()).collect();
        let mut chains = Vec::with_capacity(shapes.len());
        for (c, shape) in shapes.iter().enumerate() {
            let others: Vec<&ShapeSpec> = shapes
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != c)
                .map(|(_, s)| *s)
                .collect();
            let role = if c == 0 {
                ContourRole::Outer
            } else {
                ContourRole::Inclusion(c - 1)
            };
            let (verts, target) = grade_contour(shape, &others, &params);
            chains.push((role, verts, target));
        }
        Ok(BoundaryMesh::from_chains(chains, params))
    }

    /// Builds a mesh from counterclockwise vertex loops.
    pub fn from_chains(chains: Vec<(ContourRole, Vec<Vec2>, Vec<f64>)>, params: MeshParams) -> Self {
        let mut panels = Vec::new();
        let mut contours = Vec::new();
        for (c, (role, verts, target)) in chains.into_iter().enumerate() {
            let start = panels.len();
            let n = verts.len();
            for k in 0..n {
                panels.push(Panel::new(verts[k], verts[(k + 1) % n], c));
            }
            contours.push(Contour {
                role,
                start,
                end: panels.len(),
                target,
            });
        }
        BoundaryMesh {
            panels,
            contours,
            params,
        }
    }

    /// Mesh of the region enclosed by one contour, sharing its panels.
    pub fn interior_of(&self, contour: usize) -> Result<BoundaryMesh> {
        let c = self.contour(contour)?;
        let verts = self.panels[c.start..c.end].iter().map(|p| p.a).collect();
        Ok(BoundaryMesh::from_chains(
            vec![(ContourRole::Outer, verts, c.target.clone())],
            self.params,
        ))
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn contours(&self) -> &[Contour] {
        &self.contours
    }

    pub fn params(&self) -> MeshParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn contour(&self, c: usize) -> Result<&Contour> {
        self.contours.get(c).ok_or(Error::UnknownContour(c))
    }

    pub fn contour_panels(&self, c: usize) -> Result<&[Panel]> {
        let k = self.contour(c)?;
        Ok(&self.panels[k.start..k.end])
    }

    /// Contour index of inclusion `i`.
    pub fn inclusion_contour(&self, i: usize) -> Result<usize> {
        self.contours
            .iter()
            .position(|c| c.role == ContourRole::Inclusion(i))
            .ok_or(Error::UnknownContour(i + 1))
    }

    /// `σ` of the contour owning each panel.
    pub fn panel_sigma(&self, j: usize) -> f64 {
        self.contours[self.panels[j].contour].sigma()
    }

    /// Whether `p` lies inside the polygonal computational domain.
    pub fn polygon_contains(&self, p: Vec2) -> bool {
        self.contours.iter().all(|c| {
            let inside = winding_inside(&self.panels[c.start..c.end], p);
            match c.role {
                ContourRole::Outer => inside,
                ContourRole::Inclusion(_) => !inside,
            }
        })
    }

    /// Distance from `p` to the nearest panel.
    pub fn panel_distance(&self, p: Vec2) -> f64 {
        self.panels
            .iter()
            .map(|q| q.distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Panel dump: `panel_id, contour_id, x0, y0, x1, y1, nx, ny, length`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("panel_id,contour_id,x0,y0,x1,y1,nx,ny,length\n");
        for (k, p) in self.panels.iter().enumerate() {
            s.push_str(&format!(
                "{k},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                p.contour, p.a.x, p.a.y, p.b.x, p.b.y, p.normal.x, p.normal.y, p.length
            ));
        }
        s
    }
}

fn winding_inside(panels: &[Panel], p: Vec2) -> bool {
    let mut inside = false;
    for q in panels {
        let (a, b) = (q.a, q.b);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Places panel breakpoints by equidistributing `1/h` along the curve,
/// starting at parameter 0 so the mesh inherits the symmetries of the data.
fn grade_contour(shape: &ShapeSpec, others: &[&ShapeSpec], params: &MeshParams) -> (Vec<Vec2>, Vec<f64>) {
    let nf = FINE_GRID;
    let dt = 1.0 / nf as f64;
    let mut arc = vec![0.0; nf];
    let mut mids = vec![Vec2::ZERO; nf];
    for (k, (a, m)) in arc.iter_mut().zip(mids.iter_mut()).enumerate() {
        let (p, d, _) = shape.eval((k as f64 + 0.5) * dt);
        *a = d.norm() * dt;
        *m = p;
    }
    let perimeter: f64 = arc.iter().sum();
    let coarse = perimeter / params.coarse_n as f64;
    let size = |p: Vec2| {
        let d = others
            .iter()
            .map(|s| s.boundary_distance(p))
            .fold(f64::INFINITY, f64::min);
        coarse
            .min(params.grading_constant * d.sqrt())
            .min(params.aspect * d)
    };
    let mut cum = vec![0.0; nf + 1];
    for k in 0..nf {
        cum[k + 1] = cum[k] + arc[k] / size(mids[k]);
    }
    let total = cum[nf];
    let mut n = (total - 1e-9).ceil() as usize;
    n = n.max(params.coarse_n);
    n += n % 2;
    n = n.min(MAX_PANELS_PER_CONTOUR);
    let mut params_t = Vec::with_capacity(n);
    let mut cell = 0;
    for k in 0..n {
        let target = total * k as f64 / n as f64;
        while cum[cell + 1] < target {
            cell += 1;
        }
        let frac = if cum[cell + 1] > cum[cell] {
            (target - cum[cell]) / (cum[cell + 1] - cum[cell])
        } else {
            0.0
        };
        params_t.push((cell as f64 + frac) * dt);
    }
    let verts: Vec<Vec2> = params_t.iter().map(|&t| shape.point(t)).collect();
    let target = (0..n)
        .map(|k| {
            let t1 = if k + 1 < n { params_t[k + 1] } else { 1.0 };
            size(shape.point(0.5 * (params_t[k] + t1)))
        })
        .collect();
    (verts, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn two_disks(eps: f64) -> GeometryConfig {
        GeometryConfig::new(
            ShapeSpec::disk(Vec2::ZERO, 4.0),
            vec![
                ShapeSpec::disk(Vec2::new(-1.0 - eps / 2.0, 0.0), 1.0),
                ShapeSpec::disk(Vec2::new(1.0 + eps / 2.0, 0.0), 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_circle_is_uniform() {
        let g = GeometryConfig::new(ShapeSpec::disk(Vec2::ZERO, 1.5), vec![]).unwrap();
        let mesh = BoundaryMesh::discretize(&g, MeshParams::with_coarse(64)).unwrap();
        assert_eq!(mesh.len(), 64);
        let chord = 2.0 * 1.5 * (TAU / 128.0).sin();
        for p in mesh.panels() {
            assert!((p.length - chord).abs() < 1e-9);
            assert!((p.length - TAU * 1.5 / 64.0).abs() < 1e-3 * p.length);
            // outward normal on the outer contour
            assert!(p.normal.dot(p.mid) > 0.0);
        }
    }

    #[test]
    fn coarse_too_small() {
        let g = two_disks(0.1);
        let err = BoundaryMesh::discretize(&g, MeshParams::with_coarse(8)).unwrap_err();
        assert!(err.to_string().contains("coarse_n too small"));
    }

    #[test]
    fn gap_grading() {
        let mut counts = Vec::new();
        for eps in [0.1, 0.05, 0.02, 0.01, 0.005] {
            let params = MeshParams {
                grading_constant: 1.0,
                ..MeshParams::default()
            };
            let mesh = BoundaryMesh::discretize(&two_disks(eps), params).unwrap();
            let c = mesh.contour_panels(1).unwrap();
            // the apex panels of the left disk
            let apex = c
                .iter()
                .filter(|p| p.mid.x > 0.0 && p.mid.y.abs() < 0.2)
                .map(|p| p.length)
                .fold(0.0, f64::max);
            if eps == 0.01 {
                assert!(apex <= 0.1);
            }
            assert!(apex <= eps.sqrt() * 1.05);
            counts.push(c.len());
            // inclusion normals point out of the inclusion
            let center = Vec2::new(-1.0 - eps / 2.0, 0.0);
            assert!(c.iter().all(|p| p.normal.dot(p.mid - center) > 0.0));
        }
        assert!(counts.windows(2).all(|w| w[1] > w[0]), "{counts:?}");
    }

    #[test]
    fn contours_close_and_normals_are_orthonormal() {
        let mesh = BoundaryMesh::discretize(&two_disks(0.01), MeshParams::default()).unwrap();
        for c in mesh.contours() {
            let ps = &mesh.panels()[c.start..c.end];
            assert_eq!(c.len() % 2, 0);
            for k in 0..ps.len() {
                assert_eq!(ps[k].b, ps[(k + 1) % ps.len()].a);
                assert!((ps[k].normal.norm() - 1.0).abs() < 1e-14);
                assert!(ps[k].normal.dot(ps[k].b - ps[k].a).abs() < 1e-14);
                assert!(ps[k].length > 0.0);
            }
        }
    }

    #[test]
    fn mirror_symmetric_pair_meshes() {
        let mesh = BoundaryMesh::discretize(&two_disks(0.02), MeshParams::default()).unwrap();
        let left = mesh.contour_panels(1).unwrap();
        let right = mesh.contour_panels(2).unwrap();
        assert_eq!(left.len(), right.len());
        let mut lm: Vec<(f64, f64)> = left.iter().map(|p| (-p.mid.x, p.mid.y)).collect();
        let mut rm: Vec<(f64, f64)> = right.iter().map(|p| (p.mid.x, p.mid.y)).collect();
        lm.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rm.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in lm.iter().zip(&rm) {
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn polygon_membership() {
        let mesh = BoundaryMesh::discretize(&two_disks(0.1), MeshParams::default()).unwrap();
        assert!(mesh.polygon_contains(Vec2::new(0.0, 0.0)));
        assert!(mesh.polygon_contains(Vec2::new(0.0, 3.0)));
        assert!(!mesh.polygon_contains(Vec2::new(1.05, 0.0)));
        assert!(!mesh.polygon_contains(Vec2::new(5.0, 0.0)));
        let csv = mesh.to_csv();
        assert!(csv.starts_with("panel_id,contour_id,x0,y0,x1,y1,nx,ny,length\n"));
        assert_eq!(csv.lines().count(), mesh.len() + 1);
    }
}
