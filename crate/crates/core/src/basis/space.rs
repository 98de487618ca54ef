use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Vector3};

use super::geometry::{self, geometric_map};
use super::lagrange::{self, Entity};
use super::spline;
use super::{check_pair, Discretization, Family};
use crate::error::{FemError, Result};
use crate::mesh::{entity_key, CellKind, EntityKey, Mesh, Point};
use crate::quadrature::{gauss_rule, Domain, QuadratureRule};

#[derive(Clone, Debug)]
struct SplineData {
    dims: [usize; 3],
    knots: [Vec<f64>; 3],
    cell_index: Vec<[usize; 3]>,
    /// Mesh cell at each lattice index (x fastest).
    cell_at: Vec<usize>,
}

impl SplineData {
    fn functions(&self, axis: usize) -> usize {
        self.dims[axis] + 2
    }
}

/// Global DOF layout of a discretization on a mesh. Vector spaces interleave
/// components: DOF `node * components + c`.
#[derive(Clone, Debug)]
pub struct FESpace {
    mesh: Arc<Mesh>,
    disc: Discretization,
    components: usize,
    nodes_per_cell: usize,
    cell_nodes: Vec<usize>,
    node_positions: Vec<Point>,
    boundary_nodes: BTreeMap<i32, Vec<usize>>,
    spline: Option<SplineData>,
}

/// Builds a Lagrange/serendipity space, or delegates to [`spline_space`].
pub fn build_space(mesh: Arc<Mesh>, disc: Discretization, components: usize) -> Result<FESpace> {
    check_pair(disc.family, mesh.kind())?;
    if components == 0 {
        return Err(FemError::InvalidArgument("components must be positive".into()));
    }
    if disc.family == Family::Spline2 {
        return spline_space(mesh, components);
    }
    let family = disc.family;
    let kind = mesh.kind();
    let entities = lagrange::node_entities(family, kind);
    let uses_edges = entities.iter().any(|e| matches!(e, Entity::Edge(_)));
    let uses_facets = entities.iter().any(|e| matches!(e, Entity::Facet(_)));
    let uses_cells = entities.contains(&Entity::Interior);

    let verts = mesh.vertices();
    let mut node_positions: Vec<Point> = verts.to_vec();
    let mut edge_ids: HashMap<[usize; 2], usize> = HashMap::new();
    if uses_edges {
        for e in mesh.unique_edges() {
            edge_ids.insert(e, node_positions.len());
            node_positions.push(midpoint(&[verts[e[0]], verts[e[1]]]));
        }
    }
    let mut facet_ids: HashMap<EntityKey, usize> = HashMap::new();
    if uses_facets {
        let mut keys = BTreeSet::new();
        for cell in mesh.cells() {
            for f in kind.facets() {
                let vs: Vec<usize> = f.iter().map(|&l| cell[l]).collect();
                keys.insert((entity_key(&vs), vs));
            }
        }
        for (key, vs) in keys {
            if let std::collections::hash_map::Entry::Vacant(slot) = facet_ids.entry(key) {
                slot.insert(node_positions.len());
                let pts: Vec<Point> = vs.iter().map(|&v| verts[v]).collect();
                node_positions.push(midpoint(&pts));
            }
        }
    }
    let cell_base = node_positions.len();
    if uses_cells {
        for c in 0..mesh.num_cells() {
            node_positions.push(midpoint(&mesh.cell_vertices(c)));
        }
    }

    let n = entities.len();
    let mut cell_nodes = Vec::with_capacity(n * mesh.num_cells());
    let mut scratch = Vec::with_capacity(4);
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        for e in &entities {
            let id = match *e {
                Entity::Vertex(v) => cell[v],
                Entity::Edge(i) => {
                    let [a, b] = kind.edges()[i];
                    let (a, b) = (cell[a], cell[b]);
                    edge_ids[&[a.min(b), a.max(b)]]
                }
                Entity::Facet(f) => {
                    scratch.clear();
                    scratch.extend(kind.facets()[f].iter().map(|&l| cell[l]));
                    facet_ids[&entity_key(&scratch)]
                }
                Entity::Interior => cell_base + c,
            };
            cell_nodes.push(id);
        }
    }
    let mut space = FESpace {
        mesh,
        disc,
        components,
        nodes_per_cell: n,
        cell_nodes,
        node_positions,
        boundary_nodes: BTreeMap::new(),
        spline: None,
    };
    space.collect_boundary_nodes();
    Ok(space)
}

/// Quadratic B-spline space with clamped uniform knots over a lattice mesh.
pub fn spline_space(mesh: Arc<Mesh>, components: usize) -> Result<FESpace> {
    check_pair(Family::Spline2, mesh.kind())?;
    let lattice = mesh
        .lattice()
        .ok_or_else(|| FemError::IncompatibleDiscretization("SPLINE2 requires a lattice mesh".into()))?
        .clone();
    let dim = mesh.dim();
    let mut dims = lattice.dims;
    for d in dims.iter_mut().skip(dim) {
        *d = 1;
    }
    let mut cell_at = vec![usize::MAX; dims[0] * dims[1] * dims[2]];
    for (c, idx) in lattice.cell_index.iter().enumerate() {
        let slot = idx[0] + dims[0] * (idx[1] + dims[1] * idx[2]);
        if slot >= cell_at.len() || cell_at[slot] != usize::MAX {
            return Err(FemError::IncompatibleDiscretization("inconsistent lattice indices".into()));
        }
        cell_at[slot] = c;
        // reference axes must follow the lattice axes
        let v = mesh.cell_vertices(c);
        let probes: &[usize] = if dim == 3 { &[1, 3, 4] } else { &[1, 3] };
        for (axis, &p) in probes.iter().enumerate() {
            let d: [f64; 3] = [0, 1, 2].map(|k| v[p][k] - v[0][k]);
            if d[axis] <= 0.0 {
                return Err(FemError::IncompatibleDiscretization(format!(
                    "cell {c} is not aligned with the lattice"
                )));
            }
        }
    }
    if cell_at.contains(&usize::MAX) {
        return Err(FemError::IncompatibleDiscretization("lattice has holes".into()));
    }
    let knots = [0, 1, 2].map(|a| spline::clamped_knots(dims[a]));
    let data = SplineData {
        dims,
        knots,
        cell_index: lattice.cell_index.clone(),
        cell_at,
    };
    let fx = data.functions(0);
    let fy = data.functions(1);
    let fz = if dim == 3 { data.functions(2) } else { 1 };
    let per_cell = 3usize.pow(dim as u32);
    let mut cell_nodes = Vec::with_capacity(per_cell * mesh.num_cells());
    for idx in &data.cell_index {
        for l in 0..per_cell {
            let (a, b, cc) = (l % 3, (l / 3) % 3, l / 9);
            cell_nodes.push((idx[0] + a) + fx * ((idx[1] + b) + fy * (idx[2] + cc)));
        }
    }
    // Greville abscissae mapped through the owning cell
    let g = [0, 1, 2].map(|a| spline::greville(dims[a]));
    let mut node_positions = Vec::with_capacity(fx * fy * fz);
    for k in 0..fz {
        for j in 0..fy {
            for i in 0..fx {
                let t = [g[0][i], g[1][j], if dim == 3 { g[2][k] } else { 0.0 }];
                let (c, xi) = data.locate_parameter(t, dim);
                node_positions.push(geometric_map(mesh.kind(), &mesh.cell_vertices(c), xi).point);
            }
        }
    }
    let mut space = FESpace {
        mesh,
        disc: Discretization::new(Family::Spline2),
        components,
        nodes_per_cell: per_cell,
        cell_nodes,
        node_positions,
        boundary_nodes: BTreeMap::new(),
        spline: Some(data),
    };
    space.collect_boundary_nodes();
    Ok(space)
}

impl SplineData {
    /// Cell and local coordinate of a lattice parameter point.
    fn locate_parameter(&self, t: [f64; 3], dim: usize) -> (usize, Point) {
        let mut idx = [0usize; 3];
        let mut xi = [0.0; 3];
        for a in 0..dim {
            let e = (t[a].floor().max(0.0) as usize).min(self.dims[a] - 1);
            idx[a] = e;
            xi[a] = t[a] - e as f64;
        }
        let c = self.cell_at[idx[0] + self.dims[0] * (idx[1] + self.dims[1] * idx[2])];
        (c, xi)
    }
}

fn midpoint(points: &[Point]) -> Point {
    let mut c = [0.0; 3];
    for p in points {
        for k in 0..3 {
            c[k] += p[k] / points.len() as f64;
        }
    }
    c
}

/// Local nodes whose basis functions do not vanish on reference facet `f`.
pub(crate) fn facet_local_nodes(family: Family, kind: CellKind, f: usize) -> Vec<usize> {
    let nodes = lagrange::reference_nodes(family, kind);
    nodes
        .iter()
        .enumerate()
        .filter(|(_, p)| on_reference_facet(kind, f, **p))
        .map(|(i, _)| i)
        .collect()
}

fn on_reference_facet(kind: CellKind, f: usize, p: Point) -> bool {
    const EPS: f64 = 1e-12;
    if kind.is_simplex() {
        let dim = kind.dim();
        if f == 0 {
            1.0 - p[..dim].iter().sum::<f64>() < EPS
        } else {
            p[f - 1].abs() < EPS
        }
    } else {
        let (axis, side) = (f / 2, (f % 2) as f64);
        (p[axis] - side).abs() < EPS
    }
}

impl FESpace {
    fn collect_boundary_nodes(&mut self) {
        let kind = self.mesh.kind();
        let family = self.disc.family;
        let facet_nodes: Vec<Vec<usize>> = (0..kind.num_facets())
            .map(|f| facet_local_nodes(family, kind, f))
            .collect();
        let mut sets: BTreeMap<i32, BTreeSet<usize>> = BTreeMap::new();
        for b in self.mesh.boundary_facets() {
            let cn = self.cell_nodes(b.cell);
            let set = sets.entry(b.tag).or_default();
            set.extend(facet_nodes[b.facet].iter().map(|&l| cn[l]));
        }
        self.boundary_nodes = sets
            .into_iter()
            .map(|(t, s)| (t, s.into_iter().collect()))
            .collect();
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> Arc<Mesh> {
        Arc::clone(&self.mesh)
    }

    pub fn family(&self) -> Family {
        self.disc.family
    }

    pub fn discretization(&self) -> Discretization {
        self.disc
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn num_nodes(&self) -> usize {
        self.node_positions.len()
    }

    pub fn num_dofs(&self) -> usize {
        self.num_nodes() * self.components
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.nodes_per_cell
    }

    pub fn dofs_per_cell(&self) -> usize {
        self.nodes_per_cell * self.components
    }

    /// Scalar node indices of a cell, in local basis order.
    pub fn cell_nodes(&self, c: usize) -> &[usize] {
        &self.cell_nodes[c * self.nodes_per_cell..(c + 1) * self.nodes_per_cell]
    }

    /// Global DOFs of a cell: local node `a`, component `k` sits at `a * components + k`.
    pub fn cell_dofs(&self, c: usize, out: &mut Vec<usize>) {
        out.clear();
        let m = self.components;
        for &n in self.cell_nodes(c) {
            out.extend((0..m).map(|k| n * m + k));
        }
    }

    /// Representative point of each scalar node (Greville points for splines).
    pub fn node_positions(&self) -> &[Point] {
        &self.node_positions
    }

    /// Position of a (possibly vector) DOF.
    pub fn dof_position(&self, dof: usize) -> Point {
        self.node_positions[dof / self.components]
    }

    /// Sorted scalar nodes on facets carrying `tag`.
    pub fn boundary_nodes(&self, tag: i32) -> Result<&[usize]> {
        self.boundary_nodes
            .get(&tag)
            .map(Vec::as_slice)
            .ok_or(FemError::UnknownTag(tag))
    }

    pub fn boundary_tags(&self) -> Vec<i32> {
        self.boundary_nodes.keys().copied().collect()
    }

    pub fn is_spline(&self) -> bool {
        self.spline.is_some()
    }

    /// Same family and mesh with a different number of components.
    pub fn with_components(&self, components: usize) -> FESpace {
        FESpace {
            components,
            ..self.clone()
        }
    }

    /// Coefficients reproducing `f` (components interleaved): nodal values for
    /// Lagrange families, tensor collocation at Greville points for splines.
    pub fn interpolate<F: Fn(Point) -> Vec<f64>>(&self, f: F) -> Vec<f64> {
        let m = self.components;
        let mut coeffs = vec![0.0; self.num_dofs()];
        for (n, p) in self.node_positions.iter().enumerate() {
            let v = f(*p);
            coeffs[n * m..(n + 1) * m].copy_from_slice(&v[..m]);
        }
        if let Some(s) = &self.spline {
            self.spline_collocate(s, &mut coeffs);
        }
        coeffs
    }

    /// Turns Greville-point samples into spline coefficients in place by
    /// solving the 1D collocation systems along each axis.
    fn spline_collocate(&self, s: &SplineData, values: &mut [f64]) {
        let dim = self.dim();
        let m = self.components;
        let counts = [
            s.functions(0),
            s.functions(1),
            if dim == 3 { s.functions(2) } else { 1 },
        ];
        for axis in 0..dim {
            let n = counts[axis];
            let g = spline::greville(s.dims[axis]);
            let mut b = DMatrix::<f64>::zeros(n, n);
            for (r, &t) in g.iter().enumerate() {
                let e = (t.floor() as usize).min(s.dims[axis] - 1);
                let (v, _) = spline::element_basis(&s.knots[axis], e, t - e as f64);
                for a in 0..3 {
                    b[(r, e + a)] = v[a];
                }
            }
            let lu = b.lu();
            let stride = match axis {
                0 => 1,
                1 => counts[0],
                _ => counts[0] * counts[1],
            };
            let total: usize = counts.iter().product();
            for start in 0..total {
                let pos = (start / stride) % n;
                if pos != 0 {
                    continue;
                }
                for k in 0..m {
                    let rhs = nalgebra::DVector::from_iterator(n, (0..n).map(|i| values[(start + i * stride) * m + k]));
                    let sol = lu.solve(&rhs).expect("clamped collocation matrix is nonsingular");
                    for i in 0..n {
                        values[(start + i * stride) * m + k] = sol[i];
                    }
                }
            }
        }
    }

    /// Reference values and gradients of the local basis of cell `c` at `xi`.
    pub fn local_basis(&self, c: usize, xi: Point, values: &mut [f64], grads: &mut [[f64; 3]]) {
        match &self.spline {
            None => lagrange::evaluate(self.disc.family, self.mesh.kind(), xi, values, grads),
            Some(s) => {
                let dim = self.dim();
                let idx = s.cell_index[c];
                let mut f = [([1.0, 1.0, 1.0], [0.0; 3]); 3];
                for a in 0..dim {
                    f[a] = spline::element_basis(&s.knots[a], idx[a], xi[a]);
                    // derivative w.r.t. local coordinate equals parameter derivative
                }
                for l in 0..self.nodes_per_cell {
                    let i = [l % 3, (l / 3) % 3, l / 9];
                    let v = [f[0].0[i[0]], f[1].0[i[1]], f[2].0[i[2]]];
                    let d = [f[0].1[i[0]], f[1].1[i[1]], f[2].1[i[2]]];
                    values[l] = v[0] * v[1] * v[2];
                    grads[l] = [
                        d[0] * v[1] * v[2],
                        v[0] * d[1] * v[2],
                        if dim == 3 { v[0] * v[1] * d[2] } else { 0.0 },
                    ];
                }
            }
        }
    }

    /// Field value (per component) and physical gradient rows at reference
    /// point `xi` of cell `c`.
    pub fn eval_in_cell(&self, c: usize, xi: Point, coeffs: &[f64]) -> (Vec<f64>, Vec<[f64; 3]>) {
        let n = self.nodes_per_cell;
        let mut v = vec![0.0; n];
        let mut g = vec![[0.0; 3]; n];
        self.local_basis(c, xi, &mut v, &mut g);
        let map = geometric_map(self.mesh.kind(), &self.mesh.cell_vertices(c), xi);
        let jinv_t = map.jacobian.try_inverse().unwrap_or_else(Matrix3::zeros).transpose();
        let m = self.components;
        let mut val = vec![0.0; m];
        let mut grad = vec![[0.0; 3]; m];
        for (a, &node) in self.cell_nodes(c).iter().enumerate() {
            let pg = jinv_t * Vector3::from(g[a]);
            for k in 0..m {
                let u = coeffs[node * m + k];
                val[k] += u * v[a];
                for d in 0..3 {
                    grad[k][d] += u * pg[d];
                }
            }
        }
        (val, grad)
    }

    /// Finds a cell containing `x` and its reference coordinates.
    pub fn locate(&self, x: Point) -> Result<(usize, Point)> {
        let mesh = &self.mesh;
        let tol = 1e-8 * mesh.bounding_box_diagonal();
        for c in 0..mesh.num_cells() {
            let verts = mesh.cell_vertices(c);
            let inside_box = (0..mesh.dim()).all(|k| {
                let lo = verts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
                let hi = verts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
                x[k] >= lo - tol && x[k] <= hi + tol
            });
            if !inside_box {
                continue;
            }
            if let Some(xi) = geometry::inverse_map(mesh.kind(), &verts, x, 1e-12) {
                if geometry::in_reference_cell(mesh.kind(), xi, 1e-8) {
                    return Ok((c, clamp_reference(mesh.kind(), xi)));
                }
            }
        }
        Err(FemError::PointOutsideMesh(x))
    }

    /// Field value at a physical point.
    pub fn evaluate_at(&self, coeffs: &[f64], x: Point) -> Result<Vec<f64>> {
        let (c, xi) = self.locate(x)?;
        Ok(self.eval_in_cell(c, xi, coeffs).0)
    }
}

fn clamp_reference(kind: CellKind, mut xi: Point) -> Point {
    for c in xi.iter_mut().take(kind.dim()) {
        *c = c.clamp(0.0, 1.0);
    }
    xi
}

/// Physical basis data of one cell at every point of a quadrature rule.
#[derive(Clone, Debug, Default)]
pub struct CellValues {
    pub num_basis: usize,
    /// `values[q * num_basis + a]`
    pub values: Vec<f64>,
    /// Physical gradients, same layout as `values`.
    pub grads: Vec<[f64; 3]>,
    pub jxw: Vec<f64>,
    pub points: Vec<Point>,
}

impl CellValues {
    pub fn num_points(&self) -> usize {
        self.jxw.len()
    }

    pub fn value(&self, q: usize, a: usize) -> f64 {
        self.values[q * self.num_basis + a]
    }

    pub fn grad(&self, q: usize, a: usize) -> [f64; 3] {
        self.grads[q * self.num_basis + a]
    }

    pub fn basis_values(&self, q: usize) -> &[f64] {
        &self.values[q * self.num_basis..(q + 1) * self.num_basis]
    }

    pub fn basis_grads(&self, q: usize) -> &[[f64; 3]] {
        &self.grads[q * self.num_basis..(q + 1) * self.num_basis]
    }
}

/// Reusable per-cell evaluator; Lagrange families tabulate reference data once.
pub struct CellEvaluator<'a> {
    space: &'a FESpace,
    rule: &'a QuadratureRule,
    ref_values: Vec<f64>,
    ref_grads: Vec<[f64; 3]>,
    verts: Vec<Point>,
    pub cv: CellValues,
}

impl<'a> CellEvaluator<'a> {
    pub fn new(space: &'a FESpace, rule: &'a QuadratureRule) -> Self {
        let n = space.nodes_per_cell;
        let nq = rule.len();
        let mut ref_values = vec![0.0; n * nq];
        let mut ref_grads = vec![[0.0; 3]; n * nq];
        if !space.is_spline() {
            for (q, p) in rule.points.iter().enumerate() {
                space.local_basis(0, *p, &mut ref_values[q * n..(q + 1) * n], &mut ref_grads[q * n..(q + 1) * n]);
            }
        }
        CellEvaluator {
            space,
            rule,
            ref_values,
            ref_grads,
            verts: Vec::with_capacity(8),
            cv: CellValues {
                num_basis: n,
                values: vec![0.0; n * nq],
                grads: vec![[0.0; 3]; n * nq],
                jxw: vec![0.0; nq],
                points: vec![[0.0; 3]; nq],
            },
        }
    }

    pub fn space(&self) -> &FESpace {
        self.space
    }

    /// Recomputes physical data for cell `c`. Returns the smallest signed
    /// Jacobian determinant seen at the quadrature points.
    pub fn reinit(&mut self, c: usize) -> f64 {
        let space = self.space;
        let kind = space.mesh.kind();
        let n = space.nodes_per_cell;
        self.verts.clear();
        self.verts.extend(space.mesh.cell(c).iter().map(|&v| space.mesh.vertices()[v]));
        if space.is_spline() {
            for (q, p) in self.rule.points.iter().enumerate() {
                space.local_basis(c, *p, &mut self.ref_values[q * n..(q + 1) * n], &mut self.ref_grads[q * n..(q + 1) * n]);
            }
        }
        let mut min_det = f64::INFINITY;
        for (q, p) in self.rule.points.iter().enumerate() {
            let map = geometric_map(kind, &self.verts, *p);
            min_det = min_det.min(map.det);
            let jinv_t = map.jacobian.try_inverse().unwrap_or_else(Matrix3::zeros).transpose();
            self.cv.jxw[q] = map.det.abs() * self.rule.weights[q];
            self.cv.points[q] = map.point;
            for a in 0..n {
                let i = q * n + a;
                self.cv.values[i] = self.ref_values[i];
                let g = jinv_t * Vector3::from(self.ref_grads[i]);
                self.cv.grads[i] = [g[0], g[1], g[2]];
            }
        }
        min_det
    }
}

/// Quadrature data on one boundary facet: values of the parent cell's local
/// basis at mapped facet points, with surface weights.
#[derive(Clone, Debug)]
pub struct FacetValues {
    pub values: Vec<Vec<f64>>,
    pub jxw: Vec<f64>,
    pub points: Vec<Point>,
}

impl FESpace {
    /// Evaluates the local basis of `cell` on its local facet `facet` using a
    /// facet rule of the given degree.
    pub fn facet_values(&self, cell: usize, facet: usize, degree: usize) -> Result<FacetValues> {
        let kind = self.mesh.kind();
        let domain = match kind {
            CellKind::Tri | CellKind::Quad => Domain::Segment,
            CellKind::Tet => Domain::Tri,
            CellKind::Hex => Domain::Quad,
        };
        let rule = gauss_rule(domain, degree)?;
        let local = kind.facets()[facet];
        let refs = kind.reference_vertices();
        let ref_facet: Vec<Point> = local.iter().map(|&l| refs[l]).collect();
        let phys = self.mesh.cell_vertices(cell);
        let phys_facet: Vec<Point> = local.iter().map(|&l| phys[l]).collect();
        let n = self.nodes_per_cell;
        let mut out = FacetValues {
            values: Vec::with_capacity(rule.len()),
            jxw: Vec::with_capacity(rule.len()),
            points: Vec::with_capacity(rule.len()),
        };
        let mut g = vec![[0.0; 3]; n];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let (xi, _) = facet_map(domain, &ref_facet, *p);
            let (x, tangents) = facet_map(domain, &phys_facet, *p);
            let measure = match domain {
                Domain::Segment => norm(tangents[0]),
                _ => norm(cross(tangents[0], tangents[1])),
            };
            let mut v = vec![0.0; n];
            self.local_basis(cell, xi, &mut v, &mut g);
            out.values.push(v);
            out.jxw.push(w * measure);
            out.points.push(x);
        }
        Ok(out)
    }
}

/// Point and tangent vectors of a facet parametrised over its reference domain.
fn facet_map(domain: Domain, v: &[Point], s: Point) -> (Point, [Point; 2]) {
    let lin = |w: &[f64]| -> Point {
        let mut p = [0.0; 3];
        for (a, wa) in w.iter().enumerate() {
            for k in 0..3 {
                p[k] += wa * v[a][k];
            }
        }
        p
    };
    let (x, y) = (s[0], s[1]);
    match domain {
        Domain::Segment => (lin(&[1.0 - x, x]), [lin(&[-1.0, 1.0]), [0.0; 3]]),
        Domain::Tri => (lin(&[1.0 - x - y, x, y]), [lin(&[-1.0, 1.0, 0.0]), lin(&[-1.0, 0.0, 1.0])]),
        _ => (
            lin(&[(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y]),
            [
                lin(&[-(1.0 - y), 1.0 - y, y, -y]),
                lin(&[-(1.0 - x), -x, x, 1.0 - x]),
            ],
        ),
    }
}

fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}
