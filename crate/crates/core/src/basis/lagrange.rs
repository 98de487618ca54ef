//! Reference shape functions of the nodal families.
//!
//! Local node order: vertices (VTK order), then one node per edge in the
//! cell's edge order, then (Q2 only) one per facet in facet order, then the
//! cell centre. SPLINE2 at reference level is the single-element clamped
//! case, i.e. the tensor quadratic Bernstein basis in lexicographic order.

use crate::mesh::{CellKind, Point};

use super::Family;

/// Topological entity a local node sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
    Facet(usize),
    Interior,
}

/// Entities carrying the local nodes, in local order.
pub fn node_entities(family: Family, kind: CellKind) -> Vec<Entity> {
    let nv = kind.num_vertices();
    let mut out: Vec<Entity> = (0..nv).map(Entity::Vertex).collect();
    match family {
        Family::P1 | Family::Q1 => {}
        Family::P2 | Family::Ser2 => out.extend((0..kind.edges().len()).map(Entity::Edge)),
        Family::Q2 => {
            out.extend((0..kind.edges().len()).map(Entity::Edge));
            if kind == CellKind::Hex {
                out.extend((0..kind.num_facets()).map(Entity::Facet));
            }
            out.push(Entity::Interior);
        }
        Family::Spline2 => unreachable!("spline nodes are not entity based"),
    }
    out
}

/// Local vertices spanned by an entity.
pub fn entity_vertices(kind: CellKind, e: Entity) -> Vec<usize> {
    match e {
        Entity::Vertex(v) => vec![v],
        Entity::Edge(i) => kind.edges()[i].to_vec(),
        Entity::Facet(f) => kind.facets()[f].to_vec(),
        Entity::Interior => (0..kind.num_vertices()).collect(),
    }
}

/// Reference coordinates of the local nodes (entity centroids).
pub fn reference_nodes(family: Family, kind: CellKind) -> Vec<Point> {
    if family == Family::Spline2 {
        let d = kind.dim();
        let n = 3usize.pow(d as u32);
        return (0..n)
            .map(|i| {
                let mut p = [0.0; 3];
                for (k, pk) in p.iter_mut().enumerate().take(d) {
                    *pk = ((i / 3usize.pow(k as u32)) % 3) as f64 * 0.5;
                }
                p
            })
            .collect();
    }
    let refs = kind.reference_vertices();
    node_entities(family, kind)
        .into_iter()
        .map(|e| {
            let vs = entity_vertices(kind, e);
            let mut p = [0.0; 3];
            for v in &vs {
                for k in 0..3 {
                    p[k] += refs[*v][k] / vs.len() as f64;
                }
            }
            p
        })
        .collect()
}

pub fn local_size(family: Family, kind: CellKind) -> usize {
    match family {
        Family::Spline2 => 3usize.pow(kind.dim() as u32),
        _ => node_entities(family, kind).len(),
    }
}

/// 1D quadratic Lagrange on nodes {0, 1/2, 1}: value and derivative.
fn lagrange_1d(node: usize, x: f64) -> (f64, f64) {
    match node {
        0 => ((1.0 - x) * (1.0 - 2.0 * x), 4.0 * x - 3.0),
        1 => (4.0 * x * (1.0 - x), 4.0 - 8.0 * x),
        _ => (x * (2.0 * x - 1.0), 4.0 * x - 1.0),
    }
}

/// Quadratic Bernstein polynomials on [0, 1].
fn bernstein_1d(i: usize, x: f64) -> (f64, f64) {
    match i {
        0 => ((1.0 - x) * (1.0 - x), -2.0 * (1.0 - x)),
        1 => (2.0 * x * (1.0 - x), 2.0 - 4.0 * x),
        _ => (x * x, 2.0 * x),
    }
}

fn barycentric(kind: CellKind, xi: Point) -> ([f64; 4], [[f64; 3]; 4]) {
    let [x, y, z] = xi;
    match kind {
        CellKind::Tri => (
            [1.0 - x - y, x, y, 0.0],
            [[-1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0; 3]],
        ),
        _ => (
            [1.0 - x - y - z, x, y, z],
            [[-1.0, -1.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        ),
    }
}

/// Evaluates all local shape functions and their reference gradients.
/// Slices must hold at least [`local_size`] entries.
pub fn evaluate(family: Family, kind: CellKind, xi: Point, values: &mut [f64], grads: &mut [[f64; 3]]) {
    let dim = kind.dim();
    match family {
        Family::P1 | Family::Q1 => super::geometry::vertex_shape(kind, xi, values, grads),
        Family::P2 => {
            let (l, g) = barycentric(kind, xi);
            let nv = kind.num_vertices();
            for i in 0..nv {
                values[i] = l[i] * (2.0 * l[i] - 1.0);
                grads[i] = g[i].map(|c| c * (4.0 * l[i] - 1.0));
            }
            for (e, &[a, b]) in kind.edges().iter().enumerate() {
                values[nv + e] = 4.0 * l[a] * l[b];
                grads[nv + e] = [0, 1, 2].map(|k| 4.0 * (g[a][k] * l[b] + l[a] * g[b][k]));
            }
        }
        Family::Q2 => {
            let nodes = reference_nodes(family, kind);
            for (i, p) in nodes.iter().enumerate() {
                let idx = p.map(|c| (2.0 * c).round() as usize);
                let mut f = [(1.0, 0.0); 3];
                for k in 0..dim {
                    f[k] = lagrange_1d(idx[k], xi[k]);
                }
                values[i] = f[0].0 * f[1].0 * f[2].0;
                grads[i] = [
                    f[0].1 * f[1].0 * f[2].0,
                    f[0].0 * f[1].1 * f[2].0,
                    if dim == 3 { f[0].0 * f[1].0 * f[2].1 } else { 0.0 },
                ];
            }
        }
        Family::Ser2 => serendipity(kind, xi, values, grads),
        Family::Spline2 => {
            let n = local_size(family, kind);
            for i in 0..n {
                let idx = [i % 3, (i / 3) % 3, i / 9];
                let mut f = [(1.0, 0.0); 3];
                for k in 0..dim {
                    f[k] = bernstein_1d(idx[k], xi[k]);
                }
                values[i] = f[0].0 * f[1].0 * f[2].0;
                grads[i] = [
                    f[0].1 * f[1].0 * f[2].0,
                    f[0].0 * f[1].1 * f[2].0,
                    if dim == 3 { f[0].0 * f[1].0 * f[2].1 } else { 0.0 },
                ];
            }
        }
    }
}

/// 8-node quad / 20-node hex serendipity functions, written on [-1, 1]^d and
/// pulled back to [0, 1]^d (derivatives pick up a factor 2).
fn serendipity(kind: CellKind, xi: Point, values: &mut [f64], grads: &mut [[f64; 3]]) {
    let dim = kind.dim();
    let s: [f64; 3] = [0, 1, 2].map(|k| if k < dim { 2.0 * xi[k] - 1.0 } else { 0.0 });
    let nodes = reference_nodes(Family::Ser2, kind);
    let nv = kind.num_vertices();
    for (i, p) in nodes.iter().enumerate() {
        let c: [f64; 3] = [0, 1, 2].map(|k| if k < dim { 2.0 * p[k] - 1.0 } else { 0.0 });
        let mut g = [0.0; 3];
        if i < nv {
            // corner: prod(1 + s c) * (sum(s c) - (dim - 1)) / 2^dim
            let f: Vec<f64> = (0..dim).map(|k| 1.0 + s[k] * c[k]).collect();
            let prod: f64 = f.iter().product();
            let sum: f64 = (0..dim).map(|k| s[k] * c[k]).sum::<f64>() - (dim as f64 - 1.0);
            let scale = 1.0 / f64::from(1u32 << dim);
            values[i] = scale * prod * sum;
            for k in 0..dim {
                let others: f64 = (0..dim).filter(|&m| m != k).map(|m| f[m]).product();
                g[k] = scale * (c[k] * others * sum + prod * c[k]) * 2.0;
            }
        } else {
            // edge midpoint: the axis with c = 0 carries (1 - s^2)
            let axis = (0..dim).find(|&k| c[k] == 0.0).unwrap();
            let scale = 1.0 / f64::from(1u32 << (dim - 1));
            let mut f = [1.0; 3];
            let mut df = [0.0; 3];
            for k in 0..dim {
                if k == axis {
                    f[k] = 1.0 - s[k] * s[k];
                    df[k] = -2.0 * s[k];
                } else {
                    f[k] = 1.0 + s[k] * c[k];
                    df[k] = c[k];
                }
            }
            values[i] = scale * f[0] * f[1] * f[2];
            for k in 0..dim {
                let others: f64 = (0..dim).filter(|&m| m != k).map(|m| f[m]).product();
                g[k] = scale * df[k] * others * 2.0;
            }
        }
        grads[i] = g;
    }
}
