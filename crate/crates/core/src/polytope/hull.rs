//! Beneath-beyond convex hull in small dimension.
//!
//! The hull is grown as a simplicial complex: every facet is a simplex of
//! `dim` input points. Points are inserted farthest first from the centroid
//! of the initial simplex, which keeps interior points cheap to discard.
//! Once all points are in, adjacent simplices that lie in a common
//! hyperplane (within tolerance) are merged into single facets, and points
//! that are not extreme (face interiors, edge midpoints) are dropped.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{
    centroid, coordinates, distance, distance_to_span, dot, hyperplane_normal, normalized,
    orthonormal_complement, orthonormal_span, simplex_volume, sub, try_extend_basis,
};
use crate::scalar::Real;

use super::{Facet, HullOptions};

pub(crate) struct HullData<T> {
    pub vertices: Vec<Vec<T>>,
    pub facets: Vec<Facet<T>>,
    pub volume: T,
    pub diameter: T,
}

struct Simplex<T> {
    verts: Vec<usize>,
    normal: Vec<T>,
    offset: T,
    alive: bool,
}

pub(crate) fn validate<T: Real>(points: &[Vec<T>], dim: usize, opts: &HullOptions) -> Result<()> {
    if dim < 1 || dim > opts.max_dim {
        return Err(Error::Capacity(format!(
            "dimension {dim} outside supported range 1..={}",
            opts.max_dim
        )));
    }
    if points.len() > opts.max_points {
        return Err(Error::Capacity(format!(
            "{} points exceed the limit of {}",
            points.len(),
            opts.max_points
        )));
    }
    Ok(())
}

/// Hull of `points` in dimension `dim >= 1`; no capacity checks.
pub(crate) fn build<T: Real>(points: &[Vec<T>], dim: usize, rel_tol: T) -> Result<HullData<T>> {
    if points.len() < dim + 1 {
        return Err(Error::Dimension(format!(
            "{} points cannot span dimension {dim}",
            points.len()
        )));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::Dimension(format!(
                "point of length {} in dimension {dim}",
                p.len()
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
    }
    let mut diameter = T::zero();
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            diameter = diameter.max(distance(p, q));
        }
    }
    if !(diameter > T::zero()) {
        return Err(Error::Dimension("all points coincide".into()));
    }
    let tol = rel_tol * diameter;
    if dim == 1 {
        return Ok(build_segment(points, diameter));
    }

    let seed = initial_simplex(points, dim, tol)?;
    let seed_pts: Vec<&[T]> = seed.iter().map(|&i| &points[i][..]).collect();
    let interior = centroid(&seed_pts);

    let mut simplices: Vec<Simplex<T>> = Vec::new();
    for skip in 0..=dim {
        let mut verts: Vec<usize> = seed
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(_, &v)| v)
            .collect();
        verts.sort_unstable();
        simplices.push(make_simplex(points, verts, &interior)?);
    }

    let mut order: Vec<usize> = (0..points.len()).filter(|i| !seed.contains(i)).collect();
    let far: Vec<T> = points.iter().map(|p| distance(p, &interior)).collect();
    order.sort_by(|&a, &b| {
        far[b]
            .partial_cmp(&far[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    for &pi in &order {
        let p = &points[pi];
        let visible: Vec<usize> = simplices
            .iter()
            .enumerate()
            .filter(|(_, s)| dot(&s.normal, p) - s.offset > tol)
            .map(|(k, _)| k)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for &k in &visible {
            let vs = &simplices[k].verts;
            for skip in 0..vs.len() {
                let r: Vec<usize> = vs
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *ridges.entry(r).or_insert(0) += 1;
            }
            simplices[k].alive = false;
        }
        let mut horizon: Vec<Vec<usize>> = ridges
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(r, _)| r)
            .collect();
        horizon.sort();
        simplices.retain(|s| s.alive);
        for mut r in horizon {
            r.push(pi);
            r.sort_unstable();
            simplices.push(make_simplex(points, r, &interior)?);
        }
    }

    merge(points, dim, simplices, tol, diameter, rel_tol)
}

fn build_segment<T: Real>(points: &[Vec<T>], diameter: T) -> HullData<T> {
    let mut lo = 0;
    let mut hi = 0;
    for (i, p) in points.iter().enumerate() {
        if p[0] < points[lo][0] {
            lo = i;
        }
        if p[0] > points[hi][0] {
            hi = i;
        }
    }
    let (a, b) = (points[lo][0], points[hi][0]);
    HullData {
        vertices: vec![vec![a], vec![b]],
        facets: vec![
            Facet {
                normal: vec![-T::one()],
                offset: -a,
                vertex_ids: vec![0],
                measure: T::one(),
            },
            Facet {
                normal: vec![T::one()],
                offset: b,
                vertex_ids: vec![1],
                measure: T::one(),
            },
        ],
        volume: b - a,
        diameter,
    }
}

fn initial_simplex<T: Real>(points: &[Vec<T>], dim: usize, tol: T) -> Result<Vec<usize>> {
    let mut first = 0;
    for (i, p) in points.iter().enumerate() {
        if p[0] < points[first][0] {
            first = i;
        }
    }
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<T>> = Vec::new();
    while chosen.len() <= dim {
        let mut best = None;
        let mut best_d = T::zero();
        for (i, p) in points.iter().enumerate() {
            let d = distance_to_span(&sub(p, &points[first]), &basis);
            if d > best_d {
                best_d = d;
                best = Some(i);
            }
        }
        match best {
            Some(i) if best_d > tol => {
                let v = sub(&points[i], &points[first]);
                try_extend_basis(&mut basis, &v, T::zero());
                chosen.push(i);
            }
            _ => {
                return Err(Error::Dimension(format!(
                    "points span only {} of {dim} dimensions",
                    chosen.len() - 1
                )))
            }
        }
    }
    Ok(chosen)
}

fn make_simplex<T: Real>(points: &[Vec<T>], verts: Vec<usize>, interior: &[T]) -> Result<Simplex<T>> {
    let pts: Vec<&[T]> = verts.iter().map(|&v| &points[v][..]).collect();
    let mut normal = hyperplane_normal(&pts, T::epsilon())
        .ok_or_else(|| Error::Internal("degenerate simplex on the hull".into()))?;
    let mut offset = pts.iter().map(|p| dot(&normal, p)).sum::<T>() / T::count(pts.len());
    if dot(&normal, interior) > offset {
        normal.iter_mut().for_each(|x| *x = -*x);
        offset = -offset;
    }
    Ok(Simplex {
        verts,
        normal,
        offset,
        alive: true,
    })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn merge<T: Real>(
    points: &[Vec<T>],
    dim: usize,
    simplices: Vec<Simplex<T>>,
    tol: T,
    diameter: T,
    rel_tol: T,
) -> Result<HullData<T>> {
    let ns = simplices.len();
    let mut adjacency: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (k, s) in simplices.iter().enumerate() {
        for skip in 0..s.verts.len() {
            let r: Vec<usize> = s
                .verts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| v)
                .collect();
            adjacency.entry(r).or_default().push(k);
        }
    }
    let coplanar = |a: &Simplex<T>, b: &Simplex<T>| {
        dot(&a.normal, &b.normal) > T::zero()
            && b.verts
                .iter()
                .all(|&v| (dot(&a.normal, &points[v]) - a.offset).abs() <= tol)
            && a.verts
                .iter()
                .all(|&v| (dot(&b.normal, &points[v]) - b.offset).abs() <= tol)
    };
    let mut parent: Vec<usize> = (0..ns).collect();
    let mut ridge_keys: Vec<&Vec<usize>> = adjacency.keys().collect();
    ridge_keys.sort();
    for r in ridge_keys {
        let owners = &adjacency[r];
        if owners.len() != 2 {
            return Err(Error::Internal(format!(
                "ridge shared by {} simplices",
                owners.len()
            )));
        }
        let (a, b) = (owners[0], owners[1]);
        if coplanar(&simplices[a], &simplices[b]) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    for k in 0..ns {
        let root = find(&mut parent, k);
        let g = *group_of.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(k);
    }

    let mut candidates: Vec<usize> = simplices.iter().flat_map(|s| s.verts.iter().copied()).collect();
    candidates.sort_unstable();
    candidates.dedup();

    struct Plane<T> {
        normal: Vec<T>,
        offset: T,
        members: Vec<usize>,
    }
    let mut planes: Vec<Plane<T>> = Vec::with_capacity(groups.len());
    for g in &groups {
        let mut acc = vec![T::zero(); dim];
        let mut on_plane: Vec<usize> = Vec::new();
        for &k in g {
            let s = &simplices[k];
            let pts: Vec<&[T]> = s.verts.iter().map(|&v| &points[v][..]).collect();
            let area = simplex_volume(&pts);
            for (a, &nv) in acc.iter_mut().zip(&s.normal) {
                *a += area * nv;
            }
            on_plane.extend(s.verts.iter().copied());
        }
        on_plane.sort_unstable();
        on_plane.dedup();
        let normal = normalized(&acc).unwrap_or_else(|| simplices[g[0]].normal.clone());
        let offset =
            on_plane.iter().map(|&v| dot(&normal, &points[v])).sum::<T>() / T::count(on_plane.len());
        let members: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&v| (dot(&normal, &points[v]) - offset).abs() <= tol)
            .collect();
        planes.push(Plane {
            normal,
            offset,
            members,
        });
    }

    // A candidate is a vertex iff the normals of its facets span the space.
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (f, pl) in planes.iter().enumerate() {
        for &v in &pl.members {
            incident.entry(v).or_default().push(f);
        }
    }
    let mut new_index: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Vec<T>> = Vec::new();
    for &v in &candidates {
        let normals: Vec<&[T]> = incident
            .get(&v)
            .map(|fs| fs.iter().map(|&f| &planes[f].normal[..]).collect())
            .unwrap_or_default();
        if orthonormal_span(&normals, T::tol(1e-7)).len() == dim {
            new_index.insert(v, vertices.len());
            vertices.push(points[v].clone());
        }
    }

    let mut facets: Vec<Facet<T>> = Vec::with_capacity(planes.len());
    for pl in planes {
        let mut ids: Vec<usize> = pl.members.iter().filter_map(|v| new_index.get(v).copied()).collect();
        ids.sort_unstable();
        let measure = facet_measure(&vertices, &ids, &pl.normal, rel_tol)?;
        facets.push(Facet {
            normal: pl.normal,
            offset: pl.offset,
            vertex_ids: ids,
            measure,
        });
    }
    facets.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));

    let refs: Vec<&[T]> = vertices.iter().map(|v| &v[..]).collect();
    let c = centroid(&refs);
    let volume = facets
        .iter()
        .map(|f| (f.offset - dot(&c, &f.normal)) * f.measure)
        .sum::<T>()
        / T::count(dim);
    Ok(HullData {
        vertices,
        facets,
        volume,
        diameter,
    })
}

/// `(dim-1)`-measure of the facet spanned by `ids`, via the hull of its
/// vertices in coordinates of the facet hyperplane.
fn facet_measure<T: Real>(vertices: &[Vec<T>], ids: &[usize], normal: &[T], rel_tol: T) -> Result<T> {
    let dim = normal.len();
    if dim == 1 {
        return Ok(T::one());
    }
    let basis = orthonormal_complement(&[normal.to_vec()], dim);
    let pts: Vec<&[T]> = ids.iter().map(|&i| &vertices[i][..]).collect();
    let c = centroid(&pts);
    let local: Vec<Vec<T>> = pts.iter().map(|p| coordinates(&sub(p, &c), &basis)).collect();
    Ok(build(&local, dim - 1, rel_tol)?.volume)
}
