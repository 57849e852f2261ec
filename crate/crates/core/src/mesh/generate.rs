use super::{MeshBuilder, PolyMesh};
use crate::scalar::Scalar;
use crate::{Error, Result};
use nalgebra::Vector3;

fn lattice<S: Scalar>(n: usize) -> Vec<Vector3<S>> {
    let h = S::one() / S::from_count(n);
    let mut v = Vec::with_capacity((n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                v.push(Vector3::new(S::from_count(i) * h, S::from_count(j) * h, S::from_count(k) * h));
            }
        }
    }
    v
}

fn newell_normal<S: Scalar>(lp: &[usize], x: &[Vector3<S>]) -> Vector3<S> {
    let mut n = Vector3::zeros();
    for k in 0..lp.len() {
        n += x[lp[k]].cross(&x[lp[(k + 1) % lp.len()]]);
    }
    n
}

/// Reverses `lp` if its normal points against `dir`.
fn orient<S: Scalar>(mut lp: Vec<usize>, x: &[Vector3<S>], dir: &Vector3<S>) -> Vec<usize> {
    if newell_normal(&lp, x).dot(dir) < S::zero() {
        lp[1..].reverse();
    }
    lp
}

fn outward_loops<S: Scalar>(faces: Vec<Vec<usize>>, x: &[Vector3<S>]) -> Vec<Vec<usize>> {
    let all: Vec<usize> = faces.iter().flatten().copied().collect();
    let centre = all.iter().fold(Vector3::zeros(), |a, &v| a + x[v]) / S::from_count(all.len());
    faces
        .into_iter()
        .map(|lp| {
            let fc = lp.iter().fold(Vector3::zeros(), |a, &v| a + x[v]) / S::from_count(lp.len());
            orient(lp, x, &(fc - centre))
        })
        .collect()
}

/// Uniform `n × n × n` grid of cubes on the unit cube. Every face normal
/// points along the positive coordinate axis it is aligned with.
pub fn build_cube_mesh<S: Scalar>(n: usize) -> Result<PolyMesh<S>> {
    if n == 0 {
        return Err(Error::InvalidArgument("cube mesh resolution must be at least 1".into()));
    }
    let x = lattice::<S>(n);
    let id = |i: usize, j: usize, k: usize| i + (n + 1) * (j + (n + 1) * k);
    let mut b = MeshBuilder::new(x.clone());
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = |a: usize, bb: usize, cc: usize| id(i + a, j + bb, k + cc);
                let faces = vec![
                    vec![c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)],
                    vec![c(0, 0, 0), c(0, 1, 0), c(0, 1, 1), c(0, 0, 1)],
                    vec![c(0, 1, 0), c(1, 1, 0), c(1, 1, 1), c(0, 1, 1)],
                    vec![c(0, 0, 0), c(1, 0, 0), c(1, 0, 1), c(0, 0, 1)],
                    vec![c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)],
                    vec![c(0, 0, 0), c(1, 0, 0), c(1, 1, 0), c(0, 1, 0)],
                ];
                b.add_cell(&outward_loops(faces, &x));
            }
        }
    }
    let mut mesh = b.build()?;
    let axis_flip: Vec<usize> =
        (0..mesh.num_faces()).filter(|&f| newell_normal(&mesh.faces()[f].vertices, &x).sum() < S::zero()).collect();
    for f in axis_flip {
        mesh.flip_face(f);
    }
    Ok(mesh)
}

/// Kuhn subdivision of the cube grid: each cube is split into six
/// tetrahedra sharing the diagonal from its lowest to its highest corner.
pub fn build_tet_mesh<S: Scalar>(n: usize) -> Result<PolyMesh<S>> {
    if n == 0 {
        return Err(Error::InvalidArgument("tetrahedral mesh resolution must be at least 1".into()));
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let x = lattice::<S>(n);
    let id = |p: [usize; 3]| p[0] + (n + 1) * (p[1] + (n + 1) * p[2]);
    let mut b = MeshBuilder::new(x.clone());
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut p = [i, j, k];
                    let mut t = [id(p); 4];
                    for (s, &axis) in perm.iter().enumerate() {
                        p[axis] += 1;
                        t[s + 1] = id(p);
                    }
                    let faces = vec![
                        vec![t[1], t[2], t[3]],
                        vec![t[0], t[2], t[3]],
                        vec![t[0], t[1], t[3]],
                        vec![t[0], t[1], t[2]],
                    ];
                    b.add_cell(&outward_loops(faces, &x));
                }
            }
        }
    }
    b.build()
}
