//! Dense reference computations of the local projectors and form matrices.
//!
//! Everything here works from raw vertex coordinates and face loops with its
//! own quadrature and unscaled global polynomial bases. On cubes and
//! tetrahedra the lowest-order edge and face spaces consist of polynomials;
//! they are recovered as the nullspace of their defining constraints inside a
//! full quadratic ansatz. The velocity space is virtual on every cell, so its
//! projectors are rebuilt from the moment conditions that define it.

use mhdvem::mesh::PolyMesh;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

const GL_X: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Gauss-Legendre rule on `[0, 1]`.
fn gauss01() -> impl Iterator<Item = (f64, f64)> {
    GL_X.iter().zip(GL_W.iter()).map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
}

#[derive(Clone, Debug, Default)]
pub struct Rule {
    pub points: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn sum<T, F>(&self, f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Clone,
        F: Fn(&Vector3<f64>) -> T,
    {
        let mut it = self.points.iter().zip(&self.weights);
        let (p0, w0) = it.next().unwrap();
        it.fold(f(p0) * *w0, |acc, (p, &w)| acc + f(p) * w)
    }

    fn triangle(&mut self, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) {
        let jac = (b - a).cross(&(c - a)).norm();
        for (u, wu) in gauss01() {
            for (v, wv) in gauss01() {
                let (s, t) = (u, v * (1.0 - u));
                self.points.push(a + (b - a) * s + (c - a) * t);
                self.weights.push(wu * wv * (1.0 - u) * jac);
            }
        }
    }

    fn tetrahedron(&mut self, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>) {
        let jac = Matrix3::from_columns(&[b - a, c - a, d - a]).determinant().abs();
        for (u, wu) in gauss01() {
            for (v, wv) in gauss01() {
                for (r, wr) in gauss01() {
                    let (s, t, q) = (u, v * (1.0 - u), r * (1.0 - u) * (1.0 - v));
                    self.points.push(a + (b - a) * s + (c - a) * t + (d - a) * q);
                    self.weights.push(wu * wv * wr * (1.0 - u) * (1.0 - u) * (1.0 - v) * jac);
                }
            }
        }
    }
}

pub struct OracleFace {
    /// Vertex positions in stored loop order.
    pub loop_points: Vec<Vector3<f64>>,
    /// Global vertex indices in stored loop order.
    pub loop_vertices: Vec<usize>,
    /// Unit normal of the stored orientation.
    pub normal: Vector3<f64>,
    /// `+1` when the stored normal points out of the cell.
    pub sigma: f64,
    pub area: f64,
    pub centroid: Vector3<f64>,
    pub rule: Rule,
}

pub struct OracleCell {
    pub vertices: Vec<usize>,
    pub points: Vec<Vector3<f64>>,
    pub faces: Vec<OracleFace>,
    /// Stored edge endpoints of the local edges.
    pub edges: Vec<[Vector3<f64>; 2]>,
    /// Number of cell faces containing each local edge.
    pub edge_multiplicity: Vec<f64>,
    pub volume: f64,
    pub centroid: Vector3<f64>,
    pub diameter: f64,
    pub rule: Rule,
}

impl OracleCell {
    pub fn new(mesh: &PolyMesh<f64>, cell: usize) -> Self {
        let topo = mesh.cell_topology(cell);
        let xs = mesh.vertices();
        let points: Vec<Vector3<f64>> = topo.vertices.iter().map(|&v| xs[v]).collect();
        let center = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
        let mut faces = Vec::new();
        let mut rule = Rule::default();
        for sf in &mesh.cells()[cell].faces {
            let lv = mesh.faces()[sf.index].vertices.clone();
            let lp: Vec<Vector3<f64>> = lv.iter().map(|&v| xs[v]).collect();
            let mut newell = Vector3::zeros();
            for a in 0..lp.len() {
                newell += lp[a].cross(&lp[(a + 1) % lp.len()]);
            }
            let normal = newell.normalize();
            let mut fr = Rule::default();
            for a in 1..lp.len() - 1 {
                fr.triangle(&lp[0], &lp[a], &lp[a + 1]);
                rule.tetrahedron(&center, &lp[0], &lp[a], &lp[a + 1]);
            }
            let area = fr.weights.iter().sum::<f64>();
            let centroid = fr.sum(|x| *x) / area;
            let sigma = if normal.dot(&(centroid - center)) > 0.0 { 1.0 } else { -1.0 };
            faces.push(OracleFace { loop_points: lp, loop_vertices: lv, normal, sigma, area, centroid, rule: fr });
        }
        let volume = rule.weights.iter().sum::<f64>();
        let centroid = rule.sum(|x| *x) / volume;
        let mut diameter: f64 = 0.0;
        for a in &points {
            for b in &points {
                diameter = diameter.max((a - b).norm());
            }
        }
        let mut edges = Vec::new();
        let mut edge_multiplicity = Vec::new();
        for &e in &topo.edges {
            let [a, b] = mesh.edges()[e];
            edges.push([xs[a], xs[b]]);
            let m = faces
                .iter()
                .filter(|f| {
                    let k = f.loop_vertices.len();
                    (0..k).any(|i| {
                        let (p, q) = (f.loop_vertices[i], f.loop_vertices[(i + 1) % k]);
                        (p == a && q == b) || (p == b && q == a)
                    })
                })
                .count();
            edge_multiplicity.push(m as f64);
        }
        Self {
            vertices: topo.vertices.clone(),
            points,
            faces,
            edges,
            edge_multiplicity,
            volume,
            centroid,
            diameter,
            rule,
        }
    }

    pub fn num_velocity_dofs(&self) -> usize {
        3 * self.points.len() + self.faces.len()
    }

    fn local_vertex(&self, global: usize) -> usize {
        self.vertices.iter().position(|&v| v == global).unwrap()
    }
}

/// Quadratic vector fields `Σ_k c[3 m + i] m_k(x − x0) e_i` over the ten
/// monomials of degree at most two.
#[derive(Clone, Copy)]
struct Quadratic {
    x0: Vector3<f64>,
}

impl Quadratic {
    const LEN: usize = 30;

    fn monomials(&self, x: &Vector3<f64>) -> ([f64; 10], [[f64; 3]; 10]) {
        let d = x - self.x0;
        let (a, b, c) = (d.x, d.y, d.z);
        let v = [1.0, a, b, c, a * a, a * b, a * c, b * b, b * c, c * c];
        let g = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [2.0 * a, 0.0, 0.0],
            [b, a, 0.0],
            [c, 0.0, a],
            [0.0, 2.0 * b, 0.0],
            [0.0, c, b],
            [0.0, 0.0, 2.0 * c],
        ];
        (v, g)
    }

    /// Rows: value components, as linear functionals of the coefficients.
    fn value(&self, x: &Vector3<f64>) -> DMatrix<f64> {
        let (v, _) = self.monomials(x);
        let mut m = DMatrix::zeros(3, Self::LEN);
        for k in 0..10 {
            for i in 0..3 {
                m[(i, 3 * k + i)] = v[k];
            }
        }
        m
    }

    /// Row `3 i + j` holds `∂_j E_i`.
    fn jacobian(&self, x: &Vector3<f64>) -> DMatrix<f64> {
        let (_, g) = self.monomials(x);
        let mut m = DMatrix::zeros(9, Self::LEN);
        for k in 0..10 {
            for i in 0..3 {
                for j in 0..3 {
                    m[(3 * i + j, 3 * k + i)] = g[k][j];
                }
            }
        }
        m
    }

    fn divergence(&self, x: &Vector3<f64>) -> DMatrix<f64> {
        let j = self.jacobian(x);
        j.rows(0, 1) + j.rows(4, 1) + j.rows(8, 1)
    }

    fn curl(&self, x: &Vector3<f64>) -> DMatrix<f64> {
        let j = self.jacobian(x);
        let d = |i: usize, k: usize| j.rows(3 * i + k, 1).into_owned();
        let mut m = DMatrix::zeros(3, Self::LEN);
        m.rows_mut(0, 1).copy_from(&(d(2, 1) - d(1, 2)));
        m.rows_mut(1, 1).copy_from(&(d(0, 2) - d(2, 0)));
        m.rows_mut(2, 1).copy_from(&(d(1, 0) - d(0, 1)));
        m
    }
}

fn row(v: &Vector3<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(1, 3, v.as_slice())
}

/// Orthonormal basis of the nullspace of `c`, as columns.
fn nullspace(c: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = c.clone().svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.max();
    let mut cols = Vec::new();
    for k in 0..vt.nrows() {
        let s = if k < svd.singular_values.len() { svd.singular_values[k] } else { 0.0 };
        if s < 1e-10 * smax {
            cols.push(vt.row(k).transpose());
        }
    }
    DMatrix::from_columns(&cols)
}

fn stack(rows: Vec<DMatrix<f64>>) -> DMatrix<f64> {
    let n: usize = rows.iter().map(|r| r.nrows()).sum();
    let mut m = DMatrix::zeros(n, Quadratic::LEN);
    let mut at = 0;
    for r in rows {
        m.rows_mut(at, r.nrows()).copy_from(&r);
        at += r.nrows();
    }
    m
}

/// Points spread over a convex face, enough to pin a quadratic.
fn face_samples(f: &OracleFace) -> Vec<Vector3<f64>> {
    let mut s = Vec::new();
    let k = f.loop_points.len();
    for a in 0..k {
        let p = f.loop_points[a];
        let q = f.loop_points[(a + 1) % k];
        s.push(p * 0.7 + f.centroid * 0.3);
        s.push((p + q) * 0.35 + f.centroid * 0.3);
    }
    s.push(f.centroid);
    s
}

fn cell_samples(cell: &OracleCell) -> Vec<Vector3<f64>> {
    let mut s: Vec<Vector3<f64>> = cell.points.iter().map(|p| p * 0.6 + cell.centroid * 0.4).collect();
    s.push(cell.centroid);
    s
}

/// Reference edge-space data: `Π0` (3 × ne), the curl in face DoFs
/// (nf × ne), and the basis dimension found.
pub struct EdgeOracle {
    pub dimension: usize,
    pub pi_zero: DMatrix<f64>,
    pub curl: DMatrix<f64>,
}

pub fn edge_space(cell: &OracleCell) -> EdgeOracle {
    let q = Quadratic { x0: cell.centroid };
    let mut rows = Vec::new();
    for [a, b] in &cell.edges {
        let t = (b - a).normalize();
        let at = |s: f64| row(&t) * q.value(&(a + (b - a) * s));
        for s in [0.25, 0.5, 1.0] {
            rows.push(at(s) - at(0.0));
        }
    }
    for f in &cell.faces {
        let t1 = (f.loop_points[1] - f.loop_points[0]).normalize();
        let t2 = f.normal.cross(&t1);
        // tangential divergence and rotation of the trace, both linear on the face
        let diff = |x: &Vector3<f64>| {
            let j = q.jacobian(x);
            let dd = |u: &Vector3<f64>, v: &Vector3<f64>| {
                // u · (∇E) v
                let mut r = DMatrix::zeros(1, Quadratic::LEN);
                for i in 0..3 {
                    for k in 0..3 {
                        r += j.rows(3 * i + k, 1) * (u[i] * v[k]);
                    }
                }
                r
            };
            (dd(&t1, &t1) + dd(&t2, &t2), dd(&t2, &t1) - dd(&t1, &t2))
        };
        let samples = face_samples(f);
        let (d0, r0) = diff(&samples[0]);
        for x in &samples[1..] {
            let (d, r) = diff(x);
            rows.push(d - &d0);
            rows.push(r - &r0);
        }
        rows.push(f.rule.sum(|x| row(&(x - f.centroid)) * q.value(x)));
    }
    for x in cell_samples(cell) {
        rows.push(q.divergence(&x));
    }
    for m in 0..3 {
        let e = Vector3::ith(m, 1.0);
        rows.push(cell.rule.sum(|x| row(&(x - cell.centroid).cross(&e)) * q.curl(x)));
    }
    let basis = nullspace(&stack(rows));
    let dimension = basis.ncols();
    let ne = cell.edges.len();
    let mut dofs = DMatrix::zeros(ne, dimension);
    for (k, [a, b]) in cell.edges.iter().enumerate() {
        let t = (b - a).normalize();
        let r = row(&t) * q.value(&((a + b) * 0.5)) * &basis;
        dofs.row_mut(k).copy_from(&r);
    }
    let mean = cell.rule.sum(|x| q.value(x)) * (1.0 / cell.volume) * &basis;
    let nf = cell.faces.len();
    let mut curl = DMatrix::zeros(nf, dimension);
    for (k, f) in cell.faces.iter().enumerate() {
        let r = f.rule.sum(|x| row(&f.normal) * q.curl(x)) * (1.0 / f.area) * &basis;
        curl.row_mut(k).copy_from(&r);
    }
    let inv = if dimension == ne { dofs.clone().try_inverse() } else { None };
    match inv {
        Some(inv) => EdgeOracle { dimension, pi_zero: mean * &inv, curl: curl * &inv },
        None => EdgeOracle { dimension, pi_zero: DMatrix::zeros(3, ne), curl: DMatrix::zeros(nf, ne) },
    }
}

pub struct FaceOracle {
    pub dimension: usize,
    pub pi_zero: DMatrix<f64>,
}

pub fn face_space(cell: &OracleCell) -> FaceOracle {
    let q = Quadratic { x0: cell.centroid };
    let mut rows = Vec::new();
    for f in &cell.faces {
        let samples = face_samples(f);
        let r0 = row(&f.normal) * q.value(&samples[0]);
        for x in &samples[1..] {
            rows.push(row(&f.normal) * q.value(x) - &r0);
        }
    }
    let samples = cell_samples(cell);
    let (d0, c0) = (q.divergence(&samples[0]), q.curl(&samples[0]));
    for x in &samples[1..] {
        rows.push(q.divergence(x) - &d0);
        rows.push(q.curl(x) - &c0);
    }
    for m in 0..3 {
        let e = Vector3::ith(m, 1.0);
        rows.push(cell.rule.sum(|x| row(&(x - cell.centroid).cross(&e)) * q.value(x)));
    }
    let basis = nullspace(&stack(rows));
    let dimension = basis.ncols();
    let nf = cell.faces.len();
    let mut dofs = DMatrix::zeros(nf, dimension);
    for (k, f) in cell.faces.iter().enumerate() {
        let r = row(&f.normal) * q.value(&f.centroid) * &basis;
        dofs.row_mut(k).copy_from(&r);
    }
    let mean = cell.rule.sum(|x| q.value(x)) * (1.0 / cell.volume) * &basis;
    match (dimension == nf).then(|| dofs.try_inverse()).flatten() {
        Some(inv) => FaceOracle { dimension, pi_zero: mean * inv },
        None => FaceOracle { dimension, pi_zero: DMatrix::zeros(3, nf) },
    }
}

/// `|P| ΠᵀΠ + (I − D Π)ᵀ diag(s) (I − D Π)` with `D` the DoFs of constants.
pub fn discrete_product(cell: &OracleCell, pi: &DMatrix<f64>, const_dofs: &DMatrix<f64>, s: &[f64]) -> DMatrix<f64> {
    let n = pi.ncols();
    let r = DMatrix::identity(n, n) - const_dofs * pi;
    pi.transpose() * pi * cell.volume + r.transpose() * DMatrix::from_diagonal(&DVector::from_column_slice(s)) * r
}

pub fn edge_product(cell: &OracleCell, pi: &DMatrix<f64>) -> DMatrix<f64> {
    let ne = cell.edges.len();
    let mut d = DMatrix::zeros(ne, 3);
    let mut s = Vec::with_capacity(ne);
    let h2 = cell.diameter * cell.diameter;
    for (k, [a, b]) in cell.edges.iter().enumerate() {
        d.row_mut(k).copy_from(&row(&(b - a).normalize()));
        s.push(h2 * cell.edge_multiplicity[k] * (b - a).norm());
    }
    discrete_product(cell, pi, &d, &s)
}

pub fn face_product(cell: &OracleCell, pi: &DMatrix<f64>) -> DMatrix<f64> {
    let nf = cell.faces.len();
    let mut d = DMatrix::zeros(nf, 3);
    let mut s = Vec::with_capacity(nf);
    for (k, f) in cell.faces.iter().enumerate() {
        d.row_mut(k).copy_from(&row(&f.normal));
        s.push(cell.diameter * f.area);
    }
    discrete_product(cell, pi, &d, &s)
}

/// Linear vector field `g + G (x − b)` about the cell centroid `b`.
#[derive(Clone, Debug)]
pub struct Linear {
    pub value: Vector3<f64>,
    pub gradient: Matrix3<f64>,
}

impl Linear {
    pub fn at(&self, cell: &OracleCell, x: &Vector3<f64>) -> Vector3<f64> {
        self.value + self.gradient * (x - cell.centroid)
    }

    /// Coefficients in the scaled monomials `(1, (x − b)/h)`, ordered `4 i + α`.
    pub fn scaled(&self, cell: &OracleCell) -> DVector<f64> {
        let mut c = DVector::zeros(12);
        for i in 0..3 {
            c[4 * i] = self.value[i];
            for k in 0..3 {
                c[4 * i + 1 + k] = self.gradient[(i, k)] * cell.diameter;
            }
        }
        c
    }
}

/// Elliptic projection onto `P1(F)` of scalar values at the face loop
/// vertices, returned as `(constant at the face centroid, in-plane gradient)`.
fn face_elliptic(f: &OracleFace, values: &[f64]) -> (f64, Vector3<f64>) {
    let k = f.loop_points.len();
    let mut grad = Vector3::zeros();
    let mut boundary = 0.0;
    let mut boundary_x = Vector3::zeros();
    let mut perimeter = 0.0;
    for a in 0..k {
        let (p, q) = (f.loop_points[a], f.loop_points[(a + 1) % k]);
        let len = (q - p).norm();
        let mut nu = f.normal.cross(&(q - p)).normalize();
        if nu.dot(&((p + q) * 0.5 - f.centroid)) < 0.0 {
            nu = -nu;
        }
        for (s, w) in gauss01() {
            let phi = values[a] * (1.0 - s) + values[(a + 1) % k] * s;
            let x = p + (q - p) * s;
            grad += nu * (phi * w * len);
            boundary += phi * w * len;
            boundary_x += (x - f.centroid) * (w * len);
        }
        perimeter += len;
    }
    grad /= f.area;
    ((boundary - grad.dot(&boundary_x)) / perimeter, grad)
}

/// Projections of the velocity DoF vector `w` of one cell.
pub struct VelocityOracle {
    pub face_integrals: Vec<Vector3<f64>>,
    pub divergence: f64,
    pub nabla: Linear,
    pub zero: Linear,
}

pub fn velocity_projections(cell: &OracleCell, w: &DVector<f64>) -> VelocityOracle {
    let nvl = cell.points.len();
    let vertex = |v: usize| Vector3::new(w[3 * v], w[3 * v + 1], w[3 * v + 2]);
    let mut face_integrals = Vec::new();
    let mut face_normal_parts = Vec::new();
    let mut divergence = 0.0;
    for (lf, f) in cell.faces.iter().enumerate() {
        let wf = w[3 * nvl + lf];
        let vals: Vec<Vector3<f64>> = f.loop_vertices.iter().map(|&g| vertex(cell.local_vertex(g))).collect();
        let mut proj = Vector3::zeros();
        for i in 0..3 {
            let comp: Vec<f64> = vals.iter().map(|v| v[i]).collect();
            proj[i] = face_elliptic(f, &comp).0 * f.area;
        }
        let tang = Matrix3::identity() - f.normal * f.normal.transpose();
        face_integrals.push(tang * proj + f.normal * (f.area * wf));
        let normal: Vec<f64> = vals.iter().map(|v| v.dot(&f.normal)).collect();
        face_normal_parts.push(face_elliptic(f, &normal));
        divergence += f.sigma * f.area * wf;
    }
    divergence /= cell.volume;

    let mut gradient = Matrix3::zeros();
    let mut total = Vector3::zeros();
    let mut offsets = Vector3::zeros();
    let mut surface = 0.0;
    for (f, fi) in cell.faces.iter().zip(&face_integrals) {
        gradient += fi * (f.normal * f.sigma).transpose();
        total += fi;
        offsets += f.rule.sum(|x| x - cell.centroid);
        surface += f.area;
    }
    gradient /= cell.volume;
    let nabla = Linear { value: (total - gradient * offsets) / surface, gradient };

    // moments ∫ w·q against q = e_i and q = e_i (x − b)_k
    let mut tests: Vec<(Vector3<f64>, Matrix3<f64>)> = Vec::new();
    for i in 0..3 {
        tests.push((Vector3::ith(i, 1.0), Matrix3::zeros()));
        for k in 0..3 {
            let mut a = Matrix3::zeros();
            a[(i, k)] = 1.0;
            tests.push((Vector3::zeros(), a));
        }
    }
    let eval = |t: &(Vector3<f64>, Matrix3<f64>), x: &Vector3<f64>| t.0 + t.1 * (x - cell.centroid);
    let mut rhs = DVector::zeros(12);
    for (n, t) in tests.iter().enumerate() {
        // q = ∇s + (x − b) × c with s = g·d + ½ dᵀ sym(A) d and c from skew(A)
        let sym = (t.1 + t.1.transpose()) * 0.5;
        let skew = (t.1 - t.1.transpose()) * 0.5;
        let omega = Vector3::new(skew[(2, 1)], skew[(0, 2)], skew[(1, 0)]);
        let c = -omega;
        let s = |x: &Vector3<f64>| {
            let d = x - cell.centroid;
            t.0.dot(&d) + 0.5 * d.dot(&(sym * d))
        };
        let mut m = -divergence * cell.rule.sum(|x| s(x));
        for (lf, f) in cell.faces.iter().enumerate() {
            let wf = w[3 * nvl + lf];
            let (c0, g) = face_normal_parts[lf];
            let sb = s(&f.centroid);
            let wn = sb * f.area * wf + f.rule.sum(|x| (c0 + g.dot(&(x - f.centroid))) * (s(x) - sb));
            m += f.sigma * wn;
        }
        m += cell.rule.sum(|x| nabla.at(cell, x).dot(&(x - cell.centroid).cross(&c)));
        rhs[n] = m;
    }
    let mut gram = DMatrix::zeros(12, 12);
    for a in 0..12 {
        for b in 0..12 {
            gram[(a, b)] = cell.rule.sum(|x| eval(&tests[a], x).dot(&eval(&tests[b], x)));
        }
    }
    let coef = gram.lu().solve(&rhs).unwrap();
    let mut value = Vector3::zeros();
    let mut grad0 = Matrix3::zeros();
    for (n, t) in tests.iter().enumerate() {
        value += t.0 * coef[n];
        grad0 += t.1 * coef[n];
    }
    VelocityOracle { face_integrals, divergence, nabla, zero: Linear { value, gradient: grad0 } }
}

/// DoFs of a linear field in the velocity space of the cell.
pub fn velocity_dofs_of(cell: &OracleCell, p: &Linear) -> DVector<f64> {
    let nvl = cell.points.len();
    let mut d = DVector::zeros(cell.num_velocity_dofs());
    for (v, x) in cell.points.iter().enumerate() {
        let val = p.at(cell, x);
        for i in 0..3 {
            d[3 * v + i] = val[i];
        }
    }
    for (lf, f) in cell.faces.iter().enumerate() {
        d[3 * nvl + lf] = f.rule.sum(|x| p.at(cell, x).dot(&f.normal)) / f.area;
    }
    d
}

/// Reference velocity matrices of one cell.
pub struct VelocityMatrices {
    pub pi_nabla: DMatrix<f64>,
    pub pi_zero: DMatrix<f64>,
    pub divergence: DVector<f64>,
    pub a: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub projections: Vec<VelocityOracle>,
}

pub fn velocity_matrices(cell: &OracleCell) -> VelocityMatrices {
    let nd = cell.num_velocity_dofs();
    let projections: Vec<VelocityOracle> = (0..nd)
        .map(|j| velocity_projections(cell, &DVector::from_fn(nd, |i, _| if i == j { 1.0 } else { 0.0 })))
        .collect();
    let pi_nabla = DMatrix::from_columns(&projections.iter().map(|p| p.nabla.scaled(cell)).collect::<Vec<_>>());
    let pi_zero = DMatrix::from_columns(&projections.iter().map(|p| p.zero.scaled(cell)).collect::<Vec<_>>());
    let divergence = DVector::from_iterator(nd, projections.iter().map(|p| p.divergence));
    let residual = |l: &Linear, j: usize| {
        let mut r = -velocity_dofs_of(cell, l);
        r[j] += 1.0;
        r
    };
    let h = cell.diameter;
    let mut a = DMatrix::zeros(nd, nd);
    let mut m = DMatrix::zeros(nd, nd);
    for i in 0..nd {
        let (pi, ri_n, ri_z) = (&projections[i], residual(&projections[i].nabla, i), residual(&projections[i].zero, i));
        for j in 0..nd {
            let pj = &projections[j];
            let consistent = cell.volume * pi.nabla.gradient.component_mul(&pj.nabla.gradient).sum();
            a[(i, j)] = consistent + h * ri_n.dot(&residual(&pj.nabla, j));
            let mass = cell.rule.sum(|x| pi.zero.at(cell, x).dot(&pj.zero.at(cell, x)));
            m[(i, j)] = mass + h * h * h * ri_z.dot(&residual(&pj.zero, j));
        }
    }
    VelocityMatrices { pi_nabla, pi_zero, divergence, a, m, projections }
}

/// `c_h(ū; u, w) = ∫ (mean ∇u) Π0_1 ū · Π0_1 w`, indexed `[w, u]`.
pub fn convection(cell: &OracleCell, vm: &VelocityMatrices, ubar: &DVector<f64>) -> DMatrix<f64> {
    let nd = ubar.len();
    let zbar = velocity_projections(cell, ubar).zero;
    let mut c = DMatrix::zeros(nd, nd);
    for wi in 0..nd {
        for ui in 0..nd {
            let grad = vm.projections[ui].nabla.gradient;
            let zw = &vm.projections[wi].zero;
            c[(wi, ui)] = cell.rule.sum(|x| (grad * zbar.at(cell, x)).dot(&zw.at(cell, x)));
        }
    }
    c
}

pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.norm().max(1e-300);
    (a - b).norm() / scale
}
