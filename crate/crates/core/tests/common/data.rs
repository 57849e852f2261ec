//! Random discrete data for stability checks.

use mhdvem::mhd::{Discretization, MhdState};
use mhdvem::spaces::{curl_edge_to_face, FieldCoefficients, Space};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random discrete initial data with zero boundary DoFs and exactly zero
/// cellwise divergence of both velocity and magnetic field.
pub fn random_solenoidal(disc: &Discretization<f64>, seed: u64) -> MhdState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = &disc.layouts;
    let mut state = MhdState::zeros(l, 0.0);
    let mut e = DVector::zeros(l.edge.len());
    for (i, &b) in l.edge.boundary.iter().enumerate() {
        if !b {
            e[i] = rng.random_range(-1.0..1.0);
        }
    }
    state.b = curl_edge_to_face(&disc.mesh, &disc.geometry, &FieldCoefficients::new(Space::Edge, e)).unwrap();

    let mut u = DVector::zeros(l.velocity.len());
    for (i, &b) in l.velocity.boundary.iter().enumerate() {
        if !b {
            u[i] = rng.random_range(-1.0..1.0);
        }
    }
    // project the interior face moments onto the kernel of the divergence
    let nv3 = 3 * disc.mesh.num_vertices();
    let free: Vec<usize> = (0..disc.mesh.num_faces()).filter(|&f| !l.velocity.boundary[nv3 + f]).collect();
    let mut d = DMatrix::zeros(disc.mesh.num_cells(), free.len());
    for (c, cell) in disc.mesh.cells().iter().enumerate() {
        for sf in &cell.faces {
            if let Some(k) = free.iter().position(|&f| f == sf.index) {
                d[(c, k)] = sf.sign_as::<f64>() * disc.geometry.faces[sf.index].area;
            }
        }
    }
    let x = DVector::from_iterator(free.len(), free.iter().map(|&f| u[nv3 + f]));
    let correction = d.clone().pseudo_inverse(1e-12).unwrap() * (&d * &x);
    for (k, &f) in free.iter().enumerate() {
        u[nv3 + f] = x[k] - correction[k];
    }
    state.u = FieldCoefficients::new(Space::Velocity, u);
    state
}
