use crate::config::{MeshSpec, RunConfig};
use crate::error::{CliError, Result};
use mhdvem::manufactured::{convergence_rates, convergence_study, error_norms, ExactSolution, LevelSpec};
use mhdvem::mesh::{classify_boundary, validate, PolyMesh};
use mhdvem::mhd::{run_transient, Discretization, MhdState, SparseLu, TimeGrid};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const STEP_HEADER: &str = "step,t,picard_iters,increment,div_u,div_B,energy";
pub const CONVERGENCE_HEADER: &str = "family,level,h,dt,err_u,err_E,err_B,err_p,div_u,div_B";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path.display(), e))
}

/// Loads a mesh and rejects it when validation reports any violation.
fn load_valid_mesh(spec: &MeshSpec) -> Result<PolyMesh<f64>> {
    let mesh = spec.load()?;
    let report = validate(&mesh);
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        return Err(CliError::Mesh(format!("{spec}: {} violations", report.violations.len())));
    }
    Ok(mesh)
}

pub fn run(config: &RunConfig) -> Result<()> {
    let mesh = load_valid_mesh(&config.mesh)?;
    let disc = Discretization::new(mesh)?;
    let exact = ExactSolution::new(config.params);
    let grid = TimeGrid { t0: 0.0, t_final: config.t_final, dt: config.dt };
    let path = config.out.clone().unwrap_or_else(|| PathBuf::from("steps.csv"));
    let mut csv = create(&path)?;
    writeln!(csv, "{STEP_HEADER}").map_err(|e| CliError::io(path.display(), e))?;
    let mut write_error = None;
    let initial = MhdState::interpolate(&disc, &exact, 0.0);
    let (state, reports) =
        run_transient(&disc, &config.params, &config.picard, &exact, &grid, initial, &SparseLu, |r, _| {
            if write_error.is_none() {
                let row = writeln!(
                    csv,
                    "{},{},{},{:e},{:e},{:e},{:e}",
                    r.step, r.t, r.picard_iterations, r.final_increment, r.div_u, r.div_b, r.energy
                );
                write_error = row.err();
            }
        })?;
    if let Some(e) = write_error {
        return Err(CliError::io(path.display(), e));
    }
    csv.flush().map_err(|e| CliError::io(path.display(), e))?;

    let last = reports.last().expect("at least one step");
    let div_u = reports.iter().fold(0.0f64, |a, r| a.max(r.div_u));
    let div_b = reports.iter().fold(0.0f64, |a, r| a.max(r.div_b));
    let picard = reports.iter().map(|r| r.picard_iterations).max().unwrap_or(0);
    let err = error_norms(&disc, &exact, &state);
    println!("mesh {} ({} cells), {} steps to t = {}", config.mesh, disc.mesh.num_cells(), reports.len(), state.t);
    println!("max Picard iterations {picard}");
    println!("max div u {div_u:.3e}, max div B {div_b:.3e}");
    println!("final energy {:.6e}", last.energy);
    println!("relative errors: u {:.4e}, E {:.4e}, B {:.4e}, p {:.4e}", err.u, err.e, err.b, err.p);
    println!("step log written to {}", path.display());
    Ok(())
}

pub fn convergence(config: &RunConfig) -> Result<()> {
    if config.levels.len() < 2 {
        return Err(CliError::Config("levels: a convergence study needs at least two levels".into()));
    }
    let n0 = config.levels[0] as f64;
    let mut levels = Vec::with_capacity(config.levels.len());
    for &n in &config.levels {
        let spec = config.mesh.with_level(n)?;
        levels.push(LevelSpec {
            label: spec.to_string(),
            mesh: load_valid_mesh(&spec)?,
            dt: config.dt * n0 / n as f64,
        });
    }
    let exact = ExactSolution::new(config.params);
    let rows = convergence_study(levels, &exact, &config.picard, config.t_final, &SparseLu)?;

    let path = config.out.clone().unwrap_or_else(|| PathBuf::from("convergence.csv"));
    let mut csv = create(&path)?;
    let family = config.mesh.family();
    let mut text = format!("{CONVERGENCE_HEADER}\n");
    for (r, n) in rows.iter().zip(&config.levels) {
        let e = &r.errors;
        text += &format!(
            "{family},{n},{},{},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            r.h, r.dt, e.u, e.e, e.b, e.p, r.div_u, r.div_b
        );
    }
    csv.write_all(text.as_bytes()).and_then(|_| csv.flush()).map_err(|e| CliError::io(path.display(), e))?;

    println!("{:<12} {:>10} {:>10} {:>10} {:>10} {:>10}", "level", "h", "err u", "err E", "err B", "err p");
    for r in &rows {
        let e = &r.errors;
        println!("{:<12} {:>10.4} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}", r.label, r.h, e.u, e.e, e.b, e.p);
    }
    println!("rates, log2 of consecutive error ratios:");
    for (w, rates) in rows.windows(2).zip(convergence_rates(&rows)) {
        println!(
            "  {} -> {}: u {:.3}, E {:.3}, B {:.3}, p {:.3}",
            w[0].label, w[1].label, rates[0], rates[1], rates[2], rates[3]
        );
    }
    println!("table written to {}", path.display());
    Ok(())
}

pub fn mesh_info(spec: &MeshSpec) -> Result<()> {
    let mesh = spec.load()?;
    let report = validate(&mesh);
    let tags = classify_boundary(&mesh);
    println!("mesh {spec}");
    println!("vertices {}", mesh.num_vertices());
    println!("edges {}", mesh.num_edges());
    println!("faces {}", mesh.num_faces());
    println!("cells {}", mesh.num_cells());
    println!("boundary faces {}", tags.boundary_faces.len());
    println!("h {}", mesh.mesh_size());
    if mesh.num_cells() > 0 {
        println!("min face/cell diameter ratio {:.4}", report.min_face_to_cell());
        println!("min edge/face diameter ratio {:.4}", report.min_edge_to_face());
    }
    println!("cells with inverted centroid fans {}", report.inverted_fans.len());
    if report.is_valid() {
        println!("valid");
        Ok(())
    } else {
        for v in &report.violations {
            println!("violation: {v}");
        }
        Err(CliError::Mesh(format!("{spec}: {} violations", report.violations.len())))
    }
}
