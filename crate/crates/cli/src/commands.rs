use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};
use tselliptic::nonlinearity::Expression;
use tselliptic::operator::GreenKernel;
use tselliptic::product::{ProductFunction, ProductGrid};
use tselliptic::solver::{method, GreenInverse, LinearInverse, Problem, Report, Solution, Status};
use tselliptic::spectral::{eigen_shooting, lambda1_lower_bound, spectrum_1d, tensor_spectrum};
use tselliptic::timescale::{Grid, MeshParams, TimeScale};

use crate::config::Config;
use crate::output::{jnum, num, Artifacts, Table};
use crate::Failure;

pub const DEFAULT_MODES: usize = 10;

fn mesh_json(m: &MeshParams) -> Value {
    match m {
        MeshParams::Step(h) => json!({ "h": h }),
        MeshParams::Subdivisions(n) => json!({ "subdivisions": n }),
        MeshParams::PerInterval(c) => json!({ "counts": c }),
    }
}

fn axes_json(axes: &[TimeScale]) -> Value {
    axes.iter().map(|t| t.to_string()).collect()
}

fn grids(axes: &[TimeScale], mesh: &MeshParams) -> Result<Vec<Arc<Grid>>, Failure> {
    axes.iter()
        .map(|t| t.discretize(mesh).map(Arc::new))
        .collect::<tselliptic::Result<_>>()
        .map_err(Failure::from_core)
}

fn coord_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

/// One row per point of the closed product grid: coordinates, then one value
/// per column function.
fn grid_table(grid: &ProductGrid, names: Vec<String>, columns: &[&[f64]]) -> Table {
    let mut t = Table::new(coord_header(grid.dim()).into_iter().chain(names));
    for k in 0..grid.len() {
        let x = grid.coords(&grid.multi_index(k));
        t.push(
            x.iter()
                .copied()
                .chain(columns.iter().map(|c| c[k]))
                .map(num)
                .collect(),
        );
    }
    t
}

/// Whitespace columns with a blank line whenever the last axis restarts, so
/// two-dimensional data plots as a surface.
fn plot_text(grid: &ProductGrid, names: &[String], columns: &[&[f64]]) -> String {
    let mut s = format!(
        "# {}\n",
        coord_header(grid.dim())
            .iter()
            .chain(names)
            .cloned()
            .collect::<Vec<_>>()
            .join(" ")
    );
    for k in 0..grid.len() {
        let idx = grid.multi_index(k);
        if k > 0 && grid.dim() > 1 && idx[grid.dim() - 1] == 0 {
            s.push('\n');
        }
        let x = grid.coords(&idx);
        let fields: Vec<String> = x
            .into_iter()
            .chain(columns.iter().map(|c| c[k]))
            .map(num)
            .collect();
        s.push_str(&fields.join(" "));
        s.push('\n');
    }
    s
}

pub fn spectrum(cfg: &Config, k: Option<usize>) -> Result<Artifacts, Failure> {
    let axes = cfg.time_scales()?;
    let mesh = cfg.mesh_params()?;
    let k = k.unwrap_or(DEFAULT_MODES);
    if k == 0 {
        return Err(Failure::Config("--k must be at least 1".into()));
    }
    let grids = grids(&axes, &mesh)?;
    let spectra = grids
        .iter()
        .map(|g| spectrum_1d(g.clone(), Some(k)))
        .collect::<tselliptic::Result<Vec<_>>>()
        .map_err(Failure::from_core)?;
    let tensor = tensor_spectrum(spectra, k).map_err(Failure::from_core)?;
    let eigenvalues = tensor.eigenvalues();
    let lambda1 = eigenvalues[0];
    let bound = lambda1_lower_bound(&axes);

    let shooting = if axes.len() == 1 {
        eigen_shooting(&axes[0], eigenvalues.len())
            .or_else(|_| eigen_shooting(&axes[0], 1))
            .ok()
    } else {
        None
    };

    let mut header = vec!["k", "eigenvalue", "index"];
    if shooting.is_some() {
        header.push("shooting");
    }
    let mut table = Table::new(header);
    for (i, e) in tensor.entries().iter().enumerate() {
        let index: Vec<String> = e.index.iter().map(|p| p.to_string()).collect();
        let mut row = vec![(i + 1).to_string(), num(e.eigenvalue), index.join(",")];
        if let Some(s) = &shooting {
            row.push(s.get(i).map_or(String::new(), |v| num(*v)));
        }
        table.push(row);
    }

    let grid = Arc::new(tensor.product_grid().map_err(Failure::from_core)?);
    let modes = (0..eigenvalues.len())
        .map(|i| tensor.eigenfunction(grid.clone(), i))
        .collect::<tselliptic::Result<Vec<ProductFunction>>>()
        .map_err(Failure::from_core)?;
    let names: Vec<String> = (1..=modes.len()).map(|i| format!("phi{i}")).collect();
    let columns: Vec<&[f64]> = modes.iter().map(|m| m.values()).collect();
    let eigenfunctions = grid_table(&grid, names.clone(), &columns);

    let shooting_diff = shooting.as_ref().map(|s| {
        s.iter()
            .zip(&eigenvalues)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    });
    let mut summary = vec![
        format!("lambda1 = {}", num(lambda1)),
        format!("lower bound = {}", num(bound)),
    ];
    if let (Some(s), Some(d)) = (&shooting, shooting_diff) {
        summary.push(format!(
            "shooting = [{}], max |matrix - shooting| = {}",
            s.iter().map(|v| num(*v)).collect::<Vec<_>>().join(", "),
            num(d)
        ));
    }
    let json = json!({
        "domain": axes_json(&axes),
        "mesh": mesh_json(&mesh),
        "eigenvalues": eigenvalues,
        "indices": tensor.entries().iter().map(|e| e.index.clone()).collect::<Vec<_>>(),
        "truncated": tensor.truncated(),
        "lambda1": lambda1,
        "lambda1_lower_bound": bound,
        "shooting": shooting,
        "shooting_max_difference": shooting_diff,
    });
    Ok(Artifacts {
        json_name: "spectrum",
        json,
        csv_name: "spectrum",
        table,
        extra: vec![("eigenfunctions", eigenfunctions)],
        plot: Some(("eigenfunctions", plot_text(&grid, &names, &columns))),
        summary,
        json_always: false,
        text: None,
    })
}

fn solution_json(s: &Solution) -> Value {
    json!({
        "status": s.status.as_str(),
        "residual": jnum(s.residual),
        "iterations": s.iterations,
        "contraction_ratio": s.contraction_ratio.map(jnum),
        "apriori_radius": s.apriori_radius.map(jnum),
        "lipschitz": s.lipschitz.map(|(l, estimated)| json!({ "value": jnum(l), "estimated": estimated })),
        "non_uniqueness_risk": s.non_uniqueness_risk,
        "last_tau": s.last_tau,
        "message": s.message,
        "u": s.u.interior_values().into_iter().map(jnum).collect::<Vec<_>>(),
    })
}

pub struct Solved {
    pub artifacts: Artifacts,
    pub status: Status,
}

pub fn solve(cfg: &Config, method_name: &str) -> Result<Solved, Failure> {
    let p: Problem = cfg.problem()?;
    let m = method(method_name).map_err(Failure::from_core)?;
    let disc = p.discretize().map_err(Failure::from_core)?;
    let mut json = json!({
        "method": m.name(),
        "domain": axes_json(&p.axes),
        "mesh": mesh_json(&p.mesh),
        "f": p.f.to_string(),
        "unknowns": disc.unknowns(),
        "lambda1": disc.lambda1(),
        "lambda1_lower_bound": disc.lambda1_lower_bound(),
    });
    let grid = disc.grid().clone();
    let report: Report = match m.run(&p) {
        Ok(r) => r,
        Err(e) => {
            let f = Failure::from_core(e);
            let Failure::Unsolved(msg) = &f else {
                return Err(f);
            };
            json["status"] = json!("failed");
            json["message"] = json!(msg);
            json["solutions"] = json!([]);
            return Ok(Solved {
                artifacts: solve_artifacts(&grid, json, &[], msg.clone()),
                status: Status::Diverged,
            });
        }
    };
    json["status"] = json!(report.status.as_str());
    json["solutions"] = report.solutions.iter().map(solution_json).collect();
    if m.name() == "enumerate" {
        json["candidates"] = json!(report.candidates);
    }
    let line = match report.solutions.as_slice() {
        [s] => format!(
            "{}: {} after {} iteration(s), residual {}",
            report.method,
            s.status,
            s.iterations,
            num(s.residual)
        ),
        many => format!(
            "{}: {}, {} solution(s)",
            report.method,
            report.status,
            many.len()
        ),
    };
    Ok(Solved {
        artifacts: solve_artifacts(&grid, json, &report.solutions, line),
        status: report.status,
    })
}

fn solve_artifacts(
    grid: &ProductGrid,
    json: Value,
    solutions: &[Solution],
    line: String,
) -> Artifacts {
    let names: Vec<String> = if solutions.len() == 1 {
        vec!["u".into()]
    } else {
        (1..=solutions.len()).map(|i| format!("u{i}")).collect()
    };
    let columns: Vec<&[f64]> = solutions.iter().map(|s| s.u.values()).collect();
    Artifacts {
        json_name: "diagnostics",
        json,
        csv_name: "solution",
        table: grid_table(grid, names.clone(), &columns),
        extra: Vec::new(),
        plot: (!solutions.is_empty()).then(|| ("solution", plot_text(grid, &names, &columns))),
        summary: vec![line],
        json_always: true,
        text: None,
    }
}

/// `t,f` rows, or an expression in `x1` when the file has no commas.
fn read_function(path: &Path, grid: &Grid) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let interior = &grid.points()[grid.interior()];
    if !text.contains(',') {
        let e: Expression = text.trim().parse().map_err(|e| {
            Failure::Config(format!(
                "{}: not a t,f table or expression: {e}",
                path.display()
            ))
        })?;
        return interior
            .iter()
            .map(|&t| e.eval(&[t], 0.0))
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut pairs = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let parsed: Option<(f64, f64)> = (rec.len() == 2)
            .then(|| Some((rec[0].parse().ok()?, rec[1].parse().ok()?)))
            .flatten();
        match parsed {
            Some(p) => pairs.push(p),
            None if line == 0 => {}
            None => {
                return Err(Failure::Config(format!(
                    "{}: line {}: expected two numbers",
                    path.display(),
                    line + 1
                )))
            }
        }
    }
    interior
        .iter()
        .map(|&t| {
            pairs
                .iter()
                .find(|(s, _)| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
                .map(|&(_, f)| f)
                .ok_or_else(|| {
                    Failure::Config(format!(
                        "{}: no value for grid point t = {t}",
                        path.display()
                    ))
                })
        })
        .collect()
}

pub fn greens(
    cfg: &Config,
    t: Option<f64>,
    s: Option<f64>,
    function: Option<&Path>,
) -> Result<Artifacts, Failure> {
    let axes = cfg.time_scales()?;
    let [ts] = axes.as_slice() else {
        return Err(Failure::Config(
            "the Green's function is one-dimensional; give a single axis".into(),
        ));
    };
    let (a, b) = (ts.start(), ts.end());
    let kernel = GreenKernel::new(a, b);
    let mut json = json!({ "a": a, "b": b, "max_value": kernel.max_value() });
    let mut summary = Vec::new();
    let mut point = None;
    match (t, s) {
        (Some(t), Some(s)) => {
            for (name, v) in [("t", t), ("s", s)] {
                if !(a..=b).contains(&v) {
                    return Err(Failure::Config(format!(
                        "{name} = {v} lies outside [{a}, {b}]"
                    )));
                }
            }
            let g = kernel.eval(t, s);
            json["t"] = json!(t);
            json["s"] = json!(s);
            json["G"] = json!(g);
            summary.push(format!("G({t}, {s}) = {}", num(g)));
            let mut table = Table::new(["t", "s", "G"]);
            table.push(vec![num(t), num(s), num(g)]);
            point = Some(table);
        }
        (None, None) if function.is_some() => {}
        _ => {
            return Err(Failure::Config(
                "give both --t and --s, or a --function file".into(),
            ))
        }
    }

    let Some(path) = function else {
        return Ok(Artifacts {
            json_name: "greens",
            json,
            csv_name: "greens",
            table: point.expect("set above"),
            extra: Vec::new(),
            plot: None,
            summary,
            json_always: false,
            text: None,
        });
    };
    let grid = Arc::new(
        ts.discretize(&cfg.mesh_params()?)
            .map_err(Failure::from_core)?,
    );
    let f = read_function(path, &grid)?;
    let y = GreenInverse::new(grid.clone()).solve(&f);
    let n = grid.len();
    let mut fv = vec![f64::NAN; n];
    let mut yv = vec![0.0; n];
    fv[grid.interior()].copy_from_slice(&f);
    yv[grid.interior()].copy_from_slice(&y);

    let mut table = Table::new(["t", "f", "y"]);
    let mut plot = String::from("# t y\n");
    for i in 0..n {
        let t = grid.point(i);
        let f = if fv[i].is_nan() {
            String::new()
        } else {
            num(fv[i])
        };
        table.push(vec![num(t), f, num(yv[i])]);
        plot.push_str(&format!("{} {}\n", num(t), num(yv[i])));
    }
    json["mesh"] = mesh_json(&cfg.mesh_params()?);
    json["solution"] = json!({
        "t": grid.points(),
        "f": f,
        "y": yv,
    });
    Ok(Artifacts {
        json_name: "greens",
        json,
        csv_name: "greens",
        table,
        extra: point.map(|p| vec![("kernel", p)]).unwrap_or_default(),
        plot: Some(("greens", plot)),
        summary,
        json_always: false,
        text: None,
    })
}
