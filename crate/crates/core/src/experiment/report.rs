use std::collections::HashSet;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::svg::line_plot;
use super::ConvergenceTable;
use crate::equilibrium::{equilibrium_vc, EquilibriumError};
use crate::limitkernel::{LimitKernelContext, LimitKernelError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("output directory {path} is not writable: {source}")]
    Unwritable { path: PathBuf, source: std::io::Error },
    #[error("duplicate artifact name `{0}`")]
    Duplicate(String),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    /// Written as `<name>.csv`.
    Table { name: String, header: Vec<String>, rows: Vec<Vec<String>> },
    /// Written as `<name>.svg`.
    Plot { name: String, title: String, x_label: String, y_label: String, series: Vec<(String, Vec<(f64, f64)>)>, log_y: bool },
    /// Pre-rendered file, written as given.
    Raw { file_name: String, body: String },
}

impl Artifact {
    fn file_name(&self) -> String {
        match self {
            Artifact::Table { name, .. } => format!("{name}.csv"),
            Artifact::Plot { name, .. } => format!("{name}.svg"),
            Artifact::Raw { file_name, .. } => file_name.clone(),
        }
    }

    fn render(&self, echo: &str) -> String {
        match self {
            Artifact::Table { header, rows, .. } => {
                let mut s = header.join(",");
                s.push('\n');
                for r in rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                s
            }
            Artifact::Plot { title, x_label, y_label, series, log_y, .. } => {
                line_plot(title, x_label, y_label, series, *log_y, echo)
            }
            Artifact::Raw { body, .. } => body.clone(),
        }
    }
}

/// 17 significant digits.
pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn table(name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Artifact {
    Artifact::Table { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows }
}

/// Density of `V_c` at `points` cell midpoints of the support, one table
/// per `c` and one plot with all of them.
pub fn density_artifacts(cs: &[f64], points: usize) -> Result<Vec<Artifact>, EquilibriumError> {
    let mut out = Vec::new();
    let mut series = Vec::new();
    for &c in cs {
        let eq = equilibrium_vc(c)?;
        let (a, b) = eq.support[0];
        let pts: Vec<(f64, f64)> = (0..points)
            .map(|k| {
                let x = a + (b - a) * (k as f64 + 0.5) / points as f64;
                (x, eq.psi(x))
            })
            .collect();
        out.push(table(
            &format!("density_c{c}"),
            &["x", "psi"],
            pts.iter().map(|&(x, p)| vec![fmt17(x), fmt17(p)]).collect(),
        ));
        series.push((format!("c = {c}"), pts));
    }
    out.push(Artifact::Plot {
        name: "density_profiles".into(),
        title: "Equilibrium densities of V_c".into(),
        x_label: "x".into(),
        y_label: "psi(x)".into(),
        series,
        log_y: false,
    });
    Ok(out)
}

/// `K(x, x)` of the limiting kernel next to its large-`x` growth `2√x/π`.
pub fn diagonal_artifacts(ctx: &LimitKernelContext, xs: &[f64]) -> Result<Vec<Artifact>, LimitKernelError> {
    let vals: Vec<(f64, f64)> = xs.iter().map(|&x| Ok((x, ctx.diagonal(x)?))).collect::<Result<_, LimitKernelError>>()?;
    let name = format!("kernel_diagonal_alpha{}_s{}", ctx.alpha, ctx.s);
    Ok(vec![
        table(&name, &["x", "Kxx"], vals.iter().map(|&(x, k)| vec![fmt17(x), fmt17(k)]).collect()),
        Artifact::Plot {
            name: name.clone(),
            title: format!("Limiting kernel diagonal, alpha = {}, s = {}", ctx.alpha, ctx.s),
            x_label: "x".into(),
            y_label: "K(x, x)".into(),
            series: vec![
                ("K(x, x)".into(), vals.clone()),
                ("2 sqrt(x) / pi".into(), xs.iter().map(|&x| (x, 2.0 * x.sqrt() / PI)).collect()),
            ],
            log_y: false,
        },
    ])
}

pub fn convergence_artifacts(t: &ConvergenceTable) -> Vec<Artifact> {
    let rows = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.derived.n.to_string(),
                fmt17(r.derived.big_n),
                fmt17(r.derived.scale),
                r.error.map(fmt17).unwrap_or_else(|| "unavailable".into()),
                r.precision_mode.map(|m| format!("{m:?}")).unwrap_or_else(|| "none".into()),
            ]
        })
        .collect();
    let pts = t.rows.iter().filter_map(|r| r.error.map(|e| (r.derived.n as f64, e))).collect();
    vec![
        table("convergence", &["n", "N", "scale", "E", "precision"], rows),
        Artifact::Plot {
            name: "convergence".into(),
            title: "Sup-norm distance to the limiting kernel".into(),
            x_label: "n".into(),
            y_label: "E(n)".into(),
            series: vec![("E(n)".into(), pts)],
            log_y: true,
        },
    ]
}

fn probe_writable(dir: &Path) -> Result<(), ReportError> {
    let unwritable = |source| ReportError::Unwritable { path: dir.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(unwritable)?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(unwritable)?;
    fs::remove_file(&probe).map_err(unwritable)
}

/// Writes every artifact, `config.txt` with `echo`, and `manifest.txt`
/// listing all written files (itself last). Returns the manifest entries.
pub fn emit_report(dir: &Path, echo: &str, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, ReportError> {
    let mut seen = HashSet::new();
    for a in artifacts {
        let f = a.file_name();
        if f == "config.txt" || f == "manifest.txt" || !seen.insert(f.clone()) {
            return Err(ReportError::Duplicate(f));
        }
    }
    let rendered: Vec<(String, String)> = artifacts.iter().map(|a| (a.file_name(), a.render(echo))).collect();
    probe_writable(dir)?;

    let mut manifest = Vec::new();
    let mut write = |name: &str, body: &str| -> Result<(), ReportError> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|source| ReportError::Io { path: path.clone(), source })?;
        manifest.push(path);
        Ok(())
    };
    for (name, body) in &rendered {
        write(name, body)?;
    }
    write("config.txt", echo)?;
    let mut listing = String::new();
    for line in echo.lines() {
        listing.push_str(&format!("# {line}\n"));
    }
    for p in rendered.iter().map(|r| r.0.as_str()).chain(["config.txt", "manifest.txt"]) {
        listing.push_str(p);
        listing.push('\n');
    }
    write("manifest.txt", &listing)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_densities_have_unit_mass() {
        let arts = density_artifacts(&[0.7, 1.0, 1.2], 200).unwrap();
        assert_eq!(arts.len(), 4);
        for &c in &[0.7, 1.0, 1.2] {
            let m = equilibrium_vc(c).unwrap().total_mass().unwrap();
            assert!((m - 1.0).abs() <= 1e-10, "c = {c}: {m}");
        }
    }

    #[test]
    fn rerun_is_byte_identical_and_manifest_is_complete() {
        let arts = density_artifacts(&[0.7, 1.0, 1.2], 50).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ma = emit_report(a.path(), "alpha = 0\n", &arts).unwrap();
        emit_report(b.path(), "alpha = 0\n", &arts).unwrap();
        for p in &ma {
            let name = p.file_name().unwrap();
            assert_eq!(fs::read(p).unwrap(), fs::read(b.path().join(name)).unwrap());
        }
        let listing = fs::read_to_string(a.path().join("manifest.txt")).unwrap();
        let mut on_disk: Vec<String> =
            fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        on_disk.sort();
        let mut listed: Vec<String> = listing.lines().filter(|l| !l.starts_with('#')).map(String::from).collect();
        let unique: HashSet<&String> = listed.iter().collect();
        assert_eq!(unique.len(), listed.len());
        listed.sort();
        assert_eq!(listed, on_disk);
    }

    #[test]
    fn unwritable_directory_fails_before_writing() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let arts = density_artifacts(&[1.0], 10).unwrap();
        assert!(matches!(emit_report(&blocker.join("sub"), "", &arts), Err(ReportError::Unwritable { .. })));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let a = table("t", &["x"], vec![]);
        assert!(matches!(emit_report(Path::new("/nonexistent"), "", &[a.clone(), a]), Err(ReportError::Duplicate(_))));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
    }
}
