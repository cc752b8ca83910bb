use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

use super::config::{ExperimentConfig, SweepParam};
use super::sweep::SweepRow;

pub const CSV_HEADER: &str =
    "sweep_value,filter,rmse,comm_rate,mean_iterations,failures,comm_rate_paper_sqrt";

type Column = fn(&SweepRow) -> f64;

/// Sweep rows as CSV text.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.sweep_value,
            r.filter,
            r.rmse,
            r.comm_rate,
            r.mean_iterations,
            r.failures,
            r.comm_rate_paper_sqrt
        ));
    }
    out
}

/// Whitespace-separated two-column blocks, one per filter (in first-seen
/// order), each sorted by sweep value and separated by two blank lines.
pub fn plot_data(rows: &[SweepRow], column: impl Fn(&SweepRow) -> f64, label: &str) -> String {
    let mut filters = Vec::new();
    for r in rows {
        if !filters.contains(&r.filter) {
            filters.push(r.filter);
        }
    }
    let mut out = String::new();
    for (i, f) in filters.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# filter: {f}\n# sweep_value {label}\n"));
        let mut block: Vec<&SweepRow> = rows.iter().filter(|r| r.filter == *f).collect();
        block.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value));
        for r in block {
            out.push_str(&format!("{} {}\n", r.sweep_value, column(r)));
        }
    }
    out
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::File::create(&path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    Ok(path)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<prefix>.csv`, `<prefix>_manifest.json` and the figure-style
/// plot-data files for the swept parameter. Returns the paths written.
pub fn emit_outputs(
    rows: &[SweepRow],
    cfg: &ExperimentConfig,
    prefix: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to write".into()));
    }
    let prefix = prefix.as_ref();
    let mut written = vec![
        write_file(with_suffix(prefix, ".csv"), &rows_to_csv(rows))?,
        write_file(
            with_suffix(prefix, "_manifest.json"),
            &(cfg.to_json() + "\n"),
        )?,
    ];
    let param = cfg.sweep.as_ref().map_or(SweepParam::Y, |s| s.param);
    let figures: Vec<(&str, Column, &str)> = match param {
        SweepParam::Y => vec![
            ("_fig2_rmse_vs_y.dat", |r| r.rmse, "rmse"),
            ("_fig3_comm_rate_vs_y.dat", |r| r.comm_rate, "comm_rate"),
            (
                "_fig5_iterations_vs_y.dat",
                |r| r.mean_iterations,
                "mean_iterations",
            ),
        ],
        SweepParam::R => vec![
            ("_fig6_rmse_vs_r.dat", |r| r.rmse, "rmse"),
            ("_fig7_comm_rate_vs_r.dat", |r| r.comm_rate, "comm_rate"),
        ],
        SweepParam::Rho => vec![("_fig8_rmse_vs_rho.dat", |r| r.rmse, "rmse")],
    };
    for (suffix, column, label) in figures {
        written.push(write_file(
            with_suffix(prefix, suffix),
            &plot_data(rows, column, label),
        )?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{FilterId, Sweep};

    fn row(v: f64, f: FilterId, rmse: f64) -> SweepRow {
        SweepRow {
            sweep_value: v,
            filter: f,
            rmse,
            comm_rate: 0.5,
            comm_rate_paper_sqrt: 0.5f64.sqrt(),
            mean_iterations: 2.0,
            failures: 0,
        }
    }

    #[test]
    fn csv_lines() {
        let text = rows_to_csv(&[row(0.1, FilterId::Etvbf, 1.0), row(0.1, FilterId::Vbf, 2.0)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0.1,etvbf,1,0.5,2,0,0.7071067811865476");
    }

    #[test]
    fn plot_blocks_sorted_per_filter() {
        let rows = [
            row(0.05, FilterId::Etvbf, 1.0),
            row(0.05, FilterId::ClsetKf, 2.0),
            row(0.0005, FilterId::Etvbf, 3.0),
            row(0.0005, FilterId::ClsetKf, 4.0),
        ];
        let text = plot_data(&rows, |r| r.rmse, "rmse");
        let blocks: Vec<&str> = text.split("\n\n\n").collect();
        assert_eq!(blocks.len(), 2);
        assert!(blocks[0].starts_with("# filter: etvbf"));
        let data: Vec<&str> = blocks[0].lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, vec!["0.0005 3", "0.05 1"]);
    }

    #[test]
    fn files_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.sweep = Some(Sweep {
            param: SweepParam::R,
            grid: vec![10.0],
        });
        let paths = emit_outputs(
            &[row(10.0, FilterId::Etvbf, 1.0)],
            &cfg,
            dir.path().join("out/run"),
        )
        .unwrap();
        assert_eq!(paths.len(), 4);
        for p in &paths {
            assert!(p.exists(), "{}", p.display());
        }
        let manifest = fs::read_to_string(dir.path().join("out/run_manifest.json")).unwrap();
        assert_eq!(ExperimentConfig::from_json(&manifest).unwrap(), cfg);
        assert!(emit_outputs(&[], &cfg, dir.path().join("x")).is_err());
    }
}
