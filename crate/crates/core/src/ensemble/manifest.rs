//! Manifest files naming the prediction columns an ensemble should ingest.
//!
//! Plain text: `#` comments and blank lines are skipped, `key=value` lines
//! set vote parameters, and `column<TAB>model_id<TAB>dev_f1<TAB>path` lines
//! add one prediction file each (`-` for an unknown dev F1). Paths are
//! resolved relative to the manifest's own directory.

use std::fs;
use std::path::{Path, PathBuf};

use super::VoteMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestColumn {
    pub model_id: String,
    pub dev_f1: Option<f64>,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnsembleManifest {
    /// Vote parameters are optional here; the pipeline falls back to its
    /// own configuration when the manifest leaves them unset.
    pub mode: Option<VoteMode>,
    pub relax_fraction: Option<f64>,
    pub columns: Vec<ManifestColumn>,
}

pub fn load_manifest(path: &Path) -> Result<EnsembleManifest> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut manifest = EnsembleManifest::default();
    for (lineno, raw) in content.lines().enumerate() {
        let n = lineno + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("column\t") {
            let fields: Vec<&str> = rest.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(path, n, "expected `column<TAB>model_id<TAB>dev_f1<TAB>path`"));
            }
            let model_id = fields[0].to_string();
            if model_id.is_empty() {
                return Err(Error::parse(path, n, "empty model id"));
            }
            if manifest.columns.iter().any(|c| c.model_id == model_id) {
                return Err(Error::parse(path, n, format!("duplicate model id `{model_id}`")));
            }
            let dev_f1 = match fields[1] {
                "-" => None,
                raw => {
                    let f1: f64 = raw
                        .parse()
                        .map_err(|_| Error::parse(path, n, format!("bad dev F1 `{raw}`")))?;
                    if !f1.is_finite() || !(0.0..=1.0).contains(&f1) {
                        return Err(Error::parse(path, n, format!("dev F1 {f1} outside [0, 1]")));
                    }
                    Some(f1)
                }
            };
            manifest.columns.push(ManifestColumn {
                model_id,
                dev_f1,
                path: base.join(fields[2]),
            });
        } else if let Some((key, value)) = line.split_once('=') {
            match key {
                "mode" => manifest.mode = Some(VoteMode::from_name(value)?),
                "relax_fraction" => {
                    let f: f64 = value
                        .parse()
                        .map_err(|_| Error::parse(path, n, format!("bad relax_fraction `{value}`")))?;
                    manifest.relax_fraction = Some(f);
                }
                other => {
                    return Err(Error::parse(path, n, format!("unknown manifest key `{other}`")));
                }
            }
        } else {
            return Err(Error::parse(path, n, "expected a comment, `key=value`, or a `column` row"));
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, body: &str) -> PathBuf {
        let path = dir.path().join("ensemble.manifest");
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn parses_columns_and_parameters() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "# external models\nmode=relax\nrelax_fraction=0.3\n\ncolumn\tr6\t0.61\tpreds/r6.tsv\ncolumn\tr12\t-\tpreds/r12.tsv\n",
        );
        let m = load_manifest(&path).unwrap();
        assert_eq!(m.mode, Some(VoteMode::Relax));
        assert_eq!(m.relax_fraction, Some(0.3));
        assert_eq!(m.columns.len(), 2);
        assert_eq!(m.columns[0].model_id, "r6");
        assert_eq!(m.columns[0].dev_f1, Some(0.61));
        assert_eq!(m.columns[0].path, dir.path().join("preds/r6.tsv"));
        assert_eq!(m.columns[1].dev_f1, None);
    }

    #[test]
    fn parameters_are_optional() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(&dir, "column\tm\t0.5\tm.tsv\n");
        let m = load_manifest(&path).unwrap();
        assert_eq!(m.mode, None);
        assert_eq!(m.relax_fraction, None);
        assert_eq!(m.columns.len(), 1);
    }

    #[test]
    fn rejects_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        for bad in [
            "column\tm\t0.5\n",                 // missing path
            "column\tm\tnot-a-number\tp.tsv\n", // bad f1
            "column\tm\t1.5\tp.tsv\n",          // f1 out of range
            "column\t\t0.5\tp.tsv\n",           // empty id
            "mode=sometimes\n",                 // unknown mode
            "surprise\n",                       // not a row at all
            "threshold=0.5\n",                  // unknown key
            "column\ta\t0.5\tp.tsv\ncolumn\ta\t0.5\tq.tsv\n", // duplicate id
        ] {
            let path = write(&dir, bad);
            assert!(load_manifest(&path).is_err(), "accepted {bad:?}");
        }
    }
}
