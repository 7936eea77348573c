//! On-disk persistence of the class-number and class-polynomial memos.
//!
//! Two plain-text files in one directory, one record per line, decimal:
//! `classdata.txt` holds "disc h f w", `classpoly.txt` holds
//! "disc c0 c1 ... ch". Loaded records are validated, not trusted blindly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;

use crate::classpoly::{cached_classpolys, seed_classpoly, ClassPolynomial};
use crate::error::{Error, Result};
use crate::quad::{cached_class_data, seed_class_data, ClassData};

pub const CACHE_ENV: &str = "SHIMURA_LOCAL_CACHE";

const CLASS_DATA_FILE: &str = "classdata.txt";
const CLASS_POLY_FILE: &str = "classpoly.txt";

/// The directory named by the environment, if set and non-empty.
pub fn dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn read_lines(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l.split_whitespace().map(str::to_string).collect()))
            .collect()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(Error::Cache(format!("{}: {e}", path.display()))),
    }
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Cache(format!("{}:{line}: bad number {s:?}", path.display())))
}

/// Seed the memos from `dir`. Returns (class data records, polynomials).
pub fn load(dir: &Path) -> Result<(usize, usize)> {
    let cd_path = dir.join(CLASS_DATA_FILE);
    let mut n_cd = 0;
    for (line, parts) in read_lines(&cd_path)? {
        if parts.len() != 4 {
            return Err(Error::Cache(format!("{}:{line}: expected 4 fields", cd_path.display())));
        }
        seed_class_data(ClassData {
            disc: field(&cd_path, line, &parts[0])?,
            h: field(&cd_path, line, &parts[1])?,
            f: field(&cd_path, line, &parts[2])?,
            w: field(&cd_path, line, &parts[3])?,
        })?;
        n_cd += 1;
    }
    let hp_path = dir.join(CLASS_POLY_FILE);
    let mut n_hp = 0;
    for (line, parts) in read_lines(&hp_path)? {
        if parts.len() < 3 {
            return Err(Error::Cache(format!("{}:{line}: expected a discriminant and coefficients", hp_path.display())));
        }
        let disc: i64 = field(&hp_path, line, &parts[0])?;
        let coeffs = parts[1..].iter().map(|c| field::<BigInt>(&hp_path, line, c)).collect::<Result<Vec<_>>>()?;
        seed_classpoly(ClassPolynomial::from_coeffs(disc, coeffs)?)?;
        n_hp += 1;
    }
    Ok((n_cd, n_hp))
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let err = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(err)?;
    f.write_all(body.as_bytes()).map_err(err)?;
    f.sync_all().map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

/// Write every memoized entry to `dir`, creating it if needed.
pub fn save(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
    let mut cd = String::new();
    for r in cached_class_data() {
        cd.push_str(&format!("{} {} {} {}\n", r.disc, r.h, r.f, r.w));
    }
    write_atomic(&dir.join(CLASS_DATA_FILE), &cd)?;
    let mut hp = String::new();
    for h in cached_classpolys() {
        hp.push_str(&h.disc().to_string());
        for c in h.coeffs() {
            hp.push(' ');
            hp.push_str(&c.to_string());
        }
        hp.push('\n');
    }
    write_atomic(&dir.join(CLASS_POLY_FILE), &hp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("shimura-local-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn save_then_load() {
        let dir = scratch("roundtrip");
        crate::classpoly::hilbert_classpoly(-23).unwrap();
        crate::quad::class_data(-52).unwrap();
        save(&dir).unwrap();
        let text = fs::read_to_string(dir.join(CLASS_POLY_FILE)).unwrap();
        assert!(text.lines().any(|l| l == "-23 12771880859375 -5151296875 3491750 1"));
        let (cd, hp) = load(&dir).unwrap();
        assert!(cd >= 1 && hp >= 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn missing_files_are_empty() {
        assert_eq!(load(&scratch("missing")).unwrap(), (0, 0));
    }

    #[test]
    fn inconsistent_records_rejected() {
        let dir = scratch("bad");
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join(CLASS_DATA_FILE), "-23 3 1 4\n").unwrap();
        assert!(matches!(load(&dir), Err(Error::Cache(_))));
        fs::write(dir.join(CLASS_DATA_FILE), "-23 3 x 2\n").unwrap();
        assert!(load(&dir).is_err());
        fs::write(dir.join(CLASS_DATA_FILE), "").unwrap();
        fs::write(dir.join(CLASS_POLY_FILE), "-23 1 2 1\n").unwrap();
        assert!(load(&dir).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }
}
