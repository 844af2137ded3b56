use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use sinkhorn_core::io::{parse_vector, read_document, Format, MatrixDocument};
use sinkhorn_core::{ExactRational, Marginals, Matrix, Scalar};

use crate::args::MatrixInput;

/// Inline list or, when the argument names a file, the values in that file
/// separated by commas, whitespace or newlines.
pub fn parse_list<T: Scalar>(arg: &str) -> Result<Vec<T>> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let joined = text.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|s| !s.is_empty()).collect::<Vec<_>>().join(",");
        return parse_vector(&joined).with_context(|| format!("parsing {}", path.display()));
    }
    Ok(parse_vector(arg)?)
}

pub fn load_document<T: Scalar>(input: &MatrixInput) -> Result<MatrixDocument<T>> {
    Ok(match (&input.matrix, &input.inline) {
        (Some(path), _) => read_document(path, Format::from_path(path)).with_context(|| format!("reading {}", path.display()))?,
        (None, Some(text)) => MatrixDocument { matrix: Matrix::parse_inline(text).context("parsing --inline")?, r: None, c: None },
        (None, None) => bail!("one of --matrix or --inline is required"),
    })
}

/// Matrix plus marginals: flags first, then values stored in the file, then
/// all-ones for square matrices.
pub fn load<T: Scalar>(input: &MatrixInput) -> Result<(Matrix<T>, Marginals<T>)> {
    let mut doc = load_document::<T>(input)?;
    if let Some(r) = &input.r {
        doc.r = Some(parse_list(r).context("parsing --r")?);
    }
    if let Some(c) = &input.c {
        doc.c = Some(parse_list(c).context("parsing --c")?);
    }
    let marg = doc.marginals()?;
    marg.check_shape(&doc.matrix)?;
    Ok((doc.matrix, marg))
}

/// "2..4" (inclusive) or a single size.
pub fn parse_range(text: &str) -> Result<(usize, usize)> {
    let bad = || anyhow!("expected a size range like 2..4, got {text:?}");
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Accepts scalar literals and, for floats, exponent notation such as 1e-12.
pub fn parse_tolerance<T: Scalar>(text: Option<&str>) -> Result<T> {
    let Some(text) = text else {
        return Ok(T::default_tolerance());
    };
    if let Ok(tol) = T::parse_literal(text) {
        return Ok(tol);
    }
    let value: f64 = text.parse().map_err(|_| anyhow!("malformed tolerance {text:?}"))?;
    let exact = ExactRational::from_float(value).ok_or_else(|| anyhow!("tolerance {text:?} is not finite"))?;
    Ok(T::from_rational(&exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..4").unwrap(), (2, 4));
        assert_eq!(parse_range("2..=4").unwrap(), (2, 4));
        assert_eq!(parse_range("3").unwrap(), (3, 3));
        assert!(parse_range("4..2").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn tolerances() {
        assert_eq!(parse_tolerance::<f64>(Some("1e-12")).unwrap(), 1e-12);
        assert_eq!(parse_tolerance::<f64>(None).unwrap(), 1e-12);
        assert_eq!(parse_tolerance::<ExactRational>(Some("0")).unwrap(), ExactRational::from_integer(0.into()));
        assert!(parse_tolerance::<f64>(Some("tiny")).is_err());
    }
}
