//! CSV input and output.
//!
//! Domain sample files store one variable per row and one sample per column;
//! the first field of each row is the variable label and the header row
//! labels the sample columns. A leading `# manifest: <hash>` comment ties the
//! file to its run; readers skip `#` lines. The `--transpose` convention
//! (samples as rows, variable labels in the header) is handled on read.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;

pub fn write_domain_csv(
    path: &Path,
    matrix: &DMatrix<f64>,
    domain_1based: usize,
    manifest_hash: &str,
) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writeln!(file, "# manifest: {manifest_hash}")?;
    let mut header = String::from("variable");
    for j in 0..matrix.ncols() {
        header.push_str(&format!(",s{}", j + 1));
    }
    writeln!(file, "{header}")?;
    for i in 0..matrix.nrows() {
        let mut line = format!("v{}_{}", domain_1based, i + 1);
        for j in 0..matrix.ncols() {
            line.push(',');
            line.push_str(&format!("{}", matrix[(i, j)]));
        }
        writeln!(file, "{line}")?;
    }
    Ok(())
}

/// Reads a domain CSV. With `transpose = false`, rows are variables (label in
/// the first field); with `transpose = true`, the header carries the variable
/// labels and each row is one sample.
pub fn read_domain_csv(path: &Path, transpose: bool) -> Result<(Vec<String>, DMatrix<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(false)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut records: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        records.push(record.with_context(|| format!("malformed CSV in {}", path.display()))?);
    }
    if records.len() < 2 {
        bail!("{}: expected a header row and at least one data row", path.display());
    }
    let header = records.remove(0);
    let parse = |field: &str, row: usize, col: usize| -> Result<f64> {
        field.trim().parse::<f64>().with_context(|| {
            format!("{}: row {row}, column {col}: not a number: {field:?}", path.display())
        })
    };
    if transpose {
        let labels: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
        let d = labels.len();
        let n = records.len();
        let mut matrix = DMatrix::zeros(d, n);
        for (j, record) in records.iter().enumerate() {
            if record.len() != d {
                bail!(
                    "{}: sample row {} has {} fields, header has {d}",
                    path.display(),
                    j + 2,
                    record.len()
                );
            }
            for (i, field) in record.iter().enumerate() {
                matrix[(i, j)] = parse(field, j + 2, i + 1)?;
            }
        }
        Ok((labels, matrix))
    } else {
        let n = header.len() - 1;
        let d = records.len();
        if n == 0 {
            bail!("{}: no sample columns", path.display());
        }
        let mut labels = Vec::with_capacity(d);
        let mut matrix = DMatrix::zeros(d, n);
        for (i, record) in records.iter().enumerate() {
            if record.len() != n + 1 {
                bail!(
                    "{}: row {} has {} fields, header implies {}",
                    path.display(),
                    i + 2,
                    record.len(),
                    n + 1
                );
            }
            labels.push(record[0].trim().to_string());
            for j in 0..n {
                matrix[(i, j)] = parse(&record[j + 1], i + 2, j + 2)?;
            }
        }
        Ok((labels, matrix))
    }
}

/// Writes a labeled matrix (`B_hat.csv`, `A_hat.csv`).
pub fn write_matrix_csv(
    path: &Path,
    matrix: &DMatrix<f64>,
    row_labels: &[String],
    col_labels: &[String],
    manifest_hash: &str,
) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writeln!(file, "# manifest: {manifest_hash}")?;
    let mut header = String::from("label");
    for c in col_labels {
        header.push(',');
        header.push_str(c);
    }
    writeln!(file, "{header}")?;
    for i in 0..matrix.nrows() {
        let mut line = row_labels[i].clone();
        for j in 0..matrix.ncols() {
            line.push(',');
            line.push_str(&format!("{}", matrix[(i, j)]));
        }
        writeln!(file, "{line}")?;
    }
    Ok(())
}

/// Variable labels `v{e}_{i}` for all domains, 1-based like the file format.
pub fn observed_labels(dims: &[usize]) -> Vec<String> {
    let mut labels = Vec::new();
    for (e, &d) in dims.iter().enumerate() {
        for i in 0..d {
            labels.push(format!("v{}_{}", e + 1, i + 1));
        }
    }
    labels
}
