use std::path::Path;

use nalgebra::DMatrix;

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, String> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_field(path: &Path, row: usize, field: &str) -> Result<f64, String> {
    field.parse::<f64>().map_err(|_| {
        format!(
            "{}: row {}: '{field}' is not a number",
            path.display(),
            row + 1
        )
    })
}

/// Dense matrix from a headerless, row-major CSV file.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader(path)?.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        let row = rec
            .iter()
            .map(|f| parse_field(path, i, f))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 {
        return Err(format!("{}: empty matrix", path.display()));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.into_iter().flatten(),
    ))
}

/// Vector from a CSV file: one value per line, or values on a single line.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    let mut r = reader(path)?;
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        for f in rec.iter() {
            out.push(parse_field(path, i, f)?);
        }
    }
    if out.is_empty() {
        return Err(format!("{}: empty vector", path.display()));
    }
    Ok(out)
}

/// One value per line; the inverse of [`read_vector`].
pub fn format_vector(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}\n")).collect()
}
