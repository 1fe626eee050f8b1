//! Penalty-grid specifications: `auto:K` (from the data's max correlation,
//! four decades down), `log:HI:LO:K`, or an explicit comma list.

use loocv_core::model::normalize_grid;
use loocv_core::replica::log_grid;

use crate::errors::{CliError, CliResult};

pub enum LambdaSpec {
    Auto(usize),
    Explicit(Vec<f64>),
}

pub fn parse_lambda_spec(spec: &str) -> CliResult<LambdaSpec> {
    if let Some(rest) = spec.strip_prefix("auto:") {
        let count: usize = rest
            .parse()
            .map_err(|_| CliError::BadInput(format!("bad auto grid count '{rest}'")))?;
        if count == 0 {
            return Err(CliError::BadInput("auto grid count must be positive".into()));
        }
        return Ok(LambdaSpec::Auto(count));
    }
    if let Some(rest) = spec.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::BadInput(format!(
                "log grid must be log:HI:LO:COUNT, got '{spec}'"
            )));
        }
        let hi: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::BadInput(format!("bad grid bound '{}'", parts[0])))?;
        let lo: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::BadInput(format!("bad grid bound '{}'", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| CliError::BadInput(format!("bad grid count '{}'", parts[2])))?;
        let grid = log_grid(hi, lo, count).map_err(|e| CliError::BadInput(e.to_string()))?;
        return Ok(LambdaSpec::Explicit(grid));
    }
    let mut values = Vec::new();
    for tok in spec.split(',') {
        let v: f64 = tok
            .trim()
            .parse()
            .map_err(|_| CliError::BadInput(format!("bad lambda value '{tok}'")))?;
        values.push(v);
    }
    let (grid, reversed) = normalize_grid(values).map_err(|e| CliError::BadInput(e.to_string()))?;
    if reversed {
        eprintln!("note: lambda grid given ascending; reversed for warm starts");
    }
    Ok(LambdaSpec::Explicit(grid))
}

/// Resolves `auto:K` against the data scale: K points log-spaced from
/// `lambda_max` down four decades.
pub fn resolve_auto(count: usize, lambda_max: f64) -> CliResult<Vec<f64>> {
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(CliError::BadInput(
            "auto grid needs a nonzero max correlation; is y all zeros?".into(),
        ));
    }
    log_grid(lambda_max, lambda_max * 1e-4, count).map_err(|e| CliError::BadInput(e.to_string()))
}
