//! Parsing of the `start:stop:count` sparsity-grid argument.

/// Parse `start:stop:count` into an inclusive, linearly spaced, strictly
/// increasing grid of sparsity ratios inside (0, 1).  `count = 1` denotes a
/// single point and requires `start = stop`.
pub fn parse_beta_grid(arg: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = arg.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:count, got '{arg}'"));
    }
    let start: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("grid start '{}' is not a number", parts[0]))?;
    let stop: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("grid stop '{}' is not a number", parts[1]))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("grid count '{}' is not a positive integer", parts[2]))?;
    if !start.is_finite() || !stop.is_finite() || start <= 0.0 || stop >= 1.0 {
        return Err(format!(
            "grid endpoints must lie strictly inside (0, 1), got {start}:{stop}"
        ));
    }
    if count == 0 {
        return Err("grid count must be at least 1".into());
    }
    if count == 1 {
        if start != stop {
            return Err(format!(
                "a single-point grid requires start = stop, got {start} != {stop}"
            ));
        }
        return Ok(vec![start]);
    }
    if start >= stop {
        return Err(format!(
            "grid requires start < stop for count > 1, got {start} >= {stop}"
        ));
    }
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                stop
            } else {
                start + (stop - start) * i as f64 / (count - 1) as f64
            }
        })
        .collect())
}
