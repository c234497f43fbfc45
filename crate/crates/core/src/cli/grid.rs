//! Grid syntax: a comma-separated list (`-0.5,0,2`) or an inclusive range
//! `start:stop:step`.

/// Upper limit on the number of points a single range may expand to.
const MAX_GRID_POINTS: usize = 100_000;

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty grid".into());
    }
    if spec.contains(':') {
        return parse_range(spec);
    }
    spec.split(',')
        .map(|tok| parse_number(tok.trim()))
        .collect()
}

fn parse_number(tok: &str) -> Result<f64, String> {
    let v: f64 = tok
        .parse()
        .map_err(|_| format!("invalid number '{tok}' in grid"))?;
    if !v.is_finite() {
        return Err(format!("non-finite grid value '{tok}'"));
    }
    Ok(v)
}

fn parse_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("range '{spec}' must be start:stop:step"));
    };
    let (start, stop, step) = (
        parse_number(start.trim())?,
        parse_number(stop.trim())?,
        parse_number(step.trim())?,
    );
    if step == 0.0 {
        return Err(format!("range '{spec}' has zero step"));
    }
    let steps = ((stop - start) / step).round();
    if steps < 0.0 {
        return Err(format!("range '{spec}' never reaches its stop value"));
    }
    if steps >= MAX_GRID_POINTS as f64 {
        return Err(format!("range '{spec}' expands to more than {MAX_GRID_POINTS} points"));
    }
    let count = steps as usize + 1;
    Ok((0..count)
        .map(|i| if i + 1 == count { stop } else { start + i as f64 * step })
        .collect())
}
