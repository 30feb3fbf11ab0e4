use anyhow::{bail, Context, Result};

/// Parses `start:stop:count`, `log:start:stop:count`, a comma list, or a
/// single number. The result is nonempty and strictly increasing.
pub fn parse_grid(input: &str) -> Result<Vec<f64>> {
    let input = input.trim();
    let (log, body) = match input.strip_prefix("log:") {
        Some(rest) => (true, rest),
        None => (false, input),
    };
    let values = if body.contains(':') {
        let parts: Vec<&str> = body.split(':').collect();
        if parts.len() != 3 {
            bail!("grid `{input}` must look like start:stop:count");
        }
        let start: f64 = parse_num(parts[0])?;
        let stop: f64 = parse_num(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .with_context(|| format!("grid count `{}` is not a positive integer", parts[2]))?;
        if count == 0 {
            bail!("grid `{input}` has zero points");
        }
        if log && !(start > 0.0 && stop > 0.0) {
            bail!("logarithmic grid `{input}` needs positive endpoints");
        }
        if count == 1 {
            if start != stop {
                bail!("single-point grid `{input}` needs start == stop");
            }
            vec![start]
        } else {
            (0..count)
                .map(|k| {
                    let f = k as f64 / (count - 1) as f64;
                    if log {
                        (start.ln() + f * (stop.ln() - start.ln())).exp()
                    } else {
                        start + f * (stop - start)
                    }
                })
                .collect()
        }
    } else {
        if log {
            bail!("`log:` prefix needs start:stop:count");
        }
        body.split(',').map(parse_num).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        bail!("grid `{input}` is empty");
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("grid `{input}` must be strictly increasing");
    }
    Ok(values)
}

fn parse_num(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().with_context(|| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        bail!("`{s}` is not finite");
    }
    Ok(v)
}

/// Comma-separated list of numbers in any order.
pub fn parse_list(input: &str) -> Result<Vec<f64>> {
    input.split(',').filter(|p| !p.trim().is_empty()).map(parse_num).collect()
}
