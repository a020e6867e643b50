use crate::args::ValuesArgs;
use crate::error::{CliError, CliResult};

/// Values of a swept parameter, from `--values` or `--range`.
pub fn sweep_values(args: &ValuesArgs) -> CliResult<Vec<f64>> {
    match (&args.values, &args.range) {
        (Some(list), None) => parse_list(list),
        (None, Some(range)) => parse_range(range),
        (None, None) => Err(CliError::usage("values", "give --values or --range")),
        (Some(_), Some(_)) => Err(CliError::usage(
            "values",
            "--values and --range are exclusive",
        )),
    }
}

pub fn parse_list(list: &str) -> CliResult<Vec<f64>> {
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_number("values", s))
        .collect::<CliResult<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::usage("values", "empty list"));
    }
    Ok(values)
}

/// `lo:hi:n` or `lo:hi:n:log`, endpoints included. `n = 1` yields `[lo]`.
pub fn parse_range(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let log = match parts.as_slice() {
        [_, _, _] => false,
        [_, _, _, "log"] => true,
        [_, _, _, "lin"] => false,
        _ => {
            return Err(CliError::usage(
                "range",
                format!("`{spec}` is not lo:hi:n[:log]"),
            ))
        }
    };
    let lo = parse_number("range", parts[0])?;
    let hi = parse_number("range", parts[1])?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::usage("range", format!("`{}` is not a count", parts[2])))?;
    if n == 0 {
        return Err(CliError::usage("range", "count must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if lo == hi {
        return Err(CliError::usage(
            "range",
            "a multi-point range must be strictly monotone",
        ));
    }
    if log && (lo <= 0.0 || hi <= 0.0) {
        return Err(CliError::usage(
            "range",
            "log ranges need positive endpoints",
        ));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let s = i as f64 / last;
            match (i, log) {
                (0, _) => lo,
                (i, _) if i == n - 1 => hi,
                (_, true) => (lo.ln() + s * (hi.ln() - lo.ln())).exp(),
                (_, false) => lo + s * (hi - lo),
            }
        })
        .collect())
}

fn parse_number(param: &str, s: &str) -> CliResult<f64> {
    let x: f64 = s
        .parse()
        .map_err(|_| CliError::usage(param, format!("`{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::usage(param, format!("`{s}` is not finite")));
    }
    Ok(x)
}
