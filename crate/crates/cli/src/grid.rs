//! Parameter-grid syntax shared by flags and config files.
//!
//! Real grids: `1e-3`, `0.1,1,10`, `log:1e-4:1e2:25`, `lin:0:1:11`
//! (endpoints inclusive). Integer grids: `100`, `16,32,64`, `pow2:4:8`,
//! `range:1:99` or `range:2:98:4`.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeGrid(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaList(pub Vec<u8>);

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(x)
}

fn integer(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn count(s: &str) -> Result<usize, String> {
    match integer(s)? {
        0 => Err("grid count must be at least 1".into()),
        n => Ok(n),
    }
}

fn spaced(lo: f64, hi: f64, n: usize, map: impl Fn(f64) -> f64) -> Vec<f64> {
    if n == 1 {
        return vec![map(lo)];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| map(lo + i as f64 * step)).collect();
    // pin the endpoints exactly
    out[0] = map(lo);
    out[n - 1] = map(hi);
    out
}

impl FromStr for RealGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            ["log", lo, hi, n] => {
                let (lo, hi) = (number(lo)?, number(hi)?);
                if lo <= 0.0 || hi <= 0.0 {
                    return Err("log grid endpoints must be positive".into());
                }
                let mut v = spaced(lo.ln(), hi.ln(), count(n)?, f64::exp);
                let last = v.len() - 1;
                v[0] = lo;
                v[last] = hi;
                v
            }
            ["lin", lo, hi, n] => spaced(number(lo)?, number(hi)?, count(n)?, |x| x),
            [single] => single.split(',').map(number).collect::<Result<_, _>>()?,
            _ => {
                return Err(format!(
                    "cannot parse grid `{s}` (expected a list, log:lo:hi:n or lin:lo:hi:n)"
                ))
            }
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(RealGrid(values))
    }
}

impl FromStr for SizeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let values: Vec<usize> = match parts.as_slice() {
            ["pow2", lo, hi] => {
                let (lo, hi) = (integer(lo)?, integer(hi)?);
                if hi < lo || hi > 40 {
                    return Err(format!("bad pow2 range {lo}..{hi}"));
                }
                (lo..=hi).map(|e| 1usize << e).collect()
            }
            ["range", lo, hi] => (integer(lo)?..=integer(hi)?).collect(),
            ["range", lo, hi, step] => {
                let step = count(step)?;
                (integer(lo)?..=integer(hi)?).step_by(step).collect()
            }
            [single] => single.split(',').map(integer).collect::<Result<_, _>>()?,
            _ => {
                return Err(format!(
                    "cannot parse size grid `{s}` (expected a list, pow2:lo:hi or range:lo:hi[:step])"
                ))
            }
        };
        if values.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(SizeGrid(values))
    }
}

impl FromStr for AlphaList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|a| match a.trim() {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(format!("alpha must be 0 or 1, got `{other}`")),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(AlphaList(values))
    }
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, values: &[T]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for RealGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}

impl fmt::Display for SizeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}

impl fmt::Display for AlphaList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}
