//! Angle literals: plain radians or rational multiples of π.

use std::f64::consts::PI;

/// Parses `0.5`, `pi`, `-pi/2`, `3pi/4`, `3*pi/4` or `2*pi` into radians.
///
/// Multiples of π are evaluated as `(n·π)/d`, so `pi/2^k` is exact and every
/// other fraction is correctly rounded from the double nearest π.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let Some(pos) = t.find("pi") else {
        let v: f64 = t.parse().map_err(|_| format!("invalid angle {s:?}"))?;
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("angle {s:?} is not finite"))
        };
    };
    let (head, tail) = (&t[..pos], &t[pos + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let numerator = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        n => n
            .parse::<f64>()
            .map_err(|_| format!("invalid multiplier in angle {s:?}"))?,
    };
    let denominator = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("invalid divisor in angle {s:?}"))?,
    };
    let v = numerator * PI / denominator;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("angle {s:?} is not finite"))
    }
}
