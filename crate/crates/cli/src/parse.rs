//! Value parsers for command-line and config-file strings.

use rootdyn::C64;

/// Accepts `x`, `x+yi`, `x-yi`, `yi`, `i`, `-i` and `x,y`.
pub fn complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("not a complex number: {s:?} (use e.g. 2, -0.5+1.5i or 2,1.5)");
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok(C64::new(re.parse().map_err(|_| bad())?, im))
}

/// `x_min,x_max,y_min,y_max`.
pub fn window(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || format!("window must be x_min,x_max,y_min,y_max; got {s:?}");
    if parts.len() != 4 {
        return Err(bad());
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| bad())?;
    }
    if !(out[0] < out[1] && out[2] < out[3]) {
        return Err(format!("window {s:?} is empty: need x_min < x_max and y_min < y_max"));
    }
    Ok(out)
}

/// `WIDTHxHEIGHT` (or `WIDTH,HEIGHT`), or a single number for a square grid.
pub fn resolution(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("resolution must look like 301x301; got {s:?}");
    let (w, h) = match s.split_once(['x', 'X', ',']) {
        Some((w, h)) => (w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if w < 2 || h < 2 {
        return Err(format!("resolution {s:?} is below the 2x2 minimum"));
    }
    Ok((w, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("2").unwrap(), C64::new(2.0, 0.0));
        assert_eq!(complex("-10").unwrap(), C64::new(-10.0, 0.0));
        assert_eq!(complex("0.5+0.5i").unwrap(), C64::new(0.5, 0.5));
        assert_eq!(complex("3-2i").unwrap(), C64::new(3.0, -2.0));
        assert_eq!(complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(complex("2.5i").unwrap(), C64::new(0.0, 2.5));
        assert_eq!(complex("1e-3+2e+1i").unwrap(), C64::new(1e-3, 20.0));
        assert_eq!(complex("2,-1").unwrap(), C64::new(2.0, -1.0));
        assert!(complex("two").is_err());
        assert!(complex("").is_err());
    }

    #[test]
    fn windows_and_resolutions() {
        assert_eq!(window("-3.2,3.2,-3.2,3.2").unwrap(), [-3.2, 3.2, -3.2, 3.2]);
        assert!(window("1,0,0,1").is_err());
        assert!(window("1,2,3").is_err());
        assert_eq!(resolution("3001x1501").unwrap(), (3001, 1501));
        assert_eq!(resolution("301").unwrap(), (301, 301));
        assert!(resolution("1x5").is_err());
    }
}
