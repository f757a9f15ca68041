//! Shell-friendly state descriptions.
//!
//! ```text
//! coherent:RE[+IMi]     coherent:2.236      coherent:1.5-0.5i
//! fock:K                fock:1
//! dfs:RE[+IMi],K        dfs:2.15+2.1i,1
//! thermal:NBAR          thermal:3
//! ```

use qtomo_core::states::StateSpec;
use qtomo_core::Complex64;

use crate::error::{CliError, Result};

fn bad(spec: &str, message: impl ToString) -> CliError {
    CliError::StateSpec { spec: spec.to_string(), message: message.to_string() }
}

/// Parses `RE`, `RE+IMi`, `RE-IMi` or `IMi`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse().ok()?, parse_imag(&body[i..])?),
        None => (0.0, parse_imag(body)?),
    };
    Some(Complex64::new(re, im))
}

fn parse_imag(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}

pub fn parse_state(spec: &str) -> Result<StateSpec> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| bad(spec, "expected KIND:ARGS"))?;
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
    match kind.trim().to_ascii_lowercase().as_str() {
        "coherent" => {
            let alpha = parse_complex(args).filter(|z| finite(*z)).ok_or_else(|| bad(spec, "bad amplitude"))?;
            Ok(StateSpec::Coherent { alpha })
        }
        "fock" => {
            let k = args.trim().parse().map_err(|e| bad(spec, e))?;
            Ok(StateSpec::Fock { k })
        }
        "dfs" => {
            let (a, k) = args.split_once(',').ok_or_else(|| bad(spec, "expected dfs:ALPHA,K"))?;
            let alpha = parse_complex(a).filter(|z| finite(*z)).ok_or_else(|| bad(spec, "bad amplitude"))?;
            let k = k.trim().parse().map_err(|e| bad(spec, e))?;
            Ok(StateSpec::DisplacedFock { alpha, k })
        }
        "thermal" => {
            let nbar: f64 = args.trim().parse().map_err(|e| bad(spec, e))?;
            if !(nbar >= 0.0 && nbar.is_finite()) {
                return Err(bad(spec, "occupation must be finite and >= 0"));
            }
            Ok(StateSpec::Thermal { nbar })
        }
        other => Err(bad(spec, format!("unknown state kind {other:?}"))),
    }
}
