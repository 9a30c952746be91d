//! Flat-text solution records: a header line carrying the shared particle
//! mass, then one space-separated key=value line per bound state. Values are
//! printed with Rust's shortest round-trip float formatting, so re-reading a
//! file reproduces the numbers bit for bit.

use std::fmt::Write as _;

use kerr_dirac::radial::{BoundStateSolution, Branch};

/// One solution line; the field names and their order are the output
/// contract consumed by external tooling and by `eigenfunction --record`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub k: f64,
    /// Laguerre degree; -1 encodes the special branch, whose condition
    /// alpha + kappa = 0 is the n = -1 instance of the quantization rule.
    pub n: i64,
    pub j: i32,
    pub side: char,
    pub am: f64,
    pub omega_over_m: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub norm: f64,
    pub residual: f64,
}

impl SolutionRecord {
    pub fn from_solution(s: &BoundStateSolution, norm: f64, residual: f64) -> Self {
        let p = &s.params;
        let n = match s.branch {
            Branch::Special => -1,
            Branch::Laguerre { n } => n as i64,
        };
        Self {
            k: p.k.value(),
            n,
            j: s.j,
            side: if p.a < 0.0 { '-' } else { '+' },
            am: p.a * p.particle_mass,
            omega_over_m: s.omega / p.particle_mass,
            lambda: s.lambda,
            kappa: s.coeffs.kappa,
            alpha: s.coeffs.alpha,
            beta: s.coeffs.beta,
            gamma: s.coeffs.gamma,
            norm,
            residual,
        }
    }

    pub fn to_line(&self) -> String {
        format!(
            "k={} n={} j={} side={} am={} omega_over_m={} lambda={} kappa={} alpha={} beta={} gamma={} norm={} residual={}",
            self.k,
            self.n,
            self.j,
            self.side,
            self.am,
            self.omega_over_m,
            self.lambda,
            self.kappa,
            self.alpha,
            self.beta,
            self.gamma,
            self.norm,
            self.residual
        )
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let mut fields = std::collections::HashMap::new();
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| format!("malformed token {token:?}: expected key=value"))?;
            fields.insert(key, value);
        }
        let take = |key: &str| -> Result<&str, String> {
            fields
                .get(key)
                .copied()
                .ok_or_else(|| format!("record is missing field {key:?}"))
        };
        let f = |key: &str| -> Result<f64, String> {
            take(key)?
                .parse()
                .map_err(|e| format!("field {key:?}: {e}"))
        };
        let side = take("side")?;
        if side != "-" && side != "+" {
            return Err(format!("field \"side\": expected - or +, got {side:?}"));
        }
        Ok(Self {
            k: f("k")?,
            n: take("n")?
                .parse()
                .map_err(|e| format!("field \"n\": {e}"))?,
            j: take("j")?
                .parse()
                .map_err(|e| format!("field \"j\": {e}"))?,
            side: side.chars().next().unwrap(),
            am: f("am")?,
            omega_over_m: f("omega_over_m")?,
            lambda: f("lambda")?,
            kappa: f("kappa")?,
            alpha: f("alpha")?,
            beta: f("beta")?,
            gamma: f("gamma")?,
            norm: f("norm")?,
            residual: f("residual")?,
        })
    }
}

/// Render a full record file: `# m=<mass>` header plus one line per record.
pub fn render(particle_mass: f64, records: &[SolutionRecord]) -> String {
    let mut out = format!("# m={particle_mass}\n");
    for r in records {
        let _ = writeln!(out, "{}", r.to_line());
    }
    out
}

/// Parse a record file; returns the header mass and the records.
pub fn parse(text: &str) -> Result<(f64, Vec<SolutionRecord>), String> {
    let mut mass = None;
    let mut records = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(value) = rest.strip_prefix("m=") {
                mass = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|e| format!("line {}: header mass: {e}", ln + 1))?,
                );
            }
            continue;
        }
        records.push(
            SolutionRecord::parse_line(line).map_err(|e| format!("line {}: {e}", ln + 1))?,
        );
    }
    let mass = mass.ok_or("record file has no `# m=<mass>` header")?;
    Ok((mass, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_lines_round_trip_exactly() {
        let r = SolutionRecord {
            k: 2.5,
            n: 2,
            j: -4,
            side: '-',
            am: -1.2640651923456789,
            omega_over_m: 0.9888730123456789,
            lambda: -3.014159265358979,
            kappa: 4.612345678901234,
            alpha: -7.612345678901234,
            beta: 1.0 / 3.0,
            gamma: 0.148734567890123,
            norm: 12.345678901234567,
            residual: 3.2e-12,
        };
        let text = render(1.0, &[r.clone()]);
        let (m, parsed) = parse(&text).unwrap();
        assert_eq!(m, 1.0);
        assert_eq!(parsed, vec![r]);
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse("k=1 n=0").is_err());
        assert!(parse("# m=1\nk=0.5 n=0 j=1 side=x am=1 omega_over_m=1 lambda=1 kappa=1 alpha=1 beta=1 gamma=1 norm=1 residual=0").is_err());
        assert!(parse("# m=1\nnonsense").is_err());
        let missing = "# m=1\nk=0.5 n=0 j=1 side=- am=1 omega_over_m=1 lambda=1";
        assert!(parse(missing).unwrap_err().contains("missing field"));
    }
}
