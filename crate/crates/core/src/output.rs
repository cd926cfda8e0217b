//! Tabular output records, CSV/JSON serialization, parameter sweeps and the
//! profile file reader used for round-trip validation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::solver::CcpbSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

/// Run metadata plus a numeric table; `None` cells are missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub command: String,
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("not a number: '{s}'"))),
    }
}

fn meta_to_string(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format_f64(n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number for finite values, string marker otherwise.
pub fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(format_f64(v))
    }
}

impl Record {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.into(),
            metadata: Map::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn meta_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.metadata.insert(key.into(), json_f64(value));
        self
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# command: {}", self.command).unwrap();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {}", meta_to_string(v)).unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(format_f64).unwrap_or_default()).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|c| c.map(json_f64).unwrap_or(Value::Null)).collect()))
            .collect();
        let doc = json!({
            "command": self.command,
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Parses the CSV dialect written by [`Record::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = Map::new();
        let mut command = String::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines
                .next()
                .ok_or_else(|| Error::InvalidArgument("missing column header".into()))?;
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (k, v) = meta
                        .split_once(": ")
                        .ok_or_else(|| Error::InvalidArgument(format!("bad metadata line '{line}'")))?;
                    if k == "command" {
                        command = v.to_string();
                    } else {
                        metadata.insert(k.to_string(), Value::String(v.to_string()));
                    }
                }
                None => break line,
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let row = line
                .split(',')
                .map(|c| if c.is_empty() { Ok(None) } else { parse_f64(c).map(Some) })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != columns.len() {
                return Err(Error::InvalidArgument(format!(
                    "row has {} cells, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self {
            command,
            metadata,
            columns,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::InvalidArgument(format!("missing column '{name}'")))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn meta_value(&self, key: &str) -> Result<f64> {
        let v = self
            .metadata
            .get(key)
            .ok_or_else(|| Error::InvalidArgument(format!("missing metadata '{key}'")))?;
        match v {
            Value::Number(n) => Ok(n.as_f64().unwrap()),
            Value::String(s) => parse_f64(s),
            other => Err(Error::InvalidArgument(format!(
                "metadata '{key}' is not numeric: {other}"
            ))),
        }
    }
}

pub const PROFILE_COLUMNS: [&str; 5] = ["x", "phi", "phi_x", "p", "n"];

/// Odd-extended profile over `[−L/2, L/2]` with solver metadata.
pub fn profile_record(sol: &CcpbSolution, tol: f64) -> Record {
    let mut rec = Record::new("solve", &PROFILE_COLUMNS);
    let p = sol.params;
    rec.meta_f64("L", p.length)
        .meta_f64("V", p.voltage)
        .meta_f64("delta", p.stern_delta)
        .meta_f64("tol", tol)
        .meta("samples", sol.samples.len() as u64)
        .meta_f64("eps", sol.eps)
        .meta_f64("ln_eps", sol.ln_eps)
        .meta_f64("alpha", sol.alpha)
        .meta_f64("phi_x0", sol.phi_x0)
        .meta_f64("phi_boundary", sol.phi_boundary)
        .meta_f64("residual", sol.residual)
        .meta("converged", sol.residual <= tol.max(1e-13 * p.length.max(1.0)));
    let polarity = if sol.phi_boundary < 0.0 { -1.0 } else { 1.0 };
    let mut push = |x: f64, phi: f64| {
        rec.push_row(vec![
            Some(x),
            Some(phi),
            Some(polarity * sol.slope_at_phi(phi)),
            Some(sol.alpha * (-phi).exp()),
            Some(sol.alpha * phi.exp()),
        ])
    };
    for s in sol.samples.iter().skip(1).rev() {
        push(-s.x, -s.phi);
    }
    for s in &sol.samples {
        push(s.x, s.phi);
    }
    rec
}

/// Profile columns read back from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileData {
    pub length: f64,
    pub voltage: f64,
    pub alpha: f64,
    pub phi_boundary: f64,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_x: Vec<f64>,
    pub p: Vec<f64>,
    pub n: Vec<f64>,
}

impl ProfileData {
    pub fn from_record(rec: &Record) -> Result<Self> {
        let col = |name: &str| -> Result<Vec<f64>> {
            rec.column(name)?
                .into_iter()
                .map(|c| c.ok_or_else(|| Error::InvalidArgument(format!("missing value in column '{name}'"))))
                .collect()
        };
        Ok(Self {
            length: rec.meta_value("L")?,
            voltage: rec.meta_value("V")?,
            alpha: rec.meta_value("alpha")?,
            phi_boundary: rec.meta_value("phi_boundary")?,
            x: col("x")?,
            phi: col("phi")?,
            phi_x: col("phi_x")?,
            p: col("p")?,
            n: col("n")?,
        })
    }

    /// Mean of `values` over the domain, integrating each segment with
    /// 5-point Gauss-Legendre on the cubic Hermite interpolant of φ built
    /// from the `phi` and `phi_x` columns.
    fn hermite_mean(&self, f: impl Fn(f64) -> f64) -> f64 {
        const NODES: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.236_926_885_056_189_1,
            0.478_628_670_499_366_5,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
        ];
        let mut total = 0.0;
        for i in 0..self.x.len() - 1 {
            let h = self.x[i + 1] - self.x[i];
            let (p0, p1) = (self.phi[i], self.phi[i + 1]);
            let (m0, m1) = (self.phi_x[i] * h, self.phi_x[i + 1] * h);
            let mut seg = 0.0;
            for (t, w) in NODES.iter().zip(WEIGHTS) {
                let s = 0.5 * (t + 1.0);
                let (s2, s3) = (s * s, s * s * s);
                let phi = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
                    + (s3 - 2.0 * s2 + s) * m0
                    + (-2.0 * s3 + 3.0 * s2) * p1
                    + (s3 - s2) * m1;
                seg += w * f(phi);
            }
            total += 0.5 * h * seg;
        }
        total / self.length
    }
}

/// Outcome of [`validate_profile`]; every field is a measured defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileCheck {
    pub oddness: f64,
    pub center_value: f64,
    pub mean_p_error: f64,
    pub mean_n_error: f64,
    pub boltzmann_error: f64,
    pub boundary_x_error: f64,
}

/// Checks a profile against the steady-state invariants: odd, strictly
/// monotone, `φ(0) = 0`, `p = α e^{−φ}`, `n = α e^{φ}`, unit means of p and
/// n, and `x(φ_b) = L/2`.
pub fn validate_profile(data: &ProfileData) -> Result<ProfileCheck> {
    let n = data.x.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "profile needs an odd number >= 3 of rows, got {n}"
        )));
    }
    let fail = |msg: String| Err(Error::InvalidArgument(msg));
    if !data.x.windows(2).all(|w| w[1] > w[0]) {
        return fail("x is not strictly increasing".into());
    }
    let sign = data.phi_boundary.signum();
    if sign == 0.0 {
        if data.phi.iter().any(|&p| p != 0.0) {
            return fail("trivial profile must vanish".into());
        }
    } else if !data.phi.windows(2).all(|w| sign * (w[1] - w[0]) > 0.0) {
        return fail("phi is not strictly monotone".into());
    }
    let mut oddness = 0.0f64;
    for i in 0..n {
        let j = n - 1 - i;
        oddness = oddness
            .max((data.x[i] + data.x[j]).abs())
            .max((data.phi[i] + data.phi[j]).abs());
    }
    let center_value = data.phi[n / 2].abs().max(data.x[n / 2].abs());
    let mut boltzmann_error = 0.0f64;
    for i in 0..n {
        let ep = data.alpha * (-data.phi[i]).exp();
        let en = data.alpha * data.phi[i].exp();
        boltzmann_error = boltzmann_error
            .max((data.p[i] - ep).abs() / ep)
            .max((data.n[i] - en).abs() / en);
    }
    let mean_p_error = (data.alpha * data.hermite_mean(|p| (-p).exp()) - 1.0).abs();
    let mean_n_error = (data.alpha * data.hermite_mean(f64::exp) - 1.0).abs();
    let boundary_x_error = (data.x[n - 1] - 0.5 * data.length)
        .abs()
        .max((data.phi[n - 1] - data.phi_boundary).abs());
    Ok(ProfileCheck {
        oddness,
        center_value,
        mean_p_error,
        mean_n_error,
        boltzmann_error,
        boundary_x_error,
    })
}

impl ProfileCheck {
    /// True when every defect is within the acceptance tolerances.
    pub fn passes(&self) -> bool {
        self.oddness <= 1e-8
            && self.center_value <= 1e-12
            && self.mean_p_error <= 1e-6
            && self.mean_n_error <= 1e-6
            && self.boltzmann_error <= 1e-12
            && self.boundary_x_error <= 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    L,
    V,
    Eps,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// Ordered list of parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, start: f64, stop: f64, points: usize, scale: Scale) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "a sweep needs at least 2 points, got {points}"
            )));
        }
        if !(start < stop) || !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sweep needs start < stop, got {start} .. {stop}"
            )));
        }
        if scale == Scale::Log && !(start > 0.0) {
            return Err(Error::InvalidArgument("log sweep needs positive endpoints".into()));
        }
        Ok(Self {
            parameter,
            start,
            stop,
            points,
            scale,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k == 0 {
                    return self.start;
                } else if k == self.points - 1 {
                    return self.stop;
                }
                let t = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }

    pub fn to_metadata(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// Metadata strings read back from CSV.
pub fn metadata_strings(rec: &Record) -> BTreeMap<String, String> {
    rec.metadata
        .iter()
        .map(|(k, v)| (k.clone(), meta_to_string(v)))
        .collect()
}
