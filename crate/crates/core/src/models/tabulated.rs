//! Models given by constant operators and sampled, linearly interpolated rates.
//!
//! File format (blank lines and `#` comments are ignored):
//!
//! ```text
//! dim=2 channels=1
//! hamiltonian
//! 1+0j 0
//! 0 -1+0j
//! rates:
//! 0.0 0.5
//! 1.0 0.7
//! channel
//! 1 0
//! 0 -1
//! rates:
//! 0.0 1.0
//! 1.0 -1.0
//! ```
//!
//! The Hamiltonian block is optional (zero when absent). Its `rates:` samples
//! are a scalar envelope, H(t) = h(t)·H₀; without samples H₀ is constant.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Operator, C64, HERMITIAN_TOL};
use crate::models::{Channel, LindbladModel};

/// Parses `re`, `imj`, `re+imj` or `re-imj` (`i` is accepted for `j`).
pub fn parse_complex(text: &str) -> Option<C64> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix(['j', 'i']) else {
        return s.parse::<f64>().ok().map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |part: &str| match part {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        p => p.parse::<f64>().ok(),
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().ok()?;
            Some(C64::new(re, imag(&body[k..])?))
        }
        None => Some(C64::new(0.0, imag(body)?)),
    }
}

/// Samples (t_k, v_k) with strictly increasing t_k.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl RateTable {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("rate table needs at least one sample".into()));
        }
        for k in 1..samples.len() {
            if !(samples[k].0 > samples[k - 1].0) {
                return Err(Error::NonMonotonicTimes { index: k });
            }
        }
        let (times, values) = samples.into_iter().unzip();
        Ok(RateTable { times, values })
    }

    pub fn first(&self) -> f64 {
        self.times[0]
    }

    pub fn last(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (first, last) = (self.first(), self.last());
        let slack = 1e-12 * first.abs().max(last.abs()).max(1.0);
        if !(t >= first - slack && t <= last + slack) {
            return Err(Error::OutOfRange { t, first, last });
        }
        let t = t.clamp(first, last);
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return Ok(self.values[0]);
        }
        if k == self.times.len() {
            return Ok(self.values[k - 1]);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        Ok(v0 + (t - t0) / (t1 - t0) * (v1 - v0))
    }
}

#[derive(Clone, Debug)]
pub struct TabulatedModel {
    dim: usize,
    hamiltonian: Operator,
    envelope: Option<RateTable>,
    channels: Vec<(Operator, RateTable)>,
}

impl TabulatedModel {
    pub fn new(
        hamiltonian: Operator,
        envelope: Option<RateTable>,
        channels: Vec<(Operator, RateTable)>,
    ) -> Result<Self> {
        let dim = hamiltonian.dim();
        let defect = hamiltonian.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: defect });
        }
        for (a, _) in &channels {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
            }
        }
        Ok(TabulatedModel { dim, hamiltonian, envelope, channels })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).model()
    }
}

impl LindbladModel for TabulatedModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn hamiltonian(&self, t: f64) -> Result<Operator> {
        match &self.envelope {
            Some(table) => Ok(self.hamiltonian.scale_real(table.eval(t)?)),
            None => Ok(self.hamiltonian.clone()),
        }
    }

    fn channels(&self, t: f64) -> Result<Vec<Channel>> {
        self.channels.iter().map(|(a, table)| Ok(Channel::new(a.clone(), table.eval(t)?))).collect()
    }
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Parser { lines, pos: 0 }
    }

    fn error(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse { line, message: message.into() }
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.0)
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied();
        self.pos += 1;
        item
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn header(&mut self) -> Result<(usize, usize)> {
        let (line, text) = self.next().ok_or_else(|| self.error(1, "empty model file"))?;
        let (mut dim, mut channels) = (None, None);
        for field in text.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| self.error(line, format!("expected key=value, found `{field}`")))?;
            let value: usize =
                value.parse().map_err(|_| self.error(line, format!("`{key}` must be a non-negative integer")))?;
            match key {
                "dim" => dim = Some(value),
                "channels" => channels = Some(value),
                _ => return Err(self.error(line, format!("unknown header key `{key}`"))),
            }
        }
        let dim = dim.ok_or_else(|| self.error(line, "header is missing `dim`"))?;
        let channels = channels.ok_or_else(|| self.error(line, "header is missing `channels`"))?;
        if dim == 0 {
            return Err(self.error(line, "dim must be positive"));
        }
        Ok((dim, channels))
    }

    fn matrix(&mut self, dim: usize) -> Result<Operator> {
        let mut data = Vec::with_capacity(dim * dim);
        for _ in 0..dim {
            let (line, text) = self.next().ok_or_else(|| self.error(self.last_line(), "matrix block is truncated"))?;
            let row: Vec<&str> = text.split_whitespace().collect();
            if row.len() != dim {
                return Err(self.error(line, format!("expected {dim} matrix entries, found {}", row.len())));
            }
            for entry in row {
                let z = parse_complex(entry)
                    .ok_or_else(|| self.error(line, format!("invalid complex literal `{entry}`")))?;
                data.push(z);
            }
        }
        Operator::new(dim, data)
    }

    fn samples(&mut self) -> Result<Option<RateTable>> {
        match self.peek() {
            Some((_, "rates:")) => self.pos += 1,
            _ => return Ok(None),
        }
        let start = self.peek().map_or(self.last_line(), |l| l.0);
        let mut samples = Vec::new();
        let mut lines = Vec::new();
        while let Some((line, text)) = self.peek() {
            if matches!(text, "channel" | "hamiltonian") {
                break;
            }
            self.pos += 1;
            let mut fields = text.split_whitespace();
            let parse = |f: Option<&str>| f.and_then(|v| v.parse::<f64>().ok());
            match (parse(fields.next()), parse(fields.next()), fields.next()) {
                (Some(t), Some(v), None) => {
                    samples.push((t, v));
                    lines.push(line);
                }
                _ => return Err(self.error(line, "expected `t value`")),
            }
        }
        if samples.is_empty() {
            return Err(self.error(start, "`rates:` block has no samples"));
        }
        RateTable::new(samples).map(Some).map_err(|e| match e {
            Error::NonMonotonicTimes { index } => self.error(lines[index], "sample times must strictly increase"),
            other => other,
        })
    }

    fn model(&mut self) -> Result<TabulatedModel> {
        let (dim, n_channels) = self.header()?;
        let mut hamiltonian = None;
        let mut channels = Vec::with_capacity(n_channels);
        while let Some((line, text)) = self.next() {
            match text {
                "hamiltonian" => {
                    if hamiltonian.is_some() {
                        return Err(self.error(line, "duplicate hamiltonian block"));
                    }
                    let h = self.matrix(dim)?;
                    let defect = h.hermiticity_defect();
                    if defect > HERMITIAN_TOL {
                        return Err(self.error(line, format!("hamiltonian is not Hermitian (defect {defect:e})")));
                    }
                    hamiltonian = Some((h, self.samples()?));
                }
                "channel" => {
                    let a = self.matrix(dim)?;
                    let rates = self.samples()?.ok_or_else(|| {
                        self.error(self.peek().map_or(self.last_line(), |l| l.0), "channel needs a `rates:` block")
                    })?;
                    channels.push((a, rates));
                }
                other => return Err(self.error(line, format!("expected `channel` or `hamiltonian`, found `{other}`"))),
            }
        }
        if channels.len() != n_channels {
            return Err(self.error(
                self.last_line(),
                format!("header declares {n_channels} channels, found {}", channels.len()),
            ));
        }
        let (h, envelope) = hamiltonian.unwrap_or_else(|| (Operator::zeros(dim), None));
        TabulatedModel::new(h, envelope, channels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5"), Some(C64::new(1.5, 0.0)));
        assert_eq!(parse_complex("2j"), Some(C64::new(0.0, 2.0)));
        assert_eq!(parse_complex("-j"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("0.5+0.5j"), Some(C64::new(0.5, 0.5)));
        assert_eq!(parse_complex("1e-3-2.5e+2j"), Some(C64::new(1e-3, -250.0)));
        assert_eq!(parse_complex("-1-1i"), Some(C64::new(-1.0, -1.0)));
        assert_eq!(parse_complex("1+j"), Some(C64::new(1.0, 1.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
    }

    #[test]
    fn constant_samples_give_constant_rate() {
        let table = RateTable::new(vec![(0.0, 1.0), (2.0, 1.0), (5.0, 1.0)]).unwrap();
        for t in [0.0, 0.3, 2.0, 4.99, 5.0] {
            assert_eq!(table.eval(t).unwrap(), 1.0);
        }
    }

    #[test]
    fn linear_interpolation() {
        let table = RateTable::new(vec![(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert_eq!(table.eval(0.5).unwrap(), 1.0);
        assert!(matches!(table.eval(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(table.eval(-0.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn rejects_non_monotonic_times() {
        let err = RateTable::new(vec![(0.0, 0.0), (1.0, 2.0), (1.0, 3.0)]).unwrap_err();
        assert_eq!(err, Error::NonMonotonicTimes { index: 2 });
    }

    const SAMPLE: &str = "\
# dephasing with a sign change
dim=2 channels=1
hamiltonian
1 0
0 -1
rates:
0 0.5
1 1.5

channel
1+0j 0
0 -1+0j
rates:
0.0 1.0
1.0 -1.0
";

    #[test]
    fn parses_model_file() {
        let model = TabulatedModel::parse(SAMPLE).unwrap();
        assert_eq!(model.dim(), 2);
        let h = model.hamiltonian(0.5).unwrap();
        assert_eq!(h, Operator::sigma_z());
        let ch = model.channels(0.25).unwrap();
        assert_eq!(ch.len(), 1);
        assert_eq!(ch[0].operator, Operator::sigma_z());
        assert_eq!(ch[0].rate, 0.5);
        assert!(matches!(model.channels(2.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn hamiltonian_without_samples_is_constant_and_absent_is_zero() {
        let text = "dim=2 channels=0\nhamiltonian\n0 1\n1 0\n";
        let model = TabulatedModel::parse(text).unwrap();
        assert_eq!(model.hamiltonian(123.0).unwrap(), Operator::sigma_x());
        let model = TabulatedModel::parse("dim=3 channels=0\n").unwrap();
        assert_eq!(model.hamiltonian(0.0).unwrap(), Operator::zeros(3));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("dim=2\n", 1),
            ("dim=2 channels=1\nchannel\n1 0\n0 x\nrates:\n0 1\n", 4),
            ("dim=2 channels=1\nchannel\n1 0 0\n0 1\nrates:\n0 1\n", 3),
            ("dim=2 channels=1\nchannel\n1 0\n0 1\nrates:\n0 1\n0 2\n", 7),
            ("dim=2 channels=2\nchannel\n1 0\n0 1\nrates:\n0 1\n", 6),
            ("dim=2 channels=0\nhamiltonian\n0 1\n2 0\n", 2),
            ("dim=2 channels=0\nbogus\n", 2),
        ];
        for (text, line) in cases {
            match TabulatedModel::parse(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
