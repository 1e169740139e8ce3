//! Synthetic gradient-trace generators and trace file I/O.
//!
//! Traces are either materialized in memory (loaded from a file) or produced
//! lazily from a generator spec; identical spec and seed always reproduce the
//! identical trace, row by row.

use crate::linalg::Vector;
use crate::set::FeasibleSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing header line `# n=<int> T=<int>`")]
    MissingHeader,
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("line {line}: expected {expected} fields, found {got}")]
    RowArity {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: cannot parse `{field}` as a number")]
    BadField { line: usize, field: String },
    #[error("line {line}: non-finite value")]
    NonFinite { line: usize },
    #[error("expected {expected} gradient rows, found {got}")]
    RowCount { expected: usize, got: usize },
    #[error("bad generator parameter: {0}")]
    BadParam(String),
}

/// SplitMix64: a tiny, portable, seedable 64-bit generator.
///
/// State transition per draw (wrapping arithmetic):
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
/// Uniform doubles take the top 53 bits; normals use Box-Muller on two
/// uniforms. The transition is fully specified so traces reproduce across
/// platforms and language implementations.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller (two uniform draws per sample).
    pub fn normal(&mut self) -> f64 {
        let mut u1 = self.next_f64();
        while u1 == 0.0 {
            u1 = self.next_f64();
        }
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize % n.max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    /// Coordinate `i` (1-based) is 1 with probability `i^{-alpha}`, else 0.
    HeavyTail { alpha: f64 },
    /// Blocked +-1 schedule on a widening box; coordinate `i` is active only
    /// in block `i`, with the sign bias toward -1 decaying per block.
    BadFamily { blocks: Option<usize> },
    /// Rows uniform on the unit sphere.
    RandomSphere,
    /// Gradients of `||x - c||^2` at the origin for a piecewise-constant
    /// schedule of `centers` random centers.
    QuadraticDrift { centers: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub n: usize,
    pub rounds: usize,
}

impl GeneratorSpec {
    pub fn heavy_tail(seed: u64, n: usize, rounds: usize, alpha: f64) -> Result<Self, ProblemError> {
        if !(1.0..2.0).contains(&alpha) {
            return Err(ProblemError::BadParam(format!(
                "heavy-tail alpha must lie in [1, 2), got {alpha}"
            )));
        }
        if n == 0 || rounds == 0 {
            return Err(ProblemError::BadParam("n and rounds must be >= 1".into()));
        }
        Ok(GeneratorSpec {
            kind: GeneratorKind::HeavyTail { alpha },
            seed,
            n,
            rounds,
        })
    }

    pub fn random_sphere(seed: u64, n: usize, rounds: usize) -> Result<Self, ProblemError> {
        if n == 0 || rounds == 0 {
            return Err(ProblemError::BadParam("n and rounds must be >= 1".into()));
        }
        Ok(GeneratorSpec {
            kind: GeneratorKind::RandomSphere,
            seed,
            n,
            rounds,
        })
    }

    pub fn quadratic_drift(
        seed: u64,
        n: usize,
        rounds: usize,
        centers: usize,
    ) -> Result<Self, ProblemError> {
        if n == 0 || rounds == 0 || centers == 0 {
            return Err(ProblemError::BadParam(
                "n, rounds and centers must be >= 1".into(),
            ));
        }
        Ok(GeneratorSpec {
            kind: GeneratorKind::QuadraticDrift { centers },
            seed,
            n,
            rounds,
        })
    }

    pub fn bad_family(seed: u64, rounds: usize, blocks: Option<usize>) -> Result<Self, ProblemError> {
        if rounds < 8 {
            return Err(ProblemError::BadParam(format!(
                "bad-family horizon must be at least 8 rounds, got {rounds}"
            )));
        }
        let n = blocks.unwrap_or_else(|| (rounds as f64).powf(1.0 / 3.0).ceil() as usize);
        if n == 0 || n > rounds {
            return Err(ProblemError::BadParam(format!(
                "bad-family block count {n} out of range for {rounds} rounds"
            )));
        }
        Ok(GeneratorSpec {
            kind: GeneratorKind::BadFamily { blocks },
            seed,
            n,
            rounds,
        })
    }

    pub fn generate(&self) -> GradientTrace {
        GradientTrace {
            n: self.n,
            rounds: self.rounds,
            source: TraceSource::Generated(self.clone()),
        }
    }
}

/// The blocked instance: its gradient trace together with the box it is
/// meant to be played on (per-coordinate width `rounds^{1/6}`).
pub fn bad_family_instance(spec: &GeneratorSpec) -> Result<(GradientTrace, FeasibleSet), ProblemError> {
    match spec.kind {
        GeneratorKind::BadFamily { .. } => {}
        _ => {
            return Err(ProblemError::BadParam(
                "bad_family_instance requires a bad-family spec".into(),
            ))
        }
    }
    let half = (spec.rounds as f64).powf(1.0 / 6.0) / 2.0;
    let lo = Vector::new(vec![-half; spec.n]).expect("finite");
    let hi = Vector::new(vec![half; spec.n]).expect("finite");
    let set = FeasibleSet::box_set(lo, hi)
        .map_err(|e| ProblemError::BadParam(format!("bad-family box: {e}")))?;
    Ok((spec.generate(), set))
}

/// Probability that the active coordinate's gradient is -1 in block `b`
/// (0-based) of `n_blocks` over `block_len` rounds. Strong early, decaying
/// per block, floored so the per-coordinate learner still converges within
/// a block.
fn bad_family_bias(b: usize, block_len: usize) -> f64 {
    let decay = 0.45 / ((b + 1) as f64).sqrt();
    let floor = 4.0 / (block_len as f64).sqrt();
    decay.max(floor).min(0.45)
}

#[derive(Debug, Clone)]
enum TraceSource {
    Memory(Arc<Vec<Vector>>),
    Generated(GeneratorSpec),
}

/// An ordered sequence of gradient vectors. Cheap to clone; every cursor
/// obtained from [`GradientTrace::iter`] replays the same rows.
#[derive(Debug, Clone)]
pub struct GradientTrace {
    n: usize,
    rounds: usize,
    source: TraceSource,
}

impl GradientTrace {
    pub fn from_rows(rows: Vec<Vector>) -> Result<Self, ProblemError> {
        let n = rows.first().map(|r| r.dim()).unwrap_or(0);
        for (i, r) in rows.iter().enumerate() {
            if r.dim() != n {
                return Err(ProblemError::RowArity {
                    line: i + 2,
                    expected: n,
                    got: r.dim(),
                });
            }
        }
        Ok(GradientTrace {
            n,
            rounds: rows.len(),
            source: TraceSource::Memory(Arc::new(rows)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn iter(&self) -> TraceRows<'_> {
        let gen = match &self.source {
            TraceSource::Memory(_) => None,
            TraceSource::Generated(spec) => Some(RowGen::new(spec)),
        };
        TraceRows {
            trace: self,
            next: 0,
            gen,
        }
    }

    pub fn materialize(&self) -> Vec<Vector> {
        self.iter().collect()
    }
}

pub struct TraceRows<'a> {
    trace: &'a GradientTrace,
    next: usize,
    gen: Option<RowGen>,
}

impl Iterator for TraceRows<'_> {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        if self.next >= self.trace.rounds {
            return None;
        }
        let t = self.next;
        self.next += 1;
        match &self.trace.source {
            TraceSource::Memory(rows) => Some(rows[t].clone()),
            TraceSource::Generated(_) => {
                Some(self.gen.as_mut().expect("generator cursor").row(t))
            }
        }
    }
}

/// Streaming row state for a generated trace.
struct RowGen {
    n: usize,
    rounds: usize,
    kind: GeneratorKind,
    rng: SplitMix64,
    /// QuadraticDrift: precomputed centers. BadFamily: block boundaries.
    centers: Vec<Vector>,
    block_of: Vec<usize>,
    block_len: usize,
}

impl RowGen {
    fn new(spec: &GeneratorSpec) -> Self {
        let mut rng = SplitMix64::new(spec.seed);
        let mut centers = Vec::new();
        let mut block_of = Vec::new();
        let mut block_len = 0;
        match &spec.kind {
            GeneratorKind::QuadraticDrift { centers: k } => {
                for _ in 0..*k {
                    centers.push(Vector::from_raw(
                        (0..spec.n).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    ));
                }
            }
            GeneratorKind::BadFamily { .. } => {
                // block i covers rounds [i*len, (i+1)*len); the remainder
                // lands in the last block
                block_len = spec.rounds / spec.n;
                block_of = (0..spec.rounds)
                    .map(|t| (t / block_len.max(1)).min(spec.n - 1))
                    .collect();
            }
            _ => {}
        }
        RowGen {
            n: spec.n,
            rounds: spec.rounds,
            kind: spec.kind.clone(),
            rng,
            centers,
            block_of,
            block_len,
        }
    }

    fn row(&mut self, t: usize) -> Vector {
        match &self.kind {
            GeneratorKind::HeavyTail { alpha } => {
                let a = *alpha;
                Vector::from_raw(
                    (0..self.n)
                        .map(|i| {
                            let p = ((i + 1) as f64).powf(-a);
                            if self.rng.next_f64() < p {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                )
            }
            GeneratorKind::RandomSphere => {
                let mut v: Vec<f64> = (0..self.n).map(|_| self.rng.normal()).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    v[0] = 1.0;
                } else {
                    for x in &mut v {
                        *x /= norm;
                    }
                }
                Vector::from_raw(v)
            }
            GeneratorKind::QuadraticDrift { centers } => {
                let idx = (t * *centers / self.rounds).min(*centers - 1);
                self.centers[idx].scale(-2.0)
            }
            GeneratorKind::BadFamily { .. } => {
                let b = self.block_of[t];
                let bias = bad_family_bias(b, self.block_len.max(1));
                let g = if self.rng.next_f64() < 0.5 + bias {
                    -1.0
                } else {
                    1.0
                };
                let mut row = vec![0.0; self.n];
                row[b] = g;
                Vector::from_raw(row)
            }
        }
    }
}

/// Writes a trace as UTF-8 CSV: header `# n=<int> T=<int>`, then one
/// comma-separated row of decimal floats per round. Floats use the shortest
/// representation that parses back to the identical bits.
pub fn write_trace(trace: &GradientTrace, path: &Path) -> Result<(), ProblemError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# n={} T={}", trace.n(), trace.rounds())?;
    for row in trace.iter() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                write!(w, ",")?;
            }
            write!(w, "{v}")?;
            first = false;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trace written by [`write_trace`], validating the header, the
/// arity of every row, and the row count.
pub fn read_trace(path: &Path) -> Result<GradientTrace, ProblemError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines.next().ok_or(ProblemError::MissingHeader)??;
    let (n, t) = parse_header(&header)?;
    let mut rows: Vec<Vector> = Vec::with_capacity(t);
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n {
            return Err(ProblemError::RowArity {
                line: line_no,
                expected: n,
                got: fields.len(),
            });
        }
        let mut row = Vec::with_capacity(n);
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|_| ProblemError::BadField {
                line: line_no,
                field: f.trim().to_string(),
            })?;
            if !v.is_finite() {
                return Err(ProblemError::NonFinite { line: line_no });
            }
            row.push(v);
        }
        rows.push(Vector::from_raw(row));
    }
    if rows.len() != t {
        return Err(ProblemError::RowCount {
            expected: t,
            got: rows.len(),
        });
    }
    Ok(GradientTrace {
        n,
        rounds: t,
        source: TraceSource::Memory(Arc::new(rows)),
    })
}

fn parse_header(header: &str) -> Result<(usize, usize), ProblemError> {
    let body = header
        .strip_prefix('#')
        .ok_or(ProblemError::MissingHeader)?
        .trim();
    let mut n = None;
    let mut t = None;
    for tok in body.split([' ', ',']).filter(|s| !s.is_empty()) {
        if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse().map_err(|_| ProblemError::BadHeader(header.into()))?);
        } else if let Some(v) = tok.strip_prefix("T=") {
            t = Some(v.parse().map_err(|_| ProblemError::BadHeader(header.into()))?);
        } else {
            return Err(ProblemError::BadHeader(header.into()));
        }
    }
    match (n, t) {
        (Some(n), Some(t)) => Ok((n, t)),
        _ => Err(ProblemError::BadHeader(header.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_deterministic_and_spread() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = SplitMix64::new(43);
        assert_ne!(a.next_u64(), c.next_u64());
        let mut r = SplitMix64::new(7);
        let mean: f64 = (0..10_000).map(|_| r.next_f64()).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn heavy_tail_first_coordinate_always_one() {
        let spec = GeneratorSpec::heavy_tail(5, 4, 50, 1.5).unwrap();
        for row in spec.generate().iter() {
            assert_eq!(row[0], 1.0);
            for v in row.iter() {
                assert!(*v == 0.0 || *v == 1.0);
            }
        }
    }

    #[test]
    fn heavy_tail_large_index_mostly_zero() {
        let alpha = 2.0 - 1e-9;
        let spec = GeneratorSpec::heavy_tail(9, 200, 500, alpha).unwrap();
        let hits: f64 = spec.generate().iter().map(|row| row[199]).sum();
        // p = 200^{-2} ~ 2.5e-5; 500 draws should almost never hit
        assert!(hits <= 1.0);
    }

    #[test]
    fn heavy_tail_binomial_concentration() {
        let t = 10_000;
        let alpha = 1.5;
        let spec = GeneratorSpec::heavy_tail(11, 8, t, alpha).unwrap();
        let mut g = [0.0; 8];
        for row in spec.generate().iter() {
            for (i, cell) in g.iter_mut().enumerate() {
                *cell += row[i] * row[i];
            }
        }
        for (i, observed) in g.iter().enumerate() {
            let p = ((i + 1) as f64).powf(-alpha);
            let mean = t as f64 * p;
            let sigma = (t as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (observed - mean).abs() <= 3.0 * sigma + 1.0,
                "coordinate {i}: observed {observed} expected {mean} (sigma {sigma})"
            );
        }
    }

    #[test]
    fn heavy_tail_rejects_bad_alpha() {
        assert!(GeneratorSpec::heavy_tail(0, 2, 10, 0.9).is_err());
        assert!(GeneratorSpec::heavy_tail(0, 2, 10, 2.0).is_err());
    }

    #[test]
    fn bad_family_structure() {
        let spec = GeneratorSpec::bad_family(3, 8, None).unwrap();
        assert_eq!(spec.n, 2);
        let (trace, set) = bad_family_instance(&spec).unwrap();
        let rows = trace.materialize();
        assert_eq!(rows.len(), 8);
        for (t, row) in rows.iter().enumerate() {
            let active = t / 4;
            for i in 0..2 {
                if i == active {
                    assert!(row[i] == 1.0 || row[i] == -1.0);
                } else {
                    assert_eq!(row[i], 0.0);
                }
            }
        }
        let w = set.widths();
        let expect = 8f64.powf(1.0 / 6.0);
        assert!((w[0] - expect).abs() < 1e-12);
        assert!(spec.generate().materialize() == trace.materialize());
        assert!(GeneratorSpec::bad_family(3, 7, None).is_err());
    }

    #[test]
    fn generators_are_pure_functions_of_seed() {
        let spec = GeneratorSpec::random_sphere(21, 5, 40).unwrap();
        let a = spec.generate().materialize();
        let b = spec.generate().materialize();
        assert_eq!(a, b);
        let other = GeneratorSpec::random_sphere(22, 5, 40).unwrap();
        assert_ne!(a, other.generate().materialize());
        for row in &a {
            assert!((row.norm_l2() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_drift_blocks() {
        let spec = GeneratorSpec::quadratic_drift(13, 3, 10, 2).unwrap();
        let rows = spec.generate().materialize();
        // piecewise constant: first half one gradient, second half another
        assert_eq!(rows[0], rows[4]);
        assert_eq!(rows[5], rows[9]);
        assert_ne!(rows[0], rows[9]);
    }

    #[test]
    fn trace_roundtrip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let mut rng = SplitMix64::new(77);
        let rows: Vec<Vector> = (0..5)
            .map(|_| {
                Vector::from_raw((0..3).map(|_| rng.uniform(-1.0, 1.0)).collect())
            })
            .collect();
        let trace = GradientTrace::from_rows(rows.clone()).unwrap();
        write_trace(&trace, &path).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(back.n(), 3);
        assert_eq!(back.rounds(), 5);
        let got = back.materialize();
        for (a, b) in rows.iter().zip(&got) {
            assert_eq!(a.as_slice(), b.as_slice());
        }
    }

    #[test]
    fn trace_parse_errors_name_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");

        std::fs::write(&path, "# n=3 T=2\n1,2,3\n4,5\n").unwrap();
        match read_trace(&path).unwrap_err() {
            ProblemError::RowArity { line, expected, got } => {
                assert_eq!((line, expected, got), (3, 3, 2));
            }
            e => panic!("unexpected error {e:?}"),
        }

        std::fs::write(&path, "# n=2 T=1\n1,abc\n").unwrap();
        match read_trace(&path).unwrap_err() {
            ProblemError::BadField { line, field } => {
                assert_eq!(line, 2);
                assert_eq!(field, "abc");
            }
            e => panic!("unexpected error {e:?}"),
        }

        std::fs::write(&path, "# n=3 T=2\n1,2,3\n4,5,6\n7,8,9\n").unwrap();
        match read_trace(&path).unwrap_err() {
            ProblemError::RowCount { expected, got } => assert_eq!((expected, got), (2, 3)),
            e => panic!("unexpected error {e:?}"),
        }

        // comma-separated header variant parses too
        std::fs::write(&path, "# n=3,T=2\n1,2,3\n4,5,6\n").unwrap();
        assert!(read_trace(&path).is_ok());
    }
}
