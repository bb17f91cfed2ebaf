//! Serialization: sparse matrices, dense data, and ray-set configs.
//!
//! Two little-endian binary formats and one line-oriented text format.
//!
//! Sparse matrix (`XRTSPMAT`): 8-byte magic, u32 version (1), u64 row
//! count, u64 column count, u64 total entry count; then per row a u64 entry
//! count followed by that many (u64 column index, f64 length) pairs with
//! strictly increasing indices. Readers validate everything and report the
//! byte offset of the first violation.
//!
//! Dense data (`XRTDENSE`): 8-byte magic, u32 version (1), u32 dimension
//! (1 = vector of per-ray values, 2 = 2D image, 3 = 3D image), one u64 per
//! dimension (nx, ny, nz order), then the f64 payload in flat order.
//!
//! Ray-set config: `#` starts a comment, blank lines are skipped. The first
//! entry must be a `grid` line (`grid nx=.. ny=.. [nz=..] [scale=..]
//! [cx=.. cy=.. [cz=..]]`, scale 1 and center 0 by default), then one ray
//! per line: a geometry tag followed by `key=value` fields. Keys are case
//! sensitive (`D` is the source
//! distance, `H` the helical source offset, `h` the flat-detector vertical
//! coordinate); all angles are radians. Errors carry 1-based line numbers.

use std::collections::BTreeSet;
use std::io::{ErrorKind, Read, Write};

use crate::error::{Error, Result};
use crate::geometry::BeamSpec;
use crate::grid::ImageGrid;
use crate::projector::{ProjectionMatrix, RaySet};
use crate::sparse::{IntersectionRecord, SparseRow};

pub const SPMAT_MAGIC: [u8; 8] = *b"XRTSPMAT";
pub const DENSE_MAGIC: [u8; 8] = *b"XRTDENSE";
pub const FORMAT_VERSION: u32 = 1;

/// Field keys that hold angles, for callers that preprocess degree input.
pub const ANGLE_KEYS: &[&str] = &["phi", "gamma", "alpha", "beta", "phi1", "phi2", "phi1p"];

/// Dense payload: a vector of per-ray values or an image.
#[derive(Debug, Clone, PartialEq)]
pub enum DenseData {
    Vector(Vec<f64>),
    Image2D { nx: usize, ny: usize, data: Vec<f64> },
    Image3D { nx: usize, ny: usize, nz: usize, data: Vec<f64> },
}

impl DenseData {
    pub fn values(&self) -> &[f64] {
        match self {
            DenseData::Vector(v) => v,
            DenseData::Image2D { data, .. } => data,
            DenseData::Image3D { data, .. } => data,
        }
    }
}

/// Byte-offset tracking reader that distinguishes truncation from IO
/// failure.
struct Reader<'r, R: Read> {
    inner: &'r mut R,
    offset: u64,
    kind: &'static str,
}

impl<'r, R: Read> Reader<'r, R> {
    fn new(inner: &'r mut R, kind: &'static str) -> Self {
        Self { inner, offset: 0, kind }
    }

    fn fail(&self, offset: u64, reason: impl Into<String>) -> Error {
        Error::Format { kind: self.kind, offset, reason: reason.into() }
    }

    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        match self.inner.read_exact(&mut buf) {
            Ok(()) => {
                self.offset += N as u64;
                Ok(buf)
            }
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => {
                Err(self.fail(self.offset, "unexpected end of file"))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    /// Errors unless the stream is exactly exhausted.
    fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.inner.read(&mut probe) {
            Ok(0) => Ok(()),
            Ok(_) => Err(self.fail(self.offset, "trailing bytes after payload")),
            Err(e) => Err(e.into()),
        }
    }
}

/// Writes a sparse matrix in XRTSPMAT form.
pub fn write_matrix<W: Write>(w: &mut W, matrix: &ProjectionMatrix) -> Result<()> {
    w.write_all(&SPMAT_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(matrix.n_rows() as u64).to_le_bytes())?;
    w.write_all(&(matrix.n_cols() as u64).to_le_bytes())?;
    w.write_all(&(matrix.nnz() as u64).to_le_bytes())?;
    for row in matrix.rows() {
        w.write_all(&(row.len() as u64).to_le_bytes())?;
        for rec in row.records() {
            w.write_all(&(rec.index as u64).to_le_bytes())?;
            w.write_all(&rec.length.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads and fully validates an XRTSPMAT stream.
pub fn read_matrix<R: Read>(r: &mut R) -> Result<ProjectionMatrix> {
    let mut cur = Reader::new(r, "XRTSPMAT");
    let magic: [u8; 8] = cur.bytes()?;
    if magic != SPMAT_MAGIC {
        return Err(cur.fail(0, "bad magic, expected XRTSPMAT"));
    }
    let at = cur.offset;
    let version = cur.u32()?;
    if version != FORMAT_VERSION {
        return Err(cur.fail(at, format!("unsupported version {version}")));
    }
    let n_rows = cur.u64()? as usize;
    let n_cols = cur.u64()? as usize;
    let total_nnz = cur.u64()?;

    let mut rows = Vec::with_capacity(n_rows.min(1 << 16));
    let mut running: u64 = 0;
    for _ in 0..n_rows {
        let at_nnz = cur.offset;
        let nnz = cur.u64()?;
        running = running
            .checked_add(nnz)
            .filter(|&sum| sum <= total_nnz)
            .ok_or_else(|| {
                cur.fail(at_nnz, format!("row entry counts exceed the declared total {total_nnz}"))
            })?;
        let mut records = Vec::with_capacity((nnz as usize).min(1 << 16));
        let mut prev: Option<u64> = None;
        for _ in 0..nnz {
            let at_idx = cur.offset;
            let index = cur.u64()?;
            if index as usize >= n_cols {
                return Err(
                    cur.fail(at_idx, format!("column index {index} outside {n_cols} columns"))
                );
            }
            if prev.is_some_and(|p| index <= p) {
                return Err(cur.fail(at_idx, "column indices must be strictly increasing"));
            }
            prev = Some(index);
            let at_len = cur.offset;
            let length = cur.f64()?;
            if !(length.is_finite() && length > 0.0) {
                return Err(
                    cur.fail(at_len, format!("length must be positive and finite, got {length}"))
                );
            }
            records.push(IntersectionRecord { index: index as usize, length });
        }
        rows.push(SparseRow::from_unsorted(records).expect("validated while reading"));
    }
    if running != total_nnz {
        return Err(cur.fail(
            cur.offset,
            format!("declared {total_nnz} entries but rows hold {running}"),
        ));
    }
    cur.expect_eof()?;
    ProjectionMatrix::new(n_cols, rows)
}

/// Writes dense data in XRTDENSE form.
pub fn write_dense<W: Write>(w: &mut W, data: &DenseData) -> Result<()> {
    let (dim, shape, values): (u32, Vec<u64>, &[f64]) = match data {
        DenseData::Vector(v) => (1, vec![v.len() as u64], v),
        DenseData::Image2D { nx, ny, data } => (2, vec![*nx as u64, *ny as u64], data),
        DenseData::Image3D { nx, ny, nz, data } => {
            (3, vec![*nx as u64, *ny as u64, *nz as u64], data)
        }
    };
    let expect: u64 = shape.iter().product();
    if expect != values.len() as u64 {
        return Err(Error::Mismatch(format!(
            "dense payload holds {} values but the shape needs {expect}",
            values.len()
        )));
    }
    w.write_all(&DENSE_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&dim.to_le_bytes())?;
    for extent in &shape {
        w.write_all(&extent.to_le_bytes())?;
    }
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads and fully validates an XRTDENSE stream.
pub fn read_dense<R: Read>(r: &mut R) -> Result<DenseData> {
    let mut cur = Reader::new(r, "XRTDENSE");
    let magic: [u8; 8] = cur.bytes()?;
    if magic != DENSE_MAGIC {
        return Err(cur.fail(0, "bad magic, expected XRTDENSE"));
    }
    let at = cur.offset;
    let version = cur.u32()?;
    if version != FORMAT_VERSION {
        return Err(cur.fail(at, format!("unsupported version {version}")));
    }
    let at = cur.offset;
    let dim = cur.u32()?;
    if !(1..=3).contains(&dim) {
        return Err(cur.fail(at, format!("dimension must be 1, 2, or 3, got {dim}")));
    }
    let mut shape = [1u64; 3];
    let mut count: u64 = 1;
    for extent in shape.iter_mut().take(dim as usize) {
        let at = cur.offset;
        *extent = cur.u64()?;
        if *extent == 0 {
            return Err(cur.fail(at, "shape extents must be at least 1"));
        }
        count = count
            .checked_mul(*extent)
            .filter(|&c| c <= (1u64 << 40))
            .ok_or_else(|| cur.fail(at, "payload size out of range"))?;
    }
    let mut data = Vec::with_capacity((count as usize).min(1 << 16));
    for _ in 0..count {
        let at = cur.offset;
        let v = cur.f64()?;
        if !v.is_finite() {
            return Err(cur.fail(at, format!("value must be finite, got {v}")));
        }
        data.push(v);
    }
    cur.expect_eof()?;
    Ok(match dim {
        1 => DenseData::Vector(data),
        2 => DenseData::Image2D { nx: shape[0] as usize, ny: shape[1] as usize, data },
        _ => DenseData::Image3D {
            nx: shape[0] as usize,
            ny: shape[1] as usize,
            nz: shape[2] as usize,
            data,
        },
    })
}

/// `key=value` fields of one config line, with duplicate detection.
struct Fields<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(body: &'a str) -> std::result::Result<Self, String> {
        let mut pairs = Vec::new();
        let mut seen = BTreeSet::new();
        for token in body.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{token}`"))?;
            if key.is_empty() || value.is_empty() {
                return Err(format!("expected key=value, got `{token}`"));
            }
            if !seen.insert(key) {
                return Err(format!("duplicate key `{key}`"));
            }
            pairs.push((key, value));
        }
        Ok(Self { pairs })
    }

    fn take_raw(&mut self, key: &str) -> Option<&'a str> {
        let pos = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(pos).1)
    }

    fn take_f64(&mut self, key: &str) -> std::result::Result<f64, String> {
        let raw = self.take_raw(key).ok_or_else(|| format!("missing key `{key}`"))?;
        raw.parse().map_err(|_| format!("key `{key}`: `{raw}` is not a number"))
    }

    fn take_f64_opt(&mut self, key: &str) -> std::result::Result<Option<f64>, String> {
        match self.take_raw(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| format!("key `{key}`: `{raw}` is not a number")),
            None => Ok(None),
        }
    }

    fn take_usize(&mut self, key: &str) -> std::result::Result<usize, String> {
        let raw = self.take_raw(key).ok_or_else(|| format!("missing key `{key}`"))?;
        raw.parse().map_err(|_| format!("key `{key}`: `{raw}` is not a positive integer"))
    }

    fn take_usize_opt(&mut self, key: &str) -> std::result::Result<Option<usize>, String> {
        match self.take_raw(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| format!("key `{key}`: `{raw}` is not a positive integer")),
            None => Ok(None),
        }
    }

    fn finish(self) -> std::result::Result<(), String> {
        match self.pairs.first() {
            Some((key, _)) => Err(format!("unknown key `{key}`")),
            None => Ok(()),
        }
    }
}

fn grid_from_fields(body: &str) -> std::result::Result<ImageGrid, String> {
    let mut fields = Fields::parse(body)?;
    let nx = fields.take_usize("nx")?;
    let ny = fields.take_usize("ny")?;
    let nz = fields.take_usize_opt("nz")?;
    let scale = fields.take_f64_opt("scale")?.unwrap_or(1.0);
    let cx = fields.take_f64_opt("cx")?.unwrap_or(0.0);
    let cy = fields.take_f64_opt("cy")?.unwrap_or(0.0);
    let cz = fields.take_f64_opt("cz")?;
    if nz.is_none() && cz.is_some() {
        return Err("key `cz` needs a 3D grid (`nz`)".into());
    }
    fields.finish()?;
    let grid = match nz {
        None => ImageGrid::new_2d(nx, ny, scale, [cx, cy]),
        Some(nz) => ImageGrid::new_3d(nx, ny, nz, scale, [cx, cy, cz.unwrap_or(0.0)]),
    };
    grid.map_err(|e| e.to_string())
}

fn spec_from_fields(tag: &str, body: &str) -> std::result::Result<BeamSpec, String> {
    let mut f = Fields::parse(body)?;
    let spec = match tag {
        "parallel2d" => BeamSpec::Parallel2D { s: f.take_f64("s")?, phi: f.take_f64("phi")? },
        "fan_equiangular" => BeamSpec::FanEquiangular {
            d: f.take_f64("D")?,
            alpha: f.take_f64("alpha")?,
            gamma: f.take_f64("gamma")?,
            gamma_max: f.take_f64_opt("gamma_max")?,
        },
        "fan_equispaced" => BeamSpec::FanEquispaced {
            d: f.take_f64("D")?,
            alpha: f.take_f64("alpha")?,
            t: f.take_f64("t")?,
            t_max: f.take_f64_opt("t_max")?,
        },
        "parallel3d" => BeamSpec::Parallel3D {
            s1: f.take_f64("s1")?,
            s2: f.take_f64("s2")?,
            phi1: f.take_f64("phi1")?,
            phi2: f.take_f64("phi2")?,
        },
        "cone_equiangular" => BeamSpec::ConeEquiangular {
            d: f.take_f64("D")?,
            phi1p: f.take_f64("phi1p")?,
            alpha: f.take_f64("alpha")?,
            beta: f.take_f64("beta")?,
        },
        "cone_equispaced" => BeamSpec::ConeEquispaced {
            d: f.take_f64("D")?,
            phi1p: f.take_f64("phi1p")?,
            t: f.take_f64("t")?,
            h: f.take_f64("h")?,
        },
        "helical_equiangular" => BeamSpec::HelicalEquiangular {
            d: f.take_f64("D")?,
            phi1p: f.take_f64("phi1p")?,
            alpha: f.take_f64("alpha")?,
            beta: f.take_f64("beta")?,
            h_offset: f.take_f64("H")?,
        },
        "helical_equispaced" => BeamSpec::HelicalEquispaced {
            d: f.take_f64("D")?,
            phi1p: f.take_f64("phi1p")?,
            t: f.take_f64("t")?,
            h: f.take_f64("h")?,
            h_offset: f.take_f64("H")?,
        },
        other => return Err(format!("unknown geometry tag `{other}`")),
    };
    f.finish()?;
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

/// Parses a standalone grid description (`nx=.. ny=.. [scale=..]`, no
/// tag).
pub fn parse_grid_fields(body: &str) -> Result<ImageGrid> {
    grid_from_fields(body).map_err(|reason| Error::Config { line: 1, reason })
}

/// Parses a standalone ray line (`<tag> key=value ...`).
pub fn parse_ray_line(line: &str) -> Result<BeamSpec> {
    let trimmed = strip_comment(line).trim();
    let (tag, body) = match trimmed.split_once(char::is_whitespace) {
        Some((tag, body)) => (tag, body),
        None => (trimmed, ""),
    };
    if tag.is_empty() {
        return Err(Error::Config { line: 1, reason: "empty ray line".into() });
    }
    spec_from_fields(tag, body).map_err(|reason| Error::Config { line: 1, reason })
}

/// Parses a full ray-set config: a grid line followed by ray lines.
pub fn parse_rayset(text: &str) -> Result<RaySet> {
    let mut grid: Option<ImageGrid> = None;
    let mut specs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (tag, body) = match content.split_once(char::is_whitespace) {
            Some((tag, body)) => (tag, body),
            None => (content, ""),
        };
        match (&grid, tag) {
            (None, "grid") => {
                grid = Some(grid_from_fields(body).map_err(|reason| Error::Config { line, reason })?);
            }
            (None, _) => {
                return Err(Error::Config {
                    line,
                    reason: format!("expected the grid line first, got `{tag}`"),
                });
            }
            (Some(_), "grid") => {
                return Err(Error::Config { line, reason: "duplicate grid line".into() });
            }
            (Some(g), tag) => {
                let spec =
                    spec_from_fields(tag, body).map_err(|reason| Error::Config { line, reason })?;
                if spec.dim() != g.dim() {
                    return Err(Error::Config {
                        line,
                        reason: format!("{}D ray against a {}D grid", spec.dim(), g.dim()),
                    });
                }
                specs.push(spec);
            }
        }
    }
    let grid = grid.ok_or(Error::Config { line: 1, reason: "config must contain a grid line".into() })?;
    RaySet::new(grid, specs)
}

/// Renders a ray set in the config text format; parsing the output yields
/// an equal ray set.
pub fn format_rayset(rays: &RaySet) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let g = rays.grid();
    let [cx, cy, cz] = g.center();
    match g.nz() {
        None => {
            let _ = writeln!(
                out,
                "grid nx={} ny={} scale={:?} cx={cx:?} cy={cy:?}",
                g.nx(),
                g.ny(),
                g.scale()
            );
        }
        Some(nz) => {
            let _ = writeln!(
                out,
                "grid nx={} ny={} nz={nz} scale={:?} cx={cx:?} cy={cy:?} cz={cz:?}",
                g.nx(),
                g.ny(),
                g.scale()
            );
        }
    }
    for spec in rays.specs() {
        match *spec {
            BeamSpec::Parallel2D { s, phi } => {
                let _ = writeln!(out, "parallel2d s={s:?} phi={phi:?}");
            }
            BeamSpec::FanEquiangular { d, alpha, gamma, gamma_max } => {
                let _ = write!(out, "fan_equiangular D={d:?} alpha={alpha:?} gamma={gamma:?}");
                if let Some(m) = gamma_max {
                    let _ = write!(out, " gamma_max={m:?}");
                }
                out.push('\n');
            }
            BeamSpec::FanEquispaced { d, alpha, t, t_max } => {
                let _ = write!(out, "fan_equispaced D={d:?} alpha={alpha:?} t={t:?}");
                if let Some(m) = t_max {
                    let _ = write!(out, " t_max={m:?}");
                }
                out.push('\n');
            }
            BeamSpec::Parallel3D { s1, s2, phi1, phi2 } => {
                let _ = writeln!(out, "parallel3d s1={s1:?} s2={s2:?} phi1={phi1:?} phi2={phi2:?}");
            }
            BeamSpec::ConeEquiangular { d, phi1p, alpha, beta } => {
                let _ = writeln!(
                    out,
                    "cone_equiangular D={d:?} phi1p={phi1p:?} alpha={alpha:?} beta={beta:?}"
                );
            }
            BeamSpec::ConeEquispaced { d, phi1p, t, h } => {
                let _ = writeln!(out, "cone_equispaced D={d:?} phi1p={phi1p:?} t={t:?} h={h:?}");
            }
            BeamSpec::HelicalEquiangular { d, phi1p, alpha, beta, h_offset } => {
                let _ = writeln!(
                    out,
                    "helical_equiangular D={d:?} phi1p={phi1p:?} alpha={alpha:?} beta={beta:?} H={h_offset:?}"
                );
            }
            BeamSpec::HelicalEquispaced { d, phi1p, t, h, h_offset } => {
                let _ = writeln!(
                    out,
                    "helical_equispaced D={d:?} phi1p={phi1p:?} t={t:?} h={h:?} H={h_offset:?}"
                );
            }
        }
    }
    out
}
