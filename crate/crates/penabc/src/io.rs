//! File formats: binary series columns, CSV, weight snapshots, result rows.
//!
//! Two round-trip guarantees hold everywhere:
//!
//! * the binary column format stores raw little-endian doubles, so any value
//!   (including −0.0 and subnormals) survives a write/read cycle bit for bit;
//! * CSV floats are printed with `{}`, Rust's shortest-round-trip formatting,
//!   so finite doubles survive text form bit for bit as well.
//!
//! Binary layouts are versioned by their 8-byte magic strings. Loaders check
//! the magic, every declared shape, and exact file length before allocating,
//! so a corrupt or truncated file fails with a format error rather than a
//! panic or a bogus result.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write as _};
use std::path::Path;

use crate::abc::{PosteriorSample, ReferenceTable, SampleSource};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::neuralnet::{Activation, LayerWeights, MlpSpec, MlpWeights};
use crate::pen::{PenSpec, PenWeights};
use crate::presets::TrainedNet;
use crate::{ModelId, ParamVector, Series};

/// Magic for the binary series/column format: header is these 8 bytes, then
/// u32 series length, then u32 series count, then count·length doubles.
pub const SERIES_MAGIC: &[u8; 8] = b"PENABC01";

/// Magic for weight snapshots: header, u8 network kind, spec echo, doubles.
pub const WEIGHTS_MAGIC: &[u8; 8] = b"PENWTS01";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

fn format_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::Format { path: path.display().to_string(), detail: detail.into() }
}

// ---------------------------------------------------------------------------
// Binary series format

/// Write equal-length series to the binary column format.
pub fn write_series_bin(path: impl AsRef<Path>, series: &[Series]) -> Result<()> {
    let path = path.as_ref();
    let m = series.first().map_or(0, Vec::len);
    for (i, s) in series.iter().enumerate() {
        if s.len() != m {
            return Err(Error::DimMismatch(format!(
                "binary series format is rectangular: series {i} has length {}, first has {m}",
                s.len()
            )));
        }
    }
    let m32 = u32::try_from(m)
        .map_err(|_| Error::Config(format!("series length {m} exceeds format limit")))?;
    let count = u32::try_from(series.len())
        .map_err(|_| Error::Config(format!("series count {} exceeds format limit", series.len())))?;
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| io_err(path, e));
    put(SERIES_MAGIC)?;
    put(&m32.to_le_bytes())?;
    put(&count.to_le_bytes())?;
    for s in series {
        for &v in s {
            put(&v.to_le_bytes())?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read a binary series file written by [`write_series_bin`].
pub fn read_series_bin(path: impl AsRef<Path>) -> Result<Vec<Series>> {
    let path = path.as_ref();
    let file_len = std::fs::metadata(path).map_err(|e| io_err(path, e))?.len();
    let mut r = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
    let mut header = [0u8; 16];
    r.read_exact(&mut header).map_err(|_| format_err(path, "file shorter than header"))?;
    if &header[..8] != SERIES_MAGIC {
        return Err(format_err(path, "bad magic; not a binary series file"));
    }
    let m = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let count = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let expected = 16 + 8 * (m as u64) * (count as u64);
    if file_len != expected {
        return Err(format_err(
            path,
            format!("declared {count} series of length {m} need {expected} bytes, file has {file_len}"),
        ));
    }
    let mut series = Vec::with_capacity(count);
    let mut buf = vec![0u8; 8 * m];
    for _ in 0..count {
        r.read_exact(&mut buf).map_err(|e| io_err(path, e))?;
        series.push(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect());
    }
    Ok(series)
}

// ---------------------------------------------------------------------------
// CSV series format

/// Write series as CSV, one series per row. Rows may differ in length.
pub fn write_series_csv(path: impl AsRef<Path>, series: &[Series]) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    for s in series {
        let row = s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        writeln!(w, "{row}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read CSV series, one per non-empty row.
pub fn read_series_csv(path: impl AsRef<Path>) -> Result<Vec<Series>> {
    let path = path.as_ref();
    let r = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
    let mut series = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Series = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|_| {
                    format_err(path, format!("line {}: unparseable number {field:?}", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        series.push(row);
    }
    Ok(series)
}

// ---------------------------------------------------------------------------
// Reference tables

/// Persist a table as `params.bin` + `series.bin` inside `dir`.
///
/// Summaries are not stored: they are method-specific and cheap to
/// recompute, while the table itself is the expensive, method-independent
/// artifact that gets recycled across summary choices.
pub fn write_reference_table(dir: impl AsRef<Path>, table: &ReferenceTable) -> Result<()> {
    let dir = dir.as_ref();
    let params: Vec<Series> = table.params.iter().map(|p| p.values.clone()).collect();
    write_series_bin(dir.join("params.bin"), &params)?;
    write_series_bin(dir.join("series.bin"), &table.series)
}

/// Load a table written by [`write_reference_table`].
pub fn read_reference_table(dir: impl AsRef<Path>, model_id: ModelId) -> Result<ReferenceTable> {
    let dir = dir.as_ref();
    let params_path = dir.join("params.bin");
    let raw_params = read_series_bin(&params_path)?;
    let series = read_series_bin(dir.join("series.bin"))?;
    if raw_params.len() != series.len() {
        return Err(format_err(
            &params_path,
            format!("{} parameter rows but {} series", raw_params.len(), series.len()),
        ));
    }
    let p = model_id.param_dim();
    if let Some(bad) = raw_params.iter().position(|row| row.len() != p) {
        return Err(format_err(
            &params_path,
            format!("row {bad} has {} values; {} needs {p}", raw_params[bad].len(), model_id.name()),
        ));
    }
    let series_len = series.first().map_or(0, Vec::len);
    Ok(ReferenceTable {
        model_id,
        series_len,
        params: raw_params.into_iter().map(|v| ParamVector::new(model_id, v)).collect(),
        series,
        summaries: None,
    })
}

// ---------------------------------------------------------------------------
// Weight snapshots

const KIND_MLP: u8 = 0;
const KIND_PEN: u8 = 1;

fn act_code(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::Linear => 1,
    }
}

fn act_from_code(code: u8, path: &Path) -> Result<Activation> {
    match code {
        0 => Ok(Activation::Relu),
        1 => Ok(Activation::Linear),
        _ => Err(format_err(path, format!("unknown activation code {code}"))),
    }
}

struct SnapshotWriter<'a> {
    w: BufWriter<File>,
    path: &'a Path,
}

impl<'a> SnapshotWriter<'a> {
    fn put(&mut self, bytes: &[u8]) -> Result<()> {
        self.w.write_all(bytes).map_err(|e| io_err(self.path, e))
    }

    fn put_u32(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::Config(format!("dimension {v} exceeds format limit")))?;
        self.put(&v.to_le_bytes())
    }

    fn put_mlp(&mut self, spec: &MlpSpec, weights: &MlpWeights) -> Result<()> {
        self.put_u32(spec.layers.len() + 1)?;
        self.put_u32(spec.in_dim())?;
        for layer in &spec.layers {
            self.put_u32(layer.out_dim)?;
        }
        for layer in &spec.layers {
            self.put(&[act_code(layer.activation)])?;
        }
        for layer in &weights.layers {
            for &v in &layer.w.data {
                self.put(&v.to_le_bytes())?;
            }
            for &v in &layer.b {
                self.put(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Save a trained network (spec echo + weights) to a snapshot file.
pub fn save_trained_net(path: impl AsRef<Path>, net: &TrainedNet) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut snap = SnapshotWriter { w: BufWriter::new(file), path };
    snap.put(WEIGHTS_MAGIC)?;
    match net {
        TrainedNet::Mlp { spec, weights } => {
            snap.put(&[KIND_MLP])?;
            snap.put_mlp(spec, weights)?;
        }
        TrainedNet::Pen { spec, weights } => {
            snap.put(&[KIND_PEN])?;
            snap.put_u32(spec.d)?;
            snap.put_u32(spec.extra_dim)?;
            snap.put_mlp(&spec.inner, &weights.inner)?;
            snap.put_mlp(&spec.outer, &weights.outer)?;
        }
    }
    snap.w.flush().map_err(|e| io_err(path, e))
}

struct SnapshotReader<'a> {
    r: BufReader<File>,
    path: &'a Path,
}

impl<'a> SnapshotReader<'a> {
    fn take(&mut self, buf: &mut [u8]) -> Result<()> {
        self.r.read_exact(buf).map_err(|_| format_err(self.path, "unexpected end of file"))
    }

    fn take_u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.take(&mut b)?;
        Ok(b[0])
    }

    fn take_u32(&mut self) -> Result<usize> {
        let mut b = [0u8; 4];
        self.take(&mut b)?;
        Ok(u32::from_le_bytes(b) as usize)
    }

    fn take_f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let mut buf = vec![0u8; 8 * n];
        self.take(&mut buf)?;
        Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn take_mlp(&mut self) -> Result<(MlpSpec, MlpWeights)> {
        let n_dims = self.take_u32()?;
        if !(2..=1024).contains(&n_dims) {
            return Err(format_err(self.path, format!("implausible layer-size count {n_dims}")));
        }
        let mut dims = Vec::with_capacity(n_dims);
        for _ in 0..n_dims {
            let d = self.take_u32()?;
            if d == 0 || d > (1 << 24) {
                return Err(format_err(self.path, format!("implausible layer width {d}")));
            }
            dims.push(d);
        }
        let mut acts = Vec::with_capacity(n_dims - 1);
        for _ in 0..n_dims - 1 {
            let code = self.take_u8()?;
            acts.push(act_from_code(code, self.path)?);
        }
        let spec = MlpSpec::new(&dims, &acts);
        let mut layers = Vec::with_capacity(spec.layers.len());
        for layer in &spec.layers {
            let w = self.take_f64s(layer.out_dim * layer.in_dim)?;
            let b = self.take_f64s(layer.out_dim)?;
            layers.push(LayerWeights { w: Matrix::from_vec(layer.out_dim, layer.in_dim, w), b });
        }
        Ok((spec, MlpWeights { layers }))
    }

    fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.r.read(&mut probe) {
            Ok(0) => Ok(()),
            Ok(_) => Err(format_err(self.path, "trailing bytes after weight data")),
            Err(e) => Err(io_err(self.path, e)),
        }
    }
}

/// Load a snapshot written by [`save_trained_net`], revalidating the shape
/// chain before returning it.
pub fn load_trained_net(path: impl AsRef<Path>) -> Result<TrainedNet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut snap = SnapshotReader { r: BufReader::new(file), path };
    let mut magic = [0u8; 8];
    snap.take(&mut magic)?;
    if &magic != WEIGHTS_MAGIC {
        return Err(format_err(path, "bad magic; not a weight snapshot"));
    }
    let net = match snap.take_u8()? {
        KIND_MLP => {
            let (spec, weights) = snap.take_mlp()?;
            spec.validate().map_err(|e| format_err(path, e.to_string()))?;
            TrainedNet::Mlp { spec, weights }
        }
        KIND_PEN => {
            let d = snap.take_u32()?;
            let extra_dim = snap.take_u32()?;
            let (inner, weights_inner) = snap.take_mlp()?;
            let (outer, weights_outer) = snap.take_mlp()?;
            let spec = PenSpec { d, inner, outer, extra_dim };
            spec.validate().map_err(|e| format_err(path, e.to_string()))?;
            TrainedNet::Pen { spec, weights: PenWeights { inner: weights_inner, outer: weights_outer } }
        }
        k => return Err(format_err(path, format!("unknown network kind {k}"))),
    };
    snap.expect_eof()?;
    Ok(net)
}

// ---------------------------------------------------------------------------
// Posterior CSV

/// Write posterior draws as CSV with header `theta_1,…,theta_p,distance`.
///
/// Reference samples carry no ABC distances; their distance column is `NaN`.
pub fn write_posterior_csv(path: impl AsRef<Path>, sample: &PosteriorSample) -> Result<()> {
    let path = path.as_ref();
    let first = sample
        .draws
        .first()
        .ok_or_else(|| Error::Degenerate("cannot write an empty posterior sample".into()))?;
    let p = first.values.len();
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let header = (1..=p).map(|j| format!("theta_{j}")).collect::<Vec<_>>().join(",");
    writeln!(w, "{header},distance").map_err(|e| io_err(path, e))?;
    for (i, draw) in sample.draws.iter().enumerate() {
        let values = draw.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        let distance = sample.distances.get(i).copied().unwrap_or(f64::NAN);
        writeln!(w, "{values},{distance}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read a posterior CSV back. A file whose distance column is entirely `NaN`
/// loads as a reference sample; otherwise the distances are kept and the
/// sample is tagged as ABC output.
pub fn read_posterior_csv(path: impl AsRef<Path>, model_id: ModelId) -> Result<PosteriorSample> {
    let path = path.as_ref();
    let r = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| format_err(path, "missing header"))?
        .map_err(|e| io_err(path, e))?;
    let fields: Vec<&str> = header.trim().split(',').collect();
    let p = model_id.param_dim();
    let expected: Vec<String> =
        (1..=p).map(|j| format!("theta_{j}")).chain(["distance".to_string()]).collect();
    if fields != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(format_err(
            path,
            format!("header {header:?} does not match a {}-parameter posterior", p),
        ));
    }
    let mut draws = Vec::new();
    let mut distances = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|_| {
                    format_err(path, format!("line {}: unparseable number {field:?}", lineno + 2))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != p + 1 {
            return Err(format_err(
                path,
                format!("line {}: {} fields, expected {}", lineno + 2, row.len(), p + 1),
            ));
        }
        draws.push(ParamVector::new(model_id, row[..p].to_vec()));
        distances.push(row[p]);
    }
    if draws.is_empty() {
        return Err(format_err(path, "no draws"));
    }
    if distances.iter().all(|d| d.is_nan()) {
        Ok(PosteriorSample::reference(draws))
    } else {
        Ok(PosteriorSample { draws, distances, source: SampleSource::Abc })
    }
}

// ---------------------------------------------------------------------------
// Results CSV

/// One evaluation outcome, keyed by experiment coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: ModelId,
    pub method: String,
    pub n_train: usize,
    pub seed: u64,
    pub rep: usize,
    /// Which score this is, e.g. `"wasserstein"` or `"rmse"`.
    pub metric: String,
    pub value: f64,
}

pub const RESULTS_HEADER: &str = "model,method,n_train,seed,rep,metric,value";

/// Append rows to a results CSV, writing the header first if the file does
/// not yet exist (or is empty).
pub fn append_result_rows(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let path = path.as_ref();
    for row in rows {
        for label in [&row.method, &row.metric] {
            if label.contains(',') || label.contains('\n') {
                return Err(Error::Config(format!("label {label:?} cannot appear in a CSV field")));
            }
        }
    }
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = File::options()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    if fresh {
        writeln!(w, "{RESULTS_HEADER}").map_err(|e| io_err(path, e))?;
    }
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.model.name(),
            row.method,
            row.n_train,
            row.seed,
            row.rep,
            row.metric,
            row.value
        )
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read every row of a results CSV.
pub fn read_result_rows(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let r = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == RESULTS_HEADER => {}
        Some(Ok(h)) => return Err(format_err(path, format!("unexpected header {h:?}"))),
        Some(Err(e)) => return Err(io_err(path, e)),
        None => return Ok(Vec::new()),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format_err(path, format!("line {}: expected 7 fields", lineno + 2)));
        }
        let bad = |what: &str| format_err(path, format!("line {}: bad {what}", lineno + 2));
        rows.push(ResultRow {
            model: ModelId::from_name(fields[0]).ok_or_else(|| bad("model"))?,
            method: fields[1].to_string(),
            n_train: fields[2].parse().map_err(|_| bad("n_train"))?,
            seed: fields[3].parse().map_err(|_| bad("seed"))?,
            rep: fields[4].parse().map_err(|_| bad("rep"))?,
            metric: fields[5].to_string(),
            value: fields[6].parse().map_err(|_| bad("value"))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuralnet::init_weights;
    use crate::pen::init_pen_weights;
    use crate::rng::rng_from_seed;
    use rand::Rng as _;

    fn tricky_values() -> Series {
        vec![
            0.1,
            -0.0,
            1.0 / 3.0,
            f64::MAX,
            f64::MIN_POSITIVE,
            5e-324, // smallest subnormal
            -2.5e17,
            1.0 + f64::EPSILON,
        ]
    }

    fn assert_series_bits_equal(a: &[Series], b: &[Series]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.len(), y.len());
            for (u, v) in x.iter().zip(y) {
                assert_eq!(u.to_bits(), v.to_bits(), "{u} vs {v}");
            }
        }
    }

    #[test]
    fn binary_series_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.bin");
        let mut rng = rng_from_seed(110);
        let mut series: Vec<Series> =
            (0..5).map(|_| (0..8).map(|_| rng.gen_range(-1e6..1e6)).collect()).collect();
        series.push(tricky_values());
        write_series_bin(&path, &series).unwrap();
        assert_series_bits_equal(&read_series_bin(&path).unwrap(), &series);
    }

    #[test]
    fn binary_format_is_rectangular_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ragged.bin");
        let err = write_series_bin(&path, &[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::DimMismatch(_)));
    }

    #[test]
    fn empty_collection_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.bin");
        write_series_bin(&path, &[]).unwrap();
        assert!(read_series_bin(&path).unwrap().is_empty());
    }

    #[test]
    fn corrupt_binary_files_fail_loudly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.bin");
        write_series_bin(&path, &[vec![1.0, 2.0, 3.0]]).unwrap();

        let good = std::fs::read(&path).unwrap();
        std::fs::write(&path, &good[..good.len() - 4]).unwrap();
        assert!(matches!(read_series_bin(&path).unwrap_err(), Error::Format { .. }));

        let mut oversized = good.clone();
        oversized.extend_from_slice(&[0u8; 8]);
        std::fs::write(&path, &oversized).unwrap();
        assert!(matches!(read_series_bin(&path).unwrap_err(), Error::Format { .. }));

        let mut bad_magic = good;
        bad_magic[0] ^= 0xff;
        std::fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(read_series_bin(&path).unwrap_err(), Error::Format { .. }));
    }

    #[test]
    fn csv_series_round_trip_is_bit_exact_for_finite_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        let series = vec![tricky_values(), vec![42.0], vec![1e-15, 2e300, -7.125]];
        write_series_csv(&path, &series).unwrap();
        assert_series_bits_equal(&read_series_csv(&path).unwrap(), &series);
    }

    #[test]
    fn csv_rejects_garbage_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1.0,2.0\n3.0,oops\n").unwrap();
        assert!(matches!(read_series_csv(&path).unwrap_err(), Error::Format { .. }));
    }

    #[test]
    fn reference_table_round_trips() {
        use crate::abc::build_reference_table;
        use crate::models::PriorSpec;
        let dir = tempfile::tempdir().unwrap();
        let prior = PriorSpec::new(ModelId::Ar2);
        let table =
            build_reference_table(ModelId::Ar2, &prior, 30, 50, &mut rng_from_seed(111)).unwrap();
        write_reference_table(dir.path(), &table).unwrap();
        let back = read_reference_table(dir.path(), ModelId::Ar2).unwrap();
        assert_eq!(back.model_id, table.model_id);
        assert_eq!(back.series_len, table.series_len);
        assert_eq!(back.params, table.params);
        assert_series_bits_equal(&back.series, &table.series);
        assert!(back.summaries.is_none());
    }

    #[test]
    fn mlp_snapshot_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mlp.wts");
        let spec = MlpSpec::relu_stack(&[7, 5, 3]);
        let weights = init_weights(&spec, &mut rng_from_seed(112));
        save_trained_net(&path, &TrainedNet::Mlp { spec: spec.clone(), weights: weights.clone() })
            .unwrap();
        match load_trained_net(&path).unwrap() {
            TrainedNet::Mlp { spec: s2, weights: w2 } => {
                assert_eq!(s2, spec);
                for (a, b) in w2.layers.iter().zip(&weights.layers) {
                    assert_eq!(a.w.data, b.w.data);
                    assert_eq!(a.b, b.b);
                }
            }
            other => panic!("loaded wrong kind: {other:?}"),
        }
    }

    #[test]
    fn pen_snapshot_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pen.wts");
        let (model, spec) = crate::presets::pen_preset("ar2-pen2").unwrap();
        assert_eq!(model, ModelId::Ar2);
        let weights = init_pen_weights(&spec, 100, &mut rng_from_seed(113));
        save_trained_net(&path, &TrainedNet::Pen { spec: spec.clone(), weights: weights.clone() })
            .unwrap();
        match load_trained_net(&path).unwrap() {
            TrainedNet::Pen { spec: s2, weights: w2 } => {
                assert_eq!(s2, spec);
                for (a, b) in
                    w2.inner.layers.iter().chain(&w2.outer.layers).zip(weights.inner.layers.iter().chain(&weights.outer.layers))
                {
                    assert_eq!(a.w.data, b.w.data);
                    assert_eq!(a.b, b.b);
                }
            }
            other => panic!("loaded wrong kind: {other:?}"),
        }
    }

    #[test]
    fn snapshot_loader_rejects_damage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.wts");
        let spec = MlpSpec::relu_stack(&[4, 3, 2]);
        let weights = init_weights(&spec, &mut rng_from_seed(114));
        save_trained_net(&path, &TrainedNet::Mlp { spec, weights }).unwrap();
        let good = std::fs::read(&path).unwrap();

        let mut bad_magic = good.clone();
        bad_magic[3] ^= 0x01;
        std::fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(load_trained_net(&path).unwrap_err(), Error::Format { .. }));

        let mut bad_kind = good.clone();
        bad_kind[8] = 9;
        std::fs::write(&path, &bad_kind).unwrap();
        assert!(matches!(load_trained_net(&path).unwrap_err(), Error::Format { .. }));

        let mut bad_act = good.clone();
        // activation codes sit right after the magic, kind byte, and the
        // four u32 layer sizes
        bad_act[8 + 1 + 4 * 4] = 7;
        std::fs::write(&path, &bad_act).unwrap();
        assert!(matches!(load_trained_net(&path).unwrap_err(), Error::Format { .. }));

        std::fs::write(&path, &good[..good.len() - 1]).unwrap();
        assert!(matches!(load_trained_net(&path).unwrap_err(), Error::Format { .. }));

        let mut trailing = good;
        trailing.push(0);
        std::fs::write(&path, &trailing).unwrap();
        assert!(matches!(load_trained_net(&path).unwrap_err(), Error::Format { .. }));
    }

    #[test]
    fn posterior_csv_round_trips_abc_samples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("posterior.csv");
        let draws = vec![
            ParamVector::new(ModelId::Ar2, vec![0.25, -0.125]),
            ParamVector::new(ModelId::Ar2, vec![1.0 / 3.0, 0.7]),
        ];
        let sample =
            PosteriorSample { draws, distances: vec![0.5, 0.75], source: SampleSource::Abc };
        write_posterior_csv(&path, &sample).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("theta_1,theta_2,distance\n"), "{text}");
        let back = read_posterior_csv(&path, ModelId::Ar2).unwrap();
        assert_eq!(back.source, SampleSource::Abc);
        assert_eq!(back.draws, sample.draws);
        assert_eq!(back.distances, sample.distances);
    }

    #[test]
    fn posterior_csv_marks_reference_samples_with_nan() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("reference.csv");
        let sample = PosteriorSample::reference(vec![
            ParamVector::new(ModelId::Ma2, vec![0.5, 0.2]),
            ParamVector::new(ModelId::Ma2, vec![0.4, 0.1]),
        ]);
        write_posterior_csv(&path, &sample).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("NaN").count(), 2, "{text}");
        let back = read_posterior_csv(&path, ModelId::Ma2).unwrap();
        assert_eq!(back.source, SampleSource::Reference);
        assert_eq!(back.draws, sample.draws);
        assert!(back.distances.is_empty());
    }

    #[test]
    fn posterior_csv_checks_the_header_against_the_model() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("posterior.csv");
        let sample = PosteriorSample::reference(vec![ParamVector::new(
            ModelId::Gandk,
            vec![3.0, 1.0, 2.0, 0.5],
        )]);
        write_posterior_csv(&path, &sample).unwrap();
        assert!(read_posterior_csv(&path, ModelId::Gandk).is_ok());
        assert!(matches!(read_posterior_csv(&path, ModelId::Ar2).unwrap_err(), Error::Format { .. }));
    }

    #[test]
    fn results_csv_appends_with_a_single_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let row = |rep: usize, value: f64| ResultRow {
            model: ModelId::Ma2,
            method: "pen10".into(),
            n_train: 10_000,
            seed: 7,
            rep,
            metric: "wasserstein".into(),
            value,
        };
        append_result_rows(&path, &[row(0, 0.25), row(1, 0.5)]).unwrap();
        append_result_rows(&path, &[row(2, 0.125)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("model,method").count(), 1, "{text}");
        let rows = read_result_rows(&path).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2], row(2, 0.125));
    }

    #[test]
    fn result_labels_must_be_csv_safe() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let bad = ResultRow {
            model: ModelId::Ar2,
            method: "a,b".into(),
            n_train: 1,
            seed: 1,
            rep: 0,
            metric: "rmse".into(),
            value: 1.0,
        };
        assert!(matches!(append_result_rows(&path, &[bad]).unwrap_err(), Error::Config(_)));
    }
}
