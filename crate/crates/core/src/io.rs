//! Gallery loaders and result writers.
//!
//! Gallery formats:
//!
//! * CSV: first line `height,width`, then one line per pixel (row-major
//!   pixel order) holding the N sample values of that pixel.
//! * `UOSG` binary, little-endian: magic `b"UOSG"`, `u32` version (1),
//!   `u32` D, `u32` N, `u32` height, `u32` width, D·N `f64` in column-major
//!   order, then optionally a `u8` has-labels flag followed by N `u32` labels.
//! * A directory of 8-bit binary PGM (`P5`) images taken in lexicographic
//!   file-name order, intensities scaled to [0, 1]; labels come from an
//!   optional `labels.csv` (`filename,label`) in the same directory.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::data::{remap_labels, DataGallery};
use crate::error::{Error, Position, Result};

pub const MAGIC: &[u8; 4] = b"UOSG";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 5 * 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GalleryFormat {
    Csv,
    Binary,
    PgmDir,
}

impl GalleryFormat {
    /// Directory → PGM, `.csv` → CSV, anything else → binary.
    pub fn detect(path: &Path) -> Self {
        if path.is_dir() {
            GalleryFormat::PgmDir
        } else if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        {
            GalleryFormat::Csv
        } else {
            GalleryFormat::Binary
        }
    }
}

impl std::str::FromStr for GalleryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(GalleryFormat::Csv),
            "bin" | "binary" | "uosg" => Ok(GalleryFormat::Binary),
            "pgm" | "pgm_dir" | "pgm-dir" => Ok(GalleryFormat::PgmDir),
            other => Err(Error::InvalidConfig(format!("unknown gallery format {other:?}"))),
        }
    }
}

fn parse_err(path: &Path, position: Position, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        position,
        message: message.into(),
    }
}

pub fn load_gallery(path: &Path, format: GalleryFormat) -> Result<DataGallery> {
    match format {
        GalleryFormat::Csv => load_csv(path),
        GalleryFormat::Binary => load_binary(path),
        GalleryFormat::PgmDir => load_pgm_dir(path),
    }
}

fn geometry_error(e: Error) -> Error {
    match e {
        Error::DimensionMismatch { height, width, rows } => Error::GeometryMismatch(format!(
            "{height}x{width} geometry for {rows} pixels"
        )),
        other => other,
    }
}

pub fn load_csv(path: &Path) -> Result<DataGallery> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        // A literal `height,width` caption before the values is tolerated.
        .skip_while(|(i, l)| *i == 0 && l.trim().eq_ignore_ascii_case("height,width"));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, Position::Line(1), "empty file"))?;
    let dims: Vec<usize> = header
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(path, Position::Line(hline + 1), format!("bad header: {e}")))?;
    let [height, width] = dims[..] else {
        return Err(parse_err(
            path,
            Position::Line(hline + 1),
            "header must be `height,width`",
        ));
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in lines {
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(path, Position::Line(ln + 1), e.to_string()))?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    path,
                    Position::Line(ln + 1),
                    format!("expected {} values, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    let d = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let data = DMatrix::from_fn(d, n, |i, j| rows[i][j]);
    DataGallery::new(data, height, width, None).map_err(geometry_error)
}

pub fn save_csv(g: &DataGallery, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{},{}", g.height(), g.width())?;
    for row in g.data().row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

/// Encodes a gallery in the `UOSG` format.
pub fn encode_binary(data: &DMatrix<f64>, height: usize, width: usize, labels: Option<&[usize]>) -> Vec<u8> {
    let (d, n) = data.shape();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * d * n + 1 + 4 * n);
    out.extend_from_slice(MAGIC);
    for v in [VERSION, d as u32, n as u32, height as u32, width as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in data.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(labels) = labels {
        out.push(1);
        for &l in labels {
            out.extend_from_slice(&(l as u32).to_le_bytes());
        }
    }
    out
}

pub fn save_binary(g: &DataGallery, path: &Path) -> Result<()> {
    fs::write(path, encode_binary(g.data(), g.height(), g.width(), g.labels()))?;
    Ok(())
}

/// Square matrix (e.g. coefficients) in the `UOSG` layout with N×1 geometry.
pub fn save_matrix_binary(m: &DMatrix<f64>, path: &Path) -> Result<()> {
    fs::write(path, encode_binary(m, m.nrows(), 1, None))?;
    Ok(())
}

pub fn decode_binary(bytes: &[u8], path: &Path) -> Result<DataGallery> {
    if bytes.len() < HEADER_LEN {
        return Err(parse_err(path, Position::Byte(bytes.len()), "truncated header"));
    }
    if &bytes[..4] != MAGIC {
        return Err(parse_err(path, Position::Byte(0), "missing UOSG magic"));
    }
    let version = read_u32(bytes, 4);
    if version != VERSION {
        return Err(parse_err(path, Position::Byte(4), format!("unsupported version {version}")));
    }
    let d = read_u32(bytes, 8) as usize;
    let n = read_u32(bytes, 12) as usize;
    let height = read_u32(bytes, 16) as usize;
    let width = read_u32(bytes, 20) as usize;
    let payload = d
        .checked_mul(n)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| parse_err(path, Position::Byte(8), "dimensions overflow"))?;
    let end = HEADER_LEN + payload;
    if bytes.len() < end {
        return Err(parse_err(
            path,
            Position::Byte(bytes.len()),
            format!("payload holds {} bytes, D*N needs {payload}", bytes.len() - HEADER_LEN),
        ));
    }
    let values: Vec<f64> = bytes[HEADER_LEN..end]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let data = DMatrix::from_vec(d, n, values);
    let labels = match bytes.len() - end {
        0 => None,
        rest => {
            let flag = bytes[end];
            match flag {
                0 if rest == 1 => None,
                1 if rest == 1 + 4 * n => {
                    let raw: Vec<u32> = (0..n).map(|i| read_u32(bytes, end + 1 + 4 * i)).collect();
                    Some(remap_labels(&raw))
                }
                0 | 1 => {
                    return Err(parse_err(
                        path,
                        Position::Byte(end + 1),
                        format!("label block holds {} bytes, expected {}", rest - 1, 4 * n * usize::from(flag)),
                    ))
                }
                other => {
                    return Err(parse_err(path, Position::Byte(end), format!("bad label flag {other}")))
                }
            }
        }
    };
    DataGallery::new(data, height, width, labels).map_err(geometry_error)
}

pub fn load_binary(path: &Path) -> Result<DataGallery> {
    decode_binary(&fs::read(path)?, path)
}

/// Parsed 8-bit PGM image.
#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u8>,
}

pub fn parse_pgm(bytes: &[u8], path: &Path) -> Result<PgmImage> {
    let mut pos = 0usize;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(parse_err(path, Position::Byte(pos), "truncated PGM header"));
        }
        tokens.push((start, std::str::from_utf8(&bytes[start..pos]).unwrap_or("")));
    }
    if tokens[0].1 != "P5" {
        return Err(parse_err(path, Position::Byte(0), "only binary P5 PGM is supported"));
    }
    let num = |k: usize| -> Result<usize> {
        tokens[k]
            .1
            .parse::<usize>()
            .map_err(|e| parse_err(path, Position::Byte(tokens[k].0), e.to_string()))
    };
    let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
    if maxval == 0 || maxval > 255 {
        return Err(parse_err(path, Position::Byte(tokens[3].0), "only 8-bit PGM is supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = width * height;
    if bytes.len() < pos + need {
        return Err(parse_err(path, Position::Byte(bytes.len()), format!("raster needs {need} bytes")));
    }
    Ok(PgmImage {
        width,
        height,
        maxval: maxval as u16,
        pixels: bytes[pos..pos + need].to_vec(),
    })
}

pub fn write_pgm(img: &PgmImage, path: &Path) -> Result<()> {
    let mut out = format!("P5\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    out.extend_from_slice(&img.pixels);
    fs::write(path, out)?;
    Ok(())
}

fn read_pgm_labels(path: &Path, files: &[String]) -> Result<Option<Vec<usize>>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path)?;
    let mut by_name = std::collections::HashMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (ln == 0 && line.eq_ignore_ascii_case("filename,label")) {
            continue;
        }
        let (name, label) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, Position::Line(ln + 1), "expected `filename,label`"))?;
        by_name.insert(name.trim().to_string(), label.trim().to_string());
    }
    let raw = files
        .iter()
        .map(|f| {
            by_name
                .get(f)
                .cloned()
                .ok_or_else(|| Error::GeometryMismatch(format!("no label for {f} in labels.csv")))
        })
        .collect::<Result<Vec<String>>>()?;
    // Integer labels sort numerically, anything else lexicographically.
    let numeric: Option<Vec<i64>> = raw.iter().map(|s| s.parse().ok()).collect();
    Ok(Some(match numeric {
        Some(v) => remap_labels(&v),
        None => remap_labels(&raw),
    }))
}

pub fn load_pgm_dir(dir: &Path) -> Result<DataGallery> {
    let mut files: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|name| name.to_ascii_lowercase().ends_with(".pgm"))
        .collect();
    files.sort();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(files.len());
    let mut geometry: Option<(usize, usize)> = None;
    for name in &files {
        let path = dir.join(name);
        let img = parse_pgm(&fs::read(&path)?, &path)?;
        match geometry {
            None => geometry = Some((img.height, img.width)),
            Some(g) if g != (img.height, img.width) => {
                return Err(Error::GeometryMismatch(format!(
                    "{name} is {}x{}, expected {}x{}",
                    img.height, img.width, g.0, g.1
                )))
            }
            _ => {}
        }
        let scale = f64::from(img.maxval);
        columns.push(img.pixels.iter().map(|&p| f64::from(p) / scale).collect());
    }
    let (height, width) = geometry.ok_or(Error::TooFewSamples(0))?;
    let labels = read_pgm_labels(&dir.join("labels.csv"), &files)?;
    let d = height * width;
    let data = DMatrix::from_fn(d, columns.len(), |i, j| columns[j][i]);
    DataGallery::new(data, height, width, labels)
}

/// Reads `index,label` (header optional) or one label per line.
pub fn load_labels(path: &Path, n: usize) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)?;
    let mut raw = vec![None; n];
    let mut next = 0usize;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (ln == 0 && line.eq_ignore_ascii_case("index,label")) {
            continue;
        }
        let (idx, label) = match line.split_once(',') {
            Some((i, l)) => (
                i.trim()
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, Position::Line(ln + 1), e.to_string()))?,
                l.trim(),
            ),
            None => (next, line),
        };
        next = idx + 1;
        let label = label
            .parse::<i64>()
            .map_err(|e| parse_err(path, Position::Line(ln + 1), e.to_string()))?;
        *raw.get_mut(idx)
            .ok_or_else(|| parse_err(path, Position::Line(ln + 1), format!("index {idx} >= {n}")))? =
            Some(label);
    }
    let raw: Vec<i64> = raw
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::GeometryMismatch(format!("sample {i} has no label"))))
        .collect::<Result<_>>()?;
    Ok(remap_labels(&raw))
}

pub fn write_labels_csv(labels: &[usize], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "index,label")?;
    for (i, l) in labels.iter().enumerate() {
        writeln!(w, "{i},{l}")?;
    }
    w.flush()?;
    Ok(())
}

/// `index,x,y,label` rows for a 2-D scatter.
pub fn write_embedding_csv(xy: &DMatrix<f64>, labels: &[usize], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "index,x,y,label")?;
    for (i, l) in labels.iter().enumerate() {
        writeln!(w, "{i},{},{},{l}", fmt_f64(xy[(i, 0)]), fmt_f64(xy[(i, 1)]))?;
    }
    w.flush()?;
    Ok(())
}

/// 17 significant digits in scientific notation (round-trips exactly).
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// serde_json formatter that prints every float with 17 significant digits.
#[derive(Debug, Default, Clone, Copy)]
pub struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Pretty-ish JSON (one value per line is not needed) with 17-digit floats.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, to_json_bytes(value)?)?;
    Ok(())
}

pub(crate) fn ensure_dir(path: &Path) -> Result<PathBuf> {
    fs::create_dir_all(path)?;
    Ok(path.to_path_buf())
}
