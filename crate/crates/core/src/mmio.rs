//! Matrix Market coordinate files and type-erased coordinate storage.
//!
//! The element types of a [`CooMatrix`] are chosen at run time. Its three
//! arrays are stored as [`ErasedBuffer`]s and recovered as typed slices
//! through [`CooMatrix::view`].

use std::any::Any;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::mem::size_of;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::dispatch::{for_id, DispatchError, Element, Kernel2, TypeTag};
use crate::select::{min_index_width, FloatPrecision, FloatTypes, IndexTypes, IndexWidth};

#[derive(Debug, Error)]
pub enum MmioError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("file has no size line")]
    Empty,
    #[error("line {line}: expected {expected}, found {token:?}")]
    Parse {
        line: u64,
        token: String,
        expected: &'static str,
    },
    #[error("unsupported Matrix Market payload: {0}")]
    Unsupported(String),
    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: u64, cols: u64 },
    #[error("matrix must have at least one row and one entry (n = {n}, z = {z})")]
    Degenerate { n: u64, z: u64 },
    #[error("line {line}: index {index} outside 1..={n}")]
    IndexOutOfRange { line: u64, index: u64, n: u64 },
    #[error("expected {expected} entries, file ends after {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("{width}-bit indices cannot address {n} rows")]
    IndexTooNarrow { n: u64, width: IndexWidth },
    #[error("entries lie in both triangles (first crossing at entry {entry}); expected one triangle of a symmetric matrix")]
    MixedTriangles { entry: u64 },
    #[error("buffer holds {found}, requested {requested}")]
    TypeMismatch { requested: TypeTag, found: TypeTag },
    #[error("element type {0} has no storage tag")]
    UnsupportedElement(TypeTag),
    #[error("{0} buffers must hold exactly z = {1} elements")]
    Length(&'static str, u64),
    #[error("byte count overflows u64")]
    Overflow,
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
}

/// Row count (equal to the column count) and stored entry count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixHeader {
    pub n: u64,
    pub z: u64,
}

/// A `Vec<T>` whose element type is known only through its tag.
pub struct ErasedBuffer {
    tag: TypeTag,
    len: usize,
    elem_size: usize,
    data: Box<dyn Any + Send + Sync>,
}

impl ErasedBuffer {
    pub fn new<T: Element>(data: Vec<T>) -> Self {
        ErasedBuffer {
            tag: T::TAG,
            len: data.len(),
            elem_size: size_of::<T>(),
            data: Box::new(data),
        }
    }

    pub fn tag(&self) -> TypeTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn byte_len(&self) -> usize {
        self.len * self.elem_size
    }

    pub fn as_slice<T: Element>(&self) -> Result<&[T], MmioError> {
        self.data
            .downcast_ref::<Vec<T>>()
            .map(Vec::as_slice)
            .ok_or(MmioError::TypeMismatch {
                requested: T::TAG,
                found: self.tag,
            })
    }
}

impl std::fmt::Debug for ErasedBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ErasedBuffer")
            .field("tag", &self.tag)
            .field("len", &self.len)
            .finish()
    }
}

/// Symmetric sparse matrix in coordinate storage, one triangle stored.
///
/// Indices are zero-based and below `n`; `rows`, `cols` and `values` each
/// hold `z` elements.
#[derive(Debug)]
pub struct CooMatrix {
    header: MatrixHeader,
    rows: ErasedBuffer,
    cols: ErasedBuffer,
    values: ErasedBuffer,
    width: IndexWidth,
    precision: FloatPrecision,
}

/// Typed, borrowed view of a [`CooMatrix`].
#[derive(Debug, Clone, Copy)]
pub struct CooView<'a, F, I> {
    pub n: usize,
    pub rows: &'a [I],
    pub cols: &'a [I],
    pub values: &'a [F],
}

impl CooMatrix {
    /// Validates and erases typed arrays.
    pub fn from_parts<F: Element, I: Element>(
        header: MatrixHeader,
        rows: Vec<I>,
        cols: Vec<I>,
        values: Vec<F>,
    ) -> Result<Self, MmioError> {
        let width = IndexWidth::from_tag(I::TAG).ok_or(MmioError::UnsupportedElement(I::TAG))?;
        let precision =
            FloatPrecision::from_tag(F::TAG).ok_or(MmioError::UnsupportedElement(F::TAG))?;
        if header.n == 0 || header.z == 0 {
            return Err(MmioError::Degenerate {
                n: header.n,
                z: header.z,
            });
        }
        for (name, len) in [
            ("row", rows.len()),
            ("column", cols.len()),
            ("value", values.len()),
        ] {
            if len as u64 != header.z {
                return Err(MmioError::Length(name, header.z));
            }
        }

        let (mut lower, mut upper) = (false, false);
        for (k, (&r, &c)) in rows.iter().zip(&cols).enumerate() {
            let (r, c) = (index_value(r), index_value(c));
            for index in [r, c] {
                if index >= header.n {
                    return Err(MmioError::IndexOutOfRange {
                        line: 0,
                        index: index.saturating_add(1),
                        n: header.n,
                    });
                }
            }
            lower |= r > c;
            upper |= r < c;
            if lower && upper {
                return Err(MmioError::MixedTriangles {
                    entry: k as u64 + 1,
                });
            }
        }

        Ok(CooMatrix {
            header,
            rows: ErasedBuffer::new(rows),
            cols: ErasedBuffer::new(cols),
            values: ErasedBuffer::new(values),
            width,
            precision,
        })
    }

    pub fn header(&self) -> MatrixHeader {
        self.header
    }

    pub fn n(&self) -> u64 {
        self.header.n
    }

    pub fn z(&self) -> u64 {
        self.header.z
    }

    pub fn width(&self) -> IndexWidth {
        self.width
    }

    pub fn precision(&self) -> FloatPrecision {
        self.precision
    }

    pub fn rows(&self) -> &ErasedBuffer {
        &self.rows
    }

    pub fn cols(&self) -> &ErasedBuffer {
        &self.cols
    }

    pub fn values(&self) -> &ErasedBuffer {
        &self.values
    }

    /// Bytes held by the three coordinate arrays.
    pub fn buffer_bytes(&self) -> usize {
        self.rows.byte_len() + self.cols.byte_len() + self.values.byte_len()
    }

    pub fn view<F: Element, I: Element>(&self) -> Result<CooView<'_, F, I>, MmioError> {
        Ok(CooView {
            n: self.header.n as usize,
            rows: self.rows.as_slice()?,
            cols: self.cols.as_slice()?,
            values: self.values.as_slice()?,
        })
    }
}

#[inline]
fn index_value<I: Element>(i: I) -> u64 {
    i.to_u64().unwrap_or(u64::MAX)
}

/// Modeled memory of a power-method run: the three coordinate arrays plus
/// the two dense iteration vectors.
pub fn matrix_bytes(
    header: MatrixHeader,
    width: IndexWidth,
    precision: FloatPrecision,
) -> Result<u64, MmioError> {
    let value = precision.bytes();
    let per_entry = 2 * width.bytes() + value;
    let arrays = header.z.checked_mul(per_entry).ok_or(MmioError::Overflow)?;
    let vectors = header.n.checked_mul(2 * value).ok_or(MmioError::Overflow)?;
    arrays.checked_add(vectors).ok_or(MmioError::Overflow)
}

/// Token reader over a Matrix Market stream.
///
/// Tokens are separated by any mix of spaces, tabs and newlines.
pub struct MatrixMarketReader<R> {
    src: R,
    line: String,
    pos: usize,
    line_no: u64,
}

impl MatrixMarketReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, MmioError> {
        Ok(Self::new(BufReader::new(File::open(path)?)))
    }
}

impl<R: BufRead> MatrixMarketReader<R> {
    pub fn new(src: R) -> Self {
        MatrixMarketReader {
            src,
            line: String::new(),
            pos: 0,
            line_no: 0,
        }
    }

    fn next_line(&mut self) -> io::Result<bool> {
        self.line.clear();
        self.pos = 0;
        if self.src.read_line(&mut self.line)? == 0 {
            return Ok(false);
        }
        self.line_no += 1;
        Ok(true)
    }

    fn next_token(&mut self) -> Result<Option<(usize, usize)>, MmioError> {
        loop {
            let rest = &self.line[self.pos..];
            let start = self.pos + (rest.len() - rest.trim_start().len());
            if start < self.line.len() {
                let len = self.line[start..]
                    .find(char::is_whitespace)
                    .unwrap_or(self.line.len() - start);
                self.pos = start + len;
                return Ok(Some((start, start + len)));
            }
            if !self.next_line()? {
                return Ok(None);
            }
        }
    }

    fn parse_next<T: FromStr>(&mut self, expected: &'static str) -> Result<Option<T>, MmioError> {
        let Some((start, end)) = self.next_token()? else {
            return Ok(None);
        };
        let token = &self.line[start..end];
        token.parse().map(Some).map_err(|_| MmioError::Parse {
            line: self.line_no,
            token: token.to_string(),
            expected,
        })
    }

    fn check_banner(line: &str) -> Result<(), MmioError> {
        let words: Vec<String> = line
            .split_whitespace()
            .map(str::to_ascii_lowercase)
            .collect();
        let unsupported = |what: &str| Err(MmioError::Unsupported(what.to_string()));
        if let Some(format) = words.get(2) {
            if format != "coordinate" {
                return unsupported(format);
            }
        }
        if let Some(field) = words.get(3) {
            if !matches!(field.as_str(), "real" | "integer") {
                return unsupported(field);
            }
        }
        if let Some(symmetry) = words.get(4) {
            if !matches!(symmetry.as_str(), "symmetric" | "general") {
                return unsupported(symmetry);
            }
        }
        Ok(())
    }

    /// Skips the banner and comment lines and reads `rows cols nnz`.
    pub fn read_header(&mut self) -> Result<MatrixHeader, MmioError> {
        loop {
            if !self.next_line()? {
                return Err(MmioError::Empty);
            }
            if self.line.starts_with("%%MatrixMarket") {
                Self::check_banner(&self.line)?;
            }
            if self.line.starts_with('%') {
                continue;
            }
            if !self.line.trim().is_empty() {
                break;
            }
        }

        let mut count = |what| -> Result<u64, MmioError> {
            self.parse_next::<u64>(what)?.ok_or(MmioError::Empty)
        };
        let rows = count("row count")?;
        let cols = count("column count")?;
        let z = count("entry count")?;
        if rows != cols {
            return Err(MmioError::NotSquare { rows, cols });
        }
        if rows == 0 || z == 0 {
            return Err(MmioError::Degenerate { n: rows, z });
        }
        Ok(MatrixHeader { n: rows, z })
    }

    /// Reads `header.z` triples into arrays of `I` indices and `F` values.
    pub fn read_typed<F: Element, I: Element>(
        &mut self,
        header: MatrixHeader,
    ) -> Result<CooMatrix, MmioError> {
        let width = IndexWidth::from_tag(I::TAG).ok_or(MmioError::UnsupportedElement(I::TAG))?;
        check_width(header, width)?;

        let cap = header.z.min(1 << 24) as usize;
        let (mut rows, mut cols, mut values) = (
            Vec::with_capacity(cap),
            Vec::with_capacity(cap),
            Vec::with_capacity(cap),
        );
        let truncated = |found| MmioError::Truncated {
            expected: header.z,
            found,
        };

        let index = |this: &mut Self, k, what| -> Result<I, MmioError> {
            let one_based: u64 = this.parse_next(what)?.ok_or_else(|| truncated(k))?;
            if one_based == 0 || one_based > header.n {
                return Err(MmioError::IndexOutOfRange {
                    line: this.line_no,
                    index: one_based,
                    n: header.n,
                });
            }
            // zero-based shift before narrowing: index n fits only after it
            I::from(one_based - 1).ok_or(MmioError::IndexTooNarrow { n: header.n, width })
        };

        for k in 0..header.z {
            rows.push(index(self, k, "row index")?);
            cols.push(index(self, k, "column index")?);
            values.push(self.parse_next::<F>("value")?.ok_or_else(|| truncated(k))?);
        }

        CooMatrix::from_parts(header, rows, cols, values)
    }

    /// Reads the entries with element types picked at run time.
    pub fn read_entries(
        &mut self,
        header: MatrixHeader,
        width: IndexWidth,
        precision: FloatPrecision,
    ) -> Result<CooMatrix, MmioError> {
        check_width(header, width)?;
        let mut reader = MatrixReader {
            source: self,
            header,
        };
        for_id::<(FloatTypes, IndexTypes), _>(&mut reader, [precision.id(), width.id()])?
    }
}

fn check_width(header: MatrixHeader, width: IndexWidth) -> Result<(), MmioError> {
    let min = min_index_width(u128::from(header.n)).map_err(|_| MmioError::Degenerate {
        n: header.n,
        z: header.z,
    })?;
    if width < min {
        return Err(MmioError::IndexTooNarrow { n: header.n, width });
    }
    Ok(())
}

/// Two-parameter kernel family reading the entries of a stream positioned
/// after its header; the parameters are the value and index types.
pub struct MatrixReader<'a, R> {
    pub source: &'a mut MatrixMarketReader<R>,
    pub header: MatrixHeader,
}

impl<R: BufRead> Kernel2 for MatrixReader<'_, R> {
    type Output = Result<CooMatrix, MmioError>;

    fn apply<F: Element, I: Element>(&mut self) -> Self::Output {
        self.source.read_typed::<F, I>(self.header)
    }
}

/// Reads a whole file: header, then entries at `precision`, with indices at
/// the narrowest width unless `width` is given.
pub fn read_matrix(
    path: impl AsRef<Path>,
    precision: FloatPrecision,
    width: Option<IndexWidth>,
) -> Result<CooMatrix, MmioError> {
    let mut reader = MatrixMarketReader::open(path)?;
    let header = reader.read_header()?;
    let width = match width {
        Some(w) => w,
        None => min_index_width(u128::from(header.n)).map_err(|_| MmioError::Degenerate {
            n: header.n,
            z: header.z,
        })?,
    };
    reader.read_entries(header, width, precision)
}

struct CoordinateWriter<'a, W> {
    matrix: &'a CooMatrix,
    out: W,
}

impl<W: Write> Kernel2 for CoordinateWriter<'_, W> {
    type Output = Result<(), MmioError>;

    fn apply<F: Element, I: Element>(&mut self) -> Self::Output {
        let view = self.matrix.view::<F, I>()?;
        let h = self.matrix.header;
        writeln!(self.out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(self.out, "{} {} {}", h.n, h.n, h.z)?;
        for ((&r, &c), &v) in view.rows.iter().zip(view.cols).zip(view.values) {
            writeln!(
                self.out,
                "{} {} {}",
                index_value(r) + 1,
                index_value(c) + 1,
                v
            )?;
        }
        Ok(())
    }
}

/// Writes `matrix` as a one-based coordinate file. Values use the shortest
/// representation that reads back to the same bits.
pub fn write_coordinate<W: Write>(matrix: &CooMatrix, out: W) -> Result<(), MmioError> {
    let mut writer = CoordinateWriter { matrix, out };
    for_id::<(FloatTypes, IndexTypes), _>(&mut writer, [matrix.precision.id(), matrix.width.id()])?
}
