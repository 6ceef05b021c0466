//! Dense constant matrices, slot bindings, and traces along signed cycles.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gluing::WordShape;
use crate::scalar::{is_integer, parse_rational, Rational, Scalar};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Input("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Input(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Input("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        View::plain(self).product(&View::plain(other))
    }

    pub fn trace(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "trace of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(T::sum((0..self.rows).map(|i| self.get(i, i).clone())))
    }
}

impl Matrix<Rational> {
    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(is_integer)
    }
}

/// A matrix read either as stored or transposed, without copying.
struct View<'a, T> {
    m: &'a Matrix<T>,
    transposed: bool,
}

impl<T> Clone for View<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for View<'_, T> {}

impl<'a, T: Scalar> View<'a, T> {
    fn plain(m: &'a Matrix<T>) -> Self {
        Self {
            m,
            transposed: false,
        }
    }

    fn rows(&self) -> usize {
        if self.transposed {
            self.m.cols
        } else {
            self.m.rows
        }
    }

    fn cols(&self) -> usize {
        if self.transposed {
            self.m.rows
        } else {
            self.m.cols
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> &T {
        if self.transposed {
            self.m.get(j, i)
        } else {
            self.m.get(i, j)
        }
    }

    fn product(&self, other: &View<'_, T>) -> Result<Matrix<T>> {
        if self.cols() != other.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let (r, inner, c) = (self.rows(), self.cols(), other.cols());
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(T::sum(
                    (0..inner).map(|k| self.get(i, k).mul(other.get(k, j))),
                ));
            }
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }
}

/// Constant matrices `D₁, …, D_m` for the slots of a word; slot `k` sits
/// after letter `k`. A negative slot index reads the transpose.
#[derive(Clone, Debug)]
pub struct MatrixSet<T> {
    slots: Vec<Arc<Matrix<T>>>,
}

impl<T: Scalar> MatrixSet<T> {
    pub fn new(slots: Vec<Matrix<T>>) -> Self {
        Self {
            slots: slots.into_iter().map(Arc::new).collect(),
        }
    }

    pub fn from_shared(slots: Vec<Arc<Matrix<T>>>) -> Self {
        Self { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Slot `k` (1-based).
    pub fn slot(&self, k: usize) -> &Matrix<T> {
        &self.slots[k - 1]
    }

    pub fn shared(&self, k: usize) -> Arc<Matrix<T>> {
        self.slots[k - 1].clone()
    }

    /// Signed lookup: `-k` is the transpose of slot `k`.
    pub fn signed(&self, k: i32) -> Matrix<T> {
        let m = self.slot(k.unsigned_abs() as usize);
        if k < 0 {
            m.transpose()
        } else {
            m.clone()
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> MatrixSet<U> {
        // keep aliased slots aliased
        let mut done: Vec<(*const Matrix<T>, Arc<Matrix<U>>)> = Vec::new();
        let slots = self
            .slots
            .iter()
            .map(|s| {
                let ptr = Arc::as_ptr(s);
                if let Some((_, m)) = done.iter().find(|(p, _)| *p == ptr) {
                    return m.clone();
                }
                let m = Arc::new(s.map(f));
                done.push((ptr, m.clone()));
                m
            })
            .collect();
        MatrixSet { slots }
    }

    /// Checks every slot against the expected `(rows, cols)` profile.
    pub fn check_profile(&self, profile: &[(usize, usize)]) -> Result<()> {
        if profile.len() != self.len() {
            return Err(Error::Dimension(format!(
                "word has {} slots but {} matrices are bound",
                profile.len(),
                self.len()
            )));
        }
        for (k, &(r, c)) in profile.iter().enumerate() {
            let m = self.slot(k + 1);
            if (m.rows(), m.cols()) != (r, c) {
                return Err(Error::Dimension(format!(
                    "slot {} is {}x{} but the word requires {r}x{c}",
                    k + 1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(())
    }

    /// Replaces slot `k` (1-based), breaking any aliasing for that slot.
    pub fn with_slot(&self, k: usize, m: Matrix<T>) -> Self {
        let mut slots = self.slots.clone();
        slots[k - 1] = Arc::new(m);
        Self { slots }
    }

    /// The slots listed (1-based), in order.
    pub fn select(&self, slots: &[usize]) -> Self {
        Self {
            slots: slots.iter().map(|&k| self.slots[k - 1].clone()).collect(),
        }
    }
}

impl MatrixSet<Rational> {
    pub fn to_f64(&self) -> MatrixSet<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn is_integer(&self) -> bool {
        self.slots.iter().all(|m| m.is_integer())
    }
}

/// Required `(rows, cols)` of every slot. `X` is `M×N`; slot `k` sits
/// between letter `k` and the next letter of its factor.
pub fn dimension_profile(shape: &WordShape, n: usize, m: usize) -> Vec<(usize, usize)> {
    (1..=shape.letters())
        .map(|k| {
            let rows = if shape.epsilon(k) == 1 { n } else { m };
            let cols = if shape.epsilon(shape.next_letter(k)) == 1 {
                m
            } else {
                n
            };
            (rows, cols)
        })
        .collect()
}

fn format_cycle(c: &[i32]) -> String {
    crate::perm::format_cycles(std::slice::from_ref(&c.to_vec()))
}

/// `Π_cycles Tr(D_{c₁}^{±} D_{c₂}^{±} ⋯)`, a negative index reading the
/// transpose.
pub fn trace_along<T: Scalar>(cycles: &[Vec<i32>], ms: &MatrixSet<T>) -> Result<T> {
    let mut used = vec![false; ms.len()];
    let mut product = T::one();
    for c in cycles {
        for &k in c {
            let a = k.unsigned_abs() as usize;
            if k == 0 || a > ms.len() {
                return Err(Error::Input(format!(
                    "cycle {} refers to slot {k} of {}",
                    format_cycle(c),
                    ms.len()
                )));
            }
            if used[a - 1] {
                return Err(Error::Input(format!("slot {a} appears twice in the cycles")));
            }
            used[a - 1] = true;
        }
        product = product.mul(&cycle_trace(c, ms)?);
    }
    Ok(product)
}

fn cycle_trace<T: Scalar>(c: &[i32], ms: &MatrixSet<T>) -> Result<T> {
    if c.is_empty() {
        return Ok(T::one());
    }
    let views: Vec<View<'_, T>> = c
        .iter()
        .map(|&k| View {
            m: ms.slot(k.unsigned_abs() as usize),
            transposed: k < 0,
        })
        .collect();
    let s = views.len();
    for i in 0..s {
        let (a, b) = (&views[i], &views[(i + 1) % s]);
        if a.cols() != b.rows() {
            return Err(Error::Dimension(format!(
                "cycle {}: slot {} gives {} columns but slot {} has {} rows",
                format_cycle(c),
                c[i],
                a.cols(),
                c[(i + 1) % s],
                b.rows()
            )));
        }
    }
    if s == 1 {
        let v = &views[0];
        return Ok(T::sum((0..v.rows()).map(|i| v.get(i, i).clone())));
    }
    let mut acc: Option<Matrix<T>> = None;
    for v in &views[1..s - 1] {
        acc = Some(match acc {
            None => views[0].product(v)?,
            Some(a) => View::plain(&a).product(v)?,
        });
    }
    let last = &views[s - 1];
    let head = match &acc {
        Some(a) => View::plain(a),
        None => views[0],
    };
    // Tr(head · last) without forming the product
    Ok(T::sum((0..head.rows()).flat_map(|i| {
        (0..head.cols()).map(move |j| head.get(i, j).mul(last.get(j, i)))
    })))
}

/// Reads the plain-text matrix format: a `rows cols` header line followed by
/// `rows` lines of whitespace-separated numbers. `#` starts a comment.
pub fn parse_matrix(text: &str) -> Result<Matrix<Rational>> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Input("empty matrix file".into()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Input(format!("bad matrix dimension {s:?}")))
    };
    if dims.len() != 2 {
        return Err(Error::Input(format!(
            "matrix header must be \"rows cols\", got {header:?}"
        )));
    }
    let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    for line in lines {
        let row: Vec<Rational> = line
            .split_whitespace()
            .map(parse_rational)
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(Error::Input(format!(
                "matrix row {} has {} entries, expected {cols}",
                seen_rows + 1,
                row.len()
            )));
        }
        data.extend(row);
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(Error::Input(format!(
            "matrix has {seen_rows} rows, header says {rows}"
        )));
    }
    Matrix::new(rows, cols, data)
}

pub fn load_matrix(path: &Path) -> Result<Matrix<Rational>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix(&text).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Matrix(Arc<Matrix<Rational>>),
    Identity(usize),
    Alias(String),
}

/// Slot name → matrix source, as read from a bindings file with lines
/// `D1 = path`, `D2 = I 3` or `D3 = D1`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings {
    entries: BTreeMap<String, Binding>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, binding: Binding) -> &mut Self {
        self.entries.insert(name.into(), binding);
        self
    }

    pub fn matrix(mut self, name: impl Into<String>, m: Matrix<Rational>) -> Self {
        self.insert(name, Binding::Matrix(Arc::new(m)));
        self
    }

    pub fn identity(mut self, name: impl Into<String>, n: usize) -> Self {
        self.insert(name, Binding::Identity(n));
        self
    }

    pub fn alias(mut self, name: impl Into<String>, target: impl Into<String>) -> Self {
        self.insert(name, Binding::Alias(target.into()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.entries.get(name)
    }

    /// Parses a bindings file; matrix paths are resolved against `base_dir`
    /// and loaded immediately.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut out = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, rhs) = line.split_once('=').ok_or_else(|| {
                Error::Input(format!("bindings line {}: expected NAME = SOURCE", lineno + 1))
            })?;
            let name = name.trim();
            let rhs = rhs.trim();
            if name.is_empty() || rhs.is_empty() {
                return Err(Error::Input(format!(
                    "bindings line {}: expected NAME = SOURCE",
                    lineno + 1
                )));
            }
            let words: Vec<&str> = rhs.split_whitespace().collect();
            let binding = match words.as_slice() {
                ["I", n] => Binding::Identity(n.parse().map_err(|_| {
                    Error::Input(format!("bindings line {}: bad identity size", lineno + 1))
                })?),
                [single] if out.entries.contains_key(*single) || is_slot_name(single) => {
                    Binding::Alias(single.to_string())
                }
                _ => {
                    let mut p = PathBuf::from(rhs);
                    if p.is_relative() {
                        p = base_dir.join(p);
                    }
                    Binding::Matrix(Arc::new(load_matrix(&p)?))
                }
            };
            out.entries.insert(name.to_string(), binding);
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    fn resolve(&self, name: &str) -> Result<&Binding> {
        let mut current = name;
        for _ in 0..=self.entries.len() {
            match self.entries.get(current) {
                None => return Err(Error::UnboundSlot(current.to_string())),
                Some(Binding::Alias(target)) => current = target,
                Some(b) => return Ok(b),
            }
        }
        Err(Error::Input(format!("alias cycle through {name}")))
    }
}

fn is_slot_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('D') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// Builds the matrix set for slots named `slot_names` with the required
/// `profile`. Slots sharing a name or an alias share one matrix. Without
/// bindings every slot defaults to the identity, which needs a square
/// profile.
pub fn bind_matrices(
    bindings: Option<&Bindings>,
    slot_names: &[String],
    profile: &[(usize, usize)],
) -> Result<MatrixSet<Rational>> {
    let mut cache: BTreeMap<usize, Arc<Matrix<Rational>>> = BTreeMap::new();
    let mut by_name: BTreeMap<String, Arc<Matrix<Rational>>> = BTreeMap::new();
    let mut slots = Vec::with_capacity(slot_names.len());
    for (k, name) in slot_names.iter().enumerate() {
        let (rows, cols) = profile[k];
        let m = match bindings {
            None => {
                if rows != cols {
                    return Err(Error::Dimension(format!(
                        "slot {name} must be {rows}x{cols}; it cannot default to an identity"
                    )));
                }
                cache
                    .entry(rows)
                    .or_insert_with(|| Arc::new(Matrix::identity(rows)))
                    .clone()
            }
            Some(b) => {
                if let Some(m) = by_name.get(name) {
                    m.clone()
                } else {
                    let m = match b.resolve(name)? {
                        Binding::Matrix(m) => m.clone(),
                        Binding::Identity(n) => cache
                            .entry(*n)
                            .or_insert_with(|| Arc::new(Matrix::identity(*n)))
                            .clone(),
                        Binding::Alias(_) => unreachable!("aliases are resolved"),
                    };
                    by_name.insert(name.clone(), m.clone());
                    m
                }
            }
        };
        if (m.rows(), m.cols()) != (rows, cols) {
            return Err(Error::Dimension(format!(
                "slot {name} (position {}) is bound to a {}x{} matrix but the word requires {rows}x{cols}",
                k + 1,
                m.rows(),
                m.cols()
            )));
        }
        slots.push(m);
    }
    Ok(MatrixSet::from_shared(slots))
}
