//! The `MMV1` text format.
//!
//! ```text
//! MMV1
//! ring zmod:7
//! n 2
//! A
//! 1 0
//! 0 1
//! B
//! ...
//! C
//! ...
//! promise 3
//! ```
//!
//! Product-of-k files put `k <count>` before `n` and label their factors
//! `A1` .. `Ak`; vector-set files hold a single `V` block whose rows are the
//! vectors. A missing `C` means the zero matrix. Values must be canonical:
//! residues in `[0, p)`, colon-joined coefficient lists (lowest degree
//! first) for extension fields, integers within the bound for `int:M`.
//! Blank lines are ignored.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::reduce::KInstance;
use crate::ring::RingSpec;
use crate::verify::Instance;

pub const MAGIC: &str = "MMV1";

/// Any file in the format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Pair(Instance),
    Product(KInstance),
    Vectors(Matrix),
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        let last_line = text.lines().count().max(1);
        Lines { items, pos: 0, last_line }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let item = self
            .items
            .get(self.pos)
            .copied()
            .ok_or_else(|| err(self.last_line + 1, 1, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    /// A line `<keyword> <value>`.
    fn keyword(&mut self, key: &str) -> Result<(usize, usize, &'a str)> {
        let (line, text) = self.next(&format!("`{key}`"))?;
        let mut parts = text.splitn(2, ' ');
        if parts.next() != Some(key) {
            return Err(err(line, 1, format!("expected `{key} <value>`, found `{text}`")));
        }
        let value = parts.next().unwrap_or("");
        if value.is_empty() || value.contains(' ') {
            return Err(err(line, key.len() + 2, format!("expected a single value after `{key}`")));
        }
        Ok((line, key.len() + 2, value))
    }
}

fn number<T: std::str::FromStr>(line: usize, col: usize, v: &str) -> Result<T> {
    v.parse().map_err(|_| err(line, col, format!("`{v}` is not a valid number")))
}

fn read_matrix(lines: &mut Lines<'_>, label: &str, ring: &RingSpec, n: usize) -> Result<Matrix> {
    let (line, text) = lines.next(&format!("block `{label}`"))?;
    if text != label {
        return Err(err(line, 1, format!("expected block `{label}`, found `{text}`")));
    }
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n {
        let (line, text) = lines.next(&format!("a row of `{label}`"))?;
        let mut count = 0;
        let mut col = 1;
        for token in text.split(' ') {
            if token.is_empty() {
                return Err(err(line, col, "values must be separated by single spaces"));
            }
            let v = ring.parse_element(token).map_err(|m| err(line, col, m))?;
            data.push(v);
            count += 1;
            col += token.len() + 1;
        }
        if count != n {
            return Err(err(line, 1, format!("expected {n} values, found {count}")));
        }
    }
    Matrix::from_vec(ring, n, n, data)
}

fn parse_error_at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => err(line, 1, other.to_string()),
    }
}

/// Parses any document.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut lines = Lines::new(text);
    let (line, magic) = lines.next("the `MMV1` header")?;
    if magic != MAGIC {
        return Err(err(line, 1, format!("expected header `{MAGIC}`")));
    }
    let (line, col, token) = lines.keyword("ring")?;
    let ring: RingSpec = token.parse().map_err(|e: Error| err(line, col, e.to_string()))?;

    let k = match lines.peek() {
        Some((_, t)) if t.starts_with("k ") || t == "k" => {
            let (line, col, v) = lines.keyword("k")?;
            let k: usize = number(line, col, v)?;
            if k < 2 {
                return Err(err(line, col, "k must be at least 2"));
            }
            Some(k)
        }
        _ => None,
    };
    let (line, col, v) = lines.keyword("n")?;
    let n: usize = number(line, col, v)?;
    if n == 0 {
        return Err(err(line, col, "n must be positive"));
    }

    let doc = if let Some(k) = k {
        let mut mats = Vec::with_capacity(k);
        for i in 1..=k {
            mats.push(read_matrix(&mut lines, &format!("A{i}"), &ring, n)?);
        }
        let c = match lines.peek() {
            Some((_, "C")) => Some(read_matrix(&mut lines, "C", &ring, n)?),
            _ => None,
        };
        Document::Product(KInstance::new(mats, c).map_err(|e| parse_error_at(line, e))?)
    } else if matches!(lines.peek(), Some((_, "V"))) {
        Document::Vectors(read_matrix(&mut lines, "V", &ring, n)?)
    } else {
        let a = read_matrix(&mut lines, "A", &ring, n)?;
        let b = read_matrix(&mut lines, "B", &ring, n)?;
        let c = match lines.peek() {
            Some((_, "C")) => read_matrix(&mut lines, "C", &ring, n)?,
            _ => Matrix::zeros(&ring, n, n),
        };
        let promise = match lines.peek() {
            Some((_, t)) if t.starts_with("promise") => {
                let (line, col, v) = lines.keyword("promise")?;
                Some(number::<u64>(line, col, v)?)
            }
            _ => None,
        };
        Document::Pair(Instance::new(a, b, c, promise).map_err(|e| parse_error_at(line, e))?)
    };
    if let Some((line, text)) = lines.peek() {
        return Err(err(line, 1, format!("unexpected trailing content `{text}`")));
    }
    Ok(doc)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    match parse_document(text)? {
        Document::Pair(inst) => Ok(inst),
        _ => Err(err(1, 1, "expected an A/B/C instance")),
    }
}

pub fn parse_kinstance(text: &str) -> Result<KInstance> {
    match parse_document(text)? {
        Document::Product(k) => Ok(k),
        _ => Err(err(1, 1, "expected a product-of-k instance")),
    }
}

pub fn parse_vectors(text: &str) -> Result<Matrix> {
    match parse_document(text)? {
        Document::Vectors(v) => Ok(v),
        _ => Err(err(1, 1, "expected a `V` vector block")),
    }
}

fn write_matrix(out: &mut String, label: &str, m: &Matrix) {
    out.push_str(label);
    out.push('\n');
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| m.ring().format_element(x)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn header(ring: &RingSpec, k: Option<usize>, n: usize) -> String {
    let mut out = format!("{MAGIC}\nring {ring}\n");
    if let Some(k) = k {
        out.push_str(&format!("k {k}\n"));
    }
    out.push_str(&format!("n {n}\n"));
    out
}

/// Serializes an instance; `C` is always written.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = header(&inst.ring, None, inst.n());
    write_matrix(&mut out, "A", &inst.a);
    write_matrix(&mut out, "B", &inst.b);
    write_matrix(&mut out, "C", &inst.c);
    if let Some(t) = inst.promise_t {
        out.push_str(&format!("promise {t}\n"));
    }
    out
}

pub fn write_kinstance(k: &KInstance) -> String {
    let mut out = header(&k.ring, Some(k.k()), k.n());
    for (i, m) in k.mats.iter().enumerate() {
        write_matrix(&mut out, &format!("A{}", i + 1), m);
    }
    if let Some(c) = &k.c {
        write_matrix(&mut out, "C", c);
    }
    out
}

pub fn write_vectors(v: &Matrix) -> String {
    let mut out = header(v.ring(), None, v.rows());
    write_matrix(&mut out, "V", v);
    out
}

pub fn write_document(doc: &Document) -> String {
    match doc {
        Document::Pair(i) => write_instance(i),
        Document::Product(k) => write_kinstance(k),
        Document::Vectors(v) => write_vectors(v),
    }
}
