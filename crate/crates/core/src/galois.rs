//! Arithmetic over GF(2^m) with log/antilog tables, and dense matrices over
//! such a field.

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported field exponent.
pub const MAX_EXPONENT: u32 = 16;

/// Reduction polynomial `x^8 + x^4 + x^3 + x + 1`.
pub const AES_POLY: u32 = 0x11B;

/// Field element; only the low `m` bits are used.
pub type Elem = u16;

#[derive(Clone, Debug)]
pub struct GaloisField {
    m: u32,
    poly: u32,
    /// Multiplicative generator found while building the tables.
    generator: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.poly == other.poly
    }
}

impl Eq for GaloisField {}

impl GaloisField {
    /// Builds the field `GF(2)[x] / (poly)` where `poly` has degree `m`.
    ///
    /// Fails unless `poly` is irreducible, detected by the absence of an
    /// element whose powers cover every nonzero residue.
    pub fn new(m: u32, poly: u32) -> Result<Self> {
        if m == 0 || m > MAX_EXPONENT {
            return Err(Error::InvalidField(format!(
                "exponent {m} outside 1..={MAX_EXPONENT}"
            )));
        }
        if poly >> m != 1 {
            return Err(Error::InvalidField(format!(
                "polynomial {poly:#x} does not have degree {m}"
            )));
        }
        let order = 1usize << m;
        let group = order - 1;
        let mul_slow = |a: u32, b: u32| -> u32 {
            let (mut a, mut b, mut acc) = (a, b, 0u32);
            while b != 0 {
                if b & 1 == 1 {
                    acc ^= a;
                }
                b >>= 1;
                a <<= 1;
                if a >> m & 1 == 1 {
                    a ^= poly;
                }
            }
            acc
        };
        let mut exp = vec![0 as Elem; 2 * group.max(1)];
        let mut log = vec![0u32; order];
        let mut found = None;
        'search: for g in 1..order as u32 {
            let mut seen = vec![false; order];
            let mut x = 1u32;
            for e in 0..group {
                if seen[x as usize] {
                    continue 'search;
                }
                seen[x as usize] = true;
                exp[e] = x as Elem;
                log[x as usize] = e as u32;
                x = mul_slow(x, g);
            }
            if x == 1 {
                found = Some(g as Elem);
                break;
            }
        }
        let generator = found.ok_or_else(|| {
            Error::InvalidField(format!("polynomial {poly:#x} is reducible"))
        })?;
        for e in group..exp.len() {
            exp[e] = exp[e - group];
        }
        Ok(GaloisField {
            m,
            poly,
            generator,
            exp,
            log,
        })
    }

    /// GF(2^8) with the AES polynomial.
    pub fn gf256() -> Self {
        GaloisField::new(8, AES_POLY).expect("AES polynomial is irreducible")
    }

    /// GF(2).
    pub fn binary() -> Self {
        GaloisField::new(1, 0b11).expect("x + 1 is irreducible")
    }

    /// GF(2^m) with a fixed irreducible polynomial for each supported `m`.
    pub fn with_default_poly(m: u32) -> Result<Self> {
        let poly = match m {
            1 => 0b11,
            2 => 0b111,
            3 => 0b1011,
            4 => 0b1_0011,
            5 => 0b10_0101,
            6 => 0b100_0011,
            7 => 0b1000_0011,
            8 => AES_POLY,
            9 => 0x211,
            10 => 0x409,
            11 => 0x805,
            12 => 0x1053,
            13 => 0x201B,
            14 => 0x4443,
            15 => 0x8003,
            16 => 0x1100B,
            _ => {
                return Err(Error::InvalidField(format!(
                    "exponent {m} outside 1..={MAX_EXPONENT}"
                )))
            }
        };
        GaloisField::new(m, poly)
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// Number of elements, `2^m`.
    pub fn order(&self) -> usize {
        1 << self.m
    }

    pub fn contains(&self, a: Elem) -> bool {
        (a as usize) < self.order()
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let group = self.order() as u32 - 1;
        Ok(self.exp[((group - self.log[a as usize]) % group) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let group = self.order() as u64 - 1;
        self.exp[((self.log[a as usize] as u64 * (e % group)) % group) as usize]
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        rng.gen_range(0..self.order()) as Elem
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        rng.gen_range(1..self.order()) as Elem
    }

    /// `dst += c * src`, element-wise.
    pub fn axpy(&self, dst: &mut [Elem], c: Elem, src: &[Elem]) {
        if c == 0 {
            return;
        }
        for (d, &s) in dst.iter_mut().zip(src) {
            *d ^= self.mul(c, s);
        }
    }

    pub fn scale(&self, v: &mut [Elem], c: Elem) {
        for x in v {
            *x = self.mul(*x, c);
        }
    }

    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| acc ^ self.mul(x, y))
    }
}

/// Row-major matrix over a [`GaloisField`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FieldMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    /// Stacks equal-length rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[Vec<Elem>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        field: &GaloisField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: (0..rows * cols).map(|_| field.random(rng)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[Elem]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "row has {} entries, expected {}",
                row.len(),
                self.cols
            )));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// Vertical concatenation `[self; other]`.
    pub fn stack(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FieldMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self, field: &GaloisField) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
            field.scale(m.row_mut(r), inv);
            let pivot_row = m.row(r).to_vec();
            for i in 0..m.rows {
                if i != r {
                    let f = m.get(i, c);
                    field.axpy(m.row_mut(i), f, &pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, field: &GaloisField) -> usize {
        self.rref(field).1.len()
    }

    /// Some `x` with `self * x = y`, or `None` when the system is inconsistent.
    pub fn solve(&self, field: &GaloisField, y: &[Elem]) -> Result<Option<Vec<Elem>>> {
        if y.len() != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has {} entries, matrix has {} rows",
                y.len(),
                self.rows
            )));
        }
        let mut aug = FieldMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            aug.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
            aug.set(r, self.cols, y[r]);
        }
        let (red, pivots) = aug.rref(field);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red.get(r, self.cols);
        }
        Ok(Some(x))
    }

    /// Rows form a basis of `{x : self * x = 0}`.
    pub fn nullspace_basis(&self, field: &GaloisField) -> FieldMatrix {
        let (red, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = FieldMatrix::zeros(free.len(), self.cols);
        for (b, &f) in free.iter().enumerate() {
            basis.set(b, f, 1);
            for (r, &p) in pivots.iter().enumerate() {
                // characteristic 2: negation is the identity
                basis.set(b, p, red.get(r, f));
            }
        }
        basis
    }

    pub fn mul_vec(&self, field: &GaloisField, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector has {} entries, matrix has {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|r| field.dot(self.row(r), x)).collect())
    }

    pub fn mul(&self, field: &GaloisField, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = FieldMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(r, t);
                if a != 0 {
                    let src = other.row(t).to_vec();
                    field.axpy(out.row_mut(r), a, &src);
                }
            }
        }
        Ok(out)
    }

    /// Whether every row of `other` lies in the row space of `self`.
    pub fn row_space_contains(&self, field: &GaloisField, other: &FieldMatrix) -> Result<bool> {
        let base = self.rank(field);
        Ok(self.stack(other)?.rank(field) == base)
    }
}
