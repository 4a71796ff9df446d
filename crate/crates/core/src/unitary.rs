//! Dense unitary and Hermitian matrices with their numerical certificates.

use std::io::{Read, Write};

use faer::{c64, Mat, MatRef, Side};

use crate::{Result, SffError};

/// Default bound on `max |(U†U - I)_ij|` accepted by the builders.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Dense complex `d x d` matrix certified to be unitary.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    entries: Mat<c64>,
    unitarity_error: f64,
}

impl UnitaryMatrix {
    /// Certifies `entries` against [`UNITARITY_TOLERANCE`].
    pub fn new(entries: Mat<c64>) -> Result<Self> {
        Self::with_tolerance(entries, UNITARITY_TOLERANCE)
    }

    pub fn with_tolerance(entries: Mat<c64>, tolerance: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(SffError::param(format!(
                "unitary must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let unitarity_error = unitarity_deviation(entries.as_ref());
        if !(unitarity_error <= tolerance) {
            return Err(SffError::Numerical(format!(
                "max |U'U - I| = {unitarity_error:.3e} exceeds {tolerance:.1e} (d = {})",
                entries.nrows()
            )));
        }
        Ok(Self {
            entries,
            unitarity_error,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.entries
    }

    /// The certified value of `max |(U†U - I)_ij|`.
    pub fn unitarity_error(&self) -> f64 {
        self.unitarity_error
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|k| self.entries[(k, k)]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &UnitaryMatrix) -> f64 {
        max_abs_diff(self.as_mat(), other.as_mat())
    }

    /// Writes the raw matrix: a little-endian `u64` dimension followed by the
    /// row-major entries as little-endian `(re, im)` `f64` pairs.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        let d = self.dim();
        out.write_all(&(d as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * d);
        for i in 0..d {
            buf.clear();
            for j in 0..d {
                let z = self.entries[(i, j)];
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        Ok(())
    }

    /// Reads a matrix written by [`write_dump`](Self::write_dump) and
    /// re-certifies it with `tolerance`.
    pub fn read_dump<R: Read>(mut input: R, tolerance: f64) -> Result<Self> {
        let mut word = [0u8; 8];
        input.read_exact(&mut word)?;
        let d = u64::from_le_bytes(word) as usize;
        if d == 0 || d > 1 << 16 {
            return Err(SffError::param(format!("implausible dump dimension {d}")));
        }
        let mut m = Mat::<c64>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                input.read_exact(&mut word)?;
                let re = f64::from_le_bytes(word);
                input.read_exact(&mut word)?;
                let im = f64::from_le_bytes(word);
                m[(i, j)] = c64::new(re, im);
            }
        }
        Self::with_tolerance(m, tolerance)
    }
}

/// Dense Hermitian matrix (stored in full).
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    entries: Mat<c64>,
}

impl HermitianMatrix {
    /// Accepts `entries` if it is Hermitian to `1e-12` relative to its largest entry.
    pub fn new(entries: Mat<c64>) -> Result<Self> {
        let d = entries.nrows();
        if d != entries.ncols() {
            return Err(SffError::param("Hermitian matrix must be square"));
        }
        let scale = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| entries[(i, j)].norm())
            .fold(0.0, f64::max)
            .max(1.0);
        for i in 0..d {
            for j in 0..=i {
                if (entries[(i, j)] - entries[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(SffError::param(format!("entry ({i}, {j}) breaks Hermiticity")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_trusted(entries: Mat<c64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.entries[(row, col)]
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.entries
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| SffError::Numerical(format!("Hermitian eigensolver: {e:?}")))
    }

    /// `exp(-i g H)` through the Hermitian eigendecomposition `H = V Λ V†`.
    pub fn exp_minus_i(&self, g: f64) -> Result<Mat<c64>> {
        let evd = self
            .entries
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| SffError::Numerical(format!("Hermitian eigensolver: {e:?}")))?;
        let v = evd.U();
        let s = evd.S().column_vector();
        let d = self.dim();
        let scaled = Mat::<c64>::from_fn(d, d, |i, j| {
            let lambda = s[j].re;
            v[(i, j)] * c64::cis(-g * lambda)
        });
        Ok(&scaled * v.adjoint())
    }
}

/// `max |(A†A - I)_ij|`.
pub fn unitarity_deviation(a: MatRef<'_, c64>) -> f64 {
    let gram = a.adjoint() * a;
    let d = gram.nrows();
    let mut worst = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            let target = if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Matrix of the phased permutation `|k> -> e^{i phases[k]} |pi(k)>`.
pub fn phased_permutation_matrix(mapping: &[usize], phases: &[f64]) -> Mat<c64> {
    let d = mapping.len();
    let mut m = Mat::<c64>::zeros(d, d);
    for (k, (&image, &phi)) in mapping.iter().zip(phases).enumerate() {
        m[(image, k)] = c64::cis(phi);
    }
    m
}
