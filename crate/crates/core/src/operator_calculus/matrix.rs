use crate::error::{invalid, QhaError, Result};
use crate::hermite_rep::Fingerprint;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;

/// Dense complex matrix of an operator in the first `N` Hermite functions,
/// tagged with the fingerprint of the sampled basis it was built against.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    fingerprint: Fingerprint,
}

const BLOB_MAGIC: &[u8; 4] = b"QHAO";
const BLOB_VERSION: u32 = 1;

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>, fingerprint: Fingerprint) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(QhaError::Dimension(format!("operator matrix must be square and nonempty, got {}x{}", entries.nrows(), entries.ncols())));
        }
        if entries.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(QhaError::NonFinite("operator matrix entries"));
        }
        Ok(Self { entries, fingerprint })
    }

    pub(crate) fn from_parts(entries: DMatrix<Complex64>, fingerprint: Fingerprint) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        Self { entries, fingerprint }
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n), fingerprint: Fingerprint::ABSTRACT }
    }

    pub fn zeros(n: usize, fingerprint: Fingerprint) -> Self {
        Self { entries: DMatrix::zeros(n, n), fingerprint }
    }

    pub fn from_fn(n: usize, fingerprint: Fingerprint, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self { entries: DMatrix::from_fn(n, n, f), fingerprint }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn with_fingerprint(mut self, fingerprint: Fingerprint) -> Self {
        self.fingerprint = fingerprint;
        self
    }

    fn joint(&self, other: &OperatorMatrix) -> Result<Fingerprint> {
        if self.dim() != other.dim() {
            return Err(QhaError::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        self.fingerprint.join(other.fingerprint)
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), fingerprint: self.fingerprint }
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Result<Self> {
        let fp = self.joint(other)?;
        Ok(Self { entries: &self.entries * &other.entries, fingerprint: fp })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        let fp = self.joint(other)?;
        Ok(Self { entries: &self.entries + &other.entries, fingerprint: fp })
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<Self> {
        let fp = self.joint(other)?;
        Ok(Self { entries: &self.entries - &other.entries, fingerprint: fp })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { entries: &self.entries * c, fingerprint: self.fingerprint }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr(S T*)`.
    pub fn hs_inner(&self, other: &OperatorMatrix) -> Result<Complex64> {
        self.joint(other)?;
        Ok(self.entries.iter().zip(other.entries.iter()).map(|(a, b)| a * b.conj()).sum())
    }

    /// `‖T − T*‖_HS / ‖T‖_HS`.
    pub fn self_adjointness_defect(&self) -> f64 {
        let n = self.dim();
        let norm = self.hs_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut d = 0.0;
        for c in 0..n {
            for r in 0..n {
                d += (self.entries[(r, c)] - self.entries[(c, r)].conj()).norm_sqr();
            }
        }
        d.sqrt() / norm
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(QhaError::Dimension(format!("vector of {} for a {}-dim operator", v.len(), self.dim())));
        }
        let x = nalgebra::DVector::from_column_slice(v);
        Ok((&self.entries * x).iter().copied().collect())
    }

    /// Top-left `k × k` block.
    pub fn compress(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(invalid(format!("cannot compress a {}-dim operator to {k}", self.dim())));
        }
        Ok(Self { entries: self.entries.view((0, 0), (k, k)).into_owned(), fingerprint: self.fingerprint })
    }

    /// Singular values, non-increasing. Self-adjoint input (defect below
    /// 1e-12) takes the Hermitian eigenvalue route.
    pub fn singular_spectrum(&self) -> SingularSpectrum {
        let mut values: Vec<f64> = if self.self_adjointness_defect() < 1e-12 {
            let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
            h.symmetric_eigenvalues().iter().map(|v| v.abs()).collect()
        } else {
            svd(&self.entries).1
        };
        values.sort_by(|a, b| b.total_cmp(a));
        SingularSpectrum { values, dim: self.dim() }
    }

    /// Binary blob: magic, version, dim, fingerprint, row-major complex
    /// doubles, SHA-256 of everything before it.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.dim();
        let mut buf = Vec::with_capacity(24 + 16 * n * n + 32);
        buf.extend_from_slice(BLOB_MAGIC);
        buf.extend_from_slice(&BLOB_VERSION.to_le_bytes());
        buf.extend_from_slice(&(n as u64).to_le_bytes());
        buf.extend_from_slice(&self.fingerprint.0.to_le_bytes());
        for r in 0..n {
            for c in 0..n {
                let v = self.entries[(r, c)];
                buf.extend_from_slice(&v.re.to_bits().to_le_bytes());
                buf.extend_from_slice(&v.im.to_bits().to_le_bytes());
            }
        }
        let sum = Sha256::digest(&buf);
        buf.extend_from_slice(&sum);
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 24 + 32 {
            return Err(QhaError::Corrupt("operator blob too short".into()));
        }
        let (body, sum) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != sum {
            return Err(QhaError::Corrupt("operator blob checksum mismatch".into()));
        }
        if &body[..4] != BLOB_MAGIC || u32::from_le_bytes(body[4..8].try_into().unwrap()) != BLOB_VERSION {
            return Err(QhaError::Corrupt("not an operator blob of a known version".into()));
        }
        let n = u64::from_le_bytes(body[8..16].try_into().unwrap()) as usize;
        let fp = Fingerprint(u64::from_le_bytes(body[16..24].try_into().unwrap()));
        if body.len() != 24 + 16 * n * n {
            return Err(QhaError::Corrupt("operator blob length does not match its dimension".into()));
        }
        let f = |o: usize| f64::from_bits(u64::from_le_bytes(body[o..o + 8].try_into().unwrap()));
        let entries = DMatrix::from_fn(n, n, |r, c| {
            let o = 24 + 16 * (r * n + c);
            Complex64::new(f(o), f(o + 8))
        });
        Self::new(entries, fp)
    }

    /// CSV with columns `row,col,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "col", "re", "im"])?;
        let n = self.dim();
        for r in 0..n {
            for c in 0..n {
                let v = self.entries[(r, c)];
                w.write_record([r.to_string(), c.to_string(), v.re.to_string(), v.im.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Thin SVD `(U, s, V)` with `T = U diag(s) V*`. nalgebra's complex SVD
/// loses accuracy on some rank-deficient inputs, so this goes through faer.
pub(crate) fn svd(m: &DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let (r, c) = m.shape();
    let f = faer::Mat::<Complex64>::from_fn(r, c, |i, j| m[(i, j)]);
    let d = f.thin_svd().expect("SVD of a finite matrix converges");
    let (u, v) = (d.U(), d.V());
    let s: Vec<f64> = d.S().column_vector().iter().map(|x| x.re).collect();
    let u = DMatrix::from_fn(r, s.len(), |i, j| u[(i, j)]);
    let v = DMatrix::from_fn(c, s.len(), |i, j| v[(i, j)]);
    (u, s, v)
}

/// Singular values `s_0 ≥ s_1 ≥ …` of an `N × N` operator matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    dim: usize,
}

impl SingularSpectrum {
    /// Sorts `values` into non-increasing order.
    pub fn from_values(mut values: Vec<f64>, dim: usize) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("singular values must be finite and non-negative"));
        }
        if values.len() > dim {
            return Err(invalid("more singular values than the dimension"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values, dim })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// ℓ^p norm of the singular values, max for `p = ∞`.
    pub fn norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(invalid(format!("Schatten exponent must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.first().copied().unwrap_or(0.0));
        }
        let top = self.values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return Ok(0.0);
        }
        // Scale by the top value so large p neither overflows nor underflows.
        let s: f64 = self.values.iter().map(|v| (v / top).powf(p)).sum();
        Ok(top * s.powf(1.0 / p))
    }

    /// CSV with columns `n,s_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "s_n"])?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([k.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `‖T‖_{S^p}`; one decomposition per call.
pub fn schatten_norm(t: &OperatorMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("Schatten exponent must be >= 1, got {p}")));
    }
    t.singular_spectrum().norm(p)
}

/// `P = diag((−1)^n)`, the parity operator.
pub fn parity(n: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(n, Fingerprint::ABSTRACT, |r, c| {
        if r != c {
            Complex64::new(0.0, 0.0)
        } else if r % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}
