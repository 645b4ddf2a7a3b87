use super::line::{LineGrid, WaveFunction};
use crate::error::{invalid, QhaError, Result};
use num_complex::Complex64;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

/// Identifies the sampled basis an operator matrix was built against.
/// `Fingerprint::ABSTRACT` marks matrices that do not depend on sampling
/// (parity, closed-form ρ(z) built without a basis) and is compatible with
/// every other fingerprint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub u64);

impl Fingerprint {
    pub const ABSTRACT: Fingerprint = Fingerprint(0);

    pub fn compatible(self, other: Fingerprint) -> bool {
        self == other || self == Self::ABSTRACT || other == Self::ABSTRACT
    }

    /// The more specific of two compatible fingerprints.
    pub fn join(self, other: Fingerprint) -> Result<Fingerprint> {
        if !self.compatible(other) {
            return Err(QhaError::FingerprintMismatch(self.0, other.0));
        }
        Ok(if self == Self::ABSTRACT { other } else { self })
    }
}

const RESCALE: f64 = 1e150;

/// `h_0(t), …, h_{n−1}(t)`. Evaluated at `|t|` with the parity sign applied
/// afterwards, so `h_n(−t) = (−1)^n h_n(t)` holds bit for bit. The
/// Gaussian is carried in a log-scale accumulator, which keeps large `n`
/// and large `|t|` free of overflow and spurious underflow.
pub fn hermite_values(n: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    hermite_values_into(t, &mut out);
    out
}

pub(crate) fn hermite_values_into(t: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let a = t.abs();
    let x = (2.0 * PI).sqrt() * a;
    let mut log_scale = 0.25 * std::f64::consts::LN_2 - PI * a * a;
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = factor;
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
            factor = log_scale.exp();
        }
        out[k + 1] = cur * factor;
    }
    if t < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
}

/// `Σ c_n h_n` sampled on an arbitrary line grid, evaluating the Hermite
/// functions directly at the nodes.
pub fn synthesize_on_grid(coeffs: &[Complex64], grid: &LineGrid) -> WaveFunction {
    let n = coeffs.len();
    let mut col = vec![0.0; n];
    WaveFunction::from_fn(*grid, |t| {
        hermite_values_into(t, &mut col);
        coeffs.iter().zip(&col).map(|(c, h)| c * *h).sum()
    })
}

/// Sampled Hermite functions `h_0..h_{N−1}` on a line grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteBasis {
    n: usize,
    grid: LineGrid,
    table: Vec<f64>,
    fingerprint: Fingerprint,
}

const CACHE_MAGIC: &[u8; 4] = b"QHAH";
const CACHE_VERSION: u32 = 1;

/// Rejects grids that are too small for `n` Hermite functions.
pub fn check_sizing(n: usize, grid: &LineGrid) -> Result<()> {
    let t_min = (n as f64 / PI).sqrt() + 2.0;
    let t = grid.half_width();
    let m_min = 8 * (t * t).ceil() as usize;
    if t + 1e-12 < t_min || grid.points() < m_min {
        let t_fix = t.max(t_min);
        let m_fix = 8 * (t_fix * t_fix).ceil() as usize;
        return Err(QhaError::Sizing { n, t, m: grid.points(), t_min: t_fix, m_min: m_fix.max(grid.points()) });
    }
    Ok(())
}

pub fn hermite_basis(n: usize, grid: LineGrid) -> Result<HermiteBasis> {
    HermiteBasis::new(n, grid)
}

impl HermiteBasis {
    pub fn new(n: usize, grid: LineGrid) -> Result<Self> {
        if n == 0 {
            return Err(invalid("hermite basis needs N >= 1"));
        }
        check_sizing(n, &grid)?;
        let m = grid.points();
        let mut table = vec![0.0; n * m];
        let mut col = vec![0.0; n];
        for i in 0..m {
            hermite_values_into(grid.node(i), &mut col);
            for (k, v) in col.iter().enumerate() {
                table[k * m + i] = *v;
            }
        }
        let fingerprint = Self::digest(n, &grid, &table);
        Ok(Self { n, grid, table, fingerprint })
    }

    /// Basis on the smallest grid allowed by the sizing rule.
    pub fn with_default_grid(n: usize) -> Result<Self> {
        Self::new(n, LineGrid::for_hermite(n))
    }

    fn digest(n: usize, grid: &LineGrid, table: &[f64]) -> Fingerprint {
        let mut h = Sha256::new();
        h.update((n as u64).to_le_bytes());
        h.update(grid.half_width().to_bits().to_le_bytes());
        h.update((grid.points() as u64).to_le_bytes());
        for v in table {
            h.update(v.to_bits().to_le_bytes());
        }
        let d = h.finalize();
        let mut b = [0u8; 8];
        b.copy_from_slice(&d[..8]);
        // Zero is reserved for basis-independent matrices.
        Fingerprint(u64::from_le_bytes(b).max(1))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &LineGrid {
        &self.grid
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    /// Samples of `h_k`.
    pub fn row(&self, k: usize) -> &[f64] {
        let m = self.grid.points();
        &self.table[k * m..(k + 1) * m]
    }

    pub fn function(&self, k: usize) -> WaveFunction {
        WaveFunction::from_values_unchecked(self.grid, self.row(k).iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Coefficients `⟨f, h_m⟩` for `m < N`.
    pub fn coefficients(&self, f: &WaveFunction) -> Result<Vec<Complex64>> {
        if *f.grid() != self.grid {
            return Err(invalid("wave function is not sampled on the basis grid"));
        }
        let h = self.grid.spacing();
        Ok((0..self.n).map(|k| self.row(k).iter().zip(f.values()).map(|(b, v)| v * *b).sum::<Complex64>() * h).collect())
    }

    /// `Σ c_m h_m` on the basis grid.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Result<WaveFunction> {
        if coeffs.len() > self.n {
            return Err(QhaError::Dimension(format!("{} coefficients for a basis of {}", coeffs.len(), self.n)));
        }
        let m = self.grid.points();
        let mut v = vec![Complex64::new(0.0, 0.0); m];
        for (k, c) in coeffs.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (dst, b) in v.iter_mut().zip(self.row(k)) {
                *dst += c * *b;
            }
        }
        Ok(WaveFunction::from_values_unchecked(self.grid, v))
    }

    /// Gram matrix `h Σ h_j h_k` under the trapezoid rule.
    pub fn gram(&self) -> Vec<f64> {
        let h = self.grid.spacing();
        let mut g = vec![0.0; self.n * self.n];
        for j in 0..self.n {
            for k in 0..=j {
                let s: f64 = self.row(j).iter().zip(self.row(k)).map(|(a, b)| a * b).sum::<f64>() * h;
                g[j * self.n + k] = s;
                g[k * self.n + j] = s;
            }
        }
        g
    }

    fn cache_file(dir: &Path, n: usize, grid: &LineGrid) -> PathBuf {
        dir.join(format!("hermite-v{CACHE_VERSION}-n{n}-t{:016x}-m{}.bin", grid.half_width().to_bits(), grid.points()))
    }

    fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(32 + 8 * self.table.len() + 32);
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n as u64).to_le_bytes());
        buf.extend_from_slice(&self.grid.half_width().to_bits().to_le_bytes());
        buf.extend_from_slice(&(self.grid.points() as u64).to_le_bytes());
        for v in &self.table {
            buf.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        let sum = Sha256::digest(&buf);
        buf.extend_from_slice(&sum);
        buf
    }

    fn decode(bytes: &[u8], n: usize, grid: &LineGrid) -> Result<Self> {
        let m = grid.points();
        let body_len = 32 + 8 * n * m;
        if bytes.len() != body_len + 32 {
            return Err(QhaError::Corrupt("hermite cache has the wrong length".into()));
        }
        let (body, sum) = bytes.split_at(body_len);
        if Sha256::digest(body).as_slice() != sum {
            return Err(QhaError::Corrupt("hermite cache checksum mismatch".into()));
        }
        let u64_at = |o: usize| u64::from_le_bytes(body[o..o + 8].try_into().unwrap());
        if &body[..4] != CACHE_MAGIC
            || u32::from_le_bytes(body[4..8].try_into().unwrap()) != CACHE_VERSION
            || u64_at(8) != n as u64
            || u64_at(16) != grid.half_width().to_bits()
            || u64_at(24) != m as u64
        {
            return Err(QhaError::Corrupt("hermite cache header does not match the request".into()));
        }
        let table: Vec<f64> = body[32..].chunks_exact(8).map(|c| f64::from_bits(u64::from_le_bytes(c.try_into().unwrap()))).collect();
        let fingerprint = Self::digest(n, grid, &table);
        Ok(Self { n, grid: *grid, table, fingerprint })
    }

    /// Loads the table from `dir` when a valid cache file exists, otherwise
    /// builds it and writes the cache (atomically, via a temporary file).
    pub fn load_or_build(n: usize, grid: LineGrid, dir: &Path) -> Result<Self> {
        check_sizing(n, &grid)?;
        let path = Self::cache_file(dir, n, &grid);
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(b) = Self::decode(&bytes, n, &grid) {
                return Ok(b);
            }
        }
        let basis = Self::new(n, grid)?;
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, basis.encode())?;
        fs::rename(&tmp, &path)?;
        Ok(basis)
    }
}
