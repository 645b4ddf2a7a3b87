use super::matrix::OperatorMatrix;
use super::transforms::{check_basis, check_tau, low_rank_factors, rank_one, tau_factor};
use crate::error::Result;
use crate::hermite_rep::{displacement_entries, Checked, HermiteBasis, WaveFunction};
use crate::phase_space::{symplectic_fourier, PhaseFunction, PhasePoint};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Nodes whose weight is below this fraction of the largest one are
/// skipped; their total contribution is far below double rounding.
const NODE_CUTOFF: f64 = 1e-17;

/// Fixed node-chunk size for partial sums. Partials are combined in chunk
/// order, so results do not depend on the worker count.
const CHUNK: usize = 512;

const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// Content-addressed LRU cache of ρ(z) blocks keyed by (N, bits of z).
pub struct RhoCache {
    capacity: usize,
    inner: Mutex<CacheState>,
}

#[derive(Default)]
struct CacheState {
    map: HashMap<(usize, u64, u64), (Arc<Vec<Complex64>>, u64)>,
    clock: u64,
    hits: u64,
    misses: u64,
}

impl RhoCache {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, inner: Mutex::new(CacheState::default()) }
    }

    /// Column-major ρ(z) block of size `n`.
    pub fn get(&self, z: PhasePoint, n: usize) -> Arc<Vec<Complex64>> {
        let key = (n, z.x().to_bits(), z.xi().to_bits());
        {
            let mut st = self.inner.lock().unwrap();
            st.clock += 1;
            let now = st.clock;
            if let Some(entry) = st.map.get_mut(&key) {
                entry.1 = now;
                let v = entry.0.clone();
                st.hits += 1;
                return v;
            }
            st.misses += 1;
        }
        let block = Arc::new(displacement_entries(z, n));
        if self.capacity > 0 {
            let mut st = self.inner.lock().unwrap();
            if st.map.len() >= self.capacity {
                if let Some(old) = st.map.iter().min_by_key(|(_, v)| v.1).map(|(k, _)| *k) {
                    st.map.remove(&old);
                }
            }
            let now = st.clock;
            st.map.insert(key, (block.clone(), now));
        }
        block
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (hits, misses) so far.
    pub fn stats(&self) -> (u64, u64) {
        let st = self.inner.lock().unwrap();
        (st.hits, st.misses)
    }
}

/// Quadrature-based quantizations against one basis, optionally sharing a
/// ρ cache across calls.
pub struct Quantizer<'a> {
    basis: &'a HermiteBasis,
    cache: Option<RhoCache>,
}

impl<'a> Quantizer<'a> {
    pub fn new(basis: &'a HermiteBasis) -> Self {
        Self { basis, cache: None }
    }

    pub fn with_cache(basis: &'a HermiteBasis, capacity: usize) -> Self {
        Self { basis, cache: Some(RhoCache::new(capacity)) }
    }

    pub fn cache(&self) -> Option<&RhoCache> {
        self.cache.as_ref()
    }

    fn rho(&self, z: PhasePoint) -> Arc<Vec<Complex64>> {
        match &self.cache {
            Some(c) => c.get(z, self.basis.size()),
            None => Arc::new(displacement_entries(z, self.basis.size())),
        }
    }

    /// `Σ_k c_k ρ(z_k)` for each coefficient column, in deterministic order.
    fn synthesize(&self, nodes: &[PhasePoint], coeffs: &[Vec<Complex64>]) -> Vec<DMatrix<Complex64>> {
        let n = self.basis.size();
        let outputs = coeffs.len();
        let partials: Vec<Vec<DMatrix<Complex64>>> = (0..nodes.len())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = vec![DMatrix::<Complex64>::zeros(n, n); outputs];
                for &k in chunk {
                    let rho = self.rho(nodes[k]);
                    for (a, c) in acc.iter_mut().zip(coeffs) {
                        let w = c[k];
                        if w == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for (dst, r) in a.as_mut_slice().iter_mut().zip(rho.iter()) {
                            *dst += w * r;
                        }
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![DMatrix::<Complex64>::zeros(n, n); outputs];
        for part in partials {
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        total
    }

    /// Weyl quantization `L_a = ∬F_σ(a)(z) ρ(z) dz`.
    pub fn weyl(&self, a: &PhaseFunction) -> Result<Checked<OperatorMatrix>> {
        Ok(self.weyl_many(std::slice::from_ref(a))?.remove(0))
    }

    /// Weyl quantization of several symbols on one grid, sharing ρ(z_k).
    pub fn weyl_many(&self, symbols: &[PhaseFunction]) -> Result<Vec<Checked<OperatorMatrix>>> {
        self.tau_many(symbols, None)
    }

    /// τ-quantization: node weights pick up `e^{−πi(2τ−1)xξ}`.
    pub fn tau(&self, a: &PhaseFunction, tau: f64) -> Result<Checked<OperatorMatrix>> {
        check_tau(tau)?;
        Ok(self.tau_many(std::slice::from_ref(a), Some(tau))?.remove(0))
    }

    fn tau_many(&self, symbols: &[PhaseFunction], tau: Option<f64>) -> Result<Vec<Checked<OperatorMatrix>>> {
        if symbols.is_empty() {
            return Ok(Vec::new());
        }
        let grid = *symbols[0].grid();
        if symbols.iter().any(|s| *s.grid() != grid) {
            return Err(crate::error::invalid("symbols must share one grid"));
        }
        // τ = 1/2 is the Weyl case exactly; no factor is applied.
        let tau = tau.filter(|t| *t != 0.5);
        let h2 = grid.spacing().powi(2);
        let transforms: Vec<PhaseFunction> = symbols.iter().map(symplectic_fourier).collect::<Result<_>>()?;
        let leaks: Vec<f64> = transforms.iter().map(|t| t.boundary_max()).collect();
        let m = grid.points();
        let maxes: Vec<f64> = transforms.iter().map(|t| t.max_abs()).collect();
        let mut nodes = Vec::new();
        let mut coeffs: Vec<Vec<Complex64>> = vec![Vec::new(); symbols.len()];
        for i in 0..m {
            for j in 0..m {
                let keep = transforms.iter().zip(&maxes).any(|(t, mx)| t.at(i, j).norm() > NODE_CUTOFF * mx);
                if !keep {
                    continue;
                }
                let z = grid.point(i, j);
                nodes.push(z);
                let f = tau.map(|t| tau_factor(z, t));
                for (c, t) in coeffs.iter_mut().zip(&transforms) {
                    let v = t.at(i, j) * h2;
                    c.push(match f {
                        Some(f) => v * f,
                        None => v,
                    });
                }
            }
        }
        let mats = self.synthesize(&nodes, &coeffs);
        Ok(mats
            .into_iter()
            .zip(leaks)
            .map(|(m, leak)| Checked {
                value: OperatorMatrix::from_parts(m, self.basis.fingerprint()),
                boundary_leak: leak,
                warning: leak > BOUNDARY_TOLERANCE,
            })
            .collect())
    }

    /// `Σ_j c_j ρ(z_j)` for explicit nodes and weights.
    pub fn combine(&self, nodes: &[PhasePoint], weights: &[Complex64]) -> OperatorMatrix {
        let m = self.synthesize(nodes, &[weights.to_vec()]).remove(0);
        OperatorMatrix::from_parts(m, self.basis.fingerprint())
    }

    /// `F⋆S = ∬F(z) ρ(z) S ρ(−z) dz` by grid quadrature. Low-rank `S` goes
    /// through `ρ(z)(u ⊗ v)ρ(z)* = (ρ(z)u) ⊗ (ρ(z)v)`.
    pub fn conv_fun_op(&self, f: &PhaseFunction, s: &OperatorMatrix) -> Result<Checked<OperatorMatrix>> {
        check_basis(s, self.basis)?;
        let n = self.basis.size();
        let grid = *f.grid();
        let h2 = grid.spacing().powi(2);
        let leak = f.boundary_max();
        let mx = f.max_abs();
        let m = grid.points();
        let mut nodes = Vec::new();
        let mut w = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let v = f.at(i, j);
                if v.norm() > NODE_CUTOFF * mx {
                    nodes.push(grid.point(i, j));
                    w.push(v * h2);
                }
            }
        }
        let factors = low_rank_factors(s, 1e-14);
        let low_rank = 3 * factors.len() < 2 * n;
        let idx: Vec<usize> = (0..nodes.len()).collect();
        let partials: Vec<DMatrix<Complex64>> = idx
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = DMatrix::<Complex64>::zeros(n, n);
                for &k in chunk {
                    let rho = DMatrix::from_vec(n, n, self.rho(nodes[k]).to_vec());
                    if low_rank {
                        for (u, v) in &factors {
                            let ru = &rho * nalgebra::DVector::from_column_slice(u);
                            let rv = &rho * nalgebra::DVector::from_column_slice(v);
                            let ru = ru * w[k];
                            acc += &ru * rv.adjoint();
                        }
                    } else {
                        acc += (&rho * s.entries() * rho.adjoint()) * w[k];
                    }
                }
                acc
            })
            .collect();
        let mut total = DMatrix::<Complex64>::zeros(n, n);
        for p in partials {
            total += p;
        }
        Ok(Checked {
            value: OperatorMatrix::from_parts(total, s.fingerprint().join(self.basis.fingerprint())?),
            boundary_leak: leak,
            warning: leak > BOUNDARY_TOLERANCE,
        })
    }

    /// `A_a^{φ,ψ} = a ⋆ (ψ ⊗ φ)`.
    pub fn localization(&self, a: &PhaseFunction, phi: &WaveFunction, psi: &WaveFunction) -> Result<Checked<OperatorMatrix>> {
        let s = rank_one(psi, phi, self.basis)?;
        self.conv_fun_op(a, &s)
    }
}

pub fn weyl_quantize(a: &PhaseFunction, basis: &HermiteBasis) -> Result<Checked<OperatorMatrix>> {
    Quantizer::new(basis).weyl(a)
}

pub fn weyl_quantize_many(symbols: &[PhaseFunction], basis: &HermiteBasis) -> Result<Vec<Checked<OperatorMatrix>>> {
    Quantizer::new(basis).weyl_many(symbols)
}

pub fn tau_quantize(a: &PhaseFunction, tau: f64, basis: &HermiteBasis) -> Result<Checked<OperatorMatrix>> {
    Quantizer::new(basis).tau(a, tau)
}

pub fn conv_fun_op(f: &PhaseFunction, s: &OperatorMatrix, basis: &HermiteBasis) -> Result<Checked<OperatorMatrix>> {
    Quantizer::new(basis).conv_fun_op(f, s)
}

pub fn localization(a: &PhaseFunction, phi: &WaveFunction, psi: &WaveFunction, basis: &HermiteBasis) -> Result<Checked<OperatorMatrix>> {
    Quantizer::new(basis).localization(a, phi, psi)
}
