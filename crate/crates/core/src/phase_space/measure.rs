use super::grid::{symplectic_fourier, PhaseFunction, PhaseGrid};
use super::{symplectic_form, PhasePoint};
use crate::error::{invalid, QhaError, Result};
use crate::numerics::{cis, pairwise_sum_c};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Dirac,
    AtomList,
    Circle,
    Cantor,
    Reweighted,
}

/// Finite weighted atom list standing in for a compactly supported measure.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<PhasePoint>,
    weights: Vec<Complex64>,
    kind: MeasureKind,
    center: PhasePoint,
    radius_bound: f64,
}

impl DiscreteMeasure {
    /// Validating constructor; `radius_bound` may exceed the true spread but
    /// not undercut it (a relative slack of 1e-12 absorbs trigonometric
    /// rounding of circle nodes).
    pub fn new(atoms: Vec<PhasePoint>, weights: Vec<Complex64>, kind: MeasureKind, center: PhasePoint, radius_bound: f64) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(invalid(format!("measure needs equal, nonzero atom and weight counts (got {} and {})", atoms.len(), weights.len())));
        }
        if weights.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(QhaError::NonFinite("measure weights"));
        }
        let tv: f64 = weights.iter().map(|w| w.norm()).sum();
        if !(tv > 0.0 && tv.is_finite()) {
            return Err(invalid("measure has zero total variation"));
        }
        if !(radius_bound >= 0.0 && radius_bound.is_finite()) {
            return Err(invalid(format!("radius bound must be finite and >= 0, got {radius_bound}")));
        }
        let spread = atoms.iter().map(|a| (*a - center).norm()).fold(0.0, f64::max);
        if spread > radius_bound * (1.0 + 1e-12) + 1e-300 {
            return Err(invalid(format!("atoms reach {spread}, beyond radius bound {radius_bound}")));
        }
        Ok(Self { atoms, weights, kind, center, radius_bound })
    }

    /// Atom list with tight metadata: bounding-box center and the largest
    /// distance from it.
    pub fn from_atoms(atoms: Vec<PhasePoint>, weights: Vec<Complex64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("measure needs at least one atom"));
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for a in &atoms {
            x0 = x0.min(a.x());
            x1 = x1.max(a.x());
            y0 = y0.min(a.xi());
            y1 = y1.max(a.xi());
        }
        let center = PhasePoint::raw(0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let r = atoms.iter().map(|a| (*a - center).norm()).fold(0.0, f64::max);
        Self::new(atoms, weights, MeasureKind::AtomList, center, r)
    }

    pub fn atoms(&self) -> &[PhasePoint] {
        &self.atoms
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn center(&self) -> PhasePoint {
        self.center
    }

    pub fn radius_bound(&self) -> f64 {
        self.radius_bound
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Σ|w_j|.
    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum()
    }

    /// `(Σ |w_j| |G_j|^q)^{1/q}`, with the essential sup over charged atoms
    /// for `q = ∞`.
    pub fn lq_norm(&self, g: &[Complex64], q: f64) -> Result<f64> {
        if g.len() != self.len() {
            return Err(QhaError::Dimension(format!("{} values for {} atoms", g.len(), self.len())));
        }
        if q.is_infinite() {
            return Ok(self.weights.iter().zip(g).filter(|(w, _)| w.norm() > 0.0).map(|(_, v)| v.norm()).fold(0.0, f64::max));
        }
        let s: f64 = self.weights.iter().zip(g).map(|(w, v)| w.norm() * v.norm().powf(q)).sum();
        Ok(s.powf(1.0 / q))
    }

    /// The measure `G dμ`.
    pub fn reweighted_by(&self, g: &[Complex64]) -> Result<DiscreteMeasure> {
        if g.len() != self.len() {
            return Err(QhaError::Dimension(format!("{} values for {} atoms", g.len(), self.len())));
        }
        let weights = self.weights.iter().zip(g).map(|(w, v)| w * v).collect();
        DiscreteMeasure::new(self.atoms.clone(), weights, self.kind, self.center, self.radius_bound)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub x: f64,
    pub xi: f64,
    pub re_w: f64,
    pub im_w: f64,
}

fn default_mass() -> f64 {
    1.0
}

/// JSON-expressible measure description, e.g.
/// `{"kind":"circle","radius":1.0,"nodes":256,"mass":1.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    Dirac {
        #[serde(default)]
        x: f64,
        #[serde(default)]
        xi: f64,
    },
    Atoms {
        atoms: Vec<AtomRecord>,
    },
    Circle {
        radius: f64,
        nodes: usize,
        #[serde(default = "default_mass")]
        mass: f64,
    },
    Cantor {
        level: u32,
    },
    Reweight {
        base: Box<MeasureSpec>,
        #[serde(default)]
        x: f64,
        #[serde(default)]
        xi: f64,
    },
}

impl MeasureSpec {
    pub fn circle(radius: f64, nodes: usize) -> Self {
        MeasureSpec::Circle { radius, nodes, mass: 1.0 }
    }
}

pub fn build_measure(spec: &MeasureSpec) -> Result<DiscreteMeasure> {
    match spec {
        MeasureSpec::Dirac { x, xi } => {
            let z = PhasePoint::new(*x, *xi)?;
            DiscreteMeasure::new(vec![z], vec![Complex64::new(1.0, 0.0)], MeasureKind::Dirac, z, 0.0)
        }
        MeasureSpec::Atoms { atoms } => {
            let pts = atoms.iter().map(|a| PhasePoint::new(a.x, a.xi)).collect::<Result<Vec<_>>>()?;
            let w = atoms.iter().map(|a| Complex64::new(a.re_w, a.im_w)).collect();
            DiscreteMeasure::from_atoms(pts, w)
        }
        MeasureSpec::Circle { radius, nodes, mass } => circle(*radius, *nodes, *mass),
        MeasureSpec::Cantor { level } => cantor(*level),
        MeasureSpec::Reweight { base, x, xi } => {
            let base = build_measure(base)?;
            reweight(&base, PhasePoint::new(*x, *xi)?)
        }
    }
}

fn circle(radius: f64, nodes: usize, mass: f64) -> Result<DiscreteMeasure> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("circle radius must be positive, got {radius}")));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid(format!("circle mass must be positive, got {mass}")));
    }
    if nodes < 8 {
        return Err(invalid(format!("circle needs at least 8 nodes, got {nodes}")));
    }
    let atoms = (0..nodes)
        .map(|j| {
            let (s, c) = (2.0 * PI * j as f64 / nodes as f64).sin_cos();
            PhasePoint::raw(radius * c, radius * s)
        })
        .collect();
    let w = Complex64::new(mass / nodes as f64, 0.0);
    DiscreteMeasure::new(atoms, vec![w; nodes], MeasureKind::Circle, PhasePoint::ORIGIN, radius)
}

/// Centers of the level-k middle-thirds intervals of [0, 1], shifted to be
/// symmetric about 0.
fn cantor_centers(level: u32) -> Vec<f64> {
    let width = 3f64.powi(-(level as i32));
    (0..1usize << level)
        .map(|bits| {
            let mut left = 0.0;
            let mut scale = 1.0;
            for i in (0..level).rev() {
                scale /= 3.0;
                if (bits >> i) & 1 == 1 {
                    left += 2.0 * scale;
                }
            }
            left + 0.5 * width - 0.5
        })
        .collect()
}

fn cantor(level: u32) -> Result<DiscreteMeasure> {
    if level > 10 {
        return Err(invalid(format!("cantor level {level} is too deep (max 10)")));
    }
    let c = cantor_centers(level);
    let n = c.len();
    let w = Complex64::new(1.0 / (n * n) as f64, 0.0);
    let atoms: Vec<PhasePoint> = c.iter().flat_map(|&x| c.iter().map(move |&y| PhasePoint::raw(x, y))).collect();
    let r = atoms.iter().map(|a| a.norm()).fold(0.0, f64::max);
    DiscreteMeasure::new(atoms, vec![w; n * n], MeasureKind::Cantor, PhasePoint::ORIGIN, r)
}

/// `dν = e^{−π|z−z_0|²/2} dμ`, centered at `z0`.
pub(crate) fn reweight(base: &DiscreteMeasure, z0: PhasePoint) -> Result<DiscreteMeasure> {
    let weights = base.atoms.iter().zip(&base.weights).map(|(a, w)| w * (-PI * (*a - z0).norm_sqr() / 2.0).exp()).collect();
    let r = base.atoms.iter().map(|a| (*a - z0).norm()).fold(0.0, f64::max);
    DiscreteMeasure::new(base.atoms.clone(), weights, MeasureKind::Reweighted, z0, r)
}

/// Σ_j w_j e^{−2πiσ(ζ, z_j)} for each target ζ.
pub fn fourier_of_measure(mu: &DiscreteMeasure, targets: &[PhasePoint]) -> Vec<Complex64> {
    let mut terms = vec![Complex64::new(0.0, 0.0); mu.len()];
    targets
        .iter()
        .map(|&zeta| {
            for (t, (a, w)) in terms.iter_mut().zip(mu.atoms.iter().zip(&mu.weights)) {
                *t = w * cis(-2.0 * PI * symplectic_form(zeta, *a));
            }
            pairwise_sum_c(&terms)
        })
        .collect()
}

/// Both sides of ∫F_σ(μ) dν = ∫F_σ(ν)(−ζ) dμ(ζ), summed in opposite orders.
pub fn parseval_measures(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> (Complex64, Complex64) {
    let fmu = fourier_of_measure(mu, &nu.atoms);
    let lhs_terms: Vec<Complex64> = fmu.iter().zip(&nu.weights).map(|(f, w)| f * w).collect();
    let neg: Vec<PhasePoint> = mu.atoms.iter().map(|a| -*a).collect();
    let fnu = fourier_of_measure(nu, &neg);
    let rhs_terms: Vec<Complex64> = fnu.iter().zip(&mu.weights).map(|(f, w)| f * w).collect();
    (pairwise_sum_c(&lhs_terms), pairwise_sum_c(&rhs_terms))
}

pub fn write_atoms_csv<W: Write>(mu: &DiscreteMeasure, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (a, wt) in mu.atoms.iter().zip(&mu.weights) {
        w.serialize(AtomRecord { x: a.x(), xi: a.xi(), re_w: wt.re, im_w: wt.im })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an atom list; metadata is recomputed tightly (kind atom-list).
pub fn read_atoms_csv<R: Read>(input: R) -> Result<DiscreteMeasure> {
    let mut r = csv::Reader::from_reader(input);
    let records = r.deserialize::<AtomRecord>().collect::<std::result::Result<Vec<_>, _>>()?;
    build_measure(&MeasureSpec::Atoms { atoms: records })
}

/// Constants of the Gaussian reweighting equivalence between μ and
/// ν = e^{−π|z−z_0|²/2}μ. `gauss` bounds ‖F_σν‖ by ‖F_σμ‖ and `bump` bounds
/// the reverse direction; both are L¹ norms of symplectic Fourier transforms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReweightConstants {
    pub gauss: f64,
    pub bump: f64,
}

fn smooth_step(t: f64) -> f64 {
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let a = f(t);
    let b = f(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Numerical evaluation of the reweighting constants on a grid of
/// `points` nodes per axis large enough to hold the bump.
pub fn reweight_constants(mu: &DiscreteMeasure, z0: PhasePoint, points: usize) -> Result<ReweightConstants> {
    // Ψ = 1 on B(z0, R), 0 off B(z0, 2R), R covering the support.
    let r = mu.atoms.iter().map(|a| (*a - z0).norm()).fold(0.0, f64::max).max(0.25);
    let half = (2.0 * r + z0.norm() + 2.0).ceil();
    let grid = PhaseGrid::new(half, points)?;
    let gauss = PhaseFunction::from_real_fn(grid, |z| (-PI * (z - z0).norm_sqr() / 2.0).exp());
    let bump = PhaseFunction::from_real_fn(grid, |z| {
        let d = (z - z0).norm();
        let psi = 1.0 - smooth_step((d - r) / r);
        psi * (PI * d * d / 2.0).exp()
    });
    let l1 = |f: &PhaseFunction| -> Result<f64> { Ok(symplectic_fourier(f)?.lp_norm(1.0)) };
    Ok(ReweightConstants { gauss: l1(&gauss)?, bump: l1(&bump)? })
}
