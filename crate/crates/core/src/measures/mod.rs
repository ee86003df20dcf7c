//! Numerical spectral measures from Jacobi parameters.
//!
//! Finite data is handled by a tridiagonal eigen-solve. Eventually periodic
//! data is evaluated through the continued fraction whose tail is the fixed
//! point of the cycle's composed Möbius map; the branch is selected by the
//! Herglotz condition in the upper half-plane and by attraction on the real
//! axis off the continuous spectrum.

pub mod quad;
pub mod tridiag;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{JacobiParams, Tail};
use crate::rational::to_f64;

pub use quad::{gauss_legendre, integrate_interval};
pub use tridiag::eigen_first_components;

/// Atoms with mass below this are reported as absent.
pub const ATOM_MASS_FLOOR: f64 = 1e-10;

/// How the ε ↓ 0 limit of the Stieltjes inversion is taken.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsSchedule {
    /// Evaluate at the given ε values and extrapolate polynomially to 0.
    Richardson(Vec<f64>),
    /// Evaluate the boundary value G(x + i0) directly from the tail branch.
    BoundaryValue,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule::Richardson(vec![1e-3, 1e-4, 1e-5])
    }
}

/// Jacobi data converted to floats once.
#[derive(Clone, Debug)]
struct FloatJacobi {
    alpha: Vec<f64>,
    omega: Vec<f64>,
    tail: Tail,
}

impl FloatJacobi {
    fn new(j: &JacobiParams) -> Self {
        FloatJacobi {
            alpha: j.alpha().iter().map(to_f64).collect(),
            omega: j.omega().iter().map(to_f64).collect(),
            tail: j.tail(),
        }
    }

    fn finite_size(&self) -> usize {
        match self.tail {
            Tail::Finite => self.alpha.len(),
            _ => self.alpha.len().min(self.omega.len() + 1),
        }
    }

    fn periodic(&self) -> Option<(usize, usize)> {
        match self.tail {
            Tail::Periodic { preperiod, period } => Some((preperiod, period)),
            _ => None,
        }
    }

    /// Gershgorin bound on the spectrum.
    fn spectral_bound(&self) -> f64 {
        let n = self.alpha.len();
        let (rows, idx): (usize, Box<dyn Fn(usize) -> usize>) = match self.tail {
            Tail::Periodic { preperiod, period } => (
                n + period,
                Box::new(move |k| if k < n { k } else { preperiod + (k - preperiod) % period }),
            ),
            _ => (n, Box::new(|k| k)),
        };
        let w = |k: usize| -> f64 {
            if rows > n || k < n {
                self.omega.get(idx(k)).map_or(0.0, |w| w.sqrt())
            } else {
                0.0
            }
        };
        // Gershgorin over the rows up to one full cycle past the stored data
        (0..rows)
            .map(|k| self.alpha[idx(k)].abs() + w(k) + if k > 0 { w(k - 1) } else { 0.0 })
            .fold(0.0, f64::max)
    }

    /// Product of the cycle's Möbius matrices [[0,1],[−ω, z−α]].
    fn cycle_matrix(&self, z: Complex64) -> [Complex64; 4] {
        let (pre, per) = self.periodic().expect("periodic tail");
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut m = [one, zero, zero, one];
        for k in pre..pre + per {
            let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
            let w = Complex64::new(-self.omega[k], 0.0);
            let s = z - self.alpha[k];
            m = [b * w, a + b * s, d * w, c + d * s];
            let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if scale > 1e100 {
                m.iter_mut().for_each(|v| *v /= scale);
            }
        }
        m
    }
}

/// Homogeneous pair (p, q) with value p / q.
type Pair = (Complex64, Complex64);

fn normalize(p: Pair) -> Pair {
    let s = p.0.norm().max(p.1.norm());
    if s > 0.0 && s.is_finite() {
        (p.0 / s, p.1 / s)
    } else {
        p
    }
}

/// Eigenvector of a 2×2 matrix for eigenvalue λ, as a homogeneous pair.
fn eigvec(m: &[Complex64; 4], lambda: Complex64) -> Pair {
    let v1 = (m[1], lambda - m[0]);
    let v2 = (lambda - m[3], m[2]);
    let n1 = v1.0.norm() + v1.1.norm();
    let n2 = v2.0.norm() + v2.1.norm();
    normalize(if n1 >= n2 { v1 } else { v2 })
}

/// Sign of Im(p/q) computed without division.
fn im_sign(p: Pair) -> f64 {
    (p.0 * p.1.conj()).im
}

fn tail_fixed_point(fj: &FloatJacobi, z: Complex64) -> Result<Pair> {
    let m = fj.cycle_matrix(z);
    let tr = m[0] + m[3];
    let det = m[0] * m[3] - m[1] * m[2];
    // (m₀ − m₃)² + 4m₁m₂ equals tr² − 4det without the cancellation near a
    // closed gap, where both terms are large and their difference is O(x²)
    let disc = ((m[0] - m[3]) * (m[0] - m[3]) + 4.0 * m[1] * m[2]).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    let (c1, c2) = (eigvec(&m, l1), eigvec(&m, l2));
    let scale = tr.norm().max(det.norm().sqrt()).max(1e-300);
    let dominant = if l1.norm() >= l2.norm() { c1 } else { c2 };
    let herglotz = |c: Pair| im_sign(c) / (c.0.norm() * c.1.norm()).max(1e-300);
    let tol = 1e-12;
    if z.im > 0.0 {
        let (h1, h2) = (herglotz(c1), herglotz(c2));
        return match (h1 < tol, h2 < tol) {
            (true, false) => Ok(c1),
            (false, true) => Ok(c2),
            (true, true) => Ok(if h1 <= h2 { c1 } else { c2 }),
            (false, false) => Err(Error::BranchAmbiguity { re: z.re, im: z.im }),
        };
    }
    // Real z: inside a band the roots are complex conjugate; take the one
    // matching the limit from the upper half-plane.
    if disc.norm() > 1e-12 * scale && (l1.norm() - l2.norm()).abs() <= 1e-12 * scale {
        return Ok(if herglotz(c1) <= herglotz(c2) { c1 } else { c2 });
    }
    Ok(dominant)
}

/// Evaluates the homogeneous pair of the full continued fraction at z.
fn cauchy_pair(fj: &FloatJacobi, z: Complex64) -> Result<Pair> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let (start, mut pair) = match fj.periodic() {
        Some((pre, _)) => (pre, tail_fixed_point(fj, z)?),
        None => (fj.finite_size(), (zero, one)),
    };
    for k in (0..start).rev() {
        let w = fj.omega.get(k).copied().unwrap_or(0.0);
        let (p, q) = pair;
        pair = normalize((q, (z - fj.alpha[k]) * q - w * p));
    }
    Ok(pair)
}

/// Cauchy transform G(z) = ∫ dμ(x) / (z − x).
pub fn eval_cauchy(j: &JacobiParams, z: Complex64) -> Result<Complex64> {
    let (p, q) = cauchy_pair(&FloatJacobi::new(j), z)?;
    Ok(p / q)
}

fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

fn density_float(fj: &FloatJacobi, x: f64, schedule: &EpsSchedule) -> Result<f64> {
    if fj.periodic().is_none() {
        return Ok(0.0);
    }
    let value = match schedule {
        EpsSchedule::BoundaryValue => {
            let (p, q) = cauchy_pair(fj, Complex64::new(x, 0.0))?;
            -(p / q).im / std::f64::consts::PI
        }
        EpsSchedule::Richardson(eps) => {
            if eps.is_empty() || eps.iter().any(|e| *e <= 0.0) {
                return Err(Error::InvalidParameter("epsilon schedule must be positive".into()));
            }
            let ys = eps
                .iter()
                .map(|&e| {
                    let (p, q) = cauchy_pair(fj, Complex64::new(x, e))?;
                    Ok(-(p / q).im / std::f64::consts::PI)
                })
                .collect::<Result<Vec<f64>>>()?;
            neville_at_zero(eps, &ys)
        }
    };
    Ok(if value.is_finite() { value.max(0.0) } else { 0.0 })
}

/// Density of the absolutely continuous part by Stieltjes inversion. Finite
/// and truncated data are purely atomic and give 0.
pub fn density(j: &JacobiParams, x: f64, schedule: &EpsSchedule) -> Result<f64> {
    density_float(&FloatJacobi::new(j), x, schedule)
}

/// Real x where the tail discriminant tr² − 4·det of the cycle is negative.
fn band_indicator(fj: &FloatJacobi, x: f64) -> f64 {
    let m = fj.cycle_matrix(Complex64::new(x, 0.0));
    ((m[0] - m[3]) * (m[0] - m[3]) + 4.0 * m[1] * m[2]).re
}

fn bisect(f: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> f64 {
    // f(lo) is false, f(hi) is true
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn merge_intervals(mut iv: Vec<[f64; 2]>, gap: f64) -> Vec<[f64; 2]> {
    iv.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut out: Vec<[f64; 2]> = Vec::new();
    for i in iv {
        match out.last_mut() {
            Some(last) if i[0] - last[1] <= gap => last[1] = last[1].max(i[1]),
            _ => out.push(i),
        }
    }
    out
}

fn band_intervals(fj: &FloatJacobi) -> Vec<[f64; 2]> {
    const GRID: usize = 20_000;
    let b = fj.spectral_bound() + 1.0;
    let step = 2.0 * b / GRID as f64;
    let inside = |x: f64| band_indicator(fj, x) < 0.0;
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut prev = -b;
    for i in 0..=GRID {
        let x = -b + step * i as f64;
        let now = inside(x);
        match (start, now) {
            (None, true) => start = Some(bisect(inside, prev, x)),
            (Some(s), false) => {
                out.push([s, bisect(|y| !inside(y), prev, x)]);
                start = None;
            }
            _ => {}
        }
        prev = x;
    }
    if let Some(s) = start {
        out.push([s, b]);
    }
    let scale = b.max(1.0);
    let merged = merge_intervals(out, 1e-9 * scale);
    // keep bands carrying density (a band may be invisible to the root vector)
    merged
        .into_iter()
        .filter(|iv| {
            (1..8).any(|k| {
                let x = iv[0] + (iv[1] - iv[0]) * k as f64 / 8.0;
                density_float(fj, x, &EpsSchedule::BoundaryValue).is_ok_and(|d| d > 1e-12)
            })
        })
        .collect()
}

/// Support of the measure as a list of closed intervals: the eigenvalue
/// hull for finite data, the bands of the periodic tail otherwise.
pub fn support(j: &JacobiParams) -> Vec<[f64; 2]> {
    let fj = FloatJacobi::new(j);
    match fj.periodic() {
        None => {
            let eig = finite_eigen(&fj);
            vec![[eig[0].0, eig[eig.len() - 1].0]]
        }
        Some(_) => band_intervals(&fj),
    }
}

fn finite_eigen(fj: &FloatJacobi) -> Vec<(f64, f64)> {
    let n = fj.finite_size();
    let off: Vec<f64> = fj.omega[..n.saturating_sub(1)].iter().map(|w| w.sqrt()).collect();
    eigen_first_components(&fj.alpha[..n], &off)
}

fn atom_mass(fj: &FloatJacobi, a: f64, dist: f64) -> Result<f64> {
    let e1 = (dist / 100.0).min(1e-3);
    let e2 = e1 / 10.0;
    let m = |e: f64| -> Result<f64> {
        let (p, q) = cauchy_pair(fj, Complex64::new(a, e))?;
        Ok(-e * (p / q).im)
    };
    let (m1, m2) = (m(e1)?, m(e2)?);
    Ok((100.0 * m2 - m1) / 99.0)
}

fn periodic_atoms(fj: &FloatJacobi, bands: &[[f64; 2]]) -> Result<Vec<(f64, f64)>> {
    const SAMPLES: usize = 4000;
    let b = fj.spectral_bound() + 1.0;
    // 1/G as a real function on the gaps; atoms are its upward zero crossings
    let recip = |x: f64| -> Option<f64> {
        let (p, q) = cauchy_pair(fj, Complex64::new(x, 0.0)).ok()?;
        let d = q / p;
        d.re.is_finite().then_some(d.re)
    };
    let mut gaps = Vec::new();
    let mut lo = -b;
    for iv in bands {
        gaps.push([lo, iv[0]]);
        lo = iv[1];
    }
    gaps.push([lo, b]);
    let mut atoms = Vec::new();
    for [g0, g1] in gaps {
        if g1 - g0 <= 1e-12 {
            continue;
        }
        let mut xs: Vec<f64> = (1..SAMPLES)
            .map(|i| g0 + (g1 - g0) * i as f64 / SAMPLES as f64)
            .collect();
        for k in 3..=12 {
            let d = 10f64.powi(-k) * (g1 - g0).max(1.0);
            if d < 0.5 * (g1 - g0) {
                xs.push(g0 + d);
                xs.push(g1 - d);
            }
        }
        xs.sort_by(f64::total_cmp);
        for w in xs.windows(2) {
            let (Some(d0), Some(d1)) = (recip(w[0]), recip(w[1])) else {
                continue;
            };
            let root = if d0 == 0.0 {
                w[0]
            } else if d0 < 0.0 && d1 >= 0.0 {
                bisect(|x| recip(x).is_none_or(|d| d >= 0.0), w[0], w[1])
            } else {
                continue;
            };
            if atoms.iter().any(|(x, _): &(f64, f64)| (x - root).abs() < 1e-9) {
                continue;
            }
            let dist = bands
                .iter()
                .flat_map(|iv| [(iv[0] - root).abs(), (iv[1] - root).abs()])
                .fold(1.0, f64::min);
            let mass = atom_mass(fj, root, dist)?;
            if mass >= ATOM_MASS_FLOOR {
                atoms.push((root, mass));
            }
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(atoms)
}

/// Atoms (location, mass) in increasing order of location.
pub fn find_atoms(j: &JacobiParams) -> Result<Vec<(f64, f64)>> {
    let fj = FloatJacobi::new(j);
    match fj.periodic() {
        None => Ok(finite_eigen(&fj).into_iter().filter(|a| a.1 >= ATOM_MASS_FLOOR).collect()),
        Some(_) => {
            let bands = band_intervals(&fj);
            periodic_atoms(&fj, &bands)
        }
    }
}

/// A spectral measure split into atoms and an absolutely continuous part.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    jacobi: JacobiParams,
    float: FloatJacobi,
    atoms: Vec<(f64, f64)>,
    intervals: Vec<[f64; 2]>,
}

/// Serialized form; `grid` names an optional density CSV written alongside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub atoms: Vec<[f64; 2]>,
    pub intervals: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<String>,
}

impl SpectralMeasure {
    pub fn from_jacobi(j: &JacobiParams) -> Result<Self> {
        let float = FloatJacobi::new(j);
        let (atoms, intervals) = match float.periodic() {
            None => (find_atoms(j)?, Vec::new()),
            Some(_) => {
                let bands = band_intervals(&float);
                (periodic_atoms(&float, &bands)?, bands)
            }
        };
        Ok(SpectralMeasure {
            jacobi: j.clone(),
            float,
            atoms,
            intervals,
        })
    }

    pub fn jacobi(&self) -> &JacobiParams {
        &self.jacobi
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Intervals carrying the absolutely continuous part.
    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }

    /// Closed support: continuous bands plus atoms, or the eigenvalue hull.
    pub fn support(&self) -> Vec<[f64; 2]> {
        if self.float.periodic().is_none() {
            return support(&self.jacobi);
        }
        self.intervals.clone()
    }

    pub fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        let (p, q) = cauchy_pair(&self.float, z)?;
        Ok(p / q)
    }

    /// Density of the absolutely continuous part (boundary value).
    pub fn density(&self, x: f64) -> f64 {
        if !self.intervals.iter().any(|iv| iv[0] <= x && x <= iv[1]) {
            return 0.0;
        }
        density_float(&self.float, x, &EpsSchedule::BoundaryValue).unwrap_or(0.0)
    }

    pub fn density_with(&self, x: f64, schedule: &EpsSchedule) -> Result<f64> {
        density_float(&self.float, x, schedule)
    }

    pub fn continuous_mass(&self) -> f64 {
        self.integrate(|_| 1.0) - self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// ∫ f dμ over atoms and density.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|(x, w)| w * f(*x)).sum();
        let cont: f64 = self
            .intervals
            .iter()
            .map(|iv| integrate_interval(|x| f(x) * self.density(x), iv[0], iv[1]))
            .sum();
        atoms + cont
    }

    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn moment(&self, n: u32) -> f64 {
        self.integrate(|x| x.powi(n as i32))
    }

    /// (x, density) rows on a uniform grid covering the support.
    pub fn density_grid(&self, points: usize) -> Vec<(f64, f64)> {
        let sup = self.support();
        let lo = sup.iter().map(|iv| iv[0]).chain(self.atoms.iter().map(|a| a.0)).fold(f64::INFINITY, f64::min);
        let hi = sup.iter().map(|iv| iv[1]).chain(self.atoms.iter().map(|a| a.0)).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || points < 2 {
            return Vec::new();
        }
        (0..points)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                (x, self.density(x))
            })
            .collect()
    }

    pub fn to_json(&self, grid: Option<String>) -> MeasureJson {
        MeasureJson {
            atoms: self.atoms.iter().map(|&(x, w)| [x, w]).collect(),
            intervals: self.intervals.clone(),
            grid,
        }
    }
}

/// CSV with an `x,density` header.
pub fn grid_to_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("x,density\n");
    for (x, d) in rows {
        s.push_str(&format!("{x},{d}\n"));
    }
    s
}
