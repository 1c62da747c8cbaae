use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::function::{build_f, AntiInvariantFunction, ResidueVector};
use super::lattice::Lattice;
use super::poly::{polynomial_roots, solve3};
use super::quadrature::integrate_path;
use super::{c, EllipticError};
use crate::perm::DisjointSets;

const QUADRATURE_TOL: f64 = 1e-12;
const BASEPOINT: (f64, f64) = (0.1837, 0.2912);
const JITTER: f64 = 0.013;
const MAX_JITTER: u32 = 5;

const RESIDUAL_TOL: f64 = 1e-8;
const QUADRIC_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-8;
const PAIRING_TOL: f64 = 1e-7;
const SEPARATION: f64 = 1e-6;
const ORBIT_MATCH: f64 = 1e-7;

/// Coordinate permutations induced by translation by the three nonzero
/// 2-torsion points.
pub const K_SWAPS: [[usize; 4]; 3] = [[1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];

/// Coordinates on `L`: `x = (a1, a2, a3)` with `a4 = -(a1 + a2 + a3)`.
fn residues_of(x: &[Complex64; 3]) -> ResidueVector {
    [x[0], x[1], x[2], -(x[0] + x[1] + x[2])]
}

fn guard_radius(lat: &Lattice) -> f64 {
    0.05 * lat.tau().im.min(1.0)
}

fn basepoint(lat: &Lattice, k: u32) -> Complex64 {
    let tau = lat.tau();
    let z0 = c(BASEPOINT.0, 0.0) + BASEPOINT.1 * tau;
    z0 + k as f64 * JITTER * (1.0 + tau)
}

fn integrate_squared(f: &AntiInvariantFunction, points: &[Complex64], tol: f64) -> Result<Complex64, EllipticError> {
    let r = integrate_path(
        |z| {
            let v = f.eval(z);
            v * v
        },
        points,
        tol,
    );
    if !r.converged {
        return Err(EllipticError::QuadratureFailed(r.error));
    }
    Ok(r.value)
}

fn tolerance_for(a: &ResidueVector) -> f64 {
    let scale = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    QUADRATURE_TOL * libm::pow(scale.max(1.0), 2.0)
}

fn periods_of(f: &AntiInvariantFunction) -> Result<[Complex64; 2], EllipticError> {
    let lat = f.lattice();
    let guard = guard_radius(lat);
    let tol = tolerance_for(f.residues());
    for k in 0..=MAX_JITTER {
        let z0 = basepoint(lat, k);
        let (e1, e2) = (z0 + 1.0, z0 + lat.tau());
        if f.segment_pole_distance(z0, e1) >= guard && f.segment_pole_distance(z0, e2) >= guard {
            return Ok([integrate_squared(f, &[z0, e1], tol)?, integrate_squared(f, &[z0, e2], tol)?]);
        }
    }
    Err(EllipticError::PathTooCloseToPole)
}

/// `Psi(a) = (integral of f^2 dz over z0 -> z0 + 1, over z0 -> z0 + tau)`.
pub fn period_map(lat: &Lattice, a: &ResidueVector) -> Result<[Complex64; 2], EllipticError> {
    periods_of(&build_f(lat, a)?)
}

/// The two period quadrics as symmetric matrices on the coordinates of `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodForms {
    pub m: [[[Complex64; 3]; 3]; 2],
}

impl PeriodForms {
    pub fn bilinear(&self, j: usize, x: &[Complex64; 3], y: &[Complex64; 3]) -> Complex64 {
        bilinear(&self.m[j], x, y)
    }

    pub fn evaluate(&self, x: &[Complex64; 3]) -> [Complex64; 2] {
        [self.bilinear(0, x, x), self.bilinear(1, x, x)]
    }
}

fn bilinear(m: &[[Complex64; 3]; 3], x: &[Complex64; 3], y: &[Complex64; 3]) -> Complex64 {
    (0..3).map(|i| (0..3).map(|j| x[i] * m[i][j] * y[j]).sum::<Complex64>()).sum()
}

/// Polarization of the period map on the basis `e_i - e_4` of `L`.
pub fn quadratic_forms(lat: &Lattice) -> Result<PeriodForms, EllipticError> {
    let basis: [[Complex64; 3]; 3] =
        core::array::from_fn(|i| core::array::from_fn(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)));
    let diag: Vec<[Complex64; 2]> = basis.iter().map(|u| period_map(lat, &residues_of(u))).collect::<Result<_, _>>()?;
    let mut m = [[[c(0.0, 0.0); 3]; 3]; 2];
    for k in 0..3 {
        for j in 0..2 {
            m[j][k][k] = diag[k][j];
        }
        for l in k + 1..3 {
            let sum: [Complex64; 3] = core::array::from_fn(|i| basis[k][i] + basis[l][i]);
            let s = period_map(lat, &residues_of(&sum))?;
            for j in 0..2 {
                let b = 0.5 * (s[j] - diag[k][j] - diag[l][j]);
                m[j][k][l] = b;
                m[j][l][k] = b;
            }
        }
    }
    Ok(PeriodForms { m })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticSolution {
    /// Residue vector scaled so its largest-modulus entry equals 1.
    pub a: ResidueVector,
    /// `max |Psi_j(a)|`.
    pub residual: f64,
    /// `|sum a_i^2|`.
    pub on_q1_residual: f64,
    pub orbit_id: usize,
}

/// Per-root record kept when the intersection fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootDiagnostic {
    pub parameter: Complex64,
    pub residual: f64,
}

/// Scales `a` so the entry of largest modulus (first on ties) is 1.
pub fn normalize_projective(a: &ResidueVector) -> ResidueVector {
    let k = (0..4).fold(0, |best, i| if a[i].norm() > a[best].norm() { i } else { best });
    let s = a[k];
    core::array::from_fn(|i| if i == k { c(1.0, 0.0) } else { a[i] / s })
}

/// Fubini-Study distance between the points of `P^3` represented by `a`, `b`.
pub fn projective_distance(a: &ResidueVector, b: &ResidueVector) -> f64 {
    let inner: Complex64 = (0..4).map(|i| a[i].conj() * b[i]).sum();
    let na: f64 = libm::sqrt(a.iter().map(|x| x.norm_sqr()).sum::<f64>());
    let nb: f64 = libm::sqrt(b.iter().map(|x| x.norm_sqr()).sum::<f64>());
    libm::acos((inner.norm() / (na * nb)).min(1.0))
}

pub fn apply_swap(a: &ResidueVector, swap: &[usize; 4]) -> ResidueVector {
    core::array::from_fn(|i| a[swap[i]])
}

/// Newton on `(Q1(x), Q2(x), w.x - 1)` with backtracking.
fn newton_on_forms(forms: &PeriodForms, start: [Complex64; 3]) -> Option<[Complex64; 3]> {
    let n2: f64 = start.iter().map(|v| v.norm_sqr()).sum();
    if n2 == 0.0 || !n2.is_finite() {
        return None;
    }
    let w: [Complex64; 3] = core::array::from_fn(|i| start[i].conj() / n2);
    let system = |x: &[Complex64; 3]| {
        let q = forms.evaluate(x);
        [q[0], q[1], (0..3).map(|i| w[i] * x[i]).sum::<Complex64>() - 1.0]
    };
    let norm = |v: &[Complex64; 3]| libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
    let mut x = start;
    let mut fx = system(&x);
    for _ in 0..60 {
        if norm(&fx) < 1e-15 {
            break;
        }
        let jac: [[Complex64; 3]; 3] = [
            core::array::from_fn(|k| 2.0 * (0..3).map(|i| forms.m[0][k][i] * x[i]).sum::<Complex64>()),
            core::array::from_fn(|k| 2.0 * (0..3).map(|i| forms.m[1][k][i] * x[i]).sum::<Complex64>()),
            w,
        ];
        let step = solve3(jac, fx)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: [Complex64; 3] = core::array::from_fn(|i| x[i] - lambda * step[i]);
            let ft = system(&trial);
            if norm(&ft) < norm(&fx) {
                x = trial;
                fx = ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let scale = norm(&x).max(1.0);
    (norm(&fx) < 1e-10 * scale * scale).then_some(x)
}

/// Gauss-Newton refinement against the directly integrated periods.
fn refine_with_periods(
    lat: &Lattice,
    forms: &PeriodForms,
    x: [Complex64; 3],
) -> Result<(ResidueVector, f64), EllipticError> {
    let mut a = normalize_projective(&residues_of(&x));
    let mut psi = period_map(lat, &a)?;
    let mut residual = psi[0].norm().max(psi[1].norm());
    for _ in 0..2 {
        let y = [a[0], a[1], a[2]];
        let n2: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        let w: [Complex64; 3] = core::array::from_fn(|i| y[i].conj() / n2);
        let jac: [[Complex64; 3]; 3] = [
            core::array::from_fn(|k| 2.0 * (0..3).map(|i| forms.m[0][k][i] * y[i]).sum::<Complex64>()),
            core::array::from_fn(|k| 2.0 * (0..3).map(|i| forms.m[1][k][i] * y[i]).sum::<Complex64>()),
            w,
        ];
        let Some(step) = solve3(jac, [psi[0], psi[1], c(0.0, 0.0)]) else { break };
        let trial = normalize_projective(&residues_of(&core::array::from_fn(|i| y[i] - step[i])));
        let trial_psi = period_map(lat, &trial)?;
        let trial_res = trial_psi[0].norm().max(trial_psi[1].norm());
        if trial_res >= residual {
            break;
        }
        a = trial;
        psi = trial_psi;
        residual = trial_res;
    }
    Ok((a, residual))
}

fn quadric_residual(a: &ResidueVector) -> f64 {
    a.iter().map(|x| x * x).sum::<Complex64>().norm()
}

/// Component of `m` orthogonal to `r`, relative to `|m|`.
fn non_proportionality(m: &[[Complex64; 3]; 3], r: &[[f64; 3]; 3]) -> f64 {
    let mut mr = c(0.0, 0.0);
    let (mut mm, mut rr) = (0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            mr += m[i][j].conj() * r[i][j];
            mm += m[i][j].norm_sqr();
            rr += r[i][j] * r[i][j];
        }
    }
    libm::sqrt((1.0 - mr.norm_sqr() / (mm * rr)).max(0.0))
}

/// Intersects the two period conics in `P(L)`: the residue conic
/// `sum a_i^2 = 0` (which lies in their pencil) is parametrized from the point
/// `(1, -1, i, -i)`, and the parametrization is substituted into the period
/// form least proportional to it, giving a quartic.
pub fn solve_theta(lat: &Lattice) -> Result<Vec<EllipticSolution>, EllipticError> {
    let forms = quadratic_forms(lat)?;
    let r = [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]];
    let rc: [[Complex64; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| c(r[i][j], 0.0)));
    let pick = if non_proportionality(&forms.m[0], &r) >= non_proportionality(&forms.m[1], &r) { 0 } else { 1 };
    let s = &forms.m[pick];
    let p = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)];
    let directions = [
        ([c(0.3, 0.1), c(0.7, -0.2), c(-0.4, 0.5)], [c(-0.6, 0.2), c(0.1, 0.3), c(0.8, -0.1)]),
        ([c(0.9, -0.3), c(-0.2, 0.4), c(0.5, 0.6)], [c(0.2, 0.7), c(-0.8, -0.1), c(0.3, 0.2)]),
        ([c(-0.1, 0.8), c(0.6, 0.3), c(0.4, -0.9)], [c(0.7, 0.4), c(0.5, -0.6), c(-0.3, 0.1)]),
    ];
    let mut diagnostics = Vec::new();
    for (d0, d1) in directions {
        let qr = |x: &[Complex64; 3], y: &[Complex64; 3]| bilinear(&rc, x, y);
        // X(t) = Q_R(D) P - 2 B_R(P, D) D with D = d0 + t d1, second intersection
        // of the line through P with the residue conic.
        let (q00, q01, q11) = (qr(&d0, &d0), qr(&d0, &d1), qr(&d1, &d1));
        let (bp0, bp1) = (qr(&p, &d0), qr(&p, &d1));
        let xs: [[Complex64; 3]; 3] = [
            core::array::from_fn(|i| q00 * p[i] - 2.0 * bp0 * d0[i]),
            core::array::from_fn(|i| 2.0 * q01 * p[i] - 2.0 * bp0 * d1[i] - 2.0 * bp1 * d0[i]),
            core::array::from_fn(|i| q11 * p[i] - 2.0 * bp1 * d1[i]),
        ];
        let mut coeffs = vec![c(0.0, 0.0); 5];
        for i in 0..3 {
            for j in 0..3 {
                coeffs[i + j] += bilinear(s, &xs[i], &xs[j]);
            }
        }
        let Some(roots) = polynomial_roots(&coeffs) else {
            continue;
        };
        let mut found: Vec<(ResidueVector, f64)> = Vec::new();
        diagnostics.clear();
        for t in roots {
            let x: [Complex64; 3] = core::array::from_fn(|i| xs[0][i] + t * xs[1][i] + t * t * xs[2][i]);
            let Some(polished) = newton_on_forms(&forms, x) else {
                diagnostics.push(RootDiagnostic { parameter: t, residual: f64::INFINITY });
                continue;
            };
            let (a, residual) = refine_with_periods(lat, &forms, polished)?;
            if residual >= RESIDUAL_TOL {
                diagnostics.push(RootDiagnostic { parameter: t, residual });
                continue;
            }
            if found.iter().all(|(b, _)| projective_distance(&a, b) > SEPARATION) {
                found.push((a, residual));
            }
        }
        if found.len() == 4 {
            return Ok(finish(found));
        }
    }
    Err(EllipticError::SolveFailed(diagnostics))
}

fn finish(mut found: Vec<(ResidueVector, f64)>) -> Vec<EllipticSolution> {
    let key = |a: &ResidueVector| a.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>();
    found.sort_by(|x, y| {
        key(&x.0)
            .iter()
            .zip(key(&y.0).iter())
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut sets = DisjointSets::new(found.len());
    for i in 0..found.len() {
        for swap in &K_SWAPS {
            let image = apply_swap(&found[i].0, swap);
            if let Some(j) = (0..found.len()).find(|&j| projective_distance(&image, &found[j].0) < ORBIT_MATCH) {
                sets.union(i, j);
            }
        }
    }
    let mut labels: Vec<usize> = Vec::new();
    found
        .iter()
        .enumerate()
        .map(|(i, (a, residual))| {
            let root = sets.find(i);
            let orbit_id = match labels.iter().position(|&r| r == root) {
                Some(k) => k,
                None => {
                    labels.push(root);
                    labels.len() - 1
                }
            };
            EllipticSolution { a: *a, residual: *residual, on_q1_residual: quadric_residual(a), orbit_id }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CertificateClause {
    /// `|sum a_i^2| < 1e-9`.
    ResidueQuadric,
    /// `max |Psi_j| < 1e-8`.
    PeriodResidual,
    /// `h = integral of f^2 dz` doubly periodic and odd to `1e-8`.
    Reconstruction,
    /// Four simple zeros of `f`, critical values paired `v <-> -v` to `1e-7`.
    CriticalValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCertificate {
    pub quadric_residual: f64,
    pub period_residual: f64,
    pub periodicity_defect: f64,
    pub oddness_defect: f64,
    /// Zeros of `f` in the centred fundamental parallelogram.
    pub zeros: Vec<Complex64>,
    pub critical_values: Vec<Complex64>,
    pub pairing_defect: f64,
    pub failed: Vec<CertificateClause>,
}

/// Sample points, in lattice coordinates, for the reconstruction checks.
const PROBES: [(f64, f64); 4] = [(0.27, 0.13), (-0.11, 0.38), (0.41, -0.29), (0.19, 0.31)];

struct Primitive<'a> {
    f: &'a AntiInvariantFunction,
    base: Complex64,
    guard: f64,
    tol: f64,
}

impl Primitive<'_> {
    fn between(&self, from: Complex64, to: Complex64) -> Result<Complex64, EllipticError> {
        let path = self.f.route(from, to, self.guard).ok_or(EllipticError::PathTooCloseToPole)?;
        integrate_squared(self.f, &path, self.tol)
    }

    fn at(&self, z: Complex64) -> Result<Complex64, EllipticError> {
        self.between(self.base, z)
    }
}

fn zeros_of(f: &AntiInvariantFunction) -> Vec<Complex64> {
    let lat = f.lattice();
    let tau = lat.tau();
    let max_step = 0.25 * tau.im.min(1.0);
    let mut zeros: Vec<Complex64> = Vec::new();
    for j in 0..6 {
        for k in 0..6 {
            let mut z = c((j as f64 - 2.5) / 6.0, 0.0) + (k as f64 - 2.5) / 6.0 * tau;
            let mut converged = false;
            for _ in 0..80 {
                let (v, d) = (f.eval(z), f.derivative(z));
                if !v.is_finite() || !d.is_finite() || d.norm() == 0.0 {
                    break;
                }
                let mut step = v / d;
                if step.norm() > max_step {
                    step *= max_step / step.norm();
                }
                z -= step;
                if step.norm() < 1e-13 {
                    converged = true;
                    break;
                }
            }
            if !converged || f.pole_distance(z) < 1e-6 || f.eval(z).norm() > 1e-10 {
                continue;
            }
            let (w, _, _) = lat.reduce(z);
            if zeros.iter().all(|&u| lat.distance_to_lattice(u - w) > 1e-6) {
                zeros.push(w);
            }
        }
    }
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    zeros
}

/// Checks a solution: residue quadric, period residual, reconstruction of
/// `h` with `dh = f^2 dz`, and the pairing of its critical values.
pub fn verify_solution(lat: &Lattice, s: &EllipticSolution) -> Result<SolutionCertificate, EllipticError> {
    let a = normalize_projective(&s.a);
    let f = build_f(lat, &a)?;
    let quadric = quadric_residual(&a);
    let psi = periods_of(&f)?;
    let period_residual = psi[0].norm().max(psi[1].norm());

    let tau = lat.tau();
    let at = |(x, y): (f64, f64)| c(x, 0.0) + y * tau;
    let h = Primitive { f: &f, base: basepoint(lat, 0), guard: guard_radius(lat), tol: tolerance_for(&a) };
    let mut periodicity: f64 = 0.0;
    for probe in PROBES.iter().take(2) {
        let z = at(*probe);
        periodicity = periodicity.max(h.between(z, z + 1.0)?.norm()).max(h.between(z, z + tau)?.norm());
    }
    let anchor = at(PROBES[0]);
    let offset = -0.5 * (h.at(anchor)? + h.at(-anchor)?);
    let mut oddness: f64 = 0.0;
    for probe in &PROBES[1..] {
        let z = at(*probe);
        oddness = oddness.max((h.at(z)? + h.at(-z)? + 2.0 * offset).norm());
    }

    let zeros = zeros_of(&f);
    let simple = zeros.iter().all(|&z| f.derivative(z).norm() > 1e-8);
    let critical_values: Vec<Complex64> =
        zeros.iter().map(|&z| Ok(h.at(z)? + offset)).collect::<Result<_, EllipticError>>()?;
    let pairing = critical_values
        .iter()
        .map(|v| critical_values.iter().map(|u| (v + u).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let expected_zeros = a.iter().filter(|x| x.norm() > 0.0).count();

    let mut failed = Vec::new();
    if quadric >= QUADRIC_TOL {
        failed.push(CertificateClause::ResidueQuadric);
    }
    if period_residual >= RESIDUAL_TOL {
        failed.push(CertificateClause::PeriodResidual);
    }
    if periodicity >= RECONSTRUCTION_TOL || oddness >= RECONSTRUCTION_TOL {
        failed.push(CertificateClause::Reconstruction);
    }
    if zeros.len() != expected_zeros || !simple || pairing >= PAIRING_TOL {
        failed.push(CertificateClause::CriticalValues);
    }
    let certificate = SolutionCertificate {
        quadric_residual: quadric,
        period_residual,
        periodicity_defect: periodicity,
        oddness_defect: oddness,
        zeros,
        critical_values,
        pairing_defect: pairing,
        failed: failed.clone(),
    };
    if failed.is_empty() {
        Ok(certificate)
    } else {
        Err(EllipticError::CertificateFailed { failed, certificate: Box::new(certificate) })
    }
}
