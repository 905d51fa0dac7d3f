//! First-jet bundle structures over trivial bundles `M x F`.
//!
//! Chart layout for the jet space: base coordinates first, then fiber
//! coordinates, then velocities flattened fiber-major, i.e. the slot of
//! `v^A_mu` is `base + fiber + A*base + mu`.  In the group case the fiber
//! coordinates are canonical coordinates of the first kind through a
//! [`GroupChart`] and the velocity block holds the left-invariant
//! components `xi^A_mu`.

use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::forms::{scaled_step, AlgebraValuedForm, FormField};
use crate::group::{GroupChart, GroupError, GroupOps};

#[derive(Debug, Error)]
pub enum JetError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("change-of-basis matrix not invertible")]
    SingularBasisChange,
}

/// Dimensions of the trivial bundle: `base_dim = n+1`, `fiber_dim = N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundleSignature {
    pub base_dim: usize,
    pub fiber_dim: usize,
}

impl BundleSignature {
    pub fn new(base_dim: usize, fiber_dim: usize) -> Self {
        Self { base_dim, fiber_dim }
    }

    pub fn jet_chart_dim(&self) -> usize {
        self.base_dim + self.fiber_dim + self.base_dim * self.fiber_dim
    }

    pub fn x_slot(&self, mu: usize) -> usize {
        mu
    }

    pub fn y_slot(&self, a: usize) -> usize {
        self.base_dim + a
    }

    pub fn v_slot(&self, a: usize, mu: usize) -> usize {
        self.base_dim + self.fiber_dim + a * self.base_dim + mu
    }
}

/// Point of the first jet bundle in natural coordinates `(x, y, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub sig: BundleSignature,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Velocities flattened fiber-major: `v[a * base_dim + mu] = v^a_mu`.
    pub v: Vec<f64>,
}

impl JetPoint {
    pub fn new(sig: BundleSignature, x: Vec<f64>, y: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(x.len(), sig.base_dim);
        assert_eq!(y.len(), sig.fiber_dim);
        assert_eq!(v.len(), sig.base_dim * sig.fiber_dim);
        Self { sig, x, y, v }
    }

    pub fn v(&self, a: usize, mu: usize) -> f64 {
        self.v[a * self.sig.base_dim + mu]
    }

    pub fn chart_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.sig.jet_chart_dim());
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out.extend_from_slice(&self.v);
        out
    }

    pub fn from_chart_coords(sig: BundleSignature, u: &[f64]) -> Self {
        let b = sig.base_dim;
        let f = sig.fiber_dim;
        Self::new(sig, u[..b].to_vec(), u[b..b + f].to_vec(), u[b + f..].to_vec())
    }
}

/// Point of the first jet bundle of a principal bundle: base point, group
/// element and left-invariant velocities `xi[mu]` (one algebra vector per
/// base direction).
#[derive(Clone)]
pub struct GJetPoint<G: GroupOps> {
    pub x: Vec<f64>,
    pub g: G::Point,
    pub xi: Vec<Vec<f64>>,
}

impl<G: GroupOps> GJetPoint<G> {
    pub fn sig(&self) -> BundleSignature {
        BundleSignature::new(self.x.len(), self.xi[0].len())
    }

    /// Chart coordinates through the given group chart.
    pub fn chart_coords(&self, chart: &GroupChart<G>) -> Result<Vec<f64>, JetError> {
        let sig = self.sig();
        let mut out = vec![0.0; sig.jet_chart_dim()];
        out[..sig.base_dim].copy_from_slice(&self.x);
        let y = chart.coords(&self.g)?;
        out[sig.base_dim..sig.base_dim + sig.fiber_dim].copy_from_slice(&y);
        for mu in 0..sig.base_dim {
            for a in 0..sig.fiber_dim {
                out[sig.v_slot(a, mu)] = self.xi[mu][a];
            }
        }
        Ok(out)
    }
}

/// Section of a trivial bundle as a plain function `x -> y`.
pub type Section = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Section of a principal bundle, `x -> g`.
pub type GroupSection<G> = Arc<dyn Fn(&[f64]) -> <G as GroupOps>::Point + Send + Sync>;

/// Vector field on the total space `E = M x F`, in coordinates
/// `Z = alpha^mu ∂x_mu + beta^A ∂y_A`.
#[derive(Clone)]
pub struct BundleVectorField {
    pub alpha: Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>,
    pub beta: Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>,
}

/// Vector field on a principal bundle expressed in the left-invariant frame,
/// `Z = alpha^mu ∂x_mu + beta^A e_A` with `e_A` the left-invariant basis.
#[derive(Clone)]
pub struct GroupBundleVectorField<G: GroupOps> {
    pub alpha: Arc<dyn Fn(&[f64], &G::Point) -> Vec<f64> + Send + Sync>,
    pub beta: Arc<dyn Fn(&[f64], &G::Point) -> Vec<f64> + Send + Sync>,
}

/// The contact 1-forms `theta^A = dy^A - v^A_mu dx^mu` on the jet chart.
pub fn contact_forms(sig: BundleSignature) -> Vec<FormField> {
    let dim = sig.jet_chart_dim();
    (0..sig.fiber_dim)
        .map(move |a| {
            FormField::new(dim, 1, move |u: &[f64]| {
                let mut c = vec![0.0; dim];
                c[sig.y_slot(a)] = 1.0;
                for mu in 0..sig.base_dim {
                    c[sig.x_slot(mu)] = -u[sig.v_slot(a, mu)];
                }
                c
            })
        })
        .collect()
}

/// Exact evaluation of the contact forms on a jet-chart tangent vector at
/// `p`: returns `theta^A(tangent)` for all A.
pub fn contact_form_value(p: &JetPoint, tangent: &[f64]) -> Vec<f64> {
    let sig = p.sig;
    (0..sig.fiber_dim)
        .map(|a| {
            let mut val = tangent[sig.y_slot(a)];
            for mu in 0..sig.base_dim {
                val -= p.v(a, mu) * tangent[sig.x_slot(mu)];
            }
            val
        })
        .collect()
}

/// The reduced contact forms `vartheta^A = lambda^A - xi^A_mu dx^mu` on the
/// group jet chart.  Panics inside the coefficient closure if the chart is
/// singular at the evaluation point.
pub fn reduced_contact_forms<G: GroupOps>(
    chart: &GroupChart<G>,
    sig: BundleSignature,
    h: f64,
) -> Vec<FormField> {
    let dim = sig.jet_chart_dim();
    (0..sig.fiber_dim)
        .map(|a| {
            let chart = chart.clone();
            FormField::new(dim, 1, move |u: &[f64]| {
                let y = &u[sig.base_dim..sig.base_dim + sig.fiber_dim];
                let g = chart.point(y);
                let cb = change_of_basis(&chart, &g, h).expect("group chart singular");
                let mut c = vec![0.0; dim];
                for b in 0..sig.fiber_dim {
                    c[sig.y_slot(b)] = cb.l[(a, b)];
                }
                for mu in 0..sig.base_dim {
                    c[sig.x_slot(mu)] = -u[sig.v_slot(a, mu)];
                }
                c
            })
        })
        .collect()
}

/// Exact evaluation of the reduced contact forms on a tangent given by its
/// base components and its fiber part in left-invariant components:
/// `vartheta^A(tangent) = fiber^A - xi^A_mu base^mu`.
pub fn reduced_contact_value<G: GroupOps>(
    p: &GJetPoint<G>,
    base: &[f64],
    fiber_left_invariant: &[f64],
) -> Vec<f64> {
    let sig = p.sig();
    (0..sig.fiber_dim)
        .map(|a| {
            let mut val = fiber_left_invariant[a];
            for mu in 0..sig.base_dim {
                val -= p.xi[mu][a] * base[mu];
            }
            val
        })
        .collect()
}

/// Holonomic lift of a section by central differences:
/// `v^A_mu = d sec^A / d x^mu`.
pub fn holonomic_lift(sec: &Section, sig: BundleSignature, x: &[f64], h: f64) -> JetPoint {
    let y = sec(x);
    let mut v = vec![0.0; sig.base_dim * sig.fiber_dim];
    for mu in 0..sig.base_dim {
        let hm = h;
        let mut plus = x.to_vec();
        plus[mu] += hm;
        let mut minus = x.to_vec();
        minus[mu] -= hm;
        let yp = sec(&plus);
        let ym = sec(&minus);
        for a in 0..sig.fiber_dim {
            v[a * sig.base_dim + mu] = (yp[a] - ym[a]) / (2.0 * hm);
        }
    }
    JetPoint::new(sig, x.to_vec(), y, v)
}

/// Holonomic lift of a group section: `xi_mu` is the left logarithmic
/// derivative `lambda(∂sec/∂x^mu)`, second order in `h`.
pub fn holonomic_lift_group<G: GroupOps>(
    group: &G,
    sec: &GroupSection<G>,
    x: &[f64],
    h: f64,
) -> Result<GJetPoint<G>, JetError> {
    holonomic_lift_group_steps(group, sec, x, &vec![h; x.len()])
}

/// [`holonomic_lift_group`] with an independent step per base direction,
/// so evaluations can stay on an anisotropic solver grid.
pub fn holonomic_lift_group_steps<G: GroupOps>(
    group: &G,
    sec: &GroupSection<G>,
    x: &[f64],
    steps: &[f64],
) -> Result<GJetPoint<G>, JetError> {
    let g = sec(x);
    let g_inv = group.inverse(&g);
    let mut xi = Vec::with_capacity(x.len());
    for mu in 0..x.len() {
        let hm = steps[mu];
        let mut plus = x.to_vec();
        plus[mu] += hm;
        let mut minus = x.to_vec();
        minus[mu] -= hm;
        let lp = group.log(&group.compose(&g_inv, &sec(&plus)))?;
        let lm = group.log(&group.compose(&g_inv, &sec(&minus)))?;
        xi.push(lp.iter().zip(&lm).map(|(a, b)| (a - b) / (2.0 * hm)).collect());
    }
    Ok(GJetPoint { x: x.to_vec(), g, xi })
}

/// Right-invariant variant: `xi_mu = rho(∂sec/∂x^mu)`, the right logarithmic
/// derivative.
pub fn holonomic_lift_group_right<G: GroupOps>(
    group: &G,
    sec: &GroupSection<G>,
    x: &[f64],
    h: f64,
) -> Result<GJetPoint<G>, JetError> {
    holonomic_lift_group_right_steps(group, sec, x, &vec![h; x.len()])
}

pub fn holonomic_lift_group_right_steps<G: GroupOps>(
    group: &G,
    sec: &GroupSection<G>,
    x: &[f64],
    steps: &[f64],
) -> Result<GJetPoint<G>, JetError> {
    let g = sec(x);
    let g_inv = group.inverse(&g);
    let mut xi = Vec::with_capacity(x.len());
    for mu in 0..x.len() {
        let hm = steps[mu];
        let mut plus = x.to_vec();
        plus[mu] += hm;
        let mut minus = x.to_vec();
        minus[mu] -= hm;
        let lp = group.log(&group.compose(&sec(&plus), &g_inv))?;
        let lm = group.log(&group.compose(&sec(&minus), &g_inv))?;
        xi.push(lp.iter().zip(&lm).map(|(a, b)| (a - b) / (2.0 * hm)).collect());
    }
    Ok(GJetPoint { x: x.to_vec(), g, xi })
}

/// The normalized tangents `X_mu = ∂x_mu + v^B_mu ∂y_B` of a flat jet
/// point, as jet-chart vectors.
pub fn normalized_tangents(p: &JetPoint) -> Vec<Vec<f64>> {
    let sig = p.sig;
    (0..sig.base_dim)
        .map(|mu| {
            let mut t = vec![0.0; sig.jet_chart_dim()];
            t[sig.x_slot(mu)] = 1.0;
            for b in 0..sig.fiber_dim {
                t[sig.y_slot(b)] = p.v(b, mu);
            }
            t
        })
        .collect()
}

/// One-jet prolongation of a vector field in natural coordinates:
/// `j1Z = alpha ∂x + beta ∂y + (∂zeta/∂x^mu + v^B_mu ∂zeta/∂y^B) ∂v`,
/// with `zeta^A = beta^A - v^A_nu alpha^nu` (velocities frozen at `p`).
pub fn prolong_vector(z: &BundleVectorField, p: &JetPoint, h: f64) -> Vec<f64> {
    let sig = p.sig;
    let zeta = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let alpha = (z.alpha)(x, y);
        let beta = (z.beta)(x, y);
        (0..sig.fiber_dim)
            .map(|a| {
                let mut val = beta[a];
                for nu in 0..sig.base_dim {
                    val -= p.v(a, nu) * alpha[nu];
                }
                val
            })
            .collect()
    };
    // partials of zeta in x and y
    let mut dzeta_dx = Vec::with_capacity(sig.base_dim);
    for mu in 0..sig.base_dim {
        let hm = scaled_step(h, p.x[mu]);
        let mut plus = p.x.clone();
        plus[mu] += hm;
        let mut minus = p.x.clone();
        minus[mu] -= hm;
        let zp = zeta(&plus, &p.y);
        let zm = zeta(&minus, &p.y);
        dzeta_dx.push(
            zp.iter().zip(&zm).map(|(a, b)| (a - b) / (2.0 * hm)).collect::<Vec<f64>>(),
        );
    }
    let mut dzeta_dy = Vec::with_capacity(sig.fiber_dim);
    for b in 0..sig.fiber_dim {
        let hb = scaled_step(h, p.y[b]);
        let mut plus = p.y.clone();
        plus[b] += hb;
        let mut minus = p.y.clone();
        minus[b] -= hb;
        let zp = zeta(&p.x, &plus);
        let zm = zeta(&p.x, &minus);
        dzeta_dy.push(
            zp.iter().zip(&zm).map(|(a, b)| (a - b) / (2.0 * hb)).collect::<Vec<f64>>(),
        );
    }
    let alpha = (z.alpha)(&p.x, &p.y);
    let beta = (z.beta)(&p.x, &p.y);
    let mut out = vec![0.0; sig.jet_chart_dim()];
    out[..sig.base_dim].copy_from_slice(&alpha);
    out[sig.base_dim..sig.base_dim + sig.fiber_dim].copy_from_slice(&beta);
    for a in 0..sig.fiber_dim {
        for mu in 0..sig.base_dim {
            let mut gamma = dzeta_dx[mu][a];
            for b in 0..sig.fiber_dim {
                gamma += p.v(b, mu) * dzeta_dy[b][a];
            }
            out[sig.v_slot(a, mu)] = gamma;
        }
    }
    out
}

/// Change-of-basis matrices at `g`: `T^A_B = dy^A(e_B)` maps left-invariant
/// components to chart components, `L = T^-1` the other way; `t_tilde` and
/// `l_tilde` are the right-invariant variants.
pub struct ChangeOfBasis {
    pub t: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub t_tilde: DMatrix<f64>,
    pub l_tilde: DMatrix<f64>,
}

pub fn change_of_basis<G: GroupOps>(
    chart: &GroupChart<G>,
    g: &G::Point,
    h: f64,
) -> Result<ChangeOfBasis, JetError> {
    let n = chart.group.algebra_dim();
    let mut t = DMatrix::zeros(n, n);
    let mut t_tilde = DMatrix::zeros(n, n);
    for b in 0..n {
        let mut e = vec![0.0; n];
        e[b] = h;
        let exp_plus = chart.group.exp(&e);
        e[b] = -h;
        let exp_minus = chart.group.exp(&e);
        let yp = chart.coords(&chart.group.compose(g, &exp_plus))?;
        let ym = chart.coords(&chart.group.compose(g, &exp_minus))?;
        for a in 0..n {
            t[(a, b)] = (yp[a] - ym[a]) / (2.0 * h);
        }
        let yp = chart.coords(&chart.group.compose(&exp_plus, g))?;
        let ym = chart.coords(&chart.group.compose(&exp_minus, g))?;
        for a in 0..n {
            t_tilde[(a, b)] = (yp[a] - ym[a]) / (2.0 * h);
        }
    }
    let l = t.clone().try_inverse().ok_or(JetError::SingularBasisChange)?;
    let l_tilde = t_tilde.clone().try_inverse().ok_or(JetError::SingularBasisChange)?;
    Ok(ChangeOfBasis { t, l, t_tilde, l_tilde })
}

/// The Maurer-Cartan 1-form `lambda^A = L^A_B(y) dy^B` as an
/// algebra-valued form on a chart of dimension `total_dim` whose group
/// coordinate block starts at `y_offset`.
pub fn maurer_cartan_form<G: GroupOps>(
    chart: &GroupChart<G>,
    total_dim: usize,
    y_offset: usize,
    h: f64,
) -> AlgebraValuedForm {
    let n = chart.group.algebra_dim();
    let components = (0..n)
        .map(|a| {
            let chart = chart.clone();
            FormField::new(total_dim, 1, move |u: &[f64]| {
                let y = &u[y_offset..y_offset + chart.group.algebra_dim()];
                let g = chart.point(y);
                let cb = change_of_basis(&chart, &g, h).expect("group chart singular");
                let mut c = vec![0.0; total_dim];
                for b in 0..chart.group.algebra_dim() {
                    c[y_offset + b] = cb.l[(a, b)];
                }
                c
            })
        })
        .collect();
    AlgebraValuedForm::new(components)
}

/// The normalized tangents of a group jet point in chart coordinates:
/// `X_mu = ∂x_mu + xi^B_mu e_B`, with the fiber part mapped through `T`.
pub fn normalized_tangents_group<G: GroupOps>(
    p: &GJetPoint<G>,
    chart: &GroupChart<G>,
    h: f64,
) -> Result<Vec<Vec<f64>>, JetError> {
    let sig = p.sig();
    let cb = change_of_basis(chart, &p.g, h)?;
    let mut out = Vec::with_capacity(sig.base_dim);
    for mu in 0..sig.base_dim {
        let mut t = vec![0.0; sig.jet_chart_dim()];
        t[sig.x_slot(mu)] = 1.0;
        for a in 0..sig.fiber_dim {
            for b in 0..sig.fiber_dim {
                t[sig.y_slot(a)] += cb.t[(a, b)] * p.xi[mu][b];
            }
        }
        out.push(t);
    }
    Ok(out)
}

/// One-jet prolongation with Lie-group fiber:
/// `gamma^A_mu = ∂zeta^A/∂x^mu + xi^C_mu T^B_C ∂zeta^A/∂y^B + [xi_mu, beta]^A`
/// with `zeta^A = beta^A - xi^A_nu alpha^nu` (velocities frozen at `p`).
///
/// Returns the jet-chart tangent `[alpha | T·beta | gamma]`.
pub fn prolong_vector_group<G: GroupOps>(
    z: &GroupBundleVectorField<G>,
    p: &GJetPoint<G>,
    chart: &GroupChart<G>,
    h: f64,
) -> Result<Vec<f64>, JetError> {
    let sig = p.sig();
    let cb = change_of_basis(chart, &p.g, h)?;
    let y0 = chart.coords(&p.g)?;
    let zeta = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let g = chart.point(y);
        let alpha = (z.alpha)(x, &g);
        let beta = (z.beta)(x, &g);
        (0..sig.fiber_dim)
            .map(|a| {
                let mut val = beta[a];
                for nu in 0..sig.base_dim {
                    val -= p.xi[nu][a] * alpha[nu];
                }
                val
            })
            .collect()
    };
    let mut dzeta_dx = Vec::with_capacity(sig.base_dim);
    for mu in 0..sig.base_dim {
        let hm = scaled_step(h, p.x[mu]);
        let mut plus = p.x.clone();
        plus[mu] += hm;
        let mut minus = p.x.clone();
        minus[mu] -= hm;
        let zp = zeta(&plus, &y0);
        let zm = zeta(&minus, &y0);
        dzeta_dx.push(
            zp.iter().zip(&zm).map(|(a, b)| (a - b) / (2.0 * hm)).collect::<Vec<f64>>(),
        );
    }
    let mut dzeta_dy = Vec::with_capacity(sig.fiber_dim);
    for b in 0..sig.fiber_dim {
        let hb = scaled_step(h, y0[b]);
        let mut plus = y0.clone();
        plus[b] += hb;
        let mut minus = y0.clone();
        minus[b] -= hb;
        let zp = zeta(&p.x, &plus);
        let zm = zeta(&p.x, &minus);
        dzeta_dy.push(
            zp.iter().zip(&zm).map(|(a, b)| (a - b) / (2.0 * hb)).collect::<Vec<f64>>(),
        );
    }
    let alpha = (z.alpha)(&p.x, &p.g);
    let beta = (z.beta)(&p.x, &p.g);
    let mut out = vec![0.0; sig.jet_chart_dim()];
    out[..sig.base_dim].copy_from_slice(&alpha);
    for a in 0..sig.fiber_dim {
        for b in 0..sig.fiber_dim {
            out[sig.y_slot(a)] += cb.t[(a, b)] * beta[b];
        }
    }
    for mu in 0..sig.base_dim {
        let bracket = chart.group.bracket(&p.xi[mu], &beta);
        for a in 0..sig.fiber_dim {
            let mut gamma = dzeta_dx[mu][a] + bracket[a];
            // v^B_mu = T^B_C xi^C_mu
            for b in 0..sig.fiber_dim {
                let mut v_b_mu = 0.0;
                for c in 0..sig.fiber_dim {
                    v_b_mu += cb.t[(b, c)] * p.xi[mu][c];
                }
                gamma += v_b_mu * dzeta_dy[b][a];
            }
            out[sig.v_slot(a, mu)] = gamma;
        }
    }
    Ok(out)
}
