//! Seeded verification suites: every structural identity the library
//! asserts, runnable as named pass/fail checks with measured values.
//!
//! The same checks back the CLI `verify` subcommand and the acceptance
//! integration suite.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beam::{self, BeamParams, BeamState};
use crate::forms::{self, ext_deriv, wedge, FormField, VectorField};
use crate::group::{Abelian, GroupChart, GroupOps, Se3};
use crate::jet::{self, BundleSignature, GJetPoint, GroupBundleVectorField, GroupSection, Section};
use crate::lie::{self, AlgebraCovector, AlgebraElement, Vec3};
use crate::variational::{self, HamiltonianDensity, LagrangianDensity, ReducedHamiltonian, ReducedLagrangian};

/// Outcome of one named invariant check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn bound(name: &'static str, value: f64, bound: f64) -> Self {
        Check {
            name,
            passed: value <= bound,
            detail: format!("measured {value:.3e}, bound {bound:.3e}"),
        }
    }

    fn ratio(name: &'static str, ratio: f64, lo: f64, hi: f64, detail: String) -> Self {
        Check {
            name,
            passed: ratio.is_finite() && ratio >= lo && ratio <= hi,
            detail: format!("Richardson ratio {ratio:.2} (window [{lo}, {hi}]); {detail}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lie,
    Forms,
    Jet,
    Variational,
    Beam,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        match name {
            "lie" => Some(Suite::Lie),
            "forms" => Some(Suite::Forms),
            "jet" => Some(Suite::Jet),
            "variational" => Some(Suite::Variational),
            "beam" => Some(Suite::Beam),
            "all" => Some(Suite::All),
            _ => None,
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Lie => lie_suite(seed),
        Suite::Forms => forms_suite(seed),
        Suite::Jet => jet_suite(seed),
        Suite::Variational => variational_suite(seed),
        Suite::Beam => beam_suite(seed),
        Suite::All => {
            let mut out = lie_suite(seed);
            out.extend(forms_suite(seed));
            out.extend(jet_suite(seed));
            out.extend(variational_suite(seed));
            out.extend(beam_suite(seed));
            out
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

fn random_algebra(rng: &mut ChaCha8Rng, scale: f64) -> AlgebraElement {
    let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-scale..scale)).collect();
    AlgebraElement::from_slice(&c)
}

fn random_covector(rng: &mut ChaCha8Rng, scale: f64) -> AlgebraCovector {
    let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-scale..scale)).collect();
    AlgebraCovector::from_slice(&c)
}

// ---------------------------------------------------------------------
// lie suite
// ---------------------------------------------------------------------

fn lie_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let a = random_algebra(&mut rng, 2.0);
        let b = random_algebra(&mut rng, 2.0);
        let mu = random_covector(&mut rng, 2.0);
        let defect =
            (lie::pairing(&lie::ad_star(&a, &mu), &b) - lie::pairing(&mu, &lie::ad(&a, &b))).abs();
        worst = worst.max(defect);
    }
    checks.push(Check::bound("lie.coadjoint-duality", worst, 1e-12));

    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let a = random_algebra(&mut rng, 2.0);
        let b = random_algebra(&mut rng, 2.0);
        let comm = lie::hat(&a) * lie::hat(&b) - lie::hat(&b) * lie::hat(&a);
        let oracle = lie::vee(&comm).expect("commutator stays in the hat image");
        worst = worst.max(oracle.sub(&lie::ad(&a, &b)).norm());
    }
    checks.push(Check::bound("lie.ad-matrix-commutator", worst, 1e-12));

    let mut worst = 0.0_f64;
    for _ in 0..500 {
        let h = lie::exp_group(&random_algebra(&mut rng, 1.5));
        let mu = random_covector(&mut rng, 2.0);
        let eta = random_algebra(&mut rng, 2.0);
        let lhs = lie::pairing(&lie::coadjoint_inv(&h, &mu), &eta);
        let rhs = lie::pairing(&mu, &lie::adjoint(&h.inverse(), &eta));
        worst = worst.max((lhs - rhs).abs());
    }
    checks.push(Check::bound("lie.group-coadjoint-duality", worst, 1e-12));

    let mut worst = 0.0_f64;
    for _ in 0..300 {
        let a = random_algebra(&mut rng, 2.0);
        let b = random_algebra(&mut rng, 2.0);
        let c = random_algebra(&mut rng, 2.0);
        let total = lie::ad(&a, &lie::ad(&b, &c))
            .add(&lie::ad(&b, &lie::ad(&c, &a)))
            .add(&lie::ad(&c, &lie::ad(&a, &b)));
        worst = worst.max(total.norm());
    }
    checks.push(Check::bound("lie.jacobi-identity", worst, 1e-12));

    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let mut xi = random_algebra(&mut rng, 1.0);
        xi = xi.scale(10.0 / xi.norm());
        worst = worst.max(lie::exp_group(&xi).orthonormal_defect());
    }
    checks.push(Check::bound("lie.exp-group-membership", worst, 1e-12));

    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let h = lie::exp_group(&random_algebra(&mut rng, 1.5));
        let a = random_algebra(&mut rng, 2.0);
        let b = random_algebra(&mut rng, 2.0);
        let lhs = lie::adjoint(&h, &lie::ad(&a, &b));
        let rhs = lie::ad(&lie::adjoint(&h, &a), &lie::adjoint(&h, &b));
        worst = worst.max(lhs.sub(&rhs).norm());
    }
    checks.push(Check::bound("lie.adjoint-bracket-homomorphism", worst, 1e-11));

    checks
}

// ---------------------------------------------------------------------
// forms suite
// ---------------------------------------------------------------------

fn forms_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // Volume contraction identities, exact on the chart basis.
    let mut worst = 0.0_f64;
    for d in 2..5usize {
        let n = d - 1;
        let p = vec![0.3; d];
        let basis: Vec<Vec<f64>> = (0..d).map(|i| VectorField::basis(d, i).at(&p)).collect();
        let all: Vec<&[f64]> = basis.iter().map(|v| v.as_slice()).collect();
        let sub: Vec<Vec<&[f64]>> = (0..d)
            .map(|skip| (0..d).filter(|&i| i != skip).map(|i| basis[i].as_slice()).collect())
            .collect();
        for mu in 0..d {
            for nu in 0..d {
                let lhs = wedge(&FormField::dx(d, nu), &forms::dnx(d, mu)).unwrap();
                let expect = if mu == nu { 1.0 } else { 0.0 };
                worst = worst.max((lhs.evaluate(&p, &all) - expect).abs());
            }
        }
        let mut sum = FormField::zero(d, d);
        for mu in 0..d {
            sum = sum.add(&wedge(&FormField::dx(d, mu), &forms::dnx(d, mu)).unwrap());
        }
        worst = worst.max((sum.evaluate(&p, &all) - (n + 1) as f64).abs());
        for alpha in 0..d {
            for mu in 0..d {
                for nu in 0..d {
                    let lhs = wedge(&FormField::dx(d, alpha), &forms::dnx2(d, mu, nu)).unwrap();
                    for args in &sub {
                        let mut expect = 0.0;
                        if alpha == nu {
                            expect += forms::dnx(d, mu).evaluate(&p, args);
                        }
                        if alpha == mu {
                            expect -= forms::dnx(d, nu).evaluate(&p, args);
                        }
                        worst = worst.max((lhs.evaluate(&p, args) - expect).abs());
                    }
                }
            }
        }
        for nu in 0..d {
            let mut sum = FormField::zero(d, d - 1);
            for mu in 0..d {
                sum = sum.add(&wedge(&FormField::dx(d, mu), &forms::dnx2(d, mu, nu)).unwrap());
            }
            for args in &sub {
                let expect = -(n as f64) * forms::dnx(d, nu).evaluate(&p, args);
                worst = worst.max((sum.evaluate(&p, args) - expect).abs());
            }
        }
    }
    checks.push(Check::bound("forms.volume-identities", worst, 0.0));

    // Leibniz rule with Richardson certification.
    let d = 3;
    let a = FormField::new(d, 1, |p: &[f64]| {
        vec![(p[1] * p[2]).cos(), p[0] * p[0], (p[0] + p[2]).sin()]
    });
    let b = FormField::new(d, 1, |p: &[f64]| {
        vec![p[0] * p[1], (p[2] * p[0]).sin(), p[1] + 0.5]
    });
    let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let vs: Vec<Vec<f64>> =
        (0..3).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let args: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
    let leibniz = |h: f64| -> f64 {
        let lhs = ext_deriv(&wedge(&a, &b).unwrap(), h).unwrap();
        let rhs = wedge(&ext_deriv(&a, h).unwrap(), &b)
            .unwrap()
            .add(&wedge(&a, &ext_deriv(&b, h).unwrap()).unwrap().scale(-1.0));
        (lhs.evaluate(&p, &args) - rhs.evaluate(&p, &args)).abs()
    };
    let r1 = leibniz(2e-3);
    let r2 = leibniz(1e-3);
    checks.push(Check::ratio(
        "forms.leibniz-richardson",
        r1 / r2,
        3.5,
        4.5,
        format!("residuals {r1:.3e} / {r2:.3e}"),
    ));

    // Alternation on repeated arguments.
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let d = 5;
        let coeffs: Vec<f64> =
            (0..forms::binomial(d, 3)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = FormField::constant(d, 3, coeffs);
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        worst = worst.max(a.evaluate(&p, &[&u, &v, &u]).abs());
    }
    checks.push(Check::bound("forms.alternation", worst, 1e-13));

    // d^2 = 0 (exact by stencil symmetry, up to round-off).
    let d = 4;
    let f = FormField::scalar(d, |p: &[f64]| (p[0] * p[1]).sin() + p[2] * p[2] * p[3]);
    let ddf = ext_deriv(&ext_deriv(&f, 1e-4).unwrap(), 1e-4).unwrap();
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        worst = worst.max(max_abs(&ddf.coefficients(&p)));
    }
    checks.push(Check::bound("forms.d-squared", worst, 1e-10));

    // Cartan formula against flow transport.
    let d = 2;
    let m = [[0.3, -0.8], [0.5, 0.1]];
    let field = move |q: &[f64]| -> Vec<f64> {
        vec![m[0][0] * q[0] + m[0][1] * q[1], m[1][0] * q[0] + m[1][1] * q[1]]
    };
    let z = VectorField::new(d, field);
    let a = FormField::new(d, 1, |p: &[f64]| vec![p[1].sin(), p[0] * p[1]]);
    let lz = forms::lie_derivative(&z, &a, 1e-5).unwrap();
    let eps = 1e-5;
    let flow = forms::ChartMap::new(d, d, move |p: &[f64]| {
        let k1 = field(p);
        let q2: Vec<f64> = p.iter().zip(&k1).map(|(x, k)| x + 0.5 * eps * k).collect();
        let k2 = field(&q2);
        let q3: Vec<f64> = p.iter().zip(&k2).map(|(x, k)| x + 0.5 * eps * k).collect();
        let k3 = field(&q3);
        let q4: Vec<f64> = p.iter().zip(&k3).map(|(x, k)| x + eps * k).collect();
        let k4 = field(&q4);
        p.iter()
            .enumerate()
            .map(|(i, x)| x + eps / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    });
    let transported = forms::pullback(&flow, &a, 1e-5).unwrap();
    let p = [0.4, -0.6];
    let v = [0.7, 0.2];
    let fd = (transported.evaluate(&p, &[&v]) - a.evaluate(&p, &[&v])) / eps;
    let direct = lz.evaluate(&p, &[&v]);
    checks.push(Check::bound("forms.cartan-vs-flow", (fd - direct).abs(), 1e-4));

    checks
}

// ---------------------------------------------------------------------
// jet suite
// ---------------------------------------------------------------------

/// Smooth SE(3)-valued section over a 2D base.
fn random_se3_section(rng: &mut ChaCha8Rng) -> GroupSection<Se3> {
    let group = Se3;
    let a1: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.7..0.7)).collect();
    let a2: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.7..0.7)).collect();
    let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Arc::new(move |x: &[f64]| {
        let s = x[0];
        let t = if x.len() > 1 { x[1] } else { 0.0 };
        let f1 = c[0] * s + c[1] * t + c[2] * (s * t).sin();
        let f2 = c[3] * s * s + c[4] * (t + 0.3).cos() + c[5] * t;
        let m1: Vec<f64> = a1.iter().map(|v| v * f1).collect();
        let m2: Vec<f64> = a2.iter().map(|v| v * f2).collect();
        group.compose(&group.exp(&m1), &group.exp(&m2))
    })
}

/// Finite-difference transport oracle for the group prolongation: flows the
/// point and the holonomic plane with the one-parameter group of `Z`,
/// re-solves the holonomy condition and differentiates the resulting jet
/// velocities at zero.  Independent of `prolong_vector_group`.
pub fn group_transport_oracle(
    z: &GroupBundleVectorField<Se3>,
    p: &GJetPoint<Se3>,
    chart: &GroupChart<Se3>,
    eps: f64,
) -> Vec<Vec<f64>> {
    let base = p.x.len();
    let n = 6;
    let y0 = chart.coords(&p.g).unwrap();
    let flow_field = |u: &[f64]| -> Vec<f64> {
        let (x, y) = u.split_at(base);
        let g = chart.point(y);
        let alpha = (z.alpha)(x, &g);
        let beta = (z.beta)(x, &g);
        let cb = jet::change_of_basis(chart, &g, 1e-5).unwrap();
        let mut out = alpha;
        for a in 0..n {
            let mut dy = 0.0;
            for b in 0..n {
                dy += cb.t[(a, b)] * beta[b];
            }
            out.push(dy);
        }
        out
    };
    let flow = move |u0: &[f64], eps: f64| -> Vec<f64> {
        let k1 = flow_field(u0);
        let u2: Vec<f64> = u0.iter().zip(&k1).map(|(x, k)| x + 0.5 * eps * k).collect();
        let k2 = flow_field(&u2);
        let u3: Vec<f64> = u0.iter().zip(&k2).map(|(x, k)| x + 0.5 * eps * k).collect();
        let k3 = flow_field(&u3);
        let u4: Vec<f64> = u0.iter().zip(&k3).map(|(x, k)| x + eps * k).collect();
        let k4 = flow_field(&u4);
        u0.iter()
            .enumerate()
            .map(|(i, x)| x + eps / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    };
    let mut u0 = p.x.clone();
    u0.extend_from_slice(&y0);
    let cb0 = jet::change_of_basis(chart, &p.g, 1e-5).unwrap();
    let tangents: Vec<Vec<f64>> = (0..base)
        .map(|mu| {
            let mut t = vec![0.0; base + n];
            t[mu] = 1.0;
            for a in 0..n {
                for b in 0..n {
                    t[base + a] += cb0.t[(a, b)] * p.xi[mu][b];
                }
            }
            t
        })
        .collect();
    let xi_at = |s: f64| -> Vec<Vec<f64>> {
        let u_s = flow(&u0, s);
        let delta = 1e-5;
        let pushed: Vec<Vec<f64>> = tangents
            .iter()
            .map(|t| {
                let up: Vec<f64> = u0.iter().zip(t).map(|(u, v)| u + delta * v).collect();
                let um: Vec<f64> = u0.iter().zip(t).map(|(u, v)| u - delta * v).collect();
                let fp = flow(&up, s);
                let fm = flow(&um, s);
                fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * delta)).collect()
            })
            .collect();
        let y_s = &u_s[base..];
        let g_s = chart.point(y_s);
        let cb_s = jet::change_of_basis(chart, &g_s, 1e-5).unwrap();
        let mut lambda_vals = DMatrix::zeros(n, base);
        let mut dx_vals = DMatrix::zeros(base, base);
        for (mu, t) in pushed.iter().enumerate() {
            for a in 0..n {
                let mut v = 0.0;
                for b in 0..n {
                    v += cb_s.l[(a, b)] * t[base + b];
                }
                lambda_vals[(a, mu)] = v;
            }
            for nu in 0..base {
                dx_vals[(nu, mu)] = t[nu];
            }
        }
        let d_inv = dx_vals.try_inverse().unwrap();
        let xi_mat = lambda_vals * d_inv;
        (0..base).map(|mu| (0..n).map(|a| xi_mat[(a, mu)]).collect()).collect()
    };
    let plus = xi_at(eps);
    let minus = xi_at(-eps);
    (0..base)
        .map(|mu| {
            plus[mu].iter().zip(&minus[mu]).map(|(a, b)| (a - b) / (2.0 * eps)).collect()
        })
        .collect()
}

/// Bracket oracle for the flat prolongation: `gamma^A_mu = theta^A([X_mu, Z])`
/// with the bracket from directional finite differences.
pub fn flat_bracket_oracle(
    z: &jet::BundleVectorField,
    p: &jet::JetPoint,
    eps: f64,
) -> Vec<f64> {
    let sig = p.sig;
    let mut out = vec![0.0; sig.base_dim * sig.fiber_dim];
    for mu in 0..sig.base_dim {
        let mut xp = p.x.clone();
        let mut yp = p.y.clone();
        let mut xm = p.x.clone();
        let mut ym = p.y.clone();
        xp[mu] += eps;
        xm[mu] -= eps;
        for b in 0..sig.fiber_dim {
            yp[b] += eps * p.v(b, mu);
            ym[b] -= eps * p.v(b, mu);
        }
        let ap = (z.alpha)(&xp, &yp);
        let am = (z.alpha)(&xm, &ym);
        let bp = (z.beta)(&xp, &yp);
        let bm = (z.beta)(&xm, &ym);
        let dalpha: Vec<f64> = ap.iter().zip(&am).map(|(u, v)| (u - v) / (2.0 * eps)).collect();
        let dbeta: Vec<f64> = bp.iter().zip(&bm).map(|(u, v)| (u - v) / (2.0 * eps)).collect();
        for a in 0..sig.fiber_dim {
            let mut val = dbeta[a];
            for nu in 0..sig.base_dim {
                val -= p.v(a, nu) * dalpha[nu];
            }
            out[a * sig.base_dim + mu] = val;
        }
    }
    out
}

fn jet_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let group = Se3;
    let chart = GroupChart::centered_at_identity(group);

    // Maurer-Cartan equation on 20 random smooth SE(3) sections over a 2D
    // base: Richardson ratio of the residual under step halving.
    let mut ratio_lo = f64::MAX;
    let mut ratio_hi = f64::MIN;
    for _ in 0..20 {
        let sec = random_se3_section(&mut rng);
        let x = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
        let residual = |h: f64| -> f64 {
            let xi_field = |x: &[f64], mu: usize| -> Vec<f64> {
                jet::holonomic_lift_group(&group, &sec, x, h).unwrap().xi[mu].clone()
            };
            let mut xp = x.to_vec();
            xp[0] += h;
            let mut xm = x.to_vec();
            xm[0] -= h;
            let d0_xi1: Vec<f64> = xi_field(&xp, 1)
                .iter()
                .zip(xi_field(&xm, 1))
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            let mut yp = x.to_vec();
            yp[1] += h;
            let mut ym = x.to_vec();
            ym[1] -= h;
            let d1_xi0: Vec<f64> = xi_field(&yp, 0)
                .iter()
                .zip(xi_field(&ym, 0))
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            let p = jet::holonomic_lift_group(&group, &sec, &x, h).unwrap();
            let bracket = group.bracket(&p.xi[0], &p.xi[1]);
            let res: Vec<f64> =
                (0..6).map(|a| d0_xi1[a] - d1_xi0[a] + bracket[a]).collect();
            max_abs(&res)
        };
        let ratio = residual(1e-3) / residual(5e-4);
        ratio_lo = ratio_lo.min(ratio);
        ratio_hi = ratio_hi.max(ratio);
    }
    checks.push(Check {
        name: "jet.maurer-cartan-sections",
        passed: ratio_lo >= 3.0 && ratio_hi <= 5.0,
        detail: format!("20 sections, ratio range [{ratio_lo:.2}, {ratio_hi:.2}] within [3, 5]"),
    });

    // Holonomy: pullback of the contact forms by holonomic lifts.
    let sig = BundleSignature::new(2, 2);
    let sec: Section =
        Arc::new(|x: &[f64]| vec![(x[0] * x[1]).sin(), x[0] * x[0] * x[1] + x[1].cos()]);
    let x = [0.4, -0.3];
    let thetas = jet::contact_forms(sig);
    let flat_residual = |h: f64| -> f64 {
        let sec = sec.clone();
        let lift_map = forms::ChartMap::new(2, sig.jet_chart_dim(), move |b: &[f64]| {
            jet::holonomic_lift(&sec, sig, b, h).chart_coords()
        });
        thetas
            .iter()
            .map(|theta| {
                max_abs(&forms::pullback(&lift_map, theta, 0.5 * h).unwrap().coefficients(&x))
            })
            .fold(0.0_f64, f64::max)
    };
    let r1 = flat_residual(2e-3);
    let r2 = flat_residual(1e-3);
    checks.push(Check::ratio(
        "jet.holonomy-flat",
        r1 / r2,
        3.0,
        5.0,
        format!("residuals {r1:.3e} / {r2:.3e}"),
    ));

    let gsec = random_se3_section(&mut rng);
    let reduced_residual = |h: f64| -> f64 {
        let p_fine = jet::holonomic_lift_group(&group, &gsec, &x, h).unwrap();
        let p_coarse = jet::holonomic_lift_group(&group, &gsec, &x, 2.0 * h).unwrap();
        let mut worst = 0.0_f64;
        for mu in 0..2 {
            let mut base = vec![0.0; 2];
            base[mu] = 1.0;
            let vals = jet::reduced_contact_value(&p_coarse, &base, &p_fine.xi[mu]);
            worst = worst.max(max_abs(&vals));
        }
        worst
    };
    let r1 = reduced_residual(2e-3);
    let r2 = reduced_residual(1e-3);
    checks.push(Check::ratio(
        "jet.holonomy-reduced",
        r1 / r2,
        3.0,
        5.0,
        format!("residuals {r1:.3e} / {r2:.3e}"),
    ));

    // theta^A(X_mu) = 0 exactly on normalized tangents.
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let p = jet::JetPoint::new(
            sig,
            (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        );
        for tangent in jet::normalized_tangents(&p) {
            worst = worst.max(max_abs(&jet::contact_form_value(&p, &tangent)));
        }
        let gp = jet::holonomic_lift_group(&group, &gsec, &x, 1e-4).unwrap();
        for mu in 0..2 {
            let mut base = vec![0.0; 2];
            base[mu] = 1.0;
            worst = worst.max(max_abs(&jet::reduced_contact_value(&gp, &base, &gp.xi[mu])));
        }
    }
    checks.push(Check::bound("jet.contact-normalized-tangents", worst, 0.0));

    // Prolongation cross-validation: 25 flat cases against the bracket
    // oracle, 25 group cases against the transport oracle (all with
    // nonvanishing bracket correction), agreement within 1e-5 at h=1e-4.
    let mut worst_flat = 0.0_f64;
    for _ in 0..25 {
        let c: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cc = c.clone();
        let z = jet::BundleVectorField {
            alpha: Arc::new(move |x: &[f64], y: &[f64]| {
                vec![c[0] * x[1] + c[1] * y[0], c[2] * (x[0] * y[1]).sin()]
            }),
            beta: Arc::new(move |x: &[f64], y: &[f64]| {
                vec![cc[3] * y[0] * y[1] + cc[4] * x[0], cc[5] * (y[0] + cc[6] * x[1]).cos() + cc[7]]
            }),
        };
        let p = jet::JetPoint::new(
            sig,
            (0..2).map(|_| rng.gen_range(-0.8..0.8)).collect(),
            (0..2).map(|_| rng.gen_range(-0.8..0.8)).collect(),
            (0..4).map(|_| rng.gen_range(-0.8..0.8)).collect(),
        );
        let j = jet::prolong_vector(&z, &p, 1e-4);
        let oracle = flat_bracket_oracle(&z, &p, 1e-4);
        for a in 0..2 {
            for mu in 0..2 {
                worst_flat =
                    worst_flat.max((j[sig.v_slot(a, mu)] - oracle[a * 2 + mu]).abs());
            }
        }
    }
    let mut worst_group = 0.0_f64;
    let mut bracket_cases = 0usize;
    for _ in 0..25 {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.6..0.6)).collect();
        let cc = c.clone();
        let z = GroupBundleVectorField::<Se3> {
            alpha: Arc::new(move |x: &[f64], _: &lie::GroupElement| {
                vec![c[0] * x[1], c[1] * x[0].sin()]
            }),
            beta: Arc::new(move |x: &[f64], g: &lie::GroupElement| {
                let r = g.trans();
                vec![
                    cc[2] * x[0] + 0.3,
                    cc[3] * r.x,
                    cc[4] * (x[1] + r.y).cos(),
                    cc[5],
                    0.1 * x[0] * x[1],
                    -0.2 * r.z,
                ]
            }),
        };
        let gsec = random_se3_section(&mut rng);
        let p = jet::holonomic_lift_group(&group, &gsec, &[0.15, 0.1], 1e-4).unwrap();
        let gsig = p.sig();
        let j = jet::prolong_vector_group(&z, &p, &chart, 1e-5).unwrap();
        let oracle = group_transport_oracle(&z, &p, &chart, 1e-4);
        let beta = (z.beta)(&p.x, &p.g);
        let bracket_size = (0..2)
            .map(|mu| max_abs(&group.bracket(&p.xi[mu], &beta)))
            .fold(0.0_f64, f64::max);
        if bracket_size > 1e-2 {
            bracket_cases += 1;
        }
        for mu in 0..2 {
            for a in 0..6 {
                worst_group =
                    worst_group.max((j[gsig.v_slot(a, mu)] - oracle[mu][a]).abs());
            }
        }
    }
    let worst = worst_flat.max(worst_group);
    checks.push(Check {
        name: "jet.prolongation-cross-check",
        passed: worst <= 1e-5 && bracket_cases >= 10,
        detail: format!(
            "50 cases, worst deviation {worst:.3e} (bound 1e-5), \
             {bracket_cases} cases with nonzero bracket correction"
        ),
    });

    checks
}

// ---------------------------------------------------------------------
// variational suite
// ---------------------------------------------------------------------

fn wave_lagrangian() -> LagrangianDensity {
    let sig = BundleSignature::new(2, 1);
    LagrangianDensity::new(sig, |p: &jet::JetPoint| {
        0.5 * (p.v(0, 1).powi(2) - p.v(0, 0).powi(2))
    })
}

fn wave_hamiltonian() -> HamiltonianDensity {
    let sig = BundleSignature::new(2, 1);
    HamiltonianDensity::new(sig, |p: &jet::JetPoint| {
        0.5 * (p.v(0, 1).powi(2) - p.v(0, 0).powi(2))
    })
}

fn rigid_body_lagrangian(j: Matrix6<f64>) -> ReducedLagrangian<Se3> {
    let sig = BundleSignature::new(1, 6);
    ReducedLagrangian::new(sig, false, move |_x, _g, xi: &[Vec<f64>]| {
        let chi = Vector6::from_column_slice(&xi[0]);
        0.5 * (j * chi).dot(&chi)
    })
}

fn variational_suite(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let group = Se3;
    let chart = GroupChart::centered_at_identity(group);

    // Variation theorem on the d'Alembert wave solution.
    let l = wave_lagrangian();
    let sig = l.sig;
    let sec: Section = Arc::new(|x: &[f64]| vec![(x[0] - x[1]).sin()]);
    let w_family = variational::test_vector_fields(sig.jet_chart_dim(), seed);
    let x = [0.4, 0.25];
    let wave_residual = |h: f64| -> f64 {
        let theta = variational::theta_lagrangian(&l, h);
        let omega = variational::multisymplectic(&theta, h);
        let sec = sec.clone();
        let lift_map = forms::ChartMap::new(2, sig.jet_chart_dim(), move |b: &[f64]| {
            jet::holonomic_lift(&sec, sig, b, h).chart_coords()
        });
        // magnitude-scaled steps; uniform steps make the d'Alembert
        // stencils cancel exactly and leave nothing to certify
        let u = lift_map.at(&x);
        let tangents = lift_map.jacobian_columns(&x, h);
        variational::variation_residual(&omega, &u, &tangents, &w_family)
    };
    let r1 = wave_residual(2e-3);
    let r2 = wave_residual(1e-3);
    checks.push(Check::ratio(
        "variational.variation-theorem-wave",
        r1 / r2,
        2.5,
        5.5,
        format!("residuals {r1:.3e} / {r2:.3e}"),
    ));

    // The perturbed non-solution exceeds the solution residual by >= 1e3.
    let bad: Section = Arc::new(|x: &[f64]| vec![(x[0] - 1.4 * x[1]).sin()]);
    let h = 1e-3;
    let theta = variational::theta_lagrangian(&l, h);
    let omega = variational::multisymplectic(&theta, h);
    let bad_map = forms::ChartMap::new(2, sig.jet_chart_dim(), move |b: &[f64]| {
        jet::holonomic_lift(&bad, sig, b, h).chart_coords()
    });
    let u = bad_map.at(&x);
    let tangents = bad_map.jacobian_columns(&x, h);
    let bad_res = variational::variation_residual(&omega, &u, &tangents, &w_family);
    checks.push(Check {
        name: "variational.variation-theorem-detects-nonsolution",
        passed: bad_res > 1e3 * r2,
        detail: format!("non-solution {bad_res:.3e} vs solution {r2:.3e} (factor >= 1e3)"),
    });

    // Variation theorem, reduced: rigid-body relative equilibrium.
    let j_mat = Matrix6::from_diagonal(&Vector6::new(2.0, 1.0, 3.0, 1.0, 1.0, 1.0));
    let l_rb = rigid_body_lagrangian(j_mat);
    let rb_sig = l_rb.sig;
    let chi0 = [0.8, 0.0, 0.0, 0.0, 0.0, 0.0];
    let rb_sec: GroupSection<Se3> = Arc::new(move |x: &[f64]| {
        let scaled: Vec<f64> = chi0.iter().map(|v| v * x[0]).collect();
        Se3.exp(&scaled)
    });
    let w_rb = variational::test_vector_fields(rb_sig.jet_chart_dim(), seed);
    let rb_residual = |h: f64| -> f64 {
        let theta = variational::theta_reduced(&l_rb, &chart, h);
        let omega = variational::multisymplectic(&theta, h);
        let sec = rb_sec.clone();
        let chart2 = chart.clone();
        let lift_map = forms::ChartMap::new(1, rb_sig.jet_chart_dim(), move |b: &[f64]| {
            jet::holonomic_lift_group(&Se3, &sec, b, h)
                .unwrap()
                .chart_coords(&chart2)
                .unwrap()
        });
        let xt = [0.3];
        let u = lift_map.at(&xt);
        let tangents = lift_map.jacobian_columns(&xt, h);
        variational::variation_residual(&omega, &u, &tangents, &w_rb)
    };
    let r1 = rb_residual(2e-3);
    let r2 = rb_residual(1e-3);
    // The relative equilibrium is exact: its residual sits at round-off,
    // which satisfies the O(h^2) claim outright; the ratio window applies
    // only when truncation error is resolvable.
    let ratio = r1 / r2;
    checks.push(Check {
        name: "variational.variation-theorem-rigid-body",
        passed: (r1.max(r2) < 1e-9) || (2.5..=5.5).contains(&ratio),
        detail: format!("residuals {r1:.3e} / {r2:.3e} (round-off level or ratio {ratio:.2})"),
    });

    // Legendre round trip dh/dpi = xi to 1e-6 on seeded quadratics.
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let mut m = Matrix6::<f64>::zeros();
        for i in 0..6 {
            for k in 0..6 {
                m[(i, k)] = rng.gen_range(-1.0..1.0);
            }
        }
        let q = m.transpose() * m + Matrix6::identity() * 0.5;
        let q_inv = q.try_inverse().unwrap();
        let lsig = BundleSignature::new(1, 6);
        let ham = ReducedHamiltonian::<Se3>::new(lsig, false, move |_x, _g, pi: &[Vec<f64>]| {
            let p = Vector6::from_column_slice(&pi[0]);
            0.5 * (q_inv * p).dot(&p)
        });
        let lagr = ReducedLagrangian::<Se3>::new(lsig, false, move |_x, _g, xi: &[Vec<f64>]| {
            let v = Vector6::from_column_slice(&xi[0]);
            0.5 * (q * v).dot(&v)
        });
        let xi: Vec<Vec<f64>> = vec![(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()];
        let p = GJetPoint::<Se3> { x: vec![0.0], g: Se3.identity(), xi: xi.clone() };
        let mm = variational::legendre_reduced(&lagr, &p, 1e-5);
        let back = ham.dpi(&[0.0], &Se3.identity(), &mm.pi, 1e-5);
        for a in 0..6 {
            worst = worst.max((back[0][a] - xi[0][a]).abs());
        }
    }
    checks.push(Check::bound("variational.legendre-round-trip", worst, 1e-6));

    // DDW momentum row equals the Euler-Lagrange residual (flat, wave).
    let ham = wave_hamiltonian();
    let generic: Section = Arc::new(|x: &[f64]| vec![(0.8 * x[0] - x[1]).sin() + 0.2 * x[0]]);
    let h = 1e-3;
    let dual = variational::conjugate_section(&l, &generic, h);
    let ddw = variational::ddw_residuals(&ham, &dual, &x, h);
    let el = variational::euler_lagrange_residual(&l, &generic, &x, h);
    checks.push(Check::bound(
        "variational.ddw-equals-euler-lagrange",
        (ddw.momentum[0] - el[0]).abs(),
        1e-6,
    ));

    // Reduced pair: DDWL equals the Euler-Poincaré residual on a generic
    // rigid-body section through the Legendre transform.
    let j_inv = j_mat.try_inverse().unwrap();
    let ham_rb = ReducedHamiltonian::<Se3>::new(rb_sig, false, move |_x, _g, pi: &[Vec<f64>]| {
        let p = Vector6::from_column_slice(&pi[0]);
        0.5 * (j_inv * p).dot(&p)
    });
    let generic_chi: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let gc = generic_chi.clone();
    let generic_sec: GroupSection<Se3> = Arc::new(move |x: &[f64]| {
        // curved path: exp(t chi) exp(t^2 chi') is not an EP solution
        let m1: Vec<f64> = gc.iter().map(|v| v * x[0]).collect();
        let m2: Vec<f64> = gc.iter().rev().map(|v| 0.4 * v * x[0] * x[0]).collect();
        Se3.compose(&Se3.exp(&m1), &Se3.exp(&m2))
    });
    let lrb = l_rb.clone();
    let grp = group;
    let dual_rb: variational::ReducedDualSection<Se3> = {
        let sec = generic_sec.clone();
        Arc::new(move |x: &[f64]| {
            let p = jet::holonomic_lift_group(&grp, &sec, x, 1e-3).unwrap();
            let mm = variational::legendre_reduced(&lrb, &p, 1e-5);
            (p.g.clone(), mm.pi)
        })
    };
    let ddwp =
        variational::ddwp_residuals_left(&group, &ham_rb, &dual_rb, &chart, &[0.3], 1e-3)
            .unwrap();
    let ep =
        variational::euler_poincare_residual(&group, &l_rb, &generic_sec, &chart, &[0.3], 1e-3)
            .unwrap();
    let mut worst = 0.0_f64;
    for a in 0..6 {
        worst = worst.max((ddwp.scalar[a] - ep[a]).abs());
    }
    checks.push(Check::bound("variational.ddwp-equals-euler-poincare", worst, 1e-6));

    // Canonical-form equation X ⌟ Omega* = (−1)^n DH on the wave solution.
    let dim = sig.jet_chart_dim();
    let base = sig.base_dim;
    let dual = variational::conjugate_section(&l, &sec, h);
    let q = dual.at(&x);
    let jac = dual.jacobian_columns_raw(&x, h);
    let mut omega_star = FormField::zero(dim, base + 1);
    for a in 0..sig.fiber_dim {
        for mu in 0..base {
            omega_star = omega_star.add(
                &wedge(
                    &wedge(
                        &FormField::dx(dim, sig.y_slot(a)),
                        &FormField::dx(dim, sig.v_slot(a, mu)),
                    )
                    .unwrap(),
                    &variational::base_dnx(dim, base, mu),
                )
                .unwrap(),
            );
        }
    }
    let dh = variational::dh_one_form(&ham, &dual, &x, h);
    let sign = if (base - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut worst = 0.0_f64;
    for w in &w_family {
        let wv = w.at(&q);
        let mut args: Vec<&[f64]> = jac.iter().map(|c| c.as_slice()).collect();
        args.push(&wv);
        let lhs = omega_star.evaluate(&q, &args);
        let rhs = sign * dh.evaluate(&q, &[wv.as_slice()]);
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
    }
    checks.push(Check::bound("variational.canonical-form-ch3", worst, 5e-4));

    // Noether closedness: d(sigma* J) is second order on solutions.
    let abelian = Abelian { dim: 1 };
    let asig = BundleSignature::new(2, 1);
    let l_red = ReducedLagrangian::<Abelian>::new(asig, false, |_x, _g, xi: &[Vec<f64>]| {
        0.5 * (xi[1][0] * xi[1][0] - xi[0][0] * xi[0][0])
    });
    let asec: GroupSection<Abelian> = Arc::new(|x: &[f64]| vec![(x[0] - x[1]).sin()]);
    let balance =
        variational::noether_balance(&abelian, &l_red, &asec, &[0.3, 0.6], 1e-3).unwrap();
    checks.push(Check::bound("variational.noether-closedness", max_abs(&balance), 1e-5));

    // Reduced multisymplectic closed form (G_SFH) against −dTheta_h.
    let theta_h = variational::theta_hamiltonian_reduced(&ham_rb, &chart, 1e-4);
    let omega_h_fd = variational::multisymplectic(&theta_h, 1e-3);
    let lambda = jet::maurer_cartan_form(&chart, rb_sig.jet_chart_dim(), 1, 1e-4);
    let bracket_fn: forms::AlgebraBracket =
        Arc::new(move |a: &[f64], b: &[f64]| Se3.bracket(a, b));
    let lambda_bracket = forms::g_bracket_pointwise(&lambda, &lambda, bracket_fn);
    let rb_dim = rb_sig.jet_chart_dim();
    let mut omega_closed = FormField::zero(rb_dim, 2);
    for a in 0..6 {
        omega_closed = omega_closed.add(
            &wedge(&lambda.components[a], &FormField::dx(rb_dim, rb_sig.v_slot(a, 0))).unwrap(),
        );
        let slot = rb_sig.v_slot(a, 0);
        omega_closed = omega_closed
            .add(&lambda_bracket.components[a].scale_fn(Arc::new(move |u: &[f64]| u[slot])));
    }
    // + dh ∧ ω with ω = dx^0
    let ham_rb2 = ham_rb.clone();
    let chart2 = chart.clone();
    let dh_red = FormField::new(rb_dim, 1, move |u: &[f64]| {
        let xv = &u[..1];
        let y = &u[1..7];
        let g = chart2.point(y);
        let pi: Vec<Vec<f64>> = vec![(0..6).map(|q| u[rb_sig.v_slot(q, 0)]).collect()];
        let mut c = vec![0.0; rb_dim];
        c[0] = ham_rb2.dx(xv, &g, &pi, 1e-4)[0];
        let dyv = ham_rb2.dy_chart(&chart2, xv, &g, &pi, 1e-4).unwrap();
        for (b, v) in dyv.into_iter().enumerate() {
            c[1 + b] = v;
        }
        let dpi = ham_rb2.dpi(xv, &g, &pi, 1e-4);
        for a in 0..6 {
            c[rb_sig.v_slot(a, 0)] = dpi[0][a];
        }
        c
    });
    omega_closed =
        omega_closed.add(&wedge(&dh_red, &variational::base_volume(rb_dim, 1)).unwrap());
    let mut worst = 0.0_f64;
    for _ in 0..3 {
        let mut u: Vec<f64> = (0..rb_dim).map(|_| rng.gen_range(-0.4..0.4)).collect();
        u[0] = 0.2;
        let afd = omega_h_fd.coefficients(&u);
        let acl = omega_closed.coefficients(&u);
        for (p, q) in afd.iter().zip(&acl) {
            worst = worst.max((p - q).abs());
        }
    }
    checks.push(Check::bound("variational.omega-reduced-closed-form", worst, 1e-5));

    checks
}

// ---------------------------------------------------------------------
// beam suite
// ---------------------------------------------------------------------

fn beam_pulse_initial(params: &BeamParams) -> BeamState {
    beam::initial_reference(params, |s: f64| {
        let mut c = [0.0; 6];
        // superposed translational pulse and gentle twist, with a net drift
        // so the total momentum is a meaningful conservation scale
        c[4] = 0.02 * (-((s - 0.4) / 0.12).powi(2)).exp() + 0.01;
        c[0] = 0.01 * (-((s - 0.6) / 0.15).powi(2)).exp();
        AlgebraElement::from_slice(&c)
    })
}

fn beam_reduced_lagrangian(params: &BeamParams) -> ReducedLagrangian<Se3> {
    let j = params.inertia;
    let c = params.hooke;
    let eps0 = params.reference_strain.to_vector();
    ReducedLagrangian::new(BundleSignature::new(2, 6), false, move |_x, _g, xi: &[Vec<f64>]| {
        let eps = Vector6::from_column_slice(&xi[0]);
        let chi = Vector6::from_column_slice(&xi[1]);
        let de = eps - eps0;
        0.5 * ((j * chi).dot(&chi) - (c * de).dot(&de))
    })
}

/// Right-variable beam Hamiltonian: `h'(g, Pi) = h_left(Ad*_g Pi)` with
/// `h_left(sigma, pi) = 1/2 pi J^-1 pi − 1/2 sigma C^-1 sigma + <sigma, eps0>`.
fn beam_right_hamiltonian(
    params: &BeamParams,
    potential: Option<f64>,
) -> ReducedHamiltonian<Se3> {
    let j_inv = params.inertia.try_inverse().unwrap();
    let c_inv = params.hooke.try_inverse().unwrap();
    let eps0 = params.reference_strain.to_vector();
    ReducedHamiltonian::new(
        BundleSignature::new(2, 6),
        true,
        move |_x, g: &lie::GroupElement, pi: &[Vec<f64>]| {
            let sigma_l =
                lie::coadjoint(g, &AlgebraCovector::from_slice(&pi[0])).to_vector();
            let pi_l = lie::coadjoint(g, &AlgebraCovector::from_slice(&pi[1])).to_vector();
            let mut val = 0.5 * (j_inv * pi_l).dot(&pi_l) - 0.5 * (c_inv * sigma_l).dot(&sigma_l)
                + sigma_l.dot(&eps0);
            if let Some(a) = potential {
                // symmetry-breaking potential: depends on the placement
                val += a * (g.rot() * Vec3::x()).y;
            }
            val
        },
    )
}

struct BeamWindow {
    params: BeamParams,
    /// Five consecutive states; divergences of lifted currents sample up
    /// to two steps away from the central one.
    states: Vec<BeamState>,
}

impl BeamWindow {
    fn mid(&self) -> &BeamState {
        &self.states[2]
    }
}

fn beam_window(n_s: usize, dt: f64, lead: usize) -> BeamWindow {
    let params = BeamParams::unit(n_s, dt);
    params.validate().unwrap();
    let mut state = beam_pulse_initial(&params);
    for _ in 0..lead {
        state = beam::step(&params, &state, None).unwrap();
    }
    let mut states = vec![state];
    for _ in 0..4 {
        let next = beam::step(&params, states.last().unwrap(), None).unwrap();
        states.push(next);
    }
    BeamWindow { params, states }
}

/// Grid-snapped group section over the window: `x = (s, t)` must land on
/// grid nodes covered by the stored states.
fn window_section(w: &BeamWindow) -> GroupSection<Se3> {
    let ds = w.params.ds();
    let dt = w.params.dt;
    let t_mid = w.mid().t;
    let states = w.states.clone();
    Arc::new(move |x: &[f64]| {
        let i = (x[0] / ds).round() as isize;
        let k = ((x[1] - t_mid) / dt).round() as isize + 2;
        let i = i.clamp(0, states[0].h.len() as isize - 1) as usize;
        assert!(
            (x[0] - i as f64 * ds).abs() < 1e-9 * (1.0 + x[0].abs()),
            "off-grid s sample"
        );
        assert!((0..=4).contains(&k), "off-window t sample");
        states[k as usize].h[i].clone()
    })
}

fn beam_suite(_seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    let group = Se3;
    let chart = GroupChart::centered_at_identity(group);

    // Criterion: free-free conservation over 10 000 steps at N_s = 100.
    {
        let params = BeamParams::unit(100, 2e-3);
        params.validate().unwrap();
        let mut state = beam_pulse_initial(&params);
        let p0 = beam::total_right_momentum(&params, &state);
        let (ek0, ep0) = beam::energy(&params, &state);
        let e0 = ek0 + ep0;
        let mut max_drift = 0.0_f64;
        let mut momentum_scale = p0.amax();
        for _ in 0..10_000 {
            state = beam::step(&params, &state, Some(10.0 * e0)).unwrap();
            let p = beam::total_right_momentum(&params, &state);
            momentum_scale = momentum_scale.max(p.amax());
            max_drift = max_drift.max((p - p0).amax());
        }
        let rel = max_drift / momentum_scale;
        checks.push(Check::bound("beam.momentum-drift", rel, 1e-4));
        let (ek, ep) = beam::energy(&params, &state);
        checks.push(Check::bound(
            "beam.energy-drift",
            ((ek + ep) - e0).abs() / e0,
            1e-3,
        ));
        let worst_defect =
            state.h.iter().map(|h| h.orthonormal_defect()).fold(0.0_f64, f64::max);
        checks.push(Check::bound("beam.group-invariants", worst_defect, 1e-9));
    }

    // Criterion: the conservation-law field and d(sigma*J) both converge at
    // order ~2 under simultaneous grid halving, measured two ways: via the
    // solver's right momenta and via the Noether machinery of the
    // variational layer.
    {
        let residuals = |n_s: usize, dt: f64, lead: usize| -> (f64, f64) {
            let w = beam_window(n_s, dt, lead);
            let report =
                beam::conservation_report(&w.params, &w.states[1..4], dt);
            let direct = report[0].conservation_max;
            // Noether route: divergence of Ad*_{g^-1} (dl/dxi) on the grid
            let l = beam_reduced_lagrangian(&w.params);
            let sec = window_section(&w);
            let steps = [w.params.ds(), w.params.dt];
            let mut noether = 0.0_f64;
            let n = w.params.n_s;
            for i in (n / 5..4 * n / 5).step_by(n / 10) {
                let x = [i as f64 * w.params.ds(), w.mid().t];
                let balance = variational::noether_balance_steps(
                    &group, &l, &sec, &x, &steps, 1e-5,
                )
                .unwrap();
                noether = noether.max(max_abs(&balance));
            }
            (direct, noether)
        };
        let (d1, n1) = residuals(51, 4e-3, 13);
        let (d2, n2) = residuals(101, 2e-3, 26);
        checks.push(Check::ratio(
            "beam.conservation-order",
            d1 / d2,
            3.0,
            5.0,
            format!("solver-route residuals {d1:.3e} / {d2:.3e}"),
        ));
        checks.push(Check::ratio(
            "beam.noether-closedness-order",
            n1 / n2,
            3.0,
            5.0,
            format!("current-route residuals {n1:.3e} / {n2:.3e}"),
        ));
    }

    // Criterion: rigid-body limit.
    {
        let inertia = Matrix6::from_diagonal(&Vector6::new(3.0, 2.0, 1.0, 1.0, 1.0, 1.0));
        let chi0 = AlgebraElement::new(Vec3::new(0.8, 0.0, 0.0), Vec3::zeros());
        let mut run =
            beam::RigidBodyRun { t: 0.0, h: lie::GroupElement::identity(), chi: chi0 };
        for _ in 0..1000 {
            run = beam::rigid_body_step(&inertia, &run, 1e-3);
        }
        checks.push(Check::bound(
            "beam.rigid-body-principal-axis",
            run.chi.sub(&chi0).norm(),
            1e-9,
        ));

        // energy drift per period scales at the integrator's fourth order
        let energy_drift = |dt: f64| -> f64 {
            let chi0 = AlgebraElement::new(Vec3::new(0.9, 0.5, -0.4), Vec3::zeros());
            let e = |chi: &AlgebraElement| {
                let v = chi.to_vector();
                0.5 * (inertia * v).dot(&v)
            };
            let mut run =
                beam::RigidBodyRun { t: 0.0, h: lie::GroupElement::identity(), chi: chi0 };
            let e0 = e(&run.chi);
            let period = 2.0 * std::f64::consts::PI / 0.9;
            let steps = (period / dt).round() as usize;
            let mut worst = 0.0_f64;
            for _ in 0..steps {
                run = beam::rigid_body_step(&inertia, &run, dt);
                worst = worst.max((e(&run.chi) - e0).abs());
            }
            worst
        };
        let r1 = energy_drift(4e-3);
        let r2 = energy_drift(2e-3);
        checks.push(Check::ratio(
            "beam.rigid-body-energy-order",
            r1 / r2,
            10.0,
            22.0,
            format!("drifts {r1:.3e} / {r2:.3e} (4-stage scheme, expect ~16)"),
        ));

        // spatial momentum (n = 0 Noether current) stays fixed
        let chi1 = AlgebraElement::new(Vec3::new(0.4, 0.7, -0.3), Vec3::new(0.1, 0.0, 0.2));
        let mut run =
            beam::RigidBodyRun { t: 0.0, h: lie::GroupElement::identity(), chi: chi1 };
        let pi_of = |run: &beam::RigidBodyRun| {
            let pi = AlgebraCovector::from_slice((inertia * run.chi.to_vector()).as_slice());
            lie::coadjoint_inv(&run.h, &pi).to_vector()
        };
        let pi0 = pi_of(&run);
        let mut worst = 0.0_f64;
        for _ in 0..1000 {
            run = beam::rigid_body_step(&inertia, &run, 5e-5);
            worst = worst.max((pi_of(&run) - pi0).amax());
        }
        checks.push(Check::bound("beam.rigid-body-spatial-momentum", worst, 1e-8));
    }

    // Criterion: Hamiltonian Noether cancellation on beam solutions, and
    // its failure under a symmetry-breaking potential.
    {
        let cancellation = |n_s: usize, dt: f64, lead: usize, potential: Option<f64>| -> f64 {
            let w = beam_window(n_s, dt, lead);
            let ham = beam_right_hamiltonian(&w.params, potential);
            let sec = window_section(&w);
            let (sigma_r, pi_r) = beam::spatial_momenta(&w.params, w.mid());
            let ds = w.params.ds();
            let momenta = move |x: &[f64]| -> Vec<Vec<f64>> {
                let i = (x[0] / ds).round() as usize;
                vec![
                    sigma_r[i].to_vector().as_slice().to_vec(),
                    pi_r[i].to_vector().as_slice().to_vec(),
                ]
            };
            let steps = [w.params.ds(), w.params.dt];
            let n = w.params.n_s;
            let mut worst = 0.0_f64;
            for i in (n / 5..4 * n / 5).step_by(n / 10) {
                let x = [i as f64 * w.params.ds(), w.mid().t];
                let out = variational::hamiltonian_noether_cancellation_steps(
                    &group, &ham, &sec, &momenta, &chart, &x, &steps, 1e-5,
                )
                .unwrap();
                worst = worst.max(max_abs(&out));
            }
            worst
        };
        let c1 = cancellation(51, 4e-3, 13, None);
        let c2 = cancellation(101, 2e-3, 26, None);
        checks.push(Check::ratio(
            "beam.noether-cancellation-order",
            c1 / c2,
            2.5,
            6.0,
            format!("residuals {c1:.3e} / {c2:.3e}"),
        ));
        let broken = cancellation(101, 2e-3, 26, Some(0.05));
        checks.push(Check {
            name: "beam.noether-cancellation-detects-broken-symmetry",
            passed: broken > 100.0 * c2 && broken > 1e-3,
            detail: format!("broken {broken:.3e} vs intact {c2:.3e}"),
        });
    }

    // Cross-module: the Euler-Poincaré residual of the variational layer,
    // evaluated on solver output over the grid, is second order.
    {
        let ep_residual = |n_s: usize, dt: f64, lead: usize| -> f64 {
            let w = beam_window(n_s, dt, lead);
            let l = beam_reduced_lagrangian(&w.params);
            let sec = window_section(&w);
            let steps = [w.params.ds(), w.params.dt];
            let n = w.params.n_s;
            let mut worst = 0.0_f64;
            for i in (n / 5..4 * n / 5).step_by(n / 10) {
                let x = [i as f64 * w.params.ds(), w.mid().t];
                let res = variational::euler_poincare_residual_steps(
                    &group, &l, &sec, &chart, &x, &steps, 1e-5,
                )
                .unwrap();
                worst = worst.max(max_abs(&res));
            }
            worst
        };
        let r1 = ep_residual(51, 4e-3, 13);
        let r2 = ep_residual(101, 2e-3, 26);
        checks.push(Check::ratio(
            "beam.euler-poincare-order",
            r1 / r2,
            2.5,
            6.0,
            format!("residuals {r1:.3e} / {r2:.3e}"),
        ));
    }

    // De Donder-Weyl-Poincaré left residual on beam output: the scalar
    // momentum equation through the reduced Hamiltonian is second order.
    // An equal-spacing grid (ds = dt, Courant 1, well inside the stability
    // region of the four-stage scheme) lets one step serve both directions.
    {
        let ddwp_residual = |n_s: usize, lead: usize| -> f64 {
            let mut params = BeamParams::unit(n_s, 1.0 / (n_s - 1) as f64);
            params.cfl_safety = 1.0;
            params.validate().unwrap();
            let mut state = beam_pulse_initial(&params);
            for _ in 0..lead {
                state = beam::step(&params, &state, None).unwrap();
            }
            let mut states = vec![state];
            for _ in 0..4 {
                let next = beam::step(&params, states.last().unwrap(), None).unwrap();
                states.push(next);
            }
            let w = BeamWindow { params, states };
            let j_inv = w.params.inertia.try_inverse().unwrap();
            let c_inv = w.params.hooke.try_inverse().unwrap();
            let eps0 = w.params.reference_strain.to_vector();
            let ham_left = ReducedHamiltonian::<Se3>::new(
                BundleSignature::new(2, 6),
                false,
                move |_x, _g, pi: &[Vec<f64>]| {
                    let sigma = Vector6::from_column_slice(&pi[0]);
                    let pi_t = Vector6::from_column_slice(&pi[1]);
                    0.5 * (j_inv * pi_t).dot(&pi_t) - 0.5 * (c_inv * sigma).dot(&sigma)
                        + sigma.dot(&eps0)
                },
            );
            let ds = w.params.ds();
            let dt = w.params.dt;
            let t_mid = w.mid().t;
            let states = w.states.clone();
            let params2 = w.params.clone();
            let dual: variational::ReducedDualSection<Se3> = Arc::new(move |x: &[f64]| {
                let i = (x[0] / ds).round() as usize;
                let k = (((x[1] - t_mid) / dt).round() as isize + 2) as usize;
                let st = &states[k];
                let sigma = beam::stress(&params2, &st.eps[i]).to_vector();
                let pi = beam::momentum(&params2, &st.chi[i]).to_vector();
                (
                    st.h[i].clone(),
                    vec![sigma.as_slice().to_vec(), pi.as_slice().to_vec()],
                )
            });
            let n = w.params.n_s;
            let mut worst = 0.0_f64;
            for i in (n / 5..4 * n / 5).step_by(n / 10) {
                let x = [i as f64 * ds, t_mid];
                let res = variational::ddwp_residuals_left(
                    &group, &ham_left, &dual, &chart, &x, ds,
                )
                .unwrap();
                worst = worst.max(max_abs(&res.scalar));
            }
            worst
        };
        let r1 = ddwp_residual(51, 13);
        let r2 = ddwp_residual(101, 26);
        checks.push(Check::ratio(
            "beam.ddwp-left-order",
            r1 / r2,
            2.5,
            6.0,
            format!("residuals {r1:.3e} / {r2:.3e}"),
        ));
    }

    // Free-free left boundary actually enforces sigma = 0 while a clamped
    // boundary pins the placement (already covered by unit tests); here the
    // wave-speed sanity check ties the discretization to the physics.
    {
        let mut params = BeamParams::unit(401, 2.5e-4);
        let mut c_diag = Vector6::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        c_diag[3] = 2.25;
        params.hooke = Matrix6::from_diagonal(&c_diag);
        params.validate().unwrap();
        let mut state = beam::initial_reference(&params, |s: f64| {
            let mut c = [0.0; 6];
            c[3] = 1e-4 * (-((s - 0.25) / 0.05).powi(2)).exp();
            AlgebraElement::from_slice(&c)
        });
        let steps = (0.3 / params.dt).round() as usize;
        for _ in 0..steps {
            state = beam::step(&params, &state, None).unwrap();
        }
        let ds = params.ds();
        let mut best_i = 0;
        let mut best = 0.0;
        for i in 0..params.n_s {
            let amp = (state.eps[i].sub(&params.reference_strain)).norm();
            if i as f64 * ds > 0.3 && amp > best {
                best = amp;
                best_i = i;
            }
        }
        let f = |i: usize| (state.eps[i].sub(&params.reference_strain)).norm();
        let (fm, f0, fp) = (f(best_i - 1), f(best_i), f(best_i + 1));
        let delta = 0.5 * (fm - fp) / (fm - 2.0 * f0 + fp);
        let peak_s = (best_i as f64 + delta) * ds;
        let measured = (peak_s - 0.25) / (steps as f64 * params.dt);
        let rel = (measured - 1.5).abs() / 1.5;
        checks.push(Check::bound("beam.axial-wave-speed", rel, 0.02));
    }

    checks
}
