//! Group operations used by the jet and variational layers, abstracted so
//! that the reduced machinery runs both on SE(3) and on abelian vector
//! groups (where it must collapse to the flat formalism).
//!
//! Algebra elements and covectors travel as plain coordinate slices in the
//! chosen basis; for SE(3) the ordering is angular-first as in [`crate::lie`].

use thiserror::Error;

use crate::lie;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("group chart singular: rotation angle {0} within 1e-6 of pi")]
    ChartSingularity(f64),
    #[error("change-of-basis matrix is singular")]
    SingularBasisChange,
}

pub trait GroupOps: Clone + Send + Sync + 'static {
    type Point: Clone + Send + Sync;

    fn algebra_dim(&self) -> usize;
    fn identity(&self) -> Self::Point;
    fn compose(&self, a: &Self::Point, b: &Self::Point) -> Self::Point;
    fn inverse(&self, a: &Self::Point) -> Self::Point;
    fn exp(&self, xi: &[f64]) -> Self::Point;
    fn log(&self, g: &Self::Point) -> Result<Vec<f64>, GroupError>;
    /// Lie bracket `[a, b] = ad_a b` in algebra coordinates.
    fn bracket(&self, a: &[f64], b: &[f64]) -> Vec<f64>;
    /// Coadjoint action of the algebra, `ad*_a mu`.
    fn coad(&self, a: &[f64], mu: &[f64]) -> Vec<f64>;
    /// Adjoint action of the group, `Ad_g xi`.
    fn adjoint(&self, g: &Self::Point, xi: &[f64]) -> Vec<f64>;
    /// Coadjoint action of the group, `Ad*_g mu`, satisfying
    /// `<Ad*_g mu, xi> = <mu, Ad_g xi>`.
    fn coadjoint_group(&self, g: &Self::Point, mu: &[f64]) -> Vec<f64>;
}

/// SE(3) with the closed-form operations from [`crate::lie`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Se3;

impl Se3 {
    pub fn algebra(c: &[f64]) -> lie::AlgebraElement {
        lie::AlgebraElement::from_slice(c)
    }

    pub fn covector(c: &[f64]) -> lie::AlgebraCovector {
        lie::AlgebraCovector::from_slice(c)
    }
}

impl GroupOps for Se3 {
    type Point = lie::GroupElement;

    fn algebra_dim(&self) -> usize {
        6
    }

    fn identity(&self) -> Self::Point {
        lie::GroupElement::identity()
    }

    fn compose(&self, a: &Self::Point, b: &Self::Point) -> Self::Point {
        a.compose(b)
    }

    fn inverse(&self, a: &Self::Point) -> Self::Point {
        a.inverse()
    }

    fn exp(&self, xi: &[f64]) -> Self::Point {
        lie::exp_group(&Self::algebra(xi))
    }

    fn log(&self, g: &Self::Point) -> Result<Vec<f64>, GroupError> {
        let angle = lie::rotation_angle(g);
        if std::f64::consts::PI - angle < 1e-6 {
            return Err(GroupError::ChartSingularity(angle));
        }
        Ok(lie::log_group(g).to_vector().as_slice().to_vec())
    }

    fn bracket(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        lie::ad(&Self::algebra(a), &Self::algebra(b)).to_vector().as_slice().to_vec()
    }

    fn coad(&self, a: &[f64], mu: &[f64]) -> Vec<f64> {
        lie::ad_star(&Self::algebra(a), &Self::covector(mu)).to_vector().as_slice().to_vec()
    }

    fn adjoint(&self, g: &Self::Point, xi: &[f64]) -> Vec<f64> {
        lie::adjoint(g, &Self::algebra(xi)).to_vector().as_slice().to_vec()
    }

    fn coadjoint_group(&self, g: &Self::Point, mu: &[f64]) -> Vec<f64> {
        lie::coadjoint(g, &Self::covector(mu)).to_vector().as_slice().to_vec()
    }
}

/// The abelian vector group (R^n, +): exp and log are the identity and all
/// brackets vanish, so the reduced formalism collapses to the flat one.
#[derive(Clone, Copy, Debug)]
pub struct Abelian {
    pub dim: usize,
}

impl GroupOps for Abelian {
    type Point = Vec<f64>;

    fn algebra_dim(&self) -> usize {
        self.dim
    }

    fn identity(&self) -> Self::Point {
        vec![0.0; self.dim]
    }

    fn compose(&self, a: &Self::Point, b: &Self::Point) -> Self::Point {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inverse(&self, a: &Self::Point) -> Self::Point {
        a.iter().map(|x| -x).collect()
    }

    fn exp(&self, xi: &[f64]) -> Self::Point {
        xi.to_vec()
    }

    fn log(&self, g: &Self::Point) -> Result<Vec<f64>, GroupError> {
        Ok(g.clone())
    }

    fn bracket(&self, _a: &[f64], _b: &[f64]) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    fn coad(&self, _a: &[f64], _mu: &[f64]) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    fn adjoint(&self, _g: &Self::Point, xi: &[f64]) -> Vec<f64> {
        xi.to_vec()
    }

    fn coadjoint_group(&self, _g: &Self::Point, mu: &[f64]) -> Vec<f64> {
        mu.to_vec()
    }
}

/// Canonical coordinates of the first kind around a reference point:
/// `coords(g) = log(ref^-1 g)`, `point(y) = ref · exp(y)`.
#[derive(Clone)]
pub struct GroupChart<G: GroupOps> {
    pub group: G,
    pub reference: G::Point,
}

impl<G: GroupOps> GroupChart<G> {
    pub fn new(group: G, reference: G::Point) -> Self {
        Self { group, reference }
    }

    pub fn centered_at_identity(group: G) -> Self {
        let reference = group.identity();
        Self { group, reference }
    }

    pub fn coords(&self, g: &G::Point) -> Result<Vec<f64>, GroupError> {
        self.group.log(&self.group.compose(&self.group.inverse(&self.reference), g))
    }

    pub fn point(&self, y: &[f64]) -> G::Point {
        self.group.compose(&self.reference, &self.group.exp(y))
    }
}
