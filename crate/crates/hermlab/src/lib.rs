//! hermlab: a numerical laboratory for Hermitian surface geometry.
//!
//! The crate evaluates curvature, torsion and Hodge-theoretic quantities of
//! explicit Hermitian metrics on compact complex-surface models (flat torus
//! cells and the standard Hopf annulus), and verifies a registry of pointwise
//! and integral identities relating them, reporting residuals and
//! Kahler-criterion diagnostics.
//!
//! Module layout:
//! - [`jets`]: order-2 Wirtinger jet arithmetic and a finite-difference oracle
//! - [`expr`]: metric-component expressions and metric files
//! - [`geometry`]: connection and curvature tensors at a point
//! - [`forms`]: (p,q)-form algebra, Hodge star, codifferentials
//! - [`domains`]: fundamental domains, quadrature, deterministic reductions
//! - [`checks`]: the identity registry and diagnostics
//! - [`gallery`]: built-in metrics
//! - [`report`]: machine-readable run reports

pub mod domains;
pub mod expr;
pub mod forms;
pub mod gallery;
pub mod geometry;
pub mod jets;

pub mod checks;
pub mod report;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::domains::DomainModel;
    use crate::expr::{parse, MetricField};
    use crate::jets::C;

    pub fn honest(z1: C, z2: C) -> [C; 4] {
        [z1, z2, z1.conj(), z2.conj()]
    }

    /// A periodic torus metric with a non-diagonal Hermitian block, used to
    /// catch index-order mistakes that diagonal metrics cannot see.
    pub fn skew_torus() -> MetricField {
        MetricField {
            name: "skew_torus".into(),
            domain: DomainModel::Torus { periods: [1.0; 4] },
            h: [
                [
                    parse("2 + 0.1*cos(pi*(z1 + zb1))").unwrap(),
                    parse("0.2 + 0.05*i*sin(pi*(z2 + zb2))").unwrap(),
                ],
                [
                    parse("0.2 - 0.05*i*sin(pi*(z2 + zb2))").unwrap(),
                    parse("1.5 + 0.1*sin(pi*(z1 + zb1))").unwrap(),
                ],
            ],
        }
    }
}
