//! Per-point evaluation of every connection and curvature tensor of a
//! Hermitian surface metric from its 2-jet.
//!
//! Index conventions: tensors are stored in the coordinate frame with
//! 0-based indices; a trailing `bar` index of a mixed tensor is the column
//! index of the stored array.  `hinv[i][j]` is the inverse-metric component
//! `h^{i jbar}` satisfying `sum_j h_{k jbar} h^{i jbar} = delta_{ki}`.
//!
//! Jet validity: metric jets are exact through second order, so Christoffel
//! and torsion jets (one derivative extracted) are exact through first order
//! and curvature *values* (two extractions) are exact.  Nothing here reads a
//! slot beyond its validity.

use crate::expr::{MetricError, MetricField};
use crate::jets::{C, Jet2};

const C0: C = C::new(0.0, 0.0);

/// Metric 2-jet with inverse and log-determinant.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub h: [[Jet2; 2]; 2],
    pub hinv: [[Jet2; 2]; 2],
    pub det: Jet2,
    pub dethlog: Jet2,
}

impl MetricJet {
    /// Build from component jets, enforcing Hermitian symmetry (honest points
    /// only) and positivity.
    pub fn new(h: [[Jet2; 2]; 2], p: [C; 4]) -> Result<Self, MetricError> {
        let scale = h
            .iter()
            .flatten()
            .map(|j| j.val.norm())
            .fold(1.0_f64, f64::max);
        let herm = (h[1][0].val - h[0][1].val.conj())
            .norm()
            .max(h[0][0].val.im.abs())
            .max(h[1][1].val.im.abs())
            / scale;
        if herm > 1e-8 {
            return Err(MetricError::Hermitian { point: p, residual: herm });
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det.val.re <= 0.0 {
            return Err(MetricError::NotPositive { point: p, what: "det h", value: det.val });
        }
        if h[0][0].val.re <= 0.0 {
            return Err(MetricError::NotPositive { point: p, what: "h11", value: h[0][0].val });
        }
        let inv = det.recip().expect("det bounded away from zero");
        let hinv = [
            [h[1][1] * inv, -(h[1][0] * inv)],
            [-(h[0][1] * inv), h[0][0] * inv],
        ];
        let dethlog = det.ln().expect("positive determinant");
        Ok(MetricJet { h, hinv, det, dethlog })
    }

    /// Constant metric jet (used by algebraic tests).
    pub fn from_const(hval: [[C; 2]; 2]) -> Self {
        let h = [
            [Jet2::constant(hval[0][0]), Jet2::constant(hval[0][1])],
            [Jet2::constant(hval[1][0]), Jet2::constant(hval[1][1])],
        ];
        Self::new(h, [C0; 4]).expect("constant test metric must be admissible")
    }

    pub fn h_val(&self) -> [[C; 2]; 2] {
        [[self.h[0][0].val, self.h[0][1].val], [self.h[1][0].val, self.h[1][1].val]]
    }

    pub fn hinv_val(&self) -> [[C; 2]; 2] {
        [
            [self.hinv[0][0].val, self.hinv[0][1].val],
            [self.hinv[1][0].val, self.hinv[1][1].val],
        ]
    }
}

/// Evaluate the metric 2-jet at an honest chart point.
pub fn metric_at(field: &MetricField, p: [C; 4]) -> Result<MetricJet, MetricError> {
    MetricJet::new(field.h_jets(p)?, p)
}

/// Every tensor of the curvature/torsion inventory at one point.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub p: [C; 4],
    pub mj: MetricJet,
    /// Gamma^k_{ij} as `gamma[k][i][j]`; symmetric in (i, j).
    pub gamma: [[[Jet2; 2]; 2]; 2],
    /// Gamma^k_{ibar j} as `gamma_bar[k][i][j]` (first lower index barred).
    pub gamma_bar: [[[Jet2; 2]; 2]; 2],
    /// Chern connection cGamma^p_{ik} as `cgamma[p][i][k]`.
    pub cgamma: [[[Jet2; 2]; 2]; 2],
    /// Torsion T^k_{ij} as `t[k][i][j]`; antisymmetric in (i, j).
    pub t: [[[Jet2; 2]; 2]; 2],
    /// Torsion trace T_i.
    pub t_tr: [Jet2; 2],
    /// R_{i jbar k lbar}.
    pub rc: [[[[C; 2]; 2]; 2]; 2],
    /// R_{k i jbar lbar} as `[k][i][j][l]`.
    pub r_hhbb: [[[[C; 2]; 2]; 2]; 2],
    /// R_{k i j lbar} as `[k][i][j][l]`.
    pub rh: [[[[C; 2]; 2]; 2]; 2],
    /// Complexified Ricci (1,1) block: Ric_{i jbar}.
    pub ric_h: [[C; 2]; 2],
    /// Complexified Ricci (2,0) block: Ric_{ij}.
    pub ric_hol: [[C; 2]; 2],
    /// Chern curvature Theta_{i jbar k lbar}.
    pub theta: [[[[C; 2]; 2]; 2]; 2],
    pub theta1: [[C; 2]; 2],
    /// Theta^(1) recomputed from -dd log det h (definitional cross-check).
    pub theta1_logdet: [[C; 2]; 2],
    pub theta2: [[C; 2]; 2],
    pub theta4: [[C; 2]; 2],
    /// Chern covariant derivative nabla^ch_i T_j.
    pub nabla_ch_t: [[C; 2]; 2],
    /// M_{ij} = nabla_i T_j + nabla_j T_i (Chern connection).
    pub m2: [[C; 2]; 2],
    /// Same assembled with the Levi-Civita connection.
    pub m2_lc: [[C; 2]; 2],
    /// Coefficient matrix of sqrt(-1) T box Tbar.
    pub t_box: [[C; 2]; 2],
    /// Coefficient matrix of sqrt(-1) T circ Tbar.
    pub t_circ: [[C; 2]; 2],
    /// Coefficient matrix of sqrt(-1) T((d* omega)^sharp).
    pub t_sharp: [[C; 2]; 2],
    pub s11: C,
    pub s: C,
    pub s_c: C,
    /// Chern scalar recomputed as the trace of Theta^(2).
    pub s_c_alt: C,
}

/// Direction index of z^i (i in 0..2) and of zbar^i.
#[inline]
fn bar(i: usize) -> usize {
    i + 2
}

impl PointFrame {
    pub fn compute(field: &MetricField, p: [C; 4], trace_scale: f64) -> Result<Self, MetricError> {
        let mj = metric_at(field, p)?;
        Ok(Self::from_metric_jet(mj, p, trace_scale))
    }

    pub fn from_metric_jet(mj: MetricJet, p: [C; 4], trace_scale: f64) -> Self {
        let h = &mj.h;
        let hinv = &mj.hinv;

        let mut gamma = [[[Jet2::zero(); 2]; 2]; 2];
        let mut gamma_bar = [[[Jet2::zero(); 2]; 2]; 2];
        let mut cgamma = [[[Jet2::zero(); 2]; 2]; 2];
        let mut t = [[[Jet2::zero(); 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut g = Jet2::zero();
                    let mut gb = Jet2::zero();
                    let mut cg = Jet2::zero();
                    let mut tt = Jet2::zero();
                    for l in 0..2 {
                        g = g + hinv[k][l] * (h[j][l].d_jet(i) + h[i][l].d_jet(j));
                        gb = gb + hinv[k][l] * (h[j][l].d_jet(bar(i)) - h[j][i].d_jet(bar(l)));
                        cg = cg + hinv[k][l] * h[j][l].d_jet(i);
                        tt = tt + hinv[k][l] * (h[j][l].d_jet(i) - h[i][l].d_jet(j));
                    }
                    gamma[k][i][j] = g * 0.5;
                    gamma_bar[k][i][j] = gb * 0.5;
                    cgamma[k][i][j] = cg;
                    t[k][i][j] = tt;
                }
            }
        }
        let t_tr = [t[0][0][0] + t[1][0][1], t[0][1][0] + t[1][1][1]];

        // Full complexified Christoffel table Gamma^C_{AB}; the Hermitian
        // property kills Gamma^kbar_{ij} and Gamma^k_{ibar jbar}, the rest
        // follow from the two computed blocks by conjugation.
        let mut gam = [[[Jet2::zero(); 4]; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    gam[i][j][k] = gamma[k][i][j];
                    gam[bar(i)][bar(j)][bar(k)] = gamma[k][i][j].wirt_conj();
                    gam[bar(i)][j][k] = gamma_bar[k][i][j];
                    gam[j][bar(i)][k] = gamma_bar[k][i][j];
                    let conj_mixed = gamma_bar[k][j][i].wirt_conj();
                    gam[bar(i)][j][bar(k)] = conj_mixed;
                    gam[j][bar(i)][bar(k)] = conj_mixed;
                }
            }
        }

        // R_{ABC}^S = -(d_B Gamma^S_{AC} - d_A Gamma^S_{BC}
        //             + Gamma^F_{AC} Gamma^S_{FB} - Gamma^F_{BC} Gamma^S_{AF}).
        let r_upper = |a: usize, b: usize, cc: usize, s: usize| -> C {
            let mut acc = gam[a][cc][s].d[b] - gam[b][cc][s].d[a];
            for f in 0..4 {
                acc += gam[a][cc][f].val * gam[f][b][s].val;
                acc -= gam[b][cc][f].val * gam[a][f][s].val;
            }
            -acc
        };
        let lower = |a: usize, b: usize, cc: usize, l: usize| -> C {
            (0..2).map(|s| r_upper(a, b, cc, s) * h[s][l].val).sum()
        };

        let mut rc = [[[[C0; 2]; 2]; 2]; 2];
        let mut r_hhbb = [[[[C0; 2]; 2]; 2]; 2];
        let mut rh = [[[[C0; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        rc[i][j][k][l] = lower(i, bar(j), k, l);
                        r_hhbb[i][j][k][l] = lower(i, j, bar(k), l);
                        rh[i][j][k][l] = lower(i, j, k, l);
                    }
                }
            }
        }

        let mut ric_h = [[C0; 2]; 2];
        let mut ric_hol = [[C0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut a = C0;
                let mut b = C0;
                for k in 0..2 {
                    for l in 0..2 {
                        a += hinv[k][l].val * (r_hhbb[k][i][j][l] + rc[k][j][i][l]);
                        b += hinv[k][l].val * (rh[k][i][j][l] + rh[k][j][i][l]);
                    }
                }
                ric_h[i][j] = a;
                ric_hol[i][j] = b;
            }
        }

        let mut theta = [[[[C0; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let mut v = -h[k][l].dd_at(i, bar(j));
                        for pq in 0..2 {
                            for q in 0..2 {
                                v += hinv[pq][q].val * h[pq][l].d[bar(j)] * h[k][q].d[i];
                            }
                        }
                        theta[i][j][k][l] = v;
                    }
                }
            }
        }
        let trace11 = |m: &[[C; 2]; 2], hinv: &[[Jet2; 2]; 2]| -> C {
            let mut acc = C0;
            for i in 0..2 {
                for j in 0..2 {
                    acc += hinv[i][j].val * m[i][j];
                }
            }
            acc
        };
        let mut theta1 = [[C0; 2]; 2];
        let mut theta1_logdet = [[C0; 2]; 2];
        let mut theta2 = [[C0; 2]; 2];
        let mut theta4 = [[C0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut t1 = C0;
                let mut t2v = C0;
                let mut t4 = C0;
                for k in 0..2 {
                    for l in 0..2 {
                        t1 += hinv[k][l].val * theta[i][j][k][l];
                        t2v += hinv[k][l].val * theta[k][l][i][j];
                        t4 += hinv[k][l].val * theta[k][j][i][l];
                    }
                }
                theta1[i][j] = t1;
                theta1_logdet[i][j] = -mj.dethlog.dd_at(i, bar(j));
                theta2[i][j] = t2v;
                theta4[i][j] = t4;
            }
        }

        let mut nabla_ch_t = [[C0; 2]; 2];
        let mut nabla_lc_t = [[C0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut ch = t_tr[j].d[i];
                let mut lc = t_tr[j].d[i];
                for k in 0..2 {
                    ch -= cgamma[k][i][j].val * t_tr[k].val;
                    lc -= gamma[k][i][j].val * t_tr[k].val;
                }
                nabla_ch_t[i][j] = ch;
                nabla_lc_t[i][j] = lc;
            }
        }
        let mut m2 = [[C0; 2]; 2];
        let mut m2_lc = [[C0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m2[i][j] = nabla_ch_t[i][j] + nabla_ch_t[j][i];
                m2_lc[i][j] = nabla_lc_t[i][j] + nabla_lc_t[j][i];
            }
        }

        let mut t_box = [[C0; 2]; 2];
        let mut t_circ = [[C0; 2]; 2];
        let mut t_sharp = [[C0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut bx = C0;
                let mut ci = C0;
                for pp in 0..2 {
                    for q in 0..2 {
                        for k in 0..2 {
                            for l in 0..2 {
                                bx += hinv[pp][q].val
                                    * h[k][l].val
                                    * t[k][i][pp].val
                                    * t[l][j][q].val.conj();
                                for ss in 0..2 {
                                    for tt in 0..2 {
                                        ci += hinv[pp][q].val
                                            * hinv[ss][tt].val
                                            * h[k][j].val
                                            * h[i][l].val
                                            * t[k][ss][pp].val
                                            * t[l][tt][q].val.conj();
                                    }
                                }
                            }
                        }
                    }
                }
                t_box[i][j] = bx;
                t_circ[i][j] = ci;
                let mut sh = C0;
                for k in 0..2 {
                    for pp in 0..2 {
                        for ss in 0..2 {
                            for l in 0..2 {
                                sh += h[k][j].val
                                    * t[k][pp][i].val
                                    * hinv[pp][ss].val
                                    * gamma_bar[l][ss][l].val;
                            }
                        }
                    }
                }
                t_sharp[i][j] = -2.0 * sh;
            }
        }

        let s11 = trace11(&ric_h, hinv) * trace_scale;
        let s = 2.0 * s11;
        let s_c = trace11(&theta1, hinv) * trace_scale;
        let s_c_alt = trace11(&theta2, hinv) * trace_scale;

        PointFrame {
            p,
            mj,
            gamma,
            gamma_bar,
            cgamma,
            t,
            t_tr,
            rc,
            r_hhbb,
            rh,
            ric_h,
            ric_hol,
            theta,
            theta1,
            theta1_logdet,
            theta2,
            theta4,
            nabla_ch_t,
            m2,
            m2_lc,
            t_box,
            t_circ,
            t_sharp,
            s11,
            s,
            s_c,
            s_c_alt,
        }
    }

    /// Lowered torsion T_{k i lbar} = h_{s lbar} T^s_{ki} as a jet.
    pub fn t_lowered(&self, k: usize, i: usize, l: usize) -> Jet2 {
        self.mj.h[0][l] * self.t[0][k][i] + self.mj.h[1][l] * self.t[1][k][i]
    }

    /// Chern covariant derivative of the lowered torsion,
    /// `nabla^ch_j T_{k i lbar}`.
    pub fn nabla_ch_t_lowered(&self, j: usize, k: usize, i: usize, l: usize) -> C {
        let mut v = self.t_lowered(k, i, l).d[j];
        for q in 0..2 {
            v -= self.cgamma[q][j][k].val * self.t_lowered(q, i, l).val;
            v -= self.cgamma[q][j][i].val * self.t_lowered(k, q, l).val;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn honest(z1: C, z2: C) -> [C; 4] {
        [z1, z2, z1.conj(), z2.conj()]
    }

    fn max4(t: &[[[[C; 2]; 2]; 2]; 2]) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m = m.max(t[i][j][k][l].norm());
                    }
                }
            }
        }
        m
    }

    #[test]
    fn flat_torus_frame_is_zero() {
        let m = gallery::load("torus_flat", None).unwrap();
        let f = PointFrame::compute(&m, honest(c(0.3, 0.7), c(0.1, 0.9)), 1.0).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(f.gamma[k][i][j].val, C0);
                    assert_eq!(f.t[k][i][j].val, C0);
                }
            }
        }
        assert_eq!(max4(&f.rc), 0.0);
        assert_eq!(max4(&f.theta), 0.0);
        assert_eq!(f.s, C0);
        assert_eq!(f.s_c, C0);
        assert_eq!(f.mj.dethlog.val, C0);
    }

    #[test]
    fn hopf_anchor_values_at_p0() {
        let m = gallery::load("hopf_standard", None).unwrap();
        let p = honest(c(1.0, 0.0), c(0.0, 0.0));
        let f = PointFrame::compute(&m, p, 1.0).unwrap();

        assert!((f.t_tr[0].val - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(f.t_tr[1].val.norm() < 1e-12);
        assert!((f.t[1][0][1].val - c(-1.0, 0.0)).norm() < 1e-12, "T^2_{{12}} = -1");

        // Theta^(1) = diag(0, 2) and its log-det route agrees.
        assert!((f.theta1[0][0]).norm() < 1e-12);
        assert!((f.theta1[1][1] - c(2.0, 0.0)).norm() < 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                assert!((f.theta1[i][j] - f.theta1_logdet[i][j]).norm() < 1e-10);
            }
        }

        // Ricci (2,0) block: R_{11} = -1/2, rest zero.
        assert!((f.ric_hol[0][0] - c(-0.5, 0.0)).norm() < 1e-10, "{}", f.ric_hol[0][0]);
        assert!(f.ric_hol[0][1].norm() < 1e-10);
        assert!(f.ric_hol[1][1].norm() < 1e-10);

        // nabla^ch T = 0 identically for this metric.
        for i in 0..2 {
            for j in 0..2 {
                assert!(f.m2[i][j].norm() < 1e-11);
                assert!((f.m2[i][j] - f.m2_lc[i][j]).norm() < 1e-10);
            }
        }

        assert!((f.s_c - c(2.0, 0.0)).norm() < 1e-11);
        assert!((f.s_c_alt - c(2.0, 0.0)).norm() < 1e-10);
        assert!((f.s11 - c(1.5, 0.0)).norm() < 1e-10);
        assert!(f.s.im.abs() < 1e-11);

        // sqrt(-1) T box Tbar = |d* omega|^2 omega: here the identity matrix.
        assert!((f.t_box[0][0] - c(1.0, 0.0)).norm() < 1e-11);
        assert!((f.t_box[1][1] - c(1.0, 0.0)).norm() < 1e-11);
        assert!(f.t_box[0][1].norm() < 1e-12);
    }

    #[test]
    fn hopf_metric_values() {
        let m = gallery::load("hopf_standard", None).unwrap();
        let mj = metric_at(&m, honest(c(2.0, 0.0), c(0.0, 0.0))).unwrap();
        assert!((mj.h[0][0].val - c(0.25, 0.0)).norm() < 1e-14);
        assert!((mj.h[1][1].val - c(0.25, 0.0)).norm() < 1e-14);

        let mj = metric_at(&m, honest(c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(mj.h[0][0].val, c(1.0, 0.0));
        assert!((mj.dethlog.val).norm() < 1e-14);
        assert!((mj.dethlog.d[0] - c(-2.0, 0.0)).norm() < 1e-13);
        // h . hinv = identity through first derivatives.
        for i in 0..2 {
            for j in 0..2 {
                let mut prod = Jet2::zero();
                for l in 0..2 {
                    prod = prod + mj.h[i][l] * mj.hinv[j][l];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod.val - c(expect, 0.0)).norm() < 1e-12);
                for d in 0..4 {
                    assert!(prod.d[d].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn torsion_relation_pins_gamma_bar() {
        // 2 Gamma^k_{ibar j} = conj(T^q_{ip}) h_{j qbar} h^{k pbar}, and the
        // contracted form 2 Gamma^k_{ibar k} = conj(T_i).
        for m in [gallery::load("hopf_standard", None).unwrap(), crate::testutil::skew_torus()] {
            for p in m.domain.sample_points(8, 3) {
                let f = PointFrame::compute(&m, p, 1.0).unwrap();
                for k in 0..2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut rhs = C0;
                            for q in 0..2 {
                                for pp in 0..2 {
                                    rhs += f.t[q][i][pp].val.conj()
                                        * f.mj.h[j][q].val
                                        * f.mj.hinv[k][pp].val;
                                }
                            }
                            let lhs = 2.0 * f.gamma_bar[k][i][j].val;
                            assert!(
                                (lhs - rhs).norm() < 1e-12,
                                "gamma_bar relation failed at {p:?} [{k}{i}{j}]: {lhs} vs {rhs}"
                            );
                        }
                    }
                }
                for i in 0..2 {
                    let tr = 2.0 * (f.gamma_bar[0][i][0].val + f.gamma_bar[1][i][1].val);
                    assert!((tr - f.t_tr[i].val.conj()).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conformal_torus_gamma_matches_oracle() {
        let m = gallery::load("torus_conformal", Some(0.1)).unwrap();
        let p = honest(c(0.21, 0.68), c(0.55, 0.13));
        let f = PointFrame::compute(&m, p, 1.0).unwrap();
        // Gamma^1_{11} = d_{z1} u for h = e^u I.
        let u = crate::expr::parse("0.1*cos(pi*(z1 + zb1))").unwrap();
        let du = crate::expr::fd_oracle_expr(&u, p, &[0], 1e-4, true).unwrap();
        assert!((f.gamma[0][0][0].val - du).norm() < 1e-8);
    }

    #[test]
    fn riemann_symmetries_on_hopf() {
        let m = gallery::load("hopf_standard", None).unwrap();
        for p in m.domain.sample_points(6, 11) {
            let f = PointFrame::compute(&m, p, 1.0).unwrap();
            let mut pair_swap = 0.0_f64;
            let mut bianchi = 0.0_f64;
            let mut scale = 0.0_f64;
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            scale = scale.max(f.rc[i][j][k][l].norm());
                            pair_swap =
                                pair_swap.max((f.rc[i][j][k][l] - f.rc[k][l][i][j]).norm());
                            // R_{i jb k lb} + R_{i k lb jb} + R_{i lb jb k} = 0,
                            // with R_{i lb jb k} = -R_{i lb k jb}.
                            let sum = f.rc[i][j][k][l] + f.r_hhbb[i][k][l][j] - f.rc[i][l][k][j];
                            bianchi = bianchi.max(sum.norm());
                        }
                    }
                }
            }
            assert!(pair_swap < 1e-11 * scale.max(1.0), "pair swap {pair_swap}");
            assert!(bianchi < 1e-10 * scale.max(1.0), "bianchi {bianchi}");
        }
    }

    #[test]
    fn curvature_torsion_formula_and_trace() {
        // R_{k i j lbar} = 1/2 nabla^ch_j T_{k i lbar}
        //                 + 1/4 T_{i q lbar} T^q_{kj} - 1/4 T_{k q lbar} T^q_{ij},
        // and T^k_{iq} T^q_{jk} = T_i T_j on a surface.
        for (id, eps) in [("hopf_standard", None), ("torus_conformal", Some(0.1))] {
            let m = gallery::load(id, eps).unwrap();
            for p in m.domain.sample_points(5, 7) {
                let f = PointFrame::compute(&m, p, 1.0).unwrap();
                for k in 0..2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            for l in 0..2 {
                                let mut rhs = 0.5 * f.nabla_ch_t_lowered(j, k, i, l);
                                for q in 0..2 {
                                    rhs += 0.25 * f.t_lowered(i, q, l).val * f.t[q][k][j].val;
                                    rhs -= 0.25 * f.t_lowered(k, q, l).val * f.t[q][i][j].val;
                                }
                                let lhs = f.rh[k][i][j][l];
                                assert!(
                                    (lhs - rhs).norm() < 1e-10,
                                    "{id} torsion curvature formula at {p:?}: {lhs} vs {rhs}"
                                );
                            }
                        }
                    }
                }
                for i in 0..2 {
                    for j in 0..2 {
                        let mut contr = C0;
                        for q in 0..2 {
                            for k in 0..2 {
                                contr += f.t[k][i][q].val * f.t[q][j][k].val;
                            }
                        }
                        let prod = f.t_tr[i].val * f.t_tr[j].val;
                        assert!((contr - prod).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn ricci_conjugation_symmetry() {
        let m = gallery::load("torus_conformal", Some(0.1)).unwrap();
        for p in m.domain.sample_points(6, 5) {
            let f = PointFrame::compute(&m, p, 1.0).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((f.ric_h[i][j].conj() - f.ric_h[j][i]).norm() < 1e-11);
                    assert!((f.theta1[i][j].conj() - f.theta1[j][i]).norm() < 1e-11);
                    assert!((f.ric_hol[i][j] - f.ric_hol[j][i]).norm() < 1e-11);
                }
            }
            assert!(f.s.im.abs() < 1e-11);
            assert!(f.s_c.im.abs() < 1e-11);
            assert!((f.s_c - f.s_c_alt).norm() < 1e-10);
        }
    }

    #[test]
    fn rescale_leaves_connection_and_torsion_fixed() {
        let m = gallery::load("hopf_standard", None).unwrap();
        let m2 = m.scaled(2.5);
        for p in m.domain.sample_points(5, 2) {
            let a = PointFrame::compute(&m, p, 1.0).unwrap();
            let b = PointFrame::compute(&m2, p, 1.0).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((a.gamma[k][i][j].val - b.gamma[k][i][j].val).norm() < 1e-12);
                        assert!((a.cgamma[k][i][j].val - b.cgamma[k][i][j].val).norm() < 1e-12);
                        assert!((a.t[k][i][j].val - b.t[k][i][j].val).norm() < 1e-12);
                    }
                }
            }
            for i in 0..2 {
                assert!((a.t_tr[i].val - b.t_tr[i].val).norm() < 1e-12);
            }
        }
    }
}
