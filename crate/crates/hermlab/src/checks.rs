//! The identity registry: every curvature/torsion identity the engine checks,
//! as a named residual computation, plus Kahler/Gauduchon/curvature-sign
//! diagnostics.
//!
//! Residual bookkeeping: for an identity `LHS = RHS`, `residual_abs` is the
//! magnitude of the worst component of `LHS - RHS` and `normalization` is the
//! sum of the magnitudes of every additive term on both sides, so that a
//! check cannot pass vacuously just because both sides are tiny.  Pointwise
//! checks report the worst sample point; integral checks compare global
//! quadrature totals whose two sides are assembled from independent
//! computation paths.

use crate::domains::{deterministic_reduce, DomainError, QuadratureRule};
use crate::expr::{MetricError, MetricField};
use crate::forms::{d_split, wedge, Conventions, Dashboard, FormCtx, FormValue};
use crate::geometry::PointFrame;
use crate::jets::{C, Jet2};
use serde::Serialize;

const C0: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);
const EPS_NORM: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Pointwise,
    Integral,
    Operator,
}

/// One identity's residual record.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub paper_ref: String,
    pub kind: CheckKind,
    pub residual_abs: f64,
    pub normalization: f64,
    pub residual_rel: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub resolution: Option<u32>,
}

impl CheckResult {
    fn new(
        spec: &IdentitySpec,
        residual_abs: f64,
        normalization: f64,
        tolerance: f64,
        resolution: Option<u32>,
    ) -> Self {
        let residual_rel = residual_abs / normalization.max(EPS_NORM);
        CheckResult {
            id: spec.id.to_string(),
            paper_ref: spec.paper_ref.to_string(),
            kind: spec.kind,
            residual_abs,
            normalization,
            residual_rel,
            tolerance,
            pass: residual_rel <= tolerance,
            resolution,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentitySpec {
    pub id: &'static str,
    pub paper_ref: &'static str,
    pub kind: CheckKind,
}

/// Relative tolerances per check kind.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub pointwise: f64,
    pub integral: f64,
    pub operator: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        // Jets are exact at double precision; only quadrature truncation
        // limits the integral checks.
        Tolerances { pointwise: 1e-9, integral: 1e-6, operator: 1e-9 }
    }
}

pub const POINTWISE_REGISTRY: [IdentitySpec; 13] = [
    IdentitySpec { id: "P1", kind: CheckKind::Pointwise, paper_ref: "Theta^(2) = Theta^(1) - (del del* w + dbar dbar* w) + (Lambda del del* w) w" },
    IdentitySpec { id: "P2", kind: CheckKind::Pointwise, paper_ref: "Ric^(1,1) = Theta^(1) - (del del* w + dbar dbar* w)/2 + (i/2) dbar* w ^ del* w + (Lambda del del* w - |dbar* w|^2) w" },
    IdentitySpec { id: "P3", kind: CheckKind::Pointwise, paper_ref: "Ric_ij = -(nabla_i T_j + nabla_j T_i)/2 - T_i T_j / 2" },
    IdentitySpec { id: "P4", kind: CheckKind::Pointwise, paper_ref: "i T box Tbar = |del* w|^2 w ; i T circ Tbar = -2 T((del* w)#) = 2|dbar* w|^2 w - 2 i dbar* w ^ del* w" },
    IdentitySpec { id: "P5", kind: CheckKind::Pointwise, paper_ref: "i del dbar w = i dbar* w ^ del* w ^ w - (dbar dbar* w) ^ w ; i Lambda del dbar w = (|del* w|^2 - Lambda dbar dbar* w) w" },
    IdentitySpec { id: "P6", kind: CheckKind::Pointwise, paper_ref: "del w = -i dbar* w ^ w" },
    IdentitySpec { id: "P7", kind: CheckKind::Pointwise, paper_ref: "del* del w + dbar dbar* w = (Lambda dbar dbar* w) w ; dbar* del w = del dbar* w" },
    IdentitySpec { id: "P8", kind: CheckKind::Pointwise, paper_ref: "Lambda del del* w = Lambda dbar dbar* w = |dbar* w|^2 - i del* dbar* w" },
    IdentitySpec { id: "P9", kind: CheckKind::Pointwise, paper_ref: "R_{i jb k lb} = R_{k lb i jb} ; R_{i jb k lb} + R_{i k lb jb} + R_{i lb jb k} = 0" },
    IdentitySpec { id: "P10", kind: CheckKind::Pointwise, paper_ref: "R_{k i j lb} = nabla^ch_j T_{k i lb}/2 + T_{i q lb} T^q_{kj}/4 - T_{k q lb} T^q_{ij}/4 ; T^k_{iq} T^q_{jk} = T_i T_j ; M(Chern) = M(Levi-Civita)" },
    IdentitySpec { id: "P11", kind: CheckKind::Pointwise, paper_ref: "s_11 = s_c + Lambda dbar dbar* w - (3/2)|dbar* w|^2" },
    IdentitySpec { id: "P12", kind: CheckKind::Pointwise, paper_ref: "r^(2) = Theta^(1) - (del del* w + dbar dbar* w)/2 - (i/4) T circ Tbar + (i/4) T box Tbar = Ric^(1,1) - (Lambda del del* w - (3/4)|del* w|^2) w" },
    IdentitySpec { id: "P13", kind: CheckKind::Operator, paper_ref: "[dbar*, L] = i (del + tau) applied to test fields" },
];

pub const INTEGRAL_REGISTRY: [IdentitySpec; 10] = [
    IdentitySpec { id: "I1", kind: CheckKind::Integral, paper_ref: "((del del* w + dbar dbar* w)/2, i dbar* w ^ del* w) = -(|del* w|^2, Lambda dbar dbar* w) + |Ric^(2,0)|^2 - |M|^2/4 + (3/4)(|dbar* w|^4, 1)" },
    IdentitySpec { id: "I2", kind: CheckKind::Integral, paper_ref: "|dbar dbar* w|^2 + |Lambda dbar dbar* w|^2 = 2(Ric^(1,1), i dbar* w ^ del* w) + 2|Ric^(2,0)|^2 + (1/2)(|dbar* w|^4, 1)" },
    IdentitySpec { id: "I3", kind: CheckKind::Integral, paper_ref: "codifferential ladder: (dbar dbar* w, del* del w) = -|del dbar* w|^2 ; |dbar dbar* w|^2 = |Lambda dbar dbar* w|^2 + |del dbar* w|^2 ; |del* del w|^2 = |del del* w|^2 = |dbar dbar* w|^2 ; (del del* w, dbar dbar* w) = |Lambda dbar dbar* w|^2 ; quadratic expansion" },
    IdentitySpec { id: "I4", kind: CheckKind::Integral, paper_ref: "(Ric^(1,1), (del* del w + dbar* dbar w)/2) = (|dbar dbar* w|^2 + |Lambda dbar dbar* w|^2)/2 - (3/8)(|dbar* w|^4, 1) - |Ric^(2,0)|^2/2 + |M|^2/8" },
    IdentitySpec { id: "I5", kind: CheckKind::Integral, paper_ref: "4 pi^2 c1^2 = (s^2/4, 1) - |Ric^(1,1)|^2 + (s/2, |dbar* w|^2) - (s, Lambda dbar dbar* w) - |Ric^(2,0)|^2 + |del dbar* w|^2 + (3/4)|2 Lambda dbar dbar* w - |dbar* w|^2|^2" },
    IdentitySpec { id: "I6", kind: CheckKind::Integral, paper_ref: "B-form bookkeeping: |B|^2, 2(Ric^(1,1), B), |Theta^(1)|^2 and (s_c^2, 1) expansions" },
    IdentitySpec { id: "I7", kind: CheckKind::Integral, paper_ref: "4 pi^2 c1^2 = int Theta^(1) ^ Theta^(1) = (s_c^2, 1) - |Theta^(1)|^2" },
    IdentitySpec { id: "I8", kind: CheckKind::Integral, paper_ref: "(Theta^(1), i dbar* w ^ del* w) and (Theta^(2), i dbar* w ^ del* w) against codifferential norms and |M|^2" },
    IdentitySpec { id: "I9", kind: CheckKind::Integral, paper_ref: "|dbar dbar* w|^2 + ((Lambda del del* w - |del* w|^2)^2, 1) = 2(r^(2), i dbar* w ^ del* w) + 2|Ric^(2,0)|^2 ; (Theta^(2), (del* del w + dbar* dbar w)/2) = |dbar dbar* w|^2" },
    IdentitySpec { id: "I10", kind: CheckKind::Integral, paper_ref: "4 pi^2 c1^2 = (s_c^2, 1) - |Theta^(2)|^2 + 2|dbar dbar* w|^2 - (2 s_c, Lambda dbar dbar* w)" },
];

// ---------------------------------------------------------------------------
// Point context
// ---------------------------------------------------------------------------

/// Frame + form machinery + dashboard at one point.
pub struct PointCtx {
    pub frame: PointFrame,
    pub fctx: Box<FormCtx>,
    pub dash: Dashboard,
}

pub fn eval_point(field: &MetricField, p: [C; 4], conv: Conventions) -> Result<PointCtx, MetricError> {
    let trace_scale = conv.trace * conv.gram_forms;
    let frame = PointFrame::compute(field, p, trace_scale)?;
    let fctx = FormCtx::new(&frame.mj, conv);
    let dash = Dashboard::compute(&fctx);
    Ok(PointCtx { frame, fctx, dash })
}

// ---------------------------------------------------------------------------
// Small matrix helpers
// ---------------------------------------------------------------------------

type M2 = [[C; 2]; 2];

fn mzero() -> M2 {
    [[C0; 2]; 2]
}

fn mabs(a: &M2) -> f64 {
    a.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

fn madd(a: &M2, b: &M2) -> M2 {
    let mut o = mzero();
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][j] + b[i][j];
        }
    }
    o
}

fn msub(a: &M2, b: &M2) -> M2 {
    let mut o = mzero();
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][j] - b[i][j];
        }
    }
    o
}

fn mscale(a: &M2, s: C) -> M2 {
    let mut o = *a;
    for row in o.iter_mut() {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    o
}

fn det2(a: &M2) -> C {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Worst-point tracker for one identity: keeps the sample maximizing the
/// relative residual.
#[derive(Clone, Copy, Debug, Default)]
struct Worst {
    res: f64,
    norm: f64,
}

impl Worst {
    fn update(&mut self, res: f64, norm: f64) {
        if res / norm.max(EPS_NORM) > self.res / self.norm.max(EPS_NORM) {
            self.res = res;
            self.norm = norm;
        }
    }
}

// ---------------------------------------------------------------------------
// Pointwise suite
// ---------------------------------------------------------------------------

/// Residual/normalization pairs for P1..P13 at one point.
fn pointwise_residuals(pc: &PointCtx) -> [(f64, f64); 13] {
    let f = &pc.frame;
    let d = &pc.dash;
    let ctx = &pc.fctx;
    let h = f.mj.h_val();
    let mpp = d.ppsw.matrix11();
    let mbb = d.bbsw.matrix11();
    let mtt = d.tt.matrix11();
    let a1 = C::new(d.a1, 0.0);
    let a2 = C::new(d.a2, 0.0);

    let mut out = [(0.0, 0.0); 13];

    // P1: Theta^(2) decomposition.
    {
        let rhs = madd(&msub(&f.theta1, &madd(&mpp, &mbb)), &mscale(&h, d.lam_ppsw));
        let res = mabs(&msub(&f.theta2, &rhs));
        let norm = mabs(&f.theta2)
            + mabs(&f.theta1)
            + mabs(&mpp)
            + mabs(&mbb)
            + mabs(&mscale(&h, d.lam_ppsw));
        out[0] = (res, norm);
    }

    // P2: Ric^(1,1) decomposition.
    {
        let half = C::new(0.5, 0.0);
        let t1 = mscale(&madd(&mpp, &mbb), -half);
        let t2 = mscale(&mtt, half);
        let t3 = mscale(&h, d.lam_ppsw - a1);
        let rhs = madd(&madd(&f.theta1, &t1), &madd(&t2, &t3));
        let res = mabs(&msub(&f.ric_h, &rhs));
        let norm = mabs(&f.ric_h) + mabs(&f.theta1) + mabs(&t1) + mabs(&t2) + mabs(&t3);
        out[1] = (res, norm);
    }

    // P3: Ric^(2,0) torsion formula.
    {
        let mut rhs = mzero();
        for i in 0..2 {
            for j in 0..2 {
                rhs[i][j] = -0.5 * f.m2[i][j] - 0.5 * f.t_tr[i].val * f.t_tr[j].val;
            }
        }
        let res = mabs(&msub(&f.ric_hol, &rhs));
        let norm = mabs(&f.ric_hol) + 0.5 * mabs(&f.m2) + mabs(&rhs);
        out[2] = (res, norm);
    }

    // P4: the two torsion-product identities plus the sharp form.
    {
        let ra = msub(&f.t_box, &mscale(&h, a2));
        let rhs_b = msub(&mscale(&h, 2.0 * a1), &mscale(&mtt, C::new(2.0, 0.0)));
        let rb = msub(&f.t_circ, &rhs_b);
        let rc = madd(&f.t_circ, &mscale(&f.t_sharp, C::new(2.0, 0.0)));
        let res = mabs(&ra).max(mabs(&rb)).max(mabs(&rc));
        let norm = mabs(&f.t_box)
            + mabs(&mscale(&h, a2))
            + mabs(&f.t_circ)
            + mabs(&rhs_b)
            + 2.0 * mabs(&f.t_sharp);
        out[3] = (res, norm);
    }

    // P5: contraction lemma, both displays.
    {
        let lhs22 = d.ddbar_omega.c[15].val;
        let w1 = wedge(&d.tt, &d.omega).c[15].val;
        let w2 = wedge(&d.bbsw, &d.omega).c[15].val;
        let res_a = (lhs22 - (w1 - w2)).norm();
        let norm_a = lhs22.norm() + w1.norm() + w2.norm();
        let lam = d.lam_ddbar.matrix11();
        let rhs = mscale(&h, a2 - d.lam_bbsw);
        let res_b = mabs(&msub(&lam, &rhs));
        // The scalar factor cancels identically on Gauduchon metrics, so its
        // two displayed terms are counted separately in the normalization.
        let norm_b = mabs(&lam) + mabs(&mscale(&h, a2)) + mabs(&mscale(&h, d.lam_bbsw));
        out[4] = combine(&[(res_a, norm_a), (res_b, norm_b)]);
    }

    // P6: del omega = -i dbar* w ^ w.
    {
        let w = wedge(&d.bsw, &d.omega);
        let mut res = 0.0_f64;
        let mut norm = 0.0_f64;
        for m in [0b0111usize, 0b1011] {
            res = res.max((d.p_omega.c[m].val + I * w.c[m].val).norm());
            norm += d.p_omega.c[m].val.norm() + w.c[m].val.norm();
        }
        out[5] = (res, norm);
    }

    // P7: key surface identities for del* del w.
    {
        let mps = d.ps_p_omega.matrix11();
        let lhs = madd(&mps, &mbb);
        let rhs = mscale(&h, d.lam_bbsw);
        let res_a = mabs(&msub(&lhs, &rhs));
        let norm_a = mabs(&mps) + mabs(&mbb) + mabs(&rhs);
        let res_b = (d.bs_p_omega.c[0b0011].val - d.pbsw.c[0b0011].val).norm();
        let norm_b = d.bs_p_omega.c[0b0011].val.norm() + d.pbsw.c[0b0011].val.norm();
        out[6] = combine(&[(res_a, norm_a), (res_b, norm_b)]);
    }

    // P8: Gauduchon-scalar identity.
    {
        let r1 = (d.lam_ppsw - d.lam_bbsw).norm();
        let r2 = (d.lam_bbsw - (a1 - d.ps_bsw)).norm();
        let norm = d.lam_ppsw.norm() + d.lam_bbsw.norm() + a1.norm() + d.ps_bsw.norm();
        out[7] = (r1.max(r2), norm);
    }

    // P9: curvature symmetries.
    {
        let mut swap = (0.0_f64, 0.0_f64);
        let mut bianchi = (0.0_f64, 0.0_f64);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let a = f.rc[i][j][k][l];
                        let b = f.rc[k][l][i][j];
                        swap.0 = swap.0.max((a - b).norm());
                        swap.1 = swap.1.max(a.norm() + b.norm());
                        let t1 = f.rc[i][j][k][l];
                        let t2 = f.r_hhbb[i][k][l][j];
                        let t3 = -f.rc[i][l][k][j];
                        bianchi.0 = bianchi.0.max((t1 + t2 + t3).norm());
                        bianchi.1 = bianchi.1.max(t1.norm() + t2.norm() + t3.norm());
                    }
                }
            }
        }
        out[8] = combine(&[swap, bianchi]);
    }

    // P10: proof-internal curvature-from-torsion identities.
    {
        let mut curv = (0.0_f64, 0.0_f64);
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
                        curv.0 = curv.0.max((lhs - rhs).norm());
                        curv.1 = curv.1.max(lhs.norm() + rhs.norm());
                    }
                }
            }
        }
        let mut contr_id = (0.0_f64, 0.0_f64);
        let mut m_eq = (0.0_f64, 0.0_f64);
        for i in 0..2 {
            for j in 0..2 {
                let mut contr = C0;
                for q in 0..2 {
                    for k in 0..2 {
                        contr += f.t[k][i][q].val * f.t[q][j][k].val;
                    }
                }
                let prod = f.t_tr[i].val * f.t_tr[j].val;
                contr_id.0 = contr_id.0.max((contr - prod).norm());
                contr_id.1 = contr_id.1.max(contr.norm() + prod.norm());
                m_eq.0 = m_eq.0.max((f.m2[i][j] - f.m2_lc[i][j]).norm());
                m_eq.1 = m_eq.1.max(f.m2[i][j].norm() + f.m2_lc[i][j].norm());
            }
        }
        out[9] = combine(&[curv, contr_id, m_eq]);
    }

    // P11: scalar-curvature bridge.
    {
        let rhs = f.s_c + d.lam_bbsw - 1.5 * a1;
        let res = (f.s11 - rhs).norm();
        let norm = f.s11.norm() + f.s_c.norm() + d.lam_bbsw.norm() + 1.5 * a1.norm();
        out[10] = (res, norm);
    }

    // P12: second Ricci curvature of the Levi-Civita connection, two routes.
    {
        let half = C::new(0.5, 0.0);
        let quarter = C::new(0.25, 0.0);
        let lc2_a = madd(
            &msub(&f.theta1, &mscale(&madd(&mpp, &mbb), half)),
            &msub(&mscale(&f.t_box, quarter), &mscale(&f.t_circ, quarter)),
        );
        let lc2_b = msub(&f.ric_h, &mscale(&h, d.lam_ppsw - 0.75 * a2));
        let res = mabs(&msub(&lc2_a, &lc2_b));
        let norm = mabs(&lc2_a) + mabs(&lc2_b);
        out[11] = (res, norm);
    }

    // P13: Bochner commutator on test fields.
    {
        let p = f.p;
        let z1 = Jet2::seed(0, p[0]).expect("dir");
        let z2 = Jet2::seed(1, p[1]).expect("dir");
        let zb2 = Jet2::seed(3, p[3]).expect("dir");
        let mut fields: Vec<FormValue> = Vec::new();
        fields.push(FormValue::scalar(Jet2::constant(C::new(1.0, 0.0))));
        fields.push(d.omega.clone());
        let mut eta = FormValue::zero();
        eta.set(0b0100, z1 * z1 + z2);
        eta.set(0b1000, z1 * zb2);
        fields.push(eta);
        let mut phi = FormValue::zero();
        phi.set(0b0101, z2 * zb2);
        phi.set(0b1001, z1);
        phi.set(0b0110, Jet2::constant(C::new(0.25, -0.5)));
        fields.push(phi);
        let mut res = 0.0_f64;
        let mut norm = 0.0_f64;
        for fv in &fields {
            let lhs =
                &ctx.del_bar_star(&ctx.lefschetz(fv)) - &ctx.lefschetz(&ctx.del_bar_star(fv));
            let (df, _) = d_split(fv);
            let rhs = (&df + &ctx.tau(&d.p_omega, fv)).scale(I);
            res = res.max((&lhs - &rhs).max_abs());
            norm = norm.max(lhs.max_abs() + rhs.max_abs());
        }
        out[12] = (res, norm);
    }

    out
}

/// Grouped identities report the worst absolute sub-residual against the sum
/// of every term of every member; a member whose two sides vanish identically
/// on a particular metric then contributes only its rounding noise instead of
/// a meaningless noise/noise ratio.
fn combine(parts: &[(f64, f64)]) -> (f64, f64) {
    let res = parts.iter().map(|&(r, _)| r).fold(0.0, f64::max);
    let norm = parts.iter().map(|&(_, n)| n).sum();
    (res, norm)
}

/// Run P1..P13 at the given sample points, reporting worst-point residuals.
pub fn run_pointwise_suite(
    field: &MetricField,
    points: &[[C; 4]],
    tols: &Tolerances,
    conv: Conventions,
) -> Result<Vec<CheckResult>, MetricError> {
    let mut worst = [Worst::default(); 13];
    for &p in points {
        let pc = eval_point(field, p, conv)?;
        for (k, (r, n)) in pointwise_residuals(&pc).into_iter().enumerate() {
            worst[k].update(r, n);
        }
    }
    Ok(POINTWISE_REGISTRY
        .iter()
        .zip(worst.iter())
        .map(|(spec, w)| {
            let tol = match spec.kind {
                CheckKind::Operator => tols.operator,
                _ => tols.pointwise,
            };
            CheckResult::new(spec, w.res, w.norm, tol, None)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Integral suite
// ---------------------------------------------------------------------------

/// Quadrature totals of every scalar the integral identities consume.  All
/// fields are integrals against the volume form omega^2/2 except `c1_wedge`,
/// which integrates the (2,2)-form Theta^(1) ^ Theta^(1) directly.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegralTotals {
    pub vol: f64,
    pub a1: f64,
    pub a2: f64,
    pub a1_sq: f64,
    pub a2_sq: f64,
    pub a1_a2: f64,
    pub lam_bb_sq: f64,
    pub n_bb: f64,
    pub n_pp: f64,
    pub n_pbsw: f64,
    pub n_psp: f64,
    pub n_ppbb: f64,
    pub pair_pp_bb: C,
    pub pair_bb_psp: C,
    pub ric11_tt: C,
    pub ric11_dd: C,
    pub ric20_n: f64,
    pub m_n: f64,
    pub th1_tt: C,
    pub th2_tt: C,
    pub th2_dd: C,
    pub lc2_tt: C,
    pub half_ppbb_tt: C,
    pub s_sq4: f64,
    pub ric11_n: f64,
    pub s_half_a1: f64,
    pub s_lam_bb: C,
    pub th1_n: f64,
    pub th2_n: f64,
    pub s_c_sq: f64,
    pub two_lam_bb_minus_a1_sq: f64,
    pub lampp_minus_a2_sq: f64,
    pub b_n: f64,
    pub ric11_b: C,
    pub s11_sq: f64,
    pub s11_a1: f64,
    pub s11_lam_bb: C,
    pub a2_lam_bb: C,
    pub sc_lam_bb: C,
    pub c1_wedge: f64,
}

macro_rules! totals_binop {
    ($a:expr, $b:expr, $($fld:ident),* $(,)?) => {
        IntegralTotals { $( $fld: $a.$fld + $b.$fld, )* }
    };
}

impl IntegralTotals {
    fn add(&self, o: &IntegralTotals) -> IntegralTotals {
        totals_binop!(
            self, o, vol, a1, a2, a1_sq, a2_sq, a1_a2, lam_bb_sq, n_bb, n_pp, n_pbsw, n_psp,
            n_ppbb, pair_pp_bb, pair_bb_psp, ric11_tt, ric11_dd, ric20_n, m_n, th1_tt, th2_tt,
            th2_dd, lc2_tt, half_ppbb_tt, s_sq4, ric11_n, s_half_a1, s_lam_bb, th1_n, th2_n,
            s_c_sq, two_lam_bb_minus_a1_sq, lampp_minus_a2_sq, b_n, ric11_b, s11_sq, s11_a1,
            s11_lam_bb, a2_lam_bb, sc_lam_bb, c1_wedge,
        )
    }
}

fn node_totals(pc: &PointCtx, w: f64) -> Result<IntegralTotals, DomainError> {
    let f = &pc.frame;
    let d = &pc.dash;
    let ctx = &pc.fctx;
    let inner =
        |a: &FormValue, b: &FormValue| -> C { ctx.inner(a, b).expect("matching bidegrees") };

    let ric11 = FormValue::from_matrix11(&f.ric_h);
    let th1 = FormValue::from_matrix11(&f.theta1);
    let th2 = FormValue::from_matrix11(&f.theta2);
    let half = C::new(0.5, 0.0);
    let quarter = C::new(0.25, 0.0);
    let lc2_mat = madd(
        &msub(&f.theta1, &mscale(&madd(&d.ppsw.matrix11(), &d.bbsw.matrix11()), half)),
        &msub(&mscale(&f.t_box, quarter), &mscale(&f.t_circ, quarter)),
    );
    let lc2 = FormValue::from_matrix11(&lc2_mat);
    let avg_dd = (&d.ps_p_omega + &d.bs_bp_omega).scale(half);
    let half_ppbb = (&d.ppsw + &d.bbsw).scale(half);
    let ppbb = &d.ppsw + &d.bbsw;

    let s = f.s.re;
    let s11 = f.s11.re;
    let s_c = f.s_c.re;
    let lam_bb = d.lam_bbsw;
    let lam_pp = d.lam_ppsw;

    let dv = w * 4.0 * f.mj.det.val.re;
    let det_th1 = det2(&f.theta1);

    let mut t = IntegralTotals {
        vol: 1.0,
        a1: d.a1,
        a2: d.a2,
        a1_sq: d.a1 * d.a1,
        a2_sq: d.a2 * d.a2,
        a1_a2: d.a1 * d.a2,
        lam_bb_sq: lam_bb.norm_sqr(),
        n_bb: ctx.norm2(&d.bbsw),
        n_pp: ctx.norm2(&d.ppsw),
        n_pbsw: ctx.norm2(&d.pbsw),
        n_psp: ctx.norm2(&d.ps_p_omega),
        n_ppbb: ctx.norm2(&ppbb),
        pair_pp_bb: inner(&d.ppsw, &d.bbsw),
        pair_bb_psp: inner(&d.bbsw, &d.ps_p_omega),
        ric11_tt: inner(&ric11, &d.tt),
        ric11_dd: inner(&ric11, &avg_dd),
        ric20_n: ctx.tensor2_norm2(&f.ric_hol),
        m_n: ctx.tensor2_norm2(&f.m2),
        th1_tt: inner(&th1, &d.tt),
        th2_tt: inner(&th2, &d.tt),
        th2_dd: inner(&th2, &avg_dd),
        lc2_tt: inner(&lc2, &d.tt),
        half_ppbb_tt: inner(&half_ppbb, &d.tt),
        s_sq4: s * s / 4.0,
        ric11_n: ctx.norm2(&ric11),
        s_half_a1: 0.5 * s * d.a1,
        s_lam_bb: s * lam_bb,
        th1_n: ctx.norm2(&th1),
        th2_n: ctx.norm2(&th2),
        s_c_sq: s_c * s_c,
        two_lam_bb_minus_a1_sq: (2.0 * lam_bb - C::new(d.a1, 0.0)).norm_sqr(),
        lampp_minus_a2_sq: (lam_pp - C::new(d.a2, 0.0)).norm_sqr(),
        b_n: ctx.norm2(&d.b_form),
        ric11_b: inner(&ric11, &d.b_form),
        s11_sq: s11 * s11,
        s11_a1: s11 * d.a1,
        s11_lam_bb: s11 * lam_bb,
        a2_lam_bb: d.a2 * lam_bb.conj(),
        sc_lam_bb: s_c * lam_bb,
        c1_wedge: 0.0,
    };

    // Fold the volume density in; the wedge integrand carries the Lebesgue
    // factor 4 but no det h.
    macro_rules! scale_f64 {
        ($($fld:ident),* $(,)?) => { $( t.$fld *= dv; )* };
    }
    macro_rules! scale_c {
        ($($fld:ident),* $(,)?) => { $( t.$fld = t.$fld * dv; )* };
    }
    scale_f64!(
        vol, a1, a2, a1_sq, a2_sq, a1_a2, lam_bb_sq, n_bb, n_pp, n_pbsw, n_psp, n_ppbb, ric20_n,
        m_n, s_sq4, ric11_n, s_half_a1, th1_n, th2_n, s_c_sq, two_lam_bb_minus_a1_sq,
        lampp_minus_a2_sq, b_n, s11_sq, s11_a1,
    );
    scale_c!(
        pair_pp_bb, pair_bb_psp, ric11_tt, ric11_dd, th1_tt, th2_tt, th2_dd, lc2_tt,
        half_ppbb_tt, s_lam_bb, ric11_b, s11_lam_bb, a2_lam_bb, sc_lam_bb,
    );
    t.c1_wedge = w * 4.0 * 2.0 * det_th1.re;

    if !t.vol.is_finite() || !t.n_bb.is_finite() || !t.ric11_n.is_finite() {
        return Err(DomainError::NonFinite { node: f.p, value: C::new(t.n_bb, 0.0) });
    }
    Ok(t)
}

/// One quadrature pass computing every global total the suite needs.
pub fn integral_totals(
    field: &MetricField,
    rule: &QuadratureRule,
    conv: Conventions,
) -> Result<IntegralTotals, DomainError> {
    deterministic_reduce(
        rule.len(),
        IntegralTotals::default(),
        |i| {
            let pc = eval_point(field, rule.nodes[i], conv)?;
            node_totals(&pc, rule.weights[i])
        },
        |a, b| a.add(b),
    )
}

/// Assemble I1..I10 from the totals.
pub fn integral_checks(t: &IntegralTotals, resolution: u32, tols: &Tolerances) -> Vec<CheckResult> {
    let tol = tols.integral;
    let r = Some(resolution);
    let mut out = Vec::with_capacity(10);
    let spec = |k: usize| &INTEGRAL_REGISTRY[k];

    // I1
    {
        let lhs = t.half_ppbb_tt;
        let rhs = -t.a2_lam_bb + C::new(t.ric20_n - 0.25 * t.m_n + 0.75 * t.a1_sq, 0.0);
        let res = (lhs - rhs).norm();
        let norm = lhs.norm()
            + t.a2_lam_bb.norm()
            + t.ric20_n.abs()
            + 0.25 * t.m_n.abs()
            + 0.75 * t.a1_sq.abs();
        out.push(CheckResult::new(spec(0), res, norm, tol, r));
    }
    // I2
    {
        let lhs = C::new(t.n_bb + t.lam_bb_sq, 0.0);
        let rhs = 2.0 * t.ric11_tt + C::new(2.0 * t.ric20_n + 0.5 * t.a1_sq, 0.0);
        let res = (lhs - rhs).norm();
        let norm = t.n_bb
            + t.lam_bb_sq
            + 2.0 * t.ric11_tt.norm()
            + 2.0 * t.ric20_n
            + 0.5 * t.a1_sq.abs();
        out.push(CheckResult::new(spec(1), res, norm, tol, r));
    }
    // I3: ladder family, worst member.
    {
        let parts = [
            (
                (t.pair_bb_psp + C::new(t.n_pbsw, 0.0)).norm(),
                t.pair_bb_psp.norm() + t.n_pbsw,
            ),
            ((t.n_bb - t.lam_bb_sq - t.n_pbsw).abs(), t.n_bb + t.lam_bb_sq + t.n_pbsw),
            (
                (t.n_psp - t.n_pp).abs().max((t.n_pp - t.n_bb).abs()),
                t.n_psp + t.n_pp + t.n_bb,
            ),
            (
                (t.pair_pp_bb - C::new(t.lam_bb_sq, 0.0)).norm(),
                t.pair_pp_bb.norm() + t.lam_bb_sq,
            ),
            (
                (t.n_ppbb - 2.0 * t.lam_bb_sq - 2.0 * t.n_bb).abs(),
                t.n_ppbb + 2.0 * t.lam_bb_sq + 2.0 * t.n_bb,
            ),
        ];
        let (res, norm) = combine(&parts);
        out.push(CheckResult::new(spec(2), res, norm, tol, r));
    }
    // I4
    {
        let lhs = t.ric11_dd;
        let rhs = C::new(
            0.5 * (t.n_bb + t.lam_bb_sq) - 0.375 * t.a1_sq - 0.5 * t.ric20_n + 0.125 * t.m_n,
            0.0,
        );
        let res = (lhs - rhs).norm();
        let norm = lhs.norm()
            + 0.5 * (t.n_bb + t.lam_bb_sq)
            + 0.375 * t.a1_sq
            + 0.5 * t.ric20_n
            + 0.125 * t.m_n;
        out.push(CheckResult::new(spec(3), res, norm, tol, r));
    }
    // I5
    {
        let rhs = t.s_sq4 - t.ric11_n + t.s_half_a1 - t.s_lam_bb.re - t.ric20_n + t.n_pbsw
            + 0.75 * t.two_lam_bb_minus_a1_sq;
        let res = (t.c1_wedge - rhs).abs().max(t.s_lam_bb.im.abs());
        let norm = t.c1_wedge.abs()
            + t.s_sq4
            + t.ric11_n
            + t.s_half_a1.abs()
            + t.s_lam_bb.norm()
            + t.ric20_n
            + t.n_pbsw
            + 0.75 * t.two_lam_bb_minus_a1_sq;
        out.push(CheckResult::new(spec(4), res, norm, tol, r));
    }
    // I6: proof-chain bookkeeping, worst member.
    {
        let k11 = (
            (t.b_n - (0.5 * (t.n_bb + t.lam_bb_sq) + 0.5 * t.a1_sq + 0.25 * t.m_n - t.ric20_n))
                .abs(),
            t.b_n + 0.5 * (t.n_bb + t.lam_bb_sq) + 0.5 * t.a1_sq + 0.25 * t.m_n + t.ric20_n,
        );
        let k12_rhs = -1.5 * (t.n_bb + t.lam_bb_sq) + t.a1_sq + 2.0 * t.ric20_n - 0.25 * t.m_n
            + 2.0 * t.s_half_a1;
        let k12 = (
            (2.0 * t.ric11_b - C::new(k12_rhs, 0.0)).norm(),
            2.0 * t.ric11_b.norm()
                + 1.5 * (t.n_bb + t.lam_bb_sq)
                + t.a1_sq
                + 2.0 * t.ric20_n
                + 0.25 * t.m_n
                + 2.0 * t.s_half_a1.abs(),
        );
        let k10_rhs =
            t.ric11_n + 2.0 * t.s_half_a1 - (t.n_bb + t.lam_bb_sq) + 1.5 * t.a1_sq + t.ric20_n;
        let k10 = (
            (t.th1_n - k10_rhs).abs(),
            t.th1_n
                + t.ric11_n
                + 2.0 * t.s_half_a1.abs()
                + t.n_bb
                + t.lam_bb_sq
                + 1.5 * t.a1_sq
                + t.ric20_n,
        );
        let k14_rhs = t.s11_sq + t.lam_bb_sq + 2.25 * t.a1_sq + 3.0 * t.s11_a1
            - 2.0 * t.s11_lam_bb.re
            - 3.0 * t.a2_lam_bb.re;
        let k14 = (
            (t.s_c_sq - k14_rhs).abs(),
            t.s_c_sq
                + t.s11_sq
                + t.lam_bb_sq
                + 2.25 * t.a1_sq
                + 3.0 * t.s11_a1.abs()
                + 2.0 * t.s11_lam_bb.norm()
                + 3.0 * t.a2_lam_bb.norm(),
        );
        let (res, norm) = combine(&[k11, k12, k10, k14]);
        out.push(CheckResult::new(spec(5), res, norm, tol, r));
    }
    // I7
    {
        let scalar = t.s_c_sq - t.th1_n;
        let res = (t.c1_wedge - scalar).abs();
        let norm = t.c1_wedge.abs() + t.s_c_sq + t.th1_n;
        out.push(CheckResult::new(spec(6), res, norm, tol, r));
    }
    // I8
    {
        let k6_rhs =
            0.5 * (t.n_bb + t.lam_bb_sq) + t.a2_sq - 2.0 * t.a2_lam_bb.re - 0.25 * t.m_n;
        let k6 = (
            (t.th1_tt - C::new(k6_rhs, 0.0)).norm(),
            t.th1_tt.norm()
                + 0.5 * (t.n_bb + t.lam_bb_sq)
                + t.a2_sq
                + 2.0 * t.a2_lam_bb.norm()
                + 0.25 * t.m_n,
        );
        let k7_rhs = 0.5 * (t.n_bb + t.lam_bb_sq) + t.a2_lam_bb.re - 0.5 * t.a1_a2
            - 2.0 * t.ric20_n
            + 0.25 * t.m_n;
        let k7 = (
            (t.th2_tt - C::new(k7_rhs, 0.0)).norm(),
            t.th2_tt.norm()
                + 0.5 * (t.n_bb + t.lam_bb_sq)
                + t.a2_lam_bb.norm()
                + 0.5 * t.a1_a2
                + 2.0 * t.ric20_n
                + 0.25 * t.m_n,
        );
        let (res, norm) = combine(&[k6, k7]);
        out.push(CheckResult::new(spec(7), res, norm, tol, r));
    }
    // I9
    {
        let lhs = t.n_bb + t.lampp_minus_a2_sq;
        let rhs = 2.0 * t.lc2_tt + C::new(2.0 * t.ric20_n, 0.0);
        let first = (
            (C::new(lhs, 0.0) - rhs).norm(),
            t.n_bb + t.lampp_minus_a2_sq + 2.0 * t.lc2_tt.norm() + 2.0 * t.ric20_n,
        );
        let b = t.n_pbsw + t.lam_bb_sq;
        let second = (
            (t.th2_dd - C::new(b, 0.0)).norm().max((b - t.n_bb).abs()),
            t.th2_dd.norm() + b + t.n_bb,
        );
        let (res, norm) = combine(&[first, second]);
        out.push(CheckResult::new(spec(8), res, norm, tol, r));
    }
    // I10
    {
        let rhs = t.s_c_sq - t.th2_n + 2.0 * t.n_bb - 2.0 * t.sc_lam_bb.re;
        let res = (t.c1_wedge - rhs).abs();
        let norm =
            t.c1_wedge.abs() + t.s_c_sq + t.th2_n + 2.0 * t.n_bb + 2.0 * t.sc_lam_bb.norm();
        out.push(CheckResult::new(spec(9), res, norm, tol, r));
    }
    out
}

/// Run the full integral suite at the rule's resolution.
pub fn run_integral_suite(
    field: &MetricField,
    rule: &QuadratureRule,
    tols: &Tolerances,
    conv: Conventions,
) -> Result<Vec<CheckResult>, DomainError> {
    let t = integral_totals(field, rule, conv)?;
    Ok(integral_checks(&t, rule.resolution, tols))
}

/// `4 pi^2 c1^2` by (a) wedge quadrature of Theta^(1) ^ Theta^(1) and (b) the
/// scalar route `(s_c^2, 1) - |Theta^(1)|^2`.
pub fn chern_number(t: &IntegralTotals) -> (f64, f64) {
    (t.c1_wedge, t.s_c_sq - t.th1_n)
}

/// Which 2-tensor block to norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorBlock {
    Ric20,
    M,
}

/// Global squared norm of a 2-tensor block under the full hh-bar contraction.
pub fn norms_2tensor(t: &IntegralTotals, block: TensorBlock) -> f64 {
    match block {
        TensorBlock::Ric20 => t.ric20_n,
        TensorBlock::M => t.m_n,
    }
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Kahler / Gauduchon / curvature-sign classification with the numeric
/// evidence behind every flag.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub kahler: bool,
    /// L2 norm squared of dbar* omega over the surface.
    pub torsion_l2: f64,
    /// Worst pointwise |d omega|.
    pub max_d_omega: f64,
    pub gauduchon: bool,
    /// Worst pointwise |i del dbar omega|.
    pub max_ddbar_omega: f64,
    pub ric20_zero: bool,
    pub ric20_norm2: f64,
    /// Generalized eigenvalue range of Ric^(1,1) against h over the samples.
    pub ric11_eig_min: f64,
    pub ric11_eig_max: f64,
    pub ric11_nonpositive: bool,
    pub volume: f64,
    pub hypotheses: Hypotheses,
}

/// Per-theorem applicability flags with their evidence scalars.
#[derive(Debug, Clone, Serialize)]
pub struct Hypotheses {
    /// Ric^(1,1) + (i/4) dbar* w ^ del* w <= 0 at every sample.
    pub corollary_nonpositive: bool,
    pub corollary_eig_max: f64,
    /// Largest eigenvalue of Ric^(1,1) - (3/4) i dbar* w ^ del* w.
    pub relaxed_eig_max: f64,
    /// M = nabla T + nabla T = 0.
    pub m_zero: bool,
    pub max_m: f64,
    /// Ric^(1,1) = -u^2 omega for a smooth real u.
    pub ric11_proportional: bool,
    pub ric11_shape_residual: f64,
    pub ric11_coeff_max: f64,
    /// Theta^(2) = -c^2 omega for a real constant c.
    pub theta2_constant_shape: bool,
    pub theta2_shape_residual: f64,
    pub theta2_coeff_min: f64,
    pub theta2_coeff_max: f64,
}

/// Real generalized eigenvalues of the Hermitian pair (A, H), H > 0.
fn gen_eigs(a: &M2, h: &M2) -> (f64, f64) {
    let deth = det2(h).re;
    let b = -(a[0][0] * h[1][1] + a[1][1] * h[0][0] - a[0][1] * h[1][0] - a[1][0] * h[0][1]).re;
    let c = det2(a).re;
    let disc = (b * b - 4.0 * deth * c).max(0.0).sqrt();
    let mu1 = (-b - disc) / (2.0 * deth);
    let mu2 = (-b + disc) / (2.0 * deth);
    (mu1.min(mu2), mu1.max(mu2))
}

/// Classify the metric from the integral totals and a pointwise sample sweep.
pub fn classify(
    field: &MetricField,
    totals: &IntegralTotals,
    points: &[[C; 4]],
    tols: &Tolerances,
    conv: Conventions,
) -> Result<Diagnostics, MetricError> {
    let tol = tols.pointwise;
    let mut max_d_omega = 0.0_f64;
    let mut max_ddbar = 0.0_f64;
    let mut max_m = 0.0_f64;
    let mut eig_min = f64::INFINITY;
    let mut eig_max = f64::NEG_INFINITY;
    let mut cor_max = f64::NEG_INFINITY;
    let mut relaxed_max = f64::NEG_INFINITY;
    let mut ric11_shape = 0.0_f64;
    let mut ric11_coeff_max = f64::NEG_INFINITY;
    let mut th2_shape = 0.0_f64;
    let mut th2_min = f64::INFINITY;
    let mut th2_max = f64::NEG_INFINITY;

    for &p in points {
        let pc = eval_point(field, p, conv)?;
        let f = &pc.frame;
        let d = &pc.dash;
        let h = f.mj.h_val();
        let scale = 1.0 + mabs(&h);

        let n_dw = (pc.fctx.norm2(&d.p_omega) + pc.fctx.norm2(&d.bp_omega)).max(0.0).sqrt();
        max_d_omega = max_d_omega.max(n_dw);
        let n_ddbar = pc.fctx.norm2(&d.ddbar_omega).max(0.0).sqrt();
        max_ddbar = max_ddbar.max(n_ddbar);
        max_m = max_m.max(mabs(&f.m2) / scale);

        let (lo, hi) = gen_eigs(&f.ric_h, &h);
        eig_min = eig_min.min(lo);
        eig_max = eig_max.max(hi);

        let mtt = d.tt.matrix11();
        let cor = madd(&f.ric_h, &mscale(&mtt, C::new(0.25, 0.0)));
        cor_max = cor_max.max(gen_eigs(&cor, &h).1);
        let relaxed = msub(&f.ric_h, &mscale(&mtt, C::new(0.75, 0.0)));
        relaxed_max = relaxed_max.max(gen_eigs(&relaxed, &h).1);

        // Shape Ric^(1,1) = -u^2 omega forces the coefficient s11/2.
        let coeff = f.s11.re / 2.0;
        ric11_shape =
            ric11_shape.max(mabs(&msub(&f.ric_h, &mscale(&h, C::new(coeff, 0.0)))) / scale);
        ric11_coeff_max = ric11_coeff_max.max(coeff);

        let c2 = f.s_c.re / 2.0;
        th2_shape = th2_shape.max(mabs(&msub(&f.theta2, &mscale(&h, C::new(c2, 0.0)))) / scale);
        th2_min = th2_min.min(c2);
        th2_max = th2_max.max(c2);
    }

    let hypotheses = Hypotheses {
        corollary_nonpositive: cor_max <= tol,
        corollary_eig_max: cor_max,
        relaxed_eig_max: relaxed_max,
        m_zero: max_m <= tol,
        max_m,
        ric11_proportional: ric11_shape <= tol && ric11_coeff_max <= tol,
        ric11_shape_residual: ric11_shape,
        ric11_coeff_max,
        theta2_constant_shape: th2_shape <= tol
            && th2_max <= tol
            && (th2_max - th2_min) <= tol * (1.0 + th2_max.abs()),
        theta2_shape_residual: th2_shape,
        theta2_coeff_min: th2_min,
        theta2_coeff_max: th2_max,
    };

    Ok(Diagnostics {
        kahler: max_d_omega <= tol,
        torsion_l2: totals.a1,
        max_d_omega,
        gauduchon: max_ddbar <= tol,
        max_ddbar_omega: max_ddbar,
        ric20_zero: totals.ric20_n <= tol * totals.vol.max(1.0),
        ric20_norm2: totals.ric20_n,
        ric11_eig_min: eig_min,
        ric11_eig_max: eig_max,
        ric11_nonpositive: eig_max <= tol,
        volume: totals.vol,
        hypotheses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::build_rule;
    use crate::gallery;

    fn hopf_vol() -> f64 {
        8.0 * std::f64::consts::PI.powi(2) * 2.0_f64.ln()
    }

    #[test]
    fn registry_is_complete() {
        assert_eq!(POINTWISE_REGISTRY.len(), 13);
        assert_eq!(INTEGRAL_REGISTRY.len(), 10);
        let mut ids: Vec<&str> = POINTWISE_REGISTRY
            .iter()
            .chain(INTEGRAL_REGISTRY.iter())
            .map(|s| s.id)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 23, "ids must be unique");
        for spec in POINTWISE_REGISTRY.iter().chain(INTEGRAL_REGISTRY.iter()) {
            assert!(!spec.paper_ref.is_empty());
        }
        for (k, spec) in POINTWISE_REGISTRY.iter().enumerate() {
            assert_eq!(spec.id, format!("P{}", k + 1));
        }
        for (k, spec) in INTEGRAL_REGISTRY.iter().enumerate() {
            assert_eq!(spec.id, format!("I{}", k + 1));
        }
    }

    #[test]
    fn flat_torus_residuals_vanish() {
        let m = gallery::load("torus_flat", None).unwrap();
        let pts = m.domain.sample_points(40, 1);
        let tols = Tolerances::default();
        let conv = Conventions::default();
        for c in run_pointwise_suite(&m, &pts, &tols, conv).unwrap() {
            assert!(c.pass, "{} failed: rel {}", c.id, c.residual_rel);
            assert!(c.residual_rel < 1e-12, "{}: {}", c.id, c.residual_rel);
        }
        let rule = build_rule(&m.domain, 4).unwrap();
        for c in run_integral_suite(&m, &rule, &tols, conv).unwrap() {
            assert!(c.residual_rel < 1e-12, "{}: {}", c.id, c.residual_rel);
        }
    }

    #[test]
    fn hopf_integral_totals_match_hand_values() {
        let m = gallery::load("hopf_standard", None).unwrap();
        let rule = build_rule(&m.domain, 6).unwrap();
        let t = integral_totals(&m, &rule, Conventions::default()).unwrap();
        let v = hopf_vol();
        let close = |x: f64, y: f64, what: &str| {
            assert!((x - y).abs() < 1e-8 * v, "{what}: {x} vs {y}");
        };
        close(t.vol, v, "volume");
        close(t.a1, v, "int |dbar* w|^2");
        close(t.n_bb, v, "|dbar dbar* w|^2");
        close(t.lam_bb_sq, v, "|Lambda dbar dbar* w|^2");
        close(t.ric20_n, 0.25 * v, "|Ric20|^2");
        close(t.m_n, 0.0, "|M|^2");
        close(t.ric11_tt.re, 0.5 * v, "(Ric11, tt)");
        close(t.ric11_dd.re, 0.5 * v, "(Ric11, dd)");
        close(t.th2_dd.re, v, "(Theta2, dd)");
        close(t.b_n, 1.25 * v, "|B|^2");
        close(t.ric11_b.re, 0.75 * v, "(Ric11, B)");
        close(t.th1_n, 4.0 * v, "|Theta1|^2");
        close(t.ric11_n, 1.25 * v, "|Ric11|^2");
        close(t.s_c_sq, 4.0 * v, "(s_c^2, 1)");
        close(t.s_sq4, 2.25 * v, "(s^2/4, 1)");
        close(t.th2_n, 2.0 * v, "|Theta2|^2");
        close(t.c1_wedge, 0.0, "wedge c1^2");
        close(t.n_pbsw, 0.0, "|del dbar* w|^2");
        close(t.th1_tt.re, 0.0, "(Theta1, tt)");
        close(t.th2_tt.re, v, "(Theta2, tt)");
        close(t.lc2_tt.re, 0.25 * v, "(r2, tt)");
        close(t.half_ppbb_tt.re, 0.0, "(half pp+bb, tt)");
    }

    #[test]
    fn hopf_suites_pass() {
        let m = gallery::load("hopf_standard", None).unwrap();
        let tols = Tolerances::default();
        let conv = Conventions::default();
        let pts = m.domain.sample_points(60, 1);
        for c in run_pointwise_suite(&m, &pts, &tols, conv).unwrap() {
            assert!(c.pass, "{} rel residual {}", c.id, c.residual_rel);
        }
        let rule = build_rule(&m.domain, 6).unwrap();
        for c in run_integral_suite(&m, &rule, &tols, conv).unwrap() {
            assert!(c.pass, "{} rel residual {}", c.id, c.residual_rel);
        }
    }

    #[test]
    fn conformal_and_skew_pointwise_suites_pass() {
        let tols = Tolerances::default();
        let conv = Conventions::default();
        for m in [
            gallery::load("torus_conformal", Some(0.1)).unwrap(),
            crate::testutil::skew_torus(),
        ] {
            let pts = m.domain.sample_points(40, 5);
            for c in run_pointwise_suite(&m, &pts, &tols, conv).unwrap() {
                assert!(c.pass, "{} on {}: rel {}", c.id, m.name, c.residual_rel);
            }
        }
    }

    #[test]
    fn conformal_torus_integral_suite_passes() {
        let m = gallery::load("torus_conformal", Some(0.1)).unwrap();
        let rule = build_rule(&m.domain, 8).unwrap();
        let tols = Tolerances::default();
        for c in run_integral_suite(&m, &rule, &tols, Conventions::default()).unwrap() {
            assert!(c.pass, "{} rel {}", c.id, c.residual_rel);
        }
    }

    #[test]
    fn classification_flags() {
        let tols = Tolerances::default();
        let conv = Conventions::default();

        let flat = gallery::load("torus_flat", None).unwrap();
        let rule = build_rule(&flat.domain, 4).unwrap();
        let t = integral_totals(&flat, &rule, conv).unwrap();
        let pts = flat.domain.sample_points(30, 1);
        let d = classify(&flat, &t, &pts, &tols, conv).unwrap();
        assert!(d.kahler && d.gauduchon && d.ric20_zero);
        assert!(d.torsion_l2.abs() < 1e-12);

        let hopf = gallery::load("hopf_standard", None).unwrap();
        let rule = build_rule(&hopf.domain, 6).unwrap();
        let t = integral_totals(&hopf, &rule, conv).unwrap();
        let pts = hopf.domain.sample_points(30, 1);
        let d = classify(&hopf, &t, &pts, &tols, conv).unwrap();
        assert!(!d.kahler);
        assert!(d.gauduchon, "hopf is Gauduchon: {}", d.max_ddbar_omega);
        assert!(d.hypotheses.m_zero);
        assert!(!d.ric11_nonpositive);
        assert!((d.torsion_l2 - hopf_vol()).abs() < 1e-6 * hopf_vol());
        // Theta^(2) = +omega: proportional with a positive constant, so the
        // negative-shape hypothesis must be off.
        assert!(d.hypotheses.theta2_shape_residual < 1e-9);
        assert!(!d.hypotheses.theta2_constant_shape);

        let conf = gallery::load("torus_conformal", Some(0.1)).unwrap();
        let rule = build_rule(&conf.domain, 6).unwrap();
        let t = integral_totals(&conf, &rule, conv).unwrap();
        let pts = conf.domain.sample_points(30, 1);
        let d = classify(&conf, &t, &pts, &tols, conv).unwrap();
        assert!(!d.kahler);
        assert!(!d.gauduchon);
    }

    #[test]
    fn convention_knobs_break_an_identity_on_hopf() {
        let m = gallery::load("hopf_standard", None).unwrap();
        let rule = build_rule(&m.domain, 4).unwrap();
        let tols = Tolerances::default();
        let knobs = [
            Conventions { gram_forms: 2.0, ..Default::default() },
            Conventions { tensor2: 2.0, ..Default::default() },
            Conventions { trace: 2.0, ..Default::default() },
        ];
        for conv in knobs {
            let checks = run_integral_suite(&m, &rule, &tols, conv).unwrap();
            let failed = checks
                .iter()
                .filter(|c| ["I1", "I2", "I4"].contains(&c.id.as_str()) && !c.pass)
                .count();
            assert!(failed >= 1, "knob {conv:?} broke nothing in I1/I2/I4");
        }
    }
}
