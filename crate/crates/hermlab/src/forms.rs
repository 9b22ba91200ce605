//! (p,q)-form algebra at a point of a Hermitian surface: wedge, Lefschetz
//! operators L and Lambda, Hodge star, Dolbeault differentials and
//! codifferentials, the torsion operators tau/taubar and their pointwise
//! adjoints, and the derived dashboard of composite quantities.
//!
//! A [`FormValue`] stores one jet coefficient per exterior monomial over the
//! four generators `dz1, dz2, dzb1, dzb2` (mask bit = generator present), so
//! a value at a point carries the first derivatives of the underlying field
//! and the differentials act pointwise.
//!
//! Normalization is pinned empirically by the identity suite: the pointwise
//! product on (1,0)-forms is `<a, b> = h^{i jbar} a_i conj(b_j)`, extended to
//! higher degrees by Gram determinants; the volume form is `omega^2/2`
//! (density `4 det h` against Lebesgue measure); the star operator satisfies
//! `x wedge conj(star y) = <x, y> omega^2/2` and the codifferentials are
//! `d* = -star dbar star`, `dbar* = -star d star`.

use crate::geometry::MetricJet;
use crate::jets::{C, Jet2};
use thiserror::Error;

const C0: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Test-harness scale factors on the inner-product conventions.  Production
/// paths use [`Conventions::default`]; the expected-failure suite perturbs
/// one factor at a time to demonstrate the identities pin the conventions.
#[derive(Debug, Clone, Copy)]
pub struct Conventions {
    /// Scale on the pointwise Gram of every (p,q) with p + q >= 1.
    pub gram_forms: f64,
    /// Scale on the full hh-bar contraction of 2-tensors.
    pub tensor2: f64,
    /// Scale on the trace pairing (Lambda on (1,1)-forms, scalar traces).
    pub trace: f64,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions { gram_forms: 1.0, tensor2: 1.0, trace: 1.0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("bidegree mismatch: left has {left:?}, right has {right:?}")]
    BidegreeMismatch { left: Vec<(usize, usize)>, right: Vec<(usize, usize)> },
}

// ---------------------------------------------------------------------------
// Monomial combinatorics
// ---------------------------------------------------------------------------

/// Bidegree blocks in a fixed order.
pub const PQ_LIST: [(usize, usize); 9] =
    [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2), (2, 2)];

/// Basis monomial masks per block, ascending.
pub const MASKS: [&[usize]; 9] = [
    &[0b0000],
    &[0b0001, 0b0010],
    &[0b0100, 0b1000],
    &[0b0011],
    &[0b0101, 0b0110, 0b1001, 0b1010],
    &[0b1100],
    &[0b0111, 0b1011],
    &[0b1101, 0b1110],
    &[0b1111],
];

#[inline]
pub fn mask_pq(m: usize) -> (usize, usize) {
    ((m & 1) + ((m >> 1) & 1), ((m >> 2) & 1) + ((m >> 3) & 1))
}

#[inline]
pub fn pq_index(p: usize, q: usize) -> usize {
    PQ_LIST.iter().position(|&x| x == (p, q)).expect("valid bidegree")
}

fn idx_in_block(mask: usize) -> usize {
    let (p, q) = mask_pq(mask);
    MASKS[pq_index(p, q)].iter().position(|&m| m == mask).expect("mask in block")
}

/// Wedge of two basis monomials: `None` if they share a generator, else the
/// combined mask and permutation sign.
pub fn wedge_masks(a: usize, b: usize) -> Option<(usize, f64)> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0;
    for x in 0..4 {
        if a & (1 << x) != 0 {
            for y in 0..x {
                if b & (1 << y) != 0 {
                    inversions += 1;
                }
            }
        }
    }
    Some((a | b, if inversions % 2 == 0 { 1.0 } else { -1.0 }))
}

/// Conjugate of a basis monomial: swapped mask and re-ordering sign.
pub fn conj_monomial(m: usize) -> (usize, f64) {
    let swapped = ((m & 0b0011) << 2) | (m >> 2);
    let (p, q) = mask_pq(m);
    (swapped, if (p * q) % 2 == 0 { 1.0 } else { -1.0 })
}

// ---------------------------------------------------------------------------
// FormValue
// ---------------------------------------------------------------------------

/// A graded complex form at a point with jet coefficients.
#[derive(Debug, Clone)]
pub struct FormValue {
    /// Coefficient on basis monomial `e_mask`.
    pub c: [Jet2; 16],
    /// Structural support: bit per basis monomial.
    pub sig: u16,
}

impl FormValue {
    pub fn zero() -> Self {
        FormValue { c: [Jet2::zero(); 16], sig: 0 }
    }

    pub fn scalar(j: Jet2) -> Self {
        let mut v = Self::zero();
        v.set(0, j);
        v
    }

    pub fn set(&mut self, mask: usize, j: Jet2) {
        self.c[mask] = j;
        self.sig |= 1 << mask;
    }

    /// Bidegrees structurally present.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for m in 0..16 {
            if self.sig & (1 << m) != 0 {
                let pq = mask_pq(m);
                if !out.contains(&pq) {
                    out.push(pq);
                }
            }
        }
        out
    }

    /// Largest coefficient magnitude (values only).
    pub fn max_abs(&self) -> f64 {
        (0..16)
            .filter(|m| self.sig & (1 << m) != 0)
            .map(|m| self.c[m].val.norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C) -> FormValue {
        let mut out = self.clone();
        for m in 0..16 {
            out.c[m] = out.c[m] * s;
        }
        out
    }

    /// The (1,1) form `sqrt(-1) a_{i jbar} dz^i wedge dzb^j` from its
    /// coefficient matrix (values only).
    pub fn from_matrix11(a: &[[C; 2]; 2]) -> FormValue {
        let mut v = FormValue::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mask = (1 << i) | (1 << (2 + j));
                v.set(mask, Jet2::constant(I * a[i][j]));
            }
        }
        v
    }

    /// Same from jet coefficients.
    pub fn from_matrix11_jets(a: &[[Jet2; 2]; 2]) -> FormValue {
        let mut v = FormValue::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mask = (1 << i) | (1 << (2 + j));
                v.set(mask, a[i][j] * I);
            }
        }
        v
    }

    /// Coefficient matrix of the (1,1)-part under the same convention.
    pub fn matrix11(&self) -> [[C; 2]; 2] {
        let mut a = [[C0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mask = (1 << i) | (1 << (2 + j));
                a[i][j] = self.c[mask].val / I;
            }
        }
        a
    }
}

impl std::ops::Add for &FormValue {
    type Output = FormValue;
    fn add(self, rhs: &FormValue) -> FormValue {
        let mut out = self.clone();
        for m in 0..16 {
            out.c[m] = out.c[m] + rhs.c[m];
        }
        out.sig |= rhs.sig;
        out
    }
}

impl std::ops::Sub for &FormValue {
    type Output = FormValue;
    fn sub(self, rhs: &FormValue) -> FormValue {
        let mut out = self.clone();
        for m in 0..16 {
            out.c[m] = out.c[m] - rhs.c[m];
        }
        out.sig |= rhs.sig;
        out
    }
}

/// Graded-commutative wedge product.
pub fn wedge(a: &FormValue, b: &FormValue) -> FormValue {
    let mut out = FormValue::zero();
    for ma in 0..16 {
        if a.sig & (1 << ma) == 0 {
            continue;
        }
        for mb in 0..16 {
            if b.sig & (1 << mb) == 0 {
                continue;
            }
            if let Some((m, s)) = wedge_masks(ma, mb) {
                out.c[m] = out.c[m] + a.c[ma] * b.c[mb] * s;
                out.sig |= 1 << m;
            }
        }
    }
    out
}

/// The fundamental form as a jet-coefficient FormValue.
pub fn omega_form(mj: &MetricJet) -> FormValue {
    FormValue::from_matrix11_jets(&mj.h)
}

/// Coefficientwise Dolbeault split of the exterior differential: `(del f,
/// delbar f)`.  Coefficients must carry valid first-derivative slots.
pub fn d_split(v: &FormValue) -> (FormValue, FormValue) {
    let mut del = FormValue::zero();
    let mut dbar = FormValue::zero();
    for m in 0..16 {
        if v.sig & (1 << m) == 0 {
            continue;
        }
        for g in 0..4 {
            if let Some((m2, s)) = wedge_masks(1 << g, m) {
                let dc = v.c[m].d_jet(g) * s;
                if g < 2 {
                    del.c[m2] = del.c[m2] + dc;
                    del.sig |= 1 << m2;
                } else {
                    dbar.c[m2] = dbar.c[m2] + dc;
                    dbar.sig |= 1 << m2;
                }
            }
        }
    }
    (del, dbar)
}

// ---------------------------------------------------------------------------
// Point context: Grams, star, Lefschetz
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Block {
    dim: usize,
    g: [[Jet2; 4]; 4],
}

impl Block {
    fn empty() -> Self {
        Block { dim: 0, g: [[Jet2::zero(); 4]; 4] }
    }
}

/// Per-point context caching the Gram and star data of every bidegree.
pub struct FormCtx {
    pub mj: MetricJet,
    pub conv: Conventions,
    /// Canonical Gram jets per block (no convention knobs).
    gram: [Block; 9],
    /// Star matrices per source block: `star(e_b) = sum_c s[c][b] f_c`.
    star_m: [Block; 9],
}

impl FormCtx {
    pub fn new(mj: &MetricJet, conv: Conventions) -> Box<FormCtx> {
        let mut ctx = Box::new(FormCtx {
            mj: mj.clone(),
            conv,
            gram: [Block::empty(); 9],
            star_m: [Block::empty(); 9],
        });
        for blk in 0..9 {
            let masks = MASKS[blk];
            let dim = masks.len();
            let mut g = Block::empty();
            g.dim = dim;
            for (ai, &ma) in masks.iter().enumerate() {
                for (bi, &mb) in masks.iter().enumerate() {
                    g.g[ai][bi] = gram_entry(&ctx.mj, ma, mb);
                }
            }
            ctx.gram[blk] = g;
        }
        for blk in 0..9 {
            let (p, q) = PQ_LIST[blk];
            let out_blk = pq_index(2 - q, 2 - p);
            let masks_in = MASKS[blk];
            let masks_out = MASKS[out_blk];
            let mut s = Block::empty();
            s.dim = masks_in.len();
            for (ci, &mc) in masks_out.iter().enumerate() {
                let (cm, s1) = conj_monomial(mc);
                let am = !cm & 0b1111;
                let (_, s2) = wedge_masks(am, cm).expect("complementary masks");
                let kappa = s1 * s2;
                let ai = idx_in_block(am);
                for bi in 0..masks_in.len() {
                    let entry = (ctx.mj.det * ctx.gram[blk].g[ai][bi]).wirt_conj() * kappa;
                    s.g[ci][bi] = entry;
                }
            }
            ctx.star_m[blk] = s;
        }
        ctx
    }

    fn knob(&self, p: usize, q: usize) -> f64 {
        if p + q == 0 {
            1.0
        } else {
            self.conv.gram_forms
        }
    }

    /// Knobbed Gram values of one block.
    fn gram_vals(&self, blk: usize) -> [[C; 4]; 4] {
        let (p, q) = PQ_LIST[blk];
        let k = self.knob(p, q);
        let mut out = [[C0; 4]; 4];
        for a in 0..self.gram[blk].dim {
            for b in 0..self.gram[blk].dim {
                out[a][b] = self.gram[blk].g[a][b].val * k;
            }
        }
        out
    }

    /// Pointwise Hermitian inner product, sesquilinear in the second slot.
    pub fn inner(&self, a: &FormValue, b: &FormValue) -> Result<C, FormError> {
        let da = a.bidegrees();
        let db = b.bidegrees();
        if !da.is_empty() && !db.is_empty() && !da.iter().any(|pq| db.contains(pq)) {
            return Err(FormError::BidegreeMismatch { left: da, right: db });
        }
        let mut acc = C0;
        for blk in 0..9 {
            let masks = MASKS[blk];
            let present = masks
                .iter()
                .any(|&m| (a.sig | b.sig) & (1 << m) != 0);
            if !present {
                continue;
            }
            let g = self.gram_vals(blk);
            for (ai, &ma) in masks.iter().enumerate() {
                for (bi, &mb) in masks.iter().enumerate() {
                    acc += a.c[ma].val * b.c[mb].val.conj() * g[ai][bi];
                }
            }
        }
        Ok(acc)
    }

    pub fn norm2(&self, a: &FormValue) -> f64 {
        self.inner(a, a).expect("same form").re
    }

    /// Complex-linear Hodge star with jet coefficients.
    pub fn star(&self, v: &FormValue) -> FormValue {
        let mut out = FormValue::zero();
        for blk in 0..9 {
            let (p, q) = PQ_LIST[blk];
            let out_blk = pq_index(2 - q, 2 - p);
            let masks_in = MASKS[blk];
            let masks_out = MASKS[out_blk];
            let any = masks_in.iter().any(|&m| v.sig & (1 << m) != 0);
            if !any {
                continue;
            }
            let s = &self.star_m[blk];
            for (ci, &mc) in masks_out.iter().enumerate() {
                let mut acc = Jet2::zero();
                for (bi, &mb) in masks_in.iter().enumerate() {
                    acc = acc + s.g[ci][bi] * v.c[mb];
                }
                out.c[mc] = out.c[mc] + acc;
                out.sig |= 1 << mc;
            }
        }
        out
    }

    /// Lefschetz operator `L = omega wedge .`.
    pub fn lefschetz(&self, v: &FormValue) -> FormValue {
        wedge(&omega_form(&self.mj), v)
    }

    /// Pointwise adjoint of L with respect to the inner product; on
    /// (1,1)-forms this is the trace pairing and carries the trace knob.
    pub fn lambda(&self, v: &FormValue) -> FormValue {
        let mut out = FormValue::zero();
        for blk in 0..9 {
            let (p, q) = PQ_LIST[blk];
            if p == 0 || q == 0 {
                continue;
            }
            let masks_in = MASKS[blk];
            if !masks_in.iter().any(|&m| v.sig & (1 << m) != 0) {
                continue;
            }
            let out_blk = pq_index(p - 1, q - 1);
            let masks_out = MASKS[out_blk];
            let din = masks_in.len();
            let dout = masks_out.len();
            // L matrix from (p-1,q-1) to (p,q).
            let om = omega_form(&self.mj);
            let mut lmat = [[C0; 4]; 4];
            for (bi, &mb) in masks_out.iter().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        let mo = (1 << i) | (1 << (2 + j));
                        if let Some((m2, s)) = wedge_masks(mo, mb) {
                            let ri = idx_in_block(m2);
                            lmat[ri][bi] += om.c[mo].val * s;
                        }
                    }
                }
            }
            // With the pairing <x, y> = x^T G conj(y) and Hermitian G, the
            // adjoint reads conj(G_out)^(-1) L^dagger conj(G_in).
            let g_in = conj_mat(self.gram_vals(blk));
            let g_out = conj_mat(self.gram_vals(out_blk));
            let mut gv = [C0; 4];
            for r in 0..din {
                for (bi, &mb) in masks_in.iter().enumerate() {
                    gv[r] += g_in[r][bi] * v.c[mb].val;
                }
            }
            let mut rhs = [C0; 4];
            for r in 0..dout {
                for s in 0..din {
                    rhs[r] += lmat[s][r].conj() * gv[s];
                }
            }
            let sol = solve_small(g_out, rhs, dout);
            let scale = if (p, q) == (1, 1) { self.conv.trace } else { 1.0 };
            for (oi, &mo) in masks_out.iter().enumerate() {
                out.c[mo] = out.c[mo] + Jet2::constant(sol[oi] * scale);
                out.sig |= 1 << mo;
            }
        }
        out
    }

    /// `dbar* = -star d star` (the (1,0)-lowering codifferential).
    pub fn del_bar_star(&self, v: &FormValue) -> FormValue {
        let starred = self.star(v);
        let (d, _) = d_split(&starred);
        self.star(&d).scale(-C::new(1.0, 0.0))
    }

    /// `d* = -star dbar star` (the (0,1)-lowering codifferential).
    pub fn del_star(&self, v: &FormValue) -> FormValue {
        let starred = self.star(v);
        let (_, db) = d_split(&starred);
        self.star(&db).scale(-C::new(1.0, 0.0))
    }

    /// Torsion operator `tau = [Lambda, del omega wedge .]` (values only).
    pub fn tau(&self, p_omega: &FormValue, v: &FormValue) -> FormValue {
        let a = self.lambda(&wedge(p_omega, v));
        let b = wedge(p_omega, &self.lambda(v));
        &a - &b
    }

    /// `taubar = [Lambda, delbar omega wedge .]`.
    pub fn tau_bar(&self, bp_omega: &FormValue, v: &FormValue) -> FormValue {
        let a = self.lambda(&wedge(bp_omega, v));
        let b = wedge(bp_omega, &self.lambda(v));
        &a - &b
    }

    fn operator_adjoint<F>(&self, v: &FormValue, deg_shift: (isize, isize), op: F) -> FormValue
    where
        F: Fn(&FormValue) -> FormValue,
    {
        // v lives in (P,Q); the operator maps (P - dp, Q - dq) -> (P,Q); its
        // Gram adjoint sends v back down.
        let mut out = FormValue::zero();
        for blk in 0..9 {
            let (pp, qq) = PQ_LIST[blk];
            let masks_in = MASKS[blk];
            if !masks_in.iter().any(|&m| v.sig & (1 << m) != 0) {
                continue;
            }
            let p0 = pp as isize - deg_shift.0;
            let q0 = qq as isize - deg_shift.1;
            if !(0..=2).contains(&p0) || !(0..=2).contains(&q0) {
                continue;
            }
            let src_blk = pq_index(p0 as usize, q0 as usize);
            let masks_src = MASKS[src_blk];
            let din = masks_in.len();
            let dsrc = masks_src.len();
            // Matrix of op from src block to v's block.
            let mut mat = [[C0; 4]; 4];
            for (bi, &mb) in masks_src.iter().enumerate() {
                let mut e = FormValue::zero();
                e.set(mb, Jet2::constant(C::new(1.0, 0.0)));
                let img = op(&e);
                for (ri, &mr) in masks_in.iter().enumerate() {
                    mat[ri][bi] = img.c[mr].val;
                }
            }
            let g_in = conj_mat(self.gram_vals(blk));
            let g_src = conj_mat(self.gram_vals(src_blk));
            let mut gv = [C0; 4];
            for r in 0..din {
                for (bi, &mb) in masks_in.iter().enumerate() {
                    gv[r] += g_in[r][bi] * v.c[mb].val;
                }
            }
            let mut rhs = [C0; 4];
            for r in 0..dsrc {
                for s in 0..din {
                    rhs[r] += mat[s][r].conj() * gv[s];
                }
            }
            let sol = solve_small(g_src, rhs, dsrc);
            for (oi, &mo) in masks_src.iter().enumerate() {
                out.c[mo] = out.c[mo] + Jet2::constant(sol[oi]);
                out.sig |= 1 << mo;
            }
        }
        out
    }

    /// Gram adjoint of tau on each bidegree.
    pub fn tau_star(&self, p_omega: &FormValue, v: &FormValue) -> FormValue {
        self.operator_adjoint(v, (1, 0), |e| self.tau(p_omega, e))
    }

    /// Gram adjoint of taubar on each bidegree.
    pub fn tau_bar_star(&self, bp_omega: &FormValue, v: &FormValue) -> FormValue {
        self.operator_adjoint(v, (0, 1), |e| self.tau_bar(bp_omega, e))
    }

    /// Trace pairing `tr_omega` of a (1,1) coefficient matrix, under the same
    /// convention scaling as Lambda on (1,1)-forms.
    pub fn tr_omega(&self, a: &[[C; 2]; 2]) -> C {
        let hinv = self.mj.hinv_val();
        let mut acc = C0;
        for i in 0..2 {
            for j in 0..2 {
                acc += hinv[i][j] * a[i][j];
            }
        }
        acc * self.conv.trace * self.conv.gram_forms
    }

    /// Full hh-bar contraction norm of a 2-tensor `A_{ij}` (pointwise).
    pub fn tensor2_norm2(&self, a: &[[C; 2]; 2]) -> f64 {
        self.tensor2_pair(a, a).re
    }

    /// `h^{i kbar} h^{j lbar} A_{ij} conj(B_{kl})`, convention-scaled.
    pub fn tensor2_pair(&self, a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> C {
        let hinv = self.mj.hinv_val();
        let mut acc = C0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        acc += hinv[i][k] * hinv[j][l] * a[i][j] * b[k][l].conj();
                    }
                }
            }
        }
        acc * self.conv.tensor2
    }
}

fn conj_mat(g: [[C; 4]; 4]) -> [[C; 4]; 4] {
    let mut out = g;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = v.conj();
        }
    }
    out
}

fn gram_entry(mj: &MetricJet, ma: usize, mb: usize) -> Jet2 {
    let za: Vec<usize> = (0..2).filter(|i| ma & (1 << i) != 0).collect();
    let zb: Vec<usize> = (0..2).filter(|i| mb & (1 << i) != 0).collect();
    let ba: Vec<usize> = (0..2).filter(|i| ma & (1 << (2 + i)) != 0).collect();
    let bb: Vec<usize> = (0..2).filter(|i| mb & (1 << (2 + i)) != 0).collect();
    debug_assert_eq!(za.len(), zb.len());
    debug_assert_eq!(ba.len(), bb.len());
    let det_z = small_det(&za, &zb, |r, c| mj.hinv[r][c]);
    // <dzb^j, dzb^l> = conj(h^{j lbar})
    let det_b = small_det(&ba, &bb, |r, c| mj.hinv[r][c].wirt_conj());
    det_z * det_b
}

fn small_det(rows: &[usize], cols: &[usize], entry: impl Fn(usize, usize) -> Jet2) -> Jet2 {
    match rows.len() {
        0 => Jet2::constant(C::new(1.0, 0.0)),
        1 => entry(rows[0], cols[0]),
        2 => {
            entry(rows[0], cols[0]) * entry(rows[1], cols[1])
                - entry(rows[0], cols[1]) * entry(rows[1], cols[0])
        }
        _ => unreachable!("blocks have at most two generators per type"),
    }
}

/// Gaussian elimination with partial pivoting for n <= 4.
fn solve_small(mut a: [[C; 4]; 4], mut b: [C; 4], n: usize) -> [C; 4] {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .norm()
                    .partial_cmp(&a[j][col].norm())
                    .expect("finite pivots")
            })
            .expect("nonempty");
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / d;
            for cc in col..n {
                let v = a[col][cc];
                a[r][cc] -= f * v;
            }
            let v = b[col];
            b[r] -= f * v;
        }
    }
    let mut x = [C0; 4];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for cc in col + 1..n {
            acc -= a[col][cc] * x[cc];
        }
        x[col] = acc / a[col][col];
    }
    x
}

// ---------------------------------------------------------------------------
// Derived dashboard
// ---------------------------------------------------------------------------

/// One evaluation of every composite differential quantity at a point.
pub struct Dashboard {
    pub omega: FormValue,
    /// del omega (2,1).
    pub p_omega: FormValue,
    /// delbar omega (1,2).
    pub bp_omega: FormValue,
    /// dbar* omega (1,0), jet coefficients.
    pub bsw: FormValue,
    /// d* omega (0,1), jet coefficients.
    pub psw: FormValue,
    /// d d* omega (1,1).
    pub ppsw: FormValue,
    /// dbar dbar* omega (1,1).
    pub bbsw: FormValue,
    /// d dbar* omega (2,0).
    pub pbsw: FormValue,
    /// dbar* del omega (2,0).
    pub bs_p_omega: FormValue,
    /// d* del omega (1,1).
    pub ps_p_omega: FormValue,
    /// dbar* delbar omega (1,1).
    pub bs_bp_omega: FormValue,
    /// Lambda dbar dbar* omega.
    pub lam_bbsw: C,
    /// Lambda d d* omega.
    pub lam_ppsw: C,
    /// sqrt(-1) d dbar omega (2,2).
    pub ddbar_omega: FormValue,
    /// Lambda of the above (1,1).
    pub lam_ddbar: FormValue,
    /// |dbar* omega|^2.
    pub a1: f64,
    /// |d* omega|^2.
    pub a2: f64,
    /// sqrt(-1) dbar* omega wedge d* omega (1,1).
    pub tt: FormValue,
    /// sqrt(-1) d* dbar* omega (scalar).
    pub ps_bsw: C,
    /// B = (pp* + bb*)/2 - tt/2 - (Lambda pp* - a1) omega (1,1).
    pub b_form: FormValue,
}

impl Dashboard {
    pub fn compute(ctx: &FormCtx) -> Dashboard {
        let omega = omega_form(&ctx.mj);
        let (p_omega, bp_omega) = d_split(&omega);
        let star_omega = ctx.star(&omega);
        let (d_so, db_so) = d_split(&star_omega);
        let neg = C::new(-1.0, 0.0);
        let bsw = ctx.star(&d_so).scale(neg);
        let psw = ctx.star(&db_so).scale(neg);
        let (ppsw, _) = d_split(&psw);
        let (pbsw, bbsw) = d_split(&bsw);
        let bs_p_omega = ctx.del_bar_star(&p_omega);
        let ps_p_omega = ctx.del_star(&p_omega);
        let bs_bp_omega = ctx.del_bar_star(&bp_omega);
        let lam_bbsw = ctx.lambda(&bbsw).c[0].val;
        let lam_ppsw = ctx.lambda(&ppsw).c[0].val;
        let (dd, _) = d_split(&bp_omega);
        let ddbar_omega = dd.scale(I);
        let lam_ddbar = ctx.lambda(&ddbar_omega);
        let a1 = ctx.norm2(&bsw);
        let a2 = ctx.norm2(&psw);
        let tt = wedge(&bsw, &psw).scale(I);
        let ps_bsw = I * ctx.del_star(&bsw).c[0].val;
        let half = C::new(0.5, 0.0);
        let mut b_form = (&(&ppsw + &bbsw).scale(half) - &tt.scale(half)).clone();
        let coef = lam_ppsw - C::new(a1, 0.0);
        b_form = &b_form - &omega.scale(coef);
        Dashboard {
            omega,
            p_omega,
            bp_omega,
            bsw,
            psw,
            ppsw,
            bbsw,
            pbsw,
            bs_p_omega,
            ps_p_omega,
            bs_bp_omega,
            lam_bbsw,
            lam_ppsw,
            ddbar_omega,
            lam_ddbar,
            a1,
            a2,
            tt,
            ps_bsw,
            b_form,
        }
    }
}
