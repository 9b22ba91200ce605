//! Order-2 truncated Taylor (jet) arithmetic over complex scalars in the four
//! Wirtinger directions `z1, z2, zb1, zb2`, plus a finite-difference oracle
//! that estimates the same derivatives by a completely independent route.
//!
//! A [`Jet2`] carries a value, its four first derivatives and the ten
//! independent entries of the symmetric Hessian. Arithmetic is exact through
//! second order; quantities obtained by *extracting* a derivative slot (see
//! [`Jet2::d_jet`]) are exact only one order lower, which is all the curvature
//! formulas need.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the engine.
pub type C = Complex64;

/// Number of Wirtinger directions: z1, z2, zb1, zb2.
pub const NDIR: usize = 4;
/// Independent second-derivative slots (upper triangle of a symmetric 4x4).
pub const NDD: usize = 10;

/// Packed index of the symmetric second-derivative pair `(i, j)`.
#[inline]
pub fn pack(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (7 - i) / 2 + j
}

/// Direction swapped under conjugation: z_i <-> zb_i.
#[inline]
pub fn conj_dir(k: usize) -> usize {
    (k + 2) % 4
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("division by a value of modulus {0:e} (< 1e-300)")]
    DivisionByZero(f64),
    #[error("{func} evaluated on its branch cut (value {value})")]
    BranchCut { func: &'static str, value: C },
    #[error("direction index {0} out of range (0..4)")]
    BadDirection(usize),
}

/// Value, gradient and Hessian of a scalar in the four Wirtinger directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub val: C,
    pub d: [C; NDIR],
    pub dd: [C; NDD],
}

const ZERO: C = C::new(0.0, 0.0);

impl Jet2 {
    pub const fn zero() -> Self {
        Jet2 { val: ZERO, d: [ZERO; NDIR], dd: [ZERO; NDD] }
    }

    pub fn constant(v: C) -> Self {
        Jet2 { val: v, ..Jet2::zero() }
    }

    pub fn real(x: f64) -> Self {
        Jet2::constant(C::new(x, 0.0))
    }

    /// Jet of the coordinate in direction `k` at base value `value`.
    pub fn seed(k: usize, value: C) -> Result<Self, JetError> {
        if k >= NDIR {
            return Err(JetError::BadDirection(k));
        }
        let mut j = Jet2::constant(value);
        j.d[k] = C::new(1.0, 0.0);
        Ok(j)
    }

    #[inline]
    pub fn dd_at(&self, i: usize, j: usize) -> C {
        self.dd[pack(i, j)]
    }

    /// First-derivative extraction: the jet of `df/dz^k`.
    ///
    /// Only the value and first-derivative slots of the result are exact; its
    /// own Hessian would need third derivatives of `f` and is set to zero.
    pub fn d_jet(&self, k: usize) -> Jet2 {
        let mut out = Jet2::constant(self.d[k]);
        for j in 0..NDIR {
            out.d[j] = self.dd_at(k, j);
        }
        out
    }

    /// Wirtinger conjugate: the jet of `conj(f)` at an honest point
    /// (`zb = conj(z)`), where `d(conj f)/dz^k = conj(df/dz^kbar)`.
    pub fn wirt_conj(&self) -> Jet2 {
        let mut out = Jet2::constant(self.val.conj());
        for k in 0..NDIR {
            out.d[k] = self.d[conj_dir(k)].conj();
        }
        for i in 0..NDIR {
            for j in i..NDIR {
                out.dd[pack(i, j)] = self.dd_at(conj_dir(i), conj_dir(j)).conj();
            }
        }
        out
    }

    #[inline]
    pub fn scale(&self, s: C) -> Jet2 {
        let mut out = *self;
        out.val *= s;
        for k in 0..NDIR {
            out.d[k] *= s;
        }
        for k in 0..NDD {
            out.dd[k] *= s;
        }
        out
    }

    /// Chain rule for a lifted analytic function with derivatives `f1 = f'(val)`
    /// and `f2 = f''(val)`.
    fn lift(&self, f0: C, f1: C, f2: C) -> Jet2 {
        let mut out = Jet2::constant(f0);
        for k in 0..NDIR {
            out.d[k] = f1 * self.d[k];
        }
        for i in 0..NDIR {
            for j in i..NDIR {
                out.dd[pack(i, j)] = f2 * self.d[i] * self.d[j] + f1 * self.dd_at(i, j);
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Jet2, JetError> {
        let v = self.val;
        if v.norm() < 1e-300 {
            return Err(JetError::DivisionByZero(v.norm()));
        }
        let inv = C::new(1.0, 0.0) / v;
        Ok(self.lift(inv, -inv * inv, 2.0 * inv * inv * inv))
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.val.exp();
        self.lift(e, e, e)
    }

    fn off_cut(&self, func: &'static str) -> Result<(), JetError> {
        let v = self.val;
        if v.norm() < 1e-300 || (v.im == 0.0 && v.re < 0.0) {
            return Err(JetError::BranchCut { func, value: v });
        }
        Ok(())
    }

    pub fn ln(&self) -> Result<Jet2, JetError> {
        self.off_cut("log")?;
        let v = self.val;
        let inv = C::new(1.0, 0.0) / v;
        Ok(self.lift(v.ln(), inv, -inv * inv))
    }

    pub fn sqrt(&self) -> Result<Jet2, JetError> {
        self.off_cut("sqrt")?;
        let s = self.val.sqrt();
        let f1 = C::new(0.5, 0.0) / s;
        let f2 = -f1 / (2.0 * self.val);
        Ok(self.lift(s, f1, f2))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.lift(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.lift(c, -s, -c)
    }

    /// Integer power; negative exponents require an invertible value.
    pub fn powi(&self, n: i32) -> Result<Jet2, JetError> {
        match n {
            0 => Ok(Jet2::constant(C::new(1.0, 0.0))),
            1 => Ok(*self),
            _ => {
                if n < 0 && self.val.norm() < 1e-300 {
                    return Err(JetError::DivisionByZero(self.val.norm()));
                }
                let v = self.val;
                let nf = f64::from(n);
                // x^(n-2) without a 0^negative intermediate for n >= 2.
                let f0 = v.powi(n);
                let (f1, f2) = if v.norm() < 1e-300 {
                    // n >= 2 here, so derivatives at 0 vanish except n == 2.
                    let f2 = if n == 2 { C::new(2.0, 0.0) } else { ZERO };
                    (if n == 1 { C::new(1.0, 0.0) } else { ZERO }, f2)
                } else {
                    let p1 = v.powi(n - 1);
                    (nf * p1, nf * (nf - 1.0) * p1 / v)
                };
                Ok(self.lift(f0, f1, f2))
            }
        }
    }

    pub fn div(&self, rhs: &Jet2) -> Result<Jet2, JetError> {
        Ok(*self * rhs.recip()?)
    }
}

impl std::ops::Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.val += rhs.val;
        for k in 0..NDIR {
            out.d[k] += rhs.d[k];
        }
        for k in 0..NDD {
            out.dd[k] += rhs.dd[k];
        }
        out
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.val -= rhs.val;
        for k in 0..NDIR {
            out.d[k] -= rhs.d[k];
        }
        for k in 0..NDD {
            out.dd[k] -= rhs.dd[k];
        }
        out
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(C::new(-1.0, 0.0))
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.val * rhs.val);
        for k in 0..NDIR {
            out.d[k] = self.d[k] * rhs.val + self.val * rhs.d[k];
        }
        for i in 0..NDIR {
            for j in i..NDIR {
                out.dd[pack(i, j)] = self.dd_at(i, j) * rhs.val
                    + self.d[i] * rhs.d[j]
                    + self.d[j] * rhs.d[i]
                    + self.val * rhs.dd_at(i, j);
            }
        }
        out
    }
}

impl std::ops::Mul<C> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: C) -> Jet2 {
        self.scale(rhs)
    }
}

impl std::ops::Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(C::new(rhs, 0.0))
    }
}

impl std::iter::Sum for Jet2 {
    fn sum<I: Iterator<Item = Jet2>>(iter: I) -> Jet2 {
        iter.fold(Jet2::zero(), |a, b| a + b)
    }
}

/// Central-difference estimate of a Wirtinger derivative of `f` at `p`.
///
/// `dirs` is a multi-index of length 0..=2 over the directions z1, z2, zb1,
/// zb2. The stencil moves the real coordinates x, y of the affected pair
/// (`z = x + iy`, `zb = x - iy`, valid even off the honest locus) and combines
/// the differences with d/dz = (dx - i dy)/2, d/dzb = (dx + i dy)/2.
/// Truncation error is O(step^2); one Richardson step is available.
pub fn fd_oracle<F, E>(f: &F, p: [C; 4], dirs: &[usize], step: f64, richardson: bool) -> Result<C, E>
where
    F: Fn([C; 4]) -> Result<C, E>,
{
    assert!(dirs.len() <= 2, "fd oracle supports derivative order <= 2");
    assert!((1e-6..=1e-2).contains(&step), "fd step must lie in [1e-6, 1e-2]");
    match dirs {
        [] => f(p),
        [k] => {
            if richardson {
                let d1 = fd_first(f, p, *k, step)?;
                let d2 = fd_first(f, p, *k, step / 2.0)?;
                Ok((4.0 * d2 - d1) / 3.0)
            } else {
                fd_first(f, p, *k, step)
            }
        }
        [a, b] => {
            let inner = |q: [C; 4]| fd_first(f, q, *b, step);
            if richardson {
                let d1 = fd_first(&inner, p, *a, step)?;
                let half = |q: [C; 4]| fd_first(f, q, *b, step / 2.0);
                let d2 = fd_first(&half, p, *a, step / 2.0)?;
                Ok((4.0 * d2 - d1) / 3.0)
            } else {
                fd_first(&inner, p, *a, step)
            }
        }
        _ => unreachable!(),
    }
}

fn fd_first<F, E>(f: &F, p: [C; 4], k: usize, h: f64) -> Result<C, E>
where
    F: Fn([C; 4]) -> Result<C, E>,
{
    let (pair, bar) = if k < 2 { (k, false) } else { (k - 2, true) };
    let shift = |re: C, im: C| {
        let mut q = p;
        q[pair] += re;
        q[pair + 2] += im;
        q
    };
    let h_c = C::new(h, 0.0);
    let ih = C::new(0.0, h);
    // x-move shifts z and zb together; y-move shifts them oppositely.
    let dx = (f(shift(h_c, h_c))? - f(shift(-h_c, -h_c))?) / (2.0 * h);
    let dy = (f(shift(ih, -ih))? - f(shift(-ih, ih))?) / (2.0 * h);
    let i = C::new(0.0, 1.0);
    Ok(if bar { (dx + i * dy) / 2.0 } else { (dx - i * dy) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn seed_layout() {
        let j = Jet2::seed(0, c(1.0, 0.0)).unwrap();
        assert_eq!(j.val, c(1.0, 0.0));
        assert_eq!(j.d, [c(1.0, 0.0), ZERO, ZERO, ZERO]);
        assert_eq!(j.dd, [ZERO; NDD]);
        let j = Jet2::seed(2, ZERO).unwrap();
        assert_eq!(j.d[2], c(1.0, 0.0));
        let j = Jet2::seed(1, c(0.0, 2.0)).unwrap();
        assert_eq!(j.val, c(0.0, 2.0));
        assert_eq!(j.d[1], c(1.0, 0.0));
        assert!(Jet2::seed(4, ZERO).is_err());
    }

    #[test]
    fn square_has_second_derivative_two() {
        let x = Jet2::seed(0, c(3.0, 1.0)).unwrap();
        let sq = x * x;
        assert_eq!(sq.dd_at(0, 0), c(2.0, 0.0));
        assert_eq!(sq.d[0], 2.0 * c(3.0, 1.0));
    }

    #[test]
    fn hopf_component_mixed_second_derivative() {
        // 1/(z1 zb1 + z2 zb2) at (1,0): d2/dz1 dzb1 = 1.
        let z1 = Jet2::seed(0, c(1.0, 0.0)).unwrap();
        let zb1 = Jet2::seed(2, c(1.0, 0.0)).unwrap();
        let z2 = Jet2::seed(1, ZERO).unwrap();
        let zb2 = Jet2::seed(3, ZERO).unwrap();
        let rho = z1 * zb1 + z2 * zb2;
        let inv = rho.recip().unwrap();
        assert!((inv.val - c(1.0, 0.0)).norm() < 1e-15);
        assert!((inv.d[0] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((inv.dd_at(0, 2) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn exp_at_zero_has_unit_slots() {
        let e = Jet2::seed(0, ZERO).unwrap().exp();
        assert_eq!(e.val, c(1.0, 0.0));
        assert_eq!(e.d[0], c(1.0, 0.0));
        assert_eq!(e.dd_at(0, 0), c(1.0, 0.0));
    }

    #[test]
    fn division_and_log_guards() {
        let zero = Jet2::constant(ZERO);
        assert!(zero.recip().is_err());
        assert!(Jet2::constant(c(-2.0, 0.0)).ln().is_err());
        assert!(Jet2::constant(c(-2.0, 0.0)).sqrt().is_err());
        assert!(Jet2::constant(c(-2.0, 1e-3)).ln().is_ok());
    }

    #[test]
    fn fd_matches_simple_derivatives() {
        let f = |q: [C; 4]| -> Result<C, JetError> { Ok(q[0] * q[0]) };
        let p = [c(3.0, 0.0), ZERO, c(3.0, 0.0), ZERO];
        let d = fd_oracle(&f, p, &[0], 1e-4, false).unwrap();
        assert!((d - c(6.0, 0.0)).norm() < 1e-6);

        let f = |q: [C; 4]| -> Result<C, JetError> { Ok(q[0] * q[2]) };
        let p = [c(2.0, 0.0), ZERO, c(2.0, 0.0), ZERO];
        let d = fd_oracle(&f, p, &[2], 1e-5, true).unwrap();
        assert!((d - c(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn fd_matches_hopf_mixed_second() {
        let f = |q: [C; 4]| -> Result<C, JetError> {
            let rho = q[0] * q[2] + q[1] * q[3];
            Ok(C::new(1.0, 0.0) / rho)
        };
        let p = [c(1.0, 0.0), ZERO, c(1.0, 0.0), ZERO];
        let d = fd_oracle(&f, p, &[0, 2], 1e-4, false).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn wirt_conj_swaps_directions() {
        let mut j = Jet2::seed(0, c(1.0, 2.0)).unwrap();
        j.dd[pack(0, 2)] = c(0.5, -0.25);
        let k = j.wirt_conj();
        assert_eq!(k.val, c(1.0, -2.0));
        assert_eq!(k.d[2], c(1.0, 0.0));
        assert_eq!(k.dd_at(2, 0), c(0.5, 0.25));
    }
}
