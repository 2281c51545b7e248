//! Five-point stencil systems on a structured lattice and the Krylov solvers
//! that every field solver in this crate shares.
//!
//! A row reads `ap*x_P - ae*x_E - aw*x_W - an*x_N - as*x_S = b`, with
//! nonnegative neighbour coefficients for the M-matrices produced by
//! finite-volume diffusion and upwind advection.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

#[derive(Debug, Clone)]
pub struct Stencil5 {
    pub mx: usize,
    pub my: usize,
    pub ap: Vec<f64>,
    pub ae: Vec<f64>,
    pub aw: Vec<f64>,
    pub an: Vec<f64>,
    pub as_: Vec<f64>,
    pub b: Vec<f64>,
    fixed: Vec<bool>,
}

impl Stencil5 {
    pub fn new(mx: usize, my: usize) -> Self {
        let n = mx * my;
        Self {
            mx,
            my,
            ap: vec![0.0; n],
            ae: vec![0.0; n],
            aw: vec![0.0; n],
            an: vec![0.0; n],
            as_: vec![0.0; n],
            b: vec![0.0; n],
            fixed: vec![false; n],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mx * self.my
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Turns row `k` into `x_k = value`.
    pub fn fix(&mut self, k: usize, value: f64) {
        self.ap[k] = 1.0;
        self.ae[k] = 0.0;
        self.aw[k] = 0.0;
        self.an[k] = 0.0;
        self.as_[k] = 0.0;
        self.b[k] = value;
        self.fixed[k] = true;
    }

    pub fn is_fixed(&self, k: usize) -> bool {
        self.fixed[k]
    }

    /// Moves links that point at fixed rows into the right-hand side, which
    /// keeps a symmetric system symmetric.
    pub fn eliminate_fixed_links(&mut self) {
        let mx = self.mx;
        for k in 0..self.len() {
            if self.fixed[k] {
                continue;
            }
            let i = k % mx;
            if i + 1 < mx && self.fixed[k + 1] {
                self.b[k] += self.ae[k] * self.b[k + 1];
                self.ae[k] = 0.0;
            }
            if i > 0 && self.fixed[k - 1] {
                self.b[k] += self.aw[k] * self.b[k - 1];
                self.aw[k] = 0.0;
            }
            if k + mx < self.len() && self.fixed[k + mx] {
                self.b[k] += self.an[k] * self.b[k + mx];
                self.an[k] = 0.0;
            }
            if k >= mx && self.fixed[k - mx] {
                self.b[k] += self.as_[k] * self.b[k - mx];
                self.as_[k] = 0.0;
            }
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mx = self.mx;
        let my = self.my;
        for j in 0..my {
            let row = j * mx;
            for i in 0..mx {
                let k = row + i;
                let mut acc = self.ap[k] * x[k];
                if i + 1 < mx {
                    acc -= self.ae[k] * x[k + 1];
                }
                if i > 0 {
                    acc -= self.aw[k] * x[k - 1];
                }
                if j + 1 < my {
                    acc -= self.an[k] * x[k + mx];
                }
                if j > 0 {
                    acc -= self.as_[k] * x[k - mx];
                }
                y[k] = acc;
            }
        }
    }

    /// `b - A x`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.len()];
        self.apply(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri = bi - *ri;
        }
        r
    }

    /// `||b - A x|| / ||b||`, or `||b - A x||` when `b` vanishes.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let r = norm(&self.residual(x));
        let bn = norm(&self.b);
        if bn > 0.0 {
            r / bn
        } else {
            r
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    Jacobi,
    /// Zero fill-in incomplete LU, symmetric when the matrix is.
    Ilu0,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub preconditioner: Preconditioner,
    pub name: &'static str,
}

impl SolverOptions {
    pub fn new(name: &'static str, tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            preconditioner: Preconditioner::Ilu0,
            name,
        }
    }

    pub fn with_preconditioner(mut self, p: Preconditioner) -> Self {
        self.preconditioner = p;
        self
    }
}

enum Precond {
    Jacobi(Vec<f64>),
    Ilu0 { d: Vec<f64> },
}

impl Precond {
    fn build(a: &Stencil5, kind: Preconditioner) -> Self {
        let jacobi = || Precond::Jacobi(a.ap.iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect());
        match kind {
            Preconditioner::Jacobi => jacobi(),
            Preconditioner::Ilu0 => {
                let mx = a.mx;
                let mut d = vec![0.0; a.len()];
                for k in 0..a.len() {
                    let i = k % mx;
                    let mut dk = a.ap[k];
                    if i > 0 {
                        dk -= a.aw[k] * a.ae[k - 1] / d[k - 1];
                    }
                    if k >= mx {
                        dk -= a.as_[k] * a.an[k - mx] / d[k - mx];
                    }
                    if !(dk > 1e-300) {
                        return jacobi();
                    }
                    d[k] = dk;
                }
                Precond::Ilu0 { d }
            }
        }
    }

    fn apply(&self, a: &Stencil5, r: &[f64], z: &mut [f64]) {
        match self {
            Precond::Jacobi(inv) => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(inv) {
                    *zi = ri * di;
                }
            }
            Precond::Ilu0 { d } => {
                let mx = a.mx;
                let n = a.len();
                for k in 0..n {
                    let i = k % mx;
                    let mut acc = r[k];
                    if i > 0 {
                        acc += a.aw[k] * z[k - 1];
                    }
                    if k >= mx {
                        acc += a.as_[k] * z[k - mx];
                    }
                    z[k] = acc / d[k];
                }
                for k in (0..n).rev() {
                    let i = k % mx;
                    let mut acc = 0.0;
                    if i + 1 < mx {
                        acc += a.ae[k] * z[k + 1];
                    }
                    if k + mx < n {
                        acc += a.an[k] * z[k + mx];
                    }
                    z[k] += acc / d[k];
                }
            }
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Preconditioned conjugate gradients. `a` must be symmetric positive definite.
/// `x` holds the initial guess on entry and the solution on exit.
pub fn cg(a: &Stencil5, x: &mut [f64], opts: SolverOptions) -> Result<SolveStats> {
    let n = a.len();
    let bn = norm(&a.b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats { iterations: 0, residual: 0.0 });
    }
    let m = Precond::build(a, opts.preconditioner);
    let mut r = a.residual(x);
    let mut rel = norm(&r) / bn;
    if rel <= opts.tol {
        return Ok(SolveStats { iterations: 0, residual: rel });
    }
    let mut z = vec![0.0; n];
    m.apply(a, &r, &mut z);
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 1..=opts.max_iter {
        a.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq == 0.0 {
            break;
        }
        let alpha = rz / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        rel = norm(&r) / bn;
        if rel <= opts.tol {
            return Ok(SolveStats { iterations: it, residual: rel });
        }
        m.apply(a, &r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    // The recursive residual drifts from the true one over long runs.
    let true_rel = a.relative_residual(x);
    if true_rel <= opts.tol {
        return Ok(SolveStats { iterations: opts.max_iter, residual: true_rel });
    }
    Err(Error::LinearSolver {
        system: opts.name,
        iterations: opts.max_iter,
        residual: true_rel,
    })
}

/// Right-preconditioned BiCGSTAB for the nonsymmetric advection systems.
pub fn bicgstab(a: &Stencil5, x: &mut [f64], opts: SolverOptions) -> Result<SolveStats> {
    let n = a.len();
    let bn = norm(&a.b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats { iterations: 0, residual: 0.0 });
    }
    let m = Precond::build(a, opts.preconditioner);
    let mut r = a.residual(x);
    let mut rel = norm(&r) / bn;
    if rel <= opts.tol {
        return Ok(SolveStats { iterations: 0, residual: rel });
    }
    let mut r_hat = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 1..=opts.max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < 1e-300 || omega == 0.0 {
            // Breakdown: restart the shadow space from the current residual.
            r = a.residual(x);
            r_hat.copy_from_slice(&r);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.iter_mut().for_each(|e| *e = 0.0);
            p.iter_mut().for_each(|e| *e = 0.0);
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
        }
        m.apply(a, &p, &mut y);
        a.apply(&y, &mut v);
        let rv = dot(&r_hat, &v);
        if rv == 0.0 {
            omega = 0.0;
            continue;
        }
        alpha = rho / rv;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        if norm(&s) / bn <= opts.tol {
            for k in 0..n {
                x[k] += alpha * y[k];
            }
            rel = a.relative_residual(x);
            if rel <= opts.tol {
                return Ok(SolveStats { iterations: it, residual: rel });
            }
            r = a.residual(x);
            continue;
        }
        m.apply(a, &s, &mut z);
        a.apply(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for k in 0..n {
            x[k] += alpha * y[k] + omega * z[k];
            r[k] = s[k] - omega * t[k];
        }
        rel = norm(&r) / bn;
        if rel <= opts.tol {
            let true_rel = a.relative_residual(x);
            if true_rel <= opts.tol * 10.0 {
                return Ok(SolveStats { iterations: it, residual: true_rel });
            }
            r = a.residual(x);
        }
    }
    let true_rel = a.relative_residual(x);
    if true_rel <= opts.tol {
        return Ok(SolveStats { iterations: opts.max_iter, residual: true_rel });
    }
    Err(Error::LinearSolver {
        system: opts.name,
        iterations: opts.max_iter,
        residual: true_rel,
    })
}

/// Flexible GMRES(`restart`) with right preconditioning, for operators given
/// as closures. The preconditioner may change between applications, e.g.
/// when it wraps an inexact inner solve.
pub fn fgmres<A, P>(
    mut apply: A,
    mut precond: P,
    b: &[f64],
    x: &mut [f64],
    restart: usize,
    opts: SolverOptions,
) -> Result<SolveStats>
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n = b.len();
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(SolveStats { iterations: 0, residual: 0.0 });
    }
    let m = restart.max(1);
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut total = 0;
    let mut rel;
    loop {
        apply(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let beta = norm(&r);
        rel = beta / bn;
        if rel <= opts.tol {
            return Ok(SolveStats { iterations: total, residual: rel });
        }
        if total >= opts.max_iter {
            break;
        }
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        v.push(r.iter().map(|e| e / beta).collect());
        // Hessenberg columns, rotated in place.
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && total < opts.max_iter {
            let mut zk = vec![0.0; n];
            precond(&v[k], &mut zk)?;
            apply(&zk, &mut w);
            z.push(zk);
            let mut col = vec![0.0; k + 2];
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(&w, vi);
                col[i] = hij;
                for (we, ve) in w.iter_mut().zip(vi) {
                    *we -= hij * ve;
                }
            }
            let wn = norm(&w);
            col[k + 1] = wn;
            for i in 0..k {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let denom = sqrt(col[k] * col[k] + col[k + 1] * col[k + 1]);
            let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (col[k] / denom, col[k + 1] / denom) };
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = 0.0;
            g[k + 1] = -s * g[k];
            g[k] *= c;
            cs.push(c);
            sn.push(s);
            h.push(col);
            k += 1;
            total += 1;
            let est = g[k].abs() / bn;
            if est <= opts.tol || wn == 0.0 {
                break;
            }
            v.push(w.iter().map(|e| e / wn).collect());
        }
        // Back substitution for the update coefficients.
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { acc / h[i][i] } else { 0.0 };
        }
        for (yi, zi) in y.iter().zip(&z) {
            for (xe, ze) in x.iter_mut().zip(zi) {
                *xe += yi * ze;
            }
        }
    }
    Err(Error::LinearSolver {
        system: opts.name,
        iterations: total,
        residual: rel,
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn fgmres_matches_direct_solution() {
        // Nonsymmetric tridiagonal system with a known solution.
        let n = 50;
        let exact: Vec<f64> = (0..n).map(|k| libm::sin(k as f64 * 0.3)).collect();
        let apply = |x: &[f64], y: &mut [f64]| {
            for k in 0..n {
                let mut acc = 4.0 * x[k];
                if k > 0 {
                    acc -= 1.5 * x[k - 1];
                }
                if k + 1 < n {
                    acc -= 0.5 * x[k + 1];
                }
                y[k] = acc;
            }
        };
        let mut b = vec![0.0; n];
        apply(&exact, &mut b);
        let mut x = vec![0.0; n];
        let stats = fgmres(
            apply,
            |r: &[f64], z: &mut [f64]| {
                z.iter_mut().zip(r).for_each(|(zi, ri)| *zi = ri / 4.0);
                Ok(())
            },
            &b,
            &mut x,
            10,
            SolverOptions::new("test", 1e-12, 500),
        )
        .unwrap();
        assert!(stats.residual <= 1e-12);
        for (a, e) in x.iter().zip(&exact) {
            assert!((a - e).abs() < 1e-10);
        }
    }

    use super::*;

    /// 1-D Poisson -x'' = 1 on (0, 1) with x = 0 at both ends (half-cell
    /// Dirichlet), laid out along the lattice's x direction.
    fn poisson_1d(n: usize) -> Stencil5 {
        let h = 1.0 / n as f64;
        let mut a = Stencil5::new(n, 1);
        for k in 0..n {
            a.ae[k] = if k + 1 < n { 1.0 / h } else { 0.0 };
            a.aw[k] = if k > 0 { 1.0 / h } else { 0.0 };
            let boundary = if k == 0 || k + 1 == n { 2.0 / h } else { 0.0 };
            a.ap[k] = a.ae[k] + a.aw[k] + boundary;
            a.b[k] = h;
        }
        a
    }

    #[test]
    fn cg_solves_symmetric_system() {
        for pc in [Preconditioner::Jacobi, Preconditioner::Ilu0] {
            let a = poisson_1d(50);
            let mut x = vec![0.0; 50];
            let stats = cg(&a, &mut x, SolverOptions::new("test", 1e-12, 500).with_preconditioner(pc)).unwrap();
            assert!(stats.residual <= 1e-12);
            assert!(a.relative_residual(&x) < 1e-10);
        }
    }

    #[test]
    fn ilu0_is_exact_for_a_single_line() {
        // A tridiagonal matrix has no fill-in, so ILU(0) is a direct solver.
        let a = poisson_1d(40);
        let mut x = vec![0.0; 40];
        let stats = bicgstab(&a, &mut x, SolverOptions::new("test", 1e-12, 10)).unwrap();
        assert!(stats.iterations <= 2, "{stats:?}");
    }

    #[test]
    fn bicgstab_solves_upwind_advection() {
        let (mx, my) = (30, 20);
        let mut a = Stencil5::new(mx, my);
        for j in 0..my {
            for i in 0..mx {
                let k = j * mx + i;
                let diff = 1.0;
                let conv = 5.0;
                a.ae[k] = if i + 1 < mx { diff } else { 0.0 };
                a.aw[k] = if i > 0 { diff + conv } else { 0.0 };
                a.an[k] = if j + 1 < my { diff } else { 0.0 };
                a.as_[k] = if j > 0 { diff } else { 0.0 };
                a.ap[k] = a.ae[k] + a.aw[k] + a.an[k] + a.as_[k] + 1.0;
                a.b[k] = (i + j) as f64;
            }
        }
        let mut x = vec![0.0; mx * my];
        bicgstab(&a, &mut x, SolverOptions::new("test", 1e-11, 200)).unwrap();
        assert!(a.relative_residual(&x) < 1e-10);
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let mut a = poisson_1d(10);
        a.b.iter_mut().for_each(|v| *v = 0.0);
        let mut x = vec![3.0; 10];
        cg(&a, &mut x, SolverOptions::new("test", 1e-10, 5)).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fixed_rows_are_honoured() {
        let mut a = poisson_1d(10);
        a.fix(0, 2.0);
        a.eliminate_fixed_links();
        let mut x = vec![0.0; 10];
        cg(&a, &mut x, SolverOptions::new("test", 1e-12, 100)).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let a = poisson_1d(200);
        let mut x = vec![0.0; 200];
        let err = cg(&a, &mut x, SolverOptions::new("probe", 1e-14, 2).with_preconditioner(Preconditioner::Jacobi))
            .unwrap_err();
        assert!(matches!(err, Error::LinearSolver { system: "probe", iterations: 2, .. }));
    }
}
