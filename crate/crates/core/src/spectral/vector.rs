use rustfft::num_complex::Complex64;

use super::grid::Grid;
use super::scalar::SpectralScalar;
use crate::error::{Error, Result};

/// Tolerance for the divergence-free flag, relative to the field's L2 norm.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;

/// Two-component periodic vector field on the unit torus.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVectorField {
    components: [SpectralScalar; 2],
    divergence_free: bool,
}

impl SpectralVectorField {
    pub fn new(x: SpectralScalar, y: SpectralScalar) -> Result<Self> {
        x.grid().ensure_same(y.grid())?;
        Ok(Self {
            components: [x, y],
            divergence_free: false,
        })
    }

    /// Skips the divergence check; for operators that preserve it exactly.
    pub(crate) fn from_divfree_parts(x: SpectralScalar, y: SpectralScalar) -> Self {
        Self {
            components: [x, y],
            divergence_free: true,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            components: [SpectralScalar::zeros(grid), SpectralScalar::zeros(grid)],
            divergence_free: true,
        }
    }

    /// Builds a field from a pair of physical-space functions.
    pub fn from_fns(
        grid: &Grid,
        fx: impl Fn(f64, f64) -> f64,
        fy: impl Fn(f64, f64) -> f64,
    ) -> Self {
        Self {
            components: [
                SpectralScalar::from_fn(grid, fx),
                SpectralScalar::from_fn(grid, fy),
            ],
            divergence_free: false,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    #[inline]
    pub fn x(&self) -> &SpectralScalar {
        &self.components[0]
    }

    #[inline]
    pub fn y(&self) -> &SpectralScalar {
        &self.components[1]
    }

    #[inline]
    pub fn component(&self, axis: usize) -> &SpectralScalar {
        &self.components[axis]
    }

    /// Mutable component access; clears the divergence-free flag.
    pub fn component_mut(&mut self, axis: usize) -> &mut SpectralScalar {
        self.divergence_free = false;
        &mut self.components[axis]
    }

    pub fn into_components(self) -> (SpectralScalar, SpectralScalar) {
        let [x, y] = self.components;
        (x, y)
    }

    #[inline]
    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// Largest `|k.u(k)| / |k|` over all modes, divided by the field's L2 norm.
    pub fn divergence_defect(&self) -> f64 {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let grid = self.grid();
        let (cx, cy) = (self.x().coefficients(), self.y().coefficients());
        let mut worst = 0.0_f64;
        for flat in 1..grid.len() {
            let (k1, k2) = grid.wavevector(flat);
            let kk = ((k1 * k1 + k2 * k2) as f64).sqrt();
            let d = (cx[flat] * k1 as f64 + cy[flat] * k2 as f64).norm() / kk;
            worst = worst.max(d);
        }
        worst / norm
    }

    /// Sets the divergence-free flag after verifying the invariant.
    pub fn mark_divergence_free(mut self) -> Result<Self> {
        let defect = self.divergence_defect();
        if defect > DIVERGENCE_TOLERANCE {
            return Err(Error::NotDivergenceFree {
                max_divergence: defect,
            });
        }
        self.divergence_free = true;
        Ok(self)
    }

    pub fn to_physical(&self) -> [Vec<f64>; 2] {
        [self.x().to_physical(), self.y().to_physical()]
    }

    /// Pointwise maximum of `|u(x)|` over the grid.
    pub fn max_magnitude(&self) -> f64 {
        let [ux, uy] = self.to_physical();
        ux.iter()
            .zip(&uy)
            .map(|(a, b)| (a * a + b * b).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SpectralScalar::is_zero)
    }

    fn map(&self, f: impl Fn(&SpectralScalar) -> SpectralScalar, keeps_divfree: bool) -> Self {
        Self {
            components: [f(&self.components[0]), f(&self.components[1])],
            divergence_free: self.divergence_free && keeps_divfree,
        }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Self) {
        self.components[0].axpy(a, &other.components[0]);
        self.components[1].axpy(a, &other.components[1]);
        self.divergence_free &= other.divergence_free;
    }

    pub fn scale(&mut self, a: f64) {
        self.components[0].scale(a);
        self.components[1].scale(a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|c| c.scaled(a), true)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid().ensure_same(other.grid())?;
        let mut out = self.clone();
        out.axpy(1.0, other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid().ensure_same(other.grid())?;
        let mut out = self.clone();
        out.axpy(-1.0, other);
        Ok(out)
    }

    pub fn laplacian(&self) -> Self {
        self.map(SpectralScalar::laplacian, true)
    }

    pub fn dealias(&self) -> Self {
        self.map(SpectralScalar::dealias, true)
    }

    pub fn truncated(&self, cutoff: i64) -> Self {
        self.map(
            |c| {
                let mut c = c.clone();
                c.truncate(cutoff);
                c
            },
            true,
        )
    }

    pub fn divergence(&self) -> SpectralScalar {
        let mut d = self.x().derivative(0);
        d.axpy(1.0, &self.y().derivative(1));
        d
    }

    /// Per-mode `u(k) - k (k.u(k)) / |k|^2`.
    pub fn leray_project(&self) -> Self {
        let grid = self.grid().clone();
        let mut cx = self.x().coefficients().to_vec();
        let mut cy = self.y().coefficients().to_vec();
        for flat in 1..grid.len() {
            let (k1, k2) = grid.wavevector(flat);
            let (k1, k2) = (k1 as f64, k2 as f64);
            let kk = k1 * k1 + k2 * k2;
            let dot: Complex64 = (cx[flat] * k1 + cy[flat] * k2) / kk;
            cx[flat] -= dot * k1;
            cy[flat] -= dot * k2;
        }
        let x = SpectralScalar::from_coefficients(&grid, cx).expect("length preserved");
        let y = SpectralScalar::from_coefficients(&grid, cy).expect("length preserved");
        Self {
            components: [x, y],
            divergence_free: true,
        }
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.x().l2_norm_sq() + self.y().l2_norm_sq()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `||grad u||^2`, summed over components.
    pub fn h1_seminorm_sq(&self) -> f64 {
        self.x().h1_seminorm_sq() + self.y().h1_seminorm_sq()
    }

    pub fn h1_seminorm(&self) -> f64 {
        self.h1_seminorm_sq().sqrt()
    }

    /// `||Laplacian u||^2`, summed over components.
    pub fn h2_seminorm_sq(&self) -> f64 {
        self.x().h2_seminorm_sq() + self.y().h2_seminorm_sq()
    }

    pub fn h2_seminorm(&self) -> f64 {
        self.h2_seminorm_sq().sqrt()
    }

    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        Ok(self.x().inner_product(other.x())? + self.y().inner_product(other.y())?)
    }
}

/// Gradient of a scalar.
pub fn gradient(s: &SpectralScalar) -> SpectralVectorField {
    SpectralVectorField {
        components: [s.derivative(0), s.derivative(1)],
        divergence_free: false,
    }
}

/// Dealiased `(u . grad) v`, computed pseudo-spectrally in convective form.
///
/// Both inputs are dealiased before the products are formed, so the retained
/// modes of the result are free of aliasing error.
pub fn advect(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    u.grid().ensure_same(v.grid())?;
    let grid = u.grid().clone();
    let u = u.dealias();
    let v = v.dealias();
    let [ux, uy] = u.to_physical();
    let mut out = Vec::with_capacity(2);
    for c in 0..2 {
        let dx = v.component(c).derivative(0).to_physical();
        let dy = v.component(c).derivative(1).to_physical();
        let prod: Vec<f64> = (0..grid.len())
            .map(|p| ux[p] * dx[p] + uy[p] * dy[p])
            .collect();
        let (s, _) = SpectralScalar::from_physical(&grid, &prod)?;
        out.push(s.dealias());
    }
    let y = out.pop().expect("two components");
    let x = out.pop().expect("two components");
    SpectralVectorField::new(x, y)
}

/// Result of [`elsasser_advection`].
pub struct ElsasserAdvection {
    /// `(w . grad) v`
    pub w_grad_v: SpectralVectorField,
    /// `(v . grad) w`
    pub v_grad_w: SpectralVectorField,
    /// Pointwise maximum of `|v|` and `|w|` on the grid.
    pub max_speed: f64,
}

/// Both Elsässer nonlinearities from one set of products `v_i w_j`.
///
/// Uses the divergence form `(w . grad) v_i = d_j (w_j v_i)` and
/// `(v . grad) w_i = d_j (v_j w_i)`, which equals the convective form when
/// `v` and `w` are divergence-free. Inputs are dealiased first.
pub fn elsasser_advection(
    v: &SpectralVectorField,
    w: &SpectralVectorField,
) -> Result<ElsasserAdvection> {
    v.grid().ensure_same(w.grid())?;
    let grid = v.grid().clone();
    let [v1, v2] = v.dealias().to_physical();
    let [w1, w2] = w.dealias().to_physical();
    let mut max_speed = 0.0_f64;
    for p in 0..grid.len() {
        max_speed = max_speed
            .max((v1[p] * v1[p] + v2[p] * v2[p]).sqrt())
            .max((w1[p] * w1[p] + w2[p] * w2[p]).sqrt());
    }
    // products[i][j] = v_i w_j
    let vs = [&v1, &v2];
    let ws = [&w1, &w2];
    let mut products: Vec<SpectralScalar> = Vec::with_capacity(4);
    for vi in vs {
        for wj in ws {
            let prod: Vec<f64> = vi.iter().zip(wj.iter()).map(|(a, b)| a * b).collect();
            products.push(SpectralScalar::from_physical(&grid, &prod)?.0.dealias());
        }
    }
    let p = |i: usize, j: usize| &products[2 * i + j];
    // (w.grad) v_i = d_j (v_i w_j) = d_j P[i][j]
    let mut wv = Vec::with_capacity(2);
    let mut vw = Vec::with_capacity(2);
    for i in 0..2 {
        let mut a = p(i, 0).derivative(0);
        a.axpy(1.0, &p(i, 1).derivative(1));
        wv.push(a);
        // (v.grad) w_i = d_j (v_j w_i) = d_j P[j][i]
        let mut b = p(0, i).derivative(0);
        b.axpy(1.0, &p(1, i).derivative(1));
        vw.push(b);
    }
    let wv_y = wv.pop().expect("two");
    let wv_x = wv.pop().expect("two");
    let vw_y = vw.pop().expect("two");
    let vw_x = vw.pop().expect("two");
    Ok(ElsasserAdvection {
        w_grad_v: SpectralVectorField::new(wv_x, wv_y)?,
        v_grad_w: SpectralVectorField::new(vw_x, vw_y)?,
        max_speed,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::random::random_divfree_field;

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    #[test]
    fn gradient_of_sin_y() {
        let g = grid();
        let s = SpectralScalar::from_fn(&g, |_, y| (2.0 * PI * y).sin());
        let grad = gradient(&s);
        let expected_y = SpectralScalar::from_fn(&g, |_, y| 2.0 * PI * (2.0 * PI * y).cos());
        assert!(grad.x().l2_norm() < 1e-12);
        assert!(grad.y().sub(&expected_y).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn leray_annihilates_gradients() {
        let g = grid();
        let phi = SpectralScalar::from_fn(&g, |x, y| {
            (2.0 * PI * x).sin() * (4.0 * PI * y).cos() + 0.3 * (6.0 * PI * (x + y)).sin()
        });
        let p = gradient(&phi).leray_project();
        assert!(p.l2_norm() < 1e-12);
    }

    #[test]
    fn leray_single_mode_formula() {
        let g = grid();
        let mut x = SpectralScalar::zeros(&g);
        let mut y = SpectralScalar::zeros(&g);
        x.set_mode(1, 0, Complex64::new(1.0, 0.0));
        y.set_mode(1, 0, Complex64::new(1.0, 0.0));
        let p = SpectralVectorField::new(x, y).unwrap().leray_project();
        assert!(p.x().coeff(1, 0).norm() < 1e-15);
        assert!((p.y().coeff(1, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn leray_fixes_divergence_free_fields() {
        let g = grid();
        let u = random_divfree_field(&g, 7, 1.0, 8).unwrap();
        let p = u.leray_project();
        assert!(p.sub(&u).unwrap().l2_norm() < 1e-12 * u.l2_norm());
    }

    #[test]
    fn dealias_drops_high_modes() {
        let g = Grid::new(64).unwrap();
        let mut x = SpectralScalar::zeros(&g);
        x.set_mode(32, 0, Complex64::new(1.0, 0.0));
        x.set_mode(1, 1, Complex64::new(0.5, 0.5));
        let d = x.dealias();
        assert_eq!(d.coeff(32, 0), Complex64::default());
        assert_eq!(d.coeff(1, 1), Complex64::new(0.5, 0.5));
        assert_eq!(d.dealias(), d);
    }

    #[test]
    fn mark_divergence_free_rejects_gradients() {
        let g = grid();
        let phi = SpectralScalar::from_fn(&g, |x, _| (2.0 * PI * x).sin());
        assert!(matches!(
            gradient(&phi).mark_divergence_free(),
            Err(Error::NotDivergenceFree { .. })
        ));
    }

    #[test]
    fn fused_advection_matches_convective_form() {
        let g = grid();
        let v = random_divfree_field(&g, 1, 1.0, 6).unwrap();
        let w = random_divfree_field(&g, 2, 1.0, 6).unwrap();
        let fused = elsasser_advection(&v, &w).unwrap();
        let wv = advect(&w, &v).unwrap();
        let vw = advect(&v, &w).unwrap();
        let scale = v.l2_norm() * w.h1_seminorm();
        assert!(fused.w_grad_v.sub(&wv).unwrap().l2_norm() < 1e-12 * scale);
        assert!(fused.v_grad_w.sub(&vw).unwrap().l2_norm() < 1e-12 * scale);
    }

    #[test]
    fn advection_is_skew_for_divergence_free_transport() {
        let g = grid();
        let u = random_divfree_field(&g, 3, 0.5, 10).unwrap();
        let v = random_divfree_field(&g, 4, 0.5, 10).unwrap();
        let a = advect(&u, &v).unwrap();
        let ip = a.inner_product(&v.dealias()).unwrap();
        let scale = a.l2_norm() * v.l2_norm();
        assert!(ip.abs() <= 1e-10 * scale, "{ip} vs {scale}");
    }
}
