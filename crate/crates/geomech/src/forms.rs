//! Numerical exterior calculus on a coordinate chart.
//!
//! A k-form is stored as a coefficient function: at each chart point it
//! returns the coefficients over strictly increasing multi-indices in
//! lexicographic order.  Wedge and interior products are exact index
//! algebra; the exterior derivative, pullbacks and Lie derivatives use
//! central differences with per-coordinate step scaling.

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormsError {
    #[error("degree {degree} exceeds chart dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("interior product requires degree >= 1")]
    InteriorOfScalar,
    #[error("chart dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// Default finite-difference step; each coordinate uses `h * (1 + |x_i|)`.
pub const DEFAULT_STEP: f64 = 1e-5;

pub type CoeffFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Vector field on a chart: point -> components.
#[derive(Clone)]
pub struct VectorField {
    pub dim: usize,
    f: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl VectorField {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { dim, f: Arc::new(f) }
    }

    /// Constant field with the given components.
    pub fn constant(components: Vec<f64>) -> Self {
        let dim = components.len();
        Self::new(dim, move |_| components.clone())
    }

    /// The coordinate basis field `∂/∂x_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Self::constant(c)
    }

    pub fn at(&self, p: &[f64]) -> Vec<f64> {
        (self.f)(p)
    }
}

/// Differentiable map between charts, used for pullbacks.
#[derive(Clone)]
pub struct ChartMap {
    pub src_dim: usize,
    pub dst_dim: usize,
    f: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl ChartMap {
    pub fn new(
        src_dim: usize,
        dst_dim: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { src_dim, dst_dim, f: Arc::new(f) }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, dim, |p: &[f64]| p.to_vec())
    }

    pub fn at(&self, p: &[f64]) -> Vec<f64> {
        (self.f)(p)
    }

    /// Jacobian columns by central differences with magnitude-scaled steps.
    pub fn jacobian_columns(&self, p: &[f64], h: f64) -> Vec<Vec<f64>> {
        self.jacobian_impl(p, h, true)
    }

    /// Jacobian columns with the raw step `h` in every direction; used when
    /// evaluation points must stay on a fixed grid.
    pub fn jacobian_columns_raw(&self, p: &[f64], h: f64) -> Vec<Vec<f64>> {
        self.jacobian_impl(p, h, false)
    }

    fn jacobian_impl(&self, p: &[f64], h: f64, scaled: bool) -> Vec<Vec<f64>> {
        let mut cols = Vec::with_capacity(self.src_dim);
        for j in 0..self.src_dim {
            let hj = if scaled { scaled_step(h, p[j]) } else { h };
            let mut plus = p.to_vec();
            plus[j] += hj;
            let mut minus = p.to_vec();
            minus[j] -= hj;
            let fp = self.at(&plus);
            let fm = self.at(&minus);
            cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * hj)).collect());
        }
        cols
    }
}

pub fn scaled_step(h: f64, coordinate: f64) -> f64 {
    h * (1.0 + coordinate.abs())
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: usize = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Strictly increasing multi-indices of length `k` over `0..d`, in
/// lexicographic order.
pub fn multi_indices(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let remaining = k - current.len();
        for i in start..=(d - remaining) {
            current.push(i);
            rec(d, k, i + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(d, k));
    if k == 0 {
        out.push(Vec::new());
    } else if k <= d {
        let mut current = Vec::with_capacity(k);
        rec(d, k, 0, &mut current, &mut out);
    }
    out
}

/// Lexicographic rank of a strictly increasing multi-index.
pub fn multi_index_rank(idx: &[usize], d: usize) -> usize {
    let k = idx.len();
    let mut rank = 0usize;
    let mut prev = 0usize;
    for (pos, &i) in idx.iter().enumerate() {
        for j in prev..i {
            rank += binomial(d - 1 - j, k - 1 - pos);
        }
        prev = i + 1;
    }
    rank
}

/// Sorts a list of distinct indices, returning the sorted list and the
/// permutation sign; `None` if an index repeats.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = indices.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// A k-form on a d-dimensional chart, represented by a coefficient
/// function over increasing multi-indices.
#[derive(Clone)]
pub struct FormField {
    dim: usize,
    degree: usize,
    coeff: CoeffFn,
}

impl FormField {
    pub fn new(
        dim: usize,
        degree: usize,
        coeff: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, degree, coeff: Arc::new(coeff) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff_fn(&self) -> CoeffFn {
        self.coeff.clone()
    }

    pub fn coefficients(&self, p: &[f64]) -> Vec<f64> {
        (self.coeff)(p)
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        let len = binomial(dim, degree);
        Self::new(dim, degree, move |_| vec![0.0; len])
    }

    pub fn constant(dim: usize, degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), binomial(dim, degree));
        Self::new(dim, degree, move |_| coeffs.clone())
    }

    /// 0-form from a scalar function.
    pub fn scalar(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(dim, 0, move |p| vec![f(p)])
    }

    /// The constant basis 1-form `dx^i`.
    pub fn dx(dim: usize, i: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Self::constant(dim, 1, c)
    }

    /// The volume form `dx^0 ∧ … ∧ dx^(d-1)`.
    pub fn volume(dim: usize) -> Self {
        Self::constant(dim, dim, vec![1.0])
    }

    /// Evaluates the form on `degree` vectors at a point.
    pub fn evaluate(&self, p: &[f64], vectors: &[&[f64]]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let coeffs = self.coefficients(p);
        if self.degree == 0 {
            return coeffs[0];
        }
        let indices = multi_indices(self.dim, self.degree);
        let k = self.degree;
        let mut total = 0.0;
        let mut minor = vec![0.0; k * k];
        for (rank, idx) in indices.iter().enumerate() {
            let c = coeffs[rank];
            if c == 0.0 {
                continue;
            }
            for (row, &i) in idx.iter().enumerate() {
                for (col, v) in vectors.iter().enumerate() {
                    minor[row * k + col] = v[i];
                }
            }
            total += c * det_small(&minor, k);
        }
        total
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.degree, other.degree);
        let a = self.coeff.clone();
        let b = other.coeff.clone();
        Self::new(self.dim, self.degree, move |p| {
            let mut out = a(p);
            for (o, x) in out.iter_mut().zip(b(p)) {
                *o += x;
            }
            out
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let a = self.coeff.clone();
        Self::new(self.dim, self.degree, move |p| a(p).into_iter().map(|c| c * s).collect())
    }

    /// Multiplies by a point-dependent scalar.
    pub fn scale_fn(&self, s: ScalarFn) -> Self {
        let a = self.coeff.clone();
        Self::new(self.dim, self.degree, move |p| {
            let f = s(p);
            a(p).into_iter().map(|c| c * f).collect()
        })
    }
}

fn det_small(m: &[f64], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            // LU with partial pivoting
            let mut a = m.to_vec();
            let mut det = 1.0;
            for col in 0..k {
                let mut pivot = col;
                for row in (col + 1)..k {
                    if a[row * k + col].abs() > a[pivot * k + col].abs() {
                        pivot = row;
                    }
                }
                if a[pivot * k + col] == 0.0 {
                    return 0.0;
                }
                if pivot != col {
                    for j in 0..k {
                        a.swap(col * k + j, pivot * k + j);
                    }
                    det = -det;
                }
                det *= a[col * k + col];
                for row in (col + 1)..k {
                    let factor = a[row * k + col] / a[col * k + col];
                    for j in col..k {
                        a[row * k + j] -= factor * a[col * k + j];
                    }
                }
            }
            det
        }
    }
}

/// Wedge product by antisymmetrized shuffle sum.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField, FormsError> {
    if a.dim != b.dim {
        return Err(FormsError::DimensionMismatch(a.dim, b.dim));
    }
    let d = a.dim;
    let (ka, kb) = (a.degree, b.degree);
    let k = ka + kb;
    if k > d {
        return Err(FormsError::DegreeOverflow { degree: k, dim: d });
    }
    // For each output index K, the list of (rank_I, rank_J, sign) splits.
    let out_indices = multi_indices(d, k);
    let mut table: Vec<Vec<(usize, usize, f64)>> = Vec::with_capacity(out_indices.len());
    for idx in &out_indices {
        let mut splits = Vec::new();
        for selector in multi_indices(k, ka) {
            let i_part: Vec<usize> = selector.iter().map(|&s| idx[s]).collect();
            let mut taken = vec![false; k];
            for &s in &selector {
                taken[s] = true;
            }
            let j_part: Vec<usize> = (0..k).filter(|&s| !taken[s]).map(|s| idx[s]).collect();
            // Sign of the block permutation (I, J) relative to sorted K.
            let mut inversions = 0usize;
            for &i in &i_part {
                for &j in &j_part {
                    if j < i {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
            splits.push((multi_index_rank(&i_part, d), multi_index_rank(&j_part, d), sign));
        }
        table.push(splits);
    }
    let ca = a.coeff.clone();
    let cb = b.coeff.clone();
    Ok(FormField::new(d, k, move |p| {
        let va = ca(p);
        let vb = cb(p);
        table
            .iter()
            .map(|splits| splits.iter().map(|&(ri, rj, s)| s * va[ri] * vb[rj]).sum::<f64>())
            .collect()
    }))
}

/// Interior product `X ⌟ a`.
pub fn interior(x: &VectorField, a: &FormField) -> Result<FormField, FormsError> {
    if a.degree == 0 {
        return Err(FormsError::InteriorOfScalar);
    }
    if x.dim != a.dim {
        return Err(FormsError::DimensionMismatch(x.dim, a.dim));
    }
    let d = a.dim;
    let k = a.degree;
    let in_indices = multi_indices(d, k);
    // (target rank, source rank, position sign, contracted slot)
    let mut table: Vec<(usize, usize, f64, usize)> = Vec::new();
    for (rank, idx) in in_indices.iter().enumerate() {
        for (pos, &slot) in idx.iter().enumerate() {
            let reduced: Vec<usize> =
                idx.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &v)| v).collect();
            let sign = if pos.is_multiple_of(2) { 1.0 } else { -1.0 };
            table.push((multi_index_rank(&reduced, d), rank, sign, slot));
        }
    }
    let out_len = binomial(d, k - 1);
    let ca = a.coeff.clone();
    let xf = x.clone();
    Ok(FormField::new(d, k - 1, move |p| {
        let va = ca(p);
        let xv = xf.at(p);
        let mut out = vec![0.0; out_len];
        for &(target, source, sign, slot) in &table {
            out[target] += sign * xv[slot] * va[source];
        }
        out
    }))
}

/// Exterior derivative by central differences of the coefficients.
pub fn ext_deriv(a: &FormField, h: f64) -> Result<FormField, FormsError> {
    let d = a.dim;
    let k = a.degree;
    if k + 1 > d {
        return Err(FormsError::DegreeOverflow { degree: k + 1, dim: d });
    }
    let out_indices = multi_indices(d, k + 1);
    // (out rank, derivative direction, source rank, sign)
    let mut table: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (rank, idx) in out_indices.iter().enumerate() {
        for (pos, &dir) in idx.iter().enumerate() {
            let reduced: Vec<usize> =
                idx.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &v)| v).collect();
            let sign = if pos.is_multiple_of(2) { 1.0 } else { -1.0 };
            table.push((rank, dir, multi_index_rank(&reduced, d), sign));
        }
    }
    let out_len = out_indices.len();
    let ca = a.coeff.clone();
    Ok(FormField::new(d, k + 1, move |p| {
        // Partials of the full coefficient vector in every direction.
        let mut partials: Vec<Vec<f64>> = Vec::with_capacity(d);
        for j in 0..d {
            let hj = scaled_step(h, p[j]);
            let mut plus = p.to_vec();
            plus[j] += hj;
            let mut minus = p.to_vec();
            minus[j] -= hj;
            let cp = ca(&plus);
            let cm = ca(&minus);
            partials.push(cp.iter().zip(&cm).map(|(x, y)| (x - y) / (2.0 * hj)).collect());
        }
        let mut out = vec![0.0; out_len];
        for &(rank, dir, source, sign) in &table {
            out[rank] += sign * partials[dir][source];
        }
        out
    }))
}

/// Pullback `phi* a` along a chart map, with the differential of `phi`
/// taken by central differences.
pub fn pullback(phi: &ChartMap, a: &FormField, h: f64) -> Result<FormField, FormsError> {
    if phi.dst_dim != a.dim {
        return Err(FormsError::DimensionMismatch(phi.dst_dim, a.dim));
    }
    let k = a.degree;
    let src = phi.src_dim;
    if k > src {
        return Err(FormsError::DegreeOverflow { degree: k, dim: src });
    }
    let indices = multi_indices(src, k);
    let phi = phi.clone();
    let a = a.clone();
    Ok(FormField::new(src, k, move |p| {
        let q = phi.at(p);
        if k == 0 {
            return a.coefficients(&q);
        }
        let jac = phi.jacobian_columns(p, h);
        indices
            .iter()
            .map(|idx| {
                let cols: Vec<&[f64]> = idx.iter().map(|&i| jac[i].as_slice()).collect();
                a.evaluate(&q, &cols)
            })
            .collect()
    }))
}

/// Lie derivative via the Cartan formula `L_Z a = Z ⌟ da + d(Z ⌟ a)`.
pub fn lie_derivative(z: &VectorField, a: &FormField, h: f64) -> Result<FormField, FormsError> {
    if a.degree == 0 {
        return interior(z, &ext_deriv(a, h)?);
    }
    if a.degree == a.dim {
        return ext_deriv(&interior(z, a)?, h);
    }
    let first = interior(z, &ext_deriv(a, h)?)?;
    let second = ext_deriv(&interior(z, a)?, h)?;
    Ok(first.add(&second))
}

/// The n-form family `dⁿx_μ = ∂_μ ⌟ ω` on a d-dimensional base chart.
pub fn dnx(dim: usize, mu: usize) -> FormField {
    interior(&VectorField::basis(dim, mu), &FormField::volume(dim)).expect("volume degree >= 1")
}

/// The (n-1)-form family `dⁿ⁻¹x_μν = ∂_ν ⌟ dⁿx_μ`; zero when `μ == ν` and
/// absent (zero) on a one-dimensional base.
pub fn dnx2(dim: usize, mu: usize, nu: usize) -> FormField {
    if dim < 2 {
        return FormField::zero(dim, 0);
    }
    interior(&VectorField::basis(dim, nu), &dnx(dim, mu)).expect("dnx degree >= 1")
}

/// Lie-algebra-valued form: one scalar component per algebra basis element.
#[derive(Clone)]
pub struct AlgebraValuedForm {
    pub degree: usize,
    pub components: Vec<FormField>,
}

impl AlgebraValuedForm {
    pub fn new(components: Vec<FormField>) -> Self {
        let degree = components.first().map(|c| c.degree()).unwrap_or(0);
        Self { degree, components }
    }

    pub fn algebra_dim(&self) -> usize {
        self.components.len()
    }

    pub fn chart_dim(&self) -> usize {
        self.components[0].dim()
    }

    /// Evaluates all components on the given argument vectors.
    pub fn evaluate(&self, p: &[f64], vectors: &[&[f64]]) -> Vec<f64> {
        self.components.iter().map(|c| c.evaluate(p, vectors)).collect()
    }
}

pub type AlgebraBracket = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Pointwise bracket of g-valued 1-forms: `[α, β](X, Y) = [α(X), β(Y)]`.
///
/// This is the convention under which the Maurer-Cartan equation reads
/// `dλ + [λ, λ] = 0`; see [`g_bracket_wedge`] for the symmetrized variant.
pub fn g_bracket_pointwise(
    a: &AlgebraValuedForm,
    b: &AlgebraValuedForm,
    bracket: AlgebraBracket,
) -> AlgebraValuedForm {
    assert_eq!(a.degree, 1);
    assert_eq!(b.degree, 1);
    let d = a.chart_dim();
    let n = a.algebra_dim();
    let pair_indices = multi_indices(d, 2);
    let a_coeffs: Vec<CoeffFn> = a.components.iter().map(|c| c.coeff_fn()).collect();
    let b_coeffs: Vec<CoeffFn> = b.components.iter().map(|c| c.coeff_fn()).collect();
    let mut components = Vec::with_capacity(n);
    for comp in 0..n {
        let a_coeffs = a_coeffs.clone();
        let b_coeffs = b_coeffs.clone();
        let bracket = bracket.clone();
        let pair_indices = pair_indices.clone();
        components.push(FormField::new(d, 2, move |p| {
            let av: Vec<Vec<f64>> = a_coeffs.iter().map(|c| c(p)).collect();
            let bv: Vec<Vec<f64>> = b_coeffs.iter().map(|c| c(p)).collect();
            let alg = av.len();
            let a_slot = |i: usize| -> Vec<f64> { (0..alg).map(|q| av[q][i]).collect() };
            let b_slot = |i: usize| -> Vec<f64> { (0..alg).map(|q| bv[q][i]).collect() };
            pair_indices
                .iter()
                .map(|idx| bracket(&a_slot(idx[0]), &b_slot(idx[1]))[comp])
                .collect()
        }));
    }
    AlgebraValuedForm::new(components)
}

/// Symmetrized bracket `[α ∧ β](X, Y) = [α(X), β(Y)] - [α(Y), β(X)]`,
/// i.e. `α^i ∧ β^j ⊗ [e_i, e_j]`; satisfies `[α ∧ α] = 2 [α, α]`.
pub fn g_bracket_wedge(
    a: &AlgebraValuedForm,
    b: &AlgebraValuedForm,
    bracket: AlgebraBracket,
) -> AlgebraValuedForm {
    let first = g_bracket_pointwise(a, b, bracket.clone());
    let second = g_bracket_pointwise(b, a, bracket);
    let components = first
        .components
        .iter()
        .zip(&second.components)
        .map(|(x, y)| x.add(y))
        .collect();
    AlgebraValuedForm::new(components)
}
