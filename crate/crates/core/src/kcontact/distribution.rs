//! Distributions, maximal non-integrability, and construction of k-contact
//! forms from a distribution plus commuting symmetries.

use std::sync::Arc;

use crate::chart::Chart;
use crate::error::KContactError;
use crate::exterior::{ext_deriv, lie_bracket, VecValuedOneForm, VectorField};
use crate::expr::Expr;
use crate::linalg::ExprMatrix;
use crate::rng::SampleRng;

use super::{verify_kcontact, KContact};

/// A distribution given by a spanning set of vector fields, with its generic
/// rank and a chosen independent sub-basis cached.
#[derive(Debug, Clone)]
pub struct Distribution {
    chart: Arc<Chart>,
    spanning: Vec<VectorField>,
    basis: Vec<usize>,
    rank: usize,
    seed: u64,
}

fn field_matrix(chart: &Arc<Chart>, fields: &[&VectorField]) -> ExprMatrix {
    let mut m = ExprMatrix::new(chart.clone(), fields.len(), chart.dim());
    for (r, f) in fields.iter().enumerate() {
        for (c, e) in f.coeffs().iter().enumerate() {
            m.set(r, c, e.clone());
        }
    }
    m
}

impl Distribution {
    pub fn new(
        chart: Arc<Chart>,
        spanning: Vec<VectorField>,
        rng: &SampleRng,
    ) -> Result<Distribution, KContactError> {
        if spanning.is_empty() {
            return Err(KContactError::NoAnnihilator("empty spanning set".into()));
        }
        // Greedy independent subset by symbolic rank.
        let mut basis: Vec<usize> = Vec::new();
        let mut rank = 0usize;
        for (i, _) in spanning.iter().enumerate() {
            let mut subset: Vec<&VectorField> = basis.iter().map(|&j| &spanning[j]).collect();
            subset.push(&spanning[i]);
            let r = field_matrix(&chart, &subset).rank()?.rank;
            if r > rank {
                rank = r;
                basis.push(i);
            }
        }
        Ok(Distribution { chart, spanning, basis, rank, seed: rng.seed() })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spanning(&self) -> &[VectorField] {
        &self.spanning
    }

    /// The chosen independent sub-basis.
    pub fn basis_fields(&self) -> Vec<&VectorField> {
        self.basis.iter().map(|&i| &self.spanning[i]).collect()
    }

    /// Whether a field takes values in the distribution at the generic point.
    pub fn contains(&self, field: &VectorField) -> Result<bool, KContactError> {
        if field.is_zero() {
            return Ok(true);
        }
        let mut fields = self.basis_fields();
        fields.push(field);
        let r = field_matrix(&self.chart, &fields).rank()?.rank;
        Ok(r == self.rank)
    }

    /// Whether `s` is a Lie symmetry of the distribution: `[s, D] c D`.
    pub fn is_symmetry(&self, s: &VectorField) -> Result<bool, KContactError> {
        for y in self.basis_fields() {
            if !self.contains(&lie_bracket(s, y)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Completes the basis to a full frame with coordinate fields and returns
    /// the annihilating R^(dim-rank)-valued one-form (the dual rows of the
    /// completion slots).
    pub fn annihilator(&self) -> Result<VecValuedOneForm, KContactError> {
        let dim = self.chart.dim();
        let corank = dim - self.rank;
        if corank == 0 {
            return Err(KContactError::NoAnnihilator("distribution spans the tangent space".into()));
        }
        let mut frame: Vec<VectorField> = self.basis_fields().into_iter().cloned().collect();
        let mut rank = self.rank;
        for i in 0..dim {
            if rank == dim {
                break;
            }
            let cand = VectorField::coordinate(&self.chart, i);
            let mut subset: Vec<&VectorField> = frame.iter().collect();
            subset.push(&cand);
            if field_matrix(&self.chart, &subset).rank()?.rank > rank {
                frame.push(cand);
                rank += 1;
            }
        }
        if rank < dim {
            return Err(KContactError::NoAnnihilator("cannot complete to a frame".into()));
        }
        let coframe = frame_dual_rows(&self.chart, &frame)?;
        let comps = coframe[self.rank..].to_vec();
        VecValuedOneForm::new(self.chart.clone(), comps).map_err(KContactError::Calc)
    }
}

/// Dual coframe rows of a full frame, as one-forms.
pub(crate) fn frame_dual_rows(
    chart: &Arc<Chart>,
    frame: &[VectorField],
) -> Result<Vec<crate::exterior::DiffForm>, KContactError> {
    let dim = chart.dim();
    assert_eq!(frame.len(), dim, "dual coframe needs a full frame");
    let refs: Vec<&VectorField> = frame.iter().collect();
    let m = field_matrix(chart, &refs);
    let inv = m
        .inverse()?
        .ok_or_else(|| KContactError::SpanFailure("frame matrix is singular".into()))?;
    let mut out = Vec::with_capacity(dim);
    for i in 0..dim {
        // Upsilon^i = sum_m (M^{-1})[m][i] dx^m satisfies Upsilon^i(Y_j) = delta.
        let terms: Vec<(Vec<usize>, Expr)> = (0..dim).map(|m_| (vec![m_], inv.at(m_, i).clone())).collect();
        out.push(
            crate::exterior::DiffForm::from_terms(chart, 1, terms).map_err(KContactError::Calc)?,
        );
    }
    Ok(out)
}

/// Maximal non-integrability of a distribution in the curvature sense.
///
/// With an annihilator `zeta` (supplied or computed by coframe completion),
/// the curvature pairing on a basis `Y_i` of the distribution is
/// `rho(Y_i, Y_j) = zeta([Y_i, Y_j])`, and the distribution is maximally
/// non-integrable iff the stacked matrix has generic rank equal to the
/// distribution's rank. Each entry is cross-checked against the identity
/// `rho(v, v') = -d zeta(v, v')`.
pub fn max_nonintegrable(
    dist: &Distribution,
    zeta: Option<&VecValuedOneForm>,
) -> Result<bool, KContactError> {
    let r = dist.rank();
    if r == 0 || r == dist.chart().dim() {
        // The zero distribution is excluded by definition; a full-tangent
        // distribution is integrable.
        return Ok(false);
    }
    let owned;
    let zeta = match zeta {
        Some(z) => z,
        None => {
            owned = dist.annihilator()?;
            &owned
        }
    };
    let basis = dist.basis_fields();
    let chart = dist.chart().clone();
    let kprime = zeta.k();
    let dzeta: Vec<_> = zeta.components().iter().map(ext_deriv).collect();
    let mut rows: Vec<Vec<Expr>> = Vec::with_capacity(kprime * r);
    for gamma in 0..kprime {
        for j in 0..r {
            let mut row = Vec::with_capacity(r);
            for (i, yi) in basis.iter().enumerate() {
                let bracket = lie_bracket(yi, basis[j])?;
                let val = crate::exterior::interior(&bracket, zeta.component(gamma))?.coeff(&[]);
                // Cross-check: rho(v, v') = -d zeta(v, v').
                let alt = dzeta[gamma].apply(&[yi, basis[j]])?.neg();
                if val != alt {
                    return Err(KContactError::Internal(
                        "curvature pairing disagrees with -d zeta".into(),
                    ));
                }
                let _ = i;
                row.push(val);
            }
            rows.push(row);
        }
    }
    let m = ExprMatrix::from_rows(chart, rows);
    Ok(m.rank()?.rank == r)
}

/// Builds the unique k-contact form annihilating `dist` whose components are
/// dual to the commuting symmetries `syms`, then verifies it.
///
/// Preconditions checked: the symmetries commute pairwise and preserve the
/// distribution, symmetries plus distribution span the tangent space, and
/// the distribution is maximally non-integrable.
pub fn build_kcontact(
    dist: &Distribution,
    syms: &[VectorField],
) -> Result<(VecValuedOneForm, KContact), KContactError> {
    let chart = dist.chart().clone();
    let dim = chart.dim();
    let k = syms.len();
    if dist.rank() + k != dim {
        return Err(KContactError::SpanFailure(format!(
            "rank {} + {} symmetries != dim {}",
            dist.rank(),
            k,
            dim
        )));
    }
    for (i, si) in syms.iter().enumerate() {
        for sj in syms.iter().skip(i + 1) {
            if !lie_bracket(si, sj)?.is_zero() {
                return Err(KContactError::SymmetryFailure("symmetries do not commute".into()));
            }
        }
        if !dist.is_symmetry(si)? {
            return Err(KContactError::SymmetryFailure(format!(
                "symmetry #{i} does not preserve the distribution"
            )));
        }
    }
    let mut frame: Vec<VectorField> = dist.basis_fields().into_iter().cloned().collect();
    frame.extend(syms.iter().cloned());
    let frame_refs: Vec<&VectorField> = frame.iter().collect();
    if field_matrix(&chart, &frame_refs).rank()?.rank != dim {
        return Err(KContactError::SpanFailure(
            "distribution plus symmetries do not span the tangent space".into(),
        ));
    }
    if !max_nonintegrable(dist, None)? {
        return Err(KContactError::NotMaxNonintegrable);
    }
    let coframe = frame_dual_rows(&chart, &frame)?;
    let comps = coframe[dist.rank()..].to_vec();
    let eta = VecValuedOneForm::new(chart, comps).map_err(KContactError::Calc)?;
    let report = verify_kcontact(&eta)?;
    if !report.is_kcontact {
        return Err(KContactError::Internal(format!(
            "constructed form failed verification: {:?}",
            report.failure_reason
        )));
    }
    let kc = KContact::new(eta.clone())?;
    Ok((eta, kc))
}
