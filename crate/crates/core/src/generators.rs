//! Superoperators of the adjoint multi-time master equation.
//!
//! Slot tensors are vectors of length `d^(2m)` laid out as
//! `vec(B1) ⊗ vec(B2) ⊗ ... ⊗ vec(Bm)` with slot 0 outermost. Slot indices in
//! this module are 0-based and follow the left-to-right operator order inside
//! the correlator.

use crate::decomposition::{Channel, JumpDecomposition};
use crate::error::{Error, Result};
use crate::operator::{
    self, c64, dagger, identity, kron, left_multiplication, right_multiplication, sandwich,
    Operator, Vector, I, ONE, ZERO,
};

/// Default dense budget: largest admissible number of rows `d^(2n)`.
pub const DEFAULT_SLOT_BUDGET: usize = 4096;

/// Largest slot-tensor length handled by the matrix-free generator.
pub const MATRIX_FREE_CAP: usize = 1 << 22;

/// Anything that can act linearly on a coordinate vector.
pub trait LinearOperator {
    fn size(&self) -> usize;
    /// `out ← self · v`.
    fn apply_into(&self, v: &Vector, out: &mut Vector);
    /// Upper bound on the spectral norm.
    fn norm_bound(&self) -> f64;

    fn apply_vector(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.size());
        self.apply_into(v, &mut out);
        out
    }
}

impl LinearOperator for Operator {
    fn size(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, v: &Vector, out: &mut Vector) {
        out.gemv(ONE, self, v, ZERO);
    }

    fn norm_bound(&self) -> f64 {
        spectral_norm_bound(self)
    }
}

/// `sqrt(‖A‖₁ ‖A‖∞)`, which bounds the spectral norm from above.
pub(crate) fn spectral_norm_bound(a: &Operator) -> f64 {
    let mut rows = vec![0.0; a.nrows()];
    let mut max_col = 0.0_f64;
    for col in a.column_iter() {
        let mut sum = 0.0;
        for (i, x) in col.iter().enumerate() {
            let m = x.norm();
            sum += m;
            rows[i] += m;
        }
        max_col = max_col.max(sum);
    }
    let max_row = rows.into_iter().fold(0.0, f64::max);
    (max_col * max_row).sqrt()
}

/// Number of coordinates of an `m`-slot tensor over a `d`-level system, if it fits in `usize`.
pub fn slot_space_size(dim: usize, slots: usize) -> Option<usize> {
    let d2 = dim.checked_mul(dim)?;
    (0..slots).try_fold(1usize, |acc, _| acc.checked_mul(d2))
}

fn budget_error(dim: usize, slots: usize, budget: usize) -> Error {
    Error::SlotBudget {
        slots,
        dim,
        required: slot_space_size(dim, slots).unwrap_or(usize::MAX),
        budget,
        depth: None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    slots: usize,
    matrix: Operator,
}

impl SuperOperator {
    pub fn new(dim: usize, slots: usize, matrix: Operator) -> Result<Self> {
        let size = slot_space_size(dim, slots)
            .ok_or_else(|| Error::InvalidArgument("superoperator size overflows".into()))?;
        if slots == 0 || dim == 0 {
            return Err(Error::InvalidArgument(
                "superoperators need at least one slot of positive dimension".into(),
            ));
        }
        if matrix.nrows() != size || matrix.ncols() != size {
            return Err(Error::DimensionMismatch {
                context: "superoperator matrix",
                left: matrix.nrows().max(matrix.ncols()),
                right: size,
            });
        }
        Ok(SuperOperator { dim, slots, matrix })
    }

    pub fn identity(dim: usize, slots: usize) -> Result<Self> {
        let size = slot_space_size(dim, slots)
            .ok_or_else(|| Error::InvalidArgument("superoperator size overflows".into()))?;
        Self::new(dim, slots, identity(size))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_matrix(self) -> Operator {
        self.matrix
    }

    pub fn apply(&self, tensor: &SlotTensor) -> Result<SlotTensor> {
        if tensor.dim != self.dim || tensor.slots != self.slots {
            return Err(Error::DimensionMismatch {
                context: "superoperator application",
                left: self.matrix.nrows(),
                right: tensor.coords.len(),
            });
        }
        Ok(SlotTensor {
            dim: self.dim,
            slots: self.slots,
            coords: &self.matrix * &tensor.coords,
        })
    }

    /// Single-slot action on an operator: `unvec(S · vec(B))`.
    pub fn apply_operator(&self, b: &Operator) -> Result<Operator> {
        if self.slots != 1 {
            return Err(Error::InvalidArgument(format!(
                "apply_operator needs a one-slot superoperator, got {} slots",
                self.slots
            )));
        }
        let t = self.apply(&SlotTensor::elementary(std::slice::from_ref(b))?)?;
        operator::unvec(&t.coords)
    }
}

impl LinearOperator for SuperOperator {
    fn size(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, v: &Vector, out: &mut Vector) {
        LinearOperator::apply_into(&self.matrix, v, out);
    }

    fn norm_bound(&self) -> f64 {
        spectral_norm_bound(&self.matrix)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotTensor {
    dim: usize,
    slots: usize,
    coords: Vector,
}

impl SlotTensor {
    /// `vec(B1) ⊗ ... ⊗ vec(Bm)`.
    pub fn elementary(ops: &[Operator]) -> Result<Self> {
        let first = ops.first().ok_or_else(|| {
            Error::InvalidArgument("an elementary slot tensor needs at least one operator".into())
        })?;
        operator::check_square(first, "slot operator")?;
        let mut coords = Vector::from_element(1, ONE);
        for op in ops {
            operator::check_same_dim(first, op, "slot operator")?;
            coords = coords.kronecker(&operator::vec(op));
        }
        Ok(SlotTensor {
            dim: first.nrows(),
            slots: ops.len(),
            coords,
        })
    }

    pub fn identity(dim: usize, slots: usize) -> Result<Self> {
        Self::elementary(&vec![identity(dim); slots])
    }

    pub fn from_coords(dim: usize, slots: usize, coords: Vector) -> Result<Self> {
        let size = slot_space_size(dim, slots)
            .ok_or_else(|| Error::InvalidArgument("slot tensor size overflows".into()))?;
        if coords.len() != size {
            return Err(Error::DimensionMismatch {
                context: "slot tensor coordinates",
                left: coords.len(),
                right: size,
            });
        }
        Ok(SlotTensor { dim, slots, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn into_coords(self) -> Vector {
        self.coords
    }

    /// New tensor with `op` occupying slot `position`; later slots shift right.
    pub fn insert_slot(&self, position: usize, op: &Operator) -> Result<SlotTensor> {
        if position > self.slots {
            return Err(Error::InvalidArgument(format!(
                "slot position {position} out of range for {} slots",
                self.slots
            )));
        }
        if op.nrows() != self.dim || op.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "inserted slot operator",
                left: op.nrows(),
                right: self.dim,
            });
        }
        let d2 = self.dim * self.dim;
        let inner = d2.pow((self.slots - position) as u32);
        let outer = self.coords.len() / inner;
        let v = operator::vec(op);
        let mut coords = Vector::zeros(self.coords.len() * d2);
        for x in 0..outer {
            for (k, vk) in v.iter().enumerate() {
                let dst = (x * d2 + k) * inner;
                let src = x * inner;
                for z in 0..inner {
                    coords[dst + z] = self.coords[src + z] * vk;
                }
            }
        }
        Ok(SlotTensor {
            dim: self.dim,
            slots: self.slots + 1,
            coords,
        })
    }

    /// The linear functional fixed by
    /// `elementary(X1..Xm) ↦ trace(A1·X1·A2·X2···Am·Xm·A_{m+1}·ρ)`.
    pub fn contract(&self, inserts: &[Operator], rho: &Operator) -> Result<c64> {
        if inserts.len() != self.slots + 1 {
            return Err(Error::DimensionMismatch {
                context: "contraction insertion count",
                left: inserts.len(),
                right: self.slots + 1,
            });
        }
        for a in inserts.iter().chain(std::iter::once(rho)) {
            if a.nrows() != self.dim || a.ncols() != self.dim {
                return Err(Error::DimensionMismatch {
                    context: "contraction operator",
                    left: a.nrows(),
                    right: self.dim,
                });
            }
        }
        Ok(contract_coords(
            self.dim,
            self.slots,
            &self.coords,
            inserts,
            rho,
        ))
    }
}

/// Contraction on raw coordinates; shapes are assumed checked.
pub(crate) fn contract_coords(
    d: usize,
    m: usize,
    coords: &Vector,
    inserts: &[Operator],
    rho: &Operator,
) -> c64 {
    // wrap-around weight P = A_{m+1} ρ A_1
    let p = &inserts[m] * rho * &inserts[0];
    let d2 = d * d;
    let mut digits = vec![0usize; m];
    let mut total = ZERO;
    for (idx, &t) in coords.iter().enumerate() {
        if t != ZERO {
            let mut rest = idx;
            for s in (0..m).rev() {
                digits[s] = rest % d2;
                rest /= d2;
            }
            // vec index k ↔ matrix unit E(k mod d, k div d)
            let (i1, jm) = (digits[0] % d, digits[m - 1] / d);
            let mut w = p[(jm, i1)];
            for s in 0..m - 1 {
                w *= inserts[s + 1][(digits[s] / d, digits[s + 1] % d)];
            }
            total += t * w;
        }
    }
    total
}

/// `[P, ·]` as a one-slot matrix.
pub fn left_commutator(p: &Operator) -> Operator {
    left_multiplication(p) - right_multiplication(p)
}

/// `[·, Q]` as a one-slot matrix.
pub fn right_commutator(q: &Operator) -> Operator {
    right_multiplication(q) - left_multiplication(q)
}

/// `L_C[B] = C†BC − ½{C†C, B}`.
pub fn adjoint_dissipator(c: &Operator) -> Result<SuperOperator> {
    operator::check_square(c, "adjoint_dissipator")?;
    SuperOperator::new(c.nrows(), 1, dissipator_matrix(c))
}

fn dissipator_matrix(c: &Operator) -> Operator {
    let cd = dagger(c);
    let cdc = &cd * c;
    let half = c64::new(0.5, 0.0);
    sandwich(&cd, c) - (left_multiplication(&cdc) + right_multiplication(&cdc)) * half
}

pub(crate) fn collect_channels(dim: usize, decomps: &[JumpDecomposition]) -> Result<Vec<Channel>> {
    let mut channels = Vec::new();
    for d in decomps {
        if d.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "jump decomposition",
                left: d.dim(),
                right: dim,
            });
        }
        channels.extend(d.channels()?);
    }
    Ok(channels)
}

fn adjoint_lindbladian_matrix(h: &Operator, channels: &[Channel]) -> Operator {
    let mut l = (left_multiplication(h) - right_multiplication(h)) * I;
    for ch in channels {
        l += dissipator_matrix(&ch.jump) * c64::new(ch.rate, 0.0);
    }
    l
}

/// `𝓛[B] = i[H, B] + Σ_channels r·L_J[B]` summed over every coupling.
pub fn adjoint_lindbladian(h: &Operator, decomps: &[JumpDecomposition]) -> Result<SuperOperator> {
    operator::check_square(h, "adjoint_lindbladian")?;
    let channels = collect_channels(h.nrows(), decomps)?;
    SuperOperator::new(h.nrows(), 1, adjoint_lindbladian_matrix(h, &channels))
}

/// Trace dual of the adjoint Lindbladian, generating `ρ(t)`.
pub fn forward_lindbladian(h: &Operator, decomps: &[JumpDecomposition]) -> Result<SuperOperator> {
    let adjoint = adjoint_lindbladian(h, decomps)?;
    let d = adjoint.dim();
    let swap = |k: usize| (k % d) * d + k / d;
    let l = adjoint.matrix();
    let f = Operator::from_fn(d * d, d * d, |p, q| l[(swap(q), swap(p))]);
    SuperOperator::new(d, 1, f)
}

fn check_slot(slot: usize, slots: usize) -> Result<()> {
    if slot < slots {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "slot {slot} out of range for {slots} slots"
        )))
    }
}

/// Adds `scale · (I ⊗ A ⊗ I ⊗ B ⊗ I)` into `target`, with `A` on slot `m1`
/// and `B` (optional) on slot `m2 > m1`.
fn accumulate_lifted(
    target: &mut Operator,
    d2: usize,
    slots: usize,
    a: (&Operator, usize),
    b: Option<(&Operator, usize)>,
    scale: c64,
) {
    let (a_op, m1) = a;
    let nz = |op: &Operator| -> Vec<(usize, usize, c64)> {
        let mut out = Vec::new();
        for j in 0..op.ncols() {
            for i in 0..op.nrows() {
                if op[(i, j)] != ZERO {
                    out.push((i, j, op[(i, j)]));
                }
            }
        }
        out
    };
    let pow = |k: usize| d2.pow(k as u32);
    let a_nz = nz(a_op);
    match b {
        None => {
            let (outer, inner) = (pow(m1), pow(slots - m1 - 1));
            for x in 0..outer {
                for &(i, j, v) in &a_nz {
                    let v = v * scale;
                    let (r0, c0) = ((x * d2 + i) * inner, (x * d2 + j) * inner);
                    for z in 0..inner {
                        target[(r0 + z, c0 + z)] += v;
                    }
                }
            }
        }
        Some((b_op, m2)) => {
            let b_nz = nz(b_op);
            let (outer, middle, inner) = (pow(m1), pow(m2 - m1 - 1), pow(slots - m2 - 1));
            for x in 0..outer {
                for &(i, j, va) in &a_nz {
                    for y in 0..middle {
                        for &(k, l, vb) in &b_nz {
                            let v = va * vb * scale;
                            let r0 = (((x * d2 + i) * middle + y) * d2 + k) * inner;
                            let c0 = (((x * d2 + j) * middle + y) * d2 + l) * inner;
                            for z in 0..inner {
                                target[(r0 + z, c0 + z)] += v;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// One-slot superoperator acting on slot `slot` of `slots`.
pub fn lift(s: &SuperOperator, slot: usize, slots: usize) -> Result<SuperOperator> {
    if s.slots() != 1 {
        return Err(Error::InvalidArgument(format!(
            "lift needs a one-slot superoperator, got {} slots",
            s.slots()
        )));
    }
    check_slot(slot, slots)?;
    let size = slot_space_size(s.dim(), slots)
        .ok_or_else(|| Error::InvalidArgument("lifted superoperator size overflows".into()))?;
    let mut m = Operator::zeros(size, size);
    let d2 = s.dim() * s.dim();
    accumulate_lifted(&mut m, d2, slots, (s.matrix(), slot), None, ONE);
    SuperOperator::new(s.dim(), slots, m)
}

fn check_pair(m1: usize, m2: usize, slots: usize) -> Result<()> {
    check_slot(m2, slots)?;
    if m1 >= m2 {
        return Err(Error::InvalidArgument(format!(
            "cross dissipator needs m1 < m2, got ({m1}, {m2})"
        )));
    }
    Ok(())
}

/// `𝓜^(m1,m2) = Σ_channels r·[J†, ·]_{m1} ∘ [·, J]_{m2}`.
pub fn cross_dissipator(
    dim: usize,
    decomps: &[JumpDecomposition],
    m1: usize,
    m2: usize,
    slots: usize,
) -> Result<SuperOperator> {
    check_pair(m1, m2, slots)?;
    let channels = collect_channels(dim, decomps)?;
    let size = slot_space_size(dim, slots)
        .ok_or_else(|| Error::InvalidArgument("cross dissipator size overflows".into()))?;
    let mut m = Operator::zeros(size, size);
    for ch in &channels {
        let (lc, rc) = (
            left_commutator(&dagger(&ch.jump)),
            right_commutator(&ch.jump),
        );
        accumulate_lifted(
            &mut m,
            dim * dim,
            slots,
            (&lc, m1),
            Some((&rc, m2)),
            c64::new(ch.rate, 0.0),
        );
    }
    SuperOperator::new(dim, slots, m)
}

/// Dense `G_n = Σ_m 𝓛^(m) + Σ_{m1<m2} 𝓜^(m1,m2)`, refused when `d^(2n)` exceeds `budget`.
pub fn multi_slot_generator(
    h: &Operator,
    decomps: &[JumpDecomposition],
    slots: usize,
    budget: usize,
) -> Result<SuperOperator> {
    operator::check_square(h, "multi_slot_generator")?;
    let d = h.nrows();
    if slots == 0 {
        return Err(Error::InvalidArgument(
            "generator needs at least one slot".into(),
        ));
    }
    let size = match slot_space_size(d, slots) {
        Some(size) if size <= budget => size,
        _ => return Err(budget_error(d, slots, budget)),
    };
    let channels = collect_channels(d, decomps)?;
    let l = adjoint_lindbladian_matrix(h, &channels);
    let mut g = Operator::zeros(size, size);
    let d2 = d * d;
    for m in 0..slots {
        accumulate_lifted(&mut g, d2, slots, (&l, m), None, ONE);
    }
    let pairs: Vec<(f64, Operator, Operator)> = channels
        .iter()
        .map(|ch| {
            (
                ch.rate,
                left_commutator(&dagger(&ch.jump)),
                right_commutator(&ch.jump),
            )
        })
        .collect();
    for m1 in 0..slots {
        for m2 in m1 + 1..slots {
            for (rate, lc, rc) in &pairs {
                accumulate_lifted(
                    &mut g,
                    d2,
                    slots,
                    (lc, m1),
                    Some((rc, m2)),
                    c64::new(*rate, 0.0),
                );
            }
        }
    }
    SuperOperator::new(d, slots, g)
}

/// Nonzero entries `(row, col, value)` of a one-slot superoperator.
#[derive(Debug, Clone)]
struct SparseSlotOperator {
    entries: Vec<(usize, usize, c64)>,
}

impl SparseSlotOperator {
    fn new(op: &Operator) -> Self {
        let mut entries = Vec::new();
        for j in 0..op.ncols() {
            for i in 0..op.nrows() {
                let a = op[(i, j)];
                if a != ZERO {
                    entries.push((i, j, a));
                }
            }
        }
        SparseSlotOperator { entries }
    }
}

/// `G_n` as a sum of slotwise Kronecker actions, never materialized.
#[derive(Debug, Clone)]
pub struct MatrixFreeGenerator {
    dim: usize,
    slots: usize,
    size: usize,
    lindbladian: SparseSlotOperator,
    pairs: Vec<(f64, SparseSlotOperator, SparseSlotOperator)>,
    norm_bound: f64,
}

impl MatrixFreeGenerator {
    pub fn new(h: &Operator, decomps: &[JumpDecomposition], slots: usize) -> Result<Self> {
        operator::check_square(h, "MatrixFreeGenerator")?;
        let d = h.nrows();
        if slots == 0 {
            return Err(Error::InvalidArgument(
                "generator needs at least one slot".into(),
            ));
        }
        let size = match slot_space_size(d, slots) {
            Some(size) if size <= MATRIX_FREE_CAP => size,
            _ => return Err(budget_error(d, slots, MATRIX_FREE_CAP)),
        };
        let channels = collect_channels(d, decomps)?;
        let lindbladian = adjoint_lindbladian_matrix(h, &channels);
        let m = slots as f64;
        let mut cross = 0.0;
        let pairs = channels
            .iter()
            .map(|ch| {
                let lc = left_commutator(&dagger(&ch.jump));
                let rc = right_commutator(&ch.jump);
                cross += ch.rate.abs() * spectral_norm_bound(&lc) * spectral_norm_bound(&rc);
                (
                    ch.rate,
                    SparseSlotOperator::new(&lc),
                    SparseSlotOperator::new(&rc),
                )
            })
            .collect();
        Ok(MatrixFreeGenerator {
            dim: d,
            slots,
            size,
            norm_bound: m * spectral_norm_bound(&lindbladian) + 0.5 * m * (m - 1.0) * cross,
            lindbladian: SparseSlotOperator::new(&lindbladian),
            pairs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// `out += scale · (op acting on slot m) v`.
    fn add_slot_action(
        &self,
        op: &SparseSlotOperator,
        m: usize,
        v: &[c64],
        out: &mut [c64],
        scale: c64,
    ) {
        let d2 = self.dim * self.dim;
        let inner = d2.pow((self.slots - m - 1) as u32);
        let block = inner * d2;
        for (out_block, v_block) in out.chunks_exact_mut(block).zip(v.chunks_exact(block)) {
            for &(i, j, a) in &op.entries {
                let a = a * scale;
                let src = &v_block[j * inner..(j + 1) * inner];
                let dst = &mut out_block[i * inner..(i + 1) * inner];
                for (o, x) in dst.iter_mut().zip(src) {
                    *o += a * x;
                }
            }
        }
    }
}

impl LinearOperator for MatrixFreeGenerator {
    fn size(&self) -> usize {
        self.size
    }

    fn apply_into(&self, v: &Vector, out: &mut Vector) {
        out.fill(ZERO);
        let v = v.as_slice();
        let out = out.as_mut_slice();
        for m in 0..self.slots {
            self.add_slot_action(&self.lindbladian, m, v, out, ONE);
        }
        if self.slots > 1 {
            let mut tmp = vec![ZERO; self.size];
            for m2 in 1..self.slots {
                for (rate, lc, rc) in &self.pairs {
                    tmp.fill(ZERO);
                    self.add_slot_action(rc, m2, v, &mut tmp, ONE);
                    for m1 in 0..m2 {
                        self.add_slot_action(lc, m1, &tmp, out, c64::new(*rate, 0.0));
                    }
                }
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        self.norm_bound
    }
}

/// Kronecker product of `kron(A, B)` matrices, exposed for slotwise checks.
pub fn kron_superoperators(a: &SuperOperator, b: &SuperOperator) -> Result<SuperOperator> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "kron_superoperators",
            left: a.dim(),
            right: b.dim(),
        });
    }
    SuperOperator::new(a.dim(), a.slots() + b.slots(), kron(a.matrix(), b.matrix()))
}
