//! Super-operations acting on Choi matrices and the constructions that turn
//! the maximally superposed unitary into arbitrary channels and
//! super-operations.
//!
//! Elements may be rectangular: the resource-consuming constructions act on
//! a joint space and return a matrix on a smaller one.

use crate::bases::{clock, shift, BasisSet};
use crate::channels::{to_choi, Channel, ChoiMatrix};
use crate::error::{contract_err, dim_err, Error, Result};
use crate::matrix::{herm_eig, herm_eig_tol, kron, kron_all, partial_trace, ComplexMatrix, StateVector, C64, ONE};
use crate::Tolerances;

/// `Ω(C) = Σ_n S_n C S_n†` with `Σ_n S_n†S_n ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    input_size: usize,
    output_size: usize,
    elements: Vec<ComplexMatrix>,
}

fn element_gram(elements: &[ComplexMatrix], n: usize) -> ComplexMatrix {
    elements
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, s| &acc + &(&s.adjoint() * s))
        .hermitian_part()
}

impl SuperOp {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return dim_err("a super-operation needs at least one element");
        };
        let (output_size, input_size) = (first.rows(), first.cols());
        if elements.iter().any(|e| e.rows() != output_size || e.cols() != input_size) {
            return dim_err("super-operation elements have different shapes");
        }
        let defect = &ComplexMatrix::identity(input_size) - &element_gram(&elements, input_size);
        let min = *herm_eig(&defect)?.values.last().unwrap();
        if min < -Tolerances::DEFAULT.psd {
            return contract_err(format!("Σ S†S exceeds the identity (eigenvalue {min:e})"));
        }
        Ok(Self {
            input_size,
            output_size,
            elements,
        })
    }

    pub fn unitary(w: ComplexMatrix) -> Result<Self> {
        if !w.is_unitary(Tolerances::DEFAULT.recon) {
            return contract_err("super-operation element is not unitary");
        }
        Self::new(vec![w])
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    /// `‖Σ S†S − I‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        (&element_gram(&self.elements, self.input_size) - &ComplexMatrix::identity(self.input_size))
            .frobenius_norm()
    }

    pub fn is_deterministic(&self) -> bool {
        let g = element_gram(&self.elements, self.input_size);
        g.max_abs_diff(&ComplexMatrix::identity(self.input_size)) <= Tolerances::DEFAULT.psd
    }

    /// `Σ_n S_n M S_n†` for any matrix of the input size.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.input_size || m.cols() != self.input_size {
            return dim_err(format!(
                "{}x{} input for a super-operation on {} dimensions",
                m.rows(),
                m.cols(),
                self.input_size
            ));
        }
        Ok(self
            .elements
            .iter()
            .fold(ComplexMatrix::zeros(self.output_size, self.output_size), |acc, s| {
                &acc + &s.conjugate(m)
            }))
    }
}

/// Largest deviation of `Tr_O Ω(C)` from `I/d` over trace-preserving inputs.
///
/// Exact: checks `Ω(I/d²)` and the image of the spanning set `A⊗B`,
/// `Tr B = 0`, of the directions that keep `Tr_O C` fixed.
pub fn marginal_defect(s: &SuperOp, d: usize) -> Result<f64> {
    let n = d * d;
    if s.input_size() != n || s.output_size() != n {
        return dim_err(format!("marginal check needs a super-operation on {n}x{n} Choi matrices"));
    }
    let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    let centre = s.apply_matrix(&ComplexMatrix::identity(n).scale_real(1.0 / n as f64))?;
    let mut worst = partial_trace(&centre, &[d, d], &[0])?.max_abs_diff(&target);
    let unit = |r: usize, c: usize| ComplexMatrix::from_fn(d, d, |i, j| if i == r && j == c { ONE } else { C64::new(0.0, 0.0) });
    let mut traceless = Vec::new();
    for r in 0..d {
        for c in 0..d {
            if r != c {
                traceless.push(unit(r, c));
            } else if r > 0 {
                traceless.push(&unit(0, 0) - &unit(r, r));
            }
        }
    }
    for r in 0..d {
        for c in 0..d {
            for b in &traceless {
                let out = s.apply_matrix(&kron(&unit(r, c), b))?;
                worst = worst.max(partial_trace(&out, &[d, d], &[0])?.max_abs());
            }
        }
    }
    Ok(worst)
}

/// Deterministic application to a Choi matrix.
pub fn apply_superop(s: &SuperOp, c: &ChoiMatrix) -> Result<ChoiMatrix> {
    let out = s.apply_matrix(c.matrix())?;
    ChoiMatrix::from_matrix(out.hermitian_part())
}

/// Branch `n`: returns `S_n C S_n†/q_n` and `q_n = Tr(S_n C S_n†)/Tr(C)`.
pub fn apply_selective(s: &SuperOp, n: usize, c: &ChoiMatrix) -> Result<(ChoiMatrix, f64)> {
    let Some(el) = s.elements().get(n) else {
        return contract_err(format!("element {n} out of range ({} elements)", s.elements().len()));
    };
    if c.matrix().rows() != s.input_size() {
        return dim_err("Choi matrix does not match the super-operation input");
    }
    let out = el.conjugate(c.matrix());
    let q = out.trace().re / c.trace();
    if !(q >= Tolerances::DEFAULT.psd) {
        return Err(Error::ZeroProbability { index: n, probability: q });
    }
    Ok((ChoiMatrix::from_matrix(out.scale_real(1.0 / q).hermitian_part())?, q))
}

/// First violation found by [`check_sfso`].
#[derive(Debug, Clone, PartialEq)]
pub struct SfsoWitness {
    pub element: usize,
    /// Index of the extreme free input `|ψ_i⟩⟨ψ_i|`.
    pub input_index: usize,
    pub input: ComplexMatrix,
    /// Largest off-diagonal modulus of the output in the output basis.
    pub offdiag: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfsoReport {
    pub is_free: bool,
    pub elementwise: Vec<bool>,
    pub witness: Option<SfsoWitness>,
}

/// Strict freeness: each element maps every extreme free input into the free set.
///
/// Extreme points suffice because the free set is the convex hull of the
/// projectors `|ψ_i⟩⟨ψ_i|` and each element acts linearly.
pub fn check_sfso(s: &SuperOp, b: &BasisSet) -> Result<SfsoReport> {
    let n = b.len();
    if s.input_size() != n || s.output_size() != n {
        return dim_err(format!(
            "super-operation on {}→{} dimensions checked against a d={} basis",
            s.input_size(),
            s.output_size(),
            b.dim()
        ));
    }
    let cb = b.choi_basis();
    check_sfso_with(s, cb.matrix(), cb.matrix(), Tolerances::DEFAULT.free)
}

/// Strict freeness against explicit input and output state bases (columns).
///
/// Every output `S|v_i⟩⟨v_i|S†` is rank one, so its largest off-diagonal
/// modulus is the product of the two largest coefficient moduli.
pub fn check_sfso_with(
    s: &SuperOp,
    input_basis: &ComplexMatrix,
    output_basis: &ComplexMatrix,
    tol_free: f64,
) -> Result<SfsoReport> {
    if input_basis.rows() != s.input_size() || output_basis.rows() != s.output_size() {
        return dim_err("state bases do not match the super-operation");
    }
    let out_adj = output_basis.adjoint();
    let mut elementwise = Vec::with_capacity(s.elements().len());
    let mut witness = None;
    for (e, el) in s.elements().iter().enumerate() {
        let coeffs = &(&out_adj * el) * input_basis;
        let mut free = true;
        for i in 0..coeffs.cols() {
            let mut mods: Vec<f64> = (0..coeffs.rows()).map(|r| coeffs[(r, i)].norm()).collect();
            mods.sort_by(|a, b| b.total_cmp(a));
            let off = if mods.len() > 1 { mods[0] * mods[1] } else { 0.0 };
            if off >= tol_free {
                free = false;
                if witness.is_none() {
                    witness = Some(SfsoWitness {
                        element: e,
                        input_index: i,
                        input: input_basis.column(i).projector(),
                        offdiag: off,
                    });
                }
                break;
            }
        }
        elementwise.push(free);
    }
    Ok(SfsoReport {
        is_free: elementwise.iter().all(|&f| f),
        elementwise,
        witness,
    })
}

/// The cyclic shift `m_y = y − ⌊(y−1)/d²⌋·d²` on 1-based labels `y ≥ 1`.
pub fn shift_index(y: usize, d: usize) -> usize {
    let n = d * d;
    assert!(y >= 1, "shift labels start at 1");
    y - ((y - 1) / n) * n
}

/// `|ψ_max⟩ = (1/d)Σ_i |φ_i⟩`, the Choi state of `(1/d)Σ_i F_i`.
pub fn umax_state(b: &BasisSet) -> StateVector {
    let cb = b.choi_basis();
    let d = b.dim() as f64;
    cb.states()
        .iter()
        .fold(StateVector::zeros(b.len()), |acc, s| acc.add(s))
        .scale(C64::new(1.0 / d, 0.0))
}

pub fn umax_choi(b: &BasisSet) -> ChoiMatrix {
    ChoiMatrix::new(b.dim(), umax_state(b).projector()).expect("rank-one Hermitian")
}

fn require_umax_basis(b: &BasisSet) -> Result<()> {
    let d = b.dim();
    let u = b
        .ops()
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, f| &acc + f)
        .scale_real(1.0 / d as f64);
    if !u.is_unitary(Tolerances::DEFAULT.recon) {
        return Err(Error::InvalidPhase(
            "(1/d)Σ F_i is not unitary; apply the U_max phases to the basis first".into(),
        ));
    }
    Ok(())
}

/// Free super-operation turning `C_max` into `C_target`.
///
/// With `C_target = Σ_x p_x|ψ_x⟩⟨ψ_x|` and `|ψ_x⟩ = Σ_i c_xi|φ_i⟩` the
/// elements are `S_xn = √p_x Σ_i c_xi |φ_i⟩⟨φ_{m(i+n−1)}|`. The basis must
/// already carry the phases that make `(1/d)Σ F_i` unitary.
pub fn synthesize_channel_from_umax(target: &Channel, b: &BasisSet) -> Result<SuperOp> {
    if target.dim() != b.dim() {
        return dim_err(format!("target d={} vs basis d={}", target.dim(), b.dim()));
    }
    if !target.is_trace_preserving() {
        return Err(Error::UnsupportedTarget("target channel is not trace preserving".into()));
    }
    require_umax_basis(b)?;
    let n = b.len();
    let phi = b.choi_basis().matrix().clone();
    let eig = herm_eig(to_choi(target).matrix())?;
    let mut elements = Vec::new();
    for (x, &p) in eig.values.iter().enumerate() {
        if p <= Tolerances::DEFAULT.supp {
            continue;
        }
        let c = phi.adjoint().apply(&eig.vector(x));
        let sp = p.sqrt();
        for shift in 1..=n {
            // 1-based |φ_i⟩⟨φ_{m(i+n−1)}| mapped to 0-based labels
            let mut coeffs = ComplexMatrix::zeros(n, n);
            for i in 1..=n {
                let j = shift_index(i + shift - 1, b.dim());
                coeffs[(i - 1, j - 1)] = c[i - 1] * sp;
            }
            elements.push(b.choi_basis().embed_operator(&coeffs));
        }
    }
    SuperOp::new(elements)
}

impl crate::bases::ChoiBasis {
    /// `Σ_ij a_ij |φ_i⟩⟨φ_j|` for a coefficient matrix `a`.
    pub fn embed_operator(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(self.matrix() * a) * &self.matrix().adjoint()
    }
}

/// Runs `s` on `c ⊗ resource`. When the output has the joint size the
/// resource slot is traced out; when it already has the size of `c` it is
/// returned as is.
pub fn apply_consuming_resource(s: &SuperOp, c: &ComplexMatrix, resource: &ComplexMatrix) -> Result<ComplexMatrix> {
    let joint = kron(c, resource);
    let out = s.apply_matrix(&joint)?;
    if out.rows() == joint.rows() {
        partial_trace(&out, &[c.rows(), resource.rows()], &[0])
    } else if out.rows() == c.rows() {
        Ok(out)
    } else {
        dim_err(format!(
            "output of size {} fits neither the joint space ({}) nor the input ({})",
            out.rows(),
            joint.rows(),
            c.rows()
        ))
    }
}

/// Free joint super-operation implementing `C ↦ Ũ C Ũ†` from `C ⊗ C_max`,
/// where `Ũ = Σ_ij U_ij |φ_i⟩⟨φ_j|`.
///
/// Elements are `S_α = Σ_ij U_ij |φ_i⟩⟨φ_j| ⊗ |φ_α⟩⟨φ_{(i+α) mod d²}|`. The
/// shift runs modulo `d²`; modulo `d` the elements are not complete.
pub fn implement_superop_unitary(u_coeffs: &ComplexMatrix, b: &BasisSet) -> Result<SuperOp> {
    let n = b.len();
    if u_coeffs.rows() != n || u_coeffs.cols() != n {
        return dim_err(format!("coefficient matrix must be {n}x{n}"));
    }
    if !u_coeffs.is_unitary(Tolerances::DEFAULT.recon) {
        return contract_err("coefficient matrix is not unitary");
    }
    require_umax_basis(b)?;
    let cb = b.choi_basis();
    let phi = cb.matrix();
    let mut elements = Vec::with_capacity(n);
    for alpha in 0..n {
        let mut s = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            let row = ComplexMatrix::from_fn(n, n, |r, c| if r == i { u_coeffs[(i, c)] } else { C64::new(0.0, 0.0) });
            let left = cb.embed_operator(&row);
            let right = ComplexMatrix::outer(&phi.column(alpha), &phi.column((i + alpha) % n));
            s = &s + &kron(&left, &right);
        }
        elements.push(s);
    }
    SuperOp::new(elements)
}

/// Output of [`implement_superop_general`].
#[derive(Debug, Clone)]
pub struct GeneralImplementation {
    /// Elements `L_jkm` mapping `S⊗A⊗B` to `B`.
    pub protocol: SuperOp,
    /// Free step `|φ_i⟩|φ_j⟩ ↦ |φ_i⟩|φ_{i+j}⟩` on the two resource registers.
    pub preparation: SuperOp,
    /// `ρ_d = |ψ_d⟩⟨ψ_d|`, `|ψ_d⟩ = (1/d)Σ_i |φ_i⟩|φ_i⟩`, prepared from `C_max ⊗ |φ_0⟩⟨φ_0|`.
    pub resource: ComplexMatrix,
    /// Choi basis matrix used for the labels.
    pub phi: ComplexMatrix,
}

impl GeneralImplementation {
    pub fn run(&self, c: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_consuming_resource(&self.protocol, c, &self.resource)
    }

    /// Input and output state bases for the strict freeness check.
    pub fn free_bases(&self) -> (ComplexMatrix, ComplexMatrix) {
        (kron_all(&[&self.phi, &self.phi, &self.phi]), self.phi.clone())
    }
}

/// Teleportation-based implementation of an arbitrary super-operation.
///
/// A Bell measurement on `S⊗A` in the basis `β_jk = (W_jk⊗I)|ψ_d⟩` is
/// combined with the target element `E_m` on `S` and the correction `W_jk`
/// on `B`, where `W_jk` is `Z^j X^k` written in the `φ` labels. Every
/// element `L_jkm = [β_jk†(E_m⊗I)] ⊗ W_jk` is free.
pub fn implement_superop_general(target: &SuperOp, b: &BasisSet) -> Result<GeneralImplementation> {
    let n = b.len();
    if target.input_size() != n || target.output_size() != n {
        return dim_err(format!("target super-operation must act on {n}x{n} Choi matrices"));
    }
    require_umax_basis(b)?;
    let cb = b.choi_basis();
    let phi = cb.matrix().clone();
    let id = ComplexMatrix::identity(n);

    // |ψ_d⟩ = (1/√N)Σ_i |φ_i⟩|φ_i⟩
    let s = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let psi_d = (0..n).fold(StateVector::zeros(n * n), |acc, i| {
        acc.add(&phi.column(i).kron(&phi.column(i)).scale(s))
    });

    let z = clock(n);
    let x = shift(n);
    let mut elements = Vec::with_capacity(n * n * target.elements().len());
    for j in 0..n {
        for k in 0..n {
            let w = cb.embed_operator(&(&z.pow(j) * &x.pow(k)));
            let beta = kron(&w, &id).apply(&psi_d);
            let bra = ComplexMatrix::from_fn(1, n * n, |_, c| beta[c].conj());
            for e in target.elements() {
                let row = &bra * &kron(e, &id);
                elements.push(kron(&row, &w));
            }
        }
    }
    let protocol = SuperOp::new(elements)?;

    let mut cnot_coeffs = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            cnot_coeffs[(i * n + (i + j) % n, i * n + j)] = ONE;
        }
    }
    let phi2 = kron(&phi, &phi);
    let preparation = SuperOp::unitary(&(&phi2 * &cnot_coeffs) * &phi2.adjoint())?;
    let ancilla = phi.column(0).projector();
    let resource = preparation.apply_matrix(&kron(umax_choi(b).matrix(), &ancilla))?;

    Ok(GeneralImplementation {
        protocol,
        preparation,
        resource,
        phi,
    })
}

/// Single-element super-operation `Σ_i e^{iθ_i}|ψ_{π(i)}⟩⟨ψ_i|`.
pub fn choi_permutation_superop(b: &BasisSet, perm: &[usize], phases: Option<&[C64]>) -> Result<SuperOp> {
    let n = b.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return contract_err("not a permutation of the Choi basis labels");
    }
    let mut coeffs = ComplexMatrix::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        coeffs[(p, i)] = phases.map_or(ONE, |ph| ph[i]);
    }
    SuperOp::unitary(b.choi_basis().embed_operator(&coeffs))
}

/// Elements `|ψ_i⟩⟨ψ_i|`: the dephasing map `Δ` as a super-operation.
pub fn choi_dephasing_superop(b: &BasisSet) -> SuperOp {
    let cb = b.choi_basis();
    let elements = cb.states().iter().map(|s| s.projector()).collect();
    SuperOp::new(elements).expect("complete set of projectors")
}

/// Random strictly free super-operation: each element maps `|ψ_i⟩` to a
/// multiple of `|ψ_{π_n(i)}⟩` for a random permutation `π_n`, with complex
/// amplitudes normalized so that `Σ_n S_n†S_n = I`.
pub fn random_strict_sfso<R: rand::Rng + ?Sized>(rng: &mut R, b: &BasisSet, elements: usize) -> SuperOp {
    use rand::seq::SliceRandom;
    let n = b.len();
    let mut amps = vec![vec![C64::new(0.0, 0.0); n]; elements];
    for i in 0..n {
        let col: Vec<C64> = (0..elements).map(|_| crate::random::gaussian(rng)).collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (k, z) in col.into_iter().enumerate() {
            amps[k][i] = z / norm;
        }
    }
    let cb = b.choi_basis();
    let els = amps
        .iter()
        .map(|a| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut coeffs = ComplexMatrix::zeros(n, n);
            for (i, &p) in perm.iter().enumerate() {
                coeffs[(p, i)] = a[i];
            }
            cb.embed_operator(&coeffs)
        })
        .collect();
    SuperOp::new(els).expect("normalized amplitudes give a complete set")
}

/// Smallest eigenvalue of `I − Σ S†S`, used to classify element sets.
pub fn completeness_min_eig(s: &SuperOp) -> f64 {
    let g = &ComplexMatrix::identity(s.input_size()) - &element_gram(s.elements(), s.input_size());
    *herm_eig_tol(&g, 1e-6).expect("Hermitian").values.last().unwrap()
}
