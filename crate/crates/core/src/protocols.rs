//! State-vector simulations: superposition by a quantum switch, collapse of
//! an evolution onto basis operations, indefinite temporal order, temporal
//! Bell states and signaling tests for bipartite channels.
//!
//! All probabilities are exact Born-rule values; nothing is sampled.

use crate::bases::{root_of_unity, schwinger_basis};
use crate::channels::Channel;
use crate::error::{contract_err, dim_err, Error, Result};
use crate::matrix::{
    herm_eig, kron, kron_all, partial_trace, pauli, svd, trace_norm_hermitian, von_neumann_entropy, ComplexMatrix,
    StateVector, C64, I, ONE, ZERO,
};
use crate::Tolerances;

/// Branches below this probability are reported with their ideal post state.
const NEGLIGIBLE: f64 = 1e-14;

/// One measurement branch of a protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub label: String,
    pub probability: f64,
    /// Normalized, with the first non-negligible amplitude real and positive.
    pub post_state: StateVector,
    /// Operator `K` with `K|ψ⟩` equal to the post state up to phase.
    pub effective_operator: Option<ComplexMatrix>,
}

fn require_unitary(u: &ComplexMatrix, what: &str) -> Result<()> {
    if !u.is_square() || !u.is_unitary(Tolerances::DEFAULT.recon) {
        return contract_err(format!("{what} is not unitary"));
    }
    Ok(())
}

fn require_state(s: &StateVector, d: usize, what: &str) -> Result<()> {
    if s.dim() != d {
        return dim_err(format!("{what} has dimension {}, expected {d}", s.dim()));
    }
    if (s.norm_sqr() - 1.0).abs() > Tolerances::DEFAULT.recon {
        return contract_err(format!("{what} is not normalized"));
    }
    Ok(())
}

/// The unit vector `|p⟩` of a rank-one projector `|p⟩⟨p|`.
fn projector_vector(p: &ComplexMatrix, d: usize) -> Result<StateVector> {
    let tol = Tolerances::DEFAULT;
    if p.rows() != d || p.cols() != d {
        return dim_err(format!("control projector must be {d}x{d}"));
    }
    if !p.is_hermitian(tol.herm) || (&(p * p) - p).max_abs() > tol.recon || (p.trace().re - 1.0).abs() > tol.recon {
        return contract_err("control projector is not a rank-one projector");
    }
    Ok(herm_eig(p)?.vector(0))
}

fn probabilities_valid(p0: f64, p1: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p1) || (p0 + p1 - 1.0).abs() > Tolerances::DEFAULT.recon {
        return contract_err(format!("branch probabilities ({p0}, {p1}) must be non-negative and sum to 1"));
    }
    Ok(())
}

/// `|0⟩⟨0|⊗A + |1⟩⟨1|⊗B`.
fn controlled_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let p0 = StateVector::basis(2, 0).projector();
    let p1 = StateVector::basis(2, 1).projector();
    &kron(&p0, a) + &kron(&p1, b)
}

/// `(⟨p|⊗I)|Ψ⟩` for a first register of dimension `p.dim()`.
fn contract_first(p: &StateVector, state: &StateVector) -> StateVector {
    let rest = state.dim() / p.dim();
    let mut out = vec![ZERO; rest];
    for (k, pk) in p.amplitudes().iter().enumerate() {
        for (r, o) in out.iter_mut().enumerate() {
            *o += pk.conj() * state[k * rest + r];
        }
    }
    StateVector::from_amplitudes(out)
}

/// `|0⟩⟨0|⊗U₁ + |1⟩⟨1|⊗U₂` on `(c₁|0⟩ + c₂|1⟩)⊗|ψ⟩`, then the control is
/// projected on `control_projector`.
pub fn switch_superpose(
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    control: (C64, C64),
    sys: &StateVector,
    control_projector: &ComplexMatrix,
) -> Result<ProtocolOutcome> {
    require_unitary(u1, "u1")?;
    require_unitary(u2, "u2")?;
    if u1.rows() != u2.rows() {
        return dim_err("branch unitaries have different dimensions");
    }
    require_state(sys, u1.rows(), "system state")?;
    let (c1, c2) = control;
    if (c1.norm_sqr() + c2.norm_sqr() - 1.0).abs() > Tolerances::DEFAULT.recon {
        return contract_err("control amplitudes are not normalized");
    }
    let p = projector_vector(control_projector, 2)?;
    let ctrl = StateVector::from_amplitudes(vec![c1, c2]);
    let full = controlled_pair(u1, u2).apply(&ctrl.kron(sys));
    let branch = contract_first(&p, &full);
    let probability = branch.norm_sqr();
    if probability < NEGLIGIBLE {
        return Err(Error::ZeroProbability {
            index: 0,
            probability,
        });
    }
    let s = 1.0 / probability.sqrt();
    let k = (&u1.scale(p[0].conj() * c1) + &u2.scale(p[1].conj() * c2)).scale_real(s);
    Ok(ProtocolOutcome {
        label: "projected".into(),
        probability,
        post_state: branch.scale(C64::new(s, 0.0)).canonical_phase(),
        effective_operator: Some(k),
    })
}

/// Qubit collapse: `U_A U_B V U_B U_A` on `|+⟩_A|+⟩_B|φ⟩`, with `U_A` the
/// `σ_z` controlled by `A` and `U_B` the `σ_x` controlled by `B`.
///
/// Outcomes are returned in the order `I, σ_x, σ_y, σ_z`. Labels give the
/// measured `±` of `A` then `B`: `σ_z` commutes with the `A` control, so
/// `σ_x` flips `A` (`-+`), `σ_z` flips `B` (`+-`) and `σ_y` flips both.
pub fn collapse_qubit(v: &ComplexMatrix, sys: &StateVector) -> Result<Vec<ProtocolOutcome>> {
    require_unitary(v, "v")?;
    if v.rows() != 2 {
        return dim_err("collapse_qubit needs a 2x2 unitary");
    }
    require_state(sys, 2, "system state")?;
    let id2 = ComplexMatrix::identity(2);
    let p0 = StateVector::basis(2, 0).projector();
    let p1 = StateVector::basis(2, 1).projector();
    let ua = &kron_all(&[&p0, &id2, &id2]) + &kron_all(&[&p1, &id2, &pauli::z()]);
    let ub = &kron_all(&[&id2, &p0, &id2]) + &kron_all(&[&id2, &p1, &pauli::x()]);
    let vs = kron_all(&[&id2, &id2, v]);
    let circuit = &(&(&(&ua * &ub) * &vs) * &ub) * &ua;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector::from_amplitudes(vec![C64::new(h, 0.0), C64::new(h, 0.0)]);
    let minus = StateVector::from_amplitudes(vec![C64::new(h, 0.0), C64::new(-h, 0.0)]);
    let fin = circuit.apply(&plus.kron(&plus).kron(sys));

    let ops = pauli::all();
    let labels = [("+", "+"), ("-", "+"), ("-", "-"), ("+", "-")];
    let mut outcomes = Vec::with_capacity(4);
    for (op, (la, lb)) in ops.iter().zip(labels) {
        let a = if la == "+" { &plus } else { &minus };
        let b = if lb == "+" { &plus } else { &minus };
        let branch = contract_first(&a.kron(b), &fin);
        outcomes.push(outcome_from_branch(format!("{la}{lb}"), branch, op, sys));
    }
    Ok(outcomes)
}

fn outcome_from_branch(label: String, branch: StateVector, op: &ComplexMatrix, sys: &StateVector) -> ProtocolOutcome {
    let probability = branch.norm_sqr();
    let post = if probability > NEGLIGIBLE {
        branch.normalized().expect("non-zero branch")
    } else {
        op.apply(sys).normalized().expect("unitary image")
    };
    ProtocolOutcome {
        label,
        probability,
        post_state: post.canonical_phase(),
        effective_operator: Some(op.clone()),
    }
}

/// Expansion coefficients `c_i = Tr(F_i†V)/2` against `(I, σ_x, σ_y, σ_z)`.
pub fn pauli_coefficients(v: &ComplexMatrix) -> [C64; 4] {
    pauli::all().map(|p| p.hs_inner(v) * 0.5)
}

/// Measurement basis of the ancillas in [`collapse_general`], one product
/// state per `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaBasis {
    pub states: Vec<StateVector>,
    /// Largest deviation of the Gram matrix from the identity.
    pub gram_residual: f64,
}

fn collapse_circuit(d: usize, v: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(d);
    let z = crate::bases::clock(d);
    let x = crate::bases::shift(d);
    let mut ua = ComplexMatrix::zeros(d * d * d, d * d * d);
    let mut ub = ComplexMatrix::zeros(d * d * d, d * d * d);
    for k in 0..d {
        let pk = StateVector::basis(d, k).projector();
        ua = &ua + &kron_all(&[&pk, &id, &z.pow(k)]);
        ub = &ub + &kron_all(&[&id, &pk, &x.pow(k)]);
    }
    let vs = kron_all(&[&id, &id, v]);
    &(&(&(&ua * &ub) * &vs) * &ub.adjoint()) * &ua.adjoint()
}

fn fourier_plus(d: usize) -> StateVector {
    let s = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    StateVector::from_amplitudes(vec![s; d])
}

/// Runs the circuit on each `S_mn` and extracts the ancilla factor that
/// accompanies `S_mn|φ⟩`. Fails if a factor is not a product state or the
/// factors are not orthonormal.
pub fn derive_ancilla_basis(d: usize, sys: &StateVector) -> Result<AncillaBasis> {
    let b = schwinger_basis(d)?;
    let tol = Tolerances::DEFAULT;
    let input = fourier_plus(d).kron(&fourier_plus(d)).kron(sys);
    let mut states = Vec::with_capacity(d * d);
    for s_mn in b.ops() {
        let out = collapse_circuit(d, s_mn).apply(&input);
        let target = s_mn.apply(sys);
        let factor = StateVector::from_amplitudes(
            (0..d * d)
                .map(|ab| (0..d).map(|k| target[k].conj() * out[ab * d + k]).sum())
                .collect(),
        );
        let residual = out.add(&factor.kron(&target).scale(-ONE)).norm_sqr().sqrt();
        if residual > 1e-9 {
            return Err(Error::ProtocolInconsistency(format!(
                "circuit output for a basis operation does not factor (residual {residual:e})"
            )));
        }
        let reshaped = ComplexMatrix::from_fn(d, d, |a, bb| factor[a * d + bb]);
        let sv = svd(&reshaped).singular_values;
        if sv.len() > 1 && sv[1] > 1e-9 {
            return Err(Error::ProtocolInconsistency(format!(
                "ancilla factor is entangled (second Schmidt value {:e})",
                sv[1]
            )));
        }
        states.push(factor);
    }
    let basis = ComplexMatrix::from_columns(&states)?;
    let gram_residual = (&basis.adjoint() * &basis).max_abs_diff(&ComplexMatrix::identity(d * d));
    if gram_residual > 1e-9_f64.max(tol.recon) {
        return Err(Error::ProtocolInconsistency(format!(
            "derived ancilla states are not orthonormal (residual {gram_residual:e})"
        )));
    }
    Ok(AncillaBasis { states, gram_residual })
}

/// Collapse onto the clock-shift operations `S_mn` for any `d ≥ 2`.
///
/// The circuit is `U_A U_B V U_B† U_A†` with `U_A = Σ_k|k⟩⟨k|⊗Z^k`,
/// `U_B = Σ_k|k⟩⟨k|⊗X^k` and Fourier-uniform ancillas. Outcome `(m,n)`
/// has probability `|Tr(S_mn†V)/d|²`.
pub fn collapse_general(v: &ComplexMatrix, sys: &StateVector) -> Result<Vec<ProtocolOutcome>> {
    require_unitary(v, "v")?;
    let d = v.rows();
    if d < 2 {
        return dim_err("collapse needs d ≥ 2");
    }
    require_state(sys, d, "system state")?;
    let ancillas = derive_ancilla_basis(d, sys)?;
    let b = schwinger_basis(d)?;
    let fin = collapse_circuit(d, v).apply(&fourier_plus(d).kron(&fourier_plus(d)).kron(sys));
    Ok(ancillas
        .states
        .iter()
        .zip(b.ops())
        .enumerate()
        .map(|(idx, (anc, op))| {
            let branch = contract_first(anc, &fin);
            outcome_from_branch(format!("({},{})", idx / d, idx % d), branch, op, sys)
        })
        .collect())
}

/// Control-switch of the two orderings `U₁₂ = U₁U₂` and `U₂₁ = U₂U₁` with
/// control `√p₀|0⟩ + √p₁|1⟩`, projected on `control_projector`.
pub fn temporal_order(
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    p0: f64,
    p1: f64,
    sys: &StateVector,
    control_projector: &ComplexMatrix,
) -> Result<ProtocolOutcome> {
    probabilities_valid(p0, p1)?;
    require_unitary(u1, "u1")?;
    require_unitary(u2, "u2")?;
    if u1.rows() != u2.rows() {
        return dim_err("u1 and u2 have different dimensions");
    }
    let u12 = u1 * u2;
    let u21 = u2 * u1;
    let mut out = switch_superpose(
        &u12,
        &u21,
        (C64::new(p0.sqrt(), 0.0), C64::new(p1.sqrt(), 0.0)),
        sys,
        control_projector,
    )?;
    out.label = "temporal".into();
    Ok(out)
}

/// Result of [`temporal_bell`].
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalBellOutcome {
    pub outcome: ProtocolOutcome,
    /// Entropy of the `A` marginal in nats.
    pub entanglement_entropy: f64,
    /// `2√(s₁²+s₂²)` from the two largest singular values of the
    /// correlation matrix; `None` unless both parties are qubits.
    pub chsh_max: Option<f64>,
}

/// Joint control of both parties' orderings, control projected on `|+⟩`.
#[allow(clippy::too_many_arguments)]
pub fn temporal_bell(
    ua1: &ComplexMatrix,
    ua2: &ComplexMatrix,
    ub1: &ComplexMatrix,
    ub2: &ComplexMatrix,
    p0: f64,
    p1: f64,
    sys_a: &StateVector,
    sys_b: &StateVector,
) -> Result<TemporalBellOutcome> {
    probabilities_valid(p0, p1)?;
    for (u, n) in [(ua1, "uA1"), (ua2, "uA2"), (ub1, "uB1"), (ub2, "uB2")] {
        require_unitary(u, n)?;
    }
    if ua1.rows() != ua2.rows() || ub1.rows() != ub2.rows() {
        return dim_err("unitaries of one party have different dimensions");
    }
    let (da, db) = (ua1.rows(), ub1.rows());
    require_state(sys_a, da, "state A")?;
    require_state(sys_b, db, "state B")?;
    let u12 = kron(&(ua1 * ua2), &(ub1 * ub2));
    let u21 = kron(&(ua2 * ua1), &(ub2 * ub1));
    let h = C64::new(0.5, 0.0);
    let plus = ComplexMatrix::from_rows(&[&[h, h], &[h, h]]);
    let mut outcome = switch_superpose(
        &u12,
        &u21,
        (C64::new(p0.sqrt(), 0.0), C64::new(p1.sqrt(), 0.0)),
        &sys_a.kron(sys_b),
        &plus,
    )?;
    outcome.label = "temporal_bell".into();
    let rho = outcome.post_state.projector();
    let rho_a = partial_trace(&rho, &[da, db], &[0])?;
    let entanglement_entropy = von_neumann_entropy(&rho_a)?.max(0.0);
    let chsh_max = if da == 2 && db == 2 { Some(chsh_max(&rho)?) } else { None };
    Ok(TemporalBellOutcome {
        outcome,
        entanglement_entropy,
        chsh_max,
    })
}

/// Largest CHSH value of a two-qubit state: `2√(s₁²+s₂²)` where `s₁ ≥ s₂`
/// are the top singular values of `T_ij = Tr(ρ σ_i⊗σ_j)`.
pub fn chsh_max(rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return dim_err("CHSH criterion needs a two-qubit state");
    }
    let ps = [pauli::x(), pauli::y(), pauli::z()];
    let t = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((&kron(&ps[i], &ps[j]) * rho).trace().re, 0.0));
    let e = herm_eig(&(&t.adjoint() * &t))?;
    let s = e.values[0].max(0.0) + e.values[1].max(0.0);
    Ok(2.0 * s.sqrt())
}

/// Pure states whose projectors span operator space:
/// `|k⟩`, `(|k⟩+|l⟩)/√2`, `(|k⟩+i|l⟩)/√2` for `k < l`.
pub fn tomographic_states(d: usize) -> Vec<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<StateVector> = (0..d).map(|k| StateVector::basis(d, k)).collect();
    for k in 0..d {
        for l in k + 1..d {
            for phase in [ONE, I] {
                let mut a = vec![ZERO; d];
                a[k] = C64::new(h, 0.0);
                a[l] = phase * h;
                out.push(StateVector::from_amplitudes(a));
            }
        }
    }
    out
}

fn check_tomographic(states: &[StateVector], d: usize) -> Result<()> {
    let vecs = ComplexMatrix::from_fn(d * d, states.len(), |r, c| {
        let p = states[c].projector();
        p[(r / d, r % d)]
    });
    let rank = svd(&vecs).singular_values.iter().filter(|&&s| s > 1e-9).count();
    if rank != d * d {
        return contract_err(format!("tomographic set has rank {rank}, need {}", d * d));
    }
    Ok(())
}

/// Traceless Hermitian basis of `d×d` operators (generalized Gell-Mann).
pub fn traceless_hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = ONE;
            s[(k, j)] = ONE;
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = -I;
            a[(k, j)] = I;
            out.push(a);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<C64> = (0..d)
            .map(|k| {
                if k < l {
                    C64::new(norm, 0.0)
                } else if k == l {
                    C64::new(-(l as f64) * norm, 0.0)
                } else {
                    ZERO
                }
            })
            .collect();
        out.push(ComplexMatrix::diag(&diag));
    }
    out
}

/// Two states of the sender that the receiver can tell apart.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingWitness {
    pub first: StateVector,
    pub second: StateVector,
    /// Fixed state of the receiving party.
    pub partner: StateVector,
    /// Trace distance between the receiver's two marginals.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalingReport {
    pub a_to_b: bool,
    pub b_to_a: bool,
    pub a_witness: Option<SignalingWitness>,
    pub b_witness: Option<SignalingWitness>,
}

pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm_hermitian(&(a - b).hermitian_part())?)
}

/// Decides signaling in each direction by linearity, then extracts a
/// witness pair from the sender's tomographic states.
///
/// `dims = [d_A, d_B]` must multiply to the channel dimension.
pub fn signaling_test(ch: &Channel, dims: &[usize]) -> Result<SignalingReport> {
    let &[da, db] = dims else {
        return contract_err("signaling test needs local dimensions [d_A, d_B]");
    };
    if da * db != ch.dim() {
        return dim_err(format!("local dims {da}x{db} do not match channel dimension {}", ch.dim()));
    }
    let (a_to_b, a_witness) = one_direction(ch, da, db, true)?;
    let (b_to_a, b_witness) = one_direction(ch, da, db, false)?;
    Ok(SignalingReport {
        a_to_b,
        b_to_a,
        a_witness,
        b_witness,
    })
}

fn one_direction(ch: &Channel, da: usize, db: usize, a_sends: bool) -> Result<(bool, Option<SignalingWitness>)> {
    let tol = Tolerances::DEFAULT.signal;
    let (ds, dr) = if a_sends { (da, db) } else { (db, da) };
    let sender_states = tomographic_states(ds);
    let partner_states = tomographic_states(dr);
    check_tomographic(&sender_states, ds)?;
    check_tomographic(&partner_states, dr)?;
    let joint = |s: &ComplexMatrix, r: &ComplexMatrix| if a_sends { kron(s, r) } else { kron(r, s) };
    let receiver_marginal = |m: &ComplexMatrix| -> Result<ComplexMatrix> {
        partial_trace(&ch.apply(m)?, &[da, db], &[if a_sends { 1 } else { 0 }])
    };

    let mut signals = false;
    'outer: for partner in &partner_states {
        let pr = partner.projector();
        for t in traceless_hermitian_basis(ds) {
            let response = receiver_marginal(&joint(&t, &pr))?;
            if 0.5 * trace_norm_hermitian(&response.hermitian_part())? > tol {
                signals = true;
                break 'outer;
            }
        }
    }
    if !signals {
        return Ok((false, None));
    }

    let mut best: Option<SignalingWitness> = None;
    for partner in &partner_states {
        let pr = partner.projector();
        let marginals = sender_states
            .iter()
            .map(|s| receiver_marginal(&joint(&s.projector(), &pr)))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..sender_states.len() {
            for j in i + 1..sender_states.len() {
                let dist = trace_distance(&marginals[i], &marginals[j])?;
                if best.as_ref().is_none_or(|w| dist > w.distance) {
                    best = Some(SignalingWitness {
                        first: sender_states[i].clone(),
                        second: sender_states[j].clone(),
                        partner: partner.clone(),
                        distance: dist,
                    });
                }
            }
        }
    }
    Ok((true, best))
}

/// `|+⟩⟨+|` on a qubit, the usual control projector.
pub fn plus_projector() -> ComplexMatrix {
    let h = C64::new(0.5, 0.0);
    ComplexMatrix::from_rows(&[&[h, h], &[h, h]])
}

/// `|+⟩` on `d` levels with phases `ξ^{sign·k·n}`, used to describe the
/// derived ancilla states.
pub fn fourier_state(d: usize, n: usize, sign: i64) -> StateVector {
    let s = 1.0 / (d as f64).sqrt();
    StateVector::from_amplitudes((0..d).map(|k| root_of_unity(d, sign * (k * n) as i64) * s).collect())
}
