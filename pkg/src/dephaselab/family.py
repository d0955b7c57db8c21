"""A two-parameter qutrit-qutrit family and its closed-form noise behavior.

The family is a mixture of one entangled coherence triple with two
product-diagonal backgrounds weighted by a population parameter alpha in
(3, 5]. Under ground/excited dephasing its evolution, partial-transpose
spectrum, realignment excess and classification thresholds all have
closed forms, so the family doubles as an analytic oracle for the
numerical pipeline. A locally basis-swapped variant keeps one coherence
inside the never-damped excited doublet and therefore stays distillable
forever; probes built from single channel branches certify that.

All closed forms here are verified against the numerical path by the
test suite; none are trusted on their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .channels import NoiseParams, general_dephase, infinite_limit, local_pair
from .criteria import BlockSpec, min_pt_eigenvalue
from .linalg import TOL, check_hermitian, eigvals_hermitian
from .qstate import (
    DensityMatrix,
    Dims,
    ZeroTraceError,
    make_state,
    project_local,
    tensor,
)

QUTRIT_PAIR = Dims(3, 3)


class AlphaDomainError(ValueError):
    """Population parameter outside the family domain (3, 5]."""


class AlreadyPptError(ValueError):
    """No PPT onset exists: the state is PPT from t = 0 on."""


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (3.0 < alpha <= 5.0) or not math.isfinite(alpha):
        raise AlphaDomainError(f"alpha must lie in (3, 5], got {alpha}")
    return alpha


def _check_rate(gamma_rate: float) -> float:
    gamma_rate = float(gamma_rate)
    if not math.isfinite(gamma_rate) or gamma_rate <= 0:
        raise ValueError(f"gamma_rate must be finite and positive, got {gamma_rate}")
    return gamma_rate


@dataclass(frozen=True)
class FamilyParams:
    """Population parameter plus noise settings for one evolved state."""

    alpha: float
    noise: NoiseParams

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class McSpec:
    """Coefficient matrix of a maximally correlated state sum a_ij |ii><jj|.

    The matrix must itself be a valid density matrix (Hermitian, PSD,
    unit trace); that makes the lifted state valid.
    """

    d: int
    a: np.ndarray

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"local dimension must be >= 2, got {self.d}")
        a = np.array(self.a, dtype=complex)
        if a.shape != (self.d, self.d):
            raise ValueError(f"coefficient matrix shape {a.shape}, expected {(self.d, self.d)}")
        check_hermitian(a)
        if abs(complex(np.trace(a)) - 1.0) > TOL.trace:
            raise ValueError(f"coefficient trace {np.trace(a):.15g} must be 1")
        if float(eigvals_hermitian((a + a.conj().T) / 2)[0]) < TOL.psd_floor:
            raise ValueError("coefficient matrix must be positive semidefinite")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of a branch probe: the substate, its witness, the verdict.

    weight is the trace the branch carried before normalization; the
    entanglement verdict is scale invariant, so dropping it is harmless,
    but it is reported for transparency.
    """

    substate: DensityMatrix
    min_pt_eigenvalue: float
    entangled: bool
    weight: float


@dataclass(frozen=True)
class McReport:
    """Checks on a maximally correlated state under general dephasing.

    still_mc: the evolved state keeps the |ii><jj| support pattern;
    mc_deviation is the largest entry found outside it. entangled follows
    the coefficient off-diagonals (nonzero iff entangled, and dephasing
    damps but never zeroes them). distillable reports the two-qubit
    witness on the labels of the largest off-diagonal coefficient,
    evaluated on the evolved state.
    """

    still_mc: bool
    mc_deviation: float
    entangled: bool
    distillable: bool
    witness_value: Optional[float]
    witness_labels: Optional[tuple[int, int]]


class LimitVerdict(str, Enum):
    SEPARABLE_LIMIT = "SeparableLimit"
    DISTILLABLE_LIMIT = "DistillableLimit"


def initial_state(alpha: float) -> DensityMatrix:
    """The family state: one coherence triple over two diagonal backgrounds.

    (2/21) projector onto |01>+|10>+|22>, plus alpha/21 on each of
    |00>, |12>, |21> and (5-alpha)/21 on each of |11>, |20>, |02>.
    NPT exactly for alpha > 4; PPT entangled on (3, 4].
    """
    alpha = _check_alpha(alpha)
    d = QUTRIT_PAIR
    m = np.zeros((9, 9), dtype=complex)
    psi = np.zeros(9)
    psi[[d.flat(0, 1), d.flat(1, 0), d.flat(2, 2)]] = 1.0
    m += (2.0 / 21.0) * np.outer(psi, psi)
    for a, b in ((0, 0), (1, 2), (2, 1)):
        m[d.flat(a, b), d.flat(a, b)] += alpha / 21.0
    for a, b in ((1, 1), (2, 0), (0, 2)):
        m[d.flat(a, b), d.flat(a, b)] += (5.0 - alpha) / 21.0
    return make_state(d, m)


def swapped_state(alpha: float) -> DensityMatrix:
    """The family state after swapping B's levels 0 and 1.

    The local swap moves the coherence triple onto |00>+|11>+|22>, whose
    (|11>,|22>) component the ground/excited noise never damps; the state
    therefore stays distillable at every finite time.
    """
    alpha = _check_alpha(alpha)
    swap01 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    u = tensor(np.eye(3, dtype=complex), swap01)
    return make_state(QUTRIT_PAIR, u @ initial_state(alpha).mat @ u.conj().T)


def swapped_state_from_mixture(alpha: float) -> DensityMatrix:
    """Same state built directly as a three-component mixture.

    (2/7) maximally entangled projector + (alpha/7) uniform diagonal on
    the pairs (a, a+1 mod 3) + ((5-alpha)/7) uniform diagonal on the
    pairs (a, a-1 mod 3). Kept as an independent construction path; the
    test suite pins entrywise agreement with swapped_state.
    """
    alpha = _check_alpha(alpha)
    d = QUTRIT_PAIR
    phi = np.zeros(9)
    phi[[d.flat(0, 0), d.flat(1, 1), d.flat(2, 2)]] = 1.0 / math.sqrt(3.0)
    m = (2.0 / 7.0) * np.outer(phi, phi).astype(complex)
    for a in range(3):
        m[d.flat(a, (a + 1) % 3), d.flat(a, (a + 1) % 3)] += alpha / 21.0
        m[d.flat(a, (a - 1) % 3), d.flat(a, (a - 1) % 3)] += (5.0 - alpha) / 21.0
    return make_state(d, m)


def evolved_closed_form(fp: FamilyParams) -> DensityMatrix:
    """The family state at time t, written directly.

    The diagonal never moves; the three coherences pick up one retention
    factor per side whose label pair touches the ground level:
    (|01>,|10>) keeps gamma_a * gamma_b, (|01>,|22>) keeps gamma_a,
    (|10>,|22>) keeps gamma_b.
    """
    d = QUTRIT_PAIR
    m = np.array(initial_state(fp.alpha).mat)
    ga, gb = fp.noise.gamma_a, fp.noise.gamma_b
    c01, c10, c22 = d.flat(0, 1), d.flat(1, 0), d.flat(2, 2)
    m[c01, c10] *= ga * gb
    m[c10, c01] *= ga * gb
    m[c01, c22] *= ga
    m[c22, c01] *= ga
    m[c10, c22] *= gb
    m[c22, c10] *= gb
    return make_state(d, m)


def pt_branch_eigenvalue(alpha: float, rate_sum: float, t: float) -> float:
    """Smallest eigenvalue of one 2x2 partial-transpose branch.

    Each surviving coherence of the evolved family pairs, after partial
    transposition, against two background populations; the branch damped
    at total rate rate_sum contributes the eigenvalue
    (5 - sqrt((2*alpha - 5)^2 + 16*exp(-rate_sum*t))) / 42.
    The three branches use rate_a + rate_b, rate_a and rate_b. Negative
    exactly while exp(-rate_sum*t) > alpha*(5 - alpha)/4.
    """
    alpha = _check_alpha(alpha)
    return (5.0 - math.sqrt((2.0 * alpha - 5.0) ** 2 + 16.0 * math.exp(-rate_sum * t))) / 42.0


def ppt_onset_time(alpha: float, gamma_rate: float) -> float:
    """Time at which the evolved family turns PPT (distillability loss).

    ln(4 / (alpha * (5 - alpha))) / gamma_rate for alpha in (4, 5);
    infinite at alpha = 5 (the slowest branch never turns). Raises
    AlreadyPptError for alpha <= 4, where the state is PPT from the
    start and no onset exists.
    """
    alpha = _check_alpha(alpha)
    gamma_rate = _check_rate(gamma_rate)
    if alpha <= 4.0:
        raise AlreadyPptError(f"alpha = {alpha} is PPT at t = 0; no onset to compute")
    if alpha == 5.0:
        return math.inf
    return math.log(4.0 / (alpha * (5.0 - alpha))) / gamma_rate


def realignment_closed_form(alpha: float, gamma_rate: float, t: float) -> float:
    """Realignment excess of the evolved family at symmetric rates.

    (2/21) * (2*exp(-g*t) + 4*exp(-g*t/2) - 7 + sqrt(3*alpha^2 - 15*alpha + 19)),
    with g = gamma_rate. The t-independent part is the excess of the
    background mixture; the two damped terms carry the coherences.
    """
    alpha = _check_alpha(alpha)
    background = math.sqrt(3.0 * alpha ** 2 - 15.0 * alpha + 19.0) - 7.0
    g = float(gamma_rate)
    return (2.0 / 21.0) * (2.0 * math.exp(-g * t) + 4.0 * math.exp(-g * t / 2.0) + background)


def fidelity_initial(gamma_rate: float, t: float) -> float:
    """Closed-form fidelity curve of the unswapped family.

    [(15 + sqrt(6*(x + 2 + sqrt(x^2 + 8x)))) / 21]^2 with x = exp(-g*t);
    independent of alpha. This is the branch-paired spectral overlap of
    the initial and evolved states; it coincides with bures_fidelity only
    where they commute (t = 0), a gap documented by the acceptance suite.
    """
    x = math.exp(-float(gamma_rate) * t)
    inner = 6.0 * (x + 2.0 + math.sqrt(x * x + 8.0 * x))
    return ((15.0 + math.sqrt(inner)) / 21.0) ** 2


def fidelity_swapped(gamma_rate: float, t: float) -> float:
    """Closed-form fidelity curve of the swapped family.

    [(15 + sqrt(18 + 6*sqrt(1 + 8*exp(-2*g*t)))) / 21]^2, independent of
    alpha. Same caveat as fidelity_initial: branch-paired spectral
    overlap, not the Uhlmann fidelity of the evolved pair.
    """
    x = math.exp(-2.0 * float(gamma_rate) * t)
    inner = 18.0 + 6.0 * math.sqrt(1.0 + 8.0 * x)
    return ((15.0 + math.sqrt(inner)) / 21.0) ** 2


def _probe_verdict(substate: DensityMatrix, weight: float) -> ProbeResult:
    witness = min_pt_eigenvalue(substate)
    return ProbeResult(substate, witness, witness < -TOL.verdict, weight)


def one_sided_probe(state: DensityMatrix, side: str, noise: NoiseParams) -> ProbeResult:
    """Distillability probe from one erased-ground channel branch.

    Keeps the branch of the evolved state in which the chosen side's
    ground level was erased (the partial Kraus sum over the other side's
    full pair). The branch is supported on a 3x2 (side "B") or 2x3
    (side "A") subspace, where NPT is conclusive: a negative witness on a
    2xN support certifies the evolved state distillable at this time.
    The substate is returned normalized; raises ZeroTraceError when the
    branch carries no weight (t = 0).
    """
    if state.dims != QUTRIT_PAIR:
        raise ValueError(f"probe is defined on dims (3, 3), got {state.dims}")
    pair_a = local_pair(noise.gamma_a)
    pair_b = local_pair(noise.gamma_b)
    if side == "B":
        kraus = [tensor(k, pair_b[1]) for k in pair_a]
        keep_a, keep_b = (0, 1, 2), (1, 2)
    elif side == "A":
        kraus = [tensor(pair_a[1], k) for k in pair_b]
        keep_a, keep_b = (1, 2), (0, 1, 2)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    branch = sum(k @ state.mat @ k.conj().T for k in kraus)
    weight = float(np.trace(branch).real)
    if weight < TOL.zero_trace:
        raise ZeroTraceError(f"branch weight {weight:.3e}; the probe needs t > 0")
    carrier = DensityMatrix(branch, QUTRIT_PAIR)
    return _probe_verdict(project_local(carrier, keep_a, keep_b, renormalize=True), weight)


def two_sided_probe(state: DensityMatrix) -> ProbeResult:
    """Distillability probe from the doublet-doublet corner.

    The {1,2}x{1,2} block is exactly the both-grounds-erased channel
    branch up to a positive scalar, and the ground/excited noise never
    touches it: its verdict is time independent. A negative witness
    certifies the state distillable at every finite time (it never loses
    distillability under this noise). Raises ZeroTraceError when the
    corner is empty.
    """
    if state.dims != QUTRIT_PAIR:
        raise ValueError(f"probe is defined on dims (3, 3), got {state.dims}")
    idx = [state.dims.flat(a, b) for a in (1, 2) for b in (1, 2)]
    weight = float(sum(state.mat[i, i].real for i in idx))
    sub = project_local(state, (1, 2), (1, 2), renormalize=True)
    return _probe_verdict(sub, weight)


def mc_state(spec: McSpec) -> DensityMatrix:
    """Lift a coefficient matrix to the maximally correlated state."""
    d = Dims(spec.d, spec.d)
    m = np.zeros((d.n, d.n), dtype=complex)
    for i in range(spec.d):
        for j in range(spec.d):
            m[d.flat(i, i), d.flat(j, j)] = spec.a[i, j]
    return make_state(d, m)


def mc_report(spec: McSpec, noise: NoiseParams) -> McReport:
    """Evolve a maximally correlated state and check the claims about it.

    Under general dephasing the |ii><jj| support pattern is preserved
    exactly (off-diagonal coefficients damp by exp(-(rate_a+rate_b)*t),
    never to zero at finite t), the state is entangled iff some
    off-diagonal coefficient is nonzero, and any nonzero a_ij makes the
    {i,j}x{i,j} two-qubit witness negative, certifying distillability.
    """
    rho = mc_state(spec)
    evolved = general_dephase(rho, noise)
    d = evolved.dims
    mask = np.zeros((d.n, d.n), dtype=bool)
    for i in range(spec.d):
        for j in range(spec.d):
            mask[d.flat(i, i), d.flat(j, j)] = True
    deviation = float(np.max(np.abs(np.where(mask, 0.0, evolved.mat))))
    off = np.abs(spec.a - np.diag(np.diag(spec.a)))
    entangled = bool(np.max(off) > 1e-14)
    if not entangled:
        return McReport(deviation <= 1e-12, deviation, False, False, None, None)
    i, j = np.unravel_index(int(np.argmax(off)), off.shape)
    labels = (int(min(i, j)), int(max(i, j)))
    sub = project_local(evolved, labels, labels, renormalize=True)
    witness = min_pt_eigenvalue(sub)
    return McReport(
        deviation <= 1e-12,
        deviation,
        True,
        witness < -TOL.verdict,
        witness,
        labels,
    )


def mc_projection(
    state: DensityMatrix, a_labels: tuple[int, int], b_labels: tuple[int, int]
) -> Optional[McSpec]:
    """Read off a maximally correlated state from a two-qubit projection.

    Projects onto the labels (|i><i| + |j><j|) x (|m><m| + |n><n|) and
    renormalizes. Returns the 2x2 coefficient matrix when the projection
    has support exactly on the maximally correlated positions (both
    cross populations and all other coherences below 1e-12) with a
    nonzero off-diagonal; such a finding certifies the parent state
    distillable at every finite time under general dephasing. Returns
    None otherwise - including for states whose projection merely
    contains a coherence among extra populations, where that certificate
    would be unsound. Raises ZeroTraceError on an empty projection.
    """
    sub = project_local(state, tuple(a_labels), tuple(b_labels), renormalize=True)
    d = sub.dims
    keep = (d.flat(0, 0), d.flat(1, 1))
    mask = np.zeros((4, 4), dtype=bool)
    for i in keep:
        for j in keep:
            mask[i, j] = True
    deviation = float(np.max(np.abs(np.where(mask, 0.0, sub.mat))))
    if deviation > 1e-12:
        return None
    a = np.array([[sub.mat[keep[0], keep[0]], sub.mat[keep[0], keep[1]]],
                  [sub.mat[keep[1], keep[0]], sub.mat[keep[1], keep[1]]]])
    if abs(a[0, 1]) <= 1e-12:
        return None
    return McSpec(2, a / np.trace(a).real)


def limit_verdict(state: DensityMatrix) -> LimitVerdict:
    """Classify the infinite-time limit: separable or still distillable.

    The limit is block diagonal across the ground/excited sectors; every
    term except the doublet-doublet corner is manifestly separable, and
    the corner lives on a 2x2 support where PPT decides separability
    outright. A PPT-entangled limit is impossible, so the verdict is
    always one of the two.
    """
    lim = infinite_limit(state)
    try:
        probe = two_sided_probe(lim)
    except ZeroTraceError:
        return LimitVerdict.SEPARABLE_LIMIT
    return LimitVerdict.DISTILLABLE_LIMIT if probe.entangled else LimitVerdict.SEPARABLE_LIMIT


def certificate_blocks() -> tuple[BlockSpec, BlockSpec, BlockSpec]:
    """The three-block separability certificate tuned to this family.

    Each evolved coherence gets one two-qubit block; the three diagonal
    entries shared by two blocks (|01>, |10>, |22>) are split half and
    half, every other diagonal entry goes wholly to its block, and the
    residual is exactly zero. With these weights the certificate first
    passes at t = max(2*ln2, ppt_onset_time) / gamma_rate.
    """
    d = QUTRIT_PAIR
    i01, i10, i22 = d.flat(0, 1), d.flat(1, 0), d.flat(2, 2)
    i00, i11 = d.flat(0, 0), d.flat(1, 1)
    i02, i21 = d.flat(0, 2), d.flat(2, 1)
    i12, i20 = d.flat(1, 2), d.flat(2, 0)
    return (
        BlockSpec((0, 1), (0, 1), {i01: 0.5, i10: 0.5, i00: 1.0, i11: 1.0}),
        BlockSpec((0, 2), (1, 2), {i01: 0.5, i22: 0.5, i02: 1.0, i21: 1.0}),
        BlockSpec((1, 2), (0, 2), {i10: 0.5, i22: 0.5, i12: 1.0, i20: 1.0}),
    )


def certificate_onset_time(alpha: float, gamma_rate: float) -> float:
    """First time the three-block certificate passes, in closed form.

    max(2*ln2, ln(4 / (alpha*(5 - alpha)))) / gamma_rate: the doublet
    blocks become PSD once the single-side retention drops to 1/2, and
    become PPT at the family's PPT onset. Infinite at alpha = 5. This is
    a property of the equal-split weights above, verified against a
    direct scan by the test suite, not an independent fact.
    """
    alpha = _check_alpha(alpha)
    gamma_rate = _check_rate(gamma_rate)
    if alpha == 5.0:
        return math.inf
    return max(2.0 * math.log(2.0), math.log(4.0 / (alpha * (5.0 - alpha)))) / gamma_rate
