"""Entanglement and distillability classifiers.

The verdict lattice is built from two witnesses and one certificate:

* partial-transpose spectrum: a negative eigenvalue (NPT) witnesses free,
  distillable entanglement on the families treated here;
* realignment trace norm: an excess above 1 witnesses entanglement even
  for some PPT states (bound entanglement);
* block decomposition certificate: a sound, incomplete separability proof
  by decomposing the state into PPT two-qubit blocks plus a diagonal
  remainder.

States that are PPT, below the realignment threshold and not certified
stay PptUndetermined; the classifiers never guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .linalg import TOL, eigvals_hermitian, singular_values, sqrt_psd
from .qstate import BadShapeError, DensityMatrix, Dims, partial_transpose, project_local, realign


class CoverageError(ValueError):
    """A coherence of the state lies in no certificate block, or in two."""


class NoBracketError(ValueError):
    """Scalar function has the same sign at both bracket ends."""


class BudgetExceededError(RuntimeError):
    """Bisection failed to reach tolerance within the iteration budget."""


class Verdict(str, Enum):
    NPT_FREE_ENTANGLED = "NptFreeEntangled"
    PPT_BOUND_ENTANGLED = "PptBoundEntangled"
    PPT_UNDETERMINED = "PptUndetermined"
    SEPARABLE_CERTIFIED = "SeparableCertified"


@dataclass(frozen=True)
class Classification:
    """Verdict plus the witness values it was based on.

    certificate_passed is None when no certificate was evaluated (either
    no blocks were supplied or an earlier witness already decided).
    """

    verdict: Verdict
    min_pt_eigenvalue: float
    realignment_excess: float
    certificate_passed: Optional[bool]


@dataclass(frozen=True)
class BlockSpec:
    """One two-qubit block of a separability certificate.

    a_labels and b_labels pick two local basis labels per side; the block
    keeps the coherences among the four selected composite states at full
    magnitude and takes the fraction diag_weights[flat_index] of each
    selected diagonal entry (default 1). Fractions let several blocks
    share one diagonal entry while their sum stays a valid decomposition.
    """

    a_labels: tuple[int, int]
    b_labels: tuple[int, int]
    diag_weights: Mapping[int, float]

    def __post_init__(self) -> None:
        for pair, side in ((self.a_labels, "a"), (self.b_labels, "b")):
            if len(pair) != 2 or pair[0] == pair[1] or any(x < 0 for x in pair):
                raise ValueError(f"{side}_labels must be two distinct nonnegative labels, got {pair}")
        for idx, w in self.diag_weights.items():
            if not 0 < w <= 1:
                raise ValueError(f"diagonal weight for index {idx} must be in (0, 1], got {w}")

    def flat_indices(self, dims: Dims) -> list[int]:
        """Composite indices of the four selected basis states."""
        return [dims.flat(a, b) for a in self.a_labels for b in self.b_labels]


@dataclass(frozen=True)
class BlockDiagnostic:
    """Per-block outcome of a certificate evaluation."""

    a_labels: tuple[int, int]
    b_labels: tuple[int, int]
    min_eigenvalue: float
    min_pt_eigenvalue: float

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= TOL.psd_floor

    @property
    def ppt(self) -> bool:
        return self.min_pt_eigenvalue >= TOL.psd_floor


@dataclass(frozen=True)
class CertificateResult:
    """Certificate outcome with the evidence that produced it."""

    passed: bool
    blocks: tuple[BlockDiagnostic, ...]
    residual_diagonal_min: float
    residual_offdiagonal_max: float


def min_pt_eigenvalue(state: DensityMatrix) -> float:
    """Smallest eigenvalue of the side-B partial transpose."""
    return float(eigvals_hermitian(partial_transpose(state, "B"))[0])


def realignment_excess(state: DensityMatrix) -> float:
    """Trace norm of the realigned matrix minus 1.

    Positive excess witnesses entanglement; separable states are always
    at or below zero.
    """
    return float(np.sum(singular_values(realign(state)))) - 1.0


def qubit_block_witness(
    state: DensityMatrix, a_labels: Sequence[int], b_labels: Sequence[int]
) -> float:
    """Minimum PT eigenvalue of the normalized two-qubit projection.

    A negative value is conclusive both ways on the projected 2x2 block
    (NPT there means entangled and distillable) and lifts to the parent:
    a local projection of a PPT state is PPT, so a negative witness
    certifies the parent state distillable. Raises ZeroTraceError when
    the projection carries no weight.
    """
    sub = project_local(state, tuple(a_labels), tuple(b_labels), renormalize=True)
    return min_pt_eigenvalue(sub)


def separability_certificate(
    state: DensityMatrix, blocks: Sequence[BlockSpec]
) -> CertificateResult:
    """Try to certify separability by a block decomposition.

    Builds one padded matrix per block: coherences among its four
    composite states at full magnitude, diagonals scaled by the block's
    weights. The certificate passes when every block is PSD and PPT as a
    2x2-by-2x2 state and the residual (state minus all embedded blocks)
    is diagonal with nonnegative entries; each block is then separable
    (PPT is sufficient at these dimensions) and the residual is a mixture
    of product basis states, so passing proves the state separable.
    Failing proves nothing.

    Raises CoverageError when an off-diagonal entry of the state lies in
    no block or in more than one, or when the diagonal weights allocated
    to one entry exceed 1.
    """
    n = state.dims.n
    m = state.mat
    coherence_cover = np.zeros((n, n), dtype=int)
    diag_alloc = np.zeros(n)
    embedded = np.zeros_like(m)
    diagnostics = []
    for block in blocks:
        idx = block.flat_indices(state.dims)
        padded = m[np.ix_(idx, idx)].copy()
        for r, i in enumerate(idx):
            weight = float(block.diag_weights.get(i, 1.0))
            padded[r, r] = weight * m[i, i]
            diag_alloc[i] += weight
            for j in idx:
                if j != i:
                    coherence_cover[i, j] += 1
        embedded[np.ix_(idx, idx)] += padded
        carrier = DensityMatrix(padded, Dims(2, 2))
        w_min = float(eigvals_hermitian((padded + padded.conj().T) / 2)[0])
        pt_min = float(eigvals_hermitian(partial_transpose(carrier, "B"))[0])
        diagnostics.append(
            BlockDiagnostic(tuple(block.a_labels), tuple(block.b_labels), w_min, pt_min)
        )
    off = ~np.eye(n, dtype=bool)
    uncovered = (np.abs(m) > 1e-14) & off & (coherence_cover == 0)
    double = off & (coherence_cover > 1) & (np.abs(m) > 1e-14)
    if np.any(uncovered):
        i, j = np.argwhere(uncovered)[0]
        raise CoverageError(f"coherence at ({i}, {j}) lies in no block")
    if np.any(double):
        i, j = np.argwhere(double)[0]
        raise CoverageError(f"coherence at ({i}, {j}) lies in more than one block")
    if np.any(diag_alloc > 1 + 1e-12):
        i = int(np.argmax(diag_alloc))
        raise CoverageError(f"diagonal entry {i} allocated weight {diag_alloc[i]:.6f} > 1")
    residual = m - embedded
    res_off = float(np.max(np.abs(residual[off]))) if n > 1 else 0.0
    res_diag = float(np.min(residual.diagonal().real))
    passed = (
        all(b.psd and b.ppt for b in diagnostics)
        and res_off <= 1e-12
        and res_diag >= TOL.psd_floor
    )
    return CertificateResult(passed, tuple(diagnostics), res_diag, res_off)


def classify(
    state: DensityMatrix, cert_blocks: Optional[Sequence[BlockSpec]] = None
) -> Classification:
    """Full verdict: NPT beats realignment beats certificate.

    NptFreeEntangled when the PT spectrum dips below -TOL.verdict;
    otherwise PptBoundEntangled when the realignment excess exceeds
    TOL.verdict; otherwise SeparableCertified if the supplied blocks
    certify, and PptUndetermined when they do not or none were given.
    """
    pt_min = min_pt_eigenvalue(state)
    excess = realignment_excess(state)
    if pt_min < -TOL.verdict:
        return Classification(Verdict.NPT_FREE_ENTANGLED, pt_min, excess, None)
    if excess > TOL.verdict:
        return Classification(Verdict.PPT_BOUND_ENTANGLED, pt_min, excess, None)
    if cert_blocks is None:
        return Classification(Verdict.PPT_UNDETERMINED, pt_min, excess, None)
    passed = separability_certificate(state, cert_blocks).passed
    verdict = Verdict.SEPARABLE_CERTIFIED if passed else Verdict.PPT_UNDETERMINED
    return Classification(verdict, pt_min, excess, passed)


def bures_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann-Bures fidelity [tr sqrt(sqrt(rho) sigma sqrt(rho))]^2.

    Evaluated as the squared trace norm of sqrt(rho) @ sqrt(sigma), which
    is the same quantity with far less rounding amplification near zero
    eigenvalues. Symmetric; 1 exactly when the states coincide.
    """
    if rho.dims != sigma.dims:
        raise BadShapeError(f"dims {rho.dims} and {sigma.dims} do not match")
    cross = sqrt_psd(rho.mat) @ sqrt_psd(sigma.mat)
    root_sum = float(np.sum(singular_values(cross)))
    return min(max(root_sum ** 2, 0.0), 1.0)


def find_sign_change(
    f: Callable[[float], float],
    t_lo: float,
    t_hi: float,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> float:
    """Bisection root of a scalar function bracketed by [t_lo, t_hi].

    Requires a sign change across the bracket (NoBracketError otherwise);
    an endpoint evaluating to exactly zero is returned as the root.
    Raises BudgetExceededError when max_iter halvings cannot shrink the
    bracket to tol.
    """
    f_lo = f(t_lo)
    f_hi = f(t_hi)
    if f_lo == 0.0:
        return t_lo
    if f_hi == 0.0:
        return t_hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoBracketError(f"f({t_lo}) = {f_lo:.3e} and f({t_hi}) = {f_hi:.3e} share a sign")
    for _ in range(max_iter):
        if t_hi - t_lo <= tol:
            return (t_lo + t_hi) / 2
        mid = (t_lo + t_hi) / 2
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_hi > 0):
            t_hi, f_hi = mid, f_mid
        else:
            t_lo, f_lo = mid, f_mid
    raise BudgetExceededError(f"bracket still {t_hi - t_lo:.3e} wide after {max_iter} iterations")
