"""Local dephasing channels and their exact infinite-time limit.

Two noise models act here. The ground/excited model dephases each qutrit
between its ground level |0> and the excited doublet {|1>, |2>}: a
coherence picks up one factor exp(-rate*t/2) for every side on which
exactly one of its labels is the ground level, and coherences inside the
excited doublet survive untouched. The general model dephases between all
local basis states, damping every off-diagonal pair uniformly. Both are
completely positive, trace preserving, and form semigroups in t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import BadShapeError, DensityMatrix, Dims, make_state, tensor


class IncompleteKrausError(ValueError):
    """Kraus family does not sum to the identity within tolerance."""


@dataclass(frozen=True)
class NoiseParams:
    """Dephasing rates (inverse time) for each side and an evolution time.

    gamma_a / gamma_b are the surviving coherence factors exp(-rate*t/2);
    omega_a / omega_b are the complementary branch amplitudes.
    """

    gamma_rate_a: float
    gamma_rate_b: float
    t: float

    def __post_init__(self) -> None:
        for name in ("gamma_rate_a", "gamma_rate_b", "t"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")

    @property
    def gamma_a(self) -> float:
        return math.exp(-self.gamma_rate_a * self.t / 2)

    @property
    def gamma_b(self) -> float:
        return math.exp(-self.gamma_rate_b * self.t / 2)

    @property
    def omega_a(self) -> float:
        return math.sqrt(1.0 - self.gamma_a ** 2)

    @property
    def omega_b(self) -> float:
        return math.sqrt(1.0 - self.gamma_b ** 2)


@dataclass(frozen=True)
class KrausSet:
    """A trace-preserving Kraus family on a fixed bipartite dimension."""

    ops: tuple
    dims: Dims

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(k, dtype=complex) for k in self.ops)
        n = self.dims.n
        for k in ops:
            if k.shape != (n, n):
                raise BadShapeError(f"Kraus operator shape {k.shape}, expected {(n, n)}")
            k.setflags(write=False)
        total = sum(k.conj().T @ k for k in ops)
        if float(np.max(np.abs(total - np.eye(n)))) > 1e-12:
            raise IncompleteKrausError("sum of K†K deviates from the identity beyond 1e-12")
        object.__setattr__(self, "ops", ops)


def local_pair(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """The two single-qutrit factors of the ground/excited dephasing.

    Given the coherence retention gamma = exp(-rate*t/2), returns
    (diag(1, gamma, gamma), diag(0, omega, omega)) with
    omega = sqrt(1 - gamma^2). The first keeps the ground level, the
    second is the branch in which it was erased.
    """
    omega = math.sqrt(1.0 - gamma ** 2)
    return np.diag([1.0, gamma, gamma]).astype(complex), np.diag([0.0, omega, omega]).astype(complex)


def kraus_ground_excited(p: NoiseParams) -> KrausSet:
    """Qutrit-qutrit ground/excited dephasing as four Kraus operators.

    The operators are the products (B-side factor) @ (A-side factor) of
    the local_pair factors on each side; all are real diagonal, so the
    two operator orderings and the two completeness conventions coincide.
    """
    ident = np.eye(3, dtype=complex)
    e_ops = [tensor(k, ident) for k in local_pair(p.gamma_a)]
    d_ops = [tensor(ident, k) for k in local_pair(p.gamma_b)]
    ops = tuple(d @ e for d in d_ops for e in e_ops)
    return KrausSet(ops, Dims(3, 3))


def apply_channel(state: DensityMatrix, ks: KrausSet) -> DensityMatrix:
    """Apply sum_mu K_mu rho K_mu† and revalidate the result."""
    if state.dims != ks.dims:
        raise BadShapeError(f"state dims {state.dims} do not match Kraus dims {ks.dims}")
    out = np.zeros_like(state.mat)
    for k in ks.ops:
        out = out + k @ state.mat @ k.conj().T
    return make_state(state.dims, out)


def general_dephase(state: DensityMatrix, p: NoiseParams) -> DensityMatrix:
    """Dephase between all local basis states on each side.

    Every coherence rho((i,k),(j,l)) is multiplied by
    exp(-rate_a*t*[i != j]) * exp(-rate_b*t*[k != l]); diagonal entries
    are untouched. Equivalent per subsystem to the mixture
    (1-p)*sigma + p*diag(sigma) with p = 1 - exp(-rate*t).
    """
    d = state.dims
    fa = math.exp(-p.gamma_rate_a * p.t)
    fb = math.exp(-p.gamma_rate_b * p.t)
    damp_a = np.full((d.da, d.da), fa)
    np.fill_diagonal(damp_a, 1.0)
    damp_b = np.full((d.db, d.db), fb)
    np.fill_diagonal(damp_b, 1.0)
    return make_state(d, state.mat * np.kron(damp_a, damp_b))


def infinite_limit(state: DensityMatrix) -> DensityMatrix:
    """Exact fixed point the ground/excited channel reaches as t grows.

    Only entries whose labels sit in the same sector ({0} or {1, 2}) on
    both sides survive: the |00> population, the two single-side
    ground-times-doublet blocks, and the whole doublet-doublet corner.
    Computed algebraically from the input, no large-t evolution involved.
    """
    d = state.dims
    if (d.da, d.db) != (3, 3):
        raise BadShapeError(f"ground/excited limit is defined on dims (3, 3), got {d}")
    m = state.mat
    out = np.zeros_like(m)
    out[0, 0] = m[0, 0]
    for b in (1, 2):
        for b2 in (1, 2):
            out[d.flat(0, b), d.flat(0, b2)] = m[d.flat(0, b), d.flat(0, b2)]
    for a in (1, 2):
        for a2 in (1, 2):
            out[d.flat(a, 0), d.flat(a2, 0)] = m[d.flat(a, 0), d.flat(a2, 0)]
    corner = [d.flat(a, b) for a in (1, 2) for b in (1, 2)]
    out[np.ix_(corner, corner)] = m[np.ix_(corner, corner)]
    return make_state(d, out)
