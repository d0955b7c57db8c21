"""Shared fixtures and independent oracles.

The reshuffle and fidelity oracles here are written as explicit index
loops or textbook formulas on purpose: they give every vectorized
implementation a second, independently derived route to agree with.
"""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from dephaselab.linalg import eigvals_hermitian, sqrt_psd
from dephaselab.qstate import DensityMatrix, Dims, make_state

QUTRIT_PAIR = Dims(3, 3)
GOLDEN_DIR = Path(__file__).parent / "golden"


def run_cli(*args: str) -> subprocess.CompletedProcess:
    """Run the CLI in a subprocess, capturing stdout/stderr as bytes."""
    return subprocess.run(
        [sys.executable, "-m", "dephaselab", *args],
        capture_output=True,
        check=False,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260816)


def random_factor(rng: np.random.Generator, d: int) -> np.ndarray:
    """Single-system full-rank density matrix, G G† / trace."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_product_state(rng: np.random.Generator, dims: Dims) -> DensityMatrix:
    """sigma_a (x) sigma_b with independent random factors."""
    return make_state(dims, np.kron(random_factor(rng, dims.da), random_factor(rng, dims.db)))


def random_separable_mixture(
    rng: np.random.Generator, dims: Dims, components: int = 4
) -> DensityMatrix:
    """sum_k p_k sigma_a^k (x) sigma_b^k with Dirichlet mixing weights."""
    weights = rng.dirichlet(np.ones(components))
    m = sum(
        w * np.kron(random_factor(rng, dims.da), random_factor(rng, dims.db))
        for w in weights
    )
    return make_state(dims, m)


def pt_by_loops(state: DensityMatrix, side: str = "B") -> np.ndarray:
    """Partial transpose via explicit four-index loops."""
    d = state.dims
    out = np.zeros_like(state.mat)
    for a in range(d.da):
        for b in range(d.db):
            for a2 in range(d.da):
                for b2 in range(d.db):
                    if side == "B":
                        out[d.flat(a, b), d.flat(a2, b2)] = state.mat[d.flat(a, b2), d.flat(a2, b)]
                    else:
                        out[d.flat(a, b), d.flat(a2, b2)] = state.mat[d.flat(a2, b), d.flat(a, b2)]
    return out


def realign_by_loops(state: DensityMatrix) -> np.ndarray:
    """Realignment via explicit loops: out[(a,a'),(b,b')] = rho[(a,b),(a',b')]."""
    d = state.dims
    out = np.zeros((d.da * d.da, d.db * d.db), dtype=complex)
    for a in range(d.da):
        for a2 in range(d.da):
            for b in range(d.db):
                for b2 in range(d.db):
                    out[a * d.da + a2, b * d.db + b2] = state.mat[d.flat(a, b), d.flat(a2, b2)]
    return out


def bures_by_eigh(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Textbook fidelity route: eigenvalues of sqrt(rho) sigma sqrt(rho).

    Less accurate than the trace-norm route near zero eigenvalues (about
    1e-8 on rank-deficient inputs), which is exactly why it serves as the
    independent cross-check rather than the implementation.
    """
    r = sqrt_psd(rho.mat)
    inner = r @ sigma.mat @ r
    w = eigvals_hermitian((inner + inner.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
