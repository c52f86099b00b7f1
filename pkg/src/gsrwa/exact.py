"""Reference diagonalization in a truncated Fock x qubit basis.

Basis states are ``|n, s>`` with ``s = +z`` (index 0) or ``-z`` (index 1),
stored at position ``2 n + s`` so that the Hamiltonian is banded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError, TruncationError
from .transform import ModelParams

MIN_PHYSICAL_CUTOFF = 10
CUTOFF_START = 20
CUTOFF_CEILING = 640


@dataclass(frozen=True)
class TruncatedBasis:
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def index(self, n: int, spin_down: bool) -> int:
        return 2 * n + int(spin_down)


@dataclass
class SpectrumResult:
    n_max: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    photon_number: float
    qubit_entropy: float
    parities: np.ndarray
    converged: bool = True


def _ladder(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)


def build_hamiltonian(p: ModelParams, basis: TruncatedBasis) -> np.ndarray:
    """Dense real-symmetric Hamiltonian matrix.

    ``i sy = [[0, 1], [-1, 0]]`` is real in the ``sz`` basis and ``a^dag - a`` is
    real antisymmetric, so their product is real symmetric.
    """
    a = _ladder(basis.n_max)
    fock_eye = np.eye(basis.n_max + 1)
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    isy = np.array([[0.0, 1.0], [-1.0, 0.0]])
    h = 0.5 * p.delta * np.kron(fock_eye, sz)
    h += p.omega * np.kron(np.diag(np.arange(basis.n_max + 1, dtype=float)), np.eye(2))
    h += p.alpha * np.kron(a + a.T, sx)
    h += p.gamma * np.kron(a.T - a, isy)
    # exact symmetry; float sums above are already symmetric but make it explicit
    return 0.5 * (h + h.T)


def parity_diagonal(dim: int) -> np.ndarray:
    """Diagonal of ``sz (-1)^{a^dag a}`` in the interleaved basis."""
    idx = np.arange(dim)
    return np.where((idx // 2) % 2 == 0, 1.0, -1.0) * np.where(idx % 2 == 0, 1.0, -1.0)


def photon_number(vec: np.ndarray) -> float:
    amp = vec.reshape(-1, 2)
    n = np.arange(amp.shape[0])
    return float(n @ np.sum(amp * amp, axis=1))


def qubit_density_matrix(vec: np.ndarray) -> np.ndarray:
    amp = vec.reshape(-1, 2)
    return amp.T @ amp


def binary_entropy(probs) -> float:
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)
    probs = probs[probs > 0]
    return float(min(1.0, max(0.0, -np.sum(probs * np.log2(probs)))))


def qubit_entropy(vec: np.ndarray) -> float:
    return binary_entropy(np.linalg.eigvalsh(qubit_density_matrix(vec)))


def _rotate_degenerate(values, vectors, scale, parity):
    """Rotate near-degenerate eigenvector clusters into parity eigenstates."""
    tol = 1e-9 * max(scale, 1.0)
    i = 0
    k = len(values)
    while i < k:
        j = i + 1
        while j < k and values[j] - values[j - 1] <= tol:
            j += 1
        if j - i > 1:
            block = vectors[:, i:j]
            pmat = block.T @ (parity[:, None] * block)
            pvals, rot = np.linalg.eigh(pmat)
            order = np.argsort(-pvals, kind="stable")
            vectors[:, i:j] = block @ rot[:, order]
        i = j
    return vectors


def lowest_eigenpairs(h: np.ndarray, k: int) -> SpectrumResult:
    """Lowest ``k`` eigenpairs of a symmetric matrix in the interleaved basis."""
    dim = h.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"k must lie in [1, {dim}], got {k}")
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver failed: {exc}") from exc
    norm = float(max(abs(values[0]), abs(values[-1])))
    values = values[:k].copy()
    vectors = vectors[:, :k].copy()
    parity = parity_diagonal(dim) if dim % 2 == 0 else np.ones(dim)
    vectors = _rotate_degenerate(values, vectors, norm, parity)
    # fix a deterministic sign: largest-magnitude component positive
    for c in range(k):
        pivot = np.argmax(np.abs(vectors[:, c]))
        if vectors[pivot, c] < 0:
            vectors[:, c] *= -1.0
    residual = np.linalg.norm(h @ vectors - vectors * values, axis=0)
    converged = bool(np.all(residual <= 1e-9 * max(norm, 1.0)))
    ground = vectors[:, 0]
    if dim % 2 == 0:
        nph, ent = photon_number(ground), qubit_entropy(ground)
    else:
        nph, ent = float("nan"), float("nan")
    return SpectrumResult(
        n_max=dim // 2 - 1,
        eigenvalues=values,
        eigenvectors=vectors,
        photon_number=nph,
        qubit_entropy=ent,
        parities=np.einsum("ik,i,ik->k", vectors, parity, vectors),
        converged=converged,
    )


def exact_observables(p: ModelParams, n_max: int, k: int = 4) -> SpectrumResult:
    if n_max < MIN_PHYSICAL_CUTOFF:
        raise ValueError(f"n_max must be >= {MIN_PHYSICAL_CUTOFF}, got {n_max}")
    result = lowest_eigenpairs(build_hamiltonian(p, TruncatedBasis(n_max)), k)
    if not result.converged:
        raise NumericalError(f"eigenpair residual check failed at n_max={n_max}")
    return result


def converge_truncation(p: ModelParams, tol: float = 1e-8, ceiling: int = CUTOFF_CEILING):
    """Double the cutoff from 20 until the two lowest levels are stable to ``tol``.

    Returns ``(n_star, result)`` where ``result`` was computed at ``n_star``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = CUTOFF_START
    cur = exact_observables(p, n)
    while 2 * n <= ceiling:
        nxt = exact_observables(p, 2 * n)
        if np.all(np.abs(cur.eigenvalues[:2] - nxt.eigenvalues[:2]) <= tol):
            return n, cur
        n, cur = 2 * n, nxt
    raise TruncationError(f"no convergence to {tol:g} below n_max = {ceiling}")


def parity_sector_ground(p: ModelParams, n_max: int) -> dict[int, float]:
    """Lowest energy in each parity sector ``{+1: E, -1: E}``."""
    h = build_hamiltonian(p, TruncatedBasis(n_max))
    par = parity_diagonal(h.shape[0])
    out = {}
    for sign in (1, -1):
        idx = np.flatnonzero(par == sign)
        out[sign] = float(np.linalg.eigvalsh(h[np.ix_(idx, idx)])[0])
    return out


def exact_gap_minimum(
    template: ModelParams,
    ratio: float,
    g1_range: tuple[float, float],
    n_max: int | None = None,
    grid_step: float = 0.01,
    xtol: float = 1e-9,
) -> float:
    """Location of the first closing of the gap between the two lowest levels.

    The two levels belong to opposite parity sectors, so the gap minimum is the
    sign change of their difference; it is located on a grid and bisected.
    """
    lo, hi = g1_range
    if n_max is None:
        n_max, _ = converge_truncation(ModelParams.from_ratio(template.omega, template.delta, hi, ratio))
        n_max = max(2 * n_max, 60)

    def split(g1):
        e = parity_sector_ground(ModelParams.from_ratio(template.omega, template.delta, g1, ratio), n_max)
        return e[1] - e[-1]

    grid = np.linspace(lo, hi, max(2, int(round((hi - lo) / grid_step)) + 1))
    values = [split(g) for g in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if fa == 0.0:
            return float(a)
        if np.sign(fa) != np.sign(fb):
            while b - a > xtol:
                mid = 0.5 * (a + b)
                fm = split(mid)
                if np.sign(fm) == np.sign(fa):
                    a, fa = mid, fm
                else:
                    b = mid
            return float(0.5 * (a + b))
    # no crossing: report the smallest gap on the grid
    gaps = [abs(v) for v in values]
    return float(grid[int(np.argmin(gaps))])
