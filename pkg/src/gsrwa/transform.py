"""Displaced-squeezed frame of the anisotropic Rabi model.

The model is

    H = (delta/2) sz + omega a^dag a + alpha (a^dag + a) sx + gamma (a^dag - a) i sy

with ``alpha = (g1 + g2)/2`` and ``gamma = (g2 - g1)/2``.  After the
displacement ``exp[beta sx (a^dag - a)]`` and the squeezing
``exp[lam (a^2 - a^dag^2)]`` the Hamiltonian is reduced to a sum of
independent 2x2 blocks spanned by ``|n, +z>`` and ``|n+1, -z>``.  This
module holds the block entries and the Laguerre-polynomial matrix elements
they are assembled from.

All coefficient functions take the displacement ``beta`` together with the
frame factor ``eta = exp(-2 lam)`` so that the same code serves any frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import SqueezingOverflowError

#: Largest admissible ``|lambda|``; sinh(4 * 5) is ~2.4e8, far above any optimum.
LAMBDA_CAP = 5.0


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of the (an)isotropic Rabi model.

    Parameters
    ----------
    omega : float
        Oscillator frequency (energy unit).
    delta : float
        Qubit transition frequency.
    g1, g2 : float
        Rotating and counter-rotating coupling strengths.
    """

    omega: float
    delta: float
    g1: float
    g2: float

    def __post_init__(self):
        for name in ("omega", "delta", "g1", "g2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.delta < 0 or self.g1 < 0 or self.g2 < 0:
            raise ValueError("delta, g1 and g2 must be non-negative")

    @property
    def alpha(self) -> float:
        return 0.5 * (self.g1 + self.g2)

    @property
    def gamma(self) -> float:
        return 0.5 * (self.g2 - self.g1)

    @property
    def isotropic(self) -> bool:
        return self.g1 == self.g2

    @classmethod
    def from_ratio(cls, omega: float, delta: float, g1: float, ratio: float) -> "ModelParams":
        """Build parameters with ``g2 = ratio * g1``."""
        return cls(omega, delta, g1, ratio * g1)


@dataclass(frozen=True)
class VariationalParams:
    """Dimensionless displacement ``beta`` and squeezing ``lam``."""

    beta: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and math.isfinite(self.lam)):
            raise ValueError(f"variational parameters must be finite: {self}")
        check_lambda(self.lam)


def check_lambda(lam: float) -> None:
    if abs(lam) > LAMBDA_CAP:
        raise SqueezingOverflowError(
            f"|lambda| = {abs(lam):g} exceeds LAMBDA_CAP = {LAMBDA_CAP:g}"
        )


@dataclass(frozen=True)
class EtaSet:
    """Coefficients of the displaced-squeezed Hamiltonian.

    ``eta0`` is the constant shift, ``eta1`` the renormalized photon energy,
    ``eta2`` the quadrature stretch ``exp(2 lam)``, ``eta`` the inverse stretch
    ``exp(-2 lam)`` and ``chi = exp(-2 beta^2 eta^2)`` the vacuum overlap factor.
    """

    eta0: float
    eta1: float
    eta2: float
    eta: float
    chi: float


@dataclass(frozen=True)
class RwaBlock:
    """Symmetric 2x2 block on ``|n, +z>, |n+1, -z>``."""

    n: int
    d_upper: float
    d_lower: float
    offdiag: float


def laguerre(n: int, k: int, x: float) -> float:
    """Generalized Laguerre polynomial ``L_n^k(x)`` by upward recurrence in ``n``."""
    if n < 0 or k < 0:
        raise ValueError(f"laguerre requires n, k >= 0 (got n={n}, k={k})")
    prev = 1.0
    if n == 0:
        return prev
    cur = 1.0 + k - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 + k - x) * cur - (m + k) * prev) / (m + 1)
    return cur


def eta_set(p: ModelParams, v: VariationalParams) -> EtaSet:
    check_lambda(v.lam)
    s = math.sinh(2 * v.lam)
    eta = math.exp(-2 * v.lam)
    return EtaSet(
        eta0=p.omega * s * s + p.omega * v.beta**2 - 2 * v.beta * p.alpha,
        eta1=p.omega * math.cosh(4 * v.lam),
        eta2=math.exp(2 * v.lam),
        eta=eta,
        chi=math.exp(-2 * v.beta**2 * eta**2),
    )


def _arg(beta: float, eta: float) -> tuple[float, float]:
    x = 4 * beta * beta * eta * eta
    return x, math.exp(-0.5 * x)


def coeff_G_diag(n: int, beta: float, eta: float) -> float:
    """``<n| cosh[2 beta eta (a^dag - a)] |n>``."""
    x, chi = _arg(beta, eta)
    return chi * laguerre(n, 0, x)


def coeff_G_skip(n: int, beta: float, eta: float) -> float:
    """``<n+2| cosh[2 beta eta (a^dag - a)] |n>``."""
    x, chi = _arg(beta, eta)
    return x * chi * laguerre(n, 2, x) / math.sqrt((n + 1) * (n + 2))


def coeff_R(n: int, beta: float, eta: float) -> float:
    """``<n+1| sinh[2 beta eta (a^dag - a)] |n> / sqrt(n+1)``."""
    x, chi = _arg(beta, eta)
    return 2 * beta * eta * chi * laguerre(n, 1, x) / (n + 1)


def coeff_F(n: int, beta: float, eta: float) -> float:
    """``<n| (a^dag - a) sinh[2 beta eta (a^dag - a)] |n>``.

    Inserting the one-photon ladder gives ``-n R_{n,n-1} - (n+1) R_{n+1,n}``;
    the lower term is absent for ``n = 0``.
    """
    value = -(n + 1) * coeff_R(n, beta, eta)
    if n > 0:
        value -= n * coeff_R(n - 1, beta, eta)
    return value


def coeff_T(n: int, beta: float, eta: float) -> float:
    """``<n+1| (a^dag - a) cosh[2 beta eta (a^dag - a)] |n> / sqrt(n+1)``."""
    return coeff_G_diag(n, beta, eta) - math.sqrt((n + 2) / (n + 1)) * coeff_G_skip(n, beta, eta)


def diag_shift_f(n: int, p: ModelParams, v: VariationalParams) -> float:
    """Qubit-dependent diagonal shift ``f(n) = delta/2 G_nn - gamma eta F_nn``."""
    eta = math.exp(-2 * v.lam)
    return 0.5 * p.delta * coeff_G_diag(n, v.beta, eta) - p.gamma * eta * coeff_F(n, v.beta, eta)


def offdiag_P(n: int, p: ModelParams, v: VariationalParams) -> float:
    """Renormalized hopping ``P_{n+1,n} = delta/2 R - gamma eta T``."""
    eta = math.exp(-2 * v.lam)
    return 0.5 * p.delta * coeff_R(n, v.beta, eta) - p.gamma * eta * coeff_T(n, v.beta, eta)


def rwa_block(n: int, p: ModelParams, v: VariationalParams) -> RwaBlock:
    if n < 0:
        raise ValueError(f"block index must be >= 0, got {n}")
    e = eta_set(p, v)
    hop = e.eta2 * (p.alpha - p.omega * v.beta) + offdiag_P(n, p, v)
    return RwaBlock(
        n=n,
        d_upper=e.eta0 + n * e.eta1 + diag_shift_f(n, p, v),
        d_lower=e.eta0 + (n + 1) * e.eta1 - diag_shift_f(n + 1, p, v),
        offdiag=hop * math.sqrt(n + 1),
    )


def block_eigen(b: RwaBlock) -> tuple[float, float, float]:
    """Eigenvalues ``e_minus <= e_plus`` and mixing angle of a 2x2 block.

    The lower eigenvector is ``(cos theta, sin theta)`` with
    ``tan theta = 2 o / (d_upper - d_lower - sqrt((d_upper - d_lower)^2 + 4 o^2))``
    and ``theta`` in ``(-pi/2, pi/2]``.
    """
    split = b.d_upper - b.d_lower
    root = math.hypot(split, 2 * b.offdiag)
    mean = 0.5 * (b.d_upper + b.d_lower)
    e_minus, e_plus = mean - 0.5 * root, mean + 0.5 * root
    if b.offdiag == 0.0:
        theta = 0.0 if split <= 0 else 0.5 * math.pi
    elif split > 0:
        # split - root cancels here; use 2 o / (split - root) = -(split + root) / (2 o)
        theta = math.atan(-(split + root) / (2 * b.offdiag))
    else:
        theta = math.atan(2 * b.offdiag / (split - root))
    if theta <= -0.5 * math.pi:
        theta = 0.5 * math.pi
    return e_minus, e_plus, theta
