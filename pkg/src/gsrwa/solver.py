"""Variational energies, their minimization and ground-state observables.

Four approximations are provided:

* ``GSRWA``: displacement ``beta`` and squeezing ``lam`` both optimized;
* ``GVM``: ``lam = 0``, ``beta`` optimized;
* ``GRWA``: ``lam = 0``, ``beta = alpha/omega`` fixed;
* ``GSRWA_ANALYTIC``: isotropic closed-form approximations for ``beta`` and ``lam``.

For ``g2 < g1`` (``gamma < 0``) the transformed ground state ``|0, -z>`` and the
lowest state of the ``{|0, +z>, |1, -z>}`` block have opposite parity and cross
as the coupling grows; both branches are optimized independently and the
lower one is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from .exceptions import NoCrossingError, NumericalError
from .transform import (
    LAMBDA_CAP,
    ModelParams,
    RwaBlock,
    VariationalParams,
    block_eigen,
    check_lambda,
    diag_shift_f,
    eta_set,
    offdiag_P,
)


class Method(str, Enum):
    GSRWA = "GSRWA"
    GVM = "GVM"
    GRWA = "GRWA"
    GSRWA_ANALYTIC = "GSRWA_ANALYTIC"


class Branch(str, Enum):
    GROUND = "ground_block"
    FIRST_EXCITED = "first_excited_block"


#: Off-diagonal entry of the first-excited block. ``"hop"`` keeps only the
#: renormalized hopping ``P_10``; ``"full"`` adds ``exp(2 lam)(alpha - omega beta)``.
OFFDIAG_MODES = ("hop", "full")

#: Overlap convention for the two cat branches. ``"state"`` is the overlap of
#: the transformed ground state itself, ``exp(-2 beta^2 exp(-4 lam))``;
#: ``"stretched"`` uses ``beta' = beta exp(2 lam)``.
OVERLAP_CONVENTIONS = ("state", "stretched")

_NM_OPTIONS = {"xatol": 1e-9, "fatol": 1e-12, "maxiter": 10_000, "maxfev": 40_000}
_GRID_SIZE = 5
_LAMBDA_GRID_MAX = 0.5


@dataclass(frozen=True)
class GroundStateReport:
    method: Method
    params: ModelParams
    optimum: VariationalParams
    energy: float
    branch: Branch
    photon_number: float
    entropy: float
    beta_prime: float
    converged: bool = True
    iterations: int = 0
    theta: float | None = None


@dataclass(frozen=True)
class CatStateDescriptor:
    """Qubit-oscillator cat state ``U^dag V^dag |0, -z>``.

    The two oscillator branches ``exp[-+beta (a^dag - a)] V^dag |0>`` are
    attached to the ``sx = +1`` and ``sx = -1`` qubit states with equal weights.
    """

    beta: float
    lam: float
    overlap: float
    weights: tuple[float, float] = field(default=(1 / math.sqrt(2), 1 / math.sqrt(2)))

    def fock_amplitudes(self, n_max: int) -> np.ndarray:
        """Amplitudes in the interleaved ``|n, s>`` basis of :mod:`gsrwa.exact`."""
        return lab_state(self.beta, self.lam, {(0, 1): 1.0}, n_max)


# ---------------------------------------------------------------------------
# energy functionals


def _ground(beta, lam, omega, delta, alpha, gamma):
    s = math.sinh(2 * lam)
    shrink = math.exp(-4 * lam)
    return (
        omega * s * s
        + omega * beta * beta
        - 2 * beta * alpha
        - (0.5 * delta + 2 * gamma * beta * shrink) * math.exp(-2 * beta * beta * shrink)
    )


def energy_ground(p: ModelParams, v: VariationalParams) -> float:
    """Energy of ``|0, -z>`` in the displaced-squeezed frame.

    Equals the expectation value of the full Hamiltonian in the cat state, so
    it is a variational upper bound in the odd-parity sector.
    """
    check_lambda(v.lam)
    return _ground(v.beta, v.lam, p.omega, p.delta, p.alpha, p.gamma)


def first_excited_block(p: ModelParams, v: VariationalParams, offdiag: str = "hop") -> RwaBlock:
    """The ``n = 0`` block on ``|0, +z>, |1, -z>`` with the chosen off-diagonal."""
    if offdiag not in OFFDIAG_MODES:
        raise ValueError(f"offdiag must be one of {OFFDIAG_MODES}, got {offdiag!r}")
    e = eta_set(p, v)
    hop = offdiag_P(0, p, v)
    if offdiag == "full":
        hop += e.eta2 * (p.alpha - p.omega * v.beta)
    return RwaBlock(
        n=0,
        d_upper=e.eta0 + diag_shift_f(0, p, v),
        d_lower=e.eta0 + e.eta1 - diag_shift_f(1, p, v),
        offdiag=hop,
    )


def _first_excited(beta, lam, omega, delta, alpha, gamma, full):
    # n = 0 block entries with the n <= 1 Laguerre polynomials written out
    eta = math.exp(-2 * lam)
    x = 4 * beta * beta * eta * eta
    chi = math.exp(-0.5 * x)
    r0 = 2 * beta * eta * chi
    r1 = beta * eta * chi * (2 - x)
    f0 = 0.5 * delta * chi + gamma * eta * r0
    f1 = 0.5 * delta * chi * (1 - x) + gamma * eta * (r0 + 2 * r1)
    hop = 0.5 * delta * r0 - gamma * eta * chi * (1 - x)
    if full:
        hop += (alpha - omega * beta) / eta
    s = math.sinh(2 * lam)
    eta0 = omega * s * s + omega * beta * beta - 2 * beta * alpha
    upper = eta0 + f0
    lower = eta0 + omega * math.cosh(4 * lam) - f1
    return 0.5 * (upper + lower) - 0.5 * math.hypot(upper - lower, 2 * hop)


def energy_first_excited(p: ModelParams, v: VariationalParams, offdiag: str = "hop") -> float:
    """Lower eigenvalue of the even-parity ``n = 0`` block."""
    if offdiag not in OFFDIAG_MODES:
        raise ValueError(f"offdiag must be one of {OFFDIAG_MODES}, got {offdiag!r}")
    check_lambda(v.lam)
    return _first_excited(v.beta, v.lam, p.omega, p.delta, p.alpha, p.gamma, offdiag == "full")


def stationarity_residual(p: ModelParams, v: VariationalParams) -> tuple[float, float]:
    """Gradient ``(dE/dbeta, dE/dlam)`` of :func:`energy_ground`.

    Closed form when isotropic; central differences otherwise.
    """
    b, lam = v.beta, v.lam
    if p.gamma == 0:
        shrink = math.exp(-4 * lam)
        damp = p.delta * shrink * math.exp(-2 * b * b * shrink)
        r_beta = 2 * (b * damp + p.omega * b - p.alpha)
        r_lam = -4 * b * b * damp + p.omega * (math.exp(4 * lam) - 1 / math.exp(4 * lam))
        return r_beta, r_lam
    args = (p.omega, p.delta, p.alpha, p.gamma)
    hb = 1e-6 * max(1.0, abs(b))
    hl = 1e-6 * max(1.0, abs(lam))
    r_beta = (_ground(b + hb, lam, *args) - _ground(b - hb, lam, *args)) / (2 * hb)
    r_lam = (_ground(b, lam + hl, *args) - _ground(b, lam - hl, *args)) / (2 * hl)
    return r_beta, r_lam


# ---------------------------------------------------------------------------
# closed-form approximations


def _analytic_pair(p: ModelParams) -> tuple[float, float]:
    w, d, a = p.omega, p.delta, p.alpha
    lam = d / (2 * w) * a * a / (w + d) ** 2
    shrink = math.exp(-4 * lam)
    beta = a / (w + d * shrink * math.exp(-2 * a * a / (w + d) ** 2 * shrink))
    return beta, lam


def analytic_beta_lambda(p: ModelParams) -> VariationalParams:
    """Approximate isotropic optimum, valid while ``beta, lam < 1``."""
    if p.gamma != 0:
        raise ValueError("analytic displacement/squeezing requires g1 == g2")
    beta, lam = _analytic_pair(p)
    return VariationalParams(beta, lam)


def energy_ultrastrong_closed(p: ModelParams) -> float:
    """Explicit isotropic energy with ``beta = alpha/(omega + delta)``."""
    if p.gamma != 0:
        raise ValueError("closed-form ultrastrong energy requires g1 == g2")
    w, d, a = p.omega, p.delta, p.alpha
    two_lam = d * a * a / (w * (w + d) ** 2)
    return (
        w * math.sinh(two_lam) ** 2
        - a * a * (w + 2 * d) / (w + d) ** 2
        - 0.5 * d * math.exp(-2 * a * a / (w + d) ** 2 * math.exp(-2 * two_lam))
    )


# ---------------------------------------------------------------------------
# observables


def mean_photon(p: ModelParams, v: VariationalParams, method: Method | str = Method.GSRWA) -> float:
    """``<a^dag a>`` in the transformed ground state ``|0, -z>``."""
    method = Method(method)
    if method is Method.GRWA:
        return (p.alpha / p.omega) ** 2
    if method is Method.GVM:
        return v.beta**2
    return math.sinh(2 * v.lam) ** 2 + v.beta**2


def _first_excited_photon(v: VariationalParams, theta: float) -> float:
    c, s = math.cos(theta), math.sin(theta)
    lam = v.lam
    return (
        math.cosh(4 * lam) * s * s
        + math.sinh(2 * lam) ** 2
        - 2 * v.beta * math.exp(2 * lam) * s * c
        + v.beta**2
    )


def overlap_entropy(overlap: float) -> float:
    """Binary entropy (bits) of the eigenvalues ``(1 +- overlap)/2``.

    Written with ``log1p`` so it stays accurate, and monotone, as ``overlap -> 0``.
    """
    o = min(1.0, abs(overlap))
    if o == 1.0:
        return 0.0
    bracket = (1 + o) * math.log1p(o) + (1 - o) * math.log1p(-o)
    return min(1.0, max(0.0, 1.0 - bracket / (2 * math.log(2))))


def entanglement_entropy(v: VariationalParams, convention: str = "state") -> tuple[float, float]:
    """Qubit von Neumann entropy (bits) of the cat state and its effective displacement.

    The reduced qubit density matrix is ``[[1, o], [o, 1]] / 2`` with overlap
    ``o = exp(-2 beta'^2)``; ``beta' = beta exp(-2 lam)`` for the transformed
    state (default) or ``beta exp(2 lam)`` with ``convention="stretched"``.
    """
    if convention not in OVERLAP_CONVENTIONS:
        raise ValueError(f"convention must be one of {OVERLAP_CONVENTIONS}")
    sign = -1.0 if convention == "state" else 1.0
    beta_prime = v.beta * math.exp(sign * 2 * v.lam)
    return overlap_entropy(math.exp(-2 * beta_prime**2)), beta_prime


def _first_excited_entropy(v: VariationalParams, theta: float) -> float:
    c, s = math.cos(theta), math.sin(theta)
    z = -2 * v.beta * math.exp(-2 * v.lam)
    coherence = 0.5 * math.exp(-0.5 * z * z) * (c * c - s * s * (1 - z * z) - 2 * c * s * z)
    return overlap_entropy(2 * coherence)


def cat_state(p: ModelParams, report: GroundStateReport) -> CatStateDescriptor:
    if report.branch is not Branch.GROUND:
        raise ValueError("cat state is defined for the ground block only")
    beta, lam = report.optimum.beta, report.optimum.lam
    return CatStateDescriptor(beta=beta, lam=lam, overlap=math.exp(-2 * beta**2 * math.exp(-4 * lam)))


# ---------------------------------------------------------------------------
# explicit Fock-space states


def squeezed_fock(lam: float, n: int, n_max: int) -> np.ndarray:
    """Fock amplitudes of ``V^dag |n>`` for ``n`` in {0, 1}, ``V = exp[lam(a^2 - a^dag^2)]``."""
    if n not in (0, 1):
        raise ValueError("only the squeezed vacuum and one-photon state are supported")
    r = 2 * lam
    vac = np.zeros(n_max + 2)
    m = np.arange((n_max + 1) // 2 + 1)
    m = m[2 * m <= n_max + 1]
    t = math.tanh(r)
    with np.errstate(divide="ignore"):
        logmag = 0.5 * gammaln(2 * m + 1) - m * math.log(2) - gammaln(m + 1)
    vac[2 * m] = np.exp(logmag) * np.sign(t) ** m * np.abs(t) ** m / math.sqrt(math.cosh(r))
    if n == 0:
        return vac[: n_max + 1]
    # V^dag a^dag V = cosh(2 lam) a^dag - sinh(2 lam) a
    k = np.arange(n_max + 2, dtype=float)
    out = np.zeros(n_max + 2)
    out[1:] += math.cosh(r) * np.sqrt(k[1:]) * vac[:-1]
    out[:-1] -= math.sinh(r) * np.sqrt(k[1:]) * vac[1:]
    return out[: n_max + 1]


def displacement_matrix(z: float, n_max: int) -> np.ndarray:
    """``<m| exp[z (a^dag - a)] |n>`` for ``m, n <= n_max``.

    Uses the normal-ordered form ``exp(-z^2/2) exp(z a^dag) exp(-z a)``; both
    factors are triangular, so the truncated product is exact.
    """
    idx = np.arange(n_max + 1)
    lf = 0.5 * gammaln(idx + 1)
    diff = idx[:, None] - idx[None, :]
    mask = diff >= 0
    safe = np.where(mask, diff, 0)
    if z == 0:
        return np.eye(n_max + 1)
    # raise[m, n] = z^(m-n)/(m-n)! sqrt(m!/n!)
    log_raise = safe * math.log(abs(z)) - gammaln(safe + 1) + lf[:, None] - lf[None, :]
    raise_ = np.where(mask, np.exp(log_raise) * np.sign(z) ** safe, 0.0)
    # lower[m, n] = (-z)^(n-m)/(n-m)! sqrt(n!/m!)
    lower = np.where(mask.T, (np.exp(log_raise) * (-np.sign(z)) ** safe).T, 0.0)
    return math.exp(-0.5 * z * z) * raise_ @ lower


def lab_state(beta: float, lam: float, frame_amps: dict, n_max: int) -> np.ndarray:
    """Lab-frame amplitudes of ``U^dag V^dag |phi>``.

    ``frame_amps`` maps ``(n, s)`` with ``n`` in {0, 1} and ``s = 0`` (+z) or
    ``1`` (-z) to the amplitude of ``|phi>`` in the transformed frame.
    """
    # sx eigenvectors (eigenvalue +1, -1) in the sz basis
    plus_x = np.array([1.0, 1.0]) / math.sqrt(2)
    minus_x = np.array([1.0, -1.0]) / math.sqrt(2)
    osc = {n: squeezed_fock(lam, n, n_max) for n in {n for n, _ in frame_amps}}
    branch_plus = np.zeros(n_max + 1)
    branch_minus = np.zeros(n_max + 1)
    for (n, s), amp in frame_amps.items():
        qubit = np.eye(2)[s]
        branch_plus += amp * (plus_x @ qubit) * osc[n]
        branch_minus += amp * (minus_x @ qubit) * osc[n]
    # U^dag = exp[-beta sx (a^dag - a)]: D(-beta) on |+x>, D(+beta) on |-x>
    phi_plus = displacement_matrix(-beta, n_max) @ branch_plus
    phi_minus = displacement_matrix(beta, n_max) @ branch_minus
    return (np.outer(phi_plus, plus_x) + np.outer(phi_minus, minus_x)).ravel()


# ---------------------------------------------------------------------------
# minimization


def _objective(p: ModelParams, which: str, offdiag: str):
    args = (p.omega, p.delta, p.alpha, p.gamma)
    if which == "ground":
        return lambda b, lam: _ground(b, lam, *args)
    if which == "first_excited":
        if offdiag not in OFFDIAG_MODES:
            raise ValueError(f"offdiag must be one of {OFFDIAG_MODES}, got {offdiag!r}")
        full = offdiag == "full"
        return lambda b, lam: _first_excited(b, lam, *args, full)
    raise ValueError(f"which must be 'ground' or 'first_excited', got {which!r}")


def _nelder_mead(fun, starts, bounds):
    best = None
    for x0 in starts:
        x0 = np.clip(np.asarray(x0, dtype=float), [b[0] for b in bounds], [b[1] for b in bounds])
        res = minimize(fun, x0, method="Nelder-Mead", bounds=bounds, options=_NM_OPTIONS)
        if best is None or res.fun < best.fun:
            best = res
    return best


def _unique(points):
    seen, out = set(), []
    for pt in points:
        key = tuple(round(float(x), 12) for x in pt)
        if key not in seen:
            seen.add(key)
            out.append(pt)
    return out


def minimize_functional(
    p: ModelParams,
    which: str = "ground",
    constrain_lambda_zero: bool = False,
    fix_beta: float | None = None,
    offdiag: str = "hop",
) -> GroundStateReport:
    """Minimize a branch energy over ``(beta, lam)`` in ``[0, 2 alpha/omega + 1] x [0, LAMBDA_CAP]``.

    ``fix_beta`` together with ``lam = 0`` gives the GRWA evaluation;
    ``constrain_lambda_zero`` gives the one-dimensional GVM search.  The
    multi-start Nelder-Mead search uses a 5x5 grid plus the seeds
    ``alpha/(omega + delta)``, ``alpha/omega`` and the analytic pair; the 2-D
    search is also seeded with the ``lam = 0`` optimum so that it can never
    return a higher energy than the GVM.
    """
    fun2 = _objective(p, which, offdiag)
    beta_max = 2 * p.alpha / p.omega + 1
    a_beta, a_lam = _analytic_pair(p)
    beta_seeds = [p.alpha / (p.omega + p.delta), p.alpha / p.omega, a_beta]

    if fix_beta is not None:
        method = Method.GRWA
        beta, lam, energy, converged, nit = fix_beta, 0.0, fun2(fix_beta, 0.0), True, 0
    else:
        starts1 = _unique([[b] for b in np.linspace(0, beta_max, _GRID_SIZE)] + [[b] for b in beta_seeds])
        res1 = _nelder_mead(lambda x: fun2(x[0], 0.0), starts1, [(0.0, beta_max)])
        if constrain_lambda_zero:
            method = Method.GVM
            beta, lam, energy = float(res1.x[0]), 0.0, float(res1.fun)
            converged, nit = bool(res1.success), int(res1.nit)
        else:
            method = Method.GSRWA
            grid = [
                [b, lam0]
                for b in np.linspace(0, beta_max, _GRID_SIZE)
                for lam0 in np.linspace(0, _LAMBDA_GRID_MAX, _GRID_SIZE)
            ]
            seeds = [[b, 0.0] for b in beta_seeds[:2]] + [[a_beta, a_lam], [float(res1.x[0]), 0.0]]
            res2 = _nelder_mead(
                lambda x: fun2(x[0], x[1]), _unique(grid + seeds), [(0.0, beta_max), (0.0, LAMBDA_CAP)]
            )
            beta, lam, energy = float(res2.x[0]), float(res2.x[1]), float(res2.fun)
            converged, nit = bool(res2.success), int(res2.nit)
            if res1.fun < energy:
                beta, lam, energy = float(res1.x[0]), 0.0, float(res1.fun)

    return _report(p, method, VariationalParams(beta, lam), energy, which, offdiag, converged, nit)


def _report(p, method, v, energy, which, offdiag, converged=True, nit=0):
    if not math.isfinite(energy):
        raise NumericalError(f"non-finite energy for {method.value} at {p}")
    if which == "ground":
        ent, bp = entanglement_entropy(v)
        nph = mean_photon(p, v, method)
        return GroundStateReport(method, p, v, energy, Branch.GROUND, nph, ent, bp, converged, nit)
    _, _, theta = block_eigen(first_excited_block(p, v, offdiag))
    return GroundStateReport(
        method,
        p,
        v,
        energy,
        Branch.FIRST_EXCITED,
        _first_excited_photon(v, theta),
        _first_excited_entropy(v, theta),
        v.beta * math.exp(-2 * v.lam),
        converged,
        nit,
        theta,
    )


def _two_branch(p, offdiag, **kwargs) -> GroundStateReport:
    ground = minimize_functional(p, "ground", offdiag=offdiag, **kwargs)
    if p.gamma >= 0:
        return ground
    excited = minimize_functional(p, "first_excited", offdiag=offdiag, **kwargs)
    return excited if excited.energy < ground.energy else ground


def solve_gsrwa(p: ModelParams, offdiag: str = "hop") -> GroundStateReport:
    return _two_branch(p, offdiag)


def solve_gvm(p: ModelParams, offdiag: str = "hop") -> GroundStateReport:
    return _two_branch(p, offdiag, constrain_lambda_zero=True)


def solve_grwa(p: ModelParams, offdiag: str = "hop") -> GroundStateReport:
    return _two_branch(p, offdiag, fix_beta=p.alpha / p.omega)


def solve_gsrwa_analytic(p: ModelParams) -> GroundStateReport:
    v = analytic_beta_lambda(p)
    return _report(p, Method.GSRWA_ANALYTIC, v, energy_ground(p, v), "ground", "hop")


def solve(p: ModelParams, method: Method | str, offdiag: str = "hop") -> GroundStateReport:
    method = Method(method)
    if method is Method.GSRWA:
        return solve_gsrwa(p, offdiag)
    if method is Method.GVM:
        return solve_gvm(p, offdiag)
    if method is Method.GRWA:
        return solve_grwa(p, offdiag)
    return solve_gsrwa_analytic(p)


def branch_gap(p: ModelParams, method: Method | str = Method.GSRWA, offdiag: str = "hop") -> float:
    """``E1* - E0*``: independently optimized first-excited minus ground energy."""
    method = Method(method)
    kwargs = {}
    if method is Method.GVM:
        kwargs["constrain_lambda_zero"] = True
    elif method is Method.GRWA:
        kwargs["fix_beta"] = p.alpha / p.omega
    elif method is not Method.GSRWA:
        raise ValueError(f"no crossing analysis for {method.value}")
    e0 = minimize_functional(p, "ground", offdiag=offdiag, **kwargs).energy
    e1 = minimize_functional(p, "first_excited", offdiag=offdiag, **kwargs).energy
    return e1 - e0


def crossing_point(
    template: ModelParams,
    ratio: float,
    g1_range: tuple[float, float],
    method: Method | str = Method.GSRWA,
    offdiag: str = "hop",
    g_tol: float = 1e-6,
    e_tol: float = 1e-8,
) -> float:
    """Coupling ``g1`` where the two optimized branches cross, for ``g2 = ratio * g1``.

    Bisection continues until the bracket is narrower than ``g_tol * omega``
    and the branch energies agree to ``e_tol * omega``.
    """
    if not ratio < 1:
        raise ValueError(f"a level crossing needs g2 < g1 (ratio < 1), got ratio={ratio}")
    w, d = template.omega, template.delta

    def gap(g1):
        return branch_gap(ModelParams.from_ratio(w, d, g1, ratio), method, offdiag)

    lo, hi = g1_range
    f_lo, f_hi = gap(lo), gap(hi)
    if f_lo == 0:
        return float(lo)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoCrossingError(f"no sign change of E1 - E0 on g1 in [{lo}, {hi}]")
    mid, f_mid = lo, f_lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = gap(mid)
        if (hi - lo) <= g_tol * w and abs(f_mid) <= e_tol * w:
            break
        if f_mid == 0 or hi - lo < 1e-13 * max(1.0, hi):
            break
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return float(mid)
