"""
Tracy-Widom distributions F1 and F2.

The Hastings-McLeod solution q of q'' = s q + 2 q^3 is obtained by shooting backward
from s_max with (q, q') = (Ai, Ai') down to s = -4, and by collocation against the
left asymptotic series below that. The state is augmented with

    I1(s) = int_s^inf q,   J(s) = int_s^inf q^2,   I2(s) = int_s^inf (x - s) q^2 dx

so that F2 = exp(-I2) and F1 = exp(-(I1 + I2)/2) come straight off the grid.
fredholm_f2 is an independent route to F2 through the Airy-kernel determinant.
"""

import logging
import math
import time
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional, Union

import numpy as np
from scipy import integrate, optimize, special
from scipy.interpolate import CubicHermiteSpline

from wishart_tw.errors import (
    DomainError,
    FredholmConvergenceError,
    PainleveBlowUpError,
    require_finite,
)
from wishart_tw.repository.painleve_repository import PainleveRepository
from wishart_tw.service.quadrature import gauss_legendre
from wishart_tw.service.special_functions import airy_kernel
from wishart_tw.settings import Settings

logger = logging.getLogger(__name__)

INTEGRATOR_VERSION = "dop853-bvp-2"
BLOW_UP = 1e6
JOIN_POINT = -4.0
BVP_TOL_FLOOR = 1e-10
MAX_RETRIES = 3
RETRY_STEP = 1.0
GRID_SPACING = 0.01

WHICH = ("TW1", "TW2")


@dataclass(frozen=True)
class PainleveSolution:
    """Hastings-McLeod solution tabulated on a descending grid."""

    grid: np.ndarray
    q: np.ndarray
    qprime: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    J: np.ndarray
    tol: float

    @property
    def s_min(self) -> float:
        return float(self.grid[-1])

    @property
    def s_max(self) -> float:
        return float(self.grid[0])

    def as_table(self) -> dict:
        return {
            "s": self.grid, "q": self.q, "qprime": self.qprime,
            "I1": self.I1, "I2": self.I2, "J": self.J,
        }


def _normalize_which(which: str) -> str:
    w = str(which).upper()
    if w not in WHICH:
        raise DomainError(f"which must be one of {WHICH}, got {which!r}")
    return w


@dataclass(frozen=True)
class TwCdf:
    which: str
    solution: PainleveSolution

    def __post_init__(self):
        object.__setattr__(self, "which", _normalize_which(self.which))

    @property
    def domain(self):
        return self.solution.s_min, self.solution.s_max

    @cached_property
    def _log_cdf(self) -> CubicHermiteSpline:
        """Cubic Hermite interpolant of -log F with exact node derivatives."""
        sol = self.solution
        s = sol.grid[::-1]
        if self.which == "TW2":
            value, slope = sol.I2, -sol.J
        else:
            value, slope = 0.5 * (sol.I1 + sol.I2), -0.5 * (sol.q + sol.J)
        return CubicHermiteSpline(s, value[::-1], slope[::-1])


# ----------------------- Hastings-McLeod -----------------------

def _rhs(s, y):
    q, qp, _, _, j = y
    return np.array([qp, s * q + 2.0 * q ** 3, -q, -j, -q * q])


def _blow_up(s, y):
    return abs(y[0]) - BLOW_UP


_blow_up.terminal = True


def _sign_change(s, y):
    return y[0]


_sign_change.terminal = True


def left_asymptote(s):
    """q(s) ~ sqrt(-s/2) (1 + 1/(8 s^3) - 73/(128 s^6) + 10657/(1024 s^9) - 13912277/(32768 s^12))."""
    s = np.asarray(s, dtype=float)
    t = s ** -3
    series = 1.0 + t * (1.0 / 8.0 + t * (-73.0 / 128.0 + t * (10657.0 / 1024.0 - t * 13912277.0 / 32768.0)))
    return np.sqrt(-s / 2.0) * series


def _left_guess(x: np.ndarray, join: np.ndarray) -> np.ndarray:
    """Leading-order q ~ sqrt(-s/2) and its integrals, anchored at the join state."""
    j = x[-1]
    q = np.sqrt(-x / 2.0)
    big_j = join[4] + (x ** 2 - j ** 2) / 4.0
    i1 = join[2] + (math.sqrt(2.0) / 3.0) * ((-x) ** 1.5 - (-j) ** 1.5)
    i2 = join[3] + join[4] * (j - x) + (j ** 3 - x ** 3) / 12.0 - j * j * (j - x) / 4.0
    return np.vstack([q, -1.0 / (4.0 * q), i1, i2, big_j])


def _solve_left_segment(s_min: float, join: np.ndarray, tol: float):
    """
    Collocation on [s_min, JOIN_POINT]: q pinned to the asymptotic series at s_min and
    the whole shooting state pinned at the join.
    """
    q_left = float(left_asymptote(s_min))

    def bc(ya, yb):
        return np.array([ya[0] - q_left, yb[0] - join[0], yb[2] - join[2], yb[3] - join[3], yb[4] - join[4]])

    mesh = np.linspace(s_min, JOIN_POINT, int(math.ceil((JOIN_POINT - s_min) / 0.05)) + 1)
    result = integrate.solve_bvp(
        _rhs, bc, mesh, _left_guess(mesh, join), tol=max(tol, BVP_TOL_FLOOR), max_nodes=200_000,
    )
    if not result.success:
        raise PainleveBlowUpError(
            "left-segment collocation did not converge",
            {"s_min": s_min, "join": JOIN_POINT, "message": result.message},
        )
    return result.sol


def _initial_state(s0: float) -> np.ndarray:
    ai, aip, _, _ = special.airy(s0)
    int_0_to_s = special.itairy(s0)[0]
    return np.array([
        ai,
        aip,
        1.0 / 3.0 - int_0_to_s,
        (2.0 * s0 * s0 * ai * ai - 2.0 * s0 * aip * aip - ai * aip) / 3.0,
        aip * aip - s0 * ai * ai,
    ])


def solve_hastings_mcleod(
    s_min: float = -10.0, s_max: float = 8.0, tol: float = 1e-12
) -> PainleveSolution:
    """
    Tabulate q, q', I1, I2, J on [s_min, s_max] with spacing <= 0.01.

    Backward shooting from s_max is only trusted down to JOIN_POINT: left of it the
    Hastings-McLeod solution is unstable under integration and a rounding error grows
    by about e^{sqrt(-2s)} per unit of s. The left segment is solved by collocation
    with q(s_min) taken from the asymptotic series.

    If |q| exceeds 1e6 or q reaches 0 during the sweep, the shooting point is moved
    right by one unit and the sweep repeated, at most three times. A solution with
    q <= 0 anywhere is never returned.
    """
    s_min = require_finite("s_min", s_min)
    s_max = require_finite("s_max", s_max)
    tol = require_finite("tol", tol)
    if not s_min < -8.0:
        raise DomainError(f"s_min must be < -8, got {s_min}")
    if not s_max > 6.0:
        raise DomainError(f"s_max must be > 6, got {s_max}")
    if not 1e-12 <= tol <= 1e-6:
        raise DomainError(f"tol must lie in [1e-12, 1e-6], got {tol}")

    requested_max = s_max
    start = time.time()
    for attempt in range(MAX_RETRIES + 1):
        count = int(math.ceil((s_max - s_min) / GRID_SPACING)) + 1
        grid = np.linspace(s_max, s_min, count)
        right = grid[grid > JOIN_POINT]
        t_eval = np.append(right, JOIN_POINT)
        result = integrate.solve_ivp(
            _rhs, (s_max, JOIN_POINT), _initial_state(s_max),
            method="DOP853", t_eval=t_eval, rtol=tol, atol=1e-30, events=[_blow_up, _sign_change],
        )
        if result.status == 0 and len(result.t) == len(t_eval):
            break
        reached = float(result.t[-1]) if len(result.t) else s_max
        logger.warning(
            "Shooting from s_max=%.2f failed at s=%.3f (%s); retrying", s_max, reached, result.message
        )
        s_max += RETRY_STEP
    else:
        raise PainleveBlowUpError(
            "Hastings-McLeod shooting blew up",
            {"s_min": s_min, "s_max": requested_max, "retries": MAX_RETRIES, "reached": reached},
        )

    left_sol = _solve_left_segment(s_min, result.y[:, -1], tol)
    left = grid[grid <= JOIN_POINT]
    y = np.hstack([result.y[:, :-1], left_sol(left)])
    q, qp, i1, i2, j = y
    if not np.all(q > 0):
        bad = int(np.argmax(q <= 0))
        raise PainleveBlowUpError(
            "Hastings-McLeod solution lost positivity",
            {"s_min": s_min, "s_max": s_max, "s": float(grid[bad]), "q": float(q[bad])},
        )
    logger.info(
        "Hastings-McLeod solved on [%.2f, %.2f] (%d nodes, %d rhs evals, %.2fs)",
        s_min, s_max, count, result.nfev, time.time() - start,
    )
    return PainleveSolution(grid=grid, q=q, qprime=qp, I1=i1, I2=i2, J=j, tol=tol)


@lru_cache(maxsize=8)
def _cached_solution(s_min: float, s_max: float, tol: float, cache_dir: Optional[str]) -> PainleveSolution:
    repo = PainleveRepository(cache_dir, INTEGRATOR_VERSION) if cache_dir else None
    if repo is not None:
        table = repo.load(s_min, s_max, tol)
        if table is not None:
            return PainleveSolution(
                grid=table["s"], q=table["q"], qprime=table["qprime"],
                I1=table["I1"], I2=table["I2"], J=table["J"], tol=tol,
            )
    solution = solve_hastings_mcleod(s_min, s_max, tol)
    if repo is not None:
        repo.save(s_min, s_max, tol, solution.as_table())
    return solution


def default_solution(settings: Optional[Settings] = None) -> PainleveSolution:
    """The process-wide solution for the configured interval (disk cache when configured)."""
    settings = settings or Settings.from_env()
    cache = str(settings.cache_dir) if settings.cache_dir else None
    return _cached_solution(settings.painleve_s_min, settings.painleve_s_max, settings.painleve_tol, cache)


def tw_cdf(which: str, settings: Optional[Settings] = None) -> TwCdf:
    return TwCdf(which=which, solution=default_solution(settings))


# ----------------------- CDF, PDF, quantile -----------------------

Number = Union[float, np.ndarray]


def cdf(tw: TwCdf, s: Number) -> Number:
    """F(s); exactly 0 left of the tabulated domain and 1 right of it."""
    arr = np.asarray(s, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("s must not be NaN")
    lo, hi = tw.domain
    inside = (arr >= lo) & (arr <= hi)
    out = np.where(arr > hi, 1.0, 0.0)
    if np.any(inside):
        out = np.array(out, dtype=float)
        out[inside] = np.exp(-tw._log_cdf(arr[inside]))
    return float(out) if np.ndim(s) == 0 else out


def pdf(tw: TwCdf, s: Number) -> Number:
    """F'(s) = -F(s) * d/ds(-log F); 0 outside the tabulated domain."""
    arr = np.asarray(s, dtype=float)
    lo, hi = tw.domain
    inside = (arr >= lo) & (arr <= hi)
    out = np.zeros(arr.shape)
    if np.any(inside):
        x = arr[inside]
        out[inside] = -np.exp(-tw._log_cdf(x)) * tw._log_cdf(x, 1)
    return float(out) if np.ndim(s) == 0 else out


def quantile(tw: TwCdf, p: float) -> float:
    """Inverse CDF by bracketing root search and a Newton polish; |F(s) - p| <= 1e-8."""
    p = require_finite("p", p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    lo, hi = tw.domain
    f_lo, f_hi = cdf(tw, lo), cdf(tw, hi)
    if not f_lo < p < f_hi:
        raise DomainError(f"p={p} outside the tabulated range [{f_lo:.3e}, {f_hi:.12f}]")

    s = optimize.brentq(lambda x: cdf(tw, x) - p, lo, hi, xtol=1e-10)
    for _ in range(3):
        density = pdf(tw, s)
        if density <= 0:
            break
        step = (cdf(tw, s) - p) / density
        s_new = min(max(s - step, lo), hi)
        if abs(cdf(tw, s_new) - p) >= abs(cdf(tw, s) - p):
            break
        s = s_new
    return float(s)


# ----------------------- Fredholm determinant -----------------------

AIRY_TAIL = 1e-9  # Ai(U)^2 < 1e-18 past the truncation point U
MIN_NODES = 16
MAX_NODES = 512


@lru_cache(maxsize=1)
def _truncation_point() -> float:
    return float(optimize.brentq(lambda u: special.airy(u)[0] - AIRY_TAIL, 2.0, 20.0))


def _fredholm_det(s: float, nodes: int) -> float:
    upper = _truncation_point()
    x, w = gauss_legendre(nodes, s, upper)
    root_w = np.sqrt(w)
    kernel = airy_kernel(x[:, None], x[None, :])
    matrix = np.eye(nodes) - root_w[:, None] * kernel * root_w[None, :]
    sign, logdet = np.linalg.slogdet(matrix)
    return float(sign * math.exp(logdet))


def fredholm_f2(s: float, nodes: int = 256, tol: float = 1e-10) -> float:
    """
    F2(s) = det(I - K_Airy) on L^2(s, inf) by Nystrom discretization.

    The rule size doubles until two successive determinants agree to ``tol``;
    ``nodes`` caps the doubling, which starts at MIN_NODES; with ``nodes == MIN_NODES``
    the single rule is returned unchecked.
    """
    s = require_finite("s", s)
    if not -10.0 <= s <= 6.0:
        raise DomainError(f"s must lie in [-10, 6], got {s}")
    if nodes < MIN_NODES or nodes > MAX_NODES or nodes & (nodes - 1):
        raise DomainError(f"nodes must be a power of 2 in [{MIN_NODES}, {MAX_NODES}], got {nodes}")

    m = MIN_NODES
    current = _fredholm_det(s, m)
    if nodes == MIN_NODES:
        logger.debug("fredholm_f2(%.3f) with a single %d-node rule", s, m)
        return current
    while m < nodes:
        m *= 2
        previous, current = current, _fredholm_det(s, m)
        if abs(current - previous) <= tol:
            logger.debug("fredholm_f2(%.3f) converged at %d nodes", s, m)
            return current
    raise FredholmConvergenceError(
        "Airy determinant did not converge under node doubling",
        {"s": s, "nodes": m, "previous": previous, "last": current},
    )
