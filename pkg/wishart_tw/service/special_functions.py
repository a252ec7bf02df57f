"""
Special functions for the Laguerre ensemble edge.

Airy functions, orthonormal Laguerre functions phi_k, the phi/psi pair built from
phi_N and phi_{N-1}, the finite-N kernel S_N and its edge rescaling S_tau, the Airy
kernel, and the scaled Laguerre function F_N.

All functions are pure and accept numpy arrays where that makes sense.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import special

from wishart_tw.errors import DomainError
from wishart_tw.service.quadrature import semi_infinite_integral

ArrayLike = Union[float, np.ndarray]

# below this gap the ratio form of the Airy kernel loses digits to cancellation
AIRY_KERNEL_SWITCH = 1e-4

# rescale the Laguerre recurrence when a value leaves [1/BIG, BIG]
_BIG = 1e150
_SMALL = 1.0 / _BIG

CONVENTIONS = ("complex", "real")


# ----------------------- Geometry -----------------------

@dataclass(frozen=True)
class ShapeParams:
    """
    Geometry of an n x N problem and the spectral parameters derived from it.

    ``alpha`` is n - N for complex matrices and n - 1 - N for real ones; every
    derived quantity is written in terms of N + alpha so both conventions share
    the same formulas.
    """

    n: int
    N: int
    convention: str = "complex"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise DomainError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if self.alpha < 1:
            raise DomainError(
                f"alpha = {self.alpha} for (n={self.n}, N={self.N}, {self.convention}); need n > N"
            )

    @property
    def alpha(self) -> int:
        return self.n - self.N - (1 if self.convention == "real" else 0)

    @property
    def n_eff(self) -> int:
        """N + alpha: n for the complex convention, n - 1 for the real one."""
        return self.N + self.alpha

    @property
    def kappa(self) -> float:
        return self.N + (self.alpha + 1) / 2.0

    @property
    def lam(self) -> float:
        return self.alpha / 2.0

    @property
    def l(self) -> float:  # noqa: E743
        return self.kappa / self.lam

    @property
    def beta(self) -> float:
        # l - 1 = (kappa - lambda)/lambda, and kappa - lambda = N + 1/2 is exact
        return math.sqrt(2.0 * (self.kappa - self.lam) / self.lam)

    @property
    def x2(self) -> float:
        l_minus_1 = (self.kappa - self.lam) / self.lam
        return 2.0 * self.l + 2.0 * math.sqrt(l_minus_1 * (self.l + 1.0))

    @property
    def x1(self) -> float:
        # 4 / x2 avoids the cancellation in 2l - 2*sqrt(l^2 - 1)
        return 4.0 / self.x2

    @property
    def aN(self) -> float:
        return math.sqrt(self.N * self.n_eff)

    @property
    def mu(self) -> float:
        """Edge centering built from N + 1/2 and (N + alpha) + 1/2."""
        return (math.sqrt(self.n_eff + 0.5) + math.sqrt(self.N + 0.5)) ** 2

    @property
    def sigma(self) -> float:
        a, b = math.sqrt(self.n_eff + 0.5), math.sqrt(self.N + 0.5)
        return (a + b) * (1.0 / a + 1.0 / b) ** (1.0 / 3.0)

    def edge_point(self, s: ArrayLike) -> ArrayLike:
        return self.mu + self.sigma * np.asarray(s, dtype=float)


@dataclass(frozen=True)
class KernelEval:
    x: float
    y: float
    value: float
    quadrature_error_estimate: float


# ----------------------- Airy -----------------------

def _finite_array(name: str, x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _unwrap(arr: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(arr) if np.ndim(like) == 0 else arr


def airy_pair(x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """(Ai(x), Ai'(x)); underflows to 0 for large positive x."""
    arr = _finite_array("x", x)
    ai, aip, _, _ = special.airy(arr)
    return _unwrap(ai, x), _unwrap(aip, x)


def airy_ai(x: ArrayLike) -> ArrayLike:
    return airy_pair(x)[0]


def airy_ai_prime(x: ArrayLike) -> ArrayLike:
    return airy_pair(x)[1]


def airy_kernel_integral(x: float, y: float, tol: float = 1e-12) -> float:
    """Integral form of the Airy kernel, int_0^inf Ai(x+u) Ai(y+u) du."""
    x = float(_finite_array("x", x))
    y = float(_finite_array("y", y))

    def integrand(u):
        return special.airy(x + u)[0] * special.airy(y + u)[0]

    value, _ = semi_infinite_integral(integrand, scale=1.0, tol=tol)
    return float(value)


def _airy_kernel_taylor(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Three-term expansion of the divided difference about x, h = y - x."""
    a, b, _, _ = special.airy(x)
    h = y - x
    return b * b - x * a * a - 0.5 * a * a * h - (a * b + x * x * a * a - x * b * b) * h * h / 6.0


def airy_kernel(x: ArrayLike, y: ArrayLike, form: str = "auto") -> ArrayLike:
    """
    Airy kernel (Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x - y), broadcasting over x and y.

    ``form="auto"`` uses the ratio form away from the diagonal and a symmetrised
    Taylor expansion within AIRY_KERNEL_SWITCH of it. ``form="integral"`` evaluates
    the integral representation (scalars only, slow; used for cross-checks).
    """
    if form == "integral":
        return airy_kernel_integral(x, y)
    if form not in ("auto", "ratio"):
        raise DomainError(f"unknown Airy kernel form {form!r}")

    xa = _finite_array("x", x)
    ya = _finite_array("y", y)
    xa, ya = np.broadcast_arrays(xa, ya)
    ai_x, aip_x, _, _ = special.airy(xa)
    ai_y, aip_y, _, _ = special.airy(ya)
    diff = xa - ya

    with np.errstate(divide="ignore", invalid="ignore"):
        out = (ai_x * aip_y - ai_y * aip_x) / diff
    if form == "auto":
        near = np.abs(diff) <= AIRY_KERNEL_SWITCH
        if np.any(near):
            xn, yn = xa[near], ya[near]
            out = np.array(out, dtype=float, copy=True)
            # average of the expansions about x and about y keeps S(x,y) == S(y,x) exactly
            out[near] = 0.5 * (_airy_kernel_taylor(xn, yn) + _airy_kernel_taylor(yn, xn))
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(out)
    return out


# ----------------------- Laguerre functions -----------------------

def _positive_array(name: str, x: ArrayLike) -> np.ndarray:
    arr = _finite_array(name, x)
    if np.any(arr <= 0):
        raise DomainError(f"{name} must be > 0")
    return arr


def laguerre_function_pair(k: int, alpha: float, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    (phi_{k-1}(x), phi_k(x)) for the orthonormal Laguerre functions

        phi_j(x) = sqrt(j!/(j+alpha)!) x^(alpha/2) e^(-x/2) L_j^alpha(x).

    The three-term recurrence runs on the weighted functions with a running log
    scale, so nothing overflows or underflows before the final exponentiation.
    phi_{-1} is taken as 0.
    """
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    xs = np.atleast_1d(_positive_array("x", x))

    log_scale = 0.5 * alpha * np.log(xs) - 0.5 * xs - 0.5 * special.gammaln(alpha + 1.0)
    prev = np.zeros_like(xs)
    cur = np.ones_like(xs)
    for j in range(k):
        nxt = ((2 * j + alpha + 1.0 - xs) * cur - math.sqrt(j * (j + alpha)) * prev) / math.sqrt(
            (j + 1.0) * (j + 1.0 + alpha)
        )
        prev, cur = cur, nxt
        mag = np.abs(cur)
        rescale = (mag > _BIG) | ((mag < _SMALL) & (mag > 0))
        if np.any(rescale):
            factor = np.where(rescale, mag, 1.0)
            prev = prev / factor
            cur = cur / factor
            log_scale = log_scale + np.log(factor)

    with np.errstate(divide="ignore", over="ignore"):
        phi_k = np.sign(cur) * np.exp(np.log(np.abs(cur)) + log_scale)
        phi_km1 = np.sign(prev) * np.exp(np.log(np.abs(prev)) + log_scale)
    return phi_km1, phi_k


def weighted_laguerre_phi(k: int, alpha: float, x: ArrayLike) -> ArrayLike:
    """phi_k(x); see laguerre_function_pair."""
    _, phi = laguerre_function_pair(k, alpha, x)
    return _unwrap(phi.reshape(np.shape(x)), x)


def phi_psi(sp: ShapeParams, x: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    The pair (phi(x), psi(x)) with xi_k = phi_k / x:

        phi = (-1)^N sqrt(a_N/2) (sqrt(n) xi_N - sqrt(N) xi_{N-1})
        psi = (-1)^N sqrt(a_N/2) (sqrt(N) xi_N - sqrt(n) xi_{N-1})
    """
    xs = _positive_array("x", x)
    phi_nm1, phi_n = laguerre_function_pair(sp.N, sp.alpha, xs)
    phi_nm1 = phi_nm1.reshape(xs.shape)
    phi_n = phi_n.reshape(xs.shape)
    xi_n, xi_nm1 = phi_n / xs, phi_nm1 / xs
    pref = (-1.0) ** sp.N * math.sqrt(sp.aN / 2.0)
    root_n, root_N = math.sqrt(sp.n_eff), math.sqrt(sp.N)
    phi = pref * (root_n * xi_n - root_N * xi_nm1)
    psi = pref * (root_N * xi_n - root_n * xi_nm1)
    return _unwrap(phi, x), _unwrap(psi, x)


def _edge_argument(sp: ShapeParams, s: ArrayLike) -> np.ndarray:
    s_arr = _finite_array("s", s)
    z = sp.mu + sp.sigma * s_arr
    if np.any(z <= 0):
        raise DomainError(
            f"mu_N + sigma_N*s must be > 0 (n={sp.n}, N={sp.N}, min s={float(np.min(s_arr))})"
        )
    return z


def phi_psi_tau(sp: ShapeParams, s: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Edge-rescaled pair sigma_N*phi(mu_N + sigma_N s), sigma_N*psi(mu_N + sigma_N s)."""
    z = _edge_argument(sp, s)
    phi, psi = phi_psi(sp, z)
    phi = sp.sigma * np.asarray(phi)
    psi = sp.sigma * np.asarray(psi)
    return _unwrap(phi, s), _unwrap(psi, s)


def big_f_n(sp: ShapeParams, z: ArrayLike) -> ArrayLike:
    """F_N(z) = (-1)^N sigma_N^(-1/2) sqrt(N!/n!) z^((alpha+1)/2) e^(-z/2) L_N^alpha(z)."""
    zs = _positive_array("z", z)
    _, phi_n = laguerre_function_pair(sp.N, sp.alpha, zs)
    out = (-1.0) ** sp.N / math.sqrt(sp.sigma) * np.sqrt(zs) * phi_n.reshape(zs.shape)
    return _unwrap(out, z)


def big_f_n_tau(sp: ShapeParams, s: ArrayLike) -> ArrayLike:
    """F_N(mu_N + sigma_N s)."""
    out = big_f_n(sp, _edge_argument(sp, s))
    return _unwrap(np.asarray(out), s)


# ----------------------- Kernels -----------------------

def laguerre_kernel(
    sp: ShapeParams, x: float, y: float, scaled: bool = False, tol: float = 1e-9
) -> KernelEval:
    """
    S_N(x, y) = int_0^inf phi(x+z)psi(y+z) + psi(x+z)phi(y+z) dz.

    With ``scaled=True`` the arguments are edge coordinates (s, t) and the result
    is S_tau(s, t) = sigma_N S_N(mu_N + sigma_N s, mu_N + sigma_N t), computed as
    the same integral over phi_tau and psi_tau.
    """
    x = float(_finite_array("x", x))
    y = float(_finite_array("y", y))
    pair = phi_psi_tau if scaled else phi_psi
    if scaled:
        _edge_argument(sp, min(x, y))
    elif x <= 0 or y <= 0:
        raise DomainError(f"S_N needs x, y > 0, got ({x}, {y})")

    def integrand(z):
        phi_x, psi_x = pair(sp, x + z)
        phi_y, psi_y = pair(sp, y + z)
        return phi_x * psi_y + psi_x * phi_y

    # z = -2 log(u) in edge units; sigma_N converts to the unscaled variable
    scale = 2.0 if scaled else 2.0 * sp.sigma
    value, error = semi_infinite_integral(integrand, scale=scale, tol=tol)
    return KernelEval(x=x, y=y, value=float(value), quadrature_error_estimate=error)
