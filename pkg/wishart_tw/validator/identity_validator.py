"""
Exact and asymptotic identities of the edge parameters, and the closed form of the
normalising constant c_phi.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np
from scipy import special

from wishart_tw.errors import DomainError
from wishart_tw.service.special_functions import ShapeParams

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class IdentityReport:
    """Relative deviations of the exact identities, plus the slower second limit."""

    n: int
    N: int
    convention: str
    lambda_beta2: float
    kappa_over_mu: float
    turning_product: float
    turning_sum: float
    second_limit: float

    def deviations(self) -> Dict[str, float]:
        return {
            "lambda_beta2": self.lambda_beta2,
            "kappa_over_mu": self.kappa_over_mu,
            "turning_product": self.turning_product,
            "turning_sum": self.turning_sum,
        }

    def passed(self, tol: float = 1e-10) -> bool:
        return all(abs(v) <= tol for v in self.deviations().values())

    def to_dict(self) -> dict:
        return asdict(self)


def check_identities(sp: ShapeParams) -> IdentityReport:
    """
    lambda*beta^2 = 2N + 1, kappa/mu - lambda^2/mu^2 = 1/4 (mu from N + 1/2 and
    N + alpha + 1/2), x1*x2 = 4 and x1 + x2 = 4l, all as relative deviations.

    ``second_limit`` is sigma^3/mu * (kappa/mu - 2(lambda^2 - 1/4)/mu^2), which tends
    to 1 only along the AB regime and is not part of ``passed``.
    """
    mu, sigma = sp.mu, sp.sigma
    kappa, lam = sp.kappa, sp.lam
    second = sigma ** 3 / mu * (kappa / mu - 2.0 * (lam * lam - 0.25) / (mu * mu))
    return IdentityReport(
        n=sp.n,
        N=sp.N,
        convention=sp.convention,
        lambda_beta2=(lam * sp.beta ** 2 - (2 * sp.N + 1)) / (2 * sp.N + 1),
        kappa_over_mu=(kappa / mu - lam * lam / (mu * mu) - 0.25) / 0.25,
        turning_product=(sp.x1 * sp.x2 - 4.0) / 4.0,
        turning_sum=(sp.x1 + sp.x2 - 4.0 * sp.l) / (4.0 * sp.l),
        second_limit=second,
    )


def asymptotic_facts(sp: ShapeParams) -> Dict[str, float]:
    """Ratios that tend to 1 as n, N, n/N grow."""
    n, N = sp.n, sp.N
    return {
        "beta": sp.beta / (2.0 * math.sqrt(N / n)),
        "turning_gap": (sp.x2 - sp.x1) / (8.0 * math.sqrt(N / n)),
        "sigma_over_lambda": (sp.sigma / sp.lam) / (2.0 * n ** -0.5 * N ** (-1.0 / 6.0)),
        "beta_sigma_over_lambda": (sp.beta * sp.sigma / sp.lam) / (4.0 * N ** (1.0 / 3.0) / n),
        "sigma3_over_lambda_beta2": (sp.sigma ** 3 / (sp.lam * sp.beta ** 2)) / ((n / N) ** 1.5 / 2.0),
    }


# ----------------------- c_phi -----------------------

@dataclass(frozen=True)
class CphiResult:
    N: int
    alpha: int
    I: float
    v: float
    sqrt2_cphi: float


def _log_moment(k: int, alpha: float) -> float:
    return 0.5 * alpha * LOG2 + special.gammaln((alpha + k) / 2.0) - special.gammaln(k / 2.0 + 1.0)


def laguerre_moment_closed_form(k: int, alpha: float) -> float:
    """
    I_{k,alpha} = int_0^inf x^(alpha/2-1) e^(-x/2) L_k^(alpha-1)(x) dx
                = 2^(alpha/2) Gamma((alpha+k)/2) / (k/2)!   for even k.
    """
    if k < 0 or k % 2:
        raise DomainError(f"k must be even and >= 0, got {k}")
    if alpha <= 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    return math.exp(_log_moment(k, alpha))


def laguerre_moment_quadrature(k: int, alpha: float) -> float:
    """The same moment by generalized Gauss-Laguerre quadrature (exact for this integrand)."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if alpha <= 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    # x = 2t turns the weight into t^(alpha/2 - 1) e^(-t)
    t, w = special.roots_genlaguerre(k + 2, alpha / 2.0 - 1.0)
    values = special.eval_genlaguerre(k, alpha - 1.0, 2.0 * t)
    return float(2.0 ** (alpha / 2.0) * np.dot(w, values))


def cphi_closed_form(N: int, alpha: int) -> CphiResult:
    """v = sqrt(N!/(N+alpha-1)!) I_{N,alpha} and sqrt(2) c_phi = v sqrt(a_N)/2, in log form."""
    if N < 2 or N % 2:
        raise DomainError(f"N must be even and >= 2, got {N}")
    if alpha < 2:
        raise DomainError(f"alpha must be >= 2, got {alpha}")
    log_i = _log_moment(N, alpha)
    log_v = 0.5 * (special.gammaln(N + 1.0) - special.gammaln(N + alpha)) + log_i
    a_n = math.sqrt(N * (N + alpha))
    return CphiResult(
        N=N,
        alpha=alpha,
        I=math.exp(log_i) if log_i < 700 else math.inf,
        v=math.exp(log_v),
        sqrt2_cphi=math.exp(log_v + 0.5 * math.log(a_n) - LOG2),
    )


# ----------------------- K_{n,N} -----------------------

def kn_constant_ratio(n: int, N: int) -> float:
    """K_{n,N} / (2^(2/3) (N/n)^(1/4)), with K_{n,N} assembled in log-gamma form."""
    sp = ShapeParams(n, N)
    lam, beta, sigma = sp.lam, sp.beta, sp.sigma
    lb2 = lam * beta * beta
    log_k = (
        0.25 * math.log(2.0 * lam)
        + lam * (1.0 + beta * beta / 4.0) * (math.log(lam * (2.0 + beta * beta / 2.0)) - 1.0)
        + 0.5 * LOG2
        + 0.25 * math.log(math.pi)
        + 0.5 * special.gammaln((1.0 + lb2) / 2.0)
        + 0.5 * math.log(beta)
        - math.log(lb2) / 12.0
        - 0.5 * (special.gammaln(n + 1.0) + special.gammaln(N + 1.0) + math.log(sigma))
    )
    return math.exp(log_k - (2.0 / 3.0) * LOG2 - 0.25 * math.log(N / n))
