"""
Wishart largest-eigenvalue machinery.

Centering/scaling sequences for l_1 of X*X, Gaussian matrix sampling on a counter-based
stream, the dense and bidiagonal eigenvalue paths, empirical CDFs of standardized
samples, and the Monte Carlo fan-out used by the table reproductions.
"""

import logging
import math
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import List, Sequence

import numpy as np
from scipy import linalg

from wishart_tw.errors import DomainError, EigenSolverError

try:
    from tqdm import tqdm
except ImportError:  # progress bars are optional
    tqdm = None

logger = logging.getLogger(__name__)

VARIANTS = ("original", "adjusted", "section4")
FIELDS = ("real", "complex")
PATHS = ("dense", "tridiagonal")

# (shift on max(n, p), shift on min(n, p)) for each named variant
VARIANT_SHIFTS = {
    "original": (-1.0, 0.0),
    "adjusted": (-0.5, -0.5),
    "section4": (0.5, 0.5),
}
# section4 is the kernel's own (n + 1/2, N + 1/2) centering
VARIANT_ALIASES = {"edge": "section4"}

SEED_LIMIT = 2 ** 64


# ----------------------- Centering and scaling -----------------------

@dataclass(frozen=True)
class ScalingPair:
    mu: float
    sigma: float
    variant: str
    n: int
    p: int

    def standardize(self, values):
        return (np.asarray(values, dtype=float) - self.mu) / self.sigma


def _check_dims(n: int, p: int) -> None:
    if int(n) != n or int(p) != p or n < 1 or p < 1:
        raise DomainError(f"n and p must be integers >= 1, got ({n}, {p})")


def shifted_scaling(n: int, p: int, a: float, b: float, variant: str = "shifted") -> ScalingPair:
    """
    mu = (sqrt(n1) + sqrt(p1))^2 and sigma = (sqrt(n1) + sqrt(p1)) (1/sqrt(n1) + 1/sqrt(p1))^(1/3)
    with n1 = max(n, p) + a and p1 = min(n, p) + b.
    """
    _check_dims(n, p)
    n1 = max(n, p) + a
    p1 = min(n, p) + b
    if n1 <= 0 or p1 <= 0:
        raise DomainError(f"shifted dimensions must be > 0, got n1={n1}, p1={p1} for ({n}, {p})")
    root_n, root_p = math.sqrt(n1), math.sqrt(p1)
    mu = (root_n + root_p) ** 2
    sigma = (root_n + root_p) * (1.0 / root_n + 1.0 / root_p) ** (1.0 / 3.0)
    return ScalingPair(mu=mu, sigma=sigma, variant=variant, n=int(n), p=int(p))


def canonical_variant(variant: str) -> str:
    name = VARIANT_ALIASES.get(variant, variant)
    if name not in VARIANT_SHIFTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return name


def scaling(n: int, p: int, variant: str = "adjusted") -> ScalingPair:
    variant = canonical_variant(variant)
    a, b = VARIANT_SHIFTS[variant]
    return shifted_scaling(n, p, a, b, variant=variant)


def centering_shift_ratio(n: int, N: int, variant: str = "adjusted") -> float:
    """(mu_{n,N} - mu_{n,N-1}) / sigma_{n,N}: the centering step per added column, in scale units."""
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    upper = scaling(n, N, variant)
    lower = scaling(n, N - 1, variant)
    return (upper.mu - lower.mu) / upper.sigma


# ----------------------- Sampling -----------------------

@dataclass(frozen=True)
class EigenSample:
    top: np.ndarray
    n: int
    p: int
    k: int
    field: str
    seed: int
    path: str


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def standard_normals(gen: np.random.Generator, count: int) -> np.ndarray:
    """
    ``count`` N(0,1) values by Box-Muller on the generator's uniform stream.

    Consecutive uniform pairs become consecutive cos/sin outputs, so a shorter
    request is always a prefix of a longer one from the same seed.
    """
    pairs = (count + 1) // 2
    u = gen.random(2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count]


def gaussian_matrix(
    n: int, p: int, field: str = "real", seed: int = 0, scale: float = 1.0
) -> np.ndarray:
    """
    n x p matrix of iid N(0,1) (real) or CN(0,1) entries with N(0,1/2) parts (complex),
    filled column by column so that the first p columns do not depend on how many
    columns follow.
    """
    _check_dims(n, p)
    if field not in FIELDS:
        raise DomainError(f"field must be one of {FIELDS}, got {field!r}")
    gen = _generator(seed)
    if field == "real":
        z = standard_normals(gen, n * p)
    else:
        raw = standard_normals(gen, 2 * n * p)
        z = (raw[0::2] + 1j * raw[1::2]) / math.sqrt(2.0)
    return scale * z.reshape((n, p), order="F")


def top_eigenvalues(x: np.ndarray, k: int = 1) -> np.ndarray:
    """Largest k eigenvalues of X*X (descending) from the smaller Gram matrix."""
    n, p = x.shape
    m = min(n, p)
    if not 1 <= k <= m:
        raise DomainError(f"k must lie in [1, {m}], got {k}")
    xh = x.conj().T
    gram = xh @ x if n >= p else x @ xh
    values = linalg.eigvalsh(gram, subset_by_index=[m - k, m - 1])
    return values[::-1].real.copy()


def _bidiagonal_top(gen: np.random.Generator, n: int, p: int, k: int) -> np.ndarray:
    m, a = min(n, p), max(n, p)
    diag = np.sqrt(gen.chisquare(np.arange(a, a - m, -1, dtype=float)))
    sub = np.sqrt(gen.chisquare(np.arange(m - 1, 0, -1, dtype=float))) if m > 1 else np.empty(0)
    # B B^T for lower bidiagonal B: diag d_i^2 + e_{i-1}^2, off-diagonal d_i e_i
    t_diag = diag ** 2
    t_diag[1:] += sub ** 2
    t_off = diag[:-1] * sub
    if m == 1:
        return t_diag.copy()
    values = linalg.eigvalsh_tridiagonal(t_diag, t_off, select="i", select_range=(m - k, m - 1))
    return values[::-1].copy()


def sample_top_k(
    n: int,
    p: int,
    k: int = 1,
    field: str = "real",
    seed: int = 0,
    path: str = "dense",
    scale: float = 1.0,
) -> EigenSample:
    """
    Top-k eigenvalues of X*X for one Gaussian X.

    ``path="tridiagonal"`` samples the real bidiagonal model (chi entries with
    max(n,p), max(n,p)-1, ... degrees of freedom on the diagonal and min(n,p)-1, ..., 1
    below it), which has the same spectrum law as the dense real ensemble.
    """
    _check_dims(n, p)
    if field not in FIELDS:
        raise DomainError(f"field must be one of {FIELDS}, got {field!r}")
    if path not in PATHS:
        raise DomainError(f"path must be one of {PATHS}, got {path!r}")
    if path == "tridiagonal" and field != "real":
        raise DomainError("the tridiagonal path is only available for real matrices")
    if not 1 <= k <= min(n, p):
        raise DomainError(f"k must lie in [1, {min(n, p)}], got {k}")
    if not 0 <= int(seed) < SEED_LIMIT:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")

    try:
        if path == "dense":
            top = top_eigenvalues(gaussian_matrix(n, p, field, seed, scale), k)
        else:
            top = scale * scale * _bidiagonal_top(_generator(seed), n, p, k)
    except (linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError("eigenvalue computation failed", {"seed": int(seed), "n": n, "p": p}) from e
    return EigenSample(top=top, n=int(n), p=int(p), k=int(k), field=field, seed=int(seed), path=path)


def draw_seeds(master_seed: int, reps: int) -> List[int]:
    """Per-draw seeds derived from one master seed; draw i always gets the same seed."""
    state = np.random.SeedSequence(int(master_seed)).generate_state(reps, dtype=np.uint64)
    return [int(s) for s in state]


def _sample_chunk(args):
    n, p, k, field, path, seeds = args
    return [sample_top_k(n, p, k, field, s, path) for s in seeds]


class MonteCarloService:
    """
    Repeated sample_top_k draws, optionally fanned out over a process pool.

    Seeds are fixed per draw before any work is scheduled and chunks come back in
    submission order, so the returned list does not depend on ``workers``.
    """

    def __init__(self, workers: int = 1, chunk_size: int = 500, show_progress: bool = False):
        if workers < 1:
            raise DomainError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self.chunk_size = chunk_size
        self.show_progress = show_progress

    def run(
        self,
        n: int,
        p: int,
        reps: int,
        k: int = 1,
        field: str = "real",
        seed: int = 0,
        path: str = "dense",
    ) -> List[EigenSample]:
        if reps < 1:
            raise DomainError(f"reps must be >= 1, got {reps}")
        seeds = draw_seeds(seed, reps)
        jobs = [
            (n, p, k, field, path, seeds[i:i + self.chunk_size])
            for i in range(0, reps, self.chunk_size)
        ]
        start = time.time()
        logger.info("Sampling %d draws of %dx%d (%s, %s) on %d worker(s)", reps, n, p, field, path, self.workers)

        if self.workers == 1:
            chunks = map(_sample_chunk, jobs)
            results = self._collect(chunks, len(jobs), f"{n}x{p}")
        else:
            with Pool(processes=self.workers) as pool:
                results = self._collect(pool.imap(_sample_chunk, jobs), len(jobs), f"{n}x{p}")

        logger.info("Sampled %dx%d in %.2fs", n, p, time.time() - start)
        return results

    def _collect(self, chunks, total: int, label: str) -> List[EigenSample]:
        if self.show_progress and tqdm is not None:
            chunks = tqdm(chunks, total=total, desc=label, unit="chunk")
        out: List[EigenSample] = []
        for chunk in chunks:
            out.extend(chunk)
        return out


# ----------------------- Empirical CDF -----------------------

@dataclass(frozen=True)
class EmpiricalCdf:
    standardized: np.ndarray
    count: int

    def evaluate(self, t):
        """#{x <= t} / count."""
        hits = np.searchsorted(self.standardized, np.asarray(t, dtype=float), side="right")
        out = hits / self.count
        return float(out) if np.ndim(t) == 0 else out


def empirical_cdf(samples: Sequence[EigenSample], scale: ScalingPair, index: int = 0) -> EmpiricalCdf:
    """Standardize the (index+1)-th largest eigenvalue of every sample by ``scale`` and sort."""
    if not samples:
        raise DomainError("empirical_cdf needs at least one sample")
    shapes = {(s.n, s.p) for s in samples}
    if len(shapes) > 1:
        raise DomainError(f"samples mix shapes {sorted(shapes)}")
    n, p = shapes.pop()
    if sorted((n, p)) != sorted((scale.n, scale.p)):
        raise DomainError(f"scaling is for ({scale.n}, {scale.p}) but samples are ({n}, {p})")
    if index < 0 or any(index >= s.k for s in samples):
        raise DomainError(f"index {index} not available in every sample")
    values = np.sort(scale.standardize([s.top[index] for s in samples]))
    return EmpiricalCdf(standardized=values, count=len(values))
