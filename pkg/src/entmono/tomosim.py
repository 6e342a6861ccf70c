"""
Simulated photonic state tomography.

Pipeline: pure target state -> :func:`apply_noise` -> :func:`born_probs` over
the 6**n Pauli-eigenstate projectors -> :func:`sample_counts` (independent
Poisson draws per setting) -> :func:`mle_reconstruct`.

Projector ordering: each qubit cycles through Z+, Z-, X+, X-, Y+, Y- and qubit 0
is the most significant digit, so index ``k = sum_q d_q * 6**(n-1-q)``. With
``|0> = H`` and ``|1> = V``, Z+ is H and Z- is V.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from . import matcomp
from .errors import DegenerateCounts, DimMismatch, NoConvergence, ParseError, Singular
from .states import DensityMatrix, PureState

_S = 1 / math.sqrt(2)
PAULI_EIGENSTATES = (
    ("Z+", np.array([1, 0], dtype=complex)),
    ("Z-", np.array([0, 1], dtype=complex)),
    ("X+", np.array([_S, _S], dtype=complex)),
    ("X-", np.array([_S, -_S], dtype=complex)),
    ("Y+", np.array([_S, 1j * _S], dtype=complex)),
    ("Y-", np.array([_S, -1j * _S], dtype=complex)),
)
PROB_FLOOR = 1e-12
DEFAULT_SEED = 0xB0B5EED


def visibility_from_ratio(ratio: float) -> float:
    """Interference contrast ``(R - 1) / (R + 1)`` for an ``R:1`` extinction ratio."""
    return (ratio - 1) / (ratio + 1)


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    n_qubits: int
    labels: tuple[str, ...]
    vectors: np.ndarray  # (6**n, 2**n), row k is the ket of projector k
    bases: np.ndarray  # (6**n,), index of the complete measurement basis containing k

    @property
    def projectors(self) -> np.ndarray:
        v = self.vectors
        return v[:, :, None] * v[:, None, :].conj()

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


@lru_cache(maxsize=None)
def build_projectors(n_qubits: int) -> ProjectorSet:
    if not 1 <= n_qubits <= 3:
        raise ValueError(f"n_qubits must be 1, 2 or 3, got {n_qubits}")
    labels, vecs, bases = [], [], []
    for digits in itertools.product(range(6), repeat=n_qubits):
        v = np.ones(1, dtype=complex)
        for d in digits:
            v = np.kron(v, PAULI_EIGENSTATES[d][1])
        vecs.append(v)
        labels.append(",".join(PAULI_EIGENSTATES[d][0] for d in digits))
        bases.append(sum((d // 2) * 3 ** (n_qubits - 1 - q) for q, d in enumerate(digits)))
    vectors = np.array(vecs)
    vectors.setflags(write=False)
    b = np.array(bases)
    b.setflags(write=False)
    return ProjectorSet(n_qubits, tuple(labels), vectors, b)


def born_probs(rho, ps: ProjectorSet) -> np.ndarray:
    """``p_k = <v_k| rho |v_k>`` clamped to ``[0, 1]``."""
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2 ** ps.n_qubits,) * 2:
        raise DimMismatch(f"state of shape {m.shape} does not match {ps.n_qubits}-qubit projectors")
    v = ps.vectors
    p = np.einsum("ki,ij,kj->k", v.conj(), m, v).real
    return np.clip(p, 0.0, 1.0)


@dataclass(frozen=True)
class NoiseSpec:
    visibility: float = visibility_from_ratio(100.0)
    white_noise: float = 0.0

    def __post_init__(self):
        for name in ("visibility", "white_noise"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")


NOISELESS = NoiseSpec(1.0, 0.0)


def apply_noise(psi: PureState, spec: NoiseSpec) -> DensityMatrix:
    """Dephase the path qubit A2 by the interferometer visibility, then mix in white noise."""
    a = np.asarray(psi, dtype=complex)
    if a.shape != (8,):
        raise DimMismatch("noise model acts on three-qubit states")
    rho = np.outer(a, a.conj())
    a2 = (np.arange(8) >> 1) & 1
    coherence = np.where(a2[:, None] == a2[None, :], 1.0, spec.visibility)
    rho = rho * coherence
    rho = (1 - spec.white_noise) * rho + spec.white_noise * np.eye(8) / 8
    return DensityMatrix(rho, (2, 2, 2))


@dataclass(frozen=True)
class TomoConfig:
    counts_per_setting: int = 10000
    seed: int = DEFAULT_SEED
    max_iterations: int = 5000
    gradient_tolerance: float = 1e-8

    def __post_init__(self):
        if self.counts_per_setting < 1:
            raise ValueError("counts_per_setting must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.max_iterations < 1 or self.gradient_tolerance <= 0:
            raise ValueError("optimizer limits must be positive")


# --- Poisson sampling --------------------------------------------------------

def uniform_stream(seed: int, index: int) -> np.random.Generator:
    """Philox4x64 counter-based generator keyed by ``(seed, index)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def poisson_draw(mean: float, rng: np.random.Generator) -> int:
    """One Poisson variate from uniforms supplied by ``rng.random()``.

    Sequential-search inversion below mean 30; above it Hormann's transformed
    rejection (PTRS), which is exact.
    """
    if mean <= 0:
        return 0
    if mean < 30:
        u = rng.random()
        x, p = 0, math.exp(-mean)
        cdf = p
        while u > cdf:
            x += 1
            p *= mean / x
            cdf += p
            if p == 0.0:
                break
        return x
    slam = math.sqrt(mean)
    loglam = math.log(mean)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = math.floor((2 * a / us + b) * u + mean + 0.43)
        if us >= 0.07 and v <= vr:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        if math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b) <= -mean + k * loglam - math.lgamma(k + 1):
            return k


def sample_counts(probs, cfg: TomoConfig) -> np.ndarray:
    """Independent Poisson counts with means ``N p_k``; stream ``k`` is keyed by ``(cfg.seed, k)``."""
    p = np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)
    n = cfg.counts_per_setting
    return np.array([poisson_draw(n * pk, uniform_stream(cfg.seed, k)) for k, pk in enumerate(p)], dtype=np.int64)


def expected_counts(probs, cfg: TomoConfig) -> np.ndarray:
    """Noise-free (real-valued) counts ``N p_k``."""
    return cfg.counts_per_setting * np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)


def write_counts_csv(path, counts) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["projector_index", "count"])
        for k, c in enumerate(counts):
            w.writerow([k, int(c)])


def read_counts_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if reader.fieldnames is None or not {"projector_index", "count"} <= set(reader.fieldnames):
        raise ParseError(f"counts file {path} needs a projector_index,count header")
    try:
        pairs = sorted((int(r["projector_index"]), int(r["count"])) for r in rows)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad counts file {path}: {exc}") from exc
    if [k for k, _ in pairs] != list(range(len(pairs))) or any(c < 0 for _, c in pairs):
        raise ParseError(f"counts file {path} must list each projector index once with nonnegative counts")
    return np.array([c for _, c in pairs], dtype=np.int64)


# --- Reconstruction ----------------------------------------------------------

def _check_counts(counts, ps: ProjectorSet) -> np.ndarray:
    n = np.asarray(counts, dtype=float)
    if n.shape != (len(ps),):
        raise DimMismatch(f"expected {len(ps)} counts, got shape {n.shape}")
    if np.any(n < 0):
        raise ValueError("counts must be nonnegative")
    if not np.any(n > 0):
        raise DegenerateCounts("all counts are zero")
    return n


def frequencies(counts, ps: ProjectorSet) -> np.ndarray:
    """Counts normalized within each complete measurement basis."""
    n = _check_counts(counts, ps)
    totals = np.bincount(ps.bases, weights=n)
    t = totals[ps.bases]
    return np.divide(n, t, out=np.zeros_like(n), where=t > 0)


@lru_cache(maxsize=None)
def _frame(n_qubits: int) -> np.ndarray:
    ps = build_projectors(n_qubits)
    v = ps.vectors
    # p_k = sum_ij conj(v_ki) v_kj rho_ij
    a = (v.conj()[:, :, None] * v[:, None, :]).reshape(len(ps), -1)
    if np.linalg.matrix_rank(a) < a.shape[1]:
        raise Singular("projector frame is not informationally complete")
    pinv = np.linalg.pinv(a)
    pinv.setflags(write=False)
    return pinv


def linear_inversion(counts, ps: ProjectorSet) -> np.ndarray:
    """Least-squares operator reproducing the observed frequencies (Hermitian, maybe not PSD)."""
    f = frequencies(counts, ps)
    d = 2 ** ps.n_qubits
    rho = (_frame(ps.n_qubits) @ f).reshape(d, d)
    return 0.5 * (rho + rho.conj().T)


def project_to_density(m) -> np.ndarray:
    """Clip negative eigenvalues and renormalize to unit trace."""
    w, v = matcomp.eig_hermitian(m)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return np.eye(len(w), dtype=complex) / len(w)
    w = w / w.sum()
    return (v * w) @ v.conj().T


def _tril(d: int):
    return np.tril_indices(d)


def params_to_t(x: np.ndarray, d: int) -> np.ndarray:
    """Real vector of length d**2 -> lower-triangular T with real diagonal."""
    rows, cols = _tril(d)
    t = np.zeros((d, d), dtype=complex)
    diag = rows == cols
    nd = len(rows)
    t[rows, cols] = x[:nd]
    off = ~diag
    t[rows[off], cols[off]] += 1j * x[nd:]
    return t


def t_to_params(t: np.ndarray) -> np.ndarray:
    d = t.shape[0]
    rows, cols = _tril(d)
    off = rows != cols
    return np.concatenate([t[rows, cols].real, t[rows[off], cols[off]].imag])


def density_to_t(rho: np.ndarray, mix: float = 1e-6) -> np.ndarray:
    """Lower-triangular T with ``T^dagger T`` proportional to ``rho`` (slightly depolarized for invertibility)."""
    d = rho.shape[0]
    r = (1 - mix) * rho + mix * np.eye(d) / d
    j = np.eye(d)[::-1]
    # Cholesky of the index-reversed matrix gives the reversed factorization.
    low = np.linalg.cholesky(j @ r @ j)
    return (j @ low @ j).conj().T


def t_to_density(t: np.ndarray) -> np.ndarray:
    a = t.conj().T @ t
    return a / np.trace(a).real


def neg_log_likelihood(rho, counts, ps: ProjectorSet, n_per_setting: float) -> float:
    """Poisson NLL ``sum_k [N p_k - n_k ln(N p_k)]``; ``p_k`` is floored at 1e-12 inside the log only."""
    n = np.asarray(counts, dtype=float)
    p = born_probs(rho, ps)
    return float(np.sum(n_per_setting * p - n * np.log(n_per_setting * np.maximum(p, PROB_FLOOR))))


@dataclass
class MLEResult:
    rho: DensityMatrix
    nll: float
    initial_nll: float
    iterations: int
    gradient_norm: float
    stop_reason: str
    converged: bool = field(default=True)


def _objective(ps: ProjectorSet, counts: np.ndarray, n_per: float, scale: float):
    v = ps.vectors
    vc = v.conj()
    d = v.shape[1]

    def fun(x):
        t = params_to_t(x, d)
        a = t.conj().T @ t
        tr = np.trace(a).real
        rho = a / tr
        p = np.einsum("ki,ij,kj->k", vc, rho, v).real
        pf = np.maximum(p, PROB_FLOOR)
        f = np.sum(n_per * p - counts * np.log(n_per * pf)) / scale
        # the log term is flat where the floor is active
        w = (n_per - np.where(p > PROB_FLOOR, counts / pf, 0.0)) / scale
        g = (v.T * w) @ vc  # sum_k w_k |v_k><v_k|
        gp = (g - np.trace(g @ rho).real * np.eye(d)) / tr
        m = t @ gp
        rows, cols = _tril(d)
        off = rows != cols
        grad = np.concatenate([2 * m[rows, cols].real, 2 * m[rows[off], cols[off]].imag])
        return f, grad

    return fun


def mle_reconstruct(counts, ps: ProjectorSet, cfg: TomoConfig = TomoConfig()) -> MLEResult:
    """Maximum-likelihood density matrix ``T^dagger T / Tr(T^dagger T)``.

    Starts from the eigenvalue-clipped linear inversion and runs L-BFGS on the
    ``4**n`` real parameters of T with the analytic gradient of the Poisson
    negative log-likelihood. Raises :class:`NoConvergence` carrying the best
    iterate when ``cfg.max_iterations`` runs out first.
    """
    n = _check_counts(counts, ps)
    d = 2 ** ps.n_qubits
    rho0 = project_to_density(linear_inversion(n, ps))
    x0 = t_to_params(density_to_t(rho0))
    scale = max(float(np.sum(n)), 1.0)
    fun = _objective(ps, n, float(cfg.counts_per_setting), scale)
    f0, _ = fun(x0)
    res = minimize(
        fun, x0, jac=True, method="L-BFGS-B",
        options={"maxiter": cfg.max_iterations, "gtol": cfg.gradient_tolerance,
                 "ftol": 1e-15, "maxcor": 20, "maxls": 50},
    )
    x = res.x
    f, grad = fun(x)
    if f > f0:
        x, f, grad = x0, f0, fun(x0)[1]
    gnorm = float(np.max(np.abs(grad)))
    rho = DensityMatrix(t_to_density(params_to_t(x, d)), (2,) * ps.n_qubits)
    if gnorm <= cfg.gradient_tolerance:
        reason = "gradient_tolerance"
    elif res.nit >= cfg.max_iterations:
        reason = "max_iterations"
    else:
        reason = "no_further_progress"
    result = MLEResult(rho, f * scale, f0 * scale, int(res.nit), gnorm, reason, reason != "max_iterations")
    if reason == "max_iterations":
        raise NoConvergence(f"MLE stopped after {res.nit} iterations with |grad| = {gnorm:.3e}", best=result)
    return result
