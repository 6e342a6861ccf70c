"""
Entanglement monotones for qubit systems and their spectrum-only maxima.

All functions are vectorized: a stack of density matrices ``(..., 4, 4)`` or
of spectra ``(..., 4)`` gives an array of results, a single input gives a
Python float. Logarithms are base 2 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matcomp
from .errors import DimMismatch, DomainError, NotPSD, SpectrumInvalid

SQRT_CLAMP = 1e-12
SPECTRUM_TOL = 1e-9
# Eigenvalues this small are round-off of exact zeros; square roots would amplify them to ~1e-8.
EIG_FLOOR = 1e-14


@dataclass(frozen=True)
class CutSpec:
    """Bipartition of subsystem indices into ``left | right``."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        left, right = tuple(sorted(self.left)), tuple(sorted(self.right))
        if not left or not right:
            raise DimMismatch("both sides of a cut must be non-empty")
        if set(left) & set(right):
            raise DimMismatch(f"cut sides overlap: {left} | {right}")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def check(self, n: int) -> None:
        if set(self.left) | set(self.right) != set(range(n)):
            raise DimMismatch(f"cut {self.left}|{self.right} does not cover {n} subsystems")


A1_A2 = CutSpec((0,), (1,))
A1A2_B = CutSpec((0, 1), (2,))


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _domain(x, lo: float, hi: float, slack: float, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < lo - slack) or np.any(x > hi + slack):
        raise DomainError(f"{name} argument outside [{lo}, {hi}]")
    return np.clip(x, lo, hi)


def _sqrt0(x):
    """Square root with tiny negative arguments clamped to zero."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.where(x < 0, np.where(x >= -SQRT_CLAMP, 0.0, x), x))


def binary_entropy(x):
    x = _domain(x, 0.0, 1.0, 1e-12, "binary_entropy")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return _out(np.where((x <= 0) | (x >= 1), 0.0, h))


def f_of_concurrence(c):
    """E_F as a function of concurrence: ``H(1/2 + sqrt(1 - c^2)/2)``."""
    c = _domain(c, 0.0, 1.0, 1e-9, "f_of_concurrence")
    return binary_entropy(0.5 + 0.5 * np.sqrt(np.clip(1 - c * c, 0.0, None)))


def _psd_factor(rho: np.ndarray) -> np.ndarray:
    """``A`` with ``rho = A A^dagger``; eigenvalues below ``EIG_FLOOR`` are dropped."""
    w, v = matcomp.eig_hermitian(rho)
    if np.any(w < -matcomp.CLAMP_TOL):
        raise NotPSD(f"minimum eigenvalue {np.min(w):.3e} is negative")
    w = np.where(w < EIG_FLOOR, 0.0, w)
    return v * np.sqrt(w)[..., None, :]


def _wootters_sigmas(rho: np.ndarray) -> np.ndarray:
    """Nonascending square roots of the eigenvalues of rho * rho_tilde.

    With ``rho = A A^dagger`` these are the singular values of
    ``A^dagger (Y x Y) A^*``, which avoids a non-Hermitian eigenproblem.
    """
    a = _psd_factor(rho)
    return np.linalg.svd(matcomp.dagger(a) @ matcomp.YY @ np.conj(a), compute_uv=False)


def concurrence_2q(rho):
    rho = matcomp.as_matrix(rho)
    if rho.shape[-2:] != (4, 4):
        raise DimMismatch(f"two-qubit concurrence needs 4x4 input, got {rho.shape[-2:]}")
    s = _wootters_sigmas(rho)
    return _out(np.maximum(0.0, s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3]))


def eof_2q(rho):
    return f_of_concurrence(concurrence_2q(rho))


def _resolve(rho, cut: CutSpec | None, dims):
    dims = tuple(dims) if dims is not None else tuple(getattr(rho, "dims", ()) or ())
    a = matcomp.as_matrix(rho)
    if not dims:
        n = int(round(math.log2(a.shape[-1])))
        dims = (2,) * n
    cut = cut or CutSpec((0,), tuple(range(1, len(dims))))
    cut.check(len(dims))
    return a, cut, dims


def negativity(rho, cut: CutSpec | None = None, dims: Sequence[int] | None = None):
    """``(||rho^{T_right}||_1 - 1) / 2``; the default cut splits off subsystem 0."""
    a, cut, dims = _resolve(rho, cut, dims)
    pt = matcomp.partial_transpose(a, dims, cut.right)
    w = matcomp.spectrum(pt)
    return _out(np.maximum(0.0, (np.sum(np.abs(w), axis=-1) - 1) / 2))


def _schmidt_matrix(psi, cut: CutSpec, dims: Sequence[int]) -> np.ndarray:
    a = np.asarray(psi, dtype=complex)
    batch = a.shape[:-1]
    t = a.reshape(batch + tuple(dims))
    nb = len(batch)
    order = list(range(nb)) + [nb + i for i in cut.left] + [nb + i for i in cut.right]
    dl = math.prod(dims[i] for i in cut.left)
    return np.transpose(t, order).reshape(batch + (dl, -1))


def _pure_dims(psi, dims):
    dims = tuple(dims) if dims is not None else tuple(getattr(psi, "dims", ()) or ())
    a = np.asarray(psi, dtype=complex)
    if not dims:
        dims = (2,) * int(round(math.log2(a.shape[-1])))
    if math.prod(dims) != a.shape[-1]:
        raise DimMismatch(f"dims {dims} do not match state dimension {a.shape[-1]}")
    return a, dims


def reduced_purity(psi, cut: CutSpec, dims: Sequence[int] | None = None):
    a, dims = _pure_dims(psi, dims)
    cut.check(len(dims))
    m = _schmidt_matrix(a, cut, dims)
    rl = m @ matcomp.dagger(m)
    return np.real(np.einsum("...ij,...ji->...", rl, rl))


def concurrence_pure_cut(psi, cut: CutSpec = A1A2_B, dims: Sequence[int] | None = None):
    """``sqrt(2 (1 - Tr rho_left^2))`` for a pure state across ``cut``."""
    p = reduced_purity(psi, cut, dims)
    return _out(np.clip(_sqrt0(2 * (1 - p)), 0.0, 1.0))


def negativity_pure_cut(psi, cut: CutSpec = A1A2_B, dims: Sequence[int] | None = None):
    """Negativity of a pure state from its Schmidt coefficients.

    With Schmidt coefficients ``s_i`` the partially transposed projector has
    trace norm ``(sum s_i)^2``, so the negativity is ``sum_{i<j} s_i s_j``.
    """
    a, dims = _pure_dims(psi, dims)
    cut.check(len(dims))
    s = np.linalg.svd(_schmidt_matrix(a, cut, dims), compute_uv=False)
    s = s / np.linalg.norm(s, axis=-1, keepdims=True)
    return _out(np.maximum(0.0, (np.sum(s, axis=-1) ** 2 - np.sum(s * s, axis=-1)) / 2))


def check_spectrum(lam) -> np.ndarray:
    """Validate a two-qubit density spectrum and return it sorted nonascending."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1:] != (4,):
        raise SpectrumInvalid(f"need 4 eigenvalues, got shape {lam.shape}")
    if np.any(~np.isfinite(lam)) or np.any(lam < -SPECTRUM_TOL) or np.any(lam > 1 + SPECTRUM_TOL):
        raise SpectrumInvalid("eigenvalues must lie in [0, 1]")
    if np.any(np.abs(np.sum(lam, axis=-1) - 1) > SPECTRUM_TOL):
        raise SpectrumInvalid("eigenvalues must sum to 1")
    lam = np.clip(lam, 0.0, 1.0)
    lam = np.where(lam < EIG_FLOOR, 0.0, lam)
    return -np.sort(-lam, axis=-1)


def mems_concurrence(lam):
    """Largest concurrence reachable by global unitaries at fixed spectrum."""
    lam = check_spectrum(lam)
    l1, l2, l3, l4 = np.moveaxis(lam, -1, 0)
    return _out(np.maximum(0.0, l1 - l3 - 2 * np.sqrt(l2 * l4)))


def max_eof_spectrum(lam):
    return f_of_concurrence(mems_concurrence(lam))


def max_negativity_spectrum(lam):
    lam = check_spectrum(lam)
    l1, l2, l3, l4 = np.moveaxis(lam, -1, 0)
    v = 0.5 * np.sqrt((l1 - l3) ** 2 + (l2 - l4) ** 2) - l2 / 2 - l4 / 2
    return _out(np.maximum(0.0, v))


def g_neg(x):
    """Map pure-cut negativity onto the internal-negativity scale (values in [0, 1/2])."""
    x = _domain(x, 0.0, 0.5, 1e-9, "g_neg")
    return _out(0.75 - _sqrt0(1 - 2 * x * x) / 2 - _sqrt0(1 - 4 * x * x) / 4)


def g_tilde(x):
    x = _domain(x, 0.0, 1.0, 1e-9, "g_tilde")
    return _out((1 - _sqrt0(1 - x * x)) / 2)
