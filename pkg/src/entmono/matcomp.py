"""
Dense complex linear algebra for small multi-qubit operators.

Operators are plain ``numpy`` complex arrays. Every routine that acts on a
single matrix also accepts a stack of matrices with arbitrary leading batch
axes, so measures can be mapped over thousands of states at once.

Subsystem ordering follows the ket ordering ``|a1 a2 b>``: the left factor of a
tensor product is the most significant index, i.e. basis index
``4*a1 + 2*a2 + b`` for three qubits.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import DimMismatch, NoConvergence, NotHermitian, NotPSD, ParseError

HERMITIAN_TOL = 1e-9
CLAMP_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
YY = np.kron(SIGMA_Y, SIGMA_Y)


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex array with square trailing axes."""
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2:
        raise DimMismatch(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def tensor(*factors) -> np.ndarray:
    """Kronecker product; the leftmost factor is the most significant subsystem."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def hermiticity_error(m: np.ndarray) -> np.ndarray:
    return np.max(np.abs(m - dagger(m)), axis=(-2, -1))


def eig_hermitian(m, tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix (or stack of them).

    Parameters
    ----------
    m : array_like, shape (..., d, d)
    tol : float
        Maximum allowed ``|m - m^dagger|`` entry.

    Returns
    -------
    values : ndarray, shape (..., d)
        Real eigenvalues in nonascending order.
    vectors : ndarray, shape (..., d, d)
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = as_matrix(m)
    if a.shape[-1] != a.shape[-2]:
        raise DimMismatch(f"matrix is not square: {a.shape}")
    err = hermiticity_error(a)
    if np.any(err > tol):
        raise NotHermitian(f"|m - m^dagger|_max = {np.max(err):.3e} exceeds {tol:.1e}")
    a = 0.5 * (a + dagger(a))
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"Hermitian eigensolver failed: {exc}") from exc
    return w[..., ::-1], v[..., ::-1]


def spectrum(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Nonascending eigenvalues only."""
    a = as_matrix(m)
    err = hermiticity_error(a)
    if np.any(err > tol):
        raise NotHermitian(f"|m - m^dagger|_max = {np.max(err):.3e} exceeds {tol:.1e}")
    try:
        w = np.linalg.eigvalsh(0.5 * (a + dagger(a)))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"Hermitian eigensolver failed: {exc}") from exc
    return w[..., ::-1]


def _check_dims(a: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimMismatch(f"local dimensions must be positive: {dims}")
    if a.shape[-1] != a.shape[-2] or math.prod(dims) != a.shape[-1]:
        raise DimMismatch(f"dims {dims} do not describe an operator of shape {a.shape[-2:]}")
    return dims


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduce ``m`` onto the subsystems listed in ``keep`` (kept in ascending order)."""
    a = as_matrix(m)
    dims = _check_dims(a, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimMismatch(f"subsystem index out of range in {keep} for {n} subsystems")
    batch = a.shape[:-2]
    nb = len(batch)
    t = a.reshape(batch + dims + dims)
    traced = [i for i in range(n) if i not in keep]
    # Pair each traced ket axis with its bra axis via einsum labels.
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    bat = letters[:nb]
    ket = list(letters[nb:nb + n])
    bra = list(letters[nb + n:nb + 2 * n])
    for i in traced:
        bra[i] = ket[i]
    out = bat + "".join(ket[i] for i in keep) + "".join(bra[i] for i in keep)
    r = np.einsum(f"{bat}{''.join(ket)}{''.join(bra)}->{out}", t)
    dk = math.prod(dims[i] for i in keep) if keep else 1
    return r.reshape(batch + (dk, dk))


def partial_transpose(m, dims: Sequence[int], subsystem) -> np.ndarray:
    """Transpose the indices of one subsystem (or an iterable of them)."""
    a = as_matrix(m)
    dims = _check_dims(a, dims)
    n = len(dims)
    subs = [subsystem] if np.isscalar(subsystem) else list(subsystem)
    if any(s < 0 or s >= n for s in subs):
        raise DimMismatch(f"subsystem {subsystem} out of range for {n} subsystems")
    batch = a.shape[:-2]
    nb = len(batch)
    t = a.reshape(batch + dims + dims)
    axes = list(range(nb + 2 * n))
    for s in subs:
        axes[nb + s], axes[nb + n + s] = axes[nb + n + s], axes[nb + s]
    return np.transpose(t, axes).reshape(a.shape)


def trace_norm(m) -> np.ndarray | float:
    a = as_matrix(m)
    s = np.linalg.svd(a, compute_uv=False)
    r = np.sum(s, axis=-1)
    return float(r) if r.ndim == 0 else r


def hermitian_trace_norm(m) -> np.ndarray | float:
    """Trace norm of a Hermitian matrix via its eigenvalues (cheaper than SVD)."""
    r = np.sum(np.abs(spectrum(m)), axis=-1)
    return float(r) if r.ndim == 0 else r


def sqrt_psd(m, tol: float = CLAMP_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more negative
    raises :class:`NotPSD`.
    """
    w, v = eig_hermitian(m)
    if np.any(w < -tol):
        raise NotPSD(f"minimum eigenvalue {np.min(w):.3e} below -{tol:.1e}")
    s = np.sqrt(np.clip(w, 0.0, None))
    return (v * s[..., None, :]) @ dagger(v)


def matrix_to_json(m) -> dict:
    """Row-major ``{"rows", "cols", "re", "im"}`` encoding."""
    a = as_matrix(m)
    if a.ndim != 2:
        raise DimMismatch("only single matrices can be serialized")
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or re.size != rows * cols or im.size != rows * cols:
        raise DimMismatch(f"entry count does not match {rows}x{cols}")
    return as_matrix((re + 1j * im).reshape(rows, cols))
