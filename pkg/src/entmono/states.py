"""
Validated quantum states and the three-qubit family used throughout.

Qubit 0 is the polarization of photon A (A1), qubit 1 its path (A2) and
qubit 2 the polarization of photon B. ``|0>`` stands for horizontal
polarization or the upper path, ``|1>`` for vertical polarization or the
lower path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matcomp
from .errors import DimMismatch, InvalidState, NotPSD

STATE_TOL = 1e-9
NORM_TOL = 1e-12
QUBITS3 = (2, 2, 2)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        dims = tuple(self.dims) or (amps.size,)
        if math.prod(dims) != amps.size:
            raise DimMismatch(f"dims {dims} do not match {amps.size} amplitudes")
        if not np.all(np.isfinite(amps)):
            raise InvalidState("amplitudes contain non-finite values")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"state norm^2 = {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", _freeze(amps))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims: Sequence[int] = ()) -> "PureState":
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = np.linalg.norm(a)
        if n == 0:
            raise InvalidState("cannot normalize the zero vector")
        return cls(a / n, tuple(dims))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "dims": list(self.dims),
            "re": [float(x) for x in self.amplitudes.real],
            "im": [float(x) for x in self.amplitudes.imag],
        }


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator with subsystem dims.

    Construction validates everything to ``STATE_TOL``. :meth:`unchecked`
    skips validation for hot loops that re-validate on exit.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = ()
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = matcomp.as_matrix(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimMismatch(f"density matrix must be square, got {m.shape}")
        dims = tuple(int(d) for d in self.dims) or (m.shape[0],)
        if math.prod(dims) != m.shape[0]:
            raise DimMismatch(f"dims {dims} do not match dimension {m.shape[0]}")
        if self._validate:
            _validate_density(m)
            m = 0.5 * (m + m.conj().T)
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def unchecked(cls, matrix, dims: Sequence[int] = ()) -> "DensityMatrix":
        return cls(matrix, tuple(dims), _validate=False)

    def validated(self) -> "DensityMatrix":
        return DensityMatrix(self.matrix, self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def spectrum(self) -> np.ndarray:
        return matcomp.spectrum(self.matrix)

    def reduce(self, keep: Sequence[int]) -> "DensityMatrix":
        keep = sorted(keep)
        r = matcomp.partial_trace(self.matrix, self.dims, keep)
        return DensityMatrix.unchecked(r, [self.dims[k] for k in keep])

    def to_json(self) -> dict:
        d = matcomp.matrix_to_json(self.matrix)
        d["dims"] = list(self.dims)
        return d


def _validate_density(m: np.ndarray) -> None:
    herm = float(matcomp.hermiticity_error(m))
    if herm > STATE_TOL:
        raise InvalidState(f"not Hermitian: |rho - rho^dagger|_max = {herm:.3e}")
    tr = np.trace(m)
    if abs(tr - 1.0) > STATE_TOL:
        raise InvalidState(f"trace {tr.real:.12g} differs from 1")
    lo = float(matcomp.spectrum(m)[-1])
    if lo < -STATE_TOL:
        raise InvalidState(f"minimum eigenvalue {lo:.3e} is negative")


@dataclass(frozen=True)
class FamilyParams:
    """Angles in radians, both within ``[0, pi/2]``."""

    phi: float
    theta: float = math.pi / 4

    def __post_init__(self):
        for name in ("phi", "theta"):
            v = float(getattr(self, name))
            if not (-1e-12 <= v <= math.pi / 2 + 1e-12):
                raise ValueError(f"{name} = {v} outside [0, pi/2]")

    @classmethod
    def from_degrees(cls, phi_deg: float, theta_deg: float = 45.0) -> "FamilyParams":
        return cls(math.radians(phi_deg), math.radians(theta_deg))


def ket(bits: str) -> np.ndarray:
    """Computational basis vector, e.g. ``ket("110")``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def family_state(p: FamilyParams) -> PureState:
    """cos(phi)|110> + sin(phi) (cos(theta)|011> + sin(theta)|101>)."""
    c, s = math.cos(p.phi), math.sin(p.phi)
    amps = c * ket("110") + s * (math.cos(p.theta) * ket("011") + math.sin(p.theta) * ket("101"))
    # Renormalize away the last ulp so the 1e-12 norm contract always holds.
    return PureState.normalized(amps, QUBITS3)


def ghz_state() -> PureState:
    return PureState.normalized(ket("000") + ket("111"), QUBITS3)


def w_state() -> PureState:
    return PureState.normalized(ket("001") + ket("010") + ket("100"), QUBITS3)


def bell_phi_plus() -> PureState:
    return PureState.normalized(ket("00") + ket("11"), (2, 2))


def to_density(psi: PureState, dims: Sequence[int] | None = None) -> DensityMatrix:
    dims = tuple(dims) if dims is not None else psi.dims
    if math.prod(dims) != psi.dim:
        raise DimMismatch(f"dims {dims} do not match state dimension {psi.dim}")
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()), dims)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    d = math.prod(dims)
    return DensityMatrix(np.eye(d) / d, tuple(dims))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    r = np.asarray(rho, dtype=complex)
    s = np.asarray(sigma, dtype=complex)
    if r.shape != s.shape:
        raise DimMismatch(f"shape mismatch {r.shape} vs {s.shape}")
    # ||sqrt(r) sqrt(s)||_1 equals ||A^dagger B||_1 for any factors r = A A^dagger, s = B B^dagger;
    # dropping round-off eigenvalues keeps rank-deficient inputs exact.
    sv = np.linalg.svd(matcomp.dagger(_factor(r)) @ _factor(s), compute_uv=False)
    return float(min(1.0, np.sum(sv) ** 2))


def _factor(m: np.ndarray) -> np.ndarray:
    w, v = matcomp.eig_hermitian(m)
    if np.any(w < -matcomp.CLAMP_TOL):
        raise NotPSD(f"minimum eigenvalue {np.min(w):.3e} is negative")
    return v * np.sqrt(np.where(w < 1e-14, 0.0, w))[..., None, :]


def pure_fidelity(psi, sigma) -> float:
    """``<psi|sigma|psi>``, the fidelity when one argument is pure."""
    a = np.asarray(psi, dtype=complex)
    return float(np.vdot(a, np.asarray(sigma, dtype=complex) @ a).real)


def purity(rho) -> float:
    m = np.asarray(rho, dtype=complex)
    return float(np.real(np.einsum("ij,ji->", m, m)))


def random_pure_states(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """``n`` Haar-random state vectors, shape ``(n, dim)``."""
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_unitaries(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Haar-random unitaries via QR of a Ginibre matrix with phase fix."""
    z = (rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


def random_mixed_states(rng: np.random.Generator, n: int, dim: int, env_dim: int | None = None) -> np.ndarray:
    """Induced-measure mixed states: Haar purifications on ``dim * env_dim`` traced down."""
    env_dim = env_dim or dim
    psi = random_pure_states(rng, n, dim * env_dim).reshape(n, dim, env_dim)
    return psi @ matcomp.dagger(psi)
