"""
Internal/external entanglement tradeoff checks for three-qubit states A1 A2 B.

Each ``check_*`` returns a :class:`MonogamyReport`. The ``*_terms`` helpers
compute the (internal, external) pair on stacks of states and back both the
single-state checkers and the fuzzing campaigns.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import matcomp
from .errors import DimMismatch, Unsupported
from .measures import (
    A1_A2,
    A1A2_B,
    CutSpec,
    concurrence_2q,
    concurrence_pure_cut,
    eof_2q,
    g_neg,
    g_tilde,
    max_eof_spectrum,
    max_negativity_spectrum,
    negativity,
    negativity_pure_cut,
)
from .states import QUBITS3, DensityMatrix, PureState

DEFAULT_TOL = 1e-7
RANK_TOL = 1e-7
PURITY_TOL = 1e-9

BOUNDS = {"CKW": None, "EF_PAIR": 1.0, "EN_PAIR": 0.5, "EN_SINGLE": 0.5, "C_SINGLE": 1.0}


@dataclass(frozen=True)
class MonogamyReport:
    inequality_id: str
    internal_term: float
    external_term: float
    bound: float
    slack: float
    satisfied: bool
    tol: float
    three_tangle: float | None = None

    @classmethod
    def build(cls, ident: str, internal: float, external: float, bound: float,
              tol: float = DEFAULT_TOL, three_tangle: float | None = None) -> "MonogamyReport":
        internal, external, bound = float(internal), float(external), float(bound)
        slack = bound - internal - external
        return cls(ident, internal, external, bound, slack, bool(slack >= -tol), float(tol),
                   None if three_tangle is None else float(three_tangle))

    @property
    def total(self) -> float:
        return self.internal_term + self.external_term

    def to_json(self) -> dict:
        d = asdict(self)
        if d["three_tangle"] is None:
            del d["three_tangle"]
        return d


def _coerce(state):
    """Return ``(rho, psi)`` as arrays; ``psi`` is None for genuinely mixed input."""
    if isinstance(state, PureState):
        psi = state.amplitudes
    elif isinstance(state, DensityMatrix):
        psi = None
        rho = state.matrix
    else:
        a = np.asarray(state, dtype=complex)
        if a.ndim == 1:
            psi = a
        elif a.ndim == 2:
            psi, rho = None, a
        else:
            raise DimMismatch(f"expected a state vector or matrix, got shape {a.shape}")
    if psi is not None:
        if psi.shape != (8,):
            raise DimMismatch(f"expected a three-qubit state, got dimension {psi.shape[0]}")
        return np.outer(psi, psi.conj()), psi
    if rho.shape != (8, 8):
        raise DimMismatch(f"expected an 8x8 density matrix, got {rho.shape}")
    return rho, _pure_vector(rho)


def _pure_vector(rho: np.ndarray) -> np.ndarray | None:
    w, v = matcomp.eig_hermitian(rho)
    if w[0] < 1 - PURITY_TOL:
        return None
    return v[:, 0]


def reduce_a1a2(rho) -> np.ndarray:
    return matcomp.partial_trace(rho, QUBITS3, (0, 1))


def external_eof(rho_a1a2):
    """``1 - max_U E_F(U rho U^dagger)``; depends only on the spectrum."""
    return 1.0 - max_eof_spectrum(matcomp.spectrum(rho_a1a2))


def external_neg(rho_a1a2):
    return 0.5 - max_negativity_spectrum(matcomp.spectrum(rho_a1a2))


def ef_pair_terms(r2):
    return eof_2q(r2), external_eof(r2)


def en_pair_terms(r2):
    return negativity(r2, A1_A2, (2, 2)), external_neg(r2)


def c_single_terms(r2, psi=None):
    """Concurrence pair; ``psi`` given means the global state is pure.

    Without a pure global state the external concurrence is replaced by its
    concave upper bound ``2 sqrt(l1 (1 - l1))`` from the largest eigenvalue of
    the reduction.
    """
    internal = concurrence_2q(r2)
    if psi is not None:
        ext = concurrence_pure_cut(psi, A1A2_B, QUBITS3)
    else:
        l1 = matcomp.spectrum(r2)[..., 0]
        ext = np.clip(2 * np.sqrt(np.clip(l1 * (1 - l1), 0.0, None)), 0.0, 1.0)
    return internal, g_tilde(ext)


def en_single_terms(psi):
    r2 = reduce_a1a2(_projectors(psi))
    return negativity(r2, A1_A2, (2, 2)), g_neg(negativity_pure_cut(psi, A1A2_B, QUBITS3))


def ckw_terms(psi, pivot: int = 0):
    """``(C^2_{p|q1} + C^2_{p|q2}, C^2_{p|rest})`` for a pure three-qubit state."""
    if pivot not in (0, 1, 2):
        raise DimMismatch(f"pivot must be 0, 1 or 2, got {pivot}")
    rho = _projectors(psi)
    lhs = 0.0
    for q in (q for q in range(3) if q != pivot):
        lhs = lhs + concurrence_2q(matcomp.partial_trace(rho, QUBITS3, (pivot, q))) ** 2
    rest = tuple(q for q in range(3) if q != pivot)
    rhs = concurrence_pure_cut(psi, CutSpec((pivot,), rest), QUBITS3) ** 2
    return lhs, rhs


def _projectors(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi[..., :, None] * np.conj(psi[..., None, :])


def check_ef_pair(state, tol: float = DEFAULT_TOL) -> MonogamyReport:
    rho, _ = _coerce(state)
    i, e = ef_pair_terms(reduce_a1a2(rho))
    return MonogamyReport.build("EF_PAIR", i, e, 1.0, tol)


def check_en_pair(state, tol: float = DEFAULT_TOL) -> MonogamyReport:
    rho, _ = _coerce(state)
    i, e = en_pair_terms(reduce_a1a2(rho))
    return MonogamyReport.build("EN_PAIR", i, e, 0.5, tol)


def check_en_single(state, tol: float = DEFAULT_TOL) -> MonogamyReport:
    """Negativity-only inequality; defined for pure states whose A1A2 reduction has rank <= 2."""
    rho, psi = _coerce(state)
    if psi is None:
        raise Unsupported("single-negativity inequality needs a pure three-qubit state")
    lam = matcomp.spectrum(reduce_a1a2(rho))
    if lam[2] > RANK_TOL:
        raise Unsupported(f"A1A2 reduction has rank > 2 (third eigenvalue {lam[2]:.3e})")
    i, e = en_single_terms(psi)
    return MonogamyReport.build("EN_SINGLE", i, e, 0.5, tol)


def check_c_single(state, tol: float = DEFAULT_TOL) -> MonogamyReport:
    rho, psi = _coerce(state)
    i, e = c_single_terms(reduce_a1a2(rho), psi)
    return MonogamyReport.build("C_SINGLE", i, e, 1.0, tol)


def check_ckw(state, pivot: int = 0, tol: float = DEFAULT_TOL) -> MonogamyReport:
    """CKW for a pure state; the three-tangle is carried on the report."""
    _, psi = _coerce(state)
    if psi is None:
        raise Unsupported("CKW three-tangle is only defined here for pure states")
    lhs, rhs = ckw_terms(psi, pivot)
    return MonogamyReport.build("CKW", lhs, 0.0, rhs, tol, three_tangle=rhs - lhs)


def check_all(state, tol: float = DEFAULT_TOL, pivot: int = 0) -> list[MonogamyReport]:
    """Every checker that applies to ``state``, in a fixed order."""
    rho, psi = _coerce(state)
    reports = [check_ef_pair(rho, tol), check_en_pair(rho, tol)]
    target = psi if psi is not None else rho
    try:
        reports.append(check_en_single(target, tol))
    except Unsupported:
        pass
    reports.append(check_c_single(target, tol))
    if psi is not None:
        reports.append(check_ckw(psi, pivot, tol))
    return reports


def family_closed_forms(phi: float) -> dict:
    """Analytic curves for the theta = 45 degree family, used as a cross-check."""
    from .measures import f_of_concurrence

    c2, s2 = math.cos(phi) ** 2, math.sin(phi) ** 2
    root = math.sqrt(3 + math.cos(4 * phi))
    return {
        "ef_internal": f_of_concurrence(s2),
        "ef_external": 1 - f_of_concurrence(max(c2, s2)),
        "en_internal": root / 4 - c2 / 2,
        "en_external_pair": 0.5 + min(c2, s2) / 2 - root / 4,
        "g_en": 0.75 - math.sqrt(max(0.0, 1 - 2 * c2 * s2)) / 2 - math.sqrt(max(0.0, 1 - 4 * c2 * s2)) / 4,
        "c_internal": s2,
        "g_tilde_c": 1 - max(c2, s2),
    }
