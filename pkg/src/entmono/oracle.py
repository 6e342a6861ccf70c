"""
Sampling oracles for the spectrum maxima and the inequality fuzzing campaigns.

Nothing here calls the closed-form spectrum formulas: conjugated states are
scored with the generic two-qubit measures, so comparisons against
:func:`entmono.measures.max_eof_spectrum` and friends are independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcomp, monogamy
from .measures import A1_A2, concurrence_2q, f_of_concurrence, negativity
from .states import random_mixed_states, random_pure_states, random_unitaries


def random_spectra(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform (flat Dirichlet) spectra on the 4-simplex, sorted nonascending."""
    lam = rng.dirichlet(np.ones(4), size=n)
    return -np.sort(-lam, axis=1)


def conjugate_diag(lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``U diag(lam) U^dagger`` for a stack of unitaries."""
    return (u * lam[None, None, :]) @ matcomp.dagger(u)


def conjugated_concurrence(lam, u):
    return np.atleast_1d(concurrence_2q(conjugate_diag(lam, u)))


def conjugated_negativity(lam, u):
    return np.atleast_1d(negativity(conjugate_diag(lam, u), A1_A2, (2, 2)))


def _hermitian_batch(rng: np.random.Generator, k: int) -> np.ndarray:
    z = rng.standard_normal((k, 4, 4)) + 1j * rng.standard_normal((k, 4, 4))
    return (z + matcomp.dagger(z)) / 2


def _expi(h: np.ndarray, eps: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * eps * w)[..., None, :]) @ matcomp.dagger(v)


def hill_climb(score, lam: np.ndarray, u0: np.ndarray, rng: np.random.Generator,
               steps: int = 400, proposals: int = 48, eps: float = 0.3, min_eps: float = 1e-6):
    """Maximize ``score(lam, U)`` over unitaries by batched random local moves.

    Each step scores ``proposals`` perturbations ``exp(i eps H) U`` and keeps
    the best improvement; ``eps`` halves whenever nothing improves.
    """
    u = u0
    best = float(score(lam, u[None])[0])
    for _ in range(steps):
        cand = _expi(_hermitian_batch(rng, proposals), eps) @ u
        vals = score(lam, cand)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, u = float(vals[j]), cand[j]
            eps = min(eps * 1.2, 1.0)
        else:
            eps /= 2
            if eps < min_eps:
                break
    return best, u


@dataclass
class SpectrumOracleRow:
    spectrum: list
    closed_eof: float
    sampled_max_eof: float
    climbed_eof: float
    closed_neg: float
    sampled_max_neg: float
    climbed_neg: float

    @property
    def eof_violation(self) -> float:
        return max(self.sampled_max_eof, self.climbed_eof) - self.closed_eof

    @property
    def neg_violation(self) -> float:
        return max(self.sampled_max_neg, self.climbed_neg) - self.closed_neg

    @property
    def eof_gap(self) -> float:
        return self.closed_eof - max(self.sampled_max_eof, self.climbed_eof)

    @property
    def neg_gap(self) -> float:
        return self.closed_neg - max(self.sampled_max_neg, self.climbed_neg)


def spectrum_oracle(lam, rng: np.random.Generator, n_unitaries: int = 10_000,
                    climb: bool = True, chunk: int = 5000) -> SpectrumOracleRow:
    """Compare closed-form maxima with random conjugations (and optionally hill-climbing)."""
    from .measures import max_eof_spectrum, max_negativity_spectrum

    lam = np.asarray(lam, dtype=float)
    best_c, best_n = -1.0, -1.0
    arg_c = arg_n = None
    for start in range(0, n_unitaries, chunk):
        u = random_unitaries(rng, min(chunk, n_unitaries - start), 4)
        c = conjugated_concurrence(lam, u)
        n = conjugated_negativity(lam, u)
        if c.max() > best_c:
            best_c, arg_c = float(c.max()), u[int(np.argmax(c))]
        if n.max() > best_n:
            best_n, arg_n = float(n.max()), u[int(np.argmax(n))]
    climbed_c, climbed_n = best_c, best_n
    if climb:
        climbed_c, _ = hill_climb(conjugated_concurrence, lam, arg_c, rng)
        climbed_n, _ = hill_climb(conjugated_negativity, lam, arg_n, rng)
    return SpectrumOracleRow(
        spectrum=[float(x) for x in lam],
        closed_eof=float(max_eof_spectrum(lam)),
        sampled_max_eof=float(f_of_concurrence(min(best_c, 1.0))),
        climbed_eof=float(f_of_concurrence(min(climbed_c, 1.0))),
        closed_neg=float(max_negativity_spectrum(lam)),
        sampled_max_neg=best_n,
        climbed_neg=climbed_n,
    )


def _slacks(internal, external, bound):
    return bound - np.asarray(internal) - np.asarray(external)


def fuzz_pure(rng: np.random.Generator, n: int, chunk: int = 10_000, pivot: int = 0) -> dict:
    """Minimum slack of every checker over ``n`` Haar-random pure three-qubit states."""
    mins = {k: np.inf for k in ("EF_PAIR", "EN_PAIR", "EN_SINGLE", "C_SINGLE", "CKW")}
    unsupported = 0
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        psi = random_pure_states(rng, m, 8)
        rho = psi[:, :, None] * psi[:, None, :].conj()
        r2 = monogamy.reduce_a1a2(rho)
        mins["EF_PAIR"] = min(mins["EF_PAIR"], _slacks(*monogamy.ef_pair_terms(r2), 1.0).min())
        mins["EN_PAIR"] = min(mins["EN_PAIR"], _slacks(*monogamy.en_pair_terms(r2), 0.5).min())
        mins["C_SINGLE"] = min(mins["C_SINGLE"], _slacks(*monogamy.c_single_terms(r2, psi), 1.0).min())
        ok = matcomp.spectrum(r2)[:, 2] <= monogamy.RANK_TOL
        unsupported += int(np.sum(~ok))
        if ok.any():
            i, e = monogamy.en_single_terms(psi[ok])
            mins["EN_SINGLE"] = min(mins["EN_SINGLE"], _slacks(i, e, 0.5).min())
        lhs, rhs = monogamy.ckw_terms(psi, pivot)
        mins["CKW"] = min(mins["CKW"], (np.asarray(rhs) - np.asarray(lhs)).min())
    out = {k: float(v) for k, v in mins.items()}
    out["en_single_unsupported"] = unsupported
    out["n_states"] = n
    return out


def fuzz_mixed(rng: np.random.Generator, n: int, chunk: int = 10_000) -> dict:
    """Minimum slack of the pair and concurrence checkers on random mixed states.

    Environment dimensions cycle through 2, 4 and 8 so that reductions of
    every rank are covered.
    """
    mins = {"EF_PAIR": np.inf, "EN_PAIR": np.inf, "C_SINGLE": np.inf}
    done = 0
    env_dims = (2, 4, 8)
    i = 0
    while done < n:
        m = min(chunk, n - done)
        rho = random_mixed_states(rng, m, 8, env_dims[i % 3])
        r2 = monogamy.reduce_a1a2(rho)
        mins["EF_PAIR"] = min(mins["EF_PAIR"], _slacks(*monogamy.ef_pair_terms(r2), 1.0).min())
        mins["EN_PAIR"] = min(mins["EN_PAIR"], _slacks(*monogamy.en_pair_terms(r2), 0.5).min())
        mins["C_SINGLE"] = min(mins["C_SINGLE"], _slacks(*monogamy.c_single_terms(r2), 1.0).min())
        done += m
        i += 1
    out = {k: float(v) for k, v in mins.items()}
    out["n_states"] = n
    return out
