"""
entmono: internal/external entanglement tradeoff toolkit for three-qubit states.

Modules
-------
matcomp   small dense complex linear algebra (partial trace/transpose, PSD roots)
states    validated states, the A1 A2 B state family, fidelity
measures  concurrence, entanglement of formation, negativity, spectrum maxima
monogamy  inequality checkers returning MonogamyReport objects
tomosim   noise, Poisson counts and maximum-likelihood tomography
oracle    sampling oracles and fuzzing campaigns
cli       ``entmono`` command line
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .measures import (  # noqa: F401
    A1_A2,
    A1A2_B,
    CutSpec,
    binary_entropy,
    concurrence_2q,
    concurrence_pure_cut,
    eof_2q,
    f_of_concurrence,
    g_neg,
    g_tilde,
    max_eof_spectrum,
    max_negativity_spectrum,
    negativity,
    negativity_pure_cut,
)
from .monogamy import (  # noqa: F401
    MonogamyReport,
    check_all,
    check_c_single,
    check_ckw,
    check_ef_pair,
    check_en_pair,
    check_en_single,
    external_eof,
    external_neg,
)
from .states import DensityMatrix, FamilyParams, PureState, family_state, fidelity, purity, to_density  # noqa: F401
