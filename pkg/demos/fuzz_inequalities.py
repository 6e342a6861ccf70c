"""
Fuzzing the tradeoff inequalities
=================================

Haar-random pure states and random mixed states (pure states of a larger
system with the environment traced out) are pushed through every checker.
The minimum slack should never be negative.
"""

import numpy as np

from entmono.oracle import fuzz_mixed, fuzz_pure

pure = fuzz_pure(np.random.default_rng(1), 20_000)
mixed = fuzz_mixed(np.random.default_rng(2), 5_000)

for name, value in pure.items():
    print("pure ", name, value)
for name, value in mixed.items():
    print("mixed", name, value)
