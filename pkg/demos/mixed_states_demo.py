"""
Mixed states
============

For mixed states the conditional entanglement is the entanglement of
formation, computed from the concurrence.  A classical mixture shows why
E + D <= 1 says nothing about G: no entanglement, yet Bob knows the outcome.
"""

import numpy as np

from qcomplement.complementarity import mixed_audit, mixed_point
from qcomplement.measurement import PovmParams
from qcomplement.states import bell_state, classical_mixture, eof_generalized, random_density

s = mixed_point(classical_mixture(), PovmParams(0.0))
print(f"classical mixture, projective: E={s.e_bar_f:.3f}  D={s.d:.3f}  G={s.g_bar:.3f}")

# Werner-like family: entanglement of formation drops to zero at p = 1/3
for p in np.linspace(0, 1, 6):
    rho = p * bell_state("phi+").density().matrix + (1 - p) * np.eye(4) / 4
    print(f"p={p:.1f}  E_F={eof_generalized(rho):.4f}")

rng = np.random.default_rng(0)
rho = random_density(rng)
print(mixed_point(rho, PovmParams(0.7, 0.2, 0.5)))

rep = mixed_audit(200, seed=1)
print("audit over 200 random states:", "PASS" if rep.passed else "FAIL")
