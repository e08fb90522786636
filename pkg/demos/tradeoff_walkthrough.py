"""
Entanglement left behind by a weak measurement
==============================================

Alice and Bob share a pure state written in Schmidt form,
sqrt(a)|00> + sqrt(1-a)|11>.  Alice measures her qubit with a two-outcome
operator pair whose strength Lambda runs from projective (0) to trivial (large).
We look at how much entanglement survives, how much Alice disturbed her qubit
and how well Bob can guess her outcome.
"""

import numpy as np

from qcomplement import PovmParams, evaluate_point

# Strength sweep at maximal entanglement, measuring along the Schmidt axis.
lams = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0]
print(f"{'Lambda':>8} {'E_bar':>8} {'D':>8} {'G_bar':>8} {'E+D':>8} {'E+G':>8}")
for lam in lams:
    pt = evaluate_point(0.5, PovmParams(lam))
    print(f"{lam:8.2f} {pt.e_bar:8.4f} {pt.d:8.4f} {pt.g_bar:8.4f} {pt.e_bar + pt.d:8.4f} {pt.e_bar + pt.g_bar:8.4f}")

# E + G stays at one along this whole line: every bit of entanglement Alice
# destroys turns into something Bob can learn.  E + D only reaches one at the
# projective end.

# Tilt the measurement axis away from the Schmidt basis.
print()
print("tilting the axis at Lambda = 1")
for theta in np.linspace(0, np.pi / 4, 5):
    pt = evaluate_point(0.5, PovmParams.from_theta(1.0, theta))
    print(f"theta={theta:5.3f}  E_bar={pt.e_bar:.4f}  G_bar={pt.g_bar:.4f}  margin_EG={pt.margin_eg:.4f}")

# Less initial entanglement: the gain can now exceed what is lost.
print()
for a in (0.5, 0.3, 0.1, 0.0):
    pt = evaluate_point(a, PovmParams(0.5))
    print(f"a={a:.1f}  E_initial={pt.e_initial:.3f}  E_loss={pt.e_loss:.3f}  G_bar={pt.g_bar:.3f}")
