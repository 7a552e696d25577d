"""
Where the circle stops being a local maximum
============================================

The second variation at the circle splits into Fourier modes.  Each mode has
a sign-deciding factor T(n, u, p); mode 2 turns positive first.  This walks
through the critical exponent curve p_c(u), the mode spectrum on both sides
of it, and a finite-difference check of the second variation.
"""

import numpy as np

from chordcrit import (ChordSpec, Circle, FourierPerturbation, critical_profile, mode_threshold,
                       p_critical, p_critical_exact, second_variation_fd, second_variation_series,
                       spectrum)

prof = critical_profile(10)
for u, pc in zip(prof.u_grid, prof.p_c):
    print(f"u={u:.4f}  p_c={pc:.6f}  (second-difference threshold {p_critical_exact(u):.6f})")

u = np.pi
pc = p_critical(u)
print("\nat u = pi: p_c =", pc)
for p in (pc - 0.1, pc + 0.1):
    sp = spectrum(u, p, 8)
    print(f"p={p:.2f}  signs of T(2..8):", sp.sign.tolist())

# thresholds per mode: mode 2 is always the lowest
print("\nmode thresholds at u = pi/2:", [round(float(mode_threshold(n, np.pi / 2)), 3) for n in range(2, 7)])

# second variation along mode 3 from the mode series vs a second difference
g = FourierPerturbation.single(3, 1.0)
spec = ChordSpec(2.5, np.pi / 2)
print("\nseries:", second_variation_series(g, spec))
print("fd    :", second_variation_fd(Circle(), g, spec, eps=1e-2))
print("classical factor:", second_variation_series(g, spec, exact=False))
