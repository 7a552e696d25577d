"""
Chords of a circle and a wobbly circle
======================================

Samples a circle and a closed Fourier perturbation of it, then compares the
chord functional against the circle's closed form and the curvature-only
oracle.
"""

import numpy as np

from chordcrit import (ChordSpec, Circle, FourierPerturbation, Perturbed, chord_norm,
                       chord_norm_curvature, circle_chord_norm, project_closed, reconstruct)

L = 2 * np.pi
circle = reconstruct(Circle(L), 2048, u_max=np.pi)

# the circle: quadrature against the closed form
for p in (1.0, 2.0, 3.0):
    for u in (np.pi / 3, np.pi):
        spec = ChordSpec(p, u)
        num = chord_norm(circle, spec)
        print(f"circle  p={p:3.1f} u={u:.4f}  c={num:.15g}  closed form={circle_chord_norm(L, spec):.15g}")

# a curvature wobble in modes 2 and 3; a1, b1 are re-solved so the curve closes
fp = FourierPerturbation(eps=1.0, a=[0, 0.1, 0.05], b=[0, 0, 0.04])
model = project_closed(Perturbed(fp))
print("closing coefficients a1, b1:", model.fp.a[0], model.fp.b[0])

curve = reconstruct(model, 2048, u_max=np.pi)
print("closure defect:", np.linalg.norm(curve.closure_defect))

for p in (2.0, 3.5):
    spec = ChordSpec(p, np.pi)
    c = chord_norm(curve, spec)
    oracle = chord_norm_curvature(model, spec)
    print(f"wobbly  p={p}  c={c:.12g}  oracle={oracle:.12g}  excess vs circle={c - circle_chord_norm(L, spec):+.3e}")

curve.to_csv("wobbly_circle.csv")  # s,x,y for plotting
