"""
Stadia against the circle
=========================

A stadium is two straight sides of length a joined by semicircles.  For
large p some stadium has a larger half-length chord functional than the
circle of the same length.  The best one degenerates into a doubled
segment, where c = 2 pi^(p+1)/(p+1).
"""

import numpy as np

from chordcrit import ChordSpec, StadiumParam, stadium_a_grid, stadium_critical_p, stadium_excess

u = np.pi
for p in (2.0, 3.0, 3.5):
    spec = ChordSpec(p, u)
    row = [stadium_excess(StadiumParam(a), spec, 2048) for a in (0.1, 1.0, 2.5, np.pi - 1e-4)]
    print(f"p={p}: excess at a=0.1, 1, 2.5, ~pi ->", np.round(row, 6).tolist())

# needle limit against the circle: (pi/2)^p = p + 1
ps = np.linspace(3.0, 3.3, 7)
print("needle minus circle:", np.round(2 * np.pi ** (ps + 1) / (ps + 1) - 2 * np.pi * 2 ** ps, 4).tolist())

grid = stadium_a_grid(2 * np.pi, 20)
print("crossover p:", stadium_critical_p(u, grid, 2.5, 4.0, tol=0.01, N=2048))
