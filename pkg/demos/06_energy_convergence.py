"""How fast the oscillator energy approaches the Dirichlet energy.

The lift of the degree-1 harmonic map has the same energy 5/12 at every
level; the cosine coupling energy of its projection sits strictly below
and closes the gap geometrically as the graph refines.  On the ring the
gap has a closed form.  The equilibrium itself converges to the harmonic
map in the sup circle distance.
"""

import numpy as np

from fractalsync import (DegreeVector, build_ring_graph, build_sg_graph,
                         circle_distance, circle_harmonic_map,
                         integrate_to_equilibrium, km_energy, twisted_state)

omega = DegreeVector({(): 1})
print("gasket, degree (1):")
print(" n   lift energy      oscillator energy   gap          d_n")
gaps, ds, ns = [], [], []
for n in range(2, 7):
    g = build_sg_graph(n)
    phases, lift = circle_harmonic_map(g, omega)
    e, j = lift.energy(), km_energy(g, phases).energy
    rep = integrate_to_equilibrium(g, phases)
    d = float(circle_distance(rep.field, phases).max())
    print(f" {n}   {e:.12f}   {j:.12f}   {e - j:.3e}   {d:.3e}")
    gaps.append(e - j)
    ds.append(d)
    ns.append(n)

slope = np.polyfit(ns, np.log(gaps), 1)[0]
print(f"\nfitted gap decay: ratio {np.exp(slope):.4f} per level "
      f"(exponent {slope:.4f})")
print("note: the Holder-based bound only guarantees ratio <= 3/5 = 0.6;")
print("the measured contraction is faster because the gap is quartic in")
print("the edge differences, which the extension rule shrinks rapidly.")

print("\nring, degree (1): gap against the closed form")
for n in (3, 5, 7, 9):
    g = build_ring_graph(n)
    j = km_energy(g, twisted_state(g, 1)).energy
    closed = 2.0 ** (2 * n) * (1 - np.cos(2 * np.pi * 2.0 ** -n)) / (4 * np.pi ** 2)
    print(f" n={n}: 1/2 - J = {0.5 - j:.6e}, defect vs closed form "
          f"{abs(j - closed):.1e}")
