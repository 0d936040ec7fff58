"""Teleportation does not depend on which unit vectors chi_i the premeasurement leaves behind.

Random, mutually non-orthogonal chi_i still give a unitary U (the probe
pointers are orthogonal) and still end with qubit 3 in the input state.
"""

from qteleport import random_trials

for randomize in (False, True):
    s = random_trials(500, seed=11, randomize_chi=randomize)
    kind = "random chi" if randomize else "Bell chi  "
    print(f"{kind}: min fidelity {s.min_fidelity:.15f}, "
          f"worst unitarity defect of U {s.max_unitarity_defect:.1e}")
