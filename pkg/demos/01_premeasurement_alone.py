"""Bell-state premeasurement without the correction step.

After U the probe and qubit 3 are both maximally mixed, and the overlap of
qubit 3 with the input is exactly 1/2: nothing has been teleported yet.
"""

import numpy as np

from qteleport import QubitState, lueders_spec, post_measurement_state, reduced_states
from qteleport.protocol import correction_branches
from qteleport.tensor import fidelity

np.set_printoptions(precision=4, suppress=True)

phi = QubitState(0.6, 0.8j)
total = post_measurement_state(phi, lueders_spec())
red = reduced_states(total)

print("input state a, b:", phi.a, phi.b)
print("\nT0 (probe):\n", red["T0"].matrix.real)
print("\nT3 (qubit 3):\n", red["T3"].matrix.real)
print("\noverlap of qubit 3 with the input:", fidelity(phi.vector, red["T3"]))

print("\nbranch states carried by qubit 3 next to each pointer:")
for i, v in enumerate(correction_branches(phi).as_tuple(), start=1):
    print(f"  eta_{i}: {v}")
