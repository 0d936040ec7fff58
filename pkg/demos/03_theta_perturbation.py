"""Perturbing one phase of the correction: W_theta.

Qubit 3 ends in the mixture 3/4 P[phi] + 1/4 P[phi_theta]. Its fidelity
returns continuously to 1 as theta -> 0, while the coincidence observable
keeps expectation 3/4 at every angle.
"""

from qteleport import QubitState, sweep_theta

phi = QubitState(0.6, 0.8)
print(f"{'theta':>8} {'pipeline':>12} {'closed form':>12} {'<A>':>8}")
for row in sweep_theta(phi, n_points=12):
    print(f"{row.theta:8.4f} {row.fidelity_pipeline:12.8f} "
          f"{row.fidelity_closed_form:12.8f} {row.coincidence_expectation:8.4f}")
