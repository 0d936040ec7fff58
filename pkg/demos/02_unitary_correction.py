"""Adding the conditional correction W on probe + qubit 3.

W is itself a unitary coupling, so no outcome is ever selected. The final
state factorizes as (1/2 sum_i eta_i chi_i) (x) phi and qubit 3 ends in phi.
"""

import numpy as np

from qteleport import QubitState, build_W, lueders_spec, run_protocol
from qteleport.cli import basis_labels
from qteleport.experiments import coverage_report

np.set_printoptions(precision=4, suppress=True)

print("W (rows/cols ordered eta_1|+>, eta_1|->, ..., eta_4|->):")
print(build_W().real)

phi = QubitState(0.6, 0.8j)
report = run_protocol(phi, lueders_spec())
print("\nfidelity after U:   ", report.fidelity_after_U)
print("fidelity after W:   ", report.fidelity_final)

print("\nnonzero final amplitudes:")
for label, amp in zip(basis_labels(), report.total_state_final):
    if abs(amp) > 1e-12:
        print(f"  {label}: {amp:.4f}")

print("\nchecks:")
for c in coverage_report(report):
    print(f"  {'ok  ' if c.passed else 'FAIL'} {c.name:22s} residual {c.residual:.1e}")
