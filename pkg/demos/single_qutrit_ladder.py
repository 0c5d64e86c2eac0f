"""
One qutrit, nine rotations
==========================

Any 3x3 unitary factors into two-level Givens mixes that zero the
off-diagonal column entries, followed by z-y-z triples on the two-level
subspaces -- nine rotations plus a global phase in total.
"""

import numpy as np

from trisect import Circuit, eval_circuit, haar_unitary, single_qutrit_gates

u = haar_unitary(3, np.random.default_rng(4))
gates = single_qutrit_gates(u)

print("target U(3):")
print(np.round(u, 3))
print(f"\n{len(gates)} gates:")
for g in gates:
    print(f"  {g}")

got = eval_circuit(Circuit(1, tuple(gates)))
print(f"\nreconstruction deviation: {np.max(np.abs(got - u)):.3e}")

# degenerate inputs take the zero-pivot branches but still come out exact
for name, m in (
    ("identity", np.eye(3, dtype=complex)),
    ("diagonal phases", np.diag(np.exp(1j * np.array([0.2, -0.9, 1.4])))),
    ("trit cycle", np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)),
):
    gates = single_qutrit_gates(m)
    err = np.max(np.abs(eval_circuit(Circuit(1, tuple(gates))) - m))
    print(f"{name:<16s} -> {len(gates)} gates, deviation {err:.3e}")
