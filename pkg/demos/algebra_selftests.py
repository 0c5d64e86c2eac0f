"""
The Lie-algebra scaffolding, self-tested
========================================

The recursion is justified by commutation relations between even/odd
block subspaces at each split stage, plus the fact that the diagonal
middle factors live in a maximal abelian span.  Both facts are checked
numerically on random subspace elements.  A deliberately corrupted
generator table shows the checks actually bite.
"""

import numpy as np

from trisect import commutation_selftest, maximal_abelian_check
from trisect.algebra import GeneratorId


def run(n: int, trials: int = 50) -> None:
    report = commutation_selftest(n, seed=0, trials=trials)
    print(f"commutation tables, n={n} ({trials} trials per relation):")
    for line in report.lines():
        print(f"  {line}")


run(2)
run(3)

print("maximal abelian span, n=2:")
for line in maximal_abelian_check(2, seed=0).lines():
    print(f"  {line}")

# --- negative control ---------------------------------------------------
# transcribe the 12-level y generator onto the wrong levels; elements
# built from it leak outside their block supports and the suite fails
bad = {
    GeneratorId.SY12: np.array(
        [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex
    )
}
report = commutation_selftest(2, seed=0, trials=20, override=bad)
failures = [line for line in report.lines() if "FAIL" in line]
print(f"\nwith a corrupted generator table: {len(failures)} relations fail")
for line in failures[:3]:
    print(f"  {line}")
assert not report.passed, "the corrupted table must not pass"
