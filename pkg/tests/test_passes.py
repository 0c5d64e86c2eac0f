"""Rewrite passes: structural commutation, cancellation, fusion, pipeline.

Every pass must preserve the dense circuit matrix; the checks here
compare before/after evaluations on top of the targeted rewrites.
"""

import math

import numpy as np
import pytest

from trisect.circuit import (
    Circuit,
    Cinc,
    Gcx,
    GlobalPhase,
    LocalX,
    Rotation,
    count_gates,
    eval_circuit,
    gate_matrix,
)
from trisect.passes import (
    commutes,
    pass_cancel,
    pass_collapse_gcx_pair,
    pass_commute_reorder,
    pass_fuse_cinc,
    simplify,
)

TOL = 1e-11


def _same_matrix(a: Circuit, b: Circuit, tol: float = TOL) -> bool:
    return float(np.max(np.abs(eval_circuit(a) - eval_circuit(b)))) <= tol


_GATE_POOL = (
    Rotation("x", "01", 0, 0.7),
    Rotation("z", "12", 0, -1.2),
    Rotation("z", "02", 1, 0.4),
    Rotation("y", "01", 1, 2.2),
    LocalX("01", 0),
    LocalX("12", 1),
    Gcx(0, 1, 1, "01"),
    Gcx(0, 2, 1, "01"),
    Gcx(0, 1, 1, "12"),
    Gcx(1, 0, 0, "01"),
    Gcx(1, 1, 0, "02"),
    Cinc(0, 1, 1),
    Cinc(1, 2, 0),
    GlobalPhase(0.9),
)


def test_commutes_is_sound():
    # whenever the structural rule says True, the matrices must commute
    for a in _GATE_POOL:
        for b in _GATE_POOL:
            if commutes(a, b):
                ma, mb = gate_matrix(a, 2), gate_matrix(b, 2)
                assert np.max(np.abs(ma @ mb - mb @ ma)) < 1e-12, (a, b)


def test_commutes_specific_rules():
    # disjoint supports
    assert commutes(Rotation("x", "01", 0, 1.0), Rotation("y", "12", 1, 2.0))
    # z rotation through the control of a controlled gate
    assert commutes(Rotation("z", "02", 0, 1.0), Gcx(0, 1, 1, "01"))
    assert commutes(Rotation("z", "02", 0, 1.0), Cinc(0, 1, 1))
    # not through the target
    assert not commutes(Rotation("z", "02", 1, 1.0), Gcx(0, 1, 1, "01"))
    # same-control different-value controlled pairs
    assert commutes(Gcx(0, 1, 1, "01"), Gcx(0, 2, 1, "12"))
    # same target and level, different controls values
    assert commutes(Gcx(0, 1, 1, "01"), Gcx(0, 2, 1, "01"))
    # x rotation and the matching swap on one qutrit
    assert commutes(LocalX("01", 0), Rotation("x", "01", 0, 0.3))
    assert not commutes(LocalX("01", 0), Rotation("z", "01", 0, 0.3))
    # global phase with anything
    assert commutes(GlobalPhase(1.0), Gcx(0, 1, 1, "01"))


# ---------------------------------------------------------------------------
# cancellation
# ---------------------------------------------------------------------------


def test_cancel_annihilates_involution_pairs():
    c = Circuit(2, (Gcx(0, 1, 1, "01"), Gcx(0, 1, 1, "01"), LocalX("12", 0), LocalX("12", 0)))
    out = pass_cancel(c)
    assert out.gates == ()


def test_cancel_merges_rotations_and_phases():
    c = Circuit(
        1,
        (
            Rotation("z", "01", 0, 1.0),
            Rotation("z", "01", 0, 2.5),
            GlobalPhase(0.4),
            GlobalPhase(-0.4),
        ),
    )
    out = pass_cancel(c)
    assert out.gates == (Rotation("z", "01", 0, 3.5),)
    assert _same_matrix(c, out)


def test_cancel_wraps_rotation_angle_mod_4pi():
    c = Circuit(1, (Rotation("y", "02", 0, 3 * math.pi), Rotation("y", "02", 0, 2 * math.pi)))
    out = pass_cancel(c)
    assert len(out.gates) == 1
    assert out.gates[0].theta == pytest.approx(math.pi, abs=1e-12)  # 5*pi mod 4*pi
    assert _same_matrix(c, out)


def test_cancel_drops_negligible_angles():
    c = Circuit(1, (Rotation("x", "01", 0, 1e-15), GlobalPhase(2 * math.pi)))
    assert pass_cancel(c).gates == ()


def test_cancel_cascades_through_merges():
    # after the inner pair cancels, the outer rotations become adjacent
    c = Circuit(
        2,
        (
            Rotation("z", "01", 0, 0.3),
            Gcx(0, 1, 1, "12"),
            Gcx(0, 1, 1, "12"),
            Rotation("z", "01", 0, -0.3),
        ),
    )
    assert pass_cancel(c).gates == ()


# ---------------------------------------------------------------------------
# reordering
# ---------------------------------------------------------------------------


def test_reorder_moves_partner_through_commuting_blocker():
    # the z rotation on the control commutes with the GCX in between
    c = Circuit(
        2,
        (
            Rotation("z", "01", 0, 0.8),
            Gcx(0, 1, 1, "01"),
            Rotation("z", "01", 0, -0.8),
        ),
    )
    out = pass_cancel(pass_commute_reorder(c))
    assert count_gates(out).rotations == 0
    assert _same_matrix(c, out)


def test_reorder_respects_noncommuting_blockers():
    c = Circuit(
        1,
        (
            Rotation("z", "01", 0, 0.8),
            Rotation("x", "01", 0, 1.0),
            Rotation("z", "01", 0, -0.8),
        ),
    )
    out = pass_cancel(pass_commute_reorder(c))
    assert count_gates(out).rotations == 3  # nothing may move
    assert _same_matrix(c, out)


def test_reorder_preserves_matrix_on_random_circuits():
    rng = np.random.default_rng(7)
    for _ in range(5):
        gates = tuple(_GATE_POOL[i] for i in rng.integers(0, len(_GATE_POOL), size=25))
        c = Circuit(2, gates)
        assert _same_matrix(c, pass_commute_reorder(c))


# ---------------------------------------------------------------------------
# targeted rewrites
# ---------------------------------------------------------------------------


def test_collapse_gcx_pair_rewrite():
    # value-m' then value-m on one control/target/level = X + third value
    for m in range(3):
        for mp in range(3):
            if m == mp:
                continue
            c = Circuit(2, (Gcx(0, mp, 1, "01"), Gcx(0, m, 1, "01")))
            out = pass_collapse_gcx_pair(c)
            third = 3 - m - mp
            assert out.gates == (LocalX("01", 1), Gcx(0, third, 1, "01"))
            assert _same_matrix(c, out)


def test_collapse_leaves_equal_values_alone():
    c = Circuit(2, (Gcx(0, 1, 1, "01"), Gcx(0, 1, 1, "01")))
    assert pass_collapse_gcx_pair(c).gates == c.gates


def test_fuse_cinc_rewrites_adjacent_pair():
    for value in range(3):
        c = Circuit(2, (Gcx(0, value, 1, "01"), Gcx(0, value, 1, "02")))
        out = pass_fuse_cinc(c)
        assert out.gates == (Cinc(0, value, 1),)
        assert _same_matrix(c, out)


def test_fuse_cinc_requires_01_then_02_order():
    # the reversed application order is a different operator; no fusion
    c = Circuit(2, (Gcx(0, 1, 1, "02"), Gcx(0, 1, 1, "01")))
    assert pass_fuse_cinc(c).gates == c.gates


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("use_cinc", [False, True])
def test_simplify_preserves_matrix(use_cinc):
    rng = np.random.default_rng(11)
    for _ in range(5):
        gates = tuple(_GATE_POOL[i] for i in rng.integers(0, len(_GATE_POOL), size=30))
        c = Circuit(2, gates)
        out = simplify(c, use_cinc=use_cinc)
        assert _same_matrix(c, out)
        if use_cinc is False:
            assert count_gates(out).cinc == count_gates(c).cinc  # none created


def test_simplify_collapses_circuit_times_inverse():
    # a circuit followed by its inverse simplifies to (almost) nothing
    fwd = (
        Rotation("z", "01", 0, 0.5),
        Gcx(0, 1, 1, "01"),
        Rotation("y", "12", 1, 1.1),
    )
    inv = (
        Rotation("y", "12", 1, -1.1),
        Gcx(0, 1, 1, "01"),
        Rotation("z", "01", 0, -0.5),
    )
    out = simplify(Circuit(2, fwd + inv))
    assert out.gates == ()


def test_simplify_pulls_phase_to_front():
    c = Circuit(1, (Rotation("x", "01", 0, 1.0), GlobalPhase(0.3), GlobalPhase(0.4)))
    out = simplify(c)
    assert isinstance(out.gates[0], GlobalPhase)
    assert out.gates[0].phi == pytest.approx(0.7)
    assert count_gates(out).phases == 1


def test_simplify_idempotent():
    rng = np.random.default_rng(13)
    gates = tuple(_GATE_POOL[i] for i in rng.integers(0, len(_GATE_POOL), size=30))
    once = simplify(Circuit(2, gates))
    twice = simplify(once)
    assert once.gates == twice.gates
