"""Single-qutrit generators, embedded gates, and the Lie-algebra scaffolding.

Index convention: qutrit 0 is the leftmost (most significant) tensor
factor, so a basis state of an n-qutrit register reads as an n-digit
base-3 number.  Level labels "01", "02", "12" name the pair of basis
states an operator acts on; e.g. sz("01") = diag(1, -1, 0).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeneratorId",
    "SubspaceId",
    "LEVELS",
    "commutation_selftest",
    "CommutationReport",
    "cinc_matrix",
    "diagonal_basis",
    "embed_local",
    "gcx_matrix",
    "generator",
    "maximal_abelian_check",
    "AbelianReport",
    "place",
    "random_subspace_element",
    "rotation",
    "subspace_membership",
    "subspace_project",
]

LEVELS = ("01", "02", "12")


class GeneratorId(enum.Enum):
    SX01 = "sx01"
    SX02 = "sx02"
    SX12 = "sx12"
    SY01 = "sy01"
    SY02 = "sy02"
    SY12 = "sy12"
    SZ01 = "sz01"
    SZ02 = "sz02"
    SZ12 = "sz12"
    D = "d"
    DBAR = "dbar"
    I3 = "i3"
    X01 = "x01"
    X02 = "x02"
    X12 = "x12"
    INC = "inc"


def _two_level(ij: str, block: np.ndarray) -> np.ndarray:
    i, j = int(ij[0]), int(ij[1])
    m = np.zeros((3, 3), dtype=complex)
    m[i, i], m[i, j] = block[0, 0], block[0, 1]
    m[j, i], m[j, j] = block[1, 0], block[1, 1]
    return m


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _build_generator_table() -> dict[GeneratorId, np.ndarray]:
    t: dict[GeneratorId, np.ndarray] = {}
    for axis in "xyz":
        for ij in LEVELS:
            gid = GeneratorId[f"S{axis.upper()}{ij}"]
            t[gid] = _two_level(ij, _PAULI[axis])
    t[GeneratorId.D] = np.diag([1.0, -1.0, -1.0]).astype(complex)
    t[GeneratorId.DBAR] = np.diag([-1.0, -1.0, 1.0]).astype(complex)
    t[GeneratorId.I3] = np.eye(3, dtype=complex)
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    for ij in LEVELS:
        x = _two_level(ij, swap)
        k = 3 - int(ij[0]) - int(ij[1])
        x[k, k] = 1.0
        t[GeneratorId[f"X{ij}"]] = x
    t[GeneratorId.INC] = t[GeneratorId.X02] @ t[GeneratorId.X01]
    return t


_GENERATORS = _build_generator_table()


def generator(gid: GeneratorId, override: dict[GeneratorId, np.ndarray] | None = None) -> np.ndarray:
    """Fresh copy of a named 3x3 generator; ``override`` swaps entries in
    (used by the self-test fault injection)."""
    if override is not None and gid in override:
        return np.array(override[gid], dtype=complex)
    return _GENERATORS[gid].copy()


def rotation(axis: str, ij: str, theta: float) -> np.ndarray:
    """Single-qutrit rotation exp(-i theta/2 sigma_axis^ij); period 4*pi."""
    if axis not in "xyz" or ij not in LEVELS:
        raise ValueError(f"bad rotation axis/level: {axis!r}/{ij!r}")
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    if axis == "x":
        block = np.array([[c, -1j * s], [-1j * s, c]])
    elif axis == "y":
        block = np.array([[c, -s], [s, c]])
    else:
        block = np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]])
    m = _two_level(ij, block)
    k = 3 - int(ij[0]) - int(ij[1])
    m[k, k] = 1.0
    return m


def place(n: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker product over n qutrit slots, identity where unspecified."""
    m = np.eye(1, dtype=complex)
    for pos in range(n):
        m = np.kron(m, ops.get(pos, _GENERATORS[GeneratorId.I3]))
    return m


def embed_local(g: np.ndarray, n: int, target: int) -> np.ndarray:
    """Single-qutrit operator g acting on ``target`` within n qutrits."""
    if not 0 <= target < n:
        raise ValueError(f"target {target} out of range for {n} qutrits")
    return place(n, {target: np.asarray(g, dtype=complex)})


def _projector(v: int) -> np.ndarray:
    p = np.zeros((3, 3), dtype=complex)
    p[v, v] = 1.0
    return p


def gcx_matrix(n: int, control: int, value: int, target: int, ij: str) -> np.ndarray:
    """GCX: apply X^ij on ``target`` when ``control`` reads ``value``."""
    if control == target:
        raise ValueError("control and target must differ")
    if value not in (0, 1, 2):
        raise ValueError(f"control value must be a trit, got {value}")
    x = _GENERATORS[GeneratorId[f"X{ij}"]]
    m = np.zeros((3**n, 3**n), dtype=complex)
    for v in range(3):
        tgt = x if v == value else _GENERATORS[GeneratorId.I3]
        m += place(n, {control: _projector(v), target: tgt})
    return m


def cinc_matrix(n: int, control: int, value: int, target: int) -> np.ndarray:
    """Controlled increment: |t> -> |t+1 mod 3> when ``control`` reads ``value``.

    Equals gcx(value -> X02) @ gcx(value -> X01) as matrices.
    """
    if control == target:
        raise ValueError("control and target must differ")
    if value not in (0, 1, 2):
        raise ValueError(f"control value must be a trit, got {value}")
    m = np.zeros((3**n, 3**n), dtype=complex)
    for v in range(3):
        tgt = _GENERATORS[GeneratorId.INC] if v == value else _GENERATORS[GeneratorId.I3]
        m += place(n, {control: _projector(v), target: tgt})
    return m


# ---------------------------------------------------------------------------
# Diagonal (Cartan subalgebra) bases
# ---------------------------------------------------------------------------

_DIAG_KINDS = {
    # kind -> the diagonal triple; the base is i * triple and the recursion
    # multiplies the same triple onto the leading qutrit.
    "z": (GeneratorId.I3, GeneratorId.SZ01, GeneratorId.SZ02),
    "d": (GeneratorId.I3, GeneratorId.D, GeneratorId.SZ12),
    "dbar": (GeneratorId.I3, GeneratorId.DBAR, GeneratorId.SZ01),
}


def diagonal_basis(
    kind: str, n: int, override: dict[GeneratorId, np.ndarray] | None = None
) -> list[np.ndarray]:
    """The 3^n commuting skew-Hermitian diagonals of the given flavor.

    Built recursively: base {i*I3, i*M1, i*M2} multiplied through by
    {I3, M1, M2} on the leading qutrit, where (M1, M2) is (sz01, sz02)
    for kind "z", (D, sz12) for "d", (Dbar, sz01) for "dbar".  All
    three flavors span the same space of imaginary diagonals.
    """
    if kind not in _DIAG_KINDS:
        raise ValueError(f"unknown diagonal basis kind {kind!r}")
    mats = [generator(g, override) for g in _DIAG_KINDS[kind]]
    basis = [1j * m for m in mats]
    for _ in range(n - 1):
        basis = [np.kron(m, b) for m in mats for b in basis]
    return basis


# ---------------------------------------------------------------------------
# Subspace membership
# ---------------------------------------------------------------------------


class SubspaceId(enum.Enum):
    """Stages of the recursive splitting of skew-Hermitian n-qutrit matrices.

    Each stage is the even/odd split of an involution: stage 0 separates
    the top-row/column coupling (odd) from the block-preserving part
    (even); stage 1 splits the even part into block-diagonal and the
    12-coupling; stage 2 compares the two lower blocks (the reflected
    chain, tagged R, compares the two upper blocks); stage 3 leaves
    I3 (x) u(3^{n-1}) plus one diagonal direction.  The *_DIAG tags are
    the commuting directions actually synthesized as multiplexed
    rotations, and DIAGONAL is the full maximal-abelian span of
    imaginary diagonals.
    """

    EVEN0 = "even0"
    ODD0 = "odd0"
    EVEN1 = "even1"
    ODD1 = "odd1"
    EVEN2 = "even2"
    ODD2 = "odd2"
    EVEN2R = "even2r"
    ODD2R = "odd2r"
    EVEN3 = "even3"
    ODD3 = "odd3"
    ODD3R = "odd3r"
    X01_DIAG = "x01_diag"
    X12_DIAG = "x12_diag"
    Z12_DIAG = "z12_diag"
    D_DIAG = "d_diag"
    DBAR_DIAG = "dbar_diag"
    DIAGONAL = "diagonal"


def _blocks(m: np.ndarray) -> tuple[int, list[list[np.ndarray]]]:
    d = m.shape[0]
    p = d // 3
    return p, [[m[i * p : (i + 1) * p, j * p : (j + 1) * p] for j in range(3)] for i in range(3)]


def _from_blocks(b: list[list[np.ndarray]]) -> np.ndarray:
    return np.block(b)


def _zero_like(p: int) -> np.ndarray:
    return np.zeros((p, p), dtype=complex)


def _sigma_diag_project(m: np.ndarray, weights: tuple[float, float, float]) -> np.ndarray:
    """Project onto {i * sigma (x) diag(real)} for a diagonal sigma pattern.

    ``weights`` is the diagonal of sigma; returns the projected matrix.
    """
    p, b = _blocks(m)
    lam = np.zeros(p)
    norm = sum(w * w for w in weights)
    for k in range(p):
        acc = 0.0
        for v in range(3):
            if weights[v]:
                acc += weights[v] * float(np.imag(b[v][v][k, k]))
        lam[k] = acc / norm
    rows = []
    for v in range(3):
        blk = 1j * weights[v] * np.diag(lam) if weights[v] else _zero_like(p)
        rows.append([blk if j == v else _zero_like(p) for j in range(3)])
    return _from_blocks(rows)


def _sigma_x_project(m: np.ndarray, iv: int, jv: int) -> np.ndarray:
    """Project onto {i * sigma_x^{iv,jv} (x) diag(real)}."""
    p, b = _blocks(m)
    lam = (np.imag(np.diagonal(b[iv][jv])) + np.imag(np.diagonal(b[jv][iv]))) / 2.0
    rows = [[_zero_like(p) for _ in range(3)] for _ in range(3)]
    rows[iv][jv] = 1j * np.diag(lam)
    rows[jv][iv] = 1j * np.diag(lam)
    return _from_blocks(rows)


def subspace_project(m: np.ndarray, s: SubspaceId) -> np.ndarray:
    """Frobenius-orthogonal projection of m onto the tagged subspace."""
    m = np.asarray(m, dtype=complex)
    p, b = _blocks(m)
    z = _zero_like(p)
    if s is SubspaceId.EVEN0:
        return _from_blocks([[b[0][0], z, z], [z, b[1][1], b[1][2]], [z, b[2][1], b[2][2]]])
    if s is SubspaceId.ODD0:
        return _from_blocks([[z, b[0][1], b[0][2]], [b[1][0], z, z], [b[2][0], z, z]])
    if s is SubspaceId.EVEN1:
        return _from_blocks([[b[0][0], z, z], [z, b[1][1], z], [z, z, b[2][2]]])
    if s is SubspaceId.ODD1:
        return _from_blocks([[z, z, z], [z, z, b[1][2]], [z, b[2][1], z]])
    if s is SubspaceId.EVEN2:
        c = (b[1][1] + b[2][2]) / 2.0
        return _from_blocks([[b[0][0], z, z], [z, c, z], [z, z, c]])
    if s is SubspaceId.ODD2:
        c = (b[1][1] - b[2][2]) / 2.0
        return _from_blocks([[z, z, z], [z, c, z], [z, z, -c]])
    if s is SubspaceId.EVEN2R:
        c = (b[0][0] + b[1][1]) / 2.0
        return _from_blocks([[c, z, z], [z, c, z], [z, z, b[2][2]]])
    if s is SubspaceId.ODD2R:
        c = (b[0][0] - b[1][1]) / 2.0
        return _from_blocks([[c, z, z], [z, -c, z], [z, z, z]])
    if s is SubspaceId.EVEN3:
        c = (b[0][0] + b[1][1] + b[2][2]) / 3.0
        return _from_blocks([[c, z, z], [z, c, z], [z, z, c]])
    if s is SubspaceId.ODD3:
        c = (b[0][0] - b[1][1] - b[2][2]) / 3.0
        return _from_blocks([[c, z, z], [z, -c, z], [z, z, -c]])
    if s is SubspaceId.ODD3R:
        c = (-b[0][0] - b[1][1] + b[2][2]) / 3.0
        return _from_blocks([[-c, z, z], [z, -c, z], [z, z, c]])
    if s is SubspaceId.X01_DIAG:
        return _sigma_x_project(m, 0, 1)
    if s is SubspaceId.X12_DIAG:
        return _sigma_x_project(m, 1, 2)
    if s is SubspaceId.Z12_DIAG:
        return _sigma_diag_project(m, (0.0, 1.0, -1.0))
    if s is SubspaceId.D_DIAG:
        return _sigma_diag_project(m, (1.0, -1.0, -1.0))
    if s is SubspaceId.DBAR_DIAG:
        return _sigma_diag_project(m, (-1.0, -1.0, 1.0))
    if s is SubspaceId.DIAGONAL:
        return np.diag(1j * np.imag(np.diagonal(m)))
    raise ValueError(f"unknown subspace {s}")


def subspace_membership(m: np.ndarray, s: SubspaceId, tol: float = 1e-10) -> tuple[bool, float]:
    """(member?, residual): max-entry distance from m to its projection."""
    resid = float(np.max(np.abs(m - subspace_project(m, s)))) if m.size else 0.0
    return resid <= tol, resid


# ---------------------------------------------------------------------------
# Random subspace elements (generator-table driven, so fault injection bites)
# ---------------------------------------------------------------------------

# Tensor-factor recipes: subspace = span{ i * g (x) H : H Hermitian } summed
# over the listed generators.  I3E0/E1/E2 are the diagonal projectors.
_E_DIAG = {
    "e0": np.diag([1.0, 0.0, 0.0]).astype(complex),
    "e1": np.diag([0.0, 1.0, 0.0]).astype(complex),
    "e2": np.diag([0.0, 0.0, 1.0]).astype(complex),
}

_SPAN_RECIPES: dict[SubspaceId, tuple] = {
    SubspaceId.EVEN0: ("e0", "e1", "e2", GeneratorId.SX12, GeneratorId.SY12),
    SubspaceId.ODD0: (GeneratorId.SX01, GeneratorId.SY01, GeneratorId.SX02, GeneratorId.SY02),
    SubspaceId.EVEN1: ("e0", "e1", "e2"),
    SubspaceId.ODD1: (GeneratorId.SX12, GeneratorId.SY12),
    SubspaceId.EVEN2: ("e0", ("e1", "e2")),
    SubspaceId.ODD2: (GeneratorId.SZ12,),
    SubspaceId.EVEN2R: (("e0", "e1"), "e2"),
    SubspaceId.ODD2R: (GeneratorId.SZ01,),
    SubspaceId.EVEN3: (GeneratorId.I3,),
    SubspaceId.ODD3: (GeneratorId.D,),
    SubspaceId.ODD3R: (GeneratorId.DBAR,),
}


def _recipe_factor(item, override) -> np.ndarray:
    if isinstance(item, GeneratorId):
        return generator(item, override)
    if isinstance(item, tuple):
        return sum(_recipe_factor(x, override) for x in item)
    return _E_DIAG[item].copy()


def _random_hermitian(p: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    return (a + a.conj().T) / 2.0


def random_subspace_element(
    s: SubspaceId,
    n: int,
    rng: np.random.Generator,
    override: dict[GeneratorId, np.ndarray] | None = None,
) -> np.ndarray:
    """Random element i * sum_k g_k (x) H_k of the tagged subspace at width n."""
    recipe = _SPAN_RECIPES[s]
    p = 3 ** (n - 1)
    out = np.zeros((3**n, 3**n), dtype=complex)
    for item in recipe:
        out += 1j * np.kron(_recipe_factor(item, override), _random_hermitian(p, rng))
    return out


@dataclass(frozen=True)
class CommutationReport:
    n: int
    trials: int
    results: tuple[tuple[str, float, bool], ...]  # (relation, worst residual, ok)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.results)

    def lines(self) -> list[str]:
        return [
            f"[{'ok' if ok else 'FAIL'}] {name:<24s} worst residual {res:.3e}"
            for name, res, ok in self.results
        ]


# Each stage: ([even, even] in even, [even, odd] in odd, [odd, odd] in even),
# for the main chain and the reflected chain.
_STAGE_RELATIONS: tuple[tuple[str, SubspaceId, SubspaceId], ...] = (
    ("stage0", SubspaceId.EVEN0, SubspaceId.ODD0),
    ("stage1", SubspaceId.EVEN1, SubspaceId.ODD1),
    ("stage2", SubspaceId.EVEN2, SubspaceId.ODD2),
    ("stage3", SubspaceId.EVEN3, SubspaceId.ODD3),
    ("stage2r", SubspaceId.EVEN2R, SubspaceId.ODD2R),
    ("stage3r", SubspaceId.EVEN3, SubspaceId.ODD3R),
)


def commutation_selftest(
    n: int,
    seed: int = 0,
    trials: int = 50,
    tol: float = 1e-10,
    override: dict[GeneratorId, np.ndarray] | None = None,
) -> CommutationReport:
    """Verify the closure pattern [k,k]<=k, [k,m]<=m, [m,m]<=k at every stage.

    The block-support part of each relation is automatic for matrices with
    the right sparsity, so every trial also checks that the sampled inputs
    are skew-Hermitian members of their claimed subspace; that part is
    what a corrupted generator table (wrong level, wrong Hermiticity --
    see the CLI fault-injection flag) actually violates.  Each relation's
    recorded residual is the worst of the input checks and the commutator
    membership.
    """
    rng = np.random.default_rng(seed)
    results = []
    for stage, k_id, m_id in _STAGE_RELATIONS:
        for pair, target in (
            ((k_id, k_id), k_id),
            ((k_id, m_id), m_id),
            ((m_id, m_id), k_id),
        ):
            worst = 0.0
            for _ in range(trials):
                x = random_subspace_element(pair[0], n, rng, override)
                y = random_subspace_element(pair[1], n, rng, override)
                for elem, sid in ((x, pair[0]), (y, pair[1])):
                    scale = max(1.0, float(np.max(np.abs(elem))))
                    _, resid = subspace_membership(elem, sid)
                    skew = float(np.max(np.abs(elem + elem.conj().T)))
                    worst = max(worst, resid / scale, skew / scale)
                comm = x @ y - y @ x
                scale = max(1.0, float(np.max(np.abs(comm))))
                _, resid = subspace_membership(comm, target)
                worst = max(worst, resid / scale)
            name = f"{stage}:[{pair[0].value},{pair[1].value}]<={target.value}"
            results.append((name, worst, worst <= tol))
    return CommutationReport(n=n, trials=trials, results=tuple(results))


@dataclass(frozen=True)
class AbelianReport:
    n: int
    pairwise_commute: bool
    span_dim_ok: bool
    commutant_in_span: bool
    worst_residual: float
    negative_control_caught: bool

    @property
    def passed(self) -> bool:
        return (
            self.pairwise_commute
            and self.span_dim_ok
            and self.commutant_in_span
            and self.negative_control_caught
        )

    def lines(self) -> list[str]:
        return [
            f"[{'ok' if self.pairwise_commute else 'FAIL'}] diagonal basis pairwise commuting",
            f"[{'ok' if self.span_dim_ok else 'FAIL'}] basis spans all 3^n imaginary diagonals",
            f"[{'ok' if self.commutant_in_span else 'FAIL'}] commutant elements lie in the span "
            f"(worst residual {self.worst_residual:.3e})",
            f"[{'ok' if self.negative_control_caught else 'FAIL'}] off-diagonal element rejected",
        ]


def maximal_abelian_check(
    n: int, seed: int = 0, trials: int = 50, tol: float = 1e-10
) -> AbelianReport:
    """The diagonal basis is maximally abelian inside the skew-Hermitians.

    Pairwise commutators of basis elements are exactly zero (they are
    diagonal).  A random skew-Hermitian forced to commute with the whole
    basis (i.e. projected onto the diagonal) must land in the span, and a
    matrix with any off-diagonal entry must fail to commute with at least
    one basis element.
    """
    rng = np.random.default_rng(seed)
    basis = diagonal_basis("z", n)
    d = 3**n

    pairwise = all(
        not np.any(basis[i] @ basis[j] - basis[j] @ basis[i])
        for i in range(len(basis))
        for j in range(i + 1, len(basis))
    )

    stacked = np.stack([np.real(-1j * np.diagonal(b)) for b in basis])
    span_ok = np.linalg.matrix_rank(stacked) == d

    worst = 0.0
    caught = True
    for _ in range(trials):
        raw = 1j * _random_hermitian(d, rng)
        commutant = np.diag(np.diagonal(raw))  # the only part commuting with all diagonals
        coeffs, *_ = np.linalg.lstsq(stacked.T, np.imag(np.diagonal(commutant)), rcond=None)
        recon = stacked.T @ coeffs
        worst = max(worst, float(np.max(np.abs(recon - np.imag(np.diagonal(commutant))))))
        off = raw - commutant
        if np.max(np.abs(off)) > 1e-3:
            fails = max(float(np.max(np.abs(off @ b - b @ off))) for b in basis)
            caught = caught and fails > tol
    return AbelianReport(
        n=n,
        pairwise_commute=pairwise,
        span_dim_ok=bool(span_ok),
        commutant_in_span=worst <= tol,
        worst_residual=worst,
        negative_control_caught=caught,
    )
