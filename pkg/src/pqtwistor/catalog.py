"""Built-in example manifolds with their expected verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import EPS, STANDARD_ORDER, UNITS, commutant_projection, pq_mul, standard_metric, standard_triple
from .geometry import ManifoldSpec

COORDS4 = ("x", "y", "u", "v")
COORDS8 = ("x1", "y1", "u1", "v1", "x2", "y2", "u2", "v2")

H, F, I = "holds", "fails", "inconclusive"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[], ManifoldSpec]
    expected: dict = field(default_factory=dict)
    note: str = ""

    def spec(self) -> ManifoldSpec:
        return self.build()


def _num(v: float) -> str:
    return repr(float(v)) if v >= 0 else f"(-{repr(float(-v))})"


def _matrix_strings(m: np.ndarray) -> list:
    return [[_num(x) for x in row] for row in m]


# --------------------------------------------------------------------------
# builders


def flat_r4() -> ManifoldSpec:
    T = standard_triple(1)
    return ManifoldSpec.chart(
        "flat-r4",
        COORDS4,
        standard_metric(1),
        T.mats,
        note="flat neutral R^4 with the constant triple of minus right multiplication by j1, j2, j3",
    )


def conf_flat(f: str = "0.1*x*y") -> ManifoldSpec:
    T = standard_triple(1)
    scale = f"exp(2*({f}))"
    g = [[0] * 4 for _ in range(4)]
    g[0][0] = g[1][1] = scale
    g[2][2] = g[3][3] = f"-{scale}"
    return ManifoldSpec.chart(
        "conf-flat",
        COORDS4,
        g,
        T.mats,
        note=f"conformally flat metric exp(2 f) diag(1,1,-1,-1) with f = {f}",
    )


def prod_surfaces(k1: float = 1.0, k2: float = 1.0) -> ManifoldSpec:
    """Neutral product of two surfaces with Gaussian curvatures k1 and k2.

    The second factor is negative definite; k2 is the curvature of that factor
    as it sits in the product, so its metric is minus the positive metric of
    curvature -k2.  With this labelling k1 = -k2 is conformally flat.  The
    triple is the standard one conjugated by the orthonormal rescaling, so the
    metric stays skew with respect to each structure.
    """
    A = f"(1+{_num(k1)}*(x^2+y^2)/4)"
    B = f"(1-{_num(k2)}*(u^2+v^2)/4)"
    g = [[0] * 4 for _ in range(4)]
    g[0][0] = g[1][1] = f"{A}^-2"
    g[2][2] = g[3][3] = f"-({B}^-2)"
    # J'[i, j] = J[i, j] D[j] / D[i] with D = diag(1/A, 1/A, 1/B, 1/B)
    ratio = {(0, 0): None, (0, 1): f"{A}/{B}", (1, 0): f"{B}/{A}", (1, 1): None}
    mats = []
    for J in standard_triple(1).mats:
        m = [[0] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(4):
                if J[i, j] == 0:
                    continue
                r = ratio[(i // 2, j // 2)]
                sign = "" if J[i, j] > 0 else "-"
                m[i][j] = f"{sign}1" if r is None else f"{sign}({r})"
        mats.append(m)
    # the conformal factors have poles at radius 2 / sqrt(k) when the sign is unfavourable;
    # keep the sampled radius below 90% of that
    worst = max(-k1, k2, 0.0)
    half = 1.0 if worst == 0 else min(1.0, 0.9 * np.sqrt(2.0 / worst))
    name = "prod-surfaces" if (k1, k2) == (1.0, 1.0) else f"prod-surfaces({k1:g},{k2:g})"
    return ManifoldSpec.chart(
        name,
        COORDS4,
        g,
        mats,
        sample_box=(-half, half),
        note=f"product of surfaces with Gaussian curvatures {k1:g} and {k2:g} (second factor negative definite)",
    )


def prod_surfaces_opposite() -> ManifoldSpec:
    spec = prod_surfaces(1.0, -1.0)
    spec.name = "prod-surfaces-opposite"
    return spec


def _gl2_structure() -> np.ndarray:
    """Commutator bracket of the para-quaternions in the standard coordinate order."""
    order = list(STANDARD_ORDER)
    c = np.zeros((4, 4, 4))
    for i in range(4):
        for j in range(4):
            a, b = UNITS[order[i]], UNITS[order[j]]
            c[i, j] = (pq_mul(a, b) - pq_mul(b, a)).as_array()[order]
    return c


def frame_hpc_4d() -> ManifoldSpec:
    return ManifoldSpec.frame(
        "frame-hpc-4d",
        ("e1", "e2", "e3", "e4"),
        standard_metric(1),
        standard_triple(1).mats,
        _gl2_structure(),
        note="group of invertible para-quaternions (Lie algebra gl(2,R)) with a left-invariant triple of right multiplications",
    )


def flat_r8() -> ManifoldSpec:
    return ManifoldSpec.chart(
        "flat-r8",
        COORDS8,
        standard_metric(2),
        standard_triple(2).mats,
        note="two orthogonal copies of flat-r4",
    )


# Difference tensor S[i, j, k] = (S_{e_j} e_k)^i of a para-quaternionic connection on flat R^8
# whose torsion S_X Y - S_Y X is a 3-form of type (1,2)+(2,1) for every J_a.  Found by solving the
# linear type conditions with S_X restricted to the commutant plus span{J_a}; entries are exact.
PQKT_S = {
    (0, 0, 0): 0.5, (0, 0, 7): 0.5, (0, 1, 1): -0.5, (0, 1, 6): 0.5, (0, 2, 2): 0.5, (0, 2, 5): -0.5,
    (0, 3, 3): 0.5, (0, 3, 4): 0.5, (0, 4, 3): -0.5, (0, 5, 2): 0.5, (0, 6, 1): -0.5, (0, 7, 0): 0.5,
    (1, 0, 1): 0.5, (1, 0, 6): -0.5, (1, 1, 0): 0.5, (1, 1, 7): 0.5, (1, 2, 3): 0.5, (1, 2, 4): 0.5,
    (1, 3, 2): -0.5, (1, 3, 5): 0.5, (1, 4, 2): 0.5, (1, 5, 3): 0.5, (1, 6, 0): 0.5, (1, 7, 1): 0.5,
    (2, 0, 2): 0.5, (2, 0, 5): -0.5, (2, 1, 3): 0.5, (2, 1, 4): 0.5, (2, 2, 0): 0.5, (2, 2, 7): 0.5,
    (2, 3, 1): -0.5, (2, 3, 6): 0.5, (2, 4, 1): 0.5, (2, 5, 0): 0.5, (2, 6, 3): 0.5, (2, 7, 2): 0.5,
    (3, 0, 3): 0.5, (3, 0, 4): 0.5, (3, 1, 2): -0.5, (3, 1, 5): 0.5, (3, 2, 1): 0.5, (3, 2, 6): -0.5,
    (3, 3, 0): 0.5, (3, 3, 7): 0.5, (3, 4, 0): -0.5, (3, 5, 1): 0.5, (3, 6, 2): -0.5, (3, 7, 3): 0.5,
    (4, 0, 3): 1.0, (4, 4, 6): -0.5, (4, 5, 7): 0.5, (4, 6, 4): -0.5, (4, 7, 5): -0.5,
    (5, 0, 2): -1.0, (5, 4, 7): -0.5, (5, 5, 6): -0.5, (5, 6, 5): -0.5, (5, 7, 4): 0.5,
    (6, 0, 1): -1.0, (6, 4, 4): -0.5, (6, 5, 5): -0.5, (6, 6, 6): -0.5, (6, 7, 7): 0.5,
    (7, 0, 0): 1.0, (7, 4, 5): -0.5, (7, 5, 4): 0.5, (7, 6, 7): -0.5, (7, 7, 6): -0.5,
}


def pqkt_tensor() -> np.ndarray:
    S = np.zeros((8, 8, 8))
    for idx, v in PQKT_S.items():
        S[idx] = v
    return S


# coefficients of a covector field xi (components as expressions) generating a symmetric
# para-quaternionic difference tensor; adding it changes curvature but not torsion
PQKT_XI = ("0.2*x2", "0.1*y1", "0", "0.15*v2", "0", "0.1*x1", "0", "0")


def symmetric_pq_coefficients(triple) -> np.ndarray:
    """C[i, j, k, m]: coefficient of xi_m in (S_{e_j} e_k)^i for

    S_X Y = xi(X) Y + xi(Y) X + sum_a eps_a (xi(J_a X) J_a Y + xi(J_a Y) J_a X),

    which is symmetric in X, Y and takes values in the para-quaternionic algebra.
    """
    d = triple.dim
    eye = np.eye(d)
    C = np.einsum("jm,ik->ijkm", eye, eye) + np.einsum("km,ij->ijkm", eye, eye)
    for a in range(3):
        J = triple[a]
        C += EPS[a] * (np.einsum("mj,ik->ijkm", J, J) + np.einsum("mk,ij->ijkm", J, J))
    return C


def flat_r8_pqkt(xi=PQKT_XI) -> ManifoldSpec:
    T = standard_triple(2)
    C = symmetric_pq_coefficients(T)
    base = pqkt_tensor()
    S = np.empty((8, 8, 8), dtype=object)
    for idx in np.ndindex(8, 8, 8):
        terms = [_num(base[idx])] if base[idx] else []
        for m in range(8):
            if C[idx + (m,)] and xi[m] != "0":
                terms.append(f"{_num(C[idx + (m,)])}*({xi[m]})")
        S[idx] = " + ".join(terms) if terms else "0"
    return ManifoldSpec.chart(
        "flat-r8-pqkt",
        COORDS8,
        standard_metric(2),
        T.mats,
        connection="levi-civita-plus-S",
        S=S,
        note="flat R^8 with a para-quaternionic connection whose torsion is a constant 3-form of type (1,2)+(2,1), "
        "plus a symmetric term that leaves the torsion unchanged and produces curvature; "
        "the connection does not preserve the metric",
    )


# null vectors spanning the shear used by perturbed-J; E = u v^T g - v u^T g squares to zero
_SHEAR_U = (0, 2)
_SHEAR_V = (5, 7)
PERTURBATION = "0.4*sin(x1) + 0.3*y2"


def perturbed_j(f: str = PERTURBATION) -> ManifoldSpec:
    """Standard triple on flat R^8 moved by the isometry I + f E, E nilpotent and skew.

    J'_a = (I + f E) J_a (I - f E) = J_a + f (E J_a - J_a E) - f^2 E J_a E, so the
    para-quaternionic identities and compatibility with the metric hold exactly
    while the structures stop being integrable.
    """
    g = standard_metric(2)
    u = np.zeros(8)
    v = np.zeros(8)
    u[list(_SHEAR_U)] = 1.0
    v[list(_SHEAR_V)] = 1.0
    E = np.outer(u, v) @ g - np.outer(v, u) @ g
    mats = []
    for J in standard_triple(2).mats:
        lin = E @ J - J @ E
        quad = -E @ J @ E
        m = [[None] * 8 for _ in range(8)]
        for i in range(8):
            for j in range(8):
                terms = []
                if J[i, j]:
                    terms.append(_num(J[i, j]))
                if lin[i, j]:
                    terms.append(f"{_num(lin[i, j])}*({f})")
                if quad[i, j]:
                    terms.append(f"{_num(quad[i, j])}*({f})^2")
                m[i][j] = " + ".join(terms) if terms else "0"
        mats.append(m)
    return ManifoldSpec.chart(
        "perturbed-J",
        COORDS8,
        g,
        mats,
        note=f"flat R^8 with the standard triple moved by a pointwise isometry I + f E, f = {f}; "
        "the identities and compatibility hold, integrability is intentionally broken",
    )


# --------------------------------------------------------------------------
# difference tensors on flat R^4


PHI = np.array([0.3, -0.2, 0.5, 0.1])


def commutant_part(seed: int = 3) -> np.ndarray:
    """A fixed nonzero S0 with every S0_X commuting with the triple."""
    rng = np.random.default_rng(seed)
    T = standard_triple(1)
    S0 = np.zeros((4, 4, 4))
    for j in range(4):
        M = np.round(rng.uniform(-1, 1, (4, 4)), 1)
        S0[:, j, :] = commutant_projection(M, T)
    return S0


def s_tensor(s: np.ndarray, S0: np.ndarray | None = None) -> np.ndarray:
    """S[i, j, k] = sum_a s^a_j (J_a)^i_k + S0[i, j, k]."""
    T = standard_triple(1)
    S = np.einsum("aj,aik->ijk", s, np.stack(T.mats))
    return S if S0 is None else S + S0


def s_relation_forms(phi: np.ndarray = PHI) -> np.ndarray:
    """s^a = eps_a phi o J_a, so that s^1(J1 X) = s^2(J2 X) = s^3(J3 X) = phi(X)."""
    T = standard_triple(1)
    return np.stack([EPS[a] * phi @ T[a] for a in range(3)])


def _flat_r4_with(name: str, S: np.ndarray, note: str) -> ManifoldSpec:
    T = standard_triple(1)
    return ManifoldSpec.chart(
        name,
        COORDS4,
        standard_metric(1),
        T.mats,
        connection="levi-civita-plus-S",
        S=_tensor_strings(S),
        note=note,
    )


def flat_r4_srel() -> ManifoldSpec:
    return _flat_r4_with(
        "flat-r4-srel",
        s_tensor(s_relation_forms(), commutant_part()),
        "flat R^4 plus a constant S whose 1-forms satisfy the s-relation, with a commutant part",
    )


def flat_r4_s1() -> ManifoldSpec:
    s = np.zeros((3, 4))
    s[0] = PHI
    return _flat_r4_with(
        "flat-r4-s1",
        s_tensor(s),
        "flat R^4 plus S_X = phi(X) J1; its torsion has a nonzero (0,2)-part",
    )


def flat_r4_s0() -> ManifoldSpec:
    return _flat_r4_with(
        "flat-r4-s0",
        commutant_part(),
        "flat R^4 plus an S commuting with the triple (all 1-forms vanish)",
    )


def _tensor_strings(S: np.ndarray):
    out = np.empty(S.shape, dtype=object)
    for idx, v in np.ndenumerate(S):
        out[idx] = _num(v)
    return out


# --------------------------------------------------------------------------
# registry with frozen expected verdicts (default seed 0, 32 points, default tolerances)

_ALL_HOLD_4 = {
    "par1": H, "compat": H, "ltor": H, "idric": H, "theorem-four": H, "prop-t25": H,
    "cor-t27": H, "cor-t272": H, "zamkovoy-pq": H, "pqkt": H,
}
_ALL_HOLD_8 = {k: v for k, v in _ALL_HOLD_4.items() if k != "theorem-four"} | {"cor-cur": H}

ENTRIES: dict[str, CatalogEntry] = {}


def _register(name, build, expected, note=""):
    ENTRIES[name] = CatalogEntry(name, build, dict(expected), note)


_register("flat-r4", flat_r4, _ALL_HOLD_4, "everything holds, all curvature vanishes")
_register("conf-flat", conf_flat, _ALL_HOLD_4, "Weyl tensor vanishes; the Ricci-form identity holds")
_register(
    "prod-surfaces",
    prod_surfaces,
    _ALL_HOLD_4 | {"idric": F},
    "W+ is nonzero and the Ricci-form identity fails; the four-dimensional equivalence holds with both indicators false",
)
_register(
    "prod-surfaces-opposite",
    prod_surfaces_opposite,
    _ALL_HOLD_4,
    "opposite curvatures: conformally flat, W+ = 0 and both indicators true",
)
_register("frame-hpc-4d", frame_hpc_4d, _ALL_HOLD_4, "all Nijenhuis tensors vanish")
_register("flat-r8", flat_r8, _ALL_HOLD_8, "")
_register(
    "flat-r8-pqkt",
    flat_r8_pqkt,
    _ALL_HOLD_8,
    "torsion of the required type, nonzero Ricci forms; the curvature implication holds non-vacuously",
)
_register(
    "perturbed-J",
    perturbed_j,
    _ALL_HOLD_8 | {"zamkovoy-pq": F, "cor-cur": I},
    "structures are not integrable; the Levi-Civita connection is not para-quaternionic, so the curvature implication is vacuous",
)
_register(
    "flat-r4-srel",
    flat_r4_srel,
    _ALL_HOLD_4 | {"pqkt": F},
    "torsion has no (0,2)-part but is not a 3-form",
)
_register(
    "flat-r4-s1",
    flat_r4_s1,
    _ALL_HOLD_4 | {"ltor": F, "pqkt": F},
    "torsion (0,2)-part is nonzero; the equivalences hold with every constituent false",
)
_register("flat-r4-s0", flat_r4_s0, _ALL_HOLD_4 | {"pqkt": F}, "all 1-forms vanish; torsion is not a 3-form")


def catalog_list() -> list[str]:
    return list(ENTRIES)


def catalog_entry(name: str) -> CatalogEntry:
    try:
        return ENTRIES[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(ENTRIES)}") from None


def catalog_get(name: str) -> ManifoldSpec:
    return catalog_entry(name).spec()
