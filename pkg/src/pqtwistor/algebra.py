"""Para-quaternions, the Lorentz sphere model, and pointwise endomorphism algebra."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

EPS = (1, 1, -1)


@dataclass(frozen=True)
class ParaQuaternion:
    """x + y j1 + z j2 + w j3 with j1^2 = j2^2 = 1, j3^2 = -1, j1 j2 = j3."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    w: float = 0.0

    def __mul__(self, other: "ParaQuaternion") -> "ParaQuaternion":
        return pq_mul(self, other)

    def __add__(self, other):
        return ParaQuaternion(self.x + other.x, self.y + other.y, self.z + other.z, self.w + other.w)

    def __sub__(self, other):
        return ParaQuaternion(self.x - other.x, self.y - other.y, self.z - other.z, self.w - other.w)

    def scale(self, c: float) -> "ParaQuaternion":
        return ParaQuaternion(c * self.x, c * self.y, c * self.z, c * self.w)

    def conj(self) -> "ParaQuaternion":
        return ParaQuaternion(self.x, -self.y, -self.z, -self.w)

    def norm(self) -> float:
        """q conj(q), a real number of signature (2, 2)."""
        return self.x**2 - self.y**2 - self.z**2 + self.w**2

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.w], dtype=float)

    @property
    def imaginary(self) -> "ImaginaryPQ":
        return ImaginaryPQ(self.y, self.z, self.w)


ONE = ParaQuaternion(1.0)
J1 = ParaQuaternion(0.0, 1.0)
J2 = ParaQuaternion(0.0, 0.0, 1.0)
J3 = ParaQuaternion(0.0, 0.0, 0.0, 1.0)
UNITS = (ONE, J1, J2, J3)


def pq_mul(a: ParaQuaternion, b: ParaQuaternion) -> ParaQuaternion:
    return ParaQuaternion(
        a.x * b.x + a.y * b.y + a.z * b.z - a.w * b.w,
        a.x * b.y + a.y * b.x - a.z * b.w + a.w * b.z,
        a.x * b.z + a.z * b.x + a.y * b.w - a.w * b.y,
        a.x * b.w + a.w * b.x + a.y * b.z - a.z * b.y,
    )


@dataclass(frozen=True)
class ImaginaryPQ:
    """Coefficients of b1 J1 + b2 J2 + b3 J3; Lorentz norm b1^2 + b2^2 - b3^2."""

    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0

    def q(self) -> float:
        return self.b1**2 + self.b2**2 - self.b3**2

    def inner(self, other: "ImaginaryPQ") -> float:
        return self.b1 * other.b1 + self.b2 * other.b2 - self.b3 * other.b3

    def as_array(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.b3], dtype=float)

    def as_pq(self) -> ParaQuaternion:
        return ParaQuaternion(0.0, self.b1, self.b2, self.b3)

    def __add__(self, other):
        return ImaginaryPQ(self.b1 + other.b1, self.b2 + other.b2, self.b3 + other.b3)

    def scale(self, c: float) -> "ImaginaryPQ":
        return ImaginaryPQ(c * self.b1, c * self.b2, c * self.b3)


def lorentz_inner(a: ImaginaryPQ, b: ImaginaryPQ) -> float:
    """-Re(a conj(b)), which equals ``a.inner(b)``."""
    return -pq_mul(a.as_pq(), b.as_pq().conj()).x


def cross_product(a: ImaginaryPQ, b: ImaginaryPQ) -> ImaginaryPQ:
    """Sum over i != k of a^i b^k J_i J_k, read off as an imaginary element."""
    xs, ys = a.as_array(), b.as_array()
    units = (J1, J2, J3)
    total = ParaQuaternion()
    for i in range(3):
        for k in range(3):
            if i != k:
                total = total + pq_mul(units[i], units[k]).scale(xs[i] * ys[k])
    return total.imaginary


def sample_hyperboloid(kind: str, count: int, seed: int, t_max: float = 2.0) -> list[ImaginaryPQ]:
    """Seeded points of S^2_1(+1) (``plus``) or the b3 > 0 sheet of S^2_1(-1) (``minus``)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if kind not in ("plus", "minus"):
        raise ValueError(f"kind must be 'plus' or 'minus', got {kind!r}")
    rng = np.random.default_rng(seed)
    t = rng.uniform(-t_max, t_max, count)
    theta = rng.uniform(0.0, 2 * np.pi, count)
    if kind == "plus":
        b = np.stack([np.cosh(t) * np.cos(theta), np.cosh(t) * np.sin(theta), np.sinh(t)], axis=1)
    else:
        b = np.stack([np.sinh(t) * np.cos(theta), np.sinh(t) * np.sin(theta), np.cosh(t)], axis=1)
    return [ImaginaryPQ(*row) for row in b]


# --------------------------------------------------------------------------
# matrices

# coordinate k of the standard 4-dimensional model carries this para-quaternion component
# (x, y, u, v) <-> (1, j3, j1, j2); with it the flat metric is diag(1, 1, -1, -1)
STANDARD_ORDER = (0, 3, 1, 2)


def right_mult_matrix(q: ParaQuaternion, order: Iterable[int] = STANDARD_ORDER) -> np.ndarray:
    """Matrix of p -> p q in the given coordinate ordering of components."""
    order = list(order)
    m = np.zeros((4, 4))
    for col, comp in enumerate(order):
        image = pq_mul(UNITS[comp], q).as_array()
        m[:, col] = image[order]
    return m


def standard_triple(n: int = 1) -> "StructureTriple":
    """Constant hyper-paracomplex triple on R^{4n}, block diagonal.

    J_a is minus right multiplication by j_a: right multiplication reverses
    products, so the sign is what makes J1 J2 = J3 rather than -J3.
    """
    blocks = [-right_mult_matrix(u) for u in (J1, J2, J3)]
    eye = np.eye(n)
    return StructureTriple(*(np.kron(eye, b) + 0.0 for b in blocks))


def standard_metric(n: int = 1) -> np.ndarray:
    return np.kron(np.eye(n), np.diag([1.0, 1.0, -1.0, -1.0]))


@dataclass(frozen=True)
class StructureTriple:
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray

    eps = EPS

    @property
    def mats(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.J1, self.J2, self.J3)

    @property
    def dim(self) -> int:
        return self.J1.shape[0]

    def __getitem__(self, a: int) -> np.ndarray:
        return self.mats[a]

    def par1_residuals(self) -> dict[str, float]:
        eye = np.eye(self.dim)
        J1, J2, J3 = self.mats
        return {
            "J1^2-I": _maxabs(J1 @ J1 - eye),
            "J2^2-I": _maxabs(J2 @ J2 - eye),
            "J3^2+I": _maxabs(J3 @ J3 + eye),
            "J1J2-J3": _maxabs(J1 @ J2 - J3),
            "J1J2+J2J1": _maxabs(J1 @ J2 + J2 @ J1),
        }

    def validate(self, tol: float = 1e-10) -> None:
        bad = {k: v for k, v in self.par1_residuals().items() if v > tol}
        if bad:
            raise ValueError(f"triple violates the para-quaternionic identities: {bad}")


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def build_J(b: ImaginaryPQ, triple: StructureTriple) -> np.ndarray:
    return b.b1 * triple.J1 + b.b2 * triple.J2 + b.b3 * triple.J3


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def commutant_projection(m: np.ndarray, triple: StructureTriple) -> np.ndarray:
    """Average of h m h^{-1} over {I, J1, J2, J3}: the part commuting with every J_a."""
    J1, J2, J3 = triple.mats
    return 0.25 * (m + J1 @ m @ J1 + J2 @ m @ J2 - J3 @ m @ J3)


# --------------------------------------------------------------------------
# vector-valued 2-forms, stored as B[i, j, k] = (B(e_j, e_k))^i


def proj02(B: np.ndarray, J: np.ndarray, eps: int, tol: float = 1e-8) -> np.ndarray:
    """1/4 (eps B(X,Y) + B(JX,JY) - J B(JX,Y) - J B(X,JY)), componentwise.

    On a tensor of type (0,2) with respect to J this returns ``eps * B``; see
    :func:`proj02_normalized` for the idempotent version.
    """
    d = J.shape[0]
    if _maxabs(J @ J - eps * np.eye(d)) > tol:
        raise ValueError(f"J^2 differs from {eps:+d} I beyond {tol}")
    bjj = np.einsum("ipq,pj,qk->ijk", B, J, J)
    jb_jx = np.einsum("im,mpk,pj->ijk", J, B, J)
    jb_jy = np.einsum("im,mjq,qk->ijk", J, B, J)
    return 0.25 * (eps * B + bjj - jb_jx - jb_jy)


def proj02_normalized(B: np.ndarray, J: np.ndarray, eps: int, tol: float = 1e-8) -> np.ndarray:
    return eps * proj02(B, J, eps, tol)


# --------------------------------------------------------------------------
# splitting a (1,2)-tensor S[i, j, k] = (S_{e_j} e_k)^i


class SSplit(NamedTuple):
    S0: np.ndarray
    s: np.ndarray  # shape (3, d): s^a(e_j)
    residual: float


def s_split(S: np.ndarray, triple: StructureTriple) -> SSplit:
    """S_X = S0_X + sum_a s^a(X) J_a with [S0_X, J_a] = 0, extracted by traces."""
    d = triple.dim
    S_X = np.transpose(S, (1, 0, 2))  # S_X[j] is the matrix of S_{e_j}
    s = np.empty((3, d))
    for a, (J, e) in enumerate(zip(triple.mats, EPS)):
        s[a] = e * np.einsum("im,jmi->j", J, S_X) / d
    S0_X = S_X - np.einsum("aj,aik->jik", s, np.stack(triple.mats))
    residual = max(_maxabs(np.einsum("jim,mk->jik", S0_X, J) - np.einsum("im,jmk->jik", J, S0_X)) for J in triple.mats)
    return SSplit(np.transpose(S0_X, (1, 0, 2)), s, residual)


def endo_field(S: np.ndarray, X: np.ndarray) -> np.ndarray:
    """The matrix S_X for a vector X."""
    return np.einsum("ijk,j->ik", S, X)
