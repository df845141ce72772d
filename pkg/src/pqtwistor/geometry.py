"""Tensor calculus at a point for para-quaternionic structures.

Index conventions (all arrays are plain ``numpy`` float arrays):

* ``gamma[i, j, k]`` is the ``e_i`` component of ``nabla_{e_j} e_k``.
* ``dgamma[i, j, k, m]`` is the derivative of ``gamma[i, j, k]`` along ``e_m`` (chart mode).
* ``R[i, j, k, l]`` is the ``e_i`` component of ``R(e_k, e_l) e_j`` where
  ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``.
* Vector-valued 2-forms ``B[i, j, k] = (B(e_j, e_k))^i``; 2-forms ``F[j, k] = F(e_j, e_k)``.
* ``nabla_J[a, k, i, j]`` is ``((nabla_{e_k} J_a))^i_j``.
* Frame mode: ``c[i, j, k]`` is the ``e_k`` component of ``[e_i, e_j]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import EPS, StructureTriple, commutator
from .expr import Const, Expr, Neg, PoleError, evaluate, parse_expr, serialize_expr
from .jet import jet_eval

CONNECTIONS = ("levi-civita", "explicit", "levi-civita-plus-S")


class DegeneratePoint(ArithmeticError):
    """The data cannot be evaluated at this point (pole, singular or mis-signed metric)."""


class SpecError(ValueError):
    pass


def to_expr(value, coords: Sequence[str]) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse_expr(value, coords)
    v = float(value)
    return Neg(arg=Const(-v)) if v < 0 else Const(v)


def _expr_array(values, shape, coords) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    src = np.asarray(values, dtype=object) if values is not None else None
    for idx in np.ndindex(*shape):
        arr[idx] = to_expr(0.0 if src is None else src[idx], coords)
    return arr


@dataclass
class ManifoldSpec:
    """Chart or left-invariant frame data of an almost para-quaternionic manifold."""

    name: str
    mode: str
    labels: tuple
    metric: np.ndarray
    J: tuple
    connection: str = "levi-civita"
    gamma: np.ndarray | None = None
    S: np.ndarray | None = None
    structure: np.ndarray | None = None
    sample_box: tuple = (-1.0, 1.0)
    sample_points: int = 32
    note: str = ""

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return self.dim // 4

    @classmethod
    def chart(cls, name, coords, metric, J, connection="levi-civita", gamma=None, S=None, **kw) -> "ManifoldSpec":
        coords = tuple(coords)
        d = len(coords)
        if d % 4:
            raise SpecError(f"dimension must be a multiple of 4, got {d}")
        if connection not in CONNECTIONS:
            raise SpecError(f"unknown connection {connection!r}")
        return cls(
            name=name,
            mode="chart",
            labels=coords,
            metric=_expr_array(metric, (d, d), coords),
            J=tuple(_expr_array(m, (d, d), coords) for m in J),
            connection=connection,
            gamma=_expr_array(gamma, (d, d, d), coords) if connection == "explicit" else None,
            S=_expr_array(S, (d, d, d), coords) if connection == "levi-civita-plus-S" else None,
            **kw,
        )

    @classmethod
    def frame(cls, name, labels, metric, J, structure, connection="levi-civita", gamma=None, S=None, **kw) -> "ManifoldSpec":
        labels = tuple(labels)
        d = len(labels)
        if d % 4:
            raise SpecError(f"dimension must be a multiple of 4, got {d}")
        if connection not in CONNECTIONS:
            raise SpecError(f"unknown connection {connection!r}")
        f = lambda a, shape: np.zeros(shape) if a is None else np.array(a, dtype=float).reshape(shape)
        return cls(
            name=name,
            mode="frame",
            labels=labels,
            metric=f(metric, (d, d)),
            J=tuple(f(m, (d, d)) for m in J),
            connection=connection,
            gamma=f(gamma, (d, d, d)) if connection == "explicit" else None,
            S=f(S, (d, d, d)) if connection == "levi-civita-plus-S" else None,
            structure=f(structure, (d, d, d)),
            **kw,
        )

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.sample_box
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.dim,)).copy()
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.dim,)).copy()
        return lo, hi

    def midpoint(self) -> np.ndarray:
        lo, hi = self.box()
        return 0.5 * (lo + hi)

    def sample(self, count: int, seed: int) -> np.ndarray:
        if self.mode == "frame":
            # left-invariant data: every point looks the same, keep the count for bookkeeping
            return np.zeros((count, self.dim))
        lo, hi = self.box()
        rng = np.random.default_rng(seed)
        return rng.uniform(lo, hi, size=(count, self.dim))

    def jacobi_residual(self) -> float:
        if self.mode != "frame":
            return 0.0
        c = self.structure
        # [[e_i, e_j], e_k] + cyclic
        t = np.einsum("ijm,mkn->ijkn", c, c)
        cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
        return float(np.max(np.abs(cyc)))

    def validate(self, point=None, par1_tol: float = 1e-8) -> None:
        """Structural checks plus signature and para-quaternionic identities at one point."""
        d = self.dim
        if d % 4 or d == 0:
            raise SpecError(f"dimension must be a positive multiple of 4, got {d}")
        if self.mode not in ("chart", "frame"):
            raise SpecError(f"unknown mode {self.mode!r}")
        if self.mode == "frame":
            c = self.structure
            if np.max(np.abs(c + np.transpose(c, (1, 0, 2)))) > 0:
                raise SpecError("structure constants must be antisymmetric in the first two indices")
            if self.jacobi_residual() > 1e-10:
                raise SpecError(f"structure constants violate the Jacobi identity (residual {self.jacobi_residual():.3g})")
        else:
            for idx in itertools.product(range(d), repeat=2):
                if idx[0] < idx[1] and self.metric[idx] != self.metric[idx[::-1]]:
                    raise SpecError(f"metric component g{idx} differs from its transpose")
        p = self.midpoint() if point is None else np.asarray(point, dtype=float)
        try:
            pf = PointFrame(self, p)
            pf.g
        except DegeneratePoint as exc:
            raise SpecError(f"{self.name}: {exc}") from exc
        res = pf.triple.par1_residuals()
        bad = {k: v for k, v in res.items() if v > par1_tol}
        if bad:
            raise SpecError(f"{self.name}: para-quaternionic identities fail at {p.tolist()}: {bad}")

    def to_text(self) -> str:
        """Serialize as a spec file (see ``specfile.load_spec``)."""
        from .specfile import dump_spec

        return dump_spec(self)


# --------------------------------------------------------------------------
# jets of arrays of expressions


def _array_jets(arr: np.ndarray, p: np.ndarray):
    d = p.shape[0]
    val = np.zeros(arr.shape)
    grad = np.zeros(arr.shape + (d,))
    hess = np.zeros(arr.shape + (d, d))
    for idx, e in np.ndenumerate(arr):
        if e.is_constant:
            val[idx] = evaluate(e, p)
            continue
        j = jet_eval(e, p)
        val[idx] = j.value
        grad[idx] = j.grad
        hess[idx] = j.hess
    return val, grad, hess


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(a, b) - np.outer(b, a)


# trace pairings recovering omega_a; each entry is (sign, p, q) meaning sign * Tr(J_p nabla J_q) / d
OMEGA_PAIRINGS = {
    0: ((-1, 2, 1), (1, 1, 2)),
    1: ((-1, 2, 0), (1, 0, 2)),
    2: ((-1, 1, 0), (1, 0, 1)),
}


class PointFrame:
    """Everything evaluated at one point, computed lazily.

    ``connection`` overrides the spec's connection; ``levi_civita()`` returns
    the frame of the metric connection at the same point.
    """

    def __init__(self, spec: ManifoldSpec, point, connection: str | None = None):
        self.spec = spec
        self.point = np.asarray(point, dtype=float)
        self.connection = connection or spec.connection
        if self.point.shape != (spec.dim,):
            raise ValueError(f"point must have {spec.dim} coordinates")
        self._parent = None

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def is_frame(self) -> bool:
        return self.spec.mode == "frame"

    def levi_civita(self) -> "PointFrame":
        if self.connection == "levi-civita":
            return self
        other = PointFrame(self.spec, self.point, "levi-civita")
        other._parent = self
        return other

    def _source(self):
        return self._parent if self._parent is not None else self

    # -- raw jets -------------------------------------------------------------

    @cached_property
    def _metric_jets(self):
        src = self._source()
        if src is not self:
            return src._metric_jets
        d = self.dim
        if self.is_frame:
            g = self.spec.metric
            out = (g, np.zeros((d, d, d)), np.zeros((d, d, d, d)))
        else:
            try:
                out = _array_jets(self.spec.metric, self.point)
            except PoleError as exc:
                raise DegeneratePoint(str(exc)) from exc
        g = out[0]
        if not np.all(np.isfinite(g)):
            raise DegeneratePoint(f"non-finite metric at {self.point.tolist()}")
        w = np.linalg.eigvalsh(0.5 * (g + g.T))
        scale = max(float(np.max(np.abs(w))), 1e-300)
        if np.min(np.abs(w)) < 1e-10 * scale:
            raise DegeneratePoint(f"singular metric at {self.point.tolist()}")
        npos, nneg = int(np.sum(w > 0)), int(np.sum(w < 0))
        if npos != nneg:
            raise DegeneratePoint(f"metric signature ({npos},{nneg}) is not neutral at {self.point.tolist()}")
        return out

    @cached_property
    def _J_jets(self):
        src = self._source()
        if src is not self:
            return src._J_jets
        d = self.dim
        if self.is_frame:
            J = np.stack(self.spec.J)
            return J, np.zeros((3, d, d, d)), np.zeros((3, d, d, d, d))
        try:
            parts = [_array_jets(m, self.point) for m in self.spec.J]
        except PoleError as exc:
            raise DegeneratePoint(str(exc)) from exc
        return tuple(np.stack([p[i] for p in parts]) for i in range(3))

    @property
    def g(self) -> np.ndarray:
        return self._metric_jets[0]

    @cached_property
    def ginv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    @property
    def J(self) -> np.ndarray:
        return self._J_jets[0]

    @property
    def dJ(self) -> np.ndarray:
        """dJ[a, i, j, m] = d_m (J_a)^i_j."""
        return self._J_jets[1]

    @property
    def ddJ(self) -> np.ndarray:
        return self._J_jets[2]

    @cached_property
    def triple(self) -> StructureTriple:
        return StructureTriple(*self.J)

    # -- connection -------------------------------------------------------------

    @cached_property
    def _lc(self):
        """Levi-Civita symbols and their derivatives."""
        src = self._source()
        if src is not self and "_lc" in src.__dict__:
            return src._lc
        g, dg, ddg = self._metric_jets
        ginv = self.ginv
        d = self.dim
        if self.is_frame:
            c = self.spec.structure
            clow = np.einsum("ijm,mk->ijk", c, g)
            low = 0.5 * (clow - np.transpose(clow, (1, 2, 0)) + np.transpose(clow, (2, 0, 1)))
            # low[i, j, k] = g(nabla_{e_i} e_j, e_k)
            gamma = np.einsum("mk,ijk->mij", ginv, low)
            return gamma, np.zeros((d, d, d, d))
        # low[l, j, k] = 1/2 (d_j g_lk + d_k g_jl - d_l g_jk)
        low = 0.5 * (
            np.einsum("lkj->ljk", dg) + np.einsum("jlk->ljk", dg) - np.einsum("jkl->ljk", dg)
        )
        gamma = np.einsum("il,ljk->ijk", ginv, low)
        dlow = 0.5 * (
            np.einsum("lkjm->ljkm", ddg) + np.einsum("jlkm->ljkm", ddg) - np.einsum("jklm->ljkm", ddg)
        )
        dginv = -np.einsum("ia,abm,bl->ilm", ginv, dg, ginv)
        dgamma = np.einsum("ilm,ljk->ijkm", dginv, low) + np.einsum("il,ljkm->ijkm", ginv, dlow)
        return gamma, dgamma

    @cached_property
    def _connection(self):
        d = self.dim
        kind = self.connection
        if kind == "levi-civita":
            return self._lc
        if self.is_frame:
            if kind == "explicit":
                return self.spec.gamma, np.zeros((d, d, d, d))
            gamma, dgamma = self._lc
            return gamma + self.spec.S, dgamma
        try:
            if kind == "explicit":
                val, grad, _ = _array_jets(self.spec.gamma, self.point)
                return val, grad
            sval, sgrad, _ = _array_jets(self.spec.S, self.point)
        except PoleError as exc:
            raise DegeneratePoint(str(exc)) from exc
        gamma, dgamma = self._lc
        return gamma + sval, dgamma + sgrad

    @property
    def gamma(self) -> np.ndarray:
        return self._connection[0]

    @property
    def dgamma(self) -> np.ndarray:
        return self._connection[1]

    @cached_property
    def S(self) -> np.ndarray:
        """Difference tensor to the Levi-Civita connection, S[i, j, k] = (S_{e_j} e_k)^i."""
        return self.gamma - self._lc[0]

    # -- curvature, torsion ----------------------------------------------------

    @cached_property
    def R(self) -> np.ndarray:
        G, dG = self.gamma, self.dgamma
        quad = np.einsum("ikm,mlj->ijkl", G, G) - np.einsum("ilm,mkj->ijkl", G, G)
        if self.is_frame:
            return quad - np.einsum("klm,imj->ijkl", self.spec.structure, G)
        return np.einsum("iljk->ijkl", dG) - np.einsum("ikjl->ijkl", dG) + quad

    @cached_property
    def T(self) -> np.ndarray:
        G = self.gamma
        T = G - np.transpose(G, (0, 2, 1))
        if self.is_frame:
            T = T - np.transpose(self.spec.structure, (2, 0, 1))
        return T

    def bracket(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Bracket of two constant-coefficient frame fields (frame mode only)."""
        return np.einsum("j,k,jkm->m", X, Y, self.spec.structure)

    @cached_property
    def N(self) -> np.ndarray:
        """N[a, i, j, k]: Nijenhuis tensor of J_a."""
        out = []
        for a in range(3):
            J, eps = self.J[a], EPS[a]
            if self.is_frame:
                c = self.spec.structure
                N = (
                    np.einsum("pj,qk,pqm->mjk", J, J, c)
                    + eps * np.transpose(c, (2, 0, 1))
                    - np.einsum("mr,pj,pkr->mjk", J, J, c)
                    - np.einsum("mr,qk,jqr->mjk", J, J, c)
                )
            else:
                dJ = self.dJ[a]  # dJ[i, j, m] = d_m J^i_j
                N = (
                    np.einsum("mj,ikm->ijk", J, dJ)
                    - np.einsum("mk,ijm->ijk", J, dJ)
                    + np.einsum("im,mjk->ijk", J, dJ)
                    - np.einsum("im,mkj->ijk", J, dJ)
                )
            out.append(N)
        return np.stack(out)

    @cached_property
    def nabla_J(self) -> np.ndarray:
        G = self.gamma
        out = []
        for a in range(3):
            J = self.J[a]
            dJ = np.transpose(self.dJ[a], (2, 0, 1))  # [k, i, j]
            out.append(dJ + np.einsum("ikm,mj->kij", G, J) - np.einsum("mkj,im->kij", G, J))
        return np.stack(out)

    # -- omega forms -------------------------------------------------------------

    @cached_property
    def _omega_data(self):
        d = self.dim
        J, NJ = self.J, self.nabla_J
        omega = np.zeros((3, d))
        for a, pairs in OMEGA_PAIRINGS.items():
            for sign, p, q in pairs:
                omega[a] += sign * np.einsum("im,kmi->k", J[p], NJ[q]) / d
            omega[a] /= len(pairs)
        J1, J2, J3 = J
        o1, o2, o3 = omega
        recon = np.stack(
            [
                -np.einsum("k,ij->kij", o3, J2) + np.einsum("k,ij->kij", o2, J3),
                np.einsum("k,ij->kij", o3, J1) + np.einsum("k,ij->kij", o1, J3),
                np.einsum("k,ij->kij", o2, J1) + np.einsum("k,ij->kij", o1, J2),
            ]
        )
        return omega, _maxabs(NJ - recon)

    @property
    def omega(self) -> np.ndarray:
        return self._omega_data[0]

    @property
    def omega_defect(self) -> float:
        return self._omega_data[1]

    @cached_property
    def domega(self) -> np.ndarray:
        """domega[a, k, l] = (d omega_a)(e_k, e_l)."""
        if self.is_frame:
            return -np.einsum("klm,am->akl", self.spec.structure, self.omega)
        d = self.dim
        J, dJ, ddJ = self.J, self.dJ, self.ddJ
        G, dG = self.gamma, self.dgamma
        NJ = self.nabla_J
        # dNJ[b, k, i, j, m] = d_m (nabla_k J_b)^i_j
        dNJ = (
            np.einsum("bijkm->bkijm", ddJ)
            + np.einsum("ikpm,bpj->bkijm", dG, J)
            + np.einsum("ikp,bpjm->bkijm", G, dJ)
            - np.einsum("pkjm,bip->bkijm", dG, J)
            - np.einsum("pkj,bipm->bkijm", G, dJ)
        )
        domega_k = np.zeros((3, d, d))  # [a, k, m] = d_m omega_a(e_k)
        for a, pairs in OMEGA_PAIRINGS.items():
            for sign, p, q in pairs:
                domega_k[a] += sign * (
                    np.einsum("ipm,kpi->km", dJ[p], NJ[q]) + np.einsum("ip,kpim->km", J[p], dNJ[q])
                ) / d
            domega_k[a] /= len(pairs)
        return np.transpose(domega_k, (0, 2, 1)) - domega_k

    @cached_property
    def A(self) -> np.ndarray:
        """The 2-forms appearing in the curvature-commutator identities."""
        o1, o2, o3 = self.omega
        dw = self.domega
        return np.stack([dw[0] + wedge(o2, o3), dw[1] + wedge(o3, o1), dw[2] - wedge(o1, o2)])

    # -- Ricci forms and splitting -----------------------------------------------

    @cached_property
    def rho(self) -> np.ndarray:
        """rho[a, k, l] = eps_a / 2 Tr(J_a R(e_k, e_l))."""
        return np.stack([0.5 * EPS[a] * np.einsum("ji,ijkl->kl", self.J[a], self.R) for a in range(3)])

    def curvature_split(self, rho_signs=(1, 1, 1)):
        """R' = R - 1/(2n) sum_a rho_a J_a and the max of |[R'(e_k, e_l), J_a]|."""
        rho = self.rho * np.asarray(rho_signs, dtype=float)[:, None, None]
        part = np.einsum("akl,aij->ijkl", rho, self.J) / (2 * self.n)
        Rp = self.R - part
        comm = max(
            _maxabs(np.einsum("imkl,mj->ijkl", Rp, Ja) - np.einsum("im,mjkl->ijkl", Ja, Rp)) for Ja in self.J
        )
        recon = _maxabs(self.R - Rp - part)
        return Rp, part, comm, recon

    def rel1_residuals(self) -> dict[str, float]:
        """Curvature-commutator identities with omega-built 2-forms; the third line under each reading."""
        R, (J1, J2, J3), (A1, A2, A3) = self.R, self.J, self.A

        def comm(Ja):
            return np.einsum("imkl,mj->ijkl", R, Ja) - np.einsum("im,mjkl->ijkl", Ja, R)

        def outer(A, Jb):
            return np.einsum("kl,ij->ijkl", A, Jb)

        out = {
            "J1": _maxabs(comm(J1) - (-outer(A3, J2) + outer(A2, J3))),
            "J2": _maxabs(comm(J2) - (outer(A3, J1) + outer(A1, J3))),
        }
        c3 = comm(J3)
        for name, A in (("A1", A1), ("A2", A2), ("A3", A3)):
            out[f"J3[{name}]"] = _maxabs(c3 - (outer(A2, J1) + outer(A, J2)))
        return out

    def rho_vs_domega(self) -> dict[str, np.ndarray]:
        """Differences rho_a - n * (+A1, -A2, +A3), plus the unscaled variant."""
        n = self.n
        signs = np.array([1.0, -1.0, 1.0])[:, None, None]
        return {
            "scaled": self.rho - n * signs * self.A,
            "unscaled": self.rho - signs * self.A,
        }

    # -- metric-dependent structure ----------------------------------------------

    @cached_property
    def F(self) -> np.ndarray:
        """F[a, j, k] = g(J_a e_j, e_k)."""
        return np.einsum("aij,ik->ajk", self.J, self.g)

    def compatibility_residual(self) -> float:
        return max(_maxabs(self.F[a] + self.F[a].T) for a in range(3))


# --------------------------------------------------------------------------
# four-dimensional conformal geometry

PAIRS4 = tuple((a, b) for a in range(4) for b in range(a + 1, 4))


def _levi_civita_symbol(d: int = 4) -> np.ndarray:
    eps = np.zeros((d,) * d)
    for perm in itertools.permutations(range(d)):
        inv = sum(1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j])
        eps[perm] = -1.0 if inv % 2 else 1.0
    return eps


_EPS4 = _levi_civita_symbol(4)


def hodge_matrix(g: np.ndarray, orientation: int = 1) -> np.ndarray:
    """Hodge star on 2-forms as a 6x6 matrix on the coefficients F_ab, a < b."""
    ginv = np.linalg.inv(g)
    vol = orientation * math.sqrt(abs(np.linalg.det(g))) * _EPS4
    H = np.zeros((6, 6))
    for col, (a, b) in enumerate(PAIRS4):
        E = np.zeros((4, 4))
        E[a, b], E[b, a] = 1.0, -1.0
        up = ginv @ E @ ginv.T
        star = 0.5 * np.einsum("ab,abcd->cd", up, vol)
        H[:, col] = [star[c, d] for c, d in PAIRS4]
    return H


def two_form_vector(F: np.ndarray) -> np.ndarray:
    return np.array([F[a, b] for a, b in PAIRS4])


def weyl_tensor(g: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Fully covariant Weyl tensor W_abcd from R[i, j, k, l] (indices as in this module).

    R_abcd = g_ai R^i_bcd = g(R(e_c, e_d) e_b, e_a).
    """
    d = g.shape[0]
    ginv = np.linalg.inv(g)
    Rl = np.einsum("ai,ibcd->abcd", g, R)
    ric = np.einsum("ibid->bd", R)
    s = float(np.einsum("bd,bd->", ginv, ric))
    gg = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    kn = (
        np.einsum("ac,bd->abcd", g, ric)
        - np.einsum("ad,bc->abcd", g, ric)
        - np.einsum("bc,ad->abcd", g, ric)
        + np.einsum("bd,ac->abcd", g, ric)
    )
    return Rl - kn / (d - 2) + s * gg / ((d - 1) * (d - 2))


def weyl_operator(g: np.ndarray, W: np.ndarray) -> np.ndarray:
    """W acting on 2-forms, (W F)_ab = sum_{c<d} W_ab^cd F_cd."""
    ginv = np.linalg.inv(g)
    Wup = np.einsum("abij,ic,jd->abcd", W, ginv, ginv)
    M = np.zeros((6, 6))
    for r, (a, b) in enumerate(PAIRS4):
        for c_, (c, d) in enumerate(PAIRS4):
            M[r, c_] = Wup[a, b, c, d]
    return M


@dataclass
class WeylData:
    plus: float
    minus: float
    orientation: int
    duality_residual: float
    scalar_curvature: float
    operator: np.ndarray = field(repr=False)


def weyl_decomposition(pf: PointFrame, tol: float = 1e-8) -> WeylData:
    if pf.dim != 4:
        raise ValueError("the Weyl decomposition is implemented for 4-dimensional specs only")
    lc = pf.levi_civita()
    g = lc.g
    H = hodge_matrix(g, 1)
    F = [two_form_vector(lc.F[a]) for a in range(3)]
    # orient so that the first fundamental form is self-dual, then demand the same of the others
    orientation = -1 if _maxabs(H @ F[0] - F[0]) > _maxabs(H @ F[0] + F[0]) else 1
    H = orientation * H
    scale = max(max(_maxabs(f) for f in F), 1e-300)
    duality = max(_maxabs(H @ f - f) for f in F) / scale
    if duality > tol:
        raise ValueError(f"fundamental forms do not span the self-dual subbundle (residual {duality:.3g})")
    W = weyl_tensor(g, lc.R)
    Wop = weyl_operator(g, W)
    Pp = 0.5 * (np.eye(6) + H)
    Pm = 0.5 * (np.eye(6) - H)
    ric = np.einsum("ibid->bd", lc.R)
    s = float(np.einsum("bd,bd->", lc.ginv, ric))
    return WeylData(
        plus=float(np.linalg.norm(Pp @ Wop @ Pp)),
        minus=float(np.linalg.norm(Pm @ Wop @ Pm)),
        orientation=orientation,
        duality_residual=duality,
        scalar_curvature=s,
        operator=Wop,
    )


# --------------------------------------------------------------------------
# function-style entry points


def christoffel(spec: ManifoldSpec, p):
    pf = PointFrame(spec, p)
    return pf.gamma, pf.dgamma


def curvature(spec: ManifoldSpec, p) -> np.ndarray:
    return PointFrame(spec, p).R


def torsion(spec: ManifoldSpec, p) -> np.ndarray:
    return PointFrame(spec, p).T


def nijenhuis(spec: ManifoldSpec, a: int, p) -> np.ndarray:
    return PointFrame(spec, p).N[_index(a)]


def nabla_J(spec: ManifoldSpec, a: int, p) -> np.ndarray:
    """Array [k, i, j] = (nabla_{e_k} J_a)^i_j."""
    return PointFrame(spec, p).nabla_J[_index(a)]


def extract_omegas(spec: ManifoldSpec, p):
    pf = PointFrame(spec, p)
    o = pf.omega
    return o[0], o[1], o[2], pf.omega_defect


def ricci_forms(spec: ManifoldSpec, p):
    r = PointFrame(spec, p).rho
    return r[0], r[1], r[2]


def curvature_split(spec: ManifoldSpec, p):
    Rp, part, comm, recon = PointFrame(spec, p).curvature_split()
    return Rp, part, {"commutator": comm, "reconstruction": recon}


def weyl_asd(spec: ManifoldSpec, p):
    w = weyl_decomposition(PointFrame(spec, p))
    return w.plus, w.minus


def fundamental_forms(spec: ManifoldSpec, p, tol: float = 1e-8):
    pf = PointFrame(spec, p)
    res = pf.compatibility_residual()
    if res > tol:
        raise ValueError(f"metric is not skew with respect to the triple (residual {res:.3g})")
    return pf.F[0], pf.F[1], pf.F[2]


def _index(a: int) -> int:
    if a not in (1, 2, 3):
        raise ValueError(f"structure index must be 1, 2 or 3, got {a!r}")
    return a - 1


def describe_expr_array(arr: np.ndarray) -> list:
    return [[serialize_expr(e) for e in row] for row in arr]
