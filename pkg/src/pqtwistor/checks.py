"""Named verdicts over sampled points.

Every check returns a :class:`CheckReport`.  Plain checks hold when every
judged residual is below tolerance at every evaluated point, fail when some
residual exceeds ten times the tolerance, and are inconclusive in between.
Equivalence checks classify each constituent statement per point and hold when
the classifications agree everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .algebra import EPS, build_J, commutator, proj02, s_split, sample_hyperboloid
from .geometry import DegeneratePoint, ManifoldSpec, PointFrame, weyl_decomposition

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
FAIL_FACTOR = 10.0

DEFAULT_TOLERANCES = {
    "par1": 1e-10,
    "compat": 1e-10,
    "ltor": 1e-8,
    "idric": 1e-7,
    "theorem-four": 1e-7,
    "prop-t25": 1e-10,
    "cor-t27": 1e-10,
    "cor-t272": 1e-10,
    "zamkovoy-pq": 1e-8,
    "pqkt": 1e-8,
    "cor-cur": 1e-7,
}
OMEGA_DEFECT_TOL = 1e-8
ADMISSIBLE_TOL = 1e-8
DEFAULT_J_SAMPLES = 64

CHECK_NAMES = tuple(DEFAULT_TOLERANCES)
FOUR_DIM_ONLY = ("theorem-four",)
EIGHT_DIM_ONLY = ("cor-cur",)

# cyclic index triples (a, b, c), zero-based, used by the Ricci-form identity
CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass
class CheckReport:
    check: str
    spec: str
    seed: int
    tolerance: float
    points: list
    residuals: list  # per point: dict name -> float, or None when skipped
    judged: list  # residual names entering the verdict
    verdict: str
    skipped: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def max_residual(self, name: str) -> float:
        vals = [r[name] for r in self.residuals if r is not None and name in r]
        return max(vals) if vals else float("nan")

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "spec": self.spec,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "judged": list(self.judged),
            "max_residuals": {k: _finite(self.max_residual(k)) for k in self._names()},
            "points": [[float(x) for x in p] for p in self.points],
            "residuals": [None if r is None else {k: _finite(v) for k, v in r.items()} for r in self.residuals],
            "skipped": list(self.skipped),
            "notes": list(self.notes),
            "extra": _jsonable(self.extra),
        }

    def _names(self) -> list:
        names = []
        for r in self.residuals:
            for k in r or ():
                if k not in names:
                    names.append(k)
        return names


def _finite(x):
    x = float(x)
    return x if np.isfinite(x) else None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _finite(obj)
    return obj


def threshold_verdict(residuals: Sequence, judged: Iterable[str], tol: float) -> str:
    values = [r[k] for r in residuals if r is not None for k in judged if k in r]
    if not values:
        return INCONCLUSIVE
    if all(v < tol for v in values):
        return HOLDS
    if any(v > FAIL_FACTOR * tol or not np.isfinite(v) for v in values):
        return FAILS
    return INCONCLUSIVE


def classify(value: float, tol: float):
    """True (vanishes), False (clearly nonzero) or None (between tol and 10 tol)."""
    if value < tol:
        return True
    if value > FAIL_FACTOR * tol:
        return False
    return None


def equivalence_verdict(classes_per_point: Sequence) -> str:
    """Each entry is the list of classifications of the constituents at one point."""
    evaluated = [c for c in classes_per_point if c is not None]
    if not evaluated:
        return INCONCLUSIVE
    ambiguous = False
    for cls in evaluated:
        definite = {c for c in cls if c is not None}
        if len(definite) > 1:
            return FAILS
        if None in cls:
            ambiguous = True
    return INCONCLUSIVE if ambiguous else HOLDS


def _subseed(seed: int, tag: int) -> int:
    return int(np.random.SeedSequence([seed, tag]).generate_state(1)[0])


def sampled_structures(triple, count: int, seed: int):
    """Sampled complex (``minus``) and paracomplex (``plus``) structures of the triple."""
    minus = [build_J(b, triple) for b in sample_hyperboloid("minus", count, _subseed(seed, 1))]
    plus = [build_J(b, triple) for b in sample_hyperboloid("plus", count, _subseed(seed, 2))]
    return minus, plus


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


class _Run:
    """Point loop with skip bookkeeping shared by all checks."""

    def __init__(self, name, spec: ManifoldSpec, points, seed, tol):
        self.name = name
        self.spec = spec
        self.points = np.asarray(points, dtype=float).reshape(-1, spec.dim)
        self.seed = seed
        self.tol = DEFAULT_TOLERANCES[name] if tol is None else tol
        self.residuals = []
        self.skipped = []
        self.notes = []
        self.extra = {}

    def frames(self):
        for idx, p in enumerate(self.points):
            pf = PointFrame(self.spec, p)
            try:
                pf.g
                pf.J
                yield idx, pf
            except DegeneratePoint as exc:
                self.skip(idx, str(exc))

    def skip(self, idx, reason):
        self.residuals.append(None)
        self.skipped.append({"index": idx, "reason": reason})

    def report(self, judged, verdict=None) -> CheckReport:
        if verdict is None:
            verdict = threshold_verdict(self.residuals, judged, self.tol)
        if self.skipped and len(self.skipped) == len(self.points):
            self.notes.append("all points skipped")
            verdict = INCONCLUSIVE
        return CheckReport(
            check=self.name,
            spec=self.spec.name,
            seed=self.seed,
            tolerance=self.tol,
            points=self.points.tolist(),
            residuals=self.residuals,
            judged=list(judged),
            verdict=verdict,
            skipped=self.skipped,
            notes=self.notes,
            extra=self.extra,
        )

    def guarded(self, idx, fn):
        """Run ``fn`` and record a skip if the point turns out degenerate."""
        try:
            return fn()
        except DegeneratePoint as exc:
            self.skip(idx, str(exc))
            return None


# --------------------------------------------------------------------------
# algebraic checks


def check_par1(spec, points, seed=0, tol=None) -> CheckReport:
    run = _Run("par1", spec, points, seed, tol)
    for idx, pf in run.frames():
        run.residuals.append(pf.triple.par1_residuals())
    return run.report(["J1^2-I", "J2^2-I", "J3^2+I", "J1J2-J3", "J1J2+J2J1"])


def check_compatibility(spec, points, seed=0, tol=None) -> CheckReport:
    run = _Run("compat", spec, points, seed, tol)
    for idx, pf in run.frames():
        run.residuals.append({f"J{a + 1}": _maxabs(pf.F[a] + pf.F[a].T) for a in range(3)})
    return run.report(["J1", "J2", "J3"])


# --------------------------------------------------------------------------
# torsion


def torsion02_residuals(T, triple, minus, plus) -> dict:
    out = {
        "Z-": max(_maxabs(proj02(T, J, -1)) for J in minus),
        "Z+": max(_maxabs(proj02(T, J, 1)) for J in plus),
    }
    for a in range(3):
        out[f"J{a + 1}"] = _maxabs(proj02(T, triple[a], EPS[a]))
    return out


def check_ltor(spec, points, nsamples_J=DEFAULT_J_SAMPLES, seed=0, tol=None) -> CheckReport:
    run = _Run("ltor", spec, points, seed, tol)
    ratios = []
    for idx, pf in run.frames():
        res = run.guarded(idx, lambda: _ltor_point(pf, nsamples_J, seed))
        if res is None:
            continue
        run.residuals.append(res)
        lo, hi = sorted((res["Z-"], res["Z+"]))
        ratios.append(hi / lo if lo > 0 else (1.0 if hi == 0 else float("inf")))
    run.extra["sheet_ratio_max"] = max(ratios, default=float("nan"))
    defects = [r["omega_defect"] for r in run.residuals if r is not None]
    if defects and max(defects) > OMEGA_DEFECT_TOL:
        run.notes.append("connection is not para-quaternionic at some points (omega defect above tolerance)")
    return run.report(["Z-", "Z+", "J1", "J2", "J3"])


def _ltor_point(pf, nsamples_J, seed):
    minus, plus = sampled_structures(pf.triple, nsamples_J, seed)
    res = torsion02_residuals(pf.T, pf.triple, minus, plus)
    res["omega_defect"] = pf.omega_defect
    return res


# --------------------------------------------------------------------------
# Ricci-form identity


def idric_residual(rho: np.ndarray, J: np.ndarray, variant: str = "consistent") -> float:
    """Max over cyclic (a, b, c) and basis pairs of the Ricci-form identity.

    ``literal`` uses the printed signs for all three cyclic triples.  The
    printed form for (a, b, c) = (2, 3, 1) contradicts the other two (together
    they would force zero scalar curvature), so ``consistent`` flips the sign
    of the rho_c terms for that triple only.
    """
    if variant not in ("consistent", "literal"):
        raise ValueError(f"variant must be 'consistent' or 'literal', got {variant!r}")
    worst = 0.0
    for a, b, c in CYCLIC:
        Jb = J[b]
        kappa = EPS[c]
        if variant == "consistent" and (a, b, c) == (1, 2, 0):
            kappa = -kappa
        lhs = Jb.T @ rho[a] @ Jb + EPS[b] * rho[a] - kappa * (Jb.T @ rho[c] + rho[c] @ Jb)
        worst = max(worst, _maxabs(lhs))
    return worst


def check_idric(spec, points, seed=0, tol=None) -> CheckReport:
    run = _Run("idric", spec, points, seed, tol)
    for idx, pf in run.frames():
        res = run.guarded(
            idx,
            lambda: {
                "idric": idric_residual(pf.rho, pf.J, "consistent"),
                "idric_literal": idric_residual(pf.rho, pf.J, "literal"),
                "omega_defect": pf.omega_defect,
            },
        )
        if res is not None:
            run.residuals.append(res)
    return run.report(["idric"])


def check_theorem_four(spec, points, seed=0, tol=None, idric_tol=None) -> CheckReport:
    if spec.dim != 4:
        raise ValueError("theorem-four applies to 4-dimensional specs only")
    run = _Run("theorem-four", spec, points, seed, tol)
    tol_w = run.tol
    tol_r = DEFAULT_TOLERANCES["idric"] if idric_tol is None else idric_tol
    classes = []
    indicators = []
    for idx, pf in run.frames():

        def point():
            lc = pf.levi_civita()
            w = weyl_decomposition(lc)
            return {
                "W+": w.plus,
                "W-": w.minus,
                "idric": idric_residual(lc.rho, lc.J, "consistent"),
                "idric_literal": idric_residual(lc.rho, lc.J, "literal"),
                "compat": pf.compatibility_residual(),
                "omega_defect": lc.omega_defect,
            }

        try:
            res = point()
        except DegeneratePoint as exc:
            run.skip(idx, str(exc))
            classes.append(None)
            continue
        except ValueError as exc:
            run.skip(idx, f"orientation: {exc}")
            classes.append(None)
            continue
        run.residuals.append(res)
        c = [classify(res["W+"], tol_w), classify(res["idric"], tol_r)]
        classes.append(c)
        indicators.append([res["W+"] < tol_w, res["idric"] < tol_r])
    run.extra["indicators"] = indicators
    run.extra["agreement"] = (
        sum(a == b for a, b in indicators) / len(indicators) if indicators else float("nan")
    )
    run.extra["idric_tolerance"] = tol_r
    return run.report(["W+", "idric"], equivalence_verdict(classes))


# --------------------------------------------------------------------------
# difference tensors S = nabla' - nabla


def _S_at(pf: PointFrame, S_field):
    if S_field is None:
        return pf.S
    if callable(S_field):
        return np.asarray(S_field(pf.point), dtype=float)
    return np.asarray(S_field, dtype=float)


def s_relation_residual(s: np.ndarray, triple) -> float:
    """max over basis X of |s1(J1 X) - s2(J2 X)| + |s2(J2 X) - s3(J3 X)|."""
    sj = np.stack([s[a] @ triple[a] for a in range(3)])
    return float(np.max(np.abs(sj[0] - sj[1]) + np.abs(sj[1] - sj[2])))


def eq5_residual(S: np.ndarray, Js, sign: int = 1) -> float:
    """max over J and basis Y of |J[S_Y, J] - sign [S_{JY}, J]|."""
    d = S.shape[0]
    SY = np.transpose(S, (1, 0, 2))  # SY[k] = S_{e_k}
    worst = 0.0
    for J in Js:
        SJY = np.einsum("ijk,jm->mik", S, J)  # S_{J e_m}
        for k in range(d):
            lhs = J @ commutator(SY[k], J)
            rhs = commutator(SJY[k], J)
            worst = max(worst, _maxabs(lhs - sign * rhs))
    return worst


def alternation(S: np.ndarray) -> np.ndarray:
    """(X, Y) -> S_X Y - S_Y X."""
    return S - np.transpose(S, (0, 2, 1))


def _s_point(pf, S_field, nsamples_J, seed):
    S = _S_at(pf, S_field)
    split = s_split(S, pf.triple)
    minus, plus = sampled_structures(pf.triple, nsamples_J, seed)
    return S, split, minus, plus


def check_prop_t25(spec, points, S_field=None, nsamples_J=DEFAULT_J_SAMPLES, seed=0, tol=None) -> CheckReport:
    run = _Run("prop-t25", spec, points, seed, tol)
    classes = []
    for idx, pf in run.frames():
        try:
            S, split, minus, plus = _s_point(pf, S_field, nsamples_J, seed)
        except DegeneratePoint as exc:
            run.skip(idx, str(exc))
            classes.append(None)
            continue
        res = {
            "s-relation": s_relation_residual(split.s, pf.triple),
            "eq5": eq5_residual(S, minus),
            "eq5'": eq5_residual(S, plus),
            "admissible": split.residual,
        }
        run.residuals.append(res)
        classes.append(_classes(res, ("s-relation", "eq5", "eq5'"), run.tol, run))
    return run.report(["s-relation", "eq5", "eq5'"], _admissible_verdict(run, classes))


def check_cor_t27(spec, points, S_field=None, nsamples_J=DEFAULT_J_SAMPLES, seed=0, tol=None) -> CheckReport:
    run = _Run("cor-t27", spec, points, seed, tol)
    classes = []
    for idx, pf in run.frames():
        try:
            S, split, minus, plus = _s_point(pf, S_field, nsamples_J, seed)
            T_base = pf.levi_civita().T
        except DegeneratePoint as exc:
            run.skip(idx, str(exc))
            classes.append(None)
            continue
        T_new = T_base + alternation(S)
        diff = 0.0
        for Js, e in ((minus, -1), (plus, 1)):
            for J in Js:
                diff = max(diff, _maxabs(proj02(T_new, J, e) - proj02(T_base, J, e)))
        # torsion of the connection itself, as a check that the difference formula is realized
        tr1 = _maxabs(pf.T - T_base - alternation(pf.S)) if S_field is None else 0.0
        res = {
            "s-relation": s_relation_residual(split.s, pf.triple),
            "torsion02-diff": diff,
            "admissible": split.residual,
            "tr1": tr1,
        }
        run.residuals.append(res)
        classes.append(_classes(res, ("s-relation", "torsion02-diff"), run.tol, run))
    return run.report(["s-relation", "torsion02-diff"], _admissible_verdict(run, classes))


def check_cor_t272(spec, points, S_field=None, nsamples_J=DEFAULT_J_SAMPLES, seed=0, tol=None) -> CheckReport:
    run = _Run("cor-t272", spec, points, seed, tol)
    classes = []
    for idx, pf in run.frames():
        try:
            S, split, minus, plus = _s_point(pf, S_field, nsamples_J, seed)
        except DegeneratePoint as exc:
            run.skip(idx, str(exc))
            classes.append(None)
            continue
        res = {
            "s-vanish": _maxabs(split.s),
            "anti-eq5": max(eq5_residual(S, minus, -1), eq5_residual(S, plus, -1)),
            "admissible": split.residual,
        }
        run.residuals.append(res)
        classes.append(_classes(res, ("s-vanish", "anti-eq5"), run.tol, run))
    return run.report(["s-vanish", "anti-eq5"], _admissible_verdict(run, classes))


def _classes(res, names, tol, run):
    return [classify(res[n], tol) for n in names]


def _admissible_verdict(run, classes):
    bad = [r for r in run.residuals if r is not None and r["admissible"] > ADMISSIBLE_TOL]
    if bad:
        run.notes.append("difference tensor leaves the para-quaternionic algebra; the equivalence does not apply")
        return INCONCLUSIVE
    return equivalence_verdict(classes)


# --------------------------------------------------------------------------
# Nijenhuis span criterion


def span_residual(M: np.ndarray, v: np.ndarray, rank_tol: float = 1e-9):
    """Rank of the columns of M and the norm of v orthogonal to their span."""
    if not np.any(M):
        return 0, float(np.linalg.norm(v))
    Q, Rm, _ = scipy.linalg.qr(M, mode="economic", pivoting=True)
    diag = np.abs(np.diag(Rm))
    rank = int(np.sum(diag > rank_tol * diag[0]))
    Qr = Q[:, :rank]
    return rank, float(np.linalg.norm(v - Qr @ (Qr.T @ v)))


ZAMKOVOY_PAIRS = 4
ZAMKOVOY_RESAMPLE = 8


def check_zamkovoy_pq(spec, points, seed=0, tol=None, pairs=ZAMKOVOY_PAIRS) -> CheckReport:
    run = _Run("zamkovoy-pq", spec, points, seed, tol)
    d = spec.dim
    need = min(6, d)
    for idx, pf in run.frames():
        try:
            N = pf.N
            J = pf.J
        except DegeneratePoint as exc:
            run.skip(idx, str(exc))
            continue
        rng = np.random.default_rng(_subseed(seed, 100 + idx))
        res = {"literal": 0.0, "with-XY": 0.0, "pq0-N1": 0.0, "pq0-N2": 0.0, "pq0-N3": 0.0}
        used = 0
        for _ in range(pairs):
            for _attempt in range(ZAMKOVOY_RESAMPLE):
                X, Y = rng.standard_normal(d), rng.standard_normal(d)
                cols = np.stack([J[a] @ v for a in range(3) for v in (X, Y)], axis=1)
                Na = np.einsum("aijk,j,k->ai", N, X, Y)
                V = Na[0] + Na[1] - Na[2]
                rank, r_lit = span_residual(cols, V)
                if rank >= need:
                    break
            else:
                run.notes.append(f"point {idx}: span stayed degenerate after {ZAMKOVOY_RESAMPLE} draws")
                continue
            used += 1
            _, r_xy = span_residual(np.concatenate([cols, np.stack([X, Y], axis=1)], axis=1), V)
            res["literal"] = max(res["literal"], r_lit)
            res["with-XY"] = max(res["with-XY"], r_xy)
            for a in range(3):
                _, r = span_residual(cols, Na[a])
                res[f"pq0-N{a + 1}"] = max(res[f"pq0-N{a + 1}"], r)
        if used == 0:
            run.skip(idx, "degenerate span")
            continue
        res["N-max"] = _maxabs(N)
        run.residuals.append(res)
    if d == 4:
        run.notes.append("in dimension 4 the six vectors J_aX, J_aY span the tangent space; the span test is vacuous")
    return run.report(["literal"])


# --------------------------------------------------------------------------
# torsion 3-forms


def pqkt_residuals(T: np.ndarray, g: np.ndarray, triple) -> dict:
    T3 = np.einsum("ijk,il->jkl", T, g)  # T3[j, k, l] = g(T(e_j, e_k), e_l)
    out = {
        "skew": max(_maxabs(T3 + np.transpose(T3, (0, 2, 1))), _maxabs(T3 + np.transpose(T3, (2, 1, 0)))),
    }
    for a in range(3):
        J = triple[a]
        jj = np.einsum("pqr,pj,qk->jkr", T3, J, J)
        jz = np.einsum("pkr,pj,rl->jkl", T3, J, J)
        yz = np.einsum("jqr,qk,rl->jkl", T3, J, J)
        s = 1 if a == 2 else -1
        out[f"type-J{a + 1}"] = _maxabs(T3 - s * (jj + jz + yz))
    for a in range(3):
        out[f"02-J{a + 1}"] = _maxabs(proj02(T, triple[a], EPS[a]))
    return out


def check_pqkt(spec, points, seed=0, tol=None) -> CheckReport:
    run = _Run("pqkt", spec, points, seed, tol)
    for idx, pf in run.frames():
        res = run.guarded(idx, lambda: pqkt_residuals(pf.T, pf.g, pf.triple))
        if res is not None:
            run.residuals.append(res)
    return run.report(["skew", "type-J1", "type-J2", "type-J3", "02-J1", "02-J2", "02-J3"])


# --------------------------------------------------------------------------
# implication: torsion condition => Ricci-form identity


def check_cor_cur(spec, points, nsamples_J=DEFAULT_J_SAMPLES, seed=0, tol=None, ltor_tol=None) -> CheckReport:
    run = _Run("cor-cur", spec, points, seed, tol)
    if spec.dim < 8:
        run.notes.append("the implication is stated for dimension at least 8; use theorem-four in dimension 4")
        return run.report(["idric"], INCONCLUSIVE)
    t_ltor = DEFAULT_TOLERANCES["ltor"] if ltor_tol is None else ltor_tol
    antecedent_points = 0
    for idx, pf in run.frames():
        try:
            lt = _ltor_point(pf, nsamples_J, seed)
            idr = idric_residual(pf.rho, pf.J, "consistent")
        except DegeneratePoint as exc:
            run.skip(idx, str(exc))
            continue
        ltor_max = max(lt[k] for k in ("Z-", "Z+", "J1", "J2", "J3"))
        antecedent = lt["omega_defect"] < OMEGA_DEFECT_TOL and ltor_max < t_ltor
        antecedent_points += antecedent
        res = {"ltor": ltor_max, "omega_defect": lt["omega_defect"], "antecedent": float(antecedent)}
        if antecedent:
            res["idric"] = idr
        else:
            res["idric_unjudged"] = idr
        run.residuals.append(res)
    run.extra["antecedent_points"] = antecedent_points
    if antecedent_points == 0:
        run.notes.append("vacuous: the torsion condition fails at every evaluated point")
        return run.report(["idric"], INCONCLUSIVE)
    return run.report(["idric"])


# --------------------------------------------------------------------------

CHECKS: dict[str, Callable] = {
    "par1": check_par1,
    "compat": check_compatibility,
    "ltor": check_ltor,
    "idric": check_idric,
    "theorem-four": check_theorem_four,
    "prop-t25": check_prop_t25,
    "cor-t27": check_cor_t27,
    "cor-t272": check_cor_t272,
    "zamkovoy-pq": check_zamkovoy_pq,
    "pqkt": check_pqkt,
    "cor-cur": check_cor_cur,
}


def applicable_checks(spec: ManifoldSpec) -> list[str]:
    names = []
    for name in CHECK_NAMES:
        if name in FOUR_DIM_ONLY and spec.dim != 4:
            continue
        if name in EIGHT_DIM_ONLY and spec.dim < 8:
            continue
        names.append(name)
    return names


def run_check(name: str, spec: ManifoldSpec, points, seed: int = 0, tol: float | None = None) -> CheckReport:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}")
    return CHECKS[name](spec, points, seed=seed, tol=tol)
