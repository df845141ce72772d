"""Central finite differences on plain evaluation, independent of the jet path.

Function values are computed in extended precision (``np.longdouble`` where the
platform provides more than 64 bits) so that second differences with step 1e-5
are dominated by truncation error rather than cancellation.
"""

from __future__ import annotations

import numpy as np

from .expr import Expr, PoleError, evaluate

WIDE = np.longdouble


def fd_gradient(e: Expr, point, step: float) -> np.ndarray:
    p = np.asarray(point, dtype=WIDE)
    h = WIDE(step)
    d = p.shape[0]
    out = np.zeros(d, dtype=WIDE)
    for k in range(d):
        if k not in e.coordinates:
            continue
        up, dn = p.copy(), p.copy()
        up[k] += h
        dn[k] -= h
        out[k] = (evaluate(e, up, WIDE) - evaluate(e, dn, WIDE)) / (2 * h)
    return out.astype(float)


def fd_hessian(e: Expr, point, step: float) -> np.ndarray:
    p = np.asarray(point, dtype=WIDE)
    h = WIDE(step)
    d = p.shape[0]
    out = np.zeros((d, d), dtype=WIDE)
    f0 = evaluate(e, p, WIDE)
    used = sorted(e.coordinates)
    for i in used:
        up, dn = p.copy(), p.copy()
        up[i] += h
        dn[i] -= h
        out[i, i] = (evaluate(e, up, WIDE) - 2 * f0 + evaluate(e, dn, WIDE)) / (h * h)
        for j in used:
            if j <= i:
                continue
            vals = []
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                q = p.copy()
                q[i] += si * h
                q[j] += sj * h
                vals.append(evaluate(e, q, WIDE))
            out[i, j] = out[j, i] = (vals[0] - vals[1] - vals[2] + vals[3]) / (4 * h * h)
    return out.astype(float)


def field_values(exprs, point) -> np.ndarray:
    """Evaluate an array of expressions (any shape) at ``point`` in extended precision."""
    arr = np.asarray(exprs, dtype=object)
    out = np.empty(arr.shape, dtype=WIDE)
    p = np.asarray(point, dtype=WIDE)
    for idx, e in np.ndenumerate(arr):
        out[idx] = evaluate(e, p, WIDE)
    return out


def fd_partials(fn, point, step: float) -> np.ndarray:
    """Central differences of an array-valued ``fn`` of an extended-precision point.

    Returns an array with a trailing axis indexing the coordinate direction.
    """
    p = np.asarray(point, dtype=WIDE)
    h = WIDE(step)
    cols = []
    for k in range(p.shape[0]):
        up, dn = p.copy(), p.copy()
        up[k] += h
        dn[k] -= h
        cols.append((np.asarray(fn(up), dtype=WIDE) - np.asarray(fn(dn), dtype=WIDE)) / (2 * h))
    return np.stack(cols, axis=-1)


def deviation(computed, reference, floor: float = 1e-6) -> tuple[float, float]:
    """Max absolute deviation and the same scaled by the reference magnitude."""
    a = np.asarray(computed, dtype=float)
    b = np.asarray(reference, dtype=float)
    abs_dev = float(np.max(np.abs(a - b))) if a.size else 0.0
    scale = max(float(np.max(np.abs(b))) if b.size else 0.0, floor)
    return abs_dev, abs_dev / scale


# --------------------------------------------------------------------------
# finite-difference versions of the derivative-consuming quantities

QUANTITIES = ("gamma", "riemann", "nijenhuis", "nablaJ", "weyl")


def _inverse(a: np.ndarray) -> np.ndarray:
    """Inverse in extended precision: float64 inverse refined by Newton steps."""
    x = np.linalg.inv(np.asarray(a, dtype=float)).astype(WIDE)
    two = 2 * np.eye(a.shape[0], dtype=WIDE)
    for _ in range(2):
        x = x @ (two - a @ x)
    return x


def _values(exprs, point) -> np.ndarray:
    try:
        return field_values(exprs, point)
    except PoleError as exc:
        raise PoleError(exc.node, exc.point, f"{exc.reason} within the difference stencil") from exc


def connection_symbols(spec, point, step: float, connection: str | None = None) -> np.ndarray:
    """Connection symbols G[i, j, k] with the metric derivatives taken by differences."""
    connection = connection or spec.connection
    p = np.asarray(point, dtype=WIDE)
    if connection == "explicit":
        return _values(spec.gamma, p)
    g = _values(spec.metric, p)
    dg = fd_partials(lambda q: _values(spec.metric, q), p, step)  # dg[a, b, m] = d_m g_ab
    ginv = _inverse(g)
    d = g.shape[0]
    G = np.zeros((d, d, d), dtype=WIDE)
    for j in range(d):
        for k in range(d):
            # first-kind symbols [jk, l]
            low = 0.5 * (dg[:, k, j] + dg[:, j, k] - dg[j, k, :])
            G[:, j, k] = ginv @ low
    if connection == "levi-civita-plus-S":
        G = G + _values(spec.S, p)
    return G


def _connection_matrices(G: np.ndarray) -> list:
    """Matrices of nabla_{e_k}, i.e. G[:, k, :], one per direction."""
    return [G[:, k, :] for k in range(G.shape[1])]


def fd_riemann(spec, point, step: float, connection: str | None = None) -> np.ndarray:
    """R[i, j, k, l] from differenced connection matrices: R_kl = d_k G_l - d_l G_k + [G_k, G_l]."""
    p = np.asarray(point, dtype=WIDE)
    G = connection_symbols(spec, p, step, connection)
    dG = fd_partials(lambda q: connection_symbols(spec, q, step, connection), p, step)
    d = G.shape[0]
    mats = _connection_matrices(G)
    R = np.zeros((d, d, d, d), dtype=WIDE)
    for k in range(d):
        for l in range(d):
            dk_Gl = dG[:, l, :, k]
            dl_Gk = dG[:, k, :, l]
            R[:, :, k, l] = dk_Gl - dl_Gk + mats[k] @ mats[l] - mats[l] @ mats[k]
    return R


def _fd_J(spec, p, step):
    J = np.stack([_values(m, p) for m in spec.J])
    dJ = fd_partials(lambda q: np.stack([_values(m, q) for m in spec.J]), p, step)  # [a, i, j, m]
    return J, dJ


def fd_nijenhuis(spec, point, step: float) -> np.ndarray:
    """N[a, :, j, k] = [J e_j, J e_k] - J [J e_j, e_k] - J [e_j, J e_k] for coordinate fields."""
    p = np.asarray(point, dtype=WIDE)
    J, dJ = _fd_J(spec, p, step)
    d = J.shape[1]
    out = np.zeros((3, d, d, d), dtype=WIDE)

    def bracket(X, dX, Y, dY):
        # [X, Y]^i = X^m d_m Y^i - Y^m d_m X^i; dX[i, m] = d_m X^i
        return dY @ X - dX @ Y

    zero = np.zeros((d, d), dtype=WIDE)
    for a in range(3):
        for j in range(d):
            for k in range(d):
                Xj, dXj = J[a][:, j], dJ[a][:, j, :]
                Xk, dXk = J[a][:, k], dJ[a][:, k, :]
                ej, ek = np.eye(d, dtype=WIDE)[j], np.eye(d, dtype=WIDE)[k]
                out[a, :, j, k] = (
                    bracket(Xj, dXj, Xk, dXk)
                    - J[a] @ bracket(Xj, dXj, ek, zero)
                    - J[a] @ bracket(ej, zero, Xk, dXk)
                )
    return out


def fd_nabla_J(spec, point, step: float) -> np.ndarray:
    """[a, k, i, j]: nabla_k J_a = d_k J_a + [G_k, J_a]."""
    p = np.asarray(point, dtype=WIDE)
    J, dJ = _fd_J(spec, p, step)
    mats = _connection_matrices(connection_symbols(spec, p, step))
    d = J.shape[1]
    out = np.zeros((3, d, d, d), dtype=WIDE)
    for a in range(3):
        for k in range(d):
            out[a, k] = dJ[a][:, :, k] + mats[k] @ J[a] - J[a] @ mats[k]
    return out


def weyl_blocks(g, R, J1) -> np.ndarray:
    """Self-dual and anti-self-dual blocks of the Weyl operator, stacked (2, 6, 6).

    The orientation is the one making the fundamental 2-form of ``J1`` self-dual.
    """
    from .geometry import hodge_matrix, two_form_vector, weyl_operator, weyl_tensor

    g = np.asarray(g, dtype=float)
    H = hodge_matrix(g, 1)
    F1 = two_form_vector(np.asarray(J1, dtype=float).T @ g)
    if np.max(np.abs(H @ F1 - F1)) > np.max(np.abs(H @ F1 + F1)):
        H = -H
    W = weyl_operator(g, weyl_tensor(g, np.asarray(R, dtype=float)))
    Pp, Pm = 0.5 * (np.eye(6) + H), 0.5 * (np.eye(6) - H)
    return np.stack([Pp @ W @ Pp, Pm @ W @ Pm])


def jet_quantity(spec, quantity: str, point) -> np.ndarray:
    from .geometry import PointFrame

    pf = PointFrame(spec, point)
    if quantity == "gamma":
        return pf.gamma
    if quantity == "riemann":
        return pf.R
    if quantity == "nijenhuis":
        return pf.N
    if quantity == "nablaJ":
        return pf.nabla_J
    if quantity == "weyl":
        lc = pf.levi_civita()
        return weyl_blocks(lc.g, lc.R, lc.J[0])
    raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")


def fd_quantity(spec, quantity: str, point, step: float) -> np.ndarray:
    if quantity == "gamma":
        return connection_symbols(spec, point, step)
    if quantity == "riemann":
        return fd_riemann(spec, point, step)
    if quantity == "nijenhuis":
        return fd_nijenhuis(spec, point, step)
    if quantity == "nablaJ":
        return fd_nabla_J(spec, point, step)
    if quantity == "weyl":
        p = np.asarray(point, dtype=WIDE)
        R = fd_riemann(spec, p, step, connection="levi-civita")
        return weyl_blocks(_values(spec.metric, p), R, _values(spec.J[0], p))
    raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")


def run_oracle(spec, quantity: str, point, step: float = 1e-5) -> dict:
    """Compare the jet path with central differences; reports deviations, never a verdict.

    For ``weyl`` the relative deviation is measured against the size of the
    Levi-Civita curvature, since the Weyl blocks themselves may vanish.
    """
    if spec.mode != "chart":
        raise ValueError("the finite-difference oracle needs chart-mode data")
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    if quantity == "weyl" and spec.dim != 4:
        raise ValueError("the Weyl comparison is available for 4-dimensional specs only")
    if not step > 0:
        raise ValueError("step must be positive")
    p = np.asarray(point, dtype=float)
    if p.shape != (spec.dim,):
        raise ValueError(f"point must have {spec.dim} coordinates, got {p.size}")
    jet = np.asarray(jet_quantity(spec, quantity, p), dtype=float)
    ref = np.asarray(fd_quantity(spec, quantity, p, step), dtype=float)
    floor = 1e-6
    if quantity == "weyl":
        from .geometry import PointFrame

        floor = max(floor, float(np.max(np.abs(PointFrame(spec, p).levi_civita().R))))
    abs_dev, rel_dev = deviation(jet, ref, floor)
    return {
        "spec": spec.name,
        "quantity": quantity,
        "point": [float(x) for x in p],
        "step": float(step),
        "shape": list(jet.shape),
        "max_abs_dev": abs_dev,
        "max_rel_dev": rel_dev,
        "reference_max": float(np.max(np.abs(ref))) if ref.size else 0.0,
    }
