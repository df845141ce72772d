"""Line-oriented text format for manifold specs.

Example::

    # flat neutral R^4
    name = flat-r4
    dimension = 4
    mode = chart
    coords = x y u v
    connection = levi-civita
    sample_box = -1 1
    g(1,1) = "1"
    J1(1,3) = "-1"

Indices are 1-based and omitted components are 0.  ``g(i,j)`` also sets
``g(j,i)``; in frame mode ``c(i,j,k)`` also sets ``c(j,i,k)`` to the negative.
Values are quoted expressions; frame-mode values must be constants.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .expr import PoleError, evaluate, parse_expr, serialize_expr
from .geometry import CONNECTIONS, ManifoldSpec, SpecError

SCALAR_KEYS = ("name", "dimension", "mode", "coords", "labels", "connection", "sample_box", "sample_points", "note")
TENSOR_KEYS = {"g": 2, "J1": 2, "J2": 2, "J3": 2, "Gamma": 3, "S": 3, "c": 3}

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*=\s*(.*?)\s*$")


class SpecFileError(SpecError):
    """A problem with a spec file, located by line number when possible."""

    def __init__(self, message: str, line: int | None = None, source: str = "<spec>"):
        self.line = line
        self.source = source
        self.message = message
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _unquote(raw: str) -> str:
    if len(raw) >= 2 and raw[0] == raw[-1] == '"':
        return raw[1:-1]
    return raw


def _strip_comment(line: str) -> str:
    # '#' inside a quoted value is not a comment
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def parse_spec_text(text: str, source: str = "<spec>", validate: bool = True) -> ManifoldSpec:
    scalars: dict[str, tuple[str, int]] = {}
    entries: list[tuple[str, tuple, str, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip_comment(line).strip()
        if not body:
            continue
        m = _LINE.match(body)
        if not m:
            raise SpecFileError(f"cannot parse line {body!r}; expected 'key = value' or 'T(i,j) = \"expr\"'", lineno, source)
        key, idx, value = m.group(1), m.group(2), m.group(3)
        if idx is None:
            if key not in SCALAR_KEYS:
                raise SpecFileError(f"unknown key {key!r}", lineno, source)
            if key in scalars:
                raise SpecFileError(f"duplicate key {key!r} (first given on line {scalars[key][1]})", lineno, source)
            scalars[key] = (_unquote(value), lineno)
            continue
        if key not in TENSOR_KEYS:
            raise SpecFileError(f"unknown component {key!r}", lineno, source)
        try:
            index = tuple(int(t) for t in idx.split(","))
        except ValueError:
            raise SpecFileError(f"indices of {key} must be integers, got ({idx})", lineno, source) from None
        if len(index) != TENSOR_KEYS[key]:
            raise SpecFileError(f"{key} takes {TENSOR_KEYS[key]} indices, got {len(index)}", lineno, source)
        if not value:
            raise SpecFileError(f"missing value for {key}({idx})", lineno, source)
        entries.append((key, index, _unquote(value), lineno))
    return _assemble(scalars, entries, source, validate)


def _assemble(scalars, entries, source, validate) -> ManifoldSpec:
    def get(key, default=None):
        return scalars[key] if key in scalars else (default, None)

    dim_raw, dim_line = get("dimension")
    if dim_raw is None:
        raise SpecFileError("missing required key 'dimension'", None, source)
    try:
        d = int(dim_raw)
    except ValueError:
        raise SpecFileError(f"dimension must be an integer, got {dim_raw!r}", dim_line, source) from None
    if d <= 0 or d % 4:
        raise SpecFileError(f"dimension must be a positive multiple of 4, got {d}", dim_line, source)

    mode, mode_line = get("mode", "chart")
    if mode not in ("chart", "frame"):
        raise SpecFileError(f"mode must be 'chart' or 'frame', got {mode!r}", mode_line, source)
    connection, conn_line = get("connection", "levi-civita")
    if connection not in CONNECTIONS:
        raise SpecFileError(f"connection must be one of {', '.join(CONNECTIONS)}, got {connection!r}", conn_line, source)

    label_key = "coords" if mode == "chart" else "labels"
    other_key = "labels" if mode == "chart" else "coords"
    if other_key in scalars:
        raise SpecFileError(f"key {other_key!r} is not used in {mode} mode (use {label_key!r})", scalars[other_key][1], source)
    labels_raw, labels_line = get(label_key)
    if labels_raw is None:
        if mode == "chart":
            raise SpecFileError("chart mode requires 'coords'", None, source)
        labels = tuple(f"e{i + 1}" for i in range(d))
    else:
        labels = tuple(labels_raw.split())
    if len(labels) != d:
        raise SpecFileError(f"{label_key} lists {len(labels)} names but dimension is {d}", labels_line, source)

    box_raw, box_line = get("sample_box", "-1 1")
    try:
        lo, hi = (float(t) for t in box_raw.split())
    except ValueError:
        raise SpecFileError(f"sample_box must be two numbers 'lo hi', got {box_raw!r}", box_line, source) from None
    if not lo < hi:
        raise SpecFileError(f"sample_box needs lo < hi, got {lo} {hi}", box_line, source)
    npts_raw, npts_line = get("sample_points", "32")
    try:
        npts = int(npts_raw)
    except ValueError:
        raise SpecFileError(f"sample_points must be an integer, got {npts_raw!r}", npts_line, source) from None
    if npts < 1:
        raise SpecFileError("sample_points must be at least 1", npts_line, source)

    name = get("name", Path(source).stem if source != "<spec>" else "spec")[0]
    note = get("note", "")[0]

    shapes = {"g": (d, d), "J1": (d, d), "J2": (d, d), "J3": (d, d), "Gamma": (d, d, d), "S": (d, d, d), "c": (d, d, d)}
    arrays = {k: np.full(shape, "0", dtype=object) for k, shape in shapes.items()}
    seen: dict[tuple, int] = {}
    present = set()
    for key, index, value, lineno in entries:
        if key == "Gamma" and connection != "explicit":
            raise SpecFileError("Gamma components require connection = explicit", lineno, source)
        if key == "S" and connection != "levi-civita-plus-S":
            raise SpecFileError("S components require connection = levi-civita-plus-S", lineno, source)
        if key == "c" and mode != "frame":
            raise SpecFileError("structure constants c(i,j,k) are only used in frame mode", lineno, source)
        if any(not 1 <= i <= d for i in index):
            raise SpecFileError(f"index out of range in {key}{index}: indices run from 1 to {d}", lineno, source)
        zero = tuple(i - 1 for i in index)
        try:
            expr = parse_expr(value, labels)
        except ValueError as exc:
            raise SpecFileError(f"{key}{index}: {exc}", lineno, source) from exc
        if mode == "frame":
            if not expr.is_constant:
                raise SpecFileError(f"{key}{index}: frame-mode values must be constants", lineno, source)
            try:
                value = float(evaluate(expr, np.zeros(1)))
            except PoleError as exc:
                raise SpecFileError(f"{key}{index}: {exc}", lineno, source) from exc
        else:
            value = expr
        targets = [(zero, value, False)]
        if key == "g" and zero[0] != zero[1]:
            targets.append(((zero[1], zero[0]), value, True))
        if key == "c":
            targets.append(((zero[1], zero[0], zero[2]), -value, True))
        for pos, v, mirrored in targets:
            slot = (key, pos)
            if slot in seen:
                prev = arrays[key][pos]
                if _same(prev, v):
                    continue
                what = "conflicts with the mirrored entry" if mirrored or seen[slot] < 0 else "is given twice"
                first = abs(seen[slot])
                raise SpecFileError(f"{key}{tuple(i + 1 for i in pos)} {what} from line {first}", lineno, source)
            arrays[key][pos] = v
            seen[slot] = -lineno if mirrored else lineno
        present.add(key)

    for key in ("J1", "J2", "J3"):
        if key not in present:
            raise SpecFileError(f"no components given for {key}", None, source)
    if connection == "explicit" and "Gamma" not in present:
        raise SpecFileError("connection = explicit but no Gamma components given", None, source)

    if mode == "chart":
        spec = ManifoldSpec.chart(
            name,
            labels,
            arrays["g"],
            [arrays["J1"], arrays["J2"], arrays["J3"]],
            connection=connection,
            gamma=arrays["Gamma"],
            S=arrays["S"],
            sample_box=(lo, hi),
            sample_points=npts,
            note=note,
        )
    else:
        num = lambda a: a.astype(float)
        spec = ManifoldSpec.frame(
            name,
            labels,
            num(arrays["g"]),
            [num(arrays["J1"]), num(arrays["J2"]), num(arrays["J3"])],
            num(arrays["c"]),
            connection=connection,
            gamma=num(arrays["Gamma"]),
            S=num(arrays["S"]),
            sample_box=(lo, hi),
            sample_points=npts,
            note=note,
        )
    if validate:
        try:
            spec.validate()
        except SpecError as exc:
            raise SpecFileError(f"validation failed: {exc}", None, source) from exc
    return spec


def _same(a, b) -> bool:
    if isinstance(a, str) or isinstance(b, str):
        return False
    if isinstance(a, float) or isinstance(b, float):
        return float(a) == float(b)
    return serialize_expr(a) == serialize_expr(b)


def load_spec(path, validate: bool = True) -> ManifoldSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecFileError(f"cannot read spec file: {exc.strerror or exc}", None, str(path)) from exc
    return parse_spec_text(text, source=str(path), validate=validate)


# --------------------------------------------------------------------------
# writing


def _fmt_value(v) -> str:
    if isinstance(v, (float, int, np.floating, np.integer)):
        v = float(v)
        return repr(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    return serialize_expr(v)


def _is_zero(v) -> bool:
    if isinstance(v, (float, int, np.floating, np.integer)):
        return float(v) == 0.0
    return v.is_constant and evaluate(v, np.zeros(1)) == 0.0


def dump_spec(spec: ManifoldSpec) -> str:
    d = spec.dim
    lines = [f"name = {spec.name}"]
    if spec.note:
        lines.append(f'note = "{spec.note}"')
    lines += [f"dimension = {d}", f"mode = {spec.mode}"]
    lines.append(("coords = " if spec.mode == "chart" else "labels = ") + " ".join(spec.labels))
    lines.append(f"connection = {spec.connection}")
    lo, hi = spec.sample_box
    lines.append(f"sample_box = {float(lo)!r} {float(hi)!r}")
    lines.append(f"sample_points = {spec.sample_points}")

    def block(key, arr, keep):
        for idx in np.ndindex(*arr.shape):
            if keep(idx) and not _is_zero(arr[idx]):
                label = ",".join(str(i + 1) for i in idx)
                lines.append(f'{key}({label}) = "{_fmt_value(arr[idx])}"')

    block("g", np.asarray(spec.metric, dtype=object), lambda idx: idx[0] <= idx[1])
    for a, J in enumerate(spec.J, start=1):
        block(f"J{a}", np.asarray(J, dtype=object), lambda idx: True)
    if spec.connection == "explicit":
        block("Gamma", np.asarray(spec.gamma, dtype=object), lambda idx: True)
    if spec.connection == "levi-civita-plus-S":
        block("S", np.asarray(spec.S, dtype=object), lambda idx: True)
    if spec.mode == "frame":
        block("c", np.asarray(spec.structure, dtype=object), lambda idx: idx[0] < idx[1])
    return "\n".join(lines) + "\n"
