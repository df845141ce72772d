"""Run a set of checks on one spec and assemble a deterministic JSON report."""

from __future__ import annotations

import json
import platform
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .checks import CHECK_NAMES, DEFAULT_TOLERANCES, FAILS, HOLDS, INCONCLUSIVE, applicable_checks, run_check
from .geometry import ManifoldSpec

SCHEMA_VERSION = "report-v1"

EXIT_HOLDS, EXIT_FAILS, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3


def resolve_checks(spec: ManifoldSpec, names=None) -> list[str]:
    """Validate requested check names; ``None`` means every check applicable to the spec."""
    if not names:
        return applicable_checks(spec)
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise KeyError(f"unknown check(s) {', '.join(unknown)}; known: {', '.join(CHECK_NAMES)}")
    # keep the canonical order so reports do not depend on how the list was typed
    return [n for n in CHECK_NAMES if n in names]


def overall_verdict(reports) -> str:
    verdicts = [r["verdict"] for r in reports]
    if FAILS in verdicts:
        return FAILS
    if not verdicts or INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return HOLDS


def _run_one(name, spec, points, seed, tol) -> dict:
    return run_check(name, spec, points, seed=seed, tol=tol).to_dict()


def run_checks(
    spec: ManifoldSpec,
    checks=None,
    npoints: int | None = None,
    seed: int = 0,
    tol_scale: float = 1.0,
    tol_overrides: dict | None = None,
    workers: int = 1,
) -> dict:
    """Sample points, run the named checks and return the report document.

    With ``workers > 1`` the checks run in a process pool; reports are still
    collected in canonical check order, so the document does not change.
    """
    names = resolve_checks(spec, checks)
    if tol_scale <= 0:
        raise ValueError("tol_scale must be positive")
    count = spec.sample_points if npoints is None else int(npoints)
    if count < 1:
        raise ValueError("number of points must be at least 1")
    points = spec.sample(count, seed)
    tolerances = {}
    for name in names:
        base = (tol_overrides or {}).get(name, DEFAULT_TOLERANCES[name])
        tolerances[name] = float(base) * float(tol_scale)
    if workers > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(names))) as pool:
            futures = [pool.submit(_run_one, name, spec, points, seed, tolerances[name]) for name in names]
            reports = [f.result() for f in futures]
    else:
        reports = [_run_one(name, spec, points, seed, tolerances[name]) for name in names]

    skipped: dict[int, dict] = {}
    for rep in reports:
        for item in rep["skipped"]:
            entry = skipped.setdefault(
                item["index"],
                {"index": item["index"], "point": [float(x) for x in points[item["index"]]], "reason": item["reason"], "checks": []},
            )
            entry["checks"].append(rep["check"])
    verdict = overall_verdict(reports)
    all_skipped = bool(reports) and all(len(r["skipped"]) == count for r in reports)
    if all_skipped:
        verdict = INCONCLUSIVE
    lo, hi = spec.sample_box
    return {
        "schema": SCHEMA_VERSION,
        "spec": {
            "name": spec.name,
            "dimension": spec.dim,
            "mode": spec.mode,
            "connection": spec.connection,
            "sample_box": [float(lo), float(hi)],
            "points": count,
        },
        "seed": int(seed),
        "tolerances": tolerances,
        "verdict": verdict,
        "all_points_skipped": all_skipped,
        "checks": reports,
        "skipped_points": [skipped[k] for k in sorted(skipped)],
        "versions": {
            "pqtwistor": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }


def exit_status(document: dict) -> int:
    return {HOLDS: EXIT_HOLDS, FAILS: EXIT_FAILS, INCONCLUSIVE: EXIT_INCONCLUSIVE}[document["verdict"]]


def to_json(document: dict) -> str:
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def format_table(document: dict) -> str:
    """Human-readable summary of a report document."""
    spec = document["spec"]
    lines = [
        f"{spec['name']}  (dimension {spec['dimension']}, {spec['mode']}, {spec['connection']}; "
        f"{spec['points']} points, seed {document['seed']})"
    ]
    for rep in document["checks"]:
        judged = {k: rep["max_residuals"].get(k) for k in rep["judged"]}
        worst = max((v for v in judged.values() if v is not None), default=None)
        worst_txt = "n/a" if worst is None else f"{worst:.3e}"
        skipped = f", {len(rep['skipped'])} skipped" if rep["skipped"] else ""
        lines.append(f"  {rep['check']:<13} {rep['verdict']:<12} max {worst_txt}  tol {rep['tolerance']:.0e}{skipped}")
        for note in rep["notes"]:
            lines.append(f"      note: {note}")
    lines.append(f"overall: {document['verdict']}")
    return "\n".join(lines)
