"""Flat-file formats: curve JSON, invariant CSV, symmetry JSON, order-report JSON.

Floats are written with 17 significant digits so files round-trip exactly
and identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .classify import OrderReport
from .curve import SampledCurve
from .exceptions import FormatError
from .frames import InvariantProfile
from .heis_core import HPoint, Symmetry

__all__ = [
    "curve_to_dict", "curve_from_dict", "read_curve", "write_curve",
    "profile_to_csv", "profile_from_csv", "read_profile", "write_profile",
    "symmetry_to_dict", "symmetry_from_dict", "read_symmetry", "write_symmetry",
    "report_to_json", "dumps",
]


def _g(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what} is not valid JSON: {exc}") from exc


def curve_to_dict(c: SampledCurve) -> dict:
    return {
        "n": c.n,
        "params": c.params.tolist(),
        "points": c.points.tolist(),
        "is_arclength": c.is_arclength,
    }


def curve_from_dict(data) -> SampledCurve:
    if not isinstance(data, dict):
        raise FormatError("curve JSON must be an object")
    missing = {"n", "params", "points"} - data.keys()
    if missing:
        raise FormatError(f"curve JSON lacks fields {sorted(missing)}")
    try:
        return SampledCurve(int(data["n"]), np.asarray(data["params"], dtype=float),
                            np.asarray(data["points"], dtype=float), bool(data.get("is_arclength", False)))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"invalid curve: {exc}") from exc


def read_curve(path) -> SampledCurve:
    return curve_from_dict(_load_json(Path(path).read_text(), str(path)))


def write_curve(c: SampledCurve, path) -> None:
    Path(path).write_text(dumps(curve_to_dict(c)))


def profile_to_csv(profile: InvariantProfile) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s"] + [f"kappa_{j}" for j in range(1, profile.n + 1)] + ["tau"])
    for row in profile.as_table():
        writer.writerow([_g(v) for v in row])
    return buf.getvalue()


def profile_from_csv(text: str, n: int | None = None) -> InvariantProfile:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise FormatError("empty invariant CSV")
    header = [h.strip() for h in rows[0]]
    k = len(header) - 2
    expected = ["s"] + [f"kappa_{j}" for j in range(1, k + 1)] + ["tau"]
    if k < 1 or header != expected:
        raise FormatError(f"invariant CSV header must read s,kappa_1,...,kappa_n,tau; got {','.join(header)}")
    if n is not None and k != n:
        raise FormatError(f"CSV carries {k} p-curvatures but n={n} was requested")
    try:
        table = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise FormatError(f"non-numeric entry in invariant CSV: {exc}") from exc
    if table.ndim != 2 or table.shape[1] != k + 2 or table.shape[0] < 2:
        raise FormatError("invariant CSV rows are ragged or too few")
    try:
        return InvariantProfile(table[:, 0], table[:, 1:k + 1].T, table[:, k + 1])
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def read_profile(path, n: int | None = None) -> InvariantProfile:
    return profile_from_csv(Path(path).read_text(), n)


def write_profile(profile: InvariantProfile, path) -> None:
    Path(path).write_text(profile_to_csv(profile))


def symmetry_to_dict(phi: Symmetry) -> dict:
    return {
        "n": phi.n,
        "rotation": phi.rotation.tolist(),
        "translation": phi.translation.as_array().tolist(),
    }


def symmetry_from_dict(data) -> Symmetry:
    if not isinstance(data, dict) or not {"n", "rotation", "translation"} <= data.keys():
        raise FormatError("symmetry JSON needs fields n, rotation, translation")
    try:
        n = int(data["n"])
        rot = np.asarray(data["rotation"], dtype=float).reshape(2 * n, 2 * n)
        trans = HPoint.from_array(np.asarray(data["translation"], dtype=float))
        return Symmetry(rot, trans)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"invalid symmetry: {exc}") from exc


def read_symmetry(path) -> Symmetry:
    return symmetry_from_dict(_load_json(Path(path).read_text(), str(path)))


def write_symmetry(phi: Symmetry, path) -> None:
    Path(path).write_text(dumps(symmetry_to_dict(phi)))


def report_to_json(report: OrderReport) -> str:
    return dumps(report.to_dict())
