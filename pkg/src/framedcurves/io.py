"""File formats: curve CSV, SVG projections and JSON run records.

All writers go through ``atomic_write`` (temporary file in the target
directory, then rename), so readers never see a half-written file.
"""

import json
import math
import os
import tempfile

import numpy as np

from .errors import DomainError
from .frames import CurvatureTorsionProfile, FramedCurve

__all__ = [
    "CSV_HEADER",
    "atomic_write",
    "curve_to_csv",
    "write_curve_csv",
    "read_curve_csv",
    "curve_to_svg",
    "write_curve_svg",
    "export_curve",
    "jsonable",
    "run_record",
    "write_run_record",
]

CSV_HEADER = "s,x,y,z,tx,ty,tz,nx,ny,nz,bx,by,bz,kappa,tau"
PLANES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}


def atomic_write(path, text):
    """Write ``text`` (UTF-8, LF newlines) to ``path`` via a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    except OSError as exc:
        raise DomainError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise DomainError(f"cannot write {path}: {exc}") from exc
    return path


def curve_to_csv(curve):
    """CSV text: one row per node, 17 significant digits, no trailing comma."""
    p = curve.profile
    F = curve.frames
    cols = np.column_stack([curve.s, curve.positions, F[:, :, 0], F[:, :, 1], F[:, :, 2],
                            p.kappa, p.tau])
    lines = [CSV_HEADER]
    lines.extend(",".join("%.17g" % v for v in row) for row in cols)
    return "\n".join(lines) + "\n"


def write_curve_csv(curve, path):
    return atomic_write(path, curve_to_csv(curve))


def read_curve_csv(path):
    """Read a curve written by ``write_curve_csv``; positions and frames are bit-exact."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise DomainError(f"{path}: unexpected header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[0] < 3 or data.shape[1] != 15:
        raise DomainError(f"{path}: need at least 3 rows of 15 columns")
    frames = np.stack([data[:, 4:7], data[:, 7:10], data[:, 10:13]], axis=2)
    profile = CurvatureTorsionProfile(data[-1, 0] - data[0, 0], data[:, 13], data[:, 14])
    return FramedCurve(data[0, 1:4].copy(), data[:, 1:4], frames, profile)


def curve_to_svg(curve, plane="xy"):
    """One ``polyline`` of the curve projected on a coordinate plane.

    The second coordinate is negated so the picture has the usual
    orientation (SVG's vertical axis points down). The view box is the
    bounding box plus a 5% margin of its larger side; the stroke is 0.5% of
    that side.
    """
    if plane not in PLANES:
        raise DomainError(f"plane must be one of {sorted(PLANES)}")
    i, j = PLANES[plane]
    u = curve.positions[:, i]
    v = -curve.positions[:, j]
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise DomainError("curve has non-finite coordinates")
    side = max(u.max() - u.min(), v.max() - v.min()) or 1.0
    margin = 0.05 * side
    x0, y0 = u.min() - margin, v.min() - margin
    w = u.max() - u.min() + 2 * margin
    h = v.max() - v.min() + 2 * margin
    points = " ".join(f"{a:.15g},{b:.15g}" for a, b in zip(u, v))
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0:.15g} {y0:.15g} {w:.15g} {h:.15g}">\n'
        f'<polyline fill="none" stroke="black" stroke-width="{0.005 * side:.15g}" '
        f'points="{points}"/>\n'
        "</svg>\n"
    )


def write_curve_svg(curve, path, plane="xy"):
    return atomic_write(path, curve_to_svg(curve, plane))


def export_curve(curve, path, formats=("csv",), plane="xy"):
    """Write ``path`` with the suffix of each requested format; returns the paths."""
    base, _ = os.path.splitext(os.fspath(path))
    written = []
    for fmt in formats:
        if fmt == "csv":
            written.append(write_curve_csv(curve, base + ".csv"))
        elif fmt == "svg":
            written.append(write_curve_svg(curve, base + ".svg", plane))
        else:
            raise DomainError(f"unknown export format {fmt!r}")
    return written


def jsonable(obj):
    """Plain JSON types; non-finite floats become the strings ``inf``/``-inf``/``nan``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def run_record(version, command, config, metrics, outputs, duration_s):
    return {"version": version, "command": command, "config": config,
            "metrics": metrics, "outputs": outputs, "duration_s": duration_s}


def dump_record(record):
    return json.dumps(jsonable(record), indent=2, allow_nan=False) + "\n"


def write_run_record(record, path):
    return atomic_write(path, dump_record(record))
