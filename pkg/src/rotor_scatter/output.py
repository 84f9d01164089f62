"""Deterministic emission: CSV, JSON, and minimal SVG.

Every number is printed with 17 significant digits so a 64-bit float
round-trips losslessly and repeated runs produce byte-identical files.
The JSON writer is hand-rolled for the same reason: dict keys are sorted
and float formatting is pinned rather than left to the stdlib default.
"""

import hashlib
import math
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

from .model import CrossSectionProfile

__all__ = [
    "fmt_real",
    "emit_json",
    "manifest_hash",
    "profile_csv",
    "sweep_csv",
    "profile_svg",
    "sweep_svg",
    "write_text",
]


def fmt_real(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def emit_json(value, indent: int = 0) -> str:
    """Canonical JSON: sorted keys, pinned float format, LF separators."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        keys = sorted(value, key=str)
        rows = [f'{inner}{_json_string(str(k))}: {emit_json(value[k], indent + 1)}'
                for k in keys]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{inner}{emit_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_real(value)
    if isinstance(value, str):
        return _json_string(value)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _json_string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def manifest_hash(doc) -> str:
    """First 12 hex digits of the canonical-JSON digest of a manifest."""
    blob = emit_json(doc).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


def _channel_label(key: Tuple[int, int]) -> str:
    return f"sigma_{key[0]}_{key[1]}"


def profile_csv(profile: CrossSectionProfile) -> str:
    cols: List[str] = ["theta", "sigma"]
    channels = sorted(profile.per_channel) if profile.per_channel else []
    cols.extend(_channel_label(c) for c in channels)
    lines = [",".join(cols)]
    for i in range(profile.thetas.size):
        row = [fmt_real(profile.thetas[i]), fmt_real(profile.sigma[i])]
        row.extend(fmt_real(profile.per_channel[c][i]) for c in channels)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def sweep_csv(thetas: Sequence[float], k_values: Sequence[float],
              columns: Sequence[Sequence[float]]) -> str:
    """Matrix CSV: one row per theta, one sigma column per wavenumber."""
    if len(columns) != len(k_values):
        raise ValueError("one sigma column required per k value")
    header = ["theta"] + [f"k={fmt_real(k)}" for k in k_values]
    lines = [",".join(header)]
    for i, th in enumerate(thetas):
        row = [fmt_real(th)] + [fmt_real(col[i]) for col in columns]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# fixed canvas for the optional plots; CSV remains the authoritative output
_W, _H, _MARGIN = 640, 420, 54
_COLORS = ("#1f6feb", "#d1242f", "#2da44e", "#bf8700", "#8250df", "#57606a")


def _svg_points(xs: Sequence[float], ys: Sequence[float],
                x_range, y_range) -> str:
    x_lo, x_hi = x_range
    y_lo, y_hi = y_range
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0
    pts = []
    for x, y in zip(xs, ys):
        px = _MARGIN + (x - x_lo) / x_span * (_W - 2 * _MARGIN)
        py = _H - _MARGIN - (y - y_lo) / y_span * (_H - 2 * _MARGIN)
        pts.append(f"{px:.2f},{py:.2f}")
    return " ".join(pts)


def _svg_document(series: Iterable[Tuple[str, Sequence[float], Sequence[float]]],
                  x_label: str, y_label: str, title: str) -> str:
    series = list(series)
    x_lo = min(min(xs) for _, xs, _ in series)
    x_hi = max(max(xs) for _, xs, _ in series)
    y_lo = min(min(ys) for _, _, ys in series)
    y_hi = max(max(ys) for _, _, ys in series)
    y_lo = min(y_lo, 0.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    ax = (f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN}" '
          f'y2="{_H - _MARGIN}" stroke="black"/>'
          f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
          f'y2="{_H - _MARGIN}" stroke="black"/>')
    parts.append(ax)
    for label, x, anchor in ((fmt_real(x_lo)[:10], _MARGIN, "middle"),
                             (fmt_real(x_hi)[:10], _W - _MARGIN, "middle")):
        parts.append(f'<text x="{x}" y="{_H - _MARGIN + 20}" text-anchor="{anchor}" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')
    for label, y in ((fmt_real(y_lo)[:10], _H - _MARGIN),
                     (fmt_real(y_hi)[:10], _MARGIN + 4)):
        parts.append(f'<text x="{_MARGIN - 6}" y="{y}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')
    parts.append(f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13">{x_label}</text>')
    parts.append(f'<text x="16" y="{_H // 2}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="13" '
                 f'transform="rotate(-90 16 {_H // 2})">{y_label}</text>')
    for i, (name, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        pts = _svg_points(xs, ys, (x_lo, x_hi), (y_lo, y_hi))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{pts}"/>')
        ly = _MARGIN + 16 + 16 * i
        parts.append(f'<line x1="{_W - _MARGIN - 150}" y1="{ly - 4}" '
                     f'x2="{_W - _MARGIN - 126}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MARGIN - 120}" y="{ly}" '
                     f'font-family="sans-serif" font-size="11">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def profile_svg(profiles: Iterable[Tuple[str, CrossSectionProfile]],
                title: str) -> str:
    series = [(name, p.thetas.tolist(), p.sigma.tolist())
              for name, p in profiles]
    return _svg_document(series, "theta (rad)", "cross section", title)


def sweep_svg(thetas: Sequence[float], k_values: Sequence[float],
              columns: Sequence[Sequence[float]], title: str) -> str:
    series = [(f"k={fmt_real(k)[:8]}", list(thetas), list(col))
              for k, col in zip(k_values, columns)]
    return _svg_document(series, "theta (rad)", "cross section", title)
