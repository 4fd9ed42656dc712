"""Result files: reports.jsonl, summary.csv and one SVG per concentration profile."""

from __future__ import annotations

import csv
import re
from math import ceil, floor, isfinite, log10
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

from entropylab.lab.reports import ConcentrationProfile, InequalityReport
from entropylab.observability.logger import get_logger

logger = get_logger(__name__)

SUMMARY_COLUMNS = ["name", "n", "lhs", "rhs", "margin", "slack", "satisfied", "seed", "models"]

SVG_WIDTH, SVG_HEIGHT = 640, 420
PLOT_LEFT, PLOT_RIGHT, PLOT_TOP, PLOT_BOTTOM = 70, 610, 40, 360
SERIES_STYLE = {
    "empirical": ("#1f77b4", ""),
    "bound": ("#d62728", "6,4"),
    "oracle": ("#2ca02c", "2,3"),
}


def _number(value: float) -> str:
    """Shared float format of the CSV; matches JSON for finite values, blank otherwise."""
    return repr(float(value)) if isfinite(value) else ""


def write_jsonl(reports: Iterable[InequalityReport], path: Path) -> Path:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for report in reports:
            fh.write(report.model_dump_json())
            fh.write("\n")
    return path


def summary_row(report: InequalityReport) -> List[str]:
    params = report.params
    return [
        report.name,
        str(params.get("n", "")),
        _number(report.lhs),
        _number(report.rhs),
        _number(report.margin),
        _number(report.slack),
        "true" if report.satisfied else "false",
        str(params.get("seed", "")),
        ";".join(params.get("models", [])),
    ]


def write_summary_csv(reports: Iterable[InequalityReport], path: Path) -> Path:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for report in reports:
            writer.writerow(summary_row(report))
    return path


# ---------------------------------------------------------------------------
# SVG profiles
# ---------------------------------------------------------------------------

def _log_range(values: Sequence[float]) -> Tuple[int, int]:
    positive = [v for v in values if v > 0.0 and isfinite(v)]
    if not positive:
        return -1, 0
    low = floor(log10(min(positive)))
    high = ceil(log10(max(positive)))
    return low, max(high, low + 1)


def _polyline(points: Sequence[Tuple[float, float]], color: str, dash: str) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash_attr} points="{coords}"/>'


def render_profile_svg(profile: ConcentrationProfile) -> str:
    """Tail probabilities against ε on a log-10 vertical axis.

    Zero empirical tails cannot sit on a log axis and are left out of the curve.
    """
    series = {"empirical": profile.empirical_tail, "bound": profile.tail_bound}
    if profile.oracle_tail is not None:
        series["oracle"] = profile.oracle_tail
    low, high = _log_range([v for values in series.values() for v in values])
    eps = profile.eps_grid
    x_min, x_max = min(eps), max(eps)
    x_span = (x_max - x_min) or 1.0

    def sx(e: float) -> float:
        return PLOT_LEFT + (e - x_min) / x_span * (PLOT_RIGHT - PLOT_LEFT)

    def sy(v: float) -> float:
        return PLOT_BOTTOM - (log10(v) - low) / (high - low) * (PLOT_BOTTOM - PLOT_TOP)

    title = f"{profile.model} (n={profile.n}, m={profile.m}): tail vs 4 exp(-eps^2 n/16)"
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<text x="{SVG_WIDTH // 2}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{_escape(title)}</text>',
        f'<line x1="{PLOT_LEFT}" y1="{PLOT_BOTTOM}" x2="{PLOT_RIGHT}" y2="{PLOT_BOTTOM}" stroke="black"/>',
        f'<line x1="{PLOT_LEFT}" y1="{PLOT_TOP}" x2="{PLOT_LEFT}" y2="{PLOT_BOTTOM}" stroke="black"/>',
    ]
    for decade in range(low, high + 1):
        y = sy(10.0 ** decade)
        parts.append(
            f'<line x1="{PLOT_LEFT}" y1="{y:.2f}" x2="{PLOT_RIGHT}" y2="{y:.2f}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{PLOT_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">1e{decade}</text>'
        )
    for e in eps:
        parts.append(
            f'<text x="{sx(e):.2f}" y="{PLOT_BOTTOM + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{e:g}</text>'
        )
    parts.append(
        f'<text x="{(PLOT_LEFT + PLOT_RIGHT) // 2}" y="{PLOT_BOTTOM + 40}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">eps</text>'
    )
    for i, (label, values) in enumerate(series.items()):
        color, dash = SERIES_STYLE[label]
        points = [(sx(e), sy(v)) for e, v in zip(eps, values) if v > 0.0 and isfinite(v)]
        if points:
            parts.append(_polyline(points, color, dash))
        ly = PLOT_TOP + 14 + 16 * i
        parts.append(
            f'<line x1="{PLOT_RIGHT - 120}" y1="{ly}" x2="{PLOT_RIGHT - 95}" y2="{ly}" stroke="{color}" '
            f'stroke-width="2"' + (f' stroke-dasharray="{dash}"' if dash else "") + "/>"
        )
        parts.append(
            f'<text x="{PLOT_RIGHT - 90}" y="{ly + 4}" font-family="sans-serif" font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_") or "model"


def write_profile_svgs(profiles: Sequence[ConcentrationProfile], out_dir: Path) -> List[Path]:
    paths = []
    for i, profile in enumerate(profiles):
        path = out_dir / f"profile_{i:03d}_{_slug(profile.model)}_n{profile.n}.svg"
        path.write_text(render_profile_svg(profile), encoding="utf-8")
        paths.append(path)
    return paths


def write_results(
    reports: Sequence[InequalityReport],
    profiles: Sequence[ConcentrationProfile],
    out_dir: Path,
    svg: bool = True,
    jsonl: bool = True,
    summary: bool = True,
) -> List[Path]:
    """Write every enabled artifact; raises OSError when out_dir is not writable."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    if jsonl:
        written.append(write_jsonl(reports, out_dir / "reports.jsonl"))
    if summary:
        written.append(write_summary_csv(reports, out_dir / "summary.csv"))
    if svg:
        written.extend(write_profile_svgs(profiles, out_dir))
    logger.info("results_written", out_dir=str(out_dir), files=len(written))
    return written


def read_jsonl(path: Path) -> List[InequalityReport]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [InequalityReport.model_validate_json(line) for line in lines if line.strip()]
