"""Grouped-bar SVG charts for aggregated run metrics.

The charts are plain SVG 1.1 text assembled with fixed-precision
coordinates, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

from .metrics import AggregateStats

METRICS = ("met_rate", "forward_rate")

_Y_LABEL = {
    "met_rate": "Requests meeting deadline (%)",
    "forward_rate": "Forwards used (%)",
}

_POLICY_ORDER = ("fifo", "preferential")
_POLICY_COLOR = {"fifo": "#1f77b4", "preferential": "#ff7f0e"}

WIDTH, HEIGHT = 640, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 40, 60
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def render_chart(stats: list[AggregateStats], metric: str, path: str | Path) -> None:
    """Write a grouped bar chart of ``metric`` (one group per scenario).

    The y axis spans 0-100%; each group holds one bar per policy, in a
    fixed policy order with a legend.  Bar heights are proportional to
    the plotted rate.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric: {metric!r}")
    if not stats:
        raise ValueError("render_chart needs at least one scenario")

    scenarios: list[str] = []
    for s in stats:
        if s.scenario not in scenarios:
            scenarios.append(s.scenario)
    policies = [p for p in _POLICY_ORDER if any(s.policy == p for s in stats)]
    values = {(s.scenario, s.policy): getattr(s, metric) for s in stats}

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')

    # Horizontal gridlines and y tick labels every 20%.
    for pct in range(0, 101, 20):
        y = MARGIN_TOP + PLOT_H * (1 - pct / 100)
        parts.append(
            f'<line x1="{MARGIN_LEFT}" y1="{_fmt(y)}" '
            f'x2="{MARGIN_LEFT + PLOT_W}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{pct}</text>'
        )

    group_w = PLOT_W / len(scenarios)
    bar_w = group_w / (len(policies) + 1)
    baseline = MARGIN_TOP + PLOT_H
    for gi, scenario in enumerate(scenarios):
        group_x = MARGIN_LEFT + gi * group_w
        for pi, policy in enumerate(policies):
            rate = values.get((scenario, policy))
            if rate is None:
                continue
            bar_h = rate * PLOT_H
            x = group_x + bar_w * (pi + 0.5)
            y = baseline - bar_h
            parts.append(
                f'<rect class="bar" data-scenario="{scenario}" '
                f'data-policy="{policy}" x="{_fmt(x)}" y="{_fmt(y)}" '
                f'width="{_fmt(bar_w)}" height="{_fmt(bar_h)}" '
                f'fill="{_POLICY_COLOR[policy]}"/>'
            )
        parts.append(
            f'<text x="{_fmt(group_x + group_w / 2)}" y="{baseline + 20}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">'
            f"{scenario}</text>"
        )

    # Axes.
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{baseline}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{baseline}" '
        f'x2="{MARGIN_LEFT + PLOT_W}" y2="{baseline}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{_fmt(MARGIN_LEFT + PLOT_W / 2)}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13">'
        f"Scenario</text>"
    )
    parts.append(
        f'<text x="18" y="{_fmt(MARGIN_TOP + PLOT_H / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_fmt(MARGIN_TOP + PLOT_H / 2)})">'
        f"{_Y_LABEL[metric]}</text>"
    )

    # Legend, upper right.
    legend_x = MARGIN_LEFT + PLOT_W - 150
    for pi, policy in enumerate(policies):
        y = 14 + pi * 16
        parts.append(
            f'<rect x="{legend_x}" y="{y}" width="12" height="12" '
            f'fill="{_POLICY_COLOR[policy]}"/>'
        )
        parts.append(
            f'<text x="{legend_x + 18}" y="{y + 10}" font-family="sans-serif" '
            f'font-size="12">{policy}</text>'
        )

    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")
