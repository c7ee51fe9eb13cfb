"""Deterministic SVG rendering of heatmaps and grouped bar charts.

Pure string building: identical inputs yield byte-identical files, and the
geometry (one rect per heatmap cell, bar height equal to accuracy times
BAR_PLOT_HEIGHT) is simple enough for tests to parse back and verify.
"""

from xml.sax.saxutils import escape

from . import analyzer
from .analyzer import FAMILIES, DetectionParams

SVG_HEADER = (
    '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
    '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN"'
    ' "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
)

FAMILY_COLORS = {
    "mono_cmn": "#cc3333",
    "mono_en": "#3355cc",
    "switch_cp": "#33a033",
    "switch_conv": "#8844bb",
}
FAMILY_TITLES = {
    "mono_cmn": "monolingual Mandarin",
    "mono_en": "monolingual English",
    "switch_cp": "switch at critical period",
    "switch_conv": "switch at convergence",
}

#: Pixel height a bar of accuracy 1.0 would have; tests divide parsed
#: heights by this to recover accuracies.
BAR_PLOT_HEIGHT = 160.0

CELL = 14  # heatmap cell edge in px


def _fmt(value) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".") if value % 1 else str(int(value))


def _svg(width, height, body) -> str:
    return (
        SVG_HEADER
        + f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n'
        + body
        + "</svg>\n"
    )


def _shade(accuracy: float) -> str:
    level = round(255 * (1.0 - accuracy))
    return f"#{level:02x}{level:02x}{level:02x}"


def _text(x, y, content, size=9, anchor="start", extra=""):
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
        f'font-family="monospace" text-anchor="{anchor}"{extra}>{escape(content)}</text>\n'
    )


def render_heatmap(trace, out_path, detection: DetectionParams | None = None) -> None:
    """Epochs along x, visemes along y, cell shade darkening with accuracy.

    If the trace is long enough for detection and a critical period is
    found, that epoch's column is outlined.
    """
    detection = detection if detection is not None else DetectionParams()
    n_epochs = trace.n_epochs
    labels = trace.inventory
    left, top = 52, 18
    width = left + n_epochs * CELL + 12
    height = top + len(labels) * CELL + 26

    parts = []
    matrix = trace.accuracy_matrix()
    for col in range(n_epochs):
        for row in range(len(labels)):
            value = matrix[col, row]
            x = left + col * CELL
            y = top + row * CELL
            if value != value:  # NaN: viseme absent at this epoch
                parts.append(
                    f'<rect class="cell absent" x="{x}" y="{y}" width="{CELL}" '
                    f'height="{CELL}" fill="#ffffff" stroke="#dddddd"/>\n'
                )
            else:
                parts.append(
                    f'<rect class="cell" x="{x}" y="{y}" width="{CELL}" '
                    f'height="{CELL}" fill="{_shade(value)}"/>\n'
                )

    cp_epoch = None
    if n_epochs >= 3:
        cp_epoch = analyzer.detect_critical_period(trace, detection).cp_epoch
    if cp_epoch is not None:
        x = left + (cp_epoch - 1) * CELL
        parts.append(
            f'<rect class="cp-marker" x="{x}" y="{top}" width="{CELL}" '
            f'height="{len(labels) * CELL}" fill="none" stroke="#cc0000" stroke-width="2"/>\n'
        )

    for row, label in enumerate(labels):
        parts.append(_text(left - 4, top + row * CELL + CELL - 4, label, anchor="end"))
    tick = max(1, n_epochs // 10)
    for col in range(0, n_epochs, tick):
        parts.append(
            _text(left + col * CELL + CELL / 2, top + len(labels) * CELL + 12,
                  str(col + 1), size=8, anchor="middle")
        )
    parts.append(_text(left, 12, f"per-viseme accuracy ({trace.protocol.get('kind', '?')})", size=10))

    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_svg(width, height, "".join(parts)))


def _legend(x, y):
    parts = []
    for i, family in enumerate(FAMILIES):
        ly = y + i * 14
        parts.append(
            f'<rect class="legend-swatch" x="{_fmt(x)}" y="{_fmt(ly)}" width="10" height="10" '
            f'fill="{FAMILY_COLORS[family]}"/>\n'
        )
        parts.append(_text(x + 14, ly + 9, FAMILY_TITLES[family], size=9))
    return "".join(parts)


def render_bars(report, out_path) -> None:
    """Grouped bars per viseme: the two monolingual references and the two
    sequential switch rules. Labels with no values at all are skipped; a
    report with nothing to plot still renders the legend.
    """
    bar_w, gap, group_pad = 7, 1, 8
    group_w = len(FAMILIES) * (bar_w + gap) + group_pad
    plotted = [
        label
        for label in report.inventory
        if any(report.per_viseme[label][f] is not None for f in FAMILIES)
    ]
    left, top = 34, 16
    base = top + BAR_PLOT_HEIGHT
    legend_w = 170
    width = left + max(len(plotted) * group_w, 0) + legend_w + 20
    height = base + 34

    parts = [
        f'<line x1="{left}" y1="{_fmt(base)}" x2="{_fmt(left + len(plotted) * group_w)}" '
        f'y2="{_fmt(base)}" stroke="#333333" stroke-width="1"/>\n'
    ]
    for g, label in enumerate(plotted):
        gx = left + g * group_w
        for i, family in enumerate(FAMILIES):
            value = report.per_viseme[label][family]
            if value is None:
                continue
            h = value * BAR_PLOT_HEIGHT
            x = gx + i * (bar_w + gap)
            parts.append(
                f'<rect class="bar bar-{family}" x="{_fmt(x)}" y="{_fmt(base - h)}" '
                f'width="{bar_w}" height="{_fmt(h)}" fill="{FAMILY_COLORS[family]}"/>\n'
            )
        parts.append(
            _text(gx + (group_w - group_pad) / 2, base + 12, label, size=8, anchor="middle")
        )
    parts.append(_text(left, 10, "final accuracy per viseme", size=10))
    parts.append(_legend(left + len(plotted) * group_w + 16, top + 4))

    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_svg(width, height, "".join(parts)))


def render_distribution(distribution, out_path, title="viseme distribution") -> None:
    """Descending-count bar chart of a viseme distribution."""
    items = distribution.sorted_items()
    bar_w, gap = 16, 4
    left, top = 40, 18
    plot_h = 150.0
    base = top + plot_h
    width = left + len(items) * (bar_w + gap) + 16
    height = base + 30
    peak = max((count for _, count in items), default=1)

    parts = []
    for i, (label, count) in enumerate(items):
        h = plot_h * count / peak
        x = left + i * (bar_w + gap)
        parts.append(
            f'<rect class="bar" x="{_fmt(x)}" y="{_fmt(base - h)}" width="{bar_w}" '
            f'height="{_fmt(h)}" fill="#557799"/>\n'
        )
        parts.append(_text(x + bar_w / 2, base + 12, label, size=8, anchor="middle"))
    parts.append(_text(left, 10, title, size=10))

    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_svg(width, height, "".join(parts)))
