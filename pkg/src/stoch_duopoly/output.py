"""Flat-file output: CSV tables and small self-contained SVG line plots."""

import csv
import io
import math

FLOAT_FORMAT = ".17g"


def fmt(x):
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, FLOAT_FORMAT)


def _write(path, header, rows, trailer=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if trailer:
        buf.write(trailer + "\n")
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def write_density_csv(path, density):
    _write(path, ["theta", "p"], ([fmt(t), fmt(p)] for t, p in zip(density.theta, density.values)))


def write_sweep_csv(path, result):
    rows = ([fmt(p.param), fmt(p.value), p.method, fmt(p.stderr)] for p in result.points)
    _write(path, ["param", "lambda", "method", "stderr"], rows)


def write_roots_csv(path, changes):
    rows = ([fmt(c.param_lo), fmt(c.param_hi), fmt(c.root_estimate)] for c in changes)
    _write(path, ["param_lo", "param_hi", "root_estimate"], rows)


def write_trajectory_csv(path, traj):
    rows = ([str(int(n)), fmt(t), fmt(x[0]), fmt(x[1])] for n, t, x in zip(traj.steps, traj.times, traj.states))
    trailer = f"# truncated_at={traj.truncated_at}" if traj.truncated_at is not None else None
    _write(path, ["n", "t", "x1", "x2"], rows, trailer)


def read_csv(path):
    """Header and rows of a CSV written here; comment lines are skipped."""
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * abs(step):
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def line_plot(series, title="", xlabel="", ylabel="", zero_line=False, markers=(), note=None, width=640, height=420):
    """SVG polyline plot.

    ``series`` is a list of ``(label, xs, ys)``; NaN points split a line.
    ``markers`` are x positions drawn as vertical dashed lines (e.g. roots).
    """
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"]
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if zero_line:
        y0, y1 = min(y0, 0.0), max(y1, 0.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{sx(t):.2f}" y1="{top + ph}" x2="{sx(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{left - 5}" y1="{sy(t):.2f}" x2="{left}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(t) + 4:.2f}" font-size="11" text-anchor="end">{t:.4g}</text>')
    if zero_line:
        out.append(f'<line x1="{left}" y1="{sy(0):.2f}" x2="{left + pw}" y2="{sy(0):.2f}" stroke="#888" stroke-dasharray="4 3"/>')
    for m in markers:
        if x0 <= m <= x1:
            out.append(f'<line x1="{sx(m):.2f}" y1="{top}" x2="{sx(m):.2f}" y2="{top + ph}" stroke="#d62728" stroke-dasharray="2 3"/>')
            out.append(f'<text x="{sx(m):.2f}" y="{top - 4}" font-size="10" text-anchor="middle" fill="#d62728">{m:.4g}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = colors[k % len(colors)]
        segment = []
        for x, y in list(zip(xs, ys)) + [(math.nan, math.nan)]:
            if math.isfinite(x) and math.isfinite(y):
                segment.append(f"{sx(x):.2f},{sy(y):.2f}")
            elif segment:
                out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(segment)}"/>')
                segment = []
        if label:
            out.append(f'<text x="{left + pw - 5}" y="{top + 15 + 14 * k}" font-size="11" text-anchor="end" fill="{color}">{_esc(label)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{top - 20}" font-size="13" text-anchor="middle">{_esc(title)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" font-size="12" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="15" y="{top + ph / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {top + ph / 2})">{_esc(ylabel)}</text>')
    if note:
        out.append(f'<text x="{left + 5}" y="{top + 15}" font-size="11" fill="#d62728">{_esc(note)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(text):
    return str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(path, svg):
    with open(path, "w", newline="") as fh:
        fh.write(svg)
