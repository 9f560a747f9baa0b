"""Standalone SVG rendering of a scenario and an animated plan."""
from __future__ import annotations

from xml.sax.saxutils import quoteattr

from .scenario import Plan, Scenario, SingleMove

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _poly(points, **attrs) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    extra = "".join(f" {k.replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items())
    return f'<polygon points="{pts}"{extra}/>'


def render_svg(scenario: Scenario, plan: Plan | None = None, step_seconds: float = 1.0,
               width_px: int = 640) -> str:
    """Workspace, obstacles, start/target discs and, if given, the animated plan.

    Every step gets its own time slot of ``step_seconds``; all robots moving
    in that step share the slot, so their positions follow one clock.
    """
    w = scenario.workspace
    x0, y0, x1, y1 = w.boundary.bbox()
    pad = 0.02 * max(x1 - x0, y1 - y0)
    vb = (x0 - pad, y0 - pad, x1 - x0 + 2 * pad, y1 - y0 + 2 * pad)
    height_px = int(round(width_px * vb[3] / vb[2]))
    stroke = _fmt(0.004 * max(vb[2], vb[3]))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{height_px}" '
        f'viewBox="{" ".join(_fmt(v) for v in vb)}">',
        # flip so that y grows upward like the scenario coordinates
        f'<g transform="translate(0,{_fmt(2 * vb[1] + vb[3])}) scale(1,-1)">',
        _poly(w.boundary.vertices, fill="#ffffff", stroke="#000000", stroke_width=stroke),
    ]
    for ob in w.obstacles:
        out.append(_poly(ob.vertices, fill="#555555", stroke="none"))

    for c, spec in enumerate(scenario.colors):
        col = PALETTE[c % len(PALETTE)]
        for x, y in scenario.targets[c]:
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(spec.radius)}" '
                       f'fill="none" stroke="{col}" stroke-width="{stroke}" '
                       f'stroke-dasharray="{stroke},{stroke}"/>')

    tracks: dict = {rid: [] for rid in scenario.robots()}
    if plan is not None:
        for k, st in enumerate(plan.steps):
            moves = [(st.robot, st.motion)] if isinstance(st, SingleMove) else st.motions
            for rid, m in moves:
                if rid in tracks:
                    tracks[rid].append((k, m))
    for rid in scenario.robots():
        c, i = rid
        x, y = scenario.starts[c][i]
        col = PALETTE[c % len(PALETTE)]
        out.append(f'<g transform="translate({_fmt(x)},{_fmt(y)})">')
        out.append(f'<circle cx="0" cy="0" r="{_fmt(scenario.radius(rid))}" fill="{col}" '
                   f'fill-opacity="0.8"><title>robot {c}:{i}</title></circle>')
        for k, m in tracks[rid]:
            out.append(
                f'<animateTransform attributeName="transform" type="translate" '
                f'from="{_fmt(m.start[0])},{_fmt(m.start[1])}" '
                f'to="{_fmt(m.end[0])},{_fmt(m.end[1])}" '
                f'begin="{_fmt(k * step_seconds)}s" dur="{_fmt(step_seconds)}s" fill="freeze"/>')
        out.append("</g>")
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)

