"""Attribute-flower glyphs: one petal per filtered attribute.

The flower is a radial glyph drawn at a record's embedding position. Petal
fill and border encode how the prediction relates to the ground truth for
that attribute; the center dot encodes the ACT-PRD error distance. Geometry
is produced as a resolution-independent scene description and rendered to
SVG 1.1 separately.

Joint-mode encoding at the 0.5 cut-off:

    TP  filled with the attribute color, black border
    FN  filled with the attribute color, no border
    FP  hollow, black border
    TN  faint gray outline placeholder (keeps petal positions stable)

ActOnly fills petals whose attribute is present in ACT; PrdOnly fills petals
whose prediction clears 0.5 with opacity proportional to the probability.
Neither single-value mode draws borders, and only Joint mode has a center
dot.

Colors are "#RRGGBB" or "#RRGGBBAA" strings; rendering splits the alpha
byte into SVG 1.1 opacity attributes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .dataset import AttributeSchema, ImageRecord
from .errors import ArgumentError
from .metrics import DistanceKind, Outcome, classify_outcome, error_distance


class FlowerMode(Enum):
    ACT_ONLY = "act"
    PRD_ONLY = "prd"
    JOINT = "joint"


# Petal 0 starts at 12 o'clock and petals proceed counter-clockwise with a
# fixed 4-degree gap between sectors.
START_ANGLE = math.pi / 2.0
PETAL_GAP = math.radians(4.0)
GLYPH_THRESHOLD = 0.5

BLACK = "#000000"
# 15%-alpha gray for TN placeholder outlines (0.15 * 255 = 38 = 0x26).
TN_OUTLINE = "#80808026"

# Petals are annular sectors: the hole leaves room for the center dot.
INNER_RADIUS_FRACTION = 0.3


def _with_alpha(color: str, alpha: float) -> str:
    """Fold an opacity in [0, 1] into an #RRGGBBAA color."""
    byte = min(255, max(0, round(alpha * 255.0)))
    return f"{color[:7]}{byte:02x}"


def _split_paint(color: str | None) -> tuple[str, float | None]:
    """(#RRGGBB, opacity-or-None) for SVG 1.1 output."""
    if color is None:
        return "none", None
    if len(color) == 9:
        return color[:7], int(color[7:9], 16) / 255.0
    return color, None


@dataclass(frozen=True)
class PetalSpec:
    """One annular-sector petal; angles in radians, CCW, unwrapped."""

    attribute_index: int
    start_angle: float
    end_angle: float
    outer_radius: float
    fill: str | None
    border: str | None


@dataclass(frozen=True)
class CenterDot:
    value: float
    normalized: float
    color: str


@dataclass(frozen=True)
class FlowerGlyphSpec:
    """Renderable flower: petals plus optional center dot at one position.

    ``center`` is in embedding (data) coordinates, ``radius`` in screen
    pixels; the record id keys the SVG group element.
    """

    record_id: str
    center: tuple[float, float]
    radius: float
    petals: tuple[PetalSpec, ...]
    center_dot: CenterDot | None

    def to_json(self) -> dict:
        dot = None
        if self.center_dot is not None:
            dot = {"value": self.center_dot.value,
                   "normalized": self.center_dot.normalized,
                   "color": self.center_dot.color}
        return {
            "record_id": self.record_id,
            "center": [self.center[0], self.center[1]],
            "radius": self.radius,
            "petals": [
                {"attribute_index": p.attribute_index,
                 "start_angle": p.start_angle,
                 "end_angle": p.end_angle,
                 "outer_radius": p.outer_radius,
                 "fill": p.fill,
                 "border": p.border}
                for p in self.petals
            ],
            "dot": dot,
        }


def _dot_color(normalized: float) -> str:
    """Grayscale ramp: white at zero error, black at the dataset maximum."""
    level = min(255, max(0, round((1.0 - normalized) * 255.0)))
    return f"#{level:02x}{level:02x}{level:02x}"


def _petal_state(outcome: Outcome, color: str) -> tuple[str | None, str | None]:
    if outcome is Outcome.TP:
        return color, BLACK
    if outcome is Outcome.FN:
        return color, None
    if outcome is Outcome.FP:
        return None, BLACK
    return None, TN_OUTLINE


def layout_flower(record: ImageRecord, schema: AttributeSchema,
                  filter_indices: Iterable[int], mode: FlowerMode,
                  distance_kind: DistanceKind = DistanceKind.EUCLIDEAN,
                  max_distance: float = 0.0,
                  center: tuple[float, float] = (0.0, 0.0),
                  radius: float = 1.0) -> FlowerGlyphSpec:
    """Compute the flower glyph for one record under an attribute filter.

    Petals span equal angular sectors in ascending attribute-index order,
    counter-clockwise from 12 o'clock, separated by a fixed 4-degree gap.
    ``max_distance`` normalizes the center dot; pass the dataset-wide
    maximum (or 0 to pin the normalized value at 0).
    """
    indices = sorted(set(int(i) for i in filter_indices))
    if not indices:
        raise ArgumentError("attribute filter must not be empty")
    if indices[0] < 0 or indices[-1] >= schema.k:
        raise ArgumentError(f"attribute index out of range for k={schema.k}")
    mode = FlowerMode(mode)
    distance_kind = DistanceKind(distance_kind)
    if max_distance < 0:
        raise ArgumentError(f"max_distance must be >= 0, got {max_distance}")

    m = len(indices)
    sector = 2.0 * math.pi / m
    span = sector - PETAL_GAP
    if span <= 0:
        raise ArgumentError(f"{m} petals leave no room for the 4-degree gap")

    petals = []
    for slot, attr in enumerate(indices):
        a0 = START_ANGLE + slot * sector
        a1 = a0 + span
        color = schema.colors[attr]
        act = int(record.act[attr])
        prd = float(record.prd[attr])
        if mode is FlowerMode.JOINT:
            outcome = classify_outcome(act, prd, GLYPH_THRESHOLD)
            fill, border = _petal_state(outcome, color)
        elif mode is FlowerMode.ACT_ONLY:
            fill, border = (color if act == 1 else None), None
        else:  # PRD_ONLY: opacity encodes the probability
            fill = _with_alpha(color, prd) if prd >= GLYPH_THRESHOLD else None
            border = None
        petals.append(PetalSpec(attribute_index=attr, start_angle=a0,
                                end_angle=a1, outer_radius=1.0,
                                fill=fill, border=border))

    dot = None
    if mode is FlowerMode.JOINT:
        value = error_distance(record.act, record.prd, distance_kind)
        normalized = value / max_distance if max_distance > 0 else 0.0
        dot = CenterDot(value=value, normalized=normalized,
                        color=_dot_color(normalized))

    return FlowerGlyphSpec(record_id=record.id, center=center, radius=radius,
                           petals=tuple(petals), center_dot=dot)


# ---------------------------------------------------------------------------
# SVG rendering
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def _polar(radius: float, angle: float) -> tuple[float, float]:
    # SVG y grows downward; negate so increasing angles run CCW on screen.
    return radius * math.cos(angle), -radius * math.sin(angle)


def _petal_path(petal: PetalSpec, radius: float) -> str:
    r_out = radius * petal.outer_radius
    r_in = radius * INNER_RADIUS_FRACTION
    a0, a1 = petal.start_angle, petal.end_angle
    large = 1 if (a1 - a0) > math.pi else 0
    ox0, oy0 = _polar(r_out, a0)
    ox1, oy1 = _polar(r_out, a1)
    ix0, iy0 = _polar(r_in, a0)
    ix1, iy1 = _polar(r_in, a1)
    return (
        f"M {_fmt(ix0)} {_fmt(iy0)} "
        f"L {_fmt(ox0)} {_fmt(oy0)} "
        f"A {_fmt(r_out)} {_fmt(r_out)} 0 {large} 0 {_fmt(ox1)} {_fmt(oy1)} "
        f"L {_fmt(ix1)} {_fmt(iy1)} "
        f"A {_fmt(r_in)} {_fmt(r_in)} 0 {large} 1 {_fmt(ix0)} {_fmt(iy0)} Z"
    )


def _paint_attrs(fill: str | None, stroke: str | None) -> str:
    fill_rgb, fill_op = _split_paint(fill)
    stroke_rgb, stroke_op = _split_paint(stroke)
    parts = [f'fill="{fill_rgb}"']
    if fill_op is not None:
        parts.append(f'fill-opacity="{_fmt(fill_op)}"')
    parts.append(f'stroke="{stroke_rgb}"')
    if stroke_op is not None:
        parts.append(f'stroke-opacity="{_fmt(stroke_op)}"')
    return " ".join(parts)


def render_svg(glyphs: Sequence[FlowerGlyphSpec], width: float, height: float,
               viewport: tuple[float, float, float, float]) -> str:
    """Render glyphs to an SVG 1.1 document string.

    ``viewport`` is the data-space rectangle (xmin, ymin, xmax, ymax) mapped
    onto the canvas, y up in data space and down on the canvas. Each glyph
    becomes a group with the stable id ``glyph-<record id>``. Output bytes
    are deterministic for identical input.
    """
    if width <= 0 or height <= 0:
        raise ArgumentError(f"canvas must be positive, got {width}x{height}")
    xmin, ymin, xmax, ymax = viewport
    if not (xmax > xmin and ymax > ymin):
        raise ArgumentError(f"degenerate viewport {viewport}")

    sx = width / (xmax - xmin)
    sy = height / (ymax - ymin)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    for glyph in glyphs:
        px = (glyph.center[0] - xmin) * sx
        py = height - (glyph.center[1] - ymin) * sy
        lines.append(
            f'<g id="glyph-{glyph.record_id}" '
            f'transform="translate({_fmt(px)} {_fmt(py)})">'
        )
        for petal in glyph.petals:
            d = _petal_path(petal, glyph.radius)
            lines.append(
                f'<path d="{d}" {_paint_attrs(petal.fill, petal.border)} '
                f'stroke-width="1"/>'
            )
        if glyph.center_dot is not None:
            dot_r = glyph.radius * (0.12 + 0.12 * glyph.center_dot.normalized)
            lines.append(
                f'<circle cx="0" cy="0" r="{_fmt(dot_r)}" '
                f'fill="{glyph.center_dot.color}" stroke="{BLACK}" '
                f'stroke-width="0.5"/>'
            )
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
