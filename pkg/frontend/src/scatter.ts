/** Embedded scatter views: render-plan construction and canvas painting.
 *
 * Rendering is split in two. buildRenderPlan turns coordinates, the glyph
 * scene and the shared highlight set into a flat list of primitives; the
 * painter executes the plan on a 2D context. Petal fill/border values pass
 * through from the service payload untouched, so the plan is testable
 * against the wire format without a canvas.
 */

import type { ViewState } from "./state.js";
import { Transform } from "./transform.js";
import type { GlyphPayload, SpaceName } from "./types.js";

export type RenderPrimitive =
  | { kind: "halo"; recordId: string; x: number; y: number; radius: number; color: string }
  | { kind: "dot"; recordId: string; x: number; y: number; radius: number; color: string; hovered: boolean }
  | {
      kind: "petal";
      recordId: string;
      attributeIndex: number;
      cx: number;
      cy: number;
      startAngle: number;
      endAngle: number;
      innerRadius: number;
      outerRadius: number;
      fill: string | null;
      border: string | null;
    }
  | { kind: "centerDot"; recordId: string; x: number; y: number; radius: number; color: string };

export interface ScatterInputs {
  space: SpaceName;
  recordIds: string[];
  coords: [number, number][];
  /** Server glyph scene for this space, if fetched. */
  glyphs: GlyphPayload[] | null;
  highlighted: ReadonlySet<string>;
  highlightColors: Map<string, string>;
  hoverId: string | null;
  width: number;
  height: number;
  /** Flowers draw only at or below this many visible records. */
  flowerDensityLimit: number;
}

export const DOT_RADIUS = 3;
export const HALO_RADIUS = 7;
// Petals are annular sectors; the inner hole matches the server's scene
// convention so the center dot stays visible.
export const PETAL_INNER_FRACTION = 0.3;

function visibleIndices(
  coords: [number, number][],
  transform: Transform,
  width: number,
  height: number,
  slack = 16,
): number[] {
  const indices: number[] = [];
  for (let i = 0; i < coords.length; i++) {
    const [px, py] = transform.apply(coords[i]!);
    if (px >= -slack && px <= width + slack && py >= -slack && py <= height + slack) {
      indices.push(i);
    }
  }
  return indices;
}

export function buildRenderPlan(
  inputs: ScatterInputs,
  view: ViewState,
): RenderPrimitive[] {
  const { coords, recordIds, glyphs } = inputs;
  const transform = view.transform;
  const plan: RenderPrimitive[] = [];
  const visible = visibleIndices(coords, transform, inputs.width, inputs.height);

  const glyphById = new Map<string, GlyphPayload>();
  if (glyphs) {
    for (const glyph of glyphs) glyphById.set(glyph.record_id, glyph);
  }
  const flowersActive =
    view.displayMode === "flowers" &&
    glyphs !== null &&
    visible.length <= inputs.flowerDensityLimit;

  // Halos first so they sit under the marks they ring.
  for (const i of visible) {
    const rid = recordIds[i]!;
    if (!inputs.highlighted.has(rid)) continue;
    const [x, y] = transform.apply(coords[i]!);
    plan.push({
      kind: "halo",
      recordId: rid,
      x,
      y,
      radius: flowersActive ? HALO_RADIUS + 6 : HALO_RADIUS,
      color: inputs.highlightColors.get(rid) ?? "#ff8800",
    });
  }

  for (const i of visible) {
    const rid = recordIds[i]!;
    const [x, y] = transform.apply(coords[i]!);
    const glyph = flowersActive ? glyphById.get(rid) : undefined;
    if (glyph) {
      for (const petal of glyph.petals) {
        plan.push({
          kind: "petal",
          recordId: rid,
          attributeIndex: petal.attribute_index,
          cx: x,
          cy: y,
          startAngle: petal.start_angle,
          endAngle: petal.end_angle,
          innerRadius: glyph.radius * PETAL_INNER_FRACTION,
          outerRadius: glyph.radius * petal.outer_radius,
          fill: petal.fill,
          border: petal.border,
        });
      }
      if (glyph.dot) {
        plan.push({
          kind: "centerDot",
          recordId: rid,
          x,
          y,
          radius: glyph.radius * (0.12 + 0.12 * glyph.dot.normalized),
          color: glyph.dot.color,
        });
      }
    } else {
      plan.push({
        kind: "dot",
        recordId: rid,
        x,
        y,
        radius: rid === inputs.hoverId ? DOT_RADIUS + 2 : DOT_RADIUS,
        color: "#3a6ea5",
        hovered: rid === inputs.hoverId,
      });
    }
  }
  return plan;
}

/** Split a "#rrggbb" or "#rrggbbaa" paint into canvas style + alpha. */
export function paintStyle(color: string): { style: string; alpha: number } {
  if (color.length === 9) {
    return { style: color.slice(0, 7), alpha: parseInt(color.slice(7, 9), 16) / 255 };
  }
  return { style: color, alpha: 1 };
}

function tracePetal(
  ctx: CanvasRenderingContext2D,
  petal: Extract<RenderPrimitive, { kind: "petal" }>,
): void {
  // Data angles are counter-clockwise; canvas y points down, so angles negate.
  const a0 = -petal.startAngle;
  const a1 = -petal.endAngle;
  ctx.beginPath();
  ctx.arc(petal.cx, petal.cy, petal.outerRadius, a0, a1, true);
  ctx.arc(petal.cx, petal.cy, petal.innerRadius, a1, a0, false);
  ctx.closePath();
}

export function paintPlan(
  ctx: CanvasRenderingContext2D,
  plan: RenderPrimitive[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  for (const item of plan) {
    switch (item.kind) {
      case "halo": {
        ctx.beginPath();
        ctx.arc(item.x, item.y, item.radius, 0, 2 * Math.PI);
        ctx.strokeStyle = item.color;
        ctx.globalAlpha = 0.9;
        ctx.lineWidth = 3;
        ctx.stroke();
        ctx.globalAlpha = 1;
        break;
      }
      case "dot": {
        ctx.beginPath();
        ctx.arc(item.x, item.y, item.radius, 0, 2 * Math.PI);
        ctx.fillStyle = item.color;
        ctx.fill();
        if (item.hovered) {
          ctx.strokeStyle = "#111111";
          ctx.lineWidth = 1.5;
          ctx.stroke();
        }
        break;
      }
      case "petal": {
        tracePetal(ctx, item);
        if (item.fill) {
          const { style, alpha } = paintStyle(item.fill);
          ctx.fillStyle = style;
          ctx.globalAlpha = alpha;
          ctx.fill();
          ctx.globalAlpha = 1;
        }
        if (item.border) {
          const { style, alpha } = paintStyle(item.border);
          ctx.strokeStyle = style;
          ctx.globalAlpha = alpha;
          ctx.lineWidth = 1;
          ctx.stroke();
          ctx.globalAlpha = 1;
        }
        break;
      }
      case "centerDot": {
        ctx.beginPath();
        ctx.arc(item.x, item.y, item.radius, 0, 2 * Math.PI);
        ctx.fillStyle = item.color;
        ctx.fill();
        ctx.strokeStyle = "#000000";
        ctx.lineWidth = 0.5;
        ctx.stroke();
        break;
      }
    }
  }
}

export interface ScatterCallbacks {
  onLasso(polygon: [number, number][], space: SpaceName): void;
  onHover(recordId: string | null, space: SpaceName): void;
  onTransform(transform: Transform, space: SpaceName): void;
  onOpenRecord(recordId: string, space: SpaceName): void;
}

/** One embedded view: canvas, zoom/pan, hover picking and lasso capture. */
export class ScatterView {
  private lassoPath: [number, number][] | null = null;
  private panFrom: [number, number] | null = null;
  private inputs: ScatterInputs | null = null;
  private view: ViewState | null = null;

  constructor(
    readonly space: SpaceName,
    private readonly canvas: HTMLCanvasElement,
    private readonly callbacks: ScatterCallbacks,
  ) {
    canvas.addEventListener("mousedown", (e) => this.onMouseDown(e));
    canvas.addEventListener("mousemove", (e) => this.onMouseMove(e));
    canvas.addEventListener("mouseup", (e) => this.onMouseUp(e));
    canvas.addEventListener("mouseleave", () => this.onMouseLeave());
    canvas.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });
    canvas.addEventListener("dblclick", (e) => this.onDoubleClick(e));
  }

  render(inputs: ScatterInputs, view: ViewState): RenderPrimitive[] {
    this.inputs = inputs;
    this.view = view;
    const plan = buildRenderPlan(inputs, view);
    const ctx = this.canvas.getContext("2d");
    if (ctx) {
      paintPlan(ctx, plan, inputs.width, inputs.height);
      if (this.lassoPath && this.lassoPath.length > 1) {
        ctx.beginPath();
        const first = view.transform.apply(this.lassoPath[0]!);
        ctx.moveTo(first[0], first[1]);
        for (const pt of this.lassoPath.slice(1)) {
          const [x, y] = view.transform.apply(pt);
          ctx.lineTo(x, y);
        }
        ctx.setLineDash([4, 3]);
        ctx.strokeStyle = "#444444";
        ctx.stroke();
        ctx.setLineDash([]);
      }
    }
    return plan;
  }

  private pixel(e: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    return [e.clientX - rect.left, e.clientY - rect.top];
  }

  private pick(pixel: [number, number]): string | null {
    if (!this.inputs || !this.view) return null;
    const { coords, recordIds } = this.inputs;
    let best: string | null = null;
    let bestDist = 8 * 8;
    for (let i = 0; i < coords.length; i++) {
      const [x, y] = this.view.transform.apply(coords[i]!);
      const dx = x - pixel[0];
      const dy = y - pixel[1];
      const d = dx * dx + dy * dy;
      if (d < bestDist) {
        bestDist = d;
        best = recordIds[i]!;
      }
    }
    return best;
  }

  private onMouseDown(e: MouseEvent): void {
    if (!this.view) return;
    if (e.shiftKey) {
      this.lassoPath = [this.view.transform.invert(this.pixel(e))];
    } else {
      this.panFrom = this.pixel(e);
    }
  }

  private onMouseMove(e: MouseEvent): void {
    if (!this.view) return;
    const pixel = this.pixel(e);
    if (this.lassoPath) {
      this.lassoPath.push(this.view.transform.invert(pixel));
      if (this.inputs) this.render(this.inputs, this.view);
      return;
    }
    if (this.panFrom) {
      const next = this.view.transform.pan(
        pixel[0] - this.panFrom[0],
        pixel[1] - this.panFrom[1],
      );
      this.panFrom = pixel;
      this.callbacks.onTransform(next, this.space);
      return;
    }
    this.callbacks.onHover(this.pick(pixel), this.space);
  }

  private onMouseUp(_e: MouseEvent): void {
    if (this.lassoPath) {
      const polygon = this.lassoPath;
      this.lassoPath = null;
      if (polygon.length >= 3) {
        this.callbacks.onLasso(polygon, this.space);
      }
    }
    this.panFrom = null;
  }

  private onMouseLeave(): void {
    this.panFrom = null;
    this.callbacks.onHover(null, this.space);
  }

  private onWheel(e: WheelEvent): void {
    if (!this.view) return;
    e.preventDefault();
    const factor = e.deltaY < 0 ? 1.15 : 1 / 1.15;
    this.callbacks.onTransform(
      this.view.transform.zoomAt(this.pixel(e), factor),
      this.space,
    );
  }

  private onDoubleClick(e: MouseEvent): void {
    const picked = this.pick(this.pixel(e));
    if (picked) this.callbacks.onOpenRecord(picked, this.space);
  }
}
