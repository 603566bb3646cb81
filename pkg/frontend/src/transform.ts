/** Invertible zoom/pan transform between data space and canvas pixels.
 *
 * Data y grows upward, canvas y downward; scale is uniform so flowers stay
 * round. scale > 0 is an invariant, which keeps the transform invertible.
 */

export class Transform {
  constructor(
    readonly scale: number,
    readonly tx: number,
    readonly ty: number,
  ) {
    if (!(scale > 0) || !Number.isFinite(tx) || !Number.isFinite(ty)) {
      throw new Error(`transform must be invertible, got scale=${scale}`);
    }
  }

  apply(point: [number, number]): [number, number] {
    return [point[0] * this.scale + this.tx, -point[1] * this.scale + this.ty];
  }

  invert(point: [number, number]): [number, number] {
    return [(point[0] - this.tx) / this.scale, -(point[1] - this.ty) / this.scale];
  }

  pan(dxPixels: number, dyPixels: number): Transform {
    return new Transform(this.scale, this.tx + dxPixels, this.ty + dyPixels);
  }

  /** Zoom by a factor keeping the given canvas point fixed. */
  zoomAt(pixel: [number, number], factor: number): Transform {
    const scale = this.scale * factor;
    return new Transform(
      scale,
      pixel[0] - (pixel[0] - this.tx) * factor,
      pixel[1] - (pixel[1] - this.ty) * factor,
    );
  }

  /** Fit data bounds into a canvas with a pixel margin. */
  static fit(
    coords: readonly [number, number][],
    width: number,
    height: number,
    margin = 24,
  ): Transform {
    if (coords.length === 0) {
      return new Transform(1, width / 2, height / 2);
    }
    let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
    for (const [x, y] of coords) {
      xmin = Math.min(xmin, x);
      xmax = Math.max(xmax, x);
      ymin = Math.min(ymin, y);
      ymax = Math.max(ymax, y);
    }
    const spanX = Math.max(xmax - xmin, 1e-9);
    const spanY = Math.max(ymax - ymin, 1e-9);
    const scale = Math.min(
      (width - 2 * margin) / spanX,
      (height - 2 * margin) / spanY,
    );
    const cx = (xmin + xmax) / 2;
    const cy = (ymin + ymax) / 2;
    return new Transform(scale, width / 2 - cx * scale, height / 2 + cy * scale);
  }
}
