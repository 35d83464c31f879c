/**
 * Canvas viewport: pan offset, bounded zoom, and the mini-map rectangle.
 *
 * Coordinate convention: screen = world * zoom + pan. World coordinates are
 * the node x/y stored on the server; the viewport is purely local state.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface ViewportConfig {
  minZoom: number;
  maxZoom: number;
  screenWidth: number;
  screenHeight: number;
}

export const DEFAULT_VIEWPORT_CONFIG: ViewportConfig = {
  minZoom: 0.25,
  maxZoom: 4.0,
  screenWidth: 1200,
  screenHeight: 800,
};

export class Viewport {
  pan: Point = { x: 0, y: 0 };
  zoom = 1.0;
  readonly config: ViewportConfig;

  constructor(config: Partial<ViewportConfig> = {}) {
    this.config = { ...DEFAULT_VIEWPORT_CONFIG, ...config };
    this.zoom = clamp(1.0, this.config.minZoom, this.config.maxZoom);
  }

  toScreen(world: Point): Point {
    return {
      x: world.x * this.zoom + this.pan.x,
      y: world.y * this.zoom + this.pan.y,
    };
  }

  toWorld(screen: Point): Point {
    return {
      x: (screen.x - this.pan.x) / this.zoom,
      y: (screen.y - this.pan.y) / this.zoom,
    };
  }

  panBy(dx: number, dy: number): void {
    this.pan = { x: this.pan.x + dx, y: this.pan.y + dy };
  }

  /** Zoom about a screen anchor so the world point under it stays put. */
  zoomAt(anchor: Point, factor: number): void {
    const before = this.toWorld(anchor);
    this.zoom = clamp(this.zoom * factor, this.config.minZoom, this.config.maxZoom);
    this.pan = {
      x: anchor.x - before.x * this.zoom,
      y: anchor.y - before.y * this.zoom,
    };
  }

  /** The world-space rectangle currently visible on screen. */
  visibleWorldRect(): Rect {
    const topLeft = this.toWorld({ x: 0, y: 0 });
    const bottomRight = this.toWorld({
      x: this.config.screenWidth,
      y: this.config.screenHeight,
    });
    return {
      x: topLeft.x,
      y: topLeft.y,
      width: bottomRight.x - topLeft.x,
      height: bottomRight.y - topLeft.y,
    };
  }

  /**
   * Where the visible viewport sits inside the mini-map, as fractions of the
   * content bounds (0..1 on each axis, clamped). The mini-map widget scales
   * these into its own pixel box.
   */
  minimapRect(contentBounds: Rect): Rect {
    const visible = this.visibleWorldRect();
    const width = contentBounds.width || 1;
    const height = contentBounds.height || 1;
    const x0 = clamp((visible.x - contentBounds.x) / width, 0, 1);
    const y0 = clamp((visible.y - contentBounds.y) / height, 0, 1);
    const x1 = clamp((visible.x + visible.width - contentBounds.x) / width, 0, 1);
    const y1 = clamp((visible.y + visible.height - contentBounds.y) / height, 0, 1);
    return { x: x0, y: y0, width: x1 - x0, height: y1 - y0 };
  }
}

/** Smallest axis-aligned box containing all points, padded a little. */
export function contentBounds(points: Point[], padding = 50): Rect {
  if (points.length === 0) {
    return { x: -padding, y: -padding, width: 2 * padding, height: 2 * padding };
  }
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p.x);
    minY = Math.min(minY, p.y);
    maxX = Math.max(maxX, p.x);
    maxY = Math.max(maxY, p.y);
  }
  return {
    x: minX - padding,
    y: minY - padding,
    width: maxX - minX + 2 * padding,
    height: maxY - minY + 2 * padding,
  };
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}
