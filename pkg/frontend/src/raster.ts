import { PNG } from 'pngjs'
import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph } from './font'

export type Color = [number, number, number]

export const WHITE: Color = [255, 255, 255]
export const BLACK: Color = [0, 0, 0]
export const GRAY: Color = [200, 200, 200]

/** Fixed line colors so reruns are pixel-identical. */
export const SERIES_COLORS: Color[] = [
  [31, 119, 180],
  [214, 39, 40],
  [44, 160, 44],
  [255, 127, 14],
]

/** A plain RGBA pixel buffer with just enough drawing for line plots. */
export class Raster {
  readonly width: number
  readonly height: number
  readonly data: Uint8Array

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width
    this.height = height
    this.data = new Uint8Array(width * height * 4)
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = background[0]
      this.data[4 * i + 1] = background[1]
      this.data[4 * i + 2] = background[2]
      this.data[4 * i + 3] = 255
    }
  }

  set(x: number, y: number, color: Color): void {
    const xi = Math.round(x)
    const yi = Math.round(y)
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return
    const k = 4 * (yi * this.width + xi)
    this.data[k] = color[0]
    this.data[k + 1] = color[1]
    this.data[k + 2] = color[2]
    this.data[k + 3] = 255
  }

  /** Bresenham segment, clipped by per-pixel bounds checks. */
  line(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    let xa = Math.round(x0)
    let ya = Math.round(y0)
    const xb = Math.round(x1)
    const yb = Math.round(y1)
    const dx = Math.abs(xb - xa)
    const dy = -Math.abs(yb - ya)
    const sx = xa < xb ? 1 : -1
    const sy = ya < yb ? 1 : -1
    let err = dx + dy
    for (;;) {
      this.set(xa, ya, color)
      if (xa === xb && ya === yb) break
      const e2 = 2 * err
      if (e2 >= dy) {
        err += dy
        xa += sx
      }
      if (e2 <= dx) {
        err += dx
        ya += sy
      }
    }
  }

  /** A thicker polyline segment: the base line plus one-pixel offsets. */
  thickLine(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    this.line(x0, y0, x1, y1, color)
    this.line(x0 + 1, y0, x1 + 1, y1, color)
    this.line(x0, y0 + 1, x1, y1 + 1, color)
  }

  marker(x: number, y: number, color: Color): void {
    for (let dx = -1; dx <= 1; dx++) {
      for (let dy = -1; dy <= 1; dy++) {
        this.set(x + dx, y + dy, color)
      }
    }
  }

  rect(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    this.line(x0, y0, x1, y0, color)
    this.line(x1, y0, x1, y1, color)
    this.line(x1, y1, x0, y1, color)
    this.line(x0, y1, x0, y0, color)
  }

  text(x: number, y: number, message: string, color: Color, scale = 1): void {
    let cx = Math.round(x)
    for (const ch of message) {
      const rows = glyph(ch)
      if (rows) {
        for (let r = 0; r < GLYPH_HEIGHT; r++) {
          for (let c = 0; c < GLYPH_WIDTH; c++) {
            if (rows[r][c] === '#') {
              for (let sx = 0; sx < scale; sx++) {
                for (let sy = 0; sy < scale; sy++) {
                  this.set(cx + c * scale + sx, y + r * scale + sy, color)
                }
              }
            }
          }
        }
      }
      cx += (GLYPH_WIDTH + 1) * scale
    }
  }

  static textWidth(message: string, scale = 1): number {
    return message.length * (GLYPH_WIDTH + 1) * scale
  }

  toPng(): Buffer {
    const png = new PNG({ width: this.width, height: this.height })
    Buffer.from(this.data).copy(png.data)
    return PNG.sync.write(png)
  }
}
