/**
 * Deterministic test card used when camera permission is denied (and in
 * CI, where there is no camera at all). Red/green gradients over a flat
 * blue channel give the color filters something to bend, the quarter
 * patches are strong blue/yellow (the pair the tritan deficit
 * collapses), and the fine stripes at the bottom show blur. A small
 * white block slides with the frame index so motion is visible.
 */

export interface RgbaImage {
  width: number;
  height: number;
  data: Uint8ClampedArray; // RGBA, row-major
}

export function testCard(width: number, height: number, frameIndex = 0): RgbaImage {
  const data = new Uint8ClampedArray(width * height * 4);
  const patchH = Math.floor(height / 4);
  const stripeTop = height - Math.floor(height / 4);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      let r = Math.round((255 * x) / Math.max(1, width - 1));
      let g = Math.round((255 * y) / Math.max(1, height - 1));
      let b = 128;
      if (y < patchH) {
        if (x < width / 2) {
          r = 255; g = 220; b = 0; // yellow
        } else {
          r = 0; g = 64; b = 255; // blue
        }
      } else if (y >= stripeTop) {
        const v = Math.floor(x / 4) % 2 ? 230 : 25;
        r = v; g = v; b = v;
      }
      const i = (y * width + x) * 4;
      data[i] = r;
      data[i + 1] = g;
      data[i + 2] = b;
      data[i + 3] = 255;
    }
  }
  // Sliding marker, one block high, mid-card.
  const block = Math.max(4, Math.floor(width / 20));
  const bx = (frameIndex * 3) % Math.max(1, width - block);
  const by = Math.floor(height / 2);
  for (let y = by; y < Math.min(height, by + block); y++) {
    for (let x = bx; x < bx + block; x++) {
      const i = (y * width + x) * 4;
      data[i] = data[i + 1] = data[i + 2] = 255;
    }
  }
  return { width, height, data };
}
