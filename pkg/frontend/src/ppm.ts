/** Decoder for the scene container's binary PPM frames (P6, 8-bit). */

export interface DecodedFrame {
  width: number;
  height: number;
  /** RGBA, ready for ImageData. */
  rgba: Uint8ClampedArray<ArrayBuffer>;
}

export function decodePpm(data: Uint8Array): DecodedFrame {
  if (data[0] !== 0x50 || data[1] !== 0x36) { // "P6"
    throw new Error("not a P6 ppm");
  }
  let i = 2;
  const fields: number[] = [];
  while (fields.length < 3) {
    while (i < data.length && isSpace(data[i])) {
      i += 1;
    }
    let j = i;
    while (j < data.length && !isSpace(data[j])) {
      j += 1;
    }
    if (i === j) {
      throw new Error("truncated ppm header");
    }
    const value = Number(textOf(data, i, j));
    if (!Number.isInteger(value)) {
      throw new Error("bad ppm header field");
    }
    fields.push(value);
    i = j;
  }
  i += 1; // single whitespace after maxval
  const [width, height, maxval] = fields;
  if (maxval !== 255 || width <= 0 || height <= 0) {
    throw new Error("unsupported ppm parameters");
  }
  const expected = width * height * 3;
  if (data.length - i !== expected) {
    throw new Error(`ppm body is ${data.length - i} bytes, expected ${expected}`);
  }
  const rgba = new Uint8ClampedArray(width * height * 4);
  for (let px = 0, src = i; px < width * height; px += 1, src += 3) {
    const dst = px * 4;
    rgba[dst] = data[src];
    rgba[dst + 1] = data[src + 1];
    rgba[dst + 2] = data[src + 2];
    rgba[dst + 3] = 255;
  }
  return { width, height, rgba };
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x0a || byte === 0x0d || byte === 0x09;
}

function textOf(data: Uint8Array, from: number, to: number): string {
  let out = "";
  for (let k = from; k < to; k += 1) {
    out += String.fromCharCode(data[k]);
  }
  return out;
}

export function frameUrl(sceneBase: string, index: number): string {
  return `${sceneBase}/frames/${String(index).padStart(6, "0")}.ppm`;
}
