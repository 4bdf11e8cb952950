/** Minimal reader/writer for the numpy array file format, restricted to
 * what the exporter needs: version 1.0, little-endian float32, C order,
 * 2-D shapes. See the format notes shipped with numpy for the layout:
 * 6-byte magic, 2-byte version, uint16 header length, then a Python dict
 * literal padded with spaces so the data starts on a 64-byte boundary.
 */

const MAGIC = [0x93, 0x4e, 0x55, 0x4d, 0x50, 0x59]; // \x93NUMPY

export function encodeNpyFloat32(matrix: number[][]): Uint8Array {
  const rows = matrix.length;
  const cols = rows > 0 ? matrix[0].length : 0;
  for (const row of matrix) {
    if (row.length !== cols) throw new Error("npy: ragged matrix");
  }

  let header = `{'descr': '<f4', 'fortran_order': False, 'shape': (${rows}, ${cols}), }`;
  const unpadded = MAGIC.length + 2 + 2 + header.length + 1; // +1 for the \n
  const pad = (64 - (unpadded % 64)) % 64;
  header = header + " ".repeat(pad) + "\n";

  const headerBytes = new TextEncoder().encode(header);
  const total = MAGIC.length + 2 + 2 + headerBytes.length + rows * cols * 4;
  const out = new Uint8Array(total);
  const view = new DataView(out.buffer);

  out.set(MAGIC, 0);
  out[6] = 1; // major version
  out[7] = 0;
  view.setUint16(8, headerBytes.length, true);
  out.set(headerBytes, 10);

  let offset = 10 + headerBytes.length;
  for (const row of matrix) {
    for (const value of row) {
      view.setFloat32(offset, value, true);
      offset += 4;
    }
  }
  return out;
}

export interface ParsedNpy {
  descr: string;
  fortranOrder: boolean;
  shape: number[];
  data: Float32Array;
}

export function parseNpy(bytes: Uint8Array): ParsedNpy {
  if (bytes.length < 10 || MAGIC.some((byte, i) => bytes[i] !== byte)) {
    throw new Error("npy: bad magic");
  }
  if (bytes[6] !== 1 || bytes[7] !== 0) {
    throw new Error(`npy: unsupported version ${bytes[6]}.${bytes[7]}`);
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const headerLength = view.getUint16(8, true);
  const header = new TextDecoder().decode(bytes.subarray(10, 10 + headerLength));

  const descr = /'descr':\s*'([^']+)'/.exec(header)?.[1];
  const fortran = /'fortran_order':\s*(True|False)/.exec(header)?.[1];
  const shapeText = /'shape':\s*\(([^)]*)\)/.exec(header)?.[1];
  if (!descr || !fortran || shapeText === undefined) {
    throw new Error(`npy: unparseable header ${JSON.stringify(header)}`);
  }
  if (descr !== "<f4") throw new Error(`npy: unsupported dtype ${descr}`);

  const shape = shapeText
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0)
    .map((part) => Number.parseInt(part, 10));
  const count = shape.reduce((a, b) => a * b, 1);

  const dataOffset = 10 + headerLength;
  if (bytes.length !== dataOffset + count * 4) {
    throw new Error("npy: data length does not match shape");
  }
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = view.getFloat32(dataOffset + i * 4, true);
  }
  return { descr, fortranOrder: fortran === "True", shape, data };
}
