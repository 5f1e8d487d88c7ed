/**
 * Minimal NPY/NPZ writer so dataset splits land directly in the
 * enumeration side's .npz schema (arrays "x" float64 (N, d) and "y"
 * int64 (N,)). NPY v1.0 headers, NPZ as an uncompressed (STORE) zip.
 */

const NPY_MAGIC = Buffer.from("\x93NUMPY", "latin1");

export interface NamedArray {
  name: string;
  descr: "<f8" | "<i8";
  shape: number[];
  /** Raw little-endian payload matching descr/shape. */
  data: Buffer;
}

export function float64Array(name: string, values: Float64Array, shape: number[]): NamedArray {
  const expected = shape.reduce((a, b) => a * b, 1);
  if (values.length !== expected) {
    throw new Error(`array ${name}: ${values.length} values do not fill shape ${shape}`);
  }
  return {
    name,
    descr: "<f8",
    shape,
    data: Buffer.from(values.buffer, values.byteOffset, values.byteLength),
  };
}

export function int64Array(name: string, values: number[] | Int32Array, shape: number[]): NamedArray {
  const big = new BigInt64Array(values.length);
  for (let i = 0; i < values.length; i++) big[i] = BigInt(values[i]);
  return {
    name,
    descr: "<i8",
    shape,
    data: Buffer.from(big.buffer),
  };
}

export function npyBytes(arr: NamedArray): Buffer {
  const shapeText = arr.shape.length === 1 ? `(${arr.shape[0]},)` : `(${arr.shape.join(", ")})`;
  let header = `{'descr': '${arr.descr}', 'fortran_order': False, 'shape': ${shapeText}, }`;
  const baseLen = NPY_MAGIC.length + 2 + 2; // magic + version + header length field
  const padded = Math.ceil((baseLen + header.length + 1) / 64) * 64;
  header = header.padEnd(padded - baseLen - 1, " ") + "\n";
  const head = Buffer.alloc(baseLen);
  NPY_MAGIC.copy(head, 0);
  head[6] = 1; // format version 1.0
  head[7] = 0;
  head.writeUInt16LE(header.length, 8);
  return Buffer.concat([head, Buffer.from(header, "latin1"), arr.data]);
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

/** Uncompressed zip of name -> bytes entries (the npz container). */
export function zipStore(entries: { name: string; bytes: Buffer }[]): Buffer {
  const chunks: Buffer[] = [];
  const central: Buffer[] = [];
  let offset = 0;
  for (const { name, bytes } of entries) {
    const nameBuf = Buffer.from(name, "latin1");
    const crc = crc32(bytes);
    const local = Buffer.alloc(30);
    local.writeUInt32LE(0x04034b50, 0);
    local.writeUInt16LE(20, 4);            // version needed
    local.writeUInt16LE(0, 6);             // flags
    local.writeUInt16LE(0, 8);             // method: STORE
    local.writeUInt16LE(0, 10);            // mod time
    local.writeUInt16LE(0, 12);            // mod date
    local.writeUInt32LE(crc, 14);
    local.writeUInt32LE(bytes.length, 18); // compressed size
    local.writeUInt32LE(bytes.length, 22); // uncompressed size
    local.writeUInt16LE(nameBuf.length, 26);
    local.writeUInt16LE(0, 28);            // extra length
    chunks.push(local, nameBuf, bytes);

    const dir = Buffer.alloc(46);
    dir.writeUInt32LE(0x02014b50, 0);
    dir.writeUInt16LE(20, 4);              // version made by
    dir.writeUInt16LE(20, 6);              // version needed
    dir.writeUInt16LE(0, 8);
    dir.writeUInt16LE(0, 10);
    dir.writeUInt16LE(0, 12);
    dir.writeUInt16LE(0, 14);
    dir.writeUInt32LE(crc, 16);
    dir.writeUInt32LE(bytes.length, 20);
    dir.writeUInt32LE(bytes.length, 24);
    dir.writeUInt16LE(nameBuf.length, 28);
    dir.writeUInt32LE(offset, 42);
    central.push(Buffer.concat([dir, nameBuf]));
    offset += local.length + nameBuf.length + bytes.length;
  }
  const centralBytes = Buffer.concat(central);
  const end = Buffer.alloc(22);
  end.writeUInt32LE(0x06054b50, 0);
  end.writeUInt16LE(entries.length, 8);
  end.writeUInt16LE(entries.length, 10);
  end.writeUInt32LE(centralBytes.length, 12);
  end.writeUInt32LE(offset, 16);
  return Buffer.concat([...chunks, centralBytes, end]);
}

/** Serialize named arrays into npz container bytes. */
export function npzBytes(arrays: NamedArray[]): Buffer {
  return zipStore(arrays.map((a) => ({ name: `${a.name}.npy`, bytes: npyBytes(a) })));
}
