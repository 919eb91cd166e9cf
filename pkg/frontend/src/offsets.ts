/** UTF-8 byte offset <-> UTF-16 string index conversion.
 *
 * Gateway spans address UTF-8 bytes; the DOM works in UTF-16 code units.
 * A table is built once per document and reused for every span.
 */

const encoder = new TextEncoder();

export class OffsetTable {
  private byteOfIndex: number[];

  constructor(readonly text: string) {
    this.byteOfIndex = new Array(text.length + 1);
    let bytes = 0;
    let i = 0;
    for (const ch of text) {             // iterates code points
      const units = ch.length;           // 1 or 2 UTF-16 units
      const width = encoder.encode(ch).length;
      for (let u = 0; u < units; u++) {
        this.byteOfIndex[i + u] = bytes; // surrogate pairs share the start
      }
      i += units;
      bytes += width;
    }
    this.byteOfIndex[text.length] = bytes;
  }

  get byteLength(): number {
    return this.byteOfIndex[this.text.length]!;
  }

  indexOfByte(byte: number): number {
    // binary search over the monotone table
    let lo = 0;
    let hi = this.text.length;
    while (lo < hi) {
      const mid = (lo + hi) >> 1;
      if (this.byteOfIndex[mid]! < byte) lo = mid + 1;
      else hi = mid;
    }
    if (this.byteOfIndex[lo] !== byte) {
      throw new Error(`byte offset ${byte} is not on a character boundary`);
    }
    return lo;
  }

  byteOf(index: number): number {
    const b = this.byteOfIndex[index];
    if (b === undefined) throw new Error(`index ${index} out of range`);
    return b;
  }

  slice(startByte: number, endByte: number): string {
    return this.text.slice(this.indexOfByte(startByte), this.indexOfByte(endByte));
  }
}
