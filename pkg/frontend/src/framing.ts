/**
 * Wire framing, mirroring the service bit-exactly:
 *
 *   [4 bytes big-endian u32: N] [N bytes: 1 version byte + JSON body (UTF-8)]
 *
 * Version is 1. The JSON body is a message envelope with "t" and "kind".
 */

export const PROTOCOL_VERSION = 1;
export const MAX_FRAME_BYTES = 1 << 20;

export class MalformedFrame extends Error {}
export class UnsupportedVersion extends Error {}

export function encodeFrame(body: object): Buffer {
  const json = Buffer.from(JSON.stringify(body), "utf-8");
  const frame = Buffer.alloc(4 + 1 + json.length);
  frame.writeUInt32BE(1 + json.length, 0);
  frame.writeUInt8(PROTOCOL_VERSION, 4);
  json.copy(frame, 5);
  return frame;
}

export function decodeFrame(data: Buffer): object {
  if (data.length < 4) throw new MalformedFrame("truncated length prefix");
  const length = data.readUInt32BE(0);
  if (length < 1 || length > MAX_FRAME_BYTES) {
    throw new MalformedFrame(`bad frame length ${length}`);
  }
  if (data.length < 4 + length) throw new MalformedFrame("truncated frame");
  if (data.length > 4 + length) throw new MalformedFrame("trailing bytes after frame");
  const version = data.readUInt8(4);
  if (version !== PROTOCOL_VERSION) throw new UnsupportedVersion(`version ${version}`);
  let doc: unknown;
  try {
    doc = JSON.parse(data.subarray(5, 4 + length).toString("utf-8"));
  } catch (err) {
    throw new MalformedFrame(String(err));
  }
  if (typeof doc !== "object" || doc === null) {
    throw new MalformedFrame("body is not an object");
  }
  return doc as object;
}

/** Incremental parser for a socket byte stream. */
export class FrameParser {
  private buffer = Buffer.alloc(0);

  feed(chunk: Buffer): object[] {
    this.buffer = Buffer.concat([this.buffer, chunk]);
    const out: object[] = [];
    for (;;) {
      if (this.buffer.length < 4) return out;
      const length = this.buffer.readUInt32BE(0);
      if (length < 1 || length > MAX_FRAME_BYTES) {
        throw new MalformedFrame(`bad frame length ${length}`);
      }
      if (this.buffer.length < 4 + length) return out;
      out.push(decodeFrame(this.buffer.subarray(0, 4 + length)));
      this.buffer = this.buffer.subarray(4 + length);
    }
  }
}
