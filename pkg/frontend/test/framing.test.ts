import { describe, expect, it } from "vitest";
import { FrameParser, MalformedFrame, UnsupportedVersion, decodeFrame, encodeFrame } from "../src/framing.js";

describe("framing codec", () => {
  it("round-trips a message body", () => {
    const body = { t: "cmd", kind: "stop", seq: 7, robot: "mobile_1" };
    expect(decodeFrame(encodeFrame(body))).toEqual(body);
  });

  it("rejects a truncated frame", () => {
    const frame = encodeFrame({ t: "event", kind: "ack", seq: 1 });
    expect(() => decodeFrame(frame.subarray(0, 3))).toThrow(MalformedFrame);
    expect(() => decodeFrame(frame.subarray(0, frame.length - 1))).toThrow(MalformedFrame);
  });

  it("rejects an unknown protocol version", () => {
    const frame = Buffer.from(encodeFrame({ t: "event", kind: "ack", seq: 1 }));
    frame.writeUInt8(255, 4);
    expect(() => decodeFrame(frame)).toThrow(UnsupportedVersion);
  });

  it("rejects non-JSON bodies", () => {
    const body = Buffer.concat([Buffer.from([1]), Buffer.from("{oops")]);
    const frame = Buffer.concat([Buffer.alloc(4), body]);
    frame.writeUInt32BE(body.length, 0);
    expect(() => decodeFrame(frame)).toThrow(MalformedFrame);
  });

  it("reassembles frames from awkward chunks", () => {
    const bodies = Array.from({ length: 5 }, (_, i) => ({ t: "event", kind: "ack", seq: i }));
    const stream = Buffer.concat(bodies.map(encodeFrame));
    const parser = new FrameParser();
    const out: object[] = [];
    for (let i = 0; i < stream.length; i += 3) {
      out.push(...parser.feed(stream.subarray(i, i + 3)));
    }
    expect(out).toEqual(bodies);
  });
});
