/** TCP client: framing on the wire, reconnect on loss. */

import * as net from "node:net";
import { FrameParser, encodeFrame } from "./framing.js";
import { isServerEvent, type CommandBody, type ServerEvent } from "./messages.js";

export interface ClientCallbacks {
  onEvent: (ev: ServerEvent, nowMs: number) => void;
  onConnected: (nowMs: number) => void;
  onDisconnected: () => void;
}

export interface ConsoleClient {
  send: (body: CommandBody) => void;
  close: () => void;
}

export function connectConsole(host: string, port: number,
                               callbacks: ClientCallbacks,
                               reconnectMs = 2000): ConsoleClient {
  let socket: net.Socket | null = null;
  let closed = false;
  let timer: NodeJS.Timeout | null = null;

  const dial = () => {
    const parser = new FrameParser();
    socket = net.createConnection({ host, port });
    socket.on("connect", () => callbacks.onConnected(Date.now()));
    socket.on("data", (chunk) => {
      let docs: object[];
      try {
        docs = parser.feed(chunk);
      } catch {
        socket?.destroy();     // corrupt stream: force a reconnect
        return;
      }
      for (const doc of docs) {
        if (isServerEvent(doc)) callbacks.onEvent(doc, Date.now());
      }
    });
    const lost = () => {
      callbacks.onDisconnected();
      if (!closed && timer === null) {
        timer = setTimeout(() => { timer = null; dial(); }, reconnectMs);
      }
    };
    socket.on("error", () => { /* close follows */ });
    socket.on("close", lost);
  };
  dial();

  return {
    send: (body) => {
      if (socket && !socket.destroyed) socket.write(encodeFrame(body));
    },
    close: () => {
      closed = true;
      if (timer) clearTimeout(timer);
      socket?.destroy();
    },
  };
}
