// Thin WebSocket wrapper with reconnect. Messages are parsed before they
// reach the app; parse failures are surfaced, not swallowed.

import { Envelope, ServerKind, parseServerMessage } from "./protocol.js";

export interface NetCallbacks {
  onOpen(): void;
  onMessage(env: Envelope<ServerKind>): void;
  onClose(willRetry: boolean): void;
  onParseError(error: unknown): void;
}

export class GatewayClient {
  private ws: WebSocket | null = null;
  private retryMs = 500;
  private closedByUser = false;

  constructor(private url: string, private callbacks: NetCallbacks) {}

  connect(): void {
    this.closedByUser = false;
    this.open();
  }

  private open(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.retryMs = 500;
      this.callbacks.onOpen();
    };
    ws.onmessage = (msg: MessageEvent) => {
      try {
        this.callbacks.onMessage(parseServerMessage(String(msg.data)));
      } catch (error) {
        this.callbacks.onParseError(error);
      }
    };
    ws.onclose = () => {
      this.ws = null;
      const retry = !this.closedByUser;
      this.callbacks.onClose(retry);
      if (retry) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 8000);
      }
    };
    ws.onerror = () => {
      // close handler does the bookkeeping
    };
  }

  get isOpen(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  send(text: string): boolean {
    if (!this.isOpen || this.ws === null) return false; // disconnected: drop
    this.ws.send(text);
    return true;
  }

  close(): void {
    this.closedByUser = true;
    this.ws?.close();
  }
}
