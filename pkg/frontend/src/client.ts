/** Session client over an injectable websocket-like transport. */

import {
  encodeCommand,
  parseEvent,
  type Command,
  type EventMsg,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export interface ClientHandlers {
  onEvent: (event: EventMsg) => void;
  onError?: (error: unknown) => void;
  onOpen?: () => void;
  onClose?: () => void;
}

export class SessionClient {
  private nextId = 1;

  constructor(private socket: SocketLike, private handlers: ClientHandlers) {
    socket.onopen = () => {
      this.send({ type: "hello", protocolVersion: 1 });
      handlers.onOpen?.();
    };
    socket.onmessage = (ev) => {
      try {
        handlers.onEvent(parseEvent(String(ev.data)));
      } catch (error) {
        // malformed events are logged and skipped, never fatal
        (handlers.onError ?? console.warn)(error);
      }
    };
    socket.onclose = () => handlers.onClose?.();
  }

  send(cmd: Command): number {
    const id = cmd.id ?? this.nextId++;
    this.socket.send(encodeCommand({ ...cmd, id }));
    return id;
  }

  close(): void {
    this.socket.close();
  }
}
