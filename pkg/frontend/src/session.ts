// Connection-side state for the tuning page. The session never touches
// the simulation except by sending patch/command messages; everything it
// shows is reconstructed from committed wire traffic, and every byte in
// or out is retained in a bounded wire log so behavior stays auditable.
import type {
  Controller,
  FrameMessage,
  HelloMessage,
  PatchAckMessage,
  WireMessage,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface Transport {
  send(text: string): void;
}

export interface WireLogEntry {
  dir: "in" | "out";
  message: WireMessage;
}

export interface PendingPatch {
  path: string;
  value: number;
  state: "queued" | "sent";
}

export interface SessionEvents {
  onFrame?(frame: FrameMessage): void;
  onHello?(hello: HelloMessage): void;
  onStatus?(status: ConnectionStatus): void;
  onToast?(message: string): void;
  onControllersChanged?(): void;
  onPatchSettled?(path: string, accepted: boolean): void;
}

const WIRE_LOG_CAP = 5000;

export class Session {
  status: ConnectionStatus = "connecting";
  hello: HelloMessage | null = null;
  frames: FrameMessage[] = [];
  lastFrame: FrameMessage | null = null;
  paused = false;
  wireLog: WireLogEntry[] = [];
  pending = new Map<string, PendingPatch>();

  private transport: Transport | null = null;
  private events: SessionEvents;
  private keepSeconds: number;
  private queued = new Map<string, number>();
  private inFlight = new Map<unknown, string[]>();
  private nextPatchId = 1;
  private flushTimer: ReturnType<typeof setInterval> | null = null;

  constructor(events: SessionEvents = {}, keepSeconds = 12) {
    this.events = events;
    this.keepSeconds = keepSeconds;
  }

  // -- transport lifecycle

  attach(transport: Transport): void {
    this.transport = transport;
    this.status = "connecting";
    this.events.onStatus?.(this.status);
  }

  disconnected(): void {
    this.status = "disconnected";
    this.transport = null;
    this.stopFlusher();
    this.events.onStatus?.(this.status);
  }

  /** Patch flush cadence: at most one patch message per frame interval. */
  frameIntervalMs(): number {
    const dt = this.hello?.config.dt ?? 1 / 120;
    return Math.max(1000 * dt, 1000 / 60);
  }

  private startFlusher(): void {
    if (this.flushTimer !== null) return;
    this.flushTimer = setInterval(() => this.flushPatches(), this.frameIntervalMs());
  }

  private stopFlusher(): void {
    if (this.flushTimer !== null) {
      clearInterval(this.flushTimer);
      this.flushTimer = null;
    }
  }

  // -- inbound

  receive(text: string): void {
    let message: WireMessage;
    try {
      message = JSON.parse(text) as WireMessage;
    } catch {
      this.events.onToast?.("malformed message from service");
      return;
    }
    this.logWire("in", message);
    switch (message.type) {
      case "hello": {
        this.hello = message;
        this.status = "connected";
        this.startFlusher();
        this.events.onStatus?.(this.status);
        this.events.onHello?.(message);
        this.events.onControllersChanged?.();
        break;
      }
      case "frame": {
        // a backwards time jump means the simulation was reset
        if (this.lastFrame && message.time < this.lastFrame.time) {
          this.frames = [];
        }
        this.frames.push(message);
        this.lastFrame = message;
        const horizon = message.time - this.keepSeconds;
        let drop = 0;
        while (drop < this.frames.length - 1 && this.frames[drop].time < horizon) {
          drop += 1;
        }
        if (drop > 0) this.frames.splice(0, drop);
        this.events.onFrame?.(message);
        break;
      }
      case "patch_ack": {
        this.settlePatch(message);
        break;
      }
      case "error": {
        this.events.onToast?.(message.message);
        break;
      }
      default:
        break;
    }
  }

  // -- parameter editing (coalesced: latest value per path, one patch
  //    message per frame interval at most)

  editParameter(path: string, value: number): void {
    this.queued.set(path, value);
    this.pending.set(path, { path, value, state: "queued" });
  }

  flushPatches(): void {
    if (!this.transport || this.queued.size === 0) return;
    const changes = [...this.queued.entries()].map(([path, value]) => ({ path, value }));
    this.queued.clear();
    const id = this.nextPatchId++;
    this.inFlight.set(id, changes.map((c) => c.path));
    for (const c of changes) {
      this.pending.set(c.path, { path: c.path, value: c.value, state: "sent" });
    }
    this.sendMessage({ type: "patch", id, changes });
  }

  private settlePatch(ack: PatchAckMessage): void {
    const paths = this.inFlight.get(ack.id) ?? [];
    this.inFlight.delete(ack.id);
    for (const path of paths) {
      const pending = this.pending.get(path);
      if (pending?.state === "sent") {
        if (ack.accepted) this.applyLocally(path, pending.value);
        this.pending.delete(path);
      }
      this.events.onPatchSettled?.(path, ack.accepted);
    }
    if (!ack.accepted) {
      this.events.onToast?.(ack.diagnostics.join("; ") || "patch rejected");
    } else {
      this.events.onControllersChanged?.();
    }
  }

  /** Mirror an accepted patch into the hello-provided controller dump so
   *  sliders and previews track the service's committed state. */
  private applyLocally(path: string, value: number): void {
    if (!this.hello) return;
    const parts = path.split(".");
    const controller = this.hello.controllers.controllers.find((c) => c.name === parts[0]);
    if (!controller) return;
    if (parts[1] === "output" && parts.length === 4) {
      const single = controller.output.singletons.find((s) => s.name === parts[3]);
      if (single) single.value = value;
    } else if (parts[1] === "input" && parts.length === 5) {
      const input = controller.inputs.find((v) => v.name === parts[2]);
      const label = input?.labels.find((l) => l.name === parts[3]);
      const index = { a: 0, b: 1, c: 2, d: 3 }[parts[4] as "a" | "b" | "c" | "d"];
      if (label && index !== undefined && index < label.points.length) {
        label.points[index] = value;
      }
    }
  }

  controller(name: string): Controller | undefined {
    return this.hello?.controllers.controllers.find((c) => c.name === name);
  }

  // -- transport commands

  pause(): void {
    this.paused = true;
    this.sendCommand("pause");
  }

  resume(): void {
    this.paused = false;
    this.sendCommand("resume");
  }

  reset(): void {
    this.sendCommand("reset");
  }

  setStepLength(value: number): void {
    this.sendCommand("set_step_length", { value });
    if (this.hello) this.hello.config.step_length = value;
  }

  setTerrain(args: Record<string, unknown>): void {
    this.sendCommand("set_terrain", args);
    if (this.hello) this.hello.config.terrain = args as never;
  }

  private sendCommand(name: string, args?: Record<string, unknown>): void {
    this.sendMessage({ type: "command", name, args } as WireMessage);
  }

  private sendMessage(message: WireMessage): void {
    if (!this.transport) return;
    this.logWire("out", message);
    this.transport.send(JSON.stringify(message));
  }

  private logWire(dir: "in" | "out", message: WireMessage): void {
    this.wireLog.push({ dir, message });
    if (this.wireLog.length > WIRE_LOG_CAP) {
      this.wireLog.splice(0, this.wireLog.length - WIRE_LOG_CAP);
    }
  }
}
