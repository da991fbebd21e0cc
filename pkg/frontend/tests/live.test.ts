// Live-tuning acceptance against the real simulation service: a patch to
// a velocity singleton must be acknowledged and visible in the frame
// stream within two frame intervals, and a rejected patch must leave the
// stream's controller-derived behavior unchanged -- both checked purely
// from the session's wire log.
import { spawn, type ChildProcess } from "node:child_process";
import { createServer } from "node:net";

import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { evaluate } from "../src/fuzzy.js";
import type { FrameMessage, PatchAckMessage } from "../src/protocol.js";
import { Session } from "../src/session.js";

let proc: ChildProcess;
let port: number;
let ws: WebSocket;
let session: Session;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address && typeof address === "object") {
        const p = address.port;
        srv.close(() => resolve(p));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitHealthy(p: number): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`http://127.0.0.1:${p}/healthz`);
      if (resp.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("service never became healthy");
}

function nextMessage(predicate: (entry: { dir: string; message: unknown }) => boolean, timeoutMs = 10_000) {
  const start = session.wireLog.length;
  return new Promise<number>((resolve, reject) => {
    const t0 = Date.now();
    const poll = () => {
      for (let i = start; i < session.wireLog.length; i++) {
        if (predicate(session.wireLog[i])) {
          resolve(i);
          return;
        }
      }
      if (Date.now() - t0 > timeoutMs) reject(new Error("timed out waiting for message"));
      else setTimeout(poll, 5);
    };
    poll();
  });
}

beforeAll(async () => {
  port = await freePort();
  proc = spawn("python3", ["-m", "gaitfuzz.cli", "serve", "--port", String(port)], {
    stdio: "ignore",
  });
  await waitHealthy(port);
  session = new Session();
  ws = new WebSocket(`ws://127.0.0.1:${port}/ws`);
  session.attach({ send: (text) => ws.send(text) });
  ws.on("message", (data) => session.receive(data.toString()));
  await nextMessage((e) => e.dir === "in" && (e.message as { type: string }).type === "hello");
}, 60_000);

afterAll(() => {
  ws?.close();
  proc?.kill("SIGTERM");
});

describe("live tuning against the running service", () => {
  test(
    "accepted singleton patch is acked and visible within 2 frame intervals",
    async () => {
      const original = session
        .controller("hip_swing")!
        .output.singletons.map((s) => [s.name, s.value] as const);

      // wait until mid-swing so the hip is actually moving
      await nextMessage((e) => {
        const m = e.message as FrameMessage;
        return (
          e.dir === "in" &&
          m.type === "frame" &&
          m.phase === "swing" &&
          Math.abs(m.joint_velocities[`${m.swing_leg}_hip`] ?? 0) > 0.5
        );
      });

      // zero every hip_swing output: the very next frames must show a
      // zero hip drive while still in swing
      const controller = session.controller("hip_swing")!;
      for (const single of controller.output.singletons) {
        session.editParameter(`hip_swing.output.velocity.${single.name}`, 0);
      }
      session.flushPatches();
      const patchIndex = session.wireLog.findIndex(
        (e) => e.dir === "out" && e.message.type === "patch",
      );
      expect(patchIndex).toBeGreaterThanOrEqual(0);

      const ackIndex = await nextMessage(
        (e) => e.dir === "in" && (e.message as PatchAckMessage).type === "patch_ack",
      );
      const ack = session.wireLog[ackIndex].message as PatchAckMessage;
      expect(ack.accepted).toBe(true);

      // the patch applies at the next frame boundary and acks are queued
      // ahead of that frame, so of the first two streamed frames after
      // the ack, every swing-phase one must already show a zero hip drive
      const deadline = Date.now() + 5000;
      let postAck: FrameMessage[] = [];
      while (postAck.length < 2 && Date.now() < deadline) {
        postAck = session.wireLog
          .slice(ackIndex)
          .filter((e) => e.dir === "in" && e.message.type === "frame")
          .map((e) => e.message as FrameMessage);
        if (postAck.length < 2) await new Promise((r) => setTimeout(r, 10));
      }
      expect(postAck.length).toBeGreaterThanOrEqual(2);
      const swingFrames = postAck.slice(0, 2).filter((m) => m.phase === "swing");
      expect(swingFrames.length).toBeGreaterThan(0);
      for (const m of swingFrames) {
        expect(m.joint_velocities[`${m.swing_leg}_hip`]).toBe(0);
      }

      // restore the original values for the remaining tests
      for (const [label, value] of original) {
        session.editParameter(`hip_swing.output.velocity.${label}`, value);
      }
      session.flushPatches();
      await nextMessage(
        (e) => e.dir === "in" && (e.message as PatchAckMessage).type === "patch_ack",
      );
    },
    30_000,
  );

  test(
    "rejected patch leaves controller-derived behavior unchanged",
    async () => {
      const before = session.controller("hip_swing")!;
      const beforeJson = JSON.stringify(before);

      session.editParameter("hip_swing.input.delta.center.b", 99.0);
      session.flushPatches();
      const ackIndex = await nextMessage(
        (e) => e.dir === "in" && (e.message as PatchAckMessage).type === "patch_ack",
      );
      const ack = session.wireLog[ackIndex].message as PatchAckMessage;
      expect(ack.accepted).toBe(false);
      expect(ack.diagnostics.join(" ")).toContain("non-monotone");
      expect(JSON.stringify(session.controller("hip_swing"))).toBe(beforeJson);

      // wire-log verification: streamed swing velocities still follow the
      // unchanged controller definition. A frame's velocity was computed
      // at a metric value between the previous streamed sample and its
      // own (the metric is monotone within a swing), so check against
      // the evaluate envelope over that interval.
      await new Promise((r) => setTimeout(r, 300));
      const frames = session.wireLog
        .slice(ackIndex)
        .filter((e) => e.dir === "in" && e.message.type === "frame")
        .map((e) => e.message as FrameMessage);
      let checkedPairs = 0;
      for (let i = 1; i < frames.length; i++) {
        const prev = frames[i - 1];
        const cur = frames[i];
        if (
          prev.phase !== "swing" || cur.phase !== "swing" ||
          prev.scaled_delta === null || cur.scaled_delta === null ||
          cur.scaled_delta < prev.scaled_delta ||
          cur.swing_leg !== prev.swing_leg
        ) {
          continue;
        }
        let lo = Infinity;
        let hi = -Infinity;
        for (let k = 0; k <= 24; k++) {
          const s = prev.scaled_delta + ((cur.scaled_delta - prev.scaled_delta) * k) / 24;
          const v = evaluate(before, { delta: s });
          if (v < lo) lo = v;
          if (v > hi) hi = v;
        }
        const got = cur.joint_velocities[`${cur.swing_leg}_hip`];
        expect(got).toBeGreaterThanOrEqual(lo - 1e-6);
        expect(got).toBeLessThanOrEqual(hi + 1e-6);
        checkedPairs += 1;
      }
      expect(checkedPairs).toBeGreaterThan(3);
    },
    30_000,
  );

  test("commands steer the live simulation", async () => {
    session.setStepLength(0.7);
    await new Promise((r) => setTimeout(r, 400));
    const targets = session.wireLog
      .filter((e) => e.dir === "in" && e.message.type === "frame")
      .map((e) => e.message as FrameMessage)
      .filter((m) => m.target !== null)
      .slice(-5);
    expect(targets.length).toBeGreaterThan(0);
  }, 15_000);
});
