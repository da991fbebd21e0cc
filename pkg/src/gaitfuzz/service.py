"""Live tuning service: stream frames over a WebSocket, accept patches.

One asyncio task owns the simulation.  Connection handlers never touch
the state directly: inbound patches and transport commands go through a
queue the simulation drains once per frame boundary (FIFO), so no frame
is ever produced from a half-applied edit.  Outbound frames are
immutable JSON snapshots fanned out to per-client queues; a slow client
loses frames, never stalls the simulation or the other clients.

Wire protocol (JSON text messages, protocol_version 1):

* server -> client: ``hello`` (controller text + structured dump +
  config), ``frame``, ``patch_ack``, ``error``
* client -> server: ``patch`` {id?, changes: [{path, value}]},
  ``command`` {name: pause|resume|reset|set_terrain|set_step_length,
  args}

Patch paths and values use the library's internal units (radians); the
``controllers`` dump in hello carries each variable's declared unit so
UIs can convert for display.
"""
from __future__ import annotations

import asyncio
import contextlib
import json
import socket
from dataclasses import replace

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import dsl
from .engine import GaitConfig, Terrain, initial_state, step_frame
from .errors import GaitfuzzError

PROTOCOL_VERSION = 1
DEFAULT_PORT = 7341
MAX_STREAM_RATE = 60.0
CLIENT_QUEUE_SIZE = 240


def _frame_message(frame, index: int) -> dict:
    pose = frame.pose
    return {
        "type": "frame",
        "frame_index": index,
        "time": frame.time,
        "pose": {
            "root": [pose.root[0], pose.root[1]],
            "left": {
                "hip": pose.left.hip, "knee": pose.left.knee,
                "ankle": pose.left.ankle, "ball": pose.left.ball,
            },
            "right": {
                "hip": pose.right.hip, "knee": pose.right.knee,
                "ankle": pose.right.ankle, "ball": pose.right.ball,
            },
        },
        "joint_velocities": frame.joint_velocities,
        "scaled_delta": frame.scaled_delta,
        "events": list(frame.events),
        "phase": frame.phase,
        "swing_leg": frame.swing_leg,
        "target": list(frame.target) if frame.target is not None else None,
    }


def _config_message(config: GaitConfig) -> dict:
    terrain: dict = {"kind": config.terrain.kind}
    if config.terrain.kind == "incline":
        terrain["angle"] = config.terrain.angle
    elif config.terrain.kind == "stairs":
        terrain["riser"] = config.terrain.riser
        terrain["tread"] = config.terrain.tread
    return {
        "step_length": config.step_length,
        "dt": config.dt,
        "terrain": terrain,
        "dims": {
            "thigh": config.dims.thigh,
            "shank": config.dims.shank,
            "heel_to_ball": config.dims.heel_to_ball,
            "ball_to_toe": config.dims.ball_to_toe,
            "pelvis_height_offset": config.dims.pelvis_height_offset,
        },
        "max_phase_duration": config.max_phase_duration,
    }


class _Client:
    def __init__(self):
        self.queue: asyncio.Queue = asyncio.Queue(maxsize=CLIENT_QUEUE_SIZE)

    def offer(self, message: dict, droppable: bool) -> None:
        try:
            self.queue.put_nowait(message)
        except asyncio.QueueFull:
            if droppable:
                return
            # make room for must-deliver messages by dropping a frame
            with contextlib.suppress(asyncio.QueueEmpty):
                self.queue.get_nowait()
            with contextlib.suppress(asyncio.QueueFull):
                self.queue.put_nowait(message)


class SimulationHub:
    """Owns the simulation state and the frame/patch cadence."""

    def __init__(self, config: GaitConfig):
        self.config = config
        self.state = initial_state(config)
        self.step_count = 0
        self.paused = False
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.clients: set[_Client] = set()
        self._emit_every = max(1, round(1.0 / (config.dt * MAX_STREAM_RATE)))

    # -- inbound (drained at frame boundaries, FIFO)

    def _drain_inbox(self) -> None:
        while True:
            try:
                client, message = self.inbox.get_nowait()
            except asyncio.QueueEmpty:
                return
            self._dispatch(client, message)

    def _dispatch(self, client: _Client, message: dict) -> None:
        kind = message.get("type")
        if kind == "patch":
            self._apply_patch(client, message)
        elif kind == "command":
            self._apply_command(client, message)
        else:
            client.offer(
                {"type": "error", "message": f"unknown message type {kind!r}"},
                droppable=False,
            )

    def _apply_patch(self, client: _Client, message: dict) -> None:
        ack = {"type": "patch_ack", "id": message.get("id"), "accepted": False,
               "diagnostics": []}
        try:
            changes = [
                (entry["path"], float(entry["value"]))
                for entry in message.get("changes", [])
            ]
            new_set = dsl.apply_patch(self.config.controllers, changes)
        except (GaitfuzzError, KeyError, TypeError, ValueError) as exc:
            ack["diagnostics"] = [str(exc)]
            client.offer(ack, droppable=False)
            return
        self.config = replace(self.config, controllers=new_set)
        ack["accepted"] = True
        client.offer(ack, droppable=False)

    def _apply_command(self, client: _Client, message: dict) -> None:
        name = message.get("name")
        args = message.get("args") or {}
        try:
            if name == "pause":
                self.paused = True
            elif name == "resume":
                self.paused = False
            elif name == "reset":
                self.state = initial_state(self.config)
            elif name == "set_step_length":
                self.config = replace(self.config, step_length=float(args["value"]))
            elif name == "set_terrain":
                kind = args.get("kind")
                if kind == "flat":
                    terrain = Terrain.flat()
                elif kind == "incline":
                    terrain = Terrain.incline(float(args["angle"]))
                elif kind == "stairs":
                    terrain = Terrain.stairs(float(args["riser"]), float(args["tread"]))
                else:
                    raise GaitfuzzError(f"unknown terrain kind {kind!r}")
                self.config = replace(self.config, terrain=terrain)
            else:
                raise GaitfuzzError(f"unknown command {name!r}")
        except (GaitfuzzError, KeyError, TypeError, ValueError) as exc:
            client.offer(
                {"type": "error", "message": f"command {name!r} failed: {exc}"},
                droppable=False,
            )

    # -- outbound

    def hello_message(self) -> dict:
        return {
            "type": "hello",
            "protocol_version": PROTOCOL_VERSION,
            "controllers_text": dsl.serialize(self.config.controllers),
            "controllers": dsl.to_json_dict(self.config.controllers),
            "config": _config_message(self.config),
        }

    def _broadcast(self, message: dict) -> None:
        for client in self.clients:
            client.offer(message, droppable=message.get("type") == "frame")

    # -- main loop

    async def run(self) -> None:
        loop = asyncio.get_running_loop()
        next_tick = loop.time()
        while True:
            self._drain_inbox()
            if not self.paused:
                try:
                    self.state, frame = step_frame(self.state, self.config)
                except GaitfuzzError as exc:
                    self.paused = True
                    self._broadcast({"type": "error", "message": str(exc)})
                    continue
                self.step_count += 1
                if self.step_count % self._emit_every == 0 or frame.events:
                    self._broadcast(_frame_message(frame, self.step_count))
            next_tick += self.config.dt
            delay = next_tick - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_tick = loop.time()
                await asyncio.sleep(0)

    # -- connections

    async def attach(self, websocket: WebSocket) -> None:
        await websocket.accept()
        client = _Client()
        client.offer(self.hello_message(), droppable=False)
        self.clients.add(client)

        async def pump_out():
            while True:
                message = await client.queue.get()
                await websocket.send_text(json.dumps(message))

        async def pump_in():
            while True:
                raw = await websocket.receive_text()
                try:
                    message = json.loads(raw)
                    if not isinstance(message, dict):
                        raise ValueError("message must be a JSON object")
                except ValueError as exc:
                    client.offer(
                        {"type": "error", "message": f"malformed JSON: {exc}"},
                        droppable=False,
                    )
                    continue
                await self.inbox.put((client, message))

        try:
            out_task = asyncio.create_task(pump_out())
            try:
                await pump_in()
            finally:
                out_task.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await out_task
        except WebSocketDisconnect:
            pass
        finally:
            self.clients.discard(client)


def create_app(config: GaitConfig) -> FastAPI:
    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(hub.run())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(lifespan=lifespan)
    hub = SimulationHub(config)
    app.state.hub = hub

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "protocol_version": PROTOCOL_VERSION}

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await hub.attach(websocket)

    return app


def serve(config: GaitConfig, host: str = "127.0.0.1", port: int = DEFAULT_PORT) -> None:
    """Run the service until interrupted. Raises OSError if the port is taken."""
    import uvicorn

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((host, port))
        sock.listen(128)
    except OSError:
        sock.close()
        raise
    app = create_app(config)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    try:
        server.run(sockets=[sock])
    except KeyboardInterrupt:
        pass  # uvicorn re-raises the signal after its graceful shutdown
