import random

import pytest
from starlette.testclient import TestClient

from gaitfuzz import fuzzy
from gaitfuzz.engine import GaitConfig
from gaitfuzz.service import PROTOCOL_VERSION, create_app


@pytest.fixture()
def client(default_set):
    config = GaitConfig(controllers=default_set, step_length=0.6)
    app = create_app(config)
    with TestClient(app) as tc:
        yield tc


def recv_until(ws, kind, limit=400):
    for _ in range(limit):
        msg = ws.receive_json()
        if msg["type"] == kind:
            return msg
    raise AssertionError(f"no {kind!r} message within {limit} messages")


def recv_frames(ws, n, limit=400):
    out = []
    for _ in range(limit):
        msg = ws.receive_json()
        if msg["type"] == "frame":
            out.append(msg)
            if len(out) == n:
                return out
    raise AssertionError("not enough frames")


class TestHandshake:
    def test_hello_first(self, client):
        with client.websocket_connect("/ws") as ws:
            hello = ws.receive_json()
            assert hello["type"] == "hello"
            assert hello["protocol_version"] == PROTOCOL_VERSION
            names = [c["name"] for c in hello["controllers"]["controllers"]]
            assert "hip_swing" in names
            assert "controller hip_swing" in hello["controllers_text"]
            assert hello["config"]["step_length"] == 0.6

    def test_frame_stream_monotone_and_clocked(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            frames = recv_frames(ws, 6)
            dt = 1.0 / 120.0
            for a, b in zip(frames, frames[1:]):
                assert b["frame_index"] > a["frame_index"]
                expected = (b["frame_index"] - a["frame_index"]) * dt
                assert b["time"] - a["time"] == pytest.approx(expected, abs=1e-9)

    def test_two_clients_identical_streams(self, client):
        with client.websocket_connect("/ws") as ws1:
            with client.websocket_connect("/ws") as ws2:
                ws1.receive_json()
                ws2.receive_json()
                f1 = {m["frame_index"]: m for m in recv_frames(ws1, 8)}
                f2 = {m["frame_index"]: m for m in recv_frames(ws2, 8)}
                shared = sorted(set(f1) & set(f2))
                assert shared
                for idx in shared:
                    assert f1[idx] == f2[idx]

    def test_malformed_json_keeps_connection(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_text("{oops")
            msg = recv_until(ws, "error")
            assert "malformed" in msg["message"]
            assert recv_frames(ws, 1)  # still streaming

    def test_unknown_type_reports_error(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({"type": "warp"})
            msg = recv_until(ws, "error")
            assert "unknown message type" in msg["message"]


class TestPatch:
    def test_accepted_patch_reflected_quickly(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            before = recv_frames(ws, 1)[0]
            ws.send_json({
                "type": "patch",
                "id": 41,
                "changes": [{"path": "hip_swing.output.velocity.fast", "value": 9.0}],
            })
            ack = recv_until(ws, "patch_ack")
            assert ack["id"] == 41 and ack["accepted"] is True
            hub = client.app.state.hub
            plateau = dict(
                hub.config.controllers.controller("hip_swing").output.singletons
            )["fast"]
            assert plateau == 9.0
            # the very next frames run on the patched controller: during a
            # mid-swing stretch the hip must exceed the old velocity ceiling
            frames = recv_frames(ws, 200)
            fastest = max(
                abs(m["joint_velocities"][m["swing_leg"] + "_hip"])
                for m in frames if m["phase"] == "swing"
            )
            assert fastest > 3.0
            assert frames[0]["frame_index"] - before["frame_index"] < 400

    def test_rejected_patch_no_effect(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            hub = client.app.state.hub
            text_before = None
            from gaitfuzz import dsl

            text_before = dsl.serialize(hub.config.controllers)
            ws.send_json({
                "type": "patch",
                "id": 42,
                "changes": [{"path": "hip_swing.input.delta.center.b", "value": 50.0}],
            })
            ack = recv_until(ws, "patch_ack")
            assert ack["accepted"] is False
            assert ack["diagnostics"]
            assert dsl.serialize(hub.config.controllers) == text_before

    def test_unknown_path(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({
                "type": "patch", "id": 1,
                "changes": [{"path": "warp.output.velocity.fast", "value": 1.0}],
            })
            ack = recv_until(ws, "patch_ack")
            assert ack["accepted"] is False
            assert "unknown path" in ack["diagnostics"][0]

    def test_every_patch_acked_exactly_once_under_fire(self, client):
        rng = random.Random(17)
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            n = 30
            for i in range(n):
                if rng.random() < 0.5:
                    change = {"path": "hip_swing.output.velocity.fast", "value": rng.uniform(1, 4)}
                else:
                    change = {"path": "hip_swing.input.delta.center.b", "value": rng.uniform(-5, 5)}
                ws.send_json({"type": "patch", "id": i, "changes": [change]})
            acks = []
            for _ in range(2000):
                msg = ws.receive_json()
                if msg["type"] == "patch_ack":
                    acks.append(msg["id"])
                    if len(acks) == n:
                        break
            assert sorted(acks) == list(range(n))
            # controllers remain fully valid after the storm
            hub = client.app.state.hub
            for c in hub.config.controllers.controllers:
                assert fuzzy.validate_controller(c) == []


class TestCommands:
    def test_pause_resume_no_simulated_gap(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            last = recv_frames(ws, 1)[0]
            ws.send_json({"type": "command", "name": "pause"})
            import time as _time

            _time.sleep(0.1)
            ws.send_json({"type": "command", "name": "resume"})
            nxt = recv_frames(ws, 3)
            dt = 1.0 / 120.0
            for m in nxt:
                gap = m["time"] - last["time"]
                steps = m["frame_index"] - last["frame_index"]
                assert gap == pytest.approx(steps * dt, abs=1e-9)
                last = m

    def test_reset_restarts_clock_keeps_index(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            before = recv_frames(ws, 30)[-1]
            ws.send_json({"type": "command", "name": "reset"})
            after = recv_frames(ws, 3)
            assert after[-1]["frame_index"] > before["frame_index"]
            assert min(m["time"] for m in after) < before["time"]

    def test_set_step_length(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({"type": "command", "name": "set_step_length", "args": {"value": 0.7}})
            recv_frames(ws, 2)
            assert client.app.state.hub.config.step_length == 0.7

    def test_set_terrain(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({
                "type": "command", "name": "set_terrain",
                "args": {"kind": "stairs", "riser": 0.17, "tread": 0.28},
            })
            recv_frames(ws, 2)
            assert client.app.state.hub.config.terrain.kind == "stairs"

    def test_bad_command_reports_error(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_json({"type": "command", "name": "set_step_length", "args": {"value": 5.0}})
            msg = recv_until(ws, "error")
            assert "failed" in msg["message"]


class TestRealSocket:
    def test_served_websocket_end_to_end(self):
        """The actual uvicorn-served socket speaks the same protocol."""
        import json as _json
        import socket as _socket
        import subprocess
        import sys
        import time as _time
        import urllib.request

        from websockets.sync.client import connect

        sock = _socket.socket()
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]
        sock.close()
        proc = subprocess.Popen(
            [sys.executable, "-m", "gaitfuzz.cli", "serve", "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        try:
            deadline = _time.time() + 20
            while _time.time() < deadline:
                try:
                    with urllib.request.urlopen(
                        f"http://127.0.0.1:{port}/healthz", timeout=0.5
                    ) as resp:
                        if resp.status == 200:
                            break
                except OSError:
                    _time.sleep(0.1)
            else:
                pytest.fail("service never came up")
            with connect(f"ws://127.0.0.1:{port}/ws") as ws:
                hello = _json.loads(ws.recv(timeout=5))
                assert hello["type"] == "hello"
                assert hello["protocol_version"] == PROTOCOL_VERSION
                ws.send(_json.dumps({
                    "type": "patch", "id": 1,
                    "changes": [{"path": "hip_swing.output.velocity.fast", "value": 2.5}],
                }))
                got_ack = got_frame = False
                for _ in range(200):
                    msg = _json.loads(ws.recv(timeout=5))
                    if msg["type"] == "patch_ack":
                        assert msg["accepted"] is True
                        got_ack = True
                    elif msg["type"] == "frame":
                        got_frame = True
                    if got_ack and got_frame:
                        break
                assert got_ack and got_frame
        finally:
            proc.terminate()
            proc.wait(timeout=10)


class TestSchemaConformance:
    def test_messages_validate_against_schema(self, client):
        import json as _json
        import pathlib

        import jsonschema

        schema = _json.loads(
            (pathlib.Path(__file__).parent.parent / "schema" / "wire-protocol.schema.json")
            .read_text()
        )
        validator = jsonschema.Draft7Validator(schema)
        with client.websocket_connect("/ws") as ws:
            hello = ws.receive_json()
            validator.validate(hello)
            for m in recv_frames(ws, 5):
                validator.validate(m)
            ws.send_json({
                "type": "patch", "id": 0,
                "changes": [{"path": "hip_swing.output.velocity.fast", "value": 2.0}],
            })
            ack = recv_until(ws, "patch_ack")
            validator.validate(ack)
