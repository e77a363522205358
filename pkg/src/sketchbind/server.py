"""Websocket service for the session protocol.

One writer session per scene: the first connection drives the engine,
later connections observe (they receive every event but their commands
are refused). Message payloads are JSON text frames, one object per
frame; ``--http`` optionally serves the scene directory for clients
that load frames directly.

Playback: after a ``play`` command the server advances one tick per
1/fps wall-clock interval until ``pause`` or the end of the scene.
"""

from __future__ import annotations

import asyncio
import functools
import http.server
import json
import threading
from pathlib import Path

from .errors import BadCommandError
from .protocol import FaultEvent, Session, command_from_dict, event_to_json
from .scene_io import load_scene


class SessionServer:
    def __init__(self, scene, strobe_spacing=None):
        kwargs = {} if strobe_spacing is None else {"strobe_spacing": strobe_spacing}
        self.session = Session(scene, **kwargs)
        self.clients = set()
        self.writer = None
        self._play_task = None

    async def broadcast(self, events):
        dead = []
        for client in self.clients:
            for event in events:
                try:
                    await client.send(event_to_json(event))
                except Exception:
                    dead.append(client)
                    break
        for client in dead:
            self.clients.discard(client)

    async def _play_loop(self):
        scene = self.session.scene
        interval = 1.0 / scene.fps
        while self.session.playing and self.session.cursor < len(scene):
            event = self.session.tick(self.session.cursor)
            await self.broadcast([event])
            await asyncio.sleep(interval)
        self.session.playing = False

    async def handle(self, websocket):
        self.clients.add(websocket)
        is_writer = self.writer is None
        if is_writer:
            self.writer = websocket
        try:
            async for message in websocket:
                if websocket is not self.writer:
                    await websocket.send(event_to_json(FaultEvent(
                        "ReadOnly", "another session is the writer")))
                    continue
                try:
                    cmd = command_from_dict(json.loads(message))
                except (json.JSONDecodeError, BadCommandError) as exc:
                    await self.broadcast([FaultEvent("BadCommand", str(exc))])
                    continue
                events = self.session.handle_command(cmd)
                await self.broadcast(events)
                if self.session.playing and (
                        self._play_task is None or self._play_task.done()):
                    self._play_task = asyncio.ensure_future(self._play_loop())
                if not self.session.playing and self._play_task is not None:
                    self._play_task.cancel()
                    self._play_task = None
        finally:
            self.clients.discard(websocket)
            if websocket is self.writer:
                self.writer = None


def _start_http(scene_path: str, listen: str):
    host, _, port = listen.rpartition(":")
    handler = functools.partial(http.server.SimpleHTTPRequestHandler,
                                directory=str(Path(scene_path)))
    httpd = http.server.ThreadingHTTPServer((host or "127.0.0.1", int(port)), handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    return httpd


def serve_forever(scene_path, listen: str, http_listen: str | None = None):
    import websockets

    scene = load_scene(scene_path)
    server = SessionServer(scene)
    host, _, port = listen.rpartition(":")
    if http_listen:
        _start_http(scene_path, http_listen)
        print(f"serving scene files over http at {http_listen}")

    async def amain():
        async with websockets.serve(server.handle, host or "127.0.0.1", int(port)):
            print(f"session protocol listening on ws://{listen}")
            await asyncio.Future()

    asyncio.run(amain())
