"""Session API for steering the maze agent by hand.

HTTP + JSON for commands, a server-sent-event stream for pushes. Sessions are
server-held and single-writer: commands against one session are serialized by
a lock, so the event log is a total order and replaying it reproduces the
table state. Intelligence values are computed by the same pipeline the CLI
uses and cached until the transition table next changes.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .complexity import get_compressor
from .maze import (
    Action,
    AgentPose,
    BUILTIN_MAZES,
    MazeWorld,
    TransitionTable,
    apply_action,
    evaluate,
    load_builtin,
    parse_maze,
    sense,
)
from .measure import event_pm, measure
from .types import PredictionEvent, ValidationError

SCHEMA_VERSION = 1
SESSION_IDLE_SECONDS = 30 * 60


class CreateSessionBody(BaseModel):
    maze: str | None = None
    maze_text: str | None = None
    compressor: str | None = None


class ActionBody(BaseModel):
    action: str


class LearningBody(BaseModel):
    enabled: bool


@dataclass
class Session:
    session_id: str
    world: MazeWorld
    pose: AgentPose
    table: TransitionTable = field(default_factory=TransitionTable)
    learning: bool = True
    compressor_id: str = "lz-deflate-level9"
    lock: threading.Lock = field(default_factory=threading.Lock)
    log: list[dict] = field(default_factory=list)
    log_changed: threading.Condition = field(default_factory=threading.Condition)
    table_version: int = 0
    measure_cache: dict = field(default_factory=dict)
    last_used: float = field(default_factory=time.monotonic)

    def touch(self):
        self.last_used = time.monotonic()

    def push(self, event_type: str, payload: dict):
        entry = {"seq": len(self.log) + 1, "type": event_type, **payload}
        with self.log_changed:
            self.log.append(entry)
            self.log_changed.notify_all()
        return entry


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, session: Session):
        with self._lock:
            self._expire()
            self._sessions[session.session_id] = session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._expire()
            session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        session.touch()
        return session

    def _expire(self):
        now = time.monotonic()
        stale = [
            sid
            for sid, s in self._sessions.items()
            if now - s.last_used > SESSION_IDLE_SECONDS
        ]
        for sid in stale:
            del self._sessions[sid]


def _pose_payload(session: Session) -> dict:
    pose = session.pose
    return {"x": pose.x, "y": pose.y, "orientation": pose.orientation.value}


def _state_payload(session: Session) -> dict:
    sensors = sense(session.world, session.pose)
    return {
        "schema_version": SCHEMA_VERSION,
        "session_id": session.session_id,
        "maze": {
            "name": session.world.name,
            "width": session.world.width,
            "height": session.world.height,
            "rows": list(session.world.rows),
        },
        "pose": _pose_payload(session),
        "sensors": list(sensors),
        "learning": session.learning,
        "transitions_recorded": len(session.table),
    }


def _distribution_payload(dists) -> list[dict]:
    return [
        {"labels": list(d.labels), "probs": [round(p, 6) for p in d.probs]}
        for d in dists
    ]


def create_app(default_maze: str | MazeWorld = "t-maze") -> FastAPI:
    app = FastAPI(title="predintel steering service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore()
    app.state.sessions = store
    default_world = (
        default_maze if isinstance(default_maze, MazeWorld) else load_builtin(default_maze)
    )

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody | None = None):
        body = body or CreateSessionBody()
        try:
            if body.maze_text is not None:
                world = parse_maze(body.maze_text, name=body.maze or "custom")
            elif body.maze is not None:
                world = load_builtin(body.maze)
            else:
                world = default_world
            compressor_id = body.compressor or "lz-deflate-level9"
            get_compressor(compressor_id)  # validate early
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        session = Session(
            session_id=uuid.uuid4().hex,
            world=world,
            pose=world.start_pose(),
            compressor_id=compressor_id,
        )
        store.add(session)
        state = _state_payload(session)
        session.push("session", {"state": state})
        return state

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        return _state_payload(store.get(session_id))

    @app.post("/sessions/{session_id}/action")
    def post_action(session_id: str, body: ActionBody):
        session = store.get(session_id)
        try:
            action = Action(body.action)
        except ValueError:
            raise HTTPException(
                status_code=422,
                detail=f"unknown action {body.action!r}; one of {[a.value for a in Action]}",
            ) from None
        with session.lock:
            state = sense(session.world, session.pose)
            prediction = session.table.predict(state, action)
            session.pose = apply_action(session.world, session.pose, action)
            next_state = sense(session.world, session.pose)
            event = PredictionEvent(
                umwelt_id=session.world.name,
                state_index=len(session.log) + 1,
                time_index=1,
                prediction=prediction,
                outcome=next_state,
            )
            pm = event_pm(event)
            if session.learning:
                session.table.record(state, action, next_state)
                session.table_version += 1
                session.measure_cache.clear()
            payload = {
                "action": action.value,
                "sensors_before": list(state),
                "prediction": _distribution_payload(prediction),
                "sensors_after": list(next_state),
                "pm": pm,
                "pose": _pose_payload(session),
                "learning": session.learning,
            }
            entry = session.push("action", payload)
        return {"schema_version": SCHEMA_VERSION, "seq": entry["seq"], **payload}

    @app.post("/sessions/{session_id}/learning")
    def set_learning(session_id: str, body: LearningBody):
        session = store.get(session_id)
        with session.lock:
            session.learning = body.enabled
            session.push("learning", {"enabled": body.enabled})
        return {"schema_version": SCHEMA_VERSION, "learning": session.learning}

    @app.get("/sessions/{session_id}/intelligence")
    def get_intelligence(session_id: str, scope: str = ""):
        session = store.get(session_id)
        with session.lock:
            names = [n.strip() for n in scope.split(",") if n.strip()]
            scope_names = sorted(set(names) | {session.world.name})
            cache_key = (tuple(scope_names), session.table_version)
            cached = session.measure_cache.get(cache_key)
            if cached is None:
                worlds = []
                for name in scope_names:
                    if name == session.world.name:
                        worlds.append(session.world)
                    elif name in BUILTIN_MAZES:
                        worlds.append(load_builtin(name))
                    else:
                        raise HTTPException(
                            status_code=422, detail=f"unknown umwelt {name!r} in scope"
                        )
                # evaluate() never records, so learning is effectively off
                # for the duration regardless of the session flag.
                records = [evaluate(w, session.table) for w in worlds]
                result = measure(records, get_compressor(session.compressor_id))
                cached = {
                    "schema_version": SCHEMA_VERSION,
                    "umwelts": list(result.umwelt_ids),
                    "pm_per_umwelt": {k: v for k, v in sorted(result.pm_per_umwelt.items())},
                    "joint_factor": result.joint_factor,
                    "pm_total": result.pm_total,
                    "intelligence": result.intelligence,
                    "compressor": result.compressor_id,
                }
                session.measure_cache[cache_key] = cached
                session.push("intelligence", dict(cached))
        return cached

    @app.get("/sessions/{session_id}/events")
    def event_stream(session_id: str, since: int = 0, follow: bool = True):
        """Server-push stream of session events.

        ``since`` resumes delivery after a client-known sequence number, so a
        reconnect sees no gaps. ``follow=false`` replays the current log and
        ends the response (used for replay/snapshot consumers).
        """
        session = store.get(session_id)

        def generate():
            cursor = since
            while True:
                with session.log_changed:
                    if follow and cursor >= len(session.log):
                        session.log_changed.wait(timeout=5.0)
                    batch = list(session.log[cursor:])
                if not batch:
                    if not follow:
                        return
                    # never yield while holding the log condition
                    yield ": keep-alive\n\n"
                    continue
                for entry in batch:
                    cursor = entry["seq"]
                    data = json.dumps(entry, sort_keys=True)
                    yield f"id: {entry['seq']}\nevent: {entry['type']}\ndata: {data}\n\n"
                if not follow:
                    return

        return StreamingResponse(generate(), media_type="text/event-stream")

    return app


def serve(host: str = "127.0.0.1", port: int = 8000, default_maze: str | MazeWorld = "t-maze"):
    import uvicorn

    try:
        uvicorn.run(create_app(default_maze), host=host, port=port)
    except OSError as exc:
        raise ValidationError(f"cannot bind {host}:{port}: {exc}") from exc
