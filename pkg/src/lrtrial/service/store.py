"""Durable session store: one append-only JSONL event log per session.

The log (a design record followed by observation records) is the source
of truth; trial state is always derived by replaying it through the
engine, so a reload after a crash reproduces the exact same state.
Appends are flushed and fsynced before the call returns.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..engine import (
    TrialDesign,
    TrialState,
    TrialStatus,
    add_observation,
    new_trial,
    replay,
)

EXPORT_CSV_HEADER = ["seq", "value", "theta_obs", "se", "lr", "status", "recorded_at"]


class UnknownSessionError(KeyError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session {session_id!r}")


class VersionConflictError(RuntimeError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected version {expected}, session is at version {actual}")


class SessionStoppedError(RuntimeError):
    def __init__(self, status: TrialStatus, n: int):
        self.status = status
        self.n = n
        super().__init__(f"session already stopped ({status.value}) at n={n}")


@dataclass(frozen=True, slots=True)
class Observation:
    seq: int
    value: float
    recorded_at: str


@dataclass(frozen=True, slots=True)
class TrajectoryStep:
    """Derived snapshot after one observation, kept for charting and export."""

    seq: int
    value: float
    theta_obs: float
    se: float
    log_lr: float
    status: TrialStatus
    recorded_at: str


@dataclass
class SessionRecord:
    session_id: str
    design: TrialDesign
    created_at: str
    observations: list[Observation] = field(default_factory=list)
    trajectory: list[TrajectoryStep] = field(default_factory=list)
    state: TrialState = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.state is None:
            self.state = new_trial(self.design)

    @property
    def version(self) -> int:
        # One accepted mutation per observation; the log makes this
        # crash-derivable.
        return len(self.observations)


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


class SessionStore:
    """Thread-safe session registry backed by per-session JSONL logs."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, SessionRecord] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._load()

    # -- persistence ----------------------------------------------------

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, record: dict) -> None:
        with open(self._path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _load(self) -> None:
        for path in sorted(self.data_dir.glob("*.jsonl")):
            with open(path, encoding="utf-8") as fh:
                lines = [json.loads(line) for line in fh if line.strip()]
            if not lines or lines[0].get("type") != "design":
                raise ValueError(f"corrupt session log {path}: missing design record")
            head = lines[0]
            design = TrialDesign(
                delta=head["delta"],
                lr_upper=head["lr_upper"],
                lr_lower=head["lr_lower"],
                z_crit=head["z_crit"],
                label=head.get("label", ""),
            )
            record = SessionRecord(
                session_id=head["session_id"],
                design=design,
                created_at=head["created_at"],
            )
            for line in lines[1:]:
                if line.get("type") != "observation":
                    raise ValueError(f"corrupt session log {path}: {line!r}")
                obs = Observation(
                    seq=line["seq"], value=line["value"], recorded_at=line["recorded_at"]
                )
                if obs.seq != record.version + 1:
                    raise ValueError(f"corrupt session log {path}: seq gap at {obs.seq}")
                self._apply(record, obs)
            self._sessions[record.session_id] = record
            self._locks[record.session_id] = threading.Lock()

    # -- derivation -----------------------------------------------------

    @staticmethod
    def _apply(record: SessionRecord, obs: Observation) -> None:
        state = add_observation(record.state, obs.value)
        record.observations.append(obs)
        record.state = state
        assert state.theta_obs is not None and state.se is not None and state.lr is not None
        record.trajectory.append(
            TrajectoryStep(
                seq=obs.seq,
                value=obs.value,
                theta_obs=state.theta_obs,
                se=state.se,
                log_lr=state.lr.log_value,
                status=state.status,
                recorded_at=obs.recorded_at,
            )
        )

    def replay_state(self, session_id: str) -> TrialState:
        """Recompute the derived state from scratch (audit helper)."""
        record = self.get_session(session_id)
        return replay(record.design, [obs.value for obs in record.observations])

    # -- operations -----------------------------------------------------

    def create_session(self, design: TrialDesign) -> SessionRecord:
        session_id = uuid.uuid4().hex
        record = SessionRecord(
            session_id=session_id, design=design, created_at=_utcnow()
        )
        self._append(
            session_id,
            {
                "type": "design",
                "session_id": session_id,
                "created_at": record.created_at,
                "delta": design.delta,
                "lr_upper": design.lr_upper,
                "lr_lower": design.lr_lower,
                "z_crit": design.z_crit,
                "label": design.label,
            },
        )
        with self._registry_lock:
            self._sessions[session_id] = record
            self._locks[session_id] = threading.Lock()
        return record

    def get_session(self, session_id: str) -> SessionRecord:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(session_id) from None

    def list_sessions(
        self,
        status: TrialStatus | None = None,
        limit: int = 100,
        offset: int = 0,
    ) -> tuple[list[SessionRecord], int | None]:
        """Records ordered by creation time; returns the next offset or None."""
        with self._registry_lock:
            records = sorted(
                self._sessions.values(), key=lambda r: (r.created_at, r.session_id)
            )
        if status is not None:
            records = [r for r in records if r.state.status is status]
        window = records[offset : offset + limit]
        next_offset = offset + limit if offset + limit < len(records) else None
        return window, next_offset

    def add_observation(
        self, session_id: str, value: float, expected_version: int
    ) -> SessionRecord:
        record = self.get_session(session_id)
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"observation value must be finite, got {value!r}")
        with self._locks[session_id]:
            if record.state.status not in (TrialStatus.COLLECTING, TrialStatus.CONTINUE):
                raise SessionStoppedError(record.state.status, record.state.n)
            if expected_version != record.version:
                raise VersionConflictError(expected_version, record.version)
            obs = Observation(
                seq=record.version + 1, value=value, recorded_at=_utcnow()
            )
            # Durable before visible: fsync the event, then mutate memory.
            self._append(
                session_id,
                {
                    "type": "observation",
                    "seq": obs.seq,
                    "value": obs.value,
                    "recorded_at": obs.recorded_at,
                },
            )
            self._apply(record, obs)
        return record

    def export_csv(self, session_id: str) -> str:
        """Observation log with derived per-step state; stable byte-for-byte."""
        record = self.get_session(session_id)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(EXPORT_CSV_HEADER)
        for step in record.trajectory:
            writer.writerow(
                [
                    step.seq,
                    repr(step.value),
                    repr(step.theta_obs),
                    repr(step.se),
                    repr(math.exp(step.log_lr)),
                    step.status.value,
                    step.recorded_at,
                ]
            )
        return buf.getvalue()
