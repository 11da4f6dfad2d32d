"""Pydantic request/response models for the session API.

Likelihood ratios are serialized as both log_lr (authoritative) and lr
(display); all field names are snake_case.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, Field

from ..engine import TrialState, confidence_interval
from .store import SessionRecord, TrajectoryStep


class DesignIn(BaseModel):
    delta: float = Field(allow_inf_nan=False)
    lr_upper: float = Field(default=20.0, allow_inf_nan=False)
    lr_lower: float = Field(default=0.05, allow_inf_nan=False)
    z_crit: float = Field(default=1.96, allow_inf_nan=False)
    label: str = ""


class DesignOut(BaseModel):
    delta: float
    lr_upper: float
    lr_lower: float
    z_crit: float
    label: str
    n_min: int
    n_max: int


class StateOut(BaseModel):
    n: int
    status: str
    theta_obs: float | None = None
    se: float | None = None
    log_lr: float | None = None
    lr: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None


class TrajectoryPointOut(BaseModel):
    seq: int
    value: float
    theta_obs: float
    se: float
    log_lr: float
    lr: float
    status: str
    recorded_at: str


class SessionOut(BaseModel):
    session_id: str
    design: DesignOut
    version: int
    created_at: str
    state: StateOut


class SessionDetailOut(SessionOut):
    trajectory: list[TrajectoryPointOut]


class SessionSummaryOut(BaseModel):
    session_id: str
    label: str
    status: str
    n: int
    version: int
    created_at: str


class SessionListOut(BaseModel):
    sessions: list[SessionSummaryOut]
    next_token: str | None = None


class ObservationIn(BaseModel):
    value: float = Field(allow_inf_nan=False)
    expected_version: int = Field(ge=0)


def state_out(state: TrialState) -> StateOut:
    if state.n < 1:
        return StateOut(n=0, status=state.status.value)
    assert state.lr is not None
    ci_low, ci_high = confidence_interval(state)
    return StateOut(
        n=state.n,
        status=state.status.value,
        theta_obs=state.theta_obs,
        se=state.se,
        log_lr=state.lr.log_value,
        lr=state.lr.value,
        ci_low=ci_low,
        ci_high=ci_high,
    )


def design_out(record: SessionRecord) -> DesignOut:
    d = record.design
    return DesignOut(
        delta=d.delta,
        lr_upper=d.lr_upper,
        lr_lower=d.lr_lower,
        z_crit=d.z_crit,
        label=d.label,
        n_min=d.n_min,
        n_max=d.n_max,
    )


def session_out(record: SessionRecord) -> SessionOut:
    return SessionOut(
        session_id=record.session_id,
        design=design_out(record),
        version=record.version,
        created_at=record.created_at,
        state=state_out(record.state),
    )


def _trajectory_point(step: TrajectoryStep) -> TrajectoryPointOut:
    return TrajectoryPointOut(
        seq=step.seq,
        value=step.value,
        theta_obs=step.theta_obs,
        se=step.se,
        log_lr=step.log_lr,
        lr=math.exp(step.log_lr),
        status=step.status.value,
        recorded_at=step.recorded_at,
    )


def session_detail_out(record: SessionRecord) -> SessionDetailOut:
    base = session_out(record)
    return SessionDetailOut(
        **base.model_dump(),
        trajectory=[_trajectory_point(step) for step in record.trajectory],
    )


def session_summary_out(record: SessionRecord) -> SessionSummaryOut:
    return SessionSummaryOut(
        session_id=record.session_id,
        label=record.design.label,
        status=record.state.status.value,
        n=record.state.n,
        version=record.version,
        created_at=record.created_at,
    )
