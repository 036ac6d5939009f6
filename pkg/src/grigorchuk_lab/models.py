"""Database models using SQLModel."""

from datetime import datetime, timezone
from enum import Enum
from typing import Optional

from sqlmodel import Field, SQLModel


def _utc_now() -> datetime:
    """Return current UTC datetime."""
    return datetime.now(timezone.utc)


class RunStatus(str, Enum):
    """Outcome recorded for a run."""

    OK = "ok"
    FAILED = "failed"
    FR_FAILURE = "fr-failure"


class Run(SQLModel, table=True):
    """One CLI or API analysis, stamped with its resolved config."""

    __tablename__ = "runs"

    id: Optional[int] = Field(default=None, primary_key=True)
    code: str = Field(unique=True, index=True, max_length=6)
    command: str = Field(max_length=64)
    omega: Optional[str] = Field(default=None, max_length=256)
    seed: Optional[int] = None
    config_json: str
    result_json: str
    status: str = Field(default=RunStatus.OK)
    created_at: datetime = Field(default_factory=_utc_now)
