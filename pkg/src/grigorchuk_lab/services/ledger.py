"""Run ledger: short run codes and persistence of analysis results."""

import json
import logging
import secrets
import string
from typing import Any, Optional

from sqlmodel import Session, select

from grigorchuk_lab.models import Run, RunStatus

logger = logging.getLogger(__name__)

MAX_CODE_GENERATION_ATTEMPTS = 100


def generate_code() -> str:
    """Generate a 6-character alphanumeric lowercase code."""
    alphabet = string.ascii_lowercase + string.digits
    return "".join(secrets.choice(alphabet) for _ in range(6))


def is_valid_code(code: str) -> bool:
    """Validate code format: 6 alphanumeric lowercase characters."""
    if len(code) != 6:
        return False
    return code.isalnum() and code.islower()


def record_run(
    session: Session,
    command: str,
    config: dict[str, Any],
    result: Any,
    status: RunStatus = RunStatus.OK,
) -> Run:
    """Store one run with a fresh unique code."""
    for _ in range(MAX_CODE_GENERATION_ATTEMPTS):
        code = generate_code()
        existing = session.exec(select(Run).where(Run.code == code)).first()
        if not existing:
            break
    else:
        raise RuntimeError("Failed to generate unique code after max attempts")

    run = Run(
        code=code,
        command=command,
        omega=config.get("omega"),
        seed=config.get("seed"),
        config_json=json.dumps(config, sort_keys=True, default=str),
        result_json=json.dumps(result, sort_keys=True, default=str),
        status=status.value,
    )
    session.add(run)
    session.commit()
    session.refresh(run)
    logger.info("recorded run %s (%s, %s)", run.code, command, run.status)
    return run


def get_run_by_code(session: Session, code: str) -> Optional[Run]:
    """Get a ledger row by its code."""
    return session.exec(select(Run).where(Run.code == code)).first()
