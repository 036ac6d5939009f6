"""SQLite run ledger: engine, schema creation and request-scoped sessions."""

import logging
from collections.abc import Generator

from sqlmodel import Session, SQLModel, create_engine

from grigorchuk_lab.config import settings
from grigorchuk_lab.models import Run

logger = logging.getLogger(__name__)

engine = create_engine(
    settings.database_url,
    echo=False,
    connect_args={"check_same_thread": False},
)


def init_db() -> None:
    """Create the data directory and the ``runs`` table if missing."""
    settings.data_dir.mkdir(parents=True, exist_ok=True)
    SQLModel.metadata.create_all(engine, tables=[Run.__table__])
    logger.debug("run ledger ready at %s", settings.database_url)


def get_session() -> Generator[Session, None, None]:
    with Session(engine) as session:
        yield session
