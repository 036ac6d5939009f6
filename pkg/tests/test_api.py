"""Integration tests for API endpoints."""

import pytest
from fastapi.testclient import TestClient
from sqlmodel import Session, SQLModel, create_engine
from sqlmodel.pool import StaticPool

from grigorchuk_lab.database import get_session
from grigorchuk_lab.main import app


@pytest.fixture(name="session")
def session_fixture():
    """Create a test database session."""
    engine = create_engine(
        "sqlite://",
        connect_args={"check_same_thread": False},
        poolclass=StaticPool,
    )
    SQLModel.metadata.create_all(engine)
    with Session(engine) as session:
        yield session


@pytest.fixture(name="client")
def client_fixture(session: Session, tmp_path):
    """Create a test client with dependency overrides."""
    from grigorchuk_lab import config

    original_output_dir = config.settings.output_dir
    config.settings.output_dir = tmp_path / "runs"

    def get_session_override():
        yield session

    app.dependency_overrides[get_session] = get_session_override

    with TestClient(app) as client:
        yield client

    app.dependency_overrides.clear()
    config.settings.output_dir = original_output_dir


def test_root_returns_documentation(client: TestClient):
    """Root endpoint should return API documentation."""
    response = client.get("/")
    assert response.status_code == 200
    assert "Grigorchuk-Lab" in response.text
    assert "POST /analyze-omega" in response.text
    assert "GET /matrices" in response.text


def test_analyze_omega_passes(client: TestClient):
    """01|201 satisfies Fr(3) after a shift and has alpha about 0.7674."""
    response = client.post("/analyze-omega", json={"omega": "01|201", "D": 3})
    assert response.status_code == 200
    data = response.json()
    assert data["fr"]["passed"] is True
    assert data["fr"]["shift"] == 2
    assert data["fr"]["index_points"][:3] == [3, 6, 9]
    assert data["exponent"]["alpha"] == pytest.approx(0.7674, abs=1e-4)
    assert data["volume_exponent"] == pytest.approx(data["exponent"]["alpha"], rel=1e-6)
    assert len(data["code"]) == 6


def test_analyze_omega_fr_failure_is_recorded(client: TestClient):
    """A failing string is answered and stamped as an Fr failure."""
    response = client.post("/analyze-omega", json={"omega": "|0", "D": 3})
    assert response.status_code == 200
    data = response.json()
    assert data["fr"]["passed"] is False
    assert data["fr"]["failure_block"] == 0
    assert data["exponent"] is None
    assert data["volume_exponent"] == pytest.approx(1.0, abs=1e-6)

    run = client.get(f"/runs/{data['code']}")
    assert run.status_code == 200
    assert run.json()["status"] == "fr-failure"
    assert run.json()["config"]["omega"] == "|0"


def test_analyze_omega_bad_string(client: TestClient):
    """Digits outside 012 are rejected."""
    response = client.post("/analyze-omega", json={"omega": "3|1"})
    assert response.status_code == 400
    assert "detail" in response.json()


def test_analyze_omega_small_d(client: TestClient):
    """D below 3 fails validation."""
    response = client.post("/analyze-omega", json={"omega": "|201", "D": 2})
    assert response.status_code == 422


def test_matrices(client: TestClient):
    """Six matrices with their Perron values."""
    response = client.get("/matrices")
    assert response.status_code == 200
    table = {row["name"]: row for row in response.json()}
    assert set(table) == {"M0", "M1", "M2", "M", "A", "M2A"}
    assert table["M0"]["matrix"] == [[2, 0, 1], [0, 2, 1], [0, 0, 1]]
    assert table["M2A"]["matrix"] == [[6, 5, 4], [2, 5, 4], [2, 3, 4]]
    assert table["M2A"]["spectral_radius"] == pytest.approx(11.3809, abs=1e-3)
    assert table["M0"]["spectral_radius"] == pytest.approx(2.0)


def test_verify_relations(client: TestClient):
    """The relations suite passes."""
    response = client.post("/verify/relations")
    assert response.status_code == 200
    data = response.json()
    assert data["passed"] is True
    assert data["failed"] == 0
    assert data["total"] == len(data["checks"]) == 11


def test_verify_unknown_suite(client: TestClient):
    """Unknown suites are a bad request."""
    response = client.post("/verify/nope")
    assert response.status_code == 400


def test_get_run_invalid_code(client: TestClient):
    """Malformed codes are rejected."""
    response = client.get("/runs/ABC")
    assert response.status_code == 400


def test_get_run_missing_code(client: TestClient):
    """Unknown codes are not found."""
    response = client.get("/runs/abc123")
    assert response.status_code == 404
