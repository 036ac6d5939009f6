"""Application configuration."""

from pathlib import Path

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Settings loaded from environment variables or a .env file."""

    host: str = "0.0.0.0"
    port: int = 8080
    base_url: str = "http://localhost:8080"
    data_dir: Path = Path("./data")
    output_dir: Path = Path("./runs")
    log_level: str = "INFO"

    default_seed: int = 20240917

    identity_depth_guard: int = 64
    germ_depth_padding: int = 3
    orbit_capacity: int = 1024
    exhaustive_depth: int = 12
    sampled_vertices: int = 4096
    ball_radius_cap: int = 10
    power_tolerance: float = 1e-12
    power_max_iterations: int = 100_000
    support_enumeration_cap: int = 2**20
    explicit_length_cap: int = 1 << 16

    model_config = {"env_file": ".env", "env_file_encoding": "utf-8"}

    @property
    def database_url(self) -> str:
        """Return SQLite database URL."""
        return f"sqlite:///{self.data_dir}/grigorchuk_lab.db"


settings = Settings()
