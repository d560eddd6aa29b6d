from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()


class Tolerances(BaseModel):
    """Absolute tolerances shared by every numerical check in the package."""

    validation: float = 1e-10       # input checks: hermiticity, PSD, TP, distributions
    reconstruction: float = 1e-11   # eigen-reconstruction, duality, Choi round trips
    equality: float = 1e-12         # exact identities and unit-norm checks
    verification: float = 1e-10     # residual threshold used by the CLI checks
    jacobi_convergence: float = 1e-14
    ground_gap: float = 1e-8        # relative gap required for a nondegenerate ground state


class Settings(BaseSettings):
    """
    Configuration settings for fluctum.
    All settings can be overridden by environment variables prefixed with FLUCTUM_.
    """

    tolerances: Tolerances = Field(default_factory=Tolerances)

    # Numerical limits
    jacobi_max_sweeps: int = 100
    beta_max: float = 1e3
    random_channel_retries: int = 5

    # CLI configuration
    default_seed: int = 0
    jobs: int = 1
    tol: Optional[float] = None     # FLUCTUM_TOL, fallback for --tolerance
    csv_float_format: str = "%.17g"

    # Logging
    log_level: str = "INFO"
    log_json: bool = False

    model_config = SettingsConfigDict(
        env_prefix="FLUCTUM_",
        env_file=".env",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    def override_tolerance(self, value: Optional[float]) -> "Settings":
        """Return a copy whose verification tolerance is `value` (or FLUCTUM_TOL)."""
        chosen = value if value is not None else self.tol
        if chosen is None:
            return self
        if chosen <= 0:
            raise ValueError(f"Tolerance must be positive, got {chosen}")
        tolerances = self.tolerances.model_copy(update={"verification": chosen})
        return self.model_copy(update={"tolerances": tolerances})


# Global settings instance
settings = Settings()
