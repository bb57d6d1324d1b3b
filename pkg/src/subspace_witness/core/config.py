"""
Configuration for the subspace-witness package.

Numerical tolerances, optimizer settings, output directory and logging.
Every field can be overridden through environment variables or a .env file.
"""
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from .exceptions import ConfigurationException

# load environment variables
load_dotenv()


def _env_float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: str) -> int:
    return int(os.getenv(name, default))


@dataclass
class NumericsConfig:
    """Numerical tolerances"""
    hermitian_tol: float = field(default_factory=lambda: _env_float('WITNESS_HERMITIAN_TOL', '1e-9'))
    trace_tol: float = field(default_factory=lambda: _env_float('WITNESS_TRACE_TOL', '1e-9'))
    psd_floor: float = field(default_factory=lambda: _env_float('WITNESS_PSD_FLOOR', '-1e-9'))
    unitary_tol: float = field(default_factory=lambda: _env_float('WITNESS_UNITARY_TOL', '1e-9'))
    norm_tol: float = field(default_factory=lambda: _env_float('WITNESS_NORM_TOL', '1e-12'))

    # Jacobi eigensolver
    jacobi_tol: float = field(default_factory=lambda: _env_float('WITNESS_JACOBI_TOL', '1e-14'))
    jacobi_max_sweeps: int = field(default_factory=lambda: _env_int('WITNESS_JACOBI_MAX_SWEEPS', '100'))
    jacobi_max_dim: int = field(default_factory=lambda: _env_int('WITNESS_JACOBI_MAX_DIM', '64'))

    def validate(self) -> bool:
        """Validate tolerance values"""
        positive = ['hermitian_tol', 'trace_tol', 'unitary_tol', 'norm_tol', 'jacobi_tol']
        bad = [name for name in positive if not getattr(self, name) > 0]
        if self.psd_floor > 0:
            bad.append('psd_floor')
        if self.jacobi_max_sweeps < 1 or self.jacobi_max_dim < 1:
            bad.append('jacobi_limits')
        if bad:
            raise ConfigurationException(
                f"invalid numerics config: {', '.join(bad)}",
                error_code="NUMERICS_CONFIG_INVALID",
                details={'invalid_fields': bad}
            )
        return True


@dataclass
class OptimizerConfig:
    """Phase optimisation and alpha computation"""
    starts: int = field(default_factory=lambda: _env_int('WITNESS_OPT_STARTS', '16'))
    tol: float = field(default_factory=lambda: _env_float('WITNESS_OPT_TOL', '1e-10'))
    max_iter: int = field(default_factory=lambda: _env_int('WITNESS_OPT_MAX_ITER', '500'))
    alpha_restarts: int = field(default_factory=lambda: _env_int('WITNESS_ALPHA_RESTARTS', '16'))
    alpha_tol: float = field(default_factory=lambda: _env_float('WITNESS_ALPHA_TOL', '1e-12'))
    alpha_max_sweeps: int = field(default_factory=lambda: _env_int('WITNESS_ALPHA_MAX_SWEEPS', '500'))

    def validate(self) -> bool:
        if self.starts < 1 or self.alpha_restarts < 1:
            raise ConfigurationException(
                "optimizer starts must be >= 1",
                error_code="OPTIMIZER_CONFIG_INVALID",
                details={'starts': self.starts, 'alpha_restarts': self.alpha_restarts}
            )
        return True


@dataclass
class OutputConfig:
    """Output settings"""
    output_dir: str = field(default_factory=lambda: os.getenv('WITNESS_OUTPUT_DIR', './output'))
    float_format: str = field(default_factory=lambda: os.getenv('WITNESS_FLOAT_FORMAT', '%.12g'))


@dataclass
class LoggingConfig:
    """Logging settings"""
    level: str = field(default_factory=lambda: os.getenv('LOG_LEVEL', 'WARNING'))
    format: str = field(default_factory=lambda: os.getenv('LOG_FORMAT', '%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    file_path: str | None = field(default_factory=lambda: os.getenv('LOG_FILE_PATH'))
    max_file_size: int = field(default_factory=lambda: _env_int('LOG_MAX_FILE_SIZE', '10485760'))  # 10MB
    backup_count: int = field(default_factory=lambda: _env_int('LOG_BACKUP_COUNT', '5'))

    # structured logging
    structured_logging: bool = field(default_factory=lambda: os.getenv('STRUCTURED_LOGGING', 'True').lower() == 'true')
    json_format: bool = field(default_factory=lambda: os.getenv('JSON_LOG_FORMAT', 'True').lower() == 'true')


class Config:
    """Top-level configuration"""

    def __init__(self) -> None:
        self.numerics = NumericsConfig()
        self.optimizer = OptimizerConfig()
        self.output = OutputConfig()
        self.logging = LoggingConfig()

    def validate_all(self) -> bool:
        """Validate every section"""
        try:
            self.numerics.validate()
            self.optimizer.validate()
            return True
        except ConfigurationException:
            raise
        except Exception as e:
            raise ConfigurationException(
                f"configuration validation failed: {str(e)}",
                error_code="CONFIG_VALIDATION_ERROR"
            )

    def reload(self) -> "Config":
        """Rebuild every section from the current environment"""
        try:
            self.numerics = NumericsConfig()
            self.optimizer = OptimizerConfig()
            self.output = OutputConfig()
            self.logging = LoggingConfig()
        except ValueError as e:
            raise ConfigurationException(
                f"cannot parse environment variable: {e}",
                error_code="CONFIG_PARSE_ERROR"
            )
        self.validate_all()
        return self

    @classmethod
    def load_from_file(cls, path: str | Path) -> "Config":
        """Load a .env file and refresh the global config"""
        env_path = Path(path)
        if not env_path.exists():
            raise ConfigurationException(
                f"env file not found: {env_path}",
                error_code="ENV_FILE_MISSING",
                details={'path': str(env_path)}
            )
        load_dotenv(env_path, override=True)
        return config.reload()

    def to_dict(self) -> dict[str, Any]:
        """Config summary for CSV metadata"""
        return {
            'hermitian_tol': self.numerics.hermitian_tol,
            'psd_floor': self.numerics.psd_floor,
            'optimizer_starts': self.optimizer.starts,
            'optimizer_tol': self.optimizer.tol,
            'alpha_restarts': self.optimizer.alpha_restarts,
        }


# global config instance
config = Config()
