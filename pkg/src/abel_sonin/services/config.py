import dataclasses
import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()  # Load environment variables from .env file


@dataclass(frozen=True)
class Defaults:
    """The single defaults table. Echoed into every report as ``defaults_used``.

    Every field can be overridden with an ``ABEL_SONIN_<FIELD>`` environment
    variable (or a ``.env`` file), e.g. ``ABEL_SONIN_N_MODES=32``.
    """

    n_modes: int = 64
    max_degree: int = 64
    quad_order: int = 64
    expansion_margin: int = 16
    residual_min_order: int = 128
    tol_sonin: float = 1e-8
    check_count: int = 9
    noise_floor: float = 1e-12
    decay_margin: float = 0.5
    boundary_rel_tol: float = 1e-3
    min_fit_modes: int = 8
    lq_stability_tol: float = 1e-3
    theta_weight_k: float = 1.0
    bound_trials: int = 8
    sample_points: int = 200
    log_level: str = "INFO"

    @classmethod
    def from_env(cls):
        values = {}
        for field in dataclasses.fields(cls):
            raw = os.getenv(f"ABEL_SONIN_{field.name.upper()}")
            if raw is not None:
                values[field.name] = type(field.default)(raw)
        return cls(**values)

    def with_overrides(self, **overrides):
        """Return a copy with every non-None override applied."""
        known = {field.name for field in dataclasses.fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"Unknown default(s): {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def expansion_order(self, n_modes):
        return 2 * n_modes + self.expansion_margin

    def as_dict(self):
        return dataclasses.asdict(self)


class Config:
    DEFAULTS = Defaults.from_env()
