"""Multi-agent obstacle-avoidance RL workbench: Python surface.

The heavy lifting lives in the C++ extension `_marlkit`; this package just
re-exports the bound operations.
"""

from ._marlkit import (  # noqa: F401
    ConfigError,
    Env,
    InputError,
    critic_input_dim,
    mixer_forward,
    mixer_vdn,
    td_target,
    train,
    verify,
)

__all__ = [
    "ConfigError",
    "Env",
    "InputError",
    "critic_input_dim",
    "mixer_forward",
    "mixer_vdn",
    "td_target",
    "train",
    "verify",
]
