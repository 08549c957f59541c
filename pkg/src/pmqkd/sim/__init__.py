"""Monte Carlo model of the protocol rounds.

The round loop lives in a Cython extension (``_kernel``) when it has been
built; otherwise the numpy implementation in ``_fallback`` is used. Set
``PMQKD_BACKEND=python`` to force the fallback.
"""

import os

from . import _fallback

BACKEND = "python"
run_block = _fallback.run_block

if os.environ.get("PMQKD_BACKEND", "").lower() not in ("python", "numpy", "fallback"):
    try:
        from ._kernel import run_block  # noqa: F811
    except ImportError:
        pass
    else:
        BACKEND = "cython"

from .protocol import (  # noqa: E402
    Mode,
    Outcome,
    ProtocolConfig,
    RoundRecord,
    SimTally,
    expected_rates,
    phase_averaged_gain,
    run_round,
    sift,
    simulate,
)

__all__ = [
    "BACKEND",
    "Mode",
    "Outcome",
    "ProtocolConfig",
    "RoundRecord",
    "SimTally",
    "expected_rates",
    "phase_averaged_gain",
    "run_block",
    "run_round",
    "sift",
    "simulate",
]
