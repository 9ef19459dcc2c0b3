"""Random walk traces on regular graphs."""

import json

from ._tracelab import (
    ConvergenceError,
    DisconnectedError,
    FormatError,
    GenerationError,
    Graph,
    PreconditionError,
    __version__,
    binomial_tail_bound,
    certify,
    cover,
    effective_resistance,
    generate,
    hamiltonian_cycle,
    hitting_matrix,
    hitting_time,
    matthews_bounds,
    mixing_time,
    mixing_time_bound,
    resistance_matrix,
    spectral,
    spectral_cover_bound,
    tau_times,
    verify_cycle,
    walk,
)
from ._tracelab import _run_experiment


def run_experiment(config, workers=1):
    """Run an experiment config (dict or JSON text).

    Returns a dict with columns, rows, csv and the parsed summary document.
    """
    text = config if isinstance(config, str) else json.dumps(config)
    try:
        json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from None
    out = _run_experiment(text, workers)
    out["summary"] = json.loads(out["summary"])
    return out
