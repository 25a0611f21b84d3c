"""Prescribed Gauss curvature graphs over hypersurfaces of model spaces."""

import json as _json

from ._core import (  # noqa: F401
    Chart,
    Domain,
    GaussGraphError,
    GraphFunction,
    alpha_of_theta,
    assemble_curvature,
    equidistant_curvature,
    jacobi_zeroth_order,
    newton_solve,
    oracle_curvature,
    read_grid,
    sectional_curvature,
    sphere_cap,
    stability,
    theta_of_alpha,
    write_grid,
)
from ._core import run as _run


def run(command, config, jobs=1):
    """Run a CLI command with a config given as a dict; returns (exit code, summary dict)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    rc, summary = _run(command, text, jobs)
    return rc, _json.loads(summary)
