"""Measurement-based linear optics on CV cluster states.

Builds cluster-graph terms, evaluates their quadrature input-output
relations, synthesizes brickwork phase schedules for arbitrary passive
circuits, analyzes finite-squeezing noise and simulability thresholds,
samples the easiness regime classically, and cross-checks everything
against exact hafnian/permanent oracles.
"""

__version__ = "0.1.0"
