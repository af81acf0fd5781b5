"""Adaptive sampling-based manipulation control on a planar rigid-body sim.

The pieces: a belief-parameterized world model, a batched 2D contact
simulator, a staged declarative cost engine, an ESS-adaptive MPPI planner,
contact-region strategy sampling, a pluggable strategist (heuristic or
remote), a retrieval memory of successful plans, and the nested control
loop that ties them together.
"""

__version__ = "0.1.0"
