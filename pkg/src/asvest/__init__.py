"""Velocity and disturbance estimation for autonomous surface vessels.

A cascade estimator for craft that only measure position and heading: a
linear rotational observer and a heading-scheduled nonlinear positional
observer reconstruct the body velocities together with the lumped
disturbances acting on them.  Gains come from two small semidefinite
programs solved by the built-in interior-point solver, a CyberShip II
simulator provides ground truth, and a benchmark harness reproduces
error-statistics experiments.
"""

__version__ = "0.1.0"
