"""Model checking for epistemic logic with agent skills."""

__version__ = "0.1.0"
