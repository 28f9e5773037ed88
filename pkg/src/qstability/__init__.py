"""Statistical characterization of noisy quantum programs.

Accuracy, reproducibility, reliability and stability checks built on an
exact density-matrix simulator with Kraus noise channels.
"""
__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402
