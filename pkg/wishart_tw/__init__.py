"""Tracy-Widom laws, Wishart largest-eigenvalue sampling and Laguerre-kernel diagnostics."""

__version__ = "0.3.0"
