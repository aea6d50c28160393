"""gns-decay - pseudo-spectral decay laboratory for generalized Navier-Stokes."""

__version__ = "0.1.0"
