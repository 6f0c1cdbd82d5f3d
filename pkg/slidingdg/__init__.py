"""Sliding mesh DGSEM solver for the compressible Euler and Navier-Stokes equations."""

__path__ = __import__("pkgutil").extend_path(__path__, __name__)

__all__ = ["basis", "driver", "mesh", "mortar", "parallel", "physics", "solver"]
