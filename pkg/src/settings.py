"""
Configuration settings module for the Glaeser refinement toolkit.

This module contains the numerical tolerances and pipeline defaults used
throughout the package. Every value can be overridden from the environment
(or a ``.env`` file) with a ``GLAESER_`` prefixed variable.
"""

import os
from dotenv import load_dotenv


load_dotenv()


def _float_env(name: str, default: str) -> float:
    return float(os.getenv(f"GLAESER_{name}", default))


def _int_env(name: str, default: str) -> int:
    return int(os.getenv(f"GLAESER_{name}", default))


class ToleranceConfig:
    """Numerical tolerances of the convex kernel."""

    MEMBERSHIP_TOL = _float_env('MEMBERSHIP_TOL', '1e-9')
    LP_FEASIBILITY_TOL = _float_env('LP_FEASIBILITY_TOL', '1e-10')
    STEINER_DIRECTIONS = _int_env('STEINER_DIRECTIONS', '720')
    SELECTION_TOL = _float_env('SELECTION_TOL', '1e-6')


class RefinementDefaults:
    """Defaults of the discretized refinement schedule."""

    RING_START = _float_env('RING_START', '8')
    RING_FLOOR = _float_env('RING_FLOOR', '1')
    MAX_ITERATIONS = _int_env('MAX_ITERATIONS', '8')
    STABILIZATION_TOL = _float_env('STABILIZATION_TOL', '1e-9')
    WORKERS = _int_env('WORKERS', '1')
    WINDOW_SCALE = _float_env('WINDOW_SCALE', '8')

    @classmethod
    def window_half_width(cls, max_abs_data: float) -> float:
        """
        Half-width L of the fiber window [-L, L]^d.

        Args:
            max_abs_data: Largest absolute data value over the grid nodes

        Returns:
            float: WINDOW_SCALE * (1 + max_abs_data)
        """
        return cls.WINDOW_SCALE * (1.0 + float(max_abs_data))


class ScanDefaults:
    """Defaults of the (f2, f4) boundary scan."""

    F1 = _float_env('SCAN_F1', '3')
    F3 = _float_env('SCAN_F3', '-1')
    RANGE = (1.0, 3.0)
    RESOLUTION = _int_env('SCAN_RESOLUTION', '128')


class AppConfig:
    """General application configuration."""

    APP_NAME = "Glaeser Refinement Toolkit"
    DEBUG = os.getenv('GLAESER_DEBUG', 'False').lower() == 'true'
    LOG_LEVEL = os.getenv('GLAESER_LOG_LEVEL', 'INFO').upper()
    SCHEMA_VERSION = 1
