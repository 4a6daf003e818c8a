"""Numerical toolkit for Lie systems with an sl(2,R) Vessiot-Guldberg algebra.

Riccati equations, their SL(2,R) group lift, gauge reductions and an
integrability criterion, plus the time-dependent oscillator, Pinney and
Ermakov systems with their superposition rules and invariants.
"""

from .accel import BACKEND, USE_NUMBA
from .curves import ConstCurve, FuncCurve, RiccatiCoeffs, SampledCurve
from .errors import LieSysError
from .expr import ExprCurve, differentiate, evaluate, parse, unparse
from .liecore import ProjTrajectory, ProjValue, Sl2Element, expm_sl2, mobius
from .numkit import IntegratorOptions, Trajectory, VectorField, integrate_ode

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "USE_NUMBA", "ConstCurve", "FuncCurve", "RiccatiCoeffs", "SampledCurve",
    "LieSysError", "ExprCurve", "differentiate", "evaluate", "parse", "unparse",
    "ProjTrajectory", "ProjValue", "Sl2Element", "expm_sl2", "mobius",
    "IntegratorOptions", "Trajectory", "VectorField", "integrate_ode",
]
