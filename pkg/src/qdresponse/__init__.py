"""Steady-state, linear and nonlinear optical response of a pump-probe driven
quantum dot coupled to a cavity mode and a lattice-vibration mode.

Everything is dimensionless (rates and frequencies in units of the exciton
dephasing rate).  The main entry points are:

* :mod:`qdresponse.model`    - parameter set and detuning conversions
* :mod:`qdresponse.steady`   - inversion cubic, branches, stability, hysteresis
* :mod:`qdresponse.response` - sideband response, susceptibilities, transmission
* :mod:`qdresponse.oracle`   - time-domain integration and demodulation
* :mod:`qdresponse.sweep`    - grid sweeps, extrema, CSV/JSON emission
* :mod:`qdresponse.presets`  - bundled scenario catalog
* :mod:`qdresponse.cli`      - the ``qdr`` command
"""
from .model import Params, SweepAxis, delta_from_signal_detuning, validate_params
from .records import Flag, SpectrumRecord
from .response import Backend, ResponsePoint, SidebandAmplitudes
from .steady import Stability, SteadyBranch

__version__ = "0.1.0"

__all__ = [
    "Params",
    "SweepAxis",
    "delta_from_signal_detuning",
    "validate_params",
    "Flag",
    "SpectrumRecord",
    "Backend",
    "ResponsePoint",
    "SidebandAmplitudes",
    "Stability",
    "SteadyBranch",
    "__version__",
]
