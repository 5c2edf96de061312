"""Toolkit for watching restricted Boltzmann machines learn through phase transitions.

Subsystems: spin models and Gibbs sampling (`model`, `sampling`,
`enumeration`), teacher datasets and mean-field solvers (`synthetic`),
learning-dynamics ODEs (`theory`), maximum-likelihood training (`trainer`),
mode tracking and susceptibility scans (`observables`), field loops
(`hysteresis`), dataset files (`dataio`) and a CLI (`cli`).
"""

from .kernels import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
