"""Fixed-photon-number linear optics with coordinate-minimum training.

Modules:

* :mod:`smoptics.fock` - occupation bases, permanents, sector lifts
* :mod:`smoptics.circuit` - parameterized phase-shifter/beamsplitter circuits
* :mod:`smoptics.trigfit` - trig-polynomial recovery from probe samples
* :mod:`smoptics.shots` - exact and finite-shot measurement models
* :mod:`smoptics.smo` - sequential coordinate-minimum trainer
* :mod:`smoptics.classifier` - the circle-classification experiment
* :mod:`smoptics.cli` - train / sweep / budget / plot commands
"""

__version__ = "0.1.0"

from . import circuit, classifier, fock, shots, smo, trigfit  # noqa: E402,F401
