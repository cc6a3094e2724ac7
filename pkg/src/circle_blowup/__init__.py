"""Numerical blow-up analysis for ``(-Delta)^{1/2} u = h e^u - 1`` on the unit circle.

Modules:

* :mod:`.spectral` - grid functions and Fourier multipliers;
* :mod:`.conformal` - Möbius maps and bubble profiles;
* :mod:`.hypothesis` - standing assumptions on ``h`` and ``k`` at ``theta = 0``;
* :mod:`.ansatz` - approximate solution, its error and the projection identities;
* :mod:`.reduction` - the 2x2 system for the blow-up rates;
* :mod:`.solver` - Newton collocation, bubble fitting and continuation;
* :mod:`.cli` - command line front end.
"""

from .conformal import MobiusParam
from .errors import BlowupError
from .spectral import CircleFunction

__all__ = ["BlowupError", "CircleFunction", "MobiusParam"]
__version__ = "0.1.0"
