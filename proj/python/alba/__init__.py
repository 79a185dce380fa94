"""Mean-field load balancing and auto-scaling toolkit.

Exact CTMC simulation over server counts, fluid ODE integration with the
model's discontinuous drift, fixed-point solving, and the bundled
experiment scenarios. The heavy lifting lives in the C++ extension
module; this package re-exports its public surface.
"""

from alba._core import *  # noqa: F401,F403
from alba._core import __version__  # noqa: F401
