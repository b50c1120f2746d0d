"""Figure renderer for udw-harvest CSV outputs.

Pure visualization: no physics is computed here. The input contract is
the harvester's CSV layout (comment lines starting with '#', a header
row of parameter columns followed by p, abs_m, negativity, err_p,
err_m, converged, then optional reference columns).
"""

__version__ = "0.1.0"

from .render import RenderJob, render  # noqa: F401
