"""depthedge: CPU runtime and toolkit for lightweight pyramidal
single-image depth estimation networks.

Submodules:
    tensor_ops   dense float32 kernels (conv, resampling, gradients, blur)
    graph        layer graphs, the pyramidal preset, execution, MAC/param counts
    weights_io   the LDWB bit-exact weight container
    losses       view-synthesis and distillation objectives as forward functions
    metrics      seven-column depth evaluation and alignment
    scale_align  RANSAC metric-scale recovery and AR occlusion masks
    bokeh        depth-aware Gaussian blur
    image_io     PNG/PPM/LDRF file handling (used by the CLI)
    cli          the `depthedge` command-line front end
"""

from . import (  # noqa: F401
    bokeh,
    graph,
    image_io,
    losses,
    metrics,
    scale_align,
    tensor_ops,
    weights_io,
)
from .errors import (  # noqa: F401
    ConfigurationError,
    DegeneracyError,
    DomainError,
    ShapeError,
)

__version__ = "0.1.0"
