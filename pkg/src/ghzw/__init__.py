"""Rewriting and exact semantics for the GHZ/W graphical calculus."""
from .diagram import (
    GHZ,
    W,
    Diagram,
    DiagramBuilder,
    Edge,
    ParamState,
    Port,
    Vertex,
    VertexKind,
    compose_par,
    compose_seq,
    identity_diagram,
    is_isomorphic,
    validate,
)
from .kernels import BACKEND
from .semantics import Tensor, evaluate, proj_equal, scalar_value

__version__ = "0.1.0"
