"""Cross-language similarity analytics for subject-area item networks."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
