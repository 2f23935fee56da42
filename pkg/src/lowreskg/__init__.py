"""Low-resource inductive knowledge-graph reasoning engine.

Pipeline pieces: knowledge-graph loading and augmentation (``kg``),
relation-interaction graphs (``relgraph``), K-shot task construction
(``tasks``), a small autodiff core (``numeric``), the query-conditioned GNN
reasoner (``reasoner``), low-resource pretraining (``training``),
LLM-derived prompt graphs (``prompter``), prompt-graph calibration
(``calibrator``), ranking metrics (``evaluation``), and a pipeline CLI
(``cli``).
"""

from .backend import active_backend

__version__ = "0.1.0"

__all__ = ["active_backend", "__version__"]
