"""Dataset feature extraction from labeled text."""
from .features import *  # noqa: F401,F403
from .features import __all__ as _features_all
from .scorers import ScorerPlugin, builtin, load_precomputed
from .tokens import flesch_reading_ease, syllables, tokenize

__all__ = list(_features_all) + [
    "ScorerPlugin", "builtin", "load_precomputed", "flesch_reading_ease", "syllables", "tokenize",
]
