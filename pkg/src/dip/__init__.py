"""Dictionary insertion prompting (DIP) for low-resource-language reasoning.

Annotates source-language questions with interleaved English glosses from a
bilingual lexicon, renders the family of prompting strategies, runs them
through a cached / replayable completion client and scores the outputs.
"""

from dip.annotator import (
    AnnotatedText,
    annotate_interleaved,
    render_dictionary_block,
    strip_annotations,
)
from dip.datasets import BenchmarkItem, load_dataset, sample_subset
from dip.errors import DipError
from dip.lexicon import Lexicon, LexiconEntry, load_lexicon, lookup_longest, normalize_surface
from dip.prompts import Prompt, PromptStrategy, build_prompt, dictionary_construction_prompt
from dip.segmenter import Token, TokenKind, segment

__version__ = "0.1.0"

__all__ = [
    "AnnotatedText",
    "BenchmarkItem",
    "DipError",
    "Lexicon",
    "LexiconEntry",
    "Prompt",
    "PromptStrategy",
    "Token",
    "TokenKind",
    "annotate_interleaved",
    "build_prompt",
    "dictionary_construction_prompt",
    "load_dataset",
    "load_lexicon",
    "lookup_longest",
    "normalize_surface",
    "render_dictionary_block",
    "sample_subset",
    "segment",
    "strip_annotations",
]
