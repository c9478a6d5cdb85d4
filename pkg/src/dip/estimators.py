"""scikit-learn compatible wrappers so annotation and prompt rendering compose in pipelines."""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from dip.annotator import annotate_interleaved, render_dictionary_block
from dip.datasets import BenchmarkItem
from dip.lexicon import Lexicon, load_lexicon
from dip.prompts import PromptStrategy, build_prompt


def check_texts(X):
    """Coerce ``X`` to a list of strings, rejecting a bare string."""
    if isinstance(X, str):
        raise ValueError("expected a sequence of texts, got a single string")
    try:
        texts = list(X)
    except TypeError:
        raise ValueError(f"expected a sequence of texts, got {type(X).__name__}") from None
    for i, t in enumerate(texts):
        if not isinstance(t, str):
            raise ValueError(f"element {i} is {type(t).__name__}, not str")
    return texts


def _resolve_lexicon(lexicon):
    if isinstance(lexicon, Lexicon):
        return lexicon
    if lexicon is None:
        raise ValueError("a lexicon or lexicon path is required")
    return load_lexicon(lexicon)


class DictionaryInserter(TransformerMixin, BaseEstimator):
    """Annotate texts with glosses from a lexicon.

    Parameters
    ----------
    lexicon : Lexicon or path
        Loaded lexicon, or a path to a lexicon JSONL file read at ``fit``.
    mode : {"interleaved", "block"}
        ``interleaved`` inserts ``" (gloss)"`` after each match; ``block``
        returns the matched-entry dictionary block instead.
    """

    def __init__(self, lexicon=None, mode="interleaved"):
        self.lexicon = lexicon
        self.mode = mode

    def fit(self, X=None, y=None):
        if self.mode not in ("interleaved", "block"):
            raise ValueError(f"mode must be 'interleaved' or 'block', got {self.mode!r}")
        self.lexicon_ = _resolve_lexicon(self.lexicon)
        self.n_entries_ = len(self.lexicon_)
        return self

    def transform(self, X):
        check_is_fitted(self, "lexicon_")
        texts = check_texts(X)
        if self.mode == "block":
            return [render_dictionary_block(t, self.lexicon_) for t in texts]
        return [annotate_interleaved(t, self.lexicon_).text for t in texts]


class PromptRenderer(TransformerMixin, BaseEstimator):
    """Render benchmark items to prompt texts for one strategy.

    ``lexicons`` maps language codes to lexicons (or paths); it is only
    consulted for dictionary strategies.
    """

    def __init__(self, strategy="dip", lexicons=None):
        self.strategy = strategy
        self.lexicons = lexicons

    def fit(self, X=None, y=None):
        self.strategy_ = PromptStrategy.parse(str(getattr(self.strategy, "value", self.strategy)))
        if self.strategy_.uses_lexicon:
            if not self.lexicons:
                raise ValueError(f"strategy {self.strategy_.value} needs lexicons")
            self.lexicons_ = {code: _resolve_lexicon(lex) for code, lex in self.lexicons.items()}
        else:
            self.lexicons_ = {}
        return self

    def transform(self, X):
        check_is_fitted(self, "strategy_")
        out = []
        for item in X:
            if not isinstance(item, BenchmarkItem):
                raise ValueError(f"expected BenchmarkItem, got {type(item).__name__}")
            lexicon = self.lexicons_.get(item.language) if self.strategy_.uses_lexicon else None
            out.append(build_prompt(self.strategy_, item, lexicon).text)
        return out
