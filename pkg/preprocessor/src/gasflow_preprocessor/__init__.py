"""Headline-to-CoNLL-U preprocessor with a bundled rule-based annotator."""

__version__ = "0.1.0"
