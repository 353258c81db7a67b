"""Toolkit for LL(k) linear conjunctive grammars.

Subpackages and modules:

* :mod:`llconj.grammar` - data model, text format, structural checks.
* :mod:`llconj.oracle` - brute-force recognizer / tree builder (ground truth).
* :mod:`llconj.table` - lookahead tables: inference, validation, persistence.
* :mod:`llconj.transforms` - lookahead-reduction pipeline down to aligned LL(1).
* :mod:`llconj.parser` - linear-time stack-set recognizer with logspace-style
  length-only tails.
* :mod:`llconj.cli` - command-line front end (``llconj``).
"""

__version__ = "0.1.0"
