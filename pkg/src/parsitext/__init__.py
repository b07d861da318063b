"""Persian text normalization, tokenization and classical sentiment classification."""

__version__ = "0.1.0"
