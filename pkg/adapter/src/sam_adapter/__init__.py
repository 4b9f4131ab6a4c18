"""Prediction-file bridge between pretrained extractive QA models and the
challenge-set evaluator."""

from .adapter import AdapterConfig, predict, read_challenge, run, write_predictions

__version__ = "0.1.0"
