"""Single-operator batched mutation fuzzing with bandit-tuned operators and batch sizes."""

__version__ = "0.1.0"
