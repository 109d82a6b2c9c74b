"""NAG Stability Lab - adversarial constructions and stability checks for accelerated methods."""

__version__ = "0.1.0"
