"""Fine-tuning backend for the biascorpus adapter wire protocol."""

__version__ = "0.1.0"
