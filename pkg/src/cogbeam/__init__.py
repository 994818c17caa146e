"""Learning-based cognitive beamforming: EIC estimation, null-space CR design and the learning-throughput tradeoff."""

__version__ = "0.1.0"
