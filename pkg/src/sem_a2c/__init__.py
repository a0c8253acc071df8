"""Actor-critic agent with shared episodic memory on a randomized Taxi grid-world."""

__version__ = "0.1.0"
