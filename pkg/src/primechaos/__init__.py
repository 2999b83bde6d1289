"""Prime numbers read as an energy spectrum: sieving, unfolding, fluctuation
statistics and random-matrix reference curves."""

__version__ = "0.1.0"
