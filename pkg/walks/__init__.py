# Walk engines: lattice, master equation, trajectories, theory, analysis
__version__ = "1.0.0"
