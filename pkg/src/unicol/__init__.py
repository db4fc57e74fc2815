"""Coleman integration on the projective line minus residue discs."""
__version__ = "0.1.0"
