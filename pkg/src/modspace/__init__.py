"""Sharp product, convolution and embedding relations on weighted modulation
and Wiener amalgam spaces, with empirical witnesses."""

__version__ = "0.1.0"
