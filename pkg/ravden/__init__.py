"""ravden: multi-stage raw video denoising toolkit."""

__version__ = "1.0.0"
