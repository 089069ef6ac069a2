"""I/O and plumbing: PNM images, manifests, model files, settings, synthetic data."""
