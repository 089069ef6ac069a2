"""hoginator: HOG + linear SVM detection for fixed 130x66 pedestrian windows."""

__version__ = "0.1.0"
