# -*- coding: utf-8 -*-
"""
HOG Human Detector: command-line launcher.
Usage: python hog_detector.py <extract|train|detect|eval|cycles|bench|synth> [flags]
"""
import sys

from hoginator.cli import main

if __name__ == "__main__":
    sys.exit(main())
