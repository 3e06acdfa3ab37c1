# This file makes the engine directory a Python package
