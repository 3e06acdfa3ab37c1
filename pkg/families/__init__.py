# This file makes the families directory a Python package
