#!/usr/bin/env python3
"""Run the acceptance criteria and show the one-line verdicts."""
import sys
from pathlib import Path

import pytest

root = Path(__file__).resolve().parent.parent
sys.exit(pytest.main([str(root / "tests" / "test_acceptance.py"), "-q", "-s", *sys.argv[1:]]))
