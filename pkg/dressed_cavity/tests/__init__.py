"""
Test configuration for pytest
"""

import sys
from pathlib import Path

# Make the package importable from a source checkout
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
