import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

# property tests must replay identically run to run
settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")
