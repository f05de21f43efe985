from __future__ import annotations

from hypothesis import settings

# exact big-integer examples (e.g. 81! powers) vary in cost; only the example count is bounded
settings.register_profile("stsrank", deadline=None, max_examples=60)
settings.load_profile("stsrank")
