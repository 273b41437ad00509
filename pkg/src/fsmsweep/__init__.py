"""Monte Carlo workbench for balance-acceptance randomization designs."""

from __future__ import annotations

__version__ = "0.1.0"
