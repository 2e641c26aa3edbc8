from .base import Noisy, Policy, Portfolio, RandomPolicy, best_response, make_portfolio
from .hanabi_bots import HANABI_BOTS, HolmesBot, IggiBot, PiersBot, ValueBot
from .toy_bots import ConventionBot, overlap, shift_conventions

__all__ = [
    "ConventionBot",
    "HANABI_BOTS",
    "HolmesBot",
    "IggiBot",
    "Noisy",
    "PiersBot",
    "Policy",
    "Portfolio",
    "RandomPolicy",
    "ValueBot",
    "best_response",
    "make_portfolio",
    "overlap",
    "shift_conventions",
]
