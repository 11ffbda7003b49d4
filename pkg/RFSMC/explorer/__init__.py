from RFSMC.explorer.explorer import FAULTY, Explorer, explore, transcript
from RFSMC.explorer.stats import Budget, ExplorationStats, ExploredTrace, Outcome, Verdict
from RFSMC.explorer.strategy import Strategy, StrategyPolicy

__all__ = [
    "Budget",
    "ExplorationStats",
    "ExploredTrace",
    "Explorer",
    "FAULTY",
    "Outcome",
    "Strategy",
    "StrategyPolicy",
    "Verdict",
    "explore",
    "transcript",
]
