"""Exploration strategies: which pending node to expand and with which actor."""

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence

from RFSMC.wakeup.tree import ExpHeads, ExplorationNode


class StrategyPolicy(str, Enum):
    DFS = "dfs"
    UNIFORM_DFS = "uniform-dfs"
    RFS_STEP = "rfs-step"
    RFS_BRANCH = "rfs-branch"


@dataclass(frozen=True)
class Strategy:
    policy: StrategyPolicy = StrategyPolicy.DFS
    seed: int = 0

    @classmethod
    def parse(cls, name: str, seed: int = 0) -> "Strategy":
        try:
            return cls(StrategyPolicy(name), seed)
        except ValueError:
            names = ", ".join(p.value for p in StrategyPolicy)
            raise ValueError(f"unknown strategy '{name}', expected one of {names}") from None

    @property
    def name(self) -> str:
        return self.policy.value


class StrategyRunner:
    """Per-run decisions of a strategy, driven by one seeded generator."""

    def __init__(self, strategy: Strategy):
        self.strategy = strategy
        self.policy = strategy.policy
        self.rng = random.Random(strategy.seed)
        self._branch: Optional[ExplorationNode] = None

    def pick_head(self, heads: ExpHeads) -> ExplorationNode:
        nodes = list(heads)
        if self.policy in (StrategyPolicy.DFS, StrategyPolicy.UNIFORM_DFS):
            # deepest first, newest among equally deep
            return max(nodes, key=lambda node: (node.depth, heads.stamp(node)))
        if self.policy is StrategyPolicy.RFS_BRANCH and self._branch is not None and self._branch in heads:
            return self._branch
        return self.rng.choice(nodes)

    def pick_child(self, admissible: Sequence[int]) -> int:
        if self.policy is StrategyPolicy.DFS:
            return min(admissible)
        return self.rng.choice(list(admissible))

    def pick_seed(self, candidates: Iterable[int]) -> int:
        ordered: List[int] = sorted(candidates)
        if self.policy is StrategyPolicy.DFS:
            return ordered[0]
        return self.rng.choice(ordered)

    def note_expanded(self, child: Optional[ExplorationNode]) -> None:
        """Track the branch rfs-branch keeps extending until it is maximal."""
        self._branch = child
