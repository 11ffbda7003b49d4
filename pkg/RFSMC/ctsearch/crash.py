"""Crash adaptation for explorations that must stay sound under Fail."""

from typing import Iterable, List

from RFSMC.wakeup.tree import ExplorationNode


def crash_adaptation(node: ExplorationNode, enabled: Iterable[int]) -> List[int]:
    """Schedule every other enabled actor at node after a child crashed.

    A crash cuts the execution short, so races that would have scheduled the
    remaining actors are never observed. Each enabled actor that is neither
    asleep, done nor already pending gets a single-step branch. Returns the
    actors added, in order.
    """
    existing = set(node.done) | set(node.sleep) | set(node.wut.height_one())
    added = [actor for actor in sorted(enabled) if actor not in existing]
    for actor in added:
        node.wut.add_branch((actor,))
    return added
