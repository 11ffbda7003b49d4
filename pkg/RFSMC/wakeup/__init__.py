from RFSMC.wakeup.tree import (
    ExpHeads,
    ExplorationNode,
    WakeupTree,
    WutNode,
    admissible_children,
    child_sleep,
    done_before,
    garbage_collect,
    render_tree,
    tree_insert,
    wut_extract,
)

__all__ = [
    "ExpHeads",
    "ExplorationNode",
    "WakeupTree",
    "WutNode",
    "admissible_children",
    "child_sleep",
    "done_before",
    "garbage_collect",
    "render_tree",
    "tree_insert",
    "wut_extract",
]
