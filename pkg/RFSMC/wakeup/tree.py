"""Wakeup trees and the exploration tree T.

A wakeup tree is an ordered tree of actor ids; each root-to-leaf path is a
sequence that still has to be explored from its owning node. The exploration
tree T records explored paths: a node stores its done list (children in the
order they were explored), its sleep set and its pending wakeup tree.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from RFSMC.deps.happens_before import wi_contains
from RFSMC.shared.errors import ContractViolation, InternalError


@dataclass(eq=False)
class WutNode:
    actor: Optional[int]
    children: List["WutNode"] = field(default_factory=list)

    def leaves(self, prefix: Tuple[int, ...] = ()) -> Iterator[Tuple[int, ...]]:
        """Root-to-leaf label sequences of the subtree below this node."""
        for child in self.children:
            path = prefix + (child.actor,)
            if child.children:
                yield from child.leaves(path)
            else:
                yield path

    def size(self) -> int:
        return sum(1 + child.size() for child in self.children)


class WakeupTree:
    def __init__(self, root: Optional[WutNode] = None):
        self.root = root if root is not None else WutNode(None)

    def is_empty(self) -> bool:
        return not self.root.children

    def height_one(self) -> List[int]:
        return [child.actor for child in self.root.children]

    def leaves(self) -> List[Tuple[int, ...]]:
        return list(self.root.leaves())

    def size(self) -> int:
        return self.root.size()

    def seed(self, actor: int) -> None:
        if not self.is_empty():
            raise ContractViolation("seeding a non-empty wakeup tree")
        self.root.children.append(WutNode(actor))

    def add_branch(self, sequence: Sequence[int]) -> None:
        """Append sequence as a new rightmost branch without subsumption checks."""
        _append_chain(self.root, sequence)

    def insert(self, table, pcs: Sequence[int], v: Sequence[int]) -> bool:
        """Insert v unless an existing sequence already covers it.

        Descends into the leftmost child whose label is a weak initial of the
        remaining sequence. Reaching a leaf, or consuming v entirely, means v
        is covered. Otherwise the remainder becomes the rightmost branch.
        """
        node = self.root
        anchor = list(pcs)
        rest = list(v)
        if not rest:
            return False
        if not node.children:
            _append_chain(node, rest)
            return True
        while True:
            for child in node.children:
                if wi_contains(table, anchor, rest, child.actor):
                    if not child.children:
                        return False
                    if child.actor in rest:
                        rest.remove(child.actor)
                    anchor[child.actor] += 1
                    node = child
                    if not rest:
                        return False
                    break
            else:
                _append_chain(node, rest)
                return True

    def extract(self, actor: int) -> "WakeupTree":
        """Remove the height-one subtree labelled actor and return it re-rooted."""
        for position, child in enumerate(self.root.children):
            if child.actor == actor:
                del self.root.children[position]
                return WakeupTree(WutNode(None, child.children))
        raise ContractViolation(f"actor {actor} is not a height-one label of the wakeup tree")


def _append_chain(node: WutNode, sequence: Sequence[int]) -> None:
    for actor in sequence:
        child = WutNode(actor)
        node.children.append(child)
        node = child


@dataclass(eq=False)
class ExplorationNode:
    """A node of T, identified by its path from the initial state."""
    path: Tuple[int, ...]
    pcs: Tuple[int, ...]
    parent: Optional["ExplorationNode"] = None
    done: List[int] = field(default_factory=list)
    sleep: Set[int] = field(default_factory=set)
    wut: WakeupTree = field(default_factory=WakeupTree)
    children: Dict[int, "ExplorationNode"] = field(default_factory=dict)
    maximal: bool = False

    @property
    def actor(self) -> Optional[int]:
        return self.path[-1] if self.path else None

    @property
    def depth(self) -> int:
        return len(self.path)

    def child_pcs(self, actor: int) -> Tuple[int, ...]:
        return self.pcs[:actor] + (self.pcs[actor] + 1,) + self.pcs[actor + 1:]

    def leftmost_child(self) -> Optional["ExplorationNode"]:
        for actor in self.done:
            if actor in self.children:
                return self.children[actor]
        return None


def done_before(node: ExplorationNode, actor: int) -> List[int]:
    """Members of done(node) explored before actor."""
    if actor not in node.done:
        raise InternalError(f"actor {actor} was never explored from {node.path}")
    return node.done[: node.done.index(actor)]


def child_sleep(node: ExplorationNode, actor: int, table) -> Set[int]:
    """Sleep set of node.actor: sleeping or done actors independent with actor."""
    g = table.gid(actor, node.pcs[actor])
    mask = table.mask(g)
    result = set()
    for q in node.sleep.union(node.done):
        if q != actor and not (mask >> table.gid(q, node.pcs[q])) & 1:
            result.add(q)
    return result


def wut_extract(node: ExplorationNode, actor: int) -> WakeupTree:
    return node.wut.extract(actor)


def tree_insert(node: ExplorationNode, v: Sequence[int], table) -> Optional[ExplorationNode]:
    """Insert v below node, descending through explored children first.

    Returns the node whose wakeup tree received v, or None when v is
    already covered by an explored or pending sequence.
    """
    rest = list(v)
    while rest:
        for actor in node.done:
            if wi_contains(table, node.pcs, rest, actor):
                child = node.children.get(actor)
                if child is None:
                    raise InternalError(
                        f"insertion below {node.path} reached collected child {actor}",
                        metadata={"path": list(node.path), "actor": actor},
                    )
                if actor in rest:
                    rest.remove(actor)
                node = child
                break
        else:
            if node.maximal:
                return None
            return node if node.wut.insert(table, node.pcs, rest) else None
    return None


def admissible_children(node: ExplorationNode, table) -> List[int]:
    """Height-one labels that may be explored next, in wakeup-tree order.

    A child c is admissible when no leaf sequence under an earlier sibling
    has c as a weak initial. The leftmost child always is.
    """
    children = node.wut.root.children
    result = []
    for position, child in enumerate(children):
        blocked = False
        for earlier in children[:position]:
            for leaf in earlier.leaves((earlier.actor,)) if earlier.children else [(earlier.actor,)]:
                if wi_contains(table, node.pcs, leaf, child.actor):
                    blocked = True
                    break
            if blocked:
                break
        if not blocked:
            result.append(child.actor)
    return result


def is_leftmost(node: ExplorationNode) -> bool:
    """Whether every ancestor of node reaches it through its leftmost child."""
    while node.parent is not None:
        if node.parent.leftmost_child() is not node:
            return False
        node = node.parent
    return True


def garbage_collect(leaf: ExplorationNode, on_remove: Callable[[ExplorationNode], None]) -> int:
    """Remove the leftmost completed part of T, starting from leaf.

    Only the globally leftmost completed leaf is removed; then parents
    without children and with an empty wakeup tree follow, and so does the
    leftmost leaf of the parent's remaining subtree. Stops at a node with a
    non-empty wakeup tree. Done lists are left untouched.
    """
    if not is_leftmost(leaf):
        return 0
    removed = 0
    node: Optional[ExplorationNode] = leaf
    while node is not None and not node.children and node.wut.is_empty():
        parent = node.parent
        on_remove(node)
        removed += 1
        if parent is None:
            break
        del parent.children[node.actor]
        node = parent
        while node.children:
            node = node.leftmost_child()
    return removed


class ExpHeads:
    """Nodes of T with a non-empty wakeup tree, in insertion order."""

    def __init__(self):
        self._nodes: Dict[ExplorationNode, int] = {}
        self._stamp = 0

    def add(self, node: ExplorationNode) -> None:
        self._nodes.pop(node, None)
        self._stamp += 1
        self._nodes[node] = self._stamp

    def discard(self, node: ExplorationNode) -> None:
        self._nodes.pop(node, None)

    def stamp(self, node: ExplorationNode) -> int:
        return self._nodes[node]

    def __contains__(self, node: ExplorationNode) -> bool:
        return node in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __bool__(self) -> bool:
        return bool(self._nodes)

    def __iter__(self) -> Iterator[ExplorationNode]:
        return iter(list(self._nodes))


def render_tree(root: Optional[ExplorationNode], actor_names: Sequence[str]) -> str:
    """Deterministic indented dump of T with sleep sets and wakeup trees."""
    if root is None:
        return "(empty)"
    lines: List[str] = []

    def names(actors) -> str:
        return ",".join(actor_names[a] for a in actors)

    def wut_lines(wnode: WutNode, indent: str) -> None:
        for child in wnode.children:
            lines.append(f"{indent}~ {actor_names[child.actor]}")
            wut_lines(child, indent + "  ")

    def visit(node: ExplorationNode, indent: str) -> None:
        label = actor_names[node.actor] if node.actor is not None else "<root>"
        lines.append(f"{indent}{label} done=[{names(node.done)}] sleep=[{names(sorted(node.sleep))}]")
        wut_lines(node.wut.root, indent + "  ")
        for actor in node.done:
            child = node.children.get(actor)
            if child is not None:
                visit(child, indent + "  ")

    visit(root, "")
    return "\n".join(lines)
