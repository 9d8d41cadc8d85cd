"""Lexical taxonomy store: synsets, hypernym edges, hierarchy queries.

The file format is JSON::

    { "synsets": [ { "id": str, "lemmas": [str], "hypernyms": [str] } ] }

Hypernym edges must form a DAG.  Depth is the minimum edge distance from
any root (a synset with no hypernyms).  A virtual super-root sits above
every root so that the lowest common ancestor is total even across
disconnected components; "lowest" means deepest, with lexicographic id
as the tie-break.

Converting a native WordNet database into this schema is an extension
point; the store itself stays a plain graph.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, TaxonomyError

# Above every real root; deliberately not a legal synset id.
VIRTUAL_ROOT = "<virtual-root>"


@dataclass(frozen=True)
class Synset:
    id: str
    lemmas: frozenset[str]
    hypernyms: frozenset[str]


@dataclass
class TaxonomyStore:
    synsets: dict[str, Synset]
    lemma_index: dict[str, list[str]]
    depth: dict[str, int]
    roots: list[str]
    children: dict[str, list[str]] = field(repr=False, default_factory=dict)
    _ancestors: dict[str, frozenset[str]] = field(repr=False, default_factory=dict)

    def all_lemmas(self) -> set[str]:
        out: set[str] = set()
        for syn in self.synsets.values():
            out |= syn.lemmas
        return out

    def ancestors(self, synset_id: str) -> frozenset[str]:
        """All ancestors of a synset including itself (hypernym closure)."""
        cached = self._ancestors.get(synset_id)
        if cached is not None:
            return cached
        if synset_id not in self.synsets:
            raise KeyError(synset_id)
        acc: set[str] = set()
        stack = [synset_id]
        while stack:
            cur = stack.pop()
            if cur in acc:
                continue
            acc.add(cur)
            stack.extend(self.synsets[cur].hypernyms)
        result = frozenset(acc)
        self._ancestors[synset_id] = result
        return result


def _find_cycle(synsets: dict[str, Synset]) -> list[str] | None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {sid: WHITE for sid in synsets}
    parent: dict[str, str] = {}
    for start in sorted(synsets):
        if color[start] != WHITE:
            continue
        stack = [(start, iter(sorted(synsets[start].hypernyms)))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GREY:
                    # Walk parents back to nxt for a readable witness.
                    cycle = [node]
                    cur = node
                    while cur != nxt:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    cycle.append(cycle[0])
                    return cycle
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    parent[nxt] = node
                    stack.append((nxt, iter(sorted(synsets[nxt].hypernyms))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return None


def build_taxonomy(synsets: dict[str, Synset]) -> TaxonomyStore:
    for sid, syn in synsets.items():
        for h in syn.hypernyms:
            if h not in synsets:
                raise TaxonomyError(f"synset {sid!r} references missing hypernym {h!r}")
    cycle = _find_cycle(synsets)
    if cycle is not None:
        raise TaxonomyError("hypernym cycle: " + " -> ".join(cycle))

    children: dict[str, list[str]] = {sid: [] for sid in synsets}
    for sid, syn in synsets.items():
        for h in syn.hypernyms:
            children[h].append(sid)
    for kids in children.values():
        kids.sort()

    roots = sorted(sid for sid, syn in synsets.items() if not syn.hypernyms)
    depth: dict[str, int] = {}
    queue: deque[str] = deque()
    for r in roots:
        depth[r] = 0
        queue.append(r)
    while queue:
        cur = queue.popleft()
        for kid in children[cur]:
            if kid not in depth:
                depth[kid] = depth[cur] + 1
                queue.append(kid)

    lemma_index: dict[str, list[str]] = {}
    for sid in sorted(synsets):
        for lemma in synsets[sid].lemmas:
            lemma_index.setdefault(lemma, []).append(sid)

    return TaxonomyStore(
        synsets=synsets,
        lemma_index=lemma_index,
        depth=depth,
        roots=roots,
        children=children,
    )


def load_taxonomy(path) -> TaxonomyStore:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", path=path)
    if not isinstance(doc, dict) or not isinstance(doc.get("synsets"), list):
        raise FormatError("expected an object with a 'synsets' array", path=path)
    synsets: dict[str, Synset] = {}
    for entry in doc["synsets"]:
        try:
            sid = entry["id"]
            syn = Synset(
                id=sid,
                lemmas=frozenset(entry["lemmas"]),
                hypernyms=frozenset(entry.get("hypernyms", [])),
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed synset entry: {exc}", path=path)
        if not sid or sid == VIRTUAL_ROOT:
            raise FormatError(f"illegal synset id {sid!r}", path=path)
        if not syn.lemmas:
            raise FormatError(f"synset {sid!r} has no lemmas", path=path)
        if sid in synsets:
            raise TaxonomyError(f"duplicate synset id {sid!r}")
        synsets[sid] = syn
    return build_taxonomy(synsets)


def senses_of(store: TaxonomyStore, token: str) -> list[str]:
    """Ids of every synset whose lemma set contains the token, ordered by id."""
    return list(store.lemma_index.get(token, []))


def lowest_common_ancestor(store: TaxonomyStore, a: str, b: str) -> str:
    """Deepest common ancestor of two synsets; ties break to the
    lexicographically smaller id.  VIRTUAL_ROOT when none is shared."""
    common = store.ancestors(a) & store.ancestors(b)
    if not common:
        return VIRTUAL_ROOT
    return min(common, key=lambda sid: (-store.depth[sid], sid))


def subtree_lemmas(store: TaxonomyStore, root: str) -> set[str]:
    """Union of lemmas over every synset reachable downward from root
    (root included).  The virtual root covers the whole taxonomy."""
    if root == VIRTUAL_ROOT:
        return store.all_lemmas()
    if root not in store.synsets:
        raise KeyError(root)
    out: set[str] = set()
    seen: set[str] = set()
    stack = [root]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        out |= store.synsets[cur].lemmas
        stack.extend(store.children[cur])
    return out
