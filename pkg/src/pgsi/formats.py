"""Text formats: the PGSolver game grammar, a solution format, DOT export.

Games travel as one record per line, `<id> <priority> <owner> <succs>;`,
with an optional `parity <max-id>;` header and optional quoted node names.
An empty successor list is accepted as a sink extension (the classic format
requires totality) and reported in the parse result. External ids need not
be dense; they are compacted in record order and kept for re-emission.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .game import ParityGame, Strategy

_NAME_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')
_INT_RE = re.compile(r"\d+")


class _Scanner:
    """Single-line token walker that reports 1-based error columns."""

    def __init__(self, text: str, line_no: int):
        self.text = text
        self.line_no = line_no
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line_no, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_int(self, what: str) -> int:
        self.skip_ws()
        m = _INT_RE.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return int(m.group())

    def take_char(self, ch: str) -> None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise self.error(f"expected '{ch}'")
        self.pos += 1

    def take_word(self, word: str) -> None:
        self.skip_ws()
        if not self.text.startswith(word, self.pos):
            raise self.error(f"expected '{word}'")
        self.pos += len(word)

    def take_name(self) -> str:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a quoted name")
        self.pos = m.end()
        return m.group(1).replace('\\"', '"')


@dataclass
class ParsedGame:
    """Parse result: the dense game plus the external-id bookkeeping."""

    game: ParityGame
    start: int
    original_ids: list[int]
    sink_records: list[int] = field(default_factory=list)

    def __iter__(self):
        # Allows `game, start = parse_pgsolver(text)` at call sites.
        yield self.game
        yield self.start


def parse_pgsolver(text: str) -> ParsedGame:
    """Parse PGSolver game text; the start node is the first record's node.

    Raises ParseError with line and column on syntax errors, duplicate ids,
    bad owners, and successor ids that no record declares. Records with an
    empty successor list are sinks, accepted as an extension and listed in
    the result's sink_records by external id.
    """
    records: list[tuple[int, int, int, list[int], str | None]] = []
    positions: dict[int, tuple[int, _Scanner]] = {}
    succ_sites: list[tuple[int, int, int]] = []
    seen: dict[int, int] = {}
    sink_records: list[int] = []
    header_allowed = True

    for line_no, raw in enumerate(text.splitlines(), start=1):
        sc = _Scanner(raw, line_no)
        if sc.at_end():
            continue
        if header_allowed and sc.peek() == "p":
            sc.take_word("parity")
            sc.take_int("the maximal node id")
            sc.take_char(";")
            if not sc.at_end():
                raise sc.error("unexpected text after header")
            header_allowed = False
            continue
        header_allowed = False

        sc.skip_ws()
        ident_col = sc.pos + 1
        ident = sc.take_int("a node id")
        if ident in seen:
            raise ParseError(f"duplicate node id {ident}", line_no, ident_col)
        priority = sc.take_int("a priority")
        sc.skip_ws()
        owner_col = sc.pos + 1
        owner = sc.take_int("an owner")
        if owner not in (0, 1):
            raise ParseError(f"owner must be 0 or 1, got {owner}", line_no, owner_col)
        succs: list[int] = []
        if sc.peek() not in (";", '"'):
            while True:
                sc.skip_ws()
                succ_sites.append((line_no, sc.pos + 1, len(records)))
                succs.append(sc.take_int("a successor id"))
                if sc.peek() == ",":
                    sc.take_char(",")
                else:
                    break
        name = sc.take_name() if sc.peek() == '"' else None
        sc.take_char(";")
        if not sc.at_end():
            raise sc.error("unexpected text after record")
        if not succs:
            sink_records.append(ident)
        seen[ident] = len(records)
        records.append((ident, priority, owner, succs, name))

    if not records:
        return ParsedGame(ParityGame([], [], [], names=None), 0, [])

    dense = {ident: i for i, (ident, *_rest) in enumerate(records)}
    succ_iter = iter(succ_sites)
    succ_dense: list[list[int]] = []
    for _ident, _pr, _ow, succs, _name in records:
        row = []
        for s in succs:
            line_no, col, _owner_rec = next(succ_iter)
            if s not in dense:
                raise ParseError(f"successor id {s} is not declared", line_no, col)
            row.append(dense[s])
        succ_dense.append(row)

    names = [r[4] for r in records]
    game = ParityGame(
        owner=[r[2] for r in records],
        priority=[r[1] for r in records],
        succ=succ_dense,
        names=names if any(n is not None for n in names) else None,
    )
    return ParsedGame(game, 0, [r[0] for r in records], sink_records)


def _external_ids(game: ParityGame, original_ids: list[int] | None) -> list[int]:
    if original_ids is None:
        return list(range(game.n))
    if len(original_ids) != game.n:
        raise ValueError("original_ids length disagrees with the node count")
    return original_ids


def write_pgsolver(game: ParityGame, original_ids: list[int] | None = None) -> str:
    """Canonical game text: header, records ascending, LF endings."""
    ids = _external_ids(game, original_ids)
    out = [f"parity {max(ids) if ids else 0};"]
    for v in sorted(range(game.n), key=lambda v: ids[v]):
        succs = ",".join(str(ids[u]) for u in game.succ[v])
        name = game.names[v] if game.names is not None else None
        tail = "" if name is None else ' "{}"'.format(name.replace('"', '\\"'))
        out.append(f"{ids[v]} {game.priority[v]} {game.owner[v]} {succs}{tail};")
    return "\n".join(out) + "\n"


def solution_records(solution) -> list[tuple[int, int, int | None]]:
    """(node, winner, strategy target or None) per decided node, ascending.

    Accepts both solver result kinds: global results carry one strategy and
    one counter-strategy, local results carry one witness per player and
    leave undecided nodes out.
    """
    if hasattr(solution, "counter"):
        per_player = {
            solution.player: solution.strategy,
            1 - solution.player: solution.counter,
        }
    else:
        per_player = {0: solution.strategies[0], 1: solution.strategies[1]}
    rows: list[tuple[int, int, int | None]] = []
    for winner in (0, 1):
        for v in solution.regions[winner]:
            rows.append((v, winner, per_player[winner].get(v)))
    rows.sort()
    return rows


def write_solution(solution, original_ids: list[int] | None = None) -> str:
    """Solution text: `paritysol <max-id>;` then `<id> <winner> [<target>];`."""
    rows = solution_records(solution)
    ids = original_ids

    def ext(v: int) -> int:
        return ids[v] if ids is not None else v

    top = max((ext(v) for v, _w, _t in rows), default=0)
    out = [f"paritysol {top};"]
    for v, winner, target in rows:
        if target is None:
            out.append(f"{ext(v)} {winner};")
        else:
            out.append(f"{ext(v)} {winner} {ext(target)};")
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> dict[int, tuple[int, int | None]]:
    """Read solution text back: node -> (winner, strategy target or None)."""
    out: dict[int, tuple[int, int | None]] = {}
    header_allowed = True
    for line_no, raw in enumerate(text.splitlines(), start=1):
        sc = _Scanner(raw, line_no)
        if sc.at_end():
            continue
        if header_allowed and sc.peek() == "p":
            sc.take_word("paritysol")
            sc.take_int("the maximal node id")
            sc.take_char(";")
            header_allowed = False
            continue
        header_allowed = False
        sc.skip_ws()
        node_col = sc.pos + 1
        node = sc.take_int("a node id")
        if node in out:
            raise ParseError(f"duplicate node id {node}", line_no, node_col)
        sc.skip_ws()
        winner_col = sc.pos + 1
        winner = sc.take_int("a winner")
        if winner not in (0, 1):
            raise ParseError(f"winner must be 0 or 1, got {winner}", line_no, winner_col)
        target = sc.take_int("a strategy target") if sc.peek() != ";" else None
        sc.take_char(";")
        if not sc.at_end():
            raise sc.error("unexpected text after record")
        out[node] = (winner, target)
    return out


def write_dot(
    game: ParityGame,
    solution=None,
    original_ids: list[int] | None = None,
) -> str:
    """DOT text: boxes for player 0, diamonds for player 1, `id:priority`
    labels; with a solution, regions are colored and strategy edges bold."""
    ids = _external_ids(game, original_ids)
    regions: tuple[set[int], set[int]] = (set(), set())
    chosen: dict[int, int] = {}
    if solution is not None:
        regions = solution.regions
        for v, _winner, target in solution_records(solution):
            if target is not None:
                chosen[v] = target
    fill = {0: "lightskyblue", 1: "lightsalmon"}
    out = ["digraph parity {", "  rankdir=LR;"]
    for v in range(game.n):
        shape = "box" if game.owner[v] == 0 else "diamond"
        label = f"{ids[v]}:{game.priority[v]}"
        if game.names is not None and game.names[v] is not None:
            label += f"\\n{game.names[v]}"
        attrs = [f'label="{label}"', f"shape={shape}"]
        for player in (0, 1):
            if v in regions[player]:
                attrs.append("style=filled")
                attrs.append(f"fillcolor={fill[player]}")
        out.append(f"  n{ids[v]} [{', '.join(attrs)}];")
    for v in range(game.n):
        for u in game.succ[v]:
            style = " [style=bold, penwidth=2]" if chosen.get(v) == u else ""
            out.append(f"  n{ids[v]} -> n{ids[u]}{style};")
    out.append("}")
    return "\n".join(out) + "\n"
