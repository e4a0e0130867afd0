"""Text formats for instances, labelings, and multilabelings.

Instance file::

    labelcover 1
    sigma K
    na NA
    nb NB
    e A B T0 T1 ... T(K-1)      one line per edge, canonical order

Labeling file: one ``l SIDE INDEX SYMBOL`` line per vertex.
Multilabeling file: ``m SIDE INDEX S1,S2,...`` per vertex with a non-empty
set; vertices without a line carry the empty set. ``SIDE`` is ``a`` or ``b``.
Lines starting with ``#`` and blank lines are ignored everywhere.
"""

from __future__ import annotations

from .core import Instance, Labeling, Multilabeling, ValidationError, validate_instance

FORMAT_NAME = "labelcover"
FORMAT_VERSION = 1


class FormatError(ValidationError):
    pass


def _content_lines(text: str | bytes):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, stripped.split()


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError([f"non-integer token, line {lineno}"]) from None


def parse_instance(text: str | bytes) -> Instance:
    lines = list(_content_lines(text))
    header = [("labelcover", 1), ("sigma", 1), ("na", 1), ("nb", 1)]
    if len(lines) < len(header):
        raise FormatError(["truncated header"])
    values = []
    for (lineno, tokens), (key, arity) in zip(lines, header):
        if tokens[0] != key or len(tokens) != arity + 1:
            raise FormatError([f"expected '{key}' line, line {lineno}"])
        values.append(_ints(tokens[1:], lineno)[0])
    version, sigma, n_a, n_b = values
    if version != FORMAT_VERSION:
        raise FormatError([f"unsupported format version {version}, line {lines[0][0]}"])

    errors: list[str] = []
    edges = []
    seen: set[tuple[int, int]] = set()
    for lineno, tokens in lines[len(header):]:
        if tokens[0] != "e":
            errors.append(f"unknown record '{tokens[0]}', line {lineno}")
            continue
        nums = _ints(tokens[1:], lineno)
        if len(nums) != 2 + sigma:
            errors.append(f"table length != sigma, line {lineno}")
            continue
        a, b, table = nums[0], nums[1], nums[2:]
        if not 0 <= a < n_a:
            errors.append(f"a index out of range, line {lineno}")
        if not 0 <= b < n_b:
            errors.append(f"b index out of range, line {lineno}")
        if any(not 0 <= t < sigma for t in table):
            errors.append(f"table entry out of range, line {lineno}")
        if (a, b) in seen:
            errors.append(f"duplicate edge ({a}, {b}), line {lineno}")
        seen.add((a, b))
        edges.append((a, b, tuple(table)))
    if errors:
        raise FormatError(errors)
    return validate_instance({"n_a": n_a, "n_b": n_b, "sigma": sigma, "edges": edges})


def serialize_instance(inst: Instance) -> bytes:
    out = [
        f"{FORMAT_NAME} {FORMAT_VERSION}",
        f"sigma {inst.sigma}",
        f"na {inst.n_a}",
        f"nb {inst.n_b}",
    ]
    out.extend(" ".join(map(str, ("e", a, b, *table))) for a, b, table in inst.edges)
    return ("\n".join(out) + "\n").encode("utf-8")


def _side_index(tokens: list[str], lineno: int, n_a: int, n_b: int) -> tuple[str, int]:
    side = tokens[1]
    if side not in ("a", "b"):
        raise FormatError([f"side must be 'a' or 'b', line {lineno}"])
    index = _ints([tokens[2]], lineno)[0]
    if not 0 <= index < (n_a if side == "a" else n_b):
        raise FormatError([f"{side} index out of range, line {lineno}"])
    return side, index


def parse_labeling(text: str | bytes, inst: Instance) -> Labeling:
    labels = {"a": [None] * inst.n_a, "b": [None] * inst.n_b}
    for lineno, tokens in _content_lines(text):
        if tokens[0] != "l" or len(tokens) != 4:
            raise FormatError([f"expected 'l SIDE INDEX SYMBOL', line {lineno}"])
        side, index = _side_index(tokens, lineno, inst.n_a, inst.n_b)
        if labels[side][index] is not None:
            raise FormatError([f"vertex {side}{index} labeled twice, line {lineno}"])
        labels[side][index] = _ints([tokens[3]], lineno)[0]
    missing = [f"{s}{i}" for s in "ab" for i, x in enumerate(labels[s]) if x is None]
    if missing:
        raise FormatError([f"unlabeled vertices: {' '.join(missing)}"])
    phi = Labeling(labels["a"], labels["b"])
    phi.check(inst)
    return phi


def serialize_labeling(phi: Labeling) -> bytes:
    out = [f"l a {v} {s}" for v, s in enumerate(phi.labels_a)]
    out += [f"l b {v} {s}" for v, s in enumerate(phi.labels_b)]
    return ("\n".join(out) + "\n").encode("utf-8")


def parse_multilabeling(text: str | bytes, inst: Instance) -> Multilabeling:
    sets = {"a": [frozenset()] * inst.n_a, "b": [frozenset()] * inst.n_b}
    seen = set()
    for lineno, tokens in _content_lines(text):
        if tokens[0] != "m" or len(tokens) != 4:
            raise FormatError([f"expected 'm SIDE INDEX S1,S2,...', line {lineno}"])
        side, index = _side_index(tokens, lineno, inst.n_a, inst.n_b)
        if (side, index) in seen:
            raise FormatError([f"vertex {side}{index} listed twice, line {lineno}"])
        seen.add((side, index))
        sets[side][index] = frozenset(_ints(tokens[3].split(","), lineno))
    psi = Multilabeling(tuple(sets["a"]), tuple(sets["b"]))
    psi.check(inst)
    return psi


def serialize_multilabeling(psi: Multilabeling) -> bytes:
    out = []
    for side, sets in (("a", psi.sets_a), ("b", psi.sets_b)):
        for v, s in enumerate(sets):
            if s:
                out.append(f"m {side} {v} " + ",".join(map(str, sorted(s))))
    return ("\n".join(out) + "\n").encode("utf-8") if out else b""
