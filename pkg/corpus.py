"""
Relation corpus: the stated explicit relations, read from relations/*.yaml.

The file schema is documented at the top of relations/rational.yaml. Each
entry becomes a function label -> WordCombination that match_paper_explicit
compares with the identities extracted from the series relations.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Tuple

import yaml

from engine.errors import ConfigError, EngineError
from engine.kernels import RationalFunction, gamma_coefficients
from engine.presentations import IDENTITY, RELATION_IDS, WordCombination, index_letter
from expression import BinOp, Neg, Node, Num, Pow, Sym, Call, Evaluator, parse

LETTER = re.compile(r"^\s*(e|f|h|hp|hm|hs)\[(.+)\]\s*$")
CONDITION = re.compile(r"^(.+?)(>=|<=|==|>|<)(.+)$")
RANGE = re.compile(r"^(.+)\.\.(.+)$")

KINDS = {"e": "e", "f": "f", "h": "h", "hp": "hPlus", "hm": "hMinus"}


# ==================== Index arithmetic ====================


def index_value(node: Node, env: Mapping[str, int]) -> int:
    """Integer value of an index expression such as m+s*a"""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Sym):
        if node.name not in env:
            raise KeyError(node.name)
        return env[node.name]
    if isinstance(node, Neg):
        return -index_value(node.operand, env)
    if isinstance(node, BinOp) and node.op in "+-*":
        a, b = index_value(node.left, env), index_value(node.right, env)
        return {"+": a + b, "-": a - b, "*": a * b}[node.op]
    raise ValueError("index expressions use integers, names, +, - and *")


def _substitute(node: Node, symbols: Mapping[str, Node]) -> Node:
    if isinstance(node, Sym):
        return _substitute(symbols[node.name], symbols) if node.name in symbols else node
    if isinstance(node, Neg):
        return Neg(_substitute(node.operand, symbols))
    if isinstance(node, BinOp):
        return BinOp(node.op, _substitute(node.left, symbols), _substitute(node.right, symbols))
    if isinstance(node, Pow):
        return Pow(_substitute(node.base, symbols), node.exponent)
    if isinstance(node, Call):
        return Call(node.name, tuple(_substitute(a, symbols) for a in node.args), node.options)
    return node


# ==================== Entries ====================


@dataclass
class Letter:
    token: str
    index: Node

    def resolve(self, level: str, sign: Optional[str], env: Mapping[str, int]):
        kind = KINDS.get(self.token)
        if self.token == "hs":
            kind = "hPlus" if sign != "-" else "hMinus"
        return index_letter(level, kind, index_value(self.index, env))


@dataclass
class Term:
    coefficient: Any
    letters: List[Letter]
    commutator: bool = False
    sums: List[Tuple[str, Node, Node]] = field(default_factory=list)
    gamma: Tuple[str, ...] = ()


@dataclass
class CorpusEntry:
    level: str
    relation: str
    statement: str
    labels: str
    cases: List[Tuple[Optional[Tuple[Node, str, Node]], List[Term]]]
    source: str

    def stated(self, label: Tuple) -> WordCombination:
        """The stated identity (lhs - rhs) at a label (n, m) or (sign, n, m)"""
        sign, (n, m) = (label[0], label[1:]) if isinstance(label[0], str) else (None, label)
        env = {"n": n, "m": m, "s": -1 if sign == "-" else 1}
        total = WordCombination.zero()
        for condition, terms in self.cases:
            if condition is not None and not _holds(condition, env):
                continue
            for term in terms:
                total = total + self._expand(term, sign, env)
        return total

    def _expand(self, term: Term, sign: Optional[str], env: Dict[str, int]) -> WordCombination:
        total = WordCombination.zero()
        for local in _sum_points(term.sums, env):
            coeff = term.coefficient
            if term.gamma:
                coeff = coeff * self._gamma(term.gamma, sign, local)
            letters = [letter.resolve(self.level, sign, local) for letter in term.letters]
            if any(letter is None for letter in letters):
                continue
            word = tuple(letter for letter in letters if letter is not IDENTITY)
            if term.commutator:
                x, y = (WordCombination.word((letter,)) if letter is not IDENTITY else WordCombination.scalar(1)
                        for letter in letters)
                total = total + WordCombination.commutator(x, y) * coeff
            else:
                total = total + WordCombination.word(word, coeff)
        return total

    def _gamma(self, names: Tuple[str, ...], sign: Optional[str], env: Mapping[str, int]):
        indices = [env[name] for name in names]
        table = gamma_coefficients(self.level, max(indices[0], 3))
        if self.level == "trig":
            return table.get(sign or "+", *indices)
        return table.get(*indices)


def _holds(condition: Tuple[Node, str, Node], env: Mapping[str, int]) -> bool:
    left, op, right = condition
    a, b = index_value(left, env), index_value(right, env)
    return {">": a > b, ">=": a >= b, "<": a < b, "<=": a <= b, "==": a == b}[op]


def _sum_points(sums: List[Tuple[str, Node, Node]], env: Dict[str, int]) -> Iterator[Dict[str, int]]:
    if not sums:
        yield dict(env)
        return
    (name, lo, hi), rest = sums[0], sums[1:]
    for value in range(index_value(lo, env), index_value(hi, env) + 1):
        yield from _sum_points(rest, {**env, name: value})


# ==================== Loading ====================


class RelationCorpus:
    """Stated explicit relations keyed by (level, relation)"""

    def __init__(self, relations_dir: str = "relations"):
        self.relations_dir = Path(relations_dir)
        self.entries: Dict[Tuple[str, str], CorpusEntry] = {}
        self._loaded = False

    def load(self) -> "RelationCorpus":
        if self._loaded:
            return self
        if not self.relations_dir.is_dir():
            raise ConfigError(f"relation corpus directory {self.relations_dir} not found")
        for path in sorted(self.relations_dir.glob("*.yaml")):
            for entry in self._load_file(path):
                self.entries[(entry.level, entry.relation)] = entry
        self._loaded = True
        return self

    def _load_file(self, path: Path) -> List[CorpusEntry]:
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: {e}") from e
        if not isinstance(data, dict) or "level" not in data or not isinstance(data.get("relations"), dict):
            raise ConfigError(f"{path}: expected a mapping with 'level' and 'relations'")

        try:
            symbols = {name: parse(str(text)) for name, text in (data.get("symbols") or {}).items()}
            entries = []
            for relation, raw in data["relations"].items():
                if relation not in RELATION_IDS:
                    raise ConfigError(f"{path}: unknown relation '{relation}'")
                entries.append(self._entry(path, data["level"], relation, raw, symbols))
            return entries
        except ConfigError:
            raise
        except (EngineError, KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"{path}: {e}") from e

    def _entry(self, path: Path, level: str, relation: str, raw: Dict, symbols: Dict[str, Node]) -> CorpusEntry:
        if "cases" in raw:
            cases = [(_condition(case["when"]), [_term(t, symbols) for t in case["terms"]]) for case in raw["cases"]]
        else:
            cases = [(None, [_term(t, symbols) for t in raw["terms"]])]
        return CorpusEntry(level, relation, raw.get("statement", ""), raw.get("labels", ""), cases, str(path))

    def get(self, level: str, relation: str) -> CorpusEntry:
        self.load()
        if (level, relation) not in self.entries:
            raise ConfigError(f"no stated form of {level}/{relation} in {self.relations_dir}")
        return self.entries[(level, relation)]

    def stated(self, level: str, relation: str) -> Callable[[Tuple], WordCombination]:
        return self.get(level, relation).stated

    def rows(self) -> List[Dict[str, str]]:
        self.load()
        return [
            {"level": e.level, "relation": e.relation, "labels": e.labels, "statement": e.statement, "source": e.source}
            for _, e in sorted(self.entries.items())
        ]


def _letter(text: str) -> Letter:
    match = LETTER.match(text)
    if not match:
        raise ValueError(f"'{text}' is not a letter such as e[n+1]")
    return Letter(match.group(1), parse(match.group(2)))


def _condition(text: str) -> Tuple[Node, str, Node]:
    match = CONDITION.match(text.replace(" ", ""))
    if not match:
        raise ValueError(f"'{text}' is not a comparison")
    return parse(match.group(1)), match.group(2), parse(match.group(3))


def _coefficient(text: str, symbols: Mapping[str, Node]):
    value = Evaluator().evaluate(_substitute(parse(str(text)), symbols))
    if isinstance(value, RationalFunction):
        return value.reduced()
    return value


def _term(raw: Dict, symbols: Mapping[str, Node]) -> Term:
    if "commutator" in raw:
        letters, commutator = [_letter(x) for x in raw["commutator"]], True
        if len(letters) != 2:
            raise ValueError("a commutator has two letters")
    elif "word" in raw:
        letters, commutator = [_letter(x) for x in raw["word"]], False
    else:
        raise ValueError("a term needs 'word' or 'commutator'")
    sums = []
    for name, bounds in (raw.get("sum") or {}).items():
        match = RANGE.match(str(bounds).replace(" ", ""))
        if not match:
            raise ValueError(f"sum bound '{bounds}' is not lo..hi")
        sums.append((name, parse(match.group(1)), parse(match.group(2))))
    gamma = tuple(g.strip() for g in str(raw["gamma"]).split(",")) if "gamma" in raw else ()
    return Term(_coefficient(raw.get("coefficient", "1"), symbols), letters, commutator, sums, gamma)
