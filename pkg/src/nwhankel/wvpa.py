"""Weighted visibly pushdown automata over a tagged alphabet.

Every base letter ``s`` carries three kinds of matrices at once: an
internal matrix (read as ``s``), one call matrix per stack symbol (read as
``<s``) and one return matrix per stack symbol (read as ``s>``).  Stack
symbols are the integers ``1..gamma``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError, NotWellMatched, UnknownLetter
from .nested_words import Kind, TaggedWord, check_alphabet


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Wvpa:
    n: int
    alphabet: tuple[str, ...]
    gamma: int
    alpha: np.ndarray
    eta: np.ndarray
    m_int: Mapping[str, np.ndarray]
    m_call: Mapping[tuple[str, int], np.ndarray]
    m_ret: Mapping[tuple[str, int], np.ndarray]
    _identity: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"state count must be a positive integer, got {self.n!r}")
        if not isinstance(self.gamma, (int, np.integer)) or self.gamma < 1:
            raise InputError(f"stack alphabet size must be a positive integer, got {self.gamma!r}")
        alphabet = check_alphabet(self.alphabet)
        n = int(self.n)
        set_ = object.__setattr__
        set_(self, "n", n)
        set_(self, "gamma", int(self.gamma))
        set_(self, "alphabet", alphabet)
        for name in ("alpha", "eta"):
            v = _frozen(getattr(self, name))
            if v.shape != (n,) or not np.all(np.isfinite(v)):
                raise InputError(f"{name} must be a finite vector of length {n}")
            set_(self, name, v)

        def matrices(table, keys, what):
            table = dict(table)
            if set(table) != set(keys):
                missing = sorted(set(keys) - set(table), key=str)
                extra = sorted(set(table) - set(keys), key=str)
                raise InputError(f"{what} matrices: missing {missing}, unexpected {extra}")
            out = {}
            for k in keys:
                m = _frozen(table[k])
                if m.shape != (n, n) or not np.all(np.isfinite(m)):
                    raise InputError(f"{what} matrix {k} must be a finite {n}x{n} matrix")
                out[k] = m
            return out

        stack_keys = [(s, g) for s in alphabet for g in range(1, self.gamma + 1)]
        set_(self, "m_int", matrices(self.m_int, list(alphabet), "internal"))
        set_(self, "m_call", matrices(self.m_call, stack_keys, "call"))
        set_(self, "m_ret", matrices(self.m_ret, stack_keys, "return"))
        set_(self, "_identity", _frozen(np.eye(n)))

    def nest(self, c: str, inner: np.ndarray, r: str) -> np.ndarray:
        """Matrix of ``<c u r>`` given the matrix of ``u``."""
        total = np.zeros((self.n, self.n))
        for g in range(1, self.gamma + 1):
            total += self.m_call[c, g] @ inner @ self.m_ret[r, g]
        return total

    def scan(self, w: TaggedWord) -> tuple[np.ndarray, int]:
        """Evaluate ``w`` left to right; also report the peak stack height."""
        current = self._identity
        stack = []
        peak = 0
        for pos, letter in enumerate(w, start=1):
            if letter.symbol not in self.m_int:
                raise UnknownLetter(letter.symbol)
            if letter.kind is Kind.INTERNAL:
                current = current @ self.m_int[letter.symbol]
            elif letter.kind is Kind.CALL:
                stack.append((current, letter.symbol, pos))
                peak = max(peak, len(stack))
                current = self._identity
            else:
                if not stack:
                    raise NotWellMatched(pos, "return without a pending call")
                saved, c, _ = stack.pop()
                current = saved @ self.nest(c, current, letter.symbol)
        if stack:
            raise NotWellMatched(stack[-1][2], "call never returned")
        return current, peak

    def word_matrix(self, w: TaggedWord) -> np.ndarray:
        return self.scan(w)[0]

    def behavior(self, w: TaggedWord) -> float:
        return float(self.alpha @ self.word_matrix(w) @ self.eta)

    __call__ = behavior

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alphabet": list(self.alphabet),
            "gamma": self.gamma,
            "alpha": self.alpha.tolist(),
            "eta": self.eta.tolist(),
            "m_int": {s: m.tolist() for s, m in self.m_int.items()},
            "m_call": {f"{s}/{g}": m.tolist() for (s, g), m in self.m_call.items()},
            "m_ret": {f"{s}/{g}": m.tolist() for (s, g), m in self.m_ret.items()},
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Wvpa":
        def stack_table(raw):
            out = {}
            for key, m in raw.items():
                s, sep, g = key.rpartition("/")
                if not sep or not g.isdigit():
                    raise InputError(f"stack-indexed key {key!r} must look like 'symbol/index'")
                out[s, int(g)] = m
            return out

        try:
            return cls(
                n=data["n"],
                alphabet=tuple(data["alphabet"]),
                gamma=data["gamma"],
                alpha=data["alpha"],
                eta=data["eta"],
                m_int=dict(data["m_int"]),
                m_call=stack_table(data["m_call"]),
                m_ret=stack_table(data["m_ret"]),
            )
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed automaton: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Wvpa":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"automaton file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError("automaton JSON must be an object")
        return cls.from_dict(data)


def word_matrix(a: Wvpa, w: TaggedWord) -> np.ndarray:
    return a.word_matrix(w)


def behavior(a: Wvpa, w: TaggedWord) -> float:
    return a.behavior(w)


def random_wvpa(n: int, alphabet: Sequence[str], gamma_size: int, seed: int) -> Wvpa:
    """Automaton with every weight drawn uniformly from [-1, 1]."""
    alphabet = check_alphabet(alphabet)
    if n < 1 or gamma_size < 1:
        raise InputError("n and gamma_size must be at least 1")
    rng = np.random.default_rng(seed)
    draw = lambda *shape: rng.uniform(-1.0, 1.0, size=shape)  # noqa: E731
    alpha = draw(n)
    eta = draw(n)
    m_int = {s: draw(n, n) for s in alphabet}
    keys = [(s, g) for s in alphabet for g in range(1, gamma_size + 1)]
    m_call = {k: draw(n, n) for k in keys}
    m_ret = {k: draw(n, n) for k in keys}
    return Wvpa(n, alphabet, gamma_size, alpha, eta, m_int, m_call, m_ret)


def paren_count_automaton(symbol: str = "a") -> Wvpa:
    """Two states; the behavior counts matched call/return pairs."""
    return Wvpa(
        n=2,
        alphabet=(symbol,),
        gamma=1,
        alpha=[1.0, 0.0],
        eta=[0.0, 1.0],
        m_int={symbol: np.eye(2)},
        m_call={(symbol, 1): [[1.0, 1.0], [0.0, 1.0]]},
        m_ret={(symbol, 1): np.eye(2)},
    )
