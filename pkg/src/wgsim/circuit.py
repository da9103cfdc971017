"""Waveguide circuit netlists: data model, text format, and compilation.

A netlist is an ordered list of directional couplers and phase shifters on
``m`` waveguide modes. Element order is propagation order, so compilation
multiplies each element's block onto the left of the running product.

Text format (``.wgn``), one directive per line, ``#`` starts a comment::

    modes 6
    label 0 V_A
    dc 3 4 eta=0.5
    ps 4 phi=3.141592653589793

``modes`` must appear once, before any other directive.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import DomainError, ParseError
from .fock import ModeUnitary

SYMMETRIC = "symmetric"
REAL = "real"
CONVENTIONS = (SYMMETRIC, REAL)


def check_eta(eta: float, what: str = "eta") -> float:
    eta = float(eta)
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"{what} must lie in [0, 1], got {eta!r}")
    return eta


def coupler_unitary(eta: float, convention: str = SYMMETRIC) -> np.ndarray:
    """2x2 transfer matrix of a directional coupler with reflectivity ``eta``.

    ``eta`` is the probability of staying in the launch waveguide, so the
    coupling ratio is ``1 - eta``. The symmetric convention gives the
    cross-coupled amplitude a phase of ``i``; the real convention puts a
    sign flip on the second mode's through path instead.
    """
    eta = check_eta(eta)
    r, t = math.sqrt(eta), math.sqrt(1.0 - eta)
    if convention == SYMMETRIC:
        return np.array([[r, 1j * t], [1j * t, r]], dtype=complex)
    if convention == REAL:
        return np.array([[r, t], [t, -r]], dtype=complex)
    raise ValueError(f"unknown coupler convention {convention!r}")


@dataclass(frozen=True)
class CouplerSpec:
    mode_a: int
    mode_b: int
    eta: float

    def __post_init__(self):
        if self.mode_a == self.mode_b:
            raise DomainError(f"coupler joins mode {self.mode_a} to itself")
        if min(self.mode_a, self.mode_b) < 0:
            raise DomainError("mode indices must be non-negative")
        if abs(self.mode_a - self.mode_b) != 1:
            raise DomainError(f"coupler modes {self.mode_a}, {self.mode_b} are not adjacent waveguides")
        object.__setattr__(self, "eta", check_eta(self.eta))

    @property
    def modes(self) -> tuple[int, int]:
        return (self.mode_a, self.mode_b)


@dataclass(frozen=True)
class PhaseShifterSpec:
    mode: int
    phi: float

    def __post_init__(self):
        if self.mode < 0:
            raise DomainError("mode indices must be non-negative")
        if not math.isfinite(self.phi):
            raise DomainError(f"phase must be finite, got {self.phi!r}")
        object.__setattr__(self, "phi", float(self.phi))

    @property
    def modes(self) -> tuple[int]:
        return (self.mode,)


Element = Union[CouplerSpec, PhaseShifterSpec]


@dataclass(frozen=True)
class CircuitNetlist:
    mode_count: int
    elements: tuple[Element, ...] = ()
    labels: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode_count < 1:
            raise DomainError(f"a circuit needs at least one mode, got {self.mode_count}")
        elements = tuple(self.elements)
        for el in elements:
            if max(el.modes) >= self.mode_count:
                raise DomainError(f"{el} references a mode outside 0..{self.mode_count - 1}")
        for idx in self.labels:
            if not 0 <= idx < self.mode_count:
                raise DomainError(f"label on mode {idx} outside 0..{self.mode_count - 1}")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", dict(sorted(self.labels.items())))

    def mode(self, label: str) -> int:
        """Index of the mode carrying ``label``."""
        for idx, name in self.labels.items():
            if name == label:
                return idx
        raise KeyError(label)

    def then(self, other: "CircuitNetlist") -> "CircuitNetlist":
        """Concatenate: ``other``'s elements run after this netlist's."""
        if other.mode_count != self.mode_count:
            raise DomainError("cannot concatenate netlists with different mode counts")
        return CircuitNetlist(self.mode_count, self.elements + other.elements, {**self.labels, **other.labels})

    def __hash__(self):
        return hash((self.mode_count, self.elements, tuple(self.labels.items())))


@dataclass(frozen=True)
class ImperfectionSpec:
    """Fabrication offset added to every coupler reflectivity, then clamped to [0, 1]."""

    delta_eta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.delta_eta):
            raise DomainError("delta_eta must be finite")

    def apply(self, eta: float) -> float:
        return min(1.0, max(0.0, eta + self.delta_eta))


NOMINAL = ImperfectionSpec()


def element_matrix(el: Element, m: int, imperfections: ImperfectionSpec = NOMINAL,
                   convention: str = SYMMETRIC) -> np.ndarray:
    mat = np.eye(m, dtype=complex)
    if isinstance(el, CouplerSpec):
        eta = el.eta if imperfections.delta_eta == 0 else imperfections.apply(el.eta)
        idx = np.array(el.modes)
        mat[np.ix_(idx, idx)] = coupler_unitary(eta, convention)
    else:
        mat[el.mode, el.mode] = np.exp(1j * el.phi)
    return mat


def compile_netlist(netlist: CircuitNetlist, imperfections: ImperfectionSpec = NOMINAL,
                    convention: str = SYMMETRIC) -> ModeUnitary:
    """Mode unitary of the whole circuit, with ``delta_eta`` applied to each coupler."""
    m = netlist.mode_count
    total = np.eye(m, dtype=complex)
    for el in netlist.elements:
        total = element_matrix(el, m, imperfections, convention) @ total
    return ModeUnitary(total)


# ---------------------------------------------------------------------------
# text format

_FLOAT_RE = r"[-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?"
_INT_RE = r"[0-9]+"
_NAME_RE = r"[A-Za-z_][A-Za-z0-9_]*"


def _parse_int(tok: str, lineno: int) -> int:
    if not re.fullmatch(_INT_RE, tok):
        raise ParseError(f"expected a non-negative integer, got {tok!r}", lineno)
    return int(tok)


def _parse_kw(tok: str, key: str, lineno: int) -> float:
    prefix = key + "="
    if not tok.startswith(prefix):
        raise ParseError(f"expected {prefix}<float>, got {tok!r}", lineno)
    val = tok[len(prefix):]
    if not re.fullmatch(_FLOAT_RE, val):
        raise ParseError(f"malformed float {val!r}", lineno)
    out = float(val)
    if not math.isfinite(out):
        raise ParseError(f"non-finite value {val!r}", lineno)
    return out


def _check_mode(idx: int, m: int, lineno: int) -> int:
    if idx >= m:
        raise ParseError(f"mode index {idx} out of range for {m} modes", lineno)
    return idx


def parse_netlist(text: str) -> CircuitNetlist:
    """Parse ``.wgn`` text. Any malformed input raises :class:`ParseError`."""
    m = None
    labels: dict[int, str] = {}
    elements: list[Element] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        directive, args = toks[0], toks[1:]
        if directive == "modes":
            if m is not None:
                raise ParseError("duplicate 'modes' directive", lineno)
            if len(args) != 1:
                raise ParseError("usage: modes <m>", lineno)
            m = _parse_int(args[0], lineno)
            if m < 1:
                raise ParseError("mode count must be at least 1", lineno)
            continue
        if directive not in ("label", "dc", "ps"):
            raise ParseError(f"unknown directive {directive!r}", lineno)
        if m is None:
            raise ParseError(f"'{directive}' before 'modes'", lineno)
        if directive == "label":
            if len(args) != 2:
                raise ParseError("usage: label <index> <name>", lineno)
            idx = _check_mode(_parse_int(args[0], lineno), m, lineno)
            if not re.fullmatch(_NAME_RE, args[1]):
                raise ParseError(f"invalid label name {args[1]!r}", lineno)
            if idx in labels:
                raise ParseError(f"mode {idx} already labeled {labels[idx]!r}", lineno)
            if args[1] in labels.values():
                raise ParseError(f"label {args[1]!r} used twice", lineno)
            labels[idx] = args[1]
        elif directive == "dc":
            if len(args) != 3:
                raise ParseError("usage: dc <a> <b> eta=<float>", lineno)
            a = _check_mode(_parse_int(args[0], lineno), m, lineno)
            b = _check_mode(_parse_int(args[1], lineno), m, lineno)
            eta = _parse_kw(args[2], "eta", lineno)
            try:
                elements.append(CouplerSpec(a, b, eta))
            except DomainError as exc:
                raise ParseError(str(exc), lineno) from None
        else:
            if len(args) != 2:
                raise ParseError("usage: ps <mode> phi=<float>", lineno)
            mode = _check_mode(_parse_int(args[0], lineno), m, lineno)
            elements.append(PhaseShifterSpec(mode, _parse_kw(args[1], "phi", lineno)))
    if m is None:
        raise ParseError("missing 'modes' directive", max(1, len(text.splitlines())))
    return CircuitNetlist(m, tuple(elements), labels)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def serialize_netlist(netlist: CircuitNetlist) -> str:
    lines = [f"modes {netlist.mode_count}"]
    lines += [f"label {i} {name}" for i, name in netlist.labels.items()]
    for el in netlist.elements:
        if isinstance(el, CouplerSpec):
            lines.append(f"dc {el.mode_a} {el.mode_b} eta={_fmt(el.eta)}")
        else:
            lines.append(f"ps {el.mode} phi={_fmt(el.phi)}")
    return "\n".join(lines) + "\n"


def load_netlist(path) -> CircuitNetlist:
    with open(path, encoding="utf-8") as fh:
        return parse_netlist(fh.read())


# ---------------------------------------------------------------------------
# post-selected CNOT layout

CNOT_LABELS = {0: "V_A", 1: "C0", 2: "C1", 3: "T0", 4: "T1", 5: "V_B"}
V_A, C0, C1, T0, T1, V_B = range(6)


def _repair_phases(convention: str) -> tuple[list[Element], list[Element], list[Element]]:
    """Phase shifters (input screen, inside target MZI, output screen).

    With bare couplers the layout flips the target when the control is 0. A
    pi shift on T1 between the two target couplers fixes this for both
    conventions; the symmetric convention also leaves a factor i on the T1
    rail, removed by pi/2 screens on T1 at input and output.
    """
    inner = [PhaseShifterSpec(T1, math.pi)]
    if convention == REAL:
        return [], inner, []
    if convention == SYMMETRIC:
        return [PhaseShifterSpec(T1, math.pi / 2)], inner, [PhaseShifterSpec(T1, math.pi / 2)]
    raise ValueError(f"unknown coupler convention {convention!r}")


def cnot_netlist(eta_half: float = 0.5, eta_third: float = 1 / 3, convention: str = SYMMETRIC) -> CircuitNetlist:
    """Six-waveguide post-selected CNOT.

    Modes top to bottom are V_A, C0, C1, T0, T1, V_B. The target rails form
    a Mach-Zehnder of two ``eta_half`` couplers; in between, three
    ``eta_third`` couplers join V_A-C0, C1-T0 and T1-V_B. At (1/2, 1/3) the
    gate is exactly CNOT on coincidence detection, with success 1/9.
    """
    check_eta(eta_half, "eta_half")
    check_eta(eta_third, "eta_third")
    pre, inner, post = _repair_phases(convention)
    elements = [
        *pre,
        CouplerSpec(T0, T1, eta_half),
        *inner,
        CouplerSpec(V_A, C0, eta_third),
        CouplerSpec(C1, T0, eta_third),
        CouplerSpec(T1, V_B, eta_third),
        CouplerSpec(T0, T1, eta_half),
        *post,
    ]
    return CircuitNetlist(6, tuple(elements), CNOT_LABELS)


def hadamard_elements(mode_0: int, mode_1: int, eta: float = 0.5, convention: str = SYMMETRIC) -> list[Element]:
    """Coupler plus phases acting as ``|0> -> |0>+|1>, |1> -> |0>-|1>`` on a rail pair."""
    coupler = CouplerSpec(mode_0, mode_1, eta)
    if convention == REAL:
        return [coupler]
    if convention == SYMMETRIC:
        return [PhaseShifterSpec(mode_1, -math.pi / 2), coupler, PhaseShifterSpec(mode_1, -math.pi / 2)]
    raise ValueError(f"unknown coupler convention {convention!r}")


def cnot_with_hadamards(eta_half: float = 0.5, eta_third: float = 1 / 3, h_before: bool = False,
                        h_after: bool = False, convention: str = SYMMETRIC) -> CircuitNetlist:
    """CNOT with an optional Hadamard on the control qubit before and/or after.

    The Hadamard is an ``eta_half`` coupler between C0 and C1, so it carries
    the same fabrication offset as the gate's other "1/2" couplers.
    """
    gate = cnot_netlist(eta_half, eta_third, convention)
    h = hadamard_elements(C0, C1, eta_half, convention)
    elements = (h if h_before else []) + list(gate.elements) + (h if h_after else [])
    return CircuitNetlist(6, tuple(elements), CNOT_LABELS)


def mzi_netlist(eta: float = 0.5, phi: float = 0.0) -> CircuitNetlist:
    """Two-mode Mach-Zehnder: coupler, phase on mode 1, coupler."""
    return CircuitNetlist(2, (CouplerSpec(0, 1, eta), PhaseShifterSpec(1, phi), CouplerSpec(0, 1, eta)))


def coupler_netlist(eta: float = 0.5) -> CircuitNetlist:
    return CircuitNetlist(2, (CouplerSpec(0, 1, eta),))


BUILTIN_CIRCUITS = ("coupler", "mzi", "cnot", "cnot-h", "cnot-hh")


def builtin_netlist(name: str, eta_half: float = 0.5, eta_third: float | None = None) -> CircuitNetlist:
    """Named circuits. ``eta_third`` defaults to two thirds of ``eta_half``."""
    if eta_third is None:
        eta_third = 2 * eta_half / 3
    if name == "coupler":
        return coupler_netlist(eta_half)
    if name == "mzi":
        return mzi_netlist(eta_half)
    if name == "cnot":
        return cnot_netlist(eta_half, eta_third)
    if name == "cnot-h":
        return cnot_with_hadamards(eta_half, eta_third, h_before=True)
    if name == "cnot-hh":
        return cnot_with_hadamards(eta_half, eta_third, h_before=True, h_after=True)
    raise ValueError(f"unknown builtin circuit {name!r}; choose from {', '.join(BUILTIN_CIRCUITS)}")
