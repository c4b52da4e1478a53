"""Line-oriented text format for circuits.

One element per line, whitespace-separated tokens, ``#`` starts a comment::

    modes 3 probes 2
    source mode=0 probe0=2.8284271247461903+0i probe1=0+0i
    bs sys 0 1 r=0.6
    snapshot L1
    phase probe 0 phi=1.5707963267948966
    kerr sys=1,2 probe=0 eps_tau=0.3 eta_tau=0.0
    postselect mode=0 at=L3p

Complex literals are written ``a+bi`` (a bare real is accepted on input).
``postselect`` takes an optional ``at=LABEL`` naming the snapshot at which
detection statistics are evaluated (default: the fully evolved state), and
``kerr`` an optional ``branch_phase=``.  Unknown keywords are errors; every
diagnostic carries its line number.
"""

from __future__ import annotations

from .circuit import FINAL_STAGE, Circuit
from .elements import (
    PROBE,
    SYS,
    BeamSplitter,
    Element,
    KerrCoupling,
    PhaseShift,
    Snapshot,
)


class CircuitFormatError(ValueError):
    """Parse failure; carries the 1-based line number of the offence."""

    def __init__(self, line_no: int | None, message: str):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)


def parse_complex(token: str) -> complex:
    """Parse ``a+bi`` / ``a-bi`` / bare-real literals."""
    tok = token.strip()
    try:
        if not tok.endswith("i"):
            return complex(float(tok), 0.0)
        body = tok[:-1]
        # Split real/imaginary at the last sign that is not an exponent sign.
        for i in range(len(body) - 1, 0, -1):
            if body[i] in "+-" and body[i - 1] not in "eE":
                return complex(float(body[:i]), float(body[i:]))
        if body in ("", "+"):
            return 1j
        if body == "-":
            return -1j
        return complex(0.0, float(body))
    except ValueError:
        raise ValueError(f"malformed complex literal {token!r}") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 else "-"
    return f"{repr(z.real)}{sign}{repr(abs(z.imag))}i"


def _kv(token: str, key: str, line_no: int) -> str:
    if not token.startswith(key + "="):
        raise CircuitFormatError(line_no, f"expected {key}=..., got {token!r}")
    return token[len(key) + 1 :]


def _int_field(token: str, key: str, line_no: int) -> int:
    raw = _kv(token, key, line_no)
    try:
        return int(raw)
    except ValueError:
        raise CircuitFormatError(line_no, f"malformed integer in {token!r}") from None


def _float_field(token: str, key: str, line_no: int) -> float:
    raw = _kv(token, key, line_no)
    try:
        return float(raw)
    except ValueError:
        raise CircuitFormatError(line_no, f"malformed number in {token!r}") from None


def _complex_field(token: str, key: str, line_no: int) -> complex:
    raw = _kv(token, key, line_no)
    try:
        return parse_complex(raw)
    except ValueError as exc:
        raise CircuitFormatError(line_no, str(exc)) from None


def _check_sys_index(idx: int, m_modes: int, line_no: int) -> int:
    if not 0 <= idx < m_modes:
        raise CircuitFormatError(line_no, f"system mode {idx} outside declared range [0, {m_modes})")
    return idx


def _check_probe_index(idx: int, k_probes: int, line_no: int) -> int:
    if not 0 <= idx < k_probes:
        raise CircuitFormatError(line_no, f"probe mode {idx} outside declared range [0, {k_probes})")
    return idx


def parse_circuit(text: str) -> Circuit:
    """Parse the line format into a :class:`Circuit`.

    Raises :class:`CircuitFormatError` naming the line for: unknown
    keywords, malformed complex literals, indices outside the declared
    ranges, duplicate snapshot labels, and a missing source line.
    """
    m_modes: int | None = None
    k_probes: int | None = None
    source_mode: int | None = None
    source_probes: tuple[complex, ...] | None = None
    postselect_mode = 0
    detect_stage = FINAL_STAGE
    elements: list[Element] = []
    labels: set[str] = set()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]

        if keyword == "modes":
            if m_modes is not None:
                raise CircuitFormatError(line_no, "duplicate modes declaration")
            if len(tokens) != 4 or tokens[2] != "probes":
                raise CircuitFormatError(line_no, "expected: modes M probes K")
            try:
                m_modes, k_probes = int(tokens[1]), int(tokens[3])
            except ValueError:
                raise CircuitFormatError(line_no, "mode counts must be integers") from None
            if m_modes < 1 or k_probes < 0:
                raise CircuitFormatError(line_no, "mode counts out of range")
            continue

        if m_modes is None or k_probes is None:
            raise CircuitFormatError(line_no, f"{keyword!r} before the modes declaration")

        if keyword == "source":
            if source_probes is not None:
                raise CircuitFormatError(line_no, "duplicate source line")
            if len(tokens) != 2 + k_probes:
                raise CircuitFormatError(
                    line_no, f"source needs mode= and probe0=..probe{k_probes - 1}="
                )
            source_mode = _check_sys_index(
                _int_field(tokens[1], "mode", line_no), m_modes, line_no
            )
            source_probes = tuple(
                _complex_field(tokens[2 + k], f"probe{k}", line_no)
                for k in range(k_probes)
            )
        elif keyword == "bs":
            if len(tokens) != 5:
                raise CircuitFormatError(line_no, "expected: bs sys|probe A B r=R")
            target = tokens[1]
            if target not in (SYS, PROBE):
                raise CircuitFormatError(line_no, f"unknown beam-splitter target {target!r}")
            try:
                a, b = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise CircuitFormatError(line_no, "beam-splitter ports must be integers") from None
            if target == SYS:
                _check_sys_index(a, m_modes, line_no)
                _check_sys_index(b, m_modes, line_no)
            else:
                _check_probe_index(a, k_probes, line_no)
                _check_probe_index(b, k_probes, line_no)
            r = _float_field(tokens[4], "r", line_no)
            try:
                elements.append(BeamSplitter(target, a, b, r))
            except ValueError as exc:
                raise CircuitFormatError(line_no, str(exc)) from None
        elif keyword == "phase":
            if len(tokens) != 4:
                raise CircuitFormatError(line_no, "expected: phase sys|probe I phi=F")
            target = tokens[1]
            if target not in (SYS, PROBE):
                raise CircuitFormatError(line_no, f"unknown phase target {target!r}")
            try:
                idx = int(tokens[2])
            except ValueError:
                raise CircuitFormatError(line_no, "phase index must be an integer") from None
            if target == SYS:
                _check_sys_index(idx, m_modes, line_no)
            else:
                _check_probe_index(idx, k_probes, line_no)
            elements.append(PhaseShift(target, idx, _float_field(tokens[3], "phi", line_no)))
        elif keyword == "kerr":
            if len(tokens) not in (5, 6):
                raise CircuitFormatError(
                    line_no, "expected: kerr sys=I,J probe=P eps_tau=F eta_tau=F [branch_phase=F]"
                )
            raw_sys = _kv(tokens[1], "sys", line_no)
            try:
                sys_modes = frozenset(int(s) for s in raw_sys.split(","))
            except ValueError:
                raise CircuitFormatError(line_no, f"malformed mode list {raw_sys!r}") from None
            for m in sys_modes:
                _check_sys_index(m, m_modes, line_no)
            probe = _check_probe_index(
                _int_field(tokens[2], "probe", line_no), k_probes, line_no
            )
            eps = _float_field(tokens[3], "eps_tau", line_no)
            eta = _float_field(tokens[4], "eta_tau", line_no)
            bp = _float_field(tokens[5], "branch_phase", line_no) if len(tokens) == 6 else 0.0
            elements.append(KerrCoupling(sys_modes, probe, eps, eta, bp))
        elif keyword == "snapshot":
            if len(tokens) != 2:
                raise CircuitFormatError(line_no, "expected: snapshot LABEL")
            label = tokens[1]
            if label in labels:
                raise CircuitFormatError(line_no, f"duplicate snapshot label {label!r}")
            labels.add(label)
            elements.append(Snapshot(label))
        elif keyword == "postselect":
            if len(tokens) not in (2, 3):
                raise CircuitFormatError(line_no, "expected: postselect mode=I [at=LABEL]")
            postselect_mode = _check_sys_index(
                _int_field(tokens[1], "mode", line_no), m_modes, line_no
            )
            if len(tokens) == 3:
                detect_stage = _kv(tokens[2], "at", line_no)
        else:
            raise CircuitFormatError(line_no, f"unknown keyword {keyword!r}")

    if m_modes is None:
        raise CircuitFormatError(None, "empty circuit: no modes declaration")
    if source_probes is None or source_mode is None:
        raise CircuitFormatError(None, "missing source line")
    if detect_stage != FINAL_STAGE and detect_stage not in labels:
        raise CircuitFormatError(None, f"postselect at={detect_stage!r} names no snapshot")
    return Circuit(
        m_modes=m_modes,
        k_probes=k_probes,
        elements=tuple(elements),
        source_mode=source_mode,
        source_probes=source_probes,
        postselect_mode=postselect_mode,
        detect_stage=detect_stage,
    )


def serialize_circuit(circuit: Circuit) -> str:
    """Render a circuit in the line format; round-trips through ``parse_circuit``."""
    lines = [f"modes {circuit.m_modes} probes {circuit.k_probes}"]
    probes = " ".join(
        f"probe{k}={format_complex(p)}" for k, p in enumerate(circuit.source_probes)
    )
    lines.append(f"source mode={circuit.source_mode} {probes}".rstrip())
    for el in circuit.elements:
        if isinstance(el, BeamSplitter):
            lines.append(
                f"bs {el.target} {el.mode_a} {el.mode_b} r={repr(el.reflectivity)}"
            )
        elif isinstance(el, PhaseShift):
            lines.append(f"phase {el.target} {el.index} phi={repr(el.phi)}")
        elif isinstance(el, KerrCoupling):
            sys_modes = ",".join(str(m) for m in sorted(el.system_modes))
            line = (
                f"kerr sys={sys_modes} probe={el.probe_mode} "
                f"eps_tau={repr(el.eps_tau)} eta_tau={repr(el.eta_tau)}"
            )
            if el.inner_branch_phase != 0.0:
                line += f" branch_phase={repr(el.inner_branch_phase)}"
            lines.append(line)
        elif isinstance(el, Snapshot):
            lines.append(f"snapshot {el.label}")
        else:
            raise TypeError(f"cannot serialize {el!r}")
    ps = f"postselect mode={circuit.postselect_mode}"
    if circuit.detect_stage != FINAL_STAGE:
        ps += f" at={circuit.detect_stage}"
    lines.append(ps)
    return "\n".join(lines) + "\n"
