"""Advice oracles: built-in samplers and the external stdio protocol.

An oracle is any callable taking an :class:`OracleCall` and returning an
:class:`OracleResult` whose assignment is complete, feasible, and agrees
with every decided entry of ``call.partial``.

External protocol (one line per message, UTF-8, ``\\n`` terminated)::

    child -> parent   NFPT-ORACLE 1                          (once, on start)
    parent -> child   SOLVE <kind> <seed> <n> <state> <u v u v ...>
    child -> parent   <state over {0,1}, length n>   or   ERROR <message>
    parent -> child   QUIT

Fields are tab-separated; ``<state>`` uses ``?``, ``0`` and ``1``; the last
field lists edge endpoints pairwise and may be empty.
"""

from __future__ import annotations

import dataclasses
import queue
import shlex
import subprocess
import sys
import threading
from typing import Callable

import numpy as np

from .exact import brute_force
from .generators import make_rng
from .graph import (
    Graph,
    ProblemKind,
    as_assignment,
    extends,
    is_complete,
    is_feasible,
    partial_conflicts,
    state_string,
    undecided,
)
from .modulator import Modulator

PROTOCOL_HANDSHAKE = "NFPT-ORACLE 1"


class OracleError(RuntimeError):
    """Oracle failure; ``cause`` is one of handshake, protocol, timeout,
    incomplete, infeasible, extension, process, remote."""

    def __init__(self, cause: str, detail: str = ""):
        super().__init__(f"{cause}: {detail}" if detail else cause)
        self.cause = cause
        self.detail = detail


@dataclasses.dataclass(frozen=True)
class OracleCall:
    graph: Graph
    kind: ProblemKind
    partial: np.ndarray
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind.parse(self.kind))
        partial = as_assignment(self.partial, self.graph.n)
        partial.setflags(write=False)
        object.__setattr__(self, "partial", partial)

    @classmethod
    def fresh(cls, g: Graph, kind, seed: int) -> "OracleCall":
        return cls(g, kind, undecided(g.n), seed)


@dataclasses.dataclass(frozen=True)
class OracleResult:
    full: np.ndarray


Oracle = Callable[[OracleCall], OracleResult]


def validate_result(call: OracleCall, full) -> OracleResult:
    """Boundary check applied to every oracle reply."""
    try:
        full = as_assignment(full, call.graph.n)
    except ValueError as exc:
        raise OracleError("protocol", str(exc)) from None
    if not is_complete(full):
        raise OracleError("incomplete", "reply leaves vertices undecided")
    if not extends(full, call.partial):
        raise OracleError("extension", "reply overwrites decided vertices")
    if not is_feasible(call.graph, call.kind, full):
        raise OracleError("infeasible", f"reply is not a feasible {call.kind.value} solution")
    full.setflags(write=False)
    return OracleResult(full)


# -- built-in oracles -------------------------------------------------------


def _check_partial(call: OracleCall) -> None:
    bad = partial_conflicts(call.graph, call.kind, call.partial)
    if bad:
        raise ValueError(f"partial state already violates {call.kind.value} on edge {bad[0]}")


def oracle_random_greedy(call: OracleCall) -> OracleResult:
    """Randomized greedy completion of ``call.partial``.

    MIS: random order, add each vertex with no IN neighbour. MVC: complement
    of a random greedy independent set, then drop IN vertices whose
    neighbours are all IN. MAXCUT: random sides, then one pass of improving
    flips in random order. Only undecided vertices are ever touched.
    """
    _check_partial(call)
    g, kind = call.graph, call.kind
    rng = make_rng(call.seed)
    state = np.array(call.partial, dtype=np.int8)
    free = np.flatnonzero(state < 0)
    order = rng.permutation(free).tolist()
    adj = g.adj
    if kind is ProblemKind.MIS:
        for v in np.flatnonzero(state == 1).tolist():
            for w in adj[v]:
                if state[w] < 0:
                    state[w] = 0
        for v in order:
            if state[v] < 0:
                state[v] = 1
                for w in adj[v]:
                    if state[w] < 0:
                        state[w] = 0
    elif kind is ProblemKind.MVC:
        for v in np.flatnonzero(state == 0).tolist():
            for w in adj[v]:
                if state[w] < 0:
                    state[w] = 1
        for v in order:
            if state[v] < 0:
                state[v] = 0
                for w in adj[v]:
                    if state[w] < 0:
                        state[w] = 1
        for v in rng.permutation(free).tolist():
            if state[v] == 1 and all(state[w] == 1 for w in adj[v]):
                state[v] = 0
    else:
        state[free] = rng.integers(0, 2, size=free.size)
        for v in order:
            same = sum(1 for w in adj[v] if state[w] == state[v])
            if 2 * same > len(adj[v]):
                state[v] ^= 1
    return validate_result(call, state)


def oracle_perfect(call: OracleCall) -> OracleResult:
    """Exhaustive optimum among completions of the partial state (small graphs only)."""
    _check_partial(call)
    out = brute_force(call.graph, call.kind, call.partial)
    return validate_result(call, out.assignment)


BUILTIN_ORACLES: dict[str, Oracle] = {
    "random-greedy": oracle_random_greedy,
    "perfect": oracle_perfect,
}


def advice_from(result: "OracleResult | np.ndarray", mod: Modulator | frozenset[int]) -> dict[int, int]:
    full = result.full if isinstance(result, OracleResult) else np.asarray(result)
    vertices = mod.vertices if isinstance(mod, Modulator) else mod
    if not is_complete(full[list(vertices)] if vertices else np.zeros(0)):
        raise ValueError("advice requires decided states on the modulator")
    return {int(v): int(full[v]) for v in sorted(vertices)}


# -- external protocol ------------------------------------------------------


def encode_request(call: OracleCall) -> str:
    ends = " ".join(f"{u} {v}" for u, v in call.graph.edges)
    return "\t".join(["SOLVE", call.kind.value, str(int(call.seed)), str(call.graph.n), state_string(call.partial), ends])


def decode_request(line: str) -> OracleCall:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 6 or fields[0] != "SOLVE":
        raise ValueError(f"malformed request: {line[:60]!r}")
    _, kind, seed, n, state, ends = fields
    nums = [int(x) for x in ends.split()]
    if len(nums) % 2:
        raise ValueError("odd number of edge endpoints")
    g = Graph(int(n), zip(nums[0::2], nums[1::2]))
    return OracleCall(g, kind, as_assignment(state, g.n), int(seed))


class ExternalOracle:
    """Drive a child process speaking the line protocol; replies are validated."""

    def __init__(self, command, timeout: float = 30.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise OracleError("process", str(exc)) from None
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        hello = self._readline()
        if hello != PROTOCOL_HANDSHAKE:
            self.close()
            raise OracleError("handshake", f"expected {PROTOCOL_HANDSHAKE!r}, got {hello!r}")

    def _pump(self) -> None:
        for line in self.proc.stdout:
            self._lines.put(line.rstrip("\r\n"))
        self._lines.put(None)

    def _readline(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise OracleError("timeout", f"no reply within {self.timeout}s") from None
        if line is None:
            raise OracleError("process", "oracle closed its output")
        return line

    def __call__(self, call: OracleCall) -> OracleResult:
        if self.proc.poll() is not None:
            raise OracleError("process", f"oracle exited with code {self.proc.returncode}")
        try:
            self.proc.stdin.write(encode_request(call) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise OracleError("process", str(exc)) from None
        reply = self._readline().strip()
        if reply.startswith("ERROR"):
            raise OracleError("remote", reply[5:].strip())
        if len(reply) != call.graph.n or set(reply) - set("?01"):
            raise OracleError("protocol", f"reply is not a state string of length {call.graph.n}")
        return validate_result(call, as_assignment(reply, call.graph.n))

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.write("QUIT\n")
                self.proc.stdin.flush()
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def oracle_external(call: OracleCall, endpoint) -> OracleResult:
    """One-shot call to an external oracle command (or an open :class:`ExternalOracle`)."""
    if isinstance(endpoint, ExternalOracle):
        return endpoint(call)
    with ExternalOracle(endpoint) as ext:
        return ext(call)


def stub_command(mode: str = "greedy") -> list[str]:
    """Command line for the shipped stub oracle."""
    return [sys.executable, "-m", "nfpt.stub_oracle", "--mode", mode]


def make_oracle(spec: str, timeout: float = 30.0):
    """``random-greedy``, ``perfect``, ``stub[:mode]`` or ``cmd:<command line>``.

    Returns ``(oracle, close)``.
    """
    if spec in BUILTIN_ORACLES:
        return BUILTIN_ORACLES[spec], (lambda: None)
    if spec == "stub" or spec.startswith("stub:"):
        ext = ExternalOracle(stub_command(spec.partition(":")[2] or "greedy"), timeout)
        return ext, ext.close
    if spec.startswith("cmd:"):
        ext = ExternalOracle(spec[4:], timeout)
        return ext, ext.close
    raise ValueError(f"unknown oracle {spec!r}")


# -- conformance ------------------------------------------------------------


def _probe_graphs() -> list[Graph]:
    return [
        Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
        Graph(4, [(0, 1), (1, 2), (2, 3)]),
        Graph(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]),
    ]


def oracle_check(command, timeout: float = 10.0, negative: bool = True) -> list[tuple[str, bool, str]]:
    """Protocol conformance run; returns ``(check, passed, detail)`` rows.

    Positive checks run ``command`` through the handshake and a set of
    requests (fresh and partially decided, all three kinds). With
    ``negative`` the shipped stub is also started in its misbehaving modes
    and every bad reply must be rejected.
    """
    rows: list[tuple[str, bool, str]] = []
    try:
        ext = ExternalOracle(command, timeout)
    except OracleError as exc:
        return [("handshake", False, str(exc))]
    rows.append(("handshake", True, PROTOCOL_HANDSHAKE))
    try:
        for gi, g in enumerate(_probe_graphs()):
            for kind in ProblemKind:
                calls = [OracleCall.fresh(g, kind, 7 + gi)]
                seed_state = undecided(g.n)
                seed_state[0] = 1 if kind is not ProblemKind.MVC else 0
                if kind is ProblemKind.MVC:
                    seed_state[list(g.adj[0])] = 1
                calls.append(OracleCall(g, kind, seed_state, 11 + gi))
                for call in calls:
                    name = f"solve[{kind.value},g{gi},{state_string(call.partial)}]"
                    try:
                        res = ext(call)
                        rows.append((name, True, state_string(res.full)))
                    except OracleError as exc:
                        rows.append((name, False, str(exc)))
    finally:
        ext.close()
    if negative:
        for mode, expected in (("adjacent", "infeasible"), ("undecided", "incomplete"), ("garbage", "protocol")):
            name = f"reject[{mode}]"
            try:
                with ExternalOracle(stub_command(mode), timeout) as bad:
                    res = bad(OracleCall.fresh(_probe_graphs()[0], ProblemKind.MIS, 1))
                rows.append((name, False, f"accepted {state_string(res.full)}"))
            except OracleError as exc:
                rows.append((name, exc.cause == expected, str(exc)))
    return rows


def solve_with(oracle: Oracle, g: Graph, kind, seed: int, partial=None) -> np.ndarray:
    call = OracleCall(g, kind, undecided(g.n) if partial is None else partial, seed)
    return oracle(call).full
