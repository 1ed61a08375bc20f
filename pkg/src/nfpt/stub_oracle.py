"""Reference child process for the external oracle protocol.

``python -m nfpt.stub_oracle --mode MODE`` where MODE is

* ``greedy``    - answer with the built-in random greedy oracle (conformant)
* ``all-out``   - every undecided vertex set to 0 (conformant for MIS only)
* ``adjacent``  - an IN pair across the first edge (infeasible for MIS)
* ``undecided`` - echo the request state, leaving ``?`` entries
* ``garbage``   - reply with a line that is not a state string
* ``silent``    - handshake, then never answer
* ``no-hello``  - skip the handshake line
"""

import argparse
import sys
import time

import numpy as np

from nfpt.graph import state_string
from nfpt.oracles import PROTOCOL_HANDSHAKE, decode_request, oracle_random_greedy


def reply_for(mode: str, line: str) -> str:
    call = decode_request(line)
    if mode == "greedy":
        return state_string(oracle_random_greedy(call).full)
    if mode == "all-out":
        st = np.where(call.partial < 0, 0, call.partial)
        return state_string(st)
    if mode == "adjacent":
        st = np.zeros(call.graph.n, dtype=np.int8)
        if call.graph.edges:
            u, v = call.graph.edges[0]
            st[u] = st[v] = 1
        return state_string(st)
    if mode == "undecided":
        return state_string(call.partial)
    if mode == "garbage":
        return "hello there"
    raise ValueError(mode)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="nfpt.stub_oracle")
    ap.add_argument("--mode", default="greedy")
    args = ap.parse_args(argv)
    out = sys.stdout
    if args.mode != "no-hello":
        out.write(PROTOCOL_HANDSHAKE + "\n")
        out.flush()
    for line in sys.stdin:
        line = line.rstrip("\n")
        if not line:
            continue
        if line == "QUIT":
            break
        if args.mode == "silent":
            time.sleep(3600)
            continue
        try:
            reply = reply_for(args.mode if args.mode != "no-hello" else "greedy", line)
        except Exception as exc:  # report and keep serving
            reply = f"ERROR {type(exc).__name__}: {exc}"
        out.write(reply + "\n")
        out.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
