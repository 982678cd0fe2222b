"""Reference external-parser process speaking the line-JSON protocol.

Wraps the in-process surrogate so the child-process bridge can be
exercised end to end:

    python -m transpick.adapter_server

Reads one JSON request per stdin line, writes one JSON reply per stdout
line, exits on EOF or a "shutdown" command.
"""
from __future__ import annotations

import json
import sys

from .corpus import load_corpus
from .parsers import SurrogateParser


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    parser = SurrogateParser()
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        stop = False
        try:
            request = json.loads(line)
            cmd = request.get("cmd")
            if cmd == "train":
                corpus = load_corpus(
                    request["corpus_path"],
                    request["source_lang"],
                    request["target_lang"],
                )
                parser.train(corpus)
                result = {"pairs": len(corpus)}
            elif cmd == "predict":
                result = parser.predict(request["utterance"])
            elif cmd == "score":
                result = parser.score(request["utterance"], request["lf"])
            elif cmd == "evaluate":
                corpus = load_corpus(
                    request["corpus_path"],
                    request["source_lang"],
                    request["target_lang"],
                )
                result = parser.evaluate(corpus)
            elif cmd == "shutdown":
                result = "bye"
                stop = True
            else:
                raise ValueError(f"unknown command {cmd!r}")
            reply = {"ok": True, "result": result}
        except Exception as exc:  # protocol: report, do not crash
            reply = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()
        if stop:
            break


if __name__ == "__main__":
    serve()
