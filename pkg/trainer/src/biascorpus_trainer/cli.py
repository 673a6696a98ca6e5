"""Command line: train an artifact, then serve it over either transport."""

from __future__ import annotations

import argparse
import json
import sys

from biascorpus_trainer.config import TrainerConfig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="biascorpus-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fine-tune on toolkit split files")
    p_train.add_argument("--train", required=True)
    p_train.add_argument("--val", required=True)
    p_train.add_argument("--out", required=True, help="artifact directory")
    p_train.add_argument("--base-model", default="tiny-random")
    p_train.add_argument("--epochs", type=int)
    p_train.add_argument("--batch-size", type=int)
    p_train.add_argument("--learning-rate", type=float)
    p_train.add_argument("--dropout", type=float)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--max-length", type=int)

    p_serve = sub.add_parser("serve", help="speak the adapter protocol")
    p_serve.add_argument("--artifact", required=True)
    p_serve.add_argument("--http", action="store_true")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8500)

    args = parser.parse_args(argv)

    if args.command == "train":
        from biascorpus_trainer.train import train

        config = TrainerConfig(base_model=args.base_model, seed=args.seed)
        for field, attr in (
            ("epochs", "epochs"),
            ("batch_size", "batch_size"),
            ("learning_rate", "learning_rate"),
            ("dropout", "dropout"),
            ("max_length", "max_length"),
        ):
            value = getattr(args, attr)
            if value is not None:
                setattr(config, field, value)
        try:
            summary = train(args.train, args.val, config, args.out)
        except Exception as exc:
            if "out of memory" in str(exc).lower():
                print(
                    f"error: {exc}\nhint: reduce --batch-size (current {config.batch_size})",
                    file=sys.stderr,
                )
                return 1
            raise
        print(json.dumps(summary, sort_keys=True))
        return 0

    if args.command == "serve":
        from biascorpus_trainer.serve import serve_http, serve_stdio

        if args.http:
            serve_http(args.artifact, host=args.host, port=args.port)
            return 0
        return serve_stdio(args.artifact)

    return 2


if __name__ == "__main__":
    sys.exit(main())
