import argparse

from .model import BytePredictor
from .server import serve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ntpzip-bridge",
        description="Serve a byte-level LSTM over the external-predictor protocol.",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--train-steps", type=int, default=120,
                        help="training minibatches before serving")
    parser.add_argument("--hidden-size", type=int, default=64)
    args = parser.parse_args(argv)
    serve(BytePredictor(args.seed, args.train_steps, args.hidden_size))
    return 0
