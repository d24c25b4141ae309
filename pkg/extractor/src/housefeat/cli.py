"""The housefeat command: batch deep-feature extraction."""

import argparse
import sys

from . import core as ex


def build_parser():
    parser = argparse.ArgumentParser(
        prog="housefeat",
        description="Extract 1000-d deep feature vectors from house images.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("extract", help="run the backbone over a manifest")
    p.add_argument("--manifest", required=True,
                   help="CSV with header id,view,path")
    p.add_argument("--out", required=True, help="output deep-feature CSV")
    p.add_argument("--backbone", default=ex.DEFAULT_BACKBONE,
                   help="torchvision classification backbone name")
    p.add_argument("--weights", default=None,
                   help="local state-dict file for the backbone")
    p.add_argument("--batch-size", type=int, default=8)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        manifest = ex.read_manifest(args.manifest, args.backbone)
        n = ex.extract(manifest, args.out, weights_path=args.weights,
                       batch_size=args.batch_size)
    except (ex.ExtractError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {n} feature rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
