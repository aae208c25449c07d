"""Command-line interface: ``omnisal predict|metrics|bias|project``.

Errors are reported on stderr as a single ``ERROR:<code>:<message>`` line.
Exit codes: 0 ok, 2 usage, 3 data, 4 solver.
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import imio
from . import projection as proj
from .errors import DomainError, MapNotFoundError, SolverError
from .metrics import METRICS, equator_bias_profile, evaluate, load_fixations
from .pipeline import BiasProfile, PipelineConfig, predict_stages
from .saliency2d import BmsParams, make_backend
from .sphere_geom import Rotation3

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SOLVER = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, message)


PREDICT_DEFAULTS = {
    "erp_backend": "bms",
    "cmp_backend": "bms",
    "external_pattern": None,
    "bias": None,
    "w": 0.7,
    "raw_bias": False,
    "K": 10.0,
    "seeds": None,
    "lam": 1.0,
    "tol": 1e-6,
    "max_iter": None,
    "literal_data_term": False,
    "no_smooth": False,
    "face_size": None,
    "bms_delta": 8.0,
    "bms_opening": 5,
    "bms_dilation": 7,
    "bms_sigma": None,
    "dump_stages": None,
    "overlay": None,
    "opacity": 0.5,
    "eight_bit": False,
    "threads": None,
}

_TYPES = {"w": float, "K": float, "seeds": int, "lam": float, "tol": float, "max_iter": int,
          "face_size": int, "bms_delta": float, "bms_opening": int, "bms_dilation": int,
          "bms_sigma": float, "opacity": float, "threads": int}
_FLAGS = {"raw_bias", "literal_data_term", "no_smooth", "eight_bit"}


def read_config(path):
    """Flat ``key=value`` file; keys are long option names (dashes or underscores)."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(EXIT_USAGE, f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in PREDICT_DEFAULTS:
            raise CliError(EXIT_USAGE, f"{path}:{lineno}: unknown key {key!r}")
        if key in _FLAGS:
            out[key] = value.lower() in ("1", "true", "yes", "on")
        elif key in _TYPES:
            out[key] = _TYPES[key](value)
        else:
            out[key] = value
    return out


def build_parser():
    p = _Parser(prog="omnisal", description="Saliency prediction for 360-degree ERP images.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    pr = sub.add_parser("predict", help="predict a saliency map", argument_default=S)
    pr.add_argument("image")
    pr.add_argument("-o", "--output", required=True)
    pr.add_argument("--config", help="key=value defaults file")
    for branch in ("erp", "cmp"):
        pr.add_argument(f"--{branch}-backend", choices=["bms", "luminance", "external"])
    pr.add_argument("--external-pattern",
                    help="path template with {stem}, {branch}, {orientation} fields")
    pr.add_argument("--bias", help="latitude profile file (one value per row)")
    pr.add_argument("--w", type=float, help="weight of the predicted map against the prior")
    pr.add_argument("--raw-bias", action="store_true", help="blend without max-normalising")
    pr.add_argument("--K", type=float, help="seed density divisor: n = H*W/K")
    pr.add_argument("--seeds", type=int, help="explicit seed count, overrides --K")
    pr.add_argument("--lam", type=float, help="smoothness weight")
    pr.add_argument("--tol", type=float)
    pr.add_argument("--max-iter", type=int)
    pr.add_argument("--literal-data-term", action="store_true",
                    help="data term on every pixel with zero target off-seed")
    pr.add_argument("--no-smooth", action="store_true")
    pr.add_argument("--face-size", type=int)
    pr.add_argument("--bms-delta", type=float)
    pr.add_argument("--bms-opening", type=int)
    pr.add_argument("--bms-dilation", type=int)
    pr.add_argument("--bms-sigma", type=float)
    pr.add_argument("--dump-stages", metavar="DIR")
    pr.add_argument("--overlay", metavar="PATH")
    pr.add_argument("--opacity", type=float)
    pr.add_argument("--8bit", dest="eight_bit", action="store_true")
    pr.add_argument("--threads", type=int)

    me = sub.add_parser("metrics", help="score a predicted map")
    me.add_argument("pred")
    me.add_argument("--gt", help="ground-truth saliency map")
    me.add_argument("--fixations", help="text file of u,v fixations")
    me.add_argument("--metrics", default=",".join(METRICS))
    me.add_argument("--json", action="store_true")

    bi = sub.add_parser("bias", help="estimate a latitude prior from ground-truth maps")
    bi.add_argument("directory")
    bi.add_argument("-o", "--output", required=True)
    bi.add_argument("--height", type=int)

    pj = sub.add_parser("project", help="projection utilities")
    pj.add_argument("image")
    pj.add_argument("-o", "--output", required=True, help="output file or directory")
    mode = pj.add_mutually_exclusive_group(required=True)
    mode.add_argument("--faces", action="store_true", help="write the six cube faces")
    mode.add_argument("--yaw", type=float, help="yaw-shift the ERP image by degrees")
    mode.add_argument("--roundtrip", action="store_true",
                      help="report mean abs error of ERP -> faces -> ERP")
    mode.add_argument("--reproject", action="store_true",
                      help="treat IMAGE as a face-file prefix and rebuild the ERP image")
    pj.add_argument("--rotation", default="0,0,0")
    pj.add_argument("--face-size", type=int)
    return p


def _load_erp(path):
    try:
        img = imio.read_rgb(path)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_DATA, f"cannot read {path}: {exc}") from None
    H, W = img.shape[:2]
    if W != 2 * H or H % 2:
        raise CliError(EXIT_USAGE, f"{path} is {W}x{H}; ERP input needs width = 2 x height (even height)")
    return img


def _backend(name, opts, stem):
    if name == "external":
        pattern = opts["external_pattern"]
        if not pattern:
            raise CliError(EXIT_USAGE, "external backend needs --external-pattern")
        pattern = pattern.replace("{stem}", stem)
        return make_backend("external", pattern=pattern)
    if name == "bms":
        return make_backend("bms", params=BmsParams(opts["bms_delta"], opts["bms_opening"],
                                                    opts["bms_dilation"], opts["bms_sigma"]))
    return make_backend(name)


def cmd_predict(args):
    given = vars(args)
    opts = dict(PREDICT_DEFAULTS)
    if "config" in given:
        opts.update(read_config(given["config"]))
    opts.update({k: v for k, v in given.items() if k in PREDICT_DEFAULTS})

    img = _load_erp(args.image)
    stem = Path(args.image).stem
    cfg = PipelineConfig(
        erp_backend=_backend(opts["erp_backend"], opts, stem),
        cmp_backend=_backend(opts["cmp_backend"], opts, stem),
        w=opts["w"], raw_bias=opts["raw_bias"], smooth=not opts["no_smooth"], K=opts["K"],
        n_seeds=opts["seeds"], lam=opts["lam"], tol=opts["tol"], max_iter=opts["max_iter"],
        literal_data_term=opts["literal_data_term"], face_size=opts["face_size"],
        threads=opts["threads"])
    bias = BiasProfile.load(opts["bias"]) if opts["bias"] else None
    stages = predict_stages(img, cfg, bias)

    bits = 8 if opts["eight_bit"] else 16
    imio.write_map(args.output, stages["smoothed"], bits)
    if opts["dump_stages"]:
        d = Path(opts["dump_stages"])
        d.mkdir(parents=True, exist_ok=True)
        for name, m in stages.items():
            # branch maps are not max-normalised yet; store them scaled for viewing
            if name in ("erp", "cmp") and m.max() > 0:
                m = m / m.max()
            imio.write_map(d / f"{stem}_{name}.png", m, bits)
            np.save(d / f"{stem}_{name}.npy", stages[name])
    if opts["overlay"]:
        imio.write_rgb(opts["overlay"], imio.overlay(img, stages["smoothed"], opts["opacity"]))
    return EXIT_OK


def cmd_metrics(args):
    which = [m.strip() for m in args.metrics.split(",") if m.strip()]
    unknown = set(which) - set(METRICS)
    if unknown:
        raise CliError(EXIT_USAGE, f"unknown metrics: {', '.join(sorted(unknown))}")
    pred = _read_map(args.pred)
    gt = None
    fix = None
    if {"kld", "cc"} & set(which):
        if not args.gt:
            raise CliError(EXIT_DATA, "KLD/CC need --gt")
        gt = _read_map(args.gt)
    if {"nss", "auc_judd"} & set(which):
        if not args.fixations or not Path(args.fixations).is_file():
            raise CliError(EXIT_DATA, f"NSS/AUC need a fixation file, got {args.fixations!r}")
        fix = load_fixations(args.fixations, pred.shape)
    scores = evaluate(pred, gt, fix, which)
    if args.json:
        print(json.dumps(scores))
    else:
        for name, value in scores.items():
            label = "AUC_JUDD" if name == "auc_judd" else name.upper()
            print(f"{label}={value:.4f}")
    return EXIT_OK


def _read_map(path):
    try:
        return imio.load_map(path)
    except (OSError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise CliError(EXIT_DATA, f"cannot read {path}: {exc}") from None


def cmd_bias(args):
    d = Path(args.directory)
    if not d.is_dir():
        raise CliError(EXIT_DATA, f"{d} is not a directory")
    files = imio.list_maps(d)
    if not files:
        raise CliError(EXIT_DATA, f"no ground-truth maps in {d}")
    prof = equator_bias_profile([_read_map(f) for f in files], args.height)
    prof.save(args.output)
    print(f"rows={len(prof)} min={prof.values.min():.6g} max={prof.values.max():.6g}")
    return EXIT_OK


def cmd_project(args):
    r = Rotation3.parse(args.rotation)
    out = Path(args.output)
    if args.reproject:
        faces = {f: imio.read_rgb(f"{args.image}_{f}.png") for f in proj.FACES}
        F = faces["front"].shape[0]
        H = 2 * F
        imio.write_rgb(out, proj.faces_to_erp(faces, r, 2 * H, H))
        return EXIT_OK
    img = _load_erp(args.image)
    if args.yaw is not None:
        imio.write_rgb(out, proj.yaw_shift(img, args.yaw))
    elif args.faces:
        out.mkdir(parents=True, exist_ok=True)
        stem = Path(args.image).stem
        for face, raster in proj.extract_faces(img, r, args.face_size).items():
            imio.write_rgb(out / f"{stem}_{face}.png", raster)
    else:
        x = img.astype(np.float64) / 255.0
        H, W = x.shape[:2]
        back = proj.faces_to_erp(proj.extract_faces(x, r, args.face_size), r, W, H)
        print(f"ROUNDTRIP_MAE={np.abs(back - x).mean():.6f}")
    return EXIT_OK


COMMANDS = {"predict": cmd_predict, "metrics": cmd_metrics, "bias": cmd_bias,
            "project": cmd_project}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except SolverError as exc:
        code, msg = EXIT_SOLVER, str(exc)
    except (DomainError, MapNotFoundError) as exc:
        code, msg = EXIT_DATA, str(exc)
    except OSError as exc:
        code, msg = EXIT_DATA, str(exc)
    print(f"ERROR:{code}:{' '.join(msg.split())}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
