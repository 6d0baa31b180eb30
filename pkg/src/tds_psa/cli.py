"""Command line entry point ``tds-psa``.

Exit codes: 0 success, 2 bad input / predictor or root failure,
3 corrector failure.
"""

from __future__ import annotations

import argparse
import logging
import sys as _sys
from typing import Optional, Sequence

from . import grid, io
from .discretization import default_Na
from .errors import CorrectorError, DocumentError, PsaError, SystemValidationError
from .pipeline import pseudospectral_abscissa
from .roots import characteristic_roots, rightmost_roots

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PREDICTOR = 2
EXIT_CORRECTOR = 3

log = logging.getLogger("tds_psa")


class StageError(Exception):
    def __init__(self, stage, message, code):
        super().__init__(f"{stage}: {message}")
        self.code = code


def _read(path: str) -> str:
    if path == "-":
        return _sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        _sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load(path: str) -> io.SystemDocument:
    try:
        return io.parse_system(_read(path))
    except OSError as exc:
        raise StageError("input", str(exc), EXIT_INPUT) from exc
    except DocumentError as exc:
        raise StageError("input", str(exc), EXIT_INPUT) from exc


def cmd_abscissa(input_path: str, epsilon: Optional[float] = None, N: int = 6,
                 tol: float = 0.05, output_path: Optional[str] = None,
                 tol_im: Optional[float] = None, Na: Optional[int] = None) -> dict:
    doc = _load(input_path)
    try:
        system = doc.system()
        spec = doc.spec(epsilon)
    except (DocumentError, SystemValidationError) as exc:
        raise StageError("input", str(exc), EXIT_INPUT) from exc
    Na = Na or default_Na(N)
    try:
        alpha0 = rightmost_roots(system, Na).alpha0
    except PsaError as exc:
        raise StageError("spectral abscissa", str(exc), EXIT_PREDICTOR) from exc
    try:
        res = pseudospectral_abscissa(system, spec, N=N, tol=tol, tol_im=tol_im, Na=Na,
                                      alpha0=alpha0)
    except CorrectorError as exc:
        raise StageError("corrector", str(exc), EXIT_CORRECTOR) from exc
    except PsaError as exc:
        raise StageError("predictor", str(exc), EXIT_PREDICTOR) from exc
    settings = {"N": N, "tol": tol, "tol_im": res.predictor.tol_im, "Na": Na,
                "epsilon": spec.epsilon, "weights": list(spec.weights), "seed": None}
    out = io.result_document(res, settings)
    _write(output_path, io.dump_document(out))
    return out


def cmd_roots(input_path: str, cutoff: Optional[float] = None,
              output_path: Optional[str] = None, Na: Optional[int] = None) -> dict:
    doc = _load(input_path)
    try:
        system = doc.system()
    except SystemValidationError as exc:
        raise StageError("input", str(exc), EXIT_INPUT) from exc
    try:
        if cutoff is None and Na is None:
            rs = rightmost_roots(system)
        else:
            rs = characteristic_roots(system, Na or 16, cutoff)
    except PsaError as exc:
        raise StageError("roots", str(exc), EXIT_PREDICTOR) from exc
    out = io.roots_document(rs, cutoff)
    _write(output_path, io.dump_document(out))
    return out


def cmd_contour(input_path: str, re_range, im_range, nx: int, ny: int, fmt: str = "csv",
                output_path: Optional[str] = None, epsilon: Optional[float] = None,
                overlay: bool = False, N: int = 6, tol: float = 0.05) -> grid.GridSample:
    doc = _load(input_path)
    try:
        system = doc.system()
        spec = doc.spec(epsilon)
        sample = grid.sample_grid(system, spec, re_range, im_range, nx, ny)
    except (DocumentError, SystemValidationError, ValueError) as exc:
        raise StageError("input", str(exc), EXIT_INPUT) from exc
    if overlay:
        try:
            rs = rightmost_roots(system)
            res = pseudospectral_abscissa(system, spec, N=N, tol=tol, alpha0=rs.alpha0)
        except CorrectorError as exc:
            raise StageError("corrector", str(exc), EXIT_CORRECTOR) from exc
        except PsaError as exc:
            raise StageError("predictor", str(exc), EXIT_PREDICTOR) from exc
        sample.overlay = {
            "roots": [[z.real, z.imag] for z in rs.roots],
            "trace": [[s, bool(ok)] for s, ok in res.predictor.trace],
            "alpha_epsilon": res.alpha_epsilon,
            "omega_epsilon": res.omega_epsilon,
        }
    if fmt == "csv":
        text = grid.to_csv(sample)
    elif fmt == "json":
        text = grid.to_json(sample)
    else:
        raise StageError("input", f"unknown format {fmt!r}", EXIT_INPUT)
    _write(output_path, text)
    return sample


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tds-psa",
        description="Pseudospectral abscissa of retarded time-delay systems.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("abscissa", help="predictor-corrector pseudospectral abscissa")
    a.add_argument("input", help="system document, '-' for stdin")
    a.add_argument("--epsilon", type=float)
    a.add_argument("--N", type=int, default=6, help="mesh parameter (2N+1 points)")
    a.add_argument("--tol", type=float, default=0.05, help="bisection tolerance")
    a.add_argument("--tol-im", type=float, help="imaginary-axis detection tolerance")
    a.add_argument("--Na", type=int, help="generator size for the spectral abscissa")
    a.add_argument("--output", "-o")

    r = sub.add_parser("roots", help="rightmost characteristic roots")
    r.add_argument("input")
    r.add_argument("--cutoff", type=float, help="report roots with Re >= cutoff")
    r.add_argument("--Na", type=int)
    r.add_argument("--output", "-o")

    c = sub.add_parser("contour", help="log10 f on a rectangular grid")
    c.add_argument("input")
    c.add_argument("--re-range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    c.add_argument("--im-range", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    c.add_argument("--nx", type=int, default=100)
    c.add_argument("--ny", type=int, default=100)
    c.add_argument("--format", choices=("json", "csv"), default="csv")
    c.add_argument("--epsilon", type=float)
    c.add_argument("--overlay", action="store_true",
                   help="add roots, predictor trace and corrected point (json only)")
    c.add_argument("--N", type=int, default=6)
    c.add_argument("--tol", type=float, default=0.05)
    c.add_argument("--output", "-o")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "abscissa":
            cmd_abscissa(args.input, args.epsilon, args.N, args.tol, args.output,
                         args.tol_im, args.Na)
        elif args.command == "roots":
            cmd_roots(args.input, args.cutoff, args.output, args.Na)
        else:
            cmd_contour(args.input, args.re_range, args.im_range, args.nx, args.ny,
                        args.format, args.output, args.epsilon, args.overlay,
                        args.N, args.tol)
    except StageError as exc:
        print(f"tds-psa: {exc}", file=_sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
