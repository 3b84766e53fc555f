"""Command-line surface: factorize, norms, budget, estimate, supermolecular,
verify, convert-fcidump.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import archive as ar
from .active import renormalize_electrostatic, renormalize_exchange, renormalize_vp
from .costing import (
    CalibrationConstants,
    SystemParams,
    budget_errors,
    emit_callgraph,
    estimate_observable,
    estimate_supermolecular,
    summary_tsv,
)
from .errors import DomainError, SaptError
from .factorize import factorize_coefficients
from .norms import (
    df_hamiltonian_norm,
    factorize_monomer_hamiltonian,
    format_table,
    sparse_norms,
    tf_norm,
)
from .tensors import build_majorana_coefficients

OBSERVABLES = ("V", "P", "VPs")


@dataclass(frozen=True)
class RunConfig:
    """Run-wide options shared by the costing subcommands."""

    eps_targ: float = 0.0016  # chemical accuracy
    truncation: float = 0.0
    observables: tuple[str, ...] = OBSERVABLES
    output_dir: Path | None = None
    calibration: CalibrationConstants = CalibrationConstants()

    def __post_init__(self):
        if self.eps_targ <= 0:
            raise DomainError("target precision must be positive")


def _coefficient_sets(archive: ar.TensorArchive, use_partition: bool):
    if use_partition:
        part = archive.partition()
        return {
            "V": renormalize_electrostatic(archive.v, part),
            "P": renormalize_exchange(archive.S, part),
            "VPs": renormalize_vp(archive.v, archive.S, part),
        }
    return build_majorana_coefficients(archive.v, archive.S)


def _has_partition(archive: ar.TensorArchive) -> bool:
    return "partition_A_core" in archive.arrays or "partition_B_core" in archive.arrays


def _load(path: str) -> ar.TensorArchive:
    return ar.load_archive(path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_factorize(args) -> int:
    archive = _load(args.archive)
    coeffs = _coefficient_sets(archive, _has_partition(archive))
    out_prefix = Path(args.output or Path(args.archive).with_suffix(""))
    for name in args.observables:
        fop = factorize_coefficients(coeffs[name], threshold=args.truncation)
        path = Path(f"{out_prefix}.{name}.factors")
        ar.save_factor_cache(path, fop, archive.basis)
        print(f"wrote {path}")
    return 0


def cmd_norms(args) -> int:
    archive = _load(args.archive)
    coeffs = _coefficient_sets(archive, _has_partition(archive))
    reports = []
    for name in args.observables:
        if args.representation in ("sparse", "both"):
            reports.append(sparse_norms(coeffs[name]))
        if args.representation in ("tf", "both"):
            fop = factorize_coefficients(coeffs[name], threshold=args.truncation)
            reports.append(tf_norm(fop))
    print(format_table(reports))
    if args.json:
        Path(args.json).write_text(
            json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
        )
        print(f"wrote {args.json}")
    return 0


def _norm_totals(archive: ar.TensorArchive, truncation: float) -> dict[str, float]:
    coeffs = _coefficient_sets(archive, _has_partition(archive))
    return {
        name: tf_norm(factorize_coefficients(coeffs[name], threshold=truncation)).total
        for name in OBSERVABLES
    }


def cmd_budget(args) -> int:
    if args.archive:
        totals = _norm_totals(_load(args.archive), args.truncation)
        lam_v, lam_p, lam_vp = totals["V"], totals["P"], totals["VPs"]
    else:
        if None in (args.lambda_v, args.lambda_p, args.lambda_vp):
            print("budget needs an archive or all three norms", file=sys.stderr)
            return 2
        lam_v, lam_p, lam_vp = args.lambda_v, args.lambda_p, args.lambda_vp
    budget = budget_errors(lam_v, lam_p, lam_vp, args.eps_targ)
    print(
        json.dumps(
            {
                "eps_V": budget.eps_V,
                "eps_VP": budget.eps_VP,
                "eps_P": budget.eps_P,
                "eps_targ": budget.eps_targ,
                "constraint_residual": budget.constraint_residual(),
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _system_params(args, archive: ar.TensorArchive | None) -> SystemParams:
    vals = {}
    if archive is not None:
        if "h1_A" in archive.arrays and "eri_A" in archive.arrays:
            vals["lambda_A"] = df_hamiltonian_norm(
                *factorize_monomer_hamiltonian(archive.arrays["h1_A"], archive.arrays["eri_A"])
            )
        if "h1_B" in archive.arrays and "eri_B" in archive.arrays:
            vals["lambda_B"] = df_hamiltonian_norm(
                *factorize_monomer_hamiltonian(archive.arrays["h1_B"], archive.arrays["eri_B"])
            )
        vals["delta_A"] = archive.scalar("gap_A", 0.0) or None
        vals["delta_B"] = archive.scalar("gap_B", 0.0) or None
        vals["overlap_A"] = archive.scalar("overlap_A", 1.0)
        vals["overlap_B"] = archive.scalar("overlap_B", 1.0)
        vals["n_orb_A"] = archive.basis.n_orb_A
        vals["n_orb_B"] = archive.basis.n_orb_B
    overrides = {
        "lambda_A": args.lambda_a,
        "lambda_B": args.lambda_b,
        "delta_A": args.gap_a,
        "delta_B": args.gap_b,
        "overlap_A": args.overlap_a,
        "overlap_B": args.overlap_b,
        "n_orb_A": args.n_orb_a,
        "n_orb_B": args.n_orb_b,
    }
    for key, val in overrides.items():
        if val is not None:
            vals[key] = val
    missing = [k for k in ("lambda_A", "lambda_B", "delta_A", "delta_B") if not vals.get(k)]
    if missing:
        raise DomainError(f"estimate needs {', '.join(missing)} (flags or archive data)")
    return SystemParams(**vals)


def _calibration(path: str | None) -> CalibrationConstants:
    if not path:
        return CalibrationConstants()
    data = json.loads(Path(path).read_text())
    return CalibrationConstants().updated(**data)


def cmd_estimate(args) -> int:
    config = RunConfig(
        eps_targ=args.eps_targ,
        truncation=args.truncation,
        observables=tuple(args.observables),
        output_dir=Path(args.output) if args.output else None,
        calibration=_calibration(args.calibration),
    )
    archive = _load(args.archive) if args.archive else None
    params = _system_params(args, archive)

    lam = {}
    if archive is not None:
        lam = _norm_totals(archive, config.truncation)
    for key, val in (("V", args.lambda_v), ("P", args.lambda_p), ("VPs", args.lambda_vp)):
        if val is not None:
            lam[key] = val
    missing = [k for k in OBSERVABLES if k not in lam]
    if missing:
        raise DomainError(f"estimate needs observable norms for {', '.join(missing)}")

    budget = budget_errors(lam["V"], lam["P"], lam["VPs"], config.eps_targ)
    graphs = {}
    for name in config.observables:
        graphs[name] = estimate_observable(
            name, lam[name], params, budget.for_observable(name), config.calibration
        )

    out_dir = Path(args.output) if args.output else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for name, graph in graphs.items():
        if args.format in ("json", "all"):
            text = emit_callgraph(graph, "json")
            if out_dir:
                (out_dir / f"estimate.{name}.json").write_text(text + "\n")
            else:
                print(text)
        if args.format in ("dot", "all"):
            text = emit_callgraph(graph, "dot")
            if out_dir:
                (out_dir / f"estimate.{name}.dot").write_text(text + "\n")
            else:
                print(text)
        print(f"{name}: total_toffolis={graph.root.total} qubits={graph.root.qubits}")
    if args.format in ("tsv", "all"):
        text = summary_tsv(graphs)
        if out_dir:
            (out_dir / "estimate.summary.tsv").write_text(text + "\n")
        else:
            print(text)
    return 0


def cmd_supermolecular(args) -> int:
    calib = _calibration(args.calibration)
    n_orbs = tuple(args.n_orbs) if args.n_orbs else None
    graph = estimate_supermolecular(
        args.lambda_ab, args.lambda_a, args.lambda_b, args.eps_targ, calib, n_orbs
    )
    print(json.dumps(graph.meta["eps_split"], indent=2, sort_keys=True))
    for _, child in graph.root.children:
        print(f"{child.name}: total_toffolis={child.total} qubits={child.qubits}")
    print(f"combined: total_toffolis={graph.root.total} qubits={graph.root.qubits}")
    if args.output:
        Path(args.output).write_text(emit_callgraph(graph, "json") + "\n")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verification

    archive = _load(args.archive) if args.archive else ar.demo_archive()
    ok = run_verification(archive, verbose=True)
    return 0 if ok else 1


def cmd_convert_fcidump(args) -> int:
    if Path(args.archive).exists() and not args.new:
        archive = _load(args.archive)
    else:
        h1, eri, n_orb, n_elec, _ = ar.read_fcidump(args.fcidump)
        if args.monomer == "A":
            basis = ar.DimerBasis(n_orb, max(args.n_orb_other, 1), n_elec, 0)
        else:
            basis = ar.DimerBasis(max(args.n_orb_other, 1), n_orb, 0, n_elec)
        archive = ar.TensorArchive(basis=basis, arrays={})
    archive = ar.merge_fcidump(archive, args.fcidump, args.monomer)
    ar.save_archive(args.archive, archive)
    print(f"wrote {args.archive}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_estimate_params(p):
    p.add_argument("--lambda-a", type=float, help="monomer A Hamiltonian norm (Hartree)")
    p.add_argument("--lambda-b", type=float, help="monomer B Hamiltonian norm (Hartree)")
    p.add_argument("--gap-a", type=float, help="monomer A spectral gap (Hartree)")
    p.add_argument("--gap-b", type=float, help="monomer B spectral gap (Hartree)")
    p.add_argument("--overlap-a", type=float, help="initial-state overlap squared, monomer A")
    p.add_argument("--overlap-b", type=float, help="initial-state overlap squared, monomer B")
    p.add_argument("--n-orb-a", type=int, help="spatial orbitals of monomer A")
    p.add_argument("--n-orb-b", type=int, help="spatial orbitals of monomer B")
    p.add_argument("--lambda-v", type=float, help="electrostatic observable norm")
    p.add_argument("--lambda-p", type=float, help="exchange observable norm")
    p.add_argument("--lambda-vp", type=float, help="product observable norm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saptkit",
        description="First-order interaction observables and quantum resource estimates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factorize", help="cache nested factorizations of all observables")
    p.add_argument("archive")
    p.add_argument("-o", "--output", help="output path prefix")
    p.add_argument("--truncation", type=float, default=0.0)
    p.add_argument("--observables", nargs="+", default=list(OBSERVABLES), choices=OBSERVABLES)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("norms", help="sparse and factorized block-encoding norms")
    p.add_argument("archive")
    p.add_argument("--representation", choices=("sparse", "tf", "both"), default="both")
    p.add_argument("--observables", nargs="+", default=list(OBSERVABLES), choices=OBSERVABLES)
    p.add_argument("--truncation", type=float, default=0.0)
    p.add_argument("--json", help="also write reports to this JSON file")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("budget", help="precision allocation across the three observables")
    p.add_argument("--archive")
    p.add_argument("--lambda-v", type=float)
    p.add_argument("--lambda-p", type=float)
    p.add_argument("--lambda-vp", type=float)
    p.add_argument("--eps-targ", type=float, default=0.0016)
    p.add_argument("--truncation", type=float, default=0.0)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("estimate", help="Toffoli/qubit call graphs for the estimation runs")
    p.add_argument("--archive")
    p.add_argument("--eps-targ", type=float, default=0.0016)
    p.add_argument("--truncation", type=float, default=0.0)
    p.add_argument("--observables", nargs="+", default=list(OBSERVABLES), choices=OBSERVABLES)
    p.add_argument("--format", choices=("json", "dot", "tsv", "all"), default="tsv")
    p.add_argument("-o", "--output", help="output directory")
    p.add_argument("--calibration", help="JSON file with calibration-constant overrides")
    _add_estimate_params(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("supermolecular", help="three-run total-energy baseline costs")
    p.add_argument("--lambda-ab", type=float, required=True)
    p.add_argument("--lambda-a", type=float, required=True)
    p.add_argument("--lambda-b", type=float, required=True)
    p.add_argument("--eps-targ", type=float, default=0.0016)
    p.add_argument("--n-orbs", type=int, nargs=3, metavar=("NAB", "NA", "NB"))
    p.add_argument("--calibration")
    p.add_argument("-o", "--output", help="write the call graph JSON here")
    p.set_defaults(func=cmd_supermolecular)

    p = sub.add_parser("verify", help="run the Fock-space oracle suite")
    p.add_argument("archive", nargs="?", help="optional small archive (built-in otherwise)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convert-fcidump", help="attach a monomer Hamiltonian from FCIDUMP")
    p.add_argument("fcidump")
    p.add_argument("archive", help="archive to create or extend")
    p.add_argument("--monomer", choices=("A", "B"), required=True)
    p.add_argument("--new", action="store_true", help="start a fresh archive")
    p.add_argument("--n-orb-other", type=int, default=1, help="orbitals of the other monomer")
    p.set_defaults(func=cmd_convert_fcidump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SaptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
