"""Print the coverage, metric and selection summaries derivable from the embedded rule model."""
import argparse

from roughteam.evaluation import ConfusionMatrix, TechniqueCandidate, format_report, metrics, select_technique
from roughteam.rules import embedded_model, listing

CANDIDATES = [
    TechniqueCandidate("logistic", 67.6, None),
    TechniqueCandidate("c45", 70.48, 8),
    TechniqueCandidate("ga_rules", 75.23, 48),
    TechniqueCandidate("ja_rules", 79.04, 24),
]


def coverage_table(bidimensional_only: bool) -> str:
    lines = [f"{'id':>3}  {'LHS cov':>9}  {'RHS cov':<22}final"]
    for row in listing(embedded_model()):
        if bidimensional_only and not row["bidimensional"]:
            continue
        rhs = ", ".join(f"{v:.6f}" for v in row["rhs_coverage"].values())
        lines.append(f"{row['id']:>3}  {row['lhs_coverage']:>9.6f}  {rhs:<22}{row['final_decision']}")
    return "\n".join(lines)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--all-rules", action="store_true", help="list every rule, not only bi-dimensional ones")
    parser.add_argument("--benchmark", type=float, default=70.0)
    args = parser.parse_args()

    print("Rule coverage")
    print(coverage_table(not args.all_rules))
    print()
    print(format_report(metrics(ConfusionMatrix(tp=23, tn=60, fp=0, fn=22))), end="")
    print()
    winner, ranking = select_technique(CANDIDATES, args.benchmark)
    print(f"Technique selection at {args.benchmark:g}%")
    for a in ranking:
        print(f"  {a.candidate.name:<10} {a.candidate.accuracy:>6.2f}%  {'accepted' if a.accepted else 'rejected'}: {a.reason}")
    print(f"selected: {winner}")


if __name__ == "__main__":
    main()
