#!/usr/bin/env python3
"""
Sample problem generator for semiflow.
Writes one problem file per kind, plus a diverging Stein problem and a DARE
problem stored in Matrix Market sidecars, into problems/ (or argv[1]).
"""
import sys
from pathlib import Path

# Add the package directory to the Python path
sys.path.append(str(Path(__file__).parent.parent))

from semiflow.cli.problems import load_problem, write_example_problems
from semiflow.errors import ProblemFileError

DEFAULT_TARGET = Path(__file__).parent.parent / "problems"


def main():
    """Write the sample problems and read every one of them back."""
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_TARGET
    print("semiflow sample problems")
    print("=" * 50)

    print(f"\n1. Writing problems to {target}...")
    written = write_example_problems(target)
    print(f"Wrote {len(written)} problem files")

    print("\n2. Validating problem files...")
    failures = 0
    for path in written:
        try:
            problem = load_problem(path)
            print(f"  {path.name}: {problem.kind.value}")
        except ProblemFileError as e:
            print(f"  {path.name}: invalid ({e})")
            failures += 1

    if failures:
        print(f"\n{failures} problem files failed validation")
        return 1

    print("\nNext steps:")
    print(f"- python -m semiflow solve {target / 'dare_scalar.json'}")
    print(f"- python -m semiflow bench {target / 'stein.json'} --orders 2,3,4")
    print("- python -m semiflow check --suite all --seed 7")
    return 0


if __name__ == "__main__":
    sys.exit(main())
