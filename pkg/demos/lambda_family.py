"""Walk the radial family q = lambda |x|^2 / 2 on the model Fock space.

For each lambda, compare the symbolic verdict from ``analyze`` with what a
truncated matrix says about the operator norm. Bounded symbols keep the norm
at most one; unbounded ones blow up geometrically in the truncation order.

Run with ``python3 demos/lambda_family.py``.
"""

import numpy as np

from toeplitz_positivity import ComplexQuadraticSymbolExponent, QuadraticWeight, analyze, spectral_report, truncated_matrix

MODEL = QuadraticWeight.model(1)
LAMBDAS = [-1.0, -0.5 + 1j, 1 - np.exp(1j * np.pi / 4), 0.1 + 0.6j, 0.4, 0.2 - 0.3j]


def main() -> None:
    print(f"{'lambda':>18}  {'|1-lambda|':>10}  {'verdict':<40}  {'trace':>16}  {'norm N=20':>10}  {'norm N=60':>10}")
    for lam in LAMBDAS:
        q = ComplexQuadraticSymbolExponent.radial(lam)
        rep = analyze(q, MODEL)
        norms = [spectral_report(truncated_matrix(q, N)).operator_norm for N in (20, 60)]
        trace = "-" if rep.trace is None else f"{rep.trace.real:.4f}{rep.trace.imag:+.4f}j"
        label = rep.bounded_label + (", unitary" if rep.unitary_up_to_phase else "")
        print(f"{lam:>18.4f}  {abs(1 - lam):>10.4f}  {label:<40}  {trace:>16}  {norms[0]:>10.3g}  {norms[1]:>10.3g}")


if __name__ == "__main__":
    main()
