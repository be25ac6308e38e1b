"""Positivity of canonical maps between two weights, three ways.

Plants a map of each status relative to random weights, then reports the
verdict of the direct route, the pushed-weight characterization and the
kernel-side equivalence. All three should agree.

Run with ``python3 demos/positive_maps.py``.
"""

import numpy as np

from toeplitz_positivity import Status, map_positivity, prop32_equivalence
from toeplitz_positivity.instances import random_map_instance


def main() -> None:
    rng = np.random.default_rng(7)
    for n in (1, 2, 3):
        for planted in (Status.STRICTLY_POSITIVE, Status.DEGENERATE_POSITIVE, Status.NOT_POSITIVE):
            M, phi1, phi2 = random_map_instance(rng, n, planted)
            v = map_positivity(M, phi1, phi2)
            eq = prop32_equivalence(M, phi1, phi2)
            print(
                f"n={n} planted={planted.value:<19} direct={v.direct.status.value:<19} "
                f"min={v.min_eigenvalue:+.3e} routes agree={v.route_agreement} kernel side agree={eq.agree}"
            )


if __name__ == "__main__":
    main()
