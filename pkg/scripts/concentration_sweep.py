#!/usr/bin/env python3
"""How many validators reach a 2/3 quorum as the stake distribution gets heavier-tailed?

For each Zipf exponent, builds an N-validator stake list and prints the
Nakamoto coefficient (> 1/3) and the quorum validator count (>= 2/3).
"""

import argparse

from posopen.metrics import nakamoto_coefficient, quorum_validator_count
from posopen.model import ConsensusFamily, ConsensusModel, TokenAmount, Validator, ValidatorSet
from posopen.synthetic import zipf_weights


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("-n", type=int, default=2000, help="validators per set")
    parser.add_argument("--exponents", default="0.5,0.8,1.0,1.1,1.2,1.5,2.0")
    args = parser.parse_args()

    model = ConsensusModel(ConsensusFamily.STAKE_PROPORTIONAL)
    print(f"{'zipf s':>7}  {'nakamoto':>8}  {'quorum count':>12}  {'share of N':>10}")
    for s in args.exponents.split(","):
        stakes = zipf_weights(args.n, s, 10**15)
        vs = ValidatorSet(
            tuple(Validator(f"v{i}", TokenAmount(x, 0)) for i, x in enumerate(stakes)), TokenAmount(0, 0)
        )
        q = quorum_validator_count(vs, model)
        print(f"{s:>7}  {nakamoto_coefficient(vs, model):>8}  {q:>12}  {q / args.n:>10.2%}")


if __name__ == "__main__":
    main()
