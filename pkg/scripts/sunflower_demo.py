"""Compare the certified delta-system bound with the exact minimum on tiny alphabets.

    python3 scripts/sunflower_demo.py
"""
from dichotomy.sunflower import delta_bound, minimal_delta_length


def main() -> None:
    for m in (2, 3):
        for alphabet in (2, 3, 4):
            exact = minimal_delta_length(m, alphabet)
            print(f"n=1 m={m} alphabet={alphabet}: exact minimum {exact}, certified bound {delta_bound(1, m)}")


if __name__ == "__main__":
    main()
