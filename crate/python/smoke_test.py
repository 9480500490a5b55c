"""Smoke test for the mpg_duel extension module."""

import json

import mpg_duel


def main():
    fig2 = mpg_duel.gallery_document("fig2")
    value, alice, bob = mpg_duel.value_nonalt_finite(fig2, 2)
    assert value == "0", value
    assert len(alice) == len(bob) == 2

    chase = mpg_duel.gallery_document("chase")
    assert mpg_duel.value_alt_finite(chase, 5) == "5"

    assert mpg_duel.covering_radius("11", 8) == 4

    out, code = mpg_duel.execute(["covering-radius", "--forbidden", "00,11", "--n", "6"])
    assert code == 0, out
    assert json.loads(out)["schema"] == mpg_duel.SCHEMA

    try:
        mpg_duel.gallery_document("nope")
    except ValueError as e:
        assert "nope" in str(e)
    else:
        raise AssertionError("unknown example accepted")
    print("smoke test ok")


if __name__ == "__main__":
    main()
