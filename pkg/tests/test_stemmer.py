import pytest

from opsum.textproc import stem

# Classic reference pairs for the original rule set, each traced through
# the algorithm by hand before being frozen here.
REFERENCE_VECTORS = {
    "caresses": "caress",
    "ponies": "poni",
    "ties": "ti",
    "caress": "caress",
    "cats": "cat",
    "flies": "fli",
    "dies": "di",
    "mules": "mule",
    "denied": "deni",
    "died": "di",
    "feed": "feed",
    "agreed": "agre",
    "owned": "own",
    "humbled": "humbl",
    "sized": "size",
    "meeting": "meet",
    "stating": "state",
    "siezing": "siez",
    "plotted": "plot",
    "running": "run",
    "motoring": "motor",
    "sing": "sing",
    "conflated": "conflat",
    "troubled": "troubl",
    "hopping": "hop",
    "tanned": "tan",
    "falling": "fall",
    "hissing": "hiss",
    "fizzed": "fizz",
    "failing": "fail",
    "filing": "file",
    "happy": "happi",
    "sky": "sky",
    "relational": "relat",
    "conditional": "condit",
    "rational": "ration",
    "itemization": "item",
    "sensational": "sensat",
    "traditional": "tradit",
    "reference": "refer",
    "colonizer": "colon",
    "electrical": "electr",
    "electriciti": "electr",
    "adoption": "adopt",
    "adjustment": "adjust",
    "dependent": "depend",
    "replacement": "replac",
    "formative": "form",
    "vileli": "vile",
    "analogousli": "analog",
    "probate": "probat",
    "rate": "rate",
    "cease": "ceas",
    "controll": "control",
    "roll": "roll",
}


@pytest.mark.parametrize("word,expected", sorted(REFERENCE_VECTORS.items()))
def test_reference_vectors(word, expected):
    assert stem(word) == expected


def test_non_alphabetic_passthrough():
    assert stem("!") == "!"
    assert stem("3") == "3"
    assert stem("10th") == "10th"
    assert stem("café") == "café"


def test_short_words_unchanged():
    assert stem("as") == "as"
    assert stem("is") == "is"
    assert stem("a") == "a"


# Step 5a legitimately strips the final e of these two outputs when they
# are fed back in; every other covered vector is a fixed point.
KNOWN_UNSTABLE_OUTPUTS = {"agre", "ceas"}


def test_idempotent_on_reference_outputs():
    unstable = set()
    for word in REFERENCE_VECTORS:
        once = stem(word)
        if stem(once) != once:
            unstable.add(once)
    assert unstable == KNOWN_UNSTABLE_OUTPUTS
