#!/usr/bin/env python3
"""Regenerate the bundled demo fixtures under demo/.

Deterministic: fixed seed, sorted keys, stable float formatting. Run from
the repository root:

    python3 scripts/make_demo.py
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DEMO = ROOT / "demo"
EMBEDDING_DIM = 1024

SHARED = ["salt", "water", "garlic", "onion"]

POOLS = {
    "italian": [
        "spaghetti pasta", "tomato sauce", "fresh basil", "mozzarella cheese",
        "grated parmesan cheese", "ricotta cheese", "dried oregano", "olive oil",
        "pancetta", "prosciutto", "balsamic vinegar", "pine nuts",
        "arborio rice", "rosemary", "polenta",
    ],
    "mexican": [
        "corn tortillas", "salsa", "jalapeno chilies", "fresh cilantro",
        "avocado", "black beans", "lime juice", "ground cumin",
        "queso fresco", "chipotle peppers", "refried beans", "flour tortillas",
    ],
    "southern_us": [
        "buttermilk", "cornmeal", "collard greens", "black eyed peas",
        "pecans", "grits", "molasses", "okra", "sweet potatoes", "hot sauce",
    ],
    "indian": [
        "garam masala", "ground turmeric", "basmati rice", "ghee", "paneer",
        "curry leaves", "cumin seeds", "coriander powder", "red lentils",
        "cardamom pods", "ginger paste", "naan bread",
    ],
    "chinese": [
        "soy sauce", "sesame oil", "hoisin sauce", "rice vinegar", "scallions",
        "ginger root", "oyster sauce", "shaoxing wine", "five spice powder",
        "wonton wrappers", "bok choy",
    ],
    "french": [
        "unsalted butter", "heavy cream", "gruyere cheese", "dijon mustard",
        "shallots", "white wine", "tarragon", "creme fraiche", "puff pastry",
        "leeks",
    ],
    "cajun_creole": [
        "andouille sausage", "cajun seasoning", "okra", "celery",
        "green bell pepper", "creole mustard", "crawfish tails",
        "file powder", "tabasco sauce", "long grain rice",
    ],
    "thai": [
        "fish sauce", "coconut milk", "lemongrass", "thai basil",
        "kaffir lime leaves", "red curry paste", "palm sugar", "rice noodles",
        "galangal", "bird chilies",
    ],
    "japanese": [
        "mirin", "sake", "miso paste", "nori sheets", "dashi stock",
        "rice vinegar", "sushi rice", "wasabi", "bonito flakes",
        "udon noodles", "soy sauce",
    ],
    "greek": [
        "feta cheese", "kalamata olives", "greek yogurt", "fresh dill",
        "lemon juice", "phyllo dough", "cucumber", "red wine vinegar",
        "mint leaves", "orzo pasta", "olive oil",
    ],
}

# imbalanced on purpose, italian on top
SIZES = [
    ("italian", 20), ("mexican", 16), ("southern_us", 12), ("indian", 10),
    ("chinese", 9), ("french", 8), ("cajun_creole", 7), ("thai", 7),
    ("japanese", 6), ("greek", 5),
]


def make_corpus(rng):
    recipes = []
    recipe_id = 1000
    for cuisine, count in SIZES:
        pool = POOLS[cuisine]
        for _ in range(count):
            recipe_id += 1
            n_pool = rng.randint(5, min(9, len(pool)))
            ingredients = rng.sample(pool, n_pool)
            ingredients += rng.sample(SHARED, rng.randint(1, 3))
            recipes.append({
                "id": recipe_id,
                "cuisine": cuisine,
                "ingredients": ingredients,
            })
    return recipes


def embedding(axis, copy_of=None):
    v = [0.0] * EMBEDDING_DIM
    v[axis if copy_of is None else copy_of] = 1.0
    return v


def photo(pid, general, food, exif, axis, copy_of=None):
    return {
        "photo_id": pid,
        "exif_datetime": exif,
        "general": [{"concept": c, "p": p} for c, p in general],
        "food": [{"concept": c, "p": p} for c, p in food],
        "embedding": embedding(axis, copy_of),
    }


FOOD = [("food", 0.95)]

PHOTOS = [
    photo("photo_01", FOOD + [("pizza", 0.97)],
          [("pizza", 0.96), ("mozzarella", 0.85), ("tomato", 0.83), ("basil", 0.80)],
          "2023:06:01 12:00:00", 0),
    photo("photo_02", FOOD + [("pasta", 0.93)],
          [("lasagna", 0.94), ("pasta", 0.88), ("cheese", 0.81)],
          "2023:06:02 19:30:00", 1),
    photo("photo_03", FOOD + [("salad", 0.92)],
          [("tomato", 0.95), ("basil", 0.92), ("mozzarella", 0.90), ("parmesan", 0.88),
           ("ricotta", 0.86), ("oregano", 0.84), ("pasta", 0.83), ("pancetta", 0.81),
           ("prosciutto", 0.80), ("balsamic vinegar", 0.78), ("pine nuts", 0.77),
           ("polenta", 0.76)],
          "2023:06:03 13:15:00", 2),
    photo("photo_04", FOOD + [("tacos", 0.95)],
          [("tacos", 0.93), ("salsa", 0.82), ("cilantro", 0.78)],
          "2023:06:04 20:00:00", 3),
    photo("photo_05", FOOD + [("burrito", 0.94)],
          [("burrito", 0.92), ("black beans", 0.83), ("tortilla", 0.79)],
          None, 4),
    photo("photo_06", FOOD + [("dip", 0.91)],
          [("guacamole", 0.95), ("avocado", 0.88), ("lime", 0.77)],
          "2023:06:06 18:45:00", 5),
    photo("photo_07", FOOD + [("plate", 0.90)],
          [("enchiladas", 0.91), ("queso fresco", 0.8)],
          "2023:06:07 19:10:00", 6),
    photo("photo_08", FOOD + [("bowl", 0.92)],
          [("corn tortilla", 0.90), ("salsa", 0.88), ("jalapeno", 0.86),
           ("cilantro", 0.85), ("avocado", 0.84), ("black beans", 0.83),
           ("lime", 0.82), ("cumin", 0.80), ("queso fresco", 0.79),
           ("chipotle", 0.78), ("refried beans", 0.76)],
          "2023:06:08 12:40:00", 7),
    photo("photo_09", FOOD + [("sushi", 0.96)],
          [("sushi", 0.95), ("rice", 0.85), ("nori", 0.78)],
          "2023:06:09 13:00:00", 8),
    photo("photo_10", FOOD + [("noodles", 0.93)],
          [("ramen", 0.94), ("noodles", 0.86), ("miso", 0.77)],
          "2023:06:10 12:30:00", 9),
    photo("photo_11", FOOD + [("noodles", 0.91)],
          [("pad thai", 0.92), ("rice noodles", 0.84), ("lime", 0.76)],
          "2023:06:11 19:20:00", 10),
    photo("photo_12", FOOD + [("pastry", 0.94)],
          [("croissant", 0.95), ("butter", 0.8)],
          "2023:06:12 08:30:00", 11),
    # passes the food gate, then rejected for the person in frame
    photo("photo_13", FOOD + [("pizza", 0.93), ("woman", 0.90)],
          [("pizza", 0.9)],
          "2023:06:13 14:00:00", 12),
    photo("photo_14", [("woman", 0.97), ("person", 0.95), ("portrait", 0.90)],
          [],
          "2023:06:14 10:00:00", 13),
    photo("photo_15", [("sunset", 0.98), ("sky", 0.95)],
          [],
          "2023:06:15 20:30:00", 14),
    photo("photo_16", [("car", 0.97), ("road", 0.90)],
          [],
          "2023:06:16 09:00:00", 15),
    # same EXIF DateTime as photo_01: removed as an exact duplicate
    photo("photo_17", FOOD + [("pizza", 0.96)],
          [("pizza", 0.94), ("tomato", 0.8)],
          "2023:06:01 12:00:00", 16),
    # same embedding as photo_04: removed as a near duplicate
    photo("photo_18", FOOD + [("tacos", 0.94)],
          [("tacos", 0.92), ("salsa", 0.8)],
          "2023:06:18 20:05:00", 3, copy_of=3),
    photo("photo_19", FOOD + [("plate", 0.91)],
          [("gyros", 0.93), ("tzatziki", 0.8), ("feta", 0.77)],
          "2023:06:19 13:30:00", 17),
    # generic comfort food: no dish hit, too few ingredient matches
    photo("photo_20", FOOD + [("bowl", 0.93)],
          [("stew", 0.90), ("bread", 0.84), ("butter", 0.76), ("soup", 0.75)],
          None, 18),
]

KB_TOKENS = [
    "pizza", "pasta", "cheese", "tacos", "tortilla", "salsa", "guacamole",
    "burrito", "enchiladas", "sushi", "ramen", "noodles", "croissant",
    "bread", "soup", "stew", "rice", "curry", "gyros", "food", "salad",
    "sandwich", "avocado", "dip", "bowl", "plate", "pastry",
]

CONFIG = """\
# Demo configuration for `profiler run`.

user_id = "demo-user"
jobs = 0

[paths]
corpus = "demo/corpus.json"
photos = "demo/photos"
kb = "demo/kb.txt"
out_dir = "out/demo"

[thresholds]
p_food = 0.9
p_person = 0.85
sim_threshold = 0.95
p_cut = 0.75
match_min = 10

[knn]
k = 5
metric = "jaccard"
seed = 42

[report]
methods = ["rule", "knn"]
top_n = 50
"""


def main():
    rng = random.Random(12345)
    (DEMO / "photos").mkdir(parents=True, exist_ok=True)

    corpus = make_corpus(rng)
    (DEMO / "corpus.json").write_text(json.dumps(corpus, indent=1) + "\n")

    for record in PHOTOS:
        path = DEMO / "photos" / f"{record['photo_id']}.labels.json"
        path.write_text(json.dumps(record) + "\n")

    (DEMO / "kb.txt").write_text(
        "# Food concepts for the demo knowledge base\n"
        + "\n".join(KB_TOKENS) + "\n"
    )
    (DEMO / "config.toml").write_text(CONFIG)
    print(f"wrote {len(corpus)} recipes and {len(PHOTOS)} photo fixtures to {DEMO}")


if __name__ == "__main__":
    main()
