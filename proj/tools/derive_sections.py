#!/usr/bin/env python3
# Copyright 2026 The framopt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Derive the inertia coefficients I(a) = eta2 a^2 + eta3 a^3 per section kind.

Every family is scaled by one length parameter t, so A ~ t^2 and I ~ t^4 and
the second-moment coefficient is eta2 = I / A^2 evaluated at t = 1. The
rectangle of fixed width is the exception: I = a^3 / (12 w^2).

Run without arguments to print the closed forms and the constants used by the
bundled models; the output is kept in tools/derived_sections.txt.
"""

import json
import pathlib

import sympy as sp

t, w, k, rho, b, h, d = sp.symbols("t w k rho b h d", positive=True)
a = sp.symbols("a", positive=True)


def eta2(area, inertia):
    return sp.simplify((inertia / area**2).subs(t, 1))


FORMS = {
    # width w fixed, height a / w
    "rect-width": ("eta3", sp.Rational(1, 12) / w**2),
    # height = k * width, width t
    "rect-aspect": ("eta2", eta2(k * t**2, k**3 * t**4 / 12)),
    # outer radius t, inner radius rho * t
    "circular-hollow": (
        "eta2",
        eta2(sp.pi * t**2 * (1 - rho**2), sp.pi * t**4 * (1 - rho**4) / 4),
    ),
    # flanges b*t wide, web height h*t overall, all plates t thick
    "i-profile": (
        "eta2",
        eta2(
            (2 * b + h - 2) * t**2,
            (b * h**3 - (b - 1) * (h - 2) ** 3) * t**4 / 12,
        ),
    ),
    # outer diameter d*t, wall t
    "thin-tube": (
        "eta2",
        eta2(
            sp.pi * ((d * t / 2) ** 2 - (d * t / 2 - t) ** 2),
            sp.pi / 4 * ((d * t / 2) ** 4 - (d * t / 2 - t) ** 4),
        ),
    ),
}
FORMS["h-profile"] = FORMS["i-profile"]

PARAMS = {
    "rect-width": [w],
    "rect-aspect": [k],
    "circular-hollow": [rho],
    "i-profile": [b, h],
    "h-profile": [b, h],
    "thin-tube": [d],
}


def main():
    print("closed forms")
    for kind, (which, expr) in FORMS.items():
        print(f"  {kind:16s} {which} = {sp.simplify(expr)}")

    print("\nbundled model sections")
    models = pathlib.Path(__file__).resolve().parent.parent / "models"
    seen = set()
    for path in sorted(models.glob("*.json")):
        data = json.loads(path.read_text())
        for sec in data.get("sections", []):
            key = (sec["kind"], tuple(sec["params"]))
            if sec["kind"] == "custom" or key in seen:
                continue
            seen.add(key)
            which, expr = FORMS[sec["kind"]]
            value = expr.subs(dict(zip(PARAMS[sec["kind"]], sec["params"])))
            print(f"  {sec['kind']:16s} {str(sec['params']):14s} {which} = {sp.N(value, 12)}")


if __name__ == "__main__":
    main()
