#!/usr/bin/env python3
# Copyright 2026 The oqtherm Authors
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

"""Recompute kPoissonWignerDistance: the L1 distance between the Poisson and
Wigner-Dyson spacing densities on s >= 0."""

import mpmath as mp

mp.mp.dps = 30


def gap(s):
    return mp.e ** (-s) - (mp.pi * s / 2) * mp.e ** (-mp.pi * s**2 / 4)


def main():
    lo = mp.findroot(gap, 0.5)
    hi = mp.findroot(gap, 2.0)
    value = mp.quad(lambda s: abs(gap(s)), [0, lo, hi, mp.inf])
    print(f"crossings: {mp.nstr(lo, 6)} {mp.nstr(hi, 6)}")
    print(f"kPoissonWignerDistance = {mp.nstr(value, 16)}")


if __name__ == "__main__":
    main()
