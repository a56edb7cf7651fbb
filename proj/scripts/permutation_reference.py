#!/usr/bin/env python3
"""Reference implementation of the workbench's seeded permutation.

MT19937-64 as specified for std::mt19937_64, then a Fisher-Yates pass from the
last index down with each draw reduced by rejection sampling. Used to pin the
expected permutations in the C++ tests.
"""
import sys

MASK = (1 << 64) - 1


class MT64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & MASK
        for i in range(1, 312):
            self.mt[i] = (6364136223846793005 * (self.mt[i - 1] ^ (self.mt[i - 1] >> 62)) + i) & MASK
        self.index = 312

    def next(self):
        if self.index >= 312:
            for i in range(312):
                x = (self.mt[i] & 0xFFFFFFFF80000000) | (self.mt[(i + 1) % 312] & 0x7FFFFFFF)
                xa = x >> 1
                if x & 1:
                    xa ^= 0xB5026F5AA96619E9
                self.mt[i] = self.mt[(i + 156) % 312] ^ xa
            self.index = 0
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


def permutation(seed, n):
    idx = list(range(n))
    eng = MT64(seed)
    for i in range(n, 1, -1):
        threshold = ((1 << 64) - i) % i
        r = eng.next()
        while r < threshold:
            r = eng.next()
        j = r % i
        idx[i - 1], idx[j] = idx[j], idx[i - 1]
    return idx


if __name__ == "__main__":
    seed, n = int(sys.argv[1]), int(sys.argv[2])
    print(", ".join(str(x) for x in permutation(seed, n)))
