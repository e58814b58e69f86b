// Copyright 2026 The obsrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "obsrank/matrix.hpp"
#include "obsrank/series.hpp"

namespace obsrank::testing {

inline std::vector<std::uint64_t> random_words(std::mt19937_64& rng, std::size_t n, std::uint64_t p) {
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = rng() % p;
    return v;
}

inline TruncatedSeries random_series(std::mt19937_64& rng, std::uint64_t p, std::size_t order) {
    return {p, random_words(rng, order, p)};
}

inline TruncatedSeries random_unit(std::mt19937_64& rng, std::uint64_t p, std::size_t order) {
    auto s = random_words(rng, order, p);
    if (!s.empty() && s[0] == 0) s[0] = 1;
    return {p, std::move(s)};
}

inline FieldMatrix random_matrix(std::mt19937_64& rng, std::uint64_t p, std::size_t rows, std::size_t cols) {
    return {p, rows, cols, random_words(rng, rows * cols, p)};
}

/// Product of random rows x r and r x cols factors: rank at most r.
inline FieldMatrix random_low_rank(std::mt19937_64& rng, std::uint64_t p, std::size_t rows, std::size_t cols,
                                   std::size_t r) {
    FieldMatrix a = random_matrix(rng, p, rows, r);
    FieldMatrix b = random_matrix(rng, p, r, cols);
    FieldMatrix m(p, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            unsigned __int128 acc = 0;
            for (std::size_t k = 0; k < r; ++k) acc += static_cast<unsigned __int128>(a(i, k)) * b(k, j);
            m(i, j) = static_cast<std::uint64_t>(acc % p);
        }
    return m;
}

} // namespace obsrank::testing
