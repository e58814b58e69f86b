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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "obsrank/field.hpp"

namespace obsrank {

/// Dense row-major matrix over Z/pZ.
class FieldMatrix {
public:
    FieldMatrix(std::uint64_t modulus, std::size_t rows, std::size_t cols);
    FieldMatrix(std::uint64_t modulus, std::size_t rows, std::size_t cols, std::vector<std::uint64_t> entries);

    std::uint64_t modulus() const noexcept { return modulus_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::uint64_t operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    std::uint64_t& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

    std::span<const std::uint64_t> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }
    std::span<const std::uint64_t> entries() const noexcept { return entries_; }

    FieldMatrix transposed() const;
    FieldMatrix without_column(std::size_t c) const;
    /// First `count` rows.
    FieldMatrix top_rows(std::size_t count) const;

    bool operator==(const FieldMatrix& rhs) const noexcept = default;

private:
    std::uint64_t modulus_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::uint64_t> entries_;
};

/// Rank over Z/pZ by Gaussian elimination.
std::size_t rank(const FieldMatrix& m);

/// Indices i such that removing column i leaves the rank unchanged.
/// Requires rank(m) < full_rank_target; a full-rank matrix has no deficient
/// columns and asking for them is a logic error (throws std::logic_error).
std::vector<std::size_t> deficient_columns(const FieldMatrix& m, std::size_t full_rank_target);

} // namespace obsrank
