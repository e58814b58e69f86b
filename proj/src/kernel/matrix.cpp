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

#include "obsrank/matrix.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace obsrank {

FieldMatrix::FieldMatrix(std::uint64_t modulus, std::size_t rows, std::size_t cols)
    : modulus_(modulus), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

FieldMatrix::FieldMatrix(std::uint64_t modulus, std::size_t rows, std::size_t cols, std::vector<std::uint64_t> entries)
    : modulus_(modulus), rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols) {
        throw MismatchError("matrix of " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                            std::to_string(entries_.size()) + " entries");
    }
    for (auto& e : entries_) e %= modulus_;
}

FieldMatrix FieldMatrix::transposed() const {
    FieldMatrix t(modulus_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

FieldMatrix FieldMatrix::without_column(std::size_t col) const {
    if (col >= cols_) throw std::out_of_range("column index out of range");
    FieldMatrix m(modulus_, rows_, cols_ - 1);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::size_t k = 0;
        for (std::size_t c = 0; c < cols_; ++c)
            if (c != col) m(r, k++) = (*this)(r, c);
    }
    return m;
}

FieldMatrix FieldMatrix::top_rows(std::size_t count) const {
    if (count > rows_) throw std::out_of_range("row count out of range");
    return {modulus_, count, cols_, std::vector<std::uint64_t>(entries_.begin(), entries_.begin() + count * cols_)};
}

std::size_t rank(const FieldMatrix& m) {
    const PrimeField f(m.modulus());
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::vector<std::uint64_t> a(m.entries().begin(), m.entries().end());
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && a[pivot * cols + c] == 0) ++pivot;
        if (pivot == rows) continue;
        if (pivot != r)
            for (std::size_t k = c; k < cols; ++k) std::swap(a[pivot * cols + k], a[r * cols + k]);
        const std::uint64_t inv = f.inv(a[r * cols + c]);
        for (std::size_t k = c; k < cols; ++k) a[r * cols + k] = f.mul(a[r * cols + k], inv);
        for (std::size_t i = r + 1; i < rows; ++i) {
            const std::uint64_t factor = a[i * cols + c];
            if (factor == 0) continue;
            for (std::size_t k = c; k < cols; ++k)
                a[i * cols + k] = f.sub(a[i * cols + k], f.mul(factor, a[r * cols + k]));
        }
        ++r;
    }
    return r;
}

std::vector<std::size_t> deficient_columns(const FieldMatrix& m, std::size_t full_rank_target) {
    const std::size_t base = rank(m);
    if (base >= full_rank_target) {
        throw std::logic_error("deficient_columns called on a matrix of full rank " + std::to_string(base));
    }
    std::vector<std::size_t> result;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (rank(m.without_column(c)) == base) result.push_back(c);
    return result;
}

} // namespace obsrank
