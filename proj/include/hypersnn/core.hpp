#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypersnn {

using Vec = std::vector<double>;
using IntVec = std::vector<std::int64_t>;

// Row-major dense matrix, just wide enough for the small policy nets here.
template <typename T>
struct MatrixT {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    MatrixT() = default;
    MatrixT(std::size_t r, std::size_t c, T fill = T{})
        : rows(r), cols(c), data(r * c, fill) {}

    T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const MatrixT&) const = default;
};

using Matrix = MatrixT<double>;
using IntMatrix = MatrixT<std::int64_t>;

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace hypersnn
