#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mvfcm {

/// Objects are rows; row-major keeps each feature vector contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Bad user input: malformed files, violated preconditions. The CLI maps it to exit status 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity showed up during an iteration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::span<const double> row_span(const RowMatrix& m, Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<double> row_span(RowMatrix& m, Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Splits [0, count) into contiguous chunks, one per worker. Each index is
/// visited exactly once and no two chunks share output, so results do not
/// depend on the worker count.
template <typename Fn>
void parallel_for(Index count, int workers, Fn&& fn) {
    if (workers <= 1 || count < 2) {
        fn(Index{0}, count);
        return;
    }
    const Index chunks = std::min<Index>(workers, count);
    const Index step = (count + chunks - 1) / chunks;
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    for (Index begin = 0; begin < count; begin += step) {
        const Index end = std::min(count, begin + step);
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
}

}  // namespace mvfcm
