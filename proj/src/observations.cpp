#include "dynmkw/observations.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dynmkw {

ObservationMatrix::ObservationMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) {
        throw std::invalid_argument("observation matrix needs at least 2 rows, got " +
                                    std::to_string(values_.rows()));
    }
    if (values_.cols() < 1) {
        throw std::invalid_argument("observation matrix needs at least 1 column");
    }
    for (Index j = 0; j < values_.cols(); ++j) {
        for (Index i = 0; i < values_.rows(); ++i) {
            if (!std::isfinite(values_(i, j))) {
                throw std::invalid_argument("non-finite value at row " + std::to_string(i + 1) +
                                            ", column " + std::to_string(j + 1));
            }
        }
    }
}

ObservationMatrix ObservationMatrix::slice(Index begin, Index end) const {
    if (begin < 0 || end > rows() || begin >= end) {
        throw std::out_of_range("invalid row slice [" + std::to_string(begin) + ", " +
                                std::to_string(end) + ")");
    }
    return ObservationMatrix(values_.middleRows(begin, end - begin));
}

}  // namespace dynmkw
