#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace dynmkw {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// An n x L signal. Rows are time points, columns are coordinates.
// Construction rejects n < 2, L < 1 and any non-finite entry.
class ObservationMatrix {
public:
    explicit ObservationMatrix(Matrix values);

    Index rows() const { return values_.rows(); }
    Index dims() const { return values_.cols(); }
    const Matrix& values() const { return values_; }
    double operator()(Index row, Index col) const { return values_(row, col); }

    // Rows [begin, end). The slice must itself hold at least two rows.
    ObservationMatrix slice(Index begin, Index end) const;

private:
    Matrix values_;
};

}  // namespace dynmkw
