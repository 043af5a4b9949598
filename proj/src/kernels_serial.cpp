#include <algorithm>

#include "medsmooth/kernels.hpp"
#include "medsmooth/smoothing.hpp"

namespace medsmooth::kernels {

ColumnBounds order_bounds(std::span<const double> column, const OrderIndices& indices,
                          std::vector<double>& scratch) {
  scratch.assign(column.begin(), column.end());
  std::sort(scratch.begin(), scratch.end());
  const std::size_t n = scratch.size();
  const std::size_t mid = median_rank(n);
  const auto at_rank = [&](std::size_t rank) {
    if (rank == 0) return -kSentinel;
    if (rank > n) return kSentinel;
    return scratch[rank - 1];
  };
  return {at_rank(std::min(indices.q_lo, mid)), at_rank(mid), at_rank(std::max(indices.q_hi, mid))};
}

namespace {

double median_objectness(std::span<const double> values, std::vector<double>& scratch) {
  scratch.assign(values.begin(), values.end());
  std::sort(scratch.begin(), scratch.end());
  return scratch[scratch.size() / 2];
}

}  // namespace

namespace serial {

SampleDetections evaluate_samples(std::size_t n, const SampleFn& fn) {
  SampleDetections out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  return out;
}

std::vector<BinBounds> column_bounds(const RegressionMatrix& matrix, const OrderIndices& indices) {
  std::vector<BinBounds> out;
  std::vector<double> scratch;
  for (const auto& [key, table] : matrix.bins) {
    BinBounds b;
    b.key = key;
    b.slots = table.slots();
    b.columns.reserve(table.columns());
    for (std::size_t col = 0; col < table.columns(); ++col) {
      b.columns.push_back(order_bounds(table.column(col), indices, scratch));
    }
    for (std::size_t slot = 0; slot < table.slots(); ++slot) {
      b.objectness.push_back(median_objectness(table.objectness(slot), scratch));
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace serial
}  // namespace medsmooth::kernels
