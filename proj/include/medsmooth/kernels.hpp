// Data-parallel inner loops of the pipeline. The serial versions are the
// reference the OpenMP versions are tested against; both produce identical
// results in identical order.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "medsmooth/detection.hpp"
#include "medsmooth/encoding.hpp"
#include "medsmooth/stats.hpp"

namespace medsmooth::kernels {

using SampleFn = std::function<std::vector<Detection>(std::size_t sample)>;
using SampleDetections = std::vector<std::vector<Detection>>;

/// Lower, median and upper order statistics of one column. `scratch` is
/// reused between calls.
ColumnBounds order_bounds(std::span<const double> column, const OrderIndices& indices,
                          std::vector<double>& scratch);

namespace serial {

SampleDetections evaluate_samples(std::size_t n, const SampleFn& fn);
std::vector<BinBounds> column_bounds(const RegressionMatrix& matrix, const OrderIndices& indices);

}  // namespace serial

/// Calls fn(0..n-1) on `workers` threads. If any call throws, the exception
/// of the lowest failing index is rethrown after all calls finish.
SampleDetections evaluate_samples(std::size_t n, const SampleFn& fn, int workers);
std::vector<BinBounds> column_bounds(const RegressionMatrix& matrix, const OrderIndices& indices,
                                     int workers);

/// Worker count from MEDSMOOTH_WORKERS, falling back to the OpenMP default.
int default_workers();

}  // namespace medsmooth::kernels
