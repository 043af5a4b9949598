#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>

#include "medsmooth/kernels.hpp"

namespace medsmooth::kernels {

int default_workers() {
  if (const char* env = std::getenv("MEDSMOOTH_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1, omp_get_max_threads());
}

SampleDetections evaluate_samples(std::size_t n, const SampleFn& fn, int workers) {
  SampleDetections out(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(std::max(1, workers))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[i] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<BinBounds> column_bounds(const RegressionMatrix& matrix, const OrderIndices& indices,
                                     int workers) {
  struct Job {
    const BinTable* table;
    BinBounds* target;
    std::size_t column;  // columns first, then one job per slot objectness
  };
  std::vector<BinBounds> out;
  out.reserve(matrix.bins.size());
  for (const auto& [key, table] : matrix.bins) {
    BinBounds b;
    b.key = key;
    b.slots = table.slots();
    b.columns.resize(table.columns());
    b.objectness.resize(table.slots());
    out.push_back(std::move(b));
  }
  std::vector<Job> jobs;
  std::size_t bin = 0;
  for (const auto& [key, table] : matrix.bins) {
    for (std::size_t col = 0; col < table.columns() + table.slots(); ++col) {
      jobs.push_back({&table, &out[bin], col});
    }
    ++bin;
  }

  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel num_threads(std::max(1, workers))
  {
    std::vector<double> scratch;
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const Job& job = jobs[j];
      const std::size_t ncols = job.table->columns();
      if (job.column < ncols) {
        job.target->columns[job.column] = order_bounds(job.table->column(job.column), indices, scratch);
      } else {
        const auto values = job.table->objectness(job.column - ncols);
        scratch.assign(values.begin(), values.end());
        std::sort(scratch.begin(), scratch.end());
        job.target->objectness[job.column - ncols] = scratch[scratch.size() / 2];
      }
    }
  }
  return out;
}

}  // namespace medsmooth::kernels
