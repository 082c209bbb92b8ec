#pragma once

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace synthqa {

/// Thread count for a parallel region: `jobs > 0` is taken as-is, anything
/// else means "all available".
inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Holds the first exception thrown inside an OpenMP loop body so it can be
/// rethrown after the region ends.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& body) {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr error_;
};

}  // namespace synthqa
