#pragma once

// Exceptions must not escape an OpenMP region. ParallelGuard records the
// first one thrown by any work item and rethrows it after the join.

#include <exception>
#include <mutex>

namespace conecert::detail {

class ParallelGuard {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (!first_) first_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr first_;
};

}  // namespace conecert::detail
