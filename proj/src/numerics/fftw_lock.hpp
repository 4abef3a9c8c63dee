#pragma once

#include <mutex>

namespace contactlab::detail {

// FFTW planning is not thread-safe; every planner call goes through this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace contactlab::detail
