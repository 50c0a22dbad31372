#pragma once

#include <mutex>

namespace sdstein::detail {

// FFTW planning is not thread-safe; every plan/destroy in this library goes
// through this single lock.
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace sdstein::detail
