#include "ds1/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <utility>

#include "ds1/parallel.hpp"

#if defined(DS1_HAVE_OPENMP)
#include <omp.h>
#endif

namespace ds1 {

namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}

std::atomic<int> g_verbosity{0};

}  // namespace

WarningHandler set_warning_handler(WarningHandler h) {
  std::lock_guard lock(log_mutex());
  return std::exchange(handler(), std::move(h));
}

void warn(const std::string& message) {
  std::lock_guard lock(log_mutex());
  if (handler()) handler()(message);
}

void set_verbosity(int level) { g_verbosity.store(level); }
int verbosity() { return g_verbosity.load(); }

void info(const std::string& message) {
  if (g_verbosity.load() <= 0) return;
  std::lock_guard lock(log_mutex());
  std::cerr << message << '\n';
}

namespace exec {

int max_threads() {
#if defined(DS1_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_num_threads(int n) {
#if defined(DS1_HAVE_OPENMP)
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace exec

}  // namespace ds1
