#include "q_cache.hpp"

#include <cstdlib>
#include <sstream>

#include "ds1/reference.hpp"
#include "ds1/snapshot.hpp"
#include "ds1/stationary.hpp"

namespace ds1::testing {

std::filesystem::path cache_dir() {
  if (const char* env = std::getenv("DS1_TEST_CACHE")) return env;
  return DS1_TEST_CACHE_DIR;
}

RealField cached_Q(std::size_t n, double l) {
  std::ostringstream name;
  name << "Q_" << n << "x" << n << "_" << l << "x" << l << ".ds1";
  const auto path = cache_dir() / name.str();
  const SpectralGrid g = make_grid(n, n, l, l);
  if (std::filesystem::exists(path)) return to_real(read_snapshot(path, g).field);
  RealField q0 = dromion_radiating(g);
  for (double& v : q0.values()) v *= 6.0;
  const auto res = newton_solve(q0, 1.0);
  std::filesystem::create_directories(path.parent_path());
  write_snapshot(path, res.Q, 0.0);
  return res.Q;
}

}  // namespace ds1::testing
