#include "gpc/parexec.hpp"

#include <thread>

namespace gpc::par {

int ExecPlan::default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n > 0 ? static_cast<int>(n) : 1;
}

}  // namespace gpc::par
