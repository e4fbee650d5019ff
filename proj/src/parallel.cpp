#include "gaze/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gaze::par {

namespace {
std::atomic<bool> g_force_serial{false};
}

bool openmp_available() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_force_serial(bool v) { g_force_serial.store(v); }

bool force_serial() { return g_force_serial.load(); }

}  // namespace gaze::par
