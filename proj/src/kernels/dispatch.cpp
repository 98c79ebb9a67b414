#include <cstdlib>
#include <cstring>

#include "kernels_detail.hpp"

namespace detkit::kernels {

namespace {

struct State {
  const Ops* table = nullptr;
  Backend backend = Backend::kScalar;
};

State make_initial_state() {
  State s;
  s.table = &scalar_ops();
  s.backend = Backend::kScalar;
  if (avx2_available()) {
    s.table = avx2_ops();
    s.backend = Backend::kAvx2;
  }
  const char* env = std::getenv("DETKIT_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) {
      s.table = &scalar_ops();
      s.backend = Backend::kScalar;
    } else if (std::strcmp(env, "avx2") == 0 && avx2_available()) {
      s.table = avx2_ops();
      s.backend = Backend::kAvx2;
    }
  }
  return s;
}

State& state() {
  static State s = make_initial_state();
  return s;
}

}  // namespace

const Ops& ops() { return *state().table; }

bool set_backend(Backend backend) {
  State& s = state();
  switch (backend) {
    case Backend::kAuto:
      s.table = avx2_available() ? avx2_ops() : &scalar_ops();
      s.backend = avx2_available() ? Backend::kAvx2 : Backend::kScalar;
      return true;
    case Backend::kScalar:
      s.table = &scalar_ops();
      s.backend = Backend::kScalar;
      return true;
    case Backend::kAvx2:
      if (!avx2_available()) return false;
      s.table = avx2_ops();
      s.backend = Backend::kAvx2;
      return true;
  }
  return false;
}

Backend active_backend() { return state().backend; }

bool avx2_available() {
#ifdef DETKIT_WITH_AVX2
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Ops* avx2_ops() {
#ifdef DETKIT_WITH_AVX2
  return &detail::avx2_ops_table();
#else
  return nullptr;
#endif
}

}  // namespace detkit::kernels
