#include "graphent/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace graphent::kernels {
namespace {

std::atomic<const KernelOps*> g_active{nullptr};

const KernelOps* detect() {
  const char* env = std::getenv("GRAPHENT_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return &avx2_ops();
    // "auto" or anything unusable falls through to detection.
  }
  return cpu_has_avx2() ? &avx2_ops() : &scalar_ops();
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelOps& active() {
  const KernelOps* ops = g_active.load(std::memory_order_acquire);
  if (ops == nullptr) {
    ops = detect();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

bool force(const char* which) {
  if (std::strcmp(which, "scalar") == 0) {
    g_active.store(&scalar_ops(), std::memory_order_release);
    return true;
  }
  if (std::strcmp(which, "avx2") == 0) {
    if (!cpu_has_avx2()) return false;
    g_active.store(&avx2_ops(), std::memory_order_release);
    return true;
  }
  if (std::strcmp(which, "auto") == 0) {
    g_active.store(detect(), std::memory_order_release);
    return true;
  }
  return false;
}

}  // namespace graphent::kernels
