#include <atomic>
#include <cstdlib>

#include "rbgpc/error.hpp"
#include "rbgpc/kernels.hpp"

namespace rbgpc::kernels {
namespace {

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar: return &scalar_table();
    case Backend::Avx2: return avx2_table();
    case Backend::Neon: return neon_table();
  }
  return nullptr;
}

const KernelTable* detect() {
  if (const char* env = std::getenv("RBGPC_KERNELS")) {
    if (const KernelTable* t = table_for(parse_backend(env))) return t;
  }
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{detect()};
  return t;
}

}  // namespace

bool available(Backend b) { return table_for(b) != nullptr; }

Backend active_backend() { return active().backend; }

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  const KernelTable* t = table_for(b);
  require(t != nullptr, ErrorKind::Capacity,
          "kernel backend '" + std::string(name(b)) + "' is not available on this host");
  current().store(t, std::memory_order_relaxed);
}

std::string_view name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view s) {
  if (s == "scalar") return Backend::Scalar;
  if (s == "avx2") return Backend::Avx2;
  if (s == "neon") return Backend::Neon;
  raise(ErrorKind::Config, "unknown kernel backend '" + std::string(s) + "'");
}

}  // namespace rbgpc::kernels
