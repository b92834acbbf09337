#include <cstdlib>
#include <string>

#include "golf/error.hpp"
#include "golf/kernels.hpp"

namespace golf::kernels {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw ParameterError("instruction set not supported on this machine");
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  throw ParameterError("unknown instruction set '" + std::string(name) + "'");
}

namespace {

const KernelTable& resolve() {
  if (const char* env = std::getenv("GOLF_ISA"); env != nullptr && *env != '\0') {
    return table(parse_isa(env));
  }
  return supported(Isa::avx2) ? table(Isa::avx2) : table(Isa::scalar);
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& chosen = resolve();
  return chosen;
}

}  // namespace golf::kernels
