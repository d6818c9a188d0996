// Example plugin map for custom:<name>: f(p) = p_1 + p_2 / 2 from the
// first Heisenberg group to the real line.

#include <cmath>

extern "C" {

int carnot_map_abi_version(void) { return 1; }

const char* carnot_map_target(void) { return "r1"; }

int carnot_map_eval(const double* in, int in_dim, double* out, int out_dim) {
  if (in_dim != 3 || out_dim != 1) return 1;
  out[0] = in[0] + 0.5 * in[1];
  return 0;
}

double carnot_map_lipschitz(void) { return std::sqrt(1.25); }
}
