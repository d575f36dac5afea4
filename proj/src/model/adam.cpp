#include "mvd/model/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mvd {

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr, const AdamHyper& h) {
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size()) {
    throw std::invalid_argument("adam_step: tensor count mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k].size() != g[k].size() || p[k].size() != m[k].size() || p[k].size() != v[k].size()) {
      throw std::invalid_argument("adam_step: tensor shape mismatch");
    }
    double* __restrict pk = p[k].data();
    double* __restrict mk = m[k].data();
    double* __restrict vk = v[k].data();
    const double* __restrict gk = g[k].data();
    const std::size_t n = p[k].size();
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = gk[i];
      mk[i] = h.beta1 * mk[i] + (1.0 - h.beta1) * gi;
      vk[i] = h.beta2 * vk[i] + (1.0 - h.beta2) * gi * gi;
      const double m_hat = mk[i] / c1;
      const double v_hat = vk[i] / c2;
      pk[i] -= lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
  }
}

}  // namespace mvd
