#include "mvd/model/params.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mvd {

std::size_t ModelConfig::total_input_dim() const {
  std::size_t total = 0;
  for (const auto& v : views) total += v.input_dim;
  return total;
}

ModelConfig ModelConfig::defaults_for(std::vector<ViewSpec> views) {
  ModelConfig c;
  for (const auto& v : views) {
    c.specific_hidden.push_back(std::max<std::size_t>(v.input_dim, 32));
    c.recon_hidden.push_back(std::max<std::size_t>(v.input_dim, 32));
  }
  c.views = std::move(views);
  return c;
}

void ModelConfig::validate() const {
  if (views.size() < 2) throw std::invalid_argument("ModelConfig: need at least two views");
  if (specific_hidden.size() != views.size() || recon_hidden.size() != views.size()) {
    throw std::invalid_argument("ModelConfig: per-view hidden widths must match view count");
  }
  for (std::size_t m = 0; m < views.size(); ++m) {
    if (views[m].input_dim < 1 || specific_hidden[m] < 1 || recon_hidden[m] < 1) {
      throw std::invalid_argument("ModelConfig: all dims must be >= 1");
    }
  }
  if (aligned_dim < 1 || shared_dim < 1 || aligned_hidden < 1 || batch_size < 1) {
    throw std::invalid_argument("ModelConfig: all dims must be >= 1");
  }
  const auto& w = loss_weights;
  for (double l : {w.lambda1, w.lambda2, w.lambda3, w.lambda4}) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("ModelConfig: loss weights must be >= 0");
  }
  if (w.lambda1 + w.lambda2 + w.lambda3 + w.lambda4 <= 0.0) {
    throw std::invalid_argument("ModelConfig: at least one loss weight must be positive");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("ModelConfig: learning rate must be >= 0");
  }
}

namespace {

Dense make_dense(std::size_t in, std::size_t out) { return {Matrix(out, in), Vector(out, 0.0)}; }

template <typename Params, typename Span>
std::vector<Span> collect(Params& p) {
  std::vector<Span> out;
  auto add = [&out](auto& d) {
    out.emplace_back(d.weight.flat());
    out.emplace_back(d.bias);
  };
  add(p.shared);
  for (auto& v : p.views) {
    add(v.specific1);
    add(v.specific2);
    add(v.aligned1);
    add(v.aligned2);
    add(v.recon1);
    add(v.recon2);
  }
  return out;
}

}  // namespace

ModelParams ModelParams::zeros(const ModelConfig& c) {
  c.validate();
  ModelParams p;
  p.shared = make_dense(c.total_input_dim(), c.shared_dim);
  for (std::size_t m = 0; m < c.view_count(); ++m) {
    const std::size_t d = c.input_dim(m);
    ViewParams v;
    v.specific1 = make_dense(d, c.specific_hidden[m]);
    v.specific2 = make_dense(c.specific_hidden[m], d);
    v.aligned1 = make_dense(c.shared_dim, c.aligned_hidden);
    v.aligned2 = make_dense(c.aligned_hidden, c.aligned_dim);
    v.recon1 = make_dense(d + c.aligned_dim, c.recon_hidden[m]);
    v.recon2 = make_dense(c.recon_hidden[m], d);
    p.views.push_back(std::move(v));
  }
  return p;
}

std::vector<std::span<double>> ModelParams::tensors() { return collect<ModelParams, std::span<double>>(*this); }

std::vector<std::span<const double>> ModelParams::tensors() const {
  return collect<const ModelParams, std::span<const double>>(*this);
}

std::vector<std::string> ModelParams::tensor_names(const ModelConfig& c) const {
  std::vector<std::string> names{"shared.weight", "shared.bias"};
  for (std::size_t m = 0; m < views.size(); ++m) {
    const std::string prefix = m < c.views.size() ? c.views[m].name : "view" + std::to_string(m);
    for (const char* layer : {"specific1", "specific2", "aligned1", "aligned2", "recon1", "recon2"}) {
      names.push_back(prefix + "." + layer + ".weight");
      names.push_back(prefix + "." + layer + ".bias");
    }
  }
  return names;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

bool ModelParams::finite() const {
  for (auto t : tensors())
    if (!all_finite(t)) return false;
  return true;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(config);
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](Dense& d) {
    const double bound = std::sqrt(6.0 / static_cast<double>(d.in_dim() + d.out_dim()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : d.weight.flat()) w = dist(rng);
  };
  glorot(p.shared);
  for (auto& v : p.views) {
    glorot(v.specific1);
    glorot(v.specific2);
    glorot(v.aligned1);
    glorot(v.aligned2);
    glorot(v.recon1);
    glorot(v.recon2);
  }
  return p;
}

}  // namespace mvd
