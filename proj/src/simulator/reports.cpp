#include "mvd/simulator/reports.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvd/dataio/errors.hpp"

namespace mvd {

using nlohmann::json;

namespace {

json mean_se_json(const MeanSe& m) { return {{"mean", m.mean}, {"se", m.se}}; }

json loss_json(const LossBreakdown& l) {
  return {{"ali", l.ali}, {"spc", l.spc}, {"inf", l.inf}, {"rec", l.rec}, {"total", l.total}};
}

json protocol_json(const SimProtocol& p) {
  return {{"collections", p.collections}, {"min_size", p.min_size}, {"max_size", p.max_size}, {"k", p.k},
          {"seed", p.seed}};
}

json block_json(const ScoreBlock& b) {
  json variants = json::array();
  for (const auto& v : b.variants) {
    json delta = json::array();
    for (const auto& d : v.delta) delta.push_back(mean_se_json(d));
    variants.push_back({{"variant", v.variant}, {"map", mean_se_json(v.map)}, {"mrr", mean_se_json(v.mrr)},
                        {"delta", delta}});
  }
  return {{"block", b.attribute}, {"variants", variants}};
}

json pairs_json(const std::vector<PairMetric>& pairs) {
  json out = json::array();
  for (const auto& p : pairs)
    out.push_back({{"view_a", p.view_a}, {"view_b", p.view_b}, {"pearson", p.pearson}, {"hsic", p.hsic}});
  return out;
}

json histogram_json(const Histogram& h) { return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}}; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError(IoError::Kind::Io, "write failed for '" + path.string() + "'");
}

void block_rows(std::ostringstream& os, const ScoreBlock& b) {
  for (const auto& v : b.variants) {
    os << b.attribute << ',' << v.variant << ',' << format_number(v.map.mean) << ',' << format_number(v.map.se)
       << ',' << format_number(v.mrr.mean) << ',' << format_number(v.mrr.se);
    for (const auto& d : v.delta) os << ',' << format_number(d.mean) << ',' << format_number(d.se);
    os << '\n';
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

std::string report_json(const PurityReport& r) {
  json curves = json::array();
  for (const auto& c : r.curves) {
    json points = json::array();
    for (const auto& p : c.points) {
      json alpha = json::array();
      for (const auto& a : p.alpha) alpha.push_back(mean_se_json(a));
      points.push_back({{"purity", p.purity}, {"alpha", alpha}, {"argmax_fraction", p.argmax_fraction}});
    }
    json correlated = c.correlated_view < r.view_names.size() ? json(r.view_names[c.correlated_view]) : json(nullptr);
    curves.push_back({{"attribute", c.attribute}, {"correlated_view", correlated}, {"points", points},
                      {"spearman", c.spearman}});
  }
  return json{{"report", "purity"}, {"views", r.view_names}, {"protocol", protocol_json(r.protocol)},
              {"curves", curves}}
      .dump(2);
}

std::string report_json(const BenchmarkReport& r) {
  json blocks = json::array();
  for (const auto& b : r.per_attribute) blocks.push_back(block_json(b));
  json doc{{"report", "benchmark"}, {"views", r.view_names}, {"protocol", protocol_json(r.protocol)},
           {"per_attribute", blocks}};
  if (!r.aggregate.variants.empty()) doc["aggregate"] = block_json(r.aggregate);
  return doc.dump(2);
}

std::string report_json(const CompositionReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"attribute_a", t.attribute_a}, {"class_a", t.class_a}, {"attribute_b", t.attribute_b},
                      {"class_b", t.class_b}, {"joint_relevant", t.joint_relevant},
                      {"map_composed", t.map_composed}, {"map_source_a", t.map_source_a},
                      {"map_source_b", t.map_source_b}, {"success", t.success}});
  }
  return json{{"report", "composition"}, {"k", r.k}, {"success_rate", r.success_rate}, {"trials", trials}}.dump(2);
}

std::string report_json(const SweepReport& r) {
  json input_hist = json::array();
  for (const auto& h : r.input_histograms) input_hist.push_back(histogram_json(h));
  json points = json::array();
  for (const auto& p : r.points) {
    json hist = json::array();
    for (const auto& h : p.output_histograms) hist.push_back(histogram_json(h));
    points.push_back({{"lambda2", p.lambda2},
                      {"inter_input", pairs_json(p.metrics.inter_input)},
                      {"inter_output", pairs_json(p.metrics.inter_output)},
                      {"intra", pairs_json(p.metrics.intra)},
                      {"final_train", loss_json(p.final_train)},
                      {"final_val", loss_json(p.final_val)},
                      {"output_histograms", hist}});
  }
  return json{{"report", "sweep"}, {"views", r.view_names}, {"input_histograms", input_hist}, {"points", points}}
      .dump(2);
}

std::string purity_csv(const PurityReport& r) {
  std::ostringstream os;
  os << "attribute,purity,view,alpha_mean,alpha_se,argmax_fraction\n";
  for (const auto& c : r.curves)
    for (const auto& p : c.points)
      for (std::size_t m = 0; m < p.alpha.size(); ++m)
        os << c.attribute << ',' << format_number(p.purity) << ',' << r.view_names[m] << ','
           << format_number(p.alpha[m].mean) << ',' << format_number(p.alpha[m].se) << ','
           << format_number(p.argmax_fraction[m]) << '\n';
  return os.str();
}

std::string benchmark_csv(const BenchmarkReport& r) {
  std::ostringstream os;
  os << "block,variant,map_mean,map_se,mrr_mean,mrr_se";
  for (const auto& v : r.view_names) os << ",delta_" << v << "_mean,delta_" << v << "_se";
  os << '\n';
  for (const auto& b : r.per_attribute) block_rows(os, b);
  if (!r.aggregate.variants.empty()) block_rows(os, r.aggregate);
  return os.str();
}

std::string composition_csv(const CompositionReport& r) {
  std::ostringstream os;
  os << "trial,attribute_a,class_a,attribute_b,class_b,joint_relevant,map_composed,map_source_a,map_source_b,success\n";
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    const auto& t = r.trials[i];
    os << i << ',' << t.attribute_a << ',' << t.class_a << ',' << t.attribute_b << ',' << t.class_b << ','
       << t.joint_relevant << ',' << format_number(t.map_composed) << ',' << format_number(t.map_source_a) << ','
       << format_number(t.map_source_b) << ',' << (t.success ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "lambda2,kind,view_a,view_b,pearson,hsic\n";
  for (const auto& p : r.points) {
    auto rows = [&](const char* kind, const std::vector<PairMetric>& pairs) {
      for (const auto& m : pairs)
        os << format_number(p.lambda2) << ',' << kind << ',' << r.view_names[m.view_a] << ','
           << r.view_names[m.view_b] << ',' << format_number(m.pearson) << ',' << format_number(m.hsic) << '\n';
    };
    rows("inter_input", p.metrics.inter_input);
    rows("inter_output", p.metrics.inter_output);
    rows("intra", p.metrics.intra);
  }
  return os.str();
}

std::string sweep_loss_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "lambda2,split,ali,spc,inf,rec,total\n";
  for (const auto& p : r.points) {
    for (const auto& [split, l] : {std::pair{"train", p.final_train}, std::pair{"val", p.final_val}})
      os << format_number(p.lambda2) << ',' << split << ',' << format_number(l.ali) << ',' << format_number(l.spc)
         << ',' << format_number(l.inf) << ',' << format_number(l.rec) << ',' << format_number(l.total) << '\n';
  }
  return os.str();
}

std::string sweep_hist_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "source,view,bin_lo,bin_hi,count\n";
  auto rows = [&](const std::string& source, const std::vector<Histogram>& hists) {
    for (std::size_t m = 0; m < hists.size(); ++m) {
      const Histogram& h = hists[m];
      const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        os << source << ',' << r.view_names[m] << ',' << format_number(h.lo + width * static_cast<double>(b)) << ','
           << format_number(h.lo + width * static_cast<double>(b + 1)) << ',' << h.counts[b] << '\n';
    }
  };
  rows("input", r.input_histograms);
  for (const auto& p : r.points) rows(format_number(p.lambda2), p.output_histograms);
  return os.str();
}

void write_report(const PurityReport& r, const std::filesystem::path& dir, const std::string& name) {
  write_text(dir / (name + ".json"), report_json(r));
  write_text(dir / (name + ".csv"), purity_csv(r));
}

void write_report(const BenchmarkReport& r, const std::filesystem::path& dir, const std::string& name) {
  write_text(dir / (name + ".json"), report_json(r));
  write_text(dir / (name + ".csv"), benchmark_csv(r));
}

void write_report(const CompositionReport& r, const std::filesystem::path& dir, const std::string& name) {
  write_text(dir / (name + ".json"), report_json(r));
  write_text(dir / (name + ".csv"), composition_csv(r));
}

void write_report(const SweepReport& r, const std::filesystem::path& dir, const std::string& name) {
  write_text(dir / (name + ".json"), report_json(r));
  write_text(dir / (name + ".csv"), sweep_csv(r));
  write_text(dir / (name + "_loss.csv"), sweep_loss_csv(r));
  write_text(dir / (name + "_hist.csv"), sweep_hist_csv(r));
}

}  // namespace mvd
