#pragma once

#include <filesystem>
#include <string>

#include "mvd/simulator/experiments.hpp"

namespace mvd {

// JSON documents hold the full report; CSV files hold one row per measured value:
//   purity.csv       attribute,purity,view,alpha_mean,alpha_se,argmax_fraction
//   benchmark.csv    block,variant,map_mean,map_se,mrr_mean,mrr_se,delta_<view>_mean,delta_<view>_se...
//   diversity.csv    same columns as benchmark.csv
//   composition.csv  trial,attribute_a,class_a,attribute_b,class_b,joint_relevant,map_composed,map_source_a,
//                    map_source_b,success
//   sweep.csv        lambda2,kind,view_a,view_b,pearson,hsic   (kind: inter_input, inter_output, intra)
//   sweep_loss.csv   lambda2,split,ali,spc,inf,rec,total
//   sweep_hist.csv   source,view,bin_lo,bin_hi,count            (source: input or the lambda2 value)
// Numbers use the shortest representation that round-trips.

std::string report_json(const PurityReport& r);
std::string report_json(const BenchmarkReport& r);
std::string report_json(const CompositionReport& r);
std::string report_json(const SweepReport& r);

std::string purity_csv(const PurityReport& r);
std::string benchmark_csv(const BenchmarkReport& r);
std::string composition_csv(const CompositionReport& r);
std::string sweep_csv(const SweepReport& r);
std::string sweep_loss_csv(const SweepReport& r);
std::string sweep_hist_csv(const SweepReport& r);

/// Writes <name>.json and <name>.csv (plus the sweep's extra CSVs) into `dir`.
void write_report(const PurityReport& r, const std::filesystem::path& dir, const std::string& name = "purity");
void write_report(const BenchmarkReport& r, const std::filesystem::path& dir, const std::string& name = "benchmark");
void write_report(const CompositionReport& r, const std::filesystem::path& dir,
                  const std::string& name = "composition");
void write_report(const SweepReport& r, const std::filesystem::path& dir, const std::string& name = "sweep");

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace mvd
