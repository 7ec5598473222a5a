#ifndef COLEP_IO_HPP
#define COLEP_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "colep/circuits.hpp"
#include "colep/conformal.hpp"
#include "colep/simgen.hpp"
#include "colep/types.hpp"

namespace colep {

using Json = nlohmann::json;

// Shortest-round-trip style formatting shared by every writer so identical
// runs emit byte-identical files.
std::string format_double(double x);

// Knowledge base JSON:
// {"num_classes": N, "num_concepts": L,
//  "circuits": [{"rules": [{"antecedent": i, "consequent": k, "weight": w}]}],
//  "mixture_weights": [..] | "estimate"}
// Indices are 0-based over the concatenation; concept l sits at N + l.
struct KnowledgeBaseSpec {
  LabelSpace label_space;
  std::vector<CircuitSpec> circuits;
  std::optional<Vec> mixture_weights;  // nullopt: estimate from calibration data

  bool needs_estimation() const { return !mixture_weights.has_value(); }
  KnowledgeBase build() const;  // StructuralError when weights are pending
  KnowledgeBase build_with(const std::vector<Vec>& beliefs, const std::vector<int>& labels) const;
};

KnowledgeBaseSpec knowledge_base_from_json(const Json& j);
KnowledgeBaseSpec load_knowledge_base(const std::string& path);
Json knowledge_base_to_json(const KnowledgeBase& kb);

WorldSpec world_from_json(const Json& j);
Json world_to_json(const WorldSpec& spec);

// CalibrationSet CSV: header p_0..p_{W-1},label[,u]; one row per sample.
std::vector<CalibrationRecord> load_calibration_csv(const std::string& path);
void write_calibration_csv(const std::string& path, const std::vector<CalibrationRecord>& records);

// Interval variant: lo_0,hi_0,..,lo_{W-1},hi_{W-1},label[,u].
std::vector<IntervalRecord> load_interval_csv(const std::string& path);
void write_interval_csv(const std::string& path, const std::vector<IntervalRecord>& records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace colep

#endif
