#include "colep/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace colep {

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw StructuralError(std::string(what) + ": cannot parse number '" + s + "'");
  }
}

int parse_int(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw StructuralError(std::string(what) + ": cannot parse integer '" + s + "'");
  }
}

Vec vec_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw StructuralError(std::string(what) + ": expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}
}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

KnowledgeBase KnowledgeBaseSpec::build() const {
  if (!mixture_weights)
    throw StructuralError("KnowledgeBaseSpec: mixture weights pending estimation");
  return KnowledgeBase(circuits, *mixture_weights);
}

KnowledgeBase KnowledgeBaseSpec::build_with(const std::vector<Vec>& beliefs,
                                            const std::vector<int>& labels) const {
  Vec beta = mixture_weights ? *mixture_weights
                             : estimate_mixture_weights(beliefs, labels, circuits);
  return KnowledgeBase(circuits, beta);
}

KnowledgeBaseSpec knowledge_base_from_json(const Json& j) {
  KnowledgeBaseSpec spec;
  spec.label_space = LabelSpace(j.at("num_classes").get<int>(), j.at("num_concepts").get<int>());
  if (!j.at("circuits").is_array() || j.at("circuits").empty())
    throw StructuralError("knowledge base: needs a non-empty circuits array");
  for (const auto& cj : j.at("circuits")) {
    std::vector<KnowledgeRule> rules;
    for (const auto& rj : cj.at("rules")) {
      rules.push_back(KnowledgeRule{rj.at("antecedent").get<int>(), rj.at("consequent").get<int>(),
                                    rj.at("weight").get<double>()});
    }
    spec.circuits.emplace_back(std::move(rules), spec.label_space);
  }
  const auto& mw = j.at("mixture_weights");
  if (mw.is_string()) {
    if (mw.get<std::string>() != "estimate")
      throw StructuralError("knowledge base: mixture_weights must be an array or \"estimate\"");
  } else {
    spec.mixture_weights = vec_from_json(mw, "mixture_weights");
  }
  return spec;
}

KnowledgeBaseSpec load_knowledge_base(const std::string& path) {
  return knowledge_base_from_json(load_json_file(path));
}

Json knowledge_base_to_json(const KnowledgeBase& kb) {
  Json j;
  j["num_classes"] = kb.label_space().num_classes;
  j["num_concepts"] = kb.label_space().num_concepts;
  Json circuits = Json::array();
  for (const auto& c : kb.circuits()) {
    Json rules = Json::array();
    for (const auto& r : c.rules())
      rules.push_back({{"antecedent", r.antecedent}, {"consequent", r.consequent}, {"weight", r.weight}});
    circuits.push_back({{"rules", rules}});
  }
  j["circuits"] = circuits;
  j["mixture_weights"] = vec_to_json(kb.mixture_weights());
  return j;
}

namespace {
NoiseSpec noise_from_json(const Json& j, const LabelSpace& ls, bool default_wrong_classes) {
  auto field_vec = [&](const char* key, double fallback) {
    if (!j.contains(key)) return Vec::Constant(ls.width(), fallback).eval();
    const auto& f = j.at(key);
    if (f.is_number()) return Vec::Constant(ls.width(), f.get<double>()).eval();
    Vec v = vec_from_json(f, key);
    if (v.size() != ls.width()) throw StructuralError("NoiseSpec: per-index field width mismatch");
    return v;
  };
  NoiseSpec n;
  n.t = field_vec("t", 0.9);
  n.z = field_vec("z", 0.95);
  n.wrong_side = BoolVec::Constant(ls.width(), false);
  if (j.contains("wrong_side")) {
    const auto& wsj = j.at("wrong_side");
    if (wsj.is_boolean()) {
      n.wrong_side.setConstant(wsj.get<bool>());
    } else if (wsj.is_string() && wsj.get<std::string>() == "classes") {
      for (int c = 0; c < ls.num_classes; ++c) n.wrong_side[c] = true;
    } else if (wsj.is_array()) {
      if (static_cast<int>(wsj.size()) != ls.width())
        throw StructuralError("NoiseSpec: wrong_side width mismatch");
      for (int i = 0; i < ls.width(); ++i) n.wrong_side[i] = wsj[static_cast<size_t>(i)].get<bool>();
    } else {
      throw StructuralError("NoiseSpec: wrong_side must be bool, \"classes\", or array");
    }
  } else if (default_wrong_classes) {
    for (int c = 0; c < ls.num_classes; ++c) n.wrong_side[c] = true;
  }
  return n;
}

Json noise_to_json(const NoiseSpec& n) {
  Json j;
  j["t"] = vec_to_json(n.t);
  j["z"] = vec_to_json(n.z);
  Json ws = Json::array();
  for (Eigen::Index i = 0; i < n.wrong_side.size(); ++i) ws.push_back(static_cast<bool>(n.wrong_side[i]));
  j["wrong_side"] = ws;
  return j;
}
}  // namespace

WorldSpec world_from_json(const Json& j) {
  WorldSpec spec;
  spec.label_space = LabelSpace(j.at("num_classes").get<int>(), j.at("num_concepts").get<int>());
  const int nc = spec.label_space.num_classes;
  const int l = spec.label_space.num_concepts;

  if (j.contains("class_priors"))
    spec.class_priors = vec_from_json(j.at("class_priors"), "class_priors");
  else
    spec.class_priors = Vec::Constant(nc, 1.0 / nc);

  if (j.contains("concept_map")) {
    for (const auto& row : j.at("concept_map")) {
      BoolVec bits = BoolVec::Constant(l, false);
      if (static_cast<int>(row.size()) != l)
        throw StructuralError("WorldSpec: concept_map row width mismatch");
      for (int i = 0; i < l; ++i) bits[i] = row[static_cast<size_t>(i)].get<int>() != 0;
      spec.concept_map.push_back(bits);
    }
  } else {
    // identity map: class j carries concept j (requires L >= N_c slots or L == N_c)
    for (int c = 0; c < nc; ++c) {
      BoolVec bits = BoolVec::Constant(l, false);
      if (c < l) bits[c] = true;
      spec.concept_map.push_back(bits);
    }
  }

  if (j.contains("concept_flip_prob")) {
    const auto& f = j.at("concept_flip_prob");
    spec.concept_flip_prob =
        f.is_number() ? Vec::Constant(l, f.get<double>()).eval() : vec_from_json(f, "concept_flip_prob");
  } else {
    spec.concept_flip_prob = Vec::Zero(l);
  }

  spec.benign_noise = j.contains("benign_noise")
                          ? noise_from_json(j.at("benign_noise"), spec.label_space, false)
                          : NoiseSpec::uniform(spec.label_space, 0.9, 0.95, false);
  spec.adversarial_noise =
      j.contains("adversarial_noise")
          ? noise_from_json(j.at("adversarial_noise"), spec.label_space, true)
          : NoiseSpec::class_attack(spec.label_space, 0.9, 0.95);

  spec.p_adversarial = j.value("p_adversarial", 0.0);
  spec.seed = j.value("seed", 0ull);
  spec.validate();
  return spec;
}

Json world_to_json(const WorldSpec& spec) {
  Json j;
  j["num_classes"] = spec.label_space.num_classes;
  j["num_concepts"] = spec.label_space.num_concepts;
  j["class_priors"] = vec_to_json(spec.class_priors);
  Json cmap = Json::array();
  for (const auto& row : spec.concept_map) {
    Json r = Json::array();
    for (Eigen::Index i = 0; i < row.size(); ++i) r.push_back(row[i] ? 1 : 0);
    cmap.push_back(r);
  }
  j["concept_map"] = cmap;
  j["concept_flip_prob"] = vec_to_json(spec.concept_flip_prob);
  j["benign_noise"] = noise_to_json(spec.benign_noise);
  j["adversarial_noise"] = noise_to_json(spec.adversarial_noise);
  j["p_adversarial"] = spec.p_adversarial;
  j["seed"] = spec.seed;
  return j;
}

std::vector<CalibrationRecord> load_calibration_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open CSV file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw StructuralError("empty CSV file: " + path);
  auto header = split_csv_line(line);
  int width = 0;
  bool has_u = false;
  for (const auto& h : header) {
    if (h.rfind("p_", 0) == 0)
      ++width;
    else if (h == "label")
      ;
    else if (h == "u")
      has_u = true;
    else
      throw StructuralError("unexpected CSV column: " + h);
  }
  if (width == 0) throw StructuralError("CSV has no p_i columns: " + path);

  std::vector<CalibrationRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (static_cast<int>(f.size()) != width + 1 + (has_u ? 1 : 0))
      throw StructuralError("CSV row has wrong field count");
    CalibrationRecord rec;
    rec.beliefs = Vec(width);
    for (int i = 0; i < width; ++i) rec.beliefs[i] = parse_double(f[static_cast<size_t>(i)], "csv");
    rec.label = parse_int(f[static_cast<size_t>(width)], "csv label");
    if (has_u) rec.u = parse_double(f[static_cast<size_t>(width + 1)], "csv u");
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw StructuralError("CSV has no data rows: " + path);
  return out;
}

void write_calibration_csv(const std::string& path, const std::vector<CalibrationRecord>& records) {
  if (records.empty()) throw StructuralError("write_calibration_csv: no records");
  const Eigen::Index width = records.front().beliefs.size();
  const bool has_u = records.front().u.has_value();
  std::string out;
  for (Eigen::Index i = 0; i < width; ++i) out += "p_" + std::to_string(i) + ",";
  out += "label";
  if (has_u) out += ",u";
  out += "\n";
  for (const auto& rec : records) {
    if (rec.beliefs.size() != width || rec.u.has_value() != has_u)
      throw StructuralError("write_calibration_csv: inconsistent records");
    for (Eigen::Index i = 0; i < width; ++i) out += format_double(rec.beliefs[i]) + ",";
    out += std::to_string(rec.label);
    if (has_u) out += "," + format_double(*rec.u);
    out += "\n";
  }
  write_text_file(path, out);
}

std::vector<IntervalRecord> load_interval_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open CSV file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw StructuralError("empty CSV file: " + path);
  auto header = split_csv_line(line);
  int width = 0;
  bool has_u = false;
  for (const auto& h : header) {
    if (h.rfind("lo_", 0) == 0) ++width;
  }
  for (const auto& h : header)
    if (h == "u") has_u = true;
  if (width == 0) throw StructuralError("interval CSV has no lo_i columns: " + path);

  std::vector<IntervalRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (static_cast<int>(f.size()) != 2 * width + 1 + (has_u ? 1 : 0))
      throw StructuralError("interval CSV row has wrong field count");
    Vec lo(width), hi(width);
    for (int i = 0; i < width; ++i) {
      lo[i] = parse_double(f[static_cast<size_t>(2 * i)], "csv lo");
      hi[i] = parse_double(f[static_cast<size_t>(2 * i + 1)], "csv hi");
    }
    IntervalRecord rec;
    rec.beliefs = IntervalVector(std::move(lo), std::move(hi));
    rec.label = parse_int(f[static_cast<size_t>(2 * width)], "csv label");
    if (has_u) rec.u = parse_double(f[static_cast<size_t>(2 * width + 1)], "csv u");
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw StructuralError("interval CSV has no data rows: " + path);
  return out;
}

void write_interval_csv(const std::string& path, const std::vector<IntervalRecord>& records) {
  if (records.empty()) throw StructuralError("write_interval_csv: no records");
  const Eigen::Index width = records.front().beliefs.size();
  const bool has_u = records.front().u.has_value();
  std::string out;
  for (Eigen::Index i = 0; i < width; ++i)
    out += "lo_" + std::to_string(i) + ",hi_" + std::to_string(i) + ",";
  out += "label";
  if (has_u) out += ",u";
  out += "\n";
  for (const auto& rec : records) {
    for (Eigen::Index i = 0; i < width; ++i)
      out += format_double(rec.beliefs.lower[i]) + "," + format_double(rec.beliefs.upper[i]) + ",";
    out += std::to_string(rec.label);
    if (has_u) out += "," + format_double(*rec.u);
    out += "\n";
  }
  write_text_file(path, out);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write file: " + path);
  out << content;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw StructuralError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace colep
