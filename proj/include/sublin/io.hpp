#ifndef SUBLIN_IO_HPP
#define SUBLIN_IO_HPP

// JSON/CSV plumbing.  Formats:
//   space   {"atoms": N}
//   measure {"weights": [...]}
//   vector  {"values": [[...], ...]}            rows = atoms
//   family  {"atoms": N, "members": [...]}      members as measures
//           + optional {"structure": "homogeneous-product",
//                       "marginals": [...], "n": N}
//   slowly varying {"kind": "log", "b": 1.0}
// Doubles are rendered with %.17g so reruns are byte-identical.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sublin/errors.hpp"
#include "sublin/family.hpp"
#include "sublin/measure_space.hpp"
#include "sublin/dependence.hpp"
#include "sublin/transforms.hpp"

namespace sublin {

using json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw structural_error("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw structural_error("malformed JSON in " + path);
  return j;
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw structural_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

namespace detail {

inline std::vector<double> double_array(const json& j, const char* what) {
  if (!j.is_array()) throw structural_error(std::string(what) + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw structural_error(std::string(what) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

/// A measure entry is either {"weights": [...]} or the bare weight array.
inline std::vector<double> weights_of(const json& j) {
  if (j.is_object()) {
    if (!j.contains("weights")) throw structural_error("measure: missing \"weights\"");
    return double_array(j.at("weights"), "measure weights");
  }
  return double_array(j, "measure weights");
}

}  // namespace detail

inline SampleSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms"))
    throw structural_error("space: missing \"atoms\"");
  return SampleSpace(j.at("atoms").get<std::int64_t>());
}

inline Measure measure_from_json(const json& j) {
  std::vector<double> w = detail::weights_of(j);
  const SampleSpace space(static_cast<std::int64_t>(w.size()));
  return Measure(space, std::move(w));
}

inline RandomVector vector_from_json(const SampleSpace& space, const json& j) {
  if (!j.is_object() || !j.contains("values"))
    throw structural_error("vector: missing \"values\"");
  const json& rows = j.at("values");
  if (!rows.is_array() || rows.empty())
    throw structural_error("vector: \"values\" must be a nonempty array");
  if (rows.front().is_number())  // flat array = one coordinate
    return RandomVector::single(space, detail::double_array(rows, "vector values"));
  std::vector<std::vector<double>> r;
  r.reserve(rows.size());
  for (const auto& row : rows) r.push_back(detail::double_array(row, "vector values"));
  return RandomVector::from_rows(space, r);
}

/// Families: untagged {"atoms", "members"}; tagged adds "structure",
/// "marginals", "n" (members may then be omitted and are generated).
inline MeasureFamily family_from_json(const json& j) {
  if (!j.is_object()) throw structural_error("family: expected an object");
  if (j.contains("structure")) {
    const std::string tag = j.at("structure").get<std::string>();
    if (tag != "homogeneous-product")
      throw structural_error("family: unknown structure tag \"" + tag + "\"");
    if (!j.contains("marginals") || !j.contains("n"))
      throw structural_error("family: structure tag requires \"marginals\" and \"n\"");
    std::vector<Measure> marginals;
    for (const auto& m : j.at("marginals")) marginals.push_back(measure_from_json(m));
    const std::int64_t n = j.at("n").get<std::int64_t>();
    std::vector<Measure> members;
    if (j.contains("members")) {
      if (marginals.empty()) throw structural_error("family: no marginals");
      const std::int64_t base = marginals.front().space().atom_count;
      std::int64_t total = 1;
      for (std::int64_t i = 0; i < n; ++i) {
        if (total > kMaxProductAtoms / base)
          throw size_limit_error("family: product space exceeds the atom ceiling");
        total *= base;
      }
      const SampleSpace space(total);
      for (const auto& m : j.at("members"))
        members.emplace_back(space, detail::weights_of(m));
    }
    return MeasureFamily::homogeneous_product(std::move(marginals), n, std::move(members));
  }
  if (!j.contains("members") || !j.at("members").is_array() || j.at("members").empty())
    throw structural_error("family: missing \"members\"");
  const SampleSpace space = space_from_json(j);
  std::vector<Measure> members;
  for (const auto& m : j.at("members")) members.emplace_back(space, detail::weights_of(m));
  return MeasureFamily(std::move(members));
}

inline SlowlyVaryingFn slowly_varying_from_json(const json& j) {
  if (j.is_null()) return SlowlyVaryingFn::one();
  if (!j.is_object() || !j.contains("kind"))
    throw structural_error("slowly varying: missing \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  const double b = j.contains("b") ? j.at("b").get<double>() : 1.0;
  if (kind == "one") return SlowlyVaryingFn::one();
  if (kind == "log") return SlowlyVaryingFn::log();
  if (kind == "log_pow") return SlowlyVaryingFn::log_pow(b);
  if (kind == "loglog") return SlowlyVaryingFn::loglog();
  throw structural_error("slowly varying: unknown kind \"" + kind + "\"");
}

inline json certificate_to_json(const ENDCertificate& c) {
  json j;
  j["kind"] = c.certified() ? "certified" : "estimated";
  j["K"] = c.K;
  j["direction"] = to_string(c.direction);
  j["evidence"] = c.evidence;
  return j;
}

/// Minimal CSV emitter; cells are pre-formatted strings, rows newline-ended.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw structural_error("cannot write " + path);
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace sublin

#endif
