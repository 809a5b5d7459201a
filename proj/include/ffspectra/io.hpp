#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "ffspectra/closed_forms.hpp"
#include "ffspectra/field.hpp"
#include "ffspectra/spectra.hpp"

namespace ffspectra {

using json = nlohmann::ordered_json;

/// Header `a,b,count`, rows in ascending (a, b).
inline void write_csv(std::ostream& out, const SpectrumTable& t) {
  out << "a,b,count\n";
  const std::uint32_t q = t.q();
  for (std::uint32_t a = 0; a < q; ++a)
    for (std::uint32_t b = 0; b < q; ++b) out << a << ',' << b << ',' << t.at(Elem{a}, Elem{b}) << '\n';
}

inline json to_json(const SpectrumSummary& s) {
  auto side = [](const std::map<std::uint32_t, std::uint64_t>& m) {
    json j = json::object();
    for (const auto& [v, cnt] : m) j[std::to_string(v)] = cnt;
    return j;
  };
  return json{{"trivial", side(s.trivial)}, {"nontrivial", side(s.nontrivial)}};
}

inline json field_json(const Field& f) {
  return json{{"p", f.p()}, {"n", f.n()}, {"modulus", f.modulus()}};
}

inline json to_json(const SpectrumTable& t, const std::string& func) {
  const Field& f = t.field();
  const Witness w = t.uniformity();
  json j;
  j["p"] = f.p();
  j["n"] = f.n();
  j["modulus"] = f.modulus();
  j["func"] = func;
  j["kind"] = to_string(t.kind());
  j["summary"] = to_json(t.summary());
  j["uniformity"] = w.value;
  if (w.found) j["witness"] = json{{"a", w.a.v}, {"b", w.b.v}};
  return j;
}

inline json to_json(const VerifyReport& r) {
  json j;
  j["theorem"] = to_string(r.theorem);
  j["field"] = field_json(*r.field);
  j["function"] = r.function;
  j["cells_checked"] = r.cells_checked;
  json mism = json::array();
  for (const auto& m : r.mismatches)
    mism.push_back(json{{"a", m.a.v}, {"b", m.b.v}, {"predicted", m.predicted}, {"actual", m.actual}, {"case", m.case_label}});
  j["mismatches"] = std::move(mism);
  j["mismatch_count"] = r.mismatch_count;
  j["conflict_count"] = r.conflict_count;
  j["uniformity"] = r.uniformity;
  j["spectrum"] = to_json(r.spectrum);
  if (r.bound) j["bound"] = *r.bound;
  json facts = json::object();
  for (const auto& [k, v] : r.facts) facts[k] = v;
  j["facts"] = std::move(facts);
  j["passed"] = r.passed();
  return j;
}

}  // namespace ffspectra
